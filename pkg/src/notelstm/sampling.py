"""Autoregressive melody generation from a checkpoint."""

from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .mathcore import softmax
from .model import forward_sequence
from .vocab import encode, format_melody, parse_melody

DEFAULT_SEED_NOTES = "C4 D4 E4 D4"
DEFAULT_LENGTH = 30


@dataclass(frozen=True)
class Greedy:
    pass


@dataclass(frozen=True)
class Stochastic:
    temperature: float = 1.0
    rng_seed: int = 0

    def __post_init__(self):
        if not self.temperature > 0:
            raise DomainError("temperature must be positive")


def default_seed():
    return parse_melody(DEFAULT_SEED_NOTES)


def choose(logits, mode, rng=None):
    """Pick an index from one logit vector under ``mode``."""
    if isinstance(mode, Greedy):
        # np.argmax returns the first maximum, i.e. the lowest index on ties
        return int(np.argmax(logits))
    q = softmax(np.asarray(logits) / mode.temperature)
    return int(rng.choice(q.size, p=q))


def sample_melody(ckpt, seed_notes, n_notes=DEFAULT_LENGTH, mode=None):
    """Prime the model with ``seed_notes`` and generate ``n_notes`` more.

    The returned melody excludes the seed. Stochastic draws come from a
    generator seeded by ``mode.rng_seed``, so equal arguments give equal output.
    """
    mode = Stochastic() if mode is None else mode
    if n_notes < 1:
        raise DomainError("n_notes must be positive")
    vocab, params = ckpt.vocab, ckpt.params
    indices = encode(list(seed_notes), vocab)
    rng = np.random.default_rng(mode.rng_seed) if isinstance(mode, Stochastic) else None
    logits, _, state = forward_sequence(indices, params)
    out = []
    nxt = choose(logits[-1], mode, rng)
    for k in range(n_notes):
        out.append(vocab.tokens[nxt])
        if k + 1 == n_notes:
            break
        logits, _, state = forward_sequence([nxt], params, state)
        nxt = choose(logits[-1], mode, rng)
    return out


def sample_at_checkpoints(ckpts, seed_notes, n_notes=DEFAULT_LENGTH, mode=None):
    """One melody per checkpoint, all under the same seed and mode."""
    ckpts = list(ckpts)
    if not ckpts:
        raise DomainError("no checkpoints given")
    return [(c.iteration, sample_melody(c, seed_notes, n_notes, mode)) for c in ckpts]


def format_annotated(seed_notes, melody):
    return f"{format_melody(seed_notes)} | {format_melody(melody)}"
