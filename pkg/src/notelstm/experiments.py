"""Checkpoint probes used by the evolution experiments.

These measure, for a single checkpoint, what the model has picked up so far:
interval statistics of seeded samples, next-note accuracy on locally
predictable positions, and whether it honours a long-range register rule.
"""

import numpy as np

from .analysis import randomness_metrics
from .model import forward_sequence
from .sampling import Greedy, Stochastic, default_seed, sample_melody
from .synthetic import phrase_a_length, two_phrase_rule_holds
from .vocab import encode


def sample_randomness(ckpt, rng_seeds, seed_notes=None, n_notes=30, temperature=1.0):
    """Randomness metrics of one stochastic sample per RNG seed.

    Intervals are taken over the generated notes only.
    """
    seed_notes = default_seed() if seed_notes is None else seed_notes
    out = []
    for s in rng_seeds:
        melody = sample_melody(ckpt, seed_notes, n_notes, Stochastic(temperature, s))
        out.append(randomness_metrics(melody))
    return out


def phrase_a_accuracy(ckpt, melodies):
    """Teacher-forced argmax accuracy on phrase-A notes from the third on.

    The marker and the first walk note are random by construction, so
    positions 0 and 1 are excluded.
    """
    hits = total = 0
    for melody in melodies:
        la = phrase_a_length(len(melody))
        idx = encode(melody, ckpt.vocab)
        logits, _, _ = forward_sequence(idx[:la - 1], ckpt.params)
        pred = logits.argmax(axis=1)
        # logits[t] predicts note t + 1
        hits += int(np.sum(pred[1:] == np.asarray(idx[2:la])))
        total += la - 2
    return hits / total


def register_accuracy(ckpt, melodies):
    """Fraction of prompts whose greedy phrase-B continuation obeys the rule.

    Each melody's phrase A is the prompt; the model generates the remaining
    notes.
    """
    ok = 0
    for melody in melodies:
        la = phrase_a_length(len(melody))
        prompt = melody[:la]
        generated = sample_melody(ckpt, prompt, len(melody) - la, Greedy())
        ok += two_phrase_rule_holds(prompt + generated)
    return ok / len(melodies)
