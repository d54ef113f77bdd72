"""Training loop, loss logs and the checkpoint schedule.

One iteration is one ADAM step on one window. The loss logged for iteration
``i`` is measured with the parameters after ``i`` updates, before update
``i + 1`` is applied, so iteration 0 describes the untrained network.
Windows are visited in one permutation drawn from the training RNG and
cycled; with ``n`` windows, iteration ``i`` always sees the same window as
iteration ``i + n``.
"""

import csv
import io
import logging
import os
from dataclasses import dataclass, field

import numpy as np

from .checkpoint import TrainingCheckpoint, save_checkpoint
from .errors import DomainError
from .model import init_parameters, loss_and_gradients
from .optim import AdamState, adam_step
from .vocab import build_vocabulary, make_training_windows

log = logging.getLogger(__name__)

DEFAULT_SCHEDULE = (0, 20, 30, 750, 40000)


def parse_schedule(text):
    """``"0,20,30"`` -> ``[0, 20, 30]`` (sorted, de-duplicated)."""
    items = [s.strip() for s in text.split(",") if s.strip()]
    if not items:
        raise DomainError("empty checkpoint schedule")
    values = sorted({int(s) for s in items})
    if values[0] < 0:
        raise DomainError("checkpoint iterations must be non-negative")
    return values


@dataclass
class LossLog:
    iterations: list = field(default_factory=list)
    losses: list = field(default_factory=list)

    def append(self, iteration, loss):
        if self.iterations and iteration != self.iterations[-1] + 1:
            raise DomainError(f"loss log expected iteration {self.iterations[-1] + 1}, got {iteration}")
        self.iterations.append(iteration)
        self.losses.append(loss)

    def __len__(self):
        return len(self.iterations)

    def loss_at(self, iteration):
        k = iteration - self.iterations[0] if self.iterations else -1
        if not 0 <= k < len(self) or self.iterations[k] != iteration:
            raise DomainError(f"iteration {iteration} is not in the loss log")
        return self.losses[k]

    def extended(self, other):
        """This log up to ``other``'s first iteration, followed by ``other``."""
        keep = [i for i in self.iterations if i < other.iterations[0]] if other.iterations else self.iterations
        out = LossLog(list(keep), self.losses[:len(keep)])
        for i, v in zip(other.iterations, other.losses):
            out.append(i, v)
        return out

    def moving_average(self, width):
        arr = np.asarray(self.losses)
        if arr.size < width:
            return np.empty(0)
        c = np.cumsum(np.concatenate([[0.0], arr]))
        return (c[width:] - c[:-width]) / width

    def to_csv(self):
        buf = io.StringIO()
        buf.write("iteration,loss\n")
        for i, v in zip(self.iterations, self.losses):
            buf.write(f"{i},{v:.17g}\n")
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text):
        reader = csv.reader(io.StringIO(text))
        header = next(reader, None)
        if header is None or [h.strip() for h in header[:2]] != ["iteration", "loss"]:
            raise DomainError("loss CSV must start with an 'iteration,loss' header")
        out = cls()
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            try:
                out.append(int(row[0]), float(row[1]))
            except (ValueError, IndexError) as exc:
                raise DomainError(f"malformed loss CSV row at line {lineno}: {row!r}") from exc
        return out


class CsvLossSink:
    """Appends ``iteration,loss`` rows to a file as training proceeds."""

    def __init__(self, path, keep_before=None):
        prefix = LossLog()
        if keep_before is not None and os.path.exists(path):
            with open(path, encoding="utf-8") as fh:
                old = LossLog.from_csv(fh.read())
            for i, v in zip(old.iterations, old.losses):
                if i < keep_before:
                    prefix.append(i, v)
        self.fh = open(path, "w", encoding="utf-8", newline="")
        self.fh.write(prefix.to_csv())

    def __call__(self, iteration, loss):
        self.fh.write(f"{iteration},{loss:.17g}\n")

    def close(self):
        self.fh.close()


class DirectoryCheckpointSink:
    def __init__(self, out_dir):
        self.out_dir = out_dir
        self.paths = []

    def __call__(self, ckpt):
        path = os.path.join(self.out_dir, f"ckpt-{ckpt.iteration}.mlck")
        save_checkpoint(ckpt, path)
        self.paths.append(path)


def train(corpus, config, hyper, schedule=DEFAULT_SCHEDULE, total_iterations=None,
          checkpoint_sink=None, loss_sink=None, vocab=None, full_vocab=False, resume=None):
    """Run the training protocol and return ``(params, loss_log)``.

    ``config.vocab_size`` is replaced by the size of the vocabulary actually
    used. With ``resume`` (a :class:`TrainingCheckpoint`) the model, optimizer,
    vocabulary and RNG come from the checkpoint and the returned log starts at
    the checkpoint's iteration.
    """
    schedule = sorted(set(schedule))
    if total_iterations is None:
        total_iterations = max(schedule)
    if schedule and total_iterations < schedule[-1]:
        raise DomainError(
            f"total_iterations {total_iterations} is before scheduled checkpoint {schedule[-1]}")

    if resume is not None:
        vocab = resume.vocab
        config = resume.config
        hyper = resume.hyper
        params = resume.params.copy()
        state = AdamState(resume.adam.m.copy(), resume.adam.v.copy(), resume.adam.t)
        start = resume.iteration
        rng = np.random.default_rng()
        rng.bit_generator.state = resume.rng_state
    else:
        if vocab is None:
            vocab = build_vocabulary(corpus, full=full_vocab)
        config = _with_vocab_size(config, len(vocab))
        params = init_parameters(config)
        state = AdamState.zeros_like(params)
        start = 0
        rng = np.random.default_rng([config.rng_seed, 1])

    windows = make_training_windows(corpus, vocab, config.window_len)
    n = len(windows)
    # checkpoints keep the pre-permutation state so a resume redraws the same order
    order_state = rng.bit_generator.state
    order = rng.permutation(n)

    loss_log = LossLog()
    for it in range(start, total_iterations + 1):
        loss, grads = loss_and_gradients(windows[order[it % n]], params)
        loss_log.append(it, loss)
        if loss_sink is not None:
            loss_sink(it, loss)
        if it in schedule and checkpoint_sink is not None:
            checkpoint_sink(TrainingCheckpoint(
                config=config, params=params.copy(),
                adam=AdamState(state.m.copy(), state.v.copy(), state.t),
                hyper=hyper, iteration=it, loss_at_capture=loss, vocab=vocab,
                rng_state=order_state))
        if it % 1000 == 0:
            log.info("iteration %d loss %.5f", it, loss)
        if it < total_iterations:
            params, state = adam_step(params, grads, state, hyper)
    return params, loss_log


def _with_vocab_size(config, size):
    if config.vocab_size == size:
        return config
    return type(config)(**{**config.__dict__, "vocab_size": size})
