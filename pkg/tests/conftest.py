import time

import pytest

from notelstm.model import ModelConfig
from notelstm.optim import AdamHyper
from notelstm.synthetic import generate_synthetic_corpus
from notelstm.training import train

# Scale run: one 257-note melody gives 8 windows of 32; 8 divides the
# 200-iteration averaging width, so each averaged block sees every window
# equally often.
SCALE_LENGTH, SCALE_COUNT, SCALE_ITERS = 257, 1, 5000

# Two-phrase run: 33-note melodies are exactly one window each.
TWO_PHRASE_LENGTH, TWO_PHRASE_COUNT = 33, 256
TWO_PHRASE_ITERS, TWO_PHRASE_EARLY = 24000, 1200
TWO_PHRASE_HIDDEN, TWO_PHRASE_LR = 64, 3e-3

ACCEPTANCE_LINES = []


class Run:
    def __init__(self, corpus, params, log, ckpts, seconds):
        self.corpus = corpus
        self.params = params
        self.log = log
        self.ckpts = ckpts
        self.seconds = seconds


def _run(corpus, config, hyper, schedule, iters):
    ckpts = {}
    t0 = time.perf_counter()
    params, log = train(corpus, config, hyper, schedule=schedule, total_iterations=iters,
                        checkpoint_sink=lambda c: ckpts.__setitem__(c.iteration, c))
    return Run(corpus, params, log, ckpts, time.perf_counter() - t0)


@pytest.fixture(scope="session")
def scale_run():
    corpus = generate_synthetic_corpus("scale", SCALE_LENGTH, SCALE_COUNT, 0)
    return _run(corpus, ModelConfig(vocab_size=8), AdamHyper(), [0, SCALE_ITERS], SCALE_ITERS)


@pytest.fixture(scope="session")
def two_phrase_run():
    corpus = generate_synthetic_corpus("two-phrase", TWO_PHRASE_LENGTH, TWO_PHRASE_COUNT, 0)
    config = ModelConfig(vocab_size=2, hidden_size=TWO_PHRASE_HIDDEN)
    return _run(corpus, config, AdamHyper(alpha=TWO_PHRASE_LR),
                [0, TWO_PHRASE_EARLY, TWO_PHRASE_ITERS], TWO_PHRASE_ITERS)


@pytest.fixture
def acceptance():
    def record(number, title, ok, detail=""):
        line = f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {title}"
        if detail:
            line += f" ({detail})"
        ACCEPTANCE_LINES.append(line)
        print(line)
        return ok
    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
