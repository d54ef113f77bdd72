import math

import numpy as np
import pytest

from notelstm.checkpoint import load_checkpoint
from notelstm.errors import DomainError
from notelstm.model import ModelConfig
from notelstm.optim import AdamHyper
from notelstm.synthetic import generate_synthetic_corpus
from notelstm.training import (DEFAULT_SCHEDULE, CsvLossSink, DirectoryCheckpointSink, LossLog,
                               parse_schedule, train)


@pytest.fixture(scope="module")
def corpus():
    return generate_synthetic_corpus("arpeggio", 41, 6, 4)


def small(**kw):
    base = dict(vocab_size=2, hidden_size=8, num_layers=2, window_len=8, init_scale=0.1, rng_seed=3)
    base.update(kw)
    return ModelConfig(**base)


def collect(corpus, config, schedule, total, **kw):
    ckpts = []
    params, log = train(corpus, config, AdamHyper(), schedule=schedule, total_iterations=total,
                        checkpoint_sink=ckpts.append, **kw)
    return params, log, ckpts


def test_default_schedule():
    assert parse_schedule("0,20,30,750,40000") == list(DEFAULT_SCHEDULE) == [0, 20, 30, 750, 40000]
    assert parse_schedule(" 30, 0,30 ") == [0, 30]
    with pytest.raises(ValueError):
        parse_schedule("a,b")
    with pytest.raises(DomainError):
        parse_schedule("")


def test_single_zero_checkpoint_is_log_v(corpus):
    _, log, ckpts = collect(corpus, small(init_scale=0.0), [0], 0)
    V = len(ckpts[0].vocab)
    assert len(ckpts) == 1 and len(log) == 1
    assert abs(ckpts[0].loss_at_capture - math.log(V)) <= 1e-12
    assert ckpts[0].adam.t == 0


def test_counting(corpus):
    _, log, ckpts = collect(corpus, small(), [0, 20, 30, 75], 75)
    assert [c.iteration for c in ckpts] == [0, 20, 30, 75]
    assert len(log) == 76 and log.iterations == list(range(76))
    for c in ckpts:
        assert c.loss_at_capture == log.loss_at(c.iteration)
        assert c.adam.t == c.iteration


def test_schedule_beyond_total(corpus):
    with pytest.raises(DomainError):
        train(corpus, small(), AdamHyper(), schedule=[0, 50], total_iterations=10)


def test_no_windows():
    with pytest.raises(DomainError):
        train([[60, 62, 64]], small(), AdamHyper(), schedule=[0], total_iterations=0)


def test_deterministic(corpus):
    _, a, ca = collect(corpus, small(), [40], 40)
    _, b, cb = collect(corpus, small(), [40], 40)
    assert a.losses == b.losses and ca[0] == cb[0]


def test_resume_matches_straight_run(corpus, tmp_path):
    _, straight, _ = collect(corpus, small(), [200], 200)
    sink = DirectoryCheckpointSink(tmp_path)
    _, first = train(corpus, small(), AdamHyper(), schedule=[100], total_iterations=100,
                        checkpoint_sink=sink)
    ckpt = load_checkpoint(tmp_path / "ckpt-100.mlck")
    _, second = train(corpus, None, None, schedule=[], total_iterations=200, resume=ckpt)
    assert second.iterations[0] == 100
    joined = first.extended(second)
    assert joined.iterations == straight.iterations
    assert joined.losses == straight.losses


def test_windows_cycle(corpus):
    # 6 melodies of 41 notes at window 8 give 30 windows; a fixed order means
    # the zero-learning-rate limit repeats with period 30
    hyper = AdamHyper(alpha=1e-300)
    _, log = train(corpus, small(), hyper, schedule=[], total_iterations=70)
    assert log.losses[:10] == log.losses[30:40] == log.losses[60:70]


def test_full_vocab(corpus):
    _, _, ckpts = collect(corpus, small(), [0], 0, full_vocab=True)
    assert len(ckpts[0].vocab) == 128 and ckpts[0].config.vocab_size == 128


class TestLossLog:
    def test_csv_round_trip(self):
        log = LossLog()
        for i, v in enumerate([2.0794415416798357, 0.1 + 0.2, 1e-17]):
            log.append(i, v)
        text = log.to_csv()
        assert text.splitlines()[0] == "iteration,loss"
        assert text.splitlines()[2] == "1,0.30000000000000004"
        assert LossLog.from_csv(text) == log

    def test_strictly_increasing(self):
        log = LossLog()
        log.append(0, 1.0)
        with pytest.raises(DomainError):
            log.append(2, 1.0)

    def test_moving_average(self):
        log = LossLog(list(range(5)), [5.0, 4.0, 3.0, 2.0, 1.0])
        np.testing.assert_allclose(log.moving_average(2), [4.5, 3.5, 2.5, 1.5])

    def test_bad_csv(self):
        with pytest.raises(DomainError):
            LossLog.from_csv("it,l\n")
        with pytest.raises(DomainError):
            LossLog.from_csv("iteration,loss\n0,abc\n")

    def test_sink_keeps_prefix(self, tmp_path):
        path = tmp_path / "loss.csv"
        path.write_text("iteration,loss\n0,3\n1,2\n2,1\n")
        sink = CsvLossSink(path, keep_before=2)
        sink(2, 0.5)
        sink.close()
        assert LossLog.from_csv(path.read_text()).losses == [3.0, 2.0, 0.5]
