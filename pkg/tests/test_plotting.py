import hashlib

import pytest

from notelstm.analysis import interval_report, milestone_report
from notelstm.plotting import figsize, plot_interval_histograms, plot_loss_curve, plot_melodies
from notelstm.vocab import parse_melody

PNG = b"\x89PNG\r\n\x1a\n"


def render_twice(tmp_path, fn):
    paths = [tmp_path / "a.png", tmp_path / "b.png"]
    for p in paths:
        fn(str(p))
    data = [p.read_bytes() for p in paths]
    return data


def test_loss_curve(tmp_path):
    ms = milestone_report([(0, 4.68086), (20, 3.74101), (30, 3.19856), (750, 2.19148), (40000, 1.59703)])
    a, b = render_twice(tmp_path, lambda p: plot_loss_curve(ms.iterations, ms.losses, p, ms, log_x=True))
    assert a.startswith(PNG) and a == b


def test_loss_curve_without_milestones(tmp_path):
    a, b = render_twice(tmp_path, lambda p: plot_loss_curve(range(50), [1 / (k + 1) for k in range(50)], p))
    assert a == b


def test_melodies(tmp_path):
    seed = parse_melody("C4 D4 E4 D4")
    samples = [(0, parse_melody("C6 A2 G4")), (20, parse_melody("E4 F4 G4"))]
    a, b = render_twice(tmp_path, lambda p: plot_melodies(samples, p, seed))
    assert a.startswith(PNG) and a == b


def test_melodies_without_seed(tmp_path):
    plot_melodies([("x", [60, 62, 64])], str(tmp_path / "m.png"))
    assert (tmp_path / "m.png").read_bytes().startswith(PNG)


def test_histograms(tmp_path):
    reps = [interval_report(parse_melody("C4 D4 E4 D4")), interval_report(parse_melody("C4 C6 G3"))]
    a, b = render_twice(tmp_path, lambda p: plot_interval_histograms(reps, p, ["early", "late"]))
    assert a == b and hashlib.sha256(a).hexdigest()


def test_no_software_metadata(tmp_path):
    plot_melodies([("x", [60, 67])], str(tmp_path / "m.png"))
    assert b"Software" not in (tmp_path / "m.png").read_bytes()


def test_svg_output(tmp_path):
    plot_loss_curve([0, 1, 2], [3.0, 2.0, 1.5], str(tmp_path / "c.svg"))
    assert b"<svg" in (tmp_path / "c.svg").read_bytes()


@pytest.mark.parametrize("aspect", [None, 0.5])
def test_figsize(aspect):
    w, h = figsize(4.0, aspect)
    assert w == 4.0 and h == pytest.approx(4.0 * (aspect or 0.6180339887498949))


@pytest.mark.parametrize("ext", ["svg", "pdf"])
def test_vector_formats_reproducible(tmp_path, ext):
    paths = [tmp_path / f"{k}.{ext}" for k in "ab"]
    for p in paths:
        plot_loss_curve([0, 1, 2], [3.0, 2.0, 1.5], str(p))
    assert paths[0].read_bytes() == paths[1].read_bytes()
