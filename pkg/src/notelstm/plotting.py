"""Matplotlib figures written next to the CSV / text reports.

Everything renders through the Agg backend straight to a file.
"""

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .vocab import format_note  # noqa: E402

STYLE = {
    "font.size": 9,
    "axes.labelsize": 9,
    "axes.titlesize": 10,
    "legend.fontsize": 8,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "savefig.dpi": 120,
}


# metadata keys that carry versions or timestamps, per output format
_VOLATILE = {
    "png": {"Software": None},
    "svg": {"Date": None, "Creator": None},
    "pdf": {"CreationDate": None, "Producer": None, "Creator": None},
}


def _save(fig, path):
    # drop volatile metadata so reruns are byte-identical
    ext = str(path).rsplit(".", 1)[-1].lower()
    with plt.rc_context({"svg.hashsalt": "notelstm"}):
        fig.savefig(path, metadata=_VOLATILE.get(ext))
    plt.close(fig)


def figsize(width=6.0, aspect=None):
    golden = (np.sqrt(5.0) - 1.0) / 2.0
    return width, width * (aspect or golden)


def plot_loss_curve(iterations, losses, path, milestones=None, log_x=False):
    """Loss per iteration, with milestone losses marked and labelled."""
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=figsize())
        ax.plot(iterations, losses, lw=0.8, color="0.3", label="training loss")
        if milestones is not None:
            rows = zip(milestones.iterations, milestones.losses, milestones.cumulative_fraction)
            for k, (it, loss, frac) in enumerate(rows):
                ax.plot([it], [loss], "o", color="C3", ms=4)
                # alternate label heights so close milestones stay readable
                ax.annotate(f"{it}: {loss:.3f} ({100 * frac:.1f}%)", (it, loss),
                            textcoords="offset points", xytext=(5, 4 + 10 * (k % 3)),
                            fontsize=7)
        if log_x:
            ax.set_xscale("symlog", linthresh=10)
        ax.set_xlabel("iteration")
        ax.set_ylabel("cross-entropy (nats)")
        ax.legend(frameon=False)
        fig.tight_layout()
        _save(fig, path)


def plot_melodies(samples, path, seed_notes=()):
    """Pitch contour of one melody per checkpoint, stacked vertically.

    ``samples`` is a list of ``(label, melody)``; the seed, if given, is drawn
    in grey ahead of each generated line.
    """
    n = max(len(samples), 1)
    with plt.rc_context(STYLE):
        fig, axes = plt.subplots(n, 1, figsize=(6.0, 1.4 * n + 0.4), sharex=True, squeeze=False)
        k = len(seed_notes)
        for ax, (label, melody) in zip(axes[:, 0], samples):
            if k:
                ax.plot(range(k), seed_notes, "o-", color="0.6", ms=3, lw=0.8)
            xs = np.arange(k, k + len(melody))
            joined = ([seed_notes[-1]] if k else []) + list(melody)
            ax.plot(np.arange(k - 1 if k else 0, k + len(melody)), joined, "-", color="C0", lw=0.8)
            ax.plot(xs, melody, "o", color="C0", ms=3)
            lo = min(list(melody) + list(seed_notes))
            hi = max(list(melody) + list(seed_notes))
            ticks = [p for p in range(lo - lo % 12, hi + 1, 12) if p >= lo - 12]
            ax.set_yticks(ticks, [format_note(p) for p in ticks])
            ax.set_ylabel(str(label), rotation=0, ha="right", va="center")
        axes[-1, 0].set_xlabel("note index")
        fig.tight_layout()
        _save(fig, path)


def plot_interval_histograms(reports, path, labels=None):
    """Interval-name counts, one bar group per report."""
    names = []
    for rep in reports:
        for name, _ in rep.histogram:
            if name not in names:
                names.append(name)
    labels = labels or [str(i) for i in range(len(reports))]
    width = 0.8 / max(len(reports), 1)
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=figsize())
        x = np.arange(len(names))
        for j, (rep, label) in enumerate(zip(reports, labels)):
            counts = dict(rep.histogram)
            ax.bar(x + j * width, [counts.get(nm, 0) for nm in names], width, label=label)
        ax.set_xticks(x + 0.4 - width / 2, names, rotation=45, ha="right")
        ax.set_ylabel("count")
        if len(reports) > 1:
            ax.legend(frameon=False)
        fig.tight_layout()
        _save(fig, path)
