"""Interval statistics for generated melodies and loss-milestone arithmetic."""

import io
import json
import math
from collections import Counter
from dataclasses import dataclass

from .errors import DomainError
from .vocab import format_note

INTERVAL_NAMES = (
    "unison", "minor second", "major second", "minor third", "major third",
    "perfect fourth", "tritone", "perfect fifth", "minor sixth", "major sixth",
    "minor seventh", "major seventh", "octave",
)
OCTAVE = 12


@dataclass(frozen=True)
class Interval:
    semitones: int
    name: str
    direction: str  # "above", "below", or "" for unison

    @property
    def label(self):
        return f"{self.name} {self.direction}" if self.direction else self.name


def interval_name(semitones):
    size = abs(semitones)
    if size <= OCTAVE:
        return INTERVAL_NAMES[size]
    return f"compound ({size} semitones)"


def interval_semitones(name):
    """Inverse of :func:`interval_name` on magnitudes."""
    if name in INTERVAL_NAMES:
        return INTERVAL_NAMES.index(name)
    if name.startswith("compound (") and name.endswith(" semitones)"):
        return int(name[len("compound ("):-len(" semitones)")])
    raise DomainError(f"unknown interval name {name!r}")


def classify_interval(semitones):
    semitones = int(semitones)
    direction = "" if semitones == 0 else ("above" if semitones > 0 else "below")
    return Interval(semitones, interval_name(semitones), direction)


def _require_pair(melody):
    if len(melody) < 2:
        raise DomainError("need at least two notes to form an interval")


def intervals(melody):
    _require_pair(melody)
    return [b - a for a, b in zip(melody, melody[1:])]


def interval_entropy(steps):
    """Shannon entropy (nats) of the interval-name distribution."""
    counts = Counter(interval_name(s) for s in steps)
    n = len(steps)
    return -math.fsum(c / n * math.log(c / n) for c in counts.values())


def randomness_metrics(melody):
    """``(mean_abs_interval, frac_over_octave, interval_entropy)``."""
    steps = intervals(melody)
    n = len(steps)
    mean_abs = sum(abs(s) for s in steps) / n
    over = sum(1 for s in steps if abs(s) > OCTAVE) / n
    return mean_abs, over, interval_entropy(steps)


@dataclass(frozen=True)
class IntervalReport:
    intervals: tuple
    names: tuple
    histogram: tuple  # (name, count) pairs, ascending size
    max_abs_interval: int
    max_interval_name: str
    max_interval_position: int  # index k of the pair (note k, note k+1)
    max_interval_notes: tuple
    mean_abs_interval: float
    frac_over_octave: float
    interval_entropy: float

    def as_dict(self):
        return {
            "interval_count": len(self.intervals),
            "intervals": list(self.intervals),
            "names": list(self.names),
            "histogram": {name: count for name, count in self.histogram},
            "max_abs_interval": self.max_abs_interval,
            "max_interval_name": self.max_interval_name,
            "max_interval_position": self.max_interval_position,
            "max_interval_notes": list(self.max_interval_notes),
            "mean_abs_interval": self.mean_abs_interval,
            "frac_over_octave": self.frac_over_octave,
            "interval_entropy": self.interval_entropy,
        }

    def to_text(self):
        return json.dumps(self.as_dict(), indent=2) + "\n"


def interval_report(melody):
    steps = intervals(melody)
    labels = tuple(classify_interval(s).label for s in steps)
    counts = Counter(interval_name(s) for s in steps)
    histogram = tuple(sorted(counts.items(), key=lambda kv: interval_semitones(kv[0])))
    # first occurrence wins on ties
    pos = max(range(len(steps)), key=lambda k: (abs(steps[k]), -k))
    mean_abs, over, entropy = randomness_metrics(melody)
    return IntervalReport(
        intervals=tuple(steps),
        names=labels,
        histogram=histogram,
        max_abs_interval=abs(steps[pos]),
        max_interval_name=interval_name(steps[pos]),
        max_interval_position=pos,
        max_interval_notes=(format_note(melody[pos]), format_note(melody[pos + 1])),
        mean_abs_interval=mean_abs,
        frac_over_octave=over,
        interval_entropy=entropy,
    )


@dataclass(frozen=True)
class MilestoneReport:
    iterations: tuple
    losses: tuple
    total_improvement: float
    cumulative_fraction: tuple
    time_fraction: tuple

    def fraction_at(self, iteration):
        return self.cumulative_fraction[self.iterations.index(iteration)]

    def time_fraction_at(self, iteration):
        return self.time_fraction[self.iterations.index(iteration)]

    def remaining_time_fraction_at(self, iteration):
        return 1.0 - self.time_fraction_at(iteration)

    def rows(self):
        """(iteration, loss, cumulative_fraction, time_fraction) per milestone."""
        return list(zip(self.iterations, self.losses, self.cumulative_fraction, self.time_fraction))

    def as_dict(self):
        return {
            "total_improvement": self.total_improvement,
            "milestones": [
                {
                    "iteration": it,
                    "loss": loss,
                    "cumulative_fraction": frac,
                    "remaining_fraction": 1.0 - frac,
                    "time_fraction": tfrac,
                    "remaining_time_fraction": 1.0 - tfrac,
                }
                for it, loss, frac, tfrac in self.rows()
            ],
        }

    def to_text(self):
        return json.dumps(self.as_dict(), indent=2) + "\n"

    def to_csv(self):
        buf = io.StringIO()
        buf.write("iteration,loss,cumulative_fraction,time_fraction\n")
        for it, loss, frac, tfrac in self.rows():
            buf.write(f"{it},{loss:.17g},{frac:.17g},{tfrac:.17g}\n")
        return buf.getvalue()


def milestone_report(milestones):
    """Share of the total loss drop achieved by each milestone, and when.

    ``milestones`` is a sequence of ``(iteration, loss)`` pairs with strictly
    increasing iterations.
    """
    milestones = [(int(i), float(l)) for i, l in milestones]
    if len(milestones) < 2:
        raise DomainError("need at least two milestones")
    its = [i for i, _ in milestones]
    if any(b <= a for a, b in zip(its, its[1:])):
        raise DomainError("milestone iterations must be strictly increasing")
    first, last = milestones[0][1], milestones[-1][1]
    total = first - last
    if not total > 0:
        raise DomainError("loss must improve between the first and last milestone")
    span = its[-1] - its[0]
    fracs = [(first - l) / total for _, l in milestones]
    return MilestoneReport(
        iterations=tuple(its),
        losses=tuple(l for _, l in milestones),
        total_improvement=total,
        cumulative_fraction=tuple(fracs),
        time_fraction=tuple((i - its[0]) / span for i in its),
    )
