"""Synthetic melody corpora with known structure.

``scale``
    The C-major scale C4..C5 run up and down repeatedly, starting on C4.
``arpeggio``
    A C, F or G major triad (root, third, fifth, octave) run up and down;
    the triad is drawn per melody.
``two-phrase``
    Phrase A is a marker note followed by a bouncing C4..C5 scale walk that
    starts on a random degree. Phrase B is an upward walk whose register is
    set by the marker alone: markers C4-F4 put B in C3..C4, markers G4-C5 put
    it in C5..C6. Locally, every note after the second is predictable from the
    two before it; B's opening note needs the marker from the start of the line.
"""

import numpy as np

from .errors import DomainError

C_MAJOR_DEGREES = (0, 2, 4, 5, 7, 9, 11, 12)
KINDS = ("scale", "arpeggio", "two-phrase")
LOW_REGISTER = tuple(48 + d for d in C_MAJOR_DEGREES)    # C3..C4
MID_REGISTER = tuple(60 + d for d in C_MAJOR_DEGREES)    # C4..C5
HIGH_REGISTER = tuple(72 + d for d in C_MAJOR_DEGREES)   # C5..C6
_TRIAD_ROOTS = (60, 65, 67)


def bounce(notes, length, start=0, direction=1):
    """Walk back and forth over ``notes`` reversing at either end."""
    out = []
    k = start
    n = len(notes)
    for _ in range(length):
        out.append(notes[k])
        if n == 1:
            continue
        if not 0 <= k + direction < n:
            direction = -direction
        k += direction
    return out


def phrase_a_length(length):
    return length // 2


def phrase_b_register(marker):
    return LOW_REGISTER if marker <= 65 else HIGH_REGISTER


def two_phrase_melody(marker, walk_start, length):
    la = phrase_a_length(length)
    a = [marker] + bounce(MID_REGISTER, la - 1, start=walk_start)
    b = bounce(phrase_b_register(marker), length - la)
    return a + b


def generate_synthetic_corpus(kind, length, count, rng_seed=0):
    if length < 8:
        raise DomainError("synthetic melodies need at least 8 notes")
    if count < 1:
        raise DomainError("count must be positive")
    if kind not in KINDS:
        raise DomainError(f"unknown corpus kind {kind!r}; expected one of {', '.join(KINDS)}")
    rng = np.random.default_rng(rng_seed)
    corpus = []
    for _ in range(count):
        if kind == "scale":
            corpus.append(bounce(MID_REGISTER, length))
        elif kind == "arpeggio":
            root = _TRIAD_ROOTS[rng.integers(len(_TRIAD_ROOTS))]
            corpus.append(bounce([root, root + 4, root + 7, root + 12], length))
        else:
            marker = MID_REGISTER[rng.integers(len(MID_REGISTER))]
            start = int(rng.integers(len(MID_REGISTER)))
            corpus.append(two_phrase_melody(marker, start, length))
    return corpus


def two_phrase_rule_holds(melody):
    """True when every phrase-B note lies in the register the marker selects."""
    la = phrase_a_length(len(melody))
    register = set(phrase_b_register(melody[0]))
    return all(p in register for p in melody[la:])
