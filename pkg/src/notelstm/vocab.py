"""Note tokens, vocabularies, corpus files and training windows.

Notes are plain integer pitch numbers in [0, 127] with middle C (C4) at 60.
A melody is a list of such integers.
"""

import io
import re

import numpy as np

from .errors import DomainError, ParseError

MIN_PITCH = 0
MAX_PITCH = 127
DEFAULT_WINDOW = 32

_LETTER_OFFSETS = {"C": 0, "D": 2, "E": 4, "F": 5, "G": 7, "A": 9, "B": 11}
_SHARP_NAMES = ("C", "C#", "D", "D#", "E", "F", "F#", "G", "G#", "A", "A#", "B")
_NOTE_RE = re.compile(r"([A-G])([#b]?)(-?[0-9])")


def parse_note(text):
    """Parse scientific pitch notation such as ``"C#5"`` or ``"Bb3"``."""
    m = _NOTE_RE.fullmatch(text)
    if m is None:
        raise ParseError(f"malformed note {text!r}", token=text)
    letter, accidental, octave = m.groups()
    pitch = 12 * (int(octave) + 1) + _LETTER_OFFSETS[letter]
    pitch += {"#": 1, "b": -1, "": 0}[accidental]
    if not MIN_PITCH <= pitch <= MAX_PITCH:
        raise ParseError(f"note {text!r} outside pitch range 0-127", token=text)
    return pitch


def format_note(pitch):
    check_pitch(pitch)
    return f"{_SHARP_NAMES[pitch % 12]}{pitch // 12 - 1}"


def check_pitch(pitch):
    if not MIN_PITCH <= pitch <= MAX_PITCH:
        raise DomainError(f"pitch {pitch} outside [0, 127]")
    return pitch


def parse_melody(text):
    return [parse_note(tok) for tok in text.split()]


def format_melody(melody):
    return " ".join(format_note(p) for p in melody)


class Vocabulary:
    """Ordered set of distinct pitches with a dense index."""

    def __init__(self, tokens):
        tokens = tuple(int(t) for t in tokens)
        if len(set(tokens)) != len(tokens):
            raise DomainError("vocabulary contains duplicate tokens")
        for t in tokens:
            check_pitch(t)
        self.tokens = tokens
        self.index_of = {t: i for i, t in enumerate(tokens)}

    @classmethod
    def full(cls):
        return cls(range(MIN_PITCH, MAX_PITCH + 1))

    def __len__(self):
        return len(self.tokens)

    def __contains__(self, pitch):
        return pitch in self.index_of

    def __eq__(self, other):
        return isinstance(other, Vocabulary) and self.tokens == other.tokens

    def __repr__(self):
        return f"Vocabulary({format_melody(self.tokens)})"


def build_vocabulary(corpus, full=False):
    """Distinct pitches of ``corpus`` in ascending order, or all 128 if ``full``."""
    if not corpus:
        raise DomainError("empty corpus")
    if full:
        return Vocabulary.full()
    return Vocabulary(sorted({p for melody in corpus for p in melody}))


def encode(melody, vocab):
    if len(melody) == 0:
        raise DomainError("empty melody")
    out = []
    for p in melody:
        if p not in vocab.index_of:
            name = format_note(p) if MIN_PITCH <= p <= MAX_PITCH else str(p)
            raise DomainError(f"note {name} is not in the vocabulary")
        out.append(vocab.index_of[p])
    return out


def decode(indices, vocab):
    return [vocab.tokens[i] for i in indices]


def make_training_windows(corpus, vocab, window_len=DEFAULT_WINDOW):
    """Non-overlapping (input, target) index windows, targets shifted by one.

    A melody of n notes contributes floor((n - 1) / window_len) windows.
    """
    if window_len < 1:
        raise DomainError("window_len must be positive")
    windows = []
    for melody in corpus:
        if len(melody) < window_len + 1:
            continue
        idx = np.asarray(encode(melody, vocab), dtype=np.intp)
        for start in range(0, len(idx) - window_len, window_len):
            windows.append((idx[start:start + window_len].copy(),
                            idx[start + 1:start + window_len + 1].copy()))
    if not windows:
        raise DomainError(f"no melody has the {window_len + 1} notes a window needs")
    return windows


def load_corpus(source):
    """Read one melody per line from a UTF-8 byte stream (or bytes / str).

    Blank lines and lines starting with ``#`` are skipped.
    """
    if isinstance(source, bytes):
        source = io.BytesIO(source)
    if isinstance(source, str):
        text = source
    else:
        data = source.read()
        text = data.decode("utf-8") if isinstance(data, bytes) else data
    corpus = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        melody = []
        for m in re.finditer(r"\S+", line):
            try:
                melody.append(parse_note(m.group()))
            except ParseError as exc:
                raise ParseError(f"malformed token {m.group()!r}", token=m.group(),
                                 line=lineno, column=m.start() + 1) from exc
        corpus.append(melody)
    return corpus


def read_corpus(path):
    with open(path, "rb") as fh:
        return load_corpus(fh)


def dump_corpus(corpus):
    return "".join(format_melody(m) + "\n" for m in corpus)
