import io

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from notelstm.errors import DomainError, ParseError
from notelstm.vocab import (Vocabulary, build_vocabulary, decode, dump_corpus, encode,
                            format_note, load_corpus, make_training_windows, parse_note)

import oracles

pitches = st.integers(0, 127)


class TestParseNote:
    @pytest.mark.parametrize("text,pitch", [
        ("C4", 60), ("D5", 74), ("C#5", 73), ("G9", 127), ("C-1", 0), ("Bb3", 58),
        ("F#4", 66), ("A4", 69), ("E4", 64), ("B3", 59),
    ])
    def test_known(self, text, pitch):
        assert parse_note(text) == pitch

    def test_minor_second_between_d5_and_c_sharp5(self):
        assert parse_note("D5") - parse_note("C#5") == 1

    @pytest.mark.parametrize("text", ["G#9", "Cb-1", "H4", "C", "c4", "C10", "C##4", "", "C4 "])
    def test_rejects(self, text):
        with pytest.raises(ParseError) as info:
            parse_note(text)
        assert repr(text) in str(info.value)

    def test_enharmonic(self):
        assert parse_note("Db4") == parse_note("C#4") == 61


class TestFormatNote:
    @pytest.mark.parametrize("pitch,text", [(60, "C4"), (66, "F#4"), (0, "C-1"), (127, "G9")])
    def test_known(self, pitch, text):
        assert format_note(pitch) == text

    @given(pitches)
    def test_round_trip(self, p):
        assert parse_note(format_note(p)) == p

    def test_out_of_range(self):
        with pytest.raises(DomainError):
            format_note(128)


class TestVocabulary:
    def test_small_corpus(self):
        v = build_vocabulary([[60, 62, 60]])
        assert v.tokens == (60, 62) and len(v) == 2

    def test_all_pitches(self):
        assert len(build_vocabulary([list(range(128))])) == 128
        assert build_vocabulary([[60]], full=True) == Vocabulary.full()

    def test_random_corpus_size(self):
        rng = np.random.default_rng(0)
        corpus = [list(rng.integers(40, 90, rng.integers(1, 30))) for _ in range(20)]
        expected = len({int(p) for m in corpus for p in m})
        assert len(build_vocabulary(corpus)) == expected

    def test_index_of(self):
        v = build_vocabulary([[67, 60, 64]])
        assert all(v.index_of[t] == i for i, t in enumerate(v.tokens))
        assert list(v.tokens) == sorted(v.tokens)

    def test_empty(self):
        with pytest.raises(DomainError):
            build_vocabulary([])

    def test_duplicates_rejected(self):
        with pytest.raises(DomainError):
            Vocabulary([60, 60])


class TestEncode:
    def test_simple(self):
        assert encode([60, 62], Vocabulary([60, 62])) == [0, 1]

    def test_empty(self):
        with pytest.raises(DomainError):
            encode([], Vocabulary([60]))

    def test_out_of_vocab_names_note(self):
        with pytest.raises(DomainError, match="F#4"):
            encode([60, 66], Vocabulary([60, 62]))

    @given(st.lists(pitches, min_size=1, max_size=40))
    def test_round_trip(self, melody):
        v = build_vocabulary([melody])
        assert decode(encode(melody, v), v) == melody


class TestWindows:
    def test_five_notes_window_four(self):
        v = Vocabulary(range(60, 65))
        w = make_training_windows([[60, 61, 62, 63, 64]], v, 4)
        assert len(w) == 1
        assert list(w[0][0]) == [0, 1, 2, 3] and list(w[0][1]) == [1, 2, 3, 4]

    def test_four_notes_too_short(self):
        v = Vocabulary(range(60, 64))
        with pytest.raises(DomainError):
            make_training_windows([[60, 61, 62, 63]], v, 4)

    def test_hundred_notes_window_eight(self):
        melody = [60 + (k % 12) for k in range(100)]
        w = make_training_windows([melody], build_vocabulary([melody]), 8)
        assert len(w) == oracles.window_count(100, 8) == 12

    def test_short_melodies_skipped(self):
        corpus = [[60, 62], [60, 62, 64, 62, 60]]
        w = make_training_windows(corpus, build_vocabulary(corpus), 2)
        assert len(w) == 2

    @given(st.lists(st.lists(st.integers(50, 70), min_size=1, max_size=50), min_size=1, max_size=5),
           st.integers(1, 10))
    def test_targets_are_shifted_inputs(self, corpus, window_len):
        v = build_vocabulary(corpus)
        total = sum(oracles.window_count(len(m), window_len) for m in corpus)
        if total == 0:
            with pytest.raises(DomainError):
                make_training_windows(corpus, v, window_len)
            return
        windows = make_training_windows(corpus, v, window_len)
        assert len(windows) == total
        for x, y in windows:
            assert len(x) == len(y) == window_len
            assert list(x[1:]) == list(y[:-1])


class TestLoadCorpus:
    def test_seed_line(self):
        assert load_corpus(io.BytesIO(b"C4 D4 E4 D4\n")) == [[60, 62, 64, 62]]

    def test_comments_and_blanks(self):
        assert load_corpus(b"# comment\n\n") == []

    def test_malformed_line_reported(self):
        data = b"C4 D4\nE4 F4\nG4 A4\nC4 X9 D4\n"
        with pytest.raises(ParseError) as info:
            load_corpus(io.BytesIO(data))
        assert info.value.line == 4 and info.value.column == 4
        assert "line 4" in str(info.value)

    def test_dump_round_trip(self):
        corpus = [[60, 61, 62], [0, 127]]
        assert load_corpus(dump_corpus(corpus).encode()) == corpus
