import math

import pytest
from hypothesis import given, settings, strategies as st

from irmtool.strings import levenshtein, jaro_winkler

from oracles import dp_levenshtein, ref_jaro_winkler

words = st.text(alphabet=st.characters(min_codepoint=97, max_codepoint=122),
                max_size=12)


# frozen expectations, computed by hand from the edit-distance table
CASES = [
    ("", "", 0),
    ("", "abc", 3),
    ("abc", "", 3),
    ("kitten", "sitting", 3),
    ("car", "e-car", 2),
    ("parking place", "parking station", 6),
    ("energy level", "battery", 11),
]


@pytest.mark.parametrize("a,b,expected", CASES)
def test_levenshtein_frozen(a, b, expected):
    assert levenshtein(a, b) == expected
    # independent DP table gives the same answer
    assert dp_levenshtein(a, b) == expected


@settings(max_examples=1000, deadline=None)
@given(words, words)
def test_levenshtein_matches_dp_oracle(a, b):
    assert levenshtein(a, b) == dp_levenshtein(a, b)


@settings(max_examples=300, deadline=None)
@given(words, words)
def test_levenshtein_symmetry(a, b):
    assert levenshtein(a, b) == levenshtein(b, a)


@settings(max_examples=300, deadline=None)
@given(words, words, words)
def test_levenshtein_triangle(a, b, c):
    assert levenshtein(a, c) <= levenshtein(a, b) + levenshtein(b, c)


@settings(max_examples=300, deadline=None)
@given(words)
def test_levenshtein_identity(a):
    assert levenshtein(a, a) == 0


@settings(max_examples=300, deadline=None)
@given(words, words)
def test_levenshtein_positive_when_distinct(a, b):
    if a != b:
        assert levenshtein(a, b) >= 1


# classic worked examples for the prefix-boosted metric
JW_CASES = [
    ("MARTHA", "MARHTA", 0.961111),
    ("DWAYNE", "DUANE", 0.840000),
    ("DIXON", "DICKSONX", 0.813333),
    ("parking place", "parking station", 0.858462),
    ("plan", "parking", 0.753571),
    ("battery", "battery level", 0.907692),
]


@pytest.mark.parametrize("a,b,expected", JW_CASES)
def test_jaro_winkler_frozen(a, b, expected):
    assert jaro_winkler(a, b) == pytest.approx(expected, abs=1e-6)
    assert ref_jaro_winkler(a, b) == pytest.approx(expected, abs=1e-6)


def test_jaro_winkler_edges():
    assert jaro_winkler("", "") == 1.0
    assert jaro_winkler("a", "") == 0.0
    assert jaro_winkler("", "a") == 0.0
    assert jaro_winkler("same", "same") == 1.0
    assert jaro_winkler("abc", "xyz") == 0.0


@settings(max_examples=1000, deadline=None)
@given(words, words)
def test_jaro_winkler_matches_reference(a, b):
    assert jaro_winkler(a, b) == pytest.approx(ref_jaro_winkler(a, b), abs=1e-12)


@settings(max_examples=300, deadline=None)
@given(words, words)
def test_jaro_winkler_bounds_and_symmetry(a, b):
    s = jaro_winkler(a, b)
    assert 0.0 <= s <= 1.0
    assert not math.isnan(s)
    assert jaro_winkler(b, a) == pytest.approx(s, abs=1e-12)


@settings(max_examples=300, deadline=None)
@given(words)
def test_jaro_winkler_self_is_one(a):
    assert jaro_winkler(a, a) == 1.0


def test_prefix_scale_parameters():
    # scale 0 disables the boost entirely
    plain = jaro_winkler("MARTHA", "MARHTA", prefix_scale=0.0)
    assert plain == pytest.approx(0.944444, abs=1e-6)
    # longer allowed prefix raises the score for long shared heads
    low = jaro_winkler("prefixes", "prefixed", max_prefix=2)
    high = jaro_winkler("prefixes", "prefixed", max_prefix=4)
    assert high > low
