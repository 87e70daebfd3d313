"""Tests for the bP16 parity table."""

import pytest

from exotic_orbits.parity import (
    QUATERNIONIC_NOTE,
    ParityRow,
    classify_range,
    is_odd_bp16,
    parse_h_range,
)
from exotic_orbits.utils import UsageError


def test_first_rows():
    """h = 1..4 gives no, yes, yes, no."""
    rows = classify_range(1, 4)
    assert [r.odd_bp16 for r in rows] == [False, True, True, False]
    assert [r.k for r in rows] == [1, 3, 5, 7]


def test_half_of_a_period_is_odd():
    """Half of any eight consecutive h are odd."""
    assert sum(r.odd_bp16 for r in classify_range(1, 8)) == 4


def test_single_row():
    assert classify_range(5, 5) == [ParityRow(5, 9, False)]


@pytest.mark.parametrize("h", range(-20, 21))
def test_residue_rule(h):
    """Odd exactly when h(h - 1)/2 is odd, i.e. h = 2, 3 mod 4."""
    assert is_odd_bp16(h) is (h % 4 in (2, 3))
    assert is_odd_bp16(h) is ((h * (h - 1) // 2) % 2 == 1)


def test_inverted_range():
    with pytest.raises(UsageError, match="inverted"):
        classify_range(3, 1)


def test_row_dict():
    assert ParityRow(2, 3, True).to_dict() == {"h": 2, "k": 3, "odd_bP16": True}


@pytest.mark.parametrize(
    "text, expected",
    [("1..4", (1, 4)), ("-4..8", (-4, 8)), (" -3 .. -1 ", (-3, -1))],
)
def test_parse_h_range(text, expected):
    """Negative bounds and surrounding spaces are accepted."""
    assert parse_h_range(text) == expected


@pytest.mark.parametrize("text", ["1-4", "a..b", "1..", ""])
def test_parse_h_range_rejects(text):
    with pytest.raises(UsageError, match="LO..HI"):
        parse_h_range(text)


def test_quaternionic_note_has_counts():
    """The note names both group orders."""
    assert "16" in QUATERNIONIC_NOTE
    assert "8" in QUATERNIONIC_NOTE
