"""Which Milnor spheres Sigma_k^15 are odd elements of bP16."""

import re
from dataclasses import dataclass

from .utils import UsageError

# For b = 4 only counts are recorded (16 oriented classes among the
# Sigma_k^7, 8 of them odd in Theta_7), so no predicate is offered there.
QUATERNIONIC_NOTE = (
    "b=4: the Sigma_k^7 give 16 oriented diffeomorphism classes, "
    "8 of them odd in Theta_7 (counts only; no predicate)"
)


def is_odd_bp16(h):
    """True when h is 2 or 3 mod 4, i.e. when h(h-1)/2 is odd."""
    h = int(h)
    by_residue = h % 4 in (2, 3)
    by_triangle = (h * (h - 1) // 2) % 2 == 1
    if by_residue != by_triangle:
        raise RuntimeError(f"parity criteria disagree at h={h}")
    return by_residue


@dataclass(frozen=True)
class ParityRow:
    h: int
    k: int
    odd_bp16: bool

    def to_dict(self):
        return {"h": self.h, "k": self.k, "odd_bP16": self.odd_bp16}


def classify_range(h_lo, h_hi):
    """One row (h, k = 2h - 1, odd) per h in [h_lo, h_hi]."""
    if h_lo > h_hi:
        raise UsageError(f"inverted h range {h_lo}..{h_hi}")
    return [ParityRow(h, 2 * h - 1, is_odd_bp16(h)) for h in range(h_lo, h_hi + 1)]


def parse_h_range(text):
    """Parse 'LO..HI' (either end may be negative)."""
    match = re.fullmatch(r"\s*(-?\d+)\s*\.\.\s*(-?\d+)\s*", str(text))
    if not match:
        raise UsageError(f"h range must look like LO..HI, got {text!r}")
    return int(match.group(1)), int(match.group(2))
