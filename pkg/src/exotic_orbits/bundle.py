"""Milnor sphere bundles Sigma_k^{2b-1} in two charts.

Both charts are Lambda x S^{b-1}. A point of chart One is written (u, q),
a point of chart Two (v, r). Over the overlap the charts are glued by

    Phi_{h,j}(u, q) = (u / |u|^2, (u/|u|)^h q (u/|u|)^j)

with h + j = 1 and k = h - j = 2h - 1. The equator sphere S_k^{2b-2} is the
zero set of f: Re(q) = 0 in chart One, Re(conj(v) r) = 0 in chart Two.

Points carry optional leading batch axes, so every map here runs on whole
sample sets at once.
"""

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .algebra import (
    AlgebraTag,
    _unwrap,
    conjugate,
    gaussian,
    inverse,
    mul,
    power,
    random_unit,
    re,
)
from .symmetry import apply
from .utils import DomainError, UsageError, as_rng

DEFAULT_K = (-3, -1, 1, 3, 5, 7)
OVERLAP_RADII = (0.1, 10.0)
GLUING_CUTOFF = 1e-12


class Chart(Enum):
    ONE = 1
    TWO = 2

    @property
    def other(self):
        return Chart.TWO if self is Chart.ONE else Chart.ONE


@dataclass(frozen=True)
class BundleParams:
    """Exponents of the gluing map: h + j = 1, k = h - j = 2h - 1."""

    h: int
    tag: AlgebraTag = AlgebraTag.OCTONION

    def __post_init__(self):
        if int(self.h) != self.h:
            raise UsageError(f"h must be an integer, got {self.h!r}")
        object.__setattr__(self, "h", int(self.h))

    @property
    def j(self):
        return 1 - self.h

    @property
    def k(self):
        return self.h - self.j

    @property
    def b(self):
        return self.tag.b

    @classmethod
    def from_k(cls, k, tag=AlgebraTag.OCTONION):
        if int(k) != k or int(k) % 2 == 0:
            raise UsageError(f"k must be an odd integer, got {k!r}")
        return cls((int(k) + 1) // 2, tag)

    @classmethod
    def from_h(cls, h, tag=AlgebraTag.OCTONION):
        return cls(h, tag)


def is_sphere_gluing(h, j):
    """E_{h,j} is a homotopy sphere exactly when h + j = +-1."""
    return h + j in (1, -1)


@dataclass(frozen=True, eq=False)
class ChartPoint:
    """(first, second) in one chart; second lies on the unit sphere."""

    chart: Chart
    first: np.ndarray
    second: np.ndarray

    def __post_init__(self):
        first, tag = _unwrap(self.first)
        second, second_tag = _unwrap(self.second)
        if tag is not second_tag:
            raise UsageError("chart point mixes quaternion and octonion parts")
        object.__setattr__(self, "chart", Chart(self.chart))
        object.__setattr__(self, "first", np.array(first, dtype=float))
        object.__setattr__(self, "second", np.array(second, dtype=float))

    @property
    def tag(self):
        return AlgebraTag.from_dim(self.first.shape[-1])

    def _replace(self, chart, first, second):
        return type(self)(chart, first, second)

    def unit_defect(self):
        return np.abs(np.linalg.norm(self.second, axis=-1) - 1.0)

    def validate(self, tol=1e-10):
        worst = float(np.max(self.unit_defect()))
        if worst > tol:
            raise DomainError(
                f"second component is not a unit vector (defect {worst:.3g})"
            )
        return self

    def as_vector(self):
        return np.concatenate([self.first, self.second], axis=-1)

    def distance(self, other):
        return np.linalg.norm(self.as_vector() - other.as_vector(), axis=-1)

    def __getitem__(self, index):
        return self._replace(self.chart, self.first[index], self.second[index])

    def __len__(self):
        return 1 if self.first.ndim == 1 else self.first.shape[0]


def equator_defect(p):
    """|f| up to the positive factor: |Re q| in chart One, |Re(conj(v) r)| in Two."""
    if p.chart is Chart.ONE:
        return np.abs(p.second[..., 0])
    return np.abs(re(mul(conjugate(p.first), p.second)))


class EquatorPoint(ChartPoint):
    """A chart point on S_k^{2b-2}."""

    def validate(self, tol=1e-10):
        super().validate(tol)
        worst = float(np.max(equator_defect(self)))
        if worst > tol:
            raise DomainError(
                f"point is off the equator sphere (|f| defect {worst:.3g})"
            )
        return self


def glue(u, q, h, j):
    """Phi_{h,j}(u, q); products evaluated left to right."""
    u, _ = _unwrap(u)
    radius = np.linalg.norm(u, axis=-1, keepdims=True)
    if np.any(radius <= GLUING_CUTOFF):
        raise DomainError("not in gluing region: first component is zero")
    w = u / radius
    r = mul(mul(power(w, h), q), power(w, j))
    return u / radius**2, r


def transition(params, p):
    """Change chart; chart Two goes back through the inverse gluing."""
    if p.tag is not params.tag:
        raise UsageError(f"{params.tag.value} bundle given {p.tag.value} point")
    if p.chart is Chart.ONE:
        first, second = glue(p.first, p.second, params.h, params.j)
    else:
        first, second = glue(p.first, p.second, -params.h, -params.j)
    return p._replace(p.chart.other, first, second)


def phi(w):
    """1 / sqrt(1 + |w|^2)."""
    w, _ = _unwrap(w)
    return 1.0 / np.sqrt(1.0 + np.sum(w * w, axis=-1))


def _f_ambient(chart, first, second):
    if chart is Chart.ONE:
        return second[..., 0] * phi(first)
    return re(mul(first, inverse(second))) * phi(first)


def f_value(p):
    """Re(q) phi(u) in chart One, Re(v r^-1) phi(v) in chart Two."""
    return _f_ambient(p.chart, p.first, p.second)


def f_gradient_norm(p, step=1e-4):
    """Central-difference gradient of f, projected tangent to the sphere factor."""
    if step <= 0:
        raise UsageError("finite-difference step must be positive")
    x = p.as_vector()
    if x.ndim != 1:
        raise UsageError("gradient is evaluated one point at a time")
    b = p.tag.b
    grad = np.empty_like(x)
    for i in range(x.size):
        dx = np.zeros_like(x)
        dx[i] = step
        hi, lo = x + dx, x - dx
        grad[i] = (
            _f_ambient(p.chart, hi[:b], hi[b:]) - _f_ambient(p.chart, lo[:b], lo[b:])
        ) / (2.0 * step)
    s = p.second / np.linalg.norm(p.second)
    tangent = grad[b:] - (grad[b:] @ s) * s
    return float(np.sqrt(grad[:b] @ grad[:b] + tangent @ tangent))


def involution_T(p):  # pylint: disable=invalid-name
    """(u, q) -> (u, -q) in either chart."""
    return p._replace(p.chart, p.first, -p.second)


def davis_action(g, p):
    """Diagonal action g(u, q) = (g(u), g(q)) in either chart."""
    if g.tag is not p.tag:
        raise UsageError(f"{g.tag.value} automorphism applied to {p.tag.value} point")
    return p._replace(p.chart, apply(g, p.first), apply(g, p.second))


def base_projection(params, p):
    """Projection to the base S^b: the chart and the first component."""
    if p.tag is not params.tag:
        raise UsageError(f"{params.tag.value} bundle given {p.tag.value} point")
    return p.chart, p.first.copy()


def u2_condition_residual(v, r):
    """|Re(v r^-1) - Re(conj(v) r) / |r|^2|, the two forms of the U2 condition."""
    lhs = re(mul(v, inverse(r)))
    r_arr, _ = _unwrap(r)
    rhs = re(mul(conjugate(v), r)) / np.sum(r_arr * r_arr, axis=-1)
    return np.abs(lhs - rhs)


def _radii(rng, radius_range, size):
    lo, hi = radius_range
    if lo < 0 or hi < 0:
        raise UsageError(f"radius range must lie in [0, inf), got {radius_range}")
    if lo > hi:
        raise UsageError(f"empty radius range {radius_range}")
    return rng.uniform(lo, hi, size)


def random_chart_point(
    params, seed, chart=Chart.ONE, radius_range=OVERLAP_RADII, size=None
):
    """Point of Sigma_k^{2b-1}: |first| uniform in range, second on S^{b-1}."""
    rng = as_rng(seed)
    radius = np.asarray(_radii(rng, radius_range, size))[..., None]
    first = random_unit(rng, params.tag, size) * radius
    second = random_unit(rng, params.tag, size)
    return ChartPoint(Chart(chart), first, second)


def random_equator_point(
    params, seed, chart=Chart.ONE, radius_range=OVERLAP_RADII, size=None
):
    """Point of S_k^{2b-2} in the requested chart."""
    rng = as_rng(seed)
    chart = Chart(chart)
    radius = np.asarray(_radii(rng, radius_range, size))[..., None]
    if chart is Chart.ONE:
        u = random_unit(rng, params.tag, size) * radius
        q = random_unit(rng, params.tag, size, imaginary=True)
        return EquatorPoint(chart, u, q)
    r = random_unit(rng, params.tag, size)
    while True:
        v = gaussian(rng, params.tag, size)
        # Re(conj(v) r) is the real inner product <v, r>
        v = v - np.sum(v * r, axis=-1, keepdims=True) * r
        n = np.linalg.norm(v, axis=-1, keepdims=True)
        if np.all(n > 1e-12):
            return EquatorPoint(chart, v / n * radius, r)
