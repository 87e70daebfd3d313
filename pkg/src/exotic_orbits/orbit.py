"""Quotient maps onto the orbit space of the automorphism-group actions.

Round sphere:  Q_s(a, c) = (|a|, Re a, <Im a, Im c>)
Equator sphere, chart One:  Q_k(u, q) = phi(u) (|u|, Re uq, phi(u) <Im uq, Im q>)
Equator sphere, chart Two:  Q_k(v, r) = phi(v) (|r|, Re r, phi(v) <Im r, Im conj(v) r>)

Both land in the region x in [0, 1], y in [-x, x], z^2 <= (x^2 - y^2)(1 - x^2).
The embeddings h1(u, q) = (uq, q) phi(u) and h2(v, r) = (r, conj(v) r) phi(v)
carry the equator sphere into the round one and intertwine the two maps.
"""

from dataclasses import dataclass
from enum import IntEnum

import numpy as np

from .algebra import AlgebraTag, _unwrap, conjugate, dot, im, mul
from .bundle import GLUING_CUTOFF, Chart, phi, transition
from .symmetry import (
    Frame,
    SignedSymmetry,
    SpherePoint,
    automorphism_from_frames,
    signed_action,
)
from .utils import DomainError, UsageError, as_rng

ALGEBRAIC_TOL = 1e-12
RATIONAL_TOL = 1e-10
TRANSITION_TOL = 1e-8

# directions shorter than this are treated as absent when building witnesses
DEGENERATE = 1e-12
# squared lengths below this in fiber_point are rounding noise of a zero
FIBER_ROUNDING = 1e-12


@dataclass(frozen=True, eq=False)
class OrbitPoint:
    """(x, y, z) in R^3; components may be arrays of equal shape."""

    x: np.ndarray
    y: np.ndarray
    z: np.ndarray

    @classmethod
    def from_array(cls, arr):
        arr = np.asarray(arr, dtype=float)
        return cls(arr[..., 0], arr[..., 1], arr[..., 2])

    def as_array(self):
        return np.stack(np.broadcast_arrays(self.x, self.y, self.z), axis=-1)

    def __iter__(self):
        return iter((self.x, self.y, self.z))

    def __getitem__(self, index):
        return OrbitPoint(self.x[index], self.y[index], self.z[index])

    def __repr__(self):
        if np.ndim(self.x) == 0:
            coords = ", ".join(f"{float(v):.17g}" for v in self)
            return f"OrbitPoint({coords})"
        return f"OrbitPoint(batch={np.shape(self.x)})"


def orbit_distance(p1, p2):
    return np.linalg.norm(p1.as_array() - p2.as_array(), axis=-1)


class OrbitType(IntEnum):
    FIXED = 0
    SINGULAR_BOUNDARY = 1
    PRINCIPAL = 2


def _inner_im(x, y):
    return dot(im(x), im(y))


def q_s(p):
    """(|a|, Re a, <Im a, Im c>)."""
    a, c = p.a, p.c
    return OrbitPoint(np.linalg.norm(a, axis=-1), a[..., 0].copy(), _inner_im(a, c))


def _check_params(params, p):
    if p.tag is not params.tag:
        raise UsageError(f"{params.tag.value} bundle given {p.tag.value} point")


def q_k(params, p):
    """Quotient map of the Davis action on S_k^{2b-2}, in whichever chart p is."""
    _check_params(params, p)
    ph = phi(p.first)
    if p.chart is Chart.ONE:
        u, q = p.first, p.second
        uq = mul(u, q)
        return OrbitPoint(
            ph * np.linalg.norm(u, axis=-1),
            ph * uq[..., 0],
            ph * ph * _inner_im(uq, q),
        )
    v, r = p.first, p.second
    vr = mul(conjugate(v), r)
    return OrbitPoint(
        ph * np.linalg.norm(r, axis=-1),
        ph * r[..., 0],
        ph * ph * _inner_im(r, vr),
    )


def _require(condition, message):
    if not np.all(condition):
        raise DomainError(message)


def h1(u, q, tol=RATIONAL_TOL):
    """(u, q) -> (uq, q) phi(u), defined for imaginary unit q."""
    u, _ = _unwrap(u)
    q, _ = _unwrap(q)
    _require(np.abs(np.linalg.norm(q, axis=-1) - 1.0) <= tol, "h1 needs |q| = 1")
    _require(np.abs(q[..., 0]) <= tol, "h1 needs Re(q) = 0")
    ph = phi(u)[..., None]
    c = q * ph
    c[..., 0] = 0.0
    return SpherePoint(mul(u, q) * ph, c)


def h2(v, r, tol=RATIONAL_TOL):
    """(v, r) -> (r, conj(v) r) phi(v), defined when Re(conj(v) r) = 0."""
    v, _ = _unwrap(v)
    r, _ = _unwrap(r)
    _require(np.abs(np.linalg.norm(r, axis=-1) - 1.0) <= tol, "h2 needs |r| = 1")
    c = mul(conjugate(v), r)
    _require(
        np.abs(c[..., 0]) <= tol * (1.0 + np.linalg.norm(v, axis=-1)),
        "h2 needs Re(conj(v) r) = 0",
    )
    ph = phi(v)[..., None]
    c = c * ph
    c[..., 0] = 0.0
    return SpherePoint(r * ph, c)


def h_chart(p, tol=RATIONAL_TOL):
    """h1 on chart One, h2 on chart Two."""
    if p.chart is Chart.ONE:
        return h1(p.first, p.second, tol)
    return h2(p.first, p.second, tol)


def key_lemma_residual(params, p):
    """|Q_k(p) - Q_s(h(p))| for the chart p is written in."""
    _check_params(params, p)
    return orbit_distance(q_k(params, p), q_s(h_chart(p)))


def phi_inversion_residual(u):
    """|phi(u / |u|^2) / |u| - phi(u)|."""
    u, _ = _unwrap(u)
    radius = np.linalg.norm(u, axis=-1)
    return np.abs(phi(u / (radius**2)[..., None]) / radius - phi(u))


def region_defect(pt):
    """(x^2 - y^2)(1 - x^2) - z^2; zero on the curved boundary."""
    x, y, z = pt
    return (x * x - y * y) * (1.0 - x * x) - z * z


def region_violation(pt):
    """How far pt is from satisfying the region constraints (0 inside)."""
    x, y, _ = pt
    parts = [-x, x - 1.0, np.abs(y) - x, -region_defect(pt)]
    return np.maximum(0.0, np.max(np.stack(np.broadcast_arrays(*parts)), axis=0))


def region_contains(pt, tol=RATIONAL_TOL):
    out = region_violation(pt) <= tol
    return bool(out) if np.ndim(out) == 0 else out


def _type_codes(fixed_length, cs_gap, tol):
    codes = np.full(np.shape(cs_gap), int(OrbitType.PRINCIPAL))
    codes[np.asarray(cs_gap) <= tol] = int(OrbitType.SINGULAR_BOUNDARY)
    codes[np.asarray(fixed_length) <= tol] = int(OrbitType.FIXED)
    return codes


def _sphere_codes(sa, sc, ac, tol):
    """Codes from |Im a|^2, |Im c|^2 and <Im a, Im c>, compared as lengths."""
    fixed_length = np.sqrt(sa + sc)
    cs_gap = np.sqrt(sa) * np.sqrt(sc) - np.abs(ac)
    return _type_codes(fixed_length, cs_gap, tol)


def orbit_types(p, tol=RATIONAL_TOL):
    """Orbit type codes of a batch of sphere points.

    Fixed points have |Im a| and |c| within tol of zero. Otherwise the orbit
    is singular exactly when |<Im a, Im c>| comes within tol of
    |Im a| |Im c| (Im a and Im c linearly dependent), and principal otherwise.
    """
    sa = np.sum(p.a[..., 1:] ** 2, axis=-1)
    sc = np.sum(p.c[..., 1:] ** 2, axis=-1)
    return _sphere_codes(sa, sc, _inner_im(p.a, p.c), tol)


def orbit_type(p, tol=RATIONAL_TOL):
    """OrbitType of a single sphere point."""
    codes = orbit_types(p, tol)
    if np.ndim(codes) != 0:
        raise UsageError("orbit_type takes one point; use orbit_types for batches")
    return OrbitType(int(codes))


def orbit_point_types(pt, tol=RATIONAL_TOL):
    """The same classification read off the orbit-space coordinates.

    |Im a| = sqrt(x^2 - y^2), |c| = sqrt(1 - x^2) and <Im a, Im c> = z.
    """
    x, y, z = pt
    fixed_length = np.sqrt(np.maximum(1.0 - y * y, 0.0))
    im_a = np.sqrt(np.maximum(x * x - y * y, 0.0))
    c = np.sqrt(np.maximum(1.0 - x * x, 0.0))
    return _type_codes(fixed_length, im_a * c - np.abs(z), tol)


def equator_orbit_types(params, p, tol=RATIONAL_TOL):
    """Orbit type codes of equator points, computed from chart data."""
    _check_params(params, p)
    ph2 = phi(p.first) ** 2
    if p.chart is Chart.ONE:
        im_a = mul(p.first, p.second)
        c = p.second
    else:
        im_a = p.second
        c = mul(conjugate(p.first), p.second)
    sa = np.sum(im_a[..., 1:] ** 2, axis=-1)
    sc = np.sum(c[..., 1:] ** 2, axis=-1)
    return _sphere_codes(ph2 * sa, ph2 * sc, ph2 * _inner_im(im_a, c), tol)


def z2_orbit_action(pt):
    """(x, y, z) -> (x, -y, z)."""
    return OrbitPoint(pt.x, -pt.y, pt.z)


def full_quotient_representative(pt, tol=RATIONAL_TOL):
    """(x, |y|, z): one representative per Z2 orbit."""
    if not np.all(region_contains(pt, tol)):
        raise DomainError("orbit point lies outside the orbit-space region")
    return OrbitPoint(pt.x, np.abs(pt.y), pt.z)


def fiber_point(pt, seed, tag):
    """A sphere point in Q_s^-1(pt), found by solving the defining equations.

    Im a gets length sqrt(x^2 - y^2) along a random direction e, and
    c = alpha e + beta f with f a random unit orthogonal to e, alpha fixed by
    <Im a, c> = z and beta by |a|^2 + |c|^2 = 1.
    """
    rng = as_rng(seed)
    x, y, z = (np.asarray(v, dtype=float) for v in pt)
    shape = np.shape(x)
    size = None if shape == () else shape[0]
    e = _random_imaginary(rng, tag, size)
    f = _random_imaginary(rng, tag, size)
    f = f - np.sum(f * e, axis=-1, keepdims=True) * e
    f = f / np.linalg.norm(f, axis=-1, keepdims=True)
    s_a2 = x * x - y * y
    s_a = np.asarray(np.sqrt(np.where(s_a2 > FIBER_ROUNDING, s_a2, 0.0)))
    s_c2 = np.maximum(1.0 - x * x, 0.0)
    alpha = np.where(s_a > DEGENERATE, z / np.where(s_a > DEGENERATE, s_a, 1.0), 0.0)
    beta2 = s_c2 - alpha * alpha
    beta = np.asarray(np.sqrt(np.where(beta2 > FIBER_ROUNDING, beta2, 0.0)))
    a = s_a[..., None] * e
    a[..., 0] = y
    c = alpha[..., None] * e + beta[..., None] * f
    return SpherePoint(a, c)


def _random_imaginary(rng, tag, size):
    shape = (tag.b,) if size is None else (size, tag.b)
    while True:
        v = rng.standard_normal(shape)
        v[..., 0] = 0.0
        n = np.linalg.norm(v, axis=-1, keepdims=True)
        if np.all(n > 1e-6):
            return v / n


def _lowest_completion(vectors, constraints, tag):
    """First imaginary basis direction orthogonal to the constraints."""
    for index in range(1, tag.b):
        v = np.zeros(tag.b)
        v[index] = 1.0
        for _ in range(2):
            for o in constraints:
                v = v - (v @ o) * o
        n = np.linalg.norm(v)
        # squared residuals sum to dim Im minus the constraint count, so one
        # basis direction always clears 1/2
        if n > 0.5:
            return v / n
    raise DomainError(f"could not complete frame {vectors}")


def _witness_frame(tag, im_a, c, use_a, use_c):
    vectors = []
    if use_a:
        vectors.append(im_a / np.linalg.norm(im_a))
    if use_c:
        resid = c.copy()
        for v in vectors:
            resid = resid - (resid @ v) * v
        vectors.append(resid / np.linalg.norm(resid))
    count = 2 if tag is AlgebraTag.QUATERNION else 3
    while len(vectors) < count:
        constraints = list(vectors)
        if len(vectors) == 2:
            constraints.append(mul(vectors[0], vectors[1]))
        vectors.append(_lowest_completion(vectors, constraints, tag))
    return Frame(tag, tuple(vectors))


def _c_residual_norm(im_a, c, use_a):
    if not use_a:
        return np.linalg.norm(c)
    e = im_a / np.linalg.norm(im_a)
    return np.linalg.norm(c - (c @ e) * e)


def orbit_witness(p1, p2, tol=RATIONAL_TOL):
    """An automorphism g with g(p1) = p2, for sphere points on the same fiber."""
    if p1.tag is not p2.tag:
        raise UsageError("orbit witness needs two points of the same algebra")
    if p1.a.ndim != 1:
        raise UsageError("orbit witness takes single points")
    gap = float(orbit_distance(q_s(p1), q_s(p2)))
    if gap > tol:
        raise DomainError(f"not in same orbit (|Q_s(p1) - Q_s(p2)| = {gap:.3g})")
    tag = p1.tag
    im_a1, im_a2 = p1.a.copy(), p2.a.copy()
    im_a1[0] = im_a2[0] = 0.0
    c1, c2 = p1.c.copy(), p2.c.copy()
    c1[0] = c2[0] = 0.0
    use_a = min(np.linalg.norm(im_a1), np.linalg.norm(im_a2)) > DEGENERATE
    use_c = (
        min(_c_residual_norm(im_a1, c1, use_a), _c_residual_norm(im_a2, c2, use_a))
        > DEGENERATE
    )
    src = _witness_frame(tag, im_a1, c1, use_a, use_c)
    dst = _witness_frame(tag, im_a2, c2, use_a, use_c)
    return automorphism_from_frames(src, dst)


def witness_residual(g, p1, p2):
    """|g(p1) - p2|."""
    return float(signed_action(SignedSymmetry(g, 1), p1).distance(p2))


def equator_orbit_witness(params, p1, p2, tol=TRANSITION_TOL):
    """An automorphism carrying equator point p1 to p2 when Q_k agrees.

    Both points are brought into one chart, pushed to the round sphere by h1
    or h2, and the witness found there pulls back because h1 and h2 are
    equivariant embeddings.
    """
    _check_params(params, p1)
    _check_params(params, p2)
    gap = float(orbit_distance(q_k(params, p1), q_k(params, p2)))
    if gap > tol:
        raise DomainError(f"not in same orbit (|Q_k(p1) - Q_k(p2)| = {gap:.3g})")
    if p2.chart is not p1.chart:
        if np.linalg.norm(p2.first) > GLUING_CUTOFF:
            p2 = transition(params, p2)
        else:
            p1 = transition(params, p1)
    s1, s2 = h_chart(p1), h_chart(p2)
    # round-sphere gap bounded by the chart-change tolerance
    return orbit_witness(s1, s2, tol=max(tol, RATIONAL_TOL) * 10.0)
