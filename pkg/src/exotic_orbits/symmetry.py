"""Automorphism groups SO(3) = Aut(H) and G2 = Aut(O), and their linear action.

An automorphism is stored as the b x b matrix acting on coefficient vectors.
Elements are produced from frames: for H an orthonormal pair of imaginary
units, for O a basic triple (e1, e2, e3) with e3 orthogonal to e1, e2 and
e1e2. The images of a frame determine the automorphism, because the
products of the frame span the algebra.
"""

from dataclasses import dataclass

import numpy as np

from .algebra import (
    AlgebraElement,
    AlgebraTag,
    _cd_mul,
    _unwrap,
    conjugate,
    gaussian,
    inverse,
    random_unit,
)
from .utils import DomainError, UsageError, as_rng

FRAME_TOLERANCE = 1e-8


@dataclass(frozen=True, eq=False)
class Automorphism:
    """Linear automorphism of H or O as a matrix on coefficient vectors."""

    tag: AlgebraTag
    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=float)
        if m.shape != (self.tag.b, self.tag.b):
            raise UsageError(
                f"{self.tag.value} automorphism needs a {self.tag.b}x{self.tag.b} "
                f"matrix, got {m.shape}"
            )
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @classmethod
    def identity(cls, tag):
        return cls(tag, np.eye(tag.b))

    def __call__(self, x):
        return apply(self, x)


@dataclass(frozen=True, eq=False)
class Frame:
    """Imaginary unit vectors whose images pin down an automorphism."""

    tag: AlgebraTag
    vectors: tuple

    def __post_init__(self):
        vecs = tuple(np.array(_unwrap(v)[0], dtype=float) for v in self.vectors)
        expected = 2 if self.tag is AlgebraTag.QUATERNION else 3
        if len(vecs) != expected:
            raise UsageError(
                f"a {self.tag.value} frame has {expected} vectors, got {len(vecs)}"
            )
        for v in vecs:
            if v.shape != (self.tag.b,):
                raise UsageError(f"frame vector has shape {v.shape}")
            v.setflags(write=False)
        object.__setattr__(self, "vectors", vecs)

    def defects(self):
        """Largest violation of each frame condition."""
        vecs = self.vectors
        out = {
            "unit": max(abs(np.linalg.norm(v) - 1.0) for v in vecs),
            "imaginary": max(abs(v[0]) for v in vecs),
            "orthogonal": max(
                abs(float(vecs[i] @ vecs[j]))
                for i in range(len(vecs))
                for j in range(i)
            ),
        }
        if self.tag is AlgebraTag.OCTONION:
            out["basic"] = abs(float(vecs[2] @ _cd_mul(vecs[0], vecs[1])))
        return out

    def validate(self, tol=FRAME_TOLERANCE):
        bad = {name: d for name, d in self.defects().items() if d > tol}
        if bad:
            detail = ", ".join(f"{name}={d:.3g}" for name, d in sorted(bad.items()))
            raise DomainError(f"invalid {self.tag.value} frame ({detail})")
        return self


def standard_frame(tag):
    """(i, j) for H, the basic triple (i, j, l) for O."""
    labels = ("i", "j") if tag is AlgebraTag.QUATERNION else ("i", "j", "l")
    return Frame(tag, tuple(AlgebraElement.unit(tag, lab).coeffs for lab in labels))


def _project_out(v, others):
    for o in others:
        v = v - (v @ o) * o
    return v


def _orthonormalize(frame):
    """Gram-Schmidt inside Im, keeping e3 orthogonal to e1e2 for octonions."""
    out = []
    for v in frame.vectors:
        v = v.copy()
        v[0] = 0.0
        constraints = list(out)
        if len(out) == 2:
            constraints.append(_unit(_cd_mul(out[0], out[1])))
        for _ in range(2):
            v = _project_out(v, constraints)
        out.append(_unit(v))
    return out


def _unit(v):
    n = np.linalg.norm(v)
    if n < 1e-12:
        raise DomainError("degenerate frame vector")
    return v / n


def _frame_basis(vectors):
    """Columns 1, e1, e2, e1e2 (, e3, e1e3, e2e3, (e1e2)e3)."""
    b = vectors[0].shape[0]
    one = np.zeros(b)
    one[0] = 1.0
    e1, e2 = vectors[0], vectors[1]
    e12 = _cd_mul(e1, e2)
    cols = [one, e1, e2, e12]
    if b == 8:
        e3 = vectors[2]
        cols += [e3, _cd_mul(e1, e3), _cd_mul(e2, e3), _cd_mul(e12, e3)]
    return np.stack(cols, axis=1)


def automorphism_from_frames(src, dst, tol=FRAME_TOLERANCE):
    """The automorphism sending the src frame to the dst frame."""
    if src.tag is not dst.tag:
        raise UsageError(f"cannot map a {src.tag.value} frame to {dst.tag.value}")
    src.validate(tol)
    dst.validate(tol)
    b_src = _frame_basis(_orthonormalize(src))
    b_dst = _frame_basis(_orthonormalize(dst))
    return Automorphism(src.tag, b_dst @ b_src.T)


def conjugation_automorphism(p, tag=AlgebraTag.QUATERNION):
    """x -> p x p^-1 for a unit quaternion p."""
    arr, p_tag = _unwrap(p)
    if tag is not AlgebraTag.QUATERNION or p_tag is not AlgebraTag.QUATERNION:
        raise UsageError("conjugation is an automorphism of H only, not of O")
    if abs(np.linalg.norm(arr) - 1.0) > 1e-10:
        raise DomainError(
            f"conjugator must be a unit quaternion, |p| = {np.linalg.norm(arr):.12g}"
        )
    p_inv = inverse(arr)
    cols = [_cd_mul(_cd_mul(arr, e), p_inv) for e in np.eye(4)]
    return Automorphism(AlgebraTag.QUATERNION, np.stack(cols, axis=1))


def random_frame(seed, tag):
    """Frame from Gaussian draws, orthonormalized inside Im."""
    rng = as_rng(seed)
    vectors = [random_unit(rng, tag, imaginary=True)]
    count = 2 if tag is AlgebraTag.QUATERNION else 3
    while len(vectors) < count:
        v = gaussian(rng, tag)
        v[0] = 0.0
        constraints = list(vectors)
        if len(vectors) == 2:
            constraints.append(_unit(_cd_mul(vectors[0], vectors[1])))
        v = _project_out(_project_out(v, constraints), constraints)
        n = np.linalg.norm(v)
        if n > 1e-6:
            vectors.append(v / n)
    return Frame(tag, tuple(vectors))


def random_automorphism(seed, tag):
    """Deterministic random element of SO(3) or G2 for a seed (or generator)."""
    rng = as_rng(seed)
    return automorphism_from_frames(standard_frame(tag), random_frame(rng, tag))


def _check_tag(g, tag):
    if g.tag is not tag:
        raise UsageError(f"{g.tag.value} automorphism applied to {tag.value} data")


def apply(g, x):
    """g(x); batches along leading axes."""
    arr, tag = _unwrap(x)
    _check_tag(g, tag)
    out = arr @ g.matrix.T
    if isinstance(x, AlgebraElement):
        return AlgebraElement(tag, out)
    return out


def compose(g, h):
    """g after h."""
    _check_tag(g, h.tag)
    return Automorphism(g.tag, g.matrix @ h.matrix)


def invert(g):
    return Automorphism(g.tag, g.matrix.T)


def automorphism_residuals(g, x, y):
    """Per-sample multiplicativity, norm and conjugation residuals."""
    gx, gy = apply(g, x), apply(g, y)
    mult = np.linalg.norm(apply(g, _cd_mul(x, y)) - _cd_mul(gx, gy), axis=-1)
    norms = np.abs(np.linalg.norm(gx, axis=-1) - np.linalg.norm(x, axis=-1))
    conj = np.linalg.norm(apply(g, conjugate(x)) - conjugate(gx), axis=-1)
    return mult, norms, conj


def verify_automorphism(g, samples, seed):
    """Worst multiplicativity or norm defect over sampled pairs."""
    if samples < 1:
        raise UsageError("need at least one sample")
    rng = as_rng(seed)
    x = gaussian(rng, g.tag, samples)
    y = gaussian(rng, g.tag, samples)
    mult, norms, _ = automorphism_residuals(g, x, y)
    return float(max(mult.max(), norms.max()))


@dataclass(frozen=True)
class SignedSymmetry:
    """Element (g, sign) of G x Z2."""

    g: Automorphism
    sign: int = 1

    def __post_init__(self):
        if self.sign not in (1, -1):
            raise UsageError(f"sign must be +1 or -1, got {self.sign}")

    def __mul__(self, other):
        return SignedSymmetry(compose(self.g, other.g), self.sign * other.sign)


@dataclass(frozen=True, eq=False)
class SpherePoint:
    """(a, c) on the unit sphere of Lambda + Im(Lambda); may be a batch."""

    a: np.ndarray
    c: np.ndarray

    def __post_init__(self):
        a, tag = _unwrap(self.a)
        c, c_tag = _unwrap(self.c)
        if tag is not c_tag:
            raise UsageError("sphere point mixes quaternion and octonion parts")
        object.__setattr__(self, "a", np.array(a, dtype=float))
        object.__setattr__(self, "c", np.array(c, dtype=float))

    @property
    def tag(self):
        return AlgebraTag.from_dim(self.a.shape[-1])

    def defects(self):
        n2 = np.sum(self.a**2, axis=-1) + np.sum(self.c**2, axis=-1)
        return {
            "unit": float(np.max(np.abs(n2 - 1.0))),
            "imaginary": float(np.max(np.abs(self.c[..., 0]))),
        }

    def validate(self, tol=1e-10):
        d = self.defects()
        if d["unit"] > tol or d["imaginary"] > 1e-12:
            raise DomainError(
                f"not on the unit sphere of Lambda + Im(Lambda): "
                f"norm defect {d['unit']:.3g}, Re(c) = {d['imaginary']:.3g}"
            )
        return self

    def as_vector(self):
        return np.concatenate([self.a, self.c], axis=-1)

    def distance(self, other):
        return np.linalg.norm(self.as_vector() - other.as_vector(), axis=-1)

    def __neg__(self):
        return SpherePoint(-self.a, -self.c)

    def __getitem__(self, index):
        return SpherePoint(self.a[index], self.c[index])


def random_sphere_point(rng, tag, size=None):
    """Uniform points of the round S^{2b-2}."""
    rng = as_rng(rng)
    shape = (2 * tag.b,) if size is None else (size, 2 * tag.b)
    while True:
        v = rng.standard_normal(shape)
        v[..., tag.b] = 0.0
        n = np.linalg.norm(v, axis=-1, keepdims=True)
        if np.all(n > 1e-12):
            v = v / n
            return SpherePoint(v[..., : tag.b], v[..., tag.b :])


def signed_action(s, p):
    """(g, sign) . (a, c) = sign (g(a), g(c))."""
    return SpherePoint(s.sign * apply(s.g, p.a), s.sign * apply(s.g, p.c))

