"""Quaternion and octonion arithmetic by Cayley-Dickson doubling.

Elements are coefficient vectors over the basis produced by doubling the
reals three times:

    H: 1, i, j, k
    O: 1, i, j, k, l, il, jl, kl

Every function accepts either an :class:`AlgebraElement` or a float array
whose last axis has length 4 or 8; leading axes are treated as a batch.
The result has the same kind as the first argument.
"""

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .utils import DomainError, UsageError


class AlgebraTag(Enum):
    """Which normed division algebra, and its real dimension b."""

    QUATERNION = "quaternion"
    OCTONION = "octonion"

    @property
    def b(self):
        return 4 if self is AlgebraTag.QUATERNION else 8

    @property
    def labels(self):
        return BASIS_LABELS[self]

    @classmethod
    def from_dim(cls, b):
        """Tag for an array whose last axis has length b."""
        if b == 4:
            return cls.QUATERNION
        if b == 8:
            return cls.OCTONION
        raise UsageError(f"no division algebra of dimension {b} (expected 4 or 8)")

    @classmethod
    def parse(cls, name):
        """Parse 'quaternion'/'octonion' (or 'H'/'O')."""
        key = str(name).strip().lower()
        aliases = {"h": "quaternion", "o": "octonion"}
        key = aliases.get(key, key)
        for tag in cls:
            if tag.value == key:
                return tag
        raise UsageError(f"unknown algebra {name!r}; use quaternion or octonion")


BASIS_LABELS = {
    AlgebraTag.QUATERNION: ("1", "i", "j", "k"),
    AlgebraTag.OCTONION: ("1", "i", "j", "k", "l", "il", "jl", "kl"),
}


@dataclass(frozen=True, eq=False)
class AlgebraElement:
    """An element of H or O (or a batch of them along leading axes)."""

    tag: AlgebraTag
    coeffs: np.ndarray

    def __post_init__(self):
        arr = np.array(self.coeffs, dtype=float)
        if arr.ndim == 0 or arr.shape[-1] != self.tag.b:
            raise UsageError(
                f"{self.tag.value} needs {self.tag.b} coefficients, "
                f"got shape {arr.shape}"
            )
        if not np.all(np.isfinite(arr)):
            raise DomainError("algebra element has non-finite coordinates")
        arr.setflags(write=False)
        object.__setattr__(self, "coeffs", arr)

    @classmethod
    def real(cls, tag, value):
        coeffs = np.zeros(tag.b)
        coeffs[0] = value
        return cls(tag, coeffs)

    @classmethod
    def unit(cls, tag, label):
        """Basis element by label, e.g. unit(OCTONION, 'il')."""
        try:
            index = tag.labels.index(label)
        except ValueError as e:
            raise UsageError(f"{label!r} is not a basis label of {tag.value}") from e
        coeffs = np.zeros(tag.b)
        coeffs[index] = 1.0
        return cls(tag, coeffs)

    def __repr__(self):
        if self.coeffs.ndim > 1:
            return f"AlgebraElement({self.tag.value}, batch={self.coeffs.shape[:-1]})"
        terms = [
            f"{c:+.6g}{'' if label == '1' else label}"
            for c, label in zip(self.coeffs, self.tag.labels)
            if c != 0.0
        ]
        return f"AlgebraElement({' '.join(terms) or '0'})"

    def _other(self, other):
        if isinstance(other, AlgebraElement):
            if other.tag is not self.tag:
                raise UsageError(
                    f"cannot combine {self.tag.value} with {other.tag.value}"
                )
            return other.coeffs
        return None

    def __add__(self, other):
        coeffs = self._other(other)
        if coeffs is None:
            return NotImplemented
        return AlgebraElement(self.tag, self.coeffs + coeffs)

    def __sub__(self, other):
        coeffs = self._other(other)
        if coeffs is None:
            return NotImplemented
        return AlgebraElement(self.tag, self.coeffs - coeffs)

    def __neg__(self):
        return AlgebraElement(self.tag, -self.coeffs)

    def __mul__(self, other):
        if isinstance(other, AlgebraElement):
            return mul(self, other)
        if np.isscalar(other):
            return AlgebraElement(self.tag, self.coeffs * other)
        return NotImplemented

    def __rmul__(self, other):
        if np.isscalar(other):
            return AlgebraElement(self.tag, self.coeffs * other)
        return NotImplemented

    def __truediv__(self, other):
        if np.isscalar(other):
            return AlgebraElement(self.tag, self.coeffs / other)
        return NotImplemented

    def __pow__(self, n):
        return power(self, n)

    def conjugate(self):
        return conjugate(self)

    def re(self):
        return re(self)

    def im(self):
        return im(self)

    def norm(self):
        return norm(self)

    def inverse(self):
        return inverse(self)

    def allclose(self, other, tol=1e-12):
        return bool(np.all(np.abs(self.coeffs - self._other(other)) <= tol))


def _unwrap(x):
    if isinstance(x, AlgebraElement):
        return x.coeffs, x.tag
    arr = np.asarray(x, dtype=float)
    if arr.ndim == 0:
        raise UsageError("algebra operations need coefficient vectors, not scalars")
    return arr, AlgebraTag.from_dim(arr.shape[-1])


def _rewrap(arr, like):
    if isinstance(like, AlgebraElement):
        return AlgebraElement(like.tag, arr)
    return arr


def _same(x, y):
    xa, xt = _unwrap(x)
    ya, yt = _unwrap(y)
    if xt is not yt:
        raise UsageError(f"cannot combine {xt.value} with {yt.value}")
    return xa, ya


def _conj(arr):
    out = -arr
    out[..., 0] = arr[..., 0]
    return out


def _cd_mul(x, y):
    """(a,b)(c,d) = (ac - conj(d) b, d a + b conj(c)) on the last axis."""
    n = x.shape[-1]
    if n == 1:
        return x * y
    half = n // 2
    a, b = x[..., :half], x[..., half:]
    c, d = y[..., :half], y[..., half:]
    first = _cd_mul(a, c) - _cd_mul(_conj(d), b)
    second = _cd_mul(d, a) + _cd_mul(b, _conj(c))
    return np.concatenate([first, second], axis=-1)


def mul(x, y):
    """Product xy."""
    xa, ya = _same(x, y)
    xa, ya = np.broadcast_arrays(xa, ya)
    return _rewrap(_cd_mul(xa, ya), x)


def conjugate(x):
    """Negate the imaginary part."""
    arr, _ = _unwrap(x)
    return _rewrap(_conj(arr), x)


def re(x):
    """Real part as a float (or float array for batches)."""
    arr, _ = _unwrap(x)
    out = arr[..., 0]
    return float(out) if out.ndim == 0 else out.copy()


def im(x):
    """Imaginary part, as an element with zero real coordinate."""
    arr, _ = _unwrap(x)
    out = arr.copy()
    out[..., 0] = 0.0
    return _rewrap(out, x)


def norm_squared(x):
    arr, _ = _unwrap(x)
    out = np.einsum("...i,...i->...", arr, arr)
    return float(out) if np.ndim(out) == 0 else out


def norm(x):
    out = np.sqrt(norm_squared(x))
    return float(out) if np.ndim(out) == 0 else out


def dot(x, y):
    """Real inner product <x, y> = Re(x conj(y))."""
    xa, ya = _same(x, y)
    out = np.einsum("...i,...i->...", xa, ya)
    return float(out) if np.ndim(out) == 0 else out


def inverse(x):
    """conj(x) / |x|^2; zero has no inverse."""
    arr, _ = _unwrap(x)
    n2 = np.einsum("...i,...i->...", arr, arr)
    if np.any(n2 <= 0.0):
        raise DomainError("zero has no inverse")
    return _rewrap(_conj(arr) / n2[..., None], x)


def one_like(x):
    arr, _ = _unwrap(x)
    out = np.zeros_like(arr)
    out[..., 0] = 1.0
    return _rewrap(out, x)


def power(x, n):
    """Integer power, left-associated: ((x x) x) ... x.

    Negative exponents invert the positive power. Octonions are
    power-associative, so the parenthesization does not matter; the
    algebra suite checks it anyway.
    """
    n = int(n)
    if n == 0:
        return one_like(x)
    if n < 0:
        return inverse(power(x, -n))
    arr, _ = _unwrap(x)
    out = arr
    for _ in range(n - 1):
        out = _cd_mul(out, arr)
    return _rewrap(out, x)


def associator(x, y, z):
    """(xy)z - x(yz)."""
    xa, ya = _same(x, y)
    _, za = _same(x, z)
    xa, ya, za = np.broadcast_arrays(xa, ya, za)
    out = _cd_mul(_cd_mul(xa, ya), za) - _cd_mul(xa, _cd_mul(ya, za))
    return _rewrap(out, x)


def gaussian(rng, tag, size=None):
    """Standard Gaussian coefficients, shape (size, b) or (b,)."""
    shape = (tag.b,) if size is None else (size, tag.b)
    return rng.standard_normal(shape)


def random_unit(rng, tag, size=None, imaginary=False):
    """Uniform unit vectors on S^{b-1}, or on the unit sphere of Im when asked."""
    while True:
        arr = gaussian(rng, tag, size)
        if imaginary:
            arr[..., 0] = 0.0
        n = np.linalg.norm(arr, axis=-1, keepdims=True)
        # probability-zero degenerate draw; try again
        if np.all(n > 1e-12):
            return arr / n
