"""Tests for quaternion and octonion arithmetic."""

import numpy as np
import pytest

from exotic_orbits.algebra import (
    AlgebraElement,
    AlgebraTag,
    associator,
    conjugate,
    dot,
    im,
    inverse,
    mul,
    norm,
    norm_squared,
    power,
    random_unit,
    re,
)
from exotic_orbits.utils import DomainError, UsageError

H = AlgebraTag.QUATERNION
O = AlgebraTag.OCTONION

LABELS = ("1", "i", "j", "k", "l", "il", "jl", "kl")

# Octonion multiplication table written out by hand, row times column.
OCTONION_TABLE = {
    "1": ("1", "i", "j", "k", "l", "il", "jl", "kl"),
    "i": ("i", "-1", "k", "-j", "il", "-l", "-kl", "jl"),
    "j": ("j", "-k", "-1", "i", "jl", "kl", "-l", "-il"),
    "k": ("k", "j", "-i", "-1", "kl", "-jl", "il", "-l"),
    "l": ("l", "-il", "-jl", "-kl", "-1", "i", "j", "k"),
    "il": ("il", "l", "-kl", "jl", "-i", "-1", "-k", "j"),
    "jl": ("jl", "kl", "l", "-il", "-j", "k", "-1", "-i"),
    "kl": ("kl", "-jl", "il", "l", "-k", "-j", "i", "-1"),
}


def table_entry(row, col):
    """(sign, index) of the product of basis elements row * col."""
    entry = OCTONION_TABLE[row][LABELS.index(col)]
    sign = -1.0 if entry.startswith("-") else 1.0
    return sign, LABELS.index(entry.lstrip("-"))


def table_product(x, y):
    """Bilinear extension of the hand-written table."""
    out = np.zeros(8)
    for m, row in enumerate(LABELS):
        for n, col in enumerate(LABELS):
            sign, index = table_entry(row, col)
            out[index] += sign * x[m] * y[n]
    return out


def hamilton(x, y):
    """Quaternion product from the explicit component formula."""
    a1, b1, c1, d1 = x
    a2, b2, c2, d2 = y
    return np.array(
        [
            a1 * a2 - b1 * b2 - c1 * c2 - d1 * d2,
            a1 * b2 + b1 * a2 + c1 * d2 - d1 * c2,
            a1 * c2 - b1 * d2 + c1 * a2 + d1 * b2,
            a1 * d2 + b1 * c2 - c1 * b2 + d1 * a2,
        ]
    )


def unit(tag, label):
    return AlgebraElement.unit(tag, label)


@pytest.mark.parametrize("row", LABELS)
@pytest.mark.parametrize("col", LABELS)
def test_octonion_basis_products(row, col):
    """Every basis product agrees with the hand-written table."""
    sign, index = table_entry(row, col)
    expected = np.zeros(8)
    expected[index] = sign
    got = mul(unit(O, row).coeffs, unit(O, col).coeffs)
    assert np.array_equal(got, expected), f"{row} * {col}"


def test_octonion_random_products_match_table(rng):
    """Doubling agrees with the multiplication table on random octonions."""
    for _ in range(20):
        x, y = rng.standard_normal(8), rng.standard_normal(8)
        assert np.allclose(mul(x, y), table_product(x, y), atol=1e-12)


def test_quaternion_products_match_hamilton(rng):
    """Quaternion doubling is Hamilton's product."""
    x = rng.standard_normal((50, 4))
    y = rng.standard_normal((50, 4))
    expected = np.array([hamilton(a, b) for a, b in zip(x, y)])
    assert np.allclose(mul(x, y), expected, atol=1e-12)


def test_worked_products():
    """ij = k, il = il, and (1 + i)(1 - i) = 2."""
    assert (unit(H, "i") * unit(H, "j")).allclose(unit(H, "k"))
    assert (unit(O, "i") * unit(O, "l")).allclose(unit(O, "il"))
    one_plus_i = AlgebraElement(H, [1.0, 1.0, 0.0, 0.0])
    one_minus_i = AlgebraElement(H, [1.0, -1.0, 0.0, 0.0])
    assert (one_plus_i * one_minus_i).allclose(AlgebraElement.real(H, 2.0))


def test_conjugate_re_im():
    """Conjugation negates Im; re() returns a plain float."""
    x = AlgebraElement(H, [2.0, 3.0, 0.0, 0.0])
    assert conjugate(x).allclose(AlgebraElement(H, [2.0, -3.0, 0.0, 0.0]))
    i = unit(O, "i")
    assert re(i) == 0.0
    assert im(i).allclose(i)
    one = AlgebraElement.real(O, 1.0)
    assert conjugate(one).allclose(one)
    assert isinstance(re(x), float)


def test_inverse_values():
    assert inverse(unit(H, "i")).allclose(-unit(H, "i"))
    assert inverse(AlgebraElement.real(O, 2.0)).allclose(AlgebraElement.real(O, 0.5))
    with pytest.raises(DomainError, match="zero has no inverse"):
        inverse(np.zeros(8))


def test_power_values(rng):
    """Negative and zero powers, including x^-3 x^3 = 1 in O."""
    i = unit(H, "i")
    assert power(i, 2).allclose(AlgebraElement.real(H, -1.0))
    assert power(i, -1).allclose(-i)
    x = AlgebraElement(O, rng.standard_normal(8))
    assert (x**0).allclose(AlgebraElement.real(O, 1.0))
    assert (x**-3 * x**3).allclose(AlgebraElement.real(O, 1.0), tol=1e-10)


def test_associator_values(rng):
    """H is associative and O only alternative."""
    # (ij)l = kl but i(jl) = -kl
    got = associator(unit(O, "i"), unit(O, "j"), unit(O, "l"))
    assert got.allclose(2.0 * unit(O, "kl"))
    x, y, z = (rng.standard_normal((100, 4)) for _ in range(3))
    assert np.max(norm(associator(x, y, z))) < 1e-12
    x, y = rng.standard_normal((100, 8)), rng.standard_normal((100, 8))
    assert np.max(norm(associator(x, x, y))) < 1e-12
    assert np.max(norm(associator(y, x, x))) < 1e-12


def test_norm_multiplicative(rng):
    """|xy| = |x||y| in both algebras."""
    for tag in AlgebraTag:
        x = rng.standard_normal((1000, tag.b))
        y = rng.standard_normal((1000, tag.b))
        lhs = norm(mul(x, y))
        rhs = norm(x) * norm(y)
        assert np.all(np.abs(lhs - rhs) < 1e-12 * (1 + rhs))


def test_dot_and_norm_squared():
    """The inner product is Re(x conj(y))."""
    x = np.array([1.0, 2.0, 0.0, 0.0, 0.0, 0.0, 0.0, 2.0])
    assert norm_squared(x) == 9.0
    assert norm(x) == 3.0
    assert dot(x, x) == 9.0
    # <x, y> = Re(x conj(y))
    y = np.arange(8.0)
    assert dot(x, y) == pytest.approx(re(mul(x, conjugate(y))))


def test_random_unit_shapes(rng):
    """Single draws are vectors; imaginary draws have Re = 0."""
    u = random_unit(rng, O, 10)
    assert u.shape == (10, 8)
    assert np.allclose(norm(u), 1.0)
    v = random_unit(rng, H, imaginary=True)
    assert v.shape == (4,)
    assert v[0] == 0.0


def test_tag_mismatch():
    """Quaternions and octonions never mix."""
    with pytest.raises(UsageError, match="cannot combine"):
        mul(np.zeros(4), np.zeros(8))
    with pytest.raises(UsageError, match="cannot combine"):
        _ = unit(H, "i") + unit(O, "i")


def test_bad_shapes_and_values():
    with pytest.raises(UsageError, match="no division algebra"):
        mul(np.zeros(3), np.zeros(3))
    with pytest.raises(UsageError):
        AlgebraElement(O, np.zeros(4))
    with pytest.raises(DomainError, match="non-finite"):
        AlgebraElement(H, [np.nan, 0.0, 0.0, 0.0])
    with pytest.raises(UsageError, match="not a basis label"):
        unit(H, "l")


@pytest.mark.parametrize(
    "name, tag",
    [("quaternion", H), ("H", H), ("Octonion", O), ("o", O)],
)
def test_parse_tag(name, tag):
    """Names and one-letter aliases both parse."""
    assert AlgebraTag.parse(name) is tag


def test_parse_tag_unknown():
    with pytest.raises(UsageError, match="unknown algebra"):
        AlgebraTag.parse("sedenion")


def test_elements_are_read_only():
    x = unit(O, "i")
    with pytest.raises(ValueError):
        x.coeffs[0] = 1.0
