"""Seeded verification suites.

Every suite draws its samples from counter-based generators keyed by
(seed, shard), records one residual per sample and keeps the worst value of
each named check. Identities keep the maximum residual; negative controls
and lower bounds keep the minimum. Merging shards uses the same reduction,
so a report depends on the seed and shard count but not on how many
worker processes ran the shards.
"""

import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from .algebra import (
    AlgebraElement,
    AlgebraTag,
    associator,
    conjugate,
    inverse,
    mul,
    norm,
    one_like,
    power,
    random_unit,
)
from .bundle import (
    DEFAULT_K,
    OVERLAP_RADII,
    BundleParams,
    Chart,
    ChartPoint,
    EquatorPoint,
    base_projection,
    davis_action,
    equator_defect,
    f_gradient_norm,
    f_value,
    glue,
    involution_T,
    random_chart_point,
    random_equator_point,
    transition,
    u2_condition_residual,
)
from .orbit import (
    ALGEBRAIC_TOL,
    RATIONAL_TOL,
    TRANSITION_TOL,
    OrbitPoint,
    OrbitType,
    equator_orbit_types,
    equator_orbit_witness,
    fiber_point,
    full_quotient_representative,
    h_chart,
    key_lemma_residual,
    orbit_distance,
    orbit_point_types,
    orbit_type,
    orbit_types,
    orbit_witness,
    phi_inversion_residual,
    q_k,
    q_s,
    region_violation,
    witness_residual,
    z2_orbit_action,
)
from .sampling import (
    COVERAGE_RESOLUTION,
    CloudSource,
    coverage_gap,
    sample_orbit_space,
)
from .symmetry import (
    Automorphism,
    Frame,
    SignedSymmetry,
    SpherePoint,
    apply,
    automorphism_from_frames,
    automorphism_residuals,
    compose,
    conjugation_automorphism,
    invert,
    random_automorphism,
    random_frame,
    random_sphere_point,
    signed_action,
    standard_frame,
    verify_automorphism,
)
from .utils import (
    DEFAULT_SEED,
    DomainError,
    UsageError,
    log,
    make_rng,
    shard_generators,
    split_count,
)

SUITES = (
    "algebra",
    "automorphism",
    "bundle-welldef",
    "quotient-welldef",
    "key-lemma",
    "orbit-witness",
    "stratification",
    "z2-coincide",
    "negative-controls",
)

DEFAULT_SAMPLES = {
    "algebra": 100_000,
    "automorphism": 10_000,
    "bundle-welldef": 10_000,
    "quotient-welldef": 10_000,
    "key-lemma": 10_000,
    "orbit-witness": 1_000,
    "stratification": 10_000,
    "z2-coincide": 10_000,
    "negative-controls": 2_000,
}

EQUIVARIANCE_TOL = 1e-9
FIXED_POINT_TOL = 1e-15
# negative controls must exceed this residual to count as detected
CONTROL_MARGIN = 0.1
FREENESS_MARGIN = 1e-6
GRADIENT_FLAT = 1e-5
COVERAGE_MIN_COUNT = 20
DEFAULT_CLOUD_SIZE = 100_000

ARTIN_RANGE = 5
AUTOMORPHISM_BLOCK = 100
# one equator witness per this many sphere witnesses, for each k
EQUATOR_WITNESS_SHARE = 10
PLANT_PERIOD = 10
FIXED_PERIOD = 50
# key of the coverage clouds, apart from the per-shard streams
CLOUD_STREAM = 1_000_003


@dataclass(frozen=True)
class Tolerances:
    """Tolerance classes: pure algebra, rational maps, chart changes, equivariance."""

    algebra: float = ALGEBRAIC_TOL
    rational: float = RATIONAL_TOL
    transition: float = TRANSITION_TOL
    equivariance: float = EQUIVARIANCE_TOL

    def __post_init__(self):
        for name, value in self.to_dict().items():
            if not value > 0:
                raise UsageError(f"tolerance {name} must be positive, got {value!r}")

    @classmethod
    def uniform(cls, tol):
        """One value for every class (the CLI's --tol)."""
        return cls(tol, tol, tol, tol)

    def to_dict(self):
        return asdict(self)


@dataclass(frozen=True)
class SuiteConfig:
    suite: str
    tag: AlgebraTag = AlgebraTag.OCTONION
    k_values: tuple = DEFAULT_K
    samples: Optional[int] = None
    seed: int = DEFAULT_SEED
    tolerances: Tolerances = field(default_factory=Tolerances)
    radius_range: tuple = OVERLAP_RADII
    shards: int = 1
    cloud_size: int = DEFAULT_CLOUD_SIZE

    def __post_init__(self):
        if self.suite not in SUITES:
            raise UsageError(
                f"unknown suite {self.suite!r}; choose from {', '.join(SUITES)}"
            )
        if not isinstance(self.tag, AlgebraTag):
            object.__setattr__(self, "tag", AlgebraTag.parse(self.tag))
        ks = tuple(self.k_values)
        if not ks:
            raise UsageError("k list is empty")
        for k in ks:
            if int(k) != k or int(k) % 2 == 0:
                raise UsageError(f"k must be an odd integer, got {k!r}")
        object.__setattr__(self, "k_values", tuple(int(k) for k in ks))
        if self.samples is None:
            object.__setattr__(self, "samples", DEFAULT_SAMPLES[self.suite])
        if self.samples < 1:
            raise UsageError(f"sample count must be at least 1, got {self.samples}")
        if self.seed < 0:
            raise UsageError(f"seed must be non-negative, got {self.seed}")
        if not 1 <= self.shards <= self.samples:
            raise UsageError(
                f"shard count must lie in 1..{self.samples}, got {self.shards}"
            )
        lo, hi = self.radius_range
        if not 0 < lo <= hi:
            raise UsageError(
                f"radius range must satisfy 0 < lo <= hi, got {self.radius_range}"
            )
        object.__setattr__(self, "radius_range", (float(lo), float(hi)))
        if self.cloud_size < 1:
            raise UsageError("cloud size must be at least 1")

    def to_dict(self):
        return {
            "suite": self.suite,
            "algebra": self.tag.value,
            "k": list(self.k_values),
            "samples": self.samples,
            "seed": self.seed,
            "tolerances": self.tolerances.to_dict(),
            "radius_range": list(self.radius_range),
            "shards": self.shards,
            "cloud_size": self.cloud_size,
        }


@dataclass
class Check:
    """One named check: the worst value seen and the bound it must respect.

    expect is "below" for identities (value <= tolerance), "above" for
    negative controls and lower bounds (value > tolerance) and "count" for
    tallies of wrong samples, which pass only at zero.
    """

    name: str
    value: float
    tolerance: float
    expect: str = "below"
    counterexample: Optional[dict] = None

    @property
    def passed(self):
        if not np.isfinite(self.value):
            return False
        if self.expect == "above":
            return self.value > self.tolerance
        return self.value <= self.tolerance

    def merge(self, other):
        if self.expect == "count":
            example = self.counterexample or other.counterexample
            return Check(self.name, self.value + other.value, 0.0, "count", example)
        if not np.isfinite(self.value):
            return self
        if not np.isfinite(other.value):
            return other
        if self.expect == "above":
            return other if other.value < self.value else self
        return other if other.value > self.value else self

    def to_dict(self):
        out = {
            "name": self.name,
            "max_residual": float(self.value),
            "tolerance": float(self.tolerance),
            "expect": self.expect,
            "pass": self.passed,
        }
        if self.counterexample is not None and not self.passed:
            out["counterexample"] = self.counterexample
        return out


def _payload(inputs, index, extra, shard):
    out = {"shard": shard, "index": int(index)}
    for key, value in inputs.items():
        item = np.asarray(value)[index]
        out[key] = item.tolist() if isinstance(item, np.ndarray) else item.item()
    for key, value in (extra or {}).items():
        out[key] = np.asarray(value).tolist()
    return out


class CheckRecorder:
    """Collects checks by name, keeping the worst value of repeated records."""

    def __init__(self, shard=0):
        self.shard = shard
        self._checks = {}

    def add(self, check):
        prev = self._checks.get(check.name)
        self._checks[check.name] = check if prev is None else prev.merge(check)

    def below(self, name, values, tolerance, extra=None, **inputs):
        self._record(name, values, tolerance, "below", extra, inputs)

    def above(self, name, values, tolerance, extra=None, **inputs):
        self._record(name, values, tolerance, "above", extra, inputs)

    def count(self, name, wrong, extra=None, **inputs):
        """Tally of samples flagged in the boolean array `wrong`."""
        wrong = np.atleast_1d(np.asarray(wrong, dtype=bool))
        example = None
        if wrong.any():
            example = _payload(inputs, int(np.argmax(wrong)), extra, self.shard)
        self.add(Check(name, float(np.count_nonzero(wrong)), 0.0, "count", example))

    def _record(self, name, values, tolerance, expect, extra, inputs):
        values = np.atleast_1d(np.asarray(values, dtype=float))
        bad = ~np.isfinite(values)
        if bad.any():
            index = int(np.argmax(bad))
        elif expect == "above":
            index = int(np.argmin(values))
        else:
            index = int(np.argmax(values))
        check = Check(name, float(values[index]), float(tolerance), expect)
        if not check.passed:
            check.counterexample = _payload(inputs, index, extra, self.shard)
        self.add(check)

    @property
    def checks(self):
        return list(self._checks.values())


@dataclass
class VerificationReport:
    config: SuiteConfig
    checks: list
    wall_time: float = 0.0

    @property
    def suite(self):
        return self.config.suite

    @property
    def seed(self):
        return self.config.seed

    @property
    def passed(self):
        return bool(self.checks) and all(c.passed for c in self.checks)

    def failures(self):
        return [c for c in self.checks if not c.passed]

    def to_dict(self):
        return {
            "suite": self.suite,
            "config": self.config.to_dict(),
            "checks": [c.to_dict() for c in self.checks],
            "pass": self.passed,
            "seed": self.seed,
            "wall_time": round(self.wall_time, 3),
        }


def _dist(x, y):
    return np.linalg.norm(np.asarray(x) - np.asarray(y), axis=-1)


def _blocks(rng, tag, n):
    """Random automorphisms, each paired with the sample indices it acts on."""
    count = max(1, -(-n // AUTOMORPHISM_BLOCK))
    return [
        (random_automorphism(rng, tag), idx)
        for idx in np.array_split(np.arange(n), count)
        if idx.size
    ]


def _scaled_units(rng, tag, n):
    return random_unit(rng, tag, n) * rng.uniform(0.5, 2.0, (n, 1))


def _right_power(w, n):
    """w(w(...w)), the other extreme parenthesization of power()."""
    if n == 0:
        return one_like(w)
    if n < 0:
        return inverse(_right_power(w, -n))
    out = w
    for _ in range(n - 1):
        out = mul(w, out)
    return out


def _powers(w, exps, power_fn=power):
    """Per-sample powers w[i] ** exps[i]."""
    out = np.empty_like(w)
    for e in np.unique(exps):
        mask = exps == e
        out[mask] = power_fn(w[mask], int(e))
    return out


def _planted_sphere_points(rng, tag, n):
    """Uniform sphere points with degenerate ones planted at fixed indices.

    Every tenth point is made singular (Im c parallel to Im a, or a real) and
    every fiftieth is a fixed point (+-1, 0).
    """
    s = random_sphere_point(rng, tag, n)
    a, c = s.a.copy(), s.c.copy()
    idx = np.arange(n)
    parallel = idx % PLANT_PERIOD == 3
    real = idx % PLANT_PERIOD == 7
    fixed = idx % FIXED_PERIOD == 0

    im_len = np.linalg.norm(a[parallel, 1:], axis=-1, keepdims=True)
    direction = c[parallel] / np.linalg.norm(c[parallel], axis=-1, keepdims=True)
    a[parallel, 1:] = im_len * direction[:, 1:]

    c_len2 = np.sum(c[real] ** 2, axis=-1)
    sign = np.where(a[real, 0] < 0, -1.0, 1.0)
    a[real] = 0.0
    a[real, 0] = sign * np.sqrt(np.maximum(1.0 - c_len2, 0.0))

    a[fixed] = 0.0
    a[fixed, 0] = np.where(idx[fixed] % (2 * FIXED_PERIOD) == 0, 1.0, -1.0)
    c[fixed] = 0.0
    return SpherePoint(a, c), {"singular": parallel | real, "fixed": fixed}


def _algebra_suite(config, rng, n, rec, first):
    tag, tol = config.tag, config.tolerances.algebra
    x, y, z = (_scaled_units(rng, tag, n) for _ in range(3))
    xy = mul(x, y)
    rec.below(
        "norm multiplicativity", np.abs(norm(xy) - norm(x) * norm(y)), tol, x=x, y=y
    )
    rec.below(
        "conjugation reverses products",
        _dist(conjugate(xy), mul(conjugate(y), conjugate(x))),
        tol,
        x=x,
        y=y,
    )
    if tag is AlgebraTag.QUATERNION:
        rec.below("associativity", norm(associator(x, y, z)), tol, x=x, y=y, z=z)
    else:
        rec.below("left alternativity", norm(associator(x, x, y)), tol, x=x, y=y)
        rec.below("right alternativity", norm(associator(y, x, x)), tol, x=x, y=y)
        rec.below("flexibility", norm(associator(x, y, x)), tol, x=x, y=y)
        rec.below(
            "moufang identity",
            _dist(mul(mul(x, y), mul(z, x)), mul(mul(x, mul(y, z)), x)),
            tol,
            x=x,
            y=y,
            z=z,
        )

    inv = inverse(x)
    one = one_like(x)
    rec.below(
        "two-sided inverse",
        np.maximum(_dist(mul(x, inv), one), _dist(mul(inv, x), one)),
        tol,
        x=x,
    )

    # u^h q u^(1-h): the gluing product, in three association orders
    w = random_unit(rng, tag, n)
    q = random_unit(rng, tag, n)
    hs = rng.integers(-ARTIN_RANGE, ARTIN_RANGE + 1, n)
    wh, wj = _powers(w, hs), _powers(w, 1 - hs)
    left = mul(mul(wh, q), wj)
    right = mul(wh, mul(q, wj))
    nested = mul(mul(_powers(w, hs, _right_power), q), _powers(w, 1 - hs, _right_power))
    rec.below(
        "artin association independence",
        np.maximum(_dist(left, right), _dist(left, nested)),
        tol,
        w=w,
        q=q,
        h=hs,
    )

    ea = rng.integers(-ARTIN_RANGE, ARTIN_RANGE + 1, n)
    eb = rng.integers(-ARTIN_RANGE, ARTIN_RANGE + 1, n)
    rec.below(
        "power additivity",
        _dist(mul(_powers(w, ea), _powers(w, eb)), _powers(w, ea + eb)),
        tol,
        w=w,
        a=ea,
        b=eb,
    )


def _automorphism_suite(config, rng, n, rec, first):
    tag, tol = config.tag, config.tolerances.equivariance
    x, y = _scaled_units(rng, tag, n), _scaled_units(rng, tag, n)
    one = AlgebraElement.real(tag, 1.0).coeffs
    eye = np.eye(tag.b)
    src = standard_frame(tag)
    count = max(1, -(-n // AUTOMORPHISM_BLOCK))
    for idx in np.array_split(np.arange(n), count):
        if not idx.size:
            continue
        dst = random_frame(rng, tag)
        g = automorphism_from_frames(src, dst)
        other = random_automorphism(rng, tag)
        extra = {"g": g.matrix}
        xs, ys = x[idx], y[idx]

        mult, norms, conj = automorphism_residuals(g, xs, ys)
        rec.below("multiplicativity", mult, tol, extra, x=xs, y=ys)
        rec.below("norm preservation", norms, tol, extra, x=xs, y=ys)
        rec.below("commutes with conjugation", conj, tol, extra, x=xs, y=ys)
        rec.below(
            "real part preserved",
            np.abs(apply(g, xs)[:, 0] - xs[:, 0]),
            tol,
            extra,
            x=xs,
        )
        rec.below("fixes 1", [_dist(apply(g, one), one)], tol, extra)
        rec.below(
            "orthogonal matrix", [np.abs(g.matrix.T @ g.matrix - eye).max()], tol, extra
        )
        rec.below(
            "frame images",
            [max(_dist(apply(g, s), d) for s, d in zip(src.vectors, dst.vectors))],
            tol,
            extra,
        )

        gh = compose(g, other)
        mult, _, _ = automorphism_residuals(gh, xs, ys)
        rec.below("composition is an automorphism", mult, tol, extra, x=xs, y=ys)
        rec.below(
            "inverse undoes", [np.abs(compose(g, invert(g)).matrix - eye).max()], tol
        )

        signs = rng.choice((-1, 1), 2)
        s1, s2 = SignedSymmetry(g, int(signs[0])), SignedSymmetry(other, int(signs[1]))
        p = random_sphere_point(rng, tag, idx.size)
        rec.below(
            "signed action group law",
            signed_action(s1 * s2, p).distance(signed_action(s1, signed_action(s2, p))),
            tol,
            extra,
            a=p.a,
            c=p.c,
        )

        if tag is AlgebraTag.QUATERNION:
            unit_p = random_unit(rng, tag)
            by_conjugation = conjugation_automorphism(unit_p)
            images = tuple(
                mul(mul(unit_p, v), inverse(unit_p)) for v in src.vectors
            )
            by_frames = automorphism_from_frames(src, Frame(tag, images))
            rec.below(
                "conjugation agrees with frames",
                [np.abs(by_conjugation.matrix - by_frames.matrix).max()],
                tol,
                {"p": unit_p},
            )


def _gradient_checks(tag, rec):
    zero = np.zeros(tag.b)
    one = AlgebraElement.unit(tag, "1").coeffs
    i = AlgebraElement.unit(tag, "i").coeffs
    poles = [ChartPoint(Chart.ONE, zero, s * one) for s in (1.0, -1.0)]
    rec.below(
        "f critical at the poles", [f_gradient_norm(p) for p in poles], GRADIENT_FLAT
    )
    rec.above(
        "f regular on the equator",
        [f_gradient_norm(ChartPoint(Chart.ONE, zero, i))],
        CONTROL_MARGIN,
    )


def _bundle_suite(config, rng, n, rec, first):
    tol = config.tolerances
    for k in config.k_values:
        params = BundleParams.from_k(k, config.tag)
        label = f"(k={k})"
        p = random_chart_point(params, rng, Chart.ONE, config.radius_range, n)
        pt = transition(params, p)
        inputs = {"u": p.first, "q": p.second}
        rec.below(
            f"transition round trip {label}",
            transition(params, pt).distance(p),
            tol.rational,
            **inputs,
        )
        rec.below(
            f"T commutes with gluing {label}",
            transition(params, involution_T(p)).distance(involution_T(pt)),
            tol.equivariance,
            **inputs,
        )
        fp = f_value(p)
        rec.below(
            f"f chart invariance {label}",
            np.abs(f_value(pt) - fp),
            tol.rational,
            **inputs,
        )
        rec.below(
            f"f odd under T {label}",
            np.abs(f_value(involution_T(p)) + fp),
            tol.rational,
            **inputs,
        )
        for g, idx in _blocks(rng, params.tag, n):
            sub, sub_t = p[idx], pt[idx]
            gp = davis_action(g, sub)
            sub_inputs = {"u": sub.first, "q": sub.second}
            extra = {"g": g.matrix}
            rec.below(
                f"G commutes with gluing {label}",
                transition(params, gp).distance(davis_action(g, sub_t)),
                tol.equivariance,
                extra,
                **sub_inputs,
            )
            rec.below(
                f"T commutes with G {label}",
                involution_T(gp).distance(davis_action(g, involution_T(sub))),
                tol.algebra,
                extra,
                **sub_inputs,
            )
            rec.below(
                f"f invariant under G {label}",
                np.abs(f_value(gp) - fp[idx]),
                tol.rational,
                extra,
                **sub_inputs,
            )

        _, base = base_projection(params, p)
        _, base_t = base_projection(params, pt)
        _, base_flipped = base_projection(params, involution_T(p))
        inverted = base / np.sum(base * base, axis=-1, keepdims=True)
        rec.below(
            f"base projection {label}",
            np.maximum(_dist(base_t, inverted), _dist(base_flipped, base)),
            tol.rational,
            **inputs,
        )
        rec.below(
            f"U2 condition forms agree {label}",
            u2_condition_residual(pt.first, pt.second),
            tol.rational,
            v=pt.first,
            r=pt.second,
        )

        for chart in Chart:
            e = random_equator_point(params, rng, chart, config.radius_range, n)
            where = f"({chart.name.lower()}, k={k})"
            e_inputs = {"first": e.first, "second": e.second}
            rec.below(
                f"f vanishes on the equator {where}",
                np.abs(f_value(e)),
                tol.algebra,
                **e_inputs,
            )
            rec.below(
                f"equator preserved {where}",
                np.maximum(
                    equator_defect(transition(params, e)),
                    equator_defect(involution_T(e)),
                ),
                tol.rational,
                **e_inputs,
            )
            rec.above(
                f"T acts freely {where}",
                e.distance(involution_T(e)),
                FREENESS_MARGIN,
                **e_inputs,
            )

    if first:
        _gradient_checks(config.tag, rec)


def _quotient_suite(config, rng, n, rec, first):
    tol = config.tolerances
    tag = config.tag
    for k in config.k_values:
        params = BundleParams.from_k(k, tag)
        for chart in Chart:
            e = random_equator_point(params, rng, chart, config.radius_range, n)
            where = f"({chart.name.lower()}, k={k})"
            e_inputs = {"first": e.first, "second": e.second}
            qe = q_k(params, e)
            rec.below(
                f"Q_k well defined {where}",
                orbit_distance(qe, q_k(params, transition(params, e))),
                tol.transition,
                **e_inputs,
            )
            rec.below(
                f"Q_k image in region {where}",
                region_violation(qe),
                tol.rational,
                **e_inputs,
            )
            for g, idx in _blocks(rng, tag, n):
                rec.below(
                    f"Q_k invariant under G {where}",
                    orbit_distance(q_k(params, davis_action(g, e[idx])), qe[idx]),
                    tol.rational,
                    {"g": g.matrix},
                    first=e.first[idx],
                    second=e.second[idx],
                )

    lo, hi = config.radius_range
    u = random_unit(rng, tag, n) * rng.uniform(lo, hi, (n, 1))
    rec.below("phi inversion identity", phi_inversion_residual(u), tol.algebra, u=u)

    s = random_sphere_point(rng, tag, n)
    qs = q_s(s)
    rec.below("Q_s image in region", region_violation(qs), tol.rational, a=s.a, c=s.c)
    for g, idx in _blocks(rng, tag, n):
        moved = signed_action(SignedSymmetry(g), s[idx])
        rec.below(
            "Q_s invariant under G",
            orbit_distance(q_s(moved), qs[idx]),
            tol.rational,
            {"g": g.matrix},
            a=s.a[idx],
            c=s.c[idx],
        )


def _key_lemma_suite(config, rng, n, rec, first):
    tol = config.tolerances
    tag = config.tag
    for k in config.k_values:
        params = BundleParams.from_k(k, tag)
        for chart, name in ((Chart.ONE, "h1"), (Chart.TWO, "h2")):
            e = random_equator_point(params, rng, chart, config.radius_range, n)
            label = f"(k={k})"
            e_inputs = {"first": e.first, "second": e.second}
            s = h_chart(e)
            rec.below(
                f"Q_k = Q_s after {name} {label}",
                key_lemma_residual(params, e),
                tol.algebra,
                **e_inputs,
            )
            rec.below(
                f"{name} lands on the unit sphere {label}",
                np.abs(np.linalg.norm(s.as_vector(), axis=-1) - 1.0),
                tol.rational,
                **e_inputs,
            )
            for g, idx in _blocks(rng, tag, n):
                rec.below(
                    f"{name} equivariance {label}",
                    h_chart(davis_action(g, e[idx])).distance(
                        signed_action(SignedSymmetry(g), s[idx])
                    ),
                    tol.equivariance,
                    {"g": g.matrix},
                    first=e.first[idx],
                    second=e.second[idx],
                )

        e = random_equator_point(params, rng, Chart.ONE, config.radius_range, n)
        rec.below(
            f"h1 and h2 agree up to G (k={k})",
            orbit_distance(q_s(h_chart(e)), q_s(h_chart(transition(params, e)))),
            tol.transition,
            u=e.first,
            q=e.second,
        )

    if first:
        _coverage_checks(config, rec)


def _coverage_checks(config, rec):
    """Round and exotic clouds must fill the same cells of the orbit space."""
    tag, size = config.tag, config.cloud_size
    round_cloud = sample_orbit_space(
        CloudSource("round"), size, make_rng(config.seed, CLOUD_STREAM, 0), tag
    )
    rec.below(
        "round cloud in region",
        region_violation(OrbitPoint.from_array(round_cloud)),
        config.tolerances.rational,
    )
    for i, k in enumerate(config.k_values):
        exotic = sample_orbit_space(
            CloudSource("exotic", k),
            size,
            make_rng(config.seed, CLOUD_STREAM, i + 1),
            tag,
        )
        rec.below(
            f"exotic cloud in region (k={k})",
            region_violation(OrbitPoint.from_array(exotic)),
            config.tolerances.rational,
        )
        gap = coverage_gap(round_cloud, exotic, COVERAGE_RESOLUTION, COVERAGE_MIN_COUNT)
        rec.add(Check(f"cloud coverage gap (k={k})", float(gap), 0.0, "count"))


def _witness_suite(config, rng, n, rec, first):
    tag, tol = config.tag, config.tolerances.transition
    p, _ = _planted_sphere_points(rng, tag, n)
    moved = np.empty(n)
    fibered = np.empty(n)
    failed = np.zeros(n, dtype=bool)
    for i in range(n):
        pi = p[i]
        target = signed_action(SignedSymmetry(random_automorphism(rng, tag)), pi)
        fiber = fiber_point(q_s(pi), rng, tag)
        try:
            moved[i] = witness_residual(orbit_witness(pi, target), pi, target)
            fibered[i] = witness_residual(orbit_witness(pi, fiber), pi, fiber)
        except DomainError:
            moved[i] = fibered[i] = np.inf
            failed[i] = True
    rec.below("witness for (p, g p)", moved, tol, a=p.a, c=p.c)
    rec.below("witness within a fiber", fibered, tol, a=p.a, c=p.c)
    rec.count("witness failures", failed, a=p.a, c=p.c)

    m = max(1, n // EQUATOR_WITNESS_SHARE)
    for k in config.k_values:
        params = BundleParams.from_k(k, tag)
        e = random_equator_point(params, rng, Chart.ONE, config.radius_range, m)
        residual = np.empty(m)
        for i in range(m):
            src = e[i]
            dst = transition(params, davis_action(random_automorphism(rng, tag), src))
            try:
                g = equator_orbit_witness(params, src, dst)
                residual[i] = davis_action(g, src).distance(transition(params, dst))
            except DomainError:
                residual[i] = np.inf
        rec.below(f"equator witness (k={k})", residual, tol, u=e.first, q=e.second)


def _plant_equator(e):
    """Every tenth chart-One point gets a real u; chart Two gets v = 0, r = +-1."""
    first, second = e.first.copy(), e.second.copy()
    idx = np.arange(len(e))
    planted = idx % PLANT_PERIOD == 3
    if e.chart is Chart.ONE:
        radius = np.linalg.norm(first[planted], axis=-1)
        first[planted] = 0.0
        first[planted, 0] = radius
    else:
        first[planted] = 0.0
        second[planted] = 0.0
        second[planted, 0] = np.where(idx[planted] % 2 == 0, 1.0, -1.0)
        # a real v with an imaginary r also stays on the equator
        real = idx % PLANT_PERIOD == 7
        radius = np.linalg.norm(first[real], axis=-1)
        first[real] = 0.0
        first[real, 0] = radius
        second[real, 0] = 0.0
        second[real] /= np.linalg.norm(second[real], axis=-1, keepdims=True)
    return EquatorPoint(e.chart, first, second)


def _stratification_suite(config, rng, n, rec, first):
    tag, tol = config.tag, config.tolerances.rational
    if first:
        for sign in (1.0, -1.0):
            point = SpherePoint(
                AlgebraElement.real(tag, sign).coeffs, np.zeros(tag.b)
            )
            rec.below(
                "fixed points map to the corners",
                [orbit_distance(q_s(point), OrbitPoint(1.0, sign, 0.0))],
                FIXED_POINT_TOL,
            )
            rec.count(
                "fixed points typed fixed",
                [orbit_type(point, tol) is not OrbitType.FIXED],
            )

    s, planted = _planted_sphere_points(rng, tag, n)
    types = orbit_types(s, tol)
    inputs = {"a": s.a, "c": s.c}
    rec.count(
        "sphere and quotient types agree",
        types != orbit_point_types(q_s(s), tol),
        **inputs,
    )
    rec.count(
        "planted fixed points found",
        planted["fixed"] & (types != OrbitType.FIXED),
        **inputs,
    )
    rec.count(
        "planted singular points found",
        planted["singular"] & (types != OrbitType.SINGULAR_BOUNDARY),
        **inputs,
    )

    for k in config.k_values:
        params = BundleParams.from_k(k, tag)
        for chart in Chart:
            e = _plant_equator(
                random_equator_point(params, rng, chart, config.radius_range, n)
            )
            where = f"({chart.name.lower()}, k={k})"
            e_inputs = {"first": e.first, "second": e.second}
            codes = equator_orbit_types(params, e, tol)
            rec.count(
                f"equator and sphere types agree {where}",
                codes != orbit_types(h_chart(e), tol),
                **e_inputs,
            )
            rec.count(
                f"equator and quotient types agree {where}",
                codes != orbit_point_types(q_k(params, e), tol),
                **e_inputs,
            )


def _z2_suite(config, rng, n, rec, first):
    tag, tol = config.tag, config.tolerances.rational
    for k in config.k_values:
        params = BundleParams.from_k(k, tag)
        for chart in Chart:
            e = random_equator_point(params, rng, chart, config.radius_range, n)
            where = f"({chart.name.lower()}, k={k})"
            e_inputs = {"first": e.first, "second": e.second}
            flipped = involution_T(e)
            rec.below(
                f"Q_k intertwines T {where}",
                orbit_distance(q_k(params, flipped), z2_orbit_action(q_k(params, e))),
                tol,
                **e_inputs,
            )
            rec.below(
                f"h sends T to the antipodal map {where}",
                h_chart(flipped).distance(-h_chart(e)),
                tol,
                **e_inputs,
            )

    s = random_sphere_point(rng, tag, n)
    qs, q_neg = q_s(s), q_s(-s)
    inputs = {"a": s.a, "c": s.c}
    rec.below(
        "Q_s intertwines the antipodal map",
        orbit_distance(q_neg, z2_orbit_action(qs)),
        tol,
        **inputs,
    )
    rec.below(
        "Z2 representatives agree",
        orbit_distance(
            full_quotient_representative(qs, tol),
            full_quotient_representative(q_neg, tol),
        ),
        tol,
        **inputs,
    )
    for g, idx in _blocks(rng, tag, n):
        rec.below(
            "signed symmetries descend to the Z2 action",
            orbit_distance(
                q_s(signed_action(SignedSymmetry(g, -1), s[idx])),
                z2_orbit_action(qs[idx]),
            ),
            tol,
            {"g": g.matrix},
            a=s.a[idx],
            c=s.c[idx],
        )


def _sign_flip(tag):
    """Negate the i coordinate: orthogonal and fixes 1 but is not multiplicative."""
    m = np.eye(tag.b)
    m[1, 1] = -1.0
    return Automorphism(tag, m)


def _rotation_of_im(rng, tag, proper):
    """Orthogonal map fixing 1 with a Haar-ish random block on Im."""
    q, r = np.linalg.qr(rng.standard_normal((tag.b - 1, tag.b - 1)))
    q = q * np.sign(np.diag(r))
    if (np.linalg.det(q) > 0) != proper:
        q[:, 0] = -q[:, 0]
    m = np.eye(tag.b)
    m[1:, 1:] = q
    return Automorphism(tag, m)


def _negative_controls_suite(config, rng, n, rec, first):
    tag = config.tag
    flip = _sign_flip(tag)
    rec.above(
        "sign flip is not an automorphism",
        [verify_automorphism(flip, n, rng)],
        CONTROL_MARGIN,
    )
    rec.above(
        "improper rotation is not an automorphism",
        [verify_automorphism(_rotation_of_im(rng, tag, proper=False), n, rng)],
        CONTROL_MARGIN,
    )
    if tag is AlgebraTag.OCTONION:
        # SO(7) is larger than G2, so a generic rotation of Im O must fail too
        rec.above(
            "generic rotation of Im O is not in G2",
            [verify_automorphism(_rotation_of_im(rng, tag, proper=True), n, rng)],
            CONTROL_MARGIN,
        )
        x, y, z = (random_unit(rng, tag, n) for _ in range(3))
        rec.above(
            "octonions are not associative",
            [float(np.max(norm(associator(x, y, z))))],
            CONTROL_MARGIN,
        )

    for k in config.k_values:
        params = BundleParams.from_k(k, tag)
        if k != 1:
            broken_g = _rotation_of_im(rng, tag, proper=False)
            p = random_chart_point(params, rng, Chart.ONE, config.radius_range, n)
            broken = transition(params, davis_action(broken_g, p)).distance(
                davis_action(broken_g, transition(params, p))
            )
            rec.above(
                f"non-automorphism breaks gluing equivariance (k={k})",
                [float(np.max(broken))],
                CONTROL_MARGIN,
            )
        e = random_equator_point(params, rng, Chart.ONE, config.radius_range, n)
        v, r = glue(e.first, e.second, params.h + 1, params.j)
        perturbed = ChartPoint(Chart.TWO, v, r)
        gap = orbit_distance(q_k(params, e), q_k(params, perturbed))
        rec.above(
            f"perturbed exponent breaks Q_k (k={k})",
            [float(np.max(gap))],
            CONTROL_MARGIN,
        )


_RUNNERS = {
    "algebra": _algebra_suite,
    "automorphism": _automorphism_suite,
    "bundle-welldef": _bundle_suite,
    "quotient-welldef": _quotient_suite,
    "key-lemma": _key_lemma_suite,
    "orbit-witness": _witness_suite,
    "stratification": _stratification_suite,
    "z2-coincide": _z2_suite,
    "negative-controls": _negative_controls_suite,
}


def _run_shard(config, shard):
    n = split_count(config.samples, config.shards)[shard]
    rec = CheckRecorder(shard)
    rng = shard_generators(config.seed, config.shards)[shard]
    _RUNNERS[config.suite](config, rng, n, rec, shard == 0)
    return rec.checks


def run_suite(config, workers=1, debug=False):
    """Run one suite and reduce its shards into a VerificationReport."""
    if workers < 1:
        raise UsageError("worker count must be at least 1")
    start = time.perf_counter()
    if debug:
        log(f"suite {config.suite}: {json.dumps(config.to_dict())}")
    shards = list(range(config.shards))
    if workers > 1 and config.shards > 1:
        with ProcessPoolExecutor(max_workers=min(workers, config.shards)) as pool:
            results = list(pool.map(_run_shard, [config] * len(shards), shards))
    else:
        results = [_run_shard(config, shard) for shard in shards]

    rec = CheckRecorder()
    for checks in results:
        for check in checks:
            rec.add(check)
    report = VerificationReport(config, rec.checks, time.perf_counter() - start)
    if debug:
        for check in report.checks:
            status = "ok" if check.passed else "FAIL"
            log(
                f"  {check.name}: {check.value:.3g} "
                f"({check.expect} {check.tolerance:.3g}) {status}"
            )
        log(f"suite {config.suite} finished in {report.wall_time:.2f}s")
    return report
