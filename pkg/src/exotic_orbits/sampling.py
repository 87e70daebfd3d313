"""Orbit-space point clouds: sampling, grid coverage, CSV/JSON output."""

import json
import re
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .algebra import AlgebraTag, random_unit
from .bundle import BundleParams, Chart, EquatorPoint, transition
from .orbit import q_k, q_s
from .symmetry import random_sphere_point
from .utils import UsageError, as_rng

COVERAGE_RESOLUTION = 0.05


@dataclass(frozen=True)
class CloudSource:
    """'round' (the standard sphere) or 'exotic' with its gluing parameter k."""

    kind: str
    k: Optional[int] = None

    def __post_init__(self):
        if self.kind not in ("round", "exotic"):
            raise UsageError(f"unknown cloud source {self.kind!r}")
        if self.kind == "exotic":
            if self.k is None or int(self.k) != self.k or int(self.k) % 2 == 0:
                raise UsageError(f"exotic source needs an odd k, got {self.k!r}")

    @classmethod
    def parse(cls, text):
        """'round' or 'exotic:<k>'."""
        text = str(text).strip().lower()
        if text == "round":
            return cls("round")
        match = re.fullmatch(r"exotic:(-?\d+)", text)
        if not match:
            raise UsageError(f"source must be round or exotic:<k>, got {text!r}")
        return cls("exotic", int(match.group(1)))

    def __str__(self):
        return self.kind if self.k is None else f"{self.kind}:{self.k}"


def _exotic_points(params, rng, n):
    """Equator points whose image under h1 is uniform on the round sphere.

    |a| of a uniform point of S^{2b-2} has |a|^2 ~ Beta(b/2, (b-1)/2); taking
    |u| = x / sqrt(1 - x^2) gives h1(u, q) the same radial law, and uniform
    directions for u and q give it the same angular law. Points with |u| > 1
    are moved to chart Two through the gluing map.
    """
    b = params.tag.b
    x = np.sqrt(rng.beta(b / 2.0, (b - 1) / 2.0, n))
    x = np.minimum(x, 1.0 - 1e-12)
    radius = x / np.sqrt(1.0 - x * x)
    u = random_unit(rng, params.tag, n) * radius[:, None]
    q = random_unit(rng, params.tag, n, imaginary=True)
    return EquatorPoint(Chart.ONE, u, q), radius > 1.0


def sample_orbit_space(source, n, seed, tag=AlgebraTag.OCTONION):
    """n orbit-space points, shape (n, 3), from q_s or q_k."""
    if n < 1:
        raise UsageError("need at least one point")
    if isinstance(source, str):
        source = CloudSource.parse(source)
    rng = as_rng(seed)
    if source.kind == "round":
        return q_s(random_sphere_point(rng, tag, n)).as_array()
    params = BundleParams.from_k(source.k, tag)
    points, far = _exotic_points(params, rng, n)
    out = np.empty((n, 3))
    near = ~far
    if np.any(near):
        out[near] = q_k(params, points[near]).as_array()
    if np.any(far):
        out[far] = q_k(params, transition(params, points[far])).as_array()
    return out


def _occupied(cloud, resolution):
    cells = np.floor(np.asarray(cloud) / resolution).astype(np.int64)
    keys, counts = np.unique(cells, axis=0, return_counts=True)
    return {tuple(key): int(c) for key, c in zip(keys, counts)}


def coverage_gap(cloud_a, cloud_b, resolution=COVERAGE_RESOLUTION, min_count=1):
    """Cells holding >= min_count points of one cloud and none of the other."""
    if resolution <= 0:
        raise UsageError("grid resolution must be positive")
    occ_a = _occupied(cloud_a, resolution)
    occ_b = _occupied(cloud_b, resolution)
    gap = 0
    for mine, theirs in ((occ_a, occ_b), (occ_b, occ_a)):
        gap += sum(
            1 for cell, c in mine.items() if c >= min_count and cell not in theirs
        )
    return gap


def write_cloud(points, stream, fmt="csv"):
    """CSV with header x,y,z at 17 significant digits, or a JSON document."""
    points = np.asarray(points, dtype=float)
    if fmt == "csv":
        stream.write("x,y,z\n")
        for row in points:
            stream.write(",".join(format(v, ".17g") for v in row) + "\n")
    elif fmt == "json":
        stream.write(json.dumps({"points": points.tolist()}) + "\n")
    else:
        raise UsageError(f"unknown cloud format {fmt!r}; use csv or json")
