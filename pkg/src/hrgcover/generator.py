"""Sampling hyperbolic random graphs.

Positions come from numpy's PCG64 bit generator seeded with the config seed,
so a ``(seed, params, mode)`` triple reproduces the same point set on every
platform. Edges are decided exclusively by :func:`geometry.connected`; the
accelerated builder only prunes candidate pairs.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from hrgcover.geometry import TWO_PI, ModelParams, PolarPoint, connected, max_angle_theta, radial_quantiles
from hrgcover.graph import Graph

RNG_NAME = "numpy.random.PCG64"


class SamplingMode(enum.Enum):
    FIXED_N = "fixed"
    POISSON_N = "poisson"


class EdgeBuilder(enum.Enum):
    NAIVE = "naive"
    ACCELERATED = "accelerated"


@dataclass(frozen=True)
class GeneratorConfig:
    params: ModelParams
    seed: int
    mode: SamplingMode = SamplingMode.FIXED_N
    edge_builder: EdgeBuilder = EdgeBuilder.ACCELERATED

    def __post_init__(self) -> None:
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")


class CalibrationError(RuntimeError):
    pass


def sample_coordinates(config: GeneratorConfig) -> tuple[np.ndarray, np.ndarray]:
    """Radii and angles as arrays.

    In Poisson mode the count is drawn first, then that many i.i.d. positions;
    this equals the inhomogeneous Poisson process in law because its intensity
    is ``n`` times the sampling density.
    """
    rng = np.random.Generator(np.random.PCG64(config.seed))
    n = config.params.n
    if config.mode is SamplingMode.POISSON_N:
        n = int(rng.poisson(n))
    angles = rng.uniform(0.0, TWO_PI, size=n)
    radii = radial_quantiles(rng.random(size=n), config.params)
    return radii, angles


def sample_points(config: GeneratorConfig) -> list[PolarPoint]:
    radii, angles = sample_coordinates(config)
    return [PolarPoint(r, phi) for r, phi in zip(radii.tolist(), angles.tolist())]


def build_edges(
    radii: np.ndarray,
    angles: np.ndarray,
    R: float,
    mode: EdgeBuilder = EdgeBuilder.ACCELERATED,
) -> Graph:
    """Connect every pair at hyperbolic distance at most ``R``."""
    radii = np.asarray(radii, dtype=float)
    angles = np.asarray(angles, dtype=float)
    if mode is EdgeBuilder.NAIVE:
        edges = _naive_edges(radii, angles, R)
    else:
        edges = _banded_edges(radii, angles, R)
    return Graph.from_edges(len(radii), edges, radii, angles)


def generate(config: GeneratorConfig) -> Graph:
    radii, angles = sample_coordinates(config)
    return build_edges(radii, angles, config.params.R, config.edge_builder)


def _naive_edges(radii: np.ndarray, angles: np.ndarray, R: float) -> np.ndarray:
    n = len(radii)
    out = []
    for u in range(n - 1):
        v = np.arange(u + 1, n)
        hit = connected(radii[u], angles[u], radii[v], angles[v], R)
        if hit.any():
            vs = v[hit]
            out.append(np.stack([np.full(len(vs), u), vs], axis=1))
    return np.concatenate(out) if out else np.empty((0, 2), dtype=np.int64)


_CHUNK = 1 << 20  # candidate pairs tested per vectorized batch


def _banded_edges(radii: np.ndarray, angles: np.ndarray, R: float) -> np.ndarray:
    """Candidate pruning over unit-width radial bands.

    Points of band ``j`` are kept sorted by angle; a point of band ``i`` can
    only reach the angular window of half-width ``theta(i, j)`` evaluated at
    the two inner band radii, which bounds the true connection angle from
    above because theta is nonincreasing in both radii.
    """
    n = len(radii)
    if n < 2:
        return np.empty((0, 2), dtype=np.int64)
    n_bands = max(1, math.ceil(R))
    band = np.minimum(np.floor(radii).astype(np.int64), n_bands - 1)
    members = []
    for b in range(n_bands):
        idx = np.flatnonzero(band == b)
        idx = idx[np.argsort(angles[idx], kind="stable")]
        members.append(idx)

    out = []
    for i in range(n_bands):
        src = members[i]
        if not len(src):
            continue
        for j in range(i, n_bands):
            dst = members[j]
            if not len(dst):
                continue
            theta = max_angle_theta(float(i), float(j), R)
            if theta <= 0.0:
                continue
            pairs = _window_pairs(src, dst, angles, theta, same=(i == j))
            for u, v in pairs:
                hit = connected(radii[u], angles[u], radii[v], angles[v], R)
                if hit.any():
                    out.append(np.stack([u[hit], v[hit]], axis=1))
    return np.concatenate(out) if out else np.empty((0, 2), dtype=np.int64)


def _window_pairs(src: np.ndarray, dst: np.ndarray, angles: np.ndarray, theta: float, same: bool):
    """Yield batches of candidate ``(u, v)`` arrays with ``|phi_u - phi_v| <= theta`` (circular)."""
    # slack keeps boundary pairs inside the window; the exact predicate decides
    theta = theta * (1.0 + 1e-9) + 1e-12
    if theta >= math.pi:
        # every pair is a candidate
        for start in range(0, len(src), max(1, _CHUNK // len(dst))):
            u = src[start : start + max(1, _CHUNK // len(dst))]
            uu = np.repeat(u, len(dst))
            vv = np.tile(dst, len(u))
            keep = uu < vv if same else slice(None)
            yield uu[keep], vv[keep]
        return
    dphi = angles[dst]
    ext_phi = np.concatenate([dphi - TWO_PI, dphi, dphi + TWO_PI])
    ext_id = np.concatenate([dst, dst, dst])
    src_phi = angles[src]
    lo = np.searchsorted(ext_phi, src_phi - theta, side="left")
    hi = np.searchsorted(ext_phi, src_phi + theta, side="right")
    counts = hi - lo
    # split src into batches of bounded candidate volume
    cum = np.cumsum(counts)
    start = 0
    while start < len(src):
        base = cum[start - 1] if start else 0
        stop = int(np.searchsorted(cum, base + _CHUNK, side="right"))
        stop = max(stop, start + 1)
        c = counts[start:stop]
        total = int(c.sum())
        if total:
            uu = np.repeat(src[start:stop], c)
            offs = np.arange(total) - np.repeat(np.cumsum(c) - c, c)
            vv = ext_id[np.repeat(lo[start:stop], c) + offs]
            keep = uu < vv if same else slice(None)
            yield uu[keep], vv[keep]
        start = stop


def average_degree(g: Graph) -> float:
    return 2.0 * g.edge_count / g.vertex_count if g.vertex_count else 0.0


def calibrate_C(
    target_avg_degree: float,
    n: int,
    alpha: float,
    seeds: int = 3,
    *,
    lo: float = -20.0,
    hi: float = 10.0,
    max_steps: int = 30,
    tolerance: float = 0.05,
) -> float:
    """Find C whose graphs have the requested mean average degree.

    Bisection over ``[lo, hi]`` using the same seeds ``0..seeds-1`` for every
    probe. The average degree falls as C grows (a larger disk at a fixed
    connection threshold relative to ``2 ln n``), so the bracket is searched
    in that direction.
    """
    if target_avg_degree < 1:
        raise ValueError("target average degree must be at least 1")
    if seeds < 1:
        raise ValueError("need at least one seed")

    def measure(C: float) -> float:
        if 2.0 * math.log(n) + C <= 0.0:
            return float(n - 1)  # no valid disk; treat as maximally dense
        params = ModelParams(n, alpha, C)
        return float(np.mean([average_degree(generate(GeneratorConfig(params, s))) for s in range(seeds)]))

    seen: list[float] = []
    best_C, best_err = None, math.inf
    for _ in range(max_steps):
        mid = (lo + hi) / 2.0
        d = measure(mid)
        seen.append(d)
        err = abs(d - target_avg_degree)
        if err < best_err:
            best_C, best_err = mid, err
        if err <= tolerance * target_avg_degree:
            return mid
        if d > target_avg_degree:
            lo = mid
        else:
            hi = mid
    raise CalibrationError(
        f"bracket exhausted after {max_steps} steps: achieved average degrees "
        f"{min(seen):.4g}..{max(seen):.4g}, closest C={best_C:.4g}, target {target_avg_degree}"
    )
