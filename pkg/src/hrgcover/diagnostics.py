"""Inner-disk / outer-band discretization of generated graphs.

The outer band (radius >= rho) is cut into sectors of width theta(rho, rho).
No edge between two outer vertices spans more than one sector width, so empty
sectors separate components and the maximal runs of non-empty sectors bound
component sizes from above.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from hrgcover.geometry import AnalysisConstants, ModelParams, analysis_constants, iterated_log
from hrgcover.graph import Graph


@dataclass(frozen=True)
class SectorOccupancy:
    constants: AnalysisConstants
    counts: np.ndarray  # outer-band vertices per sector
    sector_of: np.ndarray  # per vertex; -1 for inner-disk vertices

    @property
    def n_outer(self) -> int:
        return int(self.counts.sum())


@dataclass(frozen=True)
class RunClassification:
    """Maximal circular runs of non-empty sectors, ordered by start sector."""

    starts: np.ndarray
    lengths: np.ndarray
    vertex_counts: np.ndarray
    wide: np.ndarray
    large: np.ndarray  # only ever true for narrow runs
    n_sectors: int

    @property
    def runs(self) -> list[tuple[int, int, int]]:
        return list(zip(self.starts.tolist(), self.lengths.tolist(), self.vertex_counts.tolist()))

    def run_of_sector(self) -> np.ndarray:
        """Run index per sector, -1 for empty sectors."""
        out = np.full(self.n_sectors, -1, dtype=np.int64)
        for k, (s, length) in enumerate(zip(self.starts.tolist(), self.lengths.tolist())):
            idx = (s + np.arange(length)) % self.n_sectors
            out[idx] = k
        return out


@dataclass(frozen=True)
class RegionCounts:
    inner_disk: int
    wide_run_vertices: int
    large_narrow_vertices: int
    narrow_run_vertices: int
    n_outer: int

    @property
    def n(self) -> int:
        return self.inner_disk + self.n_outer


def discretize(g: Graph, params: ModelParams, tau: float) -> SectorOccupancy:
    if not g.has_coordinates:
        raise ValueError("discretization needs vertex coordinates")
    const = analysis_constants(params, tau)
    outer = g.radii >= const.rho
    sector = np.minimum(np.floor(g.angles / const.sector_width).astype(np.int64), const.n_sectors - 1)
    sector = np.where(outer, sector, -1)
    counts = np.bincount(sector[outer], minlength=const.n_sectors)
    return SectorOccupancy(const, counts, sector)


def classify_runs(occ: SectorOccupancy) -> RunClassification:
    counts = np.asarray(occ.counts)
    const = occ.constants
    return _classify(counts, const.w, const.component_limit)


def _classify(counts: np.ndarray, w: float, limit: int) -> RunClassification:
    n = len(counts)
    filled = counts > 0
    if not filled.any():
        empty = np.empty(0, dtype=np.int64)
        return RunClassification(empty, empty, empty, empty.astype(bool), empty.astype(bool), n)
    if filled.all():
        starts = np.array([0])
        lengths = np.array([n])
        totals = np.array([int(counts.sum())])
    else:
        # rotate so the sequence begins right after an empty sector
        shift = int(np.flatnonzero(~filled)[0]) + 1
        rot = np.roll(filled, -shift).astype(np.int8)
        rc = np.roll(counts, -shift)
        edges = np.diff(np.concatenate([[0], rot, [0]]))
        s = np.flatnonzero(edges == 1)
        e = np.flatnonzero(edges == -1)
        csum = np.concatenate([[0], np.cumsum(rc)])
        lengths = e - s
        totals = csum[e] - csum[s]
        starts = (s + shift) % n
        order = np.argsort(starts, kind="stable")
        starts, lengths, totals = starts[order], lengths[order], totals[order]
    wide = lengths > w
    large = ~wide & (totals > limit)
    return RunClassification(starts, lengths, totals, wide, large, n)


def region_counts(g: Graph, params: ModelParams, tau: float) -> RegionCounts:
    occ = discretize(g, params, tau)
    return _regions(g.vertex_count, occ, classify_runs(occ))


def _regions(n: int, occ: SectorOccupancy, runs: RunClassification) -> RegionCounts:
    counts = runs.vertex_counts
    return RegionCounts(
        inner_disk=n - occ.n_outer,
        wide_run_vertices=int(counts[runs.wide].sum()),
        large_narrow_vertices=int(counts[runs.large].sum()),
        narrow_run_vertices=int(counts[~runs.wide].sum()),
        n_outer=occ.n_outer,
    )


def expected_run_mass(n_sectors: int, p: float, w: float) -> float:
    """Expected total length of circular success runs of length at least ``w``.

    ``n' p^w (w q + p)`` for i.i.d. sectors that are non-empty with probability
    ``p``. To count runs longer than ``w`` sectors pass ``w + 1``. At
    ``w == n'`` only the all-success circle qualifies, giving ``n' p^n'``.
    """
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must be a probability, got {p}")
    if not 1 <= w <= n_sectors:
        raise ValueError(f"w must lie in [1, n_sectors={n_sectors}], got {w}")
    if w == n_sectors and n_sectors > 1:
        return n_sectors * p**n_sectors
    return n_sectors * p**w * (w * (1.0 - p) + p)


def occupancy_probability_bounds(constants: AnalysisConstants) -> tuple[float, float]:
    """Lower and upper bound on the probability that a sector is non-empty."""
    gamma = constants.gamma
    if gamma <= 0:
        raise ValueError("gamma must be positive")
    return -math.expm1(-gamma / 4.0), math.exp(-math.exp(-gamma))


@dataclass(frozen=True)
class BoundsReport:
    model: str
    n: int
    tau: float
    constants: AnalysisConstants
    counts: RegionCounts
    inner_predictor: float
    wide_predictor: float
    large_narrow_predictor: float
    excess_ratio: float
    nonempty_sector_fraction: float
    occupancy_lower: float
    occupancy_upper: float
    outer_span_violations: int

    @property
    def inner_ratio(self) -> float:
        return self.counts.inner_disk / self.inner_predictor

    @property
    def wide_ratio(self) -> float:
        return self.counts.wide_run_vertices / self.wide_predictor

    @property
    def large_narrow_ratio(self) -> float:
        return self.counts.large_narrow_vertices / self.large_narrow_predictor

    def as_row(self) -> dict[str, object]:
        c, k = self.counts, self.constants
        return {
            "model": self.model,
            "n": self.n,
            "tau": self.tau,
            "gamma": k.gamma,
            "rho": k.rho,
            "w": k.w,
            "sector_width": k.sector_width,
            "n_sectors": k.n_sectors,
            "component_limit": k.component_limit,
            "inner_disk": c.inner_disk,
            "n_outer": c.n_outer,
            "narrow_run_vertices": c.narrow_run_vertices,
            "wide_run_vertices": c.wide_run_vertices,
            "large_narrow_vertices": c.large_narrow_vertices,
            "inner_fraction": c.inner_disk / self.n if self.n else 0.0,
            "inner_ratio": self.inner_ratio,
            "wide_ratio": self.wide_ratio,
            "large_narrow_ratio": self.large_narrow_ratio,
            "excess_ratio": self.excess_ratio,
            "nonempty_sector_fraction": self.nonempty_sector_fraction,
            "occupancy_lower": self.occupancy_lower,
            "occupancy_upper": self.occupancy_upper,
            "outer_span_violations": self.outer_span_violations,
        }

    def text(self) -> str:
        c = self.counts
        lines = [
            f"model={self.model} n={self.n} tau={self.tau}",
            f"  gamma={self.constants.gamma:.6g} rho={self.constants.rho:.6g} w={self.constants.w:.6g} "
            f"sectors={self.constants.n_sectors} component_limit={self.constants.component_limit}",
            f"  inner disk        {c.inner_disk:>10d}  predictor {self.inner_predictor:14.6g}  ratio {self.inner_ratio:.4g}",
            f"  wide runs         {c.wide_run_vertices:>10d}  predictor {self.wide_predictor:14.6g}  ratio {self.wide_ratio:.4g}",
            f"  large narrow runs {c.large_narrow_vertices:>10d}  predictor {self.large_narrow_predictor:14.6g}  "
            f"ratio {self.large_narrow_ratio:.4g}",
            f"  predicted excess gamma^-alpha = {self.excess_ratio:.6g}",
            f"  non-empty sectors {self.nonempty_sector_fraction:.4f} "
            f"(bounds {self.occupancy_lower:.4f} .. {self.occupancy_upper:.4f})",
            f"  outer edges wider than one sector: {self.outer_span_violations}",
        ]
        return "\n".join(lines)


def outer_span_violations(g: Graph, constants: AnalysisConstants) -> int:
    """Edges between outer-band vertices whose angular distance exceeds the sector width."""
    e = g.edge_array()
    if not len(e):
        return 0
    u, v = e[:, 0], e[:, 1]
    outer = (g.radii[u] >= constants.rho) & (g.radii[v] >= constants.rho)
    d = np.abs(g.angles[u] - g.angles[v])
    dphi = np.pi - np.abs(np.pi - d)
    return int(np.count_nonzero(outer & (dphi > constants.sector_width)))


def bounds_report(g: Graph, params: ModelParams, tau: float, model: str = "fixed") -> BoundsReport:
    """Empirical region counts next to their leading-order predictors (constant 1)."""
    occ = discretize(g, params, tau)
    const = occ.constants
    region = _regions(g.vertex_count, occ, classify_runs(occ))
    n = params.n
    gamma, alpha = const.gamma, params.alpha
    l1, l2, l3 = math.log(n), iterated_log(n, 2), iterated_log(n, 3)
    lower, upper = occupancy_probability_bounds(const)
    return BoundsReport(
        model=model,
        n=g.vertex_count,
        tau=tau,
        constants=const,
        counts=region,
        inner_predictor=n * gamma**-alpha,
        wide_predictor=tau**0.75 * n / (l2**0.25 * l3**0.5),
        large_narrow_predictor=tau * n * l2 / (gamma * l1 ** (tau / 18.0)),
        excess_ratio=gamma**-alpha,
        nonempty_sector_fraction=float(np.count_nonzero(occ.counts)) / const.n_sectors,
        occupancy_lower=lower,
        occupancy_upper=upper,
        outer_span_violations=outer_span_violations(g, const),
    )
