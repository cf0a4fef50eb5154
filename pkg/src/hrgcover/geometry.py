"""Hyperbolic disk geometry and the closed-form constants of the sector analysis.

Distances and connection angles are evaluated in the numerically stable
half-angle form

    cosh d = cosh(r1 - r2) + 2 sin^2(dphi / 2) sinh(r1) sinh(r2),

which is algebraically identical to the textbook law of cosines but does not
cancel catastrophically once radii reach the 20-30 range used for large graphs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class PolarPoint:
    """A point of the hyperbolic disk in native polar coordinates."""

    radius: float
    angle: float

    def __post_init__(self) -> None:
        if not self.radius >= 0.0:
            raise ValueError(f"radius must be nonnegative, got {self.radius}")
        angle = math.fmod(self.angle, TWO_PI)
        if angle < 0.0:
            angle += TWO_PI
        if angle >= TWO_PI:
            angle = 0.0
        object.__setattr__(self, "angle", angle)


@dataclass(frozen=True)
class ModelParams:
    """Generative parameters of a hyperbolic random graph.

    ``R = 2 ln(n) + C`` is both the disk radius and the connection threshold;
    ``beta = 2 alpha + 1`` is the power-law exponent of the degree sequence.
    """

    n: int
    alpha: float
    C: float = 0.0
    R: float = field(init=False)
    beta: float = field(init=False)

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError(f"n must be positive, got {self.n}")
        if not 0.5 < self.alpha < 1.0:
            raise ValueError(f"alpha must lie in (1/2, 1), got {self.alpha}")
        R = 2.0 * math.log(self.n) + self.C
        if R <= 0.0:
            raise ValueError(f"disk radius R = 2 ln(n) + C must be positive, got {R}")
        object.__setattr__(self, "R", R)
        object.__setattr__(self, "beta", 2.0 * self.alpha + 1.0)


@dataclass(frozen=True)
class AnalysisConstants:
    """Discretization constants for the inner-disk / outer-band analysis."""

    tau: float
    gamma: float
    rho: float
    w: float
    sector_width: float
    n_sectors: int
    component_limit: int


def angular_distance(phi1: float, phi2: float) -> float:
    return math.pi - abs(math.pi - abs(phi1 - phi2))


def _cosh_distance(r1, r2, dphi):
    # works on floats and numpy arrays alike
    half = np.sin(dphi / 2.0) if isinstance(dphi, np.ndarray) else math.sin(dphi / 2.0)
    if isinstance(r1, np.ndarray) or isinstance(r2, np.ndarray):
        return np.cosh(r1 - r2) + 2.0 * half * half * (np.sinh(r1) * np.sinh(r2))
    return math.cosh(r1 - r2) + 2.0 * half * half * (math.sinh(r1) * math.sinh(r2))


def hyperbolic_distance(p: PolarPoint, q: PolarPoint) -> float:
    dphi = angular_distance(p.angle, q.angle)
    arg = _cosh_distance(p.radius, q.radius, dphi)
    return math.acosh(max(1.0, arg))


def connected(r1, phi1, r2, phi2, R: float):
    """Edge predicate ``dist <= R`` evaluated as ``cosh(dist) <= cosh(R)``.

    Accepts scalars or equally shaped arrays. Both edge builders go through
    this function so they agree bit for bit on boundary pairs.
    """
    dphi = np.pi - np.abs(np.pi - np.abs(np.asarray(phi1) - np.asarray(phi2)))
    arg = _cosh_distance(np.asarray(r1, dtype=float), np.asarray(r2, dtype=float), dphi)
    return arg <= math.cosh(R)


def max_angle_theta(r1: float, r2: float, R: float) -> float:
    """Largest angular distance at which points of radii ``r1``, ``r2`` are adjacent.

    Returns pi when every angle connects and 0 when none does.
    """
    if r1 < 0.0 or r2 < 0.0:
        raise ValueError("radii must be nonnegative")
    # sin^2(theta/2) and cos^2(theta/2), up to the common factor sinh r1 sinh r2,
    # each written as a product of sinh terms so neither cancels near 0 or pi
    d, s = r1 - r2, r1 + r2
    sin2 = math.sinh((R + d) / 2.0) * math.sinh((R - d) / 2.0)
    cos2 = math.sinh((s + R) / 2.0) * math.sinh((s - R) / 2.0)
    if cos2 <= 0.0:
        return math.pi
    if sin2 <= 0.0:
        return 0.0
    return 2.0 * math.atan2(math.sqrt(sin2), math.sqrt(cos2))


def disk_measure(r: float, params: ModelParams) -> float:
    """Probability that a sampled vertex lands at radius at most ``r``."""
    if r < 0.0 or r > params.R:
        raise ValueError(f"r must lie in [0, R={params.R}], got {r}")
    a = params.alpha
    # cosh(x) - 1 = 2 sinh(x/2)^2 keeps precision near the origin
    return (math.sinh(a * r / 2.0) / math.sinh(a * params.R / 2.0)) ** 2


def radial_quantile(u: float, params: ModelParams) -> float:
    """Inverse of :func:`disk_measure`."""
    if not 0.0 <= u <= 1.0:
        raise ValueError(f"u must lie in [0, 1], got {u}")
    if u == 1.0:
        return params.R
    return float(radial_quantiles(np.array([u]), params)[0])


def radial_quantiles(u: np.ndarray, params: ModelParams) -> np.ndarray:
    """Vectorized :func:`radial_quantile` for sampling."""
    a = params.alpha
    # acosh(1 + y) = log1p(y + sqrt(y (y + 2)))
    y = u * (2.0 * math.sinh(a * params.R / 2.0) ** 2)
    r = np.log1p(y + np.sqrt(y * (y + 2.0))) / a
    return np.minimum(r, params.R)


def iterated_log(x: float, times: int) -> float:
    for _ in range(times):
        if x <= 0.0:
            raise ValueError("iterated logarithm undefined")
        x = math.log(x)
    return x


def gamma_function(n: float, tau: float) -> float:
    """ln(tau lnln n / (2 (lnlnln n)^2)); raises where undefined."""
    l2 = iterated_log(n, 2)
    l3 = iterated_log(n, 3)
    if l3 <= 0.0:
        raise ValueError("lnlnln(n) must be positive")
    return math.log(tau * l2 / (2.0 * l3 * l3))


def minimum_admissible_n(tau: float, C: float = 0.0, limit: int = 10**7) -> int:
    """Smallest n with admissible constants, by upward scan.

    Admissibility is not monotone in n: just above e^e the triple logarithm
    is tiny and gamma huge, while at larger n the outer band can vanish
    again, so no bisection is possible.
    """
    n = 16  # lnlnln(n) > 0 needs n > e^e
    while n <= limit:
        try:
            _constants(ModelParams(n, 0.75, C), tau)
            return n
        except ValueError:
            n = n + 1 if n < 4096 else int(n * 1.01)
    raise ValueError(f"no admissible n up to {limit} for tau={tau}, C={C}")


def minimum_tau(n: int, C: float = 0.0) -> float:
    """Infimum of the tau values that make the constants admissible at ``n``.

    Needs gamma > 0 and pi/2 * e^(C/2) * gamma > 1; the rho > 0 side only
    binds for tiny n and is not considered.
    """
    l2, l3 = iterated_log(n, 2), iterated_log(n, 3)
    if l3 <= 0.0:
        raise ValueError("lnlnln(n) must be positive")
    g = 2.0 / (math.pi * math.exp(C / 2.0))  # always positive, so gamma > 0 follows
    return 2.0 * l3 * l3 * math.exp(g) / l2


def analysis_constants(params: ModelParams, tau: float) -> AnalysisConstants:
    """Derive gamma(n, tau), rho, w, the sector width and the component cap.

    Natural logarithms throughout. Raises ``ValueError`` (naming the minimum
    admissible n) whenever the formulas degenerate: gamma <= 0, undefined
    iterated logarithms, or rho outside (0, R).
    """
    if tau <= 0.0:
        raise ValueError(f"tau must be positive, got {tau}")
    try:
        return _constants(params, tau)
    except ValueError as exc:
        try:
            hint = f"minimum admissible n for tau={tau}, C={params.C} is {minimum_admissible_n(tau, params.C)}"
        except ValueError:
            hint = f"no admissible n found for tau={tau}, C={params.C}"
        try:
            hint += f"; at n={params.n} tau must exceed {minimum_tau(params.n, params.C):.4g}"
        except ValueError:
            pass
        raise ValueError(f"{exc}; {hint}") from None


def _constants(params: ModelParams, tau: float) -> AnalysisConstants:
    n, R = params.n, params.R
    try:
        gamma = gamma_function(n, tau)
    except ValueError as exc:
        raise ValueError(f"analysis constants undefined for n={n}, tau={tau}: {exc}") from None
    if gamma <= 0.0:
        raise ValueError(f"gamma(n={n}, tau={tau}) = {gamma:.4g} is not positive")
    rho = R - math.log(math.pi / 2.0 * math.exp(params.C / 2.0) * gamma)
    if rho >= R:
        raise ValueError(
            f"threshold radius rho={rho:.4g} >= R={R:.4g} for n={n}, tau={tau}, C={params.C}: "
            f"needs pi/2 * e^(C/2) * gamma > 1 (gamma={gamma:.4g}); raise C or tau"
        )
    if rho <= 0.0:
        raise ValueError(f"threshold radius rho={rho:.4g} <= 0 for n={n}, tau={tau}, C={params.C}")
    width = max_angle_theta(rho, rho, R)
    return AnalysisConstants(
        tau=tau,
        gamma=gamma,
        rho=rho,
        w=math.exp(gamma) * iterated_log(n, 3),
        sector_width=width,
        n_sectors=max(1, int(TWO_PI // width)),
        component_limit=max(1, math.floor(tau * iterated_log(n, 2))),
    )
