"""Minimax threshold constants for alternating paths in two-radius Boolean models.

For a radius ratio rho > 1 and a path shape parameter k >= 1, the constant
kappa_c(rho, k) is the infimum over radial offsets (a_2, ..., a_{k+1}) in
[0, 1)^k of the larger of two terms:

* a genealogy term, the growth rate of the associated branching process,
  (4 rho / ((1+rho)^2 sqrt(prod(1 - a_i^2))))^(1/(k+1)),
* a geometry term, 2 rho / D(a), where D(a) is the distance reached after
  k+1 steps of the law-of-cosines recursion with the given offsets.

The genealogy term increases and the geometry term decreases in every
offset, so the objective is a max of two monotone surfaces and the optimum
sits either at the zero-offset boundary or on the crossing set.  The
optimizer is a coarse grid followed by Nelder-Mead refinement; gradient
methods are avoided because the max is not differentiable on the crossing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize
from scipy.stats import qmc

from .errors import CapacityError

__all__ = [
    "AlternationParams",
    "DistanceProfile",
    "KappaResult",
    "distance_profile",
    "objective",
    "kappa_c_k",
    "kappa_c",
    "kappa_c1_closed_form",
    "genealogy_envelope",
    "k2_crossover_rho",
]

# Offsets live in [0, 1 - _EDGE]; the genealogy term diverges at 1 so the
# infimum is never on the excluded boundary.
_EDGE = 1e-9
_MAX_K = 12
_GRID_STEP = 0.02
_LHS_POINTS = 4096
_REFINE_TOL = 1e-9


@dataclass(frozen=True)
class AlternationParams:
    """Radius ratio, path shape and radial offsets of one candidate path."""

    rho: float
    k: int
    offsets: tuple[float, ...]

    def __post_init__(self) -> None:
        if not self.rho > 1.0:
            raise ValueError("rho must exceed 1")
        if not isinstance(self.k, int) or self.k < 1:
            raise ValueError("k must be a positive integer")
        if len(self.offsets) != self.k:
            raise ValueError("expected one offset per step, k in total")
        if any(not (0.0 <= a < 1.0) for a in self.offsets):
            raise ValueError("offsets must lie in [0, 1)")


@dataclass(frozen=True)
class DistanceProfile:
    """Increasing distances (d_1, ..., d_{k+1}) reached along a path."""

    distances: tuple[float, ...]

    def __post_init__(self) -> None:
        if any(b <= a for a, b in zip(self.distances, self.distances[1:])):
            raise ValueError("distances must be strictly increasing")

    @property
    def final(self) -> float:
        return self.distances[-1]


@dataclass(frozen=True)
class KappaResult:
    """Optimized threshold constant with the offsets achieving it."""

    kappa: float
    offsets: tuple[float, ...]
    branch_values: tuple[float, float]
    k_used: int
    certified: bool | None = None


def _step_radii(rho: float, k: int) -> list[float]:
    # Step radii r_2 ... r_{k+1}: interior steps link unit balls (radius sum
    # 2), the final step reaches a ball of the large radius (sum 1 + rho).
    return [2.0] * (k - 1) + [1.0 + rho]


def distance_profile(params: AlternationParams) -> DistanceProfile:
    """Build the distance sequence d_i for the given offsets.

    d_1 = 1 + rho and d_i^2 = d_{i-1}^2 + 2 r_i a_i d_{i-1} + r_i^2, the
    law of cosines for a step of length r_i leaving at radial offset a_i.
    """
    rho = params.rho
    dists = [1.0 + rho]
    for r_i, a_i in zip(_step_radii(rho, params.k), params.offsets):
        prev = dists[-1]
        dists.append(math.sqrt(prev * prev + 2.0 * r_i * a_i * prev + r_i * r_i))
    return DistanceProfile(tuple(dists))


def objective(params: AlternationParams) -> tuple[float, float]:
    """Return (genealogy_term, geometry_term); the caller takes the max."""
    rho, k = params.rho, params.k
    prod = 1.0
    for a in params.offsets:
        prod *= (1.0 - a) * (1.0 + a)
    genealogy = (4.0 * rho / ((1.0 + rho) ** 2 * math.sqrt(prod))) ** (1.0 / (k + 1))
    geometry = 2.0 * rho / distance_profile(params).final
    return genealogy, geometry


def genealogy_envelope(rho: float, k: int) -> float:
    """Zero-offset lower bound (4 rho / (1+rho)^2)^(1/(k+1)) for kappa_c(rho, k)."""
    return (4.0 * rho / (1.0 + rho) ** 2) ** (1.0 / (k + 1))


def _objective_grid(rho: float, k: int, offsets: np.ndarray) -> np.ndarray:
    """Vectorized max(genealogy, geometry) over rows of an offsets array."""
    offsets = np.asarray(offsets, dtype=float)
    prod = np.prod(1.0 - offsets * offsets, axis=1)
    genealogy = (4.0 * rho / ((1.0 + rho) ** 2 * np.sqrt(prod))) ** (1.0 / (k + 1))
    dist = np.full(offsets.shape[0], 1.0 + rho)
    for j, r_i in enumerate(_step_radii(rho, k)):
        dist = np.sqrt(dist * dist + 2.0 * r_i * offsets[:, j] * dist + r_i * r_i)
    geometry = 2.0 * rho / dist
    return np.maximum(genealogy, geometry)


def kappa_c_k(rho: float, k: int, seed: int = 0) -> KappaResult:
    """Minimize the alternating-path objective over offsets in [0, 1)^k.

    Coarse stage: a full grid with step 0.02 per coordinate for k <= 3,
    Latin-hypercube seeding beyond that.  The best candidates are refined
    with Nelder-Mead to an objective tolerance of about 1e-9.
    """
    if not rho > 1.0:
        raise ValueError("rho must exceed 1")
    if not isinstance(k, int) or k < 1:
        raise ValueError("k must be a positive integer")
    if k > _MAX_K:
        raise CapacityError(
            f"k={k} exceeds the supported maximum {_MAX_K}: "
            "the coarse grid stage grows exponentially with k"
        )

    if k <= 3:
        axis = np.arange(0.0, 1.0, _GRID_STEP)
        grids = np.meshgrid(*([axis] * k), indexing="ij")
        candidates = np.stack([g.ravel() for g in grids], axis=1)
    else:
        sampler = qmc.LatinHypercube(d=k, seed=seed)
        candidates = sampler.random(_LHS_POINTS) * (1.0 - _EDGE)
        candidates = np.vstack([candidates, np.zeros((1, k))])

    values = _objective_grid(rho, k, candidates)
    order = np.argsort(values)

    def fun(x: np.ndarray) -> float:
        x = np.clip(x, 0.0, 1.0 - _EDGE)
        return float(_objective_grid(rho, k, x[None, :])[0])

    best_x = candidates[order[0]]
    best_f = float(values[order[0]])
    bounds = [(0.0, 1.0 - _EDGE)] * k
    for idx in order[:3]:
        x0 = candidates[idx]
        for _ in range(2):  # one restart from the previous optimum
            res = minimize(
                fun,
                x0,
                method="Nelder-Mead",
                bounds=bounds,
                options={
                    "xatol": 1e-10,
                    "fatol": _REFINE_TOL * 1e-3,
                    "maxfev": 4000 * k,
                },
            )
            x0 = np.clip(res.x, 0.0, 1.0 - _EDGE)
            if res.fun < best_f:
                best_f = float(res.fun)
                best_x = x0

    params = AlternationParams(rho, k, tuple(float(a) for a in best_x))
    branches = objective(params)
    return KappaResult(
        kappa=max(branches),
        offsets=params.offsets,
        branch_values=branches,
        k_used=k,
    )


def kappa_c(rho: float, k_max: int = 6, seed: int = 0) -> KappaResult:
    """Minimum of kappa_c_k over k = 1 .. k_max, with a truncation certificate.

    The zero-offset envelope (4 rho/(1+rho)^2)^(1/(k+1)) increases with k,
    so the result is certified complete if the envelope at k_max + 1
    already exceeds the minimum found: every k > k_max then costs at least
    that much.  Otherwise the result is flagged uncertified.
    """
    if not isinstance(k_max, int) or not 1 <= k_max <= _MAX_K:
        raise ValueError(f"k_max must lie in 1..{_MAX_K}")
    best: KappaResult | None = None
    for k in range(1, k_max + 1):
        result = kappa_c_k(rho, k, seed=seed)
        if best is None or result.kappa < best.kappa:
            best = result
    assert best is not None
    certified = genealogy_envelope(rho, k_max + 1) >= best.kappa
    return KappaResult(
        kappa=best.kappa,
        offsets=best.offsets,
        branch_values=best.branch_values,
        k_used=best.k_used,
        certified=certified,
    )


def kappa_c1_closed_form(rho: float) -> float:
    """Closed form of kappa_c(rho, 1).

    2 sqrt(rho)/(1+rho) for rho <= 2 (zero-offset optimum) and
    sqrt(4 + rho^2)/(1+rho) for rho >= 2 (optimum on the branch crossing,
    at offset (rho^2 - 4)/(rho^2 + 4)); the two branches agree at rho = 2.
    """
    if not rho > 1.0:
        raise ValueError("rho must exceed 1")
    if rho <= 2.0:
        return 2.0 * math.sqrt(rho) / (1.0 + rho)
    return math.sqrt(4.0 + rho * rho) / (1.0 + rho)


def k2_crossover_rho(
    rho_lo: float = 2.0, rho_hi: float = 12.0, tol: float = 1e-3, seed: int = 0
) -> float:
    """Numerically locate where kappa_c(rho, 2) first drops below kappa_c(rho, 1).

    Bisection on the sign of kappa_c_k(rho, 2) - kappa_c_k(rho, 1).  This is
    an empirical crossover estimate only; no claim is made that the k = 1
    optimum stays global all the way up to this point.
    """

    def gap(rho: float) -> float:
        return kappa_c_k(rho, 2, seed=seed).kappa - kappa_c_k(rho, 1, seed=seed).kappa

    lo, hi = rho_lo, rho_hi
    if gap(lo) <= 0.0:
        return lo
    if gap(hi) > 0.0:
        raise ValueError("no crossover inside the given interval")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if gap(mid) > 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
