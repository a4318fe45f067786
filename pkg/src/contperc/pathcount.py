"""Monte Carlo counts of alternating chains out of the origin, with exact oracles.

Two independent Poisson processes are sampled in a ball around the origin:
unit-ball centers at intensity lambda_1 = kappa^d / (v_d 2^d) and
large-ball centers at lambda_rho = lambda_1 / rho^d.  A chain of shape k
starts at a large ball at the origin, passes through k distinct unit-ball
centers (consecutive centers closer than 2, the first within 1 + rho of the
origin) and ends at a large-ball center within 1 + rho of the last unit
center.

Counted per trial:

* N_k, the number of distinct chain endpoints (set semantics), and
* M_k, the number of ordered chains (x_1, ..., x_k, endpoint), endpoints
  with multiplicity.

Every point that can contribute lies within 2 rho + 2 k of the origin, so a
sampling ball of that radius reproduces the infinite-volume counts and the
ordered-tuple expectation has the exact closed form
E(M_k) = (kappa^(k+1) (1+rho)^2 / (4 rho))^d for k >= 1, E(M_0) = kappa^d.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import CapacityError
from .geometry import log_unit_ball_volume, unit_ball_volume
from .rng import stream
from .util import ipow

__all__ = [
    "PathCountRun",
    "intensities",
    "tuple_expectation_exact",
    "gw_mean_bound",
    "chain_counts",
    "chain_counts_sliced",
    "count_paths",
]

_MAX_DIMENSION = 6
_MAX_K = 4
_MAX_EXPECTED_POINTS = 1e6


@dataclass(frozen=True)
class PathCountRun:
    """Means and standard errors of N_k and M_k over independent trials."""

    dimension: int
    rho: float
    kappa: float
    k: int
    trials: int
    domain_radius: float
    mean_n: float
    se_n: float
    mean_m: float
    se_m: float


def intensities(d: int, rho: float, kappa: float) -> tuple[float, float]:
    """Center intensities (lambda_1, lambda_rho) of the two processes."""
    lam1 = ipow(kappa, d) / (unit_ball_volume(d) * ipow(2.0, d))
    return lam1, lam1 / ipow(rho, d)


def tuple_expectation_exact(d: int, rho: float, kappa: float, k: int) -> float:
    """Exact expectation of the ordered-tuple count M_k.

    The multivariate Mecke formula turns the tuple sum into a product of
    ball volumes: lambda_1^k lambda_rho (v_d (1+rho)^d)^2 (v_d 2^d)^(k-1)
    for k >= 1, which simplifies to (kappa^(k+1) (1+rho)^2 / (4 rho))^d.
    Evaluated in log space.
    """
    if not isinstance(k, int) or k < 0:
        raise ValueError("k must be a non-negative integer")
    if k == 0:
        return math.exp(d * math.log(kappa))
    log_val = d * (
        (k + 1) * math.log(kappa)
        + 2.0 * math.log1p(rho)
        - math.log(4.0 * rho)
    )
    return math.exp(log_val)


def gw_mean_bound(d: int, rho: float, kappa: float, k: int) -> float:
    """Genealogy-only upper bound on E(N_k).

    Coincides with tuple_expectation_exact because the bound is derived by
    relaxing endpoint distinctness to ordered tuples.
    """
    return tuple_expectation_exact(d, rho, kappa, k)


def chain_counts(
    points_unit: np.ndarray, points_large: np.ndarray, rho: float, k: int
) -> tuple[int, int]:
    """Count (N_k, M_k) for one realization of the two point sets.

    For k = 0 both counts equal the number of large centers within 2 rho of
    the origin.  For k >= 1 a depth-first search enumerates simple chains
    of k distinct unit centers; endpoints are counted once for N_k and per
    chain for M_k.
    """
    if k == 0:
        norms2 = np.einsum("ij,ij->i", points_large, points_large)
        cnt = int((norms2 < (2.0 * rho) ** 2).sum())
        return cnt, cnt
    n1 = points_unit.shape[0]
    if n1 < k or points_large.shape[0] == 0:
        return 0, 0
    reach = 1.0 + rho
    norms2 = np.einsum("ij,ij->i", points_unit, points_unit)
    start = np.flatnonzero(norms2 < reach * reach)
    if start.size == 0:
        return 0, 0
    delta = points_unit[:, None, :] - points_large[None, :, :]
    end_mask = np.einsum("ijk,ijk->ij", delta, delta) < reach * reach
    end_counts = end_mask.sum(axis=1)
    if k == 1:
        m = int(end_counts[start].sum())
        n = int(end_mask[start].any(axis=0).sum())
        return n, m
    diff = points_unit[:, None, :] - points_unit[None, :, :]
    adj = np.einsum("ijk,ijk->ij", diff, diff) < 4.0
    np.fill_diagonal(adj, False)
    neighbors = [np.flatnonzero(adj[i]).tolist() for i in range(n1)]

    reached = np.zeros(points_large.shape[0], dtype=bool)
    m_total = 0

    def walk(node: int, depth: int, visited: set[int]) -> None:
        nonlocal m_total
        if depth == k:
            m_total += int(end_counts[node])
            reached[end_mask[node]] = True
            return
        for nxt in neighbors[node]:
            if nxt not in visited:
                visited.add(nxt)
                walk(nxt, depth + 1, visited)
                visited.remove(nxt)

    for s in start.tolist():
        walk(s, 1, {s})
    return int(reached.sum()), m_total


def chain_counts_sliced(
    points_unit: np.ndarray,
    points_large: np.ndarray,
    rho: float,
    k: int,
    n_slices: int,
) -> tuple[dict[tuple[int, ...], int], int]:
    """Tally ordered chains by the slab index of each step.

    Step i lands in the slab of its step ball indexed against the direction
    of the previous center seen from the origin; index 0 is the slab
    absorbing everything below fraction 1/n_slices (the a = 0 convention).
    Returns (per-slice counts, total M_k); the slice counts partition the
    chains, so they sum to M_k exactly.
    """
    if k < 1:
        raise ValueError("slicing needs k >= 1")
    tally: dict[tuple[int, ...], int] = {}
    n1 = points_unit.shape[0]
    if n1 < k or points_large.shape[0] == 0:
        return tally, 0
    reach = 1.0 + rho
    norms = np.sqrt(np.einsum("ij,ij->i", points_unit, points_unit))
    start = np.flatnonzero(norms < reach)
    if start.size == 0:
        return tally, 0
    delta = points_unit[:, None, :] - points_large[None, :, :]
    end_mask = np.einsum("ijk,ijk->ij", delta, delta) < reach * reach
    if k >= 2:
        diff = points_unit[:, None, :] - points_unit[None, :, :]
        adj = np.einsum("ijk,ijk->ij", diff, diff) < 4.0
        np.fill_diagonal(adj, False)
        neighbors = [np.flatnonzero(adj[i]).tolist() for i in range(n1)]
    else:
        neighbors = []

    def slab_index(origin_idx: int, target: np.ndarray, step_radius: float) -> int:
        center = points_unit[origin_idx]
        norm = norms[origin_idx]
        if norm == 0.0:
            return 0
        frac = float(np.dot(target - center, center)) / (norm * step_radius)
        if frac <= 1.0 / n_slices:
            return 0
        return min(n_slices - 1, int(math.ceil(frac * n_slices)) - 1)

    m_total = 0

    def walk(node: int, depth: int, visited: set[int], slabs: tuple[int, ...]) -> None:
        nonlocal m_total
        if depth == k:
            for endpoint in np.flatnonzero(end_mask[node]):
                key = slabs + (slab_index(node, points_large[endpoint], reach),)
                tally[key] = tally.get(key, 0) + 1
                m_total += 1
            return
        for nxt in neighbors[node]:
            if nxt not in visited:
                visited.add(nxt)
                walk(nxt, depth + 1, visited, slabs + (slab_index(node, points_unit[nxt], 2.0),))
                visited.remove(nxt)

    for s in start.tolist():
        walk(s, 1, {s}, ())
    return tally, m_total


def _uniform_ball(rng: np.random.Generator, n: int, d: int, radius: float) -> np.ndarray:
    """n points uniform in the ball of the given radius around the origin."""
    if n == 0:
        return np.empty((0, d))
    g = rng.standard_normal((n, d))
    norms = np.sqrt(np.einsum("ij,ij->i", g, g))
    norms[norms == 0.0] = 1.0
    scale = radius * rng.random(n) ** (1.0 / d) / norms
    return g * scale[:, None]


def count_paths(
    d: int,
    rho: float,
    kappa: float,
    k: int,
    trials: int,
    seed: int,
    domain_radius: float | None = None,
    chunk_size: int = 4096,
) -> PathCountRun:
    """Estimate E(N_k) and E(M_k) over independent trials.

    Trials are processed in chunks, one Philox substream per chunk; within
    a chunk the counts for both processes are drawn first, then all points
    of the chunk in one batch.
    """
    if not isinstance(d, int) or not 1 <= d <= _MAX_DIMENSION:
        raise ValueError(f"dimension must lie in 1..{_MAX_DIMENSION}")
    if not rho > 1.0:
        raise ValueError("rho must exceed 1")
    if not kappa > 0.0:
        raise ValueError("kappa must be positive")
    if not isinstance(k, int) or k < 0 or k > _MAX_K:
        raise ValueError(f"k must lie in 0..{_MAX_K}")
    if trials < 1:
        raise ValueError("trials must be positive")
    min_radius = 2.0 * rho + 2.0 * k
    if domain_radius is None:
        domain_radius = min_radius
    if domain_radius < min_radius:
        raise ValueError(f"domain radius must be at least 2 rho + 2 k = {min_radius:g}")

    lam1, lam_rho = intensities(d, rho, kappa)
    log_ball = log_unit_ball_volume(d) + d * math.log(domain_radius)
    mean1 = lam1 * math.exp(log_ball)
    mean_rho = lam_rho * math.exp(log_ball)
    if mean1 > _MAX_EXPECTED_POINTS:
        raise CapacityError(
            f"expected unit-center count per trial {mean1:.3g} exceeds {_MAX_EXPECTED_POINTS:.0e}"
        )
    if mean_rho > _MAX_EXPECTED_POINTS:
        raise CapacityError(
            f"expected large-center count per trial {mean_rho:.3g} exceeds {_MAX_EXPECTED_POINTS:.0e}"
        )

    sum_n = sumsq_n = 0.0
    sum_m = sumsq_m = 0.0
    done = 0
    chunk_index = 0
    while done < trials:
        count = min(chunk_size, trials - done)
        rng = stream(seed, chunk_index)
        counts1 = rng.poisson(mean1, count) if k >= 1 else np.zeros(count, dtype=np.int64)
        counts_rho = rng.poisson(mean_rho, count)
        pts1 = _uniform_ball(rng, int(counts1.sum()), d, domain_radius)
        pts_rho = _uniform_ball(rng, int(counts_rho.sum()), d, domain_radius)
        offs1 = np.concatenate([[0], np.cumsum(counts1)])
        offs_rho = np.concatenate([[0], np.cumsum(counts_rho)])
        for t in range(count):
            p1 = pts1[offs1[t] : offs1[t + 1]]
            pr = pts_rho[offs_rho[t] : offs_rho[t + 1]]
            n_cnt, m_cnt = chain_counts(p1, pr, rho, k)
            sum_n += n_cnt
            sumsq_n += n_cnt * n_cnt
            sum_m += m_cnt
            sumsq_m += m_cnt * m_cnt
        done += count
        chunk_index += 1

    def mean_se(total: float, total_sq: float) -> tuple[float, float]:
        mean = total / trials
        if trials < 2:
            return mean, math.inf
        var = max(0.0, (total_sq - trials * mean * mean) / (trials - 1))
        return mean, math.sqrt(var / trials)

    mean_n, se_n = mean_se(sum_n, sumsq_n)
    mean_m, se_m = mean_se(sum_m, sumsq_m)
    return PathCountRun(
        dimension=d,
        rho=rho,
        kappa=kappa,
        k=k,
        trials=trials,
        domain_radius=float(domain_radius),
        mean_n=mean_n,
        se_n=se_n,
        mean_m=mean_m,
        se_m=se_m,
    )
