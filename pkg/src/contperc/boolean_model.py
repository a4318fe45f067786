"""Boolean models driven by finite atomic radius measures in a d-dimensional box.

A configuration is a Poisson number of balls with centers uniform in a
sampling window and radii drawn independently from the mixture's atoms.
Connectivity uses open balls (strict inequality on center distances) and is
resolved with a union-find forest over candidate pairs from a uniform
spatial hash grid with cell size twice the largest radius, so intersecting
pairs can only sit in adjacent cells.  When the radius ratio is wide, that
single resolution buries the small-ball pairs in candidates, and the scan
switches to one grid per pair of radius classes sized by their exact
interaction range (see _candidate_pairs_crossing).

Boundary conventions:

* "crossing": centers are sampled in the enlarged window
  [-r_max, L + r_max)^d so balls reaching into the core box from outside
  are not under-counted; the percolation event is a single cluster touching
  both faces x_1 <= 0 and x_1 >= L.
* "torus": centers in [0, L)^d with wrapped distances; no percolation
  criterion is implemented for this boundary.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .errors import CapacityError
from .geometry import unit_ball_volume
from .rng import stream
from .util import ipow

__all__ = [
    "RadiusMixture",
    "BoxSpec",
    "BallConfiguration",
    "ClusterLabeling",
    "CoverageEstimate",
    "sample",
    "clusters",
    "percolates",
    "covered_fraction_exact",
    "covered_fraction_empirical",
    "thin_configuration",
    "dump_configuration",
    "load_configuration",
]

# Hard cap on the expected number of balls in one configuration.
MAX_EXPECTED_COUNT = 5e7

DUMP_FORMAT_VERSION = "v1"


class RadiusMixture:
    """Finite atomic radius measure: atoms (radius, weight), radii distinct.

    Atoms are kept sorted by increasing radius; the measure has total mass
    sum of weights and drives the Boolean model through the intensity
    lambda * mixture.
    """

    __slots__ = ("radii", "weights")

    def __init__(self, atoms) -> None:
        pairs = sorted((float(r), float(w)) for r, w in atoms)
        if not pairs:
            raise ValueError("mixture needs at least one atom")
        radii = np.array([r for r, _ in pairs])
        weights = np.array([w for _, w in pairs])
        if not np.all(radii > 0.0):
            raise ValueError("radii must be positive")
        if np.any(np.diff(radii) <= 0.0):
            raise ValueError("radii must be distinct")
        if not np.all(weights > 0.0):
            raise ValueError("weights must be positive")
        self.radii = radii
        self.weights = weights

    @classmethod
    def dirac(cls, radius: float, weight: float = 1.0) -> "RadiusMixture":
        return cls([(radius, weight)])

    @property
    def atoms(self) -> tuple[tuple[float, float], ...]:
        return tuple(zip(self.radii.tolist(), self.weights.tolist()))

    @property
    def total_mass(self) -> float:
        return float(self.weights.sum())

    @property
    def r_max(self) -> float:
        return float(self.radii[-1])

    @property
    def log_weights(self) -> np.ndarray:
        return np.log(self.weights)

    def moment(self, d: int) -> float:
        """Weighted d-th radius moment, sum of w_i r_i^d."""
        return float((self.weights * ipow(self.radii, d)).sum())

    def doubled_moment(self, d: int) -> float:
        """Sum of w_i (2 r_i)^d, the natural normalizer of intensities."""
        return float((self.weights * ipow(2.0 * self.radii, d)).sum())

    def scaled(self, a: float) -> "RadiusMixture":
        """Image under r -> a*r (weights unchanged)."""
        if not a > 0.0:
            raise ValueError("scale factor must be positive")
        return RadiusMixture(zip((self.radii * a).tolist(), self.weights.tolist()))

    def mass_scaled(self, c: float) -> "RadiusMixture":
        """Same atoms with all weights multiplied by c."""
        if not c > 0.0:
            raise ValueError("mass factor must be positive")
        return RadiusMixture(zip(self.radii.tolist(), (self.weights * c).tolist()))

    def __eq__(self, other) -> bool:
        return isinstance(other, RadiusMixture) and self.atoms == other.atoms

    def __repr__(self) -> str:
        inside = ", ".join(f"({r:g}, {w:g})" for r, w in self.atoms)
        return f"RadiusMixture([{inside}])"


@dataclass(frozen=True)
class BoxSpec:
    """Simulation box: dimension, side length and boundary handling."""

    dimension: int
    side: float
    boundary: str = "crossing"

    def __post_init__(self) -> None:
        if not isinstance(self.dimension, int) or self.dimension < 2:
            raise ValueError("dimension must be an integer >= 2")
        if not self.side > 0.0:
            raise ValueError("side must be positive")
        if self.boundary not in ("crossing", "torus"):
            raise ValueError("boundary must be 'crossing' or 'torus'")


@dataclass(frozen=True, eq=False)
class BallConfiguration:
    """One sampled ball process: parallel center and radius arrays.

    For the crossing boundary, centers may lie in the halo outside the core
    box (see module docstring).
    """

    centers: np.ndarray = field(repr=False)
    radii: np.ndarray = field(repr=False)
    seed: int
    lam: float

    @property
    def n(self) -> int:
        return self.centers.shape[0]


@dataclass(frozen=True, eq=False)
class ClusterLabeling:
    """Union-find result: parent[i] is the root ball index of ball i.

    Two balls share a root exactly when they are joined by a chain of
    pairwise intersecting open balls.  touches_low / touches_high mark the
    balls overlapping the two crossing faces (all False for a torus).
    """

    parent: np.ndarray = field(repr=False)
    touches_low: np.ndarray = field(repr=False)
    touches_high: np.ndarray = field(repr=False)

    @property
    def n(self) -> int:
        return self.parent.shape[0]

    def canonical_labels(self) -> np.ndarray:
        """Cluster labels renumbered by first appearance, for comparisons."""
        labels = np.full(self.n, -1, dtype=np.int64)
        next_label = 0
        seen: dict[int, int] = {}
        for i, root in enumerate(self.parent.tolist()):
            if root not in seen:
                seen[root] = next_label
                next_label += 1
            labels[i] = seen[root]
        return labels

    def cluster_count(self) -> int:
        return len(set(self.parent.tolist()))


class CoverageEstimate(NamedTuple):
    fraction: float
    stderr: float


class _UnionFind:
    __slots__ = ("parent", "size")

    def __init__(self, n: int) -> None:
        self.parent = list(range(n))
        self.size = [1] * n

    def find(self, i: int) -> int:
        parent = self.parent
        root = i
        while parent[root] != root:
            root = parent[root]
        while parent[i] != root:
            parent[i], i = root, parent[i]
        return root

    def union(self, i: int, j: int) -> None:
        ri, rj = self.find(i), self.find(j)
        if ri == rj:
            return
        if self.size[ri] < self.size[rj]:
            ri, rj = rj, ri
        self.parent[rj] = ri
        self.size[ri] += self.size[rj]

    def roots(self) -> np.ndarray:
        return np.array([self.find(i) for i in range(len(self.parent))], dtype=np.int64)


def _sampling_window(mixture: RadiusMixture, box: BoxSpec) -> tuple[float, float]:
    """Return (origin, extent) of the center-sampling window."""
    if box.boundary == "crossing":
        r = mixture.r_max
        return -r, box.side + 2.0 * r
    return 0.0, box.side


def sample(
    mixture: RadiusMixture, lam: float, box: BoxSpec, seed: int
) -> BallConfiguration:
    """Sample one Boolean model configuration, fully determined by `seed`.

    The number of balls is Poisson with mean lam * mass * window_volume,
    centers are uniform in the window (drawn in [0,1)^d and then scaled),
    and radii are i.i.d. over the atoms with probabilities w_i / mass.
    """
    if lam < 0.0:
        raise ValueError("intensity must be non-negative")
    if not box.side > 4.0 * mixture.r_max:
        raise ValueError("box side must exceed four times the largest radius")
    d = box.dimension
    origin, extent = _sampling_window(mixture, box)
    expected = lam * (mixture.total_mass * ipow(extent, d))
    if expected > MAX_EXPECTED_COUNT:
        raise CapacityError(
            f"expected ball count {expected:.3g} exceeds the cap {MAX_EXPECTED_COUNT:.0e}"
        )
    rng = stream(seed)
    count = int(rng.poisson(expected))
    unit = rng.random((count, d))
    centers = origin + unit * extent
    if len(mixture.radii) == 1:
        radii = np.full(count, mixture.radii[0])
    else:
        probs = mixture.weights / mixture.total_mass
        idx = rng.choice(len(mixture.radii), size=count, p=probs)
        radii = mixture.radii[idx]
    return BallConfiguration(centers=centers, radii=radii, seed=int(seed), lam=float(lam))


def _expand_ranges(lo: np.ndarray, hi: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Flatten per-row index ranges [lo_i, hi_i) into (row, position) pairs."""
    counts = np.maximum(hi - lo, 0)
    total = int(counts.sum())
    if total == 0:
        empty = np.empty(0, dtype=np.int64)
        return empty, empty
    rows = np.repeat(np.arange(lo.shape[0], dtype=np.int64), counts)
    run_starts = np.cumsum(counts) - counts
    positions = np.arange(total, dtype=np.int64) - np.repeat(run_starts, counts) + np.repeat(lo, counts)
    return rows, positions


def _half_offsets(d: int) -> list[tuple[int, ...]]:
    """Nonzero offsets in {-1,0,1}^d whose first nonzero entry is +1."""
    out = []
    for off in itertools.product((-1, 0, 1), repeat=d):
        for v in off:
            if v > 0:
                out.append(off)
                break
            if v < 0:
                break
    return out


def _grid_encoding(coords: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Collision-free integer keys for cell coordinates, plus the strides.

    Coordinates are shifted to leave one spare cell on each side so that
    +-1 neighbor offsets in the key arithmetic never wrap across axes.
    """
    d = coords.shape[1]
    shifted = coords - (coords.min(axis=0) - 1)
    sizes = shifted.max(axis=0) + 2
    if float(np.prod(sizes.astype(float))) > 2.0**62:
        raise CapacityError("spatial hash grid is too large to index")
    strides = np.ones(d, dtype=np.int64)
    for axis in range(d - 2, -1, -1):
        strides[axis] = strides[axis + 1] * sizes[axis + 1]
    return shifted @ strides, strides


def _grid_pairs_crossing(centers: np.ndarray, cell: float) -> tuple[np.ndarray, np.ndarray]:
    """Candidate index pairs (i < j in scan order) from the uniform hash grid."""
    n, d = centers.shape
    key, strides = _grid_encoding(np.floor(centers / cell).astype(np.int64))
    order = np.argsort(key, kind="stable")
    ks = key[order]

    pair_a: list[np.ndarray] = []
    pair_b: list[np.ndarray] = []

    # Within-cell pairs: each sorted position against the rest of its segment.
    new_seg = np.r_[True, ks[1:] != ks[:-1]]
    seg_start = np.flatnonzero(new_seg)
    seg_id = np.cumsum(new_seg) - 1
    seg_end = np.r_[seg_start[1:], n]
    lo = np.arange(n, dtype=np.int64) + 1
    hi = seg_end[seg_id]
    rows, positions = _expand_ranges(lo, hi)
    if rows.size:
        pair_a.append(order[rows])
        pair_b.append(order[positions])

    # Cross-cell pairs for half of the neighbor offsets.
    for off in _half_offsets(d):
        code = int(np.dot(np.asarray(off, dtype=np.int64), strides))
        target = ks + code
        lo = np.searchsorted(ks, target, side="left")
        hi = np.searchsorted(ks, target, side="right")
        rows, positions = _expand_ranges(lo, hi)
        if rows.size:
            pair_a.append(order[rows])
            pair_b.append(order[positions])

    if not pair_a:
        empty = np.empty(0, dtype=np.int64)
        return empty, empty
    return np.concatenate(pair_a), np.concatenate(pair_b)


def _cross_set_pairs(
    pts_a: np.ndarray, pts_b: np.ndarray, cell: float
) -> tuple[np.ndarray, np.ndarray]:
    """Candidate pairs between two disjoint point sets within one grid cell."""
    d = pts_a.shape[1]
    coords = np.floor(np.vstack([pts_a, pts_b]) / cell).astype(np.int64)
    key, strides = _grid_encoding(coords)
    key_a = key[: pts_a.shape[0]]
    key_b = key[pts_a.shape[0] :]
    order = np.argsort(key_b, kind="stable")
    ks = key_b[order]
    out_a: list[np.ndarray] = []
    out_b: list[np.ndarray] = []
    for off in itertools.product((-1, 0, 1), repeat=d):
        code = int(np.dot(np.asarray(off, dtype=np.int64), strides))
        target = key_a + code
        lo = np.searchsorted(ks, target, side="left")
        hi = np.searchsorted(ks, target, side="right")
        rows, positions = _expand_ranges(lo, hi)
        if rows.size:
            out_a.append(rows)
            out_b.append(order[positions])
    if not out_a:
        empty = np.empty(0, dtype=np.int64)
        return empty, empty
    return np.concatenate(out_a), np.concatenate(out_b)


# A mixed-radius configuration with more distinct radii than this falls back
# to the single-resolution grid.
_MAX_RADIUS_CLASSES = 8

# Radius ratio above which the single-resolution grid's candidate volume is
# considered pathological and the per-class-pair grids take over.
_CLASS_PAIR_RATIO = 2.0


def _candidate_pairs_crossing(
    centers: np.ndarray, radii: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Candidate intersecting pairs for the crossing boundary.

    Monodisperse configurations use the uniform grid with cell size twice
    the radius.  For mixed radii with a wide ratio, one uniform grid sized
    by the largest radius drowns the small-ball pairs in candidates, so
    each ordered pair of radius classes (u, v) is scanned on its own grid
    with cell size r_u + r_v, the exact interaction range of that class
    pair.  The union of candidates still covers every intersecting pair.
    """
    unique_r, class_idx = np.unique(radii, return_inverse=True)
    r_max = float(unique_r[-1])
    if (
        len(unique_r) == 1
        or len(unique_r) > _MAX_RADIUS_CLASSES
        or r_max / float(unique_r[0]) <= _CLASS_PAIR_RATIO
    ):
        return _grid_pairs_crossing(centers, 2.0 * r_max)

    members = [np.flatnonzero(class_idx == c) for c in range(len(unique_r))]
    pair_a: list[np.ndarray] = []
    pair_b: list[np.ndarray] = []
    for u in range(len(unique_r)):
        if members[u].size == 0:
            continue
        ia, ib = _grid_pairs_crossing(centers[members[u]], 2.0 * float(unique_r[u]))
        if ia.size:
            pair_a.append(members[u][ia])
            pair_b.append(members[u][ib])
        for v in range(u + 1, len(unique_r)):
            if members[v].size == 0:
                continue
            cell = float(unique_r[u]) + float(unique_r[v])
            ia, ib = _cross_set_pairs(centers[members[u]], centers[members[v]], cell)
            if ia.size:
                pair_a.append(members[u][ia])
                pair_b.append(members[v][ib])
    if not pair_a:
        empty = np.empty(0, dtype=np.int64)
        return empty, empty
    return np.concatenate(pair_a), np.concatenate(pair_b)


def _grid_pairs_torus(
    centers: np.ndarray, cell: float, side: float
) -> tuple[np.ndarray, np.ndarray]:
    """Candidate pairs on the torus via a wrapped cell dictionary."""
    n, d = centers.shape
    m = int(side // cell)
    if m < 3:
        i, j = np.triu_indices(n, k=1)
        return i.astype(np.int64), j.astype(np.int64)
    cell_t = side / m
    coords = np.minimum(np.floor(centers / cell_t).astype(np.int64), m - 1)
    cells: dict[tuple[int, ...], list[int]] = {}
    for idx, c in enumerate(map(tuple, coords.tolist())):
        cells.setdefault(c, []).append(idx)
    offsets = _half_offsets(d)
    pair_a: list[int] = []
    pair_b: list[int] = []
    for c, members in cells.items():
        for pos, i in enumerate(members):
            for j in members[pos + 1 :]:
                pair_a.append(i)
                pair_b.append(j)
        for off in offsets:
            neighbor = tuple((c[axis] + off[axis]) % m for axis in range(d))
            other = cells.get(neighbor)
            if other:
                for i in members:
                    for j in other:
                        pair_a.append(i)
                        pair_b.append(j)
    return np.asarray(pair_a, dtype=np.int64), np.asarray(pair_b, dtype=np.int64)


def clusters(config: BallConfiguration, box: BoxSpec) -> ClusterLabeling:
    """Label intersecting-ball clusters with union-find over grid candidates."""
    n = config.n
    d = box.dimension
    if n == 0:
        empty_i = np.empty(0, dtype=np.int64)
        empty_b = np.empty(0, dtype=bool)
        return ClusterLabeling(parent=empty_i, touches_low=empty_b, touches_high=empty_b)
    centers = config.centers
    radii = config.radii

    if box.boundary == "crossing":
        ia, ib = _candidate_pairs_crossing(centers, radii)
        wrap = None
    else:
        ia, ib = _grid_pairs_torus(centers, 2.0 * float(radii.max()), box.side)
        wrap = box.side
    dist2 = np.zeros(ia.shape[0])
    for axis in range(d):
        x = centers[:, axis]
        diff = x[ia] - x[ib]
        if wrap is not None:
            np.abs(diff, out=diff)
            np.minimum(diff, wrap - diff, out=diff)
        dist2 += diff * diff
    rsum = radii[ia] + radii[ib]
    hit = dist2 < rsum * rsum

    uf = _UnionFind(n)
    for i, j in zip(ia[hit].tolist(), ib[hit].tolist()):
        uf.union(i, j)
    parent = uf.roots()

    if box.boundary == "crossing":
        touches_low = centers[:, 0] < radii
        touches_high = centers[:, 0] + radii > box.side
    else:
        touches_low = np.zeros(n, dtype=bool)
        touches_high = np.zeros(n, dtype=bool)
    return ClusterLabeling(parent=parent, touches_low=touches_low, touches_high=touches_high)


def percolates(labeling: ClusterLabeling, config: BallConfiguration, box: BoxSpec) -> bool:
    """True if one cluster overlaps both the x_1 <= 0 and x_1 >= L faces."""
    if box.boundary != "crossing":
        raise NotImplementedError("percolation criterion is defined for the crossing boundary only")
    if labeling.n == 0:
        return False
    low_roots = set(labeling.parent[labeling.touches_low].tolist())
    if not low_roots:
        return False
    high_roots = set(labeling.parent[labeling.touches_high].tolist())
    return not low_roots.isdisjoint(high_roots)


def covered_fraction_exact(mixture: RadiusMixture, lam: float, d: int) -> float:
    """Fraction of space covered: 1 - exp(-lam * v_d * sum w_i r_i^d)."""
    if lam < 0.0:
        raise ValueError("intensity must be non-negative")
    if not isinstance(d, int) or d < 1:
        raise ValueError("dimension must be a positive integer")
    return -math.expm1(-lam * unit_ball_volume(d) * mixture.moment(d))


def covered_fraction_empirical(
    config: BallConfiguration, box: BoxSpec, probes: int, seed: int
) -> CoverageEstimate:
    """Estimate coverage by uniform probe points in the core box [0, L)^d.

    Returns the hit fraction and its binomial standard error
    sqrt(p(1-p)/probes).
    """
    if probes < 1:
        raise ValueError("need at least one probe point")
    d = box.dimension
    rng = stream(seed)
    points = rng.random((probes, d)) * box.side
    if config.n == 0:
        return CoverageEstimate(0.0, 0.0)
    covered = np.zeros(probes, dtype=bool)
    if box.boundary == "torus":
        chunk = max(1, int(2_000_000 // max(config.n, 1)))
        for start in range(0, probes, chunk):
            pts = points[start : start + chunk]
            delta = np.abs(pts[:, None, :] - config.centers[None, :, :])
            delta = np.minimum(delta, box.side - delta)
            dist2 = np.einsum("pnd,pnd->pn", delta, delta)
            covered[start : start + chunk] = (dist2 < config.radii**2).any(axis=1)
    else:
        cell = 2.0 * float(config.radii.max())
        pi, bi = _point_ball_candidates(points, config.centers, cell)
        if pi.size:
            delta = points[pi] - config.centers[bi]
            dist2 = np.einsum("ij,ij->i", delta, delta)
            hit = dist2 < config.radii[bi] ** 2
            covered[pi[hit]] = True
    p_hat = float(covered.mean())
    stderr = math.sqrt(p_hat * (1.0 - p_hat) / probes)
    return CoverageEstimate(p_hat, stderr)


def _point_ball_candidates(
    points: np.ndarray, centers: np.ndarray, cell: float
) -> tuple[np.ndarray, np.ndarray]:
    """(point, ball) candidate pairs whose cells are adjacent in the grid."""
    return _cross_set_pairs(points, centers, cell)


def thin_configuration(
    config: BallConfiguration, keep_prob: float, seed: int
) -> BallConfiguration:
    """Keep each ball independently with probability keep_prob.

    Thinning a configuration sampled at intensity lam yields the sampling
    distribution at keep_prob * lam and is a subset of the original, which
    makes percolation monotone along the coupling.
    """
    if not 0.0 <= keep_prob <= 1.0:
        raise ValueError("keep probability must lie in [0, 1]")
    rng = stream(seed)
    keep = rng.random(config.n) < keep_prob
    return BallConfiguration(
        centers=config.centers[keep],
        radii=config.radii[keep],
        seed=config.seed,
        lam=config.lam * keep_prob,
    )


def dump_configuration(config: BallConfiguration, box: BoxSpec, fp) -> None:
    """Write one ball per line, 'x_1 ... x_d r', after a self-describing header."""
    own = isinstance(fp, (str, bytes))
    handle = open(fp, "w") if own else fp
    try:
        handle.write(
            f"#contperc {DUMP_FORMAT_VERSION} d={box.dimension} L={box.side!r} seed={config.seed}\n"
        )
        for row, r in zip(config.centers, config.radii):
            cols = " ".join(f"{x:.17g}" for x in row)
            handle.write(f"{cols} {r:.17g}\n")
    finally:
        if own:
            handle.close()


def load_configuration(fp) -> tuple[BallConfiguration, BoxSpec]:
    """Read a configuration written by dump_configuration.

    The intensity is not part of the format; the returned configuration
    carries lam = nan.  The boundary is assumed to be "crossing".
    """
    own = isinstance(fp, (str, bytes))
    handle = open(fp, "r") if own else fp
    try:
        header = handle.readline().strip()
        parts = header.split()
        if len(parts) != 5 or parts[0] != "#contperc" or parts[1] != DUMP_FORMAT_VERSION:
            raise ValueError(f"unrecognized configuration header: {header!r}")
        meta = dict(p.split("=", 1) for p in parts[2:])
        d = int(meta["d"])
        side = float(meta["L"])
        seed = int(meta["seed"])
        rows = [[float(tok) for tok in line.split()] for line in handle if line.strip()]
    finally:
        if own:
            handle.close()
    if rows:
        data = np.asarray(rows)
        if data.shape[1] != d + 1:
            raise ValueError("configuration rows do not match the header dimension")
        centers, radii = data[:, :d], data[:, d]
    else:
        centers = np.empty((0, d))
        radii = np.empty(0)
    config = BallConfiguration(centers=centers, radii=radii, seed=seed, lam=math.nan)
    return config, BoxSpec(dimension=d, side=side, boundary="crossing")
