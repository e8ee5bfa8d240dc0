"""Domination machinery and reference-direction survival selection.

All objective vectors are minimization-convention rows of a float array.
``survive`` implements the classic reference-point niching: whole fronts
are accepted until one must be split; the split front competes for the
remaining slots through perpendicular-distance association to a fixed set
of unit-simplex directions anchored at the ideal point.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_EPS = 1e-12


def dominates(a, b) -> bool:
    """True iff a is no worse than b everywhere and better somewhere."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return bool(np.all(a <= b) and np.any(a < b))


def domination_matrix(objectives: np.ndarray) -> np.ndarray:
    """Boolean matrix D with D[i, j] = row i dominates row j."""
    F = np.asarray(objectives, dtype=float)
    le = (F[:, None, :] <= F[None, :, :]).all(-1)
    lt = (F[:, None, :] < F[None, :, :]).any(-1)
    return le & lt


def non_dominated_sort(objectives: np.ndarray) -> list[np.ndarray]:
    """Partition row indices into fronts of mutually non-dominated rows."""
    F = np.asarray(objectives, dtype=float)
    if F.ndim != 2 or len(F) == 0:
        raise ValueError("objectives must be a non-empty 2-d array")
    dom = domination_matrix(F)
    remaining = np.ones(len(F), dtype=bool)
    fronts: list[np.ndarray] = []
    while remaining.any():
        idx = np.flatnonzero(remaining)
        sub = dom[np.ix_(idx, idx)]
        front = idx[sub.sum(axis=0) == 0]
        fronts.append(front)
        remaining[front] = False
    return fronts


def non_dominated(objectives: np.ndarray) -> np.ndarray:
    """Indices of the rank-0 front."""
    return non_dominated_sort(objectives)[0]


def das_dennis(m: int, partitions: int) -> np.ndarray:
    """All points (i_1/H, ..., i_m/H) with non-negative integers summing to H.

    Returns an array of shape (C(H+m-1, m-1), m) in lexicographic order of
    the integer compositions.
    """
    if m < 2:
        raise ValueError("need at least 2 objectives")
    if partitions < 1:
        raise ValueError("need at least 1 partition")

    def compositions(total: int, parts: int):
        if parts == 1:
            yield (total,)
            return
        for head in range(total + 1):
            for tail in compositions(total - head, parts - 1):
                yield (head,) + tail

    points = np.array(list(compositions(partitions, m)), dtype=float)
    return points / partitions


def direction_count(m: int, partitions: int) -> int:
    from math import comb

    return comb(partitions + m - 1, m - 1)


def default_partitions(m: int, target: int) -> int:
    """Largest H whose direction count stays within ``target`` (min 1)."""
    h = 1
    while direction_count(m, h + 1) <= target:
        h += 1
    return h


def perpendicular_distances(points: np.ndarray, directions: np.ndarray) -> np.ndarray:
    """Distance of each point to the ray through each direction, (n, n_dir)."""
    P = np.asarray(points, dtype=float)
    Z = np.asarray(directions, dtype=float)
    unit = Z / np.linalg.norm(Z, axis=1, keepdims=True)
    proj = P @ unit.T
    sq = np.maximum(np.sum(P * P, axis=1, keepdims=True) - proj**2, 0.0)
    return np.sqrt(sq)


@dataclass
class SurvivalResult:
    """Selected member indices (into the input rows) with annotations."""

    indices: np.ndarray     # selected row indices, in acceptance order
    ranks: np.ndarray       # non-domination rank per selected member
    distances: np.ndarray   # perpendicular distance to the associated direction


def survive(
    objectives: np.ndarray,
    n_survive: int,
    directions: np.ndarray,
    rng: np.random.Generator,
) -> SurvivalResult:
    """Reference-direction survival of ``n_survive`` rows.

    Normalization maps the ideal point (componentwise minimum of all rows)
    to the origin and the nadir estimate (componentwise maximum over the
    accepted fronts plus the split front) to 1; degenerate spans fall back
    to 1.  Niche counts come from the accepted members only.

    Randomness protocol (kept minimal and documented so an external
    reference implementation can replay it with a shared generator): each
    niching round draws one index among the minimal-niche-count directions
    via ``rng.integers``; a direction with an empty candidate list is then
    retired; otherwise a zero-count direction takes its closest candidate
    (ties by input order, no draw) and a positive-count direction draws one
    candidate index via ``rng.integers``.
    """
    F = np.asarray(objectives, dtype=float)
    n = len(F)
    if n < n_survive:
        raise ValueError(f"cannot select {n_survive} from {n} rows")

    fronts = non_dominated_sort(F)
    ranks = np.empty(n, dtype=np.int64)
    for r, front in enumerate(fronts):
        ranks[front] = r

    accepted: list[int] = []
    li = 0
    while li < len(fronts) and len(accepted) + len(fronts[li]) < n_survive:
        accepted.extend(int(i) for i in fronts[li])
        li += 1
    split = [int(i) for i in fronts[li]] if li < len(fronts) else []

    considered = accepted + split
    ideal = F.min(axis=0)
    nadir = F[considered].max(axis=0)
    span = nadir - ideal
    span[span <= _EPS] = 1.0
    normed = (F[considered] - ideal) / span

    dists = perpendicular_distances(normed, directions)
    assoc = dists.argmin(axis=1)
    assoc_dist = dists[np.arange(len(considered)), assoc]
    dist_of = dict(zip(considered, assoc_dist))
    assoc_of = dict(zip(considered, assoc))

    selected = list(accepted)
    if len(selected) + len(split) == n_survive:
        selected.extend(split)
    elif len(selected) < n_survive:
        rho = np.zeros(len(directions), dtype=np.int64)
        for i in accepted:
            rho[assoc_of[i]] += 1
        candidates: dict[int, list[int]] = {d: [] for d in range(len(directions))}
        for i in split:
            candidates[assoc_of[i]].append(i)
        alive = np.ones(len(directions), dtype=bool)
        while len(selected) < n_survive:
            live = np.flatnonzero(alive)
            tied = live[rho[live] == rho[live].min()]
            d = int(tied[rng.integers(len(tied))])
            cands = candidates[d]
            if not cands:
                alive[d] = False
                continue
            if rho[d] == 0:
                pick = min(cands, key=lambda i: dist_of[i])
            else:
                pick = cands[rng.integers(len(cands))]
            cands.remove(pick)
            selected.append(pick)
            rho[d] += 1

    idx = np.array(selected, dtype=np.int64)
    return SurvivalResult(
        indices=idx,
        ranks=ranks[idx],
        distances=np.array([dist_of[int(i)] for i in idx]),
    )
