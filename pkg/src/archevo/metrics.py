"""Front-quality indicators and the a-posteriori trade-off decision."""

from __future__ import annotations

import warnings

import numpy as np
from scipy.spatial.distance import cdist

from .selection import domination_matrix

MAX_HV_OBJECTIVES = 4


def _prune_dominated(points: np.ndarray) -> np.ndarray:
    if len(points) <= 1:
        return points
    dom = domination_matrix(points)
    return points[dom.sum(axis=0) == 0]


def _hv_recursive(points: np.ndarray, ref: np.ndarray) -> float:
    m = points.shape[1]
    if m == 1:
        return float(ref[0] - points[:, 0].min())
    if m == 2:
        order = np.argsort(points[:, 0])
        best = ref[1]
        total = 0.0
        for i in order:
            f0, f1 = points[i]
            if f1 < best:
                total += (ref[0] - f0) * (best - f1)
                best = f1
        return float(total)
    # slice along the last objective
    order = np.argsort(points[:, -1])
    total = 0.0
    for k, i in enumerate(order):
        z = points[i, -1]
        z_next = points[order[k + 1], -1] if k + 1 < len(order) else ref[-1]
        if z_next <= z:
            continue
        active = _prune_dominated(points[order[: k + 1], :-1])
        total += _hv_recursive(active, ref[:-1]) * (z_next - z)
    return float(total)


def hypervolume(front, ref) -> float:
    """Exact Lebesgue measure of the region dominated by ``front`` w.r.t. ``ref``.

    Supports 2 to 4 objectives (use IGD beyond that).  Points that do not
    strictly dominate the reference point are dropped with a warning.
    """
    F = np.atleast_2d(np.asarray(front, dtype=float))
    r = np.asarray(ref, dtype=float)
    m = len(r)
    if F.shape[1] != m:
        raise ValueError("front and reference point dimensions differ")
    if not 2 <= m <= MAX_HV_OBJECTIVES:
        raise ValueError(
            f"hypervolume supports 2..{MAX_HV_OBJECTIVES} objectives, got {m}"
        )
    keep = (F < r).all(axis=1)
    if not keep.all():
        warnings.warn(f"dropped {int((~keep).sum())} points not dominating the reference")
    F = F[keep]
    if len(F) == 0:
        return 0.0
    return _hv_recursive(_prune_dominated(F), r)


def igd(obtained, reference_front) -> float:
    """Mean distance from each reference point to its nearest obtained point."""
    A = np.atleast_2d(np.asarray(obtained, dtype=float))
    Z = np.atleast_2d(np.asarray(reference_front, dtype=float))
    if len(A) == 0 or len(Z) == 0:
        raise ValueError("both point sets must be non-empty")
    return float(cdist(Z, A).min(axis=1).mean())


def trade_off_scores(front) -> tuple[np.ndarray, bool]:
    """Average-loss-per-unit-average-gain score of each front member.

    For each member the score is the worst ratio of average loss to average
    gain over its m nearest neighbours in min-max-normalized space (average
    = sum of the changed amounts divided by the count of objectives that
    changed in that direction).  Neighbour pairs with zero gain are
    skipped.  Returns (scores, preferred_exists) where the flag is set when
    the top score exceeds mean + 3 std of all the other scores.
    """
    F = np.atleast_2d(np.asarray(front, dtype=float))
    n, m = F.shape
    if n < m + 1:
        raise ValueError(f"need at least m+1={m + 1} front members, got {n}")
    dom = domination_matrix(F)
    if dom.any():
        raise ValueError("front members must be mutually non-dominated")

    span = F.max(axis=0) - F.min(axis=0)
    if np.all(span <= 0):
        return np.full(n, np.nan), False
    span = np.where(span <= 0, 1.0, span)
    N = (F - F.min(axis=0)) / span

    dists = cdist(N, N)
    np.fill_diagonal(dists, np.inf)
    scores = np.zeros(n)
    for i in range(n):
        neighbours = np.argsort(dists[i], kind="stable")[:m]
        best = 0.0
        for j in neighbours:
            diff = N[j] - N[i]
            loss_count = int((diff > 0).sum())
            gain_count = int((diff < 0).sum())
            gain_sum = float(-diff[diff < 0].sum())
            if gain_count == 0 or gain_sum <= 0:
                continue
            loss_sum = float(diff[diff > 0].sum())
            avg_loss = loss_sum / loss_count if loss_count else 0.0
            avg_gain = gain_sum / gain_count
            best = max(best, avg_loss / avg_gain)
        scores[i] = best

    top = int(np.argmax(scores))
    rest = np.delete(scores, top)
    preferred = bool(scores[top] > rest.mean() + 3.0 * rest.std())
    return scores, preferred
