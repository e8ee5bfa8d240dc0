"""Online accuracy predictor: RBF interpolation and a bagged ensemble.

Each member of the ensemble is a Gaussian-kernel RBF regressor fit on a
random row subset (80% without replacement) and a random feature subset
(between half and all of the genome positions) of the archive; prediction
is the plain mean over members.  This is deliberately small-sample
machinery: the archive holds a few hundred truly evaluated genomes at most.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial.distance import cdist
from scipy.stats import rankdata

DEFAULT_RIDGE = 1e-2
ROW_FRACTION = 0.8


class SurrogateError(RuntimeError):
    """Raised when a regressor cannot be fit (e.g. duplicate-only data)."""


@dataclass
class RbfModel:
    """Gaussian RBF interpolant on a feature subset of the genome.

    Inputs are min-max scaled per feature before the kernel; the length
    scale is the median pairwise distance of the scaled training inputs.
    Weights are fit on mean-centered targets so a constant target maps to a
    constant prediction everywhere.
    """

    centers: np.ndarray        # (n, |idx|) scaled training inputs
    weights: np.ndarray        # (n,)
    length_scale: float
    idx: np.ndarray            # strictly increasing feature indices
    ridge: float
    feature_min: np.ndarray    # (|idx|,) scaling offsets
    feature_span: np.ndarray   # (|idx|,) scaling divisors (1 where degenerate)
    target_mean: float = 0.0

    def _scale(self, X: np.ndarray) -> np.ndarray:
        return (X[:, self.idx] - self.feature_min) / self.feature_span

    def predict(self, X) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        d2 = cdist(self._scale(X), self.centers, "sqeuclidean")
        k = np.exp(-d2 / (2.0 * self.length_scale**2))
        return self.target_mean + k @ self.weights

    def as_dict(self) -> dict:
        return {
            "centers": self.centers.tolist(),
            "weights": self.weights.tolist(),
            "length_scale": self.length_scale,
            "idx": self.idx.tolist(),
            "ridge": self.ridge,
            "feature_min": self.feature_min.tolist(),
            "feature_span": self.feature_span.tolist(),
            "target_mean": self.target_mean,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "RbfModel":
        return cls(
            centers=np.asarray(d["centers"], dtype=float),
            weights=np.asarray(d["weights"], dtype=float),
            length_scale=float(d["length_scale"]),
            idx=np.asarray(d["idx"], dtype=np.int64),
            ridge=float(d["ridge"]),
            feature_min=np.asarray(d["feature_min"], dtype=float),
            feature_span=np.asarray(d["feature_span"], dtype=float),
            target_mean=float(d.get("target_mean", 0.0)),
        )


def fit_rbf(X, Y, idx=None, ridge: float = DEFAULT_RIDGE) -> RbfModel:
    """Fit one RBF regressor of Y on X restricted to feature indices idx.

    Rows that coincide on idx are merged (targets averaged) before fitting,
    so the kernel system stays non-singular for any positive ridge.
    """
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    if X.ndim != 2 or len(X) != len(Y):
        raise ValueError("X must be (n, features) with matching Y")
    if len(X) < 2:
        raise ValueError("need at least 2 training rows")
    if idx is None:
        idx = np.arange(X.shape[1])
    idx = np.asarray(sorted(int(i) for i in idx), dtype=np.int64)
    if len(idx) == 0:
        raise ValueError("feature subset must be non-empty")

    sub = X[:, idx]
    uniq, inverse = np.unique(sub, axis=0, return_inverse=True)
    targets = np.zeros(len(uniq))
    np.add.at(targets, inverse, Y)
    targets /= np.bincount(inverse)

    fmin = uniq.min(axis=0)
    fspan = uniq.max(axis=0) - fmin
    fspan[fspan <= 0] = 1.0
    scaled = (uniq - fmin) / fspan

    d2 = cdist(scaled, scaled, "sqeuclidean")
    tri = d2[np.triu_indices(len(scaled), k=1)]
    length_scale = float(np.sqrt(np.median(tri))) if len(tri) else 0.0
    if length_scale <= 0.0:
        length_scale = 1.0

    K = np.exp(-d2 / (2.0 * length_scale**2))
    mean = float(targets.mean())
    try:
        weights = np.linalg.solve(K + ridge * np.eye(len(K)), targets - mean)
    except np.linalg.LinAlgError as err:
        raise SurrogateError(
            "singular RBF system; training rows are not distinct enough"
        ) from err
    return RbfModel(
        centers=scaled,
        weights=weights,
        length_scale=length_scale,
        idx=idx,
        ridge=ridge,
        feature_min=fmin,
        feature_span=fspan,
        target_mean=mean,
    )


@dataclass
class RbfEnsemble:
    pool: list[RbfModel]
    train_X: np.ndarray = field(default=None, repr=False)
    train_Y: np.ndarray = field(default=None, repr=False)

    @property
    def size(self) -> int:
        return len(self.pool)

    def predict(self, genome) -> float:
        return float(self.predict_batch(np.atleast_2d(np.asarray(genome)))[0])

    def predict_batch(self, X) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        total = np.zeros(len(X))
        for model in self.pool:
            total += model.predict(X)
        return total / len(self.pool)

    def to_json(self) -> str:
        return json.dumps({"pool": [m.as_dict() for m in self.pool]})

    @classmethod
    def from_json(cls, text: str) -> "RbfEnsemble":
        return cls(pool=[RbfModel.from_dict(d) for d in json.loads(text)["pool"]])


def build_ensemble(
    X,
    Y,
    size: int = 500,
    rng: np.random.Generator | None = None,
    ridge: float = DEFAULT_RIDGE,
) -> RbfEnsemble:
    """Bagged RBF pool over random row and feature subsets of (X, Y).

    Every member sees ceil(0.8 n) rows drawn without replacement and a
    feature subset whose size is uniform on [ceil(F/2), F].
    """
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    if len(X) < 2:
        raise ValueError("need at least 2 training rows")
    if size < 1:
        raise ValueError("ensemble size must be positive")
    rng = rng or np.random.default_rng()
    n, n_features = X.shape
    n_rows = math.ceil(ROW_FRACTION * n)
    lo = math.ceil(n_features / 2)
    pool = []
    for _ in range(size):
        rows = rng.choice(n, size=n_rows, replace=False)
        n_feat = int(rng.integers(lo, n_features + 1))
        idx = np.sort(rng.choice(n_features, size=n_feat, replace=False))
        pool.append(fit_rbf(X[rows], Y[rows], idx=idx, ridge=ridge))
    return RbfEnsemble(pool=pool, train_X=X.copy(), train_Y=Y.copy())


def spearman(pred, truth) -> float:
    """Rank correlation: Pearson correlation of average-ranked values.

    A constant input has no rank ordering; that case returns 0.0 and emits
    a warning instead of propagating a NaN.
    """
    pred = np.asarray(pred, dtype=float)
    truth = np.asarray(truth, dtype=float)
    if pred.shape != truth.shape or pred.ndim != 1 or len(pred) < 2:
        raise ValueError("need two equal-length vectors of at least 2 values")
    rp = rankdata(pred)
    rt = rankdata(truth)
    if np.ptp(rp) == 0 or np.ptp(rt) == 0:
        warnings.warn("constant vector in rank correlation; returning 0.0")
        return 0.0
    return float(np.corrcoef(rp, rt)[0, 1])
