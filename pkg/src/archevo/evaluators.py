"""Objective providers: synthetic supernet simulator and analytic benchmarks.

The synthetic supernet is a stand-in for training-based evaluation at desk
scale.  Its ground-truth accuracy is a fixed random additive-plus-pairwise
landscape over the encoding; the *observed* accuracy is the ground truth
attenuated by per-option maturity counters that grow as adaptation samples
subnets, so that adaptation focused on archive-favoured options pays off.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from . import surrogate
from .distribution import AdaptationDistribution, sample_subnet_batch
from .encoding import (
    CostModel,
    DEFAULT_COST,
    DEFAULT_SPACE,
    SearchSpaceConfig,
    decode,
    madds,
    params,
    sample_uniform,
)
from .rng import rng_for


class EvaluationError(RuntimeError):
    """Raised when an evaluator cannot produce objective values."""


class Evaluator:
    """Contract shared by all objective providers.

    ``evaluate`` maps genomes to true objective vectors (minimization
    convention, accuracy negated) and must be deterministic given the
    evaluator's state; ``adapt`` is the only state mutator.
    """

    objective_names: tuple[str, ...] = ()

    @property
    def objective_count(self) -> int:
        return len(self.objective_names)

    def evaluate(self, genomes) -> np.ndarray:
        raise NotImplementedError

    def adapt(self, distribution: AdaptationDistribution, epochs: int) -> None:
        raise NotImplementedError

    def close(self) -> None:
        pass


def aux_objective_fn(name: str, space: SearchSpaceConfig, cost: CostModel):
    """Exact auxiliary objective computed analytically from a genome."""
    if name == "madds":
        return lambda g: float(madds(decode(g, space, cost), cost))
    if name == "params":
        return lambda g: float(params(decode(g, space, cost), cost))
    raise ValueError(f"unknown auxiliary objective {name!r}")


@dataclass
class SyntheticSupernetConfig:
    m0: float = 0.6                 # observed/true accuracy ratio before adaptation
    tau: int = 200                  # option visits needed for full maturity
    steps_per_epoch: int = 200
    pairwise_count: int = 50
    unary_sigma: float = 0.2
    pairwise_sigma: float = 0.15
    capacity_gain: float = 8.0      # shared accuracy gain per unit mean capacity
    accuracy_range: tuple[float, float] = (0.55, 0.95)
    oracle: bool = False            # bypass maturity (observed == true)


def _logit(p: float) -> float:
    return float(np.log(p / (1.0 - p)))


class SyntheticSupernet(Evaluator):
    """Simulated weight-sharing supernet over the integer encoding."""

    def __init__(
        self,
        seed: int,
        space: SearchSpaceConfig = DEFAULT_SPACE,
        cost: CostModel = DEFAULT_COST,
        config: SyntheticSupernetConfig | None = None,
        objectives: tuple[str, ...] = ("neg_top1", "madds"),
    ):
        if objectives[0] != "neg_top1":
            raise ValueError("first objective must be neg_top1")
        self.space = space
        self.cost = cost
        self.config = config or SyntheticSupernetConfig()
        self.objective_names = tuple(objectives)
        self._aux = [aux_objective_fn(n, space, cost) for n in objectives[1:]]

        rng = rng_for(seed, "synthetic-supernet")
        L = space.genome_length
        n_opts = max(
            space.n_codes + 1, len(space.resolutions), len(space.width_multipliers)
        )
        # Per-position response curves over the capacity-sorted option scale:
        # a shared positive capacity slope (more compute helps, which is what
        # makes accuracy conflict with the cost objectives) plus a random
        # slope and a random mid-range bump with N(0, sigma) coefficients.  A
        # skipped slot (code 0) contributes nothing.  Smoothness in the code
        # axis mirrors real accuracy landscapes, where neighbouring codes are
        # neighbouring compute budgets.
        slope = rng.normal(0, self.config.unary_sigma, L)
        curve = rng.normal(0, self.config.unary_sigma, L)
        self.unary = np.zeros((L, n_opts))

        def fill(pos: int, u: np.ndarray) -> np.ndarray:
            shared = self.config.capacity_gain / L
            return (shared + slope[pos]) * u + curve[pos] * 4.0 * u * (1.0 - u)

        for pos, n in ((0, len(space.resolutions)), (1, len(space.width_multipliers))):
            u = np.arange(n) / max(n - 1, 1)
            self.unary[pos, :n] = fill(pos, u)
        for pos in range(2, L):
            u = np.arange(1, space.n_codes + 1) / space.n_codes
            self.unary[pos, 1:] = fill(pos, u)

        low, high = space.position_bounds()
        pairs = []
        for _ in range(self.config.pairwise_count):
            pa, pb = np.sort(rng.choice(L, size=2, replace=False))
            oa = int(rng.integers(max(low[pa], 0 if pa < 2 else 1), high[pa] + 1))
            ob = int(rng.integers(max(low[pb], 0 if pb < 2 else 1), high[pb] + 1))
            pairs.append((int(pa), oa, int(pb), ob))
        self.pairwise = pairs
        self.pairwise_coeff = rng.normal(0, self.config.pairwise_sigma, len(pairs))

        # calibrate the sigmoid so a uniform sample spans the accuracy range
        sample = np.stack([sample_uniform(space, rng) for _ in range(1024)])
        raw = self._raw_scores(sample)
        lo, hi = self.config.accuracy_range
        span = raw.max() - raw.min()
        self._scale = (_logit(hi) - _logit(lo)) / (span if span > 0 else 1.0)
        self._base = _logit(lo) - self._scale * raw.min()

        self.maturity = np.zeros((L, n_opts), dtype=np.int64)
        self._adapt_rng = rng_for(seed, "synthetic-adapt")

    def _as_matrix(self, genomes) -> np.ndarray:
        G = np.asarray(genomes, dtype=np.int64)
        return G[None, :] if G.ndim == 1 else G

    def _active_mask(self, G: np.ndarray) -> np.ndarray:
        mask = np.ones(G.shape, dtype=bool)
        mask[:, 2:] = G[:, 2:] > 0
        return mask

    def _raw_scores(self, G: np.ndarray) -> np.ndarray:
        score = np.take_along_axis(self.unary, G.T, axis=1).T.sum(axis=1)
        for coeff, (pa, oa, pb, ob) in zip(self.pairwise_coeff, self.pairwise):
            score += coeff * ((G[:, pa] == oa) & (G[:, pb] == ob))
        return score

    def true_accuracy(self, genomes) -> np.ndarray:
        G = self._as_matrix(genomes)
        z = self._base + self._scale * self._raw_scores(G)
        return 1.0 / (1.0 + np.exp(-z))

    def maturity_factor(self, genomes) -> np.ndarray:
        G = self._as_matrix(genomes)
        per_option = np.minimum(
            1.0, np.take_along_axis(self.maturity, G.T, axis=1).T / self.config.tau
        )
        active = self._active_mask(G)
        mean = (per_option * active).sum(axis=1) / active.sum(axis=1)
        return self.config.m0 + (1.0 - self.config.m0) * mean

    def observed_accuracy(self, genomes) -> np.ndarray:
        G = self._as_matrix(genomes)
        acc = self.true_accuracy(G)
        if self.config.oracle:
            return acc
        return acc * self.maturity_factor(G)

    def evaluate(self, genomes) -> np.ndarray:
        G = self._as_matrix(genomes)
        out = np.empty((len(G), self.objective_count))
        out[:, 0] = -self.observed_accuracy(G)
        for col, fn in enumerate(self._aux, start=1):
            out[:, col] = [fn(g) for g in G]
        return out

    def adapt(self, distribution: AdaptationDistribution, epochs: int) -> None:
        """Sample subnets from the distribution and mature their options."""
        steps = int(epochs) * self.config.steps_per_epoch
        if steps <= 0:
            return
        G = sample_subnet_batch(distribution, steps, self._adapt_rng, self.space)
        active = self._active_mask(G)
        rows = np.repeat(np.arange(self.space.genome_length)[None, :], len(G), axis=0)
        np.add.at(self.maturity, (rows[active], G[active]), 1)


ROSENBROCK_BOUND = 2.048


def rosenbrock(x1: float, x2: float) -> float:
    """Two-variable banana function on [-2.048, 2.048]^2; minimum 0 at (1, 1)."""
    if abs(x1) > ROSENBROCK_BOUND or abs(x2) > ROSENBROCK_BOUND:
        raise ValueError(f"inputs must lie in [-{ROSENBROCK_BOUND}, {ROSENBROCK_BOUND}]")
    return (1.0 - x1) ** 2 + 100.0 * (x2 - x1**2) ** 2


def _rosenbrock_batch(X: np.ndarray) -> np.ndarray:
    return (1.0 - X[:, 0]) ** 2 + 100.0 * (X[:, 1] - X[:, 0] ** 2) ** 2


def _surrogate_minimum(model: surrogate.RbfModel, rng: np.random.Generator) -> np.ndarray:
    cands = rng.uniform(-ROSENBROCK_BOUND, ROSENBROCK_BOUND, size=(4096, 2))
    preds = model.predict(cands)
    x0 = cands[int(np.argmin(preds))]
    res = minimize(
        lambda x: float(model.predict(x[None, :])[0]),
        x0,
        method="L-BFGS-B",
        bounds=[(-ROSENBROCK_BOUND, ROSENBROCK_BOUND)] * 2,
    )
    return res.x if res.success and res.fun <= preds.min() else x0


@dataclass
class SurrogateDemoResult:
    best_f: float
    best_x: np.ndarray
    evaluated_x: np.ndarray
    evaluated_f: np.ndarray
    surrogate_argmin: np.ndarray = field(default=None)


def rosenbrock_demo(
    budget: int,
    mode: str,
    rng: np.random.Generator,
) -> SurrogateDemoResult:
    """Offline vs online surrogate modelling on the banana landscape.

    Offline spends the whole true-evaluation budget on uniform samples and
    only then fits one interpolant and optimizes it.  Online spends a
    quarter of the budget up front, then alternates refit / optimize on the
    surrogate / truly evaluate the proposed optimum until the budget is
    gone.  Returns the best truly evaluated value either way.
    """
    if budget < 20:
        raise ValueError("budget must be at least 20")
    if mode not in ("offline", "online"):
        raise ValueError(f"mode must be 'offline' or 'online', got {mode!r}")

    if mode == "offline":
        X = rng.uniform(-ROSENBROCK_BOUND, ROSENBROCK_BOUND, size=(budget, 2))
        F = _rosenbrock_batch(X)
        model = surrogate.fit_rbf(X, F)
        argmin = _surrogate_minimum(model, rng)
    else:
        n0 = budget // 4
        X = rng.uniform(-ROSENBROCK_BOUND, ROSENBROCK_BOUND, size=(n0, 2))
        F = _rosenbrock_batch(X)
        argmin = None
        while len(X) < budget:
            model = surrogate.fit_rbf(X, F)
            argmin = _surrogate_minimum(model, rng)
            X = np.vstack([X, argmin])
            F = np.append(F, rosenbrock(*argmin))

    best = int(np.argmin(F))
    return SurrogateDemoResult(
        best_f=float(F[best]),
        best_x=X[best].copy(),
        evaluated_x=X,
        evaluated_f=F,
        surrogate_argmin=np.asarray(argmin),
    )


DTLZ1_K = 5


def dtlz1(x, m: int) -> np.ndarray:
    """Standard scalable test problem; true front is the simplex sum(f) = 0.5."""
    x = np.asarray(x, dtype=float)
    if x.shape != (m + DTLZ1_K - 1,):
        raise ValueError(f"expected {m + DTLZ1_K - 1} variables for m={m}")
    return dtlz1_batch(x[None, :], m)[0]


def dtlz1_batch(X: np.ndarray, m: int) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[1] != m + DTLZ1_K - 1:
        raise ValueError(f"expected (n, {m + DTLZ1_K - 1}) inputs for m={m}")
    if X.min() < 0.0 or X.max() > 1.0:
        raise ValueError("variables must lie in [0, 1]")
    tail = X[:, m - 1 :] - 0.5
    g = 100.0 * (DTLZ1_K + np.sum(tail**2 - np.cos(20.0 * np.pi * tail), axis=1))
    out = np.empty((len(X), m))
    for i in range(m):
        f = 0.5 * (1.0 + g)
        f = f * np.prod(X[:, : m - 1 - i], axis=1)
        if i > 0:
            f = f * (1.0 - X[:, m - 1 - i])
        out[:, i] = f
    return out
