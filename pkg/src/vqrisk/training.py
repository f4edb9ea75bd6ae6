"""Learning per-class pattern states: clustering, SPSA, threshold tuning.

Each class of encoded samples is split into clusters by k-means on the
samples' measurement distributions. For every cluster, circuit angles are
optimized so the circuit's output distribution matches the cluster mean
under the absolute-error distance ``cost_f``. Acceptance thresholds start at
(0.0, 0.5) per cluster and can be tightened afterwards against the training
set.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, replace

import numpy as np
import scipy.optimize

from .ansatz import AnsatzSpec, build_circuit, param_count
from .qsim import ProbDist, new_basis_state, run_circuit

OPTIMIZER_METHODS = ("SPSA", "NelderMead")

INITIAL_EPSILON = 0.5
INITIAL_DELTA = 0.0

# Thresholds strictly below this are meaningless at double precision.
_EPSILON_FLOOR = 1e-9


class OptimizationError(RuntimeError):
    """Raised when an objective stops producing finite values."""


@dataclass(frozen=True)
class OptimizerConfig:
    """Optimizer choice plus SPSA gain schedule.

    SPSA uses step size a_t = a/(A+t+1)^alpha and perturbation size
    c_t = c/(t+1)^gamma, with A at 10% of the default 500 iterations and the
    standard decay exponents. The step gain defaults to a = 2.0: on the
    2*pi-periodic angle landscapes trained here, timid steps stall in
    spurious minima, while a_0 ~ 0.19 rad clears them and still converges.
    """

    method: str = "SPSA"
    max_iters: int = 500
    a: float = 2.0
    c: float = 0.1
    A: float = 50.0
    alpha: float = 0.602
    gamma: float = 0.101
    seed: int = 42
    restarts: int = 3

    def __post_init__(self) -> None:
        if self.method not in OPTIMIZER_METHODS:
            raise ValueError(f"method must be one of {OPTIMIZER_METHODS}, got {self.method!r}")
        if self.max_iters < 1:
            raise ValueError(f"max_iters must be >= 1, got {self.max_iters}")
        if self.a <= 0 or self.c <= 0:
            raise ValueError("SPSA gains a and c must be positive")
        if not 0 < self.alpha <= 1:
            raise ValueError(f"alpha must be in (0, 1], got {self.alpha}")
        if not 0 < self.gamma <= 1:
            raise ValueError(f"gamma must be in (0, 1], got {self.gamma}")
        if self.restarts < 1:
            raise ValueError(f"restarts must be >= 1, got {self.restarts}")


@dataclass(frozen=True, eq=False)
class ClusterTarget:
    """A cluster of same-class samples and its mean measurement distribution."""

    class_label: int
    cluster_index: int
    member_indices: tuple[int, ...]
    target_dist: ProbDist

    def __post_init__(self) -> None:
        if self.class_label not in (0, 1):
            raise ValueError(f"class_label must be 0 or 1, got {self.class_label!r}")
        object.__setattr__(self, "member_indices", tuple(int(i) for i in self.member_indices))
        if not self.member_indices:
            raise ValueError("cluster must have at least one member")


@dataclass(frozen=True, eq=False)
class TrainedCluster:
    """Optimized angles for one cluster plus its acceptance range."""

    class_label: int
    cluster_index: int
    thetas: np.ndarray
    epsilon: float = INITIAL_EPSILON
    delta: float = INITIAL_DELTA
    final_cost: float = 0.0
    members: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        if self.class_label not in (0, 1):
            raise ValueError(f"class_label must be 0 or 1, got {self.class_label!r}")
        thetas = np.array(self.thetas, dtype=float)
        if thetas.ndim != 1:
            raise ValueError("thetas must be a 1-D angle vector")
        thetas.flags.writeable = False
        object.__setattr__(self, "thetas", thetas)
        object.__setattr__(self, "members", tuple(int(i) for i in self.members))
        if not 0.0 <= self.delta < self.epsilon:
            raise ValueError(
                f"acceptance range needs 0 <= delta < epsilon, got ({self.delta}, {self.epsilon})"
            )
        if self.final_cost < 0:
            raise ValueError(f"final_cost must be >= 0, got {self.final_cost}")


def cost_f(p_a, p_t) -> float:
    """Sum of absolute probability differences between two distributions.

    Bounded by [0, 2]; zero exactly when the distributions coincide.
    """
    a = p_a.probs if isinstance(p_a, ProbDist) else np.asarray(p_a, dtype=float)
    b = p_t.probs if isinstance(p_t, ProbDist) else np.asarray(p_t, dtype=float)
    if a.shape != b.shape:
        raise ValueError(f"distribution shapes differ: {a.shape} vs {b.shape}")
    return float(np.sum(np.abs(a - b)))


def _lloyd(points: np.ndarray, k_eff: int, rng: np.random.Generator) -> np.ndarray:
    distinct = np.unique(points, axis=0)
    centroids = distinct[np.sort(rng.choice(len(distinct), size=k_eff, replace=False))]
    previous = None
    for _ in range(300):
        d2 = ((points[:, None, :] - centroids[None, :, :]) ** 2).sum(axis=-1)
        assign = np.argmin(d2, axis=1)
        used = np.unique(assign)
        if len(used) < len(centroids):
            centroids = centroids[used]
            continue
        if previous is not None and np.array_equal(assign, previous):
            break
        previous = assign
        centroids = np.stack([points[assign == j].mean(axis=0) for j in range(len(centroids))])
    return assign


def _kmeans_assign(points: np.ndarray, k: int, seed: int, n_init: int = 10) -> np.ndarray:
    """Seeded Lloyd iteration on raw points; may end with fewer than k groups.

    Initial centroids are drawn without replacement from the distinct rows,
    so duplicated points collapse instead of splitting into empty clusters;
    centroids that lose all points are dropped on the spot. The best of
    ``n_init`` seeded initializations (lowest within-cluster sum of squares)
    wins.
    """
    k_eff = min(k, len(np.unique(points, axis=0)))
    best_assign, best_inertia = None, None
    for init_seq in np.random.SeedSequence(seed).spawn(n_init):
        assign = _lloyd(points, k_eff, np.random.default_rng(init_seq))
        inertia = 0.0
        for j in np.unique(assign):
            rows = points[assign == j]
            inertia += float(((rows - rows.mean(axis=0)) ** 2).sum())
        if best_inertia is None or inertia < best_inertia - 1e-12:
            best_assign, best_inertia = assign, inertia
    return best_assign


def cluster_samples(samples, lc: int, *, seed: int = 0) -> list[ClusterTarget]:
    """k-means over the samples' probability vectors, at most ``lc`` clusters.

    All samples must share one class label. Empty clusters are dropped and the
    survivors renumbered, so fewer than ``lc`` targets may come back. Each
    target distribution is the renormalized mean of its members' measurement
    distributions.
    """
    samples = list(samples)
    if not samples:
        raise ValueError("samples must be non-empty")
    labels = {s.label for s in samples}
    if len(labels) != 1:
        raise ValueError(f"samples must all share one class, got labels {sorted(labels)}")
    class_label = labels.pop()
    lc = int(lc)
    if not 1 <= lc <= len(samples):
        raise ValueError(f"cluster count must be in 1..{len(samples)}, got {lc}")
    points = np.array([np.abs(s.state.amplitudes) ** 2 for s in samples])
    assign = _kmeans_assign(points, lc, seed)
    targets = []
    for new_index, group in enumerate(np.unique(assign)):
        rows = np.flatnonzero(assign == group)
        mean = points[rows].mean(axis=0)
        mean = mean / mean.sum()
        targets.append(
            ClusterTarget(
                class_label,
                new_index,
                tuple(samples[int(r)].source_index for r in rows),
                ProbDist(mean),
            )
        )
    return targets


def _checked(objective, theta: np.ndarray) -> float:
    value = float(objective(theta))
    if not np.isfinite(value):
        raise OptimizationError(f"objective returned {value!r} at theta={theta.tolist()}")
    return value


def spsa_minimize(objective, theta0, config: OptimizerConfig):
    """Simultaneous-perturbation stochastic approximation.

    Per step t: Rademacher perturbation delta, two-sided gradient estimate
    g = [f(theta + c_t delta) - f(theta - c_t delta)] / (2 c_t delta), update
    theta -= a_t g. Returns the best point seen over all evaluations (start,
    perturbed points, and iterates), not the final iterate. Deterministic for
    a fixed config.seed.
    """
    theta = np.array(theta0, dtype=float)
    rng = np.random.default_rng(config.seed)
    best_theta = theta.copy()
    best_cost = _checked(objective, theta)
    for t in range(config.max_iters):
        a_t = config.a / (config.A + t + 1) ** config.alpha
        c_t = config.c / (t + 1) ** config.gamma
        delta = rng.choice((-1.0, 1.0), size=theta.shape)
        theta_plus = theta + c_t * delta
        theta_minus = theta - c_t * delta
        f_plus = _checked(objective, theta_plus)
        f_minus = _checked(objective, theta_minus)
        if f_plus < best_cost:
            best_theta, best_cost = theta_plus, f_plus
        if f_minus < best_cost:
            best_theta, best_cost = theta_minus, f_minus
        theta = theta - a_t * (f_plus - f_minus) / (2.0 * c_t) / delta
        f_new = _checked(objective, theta)
        if f_new < best_cost:
            best_theta, best_cost = theta.copy(), f_new
    return best_theta, best_cost


def _nelder_mead_minimize(objective, theta0, config: OptimizerConfig):
    best = {"theta": np.array(theta0, dtype=float), "cost": None}

    def wrapped(theta):
        value = _checked(objective, np.asarray(theta, dtype=float))
        if best["cost"] is None or value < best["cost"]:
            best["theta"] = np.array(theta, dtype=float)
            best["cost"] = value
        return value

    scipy.optimize.minimize(
        wrapped,
        np.array(theta0, dtype=float),
        method="Nelder-Mead",
        options={"maxiter": config.max_iters, "xatol": 1e-8, "fatol": 1e-10},
    )
    return best["theta"], float(best["cost"])


def minimize(objective, theta0, config: OptimizerConfig):
    """Dispatch to the configured derivative-free optimizer."""
    if config.method == "SPSA":
        return spsa_minimize(objective, theta0, config)
    return _nelder_mead_minimize(objective, theta0, config)


def train_cluster(
    spec: AnsatzSpec, target: ClusterTarget, config: OptimizerConfig, *, shots: int = 0
) -> TrainedCluster:
    """Fit circuit angles so the output distribution matches the cluster mean.

    Runs ``config.restarts`` independent optimizations from uniform random
    angles in [0, 2*pi) and keeps the best. With ``shots`` > 0 the objective
    compares against a sampled empirical distribution instead of exact
    probabilities. All randomness derives from (config.seed, class, cluster).
    """
    dims = param_count(spec)
    base = new_basis_state(spec.n_qubits, 0)
    target_probs = np.asarray(target.target_dist.probs, dtype=float)
    if len(target_probs) != base.dim:
        raise ValueError(
            f"target distribution has {len(target_probs)} entries, circuit produces {base.dim}"
        )

    if shots:
        shot_rng = np.random.default_rng(
            np.random.SeedSequence(
                [int(config.seed), target.class_label, target.cluster_index, 0x5A5A]
            )
        )

    def objective(thetas):
        state = run_circuit(base, build_circuit(spec, thetas))
        probs = np.abs(state.amplitudes) ** 2
        if shots:
            probs = shot_rng.multinomial(shots, probs / probs.sum()) / shots
        return cost_f(probs, target_probs)

    best_thetas, best_cost = None, None
    for restart in range(config.restarts):
        seq = np.random.SeedSequence(
            [int(config.seed), target.class_label, target.cluster_index, restart]
        )
        init_seq, opt_seq = seq.spawn(2)
        theta0 = np.random.default_rng(init_seq).uniform(0.0, 2.0 * np.pi, dims)
        run_config = replace(config, seed=int(opt_seq.generate_state(1)[0]))
        thetas, cost = minimize(objective, theta0, run_config)
        if best_cost is None or cost < best_cost:
            best_thetas, best_cost = thetas, cost
    return TrainedCluster(
        class_label=target.class_label,
        cluster_index=target.cluster_index,
        thetas=best_thetas,
        epsilon=INITIAL_EPSILON,
        delta=INITIAL_DELTA,
        final_cost=best_cost,
        members=target.member_indices,
    )


def tune_thresholds(
    clusters,
    train_samples,
    ansatz_spec: AnsatzSpec,
    *,
    distance_mode: str = "COST_F",
    margin: float = 0.05,
) -> list[TrainedCluster]:
    """Tighten per-cluster acceptance thresholds against the training set.

    Every epsilon is first set to the cluster's largest own-member distance
    times (1 + margin), then shrunk greedily through the member distances
    while training accuracy does not decrease; shrinking can only remove
    acceptances, so the false rate never grows. The lower bound delta stays
    untouched. If tuning would end below the input model's accuracy, the
    input thresholds are returned unchanged.
    """
    # Deferred import: classify builds on this module's types.
    from .classify import TrainedModel, _resolve_outcomes, distance_matrix

    clusters = list(clusters)
    samples = list(train_samples)
    if not samples:
        raise ValueError("train_samples must be non-empty")
    if margin < 0:
        raise ValueError(f"margin must be >= 0, got {margin}")

    model = TrainedModel(ansatz_spec, tuple(clusters), distance_mode)
    dist = distance_matrix(model, samples)
    labels = np.array([s.label for s in samples])
    column_of = {s.source_index: j for j, s in enumerate(samples)}

    member_dists = []
    for ci, cluster in enumerate(clusters):
        cols = [column_of[m] for m in cluster.members if m in column_of]
        if not cols:
            cols = list(np.flatnonzero(labels == cluster.class_label))
        if not cols:
            cols = list(range(len(samples)))
        member_dists.append(np.sort(dist[ci, cols])[::-1])

    def accuracy(eps: np.ndarray) -> float:
        trial = [replace(c, epsilon=float(e)) for c, e in zip(clusters, eps)]
        outcomes = _resolve_outcomes(dist, trial, [s.source_index for s in samples])
        hits = sum(1 for o, y in zip(outcomes, labels) if o.final_class == y)
        return hits / len(samples)

    original_eps = np.array([c.epsilon for c in clusters])
    baseline = accuracy(original_eps)

    eps = np.array(
        [max(float(md[0]) * (1.0 + margin), _EPSILON_FLOOR) for md in member_dists]
    )
    current = accuracy(eps)

    changed = True
    sweeps = 0
    while changed and sweeps < 10:
        changed = False
        sweeps += 1
        for ci in range(len(clusters)):
            candidates = sorted(
                {
                    max(float(d) * (1.0 + margin), _EPSILON_FLOOR)
                    for d in member_dists[ci]
                    if float(d) * (1.0 + margin) < eps[ci] - 1e-15
                },
                reverse=True,
            )
            for candidate in candidates:
                trial = eps.copy()
                trial[ci] = candidate
                trial_acc = accuracy(trial)
                if trial_acc >= current:
                    eps, current, changed = trial, trial_acc, True
                else:
                    break

    if current < baseline:
        warnings.warn(
            f"threshold tuning would drop training accuracy "
            f"({current:.3f} < {baseline:.3f}); keeping original thresholds",
            stacklevel=2,
        )
        return clusters
    return [replace(c, epsilon=float(e)) for c, e in zip(clusters, eps)]
