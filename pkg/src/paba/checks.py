"""Randomised property checks shared by ``paba verify`` and the acceptance tests.

Each check takes an integer seed, builds its own random instance and returns
the worst error it saw; the caller compares it with the check's tolerance.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import bcd
from .oracle import GridSpec, finite_diff_rate, grid_search, rate_equalization
from .simulator import Scenario, build_instance
from .solvers import (
    Instance,
    group_bw_rate,
    solve,
    solve_model_size,
    uniform_rate_residuals,
)


def random_instance(seed: int, max_groups: int = 20, max_workers: int = 20,
                    groups=None, workers=None) -> Instance:
    """Default-cell instance with random group count and size drawn from ``seed``."""
    rng = np.random.default_rng([seed, 7919])
    k = int(rng.integers(1, max_groups + 1)) if groups is None else groups
    n = int(rng.integers(1, max_workers + 1)) if workers is None else workers
    return build_instance(Scenario(n_groups=k, workers_per_group=n, seed=seed))


def equal_group_latency(seed: int) -> float:
    """Relaxed parameter allocation leaves every group with the same latency."""
    alloc = solve("bw_aware_pa", random_instance(seed))
    t = alloc.diagnostics["relaxed_latency_s"]
    return float(np.max(np.abs(alloc.diagnostics["relaxed_group_latency_s"] - t)) / t)


def equal_worker_latency(seed: int) -> float:
    """Bandwidth allocation equalises the loaded workers' latencies and uses the whole band."""
    inst = random_instance(seed)
    alloc = solve("pa_aware_ba", inst)
    rho = inst.padded(alloc.bw_ratios)
    lat = inst.worker_latency(alloc.block_lens, rho)
    loaded = inst.mask & (np.asarray(alloc.block_lens)[:, None] > 0)
    spread = float((lat[loaded].max() - lat[loaded].min()) / lat[loaded].max())
    # the band-usage error is scaled so both share one 1e-6 budget
    return max(spread, 100.0 * abs(float(rho.sum()) - 1.0))


def uniform_group_rate(seed: int) -> float:
    """Joint optimum: equal group bandwidth rates and an active bandwidth constraint."""
    inst = random_instance(seed)
    alloc = solve("joint", inst)
    d = alloc.diagnostics
    res = uniform_rate_residuals(inst, d["relaxed_block_lens"], d["relaxed_latency_s"])
    return max(res["rate_spread"] / 1e-4, res["bandwidth_gap"] / 1e-6)


def model_size_increasing(seed: int, points: int = 10) -> float:
    """Largest model size grows strictly with the latency budget; returns violations."""
    inst = random_instance(seed)
    span = inst.n_params * float(np.min(inst.a_max + inst.c_sum)) / inst.K
    budgets = inst.t0 + span * np.geomspace(0.05, 3.0, points)
    sizes = [solve_model_size(inst, t).max_params for t in budgets]
    return float(np.sum(np.diff(sizes) <= 0))


def scheme_dominance(seed: int, slack: float = 1e-6) -> float:
    """joint <= each partial scheme <= baseline on one default draw; returns violations."""
    inst = build_instance(Scenario(), 0, seed)
    t = {s: solve(s, inst).round_latency_s for s in ("baseline", "bw_aware_pa", "pa_aware_ba", "joint")}
    bad = 0
    for partial in ("bw_aware_pa", "pa_aware_ba"):
        bad += t["joint"] > t[partial] + slack
        bad += t[partial] > t["baseline"] + slack
    return float(bad)


def grid_agreement(seed: int, grid: GridSpec = GridSpec()) -> float:
    """Joint latency against an exhaustive grid, single-worker groups, K in {2, 3}."""
    k = 2 + seed % 2
    inst = random_instance(seed, groups=k, workers=1)
    joint = solve("joint", inst).diagnostics["relaxed_latency_s"]
    ref = grid_search(inst, grid).round_latency_s
    return abs(joint - ref) / ref


def closed_form_agreement(seed: int) -> float:
    """Joint latency against the closed-form single-worker solution."""
    k = 2 + seed % 2
    inst = random_instance(seed, groups=k, workers=1)
    joint = solve("joint", inst).diagnostics["relaxed_latency_s"]
    ref = solve("single_worker_special", inst).diagnostics["relaxed_latency_s"]
    return abs(joint - ref) / ref


def model_size_agreement(seed: int) -> float:
    """Primal-dual model-size maximisation against rate equalisation."""
    inst = random_instance(seed)
    rng = np.random.default_rng([seed, 104729])
    span = inst.n_params * float(np.min(inst.a_max + inst.c_sum)) / inst.K
    t = inst.t0 + span * rng.uniform(0.1, 3.0)
    ours = solve_model_size(inst, t).max_params
    ref, _ = rate_equalization(inst, t)
    return abs(ours - ref) / ref


def rate_derivative(seed: int) -> float:
    """Analytic group bandwidth rate against a central finite difference."""
    inst = random_instance(seed)
    rng = np.random.default_rng([seed, 15485863])
    k = int(rng.integers(inst.K))
    a = inst.a[k, : inst.sizes[k]]
    c = inst.c[k, : inst.sizes[k]]
    tp = inst.n_params * (a.max() + c.sum()) / inst.K * rng.uniform(0.2, 2.0)
    b = rng.uniform(0.05, 0.95) * tp / a.max()
    exact = group_bw_rate(b, inst.t0 + tp, a, c, inst.t0)
    approx = finite_diff_rate(b, inst.t0 + tp, a, c, inst.t0)
    return abs(exact - approx) / abs(exact)


def bcd_matches_centralized(seed: int, dim: int = 200, samples: int = 100, rounds: int = 5,
                            reg: str | None = None, groups: int = 4) -> float:
    """Grouped block updates reproduce full proximal-gradient steps coordinate by coordinate."""
    rng = np.random.default_rng([seed, 3])
    reg = reg or ("l1" if seed % 2 == 0 else "l2")
    data = bcd.make_synthetic(samples, dim, density=0.1, seed=seed)
    task = bcd.with_default_step(bcd.LearningTask("logistic", reg, 1e-3), data)
    cuts = np.sort(rng.choice(np.arange(1, dim), size=groups - 1, replace=False))
    lens = np.diff(np.concatenate([[0], cuts, [dim]]))
    partition = bcd.blocks_from_lengths(lens)
    split = bcd.split_samples(samples, rng.integers(1, 6, size=groups).tolist(), seed)
    dist = cent = bcd.ModelState(np.zeros(dim))
    worst = 0.0
    for _ in range(rounds):
        dist = bcd.distributed_round(task, dist, data, partition, split)
        cent = bcd.centralized_step(task, cent, data)
        worst = max(worst, float(np.max(np.abs(dist.theta - cent.theta))))
    return worst


def objective_decreasing(seed: int, dim: int = 200, samples: int = 100, rounds: int = 10) -> float:
    """Proximal-gradient objective never increases at the default step; returns violations."""
    data = bcd.make_synthetic(samples, dim, density=0.1, seed=seed)
    reg = "l1" if seed % 2 == 0 else "l2"
    traj = bcd.run_centralized(bcd.LearningTask("logistic", reg, 1e-3), data, rounds)
    f = np.asarray(traj.objectives)
    return float(np.sum(np.diff(f) > 1e-12 * np.abs(f[:-1])))


@dataclass(frozen=True)
class Check:
    name: str
    suite: str
    fn: Callable[[int], float]
    tol: float  # pass when the returned error is <= tol


CHECKS = [
    Check("equal group latency under parameter allocation", "kkt", equal_group_latency, 1e-6),
    Check("equal worker latency under bandwidth allocation", "kkt", equal_worker_latency, 1e-6),
    Check("uniform group bandwidth rate at joint optimum", "kkt", uniform_group_rate, 1.0),
    Check("model size strictly increasing in latency", "kkt", model_size_increasing, 0.0),
    Check("scheme ordering joint <= partial <= baseline", "kkt", scheme_dominance, 0.0),
    Check("joint matches grid search", "oracle", grid_agreement, 1e-2),
    Check("joint matches closed-form single-worker case", "oracle", closed_form_agreement, 1e-4),
    Check("primal-dual matches rate equalisation", "oracle", model_size_agreement, 1e-3),
    Check("analytic rate matches finite difference", "oracle", rate_derivative, 1e-5),
    Check("grouped BCD equals centralised update", "bcd", bcd_matches_centralized, 1e-10),
    Check("objective non-increasing", "bcd", objective_decreasing, 0.0),
]

SUITES = ("kkt", "oracle", "bcd", "all")

# grid search is the slow one; cap its seed count
_MAX_SEEDS = {"joint matches grid search": 25}


@dataclass
class CheckResult:
    name: str
    suite: str
    seeds: int
    failures: int
    worst: float
    tol: float
    error: str | None = None

    @property
    def passed(self) -> bool:
        return self.failures == 0 and self.error is None


def run_checks(suite: str = "all", seeds: int = 20, first_seed: int = 0) -> list[CheckResult]:
    if suite not in SUITES:
        raise ValueError(f"suite must be one of {SUITES}")
    out = []
    for chk in CHECKS:
        if suite != "all" and chk.suite != suite:
            continue
        n = min(seeds, _MAX_SEEDS.get(chk.name, seeds))
        worst, failures, error = 0.0, 0, None
        for s in range(first_seed, first_seed + n):
            try:
                e = chk.fn(s)
            except Exception as exc:  # reported in the table, not raised
                failures += 1
                error = f"seed {s}: {type(exc).__name__}: {exc}"
                continue
            worst = max(worst, e)
            failures += not e <= chk.tol
        out.append(CheckResult(chk.name, chk.suite, n, failures, worst, chk.tol, error))
    return out


def format_table(results: list[CheckResult]) -> str:
    width = max(len(r.name) for r in results) if results else 10
    lines = [f"{'property':<{width}}  {'suite':<6}  {'seeds':>5}  {'worst':>10}  {'tol':>8}  result"]
    for r in results:
        lines.append(
            f"{r.name:<{width}}  {r.suite:<6}  {r.seeds:>5}  {r.worst:>10.3g}  {r.tol:>8.1g}  "
            f"{'PASS' if r.passed else 'FAIL'}"
        )
        if r.error:
            lines.append(f"    {r.error}")
    return "\n".join(lines)
