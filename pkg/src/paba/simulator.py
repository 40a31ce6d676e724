"""Random single-cell scenarios, multi-round runs and Monte-Carlo sweeps.

Randomness is drawn from independent streams keyed by
``(seed, draw, quantity, group[, round])``; every stream produces values one
worker at a time, so a scenario with more groups or more workers per group
extends a smaller one instead of reshuffling it. That keeps draws comparable
along the group-count and group-size axes as well as across schemes.
"""

from __future__ import annotations

import csv
import io
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from . import bcd
from .core_model import (
    ChannelState,
    GroupTopology,
    SystemParams,
    db_to_linear,
    dbm_to_watts,
    learning_latency,
    noise_variance_w,
)
from .errors import InvalidArgumentError, PabaError
from .solvers import SCHEMES, Instance, SolverOptions, solve

_DISTANCE, _CPU, _FADE_DOWN, _FADE_UP = range(4)

DEFAULT_SCHEMES = ("baseline", "bw_aware_pa", "pa_aware_ba", "joint")

AXES = {
    "bandwidth": "bandwidth_hz",
    "group_count": "n_groups",
    "group_size": "workers_per_group",
}


@dataclass(frozen=True)
class Scenario:
    n_groups: int = 15
    workers_per_group: int = 15
    cell_radius_km: float = 0.15
    min_distance_km: float = 0.001
    bandwidth_hz: float = 100e6
    ap_tx_power_dbm: float = 46.0
    worker_tx_power_dbm: float = 24.0
    noise_density_dbm_hz: float = -174.0
    bits_per_param: float = 32.0
    bits_per_gradient: float = 32.0
    total_params: int = 1_241_220
    server_update_time_s: float = 0.01
    ops_per_param_sample: float = 10.0
    total_samples: int = 15936
    cpu_freqs_ghz: tuple = (0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0)
    seed: int = 0

    def __post_init__(self):
        for name in ("cell_radius_km", "bandwidth_hz", "bits_per_param", "bits_per_gradient",
                     "total_params", "server_update_time_s", "ops_per_param_sample"):
            v = getattr(self, name)
            if not (np.isfinite(v) and v > 0):
                raise InvalidArgumentError(f"{name} must be finite and > 0, got {v!r}")
        if self.n_groups < 1 or self.workers_per_group < 1:
            raise InvalidArgumentError("need at least one group and one worker per group")
        if not 0 < self.min_distance_km < self.cell_radius_km:
            raise InvalidArgumentError("need 0 < min_distance_km < cell_radius_km")
        if not self.cpu_freqs_ghz or min(self.cpu_freqs_ghz) <= 0:
            raise InvalidArgumentError("cpu_freqs_ghz must be non-empty and positive")
        if self.total_samples < self.workers_per_group:
            raise InvalidArgumentError("every worker needs at least one sample")

    def params(self) -> SystemParams:
        return SystemParams(
            bandwidth_hz=self.bandwidth_hz,
            ap_tx_power_w=float(dbm_to_watts(self.ap_tx_power_dbm)),
            worker_tx_power_w=float(dbm_to_watts(self.worker_tx_power_dbm)),
            noise_variance_w=noise_variance_w(self.noise_density_dbm_hz, self.bandwidth_hz),
            bits_per_param=self.bits_per_param,
            bits_per_gradient=self.bits_per_gradient,
            total_params=self.total_params,
            server_update_time_s=self.server_update_time_s,
            ops_per_param_sample=self.ops_per_param_sample,
        )


def path_loss_db(distance_km):
    return 128.1 + 37.6 * np.log10(distance_km)


def _uniforms(scenario: Scenario, draw: int, *key) -> np.ndarray:
    rng = np.random.default_rng([scenario.seed, draw, *key])
    return rng.random(scenario.workers_per_group)


@dataclass
class Placement:
    topology: GroupTopology
    distances_km: list


def sample_placement(scenario: Scenario, draw: int = 0) -> Placement:
    """Worker positions (uniform in the disk) and compute capacities."""
    n = scenario.workers_per_group
    samples = [len(s) for s in np.array_split(np.arange(scenario.total_samples), n)]
    freqs = np.asarray(scenario.cpu_freqs_ghz, dtype=float) * 1e9
    r0, r1 = scenario.min_distance_km, scenario.cell_radius_km
    groups, dists = [], []
    for k in range(scenario.n_groups):
        u = _uniforms(scenario, draw, _DISTANCE, k)
        dists.append(np.sqrt(r0**2 + u * (r1**2 - r0**2)))
        pick = np.minimum((_uniforms(scenario, draw, _CPU, k) * len(freqs)).astype(int), len(freqs) - 1)
        groups.append(list(zip(freqs[pick], samples)))
    topo = GroupTopology.from_arrays([[f for f, _ in g] for g in groups], [[d for _, d in g] for g in groups])
    return Placement(topo, dists)


def sample_channels(scenario: Scenario, round_index: int, draw: int = 0, placement: Placement | None = None) -> ChannelState:
    """Path loss times unit-mean exponential (Rayleigh power) fading, fresh every round."""
    placement = placement or sample_placement(scenario, draw)
    down, up = [], []
    for k, d in enumerate(placement.distances_km):
        pl = db_to_linear(-path_loss_db(d))
        fd = -np.log1p(-_uniforms(scenario, draw, _FADE_DOWN, k, round_index))
        fu = -np.log1p(-_uniforms(scenario, draw, _FADE_UP, k, round_index))
        down.append(pl * fd)
        up.append(pl * fu)
    return ChannelState(down, up)


def build_instance(scenario: Scenario, round_index: int = 0, draw: int = 0) -> Instance:
    placement = sample_placement(scenario, draw)
    channels = sample_channels(scenario, round_index, draw, placement)
    return Instance.build(placement.topology, channels, scenario.params())


@dataclass
class LearningCoupling:
    """Optional learning run driven by each round's parameter allocation."""

    task: bcd.LearningTask
    dataset: bcd.Dataset
    test_set: bcd.Dataset | None = None
    split_seed: int = 0


@dataclass
class RunTrace:
    scheme: str
    latencies: list = field(default_factory=list)
    allocations: list = field(default_factory=list)
    objectives: list = field(default_factory=list)
    train_accuracy: list = field(default_factory=list)
    test_accuracy: list = field(default_factory=list)
    aborted: str | None = None

    @property
    def cumulative_latency(self) -> list:
        return [learning_latency(self.latencies[: i + 1]) for i in range(len(self.latencies))]

    @property
    def total_latency(self) -> float:
        return learning_latency(self.latencies)

    def to_dict(self) -> dict:
        return {
            "scheme": self.scheme,
            "latency_s": self.latencies,
            "cumulative_latency_s": self.cumulative_latency if self.latencies else [],
            "objective": self.objectives,
            "train_accuracy": self.train_accuracy,
            "test_accuracy": self.test_accuracy,
            "aborted": self.aborted,
            "allocations": [a.to_dict() for a in self.allocations],
        }


def run_rounds(scenario: Scenario, scheme: str, rounds: int, draw: int = 0,
               opts: SolverOptions | None = None, learning: LearningCoupling | None = None) -> RunTrace:
    """Re-solve the allocation every round on that round's channels.

    A solver error stops the run; the message is kept in ``trace.aborted``.
    """
    if rounds < 1:
        raise InvalidArgumentError("rounds must be >= 1")
    if scheme not in SCHEMES:
        raise InvalidArgumentError(f"unknown scheme {scheme!r}")
    placement = sample_placement(scenario, draw)
    params = scenario.params()
    trace = RunTrace(scheme)
    state = split = task = None
    if learning is not None:
        if learning.dataset.dimension != scenario.total_params:
            raise InvalidArgumentError("learning dataset dimension must equal total_params")
        task = bcd.with_default_step(learning.task, learning.dataset)
        state = bcd.ModelState(np.zeros(scenario.total_params))
        split = bcd.split_samples(learning.dataset.n_samples, placement.topology.sizes, learning.split_seed)
        _record_learning(trace, learning, task, state)
    for r in range(rounds):
        try:
            channels = sample_channels(scenario, r, draw, placement)
            inst = Instance.build(placement.topology, channels, params)
            alloc = solve(scheme, inst, opts)
        except PabaError as exc:
            trace.aborted = f"round {r}: {exc}"
            break
        trace.latencies.append(alloc.round_latency_s)
        trace.allocations.append(alloc)
        if learning is not None:
            partition = bcd.blocks_from_lengths(alloc.block_lens)
            state = bcd.distributed_round(task, state, learning.dataset, partition, split)
            _record_learning(trace, learning, task, state)
    return trace


def _record_learning(trace, learning, task, state):
    trace.objectives.append(bcd.objective(task, state.theta, learning.dataset))
    trace.train_accuracy.append(bcd.accuracy(state.theta, learning.dataset))
    if learning.test_set is not None:
        trace.test_accuracy.append(bcd.accuracy(state.theta, learning.test_set))


@dataclass
class SweepResult:
    axis: str
    values: list
    schemes: list
    mean_latency_s: np.ndarray  # (values, schemes)
    std_latency_s: np.ndarray
    draws: int
    samples: np.ndarray = None  # (values, schemes, draws)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["axis", "scheme", "mean_latency_s", "std_latency_s", "draws"])
        for i, v in enumerate(self.values):
            for j, s in enumerate(self.schemes):
                w.writerow([repr(v), s, repr(float(self.mean_latency_s[i, j])),
                            repr(float(self.std_latency_s[i, j])), self.draws])
        return buf.getvalue()


def _axis_value(axis: str, value):
    return int(value) if axis in ("group_count", "group_size") else float(value)


def _draw_latencies(args):
    scenario, draw, schemes, opts = args
    inst = build_instance(scenario, 0, draw)
    return [solve(s, inst, opts).round_latency_s for s in schemes]


def sweep(scenario: Scenario, axis: str, values, draws: int = 100, schemes=DEFAULT_SCHEMES,
          opts: SolverOptions | None = None, processes: int = 1) -> SweepResult:
    """Mean one-round latency per scheme along one scenario axis.

    Every scheme and every axis value sees the same draws (common random numbers).
    """
    if axis not in AXES:
        raise InvalidArgumentError(f"axis must be one of {sorted(AXES)}")
    if draws < 1:
        raise InvalidArgumentError("draws must be >= 1")
    values = [_axis_value(axis, v) for v in values]
    if not values:
        raise InvalidArgumentError("need at least one axis value")
    if any(b <= a for a, b in zip(values, values[1:])):
        raise InvalidArgumentError("axis values must be strictly increasing")
    schemes = list(schemes)
    jobs = [
        (replace(scenario, **{AXES[axis]: v}), d, schemes, opts)
        for v in values
        for d in range(draws)
    ]
    if processes > 1:
        with ProcessPoolExecutor(processes) as pool:
            flat = list(pool.map(_draw_latencies, jobs, chunksize=max(1, len(jobs) // (4 * processes))))
    else:
        flat = [_draw_latencies(j) for j in jobs]
    samples = np.array(flat, dtype=float).reshape(len(values), draws, len(schemes)).transpose(0, 2, 1)
    return SweepResult(axis, values, schemes, samples.mean(axis=2), samples.std(axis=2), draws, samples)


def scenario_dict(scenario: Scenario) -> dict:
    d = asdict(scenario)
    d["cpu_freqs_ghz"] = list(d["cpu_freqs_ghz"])
    return d


def latency_reduction(baseline: np.ndarray, other: np.ndarray) -> float:
    """Relative reduction of the mean latency, ``1 - mean(other) / mean(baseline)``."""
    return 1.0 - float(np.mean(other)) / float(np.mean(baseline))


__all__ = [
    "Scenario", "Placement", "RunTrace", "SweepResult", "LearningCoupling", "AXES",
    "DEFAULT_SCHEMES", "path_loss_db", "sample_placement", "sample_channels",
    "build_instance", "run_rounds", "sweep", "latency_reduction", "scenario_dict",
]
