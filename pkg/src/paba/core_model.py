"""System quantities and per-round latency model for partitioned edge learning.

Per-worker quantities are stored "ragged": one 1-D numpy array per group, in
the same order as :class:`GroupTopology.groups`. Worker ``(k, n)`` is entry
``n`` of group ``k``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import InfeasibleError, InvalidArgumentError

Ragged = list  # list[np.ndarray], one array per group


def _check_positive(name: str, value: float) -> None:
    if not (math.isfinite(value) and value > 0):
        raise InvalidArgumentError(f"{name} must be finite and > 0, got {value!r}")


@dataclass(frozen=True)
class SystemParams:
    """Global constants of one cell.

    Attributes:
        bandwidth_hz: total uplink bandwidth B.
        ap_tx_power_w: access-point transmit power.
        worker_tx_power_w: worker transmit power.
        noise_variance_w: receiver noise power (fixed, not scaled per sub-band).
        bits_per_param: bits used to push one model parameter.
        bits_per_gradient: bits used to upload one gradient element.
        total_params: model size.
        server_update_time_s: time for the server to apply an update.
        ops_per_param_sample: operations per parameter per data sample.
    """

    bandwidth_hz: float = 100e6
    ap_tx_power_w: float = 10 ** (46 / 10) * 1e-3
    worker_tx_power_w: float = 10 ** (24 / 10) * 1e-3
    noise_variance_w: float = 10 ** (-174 / 10) * 1e-3 * 100e6
    bits_per_param: float = 32.0
    bits_per_gradient: float = 32.0
    total_params: int = 1_241_220
    server_update_time_s: float = 0.01
    ops_per_param_sample: float = 10.0

    def __post_init__(self):
        for name in (
            "bandwidth_hz",
            "ap_tx_power_w",
            "worker_tx_power_w",
            "noise_variance_w",
            "bits_per_param",
            "bits_per_gradient",
            "total_params",
            "server_update_time_s",
            "ops_per_param_sample",
        ):
            _check_positive(name, float(getattr(self, name)))


@dataclass(frozen=True)
class WorkerProfile:
    cpu_freq_hz: float
    data_samples: float

    def __post_init__(self):
        _check_positive("cpu_freq_hz", float(self.cpu_freq_hz))
        _check_positive("data_samples", float(self.data_samples))


@dataclass(frozen=True)
class GroupTopology:
    """Worker-to-group membership; ``groups[k][n]`` is worker ``(k, n)``."""

    groups: tuple

    def __init__(self, groups: Sequence[Sequence[WorkerProfile]]):
        groups = tuple(tuple(g) for g in groups)
        if not groups:
            raise InvalidArgumentError("topology needs at least one group")
        for k, g in enumerate(groups):
            if not g:
                raise InvalidArgumentError(f"group {k} is empty")
        object.__setattr__(self, "groups", groups)

    @classmethod
    def from_arrays(cls, cpu_freq_hz, data_samples) -> "GroupTopology":
        """Build from ragged (or 2-D) per-worker arrays."""
        return cls(
            [
                [WorkerProfile(float(f), float(d)) for f, d in zip(fk, dk)]
                for fk, dk in zip(cpu_freq_hz, data_samples)
            ]
        )

    @property
    def n_groups(self) -> int:
        return len(self.groups)

    @property
    def sizes(self) -> list[int]:
        return [len(g) for g in self.groups]

    @property
    def n_workers(self) -> int:
        return sum(self.sizes)

    def cpu_freq(self) -> Ragged:
        return [np.array([w.cpu_freq_hz for w in g], dtype=float) for g in self.groups]

    def data_samples(self) -> Ragged:
        return [np.array([w.data_samples for w in g], dtype=float) for g in self.groups]

    def seconds_per_param(self, params: SystemParams) -> Ragged:
        """Computation time per assigned parameter, ``D * O / f``, per worker."""
        return [
            d * params.ops_per_param_sample / f
            for d, f in zip(self.data_samples(), self.cpu_freq())
        ]


def _ragged(values, sizes: Sequence[int], name: str) -> Ragged:
    out = [np.asarray(v, dtype=float).reshape(-1) for v in values]
    if [len(v) for v in out] != list(sizes):
        raise InvalidArgumentError(f"{name} shape does not match topology {list(sizes)}")
    return out


@dataclass
class ChannelState:
    """Per-worker power gains for one round."""

    downlink_gain: Ragged
    uplink_gain: Ragged

    def __post_init__(self):
        self.downlink_gain = [np.asarray(g, dtype=float) for g in self.downlink_gain]
        self.uplink_gain = [np.asarray(g, dtype=float) for g in self.uplink_gain]
        for g in self.downlink_gain + self.uplink_gain:
            if not np.all(np.isfinite(g)) or np.any(g < 0):
                raise InvalidArgumentError("channel gains must be finite and >= 0")

    def check_shape(self, topology: GroupTopology) -> None:
        _ragged(self.downlink_gain, topology.sizes, "downlink_gain")
        _ragged(self.uplink_gain, topology.sizes, "uplink_gain")


@dataclass
class RateTable:
    downlink_se: Ragged
    uplink_se: Ragged

    @classmethod
    def from_channels(cls, channels: ChannelState, params: SystemParams) -> "RateTable":
        n0 = params.noise_variance_w
        return cls(
            downlink_se=[spectral_efficiency(params.ap_tx_power_w, g, n0) for g in channels.downlink_gain],
            uplink_se=[spectral_efficiency(params.worker_tx_power_w, g, n0) for g in channels.uplink_gain],
        )


def spectral_efficiency(tx_power, gain, noise):
    """Shannon spectral efficiency ``log2(1 + P * H / N0)`` in bits/s/Hz.

    Works elementwise on arrays; returns a float for scalar input.
    """
    p = np.asarray(tx_power, dtype=float)
    h = np.asarray(gain, dtype=float)
    n0 = np.asarray(noise, dtype=float)
    for name, v in (("tx_power", p), ("gain", h), ("noise", n0)):
        if not np.all(np.isfinite(v)) or np.any(v < 0):
            raise InvalidArgumentError(f"{name} must be finite and >= 0")
    if np.any(n0 <= 0):
        raise InvalidArgumentError("noise must be > 0")
    out = np.log1p(p * h / n0) / np.log(2.0)
    return float(out) if out.ndim == 0 else out


def push_latency(params: SystemParams, rates: RateTable) -> float:
    """Broadcast time of the full model, set by the worst downlink."""
    worst = min(float(np.min(r)) for r in rates.downlink_se)
    if worst <= 0:
        raise InfeasibleError("a worker has zero downlink spectral efficiency")
    return params.bits_per_param * params.total_params / (params.bandwidth_hz * worst)


def computation_latency(worker: WorkerProfile, block_len: float, params: SystemParams) -> float:
    if block_len < 0:
        raise InvalidArgumentError("block_len must be >= 0")
    return block_len * worker.data_samples * params.ops_per_param_sample / worker.cpu_freq_hz


def upload_latency(block_len: float, bw_ratio: float, uplink_se: float, params: SystemParams) -> float:
    if block_len < 0 or bw_ratio < 0:
        raise InvalidArgumentError("block_len and bw_ratio must be >= 0")
    if block_len == 0:
        return 0.0
    if bw_ratio == 0 or uplink_se <= 0:
        raise InfeasibleError("non-empty block with zero uplink bandwidth or rate")
    return params.bits_per_gradient * block_len / (bw_ratio * params.bandwidth_hz * uplink_se)


def worker_latencies(
    topology: GroupTopology,
    channels: ChannelState,
    block_lens,
    bw_ratios,
    params: SystemParams,
) -> Ragged:
    """Push + compute + upload + server-update time for every worker."""
    channels.check_shape(topology)
    block_lens = np.asarray(block_lens, dtype=float)
    if block_lens.shape != (topology.n_groups,):
        raise InvalidArgumentError("block_lens must have one entry per group")
    ratios = _ragged(bw_ratios, topology.sizes, "bw_ratios")
    rates = RateTable.from_channels(channels, params)
    t_push = push_latency(params, rates)
    out = []
    for k, group in enumerate(topology.groups):
        b = float(block_lens[k])
        lat = [
            t_push
            + computation_latency(w, b, params)
            + upload_latency(b, float(ratios[k][n]), float(rates.uplink_se[k][n]), params)
            + params.server_update_time_s
            for n, w in enumerate(group)
        ]
        out.append(np.array(lat))
    return out


def group_latencies(topology, channels, block_lens, bw_ratios, params) -> np.ndarray:
    return np.array([lat.max() for lat in worker_latencies(topology, channels, block_lens, bw_ratios, params)])


def round_latency(topology, channels, block_lens, bw_ratios, params) -> float:
    return float(group_latencies(topology, channels, block_lens, bw_ratios, params).max())


def learning_latency(per_round: Sequence[float]) -> float:
    per_round = list(per_round)
    if not per_round:
        raise InvalidArgumentError("need at least one round")
    return float(math.fsum(per_round))


# dB helpers; every dBm/dB conversion in the package goes through these.
def dbm_to_watts(dbm):
    return 10.0 ** (np.asarray(dbm, dtype=float) / 10.0) * 1e-3


def db_to_linear(db):
    return 10.0 ** (np.asarray(db, dtype=float) / 10.0)


def noise_variance_w(density_dbm_hz: float, bandwidth_hz: float) -> float:
    """Noise power over the whole system band (fixed for every worker)."""
    return float(dbm_to_watts(density_dbm_hz)) * bandwidth_hz
