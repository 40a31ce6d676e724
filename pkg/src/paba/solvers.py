"""Parameter and bandwidth allocation solvers.

All solvers work on an :class:`Instance`, a padded array view of one round:
``a[k, n]`` is the compute time per parameter of worker ``(k, n)`` and
``c[k, n]`` its upload time per parameter when given the whole band. Padding
entries have ``a = c = 0`` and drop out of every sum. In that notation a
worker's latency is ``t0 + a*b_k + c*b_k/rho`` with ``t0`` the push plus
server-update overhead.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .core_model import ChannelState, GroupTopology, RateTable, SystemParams, push_latency
from .errors import InfeasibleError, InvalidArgumentError, SolverFailure


@dataclass(frozen=True)
class SolverOptions:
    """Numerical settings.

    ``bisect_tol_rel`` is the relative bracket width at which the outer latency
    search of the joint solvers stops. ``root_tol_rel`` is used for the cheap
    one-dimensional roots of the partial schemes. ``pd_step_lambda`` and
    ``pd_step_b`` scale the curvature-normalised dual and primal steps of the
    model-size maximisation (1.0 gives full Newton steps).
    """

    bisect_tol_rel: float = 1e-9
    root_tol_rel: float = 1e-12
    pd_step_lambda: float = 1.0
    pd_step_b: float = 1.0
    max_iters: int = 200
    kkt_tol: float = 1e-10

    def __post_init__(self):
        for name in ("bisect_tol_rel", "root_tol_rel", "kkt_tol"):
            v = getattr(self, name)
            if not 0 < v < 1:
                raise InvalidArgumentError(f"{name} must lie in (0, 1), got {v}")
        for name in ("pd_step_lambda", "pd_step_b"):
            if not getattr(self, name) > 0:
                raise InvalidArgumentError(f"{name} must be > 0")
        if self.max_iters < 1:
            raise InvalidArgumentError("max_iters must be >= 1")


@dataclass
class Allocation:
    block_lens: np.ndarray
    bw_ratios: list
    round_latency_s: float
    diagnostics: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        diag = {k: _jsonable(v) for k, v in self.diagnostics.items()}
        return {
            "block_lens": [int(b) for b in self.block_lens],
            "bw_ratios": [[float(r) for r in g] for g in self.bw_ratios],
            "round_latency_s": float(self.round_latency_s),
            "diagnostics": diag,
        }


def _jsonable(v):
    if isinstance(v, np.ndarray):
        return v.tolist()
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    return v


class Instance:
    """Padded per-worker cost arrays for one round."""

    def __init__(self, a, c, t0: float, n_params: float, sizes=None):
        a = [np.asarray(x, dtype=float).reshape(-1) for x in a]
        c = [np.asarray(x, dtype=float).reshape(-1) for x in c]
        if len(a) != len(c) or not a:
            raise InvalidArgumentError("a and c need the same, non-zero number of groups")
        self.sizes = [len(x) for x in a] if sizes is None else list(sizes)
        if [len(x) for x in c] != self.sizes or min(self.sizes) < 1:
            raise InvalidArgumentError("a and c must have matching non-empty groups")
        if any(np.any(~np.isfinite(x)) or np.any(x <= 0) for x in a):
            raise InvalidArgumentError("compute time per parameter must be finite and > 0")
        if any(np.any(~np.isfinite(x)) for x in c):
            raise InfeasibleError("a worker has zero uplink spectral efficiency")
        if any(np.any(x <= 0) for x in c):
            raise InvalidArgumentError("upload time per parameter must be > 0")
        if t0 < 0 or n_params <= 0:
            raise InvalidArgumentError("t0 must be >= 0 and n_params > 0")
        width = max(self.sizes)
        self.K = len(a)
        self.a = np.zeros((self.K, width))
        self.c = np.zeros((self.K, width))
        self.mask = np.zeros((self.K, width), dtype=bool)
        for k, (ak, ck) in enumerate(zip(a, c)):
            self.a[k, : len(ak)] = ak
            self.c[k, : len(ck)] = ck
            self.mask[k, : len(ak)] = True
        self.a_max = self.a.max(axis=1)
        self.c_sum = self.c.sum(axis=1)
        self.t0 = float(t0)
        self.n_params = float(n_params)

    @classmethod
    def build(cls, topology: GroupTopology, channels: ChannelState, params: SystemParams) -> "Instance":
        channels.check_shape(topology)
        rates = RateTable.from_channels(channels, params)
        for k, r in enumerate(rates.uplink_se):
            if np.any(r <= 0):
                raise InfeasibleError(f"zero uplink spectral efficiency in group {k}")
        c = [params.bits_per_gradient / (params.bandwidth_hz * r) for r in rates.uplink_se]
        t0 = push_latency(params, rates) + params.server_update_time_s
        return cls(topology.seconds_per_param(params), c, t0, params.total_params)

    @property
    def n_workers(self) -> int:
        return int(self.mask.sum())

    def ragged(self, m: np.ndarray) -> list:
        return [np.array(m[k, : self.sizes[k]]) for k in range(self.K)]

    def padded(self, ragged) -> np.ndarray:
        out = np.zeros(self.a.shape)
        for k, r in enumerate(ragged):
            r = np.asarray(r, dtype=float).reshape(-1)
            if len(r) != self.sizes[k]:
                raise InvalidArgumentError("per-worker array does not match group sizes")
            out[k, : len(r)] = r
        return out

    def worker_latency(self, b, rho) -> np.ndarray:
        """Padded latency matrix; padding entries are ``-inf``."""
        b = np.asarray(b, dtype=float)[:, None]
        loaded = (b > 0) & self.mask
        if np.any(loaded & (rho <= 0)):
            raise InfeasibleError("a loaded worker has no uplink bandwidth")
        with np.errstate(divide="ignore", invalid="ignore"):
            up = np.where(loaded, self.c * b / np.where(loaded, rho, 1.0), 0.0)
        lat = self.t0 + self.a * b + up
        return np.where(self.mask, lat, -np.inf)

    def round_latency(self, b, rho) -> float:
        return float(self.worker_latency(b, rho).max())

    # Functions of (b, t) used by the joint problem. ``tp`` is t - t0.
    def rho(self, b, tp) -> np.ndarray:
        b = np.asarray(b, dtype=float)[:, None]
        den = tp - self.a * b
        if np.any((den <= 0) & self.mask & (b > 0)):
            raise InfeasibleError("latency budget exhausted by computation")
        return np.where(b > 0, self.c * b / np.where(den > 0, den, 1.0), 0.0)

    def group_rate(self, b, tp) -> np.ndarray:
        den = tp - self.a * np.asarray(b, dtype=float)[:, None]
        return (self.c * tp / den**2).sum(axis=1)

    def group_rate_curvature(self, b, tp) -> np.ndarray:
        den = tp - self.a * np.asarray(b, dtype=float)[:, None]
        return (2.0 * self.a * self.c * tp / den**3).sum(axis=1)

    def block_cap(self, tp) -> np.ndarray:
        """Block length at which the slowest member has no time left to upload."""
        return tp / self.a_max


def _check_tp(tp: float) -> None:
    if not tp > 0:
        raise InvalidArgumentError("latency budget must exceed push plus server-update time")


# ---------------------------------------------------------------------------
# Scalar building blocks


def rho_of_b(block_len, t, compute_s_per_param, upload_s_per_param, overhead_s=0.0):
    """Bandwidth fraction a worker needs to finish a block of ``block_len`` within ``t``.

    ``upload_s_per_param`` is ``A_g / (B * R_u)``; ``overhead_s`` is push plus
    server-update time.
    """
    b = np.asarray(block_len, dtype=float)
    den = t - overhead_s - compute_s_per_param * b
    if np.any((den <= 0) & (b > 0)):
        raise InfeasibleError("non-positive time left for uploading")
    out = np.where(b > 0, upload_s_per_param * b / np.where(den > 0, den, 1.0), 0.0)
    return float(out) if out.ndim == 0 else out


def group_bw_rate(block_len, t, compute_s_per_param, upload_s_per_param, overhead_s=0.0) -> float:
    """Derivative of a group's total bandwidth fraction with respect to its block length.

    ``compute_s_per_param`` and ``upload_s_per_param`` hold one entry per group member.
    """
    a = np.asarray(compute_s_per_param, dtype=float)
    c = np.asarray(upload_s_per_param, dtype=float)
    tp = t - overhead_s
    den = tp - a * block_len
    if np.any(den <= 0):
        raise InfeasibleError("non-positive time left for uploading")
    return float(np.sum(c * tp / den**2))


def bisect_min_feasible(pred: Callable[[float], bool], lo: float, hi: float, rtol: float, max_iters: int):
    """Smallest ``t`` in ``(lo, hi]`` with ``pred(t)``, for monotone ``pred``.

    ``pred(hi)`` must hold. Returns ``(t, iterations)``; ``t`` always satisfies
    ``pred``.
    """
    it = 0
    while hi - lo > rtol * abs(hi):
        mid = 0.5 * (lo + hi)
        if not lo < mid < hi:
            break
        if pred(mid):
            hi = mid
        else:
            lo = mid
        it += 1
        if it > max_iters:
            raise SolverFailure(f"bisection did not reach rtol={rtol} in {max_iters} steps", [hi - lo])
    return hi, it


def round_block_lengths(b, n_params: int) -> np.ndarray:
    """Round groups ``1..K-1`` to the nearest integer and give the remainder to group ``K``.

    A negative remainder is repaired by taking one parameter back from the
    groups that were rounded up the most.
    """
    b = np.asarray(b, dtype=float)
    n_params = int(round(n_params))
    out = np.zeros(len(b), dtype=np.int64)
    out[:-1] = np.rint(b[:-1]).astype(np.int64)
    out[-1] = n_params - out[:-1].sum()
    if out[-1] < 0:
        excess = out[:-1] - b[:-1]
        for k in np.argsort(-excess, kind="stable"):
            if out[-1] >= 0:
                break
            if out[k] > 0:
                out[k] -= 1
                out[-1] += 1
    if out[-1] < 0 or np.any(out < 0):
        raise InvalidArgumentError("cannot round block lengths to a non-negative split")
    return out


def _default_opts(opts):
    return SolverOptions() if opts is None else opts


# ---------------------------------------------------------------------------
# Baseline and partial schemes


def proportional_block_lens(inst: Instance) -> np.ndarray:
    """Block lengths proportional to each group's slowest member's speed."""
    cap = 1.0 / inst.a_max
    return inst.n_params * cap / cap.sum()


def equal_bw_ratios(inst: Instance) -> np.ndarray:
    return np.where(inst.mask, 1.0 / inst.n_workers, 0.0)


def solve_baseline(inst: Instance) -> Allocation:
    b = round_block_lengths(proportional_block_lens(inst), inst.n_params)
    rho = equal_bw_ratios(inst)
    return Allocation(b, inst.ragged(rho), inst.round_latency(b, rho), {"scheme": "baseline"})


def baseline_allocation(topology, channels, params) -> Allocation:
    return solve_baseline(Instance.build(topology, channels, params))


def solve_param_alloc(inst: Instance, rho=None, opts=None) -> Allocation:
    """Best block lengths for fixed bandwidth fractions (padded ``rho``)."""
    opts = _default_opts(opts)
    rho = equal_bw_ratios(inst) if rho is None else np.asarray(rho, dtype=float)
    if np.any(rho[inst.mask] <= 0) or rho[inst.mask].sum() > 1 + 1e-9:
        raise InvalidArgumentError("bandwidth fractions must be > 0 and sum to at most 1")
    with np.errstate(divide="ignore"):
        per_param = np.where(inst.mask, inst.a + inst.c / np.where(inst.mask, rho, 1.0), -np.inf)
    cost = per_param.max(axis=1)
    n = inst.n_params

    def enough(t):
        return np.sum((t - inst.t0) / cost) >= n

    hi0 = inst.t0 + n * cost.min()
    t_star, iters = bisect_min_feasible(enough, inst.t0, hi0, opts.root_tol_rel, 10_000)
    b = (t_star - inst.t0) / cost
    b *= n / b.sum()
    relaxed_group = inst.t0 + cost * b
    bi = round_block_lengths(b, n)
    return Allocation(
        bi,
        inst.ragged(rho),
        inst.round_latency(bi, rho),
        {
            "scheme": "bw_aware_pa",
            "iterations": iters,
            "relaxed_block_lens": b,
            "relaxed_latency_s": float(relaxed_group.max()),
            "relaxed_group_latency_s": relaxed_group,
        },
    )


def bw_aware_param_alloc(topology, channels, params, given_bw_ratios=None, opts=None) -> Allocation:
    inst = Instance.build(topology, channels, params)
    rho = None if given_bw_ratios is None else inst.padded(given_bw_ratios)
    return solve_param_alloc(inst, rho, opts)


def optimal_bandwidth(inst: Instance, b, rtol: float = 1e-12):
    """Bandwidth fractions equalising every loaded worker's latency for fixed ``b``.

    Returns ``(t, rho, iterations)`` with ``rho`` padded and summing to one.
    """
    b = np.asarray(b, dtype=float)
    if np.any(b < 0) or not b.sum() > 0:
        raise InvalidArgumentError("block lengths must be >= 0 with a positive total")
    loaded = (b[:, None] > 0) & inst.mask
    load = np.where(loaded, inst.c * b[:, None], 0.0)
    busy = np.where(loaded, inst.t0 + inst.a * b[:, None], -np.inf)
    lo = busy.max()

    def fits(t):
        return np.sum(load / np.where(loaded, t - busy, 1.0)) <= 1.0

    hi = lo + load.sum()
    t, iters = bisect_min_feasible(fits, lo, hi, rtol, 10_000)
    rho = load / np.where(loaded, t - busy, 1.0)
    rho /= rho.sum()
    return t, rho, iters


def solve_bw_alloc(inst: Instance, b=None, opts=None) -> Allocation:
    opts = _default_opts(opts)
    b = proportional_block_lens(inst) if b is None else np.asarray(b, dtype=float)
    if b.shape != (inst.K,):
        raise InvalidArgumentError("need one block length per group")
    if abs(b.sum() - inst.n_params) > 1e-9 * inst.n_params + 1e-9:
        raise InvalidArgumentError("block lengths must sum to the model size")
    if np.all(b == np.rint(b)):
        bi = b.astype(np.int64)
    else:
        bi = round_block_lengths(b, inst.n_params)
    t, rho, iters = optimal_bandwidth(inst, bi, opts.root_tol_rel)
    return Allocation(
        bi,
        inst.ragged(rho),
        inst.round_latency(bi, rho),
        {"scheme": "pa_aware_ba", "iterations": iters, "relaxed_latency_s": t},
    )


def param_aware_bw_alloc(topology, channels, params, given_block_lens=None, opts=None) -> Allocation:
    return solve_bw_alloc(Instance.build(topology, channels, params), given_block_lens, opts)


# ---------------------------------------------------------------------------
# Model-size maximisation for a fixed latency budget


@dataclass
class ModelSizeResult:
    max_params: float
    block_lens: np.ndarray
    multiplier: float
    iterations: int
    residuals: list


def _best_response(inst: Instance, lam: float, tp: float, opts: SolverOptions, b_start=None):
    """Minimise ``-b_k + lam * sum_n rho_kn(b_k)`` for every group.

    Projected gradient steps with a curvature-scaled per-group step, kept
    inside a bracket around the stationary point.
    """
    target = 1.0 / lam
    cap = inst.block_cap(tp)
    idle = inst.c_sum / tp >= target
    lo = np.zeros(inst.K)
    hi = cap.copy()
    if b_start is None:
        # exact when all members share one compute speed
        guess = (tp - np.sqrt(tp * inst.c_sum / target)) / inst.a_max
        b = np.clip(guess, 0.0, cap * (1 - 1e-12))
    else:
        b = np.clip(b_start, 0.0, cap * (1 - 1e-12))
    b[idle] = 0.0
    # tight enough that block rounding errors stay well below kkt_tol in sum(rho)
    tol = 1e-3 * opts.kkt_tol * inst.n_params / inst.K
    for i in range(1, 200):
        g = inst.group_rate(b, tp)
        h = g - target
        lo = np.where(h < 0, b, lo)
        hi = np.where(h > 0, b, hi)
        # Newton on g**-0.5, which is linear in b when a group shares one compute speed
        step = opts.pd_step_b * 2.0 * g * (1.0 - np.sqrt(g / target)) / inst.group_rate_curvature(b, tp)
        b_new = b + step
        step[idle] = 0.0
        if np.max(np.abs(step)) <= tol:
            b_new[idle] = 0.0
            return np.clip(b_new, 0.0, cap * (1 - 1e-12)), i
        outside = ~((b_new >= lo) & (b_new < hi))
        b_new = np.where(outside, 0.5 * (lo + hi), b_new)
        b_new[idle] = 0.0
        change = np.max(np.abs(b_new - b))
        b = b_new
        if change <= tol or np.all((hi - lo)[~idle] <= 4 * np.spacing(hi[~idle])):
            return b, i
    raise SolverFailure("inner block-length loop did not converge")


def solve_model_size(inst: Instance, t: float, opts=None, lam0=None) -> ModelSizeResult:
    """Largest model that fits in latency ``t``, by projected primal-dual iteration."""
    opts = _default_opts(opts)
    tp = t - inst.t0
    _check_tp(tp)
    lam_hi = 1.0 / (inst.c_sum.min() / tp)  # every group idle at or above this
    lam_lo = 0.0
    lam = lam0 if lam0 is not None and 0 < lam0 < lam_hi else 0.5 * lam_hi
    residuals = []
    b = None
    total_inner = 0
    for it in range(1, opts.max_iters + 1):
        b, n_inner = _best_response(inst, lam, tp, opts, b)
        total_inner += n_inner
        resid = float(inst.rho(b, tp).sum() - 1.0)
        residuals.append(resid)
        if abs(resid) <= opts.kkt_tol:
            return ModelSizeResult(float(b.sum()), b, lam, it, residuals)
        if resid > 0:
            lam_lo = max(lam_lo, lam)
        else:
            lam_hi = min(lam_hi, lam)
        active = b > 0
        # d(sum rho)/d(lam) along the best response is -sum 1/(lam^3 g'')
        slope = np.sum(1.0 / (lam**3 * inst.group_rate_curvature(b, tp)[active]))
        lam_new = lam + opts.pd_step_lambda * resid / slope if slope > 0 else 0.0
        lam_new = max(lam_new, 0.0)
        if not lam_lo < lam_new < lam_hi:
            lam_new = math.sqrt(lam_lo * lam_hi) if lam_lo > 0 else 0.5 * lam_hi
        if lam_new == lam:
            break
        lam = lam_new
    raise SolverFailure(f"model-size maximisation did not converge at t={t}", residuals)


def model_size_max(topology, channels, params, t: float, opts=None):
    """Return ``(max_params, block_lens)`` for latency budget ``t``."""
    res = solve_model_size(Instance.build(topology, channels, params), t, opts)
    return res.max_params, res.block_lens


# ---------------------------------------------------------------------------
# Joint allocation


def _search_latency(inst: Instance, size_at: Callable, opts: SolverOptions):
    """Smallest ``t`` whose maximal model size reaches ``n_params``.

    ``size_at(t)`` returns ``(max_params, block_lens)``.
    """
    n = inst.n_params
    span0 = n * np.min(inst.a_max + inst.c_sum) / inst.K
    span = span0
    best = None
    while True:
        res = size_at(inst.t0 + span)
        if res[0] >= n:
            best = (inst.t0 + span, res)
            break
        if span > span0 * 2.0**40:
            raise InfeasibleError("no latency budget within the search range fits the model")
        span *= 2.0
    lo, hi = inst.t0, best[0]
    iters = 0
    while hi - lo > opts.bisect_tol_rel * hi:
        mid = 0.5 * (lo + hi)
        if not lo < mid < hi:
            break
        res = size_at(mid)
        if res[0] >= n:
            hi, best = mid, (mid, res)
        else:
            lo = mid
        iters += 1
    return best[0], best[1], iters


def _finish_joint(inst: Instance, t_upper, size, b, opts, scheme, diag) -> Allocation:
    b_relaxed = np.asarray(b, dtype=float) * (inst.n_params / size)
    t_relaxed, rho_relaxed, _ = optimal_bandwidth(inst, b_relaxed, opts.root_tol_rel)
    bi = round_block_lengths(b_relaxed, inst.n_params)
    _, rho, _ = optimal_bandwidth(inst, bi, opts.root_tol_rel)
    diag = dict(diag)
    diag.update(
        scheme=scheme,
        latency_upper_s=t_upper,
        relaxed_block_lens=b_relaxed,
        relaxed_latency_s=t_relaxed,
    )
    return Allocation(bi, inst.ragged(rho), inst.round_latency(bi, rho), diag)


def solve_joint(inst: Instance, opts=None) -> Allocation:
    opts = _default_opts(opts)
    state = {"lam": None, "inner": 0}

    def size_at(t):
        r = solve_model_size(inst, t, opts, state["lam"])
        state["lam"] = r.multiplier
        state["inner"] += r.iterations
        return r.max_params, r.block_lens

    t_up, (size, b), iters = _search_latency(inst, size_at, opts)
    return _finish_joint(
        inst, t_up, size, b, opts, "joint", {"iterations": iters, "dual_iterations": state["inner"]}
    )


def joint_paba(topology, channels, params, opts=None) -> Allocation:
    return solve_joint(Instance.build(topology, channels, params), opts)


def uniform_rate_residuals(inst: Instance, b, t: float) -> dict:
    """Optimality residuals of a joint solution: rate spread, bandwidth and size gaps."""
    b = np.asarray(b, dtype=float)
    tp = t - inst.t0
    rates = inst.group_rate(b, tp)[b > 0]
    return {
        "rate_spread": float((rates.max() - rates.min()) / rates.mean()),
        "bandwidth_gap": float(abs(inst.rho(b, tp).sum() - 1.0)),
        "size_gap": float(abs(b.sum() - inst.n_params) / inst.n_params),
    }


# ---------------------------------------------------------------------------
# Special cases with a shared compute speed inside each group


def _equal_speed_blocks(inst: Instance, tp: float, rate: float) -> np.ndarray:
    root = np.sqrt(tp * inst.c_sum / rate)
    return np.maximum(tp - root, 0.0) / inst.a_max


def _equal_speed_size(inst: Instance, t: float, rtol: float):
    """Model size at latency ``t`` with block lengths in closed form of the common rate."""
    tp = t - inst.t0
    _check_tp(tp)

    def used(rate):
        return inst.rho(_equal_speed_blocks(inst, tp, rate), tp).sum()

    lo = float((inst.c_sum / tp).min())  # all blocks empty
    hi = 2.0 * lo
    while used(hi) <= 1.0:
        lo, hi = hi, 2.0 * hi
    # bandwidth use grows with the rate; find where it reaches one
    rate, _ = bisect_min_feasible(lambda r: used(r) >= 1.0, lo, hi, rtol, 10_000)
    b = _equal_speed_blocks(inst, tp, rate)
    return float(b.sum()), b


def _solve_equal_speed(inst: Instance, opts, scheme) -> Allocation:
    opts = _default_opts(opts)
    t_up, (size, b), iters = _search_latency(
        inst, lambda t: _equal_speed_size(inst, t, opts.root_tol_rel), opts
    )
    return _finish_joint(inst, t_up, size, b, opts, scheme, {"iterations": iters})


def solve_uniform_group(inst: Instance, opts=None) -> Allocation:
    spread = np.where(inst.mask, inst.a, inst.a_max[:, None])
    if np.any(np.abs(spread - inst.a_max[:, None]) > 1e-12 * inst.a_max[:, None]):
        raise InvalidArgumentError("workers inside a group must share compute time per parameter")
    return _solve_equal_speed(inst, opts, "uniform_group_special")


def solve_single_worker(inst: Instance, opts=None) -> Allocation:
    if any(s != 1 for s in inst.sizes):
        raise InvalidArgumentError("every group must contain exactly one worker")
    return _solve_equal_speed(inst, opts, "single_worker_special")


def single_worker_special(topology, channels, params, opts=None) -> Allocation:
    if any(s != 1 for s in topology.sizes):
        raise InvalidArgumentError("every group must contain exactly one worker")
    return solve_single_worker(Instance.build(topology, channels, params), opts)


def uniform_group_special(topology, channels, params, opts=None) -> Allocation:
    return solve_uniform_group(Instance.build(topology, channels, params), opts)


SCHEMES = {
    "baseline": lambda inst, opts: solve_baseline(inst),
    "bw_aware_pa": lambda inst, opts: solve_param_alloc(inst, None, opts),
    "pa_aware_ba": lambda inst, opts: solve_bw_alloc(inst, None, opts),
    "joint": solve_joint,
    "single_worker_special": solve_single_worker,
    "uniform_group_special": solve_uniform_group,
}


def solve(scheme: str, inst: Instance, opts=None) -> Allocation:
    try:
        fn = SCHEMES[scheme]
    except KeyError:
        raise InvalidArgumentError(f"unknown scheme {scheme!r}; choose from {sorted(SCHEMES)}") from None
    return fn(inst, opts)
