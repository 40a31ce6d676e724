"""Brute-force and bisection-only reference solvers used to cross-check the main solvers."""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgumentError
from .solvers import Allocation, Instance, optimal_bandwidth, rho_of_b, round_block_lengths


@dataclass(frozen=True)
class GridSpec:
    """Simplex grid over block lengths.

    ``bounds`` optionally restricts each group's share of the model to
    ``[lo, hi]`` (fractions of the model size).
    """

    grid_points_per_dim: int = 41
    refine: bool = True
    refine_factor: int = 10
    bounds: tuple | None = None
    max_groups: int = 4

    def __post_init__(self):
        if self.grid_points_per_dim < 3:
            raise InvalidArgumentError("grid_points_per_dim must be >= 3")
        if self.refine_factor < 2:
            raise InvalidArgumentError("refine_factor must be >= 2")


def _compositions(total: int, parts: int):
    for cut in itertools.combinations(range(total + parts - 1), parts - 1):
        prev = -1
        out = []
        for c in cut:
            out.append(c - prev - 1)
            prev = c
        out.append(total + parts - 2 - prev)
        yield out


def _within(share, bounds) -> bool:
    if bounds is None:
        return True
    return all(lo - 1e-12 <= s <= hi + 1e-12 for s, (lo, hi) in zip(share, bounds))


def grid_search(inst: Instance, grid: GridSpec = GridSpec()) -> Allocation:
    """Exhaustive search over block lengths, each with its optimal bandwidth split."""
    K = inst.K
    if K > grid.max_groups:
        raise InvalidArgumentError(f"grid search limited to {grid.max_groups} groups, got {K}")
    if grid.bounds is not None and len(grid.bounds) != K:
        raise InvalidArgumentError("need one (lo, hi) bound per group")
    n = inst.n_params
    steps = grid.grid_points_per_dim - 1
    evaluated = 0

    def latency(b):
        nonlocal evaluated
        evaluated += 1
        return optimal_bandwidth(inst, b)[0]

    best_t, best_b = np.inf, None
    for comp in _compositions(steps, K):
        share = np.array(comp, dtype=float) / steps
        if not _within(share, grid.bounds):
            continue
        t = latency(share * n)
        if t < best_t:
            best_t, best_b = t, share * n
    if best_b is None:
        raise InvalidArgumentError("grid bounds exclude every point")

    if grid.refine and K > 1:
        fine = 1.0 / (steps * grid.refine_factor)
        centre = best_b / n
        span = range(-grid.refine_factor, grid.refine_factor + 1)
        for offs in itertools.product(span, repeat=K - 1):
            head = centre[:-1] + np.array(offs) * fine
            share = np.append(head, 1.0 - head.sum())
            if np.any(share < -1e-12) or not _within(share, grid.bounds):
                continue
            share = np.clip(share, 0.0, None)
            t = latency(share * n)
            if t < best_t:
                best_t, best_b = t, share * n

    t, rho, _ = optimal_bandwidth(inst, best_b)
    return Allocation(
        round_block_lengths(best_b, n),
        inst.ragged(rho),
        t,
        {"scheme": "grid_search", "grid_block_lens": best_b, "evaluated": evaluated},
    )


def grid_search_joint(topology, channels, params, grid: GridSpec = GridSpec()) -> Allocation:
    return grid_search(Instance.build(topology, channels, params), grid)


def _bisect_groups(f, lo, hi, target, iters=200):
    """Vectorised bisection for increasing ``f`` with ``f(lo) <= target < f(hi)``."""
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        above = f(mid) > target
        hi = np.where(above, mid, hi)
        lo = np.where(above, lo, mid)
        if np.all(hi - lo <= 2 * np.spacing(hi)):
            break
    return lo


def rate_equalization(inst: Instance, t: float, rtol: float = 1e-13):
    """Largest model size at latency ``t`` by equalising the group bandwidth rates.

    Outer bisection on the common rate until the whole band is used; inner
    per-group bisection on the block length that attains that rate.
    """
    tp = t - inst.t0
    if not tp > 0:
        raise InvalidArgumentError("latency budget must exceed push plus server-update time")
    cap = inst.block_cap(tp)
    zero_rate = inst.c_sum / tp

    def blocks(rate):
        b = _bisect_groups(lambda x: inst.group_rate(x, tp), np.zeros(inst.K), cap, rate)
        return np.where(zero_rate >= rate, 0.0, b)

    def used(rate):
        return inst.rho(blocks(rate), tp).sum()

    lo = float(zero_rate.min())
    hi = 2.0 * lo
    while used(hi) <= 1.0:
        lo, hi = hi, 2.0 * hi
    while hi - lo > rtol * hi:
        mid = 0.5 * (lo + hi)
        if not lo < mid < hi:
            break
        if used(mid) > 1.0:
            hi = mid
        else:
            lo = mid
    b = blocks(lo)
    return float(b.sum()), b


def rate_equalization_p6(topology, channels, params, t: float, opts=None):
    return rate_equalization(Instance.build(topology, channels, params), t)


def finite_diff_rate(block_len, t, compute_s_per_param, upload_s_per_param, overhead_s=0.0, h=1.0) -> float:
    """Central difference of a group's total bandwidth fraction in its block length."""
    a = np.asarray(compute_s_per_param, dtype=float)
    c = np.asarray(upload_s_per_param, dtype=float)
    cap = (t - overhead_s) / a.max()
    if h <= 0 or block_len - h < 0 or block_len + h >= cap:
        raise InvalidArgumentError("block_len +/- h must stay inside [0, cap)")

    def total(b):
        return float(np.sum(rho_of_b(np.full(a.shape, b), t, a, c, overhead_s)))

    return (total(block_len + h) - total(block_len - h)) / (2.0 * h)
