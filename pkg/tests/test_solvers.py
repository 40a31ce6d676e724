import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import instances, tiny
from paba.core_model import ChannelState, GroupTopology, SystemParams
from paba.errors import InfeasibleError, InvalidArgumentError
from paba.simulator import Scenario, build_instance
from paba.solvers import (
    SCHEMES,
    Instance,
    SolverOptions,
    bisect_min_feasible,
    group_bw_rate,
    joint_paba,
    optimal_bandwidth,
    rho_of_b,
    round_block_lengths,
    solve,
    solve_bw_alloc,
    solve_model_size,
    solve_param_alloc,
    uniform_group_special,
    uniform_rate_residuals,
)

ZERO = 1e-300  # compute time that is numerically absent but keeps a > 0


# --- baseline ------------------------------------------------------------------


def test_baseline_proportional_to_capability():
    inst = tiny([[0.5], [1.0]], [[1.0], [1.0]], n_params=300)
    alloc = solve("baseline", inst)
    assert alloc.block_lens.tolist() == [200, 100]
    assert [r.tolist() for r in alloc.bw_ratios] == [[0.5], [0.5]]


def test_baseline_symmetric_and_single_group():
    inst = tiny([[1e-6, 2e-6]] * 3, [[1e-7, 1e-7]] * 3, n_params=3000)
    alloc = solve("baseline", inst)
    assert alloc.block_lens.tolist() == [1000, 1000, 1000]
    assert np.allclose(np.concatenate(alloc.bw_ratios), 1 / 6)
    one = solve("baseline", tiny([[1e-6, 3e-6, 2e-6]], [[1e-7] * 3], n_params=77))
    assert one.block_lens.tolist() == [77]
    assert np.allclose(one.bw_ratios[0], 1 / 3)


# --- parameter allocation for fixed bandwidth ---------------------------------------


def test_param_alloc_two_groups_hand_solved():
    # equal rho = 0.5: per-parameter cost a + c / 0.5 = 1 us and 3 us
    inst = tiny([[0.5e-6], [1.5e-6]], [[0.25e-6], [0.75e-6]], n_params=4000)
    alloc = solve("bw_aware_pa", inst)
    assert alloc.diagnostics["relaxed_block_lens"] == pytest.approx([3000, 1000], rel=1e-10)
    assert alloc.diagnostics["relaxed_latency_s"] == pytest.approx(3e-3, rel=1e-10)
    assert alloc.block_lens.tolist() == [3000, 1000]
    assert alloc.round_latency_s == pytest.approx(3e-3, rel=1e-10)


def test_param_alloc_identical_groups_and_single_group():
    inst = tiny([[1e-6]] * 4, [[1e-7]] * 4, n_params=4000)
    assert solve("bw_aware_pa", inst).block_lens.tolist() == [1000] * 4
    one = tiny([[2e-6, 1e-6]], [[1e-7, 3e-7]], n_params=1000, t0=0.25)
    alloc = solve("bw_aware_pa", one)
    cost = max(2e-6 + 1e-7 / 0.5, 1e-6 + 3e-7 / 0.5)
    assert alloc.block_lens.tolist() == [1000]
    assert alloc.round_latency_s == pytest.approx(0.25 + cost * 1000, rel=1e-12)


def test_param_alloc_rejects_overfull_band():
    inst = tiny([[1e-6]] * 2, [[1e-7]] * 2, n_params=10)
    with pytest.raises(InvalidArgumentError):
        solve_param_alloc(inst, np.array([[0.7], [0.7]]))


@given(instances(max_groups=8))
def test_param_alloc_equalises_group_latency(inst):
    alloc = solve("bw_aware_pa", inst)
    d = alloc.diagnostics
    assert np.max(np.abs(d["relaxed_group_latency_s"] - d["relaxed_latency_s"])) <= 1e-9 * d["relaxed_latency_s"]
    assert d["relaxed_block_lens"].sum() == pytest.approx(inst.n_params, rel=1e-12)
    assert alloc.block_lens.sum() == round(inst.n_params)


@given(instances(), st.floats(1.5, 4.0))
def test_param_alloc_latency_linear_in_model_size(inst, factor):
    t1 = solve("bw_aware_pa", inst).diagnostics["relaxed_latency_s"]
    bigger = Instance(inst.ragged(inst.a), inst.ragged(inst.c), inst.t0, inst.n_params * factor)
    t2 = solve("bw_aware_pa", bigger).diagnostics["relaxed_latency_s"]
    assert t2 - inst.t0 == pytest.approx(factor * (t1 - inst.t0), rel=1e-9)


# --- bandwidth allocation for fixed blocks ----------------------------------------


def test_bw_alloc_two_equal_workers():
    inst = tiny([[ZERO], [ZERO]], [[1.0], [1.0]], n_params=2)
    t, rho, _ = optimal_bandwidth(inst, [1.0, 1.0])
    assert t == pytest.approx(2.0, rel=1e-12)
    assert rho[:, 0] == pytest.approx([0.5, 0.5], rel=1e-12)


def test_bw_alloc_slower_worker_gets_more_band():
    inst = tiny([[1.0], [ZERO]], [[1.0], [1.0]], n_params=2)
    t, rho, _ = optimal_bandwidth(inst, [1.0, 1.0])
    golden = (1 + math.sqrt(5)) / 2
    assert t == pytest.approx((3 + math.sqrt(5)) / 2, rel=1e-12)
    assert rho[:, 0] == pytest.approx([1 / golden, 1 - 1 / golden], rel=1e-12)


def test_bw_alloc_single_worker_takes_whole_band():
    inst = tiny([[2.0]], [[3.0]], n_params=4, t0=1.0)
    alloc = solve("pa_aware_ba", inst)
    assert alloc.bw_ratios[0].tolist() == [1.0]
    # 1 + 2*4 + 3*4/1
    assert alloc.round_latency_s == pytest.approx(21.0, rel=1e-12)


def test_bw_alloc_given_blocks_must_sum_to_model_size():
    inst = tiny([[1e-6]] * 2, [[1e-7]] * 2, n_params=10)
    with pytest.raises(InvalidArgumentError):
        solve_bw_alloc(inst, [3, 3])


@given(instances(max_groups=8))
def test_bw_alloc_equalises_worker_latency(inst):
    alloc = solve("pa_aware_ba", inst)
    rho = inst.padded(alloc.bw_ratios)
    lat = inst.worker_latency(alloc.block_lens, rho)
    loaded = inst.mask & (alloc.block_lens[:, None] > 0)
    assert (lat[loaded].max() - lat[loaded].min()) <= 1e-9 * lat[loaded].max()
    assert rho.sum() == pytest.approx(1.0, abs=1e-12)
    assert np.all(rho >= 0)


def test_bw_alloc_latency_strictly_decreasing_in_bandwidth():
    prev = math.inf
    for bw in (20e6, 40e6, 70e6, 100e6, 140e6):
        t = solve("pa_aware_ba", build_instance(Scenario(bandwidth_hz=bw), 0, 1)).diagnostics["relaxed_latency_s"]
        assert t < prev
        prev = t


# --- scalar helpers ----------------------------------------------------------------


def test_rho_of_b_examples():
    assert rho_of_b(1.0, 2.0, 1.0, 1.0) == 1.0
    assert rho_of_b(0.0, 2.0, 1.0, 1.0) == 0.0
    assert rho_of_b(1.0, 1e12, 1.0, 1.0) < 1e-11
    with pytest.raises(InfeasibleError):
        rho_of_b(2.0, 2.0, 1.0, 1.0)


@given(st.floats(0.01, 0.9), st.floats(1.01, 2.0))
def test_rho_of_b_monotone(frac, factor):
    t = 2.0
    b = frac * t
    assert rho_of_b(b * min(factor, 0.99 / frac), t, 1.0, 1.0) >= rho_of_b(b, t, 1.0, 1.0)
    assert rho_of_b(b, t * factor, 1.0, 1.0) < rho_of_b(b, t, 1.0, 1.0)


def test_group_bw_rate_examples():
    assert group_bw_rate(1.0, 2.0, [1.0], [1.0]) == pytest.approx(2.0)
    assert group_bw_rate(0.0, 4.0, [1.0, 2.0], [1.0, 3.0], overhead_s=2.0) == pytest.approx((1 + 3) / 2)
    assert group_bw_rate(1.5, 2.0, [1.0], [1.0]) > group_bw_rate(1.0, 2.0, [1.0], [1.0])


def test_bisect_min_feasible_finds_threshold():
    t, _ = bisect_min_feasible(lambda x: x >= math.pi, 0.0, 10.0, 1e-12, 200)
    assert t >= math.pi and t == pytest.approx(math.pi, rel=1e-11)


def test_round_block_lengths():
    assert round_block_lengths([2.4, 3.6, 4.0], 10).tolist() == [2, 4, 4]
    # remainder would be negative; the most rounded-up group gives one back
    assert round_block_lengths([0.6, 0.6, 0.0], 1).tolist() == [0, 1, 0]


@given(st.lists(st.floats(0, 1e6), min_size=1, max_size=20))
def test_round_block_lengths_properties(xs):
    b = np.array(xs)
    n = int(round(b.sum()))
    if n == 0:
        return
    b = b * (n / b.sum())
    out = round_block_lengths(b, n)
    assert out.sum() == n and np.all(out >= 0)


# --- model-size maximisation and joint allocation ---------------------------------------


@pytest.mark.parametrize("t,expected", [(2.0, 1.0), (3.0, 1.5)])
def test_model_size_single_worker_closed_form(t, expected):
    res = solve_model_size(tiny([[1.0]], [[1.0]]), t)
    assert res.max_params == pytest.approx(expected, rel=1e-10)


def test_model_size_vanishes_without_budget():
    assert solve_model_size(tiny([[1.0]], [[1.0]], t0=1.0), 1.0 + 1e-9).max_params < 1e-8
    with pytest.raises(InvalidArgumentError):
        solve_model_size(tiny([[1.0]], [[1.0]], t0=1.0), 1.0)


@given(instances(), st.floats(0.05, 1.0), st.floats(1.05, 3.0))
def test_model_size_strictly_increasing(inst, frac, factor):
    span = inst.n_params * float(np.min(inst.a_max + inst.c_sum)) / inst.K
    t1 = inst.t0 + frac * span
    assert solve_model_size(inst, t1 * factor).max_params > solve_model_size(inst, t1).max_params


@given(instances())
def test_model_size_active_band_and_uniform_rate(inst):
    span = inst.n_params * float(np.min(inst.a_max + inst.c_sum)) / inst.K
    tp = 0.7 * span
    res = solve_model_size(inst, inst.t0 + tp)
    assert inst.rho(res.block_lens, tp).sum() == pytest.approx(1.0, abs=1e-9)
    rates = inst.group_rate(res.block_lens, tp)[res.block_lens > 0]
    assert rates.max() - rates.min() <= 1e-6 * rates.mean()
    assert np.all(res.block_lens < inst.block_cap(tp))


def test_joint_symmetric_groups():
    inst = tiny([[1e-6]] * 2, [[2e-7]] * 2, n_params=10_000, t0=0.1)
    alloc = solve("joint", inst)
    assert alloc.block_lens.tolist() == [5000, 5000]
    assert np.concatenate(alloc.bw_ratios) == pytest.approx([0.5, 0.5], rel=1e-9)


def test_joint_single_group_reduces_to_bandwidth_allocation():
    inst = tiny([[1e-6, 3e-6, 2e-6]], [[3e-7, 1e-7, 2e-7]], n_params=50_000, t0=0.05)
    joint = solve("joint", inst)
    ba = solve("pa_aware_ba", inst)
    assert joint.block_lens.tolist() == [50_000]
    assert joint.round_latency_s == pytest.approx(ba.round_latency_s, rel=1e-12)
    assert np.allclose(joint.bw_ratios[0], ba.bw_ratios[0], rtol=1e-9)


@given(instances())
def test_joint_invariants_and_kkt(inst):
    alloc = solve("joint", inst)
    assert alloc.block_lens.sum() == round(inst.n_params)
    assert np.all(alloc.block_lens >= 0)
    rho = np.concatenate(alloc.bw_ratios)
    assert np.all(rho >= 0) and rho.sum() <= 1 + 1e-12
    d = alloc.diagnostics
    res = uniform_rate_residuals(inst, d["relaxed_block_lens"], d["relaxed_latency_s"])
    assert res["rate_spread"] <= 1e-6
    assert res["bandwidth_gap"] <= 1e-8
    assert res["size_gap"] <= 1e-12


@given(instances())
def test_scheme_dominance(inst):
    t = {s: solve(s, inst).round_latency_s for s in ("baseline", "bw_aware_pa", "pa_aware_ba", "joint")}
    # block rounding can cost up to about one parameter's compute and upload time
    slack = 2.0 * float(np.max(inst.a_max + inst.c_sum)) * inst.K
    for partial in ("bw_aware_pa", "pa_aware_ba"):
        assert t["joint"] <= t[partial] + slack
        assert t[partial] <= t["baseline"] + slack


def test_rounding_loss_small_at_realistic_size():
    for draw in range(5):
        inst = build_instance(Scenario(), 0, draw)
        alloc = solve("joint", inst)
        relaxed = alloc.diagnostics["relaxed_latency_s"]
        assert abs(alloc.round_latency_s - relaxed) / relaxed <= 1e-3


def test_joint_performance_envelope_options():
    inst = build_instance(Scenario(), 0, 0)
    loose = solve("joint", inst, SolverOptions(bisect_tol_rel=1e-6))
    tight = solve("joint", inst)
    assert loose.round_latency_s == pytest.approx(tight.round_latency_s, rel=1e-5)


# --- special cases --------------------------------------------------------------


def test_single_worker_special_symmetric_and_rate_ordering():
    sym = tiny([[1e-6]] * 2, [[2e-7]] * 2, n_params=10_000)
    assert solve("single_worker_special", sym).block_lens.tolist() == [5000, 5000]
    # second worker uploads faster (smaller c) so gets more parameters
    asym = tiny([[1e-6]] * 2, [[4e-7], [1e-7]], n_params=10_000)
    b = solve("single_worker_special", asym).block_lens
    assert b[1] > b[0]


@pytest.mark.parametrize("seed", range(5))
def test_single_worker_special_matches_joint(seed):
    inst = build_instance(Scenario(n_groups=3, workers_per_group=1, seed=seed))
    a = solve("single_worker_special", inst).diagnostics["relaxed_latency_s"]
    b = solve("joint", inst).diagnostics["relaxed_latency_s"]
    assert a == pytest.approx(b, rel=1e-9)


def test_single_worker_special_rejects_groups():
    with pytest.raises(InvalidArgumentError):
        solve("single_worker_special", tiny([[1e-6, 1e-6]], [[1e-7, 1e-7]], n_params=10))


def _uniform_speed_cell(seed, k=4, n=3):
    rng = np.random.default_rng(seed)
    freqs = np.repeat(rng.uniform(1e8, 1e9, (k, 1)), n, axis=1)
    topo = GroupTopology.from_arrays(freqs, np.full((k, n), 1000.0))
    gains = lambda: [rng.uniform(1e-12, 1e-9, n) for _ in range(k)]  # noqa: E731
    return topo, ChannelState(gains(), gains()), SystemParams()


@pytest.mark.parametrize("seed", range(4))
def test_uniform_group_special_matches_joint(seed):
    topo, ch, params = _uniform_speed_cell(seed)
    a = uniform_group_special(topo, ch, params).diagnostics["relaxed_latency_s"]
    b = joint_paba(topo, ch, params).diagnostics["relaxed_latency_s"]
    assert a == pytest.approx(b, rel=1e-4)


def test_uniform_group_special_symmetric_and_rejects_mixed_speeds():
    sym = tiny([[1e-6, 1e-6]] * 2, [[1e-7, 2e-7]] * 2, n_params=1000)
    assert solve("uniform_group_special", sym).block_lens.tolist() == [500, 500]
    with pytest.raises(InvalidArgumentError):
        solve("uniform_group_special", tiny([[1e-6, 2e-6]], [[1e-7, 1e-7]], n_params=10))


# --- errors and options -----------------------------------------------------------


def test_zero_uplink_is_infeasible():
    topo = GroupTopology.from_arrays([[1e9, 1e9]], [[10, 10]])
    ch = ChannelState([[1e-9, 1e-9]], [[1e-9, 0.0]])
    with pytest.raises(InfeasibleError):
        joint_paba(topo, ch, SystemParams())


def test_unknown_scheme_and_bad_options():
    inst = tiny([[1.0]], [[1.0]])
    with pytest.raises(InvalidArgumentError):
        solve("nope", inst)
    for kw in ({"bisect_tol_rel": 0.0}, {"kkt_tol": 1.5}, {"pd_step_b": 0.0}, {"max_iters": 0}):
        with pytest.raises(InvalidArgumentError):
            SolverOptions(**kw)
    assert set(SCHEMES) >= {"baseline", "bw_aware_pa", "pa_aware_ba", "joint"}


def test_allocation_to_dict_is_json_ready():
    import json

    alloc = solve("joint", tiny([[1e-6]] * 2, [[2e-7], [1e-7]], n_params=1000))
    d = json.loads(json.dumps(alloc.to_dict()))
    assert sum(d["block_lens"]) == 1000
