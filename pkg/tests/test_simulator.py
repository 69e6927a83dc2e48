"""Seeded replays over F_p: decoding, causality and the CSIT discipline."""

from fractions import Fraction as F

import numpy as np
import pytest

from delayed_csit.config import ConfigClass, ConfigError, MisoConfig, classify, normalize
from delayed_csit.schemes import SchemeError, corner_scheme, generic_spec
from delayed_csit.simulator import (
    CSV_COLUMNS,
    CausalityError,
    ChannelRealization,
    Fresh,
    LinearScheme,
    Retransmit,
    TxPlan,
    TxView,
    generic_scheme,
    miso_final_system,
    monte_carlo,
    monte_carlo_miso,
    replay,
    report_json,
    run_generic,
    run_miso,
    run_s1_t8,
    run_s2_t9,
    special_scheme,
    staged_decode,
    transmit,
    trials_to_csv,
)
from delayed_csit import field as ff

S1_CFG = normalize(3, 7, 4, 5)
S2_CFG = normalize(2, 6, 3, 4)


def test_example_configs_are_in_their_classes():
    assert classify(S1_CFG) is ConfigClass.S1
    assert classify(S2_CFG) is ConfigClass.S2


def test_generic_two_by_two_decodes():
    cfg = normalize(2, 2, 1, 1)
    rep = run_generic(cfg, generic_spec(cfg, 3, 1, 1), seed=4)
    assert rep.decoded and rep.rank_agrees
    assert rep.dof == (F(2, 3), F(2, 3))


def test_counterexample_receiver_two_fails():
    cfg = S2_CFG
    rep = run_generic(cfg, generic_spec(cfg, 3, 3, 1), seed=0)
    rx1, rx2 = rep.receivers
    assert rx1.decoded
    assert (rx2.achieved_rank, rx2.unknowns, rx2.decoded) == (11, 12, False)
    assert rep.dof is None


def test_monte_carlo_is_deterministic():
    cfg = normalize(2, 2, 1, 1)
    spec = generic_spec(cfg, 3, 1, 1)
    a = monte_carlo(cfg, spec, 5, base_seed=9)
    b = monte_carlo(cfg, spec, 5, base_seed=9)
    assert report_json(a) == report_json(b)
    assert trials_to_csv(a.reports) == trials_to_csv(b.reports)
    lines = trials_to_csv(a.reports).splitlines()
    assert lines[0].split(",") == list(CSV_COLUMNS)
    assert len(lines) == 6
    assert lines[1].endswith("2/3,2/3")


def test_monte_carlo_rejects_zero_trials():
    cfg = normalize(2, 2, 1, 1)
    with pytest.raises(ConfigError):
        monte_carlo(cfg, "P3", 0)


def test_tx_view_refuses_current_slot():
    ch = ChannelRealization(0, (1, 1), (2, 2), 3)
    view = TxView(ch, 0, 1)
    assert np.array_equal(view.own(1, 0), ch.h(1, 0, 0))
    with pytest.raises(CausalityError):
        view.own(1, 1)


def test_acausal_plan_is_caught():
    # transmitter one tries to retransmit the interference of the current slot
    comb = np.ones((1, 1), dtype=np.int64)
    plans = [
        TxPlan(1, 1, [Fresh(np.ones((1, 1), dtype=np.int64)), Retransmit(comb, ((1, 1),))]),
        TxPlan(1, 1, [Fresh(np.ones((1, 1), dtype=np.int64)), Fresh(np.ones((1, 1), dtype=np.int64))]),
    ]
    scheme = LinearScheme(2, (1, 1), plans, {(0, 1): None, (1, 0): None})
    with pytest.raises(CausalityError):
        replay(scheme, 0)


@pytest.mark.parametrize(
    "cfg, label",
    [(normalize(2, 2, 1, 1), "P3"), (S2_CFG, "T7"), (S2_CFG, "T9"), (S1_CFG, "T8"), (S1_CFG, "T5")],
)
@pytest.mark.parametrize("moved", [0, 1])
def test_signals_ignore_the_other_transmitters_channels(cfg, label, moved):
    spec = corner_scheme(cfg, label)
    seed = 21
    scheme = generic_scheme(cfg, spec, seed) if spec.is_generic else special_scheme(cfg, spec, seed)
    channels, tr = replay(scheme, seed)
    moved_channels = channels.perturbed(moved, seed=999)
    tr2 = transmit(scheme, moved_channels, seed)
    kept = 1 - moved
    for t in range(scheme.w):
        assert np.array_equal(tr.x[kept][t], tr2.x[kept][t]), (label, t)
    # the perturbation is real: the moved transmitter's links changed
    assert any(
        not np.array_equal(channels.h(k, moved, t), moved_channels.h(k, moved, t))
        for k in range(2)
        for t in range(scheme.w)
    )


def test_perturbed_copy_keeps_other_links():
    ch = ChannelRealization(3, (2, 3), (2, 4), 4)
    other = ch.perturbed(0, seed=8)
    for k in range(2):
        for t in range(4):
            assert np.array_equal(ch.h(k, 1, t), other.h(k, 1, t))


@pytest.mark.parametrize("cfg, label", [(S1_CFG, "T8"), (S2_CFG, "T9")])
@pytest.mark.parametrize("seed", [0, 1, 2, 3, 4])
def test_staged_solve_equals_joint_solve(cfg, label, seed):
    out = staged_decode(cfg, corner_scheme(cfg, label), seed)
    s1, s2 = out["truth"]
    assert out["joint"] is not None
    for est in (out["staged"], out["joint"]):
        assert np.array_equal(est[0], s1)
        assert np.array_equal(est[1], s2)


def test_staged_solve_needs_special_scheme():
    with pytest.raises(SchemeError):
        staged_decode(S2_CFG, corner_scheme(S2_CFG, "T7"), 0)


def test_special_runners_check_class():
    assert run_s2_t9(S2_CFG, 0).decoded
    assert run_s1_t8(S1_CFG, 0).decoded
    with pytest.raises(SchemeError):
        run_s1_t8(S2_CFG, 0)


def test_t9_reaches_corner():
    rep = run_s2_t9(S2_CFG, 5)
    assert rep.dof == (F(9, 5), F(11, 5))


@pytest.mark.parametrize("k", [2, 3, 4])
def test_miso_decodes(k):
    rep = run_miso(MisoConfig(k, k), 1)
    assert rep.decoded
    assert rep.w == k * k - k + 1
    assert rep.sum_dof == F(k * k, k * k - k + 1)


def test_miso_final_system_full_rank():
    m = miso_final_system(MisoConfig(3, 4), 2, receiver=2)
    assert m.shape == (3, 3)
    assert ff.rank(m) == 3


def test_miso_monte_carlo():
    mc = monte_carlo_miso(MisoConfig(3, 3), 5, base_seed=1)
    assert mc.decode_rate == 1
    assert sum(mc.dof) == F(9, 7)
