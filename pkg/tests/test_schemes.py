"""Scheme parameters, the rank calculus and the coefficient matrices."""

import itertools
from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from delayed_csit import field as ff
from delayed_csit.config import AntennaConfig, ConfigClass, classify, normalize
from delayed_csit.geometry import DofPoint
from delayed_csit.regions import named_corners
from delayed_csit.schemes import (
    SchemeError,
    SchemeSpec,
    build_coefficient_matrix,
    corner_labels,
    corner_scheme,
    count_constraints,
    generic_spec,
    omega_allocation,
    omega_bounds,
    rank_condition,
    rank_terms,
    sampled_ranks,
    trial_seeds,
)


def test_counting_two_by_two_example():
    cfg = normalize(2, 2, 1, 1)
    spec = generic_spec(cfg, 3, 1, 1)
    # receiver 1: 2*1 own + min(2,1)*1 interference <= 1*3
    assert count_constraints(spec, cfg) == (3, 3, 3, 3)
    t = rank_terms(cfg, spec, 1)
    assert t.unknowns == 3 and t.predicted_rank == 3
    assert rank_condition(cfg, spec) == (True, True)
    assert spec.dof == DofPoint(F(2, 3), F(2, 3))


def test_counterexample_rank_by_hand():
    cfg = normalize(2, 6, 3, 4)
    spec = generic_spec(cfg, 3, 3, 1)
    lhs1, rhs1, lhs2, rhs2 = count_constraints(spec, cfg)
    assert lhs1 <= rhs1 and lhs2 <= rhs2
    t = rank_terms(cfg, spec, 2)
    assert (t.unknowns, t.predicted_rank) == (12, 11)
    assert rank_condition(cfg, spec) == (True, False)


def test_tie_orders_agree():
    cfg = normalize(3, 4, 2, 3)
    spec = generic_spec(cfg, 5, 2, 2)
    assert rank_terms(cfg, spec, 1).i_max == 2


def test_spec_validation():
    with pytest.raises(SchemeError):
        SchemeSpec(3, 4, 1, 1, 1)
    with pytest.raises(SchemeError):
        SchemeSpec(0, 0, 0, 1, 1)
    with pytest.raises(SchemeError):
        SchemeSpec(3, 1, 1, 0, 1)
    with pytest.raises(SchemeError):
        SchemeSpec(3, 1, 1, True, 1)


def test_reduced_keeps_dof():
    spec = SchemeSpec(6, 2, 4, 2, 3)
    red = spec.reduced()
    assert (red.w, red.w1, red.w2) == (3, 1, 2)
    assert red.dof == spec.dof


def test_corner_errors():
    with pytest.raises(SchemeError, match="valid corners: T7, T9"):
        corner_scheme(normalize(2, 6, 3, 4), "T8")
    with pytest.raises(SchemeError, match="time sharing"):
        corner_scheme(normalize(1, 1, 1, 1), "P3")


def test_symmetric_alias():
    cfg = normalize(2, 2, 1, 1)
    assert corner_scheme(cfg, "symmetric") == corner_scheme(cfg, "P3")


@pytest.mark.parametrize("low, high, w1, total", [(2, 4, 3, 9), (3, 3, 2, 6), (1, 5, 4, 13)])
def test_omega_allocation(low, high, w1, total):
    om = omega_allocation(low, high, w1, total)
    assert sum(om) == total and len(om) == w1
    assert all(low <= x <= high for x in om)
    assert list(om) == sorted(om, reverse=True)


def test_t9_streams_leave_at_most_m1_spare_rows():
    for raw in itertools.product(range(1, 9), repeat=4):
        cfg = normalize(*raw)
        if classify(cfg) is not ConfigClass.S2:
            continue
        m1, m2, n1, n2 = cfg.counts
        spec = corner_scheme(cfg, "T9")
        om = spec.payload["omega"]
        assert sum(om) == n2 * spec.w - n1 * n1
        assert all(n2 <= x <= min(m2, n1 + n2) and n1 + n2 - x <= m1 for x in om), (cfg, om)


def test_omega_bounds_example():
    # (2,6,3,4): rows per slot 7, tx-1 signal dimension 2
    assert omega_bounds(normalize(2, 6, 3, 4)) == (5, 6)
    assert corner_scheme(normalize(2, 6, 3, 4), "T9").payload["omega"] == (6, 5)


def test_omega_allocation_out_of_range():
    with pytest.raises(SchemeError):
        omega_allocation(2, 3, 2, 7)


def test_corner_dof_matches_closed_form_small():
    seen = set()
    for m1, m2, n1, n2 in itertools.product(range(1, 8), repeat=4):
        if n2 < n1:
            continue
        cfg = normalize(m1, m2, n1, n2)
        corners = named_corners(cfg)
        for label in corner_labels(cfg):
            spec = corner_scheme(cfg, label)
            assert spec.dof == corners[label], (cfg, label)
            if spec.is_generic:
                assert all(rank_condition(cfg, spec)), (cfg, label)
            seen.add(label)
    assert seen == {"Q3", "P3", "S3", "T4", "T5", "T6", "T7", "T8", "T9"}


def test_block_structure():
    cfg = normalize(2, 6, 3, 4)
    spec = generic_spec(cfg, 3, 3, 1)
    bm = build_coefficient_matrix(cfg, spec, 2, seed=5)
    # rows: N2 per slot; columns: own M2 W2 then min(M1, N2) W1
    assert bm.shape == (12, 6 + 6)
    assert bm.row_splits == (4, 12)
    blocks = bm.blocks
    assert blocks[(1, 1)].shape == (4, 6)
    assert blocks[(3, 1)].shape == (0, 6)
    assert bm.rank() == 11


def test_sampled_ranks_match_single_builds():
    cfg = normalize(3, 4, 2, 3)
    spec = generic_spec(cfg, 5, 3, 2)
    seeds = trial_seeds(7, cfg.counts + (5, 3, 2), 4)
    ranks = sampled_ranks(cfg, spec, seeds)
    for k, s in enumerate(seeds):
        for r in (1, 2):
            assert ranks[k, r - 1] == build_coefficient_matrix(cfg, spec, r, seed=int(s)).rank()


@settings(max_examples=25, deadline=None)
@given(
    st.tuples(st.integers(1, 4), st.integers(1, 4), st.integers(1, 4), st.integers(1, 4)),
    st.integers(2, 5),
    st.data(),
)
def test_real_and_prime_field_ranks_agree(counts, w, data):
    cfg = normalize(*counts)
    w1 = data.draw(st.integers(1, w - 1))
    w2 = data.draw(st.integers(1, w - 1))
    spec = generic_spec(cfg, w, w1, w2)
    for r in (1, 2):
        fp = build_coefficient_matrix(cfg, spec, r, seed=3, field="fp")
        real = build_coefficient_matrix(cfg, spec, r, seed=3, field="real")
        assert fp.rank() == real.rank()


def test_rank_formula_overcounts_shared_phase_two_space():
    # Found by the exhaustive rank oracle: the phase-two own terms seen in
    # row blocks 2 and 3 share one column space, so the closed form
    # counts it twice. Exact rank is one short here in both fields.
    cfg = normalize(1, 3, 1, 2)
    spec = generic_spec(cfg, 5, 4, 2)
    t = rank_terms(cfg, spec, 2)
    assert t.predicted_rank == 10
    for fld in ("fp", "real"):
        assert build_coefficient_matrix(cfg, spec, 2, seed=11, field=fld).rank() == 9


def test_trial_seeds_are_deterministic_and_distinct():
    a = trial_seeds(0, (1, 2, 3), 50)
    assert np.array_equal(a, trial_seeds(0, (1, 2, 3), 50))
    assert len(set(a.tolist())) == 50
    assert not np.array_equal(a, trial_seeds(1, (1, 2, 3), 50))


def test_field_solve_and_rank():
    rng = np.random.default_rng(0)
    a = ff.random_elements(rng, (5, 5))
    x = ff.random_elements(rng, (5, 1))
    b = ff.matmul(a, x)
    r, sol = ff.solve(a, b)
    assert r == 5 and np.array_equal(sol, x)
    singular = a.copy()
    singular[4] = (singular[0] + singular[1]) % ff.P
    assert ff.rank(singular) == 4
    assert ff.solve(singular, b)[1] is None


@pytest.mark.parametrize(
    "counts, label",
    [((2, 2, 1, 1), "P3"), ((3, 5, 2, 3), "Q3"), ((1, 3, 2, 3), "S3"), ((2, 6, 3, 4), "T7"), ((3, 7, 4, 5), "T7")],
)
def test_corner_ranks_match_formula_over_many_seeds(counts, label):
    cfg = normalize(*counts)
    spec = corner_scheme(cfg, label)
    pred = [rank_terms(cfg, spec, r).predicted_rank for r in (1, 2)]
    ranks = sampled_ranks(cfg, spec, trial_seeds(0, counts, 200))
    assert (ranks == np.array(pred)).all()


@settings(max_examples=80, deadline=None)
@given(st.integers(1, 6), st.integers(1, 6), st.integers(1, 6), st.integers(2, 9), st.data())
def test_rank_terms_relabelling(m1, m2, n, w, data):
    # with equal receive antennas the users can be swapped without
    # renormalizing; swapping them (and W1 with W2) swaps the receivers
    w1 = data.draw(st.integers(1, w - 1))
    w2 = data.draw(st.integers(1, w - 1))
    a, b = AntennaConfig(m1, m2, n, n), AntennaConfig(m2, m1, n, n)
    sa, sb = generic_spec(a, w, w1, w2), generic_spec(b, w, w2, w1)
    for r in (1, 2):
        ta, tb = rank_terms(a, sa, r), rank_terms(b, sb, 3 - r)
        assert (ta.unknowns, ta.predicted_rank) == (tb.unknowns, tb.predicted_rank)


@pytest.mark.parametrize("counts", [(3, 5, 2, 3), (2, 2, 1, 1), (4, 5, 2, 3), (5, 5, 2, 4)])
def test_counting_tight_at_q3_p3(counts):
    cfg = normalize(*counts)
    label = "Q3" if classify(cfg) is ConfigClass.C3 else "P3"
    lhs1, rhs1, lhs2, rhs2 = count_constraints(corner_scheme(cfg, label), cfg)
    assert (lhs1, lhs2) == (rhs1, rhs2)
