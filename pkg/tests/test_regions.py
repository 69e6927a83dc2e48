"""DoF regions, corner points and the tightness verdict."""

import itertools
from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from delayed_csit.config import ConfigClass, ConfigError, MisoConfig, classify, is_boundary, normalize
from delayed_csit.geometry import DofPoint
from delayed_csit.regions import (
    ConsistencyError,
    achievable_region,
    c4_sum_dof,
    miso_bounds,
    miso_upper_via_cooperation,
    named_corners,
    no_csit_region,
    outer_bound,
    perfect_csit_region,
    region_bundle,
    tightness_case,
    tightness,
)


def _vs(poly):
    return set(poly.vertices)


def test_two_by_two_single_antenna_receivers():
    cfg = normalize(2, 2, 1, 1)
    ach = achievable_region(cfg)
    assert _vs(ach) == {DofPoint(0, 0), DofPoint(1, 0), DofPoint(F(2, 3), F(2, 3)), DofPoint(0, 1)}
    assert ach.equals(outer_bound(cfg))
    assert named_corners(cfg)["P3"] == DofPoint(F(2, 3), F(2, 3))
    assert ach.max_linear((1, 1)) == F(4, 3)


def test_s2_example_by_hand():
    cfg = normalize(2, 6, 3, 4)
    corners = named_corners(cfg)
    # T9 = (N1^2 / (M2 - lambda), N2 - N1^2 / (M2 - lambda)) with lambda = 1
    assert corners["T9"] == DofPoint(F(9, 5), F(11, 5))
    # T7 = (M1, (M2 - lambda)(N1 - M1)/N1)
    assert corners["T7"] == DofPoint(2, F(5, 3))
    assert _vs(achievable_region(cfg)) == {
        DofPoint(0, 0), DofPoint(2, 0), DofPoint(2, F(5, 3)), DofPoint(F(9, 5), F(11, 5)), DofPoint(0, 4)
    }
    b = region_bundle(cfg)
    assert not b.tight


def test_c3_corner_q3():
    cfg = normalize(3, 5, 2, 3)
    assert classify(cfg) is ConfigClass.C3
    # Q3 = (N1 (M2' - N2) / (M2' - N1), M2' (N2 - N1) / (M2' - N1)), M2' = 5
    assert named_corners(cfg)["Q3"] == DofPoint(F(4, 3), F(5, 3))


def test_perfect_csit_region_by_hand():
    poly = perfect_csit_region(normalize(2, 6, 3, 4))
    assert _vs(poly) == {DofPoint(0, 0), DofPoint(2, 0), DofPoint(2, 2), DofPoint(0, 4)}


def test_no_csit_region_class_six():
    cfg = normalize(2, 6, 3, 4)
    assert _vs(no_csit_region(cfg)) == {DofPoint(0, 0), DofPoint(2, 0), DofPoint(2, 1), DofPoint(0, 4)}


@pytest.mark.parametrize("n1, n2", [(1, 1), (1, 2), (2, 3), (3, 3), (2, 5)])
def test_c4_sum_dof_closed_form(n1, n2):
    m = n1 + n2 + 1
    cfg = normalize(m, m, n1, n2)
    expected = (1 - F(n1 * n2, n1 * n1 + n2 * n2 + n1 * n2)) * (n1 + n2)
    assert c4_sum_dof(cfg) == expected
    assert achievable_region(cfg).max_linear((1, 1)) == expected


def test_c4_sum_dof_rejects_other_classes():
    with pytest.raises(ConfigError):
        c4_sum_dof(normalize(2, 6, 3, 4))


def test_miso_bounds():
    lo, hi = miso_bounds(MisoConfig(3, 3))
    assert (lo, hi) == (F(9, 7), F(15, 7))
    assert miso_bounds(MisoConfig(2, 2)) == (F(4, 3), F(4, 3))
    for k in range(2, 7):
        mc = MisoConfig(k, k)
        assert miso_upper_via_cooperation(mc) == miso_bounds(mc)[1]
        assert miso_bounds(mc)[0] <= miso_bounds(mc)[1]


def _all(max_count):
    for m1, m2, n1, n2 in itertools.product(range(1, max_count + 1), repeat=4):
        if n2 >= n1:
            yield normalize(m1, m2, n1, n2)


def test_inclusion_chain_and_corners_small():
    for cfg in _all(6):
        b = region_bundle(cfg)
        b.check_inclusions()
        for label, p in b.corner_points:
            assert b.achievable.has_vertex(p), (cfg, label)


def test_case_predicate_never_contradicts_geometry():
    for cfg in _all(7):
        t = tightness(cfg)
        if t.case is not None:
            assert t.tight, cfg


def test_tightness_raises_on_contradiction():
    cfg = normalize(2, 2, 1, 1)
    with pytest.raises(ConsistencyError):
        tightness(cfg, achievable=no_csit_region(cfg))


@given(st.integers(1, 9), st.integers(1, 9), st.integers(1, 9), st.integers(1, 9))
def test_region_is_label_invariant(m1, m2, n1, n2):
    a = region_bundle(normalize(m1, m2, n1, n2))
    b = region_bundle(normalize(m2, m1, n2, n1))
    if n1 != n2:
        # both orders normalize to the same labelled channel
        assert a.achievable.vertices == b.achievable.vertices
    else:
        # equal receivers: swapping users mirrors the region
        assert _vs(a.achievable) == {DofPoint(v.d2, v.d1) for v in b.achievable.vertices}
    assert a.tight == b.tight


@given(st.integers(1, 8), st.integers(1, 8), st.integers(1, 8), st.integers(1, 8))
def test_json_is_exact_strings(m1, m2, n1, n2):
    data = region_bundle(normalize(m1, m2, n1, n2)).to_json()
    for v in data["regions"]["achievable"]["vertices"]:
        for x in v:
            num, den = x.split("/")
            assert int(den) > 0 and F(int(num), int(den)) >= 0


def test_boundary_configs_have_regions():
    for cfg in _all(6):
        if is_boundary(cfg):
            b = region_bundle(cfg)
            b.check_inclusions()
            assert tightness_case(cfg) is None or b.tight
