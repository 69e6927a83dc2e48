"""DoF regions of the two-user MIMO interference channel.

Builds the achievable region under delayed local CSIT, the perfect-CSIT
region, the delayed-CSIT broadcast bound obtained by letting the two
transmitters cooperate, and the no-CSIT reference region. The intersection
of the two outer bounds is compared exactly with the achievable region to
decide tightness.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .config import AntennaConfig, ConfigClass, ConfigError, MisoConfig, classify, derived, is_boundary
from .geometry import DofPoint, HalfPlane, Polytope2D, fraction_to_str


class ConsistencyError(AssertionError):
    """Two independent routes to the same quantity disagree."""


def eq2_halfplanes(cfg: AntennaConfig) -> list[HalfPlane]:
    """The four inequalities of the baseline achievable region (all kept)."""
    m1, m2, n1, n2 = cfg.counts
    d = derived(cfg)
    return [
        HalfPlane(1, 0, m1),
        HalfPlane(0, 1, m2),
        HalfPlane.from_intercepts(max(d.m1_prime, n2), n2),
        HalfPlane.from_intercepts(n1, max(d.m2_prime, n1)),
    ]


def alpha(cfg: AntennaConfig) -> Fraction:
    m1, _, n1, n2 = cfg.counts
    return Fraction(n1 * (n1 + n2), 2 * n1 + n2 - m1)


def named_corners(cfg: AntennaConfig) -> dict[str, DofPoint]:
    """Closed-form corner points of the achievable region, by class.

    Only the points that are corners of the achievable region for the
    configuration's class are returned.
    """
    m1, m2, n1, n2 = cfg.counts
    d = derived(cfg)
    m1p, m2p, lam = d.m1_prime, d.m2_prime, d.lam
    c = classify(cfg)
    F = Fraction
    pts: dict[str, tuple] = {}
    if c is ConfigClass.C3:
        pts = {
            "Q0": (0, 0),
            "Q1": (n1, 0),
            "Q2": (0, n2),
            "Q3": (F(n1 * (m2p - n2), m2p - n1), F(m2p * (n2 - n1), m2p - n1)),
        }
    elif c is ConfigClass.C4:
        den = m1p * m2p - n1 * n2
        pts = {
            "P0": (0, 0),
            "P1": (n1, 0),
            "P2": (0, n2),
            "P3": (F(m1p * n1 * (m2p - n2), den), F(m2p * n2 * (m1p - n1), den)),
        }
    elif c is ConfigClass.C5:
        pts = {"S0": (0, 0), "S1": (m1, 0), "S2": (0, m2), "S3": (m1, F(m2 * (n1 - m1), n1))}
    elif c.in_c6:
        pts = {"T0": (0, 0), "T1": (m1, 0), "T2": (0, n2)}
        if c in (ConfigClass.C61, ConfigClass.C62):
            pts["T4"] = (m1, n2 - m1)
        if c in (ConfigClass.C63, ConfigClass.S1):
            pts["T5"] = (F(n1 * (m2p - n2), m2p - n1), F(m2p * (n2 - n1), m2p - n1))
        if c is ConfigClass.C63:
            pts["T6"] = (m1, F(m2 * (n1 - m1), n1))
        if c.in_s:
            pts["T7"] = (m1, F((m2 - lam) * (n1 - m1), n1))
        if c is ConfigClass.S1:
            pts["T8"] = (F(n1 * (m1 - lam), n1 - lam), F(m2 * (n1 - m1), n1 - lam))
        if c is ConfigClass.S2:
            t9 = F(n1 * n1, m2 - lam)
            pts["T9"] = (t9, n2 - t9)
    return {k: DofPoint(*v) for k, v in pts.items()}


def reference_corners(cfg: AntennaConfig) -> dict[str, DofPoint]:
    """Class-six corners of the no-CSIT (T3) and perfect-CSIT (T4) regions."""
    if not classify(cfg).in_c6:
        return {}
    m1, _, n1, n2 = cfg.counts
    return {"T3": DofPoint(m1, n1 - m1), "T4": DofPoint(m1, n2 - m1)}


def achievable_region(cfg: AntennaConfig) -> Polytope2D:
    """Achievable DoF region with delayed local CSIT."""
    c = classify(cfg)
    if c is ConfigClass.S2:
        corners = named_corners(cfg)
        return Polytope2D.from_vertices([corners[k] for k in ("T0", "T1", "T2", "T7", "T9")])
    hs = eq2_halfplanes(cfg)
    if c is ConfigClass.S1:
        hs.append(HalfPlane.from_intercepts(alpha(cfg), cfg.n1 + cfg.n2))
    return Polytope2D.from_halfplanes(hs)


def perfect_csit_region(cfg: AntennaConfig) -> Polytope2D:
    m1, m2, n1, n2 = cfg.counts
    total = min(m1 + m2, n1 + n2, max(m1, n2), max(m2, n1))
    return Polytope2D.from_halfplanes(
        [HalfPlane(1, 0, min(m1, n1)), HalfPlane(0, 1, min(m2, n2)), HalfPlane(1, 1, total)]
    )


def bc_delayed_region(cfg: AntennaConfig) -> Polytope2D:
    """Delayed-CSIT broadcast region with the transmitters merged."""
    m1, m2, n1, n2 = cfg.counts
    m = m1 + m2
    return Polytope2D.from_halfplanes(
        [
            HalfPlane.from_intercepts(min(m, n1 + n2), min(m, n2)),
            HalfPlane.from_intercepts(min(m, n1), min(m, n1 + n2)),
        ]
    )


def no_csit_region(cfg: AntennaConfig) -> Polytope2D:
    m1, m2, n1, n2 = cfg.counts
    c = classify(cfg)
    if c is ConfigClass.C1:
        return Polytope2D.from_halfplanes(eq2_halfplanes(cfg))
    if c in (ConfigClass.C2, ConfigClass.C3, ConfigClass.C4):
        return Polytope2D.from_halfplanes([HalfPlane.from_intercepts(min(m1, n1), min(m2, n2))])
    if c is ConfigClass.C5:
        return Polytope2D.from_vertices([(m1, 0), (m1, n1 - m1), (0, m2)])
    return Polytope2D.from_vertices([(m1, 0), (m1, n1 - m1), (0, n2)])


def outer_bound(cfg: AntennaConfig) -> Polytope2D:
    return perfect_csit_region(cfg).intersect(bc_delayed_region(cfg))


def tightness_case(cfg: AntennaConfig) -> Optional[str]:
    """Return the first tightness case (a)-(e) the configuration meets."""
    m1, m2, n1, n2 = cfg.counts
    d = derived(cfg)
    if m2 <= n1:
        return "a"
    if n1 < m1 <= n2 and m2 >= n1 + n2:
        return "b"
    if min(m1, m2) >= n1 + n2:
        return "c"
    if d.delta is not None and m1 <= d.delta < n1 <= n2 < n1 + n2 - m1 < m2:
        return "d"
    if d.delta_prime is not None and m1 <= d.delta_prime < n1 <= n2 < m2 <= n1 + n2 - m1:
        return "e"
    return None


@dataclass(frozen=True)
class Tightness:
    tight: bool
    case: Optional[str]
    finding: Optional[str] = None


def tightness(cfg: AntennaConfig, achievable: Polytope2D | None = None, outer: Polytope2D | None = None) -> Tightness:
    """Decide tightness geometrically and cross-check against the case list.

    A case predicate that holds while the regions differ raises
    :class:`ConsistencyError`. The converse (tight with no matching case)
    is returned as a finding rather than raised.
    """
    achievable = achievable if achievable is not None else achievable_region(cfg)
    outer = outer if outer is not None else outer_bound(cfg)
    geometric = achievable.equals(outer)
    case = tightness_case(cfg)
    if case is not None and not geometric:
        raise ConsistencyError(f"{cfg}: case ({case}) predicts tightness but regions differ")
    finding = None
    if geometric and case is None:
        finding = f"{cfg} ({classify(cfg)}) is tight but matches none of cases (a)-(e)"
    return Tightness(geometric, case, finding)


@dataclass
class RegionBundle:
    cfg: AntennaConfig
    cls: ConfigClass
    achievable: Polytope2D
    perfect_csit: Polytope2D
    bc_delayed: Polytope2D
    no_csit: Polytope2D
    outer: Polytope2D
    tight: bool
    tight_case: Optional[str]
    corner_points: list[tuple[str, DofPoint]] = field(default_factory=list)
    reference_points: list[tuple[str, DofPoint]] = field(default_factory=list)
    finding: Optional[str] = None

    def check_inclusions(self) -> None:
        chain = [
            ("no_csit", self.no_csit, "achievable", self.achievable),
            ("achievable", self.achievable, "outer", self.outer),
            ("outer", self.outer, "perfect_csit", self.perfect_csit),
        ]
        for a_name, a, b_name, b in chain:
            if not a.issubset(b):
                raise ConsistencyError(f"{self.cfg}: {a_name} is not contained in {b_name}")

    def to_json(self) -> dict:
        return {
            "config": dict(zip(("m1", "m2", "n1", "n2"), self.cfg.counts)),
            "swapped": self.cfg.swapped,
            "class": str(self.cls),
            "boundary_completion": is_boundary(self.cfg),
            "derived": derived(self.cfg).to_json(),
            "regions": {
                "achievable": self.achievable.to_json(),
                "perfect_csit": self.perfect_csit.to_json(),
                "bc_delayed": self.bc_delayed.to_json(),
                "no_csit": self.no_csit.to_json(),
                "outer": self.outer.to_json(),
            },
            "corner_points": [{"label": k, "point": p.to_json()} for k, p in self.corner_points],
            "reference_points": [{"label": k, "point": p.to_json()} for k, p in self.reference_points],
            "tight": self.tight,
            "tight_case": self.tight_case,
            "finding": self.finding,
            "sum_dof": {
                "achievable": fraction_to_str(self.achievable.max_linear((1, 1))),
                "outer": fraction_to_str(self.outer.max_linear((1, 1))),
                "perfect_csit": fraction_to_str(self.perfect_csit.max_linear((1, 1))),
                "no_csit": fraction_to_str(self.no_csit.max_linear((1, 1))),
            },
        }


def region_bundle(cfg: AntennaConfig) -> RegionBundle:
    ach = achievable_region(cfg)
    pc = perfect_csit_region(cfg)
    bc = bc_delayed_region(cfg)
    outer = pc.intersect(bc)
    t = tightness(cfg, ach, outer)
    bundle = RegionBundle(
        cfg=cfg,
        cls=classify(cfg),
        achievable=ach,
        perfect_csit=pc,
        bc_delayed=bc,
        no_csit=no_csit_region(cfg),
        outer=outer,
        tight=t.tight,
        tight_case=t.case,
        corner_points=list(named_corners(cfg).items()),
        reference_points=list(reference_corners(cfg).items()),
        finding=t.finding,
    )
    return bundle


def c4_sum_dof(cfg: AntennaConfig) -> Fraction:
    """Sum-DoF of class C4 when both transmitters have ``>= n1 + n2`` antennas.

    The closed form is checked against a maximisation over the vertices
    of the achievable region.
    """
    m1, m2, n1, n2 = cfg.counts
    if classify(cfg) is not ConfigClass.C4 or min(m1, m2) < n1 + n2:
        raise ConfigError(f"{cfg} is not a class-C4 config with min(M1, M2) >= N1 + N2")
    closed = (1 - Fraction(n1 * n2, n1 * n1 + n2 * n2 + n1 * n2)) * (n1 + n2)
    by_vertices = achievable_region(cfg).max_linear((1, 1))
    if closed != by_vertices:
        raise ConsistencyError(f"{cfg}: closed form {closed} != vertex maximum {by_vertices}")
    return closed


def miso_bounds(mc: MisoConfig | int) -> tuple[Fraction, Fraction]:
    """Achievable and upper bounds on the K-user MISO sum-DoF.

    An integer ``K`` stands for ``K`` users with ``K`` antennas each; the
    bounds depend on ``K`` only once ``M >= K``.
    """
    if isinstance(mc, int) and not isinstance(mc, bool):
        mc = MisoConfig(mc, mc)
    mc.require_supported()
    k = mc.k
    den = k * k - k + 1
    return Fraction(k * k, den), Fraction(k * (k * k - 2 * k + 2), den)


def miso_upper_via_cooperation(mc: MisoConfig) -> Fraction:
    """Upper bound recomputed from the merged two-user C4 channel."""
    mc.require_supported()
    from .config import normalize

    merged = normalize((mc.k - 1) * mc.m, mc.m, mc.k - 1, 1)
    return c4_sum_dof(merged)
