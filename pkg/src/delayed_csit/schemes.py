"""Two-phase retrospective schemes, their rank calculus and coefficient matrices.

A generic scheme runs for ``W`` channel uses. Transmitter ``i`` sends
``M'_i`` fresh symbols per slot for its first ``W_i`` slots and afterwards
random combinations of the interference it created at the other receiver.
Receiver ``i`` then holds ``N_i W`` equations in its own ``M'_i W_i``
symbols and ``min(M'_j, N_i) W_j`` effective interference quantities.

:func:`build_coefficient_matrix` draws that system at random over ``F_p``
(or the reals) in its block form; :func:`rank_terms` gives the closed-form
rank the block calculus predicts for it.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Optional

import numpy as np
from numba import njit

from . import field as ff
from .config import AntennaConfig, ConfigClass, classify, derived
from .geometry import DofPoint


class SchemeError(ValueError):
    """Invalid scheme parameters or a corner the class does not have."""


class Variant(str, enum.Enum):
    GENERIC = "Generic"
    S1_T5 = "S1_T5"
    S1_T8 = "S1_T8"
    S2_T9 = "S2_T9"
    S_T7_REDUCTION = "S_T7_reduction"
    MISO = "Miso"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class SchemeSpec:
    """Phase lengths and symbol counts of one two-phase scheme.

    Parameters
    ----------
    w : int
        Total channel uses.
    w1, w2 : int
        Phase-one lengths of transmitters one and two. The special
        schemes use a common phase boundary, so ``w1 == w2`` there.
    tx1_symbols_per_phase1_slot, tx2_symbols_per_phase1_slot : int
        Fresh symbols per phase-one slot, i.e. the number of active
        antennas. For the generic scheme these are ``M'_1`` and ``M'_2``
        (or the reduced antenna count of an antenna-restricted corner).
    variant : Variant
    corner : str, optional
        Corner label the scheme was built for.
    payload : dict
        Special symbol counts: ``nu, nu1, nu2`` (T5), ``mu1, mu2`` (T8),
        ``eta1, eta2, omega`` (T9), ``m2_effective`` (T7 and the
        antenna-restricted T4).
    """

    w: int
    w1: int
    w2: int
    tx1_symbols_per_phase1_slot: int
    tx2_symbols_per_phase1_slot: int
    variant: Variant = Variant.GENERIC
    corner: Optional[str] = None
    payload: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        for name in ("w", "w1", "w2", "tx1_symbols_per_phase1_slot", "tx2_symbols_per_phase1_slot"):
            v = getattr(self, name)
            if isinstance(v, bool) or not isinstance(v, (int, np.integer)):
                raise SchemeError(f"{name} must be an integer, got {v!r}")
            object.__setattr__(self, name, int(v))
        if self.w < 1:
            raise SchemeError(f"W must be positive, got {self.w}")
        if not (0 <= self.w1 <= self.w and 0 <= self.w2 <= self.w):
            raise SchemeError(f"phase-one lengths must lie in [0, W]: W={self.w}, W1={self.w1}, W2={self.w2}")
        if min(self.tx1_symbols_per_phase1_slot, self.tx2_symbols_per_phase1_slot) < 1:
            raise SchemeError("each transmitter needs at least one active antenna")
        object.__setattr__(self, "variant", Variant(self.variant))
        self._check_payload()

    def _check_payload(self):
        p, v = self.payload, self.variant
        if v is Variant.S1_T5:
            m1 = self.tx1_symbols_per_phase1_slot
            if not (0 <= p["nu1"] <= m1 * self.w1 and 0 <= p["nu2"] <= m1 * (self.w - self.w1)):
                raise SchemeError(f"T5 symbol counts out of range: {p}")
        elif v is Variant.S2_T9:
            om = p["omega"]
            if len(om) != self.w1 or any(
                not (p["n2"] <= x <= self.tx2_symbols_per_phase1_slot) for x in om
            ):
                raise SchemeError(f"T9 stream counts out of range: {om}")

    @property
    def w_pair(self) -> tuple[int, int]:
        return (self.w1, self.w2)

    @property
    def m_eff(self) -> tuple[int, int]:
        return (self.tx1_symbols_per_phase1_slot, self.tx2_symbols_per_phase1_slot)

    @property
    def is_generic(self) -> bool:
        return self.variant in (Variant.GENERIC, Variant.S_T7_REDUCTION)

    def symbols(self, user: int) -> int:
        """Information symbols the scheme delivers to ``user`` over ``W`` slots."""
        p = self.payload
        if self.is_generic:
            return self.m_eff[user - 1] * self.w_pair[user - 1]
        if user == 1:
            key = {Variant.S1_T5: ("nu1", "nu2"), Variant.S1_T8: ("mu1", "mu2"), Variant.S2_T9: ("eta1", "eta2")}
            a, b = key[self.variant]
            return p[a] + p[b]
        if self.variant is Variant.S2_T9:
            return sum(p["omega"])
        return self.tx2_symbols_per_phase1_slot * self.w1

    @property
    def dof(self) -> DofPoint:
        return DofPoint(Fraction(self.symbols(1), self.w), Fraction(self.symbols(2), self.w))

    def reduced(self) -> SchemeSpec:
        """Same generic scheme with ``(W, W1, W2)`` divided by their gcd.

        Every count and rank term is homogeneous in the phase lengths, so
        the reduced scheme reaches the same DoF pair under the same rank
        conditions with smaller matrices.
        """
        if not self.is_generic:
            return self
        g = gcd(self.w, gcd(self.w1, self.w2))
        if g == 1:
            return self
        return SchemeSpec(
            self.w // g, self.w1 // g, self.w2 // g, *self.m_eff, self.variant, self.corner, dict(self.payload)
        )

    def to_json(self) -> dict:
        out = {
            "variant": str(self.variant),
            "corner": self.corner,
            "W": self.w,
            "W1": self.w1,
            "W2": self.w2,
            "tx1_symbols_per_phase1_slot": self.tx1_symbols_per_phase1_slot,
            "tx2_symbols_per_phase1_slot": self.tx2_symbols_per_phase1_slot,
            "dof": self.dof.to_json(),
        }
        out.update({k: (list(v) if isinstance(v, tuple) else v) for k, v in self.payload.items()})
        return out


def generic_spec(cfg: AntennaConfig, w: int, w1: int, w2: int, corner: Optional[str] = None) -> SchemeSpec:
    """Generic scheme with every transmitter using ``M'_i`` antennas."""
    d = derived(cfg)
    return SchemeSpec(w, w1, w2, d.m1_prime, d.m2_prime, Variant.GENERIC, corner)


# -- corner schemes -------------------------------------------------------

CORNERS_BY_CLASS = {
    ConfigClass.C1: (),
    ConfigClass.C2: (),
    ConfigClass.C3: ("Q3",),
    ConfigClass.C4: ("P3",),
    ConfigClass.C5: ("S3",),
    ConfigClass.C61: ("T4",),
    ConfigClass.C62: ("T4",),
    ConfigClass.C63: ("T5", "T6"),
    ConfigClass.S1: ("T5", "T7", "T8"),
    ConfigClass.S2: ("T7", "T9"),
}

ALIASES = {"symmetric": "P3"}


def omega_bounds(cfg: AntennaConfig) -> tuple[int, int]:
    """Per-slot range of transmitter two's phase-one streams in the T9 scheme.

    Receiver two has ``n1 + n2`` rows per phase-one slot once the phase-two
    retransmissions are added, so ``omega_t <= n1 + n2``. The rows left over
    after its own streams must be usable on transmitter one's ``m1``-dim
    signal, which needs ``n1 + n2 - omega_t <= m1``. In class S this range
    lies inside ``[n2, m2]`` and holds the required total.
    """
    m1, m2, n1, n2 = cfg.counts
    return max(n2, n1 + n2 - m1), min(m2, n1 + n2)


def omega_allocation(low: int, high: int, w1: int, total: int) -> tuple[int, ...]:
    """Per-slot stream counts: start at ``low`` each, then fill earliest slots up to ``high``."""
    if not (low * w1 <= total <= high * w1):
        raise SchemeError(f"cannot split {total} streams over {w1} slots within [{low}, {high}]")
    om = [low] * w1
    rest = total - low * w1
    t = 0
    while rest > 0:
        if om[t] < high:
            om[t] += 1
            rest -= 1
        else:
            t += 1
    return tuple(om)


def _c63_t5(cfg: AntennaConfig, corner: str) -> SchemeSpec:
    m1, _, n1, n2 = cfg.counts
    m2p = derived(cfg).m2_prime
    return SchemeSpec(m1 * (m2p - n1), n1 * (m2p - n2), m1 * (n2 - n1), m1, m2p, Variant.GENERIC, corner)


def _t6(cfg: AntennaConfig, m2_eff: int, variant: Variant, corner: str) -> SchemeSpec:
    m1, _, n1, _ = cfg.counts
    payload = {"m2_effective": m2_eff} if variant is Variant.S_T7_REDUCTION else {}
    return SchemeSpec(n1, n1, n1 - m1, m1, m2_eff, variant, corner, payload)


def corner_scheme(cfg: AntennaConfig, corner_label: str) -> SchemeSpec:
    """Scheme parameters reaching a named interior corner of the achievable region.

    Raises
    ------
    SchemeError
        If the corner is not an interior corner of the configuration's class.
    """
    label = ALIASES.get(corner_label, corner_label)
    c = classify(cfg)
    valid = CORNERS_BY_CLASS[c]
    if label not in valid:
        names = ", ".join(valid) if valid else "none (the region is reached by time sharing)"
        raise SchemeError(f"{cfg} is in class {c}; corner {corner_label!r} is not defined, valid corners: {names}")
    m1, m2, n1, n2 = cfg.counts
    d = derived(cfg)
    m1p, m2p, lam = d.m1_prime, d.m2_prime, d.lam

    if c is ConfigClass.C3:
        return SchemeSpec(m1 * (m2p - n1), n1 * (m2p - n2), m1 * (n2 - n1), m1, m2p, corner=label)
    if c is ConfigClass.C4:
        return SchemeSpec(m1p * m2p - n1 * n2, n1 * (m2p - n2), n2 * (m1p - n1), m1p, m2p, corner=label)
    if c is ConfigClass.C5:
        return SchemeSpec(n1, n1, n1 - m1, m1, m2, corner=label)
    if c is ConfigClass.C61:
        # transmitter two switches off all but n1 + n2 - m1 antennas
        eff = n1 + n2 - m1
        return SchemeSpec(eff, eff, n2 - m1, m1, eff, corner=label, payload={"m2_effective": eff})
    if c is ConfigClass.C62:
        return SchemeSpec(m2, m2, n2 - m1, m1, m2, corner=label)
    if c is ConfigClass.C63:
        return _c63_t5(cfg, label) if label == "T5" else _t6(cfg, m2, Variant.GENERIC, label)

    # subclass S
    if label == "T7":
        return _t6(cfg, n1 + n2 - m1, Variant.S_T7_REDUCTION, label)
    if label == "T5":
        nu = min(n1 * (n2 - n1), n2 * (m2 - n2))
        payload = {"nu": nu, "nu1": nu - (n2 - n1) * (m2 - n2), "nu2": n2 * (m2 - n2) - nu}
        return SchemeSpec(m2 - n1, n2 - n1, n2 - n1, m1, m2, Variant.S1_T5, label, payload)
    if label == "T8":
        payload = {"mu1": (n1 - m1) * (m1 - lam), "mu2": m1 * (m1 - lam)}
        return SchemeSpec(n1 - lam, n1 - m1, n1 - m1, m1, m2, Variant.S1_T8, label, payload)
    # T9
    w, w1 = m2 - lam, n2 - m1
    total = n2 * (m2 - lam) - n1 * n1
    payload = {"eta1": n1 * (n1 - m1), "eta2": n1 * m1, "omega": omega_allocation(*omega_bounds(cfg), w1, total), "n2": n2}
    return SchemeSpec(w, w1, w1, m1, m2, Variant.S2_T9, label, payload)


def corner_labels(cfg: AntennaConfig) -> tuple[str, ...]:
    return CORNERS_BY_CLASS[classify(cfg)]


# -- counting and rank calculus -------------------------------------------

def _dims(cfg: AntennaConfig, spec: SchemeSpec):
    if not spec.is_generic:
        raise SchemeError(f"the block rank calculus applies to the generic scheme, not {spec.variant}")
    m = spec.m_eff
    if m[0] > cfg.m1 or m[1] > cfg.m2:
        raise SchemeError(f"scheme uses {m} antennas but the config has ({cfg.m1}, {cfg.m2})")
    return m, (cfg.n1, cfg.n2), spec.w_pair, spec.w


def count_constraints(spec: SchemeSpec, cfg: AntennaConfig) -> tuple[int, int, int, int]:
    """Both sides of the per-receiver equation counts ``(lhs1, rhs1, lhs2, rhs2)``."""
    (m1, m2), (n1, n2), (w1, w2), w = _dims(cfg, spec)
    return (m1 * w1 + min(m2, n1) * w2, n1 * w, m2 * w2 + min(m1, n2) * w1, n2 * w)


@dataclass(frozen=True)
class RankTerms:
    r1: int
    r2: int
    r3: int
    i_max: int
    i_min: int
    unknowns: int
    predicted_rank: int

    @property
    def satisfied(self) -> bool:
        return self.unknowns <= self.r1 + self.r2 + self.r3


def _rank_terms(m, n, wv, w, i, i_max) -> tuple[int, int, int]:
    o = 1 - i
    i_min = 1 - i_max
    wl, wh = wv[i_min], wv[i_max]
    r1 = min(n[i], m[i] + m[o]) * wl
    r2 = min(
        n[i] * (wh - wl),
        m[i_max] * (wh - wl) + min(m[i_min] * (wh - wl), m[i_min] * wl, n[i_max] * wl),
    )
    r3 = min(
        n[i] * (w - wh),
        min(m[i] * (w - wh), m[i] * wv[i], n[o] * wv[i]) + min(m[o] * (w - wh), m[o] * wv[o], n[i] * wv[o]),
    )
    return r1, r2, r3


def rank_terms(cfg: AntennaConfig, spec: SchemeSpec, receiver: int) -> RankTerms:
    """Closed-form rank of receiver ``receiver``'s coefficient matrix."""
    m, n, wv, w = _dims(cfg, spec)
    i = receiver - 1
    o = 1 - i
    # W1 == W2 is the first case of the block calculus; call user two i_max
    i_max = 0 if wv[0] > wv[1] else 1
    r1, r2, r3 = _rank_terms(m, n, wv, w, i, i_max)
    if wv[0] == wv[1]:
        alt = _rank_terms(m, n, wv, w, i, 0)
        if alt != (r1, r2, r3):  # pragma: no cover - the terms are symmetric at a tie
            raise AssertionError(f"tie resolution changes the rank terms: {alt} vs {(r1, r2, r3)}")
    unknowns = m[i] * wv[i] + min(m[o], n[i]) * wv[o]
    return RankTerms(r1, r2, r3, i_max + 1, 2 - i_max, unknowns, min(unknowns, r1 + r2 + r3))


def rank_condition(cfg: AntennaConfig, spec: SchemeSpec) -> tuple[bool, bool]:
    """Whether each receiver's rank reaches its unknown count."""
    return tuple(rank_terms(cfg, spec, r).satisfied for r in (1, 2))


# -- coefficient matrices -------------------------------------------------

@njit(cache=True)
def _mm(a, b, modp):
    n, k = a.shape
    m = b.shape[1]
    out = np.zeros((n, m), dtype=a.dtype)
    for r in range(n):
        for s in range(k):
            x = a[r, s]
            if x == 0:
                continue
            for c in range(m):
                if modp:
                    out[r, c] = (out[r, c] + x * b[s, c]) % 2147483647
                else:
                    out[r, c] += x * b[s, c]
    return out


@njit(cache=True)
def _draw(seed, m, n, wv, w, modp):
    """Channels ``H[k, j, t]`` (``n[k] x m[j]``) and combinations ``D[j, t]``.

    ``D[j, t]`` (``m[j] x n[other] * wv[j]``) mixes the interference terms
    transmitter ``j`` created at the other receiver and is drawn only for
    its phase-two slots ``t >= wv[j]``. Entries are drawn in a fixed loop
    order, so a seed pins down the whole realization.
    """
    np.random.seed(seed)
    mm = max(m[0], m[1])
    nn = max(n[0], n[1])
    h = np.zeros((2, 2, w, nn, mm))
    dm = np.zeros((2, w, mm, nn * w))
    for t in range(w):
        for k in range(2):
            for j in range(2):
                for r in range(n[k]):
                    for c in range(m[j]):
                        if modp:
                            h[k, j, t, r, c] = np.random.randint(0, 2147483647)
                        else:
                            h[k, j, t, r, c] = np.random.standard_normal()
    for j in range(2):
        cols = n[1 - j] * wv[j]
        for t in range(wv[j], w):
            for r in range(m[j]):
                for c in range(cols):
                    if modp:
                        dm[j, t, r, c] = np.random.randint(0, 2147483647)
                    else:
                        dm[j, t, r, c] = np.random.standard_normal()
    return h, dm


@njit(cache=True)
def _draw_fp(seed, m, n, wv, w):
    # residues below 2**31 are exact in float64
    h, dm = _draw(seed, m, n, wv, w, True)
    return h.astype(np.int64), dm.astype(np.int64)


@njit(cache=True)
def _draw_real(seed, m, n, wv, w):
    return _draw(seed, m, n, wv, w, False)


@njit(cache=True)
def _fill(i, m, n, wv, w, h, dm, modp, p):
    o = 1 - i
    mi, mo, ni, no, wi, wo = m[i], m[o], n[i], n[o], wv[i], wv[o]
    q = min(mo, ni)
    own = mi * wi
    for t in range(w):
        r0 = t * ni
        if t < wi:
            p[r0:r0 + ni, t * mi:(t + 1) * mi] = h[i, i, t, :ni, :mi]
        elif wi > 0:
            # combinations of the raw terms H_oi(s) u_i(s) left at the other receiver
            for s in range(wi):
                blk = _mm(np.ascontiguousarray(dm[i, t, :mi, s * no:(s + 1) * no]),
                          np.ascontiguousarray(h[o, i, s, :no, :mi]), modp)
                p[r0:r0 + ni, s * mi:(s + 1) * mi] = _mm(np.ascontiguousarray(h[i, i, t, :ni, :mi]), blk, modp)
        if t < wo:
            if mo > ni:
                for r in range(ni):
                    p[r0 + r, own + t * q + r] = 1
            else:
                p[r0:r0 + ni, own + t * q:own + (t + 1) * q] = h[i, o, t, :ni, :mo]
        elif wo > 0:
            # raw terms at this receiver, written in its effective unknowns
            for s in range(wo):
                blk = np.ascontiguousarray(dm[o, t, :mo, s * ni:(s + 1) * ni])
                if mo <= ni:
                    blk = _mm(blk, np.ascontiguousarray(h[i, o, s, :ni, :mo]), modp)
                c0 = own + s * q
                p[r0:r0 + ni, c0:c0 + q] = _mm(np.ascontiguousarray(h[i, o, t, :ni, :mo]), blk, modp)
    return p


@njit(cache=True)
def _assemble(i, m, n, wv, w, h, dm, modp):
    o = 1 - i
    q = min(m[o], n[i])
    own = m[i] * wv[i]
    p = np.zeros((n[i] * w, own + q * wv[o]), dtype=h.dtype)
    return _fill(i, m, n, wv, w, h, dm, modp, p)


@njit(cache=True)
def _sweep_ranks(seeds, m, n, wv, w):
    out = np.empty((seeds.shape[0], 2), dtype=np.int64)
    for k in range(seeds.shape[0]):
        h, dm = _draw_fp(seeds[k], m, n, wv, w)
        for i in range(2):
            p = _assemble(i, m, n, wv, w, h, dm, True)
            if p.shape[0] == 0 or p.shape[1] == 0:
                out[k, i] = 0
            else:
                out[k, i] = ff._rank(p)
    return out


FIELDS = ("fp", "real")


@dataclass(frozen=True)
class BlockMatrix:
    """Receiver coefficient matrix with its row and column blocks.

    Rows split at ``W_min`` and ``W_max``; columns split into the
    receiver's own symbols and the effective interference quantities.
    ``blocks[(r, c)]`` is ``P_rc`` with ``r`` in 1..3 and ``c`` in 1..2.
    """

    field: str
    receiver: int
    matrix: np.ndarray
    row_splits: tuple[int, int]
    own_columns: int

    @property
    def shape(self) -> tuple[int, int]:
        return self.matrix.shape

    @property
    def blocks(self) -> dict[tuple[int, int], np.ndarray]:
        a, b = self.row_splits
        rows = {1: slice(0, a), 2: slice(a, b), 3: slice(b, self.matrix.shape[0])}
        cols = {1: slice(0, self.own_columns), 2: slice(self.own_columns, self.matrix.shape[1])}
        return {(r, c): self.matrix[rows[r], cols[c]] for r in rows for c in cols}

    def rank(self) -> int:
        if self.field == "fp":
            return ff.rank(self.matrix)
        return ff.float_rank(self.matrix)


def _spec_arrays(cfg: AntennaConfig, spec: SchemeSpec):
    m, n, wv, w = _dims(cfg, spec)
    return np.array(m, dtype=np.int64), np.array(n, dtype=np.int64), np.array(wv, dtype=np.int64), w


def build_coefficient_matrix(
    cfg: AntennaConfig, spec: SchemeSpec, receiver: int, seed: int = 0, field: str = "fp"
) -> BlockMatrix:
    """Draw receiver ``receiver``'s coefficient matrix of a generic scheme.

    Parameters
    ----------
    seed : int
        Seeds the channel and combination draws; the same seed gives the
        same matrix for both receivers, since they share one channel.
    field : {"fp", "real"}
        Uniform draws over ``F_p`` or standard Gaussian draws.
    """
    if field not in FIELDS:
        raise SchemeError(f"unknown field {field!r}, expected one of {FIELDS}")
    if receiver not in (1, 2):
        raise SchemeError(f"receiver must be 1 or 2, got {receiver}")
    m, n, wv, w = _spec_arrays(cfg, spec)
    if field == "fp":
        h, dm = _draw_fp(np.uint32(seed), m, n, wv, w)
    else:
        h, dm = _draw_real(np.uint32(seed), m, n, wv, w)
    p = _assemble(receiver - 1, m, n, wv, w, h, dm, field == "fp")
    i = receiver - 1
    lo, hi = sorted(spec.w_pair)
    return BlockMatrix(field, receiver, p, (int(n[i]) * lo, int(n[i]) * hi), int(m[i] * wv[i]))


def sampled_ranks(cfg: AntennaConfig, spec: SchemeSpec, seeds) -> np.ndarray:
    """Exact ``F_p`` ranks of both receivers' matrices, one row per seed.

    Matches :func:`build_coefficient_matrix` draw for draw.
    """
    m, n, wv, w = _spec_arrays(cfg, spec)
    seeds = np.asarray(seeds, dtype=np.uint32)
    return _sweep_ranks(seeds, m, n, wv, w)


def trial_seeds(base_seed: int, key: tuple, trials: int) -> np.ndarray:
    """Per-trial 32-bit seeds derived from a base seed and a tuple key."""
    ss = np.random.SeedSequence(base_seed, spawn_key=tuple(int(k) for k in key))
    return ss.generate_state(trials, dtype=np.uint32)

