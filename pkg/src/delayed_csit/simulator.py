"""Noiseless end-to-end replay of the linear schemes over ``F_p``.

Every transmitted vector is a linear map of the transmitter's symbol
vector, ``X_j(t) = T_j(t) s_j``. Phase-two maps are computed from a
:class:`TxView`, which exposes only the transmitter's own outgoing channels
from earlier slots, so a scheme cannot peek at future or foreign channel
state. Each receiver stacks its observations, rewrites the interference in
terms of the scheme's effective interference quantities and solves for its
own symbols and those quantities jointly.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence, Union

import numpy as np

from . import field as ff
from .config import AntennaConfig, ConfigClass, ConfigError, MisoConfig, classify
from .geometry import fraction_to_str
from .schemes import SchemeError, SchemeSpec, Variant, corner_scheme, rank_terms

P = ff.P

# stream tags for the seed tree
_CHANNEL, _TX, _SYMBOLS = 0, 1, 2


class SimulationError(RuntimeError):
    """A scheme broke one of its structural promises during a replay."""


class CausalityError(SimulationError):
    """A transmitter asked for channel state it cannot have."""


def _rng(seed: int, *key: int) -> np.random.Generator:
    # Philox streams with distinct keys are independent; building one from a
    # key is about half the cost of hashing a SeedSequence, which matters at
    # eight streams per replay
    if len(key) > 3 or any(not 0 <= x < 1 << 20 for x in key):
        raise ValueError(f"stream key {key} out of range")
    code = len(key) << 60
    for pos, x in enumerate(key):
        code |= x << (20 * pos)
    return np.random.Generator(np.random.Philox(key=np.array([seed % (1 << 64), code], dtype=np.uint64)))


class ChannelRealization:
    """Channel matrices ``H[k, j](t)`` of every link and slot.

    All links are drawn in a fixed ``(k, j)`` order from one stream.
    :meth:`perturbed` redraws the links of one transmitter from a stream of
    their own, so every other link keeps its exact values.
    """

    def __init__(self, seed: int, n: Sequence[int], a: Sequence[int], w: int):
        self.seed = seed
        self.n = tuple(n)
        self.a = tuple(a)
        self.w = w
        links = [(k, j) for k in range(len(self.n)) for j in range(len(self.a))]
        self._h = self._draw(_rng(seed, _CHANNEL), links)

    def _draw(self, rng, links) -> dict:
        sizes = [self.w * self.n[k] * self.a[j] for k, j in links]
        flat = ff.random_elements(rng, (sum(sizes),))
        out, start = {}, 0
        for (k, j), size in zip(links, sizes):
            out[k, j] = flat[start: start + size].reshape(self.w, self.n[k], self.a[j])
            start += size
        return out

    def h(self, k: int, j: int, t: int) -> np.ndarray:
        return self._h[k, j][t]

    def perturbed(self, j: int, seed: int) -> ChannelRealization:
        """Copy with every channel out of transmitter ``j`` redrawn from ``seed``."""
        other = object.__new__(ChannelRealization)
        other.seed, other.n, other.a, other.w = self.seed, self.n, self.a, self.w
        other._h = dict(self._h)
        other._h.update(other._draw(_rng(seed, _CHANNEL, 1 + j), [(k, j) for k in range(len(self.n))]))
        return other


class TxView:
    """What transmitter ``j`` knows at the start of slot ``now``."""

    def __init__(self, channels: ChannelRealization, j: int, now: int):
        self._channels = channels
        self.j = j
        self.now = now

    def own(self, k: int, s: int) -> np.ndarray:
        if s >= self.now:
            raise CausalityError(f"transmitter {self.j + 1} asked for slot {s + 1} channels during slot {self.now + 1}")
        return self._channels.h(k, self.j, s)


# -- slot actions -----------------------------------------------------------

@dataclass(frozen=True)
class Fresh:
    """Send ``precoder @ s`` for a precoder fixed in advance."""

    precoder: np.ndarray


@dataclass(frozen=True)
class Retransmit:
    """Send ``comb @ [I_k(s) for (k, s) in terms]``.

    ``I_k(s) = H[k, j](s) X_j(s)`` is the interference transmitter ``j``
    left at receiver ``k`` in an earlier slot ``s``.
    """

    comb: np.ndarray
    terms: tuple[tuple[int, int], ...]


@dataclass(frozen=True)
class Silent:
    pass


@dataclass
class TxPlan:
    antennas: int
    n_symbols: int
    actions: list


def _precoder(plan: TxPlan, view: TxView, history: list[np.ndarray]) -> np.ndarray:
    act = plan.actions[view.now]
    if isinstance(act, Fresh):
        return act.precoder
    if isinstance(act, Silent):
        return np.zeros((plan.antennas, plan.n_symbols), dtype=np.int64)
    stacked = np.vstack([ff.matmul(view.own(k, s), history[s]) for k, s in act.terms])
    return ff.matmul(act.comb, stacked)


@dataclass
class LinearScheme:
    """Transmit plans plus, per (receiver, interferer), the effective interference.

    ``effective[k, j]`` is ``None`` when receiver ``k`` resolves transmitter
    ``j``'s symbols themselves, or the list of ``(k', s)`` interference
    terms whose values are the unknowns.
    """

    w: int
    n: tuple[int, ...]
    plans: list[TxPlan]
    effective: dict
    spec: Optional[SchemeSpec] = None
    phase_boundary: Optional[int] = None
    label: str = ""


@dataclass
class Transcript:
    symbols: list[np.ndarray]
    precoders: list[list[np.ndarray]]
    x: list[list[np.ndarray]]
    y: list[list[np.ndarray]]
    interference: dict = field(default_factory=dict)


def transmit(scheme: LinearScheme, channels: ChannelRealization, seed: int) -> Transcript:
    """Play the scheme slot by slot and record what every node sees."""
    rng = _rng(seed, _SYMBOLS)
    symbols = [ff.random_elements(rng, (p.n_symbols,)) for p in scheme.plans]
    pre = [[] for _ in scheme.plans]
    xs = [[] for _ in scheme.plans]
    for t in range(scheme.w):
        for j, plan in enumerate(scheme.plans):
            tj = _precoder(plan, TxView(channels, j, t), pre[j])
            pre[j].append(tj)
            xs[j].append(ff.matmul(tj, symbols[j][:, None])[:, 0])
    ys = [[] for _ in scheme.n]
    interference = {}
    for t in range(scheme.w):
        for k in range(len(scheme.n)):
            acc = np.zeros(scheme.n[k], dtype=np.int64)
            for j in range(len(scheme.plans)):
                contrib = ff.matmul(channels.h(k, j, t), xs[j][t][:, None])[:, 0]
                if j != k:
                    interference[k, j, t] = contrib
                acc = (acc + contrib) % P
            ys[k].append(acc)
    return Transcript(symbols, pre, xs, ys, interference)


# -- decoding ---------------------------------------------------------------

@dataclass(frozen=True)
class ReceiverOutcome:
    receiver: int
    equations: int
    unknowns: int
    achieved_rank: int
    predicted_rank: int
    decoded: bool

    def to_json(self) -> dict:
        return {
            "receiver": self.receiver,
            "equations": self.equations,
            "unknowns": self.unknowns,
            "achieved_rank": self.achieved_rank,
            "predicted_rank": self.predicted_rank,
            "decoded": self.decoded,
        }


@dataclass
class ReceiverSystem:
    """Receiver ``k``'s equations in (own symbols, effective interference)."""

    matrix: np.ndarray
    rhs: np.ndarray
    own: int
    blocks: list  # (interferer j, L_kj)


def _effective_map(scheme, channels, tr, k, j):
    terms = scheme.effective[k, j]
    if terms is None:
        return np.eye(scheme.plans[j].n_symbols, dtype=np.int64)
    if not terms:
        return np.zeros((0, scheme.plans[j].n_symbols), dtype=np.int64)
    return np.vstack([ff.matmul(channels.h(kk, j, s), tr.precoders[j][s]) for kk, s in terms])


def receiver_system(scheme: LinearScheme, channels: ChannelRealization, tr: Transcript, k: int) -> ReceiverSystem:
    """Stack receiver ``k``'s observations as ``[A | B'] e = y``.

    ``B = B' L`` must hold for every interferer with ``L`` the scheme's
    effective interference map; otherwise phase two created interference
    outside the quantities the receiver was meant to resolve.
    """
    w = scheme.w
    a = np.vstack([ff.matmul(channels.h(k, k, t), tr.precoders[k][t]) for t in range(w)])
    cols = [a]
    blocks = []
    for j in range(len(scheme.plans)):
        if j == k:
            continue
        b = np.vstack([ff.matmul(channels.h(k, j, t), tr.precoders[j][t]) for t in range(w)])
        lmat = _effective_map(scheme, channels, tr, k, j)
        if lmat.shape[0] == 0:
            b_eff = np.zeros((b.shape[0], 0), dtype=np.int64)
        else:
            piv, inv = ff.right_inverse_on_pivots(lmat)
            b_eff = ff.matmul(np.ascontiguousarray(b[:, piv]), inv)
        if np.any(ff.matmul(b_eff, lmat) != b):
            raise SimulationError(
                f"transmitter {j + 1} reaches receiver {k + 1} outside its effective interference span"
            )
        cols.append(b_eff)
        blocks.append((j, lmat))
    rhs = np.concatenate(tr.y[k])
    return ReceiverSystem(np.hstack(cols), rhs, a.shape[1], blocks)


def _decode(scheme, channels, tr, k, predicted) -> tuple[ReceiverOutcome, Optional[np.ndarray]]:
    sysm = receiver_system(scheme, channels, tr, k)
    rank, x = ff.solve(sysm.matrix, sysm.rhs)
    unknowns = sysm.matrix.shape[1]
    ok = x is not None
    if ok:
        x = x[:, 0]
        ok = bool(np.array_equal(x[: sysm.own], tr.symbols[k]))
        off = sysm.own
        for j, lmat in sysm.blocks:
            truth = ff.matmul(lmat, tr.symbols[j][:, None])[:, 0]
            ok = ok and bool(np.array_equal(x[off: off + lmat.shape[0]], truth))
            off += lmat.shape[0]
    out = ReceiverOutcome(k + 1, sysm.matrix.shape[0], unknowns, rank, predicted if predicted is not None else unknowns, ok)
    return out, (x if ok else None)


# -- reports ----------------------------------------------------------------

@dataclass
class TrialReport:
    """Outcome of one seeded replay.

    ``dof`` holds the exact per-user DoF (delivered symbols over ``W``)
    when every receiver decoded, and is ``None`` otherwise.
    """

    seed: int
    label: str
    corner: Optional[str]
    w: int
    w1: Optional[int]
    w2: Optional[int]
    receivers: tuple[ReceiverOutcome, ...]
    symbols: tuple[int, ...]
    dof: Optional[tuple[Fraction, ...]]
    spec: Optional[SchemeSpec] = None

    @property
    def decoded(self) -> bool:
        return all(r.decoded for r in self.receivers)

    @property
    def rank_agrees(self) -> bool:
        return all(r.achieved_rank == r.predicted_rank for r in self.receivers)

    @property
    def sum_dof(self) -> Optional[Fraction]:
        return None if self.dof is None else sum(self.dof, Fraction(0))

    def to_json(self) -> dict:
        return {
            "seed": self.seed,
            "label": self.label,
            "corner": self.corner,
            "W": self.w,
            "W1": self.w1,
            "W2": self.w2,
            "receivers": [r.to_json() for r in self.receivers],
            "symbols": list(self.symbols),
            "decoded": self.decoded,
            "dof": None if self.dof is None else [fraction_to_str(d) for d in self.dof],
            "sum_dof": None if self.dof is None else fraction_to_str(self.sum_dof),
        }


def _report(scheme: LinearScheme, seed: int, outcomes, spec=None, corner=None) -> TrialReport:
    syms = tuple(p.n_symbols for p in scheme.plans)
    if spec is not None and spec.variant is Variant.S2_T9:
        syms = (spec.symbols(1), spec.symbols(2))
    dof = tuple(Fraction(s, scheme.w) for s in syms) if all(o.decoded for o in outcomes) else None
    return TrialReport(
        seed,
        scheme.label,
        corner,
        scheme.w,
        None if spec is None else spec.w1,
        None if spec is None else spec.w2,
        tuple(outcomes),
        syms,
        dof,
        spec,
    )


# -- scheme builders --------------------------------------------------------

def _selection(a: int, k: int, start: int, count: int) -> np.ndarray:
    t = np.zeros((a, k), dtype=np.int64)
    for r in range(count):
        t[r, start + r] = 1
    return t


def generic_scheme(cfg: AntennaConfig, spec: SchemeSpec, seed: int) -> LinearScheme:
    """Two-phase scheme: fresh symbols, then combinations of caused interference."""
    if not spec.is_generic:
        raise SchemeError(f"{spec.variant} is not a generic scheme")
    n = (cfg.n1, cfg.n2)
    a = spec.m_eff
    if a[0] > cfg.m1 or a[1] > cfg.m2:
        raise SchemeError(f"scheme uses {a} antennas but the config has ({cfg.m1}, {cfg.m2})")
    w = spec.w
    plans = []
    rng = _rng(seed, _TX)
    for j in range(2):
        o = 1 - j
        wj = spec.w_pair[j]
        k = a[j] * wj
        acts = []
        for t in range(w):
            if t < wj:
                acts.append(Fresh(_selection(a[j], k, t * a[j], a[j])))
            elif wj == 0:
                acts.append(Silent())
            else:
                comb = ff.random_elements(rng, (a[j], n[o] * wj))
                acts.append(Retransmit(comb, tuple((o, s) for s in range(wj))))
        plans.append(TxPlan(a[j], k, acts))
    eff = {}
    for i in range(2):
        o = 1 - i
        eff[i, o] = None if a[o] <= n[i] else tuple((i, s) for s in range(spec.w_pair[o]))
    return LinearScheme(w, n, plans, eff, spec, None, str(classify(cfg)))


def special_scheme(cfg: AntennaConfig, spec: SchemeSpec, seed: int) -> LinearScheme:
    """The common-boundary schemes of the S subclasses (corners T5, T8, T9).

    Transmitter one spreads fresh symbols over both phases as random
    combinations on all its antennas; transmitter two sends fresh symbols
    in phase one and afterwards combinations of the interference receiver
    one saw during phase one.
    """
    m1, m2, n1, n2 = cfg.counts
    w, w1 = spec.w, spec.w1
    p = spec.payload
    if spec.variant is Variant.S1_T5:
        c1, c2 = p["nu1"], p["nu2"]
    elif spec.variant is Variant.S1_T8:
        c1, c2 = p["mu1"], p["mu2"]
    elif spec.variant is Variant.S2_T9:
        c1, c2 = p["eta1"], p["eta2"]
    else:
        raise SchemeError(f"{spec.variant} is not a special corner scheme")
    k1 = c1 + c2
    rng = _rng(seed, _TX)
    acts1 = []
    for t in range(w):
        g = np.zeros((m1, k1), dtype=np.int64)
        if t < w1:
            g[:, :c1] = ff.random_elements(rng, (m1, c1))
        else:
            g[:, c1:] = ff.random_elements(rng, (m1, c2))
        acts1.append(Fresh(g))

    acts2 = []
    if spec.variant is Variant.S2_T9:
        omega = p["omega"]
        k2 = sum(omega)
        start = 0
        for t in range(w1):
            acts2.append(Fresh(_selection(m2, k2, start, omega[t])))
            start += omega[t]
    else:
        k2 = m2 * w1
        for t in range(w1):
            acts2.append(Fresh(ff.random_elements(rng, (m2, k2))))
    for t in range(w1, w):
        acts2.append(Retransmit(ff.random_elements(rng, (m2, n1 * w1)), tuple((0, s) for s in range(w1))))
    plans = [TxPlan(m1, k1, acts1), TxPlan(m2, k2, acts2)]
    eff = {(0, 1): tuple((0, s) for s in range(w1)), (1, 0): None}
    return LinearScheme(w, (n1, n2), plans, eff, spec, w1, str(classify(cfg)))


def miso_scheme(mc: MisoConfig, seed: int) -> LinearScheme:
    """K symbols per transmitter in one slot, then round-robin retransmission.

    In phase two transmitter ``j`` owns ``K - 1`` consecutive slots and in
    each of them sends one interference scalar it caused at another
    receiver; every other transmitter stays silent.
    """
    mc.require_supported()
    k = mc.k
    w = 1 + k * (k - 1)
    plans = []
    rng = _rng(seed, _TX)
    for j in range(k):
        acts = [Fresh(np.eye(k, dtype=np.int64))]
        owner = {1 + jj * (k - 1) + q: (jj, [x for x in range(k) if x != jj][q]) for jj in range(k) for q in range(k - 1)}
        for t in range(1, w):
            jj, target = owner[t]
            if jj == j:
                acts.append(Retransmit(ff.random_elements(rng, (k, 1)), ((target, 0),)))
            else:
                acts.append(Silent())
        plans.append(TxPlan(k, k, acts))
    eff = {}
    for r in range(k):
        for j in range(k):
            if j != r:
                eff[r, j] = tuple((x, 0) for x in range(k) if x != j)
    return LinearScheme(w, (1,) * k, plans, eff, None, 1, f"MISO K={k} M={mc.m}")


# -- runners ----------------------------------------------------------------

def _active(scheme: LinearScheme) -> tuple[int, ...]:
    return tuple(p.antennas for p in scheme.plans)


def replay(scheme: LinearScheme, seed: int, channels: Optional[ChannelRealization] = None):
    channels = channels if channels is not None else ChannelRealization(seed, scheme.n, _active(scheme), scheme.w)
    return channels, transmit(scheme, channels, seed)


def run_generic(cfg: AntennaConfig, spec: SchemeSpec, seed: int) -> TrialReport:
    """Replay a generic two-phase scheme and decode at both receivers.

    A receiver whose achieved rank falls short of the closed-form
    prediction is reported with both numbers; nothing is retried.
    """
    scheme = generic_scheme(cfg, spec, seed)
    channels, tr = replay(scheme, seed)
    outs = [_decode(scheme, channels, tr, k, rank_terms(cfg, spec, k + 1).predicted_rank)[0] for k in range(2)]
    return _report(scheme, seed, outs, spec, spec.corner)


def _require(cfg: AntennaConfig, cls: ConfigClass, what: str):
    got = classify(cfg)
    if got is not cls:
        raise SchemeError(f"{what} needs a class-{cls} configuration, {cfg} is {got}")


def _run_special(cfg, spec, seed) -> TrialReport:
    scheme = special_scheme(cfg, spec, seed)
    channels, tr = replay(scheme, seed)
    outs = [_decode(scheme, channels, tr, k, None)[0] for k in range(2)]
    return _report(scheme, seed, outs, spec, spec.corner)


def run_s1_t5(cfg: AntennaConfig, seed: int) -> TrialReport:
    _require(cfg, ConfigClass.S1, "corner T5 with the common-boundary scheme")
    return _run_special(cfg, corner_scheme(cfg, "T5"), seed)


def run_s1_t8(cfg: AntennaConfig, seed: int) -> TrialReport:
    _require(cfg, ConfigClass.S1, "corner T8")
    return _run_special(cfg, corner_scheme(cfg, "T8"), seed)


def run_s2_t9(cfg: AntennaConfig, seed: int) -> TrialReport:
    _require(cfg, ConfigClass.S2, "corner T9")
    return _run_special(cfg, corner_scheme(cfg, "T9"), seed)


def run_spec(cfg: AntennaConfig, spec: SchemeSpec, seed: int) -> TrialReport:
    if spec.is_generic:
        return run_generic(cfg, spec, seed)
    runners = {Variant.S1_T5: run_s1_t5, Variant.S1_T8: run_s1_t8, Variant.S2_T9: run_s2_t9}
    if spec.variant not in runners:
        raise SchemeError(f"no runner for variant {spec.variant}")
    return runners[spec.variant](cfg, seed)


def run_corner(cfg: AntennaConfig, corner_label: str, seed: int) -> TrialReport:
    return run_spec(cfg, corner_scheme(cfg, corner_label), seed)


def staged_decode(cfg: AntennaConfig, spec: SchemeSpec, seed: int) -> dict:
    """Two-stage solve at receiver two next to the joint solve.

    Stage one uses only phase-two slots to resolve transmitter one's
    phase-two symbols and the interference terms receiver one saw, which
    are linear in receiver two's own symbols. Stage two adds those to the
    phase-one slots. Returns both estimates of ``(s1, s2)``.
    """
    if spec.variant not in (Variant.S1_T8, Variant.S2_T9):
        raise SchemeError("staged decoding is defined for the T8 and T9 schemes")
    scheme = special_scheme(cfg, spec, seed)
    channels, tr = replay(scheme, seed)
    w, w1 = scheme.w, scheme.phase_boundary
    k1, k2 = scheme.plans[0].n_symbols, scheme.plans[1].n_symbols
    p = spec.payload
    c1 = p["mu1"] if spec.variant is Variant.S1_T8 else p["eta1"]

    # stage one: phase-two rows, unknowns (tx-1 phase-two symbols, g = R s2)
    rows = []
    for t in range(w1, w):
        act = scheme.plans[1].actions[t]
        left = ff.matmul(channels.h(1, 0, t), tr.precoders[0][t])[:, c1:]
        right = ff.matmul(channels.h(1, 1, t), act.comb)
        rows.append(np.hstack([left, right]))
    rhs1 = np.concatenate(tr.y[1][w1:])
    _, x1 = ff.solve(np.vstack(rows), rhs1)
    if x1 is None:
        raise SimulationError("stage one of the staged solve is not uniquely solvable")
    x1 = x1[:, 0]
    s1_late, g = x1[: k1 - c1], x1[k1 - c1:]

    # stage two: phase-one rows plus the recovered terms g = R s2
    r_map = np.vstack([ff.matmul(channels.h(0, 1, s), tr.precoders[1][s]) for s in range(w1)])
    top = np.vstack(
        [
            np.hstack(
                [
                    ff.matmul(channels.h(1, 0, t), tr.precoders[0][t])[:, :c1],
                    ff.matmul(channels.h(1, 1, t), tr.precoders[1][t]),
                ]
            )
            for t in range(w1)
        ]
    )
    bottom = np.hstack([np.zeros((r_map.shape[0], c1), dtype=np.int64), r_map])
    rhs2 = np.concatenate([np.concatenate(tr.y[1][:w1]), g])
    _, x2 = ff.solve(np.vstack([top, bottom]), rhs2)
    if x2 is None:
        raise SimulationError("stage two of the staged solve is not uniquely solvable")
    x2 = x2[:, 0]
    staged = (np.concatenate([x2[:c1], s1_late]), x2[c1:])

    sysm = receiver_system(scheme, channels, tr, 1)
    _, xj = ff.solve(sysm.matrix, sysm.rhs)
    joint = None
    if xj is not None:
        xj = xj[:, 0]
        joint = (xj[k2:], xj[:k2])
    return {"staged": staged, "joint": joint, "truth": (tr.symbols[0], tr.symbols[1])}


def run_miso(mc: MisoConfig, seed: int) -> TrialReport:
    """Replay the K-user MISO scheme; every receiver must recover its K symbols."""
    scheme = miso_scheme(mc, seed)
    channels, tr = replay(scheme, seed)
    outs = [_decode(scheme, channels, tr, k, None)[0] for k in range(mc.k)]
    rep = _report(scheme, seed, outs)
    return rep


def miso_final_system(mc: MisoConfig, seed: int, receiver: int) -> np.ndarray:
    """The ``K x K`` system left at ``receiver`` once interference is stripped.

    Rows are the receiver's own slot-one observation of its symbols and the
    ``K - 1`` interference scalars its transmitter re-sent on its behalf.
    """
    scheme = miso_scheme(mc, seed)
    channels, tr = replay(scheme, seed)
    k = receiver - 1
    rows = [ff.matmul(channels.h(k, k, 0), tr.precoders[k][0])]
    rows += [ff.matmul(channels.h(x, k, 0), tr.precoders[k][0]) for x in range(mc.k) if x != k]
    return np.vstack(rows)


# -- Monte Carlo --------------------------------------------------------------

SchemeLike = Union[SchemeSpec, str]


@dataclass
class MonteCarloReport:
    trials: int
    base_seed: int
    decode_rate: Fraction
    receiver_decode_rates: tuple[Fraction, ...]
    rank_agreement_rate: Fraction
    min_ranks: tuple[int, ...]
    max_ranks: tuple[int, ...]
    failing_seeds: list[int]
    dof: Optional[tuple[Fraction, ...]]
    reports: list[TrialReport] = field(repr=False, default_factory=list)

    def to_json(self) -> dict:
        first = self.reports[0]
        return {
            "label": first.label,
            "corner": first.corner,
            "W": first.w,
            "W1": first.w1,
            "W2": first.w2,
            "trials": self.trials,
            "base_seed": self.base_seed,
            "decode_rate": fraction_to_str(self.decode_rate),
            "receiver_decode_rates": [fraction_to_str(r) for r in self.receiver_decode_rates],
            "rank_agreement_rate": fraction_to_str(self.rank_agreement_rate),
            "min_ranks": list(self.min_ranks),
            "max_ranks": list(self.max_ranks),
            "predicted_ranks": [r.predicted_rank for r in first.receivers],
            "unknowns": [r.unknowns for r in first.receivers],
            "failing_seeds": self.failing_seeds,
            "dof": None if self.dof is None else [fraction_to_str(d) for d in self.dof],
            "sum_dof": None if self.dof is None else fraction_to_str(sum(self.dof, Fraction(0))),
        }


def aggregate(reports: list[TrialReport], base_seed: int) -> MonteCarloReport:
    if not reports:
        raise ValueError("need at least one trial")
    n = len(reports)
    nrx = len(reports[0].receivers)
    dofs = {r.dof for r in reports if r.dof is not None}
    if len(dofs) > 1:  # pragma: no cover - symbol counts do not depend on the seed
        raise SimulationError(f"successful trials disagree on the DoF pair: {dofs}")
    return MonteCarloReport(
        trials=n,
        base_seed=base_seed,
        decode_rate=Fraction(sum(r.decoded for r in reports), n),
        receiver_decode_rates=tuple(Fraction(sum(r.receivers[k].decoded for r in reports), n) for k in range(nrx)),
        rank_agreement_rate=Fraction(sum(r.rank_agrees for r in reports), n),
        min_ranks=tuple(min(r.receivers[k].achieved_rank for r in reports) for k in range(nrx)),
        max_ranks=tuple(max(r.receivers[k].achieved_rank for r in reports) for k in range(nrx)),
        failing_seeds=[r.seed for r in reports if not r.decoded],
        dof=dofs.pop() if dofs else None,
        reports=reports,
    )


def monte_carlo(cfg: AntennaConfig, scheme: SchemeLike, trials: int, base_seed: int = 0) -> MonteCarloReport:
    """Replay ``trials`` independent seeds ``base_seed, base_seed + 1, ...``."""
    if trials < 1:
        raise ConfigError(f"trials must be at least 1, got {trials}")
    spec = corner_scheme(cfg, scheme) if isinstance(scheme, str) else scheme
    return aggregate([run_spec(cfg, spec, base_seed + t) for t in range(trials)], base_seed)


def monte_carlo_miso(mc: MisoConfig, trials: int, base_seed: int = 0) -> MonteCarloReport:
    if trials < 1:
        raise ConfigError(f"trials must be at least 1, got {trials}")
    return aggregate([run_miso(mc, base_seed + t) for t in range(trials)], base_seed)


CSV_COLUMNS = (
    "seed", "class", "corner", "W", "W1", "W2",
    "rank1", "rank2", "pred1", "pred2", "decoded1", "decoded2", "d1", "d2",
)


def trials_to_csv(reports: Sequence[TrialReport]) -> str:
    """Trial log, one row per seed; DoF as ``num/den`` strings."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for r in reports:
        a, b = r.receivers[0], r.receivers[1]
        d = r.dof if r.dof is not None else (None, None)
        writer.writerow(
            [
                r.seed, r.label, r.corner or "", r.w, "" if r.w1 is None else r.w1, "" if r.w2 is None else r.w2,
                a.achieved_rank, b.achieved_rank, a.predicted_rank, b.predicted_rank,
                int(a.decoded), int(b.decoded),
                "" if d[0] is None else fraction_to_str(d[0]), "" if d[1] is None else fraction_to_str(d[1]),
            ]
        )
    return buf.getvalue()


def report_json(report: MonteCarloReport) -> str:
    return json.dumps(report.to_json(), indent=2, sort_keys=True)
