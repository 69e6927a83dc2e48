"""Exhaustive checks over small antenna configurations.

Each sweep returns a plain result object listing every violation it
found; callers decide whether a violation is fatal.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Iterator, Optional

import numpy as np

from .config import AntennaConfig, ConfigClass, PREDICATES, classify, is_boundary, normalize
from .geometry import fraction_to_str
from .regions import ConsistencyError, named_corners, region_bundle
from .schemes import (
    corner_labels,
    corner_scheme,
    count_constraints,
    generic_spec,
    rank_condition,
    rank_terms,
    sampled_ranks,
    trial_seeds,
)
from .simulator import monte_carlo


def normalized_configs(max_count: int) -> Iterator[AntennaConfig]:
    """Every configuration with counts in ``1..max_count`` and ``n2 >= n1``."""
    for m1, m2, n1, n2 in itertools.product(range(1, max_count + 1), repeat=4):
        if n2 >= n1:
            yield normalize(m1, m2, n1, n2)


def phase_tuples(max_w: int) -> Iterator[tuple[int, int, int]]:
    """``(W, W1, W2)`` with ``2 <= W <= max_w`` and ``1 <= W1, W2 < W``."""
    for w in range(2, max_w + 1):
        for w1 in range(1, w):
            for w2 in range(1, w):
                yield w, w1, w2


@dataclass
class Violation:
    check: str
    subject: str
    detail: str

    def to_json(self) -> dict:
        return {"check": self.check, "subject": self.subject, "detail": self.detail}


@dataclass
class SweepResult:
    name: str
    checked: int = 0
    violations: list[Violation] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "checked": self.checked,
            "violations": [v.to_json() for v in self.violations],
            "notes": self.notes,
        }


def classification_sweep(max_count: int = 8) -> SweepResult:
    """Each normalized config matches exactly one class.

    Configurations on the edges the subclass inequalities leave open are
    matched by the completion rule; they are listed as notes.
    """
    res = SweepResult("classification")
    for cfg in normalized_configs(max_count):
        res.checked += 1
        hits = [c for c in ConfigClass if PREDICATES[c](cfg)]
        got = classify(cfg)
        if is_boundary(cfg):
            if hits:
                res.violations.append(Violation("classification", str(cfg), f"boundary config matches {hits}"))
            res.notes.append(f"{cfg.counts} completed to {got}")
        elif hits != [got]:
            res.violations.append(Violation("classification", str(cfg), f"predicates {hits}, classify {got}"))
    return res


def region_sweep(max_count: int = 8) -> SweepResult:
    """Region inclusions, corner labels and the tightness cross-check."""
    res = SweepResult("regions")
    for cfg in normalized_configs(max_count):
        res.checked += 1
        try:
            b = region_bundle(cfg)
            b.check_inclusions()
        except ConsistencyError as exc:
            res.violations.append(Violation("regions", str(cfg), str(exc)))
            continue
        for label, p in b.corner_points:
            if not b.achievable.has_vertex(p):
                res.violations.append(Violation("corners", str(cfg), f"{label}={p} is not a vertex"))
        if b.finding:
            res.notes.append(b.finding)
    return res


def corner_sweep(
    max_count: int = 8,
    trials: int = 100,
    base_seed: int = 0,
    configs: Optional[list[AntennaConfig]] = None,
    progress: Optional[Callable[[str], None]] = None,
) -> SweepResult:
    """Every named corner scheme meets its rank conditions, decodes and hits the corner."""
    res = SweepResult("corners")
    configs = configs if configs is not None else list(normalized_configs(max_count))
    for cfg in configs:
        corners = named_corners(cfg)
        for label in corner_labels(cfg):
            res.checked += 1
            spec = corner_scheme(cfg, label)
            subject = f"{cfg.counts} {label}"
            if spec.is_generic:
                lhs1, rhs1, lhs2, rhs2 = count_constraints(spec, cfg)
                if lhs1 > rhs1 or lhs2 > rhs2:
                    res.violations.append(Violation("counting", subject, f"{lhs1}<={rhs1}, {lhs2}<={rhs2} fails"))
                if not all(rank_condition(cfg, spec)):
                    res.violations.append(Violation("rank-condition", subject, f"{rank_condition(cfg, spec)}"))
            if spec.dof != corners[label]:
                res.violations.append(Violation("dof", subject, f"scheme gives {spec.dof}, corner is {corners[label]}"))
            mc = monte_carlo(cfg, spec, trials, base_seed)
            if mc.decode_rate != 1:
                res.violations.append(
                    Violation("decode", subject, f"decode rate {mc.decode_rate}, failing seeds {mc.failing_seeds[:5]}")
                )
            elif mc.dof != tuple(corners[label]):
                res.violations.append(Violation("dof", subject, f"replay gives {mc.dof}"))
            if progress:
                progress(subject)
    return res


@dataclass
class RankMismatch:
    counts: tuple[int, int, int, int]
    w: int
    w1: int
    w2: int
    receiver: int
    predicted: int
    achieved: int
    seed: int
    failing_trials: int

    def to_json(self) -> dict:
        return dict(
            config=list(self.counts), W=self.w, W1=self.w1, W2=self.w2, receiver=self.receiver,
            predicted=self.predicted, achieved=self.achieved, seed=self.seed, failing_trials=self.failing_trials,
        )


def rank_oracle(
    max_count: int = 6,
    max_w: int = 10,
    trials: int = 50,
    base_seed: int = 0,
    configs: Optional[list[AntennaConfig]] = None,
) -> tuple[SweepResult, list[RankMismatch]]:
    """Exact ``F_p`` ranks of sampled coefficient matrices against the closed form.

    Every ``(config, W, W1, W2)`` tuple gets ``trials`` seeds derived from
    ``base_seed`` and the tuple itself; any trial whose rank differs from
    the prediction is a mismatch, reported with its seed.
    """
    res = SweepResult("rank-oracle")
    mismatches: list[RankMismatch] = []
    configs = configs if configs is not None else list(normalized_configs(max_count))
    for cfg in configs:
        for w, w1, w2 in phase_tuples(max_w):
            spec = generic_spec(cfg, w, w1, w2)
            pred = (rank_terms(cfg, spec, 1).predicted_rank, rank_terms(cfg, spec, 2).predicted_rank)
            seeds = trial_seeds(base_seed, cfg.counts + (w, w1, w2), trials)
            ranks = sampled_ranks(cfg, spec, seeds)
            res.checked += 1
            for r in range(2):
                bad = np.nonzero(ranks[:, r] != pred[r])[0]
                if bad.size:
                    k = int(bad[0])
                    mm = RankMismatch(cfg.counts, w, w1, w2, r + 1, pred[r], int(ranks[k, r]), int(seeds[k]), int(bad.size))
                    mismatches.append(mm)
                    res.violations.append(
                        Violation(
                            "rank-formula",
                            f"{cfg.counts} W={w} W1={w1} W2={w2} rx{r + 1}",
                            f"predicted {pred[r]}, exact {int(ranks[k, r])} in {bad.size}/{trials} trials (seed {int(seeds[k])})",
                        )
                    )
    return res, mismatches


def sum_dof_table(max_count: int = 8) -> list[tuple[tuple[int, int, int, int], str, str]]:
    rows = []
    for cfg in normalized_configs(max_count):
        b = region_bundle(cfg)
        rows.append((cfg.counts, str(b.cls), fraction_to_str(b.achievable.max_linear((1, 1)))))
    return rows
