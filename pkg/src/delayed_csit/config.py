"""Antenna configurations, derived scalars and the class taxonomy.

Configurations are always stored with ``n2 >= n1``; a configuration given
the other way round is relabelled and remembers that it was swapped so
results can be mirrored back.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional


class ConfigError(ValueError):
    """Invalid antenna counts or an unsupported configuration."""


class ConfigClass(str, enum.Enum):
    C1 = "C1"
    C2 = "C2"
    C3 = "C3"
    C4 = "C4"
    C5 = "C5"
    C61 = "C61"
    C62 = "C62"
    C63 = "C63"
    S1 = "S1"
    S2 = "S2"

    def __str__(self) -> str:
        return self.value

    @property
    def in_c6(self) -> bool:
        return self in (ConfigClass.C61, ConfigClass.C62, ConfigClass.C63, ConfigClass.S1, ConfigClass.S2)

    @property
    def in_s(self) -> bool:
        return self in (ConfigClass.S1, ConfigClass.S2)


def _check_count(name: str, value) -> int:
    if isinstance(value, bool):
        raise ConfigError(f"{name} must be an integer, got {value!r}")
    if not isinstance(value, int):
        try:
            as_int = int(value)
        except (TypeError, ValueError):
            raise ConfigError(f"{name} must be an integer, got {value!r}") from None
        if as_int != value:
            raise ConfigError(f"{name} must be an integer, got {value!r}")
        value = as_int
    if value < 1:
        raise ConfigError(f"{name} must be a positive antenna count, got {value}")
    return value


@dataclass(frozen=True)
class AntennaConfig:
    """Antenna counts of the two-user MIMO interference channel.

    ``m1``/``m2`` are the transmit antennas and ``n1``/``n2`` the receive
    antennas of users one and two. Instances built via :func:`normalize`
    always satisfy ``n2 >= n1``.
    """

    m1: int
    m2: int
    n1: int
    n2: int
    swapped: bool = False

    def __post_init__(self):
        for name in ("m1", "m2", "n1", "n2"):
            object.__setattr__(self, name, _check_count(name, getattr(self, name)))
        if self.n1 > self.n2:
            raise ConfigError("AntennaConfig requires n2 >= n1; use normalize()")

    @property
    def counts(self) -> tuple[int, int, int, int]:
        return (self.m1, self.m2, self.n1, self.n2)

    @property
    def original_counts(self) -> tuple[int, int, int, int]:
        """Counts in the caller's user order."""
        if self.swapped:
            return (self.m2, self.m1, self.n2, self.n1)
        return self.counts

    def m(self, user: int) -> int:
        return (self.m1, self.m2)[user - 1]

    def n(self, user: int) -> int:
        return (self.n1, self.n2)[user - 1]

    def m_prime(self, user: int) -> int:
        return min(self.m(user), self.n1 + self.n2)

    @property
    def derived(self) -> DerivedParams:
        return derived(self)

    @property
    def cls(self) -> ConfigClass:
        return classify(self)

    def __str__(self) -> str:
        return f"(M1={self.m1}, M2={self.m2}, N1={self.n1}, N2={self.n2})"


@dataclass(frozen=True)
class DerivedParams:
    """Scalars the region and scheme formulas are written in.

    ``delta`` and ``delta_prime`` are ``None`` when their denominators
    vanish.
    """

    m1_prime: int
    m2_prime: int
    delta: Optional[Fraction]
    delta_prime: Optional[Fraction]
    lam: int

    def to_json(self) -> dict:
        def s(x):
            return None if x is None else f"{x.numerator}/{x.denominator}"

        return {
            "m1_prime": self.m1_prime,
            "m2_prime": self.m2_prime,
            "delta": s(self.delta),
            "delta_prime": s(self.delta_prime),
            "lambda": self.lam,
        }


@dataclass(frozen=True)
class MisoConfig:
    """K-user MISO interference channel, M antennas per transmitter."""

    k: int
    m: int

    def __post_init__(self):
        object.__setattr__(self, "k", _check_count("k", self.k))
        object.__setattr__(self, "m", _check_count("m", self.m))
        if self.k < 2:
            raise ConfigError("the MISO channel needs at least two users")

    def require_supported(self) -> None:
        if self.m < self.k:
            raise ConfigError(f"MISO results need M >= K antennas, got K={self.k}, M={self.m}")


def normalize(m1, m2, n1, n2) -> AntennaConfig:
    """Return the configuration with users relabelled so that ``n2 >= n1``."""
    m1, m2, n1, n2 = (_check_count(k, v) for k, v in zip(("m1", "m2", "n1", "n2"), (m1, m2, n1, n2)))
    if n1 > n2:
        return AntennaConfig(m2, m1, n2, n1, swapped=True)
    return AntennaConfig(m1, m2, n1, n2, swapped=False)


def renormalize(cfg: AntennaConfig) -> AntennaConfig:
    """Normalizing an already normalized config is the identity."""
    return cfg


def derived(cfg: AntennaConfig) -> DerivedParams:
    m1, m2, n1, n2 = cfg.counts
    delta = Fraction(n1 * (n1 - m1), n2 - m1) if n2 != m1 else None
    delta_prime = Fraction(n1 * (m2 - n2), m2 - n1) if m2 != n1 else None
    return DerivedParams(
        m1_prime=min(m1, n1 + n2),
        m2_prime=min(m2, n1 + n2),
        delta=delta,
        delta_prime=delta_prime,
        lam=m1 + m2 - n1 - n2,
    )


# Individual predicates, inequalities as written in the class definitions.

def in_c1(cfg: AntennaConfig) -> bool:
    return cfg.m2 <= cfg.n1


def in_c2(cfg: AntennaConfig) -> bool:
    return min(cfg.m1, cfg.m2) > cfg.n1 and cfg.m2 <= cfg.n2


def in_c3(cfg: AntennaConfig) -> bool:
    return cfg.n1 < cfg.m1 <= cfg.n2 < cfg.m2


def in_c4(cfg: AntennaConfig) -> bool:
    return min(cfg.m1, cfg.m2) > cfg.n2 >= cfg.n1


def in_c5(cfg: AntennaConfig) -> bool:
    return cfg.m1 <= cfg.n1 < cfg.m2 <= cfg.n2


def in_c6(cfg: AntennaConfig) -> bool:
    return cfg.m1 <= cfg.n1 <= cfg.n2 < cfg.m2


def in_s(cfg: AntennaConfig) -> bool:
    m1, m2, n1, n2 = cfg.counts
    d = derived(cfg).delta
    return d is not None and d < m1 < n1 < n2 < n1 + n2 - m1 < m2


def in_s1(cfg: AntennaConfig) -> bool:
    return in_s(cfg) and cfg.m2 <= cfg.n1 + cfg.n2 - derived(cfg).delta


def in_s2(cfg: AntennaConfig) -> bool:
    return in_s(cfg) and cfg.m2 > cfg.n1 + cfg.n2 - derived(cfg).delta


def in_c61(cfg: AntennaConfig) -> bool:
    m1, m2, n1, n2 = cfg.counts
    d = derived(cfg).delta
    return d is not None and m1 <= d < n1 <= n2 < n1 + n2 - m1 < m2


def in_c62(cfg: AntennaConfig) -> bool:
    m1, m2, n1, n2 = cfg.counts
    dp = derived(cfg).delta_prime
    return dp is not None and m1 <= dp < n1 < n2 < m2 <= n1 + n2 - m1


def in_c63(cfg: AntennaConfig) -> bool:
    m1, m2, n1, n2 = cfg.counts
    dp = derived(cfg).delta_prime
    return dp is not None and dp < m1 < n1 < n2 < m2 <= n1 + n2 - m1


PREDICATES = {
    ConfigClass.C1: in_c1,
    ConfigClass.C2: lambda c: in_c2(c) and not in_c1(c),
    ConfigClass.C3: in_c3,
    ConfigClass.C4: in_c4,
    ConfigClass.C5: in_c5,
    ConfigClass.C61: in_c61,
    ConfigClass.C62: in_c62,
    ConfigClass.C63: in_c63,
    ConfigClass.S1: in_s1,
    ConfigClass.S2: in_s2,
}


def is_boundary(cfg: AntennaConfig) -> bool:
    """True for class-six configurations no subclass predicate covers.

    The subclass inequalities leave out the edges ``n1 == n2`` and
    ``m1 == n1``; :func:`classify` assigns those by :func:`_complete_c6`.
    """
    return in_c6(cfg) and not any(PREDICATES[c](cfg) for c in ConfigClass if c.in_c6)


def _complete_c6(cfg: AntennaConfig) -> ConfigClass:
    m1, m2, n1, n2 = cfg.counts
    if m1 < n1:
        # n1 == n2: delta = delta' = n1, region equals the perfect-CSIT trapezoid
        return ConfigClass.C61 if m2 > n1 + n2 - m1 else ConfigClass.C62
    # m1 == n1: the T6 corner collapses onto (m1, 0) and only T5 remains
    return ConfigClass.C63


def classify(cfg: AntennaConfig) -> ConfigClass:
    """Return the unique class of a normalized configuration."""
    if in_c1(cfg):
        return ConfigClass.C1
    if in_c2(cfg):
        return ConfigClass.C2
    if in_c3(cfg):
        return ConfigClass.C3
    if in_c4(cfg):
        return ConfigClass.C4
    if in_c5(cfg):
        return ConfigClass.C5
    if not in_c6(cfg):  # pragma: no cover - the six classes are exhaustive
        raise AssertionError(f"{cfg} matches none of the six classes")
    for c in (ConfigClass.S1, ConfigClass.S2, ConfigClass.C61, ConfigClass.C62, ConfigClass.C63):
        if PREDICATES[c](cfg):
            return c
    return _complete_c6(cfg)
