"""Set potentials: sparse mass assignments over configuration sets.

A :class:`SetPotential` maps focal sets (sets of configurations of its
domain) to positive masses.  Combination intersects cylindrically
extended focal pairs on the union domain and accumulates their mass
products; transport moves each focal set through the subset algebra and
merges colliding images.  A potential flagged ``bpa`` carries total mass
one; its conflict (mass of the empty focal set) is tracked explicitly
rather than silently renormalized, and the combination rule with
conflict removed and the rest conditioned on consistency is available as
:func:`dempster_combine`.

Belief and commonality are evaluated lazily per query set; the full
inverse transforms are offered only under a frame-size cap because they
touch all ``2^k`` subsets.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Mapping

from . import domains as dm
from .compare import DEFAULT_COMPARATOR, Comparator
from .domains import Configuration, Domain, VariableCatalog
from .errors import (
    CapacityError,
    DomainError,
    MassError,
    MismatchError,
    TotalConflictError,
)

#: Frame-size cap for the explicit belief/commonality tables (2^k entries).
DEFAULT_SUBSET_CAP = 16

RAW = "raw"
BPA = "bpa"


@dataclass(frozen=True)
class FocalSet:
    """A canonically sorted set of configurations over one domain."""

    domain: Domain
    configs: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        ordered = tuple(sorted(set(self.configs)))
        object.__setattr__(self, "configs", ordered)
        k = len(self.domain)
        for values in ordered:
            if len(values) != k:
                raise DomainError(
                    f"configuration {values} does not fit domain {self.domain}"
                )

    @classmethod
    def of(cls, cat: VariableCatalog, domain: Domain,
           configs: Iterable[tuple[int, ...]]) -> "FocalSet":
        fs = cls(domain, tuple(configs))
        for values in fs.configs:
            for name, v in zip(domain.names, values):
                if not 0 <= v < cat.size(name):
                    raise DomainError(f"value index {v} out of range for {name!r}")
        return fs

    @classmethod
    def full(cls, cat: VariableCatalog, domain: Domain) -> "FocalSet":
        configs = tuple(c.values for c in dm.enumerate_configs(cat, domain))
        return cls(domain, configs)

    @classmethod
    def empty(cls, domain: Domain) -> "FocalSet":
        return cls(domain, ())

    @cached_property
    def config_set(self) -> frozenset:
        return frozenset(self.configs)

    def complement(self, cat: VariableCatalog) -> "FocalSet":
        full = FocalSet.full(cat, self.domain)
        return FocalSet(self.domain, tuple(set(full.configs) - self.config_set))

    def members(self) -> tuple[Configuration, ...]:
        return tuple(Configuration(self.domain, v) for v in self.configs)

    def __len__(self) -> int:
        return len(self.configs)


@dataclass(frozen=True, eq=False)
class SetPotential:
    catalog: VariableCatalog
    domain: Domain
    focal: tuple[tuple[FocalSet, float], ...]
    kind: str = RAW
    conflict: float | None = None

    def __post_init__(self):
        for fs, mass in self.focal:
            if fs.domain != self.domain:
                raise DomainError(
                    f"focal set over {fs.domain} in potential over {self.domain}"
                )
            if mass <= 0:
                raise MassError(f"non-positive mass {mass}")

    @cached_property
    def by_set(self) -> dict[FocalSet, float]:
        return dict(self.focal)

    def mass(self, fs: FocalSet) -> float:
        return self.by_set.get(fs, 0.0)

    def total_mass(self) -> float:
        return math.fsum(m for _, m in self.focal)

    def empty_mass(self) -> float:
        return self.mass(FocalSet.empty(self.domain))


def set_potential(
    cat: VariableCatalog,
    domain: Domain,
    items: Iterable[tuple[FocalSet, float]],
    kind: str = RAW,
    comparator: Comparator = DEFAULT_COMPARATOR,
) -> SetPotential:
    """Build a potential in canonical form: merged, zero-dropped, sorted."""
    cat.check_domain(domain)
    merged: dict[FocalSet, float] = {}
    for fs, mass in items:
        if mass < 0 and not comparator.is_zero(mass):
            raise MassError(f"negative mass {mass}")
        merged[fs] = merged.get(fs, 0.0) + mass
    cleaned = {fs: m for fs, m in merged.items() if not comparator.is_zero(m)}
    ordered = tuple(sorted(cleaned.items(), key=lambda kv: kv[0].configs))
    conflict = None
    if kind == BPA:
        total = math.fsum(cleaned.values())
        if not comparator.eq(total, 1.0):
            raise MassError(f"bpa masses sum to {total!r}, not 1")
        conflict = math.fsum(m for fs, m in ordered if not fs.configs)
    elif kind != RAW:
        raise MassError(f"unknown potential kind {kind!r}")
    return SetPotential(cat, domain, ordered, kind, conflict)


def vacuous(cat: VariableCatalog, domain: Domain) -> SetPotential:
    """Total ignorance: the full frame carries all the mass."""
    return set_potential(cat, domain, [(FocalSet.full(cat, domain), 1.0)], BPA)


def _index_sets(cat: VariableCatalog, p: SetPotential) -> list[tuple[frozenset, float]]:
    st = dm.strides(cat, p.domain)
    out = []
    for fs, mass in p.focal:
        idx = frozenset(sum(v * s for v, s in zip(values, st)) for values in fs.configs)
        out.append((idx, mass))
    return out


def _from_indices(cat: VariableCatalog, domain: Domain, indices) -> FocalSet:
    configs = tuple(
        dm.config_from_index(cat, domain, i).values for i in sorted(indices)
    )
    return FocalSet(domain, configs)


def combine_potentials(
    m1: SetPotential, m2: SetPotential, cap: int | None = dm.DEFAULT_CONFIG_CAP
) -> SetPotential:
    """Intersect cylindrified focal pairs on the union domain.

    Mass landing on the empty set is kept (the result is a raw
    potential); accumulation runs in canonical focal order so results are
    deterministic.
    """
    if m1.catalog != m2.catalog:
        raise MismatchError("potentials use different catalogs")
    cat = m1.catalog
    u = m1.domain | m2.domain
    n = cat.config_count(u, cap=cap)
    r1 = dm.restriction_index_map(cat, u, m1.domain)
    r2 = dm.restriction_index_map(cat, u, m2.domain)
    out: dict[frozenset, float] = {}
    right = _index_sets(cat, m2)
    for s1, mass1 in _index_sets(cat, m1):
        for s2, mass2 in right:
            meet = frozenset(
                i for i in range(n) if r1[i] in s1 and r2[i] in s2
            )
            out[meet] = out.get(meet, 0.0) + mass1 * mass2
    items = [(_from_indices(cat, u, idx), mass) for idx, mass in out.items()]
    return set_potential(cat, u, items, RAW)


def transport_potential(
    m: SetPotential, t: Domain, cap: int | None = dm.DEFAULT_CONFIG_CAP
) -> SetPotential:
    """Move every focal set to domain ``t``; colliding images merge."""
    cat = m.catalog
    cat.check_domain(t)
    if t == m.domain:
        return m
    u = m.domain | t
    n = cat.config_count(u, cap=cap)
    rd = dm.restriction_index_map(cat, u, m.domain)
    rt = dm.restriction_index_map(cat, u, t)
    out: dict[frozenset, float] = {}
    for s, mass in _index_sets(cat, m):
        image = frozenset(rt[i] for i in range(n) if rd[i] in s)
        out[image] = out.get(image, 0.0) + mass
    items = [(_from_indices(cat, t, idx), mass) for idx, mass in out.items()]
    return set_potential(cat, t, items, RAW)


def dempster_combine(
    m1: SetPotential,
    m2: SetPotential,
    comparator: Comparator = DEFAULT_COMPARATOR,
    cap: int | None = dm.DEFAULT_CONFIG_CAP,
) -> SetPotential:
    """Combine two bpa's, drop the contradiction and condition on the rest."""
    if m1.kind != BPA or m2.kind != BPA:
        raise MassError("dempster_combine expects bpa-flagged potentials")
    raw = combine_potentials(m1, m2, cap=cap)
    conflict = raw.empty_mass()
    if comparator.eq(conflict, 1.0) or conflict > 1.0:
        raise TotalConflictError(
            f"operands are fully contradictory (conflict {conflict!r})"
        )
    scale = 1.0 - conflict
    items = [
        (fs, mass / scale) for fs, mass in raw.focal if fs.configs
    ]
    result = set_potential(raw.catalog, raw.domain, items, BPA, comparator=comparator)
    return SetPotential(result.catalog, result.domain, result.focal, BPA, conflict)


def mass_to_belief(m: SetPotential, s: FocalSet) -> float:
    """Total mass of focal sets contained in ``s``."""
    if s.domain != m.domain:
        raise DomainError(f"hypothesis over {s.domain}, potential over {m.domain}")
    target = s.config_set
    return math.fsum(
        mass for fs, mass in m.focal if fs.config_set <= target
    )


def mass_to_commonality(m: SetPotential, s: FocalSet) -> float:
    """Total mass of focal sets containing ``s``."""
    if s.domain != m.domain:
        raise DomainError(f"hypothesis over {s.domain}, potential over {m.domain}")
    target = s.config_set
    return math.fsum(
        mass for fs, mass in m.focal if fs.config_set >= target
    )


def all_focal_sets(cat: VariableCatalog, domain: Domain,
                   cap: int | None = DEFAULT_SUBSET_CAP) -> list[FocalSet]:
    """All ``2^k`` subsets of the frame, ordered by bitmask."""
    k = cat.config_count(domain, cap=None)
    if cap is not None and k > cap:
        raise CapacityError(f"frame of {domain} has {k} > {cap} configurations")
    configs = [c.values for c in dm.enumerate_configs(cat, domain)]
    out = []
    for mask in range(1 << k):
        members = tuple(configs[i] for i in range(k) if mask >> i & 1)
        out.append(FocalSet(domain, members))
    return out


def _table_to_masks(cat: VariableCatalog, domain: Domain,
                    table: Mapping[FocalSet, float], cap: int) -> list[float]:
    k = cat.config_count(domain, cap=None)
    if k > cap:
        raise CapacityError(f"frame of {domain} has {k} > {cap} configurations")
    subsets = all_focal_sets(cat, domain, cap)
    if len(table) != len(subsets):
        raise MassError(
            f"table has {len(table)} entries, expected {len(subsets)}"
        )
    values = []
    for fs in subsets:
        if fs not in table:
            raise MassError("table does not cover every subset of the frame")
        values.append(float(table[fs]))
    return values


def _masks_to_potential(cat: VariableCatalog, domain: Domain,
                        values: list[float],
                        comparator: Comparator) -> SetPotential:
    subsets = all_focal_sets(cat, domain, cap=None)
    items = [
        (fs, v) for fs, v in zip(subsets, values) if not comparator.is_zero(v)
    ]
    return set_potential(cat, domain, items, RAW, comparator=comparator)


def belief_to_mass(
    cat: VariableCatalog,
    domain: Domain,
    belief: Mapping[FocalSet, float],
    cap: int = DEFAULT_SUBSET_CAP,
    comparator: Comparator = DEFAULT_COMPARATOR,
) -> SetPotential:
    """Invert a full belief table by the alternating subset sums."""
    f = _table_to_masks(cat, domain, belief, cap)
    k = cat.config_count(domain, cap=None)
    for bit in range(k):
        step = 1 << bit
        for mask in range(len(f)):
            if mask & step:
                f[mask] -= f[mask ^ step]
    return _masks_to_potential(cat, domain, f, comparator)


def commonality_to_mass(
    cat: VariableCatalog,
    domain: Domain,
    commonality: Mapping[FocalSet, float],
    cap: int = DEFAULT_SUBSET_CAP,
    comparator: Comparator = DEFAULT_COMPARATOR,
) -> SetPotential:
    """Invert a full commonality table by the alternating superset sums."""
    f = _table_to_masks(cat, domain, commonality, cap)
    k = cat.config_count(domain, cap=None)
    for bit in range(k):
        step = 1 << bit
        for mask in range(len(f)):
            if not mask & step:
                f[mask] -= f[mask | step]
    return _masks_to_potential(cat, domain, f, comparator)


def degree_of_quasi_support(m: SetPotential, h: FocalSet) -> float:
    """Mass of focal sets implying ``h`` (the empty set implies everything)."""
    return mass_to_belief(m, h)


def degree_of_support(
    m: SetPotential, h: FocalSet, comparator: Comparator = DEFAULT_COMPARATOR
) -> tuple[float, float]:
    """``(qsp, sp)`` where sp conditions quasi-support on consistency."""
    qsp = degree_of_quasi_support(m, h)
    total = m.total_mass()
    conflict = m.empty_mass()
    if comparator.eq(conflict, total):
        raise TotalConflictError("potential is fully contradictory")
    sp = (qsp - conflict) / (total - conflict)
    return qsp, sp


def degree_of_plausibility(
    m: SetPotential, h: FocalSet, comparator: Comparator = DEFAULT_COMPARATOR
) -> float:
    """Conditioned mass of focal sets not excluding ``h``."""
    if h.domain != m.domain:
        raise DomainError(f"hypothesis over {h.domain}, potential over {m.domain}")
    total = m.total_mass()
    conflict = m.empty_mass()
    if comparator.eq(conflict, total):
        raise TotalConflictError("potential is fully contradictory")
    target = h.config_set
    possible = math.fsum(
        mass for fs, mass in m.focal if fs.config_set & target
    )
    return possible / (total - conflict)
