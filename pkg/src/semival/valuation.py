"""Semiring-valued tables over multivariate domains.

A :class:`Valuation` stores one semiring value per configuration of its
domain, in row-major enumeration order.  Combination multiplies
pointwise on the joined domain, projection sums configurations out, and
transport (projection to the meet followed by vacuous extension) is
available exactly when the semiring has idempotent addition -- for other
semirings transport would silently break the algebra, so it raises
:class:`CapabilityError` instead.

Valuations are immutable and all operations are pure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import reduce
from typing import Sequence

from . import domains as dm
from .domains import Domain, VariableCatalog
from .errors import CapabilityError, DomainError, MassError, MismatchError
from .reports import FAIL, NOT_APPLICABLE, PASS, CheckReport, LawResult
from .semiring import Semiring

import random


@dataclass(frozen=True, eq=False)
class Valuation:
    catalog: VariableCatalog
    semiring: Semiring
    domain: Domain
    table: tuple

    def __post_init__(self):
        expected = self.catalog.config_count(self.domain, cap=None)
        if len(self.table) != expected:
            raise DomainError(
                f"table has {len(self.table)} entries, domain {self.domain} "
                f"needs {expected}"
            )

    def __mul__(self, other: "Valuation") -> "Valuation":
        return combine(self, other)

    def value_at(self, config: dm.Configuration):
        if config.domain != self.domain:
            raise DomainError(f"configuration domain {config.domain} != {self.domain}")
        return self.table[dm.config_index(self.catalog, config)]


def _check_operands(a: Valuation, b: Valuation):
    if a.catalog != b.catalog:
        raise MismatchError("valuations use different catalogs")
    if a.semiring is not b.semiring and a.semiring.name != b.semiring.name:
        raise MismatchError(
            f"semiring mismatch: {a.semiring.name} vs {b.semiring.name}"
        )


def valuations_equal(a: Valuation, b: Valuation) -> bool:
    """Structural equality up to the semiring's comparator."""
    if a.domain != b.domain:
        return False
    eq = a.semiring.eq
    return all(eq(x, y) for x, y in zip(a.table, b.table))


def unit(cat: VariableCatalog, sr: Semiring, d: Domain,
         cap: int | None = dm.DEFAULT_CONFIG_CAP) -> Valuation:
    n = cat.config_count(cat.check_domain(d), cap=cap)
    return Valuation(cat, sr, d, (sr.one,) * n)


def null(cat: VariableCatalog, sr: Semiring, d: Domain,
         cap: int | None = dm.DEFAULT_CONFIG_CAP) -> Valuation:
    if sr.zero is None:
        raise CapabilityError(f"semiring {sr.name} has no zero element")
    n = cat.config_count(cat.check_domain(d), cap=cap)
    return Valuation(cat, sr, d, (sr.zero,) * n)


def combine(a: Valuation, b: Valuation,
            cap: int | None = dm.DEFAULT_CONFIG_CAP) -> Valuation:
    """Pointwise product on the union domain."""
    _check_operands(a, b)
    cat = a.catalog
    u = a.domain | b.domain
    cat.config_count(u, cap=cap)
    if u == a.domain and u == b.domain:
        mul = a.semiring.mul
        table = tuple(mul(x, y) for x, y in zip(a.table, b.table))
        return Valuation(cat, a.semiring, u, table)
    ra = dm.restriction_index_map(cat, u, a.domain)
    rb = dm.restriction_index_map(cat, u, b.domain)
    mul = a.semiring.mul
    ta, tb = a.table, b.table
    table = tuple(mul(ta[i], tb[j]) for i, j in zip(ra, rb))
    return Valuation(cat, a.semiring, u, table)


def combine_all(factors: Sequence[Valuation], cat: VariableCatalog, sr: Semiring,
                cap: int | None = dm.DEFAULT_CONFIG_CAP) -> Valuation:
    """Combination of the factors in index order; empty list gives the scalar unit."""
    if not factors:
        return unit(cat, sr, dm.EMPTY_DOMAIN)
    return reduce(lambda x, y: combine(x, y, cap=cap), factors)


def project(a: Valuation, t: Domain) -> Valuation:
    """Sum out the variables of ``d(a) - t``."""
    if not t <= a.domain:
        raise DomainError(f"cannot project {a.domain} to non-subset {t}")
    if t == a.domain:
        return a
    cat = a.catalog
    rmap = dm.restriction_index_map(cat, a.domain, t)
    add = a.semiring.add
    out: list = [None] * cat.config_count(t, cap=None)
    for i, v in zip(rmap, a.table):
        out[i] = v if out[i] is None else add(out[i], v)
    return Valuation(cat, a.semiring, t, tuple(out))


def vacuous_extend(a: Valuation, t: Domain,
                   cap: int | None = dm.DEFAULT_CONFIG_CAP) -> Valuation:
    """Pad to a superdomain; equal to combining with the unit on ``t``."""
    if not a.domain <= t:
        raise DomainError(f"cannot extend {a.domain} to non-superset {t}")
    if t == a.domain:
        return a
    cat = a.catalog
    cat.config_count(t, cap=cap)
    rmap = dm.restriction_index_map(cat, t, a.domain)
    ta = a.table
    return Valuation(cat, a.semiring, t, tuple(ta[i] for i in rmap))


def transport(a: Valuation, t: Domain,
              cap: int | None = dm.DEFAULT_CONFIG_CAP) -> Valuation:
    """Project to ``d(a) & t`` and extend vacuously to ``t``.

    Requires idempotent addition; for other semirings the stepwise
    transport identity fails, so only project/vacuous_extend are offered.
    """
    if not a.semiring.idempotent_add:
        raise CapabilityError(
            f"transport needs idempotent addition; semiring {a.semiring.name} "
            "only supports project/vacuous_extend"
        )
    return vacuous_extend(project(a, a.domain & t), t, cap=cap)


def is_null(a: Valuation) -> bool:
    if a.semiring.zero is None:
        raise CapabilityError(f"semiring {a.semiring.name} has no zero element")
    eq, zero = a.semiring.eq, a.semiring.zero
    return all(eq(v, zero) for v in a.table)


def normalize(a: Valuation) -> Valuation:
    """Scale an arithmetic table to total mass one."""
    if a.semiring.name != "arithmetic":
        raise CapabilityError("normalize is defined for the arithmetic semiring only")
    total = math.fsum(a.table)
    if a.semiring.eq(total, 0.0):
        raise MassError("cannot normalize a zero-mass table")
    return Valuation(a.catalog, a.semiring, a.domain,
                     tuple(v / total for v in a.table))


def invert_regular(p: Valuation, t: Domain) -> Valuation:
    """Pointwise inverse of the marginal on ``t``, with 0 where it vanishes.

    The defining identity ``p == p * project(p, t) * invert_regular(p, t)``
    holds within comparator tolerance (zero marginal rows stay zero).
    """
    if p.semiring.name != "arithmetic":
        raise CapabilityError("regular inversion is defined for the arithmetic semiring only")
    marg = project(p, t)
    eq = p.semiring.eq
    table = tuple(0.0 if eq(v, 0.0) else 1.0 / v for v in marg.table)
    return Valuation(p.catalog, p.semiring, t, table)


# --- randomized axiom suite ------------------------------------------------

def _random_catalog(rng: random.Random, max_vars: int, max_frame: int) -> VariableCatalog:
    n = rng.randint(1, max_vars)
    spec = {}
    for i in range(n):
        size = rng.randint(1, max_frame)
        spec[f"v{i}"] = tuple(str(j) for j in range(size))
    return VariableCatalog.of(spec)


def _random_domain(rng: random.Random, cat: VariableCatalog) -> Domain:
    names = [v.name for v in cat.variables]
    k = rng.randint(0, len(names))
    return Domain(tuple(rng.sample(names, k)))


def _random_valuation(rng: random.Random, cat: VariableCatalog, sr: Semiring,
                      d: Domain) -> Valuation:
    n = cat.config_count(d, cap=None)
    return Valuation(cat, sr, d, tuple(sr.sample(rng) for _ in range(n)))


def check_valuation_axioms(
    sr: Semiring,
    samples: int = 200,
    seed: int = 0,
    max_vars: int = 4,
    max_frame: int = 3,
) -> CheckReport:
    """Randomized law suite for the valuation operations over ``sr``.

    Laws gated on missing capabilities are reported as not applicable
    rather than silently skipped.
    """
    rng = random.Random(seed)
    results: list[LawResult] = []
    idem = sr.idempotent_add
    fully_idem = idem and sr.idempotent_mul

    trials = []
    for _ in range(samples):
        cat = _random_catalog(rng, max_vars, max_frame)
        s = _random_domain(rng, cat)
        t = _random_domain(rng, cat)
        r = (s & t) | _random_domain(rng, cat)
        phi = _random_valuation(rng, cat, sr, s)
        psi = _random_valuation(rng, cat, sr, t)
        trials.append((cat, s, t, r, phi, psi))

    def law(name: str, pred, applicable: bool = True):
        if not applicable:
            results.append(LawResult(name, NOT_APPLICABLE))
            return
        for k, (cat, s, t, r, phi, psi) in enumerate(trials):
            if not pred(cat, s, t, r, phi, psi):
                results.append(LawResult(name, FAIL, f"trial {k}: s={s} t={t} r={r}"))
                return
        results.append(LawResult(name, PASS))

    law("combine-commutative",
        lambda cat, s, t, r, phi, psi: valuations_equal(combine(phi, psi),
                                                        combine(psi, phi)))

    def assoc(cat, s, t, r, phi, psi):
        chi = _random_valuation(rng, cat, sr, r)
        return valuations_equal(combine(combine(phi, psi), chi),
                                combine(phi, combine(psi, chi)))
    law("combine-associative", assoc)

    law("labeling",
        lambda cat, s, t, r, phi, psi: combine(phi, psi).domain == (s | t)
        and project(phi, s & r).domain == (s & r))

    def stepwise(cat, s, t, r, phi, psi):
        # x <= y <= d(phi): two nested random subdomains
        y = Domain(tuple(rng.sample(s.names, rng.randint(0, len(s)))))
        x = Domain(tuple(rng.sample(y.names, rng.randint(0, len(y)))))
        return valuations_equal(project(phi, x), project(project(phi, y), x))

    law("projection-stepwise", stepwise)

    law("combination-projection",
        lambda cat, s, t, r, phi, psi: valuations_equal(
            project(combine(phi, psi), s), combine(phi, project(psi, s & t))))

    law("combine-via-extension",
        lambda cat, s, t, r, phi, psi: valuations_equal(
            combine(phi, psi),
            combine(vacuous_extend(phi, s | t), vacuous_extend(psi, s | t))))

    def nullity(cat, s, t, r, phi, psi):
        y = s & t
        if is_null(phi):
            return is_null(project(phi, y))
        # positive semirings cannot lose all information by projection
        return not is_null(project(phi, y))
    law("projection-nullity", nullity,
        applicable=sr.positive and sr.zero is not None)

    law("transport-composition", lambda cat, s, t, r, phi, psi: valuations_equal(
        transport(transport(phi, r), t), transport(phi, t)), applicable=idem)

    law("transport-combination", lambda cat, s, t, r, phi, psi: valuations_equal(
        transport(combine(phi, psi), r),
        combine(transport(phi, r), transport(psi, r))), applicable=idem)

    law("stability", lambda cat, s, t, r, phi, psi: valuations_equal(
        project(unit(cat, sr, s), s & t), unit(cat, sr, s & t)), applicable=idem)

    law("idempotency", lambda cat, s, t, r, phi, psi: valuations_equal(
        combine(phi, transport(phi, t)), transport(phi, s | t)),
        applicable=fully_idem)

    return CheckReport(
        subject=f"valuation algebra over {sr.name}",
        seed=seed,
        samples=samples,
        laws=tuple(results),
    )
