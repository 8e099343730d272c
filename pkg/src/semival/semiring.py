"""Commutative semirings with capability flags and a sampling axiom checker.

A :class:`Semiring` bundles the two operations with their neutral
elements and three capability flags:

* ``idempotent_add`` -- ``a + a == a``; gates the transport operation on
  valuations and the transport-form message passing,
* ``positive`` -- ``a + b == 0`` forces ``a == b == 0``; gates null
  detection through projection,
* ``idempotent_mul`` -- ``a * a == a``; together with ``idempotent_add``
  gates the idempotent (distribute-on-hypertree) machinery.

Flags are declared, then validated by :func:`check_semiring_axioms`;
capability gating elsewhere reads the flags, never runtime probes.

The minus-infinity used as the tropical null is IEEE ``-inf``: ``max``
and ``+`` treat it as an exact annihilator, so no large-negative-float
approximation is ever involved.
"""

from __future__ import annotations

import random
import re
from dataclasses import dataclass, replace
from typing import Callable

from .compare import DEFAULT_COMPARATOR, Comparator
from .errors import DomainError
from .reports import FAIL, NOT_APPLICABLE, PASS, CheckReport, LawResult

NEG_INF = float("-inf")


def format_value(v) -> str:
    """Canonical rendering: 12 significant digits for reals, ``-inf`` literal."""
    if isinstance(v, bool):
        return str(int(v))
    if isinstance(v, int):
        return str(v)
    if v == NEG_INF:
        return "-inf"
    return format(float(v), ".12g")


@dataclass(frozen=True, eq=False)
class Semiring:
    name: str
    carrier: str
    add: Callable
    mul: Callable
    zero: object | None
    one: object
    idempotent_add: bool
    positive: bool
    idempotent_mul: bool
    eq: Callable
    sample: Callable  # random.Random -> carrier element

    def parse(self, text: str):
        if text == "-inf":
            return NEG_INF
        try:
            return int(text)
        except ValueError:
            pass
        try:
            return float(text)
        except ValueError:
            raise DomainError(f"cannot parse {text!r} as a {self.name} value") from None

    def fmt(self, v) -> str:
        return format_value(v)

    def sum(self, values):
        it = iter(values)
        try:
            acc = next(it)
        except StopIteration:
            if self.zero is None:
                raise DomainError(f"{self.name} has no zero for an empty sum") from None
            return self.zero
        for v in it:
            acc = self.add(acc, v)
        return acc


def _sample_boolean(rng: random.Random) -> int:
    return rng.randint(0, 1)


def _sample_arithmetic(rng: random.Random) -> float:
    r = rng.random()
    if r < 0.15:
        return 0.0
    if r < 0.3:
        return float(rng.randint(1, 4))
    return rng.uniform(0.0, 4.0)


def _sample_tropical(rng: random.Random) -> float:
    r = rng.random()
    if r < 0.12:
        return NEG_INF
    if r < 0.6:
        return float(rng.randint(-6, 6))
    return rng.uniform(-6.0, 6.0)


def _sample_unit_interval(rng: random.Random) -> float:
    r = rng.random()
    if r < 0.1:
        return 0.0
    if r < 0.2:
        return 1.0
    return rng.random()


def builtin_instances(comparator: Comparator = DEFAULT_COMPARATOR) -> dict[str, Semiring]:
    """The stock instances, keyed by their model-file identifiers."""
    cmp_eq = comparator.eq
    return {
        "boolean": Semiring(
            name="boolean",
            carrier="{0, 1} with max as + and min as *",
            add=max,
            mul=min,
            zero=0,
            one=1,
            idempotent_add=True,
            positive=True,
            idempotent_mul=True,
            eq=lambda a, b: a == b,
            sample=_sample_boolean,
        ),
        "arithmetic": Semiring(
            name="arithmetic",
            carrier="nonnegative reals with ordinary + and *",
            add=lambda a, b: a + b,
            mul=lambda a, b: a * b,
            zero=0.0,
            one=1.0,
            idempotent_add=False,
            positive=True,
            idempotent_mul=False,
            eq=cmp_eq,
            sample=_sample_arithmetic,
        ),
        "tropical": Semiring(
            name="tropical",
            carrier="reals with -inf, max as + and ordinary + as *",
            add=max,
            mul=lambda a, b: a + b,
            zero=NEG_INF,
            one=0,
            idempotent_add=True,
            positive=False,
            idempotent_mul=False,
            eq=cmp_eq,
            sample=_sample_tropical,
        ),
        "bottleneck": Semiring(
            name="bottleneck",
            carrier="[0, 1] with max as + and min as *",
            add=max,
            mul=min,
            zero=0.0,
            one=1.0,
            idempotent_add=True,
            positive=True,
            idempotent_mul=True,
            eq=cmp_eq,
            sample=_sample_unit_interval,
        ),
        "fuzzy-product": Semiring(
            name="fuzzy-product",
            carrier="[0, 1] with max as + and the product t-norm as *",
            add=max,
            mul=lambda a, b: a * b,
            zero=0.0,
            one=1.0,
            idempotent_add=True,
            positive=True,
            idempotent_mul=False,
            eq=cmp_eq,
            sample=_sample_unit_interval,
        ),
    }


def chain_instance(k: int) -> Semiring:
    """Bounded chain 0 < 1 < ... < k-1 with max as + and min as *."""
    if k < 1:
        raise DomainError("chain size must be >= 1")
    return Semiring(
        name=f"chain({k})",
        carrier=f"chain 0..{k - 1} with max as + and min as *",
        add=max,
        mul=min,
        zero=0,
        one=k - 1,
        idempotent_add=True,
        positive=True,
        idempotent_mul=True,
        eq=lambda a, b: a == b,
        sample=lambda rng: rng.randint(0, k - 1),
    )


_CHAIN_RE = re.compile(r"chain\((\d+)\)")


def get_instance(name: str, comparator: Comparator = DEFAULT_COMPARATOR) -> Semiring:
    m = _CHAIN_RE.fullmatch(name)
    if m:
        return chain_instance(int(m.group(1)))
    table = builtin_instances(comparator)
    if name not in table:
        known = ", ".join(sorted(table)) + ", chain(k)"
        raise DomainError(f"unknown semiring {name!r} (known: {known})")
    return table[name]


def _witness(pairs) -> str:
    return ", ".join(f"{n}={format_value(v)}" for n, v in pairs)


def check_semiring_axioms(
    sr: Semiring, samples: int = 10_000, seed: int = 0
) -> CheckReport:
    """Sample the semiring laws and the declared flags.

    Every law is reported separately with a witness for the first
    failure; the report is deterministic given the seed.
    """
    if samples < 1:
        raise DomainError("samples must be >= 1")
    rng = random.Random(seed)
    draws = [(sr.sample(rng), sr.sample(rng), sr.sample(rng)) for _ in range(samples)]
    add, mul, eq = sr.add, sr.mul, sr.eq
    results: list[LawResult] = []

    def law(name: str, pred, applicable: bool = True):
        if not applicable:
            results.append(LawResult(name, NOT_APPLICABLE))
            return
        for a, b, c in draws:
            if not pred(a, b, c):
                results.append(
                    LawResult(name, FAIL, _witness([("a", a), ("b", b), ("c", c)]))
                )
                return
        results.append(LawResult(name, PASS))

    law("add-commutative", lambda a, b, c: eq(add(a, b), add(b, a)))
    law("add-associative", lambda a, b, c: eq(add(add(a, b), c), add(a, add(b, c))))
    law("mul-commutative", lambda a, b, c: eq(mul(a, b), mul(b, a)))
    law("mul-associative", lambda a, b, c: eq(mul(mul(a, b), c), mul(a, mul(b, c))))
    law(
        "distributive",
        lambda a, b, c: eq(mul(a, add(b, c)), add(mul(a, b), mul(a, c))),
    )
    has_zero = sr.zero is not None
    law("zero-neutral", lambda a, b, c: eq(add(a, sr.zero), a), applicable=has_zero)
    law("zero-absorbing", lambda a, b, c: eq(mul(a, sr.zero), sr.zero), applicable=has_zero)
    law("one-neutral", lambda a, b, c: eq(mul(sr.one, a), a))
    law(
        "flag-idempotent-add",
        lambda a, b, c: eq(add(a, a), a),
        applicable=sr.idempotent_add,
    )
    law(
        "flag-idempotent-mul",
        lambda a, b, c: eq(mul(a, a), a),
        applicable=sr.idempotent_mul,
    )
    law(
        "flag-positive",
        lambda a, b, c: not eq(add(a, b), sr.zero) or (eq(a, sr.zero) and eq(b, sr.zero)),
        applicable=sr.positive and has_zero,
    )
    # fully idempotent bounded instances form a distributive lattice:
    # addition is join, multiplication meet; absorption witnesses that.
    both = sr.idempotent_add and sr.idempotent_mul
    law("absorption-add", lambda a, b, c: eq(add(a, mul(a, b)), a), applicable=both)
    law("absorption-mul", lambda a, b, c: eq(mul(a, add(a, b)), a), applicable=both)

    return CheckReport(
        subject=f"semiring {sr.name}",
        seed=seed,
        samples=samples,
        laws=tuple(results),
    )


def corrupted(sr: Semiring, **overrides) -> Semiring:
    """A copy of ``sr`` with fields forced; used to exercise the checker."""
    return replace(sr, **overrides)
