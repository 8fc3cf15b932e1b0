"""Finitely described total enumerations f : N -> Q.

An enumeration is a finite rational prefix plus a total tail rule:

* ``Constant(c)``   f(n) = c for every n past the prefix;
* ``Cycle()``       f(n) = prefix[n mod L], the prefix repeated forever
  (needs a nonempty prefix);
* ``Affine(a, b)``  f(n) = a*n + b with a != 0 (a = 0 is normalized to
  ``Constant(b)`` at construction).

The closed forms below make the total weight of eligible tail indices exact,
which is what lets the fixpoint engine run without ever truncating a series.
The same descriptions can be blurred into interval oracles (``intervalize``)
for the semi-decidable mode.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Union

from .numerics import (
    RatInterval,
    RationalLike,
    as_fraction,
    dyadic_tail_weight,
    format_rational,
    geometric_block_sum,
    parse_rational,
)

__all__ = [
    "SpecError",
    "Constant",
    "Cycle",
    "Affine",
    "TailRule",
    "EnumerationSpec",
    "IntervalEnumeration",
    "value_at",
    "eligible_prefix_indices",
    "tail_weight_sum",
    "tail_hits",
    "intervalize",
    "tail_to_jsonable",
    "tail_from_jsonable",
    "spec_to_jsonable",
    "spec_from_jsonable",
]


class SpecError(ValueError):
    """A malformed enumeration description."""


@dataclass(frozen=True)
class Constant:
    """Tail rule f(n) = value for all n past the prefix."""

    value: Fraction

    def __post_init__(self) -> None:
        object.__setattr__(self, "value", as_fraction(self.value, "constant tail value"))


@dataclass(frozen=True)
class Cycle:
    """Tail rule f(n) = prefix[n mod L]; the prefix repeated forever."""


@dataclass(frozen=True)
class Affine:
    """Tail rule f(n) = a*n + b, slope a != 0 after normalization."""

    a: Fraction
    b: Fraction

    def __post_init__(self) -> None:
        object.__setattr__(self, "a", as_fraction(self.a, "affine slope"))
        object.__setattr__(self, "b", as_fraction(self.b, "affine intercept"))


TailRule = Union[Constant, Cycle, Affine]


@dataclass(frozen=True)
class EnumerationSpec:
    """A total map f : N -> Q: finite prefix f(0..L-1) plus a tail rule."""

    prefix: tuple[Fraction, ...]
    tail: TailRule

    def __post_init__(self) -> None:
        values = tuple(as_fraction(v, f"prefix[{i}]") for i, v in enumerate(self.prefix))
        object.__setattr__(self, "prefix", values)
        tail = self.tail
        if isinstance(tail, Affine) and tail.a == 0:
            tail = Constant(tail.b)  # degenerate slope: same map, simpler rule
            object.__setattr__(self, "tail", tail)
        if not isinstance(tail, (Constant, Cycle, Affine)):
            raise SpecError(f"unknown tail rule {tail!r}")
        if isinstance(tail, Cycle) and not values:
            raise SpecError("cycle tail needs a nonempty prefix")


def value_at(spec: EnumerationSpec, n: int) -> Fraction:
    """f(n): prefix entry for n < L, tail rule otherwise.  Total for n >= 0."""
    if not isinstance(n, int) or n < 0:
        raise ValueError(f"enumeration index must be a natural number, got {n!r}")
    length = len(spec.prefix)
    if n < length:
        return spec.prefix[n]
    tail = spec.tail
    if isinstance(tail, Constant):
        return tail.value
    if isinstance(tail, Cycle):
        return spec.prefix[n % length]
    return tail.a * n + tail.b


def eligible_prefix_indices(spec: EnumerationSpec, x: RationalLike) -> set[int]:
    """Prefix indices n with f(n) strictly below x."""
    x = as_fraction(x, "x")
    return {n for n, v in enumerate(spec.prefix) if v < x}


def tail_weight_sum(spec: EnumerationSpec, x: RationalLike) -> Fraction:
    """Exact total weight of tail indices n >= L with f(n) < x.

    Constant: the whole tail 2^(1-L) or nothing.  Cycle: one geometric block
    per eligible residue.  Affine: the eligibility set is an initial segment
    (a > 0) or a final segment (a < 0) of the tail, summed in closed form;
    boundaries are strict, computed exactly.
    """
    x = as_fraction(x, "x")
    start = len(spec.prefix)
    tail = spec.tail
    if isinstance(tail, Constant):
        return dyadic_tail_weight(start) if tail.value < x else Fraction(0)
    if isinstance(tail, Cycle):
        total = Fraction(0)
        for i, v in enumerate(spec.prefix):
            if v < x:
                total += geometric_block_sum(start + i, start)
        return total
    boundary = (x - tail.b) / tail.a
    if tail.a > 0:
        # eligible tail indices are L <= n < boundary
        cutoff = max(start, math.ceil(boundary))
        return dyadic_tail_weight(start) - dyadic_tail_weight(cutoff)
    # a < 0: eligible tail indices are n > boundary, a cofinite segment
    first = max(start, math.floor(boundary) + 1)
    return dyadic_tail_weight(first)


def tail_hits(spec: EnumerationSpec, v: RationalLike) -> bool:
    """Does any tail index n >= L satisfy f(n) = v?  Solved exactly."""
    v = as_fraction(v, "v")
    start = len(spec.prefix)
    tail = spec.tail
    if isinstance(tail, Constant):
        return tail.value == v
    if isinstance(tail, Cycle):
        return any(p == v for p in spec.prefix)
    n = (v - tail.b) / tail.a
    return n.denominator == 1 and n >= start


@dataclass(frozen=True)
class IntervalEnumeration:
    """Semi-decidable access to an enumeration: per-index interval oracle.

    ``oracle(n, eps)`` must return a RatInterval of width <= eps containing
    the true value f(n), nested as eps shrinks, deterministic per (n, eps).
    ``at`` enforces the width contract at the call boundary.
    """

    oracle: Callable[[int, Fraction], RatInterval]

    def at(self, n: int, eps: RationalLike) -> RatInterval:
        if not isinstance(n, int) or n < 0:
            raise ValueError(f"enumeration index must be a natural number, got {n!r}")
        eps = as_fraction(eps, "eps")
        if eps <= 0:
            raise ValueError(f"eps must be positive, got {eps}")
        box = self.oracle(n, eps)
        if box.width > eps:
            raise ValueError(f"interval oracle broke its width contract at n={n}: {box}")
        return box


def intervalize(spec: EnumerationSpec, jitter: RationalLike = 0) -> IntervalEnumeration:
    """Blur an exact enumeration into an interval oracle.

    Returns width-eps intervals centered within ``jitter`` of the true value
    (skewed alternately up and down so jitter is actually exercised).  The
    true value is always inside, and intervals for the same n are nested as
    eps shrinks.  jitter = 0 gives exactly centered intervals.
    """
    jitter = as_fraction(jitter, "jitter")
    if jitter < 0:
        raise ValueError(f"jitter must be nonnegative, got {jitter}")

    def oracle(n: int, eps: Fraction) -> RatInterval:
        value = value_at(spec, n)
        half = eps / 2
        skew = min(jitter, half)
        if n % 2:
            skew = -skew
        return RatInterval(value + skew - half, value + skew + half)

    return IntervalEnumeration(oracle)


# -- text format ------------------------------------------------------------
#
# {"prefix": ["p/q", ...],
#  "tail": {"kind": "constant", "value": "p/q"}
#        | {"kind": "cycle"}
#        | {"kind": "affine", "a": "p/q", "b": "p/q"}}
#
# Rationals are strings; bare JSON numbers are rejected to keep exactness
# explicit.  Errors carry the offending position.


def _rational_at(obj: object, where: str) -> Fraction:
    if not isinstance(obj, str):
        raise SpecError(f"{where}: expected a rational string 'p/q', got {obj!r}")
    try:
        return parse_rational(obj)
    except ZeroDivisionError:
        raise SpecError(f"{where}: zero denominator in {obj!r}") from None
    except ValueError as exc:
        raise SpecError(f"{where}: {exc}") from None


def tail_to_jsonable(tail: TailRule) -> dict:
    if isinstance(tail, Constant):
        return {"kind": "constant", "value": format_rational(tail.value)}
    if isinstance(tail, Cycle):
        return {"kind": "cycle"}
    return {"kind": "affine", "a": format_rational(tail.a), "b": format_rational(tail.b)}


def tail_from_jsonable(obj: object, where: str = "tail") -> TailRule:
    if not isinstance(obj, dict):
        raise SpecError(f"{where}: expected an object, got {obj!r}")
    kind = obj.get("kind")
    if kind == "constant":
        _expect_keys(obj, {"kind", "value"}, where)
        return Constant(_rational_at(obj.get("value"), f"{where}.value"))
    if kind == "cycle":
        _expect_keys(obj, {"kind"}, where)
        return Cycle()
    if kind == "affine":
        _expect_keys(obj, {"kind", "a", "b"}, where)
        return Affine(_rational_at(obj.get("a"), f"{where}.a"),
                      _rational_at(obj.get("b"), f"{where}.b"))
    raise SpecError(f"{where}.kind: unknown tail kind {kind!r}")


def _expect_keys(obj: dict, allowed: set, where: str) -> None:
    extra = set(obj) - allowed
    if extra:
        raise SpecError(f"{where}: unexpected keys {sorted(extra)}")
    missing = allowed - set(obj)
    if missing:
        raise SpecError(f"{where}: missing keys {sorted(missing)}")


def spec_to_jsonable(spec: EnumerationSpec) -> dict:
    return {
        "prefix": [format_rational(v) for v in spec.prefix],
        "tail": tail_to_jsonable(spec.tail),
    }


def spec_from_jsonable(obj: object) -> EnumerationSpec:
    if not isinstance(obj, dict):
        raise SpecError(f"spec: expected an object, got {obj!r}")
    _expect_keys(obj, {"prefix", "tail"}, "spec")
    raw_prefix = obj["prefix"]
    if not isinstance(raw_prefix, list):
        raise SpecError(f"prefix: expected a list, got {raw_prefix!r}")
    prefix = tuple(_rational_at(v, f"prefix[{i}]") for i, v in enumerate(raw_prefix))
    tail = tail_from_jsonable(obj["tail"])
    try:
        return EnumerationSpec(prefix, tail)
    except SpecError as exc:
        raise SpecError(f"tail: {exc}") from None
