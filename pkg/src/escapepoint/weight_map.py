"""The dyadic weight map carrying both exact and interval modes.

For an enumeration f the map sends x to the total weight of indices whose
value lies strictly below x:

    weight_below(spec, x)  =  sum of 2^-n over { n : f(n) < x }.

It is monotone, bounded by [0, 2], and (restricted to [0, 2]) a finite step
function: ``plateau_profile`` materializes that step structure, which the
fixpoint oracles consume.  ``weight_below_bounds`` is the semi-decidable
variant: with only n_known interval queries at precision eps it brackets the
true value from both sides, charging every unseen index to a tail allowance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .enumeration import (
    Affine,
    Constant,
    Cycle,
    EnumerationSpec,
    IntervalEnumeration,
    eligible_prefix_indices,
    tail_weight_sum,
)
from .numerics import (
    RationalLike,
    Tribool,
    as_fraction,
    dyadic_tail_weight,
    dyadic_weight,
    geometric_block_sum,
    interval_strictly_below,
    weight_sum,
)

__all__ = [
    "WeightBounds",
    "weight_below",
    "weight_below_bounds",
    "plateau_profile",
]

_ZERO = Fraction(0)
_TWO = Fraction(2)


def weight_below(spec: EnumerationSpec, x: RationalLike) -> Fraction:
    """Exact value of the weight map at x."""
    x = as_fraction(x, "x")
    return weight_sum(eligible_prefix_indices(spec, x)) + tail_weight_sum(spec, x)


@dataclass(frozen=True)
class WeightBounds:
    """Two-sided enclosure of the weight map value at some x.

    ``lower`` counts indices certainly below x; ``upper`` adds the undecided
    indices and a tail allowance 2^-(n_known-1) for everything unexamined.
    Invariant: upper - lower = sum of undecided weights + tail_allowance.
    """

    lower: Fraction
    upper: Fraction
    certain: frozenset[int]
    undecided: frozenset[int]
    tail_allowance: Fraction

    def __post_init__(self) -> None:
        if self.lower > self.upper:
            raise ValueError(f"bounds out of order: {self.lower} > {self.upper}")


def weight_below_bounds(
    ienum: IntervalEnumeration,
    n_known: int,
    eps: RationalLike,
    x: RationalLike,
) -> WeightBounds:
    """Bracket the weight map at x from n_known interval queries at width eps.

    Sound for any oracle meeting the IntervalEnumeration contract: the exact
    map value always lies in [lower, upper].
    """
    if not isinstance(n_known, int) or n_known < 1:
        raise ValueError(f"n_known must be a positive integer, got {n_known!r}")
    eps = as_fraction(eps, "eps")
    x = as_fraction(x, "x")
    certain: set[int] = set()
    undecided: set[int] = set()
    for n in range(n_known):
        verdict = interval_strictly_below(ienum.at(n, eps), x)
        if verdict is Tribool.CERTAIN_TRUE:
            certain.add(n)
        elif verdict is Tribool.UNKNOWN:
            undecided.add(n)
    allowance = dyadic_tail_weight(n_known)
    lower = weight_sum(certain)
    upper = lower + weight_sum(undecided) + allowance
    return WeightBounds(lower, upper, frozenset(certain), frozenset(undecided), allowance)


def plateau_profile(
    spec: EnumerationSpec,
) -> tuple[Fraction, tuple[tuple[Fraction, Fraction], ...]]:
    """Step structure of the weight map on [0, 2].

    Returns ``(base, breaks)`` where ``base`` is the map value at 0 (weight of
    everything already below zero) and ``breaks`` lists, in ascending order,
    each distinct enumeration value t in [0, 2] with the total weight that
    becomes eligible once x passes t.  So for x in [0, 2]:

        weight_below(spec, x) = base + sum of jumps at breaks strictly below x.

    Affine tails contribute one break per index whose value lands in [0, 2];
    that is at most 2/|a| + 1 indices, so cost grows as the slope flattens.
    """
    base = weight_below(spec, _ZERO)
    jumps: dict[Fraction, Fraction] = {}

    def bump(value: Fraction, weight: Fraction) -> None:
        if _ZERO <= value <= _TWO:
            jumps[value] = jumps.get(value, _ZERO) + weight

    for i, v in enumerate(spec.prefix):
        bump(v, dyadic_weight(i))
    start = len(spec.prefix)
    tail = spec.tail
    if isinstance(tail, Constant):
        bump(tail.value, dyadic_tail_weight(start))
    elif isinstance(tail, Cycle):
        for i, v in enumerate(spec.prefix):
            bump(v, geometric_block_sum(start + i, start))
    elif isinstance(tail, Affine):
        if tail.a > 0:
            lo_n = max(start, math.ceil((_ZERO - tail.b) / tail.a))
            hi_n = math.floor((_TWO - tail.b) / tail.a)
        else:
            lo_n = max(start, math.ceil((_TWO - tail.b) / tail.a))
            hi_n = math.floor((_ZERO - tail.b) / tail.a)
        for n in range(lo_n, hi_n + 1):
            bump(tail.a * n + tail.b, dyadic_weight(n))
    return base, tuple(sorted(jumps.items()))
