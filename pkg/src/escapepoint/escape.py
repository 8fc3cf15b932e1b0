"""Escape certificates: the computed value, why it is fixed, why it is missed.

``compute_escape`` runs the descent, confirms the result is a fixpoint of the
weight map, cross-checks it against the supremum oracle, and then builds one
verdict per place the enumeration could have produced it:

* each prefix index gets a verdict with the exact gap to the escape value;
* a constant tail gets a single verdict covering every tail index;
* a cycling tail gets one verdict per distinct repeated value;
* an affine tail gets a verdict at its closest-approach index -- the tail is
  strictly monotone in the index, so every other tail value is at least as
  far away as the witnessed one.

All gaps are positive by construction; a zero gap anywhere means the claimed
escape value is actually enumerated and raises ``TheoremViolationError``
rather than producing a broken certificate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from .enumeration import (
    Affine,
    Constant,
    Cycle,
    EnumerationSpec,
    IntervalEnumeration,
    tail_hits,
)
from .fixpoint import (
    DEFAULT_ITERATION_BUDGET,
    FixpointTrace,
    descend_from_top,
    gfp_descend,
    sup_postfix_oracle,
)
from .numerics import RatInterval, as_fraction, dyadic_weight, format_rational, parse_rational
from .weight_map import weight_below, weight_below_bounds

__all__ = [
    "TheoremViolationError",
    "DemoNotApplicableError",
    "Verdict",
    "EscapeCertificate",
    "compute_escape",
    "adjoin_escape_demo",
    "enclose_escape",
    "enclose_escape_traced",
    "certificate_to_jsonable",
    "certificate_from_jsonable",
]

_RELATIONS = ("below", "above")


class TheoremViolationError(RuntimeError):
    """An internal consistency check failed; the computation cannot be trusted."""


class DemoNotApplicableError(ValueError):
    """The requested demonstration has a precondition this input does not meet."""


@dataclass(frozen=True)
class Verdict:
    """One enumerated value compared against the escape value.

    ``where`` is a prefix or tail index when the verdict pins a single
    position, or the string ``"tail"`` when the same value occurs at every
    (or infinitely many) tail positions.  ``gap`` is the exact distance
    |value - escape value| and must be positive.
    """

    where: Union[int, str]
    value: Fraction
    relation: str
    gap: Fraction

    def __post_init__(self) -> None:
        if isinstance(self.where, bool) or (
            not isinstance(self.where, int) and self.where != "tail"
        ):
            raise ValueError(f"where must be an index or 'tail', got {self.where!r}")
        if isinstance(self.where, int) and self.where < 0:
            raise ValueError(f"where must be a non-negative index, got {self.where}")
        object.__setattr__(self, "value", as_fraction(self.value, "verdict value"))
        if self.relation not in _RELATIONS:
            raise ValueError(f"relation must be 'below' or 'above', got {self.relation!r}")
        object.__setattr__(self, "gap", as_fraction(self.gap, "verdict gap"))
        if self.gap <= 0:
            raise ValueError(f"verdict gap must be positive, got {self.gap}")


@dataclass(frozen=True)
class EscapeCertificate:
    """Everything needed to audit one escape computation.

    ``fixpoint_witness`` is the weight map evaluated at ``x0`` and must equal
    ``x0``; the trace must be a settled descent ending there; the verdicts
    separate ``x0`` from every enumerated value.
    """

    x0: Fraction
    fixpoint_witness: Fraction
    trace: FixpointTrace
    verdicts: tuple[Verdict, ...]
    oracle_agreement: bool

    def __post_init__(self) -> None:
        object.__setattr__(self, "x0", as_fraction(self.x0, "escape value"))
        object.__setattr__(self, "fixpoint_witness", as_fraction(self.fixpoint_witness, "fixpoint witness"))
        object.__setattr__(self, "verdicts", tuple(self.verdicts))
        if self.fixpoint_witness != self.x0:
            raise ValueError(
                f"fixpoint witness {self.fixpoint_witness} does not equal the escape value {self.x0}"
            )
        if not self.trace.terminated or self.trace.iterates[-1] != self.x0:
            raise ValueError("certificate trace must be a settled descent ending at the escape value")
        for i, v in enumerate(self.verdicts):
            expected = "below" if v.value < self.x0 else "above"
            if v.value == self.x0 or v.relation != expected or v.gap != abs(v.value - self.x0):
                raise ValueError(f"verdict {i} is inconsistent with escape value {self.x0}")


def _tail_verdicts(spec: EnumerationSpec, x0: Fraction) -> list[Verdict]:
    tail = spec.tail
    start = len(spec.prefix)
    if isinstance(tail, Constant):
        if tail.value == x0:
            raise TheoremViolationError(f"escape value {x0} equals the constant tail value")
        return [_compare(x0, "tail", tail.value)]
    if isinstance(tail, Cycle):
        out = []
        for v in sorted(set(spec.prefix)):
            if v == x0:
                raise TheoremViolationError(f"escape value {x0} recurs in the cycling tail")
            out.append(_compare(x0, "tail", v))
        return out
    assert isinstance(tail, Affine)
    # closest approach of a*n + b to x0 over integer n >= start
    mu = (x0 - tail.b) / tail.a
    best: Verdict | None = None
    for n in sorted({max(start, math.floor(mu)), max(start, math.ceil(mu))}):
        v = tail.a * n + tail.b
        if v == x0:
            raise TheoremViolationError(f"escape value {x0} is the tail value at index {n}")
        verdict = _compare(x0, n, v)
        if best is None or (verdict.gap, verdict.relation != "below") < (best.gap, best.relation != "below"):
            best = verdict
    assert best is not None
    return [best]


def _compare(x0: Fraction, where: Union[int, str], value: Fraction) -> Verdict:
    relation = "below" if value < x0 else "above"
    return Verdict(where=where, value=value, relation=relation, gap=abs(value - x0))


def compute_escape(
    spec: EnumerationSpec,
    budget: int = DEFAULT_ITERATION_BUDGET,
) -> EscapeCertificate:
    """Compute the escape value of an enumeration and certify it.

    The returned value is the greatest postfixpoint of the spec's weight map;
    the certificate shows it is a genuine fixpoint, matches the independent
    supremum oracle, and differs from every enumerated value by an explicit
    positive gap.
    """
    x0, trace = gfp_descend(spec, budget)
    witness = weight_below(spec, x0)
    if witness != x0:
        raise TheoremViolationError(
            f"descent settled at {x0} but the map sends it to {witness}"
        )
    oracle = sup_postfix_oracle(spec)
    if oracle != x0:
        raise TheoremViolationError(
            f"descent found {x0} but the supremum oracle found {oracle}"
        )
    if tail_hits(spec, x0):
        raise TheoremViolationError(f"escape value {x0} is produced by the tail rule")
    verdicts = []
    for i, v in enumerate(spec.prefix):
        if v == x0:
            raise TheoremViolationError(f"escape value {x0} appears at prefix index {i}")
        verdicts.append(_compare(x0, i, v))
    verdicts.extend(_tail_verdicts(spec, x0))
    return EscapeCertificate(
        x0=x0,
        fixpoint_witness=witness,
        trace=trace,
        verdicts=tuple(verdicts),
        oracle_agreement=True,
    )


def adjoin_escape_demo(
    spec: EnumerationSpec,
    budget: int = DEFAULT_ITERATION_BUDGET,
) -> tuple[EscapeCertificate, EnumerationSpec, EscapeCertificate]:
    """Append the escape value to the enumeration and watch the value move.

    Returns (certificate before, extended spec, certificate after).  Only
    constant tails are supported: appending to the prefix re-derives cycling
    and affine tails, which would change the enumeration at infinitely many
    places instead of one.  The constant must sit at least one appended-index
    weight above the old escape value -- then the new escape value provably
    rises by at least 2^-L, where L is the old prefix length.
    """
    before = compute_escape(spec, budget)
    x0 = before.x0
    if not isinstance(spec.tail, Constant):
        raise DemoNotApplicableError(
            "appending the escape value needs a constant tail; cycling and affine "
            "tails change meaning when the prefix grows"
        )
    threshold = x0 + dyadic_weight(len(spec.prefix))
    if spec.tail.value < threshold:
        raise DemoNotApplicableError(
            f"constant tail value {spec.tail.value} is below {threshold}; the appended "
            "value would displace tail weight instead of adding to it"
        )
    extended = EnumerationSpec(prefix=spec.prefix + (x0,), tail=spec.tail)
    after = compute_escape(extended, budget)
    if after.x0 < threshold:
        raise TheoremViolationError(
            f"appending the escape value should raise it to at least {threshold}, got {after.x0}"
        )
    return before, extended, after


def enclose_escape_traced(
    ienum: IntervalEnumeration,
    n_known: int,
    eps: Fraction,
    budget: int = DEFAULT_ITERATION_BUDGET,
) -> tuple[RatInterval, FixpointTrace, FixpointTrace]:
    """Enclose the escape value from interval queries only, keeping traces.

    Runs the descent twice, once on the lower and once on the upper weight
    bound; both bound maps are monotone and bracket the true map, so the pair
    of settled values brackets the true escape value.
    """
    lo, lo_trace = descend_from_top(
        lambda z: weight_below_bounds(ienum, n_known, eps, z).lower, budget
    )
    hi, hi_trace = descend_from_top(
        lambda z: weight_below_bounds(ienum, n_known, eps, z).upper, budget
    )
    return RatInterval(lo, hi), lo_trace, hi_trace


def enclose_escape(
    ienum: IntervalEnumeration,
    n_known: int,
    eps: Fraction,
    budget: int = DEFAULT_ITERATION_BUDGET,
) -> RatInterval:
    """Interval guaranteed to contain the escape value; see enclose_escape_traced."""
    enclosure, _, _ = enclose_escape_traced(ienum, n_known, eps, budget)
    return enclosure


def certificate_to_jsonable(cert: EscapeCertificate) -> dict:
    """Certificate as JSON-ready primitives; inverse of certificate_from_jsonable."""
    return {
        "x0": format_rational(cert.x0),
        "trace": [format_rational(v) for v in cert.trace.iterates],
        "verdicts": [
            {
                "where": v.where,
                "value": format_rational(v.value),
                "relation": v.relation,
                "gap": format_rational(v.gap),
            }
            for v in cert.verdicts
        ],
        "oracle_agreement": cert.oracle_agreement,
    }


def _cert_fail(path: str, message: str) -> ValueError:
    return ValueError(f"{path}: {message}")


def _cert_rational(obj: object, path: str) -> Fraction:
    if not isinstance(obj, str):
        raise _cert_fail(path, f"expected a rational string 'p/q', got {obj!r}")
    try:
        return parse_rational(obj)
    except (ValueError, ZeroDivisionError) as exc:
        raise _cert_fail(path, str(exc)) from None


def certificate_from_jsonable(obj: object) -> EscapeCertificate:
    """Rebuild and re-validate a certificate from its JSON form.

    Checks shape and internal consistency (trace settles at x0, every gap is
    exact and positive).  Whether x0 is right for a particular enumeration is
    a question about the enumeration, not the certificate, so pair this with
    ``compute_escape`` when provenance matters.
    """
    if not isinstance(obj, dict):
        raise ValueError(f"certificate: expected an object, got {type(obj).__name__}")
    expected = {"x0", "trace", "verdicts", "oracle_agreement"}
    if set(obj) != expected:
        missing = expected - set(obj)
        extra = set(obj) - expected
        parts = []
        if missing:
            parts.append(f"missing keys {sorted(missing)}")
        if extra:
            parts.append(f"unexpected keys {sorted(extra)}")
        raise ValueError(f"certificate: {'; '.join(parts)}")
    x0 = _cert_rational(obj["x0"], "x0")
    raw_trace = obj["trace"]
    if not isinstance(raw_trace, list) or not raw_trace:
        raise _cert_fail("trace", "expected a non-empty array of rationals")
    iterates = tuple(_cert_rational(v, f"trace[{i}]") for i, v in enumerate(raw_trace))
    terminated = len(iterates) >= 2 and iterates[-1] == iterates[-2]
    try:
        trace = FixpointTrace(iterates, terminated, len(iterates) - 1)
    except ValueError as exc:
        raise _cert_fail("trace", str(exc)) from None
    raw_verdicts = obj["verdicts"]
    if not isinstance(raw_verdicts, list):
        raise _cert_fail("verdicts", "expected an array")
    verdicts = []
    for i, raw in enumerate(raw_verdicts):
        path = f"verdicts[{i}]"
        if not isinstance(raw, dict):
            raise _cert_fail(path, "expected an object")
        if set(raw) != {"where", "value", "relation", "gap"}:
            raise _cert_fail(path, "expected exactly the keys where, value, relation, gap")
        where = raw["where"]
        if isinstance(where, bool) or not (isinstance(where, int) or where == "tail"):
            raise _cert_fail(f"{path}.where", f"expected an index or 'tail', got {where!r}")
        value = _cert_rational(raw["value"], f"{path}.value")
        gap = _cert_rational(raw["gap"], f"{path}.gap")
        try:
            verdicts.append(Verdict(where=where, value=value, relation=raw["relation"], gap=gap))
        except ValueError as exc:
            raise _cert_fail(path, str(exc)) from None
    agreement = obj["oracle_agreement"]
    if not isinstance(agreement, bool):
        raise _cert_fail("oracle_agreement", f"expected true or false, got {agreement!r}")
    try:
        return EscapeCertificate(
            x0=x0,
            fixpoint_witness=x0,
            trace=trace,
            verdicts=tuple(verdicts),
            oracle_agreement=agreement,
        )
    except ValueError as exc:
        raise ValueError(f"certificate: {exc}") from None
