"""Appending the escape value to its own enumeration cannot trap it.

The escape value of an enumeration is never enumerated.  The natural
counter-move -- extend the enumeration so it *does* include that value --
only produces a new enumeration with a new, strictly larger escape value.
This script plays that game for a few rounds.
"""

from fractions import Fraction as F

from escapepoint import (
    Constant,
    DemoNotApplicableError,
    EnumerationSpec,
    adjoin_escape_demo,
    dyadic_weight,
)

spec = EnumerationSpec(prefix=(F(3, 2), F(1, 8)), tail=Constant(2))

for round_number in range(1, 5):
    before, extended, after = adjoin_escape_demo(spec)
    step = dyadic_weight(len(spec.prefix))
    print(f"round {round_number}:")
    print(f"  escape value {before.x0} appended at index {len(spec.prefix)}")
    print(f"  new escape value {after.x0} (rise {after.x0 - before.x0}, "
          f"guaranteed >= {step})")
    spec = extended
print()

# The move needs headroom: with the constant at 1/4 the escape value is
# already 2, the top of the lattice, and appending cannot push it higher.
cramped = EnumerationSpec(prefix=(), tail=Constant(F(1, 4)))
try:
    adjoin_escape_demo(cramped)
except DemoNotApplicableError as exc:
    print("refused for f = 1/4, 1/4, ...:", exc)
