"""
Zero Birkhoff sums along an irrational rotation
===============================================

The accumulated value of the +-1 step function along a golden-rotation
orbit keeps returning to exactly zero.  This script scans the first
hundred thousand steps, prints the early zero times, and contrasts the
irrational picture with a periodic angle.
"""
import warnings
from fractions import Fraction

from ergolab import (
    AngleSpec,
    CircleRotation,
    RationalAngleWarning,
    StepCocycle,
    cf_convergents,
    find_zero_sums,
)

# the system: x -> x + alpha mod 1 with alpha = (sqrt(5)-1)/2,
# observed through f = +1 on [0, 1/2), -1 on [1/2, 1)
base = CircleRotation(AngleSpec.preset("golden"))
f = StepCocycle.step_at_half()

records = find_zero_sums(base, f, Fraction(1, 10), 100_000)
times = [r.time for r in records]
print(f"zero-sum times found: {len(times)}")
print("first twenty:", times[:20])

# the gaps between consecutive zeros cluster near continued-fraction
# denominators of alpha -- the rotation's natural return times
gaps = sorted({b - a for a, b in zip(times, times[1:])})
print("distinct gaps:", gaps[:12], "...")
print("convergent denominators:", [c.denominator for c in cf_convergents(base.alpha, 10)])

# a rational angle makes the orbit periodic; the scan still works but
# warns that the ergodic hypothesis behind the theory fails
periodic = CircleRotation(AngleSpec.rational(1, 2))
with warnings.catch_warnings(record=True) as caught:
    warnings.simplefilter("always")
    periodic_times = [r.time for r in find_zero_sums(periodic, f, Fraction(1, 10), 10)]
print("\nperiodic angle 1/2 zeros up to 10:", periodic_times)
print("warning raised:", isinstance(caught[0].message, RationalAngleWarning))
