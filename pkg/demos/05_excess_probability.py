"""
Excess probability of Birkhoff sums: recurrence vs periodicity
==============================================================

P(|S_n| > eps n) over uniform starting points is the quantitative handle
on recurrence of the associated cylinder map: when it decays to zero the
cascade is conservative.  Ergodic rotations satisfy this for every eps;
a periodic angle can hold the probability at a positive level forever.
"""
import warnings
from fractions import Fraction

from ergolab import (
    AngleSpec,
    CircleRotation,
    RationalAngleWarning,
    StepCocycle,
    sublinearity_estimate,
)

f = StepCocycle.step_at_half()
horizons = [10, 100, 1_000, 10_000]

golden = CircleRotation(AngleSpec.preset("golden"))
decay = sublinearity_estimate(golden, f, horizons, Fraction(1, 20), samples=20_000, seed=3)

with warnings.catch_warnings():
    warnings.simplefilter("ignore", RationalAngleWarning)
    third = CircleRotation(AngleSpec.rational(1, 3))
    stuck = sublinearity_estimate(third, f, horizons, Fraction(1, 3), samples=20_000, seed=3)

print("      n   golden, eps=1/20   alpha=1/3, eps=1/3")
for (n, p_golden), (_, p_third) in zip(decay, stuck):
    print(f"{n:7d}   {p_golden:16.4f}   {p_third:18.4f}")

# The golden column collapses to zero: the +-1 sums over a badly
# approximable angle are bounded, so |S_n| > n/20 eventually never
# happens.  The periodic column sits at 2/3 exactly: for n = 1 mod 3 two
# thirds of the circle carries |S_n| = (n+2)/3 > n/3, and more time never
# changes that -- averaging along a non-ergodic orbit never sees the
# whole space.
