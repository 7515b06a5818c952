"""First-return maps: Kac's formula and the induced cocycle.

Restricting the rotation to a target interval A turns it into the induced
(first-return) map.  Two classical facts become measurable:

  * the expected return time is 1/mu(A)           (Kac)
  * the induced cocycle f~ keeps mean zero

We check both exactly for a periodic angle and statistically for the
golden rotation.
"""
from fractions import Fraction

from ergolab import (
    AngleSpec,
    CircleRotation,
    StepCocycle,
    TargetSet,
    induce_point,
    induced_statistics,
)

A = TargetSet([(0, Fraction(1, 2))])
f = StepCocycle.step_at_half()

# hand-checkable case: alpha = 1/4.  From x = 1/10 one step suffices;
# from x = 3/10 the orbit needs three steps and picks up -1 on the way.
quarter = CircleRotation(AngleSpec.rational(1, 4))
for x in (Fraction(1, 10), Fraction(3, 10)):
    s = induce_point(quarter, f, A, x)
    print(f"x={x}: returns after n={s.n} steps at {float(s.return_point):.4f}, f~={s.f_tilde}")

# golden rotation, 20000 uniform starts in A
golden = CircleRotation(AngleSpec.preset("golden"))
stats = induced_statistics(golden, f, A, samples=20_000, seed=11)
print(f"\nmean return time   : {stats.mean_return:.4f} +- {stats.se_return:.4f}")
print(f"Kac product E[n]*mu: {stats.kac_product():.4f}   (ergodic prediction: 1)")
print(f"mean induced value : {stats.mean_cocycle:+.4f} +- {stats.se_cocycle:.4f}")
print(f"censored excursions: {stats.censored}")

# a tiny target makes returns slow; the budget turns runaway excursions
# into counted censoring instead of a hang
sliver = TargetSet([(0, Fraction(1, 500))])
slow = induced_statistics(golden, f, sliver, samples=500, seed=11, budget=400)
print(f"\nsliver target mu=1/500, budget 400: censored {slow.censored} of 500,")
print(f"mean over the uncensored excursions: {slow.mean_return:.1f}")
