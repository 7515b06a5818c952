"""Skew products: driving a second rotation by the cocycle's running sum.

C(x, y) = (x + alpha, y + f(x) * beta) moves the fiber coordinate forward
or backward depending on which half the base point is in.  Because the
running sum of f stays nearly bounded for the golden angle, the fiber
keeps revisiting a thin set of positions instead of spreading out.
"""
from fractions import Fraction

from ergolab import (
    AngleSpec,
    CircleRotation,
    FixedReal,
    ProductState,
    SkewSystem,
    StepCocycle,
    orbit_statistics,
)

system = SkewSystem(
    CircleRotation(AngleSpec.preset("golden")),
    CircleRotation(AngleSpec.preset("sqrt2")),
    StepCocycle.step_at_half(),
)
start = ProductState(FixedReal.of(Fraction(1, 10)), FixedReal.of(0))

# a few explicit steps: the exponent +-1 decides the fiber direction
state = start
for k in range(6):
    state, n = system.step(state)
    print(f"step {k + 1}: exponent {n:+d} -> (x, y) = ({float(state.x):.4f}, {float(state.y):.4f})")

# long-run rectangle frequencies.  The base marginal converges to the
# interval length, but the joint frequency is NOT length * length: the
# orbit is trapped near fiber positions {d * beta} for the few values d
# that the bounded running sum attains.
rects = [
    ((Fraction(0), Fraction(1, 2)), (Fraction(0), Fraction(1))),       # base only
    ((Fraction(0), Fraction(1, 2)), (Fraction(0), Fraction(1, 2))),    # joint
]
stats = orbit_statistics(system, start, 50_000, rects)
print(f"\nafter {stats.steps} steps:")
print(f"  base marginal  frequency: {stats.averages[0]:.4f}  (interval length 0.5)")
print(f"  joint rectangle frequency: {stats.averages[1]:.4f}  (area would be 0.25)")
print(f"  net fiber displacement: {stats.fiber_displacement}")

# the fiber position is tracked as y0 + displacement * beta, so its error
# grows with the net displacement, not with the number of steps taken
print(f"  fiber error after {stats.steps} steps: {stats.final_state.y.err_ulps} ulps"
      " (scales with |displacement|, not step count)")
