"""Near-returns of a rotation orbit, and times that are near AND zero.

A rotation orbit comes back within eps of its start along the
continued-fraction denominators; independently, the +-1 step cocycle
sums to zero on its own schedule.  The joint detector intersects the
two and reports how close each surviving time gets.
"""
from fractions import Fraction

from ergolab import (
    AngleSpec,
    CircleRotation,
    StepCocycle,
    cf_convergents,
    joint_zero_returns,
    near_returns,
)

base = CircleRotation(AngleSpec.preset("golden"))
x0 = Fraction(1, 10)

# 1. pure near-returns: d(S^n x, x) < 1/50
close_times = near_returns(base, x0, 10_000, Fraction(1, 50))
print("near-return times (eps=1/50):", close_times)
print("Fibonacci denominators:      ", [c.denominator for c in cf_convergents(base.alpha, 12)])

# 2. simultaneous events: zero sum and distance < 1/100
f = StepCocycle.step_at_half()
joint = joint_zero_returns(base, f, x0, 10_000, Fraction(1, 100))
print(f"\njoint zero/near events up to 10^4: {len(joint)}")
for rec in joint[:8]:
    print(f"  n={rec.time:6d}  sum={rec.value}  distance={rec.distance:.3e}")

# the minimum distance keeps shrinking as the horizon grows -- recurrence
# never exhausts itself
for horizon in (1_000, 10_000, 100_000):
    events = joint_zero_returns(base, f, x0, horizon, Fraction(1, 10))
    best = min(rec.distance for rec in events)
    print(f"horizon {horizon:6d}: {len(events):5d} events, closest approach {best:.3e}")
