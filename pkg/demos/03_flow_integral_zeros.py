"""
Vanishing orbit integrals of special flows and torus windings
=============================================================

Continuous-time analogue of the zero-sum story: integrate a zero-mean
function along the flow and watch the integral cross zero.  Two flavors:

* a special flow built from a roof function over a circle rotation, where
  the integral is piecewise linear and zeros are exact rationals;
* a straight-line winding on the 2-torus with a trigonometric observable,
  where zeros come from closed-form bracketing.
"""
from fractions import Fraction

from ergolab import (
    AngleSpec,
    CircleRotation,
    PhaseFunction,
    Roof,
    SpecialFlowState,
    TargetSet,
    TorusPoint,
    TorusWinding,
    TrigPolynomial,
    flow_zero_near_returns,
    flow_zero_set_returns,
    integral_profile,
)

# --- special flow: unit roof over the golden rotation ----------------------
roof = Roof([0, Fraction(1, 2)], [1, 1], CircleRotation(AngleSpec.preset("golden")))
phase = PhaseFunction.from_base_values(roof, [1, -1])
start = SpecialFlowState(Fraction(1, 10), 0)

profile = integral_profile(roof, phase, start, 50)
zeros = profile.zeros()
print(f"integral zeros up to t=50: {len(zeros)}")
print("first few:", [str(z) for z in zeros[:6]])

# Which zeros land inside a chosen window of the phase space?  Target the
# left half of the base at any height.
target = TargetSet([(0, Fraction(1, 2))])
hits = flow_zero_set_returns(roof, phase, start, 200, target)
print(f"zeros landing in the target up to t=200: {len(hits)}")

# and which zeros return near the starting point in the flow metric?
near = flow_zero_near_returns(roof, phase, start, 2_000, Fraction(1, 20))
print("near-return zero times:", [float(r.time) for r in near[:6]])

# --- torus winding: slope sqrt(2), observable cos(2 pi x) -------------------
winding = TorusWinding(AngleSpec.preset("sqrt2"))
f = TrigPolynomial.cos_x()
origin = TorusPoint(0, 0)

# sigma(t) = sin(2 pi t) / (2 pi) vanishes at every half-integer; the
# near-return filter keeps the ones where the line has almost closed up
events = flow_zero_near_returns(winding, f, origin, 30, Fraction(1, 20))
for rec in events:
    print(f"t={rec.time:.12f}  residual={rec.value:+.2e}  distance={rec.distance:.4f}")
