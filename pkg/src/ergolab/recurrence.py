"""Recurrence detectors for cylindrical cascades and their flow analogues.

A cylindrical cascade moves ``(x, z)`` to ``(Sx, z + f(x))`` over a base
circle map ``S`` and an integer cocycle ``f``; the fiber coordinate after
``n`` steps is the Birkhoff sum ``S_n(x)``.  The detectors here scan finite
orbit segments for the events the recurrence theory predicts happen
infinitely often:

* ``find_zero_sums`` — times with ``S_n(x) = 0`` (exact integers);
* ``near_returns`` — times when the base orbit comes ``eps``-close to its
  start;
* ``joint_zero_returns`` — both at once;
* ``flow_zero_set_returns`` / ``flow_zero_near_returns`` — continuous-time
  analogues for special flows (exact rational zero times of the orbit
  integral) and torus windings (bracketed zeros of trigonometric
  integrals);
* ``sublinearity_estimate`` — the empirical probability that ``|S_n|``
  exceeds ``eps * n``, whose decay to 0 is the sufficient condition for
  recurrence of skew products built on ``f``.

Everything that can be exact is exact: integer sums, rational zero times,
rational-angle dispatch to closed-form orbit-class enumeration.  Guarded
fixed-point comparisons back the rest; an undecidable comparison raises
``PrecisionExhaustedError`` rather than silently guessing.
"""
from __future__ import annotations

import warnings
from bisect import bisect_right
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Union

import numpy as np

from .angles import AngleSpec
from .cocycles import (
    PhaseFunction,
    StepCocycle,
    TrigPolynomial,
    birkhoff_sums,
    integral_profile,
    iter_rotation_cells,
    iter_rotation_near_flags,
    winding_integral,
    winding_zero_times,
)
from .errors import (
    PrecisionExhaustedError,
    RationalAngleWarning,
    ZeroValueStartError,
)
from .fixedpoint import (
    ONE,
    FixedReal,
    Real,
    as_fraction,
    circle_distance,
    exact_fraction,
)
from .systems import (
    BaseMap,
    CircleRotation,
    Roof,
    SpecialFlowState,
    TorusPoint,
    TorusWinding,
    special_flow_step,
    flow_distance,
)

Number = Union[int, float, Fraction]


@dataclass(frozen=True, slots=True)
class CascadeState:
    """A point ``(x, z)`` of the cylinder: base point and exact integer fiber."""

    x: FixedReal
    z: int


def cascade_apply(base: BaseMap, f: StepCocycle, state: CascadeState) -> CascadeState:
    """One cascade step ``(x, z) -> (Sx, z + f(x))``."""
    if not f.is_integer:
        raise ValueError("the cascade fiber needs an integer-valued cocycle")
    return CascadeState(base.apply(state.x), state.z + f.value_at(state.x))


@dataclass(frozen=True, slots=True)
class ReturnRecord:
    """One detected recurrence event.

    ``time`` is the step count (cascades) or the flow time (exact rational
    for special flows, float for windings).  ``value`` is the Birkhoff sum
    or orbit integral at that time — exactly zero for the zero-detectors,
    a tiny float residual for bracketed trig zeros.  ``distance`` and
    ``in_set`` carry the near-return metric / target-set membership when
    the detector computes them.
    """

    time: Number
    value: Number
    distance: Number | None = None
    in_set: bool | None = None


class TargetSet:
    """A finite union of disjoint half-open intervals on the base circle.

    Endpoints are exact rationals.  For flow phase spaces the set is the
    full-height cylinder over the base intervals, unless ``band=(lo, hi)``
    restricts it to a height window (an exact rectangle union).
    """

    __slots__ = ("intervals", "band")

    def __init__(
        self,
        intervals: Sequence[tuple[Real, Real]],
        band: tuple[Real, Real] | None = None,
    ):
        cleaned = []
        for lo, hi in intervals:
            lo, hi = as_fraction(lo), as_fraction(hi)
            if not 0 <= lo < hi <= 1:
                raise ValueError(f"bad interval [{lo}, {hi}): need 0 <= lo < hi <= 1")
            cleaned.append((lo, hi))
        cleaned.sort()
        if not cleaned:
            raise ValueError("a target set needs at least one interval")
        merged = [cleaned[0]]
        for lo, hi in cleaned[1:]:
            if merged[-1][1] > lo:
                raise ValueError("target intervals must be disjoint")
            if merged[-1][1] == lo:  # touching halves join into one interval
                merged[-1] = (merged[-1][0], hi)
            else:
                merged.append((lo, hi))
        self.intervals = tuple(merged)
        if band is not None:
            b_lo, b_hi = as_fraction(band[0]), as_fraction(band[1])
            if not 0 <= b_lo < b_hi:
                raise ValueError("height band needs 0 <= lo < hi")
            band = (b_lo, b_hi)
        self.band = band

    @classmethod
    def whole(cls) -> "TargetSet":
        return cls([(0, 1)])

    def measure(self) -> Fraction:
        """Lebesgue measure of the base union (exact)."""
        return sum((hi - lo for lo, hi in self.intervals), Fraction(0))

    def contains_fraction(self, x: Fraction) -> bool:
        x %= 1
        for lo, hi in self.intervals:
            if lo <= x < hi:
                return True
        return False

    def contains(self, p: FixedReal) -> bool:
        """Guarded membership for a circle point.

        Exact points decide exactly.  For a point with an error bound the
        whole uncertainty arc must land inside the union (True) or outside
        it (False); anything straddling an endpoint raises precision
        exhaustion instead of guessing.
        """
        p = p.frac()
        if p.is_exact:
            return self.contains_fraction(p.to_fraction())
        lo_f, hi_f = p.interval()
        # Decompose the uncertainty arc into sub-arcs of [0, 1).  A sub-arc
        # clamped at 1 is open there: the value 1 itself wraps to 0 and is
        # carried by the high-wrap piece instead.
        if hi_f - lo_f >= 1:
            segments = [(Fraction(0), Fraction(1), False)]
        else:
            segments = []
            if hi_f < 1:
                segments.append((max(lo_f, Fraction(0)), hi_f, True))
            else:
                segments.append((max(lo_f, Fraction(0)), Fraction(1), False))
                segments.append((Fraction(0), hi_f - 1, True))
            if lo_f < 0:
                segments.append((lo_f + 1, Fraction(1), False))
        if all(self._covers(s) for s in segments):
            return True
        if all(self._misses(s) for s in segments):
            return False
        raise PrecisionExhaustedError("ambiguous target-set membership")

    def _covers(self, seg: tuple[Fraction, Fraction, bool]) -> bool:
        a, b, top_closed = seg
        return any(
            lo <= a and (b < hi if top_closed else b <= hi)
            for lo, hi in self.intervals
        )

    def _misses(self, seg: tuple[Fraction, Fraction, bool]) -> bool:
        a, b, top_closed = seg
        return all(
            (b < lo if top_closed else b <= lo) or a >= hi
            for lo, hi in self.intervals
        )

    def contains_state(self, state: SpecialFlowState) -> bool:
        """Membership for a special-flow point (base test, then exact band test)."""
        if not self.contains(state.a):
            return False
        if self.band is None:
            return True
        return self.band[0] <= state.b < self.band[1]

    def __repr__(self) -> str:
        parts = ", ".join(f"[{lo}, {hi})" for lo, hi in self.intervals)
        suffix = f" x [{self.band[0]}, {self.band[1]})" if self.band else ""
        return f"TargetSet({parts}{suffix})"


# --------------------------------------------------------------------------- #
# helpers
# --------------------------------------------------------------------------- #


def _guarded_less(value: FixedReal, threshold: Fraction, step=None) -> bool:
    """Decide ``value < threshold`` or raise if the error interval straddles it."""
    lo, hi = value.interval()
    if hi < threshold:
        return True
    if lo >= threshold:
        return False
    raise PrecisionExhaustedError(
        "comparison against eps is ambiguous at this precision", step=step
    )


def _warn_rational(what: str) -> None:
    warnings.warn(
        f"rational rotation angle: the base map is not ergodic, so {what} "
        "reflects only the finitely many periodic orbit classes",
        RationalAngleWarning,
        stacklevel=3,
    )


def _rational_orbit_sums(
    alpha: Fraction, f: StepCocycle, x0: Fraction
) -> tuple[list, "object"]:
    """Prefix sums ``P_0..P_q`` of f over one period of the rational rotation.

    ``S_{m q + r} = m * P_q + P_r`` for r in 1..q — the whole infinite sum
    sequence in O(q) data.
    """
    q = alpha.denominator
    prefix = [0]
    pos = x0 % 1
    for _ in range(q):
        prefix.append(prefix[-1] + f.value_at_fraction(pos))
        pos = (pos + alpha) % 1
    return prefix, prefix[q]


def _rational_zero_times(
    alpha: Fraction, f: StepCocycle, x0: Fraction, count: int
) -> list[int]:
    prefix, cycle = _rational_orbit_sums(alpha, f, x0)
    q = alpha.denominator
    times: list[int] = []
    if cycle == 0:
        for r in range(1, q + 1):
            if prefix[r] == 0:
                times.extend(range(r, count + 1, q))
        times.sort()
    else:
        for r in range(1, q + 1):
            if prefix[r] % cycle == 0:
                m = -(prefix[r] // cycle)
                n = m * q + r
                if m >= 0 and n <= count:
                    times.append(n)
        times.sort()
    return times


def _rational_residue_distances(alpha: Fraction) -> list[Fraction]:
    """Circle distance ``||n alpha||`` as a function of ``n mod q`` (exact)."""
    q = alpha.denominator
    p = alpha.numerator % q if q > 1 else 0
    out = []
    for r in range(q):
        k = (r * p) % q
        out.append(Fraction(min(k, q - k), q))
    return out


_INT64_HEADROOM = 1 << 62


def _kernel_safe(f: StepCocycle, count: int) -> bool:
    max_abs = max(abs(v) for v in f.values)
    return max_abs * count < _INT64_HEADROOM


# --------------------------------------------------------------------------- #
# cascade detectors
# --------------------------------------------------------------------------- #


def find_zero_sums(
    base: BaseMap, f: StepCocycle, x: Real, count: int
) -> list[ReturnRecord]:
    """All times ``1 <= n <= count`` with exact Birkhoff sum ``S_n(x) = 0``.

    Rational rotation angles dispatch to closed-form enumeration of the
    q-periodic orbit (with a :class:`RationalAngleWarning`, since the
    recurrence theorems assume ergodicity); irrational rotations run the
    exact fast kernel; interval exchanges fall back to the guarded loop.
    """
    if not f.is_integer:
        raise ValueError("zero-sum detection needs an integer-valued cocycle")
    if count < 1:
        raise ValueError("count must be at least 1")
    x_exact = exact_fraction(x)
    x = FixedReal.of(x).frac()
    if isinstance(base, CircleRotation) and base.is_rational:
        _warn_rational("the zero-sum scan")
        if x_exact is not None:
            times = _rational_zero_times(
                base.alpha.as_fraction(), f, x_exact % 1, count
            )
            return [ReturnRecord(time=n, value=0) for n in times]
    if isinstance(base, CircleRotation) and _kernel_safe(f, count):
        values = np.asarray(f.values, dtype=np.int64)
        total = 0
        times: list[int] = []
        for offset, cells in iter_rotation_cells(base, f.walls, x, count):
            sums = np.cumsum(values[cells]) + total
            for j in np.nonzero(sums == 0)[0].tolist():
                times.append(offset + 1 + j)
            total = int(sums[-1])
        return [ReturnRecord(time=n, value=0) for n in times]
    return [
        ReturnRecord(time=n, value=0)
        for n, s in enumerate(birkhoff_sums(base, f, x, count), start=1)
        if s == 0
    ]


def near_returns(base: BaseMap, x: Real, count: int, eps: Real) -> list[int]:
    """All times ``1 <= n <= count`` with circle distance ``d(S^n x, x) < eps``.

    For rotations the distance is ``||n alpha||`` independently of the
    start, so the scan is a pure displacement test (exact residue table
    when alpha is rational, guarded coarse/exact kernel otherwise).
    """
    eps = as_fraction(eps)
    if eps <= 0:
        raise ValueError("eps must be positive")
    if count < 0:
        raise ValueError("count must be non-negative")
    x = FixedReal.of(x).frac()
    if isinstance(base, CircleRotation):
        if base.is_rational:
            dist = _rational_residue_distances(base.alpha.as_fraction())
            q = len(dist)
            passes = [d < eps for d in dist]
            return [n for n in range(1, count + 1) if passes[n % q]]
        out: list[int] = []
        for offset, flags in iter_rotation_near_flags(base, eps, count):
            for j in np.nonzero(flags)[0].tolist():
                out.append(offset + 1 + j)
        return out
    out = []
    p = x
    for n in range(1, count + 1):
        p = base.apply(p)
        if _guarded_less(circle_distance(p, x), eps, step=n):
            out.append(n)
    return out


def joint_zero_returns(
    base: BaseMap, f: StepCocycle, x: Real, count: int, eps: Real
) -> list[ReturnRecord]:
    """Times with ``S_n(x) = 0`` and ``d(S^n x, x) < eps`` simultaneously.

    The intersection of :func:`find_zero_sums` and :func:`near_returns`,
    with the distance recorded on each surviving record (exact rational
    for rational angles, float rendering of the guarded value otherwise).
    """
    eps = as_fraction(eps)
    if eps <= 0:
        raise ValueError("eps must be positive")
    zeros = find_zero_sums(base, f, x, count)
    x_exact = exact_fraction(x)
    x = FixedReal.of(x).frac()
    records: list[ReturnRecord] = []
    if isinstance(base, CircleRotation) and base.is_rational and x_exact is not None:
        dist = _rational_residue_distances(base.alpha.as_fraction())
        q = len(dist)
        for rec in zeros:
            d = dist[rec.time % q]
            if d < eps:
                records.append(ReturnRecord(time=rec.time, value=0, distance=d))
        return records
    if isinstance(base, CircleRotation):
        flags = np.zeros(count + 1, dtype=bool)
        for offset, chunk in iter_rotation_near_flags(base, eps, count):
            flags[offset + 1 : offset + 1 + len(chunk)] = chunk
        a_m = base.alpha.resolved.mantissa
        a_e = base.alpha.resolved.err_ulps
        for rec in zeros:
            n = rec.time
            if flags[n]:
                disp = (n * a_m) % ONE
                d = FixedReal(min(disp, ONE - disp), n * a_e)
                records.append(
                    ReturnRecord(time=n, value=0, distance=float(d))
                )
        return records
    zero_times = {rec.time for rec in zeros}
    p = x
    for n in range(1, count + 1):
        p = base.apply(p)
        if n in zero_times:
            d = circle_distance(p, x)
            if _guarded_less(d, eps, step=n):
                records.append(ReturnRecord(time=n, value=0, distance=float(d)))
    return records


# --------------------------------------------------------------------------- #
# flow detectors
# --------------------------------------------------------------------------- #


def _flow_preamble(
    roof: Roof,
    f: PhaseFunction,
    start: SpecialFlowState,
    allow_zero_value: bool,
    what: str,
) -> None:
    if isinstance(roof.base, CircleRotation) and roof.base.is_rational:
        _warn_rational(what)
    if not allow_zero_value and f.value_at(start) == 0:
        raise ZeroValueStartError(
            "the phase function vanishes at the starting point; the recurrence "
            "statements assume f(x) != 0 (pass allow_zero_value=True to override)"
        )


def flow_zero_set_returns(
    roof: Roof,
    f: PhaseFunction,
    start: SpecialFlowState,
    t_max: Real,
    target: TargetSet,
    allow_zero_value: bool = False,
    max_crossings: int | None = None,
) -> list[ReturnRecord]:
    """Times ``0 < t <= t_max`` with orbit integral exactly 0 and ``T_t x`` in the target.

    Zero times come from the exact piecewise-linear integral profile
    (interval zeros reported by their left endpoint); the orbit is then
    re-stepped incrementally to each zero time and tested for membership.
    Only in-set events are emitted, each flagged ``in_set=True``.  The
    starting point itself need not lie in the target.
    """
    _flow_preamble(roof, f, start, allow_zero_value, "the flow zero/set scan")
    profile = integral_profile(roof, f, start, t_max, max_crossings)
    records: list[ReturnRecord] = []
    state, t_cur = start, Fraction(0)
    for t in profile.zeros():
        state, _ = special_flow_step(roof, state, t - t_cur)
        t_cur = t
        if target.contains_state(state):
            records.append(ReturnRecord(time=t, value=Fraction(0), in_set=True))
    return records


def flow_zero_near_returns(
    system: Union[Roof, TorusWinding],
    f: Union[PhaseFunction, TrigPolynomial],
    start: Union[SpecialFlowState, TorusPoint],
    t_max: Real,
    eps: Real,
    allow_zero_value: bool = False,
    grid_step: float | None = None,
    max_crossings: int | None = None,
) -> list[ReturnRecord]:
    """Times with vanishing orbit integral and phase point ``eps``-close to the start.

    Two engines share the signature:

    * special flow (``system`` is a :class:`Roof`): exact rational zero
      times, distances in the product chart ``max(base circle distance,
      height difference)``;
    * torus winding: zeros of the closed-form trigonometric integral by
      sign-change bracketing (tolerance 1e-12 in t; tangential zeros
      between grid points are missed by design), distances as the max of
      the two coordinate distances.
    """
    if isinstance(system, TorusWinding):
        if not allow_zero_value and f.value(start) == 0:
            raise ZeroValueStartError(
                "the observable vanishes at the starting point; pass "
                "allow_zero_value=True to override"
            )
        eps_f = float(eps)
        if eps_f <= 0:
            raise ValueError("eps must be positive")
        records = []
        for t in winding_zero_times(system, f, start, float(t_max), grid_step):
            moved = system.flow(start, t)
            d = float(system.distance(start, moved))
            if d < eps_f:
                residual = winding_integral(system, f, start, t)
                records.append(ReturnRecord(time=t, value=residual, distance=d))
        return records
    eps = as_fraction(eps)
    if eps <= 0:
        raise ValueError("eps must be positive")
    _flow_preamble(system, f, start, allow_zero_value, "the flow zero/near scan")
    profile = integral_profile(system, f, start, t_max, max_crossings)
    records = []
    state, t_cur = start, Fraction(0)
    for t in profile.zeros():
        state, _ = special_flow_step(system, state, t - t_cur)
        t_cur = t
        d = flow_distance(system, start, state)
        if d < eps:
            records.append(ReturnRecord(time=t, value=Fraction(0), distance=d))
    return records


# --------------------------------------------------------------------------- #
# sublinearity (excess-probability) estimator
# --------------------------------------------------------------------------- #


def sublinearity_estimate(
    base: BaseMap,
    f: StepCocycle,
    n_list: Sequence[int],
    eps: Real,
    samples: int = 10_000,
    seed: int = 0,
) -> list[tuple[int, float]]:
    """Empirical ``P(|S_n| > eps * n)`` over uniform starts, for each n in ``n_list``.

    Decay of this probability to 0 is the sufficient condition for
    recurrence of the associated cylinder maps; ergodic zero-mean systems
    satisfy it for every eps by the ergodic theorem.  The estimate is
    deterministic under ``seed``.

    Sampling happens on the 2^-64 grid: starting points are uniform 64-bit
    fixed-point values and (for irrational rotations) the orbit uses the
    exact dynamics of the angle's top 64 bits, so every computed sum is the
    exact sum of an angle within 2^-64 of the requested one.  For n up to
    ~10^9 the orbit deviation stays far below any cell width in use, and
    the threshold test ``|S_n| * den > num * n`` is exact integer
    arithmetic.  Rational angles skip the grid and use closed-form
    orbit-class sums per sample.
    """
    if samples < 100:
        raise ValueError("need at least 100 samples for a meaningful estimate")
    eps = as_fraction(eps)
    if eps <= 0:
        raise ValueError("eps must be positive")
    if not f.is_integer:
        raise ValueError("the estimator needs an integer-valued cocycle")
    n_list = [int(n) for n in n_list]
    if any(n < 1 for n in n_list):
        raise ValueError("all n must be at least 1")
    if isinstance(base, CircleRotation) and base.is_rational:
        _warn_rational("the excess-probability estimate")
        return _sublinearity_rational(base.alpha.as_fraction(), f, n_list, eps, samples, seed)
    if isinstance(base, CircleRotation):
        return _sublinearity_grid(base, f, n_list, eps, samples, seed)
    return _sublinearity_loop(base, f, n_list, eps, samples, seed)


def _exceeds(total: int, n: int, eps: Fraction) -> bool:
    return abs(total) * eps.denominator > eps.numerator * n


def _sublinearity_grid(
    base: CircleRotation,
    f: StepCocycle,
    n_list: list[int],
    eps: Fraction,
    samples: int,
    seed: int,
) -> list[tuple[int, float]]:
    rng = np.random.default_rng(seed)
    xs = rng.integers(0, 1 << 64, size=samples, dtype=np.uint64)
    a64 = np.uint64(base.alpha.resolved.mantissa >> 128)
    walls64 = np.array([m >> 128 for m in f.walls.mantissas], dtype=np.uint64)
    values = np.asarray(f.values, dtype=np.int64)
    totals = np.zeros(samples, dtype=np.int64)
    wanted = {}
    num, den = eps.numerator, eps.denominator
    pts = xs.copy()
    for i in range(max(n_list)):
        cells = np.searchsorted(walls64, pts, side="right") - 1
        totals += values[cells]
        pts += a64  # wraps mod 2**64
        n = i + 1
        if n in wanted:
            continue
        if n in set(n_list):
            exceed = np.abs(totals) * den > np.int64(num) * n
            wanted[n] = float(np.count_nonzero(exceed)) / samples
    return [(n, wanted[n]) for n in n_list]


def _sublinearity_rational(
    alpha: Fraction,
    f: StepCocycle,
    n_list: list[int],
    eps: Fraction,
    samples: int,
    seed: int,
) -> list[tuple[int, float]]:
    rng = np.random.default_rng(seed)
    xs = rng.integers(0, 1 << 64, size=samples, dtype=np.uint64)
    q = alpha.denominator
    counts = {n: 0 for n in n_list}
    for raw in xs.tolist():
        x0 = Fraction(int(raw), 1 << 64)
        prefix, cycle = _rational_orbit_sums(alpha, f, x0)
        for n in n_list:
            m, r = divmod(n, q)
            # S_n = m*cycle + P_r with the r=0 case folded into the previous lap
            total = m * cycle + prefix[r]
            if _exceeds(total, n, eps):
                counts[n] += 1
    return [(n, counts[n] / samples) for n in n_list]


def _sublinearity_loop(
    base: BaseMap,
    f: StepCocycle,
    n_list: list[int],
    eps: Fraction,
    samples: int,
    seed: int,
) -> list[tuple[int, float]]:
    rng = np.random.default_rng(seed)
    xs = rng.integers(0, 1 << 64, size=samples, dtype=np.uint64)
    checkpoints = sorted(set(n_list))
    counts = {n: 0 for n in checkpoints}
    for raw in xs.tolist():
        x = FixedReal.from_fraction(Fraction(int(raw), 1 << 64))
        next_idx = 0
        for n, total in enumerate(birkhoff_sums(base, f, x, checkpoints[-1]), start=1):
            if n == checkpoints[next_idx]:
                if _exceeds(total, n, eps):
                    counts[n] += 1
                next_idx += 1
                if next_idx == len(checkpoints):
                    break
    return [(n, counts[n] / samples) for n in n_list]
