"""Zero-mean observables over the base systems, and their orbit sums/integrals.

Three observable families:

* :class:`StepCocycle` — piecewise constant on circle cells, integer-valued
  in cascade mode.  Birkhoff sums are exact integers.
* :class:`PhaseFunction` — rectangle-constant on the region under a roof.
  The orbit integral of a special flow against it is piecewise linear in
  time; :func:`integral_profile` returns its exact node list.
* :class:`TrigPolynomial` — a trigonometric polynomial without constant
  term on the 2-torus.  Orbit integrals along a winding have closed form
  and are evaluated in floating point (documented 1e-12 territory).

The module also houses the exact fast kernel for rotation orbits: a
chunked numpy scan that classifies points by their top 64 mantissa bits
and falls back to full 192-bit guarded arithmetic for the (provably few)
steps whose conservative interval approaches a cell wall.  Results are
bit-for-bit identical to the pure big-integer loop.
"""
from __future__ import annotations

import math
from bisect import bisect_right
from fractions import Fraction
from typing import Iterable, Iterator, Sequence, Union

import numpy as np

from .errors import (
    CrossingBudgetError,
    PrecisionExhaustedError,
    ResonantFrequencyError,
)
from .fixedpoint import ONE, SCALE, FixedReal, Real, Walls, as_fraction
from .systems import (
    BaseMap,
    CircleRotation,
    IntervalExchange,
    Roof,
    SpecialFlowState,
    TorusPoint,
    TorusWinding,
    default_crossing_budget,
)

_LOW_BITS = SCALE - 64  # coarse kernel keeps the top 64 of 192 bits


class StepCocycle:
    """A zero-mean step function on the circle.

    ``breakpoints`` start at 0 and must be exact (dyadic) so that the
    zero-mean condition is checkable exactly; ``values`` are integers
    (cascade mode) or exact rationals (flow mode).  The mean
    ``sum(width * value)`` must vanish identically.
    """

    __slots__ = ("walls", "values", "is_integer", "_wall_fractions")

    def __init__(self, breakpoints: Sequence[Real], values: Sequence[Real]):
        self.walls = Walls([FixedReal.of(b) for b in breakpoints])
        if not self.walls.exact:
            raise ValueError("cocycle breakpoints must be exact fixed-point values")
        if len(values) != len(self.walls):
            raise ValueError("need exactly one value per cell")
        self.is_integer = all(isinstance(v, int) for v in values)
        if self.is_integer:
            self.values: tuple = tuple(int(v) for v in values)
        else:
            self.values = tuple(as_fraction(v) for v in values)
        mean = sum(
            (w * Fraction(v) for w, v in zip(self.walls.widths(), self.values)),
            Fraction(0),
        )
        if mean != 0:
            raise ValueError(f"cocycle mean must be exactly zero, got {mean}")
        self._wall_fractions = [Fraction(m, ONE) for m in self.walls.mantissas]

    @classmethod
    def step_at_half(cls) -> "StepCocycle":
        """The workhorse example: +1 on [0, 1/2), -1 on [1/2, 1)."""
        return cls([0, Fraction(1, 2)], [1, -1])

    def value_at(self, p: FixedReal):
        """Value at a circle point (guarded classification, half-open cells)."""
        return self.values[self.walls.locate(p)]

    def value_at_fraction(self, x: Fraction):
        """Exact evaluation at an exact rational point (oracle-grade path)."""
        x %= 1
        idx = bisect_right(self._wall_fractions, x) - 1
        return self.values[idx]

    def __repr__(self) -> str:
        cells = ", ".join(str(v) for v in self.values)
        return f"StepCocycle({len(self.values)} cells: {cells})"


# --------------------------------------------------------------------------- #
# exact fast kernel for rotation orbits
# --------------------------------------------------------------------------- #


def _exact_cell(walls: Walls, mantissa: int, err: int, step: int) -> int:
    try:
        return walls.locate(FixedReal(mantissa, err))
    except PrecisionExhaustedError as exc:
        raise PrecisionExhaustedError(str(exc), step=step) from None


def iter_rotation_cells(
    rotation: CircleRotation,
    walls: Walls,
    x: FixedReal,
    count: int,
    chunk: int = 1 << 16,
) -> Iterator[tuple[int, np.ndarray]]:
    """Yield ``(offset, cell_indices)`` for the orbit points ``S^i x``, i < count.

    Exactness: the coarse pass works on top-64-bit words ``c_i``; the true
    point value lies in ``[(c_i - 1), (c_i + i + 2)]`` coarse ulps (mantissa
    truncation is one-sided, the error interval adds at most one ulp each
    way).  Any step whose bracket comes near a wall is recomputed with full
    192-bit guarded arithmetic, so every returned index is provably the
    guarded classification — or :class:`PrecisionExhaustedError` is raised
    with the offending step index.
    """
    if count <= 0:
        return
    a_m, a_e = rotation.alpha.resolved.mantissa, rotation.alpha.resolved.err_ulps
    x_m, x_e = x.mantissa % ONE, x.err_ulps
    if x_e + count * a_e >= 1 << _LOW_BITS:
        raise PrecisionExhaustedError(
            "accumulated orbit error exceeds the coarse kernel's margin"
        )
    a64 = np.uint64(a_m >> _LOW_BITS)
    x64 = np.uint64(x_m >> _LOW_BITS)
    walls64 = np.array([m >> _LOW_BITS for m in walls.mantissas], dtype=np.uint64)
    # distance from c to the next wall upward; the sentinel 0 wraps to 2**64
    next64 = np.roll(walls64, -1)
    values_margin = np.uint64(count + 4)
    low_margin = np.uint64(2)
    for offset in range(0, count, chunk):
        length = min(chunk, count - offset)
        idx = np.arange(offset, offset + length, dtype=np.uint64)
        coarse = x64 + idx * a64  # wraps mod 2**64, as intended
        cells = np.searchsorted(walls64, coarse, side="right").astype(np.int64) - 1
        gap_up = next64[cells] - coarse  # uint64 wrap gives distance to 2**64
        gap_down = coarse - walls64[cells]
        suspect = np.nonzero((gap_up <= values_margin) | (gap_down <= low_margin))[0]
        for j in suspect.tolist():
            i = offset + j
            mantissa = (x_m + i * a_m) % ONE
            cells[j] = _exact_cell(walls, mantissa, x_e + i * a_e, i)
        yield offset, cells


def iter_rotation_near_flags(
    rotation: CircleRotation,
    eps: Fraction,
    count: int,
    base_err: int = 0,
    chunk: int = 1 << 16,
) -> Iterator[tuple[int, np.ndarray]]:
    """Yield ``(offset, bool flags)`` where flag[i] means ``||(offset+i+1) * alpha|| < eps``.

    Rotation distances to the start are start-independent, so only the
    displacement ``n * alpha`` matters.  Guarded like the cell kernel: near
    the eps threshold the comparison is done exactly, and an interval that
    straddles eps raises precision exhaustion.
    """
    a_m, a_e = rotation.alpha.resolved.mantissa, rotation.alpha.resolved.err_ulps
    if eps >= 1:
        for offset in range(0, count, chunk):
            length = min(chunk, count - offset)
            yield offset, np.ones(length, dtype=bool)
        return
    if base_err + count * a_e >= 1 << _LOW_BITS:
        raise PrecisionExhaustedError(
            "accumulated displacement error exceeds the coarse kernel's margin"
        )
    a64 = np.uint64(a_m >> _LOW_BITS)
    eps64 = np.uint64((eps.numerator * ONE // eps.denominator) >> _LOW_BITS)
    margin = np.uint64(count + 4)
    eps_num, eps_den = eps.numerator, eps.denominator
    for offset in range(0, count, chunk):
        length = min(chunk, count - offset)
        n_arr = np.arange(offset + 1, offset + 1 + length, dtype=np.uint64)
        disp = n_arr * a64
        dist = np.minimum(disp, np.uint64(0) - disp)
        flags = dist < eps64
        delta = np.minimum(dist - eps64, eps64 - dist)  # wrapped |dist - eps|
        suspect = np.nonzero(delta <= margin)[0]
        for j in suspect.tolist():
            n = offset + 1 + j
            disp_m = (n * a_m) % ONE
            dist_m = min(disp_m, ONE - disp_m)
            err = n * a_e + base_err
            # exact comparison of dist_m ± err ulps against eps
            if (dist_m + err) * eps_den < eps_num * ONE:
                flags[j] = True
            elif (dist_m - err) * eps_den >= eps_num * ONE:
                flags[j] = False
            else:
                raise PrecisionExhaustedError(
                    "ambiguous near-return comparison against eps", step=n
                )
        yield offset, flags


# --------------------------------------------------------------------------- #
# Birkhoff sums
# --------------------------------------------------------------------------- #


def birkhoff_sums(base: BaseMap, f: StepCocycle, x: FixedReal, count: int) -> Iterator[int]:
    """Stream the exact partial sums ``S_1, ..., S_count`` of ``f`` along the orbit.

    Pure big-integer loop, O(1) memory: this is the slow, independent
    reference path that the fast detectors are validated against.  Integer
    cocycles only (cascade mode).
    """
    if not f.is_integer:
        raise ValueError("cascade scans need an integer-valued cocycle")
    if count < 0:
        raise ValueError("count must be non-negative")
    total = 0
    if isinstance(base, CircleRotation) and base.is_rational and x.is_exact:
        alpha = base.alpha.as_fraction()
        pos = x.to_fraction() % 1
        for _ in range(count):
            total += f.value_at_fraction(pos)
            pos = (pos + alpha) % 1
            yield total
        return
    walls = f.walls
    if isinstance(base, CircleRotation):
        a_m, a_e = base.alpha.resolved.mantissa, base.alpha.resolved.err_ulps
        m, e = x.mantissa % ONE, x.err_ulps
        for i in range(count):
            total += f.values[_exact_cell(walls, m, e, i)]
            m = (m + a_m) % ONE
            e += a_e
            yield total
    else:
        p = x.frac()
        for i in range(count):
            try:
                total += f.values[walls.locate(p)]
            except PrecisionExhaustedError as exc:
                raise PrecisionExhaustedError(str(exc), step=i) from None
            p = base.apply(p)
            yield total


# --------------------------------------------------------------------------- #
# phase functions over a roof
# --------------------------------------------------------------------------- #


class PhaseFunction:
    """Rectangle-constant observable on the region under a roof.

    For each roof cell, ``bands`` lists ``(height, value)`` pairs stacking
    from the floor to the roof: the function equals ``value`` on
    ``cell x [band_lo, band_hi)``.  Band heights must fill the cell height
    exactly, and the area-weighted mean over the whole region must vanish
    identically (checked in exact rational arithmetic).
    """

    __slots__ = ("roof", "band_tops", "band_values")

    def __init__(self, roof: Roof, bands_per_cell: Sequence[Sequence[tuple[Real, Real]]]):
        if len(bands_per_cell) != len(roof.walls):
            raise ValueError("need one band list per roof cell")
        tops: list[tuple[Fraction, ...]] = []
        vals: list[tuple[Fraction, ...]] = []
        mean = Fraction(0)
        widths = roof.walls.widths()
        for cell, bands in enumerate(bands_per_cell):
            if not bands:
                raise ValueError("each cell needs at least one band")
            cum = Fraction(0)
            cell_tops: list[Fraction] = []
            cell_vals: list[Fraction] = []
            for height, value in bands:
                h = as_fraction(height)
                v = as_fraction(value)
                if h <= 0:
                    raise ValueError("band heights must be positive")
                cum += h
                cell_tops.append(cum)
                cell_vals.append(v)
                mean += widths[cell] * h * v
            if cum != roof.height_of_cell(cell):
                raise ValueError(
                    f"bands of cell {cell} stack to {cum}, roof height is "
                    f"{roof.height_of_cell(cell)}"
                )
            tops.append(tuple(cell_tops))
            vals.append(tuple(cell_vals))
        if mean != 0:
            raise ValueError(f"phase function mean must be exactly zero, got {mean}")
        self.roof = roof
        self.band_tops = tuple(tops)
        self.band_values = tuple(vals)

    @classmethod
    def from_base_values(cls, roof: Roof, values: Sequence[Real]) -> "PhaseFunction":
        """Height-independent phase function: one full-height band per cell."""
        bands = [[(roof.height_of_cell(i), v)] for i, v in enumerate(values)]
        return cls(roof, bands)

    def value_at(self, state: SpecialFlowState) -> Fraction:
        cell = self.roof.cell_of(state.a)
        tops = self.band_tops[cell]
        band = bisect_right(tops, state.b)
        if band >= len(tops):
            raise ValueError("state lies on or above the roof")
        return self.band_values[cell][band]

    def __repr__(self) -> str:
        n = sum(len(t) for t in self.band_tops)
        return f"PhaseFunction({n} rectangles over {len(self.band_tops)} cells)"


class IntegralProfile:
    """The piecewise-linear orbit integral ``t -> integral_0^t f(T_s x) ds``.

    ``nodes`` are exact ``(time, value)`` pairs at every band/roof crossing,
    starting at ``(0, 0)`` and ending at the scan horizon.  Between nodes
    the slope is the active rectangle's value.
    """

    __slots__ = ("nodes",)

    def __init__(self, nodes: Sequence[tuple[Fraction, Fraction]]):
        self.nodes = list(nodes)

    @property
    def horizon(self) -> Fraction:
        return self.nodes[-1][0]

    def value_at(self, t: Real) -> Fraction:
        """Exact value at ``0 <= t <= horizon`` by linear interpolation."""
        t = as_fraction(t)
        if not 0 <= t <= self.horizon:
            raise ValueError("t outside the computed profile")
        times = [node[0] for node in self.nodes]
        j = bisect_right(times, t) - 1
        if j == len(self.nodes) - 1:
            return self.nodes[-1][1]
        t1, s1 = self.nodes[j]
        t2, s2 = self.nodes[j + 1]
        return s1 + (s2 - s1) * (t - t1) / (t2 - t1)

    def zeros(self) -> list[Fraction]:
        """Times ``0 < t <= horizon`` where the profile vanishes.

        A segment that starts at value 0 contributes its left endpoint (so a
        stretch where the integral sits at 0 is reported by its node grid,
        not flooded); a sign change inside a segment contributes the exact
        interior crossing.
        """
        out: list[Fraction] = []
        for j in range(len(self.nodes) - 1):
            t1, s1 = self.nodes[j]
            t2, s2 = self.nodes[j + 1]
            if s1 == 0:
                if t1 > 0:
                    out.append(t1)
            elif (s1 < 0 < s2) or (s2 < 0 < s1):
                out.append(t1 + (t2 - t1) * s1 / (s1 - s2))
        t_last, s_last = self.nodes[-1]
        if s_last == 0 and t_last > 0:
            out.append(t_last)
        return out

    def to_csv_rows(self, digits: int = 30) -> list[tuple[str, str]]:
        from .stats import decimal_string

        return [(decimal_string(t, digits), decimal_string(s, digits)) for t, s in self.nodes]

    def __repr__(self) -> str:
        return f"IntegralProfile({len(self.nodes)} nodes, horizon={self.horizon})"


def integral_profile(
    roof: Roof,
    f: PhaseFunction,
    state: SpecialFlowState,
    t_max: Real,
    max_crossings: int | None = None,
) -> IntegralProfile:
    """Exact orbit-integral profile of the special flow started at ``state``.

    Walks the orbit event by event (band tops, then the roof gluing); all
    node times and values are exact rationals.  Raises
    :class:`CrossingBudgetError` past the crossing budget.
    """
    if f.roof is not roof:
        raise ValueError("phase function was built over a different roof")
    horizon = as_fraction(t_max)
    if horizon <= 0:
        raise ValueError("t_max must be positive")
    budget = (
        default_crossing_budget(roof, horizon) if max_crossings is None else max_crossings
    )
    a, b = state.a, state.b
    t = Fraction(0)
    sigma = Fraction(0)
    nodes: list[tuple[Fraction, Fraction]] = [(t, sigma)]
    crossings = 0
    while True:
        cell = roof.cell_of(a)
        tops = f.band_tops[cell]
        vals = f.band_values[cell]
        band = bisect_right(tops, b)
        while band < len(tops):
            dt = tops[band] - b
            if t + dt >= horizon:
                sigma += vals[band] * (horizon - t)
                nodes.append((horizon, sigma))
                return IntegralProfile(nodes)
            t += dt
            sigma += vals[band] * dt
            nodes.append((t, sigma))
            b = tops[band]
            band += 1
        a = roof.base.apply(a)
        b = Fraction(0)
        crossings += 1
        if crossings > budget:
            raise CrossingBudgetError(
                f"crossing budget exceeded after {crossings} roof crossings"
            )


def orbit_integral(
    roof: Roof, f: PhaseFunction, state: SpecialFlowState, t: Real
) -> Fraction:
    """Exact ``integral_0^t f(T_s x) ds`` (the profile's endpoint value)."""
    t = as_fraction(t)
    if t == 0:
        return Fraction(0)
    return integral_profile(roof, f, state, t).nodes[-1][1]


# --------------------------------------------------------------------------- #
# trigonometric polynomials on the torus
# --------------------------------------------------------------------------- #


class TrigPolynomial:
    """``sum_j,k  c_jk cos(2 pi (j x + k y)) + s_jk sin(2 pi (j x + k y))``.

    The constant mode ``(j, k) = (0, 0)`` is forbidden, which makes the
    torus-average zero automatically.
    """

    __slots__ = ("terms",)

    def __init__(self, terms: Iterable[tuple[int, int, float, float]]):
        terms = tuple(
            (int(j), int(k), float(c), float(s)) for j, k, c, s in terms
        )
        if not terms:
            raise ValueError("at least one mode is required")
        if any(j == 0 and k == 0 for j, k, _, _ in terms):
            raise ValueError("the constant mode (0,0) is not allowed")
        self.terms = terms

    @classmethod
    def cos_x(cls) -> "TrigPolynomial":
        """cos(2 pi x), the standard winding test observable."""
        return cls([(1, 0, 1.0, 0.0)])

    def max_frequency(self) -> int:
        return max(max(abs(j), abs(k)) for j, k, _, _ in self.terms)

    def value(self, p: TorusPoint) -> float:
        x, y = float(p.x), float(p.y)
        total = 0.0
        for j, k, c, s in self.terms:
            phase = 2 * math.pi * (j * x + k * y)
            total += c * math.cos(phase) + s * math.sin(phase)
        return total

    def __repr__(self) -> str:
        return f"TrigPolynomial({len(self.terms)} modes)"


def winding_integral(
    winding: TorusWinding, f: TrigPolynomial, p: TorusPoint, t: float
) -> float:
    """Closed-form ``integral_0^t f(x + s, y + gamma s) ds``.

    Each mode integrates to a sine/cosine difference over ``2 pi (j + k gamma)``;
    a vanishing frequency would grow linearly instead and raises
    :class:`ResonantFrequencyError`.  Float evaluation, ~1e-12 accuracy for
    tame mode counts.
    """
    gamma = winding.slope
    x, y = float(p.x), float(p.y)
    total = 0.0
    for j, k, c, s in f.terms:
        omega = j + k * gamma
        if abs(omega) < 1e-9:
            raise ResonantFrequencyError(
                f"resonant frequency: mode ({j}, {k}) has |j + k*gamma| < 1e-9"
            )
        phi0 = 2 * math.pi * (j * x + k * y)
        phi1 = phi0 + 2 * math.pi * omega * t
        scale = 2 * math.pi * omega
        total += c * (math.sin(phi1) - math.sin(phi0)) / scale
        total += s * (math.cos(phi0) - math.cos(phi1)) / scale
    return total


def winding_zero_times(
    winding: TorusWinding,
    f: TrigPolynomial,
    p: TorusPoint,
    t_max: float,
    grid_step: float | None = None,
    tol: float = 1e-12,
) -> list[float]:
    """Zeros of the winding orbit integral in ``(0, t_max]``.

    Sign-change bracketing on a uniform grid (default step
    ``1 / (8 * max_frequency * (1 + |gamma|))``) followed by bisection to
    ``tol`` in t.  Tangential zeros that do not change sign across a grid
    cell can be missed; that limitation is inherent to bracketing and is
    acceptable for the transversal-crossing integrals this package studies.
    """
    if t_max <= 0:
        raise ValueError("t_max must be positive")
    if grid_step is None:
        grid_step = 1.0 / (8 * f.max_frequency() * (1 + abs(winding.slope)))

    def sigma(t: float) -> float:
        return winding_integral(winding, f, p, t)

    # scan one grid step past the horizon so a zero sitting exactly at t_max
    # still gets a sign-change bracket (float residue there can have either
    # sign); accepted zeros are clamped back to the horizon.
    zeros: list[float] = []
    steps = int(math.ceil(t_max / grid_step)) + 1
    slack = 8 * tol
    prev_t, prev_v = 0.0, 0.0  # sigma(0) = 0 by definition; not a reported zero
    for i in range(1, steps + 1):
        t = i * grid_step
        v = sigma(t)
        if v == 0.0:
            if t <= t_max + slack:
                zeros.append(min(t, t_max))
        elif prev_v == 0.0:
            pass  # zero already handled at the previous grid point (or t=0)
        elif (prev_v < 0 < v) or (v < 0 < prev_v):
            lo, hi = prev_t, t
            flo = prev_v
            while hi - lo > tol:
                mid = 0.5 * (lo + hi)
                fmid = sigma(mid)
                if fmid == 0.0:
                    lo = hi = mid
                    break
                if (flo < 0) == (fmid < 0):
                    lo, flo = mid, fmid
                else:
                    hi = mid
            root = 0.5 * (lo + hi)
            if root <= t_max + slack:
                zeros.append(min(root, t_max))
        prev_t, prev_v = t, v
    return [z for z in zeros if z > 0]
