"""Comparison curves ``v' = -(C F(v))^2`` and the bound integrals they yield.

Known profile-function families get the exact closed forms:

* ``F(x) = x^(1-1/d)``, ``d > 2``: pure power decay, finite occupation bound;
* ``F(x) = sqrt(x)`` (``d = 2``): exponential decay;
* ``F(x) = x`` with the measure floor ``F(x) = F(m(root))`` for small ``x``:
  reciprocal-linear decay until the floor, then a linear tail to zero.

Anything else integrates numerically (fourth order, adaptive) with the floor
applied, which removes the small-mass singularity of the linear family.
Power-family curves and integrals follow the unfloored closed forms: those
are the forms behind the explicit constants, and flooring would only tighten
them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .errors import TransientUnsupported, UnsupportedCombination

__all__ = [
    "ProfileFunction",
    "BoundCurve",
    "eval_F",
    "solve_bound_curve",
    "numeric_bound_curve",
    "bound_exit",
    "bound_occupation",
    "closed_form_bound",
    "transience_diagnostic",
    "write_curve_csv",
]


@dataclass(frozen=True)
class ProfileFunction:
    """Positive nondecreasing profile function with an optional measure floor.

    ``floor`` is the root measure ``m(root)``; when set, evaluation uses
    ``F(max(x, floor))``.  Leave it ``None`` for raw (unfloored) ratios, e.g.
    in isoperimetric searches.
    """

    kind: str                                # "power" | "linear" | "custom"
    d: float | None = None
    table: tuple | None = None               # ((x, F(x)), ...) increasing
    floor: float | None = None

    @staticmethod
    def power(d: float, floor: float | None = None) -> "ProfileFunction":
        if d < 2.0:
            raise ValueError("power profile needs d >= 2")
        return ProfileFunction("power", d=float(d), floor=floor)

    @staticmethod
    def linear(floor: float | None = None) -> "ProfileFunction":
        return ProfileFunction("linear", floor=floor)

    @staticmethod
    def custom(table, floor: float | None = None) -> "ProfileFunction":
        pts = tuple((float(x), float(fx)) for x, fx in table)
        if len(pts) < 2:
            raise ValueError("custom profile needs at least two table points")
        xs = [x for x, _ in pts]
        fs = [fx for _, fx in pts]
        if any(b <= a for a, b in zip(xs, xs[1:])):
            raise ValueError("custom table abscissae must increase")
        if any(b < a for a, b in zip(fs, fs[1:])) or fs[0] <= 0.0:
            raise ValueError("custom table must be positive and nondecreasing")
        return ProfileFunction("custom", table=pts, floor=floor)

    def raw(self, x):
        x = np.asarray(x, dtype=float)
        if self.kind == "power":
            out = np.power(x, 1.0 - 1.0 / self.d)
        elif self.kind == "linear":
            out = x
        else:
            xs = np.array([p[0] for p in self.table])
            fs = np.array([p[1] for p in self.table])
            out = np.interp(x, xs, fs)
        return out if out.ndim else float(out)

    def __call__(self, x):
        if self.floor is not None:
            x = np.maximum(x, self.floor)
        return self.raw(x)

    def with_floor(self, floor: float) -> "ProfileFunction":
        return ProfileFunction(self.kind, d=self.d, table=self.table,
                               floor=float(floor))


def eval_F(F: ProfileFunction, x: float) -> float:
    """Evaluate ``F`` with its floor convention applied."""
    return float(F(x))


@dataclass(frozen=True, eq=False)
class BoundCurve:
    """Solution of ``v' = -(C F(v))^2`` with truncation helpers.

    ``family`` is one of ``power`` (killed, d > 2), ``exponential`` (d = 2),
    ``linear`` (floored piecewise form), ``power-transient`` (v(0) = +inf) or
    ``numeric``.  ``mass`` is ``v(0)`` (None when transient).
    """

    family: str
    C: float
    mass: float | None
    d: float | None = None
    floor: float | None = None
    grid_s: np.ndarray | None = None
    grid_v: np.ndarray | None = None
    area_plus: float | None = None

    @property
    def transient(self) -> bool:
        return self.family == "power-transient"

    def value(self, s):
        s = np.asarray(s, dtype=float)
        C2 = self.C ** 2
        if self.family == "power":
            d = self.d
            base = self.mass ** ((2.0 - d) / d) + C2 * (d - 2.0) / d * s
            out = base ** (d / (2.0 - d))
        elif self.family == "exponential":
            out = self.mass * np.exp(-C2 * s)
        elif self.family == "linear":
            fl = self.floor
            if self.mass > fl:
                s1 = (1.0 / fl - 1.0 / self.mass) / C2
                pre = 1.0 / (1.0 / self.mass + C2 * np.minimum(s, s1))
                out = np.where(s <= s1, pre, fl - C2 * fl * fl * (s - s1))
            else:
                out = self.mass - C2 * fl * fl * s
        elif self.family == "power-transient":
            d = self.d
            with np.errstate(divide="ignore"):
                out = np.where(s > 0.0,
                               (C2 * (d - 2.0) / d * np.where(s > 0, s, 1.0))
                               ** (-d / (d - 2.0)),
                               np.inf)
        else:
            out = np.interp(s, self.grid_s, self.grid_v)
        return out if np.ndim(out) else float(out)

    def plus(self, s):
        """Nonpositive values truncated to zero."""
        return np.maximum(self.value(s), 0.0)

    def plus_clamped(self, s, mass: float | None = None):
        """Truncated below at zero and above at the region mass."""
        cap = self.mass if mass is None else float(mass)
        if cap is None:
            raise ValueError("a clamp mass is required for transient curves")
        return np.minimum(self.plus(s), cap)

    def inverse(self, value: float) -> float:
        """Smallest ``s`` with ``v(s) <= value`` (closed families only)."""
        C2 = self.C ** 2
        if self.family == "power":
            if value >= self.mass:
                return 0.0
            d = self.d
            return (value ** ((2.0 - d) / d) - self.mass ** ((2.0 - d) / d)) \
                * d / (C2 * (d - 2.0))
        if self.family == "exponential":
            return max(0.0, math.log(self.mass / value) / C2)
        if self.family == "linear":
            fl = self.floor
            if value >= self.mass:
                return 0.0
            if self.mass > fl and value >= fl:
                return (1.0 / value - 1.0 / self.mass) / C2
            start = self.mass if self.mass <= fl else fl
            s1 = 0.0 if self.mass <= fl else (1.0 / fl - 1.0 / self.mass) / C2
            return s1 + (start - value) / (C2 * fl * fl)
        if self.family == "power-transient":
            d = self.d
            return value ** (-(d - 2.0) / d) * d / (C2 * (d - 2.0))
        raise ValueError("inverse is unavailable for numeric curves")


def solve_bound_curve(F: ProfileFunction, C: float, mA) -> BoundCurve:
    """Comparison curve for a profile function, constant and starting mass.

    ``mA`` may be ``None`` (or ``inf``) for the transient start ``v(0) = +inf``,
    supported only by the power family with ``d > 2``.
    """
    if C <= 0.0:
        raise ValueError("C must be positive")
    transient = mA is None or (isinstance(mA, float) and math.isinf(mA))
    if transient:
        if F.kind != "power" or F.d <= 2.0:
            raise TransientUnsupported(
                "the infinite-start curve needs the power family with d > 2")
        return BoundCurve("power-transient", C, None, d=F.d, floor=F.floor)
    mA = float(mA)
    if mA <= 0.0:
        raise ValueError("mA must be positive")
    if F.kind == "power":
        if F.d == 2.0:
            return BoundCurve("exponential", C, mA, d=2.0, floor=F.floor)
        return BoundCurve("power", C, mA, d=F.d, floor=F.floor)
    if F.kind == "linear":
        if F.floor is None:
            raise ValueError("the linear family needs the measure floor set")
        return BoundCurve("linear", C, mA, floor=F.floor)
    if F.floor is None:
        raise ValueError("custom profiles need the measure floor set")
    return numeric_bound_curve(F, C, mA, floored=True)


def numeric_bound_curve(F: ProfileFunction, C: float, mA: float, *,
                        floored: bool = True,
                        rtol: float = 1e-9,
                        interp_tol: float = 1e-7,
                        s_max: float | None = None) -> BoundCurve:
    """Adaptive fourth-order integration of ``v' = -(C F(v))^2``.

    Step control keeps the local error below ``rtol * v`` and the node grid
    dense enough for piecewise-linear evaluation at ``interp_tol`` relative
    accuracy.  Integration stops at the zero crossing of ``v`` (or ``s_max``)
    and records the accumulated area of the positive part.
    """
    feval = (lambda v: F(v)) if floored else (lambda v: F.raw(max(v, 0.0)))

    def f(v):
        return -((C * feval(v)) ** 2)

    def rk4(v, a, h):
        k1 = f(v)
        k2 = f(v + 0.5 * h * k1)
        k3 = f(v + 0.5 * h * k2)
        k4 = f(v + h * k3)
        dv = (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        da = (h / 6.0) * (v + 2 * (v + 0.5 * h * k1) + 2 * (v + 0.5 * h * k2)
                          + (v + h * k3))
        return v + dv, a + da

    s, v, area = 0.0, float(mA), 0.0
    nodes_s, nodes_v = [0.0], [float(mA)]
    v_tiny = 1e-12 * mA
    h = 0.01 * mA / max(abs(f(mA)), 1e-300)
    while v > v_tiny and (s_max is None or s < s_max):
        if s_max is not None:
            h = min(h, s_max - s)
        v1, a1 = rk4(v, area, h)
        vh, ah = rk4(v, area, 0.5 * h)
        v2, a2 = rk4(vh, ah, 0.5 * h)
        err = abs(v2 - v1) / 15.0
        scale = max(v, v_tiny)
        kink = h * abs(f(max(v2, v_tiny)) - f(v)) / 8.0
        ok = err <= rtol * scale and kink <= interp_tol * scale
        if ok and v2 < 0.0:
            # shrink onto the zero crossing instead of stepping past it
            if v > v_tiny * 2:
                h *= 0.5 if v2 < -v_tiny else 1.0
                if v2 < -v_tiny:
                    continue
            v2 = 0.0
        if not ok:
            h *= 0.5
            continue
        s += h
        v, area = v2, a2
        nodes_s.append(s)
        nodes_v.append(v)
        if err > 0.0:
            h *= min(2.0, max(0.3, 0.9 * (rtol * scale / err) ** 0.2))
        else:
            h *= 2.0
        if v <= 0.0:
            break
    return BoundCurve("numeric", C, float(mA), d=F.d, floor=F.floor,
                      grid_s=np.array(nodes_s), grid_v=np.array(nodes_v),
                      area_plus=area)


def bound_exit(curve: BoundCurve) -> float:
    """Exit-time bound ``2 * integral of the truncated curve``."""
    if curve.transient:
        raise ValueError("exit bounds need a finite-mass curve")
    C2 = curve.C ** 2
    if curve.family == "power":
        return curve.d / C2 * curve.mass ** (2.0 / curve.d)
    if curve.family == "exponential":
        return 2.0 * curve.mass / C2
    if curve.family == "linear":
        fl = curve.floor
        if curve.mass <= fl:
            return curve.mass ** 2 / (C2 * fl * fl)
        return (1.0 + 2.0 * math.log(curve.mass / fl)) / C2
    return 2.0 * curve.area_plus


def bound_occupation(curve: BoundCurve, mA: float) -> float:
    """Occupation-time bound ``2 * integral of min(max(v, 0), mA)``.

    Requires the transient (infinite-start) curve; the clamp makes the
    integral the tail integral past ``v^{-1}(mA)`` plus the leading rectangle.
    """
    if not curve.transient:
        raise TransientUnsupported("occupation bounds need the transient curve")
    if mA <= 0.0:
        return 0.0
    d = curve.d
    return d * d / (curve.C ** 2 * (d - 2.0)) * mA ** (2.0 / d)


def closed_form_bound(kind: str, family: str, d: float | None, C: float,
                      mA: float, mo: float) -> float:
    """Explicit bound constants for the standard profile families.

    ``kind`` is ``"exit"`` or ``"occupation"``; ``family`` is ``"power"`` or
    ``"linear"``.  Unsupported combinations (occupation with the d = 2 power
    family) raise :class:`UnsupportedCombination`.
    """
    C2 = C ** 2
    if family == "power":
        if d is None or d < 2.0:
            raise UnsupportedCombination("power family needs d >= 2")
        if kind == "exit":
            return d / C2 * mA ** (2.0 / d)
        if kind == "occupation":
            if d <= 2.0:
                raise UnsupportedCombination(
                    "occupation bound needs d > 2 in the power family")
            return d * d / (C2 * (d - 2.0)) * mA ** (2.0 / d)
    elif family == "linear":
        if kind == "exit":
            return (1.0 + 2.0 * math.log(mA / mo)) / C2
        if kind == "occupation":
            return (3.0 + 2.0 * math.log(mA / mo)) / C2
    raise UnsupportedCombination(f"no closed form for {kind}/{family}")


def _inv_square_integral(F: ProfileFunction, a: float, b: float) -> float:
    """Integral of 1 / F(s)^2 over [a, b] for the unfloored profile."""
    if b <= a:
        return 0.0
    if F.kind == "power":
        e = 2.0 / F.d - 2.0
        if e == -1.0:
            return math.log(b / a) if math.isfinite(b) else math.inf
        if math.isinf(b):
            if e + 1.0 >= 0.0:
                return math.inf
            return -(a ** (e + 1.0)) / (e + 1.0)
        return (b ** (e + 1.0) - a ** (e + 1.0)) / (e + 1.0)
    if F.kind == "linear":
        return 1.0 / a - (0.0 if math.isinf(b) else 1.0 / b)
    # custom: quadrature over the table, power-law tail beyond it
    xs = [p[0] for p in F.table]
    fs = [p[1] for p in F.table]
    x_end, f_end = xs[-1], fs[-1]
    q = (math.log(fs[-1] / fs[-2]) / math.log(xs[-1] / xs[-2])
         if fs[-1] > fs[-2] else 0.0)
    total = 0.0
    if a < x_end:
        hi = min(b, x_end)
        knots = [x for x in xs if a < x < hi]
        total += integrate.quad(lambda s: 1.0 / F.raw(s) ** 2, a, hi,
                                points=knots or None, limit=max(200, 4 * len(xs)))[0]
    if b > x_end:
        lo = max(a, x_end)
        if math.isinf(b):
            if 2.0 * q <= 1.0:
                return math.inf
            total += (lo / (f_end ** 2 * (2.0 * q - 1.0))
                      * (lo / x_end) ** (-2.0 * q))
        else:
            total += integrate.quad(
                lambda s: (f_end * (s / x_end) ** q) ** -2.0, lo, b,
                limit=200)[0]
    return total


def transience_diagnostic(F: ProfileFunction, C: float, inf_m: float,
                          mA_max: float | None = None):
    """Summability test of ``1/F^2`` and the uniform horizon it certifies.

    Returns ``(finite, t0)``.  ``finite`` says whether the tail integral of
    ``1/F(s)^2`` converges; when it does, any killed field of a region with
    mass at most ``mA_max`` has profile below ``inf_m`` beyond ``t0``, which
    caps the Green function uniformly and signals transience.  ``t0`` carries
    the factor-two slack of the integrated differential inequality, so it is
    a certified bound, not a tight one.
    """
    if inf_m <= 0.0:
        raise ValueError("inf_m must be positive")
    tail = _inv_square_integral(F, 1.0, math.inf)
    if not math.isfinite(tail):
        return False, None
    upper = tail if mA_max is None else _inv_square_integral(F, 1.0, float(mA_max))
    lower = _inv_square_integral(F, inf_m, 1.0) if inf_m < 1.0 else 0.0
    t0 = 2.0 / C ** 2 * max(upper, lower)
    return True, t0


def write_curve_csv(curve: BoundCurve, path, s=None, clamp: float | None = None) -> None:
    """CSV dump ``s,v,v_plus,v_plusA`` on a grid (default 129 points)."""
    if s is None:
        if curve.transient:
            cap = clamp if clamp is not None else 1.0
            lo = curve.inverse(1e3 * cap)
            hi = curve.inverse(1e-3 * cap)
            s = np.linspace(lo, hi, 129)
        elif curve.family == "numeric":
            s = np.linspace(0.0, float(curve.grid_s[-1]), 129)
        else:
            hi = curve.inverse(1e-6 * curve.mass) if curve.family != "linear" \
                else curve.inverse(0.0)
            s = np.linspace(0.0, hi, 129)
    s = np.asarray(s, dtype=float)
    v = np.asarray(curve.value(s), dtype=float)
    vp = np.maximum(v, 0.0)
    cap = clamp if clamp is not None else (curve.mass or np.inf)
    vpa = np.minimum(vp, cap)
    lines = ["s,v,v_plus,v_plusA"]
    for row in zip(s, v, vp, vpa):
        lines.append(",".join(repr(float(x)) for x in row))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")
