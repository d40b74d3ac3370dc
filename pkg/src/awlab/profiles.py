"""Linearised level-set profiles of a Green field.

For a field ``G`` and region ``A``, the profile

    u(s) = sum_{x in A_s, y} mu(x, y) (G(x) - max(s, G(y))) / (G(x) - G(y))

interpolates the level-set mass ``m(A_s)`` edgewise, making ``u`` piecewise
linear in ``s`` with an explicit left derivative.  Each ordered pair
contributes one of two shapes: a downhill pair (``G(y) < G(x)``) gives a
continuous ramp, constant at ``mu(x, y)`` until ``G(y)`` then linear to zero
at ``G(x)``; a pair with ``G(y) >= G(x)`` (uphill neighbour, or an exact tie,
taken as the limit of the defining ratio) gives its full weight while
``s <= G(x)`` and drops when ``x`` leaves the level set.  The drops make
``u`` left-continuous with downward jumps; they are carried separately from
the continuous part so evaluation and exact integration stay trivial, and
they keep ``u(0) = m(A)`` exact.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import RegionNotContained
from .graph import WeightedGraph, as_region
from .green import GreenField

__all__ = [
    "LevelProfile",
    "profile_u",
    "profile_u_occupation",
    "left_derivative",
    "integral_u",
    "factor_two_check",
    "check_edu",
    "FactorTwoReport",
    "EduReport",
    "write_profile_csv",
]

_PAIR_CHUNK_BUDGET = 8_000_000   # elements per breakpoint-block evaluation


@dataclass(eq=False)
class LevelProfile:
    """Piecewise-linear profile with breakpoints, values and left derivatives."""

    kind: str                     # "killed" or "occupation"
    region_ids: tuple             # vertices whose pairs feed the profile
    breakpoints: np.ndarray       # ascending, starts at 0
    u_values: np.ndarray          # u at breakpoints (left-continuous)
    left_derivs: np.ndarray       # left derivative at each breakpoint; 0 at s=0
    mass: float                   # u(0) = m(A)
    # internals
    _gx: np.ndarray
    _gy: np.ndarray
    _w: np.ndarray
    _step_g: np.ndarray           # sorted drop locations of uphill/tied pairs
    _step_w: np.ndarray
    _step_w_suffix: np.ndarray
    _u_cont: np.ndarray           # continuous (downhill-ramp) part at breakpoints

    def u(self, s):
        """Evaluate the profile at arbitrary ``s >= 0`` (vectorised)."""
        s = np.asarray(s, dtype=float)
        cont = np.interp(s, self.breakpoints, self._u_cont)
        k = np.searchsorted(self._step_g, s, side="left")
        out = cont + self._step_w_suffix[k]
        top = self.breakpoints[-1]
        out = np.where(s > top, 0.0, out)
        return out if out.ndim else float(out)

    def derivative_at(self, s: float) -> float:
        """Left derivative at ``s`` (0 beyond the last breakpoint)."""
        if s <= 0.0:
            raise ValueError("left derivative is defined for s > 0")
        bp = self.breakpoints
        if s > bp[-1]:
            return 0.0
        j = int(np.searchsorted(bp, s, side="left"))
        return float(self.left_derivs[j])


def _pair_arrays(g: WeightedGraph, values: np.ndarray, member_pos: np.ndarray):
    """Ordered pairs (x in A, y neighbour) as flat gx/gy/w arrays."""
    xs, ys, w = g.incident_arrays(member_pos)
    return values[xs], values[ys], w


def _build(kind: str, region_ids, gx, gy, w) -> LevelProfile:
    stepped = gy >= gx           # uphill neighbours and exact ties
    cgx, cgy, cw = gx[~stepped], gy[~stepped], w[~stepped]
    order = np.argsort(gx[stepped], kind="stable")
    step_g = gx[stepped][order]
    step_w = w[stepped][order]
    # suffix[k] = total stepped weight dropping at or above the k-th entry
    suffix = np.zeros(len(step_g) + 1)
    suffix[:-1] = np.cumsum(step_w[::-1])[::-1]

    bp = np.unique(np.concatenate([[0.0], gx, gy]))
    bp = bp[bp >= 0.0]
    if len(gx):
        bp = bp[bp <= gx.max()]
    if not len(bp):
        bp = np.array([0.0])

    n_bp = len(bp)
    u_cont = np.zeros(n_bp)
    deriv = np.zeros(n_bp)
    if len(cgx):
        block = max(1, int(_PAIR_CHUNK_BUDGET // max(1, len(cgx))))
        den = cgx - cgy                      # > 0: downhill pairs only
        for lo in range(0, n_bp, block):
            B = bp[lo:lo + block, None]
            active = cgx[None, :] >= B
            num = cgx[None, :] - np.maximum(B, cgy[None, :])
            frac = np.clip(num / den[None, :], 0.0, 1.0)
            u_cont[lo:lo + block] = (cw[None, :] * frac * active).sum(axis=1)
            dmask = active & (cgy[None, :] < B)
            deriv[lo:lo + block] = -((cw / den)[None, :] * dmask).sum(axis=1)
    deriv[0] = 0.0

    k = np.searchsorted(step_g, bp, side="left")
    u_values = u_cont + suffix[k]

    return LevelProfile(
        kind=kind,
        region_ids=tuple(region_ids),
        breakpoints=bp,
        u_values=u_values,
        left_derivs=deriv,
        mass=float(u_values[0]),
        _gx=gx, _gy=gy, _w=w,
        _step_g=step_g, _step_w=step_w, _step_w_suffix=suffix,
        _u_cont=u_cont,
    )


def profile_u(g: WeightedGraph, gf: GreenField) -> LevelProfile:
    """Profile of a killed field over its own region."""
    ids = sorted(gf.region.members)
    pos = g.positions_of(ids)
    gx, gy, w = _pair_arrays(g, gf.values, pos)
    return _build("killed", ids, gx, gy, w)


def profile_u_occupation(g: WeightedGraph, ambient_gf: GreenField, A) -> LevelProfile:
    """Occupation-flavoured profile: pairs restricted to ``A`` inside a larger field.

    ``A`` must be contained in the ambient field's region.  The truncation
    ``u(s) <= m(A)`` holds by construction (each vertex contributes at most
    its measure).  The differential inequality is never asserted on this
    variant; it only feeds the occupation-time integral comparison.
    """
    A = as_region(g, A)
    if not A.members <= ambient_gf.region.members:
        raise RegionNotContained("A must sit inside the ambient field's region")
    ids = sorted(A.members)
    pos = g.positions_of(ids)
    gx, gy, w = _pair_arrays(g, ambient_gf.values, pos)
    return _build("occupation", ids, gx, gy, w)


def left_derivative(lp: LevelProfile, s: float) -> float:
    """Left derivative ``-sum_{boundary pairs of A_s} mu / (G(x) - G(y))``."""
    return lp.derivative_at(s)


def integral_u(lp: LevelProfile):
    """Exact integral of the profile and its edgewise closed form.

    Returns ``(integral, closed_form)`` where the integral is the breakpoint
    trapezoid of the continuous part plus the exact step contributions, and
    the closed form is ``sum mu(x, y) min(G(x), (G(x) + G(y)) / 2)``.  The two
    agree to roundoff.
    """
    integral = float(np.trapezoid(lp._u_cont, lp.breakpoints))
    integral += float((lp._step_g * lp._step_w).sum())
    closed = float((lp._w * np.minimum(lp._gx, 0.5 * (lp._gx + lp._gy))).sum())
    return integral, closed


@dataclass(frozen=True)
class FactorTwoReport:
    exact: float
    twice_integral: float
    slack: float
    ok: bool


def factor_two_check(g: WeightedGraph, gf: GreenField, lp: LevelProfile) -> FactorTwoReport:
    """Check ``sum_x m(x) G(x) <= 2 * integral(u)`` for the profile's vertices.

    ``gf`` must be the field the profile was built from.  Equality occurs when
    every neighbour of the region lies outside it.
    """
    sel = g.positions_of(list(lp.region_ids))
    exact = float((g.m[sel] * gf.values[sel]).sum())
    twice = 2.0 * integral_u(lp)[0]
    return FactorTwoReport(exact, twice, twice - exact, exact <= twice * (1 + 1e-12) + 1e-12)


@dataclass(frozen=True)
class EduReport:
    violations: tuple        # (s, left_derivative, -(C F(u))^2, margin)
    checked: int
    constant: float


def check_edu(lp: LevelProfile, F, C: float, tol: float = 1e-9) -> EduReport:
    """Evaluate ``u'(s) <= -(C F(u(s)))^2`` at every positive breakpoint.

    ``F`` is any callable profile function (typically floored at ``m(root)``).
    Left limits are used for ``u'``; breakpoints with ``u = 0`` are skipped.
    An empty violation list is expected whenever ``C`` is a valid anchored
    constant for the instance's level sets.
    """
    if lp.kind != "killed":
        raise ValueError("the differential inequality applies to killed-field "
                         "profiles only")
    violations = []
    checked = 0
    for j in range(1, len(lp.breakpoints)):
        s = float(lp.breakpoints[j])
        uval = float(lp.u_values[j])
        if uval <= 0.0:
            continue
        checked += 1
        lhs = float(lp.left_derivs[j])
        rhs = -((C * float(F(uval))) ** 2)
        margin = lhs - rhs
        if margin > tol * max(1.0, abs(rhs)):
            violations.append((s, lhs, rhs, margin))
    return EduReport(tuple(violations), checked, C)


def write_profile_csv(lp: LevelProfile, path) -> None:
    """CSV dump ``s,u,left_derivative`` at the breakpoints."""
    lines = ["s,u,left_derivative"]
    for j, s in enumerate(lp.breakpoints):
        d = "nan" if j == 0 else repr(float(lp.left_derivs[j]))
        lines.append(f"{s!r},{float(lp.u_values[j])!r},{d}")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")
