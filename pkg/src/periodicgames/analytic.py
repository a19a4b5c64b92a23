"""Closed-form solutions of the scalar 2x2 learning dynamics.

For eigenvalue-invariant games (constant alpha, single cosine oscillation of
the equilibrium) the dynamics admit exact solutions in two regimes:

* resonant (alpha = omega): a secular term grows linearly in t and the
  trajectory diverges from the mean equilibrium at speed
  sqrt(dx*^2 + dy*^2) * omega / 2.
* nonresonant (alpha != omega): the solution is a sum of two bounded
  periodic motions with frequencies alpha and omega.

For general smooth 2x2 periodic games the solution is a pair of convolution
integrals against sin/cos of the phase F(t) = int_0^t f; ``general_solution``
evaluates them by composite Simpson quadrature with a refinement check.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NonSmoothWaveform, QuadratureRefinement, WrongRegime
from .games import TWO_PI
from .spectrum import Equilibrium2x2, ScalarGame2x2

#: relative detuning below which the nonresonant formulas lose accuracy
NEAR_RESONANCE_TOL = 1e-8

#: default Simpson resolution for the convolution integrals
DEFAULT_NODES_PER_PERIOD = 2048


def _regime_gap(alpha: float, omega: float) -> float:
    return abs(alpha - omega)


@dataclass(frozen=True)
class ClosedFormParams:
    """Equilibrium data plus the homogeneous-mode coefficients c1, c2."""

    eq: Equilibrium2x2
    alpha: float
    omega: float
    c1: float
    c2: float


def resonant_params(eq: Equilibrium2x2, omega: float,
                    initial: tuple[float, float]) -> ClosedFormParams:
    """Coefficients for the resonant solution: c1 = x(0) - x* - dx*/2."""
    if _regime_gap(eq.alpha, omega) > 1e-12 * max(abs(eq.alpha), 1.0):
        raise WrongRegime(
            f"resonant form needs alpha = omega, got {eq.alpha} vs {omega}")
    x0, y0 = initial
    c1 = x0 - eq.x_bar_star - 0.5 * eq.dx_star
    c2 = y0 - eq.y_bar_star - 0.5 * eq.dy_star
    return ClosedFormParams(eq, eq.alpha, omega, c1, c2)


def nonresonant_params(eq: Equilibrium2x2, omega: float,
                       initial: tuple[float, float]) -> ClosedFormParams:
    """Coefficients for the nonresonant solution.

    c1 = x(0) - x* - (alpha^2/(alpha^2 - omega^2)) dx*, symmetric for c2.
    """
    alpha = eq.alpha
    if _regime_gap(alpha, omega) < NEAR_RESONANCE_TOL * abs(omega):
        raise WrongRegime(
            f"nonresonant form degenerates near alpha = omega "
            f"(alpha={alpha}, omega={omega})")
    gain = alpha ** 2 / (alpha ** 2 - omega ** 2)
    x0, y0 = initial
    c1 = x0 - eq.x_bar_star - gain * eq.dx_star
    c2 = y0 - eq.y_bar_star - gain * eq.dy_star
    return ClosedFormParams(eq, alpha, omega, c1, c2)


def _shape_like(t, x, y):
    if np.ndim(t) == 0:
        return float(x[()] if x.ndim == 0 else x), \
            float(y[()] if y.ndim == 0 else y)
    return x, y


def resonant_solution(p: ClosedFormParams, t):
    """Exact trajectory in the resonant regime alpha = omega.

    x(t) = x* + (dx*/2)(wt sin wt + cos wt) - (dy*/2) wt cos wt
         + c1 cos at + c2 sin at, and the 90-degree-rotated form for y.
    """
    if _regime_gap(p.alpha, p.omega) > 1e-12 * max(abs(p.alpha), 1.0):
        raise WrongRegime("resonant_solution requires alpha = omega")
    tt = np.asarray(t, dtype=float)
    eq = p.eq
    wt = p.omega * tt
    swt, cwt = np.sin(wt), np.cos(wt)
    at = p.alpha * tt
    sat, cat = np.sin(at), np.cos(at)
    sec = wt * swt + cwt
    x = eq.x_bar_star + 0.5 * eq.dx_star * sec - 0.5 * eq.dy_star * wt * cwt \
        + p.c1 * cat + p.c2 * sat
    y = eq.y_bar_star + 0.5 * eq.dy_star * sec + 0.5 * eq.dx_star * wt * cwt \
        + p.c2 * cat - p.c1 * sat
    return _shape_like(t, x, y)


def nonresonant_solution(p: ClosedFormParams, t):
    """Exact trajectory away from resonance: two superposed periodic modes."""
    if _regime_gap(p.alpha, p.omega) < NEAR_RESONANCE_TOL * abs(p.omega):
        raise WrongRegime("nonresonant_solution rejects near-resonant input")
    tt = np.asarray(t, dtype=float)
    eq = p.eq
    a2 = p.alpha ** 2
    den = a2 - p.omega ** 2
    gain_c = a2 / den
    gain_s = p.alpha * p.omega / den
    wt = p.omega * tt
    swt, cwt = np.sin(wt), np.cos(wt)
    at = p.alpha * tt
    sat, cat = np.sin(at), np.cos(at)
    x = eq.x_bar_star + gain_c * eq.dx_star * cwt + gain_s * eq.dy_star * swt \
        + p.c1 * cat + p.c2 * sat
    y = eq.y_bar_star + gain_c * eq.dy_star * cwt - gain_s * eq.dx_star * swt \
        + p.c2 * cat - p.c1 * sat
    return _shape_like(t, x, y)


def divergence_speed(eq: Equilibrium2x2, omega: float) -> float:
    """Asymptotic growth rate of the distance from the mean equilibrium."""
    return float(np.hypot(eq.dx_star, eq.dy_star) * omega / 2.0)


@dataclass(frozen=True)
class GeneralSolutionContext:
    """Scalar game plus initial data for the quadrature-based solution.

    Since F(0) = 0, the homogeneous coefficients are just c1 = x(0) and
    c2 = y(0).
    """

    scalars: ScalarGame2x2
    c1: float
    c2: float
    nodes_per_period: int = DEFAULT_NODES_PER_PERIOD


def general_params(scalars: ScalarGame2x2, initial: tuple[float, float],
                   nodes_per_period: int = DEFAULT_NODES_PER_PERIOD
                   ) -> GeneralSolutionContext:
    x0, y0 = initial
    return GeneralSolutionContext(scalars, float(x0), float(y0),
                                  nodes_per_period)


def simpson_weights(n_intervals: int) -> np.ndarray:
    """Composite Simpson weights (sum to n_intervals; multiply by spacing)."""
    if n_intervals < 2 or n_intervals % 2:
        raise ValueError("Simpson needs an even interval count >= 2")
    w = np.ones(n_intervals + 1)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    return w / 3.0


def _eval_general(ctx: GeneralSolutionContext, ts: np.ndarray,
                  nodes_per_period: int) -> tuple[np.ndarray, np.ndarray]:
    sc = ctx.scalars
    period = TWO_PI / sc.omega
    xs = np.empty(ts.shape)
    ys = np.empty(ts.shape)
    for i, t in enumerate(ts):
        big_f = float(sc.f.integral(t))
        cf, sf = np.cos(big_f), np.sin(big_f)
        if t == 0.0:
            xs[i] = ctx.c1
            ys[i] = ctx.c2
            continue
        n = int(np.ceil(nodes_per_period * abs(t) / period))
        n = max(n, 8)
        n += n % 2
        tau = np.linspace(0.0, t, n + 1)
        wts = simpson_weights(n) * (t / n)
        ftau = sc.f.integral(tau)
        ctau, stau = np.cos(ftau), np.sin(ftau)
        gv = sc.g.value(tau)
        hv = sc.h.value(tau)
        ch = wts @ (hv * ctau)
        sh = wts @ (hv * stau)
        cg = wts @ (gv * ctau)
        sg = wts @ (gv * stau)
        # int h sin(F(t)-F(tau)) = sf*ch - cf*sh; int g cos(...) = cf*cg + sf*sg
        xs[i] = sf * ch - cf * sh - (cf * cg + sf * sg) \
            + ctx.c1 * cf + ctx.c2 * sf
        ys[i] = sf * cg - cf * sg + (cf * ch + sf * sh) \
            + ctx.c2 * cf - ctx.c1 * sf
    return xs, ys


def general_solution(ctx: GeneralSolutionContext, t,
                     check_refinement: bool = False,
                     refine_tol: float = 1e-8):
    """Quadrature evaluation of the general smooth-game solution.

    With ``check_refinement`` the integrals are recomputed at doubled
    resolution; a change of ``refine_tol`` or more raises
    QuadratureRefinement, otherwise the finer values are returned.
    """
    if not ctx.scalars.smooth:
        raise NonSmoothWaveform(
            "general_solution needs harmonic (cosine/sine) payoffs; "
            "integrate square/triangle games numerically instead")
    ts = np.atleast_1d(np.asarray(t, dtype=float))
    x, y = _eval_general(ctx, ts, ctx.nodes_per_period)
    if check_refinement:
        x2, y2 = _eval_general(ctx, ts, 2 * ctx.nodes_per_period)
        delta = max(np.abs(x - x2).max(), np.abs(y - y2).max())
        if delta >= refine_tol:
            raise QuadratureRefinement(
                f"doubling the quadrature moved the result by {delta:.3e} "
                f"(tol {refine_tol:.1e})")
        x, y = x2, y2
    if np.ndim(t) == 0:
        return float(x[0]), float(y[0])
    return x, y


def refinement_delta(ctx: GeneralSolutionContext, t) -> float:
    """Max absolute change in general_solution when doubling the nodes."""
    if not ctx.scalars.smooth:
        raise NonSmoothWaveform("refinement check needs harmonic payoffs")
    ts = np.atleast_1d(np.asarray(t, dtype=float))
    x, y = _eval_general(ctx, ts, ctx.nodes_per_period)
    x2, y2 = _eval_general(ctx, ts, 2 * ctx.nodes_per_period)
    return float(max(np.abs(x - x2).max(), np.abs(y - y2).max()))
