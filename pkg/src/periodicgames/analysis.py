"""Time-average analysis, convergence verdicts, and frequency sweeps.

The central observable is the running time-average x_bar(T) = (1/T) int_0^T
x(t) dt, computed by the trapezoid rule on a trajectory's uniform grid.  Its
long-run behavior splits by the ratio alpha/omega:

* ratio in the positive integers (resonance): the average need not converge;
  its drift rate is the divergence term, a double integral over one period
  square (zero exactly for eigenvalue-invariant games).
* ratio bounded away from integers: the average converges, and its limit is
  given by a triangle-plus-square combination of the same integrands.

``run_omega_sweep`` runs a batch of integrations across a frequency grid in
one compiled pass and attaches the analytic quantities where they apply.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass

import numba
import numpy as np

from . import _kernels
from .analytic import ClosedFormParams, simpson_weights
from .dynamics import (DEFAULT_STEP, StrategyProfile, Trajectory,
                       build_linear_blocks, _term_arrays)
from .errors import (ConstraintViolation, InsufficientData,
                     QuadratureRefinement, WrongRegime)
from .games import TWO_PI, PeriodicGame
from .spectrum import (Spectrum, game_spectrum, interior_equilibrium,
                       scalar_decomposition, ScalarGame2x2)

#: ratio-to-integer tolerance for analytic resonance classification
RESONANCE_TOL = 1e-6

#: default convergence criterion (window of time, movement tolerance)
DEFAULT_WINDOW = 100.0
DEFAULT_CONV_TOL = 1e-3

#: Simpson intervals per axis for the period-square double integrals
DEFAULT_SQUARE_NODES = 256


@dataclass(frozen=True)
class TimeAverageSeries:
    """Running averages (1/(T_k - t0)) int_{t0}^{T_k} s dt at every sample."""

    times: np.ndarray
    averages: np.ndarray
    sizes: tuple[int, ...]

    def component(self, i: int) -> np.ndarray:
        return self.averages[:, i]


def time_average(traj: Trajectory) -> TimeAverageSeries:
    """Trapezoid running averages of all coordinates.

    The k = 0 entry is the initial state (the T -> 0 limit).  Exact for
    constant trajectories and for trajectories linear in t.
    """
    s = traj.states
    csum = np.cumsum(s, axis=0)
    integral = traj.dt * (csum - 0.5 * s - 0.5 * s[0])
    elapsed = traj.dt * np.arange(len(traj))
    avg = np.empty_like(s)
    avg[0] = s[0]
    avg[1:] = integral[1:] / elapsed[1:, None]
    return TimeAverageSeries(times=traj.times, averages=avg, sizes=traj.sizes)


def convergence_verdict(series: TimeAverageSeries, window: float = DEFAULT_WINDOW,
                        tol: float = DEFAULT_CONV_TOL) -> bool:
    """True when every coordinate's average moved < tol over the last window."""
    times = series.times
    span = times[-1] - times[0]
    if span < window:
        raise InsufficientData(
            f"series spans {span}, shorter than the window {window}")
    sel = times >= times[-1] - window
    tail = series.averages[sel]
    return bool(np.all(tail.max(axis=0) - tail.min(axis=0) < tol))


@dataclass(frozen=True)
class ResonanceClass:
    """Classification of a frequency against a game's spectrum."""

    resonant: bool
    indices: tuple[int, ...]
    ratios: tuple[float, ...]


def classify_resonance(spec: Spectrum, omega: float,
                       tol: float = RESONANCE_TOL) -> ResonanceClass:
    """Resonant iff some nonzero alpha / omega is within tol of 1, 2, 3, ...

    ``ratios`` lists alpha/omega for the nonzero alphas; ``indices`` points
    at the resonant entries of that tuple.
    """
    if omega <= 0:
        raise ConstraintViolation("omega must be positive")
    ratios = tuple(a / omega for a in spec.nonzero)
    hits = tuple(i for i, r in enumerate(ratios)
                 if round(r) >= 1 and abs(r - round(r)) <= tol)
    return ResonanceClass(resonant=bool(hits), indices=hits, ratios=ratios)


@dataclass(frozen=True)
class AmplitudeExtrema:
    """Per-coordinate extrema over a trajectory's stored samples."""

    max_values: np.ndarray
    min_values: np.ndarray
    boundary_touched: bool


def amplitude_extrema(traj: Trajectory) -> AmplitudeExtrema:
    """Exact extrema over stored samples, flagging simplex-boundary contact.

    boundary_touched is set when any coordinate reaches 0 or 1 or goes
    beyond (interior dynamics are unclipped, so overshoot is meaningful).
    """
    mx = traj.states.max(axis=0)
    mn = traj.states.min(axis=0)
    touched = bool(np.any(mn <= 0.0) or np.any(mx >= 1.0))
    return AmplitudeExtrema(max_values=mx, min_values=mn,
                            boundary_touched=touched)


@dataclass(frozen=True)
class LinearFit:
    slope: float
    intercept: float
    r_squared: float


def fit_linear(times, values, t_from: float | None = None) -> LinearFit:
    """Least-squares line fit, optionally restricted to times >= t_from."""
    t = np.asarray(times, dtype=float)
    v = np.asarray(values, dtype=float)
    if t_from is not None:
        sel = t >= t_from
        t, v = t[sel], v[sel]
    if t.size < 2:
        raise InsufficientData("need at least two points to fit a line")
    slope, intercept = np.polyfit(t, v, 1)
    resid = v - (slope * t + intercept)
    sstot = float(np.sum((v - v.mean()) ** 2))
    ssres = float(np.sum(resid ** 2))
    r2 = 1.0 if sstot == 0.0 else 1.0 - ssres / sstot
    return LinearFit(float(slope), float(intercept), r2)


def envelope_maxima(times, values, period: float
                    ) -> tuple[np.ndarray, np.ndarray]:
    """Per-period maxima of a series: (time of max, max) per complete block."""
    t = np.asarray(times, dtype=float)
    v = np.asarray(values, dtype=float)
    if period <= 0:
        raise ConstraintViolation("period must be positive")
    n_blocks = int(np.floor((t[-1] - t[0]) / period + 1e-12))
    if n_blocks < 1:
        raise InsufficientData("series shorter than one period")
    idx = np.minimum(((t - t[0]) / period).astype(int), n_blocks)
    t_out = []
    v_out = []
    for b in range(n_blocks):
        sel = np.nonzero(idx == b)[0]
        if sel.size == 0:
            continue
        k = sel[np.argmax(v[sel])]
        t_out.append(t[k])
        v_out.append(v[k])
    if not t_out:
        raise InsufficientData("sampling too coarse to window by period")
    return np.array(t_out), np.array(v_out)


@dataclass(frozen=True)
class GrowthFit:
    """Linear-fit classification of an amplitude envelope."""

    slope: float
    r_squared: float
    level: float
    growing: bool


def classify_growth(times, deviations, period: float,
                    t_from: float = 100.0) -> GrowthFit:
    """Fit per-period deviation maxima vs time and decide growth.

    Growing means: positive slope, R^2 > 0.9, and fitted growth over the
    window exceeding half the mean envelope level (filters flat noise).
    """
    bt, bv = envelope_maxima(times, deviations, period)
    fit = fit_linear(bt, bv, t_from=min(t_from, bt[len(bt) // 2]))
    sel = bt >= min(t_from, bt[len(bt) // 2])
    level = float(np.mean(bv[sel]))
    span = float(bt[-1] - bt[sel][0]) if sel.any() else 0.0
    growing = (fit.slope > 0.0 and fit.r_squared > 0.9
               and fit.slope * span > 0.5 * level)
    return GrowthFit(fit.slope, fit.r_squared, level, growing)


def deviation_series(traj: Trajectory, reference) -> np.ndarray:
    """Euclidean distance of every sample from a reference state."""
    ref = np.asarray(reference, dtype=float).ravel()
    return np.linalg.norm(traj.states - ref, axis=1)


def _period_grid(sc: ScalarGame2x2, n: int):
    period = TWO_PI / sc.omega
    t = np.linspace(0.0, period, n + 1)
    wts = simpson_weights(n) * (period / n)
    big_f = sc.f.integral(t)
    return period, t, wts, np.cos(big_f), np.sin(big_f)


def _square_integrals(sc: ScalarGame2x2, n: int):
    """The six 1-D factors of the period-square tensor-Simpson integrals."""
    period, t, wts, cf, sf = _period_grid(sc, n)
    gv = sc.g.value(t)
    hv = sc.h.value(t)
    c_one = wts @ cf
    s_one = wts @ sf
    c_g = wts @ (gv * cf)
    s_g = wts @ (gv * sf)
    c_h = wts @ (hv * cf)
    s_h = wts @ (hv * sf)
    return period, c_one, s_one, c_g, s_g, c_h, s_h


def _divergence_value(sc: ScalarGame2x2, n_nodes: int) -> tuple[float, float]:
    period, c1, s1, cg, sg, ch, sh = _square_integrals(sc, n_nodes)
    # iint a(t) b(tau) over the square factorizes into 1-D Simpson products,
    # which is exactly the tensor-product rule evaluated separably
    x_sq = (s1 * ch - c1 * sh) - (c1 * cg + s1 * sg)
    y_sq = (s1 * cg - c1 * sg) + (c1 * ch + s1 * sh)
    pref = 0.5 / period ** 2
    return pref * x_sq, pref * y_sq


def divergence_term(sc: ScalarGame2x2, n: int,
                    nodes: int = DEFAULT_SQUARE_NODES,
                    refine_tol: float = 1e-4) -> tuple[float, float]:
    """Asymptotic drift rate (lim x_bar(T)/T, lim y_bar(T)/T) at resonance.

    Valid when mean alpha / omega equals the positive integer n: the double
    integral of the solution kernel over one period square, scaled by
    (1/2)(omega/2pi)^2.  Tensor Simpson with one doubling refinement check;
    the finer value is returned.  Vanishes exactly when f is constant.
    """
    if n < 1 or n != int(n):
        raise WrongRegime("n must be a positive integer")
    # the cycling frequency is |mean alpha|: either rotation orientation
    # resonates when its magnitude is an integer multiple of omega
    ratio = abs(sc.mean_alpha) / sc.omega
    if abs(ratio - n) > 1e-9:
        raise WrongRegime(
            f"divergence_term needs |mean alpha|/omega = {n}, got {ratio!r}")
    coarse = _divergence_value(sc, nodes)
    fine = _divergence_value(sc, 2 * nodes)
    scale = max(1.0, abs(fine[0]), abs(fine[1]))
    delta = max(abs(coarse[0] - fine[0]), abs(coarse[1] - fine[1]))
    if delta > refine_tol * scale:
        raise QuadratureRefinement(
            f"divergence_term unstable under refinement: delta={delta:.3e}")
    return fine


def resonant_average_cycle(p: ClosedFormParams, t_end) -> tuple[float, float]:
    """Leading-order time-average at resonance (the O(1/T) tail dropped).

    x_bar(T) = x* - (dx*/2) cos wT - (dy*/2) sin wT and the rotated form
    for y: the average cycles on a circle of radius
    sqrt(dx*^2 + dy*^2) / 2 around the mean equilibrium.
    """
    if abs(p.alpha - p.omega) > 1e-12 * max(abs(p.alpha), 1.0):
        raise WrongRegime("resonant_average_cycle requires alpha = omega")
    eq = p.eq
    wt = np.asarray(t_end, dtype=float) * p.omega
    cx = eq.x_bar_star - 0.5 * eq.dx_star * np.cos(wt) \
        - 0.5 * eq.dy_star * np.sin(wt)
    cy = eq.y_bar_star - 0.5 * eq.dy_star * np.cos(wt) \
        + 0.5 * eq.dx_star * np.sin(wt)
    if np.ndim(t_end) == 0:
        return float(cx), float(cy)
    return cx, cy


def _limit_value(sc: ScalarGame2x2, weight: float, n_nodes: int
                 ) -> tuple[float, float]:
    period, c1, s1, cg, sg, ch, sh = _square_integrals(sc, n_nodes)
    x_sq = (s1 * ch - c1 * sh) - (c1 * cg + s1 * sg)
    y_sq = (s1 * cg - c1 * sg) + (c1 * ch + s1 * sh)
    x_rot = (c1 * ch + s1 * sh) + (s1 * cg - c1 * sg)
    y_rot = (c1 * cg + s1 * sg) - (s1 * ch - c1 * sh)
    # triangle 0 <= tau <= t <= period via tau = t u, u in [0, 1]
    t = np.linspace(0.0, period, n_nodes + 1)
    u = np.linspace(0.0, 1.0, n_nodes + 1)
    wt = simpson_weights(n_nodes) * (period / n_nodes)
    wu = simpson_weights(n_nodes) / n_nodes
    tau = t[:, None] * u[None, :]
    theta = sc.f.integral(t)[:, None] - sc.f.integral(tau)
    sth, cth = np.sin(theta), np.cos(theta)
    gv = sc.g.value(tau)
    hv = sc.h.value(tau)
    x_tri = (wt * t) @ ((hv * sth - gv * cth) @ wu)
    y_tri = (wt * t) @ ((gv * sth + hv * cth) @ wu)
    x_lim = (x_tri - 0.5 * x_sq + 0.5 * weight * x_rot) / period
    y_lim = (y_tri - 0.5 * y_sq + 0.5 * weight * y_rot) / period
    return float(x_lim), float(y_lim)


def nonresonant_limit(sc: ScalarGame2x2, r: float,
                      nodes: int = DEFAULT_SQUARE_NODES,
                      refine_tol: float = 1e-4) -> tuple[float, float]:
    """Predicted limit of the time-average away from resonance.

    r is the ratio mean alpha / omega; it must be bounded away from the
    integers (the sin(2 pi r)/(1 - cos(2 pi r)) weight blows up there).
    Combines a triangle integral with two period-square integrals, all by
    tensor Simpson with a doubling refinement check.
    """
    signed = sc.mean_alpha / sc.omega
    if abs(abs(signed) - r) > 1e-9 * max(1.0, abs(r)):
        raise ConstraintViolation(
            f"r={r!r} disagrees with |mean alpha|/omega={abs(signed)!r}")
    if abs(r - round(r)) < RESONANCE_TOL and round(r) >= 1:
        raise WrongRegime(f"r={r!r} is resonant; use divergence_term")
    denom = 1.0 - np.cos(TWO_PI * r)
    if abs(denom) <= 1e-9:
        raise WrongRegime(f"1 - cos(2 pi r) = {denom:.3e} is too small at r={r!r}")
    # the weighted term is odd in the rotation orientation: a negative mean
    # alpha flips sin(2 pi r) while 1 - cos(2 pi r) is even
    weight = float(np.sin(TWO_PI * r) / denom)
    if signed < 0:
        weight = -weight
    coarse = _limit_value(sc, weight, nodes)
    fine = _limit_value(sc, weight, 2 * nodes)
    scale = max(1.0, abs(fine[0]), abs(fine[1]))
    delta = max(abs(coarse[0] - fine[0]), abs(coarse[1] - fine[1]))
    if delta > refine_tol * scale:
        raise QuadratureRefinement(
            f"nonresonant_limit unstable under refinement: delta={delta:.3e}")
    return fine


@dataclass(frozen=True)
class SweepRecord:
    """Observables of one frequency in a sweep.

    x_max/x_min/avg_x/avg_y concern the observed coordinates (first entry
    of each player's strategy); final_average carries all coordinates.
    div_x/div_y are filled at integer mean-alpha ratios, limit_x/limit_y
    away from them, both only where the analytic theory applies (interior
    dynamics, 2x2, smooth payoffs).
    """

    omega: float
    alphas_over_omega: tuple[float, ...]
    resonant: bool
    x_max: float
    x_min: float
    avg_x: float
    avg_y: float
    final_average: tuple[float, ...]
    converged: bool
    boundary_touched: bool
    div_x: float | None = None
    div_y: float | None = None
    limit_x: float | None = None
    limit_y: float | None = None
    status: str = "ok"


def _set_jobs(jobs: int | None) -> None:
    if jobs is None:
        return
    limit = numba.config.NUMBA_NUM_THREADS
    numba.set_num_threads(max(1, min(int(jobs), limit)))


def default_initial_profile(game: PeriodicGame) -> StrategyProfile:
    """Interior equilibrium of the time-average game (the standard start)."""
    xs, ys = interior_equilibrium(game.mean)
    return StrategyProfile(xs, ys)


def run_omega_sweep(game: PeriodicGame, omegas, t_end: float,
                    step: float = DEFAULT_STEP,
                    window: float = DEFAULT_WINDOW,
                    tol: float = DEFAULT_CONV_TOL,
                    integrator: str = "interior",
                    initial: StrategyProfile | None = None,
                    jobs: int | None = None,
                    analytic_extras: bool = True) -> list[SweepRecord]:
    """Integrate one game over a frequency grid and report per-omega records.

    All frequencies share the same initial profile (by default the interior
    equilibrium of the mean game; for the projected integrator the initial
    duals are that profile, whose projection is itself).  Convergence is
    judged on running averages at full step resolution over the final
    window.  Per-frequency analytic failures land in the row's status
    without aborting the sweep.
    """
    omegas = np.sort(np.unique(np.asarray(omegas, dtype=float)))
    if omegas.size < 1 or omegas[0] <= 0:
        raise ConstraintViolation("need at least one positive frequency")
    if integrator not in ("interior", "projected"):
        raise ConstraintViolation(f"unknown integrator {integrator!r}")
    if t_end < window:
        raise InsufficientData(
            f"t_end {t_end} is shorter than the verdict window {window}")
    if initial is None:
        initial = default_initial_profile(game)
    s0 = initial.stacked
    n_steps = max(1, int(round(t_end / step)))
    win_steps = min(n_steps, int(round(window / step)))
    _set_jobs(jobs)
    if integrator == "interior":
        blocks = build_linear_blocks(game)
        obs_max, obs_min, final_avg, win_max, win_min, ok, t_done = \
            _kernels.linear_sweep(blocks.lbar, blocks.lks, blocks.kinds,
                                  blocks.mults, blocks.phases, omegas, s0,
                                  step, n_steps, win_steps, 0)
    else:
        amps, kinds, mults, phases = _term_arrays(game)
        obs_max, obs_min, final_avg, win_max, win_min, ok, t_done = \
            _kernels.projected_sweep(game.mean, amps, kinds, mults, phases,
                                     omegas, s0, step, n_steps, win_steps, 0)
    spec = game_spectrum(game)
    scalars = None
    if analytic_extras and integrator == "interior" and game.shape == (2, 2):
        try:
            scalars = scalar_decomposition(game)
        except Exception:
            scalars = None
    mx = game.shape[0]
    records = []
    for b, omega in enumerate(omegas):
        cls = classify_resonance(spec, omega)
        status = "ok"
        converged = False
        if ok[b]:
            spread = win_max[b] - win_min[b]
            converged = bool(np.all(spread < tol))
        else:
            status = f"integration aborted at t={t_done[b]:.6g}"
        div_x = div_y = limit_x = limit_y = None
        if scalars is not None and scalars.smooth and ok[b]:
            sc = scalars.with_omega(omega)
            ratio = abs(sc.mean_alpha) / omega
            near = round(ratio)
            try:
                if near >= 1 and abs(ratio - near) <= 1e-9:
                    div_x, div_y = divergence_term(sc, int(near))
                elif abs(ratio - near) >= RESONANCE_TOL or near < 1:
                    limit_x, limit_y = nonresonant_limit(sc, ratio)
            except (WrongRegime, QuadratureRefinement) as exc:
                status = f"analytic: {exc}"
        records.append(SweepRecord(
            omega=float(omega),
            alphas_over_omega=cls.ratios,
            resonant=cls.resonant,
            x_max=float(obs_max[b]),
            x_min=float(obs_min[b]),
            avg_x=float(final_avg[b, 0]),
            avg_y=float(final_avg[b, mx]),
            final_average=tuple(float(v) for v in final_avg[b]),
            converged=converged,
            boundary_touched=bool(obs_min[b] <= 0.0 or obs_max[b] >= 1.0),
            div_x=div_x, div_y=div_y, limit_x=limit_x, limit_y=limit_y,
            status=status))
    return records


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def sweep_header(n_ratios: int) -> list[str]:
    cols = ["omega"]
    cols += [f"ratio_{j + 1}" for j in range(n_ratios)]
    cols += ["resonant", "x_max", "x_min", "avg_x", "avg_y", "converged",
             "boundary_touched", "div_x", "div_y", "limit_x", "limit_y",
             "status"]
    return cols


def write_sweep_csv(records: list[SweepRecord], path) -> None:
    """One row per frequency, 17-significant-digit floats, sorted by omega."""
    if not records:
        raise ConstraintViolation("no sweep records to write")
    n_ratios = len(records[0].alphas_over_omega)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(sweep_header(n_ratios))
        for rec in sorted(records, key=lambda r: r.omega):
            row = [_fmt(rec.omega)]
            row += [_fmt(r) for r in rec.alphas_over_omega]
            row += [_fmt(rec.resonant), _fmt(rec.x_max), _fmt(rec.x_min),
                    _fmt(rec.avg_x), _fmt(rec.avg_y), _fmt(rec.converged),
                    _fmt(rec.boundary_touched), _fmt(rec.div_x),
                    _fmt(rec.div_y), _fmt(rec.limit_x), _fmt(rec.limit_y),
                    rec.status]
            writer.writerow(row)


def sweep_records_to_dicts(records: list[SweepRecord]) -> list[dict]:
    out = []
    for rec in sorted(records, key=lambda r: r.omega):
        out.append({
            "omega": rec.omega,
            "ratios": list(rec.alphas_over_omega),
            "resonant": rec.resonant,
            "x_max": rec.x_max,
            "x_min": rec.x_min,
            "avg_x": rec.avg_x,
            "avg_y": rec.avg_y,
            "final_average": list(rec.final_average),
            "converged": rec.converged,
            "boundary_touched": rec.boundary_touched,
            "div_x": rec.div_x,
            "div_y": rec.div_y,
            "limit_x": rec.limit_x,
            "limit_y": rec.limit_y,
            "status": rec.status,
        })
    return out


def write_sweep_json(records: list[SweepRecord], path) -> None:
    payload = {"records": sweep_records_to_dicts(records)}
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
