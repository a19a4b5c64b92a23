"""Closed-form solutions: initial conditions, ODE residuals, regime guards."""

import numpy as np
import pytest

from periodicgames import (
    NonSmoothWaveform,
    QuadratureRefinement,
    WrongRegime,
    divergence_speed,
    equilibrium_2x2,
    fig1_game,
    fig2_game,
    general_params,
    general_solution,
    nonresonant_params,
    nonresonant_solution,
    refinement_delta,
    resonant_params,
    resonant_solution,
    scalar_decomposition,
)
from periodicgames.analytic import simpson_weights


def _fig1_eq(omega=2.0):
    game = fig1_game(omega=omega)
    return game, equilibrium_2x2(game.mean, game.terms[0].amplitude)


def test_initial_state_recovered():
    game, eq = _fig1_eq()
    x0, y0 = 0.61, 0.47
    pr = resonant_params(eq, 2.0, (x0, y0))
    x, y = resonant_solution(pr, 0.0)
    assert x == pytest.approx(x0, abs=1e-12) and y == pytest.approx(y0, abs=1e-12)

    pn = nonresonant_params(eq, 3.0, (x0, y0))
    x, y = nonresonant_solution(pn, 0.0)
    assert x == pytest.approx(x0, abs=1e-12) and y == pytest.approx(y0, abs=1e-12)

    ctx = general_params(scalar_decomposition(fig2_game(omega=2.74)), (x0, y0))
    x, y = general_solution(ctx, 0.0)
    assert x == pytest.approx(x0, abs=1e-12) and y == pytest.approx(y0, abs=1e-12)


def test_coefficients_from_initial_state():
    _, eq = _fig1_eq()
    x0, y0 = 0.58, 0.46
    pr = resonant_params(eq, 2.0, (x0, y0))
    assert pr.c1 == pytest.approx(x0 - eq.x_bar_star - eq.dx_star / 2, abs=1e-15)
    assert pr.c2 == pytest.approx(y0 - eq.y_bar_star - eq.dy_star / 2, abs=1e-15)

    omega = 3.0
    gain = eq.alpha ** 2 / (eq.alpha ** 2 - omega ** 2)
    pn = nonresonant_params(eq, omega, (x0, y0))
    assert pn.c1 == pytest.approx(x0 - eq.x_bar_star - gain * eq.dx_star, abs=1e-15)
    assert pn.c2 == pytest.approx(y0 - eq.y_bar_star - gain * eq.dy_star, abs=1e-15)


@pytest.mark.parametrize("omega,make_params,solution", [
    (2.0, resonant_params, resonant_solution),
    (3.0, nonresonant_params, nonresonant_solution),
])
def test_solution_satisfies_scalar_ode(omega, make_params, solution):
    """dx/dt = f(t) y - g(t) and dy/dt = -f(t) x + h(t) by central differences."""
    game, eq = _fig1_eq(omega)
    sc = scalar_decomposition(game)
    p = make_params(eq, omega, (0.6, 0.5))
    eps = 1e-5
    rng = np.random.default_rng(8)
    for t in rng.uniform(0.1, 20.0, size=25):
        xp, yp = solution(p, t + eps)
        xm, ym = solution(p, t - eps)
        x, y = solution(p, t)
        dxdt = (xp - xm) / (2 * eps)
        dydt = (yp - ym) / (2 * eps)
        assert dxdt == pytest.approx(sc.f.value(t) * y - sc.g.value(t), abs=1e-8)
        assert dydt == pytest.approx(-sc.f.value(t) * x + sc.h.value(t), abs=1e-8)


def test_general_matches_nonresonant_on_invariant_game():
    game, eq = _fig1_eq(3.0)
    p = nonresonant_params(eq, 3.0, (0.6, 0.5))
    ctx = general_params(scalar_decomposition(game), (0.6, 0.5))
    ts = np.linspace(0.0, 30.0, 61)
    xr, yr = nonresonant_solution(p, ts)
    xg = np.empty_like(ts)
    yg = np.empty_like(ts)
    for i, t in enumerate(ts):
        xg[i], yg[i] = general_solution(ctx, t)
    assert np.max(np.abs(xg - xr)) < 1e-9
    assert np.max(np.abs(yg - yr)) < 1e-9


def test_general_reduces_to_time_invariant_closed_form():
    game = fig1_game(omega=3.0)
    flat = type(game)(mean=game.mean, omega=3.0, terms=())
    eq = equilibrium_2x2(flat.mean)
    p = nonresonant_params(eq, 3.0, (0.62, 0.45))
    ctx = general_params(scalar_decomposition(flat), (0.62, 0.45))
    for t in (0.5, 3.3, 12.0):
        xg, yg = general_solution(ctx, t)
        xr, yr = nonresonant_solution(p, t)
        assert xg == pytest.approx(xr, abs=1e-9)
        assert yg == pytest.approx(yr, abs=1e-9)


def test_nonresonant_periodicity_closure():
    # alpha = 2, omega = 4/3: both phases close after L = 3*pi
    _, eq = _fig1_eq()
    p = nonresonant_params(eq, 4.0 / 3.0, (0.6, 0.5))
    span = 3 * np.pi
    for t in (0.0, 0.7, 2.9):
        x0, y0 = nonresonant_solution(p, t)
        x1, y1 = nonresonant_solution(p, t + span)
        assert x1 == pytest.approx(x0, abs=1e-9)
        assert y1 == pytest.approx(y0, abs=1e-9)


def test_time_invariant_orbit_is_a_circle():
    game = fig1_game(omega=3.0)
    flat = type(game)(mean=game.mean, omega=3.0, terms=())
    eq = equilibrium_2x2(flat.mean)
    p = nonresonant_params(eq, 3.0, (0.6, 0.5))
    ts = np.linspace(0.0, 10.0, 200)
    x, y = nonresonant_solution(p, ts)
    radius_sq = (x - 0.5) ** 2 + (y - 0.5) ** 2
    assert np.max(np.abs(radius_sq - radius_sq[0])) < 1e-12


def test_regime_guards():
    _, eq = _fig1_eq()
    with pytest.raises(WrongRegime):
        resonant_params(eq, 2.0 + 1e-6, (0.6, 0.5))
    with pytest.raises(WrongRegime):
        nonresonant_params(eq, 2.0, (0.6, 0.5))
    with pytest.raises(WrongRegime):
        nonresonant_params(eq, 2.0 * (1 + 1e-9), (0.6, 0.5))
    # comfortably detuned frequencies are accepted
    nonresonant_params(eq, 2.0 * (1 + 1e-7), (0.6, 0.5))


def test_general_rejects_nonsmooth():
    sc = scalar_decomposition(fig2_game(omega=2.74, wave="square"))
    ctx = general_params(sc, (0.5, 0.5))
    with pytest.raises(NonSmoothWaveform):
        general_solution(ctx, 1.0)


def test_resonant_envelope_vs_nonresonant_bound():
    """The two regimes separate physically: linear growth vs a bounded orbit."""
    _, eq = _fig1_eq()
    speed = divergence_speed(eq, 2.0)
    assert speed == pytest.approx(np.sqrt(2.0) / 40.0, rel=1e-12)

    pr = resonant_params(eq, 2.0, (0.6, 0.5))
    t = 1000.0
    x, y = resonant_solution(pr, t)
    dev = np.hypot(x - 0.5, y - 0.5)
    assert dev == pytest.approx(speed * t, rel=0.05)

    pn = nonresonant_params(eq, 3.0, (0.6, 0.5))
    ts = np.linspace(0.0, 1000.0, 20001)
    xn, yn = nonresonant_solution(pn, ts)
    assert np.max(np.hypot(xn - 0.5, yn - 0.5)) < 0.3


def test_simpson_weights():
    w = simpson_weights(2)
    assert np.allclose(w, np.array([1.0, 4.0, 1.0]) / 3.0, atol=1e-15)
    for n in (4, 10, 64):
        w = simpson_weights(n)
        assert len(w) == n + 1
        assert w.sum() == pytest.approx(n, rel=1e-12)
    with pytest.raises(ValueError):
        simpson_weights(5)


def test_refinement_behaviour():
    sc = scalar_decomposition(fig2_game(omega=2.74))
    ctx = general_params(sc, (0.5, 0.5))
    assert refinement_delta(ctx, 50.0) < 1e-8
    checked = general_solution(ctx, 50.0, check_refinement=True)
    plain = general_solution(ctx, 50.0)
    assert abs(checked[0] - plain[0]) < 1e-8

    coarse = general_params(sc, (0.5, 0.5), nodes_per_period=8)
    assert refinement_delta(coarse, 50.0) > 1e-8
    with pytest.raises(QuadratureRefinement):
        general_solution(coarse, 50.0, check_refinement=True)
