"""Learning-operator spectrum and 2x2 closed forms against independent oracles."""

import numpy as np
import pytest

from periodicgames import (
    BoundaryEquilibrium,
    DegenerateGame,
    RealnessViolation,
    alpha_2x2,
    assemble_operator,
    centering_projection,
    equilibrium_2x2,
    fig1_game,
    fig2_game,
    game_spectrum,
    imaginary_spectrum,
    interior_equilibrium,
    scalar_decomposition,
)


def test_centering_projection_properties():
    for m in (2, 3, 5):
        p = centering_projection(m)
        assert np.allclose(p @ p, p, atol=1e-14)
        assert np.allclose(p, p.T, atol=0)
        assert np.allclose(p @ np.ones(m), 0.0, atol=1e-14)


def test_alpha_2x2_matching_pennies_exact():
    assert alpha_2x2(((1.0, -1.0), (-1.0, 1.0))) == 2.0


def test_alpha_2x2_agrees_with_operator_spectrum():
    rng = np.random.default_rng(0)
    for _ in range(50):
        u = rng.standard_normal((2, 2))
        a = abs(alpha_2x2(u))
        sp = imaginary_spectrum(assemble_operator(u))
        assert sp.alphas[0] == pytest.approx(a, abs=1e-12)


def test_spectrum_against_squared_operator():
    """Independent oracle: eigenvalues of A^2 are -alpha^2 (real, <= 0)."""
    rng = np.random.default_rng(1)
    for _ in range(25):
        m = int(rng.integers(2, 7))
        n = int(rng.integers(2, 7))
        a = assemble_operator(rng.standard_normal((m, n)))
        sp = imaginary_spectrum(a)
        sq = np.linalg.eigvals(a @ a)
        assert np.max(np.abs(sq.imag)) < 1e-9
        oracle = np.sqrt(np.maximum(-np.sort(sq.real), 0.0))
        # oracle lists each alpha twice (conjugate pair), spectrum once
        assert np.allclose(oracle[::2], sp.alphas, atol=1e-7)


def test_spectrum_descending_with_trailing_zero():
    rng = np.random.default_rng(2)
    for _ in range(50):
        m = int(rng.integers(2, 9))
        n = int(rng.integers(2, 9))
        sp = imaginary_spectrum(assemble_operator(rng.standard_normal((m, n))))
        alphas = np.array(sp.alphas)
        assert np.all(np.diff(alphas) <= 0)
        assert alphas[-1] == 0.0
        assert all(a > 0 for a in sp.nonzero)


def test_realness_violation_raised():
    # a matrix with a large real eigenvalue is not a valid learning operator
    with pytest.raises(RealnessViolation):
        imaginary_spectrum(np.array([[1.0, 0.0], [0.0, -1.0]]))


def test_game_spectrum_mean_only():
    sp = game_spectrum(fig2_game())
    assert sp.alphas[0] == pytest.approx(2.0, abs=1e-12)
    d = sp.to_dict()
    assert d["alphas"][0] == sp.alphas[0]
    assert "realness_residual" in d


def test_equilibrium_closed_form_values():
    game = fig1_game()
    eq = equilibrium_2x2(game.mean, game.terms[0].amplitude)
    assert eq.alpha == 2.0
    assert eq.x_bar_star == 0.5
    assert eq.y_bar_star == 0.5
    assert eq.dx_star == -0.025
    assert eq.dy_star == -0.025
    assert eq.deviation_norm == pytest.approx(np.hypot(0.025, 0.025), rel=1e-15)


def test_equilibrium_matches_general_solver():
    rng = np.random.default_rng(3)
    kept = 0
    while kept < 30:
        u = rng.standard_normal((2, 2))
        try:
            eq = equilibrium_2x2(u)
        except (DegenerateGame, BoundaryEquilibrium):
            continue
        x, y = interior_equilibrium(u)
        assert x[0] == pytest.approx(eq.x_bar_star, abs=1e-12)
        assert y[0] == pytest.approx(eq.y_bar_star, abs=1e-12)
        kept += 1


def test_equilibrium_rejects_degenerate_and_boundary():
    with pytest.raises(DegenerateGame):
        equilibrium_2x2(((1.0, 1.0), (1.0, 1.0)))
    # alpha = 1 but the first-action weight (-2 + 1) / 2 falls outside (0, 1)
    with pytest.raises(BoundaryEquilibrium):
        equilibrium_2x2(((4.0, 1.0), (2.0, 1.0)))


def test_interior_equilibrium_is_an_equilibrium():
    rng = np.random.default_rng(4)
    kept = 0
    while kept < 20:
        m = int(rng.integers(2, 6))
        u = rng.standard_normal((m, m))
        try:
            x, y = interior_equilibrium(u)
        except Exception:
            continue
        # interior equilibrium: every pure strategy earns the game value
        vx = u @ y
        vy = x @ u
        assert np.ptp(vx) < 1e-9
        assert np.ptp(vy) < 1e-9
        assert abs(x.sum() - 1) < 1e-12 and abs(y.sum() - 1) < 1e-12
        assert x.min() > 0 and y.min() > 0
        kept += 1


def test_scalar_decomposition_identity():
    """2f = u11-u12-u21+u22, 2g = -u12+u22, 2h = -u21+u22 at every t."""
    for game in (fig1_game(), fig2_game(), fig2_game(wave="triangle")):
        sc = scalar_decomposition(game)
        assert sc.omega == game.omega
        for t in (0.0, 0.31, 2.9, 11.0):
            u = game.payoff(t)
            assert sc.f.value(t) == pytest.approx(
                (u[0, 0] - u[0, 1] - u[1, 0] + u[1, 1]) / 2, abs=1e-12)
            assert sc.g.value(t) == pytest.approx((-u[0, 1] + u[1, 1]) / 2, abs=1e-12)
            assert sc.h.value(t) == pytest.approx((-u[1, 0] + u[1, 1]) / 2, abs=1e-12)


def test_scalar_decomposition_time_invariant_pennies():
    game = fig1_game()
    flat = type(game)(mean=game.mean, omega=2.0, terms=())
    sc = scalar_decomposition(flat)
    assert sc.mean_alpha == 2.0
    assert sc.f.value(0.7) == 2.0
    assert sc.g.value(0.7) == 1.0
    assert sc.h.value(0.7) == 1.0
    assert sc.smooth


def test_scalar_decomposition_smooth_flag():
    assert scalar_decomposition(fig2_game()).smooth
    assert not scalar_decomposition(fig2_game(wave="square")).smooth
