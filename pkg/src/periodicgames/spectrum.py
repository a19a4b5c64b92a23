"""The learning operator, its purely imaginary spectrum, and 2x2 closed forms.

Interior gradient descent-ascent on a zero-sum game U is linear: with the
centering projections P = I - 11^T/m, the joint state (x; y) evolves under

    A = (  O     +P_X U )
        ( -P_Y U^T   O  )

whose eigenvalues are all zero or purely imaginary.  The nonnegative imaginary
parts alpha^(1) >= ... >= alpha^(m) = 0 are the cycling frequencies of the
learning modes; resonance with a periodic payoff happens when alpha^(j)/omega
is a positive integer.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BoundaryEquilibrium, DegenerateGame, RealnessViolation
from .games import HarmonicScalar, PeriodicGame, as_payoff_matrix

#: default relative tolerance for the purely-imaginary check
REALNESS_TOL = 1e-9

#: relative radius of the numerical zero cluster.  The operator always has a
#: zero eigenvalue of algebraic multiplicity >= 2, and for m != n one size-2
#: Jordan block, which a dense eigensolver scatters by ~sqrt(eps) in arbitrary
#: complex directions; those points belong to the "zero" class, not to the
#: realness check.
ZERO_CLUSTER_TOL = 1e-7


def centering_projection(m: int) -> np.ndarray:
    """P = I - (1/m) * ones: symmetric, idempotent, annihilates constants."""
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    return np.eye(m) - np.full((m, m), 1.0 / m)


def assemble_operator(u) -> np.ndarray:
    """Block operator ((O, +P_X U), (-P_Y U^T, O)) of size m_X + m_Y."""
    u = as_payoff_matrix(u)
    m_x, m_y = u.shape
    a = np.zeros((m_x + m_y, m_x + m_y))
    a[:m_x, m_x:] = centering_projection(m_x) @ u
    a[m_x:, :m_x] = -centering_projection(m_y) @ u.T
    return a


@dataclass(frozen=True)
class Spectrum:
    """Nonnegative imaginary parts of the learning operator's eigenvalues.

    ``alphas`` holds one entry per conjugate pair, sorted descending; the last
    entry is always 0 (the operator is singular because both projections kill
    the all-ones direction).  ``realness_residual`` is the largest |Re lambda|
    seen, kept as evidence that the zero-sum structure held.
    """

    alphas: tuple[float, ...]
    realness_residual: float

    @property
    def nonzero(self) -> tuple[float, ...]:
        return tuple(a for a in self.alphas if a > 0.0)

    def to_dict(self) -> dict:
        return {"alphas": list(self.alphas), "realness_residual": self.realness_residual}


def imaginary_spectrum(a, tol: float = REALNESS_TOL) -> Spectrum:
    """Eigenvalues of A reduced to their nonnegative imaginary parts.

    Uses a dense nonsymmetric eigensolver.  Eigenvalues inside the numerical
    zero cluster (|lambda| <= ZERO_CLUSTER_TOL * |A|_max) are reported as exact
    zeros; the remaining ones must satisfy |Re lambda| <= tol * |A|_max, which
    doubles as a zero-sum/assembly sanity check.  The cluster radius absorbs
    the ~sqrt(eps) scatter of the defective zero eigenvalue that appears for
    rectangular payoff matrices.
    """
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"operator must be square, got shape {a.shape}")
    eigs = np.linalg.eigvals(a)
    norm = np.max(np.abs(a)) if a.size else 0.0
    zero_scale = ZERO_CLUSTER_TOL * max(norm, np.finfo(float).tiny)
    nonzero = eigs[np.abs(eigs) > zero_scale]
    residual = float(np.max(np.abs(nonzero.real))) if nonzero.size else 0.0
    scale = tol * max(norm, np.finfo(float).tiny)
    if residual > scale:
        worst = nonzero[int(np.argmax(np.abs(nonzero.real)))]
        raise RealnessViolation(
            f"eigenvalue {worst} has |Re| = {abs(worst.real):.3e} > {scale:.3e}; "
            "the payoff structure is not zero-sum or the operator was misassembled")
    imags = np.abs(eigs.imag)
    imags[np.abs(eigs) <= zero_scale] = 0.0
    imags[imags <= scale] = 0.0
    imags = np.sort(imags)[::-1]
    # real matrices yield exact conjugate pairs, so every value appears twice
    # (up to the zero eigenvalues, which pair among themselves)
    alphas = tuple(float(v) for v in imags[::2])
    return Spectrum(alphas=alphas, realness_residual=residual)


def game_spectrum(game: PeriodicGame, tol: float = REALNESS_TOL) -> Spectrum:
    """Spectrum of the mean (time-average) game's learning operator."""
    return imaginary_spectrum(assemble_operator(game.mean), tol)


def alpha_2x2(u) -> float:
    """Cycling eigenvalue of a 2x2 game: (u11 - u12 - u21 + u22) / 2."""
    u = as_payoff_matrix(u)
    if u.shape != (2, 2):
        raise ValueError(f"alpha_2x2 needs a 2x2 matrix, got {u.shape}")
    return (u[0, 0] - u[0, 1] - u[1, 0] + u[1, 1]) / 2.0


@dataclass(frozen=True)
class Equilibrium2x2:
    """Mean equilibrium (first-action weights) and its oscillation amplitude.

    x_bar_star = (-u21 + u22) / (2 alpha) and y_bar_star = (-u12 + u22) /
    (2 alpha) are the interior equilibrium of the mean game; dx_star, dy_star
    are the same formulas applied to the oscillation amplitude matrix, i.e.
    how far the instantaneous equilibrium swings around the mean one.
    """

    x_bar_star: float
    y_bar_star: float
    dx_star: float = 0.0
    dy_star: float = 0.0
    alpha: float = 0.0

    @property
    def deviation_norm(self) -> float:
        return float(np.hypot(self.dx_star, self.dy_star))

    def to_dict(self) -> dict:
        return {
            "x_bar_star": self.x_bar_star,
            "y_bar_star": self.y_bar_star,
            "dx_star": self.dx_star,
            "dy_star": self.dy_star,
            "alpha": self.alpha,
        }


def equilibrium_2x2(mean, delta=None) -> Equilibrium2x2:
    """Closed-form interior equilibrium of a 2x2 zero-sum game.

    ``delta`` (optional) is an oscillation amplitude matrix; its entries feed
    the same formulas to give the equilibrium deviation (dx_star, dy_star).
    Rejects degenerate games (alpha = 0) and games whose mean equilibrium is
    not strictly interior, where the closed-form theory does not apply.
    """
    mean = as_payoff_matrix(mean)
    alpha = alpha_2x2(mean)
    if abs(alpha) < 1e-12:
        raise DegenerateGame("alpha = 0: no interior-equilibrium closed form")
    x_star = (-mean[1, 0] + mean[1, 1]) / (2.0 * alpha)
    y_star = (-mean[0, 1] + mean[1, 1]) / (2.0 * alpha)
    if not (0.0 < x_star < 1.0 and 0.0 < y_star < 1.0):
        raise BoundaryEquilibrium(
            f"mean equilibrium ({x_star}, {y_star}) is not strictly interior")
    dx = dy = 0.0
    if delta is not None:
        delta = as_payoff_matrix(delta)
        dx = (-delta[1, 0] + delta[1, 1]) / (2.0 * alpha)
        dy = (-delta[0, 1] + delta[1, 1]) / (2.0 * alpha)
    return Equilibrium2x2(float(x_star), float(y_star), float(dx), float(dy), float(alpha))


@dataclass(frozen=True)
class ScalarGame2x2:
    """Scalar reduction of a 2x2 periodic game to first-action coordinates.

    With x, y the first-action weights, interior learning reduces to

        dx/dt = f(t) y - g(t),      dy/dt = -f(t) x + h(t),

    where 2f = u11 - u12 - u21 + u22 (the time-varying eigenvalue),
    2g = -u12 + u22 and 2h = -u21 + u22.  ``mean_alpha`` is the mean of f;
    F(t) = int_0^t f is available through ``f.integral`` for smooth games.
    """

    f: HarmonicScalar
    g: HarmonicScalar
    h: HarmonicScalar
    omega: float

    @property
    def mean_alpha(self) -> float:
        return self.f.mean

    @property
    def smooth(self) -> bool:
        return self.f.smooth and self.g.smooth and self.h.smooth

    def with_omega(self, omega: float) -> "ScalarGame2x2":
        return ScalarGame2x2(
            self.f.with_omega(omega), self.g.with_omega(omega),
            self.h.with_omega(omega), float(omega))


def scalar_decomposition(game: PeriodicGame) -> ScalarGame2x2:
    """Decompose a 2x2 periodic game into the scalar signals f, g, h."""
    if game.shape != (2, 2):
        raise ValueError(f"scalar decomposition needs a 2x2 game, got {game.shape}")

    def combo(u, weights):
        return sum(w * u[i, j] for (i, j), w in weights.items()) / 2.0

    f_w = {(0, 0): 1.0, (0, 1): -1.0, (1, 0): -1.0, (1, 1): 1.0}
    g_w = {(0, 1): -1.0, (1, 1): 1.0}
    h_w = {(1, 0): -1.0, (1, 1): 1.0}

    def build(weights) -> HarmonicScalar:
        terms = []
        for term in game.terms:
            coef = combo(term.amplitude, weights)
            if coef != 0.0:
                terms.append((coef, term.wave))
        return HarmonicScalar(combo(game.mean, weights), game.omega, tuple(terms))

    return ScalarGame2x2(f=build(f_w), g=build(g_w), h=build(h_w), omega=game.omega)


def interior_equilibrium(mean) -> tuple[np.ndarray, np.ndarray]:
    """Interior equilibrium (x*, y*) of a zero-sum matrix game of any size.

    Solves the indifference conditions U y* = v 1, U^T x* = w 1 together with
    the simplex sums.  Raises if the linear systems are singular or the
    solution is not strictly interior (mixed-support equilibria on the
    boundary are out of scope for the closed-form machinery).
    """
    u = as_payoff_matrix(mean)
    m_x, m_y = u.shape

    def solve(a, m):
        # [[A, -1], [1^T, 0]] @ [p, v] = [0, 1]
        sys = np.zeros((m + 1, m + 1))
        sys[:m, :m] = a
        sys[:m, m] = -1.0
        sys[m, :m] = 1.0
        rhs = np.zeros(m + 1)
        rhs[m] = 1.0
        try:
            sol = np.linalg.solve(sys, rhs)
        except np.linalg.LinAlgError as exc:
            raise BoundaryEquilibrium(f"no unique interior equilibrium: {exc}") from exc
        return sol[:m]

    y_star = solve(u, m_y)        # makes X indifferent
    x_star = solve(u.T, m_x)      # makes Y indifferent
    if np.any(x_star <= 0.0) or np.any(y_star <= 0.0):
        raise BoundaryEquilibrium("equilibrium support is not full; not interior")
    return x_star, y_star
