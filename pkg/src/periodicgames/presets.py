"""Built-in games and one-command experiment presets.

Standard configurations used throughout the docs and tests:

* ``fig1``: matching pennies with an eigenvalue-invariant diagonal
  oscillation, run at resonance (alpha = omega = 2) from the equilibrium.
* ``fig2``: a 400-point frequency sweep of a 2x2 game whose eigenvalue
  itself oscillates (f = 2 + 0.1 cos), exposing divergence at integer
  alpha/omega.
* ``fig3-3x3`` / ``fig3-6x6``: sweeps of seeded random multi-action games
  with small random harmonic perturbations.
* ``fig4``: the fig2 sweep under boundary-constrained (projected) dynamics.
* ``figA2-square`` / ``figA2-triangle``: fig2 with non-smooth waveforms.
* ``figA3``: three-player cyclic pennies at the synchronizing frequency.

Every preset expands to a plain config dict (the same schema accepted from
``--config`` JSON files), so presets and hand-written configs flow through
one code path.
"""

from __future__ import annotations

import numpy as np

from .errors import ConstraintViolation, DegenerateGame, BoundaryEquilibrium
from .games import (HarmonicTerm, PeriodicGame, PolymatrixGame, Waveform,
                    game_to_dict, make_eigenvalue_invariant,
                    make_perturbed_game, make_three_player_pennies,
                    polymatrix_to_dict)
from .spectrum import (assemble_operator, imaginary_spectrum,
                       interior_equilibrium)

#: base seed for the deterministic multi-action game search
FIG3_BASE_SEED = 7

_FREQ_START = 0.5
_FREQ_STOP = 20.0 / 3.0


def fig1_game(omega: float = 2.0) -> PeriodicGame:
    """Matching pennies, diagonal +-0.1 cosine: constant alpha = 2."""
    return make_eigenvalue_invariant(
        mean=((1.0, -1.0), (-1.0, 1.0)),
        delta=((0.1, 0.0), (0.0, -0.1)),
        omega=omega)


def fig2_game(omega: float = 2.0, wave: str = "cosine") -> PeriodicGame:
    """Near-pennies game with an oscillating eigenvalue: f = 2 + 0.1 w(wt).

    The (0,0) payoff entry carries a 0.2-amplitude wave, so the eigenvalue
    varies while the other scalar components g, h stay constant.
    """
    term = HarmonicTerm(amplitude=((0.2, 0.0), (0.0, 0.0)),
                        wave=Waveform(kind=wave))
    return PeriodicGame(mean=((1.1, -1.0), (-1.0, 0.9)), omega=omega,
                        terms=(term,))


def pennies_game(omega: float) -> PolymatrixGame:
    """Three-player cyclic pennies with eigenvalue-invariant oscillations."""
    return make_three_player_pennies(omega)


def _alpha_scale(mean: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    spec = imaginary_spectrum(assemble_operator(mean))
    return np.asarray(spec.alphas), spec


def random_mean_game(m: int, seed: int, leading_alpha: float = 2.0,
                     min_entry: float = 0.05, min_gap: float = 1.15
                     ) -> tuple[np.ndarray, int]:
    """Deterministic search for a well-conditioned random m x m zero-sum mean.

    Draws standard-normal matrices at seed, seed+1, ... and keeps the first
    whose rescaled version (leading alpha set to ``leading_alpha``) has an
    interior equilibrium, no near-zero entries, and a spectral gap
    alpha_1/alpha_2 of at least ``min_gap`` (so resonance neighborhoods of
    different alphas stay distinguishable).  Returns (matrix, seed used).
    """
    if m < 2:
        raise ConstraintViolation("need m >= 2")
    for trial in range(seed, seed + 10_000):
        rng = np.random.default_rng(trial)
        u = rng.standard_normal((m, m))
        alphas, _ = _alpha_scale(u)
        if alphas[0] <= 1e-9:
            continue
        u = u * (leading_alpha / alphas[0])
        if np.min(np.abs(u)) < min_entry:
            continue
        alphas, _ = _alpha_scale(u)
        if len(alphas) > 1 and alphas[1] > 1e-9:
            if alphas[0] / alphas[1] < min_gap:
                continue
        try:
            interior_equilibrium(u)
        except (DegenerateGame, BoundaryEquilibrium):
            continue
        u.flags.writeable = False
        return u, trial
    raise ConstraintViolation("no admissible random game found")


def fig3_game(m: int, omega: float = 2.0,
              seed: int = FIG3_BASE_SEED) -> PeriodicGame:
    """Seeded random m x m game with a small random harmonic perturbation.

    Perturbation scale shrinks with the matrix (0.12 / m) so the interior
    equilibrium's oscillation stays well inside the simplex.
    """
    mean, used = random_mean_game(m, seed)
    sigma = 0.12 / m
    return make_perturbed_game(mean, sigma=sigma, omega=omega,
                               seed=used + 1000)


def resonance_grid(start: float, stop: float, count: int,
                   alphas=(), max_n: int = 12) -> np.ndarray:
    """Linear frequency grid with the nearest points snapped onto resonances.

    For every alpha and n = 1..max_n with start <= alpha/n <= stop, the
    closest unsnapped grid point is replaced by the exact value, so sweeps
    always contain rows at the exact integer ratios.
    """
    if count < 1 or stop <= start or start <= 0:
        raise ConstraintViolation("need 0 < start < stop and count >= 1")
    grid = np.linspace(start, stop, count)
    targets = sorted({a / n for a in alphas for n in range(1, max_n + 1)
                      if start <= a / n <= stop})
    taken: set[int] = set()
    for target in targets:
        order = np.argsort(np.abs(grid - target))
        for i in order:
            if int(i) not in taken:
                grid[int(i)] = target
                taken.add(int(i))
                break
    return np.unique(grid)


def _sweep_grid(count: int) -> dict:
    return {"start": _FREQ_START, "stop": _FREQ_STOP, "count": count,
            "scale": "linear", "snap": True}


def _convergence(window: float) -> dict:
    return {"window": window, "tol": 1e-3}


def preset_config(name: str) -> dict:
    """Expand a preset name to a full experiment config dict."""
    if name == "fig1":
        return {
            "command": "trajectory",
            "game": game_to_dict(fig1_game(omega=2.0)),
            "integrator": "interior",
            "t_end": 1.0e3,
            "step": 1.0 / 40.0,
            "convergence": _convergence(100.0),
        }
    if name == "fig2":
        return {
            "command": "sweep",
            "game": game_to_dict(fig2_game()),
            "integrator": "interior",
            "t_end": 3.0e4,
            "step": 1.0 / 40.0,
            "omega_grid": _sweep_grid(400),
            "convergence": _convergence(100.0),
        }
    if name in ("fig3-3x3", "fig3-6x6"):
        m = 3 if name == "fig3-3x3" else 6
        return {
            "command": "sweep",
            "game": game_to_dict(fig3_game(m)),
            "integrator": "interior",
            "t_end": 3.0e4,
            "step": 1.0 / 40.0,
            "omega_grid": _sweep_grid(140),
            "convergence": _convergence(1.0e3),
            "seed": FIG3_BASE_SEED,
        }
    if name == "fig4":
        return {
            "command": "sweep",
            "game": game_to_dict(fig2_game()),
            "integrator": "projected",
            "t_end": 1.0e4,
            "step": 1.0 / 4000.0,
            "omega_grid": _sweep_grid(41),
            "convergence": _convergence(100.0),
        }
    if name in ("figA2-square", "figA2-triangle"):
        wave = "square" if name.endswith("square") else "triangle"
        return {
            "command": "sweep",
            "game": game_to_dict(fig2_game(wave=wave)),
            "integrator": "interior",
            "t_end": 3.0e4,
            "step": 1.0 / 40.0,
            "omega_grid": _sweep_grid(400),
            "convergence": _convergence(100.0),
        }
    if name == "figA3":
        omega = 2.0 * np.sqrt(3.0)  # ratio omega/alpha = sqrt(3): synchronizing
        return {
            "command": "polymatrix",
            "game": polymatrix_to_dict(pennies_game(omega)),
            "t_end": 1.0e4,
            "step": 1.0 / 40.0,
            "convergence": _convergence(100.0),
        }
    raise ConstraintViolation(f"unknown preset {name!r}: "
                              f"choose from {', '.join(PRESET_NAMES)}")


PRESET_NAMES = ("fig1", "fig2", "fig3-3x3", "fig3-6x6", "fig4",
                "figA2-square", "figA2-triangle", "figA3")
