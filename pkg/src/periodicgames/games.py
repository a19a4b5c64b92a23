"""Payoff matrices and periodically varying zero-sum games.

A periodic game is a mean payoff matrix plus a finite list of oscillating
harmonic terms::

    U(t) = U_mean + sum_k  A_k * wave_k(m_k * omega * t + phase_k)

where each wave is one of cosine / sine / square / triangle, m_k is a positive
integer harmonic multiplier and omega is the fundamental frequency, so that
U(t) = U(t + 2*pi/omega) exactly.  Player X receives u_ij, player Y receives
-u_ij (zero-sum).  Storing games as harmonic expansions (rather than arbitrary
callables) is what lets the analytic modules integrate F(t) in closed form.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import ConstraintViolation, NonSmoothWaveform

TWO_PI = 2.0 * np.pi

WAVE_KINDS = ("cosine", "sine", "square", "triangle")
# integer codes shared with the numba kernels
WAVE_CODES = {name: i for i, name in enumerate(WAVE_KINDS)}


def as_payoff_matrix(entries) -> np.ndarray:
    """Validate and return a payoff matrix as a float array.

    Requires a finite 2-D matrix with at least two actions per player.
    """
    u = np.asarray(entries, dtype=float)
    if u.ndim != 2:
        raise ConstraintViolation(f"payoff matrix must be 2-D, got shape {u.shape}")
    if u.shape[0] < 2 or u.shape[1] < 2:
        raise ConstraintViolation(f"each player needs >= 2 actions, got shape {u.shape}")
    if not np.all(np.isfinite(u)):
        raise ConstraintViolation("payoff matrix has non-finite entries")
    u = u.copy()
    u.setflags(write=False)
    return u


@dataclass(frozen=True)
class Waveform:
    """One oscillation primitive: value(theta) with theta = multiplier*omega*t + phase.

    All four kinds have period 2*pi in theta and zero mean over a period.
    The square wave is +1 on [0, pi) mod 2*pi and -1 on [pi, 2*pi) (right-limit
    convention at the jumps); the triangle is the sine-like ramp (2/pi)*asin(sin
    theta), peaking at +1 for theta = pi/2 and -1 for theta = 3*pi/2.
    """

    kind: str = "cosine"
    multiplier: int = 1
    phase: float = 0.0

    def __post_init__(self):
        if self.kind not in WAVE_KINDS:
            raise ConstraintViolation(f"unknown waveform kind {self.kind!r}")
        if int(self.multiplier) != self.multiplier or self.multiplier < 1:
            raise ConstraintViolation(f"multiplier must be a positive integer, got {self.multiplier}")
        object.__setattr__(self, "multiplier", int(self.multiplier))
        object.__setattr__(self, "phase", float(self.phase))

    @property
    def smooth(self) -> bool:
        return self.kind in ("cosine", "sine")

    def value(self, theta):
        """Evaluate the unit wave at angle theta (array-friendly)."""
        theta = np.asarray(theta, dtype=float)
        if self.kind == "cosine":
            return np.cos(theta)
        if self.kind == "sine":
            return np.sin(theta)
        if self.kind == "square":
            return np.where(np.mod(theta, TWO_PI) < np.pi, 1.0, -1.0)
        return (2.0 / np.pi) * np.arcsin(np.sin(theta))

    def at(self, t, omega: float):
        """Wave value at time t for fundamental frequency omega."""
        return self.value(self.multiplier * omega * np.asarray(t, dtype=float) + self.phase)

    def antiderivative_at(self, t, omega: float):
        """Closed-form integral of ``at`` from 0 to t; smooth kinds only."""
        if not self.smooth:
            raise NonSmoothWaveform(f"{self.kind} wave has no closed-form antiderivative here")
        k = self.multiplier * omega
        t = np.asarray(t, dtype=float)
        if self.kind == "cosine":
            return (np.sin(k * t + self.phase) - np.sin(self.phase)) / k
        return (np.cos(self.phase) - np.cos(k * t + self.phase)) / k


@dataclass(frozen=True)
class HarmonicTerm:
    """One oscillating payoff term: amplitude matrix times a unit wave."""

    amplitude: np.ndarray
    wave: Waveform = field(default_factory=Waveform)

    def __post_init__(self):
        object.__setattr__(self, "amplitude", as_payoff_matrix(self.amplitude))


@dataclass(frozen=True)
class PeriodicGame:
    """Zero-sum game with periodically varying payoffs, period 2*pi/omega."""

    mean: np.ndarray
    omega: float
    terms: tuple[HarmonicTerm, ...] = ()
    seed: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "mean", as_payoff_matrix(self.mean))
        object.__setattr__(self, "terms", tuple(self.terms))
        object.__setattr__(self, "omega", float(self.omega))
        if not (self.omega > 0 and np.isfinite(self.omega)):
            raise ConstraintViolation(f"omega must be positive and finite, got {self.omega}")
        for term in self.terms:
            if term.amplitude.shape != self.mean.shape:
                raise ConstraintViolation(
                    f"amplitude shape {term.amplitude.shape} != mean shape {self.mean.shape}")

    @property
    def shape(self) -> tuple[int, int]:
        return self.mean.shape

    @property
    def period(self) -> float:
        return TWO_PI / self.omega

    def payoff(self, t: float) -> np.ndarray:
        return evaluate_payoff(self, t)

    def with_omega(self, omega: float) -> "PeriodicGame":
        """Same harmonic structure at a different fundamental frequency."""
        return replace(self, omega=omega)


def evaluate_payoff(game: PeriodicGame, t: float) -> np.ndarray:
    """U(t) = mean + sum of amplitude * wave(multiplier*omega*t + phase)."""
    u = game.mean.copy()
    for term in game.terms:
        u += term.amplitude * term.wave.at(t, game.omega)
    return u


@dataclass(frozen=True)
class HarmonicScalar:
    """A scalar periodic signal in the same harmonic representation as a game entry.

    value(t) = mean + sum_k coef_k * wave_k(mult_k * omega * t + phase_k).
    ``integral`` gives F(t) = int_0^t value(s) ds in closed form per harmonic,
    available only when every wave is smooth (cosine/sine).
    """

    mean: float
    omega: float
    terms: tuple[tuple[float, Waveform], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "mean", float(self.mean))
        object.__setattr__(self, "omega", float(self.omega))
        object.__setattr__(self, "terms", tuple((float(c), w) for c, w in self.terms))
        if not (self.omega > 0 and np.isfinite(self.omega)):
            raise ConstraintViolation(f"omega must be positive and finite, got {self.omega}")

    @property
    def smooth(self) -> bool:
        return all(w.smooth for _, w in self.terms)

    def value(self, t):
        t = np.asarray(t, dtype=float)
        out = np.full(t.shape, self.mean)
        for coef, wave in self.terms:
            out += coef * wave.at(t, self.omega)
        return out if out.shape else float(out)

    def integral(self, t):
        """F(t) = mean*t + closed-form wave antiderivatives; smooth kinds only."""
        t = np.asarray(t, dtype=float)
        out = self.mean * t.astype(float)
        for coef, wave in self.terms:
            out = out + coef * wave.antiderivative_at(t, self.omega)
        return out if out.shape else float(out)

    def with_omega(self, omega: float) -> "HarmonicScalar":
        return replace(self, omega=omega)


@dataclass(frozen=True)
class PolymatrixGame:
    """Pairwise zero-sum games on a directed graph of players.

    Edge (i, j, game) makes player i the row player and player j the column
    player of ``game``; i receives x_i^T U(t) x_j and j receives the negation.
    """

    sizes: tuple[int, ...]
    edges: tuple[tuple[int, int, PeriodicGame], ...]

    def __post_init__(self):
        sizes = tuple(int(m) for m in self.sizes)
        object.__setattr__(self, "sizes", sizes)
        object.__setattr__(self, "edges", tuple(self.edges))
        if len(sizes) < 2:
            raise ConstraintViolation("polymatrix game needs >= 2 players")
        if any(m < 2 for m in sizes):
            raise ConstraintViolation("every player needs >= 2 actions")
        for i, j, game in self.edges:
            if i == j:
                raise ConstraintViolation(f"self-edge on player {i}")
            if not (0 <= i < len(sizes) and 0 <= j < len(sizes)):
                raise ConstraintViolation(f"edge ({i},{j}) references a missing player")
            if game.shape != (sizes[i], sizes[j]):
                raise ConstraintViolation(
                    f"edge ({i},{j}) game shape {game.shape} != ({sizes[i]},{sizes[j]})")

    @property
    def players(self) -> int:
        return len(self.sizes)

    @property
    def omega(self) -> float:
        """Common fundamental frequency; raises if the edges disagree."""
        omegas = {g.omega for _, _, g in self.edges}
        if len(omegas) != 1:
            raise ConstraintViolation(f"edges carry different omegas: {sorted(omegas)}")
        return omegas.pop()


def make_eigenvalue_invariant(mean, delta, omega: float) -> PeriodicGame:
    """2x2 cosine game whose cycling eigenvalue is constant in time.

    Requires delta_u11 - delta_u12 - delta_u21 + delta_u22 = 0 (tolerance
    1e-12): the oscillation then moves the equilibrium but not the eigenvalue.
    """
    mean = as_payoff_matrix(mean)
    delta = as_payoff_matrix(delta)
    if mean.shape != (2, 2) or delta.shape != (2, 2):
        raise ConstraintViolation("eigenvalue-invariant construction is 2x2 only")
    residual = delta[0, 0] - delta[0, 1] - delta[1, 0] + delta[1, 1]
    if abs(residual) > 1e-12:
        raise ConstraintViolation(
            f"amplitude violates the invariance constraint: residual {residual!r}")
    return PeriodicGame(mean=mean, omega=omega, terms=(HarmonicTerm(delta, Waveform("cosine")),))


def make_perturbed_game(mean, sigma: float, omega: float, seed: int) -> PeriodicGame:
    """Randomly perturbed periodic game with four dense harmonic terms.

    Every matrix entry receives four independent oscillation amplitudes, one
    per term cos(omega t), sin(omega t), cos(2 omega t), sin(2 omega t), drawn
    i.i.d. from N(0, sigma^2).  Sampling uses numpy's default_rng (PCG64 with
    ziggurat Gaussian sampling); amplitude matrices are drawn row-major in the
    fixed term order above, so a seed pins the game exactly.
    """
    mean = as_payoff_matrix(mean)
    if not (sigma >= 0 and np.isfinite(sigma)):
        raise ConstraintViolation(f"sigma must be finite and >= 0, got {sigma}")
    rng = np.random.default_rng(seed)
    waves = [Waveform("cosine", 1), Waveform("sine", 1), Waveform("cosine", 2), Waveform("sine", 2)]
    terms = tuple(HarmonicTerm(rng.normal(0.0, sigma, mean.shape), w) for w in waves)
    return PeriodicGame(mean=mean, omega=omega, terms=terms, seed=int(seed))


def make_three_player_pennies(omega: float) -> PolymatrixGame:
    """Three-player cyclic Matching Pennies with staggered oscillation amplitudes.

    Players X -> Y -> Z -> X each play Matching Pennies ((1,-1),(-1,1)) as the
    row player against the next, with diagonal cosine amplitudes diag(a, -a)
    for a = 1/10, 1/20, 1/30 on the three edges.  Each edge satisfies the
    eigenvalue-invariance constraint, so the pairwise eigenvalue is alpha = 2
    throughout; the cyclic coupling makes the joint dynamics cycle at
    sqrt(3)*alpha, which is where synchronization occurs.
    """
    mp = [[1.0, -1.0], [-1.0, 1.0]]
    edges = []
    for (i, j), a in zip(((0, 1), (1, 2), (2, 0)), (0.1, 0.05, 1.0 / 30.0)):
        game = make_eigenvalue_invariant(mp, [[a, 0.0], [0.0, -a]], omega)
        edges.append((i, j, game))
    return PolymatrixGame(sizes=(2, 2, 2), edges=tuple(edges))


# ---------------------------------------------------------------------------
# JSON serialization (the CLI's game-file format)

def game_to_dict(game: PeriodicGame) -> dict:
    out = {
        "mean": game.mean.tolist(),
        "omega": game.omega,
        "terms": [
            {
                "amplitude": term.amplitude.tolist(),
                "kind": term.wave.kind,
                "multiplier": term.wave.multiplier,
                "phase": term.wave.phase,
            }
            for term in game.terms
        ],
    }
    if game.seed is not None:
        out["seed"] = game.seed
    return out


def game_from_dict(data: dict) -> PeriodicGame:
    try:
        terms = tuple(
            HarmonicTerm(
                np.asarray(t["amplitude"], dtype=float),
                Waveform(t.get("kind", "cosine"), t.get("multiplier", 1), t.get("phase", 0.0)),
            )
            for t in data.get("terms", ())
        )
        return PeriodicGame(
            mean=np.asarray(data["mean"], dtype=float),
            omega=float(data["omega"]),
            terms=terms,
            seed=data.get("seed"),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ConstraintViolation(f"bad game definition: {exc}") from exc


def polymatrix_to_dict(pg: PolymatrixGame) -> dict:
    return {
        "players": pg.players,
        "sizes": list(pg.sizes),
        "edges": [
            {"row": i, "col": j, "game": game_to_dict(game)} for i, j, game in pg.edges
        ],
    }


def polymatrix_from_dict(data: dict) -> PolymatrixGame:
    try:
        edges = tuple(
            (int(e["row"]), int(e["col"]), game_from_dict(e["game"])) for e in data["edges"]
        )
        if "sizes" in data:
            sizes = tuple(int(m) for m in data["sizes"])
        else:
            # infer from edge shapes
            sizes_map: dict[int, int] = {}
            for i, j, game in edges:
                sizes_map[i] = game.shape[0]
                sizes_map[j] = game.shape[1]
            sizes = tuple(sizes_map[i] for i in range(int(data["players"])))
        return PolymatrixGame(sizes=sizes, edges=edges)
    except (KeyError, TypeError, ValueError) as exc:
        raise ConstraintViolation(f"bad polymatrix definition: {exc}") from exc


def load_game_file(path) -> PeriodicGame | PolymatrixGame:
    """Load a game JSON file; polymatrix files are recognized by a 'players' key."""
    with open(path) as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConstraintViolation(f"{path}: invalid JSON: {exc}") from exc
    if "players" in data:
        return polymatrix_from_dict(data)
    return game_from_dict(data)


def save_game_file(game, path) -> None:
    data = polymatrix_to_dict(game) if isinstance(game, PolymatrixGame) else game_to_dict(game)
    with open(path, "w") as fh:
        json.dump(data, fh, indent=2, sort_keys=True)
        fh.write("\n")
