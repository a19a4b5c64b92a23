"""Numerical integration of the learning dynamics.

Three integration paths share one RK4 discretization:

* interior: the unconstrained linear field on concatenated strategies,
  dx/dt = P_X U(t) y, dy/dt = -P_Y U(t)^T x.
* projected: the boundary-constrained flow on dual (cumulative-gradient)
  variables; emitted strategies are Euclidean simplex projections.
* polymatrix: the interior field summed over the edges of a network of
  pairwise zero-sum games.

``rk4_integrate`` is the plain reference integrator over an arbitrary field
callable.  The ``*_integrate`` front-ends assemble the specific fields and
run the compiled kernels in :mod:`periodicgames._kernels`, which produce
identical step sequences (same order of operations) at much higher speed.

Square-wave payoffs are evaluated pointwise with no event detection; the
local error near a jump is O(h) but confined to one step per jump.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from . import _kernels
from .errors import ConstraintViolation
from .games import WAVE_CODES, PeriodicGame, PolymatrixGame
from .spectrum import assemble_operator, centering_projection

SIMPLEX_TOL = 1e-9

#: default step sizes: generic runs and boundary (projected) runs
DEFAULT_STEP = 1.0 / 40.0
DEFAULT_PROJECTED_STEP = 1.0 / 4000.0


def _as_prob_vector(v, name: str) -> np.ndarray:
    arr = np.asarray(v, dtype=float)
    if arr.ndim != 1 or arr.size < 2:
        raise ConstraintViolation(f"{name} must be a 1-D vector of length >= 2")
    if not np.all(np.isfinite(arr)):
        raise ConstraintViolation(f"{name} has non-finite entries")
    if arr.min() < -SIMPLEX_TOL:
        raise ConstraintViolation(f"{name} has negative entries: min={arr.min()}")
    if abs(arr.sum() - 1.0) > SIMPLEX_TOL:
        raise ConstraintViolation(f"{name} does not sum to 1: sum={arr.sum()!r}")
    arr = arr.copy()
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class StrategyProfile:
    """A pair of mixed strategies, one per player, each on the simplex."""

    x: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "x", _as_prob_vector(self.x, "x"))
        object.__setattr__(self, "y", _as_prob_vector(self.y, "y"))

    @property
    def stacked(self) -> np.ndarray:
        return np.concatenate([self.x, self.y])


@dataclass(frozen=True)
class DualState:
    """Unconstrained cumulative-gradient variables, one block per player."""

    x_dag: np.ndarray
    y_dag: np.ndarray

    def __post_init__(self):
        for name in ("x_dag", "y_dag"):
            arr = np.asarray(getattr(self, name), dtype=float)
            if arr.ndim != 1 or not np.all(np.isfinite(arr)):
                raise ConstraintViolation(f"{name} must be a finite 1-D vector")
            arr = arr.copy()
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)

    @property
    def stacked(self) -> np.ndarray:
        return np.concatenate([self.x_dag, self.y_dag])


@dataclass(frozen=True)
class Trajectory:
    """Uniformly sampled states of one integration run.

    ``states`` holds one concatenated state per row; ``sizes`` gives the
    per-player block lengths.  For projected runs the rows are the emitted
    strategies and ``duals`` carries the underlying dual variables.  When an
    integration aborted on a non-finite state, ``aborted`` is set and the
    samples cover only the valid prefix (``t_abort`` is the last valid
    sample time).
    """

    t0: float
    dt: float
    states: np.ndarray
    sizes: tuple[int, ...]
    duals: np.ndarray | None = None
    aborted: bool = False
    t_abort: float | None = None

    def __post_init__(self):
        states = np.asarray(self.states, dtype=float)
        if states.ndim != 2 or states.shape[0] == 0:
            raise ConstraintViolation("states must be a non-empty 2-D array")
        if sum(self.sizes) != states.shape[1]:
            raise ConstraintViolation(
                f"sizes {self.sizes} do not add up to state width {states.shape[1]}")
        if self.dt <= 0:
            raise ConstraintViolation("dt must be positive")
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "sizes", tuple(int(m) for m in self.sizes))

    def __len__(self) -> int:
        return self.states.shape[0]

    @property
    def times(self) -> np.ndarray:
        return self.t0 + self.dt * np.arange(self.states.shape[0])

    @property
    def t_end(self) -> float:
        return self.t0 + self.dt * (self.states.shape[0] - 1)

    def player(self, i: int) -> np.ndarray:
        """Sample series of player i's strategy block, shape (n, sizes[i])."""
        off = sum(self.sizes[:i])
        return self.states[:, off:off + self.sizes[i]]

    @property
    def x(self) -> np.ndarray:
        return self.player(0)

    @property
    def y(self) -> np.ndarray:
        if len(self.sizes) != 2:
            raise ConstraintViolation("y is defined for two-player trajectories")
        return self.player(1)

    def profile(self, k: int) -> StrategyProfile:
        """Sample k as a StrategyProfile (two-player runs).

        Interior trajectories can leave the simplex (that is the phenomenon);
        such samples fail profile validation, so use ``x``/``y`` for raw
        series and this accessor only where feasibility is expected.
        """
        if len(self.sizes) != 2:
            raise ConstraintViolation("profiles are defined for two-player runs")
        return StrategyProfile(self.x[k], self.y[k])

    def write_csv(self, path) -> None:
        """Write `t,x_1..,y_1..` (two players) or `t,p1_1..,p2_1..,...`."""
        if len(self.sizes) == 2:
            names = [f"x_{j + 1}" for j in range(self.sizes[0])]
            names += [f"y_{j + 1}" for j in range(self.sizes[1])]
        else:
            names = [f"p{i + 1}_{j + 1}"
                     for i, m in enumerate(self.sizes) for j in range(m)]
        times = self.times
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("t," + ",".join(names) + "\n")
            for k in range(self.states.shape[0]):
                row = [format(times[k], ".17g")]
                row += [format(v, ".17g") for v in self.states[k]]
                fh.write(",".join(row) + "\n")


def _split_state(state) -> tuple[np.ndarray, np.ndarray]:
    if isinstance(state, StrategyProfile):
        return state.x, state.y
    if isinstance(state, DualState):
        return state.x_dag, state.y_dag
    x, y = state
    return np.asarray(x, dtype=float), np.asarray(y, dtype=float)


def interior_field(game: PeriodicGame, state, t: float
                   ) -> tuple[np.ndarray, np.ndarray]:
    """Interior learning field: (P_X U(t) y, -P_Y U(t)^T x).

    ``state`` may be a StrategyProfile or a plain (x, y) pair; the field is
    linear so it is well defined off the simplex too.  Both components sum
    to zero exactly up to rounding.
    """
    x, y = _split_state(state)
    u = game.payoff(t)
    px = centering_projection(u.shape[0])
    py = centering_projection(u.shape[1])
    return px @ (u @ y), -(py @ (u.T @ x))


def simplex_project(v) -> np.ndarray:
    """Euclidean projection onto the probability simplex (sort/cumsum)."""
    arr = np.asarray(v, dtype=float)
    if arr.ndim != 1 or not np.all(np.isfinite(arr)):
        raise ConstraintViolation("input must be a finite 1-D vector")
    srt = np.sort(arr)[::-1]
    csum = np.cumsum(srt) - 1.0
    idx = np.arange(1, arr.size + 1)
    cands = csum / idx
    rho = np.nonzero(srt - cands > 0.0)[0][-1]
    return np.maximum(arr - cands[rho], 0.0)


def projected_field(game: PeriodicGame, dual, t: float
                    ) -> tuple[np.ndarray, np.ndarray]:
    """Dual field: (U(t) proj(y_dag), -U(t)^T proj(x_dag))."""
    xd, yd = _split_state(dual)
    u = game.payoff(t)
    return u @ simplex_project(yd), -(u.T @ simplex_project(xd))


def default_stride(span: float) -> int:
    """Sampling stride: every step up to spans of 1e3, every 10th beyond."""
    return 1 if span <= 1.0e3 else 10


def rk4_integrate(field: Callable[[float, np.ndarray], np.ndarray],
                  initial, t0: float, t1: float, h: float,
                  stride: int = 1, sizes: tuple[int, ...] | None = None
                  ) -> Trajectory:
    """Classical RK4 over an arbitrary field callable (reference path).

    ``field(t, s)`` returns ds/dt for the concatenated state ``s``;
    ``initial`` may be an array, StrategyProfile, or DualState.  Integrates
    round((t1 - t0)/h) steps, so the final time is within h of t1.  A
    non-finite state aborts the run, keeping the valid prefix.
    """
    if h <= 0:
        raise ConstraintViolation("step must be positive")
    if not t1 > t0:
        raise ConstraintViolation("t1 must exceed t0")
    if isinstance(initial, (StrategyProfile, DualState)):
        first, second = _split_state(initial)
        if sizes is None:
            sizes = (first.size, second.size)
        s = initial.stacked.copy()
    else:
        s = np.array(initial, dtype=float).ravel()
    if sizes is None:
        sizes = (s.size,)
    n_steps = max(1, int(round((t1 - t0) / h)))
    samples = [s.copy()]
    aborted = False
    t_abort = None
    for i in range(n_steps):
        t = t0 + i * h
        k1 = np.asarray(field(t, s))
        k2 = np.asarray(field(t + 0.5 * h, s + (0.5 * h) * k1))
        k3 = np.asarray(field(t + 0.5 * h, s + (0.5 * h) * k2))
        k4 = np.asarray(field(t + h, s + h * k3))
        s_next = s + (h / 6.0) * (k1 + 2.0 * (k2 + k3) + k4)
        if not np.all(np.isfinite(s_next)):
            aborted = True
            t_abort = t
            break
        s = s_next
        if (i + 1) % stride == 0:
            samples.append(s.copy())
    return Trajectory(t0=t0, dt=h * stride, states=np.array(samples),
                      sizes=tuple(sizes), aborted=aborted, t_abort=t_abort)


@dataclass(frozen=True)
class LinearBlocks:
    """The interior field as ds/dt = (lbar + sum_k w_k(t) lks[k]) s."""

    lbar: np.ndarray
    lks: np.ndarray
    kinds: np.ndarray
    mults: np.ndarray
    phases: np.ndarray


def build_linear_blocks(game: PeriodicGame) -> LinearBlocks:
    """Assemble the linear interior field of a two-player periodic game."""
    lbar = assemble_operator(game.mean)
    d = lbar.shape[0]
    lks = np.zeros((len(game.terms), d, d))
    kinds = np.zeros(len(game.terms), dtype=np.int64)
    mults = np.zeros(len(game.terms))
    phases = np.zeros(len(game.terms))
    for k, term in enumerate(game.terms):
        lks[k] = assemble_operator(term.amplitude)
        kinds[k] = WAVE_CODES[term.wave.kind]
        mults[k] = float(term.wave.multiplier)
        phases[k] = term.wave.phase
    return LinearBlocks(lbar, lks, kinds, mults, phases)


def build_linear_blocks_poly(pg: PolymatrixGame) -> LinearBlocks:
    """Assemble the summed interior field of a polymatrix game.

    Each edge (i, j) adds +P_i U(t) into player i's rows against player j's
    block and -P_j U(t)^T into player j's rows against player i's block.
    All edge games share one fundamental frequency (validated by pg.omega).
    """
    pg.omega  # raises unless the edge frequencies agree
    offsets = np.concatenate([[0], np.cumsum(pg.sizes)])
    d = int(offsets[-1])
    lbar = np.zeros((d, d))
    lk_list = []
    kinds_list = []
    mults_list = []
    phases_list = []
    for i, j, sub in pg.edges:
        pi = centering_projection(pg.sizes[i])
        pj = centering_projection(pg.sizes[j])
        ri, rj = offsets[i], offsets[j]
        mi, mj = pg.sizes[i], pg.sizes[j]
        lbar[ri:ri + mi, rj:rj + mj] += pi @ sub.mean
        lbar[rj:rj + mj, ri:ri + mi] += -(pj @ sub.mean.T)
        for term in sub.terms:
            lk = np.zeros((d, d))
            lk[ri:ri + mi, rj:rj + mj] = pi @ term.amplitude
            lk[rj:rj + mj, ri:ri + mi] = -(pj @ term.amplitude.T)
            lk_list.append(lk)
            kinds_list.append(WAVE_CODES[term.wave.kind])
            mults_list.append(float(term.wave.multiplier))
            phases_list.append(term.wave.phase)
    lks = np.array(lk_list) if lk_list else np.zeros((0, d, d))
    return LinearBlocks(lbar, lks,
                        np.array(kinds_list, dtype=np.int64),
                        np.array(mults_list, dtype=float),
                        np.array(phases_list, dtype=float))


def _trim_valid(samples: np.ndarray, n_rows: int) -> tuple[np.ndarray, bool]:
    """Keep the finite prefix of the first n_rows samples."""
    samples = samples[:n_rows]
    finite = np.all(np.isfinite(samples), axis=1)
    if finite.all():
        return samples, False
    first_bad = int(np.argmin(finite))
    return samples[:max(first_bad, 1)], True


def _kernel_trajectory(blocks: LinearBlocks, omega: float, s0: np.ndarray,
                       t0: float, t1: float, h: float, stride: int,
                       sizes: tuple[int, ...]) -> Trajectory:
    n_steps = max(1, int(round((t1 - t0) / h)))
    samples, n_done = _kernels.linear_trajectory(
        blocks.lbar, blocks.lks, blocks.kinds, blocks.mults, blocks.phases,
        omega, s0, t0, h, n_steps, stride)
    states, trimmed = _trim_valid(samples, n_done // stride + 1)
    aborted = trimmed or n_done < n_steps
    t_abort = t0 + (states.shape[0] - 1) * h * stride if aborted else None
    return Trajectory(t0=t0, dt=h * stride, states=states, sizes=sizes,
                      aborted=aborted, t_abort=t_abort)


def interior_integrate(game: PeriodicGame, initial, t1: float,
                       t0: float = 0.0, h: float = DEFAULT_STEP,
                       stride: int | None = None) -> Trajectory:
    """RK4 on the interior field (compiled path).

    Produces the same step sequence as ``rk4_integrate`` over
    ``interior_field`` up to rounding in the wave-angle recurrence.
    """
    x0, y0 = _split_state(initial)
    if stride is None:
        stride = default_stride(t1 - t0)
    blocks = build_linear_blocks(game)
    s0 = np.concatenate([x0, y0])
    return _kernel_trajectory(blocks, game.omega, s0, t0, t1, h, stride,
                              game.shape)


def polymatrix_integrate(pg: PolymatrixGame, initial: Sequence, t1: float,
                         t0: float = 0.0, h: float = DEFAULT_STEP,
                         stride: int | None = None) -> Trajectory:
    """RK4 on the summed interior field of a polymatrix game."""
    if len(initial) != pg.players:
        raise ConstraintViolation(
            f"need {pg.players} initial strategies, got {len(initial)}")
    parts = [np.asarray(v, dtype=float) for v in initial]
    for v, m in zip(parts, pg.sizes):
        if v.shape != (m,):
            raise ConstraintViolation("initial strategy lengths must match sizes")
    if stride is None:
        stride = default_stride(t1 - t0)
    blocks = build_linear_blocks_poly(pg)
    s0 = np.concatenate(parts)
    return _kernel_trajectory(blocks, pg.omega, s0, t0, t1, h, stride,
                              pg.sizes)


def _term_arrays(game: PeriodicGame):
    amps = np.array([t.amplitude for t in game.terms]) if game.terms \
        else np.zeros((0,) + game.shape)
    kinds = np.array([WAVE_CODES[t.wave.kind] for t in game.terms],
                     dtype=np.int64)
    mults = np.array([float(t.wave.multiplier) for t in game.terms])
    phases = np.array([t.wave.phase for t in game.terms])
    return amps, kinds, mults, phases


def projected_integrate(game: PeriodicGame, initial_dual, t1: float,
                        t0: float = 0.0, h: float = DEFAULT_PROJECTED_STEP,
                        stride: int | None = None) -> Trajectory:
    """Boundary-constrained run: RK4 on duals, strategies by projection.

    The stored states are the emitted strategies (always inside the
    simplices, boundary included); ``duals`` carries the integrated state.
    """
    xd, yd = _split_state(initial_dual)
    if stride is None:
        stride = default_stride(t1 - t0)
    amps, kinds, mults, phases = _term_arrays(game)
    dual0 = np.concatenate([xd, yd])
    n_steps = max(1, int(round((t1 - t0) / h)))
    strat, duals, n_done = _kernels.projected_trajectory(
        game.mean, amps, kinds, mults, phases, game.omega, dual0, t0, h,
        n_steps, stride)
    n_rows = n_done // stride + 1
    states, trimmed = _trim_valid(strat, n_rows)
    aborted = trimmed or n_done < n_steps
    t_abort = t0 + (states.shape[0] - 1) * h * stride if aborted else None
    return Trajectory(t0=t0, dt=h * stride, states=states, sizes=game.shape,
                      duals=duals[:states.shape[0]], aborted=aborted,
                      t_abort=t_abort)
