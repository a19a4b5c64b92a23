"""Command-line experiment harness.

Subcommands map onto the standard experiments:

* ``trajectory``: integrate one game and write the sampled run plus a
  summary (spectrum, classification, extrema, averages, verdict).
* ``sweep``: batch-integrate over a frequency grid and write the sweep
  CSV/JSON (extrema, averages, verdicts, analytic terms per row).
* ``polymatrix``: integrate a game network and classify amplitude growth.
* ``spectrum``: print a game's learning eigenvalues as JSON.
* ``limits``: print the analytic divergence rate or average limit.

Exit codes: 0 success, 1 configuration error, 2 numerical abort.
All outputs are deterministic for a fixed config and seed; reruns produce
byte-identical files.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .analysis import (amplitude_extrema, classify_growth, classify_resonance,
                       convergence_verdict, default_initial_profile,
                       deviation_series, divergence_term, nonresonant_limit,
                       run_omega_sweep, sweep_records_to_dicts, time_average,
                       write_sweep_csv, write_sweep_json, RESONANCE_TOL)
from .dynamics import (DualState, StrategyProfile, default_stride,
                       interior_integrate, polymatrix_integrate,
                       projected_integrate, build_linear_blocks_poly)
from .errors import ConfigError, ConstraintViolation, PeriodicGamesError
from .games import (PeriodicGame, PolymatrixGame, game_from_dict,
                    game_to_dict, polymatrix_from_dict, polymatrix_to_dict)
from .presets import PRESET_NAMES, fig3_game, preset_config, resonance_grid
from .spectrum import (game_spectrum, imaginary_spectrum,
                       interior_equilibrium, scalar_decomposition)

_MAX_STORED_SAMPLES = 200_000


def _load_json(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}")
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}")


def _base_config(args) -> dict:
    if getattr(args, "preset", None) and getattr(args, "config", None):
        raise ConfigError("pass either --preset or --config, not both")
    if getattr(args, "preset", None):
        config = preset_config(args.preset)
        if args.seed is not None and args.preset.startswith("fig3"):
            m = 3 if args.preset.endswith("3x3") else 6
            config["game"] = game_to_dict(fig3_game(m, seed=args.seed))
        if args.seed is not None:
            config["seed"] = args.seed
        return config
    if getattr(args, "config", None):
        config = _load_json(args.config)
        if not isinstance(config, dict):
            raise ConfigError("config root must be a JSON object")
        if args.seed is not None:
            config["seed"] = args.seed
        return config
    raise ConfigError("one of --preset or --config is required")


def _resolve_game(config: dict):
    ref = config.get("game")
    if ref is None:
        raise ConfigError("config key 'game' is missing")
    if isinstance(ref, str):
        ref = _load_json(ref)
    if not isinstance(ref, dict):
        raise ConfigError("config key 'game' must be a dict or a file path")
    try:
        if "players" in ref or "edges" in ref:
            return polymatrix_from_dict(ref)
        return game_from_dict(ref)
    except PeriodicGamesError as exc:
        raise ConfigError(f"invalid game description: {exc}")


def _apply_overrides(config: dict, args) -> dict:
    if getattr(args, "t_end", None) is not None:
        config["t_end"] = args.t_end
    if getattr(args, "step", None) is not None:
        config["step"] = args.step
    grid = dict(config.get("omega_grid", {}))
    for key, flag in (("start", "omega_start"), ("stop", "omega_stop"),
                      ("count", "omega_count")):
        value = getattr(args, flag, None)
        if value is not None:
            grid[key] = value
    if grid:
        config["omega_grid"] = grid
    return config


def _defaults(config: dict, command: str) -> tuple[float, float]:
    projected = config.get("integrator") == "projected"
    t_end = float(config.get("t_end", 1.0e4 if projected else 3.0e4))
    step = float(config.get("step", 1.0 / 4000.0 if projected else 1.0 / 40.0))
    if t_end <= 0 or step <= 0:
        raise ConfigError("t_end and step must be positive")
    del command
    return t_end, step


def _check_command(config: dict, command: str) -> None:
    declared = config.get("command")
    if declared is not None and declared != command:
        raise ConfigError(
            f"config declares command {declared!r}, invoked as {command!r}")


def _out_prefix(args, config: dict, fallback: str) -> Path:
    prefix = args.out or config.get("output") or fallback
    prefix = Path(prefix)
    if prefix.parent != Path("."):
        prefix.parent.mkdir(parents=True, exist_ok=True)
    return prefix


def _initial_profile(config: dict, game: PeriodicGame) -> StrategyProfile:
    spec = config.get("initial")
    if spec is None:
        return default_initial_profile(game)
    if not isinstance(spec, dict) or "x" not in spec or "y" not in spec:
        raise ConfigError("initial must be {\"x\": [...], \"y\": [...]}")
    try:
        return StrategyProfile(np.asarray(spec["x"], dtype=float),
                               np.asarray(spec["y"], dtype=float))
    except ConstraintViolation as exc:
        raise ConfigError(f"invalid initial profile: {exc}")


def _stride(config: dict, t_end: float, step: float) -> int:
    n_steps = int(round(t_end / step))
    auto = max(default_stride(t_end),
               int(np.ceil(n_steps / _MAX_STORED_SAMPLES)))
    stride = int(config.get("stride", auto))
    if stride < 1:
        raise ConfigError("stride must be >= 1")
    return stride


def _convergence(config: dict) -> tuple[float, float]:
    conv = config.get("convergence", {})
    return float(conv.get("window", 100.0)), float(conv.get("tol", 1.0e-3))


def _write_json(payload: dict, path: Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _spectrum_dict(spec) -> dict:
    return {"alphas": list(spec.alphas),
            "realness_residual": spec.realness_residual}


def _run_trajectory(args) -> int:
    config = _apply_overrides(_base_config(args), args)
    _check_command(config, "trajectory")
    game = _resolve_game(config)
    if not isinstance(game, PeriodicGame):
        raise ConfigError("trajectory needs a two-player game; "
                          "use the polymatrix subcommand for networks")
    t_end, step = _defaults(config, "trajectory")
    stride = _stride(config, t_end, step)
    window, tol = _convergence(config)
    integrator = config.get("integrator", "interior")
    initial = _initial_profile(config, game)
    if integrator == "interior":
        traj = interior_integrate(game, initial, t_end, h=step, stride=stride)
    elif integrator == "projected":
        dual0 = DualState(initial.x, initial.y)
        traj = projected_integrate(game, dual0, t_end, h=step, stride=stride)
    else:
        raise ConfigError(f"unknown integrator {integrator!r}")
    prefix = _out_prefix(args, config, "trajectory")
    csv_path = Path(str(prefix) + "_trajectory.csv")
    traj.write_csv(csv_path)
    spec = game_spectrum(game)
    cls = classify_resonance(spec, game.omega)
    series = time_average(traj)
    extrema = amplitude_extrema(traj)
    converged = None
    if series.times[-1] - series.times[0] >= window:
        converged = convergence_verdict(series, window, tol)
    try:
        eq = interior_equilibrium(game.mean)
        eq_payload = {"x": list(eq[0]), "y": list(eq[1])}
    except PeriodicGamesError:
        eq_payload = None
    summary = {
        "command": "trajectory",
        "game": game_to_dict(game),
        "integrator": integrator,
        "t_end": t_end,
        "step": step,
        "stride": stride,
        "seed": config.get("seed"),
        "omega": game.omega,
        "spectrum": _spectrum_dict(spec),
        "resonant": cls.resonant,
        "ratios": list(cls.ratios),
        "equilibrium": eq_payload,
        "initial": list(initial.stacked),
        "final_average": [float(v) for v in series.averages[-1]],
        "avg_x": float(series.averages[-1, 0]),
        "avg_y": float(series.averages[-1, game.shape[0]]),
        "x_max": float(extrema.max_values[0]),
        "x_min": float(extrema.min_values[0]),
        "boundary_touched": extrema.boundary_touched,
        "converged": converged,
        "convergence": {"window": window, "tol": tol},
        "aborted": traj.aborted,
        "t_abort": traj.t_abort,
        "samples": len(traj),
        "outputs": {"trajectory_csv": csv_path.name},
    }
    _write_json(summary, Path(str(prefix) + "_summary.json"))
    return 2 if traj.aborted else 0


def _grid_from_config(config: dict, game: PeriodicGame) -> np.ndarray:
    grid = config.get("omega_grid")
    if not grid:
        raise ConfigError("sweep needs an omega_grid "
                          "{start, stop, count[, scale, snap]}")
    scale = grid.get("scale", "linear")
    if scale != "linear":
        raise ConfigError(f"unsupported omega_grid scale {scale!r}")
    try:
        start = float(grid["start"])
        stop = float(grid["stop"])
        count = int(grid["count"])
    except KeyError as exc:
        raise ConfigError(f"omega_grid is missing key {exc}")
    if count < 1 or start <= 0 or (count > 1 and stop <= start):
        raise ConfigError("need 0 < start < stop and count >= 1")
    if count == 1:
        return np.array([start])
    if grid.get("snap", True):
        alphas = game_spectrum(game).nonzero
        return resonance_grid(start, stop, count, alphas)
    return np.linspace(start, stop, count)


def _run_sweep(args) -> int:
    config = _apply_overrides(_base_config(args), args)
    _check_command(config, "sweep")
    game = _resolve_game(config)
    if not isinstance(game, PeriodicGame):
        raise ConfigError("sweep needs a two-player game")
    t_end, step = _defaults(config, "sweep")
    window, tol = _convergence(config)
    integrator = config.get("integrator", "interior")
    omegas = _grid_from_config(config, game)
    initial = _initial_profile(config, game)
    records = run_omega_sweep(game, omegas, t_end, step=step, window=window,
                              tol=tol, integrator=integrator, initial=initial,
                              jobs=args.jobs)
    prefix = _out_prefix(args, config, "sweep")
    csv_path = Path(str(prefix) + "_sweep.csv")
    write_sweep_csv(records, csv_path)
    json_path = Path(str(prefix) + "_sweep.json")
    write_sweep_json(records, json_path)
    spec = game_spectrum(game)
    summary = {
        "command": "sweep",
        "game": game_to_dict(game),
        "integrator": integrator,
        "t_end": t_end,
        "step": step,
        "seed": config.get("seed"),
        "omega_grid": {"start": float(omegas[0]), "stop": float(omegas[-1]),
                       "count": int(omegas.size)},
        "convergence": {"window": window, "tol": tol},
        "spectrum": _spectrum_dict(spec),
        "n_converged": sum(r.converged for r in records),
        "n_resonant": sum(r.resonant for r in records),
        "statuses": sorted({r.status for r in records}),
        "outputs": {"sweep_csv": csv_path.name, "sweep_json": json_path.name},
    }
    _write_json(summary, Path(str(prefix) + "_summary.json"))
    return 0


def _initial_poly(config: dict, pg: PolymatrixGame) -> list[np.ndarray]:
    spec = config.get("initial")
    if spec is None:
        return [np.full(m, 1.0 / m) for m in pg.sizes]
    if not isinstance(spec, list) or len(spec) != pg.players:
        raise ConfigError("initial must be a list with one vector per player")
    return [np.asarray(v, dtype=float) for v in spec]


def _run_polymatrix(args) -> int:
    config = _apply_overrides(_base_config(args), args)
    _check_command(config, "polymatrix")
    pg = _resolve_game(config)
    if not isinstance(pg, PolymatrixGame):
        raise ConfigError("polymatrix needs a game network "
                          "(JSON with players/edges)")
    t_end, step = _defaults(config, "polymatrix")
    stride = _stride(config, t_end, step)
    initial = _initial_poly(config, pg)
    traj = polymatrix_integrate(pg, initial, t_end, h=step, stride=stride)
    prefix = _out_prefix(args, config, "polymatrix")
    csv_path = Path(str(prefix) + "_trajectory.csv")
    traj.write_csv(csv_path)
    spec = imaginary_spectrum(build_linear_blocks_poly(pg).lbar)
    cls = classify_resonance(spec, pg.omega)
    deviations = deviation_series(traj, traj.states[0])
    period = 2.0 * np.pi / pg.omega
    growth = classify_growth(traj.times, deviations, period)
    summary = {
        "command": "polymatrix",
        "game": polymatrix_to_dict(pg),
        "t_end": t_end,
        "step": step,
        "stride": stride,
        "seed": config.get("seed"),
        "omega": pg.omega,
        "spectrum": _spectrum_dict(spec),
        "resonant": cls.resonant,
        "ratios": list(cls.ratios),
        "max_deviation": float(deviations.max()),
        "growth": {"slope": growth.slope, "r_squared": growth.r_squared,
                   "level": growth.level, "growing": growth.growing},
        "aborted": traj.aborted,
        "t_abort": traj.t_abort,
        "samples": len(traj),
        "outputs": {"trajectory_csv": csv_path.name},
    }
    _write_json(summary, Path(str(prefix) + "_summary.json"))
    return 2 if traj.aborted else 0


def _run_spectrum(args) -> int:
    config = _base_config(args)
    if "game" not in config and ("mean" in config or "edges" in config
                                 or "players" in config):
        config = {"game": config}
    game = _resolve_game(config)
    if isinstance(game, PolymatrixGame):
        spec = imaginary_spectrum(build_linear_blocks_poly(game).lbar)
        omega = game.omega
    else:
        spec = game_spectrum(game)
        omega = game.omega
    cls = classify_resonance(spec, omega)
    payload = _spectrum_dict(spec)
    payload["omega"] = omega
    payload["ratios"] = list(cls.ratios)
    payload["resonant"] = cls.resonant
    print(json.dumps(payload, indent=2, sort_keys=True))
    return 0


def _run_limits(args) -> int:
    config = _base_config(args)
    if "game" not in config and "mean" in config:
        config = {"game": config}
    game = _resolve_game(config)
    if not isinstance(game, PeriodicGame) or game.shape != (2, 2):
        raise ConfigError("limits apply to 2x2 two-player games")
    omega = args.omega if args.omega is not None else game.omega
    if omega <= 0:
        raise ConfigError("omega must be positive")
    sc = scalar_decomposition(game.with_omega(omega))
    if not sc.smooth:
        raise ConfigError("analytic limits need harmonic (smooth) payoffs")
    ratio = abs(sc.mean_alpha) / omega
    near = round(ratio)
    payload: dict = {"omega": omega, "ratio": ratio}
    if near >= 1 and abs(ratio - near) <= 1e-9:
        div = divergence_term(sc, int(near))
        payload.update(kind="divergence", n=int(near),
                       div_x=div[0], div_y=div[1])
    elif abs(ratio - near) >= RESONANCE_TOL or near < 1:
        lim = nonresonant_limit(sc, ratio)
        payload.update(kind="limit", limit_x=lim[0], limit_y=lim[1])
    else:
        payload.update(kind="near-resonant")
    print(json.dumps(payload, indent=2, sort_keys=True))
    return 0


def _add_common(parser: argparse.ArgumentParser, grid: bool) -> None:
    parser.add_argument("--config", help="experiment config JSON path")
    parser.add_argument("--preset", choices=PRESET_NAMES,
                        help="built-in experiment name")
    parser.add_argument("--out", help="output path prefix")
    parser.add_argument("--jobs", type=int, default=None,
                        help="parallel integration bound (sweeps)")
    parser.add_argument("--seed", type=int, default=None,
                        help="seed recorded in outputs; regenerates "
                             "fig3 preset games")
    parser.add_argument("--t-end", type=float, default=None, dest="t_end")
    parser.add_argument("--step", type=float, default=None)
    if grid:
        parser.add_argument("--omega-start", type=float, default=None,
                            dest="omega_start")
        parser.add_argument("--omega-stop", type=float, default=None,
                            dest="omega_stop")
        parser.add_argument("--omega-count", type=int, default=None,
                            dest="omega_count")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pgames",
        description="Simulate and analyze learning in periodic zero-sum games")
    sub = parser.add_subparsers(dest="subcommand", required=True)
    p_traj = sub.add_parser("trajectory", help="integrate one game")
    _add_common(p_traj, grid=False)
    p_sweep = sub.add_parser("sweep", help="integrate over a frequency grid")
    _add_common(p_sweep, grid=True)
    p_poly = sub.add_parser("polymatrix", help="integrate a game network")
    _add_common(p_poly, grid=False)
    p_spec = sub.add_parser("spectrum", help="print learning eigenvalues")
    _add_common(p_spec, grid=False)
    p_lim = sub.add_parser("limits", help="print analytic average limits")
    _add_common(p_lim, grid=False)
    p_lim.add_argument("--omega", type=float, default=None,
                       help="frequency (defaults to the game's)")
    return parser


_RUNNERS = {
    "trajectory": _run_trajectory,
    "sweep": _run_sweep,
    "polymatrix": _run_polymatrix,
    "spectrum": _run_spectrum,
    "limits": _run_limits,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 1
    try:
        return _RUNNERS[args.subcommand](args)
    except (ConfigError, ConstraintViolation) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except PeriodicGamesError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
