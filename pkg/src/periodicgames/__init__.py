"""Learning dynamics in periodically varying zero-sum matrix games.

Simulates continuous-time gradient descent-ascent (Euclidean
follow-the-regularized-leader) when payoff matrices oscillate in time, and
provides the analytic machinery around the central phenomenon: trajectories
and time-averages synchronize with the payoff oscillation and diverge when
a learning eigenvalue is an integer multiple of the game frequency, while
all other frequency ratios keep the classic time-average convergence.
"""

from .analysis import (AmplitudeExtrema, GrowthFit, LinearFit,
                       ResonanceClass, SweepRecord, TimeAverageSeries,
                       amplitude_extrema, classify_growth, classify_resonance,
                       convergence_verdict, default_initial_profile,
                       deviation_series, divergence_term, envelope_maxima,
                       fit_linear, nonresonant_limit, resonant_average_cycle,
                       run_omega_sweep, time_average, write_sweep_csv,
                       write_sweep_json)
from .analytic import (ClosedFormParams, GeneralSolutionContext,
                       divergence_speed, general_params, general_solution,
                       nonresonant_params, nonresonant_solution,
                       refinement_delta, resonant_params, resonant_solution)
from .dynamics import (DualState, StrategyProfile, Trajectory, interior_field,
                       interior_integrate, polymatrix_integrate,
                       projected_field, projected_integrate, rk4_integrate,
                       simplex_project)
from .errors import (BoundaryEquilibrium, ConfigError, ConstraintViolation,
                     DegenerateGame, InsufficientData, IntegrationAborted,
                     NonSmoothWaveform, PeriodicGamesError,
                     QuadratureRefinement, RealnessViolation, WrongRegime)
from .games import (HarmonicScalar, HarmonicTerm, PeriodicGame,
                    PolymatrixGame, Waveform, evaluate_payoff, game_from_dict,
                    game_to_dict, load_game_file, make_eigenvalue_invariant,
                    make_perturbed_game, make_three_player_pennies,
                    polymatrix_from_dict, polymatrix_to_dict, save_game_file)
from .presets import (fig1_game, fig2_game, fig3_game, pennies_game,
                      preset_config, random_mean_game, resonance_grid,
                      PRESET_NAMES)
from .spectrum import (Equilibrium2x2, ScalarGame2x2, Spectrum, alpha_2x2,
                       assemble_operator, centering_projection,
                       equilibrium_2x2, game_spectrum, imaginary_spectrum,
                       interior_equilibrium, scalar_decomposition)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
