"""Generalized Newton solvers for square nonlinear systems.

The iteration x+ = s^-1(s(x) - J_s(x) [J_f(x)]^-1 f(x)) runs classical
Newton through a coordinatewise change of variables s; well-chosen maps
enlarge the region from which the method converges.  The package bundles
five test systems, a text-format system parser, error-constant analysis
with spectral bounds, basin-portrait rendering, and a seeded randomized
benchmark harness, all behind the ``gnewton`` command-line tool.
"""

from .analysis import (LambdaEstimate, SpectralVectors, check_fixed_point,
                       compute_spectral_vectors, estimate_lambda, estimate_lambda_auto)
from .errors import GnewtonError
from .generalizers import GENERALIZER_NAMES, Generalizer, check_singularity, make
from .problems import BUILTIN_NAMES, ProblemSystem, builtin, parse_system
from .solver import SolveConfig, SolveTrace, Status, solve, solve_composite, step
from .experiments import (BasinGrid, BenchReport, Palette, default_palette,
                          render_basin, run_bench, time_iterations, time_to_solution,
                          write_counts_csv, write_ppm)

__all__ = [
    "BUILTIN_NAMES", "BasinGrid", "BenchReport", "GENERALIZER_NAMES",
    "Generalizer", "GnewtonError", "LambdaEstimate", "Palette",
    "ProblemSystem", "SolveConfig", "SolveTrace", "SpectralVectors", "Status",
    "builtin", "check_fixed_point", "check_singularity",
    "compute_spectral_vectors", "default_palette", "estimate_lambda",
    "estimate_lambda_auto", "make", "parse_system", "render_basin",
    "run_bench", "solve", "solve_composite", "step", "time_iterations",
    "time_to_solution", "write_counts_csv", "write_ppm",
]

__version__ = "0.1.0"
