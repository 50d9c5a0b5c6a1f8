"""The preconditioned Newton engine.

One update is x+ = s^-1(s(x) - J_s(x) [J_f(x)]^-1 f(x)); with the identity
map this is the classical Newton step (special-cased so the identity run is
bit-for-bit classical Newton).  A run counts as converged when an update
moves less than ``tol`` in the Euclidean norm, the criterion under which the
bundled systems reproduce their reference success statistics; a starting
point whose residual is already below ``root_atol`` converges in zero
iterations.

When a pre-image leaves the range of s (only possible for exp), the update
continues through the principal complex branch instead of failing, mirroring
how IEEE environments with complex log behave.  Iterates then carry complex
components until the trajectory returns to the reals.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .errors import InvalidStep, SingularJacobian, SingularMatrix
from .generalizers import Generalizer
from .linalg import all_finite, dist2, dist_inf, lu_solve, norm_inf
from .problems import ProblemSystem

CLASSIFY_RADIUS = 1e-4  # max-norm radius for matching a known solution


class Status(enum.Enum):
    CONVERGED = "Converged"
    MAX_ITERATIONS = "MaxIterations"
    SINGULAR_JACOBIAN = "SingularJacobian"
    INVALID_STEP = "InvalidStep"
    DIVERGED = "Diverged"


@dataclass(frozen=True)
class SolveConfig:
    """Iteration limits and tolerances.

    tol: convergence threshold on the Euclidean size of one update.
    max_iter: updates applied before the run counts as unsuccessful.
    divergence_bound: max-norm beyond which the run is abandoned.
    root_atol: residual below which a *starting point* already counts as
        converged (zero iterations); far below tol so sweep statistics are
        unaffected.
    """

    tol: float = 1e-8
    max_iter: int = 14
    divergence_bound: float = 1e12
    root_atol: float = 1e-12

    def __post_init__(self):
        if not self.tol > 0.0:
            raise ValueError("tol must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be at least 1")


@dataclass
class SolveTrace:
    """Record of one run: every iterate, residual max-norms, and outcome."""

    iterates: tuple
    residual_norms: tuple
    status: Status
    iterations_used: int
    solution_index: Optional[int] = None

    @property
    def final(self):
        return self.iterates[-1]


DEFAULT_CONFIG = SolveConfig()


def _normalize(x):
    """Collapse complex components with exactly zero imaginary part."""
    if any(isinstance(t, complex) for t in x):
        if all((not isinstance(t, complex)) or t.imag == 0.0 for t in x):
            return tuple(t.real if isinstance(t, complex) else t for t in x)
    return x


def _residual_norm(fx) -> float:
    if not all_finite(fx):
        return float("inf")
    return max(abs(t) for t in fx)


def _update_from(p: ProblemSystem, s: Generalizer, x, fx):
    """One update from x given f(x); raises SingularJacobian/InvalidStep."""
    jf = p.eval_jacobian(x)
    try:
        d = lu_solve(jf, fx)
    except SingularMatrix as e:
        raise SingularJacobian(str(e)) from e
    if s.is_identity:
        xn = tuple(xi - di for xi, di in zip(x, d))
        if not all_finite(xn):
            raise InvalidStep("non-finite update")
        return xn
    fwd = s.fwd
    der = s.deriv
    yn = tuple(fwd(xi) - der(xi) * di for xi, di in zip(x, d))
    if not all_finite(yn):
        raise InvalidStep("non-finite pre-image")
    inv_ext = s.invert_extended
    xn = tuple(inv_ext(t) for t in yn)
    if not all_finite(xn):
        raise InvalidStep("pre-image outside the invertible range")
    return _normalize(xn)


def step(p: ProblemSystem, s: Generalizer, x: Sequence[float]):
    """One generalized Newton update from x."""
    x = tuple(x)
    if not s.valid_point(x):
        raise InvalidStep(f"{s.name} is not invertible at the given point")
    return _update_from(p, s, x, p.eval_f(x))


def _classify(p: ProblemSystem, x) -> Optional[int]:
    best = None
    best_d = CLASSIFY_RADIUS
    for i, sol in enumerate(p.known_solutions):
        d = max(abs(a - b) for a, b in zip(x, sol))
        if d <= best_d:
            best = i
            best_d = d
    return best


def _run(p: ProblemSystem, s: Generalizer, x0, cfg: SolveConfig, iterates, residuals):
    """Shared driver; returns (status, iterations_used, final_x).

    ``iterates``/``residuals`` are lists to append to, or None for sweeps.
    """
    x = tuple(float(t) for t in x0)
    keep = iterates is not None
    if keep:
        iterates.append(x)
    if not all_finite(x) or not s.valid_point(x):
        if keep:
            residuals.append(_residual_norm(p.eval_f(x)) if all_finite(x) else float("inf"))
        return Status.INVALID_STEP, 0, x
    fx = p.eval_f(x)
    r = _residual_norm(fx)
    if keep:
        residuals.append(r)
    if r == float("inf") and not all_finite(fx):
        return Status.DIVERGED, 0, x
    if r <= cfg.root_atol:
        return Status.CONVERGED, 0, x
    tol = cfg.tol
    bound = cfg.divergence_bound
    eval_f = p.eval_f
    for k in range(1, cfg.max_iter + 1):
        if norm_inf(x) > bound:
            return Status.DIVERGED, k - 1, x
        try:
            xn = _update_from(p, s, x, fx)
        except SingularJacobian:
            return Status.SINGULAR_JACOBIAN, k - 1, x
        except InvalidStep:
            return Status.INVALID_STEP, k - 1, x
        fxn = eval_f(xn)
        if keep:
            iterates.append(xn)
            residuals.append(_residual_norm(fxn))
        if not all_finite(fxn):
            return Status.DIVERGED, k, xn
        if dist2(xn, x) <= tol:
            return Status.CONVERGED, k, xn
        x, fx = xn, fxn
    return Status.MAX_ITERATIONS, cfg.max_iter, x


def solve(p: ProblemSystem, s: Generalizer, x0: Sequence[float],
          cfg: SolveConfig = DEFAULT_CONFIG) -> SolveTrace:
    """Iterate from x0, recording every iterate; never raises on failure."""
    iterates: list = []
    residuals: list = []
    status, used, x = _run(p, s, x0, cfg, iterates, residuals)
    sol = _classify(p, x) if status is Status.CONVERGED else None
    return SolveTrace(iterates=tuple(iterates), residual_norms=tuple(residuals),
                      status=status, iterations_used=used, solution_index=sol)


def run_counted(p: ProblemSystem, s: Generalizer, x0, cfg: SolveConfig = DEFAULT_CONFIG):
    """Sweep-friendly variant: (status, iterations_used, final_x), no trace."""
    return _run(p, s, x0, cfg, None, None)


def is_success(status: Status, iterations_used: int, cfg: SolveConfig = DEFAULT_CONFIG) -> bool:
    """A run counts for statistics only when it converged in under max_iter."""
    return status is Status.CONVERGED and iterations_used < cfg.max_iter


def solve_composite(p: ProblemSystem, s: Generalizer, x0: Sequence[float],
                    cfg: SolveConfig = DEFAULT_CONFIG) -> SolveTrace:
    """Classical Newton on F = f o s^-1 in image space, mapped back each step.

    Algebraically the same trajectory as :func:`solve`; numerically an
    independent route kept as a cross-check oracle.
    """
    x = tuple(float(t) for t in x0)
    iterates = [x]
    residuals = []
    if not all_finite(x) or not s.valid_point(x):
        residuals.append(_residual_norm(p.eval_f(x)) if all_finite(x) else float("inf"))
        return SolveTrace((x,), tuple(residuals), Status.INVALID_STEP, 0, None)
    y = s.apply(x)
    fx = p.eval_f(x)
    r = _residual_norm(fx)
    residuals.append(r)
    status = None
    used = 0
    if not all_finite(y):
        status, used = Status.INVALID_STEP, 0
    elif not all_finite(fx):
        status, used = Status.DIVERGED, 0
    elif r <= cfg.root_atol:
        status, used = Status.CONVERGED, 0
    if status is None:
        inv_deriv = s.inv_deriv
        inv_ext = s.invert_extended
        for k in range(1, cfg.max_iter + 1):
            if norm_inf(x) > cfg.divergence_bound:
                status, used = Status.DIVERGED, k - 1
                break
            jf = p.eval_jacobian(x)
            scale = tuple(inv_deriv(t) for t in y)
            if not all_finite(scale):
                status, used = Status.INVALID_STEP, k - 1
                break
            jF = tuple(tuple(jf[i][j] * scale[j] for j in range(len(y))) for i in range(len(y)))
            try:
                dy = lu_solve(jF, fx)
            except SingularMatrix:
                status, used = Status.SINGULAR_JACOBIAN, k - 1
                break
            yn = tuple(yi - di for yi, di in zip(y, dy))
            if not all_finite(yn):
                status, used = Status.INVALID_STEP, k - 1
                break
            xn = tuple(inv_ext(t) for t in yn)
            if not all_finite(xn):
                status, used = Status.INVALID_STEP, k - 1
                break
            xn = _normalize(xn)
            fxn = p.eval_f(xn)
            iterates.append(xn)
            residuals.append(_residual_norm(fxn))
            if not all_finite(fxn):
                status, used = Status.DIVERGED, k
                break
            if dist2(xn, x) <= cfg.tol:
                status, used = Status.CONVERGED, k
                break
            x, y, fx = xn, yn, fxn
        else:
            status, used = Status.MAX_ITERATIONS, cfg.max_iter
    x_final = iterates[-1]
    sol = _classify(p, x_final) if status is Status.CONVERGED else None
    return SolveTrace(iterates=tuple(iterates), residual_norms=tuple(residuals),
                      status=status, iterations_used=used, solution_index=sol)
