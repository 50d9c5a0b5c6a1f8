"""Asymptotic error-constant estimation and spectral bounds.

For a quadratically convergent run, consecutive errors e_k = ||x^k - x*||
satisfy e_{k+1}/e_k^2 -> lambda.  ``estimate_lambda`` measures those ratios
over the double-precision window e_k in [1e-7, 1e-2] of a deep run (tol
pushed to 1e-15) and reports their geometric mean.

The Hessian stack of the fixed-point map g at x* yields per-coordinate
spectral summaries mu and rho whose norms sandwich lambda in
[||mu||/2, ||rho||/2].  The measured ratio depends on the direction from
which the error decays (the error-propagation map e -> H(e,e)/2 can have
several attractors), so the auto estimator samples a small canonical
ensemble of near-solution starts (decimal and significant-digit roundings
of x*) and reports the ensemble median.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

from .errors import (EmptyWindow, NoConvergence, NonFiniteEvaluation, NotFixedPoint)
from .generalizers import Generalizer, check_singularity
from .linalg import dist_inf, fd_hessian, fd_jacobian, norm2, spectral_norm, sym_eig
from .problems import ProblemSystem
from .solver import DEFAULT_CONFIG, InvalidStep, SingularJacobian, SolveConfig, solve, step

WINDOW_LO = 1e-7
WINDOW_HI = 1e-2
FIXED_POINT_TOL = 1e-6
TARGET_RADIUS = 1e-6  # a deep run must land this close to x* to count


@dataclass(frozen=True)
class LambdaEstimate:
    """Windowed error-constant measurement.

    window rows are (iterate index, e_k, e_{k+1}/e_k^2); fluctuation is the
    max/min spread of the ratios; order_estimate fits log e_{k+1} against
    log e_k over the window.
    """

    lam: float
    window: tuple
    order_estimate: float
    fluctuation: float


@dataclass(frozen=True)
class SpectralVectors:
    """Per-coordinate eigenvalue summaries of the Hessians of g at x*.

    mu[j] is 0 when the j-th Hessian's spectrum straddles zero, otherwise
    the smaller eigenvalue magnitude; rho[j] is its spectral radius.  The
    error constant lies in [bound_lo, bound_hi] = [||mu||/2, ||rho||/2].
    """

    mu: tuple
    rho: tuple
    bound_lo: float
    bound_hi: float
    hessians: tuple


def fixed_point_map(p: ProblemSystem, s: Generalizer):
    """g(x) = one generalized update from x; raises NonFiniteEvaluation
    where the update is undefined."""

    def g(x):
        try:
            out = step(p, s, x)
        except (SingularJacobian, InvalidStep) as e:
            raise NonFiniteEvaluation(str(e)) from e
        if any(isinstance(t, complex) for t in out):
            raise NonFiniteEvaluation("update left the real domain")
        return out

    return g


def check_fixed_point(p: ProblemSystem, s: Generalizer, x_star: Sequence[float]):
    """(||g(x*) - x*||_inf, ||J_g(x*)||_2): both small at a genuine root."""
    g = fixed_point_map(p, s)
    x_star = tuple(float(t) for t in x_star)
    gx = g(x_star)
    residual = dist_inf(gx, x_star)
    jg = fd_jacobian(g, x_star)
    return residual, spectral_norm(jg)


def hessian_stack(p: ProblemSystem, s: Generalizer, x_star: Sequence[float]) -> tuple:
    """FD Hessians of each coordinate of g at x*."""
    g = fixed_point_map(p, s)
    x_star = tuple(float(t) for t in x_star)
    return tuple(
        fd_hessian(lambda z, _j=j: g(z)[_j], x_star)
        for j in range(len(x_star)))


def compute_spectral_vectors(p: ProblemSystem, s: Generalizer,
                             x_star: Sequence[float]) -> SpectralVectors:
    """Spectral summaries and the error-constant interval at a fixed point."""
    x_star = tuple(float(t) for t in x_star)
    g = fixed_point_map(p, s)
    residual = dist_inf(g(x_star), x_star)
    if residual > FIXED_POINT_TOL:
        raise NotFixedPoint(f"||g(x)-x|| = {residual:.3e} at the given point")
    if check_singularity(s, x_star):
        raise NonFiniteEvaluation(
            f"{s.name} has a singular Jacobian at the fixed point; "
            "g is not twice differentiable there")
    return vectors_from_hessians(hessian_stack(p, s, x_star))


def vectors_from_hessians(hessians: Sequence) -> SpectralVectors:
    """Apply the eigenvalue summary rules to an explicit Hessian stack."""
    mu = []
    rho = []
    for h in hessians:
        w = sym_eig(h).values
        lmin, lmax = w[0], w[-1]
        if lmin >= 0.0:
            mu.append(lmin)
        elif lmax <= 0.0:
            mu.append(abs(lmax))
        else:
            mu.append(0.0)
        rho.append(max(abs(lmin), abs(lmax)))
    return SpectralVectors(
        mu=tuple(mu), rho=tuple(rho),
        bound_lo=norm2(mu) / 2.0, bound_hi=norm2(rho) / 2.0,
        hessians=tuple(tuple(tuple(row) for row in h) for h in hessians))


def _deep_config(cfg: SolveConfig) -> SolveConfig:
    return SolveConfig(tol=min(cfg.tol, 1e-15), max_iter=max(cfg.max_iter, 80),
                       divergence_bound=cfg.divergence_bound, root_atol=cfg.root_atol)


def _window_rows(iterates, x_star):
    es = [math.sqrt(sum((a - b) ** 2 for a, b in zip(z, x_star))) for z in iterates]
    rows = []
    for k in range(len(es) - 1):
        if WINDOW_LO <= es[k] <= WINDOW_HI and es[k + 1] > 0.0:
            rows.append((k, es[k], es[k + 1] / (es[k] * es[k]), es[k + 1]))
    return rows


def _estimate_from_rows(rows) -> LambdaEstimate:
    ratios = [r for _, _, r, _ in rows]
    lam = math.exp(sum(math.log(r) for r in ratios) / len(ratios))
    fluct = max(ratios) / min(ratios)
    pairs = [(math.log(ek), math.log(en)) for _, ek, _, en in rows]
    if len(pairs) >= 2:
        xm = sum(a for a, _ in pairs) / len(pairs)
        ym = sum(b for _, b in pairs) / len(pairs)
        den = sum((a - xm) ** 2 for a, _ in pairs)
        order = sum((a - xm) * (b - ym) for a, b in pairs) / den if den > 0 else 2.0
    else:
        order = pairs[0][1] / pairs[0][0]
    return LambdaEstimate(lam=lam, window=tuple((k, ek, r) for k, ek, r, _ in rows),
                          order_estimate=order, fluctuation=fluct)


def estimate_lambda(p: ProblemSystem, s: Generalizer, x_star: Sequence[float],
                    x0: Sequence[float], cfg: SolveConfig = DEFAULT_CONFIG) -> LambdaEstimate:
    """Windowed ratio estimate from the run started at x0.

    The run is deepened (tol 1e-15) so the window is as full as double
    precision allows.  Raises NoConvergence when the run does not land on
    x_star, EmptyWindow when no iterate error falls inside the window.
    """
    x_star = tuple(float(t) for t in x_star)
    trace = solve(p, s, x0, _deep_config(cfg))
    final = trace.final
    if any(isinstance(t, complex) for t in final) or dist_inf(final, x_star) > TARGET_RADIUS:
        raise NoConvergence(f"run from {tuple(x0)} did not land on the requested solution")
    rows = _window_rows(trace.iterates, x_star)
    if not rows:
        raise EmptyWindow(
            f"no iterate error inside [{WINDOW_LO:g}, {WINDOW_HI:g}]; "
            "start nearer or farther from the solution")
    return _estimate_from_rows(rows)


def _round_sig(t: float, sig: int) -> float:
    if t == 0.0:
        return 0.0
    return round(t, sig - 1 - math.floor(math.log10(abs(t))))


_LADDER_DELTAS = (0.1, 0.05, 0.02, 0.25, 0.01, 0.005, 0.002)


def _try_start(p, s, x_star, x0, cfg):
    try:
        return estimate_lambda(p, s, x_star, x0, cfg)
    except (NoConvergence, EmptyWindow, NonFiniteEvaluation):
        return None


def _ladder(p, s, x_star, directions, cfg):
    for direc in directions:
        for delta in _LADDER_DELTAS:
            x0 = tuple(a + delta * d for a, d in zip(x_star, direc))
            if not s.valid_point(x0):
                continue
            est = _try_start(p, s, x_star, x0, cfg)
            if est is not None:
                return est, x0
    return None, None


def default_starts(x_star: Sequence[float]) -> list:
    """Canonical near-solution starts: x* rounded to one and two decimals
    and to three significant digits (None where the rounding is exact)."""
    x_star = tuple(float(t) for t in x_star)
    starts = []
    for x0 in (
        tuple(round(t, 1) for t in x_star),
        tuple(round(t, 2) for t in x_star),
        tuple(_round_sig(t, 3) for t in x_star),
    ):
        starts.append(x0 if dist_inf(x0, x_star) > 1e-12 else None)
    return starts


def estimate_lambda_auto(p: ProblemSystem, s: Generalizer, x_star: Sequence[float],
                         cfg: SolveConfig = DEFAULT_CONFIG) -> Tuple[LambdaEstimate, tuple]:
    """Median-of-ensemble estimate with automatic start selection.

    Each canonical start contributes a windowed estimate (falling back to a
    ladder of offsets along +/-(1,..,1)/sqrt(n) when it fails); the reported
    lam/order are the ensemble medians and the window/fluctuation pool every
    member's ratios.  Returns (estimate, starts actually used).
    """
    x_star = tuple(float(t) for t in x_star)
    n = len(x_star)
    u = tuple(1.0 / math.sqrt(n) for _ in range(n))
    neg_u = tuple(-t for t in u)
    members = []
    used = []
    for x0 in default_starts(x_star):
        est = _try_start(p, s, x_star, x0, cfg) if x0 is not None else None
        if est is None:
            est, x0 = _ladder(p, s, x_star, (u, neg_u), cfg)
        if est is not None:
            members.append(est)
            used.append(x0)
    if not members:
        raise NoConvergence(
            f"no canonical start converged to {x_star} for {p.name}/{s.name}")
    lams = sorted(e.lam for e in members)
    orders = sorted(e.order_estimate for e in members)
    lam = lams[len(lams) // 2] if len(lams) % 2 == 1 else math.sqrt(
        lams[len(lams) // 2 - 1] * lams[len(lams) // 2])
    order = orders[len(orders) // 2] if len(orders) % 2 == 1 else 0.5 * (
        orders[len(orders) // 2 - 1] + orders[len(orders) // 2])
    pooled = [row for e in members for row in e.window]
    ratios = [r for _, _, r in pooled]
    return (LambdaEstimate(lam=lam, window=tuple(pooled), order_estimate=order,
                           fluctuation=max(ratios) / min(ratios)),
            tuple(used))
