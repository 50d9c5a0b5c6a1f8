"""Componentwise changes of variables used to precondition the iteration.

Each map s acts coordinatewise through a scalar function with an inverse,
a derivative, and domain predicates.  ``invert_extended`` is the inverse
that may leave the reals: for exp it is the principal complex log, which
lets the solver continue through a transiently nonpositive pre-image the
way IEEE/complex-capable environments do.  The other maps are bijections
of the real line (or of the principal tan branch), so their extended
inverse is the ordinary one.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Callable

from .errors import UnknownGeneralizer

HALF_PI = math.pi / 2.0


def _real_cbrt(t: float) -> float:
    return math.copysign(abs(t) ** (1.0 / 3.0), t)


def _safe_exp(t):
    try:
        return cmath.exp(t) if isinstance(t, complex) else math.exp(t)
    except OverflowError:
        return math.inf


def _safe_sinh(t: float) -> float:
    try:
        return math.sinh(t)
    except OverflowError:
        return math.copysign(math.inf, t)


def _safe_cosh(t: float) -> float:
    try:
        return math.cosh(t)
    except OverflowError:
        return math.inf


def _log_extended(t):
    """Natural log extended off the positive axis via the principal branch."""
    if isinstance(t, complex):
        return cmath.log(t) if t != 0 else math.nan
    if t > 0.0:
        return math.log(t)
    if t == 0.0:
        return math.nan
    return complex(math.log(-t), math.pi)


def _always(_t) -> bool:
    return True


def _positive(t) -> bool:
    return (not isinstance(t, complex)) and t > 0.0


def _in_tan_branch(t) -> bool:
    return (not isinstance(t, complex)) and -HALF_PI < t < HALF_PI


@dataclass(frozen=True)
class Generalizer:
    """A coordinatewise C1-invertible map with Jacobian and domain tests."""

    name: str
    fwd: Callable            # s on one coordinate
    inv: Callable            # s^-1 on one coordinate (real branch)
    deriv: Callable          # s' on one coordinate
    inv_deriv: Callable      # (s^-1)' on one coordinate of the image
    invert_extended: Callable  # s^-1 allowed to leave the reals
    point_ok: Callable       # coordinate inside the C1-invertibility domain
    image_ok: Callable       # coordinate inside the range of s
    is_identity: bool = False

    def apply(self, x):
        return tuple(self.fwd(t) for t in x)

    def invert(self, y):
        return tuple(self.inv(t) for t in y)

    def jacobian_diag(self, x):
        return tuple(self.deriv(t) for t in x)

    def jacobian(self, x):
        d = self.jacobian_diag(x)
        n = len(d)
        return tuple(tuple(d[i] if i == j else 0.0 for j in range(n)) for i in range(n))

    def valid_point(self, x) -> bool:
        return all(self.point_ok(t) for t in x)

    def valid_image(self, y) -> bool:
        return all(self.image_ok(t) for t in y)


def _cube_inv_deriv(t):
    if t == 0.0:
        return math.inf
    return (1.0 / 3.0) * abs(t) ** (-2.0 / 3.0)


_REGISTRY = {
    "identity": Generalizer(
        name="identity",
        fwd=lambda t: t, inv=lambda t: t,
        deriv=lambda t: 1.0, inv_deriv=lambda t: 1.0,
        invert_extended=lambda t: t,
        point_ok=_always, image_ok=_always,
        is_identity=True,
    ),
    "cube": Generalizer(
        name="cube",
        fwd=lambda t: t * t * t, inv=_real_cbrt,
        deriv=lambda t: 3.0 * t * t, inv_deriv=_cube_inv_deriv,
        invert_extended=_real_cbrt,
        point_ok=_always, image_ok=_always,
    ),
    "sinh": Generalizer(
        name="sinh",
        fwd=_safe_sinh, inv=math.asinh,
        deriv=_safe_cosh, inv_deriv=lambda t: 1.0 / math.hypot(1.0, t),
        invert_extended=math.asinh,
        point_ok=_always, image_ok=_always,
    ),
    "exp": Generalizer(
        name="exp",
        fwd=_safe_exp, inv=math.log,
        deriv=_safe_exp, inv_deriv=lambda t: 1.0 / t,
        invert_extended=_log_extended,
        point_ok=_always, image_ok=_positive,
    ),
    "tan": Generalizer(
        name="tan",
        fwd=math.tan, inv=math.atan,
        deriv=lambda t: 1.0 + math.tan(t) ** 2, inv_deriv=lambda t: 1.0 / (1.0 + t * t),
        invert_extended=math.atan,
        point_ok=_in_tan_branch, image_ok=_always,
    ),
}

GENERALIZER_NAMES = tuple(_REGISTRY)


def make(name: str) -> Generalizer:
    """Look up a change of variables by name."""
    try:
        return _REGISTRY[name]
    except KeyError:
        raise UnknownGeneralizer(
            f"unknown generalizer {name!r}; choose from {', '.join(GENERALIZER_NAMES)}") from None


def check_singularity(s: Generalizer, x) -> bool:
    """True when the map's Jacobian is numerically singular at x."""
    return any(abs(d) < 1e-14 for d in s.jacobian_diag(x))
