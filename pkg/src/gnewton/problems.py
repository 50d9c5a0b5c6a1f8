"""Built-in test systems and the text-format system parser.

Each built-in carries an analytic Jacobian, its known solutions (embedded at
the full precision printed in the source material, residuals ~1e-14), and a
default search box of [-3, 3]^n.  All evaluators accept complex components so
the solver may continue through a complex change of variables.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Tuple

from . import expr
from .errors import UnknownProblem

Box = Tuple[Tuple[float, float], ...]


@dataclass(frozen=True)
class ProblemSystem:
    """A square nonlinear system f(x) = 0 with Jacobian access.

    ``source`` allows a worker process to rebuild the system: builtins are
    ("builtin", name), parsed ones ("parsed", text).
    """

    name: str
    n: int
    eval_f: Callable
    eval_jacobian: Callable
    known_solutions: tuple = ()
    default_domain: Box = ()
    source: Optional[tuple] = None


def _cube_box(n: int, half: float = 3.0) -> Box:
    return tuple((-half, half) for _ in range(n))


def _exp(t):
    try:
        return expr._exp(t)
    except OverflowError:  # pragma: no cover - expr._exp already guards
        return math.inf


# -- quartic system: f1 = x2*x1^3 - 1, f2 = x1*x2^3 - 1 ----------------------

def _quartic_f(x):
    x1, x2 = x
    return (x2 * x1 ** 3 - 1.0, x1 * x2 ** 3 - 1.0)


def _quartic_j(x):
    x1, x2 = x
    return ((3.0 * x1 * x1 * x2, x1 ** 3),
            (x2 ** 3, 3.0 * x1 * x2 * x2))


# -- Jennrich-Sampson instance: exponentials ---------------------------------

_JS_A = math.log((3.0 + math.sqrt(3.0)) / 2.0)   # 0.861211502516490 (15 dp)
_JS_B = math.log((3.0 - math.sqrt(3.0)) / 2.0)   # -0.455746394408326 (15 dp)


def _jennrich_f(x):
    e1 = _exp(x[0])
    e2 = _exp(x[1])
    return (e1 + e2 - 3.0, e1 * e1 + e2 * e2 - 6.0)


def _jennrich_j(x):
    e1 = _exp(x[0])
    e2 = _exp(x[1])
    return ((e1, e2), (2.0 * e1 * e1, 2.0 * e2 * e2))


# -- two-variable cubic gradient system --------------------------------------

def _cubic2_f(x):
    x1, x2 = x
    return (4.0 * x1 ** 3 - 4.0 * x1 - 0.7 * x2 + 0.2,
            4.0 * x2 ** 3 - 8.0 * x2 - 0.7 * x1 + 0.3)


def _cubic2_j(x):
    x1, x2 = x
    return ((12.0 * x1 * x1 - 4.0, -0.7),
            (-0.7, 12.0 * x2 * x2 - 8.0))


_CUBIC2_SOLUTIONS = (
    (-1.128494496205920, -1.477960288994776),
    (1.088972069871674, 1.442265902284124),
    (0.79262879889394, -1.398008585571904),
    (-0.888779137505495, 1.352613115553849),
    (0.044197271093630, 0.033651793151170),
)


# -- six-variable cubic gradient system --------------------------------------

_C6_A = (9.0, 2.0, 6.0, 4.0, 8.0, 7.0)
_C6_B = (
    (4.0, 4.0, 9.0, 3.0, 4.0, 1.0),
    (4.0, 3.0, 7.0, 9.0, 9.0, 2.0),
    (9.0, 7.0, 4.0, 7.0, 6.0, 6.0),
    (3.0, 9.0, 7.0, 4.0, 2.0, 6.0),
    (4.0, 9.0, 6.0, 2.0, 8.0, 3.0),
    (1.0, 2.0, 6.0, 6.0, 3.0, 5.0),
)
_C6_D = (2.0, 6.0, 5.0, 0.0, 0.0, 2.0)


def _cubic6_f(x):
    return tuple(
        4.0 * _C6_A[i] * x[i] ** 3 + 2.0 * sum(_C6_B[i][j] * x[j] for j in range(6)) + _C6_D[i]
        for i in range(6))


def _cubic6_j(x):
    return tuple(
        tuple((12.0 * _C6_A[i] * x[i] * x[i] if i == j else 0.0) + 2.0 * _C6_B[i][j]
              for j in range(6))
        for i in range(6))


_CUBIC6_SOLUTIONS = (
    (0.545218813388361, -1.464410189791729, -0.720606654276266,
     1.178144265591973, 0.794065108243717, -0.465794119447879),
    (-0.599208065573669, -1.571013884485518, 0.678323332400517,
     1.076080413893220, 0.745744375791400, -0.762615830412707),
    (0.590580847289543, 1.338889774602320, -0.853265510869097,
     -0.955745102979906, -0.646924271685709, 0.708688334528434),
)


# -- broad-band antenna processing quartic: gradient of a 2-D polynomial -----
# The displayed gradient in the source prints "+a4*x1" in the second
# component; the printed stationary points satisfy the true gradient of the
# polynomial (which has -a4*x1), so that is what we implement.

_SG_A2 = 0.122071359035091510
_SG_A3 = 0.077257128600040819
_SG_A4 = 0.217646697603541049
_SG_A5 = 0.233083387816363887
_SG_A6 = 0.129244611969892874
_SG_A7 = 0.286227131697582205
_SG_A8 = 0.1755719525003619673
_SG_A9 = 0.0567691913792773433


def _sigproc_f(x):
    x1, x2 = x
    return (
        -2.0 * _SG_A2 * x1 + 4.0 * _SG_A3 * x1 ** 3 - _SG_A4 * x2
        + 3.0 * _SG_A5 * x1 * x1 * x2 + 2.0 * _SG_A7 * x1 * x2 * x2 + _SG_A8 * x2 ** 3,
        -_SG_A4 * x1 + _SG_A5 * x1 ** 3 - 2.0 * _SG_A6 * x2
        + 2.0 * _SG_A7 * x1 * x1 * x2 + 3.0 * _SG_A8 * x1 * x2 * x2 + 4.0 * _SG_A9 * x2 ** 3,
    )


def _sigproc_j(x):
    x1, x2 = x
    j12 = -_SG_A4 + 3.0 * _SG_A5 * x1 * x1 + 4.0 * _SG_A7 * x1 * x2 + 3.0 * _SG_A8 * x2 * x2
    return (
        (-2.0 * _SG_A2 + 12.0 * _SG_A3 * x1 * x1 + 6.0 * _SG_A5 * x1 * x2
         + 2.0 * _SG_A7 * x2 * x2, j12),
        (j12, -2.0 * _SG_A6 + 2.0 * _SG_A7 * x1 * x1 + 6.0 * _SG_A8 * x1 * x2
         + 12.0 * _SG_A9 * x2 * x2),
    )


_SIGPROC_SOLUTIONS = (
    (-1.037925846421872, 1.188144940421522),
    (1.037925846421872, -1.188144940421522),
    (-0.150370553810688, -0.948134491036906),
    (0.150370553810688, 0.948134491036906),
    (0.0, 0.0),
)


_BUILTINS = {
    "quartic2": dict(n=2, f=_quartic_f, j=_quartic_j,
                     solutions=((1.0, 1.0), (-1.0, -1.0))),
    "jennrich2": dict(n=2, f=_jennrich_f, j=_jennrich_j,
                      solutions=((_JS_A, _JS_B), (_JS_B, _JS_A))),
    "cubic2": dict(n=2, f=_cubic2_f, j=_cubic2_j, solutions=_CUBIC2_SOLUTIONS),
    "cubic6": dict(n=6, f=_cubic6_f, j=_cubic6_j, solutions=_CUBIC6_SOLUTIONS),
    "sigproc2": dict(n=2, f=_sigproc_f, j=_sigproc_j, solutions=_SIGPROC_SOLUTIONS),
}

BUILTIN_NAMES = tuple(_BUILTINS)


def builtin(name: str) -> ProblemSystem:
    """One of the five bundled test systems, by name."""
    try:
        spec = _BUILTINS[name]
    except KeyError:
        raise UnknownProblem(
            f"unknown problem {name!r}; choose from {', '.join(BUILTIN_NAMES)}") from None
    return ProblemSystem(
        name=name,
        n=spec["n"],
        eval_f=spec["f"],
        eval_jacobian=spec["j"],
        known_solutions=tuple(tuple(s) for s in spec["solutions"]),
        default_domain=_cube_box(spec["n"]),
        source=("builtin", name),
    )


def parse_system(text: str, n: int, name: str = "custom") -> ProblemSystem:
    """Build a system from ``f<i> = <expr>`` lines; Jacobian by symbolic
    differentiation of the parsed trees."""
    trees = expr.parse_equations(text, n)
    jac_trees = tuple(tuple(expr.differentiate(t, j + 1) for j in range(n)) for t in trees)

    def eval_f(x, _trees=trees):
        return tuple(expr.evaluate(t, x) for t in _trees)

    def eval_jacobian(x, _jt=jac_trees):
        return tuple(tuple(expr.evaluate(t, x) for t in row) for row in _jt)

    return ProblemSystem(
        name=name,
        n=n,
        eval_f=eval_f,
        eval_jacobian=eval_jacobian,
        known_solutions=(),
        default_domain=_cube_box(n),
        source=("parsed", text, n, name),
    )


def restore(source: tuple) -> ProblemSystem:
    """Rebuild a system from its ``source`` tag (used by worker processes)."""
    if source is None:
        raise UnknownProblem("system carries no rebuild information")
    if source[0] == "builtin":
        return builtin(source[1])
    if source[0] == "parsed":
        _, text, n, name = source
        return parse_system(text, n, name)
    raise UnknownProblem(f"unknown system source {source[0]!r}")
