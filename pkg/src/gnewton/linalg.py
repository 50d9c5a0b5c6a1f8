"""Dense kernels for small systems.

Partial-pivoting LU solve, cyclic-Jacobi symmetric eigendecomposition,
spectral norms, and central-difference Jacobian/Hessian estimators.
Everything works on plain tuples/lists of floats; matrices are row-major
sequences of rows.  No dependencies, which keeps the 2x2 hot path used by
the solver cheap.
"""
from __future__ import annotations

import cmath
import math
import sys
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

from .errors import NonFiniteEvaluation, NotSquare, SingularMatrix

EPS = sys.float_info.epsilon
SQRT_EPS = math.sqrt(EPS)          # default first-derivative step
CBRT_EPS = EPS ** (1.0 / 3.0)      # default second-derivative step
PIVOT_RTOL = 1e-14                 # pivot threshold relative to max |entry|


def is_finite(t) -> bool:
    """Finite test that accepts float or complex scalars."""
    if type(t) is float:
        return math.isfinite(t)
    if isinstance(t, complex):
        return cmath.isfinite(t)
    return math.isfinite(t)


def all_finite(v: Sequence) -> bool:
    return all(is_finite(t) for t in v)


def norm_inf(v: Sequence) -> float:
    return max(abs(t) for t in v)


def norm2(v: Sequence) -> float:
    return math.sqrt(sum(abs(t) ** 2 for t in v))


def dist2(a: Sequence, b: Sequence) -> float:
    return math.sqrt(sum(abs(x - y) ** 2 for x, y in zip(a, b)))


def dist_inf(a: Sequence, b: Sequence) -> float:
    return max(abs(x - y) for x, y in zip(a, b))


def mat_vec(a: Sequence[Sequence[float]], x: Sequence[float]) -> tuple:
    return tuple(sum(ai * xi for ai, xi in zip(row, x)) for row in a)


def identity_matrix(n: int) -> tuple:
    return tuple(tuple(1.0 if i == j else 0.0 for j in range(n)) for i in range(n))


def _square_size(a) -> int:
    n = len(a)
    if any(len(row) != n for row in a):
        raise NotSquare(f"expected a square matrix, got rows of lengths {[len(r) for r in a]}")
    return n


def lu_solve(a: Sequence[Sequence], b: Sequence) -> tuple:
    """Solve a @ d = b by Gaussian elimination with partial pivoting.

    Raises SingularMatrix when a pivot falls below PIVOT_RTOL times the
    largest entry magnitude of ``a``.  Accepts complex entries.
    """
    n = _square_size(a)
    if len(b) != n:
        raise NotSquare(f"rhs length {len(b)} does not match matrix size {n}")
    if n == 2:
        # unrolled path: this call dominates the solver's inner loop
        a00, a01 = a[0]
        a10, a11 = a[1]
        b0, b1 = b
        amax = max(abs(a00), abs(a01), abs(a10), abs(a11))
        tiny = PIVOT_RTOL * amax
        if abs(a00) >= abs(a10):
            if abs(a00) <= tiny:
                raise SingularMatrix("zero pivot in column 0")
            m = a10 / a00
            r11 = a11 - m * a01
            r1 = b1 - m * b0
            if abs(r11) <= tiny:
                raise SingularMatrix("zero pivot in column 1")
            d1 = r1 / r11
            return ((b0 - a01 * d1) / a00, d1)
        if abs(a10) <= tiny:
            raise SingularMatrix("zero pivot in column 0")
        m = a00 / a10
        r01 = a01 - m * a11
        r0 = b0 - m * b1
        if abs(r01) <= tiny:
            raise SingularMatrix("zero pivot in column 1")
        d1 = r0 / r01
        return ((b1 - a11 * d1) / a10, d1)

    aug = [list(row) + [bi] for row, bi in zip(a, b)]
    amax = max((abs(t) for row in a for t in row), default=0.0)
    tiny = PIVOT_RTOL * amax
    for col in range(n):
        piv = max(range(col, n), key=lambda r: abs(aug[r][col]))
        if abs(aug[piv][col]) <= tiny:
            raise SingularMatrix(f"zero pivot in column {col}")
        if piv != col:
            aug[col], aug[piv] = aug[piv], aug[col]
        prow = aug[col]
        pval = prow[col]
        for r in range(col + 1, n):
            m = aug[r][col] / pval
            if m != 0.0:
                row = aug[r]
                for c in range(col + 1, n + 1):
                    row[c] -= m * prow[c]
    d = [0.0] * n
    for i in range(n - 1, -1, -1):
        acc = aug[i][n]
        row = aug[i]
        for j in range(i + 1, n):
            acc -= row[j] * d[j]
        d[i] = acc / row[i]
    return tuple(d)


@dataclass(frozen=True)
class SymEig:
    """Eigendecomposition of a symmetric matrix.

    values are ascending; vectors, when requested, hold orthonormal
    eigenvector columns: vectors[i][j] is component i of eigenvector j.
    """

    values: tuple
    vectors: Optional[tuple] = None


def sym_eig(a: Sequence[Sequence[float]], want_vectors: bool = False) -> SymEig:
    """Eigenvalues (ascending) of a symmetric matrix by cyclic Jacobi sweeps.

    The input is symmetrized as (a + a^T)/2 before rotating.
    """
    n = _square_size(a)
    m = [[0.5 * (a[i][j] + a[j][i]) for j in range(n)] for i in range(n)]
    v = [[1.0 if i == j else 0.0 for j in range(n)] for i in range(n)] if want_vectors else None
    scale = math.sqrt(sum(m[i][j] ** 2 for i in range(n) for j in range(n))) or 1.0
    for _ in range(100):
        off = math.sqrt(sum(m[i][j] ** 2 for i in range(n) for j in range(n) if i != j))
        if off <= 1e-15 * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = m[p][q]
                if abs(apq) <= 1e-18 * scale:
                    continue
                theta = (m[q][q] - m[p][p]) / (2.0 * apq)
                t = math.copysign(1.0, theta) / (abs(theta) + math.hypot(theta, 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                for k in range(n):
                    mkp, mkq = m[k][p], m[k][q]
                    m[k][p] = c * mkp - s * mkq
                    m[k][q] = s * mkp + c * mkq
                for k in range(n):
                    mpk, mqk = m[p][k], m[q][k]
                    m[p][k] = c * mpk - s * mqk
                    m[q][k] = s * mpk + c * mqk
                if v is not None:
                    for k in range(n):
                        vkp, vkq = v[k][p], v[k][q]
                        v[k][p] = c * vkp - s * vkq
                        v[k][q] = s * vkp + c * vkq
    order = sorted(range(n), key=lambda i: m[i][i])
    values = tuple(m[i][i] for i in order)
    vectors = None
    if v is not None:
        vectors = tuple(tuple(v[i][j] for j in order) for i in range(n))
    return SymEig(values=values, vectors=vectors)


def spectral_norm(a: Sequence[Sequence[float]]) -> float:
    """Largest singular value (the l2 operator norm) via eigenvalues of a^T a."""
    n = _square_size(a)
    b = [[sum(a[k][i] * a[k][j] for k in range(n)) for j in range(n)] for i in range(n)]
    top = sym_eig(b).values[-1]
    return math.sqrt(max(top, 0.0))


def _steps(x: Sequence[float], base: float) -> list:
    return [base * max(1.0, abs(t)) for t in x]


def fd_jacobian(fn: Callable, x: Sequence[float], h: Optional[float] = None) -> tuple:
    """Central-difference Jacobian of a vector map at x.

    Column j uses step h*max(1, |x_j|), h defaulting to sqrt(machine eps).
    Raises NonFiniteEvaluation if the map returns non-finite values at a
    stencil point.
    """
    base = SQRT_EPS if h is None else h
    x = list(x)
    hs = _steps(x, base)
    cols = []
    for j, hj in enumerate(hs):
        xp = list(x)
        xm = list(x)
        xp[j] += hj
        xm[j] -= hj
        fp = fn(tuple(xp))
        fm = fn(tuple(xm))
        if not (all_finite(fp) and all_finite(fm)):
            raise NonFiniteEvaluation(f"non-finite evaluation at stencil column {j}")
        cols.append([(p - q) / (2.0 * hj) for p, q in zip(fp, fm)])
    rows = len(cols[0])
    return tuple(tuple(cols[j][i] for j in range(len(hs))) for i in range(rows))


def fd_hessian(fn: Callable, x: Sequence[float], h: Optional[float] = None) -> tuple:
    """Central second-difference Hessian of a scalar function, symmetrized.

    Per-coordinate step h*max(1, |x_j|), h defaulting to (machine eps)^(1/3).
    """
    base = CBRT_EPS if h is None else h
    x = list(x)
    n = len(x)
    hs = _steps(x, base)

    def at(*pairs):
        z = list(x)
        for idx, delta in pairs:
            z[idx] += delta
        val = fn(tuple(z))
        if not is_finite(val):
            raise NonFiniteEvaluation("non-finite evaluation at Hessian stencil point")
        return val

    f0 = at()
    hess = [[0.0] * n for _ in range(n)]
    for i in range(n):
        hess[i][i] = (at((i, hs[i])) - 2.0 * f0 + at((i, -hs[i]))) / (hs[i] * hs[i])
        for j in range(i + 1, n):
            val = (at((i, hs[i]), (j, hs[j])) - at((i, hs[i]), (j, -hs[j]))
                   - at((i, -hs[i]), (j, hs[j])) + at((i, -hs[i]), (j, -hs[j])))
            val /= 4.0 * hs[i] * hs[j]
            hess[i][j] = hess[j][i] = val
    return tuple(tuple(row) for row in hess)
