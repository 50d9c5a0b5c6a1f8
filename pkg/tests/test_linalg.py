import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gnewton.errors import NonFiniteEvaluation, NotSquare, SingularMatrix
from gnewton.linalg import (fd_hessian, fd_jacobian, identity_matrix, lu_solve,
                            mat_vec, norm2, norm_inf, spectral_norm, sym_eig)
from gnewton.problems import BUILTIN_NAMES, builtin

from conftest import uniform_points


def test_lu_solve_identity():
    assert lu_solve(identity_matrix(2), (3.0, 4.0)) == (3.0, 4.0)


def test_lu_solve_2x2_newton_system():
    # J f = (1, 7) for the quartic system at (1, 2); hand elimination gives
    # d = (5/64, 34/64)
    d = lu_solve(((6.0, 1.0), (8.0, 12.0)), (1.0, 7.0))
    assert abs(d[0] - 5.0 / 64.0) < 1e-15
    assert abs(d[1] - 34.0 / 64.0) < 1e-15
    assert d == (0.078125, 0.53125)


def test_lu_solve_singular():
    with pytest.raises(SingularMatrix):
        lu_solve(((1.0, 1.0), (2.0, 2.0)), (1.0, 1.0))
    with pytest.raises(SingularMatrix):
        lu_solve(((0.0, 0.0), (0.0, 0.0)), (0.0, 0.0))


def test_lu_solve_not_square():
    with pytest.raises(NotSquare):
        lu_solve(((1.0, 2.0, 3.0), (4.0, 5.0, 6.0)), (1.0, 2.0))
    with pytest.raises(NotSquare):
        lu_solve(((1.0, 0.0), (0.0, 1.0)), (1.0, 2.0, 3.0))


def test_lu_solve_recovers_random_systems():
    rng = random.Random(12345)
    for trial in range(60):
        n = rng.randint(1, 8)
        # diagonally dominant keeps the condition number small
        a = [[rng.uniform(-1, 1) for _ in range(n)] for _ in range(n)]
        for i in range(n):
            a[i][i] += math.copysign(n, a[i][i])
        x = tuple(rng.uniform(-5, 5) for _ in range(n))
        b = mat_vec(a, x)
        d = lu_solve(a, b)
        err = max(abs(p - q) for p, q in zip(d, x))
        assert err <= 1e-9 * (1.0 + norm_inf(x))


def test_lu_solve_complex_entries():
    a = ((1.0 + 1.0j, 0.0), (0.0, 2.0))
    d = lu_solve(a, (2.0j, 4.0))
    assert abs(d[0] - (1.0 + 1.0j)) < 1e-14
    assert abs(d[1] - 2.0) < 1e-14


def test_sym_eig_examples():
    assert sym_eig(((1.0, 0.0), (0.0, 2.0))).values == (1.0, 2.0)
    w = sym_eig(((2.0, 1.0), (1.0, 2.0))).values
    assert abs(w[0] - 1.0) < 1e-12 and abs(w[1] - 3.0) < 1e-12
    w = sym_eig(((0.0, 1.0), (1.0, 0.0))).values
    assert abs(w[0] + 1.0) < 1e-12 and abs(w[1] - 1.0) < 1e-12


def test_sym_eig_not_square():
    with pytest.raises(NotSquare):
        sym_eig(((1.0, 2.0),))


def test_sym_eig_trace_det_and_vectors():
    rng = random.Random(99)
    for _ in range(40):
        n = rng.randint(1, 6)
        m = [[rng.uniform(-2, 2) for _ in range(n)] for _ in range(n)]
        a = [[0.5 * (m[i][j] + m[j][i]) for j in range(n)] for i in range(n)]
        eig = sym_eig(a, want_vectors=True)
        trace = sum(a[i][i] for i in range(n))
        assert abs(sum(eig.values) - trace) <= 1e-8 * (1.0 + abs(trace))
        # columns orthonormal
        v = eig.vectors
        for j in range(n):
            for k in range(j, n):
                dot = sum(v[i][j] * v[i][k] for i in range(n))
                assert abs(dot - (1.0 if j == k else 0.0)) < 1e-10
        # A v = lambda v
        for j in range(n):
            col = [v[i][j] for i in range(n)]
            av = mat_vec(a, col)
            for i in range(n):
                assert abs(av[i] - eig.values[j] * col[i]) < 1e-9


def test_sym_eig_det_product():
    rng = random.Random(7)
    for _ in range(20):
        a, b, c = rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2)
        det = a * c - b * b
        w = sym_eig(((a, b), (b, c))).values
        assert abs(w[0] * w[1] - det) <= 1e-8 * (1.0 + abs(det))


def test_spectral_norm_examples():
    assert abs(spectral_norm(identity_matrix(2)) - 1.0) < 1e-12
    assert abs(spectral_norm(((-3.0, 0.0), (0.0, 2.0))) - 3.0) < 1e-12
    # nilpotent 2x2: singular values from eig of a^T a are (2, 0)
    assert abs(spectral_norm(((0.0, 2.0), (0.0, 0.0))) - 2.0) < 1e-12


def test_spectral_norm_is_spectral_radius_for_symmetric():
    rng = random.Random(3)
    for _ in range(30):
        a, b, c = rng.uniform(-3, 3), rng.uniform(-3, 3), rng.uniform(-3, 3)
        m = ((a, b), (b, c))
        w = sym_eig(m).values
        assert abs(spectral_norm(m) - max(abs(w[0]), abs(w[1]))) < 1e-9


def test_fd_jacobian_identity_and_constant():
    j = fd_jacobian(lambda x: x, (0.3, -1.7))
    for i in range(2):
        for k in range(2):
            assert abs(j[i][k] - (1.0 if i == k else 0.0)) < 1e-8
    j = fd_jacobian(lambda x: (2.0, 5.0), (0.3, -1.7))
    assert all(abs(t) < 1e-12 for row in j for t in row)


def test_fd_jacobian_quartic_at_1_2():
    p = builtin("quartic2")
    j = fd_jacobian(p.eval_f, (1.0, 2.0))
    expected = ((6.0, 1.0), (8.0, 12.0))
    for i in range(2):
        for k in range(2):
            assert abs(j[i][k] - expected[i][k]) < 1e-6


@pytest.mark.parametrize("name", BUILTIN_NAMES)
def test_fd_jacobian_matches_analytic_jacobians(name):
    p = builtin(name)
    for x in uniform_points(p.n, 100, -3.0, 3.0, seed=hash(name) % 2 ** 31):
        jf = p.eval_jacobian(x)
        jn = fd_jacobian(p.eval_f, x)
        for i in range(p.n):
            for k in range(p.n):
                assert abs(jf[i][k] - jn[i][k]) <= 1e-5 * (1.0 + abs(jf[i][k]))


def test_fd_jacobian_nonfinite():
    with pytest.raises(NonFiniteEvaluation):
        fd_jacobian(lambda x: (float("nan"),), (1.0,))


def test_fd_hessian_analytic_quadratics():
    h = fd_hessian(lambda x: x[0] ** 2 + x[1] ** 2, (0.4, -0.9))
    for i in range(2):
        for k in range(2):
            assert abs(h[i][k] - (2.0 if i == k else 0.0)) < 1e-5
    h = fd_hessian(lambda x: x[0] * x[1], (0.4, -0.9))
    assert abs(h[0][1] - 1.0) < 1e-5 and abs(h[1][0] - 1.0) < 1e-5
    assert abs(h[0][0]) < 1e-5 and abs(h[1][1]) < 1e-5


def test_fd_hessian_fixed_point_map_closed_form():
    # first coordinate of the classical fixed-point map for the quartic
    # system; analytic Hessian at (1,1) is [[9/4, 3/4], [3/4, -3/4]]
    # (checked symbolically).
    def g1(x):
        x1, x2 = x
        return x1 - (2 * x1 ** 3 * x2 ** 3 - 3 * x2 ** 2 + x1 ** 2) / (8 * x1 ** 2 * x2 ** 3)

    h = fd_hessian(g1, (1.0, 1.0))
    expected = ((2.25, 0.75), (0.75, -0.75))
    for i in range(2):
        for k in range(2):
            assert abs(h[i][k] - expected[i][k]) < 1e-4


def test_fd_hessian_nonfinite():
    with pytest.raises(NonFiniteEvaluation):
        fd_hessian(lambda x: math.inf, (1.0,))


@given(st.lists(st.floats(min_value=-1e6, max_value=1e6), min_size=1, max_size=6))
def test_norms_agree_on_scale(vals):
    v = tuple(vals)
    assert norm_inf(v) <= norm2(v) + 1e-12
    assert norm2(v) <= math.sqrt(len(v)) * norm_inf(v) + 1e-9
