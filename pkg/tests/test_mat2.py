import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from octakit.mat2 import (
    ALL_LINES,
    DEFAULT,
    E1,
    E2,
    DegenerateError,
    NotSL2Error,
    RowLine,
    det,
    eigen_lines,
    hol_matrices,
    hopf,
    inv,
    line_residual,
    normalize,
    pairing,
    projective_distance,
    random_sl2,
    require_sl2,
    up_of,
)

finite = st.floats(-3, 3, allow_nan=False)
nonzero = st.complex_numbers(min_magnitude=0.2, max_magnitude=5, allow_nan=False, allow_infinity=False)


def test_eigen_lines_diagonal():
    lines = eigen_lines(np.diag([2, 0.5]).astype(complex))
    assert len(lines) == 2
    assert lines[0].same_line(RowLine(np.array([1, 0]), 0.5)) and lines[0].m == pytest.approx(0.5)
    assert lines[1].same_line(RowLine(np.array([0, 1]), 2)) and lines[1].m == pytest.approx(2)


def test_eigen_lines_parabolic():
    lines = eigen_lines(np.array([[1, 1], [0, 1]], dtype=complex))
    assert len(lines) == 1
    assert projective_distance(lines[0].v, np.array([0, 1])) == 0
    assert lines[0].m == 1


def test_eigen_lines_central():
    assert eigen_lines(np.eye(2, dtype=complex)) is ALL_LINES
    assert eigen_lines(-np.eye(2, dtype=complex)) is ALL_LINES


def test_eigen_lines_rejects_non_sl2():
    with pytest.raises(NotSL2Error):
        eigen_lines(np.diag([2, 2]).astype(complex))


def test_random_eigen_lines_are_invariant():
    rng = np.random.default_rng(1)
    for _ in range(200):
        g = random_sl2(rng)
        for line in eigen_lines(g):
            assert line_residual(g, line) <= 1e-10 * max(1, np.abs(g).max())


def test_hol_matrices_trivial_color():
    for b in (1, 2j, -3.5):
        for mat in hol_matrices(1, b, 1):
            np.testing.assert_allclose(mat, np.eye(2), atol=0)


def test_hol_matrices_worked_example():
    up, dn, around = hol_matrices(2, 1, 2)
    np.testing.assert_allclose(up, [[2, 0], [1.5, 1]])
    np.testing.assert_allclose(dn, [[1, 0], [0, 2]])
    np.testing.assert_allclose(around, [[2, 0], [1.5, 0.5]])
    np.testing.assert_allclose(up @ inv(dn), around)


@settings(max_examples=300, deadline=None)
@given(nonzero, nonzero, nonzero)
def test_hol_matrix_identities(a, b, m):
    up, dn, around = hol_matrices(a, b, m)
    assert abs(det(up) - a) <= 1e-10 * abs(a)
    assert abs(det(dn) - a) <= 1e-10 * abs(a)
    assert abs(det(around) - 1) <= 1e-10 * max(1, abs(a) ** 2, abs(m) ** 2, abs(1 / m) ** 2)
    v = np.array([-1, b])
    lhs = v @ around
    np.testing.assert_allclose(lhs, v / m, rtol=1e-10, atol=1e-10 * np.abs(around).max() * abs(b))
    np.testing.assert_allclose(dn @ E1, E1)


def test_vector_utils():
    u = np.array([3, 5], dtype=complex)
    assert pairing(u, E2) == 3
    assert hopf(np.array([2, 1])) == 2
    assert hopf(np.array([1, 0])) == complex(np.inf)
    np.testing.assert_allclose(up_of(u), [[3, 0], [5, 1]])
    assert det(up_of(u)) == 3
    np.testing.assert_allclose(inv(up_of(u)) @ u, E1)
    with pytest.raises(DegenerateError):
        up_of(np.array([0, 1]))
    with pytest.raises(DegenerateError):
        hopf(np.array([0, 0]))


@settings(max_examples=100, deadline=None)
@given(finite, finite, nonzero)
def test_projective_distance_scale_free(x, y, lam):
    v = np.array([1 + x, y], dtype=complex)
    w = np.array([y - 1, x + 2j], dtype=complex)
    assert projective_distance(v, w) == pytest.approx(projective_distance(lam * v, w), abs=1e-12)
    assert projective_distance(v, lam * v) <= 1e-12


def test_normalize_picks_largest_component():
    np.testing.assert_allclose(normalize(np.array([2, -4])), [-0.5, 1])
    with pytest.raises(DegenerateError):
        normalize(np.zeros(2))


def test_random_sl2_and_require():
    rng = np.random.default_rng(0)
    for _ in range(50):
        require_sl2(random_sl2(rng))
    with pytest.raises(NotSL2Error):
        require_sl2(np.diag([1, 2]).astype(complex))


def test_numeric_context_scaling():
    ctx = DEFAULT.scaled(10)
    assert ctx.sl2 == pytest.approx(1e-8)
    assert ctx.zero == pytest.approx(1e-9)
