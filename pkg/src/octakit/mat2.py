"""Complex 2x2 linear algebra used throughout the package.

Matrices are ``numpy`` arrays of shape ``(2, 2)`` and dtype ``complex128``.
Row vectors (elements of invariant lines) and column vectors (shadows) are
both stored as shape ``(2,)`` arrays; which one is meant is always clear from
the function that consumes them.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass

import numpy as np

E1 = np.array([1.0, 0.0], dtype=complex)
E2 = np.array([0.0, 1.0], dtype=complex)
IDENTITY = np.eye(2, dtype=complex)


class NotSL2Error(ValueError):
    pass


class DegenerateError(ValueError):
    """A quantity that has to be nonzero (or finite) vanished."""


@dataclass(frozen=True)
class NumericContext:
    """Every tolerance the package uses, in one place."""

    sl2: float = 1e-9
    eigen_residual: float = 1e-10
    parabolic: float = 1e-8
    projective: float = 1e-9
    relation: float = 1e-9
    zero: float = 1e-10
    match: float = 1e-9
    unit_circle: float = 1e-6
    integer_gap: float = 1e-8
    critical: float = 1e-10

    def scaled(self, factor: float) -> "NumericContext":
        return NumericContext(**{k: v * factor for k, v in self.__dict__.items()})


DEFAULT = NumericContext()


def mat(entries) -> np.ndarray:
    return np.asarray(entries, dtype=complex).reshape(2, 2)


def det(g: np.ndarray) -> complex:
    return complex(g[0, 0] * g[1, 1] - g[0, 1] * g[1, 0])


def inv(g: np.ndarray) -> np.ndarray:
    d = det(g)
    if d == 0:
        raise DegenerateError("singular 2x2 matrix")
    return np.array([[g[1, 1], -g[0, 1]], [-g[1, 0], g[0, 0]]], dtype=complex) / d


def is_sl2(g: np.ndarray, ctx: NumericContext = DEFAULT) -> bool:
    return abs(det(g) - 1) <= ctx.sl2


def require_sl2(g: np.ndarray, ctx: NumericContext = DEFAULT) -> None:
    if not is_sl2(g, ctx):
        raise NotSL2Error(f"determinant {det(g):.6g} is not 1")


def normalize(v: np.ndarray) -> np.ndarray:
    """Scale so the largest-modulus component equals 1."""
    v = np.asarray(v, dtype=complex)
    k = int(np.argmax(np.abs(v)))
    if v[k] == 0:
        raise DegenerateError("zero vector has no line")
    return v / v[k]


def projective_distance(v: np.ndarray, w: np.ndarray) -> float:
    """|sin| of the angle between two nonzero vectors; 0 iff they span one line."""
    nv = np.linalg.norm(v)
    nw = np.linalg.norm(w)
    if nv == 0 or nw == 0:
        raise DegenerateError("zero vector has no line")
    return float(abs(v[0] * w[1] - v[1] * w[0]) / (nv * nw))


@dataclass(frozen=True, eq=False)
class RowLine:
    """An invariant line of row vectors with its inverse eigenvalue m (v g = v / m)."""

    v: np.ndarray
    m: complex

    def __post_init__(self):
        object.__setattr__(self, "v", normalize(self.v))

    def same_line(self, other: "RowLine", ctx: NumericContext = DEFAULT) -> bool:
        return projective_distance(self.v, other.v) <= ctx.projective

    def acted(self, h: np.ndarray) -> "RowLine":
        """The line L h; the eigenvalue is carried along unchanged."""
        return RowLine(self.v @ h, self.m)


class _AllLines:
    """Returned by :func:`eigen_lines` for central matrices (every line is invariant)."""

    def __repr__(self):
        return "ALL_LINES"


ALL_LINES = _AllLines()


def inverse_eigenvalue(g: np.ndarray, v: np.ndarray) -> complex:
    """The m with v g = m^{-1} v, assuming v spans an invariant line of g."""
    w = v @ g
    k = int(np.argmax(np.abs(v)))
    lam = w[k] / v[k]
    if lam == 0:
        raise DegenerateError("zero eigenvalue")
    return complex(1 / lam)


def _row_eigvec(g: np.ndarray, lam: complex) -> np.ndarray:
    # v (g - lam) = 0; either column of g - lam gives a candidate.
    c1 = np.array([g[1, 0], lam - g[0, 0]], dtype=complex)
    c2 = np.array([lam - g[1, 1], g[0, 1]], dtype=complex)
    return c1 if np.linalg.norm(c1) >= np.linalg.norm(c2) else c2


def eigen_lines(g: np.ndarray, ctx: NumericContext = DEFAULT):
    """Invariant row lines of ``g`` in SL(2,C).

    Returns a list of :class:`RowLine` (two for non-parabolic ``g``, one for a
    parabolic ``g`` other than +-1) or the marker :data:`ALL_LINES` when ``g``
    is central. The first line has the eigenvalue ``(tr + sqrt(tr^2 - 4))/2``.
    """
    require_sl2(g, ctx)
    t = complex(g[0, 0] + g[1, 1])
    if abs(t - 2) <= ctx.parabolic or abs(t + 2) <= ctx.parabolic:
        lam = 1.0 if abs(t - 2) <= ctx.parabolic else -1.0
        v = _row_eigvec(g, lam)
        if np.linalg.norm(v) <= ctx.parabolic * max(1.0, float(np.abs(g).max())):
            return ALL_LINES
        return [RowLine(v, 1 / lam)]
    s = cmath.sqrt(t * t - 4)
    lines = []
    for lam in ((t + s) / 2, (t - s) / 2):
        v = normalize(_row_eigvec(g, lam))
        lines.append(RowLine(v, 1 / lam))
    return lines


def line_residual(g: np.ndarray, line: RowLine) -> float:
    return float(np.linalg.norm(line.v @ g - line.v / line.m))


def hol_matrices(a: complex, b: complex, m: complex):
    """The (up, down, around) holonomy matrices of an octahedral color (a, b, m)."""
    if a == 0 or b == 0 or m == 0:
        raise DegenerateError("octahedral color has a zero component")
    up = np.array([[a, 0], [(a - 1 / m) / b, 1]], dtype=complex)
    dn = np.array([[1, (a - m) * b], [0, a]], dtype=complex)
    around = np.array([[a, -(a - m) * b], [(a - 1 / m) / b, m + 1 / m - a]], dtype=complex)
    return up, dn, around


def pairing(u1: np.ndarray, u2: np.ndarray) -> complex:
    """det of the matrix with columns u1, u2."""
    return complex(u1[0] * u2[1] - u1[1] * u2[0])


def hopf(v: np.ndarray) -> complex:
    """v^1 / v^2, or ``inf`` at the point at infinity."""
    if v[1] == 0:
        if v[0] == 0:
            raise DegenerateError("zero vector has no Hopf image")
        return complex(np.inf)
    return complex(v[0] / v[1])


def up_of(u: np.ndarray) -> np.ndarray:
    """The matrix [[u1, 0], [u2, 1]], which sends e1 to u."""
    if u[0] == 0:
        raise DegenerateError("up(u) needs a nonzero first entry")
    return np.array([[u[0], 0], [u[1], 1]], dtype=complex)


def random_sl2(rng: np.random.Generator) -> np.ndarray:
    """Complex Gaussian entries with the first column rescaled to force det = 1."""
    while True:
        g = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
        d = det(g)
        if abs(d) > 1e-6:
            g[:, 0] /= d
            return g
