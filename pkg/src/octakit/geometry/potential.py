"""The potential function of a diagram, its critical points, recovery of
octahedral colorings from them, and hyperbolic volume."""

from __future__ import annotations

import cmath
from dataclasses import dataclass, field

import numpy as np

from ..diagram import Combinatorics, Diagram
from ..mat2 import DEFAULT, DegenerateError, NumericContext
from ..octahedral import OctahedralColor, OctahedralColoring, verify_octahedral
from .dilog import TWO_PI_I, bloch_wigner, ldil
from .newton import damped_newton
from .shapes import all_shapes_from_coloring

# Term signs and (beta coefficients by role, mu coefficients (mu1, mu2)) of the
# four dilogarithm arguments N, W, S, E at a crossing.
_TERMS = (
    (+1, {"s2p": 1, "s1": -1}, (0, 0)),
    (-1, {"s2": 1, "s1": -1}, (-1, 0)),
    (+1, {"s2": 1, "s1p": -1}, (-1, 1)),
    (-1, {"s2p": 1, "s1p": -1}, (0, 1)),
)


class NonAnalyticPoint(DegenerateError):
    pass


class CriticalPointError(RuntimeError):
    pass


@dataclass(frozen=True, eq=False)
class PotentialProblem:
    """Phi as a function of one log-b value per segment at fixed log-meridians.

    ``segments`` fixes the order of the beta vector. ``free`` lists the
    segments whose equations are imposed (all segments of a link diagram, the
    interior ones of a tangle); the other betas are parameters.
    """

    diagram: Diagram
    comb: Combinatorics
    mu: tuple
    segments: tuple
    free: tuple
    coeff: np.ndarray = field(repr=False)  # (4C, n) beta coefficients
    offset: np.ndarray = field(repr=False)  # (4C,) mu contributions
    term_sign: np.ndarray = field(repr=False)  # (4C,)
    eps: np.ndarray = field(repr=False)  # (4C,)
    linear: np.ndarray = field(repr=False)  # (n,) gradient of the linear part

    @property
    def free_index(self) -> np.ndarray:
        pos = {s: k for k, s in enumerate(self.segments)}
        return np.array([pos[s] for s in self.free], dtype=int)

    def mu_of(self, segment: int) -> complex:
        return self.mu[self.comb.component_of[segment]]

    def arguments(self, beta) -> np.ndarray:
        """The 4C dilogarithm arguments, already multiplied by the crossing sign."""
        beta = np.asarray(beta, dtype=complex)
        return self.eps * (self.coeff @ beta + self.offset)


def potential_problem(d: Diagram, c: Combinatorics, mu) -> PotentialProblem:
    if np.ndim(mu) == 0:
        mu = [mu] * len(c.components)
    mu = tuple(complex(x) for x in mu)
    if len(mu) != len(c.components):
        raise ValueError(f"expected {len(c.components)} log-meridians, got {len(mu)}")
    used = sorted({getattr(x, r) for x in d.crossings for r in ("s1", "s2", "s1p", "s2p")})
    pos = {s: k for k, s in enumerate(used)}
    boundary = set(d.boundary_in) | set(d.boundary_out)
    free = tuple(s for s in used if s not in boundary)
    n, rows = len(used), 4 * len(d.crossings)
    coeff = np.zeros((rows, n))
    offset = np.zeros(rows, dtype=complex)
    term_sign = np.zeros(rows)
    eps = np.zeros(rows)
    linear = np.zeros(n, dtype=complex)
    for k, x in enumerate(d.crossings):
        mu1 = mu[c.component_of[x.s1]]
        mu2 = mu[c.component_of[x.s2]]
        for t, (sign, betas, (c1, c2)) in enumerate(_TERMS):
            row = 4 * k + t
            for role, v in betas.items():
                coeff[row, pos[getattr(x, role)]] += v
            offset[row] = c1 * mu1 + c2 * mu2
            term_sign[row] = sign
            eps[row] = x.sign
        # Linear correction eps * 2 pi i * (mu1 (b1' - b1) + mu2 (b2 - b2')) in log form.
        linear[pos[x.s1p]] += x.sign * TWO_PI_I * mu1
        linear[pos[x.s1]] -= x.sign * TWO_PI_I * mu1
        linear[pos[x.s2]] += x.sign * TWO_PI_I * mu2
        linear[pos[x.s2p]] -= x.sign * TWO_PI_I * mu2
    return PotentialProblem(d, c, mu, tuple(used), free, coeff, offset, term_sign, eps, linear)


def non_analytic_terms(p: PotentialProblem, beta, gap: float = DEFAULT.integer_gap) -> list[int]:
    """Indices of arguments within ``gap`` of an integer."""
    args = p.arguments(beta)
    return [k for k, a in enumerate(args) if abs(a - round(a.real)) <= gap]


def _require_analytic(p: PotentialProblem, beta, ctx: NumericContext) -> None:
    bad = non_analytic_terms(p, beta, ctx.integer_gap)
    if bad:
        k = bad[0]
        raise NonAnalyticPoint(f"crossing {k // 4}: term {'NWSE'[k % 4]} has an integer argument")


def potential_value(p: PotentialProblem, beta, ctx: NumericContext = DEFAULT) -> complex:
    beta = np.asarray(beta, dtype=complex)
    _require_analytic(p, beta, ctx)
    args = p.arguments(beta)
    total = sum(e * s * ldil(a) for e, s, a in zip(p.eps, p.term_sign, args))
    return complex(total + p.linear @ beta)


def potential_gradient(p: PotentialProblem, beta, ctx: NumericContext = DEFAULT) -> np.ndarray:
    """dPhi/dbeta for every segment in ``p.segments`` order."""
    beta = np.asarray(beta, dtype=complex)
    _require_analytic(p, beta, ctx)
    w = np.exp(TWO_PI_I * p.arguments(beta))
    return p.coeff.T @ (-p.term_sign * np.log(1 - w)) + p.linear


def potential_hessian(p: PotentialProblem, beta) -> np.ndarray:
    w = np.exp(TWO_PI_I * p.arguments(np.asarray(beta, dtype=complex)))
    diag = p.term_sign * p.eps * TWO_PI_I * w / (1 - w)
    return p.coeff.T @ (diag[:, None] * p.coeff)


def segment_equations(p: PotentialProblem, beta) -> np.ndarray:
    """exp(dPhi/dbeta_i) for the free segments, computed without logarithms."""
    beta = np.asarray(beta, dtype=complex)
    w = np.exp(TWO_PI_I * p.arguments(beta))
    logs = p.coeff.T @ (-p.term_sign * np.log(1 - w)) + p.linear
    return np.exp(logs[p.free_index])


@dataclass
class CriticalPoint:
    beta: np.ndarray  # all segments, in problem order
    residual: float
    converged: bool
    iterations: int
    jacobian_rank: int
    non_analytic: list  # argument indices within the integer gap
    reason: str = ""

    @property
    def pinched_adjacent(self) -> bool:
        return bool(self.non_analytic)

    @property
    def accepted(self) -> bool:
        return self.converged and not self.pinched_adjacent


def solve_critical(
    p: PotentialProblem, beta0, ctx: NumericContext = DEFAULT, max_iter: int = 100
) -> CriticalPoint:
    """Damped Newton on exp(dPhi/dbeta_i) - 1 = 0 over the free segments."""
    beta0 = np.array(beta0, dtype=complex)
    idx = p.free_index

    def full(x):
        b = beta0.copy()
        b[idx] = x
        return b

    def F(x):
        return segment_equations(p, full(x)) - 1

    def J(x):
        b = full(x)
        e = segment_equations(p, b)
        return e[:, None] * potential_hessian(p, b)[np.ix_(idx, idx)]

    res = damped_newton(F, J, beta0[idx], ctx.critical, max_iter)
    beta = full(res.x)
    bad = non_analytic_terms(p, beta, ctx.integer_gap) if np.all(np.isfinite(beta)) else []
    return CriticalPoint(beta, res.residual, res.converged, res.iterations, res.rank, bad, res.reason)


def start_grid(n: int, seed: int, cap: int = 2000, per_axis: int = 3) -> np.ndarray:
    """Starting points on a lattice in [0,1) + i[-0.5, 0.5) per variable.

    With more than ``cap`` lattice points, a seeded random subset of size ``cap``
    is used, in lattice order.
    """
    re = np.arange(per_axis) / per_axis
    im = -0.5 + np.arange(per_axis) / per_axis
    axis = np.array([r + 1j * i for r in re for i in im])
    total = len(axis) ** n
    if total <= cap:
        picks = range(total)
    else:
        rng = np.random.default_rng(seed)
        picks = sorted(int(k) for k in rng.choice(total, size=cap, replace=False))
    out = np.empty((len(picks), n), dtype=complex)
    for row, k in enumerate(picks):
        for j in range(n):
            k, digit = divmod(k, len(axis))
            out[row, j] = axis[digit]
    return out


def volume_from_beta(p: PotentialProblem, beta) -> float:
    """Volume of the shapes determined by b = exp(2 pi i beta)."""
    pos = {s: k for k, s in enumerate(p.segments)}
    b = np.exp(TWO_PI_I * np.asarray(beta, dtype=complex))
    total = 0.0
    for x in p.diagram.crossings:
        m1 = cmath.exp(TWO_PI_I * p.mu_of(x.s1))
        m2 = cmath.exp(TWO_PI_I * p.mu_of(x.s2))
        b1, b2, b1p, b2p = (b[pos[s]] for s in (x.s1, x.s2, x.s1p, x.s2p))
        quad = (b2p / b1, b2 / (m1 * b1), m2 * b2 / (m1 * b1p), m2 * b2p / b1p)
        total += _crossing_volume(quad)
    return total


def _crossing_volume(quad) -> float:
    zN, zW, zS, zE = quad
    return bloch_wigner(zN) - bloch_wigner(zW) + bloch_wigner(zS) - bloch_wigner(zE)


@dataclass
class MultistartResult:
    best: CriticalPoint | None
    best_index: int | None
    volume: float | None
    mu: tuple
    starts: int
    converged: int
    accepted: int


def multistart(
    p: PotentialProblem,
    seed: int = 0,
    cap: int = 2000,
    extra_starts=(),
    ctx: NumericContext = DEFAULT,
    min_volume: float = 1e-6,
) -> MultistartResult:
    """Solve from every start and keep the accepted point of largest volume.

    Ties in volume (to 1e-9) go to the lowest start index. Boundary betas of
    tangles are taken from the start vector as fixed parameters.
    """
    starts = list(extra_starts) + list(start_grid(len(p.segments), seed, cap))
    best, best_k, best_vol = None, None, None
    n_conv = n_acc = 0
    for k, b0 in enumerate(starts):
        cp = solve_critical(p, b0, ctx)
        n_conv += cp.converged
        if not cp.accepted:
            continue
        try:
            vol = volume_from_beta(p, cp.beta)
        except DegenerateError:
            continue
        n_acc += 1
        if vol > min_volume and (best_vol is None or vol > best_vol + 1e-9):
            best, best_k, best_vol = cp, k, vol
    return MultistartResult(best, best_k, best_vol, p.mu, len(starts), n_conv, n_acc)


def parabolic_search(d: Diagram, c: Combinatorics, seed: int = 0, cap: int = 2000, ctx: NumericContext = DEFAULT):
    """Multi-start at mu = 0, then at mu = 1/2 if no geometric point was found."""
    result = None
    for mu in (0.0, 0.5):
        p = potential_problem(d, c, mu)
        result = multistart(p, seed, cap, ctx=ctx)
        if result.best is not None:
            return p, result
    return p, result


def _a_residuals(d: Diagram, seg_pos: dict, a, b, m) -> np.ndarray:
    out = []
    for x in d.crossings:
        i1, i2, o1, o2 = (seg_pos[s] for s in (x.s1, x.s2, x.s1p, x.s2p))
        a1, a2, a1p, a2p = a[i1], a[i2], a[o1], a[o2]
        b1, b2, b1p, b2p = b[i1], b[i2], b[o1], b[o2]
        m1, m2 = m[i1], m[i2]
        if x.sign > 0:
            w = 1 - b2 / (m1 * b1)
            big_a = 1 - (m1 * b1 / b2) * (1 - a1 / m1) * (1 - 1 / (m2 * a2))
            out += [
                a1p * big_a - a1,
                a2p - a2 * big_a,
                b1p * (1 - m2 * a2 * w) - m2 * b2 / m1,
                a1 * b2p - b1 * (a1 - m1 * w),
            ]
        else:
            w = 1 - m1 * b1 / b2
            big_a = 1 - (b2 / (m1 * b1)) * (1 - m1 * a1) * (1 - m2 / a2)
            out += [
                a1p * big_a - a1,
                a2p - a2 * big_a,
                b1p - (m2 * b2 / m1) * (1 - (a2 / m2) * w),
                b2p * (m1 * a1 - w) - b1 * m1 * a1,
            ]
    return np.array(out, dtype=complex)


def coloring_from_critical(
    p: PotentialProblem,
    cp: CriticalPoint,
    seed: int = 0,
    max_tries: int = 16,
    ctx: NumericContext = DEFAULT,
) -> OctahedralColoring:
    """Octahedral coloring with b = exp(2 pi i beta), m = exp(2 pi i mu).

    The a-values are found by damped Newton on the crossing relations with b
    and m frozen, from random starting values; a failed run is retried with the
    next random start.
    """
    d, segs = p.diagram, p.segments
    pos = {s: k for k, s in enumerate(segs)}
    b = np.exp(TWO_PI_I * np.asarray(cp.beta, dtype=complex))
    m = np.array([cmath.exp(TWO_PI_I * p.mu_of(s)) for s in segs])
    rng = np.random.default_rng(seed)
    h = 1e-7

    def F(a):
        return _a_residuals(d, pos, a, b, m)

    def J(a):
        cols = []
        for j in range(len(a)):
            e = np.zeros(len(a), dtype=complex)
            e[j] = h
            cols.append((F(a + e) - F(a - e)) / (2 * h))
        return np.array(cols).T

    last = None
    for _ in range(max_tries):
        a0 = 1 + 0.5 * (rng.standard_normal(len(segs)) + 1j * rng.standard_normal(len(segs)))
        # The b-values carry the critical point's own error, so the a-system is
        # only consistent to about that level; the final gate is verification.
        res = damped_newton(F, J, a0, 1e-14, max_iter=200)
        if not np.all(np.isfinite(res.x)) or np.any(res.x == 0):
            last = res.reason
            continue
        colors = {s: OctahedralColor(complex(res.x[k]), complex(b[k]), complex(m[k])) for k, s in enumerate(segs)}
        for s in d.segments:
            if s not in colors:  # free loops carry no crossing data
                colors[s] = OctahedralColor(1 + 0j, 1 + 0j, cmath.exp(TWO_PI_I * p.mu_of(s)))
        chi = OctahedralColoring(d, p.comb, colors)
        if verify_octahedral(d, p.comb, chi, ctx).passed:
            return chi
        last = "verification failed"
    raise CriticalPointError(f"could not recover the a-values after {max_tries} tries ({last})")


def volume(chi: OctahedralColoring, ctx: NumericContext = DEFAULT) -> float:
    """Sum over crossings of D(zN) - D(zW) + D(zS) - D(zE)."""
    total = 0.0
    for k, quad in enumerate(all_shapes_from_coloring(chi)):
        if any(abs(z - 1) <= ctx.projective for z in quad):
            raise DegenerateError(f"crossing {k} is pinched; volume is undefined")
        total += _crossing_volume(quad)
    return total


def log_coordinates(chi: OctahedralColoring, p: PotentialProblem) -> np.ndarray:
    """beta = log(b) / (2 pi i) in problem order (principal logarithm)."""
    return np.array([cmath.log(chi[s].b) / TWO_PI_I for s in p.segments])


def log_meridians(chi: OctahedralColoring) -> tuple:
    """mu = log(m) / (2 pi i) per component (principal logarithm)."""
    c = chi.comb
    return tuple(cmath.log(chi[comp[0]].m) / TWO_PI_I for comp in c.components)


__all__ = [
    "PotentialProblem",
    "CriticalPoint",
    "MultistartResult",
    "NonAnalyticPoint",
    "CriticalPointError",
    "potential_problem",
    "potential_value",
    "potential_gradient",
    "potential_hessian",
    "segment_equations",
    "non_analytic_terms",
    "solve_critical",
    "start_grid",
    "multistart",
    "parabolic_search",
    "coloring_from_critical",
    "volume",
    "volume_from_beta",
    "log_coordinates",
    "log_meridians",
]
