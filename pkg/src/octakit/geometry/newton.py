"""Damped Newton iteration with minimum-norm steps for complex square or
overdetermined systems."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np


@dataclass
class NewtonResult:
    x: np.ndarray
    residual: float
    iterations: int
    converged: bool
    rank: int
    reason: str


def _norm(f: np.ndarray) -> float:
    return float(np.abs(f).max()) if f.size else 0.0


def damped_newton(
    F: Callable[[np.ndarray], np.ndarray],
    J: Callable[[np.ndarray], np.ndarray],
    x0: np.ndarray,
    tol: float,
    max_iter: int = 100,
    min_step: float = 1e-6,
) -> NewtonResult:
    """Drive max|F| below ``tol``.

    Steps solve J dx = -F in the least-squares, minimum-norm sense, so a
    singular Jacobian (a solution set of positive dimension) is fine. Each step
    is halved until the residual decreases.
    """
    x = np.array(x0, dtype=complex)
    with np.errstate(all="ignore"):
        f = F(x)
    r = _norm(f)
    rank = 0
    if not np.isfinite(r):
        return NewtonResult(x, r, 0, False, 0, "non-finite residual at the start")
    for it in range(1, max_iter + 1):
        if r <= tol:
            return NewtonResult(x, r, it - 1, True, rank, "converged")
        with np.errstate(all="ignore"):
            jac = J(x)
        if not np.all(np.isfinite(jac)):
            return NewtonResult(x, r, it, False, rank, "non-finite Jacobian")
        dx, _, rank, _ = np.linalg.lstsq(jac, -f, rcond=1e-12)
        t = 1.0
        while t >= min_step:
            xn = x + t * dx
            with np.errstate(all="ignore"):
                fn = F(xn)
            rn = _norm(fn)
            if np.isfinite(rn) and rn < r:
                break
            t /= 2
        else:
            return NewtonResult(x, r, it, False, rank, "line search stalled")
        x, f, r = xn, fn, rn
    converged = r <= tol
    return NewtonResult(x, r, max_iter, converged, rank, "converged" if converged else "iteration limit")
