"""Dilogarithm, Bloch-Wigner function and the periodic dilogarithm ldil."""

from __future__ import annotations

import cmath
import math
from fractions import Fraction

from ..mat2 import DegenerateError

PI2_6 = math.pi**2 / 6
TWO_PI_I = 2j * math.pi


def _bernoulli(n: int) -> list[float]:
    b = [Fraction(1)]
    for k in range(1, n):
        b.append(-sum(Fraction(math.comb(k + 1, j)) * b[j] for j in range(k)) / (k + 1))
    return [float(x) for x in b]


# Coefficients B_n / (n+1)! of Li2(z) = sum c_n u^(n+1), u = -log(1-z).
_BERN_COEFF = [bn / math.factorial(n + 1) for n, bn in enumerate(_bernoulli(40))]


def _li2_maclaurin(z: complex) -> complex:
    total, term, n = 0j, z, 1
    while True:
        add = term / (n * n)
        total += add
        if abs(add) <= 1e-17 * max(abs(total), 1e-300) or n > 200:
            return total
        n += 1
        term *= z


def _li2_bernoulli(z: complex) -> complex:
    u = -cmath.log(1 - z)
    total, power = 0j, u
    for c in _BERN_COEFF:
        if c:
            total += c * power
        power *= u
    return total


def _li2_unit_disk(z: complex) -> complex:
    if abs(z) <= 0.5:
        return _li2_maclaurin(z)
    if z.real <= 0.5:
        return _li2_bernoulli(z)
    # Reflection; |1 - z| < 1 and Re(1 - z) < 1/2 here.
    w = 1 - z
    inner = _li2_maclaurin(w) if abs(w) <= 0.5 else _li2_bernoulli(w)
    return PI2_6 - cmath.log(z) * cmath.log(w) - inner


def dilog(z: complex) -> complex:
    """Principal branch of Li2, cut along [1, inf)."""
    z = complex(z)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise DegenerateError("dilog of a non-finite argument")
    if z == 0:
        return 0j
    if z == 1:
        return complex(PI2_6)
    if abs(z) <= 1:
        return _li2_unit_disk(z)
    # Inversion: Li2(z) = -pi^2/6 - log(-z)^2 / 2 - Li2(1/z).
    if z.imag == 0:
        # On the cut take the limit from below (Im Li2(x) = -pi log x for x > 1).
        z = complex(z.real, 0.0)
        log_mz = complex(math.log(z.real), math.pi) if z.real > 0 else cmath.log(-z)
    else:
        log_mz = cmath.log(-z)
    return -PI2_6 - 0.5 * log_mz * log_mz - _li2_unit_disk(1 / z)


def bloch_wigner(z: complex) -> float:
    """D(z) = Im Li2(z) + arg(1 - z) log|z|."""
    z = complex(z)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise DegenerateError("Bloch-Wigner function is undefined at infinity")
    if z == 0 or z == 1:
        raise DegenerateError(f"Bloch-Wigner function is undefined at {z.real:g}")
    if z.imag == 0:
        return 0.0
    return dilog(z).imag + cmath.phase(1 - z) * math.log(abs(z))


def ldil(zeta: complex) -> complex:
    """Li2(exp(2 pi i zeta)) / (2 pi i)."""
    return dilog(cmath.exp(TWO_PI_I * complex(zeta))) / TWO_PI_I


def ldil_prime(zeta: complex) -> complex:
    """d ldil / d zeta = -log(1 - exp(2 pi i zeta))."""
    w = cmath.exp(TWO_PI_I * complex(zeta))
    if w == 1:
        raise DegenerateError("ldil is not differentiable at integers")
    return -cmath.log(1 - w)


def ldil_second(zeta: complex) -> complex:
    w = cmath.exp(TWO_PI_I * complex(zeta))
    if w == 1:
        raise DegenerateError("ldil is not differentiable at integers")
    return TWO_PI_I * w / (1 - w)
