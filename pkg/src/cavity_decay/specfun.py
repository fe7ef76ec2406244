"""Complex spherical Bessel/Hankel functions and associated Legendre functions.

Orders are non-negative integers capped at ``constants.MAX_ORDER``. Arguments
are complex numbers; anything that would overflow double precision is rejected
with :class:`~cavity_decay.errors.SpecialFunctionOverflow` instead of returning
``inf`` or ``nan``.

Legendre functions follow the convention without the Condon-Shortley phase,
so ``P_1^1(x) = sqrt(1 - x**2)``.
"""

import cmath
import math
from functools import lru_cache
from typing import Literal

import numpy as np
from scipy import special

from cavity_decay.constants import MAX_ABS_ARGUMENT, MAX_ABS_IMAG_ARGUMENT, MAX_ORDER
from cavity_decay.errors import DomainError, SpecialFunctionOverflow
from cavity_decay.utils import is_finite_complex

BesselKind = Literal["J", "H"]

# Extra orders above the requested one where the downward recurrence starts
_MILLER_PAD = 30
# Below this |z| the n = 1 closed form loses digits to cancellation
_CLOSED_FORM_J1_MIN = 0.5
# |sin(theta)| below this counts as sitting on the polar axis
_POLE_TOLERANCE = 1.0e-10


def _check_order(order: int) -> None:
    if isinstance(order, bool) or not isinstance(order, int | np.integer):
        raise DomainError(f"Order must be an integer, got {order!r}")
    if order < 0:
        raise DomainError(f"Order must be non-negative, got {order}")
    if order > MAX_ORDER:
        raise DomainError(
            f"Order {order} exceeds the configured maximum {MAX_ORDER} "
            "(set CAVITY_DECAY_MAX_ORDER to raise it)"
        )


def _check_argument(z: complex) -> complex:
    z = complex(z)
    if not is_finite_complex(z):
        raise DomainError(f"Argument must be finite, got {z!r}")
    if abs(z.imag) > MAX_ABS_IMAG_ARGUMENT or abs(z) > MAX_ABS_ARGUMENT:
        raise SpecialFunctionOverflow(
            f"Argument {z!r} outside the supported range "
            f"(|z| <= {MAX_ABS_ARGUMENT:g}, |Im z| <= {MAX_ABS_IMAG_ARGUMENT:g})"
        )
    return z


def _check_nonzero(z: complex) -> None:
    if z == 0:
        raise DomainError("Argument must be non-zero (the function diverges at the origin)")


def _ensure_finite(values: np.ndarray, name: str, z: complex) -> np.ndarray:
    if not np.all(np.isfinite(values)):
        raise SpecialFunctionOverflow(f"{name} is not representable at z={z!r}")
    return values


def _j0(z: complex) -> complex:
    if z == 0:
        return 1.0 + 0.0j
    return cmath.sin(z) / z


def _j1_closed(z: complex) -> complex:
    return cmath.sin(z) / z**2 - cmath.cos(z) / z


def bessel_j_table(nmax: int, z: complex) -> np.ndarray:
    """Return ``[j_0(z), ..., j_nmax(z)]``.

    The ratios ``j_k / j_{k-1}`` come from the downward recurrence, started well
    above ``nmax``, and are anchored on whichever of ``j_0``/``j_1`` is larger.
    """
    _check_order(nmax)
    z = _check_argument(z)
    table = np.zeros(nmax + 1, dtype=complex)
    if z == 0:
        table[0] = 1.0
        return table

    start = nmax + int(abs(z)) + _MILLER_PAD
    ratios = np.zeros(nmax + 1, dtype=complex)
    ratio = 0j
    for k in range(start, 0, -1):
        denominator = (2 * k + 1) / z - ratio
        # Exact zero only happens on a zero of j_{k-1}; a huge ratio stands in for it
        ratio = 1.0 / denominator if denominator != 0 else complex(1.0e300)
        if k <= nmax:
            ratios[k] = ratio

    j0 = _j0(z)
    table[0] = j0
    if nmax == 0:
        return _ensure_finite(table, "j_n", z)

    j1 = _j1_closed(z) if abs(z) >= _CLOSED_FORM_J1_MIN else None
    if j1 is not None and abs(j1) > abs(j0):
        table[1] = j1
        for k in range(2, nmax + 1):
            table[k] = table[k - 1] * ratios[k]
    else:
        for k in range(1, nmax + 1):
            table[k] = table[k - 1] * ratios[k]
        if j1 is not None:
            table[1] = j1
    return _ensure_finite(table, "j_n", z)


@lru_cache(maxsize=None)
def _hankel_coefficients(n: int) -> tuple[float, ...]:
    return tuple(
        float(math.factorial(n + k) // (math.factorial(k) * math.factorial(n - k)))
        for k in range(n + 1)
    )


def _hankel_polynomial(n: int, z: np.complex128) -> np.complex128:
    # h_n(z) = (-i)^(n+1) e^{iz}/z * sum_k i^k (n+k)! / (k! (n-k)! (2z)^k)
    total = np.complex128(0)
    step = 1j / (2.0 * z)
    power = np.complex128(1)
    for coefficient in _hankel_coefficients(n):
        total += coefficient * power
        power *= step
    return (-1j) ** (n + 1) * np.exp(1j * z) / z * total


def hankel1_table(nmax: int, z: complex) -> np.ndarray:
    """Return ``[h_0(z), ..., h_nmax(z)]`` for the spherical Hankel function of the first kind.

    Orders 0 and 1 use their closed forms, higher orders the upward recurrence.
    When ``Im z > 0`` and the order is below ``|z|``, ``h_n`` is the decaying
    solution and the recurrence would amplify rounding, so those orders are
    summed from the finite polynomial form instead.
    """
    _check_order(nmax)
    z = _check_argument(z)
    _check_nonzero(z)
    table = np.zeros(nmax + 1, dtype=complex)
    w = np.complex128(z)
    # Overflow near the origin surfaces as inf and is rejected below
    with np.errstate(all="ignore"):
        phase = np.exp(1j * w)
        table[0] = -1j * phase / w
        if nmax >= 1:
            table[1] = -phase * (w + 1j) / w**2
        upward_stable = z.imag <= 0
        for k in range(1, nmax):
            if upward_stable or k + 1 > abs(z):
                table[k + 1] = (2 * k + 1) / w * table[k] - table[k - 1]
            else:
                table[k + 1] = _hankel_polynomial(k + 1, w)
    return _ensure_finite(table, "h_n", z)


def sph_bessel_j(order: int, z: complex) -> complex:
    """Spherical Bessel function of the first kind ``j_n(z)``."""
    _check_order(order)
    z = _check_argument(z)
    if order == 0:
        return complex(_ensure_finite(np.array([_j0(z)]), "j_0", z)[0])
    if order == 1 and abs(z) >= _CLOSED_FORM_J1_MIN:
        return complex(_ensure_finite(np.array([_j1_closed(z)]), "j_1", z)[0])
    return complex(bessel_j_table(order, z)[order])


def sph_hankel1(order: int, z: complex) -> complex:
    """Spherical Hankel function of the first kind ``h_n(z) = j_n(z) + i y_n(z)``."""
    _check_order(order)
    return complex(hankel1_table(order, z)[order])


def riccati_derivative_table(kind: BesselKind, nmax: int, z: complex) -> np.ndarray:
    """Return ``(1/z) d[z f_n(z)]/dz`` for ``n = 0..nmax``, with ``f`` given by ``kind``."""
    _check_order(nmax)
    z = _check_argument(z)
    _check_nonzero(z)
    # D f_0 = f_0/z - f_1, D f_n = f_{n-1} - n f_n/z
    table = _function_table(kind, max(nmax, 1), z)
    derivative = np.empty(nmax + 1, dtype=complex)
    derivative[0] = table[0] / z - table[1]
    orders = np.arange(1, nmax + 1)
    derivative[1:] = table[:nmax] - orders * table[1 : nmax + 1] / z
    return derivative


def _function_table(kind: BesselKind, nmax: int, z: complex) -> np.ndarray:
    if kind == "J":
        return bessel_j_table(nmax, z)
    if kind == "H":
        return hankel1_table(nmax, z)
    raise DomainError(f"Unknown Bessel kind: {kind!r}. Expected 'J' or 'H'")


def riccati_derivative(kind: BesselKind, order: int, z: complex) -> complex:
    """Riccati derivative ``(1/z) d[z f_n(z)]/dz = f_n(z)/z + f_n'(z)``."""
    _check_order(order)
    return complex(riccati_derivative_table(kind, order, z)[order])


def assoc_legendre(n: int, m: int, x: float) -> float:
    """Associated Legendre function ``P_n^m(x)`` without the Condon-Shortley phase."""
    _check_legendre_indices(n, m)
    if not -1.0 <= x <= 1.0:
        raise DomainError(f"Legendre argument must lie in [-1, 1], got {x!r}")
    # scipy includes the (-1)^m phase
    return float((-1) ** m * special.lpmv(m, n, x))


def _check_legendre_indices(n: int, m: int) -> None:
    if n < 0:
        raise DomainError(f"Degree must be non-negative, got {n}")
    if not 0 <= m <= n:
        raise DomainError(f"Order m must satisfy 0 <= m <= n, got m={m}, n={n}")


def _legendre_or_zero(n: int, m: int, x: float) -> float:
    return assoc_legendre(n, m, x) if 0 <= m <= n else 0.0


def legendre_dtheta(n: int, m: int, theta: float) -> float:
    """Return ``d P_n^m(cos theta) / d theta``."""
    _check_legendre_indices(n, m)
    x = float(np.clip(math.cos(theta), -1.0, 1.0))
    if m == 0:
        return -_legendre_or_zero(n, 1, x)
    return 0.5 * (
        (n + m) * (n - m + 1) * _legendre_or_zero(n, m - 1, x) - _legendre_or_zero(n, m + 1, x)
    )


def legendre_m_over_sin(n: int, m: int, theta: float) -> float:
    """Return ``m P_n^m(cos theta) / sin theta``, using the analytic limit on the polar axis."""
    _check_legendre_indices(n, m)
    if m == 0:
        return 0.0
    sin_theta = math.sin(theta)
    if abs(sin_theta) < _POLE_TOLERANCE:
        if m > 1:
            return 0.0
        # P_n^1(cos theta) / sin theta -> P_n'(+-1)
        sign = 1.0 if math.cos(theta) > 0 else (-1.0) ** (n + 1)
        return sign * n * (n + 1) / 2.0
    x = float(np.clip(math.cos(theta), -1.0, 1.0))
    return m * assoc_legendre(n, m, x) / sin_theta
