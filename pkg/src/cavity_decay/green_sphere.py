"""Green tensor of an empty spherical cavity inside a homogeneous dielectric.

Region 1 is the surrounding medium (``k1 = sqrt(eps) omega / c``), region 2 the
empty cavity (``k2 = omega / c``). Only observation and source points inside the
cavity are supported. The vacuum part of the cavity Green tensor comes from
:mod:`cavity_decay.green_bulk` with ``eps = 1``; this module produces the
scattering part added by the cavity wall.
"""

import math
from collections.abc import Collection
from dataclasses import dataclass
from typing import Literal

import mpmath
import numpy as np
import structlog

from cavity_decay.constants import (
    EPS_VACUUM_CUTOFF,
    EXPANSION_MAX_Z,
    MAX_ORDER,
    SERIES_EXTRA_ORDERS,
    SERIES_TOLERANCE,
)
from cavity_decay.dielectric import ComplexPermittivity, refractive_index
from cavity_decay.errors import ConvergenceError, DomainError
from cavity_decay.green_bulk import GreenTensorValue
from cavity_decay.specfun import (
    assoc_legendre,
    bessel_j_table,
    hankel1_table,
    legendre_dtheta,
    legendre_m_over_sin,
    riccati_derivative_table,
)

logger = structlog.get_logger(__name__)

RadiusMode = Literal["absolute", "fraction-of-lambda"]
Parity = Literal["even", "odd"]
Branch = Literal["M", "N"]

# Below this z the closed-form denominator is summed as a power series
_SERIES_Z = 0.5
_SERIES_TERMS = 12


@dataclass(frozen=True)
class CavityGeometry:
    """Cavity radius, either absolute (in ``c / omega_ref``) or as a fraction of ``lambda_A``."""

    radius_mode: RadiusMode
    radius_value: float

    def __post_init__(self) -> None:
        if self.radius_mode not in ("absolute", "fraction-of-lambda"):
            raise DomainError(
                f"Unsupported radius mode: {self.radius_mode}. "
                "Supported modes: ['absolute', 'fraction-of-lambda']"
            )
        if not (math.isfinite(self.radius_value) and self.radius_value > 0):
            raise DomainError(f"Cavity radius must be positive, got {self.radius_value!r}")

    @classmethod
    def absolute(cls, radius: float) -> "CavityGeometry":
        return cls("absolute", radius)

    @classmethod
    def fraction_of_wavelength(cls, fraction: float) -> "CavityGeometry":
        return cls("fraction-of-lambda", fraction)

    def size_parameter(self, omega: float) -> float:
        """Dimensionless ``z = omega R / c``; constant ``2 pi R/lambda`` in fraction mode."""
        if self.radius_mode == "fraction-of-lambda":
            return 2.0 * math.pi * self.radius_value
        _check_frequency(omega)
        return omega * self.radius_value

    def radius(self, omega: float) -> float:
        """Radius in reference length units at transition frequency ``omega``."""
        _check_frequency(omega)
        if self.radius_mode == "fraction-of-lambda":
            return self.radius_value * 2.0 * math.pi / omega
        return self.radius_value


@dataclass(frozen=True)
class MieCoefficients:
    """Reflection coefficients of one multipole order: ``c_M`` (TE) and ``c_N`` (TM)."""

    order: int
    c_M: complex
    c_N: complex


@dataclass(frozen=True)
class ReflectionBuildingBlocks:
    """The quotients whose combination ``T_F R_P / T_P`` gives the coefficients.

    ``*_H`` belong to the TE (``c_M``) set and ``*_V`` to the TM (``c_N``) set.
    """

    order: int
    r_p_H: complex
    r_p_V: complex
    t_p_H: complex
    t_p_V: complex
    t_f_H: complex
    t_f_V: complex

    @property
    def c_M(self) -> complex:
        return self.t_f_H * self.r_p_H / self.t_p_H

    @property
    def c_N(self) -> complex:
        return self.t_f_V * self.r_p_V / self.t_p_V


@dataclass(frozen=True)
class SphericalPoint:
    """Point in spherical coordinates centred on the cavity."""

    r: float
    theta: float
    phi: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.r) and self.r >= 0):
            raise DomainError(f"Radial coordinate must be non-negative, got {self.r!r}")
        if not 0.0 <= self.theta <= math.pi:
            raise DomainError(f"Polar angle must lie in [0, pi], got {self.theta!r}")
        if not math.isfinite(self.phi):
            raise DomainError(f"Azimuth must be finite, got {self.phi!r}")
        object.__setattr__(self, "phi", self.phi % (2.0 * math.pi))

    @classmethod
    def from_cartesian(cls, x: float, y: float, z: float) -> "SphericalPoint":
        r = math.sqrt(x * x + y * y + z * z)
        if r == 0.0:
            return cls(0.0, 0.0, 0.0)
        theta = math.acos(max(-1.0, min(1.0, z / r)))
        return cls(r, theta, math.atan2(y, x))

    @property
    def cartesian(self) -> np.ndarray:
        sin_theta = math.sin(self.theta)
        return self.r * np.array(
            [sin_theta * math.cos(self.phi), sin_theta * math.sin(self.phi), math.cos(self.theta)]
        )

    def unit_vectors(self) -> np.ndarray:
        """Rows ``e_r``, ``e_theta``, ``e_phi`` in Cartesian components."""
        st, ct = math.sin(self.theta), math.cos(self.theta)
        sp, cp = math.sin(self.phi), math.cos(self.phi)
        return np.array(
            [
                [st * cp, st * sp, ct],
                [ct * cp, ct * sp, -st],
                [-sp, cp, 0.0],
            ]
        )


def _check_frequency(omega: float) -> None:
    if not (math.isfinite(omega) and omega > 0):
        raise DomainError(f"Frequency must be positive and finite, got {omega!r}")


def _is_vacuum(eps: ComplexPermittivity) -> bool:
    return abs(eps.value - 1.0) < EPS_VACUUM_CUTOFF


def _check_permittivity(eps: ComplexPermittivity) -> None:
    if eps.value == 0:
        raise DomainError("Reflection coefficients are undefined for eps = 0")


def _wave_numbers(omega: float, eps: ComplexPermittivity) -> tuple[complex, float]:
    return refractive_index(eps).value * omega, omega


def _bessel_tables(nmax: int, x: complex) -> tuple[np.ndarray, ...]:
    return (
        bessel_j_table(nmax, x),
        hankel1_table(nmax, x),
        riccati_derivative_table("J", nmax, x),
        riccati_derivative_table("H", nmax, x),
    )


def reflection_building_blocks(
    order: int, omega: float, eps: ComplexPermittivity, geom: CavityGeometry
) -> ReflectionBuildingBlocks:
    """Evaluate the six quotients for one order.

    The denominators of the two ``T_F`` quotients are those of the boundary-value
    solution (tangential E and H continuous at ``r = R``), so that
    ``T_F R_P / T_P`` reduces to :func:`mie_coefficients`.
    """
    _check_order(order)
    _check_permittivity(eps)
    k1, k2 = _wave_numbers(omega, eps)
    radius = geom.radius(omega)
    j1, h1, dj1, dh1 = (table[order] for table in _bessel_tables(order, k1 * radius))
    j2, h2, dj2, dh2 = (table[order] for table in _bessel_tables(order, k2 * radius))

    denominator_p_H = k2 * j1 * dh2 - k1 * dj1 * h2
    denominator_p_V = k2 * dj1 * h2 - k1 * j1 * dh2
    wronskian_2 = dj2 * h2 - j2 * dh2
    return ReflectionBuildingBlocks(
        order=order,
        r_p_H=complex((k2 * dh2 * h1 - k1 * dh1 * h2) / denominator_p_H),
        r_p_V=complex((k2 * h2 * dh1 - k1 * h1 * dh2) / denominator_p_V),
        t_p_H=complex(-k2 * wronskian_2 / denominator_p_H),
        t_p_V=complex(k2 * wronskian_2 / denominator_p_V),
        t_f_H=complex(-k2 * wronskian_2 / (k1 * j2 * dh1 - k2 * dj2 * h1)),
        t_f_V=complex(k2 * wronskian_2 / (k1 * dj2 * h1 - k2 * j2 * dh1)),
    )


def _check_order(order: int) -> None:
    if isinstance(order, bool) or not isinstance(order, int | np.integer) or order < 1:
        raise DomainError(f"Multipole order must be an integer >= 1, got {order!r}")
    if order > MAX_ORDER:
        raise DomainError(f"Multipole order {order} exceeds the maximum {MAX_ORDER}")


def mie_coefficient_table(
    nmax: int, omega: float, eps: ComplexPermittivity, geom: CavityGeometry
) -> list[MieCoefficients]:
    """Coefficients for orders ``1..nmax``.

    Numerator and denominator are divided by the medium Hankel function, which
    keeps the high orders finite at small ``z`` where the raw products overflow.
    """
    _check_order(nmax)
    _check_permittivity(eps)
    if _is_vacuum(eps):
        return [MieCoefficients(n, 0j, 0j) for n in range(1, nmax + 1)]

    k1, k2 = _wave_numbers(omega, eps)
    radius = geom.radius(omega)
    _, h1, _, dh1 = _bessel_tables(nmax, k1 * radius)
    j2, h2, dj2, dh2 = _bessel_tables(nmax, k2 * radius)
    log_h1 = dh1 / h1
    log_h2 = dh2 / h2
    c_N = h2 * (k2 * log_h1 - k1 * log_h2) / (k1 * dj2 - k2 * j2 * log_h1)
    c_M = h2 * (k1 * log_h1 - k2 * log_h2) / (k2 * dj2 - k1 * j2 * log_h1)
    return [
        MieCoefficients(n, complex(c_M[n]), complex(c_N[n])) for n in range(1, nmax + 1)
    ]


def mie_coefficients(
    order: int, omega: float, eps: ComplexPermittivity, geom: CavityGeometry
) -> MieCoefficients:
    """Reflection coefficients ``C_n^M`` and ``C_n^N`` of the cavity wall for one order."""
    _check_order(order)
    return mie_coefficient_table(order, omega, eps, geom)[-1]


def _s1_over_z3(z: float) -> float:
    # (sin z - z cos z) / z^3
    if z < _SERIES_Z:
        return sum(
            (-1) ** (k + 1) * 2 * k * z ** (2 * k - 2) / math.factorial(2 * k + 1)
            for k in range(1, _SERIES_TERMS)
        )
    return (math.sin(z) - z * math.cos(z)) / z**3


def _c1n_closed_mp(eps: ComplexPermittivity, z: float, dps: int) -> mpmath.mpc:
    with mpmath.workdps(dps):
        n = mpmath.sqrt(mpmath.mpc(eps.eps_re, eps.eps_im))
        zz = mpmath.mpf(z)
        i = mpmath.mpc(0, 1)
        numerator = (i + zz * (n + 1) - i * zz**2 * n - zz**3 * n**2 / (n + 1)) * mpmath.exp(
            i * zz
        )
        denominator = (
            mpmath.sin(zz)
            - zz * (mpmath.cos(zz) + i * n * mpmath.sin(zz))
            + i * zz**2 * n * mpmath.cos(zz)
            - zz**3 * (mpmath.cos(zz) - i * n * mpmath.sin(zz)) * n**2 / (n**2 - 1)
        )
        return +(numerator / denominator)


def c1N_exact(
    omega: float, eps: ComplexPermittivity, geom: CavityGeometry, dps: int | None = None
) -> complex | mpmath.mpc:
    """Closed-form dipole TM coefficient ``C_1^N`` at ``z = omega R / c``.

    In double precision the denominator is regrouped as
    ``(sin z - z cos z)(1 - i n z) - z^3 eps (cos z - i n sin z) / (eps - 1)``
    to avoid the cancellation of its leading terms. The result equals the order-1
    ``c_N`` of :func:`mie_coefficients`, which serves as its cross-check. With ``dps``
    the unregrouped form is evaluated by mpmath at that many decimal digits and an
    ``mpc`` is returned.
    """
    z = geom.size_parameter(omega)
    _check_permittivity(eps)
    if _is_vacuum(eps):
        return mpmath.mpc(0) if dps is not None else 0j
    if dps is not None:
        return _c1n_closed_mp(eps, z, dps)

    n = refractive_index(eps).value
    numerator = 1j + z * (n + 1) - 1j * z**2 * n - z**3 * n**2 / (n + 1)
    reduced_denominator = _s1_over_z3(z) * (1 - 1j * n * z) - eps.value * (
        math.cos(z) - 1j * n * math.sin(z)
    ) / (eps.value - 1.0)
    return complex(np.exp(1j * z) * numerator / (z**3 * reduced_denominator))


def c1N_series(
    omega: float, eps: ComplexPermittivity, geom: CavityGeometry, dps: int | None = None
) -> complex | mpmath.mpc:
    """Small-``z`` expansion of ``C_1^N`` through order ``z^0``."""
    z = geom.size_parameter(omega)
    if z > EXPANSION_MAX_Z:
        raise DomainError(
            f"Size parameter z={z:.4g} too large for the small-cavity expansion "
            f"(z <= {EXPANSION_MAX_Z})"
        )
    n = refractive_index(eps).value
    e = eps.value
    if dps is not None:
        with mpmath.workdps(dps):
            e = mpmath.mpc(eps.eps_re, eps.eps_im)
            n = mpmath.sqrt(e)
            z = mpmath.mpf(z)
            return +_series_terms(e, n, z, mpmath.mpc(0, 1))
    return complex(_series_terms(e, n, z, 1j))


def _series_terms(e, n, z, i):
    denominator = 2 * e + 1
    return (
        -3 * i * (e - 1) / denominator / z**3
        - 9 * i / 5 * (4 * e**2 - 3 * e - 1) / denominator**2 / z
        + 9 * e**2 * n / denominator**2
        - 1
    )


def _trig(parity: Parity, m: int, phi: float) -> tuple[float, float]:
    """Azimuthal factor and the partner that multiplies the ``m / sin(theta)`` components."""
    if parity == "even":
        return math.cos(m * phi), -math.sin(m * phi)
    if parity == "odd":
        return math.sin(m * phi), math.cos(m * phi)
    raise DomainError(f"Unknown parity: {parity!r}. Expected 'even' or 'odd'")


def _check_indices(n: int, m: int) -> None:
    if n < 1 or not 0 <= m <= n:
        raise DomainError(
            f"Debye potential indices must satisfy n >= 1 and 0 <= m <= n, got n={n}, m={m}"
        )


@dataclass(frozen=True)
class _Radial:
    """``j_n(x)``, ``j_n(x)/x`` and the Riccati derivative of ``j_n`` at ``x = k r``."""

    j: complex
    j_over_x: complex
    derivative: complex


@dataclass(frozen=True)
class _Angular:
    """``P_n^m``, ``m P_n^m / sin(theta)`` and ``dP_n^m/dtheta`` at one polar angle."""

    p: float
    p_over_sin: float
    dp: float

    @classmethod
    def at(cls, n: int, m: int, theta: float) -> "_Angular":
        return cls(
            assoc_legendre(n, m, math.cos(theta)),
            legendre_m_over_sin(n, m, theta),
            legendre_dtheta(n, m, theta),
        )


def _radial_table(nmax: int, x: complex) -> list[_Radial]:
    if x == 0:
        # j_n(x)/x -> 1/3 and D j_n -> 2/3 for n = 1, both vanish above
        return [
            _Radial(0j, 1.0 / 3.0 if n == 1 else 0j, 2.0 / 3.0 if n == 1 else 0j)
            for n in range(nmax + 1)
        ]
    j = bessel_j_table(nmax, x)
    derivative = riccati_derivative_table("J", nmax, x)
    return [
        _Radial(complex(j[n]), complex(j[n] / x), complex(derivative[n]))
        for n in range(nmax + 1)
    ]


def _components(
    parity: Parity, n: int, m: int, phi: float, radial: _Radial, angular: _Angular
) -> tuple[np.ndarray, np.ndarray]:
    trig, partner = _trig(parity, m, phi)
    m_field = np.array(
        [0j, radial.j * angular.p_over_sin * partner, -radial.j * angular.dp * trig]
    )
    n_field = np.array(
        [
            n * (n + 1) * radial.j_over_x * angular.p * trig,
            radial.derivative * angular.dp * trig,
            radial.derivative * angular.p_over_sin * partner,
        ]
    )
    return m_field, n_field


def debye_M(parity: Parity, n: int, m: int, point: SphericalPoint, k: complex) -> np.ndarray:
    """TE vector Debye potential ``curl(psi r)``; spherical components ``(r, theta, phi)``."""
    _check_indices(n, m)
    radial = _radial_table(n, k * point.r)[n]
    m_field, _ = _components(parity, n, m, point.phi, radial, _Angular.at(n, m, point.theta))
    return m_field


def debye_N(parity: Parity, n: int, m: int, point: SphericalPoint, k: complex) -> np.ndarray:
    """TM vector Debye potential ``curl curl(psi r) / k``; spherical components."""
    _check_indices(n, m)
    if k == 0:
        raise DomainError("Wave number must be non-zero for the TM potential")
    radial = _radial_table(n, k * point.r)[n]
    _, n_field = _components(parity, n, m, point.phi, radial, _Angular.at(n, m, point.theta))
    return n_field


def _series_weight(n: int, m: int) -> float:
    return (
        (2 * n + 1)
        / (n * (n + 1))
        * math.factorial(n - m)
        / math.factorial(n + m)
        * (1 if m == 0 else 2)
    )


class _PointFields:
    """Cartesian Debye potentials of one point, radial factors shared across orders."""

    def __init__(self, point: SphericalPoint, k: float, nmax: int) -> None:
        self.point = point
        self.basis = point.unit_vectors()
        self.radial = _radial_table(nmax, k * point.r)

    def fields(self, n: int, m: int) -> tuple[np.ndarray, np.ndarray]:
        """``M`` and ``N`` for the even and odd parity, shape ``(2, 3)`` each."""
        angular = _Angular.at(n, m, self.point.theta)
        m_fields = np.empty((2, 3), dtype=complex)
        n_fields = np.empty((2, 3), dtype=complex)
        for index, parity in enumerate(("even", "odd")):
            m_field, n_field = _components(
                parity, n, m, self.point.phi, self.radial[n], angular
            )
            m_fields[index] = m_field @ self.basis
            n_fields[index] = n_field @ self.basis
        return m_fields, n_fields


def scattering_green(
    r1: SphericalPoint,
    r2: SphericalPoint,
    omega: float,
    eps: ComplexPermittivity,
    geom: CavityGeometry,
    tol: float = SERIES_TOLERANCE,
    n_max: int | None = None,
    branches: Collection[Branch] = ("M", "N"),
) -> GreenTensorValue:
    """Scattering part of the cavity Green tensor for two interior points.

    The multipole series is summed order by order until the latest order's
    largest entry falls below ``tol`` times the largest entry of the running sum.
    Without ``n_max`` the sum is capped at ``ceil(z) + 20`` orders and
    :class:`ConvergenceError` is raised if the tolerance is not met by then.
    """
    _check_frequency(omega)
    if not tol > 0:
        raise DomainError(f"Tolerance must be positive, got {tol!r}")
    radius = geom.radius(omega)
    for point in (r1, r2):
        if point.r >= radius:
            raise DomainError(
                f"Point at r={point.r:.6g} is not strictly inside the cavity of radius {radius:.6g}"
            )
    _check_permittivity(eps)
    if _is_vacuum(eps):
        return GreenTensorValue(np.zeros((3, 3), dtype=complex), "scattering")

    z = geom.size_parameter(omega)
    capped = n_max is None
    order_cap = min(math.ceil(z) + SERIES_EXTRA_ORDERS, MAX_ORDER) if capped else n_max
    _check_order(order_cap)

    coefficients = mie_coefficient_table(order_cap, omega, eps, geom)
    k = omega
    first = _PointFields(r1, k, order_cap)
    second = _PointFields(r2, k, order_cap)
    use_M = "M" in branches
    use_N = "N" in branches

    total = np.zeros((3, 3), dtype=complex)
    residual = math.inf
    for coefficient in coefficients:
        n = coefficient.order
        term = np.zeros((3, 3), dtype=complex)
        for m in range(n + 1):
            weight = _series_weight(n, m)
            m_first, n_first = first.fields(n, m)
            m_second, n_second = second.fields(n, m)
            if use_M:
                term += weight * coefficient.c_M * np.einsum("pi,pj->ij", m_first, m_second)
            if use_N:
                term += weight * coefficient.c_N * np.einsum("pi,pj->ij", n_first, n_second)
        total += term
        scale = np.max(np.abs(total))
        size = np.max(np.abs(term))
        residual = size / scale if scale > 0 else 0.0
        if residual < tol:
            logger.debug("Cavity series converged", order=n, residual=residual)
            break
    else:
        if capped:
            logger.error("Cavity series did not converge", order=order_cap, residual=residual)
            raise ConvergenceError(
                "Cavity Green-tensor series did not converge", residual=residual, order=order_cap
            )

    return GreenTensorValue(1j * omega / (4.0 * math.pi) * total, "scattering")


def scattering_green_center(
    omega: float, eps: ComplexPermittivity, geom: CavityGeometry
) -> GreenTensorValue:
    """Scattering tensor at the cavity centre: ``i omega C_1^N / (6 pi c)`` times identity."""
    _check_frequency(omega)
    coefficient = c1N_exact(omega, eps, geom)
    entries = 1j * omega / (6.0 * math.pi) * coefficient * np.eye(3, dtype=complex)
    return GreenTensorValue(entries, "scattering")
