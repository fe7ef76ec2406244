"""Dyadic Green tensor of a homogeneous dielectric.

Reduced units: ``c = 1``, frequencies in the model's reference unit, lengths in
``c / omega_ref``. The tensors below are the bulk Green tensor with the
``c**2 / omega**2`` factor written out, so ``G`` carries units of inverse length.
"""

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np
import structlog

from cavity_decay.constants import SMALL_ARGUMENT_LIMIT
from cavity_decay.dielectric import ComplexPermittivity, refractive_index
from cavity_decay.errors import DomainError

logger = structlog.get_logger(__name__)

TensorPart = Literal["longitudinal", "transverse", "total", "scattering"]

IDENTITY = np.eye(3, dtype=complex)
# Below this |k rho| the closed form loses digits and the power series takes over
_SERIES_LIMIT = 0.5
_SERIES_TERMS = 30


@dataclass(frozen=True, eq=False)
class Separation:
    """Relative position ``rho = r - r'`` of observation and source point."""

    rho_vec: np.ndarray

    def __post_init__(self) -> None:
        vector = np.asarray(self.rho_vec, dtype=float)
        if vector.shape != (3,) or not np.all(np.isfinite(vector)):
            raise DomainError(f"Separation must be a finite 3-vector, got {self.rho_vec!r}")
        if not np.any(vector):
            raise DomainError(
                "Separation must be non-zero; use the coincidence limits for rho = 0"
            )
        object.__setattr__(self, "rho_vec", vector)

    @classmethod
    def between(cls, r: np.ndarray, r_prime: np.ndarray) -> "Separation":
        return cls(np.asarray(r, dtype=float) - np.asarray(r_prime, dtype=float))

    @property
    def rho(self) -> float:
        return float(np.linalg.norm(self.rho_vec))

    @property
    def unit(self) -> np.ndarray:
        return self.rho_vec / self.rho

    def reversed(self) -> "Separation":
        return Separation(-self.rho_vec)


@dataclass(frozen=True, eq=False)
class GreenTensorValue:
    """Complex 3x3 Green tensor with a label for the part it represents.

    ``contact_term`` marks a longitudinal part whose ``delta(rho)`` term exists
    but is not included in ``entries``.
    """

    entries: np.ndarray
    part: TensorPart
    contact_term: bool = False

    def __post_init__(self) -> None:
        entries = np.asarray(self.entries, dtype=complex)
        if entries.shape != (3, 3):
            raise DomainError(f"Green tensor must be 3x3, got shape {entries.shape}")
        object.__setattr__(self, "entries", entries)

    def __add__(self, other: "GreenTensorValue") -> "GreenTensorValue":
        if not isinstance(other, GreenTensorValue):
            return NotImplemented
        part = self.part if self.part == other.part else "total"
        return GreenTensorValue(
            self.entries + other.entries, part, self.contact_term or other.contact_term
        )

    @property
    def diagonal(self) -> np.ndarray:
        return np.diagonal(self.entries).copy()

    @property
    def transpose(self) -> "GreenTensorValue":
        return GreenTensorValue(self.entries.T, self.part, self.contact_term)

    def contract(self, left: np.ndarray, right: np.ndarray) -> complex:
        """Return ``left . G . right``."""
        return complex(np.asarray(left) @ self.entries @ np.asarray(right))


def _check_frequency(omega: float) -> None:
    if not (math.isfinite(omega) and omega > 0):
        raise DomainError(f"Frequency must be positive and finite, got {omega!r}")


def wave_number(omega: float, eps: ComplexPermittivity) -> complex:
    """Complex wave number ``k = sqrt(eps) omega / c`` on the branch ``Im k >= 0``."""
    _check_frequency(omega)
    return refractive_index(eps).value * omega


def green_longitudinal(
    sep: Separation, omega: float, eps: ComplexPermittivity
) -> GreenTensorValue:
    """Longitudinal part ``-(delta - 3 rho_hat rho_hat) / (4 pi omega^2 eps rho^3)``."""
    _check_frequency(omega)
    if eps.value == 0:
        raise DomainError("Longitudinal Green tensor is undefined for eps = 0")
    unit = sep.unit
    angular = IDENTITY - 3.0 * np.outer(unit, unit)
    entries = -angular / (4.0 * math.pi * omega**2 * eps.value * sep.rho**3)
    return GreenTensorValue(entries, "longitudinal", contact_term=True)


def _transverse_factors(x: complex) -> tuple[complex, complex]:
    """Return ``A(x)/x^2`` and ``B(x)/x^2`` of the transverse tensor."""
    if abs(x) < _SERIES_LIMIT:
        a_over = 0j
        b_over = 0j
        power = 1.0 + 0j
        for p in range(2, _SERIES_TERMS):
            term = -(1j**p) * power / math.factorial(p)
            a_over += term * (p - 1) ** 2
            b_over += term * (p - 1) * (p - 3)
            power *= x
        return a_over, b_over
    phase = np.exp(1j * x)
    a_value = 1.0 + (x**2 + 1j * x - 1.0) * phase
    b_value = 3.0 + (x**2 + 3j * x - 3.0) * phase
    return complex(a_value / x**2), complex(b_value / x**2)


def green_transverse(sep: Separation, omega: float, eps: ComplexPermittivity) -> GreenTensorValue:
    """Transverse part, exact in ``k rho``.

    ``G = [A(x) delta - B(x) rho_hat rho_hat] / (4 pi k^2 rho^3)`` with ``x = k rho``,
    ``A = 1 + (x^2 + i x - 1) e^{ix}`` and ``B = 3 + (x^2 + 3 i x - 3) e^{ix}``.
    """
    k = wave_number(omega, eps)
    rho = sep.rho
    unit = sep.unit
    a_over, b_over = _transverse_factors(k * rho)
    entries = (a_over * IDENTITY - b_over * np.outer(unit, unit)) / (4.0 * math.pi * rho)
    return GreenTensorValue(entries, "transverse")


def green_transverse_small(
    sep: Separation, omega: float, eps: ComplexPermittivity
) -> GreenTensorValue:
    """Leading small-``|k rho|`` form of the transverse part.

    ``(1/4 pi) [rho_hat rho_hat / (2 rho) + delta / (2 rho) + (2 i omega / 3) n delta]``
    """
    n = refractive_index(eps).value
    k = wave_number(omega, eps)
    rho = sep.rho
    if abs(k * rho) > SMALL_ARGUMENT_LIMIT:
        logger.warning(
            "Small-argument transverse tensor used outside its range",
            k_rho=abs(k * rho),
            limit=SMALL_ARGUMENT_LIMIT,
        )
    unit = sep.unit
    entries = (
        np.outer(unit, unit) / (2.0 * rho)
        + IDENTITY / (2.0 * rho)
        + (2j * omega / 3.0) * n * IDENTITY
    ) / (4.0 * math.pi)
    return GreenTensorValue(entries, "transverse")


def green_total(sep: Separation, omega: float, eps: ComplexPermittivity) -> GreenTensorValue:
    """Full bulk tensor, longitudinal plus transverse, excluding the contact term."""
    return green_longitudinal(sep, omega, eps) + green_transverse(sep, omega, eps)


def im_green_vacuum_coincidence(omega: float) -> float:
    """``Im G_kk(r, r, omega) = omega / (6 pi c)`` in vacuum."""
    _check_frequency(omega)
    return omega / (6.0 * math.pi)


def im_green_medium_coincidence(omega: float, eps: ComplexPermittivity) -> float:
    """``Im G_kk(r, r, omega) = omega eta / (6 pi c)`` of the transverse part in the bulk medium."""
    _check_frequency(omega)
    return omega * refractive_index(eps).eta / (6.0 * math.pi)
