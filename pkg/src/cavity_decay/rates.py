"""Spontaneous-decay rates of a two-level atom in an absorbing dielectric.

Every rate is returned relative to the free-space rate ``Gamma_0``. The
virtual-cavity model uses the local field ``E + P / 3 eps_0`` and the real-cavity
model an empty sphere around the atom.
"""

import math
from dataclasses import asdict, dataclass, field
from typing import Literal

import numpy as np
import structlog
from scipy import constants as si

from cavity_decay.constants import EXPANSION_MAX_Z, MARKOV_FAIL_Z, MARKOV_WARN_Z
from cavity_decay.dielectric import (
    ComplexPermittivity,
    DielectricModel,
    StaticPermittivityCheck,
    refractive_index,
    static_permittivity_check,
)
from cavity_decay.errors import DomainError
from cavity_decay.green_bulk import im_green_vacuum_coincidence
from cavity_decay.green_sphere import CavityGeometry, c1N_exact, scattering_green_center

logger = structlog.get_logger(__name__)


@dataclass(frozen=True)
class AtomicTransition:
    """Transition frequency ``omega_A`` and, for absolute rates, the dipole moment ``mu``.

    In reduced use ``omega_A`` is in reference units. For :func:`gamma0` with
    ``absolute=True`` it must be in rad/s and ``mu`` in C m.
    """

    omega_A: float
    mu: float | None = None

    def __post_init__(self) -> None:
        if not (math.isfinite(self.omega_A) and self.omega_A > 0):
            raise DomainError(f"Transition frequency must be positive, got {self.omega_A!r}")
        if self.mu is not None and not (math.isfinite(self.mu) and self.mu >= 0):
            raise DomainError(f"Dipole moment must be non-negative, got {self.mu!r}")


@dataclass(frozen=True)
class BaselineRates:
    """Uncorrected rate ``eta`` and the local-field factors of both models."""

    n_gamma0: float
    cm_factor: float
    gl_factor: float
    abs_cm: float
    abs_gl: float

    @property
    def cm_rate(self) -> float:
        return self.n_gamma0 * self.cm_factor

    @property
    def gl_rate(self) -> float:
        return self.n_gamma0 * self.gl_factor

    @property
    def abs_cm_rate(self) -> float:
        return self.n_gamma0 * self.abs_cm

    @property
    def abs_gl_rate(self) -> float:
        return self.n_gamma0 * self.abs_gl


@dataclass(frozen=True)
class CMRates:
    total: float
    perp: float
    par: float


@dataclass(frozen=True)
class GLTerms:
    """Real-cavity rate expanded in the size parameter: ``z^-3``, ``z^-1`` and ``z^0`` terms."""

    r_minus3: float
    r_minus1: float
    r0: float

    @property
    def total(self) -> float:
        return self.r_minus3 + self.r_minus1 + self.r0


@dataclass(frozen=True)
class NearFieldRates:
    """The ``R^-3`` dipole-dipole transfer part of each model."""

    cm: float
    gl: float


@dataclass(frozen=True)
class MarkovValidity:
    status: Literal["ok", "warn", "fail"]
    z: float

    @property
    def ok(self) -> bool:
        return self.status == "ok"


@dataclass(frozen=True)
class Validity:
    markov_ok: bool
    static_eps_ok: bool
    markov: MarkovValidity
    small_cavity_ok: bool = True
    cm_perp_positive: bool = True


@dataclass(frozen=True)
class DecayRateBreakdown:
    """All rates of one transition, each relative to ``Gamma_0``."""

    gamma_cm_total: float
    gamma_cm_perp: float
    gamma_cm_par: float
    gamma_gl_exact: float
    gamma_gl_expanded: float
    gl_terms: GLTerms
    baselines: BaselineRates
    validity: Validity
    gl_longitudinal: float = 0.0
    near_field: NearFieldRates | None = field(default=None)

    def absolute(self, gamma0_si: float) -> dict[str, float]:
        """Scale the rates by a free-space rate given in 1/s."""
        names = (
            "gamma_cm_total",
            "gamma_cm_perp",
            "gamma_cm_par",
            "gamma_gl_exact",
            "gamma_gl_expanded",
        )
        scaled = {name: getattr(self, name) * gamma0_si for name in names}
        scaled.update(
            {f"gl_{key}": value * gamma0_si for key, value in asdict(self.gl_terms).items()}
        )
        return scaled


def gamma0(t: AtomicTransition, absolute: bool = False) -> float:
    """Free-space rate ``omega_A^3 mu^2 / (3 pi hbar eps_0 c^3)``.

    Reduced mode returns 1, the unit every other rate is expressed in.
    """
    if not absolute:
        return 1.0
    if t.mu is None:
        raise DomainError("Absolute free-space rate needs the dipole moment mu (C m)")
    return t.omega_A**3 * t.mu**2 / (3.0 * math.pi * si.hbar * si.epsilon_0 * si.c**3)


def baseline_rates(eps: ComplexPermittivity) -> BaselineRates:
    """Uncorrected rate and local-field factors.

    The real-index factors use ``eta`` in place of ``n``, the absolute-value
    variants the complex ``n**2 = eps``.
    """
    eta = refractive_index(eps).eta
    e = eps.value
    return BaselineRates(
        n_gamma0=eta,
        cm_factor=((eta**2 + 2.0) / 3.0) ** 2,
        gl_factor=(3.0 * eta**2 / (2.0 * eta**2 + 1.0)) ** 2,
        abs_cm=abs((e + 2.0) / 3.0) ** 2,
        abs_gl=abs(3.0 * e / (2.0 * e + 1.0)) ** 2,
    )


def _inverse_size(t: AtomicTransition, geom: CavityGeometry) -> float:
    z = geom.size_parameter(t.omega_A)
    if not z > 0:
        raise DomainError(f"Cavity radius must be positive, got z={z!r}")
    return 1.0 / z


def small_cavity_ok(t: AtomicTransition, eps: ComplexPermittivity, geom: CavityGeometry) -> bool:
    """Whether ``|sqrt(eps)| omega_A R / c`` stays below the expansion limit."""
    return abs(refractive_index(eps).value) * geom.size_parameter(t.omega_A) <= EXPANSION_MAX_Z


def gamma_cm(
    t: AtomicTransition, eps: ComplexPermittivity, geom: CavityGeometry, warn: bool = True
) -> CMRates:
    """Virtual-cavity rates, split into the transverse and longitudinal channel."""
    s = _inverse_size(t, geom)
    n = refractive_index(eps)
    eps_re, eps_im = eps.eps_re, eps.eps_im
    modulus2 = eps_re**2 + eps_im**2
    if warn and not small_cavity_ok(t, eps, geom):
        logger.warning(
            "Virtual-cavity rates used outside |n| z << 1",
            n_z=abs(n.value) / s,
            omega=t.omega_A,
        )

    par = 4.0 * eps_im / (27.0 * modulus2) * s**3
    perp = (
        n.eta * (abs((eps.value + 2.0) / 3.0) ** 2 - 2.0 * eps_im**2 / 9.0)
        + eps_im * (eps_re + 2.0) * (8.0 / 15.0 * s - 2.0 / 9.0 * n.kappa)
        + 25.0 * eps_im / 54.0 * s**3
    )
    if perp < 0 and warn:
        logger.warning("Transverse virtual-cavity rate is negative", perp=perp, omega=t.omega_A)
    return CMRates(total=perp + par, perp=perp, par=par)


def gamma_from_green(t: AtomicTransition, im_green_diag: float) -> float:
    """Rate from the imaginary diagonal of the Green tensor at the atom, relative to vacuum."""
    if im_green_diag < 0:
        raise DomainError(
            f"Imaginary part of the Green tensor must be non-negative, got {im_green_diag!r}"
        )
    return im_green_diag / im_green_vacuum_coincidence(t.omega_A)


def gamma_gl_exact(t: AtomicTransition, eps: ComplexPermittivity, geom: CavityGeometry) -> float:
    """Real-cavity rate ``1 + Re C_1^N`` from the closed-form reflection coefficient."""
    return 1.0 + c1N_exact(t.omega_A, eps, geom).real


def gamma_gl_from_green(
    t: AtomicTransition, eps: ComplexPermittivity, geom: CavityGeometry
) -> float:
    """Real-cavity rate assembled from the cavity Green tensor at its centre."""
    scattering = scattering_green_center(t.omega_A, eps, geom)
    im_diag = im_green_vacuum_coincidence(t.omega_A) + float(np.mean(scattering.diagonal.imag))
    return gamma_from_green(t, im_diag)


def gl_longitudinal_rate(t: AtomicTransition) -> float:
    """Longitudinal channel of the real cavity.

    The atom sits in vacuum, where the longitudinal Green tensor is
    proportional to 1 / eps = 1 and therefore real at every separation. Its
    imaginary part, and with it this channel, is identically zero.
    """
    return 0.0


def gamma_gl_expanded(
    t: AtomicTransition,
    eps: ComplexPermittivity,
    geom: CavityGeometry,
    strict: bool = True,
) -> GLTerms:
    """Real-cavity rate expanded through order ``z^0``.

    With ``strict`` the expansion is refused above ``z = 0.5``.
    """
    s = _inverse_size(t, geom)
    if 1.0 / s > EXPANSION_MAX_Z:
        if strict:
            raise DomainError(
                f"Size parameter z={1.0 / s:.4g} too large for the small-cavity expansion "
                f"(z <= {EXPANSION_MAX_Z})"
            )
        logger.debug("Small-cavity expansion evaluated beyond its range", z=1.0 / s)
    n = refractive_index(eps)
    eps_re, eps_im = eps.eps_re, eps.eps_im
    modulus2 = eps_re**2 + eps_im**2
    d2 = abs(2.0 * eps.value + 1.0) ** 2
    d4 = d2**2
    return GLTerms(
        r_minus3=9.0 * eps_im / d2 * s**3,
        r_minus1=9.0 * eps_im * (28.0 * modulus2 + 12.0 * eps_re + 1.0) / (5.0 * d4) * s,
        r0=(
            9.0 * n.eta * (4.0 * modulus2**2 + 4.0 * eps_re * modulus2 + eps_re**2 - eps_im**2)
            - 9.0 * n.kappa * eps_im * (4.0 * modulus2 + 2.0 * eps_re)
        )
        / d4,
    )


def _near_field(cm: CMRates, terms: GLTerms, eps: ComplexPermittivity, s: float) -> NearFieldRates:
    return NearFieldRates(cm=cm.par + 25.0 * eps.eps_im / 54.0 * s**3, gl=terms.r_minus3)


def near_field_rates(
    t: AtomicTransition, eps: ComplexPermittivity, geom: CavityGeometry
) -> NearFieldRates:
    """Dipole-dipole energy transfer to the medium, the ``R^-3`` terms of both models."""
    return _near_field(
        gamma_cm(t, eps, geom, warn=False),
        gamma_gl_expanded(t, eps, geom, strict=False),
        eps,
        _inverse_size(t, geom),
    )


def markov_validity(
    geom: CavityGeometry, t: AtomicTransition, warn: bool = True
) -> MarkovValidity:
    """Classify ``z = omega_A R / c``: ok up to 0.5, warn up to 1, fail above."""
    z = geom.size_parameter(t.omega_A)
    if z > MARKOV_FAIL_Z:
        status = "fail"
    elif z > MARKOV_WARN_Z:
        status = "warn"
    else:
        status = "ok"
    if warn and status != "ok":
        logger.warning("Markov approximation questionable for this cavity", z=z, status=status)
    return MarkovValidity(status, z)


def decay_rate_breakdown(
    t: AtomicTransition,
    eps: ComplexPermittivity,
    geom: CavityGeometry,
    model: DielectricModel | None = None,
    warn: bool = True,
    static_check: StaticPermittivityCheck | None = None,
) -> DecayRateBreakdown:
    """Evaluate every rate of both models for one transition.

    The expanded real-cavity rate is always produced; its validity is carried by
    the Markov flag. The static-permittivity flag comes from ``static_check`` or,
    failing that, from checking ``model``.
    """
    cm = gamma_cm(t, eps, geom, warn=warn)
    terms = gamma_gl_expanded(t, eps, geom, strict=False)
    markov = markov_validity(geom, t, warn=warn)
    if static_check is None and model is not None:
        static_check = static_permittivity_check(model)
    return DecayRateBreakdown(
        gamma_cm_total=cm.total,
        gamma_cm_perp=cm.perp,
        gamma_cm_par=cm.par,
        gamma_gl_exact=gamma_gl_exact(t, eps, geom),
        gamma_gl_expanded=terms.total,
        gl_terms=terms,
        baselines=baseline_rates(eps),
        validity=Validity(
            markov_ok=markov.ok,
            static_eps_ok=static_check.ok if static_check is not None else True,
            markov=markov,
            small_cavity_ok=small_cavity_ok(t, eps, geom),
            cm_perp_positive=cm.perp >= 0,
        ),
        gl_longitudinal=gl_longitudinal_rate(t),
        near_field=_near_field(cm, terms, eps, _inverse_size(t, geom)),
    )
