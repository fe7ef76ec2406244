"""Permittivity models, the complex refractive index and medium diagnostics.

Frequencies are expressed in units of a reference frequency, ``omega_T`` for the
Lorentz models. Lengths never appear here.
"""

import cmath
import math
from dataclasses import dataclass, field
from os import PathLike
from typing import Literal, cast

import numpy as np
import pandas as pd
import structlog
from scipy.integrate import trapezoid
from scipy.interpolate import PchipInterpolator

from cavity_decay.constants import (
    KK_MIN_NODES,
    KK_RECOMMENDED_NODES,
    STATIC_EPS_LIMIT,
    STATIC_PROBE_FRACTION,
)
from cavity_decay.errors import DomainError

logger = structlog.get_logger(__name__)

ModelVariant = Literal["fixed-damping-lorentz", "standard-lorentz", "constant", "tabulated"]
MODEL_VARIANTS: tuple[ModelVariant, ...] = (
    "fixed-damping-lorentz",
    "standard-lorentz",
    "constant",
    "tabulated",
)
VARIANT_ALIASES: dict[str, ModelVariant] = {"paper-lorentz": "fixed-damping-lorentz"}
TABLE_COLUMNS = ("omega", "eps_re", "eps_im")


def resolve_variant(name: str) -> ModelVariant:
    """Canonical variant for ``name``, accepting the names in ``VARIANT_ALIASES``."""
    variant = VARIANT_ALIASES.get(name, name)
    if variant not in MODEL_VARIANTS:
        supported = (*MODEL_VARIANTS, *VARIANT_ALIASES)
        raise DomainError(f"Unsupported model variant: {name}. Supported: {supported}")
    return cast(ModelVariant, variant)


@dataclass(frozen=True)
class ComplexPermittivity:
    """Relative permittivity ``eps_re + i eps_im`` at one frequency."""

    eps_re: float
    eps_im: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.eps_re) and math.isfinite(self.eps_im)):
            raise DomainError(f"Permittivity must be finite, got {self.eps_re} + {self.eps_im}i")

    @classmethod
    def from_complex(cls, value: complex) -> "ComplexPermittivity":
        value = complex(value)
        return cls(value.real, value.imag)

    @property
    def value(self) -> complex:
        return complex(self.eps_re, self.eps_im)

    @property
    def is_vacuum(self) -> bool:
        return self.eps_re == 1.0 and self.eps_im == 0.0


@dataclass(frozen=True)
class RefractiveIndex:
    """Complex refractive index ``eta + i kappa`` on the branch ``kappa >= 0``."""

    eta: float
    kappa: float

    @property
    def value(self) -> complex:
        return complex(self.eta, self.kappa)


@dataclass(frozen=True)
class LorentzParameters:
    """Single-resonance parameters: transverse frequency, plasma frequency and damping."""

    omega_T: float = 1.0
    omega_P: float = 0.46
    gamma: float = 0.05

    def __post_init__(self) -> None:
        if not self.omega_T > 0:
            raise DomainError(f"omega_T must be positive, got {self.omega_T}")
        if not self.omega_P >= 0:
            raise DomainError(f"omega_P must be non-negative, got {self.omega_P}")
        if not self.gamma > 0:
            raise DomainError(f"gamma must be positive, got {self.gamma}")


@dataclass(frozen=True)
class StaticPermittivityCheck:
    status: Literal["ok", "warn"]
    magnitude: float

    @property
    def ok(self) -> bool:
        return self.status == "ok"


@dataclass(frozen=True)
class DielectricModel:
    """A source of permittivity values as a function of frequency.

    Build instances through the classmethods rather than the constructor.
    """

    variant: ModelVariant
    lorentz: LorentzParameters | None = None
    constant: ComplexPermittivity | None = None
    table: pd.DataFrame | None = field(default=None, compare=False, repr=False)
    source: str | None = None
    _interpolators: tuple[PchipInterpolator, PchipInterpolator] | None = field(
        default=None, init=False, compare=False, repr=False
    )

    def __post_init__(self) -> None:
        if self.variant not in MODEL_VARIANTS:
            raise DomainError(
                f"Unsupported model variant: {self.variant}. Supported variants: {MODEL_VARIANTS}"
            )
        if self.variant in ("fixed-damping-lorentz", "standard-lorentz") and self.lorentz is None:
            raise DomainError(f"Model variant {self.variant} requires Lorentz parameters")
        if self.variant == "constant":
            if self.constant is None:
                raise DomainError("Model variant constant requires a permittivity value")
            if self.constant.eps_im < 0:
                raise DomainError("Constant permittivity must be passive (eps_im >= 0)")
        if self.variant == "tabulated":
            if self.table is None:
                raise DomainError("Model variant tabulated requires a permittivity table")
            _validate_table(self.table)
            omega = self.table["omega"].to_numpy(dtype=float)
            interpolators = (
                PchipInterpolator(omega, self.table["eps_re"].to_numpy(dtype=float)),
                PchipInterpolator(omega, self.table["eps_im"].to_numpy(dtype=float)),
            )
            object.__setattr__(self, "_interpolators", interpolators)

    @classmethod
    def fixed_damping_lorentz(
        cls, omega_T: float = 1.0, omega_P: float = 0.46, gamma: float = 0.05
    ) -> "DielectricModel":
        """Lorentz model with the frequency-independent damping term ``-i gamma omega_T``."""
        return cls("fixed-damping-lorentz", lorentz=LorentzParameters(omega_T, omega_P, gamma))

    @classmethod
    def standard_lorentz(
        cls, omega_T: float = 1.0, omega_P: float = 0.46, gamma: float = 0.05
    ) -> "DielectricModel":
        """Lorentz model with the causal damping term ``-i gamma omega``."""
        return cls("standard-lorentz", lorentz=LorentzParameters(omega_T, omega_P, gamma))

    @classmethod
    def constant_permittivity(cls, value: complex) -> "DielectricModel":
        return cls("constant", constant=ComplexPermittivity.from_complex(value))

    @classmethod
    def from_table(cls, table: pd.DataFrame, source: str | None = None) -> "DielectricModel":
        table = table.loc[:, list(TABLE_COLUMNS)].reset_index(drop=True)
        return cls("tabulated", table=table, source=source)

    @classmethod
    def from_csv(
        cls, path: str | PathLike, imag_path: str | PathLike | None = None
    ) -> "DielectricModel":
        """Load a table with header ``omega,eps_re,eps_im``.

        With ``imag_path`` the real part comes from ``path`` (``omega,eps_re``) and
        the imaginary part from ``imag_path`` (``omega,eps_im``), sharing one grid.
        """
        try:
            table = pd.read_csv(path, comment="#", skipinitialspace=True)
            if imag_path is not None:
                imaginary = pd.read_csv(imag_path, comment="#", skipinitialspace=True)
                _require_columns(table, ("omega", "eps_re"), path)
                _require_columns(imaginary, ("omega", "eps_im"), imag_path)
                if not np.array_equal(table["omega"].to_numpy(), imaginary["omega"].to_numpy()):
                    raise DomainError(
                        f"Frequency grids of {path} and {imag_path} do not match node by node"
                    )
                table = table.assign(eps_im=imaginary["eps_im"].to_numpy())
            _require_columns(table, TABLE_COLUMNS, path)
        except (DomainError, OSError):
            logger.exception("Error loading permittivity table", path=str(path))
            raise
        except (pd.errors.ParserError, pd.errors.EmptyDataError) as exc:
            logger.exception("Error parsing permittivity table", path=str(path))
            raise DomainError(f"Malformed permittivity table {path}: {exc}") from exc

        model = cls.from_table(table, source=str(path))
        logger.info("Permittivity table loaded", path=str(path), nodes=len(table))
        return model

    @property
    def reference_frequency(self) -> float:
        """Frequency unit of the model; ``omega_T`` for Lorentz models, otherwise 1."""
        if self.lorentz is not None:
            return self.lorentz.omega_T
        return 1.0

    @property
    def frequency_range(self) -> tuple[float, float]:
        if self.table is None:
            return (0.0, math.inf)
        omega = self.table["omega"]
        return (float(omega.iloc[0]), float(omega.iloc[-1]))


def _require_columns(table: pd.DataFrame, columns: tuple[str, ...], path) -> None:
    missing = [column for column in columns if column not in table.columns]
    if missing:
        raise DomainError(
            f"Permittivity table {path} lacks columns {missing}. "
            f"Expected header: {','.join(columns)}"
        )


def _validate_table(table: pd.DataFrame) -> None:
    _require_columns(table, TABLE_COLUMNS, "<table>")
    if len(table) < 2:
        raise DomainError("Permittivity table needs at least two frequency nodes")
    values = table.loc[:, list(TABLE_COLUMNS)]
    if values.isnull().any().any():
        raise DomainError("Permittivity table contains NaN/null values")
    omega = values["omega"].to_numpy(dtype=float)
    if np.any(omega <= 0):
        raise DomainError("Permittivity table frequencies must be positive")
    if np.any(np.diff(omega) <= 0):
        raise DomainError("Permittivity table frequencies must be strictly increasing")
    if np.any(values["eps_im"].to_numpy(dtype=float) < 0):
        raise DomainError("Permittivity table has eps_im < 0 (medium must be passive)")


def _check_frequency(omega: float) -> None:
    if not (math.isfinite(omega) and omega > 0):
        raise DomainError(f"Frequency must be positive and finite, got {omega!r}")


def permittivity_values(model: DielectricModel, omega: np.ndarray) -> np.ndarray:
    """Vectorized permittivity ``eps(omega)`` as a complex array."""
    omega = np.asarray(omega, dtype=float)
    if omega.size and not (np.all(np.isfinite(omega)) and np.all(omega > 0)):
        raise DomainError("Frequencies must be positive and finite")

    if model.variant in ("fixed-damping-lorentz", "standard-lorentz"):
        p = model.lorentz
        damping = p.gamma * (p.omega_T if model.variant == "fixed-damping-lorentz" else omega)
        return 1.0 + p.omega_P**2 / (p.omega_T**2 - omega**2 - 1j * damping)
    if model.variant == "constant":
        return np.full(omega.shape, model.constant.value, dtype=complex)

    low, high = model.frequency_range
    outside = (omega < low) | (omega > high)
    if np.any(outside):
        raise DomainError(
            f"Frequency {float(omega[outside][0])!r} outside the table range [{low}, {high}]"
        )
    real_part, imag_part = model._interpolators
    # pchip cannot overshoot, clipping only removes rounding noise around zero
    return real_part(omega) + 1j * np.clip(imag_part(omega), 0.0, None)


def eval_permittivity(model: DielectricModel, omega: float) -> ComplexPermittivity:
    """Evaluate the permittivity of ``model`` at angular frequency ``omega``."""
    _check_frequency(omega)
    value = complex(permittivity_values(model, np.array([omega]))[0])
    return ComplexPermittivity.from_complex(value)


def refractive_index(eps: ComplexPermittivity) -> RefractiveIndex:
    """Principal square root of ``eps`` on the branch ``kappa >= 0``."""
    value = eps.value
    if value == 0:
        raise DomainError("Refractive index is undefined for eps = 0")
    n = cmath.sqrt(value)
    if n.imag < 0:
        n = -n
    return RefractiveIndex(n.real, n.imag)


def longitudinal_frequency(p: LorentzParameters) -> float:
    """Frequency ``sqrt(omega_T**2 + omega_P**2)`` where the lossless eps_re crosses zero."""
    return math.hypot(p.omega_T, p.omega_P)


def _hilbert_real_part(omega: np.ndarray, eps_im: np.ndarray) -> np.ndarray:
    """Real part ``eps_re - 1`` implied by ``eps_im`` at the interior grid nodes.

    Principal value of ``(2/pi) int w' eps_im(w') / (w'^2 - w^2) dw'`` over the
    grid, with the pole removed by subtracting ``g(w)`` where
    ``g(w') = w' eps_im(w') / (w' + w)``.
    """
    low, high = omega[0], omega[-1]
    result = np.empty(omega.size - 2)
    for i in range(1, omega.size - 1):
        w = omega[i]
        g = omega * eps_im / (omega + w)
        g_slope = np.gradient(g, omega)
        with np.errstate(divide="ignore", invalid="ignore"):
            integrand = (g - g[i]) / (omega - w)
        integrand[i] = g_slope[i]
        principal = trapezoid(integrand, omega) + g[i] * math.log((high - w) / (w - low))
        result[i - 1] = 2.0 / math.pi * principal
    return result


def kramers_kronig_residual(model: DielectricModel, grid: np.ndarray) -> float:
    """Worst relative mismatch between ``eps_re - 1`` and the transform of ``eps_im``.

    The mismatch is taken over the interior grid nodes and divided by the largest
    ``|eps_re - 1|`` there. A causal model scores at the quadrature error of the grid.
    """
    omega = np.asarray(grid, dtype=float)
    if omega.ndim != 1 or omega.size < KK_MIN_NODES:
        raise DomainError(
            f"Kramers-Kronig grid too coarse: {omega.size} nodes, at least {KK_MIN_NODES} needed"
        )
    if np.any(np.diff(omega) <= 0):
        raise DomainError("Kramers-Kronig grid must be strictly increasing")
    if omega.size < KK_RECOMMENDED_NODES:
        logger.warning(
            "Kramers-Kronig grid below the recommended size",
            nodes=omega.size,
            recommended=KK_RECOMMENDED_NODES,
        )

    eps = permittivity_values(model, omega)
    expected = eps.real[1:-1] - 1.0
    transformed = _hilbert_real_part(omega, eps.imag)
    mismatch = float(np.max(np.abs(transformed - expected)))
    scale = float(np.max(np.abs(expected)))
    residual = mismatch / scale if scale > 0 else mismatch
    logger.debug(
        "Kramers-Kronig residual computed",
        variant=model.variant,
        nodes=omega.size,
        residual=residual,
    )
    return residual


def static_permittivity_check(model: DielectricModel) -> StaticPermittivityCheck:
    """Check ``|eps(0+)| < 10``, the virtual-cavity consistency condition on the static value.

    ``eps(0+)`` is probed at ``1e-9`` reference frequencies. Tabulated models are
    probed at their lowest node.
    """
    probe = STATIC_PROBE_FRACTION * model.reference_frequency
    if model.variant == "tabulated":
        probe = model.frequency_range[0]
    magnitude = abs(eval_permittivity(model, probe).value)
    if magnitude >= STATIC_EPS_LIMIT:
        logger.warning(
            "Static permittivity too large for the virtual-cavity model",
            magnitude=magnitude,
            limit=STATIC_EPS_LIMIT,
            variant=model.variant,
        )
        return StaticPermittivityCheck("warn", magnitude)
    return StaticPermittivityCheck("ok", magnitude)
