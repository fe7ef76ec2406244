"""Frequency sweeps of the decay rates, figure presets and tabular emission."""

import configparser
import io
import math
import sys
from collections.abc import Mapping, Sequence
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Any, Literal

import numpy as np
import pandas as pd
import structlog

from cavity_decay.dielectric import (
    DielectricModel,
    eval_permittivity,
    longitudinal_frequency,
    refractive_index,
    resolve_variant,
    static_permittivity_check,
)
from cavity_decay.errors import CavityDecayError, DomainError, ModelEvaluationError
from cavity_decay.green_sphere import CavityGeometry
from cavity_decay.rates import AtomicTransition, decay_rate_breakdown
from cavity_decay.utils import sizeof_fmt

logger = structlog.get_logger(__name__)

STDOUT = "-"
CSV_FLOAT_FORMAT = "%.15g"

Band = Literal["near", "far"]
BANDS: dict[Band, tuple[float, float]] = {"near": (0.9, 1.3), "far": (0.2, 0.9)}
DEFAULT_COUNT = 600
DEFAULT_OMEGA_P = 0.46


@dataclass(frozen=True)
class SweepRow:
    omega_over_omegaT: float
    eps_re: float
    eps_im: float
    eta: float
    kappa: float
    gamma_gl_exact: float
    gamma_gl_expanded: float
    gamma_cm_total: float
    gamma_cm_perp: float
    gamma_cm_par: float
    baseline_gl: float
    baseline_cm: float
    markov_flag: bool


SWEEP_COLUMNS: tuple[str, ...] = tuple(f.name for f in fields(SweepRow))


@dataclass(frozen=True)
class FigurePreset:
    gamma: float
    radius_lambda: float
    band: Band
    omega_P: float = DEFAULT_OMEGA_P


PRESETS: dict[str, FigurePreset] = {
    "fig1": FigurePreset(gamma=0.05, radius_lambda=0.02, band="near"),
    "fig2": FigurePreset(gamma=0.05, radius_lambda=0.02, band="far"),
    "fig3": FigurePreset(gamma=0.2, radius_lambda=0.02, band="near"),
    "fig4": FigurePreset(gamma=0.2, radius_lambda=0.02, band="far"),
    "fig5": FigurePreset(gamma=0.05, radius_lambda=0.2, band="near"),
    "fig6": FigurePreset(gamma=0.2, radius_lambda=0.2, band="near"),
}
PRESET_OVERRIDES = (
    "model",
    "omega_t",
    "omega_p",
    "gamma",
    "eps",
    "table",
    "radius_lambda",
    "radius",
    "omega_start",
    "omega_stop",
    "count",
)


@dataclass(frozen=True)
class SweepSpec:
    """A frequency grid in units of ``omega_T`` together with medium and cavity."""

    model: DielectricModel
    geometry: CavityGeometry
    omega_start: float
    omega_stop: float
    count: int = DEFAULT_COUNT
    columns: tuple[str, ...] = SWEEP_COLUMNS
    emit: frozenset[str] = field(default_factory=lambda: frozenset({"csv"}))
    preset: str | None = None

    def __post_init__(self) -> None:
        if isinstance(self.count, bool) or not isinstance(self.count, int) or self.count < 2:
            raise DomainError(f"Grid needs at least two nodes, got count={self.count!r}")
        if not (math.isfinite(self.omega_start) and math.isfinite(self.omega_stop)):
            raise DomainError("Grid limits must be finite")
        if not 0 < self.omega_start < self.omega_stop:
            raise DomainError(
                f"Grid must satisfy 0 < start < stop, got [{self.omega_start}, {self.omega_stop}]"
            )
        unknown = [column for column in self.columns if column not in SWEEP_COLUMNS]
        if unknown or not self.columns:
            raise DomainError(
                f"Unknown or empty column selection: {unknown or list(self.columns)}. "
                f"Available columns: {list(SWEEP_COLUMNS)}"
            )
        if not self.emit or not self.emit <= {"csv", "json"}:
            raise DomainError(f"Emission must be a subset of {{'csv', 'json'}}, got {self.emit}")
        if self.preset is not None and self.preset not in PRESETS:
            raise DomainError(f"Unknown preset: {self.preset}. Available: {list(PRESETS)}")
        low, high = self.model.frequency_range
        reference = self.model.reference_frequency
        if self.omega_start * reference < low or self.omega_stop * reference > high:
            raise DomainError(
                f"Grid [{self.omega_start}, {self.omega_stop}] leaves the table "
                f"range [{low}, {high}]"
            )

    @classmethod
    def from_preset(cls, name: str, count: int = DEFAULT_COUNT) -> "SweepSpec":
        try:
            preset = PRESETS[name]
        except KeyError:
            raise DomainError(f"Unknown preset: {name}. Available: {list(PRESETS)}") from None
        start, stop = BANDS[preset.band]
        return cls(
            model=DielectricModel.fixed_damping_lorentz(1.0, preset.omega_P, preset.gamma),
            geometry=CavityGeometry.fraction_of_wavelength(preset.radius_lambda),
            omega_start=start,
            omega_stop=stop,
            count=count,
            preset=name,
        )

    @property
    def grid(self) -> np.ndarray:
        return np.linspace(self.omega_start, self.omega_stop, self.count)

    @property
    def show_baseline(self) -> bool:
        """Whether the grid stays clear of the band ``[omega_T, omega_L]``.

        Only there is the uncorrected baseline a meaningful comparison.
        """
        if self.model.lorentz is None:
            return True
        omega_L = longitudinal_frequency(self.model.lorentz) / self.model.lorentz.omega_T
        return self.omega_stop < 1.0 or self.omega_start > omega_L


def run_sweep(spec: SweepSpec) -> list[SweepRow]:
    """Evaluate every rate at each grid node, in ascending frequency."""
    static_check = static_permittivity_check(spec.model)
    reference = spec.model.reference_frequency
    rows = []
    flagged = 0
    negative_perp = 0
    outside_expansion = 0
    for value in spec.grid:
        omega = float(value) * reference
        try:
            eps = eval_permittivity(spec.model, omega)
            index = refractive_index(eps)
            transition = AtomicTransition(omega)
            breakdown = decay_rate_breakdown(
                transition, eps, spec.geometry, warn=False, static_check=static_check
            )
        except (CavityDecayError, ArithmeticError, ValueError) as exc:
            logger.exception("Error evaluating sweep node", omega=omega)
            raise ModelEvaluationError(omega, exc) from exc

        markov_flag = not breakdown.validity.markov_ok
        flagged += markov_flag
        negative_perp += not breakdown.validity.cm_perp_positive
        outside_expansion += not breakdown.validity.small_cavity_ok
        rows.append(
            SweepRow(
                omega_over_omegaT=float(value),
                eps_re=eps.eps_re,
                eps_im=eps.eps_im,
                eta=index.eta,
                kappa=index.kappa,
                gamma_gl_exact=breakdown.gamma_gl_exact,
                gamma_gl_expanded=breakdown.gamma_gl_expanded,
                gamma_cm_total=breakdown.gamma_cm_total,
                gamma_cm_perp=breakdown.gamma_cm_perp,
                gamma_cm_par=breakdown.gamma_cm_par,
                baseline_gl=breakdown.baselines.gl_rate,
                baseline_cm=breakdown.baselines.cm_rate,
                markov_flag=markov_flag,
            )
        )

    if flagged:
        logger.warning(
            "Markov approximation questionable on part of the grid",
            flagged_nodes=flagged,
            nodes=len(rows),
            z=spec.geometry.size_parameter(reference),
        )
    if negative_perp:
        logger.warning(
            "Transverse virtual-cavity rate negative on part of the grid",
            negative_nodes=negative_perp,
            nodes=len(rows),
        )
    if outside_expansion:
        logger.warning(
            "Small-cavity condition |n| z << 1 violated on part of the grid",
            nodes_outside=outside_expansion,
            nodes=len(rows),
        )
    logger.info("Sweep finished", preset=spec.preset, nodes=len(rows))
    return rows


def rows_to_frame(rows: Sequence[SweepRow], columns: Sequence[str] = SWEEP_COLUMNS) -> pd.DataFrame:
    if not rows:
        raise DomainError("Nothing to emit: the sweep produced no rows")
    if not columns:
        raise DomainError("Nothing to emit: the column selection is empty")
    frame = pd.DataFrame([asdict(row) for row in rows], columns=list(SWEEP_COLUMNS))
    return frame.loc[:, list(columns)]


def _write_text(text: str, destination: str | Path, kind: str) -> Path | None:
    if str(destination) == STDOUT:
        sys.stdout.write(text)
        return None
    path = Path(destination)
    try:
        with path.open("w", encoding="utf-8", newline="") as handle:
            handle.write(text)
    except OSError:
        logger.exception(f"Error writing {kind}", path=str(path))
        raise
    logger.info(f"{kind} written", path=str(path), size=sizeof_fmt(path.stat().st_size))
    return path


def format_csv(rows: Sequence[SweepRow], columns: Sequence[str] = SWEEP_COLUMNS) -> str:
    buffer = io.StringIO()
    rows_to_frame(rows, columns).to_csv(
        buffer, index=False, float_format=CSV_FLOAT_FORMAT, lineterminator="\n"
    )
    return buffer.getvalue()


def emit_csv(
    rows: Sequence[SweepRow], destination: str | Path, columns: Sequence[str] = SWEEP_COLUMNS
) -> Path | None:
    """Write ``rows`` as UTF-8 CSV with LF endings; ``"-"`` writes to stdout."""
    return _write_text(format_csv(rows, columns), destination, "CSV")


def emit_json(
    rows: Sequence[SweepRow], destination: str | Path, columns: Sequence[str] = SWEEP_COLUMNS
) -> Path | None:
    """Write ``rows`` as a JSON array of objects keyed by column name."""
    text = rows_to_frame(rows, columns).to_json(orient="records", double_precision=15, indent=2)
    return _write_text(text + "\n", destination, "JSON")


def read_csv(source: str | Path) -> list[SweepRow]:
    """Parse a CSV written by :func:`emit_csv` with all columns back into rows."""
    try:
        frame = pd.read_csv(source)
    except OSError:
        logger.exception("Error reading sweep CSV", path=str(source))
        raise
    missing = [column for column in SWEEP_COLUMNS if column not in frame.columns]
    if missing:
        raise DomainError(f"Sweep CSV {source} lacks columns {missing}")
    rows = []
    for record in frame.loc[:, list(SWEEP_COLUMNS)].to_dict(orient="records"):
        values = {name: float(record[name]) for name in SWEEP_COLUMNS if name != "markov_flag"}
        rows.append(SweepRow(**values, markov_flag=bool(record["markov_flag"])))
    return rows


def load_config(path: str | Path) -> dict[str, Any]:
    """Read an INI sweep configuration into flat option names.

    Sections and keys::

        [model]    variant (or model), omega_t, omega_p, gamma, eps, table
        [geometry] radius_lambda, radius
        [grid]     start, stop, count
        [output]   out, plot_script, plot, json
    """
    parser = configparser.ConfigParser()
    try:
        with open(path, encoding="utf-8") as handle:
            parser.read_file(handle)
    except OSError:
        logger.exception("Error reading sweep configuration", path=str(path))
        raise
    except configparser.Error as exc:
        raise DomainError(f"Malformed sweep configuration {path}: {exc}") from exc

    keys = {
        ("model", "variant"): ("model", str),
        ("model", "model"): ("model", str),
        ("model", "omega_t"): ("omega_t", float),
        ("model", "omega_p"): ("omega_p", float),
        ("model", "gamma"): ("gamma", float),
        ("model", "eps"): ("eps", complex),
        ("model", "table"): ("table", str),
        ("geometry", "radius_lambda"): ("radius_lambda", float),
        ("geometry", "radius"): ("radius", float),
        ("grid", "start"): ("omega_start", float),
        ("grid", "stop"): ("omega_stop", float),
        ("grid", "count"): ("count", int),
        ("output", "out"): ("out", str),
        ("output", "plot_script"): ("plot_script", str),
        ("output", "plot"): ("plot", str),
        ("output", "json"): ("json", "bool"),
    }
    options: dict[str, Any] = {}
    for section in parser.sections():
        for key in parser[section]:
            if (section, key) not in keys:
                raise DomainError(f"Unknown configuration entry [{section}] {key} in {path}")
            name, kind = keys[(section, key)]
            try:
                if kind == "bool":
                    options[name] = parser.getboolean(section, key)
                else:
                    options[name] = kind(parser[section][key].replace(" ", ""))
            except ValueError as exc:
                raise DomainError(f"Invalid value for [{section}] {key} in {path}: {exc}") from exc
    logger.debug("Sweep configuration loaded", path=str(path), options=sorted(options))
    return options


def build_model(options: Mapping[str, Any]) -> DielectricModel:
    variant = resolve_variant(options.get("model") or "fixed-damping-lorentz")
    if variant == "constant":
        return DielectricModel.constant_permittivity(options.get("eps", 1.0))
    if variant == "tabulated":
        if not options.get("table"):
            raise DomainError("The tabulated model needs a permittivity table (--table)")
        return DielectricModel.from_csv(options["table"])
    parameters = (
        options.get("omega_t", 1.0),
        options.get("omega_p", DEFAULT_OMEGA_P),
        options.get("gamma", 0.05),
    )
    if variant == "fixed-damping-lorentz":
        return DielectricModel.fixed_damping_lorentz(*parameters)
    return DielectricModel.standard_lorentz(*parameters)


def spec_from_options(options: Mapping[str, Any]) -> SweepSpec:
    """Build a spec from merged option values; a ``preset`` entry overrides the rest."""
    emit = frozenset({"json"} if options.get("json") else {"csv"})
    preset = options.get("preset")
    if preset:
        overridden = sorted(key for key in PRESET_OVERRIDES if options.get(key) is not None)
        if overridden:
            logger.warning("Preset overrides options", preset=preset, ignored=overridden)
        base = SweepSpec.from_preset(preset)
        return SweepSpec(
            model=base.model,
            geometry=base.geometry,
            omega_start=base.omega_start,
            omega_stop=base.omega_stop,
            count=base.count,
            emit=emit,
            preset=preset,
        )

    if options.get("radius") is not None and options.get("radius_lambda") is not None:
        raise DomainError("Give the cavity radius either absolutely or as a fraction of lambda")
    if options.get("radius") is not None:
        geometry = CavityGeometry.absolute(options["radius"])
    else:
        geometry = CavityGeometry.fraction_of_wavelength(options.get("radius_lambda", 0.02))
    start, stop = BANDS["near"]
    return SweepSpec(
        model=build_model(options),
        geometry=geometry,
        omega_start=options.get("omega_start", start),
        omega_stop=options.get("omega_stop", stop),
        count=options.get("count", DEFAULT_COUNT),
        emit=emit,
    )
