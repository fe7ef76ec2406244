import io
from collections.abc import Sequence
from pathlib import Path

import matplotlib.pyplot as plt
import pandas as pd
import seaborn as sns
import structlog

from cavity_decay.constants import PLOT_DPI, PLOT_FIGURE_SIZE
from cavity_decay.errors import DomainError
from cavity_decay.sweep import SweepRow, rows_to_frame
from cavity_decay.utils import sizeof_fmt

logger = structlog.get_logger(__name__)

X_COLUMN = "omega_over_omegaT"

# Column -> (legend label, matplotlib linestyle)
LINE_ROLES: dict[str, tuple[str, str]] = {
    "gamma_gl_exact": ("real cavity", "-"),
    "gamma_cm_total": ("virtual cavity", ":"),
    "gamma_cm_perp": ("virtual cavity, transverse", "-."),
    "baseline_gl": ("real cavity, no absorption", "--"),
}
BASELINE_COLUMN = "baseline_gl"

_SCRIPT_TEMPLATE = '''\
"""Decay rates against transition frequency, read from {csv_name}."""

import matplotlib.pyplot as plt
import pandas as pd

CSV_PATH = {csv_path!r}
LINES = [
{lines}
]

df = pd.read_csv(CSV_PATH)
fig, ax = plt.subplots(figsize={figure_size!r})
for column, label, style in LINES:
    ax.plot(df["{x_column}"], df[column], linestyle=style, color="black", label=label)
ax.set_xlabel("omega_A / omega_T")
ax.set_ylabel("Gamma / Gamma_0")
ax.legend()
fig.tight_layout()
plt.show()
'''


def _line_columns(include_baseline: bool) -> list[str]:
    return [column for column in LINE_ROLES if include_baseline or column != BASELINE_COLUMN]


def _create_plot(
    df: pd.DataFrame, include_baseline: bool = False, **kwargs
) -> tuple[plt.Figure, plt.Axes]:
    """Draw the rate curves of a sweep frame with one linestyle per model."""
    if df.empty:
        raise ValueError("Sweep data is empty")

    columns = [X_COLUMN, *_line_columns(include_baseline)]
    missing = [column for column in columns if column not in df.columns]
    if missing:
        raise ValueError(f"Sweep data lacks the columns {missing} needed for the figure")

    if df.loc[:, columns].isnull().any().any():
        raise ValueError("Sweep data contains NaN/null values. Please ensure all data is complete.")

    fig, ax = plt.subplots(figsize=PLOT_FIGURE_SIZE, dpi=PLOT_DPI)

    # Not accepted by seaborn
    fig_title = kwargs.pop("title", None)
    xlabel = kwargs.pop("xlabel", r"$\omega_A / \omega_T$")
    ylabel = kwargs.pop("ylabel", r"$\Gamma / \Gamma_0$")
    color = kwargs.pop("color", "black")

    for column in columns[1:]:
        label, style = LINE_ROLES[column]
        sns.lineplot(
            data=df,
            x=X_COLUMN,
            y=column,
            ax=ax,
            label=label,
            linestyle=style,
            color=color,
            **kwargs,
        )

    if fig_title:
        ax.set_title(fig_title)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)

    fig.tight_layout()

    return fig, ax


def plot_to_bytes(df: pd.DataFrame, include_baseline: bool = False, **kwargs) -> bytes:
    """Generate the rate figure and return it as PNG bytes."""
    fig, _ = _create_plot(df, include_baseline, **kwargs)
    buffer = io.BytesIO()
    fig.savefig(buffer, format="png", bbox_inches="tight")
    plt.close(fig)
    buffer.seek(0)
    return buffer.getvalue()


def _write(path: Path, payload: str | bytes, kind: str) -> Path:
    try:
        if isinstance(payload, bytes):
            path.write_bytes(payload)
        else:
            with path.open("w", encoding="utf-8", newline="") as handle:
                handle.write(payload)
    except OSError:
        logger.exception(f"Error writing {kind}", path=str(path))
        raise
    logger.info(f"{kind} written", path=str(path), size=sizeof_fmt(path.stat().st_size))
    return path


def write_plot(
    rows: Sequence[SweepRow], destination: str | Path, include_baseline: bool = False, **kwargs
) -> Path:
    """Render ``rows`` to a PNG file."""
    payload = plot_to_bytes(rows_to_frame(rows), include_baseline, **kwargs)
    return _write(Path(destination), payload, "Figure")


def render_plot_script(csv_path: str | Path, include_baseline: bool = False) -> str:
    lines = "\n".join(
        f"    ({column!r}, {LINE_ROLES[column][0]!r}, {LINE_ROLES[column][1]!r}),"
        for column in _line_columns(include_baseline)
    )
    return _SCRIPT_TEMPLATE.format(
        csv_name=Path(csv_path).name,
        csv_path=str(csv_path),
        lines=lines,
        figure_size=PLOT_FIGURE_SIZE,
        x_column=X_COLUMN,
    )


def emit_plot_script(
    rows: Sequence[SweepRow],
    destination: str | Path,
    csv_path: str | Path,
    include_baseline: bool = False,
) -> Path:
    """Write a standalone plotting script that reads ``csv_path``.

    The real-cavity rate is drawn solid, the virtual-cavity rate dotted and its
    transverse part broken; ``include_baseline`` adds the dashed uncorrected
    real-cavity rate, meaningful only away from resonance.
    """
    if not rows:
        raise DomainError("Nothing to plot: the sweep produced no rows")
    return _write(Path(destination), render_plot_script(csv_path, include_baseline), "Plot script")
