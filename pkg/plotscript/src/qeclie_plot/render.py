"""Turn sweep CSV files into code-family comparison figures.

Input is the sweep CSV contract
``family,n,J,gamma,T,gamma_T,fidelity,infidelity``; the figure has one panel
per family and one line per J (labeled by the level count 2J+1), infidelity
against Gamma*T, log-log by default. Output is written as both PNG and SVG
with pinned metadata so identical inputs give byte-identical files.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

REQUIRED_COLUMNS = ("family", "n", "J", "gamma", "T", "gamma_T",
                    "fidelity", "infidelity")


class MissingColumnError(ValueError):
    """The CSV header lacks a required column (named in the message)."""


@dataclass(frozen=True)
class PlotSpec:
    inputs: tuple[str, ...]
    output: str
    panel_key: str = "family"
    series_key: str = "J"
    log_log: bool = True
    title: str | None = None


@dataclass
class SweepData:
    """Rows grouped as panels[family][J] = list of (gamma_T, infidelity)."""

    panels: dict = field(default_factory=dict)

    def add(self, family: str, j: float, gamma_t: float, infidelity: float) -> None:
        self.panels.setdefault(family, {}).setdefault(j, []).append(
            (gamma_t, infidelity))


def read_sweep_csv(paths) -> SweepData:
    data = SweepData()
    for path in paths:
        with open(path, newline="") as fh:
            reader = csv.DictReader(fh)
            header = reader.fieldnames or []
            for column in REQUIRED_COLUMNS:
                if column not in header:
                    raise MissingColumnError(
                        f"{path}: missing column '{column}'")
            for row in reader:
                data.add(row["family"], float(row["J"]),
                         float(row["gamma_T"]), float(row["infidelity"]))
    if not data.panels:
        raise ValueError("no data rows found in the input files")
    return data


def _series_label(j: float) -> str:
    levels = 2 * j + 1
    return f"2J+1 = {levels:g}"


def render(spec: PlotSpec) -> tuple[Path, Path]:
    """Render the figure; returns the written (png, svg) paths."""
    data = read_sweep_csv(spec.inputs)
    families = list(data.panels)  # insertion order = file order
    fig, axes = plt.subplots(
        1, len(families), figsize=(4.2 * len(families), 3.4),
        squeeze=False, sharey=True)
    for ax, family in zip(axes[0], families):
        series = data.panels[family]
        for j in sorted(series):
            points = sorted(series[j])
            xs = [p[0] for p in points]
            ys = [p[1] for p in points]
            style = "o-" if len(points) > 1 else "o"
            ax.plot(xs, ys, style, markersize=3, label=_series_label(j))
        if spec.log_log:
            ax.set_xscale("log")
            ax.set_yscale("log")
        ax.set_xlabel(r"$\Gamma T$")
        ax.set_title(family)
        ax.grid(True, which="both", alpha=0.3)
        ax.legend()
    axes[0][0].set_ylabel(r"infidelity $1 - F$")
    if spec.title:
        fig.suptitle(spec.title)
    fig.tight_layout()

    png_path = Path(spec.output)
    if png_path.suffix.lower() != ".png":
        png_path = png_path.with_suffix(".png")
    svg_path = png_path.with_suffix(".svg")
    # pinned salt and empty date keep the outputs reproducible
    with plt.rc_context({"svg.hashsalt": "qeclie-plot"}):
        fig.savefig(png_path, dpi=150, metadata={"Software": "qeclie-plot"})
        fig.savefig(svg_path, metadata={"Date": None})
    plt.close(fig)
    return png_path, svg_path
