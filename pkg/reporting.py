"""CSV and SVG output for tables produced by the commands."""

import logging
import os
from enum import Enum
from pathlib import Path
from typing import List

import pandas as pd
import plotly.graph_objects as go
import psutil
from pydantic import BaseModel, ConfigDict, Field

from errors import ReportError

logger = logging.getLogger(__name__)


class OutputFormat(str, Enum):
    CSV = "csv"
    SVG = "svg"
    BOTH = "both"


class FigureResult(BaseModel):
    """A table with the metadata needed to plot it."""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    name: str = Field(..., description="Command or figure name.")
    title: str = Field("", description="Plot title.")
    frame: pd.DataFrame = Field(..., description="One row per abscissa point.")
    x_column: str = Field(..., description="Abscissa column.")
    y_columns: List[str] = Field(default_factory=list, description="Columns drawn as curves.")
    x_label: str = Field("", description="Abscissa axis title.")
    y_label: str = Field("", description="Ordinate axis title.")
    log_x: bool = Field(False, description="Logarithmic abscissa.")
    log_y: bool = Field(False, description="Logarithmic ordinate.")
    clamped: int = Field(0, description="Negative density values clamped while building the table.")
    warnings: int = Field(0, description="Rows carrying a diagnostics flag.")


def log_memory_usage(context: str = ""):
    """Log the resident memory of this process."""
    try:
        process = psutil.Process(os.getpid())
        memory_mb = process.memory_info().rss / 1024 / 1024
        logger.debug("Memory usage %s: %.2f MB", context, memory_mb)
    except psutil.Error as e:
        logger.debug("Memory usage %s unavailable: %s", context, e)


def write_csv(frame: pd.DataFrame, path: Path) -> Path:
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        frame.to_csv(path, index=False, float_format="%.17g", lineterminator="\n")
    except OSError as e:
        raise ReportError(f"Failed to write CSV {path}: {e}", str(path)) from e
    logger.info("Wrote %s (%d rows)", path, len(frame))
    return path


def build_figure(result: FigureResult) -> go.Figure:
    fig = go.Figure()
    for column in result.y_columns:
        fig.add_trace(go.Scatter(x=result.frame[result.x_column], y=result.frame[column],
                                 mode="lines", name=column))
    fig.update_layout(title=result.title, xaxis_title=result.x_label or result.x_column,
                      yaxis_title=result.y_label, template="plotly_white")
    if result.log_x:
        fig.update_xaxes(type="log")
    if result.log_y:
        fig.update_yaxes(type="log")
    return fig


def write_svg(result: FigureResult, path: Path) -> Path:
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        build_figure(result).write_image(str(path), format="svg")
    except (OSError, ValueError, RuntimeError) as e:
        raise ReportError(f"Failed to write SVG {path}: {e}", str(path)) from e
    logger.info("Wrote %s", path)
    return path


def write_outputs(result: FigureResult, stem: str, output_format: OutputFormat) -> List[str]:
    """Write <stem>.csv and/or <stem>.svg. The CSV is written first."""
    output_format = OutputFormat(output_format)
    base = Path(stem)
    written = []
    if output_format in (OutputFormat.CSV, OutputFormat.BOTH):
        written.append(str(write_csv(result.frame, base.parent / f"{base.name}.csv")))
    if output_format in (OutputFormat.SVG, OutputFormat.BOTH):
        written.append(str(write_svg(result, base.parent / f"{base.name}.svg")))
    return written
