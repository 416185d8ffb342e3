"""Artifact service for CSV tables, JSON reports and gnuplot scripts."""

import json
import logging
from pathlib import Path
from typing import Any, Dict, Iterable, Optional, Union

import numpy as np
import pandas as pd
from pydantic import BaseModel

from ..exceptions import InvalidArgumentError
from ..schemas import CovarianceSequence, GridFunction, TimeSeries, WaveletCoefficients
from .wavelet_service import lambda_index

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.17g"


def write_series_csv(series: TimeSeries, path: Path) -> Path:
    """One sample per line, no header"""
    pd.Series(series.samples).to_csv(path, header=False, index=False, float_format=FLOAT_FORMAT)
    return Path(path)


def read_series_csv(path: Path) -> TimeSeries:
    """
    Read a single-column CSV of samples.

    Args:
        path: CSV file with one real number per line and no header

    Returns:
        TimeSeries without a seed
    """
    try:
        frame = pd.read_csv(path, header=None, float_precision="round_trip")
    except (OSError, pd.errors.ParserError, pd.errors.EmptyDataError) as e:
        raise InvalidArgumentError(f"Failed to read series from {path}: {e}") from e
    if frame.shape[1] != 1:
        raise InvalidArgumentError(f"{path} has {frame.shape[1]} columns; expected one")
    try:
        return TimeSeries(samples=frame.iloc[:, 0].to_numpy(dtype=float))
    except ValueError as e:
        raise InvalidArgumentError(f"Invalid series in {path}: {e}") from e


def grid_frame(g: GridFunction, column: str = "value") -> pd.DataFrame:
    return pd.DataFrame({"omega": g.omega, column: g.values})


def read_grid_csv(path: Path) -> GridFunction:
    frame = pd.read_csv(path, float_precision="round_trip")
    if "omega" not in frame.columns or frame.shape[1] != 2:
        raise InvalidArgumentError(f"{path} is not an (omega, value) table")
    return GridFunction(values=frame.drop(columns="omega").iloc[:, 0].to_numpy(dtype=float))


def coefficient_frame(coeffs: WaveletCoefficients) -> pd.DataFrame:
    """Rows (level, k, value); level j0 - 1 marks scaling coefficients"""
    index = lambda_index(coeffs.j0, coeffs.j1)
    return pd.DataFrame(
        {
            "level": [level for level, _ in index],
            "k": [k for _, k in index],
            "value": coeffs.to_vector(),
        }
    )


def covariance_frame(rho: CovarianceSequence) -> pd.DataFrame:
    return pd.DataFrame({"lag": np.arange(rho.rho.size), "value": rho.rho})


def to_json_text(payload: Union[BaseModel, Dict[str, Any]]) -> str:
    """Deterministic JSON: sorted keys, two-space indent"""
    if isinstance(payload, BaseModel):
        payload = payload.model_dump(mode="json")
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"


class ArtifactService:
    """Writes run artifacts into one output directory and remembers them."""

    def __init__(self, out_dir: Path):
        self.out_dir = Path(out_dir)
        self.out_dir.mkdir(parents=True, exist_ok=True)
        self.written: Dict[str, str] = {}

    def _register(self, name: str, path: Path) -> Path:
        self.written[name] = str(path)
        logger.debug("Wrote artifact", extra={"artifact": name, "path": str(path)})
        return path

    def write_frame(self, name: str, frame: pd.DataFrame) -> Path:
        path = self.out_dir / f"{name}.csv"
        frame.to_csv(path, index=False, float_format=FLOAT_FORMAT)
        return self._register(name, path)

    def write_grid(self, name: str, g: GridFunction) -> Path:
        return self.write_frame(name, grid_frame(g))

    def write_series(self, name: str, series: TimeSeries) -> Path:
        return self._register(name, write_series_csv(series, self.out_dir / f"{name}.csv"))

    def write_json(self, name: str, payload: Union[BaseModel, Dict[str, Any]]) -> Path:
        path = self.out_dir / f"{name}.json"
        path.write_text(to_json_text(payload), encoding="utf-8")
        return self._register(name, path)

    def write_gnuplot(
        self, curves: Iterable[str], title: Optional[str] = None, xlabel: str = "omega"
    ) -> Path:
        """plot.gp drawing column 2 against column 1 of each named CSV"""
        names = [name for name in curves if name in self.written]
        if not names:
            raise InvalidArgumentError("no CSV artifacts to plot")
        lines = [
            "set datafile separator ','",
            "set key autotitle columnhead",
            f"set title '{title or self.out_dir.name}'",
            f"set xlabel '{xlabel}'",
            "plot " + ", \\\n     ".join(
                f"'{Path(self.written[name]).name}' using 1:2 with lines title '{name}'"
                for name in names
            ),
        ]
        path = self.out_dir / "plot.gp"
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
        return self._register("gnuplot", path)
