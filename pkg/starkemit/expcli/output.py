"""
Copyright (c) 2024-present Starkemit Developers

This program is free software: you can redistribute it and/or modify
it under the terms of the GNU Affero General Public License as published
by the Free Software Foundation, either version 3 of the License, or
(at your option) any later version.

This program is distributed in the hope that it will be useful,
but WITHOUT ANY WARRANTY; without even the implied warranty of
MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE.  See the
GNU Affero General Public License for more details.

You should have received a copy of the GNU Affero General Public License
along with this program.  If not, see <https://www.gnu.org/licenses/>.

"""


from __future__ import annotations

# fmt: off
__all__ = (
    "MAX_FRAMES",
    "RunManifest",
    "decimate",
    "write_dde",
    "write_energy_momentum",
    "write_kernel",
    "write_manifest",
    "write_momentum_density",
    "write_qubit_population",
    "write_returns",
    "write_site_density",
    "write_table",
)
# fmt: on


import logging
import math
from pathlib import Path
from typing import TYPE_CHECKING, Any, Dict, List, Mapping, NamedTuple, Sequence

import numpy as np

if TYPE_CHECKING:
    from ..kernel_dde import DDESolution, KernelEvaluation
    from ..propagator import (
        EnergyMomentumFrame,
        EvolutionSeries,
        MomentumFrame,
        TimeSeries,
    )
    from ..semiclassics import ReturnEvent


try:
    import orjson  # type: ignore
except ModuleNotFoundError:
    import json

    def _to_json(obj: Any) -> str:
        return json.dumps(obj, indent=2)

else:

    def _to_json(obj: Any) -> str:
        return orjson.dumps(obj, option=orjson.OPT_INDENT_2).decode("utf-8")


MAX_FRAMES: int = 201


_LOG: logging.Logger = logging.getLogger(__name__)


class RunManifest(NamedTuple):
    """The record accompanying the files of one parameter point.

    .. versionadded:: 1.0

    Attributes
    ----------
    experiment: :class:`str`
        The pipeline that produced the files.
    config: Dict[:class:`str`, Any]
        The resolved, post-default configuration.
    scales: Dict[:class:`str`, Any]
        The derived scales and the regime label.
    results: Dict[:class:`str`, Any]
        The fitted and predicted observables.
    files: List[:class:`str`]
        The files written next to the manifest.
    version: :class:`str`
        The package version.
    wall_clock: Dict[:class:`str`, Any]
        Start time and duration. The only content that differs
        between identical runs.
    """

    experiment: str
    config: Dict[str, Any]
    scales: Dict[str, Any]
    results: Dict[str, Any]
    files: List[str]
    version: str
    wall_clock: Dict[str, Any]

    def to_dict(self) -> Dict[str, Any]:
        return _plain(self._asdict())


def _plain(obj: Any) -> Any:
    # JSON has no infinities; numpy scalars are unwrapped.
    if isinstance(obj, Mapping):
        return {str(k): _plain(v) for k, v in obj.items()}

    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]

    if isinstance(obj, np.generic):
        obj = obj.item()

    if isinstance(obj, float) and not math.isfinite(obj):
        return None

    return obj


def decimate(size: int, limit: int = MAX_FRAMES) -> np.ndarray:
    """Returns evenly spread frame indices, at most ``limit`` of them,
    always keeping the first and the last frame.

    .. versionadded:: 1.0
    """
    if size <= limit:
        return np.arange(size)

    return np.unique(np.rint(np.linspace(0, size - 1, limit)).astype(int))


def write_table(path: Path, header: Sequence[str], columns: Sequence[np.ndarray]) -> Path:
    """Writes columns as a comma-separated table with one header row.

    Values are written with 17 significant digits, so identical
    inputs give identical files.

    .. versionadded:: 1.0
    """
    data = np.column_stack([np.asarray(c, dtype=float) for c in columns])
    np.savetxt(
        path, data, fmt="%.17g", delimiter=",", header=",".join(header), comments=""
    )

    _LOG.info("Wrote %s (%d rows)", path, data.shape[0])
    return path


def _long_form(
    times: np.ndarray, index: np.ndarray, values: np.ndarray
) -> List[np.ndarray]:
    frames = decimate(times.size)
    rows = values[frames]
    return [
        np.repeat(times[frames], index.size),
        np.tile(index, frames.size),
        rows.reshape(-1),
    ]


def write_qubit_population(directory: Path, series: Any) -> Path:
    alpha = np.asarray(series.alpha_e)
    return write_table(
        directory / "qubit_population.csv",
        ("time", "alpha_re", "alpha_im", "population"),
        (series.times, alpha.real, alpha.imag, np.abs(alpha) ** 2),
    )


def write_site_density(directory: Path, series: EvolutionSeries) -> Path:
    return write_table(
        directory / "site_density.csv",
        ("time", "site", "density"),
        _long_form(series.times, series.sites, series.site_density),
    )


def write_momentum_density(directory: Path, series: TimeSeries[MomentumFrame]) -> Path:
    frames = decimate(len(series))
    k = series[0].k
    density = np.array([series[int(i)].density for i in frames])
    times = series.times[frames]
    return write_table(
        directory / "momentum_density.csv",
        ("time", "k", "density"),
        (np.repeat(times, k.size), np.tile(k, times.size), density.reshape(-1)),
    )


def write_energy_momentum(
    directory: Path, series: TimeSeries[EnergyMomentumFrame]
) -> Path:
    frames = [series[int(i)] for i in decimate(len(series))]
    k = frames[0].k
    return write_table(
        directory / "energy_momentum.csv",
        ("time", "k", "omega", "density"),
        (
            np.repeat([f.time for f in frames], k.size),
            np.tile(k, len(frames)),
            np.tile(frames[0].omega, len(frames)),
            np.concatenate([f.density for f in frames]),
        ),
    )


def write_returns(directory: Path, events: Sequence[ReturnEvent]) -> Path:
    return write_table(
        directory / "returns.csv",
        ("t_emit", "sign", "t_return", "generation", "multiplicity"),
        (
            [e.t_i for e in events],
            [e.sign for e in events],
            [e.t_r for e in events],
            [e.generation for e in events],
            [e.multiplicity for e in events],
        ),
    )


def write_kernel(directory: Path, evaluation: KernelEvaluation) -> Path:
    return write_table(
        directory / "kernel.csv",
        ("tau", "series_re", "series_im", "closed_re", "closed_im"),
        (
            evaluation.tau,
            evaluation.series.real,
            evaluation.series.imag,
            evaluation.closed_form.real,
            evaluation.closed_form.imag,
        ),
    )


def write_dde(directory: Path, solution: DDESolution) -> Path:
    return write_table(
        directory / "dde.csv",
        ("time", "alpha_re", "alpha_im", "population"),
        (
            solution.times,
            solution.alpha_e.real,
            solution.alpha_e.imag,
            solution.qubit_population,
        ),
    )


def write_manifest(directory: Path, manifest: RunManifest) -> Path:
    path = directory / "manifest.json"
    path.write_text(_to_json(manifest.to_dict()) + "\n", encoding="utf-8")

    _LOG.info("Wrote %s", path)
    return path
