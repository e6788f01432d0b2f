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
    "Experiment",
    "get_experiment",
    "run",
    "run_point",
)
# fmt: on


import logging
import math
from concurrent.futures import ThreadPoolExecutor
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Callable, Dict, List, NamedTuple, Optional

import numpy as np

from .. import __version__
from ..errors import FitError, VacuumFieldError
from ..kernel_dde import KernelSpec, build_comb, kernel_exact, solve_dde
from ..lattice import (
    WEAK_FORCE,
    classify_regime,
    derived_scales,
    nearest_mode,
    rabi_frequency,
)
from ..propagator import (
    EvolutionSeries,
    detect_revivals,
    emission_asymmetry,
    energy_momentum_map,
    fit_decay_rate,
    fit_rabi,
    momentum_series,
    photon_centroid,
    propagate,
    wavefront_velocity,
)
from ..semiclassics import return_tree
from ..utils import measure_performance, plural
from .config import ExperimentConfig, ExperimentPoint
from .output import (
    RunManifest,
    write_dde,
    write_energy_momentum,
    write_kernel,
    write_manifest,
    write_momentum_density,
    write_qubit_population,
    write_returns,
    write_site_density,
)

# fmt: off
_KERNEL_SAMPLES:  int   = 2001
_BAND_EDGE:       float = 2.0
# fmt: on


_LOG: logging.Logger = logging.getLogger(__name__)


Pipeline = Callable[[ExperimentPoint, Path, List[Path]], Dict[str, Any]]


class Experiment(NamedTuple):
    name: str
    description: str
    pipeline: Pipeline


_EXPERIMENTS: Dict[str, Experiment] = {}


def _experiment(name: str, description: str) -> Callable[[Pipeline], Pipeline]:
    def deco(func: Pipeline) -> Pipeline:
        _EXPERIMENTS[name] = Experiment(name, description, func)
        return func

    return deco


def get_experiment(name: str) -> Experiment:
    """Returns the registered experiment of the given name.

    .. versionadded:: 1.0

    Raises
    ------
    KeyError
        No experiment of that name exists.
    """
    return _EXPERIMENTS[name]


def _evolve(
    point: ExperimentPoint, directory: Path, files: List[Path]
) -> EvolutionSeries:
    series = propagate(
        point.lattice, point.qubit, point.t_max, point.dt_out, point.method
    )

    files.append(write_qubit_population(directory, series))
    files.append(write_site_density(directory, series))

    return series


def _state_at(series: EvolutionSeries, time: float) -> Any:
    return series[int(np.argmin(np.abs(series.times - time)))]


def _decay(series: EvolutionSeries) -> Dict[str, Any]:
    try:
        fit = fit_decay_rate(series)
    except FitError as exc:
        _LOG.warning("Decay fit skipped: %s", exc)
        return {}

    return {"gamma_fit": fit.gamma_fit, "gamma_r_squared": fit.r_squared}


@_experiment("rabi", "Vacuum Rabi oscillations with a single Wannier-Stark mode.")
def _rabi(point: ExperimentPoint, directory: Path, files: List[Path]) -> Dict[str, Any]:
    series = _evolve(point, directory, files)
    files.append(write_momentum_density(directory, momentum_series(series)))

    n_c = nearest_mode(point.lattice, point.qubit)
    predicted = rabi_frequency(point.lattice, point.qubit, n_c)
    results: Dict[str, Any] = {"nearest_mode": n_c, "rabi_frequency_predicted": predicted}

    try:
        fit = fit_rabi(series)
    except FitError as exc:
        _LOG.warning("Rabi fit skipped: %s", exc)
    else:
        results.update(rabi_frequency_fit=fit.frequency, contrast=fit.contrast)

    if predicted > 0:
        try:
            state = _state_at(series, math.pi / predicted)
            results["centroid_half_period"] = photon_centroid(state)
        except VacuumFieldError as exc:
            _LOG.warning("Centroid skipped: %s", exc)

    return results


@_experiment("weakforce", "Decay with partial revivals, kernel and delay-equation data.")
def _weakforce(
    point: ExperimentPoint, directory: Path, files: List[Path]
) -> Dict[str, Any]:
    lat, qb = point.lattice, point.qubit
    series = _evolve(point, directory, files)

    momenta = momentum_series(series)
    files.append(write_momentum_density(directory, momenta))
    files.append(write_energy_momentum(directory, energy_momentum_map(momenta, J=lat.J)))

    results = _decay(series)
    results["revivals"] = [list(r) for r in detect_revivals(series)]

    if lat.F == 0:
        return results

    scales = derived_scales(lat, qb)

    if abs(qb.omega0) < _BAND_EDGE * lat.J:
        events = return_tree(
            qb.omega0, t_bloch=scales.t_bloch, t_max=point.t_max, J=lat.J
        )
        files.append(write_returns(directory, events))
        results["returns_predicted"] = [e.t_r for e in events]

    spec = KernelSpec.from_lattice(lat, qb)
    tau = np.linspace(0.0, min(point.t_max, 2 * scales.t_bloch), _KERNEL_SAMPLES)
    files.append(write_kernel(directory, kernel_exact(spec, tau)))

    if qb.omega0 == 0:
        solution = solve_dde(build_comb(lat, qb), point.t_max, point.dt_out)
        files.append(write_dde(directory, solution))
        results["dde_revivals"] = [list(r) for r in detect_revivals(solution)]

    return results


@_experiment("edgechiral", "Near-band-edge qubit with one-sided emission.")
def _edgechiral(
    point: ExperimentPoint, directory: Path, files: List[Path]
) -> Dict[str, Any]:
    series = _evolve(point, directory, files)
    scales = derived_scales(point.lattice, point.qubit)

    results = {}
    balance_at = min(scales.t_bloch / 2, point.t_max)
    balance = emission_asymmetry(_state_at(series, balance_at), point.lattice.n0)

    results.update(
        balance_time=balance_at,
        left_population=balance.left,
        right_population=balance.right,
        left_right_ratio=balance.ratio,
    )
    return results


@_experiment("markov", "Exponential decay and free wavefronts without force.")
def _markov(point: ExperimentPoint, directory: Path, files: List[Path]) -> Dict[str, Any]:
    series = _evolve(point, directory, files)
    results = _decay(series)

    try:
        front = wavefront_velocity(series)
    except FitError as exc:
        _LOG.warning("Wavefront fit skipped: %s", exc)
    else:
        results.update(front_velocity_right=front.right, front_velocity_left=front.left)

    return results


def _scales(point: ExperimentPoint) -> Dict[str, Any]:
    scales = derived_scales(point.lattice, point.qubit)
    info: Dict[str, Any] = scales._asdict()
    info["regime"] = (
        classify_regime(point.lattice, point.qubit).label
        if scales.has_ladder
        else "no-force"
    )
    return info


@measure_performance
def _execute(experiment: Experiment, point: ExperimentPoint, directory: Path) -> Any:
    files: List[Path] = []
    results = experiment.pipeline(point, directory, files)
    return results, files


def run_point(
    config: ExperimentConfig, point: ExperimentPoint, directory: Path
) -> RunManifest:
    """Runs one parameter point and writes its files and manifest.

    .. versionadded:: 1.0

    Raises
    ------
    InvariantViolation
        The run broke a numerical invariant.
    OSError
        The directory cannot be written.
    """
    experiment = get_experiment(config.experiment)
    directory.mkdir(parents=True, exist_ok=True)

    _LOG.info("Running %s at %s (N=%d)", experiment.name, point.label, point.lattice.N)

    started = datetime.now(timezone.utc).isoformat(timespec="seconds")
    (results, files), elapsed = _execute(experiment, point, directory)

    resolved = point.resolved()
    resolved.update(experiment=config.experiment, out_dir=config.out_dir)

    manifest = RunManifest(
        config.experiment,
        resolved,
        _scales(point),
        results,
        sorted(p.name for p in files) + ["manifest.json"],
        __version__,
        {"started": started, "elapsed_ms": elapsed},
    )
    write_manifest(directory, manifest)

    _LOG.info("Finished %s at %s in %.1f s", experiment.name, point.label, elapsed / 1000)
    return manifest


def run(
    config: ExperimentConfig, *, out: Optional[Path] = None, jobs: int = 1
) -> List[RunManifest]:
    """Runs every parameter point of a configuration.

    Each point writes to its own directory, named after its
    parameters, below the output directory.

    .. versionadded:: 1.0

    Parameters
    ----------
    config: :class:`ExperimentConfig`
        The validated configuration.
    out: Optional[:class:`pathlib.Path`]
        Overrides the output directory of the configuration.
    jobs: :class:`int`
        The number of points run concurrently.
        Defaults to ``1``.

    Returns
    -------
    List[:class:`RunManifest`]
        One manifest per point, in sweep order.
    """
    if jobs < 1:
        raise ValueError(f"invalid jobs {jobs} (must be >= 1)")

    root = Path(config.out_dir) if out is None else out
    points = config.points

    _LOG.info(
        "Starting %s with %s on %s",
        config.experiment,
        format(plural(len(points)), "point"),
        format(plural(jobs), "worker"),
    )

    def _task(point: ExperimentPoint) -> RunManifest:
        return run_point(config, point, root / point.label)

    if jobs == 1:
        return [_task(point) for point in points]

    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_task, points))
