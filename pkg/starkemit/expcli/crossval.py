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
    "RMS_TOLERANCE",
    "REVIVAL_TOLERANCE",
    "CrossvalReport",
    "check_crossval_regime",
    "crossval",
    "crossval_point",
)
# fmt: on


import logging
import math
from pathlib import Path
from typing import List, NamedTuple, Optional, Tuple

import numpy as np

from ..errors import RegimeError, UnsupportedRegimeError
from ..kernel_dde import DDESolution, build_comb, solve_dde
from ..lattice import CROSSOVER, STRONG_FORCE, classify_regime, derived_scales
from ..propagator import EvolutionSeries, detect_revivals, propagate
from ..semiclassics import return_tree
from ..utils import PASS_MARK, bool_to_mark, tchart
from .config import ExperimentConfig, ExperimentPoint
from .output import write_table

# fmt: off
RMS_TOLERANCE:     float = 0.02
REVIVAL_TOLERANCE: float = 0.03
# fmt: on


_LOG: logging.Logger = logging.getLogger(__name__)


class CrossvalReport(NamedTuple):
    """The comparison of a full simulation with the delay equation.

    .. versionadded:: 1.0

    Attributes
    ----------
    label: :class:`str`
        The parameter point.
    rms: :class:`float`
        The root-mean-square difference of ``|alpha_e|`` over the
        first two Bloch periods.
    max_difference: :class:`float`
        The largest such difference.
    revivals_simulated: List[:class:`float`]
        Revival times of the full simulation.
    revivals_dde: List[:class:`float`]
        Revival times of the delay equation.
    returns_predicted: List[:class:`float`]
        Semiclassical return times.
    t_bloch: :class:`float`
        The Bloch period.
    t_max: :class:`float`
        The duration of the run.
    """

    label: str
    rms: float
    max_difference: float
    revivals_simulated: List[float]
    revivals_dde: List[float]
    returns_predicted: List[float]
    t_bloch: float
    t_max: float

    @property
    def rms_passed(self) -> bool:
        return self.rms <= RMS_TOLERANCE

    @property
    def revivals_passed(self) -> bool:
        """Whether every revival of the delay equation appears in the
        full simulation within 3% of its time.
        """
        return all(
            _nearest_deviation(t, self.revivals_simulated) <= REVIVAL_TOLERANCE
            for t in self.revivals_dde
        )

    @property
    def returns_passed(self) -> bool:
        """Whether every predicted return that fits in the run is
        matched by a simulated revival within 3% of a Bloch period.
        """
        margin = REVIVAL_TOLERANCE * self.t_bloch
        return all(
            _nearest_gap(t, self.revivals_simulated) <= margin
            for t in self.returns_predicted
            if t + margin <= self.t_max
        )

    @property
    def passed(self) -> bool:
        return self.rms_passed and self.revivals_passed and self.returns_passed

    def render(self) -> str:
        deviations = [
            f"{t:.6g} ({_nearest_gap(t, self.revivals_simulated) / self.t_bloch:.2%} T_B)"
            for t in self.returns_predicted
        ]
        rows = {
            "Point": self.label,
            "RMS |alpha_e| difference": (
                f"{self.rms:.3e} [{bool_to_mark(self.rms_passed)}]"
            ),
            "Max |alpha_e| difference": f"{self.max_difference:.3e}",
            "Simulated revivals": _times(self.revivals_simulated),
            "Delay-equation revivals": _times(self.revivals_dde),
            "Revival agreement": bool_to_mark(self.revivals_passed),
            "Predicted returns": ", ".join(deviations) or "none",
            "Return agreement": bool_to_mark(self.returns_passed),
        }
        return tchart(rows)


def _times(values: List[float]) -> str:
    return ", ".join(f"{t:.6g}" for t in values) or "none"


def _nearest_gap(t: float, candidates: List[float]) -> float:
    return min((abs(c - t) for c in candidates), default=math.inf)


def _nearest_deviation(t: float, candidates: List[float]) -> float:
    return _nearest_gap(t, candidates) / t


def check_crossval_regime(point: ExperimentPoint) -> None:
    """Refuses parameter points the delay equation does not describe.

    .. versionadded:: 1.0

    Raises
    ------
    RegimeError
        The lattice has no force or the force is strong.
    UnsupportedRegimeError
        The qubit is detuned from the band centre.
    """
    lat, qb = point.lattice, point.qubit

    if lat.F == 0:
        raise RegimeError("cross-validation needs a force (F > 0)")

    if qb.omega0 != 0:
        raise UnsupportedRegimeError(
            f"invalid omega0 {qb.omega0} "
            "(the delay equation holds at the band centre only)"
        )

    regime = classify_regime(lat, qb)

    if regime.label == STRONG_FORCE:
        raise RegimeError(
            f"invalid point {point.label} (strong force, Gamma T_B={regime.ratio:.3g}; "
            "single-mode Rabi dynamics has no delay-equation counterpart)"
        )

    if regime.label == CROSSOVER:
        _LOG.warning(
            "Cross-validating %s in the crossover regime (Gamma T_B=%.3g); "
            "expect larger deviations",
            point.label,
            regime.ratio,
        )


def _compare(
    series: EvolutionSeries, solution: DDESolution, t_bloch: float
) -> Tuple[np.ndarray, float, float]:
    difference = np.abs(np.abs(series.alpha_e) - np.abs(solution.alpha_e))
    window = series.times <= 2 * t_bloch
    rms = float(np.sqrt(np.mean(difference[window] ** 2)))
    return difference, rms, float(np.max(difference[window]))


def crossval_point(
    point: ExperimentPoint, directory: Optional[Path] = None
) -> CrossvalReport:
    """Runs the full simulation and the delay equation on one point
    and compares them.

    .. versionadded:: 1.0

    Parameters
    ----------
    point: :class:`ExperimentPoint`
        The parameter point.
    directory: Optional[:class:`pathlib.Path`]
        Where to write ``crossval.csv``. Nothing is written if
        omitted.
    """
    check_crossval_regime(point)

    lat, qb = point.lattice, point.qubit
    t_bloch = derived_scales(lat, qb).t_bloch

    series = propagate(lat, qb, point.t_max, point.dt_out, point.method)
    solution = solve_dde(build_comb(lat, qb), point.t_max, point.dt_out)
    difference, rms, worst = _compare(series, solution, t_bloch)

    events = return_tree(qb.omega0, t_bloch=t_bloch, t_max=point.t_max, J=lat.J)

    report = CrossvalReport(
        point.label,
        rms,
        worst,
        [r.time for r in detect_revivals(series)],
        [r.time for r in detect_revivals(solution)],
        [e.t_r for e in events],
        t_bloch,
        point.t_max,
    )

    if directory is not None:
        directory.mkdir(parents=True, exist_ok=True)
        write_table(
            directory / "crossval.csv",
            ("time", "abs_alpha_simulated", "abs_alpha_dde", "difference"),
            (series.times, np.abs(series.alpha_e), np.abs(solution.alpha_e), difference),
        )

    _LOG.info("Cross-validated %s: RMS %.3e", point.label, rms)
    return report


def crossval(
    config: ExperimentConfig, *, out: Optional[Path] = None
) -> List[CrossvalReport]:
    """Cross-validates every point of a configuration.

    All points are checked for a supported regime before any
    simulation starts.

    .. versionadded:: 1.0
    """
    points = config.points

    for point in points:
        check_crossval_regime(point)

    root = Path(config.out_dir) if out is None else out
    reports = [crossval_point(point, root / point.label) for point in points]

    passed = sum(r.passed for r in reports)
    _LOG.info("Cross-validation: %d of %d point(s) %s", passed, len(reports), PASS_MARK)

    return reports
