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
    "DecayFit",
    "EmissionBalance",
    "FrontVelocity",
    "RabiFit",
    "Revival",
    "default_fit_window",
    "detect_revivals",
    "emission_asymmetry",
    "fit_decay_rate",
    "fit_rabi",
    "photon_centroid",
    "revival_amplitude",
    "wavefront_velocity",
)
# fmt: on


import logging
import math
import warnings
from typing import Any, List, NamedTuple, Optional, Tuple

import numpy as np
from scipy.optimize import OptimizeWarning, curve_fit
from scipy.signal import find_peaks

from ..errors import FitError, VacuumFieldError
from ..lattice import LatticeSpec, QubitSpec, derived_scales
from .states import EvolutionSeries, SingleExcitationState

# fmt: off
_MIN_SAMPLES:      int   = 5
_MIN_POPULATION:   float = 1e-12
_REVIVAL_DELAY:    float = 5.0
_PEAK_OVER_FLOOR:  float = 10.0
_FFT_PADDING:      int   = 16
# fmt: on


_LOG: logging.Logger = logging.getLogger(__name__)


class DecayFit(NamedTuple):
    gamma_fit: float
    r_squared: float


class Revival(NamedTuple):
    time: float
    population: float


class RabiFit(NamedTuple):
    frequency: float
    contrast: float


class FrontVelocity(NamedTuple):
    right: float
    left: float


class EmissionBalance(NamedTuple):
    left: float
    right: float

    @property
    def ratio(self) -> float:
        return self.left / self.right if self.right > 0 else math.inf


def _trace(series: Any) -> Tuple[np.ndarray, np.ndarray]:
    try:
        times = np.asarray(series.times, dtype=float)
        population = np.asarray(series.qubit_population, dtype=float)
    except AttributeError:
        raise TypeError(
            "Expected a series with times and qubit_population, "
            f"not {type(series).__name__}."
        ) from None

    return times, population


def default_fit_window(lat: LatticeSpec, qb: QubitSpec) -> Tuple[float, float]:
    """Returns the default window for the decay-rate fit.

    The window starts at ``1 / Gamma``, past the quadratic onset of
    the decay, and ends at ``min(0.4 T_B, 3 / Gamma)``, before the
    first revival.

    .. versionadded:: 1.0
    """
    scales = derived_scales(lat, qb)

    if scales.gamma == 0:
        raise FitError("invalid g 0.0 (a decoupled qubit does not decay)")

    return 1 / scales.gamma, min(0.4 * scales.t_bloch, 3 / scales.gamma)


def fit_decay_rate(series: Any, window: Optional[Tuple[float, float]] = None) -> DecayFit:
    """Fits an exponential decay to the qubit population.

    The rate is the negated least-squares slope of the logarithm of
    the population over the window.

    .. versionadded:: 1.0

    Parameters
    ----------
    series: Any
        Anything exposing ``times`` and ``qubit_population``.
    window: Optional[Tuple[:class:`float`, :class:`float`]]
        The fit interval. Defaults to :func:`default_fit_window`
        when ``series`` is an :class:`EvolutionSeries`, clipped to
        the simulated range.

    Returns
    -------
    :class:`DecayFit`
        The fitted rate and the coefficient of determination.

    Raises
    ------
    FitError
        Fewer than 5 samples in the window, or a population below
        ``1e-12`` inside it.
    """
    times, population = _trace(series)

    if window is None:
        if not isinstance(series, EvolutionSeries):
            raise FitError("a fit window is required for this series")

        window = default_fit_window(series.lattice, series.qubit)
        window = (window[0], min(window[1], float(times[-1])))

    start, end = window
    mask = (times >= start) & (times <= end)

    if np.count_nonzero(mask) < _MIN_SAMPLES:
        raise FitError(
            f"invalid window [{start:g}, {end:g}] "
            f"(holds fewer than {_MIN_SAMPLES} samples)"
        )

    selected = population[mask]

    if np.any(selected <= _MIN_POPULATION):
        raise FitError(f"invalid window [{start:g}, {end:g}] (population vanishes)")

    t = times[mask]
    log_population = np.log(selected)
    slope, intercept = np.polyfit(t, log_population, 1)

    residual = np.sum((log_population - (slope * t + intercept)) ** 2)
    total = np.sum((log_population - log_population.mean()) ** 2)
    r_squared = 1.0 - residual / total if total > 0 else 1.0

    _LOG.info("Fitted decay rate %.6g (r^2=%.6f)", -slope, r_squared)

    return DecayFit(float(-slope), float(r_squared))


def detect_revivals(
    series: Any, threshold: float = 0.02, *, after: Optional[float] = None
) -> List[Revival]:
    """Finds partial revivals of the qubit population.

    A revival is a local maximum whose prominence reaches
    ``threshold`` (absolute population), searched after the initial
    decay.

    .. versionadded:: 1.0

    Parameters
    ----------
    series: Any
        Anything exposing ``times`` and ``qubit_population``.
    threshold: :class:`float`
        The minimum prominence.
        Defaults to ``0.02``.
    after: Optional[:class:`float`]
        Only maxima later than this are reported. Defaults to
        ``5 / Gamma`` when the series carries a ``gamma``.

    Returns
    -------
    List[:class:`Revival`]
        The revivals in chronological order, possibly empty.
    """
    times, population = _trace(series)

    if after is None:
        gamma = getattr(series, "gamma", None)

        if gamma is None:
            raise ValueError("after is required for series without a decay rate")

        after = _REVIVAL_DELAY / gamma if gamma > 0 else math.inf

    mask = times > after
    peaks, _ = find_peaks(population[mask], prominence=threshold)

    found = zip(times[mask][peaks], population[mask][peaks])
    return [Revival(float(t), float(p)) for t, p in found]


def _cosine(t: np.ndarray, offset: float, a: float, b: float, omega: float) -> np.ndarray:
    return offset + a * np.cos(omega * t) + b * np.sin(omega * t)


def _polish_frequency(times: np.ndarray, population: np.ndarray, omega: float) -> float:
    design = np.column_stack(
        (np.ones_like(times), np.cos(omega * times), np.sin(omega * times))
    )
    (offset, a, b), *_ = np.linalg.lstsq(design, population, rcond=None)

    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", OptimizeWarning)
            params, _ = curve_fit(_cosine, times, population, p0=(offset, a, b, omega))
    except (RuntimeError, ValueError):
        return omega

    return float(abs(params[3]))


def fit_rabi(series: Any) -> RabiFit:
    """Measures the oscillation frequency and contrast of the qubit
    population.

    The frequency is located at the peak of a zero-padded discrete
    spectrum, refined by parabolic interpolation and polished by a
    least-squares sinusoid fit.

    .. versionadded:: 1.0

    Raises
    ------
    FitError
        The series is too short or shows no spectral peak above the
        noise floor.
    """
    times, population = _trace(series)

    if times.size < 4 * _MIN_SAMPLES:
        raise FitError(
            f"invalid series of {times.size} samples (too short for a spectrum)"
        )

    dt = times[1] - times[0]
    signal = population - population.mean()
    size = _FFT_PADDING * times.size

    spectrum = np.abs(np.fft.rfft(signal, n=size))
    spacing = 2 * math.pi / (size * dt)

    j = int(np.argmax(spectrum[1:])) + 1

    if spectrum[j] <= _PEAK_OVER_FLOOR * max(float(np.median(spectrum)), 1e-300):
        raise FitError("no spectral peak above the noise floor")

    omega = j * spacing

    if j + 1 < spectrum.size:
        left, centre, right = spectrum[j - 1 : j + 2]
        curvature = left - 2 * centre + right

        if curvature != 0:
            omega += 0.5 * (left - right) / curvature * spacing

    polished = _polish_frequency(times, population, omega)

    # One bin of the unpadded spectrum bounds how far the polish may move.
    if abs(polished - omega) < _FFT_PADDING * spacing:
        omega = polished

    period = 2 * math.pi / omega
    first = (times >= times[0]) & (times <= times[0] + period)
    contrast = float(np.ptp(population[first]))

    _LOG.info("Fitted Rabi frequency %.6g (contrast %.4f)", omega, contrast)

    return RabiFit(omega, contrast)


def photon_centroid(state: SingleExcitationState) -> float:
    """Returns the mean site of the photon density.

    .. versionadded:: 1.0

    Raises
    ------
    VacuumFieldError
        The field population is below ``1e-12``.
    """
    density = state.site_density
    total = float(np.sum(density))

    if total <= _MIN_POPULATION:
        raise VacuumFieldError(
            f"invalid field population {total:.3e} (field is in vacuum)"
        )

    return float(np.sum(state.sites * density) / total)


def emission_asymmetry(state: SingleExcitationState, n0: int = 0) -> EmissionBalance:
    """Splits the field population into the parts left and right of
    the qubit site.

    .. versionadded:: 1.0
    """
    density = state.site_density
    return EmissionBalance(
        float(np.sum(density[state.sites < n0])), float(np.sum(density[state.sites > n0]))
    )


def wavefront_velocity(
    series: EvolutionSeries, window: Optional[Tuple[float, float]] = None
) -> FrontVelocity:
    """Measures the speed of the emitted wavefronts.

    The front on either side of the qubit is tracked as the maximum of
    the site density, which sits at the leading edge for Markovian
    emission, and fitted linearly in time.

    .. versionadded:: 1.0

    Parameters
    ----------
    series: :class:`EvolutionSeries`
        The evolution.
    window: Optional[Tuple[:class:`float`, :class:`float`]]
        The fit interval. Defaults to the last two thirds of the run.

    Raises
    ------
    FitError
        Fewer than 5 samples in the window.
    """
    times = series.times

    if window is None:
        window = (times[-1] / 3, times[-1])

    mask = (times >= window[0]) & (times <= window[1])

    if np.count_nonzero(mask) < _MIN_SAMPLES:
        raise FitError("invalid window (holds fewer than 5 samples)")

    sites = series.sites
    n0 = series.lattice.n0
    density = series.site_density[mask]

    right_sites = sites[sites > n0]
    left_sites = sites[sites < n0]

    right = right_sites[np.argmax(density[:, sites > n0], axis=1)]
    left = left_sites[np.argmax(density[:, sites < n0], axis=1)]

    t = times[mask]
    return FrontVelocity(
        float(np.polyfit(t, right, 1)[0]), float(np.polyfit(t, left, 1)[0])
    )


def revival_amplitude(series: Any, center: float, half_width: float) -> float:
    """Returns the largest qubit population within ``half_width`` of
    ``center``.

    .. versionadded:: 1.0

    Raises
    ------
    FitError
        No sample falls inside the window.
    """
    times, population = _trace(series)
    mask = np.abs(times - center) <= half_width

    if not mask.any():
        raise FitError(f"invalid window around t={center:g} (holds no samples)")

    return float(np.max(population[mask]))
