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
    "EDGE_WIDTH",
    "METHODS",
    "Propagator",
    "default_dt_out",
    "default_t_max",
    "propagate",
)
# fmt: on


import logging
import math
from typing import Dict, Optional, Tuple

import numpy as np
import scipy.linalg

from ..errors import ConfigurationError, NormDriftError, SizingError, StepSizeError
from ..lattice import (
    STRONG_FORCE,
    HamiltonianMatrix,
    LatticeSpec,
    QubitSpec,
    build_hamiltonian,
    classify_regime,
    derived_scales,
    nearest_mode,
    rabi_frequency,
)
from ..specfun import BESSEL_ORDER_MARGIN, bessel_row
from ..utils import measure_performance, plural
from .states import EvolutionSeries, SingleExcitationState

# fmt: off
METHODS: Tuple[str, ...] = ("chebyshev", "eigen")

EDGE_WIDTH:     int   = 20
EDGE_TOLERANCE: float = 1e-6
NORM_TOLERANCE: float = 1e-10

_CHEBYSHEV_TOLERANCE: float = 1e-12
_MAX_ORDER:           int   = 4096
_MAX_STEP_PHASE:      float = 400.0
_EIGEN_ADVISORY_SIZE: int   = 4001
# fmt: on


_LOG: logging.Logger = logging.getLogger(__name__)


class Propagator:
    """Applies ``exp(-i H dt)`` to single-excitation vectors.

    The ``eigen`` backend diagonalises the Hamiltonian once and
    applies exact phases. The ``chebyshev`` backend expands the
    propagator in Chebyshev polynomials of the rescaled Hamiltonian,
    using Gershgorin bounds for the spectral interval and truncating
    the expansion once the Bessel coefficients drop below the
    tolerance.

    .. versionadded:: 1.0

    Parameters
    ----------
    hamiltonian: :class:`HamiltonianMatrix`
        The Hamiltonian. Must be exactly Hermitian.
    method: :class:`str`
        Either ``"chebyshev"`` or ``"eigen"``.
        Defaults to ``"chebyshev"``.
    tolerance: :class:`float`
        The per-step truncation error of the Chebyshev expansion.
        Defaults to ``1e-12``.
    max_order: :class:`int`
        The largest Chebyshev order a single step may use.
        Defaults to ``4096``.

    Raises
    ------
    ConfigurationError
        Unknown method.
    HamiltonianError
        The matrix is not Hermitian.
    """

    __slots__: Tuple[str, ...] = (
        "hamiltonian",
        "method",
        "tolerance",
        "max_order",
        "_energies",
        "_vectors",
        "_center",
        "_radius",
        "_coefficients",
    )

    def __init__(
        self,
        hamiltonian: HamiltonianMatrix,
        *,
        method: str = "chebyshev",
        tolerance: float = _CHEBYSHEV_TOLERANCE,
        max_order: int = _MAX_ORDER,
    ) -> None:
        if method not in METHODS:
            raise ConfigurationError(
                f"invalid method {method!r} (must be one of {', '.join(METHODS)})",
                key="method",
            )

        hamiltonian.check_hermitian()

        self.hamiltonian: HamiltonianMatrix = hamiltonian
        self.method: str = method
        self.tolerance: float = tolerance
        self.max_order: int = max_order
        self._energies: Optional[np.ndarray] = None
        self._vectors: Optional[np.ndarray] = None
        self._coefficients: Dict[float, np.ndarray] = {}

        lower, upper = hamiltonian.gershgorin_bounds()
        self._center: float = 0.5 * (upper + lower)
        self._radius: float = max(0.5 * (upper - lower), 1e-12)

        if method == "eigen":
            if hamiltonian.dimension > _EIGEN_ADVISORY_SIZE:
                _LOG.warning(
                    "Dense diagonalisation of a %d-dimensional Hamiltonian; "
                    "the chebyshev method scales better.",
                    hamiltonian.dimension,
                )

            dense = hamiltonian.matrix.toarray()
            self._energies, self._vectors = scipy.linalg.eigh(dense)

    @property
    def spectral_radius(self) -> float:
        """:class:`float`: Half the width of the Gershgorin interval."""
        return self._radius

    def chebyshev_order(self, dt: float) -> int:
        """Returns the number of Chebyshev terms needed for a step.

        Raises
        ------
        StepSizeError
            The step would exceed :attr:`max_order`.
        """
        return self._chebyshev_coefficients(dt).size

    def _chebyshev_coefficients(self, dt: float) -> np.ndarray:
        try:
            return self._coefficients[dt]
        except KeyError:
            pass

        x = self._radius * dt
        reach = int(abs(x)) + BESSEL_ORDER_MARGIN

        if abs(x) >= self.max_order:
            raise StepSizeError(reach, self.max_order, dt)

        row = bessel_row(0, abs(x), 0, reach)
        significant = np.nonzero(np.abs(row) > 0.25 * self.tolerance)[0]
        order = int(significant[-1]) + 2 if significant.size else 1

        if order > self.max_order:
            raise StepSizeError(order, self.max_order, dt)

        k = np.arange(order)
        bessel = row[:order] * np.where((x < 0) & (k % 2 == 1), -1.0, 1.0)
        weights = np.where(k == 0, 1.0, 2.0) * (-1j) ** k * bessel
        coefficients = weights * np.exp(-1j * self._center * dt)

        _LOG.debug("Chebyshev step dt=%g uses order %d", dt, order)

        self._coefficients[dt] = coefficients
        return coefficients

    def _rescaled(self, vector: np.ndarray) -> np.ndarray:
        return (self.hamiltonian.matrix @ vector - self._center * vector) / self._radius

    def evolve(self, vector: np.ndarray, dt: float) -> np.ndarray:
        """Returns ``exp(-i H dt) vector``. Negative steps evolve
        backwards in time.
        """
        vector = np.asarray(vector, dtype=complex)

        if self.method == "eigen":
            assert self._energies is not None and self._vectors is not None
            phases = np.exp(-1j * self._energies * dt)
            return self._vectors @ (phases * (self._vectors.T @ vector))

        coefficients = self._chebyshev_coefficients(dt)

        previous = vector
        result = coefficients[0] * previous

        if coefficients.size == 1:
            return result

        current = self._rescaled(previous)
        result += coefficients[1] * current

        for c in coefficients[2:]:
            previous, current = current, 2 * self._rescaled(current) - previous
            result += c * current

        return result


def default_dt_out(lat: LatticeSpec, qb: QubitSpec) -> float:
    """Returns the default sampling interval.

    Strong-force runs take 200 samples per Rabi period of the nearest
    mode, weak-force and crossover runs 400 samples per Bloch period.
    Runs without force sample every ``0.1 / J``.

    .. versionadded:: 1.0
    """
    if lat.F == 0:
        return 0.1 / lat.J

    period = _rabi_period(lat, qb)

    if period is not None:
        return period / 200

    return derived_scales(lat, qb).t_bloch / 400


def default_t_max(lat: LatticeSpec, qb: QubitSpec) -> float:
    """Returns the default duration: three Rabi periods under strong
    force, two Bloch periods otherwise, ``60 / J`` without force.

    .. versionadded:: 1.0
    """
    if lat.F == 0:
        return 60 / lat.J

    period = _rabi_period(lat, qb)

    if period is not None:
        return 3 * period

    return 2 * derived_scales(lat, qb).t_bloch


def _rabi_period(lat: LatticeSpec, qb: QubitSpec) -> Optional[float]:
    if classify_regime(lat, qb).label != STRONG_FORCE:
        return None

    omega = rabi_frequency(lat, qb, nearest_mode(lat, qb))
    return 2 * math.pi / omega if omega > 0 else None


def _check_sample(vector: np.ndarray, time: float, edge_guard: bool) -> None:
    drift = abs(float(np.vdot(vector, vector).real) - 1)

    if drift > NORM_TOLERANCE:
        raise NormDriftError(
            f"norm drift at t={time:g}", value=drift, tolerance=NORM_TOLERANCE
        )

    if edge_guard:
        field = vector[1:]
        edge = max(
            np.max(np.abs(field[:EDGE_WIDTH])), np.max(np.abs(field[-EDGE_WIDTH:]))
        )

        if edge > EDGE_TOLERANCE:
            raise SizingError(
                f"field reached the lattice edge at t={time:g}; increase N",
                value=float(edge),
                tolerance=EDGE_TOLERANCE,
            )


@measure_performance
def _run(
    propagator: Propagator,
    vector: np.ndarray,
    times: np.ndarray,
    substeps: int,
    edge_guard: bool,
) -> np.ndarray:
    amplitudes = np.empty((times.size, vector.size), dtype=complex)
    step = (times[1] - times[0]) / substeps if times.size > 1 else 0.0

    for i, time in enumerate(times):
        if i > 0:
            for _ in range(substeps):
                vector = propagator.evolve(vector, step)

        _check_sample(vector, time, edge_guard)
        amplitudes[i] = vector

    return amplitudes


def propagate(
    lat: LatticeSpec,
    qb: QubitSpec,
    t_max: float,
    dt_out: float,
    method: str = "chebyshev",
    *,
    initial_state: Optional[SingleExcitationState] = None,
    edge_guard: bool = True,
    max_order: int = _MAX_ORDER,
) -> EvolutionSeries:
    """Evolves the single-excitation state under the full
    Hamiltonian.

    Every recorded sample is checked for norm conservation and,
    unless disabled, for field amplitude reaching the outer 20
    sites of the lattice.

    .. versionadded:: 1.0

    Parameters
    ----------
    lat: :class:`LatticeSpec`
        The array.
    qb: :class:`QubitSpec`
        The qubit.
    t_max: :class:`float`
        The duration. Samples are taken at ``0, dt_out, ...`` up to
        ``t_max``.
    dt_out: :class:`float`
        The sampling interval.
    method: :class:`str`
        Either ``"chebyshev"`` or ``"eigen"``.
        Defaults to ``"chebyshev"``.
    initial_state: Optional[:class:`SingleExcitationState`]
        The state at ``t = 0``. Defaults to the excited qubit.
    edge_guard: :class:`bool`
        Whether to abort when the field reaches the lattice edges.
        Ignored for lattices narrower than four edge widths.
        Defaults to ``True``.
    max_order: :class:`int`
        The Chebyshev order cap per internal step.

    Returns
    -------
    :class:`EvolutionSeries`
        The sampled evolution.

    Raises
    ------
    ConfigurationError
        Invalid times, method or initial state.
    NormDriftError
        The norm drifted by more than ``1e-10``.
    SizingError
        The field reached the lattice edges.
    StepSizeError
        A step exceeds the Chebyshev order cap.
    """
    if not t_max > 0:
        raise ConfigurationError(f"invalid t_max {t_max} (must be > 0)", key="t_max")

    if not dt_out > 0:
        raise ConfigurationError(f"invalid dt_out {dt_out} (must be > 0)", key="dt_out")

    if initial_state is None:
        initial_state = SingleExcitationState.excited(lat)
    elif initial_state.beta.size != lat.N:
        raise ConfigurationError(
            f"invalid initial state with {initial_state.beta.size} sites "
            f"(must be {lat.N})"
        )

    vector = initial_state.to_vector()

    if abs(float(np.vdot(vector, vector).real) - 1) > NORM_TOLERANCE:
        raise ConfigurationError("invalid initial state (must be normalised)")

    if edge_guard and lat.N <= 4 * EDGE_WIDTH:
        _LOG.debug("Edge guard skipped for a %d-site lattice", lat.N)
        edge_guard = False

    propagator = Propagator(
        build_hamiltonian(lat, qb), method=method, max_order=max_order
    )

    steps = int(math.floor(t_max / dt_out + 1e-9))
    times = np.arange(steps + 1) * dt_out

    substeps = 1
    if method == "chebyshev":
        phase = propagator.spectral_radius * dt_out
        substeps = max(1, math.ceil(phase / _MAX_STEP_PHASE))

    _LOG.info(
        "Propagating N=%d over %s with the %s method",
        lat.N,
        format(plural(times.size), "sample"),
        method,
    )

    amplitudes, elapsed = _run(propagator, vector, times, substeps, edge_guard)

    _LOG.info("Propagation finished in %.1f s", elapsed / 1000)

    return EvolutionSeries(times, amplitudes, lattice=lat, qubit=qb, method=method)
