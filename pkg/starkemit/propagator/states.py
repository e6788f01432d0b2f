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
    "EnergyMomentumFrame",
    "EvolutionSeries",
    "MomentumFrame",
    "QubitTrace",
    "SingleExcitationState",
    "TimeSeries",
    "energy_momentum_map",
    "momentum_grid",
    "momentum_series",
    "to_momentum",
    "track_momentum_peak",
)
# fmt: on


import math
from typing import (
    TYPE_CHECKING,
    List,
    NamedTuple,
    Optional,
    Sequence,
    Tuple,
    TypeVar,
    Union,
    overload,
)

import numpy as np

from ..errors import ConfigurationError

if TYPE_CHECKING:
    from ..lattice import LatticeSpec, QubitSpec


T = TypeVar("T")


_UNIFORM_TOLERANCE: float = 1e-12


class SingleExcitationState:
    """A state with exactly one excitation shared between the qubit
    and the field.

    .. versionadded:: 1.0

    Attributes
    ----------
    alpha_e: :class:`complex`
        The amplitude of the excited qubit.
    beta: :class:`numpy.ndarray`
        The amplitude of one photon in each cavity.
    sites: :class:`numpy.ndarray`
        The site labels matching :attr:`beta`.
    time: :class:`float`
        The time stamp.
    """

    __slots__: Tuple[str, ...] = ("alpha_e", "beta", "sites", "time")

    def __init__(
        self, alpha_e: complex, beta: np.ndarray, sites: np.ndarray, time: float = 0.0
    ) -> None:
        beta = np.asarray(beta, dtype=complex)
        sites = np.asarray(sites)

        if beta.shape != sites.shape:
            raise ConfigurationError(
                f"invalid field amplitudes of shape {beta.shape} "
                f"(must match {sites.size} sites)"
            )

        self.alpha_e: complex = complex(alpha_e)
        self.beta: np.ndarray = beta
        self.sites: np.ndarray = sites
        self.time: float = float(time)

    def __repr__(self) -> str:
        return (
            f"<SingleExcitationState time={self.time!r} "
            f"qubit_population={self.qubit_population:.6f}>"
        )

    @classmethod
    def excited(cls, lat: LatticeSpec) -> SingleExcitationState:
        """Returns the excited qubit with the field in its vacuum."""
        return cls(1.0, np.zeros(lat.N, dtype=complex), lat.sites)

    @classmethod
    def from_vector(
        cls, vector: np.ndarray, sites: np.ndarray, time: float = 0.0
    ) -> SingleExcitationState:
        return cls(vector[0], vector[1:], sites, time)

    def to_vector(self) -> np.ndarray:
        return np.concatenate(([self.alpha_e], self.beta))

    @property
    def qubit_population(self) -> float:
        return abs(self.alpha_e) ** 2

    @property
    def site_density(self) -> np.ndarray:
        return np.abs(self.beta) ** 2

    @property
    def field_population(self) -> float:
        return float(np.sum(self.site_density))

    @property
    def norm(self) -> float:
        """:class:`float`: The total population, one for a valid
        state.
        """
        return self.qubit_population + self.field_population


class MomentumFrame(NamedTuple):
    time: float
    k: np.ndarray
    gamma: np.ndarray

    @property
    def density(self) -> np.ndarray:
        return np.abs(self.gamma) ** 2


class EnergyMomentumFrame(NamedTuple):
    time: float
    k: np.ndarray
    omega: np.ndarray
    density: np.ndarray


class QubitTrace(NamedTuple):
    times: np.ndarray
    qubit_population: np.ndarray
    gamma: Optional[float] = None


def _check_times(times: np.ndarray) -> None:
    if times.ndim != 1 or times.size == 0:
        raise ConfigurationError("invalid sample times (must be a non-empty 1-D array)")

    if times.size < 2:
        return

    steps = np.diff(times)

    if np.any(steps <= 0):
        raise ConfigurationError("invalid sample times (must be strictly increasing)")

    spacing = (times[-1] - times[0]) / (times.size - 1)
    scale = max(abs(times[-1]), spacing)

    if np.max(np.abs(steps - spacing)) > _UNIFORM_TOLERANCE * scale:
        raise ConfigurationError("invalid sample times (must be uniformly spaced)")


class TimeSeries(Sequence[T]):
    """Frames sampled at uniformly spaced times.

    .. versionadded:: 1.0

    Parameters
    ----------
    times: :class:`numpy.ndarray`
        The strictly increasing, uniformly spaced sample times.
    frames: Sequence[T]
        One payload per sample.
    """

    __slots__: Tuple[str, ...] = ("times", "_frames")

    def __init__(self, times: np.ndarray, frames: Sequence[T]) -> None:
        times = np.asarray(times, dtype=float)
        _check_times(times)

        if len(frames) != times.size:
            raise ConfigurationError(
                f"invalid frame count {len(frames)} (must match {times.size} samples)"
            )

        self.times: np.ndarray = times
        self._frames: Sequence[T] = frames

    def __len__(self) -> int:
        return self.times.size

    @overload
    def __getitem__(self, index: int) -> T:
        ...

    @overload
    def __getitem__(self, index: slice) -> List[T]:
        ...

    def __getitem__(self, index: Union[int, slice]) -> Union[T, List[T]]:
        if isinstance(index, slice):
            return [self._frame(i) for i in range(*index.indices(len(self)))]

        if index < 0:
            index += len(self)

        if not 0 <= index < len(self):
            raise IndexError("time series index out of range")

        return self._frame(index)

    def _frame(self, index: int) -> T:
        return self._frames[index]

    @property
    def dt(self) -> float:
        """:class:`float`: The sample spacing, ``0`` for one sample."""
        if self.times.size < 2:
            return 0.0

        return float((self.times[-1] - self.times[0]) / (self.times.size - 1))


class EvolutionSeries(TimeSeries[SingleExcitationState]):
    """The sampled evolution of a single-excitation state.

    States are materialised on access from the stored amplitude
    matrix.

    .. versionadded:: 1.0

    Attributes
    ----------
    amplitudes: :class:`numpy.ndarray`
        Complex amplitudes, one row per sample. Column ``0`` is the
        qubit, the remaining columns follow the lattice sites.
    lattice: :class:`LatticeSpec`
        The simulated array.
    qubit: :class:`QubitSpec`
        The simulated qubit.
    method: :class:`str`
        The propagation backend.
    """

    __slots__: Tuple[str, ...] = ("amplitudes", "lattice", "qubit", "method")

    def __init__(
        self,
        times: np.ndarray,
        amplitudes: np.ndarray,
        *,
        lattice: LatticeSpec,
        qubit: QubitSpec,
        method: str,
    ) -> None:
        super().__init__(times, amplitudes)
        self.amplitudes: np.ndarray = amplitudes
        self.lattice: LatticeSpec = lattice
        self.qubit: QubitSpec = qubit
        self.method: str = method

    def __repr__(self) -> str:
        return (
            f"<EvolutionSeries samples={len(self)} N={self.lattice.N} "
            f"method={self.method!r}>"
        )

    def _frame(self, index: int) -> SingleExcitationState:
        return SingleExcitationState.from_vector(
            self.amplitudes[index], self.lattice.sites, self.times[index]
        )

    @property
    def sites(self) -> np.ndarray:
        return self.lattice.sites

    @property
    def alpha_e(self) -> np.ndarray:
        return self.amplitudes[:, 0]

    @property
    def beta(self) -> np.ndarray:
        return self.amplitudes[:, 1:]

    @property
    def qubit_population(self) -> np.ndarray:
        return np.abs(self.alpha_e) ** 2

    @property
    def site_density(self) -> np.ndarray:
        return np.abs(self.beta) ** 2

    @property
    def gamma(self) -> float:
        """:class:`float`: The Markovian decay rate ``g^2 / J``."""
        return self.qubit.g**2 / self.lattice.J

    def norm_drift(self) -> float:
        """Returns the largest deviation of the total population from
        one over all samples.
        """
        norms = np.sum(np.abs(self.amplitudes) ** 2, axis=1)
        return float(np.max(np.abs(norms - 1)))


def momentum_grid(size: int) -> np.ndarray:
    """Returns the quasi-momenta ``-pi + 2 pi j / N``.

    .. versionadded:: 1.0
    """
    return -math.pi + 2 * math.pi * np.arange(size) / size


def _momentum_amplitudes(beta: np.ndarray, sites: np.ndarray) -> np.ndarray:
    # gamma_j = N^(-1/2) sum_n exp(-i k_j n) beta_n with k_j = -pi + 2 pi j / N,
    # rewritten as a phase-shifted FFT over the array index m = n - n_min.
    size = sites.size
    j = np.arange(size)
    alternating = np.where(sites % 2 == 0, 1.0, -1.0)
    shift = np.exp(-2j * math.pi * j * sites[0] / size)
    return shift * np.fft.fft(beta * alternating, axis=-1, norm="ortho")


def to_momentum(state: SingleExcitationState) -> MomentumFrame:
    """Transforms the field amplitudes to quasi-momentum space.

    The transform is unitary, so the field population is preserved.

    .. versionadded:: 1.0
    """
    gamma = _momentum_amplitudes(state.beta, state.sites)
    return MomentumFrame(state.time, momentum_grid(state.sites.size), gamma)


def momentum_series(series: EvolutionSeries) -> TimeSeries[MomentumFrame]:
    """Transforms every sample of an evolution to quasi-momentum
    space.

    .. versionadded:: 1.0
    """
    k = momentum_grid(series.sites.size)
    gammas = _momentum_amplitudes(series.beta, series.sites)
    frames = [MomentumFrame(t, k, gamma) for t, gamma in zip(series.times, gammas)]
    return TimeSeries(series.times, frames)


def energy_momentum_map(
    series: TimeSeries[MomentumFrame], *, J: float = 1.0
) -> TimeSeries[EnergyMomentumFrame]:
    """Attaches the band energy ``-2J cos k`` to every momentum
    density sample.

    .. versionadded:: 1.0
    """
    frames = [
        EnergyMomentumFrame(frame.time, frame.k, -2 * J * np.cos(frame.k), frame.density)
        for frame in series
    ]
    return TimeSeries(series.times, frames)


def track_momentum_peak(series: TimeSeries[MomentumFrame]) -> np.ndarray:
    """Returns the quasi-momentum of the density maximum in every
    frame.

    .. versionadded:: 1.0
    """
    return np.array([frame.k[np.argmax(frame.density)] for frame in series])
