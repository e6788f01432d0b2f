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
    "ReturnEvent",
    "Trajectory",
    "k_of_t",
    "omega_of_t",
    "return_time",
    "return_tree",
    "revivals_per_bloch_period",
    "turning_times",
    "velocity_of_t",
    "x_of_t",
)
# fmt: on


import logging
import math
from typing import Dict, List, NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np

from .errors import DegenerateTrajectoryError, DomainError, OutOfBandError
from .lattice import LatticeSpec, resonant_momentum, wrap_momentum

TimeLike = Union[float, np.ndarray]


# fmt: off
_MERGE_TOLERANCE: float = 1e-9
_MAX_DEPTH:       int   = 24
# fmt: on


_LOG: logging.Logger = logging.getLogger(__name__)


class Trajectory(NamedTuple):
    """A semiclassical wavepacket launched at ``t_i`` from ``x_i``
    with quasi-momentum ``k_i``.

    .. versionadded:: 1.0
    """

    t_i: float
    k_i: float
    x_i: float
    xi: float
    t_bloch: float
    J: float = 1.0

    @classmethod
    def from_lattice(
        cls,
        lat: LatticeSpec,
        k_i: float,
        *,
        t_i: float = 0.0,
        x_i: Optional[float] = None,
    ) -> Trajectory:
        if lat.F == 0:
            raise DomainError("invalid F 0.0 (Bloch trajectories need a force)")

        return cls(
            t_i,
            k_i,
            float(lat.n0) if x_i is None else x_i,
            2 * lat.J / lat.F,
            2 * math.pi / lat.F,
            lat.J,
        )

    @property
    def F(self) -> float:
        return 2 * math.pi / self.t_bloch


def _phase(traj: Trajectory, t: TimeLike) -> np.ndarray:
    t = np.asarray(t, dtype=float)

    if np.any(t < traj.t_i):
        raise DomainError(f"invalid time (must be >= t_i={traj.t_i})")

    return traj.k_i - 2 * math.pi * (t - traj.t_i) / traj.t_bloch


def _as_output(value: np.ndarray) -> TimeLike:
    return float(value) if value.ndim == 0 else value


def k_of_t(traj: Trajectory, t: TimeLike) -> TimeLike:
    """Returns the quasi-momentum ``k_i - F (t - t_i)`` wrapped into
    ``(-pi, pi]``.

    .. versionadded:: 1.0
    """
    return wrap_momentum(_phase(traj, t))


def x_of_t(traj: Trajectory, t: TimeLike) -> TimeLike:
    """Returns the wavepacket position.

    The position follows from integrating the group velocity
    ``2J sin k(t)``, giving
    ``x_i - xi cos k_i + xi cos(k_i - 2 pi (t - t_i) / T_B)``.

    .. versionadded:: 1.0
    """
    return _as_output(
        traj.x_i - traj.xi * math.cos(traj.k_i) + traj.xi * np.cos(_phase(traj, t))
    )


def omega_of_t(traj: Trajectory, t: TimeLike) -> TimeLike:
    """Returns the photon energy ``-2J cos k(t)``.

    .. versionadded:: 1.0
    """
    return _as_output(-2 * traj.J * np.cos(_phase(traj, t)))


def velocity_of_t(traj: Trajectory, t: TimeLike) -> TimeLike:
    """Returns the group velocity ``2J sin k(t)``.

    .. versionadded:: 1.0
    """
    return _as_output(2 * traj.J * np.sin(_phase(traj, t)))


def turning_times(traj: Trajectory, t_end: float) -> np.ndarray:
    """Returns the times in ``[t_i, t_end]`` at which the wavepacket
    reverses its motion, i.e. reaches a band edge.

    .. versionadded:: 1.0
    """
    F = traj.F
    # k(t) = m * pi  <=>  t = t_i + (k_i - m * pi) / F
    m_hi = math.floor(traj.k_i / math.pi)
    m_lo = math.ceil((traj.k_i - F * (t_end - traj.t_i)) / math.pi)

    times = [traj.t_i + (traj.k_i - m * math.pi) / F for m in range(m_hi, m_lo - 1, -1)]
    return np.array([t for t in times if traj.t_i <= t <= t_end])


def return_time(t_i: float, k_i: float, *, t_bloch: float) -> float:
    """Returns the earliest time after ``t_i`` at which a wavepacket
    launched with ``k_i`` is back at its starting site.

    .. versionadded:: 1.0

    Parameters
    ----------
    t_i: :class:`float`
        The emission time.
    k_i: :class:`float`
        The signed launch momentum in ``(-pi, pi]``.
    t_bloch: :class:`float`
        The Bloch period.

    Returns
    -------
    :class:`float`
        ``t_i + (1 + k_i / pi) T_B`` for negative momenta and
        ``t_i + (k_i / pi) T_B`` otherwise.

    Raises
    ------
    DomainError
        ``k_i`` lies outside of ``(-pi, pi]``.
    DegenerateTrajectoryError
        ``k_i`` is zero.
    """
    if not -math.pi < k_i <= math.pi:
        raise DomainError(f"invalid k_i {k_i} (must lie in (-pi, pi])")

    if k_i == 0:
        raise DegenerateTrajectoryError(k_i)

    if k_i < 0:
        return t_i + (1 + k_i / math.pi) * t_bloch

    return t_i + (k_i / math.pi) * t_bloch


class ReturnEvent(NamedTuple):
    t_i: float
    sign: int
    t_r: float
    generation: int
    multiplicity: int = 1


def _merge(events: List[ReturnEvent], tolerance: float) -> List[ReturnEvent]:
    merged: List[ReturnEvent] = []

    for event in events:
        if merged and event.t_r - merged[-1].t_r <= tolerance:
            multiplicity = merged[-1].multiplicity + event.multiplicity
            merged[-1] = merged[-1]._replace(multiplicity=multiplicity)
        else:
            merged.append(event)

    return merged


def _merge_frontier(
    spawned: List[Tuple[float, int]], tolerance: float
) -> List[Tuple[float, int]]:
    frontier: List[Tuple[float, int]] = []

    for t_r, paths in sorted(spawned):
        if frontier and t_r - frontier[-1][0] <= tolerance:
            frontier[-1] = (frontier[-1][0], frontier[-1][1] + paths)
        else:
            frontier.append((t_r, paths))

    return frontier


def return_tree(
    omega0: float,
    *,
    t_bloch: float,
    depth: int = 4,
    t_max: Optional[float] = None,
    J: float = 1.0,
    merge: bool = True,
) -> List[ReturnEvent]:
    """Predicts the times at which emitted wavepackets revisit the
    qubit.

    The qubit emits a pair of packets with momenta ``+k0`` and
    ``-k0``. Every return re-excites the qubit, which emits a new
    pair. The tree is expanded breadth first for ``depth``
    generations; packets returning together re-excite the qubit once,
    so each generation only expands distinct return times and an
    event's multiplicity counts the emission paths leading to it.

    .. versionadded:: 1.0

    Parameters
    ----------
    omega0: :class:`float`
        The qubit frequency. Must lie strictly inside the band.
    t_bloch: :class:`float`
        The Bloch period.
    depth: :class:`int`
        The number of generations.
        Defaults to ``4``.
    t_max: Optional[:class:`float`]
        Returns later than this are pruned.
        Defaults to three Bloch periods.
    J: :class:`float`
        The hopping rate.
        Defaults to ``1``.
    merge: :class:`bool`
        Whether to also merge coincident returns of different
        emissions (within ``1e-9 T_B``) into a single event, summing
        their multiplicities.
        Defaults to ``True``.

    Returns
    -------
    List[:class:`ReturnEvent`]
        The events, sorted by return time.

    Raises
    ------
    OutOfBandError
        ``omega0`` is not strictly inside the band.
    ValueError
        ``depth`` is out of range.
    """
    if abs(omega0) >= 2 * J:
        raise OutOfBandError(f"invalid omega0 {omega0} (must satisfy |omega0| < {2 * J})")

    if not 1 <= depth <= _MAX_DEPTH:
        raise ValueError(f"invalid depth {depth} (must be between 1 and {_MAX_DEPTH})")

    if t_max is None:
        t_max = 3 * t_bloch

    tolerance = _MERGE_TOLERANCE * t_bloch
    k0 = resonant_momentum(omega0, J=J)

    events: List[ReturnEvent] = []
    frontier: List[Tuple[float, int]] = [(0.0, 1)]

    for generation in range(1, depth + 1):
        spawned: List[Tuple[float, int]] = []

        for t_i, paths in frontier:
            for sign in (1, -1):
                t_r = return_time(t_i, sign * k0, t_bloch=t_bloch)

                if t_r > t_max + tolerance:
                    continue

                events.append(ReturnEvent(t_i, sign, t_r, generation, paths))
                spawned.append((t_r, paths))

        frontier = _merge_frontier(spawned, tolerance)

    events.sort(key=lambda e: (e.t_r, e.generation, -e.sign))

    _LOG.debug("Return tree for omega0=%g holds %d events", omega0, len(events))

    return _merge(events, tolerance) if merge else events


def revivals_per_bloch_period(
    events: Sequence[ReturnEvent], *, t_bloch: float, periods: int
) -> List[int]:
    """Counts return events, with multiplicity, falling in each Bloch
    period ``[m T_B, (m + 1) T_B)``.

    .. versionadded:: 1.0
    """
    counts: Dict[int, int] = {m: 0 for m in range(periods)}

    for event in events:
        m = math.floor(event.t_r / t_bloch + _MERGE_TOLERANCE)

        if m in counts:
            counts[m] += event.multiplicity

    return [counts[m] for m in range(periods)]
