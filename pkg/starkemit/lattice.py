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
    "CROSSOVER",
    "STRONG_FORCE",
    "WEAK_FORCE",
    "DerivedScales",
    "HamiltonianMatrix",
    "LatticeSpec",
    "QubitSpec",
    "RegimeReport",
    "WannierStarkMode",
    "auto_size",
    "build_hamiltonian",
    "classify_regime",
    "coupling_mode_function",
    "derived_scales",
    "dispersion",
    "field_spectrum",
    "group_velocity",
    "nearest_mode",
    "rabi_frequency",
    "resonant_momentum",
    "wannier_stark_mode",
    "wrap_momentum",
)
# fmt: on


import logging
import math
from typing import Any, NamedTuple, Optional, Tuple, Union

import numpy as np
import scipy.sparse as sp
from scipy.linalg import eigh_tridiagonal

from .errors import ConfigurationError, HamiltonianError, OutOfBandError, RegimeError
from .specfun import BESSEL_ORDER_MARGIN, bessel_j, bessel_row

ArrayLike = Union[float, np.ndarray]


# fmt: off
STRONG_FORCE: str = "strong-force"
WEAK_FORCE:   str = "weak-force"
CROSSOVER:    str = "crossover"

_STRONG_BELOW: float = 0.1
_WEAK_ABOVE:   float = 10.0
_EDGE_PADDING: int   = 200
_MODE_WINDOW:  int   = 60
# fmt: on


_LOG: logging.Logger = logging.getLogger(__name__)


def _require_finite(name: str, value: Any) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float, np.floating)):
        raise ConfigurationError(
            f"Expected {name} to be int or float, not {type(value).__name__}.", key=name
        )

    value = float(value)

    if not math.isfinite(value):
        raise ConfigurationError(f"invalid {name} {value} (must be finite)", key=name)

    return value


class LatticeSpec:
    """The coupled-cavity array.

    Sites are labelled symmetrically about zero, so an array of ``N``
    cavities spans ``-(N - 1) / 2`` to ``(N - 1) / 2``. Energies are in
    units of the hopping rate.

    .. versionadded:: 1.0

    Parameters
    ----------
    N: :class:`int`
        The number of cavities. Must be odd and at least 3.
    F: :class:`float`
        The synthetic force (frequency step per site).
        Defaults to ``0``.
    n0: :class:`int`
        The site the qubit is attached to.
        Defaults to ``0``.
    J: :class:`float`
        The hopping rate.
        Defaults to ``1``.

    Raises
    ------
    ConfigurationError
        Any of the parameters is invalid.
    """

    __slots__: Tuple[str, ...] = ("__N", "__F", "__n0", "__J")

    def __init__(self, *, N: int, F: float = 0.0, n0: int = 0, J: float = 1.0) -> None:
        if isinstance(N, bool) or not isinstance(N, (int, np.integer)):
            raise ConfigurationError(
                f"Expected N to be int, not {type(N).__name__}.", key="N"
            )

        if N < 3 or N % 2 == 0:
            raise ConfigurationError(f"invalid N {N} (must be odd and >= 3)", key="N")

        if isinstance(n0, bool) or not isinstance(n0, (int, np.integer)):
            raise ConfigurationError(
                f"Expected n0 to be int, not {type(n0).__name__}.", key="n0"
            )

        half = (N - 1) // 2

        if abs(n0) > half:
            raise ConfigurationError(
                f"invalid n0 {n0} (must lie within [{-half}, {half}])", key="n0"
            )

        F = _require_finite("F", F)
        J = _require_finite("J", J)

        if F < 0:
            raise ConfigurationError(f"invalid F {F} (must be >= 0)", key="F")

        if J <= 0:
            raise ConfigurationError(f"invalid J {J} (must be > 0)", key="J")

        self.__N: int = int(N)
        self.__F: float = F
        self.__n0: int = int(n0)
        self.__J: float = J

    def __repr__(self) -> str:
        return f"<LatticeSpec N={self.__N} F={self.__F!r} n0={self.__n0} J={self.__J!r}>"

    def __eq__(self, other: object) -> bool:
        return isinstance(other, LatticeSpec) and self._key() == other._key()

    def __hash__(self) -> int:
        return hash(self._key())

    def _key(self) -> Tuple[int, float, int, float]:
        return (self.__N, self.__F, self.__n0, self.__J)

    @property
    def N(self) -> int:
        """:class:`int`: The number of cavities."""
        return self.__N

    @property
    def F(self) -> float:
        """:class:`float`: The synthetic force."""
        return self.__F

    @property
    def n0(self) -> int:
        """:class:`int`: The site the qubit is attached to."""
        return self.__n0

    @property
    def J(self) -> float:
        """:class:`float`: The hopping rate."""
        return self.__J

    @property
    def half_width(self) -> int:
        """:class:`int`: The largest site label."""
        return (self.__N - 1) // 2

    @property
    def sites(self) -> np.ndarray:
        """:class:`numpy.ndarray`: The site labels, in ascending order."""
        return np.arange(-self.half_width, self.half_width + 1)

    def site_index(self, n: int) -> int:
        """Returns the position of site ``n`` in :attr:`sites`."""
        return int(n) + self.half_width

    def replace(self, **changes: Any) -> LatticeSpec:
        """Returns a copy with the given fields replaced."""
        fields = {"N": self.__N, "F": self.__F, "n0": self.__n0, "J": self.__J}
        fields.update(changes)
        return LatticeSpec(**fields)


class QubitSpec:
    """The two-level emitter.

    .. versionadded:: 1.0

    Parameters
    ----------
    omega0: :class:`float`
        The qubit transition frequency.
    g: :class:`float`
        The qubit-cavity coupling. ``0`` leaves the qubit decoupled.

    Raises
    ------
    ConfigurationError
        Any of the parameters is invalid.
    """

    __slots__: Tuple[str, ...] = ("__omega0", "__g")

    def __init__(self, *, omega0: float, g: float) -> None:
        omega0 = _require_finite("omega0", omega0)
        g = _require_finite("g", g)

        if g < 0:
            raise ConfigurationError(f"invalid g {g} (must be >= 0)", key="g")

        self.__omega0: float = omega0
        self.__g: float = g

    def __repr__(self) -> str:
        return f"<QubitSpec omega0={self.__omega0!r} g={self.__g!r}>"

    def __eq__(self, other: object) -> bool:
        return isinstance(other, QubitSpec) and (self.__omega0, self.__g) == (
            other.omega0,
            other.g,
        )

    def __hash__(self) -> int:
        return hash((self.__omega0, self.__g))

    @property
    def omega0(self) -> float:
        """:class:`float`: The qubit transition frequency."""
        return self.__omega0

    @property
    def g(self) -> float:
        """:class:`float`: The qubit-cavity coupling."""
        return self.__g


class DerivedScales(NamedTuple):
    xi: float
    t_bloch: float
    gamma: float
    gbar: float
    ratio: float

    @property
    def has_ladder(self) -> bool:
        return math.isfinite(self.t_bloch)


class RegimeReport(NamedTuple):
    ratio: float
    label: str


class WannierStarkMode(NamedTuple):
    index: int
    energy: float
    m_lo: int
    amplitudes: np.ndarray

    @property
    def sites(self) -> np.ndarray:
        return np.arange(self.m_lo, self.m_lo + self.amplitudes.size)

    def centroid(self) -> float:
        weights = self.amplitudes**2
        return float(np.sum(self.sites * weights) / np.sum(weights))

    def embed(self, lat: LatticeSpec) -> np.ndarray:
        """Returns the mode as a full site vector of ``lat``."""
        vector = np.zeros(lat.N)
        start = lat.site_index(self.m_lo)
        vector[start : start + self.amplitudes.size] = self.amplitudes
        return vector


class HamiltonianMatrix:
    """The Hamiltonian in the single-excitation basis.

    Index ``0`` is the excited qubit, index ``1 + lat.site_index(n)``
    is one photon in cavity ``n``.

    .. versionadded:: 1.0

    Attributes
    ----------
    lattice: :class:`LatticeSpec`
        The array the matrix was built from.
    qubit: :class:`QubitSpec`
        The qubit the matrix was built from.
    matrix: :class:`scipy.sparse.csr_matrix`
        The sparse matrix.
    """

    __slots__: Tuple[str, ...] = ("lattice", "qubit", "matrix")

    def __init__(
        self, lattice: LatticeSpec, qubit: QubitSpec, matrix: sp.csr_matrix
    ) -> None:
        self.lattice: LatticeSpec = lattice
        self.qubit: QubitSpec = qubit
        self.matrix: sp.csr_matrix = matrix

    def __repr__(self) -> str:
        return f"<HamiltonianMatrix dimension={self.dimension} nnz={self.matrix.nnz}>"

    @property
    def dimension(self) -> int:
        """:class:`int`: ``N + 1``."""
        return self.matrix.shape[0]

    def hermiticity_defect(self) -> float:
        """Returns the largest entry of ``|H - H^dagger|``."""
        difference = self.matrix - self.matrix.conj().T
        return float(abs(difference).max()) if difference.nnz else 0.0

    def check_hermitian(self) -> None:
        """Raises :exc:`HamiltonianError` unless the matrix is
        exactly Hermitian.
        """
        defect = self.hermiticity_defect()

        if defect != 0:
            raise HamiltonianError(
            "Hamiltonian is not Hermitian", value=defect, tolerance=0.0
        )

    def gershgorin_bounds(self) -> Tuple[float, float]:
        """Returns lower and upper spectral bounds from the Gershgorin
        disks of the matrix.
        """
        matrix = self.matrix
        diagonal = matrix.diagonal().real
        radii = np.asarray(abs(matrix).sum(axis=1)).ravel() - np.abs(diagonal)
        return float(np.min(diagonal - radii)), float(np.max(diagonal + radii))


def derived_scales(lat: LatticeSpec, qb: QubitSpec) -> DerivedScales:
    """Computes the characteristic scales of the problem.

    Without force the localization length, the Bloch period and the
    ratio are infinite, and the mode coupling is zero.

    .. versionadded:: 1.0
    """
    gamma = qb.g**2 / lat.J

    if lat.F == 0:
        return DerivedScales(math.inf, math.inf, gamma, 0.0, math.inf)

    xi = 2 * lat.J / lat.F
    t_bloch = 2 * math.pi / lat.F

    return DerivedScales(xi, t_bloch, gamma, qb.g / math.sqrt(xi), gamma * t_bloch)


def auto_size(F: float, t_max: Optional[float] = None, *, J: float = 1.0) -> int:
    """Picks a lattice size that keeps the emitted field away from
    the truncation edges.

    Free propagation travels at most ``2J`` per unit time and a Bloch
    oscillation spans at most ``2 xi``; the smaller of the applicable
    bounds is used, padded by 200 sites and rounded up to odd.

    .. versionadded:: 1.0

    Parameters
    ----------
    F: :class:`float`
        The synthetic force.
    t_max: Optional[:class:`float`]
        The simulated duration. Required without force.
    J: :class:`float`
        The hopping rate.
        Defaults to ``1``.

    Returns
    -------
    :class:`int`
        The number of cavities.

    Raises
    ------
    ConfigurationError
        ``F`` is zero and ``t_max`` was not given.
    """
    bounds = []

    if t_max is not None:
        bounds.append(math.ceil(2 * (2 * J * t_max)) + _EDGE_PADDING)

    if F > 0:
        bounds.append(math.ceil(2 * (2 * (2 * J / F))) + _EDGE_PADDING)

    if not bounds:
        raise ConfigurationError("cannot size a lattice without force and without t_max")

    size = min(bounds)
    return size if size % 2 == 1 else size + 1


def build_hamiltonian(lat: LatticeSpec, qb: QubitSpec) -> HamiltonianMatrix:
    """Assembles the Hamiltonian in the single-excitation basis.

    The field block is tridiagonal with ``nF`` on the diagonal and
    ``-J`` on the off-diagonals; open boundaries terminate it. The
    qubit couples with strength ``g`` to site ``n0`` only.

    .. versionadded:: 1.0

    Parameters
    ----------
    lat: :class:`LatticeSpec`
        The array.
    qb: :class:`QubitSpec`
        The qubit.

    Returns
    -------
    :class:`HamiltonianMatrix`
        The assembled matrix.
    """
    N = lat.N
    cavity = np.arange(1, N + 1)
    coupled = 1 + lat.site_index(lat.n0)

    rows = np.concatenate(([0], cavity, cavity[:-1], cavity[1:], [0, coupled]))
    cols = np.concatenate(([0], cavity, cavity[1:], cavity[:-1], [coupled, 0]))
    data = np.concatenate(
        (
            [qb.omega0],
            lat.sites * lat.F,
            np.full(2 * (N - 1), -lat.J),
            [qb.g, qb.g],
        )
    )

    matrix = sp.csr_matrix((data, (rows, cols)), shape=(N + 1, N + 1), dtype=float)
    matrix.eliminate_zeros()

    _LOG.debug("Assembled Hamiltonian with %d sites and %d nonzeros", N, matrix.nnz)

    return HamiltonianMatrix(lat, qb, matrix)


def wrap_momentum(k: ArrayLike) -> ArrayLike:
    """Wraps quasi-momenta into ``(-pi, pi]``.

    .. versionadded:: 1.0
    """
    wrapped = math.pi - np.mod(math.pi - np.asarray(k, dtype=float), 2 * math.pi)
    return float(wrapped) if np.ndim(wrapped) == 0 else wrapped


def dispersion(k: ArrayLike, *, J: float = 1.0) -> ArrayLike:
    """Returns the photon band ``-2J cos k``.

    Momenta outside of ``(-pi, pi]`` are wrapped back, with a warning
    logged.

    .. versionadded:: 1.0
    """
    array = np.asarray(k, dtype=float)

    if np.any((array <= -math.pi) | (array > math.pi)):
        _LOG.warning(
            "Quasi-momentum outside the first Brillouin zone; wrapping into (-pi, pi]."
        )
        array = np.asarray(wrap_momentum(array))

    energy = -2 * J * np.cos(array)
    return float(energy) if energy.ndim == 0 else energy


def group_velocity(k: ArrayLike, *, J: float = 1.0) -> ArrayLike:
    """Returns the group velocity ``2J sin k`` of the photon band.

    .. versionadded:: 1.0
    """
    velocity = 2 * J * np.sin(np.asarray(k, dtype=float))
    return float(velocity) if velocity.ndim == 0 else velocity


def resonant_momentum(omega0: float, *, J: float = 1.0) -> float:
    """Returns the non-negative momentum ``k0`` resonant with the
    qubit, ``arccos(-omega0 / 2J)``.

    .. versionadded:: 1.0

    Raises
    ------
    OutOfBandError
        ``|omega0|`` exceeds the half bandwidth ``2J``.
    """
    if abs(omega0) > 2 * J:
        raise OutOfBandError(
            f"invalid omega0 {omega0} (must satisfy |omega0| <= {2 * J})"
        )

    return math.acos(max(-1.0, min(1.0, -omega0 / (2 * J))))


def _require_ladder(lat: LatticeSpec, what: str) -> float:
    if lat.F == 0:
        raise RegimeError(f"{what} is undefined without force (no Wannier-Stark ladder)")

    return 2 * lat.J / lat.F


def coupling_mode_function(lat: LatticeSpec, qb: QubitSpec, n: int) -> float:
    """Returns the coupling ``g J_{n0 - n}(xi)`` between the qubit
    and Wannier-Stark mode ``n``.

    Offsets beyond the audited Bessel range are zero to double
    precision and are returned as such.

    .. versionadded:: 1.0

    Raises
    ------
    RegimeError
        The lattice has no force.
    """
    xi = _require_ladder(lat, "the coupling-mode function")
    offset = lat.n0 - int(n)

    if abs(offset) > xi + BESSEL_ORDER_MARGIN:
        return 0.0

    return qb.g * bessel_j(offset, xi)


def classify_regime(lat: LatticeSpec, qb: QubitSpec) -> RegimeReport:
    """Classifies the dynamics by the product of the Markovian rate
    and the Bloch period.

    Below ``0.1`` the force is strong (vacuum Rabi oscillations with a
    single mode), above ``10`` it is weak (decay with revivals).

    .. versionadded:: 1.0

    Raises
    ------
    RegimeError
        The lattice has no force.
    """
    _require_ladder(lat, "the force regime")
    ratio = derived_scales(lat, qb).ratio

    if ratio < _STRONG_BELOW:
        label = STRONG_FORCE
    elif ratio > _WEAK_ABOVE:
        label = WEAK_FORCE
    else:
        label = CROSSOVER

    return RegimeReport(ratio, label)


def nearest_mode(lat: LatticeSpec, qb: QubitSpec) -> int:
    """Returns the index of the Wannier-Stark mode closest in energy
    to the qubit.

    .. versionadded:: 1.0
    """
    _require_ladder(lat, "the nearest mode")
    return int(round(qb.omega0 / lat.F))


def rabi_frequency(lat: LatticeSpec, qb: QubitSpec, n_c: int) -> float:
    """Returns the vacuum Rabi frequency of the qubit exchanging its
    excitation with mode ``n_c``.

    This is ``sqrt(delta^2 + 4 g_n^2)`` with the detuning
    ``delta = omega0 - n_c F`` and the mode coupling ``g_n``. It is
    only meaningful in the strong-force regime.

    .. versionadded:: 1.0
    """
    detuning = qb.omega0 - int(n_c) * lat.F
    g_n = coupling_mode_function(lat, qb, n_c)
    return math.sqrt(detuning**2 + 4 * g_n**2)


def wannier_stark_mode(
    lat: LatticeSpec, n: int, window: Optional[int] = None
) -> WannierStarkMode:
    """Builds the Wannier-Stark eigenmode centred on site ``n``.

    .. versionadded:: 1.0

    Parameters
    ----------
    lat: :class:`LatticeSpec`
        The array. Must have a force.
    n: :class:`int`
        The mode index.
    window: Optional[:class:`int`]
        The half width of the site window. Defaults to
        ``ceil(xi) + 60``. The window is clipped to the lattice.

    Returns
    -------
    :class:`WannierStarkMode`
        The mode with amplitudes ``J_{m - n}(xi)``.
    """
    xi = _require_ladder(lat, "a Wannier-Stark mode")

    if window is None:
        window = math.ceil(xi) + _MODE_WINDOW

    m_lo = max(int(n) - window, -lat.half_width)
    m_hi = min(int(n) + window, lat.half_width)

    if m_lo > m_hi:
        raise ConfigurationError(f"invalid mode index {n} (no overlap with the lattice)")

    return WannierStarkMode(int(n), int(n) * lat.F, m_lo, bessel_row(n, xi, m_lo, m_hi))


def field_spectrum(lat: LatticeSpec) -> np.ndarray:
    """Returns the ascending eigenvalues of the bare field block.

    .. versionadded:: 1.0
    """
    diagonal = lat.sites * lat.F
    off_diagonal = np.full(lat.N - 1, -lat.J)
    return eigh_tridiagonal(diagonal, off_diagonal, eigvals_only=True)
