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
    "DDESolution",
    "DelayComb",
    "GeneralizedDDESpec",
    "KernelEvaluation",
    "KernelSpec",
    "build_comb",
    "kernel_closed_form",
    "kernel_exact",
    "kernel_series",
    "kernel_sinusoidal",
    "mollified_kernel",
    "solve_dde",
    "solve_generalized_dde",
)
# fmt: on


import logging
import math
from typing import Callable, List, NamedTuple, Optional, Tuple, Union

import numpy as np
from numpy.polynomial import chebyshev
from scipy.integrate import trapezoid

from .errors import (
    ConfigurationError,
    DivergenceError,
    DomainError,
    KernelIdentityError,
    RegimeError,
    UnsupportedRegimeError,
)
from .lattice import LatticeSpec, QubitSpec
from .specfun import BESSEL_ORDER_MARGIN, bessel_j_many, bessel_row

TimeLike = Union[float, np.ndarray]
KernelFunction = Callable[["KernelSpec", np.ndarray], np.ndarray]


# fmt: off
_SERIES_MARGIN:       int   = 50
_SERIES_AIRY_LENGTHS: int   = 10
_SERIES_MINIMUM:      int   = 40
_SERIES_CHUNK:        int   = 256
_IDENTITY_TOLERANCE:  float = 1e-10
_DIVERGENCE_LIMIT:    float = 1 + 1e-6
_AUDIT_POINTS:        int   = 65
_PANEL_DECAY:         float = 2.0
# fmt: on


_LOG: logging.Logger = logging.getLogger(__name__)


class KernelSpec(NamedTuple):
    """Parameters of the memory kernel.

    .. versionadded:: 1.0
    """

    xi: float
    t_bloch: float
    omega0: float
    M: int

    @classmethod
    def from_lattice(
        cls, lat: LatticeSpec, qb: QubitSpec, *, truncation: Optional[int] = None
    ) -> KernelSpec:
        if lat.F == 0:
            raise RegimeError("the memory kernel is aperiodic without force")

        xi = 2 * lat.J / lat.F

        if truncation is None:
            # The Bessel tail decays over a few multiples of xi^(1/3) past n = xi.
            airy = _SERIES_AIRY_LENGTHS * math.ceil(xi ** (1 / 3))
            truncation = math.ceil(xi) + _SERIES_MARGIN + airy

        return cls(xi, 2 * math.pi / lat.F, qb.omega0, truncation)

    @property
    def F(self) -> float:
        return 2 * math.pi / self.t_bloch


class KernelEvaluation(NamedTuple):
    tau: np.ndarray
    series: np.ndarray
    closed_form: np.ndarray

    @property
    def defect(self) -> float:
        return float(np.max(np.abs(self.series - self.closed_form), initial=0.0))


def _check_tau(tau: TimeLike) -> np.ndarray:
    tau = np.asarray(tau, dtype=float)

    if np.any(tau < 0):
        raise DomainError("invalid tau (must be >= 0)")

    return tau


def _check_truncation(spec: KernelSpec) -> None:
    if spec.M < spec.xi + _SERIES_MINIMUM:
        raise ConfigurationError(
            f"invalid truncation M={spec.M} (must be >= xi + {_SERIES_MINIMUM})", key="M"
        )


def _scalar_or_array(value: np.ndarray) -> Union[complex, np.ndarray]:
    return complex(value) if value.ndim == 0 else value


def _ladder_sum(
    F: float, tau: np.ndarray, n: np.ndarray, weights: np.ndarray
) -> np.ndarray:
    # sum_n weights_n exp(-i F n tau), chunked over tau to bound memory
    flat = tau.reshape(-1)
    sums = np.empty(flat.size, dtype=complex)

    for start in range(0, flat.size, _SERIES_CHUNK):
        chunk = flat[start : start + _SERIES_CHUNK]
        phases = np.exp(-1j * F * np.multiply.outer(chunk, n))
        sums[start : start + chunk.size] = phases @ weights

    return sums.reshape(tau.shape)


def kernel_series(spec: KernelSpec, tau: TimeLike) -> Union[complex, np.ndarray]:
    """Sums the memory kernel over Wannier-Stark modes,
    ``sum_n J_n(xi)^2 exp(-i (F n - omega0) tau)`` for ``|n| <= M``.

    .. versionadded:: 1.0
    """
    tau = _check_tau(tau)
    _check_truncation(spec)

    # Orders past the audited Bessel range contribute nothing at double precision.
    reach = min(spec.M, int(spec.xi) + BESSEL_ORDER_MARGIN)
    n = np.arange(-reach, reach + 1)
    weights = bessel_row(0, spec.xi, -reach, reach) ** 2

    value = np.exp(1j * spec.omega0 * tau) * _ladder_sum(spec.F, tau, n, weights)
    return _scalar_or_array(value)


def kernel_closed_form(spec: KernelSpec, tau: TimeLike) -> Union[complex, np.ndarray]:
    """Evaluates the memory kernel in closed form,
    ``exp(i omega0 tau) J_0(2 xi sin(pi tau / T_B))``.

    .. versionadded:: 1.0
    """
    tau = _check_tau(tau)
    argument = 2 * spec.xi * np.sin(math.pi * tau / spec.t_bloch)
    value = np.exp(1j * spec.omega0 * tau) * bessel_j_many(0, argument)
    return _scalar_or_array(np.asarray(value))


def kernel_exact(
    spec: KernelSpec, tau: TimeLike, *, check: bool = True
) -> KernelEvaluation:
    """Evaluates the exact memory kernel in both its series and
    closed forms.

    .. versionadded:: 1.0

    Parameters
    ----------
    spec: :class:`KernelSpec`
        The kernel parameters.
    tau: Union[:class:`float`, :class:`numpy.ndarray`]
        The delays. Must be non-negative.
    check: :class:`bool`
        Whether to raise if the two forms disagree by more than
        ``1e-10``.
        Defaults to ``True``.

    Returns
    -------
    :class:`KernelEvaluation`
        Both forms at every delay.

    Raises
    ------
    ConfigurationError
        The truncation is below ``xi + 40``.
    KernelIdentityError
        The two forms disagree.
    """
    tau = np.atleast_1d(_check_tau(tau))
    evaluation = KernelEvaluation(
        tau,
        np.asarray(kernel_series(spec, tau)),
        np.asarray(kernel_closed_form(spec, tau)),
    )

    if check and evaluation.defect > _IDENTITY_TOLERANCE:
        raise KernelIdentityError(
            f"kernel forms disagree for xi={spec.xi:g}",
            value=evaluation.defect,
            tolerance=_IDENTITY_TOLERANCE,
        )

    return evaluation


def kernel_sinusoidal(spec: KernelSpec, tau: TimeLike) -> Union[complex, np.ndarray]:
    """Evaluates the kernel with every Bessel weight replaced by its
    large-argument sinusoid,
    ``(2 / (pi xi)) sum_n sin^2(n pi / 2 + xi + pi / 4) exp(-i F n tau)``.

    This is a truncated Dirac comb; it is meaningful only after
    averaging against a smooth window and only for ``omega0 = 0``.

    .. versionadded:: 1.0
    """
    tau = np.asarray(tau, dtype=float)
    n = np.arange(-spec.M, spec.M + 1)

    # sin^2(n pi / 2 + xi + pi / 4) = (1 + (-1)^n sin 2 xi) / 2
    weights = (1 + np.where(n % 2 == 0, 1.0, -1.0) * math.sin(2 * spec.xi)) / (
        math.pi * spec.xi
    )
    return _scalar_or_array(_ladder_sum(spec.F, tau, n, weights))


def mollified_kernel(
    kernel: KernelFunction,
    spec: KernelSpec,
    center: float,
    width: float,
    *,
    span: float = 8.0,
    samples: int = 4001,
) -> complex:
    """Averages a kernel against a normalised Gaussian window.

    .. versionadded:: 1.0

    Parameters
    ----------
    kernel: Callable
        A kernel function such as :func:`kernel_series` or
        :func:`kernel_sinusoidal`.
    spec: :class:`KernelSpec`
        The kernel parameters.
    center: :class:`float`
        The window centre.
    width: :class:`float`
        The window standard deviation.
    span: :class:`float`
        The integration half range in units of ``width``.
        Defaults to ``8``.
    samples: :class:`int`
        The number of quadrature nodes.
        Defaults to ``4001``.
    """
    tau = center + width * np.linspace(-span, span, samples)
    norm = width * math.sqrt(2 * math.pi)
    window = np.exp(-0.5 * ((tau - center) / width) ** 2) / norm
    return complex(trapezoid(np.asarray(kernel(spec, tau)) * window, tau))


class DelayComb(NamedTuple):
    """The delay-differential equation obtained when the memory
    kernel collapses onto a Dirac comb.

    The qubit amplitude obeys
    ``d alpha / dt = -instantaneous * alpha(t)
    - sum_d w_d exp(i omega0 d T / 2) alpha(t - d T / 2)``
    where ``w_d`` is :attr:`w_half` for odd ``d`` and :attr:`w_int`
    for even ``d >= 2``.

    .. versionadded:: 1.0
    """

    rate: float
    w_int: float
    w_half: float
    spacing: float
    instantaneous: float
    omega0: float = 0.0

    def weight(self, d: int) -> complex:
        """Returns the complex weight of the tooth at ``d`` half
        spacings.
        """
        base = self.w_half if d % 2 == 1 else self.w_int
        return base * np.exp(1j * self.omega0 * d * self.spacing / 2)


def build_comb(lat: LatticeSpec, qb: QubitSpec) -> DelayComb:
    """Builds the Dirac-comb equation for a qubit at the band centre.

    The integer teeth weigh ``Gamma``, the half-integer teeth
    ``Gamma sin(2 xi)`` and the instantaneous tooth ``Gamma / 2``,
    taking the Heaviside step at zero as one half.

    .. versionadded:: 1.0

    Raises
    ------
    RegimeError
        The lattice has no force.
    UnsupportedRegimeError
        The qubit is detuned from the band centre.
    """
    if lat.F == 0:
        raise RegimeError("invalid F 0.0 (the comb needs a Bloch period)")

    if qb.omega0 != 0:
        raise UnsupportedRegimeError(
            f"invalid omega0 {qb.omega0} "
            "(the comb reduction holds at the band centre only)"
        )

    xi = 2 * lat.J / lat.F
    gamma = qb.g**2 / lat.J

    return DelayComb(
        gamma, gamma, gamma * math.sin(2 * xi), 2 * math.pi / lat.F, gamma / 2
    )


class GeneralizedDDESpec(NamedTuple):
    """A ladder of equally spaced modes whose coupling to the qubit
    oscillates as ``f sin(n pi / 2 + phi)`` around the qubit
    frequency.

    .. versionadded:: 1.0
    """

    spacing: float
    envelope: float
    phase: float
    omega0: float = 0.0

    @classmethod
    def from_lattice(cls, lat: LatticeSpec, *, omega0: float = 0.0) -> GeneralizedDDESpec:
        """Returns the parameters of the Wannier-Stark ladder."""
        if lat.F == 0:
            raise RegimeError("invalid F 0.0 (no mode ladder without force)")

        xi = 2 * lat.J / lat.F
        return cls(lat.F, math.sqrt(2 / (math.pi * xi)), xi + math.pi / 4, omega0)

    @property
    def period(self) -> float:
        return 2 * math.pi / self.spacing

    def to_comb(self, g: float) -> DelayComb:
        # The constant part of sin^2 yields the integer teeth, the
        # alternating part the half-integer teeth.
        rate = g**2 * self.period / 2 * self.envelope**2
        return DelayComb(
            rate,
            rate,
            -rate * math.cos(2 * self.phase),
            self.period,
            rate / 2,
            self.omega0,
        )


class DDESolution:
    """The piecewise closed-form solution of a comb equation.

    Interval ``j`` (``j T / 2 <= t < (j + 1) T / 2``) is split into
    equal panels. On each panel the amplitude is ``exp(-mu y) Q(y)``
    with ``y`` in ``[0, 1]`` the panel coordinate,
    ``mu = instantaneous * T / (2 panels)`` and ``Q`` a polynomial of
    degree ``j`` held as a Chebyshev series on ``[0, 1]``.

    .. versionadded:: 1.0

    Attributes
    ----------
    times: :class:`numpy.ndarray`
        The sample times.
    alpha_e: :class:`numpy.ndarray`
        The qubit amplitude at every sample.
    comb: :class:`DelayComb`
        The solved equation.
    coefficients: List[:class:`numpy.ndarray`]
        The Chebyshev coefficients of every interval, one row per
        panel.
    """

    __slots__: Tuple[str, ...] = ("times", "alpha_e", "comb", "coefficients")

    def __init__(
        self,
        times: np.ndarray,
        alpha_e: np.ndarray,
        comb: DelayComb,
        coefficients: List[np.ndarray],
    ) -> None:
        self.times: np.ndarray = times
        self.alpha_e: np.ndarray = alpha_e
        self.comb: DelayComb = comb
        self.coefficients: List[np.ndarray] = coefficients

    def __repr__(self) -> str:
        return (
            f"<DDESolution samples={self.times.size} "
            f"intervals={len(self.coefficients)} panels={self.panels}>"
        )

    @property
    def interval_length(self) -> float:
        return self.comb.spacing / 2

    @property
    def panels(self) -> int:
        return self.coefficients[0].shape[0]

    @property
    def gamma(self) -> float:
        return self.comb.rate

    @property
    def qubit_population(self) -> np.ndarray:
        return np.abs(self.alpha_e) ** 2

    @property
    def _decay(self) -> float:
        return self.comb.instantaneous * self.interval_length / self.panels

    def _locate(self, t: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        x = t / self.interval_length
        index = np.clip(np.floor(x).astype(int), 0, len(self.coefficients) - 1)
        s = (x - index) * self.panels
        panel = np.clip(np.floor(s).astype(int), 0, self.panels - 1)
        return index, panel, s - panel

    def __call__(self, t: TimeLike) -> Union[complex, np.ndarray]:
        t = np.asarray(t, dtype=float)
        index, panel, y = self._locate(np.atleast_1d(t))
        values = np.empty(index.shape, dtype=complex)

        for j in np.unique(index):
            mask = index == j
            basis = chebyshev.chebvander(2 * y[mask] - 1, j)
            series = np.einsum("nk,nk->n", basis, self.coefficients[j][panel[mask]])
            values[mask] = np.exp(-self._decay * y[mask]) * series

        return complex(values[0]) if t.ndim == 0 else values

    def _derivative(self, j: int, panel: int, y: float) -> complex:
        series = self.coefficients[j][panel]
        u = 2 * y - 1
        slope = 2 * chebyshev.chebval(u, chebyshev.chebder(series))
        rate = slope - self._decay * chebyshev.chebval(u, series)
        scale = self.panels / self.interval_length
        return complex(math.exp(-self._decay * y) * rate * scale)

    def derivative_jump(self, boundary: int) -> complex:
        """Returns the jump of the time derivative at
        ``t = boundary * T / 2``.

        Raises
        ------
        IndexError
            The boundary lies outside of the solved range.
        """
        if not 1 <= boundary < len(self.coefficients):
            raise IndexError(f"boundary {boundary} outside of the solved intervals")

        before = self._derivative(boundary - 1, self.panels - 1, 1.0)
        return self._derivative(boundary, 0, 0.0) - before

    def continuity_defect(self) -> float:
        """Returns the largest mismatch of the amplitude across panel
        and interval boundaries.
        """
        decay = math.exp(-self._decay)
        rows = [row for series in self.coefficients for row in series]
        defects = [
            abs(chebyshev.chebval(-1.0, b) - decay * chebyshev.chebval(1.0, a))
            for a, b in zip(rows, rows[1:])
        ]
        return max(defects, default=0.0)


def _panel_count(comb: DelayComb) -> int:
    return max(1, math.ceil(comb.instantaneous * comb.spacing / 2 / _PANEL_DECAY))


def solve_dde(
    comb: DelayComb, t_max: float, dt_out: float, *, alpha0: complex = 1.0
) -> DDESolution:
    """Solves a comb equation by the method of steps.

    Within each half spacing the history terms are known polynomials
    times the common exponential of their panel, so every panel
    integrates exactly: ``Q' = sum_d c_d Q_{j - d}`` with ``Q(0)``
    fixed by continuity. Panels are short enough that the exponential
    changes by at most ``e^2`` across one, which keeps the Chebyshev
    coefficients of ``Q`` on the scale of the amplitude itself. Before
    the first tooth the amplitude is ``alpha0 exp(-instantaneous t)``.

    .. versionadded:: 1.0

    Parameters
    ----------
    comb: :class:`DelayComb`
        The equation.
    t_max: :class:`float`
        The duration.
    dt_out: :class:`float`
        The sampling interval.
    alpha0: :class:`complex`
        The initial amplitude.
        Defaults to ``1``.

    Returns
    -------
    :class:`DDESolution`
        The solution with its interval coefficients.

    Raises
    ------
    ConfigurationError
        ``t_max`` or ``dt_out`` is not positive.
    DivergenceError
        The amplitude leaves the unit disk.
    """
    if not t_max > 0:
        raise ConfigurationError(f"invalid t_max {t_max} (must be > 0)", key="t_max")

    if not dt_out > 0:
        raise ConfigurationError(f"invalid dt_out {dt_out} (must be > 0)", key="dt_out")

    half = comb.spacing / 2
    panels = _panel_count(comb)
    decay = comb.instantaneous * half / panels
    ladder = math.exp(-decay)
    count = max(1, math.ceil(t_max / half))

    teeth = [0j] + [-comb.weight(d) * half / panels for d in range(1, count)]
    audit = np.linspace(0.0, 1.0, _AUDIT_POINTS)
    envelope = np.exp(-decay * audit)[:, np.newaxis]

    starts = complex(alpha0) * ladder ** np.arange(panels)
    series = [starts[:, np.newaxis]]

    for j in range(1, count):
        history = np.zeros((panels, j), dtype=complex)

        for d in range(1, j + 1):
            previous = series[j - d]
            history[:, : previous.shape[1]] += teeth[d] * previous

        # Integral from y = 0, with d/dy = 2 d/du on the Chebyshev variable.
        poly = chebyshev.chebint(history, lbnd=-1, scl=0.5, axis=1)
        ends = poly.sum(axis=1)
        start = ladder * series[j - 1][-1].sum()

        for p in range(panels):
            poly[p, 0] += start
            start = ladder * (ends[p] + start)

        series.append(poly)

        values = chebyshev.chebvander(2 * audit - 1, j) @ poly.T
        peak = float(np.max(np.abs(envelope * values)))

        if peak > _DIVERGENCE_LIMIT:
            raise DivergenceError(
                f"amplitude left the unit disk on interval {j} (t={j * half:g})",
                value=peak,
                tolerance=_DIVERGENCE_LIMIT,
            )

        _LOG.debug("Solved interval %d of %d (peak |alpha|=%.3e)", j, count - 1, peak)

    steps = int(math.floor(t_max / dt_out + 1e-9))
    times = np.arange(steps + 1) * dt_out

    solution = DDESolution(times, np.empty(0, dtype=complex), comb, series)
    solution.alpha_e = np.asarray(solution(times), dtype=complex)

    return solution


def solve_generalized_dde(
    spec: GeneralizedDDESpec, g: float, t_max: float, dt_out: float
) -> DDESolution:
    """Solves the delay equation of a general oscillating mode ladder.

    Both the half-integer teeth and the integer teeth are kept; with
    the Wannier-Stark parameters from
    :meth:`GeneralizedDDESpec.from_lattice` this is the band-centre
    comb of :func:`build_comb`.

    .. versionadded:: 1.0
    """
    return solve_dde(spec.to_comb(g), t_max, dt_out)
