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
    "StarkemitError",
    "ConfigurationError",
    "DomainError",
    "BesselRangeError",
    "OutOfBandError",
    "RegimeError",
    "UnsupportedRegimeError",
    "DegenerateTrajectoryError",
    "VacuumFieldError",
    "FitError",
    "StepSizeError",
    "InvariantViolation",
    "HamiltonianError",
    "NormDriftError",
    "SizingError",
    "KernelIdentityError",
    "DivergenceError",
)
# fmt: on


from typing import Optional


class StarkemitError(Exception):
    """The base exception for every error raised by this library.

    .. versionadded:: 1.0
    """


class ConfigurationError(StarkemitError, ValueError):
    """Exception raised when a parameter record or an experiment
    configuration fails validation.

    This inherits from :exc:`StarkemitError` and :exc:`ValueError`.

    .. versionadded:: 1.0

    Attributes
    ----------
    key: Optional[:class:`str`]
        The offending configuration key, if known.
    """

    def __init__(self, message: str, *, key: Optional[str] = None) -> None:
        self.key: Optional[str] = key
        super().__init__(message)


class DomainError(StarkemitError, ValueError):
    """Exception raised when a function is evaluated outside of its
    mathematical domain.

    .. versionadded:: 1.0
    """


class BesselRangeError(DomainError):
    """Exception raised when a Bessel function is requested outside
    of the audited argument and order range.

    .. versionadded:: 1.0

    Attributes
    ----------
    order: :class:`int`
        The requested order.
    argument: :class:`float`
        The requested argument.
    """

    def __init__(self, order: int, argument: float, reason: str) -> None:
        self.order: int = order
        self.argument: float = argument
        super().__init__(f"invalid Bessel evaluation J_{order}({argument!r}) ({reason})")


class OutOfBandError(DomainError):
    """Exception raised when a frequency lies outside of the photonic
    band, so that no propagating resonance exists.

    .. versionadded:: 1.0
    """


class RegimeError(StarkemitError, ValueError):
    """Exception raised when a quantity requiring a Bloch period is
    requested for a lattice without force.

    .. versionadded:: 1.0
    """


class UnsupportedRegimeError(RegimeError):
    """Exception raised when an operation is asked to work outside of
    the parameter regime for which it is derived.

    .. versionadded:: 1.0
    """


class DegenerateTrajectoryError(StarkemitError, ValueError):
    """Exception raised when a semiclassical trajectory has no
    non-trivial return to its starting point.

    .. versionadded:: 1.0

    Attributes
    ----------
    momentum: :class:`float`
        The degenerate initial quasi-momentum.
    """

    def __init__(self, momentum: float) -> None:
        self.momentum: float = momentum
        super().__init__(
            f"degenerate trajectory at k={momentum!r} (band-bottom packet returns "
            "at t_i; the first non-trivial return is one Bloch period later)"
        )


class VacuumFieldError(StarkemitError, ValueError):
    """Exception raised when a field observable is requested for a
    state with no photon population.

    .. versionadded:: 1.0
    """


class FitError(StarkemitError, ValueError):
    """Exception raised when a fit cannot be performed on the
    supplied series.

    .. versionadded:: 1.0
    """


class StepSizeError(StarkemitError, ValueError):
    """Exception raised when the Chebyshev expansion for a requested
    time step would exceed the configured order cap.

    .. versionadded:: 1.0

    Attributes
    ----------
    order: :class:`int`
        The order that the step would require.
    max_order: :class:`int`
        The configured order cap.
    """

    def __init__(self, order: int, max_order: int, dt: float) -> None:
        self.order: int = order
        self.max_order: int = max_order
        super().__init__(
            f"invalid step dt={dt!r} (needs Chebyshev order {order} > {max_order}); "
            "reduce dt_out or lower the number of sites"
        )


class InvariantViolation(StarkemitError):
    """Exception raised when a physical or numerical invariant is
    violated during a computation.

    .. versionadded:: 1.0

    Attributes
    ----------
    value: :class:`float`
        The measured quantity that broke the invariant.
    tolerance: :class:`float`
        The tolerance that was exceeded.
    """

    def __init__(self, message: str, *, value: float, tolerance: float) -> None:
        self.value: float = value
        self.tolerance: float = tolerance
        super().__init__(f"{message} ({value:.3e} exceeds {tolerance:.1e})")


class HamiltonianError(InvariantViolation):
    """Exception raised when an assembled Hamiltonian is not Hermitian.

    .. versionadded:: 1.0
    """


class NormDriftError(InvariantViolation):
    """Exception raised when the single-excitation norm drifts during
    time evolution.

    .. versionadded:: 1.0
    """


class SizingError(InvariantViolation):
    """Exception raised when field amplitude reaches the truncation
    edges of the lattice.

    .. versionadded:: 1.0
    """


class KernelIdentityError(InvariantViolation):
    """Exception raised when the series and closed forms of the memory
    kernel disagree.

    .. versionadded:: 1.0
    """


class DivergenceError(InvariantViolation):
    """Exception raised when a delay-differential solution leaves the
    unit disk.

    .. versionadded:: 1.0
    """
