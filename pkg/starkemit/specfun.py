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
    "BESSEL_MAX_ARGUMENT",
    "BESSEL_ORDER_MARGIN",
    "BesselEval",
    "bessel_asymptotic_sin",
    "bessel_eval",
    "bessel_j",
    "bessel_j_many",
    "bessel_row",
)
# fmt: on


import math
from functools import lru_cache
from typing import NamedTuple

import numpy as np

from .errors import BesselRangeError, DomainError

# fmt: off
BESSEL_MAX_ARGUMENT: float = 1e5
BESSEL_ORDER_MARGIN: int   = 200

_SERIES_CUTOFF:  float = 1.0
_SERIES_TERMS:   int   = 30
_RESCALE_LIMIT:  float = 1e140
_MILLER_SEED:    float = 1e-30
# fmt: on


class BesselEval(NamedTuple):
    order: int
    argument: float
    value: float


def _check_range(order: int, argument: float) -> None:
    if not math.isfinite(argument):
        raise BesselRangeError(order, argument, "argument must be finite")

    if abs(argument) > BESSEL_MAX_ARGUMENT:
        raise BesselRangeError(
            order, argument, f"|argument| must be <= {BESSEL_MAX_ARGUMENT:g}"
        )

    if abs(order) > abs(argument) + BESSEL_ORDER_MARGIN:
        raise BesselRangeError(
            order, argument, f"|order| must be <= |argument| + {BESSEL_ORDER_MARGIN}"
        )


def _start_order(x_max: float, n_max: int) -> int:
    # Far enough past the turning point that the seed error squared
    # is below double precision for every order <= n_max.
    top = int(max(x_max, n_max) + 60 + 10 * x_max ** (1 / 3))
    return top + (top % 2)


def _series_block(x: np.ndarray, n_max: int) -> np.ndarray:
    out = np.empty((x.size, n_max + 1))
    half = 0.5 * x
    step = -(half**2)
    lead = np.ones_like(x)

    for n in range(n_max + 1):
        if n > 0:
            lead = lead * half / n

        term = lead.copy()
        total = lead.copy()

        for k in range(1, _SERIES_TERMS):
            term = term * step / (k * (k + n))
            total += term

            if not np.any(np.abs(term) > 1e-18 * np.abs(total)):
                break

        out[:, n] = total

    return out


def _miller_block(x: np.ndarray, n_max: int) -> np.ndarray:
    top = _start_order(float(x.max()), n_max)

    out = np.zeros((x.size, n_max + 1))
    f_hi = np.zeros_like(x)
    f = np.full_like(x, _MILLER_SEED)
    sum_sq = np.zeros_like(x)
    sum_even = np.zeros_like(x)

    for n in range(top, 0, -1):
        if n <= n_max:
            out[:, n] = f

        sum_sq += 2 * f * f

        if n % 2 == 0:
            sum_even += 2 * f

        f_hi, f = f, (2 * n / x) * f - f_hi

        big = np.abs(f) > _RESCALE_LIMIT
        if big.any():
            scale = np.where(big, 1 / _RESCALE_LIMIT, 1.0)
            f *= scale
            f_hi *= scale
            sum_sq *= scale * scale
            sum_even *= scale

            if n <= n_max:
                out[:, n:] *= scale[:, None]

    out[:, 0] = f
    sum_sq += f * f
    sum_even += f

    # The squared-sum rule fixes the magnitude, the linear sum rule
    # J_0 + 2*sum(J_2k) = 1 fixes the sign.
    norm = np.sign(sum_even) / np.sqrt(sum_sq)
    return out * norm[:, None]


def _orders_block(x: np.ndarray, n_max: int) -> np.ndarray:
    # Rows of J_0..J_n_max for non-negative arguments.
    out = np.zeros((x.size, n_max + 1))

    zero = x == 0
    small = ~zero & (x <= _SERIES_CUTOFF)
    large = x > _SERIES_CUTOFF

    out[zero, 0] = 1.0

    if small.any():
        out[small] = _series_block(x[small], n_max)

    if large.any():
        out[large] = _miller_block(x[large], n_max)

    return out


@lru_cache(maxsize=128)
def _cached_orders(x: float, n_max: int) -> np.ndarray:
    row = _orders_block(np.array([x]), n_max)[0]
    row.flags.writeable = False
    return row


def _parity_sign(orders: np.ndarray, negative_argument: bool) -> np.ndarray:
    flips = (orders < 0).astype(int) + int(negative_argument)
    odd = (np.abs(orders) % 2 == 1) & (flips % 2 == 1)
    return np.where(odd, -1.0, 1.0)


def bessel_j(order: int, argument: float) -> float:
    """Evaluates the Bessel function of the first kind of integer
    order.

    Small arguments (``|x| <= 1``) are summed from the power series.
    Larger arguments use a downward (Miller) recurrence normalised
    by the squared-sum rule. Negative orders and arguments are
    reduced internally through :math:`J_{-n}(x) = (-1)^n J_n(x)` and
    :math:`J_n(-x) = (-1)^n J_n(x)`.

    .. versionadded:: 1.0

    Parameters
    ----------
    order: :class:`int`
        The order ``n``. May be negative.
    argument: :class:`float`
        The argument ``x``.

    Returns
    -------
    :class:`float`
        The value of :math:`J_n(x)`.

    Raises
    ------
    BesselRangeError
        ``|argument|`` exceeds ``1e5`` or ``|order|`` exceeds
        ``|argument| + 200``.
    """
    order = int(order)
    argument = float(argument)
    _check_range(order, argument)

    n = abs(order)
    value = _cached_orders(abs(argument), n)[n]

    return float(value * _parity_sign(np.array([order]), argument < 0)[0])


def bessel_eval(order: int, argument: float) -> BesselEval:
    """Same as :func:`bessel_j`, but returns the evaluation record.

    .. versionadded:: 1.0
    """
    return BesselEval(int(order), float(argument), bessel_j(order, argument))


def bessel_row(center: int, xi: float, m_lo: int, m_hi: int) -> np.ndarray:
    """Evaluates :math:`J_{m - c}(\\xi)` for every site ``m`` in
    ``[m_lo, m_hi]``.

    This is the site wavefunction of the Wannier-Stark mode centred
    on ``center``.

    .. versionadded:: 1.0

    Parameters
    ----------
    center: :class:`int`
        The mode centre ``c``.
    xi: :class:`float`
        The localization length.
    m_lo: :class:`int`
        The first site (inclusive).
    m_hi: :class:`int`
        The last site (inclusive).

    Returns
    -------
    :class:`numpy.ndarray`
        A fresh array of length ``m_hi - m_lo + 1``.

    Raises
    ------
    ValueError
        ``m_lo > m_hi``.
    BesselRangeError
        Any order in the row is out of range.
    """
    if m_lo > m_hi:
        raise ValueError(f"invalid site window [{m_lo}, {m_hi}] (must have m_lo <= m_hi)")

    xi = float(xi)
    orders = np.arange(m_lo, m_hi + 1) - int(center)
    extreme = int(orders[np.argmax(np.abs(orders))])
    _check_range(extreme, xi)

    table = _cached_orders(abs(xi), abs(extreme))
    return table[np.abs(orders)] * _parity_sign(orders, xi < 0)


def bessel_j_many(order: int, arguments: np.ndarray) -> np.ndarray:
    """Evaluates :math:`J_n(x)` for a fixed order over an array of
    arguments.

    .. versionadded:: 1.0

    Parameters
    ----------
    order: :class:`int`
        The order ``n``.
    arguments: :class:`numpy.ndarray`
        The arguments. Any shape.

    Returns
    -------
    :class:`numpy.ndarray`
        Values with the same shape as ``arguments``.
    """
    order = int(order)
    x = np.asarray(arguments, dtype=float)

    if x.size == 0:
        return np.zeros_like(x)

    flat = x.ravel()
    _check_range(order, float(flat[np.argmax(np.abs(flat))]))

    n = abs(order)
    values = _orders_block(np.abs(flat), n)[:, n]

    if order < 0 and n % 2 == 1:
        values = -values

    if n % 2 == 1:
        values = np.where(flat < 0, -values, values)

    return values.reshape(x.shape)


def bessel_asymptotic_sin(n: int, xi: float) -> float:
    """Evaluates the large-argument sinusoidal approximation of
    :math:`J_n(\\xi)`.

    The approximation reads
    :math:`\\sqrt{2/(\\pi\\xi)}\\sin(\\xi - n\\pi/2 + \\pi/4)` where
    ``n`` is the site offset from the mode centre. It is only
    meaningful for ``|n|`` well below ``sqrt(xi)``.

    .. versionadded:: 1.0

    Raises
    ------
    DomainError
        ``xi`` is not positive.
    """
    xi = float(xi)

    if not xi > 0:
        raise DomainError(f"invalid xi {xi} (must be > 0)")

    phase = xi - (int(n) % 4) * (math.pi / 2) + math.pi / 4
    return math.sqrt(2 / (math.pi * xi)) * math.sin(phase)
