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


import math
from decimal import Decimal, localcontext
from typing import List

import numpy as np
import pytest
from scipy.special import jv

from starkemit.errors import BesselRangeError, DomainError
from starkemit.specfun import *


def _decimal_bessel(order: int, argument: float) -> float:
    # High-precision power series, only used for moderate arguments.
    sign = -1 if order < 0 and order % 2 else 1
    n = abs(order)

    with localcontext() as ctx:
        ctx.prec = 80
        half = Decimal(argument) / 2
        term = half**n / math.factorial(n)
        total = term
        k = 0

        while abs(term) > Decimal(10) ** -60 or k < 10:
            k += 1
            term = -term * half * half / (k * (k + n))
            total += term

        return sign * float(total)


@pytest.mark.parametrize(
    ("order", "argument"),
    [
        # Power series branch.
        (0, 0.25),
        (1, 0.5),
        (3, 1.0),
        (-2, 0.75),
        # Miller recurrence branch.
        (0, 1.5),
        (0, 2.5),
        (1, 4.0),
        (5, 7.3),
        (-4, 12.0),
        (10, 15.0),
        (25, 15.0),
        (2, 20.0),
    ],
)
def test_bessel_j_matches_power_series(order: int, argument: float) -> None:
    assert bessel_j(order, argument) == pytest.approx(
        _decimal_bessel(order, argument), abs=1e-13
    )


@pytest.mark.parametrize(
    ("order", "argument"),
    [
        (0, 100.0),
        (50, 100.0),
        (150, 100.0),
        (1, 1000.0),
        (999, 1000.0),
        (1100, 1000.0),
        (0, 4000.0),
        (7, 4000.0),
        (-3, -250.5),
    ],
)
def test_bessel_j_matches_scipy(order: int, argument: float) -> None:
    assert bessel_j(order, argument) == pytest.approx(jv(order, argument), abs=1e-12)


@pytest.mark.parametrize("order", [0, 1, 2, 3, 7])
def test_bessel_j_at_zero(order: int) -> None:
    assert bessel_j(order, 0.0) == (1.0 if order == 0 else 0.0)


@pytest.mark.parametrize(
    ("order", "argument"),
    [
        (1, 0.5),
        (2, 3.0),
        (3, 17.25),
        (6, 150.0),
        (11, 2000.0),
    ],
)
def test_bessel_j_parity(order: int, argument: float) -> None:
    value = bessel_j(order, argument)
    sign = (-1) ** order

    assert bessel_j(-order, argument) == sign * value
    assert bessel_j(order, -argument) == sign * value
    assert bessel_j(-order, -argument) == value


@pytest.mark.parametrize(
    ("order", "argument"),
    [
        (1, 2.0),
        (4, 9.5),
        (30, 40.0),
        (100, 500.0),
        (5, 2000.0),
    ],
)
def test_bessel_j_recurrence(order: int, argument: float) -> None:
    left = bessel_j(order - 1, argument) + bessel_j(order + 1, argument)
    right = 2 * order / argument * bessel_j(order, argument)

    assert left == pytest.approx(right, abs=1e-12)


@pytest.mark.parametrize("xi", [1.0, 4.0, 15.0, 200.0, 2000.0])
def test_bessel_row_normalization(xi: float) -> None:
    reach = int(xi) + 200
    row = bessel_row(0, xi, -reach, reach)

    assert float(np.sum(row**2)) == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("xi", [4.0, 15.0, 1000.0])
def test_bessel_row_centroid(xi: float) -> None:
    reach = int(xi) + 200
    sites = np.arange(-reach, reach + 1) + 3
    row = bessel_row(3, xi, -reach + 3, reach + 3)

    assert float(np.sum(sites * row**2)) == pytest.approx(3.0, abs=1e-8)


@pytest.mark.parametrize(
    ("center", "xi", "m_lo", "m_hi"),
    [
        (0, 4.0, -10, 10),
        (5, 4.0, 0, 10),
        (-2, 0.5, -4, 0),
        (0, -7.5, -3, 3),
        (100, 40.0, 90, 90),
    ],
)
def test_bessel_row_matches_bessel_j(
    center: int, xi: float, m_lo: int, m_hi: int
) -> None:
    row = bessel_row(center, xi, m_lo, m_hi)
    expected: List[float] = [bessel_j(m - center, xi) for m in range(m_lo, m_hi + 1)]

    assert row.shape == (m_hi - m_lo + 1,)
    np.testing.assert_array_equal(row, expected)


def test_bessel_row_is_writable_copy() -> None:
    row = bessel_row(0, 4.0, -3, 3)
    row[0] = 42.0

    assert bessel_row(0, 4.0, -3, 3)[0] == bessel_j(-3, 4.0)


@pytest.mark.parametrize("order", [0, 1, -3, 6])
def test_bessel_j_many_matches_bessel_j(order: int) -> None:
    arguments = np.array([[0.0, 0.3, -0.9, 1.0], [1.7, -12.5, 80.0, 2999.0]])
    values = bessel_j_many(order, arguments)
    expected = np.vectorize(lambda x: bessel_j(order, x))(arguments)

    assert values.shape == arguments.shape
    np.testing.assert_allclose(values, expected, rtol=0, atol=1e-14)


def test_bessel_j_many_empty() -> None:
    assert bessel_j_many(0, np.array([])).size == 0


def test_bessel_eval() -> None:
    record = bessel_eval(2, 3.0)

    assert record.order == 2
    assert record.argument == 3.0
    assert record.value == bessel_j(2, 3.0)


@pytest.mark.parametrize("xi", [400.0, 2000.0, 12000.0])
def test_bessel_asymptotic_sin(xi: float) -> None:
    envelope = math.sqrt(2 / (math.pi * xi))
    reach = int(math.sqrt(xi) / 4)

    for n in range(-reach, reach + 1):
        error = abs(bessel_j(n, xi) - bessel_asymptotic_sin(n, xi))
        assert error <= 0.05 * envelope


@pytest.mark.parametrize(
    ("order", "argument"),
    [
        # Argument too large.
        (0, 2e5),
        (0, -1.5e5),
        # Order too far past the argument.
        (500, 10.0),
        (-211, 10.0),
        # Not finite.
        (0, math.inf),
        (0, math.nan),
    ],
)
def test_bessel_j_failures(order: int, argument: float) -> None:
    with pytest.raises(BesselRangeError):
        bessel_j(order, argument)


def test_bessel_range_error_is_value_error() -> None:
    with pytest.raises(ValueError):
        bessel_j(0, 1e6)


def test_bessel_row_failures() -> None:
    with pytest.raises(ValueError):
        bessel_row(0, 4.0, 5, 2)

    with pytest.raises(BesselRangeError):
        bessel_row(0, 4.0, -300, 0)


@pytest.mark.parametrize("xi", [0.0, -3.0])
def test_bessel_asymptotic_sin_failures(xi: float) -> None:
    with pytest.raises(DomainError):
        bessel_asymptotic_sin(0, xi)
