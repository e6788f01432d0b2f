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


import inspect
from typing import Any, Dict, Mapping, Optional, Sequence, Tuple

import pytest

from starkemit.utils import *


def _as_signature(*args: Any, **kwargs: Any) -> Tuple[Tuple[Any, ...], Dict[str, Any]]:
    return args, kwargs


@pytest.mark.parametrize(
    ("value", "value_format_spec", "format_spec", "expected"),
    [
        # No pipe separator in format spec (assume -s plural form).
        (0.375, None, "period", "0.375 periods"),
        (0.375, ".2f", "period", "0.38 periods"),
        (1, None, "sample", "1 sample"),
        (801, None, "sample", "801 samples"),
        (-1, None, "site", "-1 site"),
        # Using pipe separator in format spec (assume specified plural form).
        (1, None, "axis|axes", "1 axis"),
        (3, None, "axis|axes", "3 axes"),
        (2, ".1f", "axis|axes", "2.0 axes"),
    ],
)
def test_plural(
    value: float, value_format_spec: Optional[str], format_spec: str, expected: str
) -> None:
    assert format(plural(value, value_format_spec), format_spec) == expected


@pytest.mark.parametrize("value", ["1", None, True, [1]])
def test_plural_failures(value: Any) -> None:
    with pytest.raises(TypeError):
        plural(value)


@pytest.mark.parametrize(
    ("value", "expected"),
    [
        (None, SKIP_MARK),
        (True, PASS_MARK),
        (False, FAIL_MARK),
        (1, PASS_MARK),
        (0, FAIL_MARK),
    ],
)
def test_bool_to_mark(value: Optional[Any], expected: str) -> None:
    assert bool_to_mark(value) == expected


@pytest.mark.parametrize(
    ("sequence", "joiner", "expected"),
    [
        # Default joiner
        ([], "and", ""),
        ([1], "and", "1"),
        ([1, 2], "and", "1 and 2"),
        ([1, 2, 3], "and", "1, 2, and 3"),
        # Passed joiner
        ([], "or", ""),
        (["run"], "or", "run"),
        (["run", "crossval"], "or", "run or crossval"),
        (["run", "crossval", "presets"], "or", "run, crossval, or presets"),
    ],
)
def test_human_join(sequence: Sequence[Any], joiner: str, expected: str) -> None:
    assert human_join(sequence, joiner=joiner) == expected


@pytest.mark.parametrize(
    ("args", "kwargs", "expected"),
    [
        (*_as_signature(1, 2, c=3), (1, 2, 3)),
        (*_as_signature(4, c=5), (4, None, 5)),
        (*_as_signature(a=6, b=7, c=8), (6, 7, 8)),
    ],
)
def test_measure_performance(
    args: Any, kwargs: Any, expected: Tuple[Any, Any, Any]
) -> None:
    def sync_test(a: Any, b: Optional[Any] = None, *, c: Any) -> Tuple[Any, Any, Any]:
        return a, b, c

    sync_wrap = measure_performance(sync_test)

    @measure_performance
    def sync_deco(a: Any, b: Optional[Any] = None, *, c: Any) -> Tuple[Any, Any, Any]:
        return a, b, c

    assert inspect.signature(sync_test) == inspect.signature(sync_wrap)
    assert inspect.signature(sync_test) == inspect.signature(sync_deco)

    call_results = [
        sync_deco(*args, **kwargs),
        sync_wrap(*args, **kwargs),
    ]

    for return_value, delta in call_results:
        assert return_value == expected
        assert isinstance(delta, float)
        assert delta >= 0


@pytest.mark.parametrize(
    ("parameters", "expected"),
    [
        ({"omega0": -1.5, "F": 0.001}, "omega0=-1.5_F=0.001"),
        ({"omega0": 0.0, "F": 0.5, "g": 0.01}, "omega0=0_F=0.5_g=0.01"),
        ({"g": 0.2}, "g=0.2"),
        ({}, ""),
    ],
)
def test_point_label(parameters: Mapping[str, Any], expected: str) -> None:
    assert point_label(parameters) == expected


@pytest.mark.parametrize(
    ("items", "keys_formatter", "expected"),
    [
        ({}, None, ""),
        ({"a": 1}, None, "a | 1"),
        ({"a": 1, "long": 2}, None, "a    | 1\nlong | 2"),
        (
            {"norm_drift": "PASS"},
            lambda s: s.replace("_", " ").title(),
            "Norm Drift | PASS",
        ),
    ],
)
def test_tchart(items: Mapping[Any, Any], keys_formatter: Any, expected: str) -> None:
    assert tchart(items, keys_formatter) == expected
