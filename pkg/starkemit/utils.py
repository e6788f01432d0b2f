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
    "FAIL_MARK",
    "PASS_MARK",
    "SKIP_MARK",
    "bool_to_mark",
    "human_join",
    "measure_performance",
    "plural",
    "point_label",
    "tchart",
)
# fmt: on


import time
from functools import wraps
from typing import TYPE_CHECKING, Any, Callable, Mapping, Optional, Sequence, Tuple

if TYPE_CHECKING:
    from typing import TypeVar

    from typing_extensions import ParamSpec

    _T = TypeVar("_T")
    _Params = ParamSpec("_Params")


# fmt: off
PASS_MARK: str = "PASS"
FAIL_MARK: str = "FAIL"
SKIP_MARK: str = "SKIP"
# fmt: on


class plural:
    """Formats a count together with its unit, pluralising the unit
    unless the count has magnitude one.

    The format spec is the unit, optionally followed by ``|`` and an
    irregular plural form.

    .. versionadded:: 1.0

    Parameters
    ----------
    value: :class:`float`
        The count.
    value_format_spec: Optional[:class:`str`]
        The format spec applied to the count.

    Examples
    --------
    .. code-block:: python3

        >>> f"{plural(801):sample}"
        "801 samples"

        >>> f"{plural(0.375, '.2f'):Bloch period}"
        "0.38 Bloch periods"

        >>> f"{plural(3):axis|axes}"
        "3 axes"
    """

    __slots__: Tuple[str, ...] = ("__count", "__count_spec")

    def __init__(self, value: float, /, value_format_spec: Optional[str] = None) -> None:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise TypeError(
                f"Expected value to be int or float, not {type(value).__name__}."
            )

        self.__count: float = value
        self.__count_spec: str = value_format_spec or ""

    def __format__(self, spec: str) -> str:
        unit, _, irregular = spec.partition("|")

        if abs(self.__count) != 1:
            unit = irregular or f"{unit}s"

        return f"{format(self.__count, self.__count_spec)} {unit}"


def bool_to_mark(value: Optional[Any]) -> str:
    """Returns :data:`PASS_MARK`, :data:`FAIL_MARK` or, for ``None``,
    :data:`SKIP_MARK`.

    .. versionadded:: 1.0
    """
    if value is None:
        return SKIP_MARK

    return PASS_MARK if value else FAIL_MARK


def human_join(sequence: Sequence[Any], /, *, joiner: str = "and") -> str:
    """Joins items into an English list with an Oxford comma, e.g.
    ``"run, crossval, or presets"``.

    .. versionadded:: 1.0
    """
    items = [str(item) for item in sequence]

    if len(items) < 3:
        return f" {joiner} ".join(items)

    return f"{', '.join(items[:-1])}, {joiner} {items[-1]}"


def measure_performance(
    func: Callable[_Params, _T]
) -> Callable[_Params, Tuple[_T, float]]:
    """Wraps a function so that it returns ``(result, milliseconds)``.

    Used to time propagations and experiment points for the log.

    .. versionadded:: 1.0
    """

    @wraps(func)
    def timed(*args: _Params.args, **kwargs: _Params.kwargs) -> Tuple[_T, float]:
        began = time.perf_counter()
        result = func(*args, **kwargs)
        return result, 1000 * (time.perf_counter() - began)

    return timed


def point_label(parameters: Mapping[str, Any], /) -> str:
    """Renders a parameter point as a directory-safe label.

    .. versionadded:: 1.0

    Examples
    --------
    .. code-block:: python3

        >>> point_label({"omega0": -1.5, "F": 0.001})
        "omega0=-1.5_F=0.001"
    """
    return "_".join(f"{key}={value:g}" for key, value in parameters.items())


def tchart(
    items: Mapping[Any, Any], /, keys_formatter: Optional[Callable[[Any], str]] = None
) -> str:
    """Lays out a mapping as a two-column ``key | value`` chart, keys
    left-aligned to the widest one.

    Self-check outcomes and cross-validation reports are printed this
    way.

    .. versionadded:: 1.0

    Parameters
    ----------
    items: :class:`Mapping`
        The rows of the chart.
    keys_formatter: Optional[Callable[[Any], :class:`str`]]
        Renders the keys. Defaults to :class:`str`.
    """
    render = keys_formatter or str
    keys = [render(key) for key in items]
    width = max(map(len, keys), default=0)

    return "\n".join(
        f"{key:<{width}} | {value}" for key, value in zip(keys, items.values())
    )
