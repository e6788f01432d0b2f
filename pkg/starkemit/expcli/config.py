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
    "CONFIG_KEYS",
    "EXPERIMENTS",
    "ExperimentConfig",
    "ExperimentPoint",
    "load_config",
    "resolve_preset",
)
# fmt: on


import itertools
import logging
import re
from pathlib import Path
from typing import Any, Dict, List, Mapping, NamedTuple, Optional, Tuple, Union

import yaml

from ..errors import ConfigurationError
from ..lattice import LatticeSpec, QubitSpec, auto_size
from ..propagator import METHODS, default_dt_out, default_t_max
from ..utils import human_join, plural, point_label
from .presets import PRESETS

# fmt: off
CONFIG_KEYS: Tuple[str, ...] = (
    "experiment", "F", "g", "omega0", "n0", "N",
    "auto_size", "t_max", "dt_out", "method", "out_dir",
)

EXPERIMENTS: Tuple[str, ...] = ("rabi", "weakforce", "edgechiral", "markov")

_REQUIRED: Tuple[str, ...] = ("experiment", "F", "g", "omega0")
_SWEEPABLE: Tuple[str, ...] = ("omega0", "F", "g")
# fmt: on

_ASSIGNMENT: re.Pattern[str] = re.compile(r"([A-Za-z_]\w*)\s*=(.*)")


_LOG: logging.Logger = logging.getLogger(__name__)


class ExperimentPoint(NamedTuple):
    """One fully resolved parameter point of an experiment.

    .. versionadded:: 1.0
    """

    label: str
    lattice: LatticeSpec
    qubit: QubitSpec
    t_max: float
    dt_out: float
    method: str

    def resolved(self) -> Dict[str, Any]:
        """Returns the post-default configuration of this point."""
        return {
            "F": self.lattice.F,
            "g": self.qubit.g,
            "omega0": self.qubit.omega0,
            "n0": self.lattice.n0,
            "N": self.lattice.N,
            "t_max": self.t_max,
            "dt_out": self.dt_out,
            "method": self.method,
        }


def _number(key: str, value: Any) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigurationError(
            f"Expected {key} to be int or float, not {type(value).__name__}.", key=key
        )

    return float(value)


def _sweep(key: str, value: Any) -> Tuple[float, ...]:
    if isinstance(value, list):
        if not value:
            raise ConfigurationError(f"invalid {key} [] (must not be empty)", key=key)

        return tuple(_number(key, v) for v in value)

    return (_number(key, value),)


def _optional_positive(key: str, value: Any) -> Optional[float]:
    if value is None:
        return None

    value = _number(key, value)

    if not value > 0:
        raise ConfigurationError(f"invalid {key} {value} (must be > 0)", key=key)

    return value


class ExperimentConfig:
    """A validated experiment configuration.

    Any of ``F``, ``g`` and ``omega0`` may be swept; the configuration
    then stands for the Cartesian product of the given values.

    .. versionadded:: 1.0

    Raises
    ------
    ConfigurationError
        A key is unknown, missing or holds an invalid value, or a
        parameter point fails lattice or qubit validation.
    """

    __slots__: Tuple[str, ...] = (
        "experiment",
        "F",
        "g",
        "omega0",
        "n0",
        "N",
        "auto_size",
        "t_max",
        "dt_out",
        "method",
        "out_dir",
        "_points",
    )

    def __init__(self, data: Mapping[str, Any]) -> None:
        if not isinstance(data, Mapping):
            raise ConfigurationError(
                f"Expected a mapping of settings, not {type(data).__name__}."
            )

        unknown = sorted(set(data) - set(CONFIG_KEYS))

        if unknown:
            raise ConfigurationError(f"unknown key {unknown[0]!r}", key=unknown[0])

        for key in _REQUIRED:
            if key not in data:
                raise ConfigurationError(f"missing required key {key!r}", key=key)

        experiment = data["experiment"]

        if experiment not in EXPERIMENTS:
            raise ConfigurationError(
                f"unknown experiment {experiment!r} "
                f"(must be one of {human_join(EXPERIMENTS, joiner='or')})",
                key="experiment",
            )

        self.experiment: str = experiment
        self.F: Tuple[float, ...] = _sweep("F", data["F"])
        self.g: Tuple[float, ...] = _sweep("g", data["g"])
        self.omega0: Tuple[float, ...] = _sweep("omega0", data["omega0"])

        n0 = data.get("n0", 0)

        if isinstance(n0, bool) or not isinstance(n0, int):
            raise ConfigurationError(
                f"Expected n0 to be int, not {type(n0).__name__}.", key="n0"
            )

        self.n0: int = n0

        auto = data.get("auto_size", True)

        if not isinstance(auto, bool):
            raise ConfigurationError(
                f"Expected auto_size to be bool, not {type(auto).__name__}.",
                key="auto_size",
            )

        self.auto_size: bool = auto

        N = data.get("N")

        if N is None and not auto:
            raise ConfigurationError("N is required when auto_size is false", key="N")

        if N is not None and (isinstance(N, bool) or not isinstance(N, int)):
            raise ConfigurationError(
                f"Expected N to be int, not {type(N).__name__}.", key="N"
            )

        self.N: Optional[int] = N
        self.t_max: Optional[float] = _optional_positive("t_max", data.get("t_max"))
        self.dt_out: Optional[float] = _optional_positive("dt_out", data.get("dt_out"))

        method = data.get("method", "chebyshev")

        if method not in METHODS:
            raise ConfigurationError(
                f"invalid method {method!r} (must be one of {', '.join(METHODS)})",
                key="method",
            )

        self.method: str = method

        out_dir = data.get("out_dir", "output")

        if not isinstance(out_dir, str) or not out_dir:
            raise ConfigurationError(
                "invalid out_dir (must be a non-empty string)", key="out_dir"
            )

        self.out_dir: str = out_dir

        # Resolving every point up front validates the whole sweep
        # before anything is computed.
        self._points: List[ExperimentPoint] = [
            self._resolve(**dict(zip(_SWEEPABLE, values)))
            for values in itertools.product(self.omega0, self.F, self.g)
        ]

    def __repr__(self) -> str:
        return (
            f"<ExperimentConfig experiment={self.experiment!r} "
            f"points={len(self._points)}>"
        )

    @property
    def points(self) -> List[ExperimentPoint]:
        """List[:class:`ExperimentPoint`]: Every parameter point, in
        sweep order.
        """
        return list(self._points)

    @property
    def swept(self) -> Tuple[str, ...]:
        """Tuple[:class:`str`, ...]: The keys holding more than one value."""
        return tuple(key for key in _SWEEPABLE if len(getattr(self, key)) > 1)

    def _resolve(self, *, omega0: float, F: float, g: float) -> ExperimentPoint:
        qubit = QubitSpec(omega0=omega0, g=g)

        # Regime defaults depend on the scales only, not on the size.
        sizing = LatticeSpec(N=2 * abs(self.n0) + 3, F=F, n0=self.n0)
        t_max = self.t_max if self.t_max is not None else default_t_max(sizing, qubit)
        dt_out = self.dt_out if self.dt_out is not None else default_dt_out(sizing, qubit)

        if self.auto_size:
            N = auto_size(F, t_max) + 2 * abs(self.n0)
            _LOG.debug("Auto-sized lattice to N=%d for F=%g, t_max=%g", N, F, t_max)
        else:
            N = self.N

        lattice = LatticeSpec(N=N, F=F, n0=self.n0)
        label = point_label(dict(zip(_SWEEPABLE, (omega0, F, g))))

        return ExperimentPoint(label, lattice, qubit, t_max, dt_out, self.method)

    def to_dict(self) -> Dict[str, Any]:
        """Returns the configuration as written, with defaults filled in."""

        def _unsweep(values: Tuple[float, ...]) -> Union[float, List[float]]:
            return values[0] if len(values) == 1 else list(values)

        return {
            "experiment": self.experiment,
            "F": _unsweep(self.F),
            "g": _unsweep(self.g),
            "omega0": _unsweep(self.omega0),
            "n0": self.n0,
            "N": self.N,
            "auto_size": self.auto_size,
            "t_max": self.t_max,
            "dt_out": self.dt_out,
            "method": self.method,
            "out_dir": self.out_dir,
        }


def resolve_preset(name: str) -> Path:
    """Returns the path of a bundled preset.

    .. versionadded:: 1.0

    Raises
    ------
    ConfigurationError
        No preset of that name ships with the package.
    """
    path = PRESETS.joinpath(f"{name}.yaml").resolve()

    if not path.is_file() or PRESETS.resolve() not in path.parents:
        raise ConfigurationError(f"unknown preset {name!r}")

    return path


def _parse_assignments(text: str, path: Path) -> Optional[Dict[str, Any]]:
    # key = value lines with # comments; None if the text is not in that form.
    data: Dict[str, Any] = {}

    for number, line in enumerate(text.splitlines(), 1):
        line = line.strip()

        if not line or line.startswith("#"):
            continue

        match = _ASSIGNMENT.fullmatch(line)

        if match is None:
            return None

        key, raw = match.groups()

        if key in data:
            raise ConfigurationError(
                f"duplicate key {key!r} on line {number} of {path}", key=key
            )

        try:
            data[key] = yaml.safe_load(raw)
        except yaml.YAMLError as exc:
            raise ConfigurationError(
                f"invalid value for {key!r} on line {number} of {path}: {exc}", key=key
            ) from None

    return data or None


def load_config(
    source: Union[str, Path], *, out_dir: Optional[str] = None
) -> ExperimentConfig:
    """Loads an experiment configuration from a file or a preset name.

    Files hold either ``key = value`` lines with ``#`` comments or a
    YAML mapping. Values are parsed as YAML in both forms, so
    ``g = [0.1, 0.2]`` sweeps ``g``.

    .. versionadded:: 1.0

    Parameters
    ----------
    source: Union[:class:`str`, :class:`pathlib.Path`]
        A file path, or the name of a bundled preset.
    out_dir: Optional[:class:`str`]
        Overrides the output directory of the file.

    Raises
    ------
    ConfigurationError
        The file does not parse or fails validation.
    OSError
        The file cannot be read.
    """
    path = Path(source)

    if not path.is_file() and path.suffix == "" and len(path.parts) == 1:
        path = resolve_preset(str(source))

    with path.open(encoding="utf-8") as f:
        text = f.read()

    data: Any = _parse_assignments(text, path)

    if data is None:
        try:
            data = yaml.safe_load(text)
        except yaml.YAMLError as exc:
            raise ConfigurationError(f"invalid YAML in {path}: {exc}") from None

    if isinstance(data, dict) and out_dir is not None:
        data["out_dir"] = out_dir

    config = ExperimentConfig(data)
    _LOG.info(
        "Loaded %s experiment with %s from %s",
        config.experiment,
        format(plural(len(config.points)), "point"),
        path,
    )

    return config
