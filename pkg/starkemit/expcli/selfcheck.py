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
    "CHECKS",
    "selfcheck",
)
# fmt: on


import logging
import math
from functools import lru_cache
from typing import Callable, Dict, Optional, Tuple

import numpy as np

from ..errors import StarkemitError
from ..kernel_dde import (
    GeneralizedDDESpec,
    KernelSpec,
    build_comb,
    kernel_exact,
    solve_dde,
    solve_generalized_dde,
)
from ..lattice import LatticeSpec, QubitSpec, build_hamiltonian, wannier_stark_mode
from ..propagator import propagate
from ..specfun import bessel_j, bessel_row
from ..utils import bool_to_mark, tchart

_LOG: logging.Logger = logging.getLogger(__name__)


def _bessel_parity() -> bool:
    return all(
        bessel_j(-n, x) == (-1) ** n * bessel_j(n, x)
        and bessel_j(n, -x) == bessel_j(-n, x)
        for n in range(6)
        for x in (0.5, 2.5, 40.0)
    )


def _bessel_normalization() -> bool:
    row = bessel_row(0, 15.0, -215, 215)
    return abs(float(np.sum(row**2)) - 1) <= 1e-12


def _kernel_identity() -> bool:
    spec = KernelSpec.from_lattice(LatticeSpec(N=3, F=0.5), QubitSpec(omega0=0.0, g=0.1))
    kernel_exact(spec, np.linspace(0.0, 2 * spec.t_bloch, 101))
    return True


def _hermiticity() -> bool:
    lat = LatticeSpec(N=101, F=0.1, n0=3)
    return build_hamiltonian(lat, QubitSpec(omega0=0.2, g=0.1)).hermiticity_defect() == 0


def _mode_centroid() -> bool:
    lat = LatticeSpec(N=201, F=0.5)
    return abs(wannier_stark_mode(lat, 7).centroid() - 7) <= 1e-8


@lru_cache(maxsize=None)
def _short_runs() -> Tuple[float, float]:
    lat, qb = LatticeSpec(N=101, F=0.5), QubitSpec(omega0=0.0, g=0.1)
    chebyshev = propagate(lat, qb, 20.0, 0.5, "chebyshev")
    eigen = propagate(lat, qb, 20.0, 0.5, "eigen")
    difference = np.max(np.abs(chebyshev.amplitudes - eigen.amplitudes))
    return chebyshev.norm_drift(), float(difference)


def _norm_drift() -> bool:
    return _short_runs()[0] <= 1e-10


def _backend_agreement() -> bool:
    return _short_runs()[1] <= 1e-8


def _dde_reduction() -> bool:
    lat, qb = LatticeSpec(N=3, F=0.5), QubitSpec(omega0=0.0, g=0.2)
    t_max = 4 * 2 * math.pi / lat.F

    direct = solve_dde(build_comb(lat, qb), t_max, 0.5)
    spec = GeneralizedDDESpec.from_lattice(lat)
    reduced = solve_generalized_dde(spec, qb.g, t_max, 0.5)

    return all(
        np.allclose(a, b, rtol=1e-12, atol=1e-14)
        for a, b in zip(direct.coefficients, reduced.coefficients)
    )


CHECKS: Dict[str, Callable[[], bool]] = {
    "Bessel parity": _bessel_parity,
    "Bessel normalization": _bessel_normalization,
    "Kernel identity": _kernel_identity,
    "Hamiltonian Hermiticity": _hermiticity,
    "Wannier-Stark centroid": _mode_centroid,
    "Norm drift": _norm_drift,
    "Chebyshev/eigen agreement": _backend_agreement,
    "Delay-equation reduction": _dde_reduction,
}


def selfcheck() -> Tuple[bool, str]:
    """Runs the quick invariant checks.

    A check that raises a library error counts as failed.

    .. versionadded:: 1.0

    Returns
    -------
    Tuple[:class:`bool`, :class:`str`]
        Whether every check passed, and the rendered results chart.
    """
    outcomes: Dict[str, Optional[bool]] = {}

    for name, check in CHECKS.items():
        try:
            outcomes[name] = bool(check())
        except StarkemitError as exc:
            _LOG.error("Self-check %r raised: %s", name, exc)
            outcomes[name] = False

    chart = tchart({name: bool_to_mark(ok) for name, ok in outcomes.items()})
    return all(outcomes.values()), chart
