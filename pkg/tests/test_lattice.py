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


import logging
import math
from typing import Any, Dict, Optional

import numpy as np
import pytest
from scipy.special import jv

from starkemit.errors import ConfigurationError, OutOfBandError, RegimeError
from starkemit.lattice import *


@pytest.mark.parametrize(
    ("N", "sites"),
    [
        (3, [-1, 0, 1]),
        (5, [-2, -1, 0, 1, 2]),
    ],
)
def test_lattice_sites(N: int, sites: Any) -> None:
    lat = LatticeSpec(N=N)

    assert lat.half_width == (N - 1) // 2
    np.testing.assert_array_equal(lat.sites, sites)
    assert lat.site_index(sites[0]) == 0
    assert lat.site_index(0) == lat.half_width


def test_lattice_defaults_and_replace() -> None:
    lat = LatticeSpec(N=101)

    assert (lat.F, lat.n0, lat.J) == (0.0, 0, 1.0)

    tilted = lat.replace(F=0.5, n0=3)

    assert tilted == LatticeSpec(N=101, F=0.5, n0=3)
    assert hash(tilted) == hash(LatticeSpec(N=101, F=0.5, n0=3))
    assert tilted != lat


@pytest.mark.parametrize(
    "kwargs",
    [
        # Size.
        {"N": 4},
        {"N": 1},
        {"N": 3.0},
        {"N": True},
        # Qubit site.
        {"N": 5, "n0": 3},
        {"N": 5, "n0": -3},
        {"N": 5, "n0": 1.0},
        # Force and hopping.
        {"N": 5, "F": -0.1},
        {"N": 5, "F": math.nan},
        {"N": 5, "F": "0.5"},
        {"N": 5, "J": 0.0},
        {"N": 5, "J": math.inf},
    ],
)
def test_lattice_failures(kwargs: Dict[str, Any]) -> None:
    with pytest.raises(ConfigurationError):
        LatticeSpec(**kwargs)


def test_lattice_failure_key() -> None:
    with pytest.raises(ConfigurationError) as exc_info:
        LatticeSpec(N=4)

    assert exc_info.value.key == "N"


@pytest.mark.parametrize(
    "kwargs",
    [
        {"omega0": 0.0, "g": -0.01},
        {"omega0": math.inf, "g": 0.01},
        {"omega0": 0.0, "g": None},
        {"omega0": False, "g": 0.01},
    ],
)
def test_qubit_failures(kwargs: Dict[str, Any]) -> None:
    with pytest.raises(ConfigurationError):
        QubitSpec(**kwargs)


def test_decoupled_qubit() -> None:
    assert QubitSpec(omega0=0.0, g=0).g == 0.0


def test_derived_scales() -> None:
    scales = derived_scales(LatticeSpec(N=217, F=0.5), QubitSpec(omega0=0.0, g=0.01))

    assert scales.xi == pytest.approx(4.0)
    assert scales.t_bloch == pytest.approx(4 * math.pi)
    assert scales.gamma == pytest.approx(1e-4)
    assert scales.gbar == pytest.approx(0.005)
    assert scales.ratio == pytest.approx(4e-4 * math.pi)
    assert scales.has_ladder


def test_derived_scales_without_force() -> None:
    scales = derived_scales(LatticeSpec(N=441), QubitSpec(omega0=0.0, g=0.2))

    assert math.isinf(scales.xi)
    assert math.isinf(scales.t_bloch)
    assert math.isinf(scales.ratio)
    assert scales.gbar == 0.0
    assert scales.gamma == pytest.approx(0.04)
    assert not scales.has_ladder


@pytest.mark.parametrize(
    ("F", "t_max", "expected"),
    [
        (0.5, None, 217),
        (0.5, 1e4, 217),
        (1e-3, 4000 * math.pi, 8201),
        (0.0, 60.0, 441),
        (1e-3, 10.0, 241),
    ],
)
def test_auto_size(F: float, t_max: Optional[float], expected: int) -> None:
    assert auto_size(F, t_max) == expected


def test_auto_size_failures() -> None:
    with pytest.raises(ConfigurationError):
        auto_size(0.0)


def test_build_hamiltonian() -> None:
    lat = LatticeSpec(N=5, F=0.5, n0=1)
    hamiltonian = build_hamiltonian(lat, QubitSpec(omega0=0.3, g=0.2))
    dense = hamiltonian.matrix.toarray()

    expected = np.zeros((6, 6))
    expected[0, 0] = 0.3
    expected[1:, 1:] = np.diag(lat.sites * 0.5) - np.eye(5, k=1) - np.eye(5, k=-1)
    expected[0, 1 + lat.site_index(1)] = expected[1 + lat.site_index(1), 0] = 0.2

    assert hamiltonian.dimension == 6
    np.testing.assert_array_equal(dense, expected)
    assert hamiltonian.hermiticity_defect() == 0.0
    hamiltonian.check_hermitian()


def test_build_hamiltonian_drops_zeros() -> None:
    hamiltonian = build_hamiltonian(LatticeSpec(N=5), QubitSpec(omega0=0.0, g=0.0))

    # Only the hopping entries survive.
    assert hamiltonian.matrix.nnz == 8


def test_gershgorin_bounds_enclose_spectrum() -> None:
    lat = LatticeSpec(N=51, F=0.1, n0=-4)
    hamiltonian = build_hamiltonian(lat, QubitSpec(omega0=0.7, g=0.3))
    low, high = hamiltonian.gershgorin_bounds()
    spectrum = np.linalg.eigvalsh(hamiltonian.matrix.toarray())

    assert low <= spectrum[0]
    assert spectrum[-1] <= high


@pytest.mark.parametrize(
    ("k", "expected"),
    [
        (0.0, 0.0),
        (math.pi, math.pi),
        (-math.pi, math.pi),
        (1.5 * math.pi, -0.5 * math.pi),
        (-2.5 * math.pi, -0.5 * math.pi),
    ],
)
def test_wrap_momentum(k: float, expected: float) -> None:
    assert wrap_momentum(k) == pytest.approx(expected)


@pytest.mark.parametrize(
    ("k", "expected"),
    [
        (0.0, -2.0),
        (math.pi, 2.0),
        (0.5 * math.pi, 0.0),
        (-math.pi / 3, -1.0),
    ],
)
def test_dispersion(k: float, expected: float) -> None:
    assert dispersion(k) == pytest.approx(expected, abs=1e-15)


def test_dispersion_wraps_with_warning(caplog: pytest.LogCaptureFixture) -> None:
    with caplog.at_level(logging.WARNING, logger="starkemit.lattice"):
        value = dispersion(2 * math.pi)

    assert value == pytest.approx(-2.0)
    assert "Brillouin zone" in caplog.text


def test_dispersion_array() -> None:
    k = np.array([0.0, math.pi / 2, math.pi])
    np.testing.assert_allclose(dispersion(k, J=0.5), [-1.0, 0.0, 1.0], atol=1e-15)


@pytest.mark.parametrize(
    ("k", "expected"),
    [
        (0.0, 0.0),
        (0.5 * math.pi, 2.0),
        (-0.5 * math.pi, -2.0),
    ],
)
def test_group_velocity(k: float, expected: float) -> None:
    assert group_velocity(k) == pytest.approx(expected, abs=1e-15)


@pytest.mark.parametrize(
    ("omega0", "expected"),
    [
        (0.0, 0.5 * math.pi),
        (-1.0, math.pi / 3),
        (1.0, 2 * math.pi / 3),
        (-2.0, 0.0),
        (2.0, math.pi),
    ],
)
def test_resonant_momentum(omega0: float, expected: float) -> None:
    k0 = resonant_momentum(omega0)

    assert k0 == pytest.approx(expected)
    assert dispersion(k0) == pytest.approx(omega0, abs=1e-12)


@pytest.mark.parametrize("omega0", [2.5, -2.0001])
def test_resonant_momentum_failures(omega0: float) -> None:
    with pytest.raises(OutOfBandError):
        resonant_momentum(omega0)


@pytest.mark.parametrize(
    ("n0", "n", "expected"),
    [
        (0, 0, 0.01 * jv(0, 4.0)),
        (0, 3, -0.01 * jv(3, 4.0)),
        (0, -3, 0.01 * jv(3, 4.0)),
        (2, 0, 0.01 * jv(2, 4.0)),
        (0, 1000, 0.0),
    ],
)
def test_coupling_mode_function(n0: int, n: int, expected: float) -> None:
    lat = LatticeSpec(N=217, F=0.5, n0=n0)
    value = coupling_mode_function(lat, QubitSpec(omega0=0.0, g=0.01), n)

    assert value == pytest.approx(expected, abs=1e-16)


@pytest.mark.parametrize(
    ("F", "g", "label"),
    [
        (0.5, 0.01, STRONG_FORCE),
        (1e-3, 0.2, WEAK_FORCE),
        (1e-3, 0.01, CROSSOVER),
    ],
)
def test_classify_regime(F: float, g: float, label: str) -> None:
    report = classify_regime(LatticeSpec(N=101, F=F), QubitSpec(omega0=0.0, g=g))

    assert report.label == label
    assert report.ratio == pytest.approx(g**2 * 2 * math.pi / F)


@pytest.mark.parametrize(
    ("omega0", "expected"),
    [
        (0.0, 0),
        (1.5, 3),
        (-1.5, -3),
        (0.2, 0),
        (0.3, 1),
    ],
)
def test_nearest_mode(omega0: float, expected: int) -> None:
    lat = LatticeSpec(N=217, F=0.5)
    assert nearest_mode(lat, QubitSpec(omega0=omega0, g=0.01)) == expected


@pytest.mark.parametrize("n_c", [0, 3, -3])
def test_rabi_frequency_on_resonance(n_c: int) -> None:
    lat = LatticeSpec(N=217, F=0.5)
    qb = QubitSpec(omega0=n_c * 0.5, g=0.01)

    assert rabi_frequency(lat, qb, n_c) == pytest.approx(2 * 0.01 * abs(jv(n_c, 4.0)))


def test_rabi_frequency_detuned() -> None:
    lat = LatticeSpec(N=217, F=0.5)
    qb = QubitSpec(omega0=0.1, g=0.01)
    coupling = 0.01 * jv(0, 4.0)

    assert rabi_frequency(lat, qb, 0) == pytest.approx(math.sqrt(0.01 + 4 * coupling**2))


@pytest.mark.parametrize("func", [classify_regime, nearest_mode])
def test_ladder_failures(func: Any) -> None:
    with pytest.raises(RegimeError):
        func(LatticeSpec(N=101), QubitSpec(omega0=0.0, g=0.1))


def test_coupling_mode_function_failures() -> None:
    with pytest.raises(RegimeError):
        coupling_mode_function(LatticeSpec(N=101), QubitSpec(omega0=0.0, g=0.1), 0)


@pytest.mark.parametrize(
    ("F", "n"),
    [
        (0.5, 0),
        (0.5, 7),
        (0.25, -12),
    ],
)
def test_wannier_stark_mode_is_eigenvector(F: float, n: int) -> None:
    lat = LatticeSpec(N=301, F=F)
    field = build_hamiltonian(lat, QubitSpec(omega0=0.0, g=0.0)).matrix[1:, 1:]
    mode = wannier_stark_mode(lat, n)
    vector = mode.embed(lat)

    assert mode.energy == pytest.approx(n * F)
    assert np.max(np.abs(field @ vector - mode.energy * vector)) <= 1e-8
    assert np.linalg.norm(vector) == pytest.approx(1.0, abs=1e-12)
    assert mode.centroid() == pytest.approx(n, abs=1e-8)


def test_wannier_stark_mode_window_is_clipped() -> None:
    lat = LatticeSpec(N=41, F=0.5)
    mode = wannier_stark_mode(lat, 18, window=10)

    assert mode.sites[0] == 8
    assert mode.sites[-1] == 20


def test_wannier_stark_mode_failures() -> None:
    with pytest.raises(RegimeError):
        wannier_stark_mode(LatticeSpec(N=41), 0)

    with pytest.raises(ConfigurationError):
        wannier_stark_mode(LatticeSpec(N=41, F=0.5), 100, window=5)


def test_field_spectrum_is_ladder() -> None:
    lat = LatticeSpec(N=201, F=0.5)
    spectrum = field_spectrum(lat)

    assert spectrum.size == 201

    for n in range(-50, 51):
        assert np.min(np.abs(spectrum - n * lat.F)) <= 1e-9


def test_field_spectrum_without_force_is_band() -> None:
    spectrum = field_spectrum(LatticeSpec(N=101))

    assert spectrum[0] > -2.0
    assert spectrum[-1] < 2.0
