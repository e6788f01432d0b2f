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
from typing import Tuple

import numpy as np
import pytest
import scipy.linalg

from starkemit.errors import (
    ConfigurationError,
    FitError,
    SizingError,
    StepSizeError,
    VacuumFieldError,
)
from starkemit.lattice import (
    LatticeSpec,
    QubitSpec,
    auto_size,
    build_hamiltonian,
    nearest_mode,
    rabi_frequency,
    wrap_momentum,
)
from starkemit.propagator import *
from starkemit.semiclassics import return_tree


def _random_state(lat: LatticeSpec, seed: int = 7) -> SingleExcitationState:
    rng = np.random.default_rng(seed)
    vector = rng.normal(size=lat.N + 1) + 1j * rng.normal(size=lat.N + 1)
    vector /= np.linalg.norm(vector)
    return SingleExcitationState.from_vector(vector, lat.sites)


def _gaussian_packet(lat: LatticeSpec, k: float, width: float) -> SingleExcitationState:
    sites = lat.sites
    beta = np.exp(-0.5 * (sites / width) ** 2 + 1j * k * sites)
    beta /= np.linalg.norm(beta)
    return SingleExcitationState(0.0, beta, sites)


def test_excited_state() -> None:
    lat = LatticeSpec(N=11)
    state = SingleExcitationState.excited(lat)

    assert state.qubit_population == 1.0
    assert state.field_population == 0.0
    assert state.norm == 1.0
    assert state.to_vector().shape == (12,)


def test_state_vector_layout() -> None:
    lat = LatticeSpec(N=5)
    vector = np.array([0.5, 0, 0.5j, 0.5, -0.5j, 0])
    state = SingleExcitationState.from_vector(vector, lat.sites, 2.0)

    assert state.alpha_e == 0.5
    assert state.time == 2.0
    np.testing.assert_allclose(state.site_density, [0, 0.25, 0.25, 0.25, 0])
    np.testing.assert_array_equal(state.to_vector(), vector)
    assert state.norm == pytest.approx(1.0)


def test_state_failures() -> None:
    with pytest.raises(ConfigurationError):
        SingleExcitationState(1.0, np.zeros(4), np.arange(5))


@pytest.mark.parametrize(
    "times",
    [
        np.array([]),
        np.array([0.0, 1.0, 1.0]),
        np.array([0.0, 2.0, 1.0]),
        np.array([0.0, 1.0, 2.5]),
        np.zeros((2, 2)),
    ],
)
def test_time_series_failures(times: np.ndarray) -> None:
    with pytest.raises(ConfigurationError):
        TimeSeries(times, list(range(len(times))))


def test_time_series_frame_count() -> None:
    with pytest.raises(ConfigurationError):
        TimeSeries(np.arange(3.0), [1, 2])


def test_time_series_access() -> None:
    series = TimeSeries(np.arange(5) * 0.5, ["a", "b", "c", "d", "e"])

    assert len(series) == 5
    assert series.dt == 0.5
    assert series[0] == "a"
    assert series[-1] == "e"
    assert series[1:4:2] == ["b", "d"]

    with pytest.raises(IndexError):
        series[5]

    assert TimeSeries(np.array([1.0]), ["a"]).dt == 0.0


def test_momentum_grid() -> None:
    k = momentum_grid(4)
    np.testing.assert_allclose(k, [-math.pi, -0.5 * math.pi, 0.0, 0.5 * math.pi])


def test_momentum_transform_is_unitary() -> None:
    state = _random_state(LatticeSpec(N=41))
    frame = to_momentum(state)

    assert np.sum(frame.density) == pytest.approx(state.field_population, abs=1e-10)


@pytest.mark.parametrize("N", [9, 41])
@pytest.mark.parametrize("j", [0, 3, 7])
def test_momentum_transform_of_plane_wave(N: int, j: int) -> None:
    lat = LatticeSpec(N=N)
    k = momentum_grid(N)[j]
    beta = np.exp(1j * k * lat.sites) / math.sqrt(N)

    frame = to_momentum(SingleExcitationState(0.0, beta, lat.sites))

    expected = np.zeros(N)
    expected[j] = 1.0
    np.testing.assert_allclose(frame.density, expected, atol=1e-12)


def test_hamiltonian_closed_form() -> None:
    lat = LatticeSpec(N=3)
    qb = QubitSpec(omega0=0.3, g=0.4)
    matrix = build_hamiltonian(lat, qb).matrix.toarray()

    series = propagate(lat, qb, 5.0, 0.5, method="chebyshev")
    initial = np.array([1, 0, 0, 0], dtype=complex)

    for t, amplitudes in zip(series.times, series.amplitudes):
        np.testing.assert_allclose(
            amplitudes, scipy.linalg.expm(-1j * matrix * t) @ initial, atol=1e-10
        )


def test_chebyshev_matches_eigen() -> None:
    lat = LatticeSpec(N=41, F=0.5, n0=2)
    qb = QubitSpec(omega0=0.3, g=0.1)

    chebyshev = propagate(lat, qb, 10.0, 0.5, method="chebyshev", edge_guard=False)
    eigen = propagate(lat, qb, 10.0, 0.5, method="eigen", edge_guard=False)

    np.testing.assert_array_equal(chebyshev.times, eigen.times)
    assert np.max(np.abs(chebyshev.amplitudes - eigen.amplitudes)) <= 1e-8


def test_propagate_conserves_norm() -> None:
    lat = LatticeSpec(N=61, F=0.2)
    series = propagate(
        lat, QubitSpec(omega0=0.0, g=0.3), 20.0, 0.25, initial_state=_random_state(lat)
    )

    assert series.norm_drift() <= 1e-10
    assert len(series) == 81
    assert series.dt == pytest.approx(0.25)


def test_backwards_step_inverts_forwards_step() -> None:
    lat = LatticeSpec(N=31, F=0.3)
    propagator = Propagator(build_hamiltonian(lat, QubitSpec(omega0=0.2, g=0.2)))
    vector = _random_state(lat).to_vector()

    there = propagator.evolve(vector, 3.0)
    back = propagator.evolve(there, -3.0)

    np.testing.assert_allclose(back, vector, atol=1e-10)


def test_chebyshev_order_grows_with_step() -> None:
    hamiltonian = build_hamiltonian(LatticeSpec(N=31), QubitSpec(omega0=0, g=0.1))
    propagator = Propagator(hamiltonian)

    assert propagator.chebyshev_order(0.1) < propagator.chebyshev_order(10.0)
    assert propagator.spectral_radius > 0


def test_chebyshev_order_cap() -> None:
    hamiltonian = build_hamiltonian(LatticeSpec(N=31), QubitSpec(omega0=0, g=0.1))

    with pytest.raises(StepSizeError):
        Propagator(hamiltonian, max_order=10).chebyshev_order(100.0)


def test_propagator_method_failures() -> None:
    hamiltonian = build_hamiltonian(LatticeSpec(N=5), QubitSpec(omega0=0, g=0.1))

    with pytest.raises(ConfigurationError):
        Propagator(hamiltonian, method="rk4")


@pytest.mark.parametrize(
    ("t_max", "dt_out"),
    [
        (0.0, 0.1),
        (-1.0, 0.1),
        (1.0, 0.0),
    ],
)
def test_propagate_time_failures(t_max: float, dt_out: float) -> None:
    with pytest.raises(ConfigurationError):
        propagate(LatticeSpec(N=5), QubitSpec(omega0=0, g=0.1), t_max, dt_out)


def test_propagate_initial_state_failures() -> None:
    lat = LatticeSpec(N=5)
    qb = QubitSpec(omega0=0, g=0.1)

    with pytest.raises(ConfigurationError):
        wrong_size = SingleExcitationState.excited(LatticeSpec(N=7))
        propagate(lat, qb, 1.0, 0.1, initial_state=wrong_size)

    with pytest.raises(ConfigurationError):
        unnormalised = SingleExcitationState(2.0, np.zeros(5), lat.sites)
        propagate(lat, qb, 1.0, 0.1, initial_state=unnormalised)


def test_edge_guard() -> None:
    with pytest.raises(SizingError):
        propagate(LatticeSpec(N=101), QubitSpec(omega0=0, g=0.5), 40.0, 1.0)


def test_edge_guard_disabled() -> None:
    lat = LatticeSpec(N=101)
    series = propagate(lat, QubitSpec(omega0=0, g=0.5), 40.0, 1.0, edge_guard=False)
    assert series.norm_drift() <= 1e-10


def test_bloch_oscillation_in_momentum_space() -> None:
    lat = LatticeSpec(N=201, F=0.05)
    t_bloch = 2 * math.pi / lat.F
    packet = _gaussian_packet(lat, 0.5 * math.pi, 5.0)

    series = propagate(
        lat,
        QubitSpec(omega0=0, g=0.0),
        t_bloch,
        t_bloch / 100,
        initial_state=packet,
        edge_guard=False,
    )
    peaks = track_momentum_peak(momentum_series(series))
    expected = wrap_momentum(0.5 * math.pi - lat.F * series.times)

    cell = 2 * math.pi / lat.N
    assert np.max(np.abs(wrap_momentum(peaks - expected))) <= 2 * cell


def test_energy_momentum_map() -> None:
    lat = LatticeSpec(N=21)
    series = propagate(lat, QubitSpec(omega0=0, g=0.3), 2.0, 0.5)
    frames = energy_momentum_map(momentum_series(series))

    assert len(frames) == len(series)

    for frame in frames:
        np.testing.assert_allclose(frame.omega, -2 * np.cos(frame.k))


@pytest.mark.parametrize(
    ("F", "omega0", "g", "expected"),
    [
        (0.0, 0.0, 0.2, 0.1),
        (0.001, 0.0, 0.2, 2 * math.pi / 0.001 / 400),
    ],
)
def test_default_dt_out(F: float, omega0: float, g: float, expected: float) -> None:
    lat = LatticeSpec(N=5, F=F)
    assert default_dt_out(lat, QubitSpec(omega0=omega0, g=g)) == pytest.approx(expected)


def test_default_sampling_under_strong_force() -> None:
    lat = LatticeSpec(N=5, F=0.5)
    qb = QubitSpec(omega0=0, g=0.01)
    period = 2 * math.pi / rabi_frequency(lat, qb, 0)

    assert default_t_max(lat, qb) == pytest.approx(3 * period)
    assert default_dt_out(lat, qb) == pytest.approx(period / 200)


@pytest.mark.parametrize(
    ("F", "expected"),
    [
        (0.0, 60.0),
        (0.001, 4 * math.pi / 0.001),
    ],
)
def test_default_t_max(F: float, expected: float) -> None:
    lat = LatticeSpec(N=5, F=F)
    assert default_t_max(lat, QubitSpec(omega0=0, g=0.2)) == pytest.approx(expected)


def _decay(gamma: float, t_max: float = 60.0, dt: float = 0.1) -> QubitTrace:
    times = np.arange(int(round(t_max / dt)) + 1) * dt
    return QubitTrace(times, np.exp(-gamma * times), gamma)


def test_fit_decay_rate_exact() -> None:
    fit = fit_decay_rate(_decay(0.04), window=(5.0, 60.0))

    assert fit.gamma_fit == pytest.approx(0.04, abs=1e-6)
    assert fit.r_squared == pytest.approx(1.0)


@pytest.mark.parametrize(
    ("trace", "window"),
    [
        (_decay(0.04), (5.0, 5.2)),
        (_decay(0.04), (70.0, 80.0)),
        (_decay(1.0, t_max=60.0), (30.0, 60.0)),
        (_decay(0.04), None),
    ],
)
def test_fit_decay_rate_failures(trace: QubitTrace, window: Tuple[float, float]) -> None:
    with pytest.raises(FitError):
        fit_decay_rate(trace, window)


def test_fit_decay_rate_rejects_foreign_objects() -> None:
    with pytest.raises(TypeError):
        fit_decay_rate(object(), (0.0, 1.0))


def test_detect_revivals() -> None:
    times = np.arange(4001) * 0.1
    population = (
        np.exp(-0.04 * times)
        + 0.1 * np.exp(-(((times - 200) / 5) ** 2))
        + 0.05 * np.exp(-(((times - 300) / 5) ** 2))
    )
    revivals = detect_revivals(QubitTrace(times, population, 0.04))

    assert [r.time for r in revivals] == pytest.approx([200.0, 300.0], abs=0.5)
    assert revivals[0].population == pytest.approx(0.1, abs=1e-3)


def test_detect_revivals_skips_small_bumps() -> None:
    times = np.arange(4001) * 0.1
    population = np.exp(-0.04 * times) + 0.005 * np.exp(-(((times - 200) / 5) ** 2))

    assert detect_revivals(QubitTrace(times, population), after=125.0) == []


def test_detect_revivals_needs_delay() -> None:
    with pytest.raises(ValueError):
        detect_revivals(QubitTrace(np.arange(10.0), np.ones(10)))


def test_fit_rabi() -> None:
    times = np.arange(4000) * 0.05
    fit = fit_rabi(QubitTrace(times, 0.5 + 0.5 * np.cos(0.3 * times)))

    assert fit.frequency == pytest.approx(0.3, rel=1e-6)
    assert fit.contrast == pytest.approx(1.0, abs=1e-3)


@pytest.mark.parametrize(
    "trace",
    [
        QubitTrace(np.arange(10.0), np.cos(np.arange(10.0))),
        QubitTrace(np.arange(200.0), np.ones(200)),
    ],
)
def test_fit_rabi_failures(trace: QubitTrace) -> None:
    with pytest.raises(FitError):
        fit_rabi(trace)


def test_photon_centroid_and_asymmetry() -> None:
    lat = LatticeSpec(N=5)
    beta = np.sqrt([0.0, 0.1, 0.2, 0.3, 0.0])
    state = SingleExcitationState(math.sqrt(0.4), beta, lat.sites)

    assert photon_centroid(state) == pytest.approx((-0.1 + 0.3) / 0.6)

    balance = emission_asymmetry(state)

    assert balance.left == pytest.approx(0.1)
    assert balance.right == pytest.approx(0.3)
    assert balance.ratio == pytest.approx(1 / 3)


def test_photon_centroid_of_vacuum() -> None:
    with pytest.raises(VacuumFieldError):
        photon_centroid(SingleExcitationState.excited(LatticeSpec(N=5)))


def test_emission_balance_without_right_emission() -> None:
    assert EmissionBalance(0.2, 0.0).ratio == math.inf


def test_revival_amplitude() -> None:
    times = np.arange(101.0)
    trace = QubitTrace(times, np.where(times == 50, 0.3, 0.01))

    assert revival_amplitude(trace, 52.0, 3.0) == 0.3
    assert revival_amplitude(trace, 20.0, 3.0) == 0.01

    with pytest.raises(FitError):
        revival_amplitude(trace, 500.0, 3.0)


@pytest.mark.slow
def test_markovian_decay() -> None:
    lat = LatticeSpec(N=auto_size(0.0, 60.0))
    series = propagate(lat, QubitSpec(omega0=0, g=0.2), 60.0, 0.1)

    assert fit_decay_rate(series, (5.0, 60.0)).gamma_fit == pytest.approx(0.04, rel=0.05)

    front = wavefront_velocity(series)

    assert front.right == pytest.approx(2.0, rel=0.05)
    assert front.left == pytest.approx(-2.0, rel=0.05)


@pytest.mark.slow
@pytest.mark.parametrize(("omega0", "n_c"), [(0.0, 0), (1.5, 3), (-1.5, -3)])
def test_chiral_rabi_oscillation(omega0: float, n_c: int) -> None:
    lat = LatticeSpec(N=217, F=0.5)
    qb = QubitSpec(omega0=omega0, g=0.01)
    series = propagate(lat, qb, default_t_max(lat, qb), default_dt_out(lat, qb))

    predicted = rabi_frequency(lat, qb, nearest_mode(lat, qb))
    fit = fit_rabi(series)

    assert nearest_mode(lat, qb) == n_c
    assert fit.frequency == pytest.approx(predicted, rel=0.02)

    half = int(np.argmin(np.abs(series.times - math.pi / predicted)))
    assert photon_centroid(series[half]) == pytest.approx(n_c, abs=0.1)

    if omega0 == 0:
        assert fit.contrast >= 0.98


@pytest.fixture(scope="module")
def weak_force() -> EvolutionSeries:
    lat = LatticeSpec(N=auto_size(0.001), F=0.001)
    qb = QubitSpec(omega0=0, g=0.2)
    return propagate(lat, qb, default_t_max(lat, qb), default_dt_out(lat, qb))


@pytest.mark.slow
def test_weak_force_decay_and_revivals(weak_force: EvolutionSeries) -> None:
    t_bloch = 2 * math.pi / weak_force.lattice.F

    assert fit_decay_rate(weak_force).gamma_fit == pytest.approx(0.04, rel=0.05)

    revivals = detect_revivals(weak_force)

    assert len(revivals) >= 2
    assert revivals[0].time == pytest.approx(t_bloch / 2, abs=0.02 * t_bloch)
    assert revivals[1].time == pytest.approx(t_bloch, abs=0.02 * t_bloch)


@pytest.mark.slow
def test_weak_force_follows_return_tree(weak_force: EvolutionSeries) -> None:
    t_bloch = 2 * math.pi / weak_force.lattice.F
    events = return_tree(0.0, t_bloch=t_bloch, t_max=weak_force.times[-1])
    predicted = [e.t_r for e in events]

    for revival in detect_revivals(weak_force)[:2]:
        assert min(abs(revival.time - t) for t in predicted) <= 0.03 * t_bloch


@pytest.mark.slow
def test_weak_force_initial_decay_is_exponential(weak_force: EvolutionSeries) -> None:
    t_bloch = 2 * math.pi / weak_force.lattice.F
    early = weak_force.times < 0.4 * t_bloch
    expected = np.exp(-0.5 * weak_force.gamma * weak_force.times[early])

    assert np.max(np.abs(np.abs(weak_force.alpha_e[early]) - expected)) <= 0.01


@pytest.mark.slow
def test_detuned_revivals() -> None:
    lat = LatticeSpec(N=auto_size(0.001), F=0.001)
    qb = QubitSpec(omega0=-1.0, g=0.2)
    series = propagate(lat, qb, default_t_max(lat, qb), default_dt_out(lat, qb))

    t_bloch = 2 * math.pi / lat.F
    revivals = detect_revivals(series)

    expected = [t_bloch / 3, 2 * t_bloch / 3]

    assert [r.time for r in revivals[:2]] == pytest.approx(expected, abs=0.02 * t_bloch)


@pytest.mark.slow
def test_revival_suppression() -> None:
    q = 1273
    F = 4 / (q * math.pi)
    t_bloch = 2 * math.pi / F
    qb = QubitSpec(omega0=0, g=0.2)

    def amplitude(force: float) -> float:
        lat = LatticeSpec(N=auto_size(force), F=force)
        series = propagate(lat, qb, 0.6 * t_bloch, t_bloch / 400)
        return revival_amplitude(series, t_bloch / 2, 0.05 * t_bloch)

    assert 10 * amplitude(F) <= amplitude(1.05 * F)


@pytest.mark.slow
def test_band_edge_emission_is_chiral() -> None:
    lat = LatticeSpec(N=auto_size(0.001), F=0.001)
    qb = QubitSpec(omega0=1.966, g=0.01)
    t_bloch = 2 * math.pi / lat.F
    series = propagate(lat, qb, 0.5 * t_bloch, t_bloch / 400)

    balance = emission_asymmetry(series[-1])

    assert balance.left <= 0.1 * balance.right
