"""Spectral checks, power-law fits, flatness, and limit comparison."""
from __future__ import annotations

import numpy as np
import pytest

from conftest import WEAVE_DESIGNS, load_system, random_weave_system
from tangleflow.analysis import (
    Series,
    commutation_check,
    compare_limits,
    eigendecompose,
    fit_power_law,
    flatness_series,
    separation_series,
)
from tangleflow.dynamics import FlowParams, integrate
from tangleflow.errors import (
    EntangledInput,
    InsufficientSamples,
    NonpositiveValue,
    NotConverged,
    NotSymmetric,
    UnknownComponent,
)
from tangleflow.model import (
    PeriodicQuotientGraph,
    build_entangled_system,
    make_configuration,
    random_initial_configuration,
)


def cycle_system(n: int):
    """Quotient n-cycle: ring edges with one wrapping edge."""
    edges = []
    for k in range(n):
        shift = (1, 0) if k == n - 1 else (0, 0)
        edges.append((k, (k + 1) % n, shift))
    graph = PeriodicQuotientGraph(
        n_vertices=n, edges=tuple(edges), lattice_basis=((1.0, 0.0), (0.0, 1.0))
    )
    return build_entangled_system(graph, tuple(1 if k % 2 == 0 else -1 for k in range(n)))


def test_cycle_eigenvalues():
    data = eigendecompose(cycle_system(4).laplacian)
    assert np.max(np.abs(data.eigenvalues - np.array([0.0, 2.0, 2.0, 4.0]))) <= 1e-10


def test_pair_eigenvalues():
    data = eigendecompose(load_system("entangled_pair.graph").laplacian)
    assert np.max(np.abs(data.eigenvalues - np.array([0.0, 4.0]))) <= 1e-10


def test_spectral_invariants():
    L = cycle_system(6).laplacian
    data = eigendecompose(L)
    n = L.shape[0]
    for k in range(n):
        phi = data.eigenvectors[:, k]
        assert np.max(np.abs(L @ phi + data.eigenvalues[k] * phi)) <= 1e-8
    gram = data.eigenvectors.T @ data.eigenvectors
    assert np.max(np.abs(gram - np.eye(n))) <= 1e-10
    # kernel vector is the normalized constant
    assert np.max(np.abs(data.eigenvectors[:, 0] - 1.0 / np.sqrt(n))) <= 1e-8
    # reconstruction with our sign convention
    recon = data.eigenvectors @ np.diag(data.eigenvalues) @ data.eigenvectors.T
    assert np.max(np.abs(L + recon)) <= 1e-8
    assert np.all(np.diff(data.eigenvalues) >= -1e-12)


def test_eigendecompose_matches_numpy_on_random_symmetric():
    rng = np.random.default_rng(13)
    for _ in range(10):
        n = int(rng.integers(2, 13))
        A = rng.normal(size=(n, n))
        M = (A + A.T) / 2
        ours = eigendecompose(M)
        reference = np.sort(-np.linalg.eigvalsh(M))
        assert np.max(np.abs(ours.eigenvalues - reference)) <= 1e-9


def test_eigendecompose_shift_property():
    L = load_system("entangled_pair.graph").laplacian
    data = eigendecompose(L - 3.0 * np.eye(2))
    assert np.max(np.abs(data.eigenvalues - np.array([3.0, 7.0]))) <= 1e-10


def test_not_symmetric_rejected():
    with pytest.raises(NotSymmetric):
        eigendecompose(np.array([[0.0, 1.0], [0.5, 0.0]]))


def test_commutation_check_bundled_and_negative_control():
    for name in WEAVE_DESIGNS:
        assert commutation_check(load_system(name)) == 0.0
    rng = np.random.default_rng(29)
    for _ in range(4):
        system = random_weave_system(rng)
        assert commutation_check(system) == 0.0
    # generic symmetric matrices do not commute
    A = rng.normal(size=(5, 5))
    B = rng.normal(size=(5, 5))
    A, B = (A + A.T) / 2, (B + B.T) / 2
    assert np.max(np.abs(A @ B - B @ A)) > 0.0


def test_fit_power_law_exact_data():
    t = np.linspace(10.0, 1000.0, 200)
    report = fit_power_law(Series("cube", t, 3.0 * t ** (1.0 / 3.0)), (10.0, 1000.0))
    assert abs(report.slope - 1.0 / 3.0) <= 1e-6
    assert report.r_squared > 0.999999
    linear = fit_power_law(Series("line", t, 5.0 * t), (10.0, 1000.0))
    assert abs(linear.slope - 1.0) <= 1e-6
    assert linear.series_name == "line"
    assert linear.window == (10.0, 1000.0)


def test_fit_power_law_errors():
    t = np.linspace(1.0, 100.0, 30)
    with pytest.raises(InsufficientSamples):
        fit_power_law(Series("s", t, t), (90.0, 100.0))
    values = np.array(t)
    values[5] = -1.0
    with pytest.raises(NonpositiveValue):
        fit_power_law(Series("s", t, values), (1.0, 100.0))
    with pytest.raises(ValueError):
        fit_power_law(Series("s", t, t), (100.0, 1.0))


def untangled_pair_trajectory(t_max=200.0):
    system = load_system("untangled_pair.graph")
    config = make_configuration(system, (0.5, 0.5), (-0.5, -0.5))
    return system, integrate(system, config, FlowParams(t_max=t_max))


def test_separation_series_graph():
    system, traj = untangled_pair_trajectory()
    series = separation_series(traj)
    assert len(series) == 1
    s = series[0]
    assert s.name == "separation"
    assert s.times[0] == 0.0
    assert s.values[0] == pytest.approx(1.0)  # initial mean gap
    assert np.all(np.diff(s.values) > 0)


def test_separation_series_entangled_rejected():
    system = load_system("entangled_pair.graph")
    config = random_initial_configuration(system, seed=1)
    traj = integrate(system, config, FlowParams(t_max=5.0))
    with pytest.raises(EntangledInput):
        separation_series(traj)


def test_separation_series_weave_cuts():
    system = load_system("split_2x2.weave")
    config = random_initial_configuration(system, seed=7)
    traj = integrate(system, config, FlowParams(t_max=50.0))
    series = separation_series(traj)
    assert len(series) == 1  # K=2 -> one cut
    assert series[0].name == "separation_cut_1"
    assert series[0].values[-1] > series[0].values[0]

    system3 = load_system("three_blocks_6x6.weave")
    config3 = random_initial_configuration(system3, seed=7)
    traj3 = integrate(system3, config3, FlowParams(t_max=20.0))
    series3 = separation_series(traj3)
    assert [s.name for s in series3] == ["separation_cut_1", "separation_cut_2"]


def test_flatness_series_graph():
    system, traj = untangled_pair_trajectory(t_max=50.0)
    for component in ["blue", "red"]:
        series = flatness_series(traj, component)
        assert np.max(series.values) <= 1e-12  # symmetric start stays flat
    with pytest.raises(UnknownComponent):
        flatness_series(traj, "green")


def test_flatness_series_weave():
    system = load_system("three_blocks_6x6.weave")
    config = random_initial_configuration(system, seed=11)
    traj = integrate(system, config, FlowParams(t_max=20.0))
    for k in [1, 2, 3]:
        series = flatness_series(traj, k)
        assert series.values.shape == series.times.shape
        assert np.all(series.values >= 0)
    with pytest.raises(UnknownComponent):
        flatness_series(traj, 4)


def test_compare_limits_identity_and_not_converged():
    system = load_system("entangled_pair.graph")
    config = random_initial_configuration(system, seed=1)
    traj = integrate(system, config, FlowParams(t_max=100.0))
    assert traj.status == "converged"
    ok, residual = compare_limits(traj, traj, tol=1e-8)
    assert ok and residual == 0.0

    _, truncated = untangled_pair_trajectory(t_max=5.0)
    with pytest.raises(NotConverged):
        compare_limits(traj, truncated, tol=1e-4)


def test_compare_limits_two_seeds_agree():
    system = load_system("entangled_pair.graph")
    params = FlowParams(t_max=100.0)
    traj_a = integrate(system, random_initial_configuration(system, seed=1), params)
    traj_b = integrate(system, random_initial_configuration(system, seed=2), params)
    ok, residual = compare_limits(traj_a, traj_b, tol=1e-4)
    assert ok and residual <= 1e-4
