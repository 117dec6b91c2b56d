""" Convergence experiments on the benchmark cases (slow, run with -m slow) """
# pylint: disable=missing-function-docstring

import numpy as np
import pytest

from wg_plate import AdaptConfig, adapt_loop, example_1, example_2, example_3, example_4

pytestmark = pytest.mark.slow


def boundary_fraction(mesh, width=0.1):
    x, y = mesh.centroids[:, 0], mesh.centroids[:, 1]
    distance = np.minimum(np.minimum(x, 1.0 - x), np.minimum(y, 1.0 - y))
    return np.count_nonzero(distance < width) / mesh.n_cells


def test_uniform_convergence_on_the_internal_peak():
    config = AdaptConfig(
        mode="uniform", initial_n=4, max_levels=4, max_dof=10 ** 6, deterministic=True
    )
    history = adapt_loop(example_1(), 2, 1.0, config)
    assert len(history) == 4
    for values in (
        [record.error for record in history.records],
        [record.eta_h for record in history.records],
    ):
        assert all(later < earlier for earlier, later in zip(values, values[1:]))
        assert values[0] / values[-1] >= 8.0


@pytest.mark.parametrize("factory", [example_1, example_2, example_3])
def test_effectivity_is_stable(factory):
    case = factory()
    history = adapt_loop(case, 2, None, AdaptConfig(theta=case.theta, deterministic=True))
    effectivities = [record.effectivity for record in history.records[-3:]]
    assert len(effectivities) == 3
    assert max(effectivities) / min(effectivities) <= 3.0


def test_internal_peak_refinement_is_localized():
    history = adapt_loop(example_1(), 2, None, AdaptConfig(theta=0.3, deterministic=True))
    etas = [record.eta_h for record in history.records]
    assert all(later < earlier for earlier, later in zip(etas, etas[1:]))

    mesh = history.mesh
    near_peak = np.hypot(mesh.centroids[:, 0] - 0.5, mesh.centroids[:, 1] - 0.117) < 0.2
    assert np.count_nonzero(near_peak) >= 0.4 * mesh.n_cells


def test_four_layers_refines_towards_the_boundary():
    history = adapt_loop(example_4(), 2, None, AdaptConfig(theta=0.3, deterministic=True))
    assert len(history.meshes) >= 3
    fractions = [boundary_fraction(mesh) for mesh in history.meshes[-3:]]
    assert fractions[0] < fractions[1] < fractions[2]


def test_adaptive_beats_uniform_at_equal_budget():
    case = example_1()
    adaptive = adapt_loop(case, 2, None, AdaptConfig(theta=0.3, max_dof=5000, deterministic=True))
    uniform = adapt_loop(
        case, 2, None, AdaptConfig(mode="uniform", max_dof=5000, deterministic=True)
    )
    assert adaptive.final.dofs <= 5000 and uniform.final.dofs <= 5000
    assert adaptive.final.eta_h < uniform.final.eta_h
