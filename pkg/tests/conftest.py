import time

import pytest

from indefshoot import (BoundaryConditionType, NonlinearitySpec,
                        ParameterPair, WeightSpec, solve_multiplicity)
from indefshoot.bifurcation import SweepConfig, sweep


@pytest.fixture(scope="session")
def sin3():
    return WeightSpec.sin_pi(3.0)


@pytest.fixture(scope="session")
def g_hump():
    return NonlinearitySpec.s2_one_minus_s()


@pytest.fixture(scope="session")
def fig1_solutions(sin3, g_hump):
    """The reference eight-solution no-flux solve at (20, 500)."""
    return solve_multiplicity(sin3, g_hump, ParameterPair(20.0, 500.0),
                              BoundaryConditionType.neumann())


def _timed_sweep(w, g, sc):
    t0 = time.time()
    branches = sweep(w, g, sc)
    return branches, time.time() - t0


@pytest.fixture(scope="session")
def sweep_l4(sin3, g_hump):
    sc = SweepConfig(lam=4.0, mu_min=0.0, mu_max=20.0, n_steps=81,
                     bc=BoundaryConditionType.neumann())
    return _timed_sweep(sin3, g_hump, sc) + (sc,)


@pytest.fixture(scope="session")
def sweep_l8(sin3, g_hump):
    sc = SweepConfig(lam=8.0, mu_min=0.0, mu_max=200.0, n_steps=101,
                     bc=BoundaryConditionType.neumann())
    return _timed_sweep(sin3, g_hump, sc) + (sc,)


@pytest.fixture(scope="session")
def sweep_l8_doubled(sin3, g_hump):
    sc = SweepConfig(lam=8.0, mu_min=0.0, mu_max=200.0, n_steps=201,
                     bc=BoundaryConditionType.neumann())
    return _timed_sweep(sin3, g_hump, sc) + (sc,)


@pytest.fixture(scope="session")
def sweep_l20(sin3, g_hump):
    sc = SweepConfig(lam=20.0, mu_min=0.0, mu_max=600.0, n_steps=121,
                     bc=BoundaryConditionType.neumann())
    return _timed_sweep(sin3, g_hump, sc) + (sc,)
