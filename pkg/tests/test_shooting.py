import math

import numpy as np
import pytest

from indefshoot import (AdmissibilityError, BoundaryConditionType,
                        NonlinearitySpec, ParameterPair, PhasePoint,
                        WeightSpec, eval_weight, integrate,
                        intersect_continua, shoot_set, solution_records,
                        solve_multiplicity, verify_solution)
from indefshoot.phaseplane import SET_X01, InitialSet
from indefshoot.shooting import BvpSolution, EndCondition

FIG1 = ParameterPair(20.0, 500.0)


def test_bc_names_and_parsing():
    assert BoundaryConditionType.from_name("dirichlet").name == "dirichlet"
    assert BoundaryConditionType.from_name("Neumann").name == "neumann"
    mixed1 = BoundaryConditionType.mixed1()
    assert mixed1.left == EndCondition.VALUE_ZERO
    assert mixed1.right == EndCondition.SLOPE_ZERO
    with pytest.raises(AdmissibilityError):
        BoundaryConditionType.from_name("robin")


def test_fig1_count_and_residuals(fig1_solutions):
    sols = fig1_solutions
    assert len(sols) == 8
    for s in sols:
        assert s.residual_eq < 1e-6
        assert s.residual_bc_left < 1e-8
        assert s.residual_bc_right < 1e-8
        assert s.quality == "refined"
        u = s.trajectory.eval(np.linspace(0.0, 3.0, 1002)[1:-1])[:, 0]
        assert 0.0 < u.min() and u.max() < 1.0


def test_fig1_sorted_and_deterministic_order(fig1_solutions):
    keys = [(s.u0, s.du0) for s in fig1_solutions]
    assert keys == sorted(keys)


def test_fig1_band_pair_multiset(fig1_solutions):
    # two bands per side at this pair; the eight crossings distribute as
    # 3 + 2 + 2 + 1 over the 2x2 grid
    from collections import Counter
    pairs = Counter(s.bands for s in fig1_solutions)
    assert pairs == Counter({(0, 0): 3, (0, 1): 2, (1, 0): 2, (1, 1): 1})


def test_fig1_u0_grouping(fig1_solutions):
    u0s = np.array([s.u0 for s in fig1_solutions])
    assert (u0s < 0.03).sum() == 2          # very small
    assert ((u0s > 0.1) & (u0s < 0.2)).sum() == 3   # small
    assert (u0s > 0.9).sum() == 3           # near one


def test_fig1_reflection_symmetry(fig1_solutions):
    u0s = sorted(s.u0 for s in fig1_solutions)
    uTs = sorted(s.uT for s in fig1_solutions)
    assert np.allclose(u0s, uTs, atol=1e-7)


def test_fig1_concavity_matches_weight_sign(sin3, g_hump, fig1_solutions):
    ts = np.linspace(0.0, 3.0, 1501)[1:-1]
    h = 1e-5
    for s in fig1_solutions[:3]:
        wt = eval_weight(sin3, s.p, ts)
        y_hi = s.trajectory.eval(ts + h)[:, 1]
        y_lo = s.trajectory.eval(ts - h)[:, 1]
        ddu = (y_hi - y_lo) / (2.0 * h)
        # u'' and the effective weight have opposite signs
        assert np.all(ddu[wt > 1e-6] < 1e-6)
        assert np.all(ddu[wt < -1e-6] > -1e-6)


def test_fig1_section_point_consistency(fig1_solutions):
    for s in fig1_solutions:
        st = s.trajectory.eval(s.kappa)
        assert s.section_point.x == pytest.approx(st[0], abs=1e-12)
        assert s.section_point.y == pytest.approx(st[1], abs=1e-12)


def test_monotone_persistence(sin3, g_hump):
    for mu in (1000.0, 2500.0):
        sols = solve_multiplicity(sin3, g_hump, ParameterPair(20.0, mu),
                                  BoundaryConditionType.neumann())
        assert len(sols) == 8


def test_below_integral_bound_keeps_near_one_solution(sin3, g_hump):
    # the integral condition only limits solutions below the hump peak;
    # a near-one solution survives at mu = 30 < 40
    sols = solve_multiplicity(sin3, g_hump, ParameterPair(20.0, 30.0),
                              BoundaryConditionType.neumann())
    assert len(sols) == 1
    assert sols[0].u0 > 0.9
    assert sols[0].residual_bc_right < 1e-8


def test_dirichlet_empty_at_reference_pair(sin3, g_hump):
    # the value-zero ray sets have a single band at this lambda and the
    # two arcs only meet at the origin
    sols = solve_multiplicity(sin3, g_hump, FIG1,
                              BoundaryConditionType.dirichlet())
    assert sols == []


def test_all_four_bcs_at_sufficient_parameters(sin3, g_hump):
    p = ParameterPair(50.0, 2000.0)
    for name in ("dirichlet", "neumann", "mixed1", "mixed2"):
        sols = solve_multiplicity(sin3, g_hump, p,
                                  BoundaryConditionType.from_name(name))
        assert len(sols) >= 8, name


def test_intersect_requires_shared_section(sin3, g_hump):
    cf = shoot_set(sin3, g_hump, FIG1, InitialSet(SET_X01, 0.0), 1.5)
    cb = shoot_set(sin3, g_hump, FIG1, InitialSet(SET_X01, 3.0), 1.25)
    with pytest.raises(AdmissibilityError):
        intersect_continua(cf, cb)


def _manual_solution(w, g, p, bc, start, kappa=1.5):
    traj = integrate(w, g, p, 0.0, w.duration, start)
    sec = traj.eval(kappa)
    return BvpSolution(
        bc=bc, p=p, kappa=kappa,
        section_point=PhasePoint(float(sec[0]), float(sec[1])),
        left_param=start.x, right_param=start.x, band_left=0, band_right=0,
        trajectory=traj, u0=start.x, du0=start.y,
        uT=float(traj.states[-1, 0]), duT=float(traj.states[-1, 1]),
        residual_eq=math.nan, residual_bc_left=math.nan,
        residual_bc_right=math.nan, match_gap=0.0)


def test_verify_rejects_trivial_zero(sin3, g_hump):
    sol = _manual_solution(sin3, g_hump, FIG1,
                           BoundaryConditionType.neumann(), PhasePoint(0.0, 0.0))
    rep = verify_solution(sol, sin3, g_hump)
    assert not rep["pass_nontrivial"]
    assert rep["u_min"] == rep["u_max"] == 0.0


def test_verify_constant_one_fails_value_bc(sin3, g_hump):
    sol = _manual_solution(sin3, g_hump, FIG1,
                           BoundaryConditionType.dirichlet(), PhasePoint(1.0, 0.0))
    rep = verify_solution(sol, sin3, g_hump)
    assert rep["pass_equation"]
    assert not rep["pass_bc"]
    assert not rep["pass_nontrivial"]


def test_verify_accepts_solver_output(sin3, g_hump, fig1_solutions):
    rep = verify_solution(fig1_solutions[0], sin3, g_hump)
    assert rep["pass_all"]


def test_solution_records_schema(fig1_solutions):
    recs = solution_records(fig1_solutions)
    assert len(recs) == 8
    rec = recs[0]
    assert set(rec) == {"bc", "lambda", "mu", "kappa", "u0", "du0", "uT",
                        "duT", "bands", "residuals"}
    assert set(rec["residuals"]) == {"eq", "bcL", "bcR"}
    assert rec["bc"] == "neumann"
    assert rec["lambda"] == 20.0 and rec["mu"] == 500.0
