import json
import math

import numpy as np
import pytest

from indefshoot import (AdmissibilityError, NonlinearitySpec, ParameterPair,
                        WeightSpec, delta_tilde, eval_weight, g_min_on,
                        integral_Aminus, integral_Aplus, load_problem,
                        neumann_necessary_mu, problem_from_dict,
                        threshold_lambda_star, threshold_lambda_star_star,
                        threshold_mu_star)
from indefshoot.model import delta_tilde_backward, omega_sigma_default

TWO_OVER_PI = 2.0 / math.pi
# closed form of the nested integral over [0, 1/2] of the running
# positive-part integral of sin(pi t): 0.5/pi - 1/pi^2
NESTED_HALF = 0.5 / math.pi - 1.0 / math.pi ** 2


def test_eval_weight_examples(sin3, g_hump):
    p = ParameterPair(20.0, 500.0)
    assert eval_weight(sin3, p, 0.5) == pytest.approx(20.0, abs=1e-12)
    assert eval_weight(sin3, p, 1.5) == pytest.approx(-500.0, abs=1e-10)
    assert eval_weight(sin3, ParameterPair(1.0, 1.0), 1.0) == pytest.approx(0.0, abs=1e-12)


def test_eval_weight_domain_error(sin3):
    with pytest.raises(AdmissibilityError):
        eval_weight(sin3, ParameterPair(1.0, 1.0), 3.5)


def test_positive_negative_parts_never_overlap(sin3):
    ts = np.linspace(0.0, 3.0, 5000)
    a = sin3.a(ts)
    ap = np.maximum(a, 0.0)
    am = np.maximum(-a, 0.0)
    assert np.all(ap * am == 0.0)


def test_part_integrals_closed_forms(sin3):
    assert integral_Aplus(sin3, 0.0, 1.0) == pytest.approx(TWO_OVER_PI, rel=1e-10)
    assert integral_Aminus(sin3, 0.0, 3.0) == pytest.approx(TWO_OVER_PI, rel=1e-10)
    assert integral_Aplus(sin3, 0.0, 3.0) == pytest.approx(2 * TWO_OVER_PI, rel=1e-10)
    assert integral_Aplus(sin3, 1.7, 1.7) == 0.0


def test_part_integral_additivity(sin3):
    rng = np.random.default_rng(3)
    for _ in range(50):
        a, b, c = np.sort(rng.uniform(0.0, 3.0, 3))
        whole = integral_Aplus(sin3, a, c)
        split = integral_Aplus(sin3, a, b) + integral_Aplus(sin3, b, c)
        assert whole == pytest.approx(split, rel=1e-9, abs=1e-12)


def test_part_integral_bound_order(sin3):
    with pytest.raises(AdmissibilityError):
        integral_Aplus(sin3, 2.0, 1.0)


def test_table_weight_matches_closed_form():
    t = np.linspace(0.0, 3.0, 20001)
    w = WeightSpec.from_table(t, np.sin(np.pi * t), nodes=[1.0, 2.0])
    assert integral_Aplus(w, 0.0, 1.0) == pytest.approx(TWO_OVER_PI, rel=1e-7)
    assert w.a(0.5) == pytest.approx(1.0, abs=1e-8)


def test_g_min_examples(g_hump):
    assert g_min_on(g_hump, 0.45, 0.9) == pytest.approx(0.081, abs=1e-10)
    assert g_min_on(g_hump, 0.1, 0.6) == pytest.approx(0.009, abs=1e-10)
    assert g_min_on(g_hump, 0.3, 1.0) == pytest.approx(0.0, abs=1e-10)
    with pytest.raises(AdmissibilityError):
        g_min_on(g_hump, 0.6, 0.1)


def test_nonlinearity_construction(g_hump):
    assert g_hump.gmax == pytest.approx(4.0 / 27.0, abs=1e-10)
    assert g_hump.gmax_arg == pytest.approx(2.0 / 3.0, abs=1e-6)
    assert g_hump.lipschitz_bound == pytest.approx(1.0, rel=1e-2)
    # the extension vanishes exactly outside the unit interval
    assert g_hump(-0.5) == 0.0
    assert g_hump(1.5) == 0.0
    assert g_hump(np.array([-1.0, 0.0, 1.0, 2.0])).tolist() == [0.0] * 4


def test_nonlinearity_rejects_bad_tables():
    s = np.linspace(0.0, 1.0, 101)
    with pytest.raises(AdmissibilityError):
        # nonzero right endpoint
        NonlinearitySpec.from_table(s, s * (1.2 - s))
    with pytest.raises(AdmissibilityError):
        # linear near zero: the slope ratio must vanish
        NonlinearitySpec.from_table(s, s * (1.0 - s))


def test_threshold_lambda_star_value(sin3, g_hump):
    v = threshold_lambda_star(sin3, g_hump, 0.9, 0.45, 0.5)
    assert v == pytest.approx(0.45 / (0.081 * NESTED_HALF), rel=1e-9)


def test_threshold_mirror_symmetry(sin3, g_hump):
    left = threshold_lambda_star(sin3, g_hump, 0.9, 0.45, 0.5)
    right = threshold_lambda_star_star(sin3, g_hump, 0.45, 0.9, 2.5)
    assert right == pytest.approx(left, rel=1e-9)


def test_threshold_lambda_star_monotone_in_t1(sin3, g_hump):
    vals = [threshold_lambda_star(sin3, g_hump, 0.9, 0.45, t1)
            for t1 in (0.2, 0.4, 0.6, 0.8, 0.999)]
    assert all(a > b for a, b in zip(vals, vals[1:]))


def test_threshold_lambda_star_star_vanishing_numerator(sin3, g_hump):
    v = threshold_lambda_star_star(sin3, g_hump, 0.45, 0.450001, 2.5)
    assert 0.0 < v < 1e-2


def test_threshold_scaling_in_g(sin3):
    s = np.linspace(0.0, 1.0, 4001)
    g1 = NonlinearitySpec.from_table(s, s * s * (1.0 - s))
    g2 = NonlinearitySpec.from_table(s, 0.5 * s * s * (1.0 - s))
    v1 = threshold_lambda_star_star(sin3, g1, 0.45, 0.9, 2.5)
    v2 = threshold_lambda_star_star(sin3, g2, 0.45, 0.9, 2.5)
    assert v2 == pytest.approx(2.0 * v1, rel=1e-6)


def test_threshold_mu_star_value(sin3, g_hump):
    v = threshold_mu_star(sin3, g_hump, 0.6, 0.2, 1.5, 0.0)
    assert v == pytest.approx(0.4 / (0.009 * NESTED_HALF), rel=1e-9)


def test_threshold_mu_star_monotone_in_omega(sin3, g_hump):
    lo = threshold_mu_star(sin3, g_hump, 0.6, 0.2, 1.05, 0.0)
    hi = threshold_mu_star(sin3, g_hump, 0.6, 0.2, 1.05, 1.0)
    assert hi > lo


def test_threshold_mu_star_vanishing_numerator(sin3, g_hump):
    v = threshold_mu_star(sin3, g_hump, 0.2000001, 0.2, 1.5, 0.0)
    assert 0.0 < v < 1e-2


def test_threshold_mu_star_precondition_names_bound(sin3, g_hump):
    with pytest.raises(AdmissibilityError, match="omega_sigma"):
        # t2 beyond sigma + nu_sigma/(2 omega): bound must be named
        threshold_mu_star(sin3, g_hump, 0.6, 0.2, 1.9, 1.0)


def test_delta_tilde_value(sin3, g_hump):
    v = delta_tilde(sin3, g_hump, 20.0)
    expected = 1.01 * (1.0 + 20.0 * TWO_OVER_PI * 4.0 / 27.0)
    assert v == pytest.approx(expected, rel=1e-10)
    assert delta_tilde_backward(sin3, g_hump, 20.0) == pytest.approx(expected, rel=1e-10)


def test_delta_tilde_small_lambda(sin3, g_hump):
    assert delta_tilde(sin3, g_hump, 1e-12) == pytest.approx(1.01, rel=1e-9)


def test_delta_tilde_affine_in_gmax(sin3):
    s = np.linspace(0.0, 1.0, 4001)
    g1 = NonlinearitySpec.from_table(s, s * s * (1.0 - s))
    g2 = NonlinearitySpec.from_table(s, 2.0 * s * s * (1.0 - s))
    d1 = delta_tilde(sin3, g1, 20.0)
    d2 = delta_tilde(sin3, g2, 20.0)
    assert d2 - d1 == pytest.approx(1.01 * 20.0 * TWO_OVER_PI * g1.gmax, rel=1e-5)


def test_omega_sigma_default(sin3, g_hump):
    assert omega_sigma_default(sin3, g_hump, 20.0) == pytest.approx(
        20.0 * TWO_OVER_PI * 4.0 / 27.0, rel=1e-9)


def test_neumann_necessary_mu(sin3):
    assert neumann_necessary_mu(sin3, 20.0) == pytest.approx(40.0, abs=1e-9)
    assert neumann_necessary_mu(sin3, 0.0) == 0.0


def test_neumann_necessary_mu_equal_humps(g_hump):
    w = WeightSpec.piecewise(3.0, [1.0, 2.0],
                             [("sine", 1.0), ("sine", -2.0), ("sine", 1.0)])
    assert neumann_necessary_mu(w, 7.0) == pytest.approx(7.0, rel=1e-9)


def test_weight_admissibility_rejections():
    t = np.linspace(0.0, 3.0, 301)
    with pytest.raises(AdmissibilityError):
        # declared nodes but no sign change
        WeightSpec.from_table(t, np.abs(np.sin(np.pi * t)), nodes=[1.0, 2.0])
    with pytest.raises(AdmissibilityError):
        WeightSpec.from_table(t, np.sin(np.pi * t), nodes=[2.0, 1.0])
    with pytest.raises(AdmissibilityError):
        WeightSpec.sin_pi(2.0)  # would end on a negativity interval
    with pytest.raises(AdmissibilityError):
        WeightSpec.piecewise(3.0, [1.0, 2.0], [("sine", 1.0), ("sine", -1.0)])
    with pytest.raises(AdmissibilityError):
        # almost-everywhere-zero segment
        WeightSpec.piecewise(3.0, [1.0, 2.0],
                             [("sine", 1.0), ("const", 0.0), ("sine", 1.0)])


def test_single_hump_weight_is_admissible():
    w = WeightSpec.sin_pi(1.0)
    assert w.humps == 1
    assert w.nodes == ()
    assert w.default_section() == pytest.approx(0.5)


def test_multi_hump_structure():
    w = WeightSpec.sin_pi(5.0)
    assert w.humps == 3
    assert w.negativity_intervals() == [(1.0, 2.0), (3.0, 4.0)]
    assert w.section_bounds() == (3.0, 4.0)


def test_problem_file_roundtrip(tmp_path):
    path = tmp_path / "problem.json"
    path.write_text(json.dumps({
        "T": 3, "weight": {"kind": "sin_pi"}, "g": {"kind": "s2_1ms"},
        "sigma": 1, "tau": 2}))
    w, g = load_problem(path)
    assert w.kind == "sin_pi" and w.nodes == (1.0, 2.0)
    assert g.kind == "s2_1ms"


def test_problem_file_errors(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(AdmissibilityError, match="malformed"):
        load_problem(bad)
    with pytest.raises(AdmissibilityError, match="missing"):
        problem_from_dict({"weight": {"kind": "sin_pi"}})
    with pytest.raises(AdmissibilityError, match="disagree"):
        problem_from_dict({"T": 3, "weight": {"kind": "sin_pi"},
                           "g": {"kind": "s2_1ms"}, "nodes": [1.0, 2.5]})


def test_parameter_pair_validation():
    with pytest.raises(AdmissibilityError):
        ParameterPair(-1.0, 1.0)
    with pytest.raises(AdmissibilityError):
        ParameterPair(1.0, -1.0)
    assert ParameterPair(1.0, 0.0).mu == 0.0
