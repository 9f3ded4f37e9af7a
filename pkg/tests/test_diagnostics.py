import json
import math

import numpy as np
import pytest

from hankellab import diagnostics as dg
from hankellab.operators import hankel_window, operator_norm, toeplitz_window
from hankellab.symbols import (
    arc_indicator,
    constant,
    decay_symbol,
    kernel_vector,
    random_trigpoly,
    trigpoly,
)

A = arc_indicator(-0.5, 0.5)
B = arc_indicator(np.pi - 0.5, np.pi + 0.5)
ONE = constant(1.0)
POLY = trigpoly({-3: 1, -1: 0.5, 2: 1})


def small_net(angles=(0.0, 0.5, 1.5, np.pi), levels=range(3, 10)):
    return dg.RadialNet(tuple(angles), tuple(1 - 2.0**-j for j in levels))


# -- kernel quantities ---------------------------------------------------------------

def test_analytic_symbol_gives_exact_zero():
    v, e = dg.hankel_kernel_norm(trigpoly({0: 1, 3: 2}), 0.7j)
    # the value is exact; the bar only reflects the truncated kernel
    assert v == 0.0 and e < 1e-11


def test_zbar_at_point_eight():
    v, e = dg.hankel_kernel_norm(trigpoly({-1: 1}), 0.8)
    assert v == pytest.approx(0.6, abs=1e-15)
    assert e < 1e-11
    k = kernel_vector(0.8, size=200)
    dense = np.linalg.norm(hankel_window(trigpoly({-1: 1}), 200).matrix @ k.entries)
    assert v == pytest.approx(dense, abs=1e-14)


def test_kernel_norm_matches_dense_oracle_for_arcs():
    z = 0.7 * np.exp(0.4j)
    v, e = dg.hankel_kernel_norm(A, z, eps=1e-14)
    k = kernel_vector(z, size=1500)
    dense = np.linalg.norm(hankel_window(A, 6000).matrix[:, :1500] @ k.entries)
    assert abs(v - dense) <= e + 1e-12


@pytest.mark.parametrize("seed", range(5))
def test_adjoint_kernel_symmetry(seed):
    rng = np.random.default_rng(seed)
    f = random_trigpoly(rng, 6, scale=2.0) if seed % 2 else arc_indicator(*sorted(rng.uniform(0, 6, 2)))
    net = dg.RadialNet((0.3, 2.0, 4.1), (0.2, 0.6, 0.9, 0.97))
    curve = dg.radial_sweep(("Hf_kz", "Hstar"), {"f": f}, net)
    assert np.max(np.abs(curve.values("Hf_kz") - curve.values("Hstar"))) <= 1e-10


def test_error_bars_overlap_across_eps():
    for f in (A, POLY, decay_symbol(2)):
        for z in (0.9 * np.exp(0.5j), 0.99, 0.995 * np.exp(3j)):
            v1, e1 = dg.hankel_kernel_norm(f, z, eps=1e-8)
            v2, e2 = dg.hankel_kernel_norm(f, z, eps=1e-9)
            assert abs(v1 - v2) <= e1 + e2


# -- trend classification ---------------------------------------------------------------

def test_classify_cases():
    radii = [1 - 2.0**-j for j in range(1, 13)]
    th = dg.Thresholds()
    decaying = [math.sqrt(1 - r) for r in radii]
    assert dg.classify(decaying, radii, th)[0] == "vanishing"
    flat = [0.35 + 0.001 * j for j in range(12)]
    assert dg.classify(flat, radii, th)[0] == "plateau"
    assert dg.classify([0.0] * 12, radii, th)[0] == "vanishing"
    slow = [(1 - r) ** 0.3 for r in radii]
    assert dg.classify(slow, radii, th)[0] == "unclear"


def test_net_validation_and_default():
    with pytest.raises(ValueError):
        dg.RadialNet((0.0,), (0.5, 0.4))
    with pytest.raises(ValueError):
        dg.RadialNet((0.0,), (0.5, 1.0))
    net = dg.RadialNet.default(A.jumps)
    assert len(net.radii) == 12 and net.radii[-1] == 1 - 2.0**-12
    assert len(net.boundary_angles) == 66
    assert any(abs(t - 0.5) < 1e-12 for t in net.boundary_angles)


# -- sweep examples ------------------------------------------------------------------------

def test_product_slope_for_trig_polys():
    f = trigpoly({-2: 1, 1: 1})
    g = trigpoly({-1: 2, 3: 1})
    net = small_net(levels=range(1, 11))
    curve = dg.radial_sweep(("product",), {"f": f, "g": g}, net)
    assert all(s > 0.4 for s in curve.trend["product"])
    assert all(s == "vanishing" for s in curve.status["product"])


def test_product_vanishes_for_analytic_g():
    curve = dg.radial_sweep(("product",), {"f": A, "g": trigpoly({0: 1, 2: 1})}, small_net())
    assert np.all(curve.values("product") == 0.0)


def test_shared_singularity_plateaus():
    f = arc_indicator(0, 1)
    net = dg.RadialNet((0.0, 1.0), tuple(1 - 2.0**-j for j in range(4, 11)))
    curve = dg.radial_sweep(("product",), {"f": f, "g": f}, net)
    last = curve.values("product")[:, -3:]
    assert np.all(last.max(axis=1) / last.min(axis=1) <= 2)
    assert curve.status["product"] == ["plateau", "plateau"]


def test_sweep_shapes_and_rows():
    net = dg.RadialNet((0.0, 1.0, 2.0), tuple(1 - 2.0**-j for j in range(1, 6)))
    curve = dg.radial_sweep(("Hf_kz", "Hg_kz"), {"f": A, "g": B}, net)
    assert curve.values("Hf_kz").shape == (3, 5)
    assert len(curve.rows()) == 30
    assert all(v >= 0 and e >= 0 for *_, v, e in curve.rows())


def test_unknown_tag_rejected():
    with pytest.raises(ValueError):
        dg.radial_sweep(("nope",), {"f": A}, small_net())


# -- finite-section verdict ---------------------------------------------------------------------------------

def test_hartman_trig_poly_is_compact():
    v = dg.hartman_verdict(POLY, sizes=(64, 128))
    assert v.outcome == "compact"
    assert v.evidence["finite_rank"] == 3
    assert v.evidence["sigma"][64][10] < 1e-12


def test_hartman_smooth_decay_is_compact():
    v = dg.hartman_verdict(decay_symbol(2))
    assert v.outcome == "compact"
    tails = [v.evidence["tail_norm"][n] for n in (256, 512, 1024)]
    assert tails[0] > tails[1] > tails[2] and tails[2] <= 1e-3


def test_hartman_half_circle_is_noncompact():
    v = dg.hartman_verdict(arc_indicator(0, np.pi))
    assert v.outcome == "noncompact"
    assert set(v.evidence["sigma_rule"]) == {10, 25, 50}


def test_hartman_analytic_is_trivially_compact():
    v = dg.hartman_verdict(trigpoly({2: 1}))
    assert v.outcome == "compact" and v.tags == ("trivial",)


# -- pair and product verdicts ------------------------------------------------------------------

def test_zheng_disjoint_arcs_compact():
    v = dg.zheng_pair_verdict(arc_indicator(-0.3, 0.3), arc_indicator(np.pi - 0.3, np.pi + 0.3),
                              small_net((0.3, -0.3 % (2 * np.pi), np.pi - 0.3, 1.0)))
    assert v.outcome == "compact"


def test_zheng_shared_arc_noncompact():
    f = arc_indicator(0, 1)
    v = dg.zheng_pair_verdict(f, f, small_net((0.0, 1.0, 3.0)))
    assert v.outcome == "noncompact"
    states = {round(a["angle"], 6): a["state"] for a in v.per_angle_case}
    assert states[0.0] == "fail" and states[1.0] == "fail" and states[3.0] == "pass"


def test_zheng_analytic_factor_is_trivial():
    v = dg.zheng_pair_verdict(A, trigpoly({0: 1, 2: 1}))
    assert v.outcome == "compact" and v.tags == ("trivial",)


def test_product_trig_poly_f():
    v = dg.product_verdict(POLY, B, small_net())
    assert v.outcome == "compact"
    assert {a["case"] for a in v.per_angle_case} <= {1, 2}


def test_product_pair_a_compact_with_cases():
    net = small_net((0.0, 0.5, np.pi, np.pi - 0.5, 2.0))
    v = dg.product_verdict(A, B, net)
    assert v.outcome == "compact"
    cases = {round(a["angle"], 6): a["case"] for a in v.per_angle_case}
    assert cases[0.5] == 2          # f jumps, g locally zero
    assert cases[round(np.pi - 0.5, 6)] == 1


def test_product_pair_b_fails_at_the_jumps():
    net = small_net((0.0, 0.5, 2 * np.pi - 0.5, np.pi))
    v = dg.product_verdict(A, ONE, net)
    assert v.outcome == "noncompact"
    states = [a["state"] for a in v.per_angle_case]
    assert states == ["pass", "fail", "fail", "pass"]


def test_analytic_f_short_circuits():
    v = dg.product_verdict(trigpoly({0: 1, 1: 1}), A)
    assert v.outcome == "compact" and v.tags == ("trivial",)


def test_covanishing_along_rays():
    net = small_net((0.0, 1.5, np.pi))
    v = dg.product_verdict(A, B, net)
    c = v.evidence["sweep"]
    hf, hk, ek = c.values("Hf_kz"), c.values("HfTg_kz"), c.errors("HfTg_kz")
    for i in range(len(net.boundary_angles)):
        assert c.status["Hf_kz"][i] == "vanishing"
        C = np.max(hk[i, :3] / hf[i, :3])
        assert np.all(hk[i] <= 2 * C * hf[i] + ek[i])


def test_verdict_stable_under_net_enlargement():
    coarse = small_net((0.0, 0.5), range(3, 9))
    fine = small_net((0.0, 0.5, 1.0, np.pi), range(2, 11))
    for g, expected in ((B, "compact"), (ONE, "noncompact")):
        a = dg.product_verdict(A, g, coarse).outcome
        b = dg.product_verdict(A, g, fine).outcome
        assert {a, b} != {"compact", "noncompact"}
        assert b == expected


def test_assemble_rules():
    assert dg.assemble([{"state": "pass"}, {"state": "pass"}]) == "compact"
    assert dg.assemble([{"state": "pass"}, {"state": "unclear"}]) == "inconclusive"
    assert dg.assemble([{"state": "unclear"}, {"state": "fail"}]) == "noncompact"
    assert dg.assemble([]) == "inconclusive"


def test_verdict_serialises():
    v = dg.product_verdict(A, ONE, small_net((0.5,), range(3, 6)))
    doc = json.loads(json.dumps(v.to_dict()))
    assert doc["thresholds"]["slope_min"] == 0.4
    assert doc["evidence"]["sweep"]["status"]["Hf_kz"] == ["plateau"]


# -- dilation residual ------------------------------------------------------------------------------

def test_dilation_at_center_two_ways():
    f, g = trigpoly({-2: 1, 1: 0.5}), trigpoly({-1: 1, 0: 2})
    N = 40
    K = (hankel_window(f, N + 8).matrix @ toeplitz_window(g, N + 8).matrix)
    G = K.conj().T @ K
    S = toeplitz_window(trigpoly({1: 1}), N + 8).matrix  # T_w, and phi_0 = -w
    direct = operator_norm((G - S.conj().T @ G @ S)[:N, :N])
    for method in ("dense", "lowrank"):
        assert dg.dilation_residual((f, g), 0.0, N=N, method=method) == pytest.approx(direct, abs=1e-12)


@pytest.mark.parametrize("form", ["gram", "direct"])
def test_lowrank_matches_dense(form, rng):
    for _ in range(3):
        f, g = random_trigpoly(rng, 3), random_trigpoly(rng, 2)
        z = 0.8 * rng.uniform() * np.exp(2j * np.pi * rng.uniform())
        lo = dg.dilation_residual((f, g), z, N=48, form=form, method="lowrank", eps=1e-15)
        de = dg.dilation_residual((f, g), z, N=48, form=form, method="dense")
        assert lo == pytest.approx(de, rel=1e-10, abs=1e-12)


def test_dilation_sum_spec(rng):
    pairs = [(random_trigpoly(rng, 2), random_trigpoly(rng, 2)) for _ in range(2)]
    lo = dg.dilation_residual(pairs, 0.5j, N=40, method="lowrank", eps=1e-15)
    de = dg.dilation_residual(pairs, 0.5j, N=40, method="dense")
    assert lo == pytest.approx(de, rel=1e-10)


def test_dilation_decreases_for_finite_rank():
    vals = dg.dilation_curve((POLY, B), 0.0, range(4, 11))
    assert all(b <= 1.5 * a for a, b in zip(vals, vals[1:]))
    assert vals[-1] < vals[0] / 10


def test_dilation_bounded_below_for_pair_b():
    vals = dg.dilation_curve((A, ONE), 0.5, range(4, 11))
    assert min(vals) == pytest.approx(0.125, rel=1e-2)


def test_dilation_rejects_unknown_options():
    with pytest.raises(ValueError):
        dg.dilation_residual((A, B), 0.5, form="other")
    with pytest.raises(ValueError):
        dg.dilation_residual((A, B), 0.5, method="other")


# -- sums of two products --------------------------------------------------------------------------

def test_sum_cancellation_via_condition_five():
    f1 = arc_indicator(0, 1)
    v = dg.sum_product_verdict(f1, ONE, -1 * f1, ONE, small_net((0.0, 1.0, 3.0)))
    assert v.outcome == "compact"
    fives = [a for a in v.per_angle_case if a["case"] == 5]
    assert fives and all(abs(a["c"] - 1) < 1e-6 for a in fives)


def test_sum_double_fails_condition_five():
    f1 = arc_indicator(0, 1)
    v = dg.sum_product_verdict(f1, ONE, 2 * f1, ONE, small_net((0.0, 1.0, 3.0)))
    assert v.outcome == "noncompact"
    jump = v.per_angle_case[0]
    assert abs(jump["t"] - 2) < 1e-2 and abs(jump["c"] + 2) < 1e-2
    assert jump["condition5"]["f1(g1-cg2)"] == "plateau"
    assert not jump["t_unstable"]


def test_sum_of_individually_compact_products():
    net = small_net((0.0, 0.5, np.pi - 0.5, 2.0))
    assert dg.product_verdict(A, B, net).outcome == "compact"
    assert dg.product_verdict(POLY, A, net).outcome == "compact"
    v = dg.sum_product_verdict(A, B, POLY, A, net)
    assert v.outcome == "compact"
    assert all(a["case"] in (1, 2, 3, 4) for a in v.per_angle_case)
