import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hankellab.symbols import (
    CoeffVector,
    Laurent,
    SymbolError,
    UncertifiableSymbolError,
    analytic_part,
    arc_indicator,
    conj_family,
    constant,
    decay_symbol,
    flip_u,
    kernel_vector,
    linear_combine,
    mobius_symbol,
    multiply,
    negative_tail_l2,
    positive_tail_l2,
    riesz_project,
    trigpoly,
)

coef = st.complex_numbers(max_magnitude=5, allow_nan=False, allow_infinity=False)
polys = st.dictionaries(st.integers(-6, 6), coef, min_size=1, max_size=6).map(trigpoly)
disk = st.builds(
    lambda r, t: r * complex(math.cos(t), math.sin(t)),
    st.floats(0, 0.95), st.floats(0, 2 * math.pi),
)


def test_mobius_coefficients_frozen():
    phi = mobius_symbol(0.5)
    np.testing.assert_allclose(phi.coef(np.arange(3)), [0.5, -0.75, -0.375])
    assert phi.coef(-1) == 0
    assert phi.analytic and phi.sup_norm_bound == 1.0


def test_mobius_center_is_minus_w():
    phi = mobius_symbol(0)
    assert phi.coeffs == {1: -1}


def test_mobius_matches_boundary_values():
    z = 0.3 - 0.6j
    phi = mobius_symbol(z)
    t = np.linspace(0, 2 * np.pi, 9)
    w = np.exp(1j * t)
    np.testing.assert_allclose(phi.evaluate(t), (z - w) / (1 - np.conj(z) * w), atol=1e-13)


def test_arc_coefficients_against_quadrature():
    f = arc_indicator(0.3, 1.7)
    n = np.array([-5, -1, 0, 2, 7])
    # exact integral of e^{-int} over [a, b] divided by 2 pi
    expected = np.where(
        n == 0, (1.7 - 0.3) / (2 * np.pi),
        (np.exp(-1j * n * 0.3) - np.exp(-1j * n * 1.7)) / (2j * np.pi * np.where(n == 0, 1, n)),
    )
    np.testing.assert_allclose(f.coef(n), expected, atol=1e-15)
    # fine-grid Riemann sum as an independent check
    t = np.linspace(0, 2 * np.pi, 400_000, endpoint=False)
    vals = ((t >= 0.3) & (t < 1.7)).astype(float)
    approx = np.array([np.mean(vals * np.exp(-1j * k * t)) for k in n])
    np.testing.assert_allclose(f.coef(n), approx, atol=1e-4)


def test_arc_jumps_and_bound():
    f = arc_indicator(-0.5, 0.5)
    assert f.sup_norm_bound == 1.0
    np.testing.assert_allclose(sorted(f.jumps), [0.5, 2 * np.pi - 0.5])


def test_arc_rejects_degenerate():
    with pytest.raises(SymbolError):
        arc_indicator(1.0, 1.0)
    with pytest.raises(SymbolError):
        arc_indicator(0.0, 7.0)


def test_z_plus_zbar_bound():
    f = trigpoly({1: 1, -1: 1})
    assert f.sup_norm_bound == pytest.approx(2.0)


def test_disjoint_arc_product_is_zero():
    f = multiply(arc_indicator(0, 1), arc_indicator(2, 3))
    assert f.is_zero


def test_overlapping_arc_product_is_intersection():
    f = multiply(arc_indicator(0, 2), arc_indicator(1, 3))
    n = np.arange(-20, 21)
    np.testing.assert_allclose(f.coef(n), arc_indicator(1, 2).coef(n), atol=1e-15)


def test_arc_minus_itself_is_zero_constant():
    a = arc_indicator(0, 1)
    d = linear_combine([(1, a), (-1, a)])
    assert d.is_zero and d.sup_norm_bound == 0.0


def test_decay_symbol():
    f = decay_symbol(2)
    assert f.coef(-3) == pytest.approx(1 / 9)
    assert f.coef(3) == 0 and f.coanalytic
    assert f.sup_norm_bound == pytest.approx(math.pi**2 / 6)
    with pytest.raises(SymbolError):
        decay_symbol(1.0)


def test_product_of_two_slow_symbols_is_uncertifiable():
    with pytest.raises(UncertifiableSymbolError):
        multiply(arc_indicator(0, 1), arc_indicator(2, 3) + decay_symbol(3))


def test_truncated_product_carries_error():
    f = multiply(decay_symbol(3), arc_indicator(0, 1), band=64)
    assert f.approx_error > 0
    exact_part = multiply(decay_symbol(3), arc_indicator(0, 1), band=4096)
    assert exact_part.approx_error < f.approx_error


def test_polynomial_times_arc_is_convolution():
    p = trigpoly({-1: 2, 2: 1j})
    a = arc_indicator(0.2, 2.0)
    prod = multiply(p, a)
    n = np.arange(-10, 11)
    expected = 2 * a.coef(n + 1) + 1j * a.coef(n - 2)
    np.testing.assert_allclose(prod.coef(n), expected, atol=1e-15)


def test_analytic_part():
    f = trigpoly({-2: 1, 0: 3, 4: 5})
    assert analytic_part(f).coeffs == {0: 3, 4: 5}


@given(polys, polys)
def test_poly_product_is_convolution(f, g):
    h = multiply(f, g)
    lo = f.band[0] + g.band[0]
    expected = np.convolve(f.coef_range(*f.band), g.coef_range(*g.band))
    np.testing.assert_allclose(h.coef_range(lo, lo + len(expected) - 1), expected, atol=1e-12)


@given(polys, polys, coef, coef)
def test_linear_combine_is_coefficientwise(f, g, a, b):
    h = linear_combine([(a, f), (b, g)])
    n = np.arange(-8, 9)
    np.testing.assert_allclose(h.coef(n), a * f.coef(n) + b * g.coef(n), atol=1e-12)


@given(polys)
def test_sup_norm_bound_dominates_grid(f):
    t = np.linspace(0, 2 * np.pi, 257)
    assert np.max(np.abs(f.evaluate(t))) <= f.sup_norm_bound * (1 + 1e-12) + 1e-12


@given(polys)
def test_conj_family_relations(f):
    n = np.arange(-7, 8)
    tt = conj_family(conj_family(f, "tilde"), "tilde")
    np.testing.assert_allclose(tt.coef(n), f.coef(n))
    star = conj_family(f, "star")
    np.testing.assert_allclose(star.coef(n), conj_family(conj_family(f, "conj"), "tilde").coef(n))
    np.testing.assert_allclose(star.coef(n), np.conj(f.coef(n)))
    # conj of the function: values are complex conjugates on the circle
    t = np.linspace(0, 2 * np.pi, 11)
    np.testing.assert_allclose(conj_family(f, "conj").evaluate(t), np.conj(f.evaluate(t)), atol=1e-12)


def test_step_conj_family_keeps_closed_form():
    a = arc_indicator(0.2, 1.0)
    t = conj_family(a, "tilde")
    assert t.steps is not None
    np.testing.assert_allclose(t.coef(np.arange(-5, 6)), arc_indicator(-1.0, -0.2).coef(np.arange(-5, 6)), atol=1e-15)


@pytest.mark.parametrize("r", [0.5, 0.9, 0.99])
def test_kernel_tail_is_exact(r):
    z = r * np.exp(0.7j)
    k = kernel_vector(z, eps=1e-10)
    N = len(k)
    assert k.tail_bound == pytest.approx(r**N, rel=1e-14)
    assert abs(k.norm() ** 2 + k.tail_bound**2 - 1) < 1e-13
    assert k.tail_bound <= 1e-10


def test_kernel_reproduces_values():
    z = 0.4 + 0.3j
    k = kernel_vector(z, eps=1e-16)
    h = np.array([1.0, -2.0, 0.5j])  # h(w) = 1 - 2w + 0.5i w^2
    inner = np.vdot(k.entries[:3], h)
    value = 1 - 2 * z + 0.5j * z**2
    assert inner == pytest.approx(math.sqrt(1 - abs(z) ** 2) * value, abs=1e-14)


def test_riesz_projection_and_tails():
    f = trigpoly({-3: 1, 0: 2, 5: 3})
    v = riesz_project(f, 4)
    np.testing.assert_allclose(v.entries, [2, 0, 0, 0])
    assert v.tail_bound == pytest.approx(3.0)
    assert positive_tail_l2(f, 6) == 0.0
    assert negative_tail_l2(f, 3) == pytest.approx(1.0)
    d = decay_symbol(2)
    exact = math.sqrt(sum(n**-4.0 for n in range(10, 200_000)))
    assert negative_tail_l2(d, 10) >= exact


@given(st.lists(coef, min_size=1, max_size=8), st.integers(-5, 5))
def test_flip_is_involution(vals, lo):
    h = Laurent(lo, np.array(vals, dtype=complex))
    back = flip_u(flip_u(h))
    assert back.lo == h.lo
    np.testing.assert_array_equal(back.values, h.values)
    once = flip_u(h)
    assert once.coef(np.array([-lo - 1]))[0] == h.values[0]


def test_coeff_vector_inner_and_interval():
    v = CoeffVector(np.array([3, 4]), 0.5)
    assert v.norm() == 5
    assert v.norm_interval() == (4.5, 5.5)
    with pytest.raises(SymbolError):
        CoeffVector(np.zeros(2), -1)


@given(disk)
def test_kernel_unit_norm(z):
    k = kernel_vector(z, eps=1e-14)
    assert math.hypot(k.norm(), k.tail_bound) == pytest.approx(1.0, abs=1e-12)


def test_constant_operations():
    assert (constant(2) * constant(3)).coeffs == {0: 6}
    assert (trigpoly({1: 1}) ** 3).coeffs == {3: 1}
