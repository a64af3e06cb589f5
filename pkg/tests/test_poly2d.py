import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from algdomain import poly2d
from algdomain.poly2d import MultiIndex, Poly2
from oracles import finite_gradient, naive_eval

coef = st.floats(-3, 3, allow_nan=False)
point = st.tuples(st.floats(-2, 2), st.floats(-2, 2))


@st.composite
def polys(draw, max_degree=5):
    d = draw(st.integers(0, max_degree))
    c = draw(st.lists(coef, min_size=poly2d.n_terms(d), max_size=poly2d.n_terms(d)))
    return Poly2(d, c)


def test_storage_order_degree_two():
    assert [poly2d.multi_index(i) for i in range(3, 6)] == [(0, 2), (1, 1), (2, 0)]
    assert poly2d.ordinal((1, 0)) == 2
    assert poly2d.n_terms(4) == 15


@given(st.integers(0, 5000))
def test_ordinal_roundtrip(i):
    m = poly2d.multi_index(i)
    assert poly2d.ordinal(m) == i
    assert isinstance(m, MultiIndex) and m.degree == m.a1 + m.a2


def test_negative_indices_rejected():
    with pytest.raises(ValueError):
        poly2d.ordinal((-1, 2))
    with pytest.raises(ValueError):
        poly2d.multi_index(-3)


@given(polys(), point)
def test_evaluate_matches_naive_sum(p, xy):
    terms = {(m.a1, m.a2): v for m, v in p.terms().items()}
    assert p(*xy) == pytest.approx(naive_eval(terms, *xy), rel=1e-12, abs=1e-10)


@given(polys(), point)
def test_gradient_matches_finite_differences(p, xy):
    fd = finite_gradient(lambda x, y: p(x, y), *xy)
    assert np.allclose(poly2d.gradient(p, xy), fd, atol=1e-6 * max(1.0, np.abs(p.coeffs).sum()))


@given(polys(), point)
def test_hessian_matches_finite_differences(p, xy):
    h = 1e-5
    x, y = xy
    gx = lambda a, b: poly2d.gradient(p, (a, b))
    fd = np.column_stack([(gx(x + h, y) - gx(x - h, y)) / (2 * h), (gx(x, y + h) - gx(x, y - h)) / (2 * h)])
    assert np.allclose(poly2d.hessian(p, xy), fd, atol=1e-6 * max(1.0, np.abs(p.coeffs).sum()))


def test_vectorized_shapes():
    p = poly2d.circle((1.0, 0.0), 1.0)
    pts = np.zeros((4, 3, 2))
    assert p(pts).shape == (4, 3)
    assert poly2d.gradient(p, pts).shape == (4, 3, 2)
    assert poly2d.hessian(p, pts).shape == (4, 3, 2, 2)
    assert isinstance(p(0.5, 0.5), float)


@given(polys(3), polys(3), point)
def test_product_and_sum_evaluate_pointwise(p, q, xy):
    assert (p * q)(*xy) == pytest.approx(p(*xy) * q(*xy), rel=1e-9, abs=1e-8)
    assert (p + q)(*xy) == pytest.approx(p(*xy) + q(*xy), rel=1e-12, abs=1e-10)


@given(polys())
def test_json_roundtrip(p):
    q = Poly2.from_dict(json.loads(p.to_json()))
    assert q.degree == p.degree and np.array_equal(q.coeffs, p.coeffs)


def test_coefficients_are_read_only():
    p = poly2d.circle((0, 0), 1)
    with pytest.raises(ValueError):
        p.coeffs[0] = 2.0


def test_wrong_length_rejected():
    with pytest.raises(ValueError):
        Poly2(2, [1.0, 2.0])


def test_normalize_divides_by_graded_lex_leading():
    p = Poly2.from_terms({(1, 0): -4.0, (0, 2): 2.0, (2, 0): 2.0})
    n = poly2d.normalize(p)
    assert n.coeff((2, 0)) == 1.0 and n.coeff((1, 0)) == -2.0
    # (2,0) sorts after (1,1) and (0,2) in the degree-2 block
    q = Poly2.from_terms({(0, 2): 3.0, (1, 1): 1.0})
    assert poly2d.multi_index(poly2d.leading_index(q)) == (1, 1)


def test_normalize_drops_noise_above_leading():
    p = Poly2.from_terms({(1, 0): 1.0, (2, 0): 1e-9}, 2)
    n = poly2d.normalize(p, 1e-6)
    assert n.coeff((2, 0)) == 0.0 and n.coeff((1, 0)) == 1.0


def test_zero_polynomial_has_no_leading_term():
    with pytest.raises(ValueError):
        poly2d.leading_index(Poly2(1, [0, 0, 0]))


@given(st.floats(0, 2 * np.pi))
def test_circle_and_line_vanish_on_their_sets(t):
    c = poly2d.circle((0.3, -0.2), 1.7)
    assert abs(c(0.3 + 1.7 * np.cos(t), -0.2 + 1.7 * np.sin(t))) < 1e-12
    ln = poly2d.line((1.0, 2.0), (np.cos(t), np.sin(t)))
    assert abs(ln(1.0 + 3 * np.cos(t), 2.0 + 3 * np.sin(t))) < 1e-12


def test_with_degree_pads_and_refuses_truncation():
    p = poly2d.circle((1, 0), 1)
    q = p.with_degree(4)
    assert q.degree == 4 and q(0.3, 0.2) == pytest.approx(p(0.3, 0.2))
    with pytest.raises(ValueError):
        p.with_degree(1)
