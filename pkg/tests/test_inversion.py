import json

import numpy as np
import pytest

from algdomain import inversion
from algdomain.errors import KernelAmbiguityError, NotAlgebraicError
from algdomain.geometry import ShapeSpec, make_shape
from algdomain.inversion import degree_scan, recover_coefficients, residual, truncate
from algdomain.nptensor import TgptMatrix
from algdomain.poly2d import Poly2


def test_circle_round_trip(tgpt_of):
    p, diag = recover_coefficients(tgpt_of("circle-through-origin", 2))
    want = Poly2.from_terms({(2, 0): 1.0, (0, 2): 1.0, (1, 0): -2.0})
    assert np.max(np.abs(p.coeffs - want.coeffs)) < 1e-10
    assert diag.gap_ratio < 1e-10 and not diag.ambiguous
    assert diag.leading_index == (2, 0)


def test_overlap_round_trip(tgpt_of):
    spec = ShapeSpec("two-overlapping-circles")
    p, _ = recover_coefficients(tgpt_of("two-overlapping-circles", 4))
    assert np.max(np.abs(p.coeffs - spec.polynomial().coeffs)) < 1e-6


@pytest.mark.parametrize("lam", [1.0, -0.75, 4.0])
def test_kernel_independent_of_contrast(tgpt_of, lam):
    p, _ = recover_coefficients(tgpt_of("ellipse", 2, lam=lam))
    assert np.allclose(p.coeffs, ShapeSpec("ellipse").polynomial().coeffs, atol=1e-9)


def test_true_polynomial_has_tiny_residual(tgpt_of):
    for kind, d in (("circle-through-origin", 2), ("two-overlapping-circles", 4)):
        t = tgpt_of(kind, d)
        assert residual(t, ShapeSpec(kind).polynomial()) < 1e-12
    # a wrong polynomial does not
    t = tgpt_of("circle-through-origin", 2)
    assert residual(t, ShapeSpec("ellipse").polynomial()) > 1e-3


def test_residual_rejects_degree_overflow(tgpt_of):
    with pytest.raises(ValueError):
        residual(tgpt_of("circle-through-origin", 2), ShapeSpec("two-overlapping-circles").polynomial())


def test_overshooting_degree_is_ambiguous(tgpt_of):
    t = tgpt_of("circle-through-origin", 3)
    with pytest.raises(KernelAmbiguityError) as err:
        recover_coefficients(t)
    assert "kernel ambiguity" in str(err.value)
    p, diag = recover_coefficients(t, strict=False)
    assert diag.ambiguous and diag.kernel_dim == 3 and diag.warnings


def test_non_algebraic_shape_is_ambiguous_at_low_degree(tgpt_of):
    t = tgpt_of("flower", 2)
    with pytest.raises(KernelAmbiguityError) as err:
        recover_coefficients(t)
    assert err.value.gap_ratio > inversion.AMBIGUITY_RATIO


def test_degree_scan_picks_minimal_degree(tgpt_of):
    assert degree_scan(tgpt_of("circle-through-origin", 4), 4).d == 2
    assert degree_scan(tgpt_of("two-overlapping-circles", 5), 5).d == 4
    curve = make_shape(ShapeSpec("ellipse"), 256)
    scan = degree_scan(curve, 3, contrast=1.5)
    assert scan.d == 2 and scan.ratios[1] > 1e-3
    assert json.loads(json.dumps(scan.to_dict()))["d"] == 2


def test_degree_scan_reports_non_algebraic(tgpt_of):
    with pytest.raises(NotAlgebraicError):
        degree_scan(tgpt_of("flower", 3), 3)


def test_truncate_agrees_with_direct_computation(tgpt_of):
    t4 = tgpt_of("ellipse", 4)
    t2 = tgpt_of("ellipse", 2)
    assert np.array_equal(truncate(t4, 2).entries, t2.entries)
    with pytest.raises(ValueError):
        truncate(t2, 3)


def test_column_layout_roundtrip():
    p = ShapeSpec("two-overlapping-circles").polynomial()
    v = inversion.column_vector(p, 4)
    assert len(v) == TgptMatrix.n_cols(4)
    q = inversion.poly_from_columns(v, 4)
    assert np.array_equal(q.coeffs, p.coeffs)


def test_diagnostics_json(tgpt_of):
    _, diag = recover_coefficients(tgpt_of("circle-through-origin", 2))
    d = json.loads(diag.to_json())
    assert d["constant_term_before_zeroing"] == 0.0 and d["kernel_dim"] == 1
    assert len(d["singular_values"]) == 5
