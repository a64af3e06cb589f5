"""Boundary polynomial recovery as the numerical null vector of a TGPT matrix."""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from functools import partial

import numpy as np

from . import poly2d
from .errors import KernelAmbiguityError, NotAlgebraicError
from .geometry import BoundaryCurve
from .nptensor import TgptMatrix, assemble_np, col_indices, tgpt
from .poly2d import Poly2

log = logging.getLogger(__name__)

AMBIGUITY_RATIO = 0.1
LEADING_REL_TOL = 1e-6
SCAN_THRESHOLD = 1e-3
# singular values below this fraction of the largest are round-off
KERNEL_RTOL = 1e-11


@dataclass
class Diagnostics:
    singular_values: np.ndarray
    gap_ratio: float
    constant_term: float = 0.0
    leading_index: tuple = ()
    warnings: list = field(default_factory=list)

    @property
    def kernel_dim(self) -> int:
        """Number of singular values at round-off level (at least 1)."""
        s = self.singular_values
        return max(1, int(np.sum(s <= KERNEL_RTOL * s[0]))) if len(s) else 1

    @property
    def ambiguous(self) -> bool:
        return self.gap_ratio > AMBIGUITY_RATIO or self.kernel_dim > 1

    def to_dict(self) -> dict:
        return {
            "singular_values": [float(s) for s in self.singular_values],
            "gap_ratio": float(self.gap_ratio),
            "kernel_dim": self.kernel_dim,
            "constant_term_before_zeroing": float(self.constant_term),
            "leading_index": list(self.leading_index),
            "warnings": list(self.warnings),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def _gap_ratio(s: np.ndarray) -> float:
    if len(s) < 2:
        return 1.0
    return float(s[-1] / s[-2]) if s[-2] > 0 else 1.0


def column_vector(p: Poly2, d: int) -> np.ndarray:
    """Coefficients of ``p`` laid out in TGPT column order (no constant term)."""
    return np.array([p.coeff(b) for b in col_indices(d)])


def poly_from_columns(v: np.ndarray, d: int) -> Poly2:
    return Poly2.from_terms({tuple(b): float(x) for b, x in zip(col_indices(d), v)}, d)


def recover_coefficients(T: TgptMatrix, d: int | None = None, *, strict: bool = True):
    """Normalized polynomial spanning the (numerical) kernel of ``T``.

    Returns ``(poly, diagnostics)``. With ``strict`` an ambiguous kernel raises
    :class:`KernelAmbiguityError`; otherwise the condition is recorded as a
    warning. The kernel is ambiguous when the two smallest singular values lie
    within a factor 10, or when more than one of them is at round-off level.
    """
    d = T.d if d is None else d
    if d != T.d:
        raise ValueError(f"TGPT has order {T.d}, expected {d}")
    _, s, vt = np.linalg.svd(T.entries)
    v = vt[-1]
    gap = _gap_ratio(s)
    diag = Diagnostics(singular_values=s, gap_ratio=gap)
    if diag.ambiguous:
        if diag.kernel_dim > 1:
            why = f"{diag.kernel_dim} singular values are at round-off level"
        else:
            why = (f"smallest singular values {s[-1]:.3e} and {s[-2]:.3e} differ by less "
                   f"than a factor {1 / AMBIGUITY_RATIO:g} (gap ratio {gap:.3g})")
        msg = (f"kernel ambiguity: {why}; lambda may be near an exceptional value "
               "or the degree is wrong")
        if strict:
            raise KernelAmbiguityError(msg, gap_ratio=gap, singular_values=s)
        diag.warnings.append(msg)
        log.warning(msg)
    # the TGPT has no constant column, so the constant term is structurally absent;
    # g(0) = 0 fixes it to zero
    p = poly_from_columns(v, d)
    i = poly2d.leading_index(p, LEADING_REL_TOL)
    diag.leading_index = tuple(int(k) for k in poly2d.multi_index(i))
    return poly2d.normalize(p, LEADING_REL_TOL), diag


def residual(T: TgptMatrix, p: Poly2) -> float:
    """Relative kernel residual ``|T p| / (|T|_F |p|)``."""
    if p.degree > T.d:
        raise ValueError(f"polynomial degree {p.degree} exceeds TGPT order {T.d}")
    v = column_vector(p, T.d)
    denom = np.linalg.norm(T.entries) * np.linalg.norm(v)
    if denom == 0:
        raise ValueError("zero TGPT or zero polynomial")
    return float(np.linalg.norm(T.entries @ v) / denom)


@dataclass
class DegreeScan:
    d: int
    ratios: dict

    def to_dict(self) -> dict:
        return {"d": self.d, "ratios": {str(k): v for k, v in self.ratios.items()}}


def degree_scan(source, d_max: int, threshold: float = SCAN_THRESHOLD,
                contrast=1.0) -> DegreeScan:
    """Smallest order whose TGPT has a clear one-dimensional numerical kernel.

    ``source`` is a :class:`BoundaryCurve` (forward-solved at ``contrast``), a
    callable ``d -> TgptMatrix``, or one high-order TGPT from which lower
    orders are cut out.
    """
    if d_max < 1:
        raise ValueError("d_max must be >= 1")
    if isinstance(source, BoundaryCurve):
        op = assemble_np(source)
        source = partial(tgpt, op, contrast)
    ratios = {}
    for d in range(1, d_max + 1):
        T = _tgpt_of_order(source, d)
        s = np.linalg.svd(T.entries, compute_uv=False)
        ratios[d] = _gap_ratio(s)
        if ratios[d] < threshold:
            return DegreeScan(d, ratios)
    raise NotAlgebraicError(
        f"no order up to {d_max} has a kernel gap ratio below {threshold:g}: {ratios}"
    )


def truncate(T: TgptMatrix, d: int) -> TgptMatrix:
    """Lower-order TGPT contained in ``T`` (rows ``|alpha| <= 2d``, columns ``|beta| <= d``)."""
    if d > T.d:
        raise ValueError("cannot raise the order of a TGPT")
    r = TgptMatrix.n_rows(d)
    c = TgptMatrix.n_cols(d)
    return TgptMatrix(d, T.lam, T.entries[:r, :c])


def _tgpt_of_order(source, d: int) -> TgptMatrix:
    if isinstance(source, TgptMatrix):
        return truncate(source, d)
    return source(d)
