"""Nystrom discretization of the Neumann-Poincare operator and GPT assembly.

The adjoint double-layer kernel ``<x - y, nu(x)> / (2 pi |x - y|^2)`` is
continuous on a smooth closed curve, with diagonal limit ``kappa(x) / (4 pi)``,
so the periodic trapezoidal rule on the curve nodes converges spectrally.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from functools import cached_property

import numpy as np
import scipy.linalg as sla

from . import _kernels
from .errors import SolveError
from .geometry import BoundaryCurve
from .poly2d import MultiIndex

COND_LIMIT = 1e12


@dataclass(frozen=True)
class Contrast:
    """Contrast ``lam``; valid when ``|lam| > 1/2``."""

    lam: float

    def __post_init__(self):
        if not abs(self.lam) > 0.5:
            raise ValueError(f"contrast |lambda| must exceed 1/2, got {self.lam}")

    @classmethod
    def from_conductivity(cls, k: float) -> "Contrast":
        if k <= 0 or k == 1:
            raise ValueError("conductivity must be positive and different from 1")
        return cls((k + 1) / (2 * (k - 1)))

    @property
    def mu(self) -> float:
        return 1.0 / self.lam


def _as_contrast(contrast) -> Contrast:
    return contrast if isinstance(contrast, Contrast) else Contrast(float(contrast))


@dataclass(frozen=True, eq=False)
class NpOperator:
    matrix: np.ndarray
    curve: BoundaryCurve

    def __post_init__(self):
        m = np.array(self.matrix, dtype=float)
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    @cached_property
    def _factors(self) -> dict:
        return {}

    def factor(self, lam: float):
        """Cached LU factorization of ``lam I - K`` with its condition estimate."""
        cache = self._factors
        if lam not in cache:
            a = lam * np.eye(self.n) - self.matrix
            lu = sla.lu_factor(a, check_finite=False)
            anorm = np.linalg.norm(a, 1)
            rcond = _rcond(lu, anorm)
            cond = np.inf if rcond == 0 else 1.0 / rcond
            if not np.isfinite(cond) or cond > COND_LIMIT:
                raise SolveError(
                    f"lambda={lam} is numerically in the spectrum (condition ~ {cond:.3g})",
                    condition=cond,
                )
            cache[lam] = (lu, a, cond)
        return cache[lam]


def _rcond(lu, anorm) -> float:
    gecon = sla.get_lapack_funcs("gecon", (lu[0],))
    rcond, info = gecon(lu[0], anorm, norm="1")
    return float(rcond) if info == 0 else 0.0


def assemble_np(curve: BoundaryCurve) -> NpOperator:
    """Nystrom matrix of the Neumann-Poincare operator on ``curve``."""
    nodes = np.ascontiguousarray(curve.nodes)
    d = np.diff(np.vstack([nodes, nodes[:1]]), axis=0)
    if np.any(np.hypot(d[:, 0], d[:, 1]) == 0.0):
        raise ValueError("coincident consecutive nodes")
    k = _kernels.backend.assemble(
        nodes,
        np.ascontiguousarray(curve.normals),
        np.ascontiguousarray(curve.curvature),
        np.ascontiguousarray(curve.weights),
    )
    if not np.all(np.isfinite(k)):
        raise ValueError("coincident nodes produce a singular kernel")
    return NpOperator(k, curve)


def source_term(curve: BoundaryCurve, alpha) -> np.ndarray:
    """``nu . grad(x**alpha)`` at the nodes."""
    a1, a2 = int(alpha[0]), int(alpha[1])
    x, y = curve.nodes[:, 0], curve.nodes[:, 1]
    gx = a1 * x ** max(a1 - 1, 0) * y**a2 if a1 > 0 else np.zeros_like(x)
    gy = a2 * x**a1 * y ** max(a2 - 1, 0) if a2 > 0 else np.zeros_like(y)
    return curve.normals[:, 0] * gx + curve.normals[:, 1] * gy


def solve_density(op: NpOperator, contrast, alpha=None, rhs=None) -> np.ndarray:
    """Solve ``(lam I - K) phi = nu . grad(x**alpha)``.

    ``rhs`` may be given directly (one column or several) in place of ``alpha``.
    """
    lam = _as_contrast(contrast).lam
    if rhs is None:
        if alpha is None or alpha[0] + alpha[1] < 1:
            raise ValueError("alpha must have degree >= 1")
        rhs = source_term(op.curve, alpha)
    rhs = np.asarray(rhs, dtype=float)
    lu, a, cond = op.factor(lam)
    phi = sla.lu_solve(lu, rhs, check_finite=False)
    res = a @ phi - rhs
    scale = np.max(np.abs(rhs), axis=0)
    bad = np.max(np.abs(res), axis=0) > 1e-10 * np.where(scale > 0, scale, 1.0)
    if np.any(bad):
        # one step of iterative refinement before giving up
        phi = phi - sla.lu_solve(lu, res, check_finite=False)
        res = a @ phi - rhs
        if np.any(np.max(np.abs(res), axis=0) > 1e-10 * np.where(scale > 0, scale, 1.0)):
            raise SolveError(f"density solve residual too large (condition ~ {cond:.3g})", cond)
    return phi


def monomials(curve: BoundaryCurve, betas) -> np.ndarray:
    x, y = curve.nodes[:, 0], curve.nodes[:, 1]
    return np.stack([x ** b[0] * y ** b[1] for b in betas], axis=1)


def gpt(op: NpOperator, contrast, alpha, beta) -> float:
    """Generalized polarization tensor ``M_{alpha beta}``."""
    if beta[0] + beta[1] < 1:
        raise ValueError("beta must have degree >= 1")
    phi = solve_density(op, contrast, alpha)
    y = op.curve.nodes
    return float(np.sum(y[:, 0] ** beta[0] * y[:, 1] ** beta[1] * phi * op.curve.weights))


def gpt_mu_form(op: NpOperator, mu: float, alpha, beta) -> float:
    """``int y**beta (I - mu K)^{-1}[nu . grad x**alpha]``; equals ``M(1/mu) / mu``."""
    a = np.eye(op.n) - mu * op.matrix
    phi = np.linalg.solve(a, source_term(op.curve, alpha))
    y = op.curve.nodes
    return float(np.sum(y[:, 0] ** beta[0] * y[:, 1] ** beta[1] * phi * op.curve.weights))


def block_indices(m: int) -> list[MultiIndex]:
    """Tessera ordering inside a degree block: ``(m,0), (m-1,1), ..., (0,m)``."""
    return [MultiIndex(m - i, i) for i in range(m + 1)]


def row_indices(d: int) -> list[MultiIndex]:
    return [a for m in range(1, 2 * d + 1) for a in block_indices(m)]


def col_indices(d: int) -> list[MultiIndex]:
    return [b for n in range(1, d + 1) for b in block_indices(n)]


def _gpt_block(op: NpOperator, contrast, alphas, betas) -> np.ndarray:
    rhs = np.stack([source_term(op.curve, a) for a in alphas], axis=1)
    phi = solve_density(op, contrast, rhs=rhs)
    yb = monomials(op.curve, betas) * op.curve.weights[:, None]
    return phi.T @ yb


def tessera(op: NpOperator, contrast, m: int, n: int) -> np.ndarray:
    """``(m+1) x (n+1)`` block of GPTs with ``|alpha| = m``, ``|beta| = n``."""
    if m < 1 or n < 1:
        raise ValueError("tessera orders must be >= 1")
    return _gpt_block(op, contrast, block_indices(m), block_indices(n))


@dataclass(frozen=True, eq=False)
class TgptMatrix:
    """Tesselated GPT of order ``d``: rows ``1 <= |alpha| <= 2d``, columns ``1 <= |beta| <= d``."""

    d: int
    lam: float
    entries: np.ndarray

    def __post_init__(self):
        e = np.array(self.entries, dtype=float)
        if e.shape != (self.n_rows(self.d), self.n_cols(self.d)):
            raise ValueError(
                f"TGPT of order {self.d} must be {self.n_rows(self.d)}x{self.n_cols(self.d)}, got {e.shape}"
            )
        e.flags.writeable = False
        object.__setattr__(self, "entries", e)

    @staticmethod
    def n_rows(d: int) -> int:
        return sum(m + 1 for m in range(1, 2 * d + 1))

    @staticmethod
    def n_cols(d: int) -> int:
        return sum(n + 1 for n in range(1, d + 1))

    @property
    def shape(self) -> tuple[int, int]:
        return self.entries.shape

    @property
    def rows(self) -> list[MultiIndex]:
        return row_indices(self.d)

    @property
    def cols(self) -> list[MultiIndex]:
        return col_indices(self.d)

    def block(self, m: int, n: int) -> np.ndarray:
        r0 = sum(k + 1 for k in range(1, m))
        c0 = sum(k + 1 for k in range(1, n))
        return self.entries[r0:r0 + m + 1, c0:c0 + n + 1]

    def first_order(self) -> "TgptMatrix":
        """Blocks ``m in {1, 2}``, ``n = 1``: the order-1 TGPT."""
        return TgptMatrix(1, self.lam, self.entries[:5, :2])

    def with_entries(self, entries) -> "TgptMatrix":
        return TgptMatrix(self.d, self.lam, entries)

    def to_dict(self) -> dict:
        r, c = self.shape
        return {"d": self.d, "lambda": self.lam, "rows": r, "cols": c,
                "entries": [float(v) for v in self.entries.ravel()]}

    @classmethod
    def from_dict(cls, data: dict) -> "TgptMatrix":
        e = np.array(data["entries"], dtype=float).reshape(int(data["rows"]), int(data["cols"]))
        return cls(int(data["d"]), float(data["lambda"]), e)

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["alpha\\beta"] + [f"{b.a1}_{b.a2}" for b in self.cols])
        for a, row in zip(self.rows, self.entries):
            w.writerow([f"{a.a1}_{a.a2}"] + [repr(float(v)) for v in row])
        return buf.getvalue()


def tgpt(op: NpOperator, contrast, d: int) -> TgptMatrix:
    """Stack tesserae ``m = 1..2d`` by ``n = 1..d`` (one LU factorization for all rows)."""
    if d < 1:
        raise ValueError("order d must be >= 1")
    c = _as_contrast(contrast)
    return TgptMatrix(d, c.lam, _gpt_block(op, c, row_indices(d), col_indices(d)))


def forward_tgpt(curve: BoundaryCurve, contrast, d: int) -> TgptMatrix:
    return tgpt(assemble_np(curve), contrast, d)
