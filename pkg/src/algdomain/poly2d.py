"""Bivariate real polynomials in graded-lexicographic coefficient storage.

Monomials ``x1**a1 * x2**a2`` are ordered first by total degree, then by the
exponent of ``x1`` (ascending), so the degree-2 block reads
``x2**2, x1*x2, x1**2``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, NamedTuple

import numpy as np


class MultiIndex(NamedTuple):
    a1: int
    a2: int

    @property
    def degree(self) -> int:
        return self.a1 + self.a2


def n_terms(degree: int) -> int:
    """Number of monomials of total degree at most ``degree``."""
    return (degree + 1) * (degree + 2) // 2


def ordinal(alpha) -> int:
    a1, a2 = int(alpha[0]), int(alpha[1])
    if a1 < 0 or a2 < 0:
        raise ValueError(f"negative exponent in {alpha!r}")
    n = a1 + a2
    return n * (n + 1) // 2 + a1


def multi_index(i: int) -> MultiIndex:
    if i < 0:
        raise ValueError(f"ordinal must be non-negative, got {i}")
    n = int((np.sqrt(8 * i + 1) - 1) // 2)
    # guard the float sqrt at block boundaries
    while n * (n + 1) // 2 > i:
        n -= 1
    while (n + 1) * (n + 2) // 2 <= i:
        n += 1
    a1 = i - n * (n + 1) // 2
    return MultiIndex(a1, n - a1)


def exponents(degree: int) -> tuple[np.ndarray, np.ndarray]:
    """Exponent arrays ``(ex, ey)`` for all monomials up to ``degree``, in storage order."""
    idx = [multi_index(i) for i in range(n_terms(degree))]
    ex = np.array([m.a1 for m in idx], dtype=np.int64)
    ey = np.array([m.a2 for m in idx], dtype=np.int64)
    return ex, ey


@dataclass(frozen=True, eq=False)
class Poly2:
    """Real polynomial ``sum_alpha c_alpha x**alpha`` of degree at most ``degree``."""

    degree: int
    coeffs: np.ndarray

    def __post_init__(self):
        if self.degree < 0:
            raise ValueError("degree must be non-negative")
        c = np.array(self.coeffs, dtype=float).ravel()
        if c.size != n_terms(self.degree):
            raise ValueError(
                f"degree {self.degree} needs {n_terms(self.degree)} coefficients, got {c.size}"
            )
        c.flags.writeable = False
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def from_terms(cls, terms: dict, degree: int | None = None) -> "Poly2":
        """Build from ``{(a1, a2): c}``."""
        if degree is None:
            degree = max((a1 + a2 for a1, a2 in terms), default=0)
        c = np.zeros(n_terms(degree))
        for alpha, v in terms.items():
            c[ordinal(alpha)] += v
        return cls(degree, c)

    @property
    def exps(self) -> tuple[np.ndarray, np.ndarray]:
        return exponents(self.degree)

    def coeff(self, alpha) -> float:
        i = ordinal(alpha)
        return float(self.coeffs[i]) if i < self.coeffs.size else 0.0

    def terms(self) -> dict:
        return {multi_index(i): float(v) for i, v in enumerate(self.coeffs) if v != 0.0}

    def __call__(self, x, y=None):
        return evaluate(self, x, y)

    def __mul__(self, other: "Poly2") -> "Poly2":
        out: dict = {}
        for a, ca in self.terms().items():
            for b, cb in other.terms().items():
                key = (a[0] + b[0], a[1] + b[1])
                out[key] = out.get(key, 0.0) + ca * cb
        return Poly2.from_terms(out, self.degree + other.degree)

    def __add__(self, other: "Poly2") -> "Poly2":
        d = max(self.degree, other.degree)
        return Poly2(d, _pad(self.coeffs, d) + _pad(other.coeffs, d))

    def scale(self, s: float) -> "Poly2":
        return Poly2(self.degree, self.coeffs * s)

    def with_degree(self, degree: int) -> "Poly2":
        """Same polynomial stored with a larger (or trimmed) coefficient vector."""
        if degree < self.degree and np.any(self.coeffs[n_terms(degree):] != 0):
            raise ValueError("cannot drop nonzero high-degree terms")
        return Poly2(degree, _pad(self.coeffs, degree))

    def to_dict(self) -> dict:
        return {
            "degree": self.degree,
            "coeffs": [
                {"alpha": [int(m.a1), int(m.a2)], "c": float(v)}
                for m, v in ((multi_index(i), v) for i, v in enumerate(self.coeffs))
                if v != 0.0
            ],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Poly2":
        terms = {tuple(t["alpha"]): float(t["c"]) for t in data["coeffs"]}
        return cls.from_terms(terms, int(data["degree"]))

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    def __repr__(self) -> str:
        parts = [f"{v:+.6g}*x^{m.a1}y^{m.a2}" for m, v in self.terms().items()]
        return f"Poly2(deg={self.degree}: {' '.join(parts) or '0'})"


def _pad(c: np.ndarray, degree: int) -> np.ndarray:
    out = np.zeros(n_terms(degree))
    m = min(c.size, out.size)
    out[:m] = c[:m]
    return out


def _powers(v: np.ndarray, degree: int) -> np.ndarray:
    p = np.ones((degree + 1,) + v.shape)
    for k in range(1, degree + 1):
        p[k] = p[k - 1] * v
    return p


def _split(x, y):
    if y is None:
        pts = np.asarray(x, dtype=float)
        return pts[..., 0], pts[..., 1]
    return np.asarray(x, dtype=float), np.asarray(y, dtype=float)


def evaluate(p: Poly2, x, y=None):
    """Evaluate at a point ``(x, y)``, or at an ``(..., 2)`` array of points."""
    xs, ys = _split(x, y)
    ex, ey = p.exps
    px, py = _powers(xs, p.degree), _powers(ys, p.degree)
    val = np.tensordot(p.coeffs, px[ex] * py[ey], axes=1)
    return float(val) if np.ndim(val) == 0 else val


def gradient(p: Poly2, x, y=None) -> np.ndarray:
    """Exact gradient; shape ``(..., 2)``."""
    xs, ys = _split(x, y)
    ex, ey = p.exps
    d = p.degree
    px, py = _powers(xs, d), _powers(ys, d)
    c = p.coeffs
    gx = np.tensordot(c * ex, px[np.maximum(ex - 1, 0)] * py[ey], axes=1)
    gy = np.tensordot(c * ey, px[ex] * py[np.maximum(ey - 1, 0)], axes=1)
    return np.stack([gx, gy], axis=-1)


def hessian(p: Poly2, x, y=None) -> np.ndarray:
    """Exact Hessian; shape ``(..., 2, 2)``."""
    xs, ys = _split(x, y)
    ex, ey = p.exps
    d = p.degree
    px, py = _powers(xs, d), _powers(ys, d)
    c = p.coeffs
    hxx = np.tensordot(c * ex * (ex - 1), px[np.maximum(ex - 2, 0)] * py[ey], axes=1)
    hyy = np.tensordot(c * ey * (ey - 1), px[ex] * py[np.maximum(ey - 2, 0)], axes=1)
    hxy = np.tensordot(c * ex * ey, px[np.maximum(ex - 1, 0)] * py[np.maximum(ey - 1, 0)], axes=1)
    return np.stack([np.stack([hxx, hxy], -1), np.stack([hxy, hyy], -1)], -2)


def leading_index(p: Poly2, rel_tol: float = 1e-12) -> int:
    """Storage ordinal of the graded-lex maximal coefficient above ``rel_tol * max|c|``."""
    c = p.coeffs
    scale = np.max(np.abs(c)) if c.size else 0.0
    if scale == 0.0:
        raise ValueError("zero polynomial has no leading coefficient")
    nz = np.flatnonzero(np.abs(c) > rel_tol * scale)
    return int(nz[-1])


def normalize(p: Poly2, rel_tol: float = 1e-12) -> Poly2:
    """Divide by the coefficient at the graded-lex maximal nonzero index."""
    i = leading_index(p, rel_tol)
    c = p.coeffs / p.coeffs[i]
    # entries below the threshold beyond the leading index are noise
    c[i + 1:] = 0.0
    return Poly2(p.degree, c)


def circle(center, radius: float) -> Poly2:
    """``(x - cx)**2 + (y - cy)**2 - r**2``."""
    cx, cy = center
    return Poly2.from_terms(
        {(2, 0): 1.0, (0, 2): 1.0, (1, 0): -2 * cx, (0, 1): -2 * cy,
         (0, 0): cx * cx + cy * cy - radius * radius},
        2,
    )


def line(point, direction) -> Poly2:
    """Affine polynomial vanishing on the line through ``point`` along ``direction``."""
    px, py = point
    dx, dy = direction
    # normal (-dy, dx)
    return Poly2.from_terms({(1, 0): -dy, (0, 1): dx, (0, 0): dy * px - dx * py}, 1)


def product(factors: Iterable[Poly2]) -> Poly2:
    out = Poly2(0, [1.0])
    for f in factors:
        out = out * f
    return out
