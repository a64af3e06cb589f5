"""Following the zero set of a polynomial and locating its singular points.

Tracing integrates the unit-speed rotated gradient with RK4 and projects each
step back onto ``{P = 0}``. Singular (bifurcation) points are critical points
of ``P`` lying on the zero set; the segmentation points around each one are
the zeros of ``P`` on a small circle centred there.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass

import numpy as np

from . import _kernels, poly2d
from ._kernels import STATUS_NAMES
from .errors import LevelSetError
from .geometry import svg_polylines
from .poly2d import Poly2

log = logging.getLogger(__name__)

T_STEP = 1e-3
TOL_PO = 1e-2
R_INI = 0.05
R_STEP = 0.01
N_CIRCLE = 1000
BOX = (-3.0, 3.0)
BOUND = 10.0
MAX_STEPS = 10**6
SING_TOL = 1e-2
NEWTON_TOL = 1e-10
STAGNATION = 1e-12
TOL_BIF = 1e-6
TOL_CLUSTER = 1e-4
GRID = 64
MAX_ESCALATION = 10


def _scale(p: Poly2) -> float:
    s = float(np.max(np.abs(p.coeffs)))
    if s == 0.0:
        raise LevelSetError("the zero polynomial has no level set")
    return s


def hamiltonian(p: Poly2, x) -> np.ndarray:
    """Rotated gradient ``(-P_y, P_x)``; tangent to the level set."""
    g = poly2d.gradient(p, x)
    return np.stack([-g[..., 1], g[..., 0]], axis=-1)


@dataclass(frozen=True, eq=False)
class TraceResult:
    polyline: np.ndarray
    hit_target: int | None
    arclength: float
    terminated_by: str

    @property
    def stagnated(self) -> bool:
        return self.terminated_by == "singular"

    def to_dict(self) -> dict:
        return {
            "polyline": self.polyline.tolist(),
            "hit_target": self.hit_target,
            "arclength": self.arclength,
            "terminated_by": self.terminated_by,
        }


def refine_onto(p: Poly2, x0, tol: float = NEWTON_TOL, maxit: int = 50) -> np.ndarray:
    """Newton along the gradient until ``|P| <= tol * |c|_inf``."""
    s = _scale(p)
    x = np.array(x0, dtype=float)
    for _ in range(maxit):
        v = poly2d.evaluate(p, x)
        if abs(v) <= tol * s:
            return x
        g = poly2d.gradient(p, x)
        g2 = float(g @ g)
        if g2 < (STAGNATION * s) ** 2:
            break
        x = x - v * g / g2
    if abs(poly2d.evaluate(p, x)) <= 1e-6 * s:
        return x
    raise LevelSetError(f"start point {tuple(np.round(x0, 6))} cannot be refined onto the level set")


def trace(p: Poly2, p0, targets=None, direction: int = 1, t_step: float = T_STEP,
          tol_po: float = TOL_PO, bound: float = BOUND, *, max_steps: int = MAX_STEPS,
          sing_tol: float = SING_TOL, max_len: float = 0.0,
          newton_tol: float = NEWTON_TOL) -> TraceResult:
    """Follow ``{P = 0}`` from ``p0`` until a target is reached.

    The proximity test is armed only after ``5 * tol_po`` of arclength so a
    trace cannot stop where it starts. On a hit the trace lands on the point
    of the curve nearest the target. ``max_len > 0`` caps the arclength
    exactly.
    """
    if direction not in (1, -1):
        raise ValueError("direction must be +1 or -1")
    if t_step <= 0 or tol_po <= 0:
        raise ValueError("t_step and tol_po must be positive")
    s = _scale(p)
    x0 = refine_onto(p, p0, newton_tol)
    tg = np.zeros((0, 2)) if targets is None else np.asarray(targets, dtype=float).reshape(-1, 2)
    ex, ey, c, deg = _kernels.poly_arrays(p)
    pts, status, hit, arclen = _kernels.backend.trace(
        ex, ey, c, deg, float(x0[0]), float(x0[1]), np.ascontiguousarray(tg),
        float(direction), float(t_step), float(tol_po), float(bound), int(max_steps),
        5.0 * tol_po, float(sing_tol), float(max_len), newton_tol * s, STAGNATION * s,
    )
    return TraceResult(pts, None if hit < 0 else int(hit), float(arclen), STATUS_NAMES[int(status)])


def check_loop(p: Poly2, t_step: float = T_STEP, tol_po: float = TOL_PO,
               tol: float | None = None, bound: float = BOUND, origin=(0.0, 0.0)):
    """Closed loop through ``origin`` if the level set there is a smooth Jordan curve.

    Returns ``None`` when the trace stagnates at a singular point, leaves the
    bound, or does not come back within ``tol``.
    """
    tol = tol_po if tol is None else tol
    o = np.asarray(origin, dtype=float)
    if abs(poly2d.evaluate(p, o)) > 1e-6 * _scale(p):
        raise LevelSetError(f"origin {tuple(o)} is not on the level set")
    res = trace(p, o, [o], 1, t_step, tol_po, bound)
    if res.terminated_by != "target":
        log.info("check_loop: trace ended by %s after arclength %.4g", res.terminated_by, res.arclength)
        return None
    pts = res.polyline
    if np.linalg.norm(pts[-1] - pts[0]) >= tol:
        return None
    # the landing point duplicates the start
    return pts[:-1].copy()


@dataclass(frozen=True)
class BifurcationPoint:
    x: float
    y: float

    @property
    def position(self) -> np.ndarray:
        return np.array([self.x, self.y])


@dataclass(frozen=True)
class SegmentationPoint:
    x: float
    y: float
    parent: int
    local: int
    radius: float

    @property
    def position(self) -> np.ndarray:
        return np.array([self.x, self.y])

    @property
    def label(self) -> str:
        return f"{self.parent}.{self.local}"


def _cluster(pts: np.ndarray, gn: np.ndarray, tol: float) -> list[np.ndarray]:
    order = np.argsort(gn, kind="stable")
    kept: list[np.ndarray] = []
    for i in order:
        if all(np.hypot(*(pts[i] - q)) >= tol for q in kept):
            kept.append(pts[i])
    return kept


def bifurcation_points(p: Poly2, box=BOX, tol_bif: float = TOL_BIF, *, escalate: bool = False,
                       grid: int = GRID, tol_cluster: float = TOL_CLUSTER) -> list[BifurcationPoint]:
    """Critical points of ``P`` on the zero set inside ``box``.

    Newton on ``grad P = 0`` is seeded from a ``grid x grid`` lattice. Both
    ``|P|`` and ``|grad P|`` are tested against ``tol_bif * |c|_inf`` so the
    result does not change when ``P`` is rescaled. With ``escalate`` the
    tolerance doubles (at most 2**10 times) until two points are found.
    """
    a, b = float(box[0]), float(box[1])
    if not a < b:
        raise ValueError("box must satisfy a < b")
    s = _scale(p)
    ex, ey, c, deg = _kernels.poly_arrays(p)
    g = np.linspace(a, b, grid)
    seeds = np.ascontiguousarray(np.stack(np.meshgrid(g, g, indexing="ij"), -1).reshape(-1, 2))
    pts, ok, pval, gnorm = _kernels.backend.critical_points(ex, ey, c, deg, seeds, 100, a, b)
    tol = tol_bif
    for k in range(MAX_ESCALATION + 1):
        keep = ok & (np.abs(pval) < tol * s) & (gnorm < max(tol, 1e-8) * s)
        found = _cluster(pts[keep], gnorm[keep], tol_cluster)
        if not escalate or len(found) >= 2 or k == MAX_ESCALATION:
            break
        tol *= 2.0
        log.warning("bifurcation search: %d point(s) at tol_bif=%.3g, escalating to %.3g",
                    len(found), tol / 2, tol)
    found.sort(key=lambda q: (round(q[0], 8), round(q[1], 8)))
    return [BifurcationPoint(float(q[0]), float(q[1])) for q in found]


def segmentation_points(p: Poly2, bifs, r_ini: float = R_INI, r_step: float = R_STEP,
                        n: int = N_CIRCLE, ptol: float = NEWTON_TOL) -> list[SegmentationPoint]:
    """Zeros of ``P`` on the smallest circle (radius ``r_ini + k * r_step``) with at least 4.

    Sign changes between ``n`` equally spaced samples are refined by
    bisection. Raises :class:`LevelSetError` once the radius exceeds
    ``1000 * r_ini``.
    """
    if not bifs:
        raise ValueError("segmentation needs at least one bifurcation point")
    s = _scale(p)
    ex, ey, c, deg = _kernels.poly_arrays(p)
    out = []
    for i, bp in enumerate(bifs):
        r = r_ini
        while True:
            th = _kernels.backend.circle_zeros(ex, ey, c, deg, bp.x, bp.y, r, n, ptol * s, 200)
            if len(th) >= 4:
                break
            r += r_step
            if r > 1e3 * r_ini:
                raise LevelSetError(
                    f"no 4 level-set crossings around bifurcation point {i} "
                    f"({bp.x:.6g}, {bp.y:.6g}) up to radius {r - r_step:.4g}"
                )
        for k, t in enumerate(th):
            out.append(SegmentationPoint(bp.x + r * np.cos(t), bp.y + r * np.sin(t), i, k, r))
    return out


def to_dict(bifs=(), segs=(), traces=()) -> dict:
    return {
        "bifurcation_points": [[b.x, b.y] for b in bifs],
        "segmentation_points": [
            {"parent": sp.parent, "local": sp.local, "position": [sp.x, sp.y], "radius": sp.radius}
            for sp in segs
        ],
        "traces": [t.to_dict() for t in traces],
    }


def to_json(bifs=(), segs=(), traces=()) -> str:
    return json.dumps(to_dict(bifs, segs, traces))


def to_svg(polylines=(), bifs=(), segs=()) -> str:
    """Level-set branches with bifurcation (red) and segmentation (blue) points."""
    layers = [(pl, {"color": "black"}, False) for pl in polylines if len(pl) > 1]
    if bifs:
        layers.append((np.array([[b.x, b.y] for b in bifs]), {"marker": True, "color": "red"}, False))
    if segs:
        layers.append((np.array([[q.x, q.y] for q in segs]), {"marker": True, "color": "blue"}, False))
    if not layers:
        raise ValueError("nothing to draw")
    return svg_polylines(layers)
