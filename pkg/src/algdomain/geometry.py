"""Closed boundary curves: the shape library, resampling, containment and distances."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.spatial import cKDTree

from . import poly2d
from .poly2d import Poly2

MIN_NODES = 16
ON_BOUNDARY_TOL = 1e-6


@dataclass(frozen=True, eq=False)
class BoundaryCurve:
    """Counterclockwise closed curve sampled at quadrature nodes.

    ``weights`` are arclength quadrature weights, so ``weights.sum()`` is the
    curve length. ``normals`` point outward.
    """

    nodes: np.ndarray
    tangents: np.ndarray
    normals: np.ndarray
    curvature: np.ndarray
    weights: np.ndarray
    closed: bool = True

    def __post_init__(self):
        n = len(self.nodes)
        if n < MIN_NODES:
            raise ValueError(f"a boundary curve needs at least {MIN_NODES} nodes, got {n}")
        for name in ("nodes", "tangents", "normals", "curvature", "weights"):
            a = np.array(getattr(self, name), dtype=float)
            a.flags.writeable = False
            object.__setattr__(self, name, a)

    @property
    def n(self) -> int:
        return len(self.nodes)

    @property
    def length(self) -> float:
        return float(self.weights.sum())

    @property
    def area(self) -> float:
        """Enclosed area from the divergence theorem, ``0.5 * int x . nu``."""
        return 0.5 * float(np.sum(np.einsum("ij,ij->i", self.nodes, self.normals) * self.weights))

    def to_csv(self) -> str:
        return points_to_csv(self.nodes)


def signed_area(points: np.ndarray) -> float:
    p = np.asarray(points, dtype=float)
    x, y = p[:, 0], p[:, 1]
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


def _frame(d1: np.ndarray, d2: np.ndarray):
    speed = np.hypot(d1[:, 0], d1[:, 1])
    t = d1 / speed[:, None]
    normal = np.stack([t[:, 1], -t[:, 0]], axis=1)
    kappa = (d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0]) / speed**3
    return speed, t, normal, kappa


# -- shape library -------------------------------------------------------------

@dataclass(frozen=True)
class Piece:
    """Smooth parametric piece ``s in [0, 1]`` returning position and two derivatives."""

    func: Callable[[np.ndarray], tuple[np.ndarray, np.ndarray, np.ndarray]]
    periodic: bool = False

    def length(self) -> float:
        s = (np.arange(4096) + 0.5) / 4096
        _, d1, _ = self.func(s)
        return float(np.mean(np.hypot(d1[:, 0], d1[:, 1])))


def arc_piece(center, radius, t0, t1) -> Piece:
    cx, cy = center
    span = t1 - t0

    def f(s):
        t = t0 + span * s
        c, sn = np.cos(t), np.sin(t)
        pos = np.stack([cx + radius * c, cy + radius * sn], 1)
        d1 = np.stack([-radius * sn * span, radius * c * span], 1)
        d2 = np.stack([-radius * c * span**2, -radius * sn * span**2], 1)
        return pos, d1, d2

    return Piece(f, periodic=abs(abs(span) - 2 * np.pi) < 1e-14)


def segment_piece(p0, p1) -> Piece:
    p0 = np.asarray(p0, float)
    p1 = np.asarray(p1, float)

    def f(s):
        pos = p0[None, :] + (p1 - p0)[None, :] * s[:, None]
        d1 = np.broadcast_to(p1 - p0, pos.shape).copy()
        return pos, d1, np.zeros_like(pos)

    return Piece(f)


def curve_from_pieces(pieces: Sequence[Piece], n_nodes: int) -> BoundaryCurve:
    """Midpoint-rule nodes on each piece, counts proportional to piece length.

    Nodes never fall on a junction, so corners carry no node of their own.
    """
    if n_nodes < MIN_NODES:
        raise ValueError(f"n_nodes must be >= {MIN_NODES}")
    lengths = np.array([p.length() for p in pieces])
    if len(pieces) == 1:
        counts = np.array([n_nodes])
    else:
        raw = n_nodes * lengths / lengths.sum()
        counts = np.maximum(np.floor(raw).astype(int), 1)
        # hand leftover nodes to the largest remainders, deterministic order
        rem = raw - counts
        for i in np.argsort(-rem, kind="stable")[: n_nodes - counts.sum()]:
            counts[i] += 1
    pos, d1s, d2s, w = [], [], [], []
    for piece, m in zip(pieces, counts):
        s = (np.arange(m) + (0.0 if piece.periodic else 0.5)) / m
        p, d1, d2 = piece.func(s)
        pos.append(p)
        d1s.append(d1)
        d2s.append(d2)
        w.append(np.hypot(d1[:, 0], d1[:, 1]) / m)
    d1 = np.concatenate(d1s)
    speed, t, normal, kappa = _frame(d1, np.concatenate(d2s))
    return BoundaryCurve(np.concatenate(pos), t, normal, kappa, np.concatenate(w))


SHAPE_KINDS = (
    "ellipse",
    "circle-through-origin",
    "two-overlapping-circles",
    "disk-with-missing-sector",
    "square-sinusoidal-sides",
    "flower",
)

_DEFAULTS = {
    "ellipse": {"a": 2.0, "b": 1.0},
    "circle-through-origin": {"radius": 1.0},
    "two-overlapping-circles": {"c1": 1.0, "c2": 1.6, "r1": 1.0, "r2": 1.0, "variant": "union"},
    "disk-with-missing-sector": {"radius": 1.0, "angle": math.pi / 2},
    "square-sinusoidal-sides": {"side": 2.0, "amplitude": 0.1, "waves": 2},
    "flower": {"radius": 1.0, "amplitude": 0.2, "petals": 5},
}

OVERLAP_VARIANTS = ("union", "difference", "intersection", "difference-right")


@dataclass(frozen=True)
class ShapeSpec:
    """A parametric shape translated so that its boundary passes through the origin.

    ``params`` override the per-kind defaults in ``_DEFAULTS``. For
    ``two-overlapping-circles`` the circles sit on the x axis at ``c1`` and
    ``c2``; ``variant`` selects which region of the arrangement is the domain
    (``union`` = conjoined circles, ``difference`` = crescent, ``intersection``
    = lens).
    """

    kind: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in SHAPE_KINDS:
            raise ValueError(f"unknown shape kind {self.kind!r}; expected one of {SHAPE_KINDS}")
        merged = dict(_DEFAULTS[self.kind])
        merged.update(self.params)
        object.__setattr__(self, "params", merged)
        _validate(self.kind, merged)

    def to_dict(self) -> dict:
        return {"kind": self.kind, "params": dict(self.params)}

    @property
    def algebraic(self) -> bool:
        return self.kind in ("ellipse", "circle-through-origin", "two-overlapping-circles",
                             "disk-with-missing-sector")

    def polynomial(self) -> Poly2:
        """Normalized generator of the boundary's vanishing ideal (algebraic kinds only)."""
        q = self.params
        if self.kind == "ellipse":
            a, b = q["a"], q["b"]
            # ((x - a)/a)^2 + (y/b)^2 - 1
            p = Poly2.from_terms({(2, 0): 1 / a**2, (1, 0): -2 / a, (0, 2): 1 / b**2}, 2)
        elif self.kind == "circle-through-origin":
            p = poly2d.circle((q["radius"], 0.0), q["radius"])
        elif self.kind == "two-overlapping-circles":
            (c1, r1), (c2, r2) = _overlap_circles(q)
            p = poly2d.circle(c1, r1) * poly2d.circle(c2, r2)
        elif self.kind == "disk-with-missing-sector":
            r, ang = q["radius"], q["angle"]
            c = (r, 0.0)
            p = poly2d.product([
                poly2d.circle(c, r),
                poly2d.line(c, (math.cos(ang / 2), math.sin(ang / 2))),
                poly2d.line(c, (math.cos(-ang / 2), math.sin(-ang / 2))),
            ])
        else:
            raise ValueError(f"{self.kind} boundary is not algebraic")
        c = np.array(p.coeffs)
        c[0] = 0.0
        return poly2d.normalize(Poly2(p.degree, c))


def _validate(kind, q):
    for key in ("a", "b", "radius", "r1", "r2", "side"):
        if key in q and not q[key] > 0:
            raise ValueError(f"{kind}: {key} must be positive")
    if kind == "disk-with-missing-sector" and not 0 < q["angle"] < 2 * math.pi:
        raise ValueError("sector angle must lie in (0, 2*pi)")
    if kind == "two-overlapping-circles":
        if q["variant"] not in OVERLAP_VARIANTS:
            raise ValueError(f"variant must be one of {OVERLAP_VARIANTS}")
        d = abs(q["c2"] - q["c1"])
        if not abs(q["r1"] - q["r2"]) < d < q["r1"] + q["r2"]:
            raise ValueError("circles must overlap properly")
    if kind == "flower" and not 0 <= q["amplitude"] < 1:
        raise ValueError("flower amplitude must lie in [0, 1)")


def _overlap_circles(q):
    """Circle centers/radii after the translation that puts the origin on the boundary."""
    c1, c2, r1, r2 = q["c1"], q["c2"], q["r1"], q["r2"]
    v = q["variant"]
    if v in ("union", "difference"):
        shift = c1 - r1
    elif v == "intersection":
        # leftmost boundary point lies on circle 2
        shift = c2 - r2
    else:
        # right crescent: its leftmost points are the crossings, use the
        # rightmost point of the inner arc of circle 1 instead
        shift = c1 + r1
    return ((c1 - shift, 0.0), r1), ((c2 - shift, 0.0), r2)


def _overlap_pieces(q) -> list[Piece]:
    (p1, r1), (p2, r2) = _overlap_circles(q)
    x1, x2 = p1[0], p2[0]
    d = x2 - x1
    a = (d * d + r1 * r1 - r2 * r2) / (2 * d)
    h = math.sqrt(r1 * r1 - a * a)
    ix = x1 + a
    # angles of the upper intersection point seen from each center
    t1 = math.atan2(h, ix - x1)
    t2 = math.atan2(h, ix - x2)
    left_outer = arc_piece(p1, r1, t1, 2 * np.pi - t1)          # ccw, convex
    right_outer = arc_piece(p2, r2, -t2, t2)                     # ccw, convex
    left_inner_ccw = arc_piece(p1, r1, -t1, t1)                  # inside circle 2
    right_inner_ccw = arc_piece(p2, r2, t2, 2 * np.pi - t2)      # inside circle 1
    v = q["variant"]
    if v == "union":
        return [left_outer, right_outer]
    if v == "intersection":
        return [left_inner_ccw, right_inner_ccw]
    if v == "difference":
        # left disk minus right disk: outer left arc, then the right circle inside
        # the left disk traversed clockwise
        return [left_outer, arc_piece(p2, r2, 2 * np.pi - t2, t2)]
    # right disk minus left disk
    return [right_outer, arc_piece(p1, r1, t1, -t1)]


def _sector_pieces(q) -> list[Piece]:
    r, ang = q["radius"], q["angle"]
    c = np.array([r, 0.0])
    # missing sector opens toward +x, origin is the leftmost point of the arc
    a0, a1 = ang / 2, 2 * np.pi - ang / 2
    start = c + r * np.array([math.cos(a0), math.sin(a0)])
    end = c + r * np.array([math.cos(a1), math.sin(a1)])
    return [arc_piece(c, r, a0, a1), segment_piece(end, c), segment_piece(c, start)]


def _sinusoid_side(p0, p1, amp, waves) -> Piece:
    p0 = np.asarray(p0, float)
    p1 = np.asarray(p1, float)
    e = p1 - p0
    nrm = np.array([e[1], -e[0]]) / np.hypot(*e)   # outward for ccw traversal
    k = waves * np.pi

    def f(s):
        off = amp * np.sin(k * s)
        doff = amp * k * np.cos(k * s)
        ddoff = -amp * k * k * np.sin(k * s)
        pos = p0[None] + e[None] * s[:, None] + nrm[None] * off[:, None]
        d1 = e[None] + nrm[None] * doff[:, None]
        d2 = nrm[None] * ddoff[:, None]
        return pos, d1, d2

    return Piece(f)


def _flower_piece(q) -> Piece:
    R, A, m = q["radius"], q["amplitude"], int(q["petals"])
    # radius at theta = pi is R(1 + A cos(m pi)); shift so that point is the origin
    rl = R * (1 + A * math.cos(m * math.pi))
    cx = rl

    def f(s):
        t = 2 * np.pi * s + np.pi
        rr = R * (1 + A * np.cos(m * t))
        dr = -R * A * m * np.sin(m * t)
        ddr = -R * A * m * m * np.cos(m * t)
        c, sn = np.cos(t), np.sin(t)
        pos = np.stack([cx + rr * c, rr * sn], 1)
        w = 2 * np.pi
        d1 = np.stack([dr * c - rr * sn, dr * sn + rr * c], 1) * w
        d2 = np.stack([ddr * c - 2 * dr * sn - rr * c, ddr * sn + 2 * dr * c - rr * sn], 1) * w * w
        return pos, d1, d2

    return Piece(f, periodic=True)


def _ellipse_piece(q) -> Piece:
    a, b = q["a"], q["b"]

    def f(s):
        t = 2 * np.pi * s + np.pi
        c, sn = np.cos(t), np.sin(t)
        w = 2 * np.pi
        pos = np.stack([a + a * c, b * sn], 1)
        d1 = np.stack([-a * sn, b * c], 1) * w
        d2 = np.stack([-a * c, -b * sn], 1) * w * w
        return pos, d1, d2

    return Piece(f, periodic=True)


def shape_pieces(spec: ShapeSpec) -> list[Piece]:
    q = spec.params
    if spec.kind == "ellipse":
        return [_ellipse_piece(q)]
    if spec.kind == "circle-through-origin":
        r = q["radius"]
        return [_ellipse_piece({"a": r, "b": r})]
    if spec.kind == "two-overlapping-circles":
        return _overlap_pieces(q)
    if spec.kind == "disk-with-missing-sector":
        return _sector_pieces(q)
    if spec.kind == "square-sinusoidal-sides":
        s = q["side"]
        # origin sits at the midpoint of the left side
        corners = [(0, s / 2), (0, -s / 2), (s, -s / 2), (s, s / 2)]
        # the left side is split at the origin so the node sequence starts there
        pieces = [_left_side_half(corners, q, first=True)]
        for i in range(1, 4):
            pieces.append(_sinusoid_side(corners[i], corners[(i + 1) % 4], q["amplitude"], q["waves"]))
        pieces.append(_left_side_half(corners, q, first=False))
        return pieces
    return [_flower_piece(q)]


def _left_side_half(corners, q, first: bool) -> Piece:
    """Half of the left sinusoidal side; the left side is split at the origin."""
    full = _sinusoid_side(corners[0], corners[1], q["amplitude"], q["waves"])
    lo, hi = (0.5, 1.0) if first else (0.0, 0.5)

    def f(s):
        pos, d1, d2 = full.func(lo + (hi - lo) * s)
        return pos, d1 * (hi - lo), d2 * (hi - lo) ** 2

    return Piece(f)


def make_shape(spec: ShapeSpec, n_nodes: int) -> BoundaryCurve:
    """Sample a library shape at ``n_nodes`` quadrature nodes."""
    curve = curve_from_pieces(shape_pieces(spec), n_nodes)
    if curve.area <= 0:
        raise AssertionError("shape library produced a clockwise curve")
    return curve


def perimeter(spec: ShapeSpec) -> float:
    """Length of the boundary by adaptive quadrature (reference value)."""
    from scipy.integrate import quad

    total = 0.0
    for piece in shape_pieces(spec):
        def speed(s, piece=piece):
            _, d1, _ = piece.func(np.array([s]))
            return float(np.hypot(d1[0, 0], d1[0, 1]))
        total += quad(speed, 0.0, 1.0, limit=400, epsabs=1e-13, epsrel=1e-13)[0]
    return total


# -- point clouds ---------------------------------------------------------------

MAX_SPLINE_POINTS = 4096


def _dedupe_closed(points: np.ndarray) -> np.ndarray:
    p = np.asarray(points, dtype=float)
    if p.ndim != 2 or p.shape[1] != 2:
        raise ValueError("points must be an (n, 2) array")
    scale = max(np.ptp(p, axis=0).max(), 1e-300)
    if np.hypot(*(p[0] - p[-1])) <= 1e-12 * scale:
        p = p[:-1]
    step = np.hypot(*np.diff(np.vstack([p, p[:1]]), axis=0).T)
    keep = step > 1e-12 * scale
    return p[keep]


def _thin(p: np.ndarray, m: int) -> np.ndarray:
    """Keep ``m`` input points closest to uniform arclength positions (no interpolation)."""
    closed = np.vstack([p, p[:1]])
    s = np.concatenate([[0.0], np.cumsum(np.hypot(*np.diff(closed, axis=0).T))])
    t = np.arange(m) * s[-1] / m
    idx = np.unique(np.clip(np.searchsorted(s[:-1], t), 0, len(p) - 1))
    return p[idx]


def resample(points, n: int, reduce_to: int = MAX_SPLINE_POINTS) -> BoundaryCurve:
    """Periodic cubic spline through a closed point loop, resampled uniformly in arclength.

    Inputs with more than ``reduce_to`` points are first thinned to about that
    many of their own points, picked uniformly along the polyline. The first input point is kept
    as the first output node. Clockwise loops are reversed.
    """
    p = np.asarray(points, dtype=float)
    if len(p) < 8:
        raise ValueError(f"resample needs at least 8 points, got {len(p)}")
    p = _dedupe_closed(p)
    if len(p) < 8:
        raise ValueError("degenerate point loop")
    if signed_area(p) < 0:
        p = np.vstack([p[:1], p[:0:-1]])
    if len(p) > reduce_to:
        p = _thin(p, reduce_to)
    closed = np.vstack([p, p[:1]])
    chord = np.hypot(*np.diff(closed, axis=0).T)
    if chord.sum() <= 0:
        raise ValueError("zero-length point loop")
    u = np.concatenate([[0.0], np.cumsum(chord)])
    spl = CubicSpline(u, closed, bc_type="periodic")
    d1s = spl.derivative(1)

    # arclength per spline interval by 8-point Gauss-Legendre
    gx, gw = np.polynomial.legendre.leggauss(8)
    a, b = u[:-1], u[1:]
    mid, half = 0.5 * (a + b), 0.5 * (b - a)
    q = mid[:, None] + half[:, None] * gx[None, :]
    sp = np.hypot(*d1s(q.ravel()).T).reshape(q.shape)
    seg_len = half * (sp @ gw)
    cum = np.concatenate([[0.0], np.cumsum(seg_len)])
    total = cum[-1]

    targets = np.arange(n) * total / n
    k = np.clip(np.searchsorted(cum, targets, side="right") - 1, 0, len(seg_len) - 1)
    # Newton on the arclength inside each interval, started from linear interpolation
    frac = np.where(seg_len[k] > 0, (targets - cum[k]) / np.where(seg_len[k] > 0, seg_len[k], 1), 0)
    uu = a[k] + frac * (b[k] - a[k])
    for _ in range(30):
        lo = a[k]
        tq = lo[:, None] + 0.5 * (uu - lo)[:, None] * (gx[None, :] + 1.0)
        partial = 0.5 * (uu - lo) * (np.hypot(*d1s(tq.ravel()).T).reshape(tq.shape) @ gw)
        f = cum[k] + partial - targets
        spd = np.hypot(*d1s(uu).T)
        step = f / np.maximum(spd, 1e-300)
        uu = np.clip(uu - step, a[k], b[k])
        if np.max(np.abs(step)) < 1e-15 * max(u[-1], 1.0):
            break
    pos = spl(uu)
    _, t, normal, kappa = _frame(d1s(uu), spl.derivative(2)(uu))
    spacing = total / n
    kappa = np.clip(kappa, -1.0 / spacing, 1.0 / spacing)
    return BoundaryCurve(pos, t, normal, kappa, np.full(n, spacing))


# -- distances and containment --------------------------------------------------

def _as_points(a) -> np.ndarray:
    if isinstance(a, BoundaryCurve):
        return a.nodes
    p = np.asarray(a, dtype=float).reshape(-1, 2)
    if len(p) == 0:
        raise ValueError("point set must be nonempty")
    return p


def directed_hausdorff(a, b) -> float:
    """``max_{x in a} min_{y in b} |x - y|``."""
    pa, pb = _as_points(a), _as_points(b)
    d, _ = cKDTree(pb).query(pa, k=1)
    return float(d.max())


def hausdorff(a, b) -> float:
    """Symmetric Hausdorff distance between two finite point sets."""
    return max(directed_hausdorff(a, b), directed_hausdorff(b, a))


def distance_to_polyline(loop, q) -> float:
    p = _as_points(loop)
    a = p
    b = np.roll(p, -1, axis=0)
    q = np.asarray(q, dtype=float)
    ab = b - a
    L2 = np.einsum("ij,ij->i", ab, ab)
    t = np.clip(np.einsum("ij,ij->i", q[None] - a, ab) / np.where(L2 > 0, L2, 1.0), 0.0, 1.0)
    proj = a + t[:, None] * ab
    return float(np.min(np.hypot(*(proj - q[None]).T)))


def winding_number(loop, q) -> int:
    """Winding number of the closed polygon ``loop`` around ``q`` (Sunday's algorithm)."""
    p = _as_points(loop) - np.asarray(q, dtype=float)[None]
    a = p
    b = np.roll(p, -1, axis=0)
    cross = a[:, 0] * b[:, 1] - b[:, 0] * a[:, 1]
    up = (a[:, 1] <= 0) & (b[:, 1] > 0) & (cross > 0)
    down = (a[:, 1] > 0) & (b[:, 1] <= 0) & (cross < 0)
    return int(up.sum() - down.sum())


def contains_point(loop, q, tol_on: float = ON_BOUNDARY_TOL) -> bool:
    """True when ``q`` is inside the closed loop or within ``tol_on`` of it."""
    if distance_to_polyline(loop, q) <= tol_on:
        return True
    return winding_number(loop, q) != 0


def orient_ccw(points) -> np.ndarray:
    p = np.asarray(points, dtype=float)
    return p[::-1].copy() if signed_area(p) < 0 else p


# -- serialization ---------------------------------------------------------------

def points_to_csv(points) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["x", "y"])
    for x, y in np.asarray(points, dtype=float):
        w.writerow([repr(float(x)), repr(float(y))])
    return buf.getvalue()


def parse_points_csv(text: str) -> np.ndarray:
    """Two-column ``x,y`` CSV text; a non-numeric first row is treated as a header."""
    rows = [r for r in csv.reader(io.StringIO(text)) if r and any(c.strip() for c in r)]
    out = []
    for i, r in enumerate(rows):
        try:
            out.append((float(r[0]), float(r[1])))
        except ValueError:
            if i == 0:
                continue
            raise
    return np.array(out, dtype=float).reshape(-1, 2)


def read_points_csv(path) -> np.ndarray:
    with open(path, newline="") as fh:
        return parse_points_csv(fh.read())


def svg_polylines(layers, size: int = 600, margin: float = 0.05) -> str:
    """Render ``[(points, style_dict, closed), ...]`` into a standalone SVG string.

    The viewBox fits all layers; y is flipped so the picture has the usual orientation.
    """
    allp = np.vstack([np.asarray(p, float).reshape(-1, 2) for p, _, _ in layers if len(p)])
    lo, hi = allp.min(0), allp.max(0)
    span = max(hi - lo)
    pad = margin * span if span > 0 else 1.0
    lo = lo - pad
    w, h = (hi - lo + pad)
    stroke = span / size * 1.5 if span > 0 else 0.01
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{int(size * h / w)}" '
        f'viewBox="{lo[0]:.6g} {-(lo[1] + h):.6g} {w:.6g} {h:.6g}">'
    ]
    for pts, style, closed in layers:
        pts = np.asarray(pts, float).reshape(-1, 2)
        color = style.get("color", "black")
        if style.get("marker"):
            r = style.get("radius", stroke * 3)
            for x, y in pts:
                out.append(f'<circle cx="{x:.6g}" cy="{-y:.6g}" r="{r:.4g}" fill="{color}"/>')
            continue
        tag = "polygon" if closed else "polyline"
        coords = " ".join(f"{x:.6g},{-y:.6g}" for x, y in pts)
        width = stroke * style.get("width", 1.0)
        out.append(f'<{tag} points="{coords}" fill="none" stroke="{color}" stroke-width="{width:.4g}"/>')
    out.append("</svg>")
    return "\n".join(out)
