"""Arc graph on segmentation points, its elementary circuits, and candidate loops.

Vertices are segmentation points. Level arcs follow the zero set between two
of them (direction 1 along the positive Hamiltonian flow, direction 2 its
reverse); trivial arcs (direction 0) jump across a bifurcation point between
segmentation points that share it.
"""

from __future__ import annotations

import itertools
import json
import logging
from collections import defaultdict
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from . import geometry
from .errors import CircuitLimitError, LevelSetError
from .levelset import BOUND, T_STEP, TOL_PO, SegmentationPoint, trace
from .poly2d import Poly2

log = logging.getLogger(__name__)

CIRCUIT_CAP = 10**6
DEDUP_HAUSDORFF = 1e-3
TRIVIAL, POSITIVE, NEGATIVE = 0, 1, 2


@dataclass(frozen=True, eq=False)
class Arc:
    src: int
    dst: int
    dir: int
    polyline: np.ndarray | None = None

    @property
    def key(self) -> tuple[int, int, int]:
        return (self.src, self.dst, self.dir)

    def reversed(self) -> "Arc":
        d = {TRIVIAL: TRIVIAL, POSITIVE: NEGATIVE, NEGATIVE: POSITIVE}[self.dir]
        pl = None if self.polyline is None else self.polyline[::-1].copy()
        return Arc(self.dst, self.src, d, pl)


@dataclass
class ArcGraph:
    segs: list
    arcs: list
    n_bifs: int
    diagnostics: list = field(default_factory=list)

    def adjacency(self) -> dict[int, list[int]]:
        adj: dict[int, list[int]] = {i: [] for i in range(len(self.segs))}
        for a in self.arcs:
            if a.dst not in adj[a.src]:
                adj[a.src].append(a.dst)
        return adj

    def to_dict(self, polylines: bool = False) -> dict:
        out = {
            "n_bifurcation_points": self.n_bifs,
            "vertices": [
                {"id": i, "label": s.label, "parent": s.parent, "local": s.local,
                 "position": [s.x, s.y], "radius": s.radius}
                for i, s in enumerate(self.segs)
            ],
            "arcs": [{"from": a.src, "to": a.dst, "dir": a.dir} for a in self.arcs],
            "adjacency": {str(k): v for k, v in self.adjacency().items()},
            "diagnostics": list(self.diagnostics),
        }
        if polylines:
            for rec, a in zip(out["arcs"], self.arcs):
                rec["polyline"] = None if a.polyline is None else a.polyline.tolist()
        return out

    def to_json(self, polylines: bool = False) -> str:
        return json.dumps(self.to_dict(polylines))

    @classmethod
    def from_dict(cls, data: dict) -> "ArcGraph":
        segs = [
            SegmentationPoint(float(v["position"][0]), float(v["position"][1]), int(v["parent"]),
                              int(v["local"]), float(v.get("radius", 0.0)))
            for v in sorted(data["vertices"], key=lambda v: v["id"])
        ]
        arcs = []
        for a in data["arcs"]:
            pl = a.get("polyline")
            arcs.append(Arc(int(a["from"]), int(a["to"]), int(a["dir"]),
                            None if pl is None else np.asarray(pl, dtype=float)))
        n_bifs = int(data.get("n_bifurcation_points", len({s.parent for s in segs})))
        return cls(segs, arcs, n_bifs, list(data.get("diagnostics", [])))


def find_arcs(p: Poly2, segs, bound: float = BOUND, t_step: float = T_STEP,
              tol_po: float = TOL_PO, n_bifs: int | None = None) -> ArcGraph:
    """Connect segmentation points through the level set.

    Each point is traced in the positive direction with the other points as
    targets. A trace that only crosses the neighbourhood of its own
    bifurcation point (arclength below four times the segmentation radius)
    is not a level arc. Traces that stagnate or leave the bound are skipped
    and reported in ``diagnostics``.
    """
    segs = list(segs)
    n_bifs = len({s.parent for s in segs}) if n_bifs is None else n_bifs
    pos = np.array([[s.x, s.y] for s in segs]).reshape(-1, 2)
    arcs: dict[tuple, Arc] = {}
    diags = []
    for a, b in itertools.permutations(range(len(segs)), 2):
        if segs[a].parent == segs[b].parent:
            arcs[(a, b, TRIVIAL)] = Arc(a, b, TRIVIAL)
    for a, s in enumerate(segs):
        others = np.array([j for j in range(len(segs)) if j != a], dtype=int)
        res = trace(p, pos[a], pos[others], 1, t_step, tol_po, bound)
        if res.terminated_by != "target":
            diags.append(f"trace from {s.label} ended by {res.terminated_by}; skipped")
            continue
        b = int(others[res.hit_target])
        if segs[b].parent == s.parent and res.arclength < 4.0 * s.radius:
            continue
        pl = res.polyline.copy()
        pl[0], pl[-1] = pos[a], pos[b]
        fwd = Arc(a, b, POSITIVE, pl)
        for arc in (fwd, fwd.reversed()):
            arcs.setdefault(arc.key, arc)
    for d in diags:
        log.info(d)
    ordered = sorted(arcs.values(), key=lambda e: e.key)
    return ArcGraph(segs, ordered, n_bifs, diags)


# -- elementary circuits ---------------------------------------------------------

def _strong_component(sub: dict[int, list[int]], s: int) -> set[int]:
    nodes = sorted(sub)
    idx = {v: i for i, v in enumerate(nodes)}
    rows, cols = [], []
    for v, ws in sub.items():
        for w in ws:
            rows.append(idx[v])
            cols.append(idx[w])
    g = csr_matrix((np.ones(len(rows)), (rows, cols)), shape=(len(nodes), len(nodes)))
    _, lab = connected_components(g, directed=True, connection="strong")
    return {v for v in nodes if lab[idx[v]] == lab[idx[s]]}


def simple_cycles(adj: dict, limit: int = CIRCUIT_CAP) -> list[list]:
    """All elementary cycles of a directed graph given as ``{v: successors}``.

    Johnson's algorithm: for each start vertex ``s`` in increasing order,
    search only the strongly connected component of ``s`` in the subgraph of
    vertices ``>= s``, blocking vertices that cannot currently reach ``s``.
    Each cycle is listed once, starting at its least vertex.
    """
    verts = set(adj)
    for ws in adj.values():
        verts.update(ws)
    order = sorted(verts)
    succ = {v: sorted(set(adj.get(v, ()))) for v in order}
    cycles: list[list] = []
    for s in order:
        sub = {v: [w for w in succ[v] if w >= s] for v in order if v >= s}
        comp = _strong_component(sub, s)
        g = {v: [w for w in sub[v] if w in comp] for v in comp}
        if not g[s]:
            continue
        blocked: set = set()
        bmap: dict = defaultdict(set)
        path = [s]
        blocked.add(s)
        # explicit stack of (vertex, successor iterator, found flag)
        stack = [[s, iter(g[s]), False]]
        while stack:
            frame = stack[-1]
            v, it = frame[0], frame[1]
            w = next(it, None)
            if w is not None:
                if w == s:
                    cycles.append(list(path))
                    if len(cycles) > limit:
                        raise CircuitLimitError(f"more than {limit} elementary circuits; graph too tangled")
                    frame[2] = True
                elif w not in blocked:
                    path.append(w)
                    blocked.add(w)
                    stack.append([w, iter(g[w]), False])
                continue
            stack.pop()
            path.pop()
            if frame[2]:
                _unblock(v, blocked, bmap)
            else:
                for u in g[v]:
                    bmap[u].add(v)
            if stack and frame[2]:
                stack[-1][2] = True
    return cycles


def _unblock(v, blocked: set, bmap: dict) -> None:
    todo = [v]
    while todo:
        u = todo.pop()
        if u in blocked:
            blocked.discard(u)
            todo.extend(bmap.pop(u, ()))


@dataclass(frozen=True)
class Circuit:
    arcs: tuple
    vertices: tuple

    def __len__(self) -> int:
        return len(self.arcs)


def elementary_circuits(arcs, limit: int = CIRCUIT_CAP) -> list[Circuit]:
    """Elementary circuits over a list of :class:`Arc` (parallel arcs expanded)."""
    arcs = list(arcs)
    by_pair: dict = defaultdict(list)
    for i, a in enumerate(arcs):
        by_pair[(a.src, a.dst)].append(i)
    adj: dict = defaultdict(list)
    for u, v in by_pair:
        adj[u].append(v)
    out = []
    for cyc in simple_cycles(adj, limit):
        pairs = [(cyc[k], cyc[(k + 1) % len(cyc)]) for k in range(len(cyc))]
        for choice in itertools.product(*(by_pair[pr] for pr in pairs)):
            out.append(Circuit(tuple(choice), tuple(cyc)))
            if len(out) > limit:
                raise CircuitLimitError(f"more than {limit} elementary circuits; graph too tangled")
    return out


# -- filtering -------------------------------------------------------------------

def _runs(parents: list) -> list[tuple]:
    """Cyclic maximal runs of equal parent as ``(parent, length)``."""
    n = len(parents)
    if len(set(parents)) == 1:
        return [(parents[0], n)]
    start = next(k for k in range(n) if parents[k] != parents[k - 1])
    rot = parents[start:] + parents[:start]
    return [(key, len(list(grp))) for key, grp in itertools.groupby(rot)]


def canonical_form(c: Circuit, arcs) -> tuple:
    """Rotation- and reversal-invariant key built from vertices and arc kinds."""
    kinds = [int(arcs[i].dir != TRIVIAL) for i in c.arcs]
    v = list(c.vertices)
    n = len(v)
    fwd = list(zip(v, kinds))
    rev = [(v[(k + 1) % n], kinds[k]) for k in reversed(range(n))]
    return min(tuple(seq[k:] + seq[:k]) for seq in (fwd, rev) for k in range(n))


def provisional_polygon(c: Circuit, graph: ArcGraph) -> np.ndarray:
    """Arc polylines (or bare vertex positions) chained along the circuit."""
    parts = []
    for i in c.arcs:
        a = graph.arcs[i]
        if a.polyline is not None:
            parts.append(a.polyline[:-1])
        else:
            s = graph.segs[a.src]
            parts.append(np.array([[s.x, s.y]]))
    return np.vstack(parts)


def filter_circuits(circuits, graph: ArcGraph, origin_probe=None,
                    tol_on: float = TOL_PO) -> list[Circuit]:
    """Admissible circuits, one per equivalence class, in input order.

    Drops circuits shorter than 4 arcs or longer than twice the number of
    bifurcation points; with ``origin_probe``, those whose provisional polygon
    neither contains nor passes within ``tol_on`` of it; those that visit a
    bifurcation point more than once (its segmentation points must form a
    single run of exactly two vertices); and rotations or reversals of an
    earlier survivor.
    """
    nb = graph.n_bifs
    seen = set()
    out = []
    for c in circuits:
        if len(c) < 4 or len(c) > 2 * nb:
            continue
        if origin_probe is not None:
            poly = provisional_polygon(c, graph)
            if len(poly) < 3 or not geometry.contains_point(poly, origin_probe, tol_on):
                continue
        runs = _runs([graph.segs[v].parent for v in c.vertices])
        parents = [r[0] for r in runs]
        if len(set(parents)) != len(parents) or any(r[1] != 2 for r in runs):
            continue
        key = canonical_form(c, graph.arcs)
        if key in seen:
            continue
        seen.add(key)
        out.append(c)
    return out


# -- candidate loops ---------------------------------------------------------------

@dataclass(eq=False)
class DomainCandidate:
    loop: np.ndarray
    circuit: Circuit | None
    score: float | None = None
    index: int = 0

    def to_dict(self) -> dict:
        return {
            "index": self.index,
            "score": self.score,
            "circuit": None if self.circuit is None else {
                "arcs": list(self.circuit.arcs), "vertices": list(self.circuit.vertices)},
            "n_points": len(self.loop),
        }

    def to_csv(self) -> str:
        return geometry.points_to_csv(self.loop)


def _unit(v: np.ndarray) -> np.ndarray:
    n = np.hypot(*v)
    return v / n if n > 0 else v


def _hermite(p0, t0, p1, t1, m: int) -> np.ndarray:
    """Cubic Hermite blend, endpoints excluded, tangents scaled by the chord."""
    L = np.hypot(*(p1 - p0))
    s = np.linspace(0.0, 1.0, m + 2)[1:-1, None]
    h00 = 2 * s**3 - 3 * s**2 + 1
    h10 = s**3 - 2 * s**2 + s
    h01 = -2 * s**3 + 3 * s**2
    h11 = s**3 - s**2
    return h00 * p0 + h10 * L * t0 + h01 * p1 + h11 * L * t1


def construct_domain(p: Poly2, circuit: Circuit, graph: ArcGraph, t_step: float = T_STEP,
                     tol: float = TOL_PO, bound: float = BOUND) -> DomainCandidate:
    """Chain the circuit's level arcs and bridge trivial arcs with cubic blends.

    Raises :class:`LevelSetError` if consecutive pieces do not meet within ``tol``.
    """
    arcs = [graph.arcs[i] for i in circuit.arcs]
    pos = np.array([[s.x, s.y] for s in graph.segs])
    lines: list[np.ndarray | None] = []
    for a in arcs:
        if a.dir == TRIVIAL:
            lines.append(None)
        elif a.polyline is not None:
            lines.append(a.polyline)
        else:
            d = 1 if a.dir == POSITIVE else -1
            res = trace(p, pos[a.src], pos[[a.dst]], d, t_step, tol, bound)
            if res.terminated_by != "target":
                raise LevelSetError(f"arc {a.key} could not be retraced ({res.terminated_by})")
            lines.append(res.polyline)
    n = len(arcs)
    pieces = []
    for k, a in enumerate(arcs):
        if lines[k] is not None:
            pieces.append(lines[k][:-1])
            continue
        p0, p1 = pos[a.src], pos[a.dst]
        prev, nxt = lines[k - 1], lines[(k + 1) % n]
        t0 = _unit(prev[-1] - prev[-2]) if prev is not None and len(prev) > 1 else _unit(p1 - p0)
        t1 = _unit(nxt[1] - nxt[0]) if nxt is not None and len(nxt) > 1 else _unit(p1 - p0)
        m = max(int(np.hypot(*(p1 - p0)) / t_step), 2)
        pieces.append(np.vstack([p0[None], _hermite(p0, t0, p1, t1, m)]))
    for k in range(n):
        end = lines[k][-1] if lines[k] is not None else pos[arcs[k].dst]
        start = pieces[(k + 1) % n][0]
        gap = np.hypot(*(end - start))
        if gap > tol:
            raise LevelSetError(f"circuit does not close: gap {gap:.3g} after arc {arcs[k].key}")
    loop = geometry.orient_ccw(np.vstack(pieces))
    return DomainCandidate(loop, circuit)


def dedupe_candidates(cands, tol: float = DEDUP_HAUSDORFF) -> list[DomainCandidate]:
    """Drop candidates whose loops lie within Hausdorff ``tol`` of an earlier one."""
    out: list[DomainCandidate] = []
    for c in cands:
        if all(geometry.hausdorff(c.loop, k.loop) >= tol for k in out):
            out.append(c)
    return out


def candidates_svg(cands, extra_layers=()) -> str:
    colors = ["#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2"]
    layers = list(extra_layers)
    for k, c in enumerate(cands):
        layers.append((c.loop, {"color": colors[k % len(colors)]}, True))
    return geometry.svg_polylines(layers)
