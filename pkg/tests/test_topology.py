import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from algdomain import geometry, topology
from algdomain.errors import CircuitLimitError
from algdomain.levelset import SegmentationPoint
from algdomain.topology import (Arc, ArcGraph, Circuit, construct_domain, elementary_circuits,
                                filter_circuits, find_arcs, simple_cycles)
from conftest import random_digraph
from oracles import brute_force_cycles


def _norm(cycles):
    return {tuple(c) for c in cycles}


def test_directed_triangle():
    assert simple_cycles({1: [2], 2: [3], 3: [1]}) == [[1, 2, 3]]


def test_complete_bidirectional_triangle():
    cyc = _norm(simple_cycles({0: [1, 2], 1: [0, 2], 2: [0, 1]}))
    assert cyc == {(0, 1), (0, 2), (1, 2), (0, 1, 2), (0, 2, 1)}


def test_self_loop_and_acyclic():
    assert simple_cycles({0: [0, 1], 1: []}) == [[0]]
    assert simple_cycles({0: [1], 1: [2], 2: []}) == []


@pytest.mark.parametrize("seed", range(50))
def test_matches_brute_force_on_random_digraphs(seed):
    adj = random_digraph(seed)
    got = simple_cycles(adj)
    assert len(got) == len(_norm(got))
    assert _norm(got) == brute_force_cycles(adj)


@given(st.dictionaries(st.integers(0, 6), st.lists(st.integers(0, 6), max_size=5), max_size=7))
def test_matches_brute_force_property(adj):
    assert _norm(simple_cycles(adj)) == brute_force_cycles(adj)


def test_circuit_cap():
    complete = {v: [w for w in range(7) if w != v] for v in range(7)}
    with pytest.raises(CircuitLimitError):
        simple_cycles(complete, limit=100)


def test_parallel_arcs_expand():
    arcs = [Arc(0, 1, 0), Arc(0, 1, 1), Arc(1, 0, 2)]
    circ = elementary_circuits(arcs)
    assert sorted(c.arcs for c in circ) == [(0, 2), (1, 2)]


def test_overlap_arc_counts(overlap_graph):
    bifs, segs, g = overlap_graph
    level = [a for a in g.arcs if a.dir != 0]
    trivial = [a for a in g.arcs if a.dir == 0]
    assert len(segs) == 8 and len(level) == 8 and len(trivial) == 24


def test_arc_graph_symmetry(overlap_graph):
    _, segs, g = overlap_graph
    keys = {a.key for a in g.arcs}
    for a in g.arcs:
        if a.dir == 1:
            assert (a.dst, a.src, 2) in keys
        if a.dir == 0:
            assert segs[a.src].parent == segs[a.dst].parent
    for i in {s.parent for s in segs}:
        own = [k for k, s in enumerate(segs) if s.parent == i]
        assert all((u, v, 0) in keys for u in own for v in own if u != v)


def test_level_arcs_follow_level_set(overlap_poly, overlap_graph):
    for a in overlap_graph[2].arcs:
        if a.polyline is not None:
            assert np.max(np.abs(overlap_poly(a.polyline))) < 1e-8


def test_no_segmentation_points_no_arcs():
    g = find_arcs(geometry.ShapeSpec("circle-through-origin").polynomial(), [])
    assert g.arcs == [] and elementary_circuits(g.arcs) == []


def test_six_classes_without_origin_probe(overlap_graph):
    g = overlap_graph[2]
    kept = filter_circuits(elementary_circuits(g.arcs), g)
    assert len(kept) == 6
    assert all(4 <= len(c) <= 2 * g.n_bifs for c in kept)


def test_origin_probe_keeps_domains_touching_origin(overlap_graph):
    g = overlap_graph[2]
    kept = filter_circuits(elementary_circuits(g.arcs), g, origin_probe=(0.0, 0.0))
    assert len(kept) == 3


def test_filter_is_idempotent(overlap_graph):
    g = overlap_graph[2]
    once = filter_circuits(elementary_circuits(g.arcs), g)
    assert filter_circuits(once, g) == once


def test_short_circuits_and_reversals_removed():
    segs = [SegmentationPoint(0, 0, 0, 0, 0.1), SegmentationPoint(1, 0, 0, 1, 0.1),
            SegmentationPoint(2, 0, 1, 0, 0.1), SegmentationPoint(3, 0, 1, 1, 0.1)]
    arcs = [Arc(0, 1, 0), Arc(1, 0, 0), Arc(1, 2, 1), Arc(2, 1, 2), Arc(2, 3, 0), Arc(3, 2, 0),
            Arc(3, 0, 1), Arc(0, 3, 2)]
    g = ArcGraph(segs, arcs, 2)
    allc = elementary_circuits(arcs)
    assert any(len(c) == 2 for c in allc)
    kept = filter_circuits(allc, g)
    # the 4-cycle and its reverse are one class
    assert len([c for c in allc if len(c) == 4]) == 2 and len(kept) == 1


def test_revisiting_a_bifurcation_point_rejected():
    segs = [SegmentationPoint(0, 0, 0, k, 0.1) for k in range(4)] + \
           [SegmentationPoint(1, 0, 1, k, 0.1) for k in range(2)]
    # enters bifurcation 0 twice: 0 -> 1 -> 4 -> 2 -> 3 -> 5 -> 0
    c = Circuit((0, 1, 2, 3, 4, 5), (0, 1, 4, 2, 3, 5))
    arcs = [Arc(0, 1, 0), Arc(1, 4, 1), Arc(4, 2, 1), Arc(2, 3, 0), Arc(3, 5, 1), Arc(5, 0, 1)]
    g = ArcGraph(segs, arcs, 3)
    assert filter_circuits([c], g) == []


def test_candidates_closed_ccw_on_level_set(overlap_poly, overlap_graph):
    g = overlap_graph[2]
    kept = filter_circuits(elementary_circuits(g.arcs), g)
    cands = [construct_domain(overlap_poly, c, g) for c in kept]
    areas = sorted(round(geometry.signed_area(c.loop), 2) for c in cands)
    # lens, two crescents, two disks, union
    assert areas == [1.18, 1.18, 1.96, 3.14, 3.14, 4.32]
    for cand in cands:
        assert geometry.signed_area(cand.loop) > 0
        step = np.hypot(*np.diff(np.vstack([cand.loop, cand.loop[:1]]), axis=0).T)
        assert step.max() < 0.01
    # every traced arc point is on the level set; blends only appear near crossings
    bif = np.array([b.position for b in overlap_graph[0]])
    for cand in cands:
        far = np.min(np.hypot(*(cand.loop[:, None, :] - bif[None]).transpose(2, 0, 1)), axis=1) > 0.06
        assert np.max(np.abs(overlap_poly(cand.loop[far]))) < 1e-6


def test_geometric_dedup():
    t = np.linspace(0, 2 * np.pi, 200, endpoint=False)
    loop = np.column_stack([np.cos(t), np.sin(t)])
    a = topology.DomainCandidate(loop, None)
    b = topology.DomainCandidate(loop[::-1] * (1 + 1e-5), None)
    c = topology.DomainCandidate(loop * 2, None)
    assert topology.dedupe_candidates([a, b, c]) == [a, c]


def test_graph_json_roundtrip(overlap_graph):
    g = overlap_graph[2]
    back = ArcGraph.from_dict(json.loads(g.to_json(polylines=True)))
    assert [a.key for a in back.arcs] == [a.key for a in g.arcs]
    assert back.n_bifs == 2 and len(back.segs) == 8
    d = json.loads(g.to_json())
    assert sorted(map(int, d["adjacency"])) == list(range(8))
    assert filter_circuits(elementary_circuits(back.arcs), back) and \
        len(filter_circuits(elementary_circuits(back.arcs), back)) == 6
