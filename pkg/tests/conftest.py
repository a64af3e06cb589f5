import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from algdomain import levelset, topology
from algdomain.geometry import ShapeSpec, make_shape
from algdomain.nptensor import assemble_np, tgpt

# jit compilation happens inside the first example
settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def report():
    def _report(num: int, ok: bool, text: str) -> None:
        ACCEPTANCE_LINES.append(f"[{'PASS' if ok else 'FAIL'}] criterion {num}: {text}")
    return _report


@pytest.fixture(scope="session")
def overlap_spec():
    return ShapeSpec("two-overlapping-circles")


@pytest.fixture(scope="session")
def overlap_poly(overlap_spec):
    return overlap_spec.polynomial()


@pytest.fixture(scope="session")
def overlap_graph(overlap_poly):
    bifs = levelset.bifurcation_points(overlap_poly, escalate=True)
    segs = levelset.segmentation_points(overlap_poly, bifs)
    return bifs, segs, topology.find_arcs(overlap_poly, segs, n_bifs=len(bifs))


@pytest.fixture(scope="session")
def tgpt_of():
    """Cached ``(kind, params, n, d, lam) -> TgptMatrix``."""
    cache = {}

    def _get(kind, d, n=512, lam=1.0, **params):
        key = (kind, tuple(sorted(params.items())), n, d, lam)
        if key not in cache:
            op = assemble_np(make_shape(ShapeSpec(kind, params), n))
            cache[key] = tgpt(op, lam, d)
        return cache[key]

    return _get


def random_digraph(seed: int, max_vertices: int = 8):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, max_vertices + 1))
    p = rng.uniform(0.15, 0.6)
    return {v: [w for w in range(n) if rng.random() < p] for v in range(n)}
