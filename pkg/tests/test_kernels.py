"""The compiled and the pure-numpy kernels must agree."""

import os
import subprocess
import sys

import numpy as np
import pytest

from algdomain import _kernels
from algdomain.geometry import ShapeSpec, make_shape

nb = _kernels.numba_backend
npb = _kernels.numpy_backend
pytestmark = pytest.mark.skipif(nb is None, reason="numba not installed")


@pytest.fixture(scope="module")
def overlap():
    return _kernels.poly_arrays(ShapeSpec("two-overlapping-circles").polynomial())


def test_assemble_agrees():
    c = make_shape(ShapeSpec("flower"), 200)
    args = (c.nodes, c.normals, c.curvature, c.weights)
    assert np.allclose(nb.assemble(*map(np.ascontiguousarray, args)), npb.assemble(*args),
                       rtol=1e-13, atol=1e-15)


def test_trace_agrees(overlap):
    ex, ey, c, deg = overlap
    targets = np.array([[2.6, 0.0], [0.3, 0.7]])
    args = (ex, ey, c, deg, 0.0, 0.0, targets, 1.0, 1e-3, 1e-2, 10.0, 100000, 0.05, 1e-2,
            0.0, 1e-10, 1e-12)
    a, b = nb.trace(*args), npb.trace(*args)
    assert a[1] == b[1] and a[2] == b[2]
    assert np.allclose(a[0], b[0], atol=1e-12) and a[3] == pytest.approx(b[3], abs=1e-12)


def test_critical_points_agree(overlap):
    ex, ey, c, deg = overlap
    seeds = np.random.default_rng(0).uniform(-1, 3, (50, 2))
    a, b = nb.critical_points(ex, ey, c, deg, seeds, 50, -3.0, 3.0), \
        npb.critical_points(ex, ey, c, deg, seeds, 50, -3.0, 3.0)
    assert np.array_equal(a[1], b[1])
    assert np.allclose(a[0][a[1]], b[0][b[1]], atol=1e-10)


def test_circle_zeros_agree(overlap):
    ex, ey, c, deg = overlap
    for r in (0.05, 0.3, 1.2):
        a = nb.circle_zeros(ex, ey, c, deg, 1.3, 0.95, r, 1000, 1e-12, 200)
        b = npb.circle_zeros(ex, ey, c, deg, 1.3, 0.95, r, 1000, 1e-12, 200)
        assert np.allclose(a, b, atol=1e-12)


@pytest.mark.parametrize("flag,name", [("0", "numpy"), ("off", "numpy"), ("1", "numba")])
def test_env_flag_selects_backend(flag, name):
    env = dict(os.environ, ALGDOMAIN_NUMBA=flag)
    out = subprocess.run([sys.executable, "-c", "import algdomain; print(algdomain.BACKEND_NAME)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == name
