"""Hot numeric loops, compiled with numba when available.

Every kernel has two implementations sharing one contract:

* ``numpy_backend`` -- vectorized numpy where the loop vectorizes, otherwise
  the plain-Python loop below;
* ``numba_backend`` -- the same loop source compiled with ``@njit``.

``ALGDOMAIN_NUMBA=0`` (or ``false``/``off``/``no``) forces the numpy path.
The active backend is exposed as ``backend`` and ``BACKEND_NAME``.
"""

from __future__ import annotations

import math
import os
from types import SimpleNamespace

import numpy as np

# trace termination codes
TARGET, BOUND, MAX_STEPS, SINGULAR, LENGTH = 0, 1, 2, 3, 4
STATUS_NAMES = {TARGET: "target", BOUND: "bound", MAX_STEPS: "max-steps",
                SINGULAR: "singular", LENGTH: "length"}


def _identity(f):
    return f


def _build(jit):
    """Create the loop kernels with ``jit`` applied (identity for pure Python)."""

    def peval(ex, ey, c, deg, x, y, px, py):
        px[0] = 1.0
        py[0] = 1.0
        for k in range(1, deg + 1):
            px[k] = px[k - 1] * x
            py[k] = py[k - 1] * y
        p = 0.0
        gx = 0.0
        gy = 0.0
        for k in range(c.shape[0]):
            a = ex[k]
            b = ey[k]
            ck = c[k]
            p += ck * px[a] * py[b]
            if a > 0:
                gx += ck * a * px[a - 1] * py[b]
            if b > 0:
                gy += ck * b * px[a] * py[b - 1]
        return p, gx, gy

    def peval2(ex, ey, c, deg, x, y, px, py):
        px[0] = 1.0
        py[0] = 1.0
        for k in range(1, deg + 1):
            px[k] = px[k - 1] * x
            py[k] = py[k - 1] * y
        p = 0.0
        gx = 0.0
        gy = 0.0
        hxx = 0.0
        hxy = 0.0
        hyy = 0.0
        for k in range(c.shape[0]):
            a = ex[k]
            b = ey[k]
            ck = c[k]
            p += ck * px[a] * py[b]
            if a > 0:
                gx += ck * a * px[a - 1] * py[b]
                if a > 1:
                    hxx += ck * a * (a - 1) * px[a - 2] * py[b]
                if b > 0:
                    hxy += ck * a * b * px[a - 1] * py[b - 1]
            if b > 0:
                gy += ck * b * px[a] * py[b - 1]
                if b > 1:
                    hyy += ck * b * (b - 1) * px[a] * py[b - 2]
        return p, gx, gy, hxx, hxy, hyy

    peval = jit(peval)
    peval2 = jit(peval2)

    def field(ex, ey, c, deg, x, y, direction, px, py, gfloor):
        # unit-speed Hamiltonian direction; ok flag false at a stagnation point
        p, gx, gy = peval(ex, ey, c, deg, x, y, px, py)
        g = math.sqrt(gx * gx + gy * gy)
        if g < gfloor:
            return 0.0, 0.0, False
        return -direction * gy / g, direction * gx / g, True

    field = jit(field)

    def rk4_project(ex, ey, c, deg, x, y, hs, direction, px, py, gfloor, newton_tol):
        k1x, k1y, ok1 = field(ex, ey, c, deg, x, y, direction, px, py, gfloor)
        k2x, k2y, ok2 = field(ex, ey, c, deg, x + 0.5 * hs * k1x, y + 0.5 * hs * k1y,
                              direction, px, py, gfloor)
        k3x, k3y, ok3 = field(ex, ey, c, deg, x + 0.5 * hs * k2x, y + 0.5 * hs * k2y,
                              direction, px, py, gfloor)
        k4x, k4y, ok4 = field(ex, ey, c, deg, x + hs * k3x, y + hs * k3y,
                              direction, px, py, gfloor)
        if not (ok1 and ok2 and ok3 and ok4):
            return x, y, False
        xn = x + hs * (k1x + 2.0 * k2x + 2.0 * k3x + k4x) / 6.0
        yn = y + hs * (k1y + 2.0 * k2y + 2.0 * k3y + k4y) / 6.0
        for _ in range(2):
            p, gx, gy = peval(ex, ey, c, deg, xn, yn, px, py)
            if abs(p) <= newton_tol:
                break
            g2 = gx * gx + gy * gy
            if g2 < gfloor * gfloor:
                return xn, yn, False
            xn -= p * gx / g2
            yn -= p * gy / g2
        return xn, yn, True

    rk4_project = jit(rk4_project)

    def trace(ex, ey, c, deg, x0, y0, targets, direction, h, tol_po, bound,
              max_steps, arm_len, sing_tol, max_len, newton_tol, gfloor):
        px = np.empty(deg + 1)
        py = np.empty(deg + 1)
        cap = 1024
        buf = np.empty((cap, 2))
        buf[0, 0] = x0
        buf[0, 1] = y0
        n = 1
        s = 0.0
        x = x0
        y = y0
        p, gx, gy = peval(ex, ey, c, deg, x, y, px, py)
        gmax = math.sqrt(gx * gx + gy * gy)
        if gmax < gfloor:
            return buf[:n].copy(), SINGULAR, -1, s
        status = MAX_STEPS
        hit = -1
        best_d = np.inf
        best_n = 0
        best_s = 0.0
        nt = targets.shape[0]
        for _ in range(max_steps):
            hs = h
            final = False
            if max_len > 0.0 and s + h >= max_len:
                hs = max_len - s
                final = True
            xn, yn, ok = rk4_project(ex, ey, c, deg, x, y, hs, direction, px, py,
                                     gfloor, newton_tol)
            if not ok:
                status = SINGULAR
                break
            x = xn
            y = yn
            s += hs
            if n == cap:
                nb = np.empty((2 * cap, 2))
                nb[:n] = buf[:n]
                buf = nb
                cap *= 2
            buf[n, 0] = x
            buf[n, 1] = y
            n += 1
            p, gx, gy = peval(ex, ey, c, deg, x, y, px, py)
            g = math.sqrt(gx * gx + gy * gy)
            if g > gmax:
                gmax = g
            if g < sing_tol * gmax:
                status = SINGULAR
                break
            if x * x + y * y > bound * bound:
                status = BOUND
                break
            if hit >= 0:
                d = math.hypot(x - targets[hit, 0], y - targets[hit, 1])
                if d < best_d:
                    best_d = d
                    best_n = n
                    best_s = s
                else:
                    break
            elif s >= arm_len and nt > 0:
                jbest = -1
                dbest = np.inf
                for j in range(nt):
                    d = math.hypot(x - targets[j, 0], y - targets[j, 1])
                    if d < dbest:
                        dbest = d
                        jbest = j
                if dbest < tol_po:
                    hit = jbest
                    best_d = dbest
                    best_n = n
                    best_s = s
            if final:
                status = LENGTH
                break
        if hit < 0:
            return buf[:n].copy(), status, -1, s
        # land on the point of the curve closest to the hit target
        n = best_n
        x = buf[n - 1, 0]
        y = buf[n - 1, 1]
        tx, ty, ok = field(ex, ey, c, deg, x, y, direction, px, py, gfloor)
        if ok:
            sl = (targets[hit, 0] - x) * tx + (targets[hit, 1] - y) * ty
            if abs(sl) < 2.0 * h:
                xn, yn, ok = rk4_project(ex, ey, c, deg, x, y, sl, direction, px, py,
                                         gfloor, newton_tol)
                if ok:
                    buf[n - 1, 0] = xn
                    buf[n - 1, 1] = yn
                    best_s += sl
        return buf[:n].copy(), TARGET, hit, best_s

    def critical_points(ex, ey, c, deg, seeds, maxit, lo, hi):
        m = seeds.shape[0]
        out = np.empty((m, 2))
        ok = np.zeros(m, dtype=np.bool_)
        pval = np.empty(m)
        gnorm = np.empty(m)
        px = np.empty(deg + 1)
        py = np.empty(deg + 1)
        for i in range(m):
            x = seeds[i, 0]
            y = seeds[i, 1]
            good = True
            for _ in range(maxit):
                p, gx, gy, hxx, hxy, hyy = peval2(ex, ey, c, deg, x, y, px, py)
                det = hxx * hyy - hxy * hxy
                hn = abs(hxx) + abs(hyy) + 2.0 * abs(hxy)
                if hn == 0.0 or abs(det) < 1e-14 * hn * hn:
                    good = False
                    break
                dx = -(hyy * gx - hxy * gy) / det
                dy = -(-hxy * gx + hxx * gy) / det
                x += dx
                y += dy
                if x < lo or x > hi or y < lo or y > hi:
                    good = False
                    break
                if abs(dx) + abs(dy) < 1e-15 * (1.0 + abs(x) + abs(y)):
                    break
            p, gx, gy = peval(ex, ey, c, deg, x, y, px, py)
            out[i, 0] = x
            out[i, 1] = y
            ok[i] = good
            pval[i] = p
            gnorm[i] = math.sqrt(gx * gx + gy * gy)
        return out, ok, pval, gnorm

    def bisect_circle(ex, ey, c, deg, cx, cy, r, th0, th1, f0, ptol, maxit):
        px = np.empty(deg + 1)
        py = np.empty(deg + 1)
        a = th0
        b = th1
        fa = f0
        tm = 0.5 * (a + b)
        for _ in range(maxit):
            tm = 0.5 * (a + b)
            fm, gx, gy = peval(ex, ey, c, deg, cx + r * math.cos(tm), cy + r * math.sin(tm), px, py)
            if abs(fm) < ptol:
                break
            if (fm < 0.0) == (fa < 0.0):
                a = tm
                fa = fm
            else:
                b = tm
        return tm

    bisect_circle = jit(bisect_circle)

    def circle_zeros(ex, ey, c, deg, cx, cy, r, nsamp, ptol, maxit):
        px = np.empty(deg + 1)
        py = np.empty(deg + 1)
        vals = np.empty(nsamp)
        for j in range(nsamp):
            th = 2.0 * math.pi * (j + 1) / nsamp
            vals[j], gx, gy = peval(ex, ey, c, deg, cx + r * math.cos(th), cy + r * math.sin(th), px, py)
        roots = np.empty(nsamp)
        nr = 0
        for j in range(nsamp):
            jn = (j + 1) % nsamp
            th0 = 2.0 * math.pi * (j + 1) / nsamp
            th1 = th0 + 2.0 * math.pi / nsamp
            f0 = vals[j]
            f1 = vals[jn]
            if f0 == 0.0:
                roots[nr] = th0
                nr += 1
            elif f1 != 0.0 and (f0 < 0.0) != (f1 < 0.0):
                roots[nr] = bisect_circle(ex, ey, c, deg, cx, cy, r, th0, th1, f0, ptol, maxit)
                nr += 1
        return roots[:nr].copy()

    def assemble(nodes, normals, curvature, weights):
        n = nodes.shape[0]
        k = np.empty((n, n))
        inv2pi = 1.0 / (2.0 * math.pi)
        for i in range(n):
            xi = nodes[i, 0]
            yi = nodes[i, 1]
            nx = normals[i, 0]
            ny = normals[i, 1]
            for j in range(n):
                if i == j:
                    k[i, j] = curvature[i] * weights[i] * 0.5 * inv2pi
                else:
                    dx = xi - nodes[j, 0]
                    dy = yi - nodes[j, 1]
                    k[i, j] = inv2pi * (dx * nx + dy * ny) / (dx * dx + dy * dy) * weights[j]
        return k

    return SimpleNamespace(
        peval=peval,
        bisect_circle=bisect_circle,
        trace=jit(trace),
        critical_points=jit(critical_points),
        circle_zeros=jit(circle_zeros),
        assemble=jit(assemble),
    )


def _assemble_numpy(nodes, normals, curvature, weights):
    d = nodes[:, None, :] - nodes[None, :, :]
    r2 = np.einsum("ijk,ijk->ij", d, d)
    np.fill_diagonal(r2, 1.0)
    num = np.einsum("ijk,ik->ij", d, normals)
    k = num / r2 * weights[None, :] / (2.0 * np.pi)
    np.fill_diagonal(k, curvature * weights / (4.0 * np.pi))
    return k


def _circle_zeros_numpy(ex, ey, c, deg, cx, cy, r, nsamp, ptol, maxit):
    th = 2.0 * np.pi * np.arange(1, nsamp + 1) / nsamp
    x = cx + r * np.cos(th)
    y = cy + r * np.sin(th)
    px = np.ones((deg + 1, nsamp))
    py = np.ones((deg + 1, nsamp))
    for k in range(1, deg + 1):
        px[k] = px[k - 1] * x
        py[k] = py[k - 1] * y
    vals = c @ (px[ex] * py[ey])
    nxt = np.roll(vals, -1)
    exact = vals == 0.0
    cross = (~exact) & (nxt != 0.0) & ((vals < 0.0) != (nxt < 0.0))
    roots = []
    for j in range(nsamp):
        if exact[j]:
            roots.append(th[j])
        elif cross[j]:
            roots.append(_py_loops.bisect_circle(ex, ey, c, deg, cx, cy, r, th[j],
                                                th[j] + 2.0 * np.pi / nsamp, vals[j], ptol, maxit))
    return np.array(roots, dtype=float)


_py_loops = _build(_identity)

numpy_backend = SimpleNamespace(
    name="numpy",
    trace=_py_loops.trace,
    critical_points=_py_loops.critical_points,
    circle_zeros=_circle_zeros_numpy,
    assemble=_assemble_numpy,
)

try:
    from numba import njit as _njit

    _nb = _build(_njit)
    numba_backend = SimpleNamespace(
        name="numba",
        trace=_nb.trace,
        critical_points=_nb.critical_points,
        circle_zeros=_nb.circle_zeros,
        assemble=_nb.assemble,
    )
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba_backend = None


def _numba_requested() -> bool:
    flag = os.environ.get("ALGDOMAIN_NUMBA", "1").strip().lower()
    return flag not in ("0", "false", "off", "no")


backend = numba_backend if (numba_backend is not None and _numba_requested()) else numpy_backend
BACKEND_NAME = backend.name


def poly_arrays(p):
    """Kernel-ready ``(ex, ey, c, degree)`` for a :class:`~algdomain.poly2d.Poly2`."""
    ex, ey = p.exps
    return ex, ey, np.ascontiguousarray(p.coeffs, dtype=float), int(p.degree)
