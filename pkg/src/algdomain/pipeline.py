"""End-to-end recovery, candidate ranking, and the noise-stability experiment."""

from __future__ import annotations

import contextlib
import dataclasses
import json
import logging
import math
import os
from dataclasses import dataclass, field

import numpy as np

from . import geometry, inversion, levelset, topology
from .errors import AlgDomainError, StageError
from .geometry import ShapeSpec
from .nptensor import Contrast, TgptMatrix, forward_tgpt
from .topology import DomainCandidate

log = logging.getLogger(__name__)

RANK_NODES = 2**10


@dataclass
class RecoveryConfig:
    """Every tunable of the recovery chain; unknown keys are rejected."""

    lam: float = 1.0
    d: int | None = None
    d_max: int = 6
    strict: bool = True
    t_step: float = levelset.T_STEP
    tol_po: float = levelset.TOL_PO
    loop_tol: float | None = None
    bound: float = levelset.BOUND
    box: tuple = levelset.BOX
    tol_bif: float = levelset.TOL_BIF
    r_ini: float = levelset.R_INI
    r_step: float = levelset.R_STEP
    n_circle: int = levelset.N_CIRCLE
    origin_probe: tuple | None = (0.0, 0.0)
    dedup_tol: float = topology.DEDUP_HAUSDORFF
    circuit_cap: int = topology.CIRCUIT_CAP
    rank_nodes: int = RANK_NODES
    rank_order: int = 1
    seed: int = 0
    output_dir: str | None = None

    def __post_init__(self):
        Contrast(self.lam)
        if self.d is not None and self.d < 1:
            raise ValueError("d must be >= 1")
        if self.d_max < 1 or self.rank_order < 1:
            raise ValueError("d_max and rank_order must be >= 1")
        self.box = tuple(float(v) for v in self.box)
        if self.origin_probe is not None:
            self.origin_probe = tuple(float(v) for v in self.origin_probe)

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["box"] = list(self.box)
        d["origin_probe"] = None if self.origin_probe is None else list(self.origin_probe)
        return d

    @classmethod
    def from_dict(cls, data: dict) -> "RecoveryConfig":
        names = {f.name for f in dataclasses.fields(cls)}
        data = dict(data)
        if "lambda" in data:
            data["lam"] = data.pop("lambda")
        bad = set(data) - names
        if bad:
            raise ValueError(f"unknown config keys: {sorted(bad)}")
        return cls(**data)

    def replace(self, **kw) -> "RecoveryConfig":
        return dataclasses.replace(self, **kw)


@contextlib.contextmanager
def _stage(name: str):
    try:
        yield
    except StageError:
        raise
    except (AlgDomainError, ValueError, np.linalg.LinAlgError) as exc:
        raise StageError(name, exc) from exc


@dataclass
class RecoveryResult:
    polynomial: object
    diagnostics: inversion.Diagnostics
    smooth_loop: bool
    bifurcation_points: list = field(default_factory=list)
    segmentation_points: list = field(default_factory=list)
    graph: topology.ArcGraph | None = None
    circuits: list = field(default_factory=list)
    candidates: list = field(default_factory=list)
    messages: list = field(default_factory=list)

    @property
    def best(self) -> DomainCandidate | None:
        return self.candidates[0] if self.candidates else None

    def summary(self) -> dict:
        b = self.best
        return {
            "polynomial": self.polynomial.to_dict(),
            "diagnostics": self.diagnostics.to_dict(),
            "smooth_loop": self.smooth_loop,
            "n_bifurcation_points": len(self.bifurcation_points),
            "n_segmentation_points": len(self.segmentation_points),
            "n_circuits": len(self.circuits),
            "candidates": [c.to_dict() for c in self.candidates],
            "best": None if b is None else b.to_dict(),
            "messages": list(self.messages),
        }


def tgpt_discrepancy(a: TgptMatrix, b: TgptMatrix) -> float:
    """Sum of squared entry differences between two TGPTs of equal order."""
    if a.shape != b.shape:
        raise ValueError("TGPT shapes differ")
    return float(np.sum((a.entries - b.entries) ** 2))


def relative_error(tc: TgptMatrix, ref: TgptMatrix) -> float:
    """``|T_c - T_ref|_F / |T_ref|_F``."""
    norm = np.linalg.norm(ref.entries)
    if norm == 0:
        raise ValueError("reference TGPT is zero")
    return float(np.linalg.norm(tc.entries - ref.entries) / norm)


def _reference(t_ref: TgptMatrix, order: int) -> TgptMatrix:
    return t_ref.first_order() if order == 1 else inversion.truncate(t_ref, order)


def rank_domains(cands, t_ref: TgptMatrix, lam, n_nodes: int = RANK_NODES, order: int = 1,
                 diagnostics: list | None = None) -> list[DomainCandidate]:
    """Score candidates by relative Frobenius error of their order-``order`` TGPT.

    Each loop is resampled to ``n_nodes`` arclength-uniform nodes and
    forward-solved. Candidates whose resampling or solve fails are dropped and
    reported through ``diagnostics``. Ties keep candidate index order.
    """
    cands = list(cands)
    if not cands:
        raise ValueError("no candidates to rank")
    ref = _reference(t_ref, order)
    if not np.any(ref.entries):
        raise ValueError("reference TGPT is zero")
    scored = []
    for c in cands:
        try:
            curve = geometry.resample(c.loop, n_nodes)
            tc = forward_tgpt(curve, lam, order)
        except (AlgDomainError, ValueError) as exc:
            msg = f"candidate {c.index} excluded from ranking: {exc}"
            log.warning(msg)
            if diagnostics is not None:
                diagnostics.append(msg)
            continue
        c.score = relative_error(tc, ref)
        scored.append(c)
    scored.sort(key=lambda c: (c.score, c.index))
    return scored


def recover_domain(t: TgptMatrix, lam=None, config: RecoveryConfig | None = None) -> RecoveryResult:
    """Full chain from a TGPT to ranked domain candidates.

    Errors raised inside a stage are re-raised as :class:`StageError` tagged
    with the stage name. An empty circuit set is a valid outcome with no
    candidates.
    """
    cfg = config or RecoveryConfig()
    lam = cfg.lam if lam is None else float(lam)
    Contrast(lam)
    with _stage("inversion"):
        d = cfg.d if cfg.d is not None else inversion.degree_scan(t, min(cfg.d_max, t.d)).d
        poly, diag = inversion.recover_coefficients(inversion.truncate(t, d), strict=cfg.strict)
    res = RecoveryResult(poly, diag, False)
    res.messages.extend(diag.warnings)

    with _stage("check_loop"):
        loop = levelset.check_loop(poly, cfg.t_step, cfg.tol_po, cfg.loop_tol, cfg.bound)
    if loop is not None:
        res.smooth_loop = True
        cands = [DomainCandidate(geometry.orient_ccw(loop), None)]
    else:
        cands = _singular_candidates(poly, cfg, res)
    if cands:
        with _stage("rank"):
            res.candidates = rank_domains(cands, t, lam, cfg.rank_nodes, cfg.rank_order, res.messages)
    if not res.candidates:
        res.messages.append("no admissible candidate")
    if cfg.output_dir:
        write_artifacts(res, t, cfg)
    return res


def _singular_candidates(poly, cfg: RecoveryConfig, res: RecoveryResult) -> list:
    with _stage("bifurcation"):
        bifs = levelset.bifurcation_points(poly, cfg.box, cfg.tol_bif, escalate=True)
    res.bifurcation_points = bifs
    if not bifs:
        res.messages.append("level set is neither a closed loop nor singular inside the box")
        return []
    with _stage("segmentation"):
        segs = levelset.segmentation_points(poly, bifs, cfg.r_ini, cfg.r_step, cfg.n_circle)
    res.segmentation_points = segs
    with _stage("arcs"):
        graph = topology.find_arcs(poly, segs, cfg.bound, cfg.t_step, cfg.tol_po, len(bifs))
    res.graph = graph
    res.messages.extend(graph.diagnostics)
    with _stage("circuits"):
        allc = topology.elementary_circuits(graph.arcs, cfg.circuit_cap)
        circuits = topology.filter_circuits(allc, graph, cfg.origin_probe, cfg.tol_po)
    res.circuits = circuits
    cands = []
    with _stage("construct"):
        for c in circuits:
            try:
                cand = topology.construct_domain(poly, c, graph, cfg.t_step, cfg.tol_po, cfg.bound)
            except AlgDomainError as exc:
                res.messages.append(f"circuit {c.vertices} rejected: {exc}")
                continue
            cands.append(cand)
        cands = topology.dedupe_candidates(cands, cfg.dedup_tol)
    for k, c in enumerate(cands):
        c.index = k
    return cands


def _write(path: str, text: str) -> None:
    with open(path, "w") as fh:
        fh.write(text)


def write_artifacts(res: RecoveryResult, t: TgptMatrix, cfg: RecoveryConfig) -> None:
    """Dump every intermediate product into ``cfg.output_dir``."""
    out = cfg.output_dir
    os.makedirs(out, exist_ok=True)
    _write(os.path.join(out, "config.json"), json.dumps(cfg.to_dict(), indent=2))
    _write(os.path.join(out, "tgpt.json"), t.to_json())
    _write(os.path.join(out, "polynomial.json"), res.polynomial.to_json())
    _write(os.path.join(out, "diagnostics.json"), json.dumps(res.diagnostics.to_dict(), indent=2))
    _write(os.path.join(out, "levelset.json"),
           levelset.to_json(res.bifurcation_points, res.segmentation_points))
    if res.graph is not None:
        _write(os.path.join(out, "arcs.json"), res.graph.to_json(polylines=True))
        _write(os.path.join(out, "circuits.json"), json.dumps(
            [{"arcs": list(c.arcs), "vertices": list(c.vertices)} for c in res.circuits]))
        lines = [a.polyline for a in res.graph.arcs if a.polyline is not None]
        if lines:
            _write(os.path.join(out, "levelset.svg"),
                   levelset.to_svg(lines, res.bifurcation_points, res.segmentation_points))
    for c in res.candidates:
        _write(os.path.join(out, f"candidate_{c.index}.csv"), c.to_csv())
    if res.candidates:
        _write(os.path.join(out, "candidates.svg"), topology.candidates_svg(res.candidates))
    _write(os.path.join(out, "result.json"), json.dumps(res.summary(), indent=2))


# -- stability -------------------------------------------------------------------

TRUTH_NODES = 2**14


@dataclass
class StabilityRecord:
    eps: float
    distances: list
    censored: int = 0

    @property
    def median(self) -> float:
        d = [x for x in self.distances if math.isfinite(x)]
        return float(np.median(d)) if d else math.nan

    def to_dict(self) -> dict:
        return {"eps": self.eps, "distances": [None if not math.isfinite(x) else x for x in self.distances],
                "censored": self.censored, "median": None if math.isnan(self.median) else self.median}


@dataclass
class StabilityReport:
    records: list
    floor: float
    eta: float
    log_c: float
    censored: int

    def to_dict(self) -> dict:
        return {"records": [r.to_dict() for r in self.records], "floor": self.floor,
                "eta": self.eta, "C": math.exp(self.log_c) if math.isfinite(self.log_c) else None,
                "censored": self.censored}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    def to_csv(self) -> str:
        rows = ["eps,trial,hausdorff"]
        for r in self.records:
            for k, x in enumerate(r.distances):
                rows.append(f"{r.eps!r},{k},{'' if not math.isfinite(x) else repr(x)}")
        return "\n".join(rows) + "\n"


def add_noise(t: TgptMatrix, eps: float, rng: np.random.Generator) -> TgptMatrix:
    """Gaussian perturbation rescaled to Frobenius norm ``eps * |T|_F``."""
    e = rng.standard_normal(t.shape)
    e *= eps * np.linalg.norm(t.entries) / np.linalg.norm(e)
    return t.with_entries(t.entries + e)


def fit_power_law(eps, dist) -> tuple[float, float]:
    """Least-squares slope and intercept of ``log dist`` against ``log eps``."""
    x = np.log(np.asarray(eps, dtype=float))
    y = np.log(np.asarray(dist, dtype=float))
    if len(x) < 2 or np.ptp(x) == 0:
        return math.nan, math.nan
    slope, icpt = np.polyfit(x, y, 1)
    return float(slope), float(icpt)


def _trial_distance(t, lam, cfg, truth) -> float:
    try:
        res = recover_domain(t, lam, cfg)
    except AlgDomainError as exc:
        log.info("stability trial censored: %s", exc)
        return math.nan
    if res.best is None:
        return math.nan
    return geometry.hausdorff(res.best.loop, truth)


def stability_experiment(spec: ShapeSpec, lam, levels, trials: int = 10, seed: int = 0,
                         n_nodes: int = 512, config: RecoveryConfig | None = None) -> StabilityReport:
    """Hausdorff error of the recovered boundary against TGPT noise level.

    The truth boundary is sampled at ``2**14`` nodes so the node-set distance
    is not dominated by the quadrature spacing. Failed recoveries count as
    censored and are left out of the power-law fit.
    """
    levels = [float(e) for e in levels]
    if any(not 0 < e < 1 for e in levels):
        raise ValueError("noise levels must lie in (0, 1)")
    if trials < 5:
        raise ValueError("at least 5 trials per level")
    lam = Contrast(float(lam)).lam
    cfg = (config or RecoveryConfig()).replace(lam=lam, output_dir=None, strict=False)
    t = forward_tgpt(geometry.make_shape(spec, n_nodes), lam, cfg.d or cfg.d_max)
    if cfg.d is None:
        d = inversion.degree_scan(t, t.d).d
        cfg = cfg.replace(d=d)
    t = inversion.truncate(t, cfg.d)
    truth = geometry.make_shape(spec, TRUTH_NODES).nodes
    floor = _trial_distance(t, lam, cfg, truth)
    records = []
    for i, eps in enumerate(levels):
        dist = []
        for k in range(trials):
            rng = np.random.default_rng([seed, i, k])
            dist.append(_trial_distance(add_noise(t, eps, rng), lam, cfg, truth))
        records.append(StabilityRecord(eps, dist, sum(not math.isfinite(x) for x in dist)))
    xs = [r.eps for r in records for x in r.distances if math.isfinite(x) and x > 0]
    ys = [x for r in records for x in r.distances if math.isfinite(x) and x > 0]
    eta, log_c = fit_power_law(xs, ys)
    return StabilityReport(records, floor, eta, log_c, sum(r.censored for r in records))
