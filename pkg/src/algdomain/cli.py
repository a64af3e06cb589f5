"""Command-line entry point: ``algdomain {forward,recover,pipeline,circuits,stability}``."""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys

import numpy as np

from . import geometry, topology
from .errors import AlgDomainError
from .geometry import ShapeSpec
from .nptensor import Contrast, TgptMatrix, forward_tgpt
from .pipeline import RecoveryConfig, add_noise, recover_domain, stability_experiment

log = logging.getLogger("algdomain")


def _param(text: str):
    key, sep, val = text.partition("=")
    if not sep:
        raise argparse.ArgumentTypeError(f"expected key=value, got {text!r}")
    try:
        return key, float(val) if key != "variant" else val
    except ValueError:
        return key, val


def _point(text: str):
    try:
        x, y = (float(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected x,y, got {text!r}") from None
    return (x, y)


def _floats(text: str):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="random seed (default 0)")
    common.add_argument("--config", help="JSON file overriding recovery defaults")
    lam = common.add_mutually_exclusive_group()
    lam.add_argument("--lambda", dest="lam", type=float, help="contrast lambda, |lambda| > 1/2")
    lam.add_argument("--contrast-k", type=float, help="conductivity ratio k; lambda = (k+1)/(2(k-1))")
    common.add_argument("-v", "--verbose", action="count", default=0)

    shape = argparse.ArgumentParser(add_help=False)
    shape.add_argument("--shape", required=True, choices=geometry.SHAPE_KINDS)
    shape.add_argument("--param", type=_param, action="append", default=[],
                       metavar="KEY=VALUE", help="shape parameter override (repeatable)")
    shape.add_argument("--n", type=int, default=512, help="boundary nodes for the forward solve")

    p = argparse.ArgumentParser(prog="algdomain", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    f = sub.add_parser("forward", parents=[common, shape], help="shape -> TGPT JSON")
    f.add_argument("--d", type=int, default=2)
    f.add_argument("--out", help="output file (default stdout)")

    r = sub.add_parser("recover", parents=[common], help="TGPT JSON -> candidates and best")
    r.add_argument("tgpt", help="TGPT JSON file")
    r.add_argument("--d", type=int)
    r.add_argument("--out-dir")

    pl = sub.add_parser("pipeline", parents=[common, shape], help="shape -> forward -> noisy recovery")
    pl.add_argument("--d", type=int, default=2)
    pl.add_argument("--noise", type=float, default=0.0, help="relative Frobenius noise level")
    pl.add_argument("--out-dir")

    c = sub.add_parser("circuits", parents=[common], help="arc-graph JSON -> admissible circuits")
    c.add_argument("graph", help="arc graph JSON file")
    c.add_argument("--origin-probe", type=_point)
    c.add_argument("--all", action="store_true", help="also list unfiltered circuits")
    c.add_argument("--out")

    s = sub.add_parser("stability", parents=[common, shape], help="noise levels -> Hausdorff records")
    s.add_argument("--levels", type=_floats, default=[1e-6, 1e-4, 1e-2])
    s.add_argument("--trials", type=int, default=10)
    s.add_argument("--d", type=int)
    s.add_argument("--out-dir")
    return p


def _config_data(args, **overrides) -> dict:
    """Defaults < config file < command-line flags."""
    data = {}
    if args.config:
        with open(args.config) as fh:
            data = json.load(fh)
        if "lambda" in data:
            data["lam"] = data.pop("lambda")
    if args.lam is not None:
        data["lam"] = args.lam
    elif args.contrast_k is not None:
        data["lam"] = Contrast.from_conductivity(args.contrast_k).lam
    if args.seed is not None:
        data["seed"] = args.seed
    data.update({k: v for k, v in overrides.items() if v is not None})
    return data


def _config(args, **overrides) -> RecoveryConfig:
    return RecoveryConfig.from_dict(_config_data(args, **overrides))


def _emit(text: str, path: str | None) -> None:
    if path:
        with open(path, "w") as fh:
            fh.write(text + "\n")
    else:
        sys.stdout.write(text + "\n")


def _shape(args) -> ShapeSpec:
    return ShapeSpec(args.shape, dict(args.param))


def _cmd_forward(args) -> int:
    cfg = _config(args)
    t = forward_tgpt(geometry.make_shape(_shape(args), args.n), cfg.lam, args.d)
    _emit(t.to_json(), args.out)
    return 0


def _cmd_recover(args) -> int:
    with open(args.tgpt) as fh:
        t = TgptMatrix.from_dict(json.load(fh))
    data = _config_data(args, d=args.d, output_dir=args.out_dir)
    # the tensor file carries the contrast it was computed at
    data.setdefault("lam", t.lam)
    cfg = RecoveryConfig.from_dict(data)
    res = recover_domain(t, cfg.lam, cfg)
    _emit(json.dumps(res.summary(), indent=2), None)
    return 0 if res.best is not None else 1


def _cmd_pipeline(args) -> int:
    cfg = _config(args, d=args.d, output_dir=args.out_dir)
    spec = _shape(args)
    t = forward_tgpt(geometry.make_shape(spec, args.n), cfg.lam, args.d)
    if args.noise > 0:
        t = add_noise(t, args.noise, np.random.default_rng(cfg.seed))
    res = recover_domain(t, cfg.lam, cfg)
    out = res.summary()
    if res.best is not None:
        truth = geometry.make_shape(spec, 2**14).nodes
        out["hausdorff_to_truth"] = geometry.hausdorff(res.best.loop, truth)
        if cfg.output_dir:
            svg = geometry.svg_polylines([(truth, {"color": "black"}, True),
                                          (res.best.loop, {"color": "red"}, True)])
            with open(os.path.join(cfg.output_dir, "overlay.svg"), "w") as fh:
                fh.write(svg)
    _emit(json.dumps(out, indent=2), None)
    return 0 if res.best is not None else 1


def _cmd_circuits(args) -> int:
    with open(args.graph) as fh:
        graph = topology.ArcGraph.from_dict(json.load(fh))
    cfg = _config(args)
    allc = topology.elementary_circuits(graph.arcs, cfg.circuit_cap)
    kept = topology.filter_circuits(allc, graph, args.origin_probe, cfg.tol_po)

    def rec(c):
        return {"arcs": list(c.arcs), "vertices": list(c.vertices),
                "labels": [graph.segs[v].label for v in c.vertices]}

    out = {"n_elementary": len(allc), "n_admissible": len(kept), "circuits": [rec(c) for c in kept]}
    if args.all:
        out["elementary"] = [rec(c) for c in allc]
    _emit(json.dumps(out, indent=2), args.out)
    return 0


def _cmd_stability(args) -> int:
    cfg = _config(args, d=args.d)
    rep = stability_experiment(_shape(args), cfg.lam, args.levels, args.trials, cfg.seed,
                               args.n, cfg)
    if args.out_dir:
        os.makedirs(args.out_dir, exist_ok=True)
        with open(os.path.join(args.out_dir, "stability.json"), "w") as fh:
            fh.write(rep.to_json())
        with open(os.path.join(args.out_dir, "stability.csv"), "w") as fh:
            fh.write(rep.to_csv())
    _emit(rep.to_json(), None)
    return 0


COMMANDS = {
    "forward": _cmd_forward,
    "recover": _cmd_recover,
    "pipeline": _cmd_pipeline,
    "circuits": _cmd_circuits,
    "stability": _cmd_stability,
}


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    level = logging.WARNING - 10 * min(args.verbose, 2)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except AlgDomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ValueError, OSError, KeyError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
