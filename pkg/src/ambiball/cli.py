"""Command-line front end.

Subcommands: ``distance``, ``ball-superset``, ``maximize``, ``verify`` and
``empirical``. Exit status is 0 on success, 2 on invalid input (with a JSON
diagnostic on stderr) and 3 when a cross-check fails.
"""
from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import math
import os
import sys
import time
from contextlib import contextmanager
from dataclasses import asdict, dataclass
from fractions import Fraction

import numpy as np

from . import __version__, lp, oracle
from .distances import kantorovich, prokhorov
from .errors import AmbiballError, ParseError, SpaceMismatch
from .extreme_sets import CenterSpec, candidate_records, family_classes, pi_bar_families
from .measures import DiscreteMeasure
from .metric_space import FiniteMetricSpace
from .optimizer import (
    LinearObjective,
    empirical_center,
    maximize_linear_lp,
    maximize_linear_superset,
)

EXIT_OK, EXIT_INVALID, EXIT_CHECK_FAILED = 0, 2, 3
AGREE_TOL = 1e-7


class ConfigError(AmbiballError, ValueError):
    code = "config"


@dataclass(frozen=True)
class RunConfig:
    command: str
    lp_tol: float = 1e-10
    dedup_tol: float = 1e-9
    seed: int = 0
    method: str = "both"
    metric: str = "prokhorov"
    threads: int = 1

    def __post_init__(self):
        for name in ("lp_tol", "dedup_tol"):
            v = getattr(self, name)
            if not (0 < v <= 1e-3):
                raise ConfigError(f"{name} must lie in (0, 1e-3], got {v}")
        if self.threads < 1:
            raise ConfigError("AMBIBALL_THREADS must be a positive integer")

    def digest(self) -> str:
        blob = json.dumps(asdict(self), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]


@contextmanager
def tolerances(cfg: RunConfig):
    saved = lp.LP_TOL, oracle.VERTEX_TOL
    lp.LP_TOL, oracle.VERTEX_TOL = cfg.lp_tol, cfg.dedup_tol
    try:
        yield
    finally:
        lp.LP_TOL, oracle.VERTEX_TOL = saved


# ------------------------------------------------------------------ output

def _fmt_float(x: float) -> str:
    if math.isnan(x) or math.isinf(x):
        raise ValueError("non-finite value in output")
    s = format(x, ".17g")
    if "." not in s and "e" not in s:
        s += ".0"
    return s


def dumps(obj, indent: int = 2, _level: int = 0) -> str:
    """JSON with every float at 17 significant digits and fractions as strings."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, (float, np.floating)):
        return _fmt_float(float(obj))
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, Fraction):
        return json.dumps(str(obj))
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {dumps(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        if not len(obj):
            return "[]"
        if all(not isinstance(v, (dict, list, tuple, np.ndarray)) for v in obj):
            return "[" + ", ".join(dumps(v, indent, _level + 1) for v in obj) + "]"
        items = [pad + dumps(v, indent, _level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _csv(rows: list, header: list) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_cell(v) for v in r])
    return buf.getvalue()


def _cell(v):
    if isinstance(v, float):
        return _fmt_float(v)
    if isinstance(v, Fraction):
        return str(v)
    return v


def _emit(text: str, out: str | None):
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _envelope(cfg: RunConfig, body: dict) -> dict:
    return {"version": __version__, "config_hash": cfg.digest(), **body}


# ------------------------------------------------------------------- input

def _load_json(path: str):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path} is not valid JSON: {exc.msg} at line {exc.lineno}") from None


def _load_space(args, *embedded) -> FiniteMetricSpace:
    """The ``--space`` file, else a space embedded in a measure file; all must agree."""
    spaces = [FiniteMetricSpace.from_dict(d["space"]) for d in embedded if isinstance(d, dict) and "space" in d]
    if args.space:
        spaces.insert(0, FiniteMetricSpace.from_dict(_load_json(args.space)))
    if not spaces:
        raise ParseError("no metric space given; pass --space or embed 'space' in the measure file")
    for s in spaces[1:]:
        if s != spaces[0]:
            raise SpaceMismatch("embedded space differs from the --space file")
    return spaces[0]


def _parse_eps(text: str, exact: bool):
    try:
        eps = Fraction(text) if exact or "/" in text else float(text)
    except (ValueError, ZeroDivisionError):
        raise ParseError(f"eps must be a number, got {text!r}") from None
    if eps < 0 or (isinstance(eps, float) and not math.isfinite(eps)):
        raise ParseError("eps must be a finite nonnegative number")
    return eps


def _measure(space, data, exact) -> DiscreteMeasure:
    return DiscreteMeasure.from_dict(space, data, exact=True if exact else None)


def _center(args, exact: bool) -> CenterSpec:
    data = _load_json(args.mu)
    space = _load_space(args, data)
    eps = _parse_eps(args.eps, exact)
    # the center and radius share one arithmetic
    mu = DiscreteMeasure.from_dict(space, data, exact=exact or isinstance(eps, Fraction))
    return CenterSpec.from_measure(mu, eps)


# ---------------------------------------------------------------- commands

def cmd_distance(args, cfg) -> int:
    d1, d2 = _load_json(args.mu1), _load_json(args.mu2)
    space = _load_space(args, d1, d2)
    mu1, mu2 = _measure(space, d1, args.exact), _measure(space, d2, args.exact)
    out = {}
    if args.metric in ("prokhorov", "both"):
        out["prokhorov"] = prokhorov(mu1, mu2)
    if args.metric in ("kantorovich", "both"):
        out["kantorovich"] = kantorovich(mu1, mu2)
    if args.format == "csv":
        _emit(_csv(list(out.items()), ["metric", "value"]), args.out)
    elif args.metric != "both" and not args.out:
        # a single number is easiest to consume in scripts
        _emit(dumps(next(iter(out.values()))) + "\n", None)
    else:
        _emit(dumps(_envelope(cfg, out)) + "\n", args.out)
    return EXIT_OK


def _record(cand) -> dict:
    return {
        "family": cand.family.index.tag,
        "x": cand.family.labels(),
        "gamma": list(cand.gamma),
        "measure": cand.measure.to_dict()["atoms"],
    }


def cmd_ball_superset(args, cfg) -> int:
    center = _center(args, args.exact)
    if args.metric == "prokhorov":
        fams = list(family_classes(center))
        if args.representatives:
            fams = [(c.representative, c.region) for c in fams]
    else:
        fams = list(pi_bar_families(center, mode="kantorovich"))
    cands = list(candidate_records(fams))
    records = [_record(c) for c in cands]
    digits = max(1, round(-math.log10(cfg.dedup_tol)))
    distinct = {}
    for c in cands:
        distinct.setdefault(c.measure.key(digits), c.measure)
    measures = [distinct[k].to_dict()["atoms"] for k in sorted(distinct, key=lambda k: [(p, float(w)) for p, w in k])]
    if args.format == "csv":
        rows = [(r["family"], " ".join(r["x"]), " ".join(str(_cell(g)) for g in r["gamma"]),
                 " ".join(f"{lab}:{_cell(w)}" for lab, w in r["measure"])) for r in records]
        _emit(_csv(rows, ["family", "x", "gamma", "measure"]), args.out)
    else:
        body = {"mode": args.metric, "eps": center.eps, "records": records, "measures": measures}
        _emit(dumps(_envelope(cfg, body)) + "\n", args.out)
    return EXIT_OK


def cmd_maximize(args, cfg) -> int:
    center = _center(args, args.exact)
    f = LinearObjective.from_dict(center.space, _load_json(args.objective))
    results = {}
    if args.method in ("lp", "both"):
        results["lp"] = maximize_linear_lp(center, f, args.metric)
    if args.method in ("superset", "both"):
        results["superset"] = maximize_linear_superset(center, f, args.metric)
    status = EXIT_OK
    gap = None
    if len(results) == 2:
        gap = abs(float(results["lp"].value) - float(results["superset"].value))
        if gap > AGREE_TOL:
            status = EXIT_CHECK_FAILED
    best = results.get("lp") or results["superset"]
    if args.format == "csv":
        rows = [(k, r.value, " ".join(f"{lab}:{_cell(w)}" for lab, w in r.argmax.to_dict()["atoms"])) for k, r in results.items()]
        _emit(_csv(rows, ["method", "value", "argmax"]), args.out)
    else:
        body = {
            "mode": args.metric,
            "value": best.value,
            "argmax": best.argmax.to_dict(),
            "witness": best.witness.to_dict(),
            "methods": {k: {"value": r.value, "argmax": r.argmax.to_dict()} for k, r in results.items()},
        }
        if gap is not None:
            body["disagreement"] = gap
        _emit(dumps(_envelope(cfg, body)) + "\n", args.out)
    if status != EXIT_OK:
        _diag("method_disagreement", f"lp and superset values differ by {gap:.3g}")
    return status


def _verify_one(center: CenterSpec, mode: str) -> dict:
    rep = oracle.verify_support_bound(center, mode)
    violations = len(rep.violations)
    if mode == "prokhorov":
        violations += oracle.verify_projection_cover(center).violations
    return {"violations": violations, "max_support": max(rep.max_gamma_support, rep.max_ball_support), "bound": rep.bound}


def cmd_verify(args, cfg) -> int:
    t0 = time.perf_counter()
    rng = np.random.default_rng(cfg.seed)
    rows = []
    if args.mu:
        rows.append(("input", _verify_one(_center(args, args.exact), args.metric)))
    for t in range(args.trials):
        rows.append((f"random{t}", _verify_one(oracle.random_instance(rng), args.metric)))
    violations = sum(r["violations"] for _, r in rows)
    max_support = max((r["max_support"] for _, r in rows), default=0)
    if args.format == "csv":
        _emit(_csv([(name, r["violations"], r["max_support"], r["bound"]) for name, r in rows],
                   ["instance", "violations", "max_support", "bound"]), args.out)
    else:
        body = {"mode": args.metric, "seed": cfg.seed, "instances": len(rows), "violations": violations,
                "max_support": max_support}
        if not args.omit_runtime:
            body["runtime"] = round(time.perf_counter() - t0, 3)
        _emit(dumps(_envelope(cfg, body)) + "\n", args.out)
    if violations:
        _diag("verification_failed", f"{violations} violations")
        return EXIT_CHECK_FAILED
    return EXIT_OK


def cmd_empirical(args, cfg) -> int:
    data = _load_json(args.samples)
    samples = data.get("samples") if isinstance(data, dict) else data
    if not isinstance(samples, list) or not samples:
        raise ParseError("samples file must hold a nonempty list of point labels")
    space = _load_space(args, data)
    eps = _parse_eps(args.eps, True) if args.eps is not None else Fraction(0)
    center = empirical_center(space, samples, eps)
    mu = center.measure()
    if args.format == "csv":
        _emit(_csv([(space.labels[p], w) for p, w in mu.atoms], ["point", "weight"]), args.out)
    else:
        body = mu.to_dict()
        if args.embed_space:
            body["space"] = space.to_dict()
        _emit(dumps(body) + "\n", args.out)
    return EXIT_OK


# ------------------------------------------------------------------ parser

def _common(p: argparse.ArgumentParser):
    p.add_argument("--space", help="metric space JSON ({labels, dist} or {points, metric})")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--out", help="write output here instead of stdout")
    p.add_argument("--lp-tol", type=float, default=1e-10)
    p.add_argument("--dedup-tol", type=float, default=1e-9)
    p.add_argument("--exact", action="store_true", help="rational arithmetic throughout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ambiball", description="Prokhorov and Kantorovich balls around discrete measures.")
    parser.add_argument("--version", action="version", version=f"ambiball {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("distance", help="distance between two measures")
    p.add_argument("--mu1", required=True)
    p.add_argument("--mu2", required=True)
    p.add_argument("--metric", choices=("prokhorov", "kantorovich", "both"), default="both")
    _common(p)

    p = sub.add_parser("ball-superset", help="corner measures of the explicit family superset")
    p.add_argument("--mu", required=True)
    p.add_argument("--eps", required=True)
    p.add_argument("--metric", choices=("prokhorov", "kantorovich"), default="prokhorov")
    p.add_argument("--representatives", action="store_true", help="one family per adjacency class")
    _common(p)

    p = sub.add_parser("maximize", help="worst-case expectation over the ball")
    p.add_argument("--mu", required=True)
    p.add_argument("--eps", required=True)
    p.add_argument("--objective", required=True)
    p.add_argument("--metric", choices=("prokhorov", "kantorovich"), default="prokhorov")
    p.add_argument("--method", choices=("lp", "superset", "both"), default="both")
    _common(p)

    p = sub.add_parser("verify", help="oracle checks on an instance and random instances")
    p.add_argument("--mu")
    p.add_argument("--eps", default="0.3")
    p.add_argument("--metric", choices=("prokhorov", "kantorovich"), default="prokhorov")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, default=10)
    p.add_argument("--omit-runtime", action="store_true", help="leave out wall-clock time for byte-stable output")
    _common(p)

    p = sub.add_parser("empirical", help="empirical measure of a list of samples")
    p.add_argument("--samples", required=True)
    p.add_argument("--eps")
    p.add_argument("--embed-space", action="store_true")
    _common(p)
    return parser


COMMANDS = {
    "distance": cmd_distance,
    "ball-superset": cmd_ball_superset,
    "maximize": cmd_maximize,
    "verify": cmd_verify,
    "empirical": cmd_empirical,
}


def _diag(code: str, message: str):
    sys.stderr.write(json.dumps({"error": code, "message": message}) + "\n")


def _threads() -> int:
    raw = os.environ.get("AMBIBALL_THREADS", "1")
    try:
        return int(raw)
    except ValueError:
        raise ConfigError(f"AMBIBALL_THREADS must be an integer, got {raw!r}") from None


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = RunConfig(
            command=args.command,
            lp_tol=args.lp_tol,
            dedup_tol=args.dedup_tol,
            seed=getattr(args, "seed", 0),
            method=getattr(args, "method", "both"),
            metric=getattr(args, "metric", "prokhorov"),
            threads=_threads(),
        )
        with tolerances(cfg):
            return COMMANDS[args.command](args, cfg)
    except AmbiballError as exc:
        _diag(exc.code, str(exc))
        return EXIT_INVALID
    except (ValueError, KeyError, IndexError) as exc:
        _diag("invalid_input", str(exc))
        return EXIT_INVALID


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
