"""Command-line front end.

Exit codes: 0 pass, 1 IO or parse error, 2 validation or certification
failure, 3 resource cap (clique enumeration).
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Sequence

from . import catalog, covers, embedding, metric, moduli
from .errors import CliqueCapExceeded, InvalidMatrix, StoneError
from .serialize import decode_value, dumps, encode_value

EXIT_OK, EXIT_IO, EXIT_FAIL, EXIT_CAP = 0, 1, 2, 3
PARAMETRIC = ("linf-grid", "c0-grid")


@dataclass
class RunConfig:
    """One invocation: a single input source, parameters, an optional output path."""

    subcommand: str
    input: str | None = None
    generator: str | None = None
    gen_params: dict[str, Any] = field(default_factory=dict)
    seed: int = 0
    params: dict[str, Any] = field(default_factory=dict)
    output: str | None = None

    def __post_init__(self):
        if self.input is not None and self.generator is not None:
            raise UsageError("give either an input file or --gen, not both")
        if self.needs_space and self.input is None and self.generator is None:
            raise UsageError("no input: give a space file or --gen")

    @property
    def needs_space(self) -> bool:
        return self.subcommand != "report" and self.params.get("kind") not in PARAMETRIC


class UsageError(Exception):
    pass


class InputError(Exception):
    pass


# -- input / output -------------------------------------------------------------

def _read_json(path: str) -> Any:
    try:
        text = sys.stdin.read() if path == "-" else Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror or exc}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not valid JSON: {exc}") from exc


def load_space(cfg: RunConfig) -> metric.FiniteMetricSpace:
    if cfg.generator is not None:
        return metric.generate_space(cfg.generator, cfg.gen_params, cfg.seed)
    obj = _read_json(cfg.input)
    if not isinstance(obj, dict):
        raise InputError("space JSON must be an object")
    try:
        return metric.space_from_json(obj)
    except (KeyError, TypeError) as exc:
        raise InputError(f"malformed space JSON: {exc}") from exc


def load_tree(cfg: RunConfig) -> catalog.RootedTree:
    if cfg.generator == "weighted-tree":
        p = cfg.gen_params
        if "edges" in p:
            return catalog.RootedTree(tuple(tuple(e) for e in p["edges"]), p.get("root", p["edges"][0][0]))
        import numpy as np
        rng = np.random.default_rng(cfg.seed)
        edges = metric.random_tree_edges(int(p.get("n", 8)), rng, float(p.get("max_length", 1.0)),
                                         bool(p.get("integer", False)))
        return catalog.RootedTree(tuple(tuple(e) for e in edges), 0)
    if cfg.input is None:
        raise UsageError("tree covers need a tree JSON input or --gen weighted-tree")
    obj = _read_json(cfg.input)
    if not isinstance(obj, dict) or "tree" not in obj:
        raise InputError("tree covers need {\"tree\": {\"edges\": ..., \"root\": ...}}")
    return catalog.RootedTree.from_json(obj)


def emit(cfg: RunConfig, text: str) -> None:
    if not text.endswith("\n"):
        text += "\n"
    if cfg.output in (None, "-"):
        sys.stdout.write(text)
    else:
        try:
            Path(cfg.output).write_text(text)
        except OSError as exc:
            raise InputError(f"cannot write {cfg.output}: {exc.strerror or exc}") from exc


def _parse_kv(items: Sequence[str]) -> dict[str, Any]:
    out: dict[str, Any] = {}
    for it in items or ():
        if "=" not in it:
            raise UsageError(f"expected key=value, got {it!r}")
        k, v = it.split("=", 1)
        try:
            out[k] = json.loads(v)
        except json.JSONDecodeError:
            out[k] = v
    return out


def _parse_grid(text: str | None) -> list[float] | None:
    if text is None:
        return None
    try:
        return [decode_value(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise UsageError(f"bad grid {text!r}") from exc


def _parse_scales(text: str | None) -> tuple[int, int] | None:
    if text is None:
        return None
    try:
        lo, hi = text.split("..")
        return int(lo), int(hi)
    except ValueError as exc:
        raise UsageError(f"--scales expects n_min..n_max, got {text!r}") from exc


# -- subcommands ----------------------------------------------------------------

def cmd_validate(cfg: RunConfig) -> int:
    try:
        space = load_space(cfg)
    except InvalidMatrix as exc:
        diag = {"valid": False, "error": type(exc).__name__, "message": str(exc)}
        if hasattr(exc, "witness"):
            diag["witness"] = list(exc.witness)
        emit(cfg, dumps(diag))
        return EXIT_FAIL
    emit(cfg, dumps({"valid": True, "n": space.n, "diameter": space.diameter,
                     "min_positive_distance": space.min_positive_distance}))
    return EXIT_OK


def cmd_delta(cfg: RunConfig) -> int:
    space = load_space(cfg)
    kinds = [moduli.COARSE, moduli.UNIFORM] if cfg.params["kind"] == "both" else [cfg.params["kind"]]
    grid = cfg.params.get("grid")
    curves = [moduli.modulus_curve(space, k, grid, include_default=grid is None) for k in kinds]
    oracle = None
    status = EXIT_OK
    if cfg.params.get("oracle"):
        table = moduli.oracle_table(space)
        oracle = [moduli.ModulusCurve(c.kind, tuple(
            (a, table.coarse(a) if c.kind == moduli.COARSE else table.uniform(a)) for a, _ in c.samples))
            for c in curves]
        if any(c.samples != o.samples for c, o in zip(curves, oracle)):
            status = EXIT_FAIL
    emit(cfg, moduli.curves_to_csv(curves, oracle))
    return status


def _finite_cover(cfg: RunConfig, kind: str) -> tuple[covers.Cover, catalog.CoverGuarantee]:
    p = cfg.params
    if kind == "clique":
        space = load_space(cfg)
        R = float(p["R"])
        return catalog.clique_cover(space, R), catalog.clique_guarantee(R)
    if kind == "greedy":
        space = load_space(cfg)
        r, eps = float(p["r"]), float(p["eps"])
        return catalog.greedy_separable_cover(space, r, eps), catalog.greedy_guarantee(r, eps)
    tree = load_tree(cfg)
    R, n = float(p["R"]), int(p["n"])
    return catalog.tree_cover(tree, R, n), catalog.tree_guarantee(R, n)


def _parametric_query(kind: str, p: dict[str, Any], query: Any) -> dict[str, Any]:
    if kind == "linf-grid":
        g = catalog.LinfGridCover(int(p.get("N", len(query))), int(p["n"]))
        x = g.locate(query)
        return {
            "kind": kind, "point": list(query), "locate": list(x),
            "contains_locate": g.contains(query, x),
            "multiplicity": g.multiplicity(query), "multiplicity_bound": g.multiplicity_bound,
            "diameter": g.diameter,
        }
    g = catalog.C0PlusGridCover(float(p["R"]), int(p["n"]))
    f = {str(k): float(v) for k, v in dict(query).items()}
    idx = g.locate(f)
    M = sorted(idx.support)
    return {
        "kind": kind, "point": f, "locate": dict(idx.offsets),
        "contains_locate": g.contains(f, idx),
        "multiplicity": len(g.containing_indices(f, M)),
        "multiplicity_bound": g.multiplicity_bound(len(M)),
        "diameter_bound": g.diameter_bound,
    }


def cmd_cover(cfg: RunConfig) -> int:
    kind = cfg.params["kind"]
    if kind in PARAMETRIC:
        query = cfg.params.get("query")
        if query is None:
            raise UsageError(f"{kind} covers are parametric; pass --query with a point")
        out = _parametric_query(kind, cfg.params, query)
        out["pass"] = out["contains_locate"] and out["multiplicity"] <= out["multiplicity_bound"]
        emit(cfg, dumps(out))
        return EXIT_OK if out["pass"] else EXIT_FAIL
    cover, guarantee = _finite_cover(cfg, kind)
    check = catalog.check_guarantee(cover, guarantee)
    out = {
        "kind": kind,
        "cover": covers.cover_to_json(cover),
        "metrics": cover.metrics.to_json(),
        "check": check,
        "pass": check["pass"],
    }
    emit(cfg, dumps(out))
    return EXIT_OK if check["pass"] else EXIT_FAIL


def cmd_embed(cfg: RunConfig) -> int:
    p = cfg.params
    conf = embedding.EmbeddingConfig(
        t=p["t"], eps=p["eps"], lam=p["lam"], base_point=p["base_point"], C=p.get("C"),
        D=p.get("D", 0.0), scale_range=p.get("scales"), cover_kind=p["cover_kind"],
    )
    tree = None
    if conf.cover_kind == "tree":
        tree = load_tree(cfg)
        space = tree.to_space()
    else:
        space = load_space(cfg)
    emb = embedding.embed_space(space, conf, tree=tree)
    emit(cfg, dumps(embedding.embedding_to_json(emb)))
    return EXIT_OK if emb.report.passed else EXIT_FAIL


def _read_table(path: str) -> list[dict[str, Any]]:
    try:
        text = sys.stdin.read() if path == "-" else Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror or exc}") from exc
    stripped = text.lstrip()
    if stripped.startswith("{") or stripped.startswith("["):
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InputError(f"{path} is not valid JSON: {exc}") from exc
        rows = obj if isinstance(obj, list) else [obj]
        return [_flatten(r) for r in rows]
    return list(csv.DictReader(io.StringIO(text)))


def _flatten(obj: Any, prefix: str = "") -> dict[str, Any]:
    """Scalar leaves of a report; large per-point maps are left out."""
    out: dict[str, Any] = {}
    if not isinstance(obj, dict):
        return {prefix or "value": obj}
    for k, v in obj.items():
        key = f"{prefix}.{k}" if prefix else str(k)
        if isinstance(v, dict):
            if k in ("points", "cover"):
                continue
            out.update(_flatten(v, key))
        elif isinstance(v, list):
            out[key] = json.dumps(v, sort_keys=True)
        else:
            out[key] = v
    return out


def cmd_report(inputs: Sequence[str], fmt: str, cfg: RunConfig) -> int:
    if not inputs:
        raise UsageError("report needs at least one input")
    tables = [(src, _read_table(src)) for src in inputs]
    rows = [{"source": src, **r} for src, tab in tables for r in tab]
    if fmt == "json":
        emit(cfg, dumps(rows))
        return EXIT_OK
    cols = ["source"]
    for r in rows:
        cols += [c for c in r if c not in cols]
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=cols, lineterminator="\n", restval="")
    w.writeheader()
    for r in rows:
        w.writerow({k: encode_value(v) if isinstance(v, float) else v for k, v in r.items()})
    emit(cfg, buf.getvalue())
    return EXIT_OK


# -- argument parsing -------------------------------------------------------------

def _add_input(sp: argparse.ArgumentParser) -> None:
    sp.add_argument("input", nargs="?", help="space JSON file ('-' for stdin)")
    sp.add_argument("--gen", metavar="KIND", help="generate the space instead of reading it")
    sp.add_argument("--param", action="append", default=[], metavar="KEY=VALUE", help="generator parameter")
    sp.add_argument("--n", type=int, help="shorthand for --param n=N")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("-o", "--output", help="output path (default stdout)")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="stonecover", description="Covering moduli, covers and c0+ embeddings of finite metric spaces.")
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("validate", help="check a distance matrix")
    _add_input(sp)

    sp = sub.add_parser("delta", help="sample the coarse or uniform covering modulus")
    _add_input(sp)
    sp.add_argument("--kind", choices=["coarse", "uniform", "both"], default="coarse")
    sp.add_argument("--grid", help="comma-separated arguments (default: around every distance)")
    sp.add_argument("--oracle", action="store_true", help="add a brute-force column (at most 4 points)")

    sp = sub.add_parser("cover", help="build a cover and check its advertised bounds")
    _add_input(sp)
    sp.add_argument("--kind", required=True, choices=["clique", "greedy", "linf-grid", "c0-grid", "tree"])
    sp.add_argument("--R", type=float)
    sp.add_argument("--r", type=float)
    sp.add_argument("--eps", type=float)
    sp.add_argument("--grid-n", dest="grid_n", type=int, help="subdivision n for grid and tree covers")
    sp.add_argument("--N", type=int, help="dimension of the l_inf grid")
    sp.add_argument("--query", "--point", dest="query", help="JSON point for parametric covers")

    sp = sub.add_parser("embed", help="build the scale family and the c0+ embedding, then certify it")
    _add_input(sp)
    sp.add_argument("--t", type=float, default=1.5)
    sp.add_argument("--eps", type=float, default=0.25)
    sp.add_argument("--lambda", dest="lam", type=float, default=0.25)
    sp.add_argument("--base-point", type=int, default=0)
    sp.add_argument("--scales", help="n_min..n_max")
    sp.add_argument("--cover-kind", choices=["clique", "greedy", "tree"], default="clique")
    sp.add_argument("--C", type=float)
    sp.add_argument("--D", type=float, default=0.0)

    sp = sub.add_parser("report", help="merge curves and reports into one table")
    sp.add_argument("inputs", nargs="*")
    sp.add_argument("--format", choices=["csv", "json"], default="csv")
    sp.add_argument("-o", "--output")
    return ap


def _config_from_args(args: argparse.Namespace) -> RunConfig:
    if args.command == "report":
        return RunConfig("report", output=args.output)
    gen_params = _parse_kv(args.param)
    if args.n is not None:
        gen_params["n"] = args.n
    params: dict[str, Any] = {}
    if args.command == "delta":
        params = {"kind": args.kind, "grid": _parse_grid(args.grid), "oracle": args.oracle}
    elif args.command == "cover":
        params = {"kind": args.kind}
        need = {"clique": ["R"], "greedy": ["r", "eps"], "tree": ["R", "grid_n"],
                "linf-grid": ["grid_n"], "c0-grid": ["R", "grid_n"]}[args.kind]
        for k in need:
            if getattr(args, k) is None:
                raise UsageError(f"cover --kind {args.kind} needs --{k.replace('_', '-')}")
        for k in ("R", "r", "eps", "N"):
            if getattr(args, k) is not None:
                params[k] = getattr(args, k)
        if args.grid_n is not None:
            params["n"] = args.grid_n
        if args.query is not None:
            try:
                params["query"] = json.loads(args.query)
            except json.JSONDecodeError as exc:
                raise UsageError(f"--query is not JSON: {exc}") from exc
    elif args.command == "embed":
        params = {"t": args.t, "eps": args.eps, "lam": args.lam, "base_point": args.base_point,
                  "scales": _parse_scales(args.scales), "cover_kind": args.cover_kind, "C": args.C, "D": args.D}
    return RunConfig(args.command, input=args.input, generator=args.gen, gen_params=gen_params,
                     seed=args.seed, params=params, output=args.output)


def _error(kind: str, exc: BaseException) -> None:
    sys.stderr.write(dumps({"error": kind, "message": str(exc)}, indent=None) + "\n")


def main(argv: Sequence[str] | None = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_IO if exc.code else EXIT_OK
    try:
        cfg = _config_from_args(args)
        if args.command == "validate":
            return cmd_validate(cfg)
        if args.command == "delta":
            return cmd_delta(cfg)
        if args.command == "cover":
            return cmd_cover(cfg)
        if args.command == "embed":
            return cmd_embed(cfg)
        return cmd_report(args.inputs, args.format, cfg)
    except (UsageError, InputError) as exc:
        _error(type(exc).__name__, exc)
        return EXIT_IO
    except CliqueCapExceeded as exc:
        _error("CliqueCapExceeded", exc)
        return EXIT_CAP
    except StoneError as exc:
        _error(type(exc).__name__, exc)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
