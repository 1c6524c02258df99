"""Command-line interface.

Machine output (JSON) goes to stdout or --out; tables and progress go to
stderr.  Every run writes one manifest: to --manifest when given, otherwise
as a single JSON line on stderr.  ``domseq replay MANIFEST`` re-executes
the recorded command.

Exit codes: 0 success, 1 verification failure, 2 usage or input error.
"""

from __future__ import annotations

import argparse
import json
import logging
import platform
import sys
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from . import constructions as con
from . import sampler as smp
from . import search as srch
from . import verify as ver
from .dompoly import BRUTE_FORCE_CAP, SizeError, brute_force, resolve_threads, tree_dompoly
from .graphs import (
    Graph,
    GraphError,
    Tree,
    edge_list_from_json,
    format_prufer_line,
    graph6_decode,
    is_tree_edge_set,
    parse_prufer_line,
    prufer_decode,
    prufer_encode,
)
from .poly import PolyError, analyze
from .polytope import lc_certificate, parse_grid

log = logging.getLogger("domseq")


class UsageError(Exception):
    pass


def _dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _emit(args: argparse.Namespace, payload) -> list[str]:
    text = _dumps(payload)
    if getattr(args, "out", None):
        Path(args.out).write_text(text)
        return [args.out]
    sys.stdout.write(text)
    return []


def _parse_ints(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise UsageError(f"expected comma-separated integers, got {text!r}") from exc


def _parse_range(text: str) -> tuple[int, int]:
    lo, _, hi = text.partition("..")
    try:
        return int(lo), int(hi or lo)
    except ValueError as exc:
        raise UsageError(f"expected LO..HI, got {text!r}") from exc


def _load_object(args: argparse.Namespace) -> Graph | Tree:
    """Read the input object; edge lists that form a tree come back as a Tree."""
    if args.graph6:
        return graph6_decode(args.graph6)
    if args.prufer is not None:
        return prufer_decode(parse_prufer_line(args.prufer), args.n)
    if args.edges:
        n, edges = edge_list_from_json(Path(args.edges).read_text())
        if n >= 1 and is_tree_edge_set(n, edges):
            return Tree(n, edges)
        return Graph.from_edges(n, edges)
    raise UsageError("give one of --graph6, --prufer or --edges")


def _add_input_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_mutually_exclusive_group()
    g.add_argument("--graph6", help="graph6 string")
    g.add_argument("--prufer", help="Prüfer code as comma-separated labels")
    g.add_argument("--edges", help='JSON edge-list file {"n": N, "edges": [[u, v], ...]}')
    p.add_argument("--n", type=int, help="vertex count for --prufer (default len+2)")


# --------------------------------------------------------------------------
# commands
# --------------------------------------------------------------------------


def cmd_dompoly(args: argparse.Namespace) -> tuple[int, list[str]]:
    obj = _load_object(args)
    if isinstance(obj, Tree):
        seq, method = tree_dompoly(obj), "tree-dp"
    else:
        if obj.n > args.cap:
            raise UsageError(f"general graph with n={obj.n} exceeds the brute-force cap of {args.cap}; "
                             "pass --cap to raise it")
        seq, method = brute_force(obj, cap=args.cap, threads=args.threads), "brute-force"
    rep = analyze(seq, obj.n)
    return 0, _emit(args, {"method": method, "n": obj.n, "sequence": seq.to_json(obj.n + 1),
                           "report": rep.to_json()})


def cmd_construct(args: argparse.Namespace) -> tuple[int, list[str]]:
    if args.family == "caterpillar":
        legs = _parse_ints(args.legs or "")
        if not legs or any(a < 0 for a in legs):
            raise UsageError("--legs needs at least one nonnegative integer")
        tree = con.build_caterpillar(legs)
        dp = tree_dompoly(tree)
        closed = con.caterpillar_dompoly_closed(legs) if all(legs) else None
        payload = {"family": "caterpillar", "legs": legs}
    else:
        if args.m is None or args.t is None or args.m < 1 or args.t < 1:
            raise UsageError("wmt needs --m >= 1 and --t >= 1")
        spec = con.WmtSpec(args.m, args.t)
        tree = con.build_wmt(spec)
        dp = tree_dompoly(tree)
        closed = con.wmt_closed_dompoly(spec)
        payload = {"family": "wmt", "m": spec.m, "t": spec.t, "gamma_formula": spec.gamma}
    seq = closed if closed is not None else dp
    payload.update(
        n=tree.n,
        edges=[list(e) for e in tree.edges],
        prufer=prufer_encode(tree) if tree.n > 2 else [],
        sequence=seq.to_json(tree.n + 1),
        source="closed-form" if closed is not None else "tree-dp",
        closed_form_matches_dp=None if closed is None else closed == dp,
        report=analyze(seq, tree.n).to_json(),
    )
    outputs = []
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "tree.json").write_text(_dumps(tree.to_json()))
        (out / "tree.prufer").write_text(format_prufer_line(payload["prufer"]) + "\n")
        (out / "result.json").write_text(_dumps(payload))
        outputs = [str(out / f) for f in ("tree.json", "tree.prufer", "result.json")]
    else:
        sys.stdout.write(_dumps(payload))
    failed = closed is not None and closed != dp
    return int(failed), outputs


def cmd_verify(args: argparse.Namespace) -> tuple[int, list[str]]:
    suite = args.suite
    if suite == "lemmas":
        checks = ver.suite_lemmas(caterpillars=args.samples or 500, seed=args.seed)
    elif suite == "thm-main":
        ms = [args.m] if args.m else [1, 2, 3]
        checks = ver.suite_main_theorem(ms, args.t_max)
    elif suite == "growth":
        lo, hi = _parse_range(args.t or "18..24")
        checks = ver.suite_growth(args.m or 1, lo, hi, args.r_max, args.tol, args.threads)
    elif suite == "polytope":
        extra = graph6_decode(args.graph6) if args.graph6 else None
        checks = ver.suite_polytope(args.samples or 10**6, args.seed, args.threads, extra)
    else:
        checks = ver.suite_bounds(args.trees, args.graphs, args.seed)
    for c in checks:
        print(f"[{'PASS' if c.passed else 'FAIL'}] {c.name}", file=sys.stderr)
    ok = all(c.passed for c in checks)
    outputs = _emit(args, {"suite": suite, "passed": ok, "checks": [c.to_json() for c in checks]})
    return (0 if ok else 1), outputs


def cmd_search(args: argparse.Namespace) -> tuple[int, list[str]]:
    cfg = srch.SearchConfig(
        n=args.n, mode=args.mode, population_size=args.pop, epochs=args.epochs,
        local_search_steps=args.steps, keep_fraction=args.keep, sampler=args.sampler,
        seed=args.seed, reward_window=args.window, edge_prob=args.edge_prob,
        train_steps=args.train_steps, workers=args.threads,
    )
    result = srch.run_pipeline(cfg)
    for rec in result.log:
        print(f"epoch {rec['epoch']}: best reward {rec['best_reward']} ({rec['best_object']})", file=sys.stderr)
    outputs = []
    if args.log:
        Path(args.log).write_text(result.log_jsonl())
        outputs.append(args.log)
    if args.population:
        lines = [c.encoding for c in result.population]
        Path(args.population).write_text("".join(line + "\n" for line in lines))
        outputs.append(args.population)
    best = result.best
    payload = {"best": best.to_json(), "report": analyze(best.sequence, cfg.n).to_json(), "epochs": cfg.epochs}
    return 0, outputs + _emit(args, payload)


def cmd_polytope(args: argparse.Namespace) -> tuple[int, list[str]]:
    obj = _load_object(args)
    g = obj.to_graph() if isinstance(obj, Tree) else obj
    cert = lc_certificate(g, parse_grid(args.grid), args.samples, args.seed, args.sigma, args.threads)
    for e in cert.estimates:
        print(f"k={e.k:g}  estimate={e.estimate:.6f}  se={e.std_error:.2e}", file=sys.stderr)
    return 0, _emit(args, cert.to_json())


def cmd_sampler(args: argparse.Namespace) -> tuple[int, list[str]]:
    if args.action == "train":
        lines = [ln for ln in Path(args.data).read_text().splitlines() if ln.strip()]
        if args.mode == "tree":
            codes = [parse_prufer_line(ln) for ln in lines]
            n = args.n or len(codes[0]) + 2
            ds = smp.tree_dataset(codes, n)
        else:
            graphs = [graph6_decode(ln) for ln in lines]
            n = graphs[0].n
            ds = smp.graph_dataset([srch.object_tokens(g) for g in graphs], n)
        hyper = smp.TrainConfig(lr=args.lr, steps=args.steps, seed=args.seed, dim=args.dim,
                                heads=args.heads, beta=args.beta)
        params, losses = smp.train(ds, hyper)
        if not args.checkpoint:
            raise UsageError("sampler train needs --checkpoint PATH")
        Path(args.checkpoint).write_text(smp.save_checkpoint(params))
        outputs = [args.checkpoint]
        if args.loss_log:
            Path(args.loss_log).write_text("".join(
                json.dumps({"step": i, "loss": float(np.round(v, 12))}) + "\n" for i, v in enumerate(losses)))
            outputs.append(args.loss_log)
        return 0, outputs + _emit(args, {"mode": args.mode, "n": n, "sequences": len(ds.sequences),
                                         "final_loss": float(np.round(losses[-1], 12)) if losses else None})
    params = smp.load_checkpoint(Path(args.checkpoint).read_text())
    seqs = smp.sample(params, args.count, args.seed, args.beta)
    n = args.n or (params.vocab - 1 if args.mode == "tree" else None)
    if n is None:
        raise UsageError("graph-mode sampling needs --n")
    decoded, invalid = [], []
    for i, toks in enumerate(seqs):
        obj = srch.decode_tokens(toks, args.mode, n)
        if obj is None:
            invalid.append({"index": i, "tokens": toks})
        else:
            decoded.append(srch.encode_object(obj))
    return 0, _emit(args, {"samples": decoded, "invalid": invalid, "count": len(seqs)})


def cmd_replay(args: argparse.Namespace) -> tuple[int, list[str]]:
    manifest = json.loads(Path(args.manifest_file).read_text())
    argv = []
    stored = iter(manifest["argv"])
    for tok in stored:
        if tok == "--manifest":
            next(stored, None)
        elif not tok.startswith("--manifest="):
            argv.append(tok)
    if args.manifest:
        argv = ["--manifest", args.manifest] + argv
    return _run(argv, replay_of=args.manifest_file)


# --------------------------------------------------------------------------
# parser
# --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="domseq", description="Domination polynomials, log-concavity and search.")
    p.add_argument("--version", action="version", version=f"domseq {__version__}")
    p.add_argument("--threads", type=int, default=None, help="worker count (default THREADS env or CPU count)")
    p.add_argument("--manifest", help="write the run manifest here instead of stderr")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    d = sub.add_parser("dompoly", help="domination polynomial and log-concavity report")
    _add_input_flags(d)
    d.add_argument("--cap", type=int, default=BRUTE_FORCE_CAP, help="brute-force vertex cap")
    d.add_argument("--out")
    d.set_defaults(func=cmd_dompoly)

    c = sub.add_parser("construct", help="build a caterpillar or W_(m,t)")
    c.add_argument("family", choices=["caterpillar", "wmt"])
    c.add_argument("--legs", help="leaf counts per spine vertex, e.g. 3,1,2")
    c.add_argument("--m", type=int)
    c.add_argument("--t", type=int)
    c.add_argument("--out", help="directory for tree.json, tree.prufer and result.json")
    c.set_defaults(func=cmd_construct)

    v = sub.add_parser("verify", help="run a verification suite")
    v.add_argument("suite", choices=["lemmas", "thm-main", "growth", "polytope", "bounds"])
    v.add_argument("--m", type=int)
    v.add_argument("--t", help="t range LO..HI for growth")
    v.add_argument("--t-max", type=int, default=60)
    v.add_argument("--r-max", type=int)
    v.add_argument("--tol", type=float, default=ver.GROWTH_TOLERANCE)
    v.add_argument("--samples", type=int)
    v.add_argument("--trees", type=int, default=1000)
    v.add_argument("--graphs", type=int, default=1000)
    v.add_argument("--graph6", help="extra graph for the polytope suite")
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--out")
    v.set_defaults(func=cmd_verify)

    s = sub.add_parser("search", help="reward-driven search for non-log-concave examples")
    s.add_argument("mode", choices=["graph", "tree"])
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--epochs", type=int, default=5)
    s.add_argument("--pop", type=int, default=500)
    s.add_argument("--steps", type=int, default=20, help="local-search steps per candidate")
    s.add_argument("--keep", type=float, default=0.10)
    s.add_argument("--sampler", choices=["none", "attention"], default="none")
    s.add_argument("--window", choices=["gamma", "best"], default="gamma")
    s.add_argument("--edge-prob", type=float, default=0.5)
    s.add_argument("--train-steps", type=int, default=200)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--log", help="JSONL run log path")
    s.add_argument("--population", help="write the final population, one encoding per line")
    s.add_argument("--out")
    s.set_defaults(func=cmd_search)

    pt = sub.add_parser("polytope", help="Monte Carlo slice volumes and log-concavity certificate")
    _add_input_flags(pt)
    pt.add_argument("--grid", required=True, help="LO:HI:STEP or comma list of k values")
    pt.add_argument("--samples", type=int, default=10**6)
    pt.add_argument("--sigma", type=float, default=3.0)
    pt.add_argument("--seed", type=int, default=0)
    pt.add_argument("--out")
    pt.set_defaults(func=cmd_polytope)

    sm = sub.add_parser("sampler", help="train or query the attention sampler")
    sm.add_argument("action", choices=["train", "sample"])
    sm.add_argument("--mode", choices=["tree", "graph"], default="tree")
    sm.add_argument("--data", help="training file: Prüfer lines (tree) or graph6 lines (graph)")
    sm.add_argument("--checkpoint")
    sm.add_argument("--loss-log")
    sm.add_argument("--n", type=int)
    sm.add_argument("--lr", type=float, default=0.5)
    sm.add_argument("--steps", type=int, default=500)
    sm.add_argument("--dim", type=int, default=16)
    sm.add_argument("--heads", type=int, default=2)
    sm.add_argument("--beta", type=float, default=1.0, help="attention beta (train) or sampling beta (sample)")
    sm.add_argument("--count", type=int, default=10)
    sm.add_argument("--seed", type=int, default=0)
    sm.add_argument("--out")
    sm.set_defaults(func=cmd_sampler)

    r = sub.add_parser("replay", help="re-run the command recorded in a manifest")
    r.add_argument("manifest_file")
    r.set_defaults(func=cmd_replay)
    return p


def _run(argv: list[str], replay_of: str | None = None) -> tuple[int, list[str]]:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, stream=sys.stderr)
    args.threads = resolve_threads(args.threads)
    started = datetime.now(timezone.utc).isoformat()
    try:
        code, outputs = args.func(args)
    except (UsageError, GraphError, PolyError, SizeError, ValueError, OSError) as exc:
        print(f"domseq: error: {exc}", file=sys.stderr)
        return 2, []
    if args.command != "replay":
        manifest = {
            "command": args.command,
            "argv": argv,
            "config": {k: v for k, v in sorted(vars(args).items()) if k != "func"},
            "seed": getattr(args, "seed", None),
            "versions": {"domseq": __version__, "python": platform.python_version(), "numpy": np.__version__},
            "started": started,
            "finished": datetime.now(timezone.utc).isoformat(),
            "outputs": outputs,
            "exit_code": code,
            "replay_of": replay_of,
        }
        text = json.dumps(manifest, sort_keys=True, default=str)
        if args.manifest:
            Path(args.manifest).write_text(text + "\n")
        else:
            print(text, file=sys.stderr)
    return code, outputs


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        code, _ = _run(argv)
    except SystemExit as exc:  # argparse usage errors
        return int(exc.code or 0)
    return code


if __name__ == "__main__":
    sys.exit(main())
