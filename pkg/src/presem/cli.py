"""Command line: ``presem check|run|paths|compare-orders|learn``.

Exit codes are 0 on success, 2 when the scenario (or episode file) does not
parse or validate, and 3 for errors raised while evaluating it.  Results are
JSON on standard output; diagnostics go to standard error.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path as FilePath

from . import scenarios
from .counterfactual import compare_orders, evaluate
from .dsl import load, parse_episodes, serialize
from .learning import PlasticityConfig, apply_episodes
from .paths import effective_signal, enumerate_paths
from .pictures import PictureError
from .report import emit, emit_comparison, emit_signal, emit_trace
from .scenario import ScenarioError

EXIT_OK, EXIT_PARSE, EXIT_RUNTIME = 0, 2, 3


class _Usage(Exception):
    pass


def _resolve(name: str) -> FilePath:
    # a bare bundled name like ``umbrella.psm`` works from any directory
    p = FilePath(name)
    if p.exists():
        return p
    stem = p.name.removesuffix(".psm")
    if p.parent == FilePath(".") and stem in scenarios.NAMES:
        return scenarios.path(stem)
    return p


def _order(values: list[str] | None):
    if not values:
        return "given"
    if values == ["given"]:
        return "given"
    if len(values) == 2 and values[0] == "permute-index":
        try:
            return ("permute-index", int(values[1]))
        except ValueError:
            pass
    if len(values) == 1 and values[0].startswith("permute-index:"):
        return values[0]
    raise _Usage(f"--order expects 'given' or 'permute-index K', got {' '.join(values)!r}")


def _write(out: bytes):
    sys.stdout.buffer.write(out)
    sys.stdout.flush()


def cmd_check(args) -> int:
    s = load(_resolve(args.file))
    _write(emit({"ok": True, "scenario": s.name, "groups": len(s.groups),
                 "pictures": len(s.pictures), "cases": [c for c in s.cases() if c is not None]}))
    return EXIT_OK


def cmd_run(args) -> int:
    s = load(_resolve(args.file))
    v = evaluate(s, _order(args.order), case=args.case, theta=args.theta, d_max=args.d_max,
                 max_ticks=args.max_ticks)
    out = emit_trace(v)
    if args.trace:
        FilePath(args.trace).write_bytes(out)
    _write(out)
    return EXIT_OK


def cmd_paths(args) -> int:
    s = load(_resolve(args.file))
    graph = s.graph()
    found = enumerate_paths(graph, args.src, args.dst, args.max_len)
    _write(emit_signal(effective_signal(graph, args.src, args.dst, args.max_len), found))
    return EXIT_OK


def cmd_compare(args) -> int:
    s = load(_resolve(args.file))
    _write(emit_comparison(compare_orders(s, case=args.case)))
    return EXIT_OK


def cmd_learn(args) -> int:
    s = load(_resolve(args.file))
    ep_path = FilePath(args.episodes)
    try:
        text = ep_path.read_text(encoding="utf-8")
    except OSError as e:
        raise _Usage(str(e)) from e
    episodes = parse_episodes(text, str(ep_path), set(s.group_table))
    cfg = PlasticityConfig(eta=args.eta) if args.eta is not None else PlasticityConfig()
    learned, changes = apply_episodes(s, episodes, cfg)
    if args.out:
        FilePath(args.out).write_text(serialize(learned), encoding="utf-8")
    _write(emit({
        "episodes": len(episodes),
        "eta": cfg.eta,
        "changes": [{"source": a, "target": b, "before": w0, "after": w1}
                    for a, b, w0, w1 in changes],
    }))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="presem", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="parse and validate a scenario")
    p.add_argument("file")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("run", help="evaluate the scenario's counterfactual query")
    p.add_argument("file")
    p.add_argument("--case")
    p.add_argument("--theta", type=float)
    p.add_argument("--max-ticks", type=int, default=64)
    p.add_argument("--order", nargs="+", metavar="ORDER",
                   help="'given' (default) or 'permute-index K'")
    p.add_argument("--d-max", type=int, default=0)
    p.add_argument("--trace", metavar="OUT", help="also write the verdict document here")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("paths", help="enumerate paths and report the effective signal")
    p.add_argument("file")
    p.add_argument("--from", dest="src", required=True)
    p.add_argument("--to", dest="dst", required=True)
    p.add_argument("--max-len", type=int, default=8)
    p.set_defaults(func=cmd_paths)

    p = sub.add_parser("compare-orders", help="evaluate every composition order")
    p.add_argument("file")
    p.add_argument("--case")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("learn", help="apply co-activation episodes to the declared links")
    p.add_argument("file")
    p.add_argument("--episodes", required=True)
    p.add_argument("--eta", type=float)
    p.add_argument("--out")
    p.set_defaults(func=cmd_learn)
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ScenarioError as e:
        for d in e.diagnostics:
            print(f"{e.origin}:{d}", file=sys.stderr)
        return EXIT_PARSE
    except FileNotFoundError as e:
        print(f"presem: {e}", file=sys.stderr)
        return EXIT_PARSE
    except (_Usage, KeyError, ValueError, PictureError) as e:
        msg = e.args[0] if isinstance(e, KeyError) and e.args else e
        print(f"presem: {msg}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
