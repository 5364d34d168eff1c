"""Command-line front end.

Exit codes:
  check:      0 solvable (bounded), 10 certified unsolvable,
              11 no map at any searched depth, 12 unknown
  run:        0 pass, 1 fail, 5 undecided at depth, 3 irrevocability violation
  subdivide:  0
  any:        2 argument or input parse failure
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .checker import solve
from .errors import ChrotopError, IrrevocabilityViolation
from .models import ModelSpec, builtin_model, load_model_json
from .protocol import builtin_protocol, check_solves, table_protocol
from .render import render_dot, render_svg
from .simplicial import Complex, Simplex, Vertex, label_string
from .subdivision import chr_iterate, diameter_Dk
from .tasks import Task, inputless_consensus, load_task_json, set_agreement


def _threads_cap() -> int:
    raw = os.environ.get("CHROTOP_THREADS", "1")
    try:
        cap = int(raw)
    except ValueError:
        raise ChrotopError(f"CHROTOP_THREADS must be an integer, got {raw!r}")
    return max(1, cap)


def _resolve_model(ref: str) -> ModelSpec:
    if ref.endswith(".json") or "/" in ref:
        return load_model_json(Path(ref).read_text(encoding="utf-8"))
    return builtin_model(ref)


def _resolve_task(ref: str) -> Task:
    if ref.endswith(".json") or "/" in ref:
        return load_task_json(Path(ref).read_text(encoding="utf-8"))
    name, _, arg = ref.partition(":")
    n = int(arg) if arg else 2
    if name == "consensus":
        return inputless_consensus(n)
    if name in ("set-agreement", "setagreement"):
        return set_agreement(n)
    raise ChrotopError(f"unknown task {ref!r}")


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")


def _dump(obj: dict) -> str:
    return json.dumps(obj, indent=2) + "\n"


def cmd_subdivide(args) -> int:
    if args.simplex < 1 or args.simplex > 3:
        print("error: --simplex must be between 1 and 3", file=sys.stderr)
        return 2
    n = args.simplex + 1
    base = Complex([Simplex(Vertex(i, i) for i in range(n))])
    K = chr_iterate(base, args.k)
    d_k = diameter_Dk(base, args.k)
    print(f"facets: {len(K.facets)}")
    print(f"vertices: {len(K.vertices())}")
    print(f"D_{args.k}: {d_k}")
    formats = args.format.split(",") if args.format else ["json", "svg", "dot"]
    outdir = Path(args.out) if args.out else Path(".")
    outdir.mkdir(parents=True, exist_ok=True)
    stem = f"chr{args.k}_simplex{args.simplex}"
    payload = {"schema": 1, "seed": args.seed, "k": args.k, "Dk": str(d_k)}
    payload.update(K.to_json_obj())
    if "json" in formats:
        (outdir / f"{stem}.json").write_text(_dump(payload), encoding="utf-8")
    if "svg" in formats:
        if args.simplex <= 2:
            (outdir / f"{stem}.svg").write_text(render_svg(K, base), encoding="utf-8")
        else:
            print("notice: SVG supports dimensions 1 and 2 only; wrote JSON/DOT instead")
    if "dot" in formats:
        (outdir / f"{stem}.dot").write_text(render_dot(K), encoding="utf-8")
    return 0


def cmd_check(args) -> int:
    model = _resolve_model(args.model)
    task = _resolve_task(args.task)
    verdict = solve(model, task, args.max_depth, seed=args.seed)
    obj = verdict.to_json_obj()
    obj["model"] = model.name
    obj["task"] = task.name
    obj["seed"] = args.seed
    _emit(_dump(obj), args.out)
    return verdict.exit_code()


def cmd_run(args) -> int:
    model = _resolve_model(args.model)
    task = _resolve_task(args.task)
    if args.protocol.endswith(".json") or "/" in args.protocol:
        payload = json.loads(Path(args.protocol).read_text(encoding="utf-8"))
        protocol = table_protocol(payload["table"], model, task, int(payload["T"]))
    else:
        protocol = builtin_protocol(args.protocol)
    try:
        report = check_solves(protocol, task, model, args.depth)
    except IrrevocabilityViolation as exc:
        print(f"irrevocability violation: {exc.witness}", file=sys.stderr)
        return 3
    lines = [
        f"protocol: {protocol.name}  model: {model.name}  task: {task.name}"
        f"  depth: {args.depth}  seed: {args.seed}"
    ]
    for outcome in report.run_result.outcomes:
        decided = " ".join(
            f"p{color}={label_string(rec.value)}@r{rec.round}" if rec else f"p{color}=?"
            for color, rec in sorted(outcome.decisions.items())
        )
        lines.append(f"  {outcome.execution.describe()}  {decided}")
    lines.append(f"result: {report.status}")
    for execution, simplex in report.failures:
        lines.append(f"  violation at {execution.describe()}")
    _emit("\n".join(lines) + "\n", args.out)
    if report.status == "PASS":
        return 0
    if report.status == "FAIL":
        return 1
    return 5


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="chrotop",
        description="Chromatic subdivisions and round-based task solvability checks",
    )
    parser.add_argument("--seed", type=int, default=0, help="seed recorded in outputs and used by sampled checks")
    sub = parser.add_subparsers(dest="command", required=True)

    p_subdivide = sub.add_parser("subdivide", help="iterated chromatic subdivision of a standard simplex")
    p_subdivide.add_argument("--simplex", type=int, required=True, help="dimension of the base simplex (1 or 2)")
    p_subdivide.add_argument("--k", type=int, required=True, help="number of subdivision rounds")
    p_subdivide.add_argument("--out", help="output directory")
    p_subdivide.add_argument("--format", help="comma list of json,svg,dot (default all)")
    p_subdivide.set_defaults(func=cmd_subdivide)

    p_check = sub.add_parser("check", help="decide bounded solvability of a task in a model")
    p_check.add_argument("--model", required=True, help="builtin name (iis2, iis3, ll, m1, m2) or JSON path")
    p_check.add_argument("--task", required=True, help="builtin (consensus[:n], set-agreement[:n]) or JSON path")
    p_check.add_argument("--max-depth", type=int, default=3)
    p_check.add_argument("--out", help="write the verdict JSON here instead of stdout")
    p_check.set_defaults(func=cmd_check)

    p_run = sub.add_parser("run", help="simulate a protocol and check task conformance")
    p_run.add_argument("--model", required=True)
    p_run.add_argument("--task", required=True)
    p_run.add_argument("--protocol", required=True, help="winner | own-input | never | constant:<v> | table JSON path")
    p_run.add_argument("--depth", type=int, default=2)
    p_run.add_argument("--out")
    p_run.set_defaults(func=cmd_run)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        _threads_cap()
        return args.func(args)
    except (ChrotopError, OSError, json.JSONDecodeError, KeyError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
