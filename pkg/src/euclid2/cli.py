"""Command-line interface: check, annotate, render, oracle."""

from __future__ import annotations

import argparse
import concurrent.futures
import json
import sys
from fractions import Fraction
from pathlib import Path

from . import diagram as dg
from . import oracle as orc
from . import rules
from . import script as sc
from . import svgout
from .errors import Euclid2Error, ParseError
from .terms import Eq

EXIT_OK = 0
EXIT_REJECTED = 1
EXIT_USAGE = 2


def _load(path: str) -> sc.Script:
    p = Path(path)
    if not p.is_file():
        raise FileNotFoundError(f"no such file: {path}")
    return sc.parse_script(p.read_text(encoding="utf-8"))


def _cmd_check(args) -> int:
    entries = sorted(args.files)
    results: dict[str, tuple[int, str]] = {}

    def one(path: str) -> tuple[int, str]:
        try:
            script = _load(path)
        except (ParseError, FileNotFoundError, OSError) as exc:
            return EXIT_USAGE, f"{path}: parse error: {exc}\n"
        report = rules.check_proof(script, profile=args.profile)
        text = sc.emit_report(report, "json" if args.json else "text", timing=args.timing)
        if args.emit_certs:
            Path(args.emit_certs).write_text(
                json.dumps(report.certificates, indent=2, sort_keys=True) + "\n",
                encoding="utf-8",
            )
        return (EXIT_OK if report.accepted else EXIT_REJECTED), text

    if len(entries) > 1:
        with concurrent.futures.ThreadPoolExecutor() as pool:
            for path, res in zip(entries, pool.map(one, entries)):
                results[path] = res
    else:
        for path in entries:
            results[path] = one(path)

    code = EXIT_OK
    for path in entries:
        rc, text = results[path]
        sys.stdout.write(text)
        code = max(code, rc)
    return code


_COLOR_ORDER = ["red", "blue", "violet", "magenta", "plain"]


def _cmd_annotate(args) -> int:
    try:
        script = _load(args.file)
    except (ParseError, FileNotFoundError, OSError) as exc:
        sys.stderr.write(f"parse error: {exc}\n")
        return EXIT_USAGE
    report = rules.check_proof(script, profile=args.profile)
    for step in report.steps:
        sys.stdout.write(f"{step.index:>3}. [{step.color:<7}] {step.statement} ; {step.rule}\n")
    if not report.accepted:
        sys.stdout.write(
            f"rejected at step {report.reject_step}: {report.reject_cause}\n"
        )
        return EXIT_REJECTED
    if args.compare:
        try:
            golden = Path(args.compare).read_text(encoding="utf-8").split()
        except OSError as exc:
            sys.stderr.write(f"cannot read golden file: {exc}\n")
            return EXIT_USAGE
        got = report.colors()
        if golden != got:
            sys.stdout.write(
                "color mismatch:\n  expected: " + " ".join(golden)
                + "\n  got:      " + " ".join(got) + "\n"
            )
            return EXIT_REJECTED
        sys.stdout.write("colors match\n")
    return EXIT_OK


def _cmd_render(args) -> int:
    try:
        script = _load(args.file)
    except (ParseError, FileNotFoundError, OSError) as exc:
        sys.stderr.write(f"parse error: {exc}\n")
        return EXIT_USAGE
    try:
        inst = dg.realize(script)
    except Euclid2Error as exc:
        sys.stderr.write(f"realize failed: {exc}\n")
        return EXIT_REJECTED
    report = rules.check_proof(script, instance=inst, profile=args.profile)
    svg = svgout.render_svg(script, inst, report)
    if args.output:
        Path(args.output).write_text(svg, encoding="utf-8")
    else:
        sys.stdout.write(svg)
    return EXIT_OK


def _cmd_oracle(args) -> int:
    try:
        script = _load(args.file)
    except (ParseError, FileNotFoundError, OSError) as exc:
        sys.stderr.write(f"parse error: {exc}\n")
        return EXIT_USAGE
    tol = Fraction(args.tol).limit_denominator(10**15)
    targets: list[tuple[str, Eq]] = [("diorismos", script.diorismos)]
    for step in script.steps:
        if isinstance(step.claim, Eq):
            targets.append((f"step {step.index}", step.claim))
    all_ok = True
    records_out = []
    for label, stmt in targets:
        try:
            records = orc.check_numeric_detailed(
                stmt, script, samples=args.samples, tol=tol, seed=args.seed
            )
        except Euclid2Error as exc:
            sys.stderr.write(f"{label}: oracle error: {exc}\n")
            return EXIT_REJECTED
        ok = all(r["ok"] for r in records)
        all_ok = all_ok and ok
        if args.json:
            records_out.append({"target": label, "ok": ok, "samples": records})
        else:
            sys.stdout.write(f"{label}: {'ok' if ok else 'FAILED'} ({len(records)} samples)\n")
    if args.json:
        sys.stdout.write(json.dumps(records_out, indent=2, sort_keys=True) + "\n")
    return EXIT_OK if all_ok else EXIT_REJECTED


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="euclid2",
        description="Proof checker for the Book II deductive calculus",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="check proof scripts")
    p.add_argument("files", nargs="+")
    p.add_argument("--json", action="store_true")
    p.add_argument("--timing", action="store_true")
    p.add_argument("--profile", choices=("default", "bm-dissection"), default="default")
    p.add_argument("--emit-certs", metavar="PATH", default=None)
    p.set_defaults(func=_cmd_check)

    p = sub.add_parser("annotate", help="print the proof with color classes")
    p.add_argument("file")
    p.add_argument("--compare", metavar="GOLDEN", default=None)
    p.add_argument("--profile", choices=("default", "bm-dissection"), default="default")
    p.set_defaults(func=_cmd_annotate)

    p = sub.add_parser("render", help="render the realized diagram as SVG")
    p.add_argument("file")
    p.add_argument("-o", "--output", default=None)
    p.add_argument("--profile", choices=("default", "bm-dissection"), default="default")
    p.set_defaults(func=_cmd_render)

    p = sub.add_parser("oracle", help="cross-check equality claims numerically")
    p.add_argument("file")
    p.add_argument("--samples", type=int, default=20)
    p.add_argument("--tol", default="1e-9")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=_cmd_oracle)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except Euclid2Error as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
