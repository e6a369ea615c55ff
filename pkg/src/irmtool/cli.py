"""Command line driver: every pipeline stage as a batch subcommand.

Exit codes: 0 success, 2 pending decisions block progress, 3 validation
errors in the assembled model, 4 unusable input.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Dict, List, Optional

from .errors import (ConfigurationExplosion, IrmError, RevisionConflict,
                     StateLocked, UnknownDecision, UnresolvedDecision)
from .pipeline import STAGES, Pipeline, StageStatus

EXIT_OK = 0
EXIT_PENDING = 2
EXIT_VALIDATION = 3
EXIT_INPUT = 4

_STAGE_HELP = {
    "segment": "split the requirements document and parse sentences",
    "extract": "extract entity candidates and build the component catalog",
    "classify": "assign invariant types to requirement clauses",
    "flow": "derive knowledge flow signatures and parameter directions",
    "compose": "assemble the invariant decomposition model",
    "validate": "enumerate configurations and check knowledge flows",
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--in", dest="input", metavar="FILE",
                        help="requirements document (markdown-ish outline)")
    common.add_argument("--conllu", metavar="FILE",
                        help="pre-parsed CoNLL-U file used instead of the shallow parser")
    common.add_argument("--state", metavar="DIR",
                        help="state directory (default: $IRM_STATE_DIR or .irm)")
    common.add_argument("--journal", metavar="FILE",
                        help="decision journal, JSON lines")
    common.add_argument("--lexicon", metavar="FILE",
                        help="synset lexicon for verb affinity")
    common.add_argument("--seeds", metavar="FILE",
                        help="seed verb lists for classification")
    common.add_argument("--threshold", type=float, metavar="T",
                        help="alias similarity threshold (default 0.84)")
    common.add_argument("--measure", choices=["path", "wup"],
                        help="synset similarity measure")
    common.add_argument("--cap", type=int, metavar="N",
                        help="configuration enumeration cap (default 10000)")
    common.add_argument("--json", action="store_true",
                        help="print a machine readable summary")
    common.add_argument("--force", action="store_true",
                        help="rerun even when inputs are unchanged")
    common.add_argument("--assume-defaults", action="store_true",
                        help="accept every suggested choice for pending decisions")

    parser = argparse.ArgumentParser(
        prog="irm",
        description="Requirements-to-architecture pipeline over invariant refinement models.")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")
    for name in STAGES:
        sub.add_parser(name, parents=[common], help=_STAGE_HELP[name])
    sub.add_parser("run", parents=[common], help="run all stages in order")
    serve = sub.add_parser("serve", parents=[common],
                           help="start the HTTP review service")
    serve.add_argument("--host", default="127.0.0.1",
                       help="bind address (default 127.0.0.1)")
    serve.add_argument("--port", type=int, default=8000,
                       help="listen port (default 8000)")
    return parser


def make_pipeline(args) -> Pipeline:
    return Pipeline(state_dir=args.state,
                    input_path=args.input,
                    conllu_path=args.conllu,
                    journal_path=args.journal,
                    threshold=args.threshold,
                    measure=args.measure,
                    cap=args.cap,
                    lexicon_path=args.lexicon,
                    seeds_path=args.seeds,
                    assume_defaults=args.assume_defaults)


def _evidence_line(request: dict) -> str:
    ev = request.get("evidence") or {}
    if "score" in ev:
        return "%s %.3f" % (ev.get("kind", "similarity"), ev["score"])
    if "rule" in ev:
        return "rule %s" % ev["rule"]
    if "exchange" in ev and "process" in ev:
        return "affinity exchange=%.3f process=%.3f" % (ev["exchange"], ev["process"])
    return ev.get("kind", "")


def _print_pending(pending: List[dict]) -> None:
    print("pending decisions (%d):" % len(pending))
    for req in pending:
        line = "  %-44s suggest %-8s %s" % (
            req["request_id"], json.dumps(req["suggested"]),
            _evidence_line(req))
        print(line.rstrip())


def _print_statuses(statuses: Dict[str, StageStatus]) -> None:
    for name, status in statuses.items():
        if status.blocked:
            detail = "blocked: " + status.blocked
        elif status.skipped:
            detail = "up to date"
        elif status.ran:
            detail = "ok"
        else:
            detail = "not run"
        if status.pending:
            detail += "  (%d pending)" % len(status.pending)
        print("%-10s %s" % (name, detail))


def _report_of(pipe: Pipeline) -> Optional[dict]:
    path = pipe.artifact("report.json")
    if not os.path.exists(path):
        return None
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def _print_report(report: dict) -> None:
    print("verdict: %s  (%d configurations, %d errors, %d warnings)" % (
        report["verdict"], report["configuration_count"],
        report["errors"], report["warnings"]))
    for f in report["findings"]:
        print("  [%s] %s %s  involved=%s  config=%s" % (
            f["severity"], f["kind"], f["subject"],
            ",".join(str(i) for i in f["involved"]), f["config"]))


def _exit_code(command: str, statuses: Dict[str, StageStatus],
               pipe: Pipeline) -> int:
    blocked = any(s.blocked for s in statuses.values())
    pending = pipe.pending_requests()
    if blocked or pending:
        return EXIT_PENDING
    if command in ("run", "validate"):
        report = _report_of(pipe)
        if report is not None and report["verdict"] != "pass":
            return EXIT_VALIDATION
    return EXIT_OK


def run_command(args) -> int:
    try:
        pipe = make_pipeline(args)
    except (OSError, ValueError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_INPUT

    try:
        if args.command == "run":
            statuses = pipe.run(force=args.force)
        else:
            statuses = {args.command: pipe.run_stage(args.command,
                                                     force=args.force)}
    except UnresolvedDecision as exc:
        statuses = {args.command: StageStatus(args.command, blocked=str(exc))}
    except StateLocked as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_INPUT
    except ConfigurationExplosion as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_VALIDATION
    except FileNotFoundError as exc:
        print("error: missing input: %s" % exc, file=sys.stderr)
        return EXIT_INPUT
    except IrmError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_INPUT

    pending = pipe.pending_requests()
    code = _exit_code(args.command, statuses, pipe)
    if args.json:
        payload = {
            "command": args.command,
            "stages": {n: s.as_dict() for n, s in statuses.items()},
            "summary": pipe.summary(),
            "pending": pending,
            "exit_code": code,
        }
        report = _report_of(pipe)
        if report is not None and args.command in ("run", "validate"):
            payload["report"] = {k: report[k] for k in
                                 ("verdict", "configuration_count",
                                  "errors", "warnings")}
        print(json.dumps(payload, indent=2, sort_keys=True))
        return code

    _print_statuses(statuses)
    if pending:
        _print_pending(pending)
    if args.command in ("run", "validate"):
        report = _report_of(pipe)
        if report is not None:
            _print_report(report)
    summary = pipe.summary()
    print("journal: %s  revision %d" % (
        summary["journal"]["path"] or "(none)",
        summary["journal"]["revision"]))
    return code


def serve_command(args) -> int:
    try:
        pipe = make_pipeline(args)
    except (OSError, ValueError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_INPUT
    from .service import create_app, find_ui_dir
    import uvicorn

    app = create_app({"default": pipe.state_dir}, ui_dir=find_ui_dir())
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "serve":
        return serve_command(args)
    return run_command(args)


if __name__ == "__main__":
    sys.exit(main())
