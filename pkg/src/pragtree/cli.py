"""Command-line entry point: ``pragtree build|check|render|stats``.

Exit codes: 0 success, 1 violations found (``check``, or ``build
--strict-exit``), 2 unreadable or malformed input, 3 strict-mode rejection.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Optional

from .analysis import analyze, classify_all, corpus_summary, report_to_dict, report_to_text
from .engine import AttachmentError, FrontierRejection, build
from .model import Mode
from .stats import MissingPopulationError, table2, table3, tables_to_csv, tables_to_json
from .transcript import (
    RecordError,
    TranscriptError,
    export_tree,
    graph_from_json,
    load_sequence_records,
    parse_transcript,
)

EXIT_OK, EXIT_VIOLATIONS, EXIT_INPUT, EXIT_REJECTED = 0, 1, 2, 3
TRANSCRIPT_GLOB = "*.sdrt"
EXTENSIONS = {"dot": "dot", "json": "json", "text": "txt"}

log = logging.getLogger("pragtree")


@dataclass
class CliConfig:
    command: str
    mode: str = "dual"
    paths: list[Path] = field(default_factory=list)
    out: Optional[Path] = None
    fmt: str = "json"
    strict_exit: bool = False

    def __post_init__(self):
        if self.command not in ("build", "check", "render", "stats"):
            raise ValueError(f"unknown command {self.command!r}")
        if self.mode == "dual" and self.command not in ("build", "check"):
            raise ValueError("dual mode is only valid for build and check")


def bundled_data(name: str) -> Path:
    return Path(str(resources.files("pragtree") / "data" / name))


def _expand(paths, pattern: str) -> list[Path]:
    files = []
    for p in paths:
        p = Path(p)
        files += sorted(p.glob(pattern)) if p.is_dir() else [p]
    return files


class InputError(Exception):
    pass


def _load(path: Path):
    try:
        return parse_transcript(path.read_bytes())
    except (OSError, TranscriptError) as e:
        raise InputError(f"{path}: {e}") from e


def _emit(text: str, out: Optional[Path]) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(text, encoding="utf-8")


def _parse_all(files):
    with ThreadPoolExecutor() as pool:
        return list(pool.map(_load, files))


def cmd_build(cfg: CliConfig) -> int:
    files = _expand(cfg.paths, TRANSCRIPT_GLOB)
    try:
        docs = _parse_all(files)
    except InputError as e:
        log.error("%s", e)
        return EXIT_INPUT
    modes = [Mode.CHARITY, Mode.REPAIR] if cfg.mode == "dual" else [Mode(cfg.mode)]
    violations = 0
    for path, doc in zip(files, docs):
        for mode in modes:
            try:
                graph = build(doc.attachment_items(), mode, doc.dialogue_id)
                if mode is Mode.CHARITY:
                    graph = classify_all(graph)
            except FrontierRejection as e:
                log.error("%s: %s", path, e)
                return EXIT_REJECTED
            except (AttachmentError, ValueError) as e:
                log.error("%s: %s", path, e)
                return EXIT_INPUT
            violations += len(graph.violations)
            payload = export_tree(graph, cfg.fmt).decode("utf-8")
            target = None
            if cfg.out is not None:
                target = cfg.out / f"{path.stem}.{mode.value}.{EXTENSIONS[cfg.fmt]}"
            _emit(payload, target)
    return EXIT_VIOLATIONS if cfg.strict_exit and violations else EXIT_OK


def cmd_check(cfg: CliConfig) -> int:
    files = _expand(cfg.paths, TRANSCRIPT_GLOB)
    try:
        docs = _parse_all(files)
        with ThreadPoolExecutor() as pool:
            reports = list(pool.map(analyze, docs))
    except (InputError, AttachmentError) as e:
        log.error("%s", e)
        return EXIT_INPUT
    summary = corpus_summary(reports)
    if cfg.fmt == "text":
        text = "".join(report_to_text(r) for r in reports)
        c = summary.counts
        text += (
            f"corpus: {c['dialogues']} dialogues, {c['RightFrontierRupture']} "
            f"RightFrontierRupture, {c['AscentWithoutClosure']} AscentWithoutClosure\n"
        )
    else:
        doc = {
            "reports": [report_to_dict(r) for r in reports],
            "corpus": summary.counts,
        }
        text = json.dumps(doc, ensure_ascii=False, indent=2) + "\n"
    _emit(text, cfg.out)
    return EXIT_VIOLATIONS if any(r.violations for r in reports) else EXIT_OK


def cmd_render(cfg: CliConfig) -> int:
    files = _expand(cfg.paths, "*.json")
    try:
        graphs = [graph_from_json(f.read_bytes()) for f in files]
    except (OSError, ValueError, KeyError) as e:
        log.error("%s", e)
        return EXIT_INPUT
    for path, graph in zip(files, graphs):
        target = None if cfg.out is None else cfg.out / f"{path.stem}.{EXTENSIONS[cfg.fmt]}"
        _emit(export_tree(graph, cfg.fmt).decode("utf-8"), target)
    return EXIT_OK


def cmd_stats(cfg: CliConfig) -> int:
    path = cfg.paths[0] if cfg.paths else bundled_data("sequences.csv")
    try:
        records = load_sequence_records(Path(path).read_bytes())
        t2, t3 = table2(records), table3(records)
    except (OSError, RecordError, MissingPopulationError) as e:
        log.error("%s", e)
        return EXIT_INPUT
    if cfg.fmt == "json":
        text = tables_to_json(t2, t3)
    elif cfg.fmt == "csv":
        text = tables_to_csv(t2, t3)
    else:
        text = t2.render() + "\n" + t3.render()
    _emit(text, cfg.out)
    return EXIT_OK


COMMANDS = {"build": cmd_build, "check": cmd_check, "render": cmd_render, "stats": cmd_stats}


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pragtree", description="Dialogue attachment trees and right-frontier audits."
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build", help="build attachment trees and export them")
    p.add_argument("paths", nargs="*", type=Path)
    p.add_argument("--mode", choices=["strict", "charity", "repair", "dual"], default="charity")
    p.add_argument("--format", dest="fmt", choices=["dot", "json", "text"], default="json")
    p.add_argument("--out", type=Path, help="output directory (default: stdout)")
    p.add_argument("--strict-exit", action="store_true", help="exit 1 when violations are recorded")

    p = sub.add_parser("check", help="run the dual analysis and report violations")
    p.add_argument("paths", nargs="*", type=Path)
    p.add_argument("--mode", choices=["dual"], default="dual")
    p.add_argument("--format", dest="fmt", choices=["json", "text"], default="json")
    p.add_argument("--out", type=Path, help="report file (default: stdout)")

    p = sub.add_parser("render", help="re-render exported JSON graphs")
    p.add_argument("paths", nargs="*", type=Path)
    p.add_argument("--format", dest="fmt", choices=["dot", "json", "text"], default="dot")
    p.add_argument("--out", type=Path, help="output directory (default: stdout)")

    p = sub.add_parser("stats", help="population and medication tables with tests")
    p.add_argument("paths", nargs="?", type=Path, help="sequence-record CSV (default: bundled)")
    p.add_argument("--format", dest="fmt", choices=["text", "json", "csv"], default="text")
    p.add_argument("--out", type=Path, help="output file (default: stdout)")
    return parser


def main(argv=None) -> int:
    logging.basicConfig(format="pragtree: %(message)s", level=logging.WARNING)
    args = make_parser().parse_args(argv)
    paths = args.paths if isinstance(args.paths, list) else [args.paths] if args.paths else []
    cfg = CliConfig(
        command=args.command,
        mode=getattr(args, "mode", "charity"),
        paths=paths,
        out=args.out,
        fmt=args.fmt,
        strict_exit=getattr(args, "strict_exit", False),
    )
    return COMMANDS[cfg.command](cfg)


if __name__ == "__main__":
    sys.exit(main())
