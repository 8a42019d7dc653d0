"""Run the dual analysis on the bundled extracts and print both views.

Writes DOT files per view when --dot DIR is given.
"""

import argparse
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from pragtree.analysis import analyze, report_to_text
from pragtree.cli import bundled_data
from pragtree.transcript import export_tree, parse_transcript


@dataclass
class Config:
    names: tuple = ("extract1.sdrt", "extract2.sdrt")
    dot: Optional[Path] = None


def run(cfg: Config) -> None:
    for name in cfg.names:
        doc = parse_transcript(bundled_data(name).read_bytes())
        report = analyze(doc)
        print(report_to_text(report))
        for label, view in (("charity", report.charity_view), ("repair", report.repair_view)):
            print(f"-- {label} view")
            print(export_tree(view, "text").decode())
            if cfg.dot:
                cfg.dot.mkdir(parents=True, exist_ok=True)
                (cfg.dot / f"{Path(name).stem}.{label}.dot").write_bytes(export_tree(view, "dot"))


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--dot", type=Path)
    run(Config(dot=ap.parse_args().dot))
