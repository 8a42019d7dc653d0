"""Recompute the population and medication tables from a sequence-record CSV.

    python scripts/reproduce_tables.py [records.csv] [--format text|json|csv]
"""

import argparse
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from pragtree.cli import bundled_data
from pragtree.stats import table2, table3, tables_to_csv, tables_to_json
from pragtree.transcript import load_sequence_records


@dataclass
class Config:
    records: Optional[Path] = None
    fmt: str = "text"


def run(cfg: Config) -> str:
    path = cfg.records or bundled_data("sequences.csv")
    records = load_sequence_records(Path(path).read_bytes())
    t2, t3 = table2(records), table3(records)
    if cfg.fmt == "json":
        return tables_to_json(t2, t3)
    if cfg.fmt == "csv":
        return tables_to_csv(t2, t3)
    return t2.render() + "\n" + t3.render()


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("records", nargs="?", type=Path)
    ap.add_argument("--format", dest="fmt", choices=["text", "json", "csv"], default="text")
    cfg = Config(**vars(ap.parse_args()))
    start = time.perf_counter()
    print(run(cfg), end="")
    print(f"\n[{time.perf_counter() - start:.3f}s]")
