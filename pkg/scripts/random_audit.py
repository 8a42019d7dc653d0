"""Monte Carlo audit: how often do random annotations break the right frontier?

Generates random annotated dialogues, runs both views, and tabulates
ruptures, ascents and repair notes per dialogue length.
"""

import argparse
import random
import sys
from collections import defaultdict
from dataclasses import dataclass

sys.path.insert(0, str(__import__("pathlib").Path(__file__).resolve().parents[1] / "tests"))

from generators import random_document  # noqa: E402
from pragtree.analysis import analyze  # noqa: E402


@dataclass
class Config:
    seed: int = 0
    trials: int = 2000
    max_acts: int = 20
    annotate_p: float = 0.85


def run(cfg: Config) -> dict:
    rng = random.Random(cfg.seed)
    rows = defaultdict(lambda: [0, 0, 0, 0])  # dialogues, ruptures, ascents, notes
    for _ in range(cfg.trials):
        n = rng.randint(1, cfg.max_acts)
        r = analyze(random_document(rng, n, cfg.annotate_p))
        row = rows[n]
        row[0] += 1
        row[1] += r.summary["RightFrontierRupture"]
        row[2] += r.summary["AscentWithoutClosure"]
        row[3] += len(r.repair_notes)
    return dict(sorted(rows.items()))


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    for name, default in vars(Config()).items():
        ap.add_argument(f"--{name.replace('_', '-')}", type=type(default), default=default)
    cfg = Config(**vars(ap.parse_args()))
    print(f"{'acts':>5} {'n':>6} {'rupt/dlg':>9} {'asc/dlg':>8} {'notes/dlg':>10}")
    for n, (d, ru, asc, no) in run(cfg).items():
        print(f"{n:>5} {d:>6} {ru / d:>9.2f} {asc / d:>8.2f} {no / d:>10.2f}")
