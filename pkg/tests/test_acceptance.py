"""One test per acceptance criterion; the terminal summary prints PASS/FAIL lines."""

import json
import random
import subprocess
import sys
import time
from fractions import Fraction

import pytest
from hypothesis import given, settings

from conftest import DATA, FIXTURES
from generators import documents, random_document, random_graph
from oracles import binomial_by_enumeration, brute_force_frontier, chi2_tail_by_quadrature
from pragtree.analysis import analyze
from pragtree.cli import main
from pragtree.engine import right_frontier
from pragtree.model import Mode, normalize_theme
from pragtree.stats import binomial_tail, chi2_sf_df1, table2, table3
from pragtree.transcript import load_sequence_records, parse_transcript, serialize_transcript

criterion = pytest.mark.criterion


# 1 ---------------------------------------------------------------------------


@criterion("1 bundled CSV reproduces the published statistics in under 1s")
def test_reproduce_published_statistics():
    start = time.perf_counter()
    records = load_sequence_records((DATA / "sequences.csv").read_bytes())
    t2, t3 = table2(records), table3(records)
    elapsed = time.perf_counter() - start

    strata = {c.row: c.result for c in t3.comparisons}
    assert strata["SCH-S"].statistic == pytest.approx(22.015, abs=0.01)
    assert strata["SCH-A"].statistic == pytest.approx(13.141, abs=0.01)
    forms = {c.row: c.result for c in t2.comparisons if c.label == "SCH-P vs SCH-D"}
    assert forms["discontinuity"].p_value == pytest.approx(0.319, abs=0.002)
    assert forms["non-decisive"].p_value == pytest.approx(0.649, abs=0.002)
    assert t2.binomials[0].result.p_value == pytest.approx(0.00195, abs=1e-5)
    assert elapsed < 1.0


@criterion("1 stats CLI end to end in under 1s")
def test_stats_cli_runtime():
    start = time.perf_counter()
    proc = subprocess.run(
        [sys.executable, "-m", "pragtree", "stats"], capture_output=True, text=True, check=True
    )
    elapsed = time.perf_counter() - start
    for needle in ("chi2=22.015", "chi2=13.141", "p=.319", "p=.649", "p=0.00195"):
        assert needle in proc.stdout
    assert elapsed < 1.0


# 2 ---------------------------------------------------------------------------


def _check(path, capsys):
    code = main(["check", str(path)])
    (report,) = json.loads(capsys.readouterr().out)["reports"]
    return code, report["violations"]


@criterion("2 extract 1: two right-frontier ruptures, no ascent")
def test_extract1_check(capsys):
    code, vs = _check(DATA / "extract1.sdrt", capsys)
    assert code == 1
    ruptures = [v for v in vs if v["kind"] == "RightFrontierRupture"]
    assert [v["trigger"] for v in ruptures] == ["B130.1", "B132.3"]
    assert not [v for v in vs if v["kind"] == "AscentWithoutClosure"]


@criterion("2 extract 2: one ascent without closure at G88, V87 licit")
def test_extract2_check(capsys):
    code, vs = _check(DATA / "extract2.sdrt", capsys)
    assert code == 1
    assert [(v["kind"], v["trigger"]) for v in vs] == [("AscentWithoutClosure", "G88.1")]
    assert not any(v["trigger"].startswith("V87") for v in vs)


# 3 ---------------------------------------------------------------------------


@criterion("3 strict soundness over 10,000 random sequences")
def test_strict_soundness():
    rng = random.Random(20240601)
    for _ in range(10_000):
        # random_graph asserts every rejected site was off the frontier
        g = random_graph(rng, rng.randint(1, 20), Mode.STRICT)
        assert all(ev.on_frontier for ev in g.history)
        assert not g.ruptures()


@criterion("3 incremental frontier equals the path oracle on 1,000 graphs")
def test_frontier_oracle():
    rng = random.Random(7)
    checked = 0

    def hook(g):
        nonlocal checked
        edges = [(e.site, e.node, e.relation.subordinating) for e in g.edges]
        assert list(right_frontier(g)) == brute_force_frontier(edges, g.last)
        checked += 1

    for i in range(1_000):
        random_graph(rng, rng.randint(1, 12), (Mode.CHARITY, Mode.REPAIR)[i % 2], hook)
    assert checked >= 1_000


@criterion("3 charity/repair duality over 1,000 random transcripts")
def test_duality():
    rng = random.Random(99)
    for _ in range(1_000):
        r = analyze(random_document(rng, rng.randint(1, 20)))
        assert set(r.charity_view.nodes) == set(r.repair_view.nodes)
        assert all(ev.realized_site in ev.frontier_snapshot for ev in r.repair_view.history)
        assert not r.repair_view.ruptures()
        for box in r.charity_view.boxes:
            themes = {normalize_theme(r.charity_view.act(m).theme) for m in box.members}
            assert len(themes) == 1


@criterion("3 exact binomial tail equals enumeration for n <= 12")
def test_binomial_exact():
    for p0 in (Fraction(1, 2), Fraction(1, 3)):
        for n in range(13):
            for k in range(n + 1):
                assert binomial_tail(k, n, p0) == binomial_by_enumeration(k, n, p0)


@criterion("3 chi-square p-value within 1e-6 of quadrature on [0, 30]")
def test_chi2_against_quadrature():
    grid = [i / 4 for i in range(121)]
    worst = max(abs(chi2_sf_df1(x) - chi2_tail_by_quadrature(x)) for x in grid)
    assert worst <= 1e-6


@criterion("3 transcript parse of serialize is the identity")
@given(documents())
@settings(max_examples=500, deadline=None)
def test_transcript_round_trip(doc):
    assert parse_transcript(serialize_transcript(doc).encode("utf-8")) == doc


# 4 ---------------------------------------------------------------------------


@criterion("4 check output is byte-identical across runs")
def test_check_is_deterministic(tmp_path):
    outs = []
    for i in range(2):
        proc = subprocess.run(
            [sys.executable, "-m", "pragtree", "check", str(DATA), str(FIXTURES)],
            capture_output=True,
        )
        assert proc.returncode == 1
        outs.append(proc.stdout)
    assert outs[0] == outs[1] and len(outs[0]) > 0
