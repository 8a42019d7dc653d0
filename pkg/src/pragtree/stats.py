"""2x2 contingency tests and the corpus discontinuity tables.

Pearson chi-square on 2x2 tables (df = 1, optional Yates correction) and an
exact one-tailed binomial test.  :func:`table2` and :func:`table3` aggregate
sequence records into the population and medication breakdowns.
"""

from __future__ import annotations

import io
import csv
import json
import logging
import math
from collections import Counter
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from math import comb

from .transcript import Discontinuity, Medication, Population, SequenceRecord

log = logging.getLogger(__name__)


class DegenerateTableError(ValueError):
    pass


class MissingPopulationError(ValueError):
    pass


@dataclass(frozen=True)
class ContingencyTable2x2:
    """Rows are groups, columns are outcome present / absent."""

    a: int
    b: int
    c: int
    d: int

    def __post_init__(self):
        if min(self.a, self.b, self.c, self.d) < 0:
            raise ValueError("cells must be non-negative")
        if self.total == 0:
            raise ValueError("table is empty")

    @property
    def total(self) -> int:
        return self.a + self.b + self.c + self.d

    @property
    def cells(self) -> tuple[int, int, int, int]:
        return self.a, self.b, self.c, self.d


@dataclass(frozen=True)
class TestResult:
    statistic: float
    p_value: float
    test: str
    df: int = 1

    __test__ = False  # not a pytest class


def chi2_sf_df1(x: float) -> float:
    """Upper tail of the chi-square distribution with one degree of freedom."""
    if x <= 0:
        return 1.0
    return math.erfc(math.sqrt(x / 2))


def chi2_2x2(t: ContingencyTable2x2, corrected: bool = False) -> TestResult:
    a, b, c, d = t.cells
    rows = (a + b, c + d)
    cols = (a + c, b + d)
    if 0 in rows or 0 in cols:
        raise DegenerateTableError(f"zero margin in table {t.cells}")
    n = t.total
    stat = 0.0
    for obs, r, k in ((a, 0, 0), (b, 0, 1), (c, 1, 0), (d, 1, 1)):
        exp = rows[r] * cols[k] / n
        dev = abs(obs - exp)
        if corrected:
            dev = max(dev - 0.5, 0.0)
        stat += dev * dev / exp
    return TestResult(stat, chi2_sf_df1(stat), "chi2-yates" if corrected else "chi2")


def binomial_tail(k: int, n: int, p0) -> Fraction:
    """Exact P(X >= k) for X ~ Binomial(n, p0)."""
    if not 0 <= k <= n:
        raise ValueError(f"need 0 <= k <= n, got k={k}, n={n}")
    p = Fraction(p0)
    if not 0 < p < 1:
        raise ValueError(f"p0 must lie strictly between 0 and 1, got {p0}")
    q = 1 - p
    return sum((comb(n, i) * p**i * q ** (n - i) for i in range(k, n + 1)), Fraction(0))


def binomial_onetailed(k: int, n: int, p0=0.5) -> TestResult:
    return TestResult(float(k), float(binomial_tail(k, n, p0)), "binomial", df=0)


# -- tables -------------------------------------------------------------------

P, D, HC = Population.SCH_P, Population.SCH_D, Population.HC
NONE, ND, DEC = Discontinuity.NONE, Discontinuity.NON_DECISIVE, Discontinuity.DECISIVE


def format_p(p: float) -> str:
    return "<.001" if p < 0.001 else f"{p:.3f}".lstrip("0")


def _p_clause(p: float) -> str:
    text = format_p(p)
    return "p" + text if text.startswith("<") else "p=" + text


def _pct(k: int, n: int) -> str:
    return f"{k} ({round(100 * k / n)}%)" if n else str(k)


@dataclass
class Comparison:
    row: str
    label: str
    table: ContingencyTable2x2
    result: TestResult

    def line(self) -> str:
        a, b, c, d = self.table.cells
        return (
            f"{self.row}: {self.label} ({a},{b} / {c},{d}) "
            f"chi2={self.result.statistic:.3f} {_p_clause(self.result.p_value)}"
        )


@dataclass
class BinomialComparison:
    label: str
    k: int
    n: int
    p0: float
    result: TestResult

    def line(self) -> str:
        return (
            f"decisive: {self.label} binomial k={self.k} n={self.n} p0={self.p0} "
            f"p={self.result.p_value:.5f}"
        )


@dataclass
class Table2:
    counts: dict  # population -> Counter over Discontinuity
    comparisons: list[Comparison] = field(default_factory=list)
    binomials: list[BinomialComparison] = field(default_factory=list)

    def total(self, pop) -> int:
        return sum(self.counts[pop].values())

    def render(self) -> str:
        pops = (P, D, HC)
        head = f"{'':42}" + "".join(f"{p.value:>12}" for p in pops)
        rows = [
            ("non-discontinuous sequences", lambda c: c[NONE]),
            ("sequences with discontinuity", lambda c: c[ND] + c[DEC]),
            ("- non-decisive discontinuity", lambda c: c[ND]),
            ("- decisive discontinuities", lambda c: c[DEC]),
        ]
        out = ["Discontinuities by population", head]
        for name, get in rows:
            out.append(
                f"{name:42}"
                + "".join(f"{_pct(get(self.counts[p]), self.total(p)):>12}" for p in pops)
            )
        out.append(f"{'total':42}" + "".join(f"{self.total(p):>12}" for p in pops))
        out += [c.line() for c in self.comparisons]
        out += [b.line() for b in self.binomials]
        return "\n".join(out) + "\n"


@dataclass
class Table3:
    counts: dict  # (medication, population) -> Counter over Discontinuity
    comparisons: list[Comparison] = field(default_factory=list)

    def render(self) -> str:
        out = ["Non-decisive discontinuities by clinical form and medication"]
        out.append(f"{'':10}{'':34}{P.value:>12}{D.value:>12}")
        for med in (Medication.S, Medication.A):
            if (med, P) not in self.counts:
                continue
            cp, cd = self.counts[med, P], self.counts[med, D]
            tp, td = cp[ND] + cp[NONE], cd[ND] + cd[NONE]
            stratum = f"SCH-{med.value}"
            out.append(f"{stratum:10}{'non-decisive discontinuity':34}{_pct(cp[ND], tp):>12}{_pct(cd[ND], td):>12}")
            out.append(f"{'':10}{'non-discontinuous':34}{_pct(cp[NONE], tp):>12}{_pct(cd[NONE], td):>12}")
            out.append(f"{'':10}{'total':34}{tp:>12}{td:>12}")
        out += [c.line() for c in self.comparisons]
        return "\n".join(out) + "\n"


def _count_by(records, key) -> dict:
    counts: dict = {}
    for r in records:
        counts.setdefault(key(r), Counter())[r.discontinuity] += 1
    return counts


def table2(records: list[SequenceRecord]) -> Table2:
    """Discontinuity counts per population with the four pairwise tests.

    Two rows are tested: any discontinuity against none, and non-decisive
    against none with decisive sequences left out of the margin.  The
    decisive counts are compared with an exact one-tailed binomial test at
    p0 = 0.5.
    """
    counts = _count_by(records, lambda r: r.population)
    missing = [p.value for p in (P, D, HC) if p not in counts]
    if missing:
        raise MissingPopulationError(f"no records for {', '.join(missing)}")
    sch = counts[P] + counts[D]
    groups = {"SCH": sch, P.value: counts[P], D.value: counts[D], HC.value: counts[HC]}
    pairs = [("SCH", HC.value), (P.value, HC.value), (D.value, HC.value), (P.value, D.value)]
    rows = {
        "discontinuity": lambda c: (c[ND] + c[DEC], c[NONE]),
        "non-decisive": lambda c: (c[ND], c[NONE]),
    }
    table = Table2(counts)
    for row, get in rows.items():
        for g1, g2 in pairs:
            t = ContingencyTable2x2(*get(groups[g1]), *get(groups[g2]))
            table.comparisons.append(Comparison(row, f"{g1} vs {g2}", t, chi2_2x2(t)))
    for other in (D, HC):
        k, n = counts[P][DEC], counts[P][DEC] + counts[other][DEC]
        if n:
            table.binomials.append(
                BinomialComparison(
                    f"{P.value} vs {other.value}", k, n, 0.5, binomial_onetailed(k, n, 0.5)
                )
            )
    return table


def table3(records: list[SequenceRecord]) -> Table3:
    """Non-decisive discontinuities of SCH-P vs SCH-D within each medication stratum."""
    sch = [r for r in records if r.population in (P, D) and r.discontinuity is not DEC]
    counts = _count_by(sch, lambda r: (r.medication, r.population))
    table = Table3({})
    for med in (Medication.S, Medication.A):
        cp, cd = counts.get((med, P)), counts.get((med, D))
        if not cp or not cd:
            log.warning("stratum SCH-%s lacks records for one population; omitted", med.value)
            continue
        t = ContingencyTable2x2(cp[ND], cp[NONE], cd[ND], cd[NONE])
        try:
            result = chi2_2x2(t)
        except DegenerateTableError:
            log.warning("stratum SCH-%s has a zero margin; omitted", med.value)
            continue
        table.counts[med, P], table.counts[med, D] = cp, cd
        table.comparisons.append(Comparison(f"SCH-{med.value}", "SCH-P vs SCH-D", t, result))
    return table


def _comparison_dict(c) -> dict:
    d = {"label": c.label, "result": asdict(c.result)}
    if isinstance(c, Comparison):
        d.update(row=c.row, cells=list(c.table.cells))
    else:
        d.update(k=c.k, n=c.n, p0=c.p0)
    return d


def tables_to_json(t2: Table2, t3: Table3) -> str:
    doc = {
        "table2": {
            "counts": {
                p.value: {k.value: t2.counts[p][k] for k in Discontinuity} for p in (P, D, HC)
            },
            "tests": [_comparison_dict(c) for c in t2.comparisons],
            "binomial": [_comparison_dict(b) for b in t2.binomials],
        },
        "table3": {
            "tests": [_comparison_dict(c) for c in t3.comparisons],
        },
    }
    return json.dumps(doc, indent=2) + "\n"


def tables_to_csv(t2: Table2, t3: Table3) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["table", "row", "comparison", "a", "b", "c", "d", "statistic", "p_value"])
    for name, comps in (("table2", t2.comparisons), ("table3", t3.comparisons)):
        for c in comps:
            w.writerow(
                [name, c.row, c.label, *c.table.cells, f"{c.result.statistic:.6f}", f"{c.result.p_value:.6g}"]
            )
    for b in t2.binomials:
        w.writerow(["table2", "decisive", b.label, b.k, b.n, "", "", f"{b.result.statistic:g}", f"{b.result.p_value:.6g}"])
    return buf.getvalue()
