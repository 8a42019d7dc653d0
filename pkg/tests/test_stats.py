import logging
import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import binomial_by_enumeration, chi2_tail_by_quadrature, pearson_by_definition
from pragtree.stats import (
    ContingencyTable2x2,
    DegenerateTableError,
    MissingPopulationError,
    binomial_onetailed,
    binomial_tail,
    chi2_2x2,
    chi2_sf_df1,
    format_p,
    table2,
    table3,
    tables_to_csv,
    tables_to_json,
)
from pragtree.transcript import Discontinuity, Medication, Population, SequenceRecord

T = ContingencyTable2x2


def test_stratum_contrasts():
    assert chi2_2x2(T(12, 47, 28, 14)).statistic == pytest.approx(22.015, abs=0.01)
    assert chi2_2x2(T(59, 81, 22, 86)).statistic == pytest.approx(13.141, abs=0.01)


def test_clinical_form_contrast():
    assert chi2_2x2(T(80, 128, 50, 100)).p_value == pytest.approx(0.319, abs=0.002)


def test_non_decisive_row_excludes_decisive_sequences():
    assert chi2_2x2(T(71, 128, 50, 100)).p_value == pytest.approx(0.649, abs=0.002)


def test_binomial_all_decisive_in_one_group():
    assert binomial_onetailed(9, 9).p_value == pytest.approx(0.00195, abs=1e-5)
    assert binomial_tail(9, 9, 0.5) == pytest.approx(1 / 512)


def test_proportional_rows_give_zero_statistic():
    r = chi2_2x2(T(10, 20, 5, 10))
    assert r.statistic == pytest.approx(0, abs=1e-12)
    assert r.p_value == 1.0


@pytest.mark.parametrize("cells", [(0, 0, 3, 4), (0, 5, 0, 7), (1, 0, 2, 0)])
def test_zero_margin_is_rejected(cells):
    with pytest.raises(DegenerateTableError):
        chi2_2x2(T(*cells))


def test_invalid_tables():
    with pytest.raises(ValueError):
        T(-1, 2, 3, 4)
    with pytest.raises(ValueError):
        T(0, 0, 0, 0)


cell = st.integers(1, 200)


@given(cell, cell, cell, cell)
def test_statistic_matches_definition(a, b, c, d):
    assert chi2_2x2(T(a, b, c, d)).statistic == pytest.approx(
        pearson_by_definition([[a, b], [c, d]]), rel=1e-9, abs=1e-9
    )


@given(cell, cell, cell, cell)
def test_yates_never_exceeds_uncorrected(a, b, c, d):
    t = T(a, b, c, d)
    assert chi2_2x2(t, corrected=True).statistic <= chi2_2x2(t).statistic + 1e-12


@given(cell, cell, cell, cell)
def test_swapping_rows_or_columns_is_invariant(a, b, c, d):
    base = chi2_2x2(T(a, b, c, d)).statistic
    assert chi2_2x2(T(c, d, a, b)).statistic == pytest.approx(base, rel=1e-9, abs=1e-12)
    assert chi2_2x2(T(b, a, d, c)).statistic == pytest.approx(base, rel=1e-9, abs=1e-12)
    assert chi2_2x2(T(a, c, b, d)).statistic == pytest.approx(base, rel=1e-9, abs=1e-12)


@given(cell, cell, cell, cell)
def test_doubling_counts_doubles_statistic(a, b, c, d):
    one = chi2_2x2(T(a, b, c, d)).statistic
    two = chi2_2x2(T(2 * a, 2 * b, 2 * c, 2 * d)).statistic
    assert two == pytest.approx(2 * one, rel=1e-9, abs=1e-9)


@pytest.mark.parametrize("x", [0.0, 0.1, 1.0, 3.841458820694124, 6.634896601021214, 22.015])
def test_survival_against_quadrature(x):
    assert abs(chi2_sf_df1(x) - chi2_tail_by_quadrature(x)) <= 1e-6


def test_critical_values():
    assert chi2_sf_df1(3.841458820694124) == pytest.approx(0.05, abs=1e-12)
    assert chi2_sf_df1(-1) == 1.0


@pytest.mark.parametrize("n", range(0, 9))
def test_binomial_against_enumeration(n):
    for k in range(n + 1):
        for p0 in ("1/2", "1/3", "3/4"):
            assert binomial_tail(k, n, p0) == binomial_by_enumeration(k, n, p0)


def test_binomial_edges():
    assert binomial_tail(0, 7, 0.5) == 1
    assert binomial_tail(5, 9, "1/2") == pytest.approx(0.5)
    with pytest.raises(ValueError):
        binomial_tail(4, 3, 0.5)
    with pytest.raises(ValueError):
        binomial_tail(1, 3, 1)


def test_format_p():
    assert format_p(0.00001) == "<.001"
    assert format_p(0.31946) == ".319"
    assert format_p(0.649) == ".649"


# -- tables ------------------------------------------------------------------


def test_table2_counts_and_tests(sequence_records):
    t = table2(sequence_records)
    P, D, HC = Population.SCH_P, Population.SCH_D, Population.HC
    nd, none, dec = Discontinuity.NON_DECISIVE, Discontinuity.NONE, Discontinuity.DECISIVE
    assert (t.counts[P][nd], t.counts[P][none], t.counts[P][dec]) == (71, 128, 9)
    assert (t.counts[D][nd], t.counts[D][none], t.counts[D][dec]) == (50, 100, 0)
    assert (t.counts[HC][nd], t.counts[HC][none], t.counts[HC][dec]) == (1, 44, 0)
    by = {(c.row, c.label): c for c in t.comparisons}
    assert len(by) == 8
    assert by["discontinuity", "SCH vs HC"].table.cells == (130, 228, 1, 44)
    assert by["non-decisive", "SCH-P vs SCH-D"].result.p_value == pytest.approx(0.649, abs=0.002)
    assert [b.k for b in t.binomials] == [9, 9]
    text = t.render()
    assert by["discontinuity", "SCH-P vs SCH-D"].result.p_value == pytest.approx(0.319, abs=0.002)
    assert "71 (34%)" in text and "p=.319" in text and "p=.649" in text and "p=0.00195" in text


def test_table3_strata(sequence_records):
    t = table3(sequence_records)
    stats = {c.row: c.result for c in t.comparisons}
    assert stats["SCH-A"].statistic == pytest.approx(13.141, abs=0.01)
    assert stats["SCH-S"].statistic == pytest.approx(22.015, abs=0.01)
    assert "59 (42%)" in t.render()


def test_table2_requires_all_populations(sequence_records):
    with pytest.raises(MissingPopulationError, match="HC"):
        table2([r for r in sequence_records if r.population is not Population.HC])


def test_table3_warns_on_missing_stratum(sequence_records, caplog):
    kept = [r for r in sequence_records if r.medication is not Medication.S]
    with caplog.at_level(logging.WARNING):
        t = table3(kept)
    assert [c.row for c in t.comparisons] == ["SCH-A"]
    assert "SCH-S" in caplog.text


def test_table3_degenerate_stratum(caplog):
    recs = [
        SequenceRecord(f"s{i}", pop, Medication.S, Discontinuity.NONE)
        for i, pop in enumerate([Population.SCH_P, Population.SCH_D] * 3)
    ]
    with caplog.at_level(logging.WARNING):
        assert table3(recs).comparisons == []
    assert "zero margin" in caplog.text


def test_machine_readable_outputs(sequence_records):
    t2, t3 = table2(sequence_records), table3(sequence_records)
    import json

    doc = json.loads(tables_to_json(t2, t3))
    assert doc["table2"]["counts"]["SCH-P"]["decisive"] == 9
    assert len(doc["table3"]["tests"]) == 2
    rows = tables_to_csv(t2, t3).splitlines()
    assert rows[0].startswith("table,row,comparison")
    assert len(rows) == 1 + 8 + 2 + 2
    assert math.isclose(float(rows[-1].split(",")[-1]), 0.001953125, rel_tol=1e-5)
