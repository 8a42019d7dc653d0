"""Dual-view analysis of annotated dialogues.

The charity view (patient side) keeps every theme-faithful attachment and
records the pragmatic violations; the repair view (interviewer side) keeps
the frontier intact and records where that forces a semantic inconsistency.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, replace
from typing import Iterable, Mapping, Optional

from .engine import build
from .model import ROOT, DiscourseGraph, Mode, Rank, ViolationKind, ViolationRecord
from .transcript import (
    Discontinuity,
    Medication,
    Population,
    SequenceRecord,
    TranscriptDocument,
    graph_to_dict,
    note_to_dict,
    violation_to_dict,
)


@dataclass(frozen=True)
class AnalysisReport:
    dialogue_id: str
    charity_view: DiscourseGraph
    repair_view: DiscourseGraph
    violations: tuple[ViolationRecord, ...]
    repair_notes: tuple
    summary: dict

    @property
    def discontinuity(self) -> Discontinuity:
        if any(v.decisive for v in self.violations):
            return Discontinuity.DECISIVE
        if self.violations:
            return Discontinuity.NON_DECISIVE
        return Discontinuity.NONE


def _summarize(violations) -> dict:
    kinds = Counter(v.kind.value for v in violations)
    return {
        ViolationKind.RIGHT_FRONTIER_RUPTURE.value: kinds[ViolationKind.RIGHT_FRONTIER_RUPTURE.value],
        ViolationKind.ASCENT_WITHOUT_CLOSURE.value: kinds[ViolationKind.ASCENT_WITHOUT_CLOSURE.value],
        "decisive": sum(v.decisive for v in violations),
        "non_decisive": sum(not v.decisive for v in violations),
    }


def transaction_window(v: ViolationRecord, graph: DiscourseGraph) -> tuple[int, int]:
    """Document-order index range ``[lo, hi]`` of the transaction around ``v``.

    The maximal run of acts sharing the trigger's theme box, widened by one
    boundary act on each side and stretched back to the violation's site.
    """
    order = [a.act_id for a in graph.acts]
    t = order.index(v.trigger_node)
    box = graph.box_of(v.trigger_node)
    lo = hi = t
    while lo > 0 and graph.box_of(order[lo - 1]) == box:
        lo -= 1
    while hi < len(order) - 1 and graph.box_of(order[hi + 1]) == box:
        hi += 1
    lo, hi = max(lo - 1, 0), min(hi + 1, len(order) - 1)
    if v.site_node != ROOT:
        lo = min(lo, order.index(v.site_node))
    return lo, hi


def classify_decisive(v: ViolationRecord, graph: DiscourseGraph) -> ViolationRecord:
    """Fill in turn span, implicated constituents, rank and decisiveness.

    When the trigger continues its speaker's turn, the implicated
    constituents are the acts of that complex intervention up to the
    trigger; otherwise they are the interventions holding the site, the
    previous act and the trigger.
    """
    lo, hi = transaction_window(v, graph)
    span = len({a.turn_id for a in graph.acts[lo : hi + 1]})

    trigger = graph.act(v.trigger_node)
    idx = next(i for i, a in enumerate(graph.acts) if a.act_id == v.trigger_node)
    prev = graph.acts[idx - 1] if idx else None
    if prev is not None and prev.turn_id == trigger.turn_id:
        rank, constituents = Rank.ACT, trigger.sub_index
    else:
        turns = {trigger.turn_id}
        if prev is not None:
            turns.add(prev.turn_id)
        if v.site_node != ROOT:
            turns.add(graph.act(v.site_node).turn_id)
        rank, constituents = Rank.INTERVENTION, len(turns)
    return replace(
        v,
        constituent_rank=rank,
        constituents=constituents,
        turn_span=span,
        decisive=span >= 3 and constituents >= 3,
    )


def classify_all(graph: DiscourseGraph) -> DiscourseGraph:
    return replace(graph, violations=tuple(classify_decisive(v, graph) for v in graph.violations))


def analyze(doc: TranscriptDocument) -> AnalysisReport:
    items = doc.attachment_items()
    charity = classify_all(build(items, Mode.CHARITY, doc.dialogue_id))
    repair = build(items, Mode.REPAIR, doc.dialogue_id)
    return AnalysisReport(
        doc.dialogue_id,
        charity,
        repair,
        charity.violations,
        repair.notes,
        _summarize(charity.violations),
    )


@dataclass(frozen=True)
class CorpusSummary:
    counts: dict
    rows: tuple[SequenceRecord, ...]


def corpus_summary(
    reports: Iterable[AnalysisReport],
    populations: Optional[Mapping[str, tuple[str, str]]] = None,
) -> CorpusSummary:
    """Totals per violation kind plus one sequence record per dialogue.

    ``populations`` maps a dialogue id to ``(population, medication)``;
    dialogues missing from it are skipped when emitting records.
    """
    reports = list(reports)
    counts = _summarize([v for r in reports for v in r.violations])
    counts["dialogues"] = len(reports)
    rows = []
    for r in reports:
        if populations and r.dialogue_id in populations:
            pop, med = populations[r.dialogue_id]
            rows.append(
                SequenceRecord(r.dialogue_id, Population(pop), Medication(med), r.discontinuity)
            )
    return CorpusSummary(counts, tuple(rows))


def report_to_dict(report: AnalysisReport, views: bool = True) -> dict:
    d = {
        "dialogue_id": report.dialogue_id,
        "summary": report.summary,
        "violations": [violation_to_dict(v) for v in report.violations],
        "repair_notes": [note_to_dict(n) for n in report.repair_notes],
    }
    if views:
        d["charity_view"] = graph_to_dict(report.charity_view)
        d["repair_view"] = graph_to_dict(report.repair_view)
    return d


def report_to_json(report: AnalysisReport, views: bool = True) -> str:
    return json.dumps(report_to_dict(report, views), ensure_ascii=False, indent=2) + "\n"


def report_to_text(report: AnalysisReport) -> str:
    s = report.summary
    lines = [
        f"dialogue {report.dialogue_id}: "
        f"{s['RightFrontierRupture']} RightFrontierRupture, "
        f"{s['AscentWithoutClosure']} AscentWithoutClosure, "
        f"{len(report.repair_notes)} repair notes"
    ]
    for v in report.violations:
        lines.append(
            f"  {v.kind.value} trigger={v.trigger_node} site={v.site_node} "
            f"decisive={'yes' if v.decisive else 'no'} rank={v.constituent_rank.value}"
            + (f" open={','.join(v.open_nodes)}" if v.open_nodes else "")
        )
    for n in report.repair_notes:
        lines.append(
            f"  RepairNote trigger={n.trigger_node} requested={n.requested_site} "
            f"realized={n.realized_site} relation={n.realized_relation.name} "
            f"inconsistent={'yes' if n.semantic_inconsistency else 'no'}"
        )
    return "\n".join(lines) + "\n"
