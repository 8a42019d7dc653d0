"""Right-frontier attachment in strict, charity and repair modes.

The frontier of a tree is the last attached node plus every ancestor reached
through a subordinating link; a coordinating link hides its left-hand site.
Each node stores the frontier it would induce as the last attachment, so the
frontier after attaching ``n`` at ``s`` is ``(n,) + chain(s)`` when the link
is subordinating and ``(n,) + chain(s)[1:]`` when it is coordinating.
"""

from __future__ import annotations

from dataclasses import replace
from typing import Iterable, NamedTuple, Optional

from .model import (
    ROOT,
    Act,
    AttachmentEvent,
    DiscourseGraph,
    Edge,
    LedgerEntry,
    Mode,
    Rank,
    RelationLabel,
    RepairNote,
    Role,
    ThemeBox,
    ViolationKind,
    ViolationRecord,
    expected_closer,
    normalize_theme,
    opens_expectation,
    relation_profile,
)

Frontier = tuple[str, ...]

DEFAULT_RELATION = "Elaboration"


class AttachmentError(ValueError):
    pass


class UnknownSiteError(AttachmentError):
    def __init__(self, site: str):
        super().__init__(f"unknown attachment site {site!r}")
        self.site = site


class FrontierRejection(AttachmentError):
    def __init__(self, act_id: str, site: str, frontier: Frontier):
        super().__init__(
            f"strict mode rejects {act_id}: site {site} is not on the right "
            f"frontier [{', '.join(frontier)}]"
        )
        self.act_id = act_id
        self.site = site
        self.frontier = frontier


class AttachResult(NamedTuple):
    graph: DiscourseGraph
    violation: Optional[ViolationRecord] = None
    note: Optional[RepairNote] = None


def right_frontier(graph: DiscourseGraph) -> Frontier:
    """Attachment-eligible nodes, most recent first, ending at the root."""
    return graph.frontier_chain(graph.last)


def _same_theme(graph: DiscourseGraph, node: str, theme: str) -> bool:
    if node == ROOT:
        return False
    box = graph.box_of(node)
    return box is not None and normalize_theme(box.theme) == normalize_theme(theme)


def resolve_site(graph: DiscourseGraph, act: Act, relation) -> str:
    """Pick a frontier site for an unannotated act.

    Preference order: the lowest frontier node whose theme box matches the
    act; for a closing relation, the lowest frontier node whose open
    expectation it answers; for any other coordinating relation, the lowest
    frontier node; otherwise the root.
    """
    relation = relation_profile(relation)
    frontier = right_frontier(graph)
    for node in frontier:
        if _same_theme(graph, node, act.theme):
            return node
    if relation.coordinating:
        for node in frontier:
            entry = graph.open_entry(node)
            if entry and expected_closer(entry.opened_by) == relation.name:
                return node
        return frontier[0]
    return ROOT


def default_relation(graph: DiscourseGraph) -> str:
    """Closer of the most recent open expectation on the frontier, else Elaboration."""
    for node in right_frontier(graph):
        entry = graph.open_entry(node)
        if entry:
            return expected_closer(entry.opened_by)
    return DEFAULT_RELATION


def _repair_target(graph: DiscourseGraph, act: Act, frontier: Frontier) -> str:
    # lowest frontier node minimizing theme mismatch; the root never matches
    return min(
        enumerate(frontier),
        key=lambda item: (0 if _same_theme(graph, item[1], act.theme) else 1, item[0]),
    )[1]


def _rank(graph: DiscourseGraph, act: Act) -> Rank:
    if graph.acts and graph.acts[-1].turn_id == act.turn_id:
        return Rank.ACT
    return Rank.INTERVENTION


def _unclosed_below(graph: DiscourseGraph, site: str, frontier: Frontier) -> tuple[str, ...]:
    below = frontier[: frontier.index(site)]
    return tuple(n for n in reversed(below) if graph.open_entry(n))


def _update_ledger(graph, act_id, site, relation) -> tuple[LedgerEntry, ...]:
    ledger = list(graph.ledger)
    for i, entry in enumerate(ledger):
        if (
            entry.node == site
            and entry.status == "open"
            and expected_closer(entry.opened_by) == relation.name
        ):
            ledger[i] = replace(entry, status="closed", closed_by=act_id)
    if opens_expectation(relation):
        ledger.append(LedgerEntry(act_id, relation.name))
    return tuple(ledger)


def _update_boxes(graph, act, site, mode) -> tuple[ThemeBox, ...]:
    boxes = list(graph.boxes)
    current = graph.box_of(graph.last) if graph.acts else None
    if _same_theme(graph, site, act.theme):
        target = graph.box_of(site)
        boxes[target.box_id - 1] = replace(
            target, members=target.members + (act.act_id,), status="open"
        )
    else:
        target = ThemeBox(len(boxes) + 1, act.theme, (act.act_id,))
        boxes.append(target)
    if current and current.box_id != target.box_id and mode is not Mode.STRICT:
        boxes[current.box_id - 1] = replace(boxes[current.box_id - 1], status="closed")
    return tuple(boxes)


def attach(
    graph: DiscourseGraph,
    act: Act,
    site: str,
    relation,
    mode: Mode | str | None = None,
) -> AttachResult:
    """Attach ``act`` at ``site`` and return the new graph.

    Off-frontier sites are rejected in strict mode, kept with a
    RightFrontierRupture in charity mode, and re-targeted onto the frontier
    with a RepairNote in repair mode.  An on-frontier attachment above the
    last node is an ascent and is checked for unclosed expectations.
    """
    mode = Mode(mode) if mode is not None else graph.mode
    relation = relation_profile(relation)
    if site not in graph:
        raise UnknownSiteError(site)
    if act.act_id in graph:
        raise AttachmentError(f"act {act.act_id} is already attached")
    if graph.acts and act.order_key <= graph.acts[-1].order_key:
        raise AttachmentError(
            f"act {act.act_id} arrives after {graph.last} out of document order"
        )

    frontier = right_frontier(graph)
    on_frontier = site in frontier
    realized, realized_relation = site, relation
    violation = note = None

    if not on_frontier:
        if mode is Mode.STRICT:
            raise FrontierRejection(act.act_id, site, frontier)
        if mode is Mode.CHARITY:
            violation = ViolationRecord(
                ViolationKind.RIGHT_FRONTIER_RUPTURE,
                act.act_id,
                site,
                constituent_rank=_rank(graph, act),
            )
        else:
            realized = _repair_target(graph, act, frontier)
            entry = graph.open_entry(realized)
            if entry:
                # the interviewer reads the act as the awaited reply
                realized_relation = relation_profile(expected_closer(entry.opened_by))
            note = RepairNote(
                act.act_id,
                site,
                realized,
                relation,
                realized_relation,
                act.theme,
                graph.theme_of(realized),
                not _same_theme(graph, realized, act.theme),
            )

    if violation is None and realized != frontier[0]:
        unclosed = _unclosed_below(graph, realized, frontier)
        licit = act.role is Role.INTERVIEWER and opens_expectation(realized_relation)
        if unclosed and not licit:
            violation = ViolationRecord(
                ViolationKind.ASCENT_WITHOUT_CLOSURE,
                act.act_id,
                realized,
                open_nodes=unclosed,
                constituent_rank=_rank(graph, act),
            )

    event = AttachmentEvent(
        act.act_id, site, realized, realized_relation, frontier, on_frontier, mode
    )
    new = DiscourseGraph(
        dialogue_id=graph.dialogue_id,
        mode=graph.mode,
        acts=graph.acts + (act,),
        edges=graph.edges + (Edge(realized, act.act_id, realized_relation),),
        history=graph.history + (event,),
        boxes=_update_boxes(graph, act, realized, mode),
        ledger=_update_ledger(graph, act.act_id, realized, realized_relation),
        violations=graph.violations + ((violation,) if violation else ()),
        notes=graph.notes + ((note,) if note else ()),
    )
    return AttachResult(new, violation, note)


def ascend(graph: DiscourseGraph, act: Act, site: str, relation, mode=None) -> AttachResult:
    """Attach ``act`` at a frontier node strictly above the last attachment.

    Reports AscentWithoutClosure when the abandoned part of the frontier
    still holds open expectations, unless the interviewer is opening a new
    part of the exchange with an expectation-opening relation.
    """
    frontier = right_frontier(graph)
    if site not in frontier[1:]:
        raise AttachmentError(
            f"{site} is not on the frontier above {frontier[0]}; not an ascent"
        )
    return attach(graph, act, site, relation, mode)


def build(
    items: Iterable[tuple[Act, Optional[str], Optional[RelationLabel | str]]],
    mode: Mode | str,
    dialogue_id: str = "",
) -> DiscourseGraph:
    """Attach a document-ordered sequence of ``(act, site, relation)``.

    Missing sites are chosen by :func:`resolve_site`; a missing relation
    defaults to the closer of the most recent open expectation on the
    frontier, or Elaboration.
    """
    mode = Mode(mode)
    graph = DiscourseGraph(dialogue_id=dialogue_id, mode=mode)
    for act, site, relation in items:
        if relation is None:
            relation = default_relation(graph)
        if site is None:
            site = resolve_site(graph, act, relation)
        graph = attach(graph, act, site, relation, mode).graph
    return graph
