"""Annotated transcript format, sequence-record CSV, and tree exports.

Transcript files are UTF-8 and line oriented::

    #dialogue extract1
    #speaker B patient
    #speaker A interviewer
    B124.1 B theme=politique attach=ROOT:Elaboration | Oh ouais (↑) et pis compliqué (↓)
    A125.1 A theme=politique attach=B124.2:Phatic | oui

Consecutive act lines sharing a turn label form one turn.  A site may name a
full act id, ``ROOT``, or a bare turn label (meaning that turn's latest act).
Prosody is read off the glyphs ``(↑) (↓) (→) (...)`` kept in the text.
"""

from __future__ import annotations

import csv
import io
import json
import re
from dataclasses import dataclass, field
from enum import Enum
from typing import IO, Optional, Union

from .model import (
    ROOT,
    Act,
    AttachmentEvent,
    DiscourseGraph,
    Edge,
    LedgerEntry,
    Mode,
    Prosody,
    Rank,
    RepairNote,
    Role,
    ThemeBox,
    UnknownRelationError,
    ViolationKind,
    ViolationRecord,
    relation_profile,
    turn_number,
)

Source = Union[bytes, str, IO]

GLYPHS = {
    "↑": Prosody.RISE,
    "↓": Prosody.FALL,
    "→": Prosody.CONTINUATION,
    "...": Prosody.PAUSE,
}

# anything parenthesised that looks like a prosody mark: one arrow, or dots
_MARK_RE = re.compile(r"\(([←-⇿⟰-⟿⤀-⥿]|[.…]+)\)")
_ACT_ID_RE = re.compile(r"^([^\W\d_]+\d+)\.(\d+)$")
_TURN_ID_RE = re.compile(r"^[^\W\d_]+\d+$")


class TranscriptError(ValueError):
    def __init__(self, message: str, line: int = 0, column: int = 0):
        where = f"line {line}, column {column}: " if line else ""
        super().__init__(where + message)
        self.line = line
        self.column = column


class TranscriptSyntaxError(TranscriptError):
    pass


class ProsodyError(TranscriptError):
    pass


class DanglingSiteError(TranscriptError):
    def __init__(self, site: str, line: int = 0, column: int = 0):
        super().__init__(f"annotation cites missing act {site!r}", line, column)
        self.site = site


class DuplicateActError(TranscriptError):
    def __init__(self, act_id: str, line: int = 0, column: int = 0):
        super().__init__(f"duplicate act id {act_id!r}", line, column)
        self.act_id = act_id


def prosody_tokens(text: str) -> tuple[Prosody, ...]:
    """Prosody marks of ``text`` in reading order; unknown marks raise."""
    tokens = []
    for m in _MARK_RE.finditer(text):
        glyph = m.group(1)
        if glyph not in GLYPHS:
            raise ProsodyError(f"unknown prosody mark {m.group(0)!r}", column=m.start() + 1)
        tokens.append(GLYPHS[glyph])
    return tuple(tokens)


@dataclass(frozen=True)
class Annotation:
    site: str
    relation: str


@dataclass(frozen=True)
class ActEntry:
    text: str
    theme: str
    annotation: Optional[Annotation] = None
    prosody: tuple[Prosody, ...] = field(init=False, default=())

    def __post_init__(self):
        object.__setattr__(self, "prosody", prosody_tokens(self.text))


@dataclass(frozen=True)
class Turn:
    turn_id: str
    speaker: str
    acts: tuple[ActEntry, ...]


@dataclass(frozen=True)
class TranscriptDocument:
    dialogue_id: str
    speakers: dict[str, Role]
    turns: tuple[Turn, ...] = ()

    def acts(self) -> list[tuple[Act, Optional[Annotation]]]:
        """Acts in document order, paired with their annotations."""
        out = []
        for turn in self.turns:
            role = self.speakers.get(turn.speaker, Role.UNSPECIFIED)
            for i, entry in enumerate(turn.acts, 1):
                act = Act(
                    f"{turn.turn_id}.{i}",
                    turn.turn_id,
                    turn.speaker,
                    role,
                    entry.text,
                    entry.theme,
                    entry.prosody,
                )
                out.append((act, entry.annotation))
        return out

    def attachment_items(self):
        """``(act, site, relation)`` triples accepted by :func:`engine.build`."""
        return [
            (act, ann.site if ann else None, ann.relation if ann else None)
            for act, ann in self.acts()
        ]


def _read_text(source: Source) -> str:
    if hasattr(source, "read"):
        source = source.read()
    if isinstance(source, bytes):
        source = source.decode("utf-8")
    return source


def parse_transcript(source: Source) -> TranscriptDocument:
    text = _read_text(source)
    dialogue_id = None
    speakers: dict[str, Role] = {}
    turns: list[Turn] = []
    cur_id = cur_speaker = None
    cur_acts: list[ActEntry] = []
    seen: set[str] = set()
    last_of_turn: dict[str, str] = {}

    def flush():
        if cur_id is not None:
            turns.append(Turn(cur_id, cur_speaker, tuple(cur_acts)))

    for lineno, raw in enumerate(text.replace("\r\n", "\n").split("\n"), 1):
        line = raw.rstrip()
        if not line.strip():
            continue
        if line.startswith("#"):
            parts = line[1:].split()
            directive = parts[0] if parts else ""
            if directive == "dialogue":
                if dialogue_id is not None or len(parts) != 2:
                    raise TranscriptSyntaxError("expected a single '#dialogue <id>'", lineno, 1)
                dialogue_id = parts[1]
            elif directive == "speaker":
                if len(parts) != 3:
                    raise TranscriptSyntaxError("expected '#speaker <tag> <role>'", lineno, 1)
                try:
                    speakers[parts[1]] = Role(parts[2])
                except ValueError:
                    col = line.index(parts[2], len("#speaker ") + len(parts[1])) + 1
                    raise TranscriptSyntaxError(f"unknown role {parts[2]!r}", lineno, col) from None
            else:
                raise TranscriptSyntaxError(f"unknown directive {line.split()[0]!r}", lineno, 1)
            continue
        if dialogue_id is None:
            raise TranscriptSyntaxError("missing '#dialogue <id>' header", lineno, 1)

        head, bar, body = line.partition("|")
        if not bar:
            raise TranscriptSyntaxError("missing '|' before the utterance", lineno, len(line) + 1)
        tokens = head.split()
        if len(tokens) < 3:
            raise TranscriptSyntaxError("expected '<act> <speaker> theme=<label>'", lineno, 1)
        act_id, speaker = tokens[0], tokens[1]
        m = _ACT_ID_RE.match(act_id)
        if not m:
            raise TranscriptSyntaxError(f"malformed act id {act_id!r}", lineno, 1)
        if act_id in seen:
            raise DuplicateActError(act_id, lineno, 1)
        turn_id, sub = m.group(1), int(m.group(2))
        if speaker not in speakers:
            col = head.index(speaker, len(act_id)) + 1
            raise TranscriptSyntaxError(f"undeclared speaker {speaker!r}", lineno, col)

        theme = None
        annotation = None
        for tok in tokens[2:]:
            col = head.index(tok) + 1
            key, eq, value = tok.partition("=")
            if key == "theme" and eq and value:
                theme = value
            elif key == "attach" and eq:
                site, colon, rel = value.rpartition(":")
                if not colon or not site:
                    raise TranscriptSyntaxError("expected attach=<site>:<Relation>", lineno, col)
                try:
                    rel = relation_profile(rel).name
                except UnknownRelationError as e:
                    raise TranscriptSyntaxError(str(e), lineno, col) from None
                if site != ROOT:
                    if _TURN_ID_RE.match(site) and site in last_of_turn:
                        site = last_of_turn[site]
                    if site not in seen:
                        raise DanglingSiteError(site, lineno, col)
                annotation = Annotation(site, rel)
            else:
                raise TranscriptSyntaxError(f"unexpected field {tok!r}", lineno, col)
        if theme is None:
            raise TranscriptSyntaxError("missing theme=<label>", lineno, 1)

        if turn_id == cur_id:
            if speaker != cur_speaker:
                raise TranscriptSyntaxError(f"speaker changes inside turn {turn_id}", lineno, 1)
            if sub != len(cur_acts) + 1:
                raise TranscriptSyntaxError(f"sub-index of {act_id} is not contiguous", lineno, 1)
        else:
            if sub != 1:
                raise TranscriptSyntaxError(f"turn {turn_id} must start at sub-index 1", lineno, 1)
            if cur_id is not None:
                if turn_number(turn_id) <= turn_number(cur_id):
                    raise TranscriptSyntaxError(
                        f"turn {turn_id} does not follow {cur_id}", lineno, 1
                    )
            flush()
            cur_id, cur_speaker, cur_acts = turn_id, speaker, []

        try:
            entry = ActEntry(body.strip(), theme, annotation)
        except ProsodyError as e:
            offset = len(head) + 1 + (len(body) - len(body.lstrip()))
            raise ProsodyError(str(e), lineno, offset + e.column) from None
        cur_acts.append(entry)
        seen.add(act_id)
        last_of_turn[turn_id] = act_id

    if dialogue_id is None:
        raise TranscriptSyntaxError("missing '#dialogue <id>' header", 1, 1)
    flush()
    return TranscriptDocument(dialogue_id, speakers, tuple(turns))


def serialize_transcript(doc: TranscriptDocument) -> str:
    lines = [f"#dialogue {doc.dialogue_id}"]
    lines += [f"#speaker {tag} {role.value}" for tag, role in doc.speakers.items()]
    for turn in doc.turns:
        for i, entry in enumerate(turn.acts, 1):
            if not entry.theme or len(entry.theme.split()) != 1:
                raise ValueError(f"theme {entry.theme!r} must be a single token")
            fields = [f"{turn.turn_id}.{i}", turn.speaker, f"theme={entry.theme}"]
            if entry.annotation:
                fields.append(f"attach={entry.annotation.site}:{entry.annotation.relation}")
            lines.append(" ".join(fields) + " | " + entry.text)
    return "\n".join(lines) + "\n"


# -- sequence records ---------------------------------------------------------


class Population(str, Enum):
    SCH_P = "SCH-P"
    SCH_D = "SCH-D"
    HC = "HC"


class Medication(str, Enum):
    A = "A"
    S = "S"
    NONE = "none"


class Discontinuity(str, Enum):
    NONE = "none"
    NON_DECISIVE = "non-decisive"
    DECISIVE = "decisive"


class RecordError(ValueError):
    def __init__(self, message: str, row: int = 0):
        super().__init__(f"row {row}: {message}" if row else message)
        self.row = row


@dataclass(frozen=True)
class SequenceRecord:
    sequence_id: str
    population: Population
    medication: Medication
    discontinuity: Discontinuity

    def __post_init__(self):
        if self.population is Population.HC and self.medication is not Medication.NONE:
            raise ValueError("control sequences carry no medication")


RECORD_FIELDS = ("sequence_id", "population", "medication", "discontinuity")


def load_sequence_records(source: Source) -> list[SequenceRecord]:
    """Read sequence records from comma-separated text with a header row.

    ``sequence_id`` is optional; rows without one are numbered.
    """
    reader = csv.DictReader(io.StringIO(_read_text(source)))
    missing = {"population", "medication", "discontinuity"} - set(reader.fieldnames or ())
    if missing:
        raise RecordError(f"header lacks {', '.join(sorted(missing))}")
    records = []
    for row_no, row in enumerate(reader, 2):
        try:
            record = SequenceRecord(
                (row.get("sequence_id") or f"row-{row_no}").strip(),
                Population(row["population"].strip()),
                Medication(row["medication"].strip()),
                Discontinuity(row["discontinuity"].strip()),
            )
        except (ValueError, AttributeError) as e:
            raise RecordError(str(e), row_no) from None
        records.append(record)
    return records


def dump_sequence_records(records) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(RECORD_FIELDS)
    for r in records:
        writer.writerow(
            [r.sequence_id, r.population.value, r.medication.value, r.discontinuity.value]
        )
    return buf.getvalue()


# -- graph serialization ------------------------------------------------------


def violation_to_dict(v: ViolationRecord) -> dict:
    return {
        "kind": v.kind.value,
        "trigger": v.trigger_node,
        "site": v.site_node,
        "open_nodes": list(v.open_nodes),
        "rank": v.constituent_rank.value,
        "decisive": v.decisive,
        "turn_span": v.turn_span,
        "constituents": v.constituents,
    }


def violation_from_dict(d: dict) -> ViolationRecord:
    return ViolationRecord(
        ViolationKind(d["kind"]),
        d["trigger"],
        d["site"],
        tuple(d["open_nodes"]),
        Rank(d["rank"]),
        d["decisive"],
        d["turn_span"],
        d["constituents"],
    )


def note_to_dict(n: RepairNote) -> dict:
    return {
        "trigger": n.trigger_node,
        "requested_site": n.requested_site,
        "realized_site": n.realized_site,
        "requested_relation": n.requested_relation.name,
        "realized_relation": n.realized_relation.name,
        "act_theme": n.act_theme,
        "site_theme": n.site_theme,
        "semantic_inconsistency": n.semantic_inconsistency,
    }


def note_from_dict(d: dict) -> RepairNote:
    return RepairNote(
        d["trigger"],
        d["requested_site"],
        d["realized_site"],
        relation_profile(d["requested_relation"]),
        relation_profile(d["realized_relation"]),
        d["act_theme"],
        d["site_theme"],
        d["semantic_inconsistency"],
    )


def graph_to_dict(g: DiscourseGraph) -> dict:
    return {
        "dialogue_id": g.dialogue_id,
        "mode": g.mode.value,
        "root": ROOT,
        "nodes": [
            {
                "id": a.act_id,
                "turn": a.turn_id,
                "speaker": a.speaker,
                "role": a.role.value,
                "theme": a.theme,
                "prosody": [p.value for p in a.prosody],
                "text": a.text,
            }
            for a in g.acts
        ],
        "edges": [
            {"site": e.site, "node": e.node, "relation": e.relation.name} for e in g.edges
        ],
        "boxes": [
            {"box_id": b.box_id, "theme": b.theme, "members": list(b.members), "status": b.status}
            for b in g.boxes
        ],
        "history": [
            {
                "node": h.new_node,
                "requested_site": h.requested_site,
                "realized_site": h.realized_site,
                "relation": h.relation.name,
                "frontier": list(h.frontier_snapshot),
                "on_frontier": h.on_frontier,
                "mode": h.mode.value,
            }
            for h in g.history
        ],
        "ledger": [
            {"node": e.node, "opened_by": e.opened_by, "status": e.status, "closed_by": e.closed_by}
            for e in g.ledger
        ],
        "violations": [violation_to_dict(v) for v in g.violations],
        "notes": [note_to_dict(n) for n in g.notes],
    }


def graph_from_dict(d: dict) -> DiscourseGraph:
    return DiscourseGraph(
        dialogue_id=d["dialogue_id"],
        mode=Mode(d["mode"]),
        acts=tuple(
            Act(
                n["id"],
                n["turn"],
                n["speaker"],
                Role(n["role"]),
                n["text"],
                n["theme"],
                tuple(Prosody(p) for p in n["prosody"]),
            )
            for n in d["nodes"]
        ),
        edges=tuple(Edge(e["site"], e["node"], relation_profile(e["relation"])) for e in d["edges"]),
        history=tuple(
            AttachmentEvent(
                h["node"],
                h["requested_site"],
                h["realized_site"],
                relation_profile(h["relation"]),
                tuple(h["frontier"]),
                h["on_frontier"],
                Mode(h["mode"]),
            )
            for h in d["history"]
        ),
        boxes=tuple(
            ThemeBox(b["box_id"], b["theme"], tuple(b["members"]), b["status"]) for b in d["boxes"]
        ),
        ledger=tuple(
            LedgerEntry(e["node"], e["opened_by"], e["status"], e["closed_by"]) for e in d["ledger"]
        ),
        violations=tuple(violation_from_dict(v) for v in d["violations"]),
        notes=tuple(note_from_dict(n) for n in d["notes"]),
    )


def graph_from_json(source: Source) -> DiscourseGraph:
    return graph_from_dict(json.loads(_read_text(source)))


def _dot_quote(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def _to_dot(g: DiscourseGraph) -> str:
    flagged = {v.trigger_node for v in g.violations}
    noted = {n.trigger_node for n in g.notes}
    out = [f"digraph {_dot_quote(g.dialogue_id or 'dialogue')} {{"]
    out.append("  rankdir=TB;")
    out.append("  node [shape=box, fontsize=10];")
    out.append(f'  {_dot_quote(ROOT)} [shape=circle, label=""];')
    for b in g.boxes:
        out.append(f"  subgraph cluster_box{b.box_id} {{")
        out.append("    style=dashed;")
        out.append(f"    label={_dot_quote(b.theme)};")
        for m in b.members:
            attrs = ""
            if m in flagged:
                attrs = " [color=red]"
            elif m in noted:
                attrs = " [color=orange]"
            out.append(f"    {_dot_quote(m)}{attrs};")
        out.append("  }")
    for e in g.edges:
        label = _dot_quote(e.relation.name)
        if e.relation.subordinating:
            out.append(f"  {_dot_quote(e.site)} -> {_dot_quote(e.node)} [label={label}];")
        else:
            out.append(
                f"  {_dot_quote(e.site)} -> {_dot_quote(e.node)} "
                f"[label={label}, constraint=false];"
            )
            out.append(f"  {{ rank=same; {_dot_quote(e.site)}; {_dot_quote(e.node)}; }}")
    out.append("}")
    return "\n".join(out) + "\n"


def _to_text(g: DiscourseGraph) -> str:
    # coordinated nodes stay at their site's depth; subordinated ones indent
    depth = {ROOT: 0}
    lines = [ROOT]
    kids: dict[str, list] = {}
    for e in g.edges:
        kids.setdefault(e.site, []).append(e)
    flags = {v.trigger_node: v.kind.value for v in g.violations}

    def walk(node):
        for e in kids.get(node, []):
            depth[e.node] = depth[node] + (1 if e.relation.subordinating else 0)
            act = g.act(e.node)
            marker = "+" if e.relation.subordinating else "="
            suffix = f"  !! {flags[e.node]}" if e.node in flags else ""
            lines.append(
                f"{'  ' * depth[e.node]}{marker} {e.relation.name} {e.node} "
                f"[{act.theme}] {act.text}{suffix}"
            )
            walk(e.node)

    walk(ROOT)
    return "\n".join(lines) + "\n"


def export_tree(graph: DiscourseGraph, fmt: str = "json") -> bytes:
    """Render a graph as ``dot``, ``json`` or an indented ``text`` outline."""
    if fmt == "json":
        text = json.dumps(graph_to_dict(graph), ensure_ascii=False, indent=2) + "\n"
    elif fmt == "dot":
        text = _to_dot(graph)
    elif fmt == "text":
        text = _to_text(graph)
    else:
        raise ValueError(f"unknown export format {fmt!r}")
    return text.encode("utf-8")
