"""Domain types shared across the package.

Acts are the elementary units of a dialogue; they hang from a root node with
empty semantics through typed rhetorical relations.  The relation inventory
is closed: each label carries a fixed orientation (subordinating or
coordinating) and a layer (conversational or meta-conversational).
"""

from __future__ import annotations

import re
import unicodedata
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

ROOT = "ROOT"


class Orientation(str, Enum):
    SUBORDINATING = "subordinating"
    COORDINATING = "coordinating"


class Layer(str, Enum):
    CONVERSATIONAL = "conversational"
    META = "meta-conversational"


class Role(str, Enum):
    PATIENT = "patient"
    INTERVIEWER = "interviewer"
    UNSPECIFIED = "unspecified"


class Prosody(str, Enum):
    RISE = "rise"
    FALL = "fall"
    CONTINUATION = "continuation"
    PAUSE = "pause"


class Mode(str, Enum):
    STRICT = "strict"
    CHARITY = "charity"
    REPAIR = "repair"


class ViolationKind(str, Enum):
    RIGHT_FRONTIER_RUPTURE = "RightFrontierRupture"
    ASCENT_WITHOUT_CLOSURE = "AscentWithoutClosure"


class Rank(str, Enum):
    INTERVENTION = "intervention"
    ACT = "act"


class UnknownRelationError(ValueError):
    pass


@dataclass(frozen=True)
class RelationLabel:
    name: str
    orientation: Orientation
    layer: Layer

    @property
    def subordinating(self) -> bool:
        return self.orientation is Orientation.SUBORDINATING

    @property
    def coordinating(self) -> bool:
        return self.orientation is Orientation.COORDINATING

    def __str__(self) -> str:
        return self.name


def _label(name, orientation, layer):
    return RelationLabel(name, orientation, layer)


_S, _C = Orientation.SUBORDINATING, Orientation.COORDINATING
_CONV, _META = Layer.CONVERSATIONAL, Layer.META

RELATIONS: dict[str, RelationLabel] = {
    r.name: r
    for r in (
        _label("Question", _S, _CONV),
        _label("Elaboration", _S, _CONV),
        _label("CounterElaboration", _S, _CONV),
        _label("Response", _C, _CONV),
        _label("Narration", _C, _CONV),
        _label("ClarificationRequest", _S, _META),
        _label("Conduct", _S, _META),
        _label("Phatic", _S, _META),
        _label("Clarification", _C, _META),
        _label("CResponse", _C, _META),
    )
}

# subordinating label -> coordinating label that answers it
_CLOSERS = {
    "Question": "Response",
    "ClarificationRequest": "Clarification",
    "Conduct": "CResponse",
    "Elaboration": None,
    "CounterElaboration": None,
    "Phatic": None,
}

_FRENCH = {
    "reponse": "Response",
    "elaboration": "Elaboration",
    "contreelaboration": "CounterElaboration",
    "requetedeclarification": "ClarificationRequest",
    "conduite": "Conduct",
    "phatique": "Phatic",
    "creponse": "CResponse",
}


def _fold(name: str) -> str:
    decomposed = unicodedata.normalize("NFKD", name)
    stripped = "".join(ch for ch in decomposed if not unicodedata.combining(ch))
    return re.sub(r"[\s\-_']", "", stripped).casefold()


_LOOKUP = {_fold(n): n for n in RELATIONS}
_LOOKUP.update(_FRENCH)


def relation_profile(name: str | RelationLabel) -> RelationLabel:
    """Return the fixed profile of a relation.

    Accepts canonical English names as well as the French annotation names
    ("Réponse", "Requête de clarification", "C-Réponse", ...); matching
    ignores case, accents, spaces and hyphens.
    """
    if isinstance(name, RelationLabel):
        return name
    try:
        return RELATIONS[_LOOKUP[_fold(name)]]
    except (KeyError, TypeError):
        raise UnknownRelationError(f"unknown relation {name!r}") from None


def expected_closer(name: str | RelationLabel) -> Optional[str]:
    """Name of the coordinating relation that closes ``name``, if any."""
    label = relation_profile(name)
    if label.coordinating:
        raise ValueError(f"{label.name} is coordinating and opens no expectation")
    return _CLOSERS[label.name]


def opens_expectation(name: str | RelationLabel) -> bool:
    label = relation_profile(name)
    return label.subordinating and _CLOSERS[label.name] is not None


def normalize_theme(theme: str) -> str:
    return " ".join(theme.split()).casefold()


_TURN_RE = re.compile(r"^([^\W\d_]+)(\d+)$")


def turn_number(turn_id: str) -> int:
    """Numeric suffix of a turn label: ``turn_number("B124") == 124``."""
    m = _TURN_RE.match(turn_id)
    if not m:
        raise ValueError(f"malformed turn id {turn_id!r}")
    return int(m.group(2))


def split_act_id(act_id: str) -> tuple[str, int]:
    turn, _, sub = act_id.rpartition(".")
    if not turn or not sub.isdigit():
        raise ValueError(f"malformed act id {act_id!r}")
    return turn, int(sub)


@dataclass(frozen=True)
class Act:
    act_id: str
    turn_id: str
    speaker: str
    role: Role = Role.UNSPECIFIED
    text: str = ""
    theme: str = ""
    prosody: tuple[Prosody, ...] = ()

    @property
    def sub_index(self) -> int:
        return split_act_id(self.act_id)[1]

    @property
    def order_key(self) -> tuple[int, int]:
        return turn_number(self.turn_id), self.sub_index


@dataclass(frozen=True)
class Edge:
    site: str
    node: str
    relation: RelationLabel


@dataclass(frozen=True)
class AttachmentEvent:
    new_node: str
    requested_site: str
    realized_site: str
    relation: RelationLabel
    frontier_snapshot: tuple[str, ...]
    on_frontier: bool
    mode: Mode

    def __post_init__(self):
        if self.on_frontier != (self.requested_site in self.frontier_snapshot):
            raise ValueError("on_frontier must reflect membership of requested_site")


@dataclass(frozen=True)
class ThemeBox:
    box_id: int
    theme: str
    members: tuple[str, ...] = ()
    status: str = "open"


@dataclass(frozen=True)
class LedgerEntry:
    node: str
    opened_by: str
    status: str = "open"
    closed_by: Optional[str] = None


@dataclass(frozen=True)
class ViolationRecord:
    kind: ViolationKind
    trigger_node: str
    site_node: str
    open_nodes: tuple[str, ...] = ()
    constituent_rank: Rank = Rank.INTERVENTION
    decisive: bool = False
    turn_span: int = 0
    constituents: int = 0

    def __post_init__(self):
        ascent = self.kind is ViolationKind.ASCENT_WITHOUT_CLOSURE
        if ascent != bool(self.open_nodes):
            raise ValueError("open_nodes must be non-empty exactly for ascents")
        if self.decisive and self.turn_span < 3:
            raise ValueError("a decisive violation spans at least three turns")


@dataclass(frozen=True)
class RepairNote:
    """Re-targeting performed by the repair view.

    ``semantic_inconsistency`` is set when the forced site does not share
    the act's theme.
    """

    trigger_node: str
    requested_site: str
    realized_site: str
    requested_relation: RelationLabel
    realized_relation: RelationLabel
    act_theme: str
    site_theme: Optional[str]
    semantic_inconsistency: bool


@dataclass(frozen=True)
class DiscourseGraph:
    """Immutable snapshot of a rooted attachment tree.

    Every mutation in :mod:`pragtree.engine` returns a new graph.  The
    underscore fields are lookup indexes derived from the public ones and
    are excluded from equality.
    """

    dialogue_id: str = ""
    mode: Mode = Mode.CHARITY
    acts: tuple[Act, ...] = ()
    edges: tuple[Edge, ...] = ()
    history: tuple[AttachmentEvent, ...] = ()
    boxes: tuple[ThemeBox, ...] = ()
    ledger: tuple[LedgerEntry, ...] = ()
    violations: tuple[ViolationRecord, ...] = ()
    notes: tuple[RepairNote, ...] = ()
    _acts: dict = field(default=None, init=False, compare=False, repr=False)
    _edges: dict = field(default=None, init=False, compare=False, repr=False)
    _chains: dict = field(default=None, init=False, compare=False, repr=False)
    _box_of: dict = field(default=None, init=False, compare=False, repr=False)

    def __post_init__(self):
        acts = {a.act_id: a for a in self.acts}
        edges = {e.node: e for e in self.edges}
        chains = {ROOT: (ROOT,)}
        for e in self.edges:
            above = chains[e.site]
            # a coordinating link hides its site, but the root always stays open
            keep = e.relation.subordinating or e.site == ROOT
            chains[e.node] = (e.node,) + (above if keep else above[1:])
        box_of = {m: b.box_id for b in self.boxes for m in b.members}
        object.__setattr__(self, "_acts", acts)
        object.__setattr__(self, "_edges", edges)
        object.__setattr__(self, "_chains", chains)
        object.__setattr__(self, "_box_of", box_of)

    @property
    def nodes(self) -> tuple[str, ...]:
        return (ROOT,) + tuple(a.act_id for a in self.acts)

    @property
    def last(self) -> str:
        return self.acts[-1].act_id if self.acts else ROOT

    def __contains__(self, node: str) -> bool:
        return node == ROOT or node in self._acts

    def act(self, node: str) -> Act:
        return self._acts[node]

    def parent(self, node: str) -> Optional[str]:
        edge = self._edges.get(node)
        return edge.site if edge else None

    def edge_to(self, node: str) -> Optional[Edge]:
        return self._edges.get(node)

    def children(self, node: str) -> list[str]:
        return [e.node for e in self.edges if e.site == node]

    def frontier_chain(self, node: str) -> tuple[str, ...]:
        """Frontier the graph would have if ``node`` were the last attachment."""
        return self._chains[node]

    def box(self, box_id: int) -> ThemeBox:
        return self.boxes[box_id - 1]

    def box_of(self, node: str) -> Optional[ThemeBox]:
        box_id = self._box_of.get(node)
        return None if box_id is None else self.box(box_id)

    def theme_of(self, node: str) -> Optional[str]:
        box = self.box_of(node)
        return box.theme if box else None

    def open_entry(self, node: str) -> Optional[LedgerEntry]:
        for entry in self.ledger:
            if entry.node == node and entry.status == "open":
                return entry
        return None

    def ruptures(self) -> list[ViolationRecord]:
        return [v for v in self.violations if v.kind is ViolationKind.RIGHT_FRONTIER_RUPTURE]

    def ascents(self) -> list[ViolationRecord]:
        return [v for v in self.violations if v.kind is ViolationKind.ASCENT_WITHOUT_CLOSURE]
