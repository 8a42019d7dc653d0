"""Pragmatic attachment trees for annotated dialogues.

Builds rooted rhetorical-relation trees over dialogue acts, audits them
against the right-frontier constraint, and tabulates discontinuity counts.
"""

from .analysis import AnalysisReport, analyze, classify_decisive, corpus_summary
from .engine import (
    AttachmentError,
    FrontierRejection,
    ascend,
    attach,
    build,
    resolve_site,
    right_frontier,
)
from .model import (
    ROOT,
    Act,
    DiscourseGraph,
    Mode,
    RelationLabel,
    ViolationKind,
    ViolationRecord,
    expected_closer,
    relation_profile,
)
from .stats import ContingencyTable2x2, binomial_onetailed, chi2_2x2, table2, table3
from .transcript import export_tree, load_sequence_records, parse_transcript, serialize_transcript

__all__ = [
    "ROOT",
    "Act",
    "AnalysisReport",
    "AttachmentError",
    "ContingencyTable2x2",
    "DiscourseGraph",
    "FrontierRejection",
    "Mode",
    "RelationLabel",
    "ViolationKind",
    "ViolationRecord",
    "analyze",
    "ascend",
    "attach",
    "binomial_onetailed",
    "build",
    "chi2_2x2",
    "classify_decisive",
    "corpus_summary",
    "expected_closer",
    "export_tree",
    "load_sequence_records",
    "parse_transcript",
    "relation_profile",
    "resolve_site",
    "right_frontier",
    "serialize_transcript",
    "table2",
    "table3",
]
