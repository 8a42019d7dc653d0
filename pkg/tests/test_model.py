from collections import Counter

import pytest

from pragtree.model import (
    RELATIONS,
    Layer,
    Orientation,
    Rank,
    UnknownRelationError,
    ViolationKind,
    ViolationRecord,
    expected_closer,
    opens_expectation,
    relation_profile,
    turn_number,
)


@pytest.mark.parametrize(
    "name, orientation, layer",
    [
        ("Question", Orientation.SUBORDINATING, Layer.CONVERSATIONAL),
        ("Narration", Orientation.COORDINATING, Layer.CONVERSATIONAL),
        ("CResponse", Orientation.COORDINATING, Layer.META),
        ("Phatic", Orientation.SUBORDINATING, Layer.META),
    ],
)
def test_relation_profile(name, orientation, layer):
    label = relation_profile(name)
    assert (label.orientation, label.layer) == (orientation, layer)


@pytest.mark.parametrize(
    "french, english",
    [
        ("Réponse", "Response"),
        ("Requête de clarification", "ClarificationRequest"),
        ("Contre-élaboration", "CounterElaboration"),
        ("Conduite", "Conduct"),
        ("C-Réponse", "CResponse"),
        ("Phatique", "Phatic"),
        ("question", "Question"),
    ],
)
def test_french_aliases(french, english):
    assert relation_profile(french).name == english


def test_unknown_relation():
    with pytest.raises(UnknownRelationError):
        relation_profile("Explanation")


def test_partition_sizes():
    sizes = Counter((r.orientation, r.layer) for r in RELATIONS.values())
    assert sizes == {
        (Orientation.SUBORDINATING, Layer.CONVERSATIONAL): 3,
        (Orientation.COORDINATING, Layer.CONVERSATIONAL): 2,
        (Orientation.SUBORDINATING, Layer.META): 3,
        (Orientation.COORDINATING, Layer.META): 2,
    }
    for name in RELATIONS:
        assert relation_profile(name).name == name


@pytest.mark.parametrize(
    "opener, closer",
    [
        ("Question", "Response"),
        ("ClarificationRequest", "Clarification"),
        ("Conduct", "CResponse"),
        ("Phatic", None),
        ("Elaboration", None),
        ("CounterElaboration", None),
    ],
)
def test_expected_closer(opener, closer):
    assert expected_closer(opener) == closer
    assert opens_expectation(opener) == (closer is not None)


def test_expected_closer_rejects_coordinating():
    with pytest.raises(ValueError):
        expected_closer("Response")


def test_closers_are_coordinating():
    for name, label in RELATIONS.items():
        if label.subordinating and expected_closer(name):
            assert relation_profile(expected_closer(name)).coordinating


def test_turn_number_is_numeric():
    assert turn_number("B124") < turn_number("A125") < turn_number("B126")
    assert turn_number("A9") < turn_number("A10")


def test_violation_record_invariants():
    with pytest.raises(ValueError):
        ViolationRecord(ViolationKind.ASCENT_WITHOUT_CLOSURE, "G88.1", "G82.1")
    with pytest.raises(ValueError):
        ViolationRecord(ViolationKind.RIGHT_FRONTIER_RUPTURE, "B130.1", "A125.1", ("X1.1",))
    with pytest.raises(ValueError):
        ViolationRecord(
            ViolationKind.RIGHT_FRONTIER_RUPTURE, "B130.1", "A125.1", decisive=True, turn_span=2
        )
    ok = ViolationRecord(
        ViolationKind.RIGHT_FRONTIER_RUPTURE, "B130.1", "A125.1", (), Rank.ACT, True, 3
    )
    assert ok.decisive
