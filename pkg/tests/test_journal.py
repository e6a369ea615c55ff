import json

import pytest

from irmtool.errors import SchemaViolation
from irmtool.journal import KINDS, Decision, DecisionJournal


def d(did, kind, target, choice, author="t", ts=""):
    return Decision(decision_id=did, kind=kind, target=target, choice=choice,
                    author=author, timestamp=ts)


def test_kinds_frozen():
    assert KINDS == {"alias_merge", "owner", "direction", "type_override",
                     "composition"}


def test_append_and_revision(tmp_path):
    path = tmp_path / "j.jsonl"
    j = DecisionJournal(path=str(path))
    assert j.revision == 0
    j.append(d("alias:a|b", "alias_merge", "a|b", "accept"))
    j.append(d("alias:a|b", "alias_merge", "a|b", "reject"))
    assert j.revision == 2
    lines = path.read_text().splitlines()
    assert len(lines) == 2
    # append only: the first entry is still on disk
    assert json.loads(lines[0])["choice"] == "accept"


def test_later_entries_supersede():
    j = DecisionJournal()
    j.append(d("x", "direction", "1:E::a", "in"))
    j.append(d("x", "direction", "1:E::a", "out"))
    assert j.resolve("direction", "1:E::a") == "out"
    assert j.latest("direction", "1:E::a").choice == "out"
    assert j.resolve("direction", "nope") is None
    assert j.latest("owner", "1:E::a") is None


def test_load_round_trip(tmp_path):
    path = tmp_path / "j.jsonl"
    j = DecisionJournal(path=str(path))
    j.append(d("a", "alias_merge", "a|b", {"accept": True, "canonical": "b"}))
    j.append(d("b", "owner", "speed", "Car"))
    back = DecisionJournal.load(str(path))
    assert back.revision == 2
    assert [e.as_dict() for e in back.entries] == [e.as_dict() for e in j.entries]


def test_load_missing_file_is_empty(tmp_path):
    j = DecisionJournal.load(str(tmp_path / "absent.jsonl"))
    assert j.revision == 0 and j.entries == []


def test_load_rejects_bad_lines(tmp_path):
    p = tmp_path / "bad.jsonl"
    p.write_text("{not json\n")
    with pytest.raises(SchemaViolation):
        DecisionJournal.load(str(p))
    p.write_text(json.dumps({"decision_id": "x", "kind": "mystery",
                             "target": "t", "choice": "c"}) + "\n")
    with pytest.raises(SchemaViolation):
        DecisionJournal.load(str(p))
    p.write_text(json.dumps({"kind": "owner", "target": "t"}) + "\n")
    with pytest.raises(SchemaViolation):
        DecisionJournal.load(str(p))


def test_blank_lines_skipped(tmp_path):
    p = tmp_path / "j.jsonl"
    p.write_text("\n" + json.dumps(d("a", "owner", "t", "Car").as_dict()) + "\n\n")
    assert DecisionJournal.load(str(p)).revision == 1


def test_alias_decisions_normalization():
    j = DecisionJournal()
    j.append(d("1", "alias_merge", "a|b", "accept"))
    j.append(d("2", "alias_merge", "c|d", "reject"))
    j.append(d("3", "alias_merge", "e|f", {"accept": True, "canonical": "f"}))
    j.append(d("4", "alias_merge", "g|h", {"choice": "accept"}))
    got = j.alias_decisions()
    assert got["a|b"] == {"accept": True}
    assert got["c|d"] == {"accept": False}
    assert got["e|f"] == {"accept": True, "canonical": "f"}
    assert got["g|h"] == {"accept": True}


def test_typed_accessors():
    j = DecisionJournal()
    j.append(d("1", "owner", "speed", "Car"))
    j.append(d("2", "owner", "mass", {"owner": "Truck"}))
    j.append(d("3", "type_override", "4/main", "Process"))
    j.append(d("4", "type_override", "2", {"type": "Exchange"}))
    j.append(d("5", "direction", "1:E::a", "in"))
    j.append(d("6", "composition", "refine:x", "accept"))
    assert j.owner_decisions() == {"speed": "Car", "mass": "Truck"}
    assert j.type_overrides() == {"4/main": "Process", "2": "Exchange"}
    assert j.direction_decisions() == {"1:E::a": "in"}
    assert j.composition_decisions() == {"refine:x": "accept"}
    assert set(j.by_kind("owner")) == {"speed", "mass"}


def test_append_without_path_stays_in_memory():
    j = DecisionJournal()
    j.append(d("1", "owner", "speed", "Car"))
    assert j.path is None and j.revision == 1
