import json
import os

import pytest

from irmtool.classify import ClassifiedRequirement
from irmtool.entities import ComponentCatalog
from irmtool.errors import (DanglingInvariant, NoOutputOwner, SchemaViolation,
                            UnresolvedProposal)
from irmtool.flow import (FlowParameter, FlowSignature, format_signature,
                          parse_signature)
from irmtool.journal import Decision, DecisionJournal
from irmtool.model import (Decomposition, Invariant, IrmModel, canonical_json,
                           check_model, compose, deserialize_model,
                           group_situations, journal_reference,
                           merge_signatures, model_as_dict, propose_refinement,
                           serialize_model)

from conftest import GOLD, read_bytes, read_json


def test_gold_model_bytes_match_fixture(gold_state):
    got = read_bytes(os.path.join(gold_state, "model.json"))
    assert got == read_bytes(os.path.join(GOLD, "model.json"))


@pytest.fixture(scope="module")
def gold_model():
    return read_json(os.path.join(GOLD, "model.json"))


def test_gold_model_shape(gold_model):
    assert [c["name"] for c in gold_model["components"]] == ["E-Car", "Parking"]
    assert [i["id"] for i in gold_model["invariants"]] == list(range(1, 15))
    types = {i["id"]: i["type"] for i in gold_model["invariants"]}
    assert types[1] == "Abstract" and types[5] == "Abstract"
    assert types[6] == "Abstract" and types[10] == "Abstract"
    assert types[7] == "Assumption" and types[11] == "Assumption"
    assert types[8] == "Exchange" and types[12] == "Exchange"
    assert types[9] == "Process" and types[13] == "Process"
    sysout = [i["id"] for i in gold_model["invariants"] if i["system_output"]]
    assert sysout == [1]


def test_gold_model_decompositions(gold_model):
    decomps = {d["parent"]: (d["mode"], d["children"])
               for d in gold_model["decompositions"]}
    assert decomps[1] == ("AND", [2, 3, 4, 5])
    assert decomps[5] == ("OR", [6, 10])
    assert decomps[6] == ("AND", [7, 8, 9])
    assert decomps[10] == ("AND", [11, 12, 13])
    assert set(decomps) == {1, 5, 6, 10}


def test_gold_model_situation_alternatives(gold_model):
    by_id = {i["id"]: i for i in gold_model["invariants"]}
    assert by_id[5]["text"] == "Alternative: E-Car::plan maintained"
    assert by_id[6]["text"] == "When distance(E-Car::position, E-Car::POI) > 5 km"
    assert by_id[10]["text"] == "When distance(E-Car::position, E-Car::POI) <= 5 km"
    for ex in (8, 12):
        assert by_id[ex]["signature"] == "Parking::availability -> E-Car::?"
        assert by_id[ex]["text"] == "Parking::availability is propagated to E-Car"
    for proc, period in ((9, 60), (13, 10)):
        assert by_id[proc]["signature"] == \
            "E-Car::energy, E-Car::POI, Parking::availability -> E-Car::plan"
        assert by_id[proc]["timing"] == {"max_period": period, "unit": "second"}


def test_gold_model_traces(gold_model):
    assert gold_model["traces"] == {
        "1": [1], "1(a)": [2], "1(b)": [3], "1(c)": [4], "1(d)": [9, 13],
        "2": [14], "3": [8, 12], "4": [7, 9], "5": [11, 13]}
    by_id = {i["id"]: i for i in gold_model["invariants"]}
    # per-invariant traces agree with the inverted table
    for item, nodes in gold_model["traces"].items():
        for n in nodes:
            assert item in by_id[n]["traces"], (item, n)


def test_gold_journal_ref(gold_model):
    ref = gold_model["journal_ref"]
    assert ref["path"] == "decisions.jsonl"
    assert ref["revision"] == 35
    recomputed = journal_reference(os.path.join(GOLD, "decisions.jsonl"), 35)
    assert recomputed["sha256"] == ref["sha256"]


def test_serialize_round_trip(gold_state):
    text = open(os.path.join(gold_state, "model.json"), encoding="utf-8").read()
    model = deserialize_model(text)
    assert serialize_model(model) == text
    again = deserialize_model(serialize_model(model))
    assert model_as_dict(again) == model_as_dict(model)


def test_canonical_json_is_key_sorted_and_stable():
    a = canonical_json({"b": 1, "a": [{"y": 2, "x": 1}]})
    b = canonical_json({"a": [{"x": 1, "y": 2}], "b": 1})
    assert a == b
    assert a.index('"a"') < a.index('"b"')


def _inv(node_id, rtype="Process", sig=""):
    return Invariant(node_id=node_id, rtype=rtype, text="inv %d" % node_id,
                     signature=sig)


def _model(invs, decomps):
    return IrmModel(components=[], invariants=invs, decompositions=decomps)


def test_check_model_accepts_simple_tree():
    m = _model([_inv(1, "Abstract"), _inv(2), _inv(3)],
               [Decomposition(1, "AND", [2, 3])])
    check_model(m)


def test_check_model_duplicate_ids():
    with pytest.raises(SchemaViolation):
        check_model(_model([_inv(1), _inv(1)], []))


def test_check_model_unknown_parent_and_child():
    with pytest.raises(SchemaViolation):
        check_model(_model([_inv(1)], [Decomposition(9, "AND", [1])]))
    with pytest.raises(SchemaViolation):
        check_model(_model([_inv(1, "Abstract")], [Decomposition(1, "AND", [9])]))


def test_check_model_bad_mode():
    with pytest.raises(SchemaViolation):
        check_model(_model([_inv(1, "Abstract"), _inv(2)],
                           [Decomposition(1, "XOR", [2])]))


def test_check_model_two_parents():
    m = _model([_inv(1, "Abstract"), _inv(2, "Abstract"), _inv(3)],
               [Decomposition(1, "AND", [3]), Decomposition(2, "AND", [3])])
    with pytest.raises(DanglingInvariant):
        check_model(m)


def test_check_model_unreachable():
    m = _model([_inv(1, "Abstract"), _inv(2), _inv(3, "Abstract"), _inv(4)],
               [Decomposition(1, "AND", [2]), Decomposition(3, "AND", [4])])
    # both 1 and 3 are roots, everything reachable: fine
    check_model(m)
    # a cycle among non-roots is unreachable
    bad = _model([_inv(1, "Abstract"), _inv(2, "Abstract"), _inv(3, "Abstract")],
                 [Decomposition(2, "AND", [3]), Decomposition(3, "AND", [2])])
    with pytest.raises(DanglingInvariant):
        check_model(bad)


def test_check_model_leaf_with_children():
    m = _model([_inv(1, "Process"), _inv(2)], [Decomposition(1, "AND", [2])])
    with pytest.raises(SchemaViolation):
        check_model(m)


def test_propose_refinement_splits_networked_process():
    sig = parse_signature(
        "E-Car::energy, E-Car::POI, Parking::availability -> E-Car::plan",
        key="1(d)")
    got = propose_refinement(sig)
    assert got["computing"] == "E-Car"
    assert format_signature(got["exchange"]) == "Parking::availability -> E-Car::?"
    assert format_signature(got["process"]) == format_signature(sig)
    assert got["exchange"].rtype == "Exchange"
    assert got["process"].rtype == "Process"


def test_propose_refinement_rejects_split_ownership():
    sig = parse_signature("A::x -> B::y, C::z", key="k")
    with pytest.raises(NoOutputOwner):
        propose_refinement(sig)


def test_propose_refinement_rejects_missing_output():
    # all-input signatures have no computing side to assign
    sig = parse_signature("A::x, B::y ->", key="k")
    with pytest.raises(NoOutputOwner):
        propose_refinement(sig)


def test_merge_signatures_subsumes_general():
    base = parse_signature("-> E-Car::plan", key="5/main")
    general = parse_signature(
        "E-Car::energy, E-Car::POI, Parking::availability -> E-Car::plan",
        key="1(d)")
    merged = merge_signatures(base, general)
    assert format_signature(merged) == \
        "E-Car::energy, E-Car::POI, Parking::availability -> E-Car::plan"
    # base's own output is never duplicated as an input
    assert sum(1 for p in merged.params if p.ref == "E-Car::plan") == 1


def _record(key, item_id, rtype, role="whole", section="General", text=""):
    return ClassifiedRequirement(key=key, item_id=item_id, role=role,
                                 section=section, text=text or key,
                                 rtype=rtype, confidence=1.0, origin="rule",
                                 main_verb="", sentence_ids=[])


def _situation_records():
    records = [
        _record("4/assumption", "4", "Assumption", role="assumption",
                section="SituationSpecific"),
        _record("4/main", "4", "Process", role="main",
                section="SituationSpecific"),
        _record("5/assumption", "5", "Assumption", role="assumption",
                section="SituationSpecific"),
        _record("5/main", "5", "Process", role="main",
                section="SituationSpecific"),
        _record("1(d)", "1(d)", "Process"),
    ]
    sigs = {
        "4/assumption": parse_signature("E::poi ->", key="4/assumption",
                                        rtype="Assumption"),
        "4/main": parse_signature("-> E::plan", key="4/main"),
        "5/assumption": parse_signature("E::poi ->", key="5/assumption",
                                        rtype="Assumption"),
        "5/main": parse_signature("-> E::plan", key="5/main"),
        "1(d)": parse_signature("E::energy, P::avail -> E::plan", key="1(d)"),
    }
    return records, sigs


def test_group_situations_by_output_set():
    records, sigs = _situation_records()
    groups = group_situations(records, sigs)
    assert len(groups) == 1
    g = groups[0]
    assert g["outs"] == ["E::plan"]
    assert g["items"] == ["4", "5"]
    assert g["general"] == "1(d)"
    assert g["pairs"]["4"] == {"assumption": "4/assumption", "main": "4/main"}


def test_group_needs_two_items():
    records, sigs = _situation_records()
    records = [r for r in records if r.item_id != "5"]
    assert group_situations(records, sigs) == []


class _FakeItem:
    def __init__(self, item_id, parent_id=None, section="General"):
        self.item_id = item_id
        self.parent_id = parent_id
        self.section = section


class _FakeDoc:
    items = ()

    def children_of(self, item_id):
        return [i for i in self.items if i.parent_id == item_id]


def _situation_doc():
    doc = _FakeDoc()
    doc.items = [_FakeItem("1(d)"),
                 _FakeItem("4", section="SituationSpecific"),
                 _FakeItem("5", section="SituationSpecific")]
    return doc


def test_compose_cold_asks_before_grouping():
    records, sigs = _situation_records()
    model, requests = compose(_FakeDoc(), records, sigs, ComponentCatalog())
    targets = {r["target"] for r in requests}
    assert "group:E::plan" in targets
    byt = {r["target"]: r for r in requests}
    assert byt["group:E::plan"]["suggested"] == "accept"
    assert byt["group:E::plan"]["evidence"]["items"] == ["4", "5"]
    assert byt["group:E::plan"]["evidence"]["general"] == "1(d)"


def _compose_journal(entries):
    j = DecisionJournal()
    for target, choice in entries:
        j.append(Decision("composition:" + target, "composition", target,
                          choice, "t", ""))
    return j


def test_compose_accept_group_then_refines():
    records, sigs = _situation_records()
    j = _compose_journal([("group:E::plan", "accept")])
    model, requests = compose(_FakeDoc(), records, sigs, ComponentCatalog(), journal=j)
    targets = {r["target"] for r in requests}
    # the subsumed mains became cross-component and need refinement
    assert targets == {"refine:4/main", "refine:5/main"}
    byt = {r["target"]: r for r in requests}
    assert byt["refine:4/main"]["evidence"]["exchange"] == "P::avail -> E::?"
    assert byt["refine:4/main"]["evidence"]["process"] == \
        "E::energy, P::avail -> E::plan"


def test_compose_reject_refinement_without_child_blocks():
    records, sigs = _situation_records()
    j = _compose_journal([("group:E::plan", "accept"),
                          ("refine:4/main", "reject"),
                          ("refine:5/main", "accept")])
    with pytest.raises(UnresolvedProposal):
        compose(_FakeDoc(), records, sigs, ComponentCatalog(), journal=j)


def test_compose_manual_refinement_replacement():
    records, sigs = _situation_records()
    j = _compose_journal([
        ("group:E::plan", "accept"),
        ("refine:4/main", {"exchange": "P::avail -> E::avail",
                           "process": "E::energy, E::avail -> E::plan"}),
        ("refine:5/main", "accept"),
    ])
    model, requests = compose(_situation_doc(), records, sigs,
                              ComponentCatalog(), journal=j)
    assert requests == []
    exchange_sigs = sorted(i.signature for i in model.invariants
                           if i.rtype == "Exchange")
    # manual replacement for item 4, generated refinement for item 5
    assert exchange_sigs == ["P::avail -> E::?", "P::avail -> E::avail"]
    procs = {i.signature for i in model.invariants if i.rtype == "Process"}
    assert "E::avail, E::energy -> E::plan" in procs
    assert "E::energy, P::avail -> E::plan" in procs
    # a two-way OR of situation alternatives hangs off the synthesized root
    ors = [d for d in model.decompositions if d.mode == "OR"]
    assert len(ors) == 1 and len(ors[0].children) == 2


def test_compose_degenerate_situation_request():
    records, sigs = _situation_records()
    records = [r for r in records if r.item_id in {"4", "1(d)"}]
    model, requests = compose(_FakeDoc(), records, sigs, ComponentCatalog())
    byt = {r["target"]: r for r in requests}
    assert "situation:4" in byt
    req = byt["situation:4"]
    assert req["kind"] == "composition"
    assert req["suggested"] == "standalone"
    assert req["evidence"] == {"rule": "degenerate-or"}
    # a journaled answer silences it
    j = _compose_journal([("situation:4", "standalone")])
    _, again = compose(_FakeDoc(), records, sigs, ComponentCatalog(), journal=j)
    assert "situation:4" not in {r["target"] for r in again}


def test_compose_empty_inputs_yield_empty_model():
    model, requests = compose(_FakeDoc(), [], {}, ComponentCatalog())
    assert requests == []
    assert model.invariants == [] and model.decompositions == []
    check_model(model)
    text = serialize_model(model)
    assert model_as_dict(deserialize_model(text)) == model_as_dict(model)
