import os

import pytest

from irmtool.classify import (classify_requirements, detokenize,
                              extract_condition, extract_timing,
                              find_condition_clause, load_comparators,
                              load_seeds, main_verb_of)
from irmtool.document import parse_document, segment_document
from irmtool.entities import (AliasCluster, CatalogAttribute, CatalogComponent,
                              ComponentCatalog, build_catalog, cluster_aliases,
                              detect_appositions, extract_candidates,
                              hint_kinds)
from irmtool.journal import Decision, DecisionJournal
from irmtool.lexicon import load_synsets
from irmtool.shallow import shallow_parse

from conftest import GOLD, REQUIREMENTS


@pytest.fixture(scope="module")
def stack():
    with open(REQUIREMENTS, encoding="utf-8") as fh:
        doc = segment_document(fh.read())
    graphs = parse_document(doc)
    order = sorted(graphs, key=lambda s: int(s[1:]))
    journal = DecisionJournal.load(os.path.join(GOLD, "decisions.jsonl"))
    cands = hint_kinds(extract_candidates(graphs, order), graphs)
    clusters, _ = cluster_aliases(cands, detect_appositions(graphs, order),
                                  journal=journal)
    catalog = build_catalog(cands, clusters, journal)
    return doc, graphs, catalog, journal


@pytest.fixture(scope="module")
def records(stack):
    doc, graphs, catalog, journal = stack
    recs, requests = classify_requirements(doc, graphs, catalog, load_synsets(),
                                           journal=journal)
    assert requests == []
    return {r.key: r for r in recs}


def test_type_assignments(records):
    types = {k: r.rtype for k, r in records.items()}
    assert types["1"] == "Abstract"
    for key in ("1(a)", "1(b)", "1(c)", "1(d)", "2"):
        assert types[key] == "Process", key
    assert types["3"] == "Exchange"
    assert types["4/assumption"] == "Assumption"
    assert types["5/assumption"] == "Assumption"
    assert types["4/main"] == "Process"
    assert types["5/main"] == "Process"
    assert len(records) == 11


def test_situation_items_split_in_two(records):
    assert records["4/assumption"].role == "assumption"
    assert records["4/main"].role == "main"
    assert records["4/assumption"].item_id == "4"
    assert records["4/main"].item_id == "4"
    assert records["4/main"].text == \
        "it should update its plan at least once per 60 seconds"
    assert records["4/assumption"].text == \
        "When an e-car is more than 5 km far from the POI"


def test_timing_extraction_on_gold(records):
    assert records["4/main"].timing == {"max_period": 60, "unit": "second"}
    assert records["5/main"].timing == {"max_period": 10, "unit": "second"}
    for key in ("1(a)", "1(b)", "1(c)", "1(d)", "2", "3"):
        assert records[key].timing is None, key


def test_conditions_on_gold(records):
    assert records["4/assumption"].condition == {
        "subject": "distance(E-Car::position, E-Car::POI)",
        "comparator": ">", "value": 5, "unit": "km"}
    assert records["5/assumption"].condition == {
        "subject": "distance(E-Car::position, E-Car::POI)",
        "comparator": "<=", "value": 5, "unit": "km"}


def test_origins_and_verbs(records):
    assert records["1"].origin == "rule"
    assert records["3"].main_verb == "exchange"
    assert records["3"].origin == "affinity"
    # the situation mains were typed by explicit override entries
    assert records["4/main"].origin == "journal"
    assert records["5/main"].origin == "journal"
    assert records["1(a)"].main_verb == "monitor"
    assert records["1(d)"].main_verb == "have"


def test_measure_switch_keeps_exchange(stack):
    doc, graphs, catalog, journal = stack
    recs, _ = classify_requirements(doc, graphs, catalog, load_synsets(),
                                    measure="wup", journal=journal)
    by_key = {r.key: r for r in recs}
    assert by_key["3"].rtype == "Exchange"
    assert by_key["1(a)"].rtype == "Process"


@pytest.mark.parametrize("text,expected", [
    ("it should update its plan at least once per 60 seconds", 60),
    ("it should update its plan at least every 10 seconds", 10),
    ("refresh at least once every 2 minutes", 120),
    ("refresh at least every 1 minute", 60),
])
def test_extract_timing_values(text, expected):
    assert extract_timing(text) == {"max_period": expected, "unit": "second"}


def test_extract_timing_absent():
    assert extract_timing("monitor its energy level continuously") is None
    # a bare frequency without the obligation marker is not a deadline
    assert extract_timing("it blinks every 5 seconds") is None


def _battery_catalog():
    cat = ComponentCatalog()
    comp = CatalogComponent(
        name="E-Car", cluster=AliasCluster("e-car", ["e-car", "car"], [], "merged"))
    comp.attributes.append(CatalogAttribute(
        name="battery", ident="battery",
        cluster=AliasCluster("battery", ["battery"], [], "merged"), mentions=[]))
    cat.components.append(comp)
    return cat


def test_condition_zero_percent():
    g = shallow_parse("When the battery is at 0%, the e-car should update its plan.")
    verb, clause = find_condition_clause(g)
    cond = extract_condition(g, clause, _battery_catalog(), load_comparators())
    assert cond == {"subject": "E-Car::battery", "comparator": "=",
                    "value": 0, "unit": "%"}


def test_condition_comparator_table():
    cases = [
        ("When the battery is equal to or less than 30%, the e-car should update its plan.", "<=", 30, "%"),
        ("When the battery is equal to or greater than 70%, the e-car should update its plan.", ">=", 70, "%"),
        ("When the battery is less than 10%, the e-car should update its plan.", "<", 10, "%"),
        ("When the battery is more than 90%, the e-car should update its plan.", ">", 90, "%"),
    ]
    for text, comparator, value, unit in cases:
        g = shallow_parse(text)
        verb, clause = find_condition_clause(g)
        cond = extract_condition(g, clause, _battery_catalog(), load_comparators())
        assert cond["comparator"] == comparator, text
        assert cond["value"] == value
        assert cond["unit"] == unit
        assert cond["subject"] == "E-Car::battery"


def test_no_condition_clause_in_plain_sentence():
    g = shallow_parse("Every car needs to continuously monitor its position.")
    assert find_condition_clause(g) is None


def _tiny_doc(body):
    text = "T\n\nRequirements:\n1. %s\n" % body
    doc = segment_document(text)
    return doc, parse_document(doc)


def test_unknown_verb_requests_override():
    doc, graphs = _tiny_doc("The car has to cover the route.")
    recs, requests = classify_requirements(doc, graphs, ComponentCatalog(),
                                           load_synsets())
    assert len(requests) == 1
    req = requests[0]
    assert req["request_id"] == "type:1"
    assert req["kind"] == "type_override"
    assert req["suggested"] == "Process"
    assert req["evidence"]["exchange"] == 0.0
    assert req["evidence"]["process"] == 0.0
    # without a decision the record falls back to the suggestion target type
    assert recs[0].rtype == "Process"
    assert recs[0].confidence == 0.0


def test_override_settles_unknown_verb():
    doc, graphs = _tiny_doc("The car has to cover the route.")
    j = DecisionJournal()
    j.append(Decision(decision_id="type:1", kind="type_override", target="1",
                      choice="Exchange", author="t", timestamp=""))
    recs, requests = classify_requirements(doc, graphs, ComponentCatalog(),
                                           load_synsets(), journal=j)
    assert requests == []
    assert recs[0].rtype == "Exchange"
    assert recs[0].origin == "journal"


def test_override_beats_affinity():
    doc, graphs = _tiny_doc("The car has to monitor its data.")
    j = DecisionJournal()
    j.append(Decision(decision_id="type:1", kind="type_override", target="1",
                      choice="Exchange", author="t", timestamp=""))
    recs, _ = classify_requirements(doc, graphs, ComponentCatalog(),
                                    load_synsets(), journal=j)
    assert recs[0].rtype == "Exchange" and recs[0].origin == "journal"


def test_detokenize():
    assert detokenize(["a", "plan", ",", "ok", "."]) == "a plan, ok."
    assert detokenize(["it", "updates"]) == "it updates"


def test_main_verb_of_picks_content_verb():
    g = shallow_parse("Every car needs to continuously monitor its energy level (battery).")
    assert main_verb_of(g) == "monitor"
    g2 = shallow_parse("The information has to be exchanged with the e-cars.")
    assert main_verb_of(g2) == "exchange"


def test_seed_catalog_shape():
    seeds = load_seeds()
    assert set(seeds) == {"exchange", "process"}
    assert "exchange" in seeds["exchange"]
    assert "monitor" in seeds["process"]
    table = load_comparators()
    assert ["more than", ">"] in table
    assert ["at", "="] in table
    # no earlier phrase may shadow a longer later one
    for i, (phrase, _) in enumerate(table):
        for later, _ in table[i + 1:]:
            assert phrase not in later, (phrase, later)
