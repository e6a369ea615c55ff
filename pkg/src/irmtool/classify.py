"""Requirement classification into invariant types.

Three ordered rules:
  1. an item with sub-items is Abstract (confidence 1.0)
  2. a situation-specific item with a when/if/while clause splits into an
     Assumption (the clause, with extracted condition) and a recursively
     classified main part
  3. otherwise the main verb's taxonomy affinity to exchange seeds vs
     process seeds decides; ties and unknown verbs fall back to Process
     with confidence 0.0 and a pending type override request

A journal type_override supersedes rule 3 for its target.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from importlib import resources

from .document import effective_sentences
from .entities import ComponentCatalog, normalize_phrase
from .lexicon import SynsetGraph, verb_affinity
from .sentences import SentenceGraph

ABSTRACT = "Abstract"
PROCESS = "Process"
EXCHANGE = "Exchange"
ASSUMPTION = "Assumption"
INVARIANT_TYPES = (ABSTRACT, PROCESS, EXCHANGE, ASSUMPTION)

CONDITION_SUBORDINATORS = {"when", "if", "while"}

# matched longest-first against the condition clause
DEFAULT_COMPARATORS = [
    ["equal to or less than", "<="],
    ["equal to or greater than", ">="],
    ["greater than or equal to", ">="],
    ["less than or equal to", "<="],
    ["more than", ">"],
    ["greater than", ">"],
    ["less than", "<"],
    ["at most", "<="],
    ["at least", ">="],
    ["at", "="],
]

DEFAULT_SEEDS = {
    "exchange": ["exchange", "propagate"],
    "process": ["have", "monitor", "assess", "obtain", "acquire", "determine"],
}

_NUMBER_UNIT = re.compile(
    r"(\d+(?:\.\d+)?)\s*(km|kilometers?|kilometres?|meters?|metres?|seconds?|"
    r"minutes?|hours?|%|percent)?", re.IGNORECASE)
_TIMING = re.compile(
    r"at least (?:once per|once every|every)\s+(\d+)\s+(second|seconds|minute|minutes)",
    re.IGNORECASE)


def load_seeds(path: Optional[str] = None) -> Dict[str, List[str]]:
    if path is None:
        data = resources.files("irmtool").joinpath("data/seeds.json")
        return json.loads(data.read_text(encoding="utf-8"))
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def load_comparators(path: Optional[str] = None) -> List[List[str]]:
    if path is None:
        data = resources.files("irmtool").joinpath("data/comparators.json")
        return json.loads(data.read_text(encoding="utf-8"))
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


@dataclass
class ClassifiedRequirement:
    key: str                       # "1", "1(a)", "4/assumption", "4/main"
    item_id: str
    role: str                      # whole | assumption | main
    section: str
    text: str
    rtype: str
    confidence: float
    main_verb: str = ""
    condition: Optional[dict] = None
    timing: Optional[dict] = None
    origin: str = "rule"           # rule | affinity | journal
    sentence_ids: List[str] = field(default_factory=list)

    def as_dict(self):
        return {"key": self.key, "item_id": self.item_id, "role": self.role,
                "section": self.section, "text": self.text, "type": self.rtype,
                "confidence": round(self.confidence, 6), "main_verb": self.main_verb,
                "condition": self.condition, "timing": self.timing,
                "origin": self.origin, "sentence_ids": list(self.sentence_ids)}


def detokenize(words: List[str]) -> str:
    out = []
    for w in words:
        if w in {",", ".", ";", ":", ")", "%"} and out:
            out[-1] += w
        elif out and out[-1].endswith("("):
            out[-1] += w
        elif w == "(":
            out.append(w)
        else:
            out.append(w)
    return " ".join(out)


def _subtree(graph: SentenceGraph, head: int) -> List[int]:
    children: Dict[int, List[int]] = {}
    for e in graph.edges:
        children.setdefault(e.head, []).append(e.dependent)
    seen = []
    stack = [head]
    while stack:
        i = stack.pop()
        seen.append(i)
        stack.extend(children.get(i, []))
    return sorted(seen)


def find_condition_clause(graph: SentenceGraph) -> Optional[Tuple[int, List[int]]]:
    """Returns (clause verb, clause token indexes) for a when/if/while clause."""
    for e in graph.edges:
        if e.relation != "advcl":
            continue
        indexes = _subtree(graph, e.dependent)
        for i in indexes:
            for e2 in graph.edges:
                if e2.head == e.dependent and e2.relation == "mark" and \
                        graph.token(e2.dependent).lemma in CONDITION_SUBORDINATORS:
                    return e.dependent, indexes
    return None


def main_verb_of(graph: SentenceGraph, within: Optional[List[int]] = None) -> str:
    root = None
    for e in graph.edges:
        if e.relation == "root":
            root = e.dependent
    if root is None:
        return ""
    if within is not None and root not in within:
        for e in graph.edges:
            if e.dependent in within and e.head not in within and e.head != 0:
                root = e.dependent
                break
    lemma = graph.token(root).lemma
    if lemma in {"need", "have", "must", "shall", "should"}:
        for e in graph.edges:
            if e.head == root and e.relation == "xcomp":
                return graph.token(e.dependent).lemma
    return lemma


def extract_condition(graph: SentenceGraph, clause: List[int],
                      catalog: ComponentCatalog,
                      comparators: List[List[str]]) -> Optional[dict]:
    words = [graph.token(i).text for i in clause]
    text = detokenize(words)
    lowered = text.lower()
    comparator = None
    tail = lowered
    for phrase, symbol in sorted(comparators, key=lambda row: -len(row[0])):
        pos = lowered.find(phrase)
        if pos >= 0:
            comparator = symbol
            tail = lowered[pos + len(phrase):]
            break
    value = None
    unit = None
    if comparator is not None:
        m = _NUMBER_UNIT.search(tail)
        if m:
            value = float(m.group(1))
            if value.is_integer():
                value = int(value)
            unit = _canonical_unit(m.group(2))
    subject = _condition_subject(graph, clause, catalog)
    if comparator is None and subject is None:
        return None
    return {"subject": subject, "comparator": comparator, "value": value, "unit": unit}


def _canonical_unit(raw: Optional[str]) -> Optional[str]:
    if raw is None:
        return None
    u = raw.lower()
    if u in {"kilometer", "kilometers", "kilometre", "kilometres"}:
        return "km"
    if u in {"meters", "metres", "metre"}:
        return "meter"
    if u == "seconds":
        return "second"
    if u == "minutes":
        return "minute"
    if u == "percent":
        return "%"
    return u


def _condition_subject(graph: SentenceGraph, clause: List[int],
                       catalog: ComponentCatalog) -> Optional[str]:
    subj_idx = None
    verb = None
    for e in graph.edges:
        if e.dependent in clause and e.relation in {"nsubj", "nsubjpass"}:
            subj_idx = e.dependent
            verb = e.head
            break
    # "X far from Y" measures the distance between X's position and Y
    far = None
    for i in clause:
        if graph.token(i).lemma in {"far", "close", "closer"}:
            far = i
    if far is not None:
        target = _from_object(graph, clause, catalog)
        comp = _component_ref(graph, subj_idx, catalog) if subj_idx else None
        if comp is not None and target is not None:
            return "distance(%s::position, %s)" % (comp, target)
    if subj_idx is not None:
        ref = _attribute_ref(graph, subj_idx, catalog)
        if ref is not None:
            return ref
        comp = _component_ref(graph, subj_idx, catalog)
        if comp is not None:
            return comp
        return normalize_phrase(graph, subj_idx) or None
    return None


def _from_object(graph: SentenceGraph, clause: List[int],
                 catalog: ComponentCatalog) -> Optional[str]:
    for e in graph.edges:
        if e.dependent in clause and e.relation == "prep" and \
                graph.token(e.dependent).lemma == "from":
            for e2 in graph.edges:
                if e2.head == e.dependent and e2.relation == "pobj":
                    return _attribute_ref(graph, e2.dependent, catalog)
    return None


def _attribute_ref(graph, index, catalog) -> Optional[str]:
    phrase = normalize_phrase(graph, index)
    found = catalog.attribute_of_phrase(phrase)
    if found is None:
        return None
    comp, attr = found
    return "%s::%s" % (comp.name, attr.ident)


def _component_ref(graph, index, catalog) -> Optional[str]:
    phrase = normalize_phrase(graph, index)
    comp = catalog.component_of_phrase(phrase)
    return comp.name if comp is not None else None


def extract_timing(text: str) -> Optional[dict]:
    m = _TIMING.search(text)
    if m is None:
        return None
    value = int(m.group(1))
    unit = m.group(2).lower()
    if unit.startswith("minute"):
        value *= 60
    return {"max_period": value, "unit": "second"}


def _affinity_type(verb: str, synsets: SynsetGraph, seeds: Dict[str, List[str]],
                   measure: str) -> Tuple[str, float, dict]:
    e = verb_affinity(synsets, verb, seeds["exchange"], measure)
    p = verb_affinity(synsets, verb, seeds["process"], measure)
    evidence = {"verb": verb, "exchange": round(e, 6), "process": round(p, 6)}
    if e == p:
        return PROCESS, 0.0, evidence
    winner = EXCHANGE if e > p else PROCESS
    confidence = abs(e - p) / max(e, p)
    return winner, confidence, evidence


def classify_requirements(doc, graphs: Dict[str, SentenceGraph],
                          catalog: ComponentCatalog,
                          synsets: SynsetGraph,
                          seeds: Optional[Dict[str, List[str]]] = None,
                          comparators: Optional[List[List[str]]] = None,
                          measure: str = "path",
                          journal=None):
    """Returns (records, decision requests)."""
    seeds = seeds or load_seeds()
    comparators = comparators or load_comparators()
    overrides = journal.type_overrides() if journal is not None else {}
    records: List[ClassifiedRequirement] = []
    requests: List[dict] = []

    effective = effective_sentences(doc)
    sentences = {s.sentence_id: s for s in effective}
    by_item: Dict[str, List[str]] = {}
    for s in effective:
        if s.item_id is not None:
            by_item.setdefault(s.item_id, []).append(s.sentence_id)

    for item in doc.items:
        sids = by_item.get(item.item_id, [])
        text = " ".join(sentences[sid].text for sid in sids)
        children = doc.children_of(item.item_id)
        if children:
            records.append(ClassifiedRequirement(
                key=item.item_id, item_id=item.item_id, role="whole",
                section=item.section, text=text, rtype=ABSTRACT,
                confidence=1.0, origin="rule",
                main_verb=main_verb_of(graphs[sids[0]]) if sids and sids[0] in graphs else "",
                sentence_ids=sids))
            continue
        if not sids or sids[0] not in graphs:
            continue
        graph = graphs[sids[0]]
        clause = find_condition_clause(graph)
        if item.section == "SituationSpecific" and clause is not None:
            verb, indexes = clause
            cond = extract_condition(graph, indexes, catalog, comparators)
            clause_words = [graph.token(i).text for i in indexes]
            main_words = [graph.token(i).text
                          for i in range(1, len(graph.tokens) + 1)
                          if i not in indexes and graph.token(i).pos != "." and
                          graph.token(i).text != ","]
            records.append(ClassifiedRequirement(
                key=item.item_id + "/assumption", item_id=item.item_id,
                role="assumption", section=item.section,
                text=detokenize(clause_words), rtype=ASSUMPTION, confidence=1.0,
                main_verb=graph.token(verb).lemma, condition=cond,
                origin="rule", sentence_ids=sids))
            main_text = detokenize(main_words)
            rec, req = _classify_leaf(
                item.item_id + "/main", item, main_text, graph, synsets,
                seeds, measure, overrides, within=[
                    i for i in range(1, len(graph.tokens) + 1) if i not in indexes])
            rec.timing = extract_timing(main_text)
            records.append(rec)
            if req is not None:
                requests.append(req)
            continue
        rec, req = _classify_leaf(item.item_id, item, text, graph, synsets,
                                  seeds, measure, overrides)
        rec.timing = extract_timing(text)
        records.append(rec)
        if req is not None:
            requests.append(req)

    records.sort(key=lambda r: r.key)
    return records, requests


def _classify_leaf(key, item, text, graph, synsets, seeds, measure, overrides,
                   within=None):
    verb = main_verb_of(graph, within)
    rtype, confidence, evidence = _affinity_type(verb, synsets, seeds, measure)
    request = None
    if confidence == 0.0:
        if key in overrides:
            rtype = overrides[key]
            origin = "journal"
        else:
            origin = "affinity"
            request = {"request_id": "type:" + key, "kind": "type_override",
                       "target": key, "suggested": PROCESS, "evidence": evidence}
    else:
        origin = "affinity"
        if key in overrides:
            rtype = overrides[key]
            origin = "journal"
    rec = ClassifiedRequirement(
        key=key, item_id=item.item_id,
        role="main" if key.endswith("/main") else "whole",
        section=item.section, text=text, rtype=rtype, confidence=confidence,
        main_verb=verb, origin=origin,
        sentence_ids=[graph.sentence_id] if hasattr(graph, "sentence_id") else [])
    return rec, request
