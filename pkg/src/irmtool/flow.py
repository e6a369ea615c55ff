"""Knowledge flow: signature parameters and in/out direction inference.

Direction rules, applied in order:
  S0  assumption invariants carry inputs only
  S3  journal entries fix directions and may add designer parameters
  S1  a single-parameter Process signature outputs its parameter, unless
      that attribute is already produced elsewhere (conflict -> request)
  S2  an attribute produced somewhere is provisionally an input wherever
      else it appears (request for confirmation)
Anything still undecided, and any non-assumption signature left with no
output, raises a decision request instead of guessing.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from .classify import (ASSUMPTION, PROCESS, ClassifiedRequirement,
                       find_condition_clause)
from .entities import ComponentCatalog, normalize_phrase, ROLE_RELATIONS, NOUN_TAGS
from .sentences import SentenceGraph

_REF = re.compile(r"([A-Za-z][\w-]*(?: [\w-]+)*)::([\w?-]+)")


@dataclass
class FlowParameter:
    component: str
    attribute: str                 # identifier, "?" for placeholders
    direction: Optional[str] = None
    origin: str = "mention"        # mention | condition | journal
    provisional: bool = False

    @property
    def ref(self) -> str:
        return "%s::%s" % (self.component, self.attribute)

    def as_dict(self):
        return {"component": self.component, "attribute": self.attribute,
                "direction": self.direction, "origin": self.origin,
                "provisional": self.provisional}


@dataclass
class FlowSignature:
    key: str
    rtype: str
    params: List[FlowParameter] = field(default_factory=list)

    def ins(self) -> List[FlowParameter]:
        return _ordered(p for p in self.params if p.direction == "in")

    def outs(self) -> List[FlowParameter]:
        return _ordered(p for p in self.params if p.direction == "out")

    def find(self, ref: str) -> Optional[FlowParameter]:
        for p in self.params:
            if p.ref == ref:
                return p
        return None

    @property
    def finalized(self) -> bool:
        if any(p.direction is None for p in self.params):
            return False
        if self.rtype == ASSUMPTION:
            return True
        return any(p.direction == "out" for p in self.params)

    def components(self) -> List[str]:
        seen = []
        for p in self.params:
            if p.component not in seen:
                seen.append(p.component)
        return seen

    def as_dict(self):
        return {"key": self.key, "type": self.rtype,
                "signature": format_signature(self),
                "params": [p.as_dict() for p in self.params]}


def _ordered(params) -> List[FlowParameter]:
    return sorted(params, key=lambda p: (p.component.lower(), p.attribute.lower()))


def format_signature(sig: FlowSignature) -> str:
    ins = ", ".join(p.ref for p in sig.ins())
    outs = ", ".join(p.ref for p in sig.outs())
    return (ins + " -> " + outs).strip()


def parse_signature(text: str, key: str = "", rtype: str = PROCESS) -> FlowSignature:
    if "->" not in text:
        raise ValueError("signature needs '->': %r" % text)
    left, _, right = text.partition("->")
    params = []
    for side, chunk in (("in", left), ("out", right)):
        for piece in chunk.split(","):
            piece = piece.strip()
            if not piece:
                continue
            comp, sep, attr = piece.rpartition("::")
            if not sep or not comp or not re.fullmatch(r"[\w?-]+", attr):
                raise ValueError("bad parameter %r in %r" % (piece, text))
            params.append(FlowParameter(comp, attr, side))
    return FlowSignature(key=key, rtype=rtype, params=params)


# ---------------------------------------------------------------------------
# parameter collection

def collect_params(record: ClassifiedRequirement,
                   graph: SentenceGraph,
                   catalog: ComponentCatalog) -> List[Tuple[str, str]]:
    """Catalog attributes mentioned by the record, in mention order."""
    allowed = None
    if record.role in {"assumption", "main"}:
        clause = find_condition_clause(graph)
        indexes = clause[1] if clause else []
        if record.role == "assumption":
            allowed = set(indexes)
        else:
            allowed = set(range(1, len(graph.tokens) + 1)) - set(indexes)
    refs: List[Tuple[str, str]] = []
    for e in sorted(graph.edges, key=lambda e: e.dependent):
        if e.relation not in ROLE_RELATIONS:
            continue
        if allowed is not None and e.dependent not in allowed:
            continue
        tok = graph.token(e.dependent)
        if tok.pos not in NOUN_TAGS:
            continue
        found = catalog.attribute_of_phrase(normalize_phrase(graph, e.dependent))
        if found is None:
            continue
        comp, attr = found
        ref = (comp.name, attr.ident)
        if ref not in refs:
            refs.append(ref)
    if record.condition and record.condition.get("subject"):
        for m in _REF.finditer(record.condition["subject"]):
            comp_name, ident = m.group(1), m.group(2)
            if catalog.attribute(comp_name, ident) is not None and \
                    (comp_name, ident) not in refs:
                refs.append((comp_name, ident))
    return refs


def build_signatures(records: Sequence[ClassifiedRequirement],
                     graphs: Dict[str, SentenceGraph],
                     catalog: ComponentCatalog) -> Dict[str, FlowSignature]:
    sigs: Dict[str, FlowSignature] = {}
    for rec in records:
        if not rec.sentence_ids or rec.sentence_ids[0] not in graphs:
            continue
        graph = graphs[rec.sentence_ids[0]]
        params = [FlowParameter(c, a) for c, a in collect_params(rec, graph, catalog)]
        if rec.condition:
            for p in params:
                subject = rec.condition.get("subject") or ""
                if p.ref in subject and not _mentioned(rec, graph, catalog, p):
                    p.origin = "condition"
        sigs[rec.key] = FlowSignature(key=rec.key, rtype=rec.rtype, params=params)
    return sigs


def _mentioned(rec, graph, catalog, param) -> bool:
    for e in graph.edges:
        if e.relation in ROLE_RELATIONS and graph.token(e.dependent).pos in NOUN_TAGS:
            found = catalog.attribute_of_phrase(normalize_phrase(graph, e.dependent))
            if found and (found[0].name, found[1].ident) == (param.component, param.attribute):
                return True
    return False


# ---------------------------------------------------------------------------
# direction inference

def infer_directions(sigs: Dict[str, FlowSignature], journal=None):
    """Mutates signatures in place; returns (sigs, decision requests)."""
    requests: Dict[str, dict] = {}
    decided = journal.direction_decisions() if journal is not None else {}

    # S0: assumptions only consume
    for key in sorted(sigs):
        sig = sigs[key]
        if sig.rtype == ASSUMPTION:
            for p in sig.params:
                p.direction = "in"

    # S3: journal overrides and designer additions
    for key in sorted(sigs):
        sig = sigs[key]
        extra = decided.get(key + ":+")
        if extra is not None:
            for item in extra if isinstance(extra, list) else [extra]:
                comp, _, attr = item["param"].partition("::")
                sig.params.append(FlowParameter(comp, attr, item["direction"],
                                                origin="journal"))
        for p in sig.params:
            choice = decided.get("%s:%s" % (key, p.ref))
            if choice in {"in", "out"}:
                p.direction = choice
                p.origin = "journal"
                p.provisional = False

    def producers_of(ref: str, own_key: str) -> List[str]:
        found = []
        for other_key, other in sigs.items():
            if other_key == own_key:
                continue
            for p in other.params:
                if p.ref == ref and p.direction == "out" and p.attribute != "?":
                    found.append(other_key)
        return found

    def produced_elsewhere(ref: str, own_key: str) -> bool:
        return bool(producers_of(ref, own_key))

    def request(target: str, suggested, evidence: dict):
        if target in requests or _journaled(decided, target):
            return
        requests[target] = {"request_id": "direction:" + target,
                            "kind": "direction", "target": target,
                            "suggested": suggested, "evidence": evidence}

    changed = True
    while changed:
        changed = False
        # S1
        for key in sorted(sigs):
            sig = sigs[key]
            if sig.rtype != PROCESS or len(sig.params) != 1:
                continue
            p = sig.params[0]
            if p.direction is not None:
                continue
            holders = producers_of(p.ref, key)
            if holders:
                # rival situation alternatives each maintain the attribute;
                # anything else reads the existing producer
                rivals = key.endswith("/main") and \
                    all(h.endswith("/main") for h in holders)
                request("%s:%s" % (key, p.ref), "out" if rivals else "in",
                        {"rule": "S1-conflict", "ref": p.ref,
                         "producers": sorted(holders)})
            else:
                p.direction = "out"
                changed = True
        # S2
        for key in sorted(sigs):
            sig = sigs[key]
            for p in sig.params:
                if p.direction is None and produced_elsewhere(p.ref, key):
                    p.direction = "in"
                    p.provisional = True
                    changed = True
                    request("%s:%s" % (key, p.ref), "in",
                            {"rule": "S2", "ref": p.ref})

    # leftovers: no rule applies; the first requirement mentioning an
    # unproduced attribute is suggested as its producer, later ones read it
    suggested_out = set()
    for key in sorted(sigs):
        sig = sigs[key]
        for p in sig.params:
            if p.direction is None:
                first = p.ref not in suggested_out and not produced_elsewhere(p.ref, key)
                if first:
                    suggested_out.add(p.ref)
                request("%s:%s" % (key, p.ref), "out" if first else "in",
                        {"rule": "undecided", "ref": p.ref})
        open_params = any(p.direction is None or
                          "%s:%s" % (key, p.ref) in requests
                          for p in sig.params)
        if sig.rtype != ASSUMPTION and sig.params and not open_params and \
                not any(p.direction == "out" for p in sig.params):
            comp = sig.components()[0] if sig.components() else "?"
            request(key + ":+", {"param": comp + "::?", "direction": "out"},
                    {"rule": "no-output"})
    return sigs, [requests[t] for t in sorted(requests)]


def _journaled(decided: Dict[str, object], target: str) -> bool:
    return target in decided


def needs_exchange(sig: FlowSignature) -> bool:
    """True when the signature's parameters span more than one component."""
    return len(set(p.component for p in sig.params)) >= 2
