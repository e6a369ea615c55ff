"""Invariant model assembly.

Builds the decomposition tree from classified requirements and inferred
signatures:
  - situation pairs with a common output set group under a synthesized
    OR parent; a general requirement with the same output set is
    subsumed into each alternative (its inputs merge in, its trace
    carries over)
  - signatures whose parameters span two components get a refinement
    proposal: an Exchange invariant moving the foreign inputs to the
    computing component plus a Process invariant computing the outputs;
    an accepted proposal replaces the refined node
  - an extracted Exchange invariant whose signature equals a proposed
    one links into the proposals instead of standing alone

The finished model serializes to canonical JSON: sorted keys, two-space
indent, LF line endings, trailing newline.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from .classify import ABSTRACT, ASSUMPTION, EXCHANGE, PROCESS, ClassifiedRequirement
from .entities import ComponentCatalog
from .errors import (DanglingInvariant, NoOutputOwner, SchemaViolation,
                     UnresolvedProposal)
from .flow import (FlowParameter, FlowSignature, format_signature,
                   needs_exchange, parse_signature)

SCHEMA_VERSION = 1


@dataclass
class Invariant:
    node_id: int
    rtype: str
    text: str
    signature: str = ""
    condition: Optional[dict] = None
    timing: Optional[dict] = None
    traces: List[str] = field(default_factory=list)
    origin: str = "extracted"      # extracted | proposed | synthesized
    system_output: bool = False

    def as_dict(self):
        return {"id": self.node_id, "type": self.rtype, "text": self.text,
                "signature": self.signature, "condition": self.condition,
                "timing": self.timing, "traces": list(self.traces),
                "origin": self.origin, "system_output": self.system_output}


@dataclass
class Decomposition:
    parent: int
    mode: str                      # AND | OR
    children: List[int]

    def as_dict(self):
        return {"parent": self.parent, "mode": self.mode,
                "children": list(self.children)}


@dataclass
class IrmModel:
    components: List[dict] = field(default_factory=list)
    invariants: List[Invariant] = field(default_factory=list)
    decompositions: List[Decomposition] = field(default_factory=list)
    journal_ref: Optional[dict] = None

    def invariant(self, node_id: int) -> Invariant:
        for inv in self.invariants:
            if inv.node_id == node_id:
                return inv
        raise KeyError(node_id)

    def roots(self) -> List[int]:
        children = {c for d in self.decompositions for c in d.children}
        return [inv.node_id for inv in self.invariants if inv.node_id not in children]

    def traces_by_item(self) -> Dict[str, List[int]]:
        out: Dict[str, List[int]] = {}
        for inv in self.invariants:
            for item in inv.traces:
                out.setdefault(item, []).append(inv.node_id)
        return {k: sorted(v) for k, v in sorted(out.items())}


# ---------------------------------------------------------------------------
# proposals

def propose_refinement(sig: FlowSignature) -> dict:
    """Split a cross-component signature into Exchange + local Process."""
    out_components = sorted({p.component for p in sig.outs() if p.attribute != "?"})
    if not out_components:
        out_components = sorted({p.component for p in sig.outs()})
    if len(out_components) != 1:
        raise NoOutputOwner(sig.key)
    computing = out_components[0]
    foreign = [p for p in sig.ins() if p.component != computing]
    exchange_sig = FlowSignature(key=sig.key + "/exchange", rtype=EXCHANGE, params=(
        [FlowParameter(p.component, p.attribute, "in", origin=p.origin) for p in foreign]
        + [FlowParameter(computing, "?", "out", origin="journal")]))
    process_sig = FlowSignature(key=sig.key + "/process", rtype=PROCESS,
                                params=[FlowParameter(p.component, p.attribute,
                                                      p.direction, origin=p.origin)
                                        for p in sig.params])
    return {"target": sig.key, "computing": computing,
            "exchange": exchange_sig, "process": process_sig}


# ---------------------------------------------------------------------------
# situation grouping

def group_situations(records: Sequence[ClassifiedRequirement],
                     sigs: Dict[str, FlowSignature]):
    """Pairs situation-specific (assumption, main) records sharing one
    output set, and nominates a general requirement for subsumption."""
    pairs: Dict[str, Dict[str, str]] = {}
    for rec in records:
        if rec.role in {"assumption", "main"}:
            pairs.setdefault(rec.item_id, {})[rec.role] = rec.key
    groups: Dict[Tuple[str, ...], List[str]] = {}
    for item_id in sorted(pairs):
        if "main" not in pairs[item_id] or pairs[item_id]["main"] not in sigs:
            continue
        outs = tuple(p.ref for p in sigs[pairs[item_id]["main"]].outs())
        if outs:
            groups.setdefault(outs, []).append(item_id)
    result = []
    for outs in sorted(groups):
        items = groups[outs]
        if len(items) < 2:
            continue
        general = None
        for rec in records:
            if rec.role != "whole" or rec.section == "SituationSpecific":
                continue
            sig = sigs.get(rec.key)
            if sig is None or rec.rtype == ABSTRACT:
                continue
            if tuple(p.ref for p in sig.outs()) == outs:
                general = rec.key
                break
        result.append({"outs": list(outs), "items": items, "general": general,
                       "pairs": {i: pairs[i] for i in items}})
    return result


def merge_signatures(base: FlowSignature, general: FlowSignature) -> FlowSignature:
    params = [FlowParameter(p.component, p.attribute, p.direction, p.origin,
                            p.provisional) for p in base.params]
    merged = FlowSignature(key=base.key, rtype=base.rtype, params=params)
    for p in general.params:
        if merged.find(p.ref) is None and not (p.direction == "in" and
                                               _is_own_out(merged, p.ref)):
            merged.params.append(FlowParameter(p.component, p.attribute,
                                               p.direction, p.origin))
    return merged


def _is_own_out(sig: FlowSignature, ref: str) -> bool:
    return any(p.ref == ref and p.direction == "out" for p in sig.params)


# ---------------------------------------------------------------------------
# composition

def compose(doc, records: Sequence[ClassifiedRequirement],
            sigs: Dict[str, FlowSignature],
            catalog: ComponentCatalog,
            journal=None,
            journal_ref: Optional[dict] = None):
    """Returns (model or None, decision requests)."""
    decided = journal.composition_decisions() if journal is not None else {}
    requests: List[dict] = []
    by_key = {r.key: r for r in records}

    groups = group_situations(records, sigs)
    accepted_groups = []
    for group in groups:
        target = "group:" + "+".join(group["outs"])
        choice = decided.get(target)
        if choice is None:
            requests.append({"request_id": "composition:" + target,
                             "kind": "composition", "target": target,
                             "suggested": "accept",
                             "evidence": {"items": group["items"],
                                          "general": group["general"]}})
        elif choice == "accept" or choice == {"accept": True}:
            accepted_groups.append(group)

    # a lone situation cannot form an OR; the designer decides what to do
    situation_items = {r.item_id for r in records if r.role == "main"}
    grouped_items_all = {i for g in groups for i in g["items"]}
    for item_id in sorted(situation_items - grouped_items_all):
        target = "situation:" + item_id
        if decided.get(target) is None:
            requests.append({"request_id": "composition:" + target,
                             "kind": "composition", "target": target,
                             "suggested": "standalone",
                             "evidence": {"rule": "degenerate-or"}})

    # effective signatures after subsumption
    effective: Dict[str, FlowSignature] = dict(sigs)
    subsumed: Dict[str, List[str]] = {}
    for group in accepted_groups:
        if group["general"] is None:
            continue
        general_sig = sigs[group["general"]]
        for item_id in group["items"]:
            main_key = group["pairs"][item_id]["main"]
            effective[main_key] = merge_signatures(sigs[main_key], general_sig)
            subsumed.setdefault(group["general"], []).append(main_key)

    # refinement proposals for cross-component process invariants
    proposals: Dict[str, dict] = {}
    for key in sorted(effective):
        rec = by_key.get(key)
        sig = effective[key]
        if rec is None or key in subsumed:
            continue
        if rec.rtype == ASSUMPTION or sig.rtype == ASSUMPTION:
            continue
        if not needs_exchange(sig):
            continue
        rtype = journal.type_overrides().get(key, rec.rtype) if journal else rec.rtype
        if rtype == EXCHANGE:
            continue
        if not sig.outs():
            # direction inference has not settled an output yet; the flow
            # stage holds an open request for this signature
            continue
        proposal = propose_refinement(sig)
        target = "refine:" + key
        choice = decided.get(target)
        if choice is None:
            requests.append({"request_id": "composition:" + target,
                             "kind": "composition", "target": target,
                             "suggested": "accept",
                             "evidence": {
                                 "exchange": format_signature(proposal["exchange"]),
                                 "process": format_signature(proposal["process"])}})
        elif choice == "accept":
            proposals[key] = proposal
        elif isinstance(choice, dict) and "exchange" in choice and "process" in choice:
            # designer-supplied replacement for the generated refinement
            ex_sig = parse_signature(choice["exchange"])
            proc_sig = parse_signature(choice["process"])
            comps = [p.component for p in proc_sig.outs()] or ["?"]
            proposals[key] = {"exchange": ex_sig, "process": proc_sig,
                              "computing": comps[0]}
        else:
            # a cross-component process cannot stand unrefined
            raise UnresolvedProposal(
                "refinement for %s rejected without a manual child" % key)

    # extracted exchanges matching a proposed one fold into the proposals
    links: Dict[str, List[str]] = {}
    for rec in records:
        if rec.rtype != EXCHANGE or rec.key not in effective or rec.key in proposals:
            continue
        sig_text = format_signature(effective[rec.key])
        matching = [k for k in sorted(proposals)
                    if format_signature(proposals[k]["exchange"]) == sig_text]
        if not matching:
            continue
        target = "link:" + rec.key
        choice = decided.get(target)
        if choice is None:
            requests.append({"request_id": "composition:" + target,
                             "kind": "composition", "target": target,
                             "suggested": "accept",
                             "evidence": {"into": ["refine:" + k for k in matching]}})
        elif choice == "accept":
            links[rec.key] = matching

    model = assemble(doc, records, effective, catalog,
                     accepted_groups, subsumed, proposals, links, journal_ref)
    return model, requests


def assemble(doc, records, sigs, catalog, groups, subsumed, proposals, links,
             journal_ref=None) -> IrmModel:
    by_key = {r.key: r for r in records}
    model = IrmModel(components=catalog_as_dicts(catalog), journal_ref=journal_ref)
    counter = {"next": 1}
    linked_items = {key for key in links}
    grouped_items = {i for g in groups for i in g["items"]}
    group_for_general = {g["general"]: g for g in groups if g["general"]}

    def new_node(**kw) -> Invariant:
        inv = Invariant(node_id=counter["next"], **kw)
        counter["next"] += 1
        model.invariants.append(inv)
        return inv

    def leaf_node(key: str) -> int:
        rec = by_key[key]
        sig = sigs.get(key)
        inv = new_node(rtype=rec.rtype, text=rec.text,
                       signature=format_signature(sig) if sig else "",
                       condition=rec.condition, timing=rec.timing,
                       traces=sorted({rec.item_id}))
        return inv.node_id

    def refined_nodes(key: str) -> List[int]:
        rec = by_key[key]
        proposal = proposals[key]
        ex_sig, proc_sig = proposal["exchange"], proposal["process"]
        traces = sorted({rec.item_id} | set(_merged_items(key)))
        ex_traces = sorted(links_for(key))
        foreign = ", ".join(p.ref for p in ex_sig.ins())
        exchange = new_node(
            rtype=EXCHANGE,
            text="%s is propagated to %s" % (foreign, proposal["computing"]),
            signature=format_signature(ex_sig), traces=ex_traces,
            origin="proposed")
        outs = ", ".join(p.ref for p in proc_sig.outs())
        ins = ", ".join(p.ref for p in proc_sig.ins())
        text = "%s is computed from %s" % (outs, ins)
        if rec.timing:
            text += " at least once per %d seconds" % rec.timing["max_period"]
        process = new_node(rtype=PROCESS, text=text,
                           signature=format_signature(proc_sig),
                           timing=rec.timing, traces=traces, origin="proposed")
        return [exchange.node_id, process.node_id]

    def _merged_items(main_key: str) -> List[str]:
        out = []
        for general, mains in subsumed.items():
            if main_key in mains:
                out.append(by_key[general].item_id)
        return out

    def links_for(main_key: str) -> List[str]:
        out = []
        for ex_key, targets in links.items():
            if main_key in targets:
                out.append(by_key[ex_key].item_id)
        return out

    def situation_nodes(item_id: str, pairs: Dict[str, str]) -> int:
        rec_a = by_key.get(pairs.get("assumption"))
        rec_m = by_key.get(pairs.get("main"))
        alt_text = _condition_text(rec_a) if rec_a else (rec_m.text if rec_m else item_id)
        alt = new_node(rtype=ABSTRACT, text=alt_text, origin="synthesized")
        children = []
        if rec_a is not None:
            children.append(leaf_node(rec_a.key))
        if rec_m is not None:
            if rec_m.key in proposals:
                children.extend(refined_nodes(rec_m.key))
            else:
                children.append(leaf_node(rec_m.key))
        model.decompositions.append(Decomposition(alt.node_id, "AND", children))
        return alt.node_id

    def group_node(group) -> int:
        outs = ", ".join(group["outs"])
        parent = new_node(rtype=ABSTRACT,
                          text="Alternative: %s maintained" % outs,
                          origin="synthesized")
        alts = []
        for item_id in group["items"]:
            alts.append(situation_nodes(item_id, group["pairs"][item_id]))
        model.decompositions.append(Decomposition(parent.node_id, "OR", alts))
        return parent.node_id

    def item_node(item_id: str) -> Optional[int]:
        children_items = [c.item_id for c in doc.children_of(item_id)]
        rec = by_key.get(item_id)
        if children_items:
            inv = new_node(rtype=rec.rtype if rec else ABSTRACT,
                           text=rec.text if rec else item_id,
                           signature=format_signature(sigs[item_id]) if item_id in sigs else "",
                           condition=rec.condition if rec else None,
                           timing=rec.timing if rec else None,
                           traces=[item_id])
            child_ids = []
            for child in children_items:
                node = child_item(child)
                if node is not None:
                    child_ids.append(node)
            model.decompositions.append(Decomposition(inv.node_id, "AND", child_ids))
            return inv.node_id
        return child_item(item_id)

    def child_item(item_id: str) -> Optional[int]:
        rec = by_key.get(item_id)
        if rec is not None and rec.key in linked_items:
            return None
        if rec is not None and rec.key in subsumed:
            group = group_for_general.get(rec.key)
            if group is not None:
                return group_node(group)
            return None
        if item_id in grouped_items:
            return None            # emitted by its group under the general's slot
        if rec is not None:
            return leaf_node(rec.key)
        pairs = {r.role: r.key for r in records
                 if r.item_id == item_id and r.role in {"assumption", "main"}}
        if pairs:
            return situation_nodes(item_id, pairs)
        return None

    emitted_groups = set()
    for item in doc.items:
        if item.parent_id is not None:
            continue
        node = item_node(item.item_id)
        # groups whose general requirement sits under no outline parent
        # would dangle; they surface as roots instead
        if node is None and item.item_id in grouped_items:
            for g in groups:
                gid = id(g)
                if item.item_id in g["items"] and g["general"] is None and \
                        gid not in emitted_groups:
                    emitted_groups.add(gid)
                    group_node(g)

    _mark_system_output(model, doc)
    check_model(model)
    return model


def _condition_text(rec: ClassifiedRequirement) -> str:
    cond = rec.condition or {}
    if cond.get("subject") and cond.get("comparator"):
        value = cond.get("value")
        unit = cond.get("unit") or ""
        return ("When %s %s %s %s" % (cond["subject"], cond["comparator"],
                                      value, unit)).strip()
    return rec.text


def _mark_system_output(model: IrmModel, doc):
    """The first outline root is the mission goal; its outputs face the
    outside world and are exempt from unused-output checks."""
    top = [i.item_id for i in doc.items if i.parent_id is None]
    if not top:
        return
    for inv in model.invariants:
        if top[0] in inv.traces:
            inv.system_output = True
            return


def catalog_as_dicts(catalog: ComponentCatalog) -> List[dict]:
    out = []
    for comp in catalog.components:
        out.append({
            "name": comp.name,
            "canonical": comp.cluster.canonical,
            "aliases": sorted(comp.cluster.members),
            "attributes": [{
                "name": a.name, "ident": a.ident,
                "aliases": sorted(a.cluster.members),
                "mentions": [m.as_dict() for m in a.mentions],
            } for a in comp.attributes],
        })
    return out


# ---------------------------------------------------------------------------
# integrity + serialization

def check_model(model: IrmModel):
    ids = [inv.node_id for inv in model.invariants]
    if len(ids) != len(set(ids)):
        raise SchemaViolation("duplicate invariant ids")
    known = set(ids)
    seen_child: Dict[int, int] = {}
    for d in model.decompositions:
        if d.parent not in known:
            raise SchemaViolation("decomposition parent %d unknown" % d.parent)
        if d.mode not in {"AND", "OR"}:
            raise SchemaViolation("bad decomposition mode %r" % d.mode)
        for c in d.children:
            if c not in known:
                raise SchemaViolation("decomposition child %d unknown" % c)
            if c in seen_child:
                raise DanglingInvariant(
                    "invariant %d appears under two parents" % c)
            seen_child[c] = d.parent
    roots = set(model.roots())
    reachable = set(roots)
    frontier = list(roots)
    children_of = {d.parent: d.children for d in model.decompositions}
    while frontier:
        node = frontier.pop()
        for c in children_of.get(node, []):
            if c not in reachable:
                reachable.add(c)
                frontier.append(c)
    for inv in model.invariants:
        if inv.node_id not in reachable:
            raise DanglingInvariant("invariant %d unreachable" % inv.node_id)
        if inv.rtype == ABSTRACT:
            continue
        if inv.node_id in children_of and children_of[inv.node_id]:
            raise SchemaViolation(
                "non-abstract invariant %d has children" % inv.node_id)


def model_as_dict(model: IrmModel) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "components": model.components,
        "invariants": [inv.as_dict() for inv in model.invariants],
        "decompositions": [d.as_dict() for d in model.decompositions],
        "traces": model.traces_by_item(),
        "journal_ref": model.journal_ref,
    }


def serialize_model(model: IrmModel) -> str:
    check_model(model)
    return canonical_json(model_as_dict(model))


def canonical_json(data) -> str:
    return json.dumps(data, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def deserialize_model(text: str) -> IrmModel:
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaViolation("not valid JSON: %s" % exc)
    if not isinstance(raw, dict):
        raise SchemaViolation("model document must be an object")
    if raw.get("schema_version") != SCHEMA_VERSION:
        raise SchemaViolation("unsupported schema_version %r" % raw.get("schema_version"))
    for field_name in ("components", "invariants", "decompositions"):
        if not isinstance(raw.get(field_name), list):
            raise SchemaViolation("missing list field %r" % field_name)
    model = IrmModel(components=raw["components"], journal_ref=raw.get("journal_ref"))
    for item in raw["invariants"]:
        try:
            model.invariants.append(Invariant(
                node_id=item["id"], rtype=item["type"], text=item["text"],
                signature=item.get("signature", ""),
                condition=item.get("condition"), timing=item.get("timing"),
                traces=list(item.get("traces", [])),
                origin=item.get("origin", "extracted"),
                system_output=bool(item.get("system_output", False))))
        except KeyError as exc:
            raise SchemaViolation("invariant missing field %s" % exc)
    for item in raw["decompositions"]:
        try:
            model.decompositions.append(Decomposition(
                parent=item["parent"], mode=item["mode"],
                children=list(item["children"])))
        except KeyError as exc:
            raise SchemaViolation("decomposition missing field %s" % exc)
    check_model(model)
    return model


def journal_reference(path: str, revision: int) -> dict:
    digest = hashlib.sha256()
    try:
        with open(path, "rb") as fh:
            digest.update(fh.read())
    except OSError:
        pass
    return {"path": path.rsplit("/", 1)[-1], "revision": revision,
            "sha256": digest.hexdigest()}
