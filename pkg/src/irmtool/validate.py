"""Configuration enumeration and knowledge-flow checks.

A configuration picks one child at every reachable OR decomposition and
keeps everything under AND edges.  Within each configuration:
  MissingInput     (error)   an input nobody selected produces;
                   inputs on "?" placeholders only warn
  MultipleWriters  (error)   two selected invariants output one attribute
                   ("?" outputs exempt)
  UnusedOutput     (warning) an output nobody selected consumes, unless
                   the producer is flagged as a system output
Globally:
  UnusedAttribute  (warning) a catalog attribute absent from every
                   signature

Findings deduplicate on (kind, subject, involved) across configurations
and sort by (configuration, kind, subject) so repeated runs emit byte
identical reports.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from .errors import ConfigurationExplosion
from .flow import parse_signature
from .model import IrmModel, canonical_json

DEFAULT_CAP = 10000

ERROR = "error"
WARNING = "warning"


@dataclass
class Finding:
    config: str
    kind: str
    severity: str
    subject: str
    involved: List[int] = field(default_factory=list)

    def key(self):
        return (self.kind, self.subject, tuple(self.involved))

    def as_dict(self):
        return {"config": self.config, "kind": self.kind,
                "severity": self.severity, "subject": self.subject,
                "involved": list(self.involved)}


def count_configurations(model: IrmModel) -> int:
    children_of = {d.parent: d for d in model.decompositions}

    def count(node: int) -> int:
        d = children_of.get(node)
        if d is None or not d.children:
            return 1
        if d.mode == "OR":
            return sum(count(c) for c in d.children)
        total = 1
        for c in d.children:
            total *= count(c)
        return total

    total = 1
    for root in sorted(model.roots()):
        total *= count(root)
    return total


def enumerate_configurations(model: IrmModel, cap: int = DEFAULT_CAP):
    """Returns [(choices dict or_parent->child, selected node ids)] sorted
    by the choice vector."""
    total = count_configurations(model)
    if total > cap:
        raise ConfigurationExplosion(total, cap)
    children_of = {d.parent: d for d in model.decompositions}

    def expand(node: int) -> List[Tuple[Dict[int, int], frozenset]]:
        d = children_of.get(node)
        if d is None or not d.children:
            return [({}, frozenset([node]))]
        if d.mode == "OR":
            out = []
            for c in sorted(d.children):
                for choices, selected in expand(c):
                    merged = {node: c}
                    merged.update(choices)
                    out.append((merged, selected | {node}))
            return out
        out = [({}, frozenset([node]))]
        for c in sorted(d.children):
            nxt = []
            for choices, selected in out:
                for c_choices, c_selected in expand(c):
                    merged = dict(choices)
                    merged.update(c_choices)
                    nxt.append((merged, selected | c_selected))
            out = nxt
        return out

    combos = [({}, frozenset())]
    for root in sorted(model.roots()):
        nxt = []
        for choices, selected in combos:
            for r_choices, r_selected in expand(root):
                merged = dict(choices)
                merged.update(r_choices)
                nxt.append((merged, selected | r_selected))
        combos = nxt
    combos.sort(key=lambda pair: tuple(sorted(pair[0].items())))
    return combos


def check_flows(model: IrmModel, cap: int = DEFAULT_CAP) -> dict:
    configs = enumerate_configurations(model, cap)
    sigs = {}
    for inv in model.invariants:
        if inv.signature:
            sigs[inv.node_id] = parse_signature(inv.signature, key=str(inv.node_id))

    findings: List[Finding] = []
    seen = set()

    def add(finding: Finding):
        if finding.key() in seen:
            return
        seen.add(finding.key())
        findings.append(finding)

    config_rows = []
    for n, (choices, selected) in enumerate(configs, start=1):
        cid = "cfg-%d" % n
        config_rows.append({"id": cid,
                            "choices": {str(k): v for k, v in sorted(choices.items())},
                            "selected": sorted(selected)})
        producers: Dict[str, List[int]] = {}
        consumers: Dict[str, List[int]] = {}
        for node in sorted(selected):
            sig = sigs.get(node)
            if sig is None:
                continue
            for p in sig.params:
                if p.direction == "out" and p.attribute != "?":
                    producers.setdefault(p.ref, []).append(node)
                elif p.direction == "in":
                    consumers.setdefault(p.ref, []).append(node)
        for node in sorted(selected):
            sig = sigs.get(node)
            if sig is None:
                continue
            for p in sig.params:
                if p.direction != "in":
                    continue
                if p.attribute == "?":
                    add(Finding(cid, "MissingInput", WARNING, p.ref, [node]))
                    continue
                others = [x for x in producers.get(p.ref, []) if x != node]
                if not others:
                    add(Finding(cid, "MissingInput", ERROR, p.ref, [node]))
        for ref in sorted(producers):
            writers = producers[ref]
            if len(writers) > 1:
                add(Finding(cid, "MultipleWriters", ERROR, ref, sorted(writers)))
            for node in writers:
                used = [x for x in consumers.get(ref, []) if x != node]
                if not used and not model.invariant(node).system_output:
                    add(Finding(cid, "UnusedOutput", WARNING, ref, [node]))

    mentioned = set()
    for sig in sigs.values():
        for p in sig.params:
            if p.attribute != "?":
                mentioned.add(p.ref)
    for comp in model.components:
        for attr in comp.get("attributes", []):
            ref = "%s::%s" % (comp["name"], attr["ident"])
            if ref not in mentioned:
                add(Finding("", "UnusedAttribute", WARNING, ref, []))

    findings.sort(key=lambda f: (f.config, f.kind, f.subject, f.involved))
    errors = sum(1 for f in findings if f.severity == ERROR)
    warnings = sum(1 for f in findings if f.severity == WARNING)
    return {
        "schema_version": 1,
        "configuration_count": len(configs),
        "configurations": config_rows,
        "findings": [f.as_dict() for f in findings],
        "errors": errors,
        "warnings": warnings,
        "verdict": "fail" if errors else "pass",
        "journal_ref": model.journal_ref,
    }


def render_report(report: dict) -> str:
    return canonical_json(report)
