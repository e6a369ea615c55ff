"""Append-only decision journal.

One JSON object per line; later entries for the same (kind, target)
supersede earlier ones, nothing is ever rewritten in place.  The journal
is the only mutable state in the pipeline: replaying the same journal
over the same input reproduces the same artifacts byte for byte.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Union

from .errors import SchemaViolation

Choice = Union[str, dict]

KINDS = {"alias_merge", "owner", "direction", "type_override", "composition"}


@dataclass
class Decision:
    decision_id: str
    kind: str
    target: str
    choice: Choice
    author: str = "unknown"
    timestamp: str = ""

    def as_dict(self):
        return {"decision_id": self.decision_id, "kind": self.kind,
                "target": self.target, "choice": self.choice,
                "author": self.author, "timestamp": self.timestamp}

    @classmethod
    def from_dict(cls, raw: dict, line_no: int = 0) -> "Decision":
        try:
            kind = raw["kind"]
            if kind not in KINDS:
                raise SchemaViolation("line %d: unknown decision kind %r" % (line_no, kind))
            return cls(decision_id=raw["decision_id"], kind=kind,
                       target=raw["target"], choice=raw["choice"],
                       author=raw.get("author", "unknown"),
                       timestamp=raw.get("timestamp", ""))
        except KeyError as exc:
            raise SchemaViolation("line %d: missing decision field %s" % (line_no, exc))


class DecisionJournal:
    def __init__(self, entries: Optional[List[Decision]] = None, path: Optional[str] = None):
        self.entries: List[Decision] = list(entries or [])
        self.path = path

    # -- persistence ---------------------------------------------------

    @classmethod
    def load(cls, path: str) -> "DecisionJournal":
        entries = []
        if os.path.exists(path):
            with open(path, "r", encoding="utf-8") as fh:
                for line_no, line in enumerate(fh, start=1):
                    line = line.strip()
                    if not line:
                        continue
                    try:
                        raw = json.loads(line)
                    except json.JSONDecodeError as exc:
                        raise SchemaViolation("line %d: %s" % (line_no, exc))
                    entries.append(Decision.from_dict(raw, line_no))
        return cls(entries, path=path)

    def append(self, decision: Decision, fsync: bool = False):
        self.entries.append(decision)
        if self.path is not None:
            with open(self.path, "a", encoding="utf-8") as fh:
                fh.write(json.dumps(decision.as_dict(), sort_keys=True) + "\n")
                fh.flush()
                if fsync:
                    os.fsync(fh.fileno())

    @property
    def revision(self) -> int:
        return len(self.entries)

    # -- resolution ----------------------------------------------------

    def latest(self, kind: str, target: str) -> Optional[Decision]:
        found = None
        for d in self.entries:
            if d.kind == kind and d.target == target:
                found = d
        return found

    def resolve(self, kind: str, target: str) -> Optional[Choice]:
        d = self.latest(kind, target)
        return d.choice if d is not None else None

    def by_kind(self, kind: str) -> Dict[str, Decision]:
        out: Dict[str, Decision] = {}
        for d in self.entries:
            if d.kind == kind:
                out[d.target] = d
        return out

    # -- typed accessors used by pipeline stages ------------------------

    def alias_decisions(self) -> Dict[str, dict]:
        """target "a|b" -> {"accept": bool, "canonical": optional str}"""
        out = {}
        for target, d in self.by_kind("alias_merge").items():
            if isinstance(d.choice, str):
                out[target] = {"accept": d.choice == "accept"}
            else:
                choice = dict(d.choice)
                accept = choice.pop("accept", choice.pop("choice", None))
                if isinstance(accept, str):
                    accept = accept == "accept"
                out[target] = {"accept": bool(accept)}
                if "canonical" in choice:
                    out[target]["canonical"] = choice["canonical"]
        return out

    def owner_decisions(self) -> Dict[str, str]:
        out = {}
        for target, d in self.by_kind("owner").items():
            out[target] = d.choice if isinstance(d.choice, str) else d.choice["owner"]
        return out

    def direction_decisions(self) -> Dict[str, Choice]:
        return {t: d.choice for t, d in self.by_kind("direction").items()}

    def type_overrides(self) -> Dict[str, str]:
        out = {}
        for target, d in self.by_kind("type_override").items():
            out[target] = d.choice if isinstance(d.choice, str) else d.choice["type"]
        return out

    def composition_decisions(self) -> Dict[str, Choice]:
        return {t: d.choice for t, d in self.by_kind("composition").items()}
