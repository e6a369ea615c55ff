"""Stage orchestration over a state directory.

Artifacts live in one directory (default .irm, overridable via --state
or IRM_STATE_DIR) next to an irm-state.json manifest.  Every stage
fingerprints its inputs (file bytes plus the relevant configuration);
a stage whose fingerprint matches the manifest is skipped, so reruns
are cheap and idempotent.  An advisory lock file guards the directory
against concurrent writers.

Pending decision requests never block artifact writing, with one
exception: the component catalog cannot be built while an alias merge
touching a component is unresolved, which leaves later stages blocked
until the journal answers.
"""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import dataclass, field
from typing import Dict, List, Optional

from . import validate as validate_mod
from .classify import classify_requirements, load_comparators, load_seeds
from .document import (doc_from_dict, doc_to_dict, effective_sentences,
                       parse_document, segment_document)
from .entities import (build_catalog, cluster_aliases, detect_appositions,
                       extract_candidates, hint_kinds)
from .errors import IrmError, StateLocked, UnresolvedDecision
from .flow import build_signatures, infer_directions
from .journal import Decision, DecisionJournal
from .lexicon import load_synsets
from .model import (IrmModel, canonical_json, compose, deserialize_model,
                    serialize_model)
from .sentences import graph_from_dict, graph_to_dict, ingest_conllu

STATE_FILE = "irm-state.json"
LOCK_FILE = "irm-state.lock"
STAGES = ("segment", "extract", "classify", "flow", "compose", "validate")

ARTIFACTS = {
    "segment": ("document.json", "graphs.json"),
    "extract": ("candidates.json", "catalog.json", "dropped_candidates.json"),
    "classify": ("classification.json",),
    "flow": ("signatures.json",),
    "compose": ("model.json",),
    "validate": ("report.json",),
}


def default_state_dir() -> str:
    return os.environ.get("IRM_STATE_DIR") or ".irm"


@dataclass
class StageStatus:
    name: str
    ran: bool = False
    skipped: bool = False
    blocked: Optional[str] = None
    pending: List[dict] = field(default_factory=list)

    def as_dict(self):
        return {"name": self.name, "ran": self.ran, "skipped": self.skipped,
                "blocked": self.blocked, "pending": list(self.pending)}


class StateLock:
    def __init__(self, state_dir: str):
        self.path = os.path.join(state_dir, LOCK_FILE)
        self.fd = None

    def __enter__(self):
        try:
            self.fd = os.open(self.path, os.O_CREAT | os.O_EXCL | os.O_WRONLY)
        except FileExistsError:
            holder = None
            try:
                with open(self.path) as fh:
                    holder = int(fh.read().strip() or "0")
            except (OSError, ValueError):
                pass
            if holder and _pid_alive(holder):
                raise StateLocked("state directory locked by pid %d" % holder)
            # stale lock: previous holder is gone
            os.unlink(self.path)
            self.fd = os.open(self.path, os.O_CREAT | os.O_EXCL | os.O_WRONLY)
        os.write(self.fd, str(os.getpid()).encode())
        return self

    def __exit__(self, *exc):
        if self.fd is not None:
            os.close(self.fd)
            self.fd = None
        try:
            os.unlink(self.path)
        except OSError:
            pass


def _pid_alive(pid: int) -> bool:
    try:
        os.kill(pid, 0)
    except ProcessLookupError:
        return False
    except PermissionError:
        return True
    return True


class Pipeline:
    def __init__(self, state_dir: Optional[str] = None,
                 input_path: Optional[str] = None,
                 conllu_path: Optional[str] = None,
                 journal_path: Optional[str] = None,
                 threshold: Optional[float] = None,
                 measure: Optional[str] = None,
                 cap: Optional[int] = None,
                 lexicon_path: Optional[str] = None,
                 seeds_path: Optional[str] = None,
                 comparators_path: Optional[str] = None,
                 assume_defaults: bool = False):
        self.state_dir = state_dir or default_state_dir()
        os.makedirs(self.state_dir, exist_ok=True)
        self.state = self._load_state()
        config = self.state.setdefault("config", {})
        if input_path is not None:
            config["input"] = os.path.abspath(input_path)
        if conllu_path is not None:
            config["conllu"] = os.path.abspath(conllu_path)
        if journal_path is not None:
            config["journal"] = os.path.abspath(journal_path)
        config.setdefault("journal", os.path.join(self.state_dir, "decisions.jsonl"))
        if threshold is not None:
            config["threshold"] = threshold
        if measure is not None:
            config["measure"] = measure
        if cap is not None:
            config["cap"] = cap
        if lexicon_path is not None:
            config["lexicon"] = os.path.abspath(lexicon_path)
        if seeds_path is not None:
            config["seeds"] = os.path.abspath(seeds_path)
        if comparators_path is not None:
            config["comparators"] = os.path.abspath(comparators_path)
        config.setdefault("threshold", 0.84)
        config.setdefault("measure", "path")
        config.setdefault("cap", validate_mod.DEFAULT_CAP)
        self.assume_defaults = assume_defaults
        self._overlay: List[Decision] = []

    # -- state -----------------------------------------------------------

    def _load_state(self) -> dict:
        path = os.path.join(self.state_dir, STATE_FILE)
        if os.path.exists(path):
            with open(path, "r", encoding="utf-8") as fh:
                return json.load(fh)
        return {"schema_version": 1, "config": {}, "stages": {}}

    def _save_state(self):
        path = os.path.join(self.state_dir, STATE_FILE)
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(canonical_json(self.state))

    @property
    def config(self) -> dict:
        return self.state["config"]

    def artifact(self, name: str) -> str:
        return os.path.join(self.state_dir, name)

    def _write(self, name: str, data):
        with open(self.artifact(name), "w", encoding="utf-8") as fh:
            fh.write(canonical_json(data) if not isinstance(data, str) else data)

    def _read_json(self, name: str):
        with open(self.artifact(name), "r", encoding="utf-8") as fh:
            return json.load(fh)

    def has_artifact(self, name: str) -> bool:
        return os.path.exists(self.artifact(name))

    # -- journal ----------------------------------------------------------

    def journal(self) -> DecisionJournal:
        journal = DecisionJournal.load(self.config["journal"])
        for entry in self._overlay:
            journal.entries.append(entry)
        return journal

    def journal_fingerprint(self) -> str:
        digest = hashlib.sha256()
        digest.update(_file_bytes(self.config["journal"]))
        for entry in self._overlay:
            digest.update(json.dumps(entry.as_dict(), sort_keys=True).encode())
        return digest.hexdigest()

    def journal_ref(self) -> dict:
        journal = self.journal()
        return {"path": os.path.basename(self.config["journal"]),
                "revision": journal.revision,
                "sha256": self.journal_fingerprint()}

    # -- fingerprints ------------------------------------------------------

    def _fingerprint(self, *parts) -> str:
        digest = hashlib.sha256()
        for part in parts:
            if isinstance(part, bytes):
                digest.update(part)
            else:
                digest.update(str(part).encode())
            digest.update(b"\x00")
        return digest.hexdigest()

    def _stage_done(self, name: str, fingerprint: str) -> bool:
        stage = self.state["stages"].get(name)
        if stage is None or stage.get("fingerprint") != fingerprint:
            return False
        return all(self.has_artifact(a) for a in ARTIFACTS[name]
                   if not stage.get("blocked"))

    def _record(self, name: str, fingerprint: str, status: StageStatus):
        self.state["stages"][name] = {
            "fingerprint": fingerprint,
            "pending": status.pending,
            "blocked": status.blocked,
        }
        self._save_state()

    def _stored(self, name: str) -> StageStatus:
        stage = self.state["stages"].get(name, {})
        return StageStatus(name=name, skipped=True,
                           blocked=stage.get("blocked"),
                           pending=list(stage.get("pending", [])))

    # -- stages ------------------------------------------------------------

    def stage_segment(self, force=False) -> StageStatus:
        config = self.config
        if "input" not in config:
            raise IrmError("no input document configured; run segment --in FILE")
        fp = self._fingerprint("segment", _file_bytes(config["input"]),
                               _file_bytes(config.get("conllu")))
        if not force and self._stage_done("segment", fp):
            return self._stored("segment")
        with open(config["input"], "r", encoding="utf-8") as fh:
            raw = fh.read()
        doc = segment_document(raw)
        doc.source = os.path.basename(config["input"])
        conllu_graphs = None
        if config.get("conllu"):
            with open(config["conllu"], "r", encoding="utf-8") as fh:
                conllu_graphs = ingest_conllu(fh.read())
        graphs = parse_document(doc, conllu_graphs)
        order = [s.sentence_id for s in effective_sentences(doc)]
        self._write("document.json", {
            "document": doc_to_dict(doc),
            "effective": [{"sentence_id": s.sentence_id, "text": s.text,
                           "section": s.section, "item_id": s.item_id}
                          for s in effective_sentences(doc)],
        })
        self._write("graphs.json", {
            "order": [sid for sid in order if sid in graphs],
            "graphs": {sid: graph_to_dict(g) for sid, g in graphs.items()},
        })
        status = StageStatus("segment", ran=True)
        self._record("segment", fp, status)
        return status

    def _load_doc(self):
        raw = self._read_json("document.json")
        return doc_from_dict(raw["document"])

    def _load_graphs(self):
        raw = self._read_json("graphs.json")
        return ({sid: graph_from_dict(g) for sid, g in raw["graphs"].items()},
                raw["order"])

    def stage_extract(self, force=False) -> StageStatus:
        config = self.config
        self._require("graphs.json", "segment")
        fp = self._fingerprint("extract", _file_bytes(self.artifact("graphs.json")),
                               self.journal_fingerprint(), config["threshold"])
        if not force and self._stage_done("extract", fp):
            return self._stored("extract")
        graphs, order = self._load_graphs()
        journal = self.journal()
        cands = hint_kinds(extract_candidates(graphs, order), graphs)
        pairs = detect_appositions(graphs, order)
        clusters, requests = cluster_aliases(cands, pairs,
                                             threshold=config["threshold"],
                                             journal=journal)
        status = StageStatus("extract", ran=True, pending=requests)
        self._write("candidates.json", {
            "candidates": [c.as_dict() for c in sorted(cands, key=lambda c: c.phrase)],
            "clusters": [{"canonical": cl.canonical, "members": cl.members,
                          "status": cl.status, "evidence": cl.evidence}
                         for cl in clusters],
            "requests": requests,
        })
        try:
            catalog = build_catalog(cands, clusters, journal)
        except UnresolvedDecision as exc:
            status.blocked = str(exc)
            status.pending = status.pending + \
                [r for r in exc.requests if isinstance(r, dict)]
            for name in ("catalog.json", "dropped_candidates.json"):
                if self.has_artifact(name):
                    os.unlink(self.artifact(name))
            self._record("extract", fp, status)
            return status
        from .model import catalog_as_dicts
        self._write("catalog.json", {"components": catalog_as_dicts(catalog)})
        self._write("dropped_candidates.json", {
            "dropped": [c.as_dict() for c in
                        sorted(catalog.dropped, key=lambda c: c.phrase)]})
        self._record("extract", fp, status)
        return status

    def _load_catalog(self):
        from .entities import (AliasCluster, CatalogAttribute, CatalogComponent,
                               ComponentCatalog, Mention)
        raw = self._read_json("catalog.json")
        catalog = ComponentCatalog()
        for comp in raw["components"]:
            cluster = AliasCluster(canonical=comp["canonical"],
                                   members=list(comp["aliases"]))
            c = CatalogComponent(name=comp["name"], cluster=cluster)
            for attr in comp["attributes"]:
                mentions = [Mention(m["sentence_id"], m["head_index"],
                                    tuple(m["span"]), m["role"], m["surface"])
                            for m in attr["mentions"]]
                c.attributes.append(CatalogAttribute(
                    name=attr["name"], ident=attr["ident"],
                    cluster=AliasCluster(canonical=attr["name"],
                                         members=list(attr["aliases"])),
                    mentions=mentions))
            catalog.components.append(c)
        return catalog

    def _require(self, artifact: str, producer: str):
        if self.has_artifact(artifact):
            return
        stage = self.state["stages"].get(producer, {})
        if stage.get("blocked"):
            raise UnresolvedDecision(
                [r.get("request_id", r.get("target", producer))
                 for r in stage.get("pending", [])] or [producer])
        raise _missing(artifact, producer)

    def stage_classify(self, force=False) -> StageStatus:
        config = self.config
        self._require("catalog.json", "extract")
        fp = self._fingerprint("classify",
                               _file_bytes(self.artifact("catalog.json")),
                               _file_bytes(self.artifact("graphs.json")),
                               self.journal_fingerprint(), config["measure"],
                               _file_bytes(config.get("lexicon")),
                               _file_bytes(config.get("seeds")),
                               _file_bytes(config.get("comparators")))
        if not force and self._stage_done("classify", fp):
            return self._stored("classify")
        doc = self._load_doc()
        graphs, _ = self._load_graphs()
        catalog = self._load_catalog()
        synsets = load_synsets(config.get("lexicon"))
        seeds = load_seeds(config.get("seeds"))
        comparators = load_comparators(config.get("comparators"))
        records, requests = classify_requirements(
            doc, graphs, catalog, synsets, seeds=seeds, comparators=comparators,
            measure=config["measure"], journal=self.journal())
        self._write("classification.json", {
            "records": [r.as_dict() for r in records],
            "requests": requests,
        })
        status = StageStatus("classify", ran=True, pending=requests)
        self._record("classify", fp, status)
        return status

    def _load_records(self):
        from .classify import ClassifiedRequirement
        raw = self._read_json("classification.json")
        records = []
        for r in raw["records"]:
            records.append(ClassifiedRequirement(
                key=r["key"], item_id=r["item_id"], role=r["role"],
                section=r["section"], text=r["text"], rtype=r["type"],
                confidence=r["confidence"], main_verb=r["main_verb"],
                condition=r["condition"], timing=r["timing"],
                origin=r["origin"], sentence_ids=list(r["sentence_ids"])))
        return records

    def stage_flow(self, force=False) -> StageStatus:
        self._require("classification.json", "classify")
        fp = self._fingerprint("flow",
                               _file_bytes(self.artifact("classification.json")),
                               _file_bytes(self.artifact("catalog.json")),
                               self.journal_fingerprint())
        if not force and self._stage_done("flow", fp):
            return self._stored("flow")
        records = self._load_records()
        graphs, _ = self._load_graphs()
        catalog = self._load_catalog()
        sigs = build_signatures(records, graphs, catalog)
        sigs, requests = infer_directions(sigs, self.journal())
        self._write("signatures.json", {
            "signatures": [sigs[k].as_dict() for k in sorted(sigs)],
            "requests": requests,
        })
        status = StageStatus("flow", ran=True, pending=requests)
        self._record("flow", fp, status)
        return status

    def _load_signatures(self):
        from .flow import FlowParameter, FlowSignature
        raw = self._read_json("signatures.json")
        sigs = {}
        for row in raw["signatures"]:
            sigs[row["key"]] = FlowSignature(
                key=row["key"], rtype=row["type"],
                params=[FlowParameter(p["component"], p["attribute"],
                                      p["direction"], p["origin"],
                                      p["provisional"]) for p in row["params"]])
        return sigs

    def stage_compose(self, force=False) -> StageStatus:
        self._require("signatures.json", "flow")
        fp = self._fingerprint("compose",
                               _file_bytes(self.artifact("signatures.json")),
                               _file_bytes(self.artifact("classification.json")),
                               self.journal_fingerprint())
        if not force and self._stage_done("compose", fp):
            return self._stored("compose")
        doc = self._load_doc()
        records = self._load_records()
        sigs = self._load_signatures()
        catalog = self._load_catalog()
        journal = self.journal()
        model, requests = compose(doc, records, sigs, catalog, journal,
                                  self.journal_ref())
        self._write("model.json", serialize_model(model))
        status = StageStatus("compose", ran=True, pending=requests)
        self._record("compose", fp, status)
        return status

    def load_model(self) -> IrmModel:
        with open(self.artifact("model.json"), "r", encoding="utf-8") as fh:
            return deserialize_model(fh.read())

    def stage_validate(self, force=False) -> StageStatus:
        self._require("model.json", "compose")
        fp = self._fingerprint("validate",
                               _file_bytes(self.artifact("model.json")),
                               self.config["cap"])
        if not force and self._stage_done("validate", fp):
            return self._stored("validate")
        model = self.load_model()
        report = validate_mod.check_flows(model, self.config["cap"])
        self._write("report.json", validate_mod.render_report(report))
        status = StageStatus("validate", ran=True)
        self._record("validate", fp, status)
        return status

    # -- orchestration -------------------------------------------------------

    def run_stage(self, name: str, force=False) -> StageStatus:
        method = getattr(self, "stage_" + name)
        with StateLock(self.state_dir):
            return method(force=force)

    def run(self, force=False) -> Dict[str, StageStatus]:
        with StateLock(self.state_dir):
            return self._run_all(force)

    def _run_all(self, force=False) -> Dict[str, StageStatus]:
        rounds = 0
        while True:
            statuses: Dict[str, StageStatus] = {}
            blocked = None
            for name in STAGES:
                if blocked is not None:
                    statuses[name] = StageStatus(name, blocked=blocked)
                    continue
                try:
                    status = getattr(self, "stage_" + name)(force=force)
                except UnresolvedDecision as exc:
                    status = StageStatus(name, blocked=str(exc))
                statuses[name] = status
                if status.blocked:
                    blocked = "waiting on %s" % name
            pending = [r for s in statuses.values() for r in s.pending]
            if not self.assume_defaults or not pending or rounds >= 20:
                return statuses
            for request in pending:
                self._overlay.append(Decision(
                    decision_id=request.get("request_id", request["target"]),
                    kind=request["kind"], target=request["target"],
                    choice=request["suggested"], author="assume-defaults"))
            rounds += 1
            force = False

    def pending_requests(self) -> List[dict]:
        out = []
        for name in STAGES:
            stage = self.state["stages"].get(name, {})
            for request in stage.get("pending", []):
                out.append(request)
        return out

    def summary(self) -> dict:
        stages = {}
        for name in STAGES:
            stage = self.state["stages"].get(name)
            if stage is None:
                stages[name] = {"status": "not-run"}
            elif stage.get("blocked"):
                stages[name] = {"status": "blocked", "detail": stage["blocked"]}
            elif stage.get("pending"):
                stages[name] = {"status": "pending",
                                "pending": len(stage["pending"])}
            else:
                stages[name] = {"status": "ok"}
        return {"state_dir": self.state_dir, "stages": stages,
                "journal": {"path": self.config.get("journal"),
                            "revision": self.journal().revision}}


def _file_bytes(path: Optional[str]) -> bytes:
    if not path:
        return b""
    try:
        with open(path, "rb") as fh:
            return fh.read()
    except OSError:
        return b""


def _missing(artifact: str, producer: str) -> IrmError:
    return IrmError("missing %s; run the %s stage first" % (artifact, producer))
