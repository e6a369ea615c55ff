"""HTTP review service.

Serves pipeline state and the pending decision queue so a designer can
confirm or revert choices while the pipeline is mid-run.  Every submitted
choice is appended to the decision journal (fsynced) before any stage is
re-run, so a crash between the two loses nothing: the journal is the
source of truth and the re-run is recomputed on restart.

Optimistic concurrency: submissions carry the revision they were based
on; a stale revision is rejected with 409 and no journal write.
"""

from __future__ import annotations

import datetime
import json
import os
import threading
from typing import Any, Dict, List, Optional

from fastapi import FastAPI
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from .errors import StateLocked
from .journal import Decision, DecisionJournal
from .pipeline import Pipeline


class DecisionSubmission(BaseModel):
    choice: Any
    author: str = "reviewer"
    expected_revision: int


class SessionHub:
    """Maps session ids to pipeline state directories; one write lock each."""

    def __init__(self, sessions: Dict[str, str]):
        self.dirs = {sid: os.path.abspath(d) for sid, d in sessions.items()}
        self.locks = {sid: threading.Lock() for sid in self.dirs}

    def known(self, sid: str) -> bool:
        return sid in self.dirs

    def pipeline(self, sid: str) -> Pipeline:
        return Pipeline(state_dir=self.dirs[sid])


def find_ui_dir() -> Optional[str]:
    """Built frontend assets: $IRM_UI_DIST, or frontend/dist next to cwd."""
    env = os.environ.get("IRM_UI_DIST")
    if env and os.path.isdir(env):
        return env
    local = os.path.join(os.getcwd(), "frontend", "dist")
    if os.path.isdir(local):
        return local
    return None


# ---------------------------------------------------------------------------
# decision enrichment: attach source excerpts with highlight offsets

def _artifact_json(pipe: Pipeline, name: str):
    if not pipe.has_artifact(name):
        return None
    try:
        return pipe._read_json(name)
    except (OSError, json.JSONDecodeError):
        return None


_SKIP_POS = {"DT", "PDT", "PRP$"}


def _span_chars(graph_raw: dict, token_span: List[int]) -> Optional[List[int]]:
    tokens = {t["index"]: t for t in graph_raw["tokens"]}
    spans = [tokens[i]["char_span"] for i in token_span
             if i in tokens and tokens[i]["pos"] not in _SKIP_POS]
    spans = [s for s in spans if s and s[1] > s[0]]
    if not spans:
        return None
    return [min(s[0] for s in spans), max(s[1] for s in spans)]


def _literal_span(text: str, phrase: str) -> Optional[List[int]]:
    pos = text.lower().find(phrase.lower())
    if pos < 0:
        return None
    return [pos, pos + len(phrase)]


class _Excerpts:
    """Read-once view over the artifacts a decision excerpt needs."""

    def __init__(self, pipe: Pipeline):
        doc = _artifact_json(pipe, "document.json") or {}
        self.sentences = {e["sentence_id"]: e
                          for e in doc.get("effective", [])}
        graphs = _artifact_json(pipe, "graphs.json") or {}
        self.graphs = graphs.get("graphs", {})
        cands = _artifact_json(pipe, "candidates.json") or {}
        self.candidates = {c["phrase"]: c for c in cands.get("candidates", [])}
        classification = _artifact_json(pipe, "classification.json") or {}
        self.records = {r["key"]: r for r in classification.get("records", [])}
        self.catalog = (_artifact_json(pipe, "catalog.json") or {}).get("components", [])

    def sentence_excerpt(self, sid: str, highlight: Optional[List[int]],
                         label: str) -> Optional[dict]:
        sent = self.sentences.get(sid)
        if sent is None:
            return None
        return {"sentence_id": sid, "text": sent["text"],
                "highlights": [highlight] if highlight else [],
                "label": label}

    def phrase_excerpt(self, phrase: str) -> Optional[dict]:
        cand = self.candidates.get(phrase)
        if cand is None or not cand["mentions"]:
            return None
        mention = cand["mentions"][0]
        sid = mention["sentence_id"]
        highlight = None
        graph = self.graphs.get(sid)
        if graph is not None:
            highlight = _span_chars(graph, mention["span"])
        sent = self.sentences.get(sid)
        if highlight is None and sent is not None:
            highlight = _literal_span(sent["text"], mention["surface"])
        return self.sentence_excerpt(sid, highlight, phrase)

    def attribute_mention(self, ref: str, sentence_ids: List[str]) -> Optional[dict]:
        comp_name, _, ident = ref.rpartition("::")
        for comp in self.catalog:
            if comp["name"] != comp_name:
                continue
            for attr in comp["attributes"]:
                if attr["ident"] != ident:
                    continue
                for mention in attr["mentions"]:
                    if mention["sentence_id"] in sentence_ids:
                        graph = self.graphs.get(mention["sentence_id"])
                        highlight = _span_chars(graph, mention["span"]) if graph else None
                        return self.sentence_excerpt(mention["sentence_id"],
                                                     highlight, ref)
        return None

    def requirement_excerpt(self, key: str, ref: Optional[str] = None) -> List[dict]:
        record = self.records.get(key)
        if record is None:
            return []
        out = []
        if ref is not None:
            hit = self.attribute_mention(ref, record["sentence_ids"])
            if hit is not None:
                out.append(hit)
        if not out:
            sid = record["sentence_ids"][0] if record["sentence_ids"] else None
            excerpt = self.sentence_excerpt(sid, None, key) if sid else None
            if excerpt is not None:
                out.append(excerpt)
        return out

    def context_for(self, request: dict) -> List[dict]:
        kind = request["kind"]
        target = request["target"]
        if kind == "alias_merge":
            return [e for p in target.split("|")
                    if (e := self.phrase_excerpt(p)) is not None]
        if kind == "owner":
            return [e for e in [self.phrase_excerpt(target)] if e is not None]
        if kind == "direction":
            key, _, rest = target.partition(":")
            ref = rest if "::" in rest else None
            return self.requirement_excerpt(key, ref)
        if kind == "type_override":
            return self.requirement_excerpt(target)
        if kind == "composition":
            _, _, rest = target.partition(":")
            if rest in self.records:
                return self.requirement_excerpt(rest)
            return []
        return []


def enrich_requests(pipe: Pipeline, requests: List[dict]) -> List[dict]:
    view = _Excerpts(pipe)
    out = []
    for req in requests:
        item = dict(req)
        item["context"] = view.context_for(req)
        out.append(item)
    return out


# ---------------------------------------------------------------------------
# application

def _not_ready(what: str) -> JSONResponse:
    return JSONResponse(status_code=404,
                        content={"error": "NotReady", "detail": what})


def _unknown_session(sid: str) -> JSONResponse:
    return JSONResponse(status_code=404,
                        content={"error": "UnknownSession", "session": sid})


def create_app(sessions: Dict[str, str], ui_dir: Optional[str] = None) -> FastAPI:
    hub = SessionHub(sessions)
    app = FastAPI(title="irm review service")

    @app.get("/api/sessions/{sid}/state")
    def get_state(sid: str):
        if not hub.known(sid):
            return _unknown_session(sid)
        pipe = hub.pipeline(sid)
        document = _artifact_json(pipe, "document.json")
        catalog = _artifact_json(pipe, "catalog.json")
        return {"summary": pipe.summary(),
                "document": document,
                "catalog": catalog,
                "revision": pipe.journal().revision}

    @app.get("/api/sessions/{sid}/decisions")
    def get_decisions(sid: str):
        if not hub.known(sid):
            return _unknown_session(sid)
        pipe = hub.pipeline(sid)
        journal = pipe.journal()
        return {"revision": journal.revision,
                "pending": enrich_requests(pipe, pipe.pending_requests()),
                "decided": [d.as_dict() for d in journal.entries]}

    @app.get("/api/sessions/{sid}/model")
    def get_model(sid: str):
        if not hub.known(sid):
            return _unknown_session(sid)
        pipe = hub.pipeline(sid)
        data = _artifact_json(pipe, "model.json")
        if data is None:
            return _not_ready("model.json")
        return data

    @app.get("/api/sessions/{sid}/report")
    def get_report(sid: str):
        if not hub.known(sid):
            return _unknown_session(sid)
        pipe = hub.pipeline(sid)
        data = _artifact_json(pipe, "report.json")
        if data is None:
            return _not_ready("report.json")
        return data

    @app.get("/api/sessions/{sid}/revision")
    def get_revision(sid: str):
        if not hub.known(sid):
            return _unknown_session(sid)
        pipe = hub.pipeline(sid)
        return {"revision": pipe.journal().revision}

    @app.post("/api/sessions/{sid}/decisions/{did:path}")
    def submit_decision(sid: str, did: str, body: DecisionSubmission):
        if not hub.known(sid):
            return _unknown_session(sid)
        with hub.locks[sid]:
            pipe = hub.pipeline(sid)
            journal = DecisionJournal.load(pipe.config["journal"])
            if body.expected_revision != journal.revision:
                return JSONResponse(status_code=409, content={
                    "error": "RevisionConflict",
                    "expected": body.expected_revision,
                    "actual": journal.revision})
            pending = {r["request_id"]: r for r in pipe.pending_requests()}
            request = pending.get(did)
            if request is not None:
                kind, target = request["kind"], request["target"]
            else:
                # reverting a previously journaled choice is a supersede
                prior = next((d for d in reversed(journal.entries)
                              if d.decision_id == did), None)
                if prior is None:
                    return JSONResponse(status_code=404, content={
                        "error": "UnknownDecision", "decision": did})
                kind, target = prior.kind, prior.target
            stamp = datetime.datetime.now(datetime.timezone.utc)
            journal.append(Decision(
                decision_id=did, kind=kind, target=target,
                choice=body.choice, author=body.author,
                timestamp=stamp.strftime("%Y-%m-%dT%H:%M:%SZ")), fsync=True)
            try:
                pipe.run()
            except StateLocked:
                return JSONResponse(status_code=503, content={
                    "error": "StateLocked",
                    "detail": "another process holds the pipeline lock"})
            return {"revision": journal.revision,
                    "pending": enrich_requests(pipe, pipe.pending_requests())}

    if ui_dir is not None:
        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="ui")

    return app
