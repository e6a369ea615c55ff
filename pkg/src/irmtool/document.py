"""Requirements-document segmentation.

Input format: plain UTF-8 text with a title line, optional "Summary:" and
"Requirements:" headings, a situation-specific heading line, and outline
items labeled "1." / "(a)". Items may wrap over several physical lines.

Sub-items of an item whose last sentence is a stem ending in ":" are joined
with that stem's final clause when building parseable sentences, so
"(a) Continuously monitor its energy level (battery);" under the stem
"In order to do that, every car needs to:" parses as the full sentence
"Every car needs to continuously monitor its energy level (battery)."
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Dict, List, Optional

from .errors import MissingSection, UnparsableSentence
from .sentences import SentenceGraph
from . import shallow

SUMMARY = "Summary"
GENERAL = "General"
SITUATION = "SituationSpecific"

_ITEM = re.compile(r"^(\d+)\.\s+(.*)$")
_SUBITEM = re.compile(r"^\(([a-z])\)\s+(.*)$")


@dataclass
class RawSentence:
    text: str
    start: int                     # byte offset of the sentence in the source

    @property
    def span(self):
        return (self.start, self.start + len(self.text.encode("utf-8")))


@dataclass
class Section:
    kind: str                      # Summary | General | SituationSpecific
    sentences: List[RawSentence] = field(default_factory=list)


@dataclass
class RequirementItem:
    item_id: str                   # outline label: "1", "1(a)", "2", ...
    order: int
    section: str
    sentences: List[RawSentence] = field(default_factory=list)
    parent_id: Optional[str] = None

    @property
    def stem(self) -> Optional[RawSentence]:
        if self.sentences and self.sentences[-1].text.rstrip().endswith(":"):
            return self.sentences[-1]
        return None


@dataclass
class EffectiveSentence:
    """A parseable sentence: either a raw document sentence or a stem-joined
    sub-item. sentence_id is positional (s1, s2, ...)."""
    sentence_id: str
    text: str
    section: str
    item_id: Optional[str]
    source_spans: List[tuple] = field(default_factory=list)


@dataclass
class RequirementsDocument:
    title: str
    sections: List[Section]
    items: List[RequirementItem]
    source: str = ""

    def section(self, kind: str) -> Optional[Section]:
        for s in self.sections:
            if s.kind == kind:
                return s
        return None

    def item(self, item_id: str) -> Optional[RequirementItem]:
        for it in self.items:
            if it.item_id == item_id:
                return it
        return None

    def children_of(self, item_id: str) -> List[RequirementItem]:
        return [it for it in self.items if it.parent_id == item_id]


def segment_document(raw: str) -> RequirementsDocument:
    lines = raw.splitlines()
    title = ""
    sections: List[Section] = []
    items: List[RequirementItem] = []
    current_section: Optional[Section] = None
    current_item: Optional[RequirementItem] = None
    last_top: Optional[str] = None
    order = 0
    offset = 0          # running byte offset of the current line
    seen_heading = False

    # pending text accumulates an item's (or section's) wrapped lines
    pending: List[tuple] = []   # (text, byte offset)

    def flush():
        nonlocal pending
        if not pending:
            return
        start = pending[0][1]
        joined = " ".join(t for t, _ in pending)
        sents = split_sentences(joined, start)
        if current_item is not None:
            current_item.sentences.extend(sents)
        elif current_section is not None:
            current_section.sentences.extend(sents)
        pending = []

    for line in lines:
        stripped = line.strip()
        line_off = offset + len(line[:len(line) - len(line.lstrip())].encode("utf-8"))
        offset += len(line.encode("utf-8")) + 1
        if not stripped:
            flush()
            continue
        if not title:
            title = stripped
            continue
        low = stripped.lower()
        if low == "summary:":
            flush()
            current_item = None
            current_section = Section(SUMMARY)
            sections.append(current_section)
            seen_heading = True
            continue
        if low == "requirements:":
            flush()
            current_item = None
            current_section = Section(GENERAL)
            sections.append(current_section)
            seen_heading = True
            continue
        if "situation-specific" in low and stripped.endswith(":"):
            flush()
            current_item = None
            current_section = Section(SITUATION)
            sections.append(current_section)
            seen_heading = True
            continue
        m = _ITEM.match(stripped)
        if m and current_section is not None and current_section.kind != SUMMARY:
            flush()
            order += 1
            current_item = RequirementItem(m.group(1), order, current_section.kind)
            last_top = m.group(1)
            items.append(current_item)
            pending.append((m.group(2), line_off + len(m.group(1)) + 2))
            continue
        m = _SUBITEM.match(stripped)
        if m and last_top is not None:
            flush()
            order += 1
            current_item = RequirementItem("%s(%s)" % (last_top, m.group(1)),
                                           order, current_section.kind,
                                           parent_id=last_top)
            items.append(current_item)
            pending.append((m.group(2), line_off + len(m.group(1)) + 4))
            continue
        # structural preamble like "The general requirements ... are:" is
        # not a requirement sentence
        if stripped.endswith(":") and current_item is None:
            flush()
            continue
        pending.append((stripped, line_off))
    flush()

    if not seen_heading:
        raise MissingSection("no Summary or Requirements heading found")
    ids = [it.item_id for it in items]
    if len(ids) != len(set(ids)):
        raise MissingSection("duplicate outline labels: %s" % ids)
    return RequirementsDocument(title=title, sections=sections, items=items, source=raw)


_BOUNDARY = re.compile(r"[.;]")


def split_sentences(text: str, base: int = 0) -> List[RawSentence]:
    """Paren-aware splitting at depth-0 '.'/';' boundaries."""
    out: List[RawSentence] = []
    depth = 0
    start = 0
    i = 0
    while i < len(text):
        ch = text[i]
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth = max(0, depth - 1)
        elif ch in ".;" and depth == 0:
            # keep abbreviation dots inside a sentence
            if ch == "." and _is_abbrev_dot(text, i):
                i += 1
                continue
            piece = text[start:i + 1].strip()
            if piece:
                lead = len(text[start:]) - len(text[start:].lstrip())
                out.append(RawSentence(piece, base + _blen(text[:start + lead])))
            start = i + 1
        i += 1
    tail = text[start:].strip()
    if tail:
        lead = len(text[start:]) - len(text[start:].lstrip())
        out.append(RawSentence(tail, base + _blen(text[:start + lead])))
    return out


def _blen(s: str) -> int:
    return len(s.encode("utf-8"))


def _is_abbrev_dot(text: str, i: int) -> bool:
    for abbrev in ("e.g.", "i.e."):
        for k in range(len(abbrev)):
            if abbrev[k] != "." :
                continue
            j = i - k
            if j >= 0 and text[j:j + len(abbrev)] == abbrev:
                return True
    # a dot inside a number: "0.5"
    return i + 1 < len(text) and text[i + 1].isdigit() and i > 0 and text[i - 1].isdigit()


def effective_sentences(doc: RequirementsDocument) -> List[EffectiveSentence]:
    """The parseable sentence list: summary prose, item sentences, and
    stem-joined sub-items. Stems themselves are consumed by the join."""
    out: List[EffectiveSentence] = []

    def add(text, section, item_id, spans):
        sid = "s%d" % (len(out) + 1)
        out.append(EffectiveSentence(sid, text, section, item_id, spans))

    summary = doc.section(SUMMARY)
    if summary is not None:
        for rs in summary.sentences:
            add(rs.text, SUMMARY, None, [rs.span])

    for item in doc.items:
        children = doc.children_of(item.item_id)
        stem = item.stem if children else None
        for rs in item.sentences:
            if stem is not None and rs is stem:
                continue
            if item.parent_id is not None:
                parent = doc.item(item.parent_id)
                pstem = parent.stem if parent else None
                if pstem is not None:
                    add(join_stem(pstem.text, rs.text), item.section,
                        item.item_id, [pstem.span, rs.span])
                    continue
            add(rs.text, item.section, item.item_id, [rs.span])
    return out


def join_stem(stem: str, child: str) -> str:
    """'In order to do that, every car needs to:' + 'Continuously monitor
    its energy level (battery);' -> 'Every car needs to continuously
    monitor its energy level (battery).'"""
    core = stem.rstrip().rstrip(":")
    # the joinable clause is the stem's last comma segment
    clause = core.rsplit(",", 1)[-1].strip()
    clause = clause[0].upper() + clause[1:] if clause else clause
    body = child.strip().rstrip(";.").strip()
    body = body[0].lower() + body[1:] if body else body
    return "%s %s." % (clause, body)


def parse_document(doc: RequirementsDocument,
                   conllu_graphs: Optional[List[SentenceGraph]] = None,
                   lexicon=None) -> Dict[str, SentenceGraph]:
    """Build one dependency graph per effective sentence.

    With conllu_graphs the i-th graph maps to the i-th sentence (count must
    match); otherwise the built-in shallow parser runs. Unparsable sentences
    are skipped (treated as prose) and reported by the caller.
    """
    sentences = effective_sentences(doc)
    graphs: Dict[str, SentenceGraph] = {}
    if conllu_graphs is not None:
        if len(conllu_graphs) != len(sentences):
            raise UnparsableSentence(
                "parse file has %d sentences, document has %d" % (
                    len(conllu_graphs), len(sentences)))
        for eff, g in zip(sentences, conllu_graphs):
            g = SentenceGraph(sentence_id=eff.sentence_id, text=g.text,
                              tokens=g.tokens, edges=g.edges,
                              source_section=eff.section)
            graphs[eff.sentence_id] = g
        return graphs
    for eff in sentences:
        try:
            g = shallow.shallow_parse(eff.text, sentence_id=eff.sentence_id,
                                      lexicon=lexicon)
        except UnparsableSentence:
            continue
        g.source_section = eff.section
        graphs[eff.sentence_id] = g
    return graphs


def doc_to_dict(doc: RequirementsDocument) -> dict:
    return {
        "title": doc.title,
        "source": doc.source,
        "sections": [{"kind": s.kind,
                      "sentences": [{"text": r.text, "start": r.start}
                                    for r in s.sentences]}
                     for s in doc.sections],
        "items": [{"item_id": it.item_id, "order": it.order,
                   "section": it.section, "parent_id": it.parent_id,
                   "sentences": [{"text": r.text, "start": r.start}
                                 for r in it.sentences]}
                  for it in doc.items],
    }


def doc_from_dict(raw: dict) -> RequirementsDocument:
    return RequirementsDocument(
        title=raw["title"],
        source=raw.get("source", ""),
        sections=[Section(kind=s["kind"],
                          sentences=[RawSentence(r["text"], r["start"])
                                     for r in s["sentences"]])
                  for s in raw["sections"]],
        items=[RequirementItem(item_id=it["item_id"], order=it["order"],
                               section=it["section"],
                               sentences=[RawSentence(r["text"], r["start"])
                                          for r in it["sentences"]],
                               parent_id=it["parent_id"])
               for it in raw["items"]])
