"""Dependency-annotated sentences and their CoNLL-U ingestion.

A SentenceGraph is a rooted dependency tree: every token is the dependent
of exactly one edge, exactly one edge hangs off the virtual root (head 0),
and the edges are acyclic. Both the external CoNLL-U reader and the built-in
shallow parser produce this shape, so downstream extraction never cares
where a parse came from.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Set, Tuple

from .errors import CyclicParse, MalformedConllu


@dataclass(frozen=True)
class Token:
    index: int                 # 1-based position in the sentence
    text: str
    lemma: str
    pos: str                   # Penn-style tag (NN, VBZ, IN, ...)
    char_span: Tuple[int, int]  # [start, end) offsets into the source text


@dataclass(frozen=True)
class DependencyEdge:
    head: int                  # token index, 0 for the virtual root
    dependent: int
    relation: str


@dataclass
class SentenceGraph:
    sentence_id: str
    text: str
    tokens: List[Token] = field(default_factory=list)
    edges: List[DependencyEdge] = field(default_factory=list)
    source_section: str = ""

    def token(self, index: int) -> Token:
        return self.tokens[index - 1]

    def head_of(self, index: int) -> Optional[DependencyEdge]:
        for e in self.edges:
            if e.dependent == index:
                return e
        return None

    def children(self, index: int, relation: Optional[str] = None) -> List[int]:
        out = [e.dependent for e in self.edges
               if e.head == index and (relation is None or e.relation == relation)]
        return sorted(out)

    def root_index(self) -> int:
        for e in self.edges:
            if e.head == 0:
                return e.dependent
        raise ValueError(f"sentence {self.sentence_id!r} has no root edge")

    def triples(self, relations: Iterable[str]) -> Set[Tuple[str, str, str]]:
        """(relation, head text, dependent text) for the requested relations.

        The virtual root contributes no triple.
        """
        wanted = set(relations)
        out = set()
        for e in self.edges:
            if e.relation in wanted and e.head != 0:
                out.add((e.relation, self.token(e.head).text, self.token(e.dependent).text))
        return out

    def validate_tree(self, line_no: int = 0):
        """Enforce the tree invariants; raises MalformedConllu or CyclicParse."""
        n = len(self.tokens)
        if len(self.edges) != n:
            raise MalformedConllu(line_no, f"{len(self.edges)} edges for {n} tokens")
        seen_dependents = set()
        roots = []
        adjacency: Dict[int, List[int]] = {}
        for e in self.edges:
            if e.dependent in seen_dependents:
                raise MalformedConllu(line_no, f"token {e.dependent} has two heads")
            seen_dependents.add(e.dependent)
            if not (0 <= e.head <= n) or not (1 <= e.dependent <= n):
                raise MalformedConllu(line_no, f"edge {e.head}->{e.dependent} out of range")
            if e.head == e.dependent:
                raise CyclicParse(self.sentence_id)
            if e.head == 0:
                roots.append(e.dependent)
            adjacency.setdefault(e.head, []).append(e.dependent)
        if len(roots) != 1:
            raise MalformedConllu(line_no, f"{len(roots)} root edges, expected exactly one")
        # Every token has one head, so anything unreachable from the root
        # must sit on a cycle.
        reached = set()
        stack = [roots[0]]
        while stack:
            node = stack.pop()
            if node in reached:
                continue
            reached.add(node)
            stack.extend(adjacency.get(node, []))
        if len(reached) != n:
            raise CyclicParse(self.sentence_id)


# Universal POS fallback when the language-specific column is empty.
_UPOS_TO_PENN = {
    "NOUN": "NN", "PROPN": "NNP", "VERB": "VB", "AUX": "MD", "ADJ": "JJ",
    "ADV": "RB", "ADP": "IN", "DET": "DT", "PRON": "PRP", "NUM": "CD",
    "PART": "TO", "CCONJ": "CC", "SCONJ": "IN", "PUNCT": ".", "SYM": "SYM",
    "INTJ": "UH", "X": "FW",
}


def ingest_conllu(text: str) -> List[SentenceGraph]:
    """Parse CoNLL-U content into sentence graphs.

    Multiword ranges (``1-2``) and empty nodes (``1.1``) are skipped.
    The language-specific XPOS column takes precedence; UPOS is mapped to a
    Penn-style tag when XPOS is ``_``. Sentence text is reconstructed by
    joining forms with single spaces, which also yields the char spans.
    """
    sentences: List[SentenceGraph] = []
    rows: List[Tuple[int, List[str]]] = []
    sent_id: Optional[str] = None

    def flush():
        nonlocal rows, sent_id
        if not rows:
            sent_id = None
            return
        first_line = rows[0][0]
        tokens: List[Token] = []
        heads: List[Tuple[int, int, str, int]] = []
        offset = 0
        remap: Dict[int, int] = {}
        for position, (line_no, cols) in enumerate(rows, start=1):
            remap[int(cols[0])] = position
        for line_no, cols in rows:
            form, lemma, upos, xpos = cols[1], cols[2], cols[3], cols[4]
            head_col, deprel = cols[6], cols[7]
            try:
                head = int(head_col)
            except ValueError:
                raise MalformedConllu(line_no, f"non-integer HEAD {head_col!r}")
            pos = xpos if xpos not in ("", "_") else _UPOS_TO_PENN.get(upos, "NN")
            index = len(tokens) + 1
            start = offset
            offset = start + len(form)
            tokens.append(Token(index=index, text=form,
                                lemma=lemma if lemma not in ("", "_") else form.lower(),
                                pos=pos, char_span=(start, offset)))
            offset += 1  # single joining space
            mapped_head = 0 if head == 0 else remap.get(head)
            if mapped_head is None:
                raise MalformedConllu(line_no, f"HEAD {head} points at a skipped token")
            heads.append((mapped_head, index, deprel, line_no))
        graph = SentenceGraph(
            sentence_id=sent_id or f"s{len(sentences) + 1}",
            text=" ".join(t.text for t in tokens),
            tokens=tokens,
            edges=[DependencyEdge(h, d, rel) for h, d, rel, _ in heads],
        )
        graph.validate_tree(line_no=first_line)
        sentences.append(graph)
        rows = []
        sent_id = None

    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.rstrip("\n")
        if not line.strip():
            flush()
            continue
        if line.startswith("#"):
            comment = line[1:].strip()
            if comment.startswith("sent_id") and "=" in comment:
                sent_id = comment.split("=", 1)[1].strip()
            continue
        cols = line.split("\t")
        if len(cols) != 10:
            raise MalformedConllu(line_no, f"{len(cols)} columns, expected 10")
        token_id = cols[0]
        if "-" in token_id or "." in token_id:
            continue  # multiword range / empty node
        try:
            int(token_id)
        except ValueError:
            raise MalformedConllu(line_no, f"bad token id {token_id!r}")
        rows.append((line_no, cols))
    flush()
    return sentences


def graph_to_dict(graph: SentenceGraph) -> dict:
    return {
        "sentence_id": graph.sentence_id,
        "text": graph.text,
        "source_section": graph.source_section,
        "tokens": [{"index": t.index, "text": t.text, "lemma": t.lemma,
                    "pos": t.pos, "char_span": list(t.char_span)}
                   for t in graph.tokens],
        "edges": [{"head": e.head, "dependent": e.dependent,
                   "relation": e.relation} for e in graph.edges],
    }


def graph_from_dict(raw: dict) -> SentenceGraph:
    graph = SentenceGraph(
        sentence_id=raw["sentence_id"], text=raw.get("text", ""),
        source_section=raw.get("source_section", ""),
        tokens=[Token(index=t["index"], text=t["text"], lemma=t["lemma"],
                      pos=t["pos"], char_span=tuple(t.get("char_span", (0, 0))))
                for t in raw["tokens"]],
        edges=[DependencyEdge(head=e["head"], dependent=e["dependent"],
                              relation=e["relation"]) for e in raw["edges"]])
    graph.validate_tree()
    return graph
