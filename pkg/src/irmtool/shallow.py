"""Rule-based shallow dependency parser for controlled requirements English.

Scope: declarative requirement sentences with one finite main verb, modal
obligation chains ("needs to", "has to", "should"), possessive "its"/"their",
parenthesized appositives, subordinate condition clauses and light
coordination. Anything outside that envelope raises UnparsableSentence and
callers fall back to treating the sentence as prose.

The output shape is identical to the CoNLL-U reader's: a SentenceGraph whose
{nsubj, dobj, appos} triples agree with a conventionally trained parser on
the bundled fixtures (a frozen gold file guards that agreement).
"""

from __future__ import annotations

import importlib.resources
import re
from typing import Dict, List, Optional, Sequence, Set, Tuple

from .errors import UnparsableSentence
from .sentences import DependencyEdge, SentenceGraph, Token

# ---------------------------------------------------------------------------
# tokenizer

_WORD = re.compile(r"[A-Za-z][A-Za-z'.-]*[A-Za-z.]|[A-Za-z]|\d+(?:\.\d+)?|[(),;:.%]|\S")
_ABBREV = {"e.g.", "i.e."}


def tokenize(text: str, base: int = 0) -> List[Tuple[str, Tuple[int, int]]]:
    """Split a sentence into (text, char_span) pairs.

    Words keep internal hyphens ("e-car"); digit/letter boundaries split
    ("5km" -> "5", "km"); known abbreviations keep their dots.
    """
    out: List[Tuple[str, Tuple[int, int]]] = []
    for m in _WORD.finditer(text):
        piece, start = m.group(0), m.start()
        if piece in _ABBREV:
            out.append((piece, (base + start, base + start + len(piece))))
            continue
        # a trailing dot belongs to the sentence, not the word
        while piece and piece[-1] == "." and piece not in _ABBREV:
            piece = piece[:-1]
        if not piece:
            out.append((".", (base + start, base + start + 1)))
            continue
        # split digit/letter seams like "5km"
        for part_match in re.finditer(r"\d+(?:\.\d+)?|[^\d]+", piece):
            part = part_match.group(0)
            s = base + start + part_match.start()
            out.append((part, (s, s + len(part))))
        if m.group(0).endswith(".") and m.group(0) not in _ABBREV:
            dot = base + m.end() - 1
            out.append((".", (dot, dot + 1)))
    return out


# ---------------------------------------------------------------------------
# tagging and lemmas

_NOUN_TAGS = {"NN", "NNS", "NNP", "NNPS"}
_VERB_TAGS = {"VB", "VBZ", "VBP", "VBD", "VBN", "VBG"}
_FINITE_TAGS = {"VBZ", "VBP", "VBD", "MD"}

_IRREGULAR_LEMMAS = {
    "is": "be", "are": "be", "was": "be", "were": "be", "been": "be",
    "being": "be", "am": "be", "has": "have", "had": "have", "having": "have",
    "does": "do", "did": "do", "done": "do", "doing": "do",
    "left": "leave", "chose": "choose", "chosen": "choose", "went": "go",
    "made": "make", "given": "give", "taken": "take", "kept": "keep",
}


class PosLexicon:
    """Word -> candidate Penn tags, first candidate is the default."""

    def __init__(self, entries: Dict[str, List[str]]):
        self.entries = entries

    @classmethod
    def load(cls, path=None) -> "PosLexicon":
        if path is not None:
            with open(path, encoding="utf-8") as fh:
                text = fh.read()
        else:
            text = importlib.resources.files("irmtool.data").joinpath(
                "pos_lexicon.txt").read_text("utf-8")
        entries: Dict[str, List[str]] = {}
        for line in text.splitlines():
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            word, _, tags = line.partition("\t")
            entries[word.strip().lower()] = [t.strip() for t in tags.split(",") if t.strip()]
        return cls(entries)

    def candidates(self, word: str, sentence_initial: bool) -> List[str]:
        lower = word.lower()
        if lower in self.entries:
            return list(self.entries[lower])
        if word == "%":
            return ["NN"]
        if re.fullmatch(r"\d+(\.\d+)?", word):
            return ["CD"]
        if word in _ABBREV or lower in _ABBREV:
            return ["FW"]
        if re.fullmatch(r"[(),;:.]", word):
            return [word if word in "(),." else ":" if word == ":" else word]
        if word.isupper() and len(word) >= 2:
            return ["NNP"]
        if lower.endswith("ly"):
            return ["RB"]
        # inflection of a known base?
        derived = self._derived(lower)
        if derived:
            return derived
        # hyphenated compounds behave like their final segment
        if "-" in lower:
            tail = lower.rsplit("-", 1)[1]
            if tail:
                return self.candidates(tail, sentence_initial)
        if word[0].isupper() and not sentence_initial:
            return ["NNP"]
        # unknown capitalized sentence-initial words default to NN
        return ["NN"]

    def _derived(self, lower: str) -> Optional[List[str]]:
        out: List[str] = []
        for base in _plural_bases(lower):
            tags = self.entries.get(base)
            if tags:
                if any(t in _NOUN_TAGS for t in tags):
                    out.append("NNS")
                if "VB" in tags:
                    out.append("VBZ")
                break
        if lower.endswith("ing"):
            for base in (lower[:-3], lower[:-3] + "e", lower[:-4] if len(lower) > 4 and lower[-4] == lower[-5] else None):
                if base and "VB" in self.entries.get(base, []):
                    return out + ["VBG"]
            if not out:
                return ["VBG", "NN"]
        if lower.endswith("ed"):
            for base in (lower[:-1], lower[:-2], lower[:-3] if len(lower) > 3 and lower[-3] == lower[-4] else None):
                if base and "VB" in self.entries.get(base, []):
                    return out + ["VBN", "VBD"]
            if not out:
                return ["VBN"]
        return out or None


def _plural_bases(word: str):
    if word.endswith("ies") and len(word) > 3:
        yield word[:-3] + "y"
    if word.endswith("es") and len(word) > 2:
        yield word[:-2]
    if word.endswith("s") and not word.endswith("ss"):
        yield word[:-1]


def singularize(word: str) -> str:
    lower = word.lower()
    if lower.endswith("ies") and len(lower) > 3:
        return lower[:-3] + "y"
    if re.search(r"(ses|xes|zes|ches|shes)$", lower):
        return lower[:-2]
    if lower.endswith("ss") or not lower.endswith("s"):
        return lower
    return lower[:-1]


def lemma_of(word: str, tag: str) -> str:
    lower = word.lower()
    if lower in _IRREGULAR_LEMMAS and tag in _VERB_TAGS | {"MD"}:
        return _IRREGULAR_LEMMAS[lower]
    if tag in ("NNS", "NNPS"):
        return singularize(lower)
    if tag == "VBZ":
        return singularize(lower)
    if tag in ("VBD", "VBN"):
        if lower.endswith("ed"):
            base = lower[:-1]          # exchanged -> exchange
            if base.endswith("e"):
                return base
            base = lower[:-2]          # monitored -> monitor
            if len(base) > 2 and base[-1] == base[-2]:
                return base[:-1]       # planned -> plan
            return base
        return lower
    if tag == "VBG" and lower.endswith("ing"):
        base = lower[:-3]              # picking -> pick
        if len(base) > 2 and base[-1] == base[-2] and base[-1] not in "lsr":
            return base[:-1]           # running -> run
        return base
    return lower


# ---------------------------------------------------------------------------
# parser

_SCONJ = {"when", "if", "while", "whether", "because", "since", "although",
          "unless", "until"}
_MWE_PREPS = [("in", "terms", "of")]
_MWE_MARKERS = [("in", "order", "to")]
_NP_INNER = {"DT", "PRP$", "JJ", "JJR", "JJS", "CD", "PDT"}


class _Analysis:
    """Mutable working state while attaching one sentence."""

    def __init__(self, words, tags, spans, text, sentence_id):
        self.words: List[str] = words
        self.tags: List[str] = tags
        self.spans = spans
        self.text = text
        self.sentence_id = sentence_id
        n = len(words)
        self.head = [None] * n          # type: List[Optional[int]]
        self.rel = [None] * n           # type: List[Optional[str]]
        self.paren = [0] * n            # paren group id, 0 = top level
        self.clause = [0] * n           # clause id within its paren group
        self.np_head_at: List[Optional[int]] = [None] * n  # index of covering NP's head
        self.np_heads: List[int] = []
        self.mwe: Set[int] = set()

    # positions are 0-based internally; edges are emitted 1-based.

    def attach(self, head: int, dep: int, rel: str, force: bool = False):
        if dep == head:
            return
        if self.head[dep] is None or force:
            self.head[dep] = head
            self.rel[dep] = rel

    def attached(self, i: int) -> bool:
        return self.head[i] is not None

    def noun(self, i: int) -> bool:
        return self.tags[i] in _NOUN_TAGS

    def verb(self, i: int) -> bool:
        return self.tags[i] in _VERB_TAGS

    def context(self, i: int) -> Tuple[int, int]:
        return (self.paren[i], self.clause[i])


def shallow_parse(text: str, sentence_id: str = "s1", base: int = 0,
                  lexicon: Optional[PosLexicon] = None) -> SentenceGraph:
    """Parse one sentence into a dependency tree.

    Raises UnparsableSentence when no main verb can be identified.
    """
    lexicon = lexicon or _default_lexicon()
    pieces = tokenize(text, base)
    if not pieces:
        raise UnparsableSentence(text)
    words = [w for w, _ in pieces]
    spans = [s for _, s in pieces]
    tags = _tag(words, lexicon)
    a = _Analysis(words, tags, spans, text, sentence_id)

    _mark_parens(a)
    _mark_mwes(a)
    _mark_clauses(a)
    _chunk_nps(a)
    verbs = _verb_positions(a)
    root = _pick_root(a, verbs)
    if root is None:
        raise UnparsableSentence(text)
    _attach_verb_chains(a, verbs, root)
    _attach_preps(a, root)
    _attach_parens_and_appos(a, root)
    _attach_subjects(a, verbs, root)
    _attach_objects(a, verbs)
    _sweep_leftovers(a, root)

    tokens = [Token(index=i + 1, text=w, lemma=lemma_of(w, tags[i]), pos=tags[i],
                    char_span=spans[i]) for i, w in enumerate(words)]
    edges = [DependencyEdge(0, root + 1, "root")]
    for i in range(len(words)):
        if i == root:
            continue
        edges.append(DependencyEdge(a.head[i] + 1, i + 1, a.rel[i]))
    graph = SentenceGraph(sentence_id=sentence_id, text=text, tokens=tokens, edges=edges)
    graph.validate_tree()
    return graph


_LEXICON_CACHE: Optional[PosLexicon] = None


def _default_lexicon() -> PosLexicon:
    global _LEXICON_CACHE
    if _LEXICON_CACHE is None:
        _LEXICON_CACHE = PosLexicon.load()
    return _LEXICON_CACHE


def _tag(words: Sequence[str], lexicon: PosLexicon) -> List[str]:
    tags: List[str] = []
    seen_finite = False
    any_finite_possible = any(
        set(lexicon.candidates(w, i == 0)) & _FINITE_TAGS
        for i, w in enumerate(words))
    for i, word in enumerate(words):
        cands = lexicon.candidates(word, i == 0)
        tag = cands[0]
        if len(cands) > 1:
            prev = _prev_content_tag(tags)
            if prev == "TO" and "VB" in cands:
                tag = "VB"
            elif prev == "MD" and "VB" in cands:
                tag = "VB"
            elif not seen_finite and prev in _NOUN_TAGS | {"PRP"} and \
                    ("VBZ" in cands or "VBP" in cands or "VB" in cands):
                # "every car needs", "Cars park": finite verb after subject
                tag = "VBZ" if "VBZ" in cands else ("VBP" if "VBP" in cands else "VBP")
            elif prev == "CC" and "VB" in cands and any(t in _VERB_TAGS for t in tags):
                tag = "VB"
            elif prev in {"DT", "PRP$", "JJ", "JJR", "CD", "NN", "NNS", "NNP", "IN", "POS"} and \
                    any(t in _NOUN_TAGS for t in cands):
                tag = next(t for t in cands if t in _NOUN_TAGS)
        if not seen_finite and tag == "VB" and not any_finite_possible and \
                all(t in {"RB", ",", "FW"} for t in tags):
            pass  # sentence-initial imperative, keep VB
        if tag in _FINITE_TAGS:
            seen_finite = True
        tags.append(tag)
    return tags


def _prev_content_tag(tags: List[str]) -> Optional[str]:
    for t in reversed(tags):
        if t not in {"RB", ","}:
            return t
    return None


def _mark_parens(a: _Analysis):
    group = 0
    stack = []
    for i, w in enumerate(a.words):
        if w == "(":
            group += 1
            stack.append(group)
            a.paren[i] = stack[-1]
        elif w == ")":
            a.paren[i] = stack[-1] if stack else 0
            if stack:
                stack.pop()
        else:
            a.paren[i] = stack[-1] if stack else 0


def _mark_mwes(a: _Analysis):
    lowered = [w.lower() for w in a.words]
    a.mwe_start = {}
    for pattern in _MWE_PREPS + _MWE_MARKERS:
        k = len(pattern)
        for i in range(len(lowered) - k + 1):
            if tuple(lowered[i:i + k]) == pattern:
                for j in range(i + 1, i + k):
                    a.mwe.add(j)
                    a.mwe_start[j] = i


def _mark_clauses(a: _Analysis):
    """Clause ids per paren group: 0 is the matrix clause, each subordinate
    or relative clause gets a fresh id running to the next same-level comma
    (or to the end of its paren group)."""
    counter = 0
    n = len(a.words)
    for i in range(n):
        w = a.words[i].lower()
        p = a.paren[i]
        starts_clause = (w in _SCONJ and a.tags[i] == "IN" and i not in a.mwe) or \
                        (a.tags[i] == "WDT")
        if not starts_clause:
            continue
        counter += 1
        enclosing = a.clause[i]
        end = n
        for j in range(i + 1, n):
            if a.paren[j] != p:
                if a.paren[j] < p:
                    end = j
                    break
                continue
            if a.words[j] in {",", ")"}:
                end = j
                break
        for j in range(i, end):
            # nested clauses overwrite their enclosing clause's id
            if a.paren[j] == p and a.clause[j] == enclosing:
                a.clause[j] = counter


def _chunk_nps(a: _Analysis):
    n = len(a.words)
    i = 0
    while i < n:
        tag = a.tags[i]
        if tag in _NP_INNER or tag in _NOUN_TAGS or \
                (tag == "RB" and i + 1 < n and a.tags[i + 1] in {"JJ", "JJR"}):
            start = i
            j = i
            nouns = []
            while j < n and (a.tags[j] in _NP_INNER or a.tags[j] in _NOUN_TAGS or
                             (a.tags[j] == "RB" and j + 1 < n and a.tags[j + 1] in {"JJ", "JJR"})):
                if a.paren[j] != a.paren[start] or a.clause[j] != a.clause[start]:
                    break
                if a.tags[j] in _NOUN_TAGS:
                    nouns.append(j)
                j += 1
            if nouns:
                head = nouns[-1]
                a.np_heads.append(head)
                for k in range(start, j):
                    a.np_head_at[k] = head
                    if k == head:
                        continue
                    t = a.tags[k]
                    if t == "DT":
                        a.attach(head, k, "det")
                    elif t == "PDT":
                        a.attach(head, k, "predet")
                    elif t == "PRP$":
                        a.attach(head, k, "poss")
                    elif t in {"JJ", "JJR", "JJS"}:
                        a.attach(head, k, "amod")
                    elif t == "CD":
                        a.attach(head, k, "num")
                    elif t == "RB":
                        a.attach(head, k, "advmod")
                    elif t in _NOUN_TAGS:
                        a.attach(head, k, "nn")
                i = j
                continue
            i = j if j > i else i + 1
            continue
        i += 1


def _verb_positions(a: _Analysis) -> List[int]:
    return [i for i in range(len(a.words)) if a.verb(i) or a.tags[i] == "MD"]


def _pick_root(a: _Analysis, verbs: List[int]) -> Optional[int]:
    def content_of(i: int) -> int:
        # modal or finite auxiliary: the lexical verb it introduces
        if a.tags[i] == "MD":
            for j in range(i + 1, len(a.words)):
                if a.context(j) != a.context(i):
                    break
                if a.verb(j):
                    return j
            return i if a.verb(i) else -1
        return i

    for i in verbs:
        if a.context(i) == (0, 0) and a.tags[i] in _FINITE_TAGS:
            c = content_of(i)
            if c >= 0:
                return c
    for i in verbs:
        if a.context(i) == (0, 0) and a.tags[i] in {"VB", "VBN"} and i not in a.mwe:
            return i
    return None


def _clause_verb(a: _Analysis, ctx: Tuple[int, int], verbs: List[int]) -> Optional[int]:
    finite = None
    first = None
    for i in verbs:
        if a.context(i) != ctx:
            continue
        if first is None and a.tags[i] != "MD":
            first = i
        if a.tags[i] in _FINITE_TAGS:
            # prefer the lexical verb of a passive/modal group; an
            # infinitival "to" ends the group ("is possible to follow")
            for j in range(i + 1, len(a.words)):
                if a.context(j) != ctx:
                    break
                if a.verb(j) and a.tags[j] in {"VB", "VBN"}:
                    return j
                if a.tags[j] in {"JJ", "JJR", "RB"}:
                    continue
                break
            return i if a.tags[i] != "MD" else first
    return first


def _attach_verb_chains(a: _Analysis, verbs: List[int], root: int):
    n = len(a.words)
    contexts: Dict[Tuple[int, int], int] = {(0, 0): root}

    # clause roots: subordinate, relative and parenthetical clause heads
    for ctx in sorted({a.context(i) for i in range(n)} - {(0, 0)}):
        cv = _clause_verb(a, ctx, verbs)
        if cv is not None:
            contexts[ctx] = cv
    a.clause_verbs = contexts  # type: ignore[attr-defined]

    for ctx, cv in contexts.items():
        # auxiliaries, passives, negation around the clause verb
        for j in range(cv - 1, -1, -1):
            if a.context(j) != ctx:
                break
            t = a.tags[j]
            w = a.words[j].lower()
            if t == "MD":
                a.attach(cv, j, "aux")
            elif t == "TO":
                a.attach(cv, j, "aux")
            elif w in {"be", "been", "being", "is", "are", "was", "were", "am"} and a.tags[cv] == "VBN":
                a.attach(cv, j, "auxpass")
            elif w in {"is", "are", "was", "were", "has", "have", "had"} and a.verb(cv) and j in _finite_aux_span(a, j, cv):
                a.attach(cv, j, "aux")
            elif w == "not":
                a.attach(cv, j, "neg")
            elif t == "RB":
                a.attach(cv, j, "advmod")
            elif t in {",", "FW"} or w == "(":
                continue
            else:
                break

    # infinitives, gerund complements, coordination
    last_verb_by_ctx: Dict[Tuple[int, int], int] = dict(contexts)
    for i in sorted(verbs):
        ctx = a.context(i)
        if a.tags[i] == "MD" or a.attached(i) or i == contexts.get(ctx):
            continue
        prev_verb = None
        for j in range(i - 1, -1, -1):
            if a.context(j) == ctx and (a.verb(j) or a.tags[j] == "MD") and j not in a.mwe:
                prev_verb = j
                break
        before = _prev_real(a, i)
        if before is not None and a.tags[before] == "TO":
            governor_pos = _prev_real(a, before)
            a.attach(i, before, "aux", force=True)
            if governor_pos is not None and a.noun(governor_pos):
                a.attach(a.np_head_at[governor_pos] or governor_pos, i, "vmod")
            elif prev_verb is not None:
                a.attach(prev_verb, i, "xcomp")
            elif ctx in contexts:
                a.attach(contexts[ctx], i, "xcomp")
            continue
        if a.tags[i] == "VBG" and prev_verb is not None:
            a.attach(prev_verb, i, "xcomp")
            continue
        if before is not None and a.tags[before] == "CC" and prev_verb is not None:
            a.attach(prev_verb, i, "conj")
            a.attach(prev_verb, before, "cc")
            continue
        if a.tags[i] == "VBN":
            # reduced relative: "the distance left to cover", "trip based on"
            if before is not None and a.noun(before):
                a.attach(a.np_head_at[before] or before, i, "partmod")
                continue
            # "has to be exchanged": the participle takes over the chain
            # position of its "be" and the copula becomes auxpass
            if before is not None and lemma_of(a.words[before], a.tags[before]) == "be":
                if a.attached(before):
                    a.attach(a.head[before], i, a.rel[before], force=True)
                a.attach(i, before, "auxpass", force=True)
                if contexts.get(ctx) == before:
                    contexts[ctx] = i
                continue
        if prev_verb is not None and not a.attached(i):
            a.attach(prev_verb, i, "dep")

    # hook clause verbs into their matrix clause
    for ctx, cv in contexts.items():
        if ctx == (0, 0) or a.attached(cv):
            continue
        intro = _clause_intro(a, ctx)
        host = _host_for_clause(a, ctx, contexts, root)
        if intro is not None and a.tags[intro] == "WDT":
            np = _np_before(a, intro)
            if np is not None:
                passive = any(a.rel[k] == "auxpass" and a.head[k] == cv
                              for k in range(len(a.words)))
                a.attach(np, cv, "rcmod")
                a.attach(cv, intro, "nsubjpass" if passive else "nsubj")
                continue
        if intro is not None:
            a.attach(cv, intro, "mark")
            if a.words[intro].lower() == "whether":
                a.attach(host, cv, "ccomp")
            else:
                a.attach(host, cv, "advcl")
        else:
            a.attach(host, cv, "parataxis")


def _finite_aux_span(a, j, cv):
    # helper: "has to be exchanged" keeps has as root elsewhere; only treat
    # the verb directly before cv as aux when nothing but particles intervene
    for k in range(j + 1, cv):
        if a.tags[k] not in {"TO", "RB", "VB"} and a.words[k].lower() not in {"be"}:
            return set()
    return {j}


def _clause_intro(a: _Analysis, ctx) -> Optional[int]:
    for i in range(len(a.words)):
        if a.context(i) == ctx:
            w = a.words[i].lower()
            if (w in _SCONJ and a.tags[i] == "IN") or a.tags[i] == "WDT":
                return i
            return None
    return None


def _host_for_clause(a: _Analysis, ctx, contexts, root) -> int:
    paren, clause = ctx
    if paren != 0 and (paren, 0) in contexts and ctx != (paren, 0):
        return contexts[(paren, 0)]
    return root


def _np_before(a: _Analysis, i: int) -> Optional[int]:
    j = i - 1
    while j >= 0:
        if a.words[j] in {",", "(", ")"} or a.tags[j] in {"FW", "RB"}:
            j -= 1
            continue
        if a.noun(j):
            return a.np_head_at[j] or j
        # hop over a noun's trailing modifier verb: "a plan to follow, which"
        if a.verb(j) and a.head[j] is not None and a.rel[j] in {"vmod", "partmod"}:
            j = a.head[j]
            continue
        if a.tags[j] == "TO" and j > 0:
            j -= 1
            continue
        return None
    return None


def _prev_real(a: _Analysis, i: int) -> Optional[int]:
    for j in range(i - 1, -1, -1):
        if a.tags[j] in {"RB", ",", "FW"} or a.words[j] in {"(", ")"}:
            continue
        return j
    return None


def _attach_preps(a: _Analysis, root: int):
    contexts = getattr(a, "clause_verbs", {(0, 0): root})
    n = len(a.words)
    last_prep_head: Dict[Tuple[int, int], int] = {}
    for i in range(n):
        if i in a.mwe or a.attached(i):
            continue
        is_prep = (a.tags[i] == "IN" and a.words[i].lower() not in _SCONJ) or \
                  (a.tags[i] == "TO" and not _to_is_infinitival(a, i))
        if not is_prep:
            continue
        ctx = a.context(i)
        # find what the phrase modifies
        governor = None
        j = i - 1
        while j >= 0:
            if a.tags[j] in {",", "FW"} or a.words[j] in {"(", ")"}:
                j -= 1
                continue
            if a.tags[j] == "CC":
                prior = last_prep_head.get(ctx)
                if prior is not None:
                    governor = prior
                    a.attach(prior, j, "cc")
                break
            if a.noun(j):
                governor = a.np_head_at[j] or j
            elif a.verb(j):
                governor = j
            break
        if governor is None:
            cv = contexts.get(ctx)
            if cv is None:
                cv = contexts.get((a.paren[i], 0), root)
            governor = cv
        a.attach(governor, i, "prep")
        if a.verb(governor) or a.tags[governor] == "MD":
            last_prep_head[ctx] = governor
        # its object: next NP head (or nominal) to the right
        for k in range(i + 1, n):
            if a.words[k] in {")",}:
                break
            if k in a.mwe:
                continue
            if a.noun(k):
                head = a.np_head_at[k] or k
                if not a.attached(head):
                    a.attach(i, head, "pobj")
                break
            if a.tags[k] in {"DT", "PRP$", "JJ", "JJR", "JJS", "CD", "RB"}:
                continue
            if a.tags[k] == "PRP":
                a.attach(i, k, "pobj")
                break
            break


def _to_is_infinitival(a: _Analysis, i: int) -> bool:
    for j in range(i + 1, len(a.words)):
        if a.tags[j] == "RB":
            continue
        return a.verb(j)
    return False


def _attach_parens_and_appos(a: _Analysis, root: int):
    n = len(a.words)
    contexts = getattr(a, "clause_verbs", {})
    i = 0
    while i < n:
        if a.words[i] != "(":
            i += 1
            continue
        group = a.paren[i]
        inner = [j for j in range(i + 1, n) if a.paren[j] == group and a.words[j] not in {"(", ")"}]
        close = next((j for j in range(i + 1, n) if a.words[j] == ")" and a.paren[j] == group), None)
        content = [j for j in inner if a.tags[j] not in {",", "FW", "."}]
        target = _np_before(a, i)
        target = _of_chain_top(a, target) if target is not None else None
        if content and all(a.np_head_at[j] is not None or a.tags[j] in _NP_INNER for j in content):
            heads = sorted({a.np_head_at[j] for j in content if a.np_head_at[j] is not None})
            if len(heads) == 1 and target is not None:
                a.attach(target, heads[0], "appos")
        else:
            cv = contexts.get((group, 0))
            if cv is not None and not a.attached(cv):
                host = target if target is not None else root
                a.attach(host, cv, "parataxis")
        for j in inner:
            if a.tags[j] == "FW" and not a.attached(j):
                anchor = contexts.get((group, 0))
                a.attach(anchor if anchor is not None else (target or root), j, "dep")
        i += 1


def _of_chain_top(a: _Analysis, head: Optional[int]) -> Optional[int]:
    # "its place of interest (POI)": the appositive renames "place"
    current = head
    while current is not None and a.head[current] is not None and a.rel[current] == "pobj":
        prep = a.head[current]
        if a.words[prep].lower() != "of":
            break
        gov = a.head[prep]
        if gov is not None and a.noun(gov):
            current = gov
            continue
        break
    return current


def _attach_subjects(a: _Analysis, verbs: List[int], root: int):
    contexts = getattr(a, "clause_verbs", {(0, 0): root})
    for ctx, cv in contexts.items():
        if cv is None:
            continue
        # subject sits left of the finite element of the verb group
        finite = cv
        for j in range(cv - 1, -1, -1):
            if a.context(j) != ctx:
                break
            if a.tags[j] in _FINITE_TAGS or a.tags[j] == "TO":
                finite = j
            elif a.tags[j] not in {"RB", "VB", "VBN"} and a.words[j].lower() not in {"be"}:
                break
        passive = any(a.rel[k] == "auxpass" and a.head[k] == cv for k in range(len(a.words)))
        subj_rel = "nsubjpass" if passive else "nsubj"
        j = finite - 1
        while j >= 0:
            if a.context(j) != ctx or a.words[j] in {"(", ")"} or \
                    a.tags[j] in {",", "FW", "RB", ":", "DT"}:
                j -= 1
                continue
            if a.noun(j):
                head = a.np_head_at[j] or j
                if not a.attached(head):
                    a.attach(cv, head, subj_rel)
                    break
                if a.rel[head] == "pobj":
                    # hop past the PP: "The information regarding the
                    # availability of the parking slots has to ..."
                    j = a.head[head] - 1
                    continue
                break
            if a.tags[j] in {"PRP", "EX", "WDT"}:
                if not a.attached(j):
                    a.attach(cv, j, subj_rel)
                break
            if a.verb(j) or a.tags[j] in {"IN", "TO", "MD", "CC", "."}:
                break
            j -= 1
    # imperative root has no subject; nothing to do


def _attach_objects(a: _Analysis, verbs: List[int]):
    n = len(a.words)
    copulas = {"be"}
    for v in sorted(verbs):
        if a.tags[v] == "MD":
            continue
        lemma = lemma_of(a.words[v], a.tags[v])
        for k in range(v + 1, n):
            if a.context(k) != a.context(v):
                break
            t = a.tags[k]
            if t in {"RB", ","} or a.words[k] in {"(", ")"}:
                continue
            if t in {"DT", "PRP$", "JJ", "JJR", "JJS", "CD"} or t in _NOUN_TAGS:
                if t in {"JJ", "JJR"} and lemma in copulas:
                    if not a.attached(k):
                        a.attach(v, k, "acomp")
                    break
                head = a.np_head_at[k]
                if head is None:
                    if t in _NOUN_TAGS:
                        head = k
                    else:
                        continue
                if not a.attached(head):
                    a.attach(v, head, "dobj")
                break
            if t == "PRP" and not a.attached(k):
                a.attach(v, k, "dobj")
                break
            break


def _sweep_leftovers(a: _Analysis, root: int):
    contexts = getattr(a, "clause_verbs", {})
    for i in range(len(a.words)):
        if i == root or a.attached(i):
            continue
        anchor = contexts.get(a.context(i), root)
        if anchor is None or anchor == i:
            anchor = root
        if i in getattr(a, "mwe_start", {}):
            a.attach(a.mwe_start[i], i, "mwe")
        elif a.tags[i] in {",", ".", ":", "(", ")"} or a.words[i] in {"(", ")", ";", ":"}:
            a.attach(root, i, "punct")
        elif a.tags[i] == "RB":
            # adverb near a verb it missed, staying in its own clause
            target = anchor
            for j in range(i + 1, len(a.words)):
                if a.verb(j) and a.context(j) == a.context(i):
                    target = j
                    break
            a.attach(target, i, "advmod")
        elif a.tags[i] == "CC":
            a.attach(anchor, i, "cc")
        else:
            a.attach(anchor if anchor != i else root, i, "dep")
