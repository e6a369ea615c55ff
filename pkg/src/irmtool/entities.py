"""Component/attribute candidate extraction and alias resolution.

Candidates are normalized noun phrases filling subject/object roles.
Kind hints come from four ordered rules:
  R1  subject of an active modal/obligation verb group -> component
  R2  object-role phrase possessed via "its"/"their" whose resolved
      possessor is a component-hinted phrase -> attribute of it
  R3  direct object of monitor/assess/update/exchange -> attribute
  R4  otherwise unknown
Clusters merge automatically on apposition evidence and pend on
string-distance evidence; a decision journal confirms, rejects, merges
manually and may override the canonical name.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Set, Tuple

from .errors import IrmError, UnresolvedDecision
from .sentences import SentenceGraph
from .strings import jaro_winkler

ROLE_RELATIONS = ("nsubj", "dobj", "iobj", "pobj", "appos")
NOUN_TAGS = {"NN", "NNS", "NNP", "NNPS"}
VERB_TAGS = {"VB", "VBZ", "VBP", "VBD", "VBN", "VBG", "MD"}

DETERMINERS = {"every", "the", "a", "an", "this", "that", "these", "those",
               "each", "any", "some", "all", "no", "such", "its", "their"}
# non-restrictive modifiers that do not individuate an entity
STOP_ADJECTIVES = {"different", "existing", "main", "appropriate", "same",
                   "available", "up-to-date", "adequate", "additional"}
MEASURE_NOUNS = {"second", "minute", "hour", "day", "km", "kilometer",
                 "kilometre", "meter", "metre", "mile", "percent", "%"}
OBLIGATION_LEMMAS = {"need", "have"}
OBLIGATION_MODALS = {"should", "must", "shall"}
R3_VERBS = {"monitor", "assess", "update", "exchange"}

COMPONENT = "component"
ATTRIBUTE = "attribute"
UNKNOWN = "unknown"


@dataclass
class Mention:
    sentence_id: str
    head_index: int
    span: Tuple[int, int]          # first..last token index, inclusive
    role: str
    surface: str

    def as_dict(self):
        return {"sentence_id": self.sentence_id, "head_index": self.head_index,
                "span": list(self.span), "role": self.role, "surface": self.surface}


@dataclass
class EntityCandidate:
    phrase: str
    head_lemma: str
    mentions: List[Mention] = field(default_factory=list)
    kind_hint: str = UNKNOWN
    owner_votes: List[str] = field(default_factory=list)   # possessor phrases

    def as_dict(self):
        return {"phrase": self.phrase, "head_lemma": self.head_lemma,
                "kind_hint": self.kind_hint, "owner_votes": list(self.owner_votes),
                "mentions": [m.as_dict() for m in self.mentions]}


@dataclass
class AliasCluster:
    canonical: str
    members: List[str]
    evidence: List[dict] = field(default_factory=list)
    status: str = "auto"           # auto | pending_review | confirmed | rejected


@dataclass
class CatalogAttribute:
    name: str                      # display name, e.g. "energy level"
    ident: str                     # signature identifier, e.g. "energy"
    cluster: AliasCluster = None
    mentions: List[Mention] = field(default_factory=list)


@dataclass
class CatalogComponent:
    name: str                      # display name, e.g. "E-Car"
    cluster: AliasCluster = None
    attributes: List[CatalogAttribute] = field(default_factory=list)


@dataclass
class ComponentCatalog:
    components: List[CatalogComponent] = field(default_factory=list)
    dropped: List[EntityCandidate] = field(default_factory=list)

    def component_names(self) -> List[str]:
        return [c.name for c in self.components]

    def component_of_phrase(self, phrase: str) -> Optional[CatalogComponent]:
        for c in self.components:
            if phrase in c.cluster.members:
                return c
        return None

    def attribute_of_phrase(self, phrase: str):
        for c in self.components:
            for a in c.attributes:
                if phrase in a.cluster.members:
                    return c, a
        return None

    def attribute(self, component: str, ident: str) -> Optional[CatalogAttribute]:
        for c in self.components:
            if c.name == component:
                for a in c.attributes:
                    if a.ident == ident:
                        return a
        return None


# ---------------------------------------------------------------------------
# phrase normalization

def np_span(graph: SentenceGraph, head: int) -> Tuple[int, int]:
    """Contiguous modifier block left of the head, plus a bare of-PP."""
    first = head
    for e in graph.edges:
        if e.head == head and e.dependent < head and \
                e.relation in {"det", "poss", "amod", "nn", "num", "predet", "advmod"}:
            first = min(first, e.dependent)
    last = _of_extension_end(graph, head)
    return (first, last)


def _of_extension_end(graph: SentenceGraph, head: int) -> int:
    inner = _of_extension(graph, head)
    if inner is None:
        return head
    return _of_extension_end(graph, inner)


def _of_extension(graph: SentenceGraph, head: int) -> Optional[int]:
    """Returns the inner head of a bare "of X" attached to this head."""
    for e in graph.edges:
        if e.head == head and e.relation == "prep" and \
                graph.token(e.dependent).lemma == "of":
            for e2 in graph.edges:
                if e2.head == e.dependent and e2.relation == "pobj":
                    inner = e2.dependent
                    # only extend over a bare NP: no determiner, no numeral
                    for e3 in graph.edges:
                        if e3.head == inner and e3.relation in {"det", "poss", "num"}:
                            return None
                    if graph.token(inner).pos in NOUN_TAGS:
                        return inner
    return None


def normalize_phrase(graph: SentenceGraph, head: int) -> str:
    parts = _phrase_parts(graph, head)
    inner = _of_extension(graph, head)
    while inner is not None:
        parts = parts + ["of"] + _phrase_parts(graph, inner)
        inner = _of_extension(graph, inner)
    return " ".join(parts)


def _phrase_parts(graph: SentenceGraph, head: int) -> List[str]:
    mods = []
    for e in graph.edges:
        if e.head == head and e.dependent < head and e.relation in {"amod", "nn"}:
            mods.append(e.dependent)
    parts = []
    for idx in sorted(mods):
        tok = graph.token(idx)
        word = _fold(tok.text)
        if word in STOP_ADJECTIVES or word in DETERMINERS:
            continue
        parts.append(word)
    head_tok = graph.token(head)
    parts.append(_fold(head_tok.text) if head_tok.text.isupper() and len(head_tok.text) > 1
                 else head_tok.lemma)
    return parts


def _fold(word: str) -> str:
    # acronyms keep their capitals ("POI"); everything else lowercases
    if word.isupper() and len(word) > 1:
        return word
    return word.lower()


def match_key(phrase: str) -> str:
    """Comparison form for string-distance matching: hyphens dropped."""
    return phrase.lower().replace("-", "")


# ---------------------------------------------------------------------------
# extraction

def extract_candidates(graphs: Dict[str, SentenceGraph],
                       order: Optional[Sequence[str]] = None) -> List[EntityCandidate]:
    by_phrase: Dict[str, EntityCandidate] = {}
    for sid in order if order is not None else sorted(graphs):
        g = graphs[sid]
        for e in sorted(g.edges, key=lambda e: e.dependent):
            if e.relation not in ROLE_RELATIONS:
                continue
            head = e.dependent
            tok = g.token(head)
            if tok.pos not in NOUN_TAGS:
                continue
            if tok.lemma in MEASURE_NOUNS:
                continue
            phrase = normalize_phrase(g, head)
            if not phrase:
                continue
            span = np_span(g, head)
            surface = " ".join(g.token(i).text for i in range(span[0], span[1] + 1))
            cand = by_phrase.get(phrase)
            if cand is None:
                cand = by_phrase[phrase] = EntityCandidate(
                    phrase=phrase, head_lemma=tok.lemma)
            cand.mentions.append(Mention(sid, head, span, e.relation, surface))
    return list(by_phrase.values())


def hint_kinds(cands: List[EntityCandidate],
               graphs: Dict[str, SentenceGraph]) -> List[EntityCandidate]:
    components: Set[str] = set()
    # R1 pass
    for cand in cands:
        for m in cand.mentions:
            if m.role == "nsubj" and _is_obligation_subject(graphs[m.sentence_id], m.head_index):
                cand.kind_hint = COMPONENT
                components.add(cand.phrase)
                break
    # R2/R3 pass
    for cand in cands:
        if cand.kind_hint == COMPONENT:
            continue
        for m in cand.mentions:
            g = graphs[m.sentence_id]
            if m.role in {"dobj", "iobj", "pobj", "appos"} and _possessed(g, m.head_index):
                owner = _resolve_possessor(g, m.head_index, cands)
                if owner is not None and owner in components:
                    cand.kind_hint = ATTRIBUTE
                    cand.owner_votes.append(owner)
                    continue
            if m.role == "dobj":
                governor = g.head_of(m.head_index)
                if governor and governor.head and \
                        g.token(governor.head).lemma in R3_VERBS:
                    cand.kind_hint = ATTRIBUTE
    return cands


def _is_obligation_subject(g: SentenceGraph, subject: int) -> bool:
    edge = g.head_of(subject)
    if edge is None or edge.head == 0:
        return False
    verb = edge.head
    lemma = g.token(verb).lemma
    modal = any(e.head == verb and e.relation == "aux" and
                g.token(e.dependent).pos == "MD" and
                g.token(e.dependent).lemma in OBLIGATION_MODALS for e in g.edges)
    obligation = lemma in OBLIGATION_LEMMAS and any(
        e.head == verb and e.relation == "xcomp" for e in g.edges)
    if not (modal or obligation):
        return False
    # passive complements make the subject a patient, not an acting component
    for e in g.edges:
        if e.head == verb and e.relation in {"xcomp", "conj"}:
            if any(e2.head == e.dependent and e2.relation == "auxpass" for e2 in g.edges):
                return False
    return not any(e.head == verb and e.relation == "auxpass" for e in g.edges)


def _possessed(g: SentenceGraph, head: int) -> bool:
    return any(e.head == head and e.relation == "poss" for e in g.edges)


def _resolve_possessor(g: SentenceGraph, head: int,
                       cands: List[EntityCandidate]) -> Optional[str]:
    """Subject of the possessed phrase's clause; pronoun subjects re-resolve
    to the nearest preceding non-pronoun subject mention."""
    verb = _verb_ancestor(g, head)
    while verb is not None:
        subj = _subject_of(g, verb)
        if subj is not None:
            tok = g.token(subj)
            if tok.pos in {"PRP"}:
                prior = _nearest_prior_subject(g, subj, cands)
                return prior
            if tok.pos == "WDT":
                governor = g.head_of(verb)
                if governor and governor.head and g.token(governor.head).pos in NOUN_TAGS:
                    return _phrase_of_mention(g, governor.head, cands)
                return None
            if tok.pos in NOUN_TAGS:
                return _phrase_of_mention(g, subj, cands)
            return None
        up = g.head_of(verb)
        verb = up.head if up and up.head != 0 else None
        while verb is not None and g.token(verb).pos not in VERB_TAGS:
            up = g.head_of(verb)
            verb = up.head if up and up.head != 0 else None
    return None


def _verb_ancestor(g: SentenceGraph, index: int) -> Optional[int]:
    edge = g.head_of(index)
    while edge is not None and edge.head != 0:
        if g.token(edge.head).pos in VERB_TAGS:
            return edge.head
        edge = g.head_of(edge.head)
    return None


def _subject_of(g: SentenceGraph, verb: int) -> Optional[int]:
    for e in g.edges:
        if e.head == verb and e.relation in {"nsubj", "nsubjpass"}:
            return e.dependent
    return None


def _nearest_prior_subject(g, pronoun: int, cands) -> Optional[str]:
    best = None
    for e in g.edges:
        if e.relation in {"nsubj", "nsubjpass"} and e.dependent < pronoun and \
                g.token(e.dependent).pos in NOUN_TAGS:
            if best is None or e.dependent > best:
                best = e.dependent
    return _phrase_of_mention(g, best, cands) if best is not None else None


def _phrase_of_mention(g: SentenceGraph, head: int, cands) -> Optional[str]:
    phrase = normalize_phrase(g, head)
    for cand in cands:
        if cand.phrase == phrase:
            return phrase
    return phrase or None


def detect_appositions(graphs: Dict[str, SentenceGraph],
                       order: Optional[Sequence[str]] = None) -> List[Tuple[str, str]]:
    pairs = []
    for sid in order if order is not None else sorted(graphs):
        g = graphs[sid]
        for e in g.edges:
            if e.relation != "appos" or e.head == 0:
                continue
            if g.token(e.head).pos not in NOUN_TAGS or g.token(e.dependent).pos not in NOUN_TAGS:
                continue
            pairs.append((normalize_phrase(g, e.head), normalize_phrase(g, e.dependent)))
    return pairs


# ---------------------------------------------------------------------------
# clustering

class _UnionFind:
    def __init__(self, items: Iterable[str]):
        self.parent = {x: x for x in items}

    def find(self, x: str) -> str:
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a: str, b: str):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            # deterministic: smaller root wins
            if rb < ra:
                ra, rb = rb, ra
            self.parent[rb] = ra


def pair_target(a: str, b: str) -> str:
    return "|".join(sorted((a, b)))


def cluster_aliases(cands: List[EntityCandidate],
                    pairs: List[Tuple[str, str]],
                    threshold: float = 0.84,
                    journal=None):
    """Returns (clusters, decision requests).

    Apposition pairs merge automatically; string-distance pairs merge only
    once confirmed in the journal, otherwise they are emitted as pending
    requests (and their phrases stay unmerged in the provisional result).
    """
    phrases = sorted({c.phrase for c in cands})
    uf = _UnionFind(phrases)
    evidence: Dict[str, List[dict]] = {p: [] for p in phrases}
    status: Dict[str, str] = {}
    requests = []
    canonical_overrides: Dict[str, str] = {}
    extra_members: Dict[str, Set[str]] = {}

    for a, b in pairs:
        if a in uf.parent and b in uf.parent and a != b:
            uf.union(a, b)
            evidence[a].append({"kind": "apposition", "pair": pair_target(a, b)})

    decided = journal.alias_decisions() if journal is not None else {}

    scored = []
    for i, a in enumerate(phrases):
        for b in phrases[i + 1:]:
            if uf.find(a) == uf.find(b):
                continue
            score = jaro_winkler(match_key(a), match_key(b))
            if score >= threshold:
                scored.append((a, b, score))
    for a, b, score in scored:
        target = pair_target(a, b)
        choice = decided.get(target)
        ev = {"kind": "string_distance", "pair": target, "score": round(score, 4)}
        evidence[a].append(ev)
        evidence[b].append(ev)
        if choice is None:
            requests.append({
                "request_id": "alias:" + target, "kind": "alias_merge",
                "target": target, "suggested": "accept",
                "evidence": ev,
            })
            status[target] = "pending_review"
        elif choice["accept"]:
            uf.union(a, b)
            status[target] = "confirmed"
            if choice.get("canonical"):
                canonical_overrides[uf.find(a)] = choice["canonical"]
        else:
            status[target] = "rejected"

    # journal-asserted merges below the threshold (manual pairs), and
    # canonical overrides riding on any accepted pair
    for target, choice in decided.items():
        a, _, b = target.partition("|")
        if not choice["accept"] or a not in uf.parent or b not in uf.parent:
            continue
        uf.union(a, b)
        if choice.get("canonical"):
            canonical_overrides[uf.find(a)] = choice["canonical"]

    groups: Dict[str, List[str]] = {}
    for p in phrases:
        groups.setdefault(uf.find(p), []).append(p)

    counts = {c.phrase: len(c.mentions) for c in cands}
    clusters = []
    for root in sorted(groups):
        members = sorted(groups[root])
        override = canonical_overrides.get(root)
        if override is not None:
            canonical = override
            if override not in members:
                members.append(override)
                members.sort()
        else:
            canonical = max(members,
                            key=lambda m: (counts.get(m, 0), len(m), _inv(m)))
        ev = []
        seen = set()
        for m in members:
            for item in evidence.get(m, []):
                key = tuple(sorted(item.items()))
                if key not in seen:
                    seen.add(key)
                    ev.append(item)
        cluster_status = "auto"
        for item in ev:
            st = status.get(item.get("pair", ""))
            if st == "confirmed":
                cluster_status = "confirmed"
        pending = any(
            status.get(pair_target(m, other)) == "pending_review"
            for m in members for other in phrases if other not in members)
        if pending:
            cluster_status = "pending_review"
        clusters.append(AliasCluster(canonical=canonical, members=members,
                                     evidence=ev, status=cluster_status))
    return clusters, sorted(requests, key=lambda r: r["target"])


def _inv(s: str) -> tuple:
    # inverts lexicographic order so max() picks the alphabetically first
    return tuple(-ord(ch) for ch in s)


# ---------------------------------------------------------------------------
# catalog

def component_display(phrase: str) -> str:
    words = []
    for word in phrase.split(" "):
        words.append("-".join(part.capitalize() if not part.isupper() else part
                              for part in word.split("-")))
    return " ".join(words)


def attribute_ident(canonical: str) -> str:
    tokens = canonical.split()
    while len(tokens) > 1 and tokens[-1] == "level":
        tokens.pop()
    return "_".join(tokens)


def build_catalog(cands: List[EntityCandidate],
                  clusters: List[AliasCluster],
                  journal=None) -> ComponentCatalog:
    by_phrase = {c.phrase: c for c in cands}
    owner_overrides = journal.owner_decisions() if journal is not None else {}

    def cluster_kind(cluster: AliasCluster) -> str:
        kinds = {by_phrase[m].kind_hint for m in cluster.members if m in by_phrase}
        if COMPONENT in kinds:
            return COMPONENT
        if ATTRIBUTE in kinds:
            return ATTRIBUTE
        return UNKNOWN

    # unresolved reviews touching component material block the catalog
    for cluster in clusters:
        if cluster.status != "pending_review":
            continue
        if cluster_kind(cluster) == COMPONENT:
            raise UnresolvedDecision(
                ["alias:" + e["pair"] for e in cluster.evidence
                 if e["kind"] == "string_distance"])

    catalog = ComponentCatalog()
    components: Dict[str, CatalogComponent] = {}
    for cluster in clusters:
        if cluster_kind(cluster) == COMPONENT:
            comp = CatalogComponent(name=component_display(cluster.canonical),
                                    cluster=cluster)
            components[cluster.canonical] = comp
    for name in sorted(components):
        catalog.components.append(components[name])

    def component_for(phrase: str) -> Optional[CatalogComponent]:
        for comp in catalog.components:
            if phrase in comp.cluster.members:
                return comp
        return None

    owner_requests = []

    def owner_request(cluster: AliasCluster, votes: List[str]):
        counts = {n: votes.count(n) for n in set(votes)}
        if counts:
            suggested = sorted(counts, key=lambda n: (-counts[n], n))[0]
        elif catalog.components:
            suggested = catalog.components[0].name
        else:
            suggested = "?"
        owner_requests.append({
            "request_id": "owner:" + cluster.canonical, "kind": "owner",
            "target": cluster.canonical, "suggested": suggested,
            "evidence": {"votes": counts}})

    for cluster in clusters:
        kind = cluster_kind(cluster)
        if kind == COMPONENT:
            continue
        members = [by_phrase[m] for m in cluster.members if m in by_phrase]
        if kind == UNKNOWN:
            catalog.dropped.extend(members)
            continue
        votes = []
        for cand in members:
            for owner_phrase in cand.owner_votes:
                owner = component_for(owner_phrase)
                if owner is not None:
                    votes.append(owner.name)
        override = owner_overrides.get(cluster.canonical)
        if override is not None:
            owner_name = override
        else:
            if not votes:
                owner_request(cluster, votes)
                continue
            tally = sorted(((votes.count(n), n) for n in set(votes)), reverse=True)
            if len(tally) > 1 and tally[0][0] == tally[1][0]:
                owner_request(cluster, votes)
                continue
            owner_name = tally[0][1]
        # overrides may name the component by display form or any alias
        owner = None
        for comp in catalog.components:
            if comp.name == owner_name or owner_name in comp.cluster.members:
                owner = comp
                break
        if owner is None:
            owner = component_for(owner_name)
        if owner is None:
            raise IrmError("owner %r for attribute %r is not a known component"
                           % (owner_name, cluster.canonical))
        mentions = []
        for cand in members:
            mentions.extend(cand.mentions)
        mentions.sort(key=lambda m: (m.sentence_id, m.head_index))
        owner.attributes.append(CatalogAttribute(
            name=cluster.canonical, ident=attribute_ident(cluster.canonical),
            cluster=cluster, mentions=mentions))
    if owner_requests:
        raise UnresolvedDecision(owner_requests)
    for comp in catalog.components:
        comp.attributes.sort(key=lambda a: a.ident)
    return catalog
