"""Synset graph and verb similarity.

The bundled graph is a plain-text file, one synset per line:

    id|pos|lemma,lemma,...|hypernym_id,hypernym_id,...

pos is "v" or "n". Roots have an empty hypernym column. Every synset must
reach the root of its part of speech; cycles are rejected at load time.
"""

from __future__ import annotations

import importlib.resources
from collections import deque
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, Optional, Tuple

from .errors import IrmError

POS_VERB = "v"
POS_NOUN = "n"


@dataclass(frozen=True)
class Synset:
    synset_id: str
    pos: str
    lemmas: Tuple[str, ...]
    hypernyms: Tuple[str, ...]


@dataclass
class SynsetGraph:
    synsets: Dict[str, Synset] = field(default_factory=dict)
    _by_lemma: Dict[Tuple[str, str], List[str]] = field(default_factory=dict)
    _depth: Dict[str, int] = field(default_factory=dict)

    def add(self, synset: Synset):
        if synset.synset_id in self.synsets:
            raise IrmError(f"duplicate synset id {synset.synset_id}")
        self.synsets[synset.synset_id] = synset
        for lemma in synset.lemmas:
            self._by_lemma.setdefault((lemma, synset.pos), []).append(synset.synset_id)

    def lookup(self, lemma: str, pos: str = POS_VERB) -> List[str]:
        return list(self._by_lemma.get((lemma.lower(), pos), []))

    def __contains__(self, lemma_pos) -> bool:
        return tuple(lemma_pos) in self._by_lemma

    def validate(self):
        """Check hypernym references, acyclicity and single-root reachability."""
        roots = {}
        for s in self.synsets.values():
            for h in s.hypernyms:
                if h not in self.synsets:
                    raise IrmError(f"{s.synset_id}: unknown hypernym {h}")
                if self.synsets[h].pos != s.pos:
                    raise IrmError(f"{s.synset_id}: hypernym {h} crosses part of speech")
            if not s.hypernyms:
                if s.pos in roots:
                    raise IrmError(f"two roots for pos {s.pos}: {roots[s.pos]}, {s.synset_id}")
                roots[s.pos] = s.synset_id
        for s in self.synsets.values():
            self._depth_of(s.synset_id)  # raises on cycles / unreachable roots

    def _depth_of(self, synset_id: str, _stack: Optional[FrozenSet[str]] = None) -> int:
        """Depth of a synset; the root sits at depth 1."""
        cached = self._depth.get(synset_id)
        if cached is not None:
            return cached
        stack = _stack or frozenset()
        if synset_id in stack:
            raise IrmError(f"hypernym cycle through {synset_id}")
        synset = self.synsets[synset_id]
        if not synset.hypernyms:
            depth = 1
        else:
            depth = 1 + min(self._depth_of(h, stack | {synset_id}) for h in synset.hypernyms)
        self._depth[synset_id] = depth
        return depth

    def depth(self, synset_id: str) -> int:
        return self._depth_of(synset_id)

    # -- distances ---------------------------------------------------------

    def _ancestors(self, synset_id: str) -> Dict[str, int]:
        """Hypernym closure with shortest upward distance, self included at 0."""
        dist = {synset_id: 0}
        queue = deque([synset_id])
        while queue:
            current = queue.popleft()
            for h in self.synsets[current].hypernyms:
                d = dist[current] + 1
                if h not in dist or d < dist[h]:
                    dist[h] = d
                    queue.append(h)
        return dist

    def shortest_path(self, a: str, b: str) -> Optional[int]:
        """Shortest hypernym path between two synsets, via any common subsumer."""
        if self.synsets[a].pos != self.synsets[b].pos:
            return None
        up_a = self._ancestors(a)
        up_b = self._ancestors(b)
        best = None
        for node, da in up_a.items():
            db = up_b.get(node)
            if db is None:
                continue
            total = da + db
            if best is None or total < best:
                best = total
        return best

    def least_common_subsumer(self, a: str, b: str) -> Optional[str]:
        """Deepest shared subsumer; ties broken by synset id for determinism."""
        common = set(self._ancestors(a)) & set(self._ancestors(b))
        if not common:
            return None
        return max(sorted(common), key=self.depth)


def path_similarity(graph: SynsetGraph, a: str, b: str) -> float:
    """1 / (1 + shortest hypernym path); 1.0 for identical synsets."""
    if a == b:
        return 1.0
    length = graph.shortest_path(a, b)
    if length is None:
        return 0.0
    return 1.0 / (1.0 + length)


def wup_similarity(graph: SynsetGraph, a: str, b: str) -> float:
    """Wu-Palmer similarity using the max-depth least common subsumer.

    depth(root) = 1; depths of a and b are measured through the chosen
    subsumer so the score stays within (0, 1].
    """
    if a == b:
        return 1.0
    lcs = graph.least_common_subsumer(a, b)
    if lcs is None:
        return 0.0
    depth_lcs = graph.depth(lcs)
    da = depth_lcs + graph._ancestors(a)[lcs]
    db = depth_lcs + graph._ancestors(b)[lcs]
    return (2.0 * depth_lcs) / (da + db)


MEASURES = {
    "path": path_similarity,
    "wup": wup_similarity,
}


def verb_affinity(graph: SynsetGraph, lemma: str, seeds: Iterable[str],
                  measure: str = "wup") -> float:
    """Best similarity between any synset of lemma and any synset of any seed.

    Returns 0.0 when the lemma (or every seed) is missing from the graph,
    which downstream code treats as an abstention, not a weak signal.
    """
    fn = MEASURES[measure]
    own = graph.lookup(lemma, POS_VERB)
    if not own:
        return 0.0
    best = 0.0
    for seed in seeds:
        for sid in graph.lookup(seed, POS_VERB):
            for oid in own:
                score = fn(graph, oid, sid)
                if score > best:
                    best = score
    return best


def parse_synsets(lines: Iterable[str]) -> SynsetGraph:
    graph = SynsetGraph()
    for raw in lines:
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split("|")
        if len(parts) != 4:
            raise IrmError(f"bad synset line: {line!r}")
        sid, pos, lemmas, hypernyms = parts
        if pos not in (POS_VERB, POS_NOUN):
            raise IrmError(f"bad pos in synset line: {line!r}")
        graph.add(Synset(
            synset_id=sid.strip(),
            pos=pos.strip(),
            lemmas=tuple(l.strip().lower() for l in lemmas.split(",") if l.strip()),
            hypernyms=tuple(h.strip() for h in hypernyms.split(",") if h.strip()),
        ))
    graph.validate()
    return graph


def load_synsets(path=None) -> SynsetGraph:
    """Load a synset file; defaults to the bundled graph."""
    if path is not None:
        with open(path, encoding="utf-8") as fh:
            return parse_synsets(fh)
    text = importlib.resources.files("irmtool.data").joinpath("verb_synsets.txt").read_text("utf-8")
    return parse_synsets(text.splitlines())
