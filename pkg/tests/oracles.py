"""Independent reference implementations used to cross-check the package.

Everything here is deliberately written from the textbook definition (or
as a brute-force enumeration), not by calling into irmtool, so tests
compare two unrelated routes to the same answer.
"""

from itertools import combinations
from typing import Dict, List, Optional, Sequence, Set, Tuple


# ---------------------------------------------------------------------------
# string metrics

def dp_levenshtein(a: str, b: str) -> int:
    """Full dynamic-programming table, no row compression."""
    n, m = len(a), len(b)
    table = [[0] * (m + 1) for _ in range(n + 1)]
    for i in range(n + 1):
        table[i][0] = i
    for j in range(m + 1):
        table[0][j] = j
    for i in range(1, n + 1):
        for j in range(1, m + 1):
            cost = 0 if a[i - 1] == b[j - 1] else 1
            table[i][j] = min(table[i - 1][j] + 1,
                              table[i][j - 1] + 1,
                              table[i - 1][j - 1] + cost)
    return table[n][m]


def ref_jaro(a: str, b: str) -> float:
    if a == b:
        return 1.0
    if not a or not b:
        return 0.0
    window = max(len(a), len(b)) // 2 - 1
    if window < 0:
        window = 0
    a_hit = [False] * len(a)
    b_hit = [False] * len(b)
    matches = 0
    for i, ch in enumerate(a):
        lo = max(0, i - window)
        hi = min(len(b), i + window + 1)
        for j in range(lo, hi):
            if not b_hit[j] and b[j] == ch:
                a_hit[i] = b_hit[j] = True
                matches += 1
                break
    if matches == 0:
        return 0.0
    a_seq = [ch for i, ch in enumerate(a) if a_hit[i]]
    b_seq = [ch for j, ch in enumerate(b) if b_hit[j]]
    transpositions = sum(1 for x, y in zip(a_seq, b_seq) if x != y) // 2
    m = float(matches)
    return (m / len(a) + m / len(b) + (m - transpositions) / m) / 3.0


def ref_jaro_winkler(a: str, b: str, scale: float = 0.1, max_prefix: int = 4) -> float:
    j = ref_jaro(a, b)
    prefix = 0
    for x, y in zip(a, b):
        if x != y or prefix == max_prefix:
            break
        prefix += 1
    return j + prefix * scale * (1.0 - j)


# ---------------------------------------------------------------------------
# synset graph measures (nodes given as {id: (parent_ids, depth-agnostic)})

def bfs_path_len(edges: Dict[str, Set[str]], a: str, b: str) -> Optional[int]:
    """Shortest undirected path length over hypernym links."""
    if a == b:
        return 0
    seen = {a}
    frontier = [a]
    dist = 0
    while frontier:
        dist += 1
        nxt = []
        for node in frontier:
            for other in edges.get(node, ()):
                if other in seen:
                    continue
                if other == b:
                    return dist
                seen.add(other)
                nxt.append(other)
        frontier = nxt
    return None


def undirected(hypernyms: Dict[str, Set[str]]) -> Dict[str, Set[str]]:
    out: Dict[str, Set[str]] = {}
    for child, parents in hypernyms.items():
        out.setdefault(child, set())
        for p in parents:
            out.setdefault(p, set())
            out[child].add(p)
            out[p].add(child)
    return out


def ancestors_with_depth(hypernyms: Dict[str, Set[str]], node: str,
                         depth_of: Dict[str, int]) -> Dict[str, int]:
    """All ancestors of node (inclusive) mapped to their own depth."""
    out = {node: depth_of[node]}
    stack = [node]
    while stack:
        cur = stack.pop()
        for p in hypernyms.get(cur, ()):
            if p not in out:
                out[p] = depth_of[p]
                stack.append(p)
    return out


def ref_wup(hypernyms: Dict[str, Set[str]], depth_of: Dict[str, int],
            a: str, b: str) -> float:
    anc_a = ancestors_with_depth(hypernyms, a, depth_of)
    anc_b = ancestors_with_depth(hypernyms, b, depth_of)
    common = set(anc_a) & set(anc_b)
    lcs_depth = max(depth_of[c] for c in common)
    return 2.0 * lcs_depth / (depth_of[a] + depth_of[b])


# ---------------------------------------------------------------------------
# dependency trees

def is_tree(heads: Sequence[int]) -> bool:
    """heads[i] is the 1-based head of token i+1; 0 marks the root."""
    n = len(heads)
    if sum(1 for h in heads if h == 0) != 1:
        return False
    if any(h < 0 or h > n for h in heads):
        return False
    for start in range(1, n + 1):
        seen = set()
        cur = start
        while cur != 0:
            if cur in seen:
                return False
            seen.add(cur)
            cur = heads[cur - 1]
    return True


# ---------------------------------------------------------------------------
# outline scanning (line oriented, independent of document.py)

def scan_outline(raw: str) -> Dict[str, object]:
    """Returns {'summary': [lines], 'items': {label: [lines]}, 'order': [labels]}."""
    import re
    summary: List[str] = []
    items: Dict[str, List[str]] = {}
    order: List[str] = []
    mode = None
    current = None
    top = None
    for line in raw.splitlines():
        stripped = line.strip()
        if not stripped:
            continue
        low = stripped.lower()
        if low.startswith("summary"):
            mode = "summary"
            rest = stripped.split(":", 1)[1].strip() if ":" in stripped else ""
            if rest:
                summary.append(rest)
            continue
        if low.startswith("requirements") or "situation-specific" in low:
            mode = "items"
            current = None
            continue
        if mode == "summary":
            summary.append(stripped)
            continue
        if mode == "items":
            m = re.match(r"^(\d+)\.\s*(.*)$", stripped)
            if m:
                top = m.group(1)
                current = top
                order.append(current)
                items[current] = [m.group(2)] if m.group(2) else []
                continue
            m = re.match(r"^\(([a-z])\)\s*(.*)$", stripped)
            if m and top is not None:
                current = "%s(%s)" % (top, m.group(1))
                order.append(current)
                items[current] = [m.group(2)] if m.group(2) else []
                continue
            if current is not None:
                items[current].append(stripped)
    return {"summary": summary, "items": items, "order": order}


# ---------------------------------------------------------------------------
# direction inference (worklist restatement of the S0-S3 rules)

def direction_oracle(sigs: Dict[str, dict]) -> Dict[str, object]:
    """sigs: {key: {"rtype": str, "params": [(ref, fixed_dir_or_None)]}}.

    Returns {"directions": {(key, idx): dir|None}, "requests": set of targets}
    computed with a worklist instead of repeated sweeps.
    """
    dirs: Dict[Tuple[str, int], Optional[str]] = {}
    for key, sig in sigs.items():
        for idx, (ref, fixed) in enumerate(sig["params"]):
            if sig["rtype"] == "Assumption":
                dirs[(key, idx)] = "in"
            else:
                dirs[(key, idx)] = fixed

    def producers(ref, skip_key):
        out = []
        for key, sig in sigs.items():
            if key == skip_key:
                continue
            for idx, (r, _) in enumerate(sig["params"]):
                if r == ref and dirs[(key, idx)] == "out" and not r.endswith("::?"):
                    out.append(key)
        return out

    requests: Set[str] = set()
    moved = True
    while moved:
        moved = False
        for key in sorted(sigs):
            sig = sigs[key]
            if sig["rtype"] == "Process" and len(sig["params"]) == 1:
                ref = sig["params"][0][0]
                if dirs[(key, 0)] is None:
                    holders = producers(ref, key)
                    if holders:
                        requests.add("%s:%s" % (key, ref))
                    else:
                        dirs[(key, 0)] = "out"
                        moved = True
        for key in sorted(sigs):
            for idx, (ref, _) in enumerate(sigs[key]["params"]):
                if dirs[(key, idx)] is None and producers(ref, key):
                    dirs[(key, idx)] = "in"
                    requests.add("%s:%s" % (key, ref))
                    moved = True
    for key in sorted(sigs):
        for idx, (ref, _) in enumerate(sigs[key]["params"]):
            if dirs[(key, idx)] is None:
                requests.add("%s:%s" % (key, ref))
    for key in sorted(sigs):
        sig = sigs[key]
        if sig["rtype"] == "Assumption" or not sig["params"]:
            continue
        open_param = any(
            dirs[(key, idx)] is None or "%s:%s" % (key, ref) in requests
            for idx, (ref, _) in enumerate(sig["params"]))
        if not open_param and not any(dirs[(key, idx)] == "out"
                                      for idx in range(len(sig["params"]))):
            requests.add(key + ":+")
    return {"directions": dirs, "requests": requests}


# ---------------------------------------------------------------------------
# configuration enumeration (brute force over all subsets)

def brute_force_configs(node_ids: Sequence[int],
                        decompositions: Sequence[dict]) -> List[frozenset]:
    """All invariant subsets forming a valid configuration.

    A subset is valid iff it contains every root, every selected AND
    parent has all children selected, every selected OR parent has
    exactly one child selected, and no unselected parent has a selected
    child.
    """
    parent_of: Dict[int, int] = {}
    for dc in decompositions:
        for c in dc["children"]:
            parent_of[c] = dc["parent"]
    roots = [n for n in node_ids if n not in parent_of]
    result = []
    nodes = list(node_ids)
    for size in range(len(nodes) + 1):
        for subset in combinations(nodes, size):
            sel = set(subset)
            if not all(r in sel for r in roots):
                continue
            ok = True
            for dc in decompositions:
                chosen = [c for c in dc["children"] if c in sel]
                if dc["parent"] in sel:
                    if dc["mode"] == "AND" and len(chosen) != len(dc["children"]):
                        ok = False
                    if dc["mode"] == "OR" and len(chosen) != 1:
                        ok = False
                else:
                    if chosen:
                        ok = False
                if not ok:
                    break
            if ok:
                for node in sel:
                    if node in parent_of and parent_of[node] not in sel:
                        ok = False
                        break
            if ok:
                result.append(frozenset(sel))
    return result
