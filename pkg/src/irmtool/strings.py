"""Edit-distance and similarity metrics for alias detection.

Both metrics operate on raw strings; callers normalize (lowercase, hyphen
stripping) before comparing. Kept dependency-free on purpose so the alias
threshold stays reproducible across environments.
"""

from __future__ import annotations


def levenshtein(a: str, b: str) -> int:
    """Unit-cost edit distance between two strings."""
    if a == b:
        return 0
    if not a:
        return len(b)
    if not b:
        return len(a)
    # Two-row dynamic program; previous[j] is the distance a[:i] -> b[:j].
    previous = list(range(len(b) + 1))
    for i, ca in enumerate(a, start=1):
        current = [i]
        for j, cb in enumerate(b, start=1):
            cost = 0 if ca == cb else 1
            current.append(min(previous[j] + 1,        # deletion
                               current[j - 1] + 1,     # insertion
                               previous[j - 1] + cost))  # substitution
        previous = current
    return previous[-1]


def _jaro(a: str, b: str) -> float:
    if a == b:
        return 1.0
    la, lb = len(a), len(b)
    if la == 0 or lb == 0:
        return 0.0
    window = max(la, lb) // 2 - 1
    if window < 0:
        window = 0
    matched_b = [False] * lb
    matches_a = []
    for i, ch in enumerate(a):
        lo = max(0, i - window)
        hi = min(lb, i + window + 1)
        for j in range(lo, hi):
            if not matched_b[j] and b[j] == ch:
                matched_b[j] = True
                matches_a.append((i, j))
                break
    m = len(matches_a)
    if m == 0:
        return 0.0
    # Transpositions: matched characters compared in b-index order.
    seq_a = [a[i] for i, _ in matches_a]
    seq_b = [b[j] for _, j in sorted(matches_a, key=lambda p: p[1])]
    half_transposed = sum(1 for x, y in zip(seq_a, seq_b) if x != y)
    t = half_transposed // 2
    return (m / la + m / lb + (m - t) / m) / 3.0


def jaro_winkler(a: str, b: str, prefix_scale: float = 0.1, max_prefix: int = 4) -> float:
    """Jaro similarity with the Winkler common-prefix boost.

    Returns 1.0 iff the strings are equal and 0.0 when no characters match.
    """
    jaro = _jaro(a, b)
    if jaro in (0.0, 1.0):
        return jaro
    prefix = 0
    for x, y in zip(a, b):
        if x != y or prefix == max_prefix:
            break
        prefix += 1
    return jaro + prefix * prefix_scale * (1.0 - jaro)
