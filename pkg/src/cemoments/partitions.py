"""Integer partitions and cycle-type permutations.

Partitions are plain tuples of ints, weakly decreasing. Vertex-type
partitions (the ones fed to the diagram engine) have no part equal to 1;
external cycle types for trace observables allow parts of 1.
Permutations are tuples of 0-based images.
"""

from __future__ import annotations

from math import factorial


def normalize_partition(parts, allow_ones=True):
    """Sort descending and validate. Returns a tuple."""
    out = tuple(sorted((int(p) for p in parts), reverse=True))
    for p in out:
        if p < 1:
            raise ValueError(f"partition parts must be >= 1, got {p}")
        if p == 1 and not allow_ones:
            raise ValueError("partition must have no part equal to 1")
    return out


def partitions_of(total, min_part=1):
    """All partitions of `total` with parts >= min_part, weakly decreasing."""
    if total < 0:
        raise ValueError("total must be >= 0")

    def gen(remaining, largest):
        if remaining == 0:
            yield ()
            return
        for first in range(min(remaining, largest), min_part - 1, -1):
            for rest in gen(remaining - first, first):
                yield (first,) + rest

    yield from gen(total, total)


def rank(lam):
    """|lam| - length(lam)."""
    return sum(lam) - len(lam)


def partitions_no_ones_up_to_rank(max_rank):
    """Every partition with all parts >= 2 and rank <= max_rank.

    Includes the empty partition. Finite: parts >= 2 force each part to add
    at least 1 to the rank, so length <= max_rank and size <= 2*max_rank.
    Ordered by (rank, length, parts) for deterministic iteration.
    """
    if max_rank < 0:
        raise ValueError("max_rank must be >= 0")
    found = []
    for total in range(0, 2 * max_rank + 1):
        for p in partitions_of(total, min_part=2):
            if rank(p) <= max_rank:
                found.append(p)
    found.sort(key=lambda p: (rank(p), len(p), p))
    return found


def z_weight(lam):
    """Product of the parts times the factorials of the multiplicities."""
    mult = {}
    prod = 1
    for p in lam:
        prod *= p
        mult[p] = mult.get(p, 0) + 1
    for m in mult.values():
        prod *= factorial(m)
    return prod


def permutation_of_type(lam, n):
    """Canonical permutation of {0..n-1} with cycle type lam.

    Consecutive blocks, each part one cycle: the first part maps
    0 -> 1 -> ... -> lam[0]-1 -> 0, and so on.
    """
    lam = normalize_partition(lam)
    if sum(lam) != n:
        raise ValueError(f"partition of size {sum(lam)} cannot act on {n} points")
    images = [0] * n
    start = 0
    for part in lam:
        for t in range(part):
            images[start + t] = start + (t + 1) % part
        start += part
    return tuple(images)


def cycle_type(images):
    """Cycle type of a permutation given as a tuple of 0-based images."""
    n = len(images)
    if sorted(images) != list(range(n)):
        raise ValueError("not a permutation")
    seen = [False] * n
    parts = []
    for s in range(n):
        if seen[s]:
            continue
        length = 0
        cur = s
        while not seen[cur]:
            seen[cur] = True
            cur = images[cur]
            length += 1
        parts.append(length)
    return tuple(sorted(parts, reverse=True))


def compose(p, q):
    """(p compose q)(x) = p[q[x]]."""
    return tuple(p[q[x]] for x in range(len(q)))


def inverse(p):
    inv = [0] * len(p)
    for x, y in enumerate(p):
        inv[y] = x
    return tuple(inv)
