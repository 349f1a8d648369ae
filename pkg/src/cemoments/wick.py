"""Wick pairing enumeration over slot graphs.

The integrand behind an ensemble moment is a product of matrix factors.
Each factor is a z (or a conjugate z-bar) carrying a row slot and a column
slot. Externals come first: n z-factors and n z-bar factors whose four...
2n+2n slots stay free. A vertex partition lam (all parts >= 2) appends, for
each part q, a ring of q internal z-factors and q internal z-bar factors
wired as a trace: with factors z_0..z_{q-1} and zb_0..zb_{q-1},

    col(z_t)  is identified with col(zb_t)          (shared summed column)
    row(zb_t) is identified with row(z_{t+1 mod q}) (shared summed row)

which is exactly the index plumbing of Tr((Z Zdag)^q). Slots are numbered
factor-local: z-factor f owns z-slots (2f, 2f+1) = (row, col), z-bar factor
g owns zbar-slots (2g, 2g+1). Factors 0..n-1 are external on both sides;
internal factors follow in partition order.

A Wick term is a bijection from z-factors to z-bar factors plus, in the
twisted model (beta=1, symmetric matrices), one twist bit per edge:

    untwisted: row-row and col-col      twisted: row-col and col-row

Overlaying the pairing edges on the trace identifications leaves a disjoint
union of closed cycles (every slot internal; each contributes a factor of
the formal dimension d) and open chains whose two endpoints are external
slots. Since every identification joins a z-slot to a zbar-slot, the graph
is bipartite and each chain ends on opposite sides: the chain endpoints
define a perfect matching from external z-slots to external zbar-slots,
the term's delta pattern. The enumeration accumulates, per pattern, the
count of terms with c closed cycles, i.e. an integer polynomial in d.

Determinism: bijections are enumerated in lexicographic order and twist
masks as a binary counter. Parallel runs split the term space by the image
of z-factor 0, and partial sums merge by exact integer addition, so results
are bit-identical for any worker count.
"""

from __future__ import annotations

import itertools
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from .algebra import DimPolynomial
from .partitions import normalize_partition, rank


@dataclass(frozen=True)
class ExternalSpec:
    """External factor layout for a moment integrand.

    beta selects the covariance: 2 pairs row-row/col-col only; 1 adds the
    twisted second term. n is the number of z factors (the z-bar count
    matches).
    """

    beta: int
    n: int

    def __post_init__(self):
        if self.beta not in (1, 2):
            raise ValueError("beta must be 1 or 2 for enumeration")
        if self.n < 1:
            raise ValueError("need at least one external factor")


@dataclass(frozen=True)
class SlotGraph:
    """Integrand structure: factor counts plus trace identifications.

    trace_from_z[s] is the zbar-slot identified with z-slot s, or -1 when s
    is external; trace_from_zbar is the reverse direction. Exactly the
    internal slots carry an identification, and identifications always join
    opposite sides.
    """

    beta: int
    n: int
    vertex_type: tuple
    factor_count: int
    trace_from_z: tuple
    trace_from_zbar: tuple

    @property
    def edge_count(self):
        return self.factor_count

    @property
    def external_slot_count(self):
        return 2 * self.n


def build_slot_graph(spec, lam):
    """Wire up externals plus one trace ring per part of lam."""
    lam = normalize_partition(lam, allow_ones=False)
    n = spec.n
    total = n + sum(lam)
    trace_from_z = [-1] * (2 * total)
    trace_from_zbar = [-1] * (2 * total)
    offset = n
    for q in lam:
        for t in range(q):
            zf = offset + t
            zf_next = offset + (t + 1) % q
            # shared column of z_t and zb_t
            trace_from_z[2 * zf + 1] = 2 * zf + 1
            trace_from_zbar[2 * zf + 1] = 2 * zf + 1
            # row of zb_t feeds row of z_{t+1}
            trace_from_zbar[2 * zf] = 2 * zf_next
            trace_from_z[2 * zf_next] = 2 * zf
        offset += q
    graph = SlotGraph(
        beta=spec.beta,
        n=n,
        vertex_type=lam,
        factor_count=total,
        trace_from_z=tuple(trace_from_z),
        trace_from_zbar=tuple(trace_from_zbar),
    )
    _check_graph(graph)
    return graph


def _check_graph(graph):
    two_n = 2 * graph.n
    for s in range(2 * graph.factor_count):
        z_ext = graph.trace_from_z[s] < 0
        zb_ext = graph.trace_from_zbar[s] < 0
        if s < two_n:
            if not (z_ext and zb_ext):
                raise AssertionError("external slot carries a trace edge")
        else:
            if z_ext or zb_ext:
                raise AssertionError("internal slot missing a trace edge")


@dataclass(frozen=True)
class DiagramSum:
    """Accumulated enumeration result.

    pattern_map maps each delta pattern to the integer polynomial in d
    counting terms by closed-cycle number. A pattern is a tuple p of length
    2n with p[s] = the external zbar-slot matched to external z-slot s.
    """

    beta: int
    n: int
    vertex_type: tuple
    edge_count: int
    pattern_map: dict = field(compare=False)

    def patterns(self):
        return list(self.pattern_map)

    def to_json(self):
        return {
            "edges": self.edge_count,
            "patterns": [
                {
                    "match": [[s, int(p[s])] for s in range(len(p))],
                    "poly": poly.to_json(),
                }
                for p, poly in self.pattern_map.items()
            ],
        }


def _enumerate_chunk(beta, n, trace_from_zbar, factor_count, first_images,
                     validate=False):
    """Fold over all terms whose bijection sends z-factor 0 into first_images.

    Returns {pattern: [term count per cycle number]}. Top-level so process
    pools can pickle it.
    """
    F = factor_count
    two_n = 2 * n
    two_f = 2 * F
    n_masks = (1 << F) if beta == 1 else 1
    max_cycles = 2 * (F - n) + 1  # a cycle needs at least one internal z-slot
    counts = {}
    visited = [0] * two_f
    stamp = 0
    wick = [0] * two_f
    trace = trace_from_zbar
    for g0 in first_images:
        rest = [g for g in range(F) if g != g0]
        for tail in itertools.permutations(rest):
            perm = (g0,) + tail
            for mask in range(n_masks):
                for f in range(F):
                    base = 2 * perm[f]
                    t = (mask >> f) & 1
                    wick[2 * f] = base + t
                    wick[2 * f + 1] = base + 1 - t
                stamp += 1
                pat = [0] * two_n
                for s in range(two_n):
                    w = wick[s]
                    nxt = trace[w]
                    while nxt >= 0:
                        visited[nxt] = stamp
                        w = wick[nxt]
                        nxt = trace[w]
                    pat[s] = w
                cycles = 0
                for s in range(two_n, two_f):
                    if visited[s] != stamp:
                        cur = s
                        while visited[cur] != stamp:
                            visited[cur] = stamp
                            cur = trace[wick[cur]]
                        cycles += 1
                if validate:
                    if any(w >= two_n for w in pat):
                        raise AssertionError(
                            "chain ended on an internal slot"
                        )
                    if sorted(pat) != list(range(two_n)):
                        raise AssertionError(
                            "delta pattern is not a perfect matching"
                        )
                key = tuple(pat)
                arr = counts.get(key)
                if arr is None:
                    arr = [0] * max_cycles
                    counts[key] = arr
                arr[cycles] += 1
    return counts


def _merge_counts(target, part):
    for key, arr in part.items():
        acc = target.get(key)
        if acc is None:
            target[key] = list(arr)
        else:
            for c, v in enumerate(arr):
                acc[c] += v


def enumerate_wick(graph, workers=1, validate=False):
    """Enumerate every pairing (and twist, for beta=1) of the slot graph."""
    F = graph.factor_count
    args = (graph.beta, graph.n, graph.trace_from_zbar, F)
    if workers <= 1 or F == 1:
        counts = _enumerate_chunk(*args, list(range(F)), validate)
    else:
        counts = {}
        with ProcessPoolExecutor(max_workers=min(workers, F)) as pool:
            futures = [
                pool.submit(_enumerate_chunk, *args, [g0], validate)
                for g0 in range(F)
            ]
            # merge in submission order, not completion order
            for fut in futures:
                _merge_counts(counts, fut.result())
    pattern_map = {
        key: DimPolynomial(counts[key]) for key in sorted(counts)
    }
    return DiagramSum(
        beta=graph.beta,
        n=graph.n,
        vertex_type=graph.vertex_type,
        edge_count=F,
        pattern_map=pattern_map,
    )


_diagram_cache = {}


def get_diagram_sum(beta, n, lam, workers=1):
    """Cached enumeration. beta=4 reuses the twisted (beta=1) enumeration."""
    lam = normalize_partition(lam, allow_ones=False)
    enum_beta = 2 if beta == 2 else 1
    key = (enum_beta, n, lam)
    cached = _diagram_cache.get(key)
    if cached is None:
        graph = build_slot_graph(ExternalSpec(beta=enum_beta, n=n), lam)
        cached = enumerate_wick(graph, workers=workers)
        _diagram_cache[key] = cached
    return cached


def clear_diagram_cache():
    _diagram_cache.clear()


def j_polynomial(lam, beta=1, n=1, workers=1):
    """Per-pattern polynomial in d for vertex type lam.

    Convenience wrapper over the cached enumeration; returns the
    pattern -> DimPolynomial map.
    """
    return get_diagram_sum(beta, n, lam, workers=workers).pattern_map
