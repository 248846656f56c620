"""Clique counting: brute-force oracles, greedy random sampling, the
iterative cutoff generator, matrix-multiplication counting for graphs,
parity, and the sparsity thresholds and expectation formula.

Clique sets are represented as plain sets of sorted vertex tuples.
"""

from dataclasses import dataclass
from itertools import combinations
from math import ceil, comb, log

import numpy as np

from .hypergraph import Hypergraph, KPartiteHypergraph, common_neighbors
from .util import as_rng


class CutoffExceeded(Exception):
    """it_gen_cliques hit a cutoff: the input has atypically many cliques."""

    def __init__(self, level: int, cutoff: float):
        super().__init__(f"clique set at level {level} reached cutoff {cutoff}")
        self.level = level
        self.cutoff = cutoff


# ---------------------------------------------------------------------------
# brute force
# ---------------------------------------------------------------------------

def _count_cliques_graph(g: Hypergraph, k: int) -> int:
    """Bitmask recursion over neighbor intersections (s=2 fast path)."""
    n = g.n
    nbr = [0] * n
    for u, v in g.edges:
        nbr[u] |= 1 << v
        nbr[v] |= 1 << u
    above = [((1 << n) - 1) >> (v + 1) << (v + 1) for v in range(n)]

    def rec(cand: int, depth: int) -> int:
        if depth == k:
            return 1
        total = 0
        c = cand
        while c:
            v = (c & -c).bit_length() - 1
            c &= c - 1
            total += rec(cand & nbr[v] & above[v], depth + 1)
        return total

    return rec((1 << n) - 1, 0)


def _extendable(g: Hypergraph, chosen: tuple, v: int) -> bool:
    """All s-subsets of chosen+(v,) that contain v are edges."""
    s = g.s
    if len(chosen) + 1 < s:
        return True
    for rest in combinations(chosen, s - 1):
        if not g.has_edge(rest + (v,)):
            return False
    return True


def enumerate_cliques(g: Hypergraph, k: int) -> set:
    """All k-cliques as sorted tuples (exhaustive, with incremental pruning)."""
    if k == 0:
        return {()}
    out = set()

    def rec(chosen: tuple, start: int):
        if len(chosen) == k:
            out.add(chosen)
            return
        for v in range(start, g.n):
            if _extendable(g, chosen, v):
                rec(chosen + (v,), v + 1)

    rec((), 0)
    return out


def brute_force_count(g: Hypergraph, k: int) -> int:
    """Exact |cl_k(G)| by exhaustive search."""
    if k < g.s:
        # every k-subset is vacuously a clique
        return comb(g.n, k)
    if g.s == 2 and g.n <= 63:
        return _count_cliques_graph(g, k)
    return len(enumerate_cliques(g, k))


def brute_force_count_kpartite(g: KPartiteHypergraph) -> int:
    """Exact count of k-cliques (one vertex per part) of a k-partite input."""
    return brute_force_count(g.flatten(), g.k)


def parity_count(g: Hypergraph, k: int) -> int:
    """|cl_k(G)| mod 2 by brute force."""
    return brute_force_count(g, k) & 1


def expected_clique_count(n: int, c: float, k: int, s: int) -> float:
    """E|cl_k| = C(n,k) * c^C(k,s) for G(n, c, s)."""
    return comb(n, k) * c ** comb(k, s)


# ---------------------------------------------------------------------------
# sparsity thresholds
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SparsityProfile:
    """Thresholds for G(n, n^-alpha, s): tau is the largest integer with
    alpha*C(tau, s-1) < 1, kappa the largest integer >= s with
    alpha*C(kappa, s-1) < s."""

    alpha: float
    s: int
    tau: int
    kappa: int

    @classmethod
    def from_alpha(cls, alpha: float, s: int) -> "SparsityProfile":
        if not 0 < alpha < 1:
            raise ValueError("alpha must be in (0,1)")
        tau = s - 1
        while alpha * comb(tau + 1, s - 1) < 1:
            tau += 1
        kappa = s
        while alpha * comb(kappa + 1, s - 1) < s:
            kappa += 1
        return cls(alpha, s, tau, kappa)

    @classmethod
    def from_density(cls, n: int, c: float, s: int) -> "SparsityProfile":
        """Recover alpha = -ln c / ln n from an explicit edge probability."""
        return cls.from_alpha(-log(c) / log(n), s)


def required_iterations(n: int, c: float, k: int, s: int, eps: float) -> int:
    """Iteration budget for greedy random sampling (natural-log convention).

    2*n^(tau+1)*c^C(tau+1,s)*(ln n)^(3(k-tau)(1+eps)) when k >= tau+1, else
    2*n^k*c^C(k,s)*(ln n)^(1+eps).
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    prof = SparsityProfile.from_density(n, c, s)
    if k >= prof.tau + 1:
        t = 2 * n ** (prof.tau + 1) * c ** comb(prof.tau + 1, s) \
            * log(n) ** (3 * (k - prof.tau) * (1 + eps))
    else:
        t = 2 * n ** k * c ** comb(k, s) * log(n) ** (1 + eps)
    return max(1, ceil(t))


# ---------------------------------------------------------------------------
# greedy random sampling
# ---------------------------------------------------------------------------

def greedy_random_sampling(g: Hypergraph, k: int, iterations: int, rng=None) -> set:
    """Accumulate cliques found by `iterations` independent greedy walks.

    Each walk starts from s-1 distinct uniform vertices and repeatedly picks
    a uniform common neighbor; completed k-sets are collected.  The walks are
    simulated in aggregate: a multinomial splits the iteration budget over
    start sets, and again over each extension, which reproduces the joint law
    of the iterations' outcomes without running them one by one.
    """
    rng = as_rng(rng)
    if iterations < 1:
        raise ValueError("need at least one iteration")
    starts = list(combinations(range(g.n), g.s - 1))
    if not starts:
        return set()
    level = dict(zip(starts, rng.multinomial(iterations,
                                             [1 / len(starts)] * len(starts))))
    for _ in range(k - (g.s - 1)):
        nxt = {}
        for base, cnt in level.items():
            if cnt == 0:
                continue
            ext = sorted(common_neighbors(g, base))
            if not ext:
                continue  # walk dies
            split = rng.multinomial(int(cnt), [1 / len(ext)] * len(ext))
            for v, c2 in zip(ext, split):
                if c2:
                    key = tuple(sorted(base + (v,)))
                    nxt[key] = nxt.get(key, 0) + int(c2)
        level = nxt
    return set(level)


# ---------------------------------------------------------------------------
# iterative generation with cutoffs
# ---------------------------------------------------------------------------

def it_gen_cliques(g: Hypergraph, k: int, cutoffs) -> set:
    """Generate cl_{s-1} .. cl_k level by level, aborting at the cutoffs.

    `cutoffs` maps levels s-1..k to bounds (a dict or a sequence ordered by
    level).  A level whose set reaches its cutoff raises CutoffExceeded.
    """
    s = g.s
    levels = list(range(s - 1, k + 1))
    if not isinstance(cutoffs, dict):
        if len(cutoffs) != len(levels):
            raise ValueError(f"expected {len(levels)} cutoffs for levels {levels}")
        cutoffs = dict(zip(levels, cutoffs))
    if any(cutoffs[t] <= 0 for t in levels):
        raise ValueError("cutoffs must be positive")
    current = set(combinations(range(g.n), s - 1))
    for t in levels[1:]:
        bound = cutoffs[t]
        nxt = set()
        for base in current:
            for v in common_neighbors(g, base):
                if v > base[-1]:
                    nxt.add(base + (v,))
                    if len(nxt) >= bound:
                        raise CutoffExceeded(t, bound)
        current = nxt
    return current


def highprob_cutoffs(n: int, c: float, k: int, s: int) -> dict:
    """High-probability cutoffs 2*n^t*c^C(t,s) for levels s-1..k."""
    return {t: 2 * n ** t * c ** comb(t, s) for t in range(s - 1, k + 1)}


# ---------------------------------------------------------------------------
# matrix-multiplication counting (graphs)
# ---------------------------------------------------------------------------

def _cross_clique(g: Hypergraph, a: tuple, b: tuple) -> bool:
    # a and b are cliques; the union is a clique iff all cross pairs are edges
    for u in a:
        for v in b:
            if not g.has_edge((u, v)):
                return False
    return True


def _ordered_block(g: Hypergraph, rows: list, cols: list) -> np.ndarray:
    m = np.zeros((len(rows), len(cols)), dtype=np.int64)
    for i, a in enumerate(rows):
        for j, b in enumerate(cols):
            if a[-1] < b[0] and _cross_clique(g, a, b):
                m[i, j] = 1
    return m


def matrix_mult_count(g: Hypergraph, k: int) -> int:
    """k-clique count for graphs via clique-set matrix products.

    Splits k into lowest floor(k/3) labels, middle block, and highest
    ceil(k/3) labels; multiplies the ordered block matrices and sums the
    product over the support of the ordered pair matrix.
    """
    if g.s != 2:
        raise ValueError("matrix_mult_count requires s=2")
    if k <= 2:
        raise ValueError("matrix_mult_count requires k > 2")
    lo, hi = k // 3, -(-k // 3)
    s1 = sorted(enumerate_cliques(g, lo))
    s2 = sorted(enumerate_cliques(g, hi))
    if not s1 or not s2:
        return 0
    r = k % 3
    if r == 0:
        m1 = _ordered_block(g, s1, s1)
        prod_ = m1 @ m1
        support = m1
    elif r == 1:
        m1 = _ordered_block(g, s1, s1)
        m2 = _ordered_block(g, s1, s2)
        prod_ = m1 @ m2
        support = m2
    else:
        m2 = _ordered_block(g, s1, s2)
        m3 = _ordered_block(g, s2, s2)
        prod_ = m2 @ m3
        support = m2
    return int((prod_ * support).sum())
