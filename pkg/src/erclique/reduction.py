"""End-to-end counting and parity reductions from worst-case hypergraphs to
an average-case clique-counting oracle, the k-partite to general
inclusion-exclusion step, the decide-from-parity search, and the slowdown
formulas.

The pipeline evaluates the clique polynomial on a worst-case input through
three nested reductions: random curve evaluations (decoded against oracle
errors), binary-expansion decomposition of weighted inputs into near-ER 0/1
inputs, and inclusion-exclusion over vertex-label subsets that converts
k-partite counting into plain counting on induced subhypergraphs.  Oracle
calls are issued in coloring batches so that desk-scale parameter grids are
tractable; batch and single-call semantics agree.
"""

import threading
from dataclasses import dataclass, field
from itertools import combinations
from math import comb, log

import numpy as np

from . import cliques
from .expansion import SamplerFailure
from .fields import (DecodeFailure, PrimeFieldCtx, ResidueVector, crt_combine,
                     find_normal_basis, select_primes)
from .hypergraph import (Hypergraph, KPartiteHypergraph,
                         blow_up_k_partite, edge_index)
from .polynomial import (WeightedKPartiteInput, ext_to_base_reduce,
                         pipeline_expansion_spec, random_self_reduce,
                         weighted_to_unweighted, weighted_to_unweighted_batch)
from .util import as_rng


# ---------------------------------------------------------------------------
# oracle harness
# ---------------------------------------------------------------------------

class AverageCaseOracle:
    """A clique counter wrapped with an error model and call accounting.

    Error models: "exact"; "flip" answers +1 with probability `rate`;
    "calls" answers +1 exactly on the 0-based call indices in `error_calls`.
    Counters: any (Hypergraph, k) -> int callable; the default brute force
    and parity counters get vectorized batch paths for graphs.
    """

    def __init__(self, counter=None, error: str = "exact", rate: float = 0.0,
                 error_calls=None, seed=0):
        if error not in ("exact", "flip", "calls"):
            raise ValueError(f"unknown error model {error!r}")
        self.counter = counter if counter is not None else cliques.brute_force_count
        self.error = error
        self.rate = float(rate)
        self.error_calls = frozenset(error_calls or ())
        self._rng = as_rng(seed)
        self._lock = threading.Lock()
        self.calls = 0
        self.injected = 0

    def _apply_errors(self, answers: np.ndarray) -> np.ndarray:
        m = len(answers)
        with self._lock:
            start = self.calls
            self.calls += m
            if self.error == "flip":
                flips = self._rng.random(m) < self.rate
            elif self.error == "calls":
                flips = np.array([start + i in self.error_calls for i in range(m)])
            else:
                flips = np.zeros(m, dtype=bool)
            self.injected += int(flips.sum())
        return answers + flips.astype(np.int64)

    def count(self, g: Hypergraph, k: int) -> int:
        ans = np.array([self.counter(g, k)], dtype=np.int64)
        return int(self._apply_errors(ans)[0])

    @property
    def default_counting(self) -> bool:
        return self.counter is cliques.brute_force_count

    @property
    def default_parity(self) -> bool:
        return self.counter is cliques.parity_count

    def record_batch(self, answers: np.ndarray) -> np.ndarray:
        """Account a batch of raw answers from a vectorized counter path and
        apply the error model; semantically one oracle call per entry."""
        return self._apply_errors(np.asarray(answers, dtype=np.int64))

    def count_batch_adj(self, adj: np.ndarray, k: int) -> np.ndarray:
        """Counts for a batch of graphs given as a (M, v, v) 0/1 adjacency
        tensor (s = 2 only)."""
        if self.counter is cliques.brute_force_count:
            ans = _count_graphs_batch(adj, k)
        elif self.counter is cliques.parity_count:
            ans = _count_graphs_batch(adj, k) & 1
        else:
            ans = np.array([self.counter(_graph_from_adj(a), k) for a in adj],
                           dtype=np.int64)
        return self._apply_errors(ans)

    def count_batch_graphs(self, graphs, k: int) -> np.ndarray:
        ans = np.array([self.counter(g, k) for g in graphs], dtype=np.int64)
        return self._apply_errors(ans)


def _graph_from_adj(a: np.ndarray) -> Hypergraph:
    u, v = np.nonzero(np.triu(a, 1))
    return Hypergraph(a.shape[0], 2, list(zip(u.tolist(), v.tolist())))


def _count_graphs_batch(adj: np.ndarray, k: int) -> np.ndarray:
    """Vectorized k-clique counts on a (M, v, v) adjacency tensor."""
    m, v, _ = adj.shape
    if k > v:
        return np.zeros(m, dtype=np.int64)
    if k < 2:
        return np.full(m, comb(v, k), dtype=np.int64)
    a = adj.astype(np.float32)
    if k == 2:
        return (a.sum(axis=(1, 2)) / 2).round().astype(np.int64)
    if k == 3:
        t = a @ a
        return (np.einsum("mij,mij->m", t, a) / 6).round().astype(np.int64)
    if k == 4:
        # sum over edges (i,j) of the edge count inside the common
        # neighborhood; every 4-clique is counted once per its 6 edges
        total = np.zeros(m, dtype=np.float64)
        for i in range(v):
            for j in range(i + 1, v):
                common = a[:, i, :] * a[:, j, :]
                inner = np.einsum("mk,mkl,ml->m", common, a, common) / 2
                total += adj[:, i, j] * inner
        return (total / 6).round().astype(np.int64)
    return np.array([cliques.brute_force_count(_graph_from_adj(g), k) for g in adj],
                    dtype=np.int64)


# ---------------------------------------------------------------------------
# k-partite -> general inclusion-exclusion
# ---------------------------------------------------------------------------

def _part_subsets(k: int):
    """Nonempty subsets of the k parts, by size then lexicographic order."""
    out = []
    for d in range(1, k + 1):
        out.extend(combinations(range(k), d))
    return out


def _label_inclusion_exclusion(counts_by_subset: dict, k: int):
    """Recover the count of k-cliques with k distinct labels from per-subset
    k-clique counts of the augmented hypergraph."""
    some = np.asarray(next(iter(counts_by_subset.values())), dtype=np.int64)
    levels = [np.zeros_like(some)]  # cliques spanning 0 distinct labels: none
    for d in range(k):
        total = np.zeros_like(some)
        for t in combinations(range(k), d + 1):
            total += np.asarray(counts_by_subset[t], dtype=np.int64)
        for i in range(d + 1):
            total -= comb(k - i, d + 1 - i) * levels[i]
        levels.append(total)
    return levels[k]


_MAX_BATCH = 1 << 14  # rows per vectorized counting pass


class _KPLayout:
    """Precomputed geometry for batched pipeline evaluation of one (n, k, s)."""

    def __init__(self, n: int, k: int, s: int):
        self.n, self.k, self.s = n, k, s
        self.index = edge_index(n, k, s)
        self.label_rank = self.index.label_rank_array()
        self.nk = n * k
        self.subsets = _part_subsets(k)
        self.subset_vertices = {
            t: np.array([j * n + i for j in t for i in range(n)])
            for t in self.subsets}
        if s == 2:
            uu, vv = [], []
            for m in range(self.index.size):
                e = self.index.edge_at(m)
                uu.append(e[0][1] * n + e[0][0])
                vv.append(e[1][1] * n + e[1][0])
            self.edge_u = np.array(uu)
            self.edge_v = np.array(vv)
            wu, wv = [], []
            for j in range(k):
                for a, b in combinations(range(n), 2):
                    wu.append(j * n + a)
                    wv.append(j * n + b)
            self.within_u = np.array(wu)
            self.within_v = np.array(wv)
            # packed-row machinery: slot -> neighbor-mask contributions
            # (float32 keeps the packed masks exact up to 24 vertices)
            slot_u = np.concatenate([self.edge_u, self.within_u])
            slot_v = np.concatenate([self.edge_v, self.within_v])
            self.n_slots = len(slot_u)
            s2v = np.zeros((self.n_slots, self.nk), dtype=np.float32)
            s2v[np.arange(self.n_slots), slot_u] = 2.0 ** slot_v
            s2v[np.arange(self.n_slots), slot_v] = 2.0 ** slot_u
            self.slot_to_rows = s2v
            # all vertex pairs, visited once; per-part common-neighbor
            # popcounts are folded into per-subset triangle sums by one
            # stacked membership matrix
            pairs = list(combinations(range(self.nk), 2))
            self.pair_i = np.array([a for a, _ in pairs], dtype=np.int32)
            self.pair_j = np.array([b for _, b in pairs], dtype=np.int32)
            self.part_masks = np.array(
                [sum(1 << (j * n + i) for i in range(n)) for j in range(k)],
                dtype=np.int32)
            members = np.zeros((k * len(pairs), len(self.subsets)), dtype=np.float32)
            for pi_, (a, b) in enumerate(pairs):
                pa, pb = a // n, b // n
                for si, t in enumerate(self.subsets):
                    if pa in t and pb in t:
                        for j in t:
                            members[j * len(pairs) + pi_, si] = 1.0
            self.part_members = members
            self.n_base_pairs = len(pairs)
            self._scratch = None
            # vertex triples per subset, as pair-slot indices, for the
            # bit-sliced parity path
            slot_of_pair = {}
            for idx_ in range(self.index.size):
                e = self.index.edge_at(idx_)
                u, v = e[0][1] * n + e[0][0], e[1][1] * n + e[1][0]
                slot_of_pair[(min(u, v), max(u, v))] = idx_
            for w_, (u, v) in enumerate(zip(self.within_u, self.within_v)):
                slot_of_pair[(min(u, v), max(u, v))] = self.index.size + w_
            tri_slots, seg, lens = [], [], []
            for t in self.subsets:
                verts = sorted(int(v_) for v_ in self.subset_vertices[t])
                seg.append(len(tri_slots))
                for a, b, c_ in combinations(verts, 3):
                    tri_slots.append((slot_of_pair[(a, b)],
                                      slot_of_pair[(a, c_)],
                                      slot_of_pair[(b, c_)]))
                lens.append(len(tri_slots) - seg[-1])
            arr = np.array(tri_slots, dtype=np.int64).reshape(-1, 3)
            self.tri_a, self.tri_b, self.tri_c = arr[:, 0], arr[:, 1], arr[:, 2]
            self.tri_starts = np.array(seg, dtype=np.int64)
            self.tri_lens = np.array(lens, dtype=np.int64)
        else:
            self.within_sets = [e for e in combinations(range(self.nk), s)
                                if len({v // n for v in e}) < s]

    def scratch(self, m: int) -> dict:
        """Reusable working buffers for the packed counting pass, sliced to
        the current batch size (allocation dominates otherwise)."""
        if self._scratch is None or self._scratch["slots"].shape[0] < m:
            cap = max(m, _MAX_BATCH)
            p = self.n_base_pairs
            self._scratch = {
                "slots": np.empty((cap, self.n_slots), dtype=np.float32),
                "rows_f": np.empty((cap, self.nk), dtype=np.float32),
                "rows_i": np.empty((cap, self.nk), dtype=np.int32),
                "ri": np.empty((cap, p), dtype=np.int32),
                "rj": np.empty((cap, p), dtype=np.int32),
                "sh": np.empty((cap, p), dtype=np.int32),
                "pc": np.empty((cap, p), dtype=np.uint8),
                "stacked": np.empty((cap, self.k * p), dtype=np.float32),
                "sums": np.empty((cap, len(self.subsets)), dtype=np.float32),
            }
        return {key: buf[:m] for key, buf in self._scratch.items()}


def _packed_tri_counts(bits: np.ndarray, layout: _KPLayout, rng, c: float) -> dict:
    """Triangle counts per part subset for a batch of k-partite bit rows,
    via popcounts over packed neighbor masks (s = 2, k = 3 fast path).

    Appends a fresh within-part edge sample per row, exactly like the
    adjacency-tensor path.  For every vertex pair inside a subset: if the
    pair is an edge, the common neighbors within the subset each close a
    triangle; the per-subset sum counts every triangle three times.
    All scratch arrays are reused across calls.
    """
    m = bits.shape[0]
    npairs, k = layout.n_base_pairs, layout.k
    ws = layout.scratch(m)
    within = rng.random((m, len(layout.within_u)), dtype=np.float32) < c
    np.copyto(ws["slots"][:, :bits.shape[1]], bits)
    np.copyto(ws["slots"][:, bits.shape[1]:], within)
    np.matmul(ws["slots"], layout.slot_to_rows, out=ws["rows_f"])
    np.copyto(ws["rows_i"], ws["rows_f"], casting="unsafe")
    ri, sh = ws["ri"], ws["sh"]
    np.take(ws["rows_i"], layout.pair_i, axis=1, out=ri)
    np.right_shift(ri, layout.pair_j, out=sh)
    np.bitwise_and(sh, 1, out=sh)  # edge indicator per pair
    np.take(ws["rows_i"], layout.pair_j, axis=1, out=ws["rj"])
    np.bitwise_and(ri, ws["rj"], out=ri)  # common-neighbor mask
    stacked, tmp, pc = ws["stacked"], ws["rj"], ws["pc"]
    for j in range(k):
        np.bitwise_and(ri, layout.part_masks[j], out=tmp)
        np.bitwise_count(tmp, out=pc)
        np.multiply(pc, sh, out=stacked[:, j * npairs:(j + 1) * npairs],
                    casting="unsafe")
    # exact in float32: per-subset sums stay far below 2^24
    sums = np.matmul(stacked, layout.part_members, out=ws["sums"]).astype(np.int64)
    return {t: sums[:, i] // 3 for i, t in enumerate(layout.subsets)}


def _bitsliced_tri_parity(bits: np.ndarray, layout: _KPLayout, rng, c: float) -> dict:
    """Triangle-count parities per part subset, with the batch dimension
    packed into bytes: a triangle's presence is the AND of its three edge
    bit-planes and the parity is an XOR over a subset's vertex triples."""
    m = bits.shape[0]
    within = rng.random((m, len(layout.within_u)), dtype=np.float32) < c
    planes = np.packbits(np.concatenate([bits.T, within.T.astype(np.uint8)],
                                        axis=0), axis=1)
    tri = planes[layout.tri_a]
    tri &= planes[layout.tri_b]
    tri &= planes[layout.tri_c]
    out = {}
    for i, t in enumerate(layout.subsets):
        lo, ln = layout.tri_starts[i], layout.tri_lens[i]
        if ln == 0:
            out[t] = np.zeros(m, dtype=np.int64)
        else:
            acc = np.bitwise_xor.reduce(tri[lo:lo + ln], axis=0)
            out[t] = np.unpackbits(acc, count=m).astype(np.int64)
    return out


def _kp_counts_batch(bits: np.ndarray, layout: _KPLayout, oracle, c: float,
                     rng, parity: bool) -> np.ndarray:
    """Counts (or parities) of label-complete k-cliques for a batch of
    k-partite bit rows, going through the oracle on every part subset."""
    m = bits.shape[0]
    if m > _MAX_BATCH:
        return np.concatenate(
            [_kp_counts_batch(bits[lo:lo + _MAX_BATCH], layout, oracle, c, rng,
                              parity) for lo in range(0, m, _MAX_BATCH)])
    n, k, s, nk = layout.n, layout.k, layout.s, layout.nk
    counts = {}
    if s == 2 and k == 3 and n >= 2 and nk <= 24 and oracle.default_parity:
        raw = _bitsliced_tri_parity(bits, layout, rng, c)
        for t in layout.subsets:
            counts[t] = oracle.record_batch(raw[t])
    elif s == 2 and k == 3 and n >= 2 and nk <= 24 and oracle.default_counting:
        raw = _packed_tri_counts(bits, layout, rng, c)
        for t in layout.subsets:
            counts[t] = oracle.record_batch(raw[t])
    elif s == 2:
        adj = np.zeros((m, nk, nk), dtype=np.uint8)
        adj[:, layout.edge_u, layout.edge_v] = bits
        adj[:, layout.edge_v, layout.edge_u] = bits
        within = (rng.random((m, len(layout.within_u))) < c).astype(np.uint8)
        adj[:, layout.within_u, layout.within_v] = within
        adj[:, layout.within_v, layout.within_u] = within
        for t in layout.subsets:
            verts = layout.subset_vertices[t]
            sub = adj[:, verts[:, None], verts[None, :]]
            counts[t] = oracle.count_batch_adj(sub, k)
    else:
        graphs = []
        for row in bits:
            edges = [layout.index.edge_at(i) for i in np.nonzero(row)[0]]
            flat = [tuple(j * n + i for i, j in e) for e in edges]
            mask = rng.random(len(layout.within_sets)) < c
            flat.extend(e for e, keep in zip(layout.within_sets, mask) if keep)
            graphs.append(Hypergraph(nk, s, flat))
        for t in layout.subsets:
            verts = layout.subset_vertices[t]
            subs = [g.induced(verts) for g in graphs]
            counts[t] = oracle.count_batch_graphs(subs, k)
    result = _label_inclusion_exclusion(counts, k)
    result = np.asarray(result, dtype=np.int64)
    return result & 1 if parity else result


def kpartite_to_general_count(g: KPartiteHypergraph, oracle: AverageCaseOracle,
                              c: float, rng=None) -> int:
    """Count the label-complete k-cliques of a k-partite hypergraph using an
    oracle for plain counting: augment with within-part edges at density c,
    query every nonempty part subset's induced subhypergraph, and peel the
    label spectrum by inclusion-exclusion.  Exact whenever every one of the
    2^k - 1 oracle answers is exact."""
    rng = as_rng(rng)
    layout = _KPLayout(g.n, g.k, g.s)
    bits = g.to_bits(layout.index)[None, :].astype(np.uint8)
    return int(_kp_counts_batch(bits, layout, oracle, c, rng, parity=False)[0])


def kpartite_to_general_parity(g: KPartiteHypergraph, oracle: AverageCaseOracle,
                               c: float, rng=None) -> int:
    """Parity variant of :func:`kpartite_to_general_count`."""
    rng = as_rng(rng)
    layout = _KPLayout(g.n, g.k, g.s)
    bits = g.to_bits(layout.index)[None, :].astype(np.uint8)
    return int(_kp_counts_batch(bits, layout, oracle, c, rng, parity=True)[0])


# ---------------------------------------------------------------------------
# reduction parameters and reports
# ---------------------------------------------------------------------------

@dataclass
class ReductionParams:
    """Knobs of the reduction: repetitions per prime (majority voted),
    total failure budget for the expansion samplers, and the constant in the
    slowdown formulas."""

    repetitions: int = 5
    gamma: float = 0.05
    c_const: float = 1.0


@dataclass
class SlowdownParams:
    upsilon_sharp: float
    upsilon_p1: float
    upsilon_p2: float


@dataclass
class ReductionReport:
    count: int
    residues: ResidueVector
    oracle_calls: int
    injected_errors: int
    succeeded: bool
    prime_bits: dict = field(default_factory=dict)
    vote_margins: dict = field(default_factory=dict)
    failed_primes: tuple = ()

    def to_json(self) -> dict:
        return {
            "count": self.count,
            "primes": list(self.residues.primes),
            "residues": list(self.residues.residues),
            "oracle_calls": self.oracle_calls,
            "injected_errors": self.injected_errors,
            "succeeded": self.succeeded,
            "prime_bits": {str(p): b for p, b in self.prime_bits.items()},
            "vote_margins": {str(p): m for p, m in self.vote_margins.items()},
            "failed_primes": list(self.failed_primes),
        }


@dataclass
class ParityReport:
    parity: int
    oracle_calls: int
    injected_errors: int
    succeeded: bool
    votes: tuple = ()

    def to_json(self) -> dict:
        return {
            "parity": self.parity,
            "oracle_calls": self.oracle_calls,
            "injected_errors": self.injected_errors,
            "succeeded": self.succeeded,
            "votes": list(self.votes),
        }


def compute_slowdowns(n: int, c: float, k: int, s: int, c_const: float = 1.0) -> SlowdownParams:
    """The three slowdown / inverse error-tolerance parameters.

    upsilon_sharp = (C/(c(1-c)) * (s ln k + s lnln n) * ln n)^C(k,s)
    upsilon_p1    = (C/(c(1-c)) * s ln k * (s ln n + C(k,s) lnln C(k,s)))^C(k,s)
    upsilon_p2    = (C s ln k)^C(k,s)

    Natural logs; lnln terms are clamped at 0 when their argument drops
    below e (only relevant for degenerate k = s cases).
    """
    if c_const <= 0:
        raise ValueError("constant must be positive")
    d = comb(k, s)

    def lnln(x):
        return max(0.0, log(max(log(x), 1e-300))) if x > 1 else 0.0

    inv_c = 1.0 / (c * (1.0 - c))
    sharp = (c_const * inv_c * (s * log(k) + s * lnln(n)) * log(n)) ** d
    p1 = (c_const * inv_c * (s * log(k)) * (s * log(n) + d * lnln(d))) ** d
    p2 = (c_const * s * log(k)) ** d
    return SlowdownParams(upsilon_sharp=sharp, upsilon_p1=p1, upsilon_p2=p2)


def pipeline_bit_counts(n: int, k: int, s: int, c: float, gamma: float) -> dict:
    """Expansion bit count the pipeline will use for each selected prime."""
    n_edges = comb(k, s) * n ** s
    return {p: pipeline_expansion_spec(p, c, n_edges, gamma).n_bits
            for p in select_primes(n, k, s)}


def flip_rate_for_tolerance(n: int, k: int, s: int, c: float,
                            gamma: float = 0.05) -> float:
    """Oracle error rate 1 / (4 t^D 2^k) with t the largest per-prime
    expansion bit count used by the pipeline."""
    bits = max(pipeline_bit_counts(n, k, s, c, gamma).values())
    return 1.0 / (4 * bits ** comb(k, s) * 2 ** k)


def predicted_oracle_calls(n: int, k: int, s: int, c: float,
                           params: ReductionParams = None) -> int:
    """Oracle calls to_er_count will issue when no repetition aborts:
    sum over primes of R * 12D * bits^D * (2^k - 1)."""
    params = params or ReductionParams()
    d = comb(k, s)
    return sum(params.repetitions * 12 * d * b ** d * (2 ** k - 1)
               for b in pipeline_bit_counts(n, k, s, c, params.gamma).values())


# ---------------------------------------------------------------------------
# the counting pipeline
# ---------------------------------------------------------------------------

def _majority(votes):
    """(winner, margin): most common vote and its lead over the runner-up."""
    tally = {}
    for v in votes:
        tally[v] = tally.get(v, 0) + 1
    ranked = sorted(tally.items(), key=lambda kv: (-kv[1], kv[0]))
    margin = ranked[0][1] - (ranked[1][1] if len(ranked) > 1 else 0)
    return ranked[0][0], margin


def to_er_count(g: Hypergraph, k: int, oracle: AverageCaseOracle, c: float,
                params: ReductionParams = None, rng=None,
                reference=None) -> ReductionReport:
    """Count k-cliques of a worst-case hypergraph using only the oracle.

    Blow up to a k-partite instance, evaluate the clique polynomial mod each
    selected prime by random self-reduction (each curve point evaluated by the
    expansion decomposition, each 0/1 evaluation by inclusion-exclusion over
    oracle answers), majority-vote the repeated per-prime residues, and
    recombine by Chinese remaindering.  With an exact oracle the output
    equals the true count whenever every decode succeeds.
    """
    params = params or ReductionParams()
    rng = as_rng(rng)
    if not 0 < c < 1:
        raise ValueError("c must be in (0,1)")
    n, s = g.n, g.s
    layout = _KPLayout(n, k, s)
    xbits = blow_up_k_partite(g, k).to_bits(layout.index)
    primes = select_primes(n, k, s)
    calls_before = oracle.calls
    injected_before = oracle.injected

    residues, margins, bits_used, failed = [], {}, {}, []
    for p in primes:
        ctx = PrimeFieldCtx(p)
        spec = pipeline_expansion_spec(p, c, layout.index.size, params.gamma)
        bits_used[p] = spec.n_bits
        x = WeightedKPartiteInput(layout.index, xbits % p, ctx)

        def er_eval(rows):
            return _kp_counts_batch(rows.astype(np.uint8), layout, oracle, c,
                                    rng, parity=False) % p

        def eval_point(point):
            return weighted_to_unweighted(point, c, params.gamma, er_eval, rng)

        votes = []
        for _ in range(params.repetitions):
            try:
                votes.append(random_self_reduce(x, eval_point, rng))
            except (SamplerFailure, DecodeFailure):
                pass
        if votes:
            winner, margin = _majority(votes)
            residues.append(winner)
            margins[p] = margin
        else:
            residues.append(0)
            margins[p] = 0
            failed.append(p)

    rv = ResidueVector(tuple(primes), tuple(residues))
    count = crt_combine(rv)
    succeeded = not failed and (reference is None or count == reference)
    return ReductionReport(
        count=count, residues=rv,
        oracle_calls=oracle.calls - calls_before,
        injected_errors=oracle.injected - injected_before,
        succeeded=succeeded, prime_bits=bits_used, vote_margins=margins,
        failed_primes=tuple(failed))


# ---------------------------------------------------------------------------
# the parity pipeline
# ---------------------------------------------------------------------------

def to_er_parity(g: Hypergraph, k: int, oracle: AverageCaseOracle, c: float,
                 params: ReductionParams = None, rng=None,
                 reference=None) -> ParityReport:
    """Parity of the k-clique count of a worst-case hypergraph using a parity
    oracle on near-ER inputs.

    The polynomial is evaluated over the binary extension field of order
    2^ceil(log2(12 C(k,s))) by random self-reduction; each curve point is
    decomposed onto the normal basis into base-field inputs, which at
    c = 1/2 are already uniform 0/1 vectors (fast path) and otherwise pass
    through the mod-2 expansion decomposition.
    """
    params = params or ReductionParams()
    rng = as_rng(rng)
    if not 0 < c < 1:
        raise ValueError("c must be in (0,1)")
    n, s = g.n, g.s
    d = comb(k, s)
    kappa = max(1, (12 * d - 1).bit_length())
    ctx = find_normal_basis(2, kappa)
    f2 = PrimeFieldCtx(2)
    layout = _KPLayout(n, k, s)
    xbits = blow_up_k_partite(g, k).to_bits(layout.index)
    x = WeightedKPartiteInput(layout.index, xbits, ctx)
    calls_before = oracle.calls
    injected_before = oracle.injected

    def parity_eval(rows):
        return _kp_counts_batch(rows.astype(np.uint8), layout, oracle, c,
                                rng, parity=True)

    if c == 0.5:
        base_eval = parity_eval
    else:
        def base_eval(rows):
            return weighted_to_unweighted_batch(rows, layout.index, f2, c,
                                                params.gamma, parity_eval, rng)

    def eval_point(point):
        return ext_to_base_reduce(point, base_eval, ctx)

    votes = []
    for _ in range(params.repetitions):
        try:
            votes.append(0 if random_self_reduce(x, eval_point, rng) == 0 else 1)
        except (SamplerFailure, DecodeFailure):
            pass
    succeeded = bool(votes)
    parity = _majority(votes)[0] if votes else 0
    if reference is not None:
        succeeded = succeeded and parity == reference
    return ParityReport(parity=parity,
                        oracle_calls=oracle.calls - calls_before,
                        injected_errors=oracle.injected - injected_before,
                        succeeded=succeeded, votes=tuple(votes))


# ---------------------------------------------------------------------------
# decide from parity
# ---------------------------------------------------------------------------

def decide_via_parity(g: Hypergraph, k: int, parity_solver, rng=None,
                      trials_factor: int = 8) -> bool:
    """Decide k-clique existence from a parity solver.

    Evaluates the clique indicator polynomial at trials_factor * 2^k random
    0/1 points; each evaluation is the parity of the count on the induced
    subhypergraph of a uniform vertex subset.  Accepts iff any parity is odd,
    so a correct solver never yields a false accept.
    """
    rng = as_rng(rng)
    for _ in range(trials_factor * 2 ** k):
        keep = np.nonzero(rng.random(g.n) < 0.5)[0]
        if len(keep) < k:
            continue
        if parity_solver(g.induced(keep), k) & 1:
            return True
    return False
