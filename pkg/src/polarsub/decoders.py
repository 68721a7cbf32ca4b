"""Successive-cancellation and min-sum list decoding with score tracking.

Decoding follows the usual binary-tree schedule over the transform: at phase
i the layers below the lowest set bit of i are refreshed (check combine at
even nodes, variable combine at odd nodes), the leaf LLR decides or forces
the bit, and partial codeword sums fold back up.  A path's score accumulates
a penalty of -|S| whenever its decision disagrees with the sign of the leaf
LLR S (sign of 0 counts as +).

The list decoder keeps per-layer workspace pools with per-path indirection
so that cloning a path copies indices, not LLR arrays; a naive full-copy
reference implementation (`scl_decode_reference`) pins down the semantics.

Operation counters follow one convention throughout: every evaluated
check-combine output costs one comparison (the min), every evaluated
variable-combine output costs one addition, every penalty evaluation costs
one comparison plus one addition when the penalty is nonzero, and pruning
2L candidates down to L costs 2L comparisons.  GF(2) bookkeeping is free.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numba import njit

from . import transform
from .construction import CodeSpec

# stands in for "position known perfectly"; large but safe to add ~2^m times
LLR_SATURATION = 1.0e30


def llr_combine_check(a, b):
    """Min-sum check combine: sgn(a) sgn(b) min(|a|, |b|)."""
    return np.sign(a) * np.sign(b) * np.minimum(np.abs(a), np.abs(b))


def llr_combine_var(a, b, u_prev):
    """Variable combine: (-1)^u_prev * a + b."""
    return np.where(np.asarray(u_prev) == 0, a, -a) + b


def penalty(u: int, s: float) -> float:
    """Score penalty for deciding bit u against leaf LLR s (sgn 0 = +)."""
    agrees = s >= 0.0 if u == 0 else s < 0.0
    return 0.0 if agrees else -abs(s)


@dataclass
class DecodeResult:
    """Best path of one decode plus bookkeeping for analysis."""

    message: np.ndarray
    codeword: np.ndarray
    input_vector: np.ndarray
    score: float
    additions: int
    comparisons: int
    final_scores: np.ndarray


@njit(cache=True)
def _layer_offsets(m):
    n = 1 << m
    offs = np.empty(m + 2, np.int64)
    offs[0] = 0
    offs[1] = 0
    for lam in range(1, m + 1):
        offs[lam + 1] = offs[lam] + (n >> lam)
    return offs


@njit(cache=True)
def _first_layer(i, m):
    if i == 0:
        return 1
    z = 0
    v = i
    while v & 1 == 0:
        z += 1
        v >>= 1
    return m - z


@njit(cache=True)
def _sc_kernel(chan_llr, frozen_flag, acc_id, upd_indptr, upd_ids, n_dyn, m):
    n = 1 << m
    offs = _layer_offsets(m)
    total = offs[m + 1]
    llr_ws = np.zeros(total, np.float64)
    beta_ws = np.zeros(total, np.uint8)
    accs = np.zeros(max(n_dyn, 1), np.uint8)
    u = np.zeros(n, np.uint8)
    fold = np.zeros(n, np.uint8)
    score = 0.0
    adds = 0
    cmps = 0

    for i in range(n):
        for lam in range(_first_layer(i, m), m + 1):
            seg = n >> lam
            node = i >> (m - lam)
            off = offs[lam]
            poff = offs[lam - 1]
            if node & 1 == 0:
                for j in range(seg):
                    if lam == 1:
                        a = chan_llr[j]
                        b = chan_llr[j + seg]
                    else:
                        a = llr_ws[poff + j]
                        b = llr_ws[poff + seg + j]
                    aa = abs(a)
                    ab = abs(b)
                    v = aa if aa < ab else ab
                    if (a < 0.0) != (b < 0.0):
                        v = -v
                    llr_ws[off + j] = v
                cmps += seg
            else:
                for j in range(seg):
                    if lam == 1:
                        a = chan_llr[j]
                        b = chan_llr[j + seg]
                    else:
                        a = llr_ws[poff + j]
                        b = llr_ws[poff + seg + j]
                    llr_ws[off + j] = (b - a) if beta_ws[off + j] else (b + a)
                adds += seg

        s = llr_ws[offs[m]]
        if frozen_flag[i]:
            aid = acc_id[i]
            fb = accs[aid] if aid >= 0 else np.uint8(0)
            cmps += 1
            if fb == 0:
                pen = s if s < 0.0 else 0.0
            else:
                pen = -s if s >= 0.0 else 0.0
            if pen != 0.0:
                score += pen
                adds += 1
            u[i] = fb
        else:
            cmps += 1
            u[i] = 1 if s < 0.0 else 0

        if u[i] == 1:
            for ptr in range(upd_indptr[i], upd_indptr[i + 1]):
                accs[upd_ids[ptr]] ^= 1

        # fold partial sums upward
        fold[0] = u[i]
        vlen = 1
        lam = m
        j = i
        while True:
            if j & 1 == 0:
                off = offs[lam]
                for x in range(vlen):
                    beta_ws[off + x] = fold[x]
                break
            off = offs[lam]
            for x in range(vlen):
                fold[vlen + x] = fold[x]
                fold[x] = beta_ws[off + x] ^ fold[x]
            vlen *= 2
            lam -= 1
            j >>= 1
            if lam == 0:
                break

    return u, score, adds, cmps


@njit(cache=True)
def _forced_llrs_kernel(chan_llr, u_batch, m):
    """Leaf LLRs seen along forced decision paths, one row per input vector."""
    n = 1 << m
    n_rows = u_batch.shape[0]
    offs = _layer_offsets(m)
    total = offs[m + 1]
    out = np.empty((n_rows, n), np.float64)
    llr_ws = np.zeros(total, np.float64)
    beta_ws = np.zeros(total, np.uint8)
    fold = np.zeros(n, np.uint8)
    for r in range(n_rows):
        chan = chan_llr[r] if chan_llr.shape[0] > 1 else chan_llr[0]
        for i in range(n):
            for lam in range(_first_layer(i, m), m + 1):
                seg = n >> lam
                node = i >> (m - lam)
                off = offs[lam]
                poff = offs[lam - 1]
                if node & 1 == 0:
                    for j in range(seg):
                        if lam == 1:
                            a = chan[j]
                            b = chan[j + seg]
                        else:
                            a = llr_ws[poff + j]
                            b = llr_ws[poff + seg + j]
                        aa = abs(a)
                        ab = abs(b)
                        v = aa if aa < ab else ab
                        if (a < 0.0) != (b < 0.0):
                            v = -v
                        llr_ws[off + j] = v
                else:
                    for j in range(seg):
                        if lam == 1:
                            a = chan[j]
                            b = chan[j + seg]
                        else:
                            a = llr_ws[poff + j]
                            b = llr_ws[poff + seg + j]
                        llr_ws[off + j] = (b - a) if beta_ws[off + j] else (b + a)
            out[r, i] = llr_ws[offs[m]]

            fold[0] = u_batch[r, i]
            vlen = 1
            lam = m
            j = i
            while True:
                if j & 1 == 0:
                    off = offs[lam]
                    for x in range(vlen):
                        beta_ws[off + x] = fold[x]
                    break
                off = offs[lam]
                for x in range(vlen):
                    fold[vlen + x] = fold[x]
                    fold[x] = beta_ws[off + x] ^ fold[x]
                vlen *= 2
                lam -= 1
                j >>= 1
                if lam == 0:
                    break
    return out


@njit(cache=True)
def _scl_kernel(chan_llr, frozen_flag, acc_id, upd_indptr, upd_ids, n_dyn, list_size, m):
    n = 1 << m
    L = list_size
    offs = _layer_offsets(m)
    total = offs[m + 1]

    pool_llr = np.zeros((L, total), np.float64)
    idx_llr = np.zeros((m + 1, L), np.int64)
    pool_beta = np.zeros((L, total), np.uint8)
    idx_beta = np.zeros((m + 1, L), np.int64)
    accs = np.zeros((L, max(n_dyn, 1)), np.uint8)
    accs2 = np.zeros_like(accs)
    scores = np.zeros(L, np.float64)
    scores2 = np.zeros_like(scores)
    u_hist = np.zeros((L, n), np.uint8)
    u_hist2 = np.zeros_like(u_hist)
    idx_llr2 = np.zeros_like(idx_llr)
    idx_beta2 = np.zeros_like(idx_beta)
    cand = np.zeros(2 * L, np.float64)
    sel = np.zeros(2 * L, np.int64)
    fold = np.zeros(n, np.uint8)

    adds = 0
    cmps = 0
    alive = 1

    for i in range(n):
        for lam in range(_first_layer(i, m), m + 1):
            seg = n >> lam
            node = i >> (m - lam)
            off = offs[lam]
            poff = offs[lam - 1]
            if node & 1 == 0:
                for p in range(alive):
                    pr = idx_llr[lam - 1, p]
                    for j in range(seg):
                        if lam == 1:
                            a = chan_llr[j]
                            b = chan_llr[j + seg]
                        else:
                            a = pool_llr[pr, poff + j]
                            b = pool_llr[pr, poff + seg + j]
                        aa = abs(a)
                        ab = abs(b)
                        v = aa if aa < ab else ab
                        if (a < 0.0) != (b < 0.0):
                            v = -v
                        pool_llr[p, off + j] = v
                    idx_llr[lam, p] = p
                cmps += alive * seg
            else:
                for p in range(alive):
                    pr = idx_llr[lam - 1, p]
                    br = idx_beta[lam, p]
                    for j in range(seg):
                        if lam == 1:
                            a = chan_llr[j]
                            b = chan_llr[j + seg]
                        else:
                            a = pool_llr[pr, poff + j]
                            b = pool_llr[pr, poff + seg + j]
                        pool_llr[p, off + j] = (b - a) if pool_beta[br, off + j] else (b + a)
                    idx_llr[lam, p] = p
                adds += alive * seg

        leaf = offs[m]
        if frozen_flag[i]:
            aid = acc_id[i]
            for p in range(alive):
                s = pool_llr[p, leaf]
                fb = accs[p, aid] if aid >= 0 else np.uint8(0)
                cmps += 1
                if fb == 0:
                    pen = s if s < 0.0 else 0.0
                else:
                    pen = -s if s >= 0.0 else 0.0
                if pen != 0.0:
                    scores[p] += pen
                    adds += 1
                u_hist[p, i] = fb
        else:
            n_cand = 2 * alive
            for p in range(alive):
                s = pool_llr[p, leaf]
                cmps += 1
                pen0 = s if s < 0.0 else 0.0
                pen1 = -s if s >= 0.0 else 0.0
                cand[p] = scores[p] + pen0
                cand[alive + p] = scores[p] + pen1
                if pen0 != 0.0:
                    adds += 1
                if pen1 != 0.0:
                    adds += 1
            if n_cand <= L:
                keep = n_cand
                for s_i in range(keep):
                    sel[s_i] = s_i
            else:
                keep = L
                order = np.argsort(-cand[:n_cand], kind="mergesort")
                for s_i in range(keep):
                    sel[s_i] = order[s_i]
                cmps += n_cand

            for s_i in range(keep):
                c = sel[s_i]
                if c < alive:
                    par = c
                    bit = np.uint8(0)
                else:
                    par = c - alive
                    bit = np.uint8(1)
                scores2[s_i] = cand[c]
                for d in range(n_dyn):
                    accs2[s_i, d] = accs[par, d]
                for j in range(i):
                    u_hist2[s_i, j] = u_hist[par, j]
                u_hist2[s_i, i] = bit
                for lam in range(1, m + 1):
                    idx_llr2[lam, s_i] = idx_llr[lam, par]
                    idx_beta2[lam, s_i] = idx_beta[lam, par]
            scores, scores2 = scores2, scores
            accs, accs2 = accs2, accs
            u_hist, u_hist2 = u_hist2, u_hist
            idx_llr, idx_llr2 = idx_llr2, idx_llr
            idx_beta, idx_beta2 = idx_beta2, idx_beta
            alive = keep

        for p in range(alive):
            if u_hist[p, i] == 1:
                for ptr in range(upd_indptr[i], upd_indptr[i + 1]):
                    accs[p, upd_ids[ptr]] ^= 1

        for p in range(alive):
            fold[0] = u_hist[p, i]
            vlen = 1
            lam = m
            j = i
            while True:
                if j & 1 == 0:
                    off = offs[lam]
                    for x in range(vlen):
                        pool_beta[p, off + x] = fold[x]
                    idx_beta[lam, p] = p
                    break
                off = offs[lam]
                br = idx_beta[lam, p]
                for x in range(vlen):
                    fold[vlen + x] = fold[x]
                    fold[x] = pool_beta[br, off + x] ^ fold[x]
                vlen *= 2
                lam -= 1
                j >>= 1
                if lam == 0:
                    break

    return u_hist[:alive], scores[:alive], alive, adds, cmps


@dataclass(frozen=True)
class _DecoderTables:
    frozen_flag: np.ndarray
    acc_id: np.ndarray
    upd_indptr: np.ndarray
    upd_ids: np.ndarray
    n_dyn: int


_TABLE_CACHE: dict[int, _DecoderTables] = {}


def _tables(spec: CodeSpec) -> _DecoderTables:
    cached = _TABLE_CACHE.get(id(spec))
    if cached is not None:
        return cached
    full = spec.full_length
    frozen_flag = np.zeros(full, np.uint8)
    frozen_flag[spec.row_terminus] = 1
    acc_id = np.full(full, -1, np.int32)
    per_col: list[list[int]] = [[] for _ in range(full)]
    n_dyn = 0
    for r, role in enumerate(spec.row_roles):
        sup = spec._row_supports[r]
        if role in ("dfca", "dfcb"):
            acc_id[spec.row_terminus[r]] = n_dyn
            for c in sup:
                per_col[int(c)].append(n_dyn)
            n_dyn += 1
    indptr = np.zeros(full + 1, np.int64)
    ids: list[int] = []
    for c in range(full):
        ids.extend(per_col[c])
        indptr[c + 1] = len(ids)
    tables = _DecoderTables(
        frozen_flag=frozen_flag,
        acc_id=acc_id,
        upd_indptr=indptr,
        upd_ids=np.array(ids, dtype=np.int64),
        n_dyn=n_dyn,
    )
    _TABLE_CACHE[id(spec)] = tables
    return tables


def expand_channel_llrs(spec: CodeSpec, llr: np.ndarray) -> np.ndarray:
    """Length-n channel LLRs -> full-length decoder input.

    Shortened output positions are known-zero, so they enter saturated; the
    result is then put in transform-natural order for the tree schedule.
    """
    llr = np.asarray(llr, dtype=np.float64)
    if llr.shape != (spec.n,):
        raise ValueError(f"LLR vector must have length {spec.n}")
    full = np.full(spec.full_length, LLR_SATURATION, dtype=np.float64)
    full[transform.surviving_positions(spec.m, spec.n)] = llr
    return full[transform.bit_reverse_permutation(spec.m)]


def _result_from_path(spec: CodeSpec, u: np.ndarray, score: float,
                      adds: int, cmps: int, final_scores: np.ndarray) -> DecodeResult:
    msg = u[spec.info_positions].copy()
    codeword = transform.shorten_output(transform.encode(u), spec.n)
    return DecodeResult(
        message=msg,
        codeword=codeword,
        input_vector=u.copy(),
        score=float(score),
        additions=int(adds),
        comparisons=int(cmps),
        final_scores=np.asarray(final_scores, dtype=np.float64),
    )


def sc_decode(spec: CodeSpec, llr: np.ndarray) -> DecodeResult:
    """Single-path successive cancellation."""
    tab = _tables(spec)
    chan = expand_channel_llrs(spec, llr)
    u, score, adds, cmps = _sc_kernel(
        chan, tab.frozen_flag, tab.acc_id, tab.upd_indptr, tab.upd_ids, tab.n_dyn, spec.m
    )
    return _result_from_path(spec, u, score, adds, cmps, np.array([score]))


def scl_decode(spec: CodeSpec, llr: np.ndarray, list_size: int) -> DecodeResult:
    """Min-sum list decoding; returns the highest-scoring final path.

    Ties in pruning and in the final selection resolve to the lower path
    index.
    """
    if list_size < 1:
        raise ValueError("list size must be >= 1")
    tab = _tables(spec)
    chan = expand_channel_llrs(spec, llr)
    u_hist, scores, alive, adds, cmps = _scl_kernel(
        chan, tab.frozen_flag, tab.acc_id, tab.upd_indptr, tab.upd_ids,
        tab.n_dyn, list_size, spec.m,
    )
    best = int(np.argmax(scores[:alive]))
    return _result_from_path(spec, u_hist[best], scores[best], adds, cmps, scores[:alive].copy())


def forced_decision_llrs(chan_llr: np.ndarray, u: np.ndarray) -> np.ndarray:
    """Leaf LLRs along forced paths.

    `chan_llr` is one full-length decoder input (already expanded), or a
    batch broadcast against the (batch, 2^m) forced input vectors `u`.
    """
    u = np.atleast_2d(np.asarray(u, dtype=np.uint8))
    chan = np.atleast_2d(np.asarray(chan_llr, dtype=np.float64))
    n = u.shape[1]
    m = (n - 1).bit_length()
    if chan.shape[0] not in (1, u.shape[0]) or chan.shape[1] != n:
        raise ValueError("channel LLR shape does not match forced inputs")
    return _forced_llrs_kernel(np.ascontiguousarray(chan), np.ascontiguousarray(u), m)


def path_penalties(u: np.ndarray, leaf_llrs: np.ndarray) -> np.ndarray:
    """Per-phase score penalties of a decision sequence given its leaf LLRs."""
    u = np.asarray(u)
    s = np.asarray(leaf_llrs)
    pen0 = np.minimum(s, 0.0)
    pen1 = -np.maximum(s, 0.0)
    return np.where(u == 0, pen0, pen1)


def forced_path_score(spec: CodeSpec, llr: np.ndarray, u: np.ndarray) -> float:
    """Score the decoder would assign the path following input vector u.

    Accumulates penalties phase by phase in the decoder's own order, so the
    value is bit-exact comparable with decoder scores.
    """
    chan = expand_channel_llrs(spec, llr)
    leaf = forced_decision_llrs(chan, u)[0]
    pens = path_penalties(np.asarray(u, dtype=np.uint8), leaf)
    score = 0.0
    for p in pens:
        if p != 0.0:
            score += p
    return score


class _ReferencePath:
    """One list-decoder hypothesis with fully materialized state."""

    __slots__ = ("llr", "beta", "u", "score", "accs")

    def __init__(self, m: int, n_dyn: int):
        n = 1 << m
        self.llr = np.zeros((m + 1, n), dtype=np.float64)
        self.beta = np.zeros((m + 1, n), dtype=np.uint8)
        self.u = np.zeros(n, dtype=np.uint8)
        self.score = 0.0
        self.accs = np.zeros(max(n_dyn, 1), dtype=np.uint8)

    def clone(self) -> "_ReferencePath":
        other = object.__new__(_ReferencePath)
        other.llr = self.llr.copy()
        other.beta = self.beta.copy()
        other.u = self.u.copy()
        other.score = self.score
        other.accs = self.accs.copy()
        return other


def scl_decode_reference(spec: CodeSpec, llr: np.ndarray, list_size: int) -> DecodeResult:
    """Naive list decoder: clones copy the whole workspace.

    Semantically identical to `scl_decode` (same schedule, penalties, and
    tie-breaking); exists as the correctness oracle for the pooled
    implementation.  Operation counters are not tracked here.
    """
    if list_size < 1:
        raise ValueError("list size must be >= 1")
    tab = _tables(spec)
    m, n = spec.m, spec.full_length
    chan = expand_channel_llrs(spec, llr)

    start = _ReferencePath(m, tab.n_dyn)
    start.llr[0] = chan
    paths = [start]

    for i in range(n):
        for lam in range(_first_layer(i, m), m + 1):
            seg = n >> lam
            node = i >> (m - lam)
            base = (i >> (m - lam + 1)) * (2 * seg)
            lo = node * seg
            for path in paths:
                a = path.llr[lam - 1, base : base + seg]
                b = path.llr[lam - 1, base + seg : base + 2 * seg]
                if node & 1 == 0:
                    path.llr[lam, lo : lo + seg] = llr_combine_check(a, b)
                else:
                    left = path.beta[lam, (node - 1) * seg : node * seg]
                    path.llr[lam, lo : lo + seg] = llr_combine_var(a, b, left)

        if tab.frozen_flag[i]:
            aid = tab.acc_id[i]
            for path in paths:
                s = float(path.llr[m, i])
                forced = int(path.accs[aid]) if aid >= 0 else 0
                path.score += penalty(forced, s)
                path.u[i] = forced
        else:
            candidates = []
            for ci, (path, bit) in enumerate(
                [(p, 0) for p in paths] + [(p, 1) for p in paths]
            ):
                s = float(path.llr[m, i])
                candidates.append((path.score + penalty(bit, s), ci, path, bit))
            if len(candidates) > list_size:
                # prune to the best list_size, ties to the lower candidate index
                candidates.sort(key=lambda c: (-c[0], c[1]))
                candidates = candidates[:list_size]
            new_paths = []
            for score, _, path, bit in candidates:
                clone = path.clone()
                clone.score = score
                clone.u[i] = bit
                new_paths.append(clone)
            paths = new_paths

        for path in paths:
            if path.u[i]:
                lo_ptr, hi_ptr = tab.upd_indptr[i], tab.upd_indptr[i + 1]
                for a in tab.upd_ids[lo_ptr:hi_ptr]:
                    path.accs[a] ^= 1

        for path in paths:
            path.beta[m, i] = path.u[i]
            lam = m
            j = i
            seg = 1
            while j & 1 == 1 and lam > 1:
                lo = (j - 1) * seg
                parent_lo = (j >> 1) * (2 * seg)
                left = path.beta[lam, lo : lo + seg]
                right = path.beta[lam, lo + seg : lo + 2 * seg]
                path.beta[lam - 1, parent_lo : parent_lo + seg] = left ^ right
                path.beta[lam - 1, parent_lo + seg : parent_lo + 2 * seg] = right
                lam -= 1
                j >>= 1
                seg *= 2

    best = max(range(len(paths)), key=lambda p: (paths[p].score, -p))
    u = paths[best].u
    return _result_from_path(
        spec, u, paths[best].score, 0, 0,
        np.array([p.score for p in paths]),
    )
