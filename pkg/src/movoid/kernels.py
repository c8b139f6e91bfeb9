"""Hot inner loops.

Every kernel exists twice: a numba ``@njit`` version and a pure-numpy
version with identical results. The numba path is used when numba imports
and ``MOVOID_NUMBA`` is not set to ``0``; the public names at the bottom of
this module dispatch accordingly. ``benchmarks/bench_kernels.py`` times
both paths against each other.

All arithmetic is integer-valued. Small-field arithmetic uses label tables:
label 0 is zero, label ``1 + k`` is the k-th power of a fixed generator of
the subfield's multiplicative group.
"""

import os

import numpy as np

try:
    import numba
    from numba import njit
except ImportError:  # pragma: no cover - numba is a hard dependency in practice
    numba = None

_FLAG = os.environ.get("MOVOID_NUMBA", "1").strip().lower()
USE_NUMBA = numba is not None and _FLAG not in ("0", "false", "no", "off")


def backend():
    return "numba" if USE_NUMBA else "numpy"


# ---------------------------------------------------------------------------
# trace histograms: exact character sums as counts of trace values

def _trace_histograms_np(table, logs, shifts, p):
    n = table.shape[0]
    logs = np.asarray(logs, dtype=np.int64)
    out = np.zeros((len(shifts), p), dtype=np.int64)
    for i, s in enumerate(shifts):
        idx = logs + int(s)
        idx %= n
        out[i] = np.bincount(table[idx], minlength=p)[:p]
    return out


# ---------------------------------------------------------------------------
# perp counts: |<y>^perp ∩ M| for many y at once
#
# zero_mask[k] is 1 iff Tr_{q/p^e}(gamma^k) = 0. For y with log L(y) = c and a
# point <gamma^a>, f(gamma^a, y) = Tr(gamma^(a + c)), so the count for y is
# sum over a in M of zero_mask[(a + c) mod (q-1)].

def _perp_counts_np(zero_mask, m_logs, y_shifts, chunk=64):
    n = zero_mask.shape[0]
    doubled = np.concatenate([zero_mask, zero_mask]).astype(np.int32)
    a = np.asarray(m_logs, dtype=np.int64) % n
    c = np.asarray(y_shifts, dtype=np.int64) % n
    out = np.empty(len(c), dtype=np.int64)
    for lo in range(0, len(c), chunk):
        block = c[lo:lo + chunk]
        out[lo:lo + len(block)] = doubled[block[:, None] + a[None, :]].sum(axis=1)
    return out


# ---------------------------------------------------------------------------
# generator enumeration
#
# Maximal totally isotropic subspaces of (F^n, gram) are enumerated by their
# reduced row echelon form. For a fixed pivot set the rows are filled from
# the last pivot upwards; a row is kept only if it is orthogonal to every row
# fixed so far. Each subspace has exactly one RREF, so nothing is emitted
# twice. For every emitted subspace the number of its projective points that
# lie in M is recorded.

def _tdot_np(add_t, mul_t, rows, w):
    """Table dot product of each row of ``rows`` with vector ``w``."""
    acc = np.zeros(rows.shape[:-1], dtype=np.int64)
    for pos in range(rows.shape[-1]):
        acc = add_t[acc, mul_t[rows[..., pos], w[pos]]]
    return acc


def _gram_apply_np(add_t, mul_t, gram, v):
    return _tdot_np(add_t, mul_t, gram, v)


def _candidate_rows(fq, n, pivot, free):
    """All candidate rows with a leading one at ``pivot`` and free entries at
    positions ``free``, ordered by base-fq value of the free entries."""
    k = len(free)
    count = fq ** k
    rows = np.zeros((count, n), dtype=np.int64)
    rows[:, pivot] = 1
    c = np.arange(count)
    for t, col in enumerate(free):
        rows[:, col] = (c // fq ** t) % fq
    return rows


def _rref_generators_np(fq, n, r, add_t, mul_t, gram, pivots, free_cols,
                        n_free, work, coord_point, in_m, combos, target):
    add_t = np.asarray(add_t, dtype=np.int64)
    mul_t = np.asarray(mul_t, dtype=np.int64)
    gram = np.asarray(gram, dtype=np.int64)
    powers = fq ** np.arange(n, dtype=np.int64)
    bases_out = []
    meets_out = []
    cache = {}

    def rows_for(pidx, level):
        key = (pidx, level)
        if key not in cache:
            j = r - 1 - level
            free = free_cols[pidx, j, :n_free[pidx, j]]
            cache[key] = _candidate_rows(fq, n, pivots[pidx, j], free)
        return cache[key]

    def meets_for(fixed, last_rows):
        # fixed: list of (n,) rows for levels < r-1; last_rows: (S, n)
        S = last_rows.shape[0]
        K = combos.shape[0]
        vec = np.zeros((S, K, n), dtype=np.int64)
        for lvl in range(r):
            j = r - 1 - lvl
            coeff = combos[:, j]
            if lvl < r - 1:
                term = mul_t[coeff[:, None], fixed[lvl][None, :]][None, :, :]
                vec = add_t[vec, np.broadcast_to(term, vec.shape)]
            else:
                term = mul_t[coeff[None, :, None], last_rows[:, None, :]]
                vec = add_t[vec, term]
        idx = (vec * powers).sum(axis=2)
        pts = coord_point[idx]
        return in_m[pts].sum(axis=1).astype(np.int64)

    def emit(fixed, last_rows, meets):
        for s in range(last_rows.shape[0]):
            rows = fixed + [last_rows[s]]
            basis = np.array([rows[r - 1 - j] for j in range(r)], dtype=np.int8)
            bases_out.append(basis)
        meets_out.append(meets)

    def descend(pidx, level, fixed, ws):
        cands = rows_for(pidx, level)
        ok = np.ones(cands.shape[0], dtype=bool)
        for w in ws:
            ok &= _tdot_np(add_t, mul_t, cands, w) == 0
        surv = cands[ok]
        if level == r - 1:
            if surv.shape[0]:
                meets = meets_for(fixed, surv)
                emit(fixed, surv, meets)
                if target >= 0 and np.any(meets != target):
                    return True
            return False
        for row in surv:
            w = _gram_apply_np(add_t, mul_t, gram, row)
            if descend(pidx, level + 1, fixed + [row], ws + [w]):
                return True
        return False

    for pidx, c0 in work:
        first = rows_for(int(pidx), 0)[int(c0)]
        if r == 1:
            meets = meets_for([], first[None, :])
            emit([], first[None, :], meets)
            if target >= 0 and meets[0] != target:
                break
            continue
        w0 = _gram_apply_np(add_t, mul_t, gram, first)
        if descend(int(pidx), 1, [first], [w0]):
            break

    if bases_out:
        bases = np.stack(bases_out)
        meets = np.concatenate(meets_out)
    else:
        bases = np.zeros((0, r, n), dtype=np.int8)
        meets = np.zeros(0, dtype=np.int64)
    if target >= 0:
        bad = np.nonzero(meets != target)[0]
        if len(bad):
            stop = bad[0] + 1
            bases, meets = bases[:stop], meets[:stop]
    return bases, meets


if USE_NUMBA:

    @njit(cache=True, nogil=True)
    def _trace_histograms_nb(table, logs, shifts, p):
        n = table.shape[0]
        out = np.zeros((shifts.shape[0], p), dtype=np.int64)
        for i in range(shifts.shape[0]):
            s = shifts[i] % n
            for t in range(logs.shape[0]):
                k = logs[t] + s
                if k >= n:
                    k -= n
                out[i, table[k]] += 1
        return out

    @njit(cache=True, nogil=True)
    def _perp_counts_nb(zero_mask, m_logs, y_shifts):
        n = zero_mask.shape[0]
        out = np.zeros(y_shifts.shape[0], dtype=np.int64)
        for i in range(y_shifts.shape[0]):
            c = y_shifts[i] % n
            acc = 0
            for t in range(m_logs.shape[0]):
                k = m_logs[t] + c
                if k >= n:
                    k -= n
                acc += zero_mask[k]
            out[i] = acc
        return out

    @njit(cache=True, nogil=True)
    def _fill_row_nb(row, fq, pivot, free, nfree, c):
        row[:] = 0
        row[pivot] = 1
        for t in range(nfree):
            row[free[t]] = c % fq
            c //= fq

    @njit(cache=True, nogil=True)
    def _gram_apply_nb(add_t, mul_t, gram, v, out):
        n = v.shape[0]
        for a in range(n):
            acc = 0
            for b in range(n):
                acc = add_t[acc, mul_t[gram[a, b], v[b]]]
            out[a] = acc

    @njit(cache=True, nogil=True)
    def _rref_generators_nb(fq, n, r, add_t, mul_t, gram, pivots, free_cols,
                            n_free, work, coord_point, in_m, combos, target):
        cap = 1024
        bases = np.zeros((cap, r, n), dtype=np.int8)
        meets = np.zeros(cap, dtype=np.int64)
        count = 0
        rows = np.zeros((r, n), dtype=np.int64)
        ws = np.zeros((r, n), dtype=np.int64)
        cand = np.zeros(r, dtype=np.int64)
        limit = np.zeros(r, dtype=np.int64)
        vec = np.zeros(n, dtype=np.int64)
        stop = False
        for wi in range(work.shape[0]):
            pidx = work[wi, 0]
            for lvl in range(r):
                j = r - 1 - lvl
                limit[lvl] = fq ** n_free[pidx, j]
            j0 = r - 1
            _fill_row_nb(rows[0], fq, pivots[pidx, j0], free_cols[pidx, j0],
                         n_free[pidx, j0], work[wi, 1])
            _gram_apply_nb(add_t, mul_t, gram, rows[0], ws[0])
            level = 1
            if r > 1:
                cand[1] = 0
            while True:
                if level < r:
                    if cand[level] >= limit[level]:
                        level -= 1
                        if level < 1:
                            break
                        cand[level] += 1
                        continue
                    j = r - 1 - level
                    _fill_row_nb(rows[level], fq, pivots[pidx, j],
                                 free_cols[pidx, j], n_free[pidx, j],
                                 cand[level])
                    good = True
                    for k in range(level):
                        acc = 0
                        for a in range(n):
                            acc = add_t[acc, mul_t[rows[level, a], ws[k, a]]]
                        if acc != 0:
                            good = False
                            break
                    if not good:
                        cand[level] += 1
                        continue
                    _gram_apply_nb(add_t, mul_t, gram, rows[level], ws[level])
                    if level < r - 1:
                        level += 1
                        cand[level] = 0
                        continue
                # a full set of r rows is in place: count points in M
                hit = 0
                for ci in range(combos.shape[0]):
                    vec[:] = 0
                    for lvl in range(r):
                        coeff = combos[ci, r - 1 - lvl]
                        if coeff == 0:
                            continue
                        for a in range(n):
                            vec[a] = add_t[vec[a], mul_t[coeff, rows[lvl, a]]]
                    idx = 0
                    for a in range(n - 1, -1, -1):
                        idx = idx * fq + vec[a]
                    hit += in_m[coord_point[idx]]
                if count == cap:
                    cap *= 2
                    nb = np.zeros((cap, r, n), dtype=np.int8)
                    nm = np.zeros(cap, dtype=np.int64)
                    nb[:count] = bases[:count]
                    nm[:count] = meets[:count]
                    bases = nb
                    meets = nm
                for lvl in range(r):
                    for a in range(n):
                        bases[count, r - 1 - lvl, a] = rows[lvl, a]
                meets[count] = hit
                count += 1
                if target >= 0 and hit != target:
                    stop = True
                    break
                if r == 1:
                    break
                cand[level] += 1
            if stop:
                break
        return bases[:count].copy(), meets[:count].copy()


def trace_histograms(table, logs, shifts, p):
    """``out[i, v]`` = number of k in ``logs`` with
    ``table[(shifts[i] + k) mod len(table)] == v``."""
    table = np.ascontiguousarray(table, dtype=np.int64)
    logs = np.ascontiguousarray(logs, dtype=np.int64) % table.shape[0]
    shifts = np.ascontiguousarray(shifts, dtype=np.int64)
    if USE_NUMBA:
        return _trace_histograms_nb(table, logs, shifts, int(p))
    return _trace_histograms_np(table, logs, shifts, int(p))


def perp_counts(zero_mask, m_logs, y_shifts):
    zero_mask = np.ascontiguousarray(zero_mask, dtype=np.int64)
    m_logs = np.ascontiguousarray(m_logs, dtype=np.int64) % zero_mask.shape[0]
    y_shifts = np.ascontiguousarray(y_shifts, dtype=np.int64)
    if USE_NUMBA:
        return _perp_counts_nb(zero_mask, m_logs, y_shifts)
    return _perp_counts_np(zero_mask, m_logs, y_shifts)


def rref_generators(fq, n, r, add_t, mul_t, gram, pivots, free_cols, n_free,
                    work, coord_point, in_m, combos, target=-1):
    """Enumerate the isotropic RREF subspaces rooted at each work item.

    ``work`` rows are ``(pivot set index, candidate index of the last row)``.
    Returns ``(bases, meets)``: bases in label form, shape ``(G, r, n)``, and
    the number of points of each subspace lying in M. With ``target >= 0``
    the scan stops right after the first subspace whose count differs.
    """
    args = (
        int(fq), int(n), int(r),
        np.ascontiguousarray(add_t, dtype=np.int64),
        np.ascontiguousarray(mul_t, dtype=np.int64),
        np.ascontiguousarray(gram, dtype=np.int64),
        np.ascontiguousarray(pivots, dtype=np.int64),
        np.ascontiguousarray(free_cols, dtype=np.int64),
        np.ascontiguousarray(n_free, dtype=np.int64),
        np.ascontiguousarray(work, dtype=np.int64).reshape(-1, 2),
        np.ascontiguousarray(coord_point, dtype=np.int64),
        np.ascontiguousarray(in_m, dtype=np.int64),
        np.ascontiguousarray(combos, dtype=np.int64),
        int(target),
    )
    if USE_NUMBA:
        return _rref_generators_nb(*args)
    return _rref_generators_np(*args)
