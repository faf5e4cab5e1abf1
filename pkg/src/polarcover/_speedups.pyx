# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled twin of polarcover._pykernels.

Same two kernels, same contract, bit-for-bit interchangeable results:
Scanner enumerates lex-ordered isotropic row extensions over one fixed
form, solve_cover runs the exact-cover branch and bound.  Node counts,
row orders, and tie-breaks must match the Python module exactly; when in
doubt mirror its control flow statement by statement.
"""

from time import monotonic

from cpython.mem cimport PyMem_Free, PyMem_Malloc
from libc.stdint cimport int64_t, uint64_t
from libc.string cimport memcpy, memset

cdef extern from *:
    """
    #define POPCNT64(x) __builtin_popcountll((unsigned long long)(x))
    #define CTZ64(x) __builtin_ctzll((unsigned long long)(x))
    """
    int POPCNT64(uint64_t x) nogil
    int CTZ64(uint64_t x) nogil

BACKEND = "cython"

MODE_FREE = 0
MODE_QUADRIC = 1
MODE_HERMITIAN = 2
MODE_ALTERNATING = 3

DEF _MODE_FREE = 0
DEF _MODE_QUADRIC = 1
DEF _MODE_HERMITIAN = 2
DEF _MODE_ALTERNATING = 3


cdef int *_copy_ints(object seq, Py_ssize_t size) except NULL:
    cdef int *buf = <int *> PyMem_Malloc(size * sizeof(int))
    if buf == NULL:
        raise MemoryError
    cdef Py_ssize_t i
    for i in range(size):
        buf[i] = seq[i]
    return buf


cdef int *_alloc_ints(Py_ssize_t size) except NULL:
    cdef int *buf = <int *> PyMem_Malloc(max(size, 1) * sizeof(int))
    if buf == NULL:
        raise MemoryError
    return buf


cdef class Scanner:
    """Lex-ordered isotropic row extensions over one fixed form."""

    cdef int n, q, mode
    cdef int *add       # flat q*q
    cdef int *mul       # flat q*q
    cdef int *neg       # length q
    cdef int *inv       # length q
    cdef int *conj      # length q, NULL when absent
    cdef int *quad      # flat n*n upper triangular, NULL when absent
    cdef int *gram      # flat n*n, NULL when absent

    def __cinit__(self, n, q, add, mul, neg, inv, conj, mode, quad, gram):
        self.n = n
        self.q = q
        self.mode = mode
        self.add = _copy_ints(add, q * q)
        self.mul = _copy_ints(mul, q * q)
        self.neg = _copy_ints(neg, q)
        self.inv = _copy_ints(inv, q)
        self.conj = _copy_ints(conj, q) if conj is not None else NULL
        self.quad = _copy_ints(quad, n * n) if quad is not None else NULL
        self.gram = _copy_ints(gram, n * n) if gram is not None else NULL

    def __dealloc__(self):
        PyMem_Free(self.add)
        PyMem_Free(self.mul)
        PyMem_Free(self.neg)
        PyMem_Free(self.inv)
        PyMem_Free(self.conj)
        PyMem_Free(self.quad)
        PyMem_Free(self.gram)

    # -- small Gaussian elimination helpers ----------------------------------

    cdef int _rref_c(self, int *work, int nrows, int *pivots) :
        """In-place RREF of an nrows x n matrix; returns the rank.

        Zero rows are compacted away first (and cannot reappear), so on
        return rows 0..rank-1 are the RREF basis and pivots[0..rank-1]
        their leading columns.
        """
        cdef int n = self.n, q = self.q
        cdef int *add = self.add
        cdef int *mul = self.mul
        cdef int *neg = self.neg
        cdef int *inv = self.inv
        cdef int kept = 0, i, c, col, src, s, f
        cdef bint nz
        for i in range(nrows):
            nz = False
            for c in range(n):
                if work[i * n + c]:
                    nz = True
                    break
            if nz:
                if kept != i:
                    memcpy(work + kept * n, work + i * n, n * sizeof(int))
                kept += 1
        nrows = kept

        cdef int r = 0
        cdef int tmp
        for col in range(n):
            src = -1
            for i in range(r, nrows):
                if work[i * n + col]:
                    src = i
                    break
            if src < 0:
                continue
            if src != r:
                for c in range(n):
                    tmp = work[r * n + c]
                    work[r * n + c] = work[src * n + c]
                    work[src * n + c] = tmp
            s = inv[work[r * n + col]]
            if s != 1:
                for c in range(col, n):
                    work[r * n + c] = mul[s * q + work[r * n + c]]
            for i in range(nrows):
                if i != r and work[i * n + col]:
                    f = neg[work[i * n + col]]
                    for c in range(col, n):
                        work[i * n + c] = add[work[i * n + c] * q
                                              + mul[f * q + work[r * n + c]]]
            pivots[r] = col
            r += 1
            if r == nrows:
                break
        return r

    cdef int _nullspace_rref_c(self, int *cons, int ncons,
                               int *basis, int *bpiv):
        """RREF basis of the right nullspace of cons; returns its dimension."""
        cdef int n = self.n
        cdef int *neg = self.neg
        cdef int i, c, f, r
        if ncons == 0:
            memset(basis, 0, n * n * sizeof(int))
            for i in range(n):
                basis[i * n + i] = 1
                bpiv[i] = i
            return n
        cdef int *pivcols = _alloc_ints(n)
        cdef int npiv, nb
        try:
            npiv = self._rref_c(cons, ncons, pivcols)
            nb = 0
            for f in range(n):
                for i in range(npiv):
                    if pivcols[i] == f:
                        break
                else:
                    memset(basis + nb * n, 0, n * sizeof(int))
                    basis[nb * n + f] = 1
                    for r in range(npiv):
                        basis[nb * n + pivcols[r]] = neg[cons[r * n + f]]
                    nb += 1
            return self._rref_c(basis, nb, bpiv)
        finally:
            PyMem_Free(pivcols)

    # -- form plumbing --------------------------------------------------------

    cdef void _constraint_row_c(self, int *s, int *row):
        cdef int n = self.n, q = self.q
        cdef int *add = self.add
        cdef int *mul = self.mul
        cdef int *gram = self.gram
        cdef int *conj = self.conj
        cdef int c, d, g, sd, acc
        for c in range(n):
            acc = 0
            for d in range(n):
                g = gram[c * n + d]
                if g and s[d]:
                    sd = conj[s[d]] if self.mode == _MODE_HERMITIAN else s[d]
                    acc = add[acc * q + mul[g * q + sd]]
            row[c] = acc

    cdef int _eval_quadratic_c(self, int *v):
        cdef int n = self.n, q = self.q
        cdef int *add = self.add
        cdef int *mul = self.mul
        cdef int *quad = self.quad
        cdef int a, b, c, va, acc = 0
        for a in range(n):
            va = v[a]
            if not va:
                continue
            for b in range(a, n):
                c = quad[a * n + b]
                if c and v[b]:
                    acc = add[acc * q + mul[mul[va * q + v[b]] * q + c]]
        return acc

    cdef int _eval_bilinear_c(self, int *v, int *w):
        cdef int n = self.n, q = self.q
        cdef int *add = self.add
        cdef int *mul = self.mul
        cdef int *gram = self.gram
        cdef int *conj = self.conj
        cdef int a, b, g, va, wb, acc = 0
        for a in range(n):
            va = v[a]
            if not va:
                continue
            for b in range(n):
                g = gram[a * n + b]
                if g and w[b]:
                    wb = conj[w[b]] if self.mode == _MODE_HERMITIAN else w[b]
                    acc = add[acc * q + mul[mul[va * q + wb] * q + g]]
        return acc

    def eval_quadratic(self, v):
        cdef int *buf = _copy_ints(v, self.n)
        try:
            return self._eval_quadratic_c(buf)
        finally:
            PyMem_Free(buf)

    def eval_bilinear(self, v, w):
        cdef int *bv = _copy_ints(v, self.n)
        cdef int *bw
        try:
            bw = _copy_ints(w, self.n)
        except:
            PyMem_Free(bv)
            raise
        try:
            return self._eval_bilinear_c(bv, bw)
        finally:
            PyMem_Free(bv)
            PyMem_Free(bw)

    # -- the scan --------------------------------------------------------------

    def extensions(self, rows, pivots, count_only=False):
        """Rows w with [rows; w] an RREF basis of a larger isotropic space.

        rows must be an RREF basis of a totally isotropic subspace (possibly
        empty).  Returns a lex-ascending list of tuples, or a count.
        """
        cdef int n = self.n, q = self.q, mode = self.mode
        cdef int *add = self.add
        cdef int *mul = self.mul
        cdef int *conj = self.conj
        cdef int k = len(rows)
        cdef bint counting = bool(count_only)

        cdef int *rows_c = _alloc_ints(k * n)
        cdef int *pivots_c = _alloc_ints(k)
        cdef int *cons = _alloc_ints(2 * k * n)
        cdef int *basis = _alloc_ints(n * n)
        cdef int *bpiv = _alloc_ints(n)
        cdef int *allowed = _alloc_ints(n)
        cdef int *AE = _alloc_ints(n * n)
        cdef int *y = _alloc_ints(n)
        cdef int *w = _alloc_ints(n)

        cdef int i, j, c, a, b, m, ncons, maxpiv, nallowed, pc
        cdef int ai, ya, yj, coef, acc, count
        cdef bint ok, clear
        cdef list out = []
        count = 0
        try:
            for i in range(k):
                row = rows[i]
                for j in range(n):
                    rows_c[i * n + j] = row[j]
                pivots_c[i] = pivots[i]

            ncons = 0
            if mode != _MODE_FREE:
                for i in range(k):
                    self._constraint_row_c(rows_c + i * n, cons + ncons * n)
                    ncons += 1
            for i in range(k):
                memset(cons + ncons * n, 0, n * sizeof(int))
                cons[ncons * n + pivots_c[i]] = 1
                ncons += 1

            m = self._nullspace_rref_c(cons, ncons, basis, bpiv)
            maxpiv = pivots_c[k - 1] if k else -1
            nallowed = 0
            for i in range(m):
                pc = bpiv[i]
                if pc <= maxpiv:
                    continue
                clear = True
                for j in range(k):
                    if rows_c[j * n + pc]:
                        clear = False
                        break
                if clear:
                    allowed[nallowed] = i
                    nallowed += 1
            if nallowed == 0:
                return 0 if counting else []

            # fold the form onto the nullspace basis
            if mode == _MODE_QUADRIC:
                memset(AE, 0, m * m * sizeof(int))
                for a in range(m):
                    AE[a * m + a] = self._eval_quadratic_c(basis + a * n)
                    for b in range(a + 1, m):
                        AE[a * m + b] = self._eval_bilinear_c(basis + a * n,
                                                              basis + b * n)
            elif mode == _MODE_HERMITIAN:
                for a in range(m):
                    for b in range(m):
                        AE[a * m + b] = self._eval_bilinear_c(basis + a * n,
                                                              basis + b * n)

            for ai in range(nallowed - 1, -1, -1):
                i = allowed[ai]
                for j in range(i, m):
                    y[j] = 0
                y[i] = 1
                while True:
                    if mode == _MODE_QUADRIC:
                        acc = 0
                        for a in range(i, m):
                            ya = y[a]
                            if ya:
                                for b in range(a, m):
                                    coef = AE[a * m + b]
                                    if coef and y[b]:
                                        acc = add[acc * q
                                                  + mul[mul[ya * q + y[b]] * q
                                                        + coef]]
                        ok = acc == 0
                    elif mode == _MODE_HERMITIAN:
                        acc = 0
                        for a in range(i, m):
                            ya = y[a]
                            if ya:
                                for b in range(i, m):
                                    coef = AE[a * m + b]
                                    if coef and y[b]:
                                        acc = add[acc * q
                                                  + mul[mul[ya * q
                                                            + conj[y[b]]] * q
                                                        + coef]]
                        ok = acc == 0
                    else:
                        ok = True
                    if ok:
                        if counting:
                            count += 1
                        else:
                            memcpy(w, basis + i * n, n * sizeof(int))
                            for j in range(i + 1, m):
                                yj = y[j]
                                if yj:
                                    for c in range(n):
                                        if basis[j * n + c]:
                                            w[c] = add[w[c] * q
                                                       + mul[yj * q
                                                             + basis[j * n + c]]]
                            out.append(tuple([w[c] for c in range(n)]))
                    # odometer over y[i+1:], rightmost digit fastest
                    j = m - 1
                    while j > i and y[j] == q - 1:
                        y[j] = 0
                        j -= 1
                    if j == i:
                        break
                    y[j] += 1
            return count if counting else out
        finally:
            PyMem_Free(rows_c)
            PyMem_Free(pivots_c)
            PyMem_Free(cons)
            PyMem_Free(basis)
            PyMem_Free(bpiv)
            PyMem_Free(allowed)
            PyMem_Free(AE)
            PyMem_Free(y)
            PyMem_Free(w)


# ── exact cover branch and bound ─────────────────────────────────────────

DEF _CODE_RUN = 0
DEF _CODE_STOP = 1
DEF _CODE_FOUND = 2


cdef uint64_t *_alloc_words(Py_ssize_t size) except NULL:
    cdef uint64_t *buf = <uint64_t *> PyMem_Malloc(
        max(size, 1) * sizeof(uint64_t))
    if buf == NULL:
        raise MemoryError
    return buf


cdef class _CoverSolver:
    cdef int num_gens, ncand, gwords, cwords
    cdef uint64_t *covers      # ncand * gwords
    cdef uint64_t *covering    # num_gens * cwords
    cdef uint64_t *conflicts   # ncand * cwords
    cdef uint64_t *unc_stack   # (num_gens + 2) * gwords
    cdef uint64_t *avail_stack # (num_gens + 2) * cwords
    cdef int *chosen
    cdef int *best
    cdef int *maxcov_g
    cdef int chosen_len, best_size, peak
    cdef bint mode_exists, has_limit, frac
    cdef int limit
    cdef int64_t nodes, node_budget
    cdef double time_budget, start

    def __cinit__(self, int num_gens, int ncand):
        cdef int gwords = (num_gens + 63) >> 6
        cdef int cwords = (ncand + 63) >> 6
        if gwords == 0:
            gwords = 1
        if cwords == 0:
            cwords = 1
        self.num_gens = num_gens
        self.ncand = ncand
        self.gwords = gwords
        self.cwords = cwords
        self.covers = _alloc_words(<Py_ssize_t> ncand * gwords)
        self.covering = _alloc_words(<Py_ssize_t> num_gens * cwords)
        self.conflicts = _alloc_words(<Py_ssize_t> ncand * cwords)
        self.unc_stack = _alloc_words(<Py_ssize_t> (num_gens + 2) * gwords)
        self.avail_stack = _alloc_words(<Py_ssize_t> (num_gens + 2) * cwords)
        self.chosen = _alloc_ints(num_gens + 2)
        self.best = _alloc_ints(num_gens + 2)
        self.maxcov_g = _alloc_ints(num_gens)
        memset(self.covers, 0,
               max(<Py_ssize_t> ncand * gwords, 1) * sizeof(uint64_t))
        memset(self.covering, 0,
               max(<Py_ssize_t> num_gens * cwords, 1) * sizeof(uint64_t))
        memset(self.conflicts, 0,
               max(<Py_ssize_t> ncand * cwords, 1) * sizeof(uint64_t))
        self.chosen_len = 0
        self.best_size = -1
        self.peak = 0
        self.nodes = 0

    def __dealloc__(self):
        PyMem_Free(self.covers)
        PyMem_Free(self.covering)
        PyMem_Free(self.conflicts)
        PyMem_Free(self.unc_stack)
        PyMem_Free(self.avail_stack)
        PyMem_Free(self.chosen)
        PyMem_Free(self.best)
        PyMem_Free(self.maxcov_g)

    cdef int _rec(self, int depth):
        self.nodes += 1
        if depth > self.peak:
            self.peak = depth
        if self.nodes >= self.node_budget:
            return _CODE_STOP
        if self.nodes % 4096 == 0:
            if monotonic() - self.start > self.time_budget:
                return _CODE_STOP

        cdef int gwords = self.gwords, cwords = self.cwords
        cdef uint64_t *unc = self.unc_stack + depth * gwords
        cdef uint64_t *av = self.avail_stack + depth * cwords
        cdef int w
        cdef bint empty = True
        for w in range(gwords):
            if unc[w]:
                empty = False
                break
        if empty:
            if self.best_size < 0 or self.chosen_len < self.best_size:
                memcpy(self.best, self.chosen,
                       self.chosen_len * sizeof(int))
                self.best_size = self.chosen_len
            if self.mode_exists:
                return _CODE_FOUND
            return _CODE_RUN

        cdef bint cap_valid = False
        cdef int cap = 0
        if self.has_limit:
            cap = self.limit
            cap_valid = True
        elif self.best_size >= 0:
            cap = self.best_size - 1
            cap_valid = True

        cdef uint64_t mask, low, hits
        cdef Py_ssize_t base
        cdef int ucount, c, g, sz, mc, maxcov
        cdef int64_t need, trunc
        cdef double total
        if cap_valid:
            if self.chosen_len >= cap:
                return _CODE_RUN
            ucount = 0
            for w in range(gwords):
                ucount += POPCNT64(unc[w])
            if self.frac:
                memset(self.maxcov_g, 0, self.num_gens * sizeof(int))
                for w in range(cwords):
                    mask = av[w]
                    while mask:
                        low = mask & (~mask + 1)
                        c = (w << 6) + CTZ64(mask)
                        mask ^= low
                        base = <Py_ssize_t> c * gwords
                        sz = 0
                        for g in range(gwords):
                            sz += POPCNT64(self.covers[base + g] & unc[g])
                        for g in range(gwords):
                            hits = self.covers[base + g] & unc[g]
                            while hits:
                                low = hits & (~hits + 1)
                                mc = (g << 6) + CTZ64(hits)
                                hits ^= low
                                if sz > self.maxcov_g[mc]:
                                    self.maxcov_g[mc] = sz
                total = 0.0
                for w in range(gwords):
                    mask = unc[w]
                    while mask:
                        low = mask & (~mask + 1)
                        g = (w << 6) + CTZ64(mask)
                        mask ^= low
                        mc = self.maxcov_g[g]
                        if mc == 0:
                            return _CODE_RUN
                        total += 1.0 / mc
                trunc = <int64_t> total
                need = trunc if (<double> trunc) == total else trunc + 1
                if self.chosen_len + need > cap:
                    return _CODE_RUN
            else:
                maxcov = 0
                for w in range(cwords):
                    mask = av[w]
                    while mask:
                        low = mask & (~mask + 1)
                        c = (w << 6) + CTZ64(mask)
                        mask ^= low
                        base = <Py_ssize_t> c * gwords
                        sz = 0
                        for g in range(gwords):
                            sz += POPCNT64(self.covers[base + g] & unc[g])
                        if sz > maxcov:
                            maxcov = sz
                if maxcov == 0:
                    return _CODE_RUN
                if self.chosen_len + (ucount + maxcov - 1) // maxcov > cap:
                    return _CODE_RUN

        # branching column: uncovered generator with fewest candidates
        cdef int gsel = -1, gcount = -1, cnt, cw
        for w in range(gwords):
            mask = unc[w]
            while mask:
                low = mask & (~mask + 1)
                g = (w << 6) + CTZ64(mask)
                mask ^= low
                base = <Py_ssize_t> g * cwords
                cnt = 0
                for cw in range(cwords):
                    cnt += POPCNT64(av[cw] & self.covering[base + cw])
                if gcount < 0 or cnt < gcount:
                    gsel = g
                    gcount = cnt
                    if cnt == 0:
                        return _CODE_RUN

        cdef uint64_t *child_unc = self.unc_stack + (depth + 1) * gwords
        cdef uint64_t *child_av = self.avail_stack + (depth + 1) * cwords
        cdef Py_ssize_t gbase = <Py_ssize_t> gsel * cwords
        cdef Py_ssize_t cb, fb
        cdef int code
        for w in range(cwords):
            mask = av[w] & self.covering[gbase + w]
            while mask:
                low = mask & (~mask + 1)
                c = (w << 6) + CTZ64(mask)
                mask ^= low
                self.chosen[self.chosen_len] = c
                self.chosen_len += 1
                cb = <Py_ssize_t> c * gwords
                for g in range(gwords):
                    child_unc[g] = unc[g] & ~self.covers[cb + g]
                fb = <Py_ssize_t> c * cwords
                for cw in range(cwords):
                    child_av[cw] = av[cw] & ~self.conflicts[fb + cw]
                code = self._rec(depth + 1)
                self.chosen_len -= 1
                if code != _CODE_RUN:
                    return code
        return _CODE_RUN


def solve_cover(num_gens, covers, mode, target=None,
                node_budget=10**7, time_budget=60.0, frac_bound=False):
    """Depth-first branch and bound over exact covers.

    Identical contract and node-for-node behavior as the Python kernel:
    covers are per-candidate generator bitmasks, mode 'min' minimizes
    cardinality, mode 'exists' stops at the first exact cover (pruning
    with the forced size `target` when given), and the branching column
    is the uncovered generator with the fewest remaining candidates.
    """
    cdef int ngens = num_gens
    cdef int ncand = len(covers)
    cdef _CoverSolver sv = _CoverSolver(ngens, ncand)
    sv.mode_exists = mode == "exists"
    sv.has_limit = sv.mode_exists and target is not None
    sv.limit = target if sv.has_limit else 0
    sv.node_budget = node_budget
    sv.time_budget = time_budget
    sv.frac = bool(frac_bound)

    cdef int gwords = sv.gwords, cwords = sv.cwords
    cdef Py_ssize_t c, w
    cdef uint64_t word
    cdef int g, cw
    cdef object mask64 = (1 << 64) - 1
    for c in range(ncand):
        cov = covers[c]
        for w in range(gwords):
            word = (cov >> (64 * w)) & mask64
            sv.covers[c * gwords + w] = word
            while word:
                g = (<int> w << 6) + CTZ64(word)
                word &= word - 1
                sv.covering[<Py_ssize_t> g * cwords + (c >> 6)] |= (
                    <uint64_t> 1) << (c & 63)
    for c in range(ncand):
        for w in range(gwords):
            word = sv.covers[c * gwords + w]
            while word:
                g = (<int> w << 6) + CTZ64(word)
                word &= word - 1
                for cw in range(cwords):
                    sv.conflicts[c * cwords + cw] |= sv.covering[
                        <Py_ssize_t> g * cwords + cw]

    # root state: everything uncovered, every candidate available
    cdef int i
    for i in range(gwords):
        sv.unc_stack[i] = 0
    for i in range(ngens):
        sv.unc_stack[i >> 6] |= (<uint64_t> 1) << (i & 63)
    for i in range(cwords):
        sv.avail_stack[i] = 0
    for i in range(ncand):
        sv.avail_stack[i >> 6] |= (<uint64_t> 1) << (i & 63)

    sv.start = monotonic()
    cdef int code = sv._rec(0)
    cdef bint exhausted = code != _CODE_STOP

    best_ids = None
    size = None
    if sv.best_size >= 0:
        best_ids = [sv.best[i] for i in range(sv.best_size)]
        size = sv.best_size
    return {
        "best": best_ids,
        "size": size,
        "nodes": sv.nodes,
        "peak_depth": sv.peak,
        "seconds": monotonic() - sv.start,
        "exhausted": exhausted,
    }
