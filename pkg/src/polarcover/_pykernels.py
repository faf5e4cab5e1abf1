"""Pure-Python reference implementation of the two hot kernels.

polarcover._speedups is the compiled twin of this module; polarcover.kernels
picks whichever is importable.  Both implement exactly the same contract and
must stay bit-for-bit interchangeable (tests/test_kernels.py enforces that).

Kernel 1, Scanner: given the RREF basis of a totally isotropic subspace S,
produce every row w such that stacking w under S is again the RREF basis of
a totally isotropic subspace.  Rows come out in lexicographic order, so a
depth-first walk over Scanner.extensions enumerates all totally isotropic
k-spaces in lex order of their RREF matrices, each exactly once: every RREF
matrix is reached only from its own first k-1 rows.

Kernel 2, solve_cover: depth-first branch and bound over exact covers of a
generator universe, minimizing cardinality or deciding feasibility.
"""

from __future__ import annotations

import time

BACKEND = "python"

MODE_FREE = 0         # no form: all subspaces
MODE_QUADRIC = 1      # quadratic form (upper triangular) + polarized gram
MODE_HERMITIAN = 2    # sesquilinear gram + conjugation
MODE_ALTERNATING = 3  # alternating gram, every vector isotropic


class Scanner:
    """Lex-ordered isotropic row extensions over one fixed form."""

    def __init__(self, n, q, add, mul, neg, inv, conj, mode, quad, gram):
        self.n = n
        self.q = q
        self.add = add    # flat q*q
        self.mul = mul    # flat q*q
        self.neg = neg    # length q
        self.inv = inv    # length q
        self.conj = conj  # length q or None
        self.mode = mode
        self.quad = quad  # flat n*n upper triangular or None
        self.gram = gram  # flat n*n or None

    # -- small Gaussian elimination helpers (self-contained on purpose) -----

    def _rref(self, rows):
        n, q = self.n, self.q
        add, mul, neg, inv = self.add, self.mul, self.neg, self.inv
        work = [list(r) for r in rows if any(r)]
        pivots = []
        r = 0
        for col in range(n):
            src = next((i for i in range(r, len(work)) if work[i][col]), None)
            if src is None:
                continue
            work[r], work[src] = work[src], work[r]
            s = inv[work[r][col]]
            if s != 1:
                row = work[r]
                for c in range(col, n):
                    row[c] = mul[s * q + row[c]]
            for i in range(len(work)):
                if i != r and work[i][col]:
                    f = neg[work[i][col]]
                    wi, wr = work[i], work[r]
                    for c in range(col, n):
                        wi[c] = add[wi[c] * q + mul[f * q + wr[c]]]
            pivots.append(col)
            r += 1
            if r == len(work):
                break
        work = [row for row in work if any(row)]
        return work, pivots

    def _nullspace_rref(self, cons):
        n = self.n
        neg = self.neg
        if not cons:
            return [[1 if c == i else 0 for c in range(n)] for i in range(n)], list(range(n))
        red, pivcols = self._rref(cons)
        pivset = set(pivcols)
        basis = []
        for f in range(n):
            if f in pivset:
                continue
            v = [0] * n
            v[f] = 1
            for r, p in enumerate(pivcols):
                v[p] = neg[red[r][f]]
            basis.append(v)
        return self._rref(basis)

    # -- form plumbing -------------------------------------------------------

    def _constraint_row(self, s):
        n, q = self.n, self.q
        add, mul, gram = self.add, self.mul, self.gram
        conj = self.conj
        row = [0] * n
        for c in range(n):
            acc = 0
            base = c * n
            for d in range(n):
                g = gram[base + d]
                if g and s[d]:
                    sd = conj[s[d]] if self.mode == MODE_HERMITIAN else s[d]
                    acc = add[acc * q + mul[g * q + sd]]
            row[c] = acc
        return row

    def eval_quadratic(self, v):
        n, q = self.n, self.q
        add, mul, quad = self.add, self.mul, self.quad
        acc = 0
        for a in range(n):
            va = v[a]
            if not va:
                continue
            base = a * n
            for b in range(a, n):
                c = quad[base + b]
                if c and v[b]:
                    acc = add[acc * q + mul[mul[va * q + v[b]] * q + c]]
        return acc

    def eval_bilinear(self, v, w):
        n, q = self.n, self.q
        add, mul, gram = self.add, self.mul, self.gram
        conj = self.conj
        acc = 0
        for a in range(n):
            va = v[a]
            if not va:
                continue
            base = a * n
            for b in range(n):
                g = gram[base + b]
                if g and w[b]:
                    wb = conj[w[b]] if self.mode == MODE_HERMITIAN else w[b]
                    acc = add[acc * q + mul[mul[va * q + wb] * q + g]]
        return acc

    # -- the scan ------------------------------------------------------------

    def extensions(self, rows, pivots, count_only=False):
        """Rows w with [rows; w] an RREF basis of a larger isotropic space.

        rows must be an RREF basis of a totally isotropic subspace (possibly
        empty).  Returns a lex-ascending list of tuples, or a count.
        """
        n, q, mode = self.n, self.q, self.mode
        add, mul = self.add, self.mul
        cons = []
        if mode != MODE_FREE:
            for s in rows:
                cons.append(self._constraint_row(s))
        for p in pivots:
            unit = [0] * n
            unit[p] = 1
            cons.append(unit)
        basis, bpiv = self._nullspace_rref(cons)
        m = len(basis)
        maxpiv = pivots[-1] if pivots else -1
        allowed = [
            i for i, pc in enumerate(bpiv)
            if pc > maxpiv and all(r[pc] == 0 for r in rows)
        ]
        if not allowed:
            return 0 if count_only else []

        # fold the form onto the nullspace basis
        AE = None
        if mode == MODE_QUADRIC:
            AE = [[0] * m for _ in range(m)]
            for a in range(m):
                AE[a][a] = self.eval_quadratic(basis[a])
                for b in range(a + 1, m):
                    AE[a][b] = self.eval_bilinear(basis[a], basis[b])
        elif mode == MODE_HERMITIAN:
            AE = [[self.eval_bilinear(basis[a], basis[b]) for b in range(m)] for a in range(m)]

        conj = self.conj
        count = 0
        out = []
        y = [0] * m
        for i in reversed(allowed):
            for j in range(i, m):
                y[j] = 0
            y[i] = 1
            while True:
                if mode == MODE_QUADRIC:
                    acc = 0
                    for a in range(i, m):
                        ya = y[a]
                        if ya:
                            row = AE[a]
                            for b in range(a, m):
                                c = row[b]
                                if c and y[b]:
                                    acc = add[acc * q + mul[mul[ya * q + y[b]] * q + c]]
                    ok = acc == 0
                elif mode == MODE_HERMITIAN:
                    acc = 0
                    for a in range(i, m):
                        ya = y[a]
                        if ya:
                            row = AE[a]
                            for b in range(i, m):
                                c = row[b]
                                if c and y[b]:
                                    acc = add[acc * q + mul[mul[ya * q + conj[y[b]]] * q + c]]
                    ok = acc == 0
                else:
                    ok = True
                if ok:
                    if count_only:
                        count += 1
                    else:
                        w = list(basis[i])
                        for j in range(i + 1, m):
                            yj = y[j]
                            if yj:
                                bj = basis[j]
                                for c in range(n):
                                    if bj[c]:
                                        w[c] = add[w[c] * q + mul[yj * q + bj[c]]]
                        out.append(tuple(w))
                # odometer over y[i+1:], rightmost digit fastest
                j = m - 1
                while j > i and y[j] == q - 1:
                    y[j] = 0
                    j -= 1
                if j == i:
                    break
                y[j] += 1
        return count if count_only else out


# ── exact cover branch and bound ─────────────────────────────────────────

class _Stop(Exception):
    pass


class _Found(Exception):
    pass


def solve_cover(num_gens, covers, mode, target=None,
                node_budget=10**7, time_budget=60.0, frac_bound=False):
    """Depth-first branch and bound over exact covers.

    covers: per-candidate generator bitmasks (python ints).  mode 'min'
    minimizes cardinality; mode 'exists' stops at the first exact cover
    (pruning with the forced size `target` when given).  Candidates are
    tried in index order; the branching column is the uncovered generator
    with the fewest remaining candidates.  The default lower bound is
    chosen + ceil(uncovered / max remaining cover size); frac_bound=True
    switches to the stronger sum over generators of 1/maxcover(g).

    Deterministic: identical inputs give identical node counts.
    """
    ncand = len(covers)
    universe = (1 << num_gens) - 1
    covering = [0] * num_gens
    for c, cov in enumerate(covers):
        m = cov
        while m:
            low = m & (-m)
            covering[low.bit_length() - 1] |= 1 << c
            m ^= low
    conflicts = [0] * ncand
    for c in range(ncand):
        mask = 0
        cc = covers[c]
        for d in range(ncand):
            if cc & covers[d]:
                mask |= 1 << d
        conflicts[c] = mask

    limit = target if (mode == "exists" and target is not None) else None
    best = {"ids": None, "size": None}
    stats = {"nodes": 0, "peak": 0}
    start = time.monotonic()

    def rec(uncovered, avail, chosen, depth):
        stats["nodes"] += 1
        if depth > stats["peak"]:
            stats["peak"] = depth
        if stats["nodes"] >= node_budget:
            raise _Stop
        if stats["nodes"] % 4096 == 0 and time.monotonic() - start > time_budget:
            raise _Stop
        if not uncovered:
            if best["size"] is None or len(chosen) < best["size"]:
                best["ids"] = list(chosen)
                best["size"] = len(chosen)
            if mode == "exists":
                raise _Found
            return
        cap = limit if limit is not None else (
            best["size"] - 1 if best["size"] is not None else None)
        if cap is not None:
            if len(chosen) >= cap:
                return
            ucount = uncovered.bit_count()
            if frac_bound:
                maxcov_g = [0] * num_gens
                a = avail
                while a:
                    low = a & (-a)
                    a ^= low
                    c = low.bit_length() - 1
                    hits = covers[c] & uncovered
                    sz = hits.bit_count()
                    while hits:
                        gl = hits & (-hits)
                        hits ^= gl
                        g = gl.bit_length() - 1
                        if sz > maxcov_g[g]:
                            maxcov_g[g] = sz
                    # continue scanning all candidates
                total = 0.0
                u = uncovered
                while u:
                    gl = u & (-u)
                    u ^= gl
                    mc = maxcov_g[gl.bit_length() - 1]
                    if mc == 0:
                        return
                    total += 1.0 / mc
                need = int(total) if total == int(total) else int(total) + 1
                if len(chosen) + need > cap:
                    return
            else:
                maxcov = 0
                a = avail
                while a:
                    low = a & (-a)
                    a ^= low
                    sz = (covers[low.bit_length() - 1] & uncovered).bit_count()
                    if sz > maxcov:
                        maxcov = sz
                if maxcov == 0:
                    return
                if len(chosen) + (ucount + maxcov - 1) // maxcov > cap:
                    return
        # branching column: uncovered generator with fewest candidates
        gsel, gcount = -1, None
        u = uncovered
        while u:
            low = u & (-u)
            u ^= low
            g = low.bit_length() - 1
            cnt = (avail & covering[g]).bit_count()
            if gcount is None or cnt < gcount:
                gsel, gcount = g, cnt
                if cnt == 0:
                    return
        cands = avail & covering[gsel]
        while cands:
            low = cands & (-cands)
            cands ^= low
            c = low.bit_length() - 1
            chosen.append(c)
            rec(uncovered & ~covers[c], avail & ~conflicts[c], chosen, depth + 1)
            chosen.pop()

    exhausted = True
    try:
        rec(universe, (1 << ncand) - 1, [], 0)
    except _Found:
        pass
    except _Stop:
        exhausted = False

    return {
        "best": best["ids"],
        "size": best["size"],
        "nodes": stats["nodes"],
        "peak_depth": stats["peak"],
        "seconds": time.monotonic() - start,
        "exhausted": exhausted,
    }
