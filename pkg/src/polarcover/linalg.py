"""Row-space linear algebra over the small finite fields from polarcover.gf.

Vectors are tuples of field element codes.  A Subspace is an immutable
value object holding the reduced row echelon basis of a row space; the RREF
matrix is a canonical form, so equality, hashing and ordering of subspaces
are plain tuple operations.  All arithmetic lives in module functions that
take the field explicitly.
"""

from __future__ import annotations

from collections.abc import Iterable, Iterator

from polarcover import kernels
from polarcover.gf import FieldTable


class LinalgError(ValueError):
    pass


def rref(field: FieldTable, rows: Iterable[Iterable[int]], n: int):
    """Reduced row echelon form.  Returns (rows, pivots) as tuples."""
    work = []
    for r in rows:
        row = list(r)
        if len(row) != n:
            raise LinalgError(f"expected rows of length {n}, got {len(row)}")
        for a in row:
            field.check_element(a)
        if any(row):
            work.append(row)
    pivots = []
    rank = 0
    for col in range(n):
        src = next((i for i in range(rank, len(work)) if work[i][col]), None)
        if src is None:
            continue
        work[rank], work[src] = work[src], work[rank]
        scale = field.inv(work[rank][col])
        if scale != 1:
            work[rank] = [field.mul(scale, a) for a in work[rank]]
        for i in range(len(work)):
            if i != rank and work[i][col]:
                f = field.neg(work[i][col])
                work[i] = [field.add(a, field.mul(f, b)) for a, b in zip(work[i], work[rank])]
        pivots.append(col)
        rank += 1
        if rank == len(work):
            break
    return tuple(tuple(r) for r in work[:rank] if any(r)), tuple(pivots)


class Subspace:
    """Row space of a matrix over GF(q), stored as its RREF basis."""

    __slots__ = ("n", "basis", "pivots")

    def __init__(self, n: int, basis: tuple[tuple[int, ...], ...], pivots: tuple[int, ...]):
        self.n = n
        self.basis = basis
        self.pivots = pivots

    @property
    def dim(self) -> int:
        return len(self.basis)

    def is_trivial(self) -> bool:
        return not self.basis

    def key(self):
        return (self.dim, self.basis)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Subspace)
            and self.n == other.n
            and self.basis == other.basis
        )

    def __hash__(self) -> int:
        return hash((self.n, self.basis))

    def __lt__(self, other: "Subspace") -> bool:
        if not isinstance(other, Subspace) or self.n != other.n:
            return NotImplemented
        return self.key() < other.key()

    def __repr__(self) -> str:
        return f"Subspace(dim={self.dim}, n={self.n}, {format_subspace(self)!r})"


def span(field: FieldTable, n: int, rows: Iterable[Iterable[int]]) -> Subspace:
    basis, pivots = rref(field, rows, n)
    return Subspace(n, basis, pivots)


def zero_subspace(n: int) -> Subspace:
    return Subspace(n, (), ())


def full_space(n: int) -> Subspace:
    basis = tuple(tuple(1 if c == i else 0 for c in range(n)) for i in range(n))
    return Subspace(n, basis, tuple(range(n)))


def coordinates_in(field: FieldTable, sub: Subspace, vector) -> tuple[int, ...] | None:
    """Coefficients expressing vector in sub's basis, or None if outside.

    With an RREF basis the coefficient on row i is just vector[pivot_i];
    membership is then a single elimination pass.
    """
    v = list(vector)
    if len(v) != sub.n:
        raise LinalgError(f"expected a vector of length {sub.n}, got {len(v)}")
    coeffs = []
    for row, p in zip(sub.basis, sub.pivots):
        c = v[p]
        coeffs.append(c)
        if c:
            for j in range(sub.n):
                if row[j]:
                    v[j] = field.sub(v[j], field.mul(c, row[j]))
    if any(v):
        return None
    return tuple(coeffs)


def contains_vector(field: FieldTable, sub: Subspace, vector) -> bool:
    return coordinates_in(field, sub, vector) is not None


def contains_subspace(field: FieldTable, outer: Subspace, inner: Subspace) -> bool:
    if outer.n != inner.n:
        raise LinalgError("subspaces live in different ambient dimensions")
    return all(contains_vector(field, outer, r) for r in inner.basis)


def sum_spaces(field: FieldTable, a: Subspace, b: Subspace) -> Subspace:
    if a.n != b.n:
        raise LinalgError("subspaces live in different ambient dimensions")
    return span(field, a.n, list(a.basis) + list(b.basis))


def intersect(field: FieldTable, a: Subspace, b: Subspace) -> Subspace:
    """Intersection via the kernel of the stacked basis matrix.

    A combination x*A = y*B lies in both row spaces; solving
    [A; B] with coefficient split (x, -y) gives all of them.
    """
    if a.n != b.n:
        raise LinalgError("subspaces live in different ambient dimensions")
    if a.is_trivial() or b.is_trivial():
        return zero_subspace(a.n)
    da, db = a.dim, b.dim
    # kernel of the (da+db) x n stacked matrix, computed over the transpose
    stacked = list(a.basis) + list(b.basis)
    m = da + db
    # solve c * stacked = 0: RREF of stacked^T, kernel basis in coefficient space
    cols = [[stacked[i][j] for i in range(m)] for j in range(a.n)]
    red, pivots = rref(field, cols, m)
    pivset = set(pivots)
    vectors = []
    for free in range(m):
        if free in pivset:
            continue
        coeff = [0] * m
        coeff[free] = 1
        for r, p in enumerate(pivots):
            coeff[p] = field.neg(red[r][free])
        vec = [0] * a.n
        for i in range(da):
            ci = coeff[i]
            if ci:
                for j in range(a.n):
                    vec[j] = field.add(vec[j], field.mul(ci, a.basis[i][j]))
        vectors.append(vec)
    return span(field, a.n, vectors)


def nullspace(field: FieldTable, constraints: Iterable[Iterable[int]], n: int) -> Subspace:
    """All x with row . x = 0 for every constraint row, as a Subspace."""
    red, pivots = rref(field, constraints, n)
    pivset = set(pivots)
    basis = []
    for free in range(n):
        if free in pivset:
            continue
        v = [0] * n
        v[free] = 1
        for r, p in enumerate(pivots):
            v[p] = field.neg(red[r][free])
        basis.append(v)
    return span(field, n, basis)


def apply_matrix(field: FieldTable, v, rows) -> tuple[int, ...]:
    """v . M for a matrix given as a list of rows."""
    rows = list(rows)
    if len(v) != len(rows):
        raise LinalgError(f"vector length {len(v)} does not match {len(rows)} rows")
    width = len(rows[0]) if rows else 0
    out = [0] * width
    for c, row in zip(v, rows):
        if c:
            for j in range(width):
                if row[j]:
                    out[j] = field.add(out[j], field.mul(c, row[j]))
    return tuple(out)


def solve_linear(field: FieldTable, rows, rhs) -> tuple[int, ...] | None:
    """One x with row_i . x = rhs_i for all i, or None if inconsistent.

    Solved by row reduction of the augmented system; free coordinates are
    set to zero, so the answer is deterministic.
    """
    rows = [list(r) for r in rows]
    rhs = list(rhs)
    if len(rows) != len(rhs):
        raise LinalgError("one right-hand side per constraint row required")
    if not rows:
        return None
    n = len(rows[0])
    augmented = [row + [b] for row, b in zip(rows, rhs)]
    red, pivots = rref(field, augmented, n + 1)
    x = [0] * n
    for row, p in zip(red, pivots):
        if p == n:
            return None  # 0 = 1 row
        x[p] = row[n]
    return tuple(x)


def invert_matrix(field: FieldTable, rows) -> tuple[tuple[int, ...], ...]:
    """Inverse of a square matrix given as rows; raises if singular."""
    rows = [list(r) for r in rows]
    n = len(rows)
    if any(len(r) != n for r in rows):
        raise LinalgError("matrix must be square")
    augmented = [row + [1 if j == i else 0 for j in range(n)] for i, row in enumerate(rows)]
    red, pivots = rref(field, augmented, 2 * n)
    if tuple(pivots[:n]) != tuple(range(n)) or len(red) != n:
        raise LinalgError("matrix is singular")
    return tuple(tuple(row[n:]) for row in red)


# ── vector iteration ─────────────────────────────────────────────────────

def iter_vectors(field: FieldTable, sub: Subspace) -> Iterator[tuple[int, ...]]:
    """All q^dim vectors of the subspace, zero first, in coefficient order."""
    q = field.q
    d = sub.dim
    n = sub.n
    coeff = [0] * d
    while True:
        v = [0] * n
        for i in range(d):
            ci = coeff[i]
            if ci:
                row = sub.basis[i]
                for j in range(n):
                    if row[j]:
                        v[j] = field.add(v[j], field.mul(ci, row[j]))
        yield tuple(v)
        k = d - 1
        while k >= 0 and coeff[k] == q - 1:
            coeff[k] = 0
            k -= 1
        if k < 0:
            return
        coeff[k] += 1


def iter_points(field: FieldTable, sub: Subspace) -> Iterator[tuple[int, ...]]:
    """Normalized nonzero vectors (first nonzero entry 1), one per point."""
    for v in iter_vectors(field, sub):
        lead = next((a for a in v if a), 0)
        if lead == 1:
            yield v


def projective_points(field: FieldTable, n: int) -> Iterator[tuple[int, ...]]:
    return iter_points(field, full_space(n))


# ── free enumeration of subspaces ────────────────────────────────────────

def _free_scanner(field: FieldTable, n: int) -> "kernels.Scanner":
    add, mul, neg, inv, conj = field.flat_tables()
    return kernels.Scanner(n, field.q, add, mul, neg, inv, conj,
                           kernels.MODE_FREE, None, None)


def scan_extension_tree(scanner, k: int, rows=(), pivots=()):
    """DFS over the RREF extension tree, yielding (rows, pivots) at dim k.

    Since extensions come out lex-ascending and any RREF prefix of a lex
    comparison decides it, leaves are produced in lex order of the full
    RREF matrices, each exactly once.
    """
    if len(rows) == k:
        yield rows, pivots
        return
    for w in scanner.extensions(rows, pivots, False):
        lead = next(i for i, a in enumerate(w) if a)
        yield from scan_extension_tree(scanner, k, rows + (w,), pivots + (lead,))


def count_extension_tree(scanner, k: int, rows=(), pivots=()) -> int:
    """Leaf count of scan_extension_tree without materializing the last layer."""
    depth = len(rows)
    if depth == k:
        return 1
    if depth == k - 1:
        return scanner.extensions(rows, pivots, True)
    total = 0
    for w in scanner.extensions(rows, pivots, False):
        lead = next(i for i, a in enumerate(w) if a)
        total += count_extension_tree(scanner, k, rows + (w,), pivots + (lead,))
    return total


def enumerate_subspaces(field: FieldTable, n: int, k: int) -> Iterator[Subspace]:
    """All k-dimensional subspaces of GF(q)^n in lex order of RREF bases."""
    if not 0 <= k <= n:
        raise LinalgError(f"subspace dimension {k} out of range for GF({field.q})^{n}")
    if k == 0:
        yield zero_subspace(n)
        return
    scanner = _free_scanner(field, n)
    for rows, pivots in scan_extension_tree(scanner, k):
        yield Subspace(n, rows, pivots)


def count_subspaces(field: FieldTable, n: int, k: int) -> int:
    if not 0 <= k <= n:
        raise LinalgError(f"subspace dimension {k} out of range for GF({field.q})^{n}")
    if k == 0:
        return 1
    return count_extension_tree(_free_scanner(field, n), k)


# ── text codec ───────────────────────────────────────────────────────────

def format_subspace(sub: Subspace) -> str:
    """Rows joined by ';', entries by ','; the trivial subspace is '0'."""
    if sub.is_trivial():
        return "0"
    return ";".join(",".join(str(a) for a in row) for row in sub.basis)


def parse_subspace(field: FieldTable, n: int, text: str) -> Subspace:
    text = text.strip()
    if not text:
        raise LinalgError("empty subspace literal")
    if text == "0":
        return zero_subspace(n)
    rows = []
    for part in text.split(";"):
        entries = part.split(",")
        if len(entries) != n:
            raise LinalgError(
                f"subspace row {part!r} has {len(entries)} entries, expected {n}")
        try:
            row = [int(e) for e in entries]
        except ValueError as exc:
            raise LinalgError(f"bad integer in subspace row {part!r}") from exc
        for a in row:
            field.check_element(a)
        rows.append(row)
    sub = span(field, n, rows)
    if sub.dim != len(rows):
        raise LinalgError("subspace rows are linearly dependent")
    return sub
