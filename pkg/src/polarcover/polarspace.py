"""The six finite classical polar spaces in standard coordinates.

A PolarSpace couples a field with a standard form on GF(q)^n:

    hyperbolic      X0X1 + X2X3 + ... + X_{2r-2}X_{2r-1}
    parabolic       X0^2 + X1X2 + ... + X_{2r-1}X_{2r}
    elliptic        g(X0,X1) + X2X3 + ... + X_{2r}X_{2r+1},
                    g = X0^2 + X0X1 + cX1^2 irreducible, smallest such c
    hermitian       X0^{s+1} + ... + X_{n-1}^{s+1}  (s = sqrt(q), Gram = I)
    symplectic      f(x,y) = sum (x_{2i}y_{2i+1} - x_{2i+1}y_{2i})

Quotients by totally isotropic subspaces and non-degenerate hyperplane
sections come back as standard spaces of their own, with explicit lift and
project maps, so every PolarSpace in the system lives in standard
coordinates.  The transport may rescale the form by a similarity factor mu;
that never changes which subspaces are totally isotropic.

Characteristic 2 parabolic quadrics carry a nucleus (the radical of the
polarized bilinear form, a non-singular point); perp is taken with respect
to the bilinear form, so the nucleus sits inside every perp.
"""

from __future__ import annotations

import random
import re
from dataclasses import dataclass

from polarcover import kernels
from polarcover.counting import (
    ELLIPTIC,
    HERMITIAN_EVEN,
    HERMITIAN_KINDS,
    HERMITIAN_ODD,
    HYPERBOLIC,
    KIND_E2,
    PARABOLIC,
    SYMPLECTIC,
    ambient_dim,
    num_points,
)
from polarcover.gf import FieldTable, build_field, is_prime_power
from polarcover.linalg import (
    Subspace,
    apply_matrix,
    contains_subspace,
    coordinates_in,
    count_extension_tree,
    full_space,
    intersect,
    invert_matrix,
    iter_points,
    iter_vectors,
    nullspace,
    scan_extension_tree,
    solve_linear,
    span,
)


class PolarSpaceError(ValueError):
    pass


QUADRIC_KINDS = (HYPERBOLIC, PARABOLIC, ELLIPTIC)

# exhaustive construction-time self-checks are skipped above this many
# ambient projective points
_VALIDATE_POINT_LIMIT = 200_000


# ── descriptors ──────────────────────────────────────────────────────────

@dataclass(frozen=True)
class SpaceDescriptor:
    kind: str
    r: int
    q: int
    n: int
    e2: int


_KIND_SYMBOL = {
    HYPERBOLIC: "Q+",
    PARABOLIC: "Q",
    ELLIPTIC: "Q-",
    SYMPLECTIC: "W",
    HERMITIAN_ODD: "H",
    HERMITIAN_EVEN: "H",
}

_DESC_RE = re.compile(r"^\s*(Q\+|Q-|Q|H|W)\s*\(\s*(\d+)\s*,\s*(\d+)\s*\)\s*$")


def descriptor_for(kind: str, r: int, q: int) -> SpaceDescriptor:
    if kind not in KIND_E2:
        raise PolarSpaceError(f"unknown polar space kind {kind!r}")
    if r < 1:
        raise PolarSpaceError(f"rank must be >= 1, got {r}")
    ph = is_prime_power(q)
    if ph is None:
        raise PolarSpaceError(f"q = {q} is not a prime power")
    if kind in HERMITIAN_KINDS and ph[1] % 2:
        raise PolarSpaceError(f"Hermitian spaces need square q; q = {q} is not")
    return SpaceDescriptor(kind, r, q, ambient_dim(kind, r), KIND_E2[kind])


def parse_descriptor(text: str) -> SpaceDescriptor:
    """Parse "Q+(m,q)" | "Q(m,q)" | "Q-(m,q)" | "H(m,q)" | "W(m,q)".

    m is the projective dimension, so the ambient vector dimension is m+1.
    """
    m = _DESC_RE.match(text)
    if not m:
        raise PolarSpaceError(f"cannot parse space descriptor {text!r}")
    sym, proj_dim, q = m.group(1), int(m.group(2)), int(m.group(3))
    n = proj_dim + 1
    odd = n % 2
    if sym == "Q+":
        if odd:
            raise PolarSpaceError(f"Q+ needs odd projective dimension, got {proj_dim}")
        kind, r = HYPERBOLIC, n // 2
    elif sym == "Q-":
        if odd:
            raise PolarSpaceError(f"Q- needs odd projective dimension, got {proj_dim}")
        kind, r = ELLIPTIC, n // 2 - 1
    elif sym == "Q":
        if not odd:
            raise PolarSpaceError(f"Q needs even projective dimension, got {proj_dim}")
        kind, r = PARABOLIC, (n - 1) // 2
    elif sym == "W":
        if odd:
            raise PolarSpaceError(f"W needs odd projective dimension, got {proj_dim}")
        kind, r = SYMPLECTIC, n // 2
    else:
        kind = HERMITIAN_EVEN if odd else HERMITIAN_ODD
        r = (n - 1) // 2 if odd else n // 2
    return descriptor_for(kind, r, q)


def format_descriptor(desc: SpaceDescriptor) -> str:
    return f"{_KIND_SYMBOL[desc.kind]}({desc.n - 1},{desc.q})"


# ── flat form helpers ────────────────────────────────────────────────────

def _eval_quad_flat(field: FieldTable, quad, n, v) -> int:
    acc = 0
    for a in range(n):
        va = v[a]
        if not va:
            continue
        base = a * n
        for b in range(a, n):
            c = quad[base + b]
            if c and v[b]:
                acc = field.add(acc, field.mul(field.mul(va, v[b]), c))
    return acc


def _eval_gram_flat(field: FieldTable, gram, n, v, w, hermitian: bool) -> int:
    acc = 0
    for a in range(n):
        va = v[a]
        if not va:
            continue
        base = a * n
        for b in range(n):
            g = gram[base + b]
            if g and w[b]:
                wb = field.conj(w[b]) if hermitian else w[b]
                acc = field.add(acc, field.mul(field.mul(va, wb), g))
    return acc


def _pairing_row(field: FieldTable, gram, n, s, hermitian: bool) -> list[int]:
    """The functional x -> f(x, s) as a coefficient row."""
    row = [0] * n
    for c in range(n):
        acc = 0
        base = c * n
        for d in range(n):
            g = gram[base + d]
            if g and s[d]:
                sd = field.conj(s[d]) if hermitian else s[d]
                acc = field.add(acc, field.mul(g, sd))
        row[c] = acc
    return row


def _polarize(field: FieldTable, quad, n) -> list[int]:
    gram = [0] * (n * n)
    for i in range(n):
        for j in range(n):
            gram[i * n + j] = field.add(quad[i * n + j] if j >= i else 0,
                                        quad[j * n + i] if i >= j else 0)
        gram[i * n + i] = field.add(quad[i * n + i], quad[i * n + i])
    return gram


def _irreducible_c(field: FieldTable) -> int:
    """Smallest c (by element code) with X^2 + X + c irreducible."""
    bad = {field.neg(field.add(field.mul(t, t), t)) for t in field.elements()}
    for c in field.elements():
        if c not in bad:
            return c
    raise PolarSpaceError("no irreducible quadratic found; field too small?")


# ── the space itself ─────────────────────────────────────────────────────

class PolarSpace:
    """A polar space in standard coordinates.  Build via make_space."""

    def __init__(self, descriptor: SpaceDescriptor, field: FieldTable,
                 quad, gram, nucleus: Subspace | None):
        self.descriptor = descriptor
        self.field = field
        self.quad = quad      # flat n*n upper triangular, quadric kinds only
        self.gram = gram      # flat n*n bilinear/sesquilinear coefficients
        self.nucleus = nucleus
        self._scanner_obj = None
        self._generator_cache = None

    kind = property(lambda self: self.descriptor.kind)
    r = property(lambda self: self.descriptor.r)
    q = property(lambda self: self.descriptor.q)
    n = property(lambda self: self.descriptor.n)
    e2 = property(lambda self: self.descriptor.e2)

    def __repr__(self) -> str:
        return f"PolarSpace({format_descriptor(self.descriptor)})"

    # -- form evaluation -----------------------------------------------------

    def _check_vector(self, v):
        if len(v) != self.n:
            raise PolarSpaceError(
                f"vector length {len(v)} does not match ambient dimension {self.n}")

    def eval_quadratic(self, v) -> int:
        """Q(v) for quadrics, h(v,v) for Hermitian spaces, 0 for symplectic.

        In every kind the singular/isotropic vectors are exactly the zeros.
        """
        self._check_vector(v)
        if self.kind in QUADRIC_KINDS:
            return _eval_quad_flat(self.field, self.quad, self.n, v)
        if self.kind in HERMITIAN_KINDS:
            return _eval_gram_flat(self.field, self.gram, self.n, v, v, True)
        return 0

    def eval_form(self, v, w) -> int:
        """The reflexive form: polarized bilinear (quadrics), sesquilinear
        (Hermitian), or alternating (symplectic)."""
        self._check_vector(v)
        self._check_vector(w)
        return _eval_gram_flat(self.field, self.gram, self.n, v, w,
                               self.kind in HERMITIAN_KINDS)

    # -- isotropy ------------------------------------------------------------

    def is_totally_isotropic(self, sub: Subspace) -> bool:
        if sub.n != self.n:
            raise PolarSpaceError(
                f"subspace ambient {sub.n} does not match space ambient {self.n}")
        rows = sub.basis
        for i, v in enumerate(rows):
            if self.eval_quadratic(v):
                return False
            for w in rows[i + 1:]:
                if self.eval_form(v, w):
                    return False
        return True

    def perp(self, sub: Subspace) -> Subspace:
        if sub.n != self.n:
            raise PolarSpaceError(
                f"subspace ambient {sub.n} does not match space ambient {self.n}")
        hermitian = self.kind in HERMITIAN_KINDS
        rows = [_pairing_row(self.field, self.gram, self.n, s, hermitian)
                for s in sub.basis]
        return nullspace(self.field, rows, self.n)

    # -- enumeration -----------------------------------------------------------

    def _scanner(self):
        if self._scanner_obj is None:
            add, mul, neg, inv, conj = self.field.flat_tables()
            if self.kind in QUADRIC_KINDS:
                mode, quad, gram = kernels.MODE_QUADRIC, self.quad, self.gram
            elif self.kind in HERMITIAN_KINDS:
                mode, quad, gram = kernels.MODE_HERMITIAN, None, self.gram
            else:
                mode, quad, gram = kernels.MODE_ALTERNATING, None, self.gram
            self._scanner_obj = kernels.Scanner(
                self.n, self.q, add, mul, neg, inv, conj, mode, quad, gram)
        return self._scanner_obj

    def _check_ti_dim(self, k: int):
        if not 1 <= k <= self.r:
            raise PolarSpaceError(
                f"totally isotropic dimension must be in 1..{self.r}, got {k}")

    def enumerate_ti(self, k: int):
        """All totally isotropic k-spaces, lex order on RREF bases."""
        self._check_ti_dim(k)
        for rows, pivots in scan_extension_tree(self._scanner(), k):
            yield Subspace(self.n, rows, pivots)

    def ti_count(self, k: int) -> int:
        self._check_ti_dim(k)
        return count_extension_tree(self._scanner(), k)

    def singular_points(self):
        return self.enumerate_ti(1)

    def generators(self) -> tuple[Subspace, ...]:
        if self._generator_cache is None:
            self._generator_cache = tuple(self.enumerate_ti(self.r))
        return self._generator_cache

    def generators_through(self, sub: Subspace) -> list[Subspace]:
        if not self.is_totally_isotropic(sub):
            raise PolarSpaceError("generators_through needs a totally isotropic subspace")
        if sub.dim == self.r:
            return [sub]
        return [g for g in self.generators() if contains_subspace(self.field, g, sub)]

    # -- quotients and sections ------------------------------------------------

    def quotient_space(self, vertex: Subspace) -> "QuotientMap":
        return _build_quotient(self, vertex)

    def hyperplane_section(self, hyperplane: Subspace):
        return _build_section(self, hyperplane)


_SPACE_CACHE: dict[tuple, PolarSpace] = {}


def make_space(descriptor) -> PolarSpace:
    """Build (or fetch) the standard polar space for a descriptor.

    Accepts descriptor text like "Q-(7,2)" or a SpaceDescriptor.  Instances
    are cached; they are immutable, so sharing is safe.
    """
    if isinstance(descriptor, str):
        desc = parse_descriptor(descriptor)
    elif isinstance(descriptor, SpaceDescriptor):
        desc = descriptor_for(descriptor.kind, descriptor.r, descriptor.q)
    else:
        raise PolarSpaceError(f"cannot interpret {descriptor!r} as a space descriptor")
    key = (desc.kind, desc.r, desc.q)
    cached = _SPACE_CACHE.get(key)
    if cached is not None:
        return cached

    p, h = is_prime_power(desc.q)
    field = build_field(p, h)
    n = desc.n
    quad = None
    gram = None
    if desc.kind == HYPERBOLIC:
        quad = [0] * (n * n)
        for i in range(desc.r):
            quad[(2 * i) * n + 2 * i + 1] = 1
    elif desc.kind == PARABOLIC:
        quad = [0] * (n * n)
        quad[0] = 1
        for i in range(1, desc.r + 1):
            quad[(2 * i - 1) * n + 2 * i] = 1
    elif desc.kind == ELLIPTIC:
        quad = [0] * (n * n)
        c = _irreducible_c(field)
        quad[0] = 1
        quad[1] = 1
        quad[n + 1] = c
        for i in range(1, desc.r + 1):
            quad[(2 * i) * n + 2 * i + 1] = 1
    elif desc.kind in HERMITIAN_KINDS:
        gram = [0] * (n * n)
        for i in range(n):
            gram[i * n + i] = 1
    else:  # symplectic
        gram = [0] * (n * n)
        neg1 = field.neg(1)
        for i in range(desc.r):
            gram[(2 * i) * n + 2 * i + 1] = 1
            gram[(2 * i + 1) * n + 2 * i] = neg1
    if quad is not None:
        gram = _polarize(field, quad, n)

    nucleus = None
    if desc.kind == PARABOLIC and p == 2:
        rows = [[gram[j * n + c] for c in range(n)] for j in range(n)]
        nucleus = nullspace(field, rows, n)
        if nucleus.dim != 1 or _eval_quad_flat(field, quad, n, nucleus.basis[0]) == 0:
            raise PolarSpaceError("parabolic nucleus computation failed")

    space = PolarSpace(desc, field, quad, gram, nucleus)
    # construction self-check: the singular point count must match the
    # closed form (this is what "non-degenerate in the appropriate sense"
    # means operationally)
    if (desc.q**n - 1) // (desc.q - 1) <= _VALIDATE_POINT_LIMIT:
        expected = num_points(desc.kind, desc.r, desc.q)
        actual = space.ti_count(1)
        if actual != expected:
            raise PolarSpaceError(
                f"standard form for {format_descriptor(desc)} has {actual} "
                f"singular points, expected {expected}")
    _SPACE_CACHE[key] = space
    return space


# ── standardization machinery ────────────────────────────────────────────

def _first_point(field, sub, pred):
    for v in iter_points(field, sub):
        if pred(v):
            return v
    return None


def _restrict_constraints(field, m, gram, hermitian, sub, vectors):
    rows = [_pairing_row(field, gram, m, v, hermitian) for v in vectors]
    return intersect(field, sub, nullspace(field, rows, m))


def _standardize(field: FieldTable, m: int, kind: str, rank: int, quad, gram):
    """Rows S (m x m) and mu with  form(y . S) = mu * standard_form(y).

    The input is a non-degenerate form of the given kind and rank on
    GF(q)^m in arbitrary coordinates (quad is None unless kind is a
    quadric).  Works by hyperbolic-pair extraction; the anisotropic
    residual fixes mu.
    """
    hermitian = kind in HERMITIAN_KINDS
    q = field.q

    def fq(v):
        return _eval_quad_flat(field, quad, m, v)

    def ff(v, w):
        return _eval_gram_flat(field, gram, m, v, w, hermitian)

    if hermitian:
        rows = []
        comp = full_space(m)
        for _ in range(m):
            v = _first_point(field, comp, lambda x: ff(x, x) != 0)
            if v is None:
                raise PolarSpaceError("hermitian standardization found no anisotropic vector")
            target = field.inv(ff(v, v))
            s = next(s for s in field.elements()
                     if s and field.mul(s, field.conj(s)) == target)
            v = tuple(field.mul(s, a) for a in v)
            rows.append(v)
            comp = _restrict_constraints(field, m, gram, True, comp, [v])
        return [list(r) for r in rows], 1

    if kind == SYMPLECTIC:
        rows = []
        comp = full_space(m)
        for _ in range(rank):
            u = _first_point(field, comp, lambda x: True)
            w = _first_point(field, comp, lambda x: ff(u, x) != 0)
            if u is None or w is None:
                raise PolarSpaceError("symplectic standardization ran out of vectors")
            scale = field.inv(ff(u, w))
            w = tuple(field.mul(scale, a) for a in w)
            rows.extend([list(u), list(w)])
            comp = _restrict_constraints(field, m, gram, False, comp, [u, w])
        if comp.dim != 0:
            raise PolarSpaceError("symplectic standardization left a residual")
        return rows, 1

    # quadric kinds
    pairs = []
    comp = full_space(m)
    for _ in range(rank):
        u = w = None
        for cand in iter_points(field, comp):
            if fq(cand):
                continue
            mate = _first_point(field, comp, lambda x: ff(cand, x) != 0)
            if mate is not None:
                u, w = cand, mate
                break
        if u is None:
            raise PolarSpaceError("quadric standardization found no hyperbolic pair")
        scale = field.inv(ff(u, w))
        w = tuple(field.mul(scale, a) for a in w)
        lam = field.neg(fq(w))
        w = tuple(field.add(a, field.mul(lam, b)) for a, b in zip(w, u))
        pairs.append((tuple(u), w))
        comp = _restrict_constraints(field, m, gram, False, comp, [u, w])

    residual = comp
    if kind == HYPERBOLIC:
        if residual.dim != 0:
            raise PolarSpaceError("hyperbolic residual should be empty")
        mu = 1
        head = []
    elif kind == PARABOLIC:
        if residual.dim != 1:
            raise PolarSpaceError("parabolic residual should be a single point")
        z = residual.basis[0]
        mu = fq(z)
        if mu == 0:
            raise PolarSpaceError("parabolic residual is singular")
        head = [list(z)]
    else:  # elliptic
        if residual.dim != 2:
            raise PolarSpaceError("elliptic residual should be a plane")
        z1 = _first_point(field, residual, lambda x: fq(x) != 0)
        mu = fq(z1)
        c = _irreducible_c(field)
        want = field.mul(mu, c)
        z2 = None
        for v in iter_vectors(field, residual):
            if ff(z1, v) == mu and fq(v) == want:
                z2 = v
                break
        if z2 is None:
            raise PolarSpaceError("elliptic residual does not represent the standard pair")
        head = [list(z1), list(z2)]

    rows = head
    for u, w in pairs:
        rows.append(list(u))
        rows.append([field.mul(mu, a) for a in w])
    return rows, mu


def _verify_similarity(field, base: PolarSpace, m, quad, gram, rows, mu, kind):
    """Spot-check form(y.S) = mu * standard(y); exhaustive when small."""
    hermitian = kind in HERMITIAN_KINDS
    nprime = base.n
    total = field.q ** nprime
    if total <= 4096:
        vectors = iter_vectors(field, full_space(nprime))
    else:
        rng = random.Random(2113)
        vectors = (tuple(rng.randrange(field.q) for _ in range(nprime))
                   for _ in range(200))
    for y in vectors:
        image = apply_matrix(field, y, rows)
        if kind == SYMPLECTIC:
            continue
        lhs = (_eval_quad_flat(field, quad, m, image) if quad is not None
               else _eval_gram_flat(field, gram, m, image, image, hermitian))
        rhs = field.mul(mu, base.eval_quadratic(y))
        if lhs != rhs:
            raise PolarSpaceError("standardization self-check failed")
    if kind == SYMPLECTIC:
        rng = random.Random(2113)
        for _ in range(100):
            y = tuple(rng.randrange(field.q) for _ in range(nprime))
            z = tuple(rng.randrange(field.q) for _ in range(nprime))
            iy, iz = apply_matrix(field, y, rows), apply_matrix(field, z, rows)
            lhs = _eval_gram_flat(field, gram, m, iy, iz, False)
            rhs = field.mul(mu, base.eval_form(y, z))
            if lhs != rhs:
                raise PolarSpaceError("standardization self-check failed")


# ── quotient maps ────────────────────────────────────────────────────────

class QuotientMap:
    """Totally isotropic subspaces through a vertex <-> subspaces of a base.

    The base is a standard polar space of the same kind with rank reduced
    by dim(vertex).  lift embeds a totally isotropic subspace of the base
    as one of the parent through the vertex; project inverts it.
    """

    def __init__(self, parent, vertex, base, w_sub, lift_rows, s_inv):
        self.parent = parent
        self.vertex = vertex
        self.base = base
        self._w = w_sub
        self._lift_rows = lift_rows
        self._s_inv = s_inv

    def lift(self, tau: Subspace) -> Subspace:
        if tau.n != self.base.n:
            raise PolarSpaceError("lift needs a subspace of the base space")
        field = self.parent.field
        rows = [apply_matrix(field, y, self._lift_rows) for y in tau.basis]
        rows.extend(self.vertex.basis)
        lifted = span(field, self.parent.n, rows)
        if lifted.dim != tau.dim + self.vertex.dim:
            raise PolarSpaceError("lift lost dimensions; input was not in the base")
        return lifted

    def project(self, sigma: Subspace) -> Subspace:
        field = self.parent.field
        if not contains_subspace(field, sigma, self.vertex):
            raise PolarSpaceError("project needs a subspace through the vertex")
        if not self.parent.is_totally_isotropic(sigma):
            raise PolarSpaceError("project needs a totally isotropic subspace")
        part = intersect(field, sigma, self._w)
        if part.dim != sigma.dim - self.vertex.dim:
            raise PolarSpaceError("unexpected intersection with the complement")
        rows = []
        for u in part.basis:
            coords = coordinates_in(field, self._w, u)
            rows.append(apply_matrix(field, coords, self._s_inv))
        return span(field, self.base.n, rows)


def _fold_form(space: PolarSpace, basis_rows):
    """Restrict the space's form to the row span of basis_rows."""
    m = len(basis_rows)
    gram = [0] * (m * m)
    for i in range(m):
        for j in range(m):
            gram[i * m + j] = space.eval_form(basis_rows[i], basis_rows[j])
    quad = None
    if space.kind in QUADRIC_KINDS:
        quad = [0] * (m * m)
        for i in range(m):
            quad[i * m + i] = space.eval_quadratic(basis_rows[i])
            for j in range(i + 1, m):
                quad[i * m + j] = space.eval_form(basis_rows[i], basis_rows[j])
    return quad, gram


def _build_quotient(parent: PolarSpace, vertex: Subspace) -> QuotientMap:
    field = parent.field
    if vertex.n != parent.n:
        raise PolarSpaceError("vertex ambient dimension mismatch")
    t = vertex.dim
    if not 1 <= t < parent.r:
        raise PolarSpaceError(
            f"quotient vertex dimension must be in 1..{parent.r - 1}, got {t}")
    if not parent.is_totally_isotropic(vertex):
        raise PolarSpaceError("quotient vertex must be totally isotropic")
    hermitian = parent.kind in HERMITIAN_KINDS
    n = parent.n

    # dual partner basis: v_i with f(v_i, b_j) = delta_ij, mutually orthogonal,
    # all singular
    partners: list[tuple] = []
    brows = [_pairing_row(field, parent.gram, n, b, hermitian) for b in vertex.basis]
    for i in range(t):
        rows = list(brows)
        rhs = [1 if j == i else 0 for j in range(t)]
        for v in partners:
            rows.append(_pairing_row(field, parent.gram, n, v, hermitian))
            rhs.append(0)
        sol = solve_linear(field, rows, rhs)
        if sol is None:
            raise PolarSpaceError("degenerate pairing while building quotient")
        sol = list(sol)
        b = vertex.basis[i]
        if parent.kind in QUADRIC_KINDS:
            lam = field.neg(parent.eval_quadratic(sol))
            sol = [field.add(a, field.mul(lam, c)) for a, c in zip(sol, b)]
        elif hermitian:
            alpha = parent.eval_quadratic(sol)
            lam = next(x for x in field.elements()
                       if field.add(x, field.conj(x)) == field.neg(alpha))
            sol = [field.add(a, field.mul(lam, c)) for a, c in zip(sol, b)]
        partners.append(tuple(sol))

    constraints = list(brows)
    constraints += [_pairing_row(field, parent.gram, n, v, hermitian) for v in partners]
    w_sub = nullspace(field, constraints, n)
    if w_sub.dim != n - 2 * t:
        raise PolarSpaceError("quotient complement has wrong dimension")

    quad_w, gram_w = _fold_form(parent, w_sub.basis)
    m = w_sub.dim
    base = make_space(descriptor_for(parent.kind, parent.r - t, parent.q))
    s_rows, mu = _standardize(field, m, parent.kind, parent.r - t, quad_w, gram_w)
    _verify_similarity(field, base, m, quad_w, gram_w, s_rows, mu, parent.kind)
    lift_rows = [apply_matrix(field, row, w_sub.basis) for row in s_rows]
    s_inv = invert_matrix(field, s_rows)
    return QuotientMap(parent, vertex, base, w_sub, lift_rows, s_inv)


# ── hyperplane sections ──────────────────────────────────────────────────

@dataclass
class DegenerateSectionReport:
    """Hyperplane meets the space in a cone; radical in ambient coordinates."""
    hyperplane: Subspace
    radical: Subspace
    degenerate: bool = True


class HyperplaneSection:
    """A non-degenerate hyperplane section, standardized.

    space is the induced standard polar space; lift/project transport
    subspaces between it and ambient coordinates.
    """

    degenerate = False

    def __init__(self, parent, hyperplane, space, mu, lift_rows, s_inv):
        self.parent = parent
        self.hyperplane = hyperplane
        self.space = space
        self.mu = mu
        self._lift_rows = lift_rows
        self._s_inv = s_inv

    def lift(self, tau: Subspace) -> Subspace:
        if tau.n != self.space.n:
            raise PolarSpaceError("lift needs a subspace of the section space")
        field = self.parent.field
        rows = [apply_matrix(field, y, self._lift_rows) for y in tau.basis]
        lifted = span(field, self.parent.n, rows)
        if lifted.dim != tau.dim:
            raise PolarSpaceError("lift lost dimensions")
        return lifted

    def project(self, sigma: Subspace) -> Subspace:
        field = self.parent.field
        if not contains_subspace(field, self.hyperplane, sigma):
            raise PolarSpaceError("project needs a subspace inside the hyperplane")
        rows = []
        for u in sigma.basis:
            coords = coordinates_in(field, self.hyperplane, u)
            rows.append(apply_matrix(field, coords, self._s_inv))
        return span(field, self.space.n, rows)


_SECTION_KINDS = {
    HYPERBOLIC: lambda r, q: [(PARABOLIC, r - 1)],
    PARABOLIC: lambda r, q: [(HYPERBOLIC, r), (ELLIPTIC, r - 1)],
    ELLIPTIC: lambda r, q: [(PARABOLIC, r)],
    HERMITIAN_ODD: lambda r, q: [(HERMITIAN_EVEN, r - 1)],
    HERMITIAN_EVEN: lambda r, q: [(HERMITIAN_ODD, r)],
    SYMPLECTIC: lambda r, q: [],
}


def _build_section(parent: PolarSpace, hyperplane: Subspace):
    field = parent.field
    n = parent.n
    if hyperplane.n != n or hyperplane.dim != n - 1:
        raise PolarSpaceError("hyperplane_section needs an (n-1)-dimensional subspace")
    quad_h, gram_h = _fold_form(parent, hyperplane.basis)
    m = n - 1
    transpose = [[gram_h[c * m + j] for c in range(m)] for j in range(m)]
    rad_f = nullspace(field, transpose, m)
    if parent.kind in QUADRIC_KINDS:
        if field.q ** rad_f.dim > 10**6:
            raise PolarSpaceError("section radical too large to scan")
        singular = [v for v in iter_vectors(field, rad_f)
                    if _eval_quad_flat(field, quad_h, m, v) == 0]
        vertex = span(field, m, singular)
    else:
        vertex = rad_f
    if vertex.dim > 0:
        ambient_rows = [apply_matrix(field, v, hyperplane.basis) for v in vertex.basis]
        return DegenerateSectionReport(
            hyperplane=hyperplane,
            radical=span(field, n, ambient_rows),
        )

    # non-degenerate: classify by singular point count
    add, mul, neg, inv, conj = field.flat_tables()
    if parent.kind in QUADRIC_KINDS:
        sc = kernels.Scanner(m, field.q, add, mul, neg, inv, conj,
                             kernels.MODE_QUADRIC, quad_h, gram_h)
    else:
        sc = kernels.Scanner(m, field.q, add, mul, neg, inv, conj,
                             kernels.MODE_HERMITIAN, None, gram_h)
    points = sc.extensions((), (), True)
    match = None
    for kind, rank in _SECTION_KINDS[parent.kind](parent.r, parent.q):
        if rank >= 1 and num_points(kind, rank, parent.q) == points:
            match = (kind, rank)
            break
    if match is None:
        raise PolarSpaceError(
            f"section point count {points} matches no expected kind")
    kind, rank = match
    base = make_space(descriptor_for(kind, rank, parent.q))
    s_rows, mu = _standardize(field, m, kind, rank, quad_h, gram_h)
    _verify_similarity(field, base, m, quad_h, gram_h, s_rows, mu, kind)
    lift_rows = [apply_matrix(field, row, hyperplane.basis) for row in s_rows]
    s_inv = invert_matrix(field, s_rows)
    return HyperplaneSection(parent, hyperplane, base, mu, lift_rows, s_inv)


# ── form classification ──────────────────────────────────────────────────

def classify_form(field: FieldTable, n: int, quad):
    """Classify a quadratic form on GF(q)^n by radical and point count.

    Returns a SpaceDescriptor, or None when the form is degenerate (its
    quadric is a cone or worse).
    """
    if len(quad) != n * n:
        raise PolarSpaceError(f"expected flat {n}x{n} coefficients")
    gram = _polarize(field, quad, n)
    transpose = [[gram[c * n + j] for c in range(n)] for j in range(n)]
    rad_f = nullspace(field, transpose, n)
    if field.q ** rad_f.dim > 10**6:
        raise PolarSpaceError("form radical too large to scan")
    singular = [v for v in iter_vectors(field, rad_f)
                if _eval_quad_flat(field, quad, n, v) == 0]
    if span(field, n, singular).dim > 0:
        return None
    add, mul, neg, inv, conj = field.flat_tables()
    sc = kernels.Scanner(n, field.q, add, mul, neg, inv, conj,
                         kernels.MODE_QUADRIC, quad, gram)
    points = sc.extensions((), (), True)
    if n % 2:
        candidates = [(PARABOLIC, (n - 1) // 2)]
    else:
        candidates = [(HYPERBOLIC, n // 2), (ELLIPTIC, n // 2 - 1)]
    for kind, rank in candidates:
        if rank >= 1 and num_points(kind, rank, field.q) == points:
            return descriptor_for(kind, rank, field.q)
    raise PolarSpaceError(f"point count {points} matches no quadric on V({n},{field.q})")


class StandardizedForm:
    """A non-degenerate quadratic form transported to its standard model."""

    def __init__(self, field, n, space, s_rows, s_inv, mu):
        self.field = field
        self.n = n
        self.space = space
        self.mu = mu
        self._s_rows = s_rows
        self._s_inv = s_inv

    def to_standard(self, sub: Subspace) -> Subspace:
        rows = [apply_matrix(self.field, v, self._s_inv) for v in sub.basis]
        return span(self.field, self.n, rows)

    def from_standard(self, sub: Subspace) -> Subspace:
        rows = [apply_matrix(self.field, v, self._s_rows) for v in sub.basis]
        return span(self.field, self.n, rows)


def standardize_quadric(field: FieldTable, n: int, quad) -> StandardizedForm:
    """Transport a non-degenerate quadratic form to the standard space.

    to_standard carries subspaces written in the form's own coordinates to
    the standard model (totally singular goes to totally isotropic exactly).
    """
    desc = classify_form(field, n, quad)
    if desc is None:
        raise PolarSpaceError("cannot standardize a degenerate form")
    gram = _polarize(field, quad, n)
    space = make_space(desc)
    s_rows, mu = _standardize(field, n, desc.kind, desc.r, quad, gram)
    _verify_similarity(field, space, n, quad, gram, s_rows, mu, desc.kind)
    s_inv = invert_matrix(field, s_rows)
    return StandardizedForm(field, n, space, s_rows, s_inv, mu)
