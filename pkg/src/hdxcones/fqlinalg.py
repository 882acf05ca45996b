"""Exact linear algebra over GF(p^s).

Field elements are integers 0..q-1 encoding base-p digit vectors
(little-endian: the integer sum(c_i * p^i) stands for the polynomial
sum(c_i * x^i) in GF(p)[x]/(poly)).  Arithmetic goes through precomputed
tables, so everything downstream (matrices, subspaces, forms) is plain
integer tuples: hashable, comparable and exact.

Subspaces are values: the reduced-row-echelon basis is the canonical
representative, so two spans of the same space compare and hash equal.
"""

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations, product

from .errors import DomainError, MalformedInputError, ResourceCapError

_FIELD_ORDER_CAP = 4096


# ---------------------------------------------------------------------------
# polynomial helpers over GF(p), used only to build field tables
# ---------------------------------------------------------------------------

def _poly_trim(c):
    while c and c[-1] == 0:
        c = c[:-1]
    return c


def _poly_mul(a, b, p):
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] = (out[i + j] + ai * bj) % p
    return _poly_trim(tuple(out))


def _poly_mod(a, m, p):
    a = list(_poly_trim(tuple(a)))
    dm = len(m) - 1
    inv_lead = pow(m[-1], p - 2, p)
    while len(a) - 1 >= dm:
        if a[-1] == 0:
            a.pop()
            continue
        shift = len(a) - 1 - dm
        factor = (a[-1] * inv_lead) % p
        for i, mi in enumerate(m):
            a[shift + i] = (a[shift + i] - factor * mi) % p
        while a and a[-1] == 0:
            a.pop()
    return _poly_trim(tuple(a))


def _is_irreducible(poly, p):
    """Trial division by all monic polynomials of degree <= deg/2."""
    deg = len(poly) - 1
    if deg == 1:
        return True
    for d in range(1, deg // 2 + 1):
        for tail in product(range(p), repeat=d):
            divisor = tuple(tail) + (1,)
            if not _poly_mod(poly, divisor, p):
                return False
    return True


def _least_irreducible(p, s):
    """Monic irreducible of degree s whose low-coefficient vector encodes the
    smallest base-p integer.  Reproducible across runs and platforms."""
    for code in range(p**s):
        tail = tuple((code // p**i) % p for i in range(s))
        poly = tail + (1,)
        if _is_irreducible(poly, p):
            return poly
    raise AssertionError("no irreducible polynomial found")  # unreachable


def _factor_prime_power(q):
    for p in range(2, q + 1):
        if q % p == 0:
            s = 0
            m = q
            while m % p == 0:
                m //= p
                s += 1
            if m != 1:
                raise MalformedInputError(f"{q} is not a prime power")
            return p, s
    raise MalformedInputError(f"{q} is not a prime power")


# ---------------------------------------------------------------------------
# fields
# ---------------------------------------------------------------------------

class Field:
    """GF(p^s) with table-based arithmetic on integer-encoded elements."""

    def __init__(self, p, s=1, poly=None):
        q = p**s
        if q > _FIELD_ORDER_CAP:
            raise ResourceCapError(f"field order {q} exceeds cap {_FIELD_ORDER_CAP}")
        if poly is None:
            poly = (0, 1) if s == 1 else _least_irreducible(p, s)
        poly = tuple(c % p for c in poly)
        if len(poly) != s + 1 or poly[-1] != 1:
            raise MalformedInputError("defining polynomial must be monic of degree s")
        if not _is_irreducible(poly, p):
            raise MalformedInputError("defining polynomial is reducible")
        self.p = p
        self.s = s
        self.q = q
        self.poly = poly
        self.zero = 0
        self.one = 1
        self._build_tables()

    def _build_tables(self):
        p, s, q = self.p, self.s, self.q
        coeffs = [tuple((e // p**i) % p for i in range(s)) for e in range(q)]
        self._coeffs = coeffs
        add = [[0] * q for _ in range(q)]
        mul = [[0] * q for _ in range(q)]
        for a in range(q):
            ca = coeffs[a]
            for b in range(a, q):
                cb = coeffs[b]
                tot = tuple((x + y) % p for x, y in zip(ca, cb))
                val = sum(c * p**i for i, c in enumerate(tot))
                add[a][b] = add[b][a] = val
                prod = _poly_mod(_poly_mul(_poly_trim(ca), _poly_trim(cb), p), self.poly, p)
                val = sum(c * p**i for i, c in enumerate(prod))
                mul[a][b] = mul[b][a] = val
        self._add = tuple(tuple(r) for r in add)
        self._mul = tuple(tuple(r) for r in mul)
        neg = [0] * q
        for a in range(q):
            neg[a] = next(b for b in range(q) if add[a][b] == 0)
        self._neg = tuple(neg)
        inv = [0] * q
        for a in range(1, q):
            inv[a] = next(b for b in range(1, q) if mul[a][b] == 1)
        self._inv = tuple(inv)

    # element arithmetic -----------------------------------------------------
    def add(self, a, b):
        return self._add[a][b]

    def neg(self, a):
        return self._neg[a]

    def sub(self, a, b):
        return self._add[a][self._neg[b]]

    def mul(self, a, b):
        return self._mul[a][b]

    def inv(self, a):
        if a == 0:
            raise DomainError("division by zero field element")
        return self._inv[a]

    def div(self, a, b):
        return self._mul[a][self.inv(b)]

    def pow(self, a, k):
        out = 1
        for _ in range(k):
            out = self._mul[out][a]
        return out

    def frobenius(self, a):
        return self.pow(a, self.p)

    def elements(self):
        return range(self.q)

    def gen(self):
        """The class of x; a generator of GF(p^s) over GF(p) when s > 1."""
        return self.p if self.s > 1 else 1

    def coeffs(self, a):
        return self._coeffs[a]

    def from_coeffs(self, digits):
        return sum((c % self.p) * self.p**i for i, c in enumerate(digits))

    def embed_int(self, n):
        """Image of the rational integer n under Z -> GF(p^s)."""
        return n % self.p

    @property
    def descriptor(self):
        return f"GF({self.p})" if self.s == 1 else f"GF({self.p}^{self.s})"

    def __repr__(self):
        return f"Field({self.descriptor})"

    def __eq__(self, other):
        return (
            isinstance(other, Field)
            and (self.p, self.s, self.poly) == (other.p, other.s, other.poly)
        )

    def __hash__(self):
        return hash((self.p, self.s, self.poly))


@lru_cache(maxsize=None)
def GF(q, poly=None):
    """Field for the prime power q, with the default (least) modulus."""
    p, s = _factor_prime_power(q)
    return Field(p, s, poly)


def parse_field_descriptor(text):
    """Parse 'GF(p)' / 'GF(p^s)' / a bare prime-power integer string."""
    text = text.strip()
    if text.upper().startswith("GF(") and text.endswith(")"):
        inner = text[3:-1]
        if "^" in inner:
            p, s = inner.split("^")
            return Field(int(p), int(s))
        return GF(int(inner))
    return GF(int(text))


# ---------------------------------------------------------------------------
# vectors and matrices: plain int tuples
# ---------------------------------------------------------------------------

def vec_add(F, u, v):
    return tuple(F._add[a][b] for a, b in zip(u, v))

def vec_scale(F, c, u):
    return tuple(F._mul[c][a] for a in u)

def vec_dot(F, u, v):
    acc = 0
    for a, b in zip(u, v):
        acc = F._add[acc][F._mul[a][b]]
    return acc

def mat_identity(n):
    return tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n))

def mat_mul(F, A, B):
    add, mul = F._add, F._mul
    Bt = tuple(zip(*B))
    out = []
    for row in A:
        orow = []
        for col in Bt:
            acc = 0
            for a, b in zip(row, col):
                acc = add[acc][mul[a][b]]
            orow.append(acc)
        out.append(tuple(orow))
    return tuple(out)

def mat_vec(F, A, v):
    return tuple(vec_dot(F, row, v) for row in A)

def mat_transpose(A):
    return tuple(zip(*A))


def rref(F, rows):
    """Reduced row echelon form; returns (nonzero rows, pivot columns)."""
    rows = [list(r) for r in rows]
    if not rows:
        return (), ()
    ncols = len(rows[0])
    pivots = []
    r = 0
    for c in range(ncols):
        pivot = next((i for i in range(r, len(rows)) if rows[i][c]), None)
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        inv = F._inv[rows[r][c]]
        rows[r] = [F._mul[inv][x] for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c]:
                factor = rows[i][c]
                rows[i] = [F.sub(x, F._mul[factor][y]) for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    out = tuple(tuple(row) for row in rows[:r] if any(row))
    return out, tuple(pivots)


def nullspace(F, A, ncols=None):
    """Basis (RREF) of the right kernel {x : A x = 0}."""
    if not A:
        n = ncols or 0
        return [tuple(1 if i == j else 0 for i in range(n)) for j in range(n)]
    n = len(A[0])
    R, pivots = rref(F, A)
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for fc in free:
        v = [0] * n
        v[fc] = 1
        for r, pc in enumerate(pivots):
            v[pc] = F._neg[R[r][fc]]
        basis.append(tuple(v))
    return basis


def mat_inv(F, A):
    n = len(A)
    aug = [list(row) + list(mat_identity(n)[i]) for i, row in enumerate(A)]
    R, pivots = rref(F, aug)
    if pivots != tuple(range(n)):
        raise DomainError("matrix is singular")
    return tuple(tuple(row[n:]) for row in R)


def mat_det(F, A):
    n = len(A)
    rows = [list(r) for r in A]
    det = 1
    for c in range(n):
        pivot = next((i for i in range(c, n) if rows[i][c]), None)
        if pivot is None:
            return 0
        if pivot != c:
            rows[c], rows[pivot] = rows[pivot], rows[c]
            det = F._neg[det]
        det = F._mul[det][rows[c][c]]
        inv = F._inv[rows[c][c]]
        for i in range(c + 1, n):
            if rows[i][c]:
                factor = F._mul[rows[i][c]][inv]
                rows[i] = [F.sub(x, F._mul[factor][y]) for x, y in zip(rows[i], rows[c])]
    return det


# ---------------------------------------------------------------------------
# subspaces
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Subspace:
    """A subspace of F^m in canonical (RREF) form."""

    field: Field
    ambient: int
    rows: tuple  # RREF basis, no zero rows

    @staticmethod
    def span(F, ambient, vectors):
        for v in vectors:
            if len(v) != ambient:
                raise DomainError("vector length does not match ambient dimension")
        R, _ = rref(F, vectors)
        return Subspace(F, ambient, R)

    @staticmethod
    def zero(F, ambient):
        return Subspace(F, ambient, ())

    @staticmethod
    def full(F, ambient):
        return Subspace(F, ambient, mat_identity(ambient))

    @property
    def dim(self):
        return len(self.rows)

    def contains_vector(self, v):
        F = self.field
        v = list(v)
        for row in self.rows:
            lead = next(i for i, x in enumerate(row) if x)
            if v[lead]:
                c = v[lead]
                v = [F.sub(x, F._mul[c][y]) for x, y in zip(v, row)]
        return not any(v)

    def contains(self, other):
        return all(self.contains_vector(r) for r in other.rows)

    def vectors(self):
        """All q^dim vectors (small subspaces only)."""
        F = self.field
        out = []
        for coeffs in product(F.elements(), repeat=self.dim):
            v = (0,) * self.ambient
            for c, row in zip(coeffs, self.rows):
                v = vec_add(F, v, vec_scale(F, c, row))
            out.append(v)
        return out

    def add(self, other):
        self._check_ambient(other)
        R, _ = rref(self.field, self.rows + other.rows)
        return Subspace(self.field, self.ambient, R)

    def intersect(self, other):
        self._check_ambient(other)
        F = self.field
        if not self.rows or not other.rows:
            return Subspace.zero(F, self.ambient)
        # x in U cap W  <=>  x = a.U = b.W; solve [U^T | -W^T] (a|b) = 0
        stacked = [
            tuple(self.rows[i][c] for i in range(self.dim))
            + tuple(F._neg[other.rows[j][c]] for j in range(other.dim))
            for c in range(self.ambient)
        ]
        vecs = []
        for sol in nullspace(F, stacked, self.dim + other.dim):
            a = sol[: self.dim]
            v = (0,) * self.ambient
            for c, row in zip(a, self.rows):
                v = vec_add(F, v, vec_scale(F, c, row))
            vecs.append(v)
        return Subspace.span(F, self.ambient, vecs)

    def quotient_basis(self):
        """Non-pivot coordinates give a section of F^m -> F^m / self."""
        pivots = tuple(next(i for i, x in enumerate(row) if x) for row in self.rows)
        return tuple(c for c in range(self.ambient) if c not in pivots)

    def quotient_map(self):
        """Linear map F^m -> F^(m-dim) with kernel exactly this subspace."""
        F = self.field
        pivots = tuple(next(i for i, x in enumerate(row) if x) for row in self.rows)
        free = self.quotient_basis()

        def project(v):
            v = list(v)
            for row, lead in zip(self.rows, pivots):
                if v[lead]:
                    c = v[lead]
                    v = [F.sub(x, F._mul[c][y]) for x, y in zip(v, row)]
            return tuple(v[c] for c in free)

        return project

    def map_subspace(self, linmap, target_ambient):
        """Image of this subspace under a linear map given as a callable."""
        return Subspace.span(self.field, target_ambient, [linmap(r) for r in self.rows])

    def sort_key(self):
        return (self.dim, self.rows)

    def _check_ambient(self, other):
        if self.ambient != other.ambient or self.field != other.field:
            raise DomainError("subspaces live in different ambient spaces")

    def __repr__(self):
        return f"Subspace(dim={self.dim}, ambient={self.ambient})"


def is_transversal(U, W):
    """U and W are transversal: U cap W = 0 or U + W = V."""
    U._check_ambient(W)
    # dim(U cap W) = dim U + dim W - dim(U+W)
    total = U.add(W).dim
    meet = U.dim + W.dim - total
    return meet == 0 or total == U.ambient


def enumerate_subspaces(F, ambient, d, caps=None):
    """All d-dimensional subspaces of F^ambient, each exactly once (RREF)."""
    if d < 0 or d > ambient:
        raise DomainError("subspace dimension out of range")
    if d == 0:
        return [Subspace.zero(F, ambient)]
    count = gaussian_binomial(ambient, d, F.q)
    if caps is not None:
        caps.check("subspaces", count, f"[{ambient} choose {d}]_{F.q} subspaces")
    out = []
    for pivots in combinations(range(ambient), d):
        free_pos = []
        for r in range(d):
            for c in range(pivots[r] + 1, ambient):
                if c not in pivots:
                    free_pos.append((r, c))
        for fill in product(F.elements(), repeat=len(free_pos)):
            rows = [[0] * ambient for _ in range(d)]
            for r, pc in enumerate(pivots):
                rows[r][pc] = 1
            for (r, c), val in zip(free_pos, fill):
                rows[r][c] = val
            out.append(Subspace(F, ambient, tuple(tuple(r) for r in rows)))
    assert len(out) == count
    return out


def gaussian_binomial(n, k, q):
    if k < 0 or k > n:
        return 0
    num = den = 1
    for i in range(k):
        num *= q ** (n - i) - 1
        den *= q ** (i + 1) - 1
    assert num % den == 0
    return num // den


# ---------------------------------------------------------------------------
# bilinear and quadratic forms (odd characteristic)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Form:
    """Symmetric bilinear form f with quadratic form Q(x) = f(x,x)/2.

    Odd characteristic only: Q and f determine each other, the form
    parameter of the general theory is trivial here.
    """

    field: Field
    matrix: tuple  # symmetric m x m

    def __post_init__(self):
        F = self.field
        if F.p == 2:
            raise DomainError("forms require odd characteristic")
        if any(len(r) != len(self.matrix) for r in self.matrix):
            raise MalformedInputError("form matrix must be square")
        if self.matrix != mat_transpose(self.matrix):
            raise MalformedInputError("form matrix must be symmetric")

    @property
    def ambient(self):
        return len(self.matrix)

    def f(self, x, y):
        return vec_dot(self.field, x, mat_vec(self.field, self.matrix, y))

    def q(self, x):
        F = self.field
        return F._mul[self.f(x, x)][F.inv(F.embed_int(2))]

    def perp(self, U):
        """U^perp = {x : f(x, U) = 0}."""
        F = self.field
        if U.dim == 0:
            return Subspace.full(F, self.ambient)
        rows = tuple(mat_vec(F, self.matrix, r) for r in U.rows)
        return Subspace.span(F, self.ambient, nullspace(F, rows, self.ambient))

    def radical(self):
        return self.perp(Subspace.full(self.field, self.ambient))

    def is_nondegenerate(self):
        return self.radical().dim == 0

    def is_totally_isotropic(self, U):
        """U <= U^perp and Q(U) = 0 (basis checks suffice in odd char)."""
        for i, u in enumerate(U.rows):
            if self.q(u) != 0:
                return False
            for v in U.rows[i:]:
                if self.f(u, v) != 0:
                    return False
        return True

    def witt_index(self, caps=None):
        """Maximal dimension of a totally isotropic subspace, by greedy growth
        (all maximal totally isotropic subspaces share one dimension)."""
        F = self.field
        if caps is not None:
            caps.check("subspaces", F.q**self.ambient, "vector sweep for Witt index")
        U = Subspace.zero(F, self.ambient)
        while True:
            grown = False
            for v in self.perp(U).vectors():
                if any(v) and self.q(v) == 0 and not U.contains_vector(v):
                    U = U.add(Subspace.span(F, self.ambient, [v]))
                    grown = True
                    break
            if not grown:
                return U.dim

    def isotropic_subspaces(self, d, caps=None):
        """All totally isotropic d-subspaces (enumeration + filter)."""
        return [
            U
            for U in enumerate_subspaces(self.field, self.ambient, d, caps)
            if self.is_totally_isotropic(U)
        ]


def hyperbolic_form(F, n):
    """Nondegenerate form of Witt index n on F^(2n): Q = x_1 x_{n+1} + ..."""
    m = 2 * n
    rows = [[0] * m for _ in range(m)]
    for i in range(n):
        rows[i][n + i] = 1
        rows[n + i][i] = 1
    return Form(F, tuple(tuple(r) for r in rows))


def tilde_transversal(U, W, form):
    """Transversal, or both self-perp maximal isotropic meeting in a line."""
    if is_transversal(U, W):
        return True
    n2 = form.ambient
    if n2 % 2 != 0:
        return False
    n = n2 // 2
    if U.dim != n or W.dim != n:
        return False
    if not (form.is_totally_isotropic(U) and form.is_totally_isotropic(W)):
        return False
    if form.perp(U) != U or form.perp(W) != W:
        return False
    return U.intersect(W).dim == 1
