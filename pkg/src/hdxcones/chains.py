"""Chains, cochains and integer homology.

Coefficient groups are Z, Z/m, or finite direct sums of those; elements of
a single-component group are ints, multi-component elements are int tuples.
Chains and cochains store one coefficient per *canonical* oriented simplex
(ascending vertex indices); evaluating the reversed orientation negates.
"""

from fractions import Fraction

from .errors import DomainError, MalformedInputError

# ---------------------------------------------------------------------------
# coefficient groups
# ---------------------------------------------------------------------------


class CoefficientGroup:
    """Z, Z/m, or a finite direct sum given as a tuple of components.

    Components are represented as None (for Z) or the modulus m >= 2.
    """

    def __init__(self, components):
        components = tuple(components)
        if not components:
            raise MalformedInputError("coefficient group needs at least one component")
        for c in components:
            if c is not None and (not isinstance(c, int) or c < 2):
                raise MalformedInputError(f"bad component {c!r}: want None (=Z) or m>=2")
        self.components = components
        self.single = len(components) == 1

    @staticmethod
    def parse(spec):
        """Accepts "Z", "Z/m", an int m, or a list of those."""
        if isinstance(spec, CoefficientGroup):
            return spec
        if isinstance(spec, (list, tuple)):
            parts = []
            for item in spec:
                parts.extend(CoefficientGroup.parse(item).components)
            return CoefficientGroup(parts)
        if isinstance(spec, int):
            return CoefficientGroup((spec,))
        text = str(spec).strip()
        if text in ("Z", "ℤ"):
            return CoefficientGroup((None,))
        if text.startswith("Z/"):
            return CoefficientGroup((int(text[2:]),))
        if text.isdigit():
            return CoefficientGroup((int(text),))
        raise MalformedInputError(f"cannot parse coefficient group {spec!r}")

    @property
    def descriptor(self):
        names = ["Z" if c is None else f"Z/{c}" for c in self.components]
        return names[0] if self.single else names

    def is_finite(self):
        return all(c is not None for c in self.components)

    def order(self):
        if not self.is_finite():
            return None
        n = 1
        for c in self.components:
            n *= c
        return n

    # element helpers --------------------------------------------------------
    @property
    def zero(self):
        return 0 if self.single else (0,) * len(self.components)

    def _reduce1(self, c, a):
        return a if c is None else a % c

    def reduce(self, a):
        if self.single:
            return self._reduce1(self.components[0], a)
        return tuple(self._reduce1(c, x) for c, x in zip(self.components, a))

    def add(self, a, b):
        if self.single:
            return self._reduce1(self.components[0], a + b)
        return tuple(
            self._reduce1(c, x + y) for c, x, y in zip(self.components, a, b)
        )

    def neg(self, a):
        if self.single:
            return self._reduce1(self.components[0], -a)
        return tuple(self._reduce1(c, -x) for c, x in zip(self.components, a))

    def scale_int(self, n, a):
        """Z-module action."""
        if self.single:
            return self._reduce1(self.components[0], n * a)
        return tuple(self._reduce1(c, n * x) for c, x in zip(self.components, a))

    def is_zero(self, a):
        return a == self.zero

    def elements(self):
        if not self.is_finite():
            raise DomainError("cannot enumerate an infinite coefficient group")
        if self.single:
            return list(range(self.components[0]))
        out = [()]
        for c in self.components:
            out = [t + (x,) for t in out for x in range(c)]
        return out

    def component_groups(self):
        return [CoefficientGroup((c,)) for c in self.components]

    def split(self, a):
        """Element -> per-component ints."""
        return (a,) if self.single else tuple(a)

    def join(self, parts):
        parts = tuple(parts)
        return parts[0] if self.single else parts

    def __eq__(self, other):
        return (
            isinstance(other, CoefficientGroup) and self.components == other.components
        )

    def __hash__(self):
        return hash(self.components)

    def __repr__(self):
        return f"CoefficientGroup({self.descriptor!r})"


ZZ = CoefficientGroup((None,))


# ---------------------------------------------------------------------------
# oriented simplices
# ---------------------------------------------------------------------------

def canonical_oriented(vertex_indices):
    """Sort a vertex-index tuple; return (sorted tuple, permutation sign).

    Raises on repeated vertices (the degenerate simplex is zero, callers
    that can produce repeats must check first).
    """
    seq = list(vertex_indices)
    if len(set(seq)) != len(seq):
        raise DomainError(f"repeated vertex in oriented simplex {seq}")
    sign = 1
    # insertion sort, counting swaps
    for i in range(1, len(seq)):
        j = i
        while j > 0 and seq[j - 1] > seq[j]:
            seq[j - 1], seq[j] = seq[j], seq[j - 1]
            sign = -sign
            j -= 1
    return tuple(seq), sign


class _SparseCoefficients:
    """Shared internals of Chain and Cochain."""

    __slots__ = ("complex", "degree", "group", "entries")

    def __init__(self, complex, degree, group, entries):
        self.complex = complex
        self.degree = degree
        self.group = group
        self.entries = entries  # canonical index tuple -> nonzero coefficient

    def _like(self, entries):
        return type(self)(self.complex, self.degree, self.group, entries)

    def support(self):
        return frozenset(self.entries)

    def is_zero(self):
        return not self.entries

    def coefficient(self, simplex):
        """Coefficient on an *oriented* simplex given as an index tuple."""
        canon, sign = canonical_oriented(simplex)
        val = self.entries.get(canon, self.group.zero)
        return val if sign == 1 else self.group.neg(val)

    def _binop(self, other, fn):
        if (
            other.complex is not self.complex
            and other.complex != self.complex
            or other.degree != self.degree
            or other.group != self.group
        ):
            raise DomainError("operands live in different chain groups")
        g = self.group
        out = dict(self.entries)
        for s, c in other.entries.items():
            val = g.add(out.get(s, g.zero), fn(c))
            if g.is_zero(val):
                out.pop(s, None)
            else:
                out[s] = val
        return self._like(out)

    def __add__(self, other):
        return self._binop(other, lambda c: c)

    def __sub__(self, other):
        return self._binop(other, self.group.neg)

    def __neg__(self):
        g = self.group
        return self._like({s: g.neg(c) for s, c in self.entries.items()})

    def scale_int(self, n):
        g = self.group
        out = {}
        for s, c in self.entries.items():
            val = g.scale_int(n, c)
            if not g.is_zero(val):
                out[s] = val
        return self._like(out)

    def __eq__(self, other):
        return (
            type(other) is type(self)
            and self.degree == other.degree
            and self.group == other.group
            and self.complex == other.complex
            and self.entries == other.entries
        )

    def __repr__(self):
        terms = ", ".join(f"{c}*{s}" for s, c in sorted(self.entries.items()))
        return f"{type(self).__name__}(deg={self.degree}, {{{terms}}})"

    def to_json_dict(self):
        return {
            "degree": self.degree,
            "entries": [
                {
                    "simplex": list(s),
                    "coeff": list(c) if isinstance(c, tuple) else c,
                }
                for s, c in sorted(self.entries.items())
            ],
        }

    @classmethod
    def from_json_dict(cls, data, complex, group=None):
        if group is None:
            group = ZZ
        try:
            degree = data["degree"]
            raw = data["entries"]
        except (KeyError, TypeError) as e:
            raise MalformedInputError(f"bad chain JSON: {e}") from None
        entries = {}
        for item in raw:
            coeff = item["coeff"]
            coeff = group.reduce(tuple(coeff) if isinstance(coeff, list) else coeff)
            s = tuple(item["simplex"])
            if not complex.has_face(s) or tuple(sorted(s)) != s:
                raise MalformedInputError(f"{s} is not a canonical face")
            if not group.is_zero(coeff):
                entries[s] = coeff
        return cls(complex, degree, group, entries)


class Chain(_SparseCoefficients):
    """A sparse k-chain; degree -1 chains are multiples of the empty simplex."""

    @staticmethod
    def zero(X, degree, group=ZZ):
        return Chain(X, degree, group, {})

    @staticmethod
    def unit(X, oriented_labels, coeff=1, group=ZZ):
        """coeff * 1_[v0..vk] for an ordered label sequence."""
        idx = tuple(X.index_of(lab) for lab in oriented_labels)
        canon, sign = canonical_oriented(idx)
        if not X.has_face(canon):
            raise DomainError(f"{tuple(oriented_labels)} is not a face")
        coeff = group.reduce(group.scale_int(sign, coeff))
        entries = {} if group.is_zero(coeff) else {canon: coeff}
        return Chain(X, len(canon) - 1, group, entries)

    @staticmethod
    def unit_canonical(X, canon, coeff=1, group=ZZ):
        """coeff * 1_sigma for an already-sorted index tuple."""
        coeff = group.reduce(coeff)
        entries = {} if group.is_zero(coeff) else {canon: coeff}
        return Chain(X, len(canon) - 1, group, entries)

    def boundary(self):
        """The boundary; degree 0 chains map to multiples of 1_empty."""
        if self.degree < 0:
            raise DomainError("boundary of a degree -1 chain is undefined")
        g = self.group
        out = {}
        for s, c in self.entries.items():
            for i in range(len(s)):
                face = s[:i] + s[i + 1 :]
                val = g.add(out.get(face, g.zero), g.scale_int((-1) ** i, c))
                if g.is_zero(val):
                    out.pop(face, None)
                else:
                    out[face] = val
        return Chain(self.complex, self.degree - 1, g, out)

    def map_to(self, other):
        """Reinterpret on another complex sharing the vertex labels."""
        g = self.group
        out = {}
        for s, c in self.entries.items():
            labels = self.complex.labels_of(s)
            idx = tuple(other.index_of(lab) for lab in labels)
            canon, sign = canonical_oriented(idx)
            if not other.has_face(canon):
                raise DomainError(f"face {labels} missing from target complex")
            val = g.add(out.get(canon, g.zero), g.scale_int(sign, c))
            if g.is_zero(val):
                out.pop(canon, None)
            else:
                out[canon] = val
        return Chain(other, self.degree, g, out)


class Cochain(_SparseCoefficients):
    """A sparse k-cochain with the weighted norm."""

    @staticmethod
    def zero(X, degree, group=ZZ):
        return Cochain(X, degree, group, {})

    @staticmethod
    def from_values(X, degree, values, group=ZZ):
        """values: canonical index tuple -> coefficient."""
        entries = {}
        for s, c in values.items():
            c = group.reduce(c)
            if not group.is_zero(c):
                entries[tuple(s)] = c
        return Cochain(X, degree, group, entries)

    def norm(self):
        """Sum of the weights of the support (exact rational in [0,1])."""
        return sum(
            (self.complex.weight(s) for s in self.entries), start=Fraction(0)
        )

    def coboundary(self):
        """d_k: evaluate on each (k+1)-simplex by the alternating-sum formula."""
        X = self.complex
        k = self.degree
        if k > X.n - 1:
            raise DomainError(f"coboundary undefined for degree {k} on an {X.n}-complex")
        g = self.group
        out = {}
        for s in X.faces_of_dim(k + 1):
            acc = g.zero
            for i in range(len(s)):
                face = s[:i] + s[i + 1 :]
                c = self.entries.get(face)
                if c is not None:
                    acc = g.add(acc, g.scale_int((-1) ** i, c))
            if not g.is_zero(acc):
                out[s] = acc
        return Cochain(X, k + 1, g, out)


def pairing(phi, A):
    """<phi, A>: sum of coefficient products over canonical simplices.

    Defined for single-component groups, where coefficient product makes
    sense; the coboundary/boundary duality test uses it.
    """
    if not phi.group.single or phi.group != A.group:
        raise DomainError("pairing needs a common single-component group")
    m = phi.group.components[0]
    total = 0
    for s, c in phi.entries.items():
        a = A.entries.get(s)
        if a is not None:
            total += c * a
    return total if m is None else total % m


# ---------------------------------------------------------------------------
# brackets (join operations on chains)
# ---------------------------------------------------------------------------

def bracket_vertex(X, v_label, A):
    """[v, A]: prepend the vertex v to every simplex of A, inside X."""
    g = A.group
    v = X.index_of(v_label)
    out = {}
    for s, c in A.entries.items():
        labels = A.complex.labels_of(s)
        idx = tuple(X.index_of(lab) for lab in labels)
        if v in idx:
            raise DomainError("vertex already occurs in a simplex of the chain")
        canon, sign = canonical_oriented((v,) + idx)
        if not X.has_face(canon):
            raise DomainError(
                f"simplex {labels} is not joinable with {v_label!r} in the target"
            )
        val = g.add(out.get(canon, g.zero), g.scale_int(sign, c))
        if g.is_zero(val):
            out.pop(canon, None)
        else:
            out[canon] = val
    return Chain(X, A.degree + 1, g, out)


def bracket_chains(X, A1, A2):
    """[A1, A2]: concatenated oriented simplices; supp is the product."""
    if A1.group != A2.group:
        raise DomainError("bracket operands need a common coefficient group")
    g = A1.group
    out = {}
    for s1, c1 in A1.entries.items():
        lab1 = A1.complex.labels_of(s1)
        idx1 = tuple(X.index_of(lab) for lab in lab1)
        for s2, c2 in A2.entries.items():
            lab2 = A2.complex.labels_of(s2)
            idx2 = tuple(X.index_of(lab) for lab in lab2)
            if set(idx1) & set(idx2):
                raise DomainError("bracket factors share a vertex")
            canon, sign = canonical_oriented(idx1 + idx2)
            if not X.has_face(canon):
                raise DomainError("concatenated simplex is not a face of the target")
            # coefficient product: componentwise int product
            parts1, parts2 = g.split(c1), g.split(c2)
            prod = g.reduce(g.join(x * y for x, y in zip(parts1, parts2)))
            val = g.add(out.get(canon, g.zero), g.scale_int(sign, prod))
            if g.is_zero(val):
                out.pop(canon, None)
            else:
                out[canon] = val
    return Chain(X, A1.degree + A2.degree + 1, g, out)


# ---------------------------------------------------------------------------
# integer Smith normal form and homology
# ---------------------------------------------------------------------------

def smith_normal_form(matrix):
    """Return (diag, U, V, rank) with U * A * V = diag(diag), U,V unimodular.

    Fraction-free elimination; the pivot is always a smallest-magnitude
    nonzero entry of the remaining block, which keeps coefficients small
    at desk scale.
    """
    A = [list(row) for row in matrix]
    nrows = len(A)
    ncols = len(A[0]) if nrows else 0
    U = [[int(i == j) for j in range(nrows)] for i in range(nrows)]
    V = [[int(i == j) for j in range(ncols)] for i in range(ncols)]

    def row_op(i, j, q):  # row_i -= q * row_j
        Ai, Aj = A[i], A[j]
        for c in range(ncols):
            Ai[c] -= q * Aj[c]
        Ui, Uj = U[i], U[j]
        for c in range(nrows):
            Ui[c] -= q * Uj[c]

    def col_op(i, j, q):  # col_i -= q * col_j
        for r in range(nrows):
            A[r][i] -= q * A[r][j]
        for r in range(ncols):
            V[r][i] -= q * V[r][j]

    def swap_rows(i, j):
        A[i], A[j] = A[j], A[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for r in range(nrows):
            A[r][i], A[r][j] = A[r][j], A[r][i]
        for r in range(ncols):
            V[r][i], V[r][j] = V[r][j], V[r][i]

    t = 0
    while t < nrows and t < ncols:
        # locate smallest-magnitude nonzero in the remaining block
        best = None
        for i in range(t, nrows):
            for j in range(t, ncols):
                a = A[i][j]
                if a and (best is None or abs(a) < abs(A[best[0]][best[1]])):
                    best = (i, j)
        if best is None:
            break
        swap_rows(t, best[0])
        swap_cols(t, best[1])
        while True:
            pivot = A[t][t]
            dirty = False
            for i in range(t + 1, nrows):
                if A[i][t]:
                    q = A[i][t] // pivot
                    row_op(i, t, q)
                    if A[i][t]:
                        swap_rows(t, i)
                        pivot = A[t][t]
                    dirty = True
            for j in range(t + 1, ncols):
                if A[t][j]:
                    q = A[t][j] // pivot
                    col_op(j, t, q)
                    if A[t][j]:
                        swap_cols(t, j)
                        pivot = A[t][t]
                    dirty = True
            if dirty:
                continue
            # pivot must divide the rest of the block
            offender = None
            for i in range(t + 1, nrows):
                for j in range(t + 1, ncols):
                    if A[i][j] % pivot:
                        offender = i
                        break
                if offender is not None:
                    break
            if offender is None:
                break
            row_op(t, offender, -1)  # add offending row to pivot row
        if A[t][t] < 0:
            A[t] = [-x for x in A[t]]
            U[t] = [-x for x in U[t]]
        t += 1

    diag = [A[i][i] for i in range(min(nrows, ncols))]
    rank = sum(1 for d in diag if d)
    return diag, U, V, rank


def solve_integer(matrix, b, snf=None):
    """One integer solution x of A x = b, or None.  snf caches (diag,U,V,rank)."""
    nrows = len(matrix)
    ncols = len(matrix[0]) if nrows else 0
    if snf is None:
        snf = smith_normal_form(matrix)
    diag, U, V, rank = snf
    y = [sum(U[i][j] * b[j] for j in range(nrows)) for i in range(nrows)]
    z = [0] * ncols
    for i in range(min(nrows, ncols)):
        if diag[i]:
            if y[i] % diag[i]:
                return None
            z[i] = y[i] // diag[i]
        elif y[i]:
            return None
    for i in range(min(nrows, ncols), nrows):
        if y[i]:
            return None
    return [sum(V[i][j] * z[j] for j in range(ncols)) for i in range(ncols)]


def boundary_matrix(X, k):
    """Matrix of the boundary map C_k -> C_{k-1}; rows are (k-1)-simplices.

    Degree 0 gives the 1 x |X(0)| augmentation onto C_{-1}.
    Returns (matrix, row_index list, col_index list).
    """
    cols = sorted(X.faces_of_dim(k))
    rows = sorted(X.faces_of_dim(k - 1))
    row_pos = {s: i for i, s in enumerate(rows)}
    M = [[0] * len(cols) for _ in rows]
    for j, s in enumerate(cols):
        for i in range(len(s)):
            face = s[:i] + s[i + 1 :]
            M[row_pos[face]][j] += (-1) ** i
    return M, rows, cols


def reduced_homology_ranks(X):
    """Reduced integer homology via Smith normal form.

    Returns a list indexed by degree 0..n of (betti, torsion-divisor tuple);
    the augmentation map makes degree 0 reduced.
    """
    ranks = {}
    torsion = {}
    for k in range(0, X.n + 2):
        if k <= X.n:
            M, _, cols = boundary_matrix(X, k)
            diag, _, _, rank = smith_normal_form(M) if M else ([], [], [], 0)
            ranks[k] = rank
            torsion[k] = tuple(abs(d) for d in diag if abs(d) > 1)
        else:
            ranks[k] = 0
            torsion[k] = ()
    out = []
    for k in range(0, X.n + 1):
        nk = len(X.faces_of_dim(k))
        betti = (nk - ranks[k]) - ranks[k + 1]
        out.append((betti, torsion[k + 1]))
    return out
