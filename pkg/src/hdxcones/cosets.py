"""Finite matrix groups and their coset complexes.

Groups are enumerated by breadth-first closure over generator products;
elements are field-encoded integer tuples, so sets and dict keys are cheap.
No Schreier-Sims machinery: caps keep full enumeration feasible and every
derived fact (orders, intersections, transitivity) directly checkable.
"""

from dataclasses import dataclass
from itertools import combinations

from .caps import default_caps
from .errors import DomainError, MalformedInputError, UnsupportedError
from .fqlinalg import Field
from .simplicial import Complex


def identity_matrix(n):
    return tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n))


def elementary_matrix(F, n, i, j, value):
    """e_{i,j}(value): ones on the diagonal, value at position (i,j); 1-based."""
    if i == j:
        raise DomainError("elementary matrix needs i != j")
    rows = [[1 if r == c else 0 for c in range(n)] for r in range(n)]
    rows[i - 1][j - 1] = value
    return tuple(tuple(r) for r in rows)


def _mat_mul(F, A, B):
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


class MatrixGroup:
    """A finite matrix group with a fully enumerated element set."""

    def __init__(self, field, degree, generators, elements, element_index):
        self.field = field
        self.degree = degree
        self.generators = tuple(generators)
        self.elements = elements  # tuple, elements[0] is the identity
        self.element_index = element_index  # matrix -> position
        self.element_set = frozenset(elements)

    @property
    def order(self):
        return len(self.elements)

    def mul(self, A, B):
        return _mat_mul(self.field, A, B)

    def __contains__(self, M):
        return M in self.element_set

    def subgroup(self, generators):
        """Closure of a generator subset (must stay inside this group)."""
        sub = enumerate_group(self.field, self.degree, generators, caps=None)
        if not sub.element_set <= self.element_set:
            raise DomainError("generators leave the ambient group")
        return sub

    def subgroup_from_elements(self, elements):
        elements = tuple(elements)
        index = {M: i for i, M in enumerate(elements)}
        return MatrixGroup(self.field, self.degree, elements, elements, index)

    def intersection(self, other):
        common = self.element_set & other.element_set
        ident = identity_matrix(self.degree)
        ordered = (ident,) + tuple(M for M in self.elements if M in common and M != ident)
        return self.subgroup_from_elements(ordered)

    def __repr__(self):
        return f"MatrixGroup(order={self.order}, degree={self.degree})"


def enumerate_group(field, degree, generators, caps=None):
    """BFS closure of the generators (finite by the cap)."""
    if caps is None:
        caps = default_caps()
    generators = [tuple(tuple(row) for row in M) for M in generators]
    for M in generators:
        if len(M) != degree or any(len(r) != degree for r in M):
            raise MalformedInputError("generator has the wrong shape")
    ident = identity_matrix(degree)
    elements = [ident]
    index = {ident: 0}
    frontier = [ident]
    while frontier:
        nxt = []
        for M in frontier:
            for g in generators:
                P = _mat_mul(field, M, g)
                if P not in index:
                    index[P] = len(elements)
                    elements.append(P)
                    nxt.append(P)
                    if caps and len(elements) > caps.group_order:
                        from .errors import ResourceCapError

                        raise ResourceCapError(
                            f"group closure exceeded cap {caps.group_order}",
                            partial=len(elements),
                        )
        frontier = nxt
    return MatrixGroup(field, degree, generators, tuple(elements), index)


# ---------------------------------------------------------------------------
# coset complexes
# ---------------------------------------------------------------------------

@dataclass
class CosetComplexSpec:
    """CC(G; H_0..H_n) together with the bookkeeping the checks need."""

    group: MatrixGroup
    subgroups: tuple
    complex: Complex
    coset_ids: tuple       # per type: dict element -> coset id
    coset_reps: tuple      # per type: list of representative elements
    facet_of: dict         # element -> facet (tuple of vertex labels)
    report: dict = None
    _ref_cache: dict = None  # type set -> reference link complex (Prop.-style)

    @property
    def num_types(self):
        return len(self.subgroups)

    def vertex_type(self, label):
        return label[0]

    def type_of_face(self, labels):
        return frozenset(lab[0] for lab in labels)


def _coset_ids(group, sub):
    """Dense right-coset labelling gH via orbit BFS (right multiplication)."""
    gens = sub.generators if sub.generators else sub.elements
    ids = {}
    reps = []
    for e in group.elements:
        if e in ids:
            continue
        cid = len(reps)
        reps.append(e)
        ids[e] = cid
        frontier = [e]
        while frontier:
            nxt = []
            for M in frontier:
                for h in gens:
                    P = _mat_mul(group.field, M, h)
                    if P not in ids:
                        ids[P] = cid
                        nxt.append(P)
            frontier = nxt
    return ids, reps


def coset_complex(group, subgroups, caps=None):
    """The coset complex CC(G; H): vertices are cosets, faces share an element."""
    for H in subgroups:
        if not H.element_set <= group.element_set:
            raise DomainError("subgroup is not contained in the group")
    ids = []
    reps = []
    for H in subgroups:
        i, r = _coset_ids(group, H)
        ids.append(i)
        reps.append(r)
    facet_of = {}
    facets = set()
    for g in group.elements:
        facet = tuple((t, ids[t][g]) for t in range(len(subgroups)))
        facet_of[g] = facet
        facets.add(facet)
    vertices = [
        (t, c) for t in range(len(subgroups)) for c in range(len(reps[t]))
    ]
    cx = Complex.from_maximal_faces([list(f) for f in facets], vertices=vertices)
    spec = CosetComplexSpec(
        group=group,
        subgroups=tuple(subgroups),
        complex=cx,
        coset_ids=tuple(ids),
        coset_reps=tuple(reps),
        facet_of=facet_of,
    )
    _check_partite(spec)
    return spec


def _check_partite(spec):
    for k in range(1, spec.complex.n + 1):
        for f in spec.complex.faces_of_dim(k):
            labels = spec.complex.labels_of(f)
            types = [lab[0] for lab in labels]
            if len(set(types)) != len(types):
                raise DomainError("coset complex is not partite; bad subgroup data")


def subgroup_for_type_set(spec, T):
    """H_T = intersection of the H_i, i in T (H_emptyset is the whole group)."""
    T = sorted(T)
    if not T:
        return spec.group
    H = spec.subgroups[T[0]]
    for t in T[1:]:
        H = H.intersection(spec.subgroups[t])
    return H


def link_identification(spec, face_labels, caps=None):
    """Check link(X, sigma) == CC(H_T, (H_{T u {i}})_{i not in T}) up to
    type-preserving isomorphism.  Returns (ok, mapping or None)."""
    from .buildings import complexes_isomorphic

    X = spec.complex
    face = X.face_from_labels(face_labels)
    if not face:
        raise DomainError("link identification needs a nonempty face")
    T = sorted({lab[0] for lab in face_labels})
    others = [i for i in range(spec.num_types) if i not in T]
    if not others:
        link = X.link(face_labels)
        ok = link.n == -1 or link.num_vertices == 0
        return ok, {}
    if spec._ref_cache is None:
        spec._ref_cache = {}
    key = tuple(T)
    if key not in spec._ref_cache:
        H_T = subgroup_for_type_set(spec, T)
        spec._ref_cache[key] = coset_complex(
            H_T, [subgroup_for_type_set(spec, T + [i]) for i in others]
        )
    ref = spec._ref_cache[key]
    # reference type t corresponds to original type others[t]
    link = X.link(face_labels)
    colors_link = {lab: lab[0] for lab in link.labels}
    colors_ref = {lab: others[lab[0]] for lab in ref.complex.labels}
    mapping = complexes_isomorphic(
        link, ref.complex, colors_x=colors_link, colors_y=colors_ref, caps=caps
    )
    return mapping is not None, mapping


def facet_transitivity(spec):
    """Left G-translation is simplicial and transitive on facets."""
    if not isinstance(spec, CosetComplexSpec):
        raise UnsupportedError(
            "facet transitivity check applies to coset complexes only"
        )
    G = spec.group
    facets = set(spec.complex.facets())
    label_of = {}
    for f in facets:
        label_of[f] = tuple(spec.complex.labels_of(f))
    # left action on vertex labels, one permutation per generator
    for g in G.generators:
        vertex_image = {}
        for t in range(spec.num_types):
            ids = spec.coset_ids[t]
            for cid, rep in enumerate(spec.coset_reps[t]):
                vertex_image[(t, cid)] = (t, ids[_mat_mul(G.field, g, rep)])
        for f in facets:
            image = [vertex_image[lab] for lab in label_of[f]]
            if not spec.complex.has_face_labels(image):
                return False
    # transitivity on facets: the orbit of the identity facet is everything
    start = spec.facet_of[G.elements[0]]
    seen = {start}
    frontier = [G.elements[0]]
    seen_elems = {G.elements[0]}
    while frontier:
        nxt = []
        for e in frontier:
            for g in G.generators:
                P = _mat_mul(G.field, g, e)
                if P not in seen_elems:
                    seen_elems.add(P)
                    seen.add(spec.facet_of[P])
                    nxt.append(P)
        frontier = nxt
    return len(seen) == len(facets)


# ---------------------------------------------------------------------------
# the explicit SL construction and the unipotent opposition model
# ---------------------------------------------------------------------------

def _root_subgroup_generators(F, degree, position, scale=1):
    """All e_{i,j}(c * scale), c ranging over the prime subfield."""
    i, j = position
    base = range(1, F.p)  # nontrivial prime-subfield multiples
    return [
        elementary_matrix(F, degree, i, j, F._mul[F.from_coeffs([c])][scale])
        for c in base
    ]


def kms_sl_example(n, q, poly_coeffs, caps=None):
    """Quotient-of-SL coset complex: generators e_{i,i+1}(1) and e_{n+1,1}(t),
    reduced modulo an irreducible polynomial of degree s > 1.

    Builds the image group, the n+1 local subgroups omitting one generator
    each, the coset complex, and a report of the construction checks
    (local orders and injectivity, pairwise intersection condition,
    purity/partiteness/connectivity).
    """
    if caps is None:
        caps = default_caps()
    # base parameter must be prime: the quotient ring F_q[t]/(f) is realised
    # as a single-variable polynomial quotient over the prime field
    for p in range(2, q + 1):
        if q % p == 0:
            if q != p:
                raise DomainError("kms-sl builder supports prime q only")
            break
    s = len(poly_coeffs) - 1
    if s < 2:
        raise DomainError("need an irreducible polynomial of degree s > 1")
    try:
        F = Field(q, s, tuple(poly_coeffs))
    except MalformedInputError as e:
        raise DomainError(f"bad modulus polynomial: {e}") from None
    degree = n + 1
    t_bar = F.gen()
    # node i (1..n) carries e_{i,i+1}; node 0 carries e_{n+1,1}(t)
    node_gens = {0: _root_subgroup_generators(F, degree, (n + 1, 1), scale=t_bar)}
    for i in range(1, n + 1):
        node_gens[i] = _root_subgroup_generators(F, degree, (i, i + 1))
    all_gens = [g for i in range(n + 1) for g in node_gens[i]]
    G = enumerate_group(F, degree, all_gens, caps=caps)
    subgroups = []
    for i in range(n + 1):
        gens = [g for j in range(n + 1) if j != i for g in node_gens[j]]
        subgroups.append(G.subgroup(gens))
    spec = coset_complex(G, subgroups, caps=caps)

    expected_local = q ** (n * (n + 1) // 2)
    local_orders = [H.order for H in subgroups]
    intersections_ok = True
    for a, b in combinations(range(n + 1), 2):
        gens = [g for j in range(n + 1) if j not in (a, b) for g in node_gens[j]]
        generated = enumerate_group(F, degree, gens, caps=caps)
        if generated.element_set != (
            subgroups[a].element_set & subgroups[b].element_set
        ):
            intersections_ok = False
    spec.report = {
        "group_order": G.order,
        "local_orders": local_orders,
        "local_orders_expected": expected_local,
        "injective_on_locals": all(o == expected_local for o in local_orders),
        "intersections_ok": intersections_ok,
        "pure": spec.complex.pure,
        "dimension": spec.complex.n,
        "partite_types": n + 1,
        "connected": spec.complex.is_connected(),
    }
    return spec


def unipotent_opposition(n, q, caps=None):
    """CC(U+, (U_{I minus {i}})_i) for the upper unitriangular group of
    SL_{n+1}(F_q): the coset model of the full-flag opposition complex."""
    if caps is None:
        caps = default_caps()
    from .fqlinalg import GF

    F = GF(q)
    degree = n + 1
    node_gens = {}
    for i in range(1, n + 1):
        node_gens[i] = [
            elementary_matrix(F, degree, i, i + 1, c) for c in range(1, F.q)
        ]
    all_gens = [g for i in range(1, n + 1) for g in node_gens[i]]
    G = enumerate_group(F, degree, all_gens, caps=caps)
    subgroups = []
    for i in range(1, n + 1):
        gens = [g for j in range(1, n + 1) if j != i for g in node_gens[j]]
        subgroups.append(G.subgroup(gens))
    spec = coset_complex(G, subgroups, caps=caps)
    spec.report = {
        "group_order": G.order,
        "group_order_expected": q ** (n * (n + 1) // 2),
    }
    return spec
