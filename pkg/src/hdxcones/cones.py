"""Cone functions: representation, verification, radii and constructors.

A (k, A)-cone function with apex v sends j-chains to (j+1)-chains for
-1 <= j <= k, maps 1_empty to 1_[v], and satisfies the cone equation

    boundary(Cone(A)) + Cone(boundary(A)) = A        (0 <= j <= k).

Storage is componentwise: for A = Z/q_1 + ... + Z^m each component holds an
integer table mapping every canonical generator simplex to an integer
(j+1)-chain, understood modulo the component.  Checking the cone equation on
canonical generators suffices, and transporting Z-cones to other coefficient
groups is a per-component reduction.
"""

import json
from dataclasses import dataclass, field

from .chains import (
    ZZ,
    Chain,
    CoefficientGroup,
    boundary_matrix,
    canonical_oriented,
    smith_normal_form,
    solve_integer,
)
from .errors import DomainError, MalformedInputError, NoConeError
from .simplicial import Complex

# ---------------------------------------------------------------------------
# integer chain dicts: {canonical index tuple: int}, zeros dropped
# ---------------------------------------------------------------------------

def _acc(out, simplex, value, modulus):
    if modulus is not None:
        value %= modulus
    if not value:
        return
    new = out.get(simplex, 0) + value
    if modulus is not None:
        new %= modulus
    if new:
        out[simplex] = new
    else:
        del out[simplex]


def _combine(a, b, s=1, modulus=None):
    out = dict(a)
    for simplex, v in b.items():
        _acc(out, simplex, s * v, modulus)
    if modulus is not None:
        out = {k: v % modulus for k, v in out.items() if v % modulus}
    return out


def _reduce(d, modulus):
    if modulus is None:
        return dict(d)
    return {k: v % modulus for k, v in d.items() if v % modulus}


def _scaled(d, s, modulus):
    if s == 1:
        return dict(d)
    return _reduce({k: s * v for k, v in d.items()}, modulus)


def _int_boundary(d, modulus=None):
    out = {}
    for s, c in d.items():
        for i in range(len(s)):
            _acc(out, s[:i] + s[i + 1 :], (-1) ** i * c, modulus)
    return out


def _map_simplex(src, dst, simplex):
    labels = src.labels_of(simplex)
    idx = tuple(dst.index_of(lab) for lab in labels)
    canon, sign = canonical_oriented(idx)
    if not dst.has_face(canon):
        raise DomainError(f"face {labels} is missing from the target complex")
    return canon, sign


def _map_chain(d, src, dst, modulus=None):
    if src is dst:
        return dict(d)
    out = {}
    for s, c in d.items():
        canon, sign = _map_simplex(src, dst, s)
        _acc(out, canon, sign * c, modulus)
    return out


# ---------------------------------------------------------------------------
# the cone function value
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ConeVerdict:
    ok: bool
    failures: tuple = ()
    checked: int = 0

    def __bool__(self):
        return self.ok


@dataclass(frozen=True)
class RadiusProfile:
    """Rad_j per degree j in -1..k (max generator support size)."""

    radii: tuple  # ((j, value), ...) sorted by j

    def __getitem__(self, j):
        return dict(self.radii)[j]

    def as_dict(self):
        return dict(self.radii)

    def max_radius(self):
        return max(v for _, v in self.radii)

    def __repr__(self):
        inner = ", ".join(f"Rad_{j}={v}" for j, v in self.radii)
        return f"RadiusProfile({inner})"


class ConeFunction:
    """Linear cone function stored on canonical generators, componentwise."""

    __slots__ = ("complex", "apex", "k", "group", "tables")

    def __init__(self, complex, apex, k, group, tables):
        self.complex = complex
        self.apex = apex
        self.k = k
        self.group = group
        self.tables = tables  # one dict per group component: simplex -> int chain

    # -- construction helpers -------------------------------------------------

    @staticmethod
    def from_integer_table(complex, apex, k, table, group=ZZ):
        """Build from a single integer table, reducing per component."""
        tables = tuple(
            {s: _reduce(ch, m) for s, ch in table.items()}
            for m in group.components
        )
        return ConeFunction(complex, apex, k, group, tables)

    def generator_degrees(self):
        return range(0, min(self.k, self.complex.n) + 1)

    # -- evaluation ------------------------------------------------------------

    def evaluate_component(self, comp_index, chain_dict, modulus):
        """Linear extension of one component table to an integer chain dict."""
        table = self.tables[comp_index]
        out = {}
        for s, c in chain_dict.items():
            img = table.get(s)
            if img is None:
                raise DomainError(f"cone table has no entry for generator {s}")
            for t, v in img.items():
                _acc(out, t, c * v, modulus)
        return out

    def evaluate(self, chain):
        """Apply the cone to a Chain over the same group on the same complex."""
        if chain.group != self.group:
            raise DomainError("chain group does not match the cone group")
        d = _map_chain(chain.entries, chain.complex, self.complex)
        g = self.group
        comps = []
        for ci, m in enumerate(g.components):
            comp_chain = {s: g.split(c)[ci] for s, c in d.items() if g.split(c)[ci]}
            comps.append(self.evaluate_component(ci, comp_chain, m))
        out = {}
        for s in set().union(*comps) if comps else ():
            val = g.reduce(g.join(comp.get(s, 0) for comp in comps))
            if not g.is_zero(val):
                out[s] = val
        return Chain(self.complex, chain.degree + 1, g, out)

    def support_of_generator(self, simplex):
        """Union of component supports of Cone(1_simplex)."""
        out = set()
        for table in self.tables:
            out.update(table.get(simplex, ()))
        return frozenset(out)

    # -- verification and radii --------------------------------------------------

    def verify(self, max_failures=3):
        """Check Cone(1_empty)=1_[apex] and the cone equation on every generator."""
        X = self.complex
        apex_idx = (X.index_of(self.apex),)
        failures = []
        checked = 0
        for ci, m in enumerate(self.group.components):
            table = self.tables[ci]
            one = 1 if m is None else 1 % m
            if _reduce(table.get((), {}), m) != _reduce({apex_idx: one}, m):
                failures.append((ci, -1, ()))
            for j in self.generator_degrees():
                for s in X.faces_of_dim(j):
                    checked += 1
                    cone_s = table.get(s)
                    if cone_s is None:
                        failures.append((ci, j, s))
                    else:
                        lhs = _int_boundary(cone_s, m)
                        for i in range(len(s)):
                            face = s[:i] + s[i + 1 :]
                            img = table.get(face)
                            if img is None:
                                failures.append((ci, j, s))
                                img = {}
                            for t, v in img.items():
                                _acc(lhs, t, (-1) ** i * v, m)
                        if _reduce(lhs, m) != _reduce({s: 1}, m):
                            failures.append((ci, j, s))
                    if len(failures) >= max_failures:
                        return ConeVerdict(False, tuple(failures), checked)
        return ConeVerdict(not failures, tuple(failures), checked)

    def radius_profile(self):
        X = self.complex
        radii = [(-1, len(self.support_of_generator(())))]
        for j in self.generator_degrees():
            best = 0
            for s in X.faces_of_dim(j):
                best = max(best, len(self.support_of_generator(s)))
            radii.append((j, best))
        for j in range(min(self.k, X.n) + 1, self.k + 1):
            radii.append((j, 0))
        return RadiusProfile(tuple(radii))

    # -- relabeling ---------------------------------------------------------------

    def map_via(self, target, label_map=None):
        """Move the cone along a label bijection onto an isomorphic complex."""
        fn = (lambda lab: lab) if label_map is None else (
            label_map.__getitem__ if isinstance(label_map, dict) else label_map
        )
        src = self.complex

        def conv(simplex):
            idx = tuple(target.index_of(fn(lab)) for lab in src.labels_of(simplex))
            return canonical_oriented(idx)

        new_tables = []
        for table, m in zip(self.tables, self.group.components):
            out = {}
            for s, chain in table.items():
                canon_s, sign_s = conv(s) if s else ((), 1)
                img = {}
                for t, v in chain.items():
                    canon_t, sign_t = conv(t)
                    _acc(img, canon_t, sign_s * sign_t * v, m)
                out[canon_s] = img
            new_tables.append(out)
        return ConeFunction(target, fn(self.apex), self.k, self.group, tuple(new_tables))

    # -- serialization -------------------------------------------------------------

    def to_json_dict(self):
        g = self.group
        table_entries = []
        keys = sorted(set().union(*(t.keys() for t in self.tables)))
        for s in keys:
            supports = set().union(*(t.get(s, {}) for t in self.tables))
            chain = []
            for t in sorted(supports):
                coeff = g.join(tab.get(s, {}).get(t, 0) for tab in self.tables)
                coeff = list(coeff) if not g.single else coeff
                chain.append({"simplex": list(t), "coeff": coeff})
            table_entries.append({"simplex": list(s), "chain": chain})
        return {
            "apex": self.complex.index_of(self.apex),
            "k": self.k,
            "coeff": g.descriptor,
            "table": table_entries,
        }

    def to_json(self):
        return json.dumps(self.to_json_dict(), sort_keys=True)

    @staticmethod
    def from_json_dict(data, complex):
        try:
            apex = complex.labels[data["apex"]]
            k = data["k"]
            group = CoefficientGroup.parse(data["coeff"])
            raw = data["table"]
        except (KeyError, TypeError, IndexError) as e:
            raise MalformedInputError(f"bad cone JSON: {e}") from None
        tables = tuple({} for _ in group.components)
        for entry in raw:
            s = tuple(entry["simplex"])
            for item in entry["chain"]:
                t = tuple(item["simplex"])
                coeff = item["coeff"]
                parts = group.split(tuple(coeff) if isinstance(coeff, list) else coeff)
                for ci, v in enumerate(parts):
                    if v:
                        tables[ci].setdefault(s, {})[t] = v
            for ci in range(len(group.components)):
                tables[ci].setdefault(s, {})
        return ConeFunction(complex, apex, k, group, tables)

    def __repr__(self):
        return (
            f"ConeFunction(apex={self.apex!r}, k={self.k}, "
            f"coeff={self.group.descriptor}, on {self.complex!r})"
        )


def verify_cone(cone):
    return cone.verify()


def radius_profile(cone):
    return cone.radius_profile()


# ---------------------------------------------------------------------------
# constructors
# ---------------------------------------------------------------------------

def star_cone(X, apex_label, k, group=ZZ):
    """Cone on a complex of the form {v} * Y: simplices through v map to 0,
    all others to [v, .].  Valid for any k, including k >= dim."""
    v = X.index_of(apex_label)
    for j in range(0, X.n + 1):
        for s in X.faces_of_dim(j):
            if v not in s:
                grown = tuple(sorted(s + (v,)))
                if not X.has_face(grown):
                    raise DomainError(
                        f"{X.labels_of(s)} is not joinable with the apex: "
                        "complex is not a star"
                    )
    table = {(): {(v,): 1}}
    for j in range(0, min(k, X.n) + 1):
        for s in X.faces_of_dim(j):
            if v in s:
                table[s] = {}
            else:
                canon, sign = canonical_oriented((v,) + s)
                table[s] = {canon: sign}
    return ConeFunction.from_integer_table(X, apex_label, k, table, group)


def apex_star_cone(v_label, Y, k, group=ZZ):
    """Cone on {v} * Y with radii at most 1 in every degree."""
    if k < 0:
        raise DomainError("apex-star cone needs k >= 0")
    star = Y.add_apex(v_label)
    return star_cone(star, v_label, k, group)


def graph_bfs_cone(graph, apex_label, group=ZZ):
    """0-cone on a connected graph: each vertex maps to a shortest path chain.

    Deterministic tie-breaking: predecessors are smallest-index neighbours.
    """
    if graph.n > 1:
        raise DomainError("graph cone needs a complex of dimension <= 1")
    if not graph.is_connected():
        raise NoConeError("graph is disconnected: no 0-cone exists", degree=0)
    apex = graph.index_of(apex_label)
    adj = {v: sorted(nbrs) for v, nbrs in graph.adjacency().items()}
    dist = {apex: 0}
    parent = {}
    frontier = [apex]
    while frontier:
        nxt = []
        for v in sorted(frontier):
            for u in adj[v]:
                if u not in dist:
                    dist[u] = dist[v] + 1
                    nxt.append(u)
        frontier = nxt
    for v in dist:
        if v != apex:
            parent[v] = min(u for u in adj[v] if dist[u] == dist[v] - 1)
    table = {(): {(apex,): 1}}
    for v in range(graph.num_vertices):
        chain = {}
        w = v
        while w != apex:
            p = parent[w]
            # edge oriented parent -> child so that the telescoping boundary
            # ends at 1_[v] - 1_[apex]
            canon, sign = canonical_oriented((p, w))
            _acc(chain, canon, sign, None)
            w = p
        table[(v,)] = chain
    return ConeFunction.from_integer_table(graph, apex_label, 0, table, group)


def trivial_cone(X, apex_label=None, group=ZZ):
    """(-1)-cone: only the empty simplex maps, to the chosen vertex."""
    if apex_label is None:
        apex_label = X.labels[0]
    v = X.index_of(apex_label)
    return ConeFunction.from_integer_table(X, apex_label, -1, {(): {(v,): 1}}, group)


def join_cone(cone1, cone2):
    """Cone on the join Y1 * Y2 of degree n1 + n2.

    Needs cone_i of degree >= dim(Y_i) - 1; only those degrees are read.
    """
    if cone1.group != cone2.group:
        raise DomainError("join factors need a common coefficient group")
    Y1, Y2 = cone1.complex, cone2.complex
    n1, n2 = Y1.n, Y2.n
    if cone1.k < n1 - 1 or cone2.k < n2 - 1:
        raise DomainError(
            "join needs cone degrees at least dim-1 on each factor "
            f"(got k1={cone1.k} for n1={n1}, k2={cone2.k} for n2={n2})"
        )
    X = Y1.join(Y2)
    off = Y1.num_vertices
    k_out = n1 + n2
    group = cone1.group

    tables = []
    for ci, m in enumerate(group.components):
        t1 = cone1.tables[ci]
        t2 = cone2.tables[ci]
        table = {(): dict(t1[()])}
        for j in range(0, min(k_out, X.n) + 1):
            for s in X.faces_of_dim(j):
                s1 = tuple(i for i in s if i < off)
                s2 = tuple(i - off for i in s if i >= off)
                j1 = len(s1) - 1
                if j1 < n1:
                    img1 = t1.get(s1)
                    if img1 is None:
                        raise DomainError(f"factor-1 cone lacks generator {s1}")
                    chain = {}
                    tail = tuple(i + off for i in s2)
                    for t, v in img1.items():
                        _acc(chain, t + tail, v, m)
                else:
                    # A = 1_{s1} - Cone1(boundary 1_{s1}); value = (-1)^{n1+1} [A, Cone2(1_{s2})]
                    A = {s1: 1}
                    for i in range(len(s1)):
                        face = s1[:i] + s1[i + 1 :]
                        img = t1.get(face)
                        if img is None:
                            raise DomainError(f"factor-1 cone lacks generator {face}")
                        for t, v in img.items():
                            _acc(A, t, -((-1) ** i) * v, m)
                    B = t2.get(s2)
                    if B is None:
                        raise DomainError(f"factor-2 cone lacks generator {s2}")
                    sgn = (-1) ** (n1 + 1)
                    chain = {}
                    for ta, va in A.items():
                        for tb, vb in B.items():
                            _acc(chain, ta + tuple(i + off for i in tb), sgn * va * vb, m)
                table[s] = chain
        tables.append(table)
    apex = (0, cone1.apex)
    return ConeFunction(X, apex, k_out, group, tuple(tables))


def join_radius_bound(profile1, profile2, n1, n2, j):
    """Displayed radius bound for the join construction at degree j."""
    r1 = profile1.as_dict()
    r2 = profile2.as_dict()
    if j < n1:
        return max(r1[i] for i in range(-1, j + 1))
    head = max(r1[i] for i in range(-1, n1))
    tail = ((n1 + 1) * r1[n1 - 1] + 1) * r2[j - n1 - 1]
    return max(head, tail)


def extend_by_vertex_set(X, subcomplex, cone, W, link_cones):
    """Extend a cone on a full subcomplex X' across a non-adjacent vertex set W.

    link_cones[w] must be a verified cone on lk_X(w) cap X' of degree at
    least min(k-1, dim of that link).  Returns a cone of the same degree on
    the full subcomplex spanned by X'(0) and W.
    """
    W = tuple(W)
    if not W:
        return cone
    k = cone.k
    group = cone.group
    base = cone.complex
    sub_labels = set(subcomplex.labels)
    if set(base.labels) != sub_labels:
        raise DomainError("cone does not live on the given subcomplex")
    for w in W:
        if w in sub_labels:
            raise DomainError(f"vertex {w!r} of W already lies in the subcomplex")
        X.index_of(w)  # raises if unknown
    for i, w1 in enumerate(W):
        for w2 in W[i + 1 :]:
            if X.has_face_labels((w1, w2)):
                raise DomainError(f"W contains the edge {{{w1!r}, {w2!r}}}")
    rel_links = {}
    for w in W:
        lk = X.link([w])
        rel = lk.full_subcomplex([lab for lab in lk.labels if lab in sub_labels])
        if rel.num_vertices == 0:
            raise DomainError(f"relative link of {w!r} is empty")
        rel_links[w] = rel
        lc = link_cones[w]
        need = min(k - 1, rel.n)
        if lc.k < need:
            raise DomainError(
                f"link cone at {w!r} has degree {lc.k}, need at least {need}"
            )
        if lc.group != group:
            raise DomainError("link cone group mismatch")
        if set(lc.complex.labels) != set(rel.labels):
            raise DomainError(f"link cone at {w!r} lives on the wrong complex")

    new = X.full_subcomplex(list(subcomplex.labels) + list(W))
    w_indices = {new.index_of(w): w for w in W}

    tables = []
    for ci, m in enumerate(group.components):
        table = {(): _map_chain(cone.tables[ci][()], base, new, m)}
        for j in range(0, min(k, new.n) + 1):
            for s in new.faces_of_dim(j):
                hits = [i for i, v in enumerate(s) if v in w_indices]
                if not hits:
                    src_s, src_sign = _map_simplex(new, base, s)
                    img = cone.tables[ci].get(src_s)
                    if img is None:
                        raise DomainError(f"base cone lacks generator {src_s}")
                    mapped = _map_chain(img, base, new, m)
                    table[s] = _scaled(mapped, src_sign, m)
                    continue
                if len(hits) > 1:
                    raise DomainError("simplex meets W twice; W is not independent")
                pos = hits[0]
                w = w_indices[s[pos]]
                rest = s[:pos] + s[pos + 1 :]
                lc = link_cones[w]
                if rest:
                    rest_rel, rest_sign = _map_simplex(new, lc.complex, rest)
                else:
                    rest_rel, rest_sign = (), 1
                a = lc.tables[ci].get(rest_rel)
                if a is None:
                    raise DomainError(f"link cone at {w!r} lacks generator {rest_rel}")
                a_on_base = _map_chain(a, lc.complex, base, m)
                part1 = _map_chain(
                    cone.evaluate_component(ci, a_on_base, m), base, new, m
                )
                # [w, a] inside the new complex
                part2 = {}
                w_new = new.index_of(w)
                for t, v in _map_chain(a, lc.complex, new, m).items():
                    canon, sgn = canonical_oriented((w_new,) + t)
                    if not new.has_face(canon):
                        raise DomainError("link cone leaves the star of its vertex")
                    _acc(part2, canon, sgn * v, m)
                value = _combine(part1, part2, s=-1, modulus=m)
                table[s] = _scaled(value, (-1) ** pos * rest_sign, m)
        tables.append(table)
    return ConeFunction(new, cone.apex, k, group, tuple(tables))


def extension_radius_bound(base_profile, link_profile, j):
    """Displayed bound for the vertex-set extension: R''_{j-1} (R'_j + 1)."""
    rb = base_profile.as_dict()
    rl = link_profile.as_dict()
    return rl[j - 1] * (rb[j] + 1)


def transport_coefficients(cone, group):
    """Z-cone -> cone over any finitely generated Abelian group.

    Componentwise reduction; generator supports never grow.
    """
    if cone.group != ZZ:
        raise DomainError("transport starts from a Z-cone")
    group = CoefficientGroup.parse(group)
    base = cone.tables[0]
    tables = tuple(
        {s: _reduce(ch, m) for s, ch in base.items()} for m in group.components
    )
    return ConeFunction(cone.complex, cone.apex, cone.k, group, tables)


def solve_cone_linear(X, k, apex_label, caps=None):
    """Integer cone synthesis degree by degree via Smith normal form.

    Solves boundary(Cone(1_s)) = 1_s - Cone(boundary 1_s) for each canonical
    generator; raises NoConeError (with the obstructed degree) when some
    staged system has no integer solution.
    """
    total_faces = sum(len(X.faces_of_dim(j)) for j in range(-1, X.n + 1))
    if caps is not None:
        caps.check("solver_faces", total_faces, "cone solver face count")
    apex = X.index_of(apex_label)
    table = {(): {(apex,): 1}}
    for j in range(0, min(k, X.n) + 1):
        cols = sorted(X.faces_of_dim(j + 1))
        col_pos = {s: i for i, s in enumerate(cols)}
        rows = sorted(X.faces_of_dim(j))
        row_pos = {s: i for i, s in enumerate(rows)}
        if cols:
            M, _, _ = boundary_matrix(X, j + 1)
            snf = smith_normal_form(M)
        for s in rows:
            b_chain = {s: 1}
            for i in range(len(s)):
                face = s[:i] + s[i + 1 :]
                for t, v in table[face].items():
                    _acc(b_chain, t, -((-1) ** i) * v, None)
            if not cols:
                if b_chain:
                    raise NoConeError(
                        f"no ({k},Z)-cone: top-degree equation unsolvable at {s}",
                        degree=j,
                        simplex=s,
                    )
                table[s] = {}
                continue
            b = [0] * len(rows)
            for t, v in b_chain.items():
                b[row_pos[t]] = v
            x = solve_integer(M, b, snf)
            if x is None:
                raise NoConeError(
                    f"no ({k},Z)-cone with apex {apex_label!r}: "
                    f"degree-{j} system unsolvable at {s}",
                    degree=j,
                    simplex=s,
                )
            table[s] = {cols[i]: x[i] for i in range(len(cols)) if x[i]}
    return ConeFunction.from_integer_table(X, apex_label, k, table, ZZ)


# ---------------------------------------------------------------------------
# filtration engine
# ---------------------------------------------------------------------------

@dataclass
class FiltrationStage:
    """One vertex-set extension step.

    provider(w, relative_link, need_k) must return a verified cone of degree
    at least need_k on the relative link (labels must match).
    """

    vertices: tuple
    provider: object
    phase: str = "main"  # "base" stages assemble kappa_0, "main" follow the recursion
    bound: int = None
    note: str = ""


@dataclass
class FiltrationPlan:
    target: Complex
    base_vertices: tuple
    base_provider: object  # callable(base_complex) -> ConeFunction
    stages: list
    f_n: int
    ell_n: int
    class_R: dict = None  # degree -> R(n) table from recursion_constants
    description: str = ""
    group: CoefficientGroup = field(default_factory=lambda: ZZ)
    metadata: dict = field(default_factory=dict)  # provider notes, fallbacks


def recursion_constants(n, f, ell):
    """The recursion R(0)=1, S(m)=max_{a+b+1=m}((a+1)R(a)+1)R(b),
       R(m)=S(m)^ell(m) f(m) + sum_{j=1..ell(m)} S(m)^j."""
    R = {0: 1}
    S = {}
    for m in range(1, n + 1):
        S[m] = max(
            ((a + 1) * R[a] + 1) * R[m - 1 - a] for a in range(0, m)
        )
        R[m] = S[m] ** ell(m) * f(m) + sum(S[m] ** j for j in range(1, ell(m) + 1))
    return R, S


def stage_bound_sequence(n, f_n, S_n, count):
    """R^(i)(n) = S(n) (R^(i-1)(n) + 1) with R^(0)(n) = f(n)."""
    out = [f_n]
    for _ in range(count):
        out.append(S_n * (out[-1] + 1))
    return out


def relative_link(X, subcomplex, w_label):
    """lk_X(w) intersected with a full subcomplex, as a complex."""
    lk = X.link([w_label])
    keep = set(subcomplex.labels)
    return lk.full_subcomplex([lab for lab in lk.labels if lab in keep])


def run_filtration(plan, caps=None):
    """Drive the staged extension; returns (cone, ledger).

    The ledger records per-stage measured radii against the per-stage bound
    and the class recursion for the main phase; nothing is asserted here,
    callers decide what a violation means.
    """
    target = plan.target
    k = target.n - 1
    current = target.full_subcomplex(plan.base_vertices)
    cone = plan.base_provider(current)
    if cone.k != k:
        raise DomainError(f"base cone degree {cone.k} != {k} required by the target")
    verdict = cone.verify()
    if not verdict.ok:
        raise DomainError(f"base cone fails verification: {verdict.failures[:1]}")
    profile = cone.radius_profile()
    ledger = {
        "description": plan.description,
        "metadata": plan.metadata,
        "f_n": plan.f_n,
        "ell_n": plan.ell_n,
        "base": {
            "vertices": len(plan.base_vertices),
            "radii": profile.as_dict(),
            "bound": plan.f_n,
            "within_bound": profile.max_radius() <= plan.f_n,
        },
        "stages": [],
        "class_R": plan.class_R,
    }
    main_count = sum(1 for st in plan.stages if st.phase == "main")
    main_seq = None
    if plan.class_R is not None and target.n in plan.class_R:
        # recompute the per-stage series from S(n)
        R = plan.class_R
        S_n = max(
            ((a + 1) * R[a] + 1) * R[target.n - 1 - a] for a in range(0, target.n)
        ) if target.n >= 1 else None
        if S_n is not None:
            main_seq = stage_bound_sequence(target.n, plan.f_n, S_n, main_count)
    main_i = 0
    for si, stage in enumerate(plan.stages):
        W = tuple(w for w in stage.vertices if w not in set(current.labels))
        if not W:
            ledger["stages"].append(
                {"index": si, "phase": stage.phase, "note": stage.note, "added": 0}
            )
            continue
        link_cones = {}
        for w in W:
            rel = relative_link(target, current, w)
            if rel.num_vertices == 0:
                raise DomainError(
                    f"stage {si} ({stage.note}): relative link of {w!r} is "
                    "empty; the extension hypotheses fail here"
                )
            need = min(k - 1, rel.n)
            try:
                link_cones[w] = stage.provider(w, rel, need)
            except NoConeError as e:
                raise NoConeError(
                    f"stage {si} ({stage.note}): no cone for the relative "
                    f"link of {w!r}: {e}",
                    degree=e.degree,
                    simplex=e.simplex,
                ) from e
        cone = extend_by_vertex_set(target, current, cone, W, link_cones)
        current = cone.complex
        profile = cone.radius_profile()
        entry = {
            "index": si,
            "phase": stage.phase,
            "note": stage.note,
            "added": len(W),
            "radii": profile.as_dict(),
            "max_radius": profile.max_radius(),
        }
        if stage.bound is not None:
            entry["bound"] = stage.bound
            entry["within_bound"] = profile.max_radius() <= stage.bound
        if stage.phase == "main":
            main_i += 1
            if main_seq is not None:
                entry["recursion_bound"] = main_seq[main_i]
                entry["within_recursion_bound"] = profile.max_radius() <= main_seq[main_i]
        ledger["stages"].append(entry)
    verdict = cone.verify()
    profile = cone.radius_profile()
    ledger["final"] = {
        "verified": verdict.ok,
        "radii": profile.as_dict(),
        "max_radius": profile.max_radius(),
        "complete": set(cone.complex.labels) == set(target.labels),
    }
    if plan.class_R is not None and target.n in plan.class_R:
        ledger["final"]["R_n"] = plan.class_R[target.n]
        ledger["final"]["within_R_n"] = profile.max_radius() <= plan.class_R[target.n]
    if not verdict.ok:
        raise DomainError(f"filtration produced an invalid cone: {verdict.failures[:1]}")
    return cone, ledger


# ---------------------------------------------------------------------------
# edge-subdivision transport
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SubdivisionPairing:
    """Each subdividing vertex U with its two endpoints and the chosen one."""

    entries: tuple  # ((U, W1, W2, chosen), ...)

    def chosen_map(self):
        return {u: c for u, _, _, c in self.entries}

    def pair_map(self):
        return {frozenset((w1, w2)): u for u, w1, w2, _ in self.entries}

    def subdividers(self):
        return {u for u, _, _, _ in self.entries}


def check_subdivision(T, T_tilde, pairing):
    """Structural checks that T is the edge subdivision of T_tilde."""
    subs = pairing.subdividers()
    tset = set(T.labels)
    ttset = set(T_tilde.labels)
    if not subs <= tset or (subs & ttset):
        raise DomainError("subdividing vertices must be in T and not in T-tilde")
    if tset - subs != ttset:
        raise DomainError("T-tilde vertices must be the non-subdividing T vertices")
    for u, w1, w2, chosen in pairing.entries:
        if chosen not in (w1, w2):
            raise DomainError(f"chosen endpoint for {u!r} is not one of its pair")
        for w in (w1, w2):
            if not T.has_face_labels((u, w)):
                raise DomainError(f"{u!r} is not adjacent to its endpoint {w!r} in T")
        if not T_tilde.has_face_labels((w1, w2)):
            raise DomainError(f"pair of {u!r} is not an edge of T-tilde")
        if T.has_face_labels((w1, w2)):
            raise DomainError(f"pair of {u!r} is already an edge of T")
    for (a, b) in T.faces_of_dim(1):
        la, lb = T.labels[a], T.labels[b]
        if la in subs and lb in subs:
            raise DomainError("two subdividing vertices are adjacent in T")


def _subdivision_dict_maps(T, T_tilde, pairing):
    """Dict-level chain maps (f, g) between the subdivision and its target."""
    chosen = pairing.chosen_map()
    pair_of = pairing.pair_map()
    subs = pairing.subdividers()

    def g_chain(d, m):
        """g: C_j(T) -> C_j(T_tilde) on integer chain dicts."""
        out = {}
        for s, v in d.items():
            labels = T.labels_of(s)
            hits = [i for i, lab in enumerate(labels) if lab in subs]
            if len(hits) > 1:
                raise DomainError("T-simplex through two subdividing vertices")
            if not hits:
                idx = tuple(T_tilde.index_of(lab) for lab in labels)
                canon, sign = canonical_oriented(idx)
                if not T_tilde.has_face(canon):
                    raise DomainError("T-simplex absent from T-tilde")
                _acc(out, canon, sign * v, m)
                continue
            pos = hits[0]
            u = labels[pos]
            w_u = chosen[u]
            if w_u in labels:
                continue  # killed
            new_labels = labels[:pos] + (w_u,) + labels[pos + 1 :]
            idx = tuple(T_tilde.index_of(lab) for lab in new_labels)
            canon, sign = canonical_oriented(idx)
            if not T_tilde.has_face(canon):
                raise DomainError("renamed simplex absent from T-tilde")
            _acc(out, canon, sign * v, m)
        return out

    def f_chain(d, m):
        """f: C_j(T_tilde) -> C_j(T) on integer chain dicts."""
        out = {}
        for s, v in d.items():
            labels = T_tilde.labels_of(s)
            pair_positions = None
            for i in range(len(labels)):
                for j in range(i + 1, len(labels)):
                    if frozenset((labels[i], labels[j])) in pair_of:
                        if pair_positions is not None:
                            raise DomainError("simplex contains two subdivided pairs")
                        pair_positions = (i, j)
            if pair_positions is None:
                idx = tuple(T.index_of(lab) for lab in labels)
                canon, sign = canonical_oriented(idx)
                if not T.has_face(canon):
                    raise DomainError("T-tilde simplex absent from T")
                _acc(out, canon, sign * v, m)
                continue
            i, j = pair_positions
            u = pair_of[frozenset((labels[i], labels[j]))]
            for pos in (i, j):
                new_labels = labels[:pos] + (u,) + labels[pos + 1 :]
                idx = tuple(T.index_of(lab) for lab in new_labels)
                canon, sign = canonical_oriented(idx)
                if not T.has_face(canon):
                    raise DomainError("subdivided replacement absent from T")
                _acc(out, canon, sign * v, m)
        return out

    return f_chain, g_chain


def subdivision_maps(T, T_tilde, pairing):
    """(f, g) as maps of Chain values: f into the subdivision, g out of it.

    f commutes with the boundary, g o f is the identity; f at most doubles
    supports.  Exposed for testing against the transport construction.
    """
    check_subdivision(T, T_tilde, pairing)
    f_chain, g_chain = _subdivision_dict_maps(T, T_tilde, pairing)

    def f(chain):
        g = chain.group
        comps = [
            f_chain({s: g.split(c)[ci] for s, c in chain.entries.items()}, m)
            for ci, m in enumerate(g.components)
        ]
        return _zip_components(T, chain.degree, g, comps)

    def g_map(chain):
        grp = chain.group
        comps = [
            g_chain({s: grp.split(c)[ci] for s, c in chain.entries.items()}, m)
            for ci, m in enumerate(grp.components)
        ]
        return _zip_components(T_tilde, chain.degree, grp, comps)

    return f, g_map


def _zip_components(X, degree, group, comps):
    out = {}
    for s in set().union(*comps) if comps else ():
        val = group.reduce(group.join(c.get(s, 0) for c in comps))
        if not group.is_zero(val):
            out[s] = val
    return Chain(X, degree, group, out)


def subdivision_transport(cone, T, T_tilde, pairing):
    """Move a cone from the subdivision T to T_tilde (g o Cone o f).

    f doubles simplices that contain a subdivided pair, g renames or kills
    simplices through subdividing vertices; radii at most double.
    """
    if cone.complex != T:
        raise DomainError("cone does not live on the subdivision complex")
    check_subdivision(T, T_tilde, pairing)
    f_chain, g_chain = _subdivision_dict_maps(T, T_tilde, pairing)
    chosen = pairing.chosen_map()
    subs = pairing.subdividers()

    k = cone.k
    tables = []
    for ci, m in enumerate(cone.group.components):
        src = cone.tables[ci]
        table = {(): g_chain(src[()], m)}
        for j in range(0, min(k, T_tilde.n) + 1):
            for s in T_tilde.faces_of_dim(j):
                fd = f_chain({s: 1}, m)
                acc = {}
                for t, v in fd.items():
                    img = src.get(t)
                    if img is None:
                        raise DomainError(f"source cone lacks generator {t}")
                    for tt, vv in img.items():
                        _acc(acc, tt, v * vv, m)
                table[s] = g_chain(acc, m)
        tables.append(table)
    apex = cone.apex
    if apex in subs:
        apex = chosen[apex]
    return ConeFunction(T_tilde, apex, k, cone.group, tuple(tables))
