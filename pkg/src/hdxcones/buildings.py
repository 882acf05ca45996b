"""Geometric buildings, opposition complexes and their filtration plans.

Everything here is flag complexes of subspace geometries over GF(q):
type A (all proper subspaces, incidence by containment), type C (totally
isotropic subspaces of a form) and type D (the oriflamme trick on a
2n-dimensional space of Witt index n).  Opposition complexes keep only the
vertices transversal to a fixed set of subspaces.

Filtration plans translate the staged vertex-adding constructions into
FiltrationPlan values for the cone engine; every geometric identification
of a relative link is verified against the directly computed link and
falls back to the integer cone solver when it does not match.
"""

from dataclasses import dataclass

from .caps import default_caps
from .cones import (
    FiltrationPlan,
    FiltrationStage,
    join_cone,
    run_filtration,
    solve_cone_linear,
    star_cone,
    recursion_constants,
    trivial_cone,
)
from .errors import ClassViolationError, DomainError, ResourceCapError
from .fqlinalg import (
    Subspace,
    enumerate_subspaces,
    is_transversal,
    tilde_transversal,
    vec_add,
    vec_scale,
)
from .simplicial import Complex

from math import comb


# ---------------------------------------------------------------------------
# flag complexes of subspace families
# ---------------------------------------------------------------------------

def _chain_complex_from_subspaces(vertices):
    """Flag complex of a containment-incident family of subspaces."""
    vs = sorted(vertices, key=lambda s: s.sort_key())
    faces = [[]]
    above = {
        v: [w for w in vs if w.dim > v.dim and w.contains(v)] for v in vs
    }
    stack = [(v, [v]) for v in vs]
    while stack:
        v, chain = stack.pop()
        faces.append(chain)
        for w in above[v]:
            stack.append((w, chain + [w]))
    return Complex.from_faces(faces, vertices=vs)


def standard_flag(F, m, dims=None):
    """The flag of coordinate subspaces span(e_1..e_d), d in dims."""
    if dims is None:
        dims = range(1, m)
    out = []
    for d in dims:
        rows = tuple(
            tuple(1 if i == j else 0 for i in range(m)) for j in range(d)
        )
        out.append(Subspace(F, m, rows))
    return out


def an_building(F, m, caps=None):
    """Flag complex of all proper nonzero subspaces of F^m."""
    return opposition_an(F, m, (), caps=caps)


def x_e_vertices_an(F, m, E, caps=None):
    if caps is None:
        caps = default_caps()
    out = []
    for d in range(1, m):
        for U in enumerate_subspaces(F, m, d, caps):
            if all(is_transversal(U, W) for W in E):
                out.append(U)
    return out


def opposition_an(F, m, E, caps=None):
    """T_E(V): flag complex of the subspaces transversal to every member of E."""
    if m < 2:
        raise DomainError("ambient dimension must be at least 2")
    verts = x_e_vertices_an(F, m, E, caps)
    if not verts:
        raise ClassViolationError("opposition complex has no vertices")
    return _chain_complex_from_subspaces(verts)


def ca_class_margin(F, m, E):
    """(sum, |K|) for the type-A class inequality sum C(n,j-1) e_j <= |K|."""
    n = m - 2
    e = {}
    for W in E:
        e[W.dim] = e.get(W.dim, 0) + 1
    total = sum(comb(n, j - 1) * e.get(j, 0) for j in range(1, n + 2))
    return total, F.q


# ---------------------------------------------------------------------------
# subspace coordinate changes (restriction to U, quotient by U)
# ---------------------------------------------------------------------------

def _restriction_maps(F, U):
    """Bijection between subspaces of U and subspaces of F^dim(U)."""
    pivots = tuple(next(i for i, x in enumerate(row) if x) for row in U.rows)

    def down(S):  # S <= U  ->  coordinates w.r.t. U's RREF basis
        return Subspace.span(
            F, U.dim, [tuple(r[p] for p in pivots) for r in S.rows]
        )

    def up(S):  # coordinate subspace -> subspace of the ambient space
        vecs = []
        for r in S.rows:
            v = (0,) * U.ambient
            for c, row in zip(r, U.rows):
                v = vec_add(F, v, vec_scale(F, c, row))
            vecs.append(v)
        return Subspace.span(F, U.ambient, vecs)

    return down, up


def _quotient_maps(F, U):
    """Bijection between subspaces containing U and subspaces of F^(m-dim U)."""
    m = U.ambient
    qdim = m - U.dim
    project = U.quotient_map()
    free = U.quotient_basis()

    def down(S):  # U <= S -> S/U
        return Subspace.span(F, qdim, [project(r) for r in S.rows])

    def up(S):  # S' -> preimage in F^m
        vecs = list(U.rows)
        for r in S.rows:
            v = [0] * m
            for c, val in zip(free, r):
                v[c] = val
            vecs.append(tuple(v))
        return Subspace.span(F, m, vecs)

    return down, up


# ---------------------------------------------------------------------------
# type A filtration plans and cones
# ---------------------------------------------------------------------------

def _solver_link_cone(rel, need, notes, context, caps):
    apex = min(rel.labels, key=_label_key)
    cone = solve_cone_linear(rel, need, apex, caps=caps)
    notes.append({"fallback": "solver", "context": context})
    return cone


def _label_key(label):
    if isinstance(label, Subspace):
        return label.sort_key()
    return (repr(type(label)), repr(label))


def _apex_star_link_cone(rel, apex_label, need, notes, context, caps):
    """Apex-star cone on a relative link, solver fallback if not a star."""
    try:
        return star_cone(rel, apex_label, max(need, 0))
    except DomainError:
        return _solver_link_cone(rel, need, notes, context + " (star check failed)", caps)


def an_cone(F, m, E, caps=None, notes=None, _cache=None):
    """Full cone on T_E(V): the staged filtration, recursively on links.

    Returns (complex, cone, ledger); ledger is None for the 0-dimensional
    base case.  The cone has degree dim-1.
    """
    if caps is None:
        caps = default_caps()
    if notes is None:
        notes = []
    if _cache is None:
        _cache = {}
    key = (F.p, F.s, F.poly, m, tuple(sorted(W.rows for W in E)))
    if key in _cache:
        return _cache[key]
    E = tuple(sorted(E, key=lambda s: s.sort_key()))
    if m == 2:
        kappa = opposition_an(F, m, E, caps)
        result = (kappa, trivial_cone(kappa, min(kappa.labels, key=_label_key)), None)
        _cache[key] = result
        return result
    plan = an_filtration_plan(F, m, E, caps=caps, notes=notes, _cache=_cache)
    cone, ledger = run_filtration(plan)
    if not ledger["final"]["complete"]:
        raise DomainError("type-A filtration did not exhaust the complex")
    result = (plan.target, cone, ledger)
    _cache[key] = result
    return result


def an_filtration_plan(F, m, E, caps=None, notes=None, _cache=None):
    """Plan for T_E(V), dim V = m: inner ball filtration around a transversal
    line, then vertex sets of descending dimension with join-of-opposition
    relative links."""
    if caps is None:
        caps = default_caps()
    if notes is None:
        notes = []
    if _cache is None:
        _cache = {}
    n = m - 2
    if n < 1:
        raise DomainError("filtration plan needs dim V >= 3")
    E = tuple(sorted(E, key=lambda s: s.sort_key()))
    total, q = ca_class_margin(F, m, E)
    class_ok = total <= q
    kappa = opposition_an(F, m, E, caps)
    verts = list(kappa.labels)
    lines = [U for U in verts if U.dim == 1]
    if not lines:
        raise ClassViolationError(
            f"no transversal line exists (class margin {total} vs |K|={q})"
        )
    ell = min(lines, key=lambda s: s.sort_key())

    def in_x_e(S):
        return 0 < S.dim < m and all(is_transversal(S, W) for W in E)

    y0 = [U for U in verts if in_x_e(U.add(ell))]
    y0_set = set(y0)
    z0 = [U for U in verts if U.contains(ell)]

    k = n - 1  # cone degree on kappa

    def base_provider(base):
        inner_stages = []
        for d in range(1, m):
            W_d = tuple(
                U for U in y0 if U.dim == d and not U.contains(ell)
            )
            if not W_d:
                continue

            def provider(w, rel, need, _d=d):
                apex = w.add(ell)
                if apex not in set(rel.labels):
                    return _solver_link_cone(
                        rel, need, notes, f"A inner stage dim {_d}: U+l missing", caps
                    )
                return _apex_star_link_cone(
                    rel, apex, need, notes, f"A inner stage dim {_d}", caps
                )

            inner_stages.append(
                FiltrationStage(
                    vertices=W_d,
                    provider=provider,
                    phase="base",
                    bound=d + 1,
                    note=f"ball filtration, dimension {d}",
                )
            )
        inner_plan = FiltrationPlan(
            target=base,
            base_vertices=tuple(z0),
            base_provider=lambda b: star_cone(b, ell, k),
            stages=inner_stages,
            f_n=1,
            ell_n=len(inner_stages),
            description="type-A ball filtration around the transversal line",
        )
        cone, inner_ledger = run_filtration(inner_plan)
        notes.append({"inner_ledger_max": inner_ledger["final"]["max_radius"]})
        return cone

    stages = []
    for i in range(1, n + 2):
        d = m - i  # n + 2 - i
        W_i = tuple(U for U in verts if U.dim == d and U not in y0_set)
        stages.append(
            FiltrationStage(
                vertices=W_i,
                provider=_an_outer_provider(F, m, E, ell, caps, notes, _cache),
                phase="main",
                note=f"outer stage {i}: dimension {d}",
            )
        )
    R, _ = recursion_constants(max(n, 1), lambda a: a + 2, lambda a: a + 1)
    plan = FiltrationPlan(
        target=kappa,
        base_vertices=tuple(sorted(y0_set, key=lambda s: s.sort_key())),
        base_provider=base_provider,
        stages=stages,
        f_n=n + 2,
        ell_n=n + 1,
        class_R=R,
        description=f"type-A opposition filtration, dim V={m}, |E|={len(E)}, q={F.q}",
        metadata={"class_ok": class_ok, "class_margin": (total, q), "notes": notes},
    )
    return plan


def _an_outer_provider(F, m, E, ell, caps, notes, cache):
    def provider(w, rel, need):
        U = w
        lower = [lab for lab in rel.labels if U.contains(lab)]
        upper = [lab for lab in rel.labels if lab.contains(U)]
        if set(lower) | set(upper) != set(rel.labels) or set(lower) & set(upper):
            return _solver_link_cone(
                rel, need, notes, "A outer: link not split by comparability", caps
            )
        try:
            return _an_join_link_cone(
                F, m, E, ell, U, rel, lower, upper, need, caps, notes, cache
            )
        except (DomainError, ClassViolationError, ResourceCapError) as e:
            return _solver_link_cone(
                rel, need, notes, f"A outer: geometric identification failed ({e})", caps
            )

    return provider


def _an_join_link_cone(F, m, E, ell, U, rel, lower, upper, need, caps, notes, cache):
    """Relative link = T_{E'}(U) * T_{Ebar}(V/U); build factor cones
    recursively and join.  Raises DomainError when the identification fails."""
    parts = []  # (cone on factor complex, label map into rel labels)
    if lower:
        down, up = _restriction_maps(F, U)
        e_prime = set()
        for W in E:
            for cand in (W.intersect(U), (W.add(ell)).intersect(U)):
                if 0 < cand.dim < U.dim:
                    e_prime.add(down(cand))
        expected = set(x_e_vertices_an(F, U.dim, tuple(e_prime), caps))
        actual = {down(S) for S in lower}
        if expected != actual:
            raise DomainError("lower factor is not the predicted opposition complex")
        _, cone_low, _ = an_cone(F, U.dim, tuple(sorted(e_prime, key=lambda s: s.sort_key())), caps, notes, cache)
        parts.append((cone_low, up))
    if upper:
        down, up = _quotient_maps(F, U)
        e_bar = set()
        for W in E:
            cand = down(W.add(U))
            if 0 < cand.dim < m - U.dim:
                e_bar.add(cand)
        expected = set(x_e_vertices_an(F, m - U.dim, tuple(e_bar), caps))
        actual = {down(S) for S in upper}
        if expected != actual:
            raise DomainError("upper factor is not the predicted opposition complex")
        _, cone_up, _ = an_cone(F, m - U.dim, tuple(sorted(e_bar, key=lambda s: s.sort_key())), caps, notes, cache)
        parts.append((cone_up, up))
    if not parts:
        raise DomainError("empty relative link factors")
    if len(parts) == 1:
        cone, up = parts[0]
        if cone.k < need:
            raise DomainError("single factor cone does not reach the needed degree")
        return cone.map_via(rel, up)
    (c1, up1), (c2, up2) = parts
    joined = join_cone(c1, c2)

    def unjoin(lab):
        tag, sub = lab
        return up1(sub) if tag == 0 else up2(sub)

    if joined.k < need:
        raise DomainError("joined cone does not reach the needed degree")
    return joined.map_via(rel, unjoin)


# ---------------------------------------------------------------------------
# type C: isotropic-subspace buildings and oppositions
# ---------------------------------------------------------------------------

def isotropic_vertices(form, caps=None):
    """All nonzero proper totally isotropic subspaces, by dimension."""
    witt = form.witt_index(caps)
    out = []
    for d in range(1, witt + 1):
        out.extend(form.isotropic_subspaces(d, caps))
    return out, witt


def cn_building(F, form, caps=None):
    """Flag complex of the totally isotropic subspaces of (V, Q, f)."""
    if not form.is_nondegenerate():
        raise DomainError("form must be nondegenerate")
    verts, witt = isotropic_vertices(form, caps)
    if witt == 0:
        raise DomainError("anisotropic form: the building is empty")
    return _chain_complex_from_subspaces(verts)


def check_perp_closed(form, E):
    have = {W.rows for W in E}
    for W in E:
        if form.perp(W).rows not in have:
            raise DomainError("E must satisfy E-perp = E")


def opposition_cn(F, form, E, caps=None):
    """T_E(V) in the isotropic geometry: vertices transversal to every E."""
    if not form.is_nondegenerate():
        raise DomainError("form must be nondegenerate")
    check_perp_closed(form, E)
    verts, witt = isotropic_vertices(form, caps)
    keep = [U for U in verts if all(is_transversal(U, W) for W in E)]
    if not keep:
        raise ClassViolationError("opposition complex has no vertices")
    return _chain_complex_from_subspaces(keep)


def n_of_E(form, E):
    """The class threshold N(E); None when the case is outside the table
    (even ambient dimension with a genuine quadratic form)."""
    m = form.ambient
    witt = form.witt_index()
    e = {}
    for W in E:
        e[W.dim] = e.get(W.dim, 0) + 1

    def e_hs(h, s):
        return sum(comb(2 * s, j) * e.get(h + j, 0) for j in range(0, 2 * s + 1))

    if m == 2 * witt + 1:
        return 2 * e_hs(2, witt - 1)
    if m == 2 * witt + 2:
        return max(e_hs(2, witt - 1) + e_hs(3, witt - 1) + 1, 2 * e_hs(3, witt - 1))
    return None


def cn_cone(F, form, E, caps=None, notes=None):
    """Full cone on the type-C opposition complex (staged filtration)."""
    if caps is None:
        caps = default_caps()
    if notes is None:
        notes = []
    kappa = opposition_cn(F, form, E, caps)
    if kappa.n == 0:
        return kappa, trivial_cone(kappa, min(kappa.labels, key=_label_key)), None
    plan = cn_filtration_plan(F, form, E, caps=caps, notes=notes)
    cone, ledger = run_filtration(plan)
    if not ledger["final"]["complete"]:
        raise DomainError("type-C filtration did not exhaust the complex")
    return plan.target, cone, ledger


def cn_filtration_plan(F, form, E, caps=None, notes=None):
    """Plan for the type-C opposition complex around a transversal line:
    a three-condition base, then ascending and descending outer stages."""
    if caps is None:
        caps = default_caps()
    if notes is None:
        notes = []
    E = tuple(sorted(E, key=lambda s: s.sort_key()))
    kappa = opposition_cn(F, form, E, caps)
    verts = list(kappa.labels)
    witt = form.witt_index(caps)
    dim_kappa = kappa.n
    k = dim_kappa - 1
    lines = [U for U in verts if U.dim == 1]
    if not lines:
        raise ClassViolationError("no transversal isotropic line exists")
    ell = min(lines, key=lambda s: s.sort_key())
    ellp = form.perp(ell)

    def trans(U, family):
        return all(is_transversal(U, W) for W in family)

    E_plus = tuple(W.add(ell) for W in E)
    E_cap = tuple(W.intersect(ellp) for W in E)
    E_capplus = tuple(W.intersect(ellp).add(ell) for W in E)

    def cond1(U):
        return U.contains(ell)

    def cond2(U):
        return (not U.contains(ell)) and ellp.contains(U) and trans(U, E_plus)

    def cond3(U):
        return (
            (not ellp.contains(U))
            and U.dim > 1
            and trans(U, E_plus)
            and trans(U, E_cap)
            and trans(U, E_capplus)
        )

    x0 = [U for U in verts if cond1(U) or cond2(U) or cond3(U)]
    x0_set = set(x0)
    z_set = {U for U in verts if U.contains(ell) or trans(U, E_plus)}

    def base_provider(base):
        stages = []
        bound = 1
        for d in range(1, witt + 1):
            W_d = tuple(U for U in x0 if U.dim == d and cond2(U))
            if not W_d:
                continue
            bound = d + 1

            def provider(w, rel, need, _d=d):
                apex = w.add(ell)
                if apex not in set(rel.labels):
                    return _solver_link_cone(
                        rel, need, notes, f"C ball stage dim {_d}: U+l missing", caps
                    )
                return _apex_star_link_cone(
                    rel, apex, need, notes, f"C ball stage dim {_d}", caps
                )

            stages.append(
                FiltrationStage(
                    vertices=W_d,
                    provider=provider,
                    phase="base",
                    bound=d + 1,
                    note=f"ascending ball stage, dimension {d}",
                )
            )
        desc_i = 0
        for d in range(witt, 1, -1):
            W_d = tuple(U for U in x0 if U.dim == d and cond3(U))
            if not W_d:
                continue
            desc_i += 1

            def provider(w, rel, need, _d=d):
                apex = w.intersect(ellp)
                if apex not in set(rel.labels):
                    return _solver_link_cone(
                        rel, need, notes, f"C desc stage dim {_d}: U^l-perp missing", caps
                    )
                return _apex_star_link_cone(
                    rel, apex, need, notes, f"C desc stage dim {_d}", caps
                )

            stages.append(
                FiltrationStage(
                    vertices=W_d,
                    provider=provider,
                    phase="base",
                    bound=witt + 1 + desc_i,
                    note=f"descending ball stage, dimension {d}",
                )
            )
        inner_plan = FiltrationPlan(
            target=base,
            base_vertices=tuple(U for U in x0 if cond1(U)),
            base_provider=lambda b: star_cone(b, ell, k),
            stages=stages,
            f_n=1,
            ell_n=len(stages),
            description="type-C base filtration",
        )
        cone, inner_ledger = run_filtration(inner_plan)
        notes.append({"inner_ledger_max": inner_ledger["final"]["max_radius"]})
        return cone

    provider = _generic_link_provider(caps, notes, "C outer")
    stages = []
    for d in range(1, witt + 1):
        W_d = tuple(
            U for U in verts if U.dim == d and U in z_set and U not in x0_set
        )
        stages.append(
            FiltrationStage(
                vertices=W_d,
                provider=provider,
                phase="main",
                note=f"outer ascending stage, dimension {d}",
            )
        )
    for d in range(witt, 0, -1):
        W_d = tuple(U for U in verts if U.dim == d and U not in z_set)
        stages.append(
            FiltrationStage(
                vertices=W_d,
                provider=provider,
                phase="main",
                note=f"outer descending stage, dimension {d}",
            )
        )
    R, _ = recursion_constants(
        max(dim_kappa, 1), lambda a: 2 * a + 3, lambda a: 2 * a + 2
    )
    N = n_of_E(form, E)
    return FiltrationPlan(
        target=kappa,
        base_vertices=tuple(sorted(x0_set, key=lambda s: s.sort_key())),
        base_provider=base_provider,
        stages=stages,
        f_n=2 * dim_kappa + 3,
        ell_n=2 * dim_kappa + 2,
        class_R=R,
        description=(
            f"type-C opposition filtration, ambient {form.ambient}, "
            f"Witt {witt}, |E|={len(E)}, q={F.q}"
        ),
        metadata={
            "N_E": N,
            "class_ok": (N is not None and F.q >= N) if N is not None else None,
            "notes": notes,
        },
    )


def _generic_link_provider(caps, notes, context):
    """Classify-or-solve: trivial links, apex stars, comparability joins,
    then the integer solver."""

    def handle_part(part, need):
        if part.n == 0:
            if need <= -1 or part.num_vertices == 1:
                return trivial_cone(part, min(part.labels, key=_label_key))
        star = _find_star_vertex(part)
        if star is not None:
            return star_cone(part, star, max(need, 0))
        apex = min(part.labels, key=_label_key)
        notes.append({"fallback": "solver", "context": f"{context} part"})
        return solve_cone_linear(part, max(need, part.n - 1), apex, caps=caps)

    def provider(w, rel, need):
        if need <= -1:
            return trivial_cone(rel, min(rel.labels, key=_label_key))
        star = _find_star_vertex(rel)
        if star is not None:
            return star_cone(rel, star, need)
        lower = [lab for lab in rel.labels if isinstance(lab, Subspace) and w.contains(lab)]
        upper = [lab for lab in rel.labels if isinstance(lab, Subspace) and lab.contains(w)]
        if (
            lower
            and upper
            and not (set(lower) & set(upper))
            and set(lower) | set(upper) == set(rel.labels)
        ):
            low_c = rel.full_subcomplex(lower)
            up_c = rel.full_subcomplex(upper)
            c1 = handle_part(low_c, low_c.n - 1)
            c2 = handle_part(up_c, up_c.n - 1)
            joined = join_cone(c1, c2)
            if joined.k >= need:
                untag = {}
                for lab in low_c.labels:
                    untag[(0, lab)] = lab
                for lab in up_c.labels:
                    untag[(1, lab)] = lab
                return joined.map_via(rel, untag.__getitem__)
        apex = min(rel.labels, key=_label_key)
        notes.append({"fallback": "solver", "context": context})
        return solve_cone_linear(rel, need, apex, caps=caps)

    return provider


def _find_star_vertex(X):
    """A vertex adjacent to every other vertex, if one exists (lex-least)."""
    adj = X.adjacency()
    nverts = X.num_vertices
    candidates = [
        X.labels[v] for v, nbrs in adj.items() if len(nbrs) == nverts - 1
    ]
    if not candidates:
        return None
    return min(candidates, key=_label_key)


# ---------------------------------------------------------------------------
# type D: oriflamme complexes and subdivision pairings
# ---------------------------------------------------------------------------

def _oriflamme_complex(verts, witt):
    """Flag complex for the oriflamme incidence: containment, or two maximal
    isotropic subspaces meeting in codimension one."""
    vs = sorted(verts, key=lambda s: s.sort_key())
    lows = [v for v in vs if v.dim < witt]
    tops = [v for v in vs if v.dim == witt]
    faces = [[]]
    above = {
        v: [w for w in lows if w.dim > v.dim and w.contains(v)] for v in lows
    }
    chains = []
    stack = [(v, [v]) for v in lows]
    while stack:
        v, chain = stack.pop()
        chains.append(chain)
        for w in above[v]:
            stack.append((w, chain + [w]))
    chains.append([])
    for chain in chains:
        if chain:
            faces.append(list(chain))
        compatible = [W for W in tops if all(W.contains(u) for u in chain)]
        for i, W1 in enumerate(compatible):
            faces.append(list(chain) + [W1])
            for W2 in compatible[i + 1 :]:
                if W1.intersect(W2).dim == witt - 1:
                    faces.append(list(chain) + [W1, W2])
    return Complex.from_faces(faces, vertices=vs)


def dn_families(form, tops):
    """Partition of the maximal isotropic subspaces into the two classes
    (same class iff the intersection has even codimension)."""
    witt = tops[0].dim
    base = tops[0]
    fam = {0: [], 1: []}
    for W in tops:
        parity = (witt - W.intersect(base).dim) % 2
        fam[parity].append(W)
    for i in (0, 1):
        for a in fam[i]:
            for b in fam[i]:
                if (witt - a.intersect(b).dim) % 2 != 0:
                    raise DomainError("family split is inconsistent")
    return fam[0], fam[1]


def dn_oriflamme(F, form, caps=None):
    """(T, T-tilde, pairing) for dim V = 2n, Witt index n.

    T is the flag complex of all isotropic subspaces (the weak building),
    T-tilde drops dimension n-1 and uses the oriflamme incidence; the
    pairing lists each dropped vertex with its two maximal neighbours and
    the lexicographically least one as the chosen endpoint.
    """
    from .cones import SubdivisionPairing

    m = form.ambient
    witt = form.witt_index(caps)
    if m != 2 * witt or m < 4:
        raise DomainError(f"need dim V = 2n with Witt index n (got {m}, {witt})")
    verts, _ = isotropic_vertices(form, caps)
    return _dn_pair(verts, witt)


def _dn_pair(verts, witt):
    from .cones import SubdivisionPairing

    T = _chain_complex_from_subspaces(verts)
    sub_verts = [v for v in verts if v.dim == witt - 1]
    tilde_verts = [v for v in verts if v.dim != witt - 1]
    T_tilde = _oriflamme_complex(tilde_verts, witt)
    tops = [v for v in verts if v.dim == witt]
    entries = []
    for U in sorted(sub_verts, key=lambda s: s.sort_key()):
        its_tops = [W for W in tops if W.contains(U)]
        if len(its_tops) != 2:
            raise DomainError(
                f"a codimension-1 isotropic subspace lies in {len(its_tops)} != 2 "
                "maximal ones; not a type-D geometry"
            )
        W1, W2 = sorted(its_tops, key=lambda s: s.sort_key())
        entries.append((U, W1, W2, W1))
    return T, T_tilde, SubdivisionPairing(tuple(entries))


def opposition_dn(F, form, E, caps=None):
    """(T_E, T-tilde_E, pairing) using tilde-transversality on both sides."""
    m = form.ambient
    witt = form.witt_index(caps)
    if m != 2 * witt or m < 4:
        raise DomainError(f"need dim V = 2n with Witt index n (got {m}, {witt})")
    check_perp_closed(form, E)
    verts, _ = isotropic_vertices(form, caps)
    keep = [
        U for U in verts if all(tilde_transversal(U, W, form) for W in E)
    ]
    if not keep:
        raise ClassViolationError("opposition complex has no vertices")
    T_E, T_tilde_E, pairing = _dn_pair(keep, witt)
    return T_E, T_tilde_E, pairing


# ---------------------------------------------------------------------------
# colored isomorphism search
# ---------------------------------------------------------------------------

def complexes_isomorphic(X, Y, colors_x=None, colors_y=None, caps=None,
                         type_respecting=False):
    """Label bijection identifying X with Y, or None.

    Backtracking on the 1-skeleton guided by Weisfeiler-Leman color
    refinement, then a full face check.  With type_respecting, labels are
    assumed to be (type, ...) tuples and types must be preserved.
    """
    if caps is None:
        caps = default_caps()
    caps.check("iso_vertices", max(X.num_vertices, Y.num_vertices), "iso search")
    for k in set(X.dims()) | set(Y.dims()):
        if len(X.faces_of_dim(k)) != len(Y.faces_of_dim(k)):
            return None
    if type_respecting:
        colors_x = {lab: lab[0] for lab in X.labels}
        colors_y = {lab: lab[0] for lab in Y.labels}
    cx = {v: (colors_x or {}).get(X.labels[v], 0) for v in range(X.num_vertices)}
    cy = {v: (colors_y or {}).get(Y.labels[v], 0) for v in range(Y.num_vertices)}
    adj_x = X.adjacency()
    adj_y = Y.adjacency()

    for _ in range(max(X.num_vertices, 1)):
        sig = {}

        def refine(colors, adj):
            out = {}
            for v in colors:
                key = (colors[v], tuple(sorted(colors[u] for u in adj[v])))
                out[v] = sig.setdefault(key, len(sig))
            return out

        nx = refine(cx, adj_x)
        ny = refine(cy, adj_y)
        stable = len(set(nx.values())) == len(set(cx.values()))
        cx, cy = nx, ny
        if stable:
            break
    from collections import Counter

    if Counter(cx.values()) != Counter(cy.values()):
        return None
    by_color_y = {}
    for v, c in cy.items():
        by_color_y.setdefault(c, []).append(v)
    order = sorted(cx, key=lambda v: (len(by_color_y.get(cx[v], ())), -len(adj_x[v])))
    mapping = {}
    used = set()

    def backtrack(i):
        if i == len(order):
            return True
        v = order[i]
        for w in by_color_y.get(cx[v], ()):
            if w in used:
                continue
            ok = True
            for u in adj_x[v]:
                if u in mapping and mapping[u] not in adj_y[w]:
                    ok = False
                    break
            if ok:
                for u, wu in mapping.items():
                    if wu in adj_y[w] and u not in adj_x[v]:
                        ok = False
                        break
            if ok:
                mapping[v] = w
                used.add(w)
                if backtrack(i + 1):
                    return True
                del mapping[v]
                used.discard(w)
        return False

    if not backtrack(0):
        return None
    # full face check (counts already match, so image presence is enough)
    for k in X.dims():
        if k < 1:
            continue
        for f in X.faces_of_dim(k):
            image = tuple(sorted(mapping[v] for v in f))
            if not Y.has_face(image):
                return None
    return {X.labels[v]: Y.labels[w] for v, w in mapping.items()}
