"""Expansion evaluators: random-walk spectra, brute-force coboundary and
cosystolic constants, systoles, and the cone-radius lower bound.

The spectral stage builds the walk matrix with exact rational entries (row
sums are checked to be exactly 1) before any float enters; eigenvalues come
from a cyclic Jacobi sweep on the symmetrized matrix.  The brute-force
searches run through a compiled kernel when available and an identical
pure-Python twin otherwise.
"""

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import _bruteforce
from .caps import default_caps
from .chains import CoefficientGroup, Cochain, reduced_homology_ranks
from .errors import DomainError, ResourceCapError, UnsupportedError

try:
    from . import _kernel as _compiled
except ImportError:  # compiled kernel is optional
    _compiled = None

_DEFAULT_IMPL = _compiled if _compiled is not None else _bruteforce


def kernel_backend():
    """'compiled' when the Cython kernel loaded, else 'pure'."""
    return _DEFAULT_IMPL.BACKEND


def _impl(force_pure):
    return _bruteforce if force_pure else _DEFAULT_IMPL


# ---------------------------------------------------------------------------
# random-walk spectra
# ---------------------------------------------------------------------------

def walk_matrix(X):
    """Stochastic walk matrix from the weight function, exact rationals.

    Returns (rows, stationary) with rows[v][u] = w({u,v}) / pi_v; every row
    sums to exactly 1.
    """
    if not X.pure:
        raise UnsupportedError("walk matrix needs a pure complex")
    if X.n < 1:
        raise DomainError("walk matrix needs dimension >= 1")
    nv = X.num_vertices
    w = {}
    pi = [Fraction(0)] * nv
    for (a, b) in X.faces_of_dim(1):
        val = X.weight((a, b))
        w[(a, b)] = val
        pi[a] += val
        pi[b] += val
    rows = [[Fraction(0)] * nv for _ in range(nv)]
    for (a, b), val in w.items():
        rows[a][b] = val / pi[a]
        rows[b][a] = val / pi[b]
    for v in range(nv):
        if sum(rows[v], start=Fraction(0)) != 1:
            raise AssertionError("walk matrix row does not sum to 1")
    return rows, pi


def jacobi_eigenvalues(A, tol=1e-9, max_sweeps=100):
    """Eigenvalues of a symmetric matrix by cyclic Jacobi rotations."""
    n = len(A)
    a = [list(map(float, row)) for row in A]
    for _ in range(max_sweeps):
        off = max(
            (abs(a[p][q]) for p in range(n) for q in range(p + 1, n)),
            default=0.0,
        )
        if off < tol:
            break
        for p in range(n):
            for q in range(p + 1, n):
                if abs(a[p][q]) < tol / max(n, 1):
                    continue
                theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q])
                t = math.copysign(1.0, theta) / (
                    abs(theta) + math.sqrt(theta * theta + 1.0)
                )
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                for i in range(n):
                    aip, aiq = a[i][p], a[i][q]
                    a[i][p] = c * aip - s * aiq
                    a[i][q] = s * aip + c * aiq
                for i in range(n):
                    api, aqi = a[p][i], a[q][i]
                    a[p][i] = c * api - s * aqi
                    a[q][i] = s * api + c * aqi
    return sorted((a[i][i] for i in range(n)), reverse=True)


def second_eigenvalue(X, tol=1e-9, caps=None):
    """Second largest eigenvalue of the weighted walk on the 1-skeleton."""
    if caps is None:
        caps = default_caps()
    if not X.is_connected():
        raise DomainError("complex is disconnected")
    nv = X.num_vertices
    if nv <= 1:
        raise DomainError("walk needs at least two vertices")
    if nv > caps.spectral_dense:
        return _second_eigenvalue_sparse(X, caps)
    rows, pi = walk_matrix(X)
    # symmetrize: S[uv] = w(uv) / sqrt(pi_u pi_v); same spectrum as M
    sqrt_pi = [math.sqrt(float(p)) for p in pi]
    S = [
        [
            float(rows[v][u]) * sqrt_pi[v] / sqrt_pi[u] if sqrt_pi[u] else 0.0
            for u in range(nv)
        ]
        for v in range(nv)
    ]
    eigs = jacobi_eigenvalues(S, tol=tol)
    return eigs[1]


def _second_eigenvalue_sparse(X, caps):
    try:
        from scipy.sparse import coo_matrix
        from scipy.sparse.linalg import eigsh
    except ImportError:
        raise ResourceCapError(
            f"dense eigensolver capped at {caps.spectral_dense} vertices and "
            "scipy is unavailable for the sparse path"
        ) from None
    nv = X.num_vertices
    pi = [Fraction(0)] * nv
    entries = []
    for (a, b) in X.faces_of_dim(1):
        val = X.weight((a, b))
        pi[a] += val
        pi[b] += val
        entries.append((a, b, val))
    rows, cols, vals = [], [], []
    for a, b, val in entries:
        s = float(val) / math.sqrt(float(pi[a]) * float(pi[b]))
        rows.extend((a, b))
        cols.extend((b, a))
        vals.extend((s, s))
    S = coo_matrix((vals, (rows, cols)), shape=(nv, nv)).tocsr()
    top = eigsh(S, k=2, which="LA", return_eigenvectors=False)
    return float(sorted(top)[0])


@dataclass
class SpectralReport:
    entries: list  # (face labels, link dimension, eigenvalue or None, connected)
    lam: float
    all_links_connected: bool

    def verdict(self):
        if not self.all_links_connected:
            return "not a local spectral expander: some link is disconnected"
        return f"{self.lam:.9f}-local spectral expander (one-sided)"


def local_spectral_profile(X, caps=None, skip_oversize=False):
    """Second eigenvalue of every link X_tau, tau in X(-1..n-2).

    With skip_oversize, links beyond the dense cap (and without scipy) are
    recorded with eigenvalue None instead of failing the whole report.
    """
    if caps is None:
        caps = default_caps()
    if not X.pure:
        raise UnsupportedError("local spectral profile needs a pure complex")
    entries = []
    lam = None
    all_connected = True
    for k in range(-1, X.n - 1):
        for face in sorted(X.faces_of_dim(k)):
            labels = X.labels_of(face)
            link = X.link(labels)
            connected = link.num_vertices > 0 and link.is_connected()
            eig = None
            if connected and link.n >= 1:
                try:
                    eig = second_eigenvalue(link, caps=caps)
                except ResourceCapError:
                    if not skip_oversize:
                        raise
            if not connected:
                all_connected = False
            if eig is not None:
                lam = eig if lam is None else max(lam, eig)
            entries.append((labels, link.n, eig, connected))
    return SpectralReport(entries, lam if lam is not None else float("nan"),
                          all_connected)


# ---------------------------------------------------------------------------
# brute-force coboundary and cosystolic constants
# ---------------------------------------------------------------------------

def _require_finite(group):
    group = CoefficientGroup.parse(group)
    if not group.is_finite():
        raise DomainError("brute force needs a finite coefficient group")
    if group.order() > 255:
        raise DomainError("brute force supports coefficient groups of order <= 255")
    return group


def _group_tables(group):
    elements = group.elements()
    index = {e: i for i, e in enumerate(elements)}
    q = len(elements)
    add = np.zeros((q, q), dtype=np.uint8)
    neg = np.zeros(q, dtype=np.uint8)
    for i, a in enumerate(elements):
        neg[i] = index[group.neg(a)]
        for j, b in enumerate(elements):
            add[i, j] = index[group.add(a, b)]
    return elements, index, add, neg


def _level(X, k):
    simplices = sorted(X.faces_of_dim(k))
    pos = {s: i for i, s in enumerate(simplices)}
    w = np.array([X.weight_numerator(s) for s in simplices], dtype=np.int64)
    return simplices, pos, w, X.weight_denominator(k)


def _cob_incidence(X, k, pos_k):
    upper = sorted(X.faces_of_dim(k + 1))
    faces = np.zeros((len(upper), k + 2), dtype=np.int32)
    signs = np.zeros((len(upper), k + 2), dtype=np.int8)
    w = np.array([X.weight_numerator(s) for s in upper], dtype=np.int64)
    for t, s in enumerate(upper):
        for i in range(len(s)):
            faces[t, i] = pos_k[s[:i] + s[i + 1 :]]
            signs[t, i] = 1 if i % 2 == 0 else -1
    return upper, faces, signs, w


def _coboundary_subgroup(X, k, group, elements, index, caps):
    """All coboundaries d(C^{k-1}) as element-index tuples, by closure."""
    simplices, pos, _, _ = _level(X, k)
    nk = len(simplices)
    gens = set()
    # degree -1 cochains are included: B^0 contains the constants
    lower = sorted(X.faces_of_dim(k - 1))
    unit_elements = []
    for ci in range(len(group.components)):
        parts = [0] * len(group.components)
        parts[ci] = 1
        unit_elements.append(group.reduce(group.join(parts)))
    for tau in lower:
        for e in unit_elements:
            psi = Cochain.from_values(X, k - 1, {tau: e}, group)
            dpsi = psi.coboundary()
            vec = [0] * nk
            for s, c in dpsi.entries.items():
                vec[pos[s]] = index[c]
            gens.add(tuple(vec))
    zero = tuple([0] * nk)
    members = {zero}
    frontier = [zero]
    add = group.add
    while frontier:
        nxt = []
        for v in frontier:
            for g in gens:
                s = tuple(
                    index[add(elements[a], elements[b])] for a, b in zip(v, g)
                )
                if s not in members:
                    members.add(s)
                    nxt.append(s)
                    if len(members) > caps.subgroup:
                        raise ResourceCapError(
                            f"coboundary subgroup exceeds cap {caps.subgroup}"
                        )
        frontier = nxt
    return members


def _keys_and_rows(vectors, q, nk):
    rows = np.array(sorted(vectors), dtype=np.uint8).reshape(-1, nk)
    weights = np.array([q**i for i in range(nk)], dtype=np.int64)
    keys = np.sort(rows.astype(np.int64) @ weights)
    return keys, rows


def _decode_key(key, q, nk):
    out = []
    for _ in range(nk):
        out.append(int(key % q))
        key //= q
    return out


def _sweep_bundle(X, k, group, caps, force_pure, top_ok=False):
    group = _require_finite(group)
    hi = X.n if top_ok else X.n - 1
    if not (0 <= k <= hi):
        raise DomainError(f"degree {k} out of range 0..{hi}")
    elements, index, add, neg = _group_tables(group)
    simplices, pos, level_w, Dk = _level(X, k)
    nk = len(simplices)
    q = len(elements)
    caps.check("bruteforce", q**nk, f"{q}^{nk} cochain sweep")
    upper, faces, signs, upper_w = _cob_incidence(X, k, pos)
    Dk1 = X.weight_denominator(k + 1)
    return {
        "group": group, "elements": elements, "index": index,
        "add": add, "neg": neg,
        "simplices": simplices, "pos": pos, "level_w": level_w,
        "Dk": Dk, "Dk1": Dk1, "nk": nk, "q": q,
        "faces": faces, "signs": signs, "upper_w": upper_w,
        "impl": _impl(force_pure),
    }


def _witness(X, k, bundle, key):
    vec = _decode_key(key, bundle["q"], bundle["nk"])
    values = {
        s: bundle["elements"][vi]
        for s, vi in zip(bundle["simplices"], vec)
        if vi
    }
    return Cochain.from_values(X, k, values, bundle["group"])


def coboundary_constant(X, k, group, caps=None, force_pure=False):
    """h^k_cb by exhaustive search: min ||d phi|| / ||phi - B^k||.

    Returns (value, witness cochain); (None, None) when every cochain is a
    coboundary (no competitor exists).
    """
    if caps is None:
        caps = default_caps()
    b = _sweep_bundle(X, k, group, caps, force_pure)
    B = _coboundary_subgroup(X, k, b["group"], b["elements"], b["index"], caps)
    keys, rows = _keys_and_rows(B, b["q"], b["nk"])
    found, num, den, key, _ = b["impl"].sweep(
        b["nk"], b["q"], b["add"], b["neg"], b["faces"], b["signs"],
        b["upper_w"], b["level_w"], keys, rows, False,
    )
    if not found:
        return None, None
    return Fraction(int(num) * b["Dk"], int(den) * b["Dk1"]), _witness(X, k, b, key)


def _cocycles(X, k, bundle, caps):
    empty_keys = np.zeros(0, dtype=np.int64)
    empty_rows = np.zeros((0, bundle["nk"]), dtype=np.uint8)
    _, _, _, _, kernel_keys = bundle["impl"].sweep(
        bundle["nk"], bundle["q"], bundle["add"], bundle["neg"],
        bundle["faces"], bundle["signs"], bundle["upper_w"],
        bundle["level_w"], empty_keys, empty_rows, True,
    )
    if len(kernel_keys) > caps.subgroup:
        raise ResourceCapError(f"cocycle group exceeds cap {caps.subgroup}")
    return [tuple(_decode_key(key, bundle["q"], bundle["nk"])) for key in kernel_keys]


def cosystolic_constant(X, k, group, caps=None, force_pure=False):
    """h^k_cs by exhaustive search (distance measured to the cocycles)."""
    if caps is None:
        caps = default_caps()
    b = _sweep_bundle(X, k, group, caps, force_pure)
    Z = _cocycles(X, k, b, caps)
    keys, rows = _keys_and_rows(Z, b["q"], b["nk"])
    found, num, den, key, _ = b["impl"].sweep(
        b["nk"], b["q"], b["add"], b["neg"], b["faces"], b["signs"],
        b["upper_w"], b["level_w"], keys, rows, False,
    )
    if not found:
        return None, None
    return Fraction(int(num) * b["Dk"], int(den) * b["Dk1"]), _witness(X, k, b, key)


def systole(X, k, group, caps=None, force_pure=False):
    """Minimal norm over Z^k minus B^k, or None when cohomology vanishes.

    Defined up to k = n: every top-degree cochain is a cocycle.
    """
    if caps is None:
        caps = default_caps()
    b = _sweep_bundle(X, k, group, caps, force_pure, top_ok=True)
    Z = _cocycles(X, k, b, caps)
    B = _coboundary_subgroup(X, k, b["group"], b["elements"], b["index"], caps)
    best = None
    for vec in Z:
        if vec in B:
            continue
        norm_num = sum(
            int(w) for w, vi in zip(b["level_w"], vec) if vi
        )
        val = Fraction(norm_num, b["Dk"])
        if best is None or val < best:
            best = val
    return best


def cohomology_nonzero(X, k, m):
    """H^k(X; Z/m) != 0, decided from integer homology (universal
    coefficients: Hom(H_k, Z/m) + Ext(H_{k-1}, Z/m))."""
    ranks = reduced_homology_ranks(X)
    betti_k, torsion_k = ranks[k] if k < len(ranks) else (0, ())
    if betti_k > 0:
        return True
    if any(math.gcd(d, m) > 1 for d in torsion_k):
        return True
    if k >= 1:
        _, torsion_prev = ranks[k - 1]
        if any(math.gcd(d, m) > 1 for d in torsion_prev):
            return True
    return False


# ---------------------------------------------------------------------------
# cone-radius lower bound on coboundary expansion
# ---------------------------------------------------------------------------

@dataclass
class ConeBoundReport:
    bound: Fraction
    k: int
    transitive: object  # True / False / None = unverified
    h_measured: Fraction = None
    satisfied: bool = None

    def verdict(self):
        if self.transitive is None:
            return "hypothesis unverified: facet transitivity unknown"
        if not self.transitive:
            return "hypothesis failed: not facet transitive"
        if self.h_measured is None:
            return f"bound {self.bound} (brute force not computed)"
        status = "holds" if self.satisfied else "VIOLATED"
        return f"h = {self.h_measured} vs bound {self.bound}: {status}"


def cone_bound_check(X, rad_bound, k, group=2, caps=None, transitive=None,
                     brute=True, force_pure=False):
    """1/(R * C(n+1, k+1)) lower bound, optionally checked by brute force."""
    if caps is None:
        caps = default_caps()
    bound = Fraction(1, rad_bound * math.comb(X.n + 1, k + 1))
    report = ConeBoundReport(bound=bound, k=k, transitive=transitive)
    if brute:
        h, _ = coboundary_constant(X, k, group, caps=caps, force_pure=force_pure)
        if h is not None:
            report.h_measured = h
            report.satisfied = h >= bound
    return report


def local_to_global_report(X, group=2, caps=None, link_cobound_cap=4096):
    """Measured hypotheses for the local-to-global cosystolic criterion.

    Reports the local spectral profile and the brute-forced coboundary
    constants of the small proper links, plus the (non-constructive)
    conclusion shape; no unverifiable constants are asserted.
    """
    if caps is None:
        caps = default_caps()
    spectral = local_spectral_profile(X, caps=caps, skip_oversize=True)
    group = CoefficientGroup.parse(group)
    q = group.order()
    link_entries = []
    min_h = None
    for k in range(-1, X.n - 1):
        for face in sorted(X.faces_of_dim(k)):
            labels = X.labels_of(face)
            link = X.link(labels)
            if link.n < 1:
                continue
            hs = []
            feasible = all(
                q ** len(link.faces_of_dim(j)) <= link_cobound_cap
                for j in range(0, link.n)
            )
            if feasible:
                for j in range(0, link.n):
                    h, _ = coboundary_constant(link, j, group, caps=caps)
                    hs.append(h)
                measured = [h for h in hs if h is not None]
                if measured:
                    worst = min(measured)
                    min_h = worst if min_h is None else min(min_h, worst)
            link_entries.append((labels, hs if feasible else None))
    return {
        "lambda": spectral.lam,
        "all_links_connected": spectral.all_links_connected,
        "links_brute_forced": sum(1 for _, hs in link_entries if hs is not None),
        "links_total": len(link_entries),
        "min_link_coboundary": min_h,
        "conclusion_shape": (
            "if the complex is a lambda-local spectral expander with lambda "
            "small enough (as a function of dimension) and every proper link "
            "is an eps'-coboundary expander, then the codimension-1 skeleton "
            "is an (eps, mu)-cosystolic expander for some eps, mu > 0 "
            "depending only on dimension, lambda and eps'"
        ),
    }
