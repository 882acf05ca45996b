"""Immutable finite simplicial complexes with exact rational weights.

Vertices are dense integer indices with a label table; faces are sorted
index tuples, stored per dimension with X(-1) = {()} always present.  All
operations return new values; nothing mutates after construction.
"""

import json
from fractions import Fraction
from itertools import combinations
from math import comb

from .errors import DomainError, MalformedInputError, UnsupportedError


class Complex:
    """A finite simplicial complex.  Use the from_* constructors."""

    __slots__ = (
        "labels", "_index", "_faces", "n", "pure",
        "_top_counts", "_vertex_facets",
    )

    def __init__(self, labels, faces_by_dim, n, pure):
        self.labels = tuple(labels)
        self._index = {lab: i for i, lab in enumerate(self.labels)}
        if len(self._index) != len(self.labels):
            raise MalformedInputError("duplicate vertex labels")
        self._faces = faces_by_dim  # dict: dim -> frozenset of index tuples
        self.n = n
        self.pure = pure
        self._top_counts = None
        self._vertex_facets = None

    # -- constructors --------------------------------------------------------

    @staticmethod
    def from_maximal_faces(faces, vertices=None):
        """Build the downward closure of the given maximal faces.

        Faces are iterables of labels; a label repeated inside one face is a
        malformed input.  Maximality is checked.
        """
        face_sets = []
        for f in faces:
            f = list(f)
            if len(set(f)) != len(f):
                raise MalformedInputError(f"duplicate labels within face {f!r}")
            face_sets.append(f)
        if not face_sets:
            raise MalformedInputError("need at least one maximal face")
        if vertices is None:
            seen = {}
            for f in face_sets:
                for lab in f:
                    seen.setdefault(lab, None)
            try:
                vertices = sorted(seen)
            except TypeError:
                vertices = list(seen)
        index = {lab: i for i, lab in enumerate(vertices)}
        if len(index) != len(vertices):
            raise MalformedInputError("duplicate vertex labels")
        top = set()
        for f in face_sets:
            try:
                top.add(tuple(sorted(index[lab] for lab in f)))
            except KeyError as e:
                raise MalformedInputError(f"face uses unknown vertex {e}") from None
        by_dim = {-1: {()}}
        proper_subsets = set()
        for f in top:
            for k in range(len(f)):
                for sub in combinations(f, k):
                    proper_subsets.add(sub)
            by_dim.setdefault(len(f) - 1, set()).add(f)
        for f in top:
            if f in proper_subsets:
                raise MalformedInputError("input faces are not maximal")
        for sub in proper_subsets:
            if sub:
                by_dim.setdefault(len(sub) - 1, set()).add(sub)
        n = max(by_dim)
        dims_of_top = {len(f) - 1 for f in top}
        return Complex(
            vertices,
            {k: frozenset(v) for k, v in by_dim.items()},
            n,
            pure=(dims_of_top == {n}),
        )

    @staticmethod
    def from_faces(faces, vertices=None):
        """Build from an explicit downward-closed family (labels)."""
        closed = set()
        for f in faces:
            f = list(f)
            if len(set(f)) != len(f):
                raise MalformedInputError(f"duplicate labels within face {f!r}")
            closed.add(frozenset(f))
        # downward closure: a face is maximal iff no face one size up covers it
        covered = set()
        for f in closed:
            if f:
                for sub in combinations(tuple(f), len(f) - 1):
                    covered.add(frozenset(sub))
        maximal = [list(f) for f in closed if f and f not in covered]
        return Complex.from_maximal_faces(maximal, vertices=vertices)

    @staticmethod
    def simplex(m):
        """The full simplex on vertices 1..m."""
        return Complex.from_maximal_faces([list(range(1, m + 1))])

    @staticmethod
    def cycle(m):
        """The m-cycle graph on vertices 0..m-1."""
        if m < 3:
            raise DomainError("cycle needs at least 3 vertices")
        return Complex.from_maximal_faces([[i, (i + 1) % m] for i in range(m)])

    @staticmethod
    def octahedron():
        """Two poles n,s over the square a,b,c,d: 6 vertices, 12 edges, 8 triangles."""
        cyc = ["a", "b", "c", "d"]
        tris = []
        for pole in ("n", "s"):
            for i in range(4):
                tris.append([pole, cyc[i], cyc[(i + 1) % 4]])
        return Complex.from_maximal_faces(tris)

    # -- basic queries ---------------------------------------------------------

    def faces_of_dim(self, k):
        return self._faces.get(k, frozenset())

    def dims(self):
        return sorted(self._faces)

    def all_faces(self):
        for k in sorted(self._faces):
            yield from sorted(self._faces[k])

    def facets(self):
        return self.faces_of_dim(self.n)

    @property
    def num_vertices(self):
        return len(self.labels)

    def index_of(self, label):
        try:
            return self._index[label]
        except KeyError:
            raise DomainError(f"unknown vertex label {label!r}") from None

    def face_from_labels(self, labels):
        return tuple(sorted(self.index_of(lab) for lab in labels))

    def labels_of(self, face):
        return tuple(self.labels[i] for i in face)

    def has_face(self, face):
        return face in self._faces.get(len(face) - 1, ())

    def has_face_labels(self, labels):
        try:
            return self.has_face(self.face_from_labels(labels))
        except DomainError:
            return False

    def __contains__(self, face):
        return self.has_face(tuple(face))

    def __eq__(self, other):
        return (
            isinstance(other, Complex)
            and self.labels == other.labels
            and self._faces == other._faces
        )

    def __repr__(self):
        counts = ",".join(str(len(self._faces.get(k, ()))) for k in range(self.n + 1))
        return f"Complex(n={self.n}, pure={self.pure}, f-vector=[{counts}])"

    # -- weights ---------------------------------------------------------------

    def _ensure_top_counts(self):
        if self._top_counts is None:
            counts = {}
            for facet in self.facets():
                for k in range(len(facet) + 1):
                    for sub in combinations(facet, k):
                        counts[sub] = counts.get(sub, 0) + 1
            self._top_counts = counts
        return self._top_counts

    def weight(self, face):
        """w(face) = #{top faces containing it} / (C(n+1,k+1) * #top faces)."""
        if not self.pure:
            raise UnsupportedError("weights are defined for pure complexes only")
        face = tuple(face)
        if not self.has_face(face):
            raise DomainError(f"{face} is not a face")
        counts = self._ensure_top_counts()
        k = len(face) - 1
        return Fraction(counts[face], comb(self.n + 1, k + 1) * len(self.facets()))

    def weight_numerator(self, face):
        """Top-face count of the face; w = numerator / weight_denominator(k)."""
        if not self.pure:
            raise UnsupportedError("weights are defined for pure complexes only")
        return self._ensure_top_counts()[tuple(face)]

    def weight_denominator(self, k):
        return comb(self.n + 1, k + 1) * len(self.facets())

    # -- derived complexes -------------------------------------------------------

    def _facets_through(self, v):
        if self._vertex_facets is None:
            idx = {i: [] for i in range(len(self.labels))}
            for facet in self.facets():
                for i in facet:
                    idx[i].append(facet)
            self._vertex_facets = idx
        return self._vertex_facets[v]

    def link(self, tau_labels):
        """Link of a face: faces disjoint from tau whose union with tau is a face."""
        tau = self.face_from_labels(tau_labels)
        if not self.has_face(tau):
            raise DomainError(f"{tuple(tau_labels)} is not a face of the complex")
        if not tau:
            return self
        tau_set = set(tau)
        if self.pure:
            if len(tau) == 1:
                carriers = self._facets_through(tau[0])
            else:
                carriers = [f for f in self.facets() if tau_set.issubset(f)]
            maximal = {tuple(i for i in f if i not in tau_set) for f in carriers}
            faces = {()}
            for f in maximal:
                for k in range(1, len(f) + 1):
                    faces.update(combinations(f, k))
        else:
            faces = set()
            for k in sorted(self._faces):
                for f in self._faces[k]:
                    if tau_set.isdisjoint(f) and self.has_face(tuple(sorted(f + tau))):
                        faces.add(f)
        verts = sorted({i for f in faces for i in f})
        return self._rebuild_from_index_faces(verts, faces)

    def skeleton(self, k):
        """Union of X(-1..k)."""
        if k < -1 or k > self.n:
            raise DomainError(f"skeleton dimension {k} out of range -1..{self.n}")
        faces = set()
        for d in self._faces:
            if d <= k:
                faces.update(self._faces[d])
        verts = sorted({i for f in faces for i in f})
        return self._rebuild_from_index_faces(verts, faces)

    def full_subcomplex(self, vertex_labels):
        """All faces whose vertices lie in the given set."""
        keep = {self.index_of(lab) for lab in vertex_labels}
        faces = set()
        for d in self._faces:
            faces.update(f for f in self._faces[d] if keep.issuperset(f))
        verts = sorted(keep)
        return self._rebuild_from_index_faces(verts, faces)

    def _rebuild_from_index_faces(self, vertex_indices, faces):
        """New complex on a vertex subset, preserving relative label order."""
        remap = {old: new for new, old in enumerate(vertex_indices)}
        by_dim = {}
        for f in faces:
            nf = tuple(remap[i] for i in f)
            by_dim.setdefault(len(nf) - 1, set()).add(nf)
        by_dim.setdefault(-1, set()).add(())
        n = max(by_dim)
        maximal_dims = set()
        for d in range(0, n + 1):
            covered = set()
            for g in by_dim.get(d + 1, ()):
                covered.update(combinations(g, d + 1))
            if any(f not in covered for f in by_dim.get(d, ())):
                maximal_dims.add(d)
        pure = maximal_dims in ({n}, set())
        return Complex(
            [self.labels[i] for i in vertex_indices],
            {k: frozenset(v) for k, v in by_dim.items()},
            n,
            pure,
        )

    def join(self, other):
        """Join X*Y: labels tagged (0,.) and (1,.); faces are all unions."""
        labels = [(0, lab) for lab in self.labels] + [(1, lab) for lab in other.labels]
        off = len(self.labels)
        by_dim = {}
        for ds in self._faces:
            for f in self._faces[ds]:
                for do in other._faces:
                    for g in other._faces[do]:
                        fg = f + tuple(i + off for i in g)
                        by_dim.setdefault(len(fg) - 1, set()).add(fg)
        n = max(by_dim)
        pure = self.pure and other.pure
        return Complex(labels, {k: frozenset(v) for k, v in by_dim.items()}, n, pure)

    def add_apex(self, apex_label):
        """Cone {v} * X keeping existing labels (v must be fresh)."""
        if apex_label in self._index:
            raise MalformedInputError(f"apex label {apex_label!r} already used")
        labels = (apex_label,) + self.labels
        by_dim = {}
        for d in self._faces:
            for f in self._faces[d]:
                shifted = tuple(i + 1 for i in f)
                by_dim.setdefault(d, set()).add(shifted)
                coned = (0,) + shifted
                by_dim.setdefault(d + 1, set()).add(coned)
        return Complex(
            labels, {k: frozenset(v) for k, v in by_dim.items()}, self.n + 1, self.pure
        )

    def relabeled(self, mapping):
        """Same complex with labels replaced via a dict or callable."""
        fn = mapping.__getitem__ if isinstance(mapping, dict) else mapping
        return Complex([fn(lab) for lab in self.labels], self._faces, self.n, self.pure)

    # -- graph-level queries ------------------------------------------------------

    def adjacency(self):
        adj = {i: set() for i in range(len(self.labels))}
        for (a, b) in self.faces_of_dim(1):
            adj[a].add(b)
            adj[b].add(a)
        return adj

    def is_connected(self):
        if not self.labels:
            raise DomainError("connectivity of the empty complex is undefined")
        adj = self.adjacency()
        seen = {0}
        frontier = [0]
        while frontier:
            nxt = []
            for v in frontier:
                for u in adj[v]:
                    if u not in seen:
                        seen.add(u)
                        nxt.append(u)
            frontier = nxt
        return len(seen) == len(self.labels)

    # -- serialization ---------------------------------------------------------

    def to_json_dict(self):
        maximal = set()
        for d in range(0, self.n + 1):
            covered = set()
            for g in self._faces.get(d + 1, ()):
                covered.update(combinations(g, d + 1))
            maximal.update(f for f in self._faces.get(d, ()) if f not in covered)
        return {
            "vertices": list(self.labels),
            "maximal_faces": sorted(sorted(f) for f in maximal),
        }

    def to_json(self):
        return json.dumps(self.to_json_dict(), sort_keys=True)

    @staticmethod
    def from_json_dict(data):
        try:
            vertices = list(data["vertices"])
            maximal = data["maximal_faces"]
        except (KeyError, TypeError) as e:
            raise MalformedInputError(f"bad complex JSON: {e}") from None
        faces = [[vertices[i] for i in f] for f in maximal]
        return Complex.from_maximal_faces(faces, vertices=vertices)

    @staticmethod
    def from_json(text):
        return Complex.from_json_dict(json.loads(text))
