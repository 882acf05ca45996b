import json
from fractions import Fraction
from itertools import combinations

import pytest

from hdxcones.errors import DomainError, MalformedInputError, UnsupportedError
from hdxcones.simplicial import Complex


OCTA_TRIANGLES = [
    ["n", "a", "b"], ["n", "b", "c"], ["n", "c", "d"], ["n", "d", "a"],
    ["s", "a", "b"], ["s", "b", "c"], ["s", "c", "d"], ["s", "d", "a"],
]


def brute_face_counts(maximal):
    """Independent oracle: downward closure by raw subset enumeration."""
    faces = set()
    for f in maximal:
        for k in range(len(f) + 1):
            faces.update(frozenset(c) for c in combinations(f, k))
    counts = {}
    for f in faces:
        counts[len(f) - 1] = counts.get(len(f) - 1, 0) + 1
    return counts


class TestConstruction:
    def test_full_simplex(self):
        X = Complex.from_maximal_faces([[1, 2, 3]])
        assert X.n == 2 and X.pure
        assert [len(X.faces_of_dim(k)) for k in range(-1, 3)] == [1, 3, 3, 1]

    def test_path(self):
        X = Complex.from_maximal_faces([[1, 2], [2, 3]])
        assert X.n == 1 and X.pure
        assert len(X.faces_of_dim(0)) == 3 and len(X.faces_of_dim(1)) == 2

    def test_octahedron_counts_against_enumeration(self):
        X = Complex.from_maximal_faces(OCTA_TRIANGLES)
        oracle = brute_face_counts(OCTA_TRIANGLES)
        assert X.n == 2 and X.pure
        for k in range(0, 3):
            assert len(X.faces_of_dim(k)) == oracle[k]
        assert (len(X.faces_of_dim(0)), len(X.faces_of_dim(1)),
                len(X.faces_of_dim(2))) == (6, 12, 8)

    def test_duplicate_label_in_face(self):
        with pytest.raises(MalformedInputError):
            Complex.from_maximal_faces([[1, 1, 2]])

    def test_non_maximal_input_rejected(self):
        with pytest.raises(MalformedInputError):
            Complex.from_maximal_faces([[1, 2, 3], [1, 2]])

    def test_nonpure(self):
        X = Complex.from_maximal_faces([[1, 2, 3], [3, 4]])
        assert X.n == 2 and not X.pure


class TestLink:
    def test_link_of_vertex_in_triangle(self):
        X = Complex.simplex(3)
        lk = X.link([1])
        assert set(lk.labels) == {2, 3}
        assert len(lk.faces_of_dim(1)) == 1

    def test_link_of_empty_face(self):
        X = Complex.simplex(3)
        assert X.link([]) == X

    def test_link_octahedron_pole_is_4_cycle(self):
        X = Complex.octahedron()
        lk = X.link(["n"])
        assert set(lk.labels) == {"a", "b", "c", "d"}
        assert len(lk.faces_of_dim(1)) == 4
        adj = lk.adjacency()
        assert all(len(nbrs) == 2 for nbrs in adj.values())
        assert lk.pure and lk.n == 1

    def test_link_nonface_raises(self):
        with pytest.raises(DomainError):
            Complex.octahedron().link(["n", "s"])

    def test_link_of_link_identity(self):
        X = Complex.octahedron()
        a = X.link(["n"]).link(["a"])
        b = X.link(["n", "a"])
        assert set(a.labels) == set(b.labels)
        assert a == b

    def test_link_dimension_drop(self):
        X = Complex.simplex(5)
        lk = X.link([1, 2])  # k = 1, so the link is pure of dimension n-k-1
        assert lk.pure and lk.n == X.n - 1 - 1


class TestSkeletonJoinSubcomplex:
    def test_skeleton(self):
        X = Complex.simplex(3)
        sk = X.skeleton(1)
        assert sk.n == 1 and len(sk.faces_of_dim(1)) == 3
        assert X.skeleton(2) == X
        with pytest.raises(DomainError):
            X.skeleton(5)

    def test_skeleton_octahedron_edge_count(self):
        sk = Complex.octahedron().skeleton(1)
        assert len(sk.faces_of_dim(1)) == 12 and sk.pure

    def test_join_point_point(self):
        p = Complex.from_maximal_faces([["u"]])
        q = Complex.from_maximal_faces([["v"]])
        j = p.join(q)
        assert j.n == 1 and len(j.faces_of_dim(1)) == 1

    def test_join_s0_s0_is_4_cycle(self):
        s0 = Complex.from_maximal_faces([[0], [1]])
        j = s0.join(s0)
        assert j.num_vertices == 4 and len(j.faces_of_dim(1)) == 4
        assert all(len(n) == 2 for n in j.adjacency().values())

    def test_join_edge_edge_is_3_simplex(self):
        e = Complex.from_maximal_faces([[0, 1]])
        j = e.join(e)
        # oracle: all sigma u tau for the two factors
        expected = brute_face_counts([[0, 1, 2, 3]])
        for k in range(0, 4):
            assert len(j.faces_of_dim(k)) == expected[k]
        assert j.n == 3 and j.pure

    def test_join_dimension(self):
        a = Complex.cycle(4)
        b = Complex.from_maximal_faces([[0], [1]])
        assert a.join(b).n == a.n + b.n + 1

    def test_join_associative_up_to_relabel(self):
        a = Complex.from_maximal_faces([[0], [1]])
        b = Complex.from_maximal_faces([["x", "y"]])
        c = Complex.cycle(3)
        left = a.join(b).join(c)  # labels ((0,(0,x)) | (0,(1,y)) | (1,z)
        right = a.join(b.join(c))  # labels (0,x) | (1,(0,y)) | (1,(1,z))

        def canonical(lab):
            tag, inner = lab
            if tag == 0:
                inner_tag, v = inner
                return (0, v) if inner_tag == 0 else (1, (0, v))
            return (1, (1, inner))

        relabeled = left.relabeled(canonical)
        assert set(relabeled.labels) == set(right.labels)
        for k in relabeled.dims():
            faces_l = {
                frozenset(relabeled.labels_of(f)) for f in relabeled.faces_of_dim(k)
            }
            faces_r = {
                frozenset(right.labels_of(f)) for f in right.faces_of_dim(k)
            }
            assert faces_l == faces_r

    def test_full_subcomplex(self):
        X = Complex.simplex(3)
        sub = X.full_subcomplex([1, 2])
        assert len(sub.faces_of_dim(1)) == 1
        assert X.full_subcomplex([1, 2, 3]) == X
        with pytest.raises(DomainError):
            X.full_subcomplex([1, 99])

    def test_full_subcomplex_octahedron_cone(self):
        X = Complex.octahedron()
        sub = X.full_subcomplex(["n", "a", "b", "c", "d"])
        # oracle: triangles through n only
        expected = [t for t in OCTA_TRIANGLES if "n" in t]
        assert len(sub.faces_of_dim(2)) == len(expected) == 4
        assert sub.pure and sub.n == 2


class TestWeights:
    def test_triangle_edge_weight(self):
        X = Complex.simplex(3)
        assert X.weight(X.face_from_labels([1, 2])) == Fraction(1, 3)

    def test_octahedron_edge_weight(self):
        X = Complex.octahedron()
        assert X.weight(X.face_from_labels(["a", "b"])) == Fraction(1, 12)

    def test_empty_face_weight_is_one(self):
        for X in (Complex.simplex(3), Complex.octahedron(), Complex.cycle(5)):
            assert X.weight(()) == 1

    def test_normalization_exact(self):
        for X in (Complex.simplex(4), Complex.octahedron(), Complex.cycle(6)):
            for k in range(-1, X.n + 1):
                total = sum(
                    (X.weight(f) for f in X.faces_of_dim(k)), start=Fraction(0)
                )
                assert total == 1

    def test_nonpure_weight_unsupported(self):
        X = Complex.from_maximal_faces([[1, 2, 3], [3, 4]])
        with pytest.raises(UnsupportedError):
            X.weight((0,))


class TestConnectivity:
    def test_connected(self):
        assert Complex.simplex(3).is_connected()
        assert Complex.octahedron().is_connected()

    def test_disconnected(self):
        X = Complex.from_maximal_faces([[1, 2], [3, 4]])
        assert not X.is_connected()


class TestJson:
    def test_round_trip(self):
        X = Complex.octahedron()
        Y = Complex.from_json(X.to_json())
        assert X == Y
        assert X.to_json() == Y.to_json()

    def test_format_shape(self):
        X = Complex.simplex(3)
        data = json.loads(X.to_json())
        assert set(data) == {"vertices", "maximal_faces"}
        assert data["maximal_faces"] == [[0, 1, 2]]

    def test_bad_json(self):
        with pytest.raises(MalformedInputError):
            Complex.from_json_dict({"vertices": [1, 2]})


class TestDownwardClosure:
    def test_every_subset_of_every_face_is_a_face(self):
        from itertools import combinations

        for X in (Complex.octahedron(), Complex.simplex(4),
                  Complex.from_maximal_faces([[1, 2, 3], [3, 4], [5]])):
            for k in range(0, X.n + 1):
                for f in X.faces_of_dim(k):
                    for r in range(len(f)):
                        for sub in combinations(f, r):
                            assert X.has_face(sub)


class TestNonPureLink:
    def test_link_in_nonpure_complex(self):
        X = Complex.from_maximal_faces([[1, 2, 3], [3, 4]])
        lk = X.link([3])
        assert set(lk.labels) == {1, 2, 4}
        assert lk.has_face_labels([1, 2])
        assert not lk.has_face_labels([1, 4])
