import math
import random
from fractions import Fraction
from itertools import product

import numpy as np
import pytest

from hdxcones.caps import Caps
from hdxcones.chains import CoefficientGroup
from hdxcones.errors import DomainError, ResourceCapError
from hdxcones.expansion import (
    coboundary_constant,
    cohomology_nonzero,
    cone_bound_check,
    cosystolic_constant,
    jacobi_eigenvalues,
    kernel_backend,
    local_spectral_profile,
    local_to_global_report,
    second_eigenvalue,
    systole,
    walk_matrix,
)
from hdxcones.simplicial import Complex


def brute_oracle_h_cb(X, k, m):
    """Fully independent reference: dict-based exhaustive search over Z/m."""
    simplices = sorted(X.faces_of_dim(k))
    upper = sorted(X.faces_of_dim(k + 1))
    lower = sorted(X.faces_of_dim(k - 1))

    def d(phi_map, level):
        out = {}
        for s in (upper if level == k else simplices):
            acc = 0
            for i in range(len(s)):
                face = s[:i] + s[i + 1 :]
                acc += (-1) ** i * phi_map.get(face, 0)
            out[s] = acc % m
        return out

    def norm(sup, level):
        return sum(
            (X.weight(s) for s in sup), start=Fraction(0)
        )

    B = set()
    for assign in product(range(m), repeat=len(lower)):
        psi = dict(zip(lower, assign))
        img = d(psi, k - 1)
        B.add(tuple(img[s] for s in simplices))
    best = None
    for assign in product(range(m), repeat=len(simplices)):
        if assign in B:
            continue
        phi = dict(zip(simplices, assign))
        dphi = d(phi, k)
        dn = norm([s for s in upper if dphi[s]], k + 1)
        dist = min(
            norm([s for s, a, bb in zip(simplices, assign, b) if a != bb], k)
            for b in B
        )
        val = dn / dist
        best = val if best is None else min(best, val)
    return best


class TestWalkMatrix:
    def test_rows_sum_to_one_exactly(self):
        for X in (Complex.simplex(4), Complex.octahedron(), Complex.cycle(5)):
            rows, pi = walk_matrix(X)
            for row in rows:
                assert sum(row, start=Fraction(0)) == 1

    def test_reversibility(self):
        X = Complex.octahedron()
        rows, pi = walk_matrix(X)
        n = len(rows)
        for v in range(n):
            for u in range(n):
                assert pi[v] * rows[v][u] == pi[u] * rows[u][v]


class TestSpectra:
    @pytest.mark.parametrize("m", [3, 4, 5, 6])
    def test_complete_graph(self, m):
        X = Complex.simplex(m).skeleton(1)
        assert abs(second_eigenvalue(X) - (-1 / (m - 1))) < 1e-9

    def test_c4(self):
        assert abs(second_eigenvalue(Complex.cycle(4))) < 1e-9

    def test_octahedron_links(self):
        prof = local_spectral_profile(Complex.octahedron())
        for labels, dim, eig, conn in prof.entries:
            assert conn
            if labels:  # vertex links are 4-cycles
                assert abs(eig) < 1e-9

    def test_full_simplex_profile(self):
        # links of vertices of the 3-simplex are triangles (eig -1/2);
        # the empty-face link is K4 (eig -1/3); lambda is the max
        prof = local_spectral_profile(Complex.simplex(4))
        values = {tuple(labels): eig for labels, _, eig, _ in prof.entries}
        assert abs(values[()] - (-1 / 3)) < 1e-9
        for v in (1, 2, 3, 4):
            assert abs(values[(v,)] - (-1 / 2)) < 1e-9
        assert abs(prof.lam - (-1 / 3)) < 1e-9

    def test_jacobi_matches_numpy(self):
        rng = random.Random(13)
        for n in (2, 5, 9):
            A = [[0.0] * n for _ in range(n)]
            for i in range(n):
                for j in range(i, n):
                    A[i][j] = A[j][i] = rng.uniform(-2, 2)
            mine = jacobi_eigenvalues(A)
            ref = sorted(np.linalg.eigvalsh(np.array(A)), reverse=True)
            assert max(abs(a - b) for a, b in zip(mine, ref)) < 1e-8

    def test_disconnected(self):
        X = Complex.from_maximal_faces([[0, 1], [2, 3]])
        with pytest.raises(DomainError):
            second_eigenvalue(X)


class TestBruteForce:
    def test_triangle_h0(self):
        h, witness = coboundary_constant(Complex.simplex(3), 0, 2)
        assert h == 2
        assert witness is not None and len(witness.support()) in (1, 2)

    def test_triangle_h1(self):
        h, _ = coboundary_constant(Complex.simplex(3), 1, 2)
        assert h == 3

    def test_hollow_triangle_h0(self):
        h, _ = coboundary_constant(Complex.cycle(3), 0, 2)
        assert h == 2

    def test_matches_independent_oracle(self):
        cases = [
            (Complex.simplex(3), 0, 2),
            (Complex.simplex(3), 1, 2),
            (Complex.cycle(4), 0, 2),
            (Complex.simplex(3), 0, 3),
            (Complex.cycle(3), 0, 3),
        ]
        for X, k, m in cases:
            h, _ = coboundary_constant(X, k, m)
            assert h == brute_oracle_h_cb(X, k, m), (X, k, m)

    def test_cosystolic_at_least_coboundary(self):
        cases = [
            (Complex.simplex(3), 0, 2),
            (Complex.simplex(3), 1, 2),
            (Complex.cycle(3), 0, 2),
            (Complex.cycle(5), 0, 2),
            (Complex.octahedron(), 0, 2),
            (Complex.octahedron(), 1, 2),
            (Complex.simplex(4), 1, 3),
        ]
        for X, k, m in cases:
            h_cb, _ = coboundary_constant(X, k, m)
            h_cs, _ = cosystolic_constant(X, k, m)
            assert h_cs is not None
            if h_cb is not None:
                assert h_cs >= h_cb

    def test_h_cs_equals_h_cb_when_cohomology_vanishes(self):
        X = Complex.simplex(3)
        h_cb, _ = coboundary_constant(X, 0, 2)
        h_cs, _ = cosystolic_constant(X, 0, 2)
        assert not cohomology_nonzero(X, 0, 2)
        assert h_cb == h_cs

    def test_vanishing_cross_check(self, rp2):
        # h_cb = 0 exactly when H^k != 0, against the SNF-based criterion
        instances = [
            (Complex.simplex(3), 0, 2), (Complex.simplex(3), 1, 2),
            (Complex.simplex(4), 0, 2), (Complex.simplex(4), 1, 2),
            (Complex.simplex(4), 2, 2), (Complex.cycle(3), 0, 2),
            (Complex.cycle(4), 0, 3), (Complex.cycle(5), 0, 2),
            (Complex.cycle(6), 0, 2), (Complex.octahedron(), 0, 2),
            (Complex.octahedron(), 1, 2), (rp2, 1, 2),
        ]
        assert len(instances) >= 10
        for X, k, m in instances:
            h, _ = coboundary_constant(X, k, m)
            assert h is not None
            assert (h == 0) == cohomology_nonzero(X, k, m), (X, k, m)

    def test_systole_values(self, rp2):
        assert systole(Complex.cycle(3), 1, 2) == Fraction(1, 3)
        assert systole(Complex.octahedron(), 1, 2) is None  # H^1 = 0
        assert systole(Complex.octahedron(), 2, 2) == Fraction(1, 8)
        assert systole(rp2, 1, 2) is not None

    def test_infinite_group_rejected(self):
        with pytest.raises(DomainError):
            coboundary_constant(Complex.simplex(3), 0, "Z")

    def test_cap(self):
        with pytest.raises(ResourceCapError):
            coboundary_constant(
                Complex.octahedron(), 1, 2, caps=Caps(bruteforce=100)
            )

    def test_direct_sum_group(self):
        # components couple through the support norm: phi = (1,0) on one
        # vertex, (0,1) on another has ||d phi|| = 1 and distance 2/3 to the
        # constants, so the constant drops below the single-component value 2
        g = CoefficientGroup.parse(["Z/2", "Z/2"])
        h, _ = coboundary_constant(Complex.simplex(3), 0, g)
        assert h == Fraction(3, 2)


class TestKernelParity:
    def test_pure_equals_compiled(self):
        if kernel_backend() != "compiled":
            pytest.skip("compiled kernel unavailable")
        cases = [
            (Complex.simplex(3), 0, 2), (Complex.simplex(3), 1, 2),
            (Complex.octahedron(), 1, 2), (Complex.cycle(4), 0, 3),
        ]
        for X, k, m in cases:
            fast = coboundary_constant(X, k, m)[0]
            slow = coboundary_constant(X, k, m, force_pure=True)[0]
            assert fast == slow
            fast_cs = cosystolic_constant(X, k, m)[0]
            slow_cs = cosystolic_constant(X, k, m, force_pure=True)[0]
            assert fast_cs == slow_cs


class TestConeBound:
    def test_triangle(self):
        rep = cone_bound_check(Complex.simplex(3), 1, 0, 2, transitive=True)
        assert rep.bound == Fraction(1, 3)
        assert rep.h_measured == 2 and rep.satisfied

    def test_top_degree_formula(self):
        X = Complex.simplex(4)  # n = 3
        rep = cone_bound_check(X, 2, 2, 2, transitive=True, brute=False)
        assert rep.bound == Fraction(1, 2 * math.comb(4, 3))

    def test_unverified_hypothesis(self):
        rep = cone_bound_check(Complex.simplex(3), 1, 0, 2)
        assert "unverified" in rep.verdict()


class TestLocalToGlobal:
    def test_octahedron_report(self):
        rep = local_to_global_report(Complex.octahedron(), 2)
        assert rep["all_links_connected"]
        assert rep["links_brute_forced"] == rep["links_total"] == 7
        assert rep["min_link_coboundary"] > 0
        assert "cosystolic" in rep["conclusion_shape"]
