import math

import numpy as np
import pytest
from scipy.stats import special_ortho_group

from conftest import REGULAR_ANGLE_3D
from simplexangles import numlin
from simplexangles.cones import angle_exact
from simplexangles.errors import DegenerateCone
from simplexangles.mc import RandomStream, compare, estimate_orthant
from simplexangles.simplex import (
    Simplex, angle_sum, angle_sum_exact, facet_normals, family_s1, family_s2, gaussian_simplex,
    lifted_difference_gram, lifted_difference_grams, region_census, regular_gram, regular_simplex,
    regular_simplex_chart, vertex_angles, vertex_cone,
)


def within(est, truth, k=4.0):
    return abs(est.value - truth) <= k * est.std_error


class TestSimplex:
    def test_affinely_dependent(self):
        with pytest.raises(DegenerateCone):
            Simplex([[0, 0], [1, 1], [2, 2]])

    def test_too_many_vertices(self):
        with pytest.raises(DegenerateCone):
            Simplex([[0.0], [1.0], [2.0]])

    def test_vertex_cone(self):
        s = Simplex([[0, 0], [1, 0], [0, 1]])
        assert np.array_equal(vertex_cone(s, 0).generators, [[1, 0], [0, 1]])
        assert np.array_equal(vertex_cone(s, 1).generators, [[-1, 0], [-1, 1]])
        with pytest.raises(IndexError):
            vertex_cone(s, 3)

    def test_right_triangle_angles(self):
        s = Simplex([[0, 0], [1, 0], [0, 1]])
        exact = [angle_exact(s.vertex_gram(i)) for i in range(3)]
        assert exact == pytest.approx([0.25, 0.125, 0.125], abs=1e-15)
        ests = vertex_angles(s, 10**5, RandomStream(1))
        assert all(within(e, x) for e, x in zip(ests, exact))

    def test_triangle_sum(self):
        s = Simplex([[0.1, 0.3], [2.0, -1.0], [0.5, 4.0]])
        assert within(angle_sum(s, 10**6, RandomStream(2)), 0.5)

    def test_triangle_exactness(self):
        root = RandomStream(3)
        for i in range(10**4):
            s = gaussian_simplex(2, root.child(i))
            assert abs(angle_sum_exact(s) - 0.5) <= 1e-10

    def test_regular_tetrahedron(self):
        assert angle_sum_exact(regular_simplex_chart(3)) == pytest.approx(4 * REGULAR_ANGLE_3D, abs=1e-14)
        assert 4 * REGULAR_ANGLE_3D == pytest.approx(0.17547966, abs=1e-8)
        est = angle_sum(regular_simplex(3), 10**6, RandomStream(4))
        assert est.value == pytest.approx(0.17547966, abs=4 * est.std_error)

    def test_lifted_and_charted_regular_agree(self):
        for d in (2, 3, 5):
            a, b = regular_simplex(d), regular_simplex_chart(d)
            assert b.ambient_dim == d
            for i in range(d + 1):
                assert np.allclose(a.vertex_gram(i), b.vertex_gram(i), atol=1e-12)

    def test_rigid_motion(self):
        s = gaussian_simplex(3, RandomStream(5))
        q = special_ortho_group.rvs(3, random_state=7)
        moved = Simplex(s.vertices @ q.T + np.array([3.0, -1.0, 2.0]))
        for i in range(4):
            assert np.allclose(s.vertex_gram(i), moved.vertex_gram(i), atol=1e-12)
        assert angle_sum_exact(moved) == pytest.approx(angle_sum_exact(s), abs=1e-10)
        a = angle_sum(s, 10**5, RandomStream(6))
        b = angle_sum(moved, 10**5, RandomStream(6))
        assert a.value == pytest.approx(b.value, abs=1e-4)
        assert compare(a, b).passed


class TestGaussianSimplex:
    def test_shape_and_mean(self):
        root = RandomStream(8)
        verts = np.array([gaussian_simplex(3, root.child(i)).vertices for i in range(10**4)])
        assert verts.shape == (10**4, 4, 3)
        assert np.all(np.abs(verts.mean(axis=0)) <= 4 / math.sqrt(10**4))

    def test_regular_gram(self):
        assert np.array_equal(regular_gram(1), [[2.0]])
        g = regular_gram(3)
        assert np.array_equal(np.diag(g), [2, 2, 2])
        assert np.allclose(numlin.correlation(g)[np.triu_indices(3, 1)], 0.5)
        for d in (1, 10, 50):
            assert numlin.is_positive_definite(regular_gram(d))
        with pytest.raises(ValueError):
            regular_gram(0)


class TestLiftedGram:
    def test_prefix_consistency(self):
        many = lifted_difference_grams(3, [10, 100, 5000], RandomStream(9))
        single = lifted_difference_gram(3, 100, RandomStream(9))
        assert np.allclose(many[100], single, rtol=1e-13)
        for g in many.values():
            assert np.array_equal(g, g.T)

    def test_law_of_large_numbers(self):
        n = 10**5
        g = lifted_difference_gram(4, n, RandomStream(10)) / n
        # variance per coordinate: 8 for squared differences, 5 for cross products
        assert np.all(np.abs(g - regular_gram(4)) <= 4 * math.sqrt(8 / n))

    def test_correlation_near_half(self):
        root = RandomStream(11)
        dev = []
        for i in range(100):
            r = numlin.correlation(lifted_difference_gram(3, 10**4, root.child(i)))
            dev.append(np.mean(np.abs(r[np.triu_indices(3, 1)] - 0.5)))
        assert np.mean(dev) <= 0.05

    def test_n_equals_d_matches_gaussian_simplex(self):
        root = RandomStream(12)
        reps, m = 400, 2000
        lifted = [estimate_orthant(lifted_difference_gram(3, 3, root.child(0, i)), m, root.child(1, i))
                  for i in range(reps)]
        plain = [estimate_orthant(gaussian_simplex(3, root.child(2, i)).vertex_gram(0), m, root.child(3, i))
                 for i in range(reps)]
        a, b = np.array([e.value for e in lifted]), np.array([e.value for e in plain])
        se = math.sqrt(a.var(ddof=1) / reps + b.var(ddof=1) / reps)
        assert abs(a.mean() - b.mean()) <= 4 * se

    def test_rejects_small_n(self):
        with pytest.raises(ValueError):
            lifted_difference_gram(3, 2, RandomStream(0))


class TestFamilies:
    @pytest.mark.parametrize("d", [3, 4])
    def test_t_zero(self, d):
        corner = np.vstack([np.zeros(d), np.eye(d)])
        assert np.array_equal(family_s1(d, 0.0).vertices, corner)
        assert np.array_equal(family_s2(d, 0.0).vertices, corner)

    def test_s1_half(self):
        assert np.array_equal(family_s1(3, 0.5).vertices[3], [0.5, 0.5, 0.5])

    def test_s2_centroid_shift(self):
        v = family_s2(3, 0.3).vertices
        assert np.allclose(v[1], [1 - 0.1, -0.1, -0.1])

    @pytest.mark.parametrize("t", [-0.1, 1.0, 1.5])
    def test_bad_t(self, t):
        with pytest.raises(ValueError):
            family_s1(3, t)
        with pytest.raises(ValueError):
            family_s2(3, t)

    def test_bad_dim(self):
        with pytest.raises(ValueError):
            family_s1(2, 0.5)

    def test_limits(self):
        s1 = angle_sum_exact(family_s1(3, 0.99))
        s2 = angle_sum_exact(family_s2(3, 0.99))
        assert s1 < 0.05 < s2 and s2 > 0.40 and s2 < 0.5


class TestFacetNormals:
    def test_corner_triangle(self):
        u = facet_normals(Simplex([[0, 0], [1, 0], [0, 1]]))
        assert np.allclose(u, [[-1 / math.sqrt(2), -1 / math.sqrt(2)], [1, 0], [0, 1]], atol=1e-15)

    @pytest.mark.parametrize("d", [2, 3, 5])
    def test_orthogonal_to_facets(self, d):
        s = gaussian_simplex(d, RandomStream(13 + d))
        u = facet_normals(s)
        x = s.vertices
        for k in range(d + 1):
            facet = np.delete(x, k, axis=0)
            assert np.max(np.abs((facet[1:] - facet[0]) @ u[k])) <= 1e-10
            # the simplex lies on the positive side
            assert u[k] @ (x[k] - facet[0]) > 0
            assert np.linalg.matrix_rank(np.delete(u, k, axis=0)) == d

    def test_regular_chart(self):
        s = regular_simplex_chart(4)
        u = facet_normals(s)
        assert np.allclose(np.linalg.norm(u, axis=1), 1.0)

    def test_needs_full_dimension(self):
        with pytest.raises(ValueError):
            facet_normals(regular_simplex(3))


class TestRegionCensus:
    @pytest.mark.parametrize("d,count", [(2, 6), (3, 14), (4, 30), (5, 62)])
    def test_counts(self, d, count):
        s = gaussian_simplex(d, RandomStream(20 + d))
        census = region_census(s, 200, RandomStream(30 + d))
        assert census.count == count and census.complete
        assert census.frequency_sum_exact()
        q = d + 1
        assert "+" * q not in census.counts and "-" * q not in census.counts
        for p in census.internal_patterns() + census.negated_internal_patterns():
            assert p in census.counts

    def test_certificates_realise_patterns(self):
        s = gaussian_simplex(3, RandomStream(40))
        census = region_census(s, 100, RandomStream(41))
        u = facet_normals(s)
        for p, z in census.certificates.items():
            signs = "".join("+" if v > 0 else "-" for v in u @ np.array(z))
            assert signs == p

    def test_internal_patterns_are_vertex_cones(self):
        s = regular_simplex_chart(3)
        census = region_census(s, 10**4, RandomStream(42), estimate_angles=True)
        for k, p in enumerate(census.internal_patterns()):
            assert p.count("-") == 1 and p[k] == "-"
            assert within(census.region_angles[p], REGULAR_ANGLE_3D)
        assert math.fsum(e.value for e in census.region_angles.values()) == pytest.approx(1.0, abs=1e-12)

    @pytest.mark.parametrize("d", [2, 3, 4])
    def test_gamma_matches_angle_sum(self, d):
        s = gaussian_simplex(d, RandomStream(50 + d))
        census = region_census(s, 10**4, RandomStream(60 + d))
        g = angle_sum(s, 10**5, RandomStream(70 + d))
        assert compare(census.gamma(), g).passed
        assert compare(census.gamma(use_negations=False), g).passed
        if d >= 3:
            assert census.gamma().value < 0.5

    def test_triangle_gamma_exact_half(self):
        census = region_census(gaussian_simplex(2, RandomStream(80)), 1000, RandomStream(81))
        # only single-sign patterns exist for d = 2
        assert census.gamma().value == 0.5


@pytest.mark.parametrize("d", [3, 4])
def test_bounds_random_simplices(d):
    root = RandomStream(90 + d)
    for i in range(100):
        g = angle_sum(gaussian_simplex(d, root.child(0, i)), 10**4, root.child(1, i))
        assert 0 < g.value < 0.5 + 4 * g.std_error
