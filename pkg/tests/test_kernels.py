import os
import subprocess
import sys

import numpy as np
import pytest
from scipy.optimize import linprog

from simplexangles import kernels
from simplexangles._backend import HAVE_NUMBA
from simplexangles.kernels import HIT, MISS, SINGULAR


def origin_in_hull_lp(points):
    """Feasibility of points @ lam = 0, sum lam = 1, lam >= 0 by linear programming."""
    r, k = points.shape
    a_eq = np.vstack([points, np.ones((1, k))])
    b_eq = np.zeros(r + 1)
    b_eq[-1] = 1.0
    res = linprog(np.zeros(k), A_eq=a_eq, b_eq=b_eq, bounds=[(0, None)] * k, method="highs")
    return res.status == 0


def implementations(name):
    fn = getattr(kernels, name)
    impls = {"dispatch": fn, "numpy": fn.numpy_impl}
    if HAVE_NUMBA:
        impls["python_loop"] = fn.py_loop
    return impls


class TestHullStatus:
    @pytest.mark.parametrize("impl", ["dispatch", "numpy", "python_loop"])
    def test_line_cases(self, impl):
        fns = implementations("hull_status")
        if impl not in fns:
            pytest.skip("numba unavailable")
        fn = fns[impl]
        pts = np.array([[[-1.0, 2.0]], [[1.0, 2.0]], [[1.0, 1.0]], [[0.0, 3.0]]])
        assert fn(pts, 1e-10).tolist() == [HIT, MISS, SINGULAR, HIT]

    def test_zero_dimensional(self):
        pts = np.ones((5, 0, 1))
        assert np.all(kernels.hull_status(pts, 1e-10) == HIT)
        assert np.all(kernels.hull_status.numpy_impl(pts, 1e-10) == HIT)

    def test_triangle_around_origin(self):
        tri = np.array([[1.0, -1.0, 0.0], [0.0, 0.0, 1.0]])
        shifted = tri + np.array([[0.0], [-2.0]])
        assert kernels.hull_status(np.stack([tri, shifted]), 1e-10).tolist() == [HIT, MISS]

    @pytest.mark.parametrize("r", [1, 2, 3, 4])
    def test_matches_linear_programming(self, rng, r):
        pts = rng.standard_normal((300, r, r + 1)) + 0.3
        status = kernels.hull_status(pts, 1e-10)
        oracle = np.array([origin_in_hull_lp(p) for p in pts])
        assert np.array_equal(status == HIT, oracle)
        assert 0 < oracle.sum() < 300

    @pytest.mark.parametrize("d", [2, 3, 5, 7])
    def test_backends_agree(self, rng, d):
        y = rng.standard_normal((20000, d - 1, d + 1))
        pts = y[:, :, 1:] - y[:, :, :1]
        a = kernels.hull_status(pts, 1e-10)
        b = kernels.hull_status.numpy_impl(pts, 1e-10)
        assert np.array_equal(a, b)


class TestCountNonnegative:
    def test_brute_force(self, rng):
        z = rng.standard_normal((5000, 4))
        mat = rng.standard_normal((4, 4))
        brute = sum(all(mat[i] @ x >= -1e-10 for i in range(4)) for x in z)
        for fn in implementations("count_nonnegative_images").values():
            assert fn(z, mat, 1e-10) == brute

    def test_empty(self):
        assert kernels.count_nonnegative_images.numpy_impl(np.empty((0, 2)), np.eye(2), 0.0) == 0
        assert kernels.count_nonnegative_images(np.empty((0, 2)), np.eye(2), 0.0) == 0


class TestSignCodes:
    def test_codes(self):
        normals = np.array([[1.0, 0.0], [0.0, 1.0], [-1.0, -1.0]])
        z = np.array([[1.0, 2.0], [-1.0, 0.5], [0.0, 1.0], [-1.0, -2.0]])
        for fn in implementations("sign_codes").values():
            assert fn(z, normals, 1e-12).tolist() == [0b011, 0b110, -1, 0b100]

    def test_backends_agree(self, rng):
        z = rng.standard_normal((20000, 5))
        normals = rng.standard_normal((6, 5))
        assert np.array_equal(kernels.sign_codes(z, normals, 1e-12),
                              kernels.sign_codes.numpy_impl(z, normals, 1e-12))


def test_environment_flag_forces_numpy():
    code = (
        "from simplexangles import _backend, kernels;"
        "print(_backend.BACKEND, kernels.hull_status is kernels.hull_status.numpy_impl)"
    )
    env = dict(os.environ, SIMPLEXANGLES_BACKEND="numpy")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.split() == ["numpy", "True"]
    env = dict(os.environ, SIMPLEXANGLES_DISABLE_NUMBA="1")
    env.pop("SIMPLEXANGLES_BACKEND", None)
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.split() == ["numpy", "True"]
