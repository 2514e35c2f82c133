"""Per-trial Monte Carlo kernels.

Every kernel consumes pre-drawn samples, so both backends see identical
random input and differ only in floating-point evaluation order. Verdicts can
disagree only for samples within ~1e-10 of a boundary, a measure-zero event.
"""
import numpy as np

from ._backend import jit_or

HIT, MISS, SINGULAR = 1, 0, -1
PIVOT_RTOL = 1e-12


def _hull_status_numpy(points, tol):
    n, r, k = points.shape
    m = np.empty((n, k, k))
    m[:, :r, :] = points
    m[:, r, :] = 1.0
    status = np.full(n, SINGULAR, dtype=np.int8)
    if n == 0:
        return status
    scale = np.prod(np.linalg.norm(m, axis=2), axis=1)
    ok = np.abs(np.linalg.det(m)) > PIVOT_RTOL * scale
    rhs = np.zeros((int(ok.sum()), k, 1))
    rhs[:, r, 0] = 1.0
    lam = np.linalg.solve(m[ok], rhs)[:, :, 0]
    status[ok] = np.where(np.all(lam >= -tol, axis=1), HIT, MISS)
    return status


@jit_or(_hull_status_numpy)
def hull_status(points, tol):
    """Classify whether the origin lies in the convex hull of ``r + 1``
    points in R^r, one trial per leading index.

    ``points`` has shape ``(n, r, r + 1)`` with the points as columns. The
    barycentric system ``[points; 1...1] lam = e_last`` is solved by Gaussian
    elimination with partial pivoting; the trial is a HIT when every
    ``lam >= -tol``. Trials whose determinant is below ``1e-12`` times the
    Hadamard bound are flagged SINGULAR.
    """
    n, r, k = points.shape
    status = np.empty(n, dtype=np.int8)
    m = np.empty((k, k))
    lam = np.empty(k)
    for t in range(n):
        for i in range(r):
            for j in range(k):
                m[i, j] = points[t, i, j]
        for j in range(k):
            m[r, j] = 1.0
            lam[j] = 0.0
        lam[r] = 1.0
        scale = 1.0
        for i in range(k):
            s = 0.0
            for j in range(k):
                s += m[i, j] * m[i, j]
            scale *= np.sqrt(s)
        det = 1.0
        for c in range(k):
            p = c
            best = abs(m[c, c])
            for i in range(c + 1, k):
                if abs(m[i, c]) > best:
                    best = abs(m[i, c])
                    p = i
            if p != c:
                for j in range(k):
                    tmp = m[c, j]
                    m[c, j] = m[p, j]
                    m[p, j] = tmp
                tmp = lam[c]
                lam[c] = lam[p]
                lam[p] = tmp
            det *= m[c, c]
            if m[c, c] == 0.0:
                break
            for i in range(c + 1, k):
                f = m[i, c] / m[c, c]
                if f != 0.0:
                    for j in range(c, k):
                        m[i, j] -= f * m[c, j]
                    lam[i] -= f * lam[c]
        if not abs(det) > PIVOT_RTOL * scale:
            status[t] = SINGULAR
            continue
        hit = True
        for c in range(k - 1, -1, -1):
            s = lam[c]
            for j in range(c + 1, k):
                s -= m[c, j] * lam[j]
            lam[c] = s / m[c, c]
            if lam[c] < -tol:
                hit = False
        status[t] = HIT if hit else MISS
    return status


def _count_nonnegative_images_numpy(samples, mat, tol):
    if samples.shape[0] == 0:
        return 0
    return int(np.count_nonzero(np.all(samples @ mat.T >= -tol, axis=1)))


@jit_or(_count_nonnegative_images_numpy)
def count_nonnegative_images(samples, mat, tol):
    """Number of rows ``z`` of ``samples`` with ``mat @ z >= -tol`` entrywise."""
    n, d = samples.shape
    q = mat.shape[0]
    count = 0
    for t in range(n):
        inside = True
        for i in range(q):
            s = 0.0
            for j in range(d):
                s += mat[i, j] * samples[t, j]
            if s < -tol:
                inside = False
                break
        if inside:
            count += 1
    return count


def _sign_codes_numpy(samples, normals, rtol):
    proj = samples @ normals.T
    bound = rtol * np.linalg.norm(samples, axis=1)[:, None] * np.linalg.norm(normals, axis=1)[None, :]
    weights = np.left_shift(np.int64(1), np.arange(normals.shape[0], dtype=np.int64))
    codes = (proj > 0).astype(np.int64) @ weights
    codes[np.any(np.abs(proj) <= bound, axis=1)] = -1
    return codes


@jit_or(_sign_codes_numpy)
def sign_codes(samples, normals, rtol):
    """Encode the sign pattern of ``normals @ z`` for each sample row.

    Bit ``i`` of the code is set when ``<normals[i], z> > 0``. A sample that
    lies within ``rtol * |z| * |normals[i]|`` of any hyperplane gets code -1.
    """
    n, d = samples.shape
    q = normals.shape[0]
    codes = np.empty(n, dtype=np.int64)
    nnorm = np.empty(q)
    for i in range(q):
        s = 0.0
        for j in range(d):
            s += normals[i, j] * normals[i, j]
        nnorm[i] = np.sqrt(s)
    for t in range(n):
        zn = 0.0
        for j in range(d):
            zn += samples[t, j] * samples[t, j]
        zn = np.sqrt(zn)
        code = 0
        for i in range(q):
            s = 0.0
            for j in range(d):
                s += normals[i, j] * samples[t, j]
            if abs(s) <= rtol * zn * nnorm[i]:
                code = -1
                break
            if s > 0.0:
                code |= 1 << i
        codes[t] = code
    return codes
