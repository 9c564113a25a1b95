# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""One-sided Jacobi column orthogonalization, compiled hot loop.

Rotates column pairs of ``a`` (p x q, p >= q expected but not required) until
every pair is relatively orthogonal, accumulating the rotations in ``v``
(q x q, caller passes the identity). On return the columns of ``a`` are the
scaled left singular vectors and ``v`` holds the right singular vectors.
"""

from libc.math cimport fabs, sqrt


def jacobi_orthogonalize(double[:, ::1] a, double[:, ::1] v,
                         double tol, int max_sweeps):
    """Run cyclic sweeps in place; return the sweep count, or -1 if the
    relative off-diagonal mass never fell below ``tol``."""
    cdef Py_ssize_t p = a.shape[0]
    cdef Py_ssize_t q = a.shape[1]
    cdef Py_ssize_t i, j, k, sweep
    cdef double aa, bb, ab, zeta, t, cs, sn, tmp
    cdef bint rotated

    if q < 2:
        return 0

    for sweep in range(max_sweeps):
        rotated = False
        for i in range(q - 1):
            for j in range(i + 1, q):
                aa = 0.0
                bb = 0.0
                ab = 0.0
                for k in range(p):
                    aa += a[k, i] * a[k, i]
                    bb += a[k, j] * a[k, j]
                    ab += a[k, i] * a[k, j]
                if aa == 0.0 or bb == 0.0:
                    continue
                # a column this far below its partner is rotation residue;
                # flush it to exact zero or the pair can cycle forever
                if bb <= 1e-28 * aa:
                    for k in range(p):
                        a[k, j] = 0.0
                    continue
                if aa <= 1e-28 * bb:
                    for k in range(p):
                        a[k, i] = 0.0
                    continue
                if fabs(ab) <= tol * sqrt(aa * bb):
                    continue
                rotated = True
                zeta = (bb - aa) / (2.0 * ab)
                if zeta >= 0.0:
                    t = 1.0 / (zeta + sqrt(1.0 + zeta * zeta))
                else:
                    t = -1.0 / (-zeta + sqrt(1.0 + zeta * zeta))
                cs = 1.0 / sqrt(1.0 + t * t)
                sn = cs * t
                for k in range(p):
                    tmp = a[k, i]
                    a[k, i] = cs * tmp - sn * a[k, j]
                    a[k, j] = sn * tmp + cs * a[k, j]
                for k in range(q):
                    tmp = v[k, i]
                    v[k, i] = cs * tmp - sn * v[k, j]
                    v[k, j] = sn * tmp + cs * v[k, j]
        if not rotated:
            return sweep + 1
    return -1
