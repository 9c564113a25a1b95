"""Pure-Python twin of the compiled Jacobi kernel.

Same contract as ``macomss._jacobi.jacobi_orthogonalize``; used when the
extension is unavailable or ``MACOMSS_PURE_PYTHON`` is set. Column operations
are vectorized, the pair loop is not, so this is the slow path.
"""

import math

import numpy as np


def jacobi_orthogonalize(a: np.ndarray, v: np.ndarray,
                         tol: float, max_sweeps: int) -> int:
    p, q = a.shape
    if q < 2:
        return 0
    for sweep in range(max_sweeps):
        rotated = False
        for i in range(q - 1):
            ci = a[:, i]
            for j in range(i + 1, q):
                cj = a[:, j]
                aa = ci @ ci
                bb = cj @ cj
                if aa == 0.0 or bb == 0.0:
                    continue
                # a column this far below its partner is rotation residue;
                # flush it to exact zero or the pair can cycle forever
                if bb <= 1e-28 * aa:
                    a[:, j] = 0.0
                    continue
                if aa <= 1e-28 * bb:
                    a[:, i] = 0.0
                    ci = a[:, i]
                    continue
                ab = ci @ cj
                if abs(ab) <= tol * math.sqrt(aa * bb):
                    continue
                rotated = True
                zeta = (bb - aa) / (2.0 * ab)
                t = math.copysign(1.0, zeta) / (abs(zeta) + math.sqrt(1.0 + zeta * zeta))
                cs = 1.0 / math.sqrt(1.0 + t * t)
                sn = cs * t
                new_i = cs * ci - sn * cj
                a[:, j] = sn * ci + cs * cj
                a[:, i] = new_i
                ci = a[:, i]
                vi = v[:, i].copy()
                v[:, i] = cs * vi - sn * v[:, j]
                v[:, j] = sn * vi + cs * v[:, j]
        if not rotated:
            return sweep + 1
    return -1
