"""numpy implementations of the kernels in ``_ckernels.pyx``.

Used when the compiled extension is unavailable or when
``HOLOQ_PURE_PYTHON=1`` is set.
"""

import numpy as np


def partial_trace(rho, n, keep):
    keep = list(keep)
    traced = [q for q in range(n) if q not in set(keep)]
    m = len(keep)
    t = rho.reshape([2] * (2 * n))
    order = keep + traced + [n + q for q in keep] + [n + q for q in traced]
    t = t.transpose(order).reshape(2**m, 2 ** (n - m), 2**m, 2 ** (n - m))
    return np.ascontiguousarray(np.einsum("ajbj->ab", t))


def apply_local(rho, n, start, kraus):
    dm = kraus.shape[1]
    m = dm.bit_length() - 1
    left = 2**start
    right = 2 ** (n - start - m)
    t = rho.reshape(left, dm, right, left, dm, right)
    out = np.zeros_like(t)
    for k in kraus:
        out += np.einsum("su,lurLUR,SU->lsrLSR", k, t, k.conj(), optimize=True)
    return out.reshape(rho.shape)
