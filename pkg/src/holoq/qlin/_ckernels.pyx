# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels for partial trace and block-local Kraus application.

Both kernels use big-endian qubit order: qubit 0 is the most significant
bit of a basis index.
"""

import numpy as np
cimport numpy as cnp

cnp.import_array()


cdef inline Py_ssize_t _scatter(Py_ssize_t value, Py_ssize_t[:] positions,
                                int n) nogil:
    # place the bits of ``value`` (msb first) at the given qubit positions
    cdef Py_ssize_t out = 0
    cdef int m = positions.shape[0]
    cdef int b
    for b in range(m):
        if (value >> (m - 1 - b)) & 1:
            out |= (<Py_ssize_t>1) << (n - 1 - positions[b])
    return out


def partial_trace(const double complex[:, ::1] rho, int n, keep):
    """Trace out every qubit not in ``keep``; result follows ``keep`` order."""
    cdef Py_ssize_t[:] kept = np.asarray(keep, dtype=np.intp)
    cdef int m = kept.shape[0]
    kept_set = set(keep)
    traced_list = [q for q in range(n) if q not in kept_set]
    cdef Py_ssize_t[:] traced = np.asarray(traced_list, dtype=np.intp)
    cdef Py_ssize_t dk = (<Py_ssize_t>1) << m
    cdef Py_ssize_t dt = (<Py_ssize_t>1) << (n - m)
    cdef Py_ssize_t[:] kpart = np.empty(dk, dtype=np.intp)
    cdef Py_ssize_t[:] tpart = np.empty(dt, dtype=np.intp)
    cdef Py_ssize_t a, b, t, ia, ib
    cdef double complex acc
    out = np.zeros((dk, dk), dtype=np.complex128)
    cdef double complex[:, ::1] o = out
    with nogil:
        for a in range(dk):
            kpart[a] = _scatter(a, kept, n)
        for t in range(dt):
            tpart[t] = _scatter(t, traced, n)
        for a in range(dk):
            ia = kpart[a]
            for b in range(dk):
                ib = kpart[b]
                acc = 0
                for t in range(dt):
                    acc = acc + rho[ia + tpart[t], ib + tpart[t]]
                o[a, b] = acc
    return out


def apply_local(const double complex[:, ::1] rho, int n, int start,
                const double complex[:, :, ::1] kraus):
    """Return sum_k (I ⊗ K_k ⊗ I) rho (I ⊗ K_k ⊗ I)^† for a contiguous block."""
    cdef Py_ssize_t dm = kraus.shape[1]
    cdef int m = 0
    while ((<Py_ssize_t>1) << m) < dm:
        m += 1
    cdef Py_ssize_t d = (<Py_ssize_t>1) << n
    cdef Py_ssize_t right = (<Py_ssize_t>1) << (n - start - m)
    cdef Py_ssize_t nk = kraus.shape[0]
    cdef Py_ssize_t k, x, y, s, u, l, r, base, col
    cdef double complex acc
    tmp_arr = np.empty((d, d), dtype=np.complex128)
    out_arr = np.zeros((d, d), dtype=np.complex128)
    cdef double complex[:, ::1] tmp = tmp_arr
    cdef double complex[:, ::1] out = out_arr
    with nogil:
        for k in range(nk):
            # tmp = K_emb rho
            for x in range(d):
                r = x % right
                s = (x // right) % dm
                l = x // (right * dm)
                base = l * dm * right + r
                for y in range(d):
                    acc = 0
                    for u in range(dm):
                        acc = acc + kraus[k, s, u] * rho[base + u * right, y]
                    tmp[x, y] = acc
            # out += tmp K_emb^†
            for y in range(d):
                r = y % right
                s = (y // right) % dm
                l = y // (right * dm)
                base = l * dm * right + r
                for x in range(d):
                    acc = 0
                    for u in range(dm):
                        col = base + u * right
                        acc = acc + tmp[x, col] * kraus[k, s, u].conjugate()
                    out[x, y] = out[x, y] + acc
    return out_arr
