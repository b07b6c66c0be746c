# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled edit-distance kernel. Same contract and tie rules as ``_kernel_py``."""

from libc.stdlib cimport malloc, free


cdef int* _as_ints(seq, Py_ssize_t n) except NULL:
    cdef int* out = <int*> malloc((n if n > 0 else 1) * sizeof(int))
    if out == NULL:
        raise MemoryError()
    cdef Py_ssize_t k
    for k in range(n):
        out[k] = seq[k]
    return out


def edit_ops(ref, hyp):
    cdef Py_ssize_t n = len(ref), m = len(hyp)
    cdef Py_ssize_t w = m + 1
    cdef Py_ssize_t i, j
    cdef long long k = n + m + 1
    cdef long long d, best, up, left
    cdef int* r = _as_ints(ref, n)
    cdef int* h = _as_ints(hyp, m)
    cdef long long* t = <long long*> malloc((n + 1) * w * sizeof(long long))
    if t == NULL:
        free(r); free(h)
        raise MemoryError()
    ops = []
    try:
        for j in range(w):
            t[j] = j * k
        for i in range(1, n + 1):
            t[i * w] = i * k
            for j in range(1, w):
                if r[i - 1] == h[j - 1]:
                    best = t[(i - 1) * w + j - 1] - 1
                else:
                    best = t[(i - 1) * w + j - 1] + k
                up = t[(i - 1) * w + j] + k
                left = t[i * w + j - 1] + k
                if up < best:
                    best = up
                if left < best:
                    best = left
                t[i * w + j] = best
        i = n
        j = m
        while i > 0 or j > 0:
            d = t[i * w + j]
            if i > 0 and j > 0:
                if r[i - 1] == h[j - 1]:
                    if d == t[(i - 1) * w + j - 1] - 1:
                        ops.append(0)
                        i -= 1
                        j -= 1
                        continue
                elif d == t[(i - 1) * w + j - 1] + k:
                    ops.append(1)
                    i -= 1
                    j -= 1
                    continue
            if i > 0 and d == t[(i - 1) * w + j] + k:
                ops.append(2)
                i -= 1
            else:
                ops.append(3)
                j -= 1
    finally:
        free(r); free(h); free(t)
    ops.reverse()
    return ops


def edit_distance(ref, hyp):
    cdef Py_ssize_t n = len(ref), m = len(hyp)
    cdef Py_ssize_t i, j
    cdef int best, up, left
    cdef int* r = _as_ints(ref, n)
    cdef int* h = _as_ints(hyp, m)
    cdef int* prev = <int*> malloc((m + 1) * sizeof(int))
    cdef int* row = <int*> malloc((m + 1) * sizeof(int))
    cdef int* tmp
    try:
        for j in range(m + 1):
            prev[j] = j
        for i in range(1, n + 1):
            row[0] = i
            for j in range(1, m + 1):
                best = prev[j - 1] + (r[i - 1] != h[j - 1])
                up = prev[j] + 1
                left = row[j - 1] + 1
                if up < best:
                    best = up
                if left < best:
                    best = left
                row[j] = best
            tmp = prev
            prev = row
            row = tmp
        return prev[m]
    finally:
        free(r); free(h); free(prev); free(row)
