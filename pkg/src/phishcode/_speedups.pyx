# cython: language_level=3
# cython: boundscheck=False
# cython: wraparound=False
"""Compiled unit-cost edit distance kernel."""

from cpython.mem cimport PyMem_Free, PyMem_Malloc


cpdef Py_ssize_t levenshtein(str s, str t) except -1:
    cdef Py_ssize_t m = len(s)
    cdef Py_ssize_t n = len(t)
    cdef Py_ssize_t i, j, cost, ins, dele, sub, best, diag, tmp
    cdef Py_UCS4 tc
    if m == 0:
        return n
    if n == 0:
        return m
    if s == t:
        return 0
    cdef Py_ssize_t *row = <Py_ssize_t *> PyMem_Malloc((m + 1) * sizeof(Py_ssize_t))
    if row is NULL:
        raise MemoryError()
    try:
        for j in range(m + 1):
            row[j] = j
        for i in range(1, n + 1):
            tc = t[i - 1]
            diag = row[0]
            row[0] = i
            for j in range(1, m + 1):
                tmp = row[j]
                cost = 0 if s[j - 1] == tc else 1
                sub = diag + cost
                ins = row[j - 1] + 1
                dele = tmp + 1
                best = sub
                if ins < best:
                    best = ins
                if dele < best:
                    best = dele
                row[j] = best
                diag = tmp
        return row[m]
    finally:
        PyMem_Free(row)
