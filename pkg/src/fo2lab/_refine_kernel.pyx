# cython: boundscheck=False, wraparound=False, cdivision=True
# distutils: language = c++
"""Compiled refinement round; same contract as ``fo2lab._refine_py``."""

import numpy as np
cimport numpy as cnp
from libcpp.map cimport map as cmap
from libcpp.vector cimport vector
from libcpp.algorithm cimport sort as csort, unique as cunique
from cython.operator cimport dereference as deref

cnp.import_array()

ctypedef long long i64


def group_set_ids(colors, group_ptr, members):
    cdef const i64[::1] col = np.ascontiguousarray(colors, dtype=np.int64)
    cdef const i64[::1] ptr = np.ascontiguousarray(group_ptr, dtype=np.int64)
    cdef const i64[::1] mem = np.ascontiguousarray(members, dtype=np.int64)
    cdef Py_ssize_t ngroups = ptr.shape[0] - 1
    out_arr = np.empty(ngroups, dtype=np.int64)
    cdef i64[::1] out = out_arr
    cdef cmap[vector[i64], i64] ids
    cdef cmap[vector[i64], i64].iterator it
    cdef vector[i64] buf
    cdef Py_ssize_t g, p
    cdef i64 nxt = 0
    with nogil:
        for g in range(ngroups):
            buf.clear()
            for p in range(ptr[g], ptr[g + 1]):
                buf.push_back(col[mem[p]])
            csort(buf.begin(), buf.end())
            buf.erase(cunique(buf.begin(), buf.end()), buf.end())
            it = ids.find(buf)
            if it == ids.end():
                ids[buf] = nxt
                out[g] = nxt
                nxt += 1
            else:
                out[g] = deref(it).second
    return out_arr


def refine_round(colors, tuple_groups, group_ptr, members):
    cdef const i64[::1] col = np.ascontiguousarray(colors, dtype=np.int64)
    cdef const i64[:, ::1] tg = np.ascontiguousarray(tuple_groups, dtype=np.int64)
    sid_arr = group_set_ids(col, group_ptr, members)
    cdef i64[::1] sid = sid_arr
    cdef Py_ssize_t ntup = col.shape[0]
    cdef Py_ssize_t k = tg.shape[1]
    out_arr = np.empty(ntup, dtype=np.int64)
    cdef i64[::1] out = out_arr
    cdef cmap[vector[i64], i64] ids
    cdef cmap[vector[i64], i64].iterator it
    cdef vector[i64] key
    cdef Py_ssize_t t, j
    cdef i64 nxt = 0
    key.resize(k + 1)
    with nogil:
        for t in range(ntup):
            key[0] = col[t]
            for j in range(k):
                key[j + 1] = sid[tg[t, j]]
            it = ids.find(key)
            if it == ids.end():
                ids[key] = nxt
                out[t] = nxt
                nxt += 1
            else:
                out[t] = deref(it).second
    return out_arr, int(nxt)


def relabel(codes):
    arr = np.asarray(codes, dtype=np.int64)
    if arr.ndim == 1:
        arr = arr[:, None]
    cdef const i64[:, ::1] rows = np.ascontiguousarray(arr)
    cdef Py_ssize_t n = rows.shape[0]
    cdef Py_ssize_t w = rows.shape[1]
    out_arr = np.empty(n, dtype=np.int64)
    cdef i64[::1] out = out_arr
    cdef cmap[vector[i64], i64] ids
    cdef cmap[vector[i64], i64].iterator it
    cdef vector[i64] key
    cdef Py_ssize_t t, j
    cdef i64 nxt = 0
    key.resize(w)
    with nogil:
        for t in range(n):
            for j in range(w):
                key[j] = rows[t, j]
            it = ids.find(key)
            if it == ids.end():
                ids[key] = nxt
                out[t] = nxt
                nxt += 1
            else:
                out[t] = deref(it).second
    return out_arr, int(nxt)
