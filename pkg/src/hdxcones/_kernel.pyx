# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled brute-force sweep over all k-cochains.

Same contract as hdxcones._bruteforce.sweep; this is the hot inner loop of
the exhaustive expansion-constant search.
"""

import numpy as np

cimport numpy as cnp

BACKEND = "compiled"


def sweep(int nk, int q,
          cnp.uint8_t[:, :] add, cnp.uint8_t[:] neg,
          cnp.int32_t[:, :] cob_faces, cnp.int8_t[:, :] cob_signs,
          cnp.int64_t[:] cob_w, cnp.int64_t[:] level_w,
          cnp.int64_t[:] member_keys, cnp.uint8_t[:, :] dist_rows,
          bint collect_kernel):
    cdef long long total = 1
    cdef int i, t, idx
    for i in range(nk):
        total *= q
    cdef int n_cob = cob_faces.shape[0]
    cdef int width = cob_faces.shape[1]
    cdef int n_rows = dist_rows.shape[0]
    cdef int n_members = member_keys.shape[0]
    cdef cnp.ndarray[cnp.uint8_t, ndim=1] phi_arr = np.zeros(nk, dtype=np.uint8)
    cdef cnp.uint8_t[:] phi = phi_arr
    cdef long long key, dnorm, dist, d, best_num = -1, best_den = 1, best_key = -1
    cdef int acc, v, lo, hi, mid
    cdef bint is_member
    kernel_keys = [] if collect_kernel else None

    for key in range(total):
        dnorm = 0
        for t in range(n_cob):
            acc = 0
            for idx in range(width):
                v = phi[cob_faces[t, idx]]
                if cob_signs[t, idx] < 0:
                    v = neg[v]
                acc = add[acc, v]
            if acc != 0:
                dnorm += cob_w[t]
        if collect_kernel and dnorm == 0:
            kernel_keys.append(key)
        # binary search in member_keys
        is_member = False
        lo = 0
        hi = n_members
        while lo < hi:
            mid = (lo + hi) // 2
            if member_keys[mid] < key:
                lo = mid + 1
            else:
                hi = mid
        if lo < n_members and member_keys[lo] == key:
            is_member = True
        if not is_member:
            dist = -1
            for t in range(n_rows):
                d = 0
                for i in range(nk):
                    if phi[i] != dist_rows[t, i]:
                        d += level_w[i]
                if dist < 0 or d < dist:
                    dist = d
                    if dist == 0:
                        break
            if dist > 0:
                if best_num < 0 or dnorm * best_den < best_num * dist:
                    best_num = dnorm
                    best_den = dist
                    best_key = key
        for i in range(nk):
            if phi[i] == q - 1:
                phi[i] = 0
            else:
                phi[i] += 1
                break
    return (best_num >= 0, best_num, best_den, best_key,
            kernel_keys if kernel_keys is not None else [])
