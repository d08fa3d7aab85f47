# cython: language_level=3
"""Compiled bitmask kernels. Semantics mirror ``_kernels_py`` exactly."""

from libc.stdint cimport uint64_t


def vertex_cover_masks(int n, list edge_masks, bint minimal_only, Py_ssize_t cap):
    cdef Py_ssize_t m = len(edge_masks)
    cdef Py_ssize_t i, j
    cdef uint64_t mask, total = (<uint64_t>1) << n
    cdef uint64_t e, u_bit, v_bit
    cdef bint ok, needed
    cdef uint64_t[::1] edges
    cdef uint64_t[::1] nbr
    import array
    edges_arr = array.array("Q", [0] * max(m, 1))
    nbr_arr = array.array("Q", [0] * max(n, 1))
    edges = edges_arr
    nbr = nbr_arr
    for i in range(m):
        edges[i] = <uint64_t>edge_masks[i]
    for i in range(m):
        e = edges[i]
        for j in range(n):
            if (e >> j) & 1:
                nbr[j] |= e & ~((<uint64_t>1) << j)
    out = []
    for mask in range(total):
        ok = True
        for i in range(m):
            if (mask & edges[i]) == 0:
                ok = False
                break
        if not ok:
            continue
        if minimal_only:
            # v is removable iff all its neighbours are in the cover
            needed = True
            for j in range(n):
                if (mask >> j) & 1:
                    if (nbr[j] & ~mask) == 0:
                        needed = False
                        break
            if not needed:
                continue
        if len(out) >= cap:
            return out, True
        out.append(mask)
    return out, False


def minimal_masks(list masks):
    cdef Py_ssize_t i, j, k
    cdef uint64_t a
    uniq = sorted(set(masks), key=lambda x: (bin(x).count("1"), x))
    k = len(uniq)
    cdef uint64_t[::1] buf
    import array
    arr = array.array("Q", uniq if k else [0])
    buf = arr
    kept = []
    cdef list kept_idx = []
    for i in range(k):
        a = buf[i]
        ok = True
        for j in kept_idx:
            if (buf[j] & ~a) == 0:
                ok = False
                break
        if ok:
            kept_idx.append(i)
            kept.append(uniq[i])
    return kept


def dominance_keep(list masks):
    cdef Py_ssize_t k = len(masks)
    cdef Py_ssize_t i, j, nk = 0
    cdef uint64_t a
    cdef bint ok
    import array
    arr = array.array("Q", masks if k else [0])
    kept_arr = array.array("Q", [0] * max(k, 1))
    cdef uint64_t[::1] buf = arr
    cdef uint64_t[::1] kept = kept_arr
    flags = [False] * k
    for i in range(k):
        a = buf[i]
        ok = True
        for j in range(nk):
            if (a & ~kept[j]) == 0:
                ok = False
                break
        if ok:
            kept[nk] = a
            nk += 1
            flags[i] = True
    return flags
