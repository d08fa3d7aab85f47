"""Pure-Python reference versions of the bitmask kernels."""


def vertex_cover_masks(n, edge_masks, minimal_only, cap):
    """All vertex covers of a graph on ``n`` vertices, as bitmasks in increasing order.

    Returns ``(masks, exceeded)``; enumeration stops once ``cap`` covers are found.
    """
    nbr = [0] * n
    for e in edge_masks:
        for j in range(n):
            if (e >> j) & 1:
                nbr[j] |= e & ~(1 << j)
    out = []
    for mask in range(1 << n):
        if any(mask & e == 0 for e in edge_masks):
            continue
        if minimal_only and any(
            (mask >> j) & 1 and nbr[j] & ~mask == 0 for j in range(n)
        ):
            continue
        if len(out) >= cap:
            return out, True
        out.append(mask)
    return out, False


def minimal_masks(masks):
    uniq = sorted(set(masks), key=lambda x: (bin(x).count("1"), x))
    kept = []
    for a in uniq:
        if all(b & ~a for b in kept):
            kept.append(a)
    return kept


def dominance_keep(masks):
    """Keep flag per mask: dropped iff contained in an earlier kept mask."""
    kept = []
    flags = []
    for a in masks:
        ok = all(a & ~b for b in kept)
        if ok:
            kept.append(a)
        flags.append(ok)
    return flags
