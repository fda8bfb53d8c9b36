"""Reference (numpy) implementation of one refinement round.

A round works on T tuples with current colors.  Every tuple belongs to k
"extension groups"; a group is the list of tuples obtained by replacing one
coordinate of a tuple by every element of its structure.  The new color of a
tuple is determined by its old color together with the *set* of colors in
each of its k groups.  New colors are numbered by first appearance in tuple
order.
"""

import numpy as np


def _first_appearance_labels(rows):
    _, first, inverse = np.unique(rows, axis=0, return_index=True, return_inverse=True)
    inverse = inverse.reshape(-1)
    rank = np.empty(len(first), dtype=np.int64)
    rank[np.argsort(first, kind="stable")] = np.arange(len(first), dtype=np.int64)
    return rank[inverse], len(first)


def group_set_ids(colors, group_ptr, members):
    """Id per group such that equal ids <=> equal color sets."""
    sizes = np.diff(group_ptr)
    width = int(sizes.max())
    ngroups = len(sizes)
    table = np.full((ngroups, width), -1, dtype=np.int64)
    for size in np.unique(sizes):
        gidx = np.nonzero(sizes == size)[0]
        pos = group_ptr[gidx][:, None] + np.arange(size)
        vals = np.sort(colors[members[pos]], axis=1)
        vals[:, 1:][vals[:, 1:] == vals[:, :-1]] = -1
        vals.sort(axis=1)
        table[gidx, width - size:] = vals
    _, inverse = np.unique(table, axis=0, return_inverse=True)
    return inverse.reshape(-1).astype(np.int64)


def refine_round(colors, tuple_groups, group_ptr, members):
    colors = np.asarray(colors, dtype=np.int64)
    sid = group_set_ids(colors, group_ptr, members)
    sig = np.column_stack([colors] + [sid[tuple_groups[:, j]] for j in range(tuple_groups.shape[1])])
    return _first_appearance_labels(sig)


def relabel(codes):
    """Dense labels by first appearance for an int array or a 2-D row array."""
    codes = np.asarray(codes, dtype=np.int64)
    if codes.ndim == 1:
        codes = codes[:, None]
    return _first_appearance_labels(codes)
