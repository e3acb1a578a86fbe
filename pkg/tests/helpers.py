"""Shared fixtures-by-import: named supports, random tables and independent oracles."""

from itertools import combinations

import numpy as np
from scipy.optimize import linprog
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from depcore import ProbTable, SupportPattern

FULL_3 = np.ones((3, 3), dtype=bool)
# {(0,0)} and the block {1,2} x {1,2}
BLOCK_37 = np.array([[1, 0, 0], [0, 1, 1], [0, 1, 1]], dtype=bool)
ZERO_DIAG_39 = ~np.eye(3, dtype=bool)
DIAG_41 = np.eye(3, dtype=bool)


def pattern(mask) -> SupportPattern:
    return SupportPattern(np.asarray(mask, dtype=bool))


def random_mask(rng, R, S, density=0.6):
    """Random support with no empty row or column."""
    while True:
        m = rng.random((R, S)) < density
        if m.any(axis=1).all() and m.any(axis=0).all():
            return m


def random_table(rng, mask, low=0.05):
    mask = np.asarray(mask, dtype=bool)
    w = np.where(mask, rng.uniform(low, 1.0, mask.shape), 0.0)
    return ProbTable.from_weights(w)


def random_full(rng, R, S, low=0.05):
    return random_table(rng, np.ones((R, S), dtype=bool), low)


def random_scaling(rng, R, S, spread=1.0):
    return np.exp(rng.normal(0, spread, R)), np.exp(rng.normal(0, spread, S))


def components_dim(mask) -> int:
    """Zero-margin dimension from graph structure: n_cells - (R + S) + #components."""
    mask = np.asarray(mask, dtype=bool)
    R, S = mask.shape
    adj = np.zeros((R + S, R + S), dtype=bool)
    adj[:R, R:] = mask
    n_comp, _ = connected_components(csr_matrix(adj), directed=False)
    return int(mask.sum()) - (R + S) + n_comp


def brute_force_rectangles(mask):
    """Maximal all-zero rectangles by enumerating every row subset."""
    zero = ~np.asarray(mask, dtype=bool)
    R, S = zero.shape
    found = set()
    for k in range(1, R + 1):
        for rows in combinations(range(R), k):
            cols = frozenset(np.flatnonzero(zero[list(rows)].all(axis=0)).tolist())
            if not cols:
                continue
            closed = frozenset(x for x in range(R) if all(zero[x, y] for y in cols))
            if closed == frozenset(rows):
                found.add((tuple(sorted(closed)), tuple(sorted(cols))))
    return sorted(found)


def lp_feasibility(mask, r, c):
    """Largest uniform lower bound t on support cells over tables with margins r, c.

    Returns None if no table with these margins lives on the support,
    otherwise the optimal t (positive iff the exact support is attainable).
    """
    mask = np.asarray(mask, dtype=bool)
    R, S = mask.shape
    idx = np.argwhere(mask)
    n = len(idx)
    A_eq = np.zeros((R + S, n + 1))
    for k, (i, j) in enumerate(idx):
        A_eq[i, k] = 1
        A_eq[R + j, k] = 1
    b_eq = np.concatenate([r, c])
    # p_k - t >= 0
    A_ub = np.hstack([-np.eye(n), np.ones((n, 1))])
    res = linprog(
        np.r_[np.zeros(n), -1.0], A_ub=A_ub, b_ub=np.zeros(n), A_eq=A_eq, b_eq=b_eq,
        bounds=[(0, None)] * n + [(0, 1)], method="highs",
    )
    return None if res.status != 0 else -res.fun


def brute_kendall(p):
    """Kendall's tau by summing over all ordered pairs of cells."""
    p = np.asarray(p)
    R, S = p.shape
    tau = 0.0
    for i1 in range(R):
        for j1 in range(S):
            for i2 in range(R):
                for j2 in range(S):
                    tau += p[i1, j1] * p[i2, j2] * np.sign((i1 - i2) * (j1 - j2))
    return tau


def brute_spearman(p):
    """3 (P(conc) - P(disc)) with the third copy drawn independently from the column margin."""
    p = np.asarray(p)
    px, py = p.sum(axis=1), p.sum(axis=0)
    R, S = p.shape
    acc = 0.0
    for i1 in range(R):
        for j1 in range(S):
            for i2 in range(R):
                for j3 in range(S):
                    acc += p[i1, j1] * px[i2] * py[j3] * np.sign((i1 - i2) * (j1 - j3))
    return 3 * acc
