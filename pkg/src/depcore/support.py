"""Quantities fixed by the support pattern alone.

The zero-margin space of a support is the set of real matrices vanishing off
the support whose rows and columns all sum to zero. Its dimension counts the
free dependence parameters left once the support is known.
"""

from __future__ import annotations

import enum
import functools
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .tables import MarginPair, SupportPattern, TableError

FEAS_TOL = 1e-12


def _cells(s: SupportPattern) -> list[tuple[int, int]]:
    return [tuple(map(int, c)) for c in np.argwhere(s.mask)]


def _constraint_rows(s: SupportPattern) -> list[list[Fraction]]:
    """Row-sum and column-sum equations over the support cells, as 0/1 rows."""
    R, S = s.shape
    cells = _cells(s)
    eqs = []
    for x in range(R):
        eqs.append([Fraction(int(cx == x)) for cx, _ in cells])
    for y in range(S):
        eqs.append([Fraction(int(cy == y)) for _, cy in cells])
    return eqs


def _rref(rows: list[list[Fraction]], ncols: int) -> tuple[list[list[Fraction]], list[int]]:
    m = [r[:] for r in rows]
    pivots = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        lead = m[r][c]
        m[r] = [v / lead for v in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [vi - f * vr for vi, vr in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m[:r], pivots


def _exact_nullspace(s: SupportPattern) -> list[list[Fraction]]:
    """Nullspace of the margin constraints, one vector per free cell.

    Free cells are taken in row-major order, so the output is deterministic.
    """
    n = s.n_cells
    rref, pivots = _rref(_constraint_rows(s), n)
    free = [c for c in range(n) if c not in set(pivots)]
    vectors = []
    for f in free:
        v = [Fraction(0)] * n
        v[f] = Fraction(1)
        for row, p in zip(rref, pivots):
            v[p] = -row[f]
        vectors.append(v)
    return vectors


def _integer_rank(rows: list[list[int]]) -> int:
    """Exact rank of an integer matrix by fraction-free elimination."""
    m = [r[:] for r in rows if any(r)]
    rank = 0
    ncols = len(m[0]) if m else 0
    for c in range(ncols):
        piv = next((i for i in range(rank, len(m)) if m[i][c]), None)
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        pr = m[rank]
        for i in range(rank + 1, len(m)):
            f = m[i][c]
            if f:
                row = [pr[c] * a - f * b for a, b in zip(m[i], pr)]
                g = math.gcd(*row)
                m[i] = [v // g for v in row] if g > 1 else row
        rank += 1
    return rank


@functools.lru_cache(maxsize=512)
def dim_gamma(s: SupportPattern) -> int:
    """Dimension of the zero-margin space on ``s``.

    Computed as ``n_cells - rank`` of the 0/1 margin-constraint system, with
    the rank taken in exact integer arithmetic.
    """
    R, S = s.shape
    cells = _cells(s)
    rows = [[int(cx == x) for cx, _ in cells] for x in range(R)]
    rows += [[int(cy == y) for _, cy in cells] for y in range(S)]
    return s.n_cells - _integer_rank(rows)


@dataclass(frozen=True, eq=False)
class DependenceBasis:
    """Orthonormal basis (Frobenius inner product) of the zero-margin space."""

    support: SupportPattern
    elements: tuple[np.ndarray, ...]

    @property
    def dim(self) -> int:
        return len(self.elements)

    def stacked(self) -> np.ndarray:
        """Elements as a ``(dim, R, S)`` array."""
        R, S = self.support.shape
        if not self.elements:
            return np.zeros((0, R, S))
        return np.stack(self.elements)


def _gram_schmidt(vectors: np.ndarray) -> np.ndarray:
    # modified Gram-Schmidt, then a second pass to restore orthogonality
    q = []
    for v in vectors:
        w = v.astype(float).copy()
        for _ in range(2):
            for u in q:
                w -= (u @ w) * u
        q.append(w / np.linalg.norm(w))
    return np.array(q)


@functools.lru_cache(maxsize=512)
def gamma_basis(s: SupportPattern) -> DependenceBasis:
    """Deterministic orthonormal basis of the zero-margin space on ``s``.

    Exact nullspace vectors (one per free cell, row-major) are
    orthonormalized in floating point. Empty when the space is ``{0}``.
    Results are cached per support pattern.
    """
    R, S = s.shape
    null = _exact_nullspace(s)
    if not null:
        return DependenceBasis(s, ())
    q = _gram_schmidt(np.array([[float(v) for v in vec] for vec in null]))
    idx = np.argwhere(s.mask)
    elements = []
    for row in q:
        E = np.zeros((R, S))
        E[idx[:, 0], idx[:, 1]] = row
        E.setflags(write=False)
        elements.append(E)
    return DependenceBasis(s, tuple(elements))


@dataclass(frozen=True)
class ZeroRectangle:
    """A maximal block ``rows x cols`` lying entirely outside the support."""

    rows: frozenset[int]
    cols: frozenset[int]

    def sorted(self) -> tuple[tuple[int, ...], tuple[int, ...]]:
        return tuple(sorted(self.rows)), tuple(sorted(self.cols))


def maximal_zero_rectangles(s: SupportPattern) -> list[ZeroRectangle]:
    """All maximal rectangles of non-support cells.

    These are the maximal bicliques of the bipartite graph joining row ``x``
    to column ``y`` whenever ``(x, y)`` is a structural zero. Every closed
    column set is an intersection of row zero-sets, so the bicliques are found
    by closing the family of row zero-sets under intersection. The number of
    maximal bicliques, and hence the running time, is exponential in the worst
    case; desk-sized tables (R, S up to ~15) are fine.
    """
    zero = ~s.mask
    R, S = s.shape
    row_sets = [frozenset(np.flatnonzero(zero[x]).tolist()) for x in range(R)]
    closed: set[frozenset[int]] = set()
    for zs in row_sets:
        if not zs:
            continue
        new = {zs}
        for b in closed:
            inter = b & zs
            if inter:
                new.add(inter)
        closed |= new
    out = []
    for b in closed:
        rows = frozenset(x for x in range(R) if b <= row_sets[x])
        out.append(ZeroRectangle(rows, b))
    out.sort(key=lambda r: r.sorted())
    return out


class Verdict(str, enum.Enum):
    FEASIBLE = "Feasible"
    FEASIBLE_ON_SMALLER_SUPPORT = "FeasibleOnSmallerSupport"
    INFEASIBLE = "Infeasible"


@dataclass(frozen=True)
class FeasibilityReport:
    verdict: Verdict
    violations: tuple[ZeroRectangle, ...] = field(default=())
    tight: tuple[ZeroRectangle, ...] = field(default=())

    @property
    def feasible(self) -> bool:
        return self.verdict is not Verdict.INFEASIBLE


def frechet_feasible(s: SupportPattern, target: MarginPair, tol: float = FEAS_TOL) -> FeasibilityReport:
    """Can the target margins be carried by a table with exactly support ``s``?

    A zero rectangle ``A x B`` with ``row(A) + col(B) > 1`` makes the target
    infeasible. If some rectangle hits ``1`` exactly while its complement
    block still meets the support, tables with the target margins exist but
    only on a strictly smaller support.

    Only maximal rectangles are inspected: with strictly positive margins,
    enlarging a rectangle strictly increases ``row(A) + col(B)``, so a tight
    non-maximal rectangle would push its maximal superset above 1.
    """
    if target.shape != s.shape:
        raise TableError(f"margins have shape {target.shape}, support has {s.shape}")
    r, c = target.row_margin, target.col_margin
    violations, tight = [], []
    for rect in maximal_zero_rectangles(s):
        rows, cols = rect.sorted()
        total = r[list(rows)].sum() + c[list(cols)].sum()
        if total > 1 + tol:
            violations.append(rect)
        elif total >= 1 - tol:
            comp_r = [x for x in range(s.shape[0]) if x not in rect.rows]
            comp_c = [y for y in range(s.shape[1]) if y not in rect.cols]
            if s.mask[np.ix_(comp_r, comp_c)].any():
                tight.append(rect)
    if violations:
        verdict = Verdict.INFEASIBLE
    elif tight:
        verdict = Verdict.FEASIBLE_ON_SMALLER_SUPPORT
    else:
        verdict = Verdict.FEASIBLE
    return FeasibilityReport(verdict, tuple(violations), tuple(tight))
