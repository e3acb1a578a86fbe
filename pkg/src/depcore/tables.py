"""Finite bivariate distributions and the operations that leave their dependence alone.

A :class:`ProbTable` is an ``R x S`` matrix of probabilities. Cells holding
exactly ``0.0`` are structural zeros; the positive cells form the joint
support, carried around as a :class:`SupportPattern`.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

SUM_TOL = 1e-12


class TableError(ValueError):
    """Raised for malformed tables, margins or scaling vectors."""


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class SupportPattern:
    """Boolean ``R x S`` mask of the joint support.

    Every row and every column must contain at least one cell.
    """

    mask: np.ndarray

    def __post_init__(self):
        mask = np.asarray(self.mask, dtype=bool)
        if mask.ndim != 2:
            raise TableError("support mask must be two-dimensional")
        if not mask.any(axis=1).all() or not mask.any(axis=0).all():
            raise TableError("support has an empty row or column")
        object.__setattr__(self, "mask", _frozen(mask))

    @property
    def shape(self) -> tuple[int, int]:
        return self.mask.shape

    @property
    def n_cells(self) -> int:
        return int(self.mask.sum())

    @property
    def is_full(self) -> bool:
        return bool(self.mask.all())

    def transpose(self) -> SupportPattern:
        return SupportPattern(self.mask.T)

    def __eq__(self, other):
        if not isinstance(other, SupportPattern):
            return NotImplemented
        return self.shape == other.shape and bool(np.array_equal(self.mask, other.mask))

    def __hash__(self):
        return hash((self.shape, self.mask.tobytes()))

    def __repr__(self):
        rows = ["".join("x" if c else "." for c in r) for r in self.mask]
        return f"SupportPattern({'/'.join(rows)})"


def _check_margin(v, n: int, what: str) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    if v.ndim != 1 or v.size != n:
        raise TableError(f"{what} has length {v.size}, expected {n}")
    if not np.all(np.isfinite(v)) or np.any(v <= 0):
        raise TableError(f"{what} must be strictly positive")
    if abs(v.sum() - 1.0) > SUM_TOL:
        raise TableError(f"{what} sums to {v.sum()!r}, not 1")
    return v


@dataclass(frozen=True, eq=False)
class MarginPair:
    """Strictly positive row and column margins, each summing to one."""

    row_margin: np.ndarray
    col_margin: np.ndarray

    def __post_init__(self):
        r = np.asarray(self.row_margin, dtype=float)
        c = np.asarray(self.col_margin, dtype=float)
        object.__setattr__(self, "row_margin", _frozen(_check_margin(r, r.size, "row margin")))
        object.__setattr__(self, "col_margin", _frozen(_check_margin(c, c.size, "column margin")))

    @property
    def shape(self) -> tuple[int, int]:
        return self.row_margin.size, self.col_margin.size


@dataclass(frozen=True, eq=False)
class ProbTable:
    """Bivariate probability table with explicit structural zeros.

    Parameters
    ----------
    probs : array_like
        ``R x S`` nonnegative matrix summing to one within ``1e-12``.
        Use :meth:`from_weights` to normalize counts or unnormalized weights.

    Notes
    -----
    All-zero rows or columns are rejected rather than trimmed; the caller
    decides what the canonical index sets are.
    """

    probs: np.ndarray
    support: SupportPattern = field(init=False, repr=False)

    def __post_init__(self):
        p = np.asarray(self.probs, dtype=float)
        if p.ndim != 2:
            raise TableError("table must be two-dimensional")
        if p.shape[0] < 2 or p.shape[1] < 2:
            raise TableError(f"table shape {p.shape} needs at least 2 rows and 2 columns")
        if not np.all(np.isfinite(p)):
            raise TableError("table has non-finite entries")
        if np.any(p < 0):
            raise TableError("table has negative entries")
        total = p.sum()
        if abs(total - 1.0) > SUM_TOL:
            raise TableError(f"table sums to {total!r}, not 1")
        object.__setattr__(self, "probs", _frozen(p))
        object.__setattr__(self, "support", SupportPattern(p > 0))

    @classmethod
    def from_weights(cls, weights) -> ProbTable:
        """Build a table by dividing nonnegative weights by their exact sum."""
        w = np.asarray(weights, dtype=float)
        if w.ndim != 2:
            raise TableError("table must be two-dimensional")
        if not np.all(np.isfinite(w)) or np.any(w < 0):
            raise TableError("weights must be finite and nonnegative")
        total = w.sum()
        if total <= 0:
            raise TableError("weights sum to zero")
        return cls(w / total)

    @property
    def shape(self) -> tuple[int, int]:
        return self.probs.shape

    def transpose(self) -> ProbTable:
        return ProbTable(self.probs.T)

    def __eq__(self, other):
        if not isinstance(other, ProbTable):
            return NotImplemented
        return bool(np.array_equal(self.probs, other.probs))

    def __hash__(self):
        return hash((self.shape, self.probs.tobytes()))


def margins(t: ProbTable) -> MarginPair:
    """Row and column sums of ``t``."""
    return MarginPair(t.probs.sum(axis=1), t.probs.sum(axis=0))


def conditional_rows(t: ProbTable) -> np.ndarray:
    """Conditional distribution of the column variable given each row.

    Row ``x`` of the result is ``t[x, :] / t[x, :].sum()``.
    """
    p = t.probs
    return p / p.sum(axis=1, keepdims=True)


def conditional_cols(t: ProbTable) -> np.ndarray:
    """Conditional distribution of the row variable given each column."""
    p = t.probs
    return p / p.sum(axis=0, keepdims=True)


def marginal_replace_rows(t: ProbTable, new_row_margin) -> ProbTable:
    """Swap in a new row margin, keeping the row conditionals as a Markov kernel.

    The result has exactly the requested row margin and the same row
    conditionals and support as ``t``.
    """
    m = _check_margin(new_row_margin, t.shape[0], "new row margin")
    return ProbTable.from_weights(conditional_rows(t) * m[:, None])


def marginal_replace_cols(t: ProbTable, new_col_margin) -> ProbTable:
    """Column counterpart of :func:`marginal_replace_rows`."""
    m = _check_margin(new_col_margin, t.shape[1], "new column margin")
    return ProbTable.from_weights(conditional_cols(t) * m[None, :])


def group_transform(t: ProbTable, a, b) -> ProbTable:
    """Rescale ``t`` to ``t[x, y] * a[x] * b[y]``, renormalized.

    This is the group action under which dependence is invariant; the support
    never changes.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    R, S = t.shape
    if a.shape != (R,) or b.shape != (S,):
        raise TableError(f"scaling vectors must have shapes ({R},) and ({S},)")
    if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
        raise TableError("scaling vectors must be finite")
    if np.any(a <= 0) or np.any(b <= 0):
        raise TableError("scaling vectors must be strictly positive")
    return ProbTable.from_weights(t.probs * np.outer(a, b))


def _check_perm(perm, n: int, what: str) -> np.ndarray:
    perm = np.asarray(perm)
    if perm.shape != (n,) or not np.array_equal(np.sort(perm), np.arange(n)):
        raise TableError(f"{what} is not a permutation of 0..{n - 1}")
    return perm


def permute(t: ProbTable, row_perm, col_perm) -> ProbTable:
    """Relabel rows and columns: ``result[i, j] = t[row_perm[i], col_perm[j]]``."""
    R, S = t.shape
    rp = _check_perm(row_perm, R, "row_perm")
    cp = _check_perm(col_perm, S, "col_perm")
    return ProbTable(t.probs[np.ix_(rp, cp)])
