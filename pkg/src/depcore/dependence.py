"""The dependence signature of a table and the tests built on it.

The signature is the pair (support, Lambda0), where Lambda0 is the orthogonal
projection of the log-probability matrix onto the zero-margin space of the
support. Two tables have the same dependence exactly when their signatures
coincide; this is what :func:`same_dependence` checks.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .support import DependenceBasis, gamma_basis
from .tables import ProbTable, SupportPattern, TableError

DEFAULT_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class DependenceSignature:
    """Support pattern, projected log-table and its basis coordinates.

    Attributes
    ----------
    support : SupportPattern
    lambda_circ : ndarray
        Projection of the log-table onto the zero-margin space; zero off the
        support. Basis-independent.
    delta : ndarray
        Coordinates of ``lambda_circ`` in the basis used to build it.
    norm2 : float
        Euclidean norm of ``delta`` (equal to the Frobenius norm of
        ``lambda_circ`` for any orthonormal basis).
    """

    support: SupportPattern
    lambda_circ: np.ndarray
    delta: np.ndarray
    norm2: float

    @property
    def dim(self) -> int:
        return self.delta.size


def log_table(t: ProbTable) -> np.ndarray:
    """``log p`` on the support, ``0`` elsewhere."""
    lam = np.zeros(t.shape)
    m = t.support.mask
    lam[m] = np.log(t.probs[m])
    return lam


def additive_residual(values: np.ndarray, mask: np.ndarray) -> np.ndarray:
    """Residual of the least-squares fit ``values[x, y] ~ a[x] + b[y]`` on ``mask``.

    The residual is the projection onto the zero-margin space, obtained
    without any basis. The row effect of row 0 is pinned to zero; remaining
    rank deficiency (disconnected supports) is absorbed by ``lstsq``.
    """
    R, S = mask.shape
    idx = np.argwhere(mask)
    design = np.zeros((len(idx), R + S))
    design[np.arange(len(idx)), idx[:, 0]] = 1.0
    design[np.arange(len(idx)), R + idx[:, 1]] = 1.0
    design = design[:, 1:]
    y = values[mask]
    coef, *_ = np.linalg.lstsq(design, y, rcond=None)
    out = np.zeros((R, S))
    out[mask] = y - design @ coef
    return out


def signature(t: ProbTable, basis: DependenceBasis | None = None) -> DependenceSignature:
    """Dependence signature of ``t``.

    Parameters
    ----------
    t : ProbTable
    basis : DependenceBasis, optional
        Orthonormal basis of the zero-margin space of ``t.support``. Built with
        :func:`~depcore.support.gamma_basis` when omitted.
    """
    if basis is None:
        basis = gamma_basis(t.support)
    elif basis.support != t.support:
        raise TableError("basis was built for a different support")
    lam = log_table(t)
    E = basis.stacked()
    delta = np.einsum("kij,ij->k", E, lam)
    lambda_circ = np.einsum("k,kij->ij", delta, E) if basis.dim else np.zeros(t.shape)
    return DependenceSignature(t.support, lambda_circ, delta, float(np.linalg.norm(delta)))


def is_quasi_independent(t: ProbTable, tol: float = DEFAULT_TOL) -> bool:
    """True when ``log p`` is additive on the support, i.e. ``||delta|| <= tol``."""
    return signature(t).norm2 <= tol


def is_independent(t: ProbTable, tol: float = DEFAULT_TOL) -> bool:
    """Quasi-independence on a full (rectangular) support."""
    return t.support.is_full and is_quasi_independent(t, tol)


def lambda_gap(t1: ProbTable, t2: ProbTable) -> float:
    """Sup-norm distance between the two projected log-tables."""
    if t1.shape != t2.shape:
        raise TableError(f"shape mismatch: {t1.shape} vs {t2.shape}")
    return float(np.max(np.abs(signature(t1).lambda_circ - signature(t2).lambda_circ)))


def same_dependence(t1: ProbTable, t2: ProbTable, tol: float = DEFAULT_TOL) -> bool:
    """Whether ``t2`` is a rank-one rescaling of ``t1`` (same support, same Lambda0)."""
    if t1.shape != t2.shape:
        raise TableError(f"shape mismatch: {t1.shape} vs {t2.shape}")
    if t1.support != t2.support:
        return False
    return lambda_gap(t1, t2) <= tol


def _check_stochastic(m: np.ndarray, axis: int, what: str, tol: float = 1e-9) -> np.ndarray:
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or not np.all(np.isfinite(m)) or np.any(m < 0):
        raise TableError(f"{what} must be a finite nonnegative matrix")
    if np.any(np.abs(m.sum(axis=axis) - 1.0) > tol):
        raise TableError(f"{what} is not stochastic along axis {axis}")
    return m


def compatible_conditionals(rows_cond, cols_cond, tol: float = 1e-10) -> bool:
    """Do two conditional specifications come from one joint table?

    Parameters
    ----------
    rows_cond : array_like
        ``R x S`` row-stochastic matrix, the law of the column variable given
        each row.
    cols_cond : array_like
        ``R x S`` column-stochastic matrix, the law of the row variable given
        each column.

    Notes
    -----
    Compatible iff the zero patterns agree and ``cols_cond / rows_cond``
    factors as ``f(x) g(y)`` on the support, i.e. the log-ratio has no
    component in the zero-margin space.
    """
    rc = _check_stochastic(rows_cond, 1, "rows_cond")
    cc = _check_stochastic(cols_cond, 0, "cols_cond")
    if rc.shape != cc.shape:
        raise TableError(f"shape mismatch: {rc.shape} vs {cc.shape}")
    mask = rc > 0
    if not np.array_equal(mask, cc > 0):
        return False
    SupportPattern(mask)
    ratio = np.zeros(rc.shape)
    ratio[mask] = np.log(cc[mask]) - np.log(rc[mask])
    return float(np.max(np.abs(additive_residual(ratio, mask)))) <= tol


def _require_full(t: ProbTable):
    if not t.support.is_full:
        raise TableError(
            "odds ratios need a full support; use signature() for tables with structural zeros"
        )


def odds_ratios_pivot(t: ProbTable, pivot: tuple[int, int] = (0, 0)) -> np.ndarray:
    """Log odds ratios ``log(p[i0,j0] p[x,y] / (p[x,j0] p[i0,y]))`` against a pivot cell.

    Returns the ``(R-1) x (S-1)`` matrix obtained by dropping the pivot row
    and column.
    """
    _require_full(t)
    i0, j0 = pivot
    L = np.log(t.probs)
    full = L - L[:, [j0]] - L[[i0], :] + L[i0, j0]
    return np.delete(np.delete(full, i0, axis=0), j0, axis=1)


def odds_ratios_local(t: ProbTable) -> np.ndarray:
    """Local log odds ratios from adjacent 2x2 blocks."""
    _require_full(t)
    L = np.log(t.probs)
    return L[:-1, :-1] + L[1:, 1:] - L[:-1, 1:] - L[1:, :-1]
