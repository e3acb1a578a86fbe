"""Relative entropy, iterative proportional fitting and I-projections onto Frechet classes."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

from .dependence import same_dependence
from .support import FeasibilityReport, Verdict, frechet_feasible
from .tables import MarginPair, ProbTable, TableError, margins

DEFAULT_TOL = 1e-12
DEFAULT_MAX_ITER = 10_000
SHRINK_FACTOR = 1e-14


def kl_divergence(p: ProbTable, q: ProbTable) -> float:
    """Relative entropy ``sum p log(p / q)`` over the support of ``p``.

    Returns ``inf`` when ``p`` puts mass on a cell where ``q`` is zero.
    """
    if p.shape != q.shape:
        raise TableError(f"shape mismatch: {p.shape} vs {q.shape}")
    m = p.support.mask
    if np.any(q.probs[m] == 0):
        return float("inf")
    pp = p.probs[m]
    val = float(np.sum(pp * (np.log(pp) - np.log(q.probs[m]))))
    return max(val, 0.0)


@dataclass(frozen=True, eq=False)
class IpfReport:
    """Outcome of an IPF run.

    ``result`` equals ``start * outer(alpha, beta)`` on the support when the
    run converged without shrinking the support. ``alpha`` is scaled so that
    ``sum(alpha * row_margin(start)) == 1``.
    """

    result: ProbTable
    alpha: np.ndarray
    beta: np.ndarray
    iterations: int
    final_margin_gap: float
    converged: bool
    support_shrunk: bool
    feasibility: FeasibilityReport
    gap_history: tuple[float, ...]
    dependence_preserved: bool

    @property
    def contraction(self) -> float | None:
        """Last ratio of successive margin gaps, or None for fewer than two sweeps."""
        h = [g for g in self.gap_history if g > 0]
        if len(h) < 2:
            return None
        return h[-1] / h[-2]


def _margin_gap(p: np.ndarray, r: np.ndarray, c: np.ndarray) -> float:
    return float(np.abs(p.sum(axis=1) - r).sum() + np.abs(p.sum(axis=0) - c).sum())


def ipf(
    start: ProbTable,
    target: MarginPair,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
) -> IpfReport:
    """Fit ``start`` to the target margins by alternating row and column scaling.

    Each sweep rescales rows to the target row margin, then columns to the
    target column margin, accumulating the multipliers ``alpha`` and ``beta``.
    The run stops once the L1 margin gap is at most ``tol`` or after
    ``max_iter`` sweeps.

    Returns
    -------
    IpfReport
        ``converged`` is False when the sweep budget ran out. Targets that are
        infeasible for the support of ``start`` never converge; their
        ``feasibility`` verdict is ``Infeasible``.
    """
    if target.shape != start.shape:
        raise TableError(f"margins have shape {target.shape}, table has {start.shape}")
    r, c = target.row_margin, target.col_margin
    feas = frechet_feasible(start.support, target)
    p0 = start.probs
    mask = start.support.mask
    p = p0.copy()
    # multipliers are accumulated in logs; they diverge on infeasible targets
    log_a = np.zeros(start.shape[0])
    log_b = np.zeros(start.shape[1])
    history = []
    gap = _margin_gap(p, r, c)
    history.append(gap)
    it = 0
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        while gap > tol and it < max_iter:
            ra = r / p.sum(axis=1)
            q = p * ra[:, None]
            cb = c / q.sum(axis=0)
            q *= cb[None, :]
            if not (np.all(np.isfinite(q)) and np.all(np.isfinite(ra)) and np.all(np.isfinite(cb))):
                break
            p = q
            log_a += np.log(ra)
            log_b += np.log(cb)
            it += 1
            gap = _margin_gap(p, r, c)
            history.append(gap)

    converged = gap <= tol
    shrunk = bool(np.any(p[mask] < SHRINK_FACTOR * p0[mask]))

    # fix the free constant: sum(alpha * row_margin(start)) == 1
    shift = logsumexp(log_a, b=p0.sum(axis=1))
    with np.errstate(over="ignore", under="ignore"):
        alpha = np.exp(log_a - shift)
        beta = np.exp(log_b + shift)

    result = ProbTable.from_weights(p)
    preserved = bool(converged and not shrunk and result.support == start.support
                     and same_dependence(start, result))
    return IpfReport(
        result=result,
        alpha=alpha,
        beta=beta,
        iterations=it,
        final_margin_gap=gap,
        converged=converged,
        support_shrunk=shrunk,
        feasibility=feas,
        gap_history=tuple(history),
        dependence_preserved=preserved,
    )


def i_project(
    source: ProbTable,
    target: MarginPair,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
) -> IpfReport:
    """I-projection of ``source`` onto the tables with margins ``target``.

    The minimizer of ``kl_divergence(., source)`` over the Frechet class is
    the limit of IPF started at ``source``, so this runs :func:`ipf`.
    """
    return ipf(source, target, tol=tol, max_iter=max_iter)


def pythagoras_check(source: ProbTable, other: ProbTable) -> tuple[float, float, float]:
    """Terms of the Pythagorean identity for relative entropy.

    With ``proj`` the I-projection of ``source`` onto the margins of
    ``other``, returns ``(I(other|source), I(other|proj), I(proj|source))``.
    The first equals the sum of the other two.
    """
    rep = i_project(source, margins(other))
    if rep.feasibility.verdict is Verdict.INFEASIBLE:
        raise TableError("margins of `other` are infeasible for the support of `source`")
    proj = rep.result
    return (
        kl_divergence(other, source),
        kl_divergence(other, proj),
        kl_divergence(proj, source),
    )
