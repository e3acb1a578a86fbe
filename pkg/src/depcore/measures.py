"""Dependence measure D = R + (1 - R) Q and classical association indices.

R is the share of the ``(R-1)(S-1)`` dependence parameters consumed by the
support, Q a calibrated transform of the signature norm. Pearson, Spearman
and Kendall coefficients, mutual information, PQD and PLRD are provided for
contrast; they use row/column indices ``0..R-1`` and ``0..S-1`` as scores.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .dependence import signature
from .projection import kl_divergence
from .support import dim_gamma
from .tables import ProbTable, SupportPattern, TableError, group_transform, margins

CALIBRATIONS = ("yule", "gauss")


def _yule(d: float) -> float:
    return math.tanh(d / 2.0)


def _gauss(d: float) -> float:
    # inverse of d = |rho| / (1 - rho^2)
    if d == 0.0:
        return 0.0
    return 2.0 * d / (math.sqrt(1.0 + 4.0 * d * d) + 1.0)


_T = {"yule": _yule, "gauss": _gauss}


def calibrate(d: float, calibration: str = "yule") -> float:
    """Map a signature norm ``d >= 0`` into ``[0, 1)``.

    ``"yule"`` is ``tanh(d / 2)``, which turns a 2x2 table into the absolute
    value of Yule's colligation coefficient. ``"gauss"`` returns the ``|rho|``
    solving ``d = |rho| / (1 - rho^2)``, so a Gaussian copula maps back to its
    correlation.
    """
    try:
        f = _T[calibration]
    except KeyError:
        raise ValueError(f"unknown calibration {calibration!r}; expected one of {CALIBRATIONS}")
    if d < 0:
        raise ValueError("norm must be nonnegative")
    return f(float(d))


def regional_dependence(s: SupportPattern) -> float:
    """Fraction of the ``(R-1)(S-1)`` dependence parameters fixed by the support."""
    R, S = s.shape
    full = (R - 1) * (S - 1)
    return float(Fraction(full - dim_gamma(s), full))


def quasi_deviation(sig, calibration: str = "yule") -> float:
    """Calibrated distance from quasi-independence.

    ``sig`` is anything with a ``norm2`` attribute (a table signature or a
    grid's Haar coefficients) or a bare norm.
    """
    d = sig.norm2 if hasattr(sig, "norm2") else float(sig)
    return calibrate(d, calibration)


@dataclass(frozen=True)
class MeasureReport:
    regional: float
    quasi_deviation: float
    overall: float
    calibration: str
    norm2: float


def overall_dependence(t: ProbTable, calibration: str = "yule") -> MeasureReport:
    """Regional, quasi-independence and overall dependence of ``t``."""
    sig = signature(t)
    r = regional_dependence(t.support)
    q = quasi_deviation(sig, calibration)
    return MeasureReport(r, q, r + (1 - r) * q, calibration, sig.norm2)


def _scores(t: ProbTable):
    R, S = t.shape
    return np.arange(R, dtype=float), np.arange(S, dtype=float)


def pearson_rho(t: ProbTable) -> float:
    """Product-moment correlation of the row and column indices."""
    p = t.probs
    xs, ys = _scores(t)
    m = margins(t)
    mx, my = m.row_margin @ xs, m.col_margin @ ys
    vx = m.row_margin @ (xs - mx) ** 2
    vy = m.col_margin @ (ys - my) ** 2
    if vx <= 0 or vy <= 0:
        raise TableError("a margin is degenerate; correlation undefined")
    cov = (xs - mx) @ p @ (ys - my)
    return float(cov / math.sqrt(vx * vy))


def _quadrant_masses(p: np.ndarray):
    """Mass strictly below-left and strictly above-right of every cell."""
    c = p.cumsum(0).cumsum(1)
    below = np.zeros_like(p)
    below[1:, 1:] = c[:-1, :-1]
    r = p[::-1, ::-1].cumsum(0).cumsum(1)[::-1, ::-1]
    above = np.zeros_like(p)
    above[:-1, :-1] = r[1:, 1:]
    return below, above


def kendall_tau(t: ProbTable) -> float:
    """P(concordant) - P(discordant) for two independent draws, without tie correction."""
    p = t.probs
    ll, uu = _quadrant_masses(p)
    # discordant quadrants: flip the column order
    lr, ul = _quadrant_masses(p[:, ::-1])
    conc = np.sum(p * (ll + uu))
    disc = np.sum(p[:, ::-1] * (lr + ul))
    return float(conc - disc)


def _sign_expectation(m: np.ndarray) -> np.ndarray:
    # E[sign(i - Z)] for Z ~ m, at each index i
    cdf = np.cumsum(m)
    below = np.concatenate([[0.0], cdf[:-1]])
    above = 1.0 - cdf
    return below - above


def spearman_rho(t: ProbTable) -> float:
    """``3 (P(conc) - P(disc))`` between ``(X1, Y1)`` and independent ``X2``, ``Y3``."""
    m = margins(t)
    sx = _sign_expectation(m.row_margin)
    sy = _sign_expectation(m.col_margin)
    return float(3.0 * (sx @ t.probs @ sy))


def mutual_information(t: ProbTable) -> float:
    """Relative entropy of ``t`` from the product of its margins."""
    m = margins(t)
    return kl_divergence(t, ProbTable.from_weights(np.outer(m.row_margin, m.col_margin)))


def joint_cdf(t: ProbTable) -> np.ndarray:
    return t.probs.cumsum(0).cumsum(1)


def pqd_check(t: ProbTable, tol: float = 1e-12) -> bool:
    """Positive quadrant dependence: ``F(x, y) >= F_X(x) F_Y(y)`` everywhere."""
    m = margins(t)
    F = joint_cdf(t)
    prod = np.outer(np.cumsum(m.row_margin), np.cumsum(m.col_margin))
    return bool(np.all(F >= prod - tol))


def plrd_check(t: ProbTable, rtol: float = 1e-12) -> bool:
    """Positive likelihood ratio dependence.

    Every minor ``p[x1, y1] p[x2, y2] - p[x2, y1] p[x1, y2]`` with ``x1 < x2``,
    ``y1 < y2`` is nonnegative and at least one is strictly positive. Minors
    are compared relative to the larger of their two products, which keeps
    the test invariant under rank-one rescaling.
    """
    p = t.probs
    R, S = t.shape
    iu = np.triu_indices(S, k=1)
    strict = False
    for x1 in range(R - 1):
        for x2 in range(x1 + 1, R):
            pos = np.outer(p[x1], p[x2])[iu]
            neg = np.outer(p[x2], p[x1])[iu]
            slack = rtol * np.maximum(pos, neg)
            vals = pos - neg
            if np.any(vals < -slack):
                return False
            strict = strict or bool(np.any(vals > slack))
    return strict


class Order(str, enum.Enum):
    LESS = "Less"
    GREATER = "Greater"
    EQUAL = "Equal"
    INCOMPARABLE = "Incomparable"


def concordance_order(t1: ProbTable, t2: ProbTable, tol: float = 1e-12) -> Order:
    """Pointwise comparison of joint CDFs; ``LESS`` means ``t1`` is less concordant."""
    if t1.shape != t2.shape:
        raise TableError(f"shape mismatch: {t1.shape} vs {t2.shape}")
    d = joint_cdf(t1) - joint_cdf(t2)
    le = np.all(d <= tol)
    ge = np.all(d >= -tol)
    if le and ge:
        return Order.EQUAL
    if le:
        return Order.LESS
    if ge:
        return Order.GREATER
    return Order.INCOMPARABLE


def cross_table(n_atoms: int) -> ProbTable:
    """Discretized uniform mass on both diagonals of the unit square.

    ``n_atoms`` equally spaced x-values at cell centres, each carrying half
    its mass to ``y = x`` and half to ``y = 1 - x``.
    """
    if n_atoms < 2:
        raise ValueError("n_atoms must be at least 2")
    w = np.zeros((n_atoms, n_atoms))
    i = np.arange(n_atoms)
    w[i, i] += 1.0
    w[i, n_atoms - 1 - i] += 1.0
    return ProbTable.from_weights(w)


def cross_example_tau(n_atoms: int, a: float, b: float) -> float:
    """Kendall's tau of the diagonal cross after step-function rescaling.

    Rows with ``x > 1/2`` are weighted by ``a`` and the rest by ``1 - a``;
    columns likewise with ``b``. The rescaling leaves the dependence unchanged
    while tau tends to ``(2a - 1)(2b - 1)``.
    """
    if not (0 < a < 1 and 0 < b < 1):
        raise ValueError("a and b must lie in (0, 1)")
    t = cross_table(n_atoms)
    centres = (np.arange(n_atoms) + 0.5) / n_atoms
    alpha = np.where(centres > 0.5, 2 * a, 2 * (1 - a))
    beta = np.where(centres > 0.5, 2 * b, 2 * (1 - b))
    return kendall_tau(group_transform(t, alpha, beta))
