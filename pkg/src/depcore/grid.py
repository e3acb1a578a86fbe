"""Densities on a dyadic ``2^K x 2^K`` grid and their dependence surfaces.

Values are density values at cell centres. The Haar coefficients, the centred
log-odds-ratio surface and the odds ratio function are computed in
unit-square coordinates; the local dependence function uses the actual cell
widths given by ``bounds``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import ndtri

MASS_TOL = 1e-9


class GridError(ValueError):
    pass


def _level_of(n: int) -> int:
    k = int(n).bit_length() - 1
    if n < 2 or 1 << k != n:
        raise GridError(f"grid side {n} is not a power of two >= 2")
    return k


@dataclass(frozen=True, eq=False)
class GridDensity:
    """Bounded density sampled at the centres of a dyadic grid.

    Parameters
    ----------
    values : ndarray
        ``2^K x 2^K`` nonnegative density values; rows index x, columns y.
    bounds : tuple
        ``(x_lo, x_hi, y_lo, y_hi)``; the unit square by default.
    """

    values: np.ndarray
    bounds: tuple[float, float, float, float] = (0.0, 1.0, 0.0, 1.0)
    level: int = field(init=False)

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 2 or v.shape[0] != v.shape[1]:
            raise GridError(f"grid must be square, got shape {v.shape}")
        level = _level_of(v.shape[0])
        if not np.all(np.isfinite(v)) or np.any(v < 0):
            raise GridError("density values must be finite and nonnegative")
        x0, x1, y0, y1 = map(float, self.bounds)
        if not (x1 > x0 and y1 > y0):
            raise GridError(f"bad bounds {self.bounds}")
        mass = v.sum() * self.cell_area_of(v.shape[0], (x0, x1, y0, y1))
        if abs(mass - 1.0) > MASS_TOL:
            raise GridError(f"grid mass is {mass!r}, not 1")
        v = v.copy()
        v.setflags(write=False)
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "bounds", (x0, x1, y0, y1))
        object.__setattr__(self, "level", level)

    @staticmethod
    def cell_area_of(n, bounds) -> float:
        x0, x1, y0, y1 = bounds
        return (x1 - x0) * (y1 - y0) / (n * n)

    @classmethod
    def from_values(cls, values, bounds=(0.0, 1.0, 0.0, 1.0)) -> GridDensity:
        """Rescale nonnegative values so the grid has total mass one."""
        v = np.asarray(values, dtype=float)
        mass = v.sum() * cls.cell_area_of(v.shape[0], bounds)
        if not mass > 0:
            raise GridError("grid has no mass")
        return cls(v / mass, bounds)

    @property
    def size(self) -> int:
        return self.values.shape[0]

    @property
    def support_mask(self) -> np.ndarray:
        return self.values > 0

    @property
    def spacing(self) -> tuple[float, float]:
        x0, x1, y0, y1 = self.bounds
        return (x1 - x0) / self.size, (y1 - y0) / self.size

    def centres(self) -> tuple[np.ndarray, np.ndarray]:
        hx, hy = self.spacing
        i = np.arange(self.size) + 0.5
        return self.bounds[0] + hx * i, self.bounds[2] + hy * i


def grid_from_logdensity(logf, level: int, bounds=(0.0, 1.0, 0.0, 1.0)) -> GridDensity:
    """Evaluate ``logf(x, y)`` (vectorized) at cell centres and normalize."""
    n = 1 << level
    x0, x1, y0, y1 = bounds
    xs = x0 + (x1 - x0) * (np.arange(n) + 0.5) / n
    ys = y0 + (y1 - y0) * (np.arange(n) + 0.5) / n
    L = logf(xs[:, None], ys[None, :])
    L = np.broadcast_to(L, (n, n))
    return GridDensity.from_values(np.exp(L - L.max()), bounds)


def gaussian_copula_grid(rho: float, level: int) -> GridDensity:
    """Gaussian copula density with correlation ``rho`` on a ``2^level`` grid.

    Boundary cells take their cell-centre values; the final normalization
    absorbs the truncation of the unbounded tails.
    """
    if not abs(rho) < 1:
        raise GridError("|rho| must be < 1")
    s = 1.0 - rho * rho

    def logc(u, v):
        x, y = ndtri(u), ndtri(v)
        return -0.5 * np.log(s) + (2 * rho * x * y - rho * rho * (x * x + y * y)) / (2 * s)

    return grid_from_logdensity(logc, level)


def _log_values(g: GridDensity) -> np.ndarray:
    if not g.support_mask.all():
        raise GridError("density has zero cells; log is undefined")
    return np.log(g.values)


@dataclass(frozen=True, eq=False)
class HaarCoefficients:
    """Coefficients of log f against the amputated tensor Haar basis.

    ``blocks[(kx, ky)]`` is a ``2^kx x 2^ky`` array whose entry ``(lx, ly)``
    is the coefficient of ``psi_{kx,lx}(x) psi_{ky,ly}(y)``, with
    ``psi_{k,l}(t) = 2^(k/2) psi_0(2^k t - l)`` and ``psi_0`` equal to ``+1``
    on ``[0, 1/2)`` and ``-1`` on ``[1/2, 1)``. The equal-scale blocks
    ``kx == ky`` are the square Haar log-odds ratios.
    """

    level: int
    blocks: dict
    norm2: float

    def __getitem__(self, key):
        kx, ky, lx, ly = key
        return float(self.blocks[(kx, ky)][lx, ly])

    def __len__(self):
        return sum(b.size for b in self.blocks.values())

    def same_scale(self) -> dict:
        """``(k, lx, ly) -> coefficient`` for the equal-scale basis elements."""
        out = {}
        for k in range(self.level):
            b = self.blocks[(k, k)]
            for lx in range(b.shape[0]):
                for ly in range(b.shape[1]):
                    out[(k, lx, ly)] = float(b[lx, ly])
        return out

    def as_matrix(self) -> np.ndarray:
        """Coefficients laid out as ``M[2^kx + lx, 2^ky + ly]``; row/col 0 are empty."""
        n = 1 << self.level
        M = np.zeros((n, n))
        for (kx, ky), b in self.blocks.items():
            M[1 << kx:2 << kx, 1 << ky:2 << ky] = b
        return M


def haar_delta(g: GridDensity) -> HaarCoefficients:
    """Haar coefficients of ``log f`` by direct summation over grid cells.

    Each coefficient sums ``log f`` against the +/- sign pattern of its basis
    function (positive on the lower-left and upper-right quadrants) with
    midpoint quadrature. Scaling functions are left out, so the coefficients
    only see the double-centred part of ``log f``.
    """
    L = _log_values(g)
    K = g.level
    n = g.size
    area = 1.0 / (n * n)
    blocks = {}
    total = 0.0
    for kx in range(K):
        bx = n >> kx
        sx = np.repeat([1.0, -1.0], bx // 2)
        for ky in range(K):
            by = n >> ky
            sy = np.repeat([1.0, -1.0], by // 2)
            B = L.reshape(1 << kx, bx, 1 << ky, by)
            c = np.einsum("i,aibj,j->ab", sx, B, sy) * (2.0 ** ((kx + ky) / 2) * area)
            blocks[(kx, ky)] = c
            total += float(np.sum(c * c))
    return HaarCoefficients(K, blocks, float(np.sqrt(total)))


def haar_matrix(n: int) -> np.ndarray:
    """Orthonormal discrete Haar matrix; row ``2^k + l`` is detail ``(k, l)``, row 0 the mean."""
    _level_of(n)
    H = np.array([[1.0]])
    while H.shape[0] < n:
        m = H.shape[0]
        H = np.vstack([np.kron(H, [1.0, 1.0]), np.kron(np.eye(m), [1.0, -1.0])]) / np.sqrt(2.0)
    return H


def haar_transform(surface: np.ndarray) -> np.ndarray:
    """Tensor Haar coefficients of a grid surface, scaled to unit-square L2.

    Entry ``[2^kx + lx, 2^ky + ly]`` matches :meth:`HaarCoefficients.as_matrix`.
    """
    n = surface.shape[0]
    H = haar_matrix(n)
    return H @ surface @ H.T / n


def lambda_bar(g: GridDensity) -> np.ndarray:
    """Centred log-odds-ratio surface: ``log f`` with row and column means removed."""
    L = _log_values(g)
    return L - L.mean(axis=1, keepdims=True) - L.mean(axis=0, keepdims=True) + L.mean()


def odds_ratio_function(g: GridDensity, pivot: tuple[int, int]) -> np.ndarray:
    """``f[i, j] f[p] / (f[i, pj] f[pi, j])`` for a pivot cell ``p = (pi, pj)``.

    Cells outside the support get 0; the pivot row and column must be positive.
    """
    f = g.values
    pi, pj = pivot
    if not (0 <= pi < g.size and 0 <= pj < g.size):
        raise GridError(f"pivot {pivot} outside the grid")
    if np.any(f[pi, :] <= 0) or np.any(f[:, pj] <= 0):
        raise GridError(f"density vanishes on the cross through pivot {pivot}")
    return f * f[pi, pj] / np.outer(f[:, pj], f[pi, :])


def local_dependence(g: GridDensity, restrict_to_support: bool = False) -> np.ndarray:
    """Mixed finite difference of ``log f``, approximating its cross derivative.

    Returns an ``(n-1) x (n-1)`` array located at interior grid nodes. With
    ``restrict_to_support`` the density may vanish; entries touching a zero
    cell are NaN. Otherwise a zero cell raises.
    """
    if restrict_to_support:
        with np.errstate(divide="ignore"):
            L = np.where(g.support_mask, np.log(np.where(g.support_mask, g.values, 1.0)), np.nan)
    else:
        L = _log_values(g)
    hx, hy = g.spacing
    return (L[1:, 1:] - L[:-1, 1:] - L[1:, :-1] + L[:-1, :-1]) / (hx * hy)


def mixed_local_dependence(cond_probs, bounds: tuple[float, float] = (0.0, 1.0)) -> np.ndarray:
    """Local dependence between a discrete row variable and a gridded continuous one.

    Parameters
    ----------
    cond_probs : array_like
        ``m x 2^K`` matrix; column ``j`` is the conditional law of the
        discrete variable given the continuous one at grid centre ``j``.
    bounds : tuple
        Range of the continuous variable.

    Returns
    -------
    ndarray
        Finite differences in y of ``log(P(x | y) / P(x - 1 | y))``. A vector
        of length ``2^K - 1`` when ``m == 2``, else an ``(m-1) x (2^K - 1)``
        array.
    """
    p = np.asarray(cond_probs, dtype=float)
    if p.ndim != 2 or p.shape[0] < 2:
        raise GridError("need at least two rows of conditional probabilities")
    _level_of(p.shape[1])
    if not np.all(np.isfinite(p)) or np.any(p <= 0):
        raise GridError("conditional probabilities must be strictly positive")
    if np.any(np.abs(p.sum(axis=0) - 1.0) > 1e-9):
        raise GridError("columns of cond_probs must sum to 1")
    h = (bounds[1] - bounds[0]) / p.shape[1]
    logit = np.log(p[1:]) - np.log(p[:-1])
    gamma = np.diff(logit, axis=1) / h
    return gamma[0] if p.shape[0] == 2 else gamma


def permute_grid(g: GridDensity, row_perm, col_perm) -> GridDensity:
    """Relabel grid cells: ``result[i, j] = g[row_perm[i], col_perm[j]]``."""
    v = g.values[np.ix_(np.asarray(row_perm), np.asarray(col_perm))]
    return GridDensity(v, g.bounds)
