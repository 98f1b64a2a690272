"""Exact samplers with unit Frechet margins: max-autoregression, moving
maximum, and Brown-Resnick time series via the extremal-functions algorithm.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.random import Generator, SeedSequence, default_rng
from scipy.linalg import lapack
from scipy.stats import kstest

from .errors import FactorizationError
from .series import SegmentedSeries

MAX_BLOCK_LEN = 2000  # dense factorization budget for Brown-Resnick blocks

_JITTER_LADDER = (0.0, 1e-10, 1e-8, 1e-6)


@dataclass(frozen=True)
class Variogram:
    """Power-type semi-variogram gamma(h) = scale * |h|**exponent."""

    scale: float
    exponent: float

    def __post_init__(self):
        if not self.scale > 0:
            raise ValueError("variogram scale must be > 0")
        if not 0 < self.exponent <= 2:
            raise ValueError("variogram exponent must lie in (0, 2]")

    def __call__(self, h):
        return self.scale * np.abs(np.asarray(h, dtype=float)) ** self.exponent

    def to_json(self) -> dict:
        return {"scale": self.scale, "exponent": self.exponent}


@dataclass(frozen=True)
class ModelSpec:
    """Parametric description of a simulatable model.

    All three models have unit Frechet margins (tail index alpha = 1, recorded
    explicitly).
    """

    kind: str  # "mar" | "moving_max" | "brown_resnick"
    a: float | None = None
    variogram: Variogram | None = None
    alpha: float = 1.0

    def __post_init__(self):
        if self.kind not in ("mar", "moving_max", "brown_resnick"):
            raise ValueError(f"unknown model kind {self.kind!r}")
        if self.alpha != 1.0:
            raise ValueError("only unit Frechet margins (alpha = 1) are supported")
        if self.kind == "mar":
            if self.a is None or not 0.0 <= self.a <= 1.0:
                raise ValueError("mar requires a coefficient a in [0, 1]")
        if self.kind == "brown_resnick" and self.variogram is None:
            raise ValueError("brown_resnick requires a variogram")

    @classmethod
    def mar(cls, a: float) -> "ModelSpec":
        return cls("mar", a=float(a))

    @classmethod
    def moving_max(cls) -> "ModelSpec":
        return cls("moving_max")

    @classmethod
    def brown_resnick(cls, scale: float, exponent: float) -> "ModelSpec":
        return cls("brown_resnick", variogram=Variogram(float(scale), float(exponent)))

    def to_json(self) -> dict:
        out = {"kind": self.kind, "alpha": self.alpha}
        if self.a is not None:
            out["a"] = self.a
        if self.variogram is not None:
            out["variogram"] = self.variogram.to_json()
        return out


def jittered_cholesky(matrix: np.ndarray) -> np.ndarray:
    """Lower Cholesky factor, retrying with diagonal jitter on failure.

    Power variograms with exponent near 2 yield near-singular covariances;
    the ladder adds 1e-10, 1e-8, 1e-6 to the diagonal before giving up.
    """
    d = matrix.shape[0]
    if d == 0:
        return np.zeros((0, 0))
    info = 0
    for jitter in _JITTER_LADDER:
        a = matrix + jitter * np.eye(d) if jitter else matrix
        c, info = lapack.dpotrf(a, lower=1, clean=1, overwrite_a=0)
        if info == 0:
            return c
    raise FactorizationError(
        f"covariance factorization failed at leading minor {int(info)} "
        f"even with diagonal jitter up to {_JITTER_LADDER[-1]}",
        dimension=int(info),
    )


class GaussianIncrementModel:
    """Centered Gaussian vectors with G_0 = 0 a.s. and stationary increments.

    Cov(G_s, G_t) = gamma(s) + gamma(t) - gamma(s - t); in particular
    Var(G_t) = 2 gamma(t).
    """

    def __init__(self, variogram: Variogram):
        self.variogram = variogram
        self._factor_cache: dict[tuple, np.ndarray] = {}

    def covariance(self, locations) -> np.ndarray:
        locs = np.asarray(locations, dtype=float)
        g = self.variogram(locs)
        return g[:, None] + g[None, :] - self.variogram(locs[:, None] - locs[None, :])

    def _factor(self, locations: tuple) -> np.ndarray:
        if locations not in self._factor_cache:
            self._factor_cache[locations] = jittered_cholesky(
                self.covariance(np.asarray(locations))
            )
        return self._factor_cache[locations]

    def sample(self, locations, n_draws: int, rng: Generator) -> np.ndarray:
        """Draw (n_draws, d) Gaussian vectors; coordinates at location 0 are 0."""
        locs = np.asarray(locations)
        nonzero = locs != 0
        out = np.zeros((n_draws, locs.size))
        m = int(nonzero.sum())
        if m:
            factor = self._factor(tuple(int(v) for v in locs[nonzero]))
            out[:, nonzero] = rng.standard_normal((n_draws, m)) @ factor.T
        return out


def simulate_mar(a: float, n: int, seed: int, return_noise: bool = False):
    """Stationary max-autoregression X_t = max(a X_{t-1}, (1-a) Z_t).

    Z_t are iid unit Frechet via inverse transform (-1/log U); X_0 is drawn
    from the stationary law, which is again unit Frechet, so no burn-in is
    needed and the recursion holds exactly on the returned path.

    Parameters
    ----------
    a : float
        Autoregression coefficient in [0, 1); a = 1 is degenerate.
    n : int
    seed : int
    return_noise : bool
        Also return the noise vector Z (entry 0 is NaN; X_0 is not generated
        through the recursion).
    """
    if not 0.0 <= a < 1.0:
        raise ValueError("a must lie in [0, 1); a = 1 is degenerate")
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = default_rng(int(seed))
    z = -1.0 / np.log(rng.random(n))
    x = np.empty(n)
    prev = z[0]
    x[0] = prev
    b = 1.0 - a
    for i in range(1, n):
        v = b * z[i]
        ax = a * prev
        prev = ax if ax > v else v
        x[i] = prev
    if return_noise:
        noise = z.copy()
        noise[0] = np.nan
        return x, noise
    return x


def simulate_moving_max(n: int, seed: int) -> np.ndarray:
    """Moving maximum X_t = max(Z_t, Z_{t-2}) / 2 with iid unit Frechet Z.

    The margins are exactly unit Frechet; odd lags are asymptotically
    independent while lag 2 shares a noise term.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = default_rng(int(seed))
    z = -1.0 / np.log(rng.random(n + 2))
    return 0.5 * np.maximum(z[2:], z[:-2])


# cache of (chol factor, pairwise variogram matrix) per Brown-Resnick geometry
_BR_GEOMETRY_CACHE: dict[tuple, tuple[np.ndarray, np.ndarray]] = {}


def _br_geometry(variogram: Variogram, locations: tuple) -> tuple[np.ndarray, np.ndarray]:
    key = (variogram.scale, variogram.exponent, locations)
    if key not in _BR_GEOMETRY_CACHE:
        if len(_BR_GEOMETRY_CACHE) > 8:
            _BR_GEOMETRY_CACHE.clear()
        locs = np.asarray(locations, dtype=float)
        # anchor the Gaussian at the first location: G[0] = 0
        g0 = variogram(locs - locs[0])
        cov = g0[1:, None] + g0[None, 1:] - variogram(locs[1:, None] - locs[None, 1:])
        factor = jittered_cholesky(cov)
        gam = variogram(locs[:, None] - locs[None, :])
        _BR_GEOMETRY_CACHE[key] = (factor, gam)
    return _BR_GEOMETRY_CACHE[key]


def _simulate_br(variogram: Variogram, locations: np.ndarray, rng: Generator) -> np.ndarray:
    """One exact Brown-Resnick draw at integer locations (extremal functions).

    Walks the locations in order; for each one, Poisson points are thinned
    until the running maximum at that location exceeds the next candidate
    level, and a candidate spectral function is accepted only if it does not
    exceed the maximum at already-processed locations.  The expected number
    of Gaussian draws is of the order of the number of locations.
    """
    d = locations.size
    if d == 1:
        return np.array([1.0 / rng.exponential()])
    factor, gam = _br_geometry(variogram, tuple(int(v) for v in locations))
    z = np.zeros(d)
    g = np.empty(d)
    for i in range(d):
        gam_i = gam[:, i]
        arrival = rng.exponential()
        zeta = 1.0 / arrival
        while zeta > z[i]:
            g[0] = 0.0
            g[1:] = factor @ rng.standard_normal(d - 1)
            candidate = zeta * np.exp(g - g[i] - gam_i)
            if i == 0 or not np.any(candidate[:i] >= z[:i]):
                np.maximum(z, candidate, out=z)
            arrival += rng.exponential()
            zeta = 1.0 / arrival
    return z


def simulate_brown_resnick(model: ModelSpec, locations, seed: int) -> np.ndarray:
    """Exact Brown-Resnick sample at the given integer locations.

    Parameters
    ----------
    model : ModelSpec
        Must have kind "brown_resnick".
    locations : int or sequence of int
        An integer d is shorthand for locations 0..d-1.
    seed : int
    """
    if model.kind != "brown_resnick":
        raise ValueError("model must be a brown_resnick spec")
    if np.isscalar(locations):
        locations = np.arange(int(locations))
    locs = np.asarray(locations, dtype=np.int64)
    if locs.size < 1:
        raise ValueError("at least one location is required")
    return _simulate_br(model.variogram, locs, default_rng(int(seed)))


def simulate_brown_resnick_path(
    model: ModelSpec, n: int, block_len: int = 500, seed: int = 0
) -> SegmentedSeries:
    """Brown-Resnick path of length n from independent exact blocks.

    Exact joint simulation of very long paths is infeasible (dense d x d
    factorizations), so the path is a concatenation of ceil(n / block_len)
    independent blocks, returned as one segment per block; estimators then
    never form windows across the artificial independence boundaries.  Block
    b uses the substream (seed, b).
    """
    if model.kind != "brown_resnick":
        raise ValueError("model must be a brown_resnick spec")
    if n < 1:
        raise ValueError("n must be >= 1")
    if not 1 <= block_len <= MAX_BLOCK_LEN:
        raise ValueError(f"block_len must be in 1..{MAX_BLOCK_LEN}")
    segments = []
    n_blocks = -(-n // block_len)
    for b in range(n_blocks):
        d = min(block_len, n - b * block_len)
        rng = default_rng(SeedSequence(int(seed), spawn_key=(b,)))
        segments.append(_simulate_br(model.variogram, np.arange(d), rng))
    return SegmentedSeries(segments)


def simulate_series(
    model: ModelSpec, n: int, seed: int, block_len: int = 500
) -> SegmentedSeries:
    """Simulate any supported model as a SegmentedSeries."""
    if model.kind == "mar":
        return SegmentedSeries([simulate_mar(model.a, n, seed)])
    if model.kind == "moving_max":
        return SegmentedSeries([simulate_moving_max(n, seed)])
    return simulate_brown_resnick_path(model, n, block_len=block_len, seed=seed)


def unit_frechet_cdf(x):
    x = np.asarray(x, dtype=float)
    return np.where(x > 0, np.exp(-1.0 / np.maximum(x, 1e-300)), 0.0)


def frechet_ks(values) -> tuple[float, float]:
    """Kolmogorov-Smirnov statistic and p-value against unit Frechet margins."""
    res = kstest(np.asarray(values, dtype=float), unit_frechet_cdf)
    return float(res.statistic), float(res.pvalue)
