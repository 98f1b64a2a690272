"""Limit-theory oracles: analytic limit laws, tail-process Monte Carlo,
asymptotic covariances of the ratio estimators, extremal coefficients and
mixing-condition diagnostics for max-stable models.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numpy.random import default_rng
from scipy.special import ndtr, ndtri

from .errors import NoDataError
from .estimation import DistributionEstimate
from .events import WindowEvent
from .patterns import all_patterns, lehmer_rank_rows, pattern_perm_rows
from .simulate import GaussianIncrementModel, ModelSpec, Variogram


def mar_limit_cluster_size(a: float, size: int) -> float:
    """Limiting cluster-size probability of the max-autoregression.

    The limit law is geometric: P(C = l) = a**(l-1) * (1 - a).
    """
    if not 0.0 <= a < 1.0:
        raise ValueError("a must lie in [0, 1)")
    if size < 1:
        raise ValueError("size must be >= 1")
    return a ** (size - 1) * (1.0 - a)


@dataclass(frozen=True)
class TailProcessSampler:
    """Exact sampler of the tail process on an integer window.

    The window covers indices lo..hi with lo <= -1 <= hi; every sample has
    Y_0 = P > 1 with P standard Pareto.  Supported models:

    * mar: Y_k = a**k Y_0 for k >= 1; leftwards the path survives each step
      with probability a (Y_{-k} = a**-k Y_0 while it survives, then 0).
    * brown_resnick: Y_t = P exp(G_t - gamma(t)) with G a centered Gaussian,
      G_0 = 0, stationary increments.
    """

    model: ModelSpec
    lo: int = -1
    hi: int = 1

    def __post_init__(self):
        if self.model.kind not in ("mar", "brown_resnick"):
            raise ValueError(
                f"tail process sampling is not available for {self.model.kind!r}"
            )
        if self.lo > -1 or self.hi < 0:
            raise ValueError("window must cover indices -1 and 0")

    @property
    def indices(self) -> np.ndarray:
        return np.arange(self.lo, self.hi + 1)

    def column(self, time_index: int) -> int:
        if not self.lo <= time_index <= self.hi:
            raise ValueError(f"index {time_index} outside window [{self.lo}, {self.hi}]")
        return time_index - self.lo

    def sample(self, n_mc: int, seed: int) -> np.ndarray:
        """Draw (n_mc, hi - lo + 1) tail-process paths."""
        if n_mc < 1:
            raise ValueError("n_mc must be >= 1")
        rng = default_rng(int(seed))
        pareto = 1.0 / rng.random(n_mc)
        width = self.hi - self.lo + 1
        out = np.zeros((n_mc, width))
        if self.model.kind == "mar":
            a = float(self.model.a)
            c = self.column(0)
            out[:, c] = pareto
            if a > 0.0:
                for k in range(1, self.hi + 1):
                    out[:, c + k] = a**k * pareto
                survives = np.ones(n_mc, dtype=bool)
                for j in range(1, -self.lo + 1):
                    survives &= rng.random(n_mc) < a
                    out[survives, c - j] = a ** (-j) * pareto[survives]
            return out
        idx = self.indices
        gim = GaussianIncrementModel(self.model.variogram)
        g = gim.sample(idx, n_mc, rng)
        return pareto[:, None] * np.exp(g - self.model.variogram(idx)[None, :])


def tail_process_sample(sampler: TailProcessSampler, seed: int) -> np.ndarray:
    """One tail-process draw over the sampler's window."""
    return sampler.sample(1, seed)[0]


def limit_cluster_size_mc(
    sampler: TailProcessSampler, l_max: int, n_mc: int, seed: int
) -> DistributionEstimate:
    """Monte Carlo estimate of the limiting cluster-size distribution.

    P(C = l) is the tail-process probability of {Y_-1 <= 1, Y_0 > 1, ...,
    Y_{l-1} > 1, Y_l <= 1} given {Y_-1 <= 1, Y_0 > 1}; the overflow atom
    collects sizes above l_max.  Binomial-ratio standard errors are attached.
    """
    if l_max < 1:
        raise ValueError("l_max must be >= 1")
    if n_mc < 1000:
        raise ValueError("n_mc must be >= 1000")
    if sampler.hi < l_max:
        raise ValueError(f"sampler window must extend to index {l_max}")
    y = sampler.sample(n_mc, seed)
    c = sampler.column(0)
    run = (y[:, c - 1] <= 1.0) & (y[:, c] > 1.0)
    m = int(np.count_nonzero(run))
    if m == 0:
        raise NoDataError("no tail sample hit the conditioning event")
    counts = np.empty(l_max + 1, dtype=np.int64)
    run = run.copy()
    for l in range(1, l_max + 1):
        after = y[:, c + l] > 1.0
        counts[l - 1] = int(np.count_nonzero(run & ~after))
        run &= after
    counts[l_max] = int(np.count_nonzero(run))
    probs = counts / m
    return DistributionEstimate(
        support=list(range(1, l_max + 1)) + [f">{l_max}"],
        probs=probs,
        counts=counts,
        denominator_count=m,
        threshold=1.0,
        method="limit-mc",
        se=np.sqrt(probs * (1.0 - probs) / m),
        metadata={"n_mc": int(n_mc), "seed": int(seed), "model": sampler.model.to_json()},
    )


def limit_pattern_mc(
    sampler: TailProcessSampler, length: int, n_mc: int, seed: int
) -> DistributionEstimate:
    """Monte Carlo estimate of the limiting within-cluster pattern law.

    Conditional distribution of the pattern of (Y_0, ..., Y_{length-1}) given
    a cluster of exactly this size in the tail process.
    """
    if not 2 <= length <= 6:
        raise ValueError("pattern length must be in 2..6")
    if n_mc < 1000:
        raise ValueError("n_mc must be >= 1000")
    if sampler.hi < length:
        raise ValueError(f"sampler window must extend to index {length}")
    y = sampler.sample(n_mc, seed)
    c = sampler.column(0)
    cond = (y[:, c - 1] <= 1.0) & np.all(y[:, c : c + length] > 1.0, axis=1)
    cond &= y[:, c + length] <= 1.0
    m = int(np.count_nonzero(cond))
    if m == 0:
        raise NoDataError(f"no tail sample produced a cluster of size {length}")
    blocks = y[cond][:, c : c + length]
    ranks = lehmer_rank_rows(pattern_perm_rows(blocks))
    counts = np.bincount(ranks, minlength=math.factorial(length)).astype(np.int64)
    probs = counts / m
    return DistributionEstimate(
        support=all_patterns(length),
        probs=probs,
        counts=counts,
        denominator_count=m,
        threshold=1.0,
        method="limit-mc",
        se=np.sqrt(probs * (1.0 - probs) / m),
        metadata={"n_mc": int(n_mc), "seed": int(seed), "model": sampler.model.to_json()},
    )


@dataclass
class CovarianceResult:
    """Asymptotic covariance of the window-event probability estimators.

    ``sigma`` is the (N+1) x (N+1) covariance of the normalized indicator
    means for events A_0..A_N; ``transformed`` is the N x N delta-method
    covariance of the ratios R(A_i, A_0) = mu(A_i)/mu(A_0).
    """

    sigma: np.ndarray
    transformed: np.ndarray
    mu_values: np.ndarray
    truncation_h: int
    mc_se: np.ndarray
    last_term_max: float
    n_mc: int

    def to_json(self) -> dict:
        return {
            "sigma": self.sigma.tolist(),
            "transformed": self.transformed.tolist(),
            "mu_values": self.mu_values.tolist(),
            "truncation_h": int(self.truncation_h),
            "mc_se": self.mc_se.tolist(),
            "last_term_max": float(self.last_term_max),
            "n_mc": int(self.n_mc),
        }


def cluster_size_event_family(l_values: list[int]) -> list[WindowEvent]:
    """Events [A_0, A_{l1}, ...]: cluster start plus exact-size events, padded
    to a common span."""
    events = [WindowEvent.cluster_start()] + [
        WindowEvent.cluster_of_size(l) for l in l_values
    ]
    t = max(e.t for e in events)
    return [e.padded_to(t) for e in events]


def _sigma_terms(indicators: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Sigma matrix and its last lag increment from (h+1, N+1, n) indicators."""
    n = indicators.shape[2]
    a0 = indicators[0].astype(np.float64)
    sigma = a0 @ a0.T / n
    last = np.zeros_like(sigma)
    for h in range(1, indicators.shape[0]):
        q = a0 @ indicators[h].astype(np.float64).T / n
        last = q + q.T
        sigma += last
    return (sigma + sigma.T) / 2.0, last


def asymptotic_covariance(
    sampler: TailProcessSampler,
    events: list[WindowEvent],
    h_trunc: int,
    n_mc: int,
    seed: int,
    n_batches: int = 10,
) -> CovarianceResult:
    """Monte Carlo estimate of the asymptotic covariance matrix.

    sigma[j, l] = mu(A_j and A_l) + sum_{h>=1} P(Y in A_j, Y at lag h in A_l)
    + the transposed sum, truncated at h_trunc; the delta-method transform
    uses F built from the mu(A_j) estimates and mu(A_0)**-4.

    Parameters
    ----------
    sampler : TailProcessSampler
        Window must cover [-1, t + h_trunc] for the common event span t.
    events : list of WindowEvent
        A_0..A_N on the tail scale (threshold 1); all events must share the
        same span (pad beforehand).
    h_trunc : int
        Lag truncation of the series; the magnitude of the last lag term is
        reported, never silently dropped.
    n_mc, seed : int
    n_batches : int
        Batches for the Monte Carlo standard errors of sigma.
    """
    if h_trunc < 1:
        raise ValueError("h_trunc must be >= 1")
    if not events:
        raise ValueError("at least one event is required")
    t = events[0].t
    if any(e.t != t for e in events):
        raise ValueError("all events must share a common span; pad the smaller ones")
    if sampler.hi < t + h_trunc:
        raise ValueError(f"sampler window must extend to index {t + h_trunc}")
    if n_mc < n_batches * 10:
        raise ValueError("n_mc is too small for batched standard errors")
    y = sampler.sample(n_mc, seed)
    c = sampler.column(0)
    span = t + 2
    n_events = len(events)
    indicators = np.empty((h_trunc + 1, n_events, n_mc), dtype=bool)
    for h in range(h_trunc + 1):
        block = y[:, c - 1 + h : c - 1 + h + span]
        for j, event in enumerate(events):
            indicators[h, j] = event.evaluate_rows(block, 1.0)

    mu = indicators[0].mean(axis=1)
    if mu[0] <= 0.0:
        raise NoDataError("mu(A_0) was estimated as zero")
    sigma, last = _sigma_terms(indicators)

    edges = np.linspace(0, n_mc, n_batches + 1).astype(int)
    batch_sigmas = np.stack(
        [
            _sigma_terms(indicators[:, :, edges[b] : edges[b + 1]])[0]
            for b in range(n_batches)
        ]
    )
    mc_se = batch_sigmas.std(axis=0, ddof=1) / math.sqrt(n_batches)

    n_ratios = n_events - 1
    if n_ratios > 0:
        f = np.zeros((n_ratios, n_events))
        f[:, 0] = -mu[1:]
        f[np.arange(n_ratios), np.arange(1, n_events)] = mu[0]
        transformed = mu[0] ** -4 * (f @ sigma @ f.T)
        transformed = (transformed + transformed.T) / 2.0
    else:
        transformed = np.zeros((0, 0))
    return CovarianceResult(
        sigma=sigma,
        transformed=transformed,
        mu_values=mu,
        truncation_h=h_trunc,
        mc_se=mc_se,
        last_term_max=float(np.abs(last).max()) if last.size else 0.0,
        n_mc=int(n_mc),
    )


def asymptotic_halfwidths(
    result: CovarianceResult, n_obs: int, p_exceed: float, ci_level: float = 0.95
) -> np.ndarray:
    """Theoretical CI half-widths for the ratio estimators.

    The CLT rate sqrt(n P(X_0 > u)) uses the empirical exceedance proportion
    in place of the unknown exceedance probability.
    """
    if not 0 < ci_level < 1:
        raise ValueError("ci_level must lie in (0,1)")
    if n_obs < 1 or p_exceed <= 0:
        raise ValueError("need n_obs >= 1 and p_exceed > 0")
    z = ndtri(1.0 - (1.0 - ci_level) / 2.0)
    variances = np.diag(result.transformed) / (n_obs * p_exceed)
    return z * np.sqrt(np.maximum(variances, 0.0))


def extremal_coefficient(variogram: Variogram, h: int) -> float:
    """Extremal coefficient of the Brown-Resnick model at lag h.

    theta(h) = 2 Phi(sqrt(gamma(h)/2)); theta(0) = 1, theta -> 2 as the lag
    grows (asymptotic independence).
    """
    return float(2.0 * ndtr(math.sqrt(float(variogram(h)) / 2.0)))


def _two_minus_theta(variogram: Variogram, h) -> np.ndarray:
    """2 - theta(h), computed via the normal survival function for precision."""
    x = np.sqrt(np.asarray(variogram(h), dtype=float) / 2.0)
    return 2.0 * ndtr(-x)


def default_h_trunc(model: ModelSpec, eps: float = 1e-4, cap: int = 200) -> int:
    """Smallest lag beyond which the dependence summand drops below eps.

    Uses 2 - theta(h) for Brown-Resnick and a**h for the max-autoregression,
    capped at ``cap``.
    """
    if model.kind == "mar":
        a = float(model.a)
        if a == 0.0:
            return 1
        return min(cap, max(1, math.ceil(math.log(eps) / math.log(a))))
    if model.kind == "brown_resnick":
        for h in range(1, cap + 1):
            if _two_minus_theta(model.variogram, h) < eps:
                return h
        return cap
    raise ValueError(f"no truncation rule for model {model.kind!r}")


@dataclass
class MixingDiagnostics:
    """Numeric evaluation of the mixing and anti-clustering conditions."""

    u_grid: np.ndarray
    r_grid: np.ndarray
    k_grid: np.ndarray
    h_trunc: int
    mixing_series: np.ndarray        # (u, r): u * sum h^2 (2 - theta(h + r))
    mixing_last_term: np.ndarray
    anticlustering: np.ndarray       # (k, r): sum_{h=k}^{r} (2 - theta(h))
    alpha_bound_lags: np.ndarray
    alpha_bound: np.ndarray          # 2 sum (s+1)(2 - theta(s + h))
    alpha_bound_last_term: np.ndarray
    delta_hat: float
    beta1: float
    beta2: float
    n_grid: np.ndarray
    rate_table: dict[str, np.ndarray]
    trends: dict[str, bool]

    def to_json(self) -> dict:
        return {
            "u_grid": self.u_grid.tolist(),
            "r_grid": self.r_grid.tolist(),
            "k_grid": self.k_grid.tolist(),
            "h_trunc": int(self.h_trunc),
            "mixing_series": self.mixing_series.tolist(),
            "mixing_last_term": self.mixing_last_term.tolist(),
            "anticlustering": self.anticlustering.tolist(),
            "alpha_bound_lags": self.alpha_bound_lags.tolist(),
            "alpha_bound": self.alpha_bound.tolist(),
            "alpha_bound_last_term": self.alpha_bound_last_term.tolist(),
            "delta_hat": float(self.delta_hat),
            "beta1": self.beta1,
            "beta2": self.beta2,
            "n_grid": self.n_grid.tolist(),
            "rate_table": {k: v.tolist() for k, v in self.rate_table.items()},
            "trends": self.trends,
        }


def mixing_diagnostics(
    variogram: Variogram,
    u_grid,
    r_grid,
    k_grid,
    h_trunc: int,
    beta1: float = 0.5,
    beta2: float = 0.25,
    n_grid=None,
) -> MixingDiagnostics:
    """Evaluate the mixing/anti-clustering series and CLT rate conditions.

    All series are truncated at ``h_trunc`` with the last-term magnitude
    reported.  Rate sequences follow u_n ~ n**beta1, r_n ~ n**beta2 (margins
    unit Frechet, tail index 1); ``trends`` records whether each sequence
    moves toward its required limit over the n grid.  Always returns; this is
    a diagnostic, not a check.
    """
    if h_trunc < 1:
        raise ValueError("h_trunc must be >= 1")
    if not 0 < beta2 < beta1 < 1:
        raise ValueError("need 0 < beta2 < beta1 < 1")
    u_grid = np.asarray(u_grid, dtype=float)
    r_grid = np.asarray(r_grid, dtype=np.int64)
    k_grid = np.asarray(k_grid, dtype=np.int64)
    hs = np.arange(1, h_trunc + 1, dtype=float)

    tm = lambda h: _two_minus_theta(variogram, h)  # noqa: E731

    mixing = np.empty((u_grid.size, r_grid.size))
    mixing_last = np.empty_like(mixing)
    for j, r in enumerate(r_grid):
        series = float(np.sum(hs**2 * tm(hs + r)))
        last = float(h_trunc**2 * tm(h_trunc + r))
        mixing[:, j] = u_grid * series
        mixing_last[:, j] = u_grid * last

    anticluster = np.zeros((k_grid.size, r_grid.size))
    for i, k in enumerate(k_grid):
        for j, r in enumerate(r_grid):
            if k <= r:
                lags = np.arange(k, r + 1, dtype=float)
                anticluster[i, j] = float(np.sum(tm(lags)))

    lags = np.array(sorted(set(k_grid.tolist()) | set(r_grid.tolist())), dtype=np.int64)
    s = np.arange(0, h_trunc + 1, dtype=float)

    def alpha_bound_at(h):
        return 2.0 * float(np.sum((s + 1) * tm(s + h)))

    alpha_bound = np.array([alpha_bound_at(h) for h in lags])
    alpha_last = np.array([2.0 * (h_trunc + 1) * float(tm(h_trunc + h)) for h in lags])

    # effective polynomial decay exponent of the mixing bound, measured at
    # large reference lags where the asymptotic rate has set in
    h_ref = max(20, int(lags.max(initial=1)))
    b1, b2 = alpha_bound_at(h_ref), alpha_bound_at(2 * h_ref)
    if b1 > 0.0 and b2 > 0.0:
        delta_hat = float((math.log(b1) - math.log(b2)) / math.log(2.0))
    else:
        delta_hat = math.inf

    if n_grid is None:
        n_grid = np.logspace(3, 9, 13)
    n_grid = np.asarray(n_grid, dtype=float)
    u_n = n_grid**beta1
    r_n = np.maximum(1, np.round(n_grid**beta2)).astype(np.int64)
    p_n = -np.expm1(-1.0 / u_n)

    mixing_seq = np.array(
        [u * float(np.sum(hs**2 * tm(hs + r))) for u, r in zip(u_n, r_n)]
    )
    exp_cons = 1.0 if math.isinf(delta_hat) else delta_hat / (1.0 + delta_hat)
    exp_clt = 1.0 if math.isinf(delta_hat) else delta_hat / (4.0 + delta_hat)
    rate_table = {
        "n_times_p": n_grid * p_n,
        "r_n_times_p": r_n * p_n,
        "mixing_condition": mixing_seq,
        "consistency_rate": n_grid**exp_cons * p_n,
        "clt_rate_delta_hat": n_grid**exp_clt * p_n,
        "clt_rate_delta2": np.sqrt(n_grid) * p_n**1.5 / np.abs(np.log(p_n)),
    }
    trends = {
        "n_times_p_diverges": bool(rate_table["n_times_p"][-1] > rate_table["n_times_p"][0]),
        "r_n_times_p_vanishes": bool(
            rate_table["r_n_times_p"][-1] < rate_table["r_n_times_p"][0]
        ),
        "mixing_condition_vanishes": bool(
            mixing_seq[-1] < mixing_seq[0] or mixing_seq[-1] == 0.0
        ),
        "consistency_rate_diverges": bool(
            rate_table["consistency_rate"][-1] > rate_table["consistency_rate"][0]
        ),
        "clt_rate_delta_hat_diverges": bool(
            rate_table["clt_rate_delta_hat"][-1] > rate_table["clt_rate_delta_hat"][0]
        ),
        "clt_rate_delta2_diverges": bool(
            rate_table["clt_rate_delta2"][-1] > rate_table["clt_rate_delta2"][0]
        ),
        "anticlustering_vanishes_in_k": (
            None
            if k_grid.size < 2 or r_grid.size == 0
            else bool(
                anticluster[-1, -1] < anticluster[0, -1] or anticluster[-1, -1] == 0.0
            )
        ),
    }
    return MixingDiagnostics(
        u_grid=u_grid,
        r_grid=r_grid,
        k_grid=k_grid,
        h_trunc=int(h_trunc),
        mixing_series=mixing,
        mixing_last_term=mixing_last,
        anticlustering=anticluster,
        alpha_bound_lags=lags,
        alpha_bound=alpha_bound,
        alpha_bound_last_term=alpha_last,
        delta_hat=delta_hat,
        beta1=float(beta1),
        beta2=float(beta2),
        n_grid=n_grid,
        rate_table=rate_table,
        trends=trends,
    )
