"""Stochastic primitives for a drift-mixture GBM stock universe.

Every stock starts at 1.0 and follows a geometric Brownian motion with a
stock-specific drift ``mu_i`` drawn once from ``N(mu_hat, sigma_hat**2)``
and a shared volatility ``sigma``.  Only the terminal value at the horizon
matters to anything downstream, so the exact solution is sampled directly:

    S_T = exp((mu_i - sigma**2 / 2) * T + sigma * sqrt(T) * z),  z ~ N(0, 1)

Marginally (drift integrated out) the terminal value is lognormal with
log-mean ``mu_hat*T - sigma**2*T/2`` and log-variance
``sigma**2*T + sigma_hat**2*T**2``.

Randomness is reproducible and parallel-safe: every draw comes from a
substream identified by ``SeedSpec(master_seed, stream_index)``.  Normal
variates are produced by the inverse-CDF transform of a 52-bit midpoint
uniform, so each variate consumes exactly one integer from its substream
and results never depend on how work is split across workers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.special import ndtri

# Substream layout: callers that draw a universe and pick a subset reserve
# STREAM_STRIDE consecutive stream indices per trial and add a purpose offset.
STREAM_STRIDE = 4
DRIFT_STREAM = 0
SHOCK_STREAM = 1
PICK_STREAM = 2

_U52_SCALE = 2.0 ** -52


@dataclass(frozen=True)
class ModelParams:
    """The five constants governing the universe.

    n_stocks: number of stocks N in the index.
    horizon: years T until the terminal date.
    sigma: annual volatility, shared by all stocks (per sqrt-year).
    mu_hat: mean of the cross-sectional drift distribution (per year).
    sigma_hat: standard deviation of the drift distribution (per year).
    """

    n_stocks: int
    horizon: float
    sigma: float
    mu_hat: float
    sigma_hat: float

    def __post_init__(self):
        if not isinstance(self.n_stocks, int) or self.n_stocks < 1:
            raise ValueError(f"n_stocks must be a positive integer, got {self.n_stocks!r}")
        for name in ("horizon", "sigma", "mu_hat", "sigma_hat"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise ValueError(f"{name} must be finite, got {value!r}")
        if self.horizon <= 0:
            raise ValueError(f"horizon must be > 0, got {self.horizon!r}")
        if self.sigma < 0:
            raise ValueError(f"sigma must be >= 0, got {self.sigma!r}")
        if self.sigma_hat < 0:
            raise ValueError(f"sigma_hat must be >= 0, got {self.sigma_hat!r}")


@dataclass(frozen=True)
class SeedSpec:
    """Identifies one independent random substream.

    Equal (master_seed, stream_index) pairs always reproduce the same draw
    sequence; distinct pairs give statistically independent streams.
    """

    master_seed: int
    stream_index: int = 0

    def __post_init__(self):
        if not 0 <= self.master_seed < 2 ** 64:
            raise ValueError(f"master_seed must be a 64-bit unsigned integer, got {self.master_seed!r}")
        if self.stream_index < 0:
            raise ValueError(f"stream_index must be non-negative, got {self.stream_index!r}")

    def substream(self, offset: int) -> "SeedSpec":
        """Return a copy shifted by a purpose offset (see STREAM_STRIDE)."""
        return replace(self, stream_index=self.stream_index + offset)

    def generator(self) -> np.random.Generator:
        seq = np.random.SeedSequence([self.master_seed, self.stream_index])
        return np.random.Generator(np.random.PCG64(seq))


def standard_normals(rng: np.random.Generator, count: int) -> np.ndarray:
    """Draw standard normals by inverse CDF of open-interval uniforms.

    Uniforms are bin midpoints (j + 0.5) / 2**52 for a 52-bit integer j, so
    every value lies strictly inside (0, 1) and the transform is exact in
    floating point.  One integer draw is consumed per variate.
    """
    j = rng.integers(0, 1 << 52, size=count)
    return ndtri((j + 0.5) * _U52_SCALE)


@dataclass(frozen=True)
class UniverseDraw:
    """One sampled cross-section: per-stock drifts and gross terminal values."""

    drifts: np.ndarray
    terminal_values: np.ndarray

    def __post_init__(self):
        for name in ("drifts", "terminal_values"):
            arr = np.array(getattr(self, name), dtype=float)  # own copy, frozen below
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)
        if self.drifts.shape != self.terminal_values.shape or self.drifts.ndim != 1:
            raise ValueError("drifts and terminal_values must be 1-d arrays of equal length")
        if self.terminal_values.size == 0:
            raise ValueError("universe must contain at least one stock")
        if not np.all(np.isfinite(self.terminal_values)) or np.any(self.terminal_values <= 0):
            raise ValueError("terminal values must be positive and finite")

    def __len__(self) -> int:
        return self.terminal_values.size


def draw_drifts(params: ModelParams, seed: SeedSpec) -> np.ndarray:
    """Sample the n_stocks per-year drifts, i.i.d. N(mu_hat, sigma_hat**2)."""
    rng = seed.generator()
    z = standard_normals(rng, params.n_stocks)
    return params.mu_hat + params.sigma_hat * z


def terminal_value(mu_i: float, sigma: float, horizon: float, z) -> float:
    """Exact GBM terminal value for one stock given its normal shock z.

    Accepts scalars or arrays for ``mu_i``/``z`` (numpy broadcasting).
    """
    if horizon <= 0:
        raise ValueError(f"horizon must be > 0, got {horizon!r}")
    if sigma < 0:
        raise ValueError(f"sigma must be >= 0, got {sigma!r}")
    drift_term = (mu_i - 0.5 * sigma * sigma) * horizon
    shock_term = sigma * math.sqrt(horizon) * np.asarray(z, dtype=float)
    out = np.exp(drift_term + shock_term)
    return float(out) if out.ndim == 0 else out


def draw_universe(params: ModelParams, seed: SeedSpec) -> UniverseDraw:
    """Draw a full cross-section of terminal values.

    Drift draws and shock draws come from disjoint substreams at offsets
    DRIFT_STREAM and SHOCK_STREAM from ``seed``; callers running many
    trials should space their base stream indices by STREAM_STRIDE.
    """
    drifts = draw_drifts(params, seed.substream(DRIFT_STREAM))
    shock_rng = seed.substream(SHOCK_STREAM).generator()
    z = standard_normals(shock_rng, params.n_stocks)
    values = terminal_value(drifts, params.sigma, params.horizon, z)
    return UniverseDraw(drifts=drifts, terminal_values=np.asarray(values, dtype=float))


def _as_values(universe_or_values) -> np.ndarray:
    if isinstance(universe_or_values, UniverseDraw):
        return universe_or_values.terminal_values
    arr = np.asarray(universe_or_values, dtype=float)
    if arr.ndim != 1 or arr.size == 0:
        raise ValueError("expected a non-empty 1-d collection of gross values")
    return arr


def index_value(universe_or_values) -> float:
    """Gross value of the index: the plain mean of the terminal values.

    Summation is numpy's pairwise scheme over ascending index order, so the
    result is reproducible run-to-run and across worker counts.
    """
    return float(np.mean(_as_values(universe_or_values)))


def portfolio_return(universe_or_values, subset) -> float:
    """Equal-weighted net return of the stocks at the given distinct indices."""
    values = _as_values(universe_or_values)
    idx = np.asarray(subset, dtype=np.intp)
    if idx.ndim != 1 or idx.size == 0:
        raise ValueError("subset must be a non-empty sequence of indices")
    if len(np.unique(idx)) != idx.size:
        raise ValueError("subset indices must be distinct")
    if np.any(idx < 0) or np.any(idx >= values.size):
        raise ValueError(f"subset indices must lie in [0, {values.size})")
    return float(np.mean(values[idx])) - 1.0
