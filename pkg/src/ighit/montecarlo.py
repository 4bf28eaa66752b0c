"""Statistical estimation harness: the universal third oracle.

Sampling is chunked; chunk k draws from a substream seeded by (seed, k) and
chunks merge in index order, so estimates are bit-identical however the work
is scheduled.  Acceptance bands elsewhere in the package are 4 standard
errors wide, keeping the whole suite's false-alarm rate negligible.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from .errors import DomainError

# asymptotic two-sided Kolmogorov-Smirnov critical coefficient at the 1% level
KS_COEFF_1PCT = 1.628


@dataclass(frozen=True)
class MCEstimate:
    """A Monte Carlo estimate with its standard error and provenance."""

    value: float
    std_error: float
    n_samples: int
    seed: int
    elapsed: float

    def to_dict(self) -> dict:
        # elapsed is wall-clock and deliberately excluded: serialised reports
        # must be byte-identical across runs
        return {"value": self.value, "std_error": self.std_error,
                "n_samples": self.n_samples, "seed": self.seed}


def estimate_moment(sampler, q: float, n: int, seed: int,
                    chunk_size: int = 65536) -> MCEstimate:
    """Mean of sampler(...)^q over n draws with its standard error.

    sampler(size, rng) must return a 1-d array of draws.
    """
    if n < 2:
        raise DomainError("need at least two samples")
    start = time.perf_counter()
    total = 0.0
    total_sq = 0.0
    done = 0
    chunk_index = 0
    while done < n:
        m = min(chunk_size, n - done)
        rng = np.random.default_rng([seed, chunk_index])
        draws = np.asarray(sampler(m, rng), dtype=float)
        powed = draws if q == 1.0 else draws ** q
        total += float(powed.sum())
        total_sq += float((powed * powed).sum())
        done += m
        chunk_index += 1
    mean = total / n
    var = max(total_sq / n - mean * mean, 0.0)
    se = math.sqrt(var / n)
    return MCEstimate(mean, se, n, seed, time.perf_counter() - start)


def ecdf_ks(samples, analytic_cdf) -> float:
    """Two-sided sup distance between the empirical CDF and an analytic CDF."""
    s = np.sort(np.asarray(samples, dtype=float))
    n = s.size
    if n < 2:
        raise DomainError("need at least two samples")
    cdf_vals = np.asarray(analytic_cdf(s), dtype=float)
    i = np.arange(1, n + 1)
    d_plus = np.max(i / n - cdf_vals)
    d_minus = np.max(cdf_vals - (i - 1) / n)
    return float(max(d_plus, d_minus))


def ks_critical_1pct(n: int) -> float:
    return KS_COEFF_1PCT / math.sqrt(n)


@dataclass(frozen=True)
class HistogramTable:
    """A density-normalised histogram: sum(width * height) = 1."""

    edges: np.ndarray
    heights: np.ndarray

    def mass(self) -> float:
        return float(np.sum(np.diff(self.edges) * self.heights))

    def centers(self) -> np.ndarray:
        return 0.5 * (self.edges[1:] + self.edges[:-1])

    def to_csv(self, path) -> None:
        from .tables import write_csv
        write_csv(path, ["bin_left", "bin_right", "density"],
                  zip(self.edges[:-1], self.edges[1:], self.heights))


def histogram_density(samples, bins: int) -> HistogramTable:
    """Histogram normalised to unit mass."""
    if bins < 10:
        raise DomainError("need at least 10 bins")
    heights, edges = np.histogram(np.asarray(samples, dtype=float), bins=bins,
                                  density=True)
    return HistogramTable(edges, heights)
