"""Driving increasing Levy processes: inverse Gaussian, stable, tempered stable.

All three families sit behind one small interface (Laplace exponent, Levy
tail, marginal density, exact increment sampler) consumed by the hitting-time
machinery.  Samplers take an explicit numpy Generator; there is no hidden
global RNG state anywhere in the package.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import BudgetExceeded, DomainError
from .numerics import (
    DEFAULT_SPEC,
    NumericSpec,
    bessel_k,
    erfcx,
    invert_laplace_batch,
    norm_cdf,
    upper_gamma,
)

SQRT_2PI = math.sqrt(2.0 * math.pi)


@dataclass(frozen=True)
class IGParams:
    """Barrier slope delta and Brownian drift gamma of the inverse Gaussian process.

    gamma = 0 is admitted as the driftless limiting case; closed forms branch
    analytically there.
    """

    delta: float
    gamma: float

    def __post_init__(self):
        if not self.delta > 0:
            raise DomainError("delta must be positive")
        if self.gamma < 0:
            raise DomainError("gamma must be nonnegative")

    def marginal(self, t: float) -> "IGMarginal":
        """Marginal law of the process increment over an interval of length t."""
        return IGMarginal(self.delta * t, self.gamma)


@dataclass(frozen=True)
class IGMarginal:
    """IG(a, b) marginal parameters; b = 0 gives the one-sided 1/2-stable law."""

    a: float
    b: float

    def __post_init__(self):
        if not self.a > 0:
            raise DomainError("a must be positive")
        if self.b < 0:
            raise DomainError("b must be nonnegative")

    @property
    def mean(self) -> float:
        if self.b == 0.0:
            return math.inf
        return self.a / self.b

    @property
    def variance(self) -> float:
        if self.b == 0.0:
            return math.inf
        return self.a / self.b ** 3


def ig_pdf(x, m: IGMarginal):
    """IG(a, b) density a x^(-3/2) exp(ab - (a^2/x + b^2 x)/2) / sqrt(2 pi)."""
    x_arr = np.asarray(x, dtype=float)
    scalar = x_arr.ndim == 0
    if np.any(x_arr <= 0):
        raise DomainError("ig_pdf requires x > 0")
    log_pdf = (math.log(m.a) - 0.5 * math.log(2.0 * math.pi) - 1.5 * np.log(x_arr)
               + m.a * m.b - 0.5 * (m.a ** 2 / x_arr + m.b ** 2 * x_arr))
    out = np.exp(log_pdf)
    return float(out) if scalar else out


def ig_cdf(x, m: IGMarginal):
    """IG(a, b) distribution function, overflow-safe for large ab.

    Plain form Phi(b sqrt(x) - a/sqrt(x)) + e^(2ab) Phi(-b sqrt(x) - a/sqrt(x))
    for moderate ab; for 2ab > 30 the second term is evaluated through erfcx
    so the e^(2ab) factor never materialises.
    """
    x_arr = np.asarray(x, dtype=float)
    scalar = x_arr.ndim == 0
    out = np.zeros_like(x_arr)
    pos = x_arr > 0
    if pos.any():
        xp = x_arr[pos]
        sq = np.sqrt(xp)
        u = m.b * sq - m.a / sq
        v = m.b * sq + m.a / sq
        if 2.0 * m.a * m.b <= 30.0:
            vals = norm_cdf(u) + math.exp(2.0 * m.a * m.b) * norm_cdf(-v)
        else:
            vals = norm_cdf(u) + 0.5 * np.exp(-0.5 * u * u) * erfcx(v / math.sqrt(2.0))
        out[pos] = np.clip(vals, 0.0, 1.0)
    return float(out) if scalar else out


def ig_sample(m: IGMarginal, rng: np.random.Generator, size=None):
    """Exact IG(a, b) draws by the transformation-with-rejection scheme.

    A chi-square(1) variate nu gives the smaller quadratic root
    x0 = a/b + nu/(2 b^2) - sqrt(4 a b nu + nu^2)/(2 b^2), accepted with
    probability a/(a + b x0), else (a/b)^2 / x0 is returned.  b = 0 delegates
    to the one-sided 1/2-stable representation a^2 / Z^2.
    """
    shape = () if size is None else size
    if m.b == 0.0:
        z = rng.standard_normal(shape)
        out = (m.a / z) ** 2
        return float(out) if size is None else out
    nu = rng.standard_normal(shape) ** 2
    mu = m.a / m.b
    x0 = mu + nu / (2.0 * m.b ** 2) - np.sqrt(4.0 * m.a * m.b * nu + nu ** 2) / (2.0 * m.b ** 2)
    x0 = np.maximum(x0, 1e-300)
    accept = rng.uniform(size=shape) <= m.a / (m.a + m.b * x0)
    out = np.where(accept, x0, mu ** 2 / x0)
    return float(out) if size is None else out


def ig_levy_tail(u, p: IGParams):
    """Expected rate of jumps exceeding u: the integrated IG Levy density.

    Closed form delta * [sqrt(2/(pi u)) e^(-gamma^2 u / 2) - gamma erfc(...)],
    evaluated as e^(-gamma^2 u/2) * (sqrt(2/(pi u)) - gamma erfcx(...)) so both
    factors stay bounded for large gamma^2 u.
    """
    u_arr = np.asarray(u, dtype=float)
    scalar = u_arr.ndim == 0
    if np.any(u_arr <= 0):
        raise DomainError("ig_levy_tail requires u > 0")
    g = p.gamma
    bracket = np.sqrt(2.0 / (math.pi * u_arr))
    if g > 0:
        bracket = bracket - g * erfcx(g * np.sqrt(u_arr / 2.0))
    out = p.delta * np.exp(-0.5 * g * g * u_arr) * bracket
    return float(out) if scalar else out


def ig_psi(s, p: IGParams):
    """Laplace exponent delta (sqrt(gamma^2 + 2 s) - gamma) of the IG process."""
    s_arr = np.asarray(s)
    scalar = np.ndim(s) == 0
    out = p.delta * (np.sqrt(p.gamma ** 2 + 2.0 * s_arr) - p.gamma)
    if scalar:
        return out.item()
    return out


# ---------------------------------------------------------------------------
# Stable and tempered stable subordinators
#
# Scaling convention fixed throughout: D(t) has Laplace transform e^(-t s^beta)
# exactly, and the tempered process D_mu(t) has e^(-t ((s+mu)^beta - mu^beta)).
# The Levy-density constant c = beta / Gamma(1 - beta) reproduces exactly these
# transforms; Monte Carlo tests assert the convention.
# ---------------------------------------------------------------------------

def stable_pdf(u, t: float, beta: float, spec: NumericSpec = DEFAULT_SPEC):
    """Density of the beta-stable subordinator D(t) at u.

    beta = 1/2 uses the closed form t u^(-3/2) e^(-t^2/(4u)) / (2 sqrt(pi));
    beta = 1/3 the exact Bessel-K form.  Other beta invert e^(-t s^beta)
    numerically: a deliberately low-accuracy route (roughly percent-level in
    the bulk) whose instability detector raises rather than return garbage in
    the steep left onset.  Note IG(a, 0) coincides with this density at
    beta = 1/2 under t = a sqrt(2): both transforms equal e^(-a sqrt(2 s)).
    """
    if not 0.0 < beta < 1.0:
        raise DomainError("beta must lie in (0, 1)")
    if t <= 0:
        raise DomainError("t must be positive")
    u_arr = np.asarray(u, dtype=float)
    scalar = u_arr.ndim == 0
    if np.any(u_arr <= 0):
        raise DomainError("stable_pdf requires u > 0")
    if beta == 0.5:
        out = t / (2.0 * math.sqrt(math.pi)) * u_arr ** -1.5 * np.exp(-t * t / (4.0 * u_arr))
        return float(out) if scalar else out
    if beta == 1.0 / 3.0:
        # closed Bessel form: density of the unit 1/3-stable law at w is
        # (1/(3 pi)) w^(-3/2) K_(1/3)(2 / sqrt(27 w)); scaled by t^(1/beta)
        arg = 2.0 / math.sqrt(27.0) * t ** 1.5 / np.sqrt(u_arr)
        out = t ** 1.5 / (3.0 * math.pi) * u_arr ** -1.5 * bessel_k(1.0 / 3.0, arg)
        return float(out) if scalar else out
    flat = np.atleast_1d(u_arr)
    # left tail decays like exp(-(1-beta)(w/beta)^(-beta/(1-beta))) in the
    # scaled variable w = u t^(-1/beta); below ~e^-30 of that bound the value
    # is negligible and the real-axis inversion would only return noise
    w = flat * t ** (-1.0 / beta)
    expo = (1.0 - beta) * (w / beta) ** (-beta / (1.0 - beta))
    vals = np.zeros_like(flat)
    live = expo < 30.0
    if live.any():
        vals[live] = invert_laplace_batch(lambda s: np.exp(-t * s ** beta),
                                          flat[live], spec)
    vals = np.maximum(vals, 0.0)
    return float(vals[0]) if scalar else vals.reshape(u_arr.shape)


def stable_cdf(x, t: float, beta: float, spec: NumericSpec = DEFAULT_SPEC):
    """P(D(t) <= x); closed erfc form at beta = 1/2, quadrature otherwise."""
    x_arr = np.asarray(x, dtype=float)
    scalar = x_arr.ndim == 0
    out = np.zeros_like(x_arr)
    pos = x_arr > 0
    if beta == 0.5:
        from .numerics import erfc
        out[pos] = erfc(t / (2.0 * np.sqrt(x_arr[pos])))
    else:
        from .numerics import integrate_interval
        for idx in np.argwhere(pos).ravel():
            out.flat[idx] = integrate_interval(
                lambda v: stable_pdf(np.maximum(v, 1e-300), t, beta, spec),
                0.0, float(x_arr.flat[idx]), spec)
    return float(out) if scalar else out


def stable_levy_tail(u, beta: float):
    """Levy tail u^(-beta) / Gamma(1 - beta) of the stable subordinator."""
    u_arr = np.asarray(u, dtype=float)
    scalar = u_arr.ndim == 0
    if np.any(u_arr <= 0):
        raise DomainError("stable_levy_tail requires u > 0")
    out = u_arr ** (-beta) / math.gamma(1.0 - beta)
    return float(out) if scalar else out


def ts_pdf(u, t: float, beta: float, mu: float, spec: NumericSpec = DEFAULT_SPEC):
    """Tempered stable density e^(-mu u + mu^beta t) * stable density."""
    if mu < 0:
        raise DomainError("mu must be nonnegative")
    u_arr = np.asarray(u, dtype=float)
    scalar = u_arr.ndim == 0
    if np.any(u_arr <= 0):
        raise DomainError("ts_pdf requires u > 0")
    tilt = np.exp(-mu * u_arr + mu ** beta * t)
    out = tilt * stable_pdf(u_arr, t, beta, spec)
    return float(out) if scalar else out


def ts_levy_tail(u, beta: float, mu: float):
    """Integrated tempered stable Levy density c e^(-mu y) y^(-beta-1) beyond u.

    c = beta / Gamma(1 - beta); the integral is mu^beta * Gamma(-beta, mu u)
    via the upper incomplete gamma with negative parameter.
    """
    if not 0.0 < beta < 1.0:
        raise DomainError("beta must lie in (0, 1)")
    if mu < 0:
        raise DomainError("mu must be nonnegative")
    u_arr = np.asarray(u, dtype=float)
    scalar = u_arr.ndim == 0
    if np.any(u_arr <= 0):
        raise DomainError("ts_levy_tail requires u > 0")
    c = beta / math.gamma(1.0 - beta)
    if mu == 0.0:
        out = (c / beta) * u_arr ** (-beta)
        return float(out) if scalar else out
    if beta == 0.5:
        # Gamma(-1/2, z) = 2 (e^-z / sqrt(z) - sqrt(pi) erfc(sqrt(z))), vectorised
        from .numerics import erfc
        z = mu * u_arr
        sq = np.sqrt(z)
        gam = 2.0 * (np.exp(-z) / sq - math.sqrt(math.pi) * erfc(sq))
        out = c * math.sqrt(mu) * gam
        return float(out) if scalar else out
    flat = np.atleast_1d(u_arr)
    vals = np.array([c * mu ** beta * upper_gamma(-beta, mu * ui) for ui in flat])
    return float(vals[0]) if scalar else vals.reshape(u_arr.shape)


def ts_psi(s, beta: float, mu: float):
    """Laplace exponent (s + mu)^beta - mu^beta of the tempered stable process."""
    s_arr = np.asarray(s)
    out = (s_arr + mu) ** beta - mu ** beta
    return out.item() if np.ndim(s) == 0 else out


def stable_sample(t: float, beta: float, rng: np.random.Generator, size=None):
    """Exact positive-stable draws with Laplace transform e^(-t s^beta).

    Kanter's representation: with U uniform on (0, pi) and E standard
    exponential, sin(beta U) sin((1-beta) U)^((1-beta)/beta) /
    (sin(U)^(1/beta) E^((1-beta)/beta)) has transform e^(-s^beta); the result
    scales by t^(1/beta).
    """
    if not 0.0 < beta < 1.0:
        raise DomainError("beta must lie in (0, 1)")
    if t <= 0:
        raise DomainError("t must be positive")
    shape = () if size is None else size
    u = rng.uniform(0.0, math.pi, shape)
    e = rng.standard_exponential(shape)
    ratio = (1.0 - beta) / beta
    s = (np.sin(beta * u) * np.sin((1.0 - beta) * u) ** ratio
         / (np.sin(u) ** (1.0 / beta) * e ** ratio))
    out = t ** (1.0 / beta) * s
    return float(out) if size is None else out


def ts_sample(t: float, beta: float, mu: float, rng: np.random.Generator,
              size=None, trial_cap: int = 10_000):
    """Tempered stable draws by exponential-tilting rejection.

    Stable proposals are accepted with probability e^(-mu x); the expected
    trial count is e^(mu^beta t).  A loop exceeding trial_cap total passes
    raises BudgetExceeded (mu^beta t too large for naive tilting).
    """
    if mu < 0:
        raise DomainError("mu must be nonnegative")
    n = 1 if size is None else int(np.prod(size))
    out = np.empty(n)
    pending = np.arange(n)
    for _ in range(trial_cap):
        draws = stable_sample(t, beta, rng, size=pending.size)
        accept = rng.uniform(size=pending.size) <= np.exp(-mu * draws)
        out[pending[accept]] = draws[accept]
        pending = pending[~accept]
        if pending.size == 0:
            if size is None:
                return float(out[0])
            return out.reshape(size)
    raise BudgetExceeded(
        f"tempered stable rejection exceeded {trial_cap} passes "
        f"(expected trials ~ exp(mu^beta t) = {math.exp(mu ** beta * t):.3g})")


# ---------------------------------------------------------------------------
# Model objects and grid path simulation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SamplePath:
    """A path tabulated on a strictly increasing time grid."""

    times: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        values = np.asarray(self.values, dtype=float)
        if times.shape != values.shape or times.ndim != 1:
            raise DomainError("times and values must be 1-d arrays of equal length")
        if times.size >= 2 and not np.all(np.diff(times) > 0):
            raise DomainError("times must be strictly increasing")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "values", values)

    @property
    def is_nondecreasing(self) -> bool:
        return bool(np.all(np.diff(self.values) >= 0))

    def to_csv(self, path) -> None:
        from .tables import write_csv
        write_csv(path, ["t", "value"], zip(self.times, self.values))

    def to_json(self, path, **metadata) -> None:
        from .tables import write_json
        payload = {"times": list(map(float, self.times)),
                   "values": list(map(float, self.values))}
        payload.update(metadata)
        write_json(path, payload)

    @classmethod
    def from_json(cls, path) -> "SamplePath":
        with open(path, "r", encoding="utf-8") as fh:
            payload = json.load(fh)
        return cls(np.array(payload["times"]), np.array(payload["values"]))


@dataclass(frozen=True)
class IGSubordinator:
    """Inverse Gaussian subordinator as a SubordinatorModel instance."""

    params: IGParams
    # local power of the Levy tail at 0+ (Pi(u) ~ C u^-p); drives the endpoint
    # substitution in the hitting-time convolution
    tail_exponent: float = 0.5

    def psi(self, s):
        return ig_psi(s, self.params)

    def levy_tail(self, u):
        return ig_levy_tail(u, self.params)

    def marginal_pdf(self, u, x: float):
        return ig_pdf(u, self.params.marginal(x))

    def marginal_cdf(self, u, x: float):
        return ig_cdf(u, self.params.marginal(x))

    def sample_increment(self, dt: float, rng: np.random.Generator, size=None):
        return ig_sample(self.params.marginal(dt), rng, size)


@dataclass(frozen=True)
class StableSubordinator:
    """beta-stable subordinator with transform e^(-t s^beta)."""

    beta: float
    spec: NumericSpec = DEFAULT_SPEC

    def __post_init__(self):
        if not 0.0 < self.beta < 1.0:
            raise DomainError("beta must lie in (0, 1)")

    @property
    def tail_exponent(self) -> float:
        return self.beta

    def psi(self, s):
        s_arr = np.asarray(s)
        out = s_arr ** self.beta
        return out.item() if np.ndim(s) == 0 else out

    def levy_tail(self, u):
        return stable_levy_tail(u, self.beta)

    def marginal_pdf(self, u, x: float):
        return stable_pdf(u, x, self.beta, self.spec)

    def marginal_cdf(self, u, x: float):
        return stable_cdf(u, x, self.beta, self.spec)

    def sample_increment(self, dt: float, rng: np.random.Generator, size=None):
        return stable_sample(dt, self.beta, rng, size)


@dataclass(frozen=True)
class TemperedStableSubordinator:
    """Tempered stable subordinator with transform e^(-t ((s+mu)^beta - mu^beta))."""

    beta: float
    mu: float
    spec: NumericSpec = DEFAULT_SPEC

    def __post_init__(self):
        if not 0.0 < self.beta < 1.0:
            raise DomainError("beta must lie in (0, 1)")
        if self.mu < 0:
            raise DomainError("mu must be nonnegative")

    @property
    def tail_exponent(self) -> float:
        return self.beta

    def psi(self, s):
        return ts_psi(s, self.beta, self.mu)

    def levy_tail(self, u):
        return ts_levy_tail(u, self.beta, self.mu)

    def marginal_pdf(self, u, x: float):
        return ts_pdf(u, x, self.beta, self.mu, self.spec)

    def sample_increment(self, dt: float, rng: np.random.Generator, size=None):
        return ts_sample(dt, self.beta, self.mu, rng, size)


def simulate_path(model, horizon: float, dt: float, rng: np.random.Generator) -> SamplePath:
    """Grid path by cumulating exact i.i.d. increments over steps of length dt.

    Marginals at grid times are exact (no discretisation error); dt only sets
    the resolution available to downstream path inversion.
    """
    if horizon <= 0:
        raise DomainError("horizon must be positive")
    if not 0 < dt <= horizon:
        raise DomainError("dt must satisfy 0 < dt <= horizon")
    n_steps = int(round(horizon / dt))
    times = dt * np.arange(n_steps + 1)
    increments = model.sample_increment(dt, rng, size=n_steps)
    values = np.concatenate([[0.0], np.cumsum(increments)])
    return SamplePath(times, values)
