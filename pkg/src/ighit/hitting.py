"""The hitting-time (inverse) process of the inverse Gaussian subordinator.

The distribution function comes from the duality P(H(t) <= x) = P(G(x) >= t)
and is exact; the pointwise density has two independent routes (an oscillatory
integral representation and a Levy-tail convolution) that cross-validate each
other; transforms, moments, tail bounds and boundary values complete the
picture.  The stable hitting-time family E(t) lives here too.

Density prefactor: the integral representation is evaluated with
exp(delta*gamma*x - t*gamma^2/2).  The variant with exp(-gamma^2/2) in place
of the t-dependent factor fails normalisation for gamma > 0, t != 1 and is
kept only as `prefactor_mode="literal"` so the verification report can
quantify the discrepancy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, NonConvergence
from .numerics import (
    DEFAULT_SPEC,
    NumericSpec,
    composite_gauss,
    erf,
    erfc,
    erfcx,
    integrate_interval,
    integrate_semi_infinite,
    invert_laplace,
    norm_cdf,
)
from .subordinators import (
    IGParams,
    IGSubordinator,
    SamplePath,
    ig_cdf,
    ig_levy_tail,
    ig_psi,
    stable_cdf,
    stable_pdf,
)

SQRT2 = math.sqrt(2.0)


def _osc_noise_estimate(log_pref: float, delta: float) -> float:
    # absolute error the oscillatory route leaves behind after float64
    # cancellation, amplified by the exp(delta*gamma*x - t*gamma^2/2) prefactor
    return math.exp(log_pref) * delta / math.pi * 2e-16


@dataclass(frozen=True)
class HittingDensityEval:
    """Parameters, tolerances and prefactor convention for density evaluation."""

    params: IGParams
    spec: NumericSpec = DEFAULT_SPEC
    prefactor_mode: str = "corrected"

    def __post_init__(self):
        if self.prefactor_mode not in ("corrected", "literal"):
            raise DomainError("prefactor_mode must be 'corrected' or 'literal'")

    def log_prefactor(self, x, t: float):
        g2 = self.params.gamma ** 2
        if self.prefactor_mode == "corrected":
            return self.params.delta * self.params.gamma * np.asarray(x) - 0.5 * t * g2
        return self.params.delta * self.params.gamma * np.asarray(x) - 0.5 * g2


# ---------------------------------------------------------------------------
# Density, route 1: oscillatory integral representation
# ---------------------------------------------------------------------------

def hit_pdf_integral(x: float, t: float, ev: HittingDensityEval) -> float:
    """Hitting-time density h(x, t) by the oscillatory integral representation.

    After the substitution omega = sqrt(y) the integrand decays like
    exp(-t omega^2) and oscillates with wavenumber delta*sqrt(2)*x; quadrature
    cells follow the oscillation half-periods up to the truncation point
    omega_max = sqrt(-ln(truncation_eps)/t).
    """
    if t <= 0:
        raise DomainError("t must be positive")
    if x < 0:
        raise DomainError("x must be nonnegative")
    if x == 0.0:
        return hit_boundary_value(t, ev.params, mode=ev.prefactor_mode)
    p = ev.params
    spec = ev.spec
    log_pref = float(ev.log_prefactor(x, t))
    if _osc_noise_estimate(log_pref, p.delta) > 0.25 * spec.abs_tol:
        # far enough into the exp(delta*gamma*x) regime that the oscillatory
        # cancellation exceeds the error budget; evaluate through the
        # analytically equal, absolutely convergent convolution form
        base = hit_pdf_convolution(x, t, IGSubordinator(p), spec)
        if ev.prefactor_mode == "literal":
            base *= math.exp(0.5 * p.gamma ** 2 * (t - 1.0))
        return base
    kappa = p.delta * SQRT2 * x
    omega_max = math.sqrt(-math.log(spec.truncation_eps) / t)
    g2 = 0.5 * p.gamma ** 2

    def integrand(w):
        w2 = w * w
        osc = 2.0 * p.gamma * w * np.sin(kappa * w) + 2.0 * SQRT2 * w2 * np.cos(kappa * w)
        return np.exp(-t * w2) / (w2 + g2) * osc

    # the exp(delta*gamma*x) prefactor amplifies inner-quadrature error, so the
    # inner tolerance shrinks with it, down to the float64 cancellation floor
    floor = 5e-17 * max(1.0, omega_max)
    inner_abs = max(spec.abs_tol * math.exp(min(0.0, -log_pref)) * math.pi / p.delta,
                    floor)
    inner_spec = spec.with_(abs_tol=inner_abs)
    period = math.pi / kappa if kappa > 0 else None
    val = integrate_semi_infinite(integrand, inner_spec, cutoff=omega_max, period=period)
    h = p.delta / math.pi * math.exp(log_pref) * val
    if h < 0 and abs(h) <= 10.0 * max(spec.abs_tol, floor * math.exp(log_pref)):
        return 0.0
    return h


def hit_pdf_table(xs, t: float, ev: HittingDensityEval,
                  nodes_per_cell: int = 16, batch: int = 256) -> np.ndarray:
    """Vectorised h(x, t) on an array of x sharing one quadrature grid.

    A fixed composite Gauss grid sized for the fastest oscillation present
    keeps the tabulation error a smooth function of x, which finite-difference
    stencils then cancel instead of amplifying.
    """
    if t <= 0:
        raise DomainError("t must be positive")
    xs = np.asarray(xs, dtype=float)
    if np.any(xs < 0):
        raise DomainError("x must be nonnegative")
    p = ev.params
    spec = ev.spec
    omega_max = math.sqrt(-math.log(spec.truncation_eps) / t)
    kappa_max = p.delta * SQRT2 * float(xs.max(initial=0.0))
    n_cells = max(16, int(math.ceil(2.0 * kappa_max * omega_max / math.pi)))
    if n_cells > 20000:
        raise NonConvergence("oscillation grid too large for tabulation")
    pts, wts = composite_gauss(np.linspace(0.0, omega_max, n_cells + 1), nodes_per_cell)
    w2 = pts * pts
    common = np.exp(-t * w2) / (w2 + 0.5 * p.gamma ** 2)
    sin_w = 2.0 * p.gamma * pts * common * wts
    cos_w = 2.0 * SQRT2 * w2 * common * wts
    out = np.empty_like(xs)
    flat = xs.ravel()
    out_flat = out.ravel()
    for start in range(0, flat.size, batch):
        chunk = flat[start:start + batch]
        phase = np.outer(chunk, p.delta * SQRT2 * pts)
        vals = np.sin(phase) @ sin_w + np.cos(phase) @ cos_w
        out_flat[start:start + batch] = vals
    out_flat *= p.delta / math.pi
    log_pref = np.asarray(ev.log_prefactor(flat, t), dtype=float)
    out_flat *= np.exp(log_pref)
    zero = flat == 0.0
    if zero.any():
        out_flat[zero] = hit_boundary_value(t, p, mode=ev.prefactor_mode)
    # points beyond the oscillatory conditioning limit go through the scalar
    # evaluator, which delegates to the convolution form there
    bad = (np.exp(log_pref) * p.delta / math.pi * 2e-16 > 0.25 * spec.abs_tol) & (flat > 0)
    for idx in np.argwhere(bad).ravel():
        out_flat[idx] = hit_pdf_integral(float(flat[idx]), t, ev)
    return out


# ---------------------------------------------------------------------------
# Density, route 2: Levy-tail convolution (any strictly increasing subordinator)
# ---------------------------------------------------------------------------

def hit_pdf_convolution(x: float, t: float, model,
                        spec: NumericSpec = DEFAULT_SPEC) -> float:
    """Hitting-time density as the convolution of the Levy tail with the marginal.

    q(x, t) = integral over y in (0, t) of levy_tail(t - y) * marginal_pdf(y, x).
    The tail blows up like (t-y)^(-p) at the right endpoint (p = model.tail
    exponent), integrably; substituting t - y = v^(1/(1-p)) flattens it.
    """
    if t <= 0:
        raise DomainError("t must be positive")
    if x <= 0:
        raise DomainError("x must be positive")
    p_exp = model.tail_exponent
    q = 1.0 / (1.0 - p_exp)
    v_end = t ** (1.0 / q)

    def integrand(v):
        u = v ** q
        y = t - u
        ok = y > t * 1e-14
        out = np.zeros_like(v)
        if np.any(ok):
            tail = model.levy_tail(u[ok])
            pdf = model.marginal_pdf(y[ok], x)
            out[ok] = tail * pdf * q * v[ok] ** (q - 1.0)
        return out

    return integrate_interval(integrand, 0.0, v_end, spec)


# ---------------------------------------------------------------------------
# Distribution function by duality (exact)
# ---------------------------------------------------------------------------

def _ig_cdf_at(t: float, a, b: float):
    """IG(a, b) distribution function at t, vectorised over the a parameter."""
    a_arr = np.asarray(a, dtype=float)
    sq = math.sqrt(t)
    u = b * sq - a_arr / sq
    v = b * sq + a_arr / sq
    with np.errstate(over="ignore"):
        small = 2.0 * a_arr * b <= 30.0
        plain = norm_cdf(u) + np.where(small, np.exp(2.0 * a_arr * b), 0.0) * norm_cdf(-v)
        stable = norm_cdf(u) + 0.5 * np.exp(-0.5 * u * u) * erfcx(v / SQRT2)
    return np.clip(np.where(small, plain, stable), 0.0, 1.0)


def hit_cdf(x, t: float, params: IGParams):
    """P(H(t) <= x) = P(G(x) >= t), exact through the IG distribution function."""
    if t <= 0:
        raise DomainError("t must be positive")
    x_arr = np.asarray(x, dtype=float)
    scalar = x_arr.ndim == 0
    if np.any(x_arr < 0):
        raise DomainError("x must be nonnegative")
    out = np.zeros_like(x_arr)
    pos = x_arr > 0
    if pos.any():
        out[pos] = 1.0 - _ig_cdf_at(t, params.delta * x_arr[pos], params.gamma)
    return float(out) if scalar else out


def hit_survival(x, t: float, params: IGParams):
    """P(H(t) > x) = P(G(x) < t); the duality route used by tail reports."""
    x_arr = np.asarray(x, dtype=float)
    scalar = x_arr.ndim == 0
    out = np.ones_like(x_arr)
    pos = x_arr > 0
    if pos.any():
        out[pos] = _ig_cdf_at(t, params.delta * x_arr[pos], params.gamma)
    return float(out) if scalar else out


# ---------------------------------------------------------------------------
# Transforms
# ---------------------------------------------------------------------------

def hit_lt_time(x: float, s, params: IGParams):
    """Time-Laplace transform of h(x, .): (delta/s) Psi-part e^(-x Psi) closed form."""
    if x < 0:
        raise DomainError("x must be nonnegative")
    s_arr = np.asarray(s)
    psi = ig_psi(s_arr, params)
    out = (psi / s_arr) * np.exp(-x * psi)
    return out.item() if np.ndim(s) == 0 else out


def hit_llt(u, s, params: IGParams):
    """Double (space, time) Laplace transform of the density."""
    s_arr = np.asarray(s, dtype=float)
    u_arr = np.asarray(u, dtype=float)
    psi = ig_psi(s_arr, params)
    if np.any(u_arr + psi <= 0):
        raise DomainError("hit_llt requires u > -Psi(s)")
    out = psi / (s_arr * (u_arr + psi))
    return out.item() if (np.ndim(u) == 0 and np.ndim(s) == 0) else out


def hit_lt_space(mu: float, t: float, params: IGParams,
                 spec: NumericSpec = DEFAULT_SPEC,
                 prefactor_mode: str = "corrected") -> float:
    """Space-Laplace transform of h(., t), valid for mu > delta*gamma.

    Integral form with the global factor e^(-t gamma^2/2); the y^(1/2)
    endpoint is flattened by y = u^2.  For gamma = 0, delta = 1 this reduces
    to erfcx(mu sqrt(t/2)).
    """
    if t <= 0:
        raise DomainError("t must be positive")
    d, g = params.delta, params.gamma
    if mu <= d * g:
        raise DomainError("spatial transform exists only for mu > delta*gamma")
    g2 = 0.5 * g * g
    shift2 = (mu - d * g) ** 2

    def integrand(w):
        w2 = w * w
        return w2 * np.exp(-t * w2) / ((w2 + g2) * (shift2 + 2.0 * d * d * w2))

    omega_max = math.sqrt(-math.log(spec.truncation_eps) / t)
    val = integrate_semi_infinite(integrand, spec, cutoff=omega_max)
    if prefactor_mode == "corrected":
        pref = math.exp(-0.5 * t * g * g)
    else:
        pref = math.exp(-0.5 * g * g)
    return SQRT2 * mu * d * pref / math.pi * 2.0 * val


# ---------------------------------------------------------------------------
# Moments
# ---------------------------------------------------------------------------

def hit_mean(t: float, params: IGParams) -> float:
    """Mean of H(t) in closed form (driftless branch sqrt(2t/pi)/delta)."""
    if t <= 0:
        raise DomainError("t must be positive")
    d, g = params.delta, params.gamma
    if g == 0.0:
        return math.sqrt(2.0 * t / math.pi) / d
    e = erf(g * math.sqrt(0.5 * t))
    return (math.sqrt(t / (2.0 * math.pi)) * math.exp(-0.5 * t * g * g) / d
            + e / (2.0 * d * g)
            + 0.5 * g * t / d * (1.0 + e))


def hit_second_moment(t: float, params: IGParams) -> float:
    """Second moment of H(t).

    Half of the widely printed closed form; the halved version is the one that
    matches density quadrature, transform inversion and Monte Carlo, and whose
    driftless special case t (not 2t) agrees with the half-normal law.
    """
    if t <= 0:
        raise DomainError("t must be positive")
    d, g = params.delta, params.gamma
    if g == 0.0:
        return t / d ** 2
    e = erf(g * math.sqrt(0.5 * t))
    x = math.exp(-0.5 * g * g * t)
    bracket = (x * (g * math.sqrt(2.0 * t) + g ** 3 * SQRT2 * t ** 1.5)
               + math.sqrt(math.pi) * (2.0 * g * g * t + g ** 4 * t * t - 1.0) * e)
    return (0.5 * g * g * t * t / d ** 2
            + t / d ** 2
            + bracket / (2.0 * d ** 2 * g ** 2 * math.sqrt(math.pi)))


def hit_variance(t: float, params: IGParams) -> float:
    return hit_second_moment(t, params) - hit_mean(t, params) ** 2


def density_support_cutoff(t: float, params: IGParams, weight_power: float = 0.0,
                           tail_tol: float = 1e-9) -> float:
    """Smallest power-of-two x beyond which x^q * P(H(t) > x) < tail_tol.

    Used to truncate quadratures of the density: the exact survival only picks
    the truncation point, it never enters the integral value.
    """
    def small_enough(x):
        return x ** weight_power * hit_survival(x, t, params) < tail_tol

    hi = max(1.0, 2.0 * params.gamma * t / params.delta)
    for _ in range(60):
        if small_enough(hi):
            break
        hi *= 2.0
    else:
        raise NonConvergence("could not locate a density support cutoff")
    lo = hi / 2.0
    # bisect so the cutoff does not overshoot into the exp(delta*gamma*x)
    # region where the oscillatory representation loses absolute accuracy
    for _ in range(30):
        mid = 0.5 * (lo + hi)
        if small_enough(mid):
            hi = mid
        else:
            lo = mid
    return 1.05 * hi


def hit_moment_quadrature(q: float, t: float, ev: HittingDensityEval,
                          tail_tol: float = 1e-10) -> float:
    """E H(t)^q by direct quadrature of the integral-route density (q = 0: mass)."""
    x_max = density_support_cutoff(t, ev.params, weight_power=q, tail_tol=tail_tol)

    def f(xs):
        vals = hit_pdf_table(xs, t, ev)
        return vals if q == 0.0 else xs ** q * vals

    edges = np.linspace(0.0, x_max, max(9, int(2 * x_max) + 1))
    return integrate_interval(f, 0.0, x_max, ev.spec, edges=edges)


def hit_moment(q: float, t: float, params: IGParams,
               spec: NumericSpec = DEFAULT_SPEC) -> float:
    """Fractional moment E H(t)^q by inverting Gamma(1+q) / (s Psi(s)^q).

    The numerator is Gamma(1+q): at q = 1 this reproduces the transform
    1/(s Psi) of the mean, which the q*Gamma(1+q) variant fails to do at
    higher q (it is off by a factor q at q = 2).
    """
    if q <= 0:
        raise DomainError("q must be positive")
    if t <= 0:
        raise DomainError("t must be positive")
    gamma_factor = math.gamma(1.0 + q)

    def transform(s):
        return gamma_factor / (s * ig_psi(s, params) ** q)

    return invert_laplace(transform, t, spec)


def hit_mean_asymptote(t: float, params: IGParams, regime: str) -> float:
    """Leading term of E H(t): gamma*t/delta (large t, drift) or sqrt(2t/pi)/delta."""
    if t <= 0:
        raise DomainError("t must be positive")
    d, g = params.delta, params.gamma
    if regime == "large_t":
        if g > 0:
            return g * t / d
        return math.sqrt(2.0 * t / math.pi) / d
    if regime == "small_t":
        return math.sqrt(2.0 * t / math.pi) / d
    raise DomainError("regime must be 'large_t' or 'small_t'")


# ---------------------------------------------------------------------------
# Boundary values and tail behaviour
# ---------------------------------------------------------------------------

def hit_boundary_value(t: float, params: IGParams, mode: str = "corrected") -> float:
    """h(0+, t); with the corrected prefactor this equals the Levy tail at t."""
    if t <= 0:
        raise DomainError("t must be positive")
    base = ig_levy_tail(t, params)
    if mode == "corrected":
        return base
    if mode == "literal":
        return base * math.exp(0.5 * (t - 1.0) * params.gamma ** 2)
    raise DomainError("mode must be 'corrected' or 'literal'")


def hit_boundary_slope(t: float, params: IGParams) -> float:
    """Spatial derivative of the density at x = 0+: twice delta*gamma*h(0, t)."""
    return 2.0 * params.delta * params.gamma * hit_boundary_value(t, params)


@dataclass(frozen=True)
class TailBoundReport:
    """Survival values against a fitted envelope C * shape(x).

    `fitted_gaussian_rate` is the least-squares slope of -ln(survival) against
    the stretched coordinate (x^2 for the IG family, x^(1/(1-beta)) for the
    stable one); `fitted_constant` is the smallest C with survival <= C*shape
    on the grid.
    """

    x_grid: np.ndarray
    survival: np.ndarray
    bound_values: np.ndarray
    fitted_constant: float
    fitted_gaussian_rate: float
    t: float
    label: str = ""
    extra: dict = field(default_factory=dict)

    def ratios(self) -> np.ndarray:
        return self.survival / self.bound_values

    def to_json(self, path) -> None:
        from .tables import write_json
        write_json(path, {
            "label": self.label,
            "t": self.t,
            "x": list(map(float, self.x_grid)),
            "survival": list(map(float, self.survival)),
            "bound": list(map(float, self.bound_values)),
            "fitted_constant": self.fitted_constant,
            "fitted_gaussian_rate": self.fitted_gaussian_rate,
            **self.extra,
        })

    def to_csv(self, path) -> None:
        from .tables import write_csv
        write_csv(path, ["x", "survival", "bound"],
                  zip(self.x_grid, self.survival, self.bound_values))


def tail_report(t: float, params: IGParams, x_grid) -> TailBoundReport:
    """Survival of H(t) on a grid against the envelope x^(-1) e^(dg x - x^2/4t)."""
    if t <= 0:
        raise DomainError("t must be positive")
    xs = np.asarray(x_grid, dtype=float)
    if xs.ndim != 1 or xs.size < 3 or not np.all(np.diff(xs) > 0) or xs[0] <= 0:
        raise DomainError("x_grid must be increasing, positive, with >= 3 points")
    surv = hit_survival(xs, t, params)
    d, g = params.delta, params.gamma
    shape = np.exp(d * g * xs - xs ** 2 / (4.0 * t)) / xs
    c = float(np.max(surv / shape))
    with np.errstate(divide="ignore"):
        log_surv = -np.log(np.maximum(surv, 1e-300))
    rate = float(np.polyfit(xs ** 2, log_surv, 1)[0])
    return TailBoundReport(xs, surv, c * shape, c, rate, t, label="ig_hitting",
                           extra={"delta": d, "gamma": g})


# ---------------------------------------------------------------------------
# Path inversion and hitting-time sampling
# ---------------------------------------------------------------------------

def invert_path(g_path: SamplePath, t_grid) -> SamplePath:
    """Right-continuous generalized inverse of a nondecreasing path on a grid.

    For each t the smallest grid time u with G(u) > t is returned, so the
    inverse is flat exactly over G's jump intervals.
    """
    if not g_path.is_nondecreasing:
        raise DomainError("g_path must be nondecreasing")
    t_arr = np.asarray(t_grid, dtype=float)
    idx = np.searchsorted(g_path.values, t_arr, side="right")
    if np.any(idx >= g_path.values.size):
        raise DomainError("t_grid exceeds the largest path value; extend the path")
    return SamplePath(t_arr, g_path.times[idx])


def sample_hitting_times(t_eval: float, n: int, params: IGParams, dt: float,
                         seed: int, batch_size: int = 20000,
                         block_steps: int = 2048) -> np.ndarray:
    """n independent samples of H(t_eval) from grid paths of G at step dt.

    Each batch derives its own substream from (seed, batch index) and batches
    are filled in fixed order, so results are reproducible regardless of how
    the work would be scheduled.  Returned values are the grid version of the
    inverse: the first grid time at which the simulated G exceeds t_eval.
    """
    if t_eval <= 0 or dt <= 0 or n <= 0:
        raise DomainError("t_eval, dt and n must be positive")
    from .subordinators import ig_sample
    marg = params.marginal(dt)
    g = params.gamma
    u_typical = t_eval * g / params.delta + math.sqrt(t_eval) / params.delta
    max_steps = int(64 * max(1.0, u_typical) / dt)
    out = np.empty(n)
    pos = 0
    n_batches = (n + batch_size - 1) // batch_size
    for b in range(n_batches):
        m = min(batch_size, n - pos)
        rng = np.random.default_rng([seed, b])
        result_steps = np.zeros(m, dtype=np.int64)
        offsets = np.zeros(m)
        steps_base = np.zeros(m, dtype=np.int64)
        active = np.arange(m)
        while active.size:
            incs = ig_sample(marg, rng, size=(active.size, block_steps))
            paths = offsets[active, None] + np.cumsum(incs, axis=1)
            crossed = paths[:, -1] > t_eval
            first = np.argmax(paths > t_eval, axis=1)
            rows = active[crossed]
            result_steps[rows] = steps_base[rows] + first[crossed] + 1
            stay = active[~crossed]
            offsets[stay] = paths[~crossed, -1]
            steps_base[stay] += block_steps
            active = stay
            if active.size and steps_base[active].min() > max_steps:
                raise NonConvergence("paths failed to cross the level; check parameters")
        out[pos:pos + m] = result_steps * dt
        pos += m
    return out


# ---------------------------------------------------------------------------
# Stable hitting-time family E(t) = inf{x : D(x) > t}
# ---------------------------------------------------------------------------

def stable_hit_pdf(x, t: float, beta: float,
                   spec: NumericSpec = DEFAULT_SPEC):
    """Density of E(t): (t/beta) x^(-1-1/beta) f(t x^(-1/beta), 1).

    At beta = 1/2 the composition collapses to e^(-x^2/4t)/sqrt(pi t).
    """
    if not 0.0 < beta < 1.0:
        raise DomainError("beta must lie in (0, 1)")
    if t <= 0:
        raise DomainError("t must be positive")
    x_arr = np.asarray(x, dtype=float)
    scalar = x_arr.ndim == 0
    if np.any(x_arr <= 0):
        raise DomainError("x must be positive")
    arg = t * x_arr ** (-1.0 / beta)
    out = (t / beta) * x_arr ** (-1.0 - 1.0 / beta) * stable_pdf(arg, 1.0, beta, spec)
    return float(out) if scalar else out


def stable_hit_survival(x, t: float, beta: float,
                        spec: NumericSpec = DEFAULT_SPEC):
    """P(E(t) > x) = P(D(x) <= t) by duality."""
    x_arr = np.asarray(x, dtype=float)
    scalar = x_arr.ndim == 0
    flat = np.atleast_1d(x_arr)
    vals = np.array([stable_cdf(t, float(xi), beta, spec) for xi in flat])
    return float(vals[0]) if scalar else vals.reshape(x_arr.shape)


def stable_hit_tail_report(t: float, beta: float, x_grid,
                           spec: NumericSpec = DEFAULT_SPEC) -> TailBoundReport:
    """Stretched-exponential tail of E(t): rate N = (1-beta)(t/beta)^(beta/(beta-1)).

    The envelope power uses the exponent obtained by carrying the small-argument
    stable bound through the scaling substitution, (1-beta/2)/(beta(1-beta)) -
    1 - 1/beta (zero at beta = 1/2, matching the closed form).
    """
    xs = np.asarray(x_grid, dtype=float)
    if xs.ndim != 1 or xs.size < 3 or not np.all(np.diff(xs) > 0) or xs[0] <= 0:
        raise DomainError("x_grid must be increasing, positive, with >= 3 points")
    surv = stable_hit_survival(xs, t, beta, spec)
    rate_n = (1.0 - beta) * (t / beta) ** (beta / (beta - 1.0))
    power = (1.0 - 0.5 * beta) / (beta * (1.0 - beta)) - 1.0 - 1.0 / beta
    stretch = xs ** (1.0 / (1.0 - beta))
    shape = xs ** power * np.exp(-rate_n * stretch)
    c = float(np.max(surv / shape))
    with np.errstate(divide="ignore"):
        log_surv = -np.log(np.maximum(surv, 1e-300))
    rate = float(np.polyfit(stretch, log_surv, 1)[0])
    return TailBoundReport(xs, surv, c * shape, c, rate, t, label="stable_hitting",
                           extra={"beta": beta, "rate_n": rate_n})
