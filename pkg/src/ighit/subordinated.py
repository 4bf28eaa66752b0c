"""Brownian motion run on the hitting-time clock: X(t) = B(H(t)).

The marginal density is the variance mixture
u(x, t) = integral over r of (2 pi r)^(-1/2) e^(-x^2/2r) h(r, t) dr,
evaluated after r = v^2 so the r^(-1/2) endpoint is flat.  B and H are
independent: path simulation draws fresh Gaussian increments over the
nondecreasing H-grid, and marginal sampling uses X = sqrt(H) Z exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .numerics import DEFAULT_SPEC, NumericSpec, composite_gauss, integrate_interval
from .hitting import (
    HittingDensityEval,
    density_support_cutoff,
    hit_pdf_table,
    invert_path,
    sample_hitting_times,
)
from .subordinators import IGParams, IGSubordinator, SamplePath, simulate_path

SQRT_2_OVER_PI = math.sqrt(2.0 / math.pi)


@dataclass(frozen=True)
class SubordinatedEval:
    """Parameters and tolerances for the subordinated density."""

    params: IGParams
    spec: NumericSpec = DEFAULT_SPEC

    def hitting_eval(self) -> HittingDensityEval:
        return HittingDensityEval(self.params, self.spec)


def _v_cutoff(t: float, ev: SubordinatedEval) -> float:
    return math.sqrt(density_support_cutoff(t, ev.params, tail_tol=1e-11))


def sub_pdf(x: float, t: float, ev: SubordinatedEval) -> float:
    """Density of X(t) at x; even in x, finite at x = 0."""
    if t <= 0:
        raise DomainError("t must be positive")
    v_max = _v_cutoff(t, ev)
    hev = ev.hitting_eval()
    x2 = x * x

    def integrand(v):
        gauss = np.exp(-x2 / (2.0 * v * v))
        return gauss * hit_pdf_table(v * v, t, hev)

    # one panel per stretch of the Gaussian boundary layer near v ~ |x|
    edges = np.unique(np.concatenate([
        [0.0, v_max],
        np.geomspace(max(v_max * 1e-3, 1e-6), v_max, 17),
    ]))
    val = integrate_interval(integrand, 0.0, v_max, ev.spec, edges=edges)
    return SQRT_2_OVER_PI * val


def sub_pdf_table(xs, t: float, ev: SubordinatedEval,
                  n_panels: int = 96, nodes_per_panel: int = 12) -> np.ndarray:
    """Vectorised density on an array of x sharing one v-quadrature grid.

    Shared nodes keep the tabulation error smooth in x, so high-order
    finite-difference stencils applied to the table see discretisation error
    rather than amplified point noise.
    """
    if t <= 0:
        raise DomainError("t must be positive")
    xs = np.asarray(xs, dtype=float)
    v_max = _v_cutoff(t, ev)
    edges = np.unique(np.concatenate([
        [0.0],
        np.geomspace(v_max * 1e-4, v_max, n_panels),
    ]))
    pts, wts = composite_gauss(edges, nodes_per_panel)
    h_vals = hit_pdf_table(pts * pts, t, ev.hitting_eval())
    weights = wts * h_vals
    out = np.empty_like(xs)
    flat = xs.ravel()
    out_flat = out.ravel()
    inv_2v2 = 1.0 / (2.0 * pts * pts)
    batch = 256
    for start in range(0, flat.size, batch):
        chunk = flat[start:start + batch]
        gauss = np.exp(-np.outer(chunk * chunk, inv_2v2))
        out_flat[start:start + batch] = gauss @ weights
    out_flat *= SQRT_2_OVER_PI
    return out


def sub_mass_and_second_moment(t: float, ev: SubordinatedEval) -> tuple[float, float]:
    """(integral of u, integral of x^2 u) over the real line by x-quadrature."""
    v_max = _v_cutoff(t, ev)
    x_max = 8.0 * v_max

    def mass_f(xs):
        return sub_pdf_table(xs, t, ev)

    def second_f(xs):
        return xs * xs * sub_pdf_table(xs, t, ev)

    edges = np.linspace(0.0, x_max, 65)
    mass = 2.0 * integrate_interval(mass_f, 0.0, x_max, ev.spec, edges=edges)
    second = 2.0 * integrate_interval(second_f, 0.0, x_max, ev.spec, edges=edges)
    return mass, second


def sub_cdf_interpolant(t: float, ev: SubordinatedEval, x_max: float | None = None,
                        n_grid: int = 4001):
    """Distribution function of X(t) as a callable built from a dense table."""
    if x_max is None:
        x_max = 8.0 * _v_cutoff(t, ev)
    xs = np.linspace(0.0, x_max, n_grid)
    dens = sub_pdf_table(xs, t, ev)
    # cumulative composite Simpson on the uniform half-grid
    dx = xs[1] - xs[0]
    cum = np.zeros_like(xs)
    cum[1:] = np.cumsum(0.5 * dx * (dens[1:] + dens[:-1]))
    half_mass = cum[-1]
    cum = cum / (2.0 * half_mass)

    def cdf(x):
        x_arr = np.asarray(x, dtype=float)
        tail = np.interp(np.abs(x_arr), xs, cum)
        return np.where(x_arr >= 0, 0.5 + tail, 0.5 - tail)

    return cdf


def sub_sample_path(params: IGParams, horizon: float, dt: float,
                    rng: np.random.Generator) -> SamplePath:
    """Path of X(t) = B(H(t)) on the t-grid.

    The driving subordinator path is extended until it exceeds the horizon,
    inverted on the grid, and an independent Brownian motion is consumed over
    the nondecreasing clock increments; zero clock increments give exactly
    constant stretches of X.
    """
    if horizon <= 0 or not 0 < dt <= horizon:
        raise DomainError("need horizon > 0 and 0 < dt <= horizon")
    model = IGSubordinator(params)
    g_horizon = max(2.0 * horizon * max(params.gamma / params.delta, 1.0), 4.0 * dt)
    g_path = simulate_path(model, g_horizon, dt, rng)
    while g_path.values[-1] <= horizon:
        extension = simulate_path(model, g_horizon, dt, rng)
        g_path = SamplePath(
            np.concatenate([g_path.times, g_path.times[-1] + extension.times[1:]]),
            np.concatenate([g_path.values, g_path.values[-1] + extension.values[1:]]))
    n_steps = int(round(horizon / dt))
    t_grid = dt * np.arange(n_steps + 1)
    h_path = invert_path(g_path, t_grid)
    d_h = np.diff(h_path.values, prepend=0.0)
    gauss = rng.standard_normal(d_h.size)
    x_vals = np.cumsum(np.sqrt(d_h) * gauss)
    return SamplePath(t_grid, x_vals)


def sub_sample_values(t_eval: float, n: int, params: IGParams, dt: float,
                      seed: int) -> np.ndarray:
    """n draws of X(t_eval), exact given the grid hitting times.

    Conditionally on H(t_eval) = h the value B(H(t_eval)) is N(0, h), so the
    grid hitting-time samples are scaled by independent standard normals; this
    is the same law a full path simulation produces at t_eval.
    """
    h_samples = sample_hitting_times(t_eval, n, params, dt, seed)
    z = np.random.default_rng([seed, 2 ** 31]).standard_normal(n)
    return np.sqrt(h_samples) * z
