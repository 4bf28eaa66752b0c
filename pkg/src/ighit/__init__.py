"""First-passage times of the inverse Gaussian subordinator.

Densities, distribution functions, transforms, moments, tail bounds,
fractional-PDE residual checks, exact samplers and a verification CLI for the
hitting-time process of inverse Gaussian, stable and tempered stable
subordinators, and for Brownian motion run on the hitting-time clock.
"""

__version__ = "0.1.0"

from .errors import BudgetExceeded, DomainError, NonConvergence, NumericalInstability
from .numerics import (
    DEFAULT_SPEC,
    LaplaceFunction,
    NumericSpec,
    bessel_k,
    erf,
    erfc,
    erfcx,
    integrate_interval,
    integrate_semi_infinite,
    invert_laplace,
    invert_laplace_batch,
    upper_gamma,
)
from .subordinators import (
    IGMarginal,
    IGParams,
    IGSubordinator,
    SamplePath,
    StableSubordinator,
    TemperedStableSubordinator,
    ig_cdf,
    ig_levy_tail,
    ig_pdf,
    ig_psi,
    ig_sample,
    simulate_path,
    stable_cdf,
    stable_pdf,
    stable_sample,
    ts_levy_tail,
    ts_pdf,
    ts_psi,
    ts_sample,
)
from .hitting import (
    HittingDensityEval,
    TailBoundReport,
    hit_boundary_slope,
    hit_boundary_value,
    hit_cdf,
    hit_lt_space,
    hit_lt_time,
    hit_llt,
    hit_mean,
    hit_mean_asymptote,
    hit_moment,
    hit_moment_quadrature,
    hit_pdf_convolution,
    hit_pdf_integral,
    hit_pdf_table,
    hit_second_moment,
    hit_survival,
    hit_variance,
    invert_path,
    sample_hitting_times,
    stable_hit_pdf,
    stable_hit_survival,
    stable_hit_tail_report,
    tail_report,
)
from .subordinated import (
    SubordinatedEval,
    sub_cdf_interpolant,
    sub_mass_and_second_moment,
    sub_pdf,
    sub_pdf_table,
    sub_sample_path,
    sub_sample_values,
)
from .residuals import (
    GridBox,
    ResidualReport,
    caputo_derivative,
    residual_frac_hitting,
    residual_frac_ig,
    residual_hitting_pde,
    residual_ig_pde,
    residual_pseudo_lt,
    residual_subordinated,
    residual_subordinated_frac,
    residual_ts_pde,
)
from .montecarlo import (
    HistogramTable,
    MCEstimate,
    ecdf_ks,
    estimate_moment,
    histogram_density,
    ks_critical_1pct,
)
from .verification import VerificationRecord, VerificationReport, run_verification
