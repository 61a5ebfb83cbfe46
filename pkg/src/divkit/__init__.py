"""divkit: divergence computation and convex-generator characterization.

Bregman, density-power (dpd) and logarithmic-density-power (ldpd)
divergence families over densities tabulated on uniform grids, plus a
characterization lab that tests numerically whether a convex generator
admits a valid log-transformed divergence for some positive index
triple.  Only the power family K1 y**(1+alpha) + K2 y + K3 does; the
lab's scans and searches produce concrete witnesses for everything
else.
"""

from .characterization import (
    CHAR_EPS_ANALYTIC,
    CHAR_EPS_SEARCH,
    DiagnosticReport,
    UFunctionParams,
    Witness,
    beta_necessity_probe,
    counterexample_search,
    default_theta_grid,
    solve_lbf_family,
    theta_scan,
    u,
    uniform_identity_defect,
)
from .density import (
    DEFAULT_GRID_N,
    GridDensity,
    bump_mixture,
    density_from_spec,
    load_density_csv,
    normalize,
    random_bump_density,
    random_bump_pair,
    require_same_grid,
    resample,
    save_density_csv,
    uniform_density,
)
from .divergences import (
    MIN_ALPHA,
    QUAD_EPS,
    DivergenceValue,
    IndexTriple,
    bregman,
    dpd,
    holder_gap,
    kl,
    ldpd,
    ldpd_triple,
    log_bregman,
)
from .errors import (
    DegenerateDensityError,
    DegenerateIntegralError,
    DivkitError,
    GridMismatchError,
    NotStandardizableError,
)
from .generators import (
    PROBE_GRID,
    ConvexGenerator,
    PowerGenerator,
    StandardizedGenerator,
    TailSlope,
    cosh_generator,
    dpd_generator,
    exp_generator,
    generator_from_spec,
    load_generator,
    shifted_log_generator,
    standardize,
    tail_slope,
)

__version__ = "0.1.0"
