"""Numerics for moment-perturbed Toeplitz determinants of radially symmetric planar ensembles."""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    AliasingWarning,
    CertificationError,
    NonInvertibleError,
    NonzeroWindingError,
    PToeplitzError,
    ValidationError,
)
from .radial_measures import (  # noqa: E402
    CUE,
    Bergman,
    CustomMeasure,
    GammaWeight,
    Ginibre,
    JacobiEdge,
    LogStretch,
    Regularity,
    classify,
    iota,
    log_moment,
    log_moment_dd,
    measure_from_name,
    radial_power_sample,
    rho,
)
from .symbols import (  # noqa: E402
    IotaWeight,
    PowerWeight,
    Symbol,
    TableWeight,
    exp_symbol,
    flp_norm,
    from_function,
    from_samples,
    from_trig,
    invert_symbol,
    log_symbol,
    multiply,
)
from .sections import (  # noqa: E402
    diagonal_deficit_sum,
    hankel_section,
    hs_norm,
    k_section,
    kozak_inverse_section,
    m_section,
    toeplitz_section,
    trace_norm,
)
from .determinants import LogDet, angular_mgf, fd_cumulant, log_det, quadrature_oracle  # noqa: E402
from .asymptotics import (  # noqa: E402
    c_mu,
    e_constant,
    f_constant,
    g_constant,
    h_constant,
    omega_functional,
    omega_pair,
    p_delta,
    parity_constants,
    parity_sums,
    szego_sweep,
    tau,
    trace_section,
)
from .cumulants import cumulant_recursion, hankel_trace, shift_invariance_check  # noqa: E402
from .ensemble import (  # noqa: E402
    circular_law_check,
    empirical_statistic,
    mean_absolute_moment,
    mean_density,
    sample_dpp,
    sample_moduli,
)
