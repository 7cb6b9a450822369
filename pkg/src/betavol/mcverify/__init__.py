"""Monte Carlo estimators and their comparison with closed forms."""
from .estimators import (
    Estimate,
    affine_split_residual,
    estimate_bp_weight,
    estimate_moment,
    lyapunov_qr_estimate,
)
from .harness import (
    DegenerateEstimatorError,
    SuiteConfig,
    SuiteConfigError,
    VerificationReport,
    check_affine_split,
    compare,
    run_suite,
    summary,
    verify_bp_linear,
    verify_corollary3,
    verify_intrinsic_volume,
    verify_lyapunov,
    verify_moment,
    verify_pair_distance,
)
