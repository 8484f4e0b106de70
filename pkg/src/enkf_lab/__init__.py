"""Linear and ensemble Kalman filtering with a Lorenz 63 twin-experiment harness."""

from .dynamics import (
    AffineMapParams,
    Drift,
    Lorenz63Params,
    integrate_rk4,
    iterate_affine,
    lorenz_drift,
    lorenz_drift_fn,
    lorenz_transition,
)
from .enkf import (
    EnkfUpdate,
    Ensemble,
    EnsembleStats,
    deterministic_analysis_covariance,
    enkf_analyze,
    enkf_gain,
    enkf_predict,
    ensemble_stats,
    inflate,
    init_ensemble,
)
from .errors import (
    ConfigError,
    DimensionError,
    DivergenceError,
    EnkfLabError,
    SingularMatrixError,
)
from .experiments import (
    MetricSeries,
    SweepResult,
    TwinExperimentConfig,
    generate_truth,
    run_twin,
    sweep_ensemble_sizes,
    synthesize_observations,
)
from .kf_linear import (
    GaussianState,
    KalmanUpdate,
    LinearModel,
    ObservationModel,
    analyze,
    analyze_information_form,
    joseph_covariance,
    kalman_gain,
    predict,
)
from .randomness import (
    GaussianSpec,
    RngStream,
    derive_stream,
    psd_sqrt,
    sample_gaussian,
    standard_normal,
)
from .svg import AxesSpec, Curve, emit_svg, emit_svg_panels

__version__ = "0.1.0"
