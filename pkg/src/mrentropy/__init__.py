"""Maximum relative entropy updating for multinomial models on the simplex."""

__version__ = "0.1.0"

from mrentropy.errors import (
    ConvergenceError,
    DimensionError,
    DivergenceError,
    EmptySampleError,
    InfeasibleMomentError,
    IoError,
    MreError,
    ParseError,
    SeriesDivergenceError,
    SupportError,
    UseMonteCarloError,
    ValidationError,
)
from mrentropy.model import (
    CountSample,
    MomentConstraint,
    OutcomeModel,
    SimplexPoint,
    multinomial_likelihood,
    relative_entropy,
    sample_average,
)
from mrentropy.zeta import (
    ZetaEvaluation,
    evaluate_zeta,
    mean_via_ratio,
    posterior_means,
    zeta_monte_carlo,
    zeta_nested_series,
    zeta_quadrature,
)
from mrentropy.solver import SolveResult, beta_curve, solve_beta, solve_lambda_maxent
from mrentropy.updaters import (
    MarginalSummary,
    PosteriorSpec,
    bayes_update,
    marginal_density_grid,
    maxent_update,
    moment_check,
    posterior_density,
    posterior_mean,
    sequential_update,
    simultaneous_update,
)
from mrentropy.sanov import Comparison, TiltedEstimate, compare_estimators, sanov_estimate
