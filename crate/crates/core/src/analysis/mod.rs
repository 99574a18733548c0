//! Error estimators, benchmark systems and convergence experiments.

mod benchmarks;
mod estimators;
mod experiments;
mod marginal;

pub use benchmarks::{benchmark, Benchmark, Facts, Invariant, BENCHMARKS};
pub use estimators::{
    compensated_sum, fit_slope, fixed_time_error, ks_pvalue, ks_statistic, mean_stderr, normal_cdf, path_max_sq,
    quantile_w2_1d, quantile_w2_1d_se, strong_error_max, ErrorSummary, Estimator, SlopeFit,
};
pub use experiments::{convergence, AreaCoupling, ConvergenceConfig, ConvergenceResult, Reference, SlopeRow};
pub use marginal::{marginal_ks, standardized_substitutes, MarginalKs};
