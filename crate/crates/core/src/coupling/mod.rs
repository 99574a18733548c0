//! Brownian increments, Levy areas, Gaussian area substitutes and their dyadic coupling.

mod area;
mod brownian;
mod covariance;
mod dyadic;
mod levy_cf;
mod rng;
mod study;

pub use area::{
    n_pairs, sample_area_reference, sample_area_reference_parts, sample_gaussian_area, sample_gaussian_area_parts,
    AreaBlocks, AreaParts, GaussianParts,
};
pub use brownian::{sample_brownian, BrownianBlocks};
pub use covariance::{build_block_covariance, m_matrix, BlockCovariance, DyadicSet};
pub use dyadic::{
    couple_areas, dyadic_coupling, dyadic_deviations, max_partial_sum_deviation, CoupledDriver, CouplingMode,
    DyadicDeviation,
};
pub use levy_cf::{levy_area_cf, levy_sum_cdf, levy_sum_density};
pub use rng::{stream_rng, Purpose};
pub use study::{coupling_study, CouplingStudy, ScaleSummary, StudyConfig};
