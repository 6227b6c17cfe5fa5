//! Exact samplers and Monte Carlo estimators.

mod estimators;
pub mod gof;
mod samplers;
mod stream;

pub use estimators::{mc_lhs, mc_rhs, McEstimate, MIN_REPLICATES};
pub use samplers::{
    draw_bridge, draw_excursion, draw_x_step, sample_brownian_bridge, sample_excursion, sample_generalized_meander,
    sample_path, sample_x_step, x_root_cdf, x_root_survival, x_step_cdf, PathSource, SamplePath,
};
pub use stream::SeededStream;
