//! Quadrature moments, Husimi moments and measurement samplers.

pub mod husimi;
pub mod moments;
pub mod sampling;

pub use husimi::{
    antinormal_moment, husimi_moment, husimi_moments, husimi_moments_two_mode, HusimiMoments,
    TwoModeHusimi,
};
pub use moments::{joint_quad_moment, quad_moment, quad_variance_of_power, QuadratureSeries};
pub use sampling::{
    hermite_functions, husimi_density, quadrature_density, stream_rng, HetSampler, QuadPdf,
    QuadSampler, StreamRng,
};
