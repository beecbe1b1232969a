//! Probability measures on Young diagrams of a fixed size: exact
//! Schur–Weyl and Plancherel weights, Fourier decomposition of central
//! functions, RSK samplers and the concentration experiment harness.

mod experiment;
mod rsk;
mod weights;

pub use experiment::{
    concentration_experiment, rescaled_distance, ExperimentResult, ProfileStats, Source, EXACT_MAX_Q, PROFILE_GRID,
};
pub use rsk::{ladder_rng, rsk_shape, sample_measure, sample_plancherel, sample_schur_weyl};
pub use weights::{
    decompose_central_function, gamma_support_query, gl_dimension, mean_moments, plancherel_weights,
    schur_weyl_weights, transposition_character, SupportQuery, YoungMeasure, MAX_DECOMPOSE_Q,
};
