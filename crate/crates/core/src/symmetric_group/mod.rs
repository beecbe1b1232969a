//! Cycle types, exact characters, central functions on `S_q`, the
//! approximate-factorization checker and the `Γ(r)` moment oracle.

pub mod central;
pub mod character;
pub mod cycle;
pub mod factorization;
pub mod gamma;

pub use central::{graded_state_value, tensor_trace, CentralFunction, ClassValues, GradedTensorState};
pub use character::{character, dim_irrep, normalized_character};
pub use cycle::{cycle_stats, factorial, CycleType};
pub use factorization::{factorization_check, FactorizationReport};
pub use gamma::{gamma_matrix, gamma_moments, GammaState, IntMatrix, RepKind, Representation};
