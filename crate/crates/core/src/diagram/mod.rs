//! Young diagrams as partitions, interlacing coordinates and continuous
//! profiles, together with their Rayleigh measures.

mod partition;
mod profile;

pub use partition::{coords_to_partition, partition_to_coords, InterlacingCoords, Partition};
pub use profile::{
    area_second_moment, coords_to_profile, diagram_from_rayleigh, diagram_from_rayleigh_with,
    rayleigh_of_diagram, sup_distance, ContinuousDiagram, GridProfile, DEFAULT_GRID, EXACT_MASS_TOL,
    GRID_MASS_TOL,
};
pub use crate::measure::SignedMeasure;
