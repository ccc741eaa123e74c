//! Programmable coupling graphs, Gaussian quenches of site arrays and
//! correlation-to-geometry reconstruction.

mod builders;
mod coupling;
mod geometry;
mod quench;
mod spectrum;

pub use builders::{builder_mobius, builder_sachdev_ye, builder_separable, builder_tree, SeparableCouplings};
pub use coupling::{matrix_from_csv, matrix_to_csv, Boundary, CouplingMatrix};
pub use geometry::{bit_reversed_order, coarse_grain_tree, corr_to_geometry, CoarseTree, Geometry, Merge};
pub use quench::{gaussian_quench, QuenchTrack};
pub use spectrum::{
    couplings_to_spectrum, magnon_dispersion, spectrum_to_couplings, table_to_couplings, Dispersion, DistanceTable,
    ModulationSpectrum, ProgrammedCouplings, Tone,
};
