//! Connective-constant estimation: SAW growth on finite graphs, and the
//! finite-memory branching matrix for the Weitz SAW tree of Z².

mod branching;
mod lattice;
mod profile;
mod spectral;

pub use branching::{z2_branching_matrix, BranchingMatrix, Ordering, Pruning, DEFAULT_STATE_CAP};
pub use lattice::{floor3, lattice_bounds_table, LatticeRow, LATTICES, Z2_WEITZ_TREE};
pub use profile::{conn_profile, ConnProfile, ProfileRow, RootSelection};
pub use spectral::{gelfand_bound, spectral_bound, CsrMatrix, SpectralResult};
