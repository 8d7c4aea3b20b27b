//! A finite-field model of `X_mu(gamma)`: lattice chains over `F_{q^r}[[t]]`
//! stored modulo a window, their semi-modules and relative positions, and
//! the normalized-basis parametrization of each stratum.

pub mod field;
pub mod model;
pub mod normalized;
pub mod space;

pub use field::{Fe, GaloisField};
pub use model::{relative_position, TruncatedLattice};
pub use normalized::{
    default_precision, normalized_basis, recover_coordinates, required_precision,
    solve_stratum_fiber, stratum_membership, stratum_residues, Coordinates, NormalizedBasis,
};
pub use space::{LVec, WindowSpace};
