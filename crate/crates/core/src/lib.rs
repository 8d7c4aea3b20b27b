//! Semi-module combinatorics of affine Deligne-Lusztig varieties for Weil
//! restrictions of `GL_n` with minuscule coweight and basic `gamma`, the
//! matching weight-multiplicity computations, and a finite-field lattice model.

pub mod context;
pub mod enumeration;
pub mod error;
pub mod harness;
pub mod lattice;
pub mod levi;
pub mod rep;
pub mod semimodule;
pub mod strata;

pub use context::{derive_context, IsocrystalContext, OPoint};
pub use error::{Error, Result};
pub use semimodule::{validate_semimodule, Coweight, HodgeType, SemiModule};
