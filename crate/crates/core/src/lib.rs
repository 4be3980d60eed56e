//! Exact lattice, period and cone arithmetic deciding when the triply
//! blown-up ball `B_3(μ_1, μ_2, μ_3)` contains a Lagrangian RP², with
//! replayable certificates.
//!
//! Everything here is integer or rational arithmetic on `BigInt`; there is
//! no floating point.

pub mod blowup;
pub mod certificate;
pub mod cone;
pub mod error;
pub mod lattice;
pub mod matrix;
pub mod rational;
pub mod sublattice;
pub mod verify;

pub use certificate::{admits_lagrangian_rp2, Certificate, Verdict};
pub use error::{Error, Result};
pub use lattice::{BlowupLattice, LatticeClass, Mod2Class};
