//! Exact-arithmetic invariants of weighted Delsarte surfaces.
//!
//! A Delsarte surface is cut out by a four-term polynomial in four
//! variables whose exponent matrix is invertible.  Everything the crate
//! computes — weight systems, toric symmetry groups, character spaces,
//! Lefschetz numbers, Newton polytopes and their Fine interiors — is done
//! over arbitrary-precision integers and rationals, so results are exact
//! and reproducible.
//!
//! The high-level entry point is [`report::analyze`], which takes a
//! polynomial and produces a serializable report; the intermediate layers
//! are usable on their own.

pub mod characters;
pub mod error;
pub mod family;
pub mod group;
pub mod mat;
pub mod newton;
pub mod poly;
pub mod report;
pub mod weights;

pub use characters::{lefschetz, CharacterSet, LefschetzResult};
pub use error::{Error, Result};
pub use family::{elliptic_family, fermat, named_example};
pub use group::AbelianGroup;
pub use mat::{hnf_membership, IntMat, RatMat, Snf};
pub use newton::{
    classify_hollow, fine_interior, newton_polytope, FineInterior, KodairaDimension,
    LatticePolygon, LatticePolytope,
};
pub use poly::DelsartePolynomial;
pub use report::{analyze, AnalyzeOptions, SurfaceReport};
pub use weights::{SmoothnessVerdict, StratumFailure, WeightSystem};
