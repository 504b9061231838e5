//! Computational toolkit for real plane cubics in Hesse form and the cone
//! geometry attached to them.
//!
//! The curve family is
//!
//! ```text
//! F_k(x, y, z) = -x^3 - y^3 - (z - x - y)^3 + 3k·x·y·(z - x - y)
//! ```
//!
//! whose triangle of reference sits in the affine plane z = 1 with vertices
//! (0,0), (1,0) and (0,1).  On top of the exact polarization algebra
//! ([`forms`]) the crate builds the real topology of the curve and its
//! Hessian ([`curve_geometry`]), the components of the positive index cone
//! ([`cone_atlas`]), the Steinian involution and the chord-tangent group law
//! ([`steinian`]), visibility predicates and zero-count tables
//! ([`visibility`]), the pole/λ-bound decision machinery ([`scenario`]) and a
//! deterministic SVG renderer for the standard figures ([`render`]).
//!
//! Everything is plain `f64` with explicit [`Tolerances`]; all operations are
//! pure and deterministic, so concurrent use is safe.

pub mod cone_atlas;
pub mod curve_geometry;
pub mod eigen;
pub mod error;
pub mod forms;
pub mod ray;
pub mod render;
pub mod rng;
pub mod roots;
pub mod scenario;
pub mod steinian;
pub mod tolerances;
pub mod verify;
pub mod visibility;

pub use cone_atlas::{ComponentKind, ConeAtlas, ConeComponent, SubconeQ};
pub use curve_geometry::{Arc, BranchId, CurveSel, CurveTopology, HessianKind};
pub use error::Error;
pub use forms::{QuadraticForm3, Signature, SymTrilinear, TernaryCubic};
pub use ray::{LinearForm3, RayVector};
pub use rng::SplitMix64;
pub use tolerances::Tolerances;

/// Result alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
