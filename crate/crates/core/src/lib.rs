//! Irrational toric varieties: polyhedral cones and fans, point
//! configurations and their regular subdivisions, the irrational affine and
//! projective toric varieties of a configuration, the toric variety of an
//! arbitrary fan, and degenerations of torus translates compared against the
//! secondary fan.
//!
//! Numerics are `f64` throughout; every comparison goes through the
//! [`Tolerance`] attached to a configuration or the `eps` of a cone or fan.

pub mod affine;
pub mod birch;
pub mod cone;
pub mod config;
pub mod dd;
pub mod error;
pub mod fan;
pub mod fixtures;
pub mod hausdorff;
pub mod linalg;
pub mod moduli;
pub mod polytope;
pub mod rng;
pub mod sampling;
pub mod secondary;
pub mod subdivision;
pub mod tolerance;
pub mod variety;
pub mod verify;

pub use affine::{
    is_member, is_member_projective, moment, phi, AffinePoint, ProjPoint, TorusElement,
};
pub use birch::{birch_inverse, BirchSolution};
pub use cone::{Cone, Face, FaceLattice};
pub use config::{LabelSet, Lift, PointConfig, Weights};
pub use error::{Error, Result};
pub use fan::{ConeId, Fan};
pub use hausdorff::{hausdorff_distance, PointCloud};
pub use linalg::{vector, Subspace, Vector};
pub use moduli::{degenerate, orbit_match, psi_point, DegenerationReport, SecondaryFan};
pub use polytope::{NormalFan, Polytope};
pub use sampling::{sample_complex, ToricComplex};
pub use secondary::{enumerate_regular_triangulations, Enumeration, RegularTriangulation};
pub use subdivision::{regular_subdivision, Subdivision};
pub use tolerance::Tolerance;
pub use variety::{ConeLookup, FanPoint, MonoidElement};
