//! Geometrically exact finite elements for slender fibers.
//!
//! This crate provides the element-level building blocks of the fibril
//! workspace:
//!
//! - [`so3`]: rotation algebra on SO(3) — skew map, Rodrigues exponential,
//!   logarithm, tangent operators.
//! - [`quadrature`]: fixed Gauss-Legendre and Gauss-Lobatto rules.
//! - [`hermite`]: C1 cubic Hermite centerline interpolation and the 3×12
//!   H-matrix form used by element residuals.
//! - [`section`]: cross-section and material data, constitutive matrices.
//! - [`dual`]: second-order forward-mode scalars used to obtain exact
//!   derivatives of contact kinematics.
//! - [`element`]: the Simo-Reissner and torsion-free beam elements
//!   (residuals, consistent tangents, energies, inertia).
//! - [`timeint`]: generalized-alpha kinematic update relations, including
//!   the multiplicative form used for triads.

pub mod dual;
pub mod element;
pub mod hermite;
pub mod quadrature;
pub mod section;
pub mod so3;
pub mod timeint;

/// 3-vector of f64; positions, tangents, spins, forces.
pub type Vec3 = nalgebra::Vector3<f64>;
/// 3×3 matrix of f64; rotations, constitutive blocks, skew matrices.
pub type Mat3 = nalgebra::Matrix3<f64>;

pub use nalgebra::{DMatrix, DVector};
