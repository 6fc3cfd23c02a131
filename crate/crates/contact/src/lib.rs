//! Beam-to-beam and beam-to-rigid contact for the Hermite centerline
//! elements: closest-point projections, gap sensitivities, penalty laws,
//! the all-angle blend between point and line formulations, and a
//! broadphase candidate search.
//!
//! The contribution routines return residuals and *consistent* tangents.
//! All configuration derivatives — including the implicit motion of the
//! projection coordinates and of the contact angle — are obtained by
//! second-order dual-number evaluation of the gap and angle functions,
//! reduced through the implicit-function theorem at the projection
//! conditions.  Every tangent is validated against finite differences in
//! the tests.

pub mod geometry;
pub mod law;
pub mod pair;
pub mod rigid;
pub mod search;

pub use geometry::{
    closest_point_bilateral, closest_point_unilateral, contact_angle, ClosestPointResult,
    CurveRef, ProjectionKind,
};
pub use law::{abc_transition_factor, ABCParams, ABCVariant, PenaltyLaw};
pub use pair::{
    abc_contribution, line_contact_contribution, point_contact_contribution, ContactContribution,
    ContactPair, GpRecord, Regime, Segmentation, PAIR_NDOF,
};
pub use rigid::{rigid_primitive_contact, RigidContribution, RigidGpRecord, RigidPrimitive};
pub use search::{broadphase_search, element_aabb, Aabb, BroadItem};

/// Errors of the projection layer.  Contribution routines translate
/// non-unique point projections into regime decisions where the
/// formulation prescribes one (small angles are line-contact territory).
#[derive(Debug, thiserror::Error, Clone, Copy, PartialEq)]
pub enum ContactError {
    /// The bilateral projection has no isolated solution: near-parallel
    /// curves (small contact angle), a singular projection system, or
    /// several equally close minima.
    #[error("bilateral closest-point projection is not unique (contact angle {angle_deg:.2} deg)")]
    NonUniqueProjection { angle_deg: f64 },
    /// A unilateral projection left the master element; the neighboring
    /// element covers this slave point instead.
    #[error("projection parameter {eta:.4} lies outside the master element")]
    ProjectionOutsideElement { eta: f64 },
    /// No projection seed converged (degenerate geometry).
    #[error("closest-point iteration failed to converge after {iters} iterations")]
    ProjectionDiverged { iters: usize },
}
