//! Implicit solution drivers for fiber assemblies: the global model
//! (fibers, elements, supports, loads, contact configuration), deterministic
//! assembly of residual and consistent tangent, a Newton solver for static
//! and generalized-alpha dynamic steps, and an adaptive time/load stepping
//! protocol that halves the step on non-convergence and cautiously doubles
//! it again after sustained success.
//!
//! Constrained dofs are eliminated from the solved system (no penalty
//! springs); their residual rows are kept and reported as support reactions,
//! so global force balance can be checked to solver tolerance.

pub mod assemble;
pub mod band;
pub mod model;
pub mod newton;

pub use assemble::{assemble, contact_contributions, Assembly, ContactStats, DynamicContext};
pub use band::{BandLu, BandMatrix, SingularMatrix, SystemFactor, SystemMatrix};
pub use model::{
    ContactModel, Dirichlet, DofPartition, ElementKind, ElementRef, FiberKind, FiberSpec,
    Kinetics, Load, Model, PrescribedValue, Schedule, SolverConfig, State,
};
pub use newton::{
    adaptive_dynamic, adaptive_static, adaptive_stepping, dynamic_step, static_step,
    AdaptiveReport, StepAttempt, StepResult,
};

use fibril_contact::ContactError;
use fibril_core::element::ElementError;
use fibril_core::hermite::GeometryError;

/// Errors of the solution layer.  The adaptive driver reacts to
/// [`SolveError::NonConvergence`] by halving the step; every in-iteration
/// failure mode (stalled Newton, singular tangent, element or projection
/// breakdown at a trial state) is folded into that variant by the step
/// drivers, because a shorter step is the remedy for all of them.
#[derive(Debug, thiserror::Error)]
pub enum SolveError {
    /// Newton did not meet both convergence criteria within the iteration
    /// budget (or an iterate left the admissible configuration space).
    #[error("Newton iteration failed to converge ({iterations} iterations spent)")]
    NonConvergence { iterations: usize },
    /// The adaptive protocol halved below its floor of 1/1024 of the
    /// original step; the problem needs a different setup, not more halving.
    #[error("adaptive step {h:.3e} fell below the floor {floor:.3e}")]
    StepFloor { h: f64, floor: f64 },
    #[error(transparent)]
    Element(#[from] ElementError),
    #[error(transparent)]
    Contact(#[from] ContactError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Singular(#[from] SingularMatrix),
}
