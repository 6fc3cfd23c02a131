//! Generalized-α time integration with controllable numerical dissipation.
//!
//! The scheme advances a second-order system through an auxiliary
//! "algorithmic" acceleration `alg` that filters the true acceleration:
//!
//! ```text
//! (1−α_m) alg_{n+1} + α_m alg_n = (1−α_f) acc_{n+1} + α_f acc_n
//! q_{n+1} = q_n + Δt vel_n + Δt²(½−β) alg_n + Δt²β alg_{n+1}
//! vel_{n+1} = vel_n + Δt(1−γ) alg_n + Δtγ alg_{n+1}
//! ```
//!
//! Dynamic equilibrium is enforced at t_{n+1} with the *true* acceleration
//! `acc_{n+1}`.  All four parameters derive from the spectral radius at
//! infinite frequency ρ∞ ∈ [0, 1]: ρ∞ = 1 gives no dissipation, ρ∞ = 0
//! annihilates the highest frequencies within one step.  The parameter
//! choice keeps second-order accuracy for any ρ∞.
//!
//! The same recursions apply verbatim to translational coordinates and to
//! material rotation increments θ = log(Λₙᵀ Λ_{n+1}), where velocities and
//! accelerations are the material angular rates; no transport corrections
//! appear because all rotational quantities live in the body frame.

use crate::Vec3;
use nalgebra::DVector;

#[derive(Debug, Clone, Copy)]
pub struct GenAlpha {
    pub alpha_m: f64,
    pub alpha_f: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl GenAlpha {
    /// Parameters from the high-frequency spectral radius ρ∞ ∈ [0, 1].
    pub fn from_spectral_radius(rho_inf: f64) -> Self {
        assert!(
            (0.0..=1.0).contains(&rho_inf),
            "spectral radius must lie in [0, 1], got {rho_inf}"
        );
        let alpha_m = (2.0 * rho_inf - 1.0) / (rho_inf + 1.0);
        let alpha_f = rho_inf / (rho_inf + 1.0);
        let gamma = 0.5 - alpha_m + alpha_f;
        let beta = 0.25 * (1.0 - alpha_m + alpha_f).powi(2);
        Self {
            alpha_m,
            alpha_f,
            beta,
            gamma,
        }
    }

    /// ∂acc_{n+1}/∂q_{n+1}: gain of the true end-of-step acceleration with
    /// respect to the primary unknown, used in dynamic tangents.
    pub fn accel_gain(&self, dt: f64) -> f64 {
        (1.0 - self.alpha_m) / ((1.0 - self.alpha_f) * self.beta * dt * dt)
    }

    /// ∂vel_{n+1}/∂q_{n+1}.
    pub fn vel_gain(&self, dt: f64) -> f64 {
        self.gamma / (self.beta * dt)
    }
}

/// End-of-step rates produced by the update recursions.
#[derive(Debug, Clone, Copy)]
pub struct Rates {
    pub vel: Vec3,
    pub acc: Vec3,
    pub alg: Vec3,
}

/// Advance one three-component coordinate block across a step of size `dt`,
/// given the step increment `delta` of the primary variable and the
/// converged rates of the previous step.
pub fn advance_rates(
    p: &GenAlpha,
    dt: f64,
    delta: &Vec3,
    vel_n: &Vec3,
    acc_n: &Vec3,
    alg_n: &Vec3,
) -> Rates {
    let alg = (delta - dt * vel_n - dt * dt * (0.5 - p.beta) * alg_n) / (dt * dt * p.beta);
    let vel = vel_n + dt * (1.0 - p.gamma) * alg_n + dt * p.gamma * alg;
    let acc = ((1.0 - p.alpha_m) * alg + p.alpha_m * alg_n - p.alpha_f * acc_n)
        / (1.0 - p.alpha_f);
    Rates { vel, acc, alg }
}

/// End-of-step rates for a full translational state vector.
#[derive(Debug, Clone)]
pub struct RateVectors {
    pub vel: DVector<f64>,
    pub acc: DVector<f64>,
    pub alg: DVector<f64>,
}

/// Vector form of [`advance_rates`], applied component-wise to the global
/// translational unknowns.
pub fn advance_rate_vectors(
    p: &GenAlpha,
    dt: f64,
    delta: &DVector<f64>,
    vel_n: &DVector<f64>,
    acc_n: &DVector<f64>,
    alg_n: &DVector<f64>,
) -> RateVectors {
    let alg = (delta - dt * vel_n - dt * dt * (0.5 - p.beta) * alg_n) / (dt * dt * p.beta);
    let vel = vel_n + dt * (1.0 - p.gamma) * alg_n + dt * p.gamma * &alg;
    let acc = ((1.0 - p.alpha_m) * &alg + p.alpha_m * alg_n - p.alpha_f * acc_n)
        / (1.0 - p.alpha_f);
    RateVectors { vel, acc, alg }
}
