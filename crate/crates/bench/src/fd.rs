//! Finite-difference verification of the assembled tangent.
//!
//! The assembled stiffness claims to be the derivative of the assembled
//! residual with respect to the state increment — additive on
//! translational dofs, multiplicative (left spin) on rotation dofs.
//! [`Model::apply_increment`] applies exactly that increment, so a
//! central difference through it probes the same derivative the
//! implementation claims, rotation parametrization included.
//!
//! Used by the `validate` command for spot checks on arbitrary
//! scenarios and by the acceptance suite for systematic sweeps.

use fibril_core::{DMatrix, DVector};
use fibril_solve::{assemble, DynamicContext, Model, SolveError, State};
use rand::Rng;

/// Assembled residual at a state, triplets discarded.
fn residual(
    model: &Model,
    state: &State,
    s: f64,
    dynamic: Option<&DynamicContext>,
) -> Result<DVector<f64>, SolveError> {
    Ok(assemble(model, state, s, dynamic, false)?.residual)
}

/// Dense matrix from assembly triplets.
pub fn dense_from_triplets(n: usize, triplets: &[(usize, usize, f64)]) -> DMatrix<f64> {
    let mut k = DMatrix::zeros(n, n);
    for &(i, j, v) in triplets {
        k[(i, j)] += v;
    }
    k
}

/// Central-difference Jacobian columns for the given dofs.  `h` is the
/// perturbation magnitude: a translation distance for translational
/// dofs and a spin angle for rotational ones, so callers scale it to
/// the geometry.
pub fn fd_jacobian_columns(
    model: &Model,
    state: &State,
    s: f64,
    dynamic: Option<&DynamicContext>,
    cols: &[usize],
    h: f64,
) -> Result<DMatrix<f64>, SolveError> {
    let n = model.n_dofs();
    let mut jac = DMatrix::zeros(n, cols.len());
    let mut dx = DVector::zeros(n);
    for (c, &dof) in cols.iter().enumerate() {
        dx[dof] = h;
        let mut plus = state.clone();
        model.apply_increment(&mut plus, &dx);
        let rp = residual(model, &plus, s, dynamic)?;
        dx[dof] = -h;
        let mut minus = state.clone();
        model.apply_increment(&mut minus, &dx);
        let rm = residual(model, &minus, s, dynamic)?;
        dx[dof] = 0.0;
        jac.column_mut(c).copy_from(&((rp - rm) / (2.0 * h)));
    }
    Ok(jac)
}

/// Relative Frobenius distance between the assembled tangent and the
/// finite-difference Jacobian, restricted to the given columns.
pub fn tangent_fd_distance_cols(
    model: &Model,
    state: &State,
    s: f64,
    dynamic: Option<&DynamicContext>,
    cols: &[usize],
    h: f64,
) -> Result<f64, SolveError> {
    let n = model.n_dofs();
    let assembly = assemble(model, state, s, dynamic, true)?;
    let k = dense_from_triplets(n, assembly.triplets.as_deref().unwrap_or(&[]));
    let mut k_sub = DMatrix::zeros(n, cols.len());
    for (c, &dof) in cols.iter().enumerate() {
        k_sub.column_mut(c).copy_from(&k.column(dof));
    }
    let k_fd = fd_jacobian_columns(model, state, s, dynamic, cols, h)?;
    Ok((&k_fd - &k_sub).norm() / k_sub.norm().max(1e-300))
}

/// Relative Frobenius distance between the assembled tangent and the
/// full finite-difference Jacobian.
pub fn tangent_fd_distance(
    model: &Model,
    state: &State,
    s: f64,
    dynamic: Option<&DynamicContext>,
    h: f64,
) -> Result<f64, SolveError> {
    let cols: Vec<usize> = (0..model.n_dofs()).collect();
    tangent_fd_distance_cols(model, state, s, dynamic, &cols, h)
}

/// Randomly deform a state: every translational dof moves by up to
/// `amp`, every rotation dof spins by up to `rot_amp` radians, applied
/// through the same increment map the solver uses.
pub fn perturb_state<R: Rng>(model: &Model, state: &mut State, amp: f64, rot_amp: f64, rng: &mut R) {
    let n = model.n_dofs();
    let mut dx = DVector::zeros(n);
    for i in 0..n {
        let a = if model.is_rotation_dof(i) { rot_amp } else { amp };
        dx[i] = rng.random_range(-a..=a);
    }
    model.apply_increment(state, &dx);
}
