//! Mesh-to-reference error norms.
//!
//! Convergence studies compare a coarse solution against a
//! self-converged fine solution of the same problem.  The measure is
//! the relative L2 centerline error
//!
//! ```text
//! e = sqrt( (1/l) ∫ ‖r_h(s) − r_ref(s)‖² ds ) / max_s ‖u_ref(s)‖
//! ```
//!
//! integrated over the initial arc length and normalized by the
//! largest reference displacement, which makes the number scale-free
//! and comparable across load levels.
//!
//! Both meshes must be uniform subdivisions of the same initial curve;
//! points are matched by arc-length fraction, so coarse element `i`
//! covers fractions `[i/n_c, (i+1)/n_c]` and lands inside fine element
//! `⌊frac·n_f⌋` — exact for uniform meshes, no projection involved.

use fibril_core::hermite::{CenterlineDofs, RefGeometry};
use fibril_core::quadrature::GAUSS_10;
use fibril_core::Vec3;
use fibril_solve::{Model, State};

/// One fiber's deformed centerline: per element the initial geometry
/// (for Jacobians and the initial shape) plus the current dofs.
pub struct FiberCurve<'a> {
    geos: Vec<&'a RefGeometry>,
    dofs: Vec<CenterlineDofs>,
}

impl<'a> FiberCurve<'a> {
    pub fn from_model(model: &'a Model, state: &State, fiber: usize) -> Self {
        let mut geos = Vec::new();
        let mut dofs = Vec::new();
        for &e in model.fiber_elements(fiber) {
            geos.push(model.elements()[e].reference());
            dofs.push(model.element_cl(state, e));
        }
        FiberCurve { geos, dofs }
    }

    pub fn n_elements(&self) -> usize {
        self.geos.len()
    }

    /// Current position at fraction-matched coordinates: element `j`,
    /// local ξ ∈ [−1, 1].
    fn position(&self, j: usize, xi: f64) -> Vec3 {
        self.dofs[j].eval_xi(xi, 0, 0.5 * self.geos[j].length())
    }

    /// Initial position at the same coordinates.
    fn position0(&self, j: usize, xi: f64) -> Vec3 {
        self.geos[j]
            .dofs0()
            .eval_xi(xi, 0, 0.5 * self.geos[j].length())
    }

    /// Position at a global arc-length fraction ∈ [0, 1].
    fn position_at_fraction(&self, frac: f64) -> Vec3 {
        let n = self.n_elements() as f64;
        let u = (frac * n).clamp(0.0, n - 1e-12);
        let j = u.floor() as usize;
        self.position(j, 2.0 * (u - j as f64) - 1.0)
    }

    /// Largest displacement magnitude from the initial shape, sampled
    /// densely (ends included) over every element.
    pub fn max_displacement(&self) -> f64 {
        let samples = 10usize;
        let mut best: f64 = 0.0;
        for j in 0..self.n_elements() {
            for k in 0..samples {
                let xi = -1.0 + 2.0 * k as f64 / (samples - 1) as f64;
                let d = (self.position(j, xi) - self.position0(j, xi)).norm();
                best = best.max(d);
            }
        }
        best
    }
}

/// Relative L2 error of `coarse` against `fine`; see the module doc for
/// the definition.  Panics if the fine mesh shows no displacement at
/// all (the norm is undefined then).
pub fn l2_error(coarse: &FiberCurve, fine: &FiberCurve) -> f64 {
    let n_c = coarse.n_elements();
    let n_f = fine.n_elements();
    // Quadrature cells come from the union of both meshes: inside a
    // cell each curve is a single cubic, so ten-point Gauss is exact up
    // to roundoff.  Integrating per coarse element alone would lose
    // accuracy at the fine-mesh stations that fall inside it, where the
    // integrand has a curvature jump.
    let mut breaks: Vec<f64> = (0..=n_c)
        .map(|i| i as f64 / n_c as f64)
        .chain((0..=n_f).map(|k| k as f64 / n_f as f64))
        .collect();
    breaks.sort_by(f64::total_cmp);
    breaks.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    let mut integral = 0.0;
    let mut length = 0.0;
    for cell in breaks.windows(2) {
        let (f0, f1) = (cell[0], cell[1]);
        let i = ((0.5 * (f0 + f1) * n_c as f64).floor() as usize).min(n_c - 1);
        let geo = coarse.geos[i];
        for (&xi, &w) in GAUSS_10.points.iter().zip(GAUSS_10.weights) {
            let frac = f0 + 0.5 * (xi + 1.0) * (f1 - f0);
            let xi_c = 2.0 * (frac * n_c as f64 - i as f64) - 1.0;
            // ds = J dξ_c with dξ_c = 2 n_c dfrac and dfrac = ½(f1−f0) dξ.
            let ds = w * geo.jacobian(xi_c) * n_c as f64 * (f1 - f0);
            let diff = coarse.position(i, xi_c) - fine.position_at_fraction(frac);
            integral += ds * diff.norm_squared();
            length += ds;
        }
    }
    let scale = fine.max_displacement();
    assert!(
        scale > 0.0,
        "reference shows no displacement; the relative error is undefined"
    );
    (integral / length).sqrt() / scale
}
