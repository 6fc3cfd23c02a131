//! Closest-point projections between contact curves and the contact angle.
//!
//! A contact curve is a Hermite centerline in its current configuration,
//! referenced by [`CurveRef`].  Projections work in the element coordinate
//! ξ ∈ [−1, 1] directly: the stationarity conditions of the squared
//! distance,
//!
//! ```text
//! r₁,ξ · (r₁ − r₂) = 0   and   r₂,η · (r₁ − r₂) = 0,
//! ```
//!
//! do not involve the arc-length Jacobian, so no reparametrization is
//! needed.  Minimization is constrained to the closed parameter domain:
//! interior stationary minima are polished by safeguarded Newton
//! iterations seeded from a coarse grid, the domain boundary contributes
//! its own constrained minima, and whichever is globally closest decides
//! the result.  Near-parallel curves (contact angle below 2°, or a badly
//! conditioned projection system) are reported as
//! [`NonUniqueProjection`](crate::ContactError::NonUniqueProjection) — the
//! point formulation is invalid there by construction and the caller is
//! expected to fall back to line contact.

use crate::ContactError;
use fibril_core::dual::{Dual2, DualVec3};
use fibril_core::hermite::{CenterlineDofs, RefGeometry};
use fibril_core::Vec3;
use nalgebra::{Matrix2, Vector2};

/// Convergence tolerance of the projection Newton iterations, applied to
/// the orthogonality residuals normalized by tangent norm × distance scale.
const PROJ_TOL: f64 = 1e-12;
/// Residual bound asserted on every accepted projection result.
const ACCEPT_TOL: f64 = 1e-10;
const MAX_ITERS: usize = 50;
/// Contact angles below 2° make the bilateral projection ill-posed.
const MIN_ANGLE_SIN: f64 = 0.034_899_496_702_500_97; // sin(2°)
/// Condition-number cap of the 2×2 projection system.
const MAX_CONDITION: f64 = 1e8;

/// A centerline element in its current configuration: initial geometry
/// (for the tangent scale and arc Jacobian) plus current nodal dofs.
#[derive(Clone, Copy)]
pub struct CurveRef<'a> {
    pub geo: &'a RefGeometry,
    pub dofs: &'a CenterlineDofs,
}

impl<'a> CurveRef<'a> {
    pub fn new(geo: &'a RefGeometry, dofs: &'a CenterlineDofs) -> Self {
        Self { geo, dofs }
    }

    /// Raw ξ-derivative of order 0, 1, or 2 of the current centerline.
    #[inline]
    pub fn eval_xi(&self, xi: f64, order: u8) -> Vec3 {
        self.dofs.eval_xi(xi, order, 0.5 * self.geo.length())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProjectionKind {
    Bilateral,
    Unilateral,
}

/// Result of a closest-point projection.  `normal` points from curve 2
/// toward curve 1: n = (r₁ − r₂)/‖r₁ − r₂‖, so a contact force +f·n acts
/// on curve 1.  For unilateral projections `xi` echoes the slave
/// coordinate the caller supplied (0 when projecting a bare point).
#[derive(Debug, Clone, Copy)]
pub struct ClosestPointResult {
    pub xi: f64,
    pub eta: f64,
    pub distance: f64,
    pub normal: Vec3,
    pub converged: bool,
    /// The unconstrained minimum left the element; coordinates are clamped
    /// to the boundary.  Boundary results are inadmissible for point
    /// contact (the neighboring element owns the true minimum).
    pub on_boundary: bool,
    pub kind: ProjectionKind,
}

/// Contact angle between two tangents: z = |t₁·t₂|/(‖t₁‖‖t₂‖) ∈ [0, 1]
/// and α = arccos z ∈ [0, π/2].
pub fn contact_angle(t1: &Vec3, t2: &Vec3) -> (f64, f64) {
    let z = (t1.dot(t2) / (t1.norm() * t2.norm())).abs().min(1.0);
    (z.acos(), z)
}

/// Orthogonality residuals (∇ of ½‖r₁−r₂‖²) and their normalization scale.
fn bilateral_residual(c1: &CurveRef, c2: &CurveRef, xi: f64, eta: f64) -> (Vector2<f64>, f64) {
    let r1 = c1.eval_xi(xi, 0);
    let r2 = c2.eval_xi(eta, 0);
    let t1 = c1.eval_xi(xi, 1);
    let t2 = c2.eval_xi(eta, 1);
    let d = r1 - r2;
    let scale = (t1.norm().max(t2.norm())) * d.norm().max(1e-9 * c1.geo.length());
    (Vector2::new(t1.dot(&d), -t2.dot(&d)), scale)
}

/// Hessian of ½‖r₁−r₂‖² in (ξ, η) — the projection Newton matrix.
fn bilateral_system(c1: &CurveRef, c2: &CurveRef, xi: f64, eta: f64) -> Matrix2<f64> {
    let r1 = c1.eval_xi(xi, 0);
    let r2 = c2.eval_xi(eta, 0);
    let t1 = c1.eval_xi(xi, 1);
    let t2 = c2.eval_xi(eta, 1);
    let s1 = c1.eval_xi(xi, 2);
    let s2 = c2.eval_xi(eta, 2);
    let d = r1 - r2;
    Matrix2::new(
        s1.dot(&d) + t1.norm_squared(),
        -t1.dot(&t2),
        -t1.dot(&t2),
        -s2.dot(&d) + t2.norm_squared(),
    )
}

fn condition_2x2(j: &Matrix2<f64>) -> f64 {
    // Exact 2×2 singular values from ‖J‖_F² = σ₁²+σ₂² and |det| = σ₁σ₂.
    let f2 = j.norm_squared();
    let det = j.determinant().abs();
    let disc = (f2 * f2 - 4.0 * det * det).max(0.0).sqrt();
    let s1 = ((f2 + disc) / 2.0).sqrt();
    let s2 = ((f2 - disc) / 2.0).max(0.0).sqrt();
    if s2 == 0.0 {
        f64::INFINITY
    } else {
        s1 / s2
    }
}

/// Safeguarded Newton (bisection fallback) for a stationary point of the
/// point-to-curve distance inside a bracket with g(a) ≥ 0 ≥ g(b), where
/// g(η) = r₂,η·(p − r₂) is the (sign-flipped) growth rate of ½‖p−r₂‖².
/// The bracket contains every iterate and bisection is forced on every
/// other step, so convergence is guaranteed; the interleaved Newton steps
/// supply the final quadratic digits.
fn refine_stationary(p: &Vec3, curve: &CurveRef, mut a: f64, mut b: f64) -> Option<f64> {
    let mut eta = 0.5 * (a + b);
    for it in 0..MAX_ITERS {
        let t = curve.eval_xi(eta, 1);
        let d = p - curve.eval_xi(eta, 0);
        let g = t.dot(&d);
        let scale = t.norm() * d.norm().max(1e-9 * curve.geo.length());
        if g.abs() <= PROJ_TOL * scale {
            return Some(eta);
        }
        if g > 0.0 {
            a = eta;
        } else {
            b = eta;
        }
        let s = curve.eval_xi(eta, 2);
        let dg = s.dot(&d) - t.norm_squared();
        let trial = eta - g / dg;
        // A Newton trial is taken only when it stays strictly inside the
        // bracket (NaN/∞ fail the comparison and bisect instead).
        eta = if it % 2 == 0 && trial > a && trial < b {
            trial
        } else {
            0.5 * (a + b)
        };
    }
    None
}

/// Interior stationary minima of the point-to-curve distance on [−1, 1]:
/// g(η) = r₂,η·(p − r₂) falling through zero marks a local minimum of the
/// distance, so every sign change of the scan is bracketed and refined.
fn stationary_minima(p: &Vec3, curve: &CurveRef) -> Vec<f64> {
    let m = 64;
    let g_at = |eta: f64| {
        let t = curve.eval_xi(eta, 1);
        let d = p - curve.eval_xi(eta, 0);
        t.dot(&d)
    };
    let mut out = Vec::new();
    let mut eta_prev = -1.0;
    let mut g_prev = g_at(-1.0);
    for i in 1..=m {
        let eta_i = -1.0 + 2.0 * i as f64 / m as f64;
        let g_i = g_at(eta_i);
        let falling = g_prev >= 0.0 && g_i <= 0.0 && (g_prev > 0.0 || g_i < 0.0);
        if falling {
            if let Some(eta) = refine_stationary(p, curve, eta_prev, eta_i) {
                out.push(eta);
            }
        }
        eta_prev = eta_i;
        g_prev = g_i;
    }
    out
}

/// Minimum distance from a point to a curve over the closed interval
/// [−1, 1]: the best of the interior stationary minima and both endpoints.
fn constrained_min_on_curve(p: &Vec3, curve: &CurveRef) -> (f64, f64) {
    let mut best = (1.0, (p - curve.eval_xi(1.0, 0)).norm());
    let d_start = (p - curve.eval_xi(-1.0, 0)).norm();
    if d_start < best.1 {
        best = (-1.0, d_start);
    }
    for eta in stationary_minima(p, curve) {
        let dist = (p - curve.eval_xi(eta, 0)).norm();
        if dist < best.1 {
            best = (eta, dist);
        }
    }
    best
}

struct Candidate {
    xi: f64,
    eta: f64,
    dist: f64,
}

/// Bilateral closest-point projection between two curves, minimizing the
/// distance over the closed parameter domain [−1, 1]².
///
/// A coarse scan locates the global basin first; near-parallel tangents at
/// the scan minimum reject the pair outright.  Safeguarded Newton
/// iterations (capped steps, runaway seeds dropped) then polish interior
/// stationary minima from a seed grid, while the four domain edges
/// contribute their constrained minima through 1D projections.  The
/// globally closest candidate decides the result: an interior stationary
/// point is a regular projection, an edge minimum comes back flagged
/// `on_boundary` (inadmissible for point contact — a neighboring element
/// owns the true minimum).  Ambiguity — distinct interior minima at
/// numerically the same distance, a contact angle below 2°, or a
/// near-singular projection system — yields `NonUniqueProjection`.
pub fn closest_point_bilateral(
    c1: &CurveRef,
    c2: &CurveRef,
) -> Result<ClosestPointResult, ContactError> {
    // Coarse scan of the distance field over the closed domain.
    let n = 24;
    let coord = |k: usize| -1.0 + 2.0 * k as f64 / n as f64;
    let pts1: Vec<Vec3> = (0..=n).map(|i| c1.eval_xi(coord(i), 0)).collect();
    let pts2: Vec<Vec3> = (0..=n).map(|j| c2.eval_xi(coord(j), 0)).collect();
    let mut grid = (0usize, 0usize, f64::INFINITY);
    for i in 0..=n {
        for j in 0..=n {
            let d = (pts1[i] - pts2[j]).norm();
            if d < grid.2 {
                grid = (i, j, d);
            }
        }
    }
    let (grid_xi, grid_eta) = (coord(grid.0), coord(grid.1));

    // Parallel curves make every point along the overlap equally close —
    // the point projection carries no information there.
    let t1 = c1.eval_xi(grid_xi, 1);
    let t2 = c2.eval_xi(grid_eta, 1);
    let (alpha, z) = contact_angle(&t1, &t2);
    if (1.0 - z * z).max(0.0).sqrt() < MIN_ANGLE_SIN {
        return Err(ContactError::NonUniqueProjection {
            angle_deg: alpha.to_degrees(),
        });
    }

    // Newton from an 8×8 seed grid plus the scan minimum; collect interior
    // stationary local minima (positive-definite projection Hessian).
    let seeds = 8;
    let mut seed_list: Vec<(f64, f64)> = Vec::with_capacity(seeds * seeds + 1);
    for i in 0..seeds {
        for j in 0..seeds {
            seed_list.push((
                -1.0 + (2.0 * i as f64 + 1.0) / seeds as f64,
                -1.0 + (2.0 * j as f64 + 1.0) / seeds as f64,
            ));
        }
    }
    seed_list.push((grid_xi.clamp(-0.999, 0.999), grid_eta.clamp(-0.999, 0.999)));

    let mut candidates: Vec<Candidate> = Vec::new();
    for (mut xi, mut eta) in seed_list {
        let mut ok = false;
        for _ in 0..MAX_ITERS {
            let (f, scale) = bilateral_residual(c1, c2, xi, eta);
            if f.norm() <= PROJ_TOL * scale {
                ok = true;
                break;
            }
            let jm = bilateral_system(c1, c2, xi, eta);
            let Some(inv) = jm.try_inverse() else { break };
            let mut step = inv * f;
            // Full Newton steps on curved elements can overshoot into a
            // different basin; half the domain per step is plenty.
            let amax = step.amax();
            if amax > 0.5 {
                step *= 0.5 / amax;
            }
            xi -= step.x;
            eta -= step.y;
            // Seeds heading for an extrapolated stationary point far
            // outside the patch are dropped — the domain edges account
            // for boundary minima separately.
            if xi.abs() > 1.5 || eta.abs() > 1.5 {
                break;
            }
        }
        if !ok || xi.abs() > 1.0 || eta.abs() > 1.0 {
            continue;
        }
        // Only local minima qualify (positive-definite 2×2 Hessian).
        let jm = bilateral_system(c1, c2, xi, eta);
        if jm.determinant() <= 0.0 || jm.trace() <= 0.0 {
            continue;
        }
        if candidates
            .iter()
            .any(|c| (c.xi - xi).abs() < 1e-7 && (c.eta - eta).abs() < 1e-7)
        {
            continue;
        }
        let dist = (c1.eval_xi(xi, 0) - c2.eval_xi(eta, 0)).norm();
        candidates.push(Candidate { xi, eta, dist });
    }
    candidates.sort_by(|a, b| a.dist.total_cmp(&b.dist));

    // Constrained minima of the four domain edges (corners included).
    let mut edge_best: Option<(f64, f64, f64)> = None;
    for xi in [-1.0, 1.0] {
        let p = c1.eval_xi(xi, 0);
        let (eta, dist) = constrained_min_on_curve(&p, c2);
        if edge_best.is_none_or(|(_, _, bd)| dist < bd) {
            edge_best = Some((xi, eta, dist));
        }
    }
    for eta in [-1.0, 1.0] {
        let p = c2.eval_xi(eta, 0);
        let (xi, dist) = constrained_min_on_curve(&p, c1);
        if edge_best.is_none_or(|(_, _, bd)| dist < bd) {
            edge_best = Some((xi, eta, dist));
        }
    }

    let interior_wins = match (candidates.first(), &edge_best) {
        (Some(c), Some((_, _, ed))) => c.dist < *ed,
        (Some(_), None) => true,
        (None, _) => false,
    };

    if interior_wins {
        let best = &candidates[0];
        // Distinct interior minima at (numerically) the same distance mean
        // the projection carries no information (parallel overlap).
        let tol_d = best.dist * 1e-6 + 1e-12 * c1.geo.length();
        for other in candidates.iter().skip(1) {
            let same_point =
                (other.xi - best.xi).abs() < 1e-3 && (other.eta - best.eta).abs() < 1e-3;
            if !same_point && (other.dist - best.dist).abs() <= tol_d {
                let t1 = c1.eval_xi(best.xi, 1);
                let t2 = c2.eval_xi(best.eta, 1);
                let (alpha, _) = contact_angle(&t1, &t2);
                return Err(ContactError::NonUniqueProjection {
                    angle_deg: alpha.to_degrees(),
                });
            }
        }

        let t1 = c1.eval_xi(best.xi, 1);
        let t2 = c2.eval_xi(best.eta, 1);
        let (alpha, z) = contact_angle(&t1, &t2);
        let sin_alpha = (1.0 - z * z).max(0.0).sqrt();
        if sin_alpha < MIN_ANGLE_SIN {
            return Err(ContactError::NonUniqueProjection {
                angle_deg: alpha.to_degrees(),
            });
        }
        let jm = bilateral_system(c1, c2, best.xi, best.eta);
        if condition_2x2(&jm) > MAX_CONDITION {
            return Err(ContactError::NonUniqueProjection {
                angle_deg: alpha.to_degrees(),
            });
        }

        let (res, scale) = bilateral_residual(c1, c2, best.xi, best.eta);
        debug_assert!(
            res.norm() <= ACCEPT_TOL * scale,
            "accepted bilateral projection violates orthogonality: {:.3e}",
            res.norm() / scale
        );
        let r1 = c1.eval_xi(best.xi, 0);
        let r2 = c2.eval_xi(best.eta, 0);
        let d = r1 - r2;
        return Ok(ClosestPointResult {
            xi: best.xi,
            eta: best.eta,
            distance: best.dist,
            normal: d / best.dist,
            converged: true,
            on_boundary: false,
            kind: ProjectionKind::Bilateral,
        });
    }

    let Some((xi, eta, dist)) = edge_best else {
        return Err(ContactError::ProjectionDiverged { iters: MAX_ITERS });
    };
    let d = c1.eval_xi(xi, 0) - c2.eval_xi(eta, 0);
    Ok(ClosestPointResult {
        xi,
        eta,
        distance: dist,
        normal: d / dist,
        converged: true,
        on_boundary: true,
        kind: ProjectionKind::Bilateral,
    })
}

/// Unilateral projection of a fixed point onto a master curve, minimizing
/// over the closed element domain η ∈ [−1, 1].  An interior stationary
/// minimum is a regular projection; when the domain minimum sits at an
/// element end with the distance still falling outward, the true minimum
/// belongs to a neighboring element and the caller hears
/// `ProjectionOutsideElement` (with an extrapolated coordinate indicating
/// the side).
pub fn closest_point_unilateral(
    point: &Vec3,
    master: &CurveRef,
) -> Result<ClosestPointResult, ContactError> {
    let mut best_interior: Option<(f64, f64)> = None;
    for eta in stationary_minima(point, master) {
        let dist = (point - master.eval_xi(eta, 0)).norm();
        if best_interior.is_none_or(|(_, bd)| dist < bd) {
            best_interior = Some((eta, dist));
        }
    }

    // An element end where the distance still falls outward marks a
    // minimum owned by the neighboring element.
    let mut best_outside: Option<(f64, f64)> = None; // (extrapolated η, dist)
    for end in [-1.0f64, 1.0] {
        let t = master.eval_xi(end, 1);
        let d = point - master.eval_xi(end, 0);
        let g = t.dot(&d);
        // At η = −1 the distance falls outward when g < 0, at η = +1 when
        // g > 0 — both condense to g·η > 0.
        if g * end <= 0.0 {
            continue;
        }
        let s = master.eval_xi(end, 2);
        let dg = s.dot(&d) - t.norm_squared();
        let step = -g / dg;
        // One unconstrained Newton step estimates where the exterior
        // minimum sits; a wrong-side estimate collapses to just outside.
        let eta_est = if dg < 0.0 && step * end > 0.0 {
            end + step
        } else {
            end * (1.0 + 1e-3)
        };
        let dist = d.norm();
        if best_outside.is_none_or(|(_, bd)| dist < bd) {
            best_outside = Some((eta_est, dist));
        }
    }

    match (best_interior, best_outside) {
        (Some((eta, dist)), out) if out.is_none_or(|(_, od)| dist <= od) => {
            let d = point - master.eval_xi(eta, 0);
            let t2 = master.eval_xi(eta, 1);
            debug_assert!(
                t2.dot(&d).abs()
                    <= ACCEPT_TOL * t2.norm() * dist.max(1e-9 * master.geo.length()),
                "accepted unilateral projection violates orthogonality"
            );
            Ok(ClosestPointResult {
                xi: 0.0,
                eta,
                distance: dist,
                normal: d / dist,
                converged: true,
                on_boundary: false,
                kind: ProjectionKind::Unilateral,
            })
        }
        (_, Some((eta_est, _))) => Err(ContactError::ProjectionOutsideElement { eta: eta_est }),
        (_, None) => Err(ContactError::ProjectionDiverged { iters: MAX_ITERS }),
    }
}

// ---------------------------------------------------------------------------
// Dual-number curve evaluation: Hermite shapes as polynomials in a dual ξ.
// ---------------------------------------------------------------------------

/// Current nodal vectors of one curve lifted to dual numbers.
pub(crate) struct DualCurve<const N: usize> {
    pub d1: DualVec3<N>,
    pub t1: DualVec3<N>,
    pub d2: DualVec3<N>,
    pub t2: DualVec3<N>,
    pub tangent_scale: f64,
}

impl<const N: usize> DualCurve<N> {
    /// Lift a curve with its 12 dofs as independent variables starting at
    /// slot `first`.
    pub fn variables(c: &CurveRef, first: usize) -> Self {
        Self {
            d1: DualVec3::variables(c.dofs.d1, first),
            t1: DualVec3::variables(c.dofs.t1, first + 3),
            d2: DualVec3::variables(c.dofs.d2, first + 6),
            t2: DualVec3::variables(c.dofs.t2, first + 9),
            tangent_scale: 0.5 * c.geo.length(),
        }
    }

    /// Position r(ξ) for a dual coordinate.
    pub fn point(&self, xi: Dual2<N>) -> DualVec3<N> {
        let one_m = -xi + 1.0;
        let one_p = xi + 1.0;
        let nd1 = (xi + 2.0) * one_m * one_m * 0.25;
        let nt1 = one_p * one_m * one_m * 0.25;
        let nd2 = (-xi + 2.0) * one_p * one_p * 0.25;
        let nt2 = -(one_m * one_p * one_p * 0.25);
        self.combine(nd1, nt1, nd2, nt2)
    }

    /// Raw ξ-derivative r,ξ(ξ) for a dual coordinate.
    pub fn tangent_xi(&self, xi: Dual2<N>) -> DualVec3<N> {
        let one_m = -xi + 1.0;
        let one_p = xi + 1.0;
        let nd1p = -(one_m * one_p * 0.75);
        let nt1p = -(one_m * (xi * 3.0 + 1.0) * 0.25);
        let nd2p = one_m * one_p * 0.75;
        let nt2p = -(one_p * (-xi * 3.0 + 1.0) * 0.25);
        self.combine(nd1p, nt1p, nd2p, nt2p)
    }

    /// Position at a plain (constant) coordinate.
    pub fn point_const(&self, xi: f64) -> DualVec3<N> {
        self.point(Dual2::constant(xi))
    }

    /// Tangent at a plain (constant) coordinate.
    pub fn tangent_xi_const(&self, xi: f64) -> DualVec3<N> {
        self.tangent_xi(Dual2::constant(xi))
    }

    fn combine(
        &self,
        nd1: Dual2<N>,
        nt1: Dual2<N>,
        nd2: Dual2<N>,
        nt2: Dual2<N>,
    ) -> DualVec3<N> {
        self.d1.scale(nd1)
            + self.t1.scale(nt1 * self.tangent_scale)
            + self.d2.scale(nd2)
            + self.t2.scale(nt2 * self.tangent_scale)
    }
}
