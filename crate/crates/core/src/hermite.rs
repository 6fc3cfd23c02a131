//! C1 cubic Hermite centerline interpolation.
//!
//! An element carries twelve centerline degrees of freedom — end positions
//! d¹, d² and end tangents t¹, t² — interpolated as
//!
//! ```text
//! r(ξ) = Σᵢ N_d^i(ξ) dⁱ + (l/2) Σᵢ N_t^i(ξ) tⁱ,      ξ ∈ [−1, 1],
//! ```
//!
//! with the cubic Hermite polynomials N_d¹ = ¼(2+ξ)(1−ξ)², N_d² =
//! ¼(2−ξ)(1+ξ)², N_t¹ = ¼(1+ξ)(1−ξ)², N_t² = −¼(1−ξ)(1+ξ)².  The tangent
//! scale l is the arc length of the element's initial centerline, so nodal
//! tangent dofs are arc-length derivatives: r(∓1) = dⁱ, r′(∓1) = tⁱ.
//!
//! Arc-length derivatives use the chain rule (.)′ = (.),ξ / J(ξ) with the
//! element Jacobian J(ξ) = ||r₀,ξ(ξ)|| taken from the (fixed) initial
//! geometry.  J carries units of length per unit ξ, which forces the
//! division; the product form would be dimensionally inconsistent.

use crate::{Mat3, Vec3};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("evaluation coordinate {xi} outside [-1,1]")]
    Domain { xi: f64 },
    #[error("nodal tangent {index} has zero length")]
    ZeroTangent { index: usize },
    #[error("element Jacobian not positive at xi={xi}: J={j}")]
    NonpositiveJacobian { xi: f64, j: f64 },
    #[error("element arc-length iteration failed to converge (last l={l})")]
    ArcLength { l: f64 },
}

/// Tolerance on the reference coordinate domain check.
const XI_DOMAIN_TOL: f64 = 1e-12;

#[inline]
fn check_xi(xi: f64) -> Result<(), GeometryError> {
    if xi.abs() > 1.0 + XI_DOMAIN_TOL {
        Err(GeometryError::Domain { xi })
    } else {
        Ok(())
    }
}

/// The four Hermite polynomials (N_d¹, N_t¹, N_d², N_t²) or their ξ
/// derivatives, without the l/2 tangent scaling.
///
/// `order` 0, 1, 2 selects the value, first or second ξ-derivative.
pub fn shape(xi: f64, order: u8) -> Result<[f64; 4], GeometryError> {
    check_xi(xi)?;
    Ok(shape_unchecked(xi, order))
}

pub(crate) fn shape_unchecked(xi: f64, order: u8) -> [f64; 4] {
    match order {
        0 => [
            0.25 * (2.0 + xi) * (1.0 - xi) * (1.0 - xi),
            0.25 * (1.0 + xi) * (1.0 - xi) * (1.0 - xi),
            0.25 * (2.0 - xi) * (1.0 + xi) * (1.0 + xi),
            -0.25 * (1.0 - xi) * (1.0 + xi) * (1.0 + xi),
        ],
        1 => [
            -0.75 * (1.0 - xi * xi),
            -0.25 * (1.0 - xi) * (1.0 + 3.0 * xi),
            0.75 * (1.0 - xi * xi),
            -0.25 * (1.0 + xi) * (1.0 - 3.0 * xi),
        ],
        2 => [
            1.5 * xi,
            0.5 * (3.0 * xi - 1.0),
            -1.5 * xi,
            0.5 * (3.0 * xi + 1.0),
        ],
        _ => panic!("derivative order {order} not supported"),
    }
}

/// Element centerline degrees of freedom: end positions and end tangents.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CenterlineDofs {
    pub d1: Vec3,
    pub t1: Vec3,
    pub d2: Vec3,
    pub t2: Vec3,
}

impl CenterlineDofs {
    pub fn new(d1: Vec3, t1: Vec3, d2: Vec3, t2: Vec3) -> Self {
        Self { d1, t1, d2, t2 }
    }

    /// Pack as [d1, t1, d2, t2] into a 12-vector.
    pub fn to_array(self) -> [f64; 12] {
        let mut out = [0.0; 12];
        out[0..3].copy_from_slice(self.d1.as_slice());
        out[3..6].copy_from_slice(self.t1.as_slice());
        out[6..9].copy_from_slice(self.d2.as_slice());
        out[9..12].copy_from_slice(self.t2.as_slice());
        out
    }

    pub fn from_array(x: &[f64; 12]) -> Self {
        Self {
            d1: Vec3::new(x[0], x[1], x[2]),
            t1: Vec3::new(x[3], x[4], x[5]),
            d2: Vec3::new(x[6], x[7], x[8]),
            t2: Vec3::new(x[9], x[10], x[11]),
        }
    }

    /// Raw ξ-derivative of the interpolated curve (no Jacobian division).
    ///
    /// `order` 0 gives the position.  `tangent_scale` is l/2.
    pub fn eval_xi(&self, xi: f64, order: u8, tangent_scale: f64) -> Vec3 {
        let n = shape_unchecked(xi, order);
        n[0] * self.d1 + tangent_scale * n[1] * self.t1 + n[2] * self.d2
            + tangent_scale * n[3] * self.t2
    }
}

/// Immutable initial geometry of one element: initial dofs, initial arc
/// length l (the tangent scale), plus the derived Jacobian.
#[derive(Debug, Clone)]
pub struct RefGeometry {
    dofs0: CenterlineDofs,
    l: f64,
}

impl RefGeometry {
    /// Build from initial dofs.  `l` is the initial element arc length; pass
    /// `None` to determine it self-consistently from the curve (10-point
    /// Gauss quadrature of ||r₀,ξ||, solved for the fixed point since the
    /// tangent scaling itself involves l).
    pub fn new(dofs0: CenterlineDofs, l: Option<f64>) -> Result<Self, GeometryError> {
        if dofs0.t1.norm() == 0.0 {
            return Err(GeometryError::ZeroTangent { index: 0 });
        }
        if dofs0.t2.norm() == 0.0 {
            return Err(GeometryError::ZeroTangent { index: 1 });
        }
        let l = match l {
            Some(l) => l,
            None => solve_arc_length(&dofs0)?,
        };
        let geo = Self { dofs0, l };
        for &xi in crate::quadrature::GAUSS_10.points {
            let j = geo.jacobian(xi);
            if !(j > 0.0) {
                return Err(GeometryError::NonpositiveJacobian { xi, j });
            }
        }
        Ok(geo)
    }

    pub fn dofs0(&self) -> &CenterlineDofs {
        &self.dofs0
    }

    /// Initial element arc length (tangent scale).
    #[inline]
    pub fn length(&self) -> f64 {
        self.l
    }

    /// Element Jacobian J(ξ) = ||r₀,ξ(ξ)|| of the initial geometry.
    #[inline]
    pub fn jacobian(&self, xi: f64) -> f64 {
        self.dofs0.eval_xi(xi, 1, 0.5 * self.l).norm()
    }

    /// ξ-derivative of the Jacobian, J,ξ = (r₀,ξ · r₀,ξξ)/J.
    #[inline]
    pub fn jacobian_deriv(&self, xi: f64) -> f64 {
        let r1 = self.dofs0.eval_xi(xi, 1, 0.5 * self.l);
        let r2 = self.dofs0.eval_xi(xi, 2, 0.5 * self.l);
        r1.dot(&r2) / r1.norm()
    }

    /// Evaluate the centerline for dofs `x`: the position (order 0) or
    /// arc-length derivatives r′ (order 1), r″ (order 2).
    pub fn eval(&self, x: &CenterlineDofs, xi: f64, order: u8) -> Result<Vec3, GeometryError> {
        check_xi(xi)?;
        Ok(self.eval_unchecked(x, xi, order))
    }

    pub(crate) fn eval_unchecked(&self, x: &CenterlineDofs, xi: f64, order: u8) -> Vec3 {
        let ts = 0.5 * self.l;
        match order {
            0 => x.eval_xi(xi, 0, ts),
            1 => x.eval_xi(xi, 1, ts) / self.jacobian(xi),
            2 => {
                // r″ = r,ξξ/J² − (J,ξ/J³) r,ξ  (exact chain rule; the second
                // term vanishes only for arc-length-linear initial curves).
                let j = self.jacobian(xi);
                let jd = self.jacobian_deriv(xi);
                x.eval_xi(xi, 2, ts) / (j * j) - (jd / (j * j * j)) * x.eval_xi(xi, 1, ts)
            }
            _ => panic!("derivative order {order} not supported"),
        }
    }

    /// Assemble the 3×12 interpolation matrix so that H·x̂ equals
    /// `eval(x, xi, order)` for x̂ = [d1, t1, d2, t2]; `order` 0 or 1.
    pub fn assemble_h(&self, xi: f64, order: u8) -> Result<nalgebra::SMatrix<f64, 3, 12>, GeometryError> {
        check_xi(xi)?;
        Ok(self.assemble_h_unchecked(xi, order))
    }

    pub(crate) fn assemble_h_unchecked(&self, xi: f64, order: u8) -> nalgebra::SMatrix<f64, 3, 12> {
        assert!(order <= 1, "H is provided for orders 0 and 1");
        let mut n = shape_unchecked(xi, order);
        let ts = 0.5 * self.l;
        n[1] *= ts;
        n[3] *= ts;
        if order == 1 {
            let j = self.jacobian(xi);
            for v in &mut n {
                *v /= j;
            }
        }
        let mut h = nalgebra::SMatrix::<f64, 3, 12>::zeros();
        for (block, coeff) in n.iter().enumerate() {
            for k in 0..3 {
                h[(k, 3 * block + k)] = *coeff;
            }
        }
        h
    }

    /// Initial centerline value / arc-length derivatives.
    pub fn eval0(&self, xi: f64, order: u8) -> Vec3 {
        self.eval_unchecked(&self.dofs0, xi, order)
    }

    /// Rotation-free initial frame helper: unit tangent of the initial curve.
    pub fn unit_tangent0(&self, xi: f64) -> Vec3 {
        self.eval0(xi, 1).normalize()
    }
}

/// Arc length of the initial curve given tangent scale l (10-pt Gauss).
fn arc_length_for(dofs0: &CenterlineDofs, l: f64) -> f64 {
    crate::quadrature::GAUSS_10.integrate(|xi| dofs0.eval_xi(xi, 1, 0.5 * l).norm())
}

/// Solve l = ∫||r₀,ξ(ξ; l)|| dξ for the self-consistent element length.
fn solve_arc_length(dofs0: &CenterlineDofs) -> Result<f64, GeometryError> {
    let chord = (dofs0.d2 - dofs0.d1).norm();
    // Roundoff floor of the iteration: the quadrature subtracts station
    // coordinates, so its noise scales with their magnitude, not with
    // the element length.  A short element far from the origin can
    // otherwise flip between two values a few dozen ulps of the
    // position scale apart and never meet a purely length-relative
    // threshold.
    let noise =
        64.0 * f64::EPSILON * (dofs0.d1.norm() + dofs0.d2.norm() + chord).max(1.0);
    let mut l = if chord > 0.0 { chord } else { 1.0 };
    for _ in 0..200 {
        let next = arc_length_for(dofs0, l);
        if !next.is_finite() || next <= 0.0 {
            return Err(GeometryError::ArcLength { l: next });
        }
        if (next - l).abs() <= 1e-15 * next.max(1.0) + noise {
            return Ok(next);
        }
        l = next;
    }
    // The map is a contraction for reasonable geometries; report rather than
    // silently accept a drifting value.
    Err(GeometryError::ArcLength { l })
}

/// Skew-symmetric helper re-exported for residual assembly convenience.
#[inline]
pub fn skew(a: &Vec3) -> Mat3 {
    crate::so3::skew(a)
}
