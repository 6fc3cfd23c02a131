//! Penalty contact between a beam and fixed rigid primitives.
//!
//! Rigid obstacles are analytic surfaces (sphere, infinite cylinder), so
//! the gap at a slave Gauss point is a closed-form function of the
//! centerline position — no projection coordinate, no implicit terms.
//! The penalty density is integrated over the slave exactly like line
//! contact between beams, and the 12-dof residual and tangent come from a
//! single second-order dual evaluation of the surface distance.

use crate::geometry::{CurveRef, DualCurve};
use crate::law::PenaltyLaw;
use crate::pair::Segmentation;
use fibril_core::dual::{Dual2, DualVec3};
use fibril_core::Vec3;
use nalgebra::{SMatrix, SVector};

/// A fixed rigid obstacle.  Distances are measured to the *surface*,
/// positive outside.
#[derive(Debug, Clone, Copy)]
pub enum RigidPrimitive {
    Sphere {
        center: Vec3,
        radius: f64,
    },
    /// Infinite cylinder around the line `point + s·axis`; `axis` must be
    /// a unit vector (the constructor normalizes it).
    Cylinder {
        point: Vec3,
        axis: Vec3,
        radius: f64,
    },
}

impl RigidPrimitive {
    pub fn sphere(center: Vec3, radius: f64) -> Self {
        assert!(radius > 0.0, "sphere radius must be positive");
        RigidPrimitive::Sphere { center, radius }
    }

    pub fn cylinder(point: Vec3, axis: Vec3, radius: f64) -> Self {
        assert!(radius > 0.0, "cylinder radius must be positive");
        let n = axis.norm();
        assert!(n > 0.0, "cylinder axis must be nonzero");
        RigidPrimitive::Cylinder {
            point,
            axis: axis / n,
            radius,
        }
    }

    /// Signed distance from a point to the primitive's surface.
    pub fn surface_distance(&self, p: &Vec3) -> f64 {
        match self {
            RigidPrimitive::Sphere { center, radius } => (p - center).norm() - radius,
            RigidPrimitive::Cylinder {
                point,
                axis,
                radius,
            } => {
                let q = p - point;
                (q - q.dot(axis) * axis).norm() - radius
            }
        }
    }

    /// Outward surface normal at the foot of the shortest line from `p`.
    fn outward_normal(&self, p: &Vec3) -> Vec3 {
        match self {
            RigidPrimitive::Sphere { center, .. } => (p - center).normalize(),
            RigidPrimitive::Cylinder { point, axis, .. } => {
                let q = p - point;
                (q - q.dot(axis) * axis).normalize()
            }
        }
    }

    /// Surface distance with gradient and Hessian over the 12 slave dofs.
    /// Written as √(q·q − (q·â)²) for the cylinder so the axial direction
    /// drops out without an explicit foot point.
    fn surface_distance_dual(&self, p: &DualVec3<12>) -> Dual2<12> {
        match self {
            RigidPrimitive::Sphere { center, radius } => {
                (*p - DualVec3::constant(*center)).norm() - *radius
            }
            RigidPrimitive::Cylinder {
                point,
                axis,
                radius,
            } => {
                let q = *p - DualVec3::constant(*point);
                let axial = q.dot(&DualVec3::constant(*axis));
                (q.norm_squared() - axial.square()).sqrt() - *radius
            }
        }
    }
}

/// One active slave Gauss point against a rigid primitive.
#[derive(Debug, Clone, Copy)]
pub struct RigidGpRecord {
    pub xi: f64,
    /// Surface gap g = dist(r₁) − R_beam.
    pub gap: f64,
    /// Law force per unit initial slave length.
    pub force: f64,
    /// Outward primitive normal at the Gauss point (the force on the beam
    /// acts along it).
    pub normal: Vec3,
    /// Integration measure w·J₁(ξ).
    pub weight_ds: f64,
}

/// Residual/tangent of one beam against one rigid primitive, over the 12
/// slave dofs `[d₁ t₁ d₂ t₂]`.
#[derive(Debug, Clone)]
pub struct RigidContribution {
    /// Residual rows (internal-force side); the physical force is the
    /// negative.
    pub res: SVector<f64, 12>,
    pub stiff: Option<SMatrix<f64, 12, 12>>,
    /// Stored penalty energy (rigid contact is always conservative).
    pub potential: f64,
    pub records: Vec<RigidGpRecord>,
}

impl RigidContribution {
    pub fn is_active(&self) -> bool {
        !self.records.is_empty()
    }

    /// Resultant force exerted on the beam.
    pub fn force_on_beam(&self) -> Vec3 {
        -(Vec3::new(self.res[0], self.res[1], self.res[2])
            + Vec3::new(self.res[6], self.res[7], self.res[8]))
    }
}

/// Integrate the penalty density between a beam and a rigid primitive
/// over the slave Gauss points of `seg`.
pub fn rigid_primitive_contact(
    slave: &CurveRef,
    radius_slave: f64,
    prim: &RigidPrimitive,
    law: &PenaltyLaw,
    seg: &Segmentation,
    want_stiffness: bool,
) -> RigidContribution {
    let mut out = RigidContribution {
        res: SVector::zeros(),
        stiff: want_stiffness.then(SMatrix::zeros),
        potential: 0.0,
        records: Vec::new(),
    };
    let sc = DualCurve::<12>::variables(slave, 0);
    for (xi, wj) in seg.points(slave) {
        let p = slave.eval_xi(xi, 0);
        let g = prim.surface_distance(&p) - radius_slave;
        if !law.active(g) {
            continue;
        }
        let dist = prim.surface_distance_dual(&sc.point_const(xi));
        let fp = -law.force(g);
        let fpp = -law.force_slope(g);
        for i in 0..12 {
            out.res[i] += wj * fp * dist.g[i];
        }
        if let Some(k) = out.stiff.as_mut() {
            for i in 0..12 {
                for j in 0..12 {
                    k[(i, j)] += wj * (fpp * dist.g[i] * dist.g[j] + fp * dist.h[i][j]);
                }
            }
        }
        out.potential += wj * law.potential(g);
        out.records.push(RigidGpRecord {
            xi,
            gap: g,
            force: law.force(g),
            normal: prim.outward_normal(&p),
            weight_ds: wj,
        });
    }
    out
}
