//! Beam finite elements.
//!
//! Two formulations share the C1 Hermite centerline of [`crate::hermite`]:
//!
//! * [`simo_reissner`] — shear-deformable element with an interpolated triad
//!   field (rotational dofs at two end nodes and one mid node, 21 dofs),
//! * [`torsion_free`] — rotation-dof-free element for initially straight,
//!   isotropic-section beams (12 dofs).
//!
//! Element evaluation is a pure function of the passed dofs and state, so
//! elements can be evaluated concurrently and assembled by the caller.

pub mod simo_reissner;
pub mod torsion_free;

use crate::hermite::{GeometryError, RefGeometry};
use crate::so3;
use crate::{Mat3, Vec3};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ElementError {
    /// A relative rotation (between nodes, or across one time step at a
    /// Gauss point) reached the π limit of the rotation-vector chart.
    #[error("relative rotation reached pi (refine the mesh or reduce the step)")]
    AngleAtPi,
    #[error("triad is not a rotation matrix (defect {defect:.3e})")]
    InvalidTriad { defect: f64 },
    #[error("degenerate centerline tangent, |r'| = {norm:.3e}")]
    DegenerateTangent { norm: f64 },
    /// A distributed moment handed to the torsion-free element must have no
    /// component along the centerline tangent.
    #[error("distributed moment has tangential fraction {fraction:.3e}")]
    TangentialMoment { fraction: f64 },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// Largest admissible rotation-vector norm; beyond this the log chart is too
/// close to its π boundary for reliable linearization.
pub(crate) const ANGLE_LIMIT: f64 = std::f64::consts::PI - 1e-3;

/// Triads at the element nodes ξ = −1, 0, +1 by smallest-rotation transport
/// of `entry_frame` along the initial centerline.
///
/// The first basis vector of every produced triad is the unit tangent of the
/// initial curve at its node; the transverse directors follow from the entry
/// frame with no spurious twist.  Returns the nodal triads in storage order
/// (end ξ=−1, end ξ=+1, mid ξ=0) together with the exit frame to seed the
/// next element of the same fiber.
pub fn transported_triads(geo: &RefGeometry, entry_frame: &Mat3) -> ([Mat3; 3], Mat3) {
    let walk = |frame: &Mat3, xi: f64| -> Mat3 {
        let tangent = geo.unit_tangent0(xi);
        let g1: Vec3 = frame.column(0).into();
        so3::smallest_rotation(&g1, &tangent) * frame
    };
    let tri_start = walk(entry_frame, -1.0);
    let tri_mid = walk(&tri_start, 0.0);
    let tri_end = walk(&tri_mid, 1.0);
    ([tri_start, tri_end, tri_mid], tri_end)
}

/// Frame with first column along `tangent`; transverse directors picked by
/// smallest rotation from the global axes.  Seed for fiber frame transport.
pub fn seed_frame(tangent: &Vec3) -> Mat3 {
    so3::smallest_rotation(&Vec3::x(), tangent)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hermite::CenterlineDofs;

    #[test]
    fn transported_triads_follow_the_tangent_without_twist() {
        // Quarter circle in the x-y plane.
        let dofs = CenterlineDofs::new(
            Vec3::new(1.0, 0.0, 0.0),
            Vec3::new(0.0, 1.0, 0.0),
            Vec3::new(0.0, 1.0, 0.0),
            Vec3::new(-1.0, 0.0, 0.0),
        );
        let geo = RefGeometry::new(dofs, None).unwrap();
        let entry = seed_frame(&Vec3::y());
        let (tris, exit) = transported_triads(&geo, &entry);
        for (k, xi) in [(0usize, -1.0), (1, 1.0), (2, 0.0)] {
            let g1: Vec3 = tris[k].column(0).into();
            assert!((g1 - geo.unit_tangent0(xi)).norm() < 1e-12);
            assert!(so3::rotation_defect(&tris[k]) < 1e-12);
        }
        assert_eq!(exit, tris[1]);
        // Planar curve: the out-of-plane director must stay exactly e_z.
        for t in &tris {
            let g3: Vec3 = t.column(2).into();
            assert!((g3 - Vec3::z()).norm() < 1e-12, "g3={g3:?}");
        }
    }
}
