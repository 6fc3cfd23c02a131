//! Torsion-free beam element: twelve centerline dofs, no rotational unknowns.
//!
//! For isotropic cross-sections (equal principal bending stiffnesses) the
//! torsional and bending problems decouple, and a beam loaded without axial
//! moments stays torsion-free.  Its elastic energy then depends on the
//! centerline alone:
//!
//! ```text
//! Π = ∫ ½ EA (‖a‖ − 1)² + ½ EI κ·κ ds₀,    a = r′,  b = r″,
//! κ = (a × b)/‖a‖²,
//! ```
//!
//! with primes denoting derivatives with respect to the *initial* arc-length
//! coordinate s₀.  The stress-free configurations are exactly the straight,
//! unstretched ones, so elements are meant to be created over straight
//! initial geometry.
//!
//! Both the residual (exact energy gradient) and the stiffness (exact energy
//! Hessian, hence symmetric) are assembled from closed-form derivatives of
//! the invariants n = ‖a‖ and u = ‖a × b‖² — no rotational degrees of
//! freedom, no linearization of rotation manifolds.  The element inherits
//! the C1 Hermite centerline, which supplies the r″ continuity the bending
//! term needs.
//!
//! Because the model cannot carry torsion, external moments must stay
//! orthogonal to the beam axis.  A distributed moment m̃ acts through the
//! tangent rotation δθ⊥ = (t × δr′)/‖t‖², giving the configuration-dependent
//! (non-conservative) load assembled in [`TFElement::distributed_moment_load`].

use crate::element::ElementError;
use crate::hermite::{shape_unchecked, CenterlineDofs, RefGeometry};
use crate::quadrature::{Rule, GAUSS_10, GAUSS_4};
use crate::section::SectionProperties;
use crate::so3;
use crate::{Mat3, Vec3};
use nalgebra::{SMatrix, SVector};

pub const NDOF: usize = 12;
pub type ResidualVec = SVector<f64, NDOF>;
pub type StiffnessMat = SMatrix<f64, NDOF, NDOF>;

/// Tangent norms below this are treated as degenerate: the curvature
/// measure divides by ‖a‖ repeatedly and loses all meaning as ‖a‖ → 0.
const TANGENT_TOL: f64 = 1e-12;

/// Largest admissible axial fraction |t̂·m̃|/‖m̃‖ of a distributed moment.
const AXIAL_MOMENT_TOL: f64 = 1e-8;

/// Cached geometry factors at one quadrature point.
#[derive(Debug, Clone)]
struct TFPoint {
    wj: f64,
    /// First arc-derivative interpolation matrix H′.
    b1: SMatrix<f64, 3, 12>,
    /// Second arc-derivative interpolation matrix H″.
    b2: SMatrix<f64, 3, 12>,
}

#[derive(Debug, Clone)]
pub struct TFElement {
    geo: RefGeometry,
    props: SectionProperties,
    rule: Rule,
    pts: Vec<TFPoint>,
    mass: StiffnessMat,
}

/// H″(ξ): second arc derivative of the interpolation matrix, by the chain
/// rule H″ = H,ξξ/J² − (J,ξ/J³) H,ξ.
fn second_deriv_h(geo: &RefGeometry, xi: f64) -> SMatrix<f64, 3, 12> {
    let s1 = shape_unchecked(xi, 1);
    let s2 = shape_unchecked(xi, 2);
    let j = geo.jacobian(xi);
    let jp = geo.jacobian_deriv(xi);
    let ts = 0.5 * geo.length();
    let scale = [1.0, ts, 1.0, ts];
    let mut h = SMatrix::<f64, 3, 12>::zeros();
    for k in 0..4 {
        let c = s2[k] * scale[k] / (j * j) - jp / (j * j * j) * s1[k] * scale[k];
        for r in 0..3 {
            h[(r, 3 * k + r)] = c;
        }
    }
    h
}

impl TFElement {
    /// Element over its initial geometry with the default 4-point Gauss rule.
    pub fn new(geo: RefGeometry, props: SectionProperties) -> Self {
        Self::with_rule(geo, props, GAUSS_4)
    }

    pub fn with_rule(geo: RefGeometry, props: SectionProperties, rule: Rule) -> Self {
        assert!(
            (props.section.i2 - props.section.i3).abs() <= 1e-12 * props.section.i2.abs(),
            "torsion-free model requires an isotropic section (I2 = I3)"
        );
        let pts = rule
            .iter()
            .map(|(xi, w)| TFPoint {
                wj: w * geo.jacobian(xi),
                b1: geo.assemble_h_unchecked(xi, 1),
                b2: second_deriv_h(&geo, xi),
            })
            .collect();

        // Consistent mass: translational inertia only, independent of the
        // deformation; integrated once with a dense rule.
        let rho_a = props.mass_per_length();
        let mut mass = StiffnessMat::zeros();
        for (xi, w) in GAUSS_10.iter() {
            let h = geo.assemble_h_unchecked(xi, 0);
            mass += h.transpose() * (w * geo.jacobian(xi) * rho_a) * h;
        }

        Self {
            geo,
            props,
            rule,
            pts,
            mass,
        }
    }

    pub fn reference(&self) -> &RefGeometry {
        &self.geo
    }

    pub fn properties(&self) -> &SectionProperties {
        &self.props
    }

    pub fn quadrature(&self) -> Rule {
        self.rule
    }

    fn axial_stiffness(&self) -> f64 {
        self.props.material.youngs * self.props.section.area
    }

    fn bending_stiffness(&self) -> f64 {
        self.props.material.youngs * self.props.section.i2
    }

    /// Axial strain ε = ‖a‖ − 1 and curvature vector κ = (a×b)/‖a‖² at ξ.
    pub fn strains(&self, dofs: &CenterlineDofs, xi: f64) -> Result<(f64, Vec3), ElementError> {
        let a = self.geo.eval(dofs, xi, 1)?;
        let b = self.geo.eval(dofs, xi, 2)?;
        let n = a.norm();
        if n < TANGENT_TOL {
            return Err(ElementError::DegenerateTangent { norm: n });
        }
        Ok((n - 1.0, a.cross(&b) / (n * n)))
    }

    /// Stored elastic energy.
    pub fn internal_energy(&self, dofs: &CenterlineDofs) -> Result<f64, ElementError> {
        let x = SVector::<f64, 12>::from_column_slice(&dofs.to_array());
        let (ea, ei) = (self.axial_stiffness(), self.bending_stiffness());
        let mut e = 0.0;
        for p in &self.pts {
            let a: Vec3 = p.b1 * x;
            let b: Vec3 = p.b2 * x;
            let n = a.norm();
            if n < TANGENT_TOL {
                return Err(ElementError::DegenerateTangent { norm: n });
            }
            let c = a.cross(&b);
            let u = c.norm_squared();
            let q = n.powi(-4);
            e += p.wj * (0.5 * ea * (n - 1.0).powi(2) + 0.5 * ei * u * q);
        }
        Ok(e)
    }

    /// Internal residual (exact energy gradient) and optionally the exact,
    /// symmetric energy Hessian.
    pub fn internal_forces(
        &self,
        dofs: &CenterlineDofs,
        want_stiffness: bool,
    ) -> Result<(ResidualVec, Option<StiffnessMat>), ElementError> {
        let x = SVector::<f64, 12>::from_column_slice(&dofs.to_array());
        let (ea, ei) = (self.axial_stiffness(), self.bending_stiffness());
        let mut res = ResidualVec::zeros();
        let mut stiff = want_stiffness.then(StiffnessMat::zeros);

        for p in &self.pts {
            let a: Vec3 = p.b1 * x;
            let b: Vec3 = p.b2 * x;
            let n = a.norm();
            if n < TANGENT_TOL {
                return Err(ElementError::DegenerateTangent { norm: n });
            }
            let c = a.cross(&b);
            let u = c.norm_squared();
            let q = n.powi(-4);

            // Invariant derivatives: u = ‖a×b‖², q = n⁻⁴.
            let u_a = 2.0 * b.cross(&c);
            let u_b = -2.0 * a.cross(&c);
            let q_a = -4.0 * n.powi(-6) * a;

            let g_a = ea * (1.0 - 1.0 / n) * a + 0.5 * ei * (q * u_a + u * q_a);
            let g_b = 0.5 * ei * q * u_b;

            res += p.wj * (p.b1.transpose() * g_a + p.b2.transpose() * g_b);

            if let Some(k) = stiff.as_mut() {
                let sa = so3::skew(&a);
                let sb = so3::skew(&b);
                let sc = so3::skew(&c);
                let ahat = a / n;
                let aat = ahat * ahat.transpose();

                let u_aa = -2.0 * sb * sb;
                let u_ab = -2.0 * sc + 2.0 * sb * sa;
                let u_bb = -2.0 * sa * sa;
                let q_aa = -4.0 * n.powi(-6) * Mat3::identity()
                    + 24.0 * n.powi(-8) * (a * a.transpose());

                let h_aa = ea * (aat + (1.0 - 1.0 / n) * (Mat3::identity() - aat))
                    + 0.5
                        * ei
                        * (q * u_aa
                            + u_a * q_a.transpose()
                            + q_a * u_a.transpose()
                            + u * q_aa);
                let h_ab = 0.5 * ei * (q * u_ab + q_a * u_b.transpose());
                let h_bb = 0.5 * ei * q * u_bb;

                let k_aa = p.b1.transpose() * h_aa * p.b1;
                let k_ab = p.b1.transpose() * h_ab * p.b2;
                let k_bb = p.b2.transpose() * h_bb * p.b2;
                *k += p.wj * (k_aa + k_ab + k_ab.transpose() + k_bb);
            }
        }
        Ok((res, stiff))
    }

    /// Constant consistent mass matrix (translational inertia only).
    pub fn mass_matrix(&self) -> &StiffnessMat {
        &self.mass
    }

    /// Load vector of a constant distributed force per unit initial length
    /// (dead load, configuration-independent).
    pub fn distributed_force_load(&self, f: &Vec3) -> ResidualVec {
        let mut out = ResidualVec::zeros();
        for (xi, w) in self.rule.iter() {
            let h = self.geo.assemble_h_unchecked(xi, 0);
            out += h.transpose() * ((w * self.geo.jacobian(xi)) * f);
        }
        out
    }

    /// Load vector of a distributed moment per unit initial length, and
    /// optionally its configuration derivative (the load is follower-type:
    /// it acts on the rotation of the current tangent).
    ///
    /// Moments with an axial component cannot be carried by a torsion-free
    /// model; any quadrature point with |t̂·m̃| > 1e-8‖m̃‖ is rejected.
    pub fn distributed_moment_load(
        &self,
        dofs: &CenterlineDofs,
        m: &Vec3,
        want_stiffness: bool,
    ) -> Result<(ResidualVec, Option<StiffnessMat>), ElementError> {
        let mut out = ResidualVec::zeros();
        let mut stiff = want_stiffness.then(StiffnessMat::zeros);
        let m_norm = m.norm();
        if m_norm == 0.0 {
            return Ok((out, stiff));
        }
        let x = SVector::<f64, 12>::from_column_slice(&dofs.to_array());
        for p in &self.pts {
            let t: Vec3 = p.b1 * x;
            let n = t.norm();
            if n < TANGENT_TOL {
                return Err(ElementError::DegenerateTangent { norm: n });
            }
            let fraction = (t.dot(m) / (n * m_norm)).abs();
            if fraction > AXIAL_MOMENT_TOL {
                return Err(ElementError::TangentialMoment { fraction });
            }
            let n2 = n * n;
            let pvec = m.cross(&t) / n2;
            out += p.b1.transpose() * (p.wj * pvec);
            if let Some(k) = stiff.as_mut() {
                let dp = so3::skew(m) / n2 - (2.0 / (n2 * n2)) * (m.cross(&t) * t.transpose());
                *k += p.b1.transpose() * (p.wj * dp) * p.b1;
            }
        }
        Ok((out, stiff))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::section::{CrossSection, Material};
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn props() -> SectionProperties {
        SectionProperties::new(
            CrossSection::circle(0.1),
            Material::new(1.0e4, 4.0e3, 3.0),
        )
    }

    fn straight_element(len: f64) -> TFElement {
        let dofs = CenterlineDofs::new(
            Vec3::zeros(),
            Vec3::x(),
            Vec3::new(len, 0.0, 0.0),
            Vec3::x(),
        );
        TFElement::new(RefGeometry::new(dofs, Some(len)).unwrap(), props())
    }

    fn random_vec(rng: &mut ChaCha8Rng, s: f64) -> Vec3 {
        Vec3::new(
            rng.random_range(-s..s),
            rng.random_range(-s..s),
            rng.random_range(-s..s),
        )
    }

    fn random_state(elem: &TFElement, rng: &mut ChaCha8Rng, amp: f64) -> CenterlineDofs {
        let base = elem.reference().dofs0();
        CenterlineDofs::new(
            base.d1 + random_vec(rng, amp),
            base.t1 + random_vec(rng, amp),
            base.d2 + random_vec(rng, amp),
            base.t2 + random_vec(rng, amp),
        )
    }

    fn perturb(dofs: &CenterlineDofs, k: usize, h: f64) -> CenterlineDofs {
        let mut arr = dofs.to_array();
        arr[k] += h;
        CenterlineDofs::from_array(&arr)
    }

    #[test]
    fn strains_identify_reference_stretch_and_circle() {
        let elem = straight_element(1.0);
        let d0 = *elem.reference().dofs0();
        for xi in [-0.9, 0.0, 0.6] {
            let (eps, kappa) = elem.strains(&d0, xi).unwrap();
            assert!(eps.abs() < 1e-13);
            assert!(kappa.norm() < 1e-13);
        }

        // Uniform stretch by 10%.
        let stretched = CenterlineDofs::new(
            Vec3::zeros(),
            1.1 * Vec3::x(),
            Vec3::new(1.1, 0.0, 0.0),
            1.1 * Vec3::x(),
        );
        for xi in [-0.5, 0.3] {
            let (eps, kappa) = elem.strains(&stretched, xi).unwrap();
            assert!((eps - 0.1).abs() < 1e-12, "eps={eps}");
            assert!(kappa.norm() < 1e-12);
        }

        // Bent onto a circle of radius 2, parametrized by initial arc length:
        // curvature magnitude 1/2 up to Hermite interpolation error.
        let r = 2.0;
        let arc = |s: f64| Vec3::new(r * (s / r).sin(), r * (1.0 - (s / r).cos()), 0.0);
        let tang = |s: f64| Vec3::new((s / r).cos(), (s / r).sin(), 0.0);
        let bent = CenterlineDofs::new(arc(0.0), tang(0.0), arc(1.0), tang(1.0));
        for xi in [-0.7, 0.1, 0.8] {
            let (eps, kappa) = elem.strains(&bent, xi).unwrap();
            assert!(eps.abs() < 5e-3, "eps={eps}");
            // A single cubic over half a radian of arc reproduces the
            // curvature to ~1% pointwise; 2% bounds the worst sample point.
            assert!(
                (kappa.norm() - 0.5).abs() < 0.02 * 0.5,
                "kappa={}",
                kappa.norm()
            );
            // Plane curve: curvature points out of the plane.
            assert!(kappa.x.abs() < 1e-10 && kappa.y.abs() < 1e-10);
        }
    }

    #[test]
    fn degenerate_tangent_is_rejected() {
        let elem = straight_element(1.0);
        let collapsed = CenterlineDofs::new(
            Vec3::zeros(),
            Vec3::zeros(),
            Vec3::zeros(),
            Vec3::zeros(),
        );
        match elem.internal_forces(&collapsed, false) {
            Err(ElementError::DegenerateTangent { .. }) => {}
            other => panic!("expected DegenerateTangent, got {other:?}"),
        }
    }

    #[test]
    fn residual_is_the_energy_gradient() {
        let elem = straight_element(1.3);
        let mut rng = ChaCha8Rng::seed_from_u64(40);
        let h = 1e-6;
        for _ in 0..10 {
            let dofs = random_state(&elem, &mut rng, 0.2);
            let (res, _) = elem.internal_forces(&dofs, false).unwrap();
            let scale = res.norm().max(1e-6);
            for k in 0..NDOF {
                let ep = elem.internal_energy(&perturb(&dofs, k, h)).unwrap();
                let em = elem.internal_energy(&perturb(&dofs, k, -h)).unwrap();
                let fd = (ep - em) / (2.0 * h);
                assert!(
                    (fd - res[k]).abs() < 1e-6 * scale,
                    "dof {k}: fd={fd} res={}",
                    res[k]
                );
            }
        }
    }

    #[test]
    fn energy_and_residual_are_equivariant_under_rigid_motion() {
        let elem = straight_element(1.0);
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for _ in 0..5 {
            let dofs = random_state(&elem, &mut rng, 0.25);
            let rot = so3::exp(&random_vec(&mut rng, 2.0));
            let shift = random_vec(&mut rng, 5.0);
            let moved = CenterlineDofs::new(
                rot * dofs.d1 + shift,
                rot * dofs.t1,
                rot * dofs.d2 + shift,
                rot * dofs.t2,
            );
            let ea = elem.internal_energy(&dofs).unwrap();
            let eb = elem.internal_energy(&moved).unwrap();
            assert!((ea - eb).abs() < 1e-10 * ea.max(1.0), "{ea} vs {eb}");

            // The gradient transforms covariantly: every 3-vector block
            // rotates with the configuration.
            let (ra, _) = elem.internal_forces(&dofs, false).unwrap();
            let (rb, _) = elem.internal_forces(&moved, false).unwrap();
            for blk in 0..4 {
                let va = Vec3::new(ra[3 * blk], ra[3 * blk + 1], ra[3 * blk + 2]);
                let vb = Vec3::new(rb[3 * blk], rb[3 * blk + 1], rb[3 * blk + 2]);
                assert!(
                    (vb - rot * va).norm() < 1e-9 * ra.norm().max(1e-9),
                    "block {blk}"
                );
            }
        }
    }

    #[test]
    fn stiffness_is_symmetric_and_matches_finite_differences() {
        let elem = straight_element(0.9);
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let h = 1e-6;
        for trial in 0..10 {
            let dofs = random_state(&elem, &mut rng, 0.2);
            let (_, k) = elem.internal_forces(&dofs, true).unwrap();
            let k = k.unwrap();
            let asym = (k - k.transpose()).norm() / k.norm();
            assert!(asym < 1e-12, "asymmetry {asym:.3e}");

            let mut fd = StiffnessMat::zeros();
            for c in 0..NDOF {
                let (rp, _) = elem.internal_forces(&perturb(&dofs, c, h), false).unwrap();
                let (rm, _) = elem.internal_forces(&perturb(&dofs, c, -h), false).unwrap();
                let col = (rp - rm) / (2.0 * h);
                for r in 0..NDOF {
                    fd[(r, c)] = col[r];
                }
            }
            let err = (k - fd).norm() / fd.norm();
            assert!(err < 1e-5, "trial {trial}: rel err {err:.3e}");
        }
    }

    #[test]
    fn reference_stiffness_has_exactly_five_zero_modes() {
        // Straight stress-free state: rigid translations (3) and the two
        // transverse rigid rotations leave the energy flat to second order.
        // The axial rotation maps every dof of a straight centerline to
        // itself, so it spans no additional direction.
        let elem = straight_element(1.0);
        let d0 = *elem.reference().dofs0();
        let (_, k) = elem.internal_forces(&d0, true).unwrap();
        let k = k.unwrap();

        let sym = 0.5 * (k + k.transpose());
        let mut eig: Vec<f64> = sym
            .symmetric_eigenvalues()
            .iter()
            .map(|l| l.abs())
            .collect();
        eig.sort_by(f64::total_cmp);
        // Clear spectral gap between modes 5 and 6.
        assert!(
            eig[5] > 1e3 * eig[4].max(1e-12),
            "no spectral gap: {:?}",
            &eig[..7]
        );
        assert!(eig[4] < 1e-9 * eig[11], "fifth mode not null: {:?}", &eig[..6]);

        // Independent oracle: finite-difference Hessian of the energy.
        let h = 1e-4;
        let mut fdh = StiffnessMat::zeros();
        let x0 = d0.to_array();
        let e_at = |arr: &[f64; 12]| {
            elem.internal_energy(&CenterlineDofs::from_array(arr))
                .unwrap()
        };
        for i in 0..NDOF {
            for j in 0..NDOF {
                let mut pp = x0;
                pp[i] += h;
                pp[j] += h;
                let mut pm = x0;
                pm[i] += h;
                pm[j] -= h;
                let mut mp = x0;
                mp[i] -= h;
                mp[j] += h;
                let mut mm = x0;
                mm[i] -= h;
                mm[j] -= h;
                fdh[(i, j)] = (e_at(&pp) - e_at(&pm) - e_at(&mp) + e_at(&mm)) / (4.0 * h * h);
            }
        }
        let symfd = 0.5 * (fdh + fdh.transpose());
        let mut eigfd: Vec<f64> = symfd
            .symmetric_eigenvalues()
            .iter()
            .map(|l| l.abs())
            .collect();
        eigfd.sort_by(f64::total_cmp);
        let zero_count = eigfd.iter().filter(|&&l| l < 1e-3 * eigfd[11]).count();
        assert_eq!(zero_count, 5, "oracle spectrum {eigfd:?}");

        // The five analytic null directions are annihilated by K.
        let mut modes: Vec<SVector<f64, 12>> = Vec::new();
        for comp in 0..3 {
            let mut v = SVector::<f64, 12>::zeros();
            v[comp] = 1.0;
            v[6 + comp] = 1.0; // d1 and d2 translate, tangents fixed
            modes.push(v);
        }
        for axis in [Vec3::y(), Vec3::z()] {
            // Linearized rigid rotation: δd = w×d, δt = w×t.
            let mut v = SVector::<f64, 12>::zeros();
            let blocks = [d0.d1, d0.t1, d0.d2, d0.t2];
            for (blk, val) in blocks.iter().enumerate() {
                let d = axis.cross(val);
                v[3 * blk] = d.x;
                v[3 * blk + 1] = d.y;
                v[3 * blk + 2] = d.z;
            }
            modes.push(v);
        }
        let knorm = k.norm();
        for (i, v) in modes.iter().enumerate() {
            let r = (k * v).norm() / (knorm * v.norm().max(1e-12));
            assert!(r < 1e-12, "mode {i} not in kernel: {r:.3e}");
        }
    }

    #[test]
    fn mass_matrix_matches_classical_values_and_is_constant() {
        let l = 2.0;
        let elem = straight_element(l);
        let m = elem.mass_matrix();
        let rho_a = elem.properties().mass_per_length();

        // Symmetric positive definite.
        assert!((m - m.transpose()).norm() < 1e-12 * m.norm());
        let eig = m.symmetric_eigenvalues();
        assert!(eig.iter().all(|&l| l > 0.0));

        // Classical consistent beam mass ρAl/420 · [156, 22l, 54, −13l; …]
        // per displacement component, with slope dofs carrying a length unit.
        let s = rho_a * l / 420.0;
        let expect = [
            ((0, 0), 156.0 * s),
            ((0, 3), 22.0 * l * s),
            ((0, 6), 54.0 * s),
            ((0, 9), -13.0 * l * s),
            ((3, 3), 4.0 * l * l * s),
            ((3, 9), -3.0 * l * l * s),
            ((6, 6), 156.0 * s),
            ((9, 9), 4.0 * l * l * s),
        ];
        for ((r, c), want) in expect {
            assert!(
                (m[(r, c)] - want).abs() < 1e-12 * want.abs(),
                "entry ({r},{c}) = {} want {want}",
                m[(r, c)]
            );
        }

        // Translational completeness: a rigid unit translation carries the
        // full element mass ρA·l.
        for comp in 0..3 {
            let mut v = SVector::<f64, 12>::zeros();
            v[comp] = 1.0;
            v[6 + comp] = 1.0;
            let total = (v.transpose() * m * v)[(0, 0)];
            assert!((total - rho_a * l).abs() < 1e-12 * rho_a * l);
        }
    }

    #[test]
    fn moment_load_rejects_axial_components_and_passes_pairing_check() {
        let elem = straight_element(1.0);
        let d0 = *elem.reference().dofs0();

        // Axial moment on a straight beam: must be rejected.
        match elem.distributed_moment_load(&d0, &Vec3::new(2.0, 0.0, 0.0), false) {
            Err(ElementError::TangentialMoment { fraction }) => {
                assert!(fraction > 0.9, "fraction {fraction}")
            }
            other => panic!("expected TangentialMoment, got {other:?}"),
        }

        // Zero moment loads nothing.
        let (z, _) = elem.distributed_moment_load(&d0, &Vec3::zeros(), false).unwrap();
        assert_eq!(z, ResidualVec::zeros());

        // Transverse moment on a mildly deformed state: the load paired with
        // any virtual displacement must equal the moment paired with the
        // induced tangent rotation — an exact algebraic identity at the
        // shared quadrature points.  The deformation stays in the x–y plane
        // and the moment along z, so the admissibility check t̂ ⟂ m̃ holds
        // exactly everywhere along the element.
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        let dofs = CenterlineDofs::new(
            d0.d1,
            (d0.t1 + Vec3::new(0.03, 0.05, 0.0)).normalize(),
            d0.d2 + Vec3::new(-0.01, 0.03, 0.0),
            (d0.t2 + Vec3::new(0.02, -0.04, 0.0)).normalize(),
        );
        let m = Vec3::new(0.0, 0.0, 0.7);
        let (load, _) = elem.distributed_moment_load(&dofs, &m, false).unwrap();
        let x = SVector::<f64, 12>::from_column_slice(&dofs.to_array());
        for _ in 0..10 {
            let dx = SVector::<f64, 12>::from_fn(|_, _| rng.random_range(-1.0..1.0));
            let lhs = load.dot(&dx);
            let mut rhs = 0.0;
            for (xi, w) in elem.quadrature().iter() {
                let b1 = elem.reference().assemble_h_unchecked(xi, 1);
                let t: Vec3 = b1 * x;
                let dt: Vec3 = b1 * dx;
                let dtheta = t.cross(&dt) / t.norm_squared();
                rhs += w * elem.reference().jacobian(xi) * m.dot(&dtheta);
            }
            assert!(
                (lhs - rhs).abs() < 1e-12 * lhs.abs().max(1e-12),
                "pairing identity: {lhs} vs {rhs}"
            );
        }

        // Quadrature convergence: the default rule agrees with a dense rule.
        let geo = RefGeometry::new(*elem.reference().dofs0(), Some(1.0)).unwrap();
        let dense = TFElement::with_rule(geo, props(), GAUSS_10);
        let (load10, _) = dense.distributed_moment_load(&dofs, &m, false).unwrap();
        assert!(
            (load - load10).norm() < 1e-4 * load10.norm(),
            "quadrature error {:.3e}",
            (load - load10).norm() / load10.norm()
        );
    }

    #[test]
    fn moment_load_stiffness_matches_finite_differences() {
        // Planar base state with the moment along z keeps every perturbed
        // evaluation admissible: a z-perturbation of size h tilts t̂·m̂ by
        // only ~2h, which must stay below the 1e-8 admissibility gate —
        // hence the unusually small step.  Roundoff then limits the match
        // to ~1e-7 per column, so the tolerance is 1e-5 rather than the
        // 1e-6 used by the h = 1e-6 stiffness checks elsewhere.
        let elem = straight_element(1.0);
        let d0 = *elem.reference().dofs0();
        let dofs = CenterlineDofs::new(
            d0.d1,
            (d0.t1 + Vec3::new(0.02, 0.05, 0.0)).normalize(),
            d0.d2 + Vec3::new(-0.01, 0.03, 0.0),
            (d0.t2 + Vec3::new(0.04, -0.01, 0.0)).normalize(),
        );
        let m = Vec3::new(0.0, 0.0, 0.5);
        let (_, k) = elem.distributed_moment_load(&dofs, &m, true).unwrap();
        let k = k.unwrap();
        let h = 1e-9;
        let mut fd = StiffnessMat::zeros();
        for c in 0..NDOF {
            let (lp, _) = elem
                .distributed_moment_load(&perturb(&dofs, c, h), &m, false)
                .unwrap();
            let (lm, _) = elem
                .distributed_moment_load(&perturb(&dofs, c, -h), &m, false)
                .unwrap();
            let col = (lp - lm) / (2.0 * h);
            for r in 0..NDOF {
                fd[(r, c)] = col[r];
            }
        }
        let err = (k - fd).norm() / fd.norm();
        assert!(err < 1e-5, "rel err {err:.3e}");
    }

    #[test]
    fn dead_force_load_reduces_to_total_force() {
        let elem = straight_element(1.5);
        let f = Vec3::new(0.2, -0.6, 0.9);
        let load = elem.distributed_force_load(&f);
        let total = Vec3::new(load[0] + load[6], load[1] + load[7], load[2] + load[8]);
        assert!((total - 1.5 * f).norm() < 1e-12);
    }
}
