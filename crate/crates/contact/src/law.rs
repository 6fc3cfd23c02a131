//! Penalty laws and the all-angle transition factor.
//!
//! The penalty force acts along the contact normal and depends only on the
//! gap g (surface-to-surface distance).  Two laws are provided:
//!
//! * a plain linear law f = ε⟨−g⟩, active only in penetration, whose
//!   potential is C1 at activation (the stiffness jumps), and
//! * a quadratically regularized law that switches on already at a small
//!   positive gap ḡ and blends smoothly into the same linear growth for
//!   g < 0.  Its potential is C2 everywhere, which keeps the assembled
//!   tangent continuous when Gauss points enter or leave contact — the
//!   property that makes line contact integrable with a fixed quadrature
//!   rule without convergence stalls.
//!
//! The transition factor k(z) ∈ [0, 1] blends the point-contact and
//! line-contact formulations by the contact angle α between the two
//! centerline tangents, measured through z = |cos α|.  Nearly parallel
//! curves (α ≤ α₁, z ≥ cos α₁) take k = 1: only the distributed line
//! formulation acts, because a point projection is ill-posed there.
//! Strongly crossing curves (α ≥ α₂) take k = 0 and load the single
//! point contribution.  Between the thresholds a half-cosine gives a C1
//! ramp.  Saturation returns literal 1.0 / 0.0 so blended contributions
//! reduce *bitwise* to the pure formulations outside the transition band.

/// Gap-to-force law of the penalty regularization.
///
/// `force` returns the (non-negative) contact pressure magnitude, `potential`
/// the stored energy with dΠ/dg = −force, and `force_slope` the derivative
/// df/dg needed by consistent tangents.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PenaltyLaw {
    /// f = ε⟨−g⟩: force proportional to penetration, zero otherwise.
    Linear {
        /// Penalty parameter ε (force per unit penetration).
        stiffness: f64,
    },
    /// C2-regularized law with transition gap ḡ > 0:
    ///
    /// ```text
    /// f(g) = 0                    for g ≥ ḡ
    ///      = ε (g − ḡ)² / (2ḡ)   for 0 ≤ g < ḡ
    ///      = ε (ḡ/2 − g)         for g < 0
    /// ```
    ///
    /// Force and slope are continuous at both junctions (f(0) = εḡ/2 with
    /// slope −ε on either side; f(ḡ) = 0 with slope 0), so the potential
    /// is C2 and the assembled tangent never jumps as a quadrature point
    /// crosses g = 0 or g = ḡ.
    QuadraticRegularized {
        /// Penalty parameter ε; the slope of the linear branch.
        stiffness: f64,
        /// Regularization gap ḡ at which the force starts to grow.
        gap_bar: f64,
    },
}

impl PenaltyLaw {
    /// Contact force magnitude for gap `g` (≥ 0; pushes the beams apart).
    pub fn force(&self, g: f64) -> f64 {
        match *self {
            PenaltyLaw::Linear { stiffness } => {
                if g < 0.0 {
                    -stiffness * g
                } else {
                    0.0
                }
            }
            PenaltyLaw::QuadraticRegularized { stiffness, gap_bar } => {
                if g >= gap_bar {
                    0.0
                } else if g >= 0.0 {
                    let d = g - gap_bar;
                    stiffness * d * d / (2.0 * gap_bar)
                } else {
                    stiffness * (0.5 * gap_bar - g)
                }
            }
        }
    }

    /// df/dg; needed wherever the gap sensitivity enters a tangent.
    pub fn force_slope(&self, g: f64) -> f64 {
        match *self {
            PenaltyLaw::Linear { stiffness } => {
                if g < 0.0 {
                    -stiffness
                } else {
                    0.0
                }
            }
            PenaltyLaw::QuadraticRegularized { stiffness, gap_bar } => {
                if g >= gap_bar {
                    0.0
                } else if g >= 0.0 {
                    stiffness * (g - gap_bar) / gap_bar
                } else {
                    -stiffness
                }
            }
        }
    }

    /// Stored penalty energy Π(g) with dΠ/dg = −force(g) and Π(ḡ) = 0.
    pub fn potential(&self, g: f64) -> f64 {
        match *self {
            PenaltyLaw::Linear { stiffness } => {
                if g < 0.0 {
                    0.5 * stiffness * g * g
                } else {
                    0.0
                }
            }
            PenaltyLaw::QuadraticRegularized { stiffness, gap_bar } => {
                if g >= gap_bar {
                    0.0
                } else if g >= 0.0 {
                    let d = gap_bar - g;
                    stiffness * d * d * d / (6.0 * gap_bar)
                } else {
                    stiffness * (gap_bar * gap_bar / 6.0 - 0.5 * gap_bar * g + 0.5 * g * g)
                }
            }
        }
    }

    /// Whether a Gauss point with gap `g` contributes at all.
    pub fn active(&self, g: f64) -> bool {
        match *self {
            PenaltyLaw::Linear { .. } => g < 0.0,
            PenaltyLaw::QuadraticRegularized { gap_bar, .. } => g < gap_bar,
        }
    }

    /// The penalty parameter ε.
    pub fn stiffness(&self) -> f64 {
        match *self {
            PenaltyLaw::Linear { stiffness } => stiffness,
            PenaltyLaw::QuadraticRegularized { stiffness, .. } => stiffness,
        }
    }

    /// Same law shape with a different penalty parameter — used to derive
    /// the perpendicular/parallel laws of the blended formulation from one
    /// template.
    pub fn with_stiffness(&self, stiffness: f64) -> PenaltyLaw {
        match *self {
            PenaltyLaw::Linear { .. } => PenaltyLaw::Linear { stiffness },
            PenaltyLaw::QuadraticRegularized { gap_bar, .. } => {
                PenaltyLaw::QuadraticRegularized { stiffness, gap_bar }
            }
        }
    }
}

/// How the blended point/line contribution builds its tangent.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ABCVariant {
    /// Scale the point force by (1 − k(z_c)) and the line force density by
    /// k(z(ξ)); the tangent linearizes the scaled forces (including the
    /// motion of k), which is consistent but not symmetric.
    ForceBased,
    /// Derive forces from the blended potential
    /// ½ε⊥(1 − k(z_c)²)⟨g⟩² + ½ε∥∫ k(z)²⟨g⟩² ds, including the variation
    /// of k itself; conservative, so closed displacement loops do no work.
    PotentialBased,
}

/// Configuration of the angle-blended contact formulation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ABCParams {
    /// Lower transition angle α₁ (radians): below it only the line
    /// formulation acts (k = 1).
    pub alpha1: f64,
    /// Upper transition angle α₂ (radians): above it only the point
    /// formulation acts (k = 0).
    pub alpha2: f64,
    /// Penalty parameter of the point (perpendicular) contribution.
    pub eps_perp: f64,
    /// Penalty parameter per unit length of the line (parallel) contribution.
    pub eps_par: f64,
    /// Force-based or potential-based blending.
    pub variant: ABCVariant,
    /// Number of equal-ξ integration segments per slave element.
    pub n_segments: usize,
    /// Gauss points per segment.
    pub n_gauss_per_segment: usize,
}

impl ABCParams {
    /// Validated constructor; the angles must satisfy 0 ≤ α₁ < α₂ ≤ π/2.
    pub fn new(
        alpha1: f64,
        alpha2: f64,
        eps_perp: f64,
        eps_par: f64,
        variant: ABCVariant,
        n_segments: usize,
        n_gauss_per_segment: usize,
    ) -> ABCParams {
        assert!(
            (0.0..std::f64::consts::FRAC_PI_2).contains(&alpha1)
                && alpha1 < alpha2
                && alpha2 <= std::f64::consts::FRAC_PI_2,
            "transition angles must satisfy 0 <= a1 < a2 <= pi/2, got {alpha1} and {alpha2}"
        );
        assert!(
            eps_perp >= 0.0 && eps_par >= 0.0,
            "penalty parameters must be non-negative"
        );
        assert!(n_segments >= 1, "need at least one integration segment");
        assert!(
            n_gauss_per_segment >= 2,
            "need at least two Gauss points per segment"
        );
        ABCParams {
            alpha1,
            alpha2,
            eps_perp,
            eps_par,
            variant,
            n_segments,
            n_gauss_per_segment,
        }
    }
}

/// Transition factor k and its first two derivatives with respect to
/// z = |cos α|, where α is the contact angle.
///
/// With z₁ = cos α₁ > z₂ = cos α₂:
///
/// ```text
/// k(z) = 1                                   for z ≥ z₁   (α ≤ α₁)
///      = ½ (1 − cos(π (z − z₂)/(z₁ − z₂)))  for z₂ < z < z₁
///      = 0                                   for z ≤ z₂   (α ≥ α₂)
/// ```
///
/// The half-cosine has zero slope at both ends, so k is C1; the returned
/// second derivative is the one of the active branch (it jumps at the
/// junctions, which only affects Hessian quality in a set of measure zero).
/// In the saturated regions the factors are the literals 1.0 and 0.0, so a
/// blended contribution multiplied by k and (1 − k) reproduces the pure
/// formulations bit for bit.
pub fn abc_transition_factor(params: &ABCParams, z: f64) -> (f64, f64, f64) {
    let z1 = params.alpha1.cos();
    let z2 = params.alpha2.cos();
    if z >= z1 {
        (1.0, 0.0, 0.0)
    } else if z <= z2 {
        (0.0, 0.0, 0.0)
    } else {
        let scale = std::f64::consts::PI / (z1 - z2);
        let u = scale * (z - z2);
        (
            0.5 * (1.0 - u.cos()),
            0.5 * scale * u.sin(),
            0.5 * scale * scale * u.cos(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reg_law() -> PenaltyLaw {
        PenaltyLaw::QuadraticRegularized {
            stiffness: 250.0,
            gap_bar: 0.02,
        }
    }

    fn params(variant: ABCVariant) -> ABCParams {
        ABCParams::new(
            40f64.to_radians(),
            45f64.to_radians(),
            2.4e5,
            2.0e4,
            variant,
            5,
            4,
        )
    }

    #[test]
    fn linear_law_matches_closed_forms() {
        let law = PenaltyLaw::Linear { stiffness: 100.0 };
        assert_eq!(law.force(0.5), 0.0);
        assert_eq!(law.force(0.0), 0.0);
        assert!((law.force(-0.01) - 1.0).abs() < 1e-14);
        assert_eq!(law.force_slope(-0.01), -100.0);
        assert!((law.potential(-0.01) - 0.5 * 100.0 * 1e-4).abs() < 1e-18);
        assert!(law.active(-1e-12) && !law.active(0.0));
    }

    #[test]
    fn regularized_law_is_continuous_with_continuous_slope() {
        let law = reg_law();
        let (eps, gb) = (250.0, 0.02);
        // Values at the junctions from both sides.
        for d in [1e-12, 1e-9] {
            assert!((law.force(d) - law.force(-d)).abs() < eps * 10.0 * d);
            assert!((law.force(gb - d) - law.force(gb + d)).abs() < eps * 10.0 * d);
            assert!((law.force_slope(d) - law.force_slope(-d)).abs() < eps * 10.0 * d / gb);
            assert!((law.force_slope(gb - d) - law.force_slope(gb + d)).abs() < eps * 10.0 * d / gb);
        }
        // Closed values on each branch.
        assert!((law.force(0.0) - eps * gb / 2.0).abs() < 1e-12);
        assert!((law.force(-0.01) - eps * (gb / 2.0 + 0.01)).abs() < 1e-12);
        assert_eq!(law.force(gb), 0.0);
        assert_eq!(law.force(2.0 * gb), 0.0);
        assert!(law.active(gb - 1e-12) && !law.active(gb));
    }

    #[test]
    fn potential_derivative_is_minus_force_on_every_branch() {
        for law in [reg_law(), PenaltyLaw::Linear { stiffness: 250.0 }] {
            let h = 1e-8;
            for g in [-0.015, -0.003, 0.004, 0.012, 0.019, 0.03] {
                let fd = (law.potential(g + h) - law.potential(g - h)) / (2.0 * h);
                let f = law.force(g);
                assert!(
                    (fd + f).abs() < 1e-5 * (1.0 + f.abs()),
                    "dPi/dg = {fd}, -f = {}",
                    -f
                );
                let fd_slope = (law.force(g + h) - law.force(g - h)) / (2.0 * h);
                assert!(
                    (fd_slope - law.force_slope(g)).abs() < 1e-4 * (1.0 + law.force_slope(g).abs()),
                    "df/dg mismatch at g={g}"
                );
            }
        }
    }

    #[test]
    fn with_stiffness_keeps_the_shape() {
        let law = reg_law().with_stiffness(500.0);
        assert_eq!(law.stiffness(), 500.0);
        match law {
            PenaltyLaw::QuadraticRegularized { gap_bar, .. } => assert_eq!(gap_bar, 0.02),
            other => panic!("shape changed: {other:?}"),
        }
        // Doubling stiffness doubles the force everywhere.
        assert!((law.force(-0.01) - 2.0 * reg_law().force(-0.01)).abs() < 1e-12);
    }

    #[test]
    fn transition_factor_saturates_to_exact_literals() {
        let p = params(ABCVariant::ForceBased);
        let z1 = p.alpha1.cos();
        let z2 = p.alpha2.cos();
        for z in [z1, z1 + 1e-9, 0.5 * (z1 + 1.0), 1.0] {
            let (k, kp, kpp) = abc_transition_factor(&p, z);
            assert_eq!(k, 1.0);
            assert_eq!(kp, 0.0);
            assert_eq!(kpp, 0.0);
        }
        for z in [z2, z2 - 1e-9, 0.5 * z2, 0.0] {
            let (k, kp, kpp) = abc_transition_factor(&p, z);
            assert_eq!(k, 0.0);
            assert_eq!(kp, 0.0);
            assert_eq!(kpp, 0.0);
        }
        // Inside the band the ramp is strictly monotone in z.
        let mut last = 0.0;
        for i in 1..40 {
            let z = z2 + (z1 - z2) * i as f64 / 40.0;
            let (k, _, _) = abc_transition_factor(&p, z);
            assert!(k > last && k < 1.0);
            last = k;
        }
    }

    #[test]
    fn transition_factor_is_c1_with_matching_derivatives() {
        let p = params(ABCVariant::PotentialBased);
        let z1 = p.alpha1.cos();
        let z2 = p.alpha2.cos();
        let h = 1e-6;
        // FD of k matches k' everywhere, including across the junctions
        // (slope exactly zero there keeps the one-sided errors O(h)).
        for i in 0..=60 {
            let z = z2 - 0.01 + (z1 - z2 + 0.02) * i as f64 / 60.0;
            let (_, kp, kpp) = abc_transition_factor(&p, z);
            let (km, _, _) = abc_transition_factor(&p, z - h);
            let (kpl, _, _) = abc_transition_factor(&p, z + h);
            let fd = (kpl - km) / (2.0 * h);
            assert!(
                (fd - kp).abs() < 1e-4,
                "z={z}: fd {fd} vs k' {kp} (junction C1 check)"
            );
            // Second derivative only matches strictly inside the ramp.
            if z > z2 + 2.0 * h && z < z1 - 2.0 * h {
                let (_, kpm, _) = abc_transition_factor(&p, z - h);
                let (_, kppl, _) = abc_transition_factor(&p, z + h);
                let fd2 = (kppl - kpm) / (2.0 * h);
                assert!((fd2 - kpp).abs() < 1e-3 * (1.0 + kpp.abs()), "z={z}");
            }
        }
    }

    #[test]
    #[should_panic(expected = "transition angles")]
    fn degenerate_angle_band_is_rejected() {
        ABCParams::new(
            0.9,
            0.8,
            1.0,
            1.0,
            ABCVariant::ForceBased,
            1,
            2,
        );
    }
}
