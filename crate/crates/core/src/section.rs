//! Cross-section and material data for beam elements.
//!
//! Constitutive matrices are diagonal in the material frame with the
//! convention that axis 1 is the beam tangent:
//!
//! * forces:  C_F = diag(EA, G·Ā₂, G·Ā₃) acting on axial/shear strains,
//! * moments: C_M = diag(G·I_T, E·I₂, E·I₃) acting on twist/bending
//!   curvatures,
//! * inertia: C_ρ = diag(ρ·I_P, ρ·I₂, ρ·I₃) with polar moment
//!   I_P = I₂ + I₃.
//!
//! Shear areas are Ā = κ_s·A with shear correction factor κ_s.

use crate::Mat3;
use nalgebra::Vector3;

/// Isotropic material.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Material {
    pub youngs: f64,
    pub shear: f64,
    pub density: f64,
}

impl Material {
    pub fn new(youngs: f64, shear: f64, density: f64) -> Self {
        Self {
            youngs,
            shear,
            density,
        }
    }

    /// Shear modulus from Poisson ratio: G = E / (2(1+ν)).
    pub fn from_poisson(youngs: f64, poisson: f64, density: f64) -> Self {
        Self {
            youngs,
            shear: youngs / (2.0 * (1.0 + poisson)),
            density,
        }
    }
}

/// Cross-section geometry.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrossSection {
    pub area: f64,
    /// Second moment about material axis 2.
    pub i2: f64,
    /// Second moment about material axis 3.
    pub i3: f64,
    /// Torsion constant.
    pub i_t: f64,
    /// Shear correction factor applied to both shear directions.
    pub shear_correction: f64,
    /// Outer radius used for contact; half the side length for squares.
    pub radius: f64,
}

impl CrossSection {
    /// Solid circle of radius `r`: A = πr², I = πr⁴/4, I_T = πr⁴/2.
    pub fn circle(r: f64) -> Self {
        let i = std::f64::consts::PI * r.powi(4) / 4.0;
        Self {
            area: std::f64::consts::PI * r * r,
            i2: i,
            i3: i,
            i_t: 2.0 * i,
            shear_correction: 1.0,
            radius: r,
        }
    }

    /// Solid square of side `a`: I = a⁴/12 and the standard torsion-constant
    /// approximation I_T = 0.1406·a⁴ (exact Saint-Venant value to 4 digits).
    pub fn square(a: f64) -> Self {
        Self {
            area: a * a,
            i2: a.powi(4) / 12.0,
            i3: a.powi(4) / 12.0,
            i_t: 0.1406 * a.powi(4),
            shear_correction: 1.0,
            radius: 0.5 * a,
        }
    }

    pub fn with_shear_correction(mut self, kappa: f64) -> Self {
        self.shear_correction = kappa;
        self
    }

    /// Polar moment I_P = I₂ + I₃.
    pub fn polar(&self) -> f64 {
        self.i2 + self.i3
    }
}

/// Section + material bundle with the derived constitutive diagonals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SectionProperties {
    pub section: CrossSection,
    pub material: Material,
}

impl SectionProperties {
    pub fn new(section: CrossSection, material: Material) -> Self {
        Self { section, material }
    }

    /// Material force stiffness diagonal (EA, GĀ₂, GĀ₃).
    pub fn force_diag(&self) -> Vector3<f64> {
        let shear_area =
            self.material.shear * self.section.shear_correction * self.section.area;
        Vector3::new(
            self.material.youngs * self.section.area,
            shear_area,
            shear_area,
        )
    }

    /// Material moment stiffness diagonal (GI_T, EI₂, EI₃).
    pub fn moment_diag(&self) -> Vector3<f64> {
        Vector3::new(
            self.material.shear * self.section.i_t,
            self.material.youngs * self.section.i2,
            self.material.youngs * self.section.i3,
        )
    }

    /// Material rotary inertia diagonal (ρI_P, ρI₂, ρI₃).
    pub fn inertia_diag(&self) -> Vector3<f64> {
        Vector3::new(
            self.material.density * self.section.polar(),
            self.material.density * self.section.i2,
            self.material.density * self.section.i3,
        )
    }

    /// Mass per unit length ρA.
    pub fn mass_per_length(&self) -> f64 {
        self.material.density * self.section.area
    }

    pub fn force_matrix(&self) -> Mat3 {
        Mat3::from_diagonal(&self.force_diag())
    }

    pub fn moment_matrix(&self) -> Mat3 {
        Mat3::from_diagonal(&self.moment_diag())
    }

    pub fn inertia_matrix(&self) -> Mat3 {
        Mat3::from_diagonal(&self.inertia_diag())
    }
}
