//! Built-in scenario generators.
//!
//! Each generator is a pure function from a handful of parameters to a
//! complete [`ScenarioConfig`]: no files, no randomness, so two calls
//! with the same arguments produce identical configs (and therefore
//! bitwise-identical runs).  The scenarios:
//!
//! * **Arc benchmark** — a 45° circular cantilever arc loaded
//!   out-of-plane at the tip, the standard mesh-refinement study for
//!   geometrically exact bending with torsion.  Two slenderness
//!   variants probe locking: the load scales with the section so both
//!   deform to the same normalized shape.
//! * **Rope twisting** — seven initially straight fibers in hexagonal
//!   packing, one end wound four full turns while the other carries a
//!   constant axial tension; line contact makes the bundle wrap into a
//!   rope.  The reaction torque at the driven end is the quantity of
//!   interest.
//! * **Helical spring** — a helix with linearly growing pitch,
//!   clamped at the bottom.  The desk variant compresses it dynamically
//!   until the coils graze and then releases; with no numerical damping
//!   the total energy must stay put, which makes it a sharp integrator
//!   test.  The paper-scale variant pushes the tip through a full
//!   compression-release-extension cycle quasi-statically.
//! * **Crossing fibers** — two straight fibers crossing at a chosen
//!   angle and vertical offset under the angle-blended contact
//!   formulation; the crossing angle selects point, line, or blended
//!   contact.

use std::f64::consts::PI;

use crate::config::{
    ComponentConfig, ContactConfig, DynamicsConfig, ElementConfig, FiberConfig, LawConfig,
    LoadConfig, OutputConfig, PathConfig, ScenarioConfig, ScheduleConfig, SectionConfig,
    ShapeConfig, SolverSettings, SupportConfig, SCHEMA_VERSION,
};

// ---------------------------------------------------------------------
// Arc benchmark
// ---------------------------------------------------------------------

/// Slenderness variant of the arc benchmark.  Both see the same
/// normalized tip load `f·L²/EI ≈ 4.4`, so the converged shapes match;
/// what changes is how much shear flexibility the section has and how
/// hard full integration locks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArcVariant {
    /// Section side 1 at radius 100 — moderately slender.
    Thick,
    /// Section side 0.01 — slender by a factor 10⁴, the locking regime.
    Slender,
}

impl ArcVariant {
    pub fn side(self) -> f64 {
        match self {
            ArcVariant::Thick => 1.0,
            ArcVariant::Slender => 0.01,
        }
    }

    /// Out-of-plane tip force producing the same normalized load for
    /// both sections (force scales with a⁴ through EI).
    pub fn tip_force(self) -> f64 {
        match self {
            ArcVariant::Thick => 600.0,
            ArcVariant::Slender => 6e-6,
        }
    }
}

/// Radius of the arc's centerline circle.
pub const ARC_RADIUS: f64 = 100.0;

/// 45° cantilever arc in the x–y plane, clamped at one end, loaded in
/// +z at the tip, meshed with `n_elements` six-field elements.
pub fn generate_arc_benchmark(n_elements: usize, variant: ArcVariant, reduced: bool) -> ScenarioConfig {
    assert!(n_elements >= 1);
    let span = PI / 4.0;
    let stations = (0..=n_elements)
        .map(|k| {
            let theta = span * k as f64 / n_elements as f64;
            [
                ARC_RADIUS * theta.sin(),
                ARC_RADIUS * (1.0 - theta.cos()),
                0.0,
                theta.cos(),
                theta.sin(),
                0.0,
            ]
        })
        .collect();
    let f = variant.tip_force();
    let clamp = [
        ComponentConfig::X,
        ComponentConfig::Y,
        ComponentConfig::Z,
        ComponentConfig::Tx,
        ComponentConfig::Ty,
        ComponentConfig::Tz,
        ComponentConfig::Rx,
        ComponentConfig::Ry,
        ComponentConfig::Rz,
    ];
    ScenarioConfig {
        schema_version: SCHEMA_VERSION,
        name: format!(
            "arc-{}-{}el-{}",
            match variant {
                ArcVariant::Thick => "thick",
                ArcVariant::Slender => "slender",
            },
            n_elements,
            if reduced { "reduced" } else { "full" }
        ),
        element: ElementConfig::SimoReissner { reduced },
        section: SectionConfig {
            youngs: 1e7,
            shear: 0.5e7,
            density: 1.0,
            shear_correction: None,
            shape: ShapeConfig::Square {
                side: variant.side(),
            },
        },
        solver: SolverSettings {
            // Residual tolerance relative to the applied force: the two
            // variants differ by eight orders of magnitude in force
            // scale, so an absolute tolerance cannot serve both.
            tol_res: 1e-7 * f,
            tol_disp: 1e-9,
            max_iter: 30,
            du_max: None,
            n_steps: 10,
            s_end: 1.0,
        },
        dynamics: None,
        output: OutputConfig {
            record_every: 1,
            geometry_every: 0,
            torque_about: None,
        },
        contact: None,
        fibers: vec![FiberConfig {
            radius: 0.5 * variant.side(),
            stations,
        }],
        supports: clamp
            .iter()
            .map(|&component| SupportConfig {
                fiber: 0,
                station: 0,
                component,
                path: PathConfig::Hold,
            })
            .collect(),
        loads: vec![LoadConfig::NodalForce {
            fiber: 0,
            station: n_elements,
            force: [0.0, 0.0, f],
            factor: ScheduleConfig::Linear {
                knots: vec![(0.0, 0.0), (1.0, 1.0)],
            },
        }],
    }
}

// ---------------------------------------------------------------------
// Rope twisting
// ---------------------------------------------------------------------

/// Fiber length of the rope bundle.
pub const ROPE_LENGTH: f64 = 5.0;
/// Fiber radius.
pub const ROPE_RADIUS: f64 = 0.01;
/// Hexagonal packing distance between neighboring fiber centers; the
/// 0.2R slack leaves room for the bundle to tighten before contact.
pub const ROPE_SPACING: f64 = 2.2 * ROPE_RADIUS;
/// Full turns wound onto the driven end.
pub const ROPE_TURNS: f64 = 4.0;
/// Axial tension applied to each fiber's free back end.
pub const ROPE_TENSION: f64 = 1000.0;

/// Seven-fiber bundle (one center, six around it) along z, twisted at
/// the front end (station `n`) while the back ends ride on a constant
/// axial tension.  Works with either element formulation: the
/// comparison of the two reaction-torque curves is the point of the
/// scenario.
pub fn generate_rope_twisting(element: ElementConfig) -> ScenarioConfig {
    let n_elements = 10usize;
    let six_field = matches!(element, ElementConfig::SimoReissner { .. });
    let mut fibers = Vec::new();
    let mut supports = Vec::new();
    let mut loads = Vec::new();
    // Center fiber first, then the ring; phase is the polar angle of
    // the fiber's initial position around the bundle axis.
    let mut placements = vec![(0.0f64, 0.0f64)];
    for k in 0..6 {
        placements.push((ROPE_SPACING, PI / 3.0 * k as f64));
    }
    for (i, &(r, phase)) in placements.iter().enumerate() {
        let (x, y) = (r * phase.cos(), r * phase.sin());
        let stations = (0..=n_elements)
            .map(|k| {
                let z = ROPE_LENGTH * k as f64 / n_elements as f64;
                [x, y, z, 0.0, 0.0, 1.0]
            })
            .collect();
        fibers.push(FiberConfig {
            radius: ROPE_RADIUS,
            stations,
        });
        // Front (station n): ride a circle about the bundle axis, one
        // cosine per coordinate, while staying axially fixed.
        let omega = 2.0 * PI * ROPE_TURNS;
        supports.push(SupportConfig {
            fiber: i,
            station: n_elements,
            component: ComponentConfig::X,
            path: PathConfig::Cosine {
                offset: 0.0,
                amp: r,
                omega,
                phase,
            },
        });
        supports.push(SupportConfig {
            fiber: i,
            station: n_elements,
            component: ComponentConfig::Y,
            path: PathConfig::Cosine {
                offset: 0.0,
                amp: r,
                omega,
                phase: phase - 0.5 * PI,
            },
        });
        supports.push(SupportConfig {
            fiber: i,
            station: n_elements,
            component: ComponentConfig::Z,
            path: PathConfig::Hold,
        });
        // Back (station 0): pinned transversally, free axially so the
        // fiber can feed in; the tension keeps it taut.
        supports.push(SupportConfig {
            fiber: i,
            station: 0,
            component: ComponentConfig::X,
            path: PathConfig::Hold,
        });
        supports.push(SupportConfig {
            fiber: i,
            station: 0,
            component: ComponentConfig::Y,
            path: PathConfig::Hold,
        });
        if six_field {
            // A circular section with free triads has a zero-energy
            // spin mode per fiber; one axial-rotation anchor removes it.
            supports.push(SupportConfig {
                fiber: i,
                station: 0,
                component: ComponentConfig::Rz,
                path: PathConfig::Hold,
            });
        }
        loads.push(LoadConfig::NodalForce {
            fiber: i,
            station: 0,
            force: [0.0, 0.0, -ROPE_TENSION],
            factor: ScheduleConfig::Constant { value: 1.0 },
        });
    }
    ScenarioConfig {
        schema_version: SCHEMA_VERSION,
        name: format!(
            "rope-{}",
            if six_field { "six-field" } else { "torsion-free" }
        ),
        element,
        section: SectionConfig {
            youngs: 1e9,
            shear: 0.5e9,
            density: 1e-3,
            shear_correction: None,
            shape: ShapeConfig::Circle {
                radius: ROPE_RADIUS,
            },
        },
        solver: SolverSettings {
            tol_res: 1e-5,
            tol_disp: 1e-9,
            max_iter: 50,
            du_max: Some(0.5 * ROPE_RADIUS),
            n_steps: 80,
            s_end: 1.0,
        },
        dynamics: None,
        output: OutputConfig {
            record_every: 4,
            geometry_every: 0,
            torque_about: Some([0.0, 0.0]),
        },
        contact: Some(ContactConfig::Line {
            search_margin: ROPE_RADIUS,
            segments: 5,
            gauss_per_segment: 3,
            law: LawConfig::QuadraticRegularized {
                stiffness: 1e7,
                gap_bar: 0.1 * ROPE_RADIUS,
            },
        }),
        fibers,
        supports,
        loads,
    }
}

// ---------------------------------------------------------------------
// Helical spring
// ---------------------------------------------------------------------

/// Pitch-growth coefficient of the helix `R₀·(sin β, cos β − 1, cβ²)`.
pub const HELIX_C: f64 = 6.0 / (81.0 * PI * PI);
/// Total centerline arc length of the helix, both variants.
pub const HELIX_ARC_LENGTH: f64 = 1000.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HelixVariant {
    /// Two coils, 16 elements, compressed by a ramped tip load and
    /// released; no numerical dissipation.  Small enough that the whole
    /// run takes seconds.
    DeskRelease,
    /// Four and a half coils, 40 elements, the tip driven through a
    /// compression–release–extension displacement cycle quasi-statically.
    PaperCompression,
}

/// Antiderivative of √(1 + (2cβ)²): arc length of the helix per unit
/// R₀.  Closed form via asinh, used to size R₀ so the centerline length
/// is exactly [`HELIX_ARC_LENGTH`].
fn helix_arc_per_radius(beta: f64) -> f64 {
    let a = 2.0 * HELIX_C;
    0.5 * beta * (1.0 + (a * beta).powi(2)).sqrt() + (a * beta).asinh() / (2.0 * a)
}

/// Helix circle radius for a variant's coil count.
pub fn helix_radius(variant: HelixVariant) -> f64 {
    HELIX_ARC_LENGTH / helix_arc_per_radius(helix_beta_end(variant))
}

/// Parameter span of the helix: β runs from 0 to this.
pub fn helix_beta_end(variant: HelixVariant) -> f64 {
    match variant {
        HelixVariant::DeskRelease => 4.0 * PI,
        HelixVariant::PaperCompression => 9.0 * PI,
    }
}

/// Tip force magnitude for the desk release variant, sized to compress
/// the spring by roughly the smallest coil clearance so the coils graze
/// during the overshoot.
pub const HELIX_DESK_FORCE: f64 = 5e-4;

pub fn generate_helical_spring(variant: HelixVariant) -> ScenarioConfig {
    let (n_elements, fiber_radius) = match variant {
        HelixVariant::DeskRelease => (16usize, 4.0),
        HelixVariant::PaperCompression => (40usize, 4.0),
    };
    let beta_end = helix_beta_end(variant);
    let r0 = helix_radius(variant);
    let stations = (0..=n_elements)
        .map(|k| {
            let beta = beta_end * k as f64 / n_elements as f64;
            let dir = [beta.cos(), -beta.sin(), 2.0 * HELIX_C * beta];
            let norm = (dir[0] * dir[0] + dir[1] * dir[1] + dir[2] * dir[2]).sqrt();
            [
                r0 * beta.sin(),
                r0 * (beta.cos() - 1.0),
                r0 * HELIX_C * beta * beta,
                dir[0] / norm,
                dir[1] / norm,
                dir[2] / norm,
            ]
        })
        .collect::<Vec<_>>();
    let z_top = stations[n_elements][2];
    let clamp = [
        ComponentConfig::X,
        ComponentConfig::Y,
        ComponentConfig::Z,
        ComponentConfig::Tx,
        ComponentConfig::Ty,
        ComponentConfig::Tz,
        ComponentConfig::Rx,
        ComponentConfig::Ry,
        ComponentConfig::Rz,
    ];
    let mut supports: Vec<SupportConfig> = clamp
        .iter()
        .map(|&component| SupportConfig {
            fiber: 0,
            station: 0,
            component,
            path: PathConfig::Hold,
        })
        .collect();
    let mut loads = Vec::new();
    let (solver, dynamics, contact, output);
    match variant {
        HelixVariant::DeskRelease => {
            // Tip force plus the moment that shifts its line of action
            // onto the helix axis: together they compress the spring
            // axially instead of tipping it over.  Ramp up over 4 s,
            // release over 1 s, then ring freely.
            let ramp = ScheduleConfig::Linear {
                knots: vec![(0.0, 0.0), (4.0, 1.0), (5.0, 0.0)],
            };
            loads.push(LoadConfig::NodalForce {
                fiber: 0,
                station: n_elements,
                force: [0.0, 0.0, -HELIX_DESK_FORCE],
                factor: ramp.clone(),
            });
            loads.push(LoadConfig::NodalMoment {
                fiber: 0,
                station: n_elements,
                moment: [-r0 * HELIX_DESK_FORCE, 0.0, 0.0],
                factor: ramp,
            });
            solver = SolverSettings {
                tol_res: 1e-9,
                tol_disp: 1e-9,
                max_iter: 30,
                du_max: None,
                n_steps: 1,
                s_end: 1.0,
            };
            dynamics = Some(DynamicsConfig {
                rho_inf: 1.0,
                dt: 1e-3,
                t_end: 10.0,
            });
            contact = Some(ContactConfig::Line {
                search_margin: fiber_radius,
                segments: 20,
                gauss_per_segment: 5,
                law: LawConfig::QuadraticRegularized {
                    stiffness: 1e-2,
                    gap_bar: 0.25 * fiber_radius,
                },
            });
            output = OutputConfig {
                record_every: 1,
                geometry_every: 0,
                torque_about: None,
            };
        }
        HelixVariant::PaperCompression => {
            // Displacement-controlled tip riding an axial
            // compress–return–extend cycle; transversally pinned.
            supports.push(SupportConfig {
                fiber: 0,
                station: n_elements,
                component: ComponentConfig::X,
                path: PathConfig::Hold,
            });
            supports.push(SupportConfig {
                fiber: 0,
                station: n_elements,
                component: ComponentConfig::Y,
                path: PathConfig::Hold,
            });
            supports.push(SupportConfig {
                fiber: 0,
                station: n_elements,
                component: ComponentConfig::Z,
                path: PathConfig::Linear {
                    knots: vec![
                        (0.0, z_top),
                        (1.0, z_top + 250.0),
                        (2.0, z_top),
                        (3.0, z_top - 200.0),
                    ],
                },
            });
            solver = SolverSettings {
                tol_res: 1e-8,
                tol_disp: 1e-9,
                max_iter: 30,
                du_max: Some(0.1),
                n_steps: 300,
                s_end: 3.0,
            };
            dynamics = None;
            contact = Some(ContactConfig::Line {
                search_margin: fiber_radius,
                segments: 20,
                gauss_per_segment: 5,
                law: LawConfig::QuadraticRegularized {
                    stiffness: 1e-3,
                    gap_bar: 0.05 * fiber_radius,
                },
            });
            output = OutputConfig {
                record_every: 1,
                geometry_every: 0,
                torque_about: None,
            };
        }
    }
    ScenarioConfig {
        schema_version: SCHEMA_VERSION,
        name: match variant {
            HelixVariant::DeskRelease => "helix-release".into(),
            HelixVariant::PaperCompression => "helix-compression".into(),
        },
        element: ElementConfig::SimoReissner { reduced: true },
        section: SectionConfig {
            youngs: 1.0,
            shear: 0.5,
            density: 1e-8,
            shear_correction: Some(1.0),
            shape: ShapeConfig::Circle {
                radius: fiber_radius,
            },
        },
        solver,
        dynamics,
        output,
        contact,
        fibers: vec![FiberConfig {
            radius: fiber_radius,
            stations,
        }],
        supports,
        loads,
    }
}

// ---------------------------------------------------------------------
// Crossing fibers
// ---------------------------------------------------------------------

/// Fiber half-length of the crossing scenario.
pub const CROSSING_HALF_LENGTH: f64 = 250.0;
/// Fiber radius.
pub const CROSSING_RADIUS: f64 = 1.0;

/// Two straight fibers crossing at `angle_deg` (between centerlines, in
/// the x–y projection), vertically separated by `offset` between their
/// center planes at the end of the approach ramp.  The upper fiber's
/// endpoints ride down from a clearly separated start, so contact
/// engages smoothly during the run.  Angle-blended contact: 90° lands
/// in the point regime, angles below 40° in the line regime.
pub fn generate_crossing_fibers(angle_deg: f64, offset: f64, force_based: bool) -> ScenarioConfig {
    let n_elements = 20usize;
    let alpha = angle_deg.to_radians();
    let start_height = 2.0 * CROSSING_RADIUS + 0.5;
    let mk_stations = |dir: [f64; 2], z: f64| {
        (0..=n_elements)
            .map(|k| {
                let s = -CROSSING_HALF_LENGTH
                    + 2.0 * CROSSING_HALF_LENGTH * k as f64 / n_elements as f64;
                [s * dir[0], s * dir[1], z, dir[0], dir[1], 0.0]
            })
            .collect::<Vec<_>>()
    };
    let fibers = vec![
        FiberConfig {
            radius: CROSSING_RADIUS,
            stations: mk_stations([1.0, 0.0], start_height),
        },
        FiberConfig {
            radius: CROSSING_RADIUS,
            stations: mk_stations([alpha.cos(), alpha.sin()], 0.0),
        },
    ];
    let mut supports = Vec::new();
    for station in [0, n_elements] {
        // Upper fiber endpoints ride down to the target offset.
        for (component, hold) in [
            (ComponentConfig::X, true),
            (ComponentConfig::Y, true),
            (ComponentConfig::Z, false),
        ] {
            supports.push(SupportConfig {
                fiber: 0,
                station,
                component,
                path: if hold {
                    PathConfig::Hold
                } else {
                    PathConfig::Linear {
                        knots: vec![(0.0, start_height), (1.0, offset)],
                    }
                },
            });
        }
        // Lower fiber endpoints stay pinned.
        for component in [ComponentConfig::X, ComponentConfig::Y, ComponentConfig::Z] {
            supports.push(SupportConfig {
                fiber: 1,
                station,
                component,
                path: PathConfig::Hold,
            });
        }
    }
    ScenarioConfig {
        schema_version: SCHEMA_VERSION,
        name: format!("crossing-{angle_deg:.0}deg"),
        element: ElementConfig::TorsionFree,
        section: SectionConfig {
            youngs: 1e7,
            shear: 0.5e7,
            density: 1e-6,
            shear_correction: None,
            shape: ShapeConfig::Circle {
                radius: CROSSING_RADIUS,
            },
        },
        solver: SolverSettings {
            tol_res: 1e-6,
            tol_disp: 1e-9,
            max_iter: 50,
            du_max: Some(0.5 * CROSSING_RADIUS),
            n_steps: 10,
            s_end: 1.0,
        },
        dynamics: None,
        output: OutputConfig {
            record_every: 1,
            geometry_every: 0,
            torque_about: None,
        },
        contact: Some(ContactConfig::AllAngle {
            search_margin: CROSSING_RADIUS,
            alpha1_deg: 40.0,
            alpha2_deg: 45.0,
            eps_perp: 2.4e5,
            eps_par: 2.0e4,
            force_based,
            segments: 1,
            gauss_per_segment: 3,
            gap_bar: Some(0.1 * CROSSING_RADIUS),
        }),
        fibers,
        supports,
        loads: vec![],
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::translate::build;
    use fibril_contact::{abc_transition_factor, contact_angle, ABCParams, ABCVariant};
    use fibril_core::Vec3;

    #[test]
    fn every_generator_output_validates_and_round_trips() {
        let configs = vec![
            generate_arc_benchmark(4, ArcVariant::Thick, true),
            generate_arc_benchmark(4, ArcVariant::Slender, false),
            generate_rope_twisting(ElementConfig::TorsionFree),
            generate_rope_twisting(ElementConfig::SimoReissner { reduced: true }),
            generate_helical_spring(HelixVariant::DeskRelease),
            generate_helical_spring(HelixVariant::PaperCompression),
            generate_crossing_fibers(90.0, 1.5, false),
            generate_crossing_fibers(10.0, 1.5, true),
        ];
        for config in configs {
            config
                .validate()
                .unwrap_or_else(|e| panic!("{} must validate: {e}", config.name));
            let text = config.to_toml().expect("serialize");
            let back = ScenarioConfig::from_toml(&text).expect("parse");
            assert_eq!(config, back, "{} must round-trip", config.name);
            build(&config).unwrap_or_else(|e| panic!("{} must build: {e}", config.name));
        }
    }

    #[test]
    fn arc_stations_sit_on_the_circle_with_unit_tangents() {
        let config = generate_arc_benchmark(16, ArcVariant::Thick, true);
        for row in &config.fibers[0].stations {
            let p = Vec3::new(row[0], row[1], row[2]);
            let t = Vec3::new(row[3], row[4], row[5]);
            let center = Vec3::new(0.0, ARC_RADIUS, 0.0);
            assert!(
                ((p - center).norm() - ARC_RADIUS).abs() < 1e-12,
                "station must sit on the arc circle, off by {:.3e}",
                ((p - center).norm() - ARC_RADIUS).abs()
            );
            assert!((t.norm() - 1.0).abs() < 1e-12, "tangent must be unit");
            // The tangent of a circle is perpendicular to the radius.
            assert!(
                (p - center).dot(&t).abs() < 1e-10,
                "tangent must be tangent to the circle"
            );
        }
        // End-to-end the arc spans 45°.
        let first = &config.fibers[0].stations[0];
        let last = &config.fibers[0].stations[16];
        let t0 = Vec3::new(first[3], first[4], first[5]);
        let t1 = Vec3::new(last[3], last[4], last[5]);
        assert!(
            (t0.dot(&t1) - (PI / 4.0).cos()).abs() < 1e-12,
            "end tangents must enclose 45°"
        );
    }

    #[test]
    fn arc_initial_state_is_stress_free() {
        let config = generate_arc_benchmark(8, ArcVariant::Thick, true);
        let (model, _) = build(&config).expect("build");
        let state = model.initial_state();
        let energy = model.internal_energy(&state).expect("energy");
        assert!(
            energy.abs() < 1e-18,
            "the reference configuration itself must carry no strain energy, got {energy:.3e}"
        );
    }

    /// Independent check of the closed-form helix sizing: composite
    /// Simpson quadrature of the arc-length integrand over the β span
    /// must reproduce the advertised total length.
    fn simpson_arc_length(r0: f64, beta_end: f64) -> f64 {
        let n = 20_000usize; // panels (even)
        let h = beta_end / n as f64;
        let integrand = |beta: f64| {
            let a = 2.0 * HELIX_C * beta;
            r0 * (1.0 + a * a).sqrt()
        };
        let mut sum = integrand(0.0) + integrand(beta_end);
        for k in 1..n {
            let w = if k % 2 == 1 { 4.0 } else { 2.0 };
            sum += w * integrand(h * k as f64);
        }
        sum * h / 3.0
    }

    #[test]
    fn helix_radius_makes_the_arc_length_exactly_one_thousand() {
        for variant in [HelixVariant::DeskRelease, HelixVariant::PaperCompression] {
            let r0 = helix_radius(variant);
            let oracle = simpson_arc_length(r0, helix_beta_end(variant));
            assert!(
                (oracle - HELIX_ARC_LENGTH).abs() < 1e-6 * HELIX_ARC_LENGTH,
                "quadrature oracle disagrees with the closed-form sizing: {oracle:.9}"
            );
        }
        // Pinned values: the coil radius that gives 4.5 turns a 1000
        // length, and the corresponding two-turn radius.
        let paper = helix_radius(HelixVariant::PaperCompression);
        assert!(
            (paper - 34.37).abs() < 0.05,
            "4.5-coil radius should be near 34.37, got {paper:.4}"
        );
        let desk = helix_radius(HelixVariant::DeskRelease);
        assert!(
            (desk - 79.11).abs() < 0.05,
            "two-coil radius should be near 79.11, got {desk:.4}"
        );
    }

    #[test]
    fn helix_starts_at_the_origin_along_x() {
        let config = generate_helical_spring(HelixVariant::DeskRelease);
        let first = &config.fibers[0].stations[0];
        assert_eq!(&first[0..3], &[0.0, 0.0, 0.0], "helix starts at the origin");
        assert!(
            (first[3] - 1.0).abs() < 1e-15 && first[4].abs() < 1e-15 && first[5].abs() < 1e-15,
            "the β = 0 tangent points along +x"
        );
        // The top end sits directly above the clamp: the x-y projection
        // of the helix is a circle through the origin.
        let last = config.fibers[0].stations.last().unwrap();
        assert!(
            last[0].abs() < 1e-9 && last[1].abs() < 1e-9,
            "after whole turns the tip must return over the clamp, got ({:.3e}, {:.3e})",
            last[0],
            last[1]
        );
        assert!(
            last[2] > 90.0 && last[2] < 100.0,
            "two-coil desk helix should stand about 94 units tall, got {:.2}",
            last[2]
        );
    }

    #[test]
    fn rope_bundle_has_hexagonal_spacing_and_closed_twist_paths() {
        let config = generate_rope_twisting(ElementConfig::TorsionFree);
        assert_eq!(config.fibers.len(), 7);
        // Ring fibers sit at the spacing distance from the center and
        // from their ring neighbors (the hexagon property).
        let pos = |i: usize| {
            let row = &config.fibers[i].stations[0];
            Vec3::new(row[0], row[1], row[2])
        };
        for i in 1..=6 {
            assert!(
                (pos(i).norm() - ROPE_SPACING).abs() < 1e-12,
                "ring fiber {i} must sit at the packing distance"
            );
            let next = 1 + i % 6;
            assert!(
                ((pos(i) - pos(next)).norm() - ROPE_SPACING).abs() < 1e-12,
                "ring neighbors {i},{next} must sit at the packing distance"
            );
        }
        // The driven paths start at the initial coordinates and return
        // there after the whole turns.
        for support in &config.supports {
            if let PathConfig::Cosine {
                offset,
                amp,
                omega,
                phase,
            } = support.path
            {
                let value = |s: f64| offset + amp * (omega * s + phase).cos();
                let row = &config.fibers[support.fiber].stations[support.station];
                let initial = match support.component {
                    ComponentConfig::X => row[0],
                    ComponentConfig::Y => row[1],
                    _ => panic!("only x and y are driven"),
                };
                assert!(
                    (value(0.0) - initial).abs() < 1e-12,
                    "a driven path must start at the station's initial coordinate"
                );
                assert!(
                    (value(1.0) - value(0.0)).abs() < 1e-9,
                    "four whole turns must close the path"
                );
            }
        }
    }

    #[test]
    fn crossing_angle_selects_the_expected_contact_regime() {
        let params = ABCParams::new(
            40.0f64.to_radians(),
            45.0f64.to_radians(),
            2.4e5,
            2.0e4,
            ABCVariant::PotentialBased,
            1,
            3,
        );
        let regime = |angle_deg: f64| {
            let config = generate_crossing_fibers(angle_deg, 1.5, false);
            let a = &config.fibers[0].stations[0];
            let b = &config.fibers[1].stations[0];
            let (_, z) = contact_angle(
                &Vec3::new(a[3], a[4], a[5]),
                &Vec3::new(b[3], b[4], b[5]),
            );
            abc_transition_factor(&params, z).0
        };
        assert_eq!(regime(90.0), 0.0, "perpendicular crossing is pure point contact");
        assert_eq!(regime(10.0), 1.0, "near-parallel crossing is pure line contact");
        let mid = regime(42.5);
        assert!(
            (0.4..0.6).contains(&mid),
            "the transition midpoint must blend both parts, got k = {mid:.3}"
        );
    }
}
