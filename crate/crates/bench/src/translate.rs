//! Turn a parsed [`ScenarioConfig`] into a solvable [`Model`] plus the
//! run plan (stepping, dynamics, output cadence) that the driver needs.
//!
//! The split matters: the model is pure mechanics and knows nothing
//! about files or cadence, while the plan carries everything the step
//! loop consumes.  Both come from the same config so a scenario file
//! remains the single source of truth for a run.

use fibril_contact::{ABCParams, ABCVariant, PenaltyLaw, Segmentation};
use fibril_core::section::{CrossSection, Material, SectionProperties};
use fibril_core::timeint::GenAlpha;
use fibril_core::Vec3;
use fibril_solve::{
    ContactModel, FiberKind, FiberSpec, Load, Model, PrescribedValue, Schedule,
    SolveError, SolverConfig,
};

use crate::config::{
    ComponentConfig, ConfigError, ContactConfig, ElementConfig, LawConfig, LoadConfig, OutputConfig,
    PathConfig, ScenarioConfig, ScheduleConfig, ShapeConfig,
};

/// Everything the step loop needs besides the model itself.
#[derive(Debug, Clone)]
pub struct RunPlan {
    pub solver: SolverConfig,
    /// Nominal step count for the adaptive driver.
    pub n_steps: usize,
    /// End of the path parameter: pseudo-time (static) or seconds
    /// (dynamic).
    pub end: f64,
    pub dynamics: Option<DynamicPlan>,
    pub output: OutputConfig,
    /// Stations whose x or y dof follows a non-hold path, as
    /// `(fiber, station)` — the set the reaction torque is summed over.
    pub driven_stations: Vec<(usize, usize)>,
}

#[derive(Debug, Clone, Copy)]
pub struct DynamicPlan {
    pub params: GenAlpha,
    pub dt: f64,
}

/// Build failure: either the config was structurally bad, or the
/// mechanics constructors rejected it (degenerate geometry and such).
#[derive(Debug, thiserror::Error)]
pub enum BuildError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Solve(#[from] SolveError),
}

fn schedule(config: &ScheduleConfig) -> Schedule {
    match config {
        ScheduleConfig::Constant { value } => Schedule::Constant(*value),
        ScheduleConfig::Linear { knots } => Schedule::PiecewiseLinear(knots.clone()),
        ScheduleConfig::Cosine {
            offset,
            amp,
            omega,
            phase,
        } => Schedule::Cosine {
            offset: *offset,
            amp: *amp,
            omega: *omega,
            phase: *phase,
        },
    }
}

fn prescribed(path: &PathConfig) -> PrescribedValue {
    match path {
        PathConfig::Hold => PrescribedValue::Hold,
        PathConfig::Constant { value } => PrescribedValue::Path(Schedule::Constant(*value)),
        PathConfig::Linear { knots } => {
            PrescribedValue::Path(Schedule::PiecewiseLinear(knots.clone()))
        }
        PathConfig::Cosine {
            offset,
            amp,
            omega,
            phase,
        } => PrescribedValue::Path(Schedule::Cosine {
            offset: *offset,
            amp: *amp,
            omega: *omega,
            phase: *phase,
        }),
    }
}

fn law(config: &LawConfig) -> PenaltyLaw {
    match config {
        LawConfig::Linear { stiffness } => PenaltyLaw::Linear {
            stiffness: *stiffness,
        },
        LawConfig::QuadraticRegularized { stiffness, gap_bar } => {
            PenaltyLaw::QuadraticRegularized {
                stiffness: *stiffness,
                gap_bar: *gap_bar,
            }
        }
    }
}

/// Build the model and plan; validates the config first so every
/// failure surfaces here rather than mid-run.
pub fn build(config: &ScenarioConfig) -> Result<(Model, RunPlan), BuildError> {
    config.validate()?;

    let material = Material::new(
        config.section.youngs,
        config.section.shear,
        config.section.density,
    );
    let mut section = match config.section.shape {
        ShapeConfig::Circle { radius } => CrossSection::circle(radius),
        ShapeConfig::Square { side } => CrossSection::square(side),
    };
    if let Some(kappa) = config.section.shear_correction {
        section = section.with_shear_correction(kappa);
    }
    let props = SectionProperties::new(section, material);

    let kind = match config.element {
        ElementConfig::TorsionFree => FiberKind::TorsionFree,
        ElementConfig::SimoReissner { reduced } => FiberKind::SimoReissner { reduced },
    };

    let mut model = Model::new();
    for fiber in &config.fibers {
        let stations = fiber
            .stations
            .iter()
            .map(|row| {
                let tangent = Vec3::new(row[3], row[4], row[5]);
                (Vec3::new(row[0], row[1], row[2]), tangent.normalize())
            })
            .collect();
        let spec = FiberSpec {
            stations,
            props: props.clone(),
            radius: fiber.radius,
        };
        model.add_fiber(&spec, kind)?;
    }

    let mut driven_stations: Vec<(usize, usize)> = Vec::new();
    for support in &config.supports {
        let dof = if support.component.is_rotation() {
            let base = model
                .station_rot_dof(support.fiber, support.station)
                .expect("validated: rotation support on a six-field fiber");
            base + support.component.offset()
        } else {
            model.station_dof(support.fiber, support.station) + support.component.offset()
        };
        if matches!(
            support.component,
            ComponentConfig::X | ComponentConfig::Y
        ) && !matches!(support.path, PathConfig::Hold)
        {
            let key = (support.fiber, support.station);
            if !driven_stations.contains(&key) {
                driven_stations.push(key);
            }
        }
        model.add_dirichlet(dof, prescribed(&support.path));
    }

    for load in &config.loads {
        let built = match load {
            LoadConfig::NodalForce {
                fiber,
                station,
                force,
                factor,
            } => Load::NodalForce {
                fiber: *fiber,
                station: *station,
                force: Vec3::new(force[0], force[1], force[2]),
                schedule: schedule(factor),
            },
            LoadConfig::NodalMoment {
                fiber,
                station,
                moment,
                factor,
            } => Load::NodalMoment {
                fiber: *fiber,
                station: *station,
                moment: Vec3::new(moment[0], moment[1], moment[2]),
                schedule: schedule(factor),
            },
            LoadConfig::Distributed {
                fiber,
                force,
                factor,
            } => Load::Distributed {
                fiber: *fiber,
                force: Vec3::new(force[0], force[1], force[2]),
                schedule: schedule(factor),
            },
        };
        model.add_load(built);
    }

    if let Some(contact) = &config.contact {
        match contact {
            ContactConfig::Point { search_margin, law: l } => {
                model.set_contact(ContactModel::Point { law: law(l) }, *search_margin);
            }
            ContactConfig::Line {
                search_margin,
                segments,
                gauss_per_segment,
                law: l,
            } => {
                model.set_contact(
                    ContactModel::Line {
                        law: law(l),
                        seg: Segmentation::new(*segments, *gauss_per_segment),
                    },
                    *search_margin,
                );
            }
            ContactConfig::AllAngle {
                search_margin,
                alpha1_deg,
                alpha2_deg,
                eps_perp,
                eps_par,
                force_based,
                segments,
                gauss_per_segment,
                gap_bar,
            } => {
                let variant = if *force_based {
                    ABCVariant::ForceBased
                } else {
                    ABCVariant::PotentialBased
                };
                let params = ABCParams::new(
                    alpha1_deg.to_radians(),
                    alpha2_deg.to_radians(),
                    *eps_perp,
                    *eps_par,
                    variant,
                    *segments,
                    *gauss_per_segment,
                );
                // The law's stiffness is overridden per part by the
                // blending parameters; only its shape matters here.
                let base = match gap_bar {
                    Some(g) => PenaltyLaw::QuadraticRegularized {
                        stiffness: *eps_perp,
                        gap_bar: *g,
                    },
                    None => PenaltyLaw::Linear {
                        stiffness: *eps_perp,
                    },
                };
                model.set_contact(ContactModel::AllAngle { params, law: base }, *search_margin);
            }
        }
    }

    let solver = SolverConfig {
        tol_res: config.solver.tol_res,
        tol_disp: config.solver.tol_disp,
        max_iter: config.solver.max_iter,
        du_max: config.solver.du_max.unwrap_or(f64::INFINITY),
    };
    let (n_steps, end, dynamics) = match &config.dynamics {
        Some(d) => {
            let n = (d.t_end / d.dt).round().max(1.0) as usize;
            (
                n,
                d.t_end,
                Some(DynamicPlan {
                    params: GenAlpha::from_spectral_radius(d.rho_inf),
                    dt: d.dt,
                }),
            )
        }
        None => (config.solver.n_steps, config.solver.s_end, None),
    };

    let plan = RunPlan {
        solver,
        n_steps,
        end,
        dynamics,
        output: config.output,
        driven_stations,
    };
    Ok((model, plan))
}

/// Convenience for tests and the validate command: dirichlet rows built
/// from the same component mapping the translation uses.
pub fn support_dof(model: &Model, support_fiber: usize, station: usize, component: ComponentConfig) -> usize {
    if component.is_rotation() {
        model
            .station_rot_dof(support_fiber, station)
            .expect("rotation dof requested on a fiber without triads")
            + component.offset()
    } else {
        model.station_dof(support_fiber, station) + component.offset()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{
        DynamicsConfig, FiberConfig, SectionConfig, SolverSettings, SupportConfig,
    };
    use crate::config::SCHEMA_VERSION;

    fn minimal() -> ScenarioConfig {
        ScenarioConfig {
            schema_version: SCHEMA_VERSION,
            name: "minimal".into(),
            element: ElementConfig::TorsionFree,
            section: SectionConfig {
                youngs: 1e7,
                shear: 5e6,
                density: 1.0,
                shear_correction: None,
                shape: ShapeConfig::Circle { radius: 0.1 },
            },
            solver: SolverSettings {
                tol_res: 1e-8,
                tol_disp: 1e-10,
                max_iter: 30,
                du_max: None,
                n_steps: 4,
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
                radius: 0.1,
                stations: vec![
                    [0.0, 0.0, 0.0, 1.0, 0.0, 0.0],
                    [1.0, 0.0, 0.0, 1.0, 0.0, 0.0],
                    [2.0, 0.0, 0.0, 1.0, 0.0, 0.0],
                ],
            }],
            supports: vec![
                SupportConfig {
                    fiber: 0,
                    station: 0,
                    component: ComponentConfig::X,
                    path: PathConfig::Hold,
                },
                SupportConfig {
                    fiber: 0,
                    station: 2,
                    component: ComponentConfig::Y,
                    path: PathConfig::Linear {
                        knots: vec![(0.0, 0.0), (1.0, 0.3)],
                    },
                },
            ],
            loads: vec![],
        }
    }

    #[test]
    fn build_produces_the_expected_model_shape() {
        let config = minimal();
        let (model, plan) = build(&config).expect("minimal config builds");
        assert_eq!(model.fiber_count(), 1);
        assert_eq!(model.elements().len(), 2);
        assert_eq!(model.n_dofs(), 18, "3 stations × 6 dofs, no triads");
        assert_eq!(model.dirichlet().len(), 2);
        assert_eq!(plan.n_steps, 4);
        assert_eq!(plan.end, 1.0);
        assert!(plan.dynamics.is_none());
        // Station 2 is driven in y, so the torque sum covers it.
        assert_eq!(plan.driven_stations, vec![(0, 2)]);
        // The second dirichlet row lands on station 2's y dof.
        assert_eq!(model.dirichlet()[1].dof, model.station_dof(0, 2) + 1);
    }

    #[test]
    fn dynamic_step_count_comes_from_dt() {
        let mut config = minimal();
        config.dynamics = Some(DynamicsConfig {
            rho_inf: 0.9,
            dt: 0.25,
            t_end: 2.0,
        });
        let (_, plan) = build(&config).expect("dynamic config builds");
        assert_eq!(plan.n_steps, 8, "2.0 s at dt 0.25 is 8 nominal steps");
        assert_eq!(plan.end, 2.0);
        assert!(plan.dynamics.is_some());
    }

    #[test]
    fn tangents_are_normalized_on_the_way_in() {
        let mut config = minimal();
        // Same direction, wild magnitude: the mesh must not care.
        for row in &mut config.fibers[0].stations {
            row[3] = 40.0;
        }
        let (model, _) = build(&config).expect("non-unit tangents build");
        let state = model.initial_state();
        let t = model.station_tangent(&state, 0, 0);
        assert!(
            (t.norm() - 1.0).abs() < 1e-12,
            "stored tangent must be unit length, got {}",
            t.norm()
        );
    }
}
