//! On-disk scenario description.
//!
//! A scenario file is a complete, self-contained record of one run: the
//! element formulation, the cross-section, every fiber with its station
//! data, the supports and their motion, the loads and their schedules,
//! the contact formulation, and the solver/time-integrator settings.
//! The format is TOML with `deny_unknown_fields` everywhere so a typo in
//! a key fails loudly instead of silently using a default.
//!
//! Serialization is lossless: `parse(serialize(c)) == c` for every
//! config the generators produce, which the tests pin down.  Field order
//! inside each struct matters for the TOML writer (plain values must
//! precede nested tables), so scalars come first throughout.

use serde::{Deserialize, Serialize};

/// Current schema version; bumped on any incompatible change.
pub const SCHEMA_VERSION: u32 = 1;

/// Root of a scenario file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub schema_version: u32,
    /// Human-readable scenario name; also used to name output files.
    pub name: String,
    pub element: ElementConfig,
    pub section: SectionConfig,
    pub solver: SolverSettings,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dynamics: Option<DynamicsConfig>,
    pub output: OutputConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub contact: Option<ContactConfig>,
    pub fibers: Vec<FiberConfig>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub supports: Vec<SupportConfig>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub loads: Vec<LoadConfig>,
}

/// Which beam formulation meshes the fibers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ElementConfig {
    /// Centerline-only element; rotations condense out of the theory.
    TorsionFree,
    /// Full six-field element with nodal triads.  `reduced` selects the
    /// mixed quadrature that avoids locking on slender fibers.
    SimoReissner { reduced: bool },
}

/// Cross-section geometry and material, shared by all fibers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SectionConfig {
    pub youngs: f64,
    pub shear: f64,
    pub density: f64,
    /// Shear-stiffness correction factor; omitted means the section
    /// default.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shear_correction: Option<f64>,
    pub shape: ShapeConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ShapeConfig {
    Circle { radius: f64 },
    Square { side: f64 },
}

/// One fiber: contact radius plus station rows `[x, y, z, tx, ty, tz]`
/// (position and unit tangent); `n` stations mesh into `n − 1` elements.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FiberConfig {
    pub radius: f64,
    pub stations: Vec<[f64; 6]>,
}

/// Which scalar dof of a station a support pins.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ComponentConfig {
    X,
    Y,
    Z,
    Tx,
    Ty,
    Tz,
    Rx,
    Ry,
    Rz,
}

impl ComponentConfig {
    /// Offset within the station's translational block, or within the
    /// rotational block for the `R*` components.
    pub fn offset(self) -> usize {
        match self {
            ComponentConfig::X | ComponentConfig::Rx => 0,
            ComponentConfig::Y | ComponentConfig::Ry => 1,
            ComponentConfig::Z | ComponentConfig::Rz => 2,
            ComponentConfig::Tx => 3,
            ComponentConfig::Ty => 4,
            ComponentConfig::Tz => 5,
        }
    }

    pub fn is_rotation(self) -> bool {
        matches!(
            self,
            ComponentConfig::Rx | ComponentConfig::Ry | ComponentConfig::Rz
        )
    }
}

/// Support motion over the solution path (pseudo-time for static runs,
/// physical time for dynamic ones).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum PathConfig {
    /// Freeze the dof at whatever value the state has when a step
    /// begins.  The only admissible constraint on rotation dofs.
    Hold,
    Constant { value: f64 },
    /// Piecewise-linear in `(s, value)` knots, clamped outside.
    Linear { knots: Vec<(f64, f64)> },
    /// `offset + amp·cos(omega·s + phase)`.
    Cosine {
        offset: f64,
        amp: f64,
        omega: f64,
        phase: f64,
    },
}

/// Scalar load factor over the solution path — same shapes as
/// [`PathConfig`] minus `Hold`, which has no meaning for a load.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ScheduleConfig {
    Constant {
        value: f64,
    },
    Linear {
        knots: Vec<(f64, f64)>,
    },
    Cosine {
        offset: f64,
        amp: f64,
        omega: f64,
        phase: f64,
    },
}

/// One pinned dof.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SupportConfig {
    pub fiber: usize,
    pub station: usize,
    pub component: ComponentConfig,
    pub path: PathConfig,
}

/// External loads; the vector is scaled by `factor(s)` at the step
/// parameter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum LoadConfig {
    NodalForce {
        fiber: usize,
        station: usize,
        force: [f64; 3],
        factor: ScheduleConfig,
    },
    /// Spatial moment on a station's rotation dofs; six-field fibers
    /// only.
    NodalMoment {
        fiber: usize,
        station: usize,
        moment: [f64; 3],
        factor: ScheduleConfig,
    },
    /// Force per unit initial length over one whole fiber.
    Distributed {
        fiber: usize,
        force: [f64; 3],
        factor: ScheduleConfig,
    },
}

/// Penalty force law shape.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum LawConfig {
    /// Force `ε·⟨−g⟩`, active on penetration only.
    Linear { stiffness: f64 },
    /// Quadratic ramp-in below `gap_bar`, linear once penetrated; keeps
    /// the force C¹ where contact engages.
    QuadraticRegularized { stiffness: f64, gap_bar: f64 },
}

/// Contact formulation applied to every broad-phase pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "formulation", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ContactConfig {
    /// One penalty force at the bilateral closest point per pair.
    Point { search_margin: f64, law: LawConfig },
    /// Gauss-point line integral over the slave element.
    Line {
        search_margin: f64,
        segments: usize,
        gauss_per_segment: usize,
        law: LawConfig,
    },
    /// Angle-blended point/line formulation covering all crossing
    /// angles.  `gap_bar` absent means a plain linear law; the two
    /// penalty parameters apply to the point and line parts.
    AllAngle {
        search_margin: f64,
        alpha1_deg: f64,
        alpha2_deg: f64,
        eps_perp: f64,
        eps_par: f64,
        /// Force-based blending instead of the potential-based variant.
        force_based: bool,
        segments: usize,
        gauss_per_segment: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        gap_bar: Option<f64>,
    },
}

/// Newton tolerances and the stepping plan.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSettings {
    pub tol_res: f64,
    pub tol_disp: f64,
    pub max_iter: usize,
    /// Per-iteration cap on the largest station translation; omitted
    /// means uncapped.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub du_max: Option<f64>,
    /// Nominal step count over `[0, s_end]` (static) or `[0, t_end]`
    /// (dynamic, where it is derived from `dt` instead and this field is
    /// ignored).
    pub n_steps: usize,
    pub s_end: f64,
}

/// Presence turns the run dynamic.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DynamicsConfig {
    /// Spectral radius at infinite frequency: 1 keeps all energy, 0
    /// annihilates the highest mode per step.
    pub rho_inf: f64,
    pub dt: f64,
    pub t_end: f64,
}

/// What the run writes and how often, in accepted steps.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    /// Record every n-th accepted step (1 = all); the initial state is
    /// always record zero.
    pub record_every: usize,
    /// Dump centerline geometry every n-th accepted step; 0 = never.
    pub geometry_every: usize,
    /// When present, the run records the reaction torque about the
    /// vertical axis through this x-y point, summed over stations whose
    /// x or y dof follows a non-`Hold` path (the driven stations).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub torque_about: Option<[f64; 2]>,
}

/// Config-level failure: structural problems detectable before any
/// mechanics is built.
#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("schema version {found} not supported (expected {SCHEMA_VERSION})")]
    SchemaVersion { found: u32 },
    #[error("scenario has no fibers")]
    NoFibers,
    #[error("fiber {fiber} has {stations} stations; need at least 2")]
    TooFewStations { fiber: usize, stations: usize },
    #[error("fiber {fiber} station {station} tangent has norm {norm:.3e}; need a usable direction")]
    DegenerateTangent {
        fiber: usize,
        station: usize,
        norm: f64,
    },
    #[error("fiber {fiber} radius {radius} must be positive")]
    BadRadius { fiber: usize, radius: f64 },
    #[error("{place} references fiber {fiber} but the scenario has {count}")]
    FiberOutOfRange {
        place: &'static str,
        fiber: usize,
        count: usize,
    },
    #[error("{place} references station {station} of fiber {fiber} which has {count}")]
    StationOutOfRange {
        place: &'static str,
        fiber: usize,
        station: usize,
        count: usize,
    },
    #[error("rotation component support on fiber {fiber} station {station} must use the hold path")]
    RotationPath { fiber: usize, station: usize },
    #[error("rotation supports and nodal moments need the six-field element")]
    RotationNeedsTriads,
    #[error("schedule needs at least one knot")]
    EmptySchedule,
    #[error("schedule knots must strictly increase")]
    UnsortedSchedule,
    #[error("dynamics needs dt > 0 and t_end > 0, got dt = {dt}, t_end = {t_end}")]
    BadDynamics { dt: f64, t_end: f64 },
    #[error("dynamics needs a positive material density")]
    ZeroDensity,
    #[error("solver settings need tol_res > 0, tol_disp > 0, max_iter > 0, n_steps > 0, s_end > 0")]
    BadSolver,
    #[error("record_every must be at least 1")]
    BadRecordEvery,
    #[error("TOML parse failure: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("TOML write failure: {0}")]
    Emit(#[from] toml::ser::Error),
}

fn check_knots(knots: &[(f64, f64)]) -> Result<(), ConfigError> {
    if knots.is_empty() {
        return Err(ConfigError::EmptySchedule);
    }
    if knots.windows(2).any(|w| w[1].0 <= w[0].0) {
        return Err(ConfigError::UnsortedSchedule);
    }
    Ok(())
}

fn check_path(path: &PathConfig) -> Result<(), ConfigError> {
    match path {
        PathConfig::Linear { knots } => check_knots(knots),
        _ => Ok(()),
    }
}

fn check_schedule(schedule: &ScheduleConfig) -> Result<(), ConfigError> {
    match schedule {
        ScheduleConfig::Linear { knots } => check_knots(knots),
        _ => Ok(()),
    }
}

impl ScenarioConfig {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        let config: ScenarioConfig = toml::from_str(text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn to_toml(&self) -> Result<String, ConfigError> {
        Ok(toml::to_string_pretty(self)?)
    }

    /// Cheap structural validation; everything here would otherwise
    /// surface as a panic or an opaque mechanics error much later.
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(ConfigError::SchemaVersion {
                found: self.schema_version,
            });
        }
        if self.fibers.is_empty() {
            return Err(ConfigError::NoFibers);
        }
        for (f, fiber) in self.fibers.iter().enumerate() {
            if fiber.stations.len() < 2 {
                return Err(ConfigError::TooFewStations {
                    fiber: f,
                    stations: fiber.stations.len(),
                });
            }
            if !(fiber.radius > 0.0) {
                return Err(ConfigError::BadRadius {
                    fiber: f,
                    radius: fiber.radius,
                });
            }
            for (s, row) in fiber.stations.iter().enumerate() {
                let norm = (row[3] * row[3] + row[4] * row[4] + row[5] * row[5]).sqrt();
                if !(norm > 1e-12) {
                    return Err(ConfigError::DegenerateTangent {
                        fiber: f,
                        station: s,
                        norm,
                    });
                }
            }
        }
        let has_triads = matches!(self.element, ElementConfig::SimoReissner { .. });
        let station_count = |place: &'static str, fiber: usize, station: usize| {
            if fiber >= self.fibers.len() {
                return Err(ConfigError::FiberOutOfRange {
                    place,
                    fiber,
                    count: self.fibers.len(),
                });
            }
            let count = self.fibers[fiber].stations.len();
            if station >= count {
                return Err(ConfigError::StationOutOfRange {
                    place,
                    fiber,
                    station,
                    count,
                });
            }
            Ok(())
        };
        for support in &self.supports {
            station_count("support", support.fiber, support.station)?;
            check_path(&support.path)?;
            if support.component.is_rotation() {
                if !has_triads {
                    return Err(ConfigError::RotationNeedsTriads);
                }
                if !matches!(support.path, PathConfig::Hold) {
                    return Err(ConfigError::RotationPath {
                        fiber: support.fiber,
                        station: support.station,
                    });
                }
            }
        }
        for load in &self.loads {
            match load {
                LoadConfig::NodalForce {
                    fiber,
                    station,
                    factor,
                    ..
                } => {
                    station_count("nodal force", *fiber, *station)?;
                    check_schedule(factor)?;
                }
                LoadConfig::NodalMoment {
                    fiber,
                    station,
                    factor,
                    ..
                } => {
                    if !has_triads {
                        return Err(ConfigError::RotationNeedsTriads);
                    }
                    station_count("nodal moment", *fiber, *station)?;
                    check_schedule(factor)?;
                }
                LoadConfig::Distributed { fiber, factor, .. } => {
                    if *fiber >= self.fibers.len() {
                        return Err(ConfigError::FiberOutOfRange {
                            place: "distributed load",
                            fiber: *fiber,
                            count: self.fibers.len(),
                        });
                    }
                    check_schedule(factor)?;
                }
            }
        }
        if let Some(dynamics) = &self.dynamics {
            if !(dynamics.dt > 0.0) || !(dynamics.t_end > 0.0) {
                return Err(ConfigError::BadDynamics {
                    dt: dynamics.dt,
                    t_end: dynamics.t_end,
                });
            }
            if !(self.section.density > 0.0) {
                return Err(ConfigError::ZeroDensity);
            }
        }
        let solver = &self.solver;
        if !(solver.tol_res > 0.0)
            || !(solver.tol_disp > 0.0)
            || solver.max_iter == 0
            || solver.n_steps == 0
            || !(solver.s_end > 0.0)
        {
            return Err(ConfigError::BadSolver);
        }
        if self.output.record_every == 0 {
            return Err(ConfigError::BadRecordEvery);
        }
        Ok(())
    }
}
