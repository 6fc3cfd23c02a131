//! Scenario driver: build the model, march it over the load path or
//! the time interval, and record per-step results.
//!
//! Static and dynamic runs share the adaptive stepping protocol (halve
//! on non-convergence, cautiously double back); recording happens
//! inside the step closure so only *accepted* steps produce records,
//! and the recorder's monotone-time check then holds by construction.

use fibril_core::timeint::GenAlpha;
use fibril_core::DVector;
use fibril_solve::{
    adaptive_stepping, assemble, dynamic_step, static_step, ContactStats, DynamicContext,
    Kinetics, Model, SolveError, State,
};

use crate::config::ScenarioConfig;
use crate::emit::{EmitError, GeometryFiber, GeometryFrame, Recorder, ResultRecord};
use crate::translate::{build, BuildError, RunPlan};

/// Any failure on the way from a config to emitted results.
#[derive(Debug, thiserror::Error)]
pub enum BenchError {
    #[error(transparent)]
    Build(#[from] BuildError),
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error(transparent)]
    Emit(#[from] EmitError),
}

/// Everything a finished run hands back.  The model rides along because
/// error norms and post-processing need its reference geometry.
pub struct RunOutcome {
    pub model: Model,
    pub plan: RunPlan,
    pub records: Vec<ResultRecord>,
    pub frames: Vec<GeometryFrame>,
    pub final_state: State,
    /// Final kinetics for dynamic runs.
    pub final_kinetics: Option<Kinetics>,
    /// Newton iterations over all attempts, failed ones included.
    pub accumulated_iterations: usize,
    pub steps: usize,
    pub halvings: usize,
}

/// Sample every element's centerline at 10 points for a geometry frame.
pub fn capture_frame(model: &Model, state: &State, time: f64) -> GeometryFrame {
    let samples = 10usize;
    let mut fibers = Vec::with_capacity(model.fiber_count());
    for f in 0..model.fiber_count() {
        let mut points = Vec::new();
        for &e in model.fiber_elements(f) {
            let geo = model.elements()[e].reference();
            let dofs = model.element_cl(state, e);
            for k in 0..samples {
                let xi = -1.0 + 2.0 * k as f64 / (samples - 1) as f64;
                let p = dofs.eval_xi(xi, 0, 0.5 * geo.length());
                points.push([p.x, p.y, p.z]);
            }
        }
        fibers.push(GeometryFiber {
            id: f,
            radius: model.fiber_radius(f),
            points,
        });
    }
    GeometryFrame { time, fibers }
}

/// Sum the reaction rows over all station position dofs, per axis.
fn reaction_sum(model: &Model, reactions: &DVector<f64>) -> [f64; 3] {
    let mut out = [0.0; 3];
    for f in 0..model.fiber_count() {
        for s in 0..model.station_count(f) {
            let dof = model.station_dof(f, s);
            for a in 0..3 {
                out[a] += reactions[dof + a];
            }
        }
    }
    out
}

/// Reaction torque about the vertical axis through `center`, summed
/// over the driven stations (the ones whose x/y dofs follow a path).
fn torque_about_z(
    model: &Model,
    state: &State,
    reactions: &DVector<f64>,
    driven: &[(usize, usize)],
    center: [f64; 2],
) -> f64 {
    let mut torque = 0.0;
    for &(f, s) in driven {
        let p = model.station_position(state, f, s);
        let dof = model.station_dof(f, s);
        let (fx, fy) = (reactions[dof], reactions[dof + 1]);
        torque += (p.x - center[0]) * fy - (p.y - center[1]) * fx;
    }
    torque
}

#[allow(clippy::too_many_arguments)]
fn make_record(
    model: &Model,
    plan: &RunPlan,
    step: usize,
    time: f64,
    state: &State,
    kinetics: Option<&Kinetics>,
    iterations: usize,
    reactions: &DVector<f64>,
    stats: &ContactStats,
) -> Result<ResultRecord, BenchError> {
    let torque_z = match plan.output.torque_about {
        Some(center) => torque_about_z(model, state, reactions, &plan.driven_stations, center),
        None => f64::NAN,
    };
    Ok(ResultRecord {
        step,
        time,
        n_dofs: model.n_dofs(),
        l2_error: f64::NAN,
        e_internal: model.internal_energy(state)?,
        e_kinetic: kinetics.map(|k| model.kinetic_energy(k)).unwrap_or(0.0),
        e_penalty: stats.potential.unwrap_or(f64::NAN),
        reaction: reaction_sum(model, reactions),
        torque_z,
        iterations,
        contact_active: stats.active_points,
        min_gap: stats.min_gap.unwrap_or(f64::NAN),
    })
}

/// Run a scenario start to finish.
pub fn run_scenario(config: &ScenarioConfig) -> Result<RunOutcome, BenchError> {
    let (model, plan) = build(config)?;
    let state0 = model.initial_state();
    let mut recorder = Recorder::new();
    let mut frames = Vec::new();

    // Initial record: a cheap assembly prices the starting energies and
    // contact state without a solve.
    let dynamics = plan.dynamics;
    let kin0 = dynamics
        .map(|_| model.resting_kinetics(&state0))
        .transpose()?;
    {
        let initial = match (&kin0, &dynamics) {
            (Some(kin), Some(dp)) => {
                let ctx = DynamicContext {
                    params: &dp.params,
                    dt: dp.dt,
                    q_n: &state0.q,
                    kin_n: kin,
                };
                assemble(&model, &state0, 0.0, Some(&ctx), false)?
            }
            _ => assemble(&model, &state0, 0.0, None, false)?,
        };
        let zeros = DVector::zeros(model.n_dofs());
        recorder.push(make_record(
            &model,
            &plan,
            0,
            0.0,
            &state0,
            kin0.as_ref(),
            0,
            &zeros,
            &initial.stats,
        )?);
        if plan.output.geometry_every > 0 {
            frames.push(capture_frame(&model, &state0, 0.0));
        }
    }

    let mut accepted = 0usize;
    match dynamics {
        None => {
            let report = {
                let recorder = &mut recorder;
                let frames = &mut frames;
                let model_ref = &model;
                let plan_ref = &plan;
                let accepted = &mut accepted;
                adaptive_stepping(state0, 0.0, plan.end, plan.n_steps, move |state, _t0, t1| {
                    let res = static_step(model_ref, state, t1, &plan_ref.solver)?;
                    *accepted += 1;
                    record_step(
                        model_ref, plan_ref, recorder, frames, *accepted, t1, &res.state, None,
                        res.iterations, &res.reactions, &res.stats,
                    )?;
                    Ok((res.state, res.iterations))
                })
            }?;
            Ok(RunOutcome {
                records: recorder.into_records(),
                frames,
                final_state: report.state,
                final_kinetics: None,
                accumulated_iterations: report.accumulated_iterations,
                steps: report.steps,
                halvings: report.halvings,
                model,
                plan,
            })
        }
        Some(dp) => {
            let params: GenAlpha = dp.params;
            let kin0 = kin0.expect("dynamic runs start from resting kinetics");
            let report = {
                let recorder = &mut recorder;
                let frames = &mut frames;
                let model_ref = &model;
                let plan_ref = &plan;
                let accepted = &mut accepted;
                adaptive_stepping(
                    (state0, kin0),
                    0.0,
                    plan.end,
                    plan.n_steps,
                    move |(state, kin), t0, t1| {
                        let (res, kin1) =
                            dynamic_step(model_ref, state, kin, t0, t1, &params, &plan_ref.solver)?;
                        *accepted += 1;
                        record_step(
                            model_ref, plan_ref, recorder, frames, *accepted, t1, &res.state,
                            Some(&kin1), res.iterations, &res.reactions, &res.stats,
                        )?;
                        Ok(((res.state, kin1), res.iterations))
                    },
                )
            }?;
            let (final_state, final_kinetics) = report.state;
            Ok(RunOutcome {
                records: recorder.into_records(),
                frames,
                final_state,
                final_kinetics: Some(final_kinetics),
                accumulated_iterations: report.accumulated_iterations,
                steps: report.steps,
                halvings: report.halvings,
                model,
                plan,
            })
        }
    }
}

/// Record one accepted step, honoring the output cadence.  The solver
/// treats recording failures (energy evaluation on a broken state) as
/// run failures.
#[allow(clippy::too_many_arguments)]
fn record_step(
    model: &Model,
    plan: &RunPlan,
    recorder: &mut Recorder,
    frames: &mut Vec<GeometryFrame>,
    accepted: usize,
    time: f64,
    state: &State,
    kinetics: Option<&Kinetics>,
    iterations: usize,
    reactions: &DVector<f64>,
    stats: &ContactStats,
) -> Result<(), SolveError> {
    let is_recorded = accepted % plan.output.record_every == 0;
    if is_recorded {
        let record = make_record(
            model, plan, accepted, time, state, kinetics, iterations, reactions, stats,
        )
        .map_err(|e| match e {
            BenchError::Solve(s) => s,
            // Only solver errors can occur here: the model is already built.
            other => panic!("unexpected recording failure: {other}"),
        })?;
        recorder.push(record);
    }
    if plan.output.geometry_every > 0 && accepted % plan.output.geometry_every == 0 {
        frames.push(capture_frame(model, state, time));
    }
    Ok(())
}
