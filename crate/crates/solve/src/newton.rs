//! Newton solution of one static or dynamic step, and the adaptive
//! stepping protocol built on top of it.
//!
//! Convergence demands *both* a small free residual and a small last
//! increment — either criterion alone can be fooled (a stiff system by
//! displacement stagnation, a soft one by residual scaling), the pair is
//! robust across the stiffness ranges the elements cover.  Every
//! in-iteration failure (stalled residual, singular tangent, an element
//! or projection evaluated at an absurd trial configuration) is reported
//! as [`SolveError::NonConvergence`], the one signal the adaptive
//! protocol reacts to: retry from the last converged state with half the
//! step.

use fibril_core::timeint::{advance_rate_vectors, GenAlpha};
use fibril_core::DVector;

use crate::assemble::{assemble, ContactStats, DynamicContext};
use crate::band::SystemMatrix;
use crate::model::{DofPartition, ElementKind, Kinetics, Model, SolverConfig, State};
use crate::SolveError;

/// Converged result of one step.
#[derive(Debug, Clone)]
pub struct StepResult {
    pub state: State,
    /// Number of linear solves spent.
    pub iterations: usize,
    /// Free-residual norm at acceptance.
    pub residual_norm: f64,
    /// Free-residual norm before every iteration, acceptance included —
    /// the raw material for convergence-rate checks.
    pub residual_history: Vec<f64>,
    /// Support reactions acting on the structure: the residual rows of
    /// the constrained dofs at convergence, zero elsewhere.  Summed with
    /// the applied loads they balance to solver tolerance.
    pub reactions: DVector<f64>,
    pub stats: ContactStats,
}

struct NewtonOutcome {
    iterations: usize,
    residual_norm: f64,
    residual_history: Vec<f64>,
    reactions: DVector<f64>,
    stats: ContactStats,
}

/// Core loop: assemble, reduce, solve, cap, apply — until both criteria
/// hold.  `work` carries the trial state in place.
fn newton_loop(
    model: &Model,
    work: &mut State,
    s: f64,
    dynamic: Option<&DynamicContext>,
    cfg: &SolverConfig,
    part: &DofPartition,
) -> Result<NewtonOutcome, SolveError> {
    let mut last_dx = f64::INFINITY;
    let mut history = Vec::new();
    let mut it = 0usize;
    loop {
        let asm = match assemble(model, work, s, dynamic, true) {
            Ok(a) => a,
            Err(_) => return Err(SolveError::NonConvergence { iterations: it }),
        };
        let rf = part.restrict(&asm.residual);
        let rnorm = rf.norm();
        history.push(rnorm);
        if !rnorm.is_finite() {
            return Err(SolveError::NonConvergence { iterations: it });
        }
        if rnorm <= cfg.tol_res && last_dx <= cfg.tol_disp {
            let mut reactions = DVector::zeros(model.n_dofs());
            for &d in &part.constrained {
                reactions[d] = asm.residual[d];
            }
            return Ok(NewtonOutcome {
                iterations: it,
                residual_norm: rnorm,
                residual_history: history,
                reactions,
                stats: asm.stats,
            });
        }
        if it == cfg.max_iter {
            return Err(SolveError::NonConvergence { iterations: it });
        }

        // Reduce the tangent to the free dofs; bandwidth falls out of the
        // surviving triplets and picks the container.
        let triplets = asm
            .triplets
            .as_ref()
            .expect("newton assembles with stiffness");
        let mut bw = 0usize;
        let mut mapped = Vec::with_capacity(triplets.len());
        for &(i, j, v) in triplets {
            if let (Some(fi), Some(fj)) = (part.free_index[i], part.free_index[j]) {
                bw = bw.max(fi.abs_diff(fj));
                mapped.push((fi, fj, v));
            }
        }
        let mut sys = SystemMatrix::zeros(part.n_free(), bw);
        for &(i, j, v) in &mapped {
            sys.add(i, j, v);
        }
        let factor = match sys.factor() {
            Ok(f) => f,
            Err(_) => return Err(SolveError::NonConvergence { iterations: it }),
        };
        let dx_red = match factor.solve(&(-rf)) {
            Ok(d) => d,
            Err(_) => return Err(SolveError::NonConvergence { iterations: it }),
        };
        let mut dx = part.scatter(&dx_red);
        if !dx.iter().all(|v| v.is_finite()) {
            return Err(SolveError::NonConvergence { iterations: it });
        }
        let mx = model.max_station_translation(&dx);
        if mx > cfg.du_max {
            dx *= cfg.du_max / mx;
        }
        model.apply_increment(work, &dx);
        last_dx = dx.norm();
        it += 1;
    }
}

/// Solve the equilibrium at step parameter `s`: prescribed paths are
/// written at `s`, then Newton runs from the given state.
pub fn static_step(
    model: &Model,
    state: &State,
    s: f64,
    cfg: &SolverConfig,
) -> Result<StepResult, SolveError> {
    let part = DofPartition::new(model);
    let mut work = state.clone();
    model.apply_dirichlet(&mut work, s);
    let out = newton_loop(model, &mut work, s, None, cfg, &part)?;
    Ok(StepResult {
        state: work,
        iterations: out.iterations,
        residual_norm: out.residual_norm,
        residual_history: out.residual_history,
        reactions: out.reactions,
        stats: out.stats,
    })
}

/// Advance one generalized-alpha step from the converged `(state, kin)`
/// at `t0` to `t1`.  Loads and prescribed paths are evaluated at the end
/// time; the zero-displacement predictor starts Newton from the old
/// configuration.  On convergence the global rates and the per-element
/// rotational histories are advanced consistently.
pub fn dynamic_step(
    model: &Model,
    state: &State,
    kin: &Kinetics,
    t0: f64,
    t1: f64,
    params: &GenAlpha,
    cfg: &SolverConfig,
) -> Result<(StepResult, Kinetics), SolveError> {
    let dt = t1 - t0;
    assert!(dt > 0.0, "dynamic step needs t1 > t0, got [{t0}, {t1}]");
    let part = DofPartition::new(model);
    let mut work = state.clone();
    model.apply_dirichlet(&mut work, t1);
    let ctx = DynamicContext {
        params,
        dt,
        q_n: &state.q,
        kin_n: kin,
    };
    let out = newton_loop(model, &mut work, t1, Some(&ctx), cfg, &part)?;

    let delta = &work.q - &state.q;
    let rates = advance_rate_vectors(params, dt, &delta, &kin.vel, &kin.acc, &kin.alg);
    let mut gp = Vec::with_capacity(model.elements().len());
    for (e, el) in model.elements().iter().enumerate() {
        match &el.kind {
            ElementKind::TorsionFree(_) => gp.push(Vec::new()),
            ElementKind::SimoReissner(sr) => {
                let dofs = model.element_sr_dofs(&work, e);
                match sr.advance_kinetics(&dofs, &kin.gp[e], params, dt) {
                    Ok(h) => gp.push(h),
                    // The same rotation increments were representable
                    // during assembly; failing here still means the step
                    // was too large.
                    Err(_) => {
                        return Err(SolveError::NonConvergence {
                            iterations: out.iterations,
                        })
                    }
                }
            }
        }
    }
    Ok((
        StepResult {
            state: work,
            iterations: out.iterations,
            residual_norm: out.residual_norm,
            residual_history: out.residual_history,
            reactions: out.reactions,
            stats: out.stats,
        },
        Kinetics {
            vel: rates.vel,
            acc: rates.acc,
            alg: rates.alg,
            gp,
        },
    ))
}

// ---------------------------------------------------------------------------
// Adaptive stepping

/// Steps taken in a row at a reduced size before it is doubled again.
pub const DOUBLING_WINDOW: usize = 4;
/// Halvings below the original step before the protocol gives up.
pub const MAX_HALVINGS: u32 = 10;

/// One attempt of the protocol, for reproducibility analysis and tests.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepAttempt {
    pub start: f64,
    pub h: f64,
    pub converged: bool,
    pub iterations: usize,
}

/// Outcome of a completed protocol run.
#[derive(Debug, Clone)]
pub struct AdaptiveReport<S> {
    pub state: S,
    /// Newton iterations spent over all attempts, failed ones included;
    /// grows monotonically over the run.
    pub accumulated_iterations: usize,
    /// Converged steps.
    pub steps: usize,
    /// Failed attempts.
    pub halvings: usize,
    pub trace: Vec<StepAttempt>,
}

/// Drive `step(state, t0, t1)` from `start` to `end` in `n0` nominal
/// steps.  Non-convergence halves the step and retries from the same
/// state; after [`DOUBLING_WINDOW`] consecutive successes at a reduced
/// size the step doubles, never beyond the nominal size; the run aborts
/// with [`SolveError::StepFloor`] once the step falls below
/// `1/2^MAX_HALVINGS` of nominal.  The last step is clipped to land on
/// `end` exactly.
pub fn adaptive_stepping<S, F>(
    state0: S,
    start: f64,
    end: f64,
    n0: usize,
    mut step: F,
) -> Result<AdaptiveReport<S>, SolveError>
where
    F: FnMut(&S, f64, f64) -> Result<(S, usize), SolveError>,
{
    assert!(n0 >= 1, "need at least one nominal step");
    assert!(end > start, "empty interval [{start}, {end}]");
    let h0 = (end - start) / n0 as f64;
    let floor = h0 / f64::powi(2.0, MAX_HALVINGS as i32);
    let tiny = 1e-12 * (end - start);

    let mut cur = state0;
    let mut t = start;
    let mut h = h0;
    let mut consecutive = 0usize;
    let mut accumulated = 0usize;
    let mut steps = 0usize;
    let mut halvings = 0usize;
    let mut trace = Vec::new();
    while end - t > tiny {
        let h_try = h.min(end - t);
        match step(&cur, t, t + h_try) {
            Ok((next, iterations)) => {
                accumulated += iterations;
                trace.push(StepAttempt {
                    start: t,
                    h: h_try,
                    converged: true,
                    iterations,
                });
                steps += 1;
                cur = next;
                t += h_try;
                if h < h0 {
                    consecutive += 1;
                    if consecutive >= DOUBLING_WINDOW {
                        h = (2.0 * h).min(h0);
                        consecutive = 0;
                    }
                }
            }
            Err(SolveError::NonConvergence { iterations }) => {
                accumulated += iterations;
                trace.push(StepAttempt {
                    start: t,
                    h: h_try,
                    converged: false,
                    iterations,
                });
                halvings += 1;
                consecutive = 0;
                h = 0.5 * h_try;
                if h < floor {
                    return Err(SolveError::StepFloor { h, floor });
                }
            }
            Err(other) => return Err(other),
        }
    }
    Ok(AdaptiveReport {
        state: cur,
        accumulated_iterations: accumulated,
        steps,
        halvings,
        trace,
    })
}

/// Adaptive protocol over static steps; the step parameter handed to the
/// schedules is the end of each substep.
pub fn adaptive_static(
    model: &Model,
    state0: State,
    start: f64,
    end: f64,
    n0: usize,
    cfg: &SolverConfig,
) -> Result<AdaptiveReport<State>, SolveError> {
    adaptive_stepping(state0, start, end, n0, |st, _t0, t1| {
        static_step(model, st, t1, cfg).map(|r| (r.state, r.iterations))
    })
}

/// Adaptive protocol over generalized-alpha steps.
pub fn adaptive_dynamic(
    model: &Model,
    state0: State,
    kin0: Kinetics,
    start: f64,
    end: f64,
    n0: usize,
    params: &GenAlpha,
    cfg: &SolverConfig,
) -> Result<AdaptiveReport<(State, Kinetics)>, SolveError> {
    adaptive_stepping((state0, kin0), start, end, n0, |sk, t0, t1| {
        dynamic_step(model, &sk.0, &sk.1, t0, t1, params, cfg)
            .map(|(r, k)| ((r.state, k), r.iterations))
    })
}

// ---------------------------------------------------------------------------
