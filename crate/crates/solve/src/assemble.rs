//! Deterministic assembly of the global residual and consistent tangent.
//!
//! The residual is written on the internal-force side:
//!
//! ```text
//! R(q) = R_internal(q) + R_inertia(q) + R_contact(q) − R_external(s)
//! ```
//!
//! so a converged step has `R = 0` on free dofs, and the residual entries
//! at constrained dofs are the support reactions acting on the structure.
//!
//! Every loop runs in a fixed order keyed by element and pair ids, and the
//! tangent is accumulated as an ordered triplet list — two assemblies of
//! the same state produce bitwise identical results, which the stepping
//! protocols rely on for reproducibility.

use fibril_contact::{
    broadphase_search, element_aabb, line_contact_contribution, point_contact_contribution,
    abc_contribution, BroadItem, ContactContribution, CurveRef,
};
use fibril_core::timeint::{advance_rate_vectors, GenAlpha};
use fibril_core::DVector;
use nalgebra::SVector;

use crate::model::{ContactModel, ElementKind, Kinetics, Load, Model, State};
use crate::SolveError;

/// Inputs that turn a static assembly into the end-of-step dynamic one.
/// `q_n` and `kin_n` are the converged configuration and kinetic history
/// of the previous step; the integrator recursion turns the current trial
/// `q` into effective accelerations with `∂(acc)/∂q = accel_gain`.
#[derive(Debug, Clone, Copy)]
pub struct DynamicContext<'a> {
    pub params: &'a GenAlpha,
    pub dt: f64,
    pub q_n: &'a DVector<f64>,
    pub kin_n: &'a Kinetics,
}

/// Contact bookkeeping of one assembly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContactStats {
    /// Number of force-transmitting evaluation points.
    pub active_points: usize,
    /// Smallest surface gap seen among them (negative = penetration).
    pub min_gap: Option<f64>,
    /// Total stored penalty energy; `None` when any contribution is
    /// non-conservative (force-blended all-angle contact).
    pub potential: Option<f64>,
}

/// Assembled residual, optional tangent triplets, and contact statistics.
#[derive(Debug, Clone)]
pub struct Assembly {
    pub residual: DVector<f64>,
    /// `(row, col, value)` entries of the full-space tangent, in assembly
    /// order; duplicates add.
    pub triplets: Option<Vec<(usize, usize, f64)>>,
    pub stats: ContactStats,
}

fn scatter_vec(residual: &mut DVector<f64>, gather: &[usize], local: &[f64]) {
    for (k, &g) in gather.iter().enumerate() {
        residual[g] += local[k];
    }
}

fn scatter_matrix<M>(trip: &mut Vec<(usize, usize, f64)>, gather: &[usize], m: &M)
where
    M: std::ops::Index<(usize, usize), Output = f64>,
{
    let n = gather.len();
    for r in 0..n {
        for c in 0..n {
            let v = m[(r, c)];
            if v != 0.0 {
                trip.push((gather[r], gather[c], v));
            }
        }
    }
}

/// Assemble residual (and tangent when `want_stiffness`) of `state` at
/// step parameter `s`; `dynamic` adds the inertia terms of one
/// generalized-alpha step ending at `state`.
pub fn assemble(
    model: &Model,
    state: &State,
    s: f64,
    dynamic: Option<&DynamicContext>,
    want_stiffness: bool,
) -> Result<Assembly, SolveError> {
    let n = model.n_dofs();
    let mut residual = DVector::zeros(n);
    let mut triplets = want_stiffness.then(Vec::new);

    // Effective accelerations of the trial state, once for all elements.
    let rates = dynamic.map(|d| {
        let delta = &state.q - d.q_n;
        advance_rate_vectors(d.params, d.dt, &delta, &d.kin_n.vel, &d.kin_n.acc, &d.kin_n.alg)
    });

    for (e, el) in model.elements().iter().enumerate() {
        match &el.kind {
            ElementKind::TorsionFree(tf) => {
                let cl = model.element_cl(state, e);
                let gather = el.cl_global_dofs();
                let (res, stiff) = tf.internal_forces(&cl, want_stiffness)?;
                scatter_vec(&mut residual, &gather, res.as_slice());
                if let (Some(t), Some(k)) = (triplets.as_mut(), stiff.as_ref()) {
                    scatter_matrix(t, &gather, k);
                }
                if let (Some(d), Some(r)) = (dynamic, rates.as_ref()) {
                    let mut acc = SVector::<f64, 12>::zeros();
                    for (k, &g) in gather.iter().enumerate() {
                        acc[k] = r.acc[g];
                    }
                    let m = tf.mass_matrix();
                    let f: SVector<f64, 12> = m * acc;
                    scatter_vec(&mut residual, &gather, f.as_slice());
                    if let Some(t) = triplets.as_mut() {
                        let km = d.params.accel_gain(d.dt) * m;
                        scatter_matrix(t, &gather, &km);
                    }
                }
            }
            ElementKind::SimoReissner(sr) => {
                let dofs = model.element_sr_dofs(state, e);
                let gather = el.global_dofs();
                let (res, stiff) = sr.internal_forces(&dofs, want_stiffness)?;
                scatter_vec(&mut residual, &gather, res.as_slice());
                if let (Some(t), Some(k)) = (triplets.as_mut(), stiff.as_ref()) {
                    scatter_matrix(t, &gather, k);
                }
                if let (Some(d), Some(r)) = (dynamic, rates.as_ref()) {
                    let clg = el.cl_global_dofs();
                    let mut acc = SVector::<f64, 12>::zeros();
                    for (k, &g) in clg.iter().enumerate() {
                        acc[k] = r.acc[g];
                    }
                    let (res_i, stiff_i) =
                        sr.inertia_forces(&dofs, &acc, &d.kin_n.gp[e], d.params, d.dt, want_stiffness)?;
                    scatter_vec(&mut residual, &gather, res_i.as_slice());
                    if let (Some(t), Some(k)) = (triplets.as_mut(), stiff_i.as_ref()) {
                        scatter_matrix(t, &gather, k);
                    }
                }
            }
        }
    }

    // External loads at the step parameter (end-of-step values).
    for load in model.loads() {
        match load {
            Load::NodalForce {
                fiber,
                station,
                force,
                schedule,
            } => {
                let v = schedule.value(s);
                let base = model.station_dof(*fiber, *station);
                for k in 0..3 {
                    residual[base + k] -= v * force[k];
                }
            }
            Load::NodalMoment {
                fiber,
                station,
                moment,
                schedule,
            } => {
                let v = schedule.value(s);
                let base = model
                    .station_rot_dof(*fiber, *station)
                    .expect("moment loads are validated at insertion");
                for k in 0..3 {
                    residual[base + k] -= v * moment[k];
                }
            }
            Load::Distributed {
                fiber,
                force,
                schedule,
            } => {
                let f = schedule.value(s) * force;
                for &e in model.fiber_elements(*fiber) {
                    let el = &model.elements()[e];
                    match &el.kind {
                        ElementKind::TorsionFree(tf) => {
                            let load_vec = tf.distributed_force_load(&f);
                            let gather = el.cl_global_dofs();
                            for (k, &g) in gather.iter().enumerate() {
                                residual[g] -= load_vec[k];
                            }
                        }
                        ElementKind::SimoReissner(sr) => {
                            let load_vec = sr.distributed_force_load(&f);
                            let gather = el.global_dofs();
                            for (k, &g) in gather.iter().enumerate() {
                                residual[g] -= load_vec[k];
                            }
                        }
                    }
                }
            }
        }
    }

    // Contact.
    let mut stats = ContactStats {
        active_points: 0,
        min_gap: None,
        potential: Some(0.0),
    };
    {
        let elements = model.elements();
        visit_contact(model, state, want_stiffness, |slave, master, c| {
            let ga = elements[slave].cl_global_dofs();
            let gb = elements[master].cl_global_dofs();
            let map = |k: usize| if k < 12 { ga[k] } else { gb[k - 12] };
            for k in 0..24 {
                residual[map(k)] += c.res[k];
            }
            if let Some(t) = triplets.as_mut() {
                let st = c
                    .stiff
                    .expect("stiffness requested from contact contribution");
                for r in 0..24 {
                    for cc in 0..24 {
                        let v = st[(r, cc)];
                        if v != 0.0 {
                            t.push((map(r), map(cc), v));
                        }
                    }
                }
            }
            for rec in &c.records {
                stats.active_points += 1;
                stats.min_gap = Some(match stats.min_gap {
                    Some(g) => g.min(rec.gap),
                    None => rec.gap,
                });
            }
            stats.potential = match (stats.potential, c.potential) {
                (Some(a), Some(b)) => Some(a + b),
                _ => None,
            };
        })?;
    }

    Ok(Assembly {
        residual,
        triplets,
        stats,
    })
}

/// Run the configured contact formulation over all broadphase pairs and
/// hand each 24-dof contribution to `sink(slave, master, contribution)`.
/// Pair order is deterministic (sorted by ids); line contact groups each
/// slave's masters into one multi-master call so every slave Gauss point
/// is counted against exactly one master.
pub fn visit_contact<F>(
    model: &Model,
    state: &State,
    want_stiffness: bool,
    mut sink: F,
) -> Result<(), SolveError>
where
    F: FnMut(usize, usize, ContactContribution),
{
    if matches!(model.contact(), ContactModel::None) {
        return Ok(());
    }
    let elements = model.elements();
    let cls: Vec<_> = (0..elements.len())
        .map(|e| model.element_cl(state, e))
        .collect();
    let curve = |e: usize| CurveRef::new(elements[e].reference(), &cls[e]);

    let items: Vec<BroadItem> = elements
        .iter()
        .enumerate()
        .map(|(e, el)| BroadItem {
            id: e,
            fiber: el.fiber,
            element_in_fiber: el.index_in_fiber,
            aabb: element_aabb(&curve(e), el.radius, model.search_margin()),
        })
        .collect();
    let pairs = broadphase_search(&items);

    match model.contact() {
        ContactModel::None => {}
        ContactModel::Point { law } => {
            for &(a, b) in &pairs {
                let c = point_contact_contribution(
                    &curve(a),
                    elements[a].radius,
                    &curve(b),
                    elements[b].radius,
                    law,
                    want_stiffness,
                )?;
                sink(a, b, c);
            }
        }
        ContactModel::AllAngle { params, law } => {
            for &(a, b) in &pairs {
                let c = abc_contribution(
                    &curve(a),
                    elements[a].radius,
                    &curve(b),
                    elements[b].radius,
                    params,
                    law,
                    want_stiffness,
                )?;
                sink(a, b, c);
            }
        }
        ContactModel::Line { law, seg } => {
            let mut i = 0;
            while i < pairs.len() {
                let a = pairs[i].0;
                let mut j = i;
                while j < pairs.len() && pairs[j].0 == a {
                    j += 1;
                }
                let masters: Vec<(CurveRef, f64)> = pairs[i..j]
                    .iter()
                    .map(|&(_, b)| (curve(b), elements[b].radius))
                    .collect();
                let contributions = line_contact_contribution(
                    &curve(a),
                    elements[a].radius,
                    &masters,
                    law,
                    seg,
                    want_stiffness,
                )?;
                for (k, c) in contributions.into_iter().enumerate() {
                    sink(a, pairs[i + k].1, c);
                }
                i = j;
            }
        }
    }
    Ok(())
}

/// All pair contributions at a state, for diagnostics and invariant tests
/// (per-pair forces, gaps, stored energy).
pub fn contact_contributions(
    model: &Model,
    state: &State,
    want_stiffness: bool,
) -> Result<Vec<(usize, usize, ContactContribution)>, SolveError> {
    let mut out = Vec::new();
    visit_contact(model, state, want_stiffness, |a, b, c| out.push((a, b, c)))?;
    Ok(out)
}

// ---------------------------------------------------------------------------
