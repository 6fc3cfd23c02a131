//! Global model: fibers of C1 Hermite stations, the element table built
//! over them, dof numbering, supports, loads, and the contact
//! configuration, plus the state containers the solution drivers advance.
//!
//! # Dof layout
//!
//! Stations are numbered fiber by fiber.  Every station carries six
//! centerline dofs `[d, t]` (position and arc-length tangent), shared by
//! the two elements meeting there — that sharing is what makes the
//! discretization C1.  On Simo-Reissner fibers a station additionally
//! carries three rotation slots, and each element an interior rotation
//! node whose slots are numbered *between* its stations, so the global
//! numbering walks the fiber geometrically and element couplings stay
//! banded for contact-free problems.
//!
//! Rotation slots never hold accumulated values: triads live as matrices
//! in [`State::triads`] and are updated multiplicatively,
//! `Λ ← exp(Δθ) Λ`.  The slots only give rotation increments an address
//! in the linearized system; the corresponding entries of [`State::q`]
//! stay zero, which keeps the translational difference `q − qₙ` of a time
//! step meaningful over the full vector.

use fibril_contact::{ABCParams, PenaltyLaw, Segmentation};
use fibril_core::element::simo_reissner::{GpKinetics, SRDofs, SRElement};
use fibril_core::element::torsion_free::TFElement;
use fibril_core::element::{seed_frame, transported_triads};
use fibril_core::hermite::{CenterlineDofs, RefGeometry};
use fibril_core::section::SectionProperties;
use fibril_core::{so3, DVector, Mat3, Vec3};

use crate::SolveError;

// ---------------------------------------------------------------------------
// Building blocks

/// Element formulation used along one fiber.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FiberKind {
    /// Torsion-free centerline element: 12 dofs per element.
    TorsionFree,
    /// Simo-Reissner element with nodal triads; `reduced` selects the
    /// locking-free mixed quadrature (the default in practice).
    SimoReissner { reduced: bool },
}

/// Geometric and material description of one fiber to be meshed.
#[derive(Debug, Clone)]
pub struct FiberSpec {
    /// Station data in order along the fiber: position and *unit*
    /// arc-length tangent.  `n` stations produce `n − 1` elements.
    pub stations: Vec<(Vec3, Vec3)>,
    pub props: SectionProperties,
    /// Contact radius of the fiber surface.
    pub radius: f64,
}

/// Element formulation instance; owns the element together with its
/// reference geometry.
#[derive(Debug, Clone)]
pub enum ElementKind {
    TorsionFree(TFElement),
    SimoReissner(SRElement),
}

impl ElementKind {
    pub fn reference(&self) -> &RefGeometry {
        match self {
            ElementKind::TorsionFree(e) => e.reference(),
            ElementKind::SimoReissner(e) => e.reference(),
        }
    }
}

/// One meshed element with its global addresses.
#[derive(Debug, Clone)]
pub struct ElementRef {
    pub kind: ElementKind,
    pub fiber: usize,
    pub index_in_fiber: usize,
    /// Contact radius inherited from the fiber.
    pub radius: f64,
    /// Base centerline dof of the two end stations.
    pub(crate) stations: [usize; 2],
    /// Base rotation dof of [end ξ=−1, end ξ=+1, mid] (Simo-Reissner only).
    pub(crate) rot: Option<[usize; 3]>,
    /// Triad storage slots in the same order (Simo-Reissner only).
    pub(crate) triad_slots: Option<[usize; 3]>,
}

impl ElementRef {
    pub fn reference(&self) -> &RefGeometry {
        self.kind.reference()
    }

    /// Global dofs of the centerline block, in the pair/element order
    /// `[d¹ t¹ d² t²]`.
    pub fn cl_global_dofs(&self) -> [usize; 12] {
        let mut out = [0usize; 12];
        for n in 0..2 {
            for k in 0..6 {
                out[6 * n + k] = self.stations[n] + k;
            }
        }
        out
    }

    /// Global dofs in the element's local ordering: the torsion-free
    /// element is its centerline block; the Simo-Reissner element
    /// interleaves the rotation nodes as `[d¹ t¹ ψ¹ | d² t² ψ² | ψ³]`.
    pub fn global_dofs(&self) -> Vec<usize> {
        let cl = self.cl_global_dofs();
        match self.rot {
            None => cl.to_vec(),
            Some(r) => {
                let mut out = Vec::with_capacity(21);
                out.extend_from_slice(&cl[0..6]);
                out.extend((0..3).map(|k| r[0] + k));
                out.extend_from_slice(&cl[6..12]);
                out.extend((0..3).map(|k| r[1] + k));
                out.extend((0..3).map(|k| r[2] + k));
                out
            }
        }
    }

    pub fn ndof(&self) -> usize {
        if self.rot.is_some() {
            21
        } else {
            12
        }
    }
}

// ---------------------------------------------------------------------------
// Prescribed values, loads, contact configuration

/// Scalar path s ↦ value used for load factors and support motion.  The
/// step parameter `s` is pseudo-time for static continuation and physical
/// time for dynamics.
#[derive(Debug, Clone, PartialEq)]
pub enum Schedule {
    Constant(f64),
    /// Linear interpolation between `(s, value)` knots sorted by `s`;
    /// clamped to the first/last value outside the knot range.
    PiecewiseLinear(Vec<(f64, f64)>),
    /// `offset + amp·cos(omega·s + phase)` — one Cartesian component of a
    /// constant-rate circular path.
    Cosine {
        offset: f64,
        amp: f64,
        omega: f64,
        phase: f64,
    },
}

impl Schedule {
    pub fn value(&self, s: f64) -> f64 {
        match self {
            Schedule::Constant(c) => *c,
            Schedule::PiecewiseLinear(knots) => {
                assert!(!knots.is_empty(), "piecewise schedule needs knots");
                if s <= knots[0].0 {
                    return knots[0].1;
                }
                for w in knots.windows(2) {
                    let ((s0, v0), (s1, v1)) = (w[0], w[1]);
                    debug_assert!(s1 > s0, "schedule knots must increase");
                    if s <= s1 {
                        return v0 + (v1 - v0) * (s - s0) / (s1 - s0);
                    }
                }
                knots[knots.len() - 1].1
            }
            Schedule::Cosine {
                offset,
                amp,
                omega,
                phase,
            } => offset + amp * (omega * s + phase).cos(),
        }
    }
}

/// What a constrained dof does over the solution path.
#[derive(Debug, Clone)]
pub enum PrescribedValue {
    /// Keep the value the state had when the step began.  The only
    /// admissible constraint for rotation dofs (their triad is frozen).
    Hold,
    /// Follow `schedule(s)` as an absolute value.
    Path(Schedule),
}

/// One constrained dof.
#[derive(Debug, Clone)]
pub struct Dirichlet {
    pub dof: usize,
    pub value: PrescribedValue,
}

/// External loads.  All enter the residual on the external side (they are
/// subtracted), scaled by their schedule at the step parameter.
#[derive(Debug, Clone)]
pub enum Load {
    /// Concentrated force on a station's position dofs.
    NodalForce {
        fiber: usize,
        station: usize,
        force: Vec3,
        schedule: Schedule,
    },
    /// Concentrated spatial moment on a station's rotation dofs
    /// (Simo-Reissner fibers only; the rows are work-conjugate to the
    /// spatial spin, so a constant moment has no load stiffness).
    NodalMoment {
        fiber: usize,
        station: usize,
        moment: Vec3,
        schedule: Schedule,
    },
    /// Constant force per unit initial length over a whole fiber
    /// (dead load).
    Distributed {
        fiber: usize,
        force: Vec3,
        schedule: Schedule,
    },
}

/// Beam-to-beam contact formulation applied to every broadphase pair.
#[derive(Debug, Clone)]
pub enum ContactModel {
    None,
    /// One penalty force at the bilateral closest point per pair.
    Point { law: PenaltyLaw },
    /// Gauss-point line integral; each pair's lower element id integrates
    /// over its Gauss points against all its broadphase masters.
    Line { law: PenaltyLaw, seg: Segmentation },
    /// Angle-blended point/line formulation (all-angle contact).
    AllAngle { params: ABCParams, law: PenaltyLaw },
}

/// Newton tolerances and safeguards.
#[derive(Debug, Clone, Copy)]
pub struct SolverConfig {
    /// Euclidean norm bound on the free residual.
    pub tol_res: f64,
    /// Euclidean norm bound on the last applied increment.
    pub tol_disp: f64,
    /// Iteration budget per step.
    pub max_iter: usize,
    /// Cap on the per-iteration station *position* increment; the whole
    /// Newton direction is scaled down when the largest station move
    /// exceeds it.  Contact problems set this to about half the smallest
    /// fiber radius so a single iteration cannot tunnel through a
    /// neighbor; `INFINITY` disables the cap.
    pub du_max: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            tol_res: 1e-7,
            tol_disp: 1e-10,
            max_iter: 50,
            du_max: f64::INFINITY,
        }
    }
}

// ---------------------------------------------------------------------------
// State containers

/// Configuration of the whole model: dof values (rotation slots pinned at
/// zero) plus the triads of all rotation nodes.
#[derive(Debug, Clone)]
pub struct State {
    pub q: DVector<f64>,
    pub triads: Vec<Mat3>,
}

/// Kinetic history of a dynamic simulation: global translational rates
/// (rotation slots zero) and the per-element rotational Gauss point
/// history of Simo-Reissner elements (empty vectors for torsion-free
/// elements, which carry translational inertia only).
#[derive(Debug, Clone)]
pub struct Kinetics {
    pub vel: DVector<f64>,
    pub acc: DVector<f64>,
    pub alg: DVector<f64>,
    pub gp: Vec<Vec<GpKinetics>>,
}

// ---------------------------------------------------------------------------
// The model

#[derive(Debug, Clone)]
struct FiberData {
    kind: FiberKind,
    radius: f64,
    /// Base centerline dof of each station.
    stations: Vec<usize>,
    /// Base rotation dof of each station (Simo-Reissner fibers).
    station_rot: Vec<Option<usize>>,
    /// Global element ids in order along the fiber.
    elements: Vec<usize>,
}

/// Assembled description of the structure.  Built once; the solvers treat
/// it as immutable.
#[derive(Debug, Clone)]
pub struct Model {
    fibers: Vec<FiberData>,
    elements: Vec<ElementRef>,
    n_dofs: usize,
    n_triads: usize,
    is_rotation: Vec<bool>,
    /// (base rotation dof, triad slot) of every rotation node.
    triad_updates: Vec<(usize, usize)>,
    q0: DVector<f64>,
    triads0: Vec<Mat3>,
    dirichlet: Vec<Dirichlet>,
    loads: Vec<Load>,
    contact: ContactModel,
    /// Broadphase inflation: boxes grow by half of this on each side, so
    /// two elements are candidates when their surfaces come within this
    /// distance.  Must cover the penalty activation gap plus the motion
    /// of one step.
    search_margin: f64,
}

impl Default for Model {
    fn default() -> Self {
        Self::new()
    }
}

impl Model {
    pub fn new() -> Self {
        Model {
            fibers: Vec::new(),
            elements: Vec::new(),
            n_dofs: 0,
            n_triads: 0,
            is_rotation: Vec::new(),
            triad_updates: Vec::new(),
            q0: DVector::zeros(0),
            triads0: Vec::new(),
            dirichlet: Vec::new(),
            loads: Vec::new(),
            contact: ContactModel::None,
            search_margin: 0.0,
        }
    }

    /// Mesh one fiber and append its stations, elements, and dofs.
    /// Returns the fiber id.
    pub fn add_fiber(&mut self, spec: &FiberSpec, kind: FiberKind) -> Result<usize, SolveError> {
        assert!(
            spec.stations.len() >= 2,
            "a fiber needs at least two stations, got {}",
            spec.stations.len()
        );
        let n_s = spec.stations.len();
        let is_sr = matches!(kind, FiberKind::SimoReissner { .. });

        // Number the dofs station-major with mid rotation nodes between
        // their stations.
        let mut stations = Vec::with_capacity(n_s);
        let mut station_rot = Vec::with_capacity(n_s);
        let mut mid_rot = Vec::with_capacity(n_s.saturating_sub(1));
        let mut station_slot = Vec::with_capacity(n_s);
        let mut mid_slot = Vec::with_capacity(n_s.saturating_sub(1));
        for s in 0..n_s {
            stations.push(self.n_dofs);
            self.n_dofs += 6;
            self.is_rotation.extend([false; 6]);
            if is_sr {
                station_rot.push(Some(self.n_dofs));
                station_slot.push(self.n_triads);
                self.triad_updates.push((self.n_dofs, self.n_triads));
                self.n_dofs += 3;
                self.n_triads += 1;
                self.is_rotation.extend([true; 3]);
                if s + 1 < n_s {
                    mid_rot.push(self.n_dofs);
                    mid_slot.push(self.n_triads);
                    self.triad_updates.push((self.n_dofs, self.n_triads));
                    self.n_dofs += 3;
                    self.n_triads += 1;
                    self.is_rotation.extend([true; 3]);
                }
            } else {
                station_rot.push(None);
            }
        }

        // Initial dof values.
        self.q0 = {
            let mut q = DVector::zeros(self.n_dofs);
            q.rows_mut(0, self.q0.len()).copy_from(&self.q0);
            q
        };
        for (s, (d, t)) in spec.stations.iter().enumerate() {
            let base = stations[s];
            for k in 0..3 {
                self.q0[base + k] = d[k];
                self.q0[base + 3 + k] = t[k];
            }
        }
        if is_sr {
            self.triads0.resize(self.n_triads, Mat3::identity());
        }

        // Elements, with triad transport chained along the fiber.
        let fiber_id = self.fibers.len();
        let mut element_ids = Vec::with_capacity(n_s - 1);
        let mut entry = seed_frame(&spec.stations[0].1);
        for i in 0..n_s - 1 {
            let (d1, t1) = spec.stations[i];
            let (d2, t2) = spec.stations[i + 1];
            let geo = RefGeometry::new(CenterlineDofs::new(d1, t1, d2, t2), None)?;
            let (kind_e, rot, slots) = match kind {
                FiberKind::TorsionFree => (
                    ElementKind::TorsionFree(TFElement::new(geo, spec.props)),
                    None,
                    None,
                ),
                FiberKind::SimoReissner { reduced } => {
                    let (tris, exit) = transported_triads(&geo, &entry);
                    entry = exit;
                    let slots = [station_slot[i], station_slot[i + 1], mid_slot[i]];
                    for (k, &slot) in slots.iter().enumerate() {
                        self.triads0[slot] = tris[k];
                    }
                    (
                        ElementKind::SimoReissner(SRElement::new(geo, spec.props, tris, reduced)?),
                        Some([
                            station_rot[i].unwrap(),
                            station_rot[i + 1].unwrap(),
                            mid_rot[i],
                        ]),
                        Some(slots),
                    )
                }
            };
            element_ids.push(self.elements.len());
            self.elements.push(ElementRef {
                kind: kind_e,
                fiber: fiber_id,
                index_in_fiber: i,
                radius: spec.radius,
                stations: [stations[i], stations[i + 1]],
                rot,
                triad_slots: slots,
            });
        }

        self.fibers.push(FiberData {
            kind,
            radius: spec.radius,
            stations,
            station_rot,
            elements: element_ids,
        });
        Ok(fiber_id)
    }

    /// Constrain one dof.  Rotation dofs admit only
    /// [`PrescribedValue::Hold`].
    pub fn add_dirichlet(&mut self, dof: usize, value: PrescribedValue) {
        assert!(dof < self.n_dofs, "dof {dof} out of range {}", self.n_dofs);
        assert!(
            !self.dirichlet.iter().any(|d| d.dof == dof),
            "dof {dof} is already constrained"
        );
        if self.is_rotation[dof] {
            assert!(
                matches!(value, PrescribedValue::Hold),
                "rotation dofs can only be held, not driven along a path"
            );
        }
        self.dirichlet.push(Dirichlet { dof, value });
    }

    pub fn add_load(&mut self, load: Load) {
        match &load {
            Load::NodalForce { fiber, station, .. } => {
                assert!(*station < self.fibers[*fiber].stations.len());
            }
            Load::NodalMoment { fiber, station, .. } => {
                assert!(*station < self.fibers[*fiber].stations.len());
                assert!(
                    self.fibers[*fiber].station_rot[*station].is_some(),
                    "nodal moments need a fiber with rotation dofs"
                );
            }
            Load::Distributed { fiber, .. } => {
                assert!(*fiber < self.fibers.len());
            }
        }
        self.loads.push(load);
    }

    pub fn set_contact(&mut self, model: ContactModel, search_margin: f64) {
        assert!(search_margin >= 0.0);
        self.contact = model;
        self.search_margin = search_margin;
    }

    // -- accessors ---------------------------------------------------------

    pub fn n_dofs(&self) -> usize {
        self.n_dofs
    }

    pub fn elements(&self) -> &[ElementRef] {
        &self.elements
    }

    pub fn fiber_count(&self) -> usize {
        self.fibers.len()
    }

    pub fn fiber_kind(&self, fiber: usize) -> FiberKind {
        self.fibers[fiber].kind
    }

    pub fn fiber_radius(&self, fiber: usize) -> f64 {
        self.fibers[fiber].radius
    }

    pub fn fiber_elements(&self, fiber: usize) -> &[usize] {
        &self.fibers[fiber].elements
    }

    pub fn station_count(&self, fiber: usize) -> usize {
        self.fibers[fiber].stations.len()
    }

    /// Base of the six centerline dofs of a station.
    pub fn station_dof(&self, fiber: usize, station: usize) -> usize {
        self.fibers[fiber].stations[station]
    }

    /// Base of a station's three rotation dofs, when the fiber has them.
    pub fn station_rot_dof(&self, fiber: usize, station: usize) -> Option<usize> {
        self.fibers[fiber].station_rot[station]
    }

    pub fn is_rotation_dof(&self, dof: usize) -> bool {
        self.is_rotation[dof]
    }

    pub fn dirichlet(&self) -> &[Dirichlet] {
        &self.dirichlet
    }

    pub fn loads(&self) -> &[Load] {
        &self.loads
    }

    pub fn contact(&self) -> &ContactModel {
        &self.contact
    }

    pub fn search_margin(&self) -> f64 {
        self.search_margin
    }

    // -- state handling ----------------------------------------------------

    pub fn initial_state(&self) -> State {
        State {
            q: self.q0.clone(),
            triads: self.triads0.clone(),
        }
    }

    /// All-zero rates and resting rotational histories at `state`.
    pub fn resting_kinetics(&self, state: &State) -> Result<Kinetics, SolveError> {
        let mut gp = Vec::with_capacity(self.elements.len());
        for (e, el) in self.elements.iter().enumerate() {
            match &el.kind {
                ElementKind::TorsionFree(_) => gp.push(Vec::new()),
                ElementKind::SimoReissner(sr) => {
                    gp.push(sr.resting_kinetics(&self.element_sr_dofs(state, e))?)
                }
            }
        }
        Ok(Kinetics {
            vel: DVector::zeros(self.n_dofs),
            acc: DVector::zeros(self.n_dofs),
            alg: DVector::zeros(self.n_dofs),
            gp,
        })
    }

    /// Centerline dofs of one element read out of the state.
    pub fn element_cl(&self, state: &State, element: usize) -> CenterlineDofs {
        let el = &self.elements[element];
        let v = |base: usize| Vec3::new(state.q[base], state.q[base + 1], state.q[base + 2]);
        CenterlineDofs::new(
            v(el.stations[0]),
            v(el.stations[0] + 3),
            v(el.stations[1]),
            v(el.stations[1] + 3),
        )
    }

    /// Full Simo-Reissner element state (panics on torsion-free elements).
    pub fn element_sr_dofs(&self, state: &State, element: usize) -> SRDofs {
        let el = &self.elements[element];
        let slots = el
            .triad_slots
            .expect("element has no rotation nodes");
        SRDofs {
            centerline: self.element_cl(state, element),
            triads: [
                state.triads[slots[0]],
                state.triads[slots[1]],
                state.triads[slots[2]],
            ],
        }
    }

    pub fn station_position(&self, state: &State, fiber: usize, station: usize) -> Vec3 {
        let b = self.station_dof(fiber, station);
        Vec3::new(state.q[b], state.q[b + 1], state.q[b + 2])
    }

    pub fn station_tangent(&self, state: &State, fiber: usize, station: usize) -> Vec3 {
        let b = self.station_dof(fiber, station) + 3;
        Vec3::new(state.q[b], state.q[b + 1], state.q[b + 2])
    }

    /// Apply a full-length increment: additive on translational dofs,
    /// multiplicative (left exponential) on the triads addressed by
    /// rotation slots.  Rotation entries of `q` stay zero.
    pub fn apply_increment(&self, state: &mut State, dx: &DVector<f64>) {
        assert_eq!(dx.len(), self.n_dofs);
        for i in 0..self.n_dofs {
            if !self.is_rotation[i] {
                state.q[i] += dx[i];
            }
        }
        for &(base, slot) in &self.triad_updates {
            let spin = Vec3::new(dx[base], dx[base + 1], dx[base + 2]);
            if spin != Vec3::zeros() {
                state.triads[slot] = so3::exp(&spin) * state.triads[slot];
            }
        }
    }

    /// Write prescribed path values at step parameter `s` into the state.
    /// `Hold` constraints keep whatever the state carries.
    pub fn apply_dirichlet(&self, state: &mut State, s: f64) {
        for d in &self.dirichlet {
            if let PrescribedValue::Path(sched) = &d.value {
                state.q[d.dof] = sched.value(s);
            }
        }
    }

    /// Largest station position move contained in a full-length increment
    /// (the quantity the Newton cap limits).
    pub fn max_station_translation(&self, dx: &DVector<f64>) -> f64 {
        let mut mx = 0.0_f64;
        for f in &self.fibers {
            for &base in &f.stations {
                let n = Vec3::new(dx[base], dx[base + 1], dx[base + 2]).norm();
                mx = mx.max(n);
            }
        }
        mx
    }

    // -- energies ----------------------------------------------------------

    /// Total stored elastic energy of all elements.
    pub fn internal_energy(&self, state: &State) -> Result<f64, SolveError> {
        let mut e_tot = 0.0;
        for (e, el) in self.elements.iter().enumerate() {
            e_tot += match &el.kind {
                ElementKind::TorsionFree(tf) => tf.internal_energy(&self.element_cl(state, e))?,
                ElementKind::SimoReissner(sr) => {
                    sr.internal_energy(&self.element_sr_dofs(state, e))?
                }
            };
        }
        Ok(e_tot)
    }

    /// Total kinetic energy at the given rates: translational via the
    /// element mass operators, rotational via the triads and angular
    /// velocities stored in the Gauss point history (which is why no
    /// configuration argument is needed).
    pub fn kinetic_energy(&self, kin: &Kinetics) -> f64 {
        let mut e_tot = 0.0;
        for (e, el) in self.elements.iter().enumerate() {
            let cl = el.cl_global_dofs();
            let mut v = nalgebra::SVector::<f64, 12>::zeros();
            for (k, &g) in cl.iter().enumerate() {
                v[k] = kin.vel[g];
            }
            e_tot += match &el.kind {
                ElementKind::TorsionFree(tf) => 0.5 * v.dot(&(tf.mass_matrix() * v)),
                ElementKind::SimoReissner(sr) => sr.kinetic_energy(&v, &kin.gp[e]),
            };
        }
        e_tot
    }
}

// ---------------------------------------------------------------------------
// Free/constrained partition

/// Splits the global dofs into the solved (free) set and the constrained
/// set.  Free dofs keep their global order, so reduction and scatter are
/// stable and the reduced system is deterministic.
#[derive(Debug, Clone)]
pub struct DofPartition {
    pub free: Vec<usize>,
    pub constrained: Vec<usize>,
    /// Global dof → index into `free`, `None` when constrained.
    pub free_index: Vec<Option<usize>>,
}

impl DofPartition {
    pub fn new(model: &Model) -> Self {
        let n = model.n_dofs();
        let mut constrained_mask = vec![false; n];
        for d in model.dirichlet() {
            constrained_mask[d.dof] = true;
        }
        let mut free = Vec::with_capacity(n);
        let mut constrained = Vec::new();
        let mut free_index = vec![None; n];
        for (i, &c) in constrained_mask.iter().enumerate() {
            if c {
                constrained.push(i);
            } else {
                free_index[i] = Some(free.len());
                free.push(i);
            }
        }
        DofPartition {
            free,
            constrained,
            free_index,
        }
    }

    pub fn n_free(&self) -> usize {
        self.free.len()
    }

    /// Pick the free entries out of a full-length vector.
    pub fn restrict(&self, full: &DVector<f64>) -> DVector<f64> {
        DVector::from_iterator(self.free.len(), self.free.iter().map(|&i| full[i]))
    }

    /// Spread a reduced vector back to full length, zeros at constrained
    /// dofs.
    pub fn scatter(&self, reduced: &DVector<f64>) -> DVector<f64> {
        let mut full = DVector::zeros(self.free_index.len());
        for (k, &i) in self.free.iter().enumerate() {
            full[i] = reduced[k];
        }
        full
    }
}

// ---------------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;
    use fibril_core::section::{CrossSection, Material};

    fn props() -> SectionProperties {
        SectionProperties::new(CrossSection::circle(0.1), Material::new(1e7, 5e6, 1.0))
    }

    fn straight_spec(n_stations: usize, length: f64) -> FiberSpec {
        let stations = (0..n_stations)
            .map(|i| {
                let s = length * i as f64 / (n_stations - 1) as f64;
                (Vec3::new(s, 0.0, 0.0), Vec3::x())
            })
            .collect();
        FiberSpec {
            stations,
            props: props(),
            radius: 0.1,
        }
    }

    #[test]
    fn torsion_free_dof_layout_is_station_major() {
        let mut m = Model::new();
        m.add_fiber(&straight_spec(3, 2.0), FiberKind::TorsionFree)
            .unwrap();
        assert_eq!(m.n_dofs(), 18);
        assert_eq!(m.elements().len(), 2);
        assert_eq!(
            m.elements()[0].global_dofs(),
            (0..12).collect::<Vec<_>>(),
            "first element owns the first two stations"
        );
        assert_eq!(
            m.elements()[1].global_dofs(),
            (6..18).collect::<Vec<_>>(),
            "second element shares station 1 and extends to station 2"
        );
        assert!((0..18).all(|i| !m.is_rotation_dof(i)));
    }

    #[test]
    fn simo_reissner_layout_interleaves_rotation_nodes() {
        let mut m = Model::new();
        m.add_fiber(
            &straight_spec(3, 2.0),
            FiberKind::SimoReissner { reduced: true },
        )
        .unwrap();
        // Two stations of 9, one mid of 3 per element: 3·9 + 2·3 = 33.
        assert_eq!(m.n_dofs(), 33);
        // Station 0 cl at 0..6, rot at 6..9; mid 0 at 9..12; station 1 cl
        // at 12..18.
        assert_eq!(m.station_dof(0, 0), 0);
        assert_eq!(m.station_rot_dof(0, 0), Some(6));
        assert_eq!(m.station_dof(0, 1), 12);
        assert_eq!(m.station_rot_dof(0, 1), Some(18));
        let el0 = &m.elements()[0];
        let mut expected = Vec::new();
        expected.extend(0..6); // d¹ t¹
        expected.extend(6..9); // ψ¹
        expected.extend(12..18); // d² t²
        expected.extend(18..21); // ψ²
        expected.extend(9..12); // ψ³ (mid, numbered between its stations)
        assert_eq!(el0.global_dofs(), expected);
        // Rotation flags exactly on the rotation slots.
        let rot: Vec<usize> = (0..33).filter(|&i| m.is_rotation_dof(i)).collect();
        assert_eq!(rot, vec![6, 7, 8, 9, 10, 11, 18, 19, 20, 21, 22, 23, 30, 31, 32]);
    }

    #[test]
    fn initial_state_reproduces_stations_and_is_strain_free() {
        let mut m = Model::new();
        // A gently curved fiber: quarter-ish arc sampled at three stations.
        let spec = FiberSpec {
            stations: vec![
                (Vec3::new(1.0, 0.0, 0.0), Vec3::new(0.0, 1.0, 0.0)),
                (
                    Vec3::new(0.7071067811865476, 0.7071067811865476, 0.0),
                    Vec3::new(-0.7071067811865476, 0.7071067811865476, 0.0),
                ),
                (Vec3::new(0.0, 1.0, 0.0), Vec3::new(-1.0, 0.0, 0.0)),
            ],
            props: props(),
            radius: 0.05,
        };
        m.add_fiber(&spec, FiberKind::SimoReissner { reduced: true })
            .unwrap();
        let st = m.initial_state();
        assert_eq!(m.station_position(&st, 0, 1), spec.stations[1].0);
        assert_eq!(m.station_tangent(&st, 0, 2), spec.stations[2].1);
        for (e, el) in m.elements().iter().enumerate() {
            let ElementKind::SimoReissner(sr) = &el.kind else {
                unreachable!()
            };
            let dofs = m.element_sr_dofs(&st, e);
            for xi in [-0.9, 0.0, 0.9] {
                let (gamma, omega) = sr.strains(&dofs, xi).unwrap();
                assert!(
                    gamma.norm() < 1e-12 && omega.norm() < 1e-12,
                    "initial strains must vanish, got gamma={gamma:?} omega={omega:?}"
                );
            }
        }
    }

    #[test]
    fn shared_station_triads_are_consistent_between_elements() {
        let mut m = Model::new();
        let spec = FiberSpec {
            stations: vec![
                (Vec3::new(0.0, 0.0, 0.0), Vec3::x()),
                (
                    Vec3::new(1.0, 0.2, 0.1),
                    Vec3::new(1.0, 0.2, 0.3).normalize(),
                ),
                (Vec3::new(2.0, 0.1, 0.5), Vec3::new(1.0, 0.0, 0.1).normalize()),
            ],
            props: props(),
            radius: 0.05,
        };
        m.add_fiber(&spec, FiberKind::SimoReissner { reduced: true })
            .unwrap();
        let st = m.initial_state();
        // The shared station triad equals both elements' view of it.
        let d0 = m.element_sr_dofs(&st, 0);
        let d1 = m.element_sr_dofs(&st, 1);
        assert!((d0.triads[1] - d1.triads[0]).norm() == 0.0);
        // And the state triads are proper rotations matching each element's
        // internal reference to transport accuracy.
        for (e, el) in m.elements().iter().enumerate() {
            let ElementKind::SimoReissner(sr) = &el.kind else {
                unreachable!()
            };
            let dofs = m.element_sr_dofs(&st, e);
            for k in 0..3 {
                assert!(
                    (dofs.triads[k] - sr.initial_triads()[k]).norm() < 1e-12,
                    "element {e} triad {k} deviates from its chained transport"
                );
            }
        }
    }

    #[test]
    fn apply_increment_is_additive_on_centerline_multiplicative_on_triads() {
        let mut m = Model::new();
        m.add_fiber(
            &straight_spec(2, 1.0),
            FiberKind::SimoReissner { reduced: true },
        )
        .unwrap();
        let mut st = m.initial_state();
        // Slot allocation for a two-station fiber: station 0, the mid
        // node, then station 1.
        let before = st.triads[2];
        let mut dx = DVector::zeros(m.n_dofs());
        dx[0] = 0.25; // d¹x
        let spin = Vec3::new(0.0, 0.0, 0.3);
        let rot_base = m.station_rot_dof(0, 1).unwrap();
        for k in 0..3 {
            dx[rot_base + k] = spin[k];
        }
        m.apply_increment(&mut st, &dx);
        assert_eq!(st.q[0], 0.25);
        assert_eq!(
            st.q[rot_base], 0.0,
            "rotation slots of q must stay zero; triads carry the update"
        );
        assert!((st.triads[2] - so3::exp(&spin) * before).norm() < 1e-15);
        assert_eq!(st.triads[0], m.initial_state().triads[0]);
        assert_eq!(st.triads[1], m.initial_state().triads[1]);
    }

    #[test]
    fn schedules_interpolate_and_clamp() {
        let s = Schedule::PiecewiseLinear(vec![(0.0, 0.0), (1.0, 250.0), (2.0, 0.0), (3.0, -200.0)]);
        assert_eq!(s.value(-1.0), 0.0);
        assert_eq!(s.value(0.5), 125.0);
        assert_eq!(s.value(1.0), 250.0);
        assert_eq!(s.value(1.5), 125.0);
        assert_eq!(s.value(2.5), -100.0);
        assert_eq!(s.value(9.0), -200.0, "clamps to the last knot");
        let c = Schedule::Cosine {
            offset: 1.0,
            amp: 2.0,
            omega: std::f64::consts::PI,
            phase: 0.0,
        };
        assert!((c.value(0.0) - 3.0).abs() < 1e-15);
        assert!((c.value(1.0) + 1.0).abs() < 1e-14);
    }

    #[test]
    fn partition_restrict_and_scatter_are_inverse_on_free_dofs() {
        let mut m = Model::new();
        m.add_fiber(&straight_spec(3, 2.0), FiberKind::TorsionFree)
            .unwrap();
        for k in 0..6 {
            m.add_dirichlet(k, PrescribedValue::Hold);
        }
        m.add_dirichlet(
            12,
            PrescribedValue::Path(Schedule::Constant(7.0)),
        );
        let p = DofPartition::new(&m);
        assert_eq!(p.n_free(), 11);
        assert_eq!(p.constrained, vec![0, 1, 2, 3, 4, 5, 12]);
        let full = DVector::from_fn(18, |i, _| i as f64);
        let red = p.restrict(&full);
        assert_eq!(red.len(), 11);
        let back = p.scatter(&red);
        for i in 0..18 {
            let expect = if p.free_index[i].is_some() { full[i] } else { 0.0 };
            assert_eq!(back[i], expect);
        }
    }

    #[test]
    fn held_rotation_dofs_are_the_only_admissible_rotation_constraint() {
        let mut m = Model::new();
        m.add_fiber(
            &straight_spec(2, 1.0),
            FiberKind::SimoReissner { reduced: true },
        )
        .unwrap();
        m.add_dirichlet(6, PrescribedValue::Hold); // ψ¹x: fine
        let r = std::panic::catch_unwind(std::panic::AssertUnwindSafe(|| {
            let mut m2 = m.clone();
            m2.add_dirichlet(7, PrescribedValue::Path(Schedule::Constant(1.0)));
        }));
        assert!(r.is_err(), "path constraints on rotation dofs must be rejected");
    }
}
