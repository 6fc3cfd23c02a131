//! Contact contributions between one slave and one master element.
//!
//! Every routine returns the pair's addition to the *residual* of the
//! assembled equilibrium system (internal-force side) over the 24 stacked
//! dofs `[slave d₁ t₁ d₂ t₂ | master d₁ t₁ d₂ t₂]`, together with the
//! consistent tangent ∂res/∂u.  The physical force on a beam is the
//! negative of its residual block: a penalty force f pushes the slave
//! along +n = (r₁−r₂)/‖r₁−r₂‖ and the master along −n.
//!
//! Configuration sensitivities are exact.  Gap and contact angle are
//! evaluated once in second-order dual numbers over the 24 dofs *plus* the
//! projection coordinates, and reduced through the implicit function
//! theorem at the projection conditions: with C(u, w) = 0 defining the
//! closest-point coordinates w(u),
//!
//! ```text
//! ∇q = q_u + Wᵀ q_w,                    W = −C_w⁻¹ C_u,
//! ∇²q = Tᵀ H_q T − Σᵣ λᵣ Tᵀ H_Cᵣ T,    λ = C_w⁻ᵀ q_w,   T = [I; W].
//! ```
//!
//! For the gap the envelope theorem makes q_w vanish at the projection, so
//! the corrections drop out by themselves; the contact angle keeps genuine
//! implicit terms.  No derivative is hand-linearized, which is what makes
//! the blended-formulation tangents (including the variation of the
//! transition factor) consistent to machine precision.
//!
//! The angle-blended contribution degenerates *bitwise* to the pure point
//! or pure line contribution when the transition factor saturates: all
//! blending enters through scalar coefficients that become literal 1.0 or
//! 0.0, and zero-coefficient terms are skipped, so the remaining float
//! operations are identical to the unblended call.

use crate::geometry::{
    closest_point_bilateral, closest_point_unilateral, ClosestPointResult, CurveRef, DualCurve,
    ProjectionKind,
};
use crate::law::{abc_transition_factor, ABCParams, ABCVariant, PenaltyLaw};
use crate::ContactError;
use fibril_core::dual::Dual2;
use fibril_core::quadrature::{Rule, GAUSS_10, GAUSS_2, GAUSS_3, GAUSS_4, GAUSS_5};
use fibril_core::Vec3;
use nalgebra::{Matrix2, SMatrix, SVector, Vector2};

/// Stacked dof count of a contact pair: 12 slave + 12 master.
pub const PAIR_NDOF: usize = 24;

type ResVec = SVector<f64, PAIR_NDOF>;
type StiffMat = SMatrix<f64, PAIR_NDOF, PAIR_NDOF>;

/// Which formulation produced a pair's records.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    Point,
    Line,
    Blended,
}

/// One evaluated contact location (the single point of a point
/// contribution, or one slave Gauss point of a line integral).
#[derive(Debug, Clone, Copy)]
pub struct GpRecord {
    /// Bilateral (point) or unilateral (line Gauss point) projection.
    pub kind: ProjectionKind,
    /// Slave coordinate ξ of the evaluation.
    pub xi: f64,
    /// Master coordinate η of the projection.
    pub eta: f64,
    /// Surface gap g = ‖r₁ − r₂‖ − R₁ − R₂.
    pub gap: f64,
    /// Raw law force: a point force for point records, a force per unit
    /// initial slave length for line records.
    pub force: f64,
    /// Blend weight multiplying `force` (1 for unblended contributions).
    pub blend: f64,
    /// Contact normal n = (r₁ − r₂)/‖r₁ − r₂‖.
    pub normal: Vec3,
    /// Integration measure w·J₁(ξ) of a line record, 1 for point records.
    pub weight_ds: f64,
}

/// Residual/tangent contribution of one pair evaluation.
#[derive(Debug, Clone)]
pub struct ContactContribution {
    /// Residual rows over `[slave 12 | master 12]` (internal-force side).
    pub res: ResVec,
    /// Consistent tangent ∂res/∂u; `None` unless requested.
    pub stiff: Option<StiffMat>,
    /// Stored penalty energy for conservative variants (pure point, pure
    /// line, potential-based blending); `None` for force-based blending.
    pub potential: Option<f64>,
    /// One record per active evaluation point.
    pub records: Vec<GpRecord>,
}

impl ContactContribution {
    fn empty(want_stiffness: bool, conservative: bool) -> Self {
        ContactContribution {
            res: ResVec::zeros(),
            stiff: want_stiffness.then(StiffMat::zeros),
            potential: conservative.then_some(0.0),
            records: Vec::new(),
        }
    }

    /// Whether any evaluation point transmits force.
    pub fn is_active(&self) -> bool {
        !self.records.is_empty()
    }

    /// Resultant force exerted on the slave beam (sum of its position
    /// rows, negated from the residual side).
    pub fn force_on_slave(&self) -> Vec3 {
        -(Vec3::new(self.res[0], self.res[1], self.res[2])
            + Vec3::new(self.res[6], self.res[7], self.res[8]))
    }

    /// Resultant force exerted on the master beam.
    pub fn force_on_master(&self) -> Vec3 {
        -(Vec3::new(self.res[12], self.res[13], self.res[14])
            + Vec3::new(self.res[18], self.res[19], self.res[20]))
    }
}

/// Driver-facing bookkeeping for one broadphase pair.
#[derive(Debug, Clone)]
pub struct ContactPair {
    /// Global element id of the slave.
    pub slave: usize,
    /// Global element id of the master.
    pub master: usize,
    pub regime: Regime,
    pub records: Vec<GpRecord>,
    pub active: bool,
}

impl ContactPair {
    pub fn new(slave: usize, master: usize, regime: Regime) -> Self {
        ContactPair {
            slave,
            master,
            regime,
            records: Vec::new(),
            active: false,
        }
    }

    /// Replace the stored records with a fresh evaluation's.
    pub fn update(&mut self, contribution: &ContactContribution) {
        self.records.clear();
        self.records.extend_from_slice(&contribution.records);
        self.active = contribution.is_active();
    }
}

/// Slave-side integration layout of line contributions: equal ξ-segments,
/// each integrated with a fixed Gauss rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Segmentation {
    pub segments: usize,
    pub gauss_per_segment: usize,
}

impl Segmentation {
    pub fn new(segments: usize, gauss_per_segment: usize) -> Self {
        assert!(segments >= 1, "need at least one segment");
        let s = Segmentation {
            segments,
            gauss_per_segment,
        };
        let _ = s.rule();
        s
    }

    fn rule(&self) -> &'static Rule {
        match self.gauss_per_segment {
            2 => &GAUSS_2,
            3 => &GAUSS_3,
            4 => &GAUSS_4,
            5 => &GAUSS_5,
            10 => &GAUSS_10,
            n => panic!("no {n}-point Gauss rule available (2..=5 or 10)"),
        }
    }

    /// Slave Gauss points (ξ, w·J₁(ξ)) with the *initial* arc Jacobian:
    /// the line penalty is a force per unit initial length, so the measure
    /// ds₁ is frozen at the reference configuration.
    pub(crate) fn points(&self, slave: &CurveRef) -> Vec<(f64, f64)> {
        let rule = self.rule();
        let mut out = Vec::with_capacity(self.segments * rule.len());
        let width = 2.0 / self.segments as f64;
        for seg in 0..self.segments {
            let a = -1.0 + seg as f64 * width;
            let half = 0.5 * width;
            for (x, w) in rule.iter() {
                let xi = a + half * (x + 1.0);
                out.push((xi, w * half * slave.geo.jacobian(xi)));
            }
        }
        out
    }
}

// ---------------------------------------------------------------------------
// Implicit-function reduction of dual evaluations.
// ---------------------------------------------------------------------------

/// Value, gradient, and Hessian of a scalar with respect to the 24 pair
/// dofs, with the projection coordinates eliminated.
#[derive(Debug, Clone)]
struct ScalarSens {
    val: f64,
    grad: ResVec,
    hess: StiffMat,
}

/// (u, w)-blocks of a bilateral dual scalar: 24 dofs + 2 coordinates.
struct Blocks2 {
    qu: ResVec,
    qw: Vector2<f64>,
    huu: StiffMat,
    huw: SMatrix<f64, PAIR_NDOF, 2>,
    hww: Matrix2<f64>,
}

fn blocks2(q: &Dual2<26>) -> Blocks2 {
    Blocks2 {
        qu: ResVec::from_fn(|i, _| q.g[i]),
        qw: Vector2::new(q.g[24], q.g[25]),
        huu: StiffMat::from_fn(|i, j| q.h[i][j]),
        huw: SMatrix::from_fn(|i, a| q.h[i][24 + a]),
        hww: Matrix2::from_fn(|a, b| q.h[24 + a][24 + b]),
    }
}

struct BilateralReduction {
    w: SMatrix<f64, 2, PAIR_NDOF>,
    cw_inv: Matrix2<f64>,
    cb: [Blocks2; 2],
}

impl BilateralReduction {
    fn new(c1: &Dual2<26>, c2: &Dual2<26>) -> Self {
        let cb = [blocks2(c1), blocks2(c2)];
        let cw = Matrix2::new(cb[0].qw[0], cb[0].qw[1], cb[1].qw[0], cb[1].qw[1]);
        let cw_inv = cw
            .try_inverse()
            .expect("projection system singular at an accepted closest point");
        let cu = SMatrix::<f64, 2, PAIR_NDOF>::from_fn(|r, j| cb[r].qu[j]);
        BilateralReduction {
            w: -(cw_inv * cu),
            cw_inv,
            cb,
        }
    }

    fn reduce(&self, q: &Dual2<26>) -> ScalarSens {
        let b = blocks2(q);
        let grad = b.qu + self.w.transpose() * b.qw;
        let hw = b.huw * self.w;
        let mut hess = b.huu + hw + hw.transpose() + self.w.transpose() * b.hww * self.w;
        let lam = self.cw_inv.transpose() * b.qw;
        for (r, cb) in self.cb.iter().enumerate() {
            let chw = cb.huw * self.w;
            hess -= lam[r]
                * (cb.huu + chw + chw.transpose() + self.w.transpose() * cb.hww * self.w);
        }
        ScalarSens {
            val: q.v,
            grad,
            hess,
        }
    }
}

/// (u, η)-blocks of a unilateral dual scalar: 24 dofs + 1 coordinate.
struct Blocks1 {
    qu: ResVec,
    qw: f64,
    huu: StiffMat,
    huw: ResVec,
    hww: f64,
}

fn blocks1(q: &Dual2<25>) -> Blocks1 {
    Blocks1 {
        qu: ResVec::from_fn(|i, _| q.g[i]),
        qw: q.g[24],
        huu: StiffMat::from_fn(|i, j| q.h[i][j]),
        huw: ResVec::from_fn(|i, _| q.h[i][24]),
        hww: q.h[24][24],
    }
}

struct UnilateralReduction {
    w: ResVec,
    cw_inv: f64,
    cb: Blocks1,
}

impl UnilateralReduction {
    fn new(c: &Dual2<25>) -> Self {
        let cb = blocks1(c);
        assert!(
            cb.qw != 0.0,
            "unilateral projection condition degenerate at an accepted minimum"
        );
        let cw_inv = 1.0 / cb.qw;
        UnilateralReduction {
            w: -cw_inv * cb.qu,
            cw_inv,
            cb,
        }
    }

    fn reduce(&self, q: &Dual2<25>) -> ScalarSens {
        let b = blocks1(q);
        let grad = b.qu + b.qw * self.w;
        let hw = b.huw * self.w.transpose();
        let mut hess = b.huu + hw + hw.transpose() + b.hww * self.w * self.w.transpose();
        let lam = self.cw_inv * b.qw;
        let chw = self.cb.huw * self.w.transpose();
        hess -= lam
            * (self.cb.huu + chw + chw.transpose() + self.cb.hww * self.w * self.w.transpose());
        ScalarSens {
            val: q.v,
            grad,
            hess,
        }
    }
}

/// Distance and contact-angle sensitivities at a converged bilateral
/// projection (ξ, η).
fn bilateral_sens(
    slave: &CurveRef,
    master: &CurveRef,
    xi: f64,
    eta: f64,
) -> (ScalarSens, ScalarSens) {
    let sc = DualCurve::<26>::variables(slave, 0);
    let mc = DualCurve::<26>::variables(master, 12);
    let xi_d = Dual2::<26>::variable(xi, 24);
    let eta_d = Dual2::<26>::variable(eta, 25);
    let r1 = sc.point(xi_d);
    let t1 = sc.tangent_xi(xi_d);
    let r2 = mc.point(eta_d);
    let t2 = mc.tangent_xi(eta_d);
    let d = r1 - r2;
    let c1 = t1.dot(&d);
    let c2 = t2.dot(&d);
    let red = BilateralReduction::new(&c1, &c2);
    let dist = d.norm();
    let mut s = t1.dot(&t2) / (t1.norm() * t2.norm());
    if s.v < 0.0 {
        s = -s;
    }
    (red.reduce(&dist), red.reduce(&s))
}

/// Distance and contact-angle sensitivities at a line Gauss point: the
/// slave coordinate ξ is fixed, the master coordinate η is a converged
/// unilateral projection.
fn unilateral_sens(
    slave: &CurveRef,
    master: &CurveRef,
    xi: f64,
    eta: f64,
) -> (ScalarSens, ScalarSens) {
    let sc = DualCurve::<25>::variables(slave, 0);
    let mc = DualCurve::<25>::variables(master, 12);
    let r1 = sc.point_const(xi);
    let t1 = sc.tangent_xi_const(xi);
    let eta_d = Dual2::<25>::variable(eta, 24);
    let r2 = mc.point(eta_d);
    let t2 = mc.tangent_xi(eta_d);
    let d = r1 - r2;
    let c = t2.dot(&d);
    let red = UnilateralReduction::new(&c);
    let dist = d.norm();
    let mut s = t1.dot(&t2) / (t1.norm() * t2.norm());
    if s.v < 0.0 {
        s = -s;
    }
    (red.reduce(&dist), red.reduce(&s))
}

// ---------------------------------------------------------------------------
// Shared accumulation primitives.  Blended contributions pass coefficients
// that saturate to literal 1.0/0.0, and every zero coefficient is skipped,
// so a saturated blend performs float-for-float the unblended operations.
// ---------------------------------------------------------------------------

/// res += coef·P′(g)∇g and K += coef·(P″∇g∇gᵀ + P′ H_g) with P′ = −force.
fn add_gap_term(
    res: &mut ResVec,
    stiff: Option<&mut StiffMat>,
    gap: &ScalarSens,
    law: &PenaltyLaw,
    coef: f64,
) {
    if coef == 0.0 {
        return;
    }
    let fp = -law.force(gap.val);
    let fpp = -law.force_slope(gap.val);
    res.axpy(coef * fp, &gap.grad, 1.0);
    if let Some(k) = stiff {
        *k += (coef * fpp) * (gap.grad * gap.grad.transpose());
        *k += (coef * fp) * gap.hess;
    }
}

/// K += coef·P′(g)·∇g∇zᵀ — the force-based blending cross term from the
/// configuration dependence of the transition factor.
fn add_force_blend_cross(
    stiff: Option<&mut StiffMat>,
    gap: &ScalarSens,
    z: &ScalarSens,
    law: &PenaltyLaw,
    coef: f64,
) {
    if coef == 0.0 {
        return;
    }
    if let Some(k) = stiff {
        let fp = -law.force(gap.val);
        *k += (coef * fp) * (gap.grad * z.grad.transpose());
    }
}

/// Potential-based blending extras for a term a(k(z))·P(g) beyond the
/// `add_gap_term` part: res += da·P∇z and
/// K += da·P′(∇g∇zᵀ + ∇z∇gᵀ) + d²a·P·∇z∇zᵀ + da·P·H_z,
/// where `cda` = weight·da/dz and `cd2a` = weight·d²a/dz².
fn add_potential_blend_terms(
    res: &mut ResVec,
    mut stiff: Option<&mut StiffMat>,
    gap: &ScalarSens,
    z: &ScalarSens,
    law: &PenaltyLaw,
    cda: f64,
    cd2a: f64,
) {
    let p = law.potential(gap.val);
    if cda != 0.0 {
        res.axpy(cda * p, &z.grad, 1.0);
        if let Some(k) = stiff.as_deref_mut() {
            let fp = -law.force(gap.val);
            let cross = gap.grad * z.grad.transpose();
            *k += (cda * fp) * (cross + cross.transpose());
            *k += (cda * p) * z.hess;
        }
    }
    if cd2a != 0.0 {
        if let Some(k) = stiff {
            *k += (cd2a * p) * (z.grad * z.grad.transpose());
        }
    }
}

fn push_record(
    records: &mut Vec<GpRecord>,
    kind: ProjectionKind,
    xi: f64,
    proj: &ClosestPointResult,
    gap: f64,
    force: f64,
    blend: f64,
    weight_ds: f64,
) {
    if blend > 0.0 && force != 0.0 {
        records.push(GpRecord {
            kind,
            xi,
            eta: proj.eta,
            gap,
            force,
            blend,
            normal: proj.normal,
            weight_ds,
        });
    }
}

// ---------------------------------------------------------------------------
// Public contributions.
// ---------------------------------------------------------------------------

/// Point contact: a single penalty force at the bilateral closest point.
///
/// Boundary projections are inadmissible (the neighboring pair owns the
/// true minimum) and produce an inactive contribution; near-parallel
/// geometries surface as [`ContactError::NonUniqueProjection`], which the
/// caller resolves by switching to line contact or the angle blend.
pub fn point_contact_contribution(
    slave: &CurveRef,
    radius_slave: f64,
    master: &CurveRef,
    radius_master: f64,
    law: &PenaltyLaw,
    want_stiffness: bool,
) -> Result<ContactContribution, ContactError> {
    let proj = closest_point_bilateral(slave, master)?;
    let mut out = ContactContribution::empty(want_stiffness, true);
    let g = proj.distance - radius_slave - radius_master;
    if proj.on_boundary || !law.active(g) {
        return Ok(out);
    }
    let (mut gap, _z) = bilateral_sens(slave, master, proj.xi, proj.eta);
    gap.val = g;
    add_gap_term(&mut out.res, out.stiff.as_mut(), &gap, law, 1.0);
    out.potential = Some(law.potential(g));
    push_record(
        &mut out.records,
        ProjectionKind::Bilateral,
        proj.xi,
        &proj,
        g,
        law.force(g),
        1.0,
        1.0,
    );
    Ok(out)
}

/// Line contact: the penalty force density integrated over the slave's
/// Gauss points, each projected unilaterally onto the best master.
///
/// Every slave Gauss point is tested against all supplied master
/// candidates; the admissible projection with the smallest gap wins and
/// the point contributes to that master's entry of the returned vector
/// (parallel to `masters`).  Projections that leave a master element skip
/// that candidate — the neighboring element covers the point.
pub fn line_contact_contribution(
    slave: &CurveRef,
    radius_slave: f64,
    masters: &[(CurveRef, f64)],
    law: &PenaltyLaw,
    seg: &Segmentation,
    want_stiffness: bool,
) -> Result<Vec<ContactContribution>, ContactError> {
    let mut out: Vec<ContactContribution> = masters
        .iter()
        .map(|_| ContactContribution::empty(want_stiffness, true))
        .collect();
    for (xi, wj) in seg.points(slave) {
        let p = slave.eval_xi(xi, 0);
        let mut best: Option<(usize, ClosestPointResult, f64)> = None;
        for (m, (mc, mr)) in masters.iter().enumerate() {
            let proj = match closest_point_unilateral(&p, mc) {
                Ok(proj) => proj,
                Err(ContactError::ProjectionOutsideElement { .. }) => continue,
                Err(e) => return Err(e),
            };
            let g = proj.distance - radius_slave - mr;
            if best.as_ref().is_none_or(|(_, _, bg)| g < *bg) {
                best = Some((m, proj, g));
            }
        }
        let Some((m, proj, g)) = best else { continue };
        if !law.active(g) {
            continue;
        }
        let (mc, _) = &masters[m];
        let (mut gap, _z) = unilateral_sens(slave, mc, xi, proj.eta);
        gap.val = g;
        let c = &mut out[m];
        add_gap_term(&mut c.res, c.stiff.as_mut(), &gap, law, wj);
        *c.potential.as_mut().unwrap() += wj * law.potential(g);
        push_record(
            &mut c.records,
            ProjectionKind::Unilateral,
            xi,
            &proj,
            g,
            law.force(g),
            1.0,
            wj,
        );
    }
    Ok(out)
}

/// Angle-blended contribution of one pair: the point force weighted toward
/// large contact angles, the line force density toward small ones, with
/// the transition factor k(z) of [`abc_transition_factor`] and the penalty
/// parameters of `params` replacing the template law's stiffness.
///
/// Force-based blending scales the two force systems (tangent includes the
/// k-variation cross terms; not symmetric).  Potential-based blending
/// differentiates the blended potential
/// (1 − k²)·P⊥(g_c) + ∫ k²·P∥(g) ds₁ in full, so the result is
/// conservative and its tangent symmetric.
///
/// A non-unique bilateral projection is the deep-parallel regime: the
/// point part is dropped exactly as a saturated k = 1 would drop it, and
/// only the line integral acts.
pub fn abc_contribution(
    slave: &CurveRef,
    radius_slave: f64,
    master: &CurveRef,
    radius_master: f64,
    params: &ABCParams,
    law: &PenaltyLaw,
    want_stiffness: bool,
) -> Result<ContactContribution, ContactError> {
    let law_perp = law.with_stiffness(params.eps_perp);
    let law_par = law.with_stiffness(params.eps_par);
    let potential_based = params.variant == ABCVariant::PotentialBased;
    let mut out = ContactContribution::empty(want_stiffness, potential_based);

    // Point part at the bilateral closest point.
    match closest_point_bilateral(slave, master) {
        Ok(proj) if !proj.on_boundary => {
            let g = proj.distance - radius_slave - radius_master;
            if law_perp.active(g) {
                let (mut gap, z) = bilateral_sens(slave, master, proj.xi, proj.eta);
                gap.val = g;
                let (k, kp, kpp) = abc_transition_factor(params, z.val);
                match params.variant {
                    ABCVariant::ForceBased => {
                        let weight = 1.0 - k;
                        add_gap_term(&mut out.res, out.stiff.as_mut(), &gap, &law_perp, weight);
                        add_force_blend_cross(out.stiff.as_mut(), &gap, &z, &law_perp, -kp);
                        push_record(
                            &mut out.records,
                            ProjectionKind::Bilateral,
                            proj.xi,
                            &proj,
                            g,
                            law_perp.force(g),
                            weight,
                            1.0,
                        );
                    }
                    ABCVariant::PotentialBased => {
                        let a = 1.0 - k * k;
                        add_gap_term(&mut out.res, out.stiff.as_mut(), &gap, &law_perp, a);
                        add_potential_blend_terms(
                            &mut out.res,
                            out.stiff.as_mut(),
                            &gap,
                            &z,
                            &law_perp,
                            -2.0 * k * kp,
                            -2.0 * (kp * kp + k * kpp),
                        );
                        *out.potential.as_mut().unwrap() += a * law_perp.potential(g);
                        push_record(
                            &mut out.records,
                            ProjectionKind::Bilateral,
                            proj.xi,
                            &proj,
                            g,
                            law_perp.force(g),
                            a,
                            1.0,
                        );
                    }
                }
            }
        }
        // Boundary minimum: the neighboring pair owns the point term.
        Ok(_) => {}
        // Deep-parallel: identical to a saturated k = 1 (no point term).
        Err(ContactError::NonUniqueProjection { .. }) => {}
        Err(e) => return Err(e),
    }

    // Line part over the slave Gauss points.
    let seg = Segmentation::new(params.n_segments, params.n_gauss_per_segment);
    for (xi, wj) in seg.points(slave) {
        let p = slave.eval_xi(xi, 0);
        let proj = match closest_point_unilateral(&p, master) {
            Ok(proj) => proj,
            Err(ContactError::ProjectionOutsideElement { .. }) => continue,
            Err(e) => return Err(e),
        };
        let g = proj.distance - radius_slave - radius_master;
        if !law_par.active(g) {
            continue;
        }
        let (mut gap, z) = unilateral_sens(slave, master, xi, proj.eta);
        gap.val = g;
        let (k, kp, kpp) = abc_transition_factor(params, z.val);
        match params.variant {
            ABCVariant::ForceBased => {
                add_gap_term(&mut out.res, out.stiff.as_mut(), &gap, &law_par, wj * k);
                add_force_blend_cross(out.stiff.as_mut(), &gap, &z, &law_par, wj * kp);
                push_record(
                    &mut out.records,
                    ProjectionKind::Unilateral,
                    xi,
                    &proj,
                    g,
                    law_par.force(g),
                    k,
                    wj,
                );
            }
            ABCVariant::PotentialBased => {
                let a = k * k;
                add_gap_term(&mut out.res, out.stiff.as_mut(), &gap, &law_par, wj * a);
                add_potential_blend_terms(
                    &mut out.res,
                    out.stiff.as_mut(),
                    &gap,
                    &z,
                    &law_par,
                    wj * 2.0 * k * kp,
                    wj * 2.0 * (kp * kp + k * kpp),
                );
                *out.potential.as_mut().unwrap() += (wj * a) * law_par.potential(g);
                push_record(
                    &mut out.records,
                    ProjectionKind::Unilateral,
                    xi,
                    &proj,
                    g,
                    law_par.force(g),
                    a,
                    wj,
                );
            }
        }
    }
    Ok(out)
}
