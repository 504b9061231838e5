//! Real topology of the curves F_k = 0 and H_k = 0: inflexions, asymptotes,
//! component counting, branch tracing and line–cubic intersection.
//!
//! Branch labels follow the fixed frame of the family: `C1`/`C2` are the
//! paired cubic/Hessian branches bounding the standard hybrid cone
//! component, `C3` is the k = −2 segment at infinity, `Bounded` is the oval,
//! and `Q1B3`/`B3Q2`/`B1R`/`RB2`/`Q1Q2` are the Hessian sub-arcs cut by the
//! asymptote contact points Q₁, Q₂, R.

use crate::error::Error;
use crate::forms::{self, TernaryCubic};
use crate::ray::{LinearForm3, RayVector, B1, B2, B3};
use crate::roots::cubic_roots;
use crate::tolerances::Tolerances;
use serde::{Deserialize, Serialize};

/// Which curve of the pair an arc lives on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CurveSel {
    F,
    H,
}

/// Symbolic branch labels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BranchId {
    /// Cubic branch of the standard hybrid component (negative quadrant for
    /// k > 1, first quadrant beyond the triangle for k < 1).
    C1,
    /// Hessian branch paired with C1 (k = 0: the two axis segments).
    C2,
    /// k = −2 only: segment at infinity from B₁ to B₂.
    C3,
    /// Bounded component: the oval of F for k > 1, of H for k < 1.
    Bounded,
    /// Hessian arc from Q₁ to B₃ (k > 1).
    Q1B3,
    /// Hessian arc from B₃ to Q₂ (k > 1).
    B3Q2,
    /// Half of C2 from B₁ to R (k > 1).
    B1R,
    /// Half of C2 from R to B₂ (k > 1).
    RB2,
    /// Arc of the bounded Hessian oval from Q₁ to Q₂ avoiding Q₃ (k < 1).
    Q1Q2,
}

impl BranchId {
    pub fn parse(s: &str) -> Result<Self, Error> {
        Ok(match s.to_ascii_uppercase().as_str() {
            "C1" => BranchId::C1,
            "C2" => BranchId::C2,
            "C3" => BranchId::C3,
            "BOUNDED" => BranchId::Bounded,
            "Q1B3" => BranchId::Q1B3,
            "B3Q2" => BranchId::B3Q2,
            "B1R" => BranchId::B1R,
            "RB2" => BranchId::RB2,
            "Q1Q2" => BranchId::Q1Q2,
            other => return Err(Error::UnknownBranch(other.to_string())),
        })
    }
}

/// A sampled, ordered boundary branch with endpoint rays.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Arc {
    pub curve: CurveSel,
    pub branch_id: BranchId,
    /// Sup-norm-normalized rays along the branch, ordered.
    pub samples: Vec<RayVector>,
    pub endpoints: (RayVector, RayVector),
    /// True when the arc is a closed loop (oval); endpoints then coincide.
    pub closed: bool,
}

impl Arc {
    /// Index of the sample closest (chordally) to the given ray.
    pub fn nearest_sample(&self, p: &RayVector) -> usize {
        let mut best = 0;
        let mut bd = f64::INFINITY;
        for (i, s) in self.samples.iter().enumerate() {
            let d = s.ray_distance(p);
            if d < bd {
                bd = d;
                best = i;
            }
        }
        best
    }
}

/// Structure of the real Hessian curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum HessianKind {
    Smooth { components: u8 },
    /// k = 0: the three real lines x·y·(z−x−y) = 0.
    LineTriple,
    /// k = −2: line at infinity plus the isolated centroid.
    LinePlusPoint,
}

/// Component counts, inflexions and asymptotes of the pair (F_k, H_k).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CurveTopology {
    pub k: f64,
    pub f_components: u8,
    pub hessian: HessianKind,
    pub inflexions: [RayVector; 3],
    pub asymptotes: [LinearForm3; 3],
}

/// The cubic together with its Hessian form.
#[derive(Debug, Clone)]
pub struct CurvePair {
    pub k: f64,
    pub f: TernaryCubic,
    pub h: TernaryCubic,
}

impl CurvePair {
    pub fn new(k: f64, tol: &Tolerances) -> Result<Self, Error> {
        let f = TernaryCubic::hesse(k, tol, false)?;
        let h = f.hessian_cubic();
        Ok(CurvePair { k, f, h })
    }

    pub fn form(&self, sel: CurveSel) -> &TernaryCubic {
        match sel {
            CurveSel::F => &self.f,
            CurveSel::H => &self.h,
        }
    }
}

/// Inflexion points of every family member: the intersection of the line at
/// infinity z = 0 with the curve.
pub fn inflexion_points(k: f64, tol: &Tolerances) -> Result<[RayVector; 3], Error> {
    tol.check_band(k, 1.0)?;
    Ok([B1, B2, B3])
}

/// Tangent lines at the inflexions (the affine asymptotes
/// x = −1/(k−1), y = −1/(k−1), x+y = k/(k−1)), returned as the exact second
/// polars so the positive-scale relation holds by construction.
pub fn asymptotes(k: f64, tol: &Tolerances) -> Result<[LinearForm3; 3], Error> {
    let f = TernaryCubic::hesse(k, tol, false)?;
    Ok([f.second_polar(&B1), f.second_polar(&B2), f.second_polar(&B3)])
}

/// Component counts per the k-regime classification.
pub fn curve_topology(k: f64, tol: &Tolerances) -> Result<CurveTopology, Error> {
    tol.check_band(k, 1.0)?;
    let hessian = if k.abs() <= tol.degenerate_k_band {
        HessianKind::LineTriple
    } else if (k + 2.0).abs() <= tol.degenerate_k_band {
        HessianKind::LinePlusPoint
    } else if k > 1.0 {
        HessianKind::Smooth { components: 1 }
    } else {
        HessianKind::Smooth { components: 2 }
    };
    Ok(CurveTopology {
        k,
        f_components: if k > 1.0 { 2 } else { 1 },
        hessian,
        inflexions: inflexion_points(k, tol)?,
        asymptotes: asymptotes(k, tol)?,
    })
}

/// Tracing parameters.
#[derive(Debug, Clone, Copy)]
pub struct TraceConfig {
    /// Maximum chordal step between consecutive unit-sphere samples.
    pub max_step: f64,
    /// Unbounded branches stop once |x| + |y| exceeds this affine cutoff.
    pub affine_cutoff: f64,
    pub max_samples: usize,
}

impl Default for TraceConfig {
    fn default() -> Self {
        TraceConfig {
            max_step: 0.02,
            affine_cutoff: 1e3,
            max_samples: 40_000,
        }
    }
}

/// Newton-polish a point onto {form = 0} along the sphere-projected
/// gradient; returns a unit (2-norm) vector.
pub(crate) fn polish_on_curve(form: &TernaryCubic, p: &RayVector) -> RayVector {
    let mut q = p.scale(1.0 / p.norm());
    for _ in 0..12 {
        let v = form.evaluate(&q);
        let g = form.gradient(&q);
        let gt = g.sub(&q.scale(g.dot(&q)));
        let n2 = gt.dot(&gt);
        if n2 < 1e-300 {
            break;
        }
        let step = v / n2;
        q = q.sub(&gt.scale(step));
        q = q.scale(1.0 / q.norm());
        if v.abs() < 1e-14 * form.max_coeff() {
            break;
        }
    }
    q
}

enum StopReason {
    Cutoff,
    Loop,
    Budget,
}

/// March along {form = 0} on the unit sphere from a seed in one direction.
fn march(
    form: &TernaryCubic,
    seed: &RayVector,
    dir: f64,
    cfg: &TraceConfig,
) -> (Vec<RayVector>, StopReason) {
    let mut p = polish_on_curve(form, seed);
    let mut samples = vec![p];
    let mut prev_tangent: Option<RayVector> = None;
    let mut reason = StopReason::Budget;

    for _ in 0..cfg.max_samples {
        let g = form.gradient(&p);
        let mut t = p.cross(&g);
        let tn = t.norm();
        if tn < 1e-13 * (1.0 + g.norm()) {
            // singular point of the curve; stop rather than wander
            reason = StopReason::Cutoff;
            break;
        }
        t = t.scale(1.0 / tn);
        match &prev_tangent {
            None => {
                if dir < 0.0 {
                    t = t.neg();
                }
            }
            Some(pt) => {
                if t.dot(pt) < 0.0 {
                    t = t.neg();
                }
            }
        }

        // adaptive step: halve until the corrected point stays close.
        // Near z = 0 the affine chart blows up; capping the step by the
        // z-component keeps the march from sailing over the inflexion at
        // infinity before the affine cutoff can stop it (|dz| ≤ |dp| = h, so
        // h ≤ 0.4·|z| never flips the sign of z).
        let z_cap = 0.4 * p.coords[2].abs();
        let mut h = if z_cap > 1e-9 { cfg.max_step.min(z_cap) } else { cfg.max_step };
        let mut next = p;
        for _attempt in 0..20 {
            let predicted = p.add(&t.scale(h));
            let corrected = polish_on_curve(form, &predicted);
            if corrected.sub(&predicted.scale(1.0 / predicted.norm())).norm() < 0.25 * h {
                next = corrected;
                break;
            }
            h *= 0.5;
            next = corrected;
        }

        prev_tangent = Some(t);
        p = next;
        samples.push(p);

        // loop closure
        if samples.len() > 10 && p.ray_distance(&samples[0]) < 0.75 * cfg.max_step {
            reason = StopReason::Loop;
            break;
        }
        // affine cutoff
        match p.to_affine() {
            Some((x, y)) => {
                if x.abs() + y.abs() > cfg.affine_cutoff {
                    reason = StopReason::Cutoff;
                    break;
                }
            }
            None => {
                reason = StopReason::Cutoff;
                break;
            }
        }
    }
    let _ = matches!(reason, StopReason::Budget);
    (samples, reason)
}

/// Snap a final marching direction to the nearest signed inflexion ray.
fn snap_to_inflexion(p: &RayVector) -> RayVector {
    let candidates = [B1, B1.neg(), B2, B2.neg(), B3, B3.neg()];
    let u = p.scale(1.0 / p.norm());
    let mut best = candidates[0];
    let mut bd = f64::NEG_INFINITY;
    for c in candidates {
        let cu = c.scale(1.0 / c.norm());
        let d = u.dot(&cu);
        if d > bd {
            bd = d;
            best = c;
        }
    }
    best
}

fn sup_normalized(samples: Vec<RayVector>) -> Vec<RayVector> {
    samples
        .into_iter()
        .map(|s| s.normalized().expect("trace samples are non-zero"))
        .collect()
}

/// Trace an unbounded branch through `seed`, snap both ends to inflexion
/// rays, orient so the first endpoint matches `want_start` projectively.
fn trace_unbounded(
    form: &TernaryCubic,
    sel: CurveSel,
    id: BranchId,
    seed: &RayVector,
    want_start: &RayVector,
    cfg: &TraceConfig,
) -> Arc {
    let (fwd, _) = march(form, seed, 1.0, cfg);
    let (bwd, _) = march(form, seed, -1.0, cfg);
    let mut samples: Vec<RayVector> = bwd.iter().skip(1).rev().cloned().collect();
    samples.extend(fwd.iter().cloned());
    let start_snap = snap_to_inflexion(&samples[0]);
    let end_snap = snap_to_inflexion(samples.last().unwrap());
    let (mut e0, mut e1) = (start_snap, end_snap);
    if e0.projective_distance(want_start) > e1.projective_distance(want_start) {
        samples.reverse();
        std::mem::swap(&mut e0, &mut e1);
    }
    let mut full = Vec::with_capacity(samples.len() + 2);
    full.push(e0);
    full.extend(samples);
    full.push(e1);
    Arc {
        curve: sel,
        branch_id: id,
        samples: sup_normalized(full),
        endpoints: (e0, e1),
        closed: false,
    }
}

/// Trace a closed oval through `seed`.
fn trace_closed(
    form: &TernaryCubic,
    sel: CurveSel,
    id: BranchId,
    seed: &RayVector,
    cfg: &TraceConfig,
) -> Arc {
    let (mut samples, _) = march(form, seed, 1.0, cfg);
    let first = samples[0];
    samples.push(first);
    Arc {
        curve: sel,
        branch_id: id,
        samples: sup_normalized(samples),
        endpoints: (first, first),
        closed: true,
    }
}

/// Real roots of F_k(t, t, 1) = 0 (branch seeds on the diagonal x = y):
/// (6−6k)t³ + (3k−12)t² + 6t − 1.
pub fn diagonal_roots(k: f64) -> Vec<f64> {
    cubic_roots(6.0 - 6.0 * k, 3.0 * k - 12.0, 6.0, -1.0)
        .into_iter()
        .map(|(r, _)| r)
        .collect()
}

fn hessian_diag_seed_unbounded(k: f64) -> Option<f64> {
    // H = −54k²·F_{k'}: the Hessian's negative-quadrant branch crosses the
    // diagonal where F_{k'} does
    let kp = (4.0 - k * k * k) / (3.0 * k * k);
    diagonal_roots(kp).into_iter().find(|t| *t < 0.0)
}

fn hessian_diag_seeds_oval(k: f64) -> Vec<f64> {
    let kp = (4.0 - k * k * k) / (3.0 * k * k);
    diagonal_roots(kp)
        .into_iter()
        .filter(|t| *t > 0.0 && *t < 0.75)
        .collect()
}

/// Trace a named branch of F_k = 0 or H_k = 0.
pub fn trace_branch(
    k: f64,
    curve: CurveSel,
    id: BranchId,
    tol: &Tolerances,
    cfg: &TraceConfig,
) -> Result<Arc, Error> {
    let pair = CurvePair::new(k, tol)?;
    trace_branch_of(&pair, curve, id, tol, cfg)
}

pub fn trace_branch_of(
    pair: &CurvePair,
    curve: CurveSel,
    id: BranchId,
    tol: &Tolerances,
    cfg: &TraceConfig,
) -> Result<Arc, Error> {
    let k = pair.k;
    let k_is_zero = k.abs() <= tol.degenerate_k_band;
    let k_is_m2 = (k + 2.0).abs() <= tol.degenerate_k_band;
    let unknown = || Error::UnknownBranch(format!("{id:?} invalid for k = {k}"));

    match (curve, id) {
        (CurveSel::F, BranchId::C1) => {
            if k > 1.0 {
                // negative-quadrant branch, endpoints (0,−1,0) and (−1,0,0)
                let t = diagonal_roots(k)
                    .into_iter()
                    .find(|t| *t < 0.0)
                    .ok_or_else(unknown)?;
                let seed = RayVector::affine(t, t);
                Ok(trace_unbounded(&pair.f, curve, id, &seed, &B1.neg(), cfg))
            } else {
                // first-quadrant branch beyond the triangle, endpoints B₁, B₂
                let t = diagonal_roots(k)
                    .into_iter()
                    .filter(|t| *t > 0.5)
                    .fold(f64::NAN, f64::max);
                if !t.is_finite() {
                    return Err(unknown());
                }
                let seed = RayVector::affine(t, t);
                Ok(trace_unbounded(&pair.f, curve, id, &seed, &B1, cfg))
            }
        }
        (CurveSel::F, BranchId::Bounded) => {
            if k <= 1.0 {
                return Err(unknown());
            }
            let seed_t = diagonal_roots(k)
                .into_iter()
                .filter(|t| *t > 0.0)
                .fold(f64::INFINITY, f64::min);
            if !seed_t.is_finite() {
                return Err(unknown());
            }
            Ok(trace_closed(&pair.f, curve, id, &RayVector::affine(seed_t, seed_t), cfg))
        }
        (CurveSel::H, BranchId::Bounded) => {
            if k >= 1.0 || k_is_zero || k_is_m2 {
                return Err(unknown());
            }
            let seed_t = hessian_diag_seeds_oval(k)
                .into_iter()
                .fold(f64::INFINITY, f64::min);
            if !seed_t.is_finite() {
                return Err(unknown());
            }
            Ok(trace_closed(&pair.h, curve, id, &RayVector::affine(seed_t, seed_t), cfg))
        }
        (CurveSel::H, BranchId::C2) => {
            if k > 1.0 {
                // first-quadrant Hessian branch through R
                let seed = forms::r_point(k);
                Ok(trace_unbounded(&pair.h, curve, id, &seed, &B1, cfg))
            } else if k_is_zero {
                Ok(fermat_c2_polyline(cfg))
            } else if k_is_m2 {
                Err(unknown())
            } else {
                let t = hessian_diag_seed_unbounded(k).ok_or_else(unknown)?;
                let seed = RayVector::affine(t, t);
                Ok(trace_unbounded(&pair.h, curve, id, &seed, &B1.neg(), cfg))
            }
        }
        (CurveSel::H, BranchId::C3) => {
            if !k_is_m2 {
                return Err(unknown());
            }
            // segment at infinity: rays (cos θ, sin θ, 0), θ ∈ [0, π/2]
            let n = 256;
            let samples: Vec<RayVector> = (0..=n)
                .map(|i| {
                    let th = std::f64::consts::FRAC_PI_2 * i as f64 / n as f64;
                    RayVector::new(th.cos(), th.sin(), 0.0).normalized().unwrap()
                })
                .collect();
            Ok(Arc {
                curve,
                branch_id: id,
                samples,
                endpoints: (B2, B1),
                closed: false,
            })
        }
        (CurveSel::H, BranchId::B1R) | (CurveSel::H, BranchId::RB2) => {
            if k <= 1.0 {
                return Err(unknown());
            }
            let c2 = trace_branch_of(pair, CurveSel::H, BranchId::C2, tol, cfg)?;
            let r = forms::r_point(k).normalized()?;
            let ridx = c2.nearest_sample(&r);
            let (mut samples, endpoints) = if id == BranchId::B1R {
                (c2.samples[..=ridx].to_vec(), (B1, r))
            } else {
                (c2.samples[ridx..].to_vec(), (r, B2))
            };
            // pin the split point exactly
            if id == BranchId::B1R {
                *samples.last_mut().unwrap() = r;
            } else {
                samples[0] = r;
            }
            Ok(Arc { curve, branch_id: id, samples, endpoints, closed: false })
        }
        (CurveSel::H, BranchId::Q1B3) => {
            if k <= 1.0 {
                return Err(unknown());
            }
            // branch through Q₁ runs from B₂ to B₃; keep the Q₁ → B₃ side
            let q1 = forms::q1_point(k);
            let arc = hessian_half_branch(pair, &q1, cfg);
            Ok(Arc { curve, branch_id: id, ..arc })
        }
        (CurveSel::H, BranchId::B3Q2) => {
            if k <= 1.0 {
                return Err(unknown());
            }
            let q2 = forms::q2_point(k);
            let mut arc = hessian_half_branch(pair, &q2, cfg);
            arc.samples.reverse();
            let endpoints = (arc.endpoints.1, arc.endpoints.0);
            Ok(Arc { curve, branch_id: id, endpoints, ..arc })
        }
        (CurveSel::H, BranchId::Q1Q2) => {
            if k >= 1.0 || k_is_zero || k_is_m2 {
                return Err(unknown());
            }
            let oval = trace_branch_of(pair, CurveSel::H, BranchId::Bounded, tol, cfg)?;
            let q1 = forms::q1_point(k).normalized()?;
            let q2 = forms::q2_point(k).normalized()?;
            let q3 = forms::r_point(k).normalized()?;
            let n = oval.samples.len() - 1; // last repeats first
            let i1 = oval.nearest_sample(&q1).min(n - 1);
            let i2 = oval.nearest_sample(&q2).min(n - 1);
            let i3 = oval.nearest_sample(&q3).min(n - 1);
            // walk i1 → i2 in the direction that avoids i3
            let forward_hits_q3 = {
                let mut i = i1;
                let mut hit = false;
                while i != i2 {
                    if i == i3 {
                        hit = true;
                        break;
                    }
                    i = (i + 1) % n;
                }
                hit
            };
            let mut samples = Vec::new();
            let mut i = i1;
            loop {
                samples.push(oval.samples[i]);
                if i == i2 {
                    break;
                }
                i = if forward_hits_q3 { (i + n - 1) % n } else { (i + 1) % n };
            }
            samples[0] = q1;
            *samples.last_mut().unwrap() = q2;
            Ok(Arc {
                curve,
                branch_id: id,
                samples,
                endpoints: (q1, q2),
                closed: false,
            })
        }
        _ => Err(unknown()),
    }
}

/// Trace from a contact point to the B₃ end of its Hessian branch.
fn hessian_half_branch(pair: &CurvePair, contact: &RayVector, cfg: &TraceConfig) -> Arc {
    let (fwd, _) = march(&pair.h, contact, 1.0, cfg);
    let (bwd, _) = march(&pair.h, contact, -1.0, cfg);
    let ends_at_b3 =
        |v: &Vec<RayVector>| snap_to_inflexion(v.last().unwrap()).projective_distance(&B3) < 1e-9;
    let side = if ends_at_b3(&fwd) { fwd } else { bwd };
    let mut samples = sup_normalized(side);
    samples[0] = contact.normalized().unwrap();
    let endpoint = snap_to_inflexion(samples.last().unwrap());
    samples.push(endpoint.normalized().unwrap());
    Arc {
        curve: CurveSel::H,
        branch_id: BranchId::Q1B3,
        samples,
        endpoints: (contact.normalized().unwrap(), endpoint),
        closed: false,
    }
}

/// k = 0: C2 is the polyline union of the axis segments x=0,y≤0 and
/// y=0,x≤0, joined at the origin ray, ordered from the B₁ end to the B₂ end.
fn fermat_c2_polyline(cfg: &TraceConfig) -> Arc {
    let big = cfg.affine_cutoff;
    let n = 200;
    let mut samples = Vec::with_capacity(2 * n + 3);
    samples.push(B1.neg());
    for i in 0..=n {
        let y = -big * (1.0 - i as f64 / n as f64).powi(3);
        samples.push(RayVector::affine(0.0, y).normalized().unwrap());
    }
    for i in 1..=n {
        let x = -big * (i as f64 / n as f64).powi(3);
        samples.push(RayVector::affine(x, 0.0).normalized().unwrap());
    }
    samples.push(B2.neg());
    Arc {
        curve: CurveSel::H,
        branch_id: BranchId::C2,
        samples,
        endpoints: (B1.neg(), B2.neg()),
        closed: false,
    }
}

/// Real intersections of the line through `p1`, `p2` with the cubic,
/// returned as rays with multiplicities summing to at most 3.
pub fn line_cubic_intersections(
    c: &TernaryCubic,
    p1: &RayVector,
    p2: &RayVector,
) -> Result<Vec<(RayVector, usize)>, Error> {
    let cr = p1.cross(p2);
    if cr.norm() <= 1e-12 * p1.norm() * p2.norm() {
        return Err(Error::IdenticalPoints);
    }
    let t = c.trilinear();
    // restriction to s·p1 + u·p2: binary cubic a·s³ + b·s²u + c2·s·u² + d·u³
    let a = c.evaluate(p1);
    let b = 3.0 * t.apply(p1, p1, p2);
    let c2c = 3.0 * t.apply(p1, p2, p2);
    let d = c.evaluate(p2);
    let scale = a.abs().max(b.abs()).max(c2c.abs()).max(d.abs());
    if scale == 0.0 {
        return Err(Error::DomainError("line lies on the cubic".into()));
    }

    // projective parameters (s : u) of the roots; endpoints that lie on the
    // curve make the corresponding end coefficient vanish, so deflate those
    // roots exactly rather than feeding a near-degenerate cubic to the solver
    let eps = 1e-9 * scale;
    let mut params: Vec<((f64, f64), usize)> = Vec::new();
    match (a.abs() <= eps, d.abs() <= eps) {
        (true, true) => {
            // t·s·(b·s + c2·t) up to the dropped coefficients
            if b.abs() <= eps && c2c.abs() <= eps {
                return Err(Error::DomainError("line lies on the cubic".into()));
            }
            params.push(((1.0, 0.0), 1));
            params.push(((0.0, 1.0), 1));
            params.push(((-c2c, b), 1));
        }
        (true, false) => {
            // (1 : 0) is a root; deflate to b·s² + c2·s·u + d·u²
            if b.abs() <= eps {
                if c2c.abs() <= eps {
                    params.push(((1.0, 0.0), 3));
                } else {
                    params.push(((1.0, 0.0), 2));
                    params.push(((-d / c2c, 1.0), 1));
                }
            } else {
                params.push(((1.0, 0.0), 1));
                for (r, m) in crate::roots::quadratic_roots(b, c2c, d) {
                    params.push(((r, 1.0), m));
                }
            }
        }
        (false, true) => {
            // (0 : 1) is a root; deflate to a·s² + b·s·u + c2·u²
            if c2c.abs() <= eps {
                if b.abs() <= eps {
                    params.push(((0.0, 1.0), 3));
                } else {
                    params.push(((0.0, 1.0), 2));
                    params.push(((1.0, -a / b), 1));
                }
            } else {
                params.push(((0.0, 1.0), 1));
                for (r, m) in crate::roots::quadratic_roots(a, b, c2c) {
                    params.push(((r, 1.0), m));
                }
            }
        }
        (false, false) => {
            for (r, m) in cubic_roots(a, b, c2c, d) {
                params.push(((r, 1.0), m));
            }
        }
    }

    // cluster in the chordal metric on P¹ and merge multiplicities
    let chordal = |p: (f64, f64), q: (f64, f64)| -> f64 {
        (p.0 * q.1 - p.1 * q.0).abs()
            / ((p.0 * p.0 + p.1 * p.1).sqrt() * (q.0 * q.0 + q.1 * q.1).sqrt())
    };
    let mut merged: Vec<((f64, f64), usize)> = Vec::new();
    'outer: for (p, m) in params {
        for (q, mm) in &mut merged {
            if chordal(p, *q) < 1e-6 {
                *mm += m;
                continue 'outer;
            }
        }
        merged.push((p, m));
    }

    let mut out = Vec::with_capacity(merged.len());
    for ((s, u), m) in merged {
        let pt = p1.scale(s).add(&p2.scale(u));
        out.push((pt.canonical_orientation().normalized()?, m));
    }
    Ok(out)
}

/// Affine-region check used by the branch invariants (per regime of k).
pub fn branch_region_ok(k: f64, id: BranchId, sample: &RayVector) -> bool {
    let aff = sample.to_affine();
    match (id, aff) {
        (_, None) => true, // endpoint rays at infinity
        (BranchId::C1, Some((x, y))) => {
            if k > 1.0 {
                x < 1e-9 && y < 1e-9
            } else {
                x > -1e-9 && y > -1e-9 && x + y > 1.0 - 1e-9
            }
        }
        (BranchId::C2, Some((x, y))) => {
            if k > 1.0 {
                x > -1e-9 && y > -1e-9 && x + y > 1.0 - 1e-9
            } else if k.abs() < 1e-9 {
                (x.abs() < 1e-9 && y < 1e-9) || (y.abs() < 1e-9 && x < 1e-9)
            } else {
                x < 1e-9 && y < 1e-9
            }
        }
        (BranchId::Bounded, Some((x, y))) => x > -1e-9 && y > -1e-9 && x + y < 1.0 + 1e-9,
        _ => true,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::TernaryCubic;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    fn cfg() -> TraceConfig {
        TraceConfig::default()
    }

    fn assert_on_curve(arc: &Arc, form: &TernaryCubic, tolv: f64) {
        for s in &arc.samples {
            let v = form.evaluate(s);
            assert!(v.abs() < tolv, "sample {:?} has residual {v:.3e}", s.coords);
        }
    }

    #[test]
    fn topology_counts() {
        let t = tol();
        let t5 = curve_topology(5.0, &t).unwrap();
        assert_eq!(t5.f_components, 2);
        assert_eq!(t5.hessian, HessianKind::Smooth { components: 1 });
        let t05 = curve_topology(0.5, &t).unwrap();
        assert_eq!(t05.f_components, 1);
        assert_eq!(t05.hessian, HessianKind::Smooth { components: 2 });
        assert_eq!(curve_topology(0.0, &t).unwrap().hessian, HessianKind::LineTriple);
        assert_eq!(curve_topology(-2.0, &t).unwrap().hessian, HessianKind::LinePlusPoint);
        assert!(curve_topology(1.0, &t).is_err());
    }

    #[test]
    fn inflexions_on_both_curves_and_collinear() {
        let t = tol();
        for &k in &[5.0, -3.0, 0.5] {
            let pair = CurvePair::new(k, &t).unwrap();
            for b in inflexion_points(k, &t).unwrap() {
                assert!(pair.f.evaluate(&b).abs() < 1e-12, "k={k}");
                assert!(pair.h.evaluate(&b).abs() < 1e-9 * pair.h.max_coeff(), "k={k}");
                assert_eq!(b.z(), 0.0);
            }
        }
    }

    #[test]
    fn asymptote_values_k5() {
        let t = tol();
        let asy = asymptotes(5.0, &t).unwrap();
        // x = −1/4, y = −1/4, x+y = 5/4
        let expect = [
            LinearForm3::new([4.0, 0.0, 1.0]),
            LinearForm3::new([0.0, 4.0, 1.0]),
            LinearForm3::new([4.0, 4.0, -5.0]),
        ];
        for (a, e) in asy.iter().zip(&expect) {
            assert!(a.angle_defect(e) < 1e-13);
        }
        // positive multiple of the second polar by construction
        let f = TernaryCubic::hesse_unchecked(3.0);
        let asy3 = asymptotes(3.0, &t).unwrap();
        for (a, b) in asy3.iter().zip([
            f.second_polar(&B1),
            f.second_polar(&B2),
            f.second_polar(&B3),
        ]) {
            assert_eq!(a.covector, b.covector);
        }
    }

    #[test]
    fn asymptotes_concurrent_at_centroid_for_km2() {
        let t = tol();
        let asy = asymptotes(-2.0, &t).unwrap();
        let c = RayVector::affine(1.0 / 3.0, 1.0 / 3.0);
        for a in &asy {
            assert!(a.apply(&c).abs() < 1e-13 * a.sup_norm());
        }
    }

    #[test]
    fn asymptotes_tangent_to_hessian_at_contact_points() {
        let t = tol();
        for &k in &[-5.0, -3.0, -0.5, 0.5, 2.0, 3.0, 5.0, 10.0] {
            let pair = CurvePair::new(k, &t).unwrap();
            let asy = asymptotes(k, &t).unwrap();
            let contacts = [forms::q1_point(k), forms::q2_point(k), forms::r_point(k)];
            for (line, q) in asy.iter().zip(&contacts) {
                let hn = pair.h.max_coeff();
                assert!(line.apply(q).abs() < 1e-7 * line.sup_norm(), "k={k} line residual");
                assert!(pair.h.evaluate(q).abs() < 1e-7 * hn, "k={k} H residual");
                // tangency: the line is proportional to the H-gradient there
                let grad = pair.h.gradient(q);
                let gl = LinearForm3::new([grad.coords[0], grad.coords[1], grad.coords[2]]);
                assert!(line.angle_defect(&gl) < 1e-7, "k={k} tangency defect");
            }
        }
    }

    #[test]
    fn trace_c1_k5_negative_quadrant() {
        let t = tol();
        let pair = CurvePair::new(5.0, &t).unwrap();
        let arc = trace_branch_of(&pair, CurveSel::F, BranchId::C1, &t, &cfg()).unwrap();
        assert_on_curve(&arc, &pair.f, 1e-9 * pair.f.max_coeff().max(1.0));
        for s in &arc.samples {
            assert!(branch_region_ok(5.0, BranchId::C1, s));
        }
        // endpoints are the Notation-style corner rays
        assert!(arc.endpoints.0.ray_distance(&B1.neg()) < 1e-12);
        assert!(arc.endpoints.1.ray_distance(&B2.neg()) < 1e-12);
        // consecutive samples within the configured max step (chordal, with
        // slack for the corrector)
        for w in arc.samples.windows(2) {
            let d = w[0]
                .scale(1.0 / w[0].norm())
                .sub(&w[1].scale(1.0 / w[1].norm()))
                .norm();
            assert!(d < 3.0 * cfg().max_step, "step {d}");
        }
    }

    #[test]
    fn trace_bounded_k5_inside_triangle() {
        let t = tol();
        let pair = CurvePair::new(5.0, &t).unwrap();
        let arc = trace_branch_of(&pair, CurveSel::F, BranchId::Bounded, &t, &cfg()).unwrap();
        assert!(arc.closed);
        assert_on_curve(&arc, &pair.f, 1e-9);
        for s in &arc.samples {
            let (x, y) = s.to_affine().unwrap();
            assert!(x > -1e-9 && y > -1e-9 && x + y < 1.0 + 1e-9, "({x},{y})");
        }
    }

    #[test]
    fn trace_c2_k5_first_quadrant_through_r() {
        let t = tol();
        let pair = CurvePair::new(5.0, &t).unwrap();
        let arc = trace_branch_of(&pair, CurveSel::H, BranchId::C2, &t, &cfg()).unwrap();
        assert_on_curve(&arc, &pair.h, 1e-9 * pair.h.max_coeff());
        for s in &arc.samples {
            assert!(branch_region_ok(5.0, BranchId::C2, s));
        }
        assert!(arc.endpoints.0.ray_distance(&B1) < 1e-12);
        assert!(arc.endpoints.1.ray_distance(&B2) < 1e-12);
        // passes through R = (5/8, 5/8, 1)
        let r = forms::r_point(5.0);
        let i = arc.nearest_sample(&r);
        assert!(arc.samples[i].projective_distance(&r.normalized().unwrap()) < 0.03);
    }

    #[test]
    fn trace_hessian_arcs_k5() {
        let t = tol();
        let pair = CurvePair::new(5.0, &t).unwrap();
        let q1b3 = trace_branch_of(&pair, CurveSel::H, BranchId::Q1B3, &t, &cfg()).unwrap();
        assert_on_curve(&q1b3, &pair.h, 1e-8 * pair.h.max_coeff());
        assert!(q1b3.samples[0].projective_distance(&forms::q1_point(5.0).normalized().unwrap()) < 1e-9);
        assert!(q1b3.endpoints.1.projective_distance(&B3) < 1e-12);
        // x is monotone non-increasing from Q₁ toward B₃ in the affine chart
        let mut prev = f64::INFINITY;
        for s in &q1b3.samples {
            if let Some((x, _)) = s.to_affine() {
                assert!(x <= prev + 1e-7, "x not monotone: {x} after {prev}");
                prev = x;
            }
        }
        let b3q2 = trace_branch_of(&pair, CurveSel::H, BranchId::B3Q2, &t, &cfg()).unwrap();
        assert!(
            b3q2.samples
                .last()
                .unwrap()
                .projective_distance(&forms::q2_point(5.0).normalized().unwrap())
                < 1e-9
        );
    }

    #[test]
    fn trace_c2_split_at_r() {
        let t = tol();
        let pair = CurvePair::new(5.0, &t).unwrap();
        let b1r = trace_branch_of(&pair, CurveSel::H, BranchId::B1R, &t, &cfg()).unwrap();
        let rb2 = trace_branch_of(&pair, CurveSel::H, BranchId::RB2, &t, &cfg()).unwrap();
        let r = forms::r_point(5.0).normalized().unwrap();
        assert!(b1r.samples.last().unwrap().ray_distance(&r) < 1e-12);
        assert!(rb2.samples[0].ray_distance(&r) < 1e-12);
    }

    #[test]
    fn trace_k_below_one() {
        let t = tol();
        for &k in &[-3.0, -0.5, 0.5] {
            let pair = CurvePair::new(k, &t).unwrap();
            let c1 = trace_branch_of(&pair, CurveSel::F, BranchId::C1, &t, &cfg()).unwrap();
            for s in &c1.samples {
                assert!(branch_region_ok(k, BranchId::C1, s), "k={k}");
            }
            let c2 = trace_branch_of(&pair, CurveSel::H, BranchId::C2, &t, &cfg()).unwrap();
            for s in &c2.samples {
                assert!(branch_region_ok(k, BranchId::C2, s), "k={k}");
            }
            let oval = trace_branch_of(&pair, CurveSel::H, BranchId::Bounded, &t, &cfg()).unwrap();
            assert!(oval.closed);
            for s in &oval.samples {
                assert!(branch_region_ok(k, BranchId::Bounded, s), "k={k}");
            }
        }
    }

    #[test]
    fn fermat_c2_and_km2_c3() {
        let t = tol();
        let pair0 = CurvePair::new(0.0, &t).unwrap();
        let c2 = trace_branch_of(&pair0, CurveSel::H, BranchId::C2, &t, &cfg()).unwrap();
        assert_on_curve(&c2, &pair0.h, 1e-9 * pair0.h.max_coeff().max(1.0));
        let pairm2 = CurvePair::new(-2.0, &t).unwrap();
        let c3 = trace_branch_of(&pairm2, CurveSel::H, BranchId::C3, &t, &cfg()).unwrap();
        assert_on_curve(&c3, &pairm2.h, 1e-9 * pairm2.h.max_coeff());
        assert!(trace_branch_of(&pairm2, CurveSel::H, BranchId::C2, &t, &cfg()).is_err());
        assert!(trace_branch_of(&pair0, CurveSel::H, BranchId::Q1B3, &t, &cfg()).is_err());
    }

    #[test]
    fn q1q2_arc_for_k_below_minus_two() {
        let t = tol();
        let pair = CurvePair::new(-3.0, &t).unwrap();
        let arc = trace_branch_of(&pair, CurveSel::H, BranchId::Q1Q2, &t, &cfg()).unwrap();
        let q3 = forms::r_point(-3.0).normalized().unwrap();
        // arc avoids Q₃ = (3/8, 3/8)
        for s in &arc.samples {
            assert!(s.projective_distance(&q3) > 0.02);
        }
        assert!(arc.samples[0].projective_distance(&forms::q1_point(-3.0).normalized().unwrap()) < 1e-9);
    }

    #[test]
    fn line_cubic_at_infinity_gives_inflexions() {
        let f = TernaryCubic::hesse_unchecked(5.0);
        let roots = line_cubic_intersections(&f, &B1, &B2).unwrap();
        assert_eq!(roots.len(), 3);
        let mut want = vec![B1, B2, RayVector::new(1.0, -1.0, 0.0)];
        for (r, m) in roots {
            assert_eq!(m, 1);
            let pos = want
                .iter()
                .position(|w| w.projective_distance(&r) < 1e-9)
                .expect("unexpected intersection");
            want.remove(pos);
        }
    }

    #[test]
    fn line_cubic_inflexion_tangent_triple() {
        let f = TernaryCubic::hesse_unchecked(5.0);
        // tangent at B₁ is the asymptote x = −1/4: second point (−1/4, 0, 1)
        let p2 = RayVector::affine(-0.25, 0.0);
        let roots = line_cubic_intersections(&f, &B1, &p2).unwrap();
        assert_eq!(roots.len(), 1);
        assert_eq!(roots[0].1, 3);
        assert!(roots[0].0.projective_distance(&B1) < 1e-6);
    }

    #[test]
    fn line_cubic_symmetry_and_multiplicity_parity() {
        let f = TernaryCubic::hesse_unchecked(5.0);
        let mut rng = crate::rng::SplitMix64::new(17);
        for _ in 0..200 {
            let p1 = RayVector::from_coords(rng.unit_sup_ray());
            let p2 = RayVector::from_coords(rng.unit_sup_ray());
            let (Ok(a), Ok(b)) = (
                line_cubic_intersections(&f, &p1, &p2),
                line_cubic_intersections(&f, &p2, &p1),
            ) else {
                continue;
            };
            let suma: usize = a.iter().map(|r| r.1).sum();
            let sumb: usize = b.iter().map(|r| r.1).sum();
            assert_eq!(suma, sumb);
            // generic chords meet a real cubic in 1 or 3 points (with mult.)
            assert!(suma == 1 || suma == 3, "sum {suma}");
            for (ra, _) in &a {
                assert!(
                    b.iter().any(|(rb, _)| rb.projective_distance(ra) < 1e-9),
                    "root sets differ"
                );
            }
        }
        assert!(matches!(
            line_cubic_intersections(&f, &B1, &B1.scale(2.0)),
            Err(Error::IdenticalPoints)
        ));
    }
}
