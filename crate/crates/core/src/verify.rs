//! The acceptance suite: one deterministic, seeded check per criterion.
//! Shared by the `acceptance` integration tests and the CLI `verify`
//! subcommand, which prints one pass/fail line per criterion.

use crate::cone_atlas::ConeAtlas;
use crate::curve_geometry::{CurvePair, TraceConfig};
use crate::error::Error;
use crate::forms::{self, hessian_parameter, siblings, TernaryCubic};
use crate::ray::{LinearForm3, RayVector, B1, B2};
use crate::render::{preset, render_figure};
use crate::rng::SplitMix64;
use crate::scenario;
use crate::steinian;
use crate::tolerances::Tolerances;
use crate::visibility::VisibilityCtx;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CriterionResult {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub details: String,
}

impl CriterionResult {
    pub fn line(&self) -> String {
        format!(
            "{} {:2}  {:<24} {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.details
        )
    }
}

pub const CRITERIA: [(u8, &str); 14] = [
    (1, "hessian-identity"),
    (2, "hessian-closed-form"),
    (3, "conic-identities"),
    (4, "steinian-suite"),
    (5, "zero-count-tables"),
    (6, "visibility-witnesses"),
    (7, "component-atlas"),
    (8, "siblings-e-levels"),
    (9, "pole-solver"),
    (10, "lambda-bound"),
    (11, "fermat-case-table"),
    (12, "km2-facts"),
    (13, "figures"),
    (14, "integral-enumeration"),
];

pub fn run_all(seed: u64, tol: &Tolerances) -> Vec<CriterionResult> {
    CRITERIA
        .iter()
        .map(|(id, _)| run_criterion(*id, seed, tol))
        .collect()
}

pub fn run_criterion(id: u8, seed: u64, tol: &Tolerances) -> CriterionResult {
    let name = CRITERIA
        .iter()
        .find(|(i, _)| *i == id)
        .map(|(_, n)| *n)
        .unwrap_or("unknown");
    let out = match id {
        1 => c01_hessian_identity(seed, tol),
        2 => c02_hessian_closed_form(tol),
        3 => c03_conic_identities(tol),
        4 => c04_steinian_suite(tol),
        5 => c05_zero_count_tables(seed, tol),
        6 => c06_visibility_witnesses(seed, tol),
        7 => c07_component_atlas(seed, tol),
        8 => c08_siblings_e_levels(tol),
        9 => c09_pole_solver(seed, tol),
        10 => c10_lambda_bound(tol),
        11 => c11_fermat_case_table(tol),
        12 => c12_km2_facts(tol),
        13 => c13_figures(tol),
        14 => c14_integral_enumeration(tol),
        _ => Err(Error::InvalidInput(format!("unknown criterion {id}"))),
    };
    match out {
        Ok((passed, details)) => CriterionResult { id, name, passed, details },
        Err(e) => CriterionResult {
            id,
            name,
            passed: false,
            details: format!("error: {e}"),
        },
    }
}

type Check = Result<(bool, String), Error>;

fn c01_hessian_identity(seed: u64, tol: &Tolerances) -> Check {
    let mut rng = SplitMix64::new(seed ^ 0x01);
    let mut worst = 0.0f64;
    for &k in &[-5.0, -3.0, -2.0, -0.5, 0.5, 2.0, 5.0, 10.0] {
        let f = TernaryCubic::hesse(k, tol, true)?;
        let h = f.hessian_cubic();
        let kp = (4.0 - k * k * k) / (3.0 * k * k);
        let fkp = TernaryCubic::hesse(kp, tol, true)?;
        for _ in 0..1000 {
            let d = RayVector::from_coords(rng.unit_sup_ray());
            let hv = h.evaluate(&d);
            let res = (hv + 54.0 * k * k * fkp.evaluate(&d)).abs() / (1.0 + hv.abs());
            worst = worst.max(res);
        }
    }
    Ok((worst < 1e-9, format!("max relative residual {worst:.3e} (tol 1e-9)")))
}

fn c02_hessian_closed_form(_tol: &Tolerances) -> Check {
    let mut worst = 0.0f64;
    for &k in &[2.0, 5.0, -3.0] {
        let h = TernaryCubic::pure_hesse(k).hessian_cubic();
        let mut expect = [0.0f64; 10];
        expect[0] = 54.0 * k * k;
        expect[6] = 54.0 * k * k;
        expect[9] = 54.0 * k * k;
        expect[4] = -27.0 * (8.0 - 2.0 * k * k * k);
        for i in 0..10 {
            worst = worst.max((h.coeffs[i] - expect[i]).abs());
        }
    }
    Ok((worst < 1e-10, format!("max coefficient deviation {worst:.3e} (tol 1e-10)")))
}

fn c03_conic_identities(_tol: &Tolerances) -> Check {
    // G at the centroid for k = −2 is exactly −z²/3
    let f = TernaryCubic::hesse_unchecked(-2.0);
    let q = f.polar_quadric(&RayVector::affine(1.0 / 3.0, 1.0 / 3.0));
    let mut worst_centroid = 0.0f64;
    for i in 0..3 {
        for j in 0..3 {
            let expect = if i == 2 && j == 2 { -1.0 / 3.0 } else { 0.0 };
            worst_centroid = worst_centroid.max((q.matrix[i][j] - expect).abs());
        }
    }
    // restriction of G at the asymptote corner to z = 0 is (k+2)·xy; the
    // polarization normalization T(D,D,D) = F(D) is pinned by the first
    // identity, which forces this constant (the alternative 3(k+2) is
    // inconsistent with −z²/3 under any single normalization)
    let mut worst_corner = 0.0f64;
    for &k in &[-3.0, -5.0] {
        let f = TernaryCubic::hesse_unchecked(k);
        let c = 1.0 / (1.0 - k);
        let q = f.polar_quadric(&RayVector::affine(c, c));
        worst_corner = worst_corner.max(q.matrix[0][0].abs());
        worst_corner = worst_corner.max(q.matrix[1][1].abs());
        worst_corner = worst_corner.max((2.0 * q.matrix[0][1] - (k + 2.0)).abs());
    }
    Ok((
        worst_centroid < 1e-12 && worst_corner < 1e-10,
        format!("centroid dev {worst_centroid:.3e} (tol 1e-12), corner dev {worst_corner:.3e} (tol 1e-10)"),
    ))
}

fn c04_steinian_suite(tol: &Tolerances) -> Check {
    let cfg = TraceConfig::default();
    let mut worst_inv = 0.0f64;
    for &k in &[2.0, 5.0, -3.0] {
        let pair = CurvePair::new(k, tol)?;
        let samples = steinian::hessian_samples(k, 200, tol, &cfg)?;
        for u in &samples {
            let a = match steinian::steinian_map(&pair, u, tol) {
                Ok(a) => a,
                Err(Error::RankError(_)) => continue,
                Err(e) => return Err(e),
            };
            let back = steinian::steinian_map(&pair, &a, tol)?;
            worst_inv = worst_inv.max(back.projective_distance(u));
        }
    }
    let mut worst_b3 = 0.0f64;
    for &k in &[2.0, 5.0, 10.0] {
        let pair = CurvePair::new(k, tol)?;
        let a = steinian::steinian_map(&pair, &crate::ray::B3, tol)?;
        worst_b3 = worst_b3.max(a.projective_distance(&forms::r_point(k).normalized()?));
    }
    let mut worst_tan = 0.0f64;
    for &k in &[5.0, -3.0] {
        let pair = CurvePair::new(k, tol)?;
        for u in steinian::hessian_samples(k, 60, tol, &cfg)? {
            match steinian::verify_steinian_tangency(&pair, &u, tol) {
                Ok((v, d)) => worst_tan = worst_tan.max(v.max(d)),
                Err(Error::RankError(_)) => continue,
                Err(e) => return Err(e),
            }
        }
    }
    let trans = steinian::translation_check(2.0, 50, tol, &cfg)?
        && steinian::translation_check(5.0, 50, tol, &cfg)?;
    // component swap for the two-component Hessian regime
    let mut swap_ok = true;
    for &k in &[-0.5, -3.0] {
        let pair = CurvePair::new(k, tol)?;
        let arcs = steinian::hessian_scan_arcs(k, tol, &cfg)?;
        let in_triangle = |p: &RayVector| {
            p.to_affine()
                .map(|(x, y)| x > 0.0 && y > 0.0 && x + y < 1.0)
                .unwrap_or(false)
        };
        for u in arcs[0].samples.iter().step_by(9) {
            if u.z().abs() < 1e-3 * u.sup_norm() {
                continue;
            }
            if !in_triangle(&steinian::steinian_map(&pair, u, tol)?) {
                swap_ok = false;
            }
        }
        for u in arcs.last().unwrap().samples.iter().step_by(9) {
            match steinian::steinian_map(&pair, u, tol) {
                Ok(a) => {
                    if in_triangle(&a) {
                        swap_ok = false;
                    }
                }
                Err(Error::RankError(_)) => continue,
                Err(e) => return Err(e),
            }
        }
    }
    let pass = worst_inv < 1e-7 && worst_b3 < 1e-9 && worst_tan < 1e-7 && trans && swap_ok;
    Ok((
        pass,
        format!(
            "involution {worst_inv:.2e} (1e-7), alpha(B3) {worst_b3:.2e} (1e-9), tangency {worst_tan:.2e} (1e-7), translation {trans}, swap {swap_ok}"
        ),
    ))
}

fn c05_zero_count_tables(seed: u64, tol: &Tolerances) -> Check {
    let mut rng = SplitMix64::new(seed ^ 0x05);
    let mut disagreements = 0usize;
    let mut parity_bad = 0usize;
    let mut per_region_min = usize::MAX;
    for &k in &[2.0, 3.0, 5.0] {
        let ctx = VisibilityCtx::new(k, tol)?;
        let mut bucket: std::collections::HashMap<String, usize> = Default::default();
        let tau = forms::tau(k);
        let sigma = forms::sigma(k);
        let mut attempts = 0usize;
        while bucket.len() < 7 || bucket.values().any(|c| *c < 200) {
            attempts += 1;
            if attempts > 60_000 {
                break;
            }
            // the strip between the Hessian arc and its asymptote is thin;
            // aim a share of the draws into it directly
            let a = if attempts % 3 == 0 {
                let ax = rng.in_range(-4.0, tau - 1e-3);
                match ctx.q1b3_height_at(ax)? {
                    Some(y_arc) => {
                        let top = sigma - ax;
                        if top <= y_arc {
                            continue;
                        }
                        let b = y_arc + (top - y_arc) * rng.next_f64();
                        RayVector::affine(ax, b)
                    }
                    None => continue,
                }
            } else {
                RayVector::affine(rng.in_range(-4.0, 4.0), rng.in_range(-4.0, 4.0))
            };
            let r = ctx.ga_zero_count(&a)?;
            if r.tie || r.line_pair.is_some() {
                continue;
            }
            let case = r.analytic_case.clone().unwrap_or_default();
            let case = case.strip_prefix("mirrored-").unwrap_or(&case).to_string();
            let c = bucket.entry(case).or_insert(0);
            if *c >= 200 {
                continue;
            }
            *c += 1;
            if r.agree != Some(true) {
                disagreements += 1;
            }
            let total = r.sampled.total();
            if total != 0 && total != 2 && total != 4 {
                parity_bad += 1;
            }
        }
        per_region_min = per_region_min.min(bucket.values().copied().min().unwrap_or(0));
    }
    let pass = disagreements == 0 && parity_bad == 0 && per_region_min >= 200;
    Ok((
        pass,
        format!(
            "0 required: {disagreements} disagreements, {parity_bad} parity faults; min samples per region {per_region_min} (>=200)"
        ),
    ))
}

fn c06_visibility_witnesses(seed: u64, tol: &Tolerances) -> Check {
    let mut rng = SplitMix64::new(seed ^ 0x06);
    let ctx = VisibilityCtx::new(5.0, tol)?;
    let tau = forms::tau(5.0);
    let mut pos_ok = 0usize;
    let mut neg_ok = 0usize;
    let mut pos_seen = 0usize;
    let mut neg_seen = 0usize;
    let mut attempts = 0usize;
    while (pos_seen < 100 || neg_seen < 100) && attempts < 40_000 {
        attempts += 1;
        let a = RayVector::affine(rng.in_range(tau - 2.5, tau - 1e-3), rng.in_range(tau + 1e-3, tau + 3.5));
        let h = ctx.atlas.pair.h.evaluate(&a);
        if h.abs() < 1e-6 {
            continue;
        }
        if h > 0.0 && pos_seen < 100 {
            pos_seen += 1;
            if ctx.classify_arc_visibility(&a)?.satisfied {
                pos_ok += 1;
            }
        } else if h < 0.0 && neg_seen < 100 {
            neg_seen += 1;
            if ctx.classify_arc_visibility(&a)?.satisfied {
                neg_ok += 1;
            }
        }
    }
    // tangent-half-space vs segment agreement at smooth boundary points
    let mut agree = 0usize;
    let mut tested = 0usize;
    for &k in &[2.0, 5.0] {
        let vctx = VisibilityCtx::new(k, tol)?;
        let comp = vctx.atlas.standard_hybrid_id();
        let loop_s = vctx.atlas.components[comp].loop_samples.clone();
        let mut local = 0usize;
        while local < 500 {
            let d0 = loop_s[(rng.next_u64() as usize) % loop_s.len()];
            let a = RayVector::from_coords(rng.unit_sup_ray());
            if d0.z().abs() < 1e-3 {
                continue;
            }
            let Ok(Some(tangent)) = vctx.visible_tangent_test(comp, &a, &d0) else {
                continue;
            };
            let f = &vctx.atlas.pair.f;
            let h = &vctx.atlas.pair.h;
            let wall = if f.evaluate(&d0).abs() / f.max_coeff()
                < h.evaluate(&d0).abs() / h.max_coeff()
            {
                f
            } else {
                h
            };
            let grad = wall.gradient(&d0);
            if grad.dot(&a).abs() < 1e-3 * grad.norm() {
                continue; // knife edge of the extremity
            }
            local += 1;
            tested += 1;
            if vctx.visible(comp, &a, &d0)? == tangent {
                agree += 1;
            }
        }
    }
    let pass = pos_ok == 100 && neg_ok == 100 && agree == tested && tested == 1000;
    Ok((
        pass,
        format!(
            "visible witnesses {pos_ok}/100, non-visible {neg_ok}/100, tangent agreement {agree}/{tested}"
        ),
    ))
}

fn c07_component_atlas(seed: u64, tol: &Tolerances) -> Check {
    let mut rng = SplitMix64::new(seed ^ 0x07);
    let mut counts_ok = true;
    let mut corners_ok = true;
    let mut convex_ok = true;
    for (k, expect) in [(5.0, 4usize), (0.5, 4), (0.0, 4), (-2.0, 3)] {
        let atlas = ConeAtlas::new(k, tol)?;
        if atlas.components.len() != expect {
            counts_ok = false;
        }
        let hyb = &atlas.components[atlas.standard_hybrid_id()];
        let want = if k > 1.0 { [B1.neg(), B2.neg()] } else { [B1, B2] };
        for (c, w) in hyb.corners.iter().zip(want.iter()) {
            if c.ray_distance(w) > 1e-12 {
                corners_ok = false;
            }
        }
        for c in &atlas.components {
            if !atlas.component_convexity(c.id, 1000, &mut rng) {
                convex_ok = false;
            }
        }
    }
    Ok((
        counts_ok && corners_ok && convex_ok,
        format!("counts {counts_ok}, corner rays {corners_ok}, convexity(1e3) {convex_ok}"),
    ))
}

fn c08_siblings_e_levels(tol: &Tolerances) -> Check {
    let s = siblings(1.0, true)?;
    let factor_dev = (s[0] + 2.0).abs().max((s[1] + 2.0).abs()).max((s[2] - 1.0).abs());
    let mut rt = 0.0f64;
    let mut ordered = true;
    for &kp in &[1.5, 2.0, 5.0, 20.0] {
        for k in siblings(kp, false)? {
            rt = rt.max((hessian_parameter(k, tol)? - kp).abs());
        }
        let e = steinian::e_levels(kp)?;
        ordered &= e[0] < e[1] && e[1] < e[2];
    }
    Ok((
        factor_dev < 1e-12 && rt < 1e-9 && ordered,
        format!("siblings(1) dev {factor_dev:.2e} (1e-12), round-trip {rt:.2e} (1e-9), e-ordering {ordered}"),
    ))
}

fn c09_pole_solver(seed: u64, tol: &Tolerances) -> Check {
    let mut rng = SplitMix64::new(seed ^ 0x09);
    let mut worst = 0.0f64;
    let mut worst_boundary = 0.0f64;
    for &k in &[2.0, 5.0] {
        let atlas = ConeAtlas::new(k, tol)?;
        let comp = atlas.bounded_positive_id().unwrap();
        let tri = atlas.pair.f.trilinear();
        for _ in 0..100 {
            let l_ray = atlas.interior_sample(comp, &mut rng);
            let scale = 0.5 + 1.5 * rng.next_f64();
            let l_vec = l_ray.scale(scale);
            let l = tri.contract2(&l_vec, &l_vec);
            let d = scenario::pole_solve(&atlas, comp, &l, tol)?;
            worst = worst.max(d.sub(&l_vec).sup_norm() / l_vec.sup_norm());
        }
        let arc = &atlas.components[comp].boundary[0].arc;
        for idx in [arc.samples.len() / 5, arc.samples.len() / 2] {
            let d0 = arc.samples[idx];
            let l = tri.contract2(&d0, &d0);
            let d = scenario::pole_solve(&atlas, comp, &l, tol)?;
            worst_boundary = worst_boundary.max(d.sub(&d0).sup_norm());
        }
    }
    Ok((
        worst < 1e-8 && worst_boundary < 1e-7,
        format!("round-trip {worst:.2e} (1e-8), boundary recovery {worst_boundary:.2e} (1e-7)"),
    ))
}

fn c10_lambda_bound(tol: &Tolerances) -> Check {
    let atlas = ConeAtlas::new(5.0, tol)?;
    let comp = atlas.bounded_positive_id().unwrap();
    let tri = atlas.pair.f.trilinear();
    // cubic-roots method
    let e1 = RayVector::new(0.0, 0.0, 1.0);
    let d1 = RayVector::affine(1.0 / 3.0, 1.0 / 3.0);
    let r1 = scenario::lambda_bound(&atlas, comp, &e1, &d1)?;
    let mut cubic_ok = r1.method == scenario::LambdaMethod::CubicRoots;
    for i in 1..=20 {
        let lam = r1.lambda0 * (1.0 + i as f64 / 20.0);
        if atlas.pair.f.evaluate(&d1.sub(&e1.scale(lam))) <= 0.0 {
            cubic_ok = false;
        }
    }
    // negative-form method
    let e2 = RayVector::new(-1.0, -1.0, 0.0);
    let sub = atlas.q_subcone(comp, &e2)?;
    let d2 = sub.regions[0].witness;
    let r2 = scenario::lambda_bound(&atlas, comp, &e2, &d2)?;
    let mut neg_ok = r2.method == scenario::LambdaMethod::NegativeForm;
    for i in 1..=20 {
        let lam = r2.lambda0 * (1.0 + 1e-6) * (1.0 + i as f64 / 20.0);
        let dl = d2.sub(&e2.scale(lam));
        for c in r2.certificates.iter().step_by(5) {
            if tri.apply(&dl, &dl, c) > 1e-10 {
                neg_ok = false;
            }
        }
    }
    // homogeneity in D
    let mut hom = 0.0f64;
    for (e, d) in [(e1, d1), (e2, d2)] {
        let ra = scenario::lambda_bound(&atlas, comp, &e, &d)?;
        let rb = scenario::lambda_bound(&atlas, comp, &e, &d.scale(2.0))?;
        hom = hom.max((rb.lambda0 - 2.0 * ra.lambda0).abs() / (1.0 + ra.lambda0));
    }
    Ok((
        cubic_ok && neg_ok && hom < 1e-6,
        format!("cubic-roots {cubic_ok}, negative-form {neg_ok}, homogeneity {hom:.2e} (1e-6)"),
    ))
}

fn c11_fermat_case_table(tol: &Tolerances) -> Check {
    let atlas = ConeAtlas::new(0.0, tol)?;
    let mut rng = SplitMix64::new(0xF0);
    let probes: Vec<RayVector> = (0..40).map(|_| atlas.interior_sample(0, &mut rng)).collect();
    let n = 200usize;
    let mut unique_ok = true;
    let mut facts_ok = true;
    let mut sampled_checked = 0usize;
    for i in 0..n {
        for j in 0..n {
            let a = -1.4995 + 4.0 * i as f64 / n as f64;
            let b = -1.4995 + 4.0 * j as f64 / n as f64;
            let ap = RayVector::affine(a, b);
            let case = match scenario::fermat_classify(&ap) {
                Ok(c) => c,
                Err(_) => {
                    unique_ok = false;
                    continue;
                }
            };
            if case.tie {
                unique_ok = false;
            }
            // recorded sign facts: H sign recomputed, axis-segment zero
            // counts re-derived by sign scanning, negativity probes
            let h = -a * b * (1.0 - a - b);
            if (h > 1e-12 && case.facts.h_sign != 1) || (h < -1e-12 && case.facts.h_sign != -1) {
                facts_ok = false;
            }
            if (i + j) % 97 == 0 {
                sampled_checked += 1;
                let f0 = &atlas.pair.f;
                let q = f0.polar_quadric(&ap);
                // projective sweep t = -u/(1-u) covers the whole segment
                // down to the ray at infinity
                let scan = |axis_x: bool| -> usize {
                    let mut count = 0;
                    let mut prev = f64::NAN;
                    for s in 0..=800 {
                        let u = s as f64 / 800.0;
                        let p = if u >= 1.0 {
                            if axis_x {
                                RayVector::new(-1.0, 0.0, 0.0)
                            } else {
                                RayVector::new(0.0, -1.0, 0.0)
                            }
                        } else {
                            let t = -u / (1.0 - u);
                            if axis_x {
                                RayVector::affine(t, 0.0).normalized().unwrap()
                            } else {
                                RayVector::affine(0.0, t).normalized().unwrap()
                            }
                        };
                        let v = q.evaluate(&p);
                        if !prev.is_nan() && prev.signum() != v.signum() {
                            count += 1;
                        }
                        prev = v;
                    }
                    count
                };
                if scan(false) != case.facts.zeros_l1 || scan(true) != case.facts.zeros_l2 {
                    facts_ok = false;
                }
                if !scenario::fermat_facts_hold(&case, &ap, &probes) {
                    facts_ok = false;
                }
            }
        }
    }
    Ok((
        unique_ok && facts_ok,
        format!("unique case per grid point {unique_ok}, sign facts hold {facts_ok} ({sampled_checked} sampled re-derivations)"),
    ))
}

fn c12_km2_facts(tol: &Tolerances) -> Check {
    let (t1, _) = scenario::km2_functions(1.0)?;
    let (t4, s4) = scenario::km2_functions(0.25)?;
    let v_ok = (t1 - 1.0).abs() < 1e-12
        && (s4.unwrap() - 0.875).abs() < 1e-5
        && (t4 - 0.15139).abs() < 1e-5;
    let mut grid_ok = true;
    for i in 1..=50 {
        let mu = 0.5 * i as f64 / 51.0;
        let (t, s) = scenario::km2_functions(mu)?;
        if s.unwrap() <= t {
            grid_ok = false;
        }
    }
    let mut checks_ok = true;
    for &mu in &[0.25, 1.0, 1.5] {
        let rep = scenario::km2_fact_check(mu, 120, tol)?;
        checks_ok &= rep.missing_line_ok
            && rep.splitting_line_ok
            && rep.t_intersection_ok
            && rep.e2_negativity_ok
            && rep.q_region_count == 1;
    }
    Ok((
        v_ok && grid_ok && checks_ok,
        format!("t(1)/s(1/4)/t(1/4) {v_ok}, s>t grid {grid_ok}, fact checks {checks_ok}"),
    ))
}

fn c13_figures(tol: &Tolerances) -> Check {
    let mut deterministic = true;
    let mut shade_ok = true;
    for (name, expect) in [
        ("fig1", 0usize),
        ("fig2", 1),
        ("fig3", 1),
        ("fig4", 2),
        ("fig5", 2),
    ] {
        let spec = preset(name)?;
        let a = render_figure(&spec, tol)?;
        let b = render_figure(&spec, tol)?;
        if a != b {
            deterministic = false;
        }
        if a.matches("class=\"shade\"").count() != expect {
            shade_ok = false;
        }
    }
    // fig1 shows both F components and the three asymptotes
    let fig1 = render_figure(&preset("fig1")?, tol)?;
    let bounded = fig1
        .split("id=\"cubic-bounded\"")
        .nth(1)
        .map(|s| s.split("</g>").next().unwrap().matches("<path").count())
        .unwrap_or(0);
    let unbounded = fig1
        .split("id=\"cubic-unbounded\"")
        .nth(1)
        .map(|s| s.split("</g>").next().unwrap().matches("<path").count())
        .unwrap_or(0);
    let lines = fig1.matches("<line").count();
    // asymptote x = −1/4 maps to a vertical line in the fig1 viewport
    let spec1 = preset("fig1")?;
    let l = crate::render::clip_line_to_viewport(&LinearForm3::new([4.0, 0.0, 1.0]), spec1.viewport);
    let asy_ok = matches!(l, Some((p, q)) if (p.0 + 0.25).abs() < 1e-9 && (q.0 + 0.25).abs() < 1e-9);
    let structure = bounded >= 1 && unbounded >= 1 && lines == 3 && asy_ok;
    Ok((
        deterministic && shade_ok && structure,
        format!("byte-deterministic {deterministic}, shade counts {shade_ok}, fig1 structure {structure}"),
    ))
}

fn c14_integral_enumeration(tol: &Tolerances) -> Check {
    let atlas = ConeAtlas::new(5.0, tol)?;
    let comp = atlas.bounded_positive_id().unwrap();
    let got = scenario::enumerate_integral(&atlas, &scenario::RegionSpec::Component(comp), 10, (1.0, 30.0))?;
    let mut oracle = Vec::new();
    for z in (-10i64..=10).rev() {
        for y in (-10i64..=10).rev() {
            for x in (-10i64..=10).rev() {
                if x == 0 && y == 0 && z == 0 {
                    continue;
                }
                let e = RayVector::new(x as f64, y as f64, z as f64);
                let v = atlas.pair.f.evaluate(&e);
                if (1.0..=30.0).contains(&v) && atlas.contains_interior(comp, &e) {
                    oracle.push([x, y, z]);
                }
            }
        }
    }
    oracle.sort();
    let oracle_ok = got == oracle && !got.is_empty();
    // k = −2 ray window [1, 9] admits exactly m = 1
    let am2 = ConeAtlas::new(-2.0, tol)?;
    let ray = scenario::enumerate_integral(
        &am2,
        &scenario::RegionSpec::Ray(RayVector::new(-1.0, -1.0, -3.0)),
        10,
        (1.0, 9.0),
    )?;
    let ray_ok = ray == vec![[-1, -1, -3]];
    Ok((
        oracle_ok && ray_ok,
        format!("reversed-loop oracle {oracle_ok} ({} classes), ray window {ray_ok}", got.len()),
    ))
}
