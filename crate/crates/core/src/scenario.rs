//! Decision machinery on top of the cone atlas: the λ-bound certificates,
//! the double-polar (pole) equation, the Fermat-parameter case table, the
//! k = −2 special facts with t(μ)/s(μ), and bounded integral-class
//! enumeration.

use crate::cone_atlas::{ComponentKind, ConeAtlas};
use crate::error::Error;

use crate::ray::{LinearForm3, RayVector, B2};
use crate::rng::SplitMix64;
use crate::tolerances::Tolerances;
use serde::{Deserialize, Serialize};

/// Which certificate backs a λ-bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LambdaMethod {
    /// F(E) ≥ 0: the linear form E² is strictly negative on the closure of
    /// Q, and (D−λE)² is negative on all certificate rays for λ ≥ λ₀.
    NegativeForm,
    /// F(E) < 0: λ₀ is the larger positive root λ₂ of t ↦ (D−tE)³, whose
    /// sign pattern is +, −, + on (0,λ₁), (λ₁,λ₂), (λ₂,∞).
    CubicRoots,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LambdaBoundResult {
    pub lambda0: f64,
    pub method: LambdaMethod,
    /// NEGATIVE_FORM: sampled rays of the closure of Q.
    pub certificates: Vec<RayVector>,
    /// CUBIC_ROOTS: the roots λ₁ < λ₂.
    pub cubic_roots: Option<(f64, f64)>,
}

/// Upper bound λ₀ on the λ for which (D − λE) can still satisfy the
/// positivity the subcone certifies.
pub fn lambda_bound(
    atlas: &ConeAtlas,
    comp: usize,
    e: &RayVector,
    d: &RayVector,
) -> Result<LambdaBoundResult, Error> {
    if e.is_zero() || d.is_zero() {
        return Err(Error::InvalidInput("zero class".into()));
    }
    if atlas.contains_interior(comp, e) {
        return Err(Error::DomainError("E lies inside the component".into()));
    }
    let tri = atlas.pair.f.trilinear();
    let q_e = atlas.pair.f.polar_quadric(e);
    if !(atlas.contains_interior(comp, d) && q_e.evaluate(d) > 0.0) {
        return Err(Error::DomainError(
            "D must lie in a subcone region of the component".into(),
        ));
    }

    let f_e = atlas.pair.f.evaluate(e);
    if f_e >= 0.0 {
        // certificate rays: a dense sample of the closure of Q
        let sub = atlas.q_subcone(comp, e)?;
        let region = atlas
            .q_region_of(&sub, &d.normalized()?)
            .ok_or_else(|| Error::DomainError("D not inside the q-subcone".into()))?;
        let reg = &sub.regions[region];
        let mut certs: Vec<RayVector> = Vec::new();
        for arcs in [&reg.boundary_arcs, &reg.conic_arcs] {
            for arc in arcs.iter() {
                for s in arc.iter().step_by(2) {
                    certs.push(*s);
                }
            }
        }
        certs.push(reg.witness);
        let mut rng = SplitMix64::new(0xCE27);
        let mut added = 0;
        let mut attempts = 0;
        while added < 200 && attempts < 10_000 {
            attempts += 1;
            let p = atlas.interior_sample(comp, &mut rng);
            let mix = p.lerp(&reg.witness, 0.3 * rng.next_f64());
            if let Ok(pn) = mix.normalized() {
                if q_e.evaluate(&pn) > 0.0 {
                    certs.push(pn);
                    added += 1;
                }
            }
        }
        // the linear form E² must be strictly negative on the closure
        let e2 = atlas.pair.f.second_polar(e);
        for c in &certs {
            if e2.apply(c) >= 0.0 {
                return Err(Error::HypothesisFailed(format!(
                    "E^2 not negative at certificate ray {:?}",
                    c.coords
                )));
            }
        }
        // h(λ) = max over certificates of (D−λE)²·c; bisect for the tail
        let h = |lam: f64| -> f64 {
            let dl = d.sub(&e.scale(lam));
            certs
                .iter()
                .map(|c| tri.apply(&dl, &dl, c))
                .fold(f64::NEG_INFINITY, f64::max)
        };
        if h(0.0) < 0.0 {
            return Ok(LambdaBoundResult {
                lambda0: 0.0,
                method: LambdaMethod::NegativeForm,
                certificates: certs,
                cubic_roots: None,
            });
        }
        let mut hi = 1.0;
        let mut guard = 0;
        while h(hi) >= 0.0 && guard < 200 {
            hi *= 2.0;
            guard += 1;
        }
        if guard == 200 {
            return Err(Error::NoConvergence(h(hi)));
        }
        let lambda0 = crate::roots::bisect(h, 0.0, hi, 80);
        Ok(LambdaBoundResult {
            lambda0,
            method: LambdaMethod::NegativeForm,
            certificates: certs,
            cubic_roots: None,
        })
    } else {
        // cubic (D − tE)³ = c0 + c1 t + c2 t² + c3 t³
        let c0 = atlas.pair.f.evaluate(d);
        let c1 = -3.0 * tri.apply(d, d, e);
        let c2 = 3.0 * tri.apply(d, e, e);
        let c3 = -f_e; // = −F(E) > 0
        let roots: Vec<f64> = crate::roots::cubic_roots(c3, c2, c1, c0)
            .into_iter()
            .filter(|(r, _)| *r > 0.0)
            .map(|(r, _)| r)
            .collect();
        if roots.len() != 2 {
            return Err(Error::HypothesisFailed(format!(
                "expected two positive roots of (D-tE)^3, found {roots:?}"
            )));
        }
        let (l1, l2) = (roots[0], roots[1]);
        // sign pattern +, −, + on a t-grid
        let cubic = |t: f64| ((c3 * t + c2) * t + c1) * t + c0;
        for i in 0..40 {
            let t = l1 * i as f64 / 40.0;
            if cubic(t) < -1e-9 * c0.abs() {
                return Err(Error::HypothesisFailed("positivity fails before λ₁".into()));
            }
        }
        let mid = 0.5 * (l1 + l2);
        if cubic(mid) >= 0.0 {
            return Err(Error::HypothesisFailed("negativity fails between the roots".into()));
        }
        if cubic(l2 * 1.5 + 1.0) <= 0.0 {
            return Err(Error::HypothesisFailed("positivity fails after λ₂".into()));
        }
        Ok(LambdaBoundResult {
            lambda0: l2,
            method: LambdaMethod::CubicRoots,
            certificates: vec![],
            cubic_roots: Some((l1, l2)),
        })
    }
}

fn solve3(m: &[[f64; 3]; 3], rhs: &[f64; 3]) -> Option<[f64; 3]> {
    let mut a = [
        [m[0][0], m[0][1], m[0][2], rhs[0]],
        [m[1][0], m[1][1], m[1][2], rhs[1]],
        [m[2][0], m[2][1], m[2][2], rhs[2]],
    ];
    for col in 0..3 {
        let mut piv = col;
        for r in col + 1..3 {
            if a[r][col].abs() > a[piv][col].abs() {
                piv = r;
            }
        }
        if a[piv][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, piv);
        for r in 0..3 {
            if r == col {
                continue;
            }
            let f = a[r][col] / a[col][col];
            for c in col..4 {
                a[r][c] -= f * a[col][c];
            }
        }
    }
    Some([a[0][3] / a[0][0], a[1][3] / a[1][1], a[2][3] / a[2][2]])
}

/// Solve T(D,D,·) = l for the unique D in the closed bounded-positive cone.
/// Damped Newton with the polar matrix as the Jacobian (nonsingular on the
/// cone because the Hessian form does not vanish there).
pub fn pole_solve(
    atlas: &ConeAtlas,
    comp: usize,
    l: &LinearForm3,
    tol: &Tolerances,
) -> Result<RayVector, Error> {
    if atlas.components[comp].kind != ComponentKind::BoundedPositive {
        return Err(Error::DomainError(
            "the pole equation is posed on the bounded positive cone".into(),
        ));
    }
    let lscale = l.sup_norm();
    if lscale == 0.0 {
        return Err(Error::InvalidInput("zero linear form".into()));
    }
    // hypothesis: l ≥ 0 on the sampled closure
    let c = &atlas.components[comp];
    for s in &c.loop_samples {
        if l.apply(s) < -1e-9 * lscale {
            return Err(Error::HypothesisFailed(format!(
                "l changes sign on the component closure at {:?}",
                s.coords
            )));
        }
    }

    let tri = atlas.pair.f.trilinear();
    let residual = |d: &RayVector| -> [f64; 3] {
        let td = tri.contract2(d, d);
        [
            td.covector[0] - l.covector[0],
            td.covector[1] - l.covector[1],
            td.covector[2] - l.covector[2],
        ]
    };
    let res_norm = |r: &[f64; 3]| r.iter().fold(0.0f64, |m, v| m.max(v.abs()));

    let mut starts: Vec<RayVector> = vec![c.witness.normalized()?];
    let mut rng = SplitMix64::new(0x90E);
    for _ in 0..6 {
        starts.push(atlas.interior_sample(comp, &mut rng));
    }
    for start in starts {
        // initial scale: T((sD)(sD)·) = s²T(D,D,·)
        let t0 = tri.contract2(&start, &start);
        let s0 = (lscale / t0.sup_norm().max(1e-300)).sqrt();
        let mut d = start.scale(s0);
        let mut best = f64::INFINITY;
        for _ in 0..120 {
            let r = residual(&d);
            let rn = res_norm(&r);
            if rn < tol.newton_residual * (1.0 + lscale) {
                return Ok(d);
            }
            best = best.min(rn);
            // Jacobian is 2·M(D) with M the polar matrix of F at D
            let m = tri.polar(&d).matrix;
            let jac = [
                [2.0 * m[0][0], 2.0 * m[0][1], 2.0 * m[0][2]],
                [2.0 * m[1][0], 2.0 * m[1][1], 2.0 * m[1][2]],
                [2.0 * m[2][0], 2.0 * m[2][1], 2.0 * m[2][2]],
            ];
            let Some(step) = solve3(&jac, &r) else { break };
            // damped update: halve until the residual decreases
            let mut t = 1.0;
            let mut improved = false;
            for _ in 0..30 {
                let cand = RayVector::new(
                    d.coords[0] - t * step[0],
                    d.coords[1] - t * step[1],
                    d.coords[2] - t * step[2],
                );
                if res_norm(&residual(&cand)) < rn {
                    d = cand;
                    improved = true;
                    break;
                }
                t *= 0.5;
            }
            if !improved {
                break;
            }
        }
        let _ = best;
    }
    Err(Error::NoConvergence(f64::NAN))
}

/// Case table for the Fermat parameter k = 0: the standard component is
/// bounded by C1 (first-quadrant branch, asymptotes x = 1 and y = 1) and by
/// the axis segments L1: x=0, y≤0 and L2: y=0, x≤0.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FermatCase {
    /// 1..=6 per the inequality table on (a, b).
    pub case_id: u8,
    /// True when the mirrored (a ↔ b) inequalities matched.
    pub mirrored: bool,
    /// Exact boundary coincidence; the lowest matching case is returned.
    pub tie: bool,
    pub facts: FermatFacts,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FermatFacts {
    /// Sign of H(A) = −ab(1−a−b).
    pub h_sign: i8,
    /// F(A) > 0 means A lies inside the standard cone itself (far part of
    /// case 1), where no tangent reaches C1.
    pub inside_standard_cone: bool,
    /// Tangency count on the closure of C1.
    pub zeros_c1: usize,
    /// Zeros of G_A on L1 (x = 0, y < 0) and L2 (y = 0, x < 0).
    pub zeros_l1: usize,
    pub zeros_l2: usize,
    /// Sign of G_A at B₁ (= a − 1) and at B₂ (= b − 1).
    pub ga_b1_sign: i8,
    pub ga_b2_sign: i8,
}

/// Zeros of g(t) = −q·t² − c·(1−t)² for t strictly negative (the L-segment
/// parameterization); `q` is the coefficient of the squared axis variable.
fn axis_segment_zeros(q: f64, c: f64) -> usize {
    // g(t) = −(q + c) t² + 2 c t − c
    crate::roots::quadratic_roots(-(q + c), 2.0 * c, -c)
        .into_iter()
        .filter(|(r, _)| *r < -1e-12)
        .map(|(_, m)| m)
        .sum()
}

/// Classify an affine viewpoint A = (a, b, 1) for the Fermat parameter.
pub fn fermat_classify(a_point: &RayVector) -> Result<FermatCase, Error> {
    let (a, b) = a_point.to_affine().ok_or(Error::AtInfinity)?;
    let eps = 1e-12 * (1.0 + a.abs() + b.abs());

    // region table, lowest matching case first; mirror is a ↔ b
    let direct: [(u8, bool); 6] = [
        (1, a >= 1.0 && b >= 1.0),
        (2, (0.0..=1.0).contains(&a) && (0.0..=1.0).contains(&b) && !(a == 1.0 && b == 1.0)),
        (3, a > 0.0 && a < 1.0 && b >= 1.0),
        (4, a.abs() <= eps && b > 1.0),
        (5, a < 0.0 && b >= 1.0),
        (6, a < 0.0 && b > 0.0 && b < 1.0),
    ];
    let mirrored: [(u8, bool); 4] = [
        (3, b > 0.0 && b < 1.0 && a >= 1.0),
        (4, b.abs() <= eps && a > 1.0),
        (5, b < 0.0 && a >= 1.0),
        (6, b < 0.0 && a > 0.0 && a < 1.0),
    ];
    // the quadrant a ≤ 0, b ≤ 0 carries the same facts as case 2's
    // a+b ≤ 1 half (H ≤ 0 and G_A ≤ 0 on the component)
    let extended2 = a <= 0.0 && b <= 0.0;

    let mut matches: Vec<(u8, bool)> = Vec::new();
    for (id, hit) in direct {
        if hit {
            matches.push((id, false));
        }
    }
    for (id, hit) in mirrored {
        if hit {
            matches.push((id, true));
        }
    }
    if matches.is_empty() && extended2 {
        matches.push((2, false));
    }
    if matches.is_empty() {
        return Err(Error::DomainError(format!(
            "no case matches A = ({a}, {b})"
        )));
    }
    matches.sort_by_key(|(id, m)| (*id, *m));
    let (case_id, was_mirrored) = matches[0];
    let tie = matches.len() > 1
        || a.abs() <= eps
        || b.abs() <= eps
        || (a - 1.0).abs() <= eps
        || (b - 1.0).abs() <= eps
        || (a + b - 1.0).abs() <= eps;

    // facts by direct computation
    let h = -a * b * (1.0 - a - b);
    let f0 = crate::forms::TernaryCubic::hesse_unchecked(0.0);
    let f_val = f0.evaluate(a_point);
    let inside = f_val > 0.0;
    let c = 1.0 - a - b;
    let zeros_l1 = axis_segment_zeros(b, c);
    let zeros_l2 = axis_segment_zeros(a, c);
    let ga_b1 = a - 1.0;
    let ga_b2 = b - 1.0;
    let zeros_c1 = if ga_b1.signum() != ga_b2.signum() && ga_b1 != 0.0 && ga_b2 != 0.0 {
        1
    } else if a >= 1.0 && b >= 1.0 && !inside {
        2
    } else {
        0
    };

    Ok(FermatCase {
        case_id,
        mirrored: was_mirrored,
        tie,
        facts: FermatFacts {
            h_sign: if h > eps {
                1
            } else if h < -eps {
                -1
            } else {
                0
            },
            inside_standard_cone: inside,
            zeros_c1,
            zeros_l1,
            zeros_l2,
            ga_b1_sign: ga_b1.signum() as i8,
            ga_b2_sign: ga_b2.signum() as i8,
        },
    })
}

/// Verify the recorded sign facts of a Fermat case against the component
/// geometry: the G_A positivity/negativity claims are sampled on probe rays
/// of the standard component.
pub fn fermat_facts_hold(case: &FermatCase, a_point: &RayVector, probes: &[RayVector]) -> bool {
    let (a, b) = match a_point.to_affine() {
        Some(v) => v,
        None => return false,
    };
    let f0 = crate::forms::TernaryCubic::hesse_unchecked(0.0);
    let q = f0.polar_quadric(a_point);
    let h = -a * b * (1.0 - a - b);
    let facts = &case.facts;
    if (h > 0.0 && facts.h_sign < 0) || (h < 0.0 && facts.h_sign > 0) {
        return false;
    }
    match (case.case_id, facts.h_sign) {
        // case 2 with a+b ≤ 1 (and the extended quadrant): G_A ≤ 0 on P°
        (2, s) if s <= 0 => probes.iter().all(|p| q.evaluate(p) <= 1e-12),
        // case 6: G_A negative on all of P°
        (6, _) => probes.iter().all(|p| q.evaluate(p) < 1e-12),
        // case 1 with A inside the cone: G_A positive on P°
        (1, _) if facts.inside_standard_cone => probes.iter().all(|p| q.evaluate(p) > -1e-12),
        _ => true,
    }
}

/// t(μ) = μ − 1 + √((μ−1)² + μ) and s(μ) = μ(2−μ)/(1−2μ); s is undefined
/// at μ = 1/2.
pub fn km2_functions(mu: f64) -> Result<(f64, Option<f64>), Error> {
    if mu.is_nan() || mu <= 0.0 {
        return Err(Error::DomainError(format!("μ must be positive, got {mu}")));
    }
    let t = mu - 1.0 + ((mu - 1.0) * (mu - 1.0) + mu).sqrt();
    let s = if (1.0 - 2.0 * mu).abs() < 1e-12 {
        None
    } else {
        Some(mu * (2.0 - mu) / (1.0 - 2.0 * mu))
    };
    Ok((t, s))
}

/// Verification report for the k = −2 facts at E ∝ (−1, μ, 0).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Km2Report {
    pub mu: f64,
    pub t_mu: f64,
    pub s_mu: Option<f64>,
    /// One line of the pair G_E = 0 meets the closed component only at 0.
    pub missing_line_ok: bool,
    /// The other line splits the interior, with Q on the B₂ side.
    pub splitting_line_ok: bool,
    /// The splitting line meets z = 0 at (1 : t(μ) : 0).
    pub t_intersection_ok: bool,
    /// Negativity of the linear form E² on the claimed domain.
    pub e2_negativity_ok: bool,
    pub q_region_count: usize,
}

/// Check the k = −2 facts on samples.
pub fn km2_fact_check(mu: f64, samples: usize, tol: &Tolerances) -> Result<Km2Report, Error> {
    if mu.is_nan() || mu <= 0.0 {
        return Err(Error::DomainError(format!("μ must be positive, got {mu}")));
    }
    let atlas = ConeAtlas::new(-2.0, tol)?;
    let comp = 0usize; // standard wedge: C1 in x > 1/3, y > 1/3 plus C3
    let e = RayVector::new(-1.0, mu, 0.0);
    let q = atlas.pair.f.polar_quadric(&e);
    let centroid = RayVector::affine(1.0 / 3.0, 1.0 / 3.0).normalized()?;
    let (t_mu, s_mu) = km2_functions(mu)?;

    // the pair of lines through the centroid with directions (1, t±, 0)
    let disc = ((mu - 1.0) * (mu - 1.0) + mu).sqrt();
    let t_plus = mu - 1.0 + disc;
    let t_minus = mu - 1.0 - disc;
    let dir_plus = RayVector::new(1.0, t_plus, 0.0);
    let dir_minus = RayVector::new(1.0, t_minus, 0.0);

    let mut missing_line_ok = true;
    for i in 0..=samples {
        let th = std::f64::consts::PI * (i as f64 / samples as f64) - std::f64::consts::FRAC_PI_2;
        let p = centroid.scale(th.cos()).add(&dir_minus.normalized()?.scale(th.sin()));
        if p.sup_norm() < 1e-9 {
            continue;
        }
        if q.evaluate(&p).abs() > 1e-9 * p.norm() * p.norm() {
            missing_line_ok = false; // not on the conic: wrong line
            break;
        }
        if atlas.contains_interior(comp, &p) {
            missing_line_ok = false;
            break;
        }
    }

    // the plus line splits the interior: both G_E signs occur inside
    let mut rng = SplitMix64::new(0x2B2);
    let mut saw_pos = false;
    let mut saw_neg = false;
    for _ in 0..samples.max(50) {
        let p = atlas.interior_sample(comp, &mut rng);
        let v = q.evaluate(&p);
        saw_pos |= v > 0.0;
        saw_neg |= v < 0.0;
    }
    let sub = atlas.q_subcone(comp, &e)?;
    // Q is the part whose boundary includes B₂ = (1,0,0)
    let b2_side = q.evaluate(&B2) > 0.0;
    let splitting_line_ok = saw_pos
        && saw_neg
        && sub.regions.len() == 1
        && b2_side
        && atlas.pair.f.evaluate(&dir_plus).is_finite();

    // (1 : t(μ) : 0) lies on the conic
    let at_infinity = RayVector::new(1.0, t_mu, 0.0);
    let t_intersection_ok = q.evaluate(&at_infinity).abs() < 1e-9 * (1.0 + t_mu * t_mu);

    // negativity of E²
    let e2 = atlas.pair.f.second_polar(&e);
    let mut e2_negativity_ok = true;
    if mu > 0.5 && mu < 2.0 {
        // strictly negative on the non-zero closure of the component
        for s in &atlas.components[comp].loop_samples {
            if e2.apply(s) >= -1e-12 * e2.sup_norm() && s.projective_distance(&centroid) > 1e-9 {
                // tangency at the corner directions is allowed at μ→{1/2,2}
                if e2.apply(s) > 1e-9 * e2.sup_norm() {
                    e2_negativity_ok = false;
                    break;
                }
            }
        }
        for _ in 0..samples.max(50) {
            let p = atlas.interior_sample(comp, &mut rng);
            if e2.apply(&p) >= 0.0 {
                e2_negativity_ok = false;
                break;
            }
        }
    } else if mu <= 0.5 {
        // negative strictly below the line y − 1/3 = s(μ)(x − 1/3)
        let s_val = s_mu.ok_or_else(|| Error::DomainError("s undefined at μ = 1/2".into()))?;
        if s_val <= t_mu {
            e2_negativity_ok = false;
        }
        for _ in 0..samples.max(50) {
            let x = rng.in_range(-3.0, 3.0);
            let dy = rng.in_range(0.01, 3.0);
            let y = 1.0 / 3.0 + s_val * (x - 1.0 / 3.0) - dy;
            if e2.apply(&RayVector::affine(x, y)) >= 0.0 {
                e2_negativity_ok = false;
                break;
            }
        }
        // hence negative on the closure of Q
        if let Some(reg) = sub.regions.first() {
            for arc in &reg.boundary_arcs {
                for s in arc.iter().step_by(3) {
                    if e2.apply(s) >= 1e-9 * e2.sup_norm() {
                        e2_negativity_ok = false;
                    }
                }
            }
        }
    }

    Ok(Km2Report {
        mu,
        t_mu,
        s_mu,
        missing_line_ok,
        splitting_line_ok,
        t_intersection_ok,
        e2_negativity_ok,
        q_region_count: sub.regions.len(),
    })
}

/// Region filter for the integral enumeration.
#[derive(Debug, Clone)]
pub enum RegionSpec {
    All,
    /// Interior of one atlas component.
    Component(usize),
    /// Closed half-cone on the bounded Hessian component where H ≥ 0
    /// (k < 1, k ∉ {0, −2}).
    HessianHalfConeBounded,
    /// Positive multiples of a fixed direction.
    Ray(RayVector),
}

/// All integer-coordinate classes E with ‖E‖∞ ≤ bound, F(E) inside the
/// closed range, and E in the region; lexicographically ordered.
pub fn enumerate_integral(
    atlas: &ConeAtlas,
    region: &RegionSpec,
    sup_norm_bound: i64,
    cubic_range: (f64, f64),
) -> Result<Vec<[i64; 3]>, Error> {
    if sup_norm_bound < 1 {
        return Err(Error::InvalidInput("bound must be at least 1".into()));
    }
    let (lo, hi) = cubic_range;
    let mut out = Vec::new();
    let b = sup_norm_bound;
    for x in -b..=b {
        for y in -b..=b {
            for z in -b..=b {
                if x == 0 && y == 0 && z == 0 {
                    continue;
                }
                let e = RayVector::new(x as f64, y as f64, z as f64);
                let v = atlas.pair.f.evaluate(&e);
                if v < lo || v > hi {
                    continue;
                }
                let inside = match region {
                    RegionSpec::All => true,
                    RegionSpec::Component(id) => atlas.contains_interior(*id, &e),
                    RegionSpec::HessianHalfConeBounded => {
                        hessian_half_cone_contains(atlas, &e)
                    }
                    RegionSpec::Ray(v) => {
                        e.cross(v).norm() <= 1e-9 * e.norm() * v.norm() && e.dot(v) > 0.0
                    }
                };
                if inside {
                    out.push([x, y, z]);
                }
            }
        }
    }
    Ok(out)
}

/// E lies in the closed half-cone over the bounded Hessian oval on which
/// H ≥ 0 (the oval interior itself carries H ≤ 0, so this is the negative
/// half).
fn hessian_half_cone_contains(atlas: &ConeAtlas, e: &RayVector) -> bool {
    let k = atlas.k;
    if k >= 1.0 || k.abs() < 1e-9 || (k + 2.0).abs() < 1e-9 {
        return false;
    }
    if atlas.pair.h.evaluate(e) < -1e-12 * atlas.pair.h.max_coeff() {
        return false;
    }
    let m = e.neg();
    if m.z() <= 0.0 {
        return false;
    }
    let (x, y) = (m.x() / m.z(), m.y() / m.z());
    x >= -1e-12 && y >= -1e-12 && x + y <= 1.0 + 1e-12 && atlas.pair.h.evaluate(&m) <= 1e-12 * atlas.pair.h.max_coeff()
}

/// The inequality check r·(c₂·E) ≤ m·(c₂·D) on user-supplied data.
pub fn multiple_bound_check(
    m: f64,
    r: f64,
    c2: &LinearForm3,
    d: &RayVector,
    e: &RayVector,
) -> (f64, f64, bool) {
    let lhs = r * c2.apply(e);
    let rhs = m * c2.apply(d);
    (lhs, rhs, lhs <= rhs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::TernaryCubic;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn lambda_bound_cubic_roots_method() {
        let t = tol();
        let atlas = ConeAtlas::new(5.0, &t).unwrap();
        let comp = atlas.bounded_positive_id().unwrap();
        let e = RayVector::new(0.0, 0.0, 1.0); // F(E) = −1 < 0
        let d = RayVector::affine(1.0 / 3.0, 1.0 / 3.0);
        let res = lambda_bound(&atlas, comp, &e, &d).unwrap();
        assert_eq!(res.method, LambdaMethod::CubicRoots);
        let (l1, l2) = res.cubic_roots.unwrap();
        assert!(0.0 < l1 && l1 < 1.0 && l2 > 1.0, "{l1} {l2}");
        assert!((res.lambda0 - l2).abs() < 1e-12);
        // re-verify the sign pattern at λ above the bound
        let f = &atlas.pair.f;
        for i in 1..=20 {
            let lam = res.lambda0 * (1.0 + i as f64 / 20.0);
            let v = f.evaluate(&d.sub(&e.scale(lam)));
            assert!(v > 0.0);
        }
    }

    #[test]
    fn lambda_bound_negative_form_method() {
        let t = tol();
        let atlas = ConeAtlas::new(5.0, &t).unwrap();
        let comp = atlas.bounded_positive_id().unwrap();
        // E in a hybrid component: F(E) > 0, outside the bounded cone.
        // G_E vanishes exactly at the centroid ray, so take D from the
        // actual subcone region.
        let e = RayVector::new(-1.0, -1.0, 0.0);
        let sub = atlas.q_subcone(comp, &e).unwrap();
        assert!(!sub.regions.is_empty());
        let d = sub.regions[0].witness;
        let res = lambda_bound(&atlas, comp, &e, &d).unwrap();
        assert_eq!(res.method, LambdaMethod::NegativeForm);
        assert!(res.lambda0 > 0.0);
        assert!(res.certificates.len() > 100);
        let tri = atlas.pair.f.trilinear();
        for i in 1..=20 {
            let lam = res.lambda0 * (1.0 + 1e-6 + i as f64 / 20.0);
            let dl = d.sub(&e.scale(lam));
            for c in res.certificates.iter().step_by(7) {
                assert!(tri.apply(&dl, &dl, c) <= 1e-10, "λ={lam}");
            }
        }
    }

    #[test]
    fn lambda_bound_homogeneous_in_d() {
        let t = tol();
        let atlas = ConeAtlas::new(5.0, &t).unwrap();
        let comp = atlas.bounded_positive_id().unwrap();
        for e in [RayVector::new(0.0, 0.0, 1.0), RayVector::new(-1.0, -1.0, 0.0)] {
            let d = if atlas.pair.f.evaluate(&e) < 0.0 {
                RayVector::affine(0.3, 0.35)
            } else {
                atlas.q_subcone(comp, &e).unwrap().regions[0].witness
            };
            let r1 = lambda_bound(&atlas, comp, &e, &d).unwrap();
            let r2 = lambda_bound(&atlas, comp, &e, &d.scale(2.0)).unwrap();
            assert!(
                (r2.lambda0 - 2.0 * r1.lambda0).abs() < 1e-6 * (1.0 + r1.lambda0),
                "{} vs {}",
                r2.lambda0,
                r1.lambda0
            );
        }
    }

    #[test]
    fn pole_solve_round_trip_and_boundary() {
        let t = tol();
        let atlas = ConeAtlas::new(5.0, &t).unwrap();
        let comp = atlas.bounded_positive_id().unwrap();
        let tri = atlas.pair.f.trilinear();
        let mut rng = SplitMix64::new(0xD0);
        for _ in 0..40 {
            let l_ray = atlas.interior_sample(comp, &mut rng);
            let scale = 0.5 + 1.5 * rng.next_f64();
            let l_vec = l_ray.scale(scale);
            let l = tri.contract2(&l_vec, &l_vec);
            let d = pole_solve(&atlas, comp, &l, &t).unwrap();
            assert!(
                d.ray_distance(&l_vec.normalized().unwrap()) < 1e-8
                    || d.sub(&l_vec).sup_norm() < 1e-8 * l_vec.sup_norm(),
                "{:?} vs {:?}",
                d.coords,
                l_vec.coords
            );
        }
        // boundary tangency: l built from a boundary ray is recovered
        let arc = &atlas.components[comp].boundary[0].arc;
        let d0 = arc.samples[arc.samples.len() / 4];
        let l = tri.contract2(&d0, &d0);
        let d = pole_solve(&atlas, comp, &l, &t).unwrap();
        assert!(d.sub(&d0).sup_norm() < 1e-7, "{:?} vs {:?}", d.coords, d0.coords);
        // interior-positive l gives an interior pole
        let w = atlas.components[comp].witness;
        let l = tri.contract2(&w, &w);
        let d = pole_solve(&atlas, comp, &l, &t).unwrap();
        assert!(atlas.contains_interior(comp, &d));
    }

    #[test]
    fn pole_solve_rejects_sign_changing_form() {
        let t = tol();
        let atlas = ConeAtlas::new(5.0, &t).unwrap();
        let comp = atlas.bounded_positive_id().unwrap();
        let l = LinearForm3::new([1.0, -1.0, 0.0]);
        assert!(matches!(
            pole_solve(&atlas, comp, &l, &t),
            Err(Error::HypothesisFailed(_))
        ));
        // wrong component kind
        let l2 = LinearForm3::new([0.0, 0.0, 1.0]);
        assert!(matches!(
            pole_solve(&atlas, atlas.standard_hybrid_id(), &l2, &t),
            Err(Error::DomainError(_))
        ));
    }

    #[test]
    fn pole_injectivity_spot_check() {
        let t = tol();
        let atlas = ConeAtlas::new(2.0, &t).unwrap();
        let comp = atlas.bounded_positive_id().unwrap();
        let tri = atlas.pair.f.trilinear();
        let mut rng = SplitMix64::new(0xD1);
        for _ in 0..60 {
            let l1 = atlas.interior_sample(comp, &mut rng);
            let l2 = atlas.interior_sample(comp, &mut rng);
            if l1.sub(&l2).sup_norm() < 1e-7 {
                continue;
            }
            let c1 = tri.contract2(&l1, &l1);
            let c2 = tri.contract2(&l2, &l2);
            let diff = LinearForm3::new([
                c1.covector[0] - c2.covector[0],
                c1.covector[1] - c2.covector[1],
                c1.covector[2] - c2.covector[2],
            ]);
            assert!(
                diff.sup_norm() > 1e-6 * c1.sup_norm().max(c2.sup_norm()),
                "double-polar collision"
            );
        }
    }

    #[test]
    fn fermat_case_examples() {
        // near part of case 1 (outside the cone): two tangents reach C1
        let c = fermat_classify(&RayVector::affine(1.1, 1.1)).unwrap();
        assert_eq!(c.case_id, 1);
        assert!(!c.facts.inside_standard_cone);
        assert_eq!(c.facts.zeros_c1, 2);
        assert_eq!((c.facts.zeros_l1, c.facts.zeros_l2), (0, 0));
        assert_eq!(c.facts.h_sign, 1);
        // far part of case 1: A inside the cone, no tangents
        let c = fermat_classify(&RayVector::affine(2.0, 2.0)).unwrap();
        assert_eq!(c.case_id, 1);
        assert!(c.facts.inside_standard_cone);
        assert_eq!(c.facts.zeros_c1, 0);
        // case 2, a+b ≤ 1: H ≤ 0
        let c = fermat_classify(&RayVector::affine(0.3, 0.3)).unwrap();
        assert_eq!(c.case_id, 2);
        assert!(c.facts.h_sign <= 0);
        // case 2, a+b > 1: one zero on each axis segment
        let c = fermat_classify(&RayVector::affine(0.8, 0.6)).unwrap();
        assert_eq!(c.case_id, 2);
        assert_eq!((c.facts.zeros_l1, c.facts.zeros_l2), (1, 1));
        assert_eq!(c.facts.h_sign, 1);
        // case 3
        let c = fermat_classify(&RayVector::affine(0.5, 2.0)).unwrap();
        assert_eq!(c.case_id, 3);
        assert!(!c.mirrored);
        assert_eq!(c.facts.zeros_l1, 1);
        assert_eq!(c.facts.ga_b1_sign, -1);
        assert_eq!(c.facts.ga_b2_sign, 1);
        // case 4 boundary
        let c = fermat_classify(&RayVector::affine(0.0, 2.0)).unwrap();
        assert_eq!(c.case_id, 4);
        assert_eq!(c.facts.h_sign, 0);
        // case 5, both subcases
        let c = fermat_classify(&RayVector::affine(-1.0, 1.5)).unwrap();
        assert_eq!(c.case_id, 5);
        assert_eq!(c.facts.h_sign, 1); // a+b < 1
        let c = fermat_classify(&RayVector::affine(-1.0, 3.0)).unwrap();
        assert_eq!(c.case_id, 5);
        assert_eq!(c.facts.h_sign, -1); // a+b > 1
        // case 6
        let c = fermat_classify(&RayVector::affine(-1.0, 0.5)).unwrap();
        assert_eq!(c.case_id, 6);
        assert_eq!(c.facts.h_sign, 1);
        // mirrored case 6
        let c = fermat_classify(&RayVector::affine(0.5, -1.0)).unwrap();
        assert_eq!(c.case_id, 6);
        assert!(c.mirrored);
        // extended third quadrant folds into case 2
        let c = fermat_classify(&RayVector::affine(-1.0, -1.0)).unwrap();
        assert_eq!(c.case_id, 2);
        assert!(c.facts.h_sign <= 0);
        assert_eq!(c.facts.zeros_c1 + c.facts.zeros_l1 + c.facts.zeros_l2, 0);
    }

    #[test]
    fn fermat_unique_case_on_grid() {
        // off-boundary grid points match exactly one case (no tie)
        let n = 60;
        for i in 0..n {
            for j in 0..n {
                let a = -1.4995 + 4.0 * i as f64 / n as f64;
                let b = -1.4995 + 4.0 * j as f64 / n as f64;
                let c = fermat_classify(&RayVector::affine(a, b)).unwrap();
                assert!(!c.tie, "unexpected tie at ({a}, {b})");
                assert!((1..=6).contains(&c.case_id));
            }
        }
    }

    #[test]
    fn fermat_ga_negativity_fact() {
        let t = tol();
        let atlas = ConeAtlas::new(0.0, &t).unwrap();
        let mut rng = SplitMix64::new(0xFE);
        let probes: Vec<RayVector> =
            (0..60).map(|_| atlas.interior_sample(0, &mut rng)).collect();
        for (a, b) in [(0.3, 0.3), (-1.0, 0.5), (-1.0, -1.0), (2.0, 2.0)] {
            let ap = RayVector::affine(a, b);
            let case = fermat_classify(&ap).unwrap();
            assert!(fermat_facts_hold(&case, &ap, &probes), "({a},{b})");
        }
    }

    #[test]
    fn km2_function_values() {
        let (t1, _) = km2_functions(1.0).unwrap();
        assert!((t1 - 1.0).abs() < 1e-15);
        let (t4, s4) = km2_functions(0.25).unwrap();
        assert!((t4 - 0.151_387_818_865_997_28).abs() < 1e-12);
        assert!((s4.unwrap() - 0.875).abs() < 1e-15);
        assert!(s4.unwrap() > t4);
        let (_, s_half) = km2_functions(0.5).unwrap();
        assert!(s_half.is_none());
        assert!(km2_functions(-1.0).is_err());
        // s > t throughout (0, 1/2)
        for i in 1..=50 {
            let mu = 0.5 * i as f64 / 51.0;
            let (t, s) = km2_functions(mu).unwrap();
            assert!(s.unwrap() > t, "μ = {mu}");
        }
    }

    #[test]
    fn km2_fact_check_samples() {
        let t = tol();
        for &mu in &[0.25, 1.0, 1.5] {
            let rep = km2_fact_check(mu, 120, &t).unwrap();
            assert!(rep.missing_line_ok, "μ={mu}");
            assert!(rep.splitting_line_ok, "μ={mu}");
            assert!(rep.t_intersection_ok, "μ={mu}");
            assert!(rep.e2_negativity_ok, "μ={mu}");
            assert_eq!(rep.q_region_count, 1, "μ={mu}");
        }
    }

    #[test]
    fn enumerate_matches_reversed_loop_oracle() {
        let t = tol();
        let atlas = ConeAtlas::new(5.0, &t).unwrap();
        let comp = atlas.bounded_positive_id().unwrap();
        let got = enumerate_integral(&atlas, &RegionSpec::Component(comp), 10, (1.0, 9.0)).unwrap();
        // independent re-listing with reversed loop order
        let mut oracle = Vec::new();
        for z in (-10i64..=10).rev() {
            for y in (-10i64..=10).rev() {
                for x in (-10i64..=10).rev() {
                    if x == 0 && y == 0 && z == 0 {
                        continue;
                    }
                    let e = RayVector::new(x as f64, y as f64, z as f64);
                    let v = atlas.pair.f.evaluate(&e);
                    if (1.0..=9.0).contains(&v) && atlas.contains_interior(comp, &e) {
                        oracle.push([x, y, z]);
                    }
                }
            }
        }
        oracle.sort();
        assert_eq!(got, oracle);
        // the [1,9] window happens to be empty over this cone; widen it to
        // check a populated window as well
        let wide =
            enumerate_integral(&atlas, &RegionSpec::Component(comp), 10, (1.0, 30.0)).unwrap();
        assert!(!wide.is_empty());
        for e in &wide {
            let v = atlas
                .pair
                .f
                .evaluate(&RayVector::new(e[0] as f64, e[1] as f64, e[2] as f64));
            assert!((1.0..=30.0).contains(&v));
        }
        // empty range
        let empty = enumerate_integral(&atlas, &RegionSpec::All, 3, (1.0, 0.0)).unwrap();
        assert!(empty.is_empty());
    }

    #[test]
    fn enumerate_km2_ray_example() {
        let t = tol();
        let atlas = ConeAtlas::new(-2.0, &t).unwrap();
        // F(−m(1,1,3)) = 9m³: the window [1,9] admits exactly m = 1
        let f = TernaryCubic::hesse_unchecked(-2.0);
        assert!((f.evaluate(&RayVector::new(-1.0, -1.0, -3.0)) - 9.0).abs() < 1e-12);
        let got = enumerate_integral(
            &atlas,
            &RegionSpec::Ray(RayVector::new(-1.0, -1.0, -3.0)),
            10,
            (1.0, 9.0),
        )
        .unwrap();
        assert_eq!(got, vec![[-1, -1, -3]]);
    }

    #[test]
    fn hessian_half_cone_region() {
        let t = tol();
        let atlas = ConeAtlas::new(-3.0, &t).unwrap();
        let got =
            enumerate_integral(&atlas, &RegionSpec::HessianHalfConeBounded, 6, (0.0, 50.0))
                .unwrap();
        for e in &got {
            let v = RayVector::new(e[0] as f64, e[1] as f64, e[2] as f64);
            assert!(atlas.pair.h.evaluate(&v) >= -1e-9);
            assert!(v.z() < 0.0);
        }
    }

    #[test]
    fn bound_check_inequality() {
        let c2 = LinearForm3::new([1.0, 1.0, 1.0]);
        let d = RayVector::new(1.0, 1.0, 1.0);
        let e = RayVector::new(2.0, 0.0, 0.0);
        let (lhs, rhs, ok) = multiple_bound_check(3.0, 2.0, &c2, &d, &e);
        assert_eq!(lhs, 4.0);
        assert_eq!(rhs, 9.0);
        assert!(ok);
    }
}
