//! Real roots of low-degree polynomials, with multiplicity.

/// Real roots of a2·x² + a1·x + a0 = 0, ascending, with multiplicity.
pub fn quadratic_roots(a2: f64, a1: f64, a0: f64) -> Vec<(f64, usize)> {
    let scale = a2.abs().max(a1.abs()).max(a0.abs());
    if scale == 0.0 {
        return vec![];
    }
    if a2.abs() <= 1e-14 * scale {
        if a1.abs() <= 1e-14 * scale {
            return vec![];
        }
        return vec![(-a0 / a1, 1)];
    }
    let disc = a1 * a1 - 4.0 * a2 * a0;
    let dscale = (a1 * a1).max((4.0 * a2 * a0).abs());
    if disc < -1e-14 * dscale {
        vec![]
    } else if disc <= 1e-14 * dscale {
        vec![(-a1 / (2.0 * a2), 2)]
    } else {
        let sq = disc.sqrt();
        // avoid cancellation: compute the large-magnitude root first
        let q = if a1 >= 0.0 { -0.5 * (a1 + sq) } else { -0.5 * (a1 - sq) };
        let r1 = q / a2;
        let r2 = a0 / q;
        let (lo, hi) = if r1 < r2 { (r1, r2) } else { (r2, r1) };
        vec![(lo, 1), (hi, 1)]
    }
}

/// Real roots of a3·x³ + a2·x² + a1·x + a0 = 0, ascending, with
/// multiplicity.  Closed-form discriminant split plus one Newton polish per
/// simple root.
pub fn cubic_roots(a3: f64, a2: f64, a1: f64, a0: f64) -> Vec<(f64, usize)> {
    let scale = a3.abs().max(a2.abs()).max(a1.abs()).max(a0.abs());
    if scale == 0.0 {
        return vec![];
    }
    if a3.abs() <= 1e-13 * scale {
        return quadratic_roots(a2, a1, a0);
    }

    let disc = 18.0 * a3 * a2 * a1 * a0 - 4.0 * a2 * a2 * a2 * a0 + a2 * a2 * a1 * a1
        - 4.0 * a3 * a1 * a1 * a1
        - 27.0 * a3 * a3 * a0 * a0;
    let dterms = [
        (18.0 * a3 * a2 * a1 * a0).abs(),
        (4.0 * a2 * a2 * a2 * a0).abs(),
        (a2 * a2 * a1 * a1).abs(),
        (4.0 * a3 * a1 * a1 * a1).abs(),
        (27.0 * a3 * a3 * a0 * a0).abs(),
    ];
    let dscale = dterms.iter().fold(0.0f64, |m, t| m.max(*t)).max(1e-300);
    let d0 = a2 * a2 - 3.0 * a3 * a1;

    let polish = |x: f64| -> f64 {
        let mut r = x;
        for _ in 0..3 {
            let f = ((a3 * r + a2) * r + a1) * r + a0;
            let df = (3.0 * a3 * r + 2.0 * a2) * r + a1;
            if df.abs() > 1e-300 {
                let step = f / df;
                if step.is_finite() {
                    r -= step;
                }
            }
        }
        r
    };

    if disc.abs() <= 1e-12 * dscale {
        // multiple real root
        if d0.abs() <= 1e-12 * (a2 * a2).abs().max((3.0 * a3 * a1).abs()).max(1e-300) {
            return vec![(-a2 / (3.0 * a3), 3)];
        }
        let double = (9.0 * a3 * a0 - a2 * a1) / (2.0 * d0);
        let single = (4.0 * a3 * a2 * a1 - 9.0 * a3 * a3 * a0 - a2 * a2 * a2) / (a3 * d0);
        let mut out = vec![(double, 2usize), (polish(single), 1usize)];
        out.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        return out;
    }

    if disc > 0.0 {
        // three distinct real roots; trigonometric form on the depressed cubic
        let b = a2 / a3;
        let c = a1 / a3;
        let d = a0 / a3;
        let p = c - b * b / 3.0;
        let q = 2.0 * b * b * b / 27.0 - b * c / 3.0 + d;
        let m = 2.0 * (-p / 3.0).sqrt();
        let arg = (3.0 * q / (p * m)).clamp(-1.0, 1.0);
        let phi = arg.acos() / 3.0;
        let mut out: Vec<(f64, usize)> = (0..3)
            .map(|i| {
                let r = m * (phi - 2.0 * std::f64::consts::PI * i as f64 / 3.0).cos() - b / 3.0;
                (polish(r), 1)
            })
            .collect();
        out.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        out
    } else {
        // one real root; Cardano with stable cube roots
        let b = a2 / a3;
        let c = a1 / a3;
        let d = a0 / a3;
        let p = c - b * b / 3.0;
        let q = 2.0 * b * b * b / 27.0 - b * c / 3.0 + d;
        let delta = (q * q / 4.0 + p * p * p / 27.0).sqrt();
        let u = (-q / 2.0 + delta).cbrt();
        let v = (-q / 2.0 - delta).cbrt();
        vec![(polish(u + v - b / 3.0), 1)]
    }
}

/// Bisection refinement of a bracketed sign change.  `f(lo)` and `f(hi)`
/// must have opposite signs.
pub fn bisect<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, iters: usize) -> f64 {
    let mut flo = f(lo);
    for _ in 0..iters {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm > 0.0) == (flo > 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}
