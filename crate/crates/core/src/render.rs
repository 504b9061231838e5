//! Deterministic SVG rendering of the standard figures: cubic, Hessian,
//! asymptotes, marked points and shaded q-subcone regions.
//!
//! Output is restricted to the svg/g/path/line/polygon/text elements, uses
//! fixed 9-significant-digit coordinate formatting and depends only on the
//! figure specification, so identical inputs produce byte-identical output.

use crate::cone_atlas::ConeAtlas;
use crate::curve_geometry::{CurveSel, TraceConfig};
use crate::error::Error;
use crate::forms;
use crate::ray::{LinearForm3, RayVector};
use crate::tolerances::Tolerances;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Layer {
    Cubic,
    Hessian,
    Asymptotes,
    ShadeQ,
    MarkPoints,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Style {
    pub cubic_stroke: String,
    pub hessian_stroke: String,
    pub asymptote_stroke: String,
    pub shade_fills: Vec<String>,
    pub mark_fill: String,
    pub stroke_width: f64,
}

impl Default for Style {
    fn default() -> Self {
        Style {
            cubic_stroke: "#1f3d7a".into(),
            hessian_stroke: "#b03030".into(),
            asymptote_stroke: "#777777".into(),
            shade_fills: vec!["#e0504033".into(), "#40a06033".into()],
            mark_fill: "#000000".into(),
            stroke_width: 1.6,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FigureSpec {
    pub k: f64,
    pub a_point: Option<RayVector>,
    /// (xmin, xmax, ymin, ymax) in the affine chart z = 1.
    pub viewport: (f64, f64, f64, f64),
    pub layers: Vec<Layer>,
    pub width_px: u32,
    pub height_px: u32,
    /// Node count per axis of the shading grid.
    pub shade_grid: usize,
    pub style: Style,
}

impl FigureSpec {
    fn validate(&self) -> Result<(), Error> {
        let (x0, x1, y0, y1) = self.viewport;
        if !(x0 < x1 && y0 < y1) {
            return Err(Error::InvalidInput("empty viewport".into()));
        }
        if self.width_px == 0 || self.height_px == 0 {
            return Err(Error::InvalidInput("zero pixel size".into()));
        }
        if self.layers.contains(&Layer::ShadeQ) && self.a_point.is_none() {
            return Err(Error::InvalidInput("shading requires a viewpoint A".into()));
        }
        Ok(())
    }
}

/// Round to 9 significant digits and format with the shortest round-trip
/// representation.
fn fmt(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    let mag = v.abs().log10().floor() as i32;
    let digits = 8 - mag;
    let scale = 10f64.powi(digits);
    let r = (v * scale).round() / scale;
    format!("{}", r)
}

struct Mapper {
    x0: f64,
    y1: f64,
    sx: f64,
    sy: f64,
}

impl Mapper {
    fn new(spec: &FigureSpec) -> Self {
        let (x0, x1, y0, y1) = spec.viewport;
        Mapper {
            x0,
            y1,
            sx: spec.width_px as f64 / (x1 - x0),
            sy: spec.height_px as f64 / (y1 - y0),
        }
    }
    fn px(&self, x: f64, y: f64) -> (f64, f64) {
        ((x - self.x0) * self.sx, (self.y1 - y) * self.sy)
    }
}

/// Liang–Barsky clip of the segment (p, q) against the viewport.
fn clip_segment(
    p: (f64, f64),
    q: (f64, f64),
    vp: (f64, f64, f64, f64),
) -> Option<((f64, f64), (f64, f64))> {
    let (xmin, xmax, ymin, ymax) = vp;
    let (dx, dy) = (q.0 - p.0, q.1 - p.1);
    let mut t0 = 0.0f64;
    let mut t1 = 1.0f64;
    for (den, num) in [
        (-dx, p.0 - xmin),
        (dx, xmax - p.0),
        (-dy, p.1 - ymin),
        (dy, ymax - p.1),
    ] {
        if den.abs() < 1e-300 {
            if num < 0.0 {
                return None;
            }
        } else {
            let t = num / den;
            if den < 0.0 {
                t0 = t0.max(t);
            } else {
                t1 = t1.min(t);
            }
        }
    }
    if t0 > t1 {
        return None;
    }
    Some((
        (p.0 + t0 * dx, p.1 + t0 * dy),
        (p.0 + t1 * dx, p.1 + t1 * dy),
    ))
}

/// Clip an infinite homogeneous line l·(x,y,1) = 0 to the viewport.
pub fn clip_line_to_viewport(
    l: &LinearForm3,
    vp: (f64, f64, f64, f64),
) -> Option<((f64, f64), (f64, f64))> {
    let [a, b, c] = l.covector;
    // direction (−b, a), base point nearest the origin
    let n2 = a * a + b * b;
    if n2 < 1e-300 {
        return None;
    }
    let base = (-a * c / n2, -b * c / n2);
    let dir = (-b, a);
    let big = 1e6;
    let p = (base.0 - big * dir.0, base.1 - big * dir.1);
    let q = (base.0 + big * dir.0, base.1 + big * dir.1);
    clip_segment(p, q, vp)
}

/// Break arc samples into affine polylines clipped to the viewport.
fn arc_polylines(
    samples: &[RayVector],
    vp: (f64, f64, f64, f64),
) -> Vec<Vec<(f64, f64)>> {
    let pts: Vec<Option<(f64, f64)>> = samples.iter().map(|s| s.to_affine()).collect();
    let mut out: Vec<Vec<(f64, f64)>> = Vec::new();
    let mut current: Vec<(f64, f64)> = Vec::new();
    for w in pts.windows(2) {
        let (Some(p), Some(q)) = (w[0], w[1]) else {
            if current.len() > 1 {
                out.push(std::mem::take(&mut current));
            } else {
                current.clear();
            }
            continue;
        };
        // a long affine jump means the branch crossed the line at infinity
        let jump = (p.0 - q.0).hypot(p.1 - q.1);
        let span = (vp.1 - vp.0) + (vp.3 - vp.2);
        if jump > 50.0 * span {
            if current.len() > 1 {
                out.push(std::mem::take(&mut current));
            } else {
                current.clear();
            }
            continue;
        }
        match clip_segment(p, q, vp) {
            None => {
                if current.len() > 1 {
                    out.push(std::mem::take(&mut current));
                } else {
                    current.clear();
                }
            }
            Some((cp, cq)) => {
                if current.is_empty() {
                    current.push(cp);
                } else {
                    let last = *current.last().unwrap();
                    if (last.0 - cp.0).hypot(last.1 - cp.1) > 1e-9 * span {
                        if current.len() > 1 {
                            out.push(std::mem::take(&mut current));
                        } else {
                            current.clear();
                        }
                        current.push(cp);
                    }
                }
                current.push(cq);
            }
        }
    }
    if current.len() > 1 {
        out.push(current);
    }
    out
}

fn path_from_polyline(m: &Mapper, pts: &[(f64, f64)], close: bool) -> String {
    let mut d = String::new();
    for (i, (x, y)) in pts.iter().enumerate() {
        let (px, py) = m.px(*x, *y);
        if i == 0 {
            d.push_str(&format!("M {} {}", fmt(px), fmt(py)));
        } else {
            d.push_str(&format!(" L {} {}", fmt(px), fmt(py)));
        }
    }
    if close {
        d.push_str(" Z");
    }
    d
}

/// Marching-squares contours of a boolean grid (padded with an outside
/// ring so contours close at the viewport border); crossing positions are
/// refined by bisection on the membership predicate.
fn contours<F: Fn(f64, f64) -> bool>(
    inside: &F,
    vp: (f64, f64, f64, f64),
    n: usize,
) -> Vec<Vec<(f64, f64)>> {
    let (xmin, xmax, ymin, ymax) = vp;
    let nx = n + 2;
    let ny = n + 2;
    let gx = |i: isize| xmin + (xmax - xmin) * (i - 1) as f64 / n as f64;
    let gy = |j: isize| ymin + (ymax - ymin) * (j - 1) as f64 / n as f64;
    let mut grid = vec![false; nx * ny];
    for j in 0..ny {
        for i in 0..nx {
            // padded ring stays outside
            if i == 0 || j == 0 || i == nx - 1 || j == ny - 1 {
                continue;
            }
            grid[j * nx + i] = inside(gx(i as isize), gy(j as isize));
        }
    }
    let at = |i: usize, j: usize| grid[j * nx + i];
    // refined crossing point on the edge between two nodes
    let refine = |p: (f64, f64), q: (f64, f64)| -> (f64, f64) {
        let mut a = p;
        let mut b = q;
        let ia = inside(a.0, a.1);
        for _ in 0..20 {
            let mid = (0.5 * (a.0 + b.0), 0.5 * (a.1 + b.1));
            if inside(mid.0, mid.1) == ia {
                a = mid;
            } else {
                b = mid;
            }
        }
        (0.5 * (a.0 + b.0), 0.5 * (a.1 + b.1))
    };

    // segment soup keyed by quantized endpoints
    let mut segs: Vec<((f64, f64), (f64, f64))> = Vec::new();
    for j in 0..ny - 1 {
        for i in 0..nx - 1 {
            let c = [at(i, j), at(i + 1, j), at(i + 1, j + 1), at(i, j + 1)];
            let idx = (c[0] as u8) | (c[1] as u8) << 1 | (c[2] as u8) << 2 | (c[3] as u8) << 3;
            if idx == 0 || idx == 15 {
                continue;
            }
            let p00 = (gx(i as isize), gy(j as isize));
            let p10 = (gx(i as isize + 1), gy(j as isize));
            let p11 = (gx(i as isize + 1), gy(j as isize + 1));
            let p01 = (gx(i as isize), gy(j as isize + 1));
            let e = |a: (f64, f64), b: (f64, f64)| refine(a, b);
            // edges: 0 bottom, 1 right, 2 top, 3 left
            let pts = [e(p00, p10), e(p10, p11), e(p11, p01), e(p01, p00)];
            let mut add = |a: usize, b: usize| segs.push((pts[a], pts[b]));
            match idx {
                1 => add(3, 0),
                2 => add(0, 1),
                3 => add(3, 1),
                4 => add(1, 2),
                5 => {
                    // ambiguous saddle: split by the cell center
                    let cx = 0.5 * (p00.0 + p11.0);
                    let cy = 0.5 * (p00.1 + p11.1);
                    if inside(cx, cy) {
                        add(3, 2);
                        add(1, 0);
                    } else {
                        add(3, 0);
                        add(1, 2);
                    }
                }
                6 => add(0, 2),
                7 => add(3, 2),
                8 => add(2, 3),
                9 => add(2, 0),
                10 => {
                    let cx = 0.5 * (p00.0 + p11.0);
                    let cy = 0.5 * (p00.1 + p11.1);
                    if inside(cx, cy) {
                        add(0, 3);
                        add(2, 1);
                    } else {
                        add(0, 1);
                        add(2, 3);
                    }
                }
                11 => add(2, 1),
                12 => add(1, 3),
                13 => add(1, 0),
                14 => add(0, 3),
                _ => {}
            }
        }
    }

    // chain segments into loops
    let quant = |p: (f64, f64)| -> (i64, i64) {
        let s = 1e7 / ((xmax - xmin) + (ymax - ymin));
        ((p.0 * s).round() as i64, (p.1 * s).round() as i64)
    };
    use std::collections::HashMap;
    let mut start_map: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
    for (i, s) in segs.iter().enumerate() {
        start_map.entry(quant(s.0)).or_default().push(i);
    }
    let mut used = vec![false; segs.len()];
    let mut loops = Vec::new();
    for i in 0..segs.len() {
        if used[i] {
            continue;
        }
        used[i] = true;
        let mut chain = vec![segs[i].0, segs[i].1];
        let mut guard = 0;
        loop {
            guard += 1;
            if guard > segs.len() + 2 {
                break;
            }
            let tail = quant(*chain.last().unwrap());
            let next = start_map
                .get(&tail)
                .and_then(|cands| cands.iter().find(|&&c| !used[c]).copied());
            match next {
                Some(nidx) => {
                    used[nidx] = true;
                    chain.push(segs[nidx].1);
                }
                None => break,
            }
            if quant(*chain.last().unwrap()) == quant(chain[0]) {
                break;
            }
        }
        if chain.len() > 3 {
            loops.push(chain);
        }
    }
    loops
}

pub fn render_figure(spec: &FigureSpec, tol: &Tolerances) -> Result<String, Error> {
    spec.validate()?;
    let cfg = TraceConfig::default();
    let atlas = ConeAtlas::with_config(spec.k, tol, &cfg)?;
    let m = Mapper::new(spec);
    let vp = spec.viewport;
    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" viewBox=\"0 0 {} {}\">\n",
        spec.width_px, spec.height_px, spec.width_px, spec.height_px
    ));

    // shaded q-subcone regions first (underneath the curves)
    if spec.layers.contains(&Layer::ShadeQ) {
        let a = spec.a_point.as_ref().unwrap();
        let comp = atlas.standard_hybrid_id();
        let sub = atlas.q_subcone(comp, a)?;
        let q = atlas.pair.f.polar_quadric(a);
        svg.push_str("<g id=\"shade\">\n");
        for (ridx, _region) in sub.regions.iter().enumerate() {
            let inside = |x: f64, y: f64| -> bool {
                let p = RayVector::affine(x, y);
                let member = if atlas.contains_interior(comp, &p) {
                    Some(p)
                } else if atlas.contains_interior(comp, &p.neg()) {
                    Some(p.neg())
                } else {
                    None
                };
                let Some(v) = member else { return false };
                if q.evaluate(&v) <= 0.0 {
                    return false;
                }
                if sub.regions.len() == 1 {
                    return true;
                }
                match (&sub.axis, sub.regions[ridx].axis_side) {
                    (Some(axis), Some(side)) => {
                        let s = if q.apply(axis).apply(&v) >= 0.0 { 1i8 } else { -1i8 };
                        s == side
                    }
                    _ => atlas.q_region_of(&sub, &v) == Some(ridx),
                }
            };
            let loops = contours(&inside, vp, spec.shade_grid);
            if loops.is_empty() {
                continue;
            }
            let fill = &spec.style.shade_fills[ridx % spec.style.shade_fills.len()];
            let mut d = String::new();
            for l in &loops {
                d.push_str(&path_from_polyline(&m, l, true));
                d.push(' ');
            }
            svg.push_str(&format!(
                "<path class=\"shade\" fill=\"{}\" fill-rule=\"evenodd\" stroke=\"none\" d=\"{}\"/>\n",
                fill,
                d.trim_end()
            ));
        }
        svg.push_str("</g>\n");
    }

    // curves from the atlas boundary arcs
    let collect = |sel: CurveSel, bounded: bool| -> Vec<Vec<(f64, f64)>> {
        let mut out = Vec::new();
        for c in &atlas.components {
            for piece in &c.boundary {
                if piece.arc.curve != sel || piece.arc.closed != bounded {
                    continue;
                }
                for pl in arc_polylines(&piece.arc.samples, vp) {
                    out.push(pl);
                }
            }
        }
        out
    };
    if spec.layers.contains(&Layer::Cubic) {
        let stroke = &spec.style.cubic_stroke;
        let wd = spec.style.stroke_width;
        svg.push_str("<g id=\"cubic-bounded\">\n");
        for pl in collect(CurveSel::F, true) {
            svg.push_str(&format!(
                "<path fill=\"none\" stroke=\"{}\" stroke-width=\"{}\" d=\"{}\"/>\n",
                stroke,
                fmt(wd),
                path_from_polyline(&m, &pl, false)
            ));
        }
        svg.push_str("</g>\n<g id=\"cubic-unbounded\">\n");
        for pl in collect(CurveSel::F, false) {
            svg.push_str(&format!(
                "<path fill=\"none\" stroke=\"{}\" stroke-width=\"{}\" d=\"{}\"/>\n",
                stroke,
                fmt(wd),
                path_from_polyline(&m, &pl, false)
            ));
        }
        svg.push_str("</g>\n");
    }
    if spec.layers.contains(&Layer::Hessian) {
        let stroke = &spec.style.hessian_stroke;
        let wd = spec.style.stroke_width;
        svg.push_str("<g id=\"hessian\">\n");
        for bounded in [true, false] {
            for pl in collect(CurveSel::H, bounded) {
                svg.push_str(&format!(
                    "<path fill=\"none\" stroke=\"{}\" stroke-width=\"{}\" d=\"{}\"/>\n",
                    stroke,
                    fmt(wd),
                    path_from_polyline(&m, &pl, false)
                ));
            }
        }
        svg.push_str("</g>\n");
    }
    if spec.layers.contains(&Layer::Asymptotes) {
        svg.push_str("<g id=\"asymptotes\">\n");
        let asy = crate::curve_geometry::asymptotes(spec.k, tol)?;
        for l in &asy {
            if let Some((p, qq)) = clip_line_to_viewport(l, vp) {
                let (x1, y1) = m.px(p.0, p.1);
                let (x2, y2) = m.px(qq.0, qq.1);
                svg.push_str(&format!(
                    "<line stroke=\"{}\" stroke-width=\"{}\" stroke-dasharray=\"6 4\" x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\"/>\n",
                    spec.style.asymptote_stroke,
                    fmt(spec.style.stroke_width * 0.8),
                    fmt(x1),
                    fmt(y1),
                    fmt(x2),
                    fmt(y2)
                ));
            }
        }
        svg.push_str("</g>\n");
    }
    if spec.layers.contains(&Layer::MarkPoints) {
        svg.push_str("<g id=\"marks\">\n");
        let mut marks: Vec<(String, f64, f64)> = Vec::new();
        if (spec.k - 1.0).abs() > tol.degenerate_k_band && spec.k.abs() > tol.degenerate_k_band {
            let q1 = forms::q1_point(spec.k);
            let q2 = forms::q2_point(spec.k);
            let r = forms::r_point(spec.k);
            marks.push(("Q1".into(), q1.x(), q1.y()));
            marks.push(("Q2".into(), q2.x(), q2.y()));
            marks.push(("R".into(), r.x(), r.y()));
        }
        if let Some(a) = &spec.a_point {
            if let Some((ax, ay)) = a.to_affine() {
                marks.push(("A".into(), ax, ay));
            }
        }
        for (label, x, y) in marks {
            if x < vp.0 || x > vp.1 || y < vp.2 || y > vp.3 {
                continue;
            }
            let (px, py) = m.px(x, y);
            let r = 3.0;
            svg.push_str(&format!(
                "<polygon fill=\"{}\" points=\"{},{} {},{} {},{} {},{}\"/>\n",
                spec.style.mark_fill,
                fmt(px - r),
                fmt(py),
                fmt(px),
                fmt(py - r),
                fmt(px + r),
                fmt(py),
                fmt(px),
                fmt(py + r)
            ));
            svg.push_str(&format!(
                "<text x=\"{}\" y=\"{}\" font-size=\"14\" fill=\"{}\">{}</text>\n",
                fmt(px + 5.0),
                fmt(py - 5.0),
                spec.style.mark_fill,
                label
            ));
        }
        svg.push_str("</g>\n");
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

/// Figure presets; the viewport is the named-point bounding box with a 10%
/// margin (plus explicit span points for the wide and close-up variants).
pub fn preset(name: &str) -> Result<FigureSpec, Error> {
    let all = vec![
        Layer::ShadeQ,
        Layer::Cubic,
        Layer::Hessian,
        Layer::Asymptotes,
        Layer::MarkPoints,
    ];
    let (k, a, layers, extra): (f64, Option<(f64, f64)>, Vec<Layer>, Vec<(f64, f64)>) =
        match name {
            "fig1" => (
                5.0,
                None,
                vec![Layer::Cubic, Layer::Hessian, Layer::Asymptotes, Layer::MarkPoints],
                vec![(-1.0, -1.0), (2.0, 2.0)],
            ),
            "fig2" => (5.0, Some((-1.0, 3.0)), all.clone(), vec![(-1.5, -1.0), (2.5, 3.3)]),
            "fig3" => (5.0, Some((-2.0, 1.0)), all.clone(), vec![(-2.5, -1.2), (2.2, 2.2)]),
            "fig4" => (-3.0, Some((0.28, 0.28)), all.clone(), vec![(-5.0, -5.0), (5.0, 5.0)]),
            "fig5" => (-3.0, Some((0.28, 0.28)), all.clone(), vec![(-0.5, -0.5), (3.0, 3.0)]),
            other => return Err(Error::InvalidInput(format!("unknown preset {other}"))),
        };

    // named points: asymptote contacts, triangle of reference, viewpoint
    let mut pts: Vec<(f64, f64)> = extra;
    if name != "fig4" && name != "fig5" {
        let q1 = forms::q1_point(k);
        let q2 = forms::q2_point(k);
        let r = forms::r_point(k);
        pts.extend([
            (q1.x(), q1.y()),
            (q2.x(), q2.y()),
            (r.x(), r.y()),
            (0.0, 0.0),
            (1.0, 0.0),
            (0.0, 1.0),
        ]);
        if let Some(ap) = a {
            pts.push(ap);
        }
    }
    let (mut xmin, mut xmax) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut ymin, mut ymax) = (f64::INFINITY, f64::NEG_INFINITY);
    for (x, y) in &pts {
        xmin = xmin.min(*x);
        xmax = xmax.max(*x);
        ymin = ymin.min(*y);
        ymax = ymax.max(*y);
    }
    let mx = 0.1 * (xmax - xmin);
    let my = 0.1 * (ymax - ymin);
    Ok(FigureSpec {
        k,
        a_point: a.map(|(x, y)| RayVector::affine(x, y)),
        viewport: (xmin - mx, xmax + mx, ymin - my, ymax + my),
        layers,
        width_px: 800,
        height_px: 800,
        shade_grid: 420,
        style: Style::default(),
    })
}
