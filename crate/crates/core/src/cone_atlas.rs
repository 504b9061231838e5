//! Components of the positive index cone and their q-subcones.
//!
//! The positive index cone of F_k is the set of rays L with F(L) > 0 whose
//! polar form D ↦ T(L,D,D) has signature (1,2).  Components are represented
//! by their boundary arcs (with a positive/negative cone sign), the corner
//! rays where cubic and Hessian walls meet, and an interior witness ray.
//! Fast membership uses sign tests (F, H and the affine sector constraints
//! of each regime) rather than point-in-polygon queries.
//!
//! The three hybrid components are images of each other under the linear
//! involutions (x,y,z) ↦ (x, z−x−y, z) and (x,y,z) ↦ (z−x−y, y, z), which
//! preserve F_k exactly; only the standard component is traced.

use crate::curve_geometry::{trace_branch_of, Arc, BranchId, CurvePair, CurveSel, TraceConfig};
use crate::error::Error;
use crate::forms::QuadraticForm3;
use crate::ray::{RayVector, B1, B2};
use crate::rng::SplitMix64;
use crate::tolerances::Tolerances;
use serde::{Deserialize, Serialize};

/// Kind of a positive-index-cone component.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ComponentKind {
    /// Cone over the bounded oval of F (k > 1 only).
    BoundedPositive,
    /// Cubic wall plus Hessian wall meeting along two corner rays.
    Hybrid,
    /// Negative cone over the bounded Hessian oval (k < 1, k ∉ {0,−2}).
    NegBoundedHessian,
    /// k = −2: cubic wall plus a wall inside the plane z = 0.
    Km2Special,
}

/// Which cone over an arc forms the boundary piece.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ConeSign {
    Positive,
    Negative,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoundaryPiece {
    pub arc: Arc,
    pub sign: ConeSign,
}

/// Affine sector constraints identifying one component per regime.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
enum Sector {
    /// k > 1: cone over the oval inside the triangle of reference.
    BoundedTriangle,
    /// Hybrid sectors, indexed by which inflexion pair the corners span:
    /// 0 = {B1,B2}, 1 = {B1,B3}, 2 = {B2,B3}; `gt1` records the regime.
    Hybrid { pair: u8, gt1: bool },
    /// Negative cone over the bounded Hessian oval.
    NegBounded,
    /// k = −2 wedges, same pair indexing as `Hybrid`.
    Km2 { pair: u8 },
}

/// A connected component of the positive index cone.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConeComponent {
    pub id: usize,
    pub kind: ComponentKind,
    pub boundary: Vec<BoundaryPiece>,
    pub corners: Vec<RayVector>,
    pub witness: RayVector,
    /// Whether the component really is part of the positive index cone
    /// (false exactly for the negative cone over the bounded Hessian oval
    /// when −2 < k < 1: the polar form is definite there, with the
    /// signature transition happening at k = −2).
    pub positive_index: bool,
    sector: Sector,
    /// Ordered rays around the projectivised boundary.
    #[serde(skip)]
    pub loop_samples: Vec<RayVector>,
}

/// One convex region of {D ∈ comp° : G_E(D) > 0}.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct QRegion {
    pub witness: RayVector,
    /// Pieces of the parent boundary where G_E ≥ 0 belonging to this region.
    pub boundary_arcs: Vec<Vec<RayVector>>,
    /// Traced pieces of the conic {G_E = 0} crossing the component.
    pub conic_arcs: Vec<Vec<RayVector>>,
    /// Refined boundary rays where G_E vanishes.
    pub boundary_zeros: Vec<RayVector>,
    /// Sign of ⟨w, M v₊⟩ used for O(1) region attribution when G_E has
    /// signature (1,2).
    pub axis_side: Option<i8>,
}

/// All connected components of {D ∈ comp° : T(E,D,D) > 0}.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SubconeQ {
    pub parent: usize,
    pub e_class: RayVector,
    pub regions: Vec<QRegion>,
    /// Positive eigenaxis of G_E when the signature is (1,2).
    pub axis: Option<RayVector>,
}

/// The component atlas for one parameter k.
#[derive(Debug, Clone)]
pub struct ConeAtlas {
    pub k: f64,
    pub tol: Tolerances,
    pub pair: CurvePair,
    pub components: Vec<ConeComponent>,
}

fn apply_linear(m: &[[f64; 3]; 3], p: &RayVector) -> RayVector {
    let c = p.coords;
    RayVector::new(
        m[0][0] * c[0] + m[0][1] * c[1] + m[0][2] * c[2],
        m[1][0] * c[0] + m[1][1] * c[1] + m[1][2] * c[2],
        m[2][0] * c[0] + m[2][1] * c[1] + m[2][2] * c[2],
    )
}

/// (x,y,z) ↦ (x, z−x−y, z): swaps the roles of y and z−x−y.
const SIGMA_1: [[f64; 3]; 3] = [[1.0, 0.0, 0.0], [-1.0, -1.0, 1.0], [0.0, 0.0, 1.0]];
/// (x,y,z) ↦ (z−x−y, y, z): swaps the roles of x and z−x−y.
const SIGMA_2: [[f64; 3]; 3] = [[-1.0, -1.0, 1.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];

fn map_arc(m: &[[f64; 3]; 3], arc: &Arc) -> Arc {
    Arc {
        curve: arc.curve,
        branch_id: arc.branch_id,
        samples: arc
            .samples
            .iter()
            .map(|s| apply_linear(m, s).normalized().unwrap())
            .collect(),
        endpoints: (
            apply_linear(m, &arc.endpoints.0),
            apply_linear(m, &arc.endpoints.1),
        ),
        closed: arc.closed,
    }
}

fn map_component(m: &[[f64; 3]; 3], comp: &ConeComponent, id: usize, sector: Sector) -> ConeComponent {
    ConeComponent {
        id,
        kind: comp.kind,
        boundary: comp
            .boundary
            .iter()
            .map(|p| BoundaryPiece { arc: map_arc(m, &p.arc), sign: p.sign })
            .collect(),
        corners: comp.corners.iter().map(|c| apply_linear(m, c)).collect(),
        witness: apply_linear(m, &comp.witness),
        positive_index: comp.positive_index,
        sector,
        loop_samples: comp
            .loop_samples
            .iter()
            .map(|s| apply_linear(m, s).normalized().unwrap())
            .collect(),
    }
}

/// Boundary loop of a hybrid-style component: the positive arc followed by
/// the reversed negation of the Hessian arc (both run corner_a → corner_b).
fn hybrid_loop(c1: &Arc, c2: &Arc, negate_second: bool) -> Vec<RayVector> {
    let mut out: Vec<RayVector> = c1.samples.clone();
    let second: Vec<RayVector> = c2
        .samples
        .iter()
        .rev()
        .map(|s| if negate_second { s.neg() } else { *s })
        .collect();
    for s in second {
        if out.last().map(|l| l.ray_distance(&s) > 1e-12).unwrap_or(true) {
            out.push(s);
        }
    }
    out
}

impl ConeAtlas {
    pub fn new(k: f64, tol: &Tolerances) -> Result<Self, Error> {
        Self::with_config(k, tol, &TraceConfig::default())
    }

    pub fn with_config(k: f64, tol: &Tolerances, cfg: &TraceConfig) -> Result<Self, Error> {
        tol.check_band(k, 1.0)?;
        let pair = CurvePair::new(k, tol)?;
        let k_is_zero = k.abs() <= tol.degenerate_k_band;
        let k_is_m2 = (k + 2.0).abs() <= tol.degenerate_k_band;

        let mut components = Vec::new();
        if k > 1.0 {
            let oval = trace_branch_of(&pair, CurveSel::F, BranchId::Bounded, tol, cfg)?;
            let c1 = trace_branch_of(&pair, CurveSel::F, BranchId::C1, tol, cfg)?;
            let c2 = trace_branch_of(&pair, CurveSel::H, BranchId::C2, tol, cfg)?;
            components.push(ConeComponent {
                id: 0,
                kind: ComponentKind::BoundedPositive,
                loop_samples: oval.samples.clone(),
                boundary: vec![BoundaryPiece { arc: oval, sign: ConeSign::Positive }],
                corners: vec![],
                witness: RayVector::affine(1.0 / 3.0, 1.0 / 3.0),
                positive_index: true,
                sector: Sector::BoundedTriangle,
            });
            let hyb = ConeComponent {
                id: 1,
                kind: ComponentKind::Hybrid,
                loop_samples: hybrid_loop(&c1, &c2, true),
                boundary: vec![
                    BoundaryPiece { arc: c1, sign: ConeSign::Positive },
                    BoundaryPiece { arc: c2, sign: ConeSign::Negative },
                ],
                corners: vec![B1.neg(), B2.neg()],
                witness: RayVector::new(-1.0, -1.0, 0.0),
                positive_index: true,
                sector: Sector::Hybrid { pair: 0, gt1: true },
            };
            let hyb2 = map_component(&SIGMA_2, &hyb, 2, Sector::Hybrid { pair: 2, gt1: true });
            let hyb3 = map_component(&SIGMA_1, &hyb, 3, Sector::Hybrid { pair: 1, gt1: true });
            components.push(hyb);
            components.push(hyb2);
            components.push(hyb3);
        } else if k_is_m2 {
            let c1 = trace_branch_of(&pair, CurveSel::F, BranchId::C1, tol, cfg)?;
            let c3 = trace_branch_of(&pair, CurveSel::H, BranchId::C3, tol, cfg)?;
            let mut loop_samples = c1.samples.clone();
            // C3 runs B2 → B1; the C1 arc runs B1 → B2, so append directly
            for s in &c3.samples {
                if loop_samples.last().map(|l| l.ray_distance(s) > 1e-12).unwrap_or(true) {
                    loop_samples.push(*s);
                }
            }
            let main = ConeComponent {
                id: 0,
                kind: ComponentKind::Km2Special,
                loop_samples,
                boundary: vec![
                    BoundaryPiece { arc: c1, sign: ConeSign::Positive },
                    BoundaryPiece { arc: c3, sign: ConeSign::Positive },
                ],
                corners: vec![B1, B2],
                witness: RayVector::new(1.0, 1.0, 1.0),
                positive_index: true,
                sector: Sector::Km2 { pair: 0 },
            };
            let b = map_component(&SIGMA_1, &main, 1, Sector::Km2 { pair: 1 });
            let c = map_component(&SIGMA_2, &main, 2, Sector::Km2 { pair: 2 });
            components.push(main);
            components.push(b);
            components.push(c);
        } else {
            // k < 1, k ≠ −2 (k = 0 included: C2 is the axis-segment polyline)
            let c1 = trace_branch_of(&pair, CurveSel::F, BranchId::C1, tol, cfg)?;
            let c2 = trace_branch_of(&pair, CurveSel::H, BranchId::C2, tol, cfg)?;
            let main = ConeComponent {
                id: 0,
                kind: ComponentKind::Hybrid,
                loop_samples: hybrid_loop(&c1, &c2, true),
                boundary: vec![
                    BoundaryPiece { arc: c1, sign: ConeSign::Positive },
                    BoundaryPiece { arc: c2, sign: ConeSign::Negative },
                ],
                corners: vec![B1, B2],
                witness: RayVector::new(1.0, 1.0, 0.0),
                positive_index: true,
                sector: Sector::Hybrid { pair: 0, gt1: false },
            };
            let hyb_b = map_component(&SIGMA_1, &main, 1, Sector::Hybrid { pair: 1, gt1: false });
            let hyb_c = map_component(&SIGMA_2, &main, 2, Sector::Hybrid { pair: 2, gt1: false });
            components.push(main);
            components.push(hyb_b);
            components.push(hyb_c);

            let oval = if k_is_zero {
                triangle_polyline()
            } else {
                trace_branch_of(&pair, CurveSel::H, BranchId::Bounded, tol, cfg)?
            };
            components.push(ConeComponent {
                id: 3,
                kind: ComponentKind::NegBoundedHessian,
                loop_samples: oval.samples.iter().map(|s| s.neg()).collect(),
                boundary: vec![BoundaryPiece { arc: oval, sign: ConeSign::Negative }],
                corners: vec![],
                witness: RayVector::new(-1.0 / 3.0, -1.0 / 3.0, -1.0),
                // the polar form inside the oval is (2,1) only for k < −2
                positive_index: k < -2.0,
                sector: Sector::NegBounded,
            });
        }

        Ok(ConeAtlas { k, tol: *tol, pair, components })
    }

    /// Positive-index test: F(D) > 0 and the polar form of F at D has
    /// signature (1,2).
    pub fn positive_index_membership(&self, d: &RayVector) -> bool {
        if d.is_zero() || self.pair.f.evaluate(d) <= 0.0 {
            return false;
        }
        self.pair.f.polar_quadric(d).signature(&self.tol).as_tuple() == (1, 2, 0)
    }

    /// Fast interior test using F/H signs plus the sector constraints.
    pub fn contains_interior(&self, comp: usize, p: &RayVector) -> bool {
        let c = &self.components[comp];
        if p.is_zero() {
            return false;
        }
        if self.pair.f.evaluate(p) <= 0.0 || self.pair.h.evaluate(p) <= 0.0 {
            return false;
        }
        self.sector_contains(c.sector, p)
    }

    fn sector_contains(&self, sector: Sector, p: &RayVector) -> bool {
        let m = p.sup_norm();
        let z = p.z();
        let z_small = z.abs() <= 1e-12 * m;
        let aff = |q: &RayVector| (q.x() / q.z(), q.y() / q.z());
        // branch-region sign tests per inflexion pair; `fk` selects whether
        // the regions are the k>1 or k<1 layout
        let cubic_side = |x: f64, y: f64, pair: u8, gt1: bool| -> bool {
            if gt1 {
                match pair {
                    0 => x < 0.0 && y < 0.0,
                    1 => x < 0.0 && x + y > 1.0,
                    _ => y < 0.0 && x + y > 1.0,
                }
            } else {
                match pair {
                    0 => x > 0.0 && y > 0.0 && x + y > 1.0,
                    1 => x > 0.0 && y < 0.0,
                    _ => x < 0.0 && y > 0.0,
                }
            }
        };
        match sector {
            Sector::BoundedTriangle => {
                if z_small || z < 0.0 {
                    return false;
                }
                let (x, y) = aff(p);
                x > 0.0 && y > 0.0 && x + y < 1.0
            }
            Sector::NegBounded => {
                if z_small || z > 0.0 {
                    return false;
                }
                let (x, y) = aff(&p.neg());
                x > 0.0 && y > 0.0 && x + y < 1.0
            }
            Sector::Hybrid { pair, gt1 } => {
                if z_small {
                    // wedge strictly between the two corner rays
                    let (u, v) = if gt1 { (-p.x(), -p.y()) } else { (p.x(), p.y()) };
                    match pair {
                        0 => u > 0.0 && v > 0.0,
                        1 => u > 0.0 && v < 0.0 && u + v < 0.0,
                        _ => v > 0.0 && u < 0.0 && u + v < 0.0,
                    }
                } else if z > 0.0 {
                    let (x, y) = aff(p);
                    cubic_side(x, y, pair, gt1)
                } else {
                    // the Hessian wall of the k>1 layout sits where the
                    // cubic wall of the k<1 layout sits, and vice versa
                    let (x, y) = aff(&p.neg());
                    cubic_side(x, y, pair, !gt1)
                }
            }
            Sector::Km2 { pair } => {
                if z_small || z < 0.0 {
                    return false;
                }
                let (x, y) = aff(p);
                let third = 1.0 / 3.0;
                match pair {
                    0 => x > third && y > third,
                    1 => x > third && x + y < 2.0 / 3.0,
                    _ => y > third && x + y < 2.0 / 3.0,
                }
            }
        }
    }

    /// Id of the unique component containing D, if any.
    pub fn component_of(&self, d: &RayVector) -> Option<usize> {
        if !self.positive_index_membership(d) {
            return None;
        }
        self.components
            .iter()
            .position(|c| self.sector_contains(c.sector, d))
    }

    /// The component whose boundary is the standard C1/C2 frame (hybrid for
    /// generic k, the special wedge for k = −2).
    pub fn standard_hybrid_id(&self) -> usize {
        match self.components[0].kind {
            ComponentKind::BoundedPositive => 1,
            _ => 0,
        }
    }

    pub fn bounded_positive_id(&self) -> Option<usize> {
        self.components
            .iter()
            .position(|c| c.kind == ComponentKind::BoundedPositive)
    }

    /// Rejection-sample an interior ray of a component.
    pub fn interior_sample(&self, comp: usize, rng: &mut SplitMix64) -> RayVector {
        let c = &self.components[comp];
        let n = c.loop_samples.len();
        loop {
            let b1 = c.loop_samples[(rng.next_u64() as usize) % n];
            let b2 = c.loop_samples[(rng.next_u64() as usize) % n];
            let w0 = rng.next_f64();
            let w1 = rng.next_f64();
            let w2 = rng.next_f64();
            let p = c
                .witness
                .normalized()
                .unwrap()
                .scale(w0 + 0.05)
                .add(&b1.scale(w1))
                .add(&b2.scale(w2));
            if let Ok(pn) = p.normalized() {
                if self.contains_interior(comp, &pn) {
                    return pn;
                }
            }
        }
    }

    /// True when the straight segment between two rays stays inside the
    /// component (optionally intersected with an extra open condition).
    pub fn segment_inside(
        &self,
        comp: usize,
        a: &RayVector,
        b: &RayVector,
        extra: &dyn Fn(&RayVector) -> bool,
        steps: usize,
    ) -> bool {
        for i in 0..=steps {
            let t = i as f64 / steps as f64;
            let p = a.lerp(b, t);
            if p.sup_norm() < 1e-12 {
                return false;
            }
            if !self.contains_interior(comp, &p) || !extra(&p) {
                return false;
            }
        }
        true
    }

    /// All connected components of {D ∈ comp° : T(E,D,D) > 0}; each is
    /// convex and the count is 0, 1 or 2.
    pub fn q_subcone(&self, comp: usize, e: &RayVector) -> Result<SubconeQ, Error> {
        if e.is_zero() {
            return Err(Error::InvalidInput("zero E class".into()));
        }
        let c = &self.components[comp];
        let q = self.pair.f.polar_quadric(e);
        let g = |p: &RayVector| q.evaluate(p);
        let loop_s = &c.loop_samples;
        let n = loop_s.len();

        // refined boundary zeros of G_E along the loop
        let vals: Vec<f64> = loop_s.iter().map(|p| g(p)).collect();
        let mut zeros: Vec<RayVector> = Vec::new();
        for i in 0..n {
            let j = (i + 1) % n;
            let (a, b) = (vals[i], vals[j]);
            if a != 0.0 && b != 0.0 && (a > 0.0) != (b > 0.0) {
                let pa = loop_s[i];
                let pb = loop_s[j];
                let t = crate::roots::bisect(
                    |t| g(&pa.lerp(&pb, t).normalized().unwrap()),
                    0.0,
                    1.0,
                    60,
                );
                zeros.push(pa.lerp(&pb, t).normalized().unwrap());
            }
        }

        // maximal positive arcs (wrapping) along the loop
        let mut arcs: Vec<Vec<RayVector>> = Vec::new();
        let mut visited = vec![false; n];
        for start in 0..n {
            if visited[start] || vals[start] <= 0.0 {
                continue;
            }
            let mut s = start;
            loop {
                let prev = (s + n - 1) % n;
                if vals[prev] > 0.0 && prev != start {
                    s = prev;
                } else {
                    break;
                }
            }
            let mut run = Vec::new();
            let mut i = s;
            while vals[i] > 0.0 && !visited[i] {
                visited[i] = true;
                run.push(loop_s[i]);
                i = (i + 1) % n;
            }
            arcs.push(run);
        }

        let e_sig = q.signature(&self.tol);
        let axis = if e_sig.as_tuple() == (1, 2, 0) {
            q.positive_axis(&self.tol).ok()
        } else {
            None
        };

        let witness_dir = c.witness.normalized().unwrap();
        let mut regions: Vec<QRegion> = Vec::new();

        if arcs.is_empty() {
            // either empty, or (for E inside the component) all of comp°
            let mut found: Option<RayVector> = None;
            if g(&witness_dir) > 0.0 {
                found = Some(witness_dir);
            } else {
                let mut rng = SplitMix64::new(0x51ED);
                for _ in 0..400 {
                    let p = self.interior_sample(comp, &mut rng);
                    if g(&p) > 0.0 {
                        found = Some(p);
                        break;
                    }
                }
            }
            if let Some(w) = found {
                regions.push(QRegion {
                    witness: w,
                    boundary_arcs: vec![c.loop_samples.clone()],
                    conic_arcs: vec![],
                    boundary_zeros: vec![],
                    axis_side: None,
                });
            }
        } else {
            // representative interior point just inside each positive arc
            let reps: Vec<RayVector> = arcs
                .iter()
                .map(|run| {
                    let best = run
                        .iter()
                        .max_by(|a, b| g(a).partial_cmp(&g(b)).unwrap())
                        .unwrap();
                    let mut eps = 0.05;
                    loop {
                        let p = best.lerp(&witness_dir, eps).normalized().unwrap();
                        if (g(&p) > 0.0 && self.contains_interior(comp, &p)) || eps < 1e-7 {
                            return p;
                        }
                        eps *= 0.5;
                    }
                })
                .collect();

            // group arcs into connected regions via the segment test
            let mut group: Vec<usize> = (0..arcs.len()).collect();
            for i in 0..arcs.len() {
                for j in (i + 1)..arcs.len() {
                    if group[j] != j || group[i] != i {
                        continue;
                    }
                    if self.segment_inside(comp, &reps[i], &reps[j], &|p| g(p) > 0.0, 96) {
                        group[j] = i;
                    }
                }
            }
            let mut ids: Vec<usize> = group.clone();
            ids.sort_unstable();
            ids.dedup();
            for gid in ids {
                let members: Vec<usize> = (0..arcs.len()).filter(|i| group[*i] == gid).collect();
                let w = reps[members[0]];
                let axis_side = axis.as_ref().map(|v| {
                    if q.apply(v).apply(&w) >= 0.0 {
                        1i8
                    } else {
                        -1i8
                    }
                });
                regions.push(QRegion {
                    witness: w,
                    boundary_arcs: members.iter().map(|i| arcs[*i].clone()).collect(),
                    conic_arcs: vec![],
                    boundary_zeros: zeros.clone(),
                    axis_side,
                });
            }
            // conic pieces: trace {G_E = 0} from each boundary zero inward
            for piece in trace_conic_pieces(self, comp, &q, &zeros) {
                if piece.len() < 2 {
                    continue;
                }
                let mid = piece[piece.len() / 2];
                let grad = RayVector::from_coords(q.apply(&mid).covector);
                let gp = grad.sub(&mid.scale(grad.dot(&mid)));
                let gn = gp.norm();
                if gn < 1e-12 {
                    continue;
                }
                let probe = mid.add(&gp.scale(0.02 / gn));
                if let Ok(pn) = probe.normalized() {
                    if let Some(r) = regions.iter_mut().find(|r| {
                        self.segment_inside(comp, &pn, &r.witness.clone(), &|p| g(p) > 0.0, 64)
                    }) {
                        r.conic_arcs.push(piece);
                    }
                }
            }
        }

        Ok(SubconeQ { parent: comp, e_class: *e, regions, axis })
    }

    /// Region index of a ray inside a subcone, if any.
    pub fn q_region_of(&self, sub: &SubconeQ, p: &RayVector) -> Option<usize> {
        if !self.contains_interior(sub.parent, p) {
            return None;
        }
        let q = self.pair.f.polar_quadric(&sub.e_class);
        if q.evaluate(p) <= 0.0 {
            return None;
        }
        if sub.regions.is_empty() {
            return None;
        }
        if sub.regions.len() == 1 {
            return Some(0);
        }
        if let Some(axis) = &sub.axis {
            let side = if q.apply(axis).apply(p) >= 0.0 { 1i8 } else { -1i8 };
            if let Some(i) = sub.regions.iter().position(|r| r.axis_side == Some(side)) {
                return Some(i);
            }
        }
        sub.regions.iter().position(|r| {
            self.segment_inside(sub.parent, p, &r.witness, &|x| q.evaluate(x) > 0.0, 64)
        })
    }

    /// Midpoint convexity check over random interior pairs.
    pub fn component_convexity(&self, comp: usize, n_samples: usize, rng: &mut SplitMix64) -> bool {
        convexity_by_midpoints(
            |rng| self.interior_sample(comp, rng),
            |p| self.contains_interior(comp, p),
            n_samples,
            rng,
        )
    }

    /// JSON atlas dump: {k, components: [{kind, corner_rays, witness}]}.
    pub fn summary_json(&self) -> serde_json::Value {
        serde_json::json!({
            "k": self.k,
            "components": self.components.iter().map(|c| serde_json::json!({
                "id": c.id,
                "kind": c.kind,
                "corner_rays": c.corners,
                "witness": c.witness,
                "positive_index": c.positive_index,
            })).collect::<Vec<_>>(),
        })
    }
}

/// Generic midpoint convexity test over a sampler and a membership test.
pub fn convexity_by_midpoints<S, M>(
    mut sampler: S,
    membership: M,
    n_samples: usize,
    rng: &mut SplitMix64,
) -> bool
where
    S: FnMut(&mut SplitMix64) -> RayVector,
    M: Fn(&RayVector) -> bool,
{
    for _ in 0..n_samples {
        let a = sampler(rng);
        let b = sampler(rng);
        let mid = a.add(&b).scale(0.5);
        if mid.sup_norm() < 1e-12 {
            continue;
        }
        if !membership(&mid.normalized().unwrap()) {
            return false;
        }
    }
    true
}

/// k = 0 degenerate Hessian oval: the triangle of reference as a polyline
/// (each edge lies on one line of the Hessian triple, so samples are
/// on-curve).
fn triangle_polyline() -> Arc {
    let n = 120;
    let mut samples = Vec::with_capacity(3 * n + 1);
    let verts = [(0.0, 0.0), (1.0, 0.0), (0.0, 1.0), (0.0, 0.0)];
    for e in 0..3 {
        let (x0, y0) = verts[e];
        let (x1, y1) = verts[e + 1];
        for i in 0..n {
            let t = i as f64 / n as f64;
            samples.push(RayVector::affine(x0 + t * (x1 - x0), y0 + t * (y1 - y0)));
        }
    }
    samples.push(RayVector::affine(0.0, 0.0));
    let samples: Vec<RayVector> = samples.into_iter().map(|s| s.normalized().unwrap()).collect();
    let first = samples[0];
    Arc {
        curve: CurveSel::H,
        branch_id: BranchId::Bounded,
        samples,
        endpoints: (first, first),
        closed: true,
    }
}

/// March the conic {G_E = 0} on the unit sphere from each boundary zero
/// through the component interior until the opposite wall is reached.
fn trace_conic_pieces(
    atlas: &ConeAtlas,
    comp: usize,
    q: &QuadraticForm3,
    zeros: &[RayVector],
) -> Vec<Vec<RayVector>> {
    let mut pieces = Vec::new();
    let mut used = vec![false; zeros.len()];
    let polish = |p: &RayVector| -> RayVector {
        let mut x = p.scale(1.0 / p.norm());
        for _ in 0..8 {
            let v = q.evaluate(&x);
            let g = RayVector::from_coords(q.apply(&x).covector).scale(2.0);
            let gt = g.sub(&x.scale(g.dot(&x)));
            let n2 = gt.dot(&gt);
            if n2 < 1e-300 {
                break;
            }
            x = x.sub(&gt.scale(v / n2));
            x = x.scale(1.0 / x.norm());
        }
        x
    };
    for (zi, z) in zeros.iter().enumerate() {
        if used[zi] {
            continue;
        }
        let z = z.scale(1.0 / z.norm());
        let g = RayVector::from_coords(q.apply(&z).covector);
        let mut t = z.cross(&g);
        if t.norm() < 1e-12 {
            continue; // singular point of the conic
        }
        t = t.scale(1.0 / t.norm());
        let probe = polish(&z.add(&t.scale(0.01)));
        let dir = if atlas.contains_interior(comp, &probe) { 1.0 } else { -1.0 };
        let mut p = z;
        let mut piece = vec![p.normalized().unwrap()];
        let mut prev_t: Option<RayVector> = None;
        let mut inside_seen = false;
        for _ in 0..4000 {
            let g = RayVector::from_coords(q.apply(&p).covector);
            let mut t = p.cross(&g);
            let tn = t.norm();
            if tn < 1e-13 {
                break;
            }
            t = t.scale(1.0 / tn);
            match &prev_t {
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
            let next = polish(&p.add(&t.scale(0.01)));
            prev_t = Some(t);
            p = next;
            let inside = atlas.contains_interior(comp, &p);
            piece.push(p.normalized().unwrap());
            if inside {
                inside_seen = true;
            } else if inside_seen {
                break;
            } else if piece.len() > 12 {
                break; // never entered the component; give up on this zero
            }
        }
        if inside_seen && piece.len() > 2 {
            if let Some((jbest, _)) = zeros
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != zi)
                .min_by(|(_, a), (_, b)| {
                    a.ray_distance(&p).partial_cmp(&b.ray_distance(&p)).unwrap()
                })
            {
                used[jbest] = true;
            }
            used[zi] = true;
            pieces.push(piece);
        }
    }
    pieces
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn component_counts_per_regime() {
        let t = tol();
        assert_eq!(ConeAtlas::new(5.0, &t).unwrap().components.len(), 4);
        assert_eq!(ConeAtlas::new(0.5, &t).unwrap().components.len(), 4);
        assert_eq!(ConeAtlas::new(0.0, &t).unwrap().components.len(), 4);
        assert_eq!(ConeAtlas::new(-2.0, &t).unwrap().components.len(), 3);
        assert!(ConeAtlas::new(1.0, &t).is_err());
    }

    #[test]
    fn witnesses_pass_membership_and_sectors() {
        let t = tol();
        for &k in &[5.0, 2.0, 0.5, 0.0, -0.5, -2.0, -3.0] {
            let atlas = ConeAtlas::new(k, &t).unwrap();
            for c in &atlas.components {
                assert_eq!(
                    atlas.positive_index_membership(&c.witness),
                    c.positive_index,
                    "k={k} comp {} flag does not match the witness signature",
                    c.id
                );
                if c.positive_index {
                    assert_eq!(
                        atlas.component_of(&c.witness),
                        Some(c.id),
                        "k={k} comp {} witness not classified to itself",
                        c.id
                    );
                }
            }
        }
    }

    #[test]
    fn oval_cone_signature_transition_at_minus_two() {
        // Inside the bounded Hessian oval the polar form is definite for
        // −2 < k < 1 and has signature (2,1) for k < −2; the flag records it.
        let t = tol();
        let c = RayVector::affine(1.0 / 3.0, 1.0 / 3.0);
        for &k in &[0.5, -0.5, 0.0] {
            let atlas = ConeAtlas::new(k, &t).unwrap();
            let sig = atlas.pair.f.polar_quadric(&c).signature(&t);
            assert_eq!(sig.as_tuple(), (0, 3, 0), "k={k}");
            let neg = atlas.components.iter().find(|c| c.kind == ComponentKind::NegBoundedHessian);
            assert!(!neg.unwrap().positive_index, "k={k}");
        }
        for &k in &[-3.0, -5.0] {
            let atlas = ConeAtlas::new(k, &t).unwrap();
            let sig = atlas.pair.f.polar_quadric(&c).signature(&t);
            assert_eq!(sig.as_tuple(), (2, 1, 0), "k={k}");
            let neg = atlas.components.iter().find(|c| c.kind == ComponentKind::NegBoundedHessian);
            assert!(neg.unwrap().positive_index, "k={k}");
        }
    }

    #[test]
    fn membership_examples_k5() {
        let t = tol();
        let atlas = ConeAtlas::new(5.0, &t).unwrap();
        // centroid is interior to the bounded positive cone
        let c = RayVector::affine(1.0 / 3.0, 1.0 / 3.0);
        assert!(atlas.positive_index_membership(&c));
        assert_eq!(atlas.component_of(&c), Some(0));
        assert_eq!(atlas.components[0].kind, ComponentKind::BoundedPositive);
        // (0,0,1) has F = −1 < 0
        assert!(!atlas.positive_index_membership(&RayVector::new(0.0, 0.0, 1.0)));
        // deep negative quadrant belongs to the standard hybrid
        let hy = RayVector::affine(-2.0, -2.0);
        assert_eq!(atlas.component_of(&hy), Some(1));
        // boundary points sit at F ≈ 0 (membership is a strict inequality)
        let on_curve = {
            let arc = &atlas.components[0].boundary[0].arc;
            arc.samples[arc.samples.len() / 3]
        };
        assert!(atlas.pair.f.evaluate(&on_curve).abs() < 1e-9);
        let nudged = on_curve.lerp(&RayVector::affine(2.0, 2.0), 1e-3);
        assert!(!atlas.positive_index_membership(&nudged.normalized().unwrap()));
        assert_eq!(atlas.component_of(&RayVector::new(0.0, 0.0, 1.0)), None);
    }

    #[test]
    fn corner_rays_match_notation() {
        let t = tol();
        let a5 = ConeAtlas::new(5.0, &t).unwrap();
        let h = &a5.components[1];
        assert!(h.corners[0].ray_distance(&B1.neg()) < 1e-12);
        assert!(h.corners[1].ray_distance(&B2.neg()) < 1e-12);
        let a05 = ConeAtlas::new(0.5, &t).unwrap();
        let h = &a05.components[0];
        assert!(h.corners[0].ray_distance(&B1) < 1e-12);
        assert!(h.corners[1].ray_distance(&B2) < 1e-12);
        let am2 = ConeAtlas::new(-2.0, &t).unwrap();
        let h = &am2.components[0];
        assert!(h.corners[0].ray_distance(&B1) < 1e-12);
        assert!(h.corners[1].ray_distance(&B2) < 1e-12);
    }

    #[test]
    fn interior_samples_pass_index_test() {
        let t = tol();
        let mut rng = SplitMix64::new(99);
        for &k in &[5.0, -3.0, 0.0, -2.0] {
            let atlas = ConeAtlas::new(k, &t).unwrap();
            for c in &atlas.components {
                if !c.positive_index {
                    continue; // definite-form oval cone for −2 < k < 1
                }
                for _ in 0..100 {
                    let p = atlas.interior_sample(c.id, &mut rng);
                    assert!(
                        atlas.positive_index_membership(&p),
                        "k={k} comp {} sample {:?}",
                        c.id,
                        p.coords
                    );
                }
            }
        }
    }

    #[test]
    fn boundary_samples_lie_on_walls() {
        let t = tol();
        for &k in &[5.0, -3.0] {
            let atlas = ConeAtlas::new(k, &t).unwrap();
            for c in &atlas.components {
                for piece in &c.boundary {
                    let form = atlas.pair.form(piece.arc.curve);
                    let scale = form.max_coeff();
                    for s in &piece.arc.samples {
                        assert!(form.evaluate(s).abs() < 1e-8 * scale, "k={k}");
                    }
                }
            }
        }
    }

    #[test]
    fn antipodal_consistency_of_neg_bounded() {
        let t = tol();
        let atlas = ConeAtlas::new(-3.0, &t).unwrap();
        let neg_id = atlas
            .components
            .iter()
            .position(|c| c.kind == ComponentKind::NegBoundedHessian)
            .unwrap();
        let mut rng = SplitMix64::new(4);
        for _ in 0..200 {
            let p = atlas.interior_sample(neg_id, &mut rng);
            let m = p.neg();
            assert!(atlas.pair.f.evaluate(&m) < 0.0);
            let sig = atlas.pair.f.polar_quadric(&m).signature(&t);
            assert_eq!(sig.as_tuple(), (2, 1, 0));
        }
    }

    #[test]
    fn convexity_of_components() {
        let t = tol();
        let mut rng = SplitMix64::new(21);
        for &k in &[5.0, -3.0, 0.0, -2.0] {
            let atlas = ConeAtlas::new(k, &t).unwrap();
            for c in &atlas.components {
                assert!(
                    atlas.component_convexity(c.id, 300, &mut rng),
                    "k={k} comp {} fails midpoint convexity",
                    c.id
                );
            }
        }
    }

    #[test]
    fn q_subcone_counts() {
        let t = tol();
        // k=5, standard hybrid, A=(−1,3,1): two boundary zeros → one region
        let a5 = ConeAtlas::new(5.0, &t).unwrap();
        let s = a5.q_subcone(1, &RayVector::affine(-1.0, 3.0)).unwrap();
        assert_eq!(s.regions.len(), 1, "two-zero configuration");
        // k=5, A=(−2,1,1): one region as well
        let s = a5.q_subcone(1, &RayVector::affine(-2.0, 1.0)).unwrap();
        assert_eq!(s.regions.len(), 1);
        // witness as E: covers the whole component
        let w = a5.components[1].witness;
        let s = a5.q_subcone(1, &w).unwrap();
        assert_eq!(s.regions.len(), 1);
        let mut rng = SplitMix64::new(77);
        for _ in 0..50 {
            let p = a5.interior_sample(1, &mut rng);
            assert_eq!(a5.q_region_of(&s, &p), Some(0));
        }
        // k=−3, main hybrid: interior point of the special region → 2 regions
        let a3 = ConeAtlas::new(-3.0, &t).unwrap();
        let s = a3.q_subcone(0, &RayVector::affine(0.28, 0.28)).unwrap();
        assert_eq!(s.regions.len(), 2, "four boundary zeros");
        // ... and the degenerate corner point has an empty subcone
        let s = a3.q_subcone(0, &RayVector::affine(0.25, 0.25)).unwrap();
        assert_eq!(s.regions.len(), 0, "corner point");
    }

    #[test]
    fn q_subcone_regions_convex_and_union_fails() {
        let t = tol();
        let a3 = ConeAtlas::new(-3.0, &t).unwrap();
        let e = RayVector::affine(0.28, 0.28);
        let sub = a3.q_subcone(0, &e).unwrap();
        assert_eq!(sub.regions.len(), 2);
        let q = a3.pair.f.polar_quadric(&e);
        let mut rng = SplitMix64::new(31);
        // each region individually passes the midpoint test
        for ridx in 0..2 {
            let w = sub.regions[ridx].witness;
            let ok = convexity_by_midpoints(
                |rng| loop {
                    let p = a3.interior_sample(0, rng);
                    let mix = p.lerp(&w, 0.5 + 0.5 * rng.next_f64());
                    if let Ok(pn) = mix.normalized() {
                        if a3.contains_interior(0, &pn)
                            && q.evaluate(&pn) > 0.0
                            && a3.q_region_of(&sub, &pn) == Some(ridx)
                        {
                            return pn;
                        }
                    }
                },
                |p| a3.contains_interior(0, p) && q.evaluate(p) > 0.0,
                150,
                &mut rng,
            );
            assert!(ok, "region {ridx} not convex");
        }
        // the union of the two disjoint regions fails the midpoint test
        let w0 = sub.regions[0].witness;
        let w1 = sub.regions[1].witness;
        let mid = w0.add(&w1).scale(0.5).normalized().unwrap();
        assert!(!(a3.contains_interior(0, &mid) && q.evaluate(&mid) > 0.0));
    }

    #[test]
    fn atlas_json_shape() {
        let t = tol();
        let atlas = ConeAtlas::new(5.0, &t).unwrap();
        let v = atlas.summary_json();
        assert_eq!(v["components"].as_array().unwrap().len(), 4);
        assert_eq!(v["components"][1]["corner_rays"].as_array().unwrap().len(), 2);
    }
}
