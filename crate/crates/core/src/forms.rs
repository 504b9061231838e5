//! Exact-polarization algebra for ternary cubics.
//!
//! A [`TernaryCubic`] stores the 10 coefficients of a degree-3 homogeneous
//! form in the fixed monomial order
//!
//! ```text
//! x³, x²y, x²z, xy², xyz, xz², y³, y²z, yz², z³
//! ```
//!
//! (this order is also the serialization order).  The symmetric trilinear
//! polarization `T` is normalized so that `T(D,D,D) = F(D)`; consequently the
//! polar conic of `F` at `A` is the quadratic form `D ↦ T(A,D,D)` and the
//! second polar at `U` is the linear form `D ↦ T(U,U,D) = ∇F(U)·D / 3`.

use crate::eigen::sym_eigen3;
use crate::error::Error;
use crate::ray::{LinearForm3, RayVector};
use crate::roots::cubic_roots;
use crate::tolerances::Tolerances;
use serde::{Deserialize, Serialize};

/// Monomial exponent triples in coefficient order.
const MONOMIALS: [(usize, usize, usize); 10] = [
    (0, 0, 0), // x^3
    (0, 0, 1), // x^2 y
    (0, 0, 2), // x^2 z
    (0, 1, 1), // x y^2
    (0, 1, 2), // x y z
    (0, 2, 2), // x z^2
    (1, 1, 1), // y^3
    (1, 1, 2), // y^2 z
    (1, 2, 2), // y z^2
    (2, 2, 2), // z^3
];

/// Degree-3 homogeneous form in three variables.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TernaryCubic {
    pub coeffs: [f64; 10],
}

impl TernaryCubic {
    pub fn from_coeffs(coeffs: [f64; 10]) -> Self {
        TernaryCubic { coeffs }
    }

    /// The family member F_k = −x³ − y³ − (z−x−y)³ + 3k·xy·(z−x−y), fully
    /// expanded.  `k = 1` splits the curve and is guarded by the degenerate
    /// band unless `allow_degenerate` is set.
    pub fn hesse(k: f64, tol: &Tolerances, allow_degenerate: bool) -> Result<Self, Error> {
        if !allow_degenerate {
            tol.check_band(k, 1.0)?;
        }
        Ok(Self::hesse_unchecked(k))
    }

    pub(crate) fn hesse_unchecked(k: f64) -> Self {
        TernaryCubic {
            coeffs: [
                0.0,
                3.0 * (1.0 - k),
                -3.0,
                3.0 * (1.0 - k),
                3.0 * (k - 2.0),
                3.0,
                0.0,
                -3.0,
                3.0,
                -1.0,
            ],
        }
    }

    /// The classical Hesse form −x³ − y³ − z³ + 3k·xyz.
    pub fn pure_hesse(k: f64) -> Self {
        TernaryCubic {
            coeffs: [-1.0, 0.0, 0.0, 0.0, 3.0 * k, 0.0, -1.0, 0.0, 0.0, -1.0],
        }
    }

    /// Value of the form at the (un-normalized) coordinates of `d`.
    pub fn evaluate(&self, d: &RayVector) -> f64 {
        let [x, y, z] = d.coords;
        let c = &self.coeffs;
        x * (x * (c[0] * x + c[1] * y + c[2] * z) + y * (c[3] * y + c[4] * z) + c[5] * z * z)
            + y * (y * (c[6] * y + c[7] * z) + c[8] * z * z)
            + c[9] * z * z * z
    }

    /// Gradient ∇F at `d`.
    pub fn gradient(&self, d: &RayVector) -> RayVector {
        let [x, y, z] = d.coords;
        let c = &self.coeffs;
        RayVector::new(
            3.0 * c[0] * x * x + 2.0 * x * (c[1] * y + c[2] * z) + c[3] * y * y + c[4] * y * z + c[5] * z * z,
            c[1] * x * x + 2.0 * y * (c[3] * x + c[6] * y) + c[4] * x * z + 2.0 * c[7] * y * z + c[8] * z * z,
            c[2] * x * x + c[4] * x * y + 2.0 * z * (c[5] * x + c[8] * y) + c[7] * y * y + 3.0 * c[9] * z * z,
        )
    }

    /// Symmetric trilinear polarization with `T(D,D,D) = F(D)`.
    pub fn trilinear(&self) -> SymTrilinear {
        let mut t = [[[0.0f64; 3]; 3]; 3];
        for (idx, &(i, j, k)) in MONOMIALS.iter().enumerate() {
            let c = self.coeffs[idx];
            if c == 0.0 {
                continue;
            }
            // share = coefficient / (number of distinct index permutations)
            let perms = distinct_permutations(i, j, k);
            let share = c / perms.len() as f64;
            for &(a, b, d) in &perms {
                t[a][b][d] = share;
            }
        }
        SymTrilinear { tensor: t }
    }

    /// Polar conic G_A: the quadratic form D ↦ T(A, D, D).
    pub fn polar_quadric(&self, a: &RayVector) -> QuadraticForm3 {
        self.trilinear().polar(a)
    }

    /// Second polar at `U`: the linear form D ↦ T(U,U,D) = ∇F(U)·D / 3.
    pub fn second_polar(&self, u: &RayVector) -> LinearForm3 {
        let g = self.gradient(u);
        LinearForm3::new([g.coords[0] / 3.0, g.coords[1] / 3.0, g.coords[2] / 3.0])
    }

    /// Hessian form: determinant of the 3×3 matrix of second partials,
    /// expanded as a ternary cubic.
    pub fn hessian_cubic(&self) -> TernaryCubic {
        let t = self.trilinear();
        // second partial ∂²F/∂a∂b is the linear form 6·T[a][b][·]
        let lin = |a: usize, b: usize| -> [f64; 3] {
            [6.0 * t.tensor[a][b][0], 6.0 * t.tensor[a][b][1], 6.0 * t.tensor[a][b][2]]
        };
        let mut acc = [0.0f64; 10];
        // det = Σ_perm sign · S[0][p0]·S[1][p1]·S[2][p2]
        const PERMS: [([usize; 3], f64); 6] = [
            ([0, 1, 2], 1.0),
            ([1, 2, 0], 1.0),
            ([2, 0, 1], 1.0),
            ([0, 2, 1], -1.0),
            ([2, 1, 0], -1.0),
            ([1, 0, 2], -1.0),
        ];
        for (p, sign) in PERMS {
            let triple = cubic_from_linear_product(lin(0, p[0]), lin(1, p[1]), lin(2, p[2]));
            for i in 0..10 {
                acc[i] += sign * triple[i];
            }
        }
        TernaryCubic { coeffs: acc }
    }

    /// Scale all coefficients.
    pub fn scale(&self, s: f64) -> TernaryCubic {
        let mut c = self.coeffs;
        for v in &mut c {
            *v *= s;
        }
        TernaryCubic { coeffs: c }
    }

    pub fn sub(&self, o: &TernaryCubic) -> TernaryCubic {
        let mut c = self.coeffs;
        for (v, w) in c.iter_mut().zip(&o.coeffs) {
            *v -= w;
        }
        TernaryCubic { coeffs: c }
    }

    pub fn max_coeff(&self) -> f64 {
        self.coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs()))
    }
}

fn distinct_permutations(i: usize, j: usize, k: usize) -> Vec<(usize, usize, usize)> {
    let all = [
        (i, j, k),
        (i, k, j),
        (j, i, k),
        (j, k, i),
        (k, i, j),
        (k, j, i),
    ];
    let mut out: Vec<(usize, usize, usize)> = Vec::with_capacity(6);
    for p in all {
        if !out.contains(&p) {
            out.push(p);
        }
    }
    out
}

/// Expand (a·D)(b·D)(c·D) into cubic coefficients in the fixed order.
fn cubic_from_linear_product(a: [f64; 3], b: [f64; 3], c: [f64; 3]) -> [f64; 10] {
    let mut acc = [0.0f64; 10];
    for (ia, &va) in a.iter().enumerate() {
        if va == 0.0 {
            continue;
        }
        for (ib, &vb) in b.iter().enumerate() {
            for (ic, &vc) in c.iter().enumerate() {
                let mut key = [ia, ib, ic];
                key.sort_unstable();
                let idx = MONOMIALS
                    .iter()
                    .position(|&(p, q, r)| (p, q, r) == (key[0], key[1], key[2]))
                    .unwrap();
                acc[idx] += va * vb * vc;
            }
        }
    }
    acc
}

/// Fully symmetric 3×3×3 tensor.
#[derive(Debug, Clone, PartialEq)]
pub struct SymTrilinear {
    pub tensor: [[[f64; 3]; 3]; 3],
}

impl SymTrilinear {
    pub fn apply(&self, u: &RayVector, v: &RayVector, w: &RayVector) -> f64 {
        let mut s = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    s += self.tensor[i][j][k] * u.coords[i] * v.coords[j] * w.coords[k];
                }
            }
        }
        s
    }

    /// Contract the first slot: the symmetric matrix M with Dᵀ M D = T(A,D,D).
    pub fn polar(&self, a: &RayVector) -> QuadraticForm3 {
        let mut m = [[0.0f64; 3]; 3];
        for j in 0..3 {
            for k in 0..3 {
                let mut s = 0.0;
                for i in 0..3 {
                    s += self.tensor[i][j][k] * a.coords[i];
                }
                m[j][k] = s;
            }
        }
        QuadraticForm3 { matrix: m }
    }

    /// Linear form D ↦ T(U,V,D).
    pub fn contract2(&self, u: &RayVector, v: &RayVector) -> LinearForm3 {
        let mut c = [0.0f64; 3];
        for k in 0..3 {
            let mut s = 0.0;
            for i in 0..3 {
                for j in 0..3 {
                    s += self.tensor[i][j][k] * u.coords[i] * v.coords[j];
                }
            }
            c[k] = s;
        }
        LinearForm3::new(c)
    }
}

/// Signature of a real symmetric 3×3 form: counts of positive, negative and
/// (numerically) zero eigenvalues.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Signature {
    pub positive: usize,
    pub negative: usize,
    pub zero: usize,
}

impl Signature {
    pub fn as_tuple(&self) -> (usize, usize, usize) {
        (self.positive, self.negative, self.zero)
    }
}

/// Symmetric 3×3 quadratic form.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticForm3 {
    pub matrix: [[f64; 3]; 3],
}

impl QuadraticForm3 {
    pub fn evaluate(&self, d: &RayVector) -> f64 {
        let mut s = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                s += self.matrix[i][j] * d.coords[i] * d.coords[j];
            }
        }
        s
    }

    /// Matrix-vector product seen as a map R³ → (R³)*.
    pub fn apply(&self, d: &RayVector) -> LinearForm3 {
        let mut c = [0.0; 3];
        for i in 0..3 {
            c[i] = self.matrix[i][0] * d.coords[0]
                + self.matrix[i][1] * d.coords[1]
                + self.matrix[i][2] * d.coords[2];
        }
        LinearForm3::new(c)
    }

    pub fn neg(&self) -> QuadraticForm3 {
        let mut m = self.matrix;
        for row in &mut m {
            for v in row {
                *v = -*v;
            }
        }
        QuadraticForm3 { matrix: m }
    }

    /// Eigenvalue signature; zeros decided relative to the spectral radius.
    pub fn signature(&self, tol: &Tolerances) -> Signature {
        let (vals, _) = sym_eigen3(&self.matrix);
        let radius = vals.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let thresh = tol.kernel_rank_rel * radius;
        let mut sig = Signature { positive: 0, negative: 0, zero: 0 };
        for v in vals {
            if v.abs() <= thresh || radius == 0.0 {
                sig.zero += 1;
            } else if v > 0.0 {
                sig.positive += 1;
            } else {
                sig.negative += 1;
            }
        }
        sig
    }

    /// Generator of the kernel of a rank-2 form, normalized, oriented so the
    /// largest-magnitude coordinate is positive.
    pub fn singular_ray(&self, tol: &Tolerances) -> Result<RayVector, Error> {
        let sig = self.signature(tol);
        if sig.zero != 1 {
            return Err(Error::RankError(3 - sig.zero));
        }
        let (vals, vecs) = sym_eigen3(&self.matrix);
        // eigenvalue of smallest magnitude is the numerical zero
        let mut idx = 0;
        for i in 1..3 {
            if vals[i].abs() < vals[idx].abs() {
                idx = i;
            }
        }
        let v = RayVector::new(vecs[0][idx], vecs[1][idx], vecs[2][idx]);
        Ok(v.canonical_orientation().normalized()?)
    }

    /// Unit eigenvector for the single positive eigenvalue of an index-(1,2)
    /// form.  Errors when the signature is not (1,2,0).
    pub fn positive_axis(&self, tol: &Tolerances) -> Result<RayVector, Error> {
        let sig = self.signature(tol);
        if sig.as_tuple() != (1, 2, 0) {
            return Err(Error::DomainError(format!(
                "positive_axis needs signature (1,2,0), got {:?}",
                sig.as_tuple()
            )));
        }
        let (_, vecs) = sym_eigen3(&self.matrix);
        // ascending order: the positive eigenvalue is the last column
        Ok(RayVector::new(vecs[0][2], vecs[1][2], vecs[2][2]))
    }

    /// Serialization order: upper triangle row-major
    /// [m00, m01, m02, m11, m12, m22].
    pub fn upper_triangle(&self) -> [f64; 6] {
        let m = &self.matrix;
        [m[0][0], m[0][1], m[0][2], m[1][1], m[1][2], m[2][2]]
    }
}

impl Serialize for QuadraticForm3 {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.upper_triangle().serialize(s)
    }
}

impl<'de> Deserialize<'de> for QuadraticForm3 {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let u = <[f64; 6]>::deserialize(d)?;
        Ok(QuadraticForm3 {
            matrix: [[u[0], u[1], u[2]], [u[1], u[3], u[4]], [u[2], u[4], u[5]]],
        })
    }
}

/// Hessian family parameter k' = (4 − k³) / (3k²); k = 0 is excluded (its
/// Hessian is a line triple, not a family member).
pub fn hessian_parameter(k: f64, tol: &Tolerances) -> Result<f64, Error> {
    tol.check_band(k, 0.0)?;
    Ok((4.0 - k * k * k) / (3.0 * k * k))
}

/// The three parameters k whose Hessian is a multiple of F_{k'}: real roots
/// of k³ + 3·k'·k² − 4 = 0, ascending.  For k' > 1 one lies in (−∞,−2), one
/// in (−2,0) and one in (0,1).  The boundary k' = 1 (roots {−2,−2,1}) is
/// allowed with `allow_boundary`.
pub fn siblings(k_prime: f64, allow_boundary: bool) -> Result<[f64; 3], Error> {
    if k_prime < 1.0 || (!allow_boundary && k_prime == 1.0) {
        return Err(Error::DomainError(format!(
            "siblings requires k' > 1, got {k_prime}"
        )));
    }
    let roots = cubic_roots(1.0, 3.0 * k_prime, 0.0, -4.0);
    let mut flat: Vec<f64> = Vec::with_capacity(3);
    for (r, m) in roots {
        for _ in 0..m {
            flat.push(r);
        }
    }
    if flat.len() != 3 {
        return Err(Error::DomainError(format!(
            "expected three real sibling parameters at k' = {k_prime}"
        )));
    }
    flat.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok([flat[0], flat[1], flat[2]])
}

// Closed-form family geometry shared across modules.

/// τ(k) = −1/(k−1): the asymptotes through B₁ and B₂ are x = τ and y = τ.
pub fn tau(k: f64) -> f64 {
    -1.0 / (k - 1.0)
}

/// e(k) = k/(k−1): the asymptote through B₃ is x + y = e.
pub fn e_level(k: f64) -> f64 {
    k / (k - 1.0)
}

/// r(k) = k/(2(k−1)): the contact point of the B₃-asymptote with the
/// Hessian is R = (r, r, 1).
pub fn contact_r(k: f64) -> f64 {
    k / (2.0 * (k - 1.0))
}

/// σ(k) = k'/(k'−1) = (k³−4)/((k−1)(k+2)²): threshold governing the sign of
/// G_A at R for k > 1 (G_A(R) > 0 ⟺ a+b < σ).
pub fn sigma(k: f64) -> f64 {
    (k * k * k - 4.0) / ((k - 1.0) * (k + 2.0) * (k + 2.0))
}

/// Contact point of the asymptote through B₁ with the Hessian: Q₁ = (τ, r, 1).
pub fn q1_point(k: f64) -> RayVector {
    RayVector::affine(tau(k), contact_r(k))
}

/// Contact point of the asymptote through B₂ with the Hessian: Q₂ = (r, τ, 1).
pub fn q2_point(k: f64) -> RayVector {
    RayVector::affine(contact_r(k), tau(k))
}

/// Contact point of the asymptote through B₃: R = Q₃ = (r, r, 1).
pub fn r_point(k: f64) -> RayVector {
    let r = contact_r(k);
    RayVector::affine(r, r)
}
