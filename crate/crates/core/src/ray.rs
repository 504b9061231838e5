//! Oriented rays of R³ and linear forms on it.

use crate::error::Error;
use serde::{Deserialize, Serialize};

/// An oriented non-zero vector of R³.
///
/// A `RayVector` is a ray, not a projective point: orientation is
/// significant everywhere in this crate (a class and its negative lie in
/// different cones) and normalization only ever rescales by a positive
/// factor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RayVector {
    pub coords: [f64; 3],
}

impl RayVector {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        RayVector { coords: [x, y, z] }
    }

    pub fn from_coords(c: [f64; 3]) -> Self {
        RayVector { coords: c }
    }

    /// Affine representative (x, y, 1) of a plane point.
    pub fn affine(x: f64, y: f64) -> Self {
        RayVector { coords: [x, y, 1.0] }
    }

    pub fn x(&self) -> f64 {
        self.coords[0]
    }
    pub fn y(&self) -> f64 {
        self.coords[1]
    }
    pub fn z(&self) -> f64 {
        self.coords[2]
    }

    pub fn sup_norm(&self) -> f64 {
        self.coords.iter().fold(0.0f64, |m, c| m.max(c.abs()))
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn is_zero(&self) -> bool {
        self.sup_norm() == 0.0
    }

    /// Rescale by a positive factor so the sup-norm is 1.  Orientation is
    /// preserved.  Errors on the zero vector.
    pub fn normalized(&self) -> Result<RayVector, Error> {
        let m = self.sup_norm();
        if m == 0.0 || !m.is_finite() {
            return Err(Error::InvalidInput("zero or non-finite ray".into()));
        }
        Ok(self.scale(1.0 / m))
    }

    /// Flip so the largest-magnitude coordinate is positive (ties broken by
    /// the lowest index).  Used where an orientation must be *chosen*, e.g.
    /// for conic kernels.
    pub fn canonical_orientation(&self) -> RayVector {
        let mut idx = 0;
        for i in 1..3 {
            if self.coords[i].abs() > self.coords[idx].abs() {
                idx = i;
            }
        }
        if self.coords[idx] < 0.0 {
            self.scale(-1.0)
        } else {
            *self
        }
    }

    pub fn scale(&self, s: f64) -> RayVector {
        RayVector {
            coords: [self.coords[0] * s, self.coords[1] * s, self.coords[2] * s],
        }
    }

    pub fn add(&self, o: &RayVector) -> RayVector {
        RayVector {
            coords: [
                self.coords[0] + o.coords[0],
                self.coords[1] + o.coords[1],
                self.coords[2] + o.coords[2],
            ],
        }
    }

    pub fn sub(&self, o: &RayVector) -> RayVector {
        self.add(&o.scale(-1.0))
    }

    pub fn neg(&self) -> RayVector {
        self.scale(-1.0)
    }

    pub fn dot(&self, o: &RayVector) -> f64 {
        self.coords[0] * o.coords[0] + self.coords[1] * o.coords[1] + self.coords[2] * o.coords[2]
    }

    pub fn cross(&self, o: &RayVector) -> RayVector {
        let a = self.coords;
        let b = o.coords;
        RayVector {
            coords: [
                a[1] * b[2] - a[2] * b[1],
                a[2] * b[0] - a[0] * b[2],
                a[0] * b[1] - a[1] * b[0],
            ],
        }
    }

    /// Segment interpolation (1−t)·self + t·other.
    pub fn lerp(&self, o: &RayVector, t: f64) -> RayVector {
        self.scale(1.0 - t).add(&o.scale(t))
    }

    /// Chordal distance between the underlying rays after normalizing to the
    /// unit sphere (orientation-sensitive).
    pub fn ray_distance(&self, o: &RayVector) -> f64 {
        let a = self.scale(1.0 / self.norm());
        let b = o.scale(1.0 / o.norm());
        a.sub(&b).norm()
    }

    /// Distance between the projective points (minimum over orientations).
    pub fn projective_distance(&self, o: &RayVector) -> f64 {
        self.ray_distance(o).min(self.ray_distance(&o.neg()))
    }

    /// Affine coordinates (x/z, y/z) when z is not (relatively) tiny.
    pub fn to_affine(&self) -> Option<(f64, f64)> {
        let m = self.sup_norm();
        if self.coords[2].abs() <= 1e-12 * m {
            None
        } else {
            Some((self.coords[0] / self.coords[2], self.coords[1] / self.coords[2]))
        }
    }
}

/// A covector: homogeneous linear form on R³.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LinearForm3 {
    pub covector: [f64; 3],
}

impl LinearForm3 {
    pub fn new(c: [f64; 3]) -> Self {
        LinearForm3 { covector: c }
    }

    pub fn apply(&self, d: &RayVector) -> f64 {
        self.covector[0] * d.coords[0] + self.covector[1] * d.coords[1] + self.covector[2] * d.coords[2]
    }

    pub fn sup_norm(&self) -> f64 {
        self.covector.iter().fold(0.0f64, |m, c| m.max(c.abs()))
    }

    pub fn scale(&self, s: f64) -> LinearForm3 {
        LinearForm3 {
            covector: [self.covector[0] * s, self.covector[1] * s, self.covector[2] * s],
        }
    }

    /// Sine of the angle between two forms seen as (co)vectors, insensitive
    /// to scale and sign.  Zero iff proportional.
    pub fn angle_defect(&self, o: &LinearForm3) -> f64 {
        let a = RayVector::from_coords(self.covector);
        let b = RayVector::from_coords(o.covector);
        let cross = a.cross(&b).norm();
        let denom = a.norm() * b.norm();
        if denom == 0.0 {
            0.0
        } else {
            cross / denom
        }
    }
}

pub const B1: RayVector = RayVector { coords: [0.0, 1.0, 0.0] };
pub const B2: RayVector = RayVector { coords: [1.0, 0.0, 0.0] };
pub const B3: RayVector = RayVector { coords: [1.0, -1.0, 0.0] };

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalize_preserves_orientation_and_sup_norm_in_band() {
        let v = RayVector::new(-3.0, 1.0, 2.0).normalized().unwrap();
        assert!((v.sup_norm() - 1.0).abs() < 1e-15);
        assert!(v.x() < 0.0, "orientation must be preserved");
        let m = v.sup_norm();
        assert!((0.5..=1.0).contains(&m));
    }

    #[test]
    fn canonical_orientation_flips_sign() {
        let v = RayVector::new(1.0, -5.0, 2.0).canonical_orientation();
        assert!(v.y() > 0.0);
        let w = RayVector::new(1.0, -1.0, 0.0).canonical_orientation();
        // tie on magnitude: lowest index wins
        assert!(w.x() > 0.0);
    }

    #[test]
    fn zero_ray_rejected() {
        assert!(RayVector::new(0.0, 0.0, 0.0).normalized().is_err());
    }

    #[test]
    fn serde_as_bare_array() {
        let v = RayVector::new(1.0, 2.0, 3.0);
        assert_eq!(serde_json::to_string(&v).unwrap(), "[1.0,2.0,3.0]");
        let l = LinearForm3::new([0.5, 0.0, -1.0]);
        assert_eq!(serde_json::to_string(&l).unwrap(), "[0.5,0.0,-1.0]");
    }
}
