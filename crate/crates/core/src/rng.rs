//! Seeded generator for the reproducible verification suites.
//!
//! The update rule is SplitMix64, fixed bit-exactly so independent
//! implementations can replay a suite from its seed:
//!
//! ```text
//! state ← state + 0x9E3779B97F4A7C15            (mod 2^64)
//! z ← state
//! z ← (z XOR (z >> 30)) · 0xBF58476D1CE4E5B9    (mod 2^64)
//! z ← (z XOR (z >> 27)) · 0x94D049BB133111EB    (mod 2^64)
//! output = z XOR (z >> 31)
//! ```
//!
//! `next_f64` takes the top 53 bits of the output: `(output >> 11) · 2^-53`,
//! uniform in [0, 1).

#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform in [0, 1).
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / 9007199254740992.0)
    }

    /// Uniform in [lo, hi).
    pub fn in_range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }

    /// Random direction with sup-norm 1 (uniform over the cube surface by
    /// rejection from the cube).
    pub fn unit_sup_ray(&mut self) -> [f64; 3] {
        loop {
            let v = [
                self.in_range(-1.0, 1.0),
                self.in_range(-1.0, 1.0),
                self.in_range(-1.0, 1.0),
            ];
            let m = v[0].abs().max(v[1].abs()).max(v[2].abs());
            if m > 1e-3 {
                return [v[0] / m, v[1] / m, v[2] / m];
            }
        }
    }
}
