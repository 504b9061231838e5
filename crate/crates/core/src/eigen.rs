//! Cyclic Jacobi eigendecomposition for symmetric 3×3 matrices.
//!
//! Small enough to hand-roll; deterministic across runs, which matters for
//! the reproducible verification suites.

/// Eigenvalues (ascending) and matching unit eigenvectors (columns of the
/// returned matrix) of a symmetric 3×3 matrix.
pub fn sym_eigen3(m: &[[f64; 3]; 3]) -> ([f64; 3], [[f64; 3]; 3]) {
    let mut a = *m;
    // v starts as identity; columns accumulate the rotations
    let mut v = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];

    for _sweep in 0..50 {
        let off = a[0][1].abs() + a[0][2].abs() + a[1][2].abs();
        let diag = a[0][0].abs() + a[1][1].abs() + a[2][2].abs();
        if off <= 1e-15 * diag.max(1e-300) {
            break;
        }
        for &(p, q) in &[(0usize, 1usize), (0, 2), (1, 2)] {
            if a[p][q].abs() <= 1e-300 {
                continue;
            }
            let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
            let t = if theta >= 0.0 {
                1.0 / (theta + (1.0 + theta * theta).sqrt())
            } else {
                -1.0 / (-theta + (1.0 + theta * theta).sqrt())
            };
            let c = 1.0 / (1.0 + t * t).sqrt();
            let s = t * c;

            let app = a[p][p] - t * a[p][q];
            let aqq = a[q][q] + t * a[p][q];
            let r = 3 - p - q; // the remaining index
            let arp = c * a[r][p] - s * a[r][q];
            let arq = s * a[r][p] + c * a[r][q];
            a[p][p] = app;
            a[q][q] = aqq;
            a[p][q] = 0.0;
            a[q][p] = 0.0;
            a[r][p] = arp;
            a[p][r] = arp;
            a[r][q] = arq;
            a[q][r] = arq;

            for row in &mut v {
                let vp = c * row[p] - s * row[q];
                let vq = s * row[p] + c * row[q];
                row[p] = vp;
                row[q] = vq;
            }
        }
    }

    let mut idx = [0usize, 1, 2];
    idx.sort_by(|&i, &j| a[i][i].partial_cmp(&a[j][j]).unwrap());
    let vals = [a[idx[0]][idx[0]], a[idx[1]][idx[1]], a[idx[2]][idx[2]]];
    let mut vecs = [[0.0; 3]; 3];
    for (new_col, &old_col) in idx.iter().enumerate() {
        for row in 0..3 {
            vecs[row][new_col] = v[row][old_col];
        }
    }
    (vals, vecs)
}
