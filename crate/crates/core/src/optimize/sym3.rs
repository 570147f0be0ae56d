//! Eigen-decomposition of real symmetric 3×3 matrices.
//!
//! Well-separated spectra use the trigonometric closed form with eigenvectors
//! from cross products of rows of `A − λI`. Near-degenerate spectra, or any
//! closed-form result that fails its residual check, go through cyclic Jacobi
//! sweeps instead.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Mat3 = [[f64; 3]; 3];

pub const SYMMETRY_TOL: f64 = 1e-9;

/// Eigenpairs in descending eigenvalue order; `vectors[k]` belongs to `values[k]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sym3Eigen {
    pub values: [f64; 3],
    pub vectors: [[f64; 3]; 3],
}

impl Sym3Eigen {
    /// Number of eigenvalues within [`degeneracy_tol`] of the largest.
    pub fn top_multiplicity(&self) -> usize {
        let top = self.values[0];
        let tol = degeneracy_tol(top);
        self.values.iter().filter(|&&v| v >= top - tol).count()
    }
}

/// `1e-9` relative to `top`, or absolute when `top < 1e-9`.
pub fn degeneracy_tol(top: f64) -> f64 {
    if top.abs() < 1e-9 {
        1e-9
    } else {
        1e-9 * top.abs()
    }
}

pub fn sym3_eigen(m: &Mat3) -> Result<Sym3Eigen> {
    let mut asym: f64 = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            asym = asym.max((m[i][j] - m[j][i]).abs());
        }
    }
    if asym.is_nan() || asym > SYMMETRY_TOL {
        return Err(Error::NotSymmetric(asym));
    }
    let mut a = *m;
    for i in 0..3 {
        for j in i + 1..3 {
            let v = 0.5 * (m[i][j] + m[j][i]);
            a[i][j] = v;
            a[j][i] = v;
        }
    }

    let (mut values, mut vectors) = match closed_form(&a) {
        Some(r) => r,
        None => jacobi(&a),
    };

    // descending
    let mut order = [0usize, 1, 2];
    order.sort_by(|&i, &j| values[j].total_cmp(&values[i]));
    let sorted_vals = order.map(|k| values[k]);
    let sorted_vecs = order.map(|k| vectors[k]);
    values = sorted_vals;
    vectors = sorted_vecs;
    for v in vectors.iter_mut() {
        fix_sign(v);
    }
    Ok(Sym3Eigen { values, vectors })
}

/// Makes the first component with magnitude above 1e-12 positive.
pub fn fix_sign(v: &mut [f64; 3]) {
    if let Some(c) = v.iter().copied().find(|c| c.abs() > 1e-12) {
        if c < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
    }
}

fn dot(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn cross(a: &[f64; 3], b: &[f64; 3]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn mat_vec(a: &Mat3, v: &[f64; 3]) -> [f64; 3] {
    [dot(&a[0], v), dot(&a[1], v), dot(&a[2], v)]
}

fn closed_form(a: &Mat3) -> Option<([f64; 3], [[f64; 3]; 3])> {
    let p1 = a[0][1] * a[0][1] + a[0][2] * a[0][2] + a[1][2] * a[1][2];
    let scale = a.iter().flatten().fold(0.0f64, |m, x| m.max(x.abs()));
    if scale == 0.0 {
        return Some(([0.0; 3], [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]));
    }
    if p1 == 0.0 {
        return Some(([a[0][0], a[1][1], a[2][2]], [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]));
    }
    let q = (a[0][0] + a[1][1] + a[2][2]) / 3.0;
    let p2 = (a[0][0] - q).powi(2) + (a[1][1] - q).powi(2) + (a[2][2] - q).powi(2) + 2.0 * p1;
    let p = (p2 / 6.0).sqrt();
    let mut b = *a;
    for (i, row) in b.iter_mut().enumerate() {
        for (j, x) in row.iter_mut().enumerate() {
            *x = (a[i][j] - if i == j { q } else { 0.0 }) / p;
        }
    }
    let det = b[0][0] * (b[1][1] * b[2][2] - b[1][2] * b[2][1])
        - b[0][1] * (b[1][0] * b[2][2] - b[1][2] * b[2][0])
        + b[0][2] * (b[1][0] * b[2][1] - b[1][1] * b[2][0]);
    let r = (det / 2.0).clamp(-1.0, 1.0);
    let phi = r.acos() / 3.0;
    let e1 = q + 2.0 * p * phi.cos();
    let e3 = q + 2.0 * p * (phi + 2.0 * std::f64::consts::PI / 3.0).cos();
    let e2 = 3.0 * q - e1 - e3;
    let values = [e1, e2, e3];

    let gap = (e1 - e2).min(e2 - e3);
    if gap <= 1e-6 * scale {
        return None;
    }

    let mut vectors = [[0.0; 3]; 3];
    for (k, &lambda) in values.iter().enumerate() {
        let mut s = *a;
        for (i, row) in s.iter_mut().enumerate() {
            row[i] -= lambda;
        }
        let cands = [cross(&s[0], &s[1]), cross(&s[0], &s[2]), cross(&s[1], &s[2])];
        let best = cands.iter().max_by(|x, y| dot(x, x).total_cmp(&dot(y, y)))?;
        let n = dot(best, best).sqrt();
        if n == 0.0 {
            return None;
        }
        vectors[k] = best.map(|x| x / n);
    }

    // residual and orthogonality gate
    for k in 0..3 {
        let av = mat_vec(a, &vectors[k]);
        let res: f64 = (0..3).map(|i| (av[i] - values[k] * vectors[k][i]).powi(2)).sum::<f64>().sqrt();
        if res > 1e-12 * scale {
            return None;
        }
        for l in k + 1..3 {
            if dot(&vectors[k], &vectors[l]).abs() > 1e-12 {
                return None;
            }
        }
    }
    Some((values, vectors))
}

/// Cyclic Jacobi rotations until off-diagonal mass is negligible.
fn jacobi(a: &Mat3) -> ([f64; 3], [[f64; 3]; 3]) {
    let mut m = *a;
    // columns of v are eigenvectors
    let mut v = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
    let norm: f64 = m.iter().flatten().map(|x| x * x).sum::<f64>().sqrt();
    for _sweep in 0..64 {
        let off = (m[0][1].powi(2) + m[0][2].powi(2) + m[1][2].powi(2)).sqrt();
        if off <= 1e-17 * norm {
            break;
        }
        for (p, q) in [(0usize, 1usize), (0, 2), (1, 2)] {
            if m[p][q] == 0.0 {
                continue;
            }
            let theta = (m[q][q] - m[p][p]) / (2.0 * m[p][q]);
            let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
            let t = if theta == 0.0 { 1.0 } else { t };
            let c = (t * t + 1.0).sqrt().recip();
            let s = t * c;
            for k in 0..3 {
                let mkp = m[k][p];
                let mkq = m[k][q];
                m[k][p] = c * mkp - s * mkq;
                m[k][q] = s * mkp + c * mkq;
            }
            for k in 0..3 {
                let mpk = m[p][k];
                let mqk = m[q][k];
                m[p][k] = c * mpk - s * mqk;
                m[q][k] = s * mpk + c * mqk;
            }
            for row in v.iter_mut() {
                let vp = row[p];
                let vq = row[q];
                row[p] = c * vp - s * vq;
                row[q] = s * vp + c * vq;
            }
        }
    }
    let values = [m[0][0], m[1][1], m[2][2]];
    let vectors = [0, 1, 2].map(|k| [v[0][k], v[1][k], v[2][k]]);
    (values, vectors)
}
