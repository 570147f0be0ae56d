//! Brute-force verifiers for the fast paths.
//!
//! Nothing here shares code with the eigen-solvers or the strided Pauli
//! kernels it checks: grid searches scan the sphere, and dense recomputation
//! builds explicit `2^N × 2^N` Kronecker-product operators.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::entanglement::require_maximal;
use crate::entanglement::{total_entanglement, MAX_ENT_TOL};
use crate::error::{Error, Result};
use crate::measurement::{project, Outcome};
use crate::optimize::{spin_correlation_matrix, Mat3};
use crate::statevec::{Axis, PauliFactor, QubitId, StateVector};

pub const MAX_DENSE_QUBITS: usize = 10;

/// θ–φ lattice on the unit sphere plus both poles.
#[derive(Clone, Debug)]
pub struct SphereGrid {
    pub resolution_deg: f64,
    /// `(θ, φ)` in radians, in lexicographic order.
    pub angles: Vec<(f64, f64)>,
    pub points: Vec<Axis>,
}

impl SphereGrid {
    pub fn new(resolution_deg: f64) -> Self {
        let res = resolution_deg.clamp(1e-3, 90.0);
        let n_theta = (180.0 / res).round().max(2.0) as usize;
        let n_phi = (360.0 / res).round().max(4.0) as usize;
        let d_theta = std::f64::consts::PI / n_theta as f64;
        let d_phi = 2.0 * std::f64::consts::PI / n_phi as f64;
        let mut angles = vec![(0.0, 0.0)];
        for i in 1..n_theta {
            for j in 0..n_phi {
                angles.push((i as f64 * d_theta, j as f64 * d_phi));
            }
        }
        angles.push((std::f64::consts::PI, 0.0));
        let points = angles
            .iter()
            .map(|&(t, p)| Axis::normalized(t.sin() * p.cos(), t.sin() * p.sin(), t.cos()).expect("unit"))
            .collect();
        SphereGrid { resolution_deg: res, angles, points }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Maximum of `value` over the grid; ties go to the lowest `(θ, φ)`.
fn grid_argmax(grid: &SphereGrid, value: impl Fn(&Axis) -> Result<f64> + Sync) -> Result<(usize, f64)> {
    grid.points.par_iter().enumerate().map(|(i, p)| value(p).map(|v| (i, v))).try_reduce(
        || (usize::MAX, f64::NEG_INFINITY),
        |a, b| Ok(if b.1 > a.1 || (b.1 == a.1 && b.0 < a.0) { b } else { a }),
    )
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridPair {
    pub v_mu: Axis,
    pub v_nu: Axis,
    pub value: f64,
}

/// Best `(v^μ)ᵀ C v^ν` with `v^ν` scanned over the grid. For each grid `v^ν`
/// the inner maximum over `v^μ` is `|C v^ν|` (Cauchy–Schwarz), attained at
/// `C v^ν / |C v^ν|`.
pub fn grid_search_pair(s: &StateVector, mu: QubitId, nu: QubitId, res_deg: f64) -> Result<GridPair> {
    let corr = spin_correlation_matrix(s, mu, nu)?;
    let grid = SphereGrid::new(res_deg);
    let (best, value) = grid_argmax(&grid, |v| {
        let w = corr.apply(v);
        Ok((w[0] * w[0] + w[1] * w[1] + w[2] * w[2]).sqrt())
    })?;
    let v_nu = grid.points[best];
    let w = corr.apply(&v_nu);
    let v_mu = Axis::normalized(w[0], w[1], w[2]).unwrap_or(Axis::X);
    Ok(GridPair { v_mu, v_nu, value })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridBreaking {
    pub axis: Axis,
    /// Largest drop in target entanglement after a `+1` measurement.
    pub value: f64,
}

/// Measures `ν` along every grid axis and records how much entanglement the
/// targets lose.
pub fn grid_search_breaking(
    s: &StateVector,
    nu: QubitId,
    targets: Option<&[QubitId]>,
    res_deg: f64,
) -> Result<GridBreaking> {
    require_maximal(s, MAX_ENT_TOL)?;
    s.check_qubit(nu)?;
    let targets: Vec<QubitId> = match targets {
        Some(t) => {
            if t.contains(&nu) {
                return Err(Error::NuInTargets(nu.0));
            }
            t.to_vec()
        }
        None => (0..s.n_qubits()).map(QubitId).filter(|&q| q != nu).collect(),
    };
    let before: Vec<f64> =
        targets.iter().map(|&q| crate::entanglement::ed_single(s, q)).collect::<Result<_>>()?;
    let grid = SphereGrid::new(res_deg);
    let (best, value) = grid_argmax(&grid, |m| {
        let (post, _) = project(s, nu, *m, Outcome::Plus)?;
        let mut loss = 0.0;
        for (q, e0) in targets.iter().zip(&before) {
            loss += e0 - crate::entanglement::ed_single(&post, *q)?;
        }
        Ok(loss)
    })?;
    Ok(GridBreaking { axis: grid.points[best], value })
}

/// Quantities recomputable from dense matrices.
#[derive(Clone, Debug, PartialEq)]
pub enum Quantity {
    Expectation(PauliFactor),
    Correlator(Vec<PauliFactor>),
    EmElement { mu: QubitId, nu: QubitId, v_mu: Axis, v_nu: Axis },
    SpinCorrelation { mu: QubitId, nu: QubitId },
    Mieb { nu: QubitId, targets: Option<Vec<QubitId>> },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum DenseValue {
    Scalar(f64),
    Matrix(Mat3),
}

impl DenseValue {
    pub fn scalar(self) -> Option<f64> {
        match self {
            DenseValue::Scalar(v) => Some(v),
            DenseValue::Matrix(_) => None,
        }
    }

    pub fn matrix(self) -> Option<Mat3> {
        match self {
            DenseValue::Matrix(m) => Some(m),
            DenseValue::Scalar(_) => None,
        }
    }
}

fn pauli_2x2(v: &Axis) -> DMatrix<Complex64> {
    let c = |re: f64, im: f64| Complex64::new(re, im);
    DMatrix::from_row_slice(2, 2, &[c(v.z(), 0.0), c(v.x(), -v.y()), c(v.x(), v.y()), c(-v.z(), 0.0)])
}

/// `⊗_q O_q` with `O_q = σ_v` for listed qubits and `I` elsewhere, qubit 0 leftmost.
fn dense_operator(n: usize, factors: &[PauliFactor]) -> DMatrix<Complex64> {
    let mut op = DMatrix::<Complex64>::identity(1, 1);
    for q in 0..n {
        let local = factors
            .iter()
            .find(|f| f.qubit.0 == q)
            .map(|f| pauli_2x2(&f.axis))
            .unwrap_or_else(|| DMatrix::identity(2, 2));
        op = op.kronecker(&local);
    }
    op
}

struct Dense {
    n: usize,
    psi: DVector<Complex64>,
}

impl Dense {
    fn expect(&self, factors: &[PauliFactor]) -> Result<f64> {
        let op = dense_operator(self.n, factors);
        let z = self.psi.dotc(&(op * &self.psi));
        if z.im.abs() > crate::statevec::IMAG_TOL {
            return Err(Error::ImaginaryResidue(z.im));
        }
        Ok(z.re)
    }
}

/// Recomputes `q` with explicit Kronecker-product operators and full inner
/// products. Limited to [`MAX_DENSE_QUBITS`].
pub fn dense_recompute(s: &StateVector, q: &Quantity) -> Result<DenseValue> {
    let n = s.n_qubits();
    if n > MAX_DENSE_QUBITS {
        return Err(Error::TooLarge { n_qubits: n, max: MAX_DENSE_QUBITS });
    }
    let d = Dense { n, psi: DVector::from_column_slice(s.amplitudes()) };
    let basis = |q: QubitId, i: usize| PauliFactor::new(q, Axis::basis(i));
    match q {
        Quantity::Expectation(f) => {
            s.check_qubit(f.qubit)?;
            Ok(DenseValue::Scalar(d.expect(&[*f])?))
        }
        Quantity::Correlator(fs) => {
            if fs.is_empty() {
                return Err(Error::EmptyFactors);
            }
            s.check_distinct(fs.iter().map(|f| f.qubit))?;
            Ok(DenseValue::Scalar(d.expect(fs)?))
        }
        Quantity::EmElement { mu, nu, v_mu, v_nu } => {
            s.check_qubit(*mu)?;
            s.check_qubit(*nu)?;
            let a = PauliFactor::new(*mu, *v_mu);
            let b = PauliFactor::new(*nu, *v_nu);
            let joint = if mu == nu {
                // symmetrized product of two observables on the same qubit
                let pa = dense_operator(n, &[a]);
                let pb = dense_operator(n, &[b]);
                let sym = (&pa * &pb + &pb * &pa) * Complex64::new(0.5, 0.0);
                d.psi.dotc(&(sym * &d.psi)).re
            } else {
                d.expect(&[a, b])?
            };
            Ok(DenseValue::Scalar(joint - d.expect(&[a])? * d.expect(&[b])?))
        }
        Quantity::SpinCorrelation { mu, nu } => {
            s.check_qubit(*mu)?;
            s.check_qubit(*nu)?;
            if mu == nu {
                return Err(Error::SameQubit(mu.0));
            }
            let mut c = [[0.0; 3]; 3];
            for (i, row) in c.iter_mut().enumerate() {
                for (j, x) in row.iter_mut().enumerate() {
                    *x = d.expect(&[basis(*mu, i), basis(*nu, j)])?;
                }
            }
            Ok(DenseValue::Matrix(c))
        }
        Quantity::Mieb { nu, targets } => {
            s.check_qubit(*nu)?;
            let targets: Vec<QubitId> = match targets {
                Some(t) => {
                    if t.contains(nu) {
                        return Err(Error::NuInTargets(nu.0));
                    }
                    s.check_distinct(t.iter().copied())?;
                    t.clone()
                }
                None => (0..n).map(QubitId).filter(|q| q != nu).collect(),
            };
            // Σ = Σ_{μ,i} σ_i^μ|s⟩⟨s|σ_i^μ as an explicit matrix
            let dim = 1usize << n;
            let mut sigma = DMatrix::<Complex64>::zeros(dim, dim);
            for &mu in &targets {
                for i in 0..3 {
                    let v = dense_operator(n, &[basis(mu, i)]) * &d.psi;
                    sigma += &v * v.adjoint();
                }
            }
            let mut b = [[0.0; 3]; 3];
            for (j, row) in b.iter_mut().enumerate() {
                let left = dense_operator(n, &[basis(*nu, j)]) * &d.psi;
                for (k, x) in row.iter_mut().enumerate() {
                    let right = dense_operator(n, &[basis(*nu, k)]) * &d.psi;
                    let z = left.dotc(&(&sigma * right));
                    if z.im.abs() > 1e-10 {
                        return Err(Error::ImaginaryResidue(z.im));
                    }
                    *x = z.re;
                }
            }
            Ok(DenseValue::Matrix(b))
        }
    }
}

/// Measures the first qubit of every block along its axis, outcome `+1`
/// where possible, and returns the sequence with the leftover total
/// entanglement.
pub fn disentangle_by_blocks(
    s: &StateVector,
    pb: &crate::structure::PersistencyBound,
) -> Result<(Vec<(QubitId, Axis)>, f64)> {
    let mut state = s.clone();
    let mut steps = Vec::with_capacity(pb.partition.blocks.len());
    for block in &pb.partition.blocks {
        let q = QubitId(block[0]);
        let axis = pb.axes[block[0]];
        state = match project(&state, q, axis, Outcome::Plus) {
            Ok((post, _)) => post,
            Err(Error::ZeroProbabilityOutcome { .. }) => project(&state, q, axis, Outcome::Minus)?.0,
            Err(e) => return Err(e),
        };
        steps.push((q, axis));
    }
    Ok((steps, total_entanglement(&state)))
}

/// Exhaustive search for `k` single-qubit measurements along coordinate axes
/// that leave a product state. Qubit subsets are visited in lexicographic
/// order, axes in `x, y, z` order; the first hit is returned.
pub fn search_disentangling_sequence(s: &StateVector, k: usize) -> Result<Option<Vec<(QubitId, Axis)>>> {
    let n = s.n_qubits();
    if k > n {
        return Ok(None);
    }
    let mut subset: Vec<usize> = (0..k).collect();
    loop {
        for code in 0..3usize.pow(k as u32) {
            let steps: Vec<(QubitId, Axis)> = subset
                .iter()
                .enumerate()
                .map(|(i, &q)| (QubitId(q), Axis::basis(code / 3usize.pow(i as u32) % 3)))
                .collect();
            let mut state = s.clone();
            let mut ok = true;
            for &(q, a) in &steps {
                match project(&state, q, a, Outcome::Plus).or_else(|_| project(&state, q, a, Outcome::Minus))
                {
                    Ok((post, _)) => state = post,
                    Err(_) => {
                        ok = false;
                        break;
                    }
                }
            }
            if ok && total_entanglement(&state) < 1e-9 {
                return Ok(Some(steps));
            }
        }
        // next k-subset
        let mut i = k;
        loop {
            if i == 0 {
                return Ok(None);
            }
            i -= 1;
            if subset[i] < n - k + i {
                subset[i] += 1;
                for j in i + 1..k {
                    subset[j] = subset[j - 1] + 1;
                }
                break;
            }
        }
    }
}
