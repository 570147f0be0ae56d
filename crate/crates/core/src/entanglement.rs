//! Entanglement distance, the entanglement metric (a Pauli covariance
//! matrix) and maximal-entanglement detection.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::statevec::{Axis, PauliFactor, QubitId, StateVector};

/// Default threshold on the Bloch norm below which a qubit counts as
/// maximally entangled.
pub const MAX_ENT_TOL: f64 = 1e-8;

/// `E_μ = 1 − |⟨σ^μ⟩|²`, clamped to `[0, 1]`.
pub fn ed_single(s: &StateVector, q: QubitId) -> Result<f64> {
    let b = s.bloch_vector(q)?;
    Ok((1.0 - (b[0] * b[0] + b[1] * b[1] + b[2] * b[2])).clamp(0.0, 1.0))
}

pub fn ed_all(s: &StateVector) -> Vec<f64> {
    (0..s.n_qubits()).map(|q| ed_single(s, QubitId(q)).expect("in range")).collect()
}

/// Sum of single-qubit entanglement distances.
pub fn total_entanglement(s: &StateVector) -> f64 {
    ed_all(s).iter().sum()
}

/// Covariance `⟨σ_v^μ σ_w^ν⟩ − ⟨σ_v^μ⟩⟨σ_w^ν⟩`.
///
/// For `μ = ν` the symmetrized product `Re⟨σ_v σ_w⟩ = v·w` is used, so the
/// diagonal with a common axis is the variance `1 − ⟨σ_v⟩²`.
pub fn em_element(s: &StateVector, mu: QubitId, nu: QubitId, v_mu: Axis, v_nu: Axis) -> Result<f64> {
    let f_mu = PauliFactor::new(mu, v_mu);
    let f_nu = PauliFactor::new(nu, v_nu);
    let e_mu = s.expectation(&f_mu)?;
    let e_nu = s.expectation(&f_nu)?;
    let joint = if mu == nu { v_mu.dot(&v_nu) } else { s.correlator(&[f_mu, f_nu])? };
    Ok(joint - e_mu * e_nu)
}

/// Entanglement metric of a state for one choice of axis per qubit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntanglementMetric {
    pub n: usize,
    pub g: Vec<Vec<f64>>,
    pub axes: Vec<Axis>,
}

impl EntanglementMetric {
    pub fn get(&self, mu: usize, nu: usize) -> f64 {
        self.g[mu][nu]
    }

    /// Largest `|g_μν − other_μν|`.
    pub fn max_abs_diff(&self, other: &[Vec<f64>]) -> f64 {
        self.g.iter().flatten().zip(other.iter().flatten()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }
}

/// Full EM. The upper triangle is computed and mirrored.
pub fn em_matrix(s: &StateVector, axes: &[Axis]) -> Result<EntanglementMetric> {
    let n = s.n_qubits();
    if axes.len() != n {
        return Err(Error::LengthMismatch { expected: n, got: axes.len() });
    }
    let expect: Vec<f64> =
        (0..n).map(|q| s.expectation(&PauliFactor::new(q, axes[q]))).collect::<Result<_>>()?;
    let mut g = vec![vec![0.0; n]; n];
    for mu in 0..n {
        g[mu][mu] = 1.0 - expect[mu] * expect[mu];
        for nu in mu + 1..n {
            let corr = s.correlator(&[PauliFactor::new(mu, axes[mu]), PauliFactor::new(nu, axes[nu])])?;
            let v = corr - expect[mu] * expect[nu];
            g[mu][nu] = v;
            g[nu][mu] = v;
        }
    }
    Ok(EntanglementMetric { n, g, axes: axes.to_vec() })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MaxEntanglement {
    pub per_qubit: Vec<bool>,
    pub all: bool,
}

/// A qubit is maximally entangled when its Bloch vector norm is below `tol`.
pub fn is_maximally_entangled(s: &StateVector, tol: f64) -> MaxEntanglement {
    let per_qubit: Vec<bool> = (0..s.n_qubits())
        .map(|q| {
            let b = s.bloch_vector(QubitId(q)).expect("in range");
            (b[0] * b[0] + b[1] * b[1] + b[2] * b[2]).sqrt() < tol
        })
        .collect();
    let all = per_qubit.iter().all(|&f| f);
    MaxEntanglement { per_qubit, all }
}

/// First qubit whose entanglement distance is more than `tol` below 1.
pub(crate) fn first_non_maximal(s: &StateVector, tol: f64) -> Option<(usize, f64)> {
    ed_all(s).into_iter().enumerate().find(|(_, e)| (1.0 - e) > tol)
}

#[cfg_attr(not(feature = "oracle"), allow(dead_code))]
pub(crate) fn require_maximal(s: &StateVector, tol: f64) -> Result<()> {
    match first_non_maximal(s, tol) {
        Some((qubit, ed)) => Err(Error::NotMaximallyEntangled { qubit, ed }),
        None => Ok(()),
    }
}
