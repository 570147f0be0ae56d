//! Projective measurements along arbitrary axes, measurement sequences and
//! the closed-form expectation after a sequence of `+1` outcomes.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::entanglement::{ed_single, MAX_ENT_TOL};
use crate::error::{Error, Result};
use crate::statevec::{pauli_kernel, Axis, PauliFactor, QubitId, StateVector};

/// Outcomes with probability at or below this are rejected.
pub const ZERO_PROBABILITY: f64 = 1e-14;
/// Largest measured set accepted by [`sequential_expectation_formula`].
pub const MAX_SEQUENCE_TERMS: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Outcome {
    #[serde(rename = "+1")]
    Plus,
    #[serde(rename = "-1")]
    Minus,
}

impl Outcome {
    pub fn sign(self) -> f64 {
        match self {
            Outcome::Plus => 1.0,
            Outcome::Minus => -1.0,
        }
    }

    pub fn from_sign(sign: i32) -> Result<Self> {
        match sign {
            1 => Ok(Outcome::Plus),
            -1 => Ok(Outcome::Minus),
            _ => Err(Error::Parse(format!("outcome must be +1 or -1, got {sign}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasurementRecord {
    pub qubit: QubitId,
    pub axis: Axis,
    pub outcome: Outcome,
    pub probability: f64,
}

/// `P|s⟩/√⟨P⟩` with `P = (I ± σ_m^q)/2`.
pub fn project(
    s: &StateVector,
    q: QubitId,
    m: Axis,
    outcome: Outcome,
) -> Result<(StateVector, MeasurementRecord)> {
    s.check_qubit(q)?;
    let sign = outcome.sign();
    let mut flipped = s.amplitudes().to_vec();
    pauli_kernel(&mut flipped, s.n_qubits(), q.0, &m);
    let projected: Vec<_> = s.amplitudes().iter().zip(&flipped).map(|(a, b)| 0.5 * (a + sign * b)).collect();
    let probability: f64 = projected.iter().map(|a| a.norm_sqr()).sum();
    if probability <= ZERO_PROBABILITY {
        return Err(Error::ZeroProbabilityOutcome { probability, step: None });
    }
    let scale = probability.sqrt().recip();
    let post = StateVector::from_normalized(s.n_qubits(), projected.into_iter().map(|a| a * scale).collect());
    Ok((post, MeasurementRecord { qubit: q, axis: m, outcome, probability }))
}

/// Applies `+1` projections in order. Each record carries the probability
/// conditioned on the previous outcomes.
pub fn measure_sequence(
    s: &StateVector,
    seq: &[(QubitId, Axis)],
) -> Result<(StateVector, Vec<MeasurementRecord>)> {
    measure_sequence_with(s, seq, Outcome::Plus)
}

pub fn measure_sequence_with(
    s: &StateVector,
    seq: &[(QubitId, Axis)],
    outcome: Outcome,
) -> Result<(StateVector, Vec<MeasurementRecord>)> {
    s.check_distinct(seq.iter().map(|(q, _)| *q))?;
    let mut state = s.clone();
    let mut records = Vec::with_capacity(seq.len());
    for (k, (q, m)) in seq.iter().enumerate() {
        let (next, rec) = project(&state, *q, *m, outcome).map_err(|e| match e {
            Error::ZeroProbabilityOutcome { probability, .. } => {
                Error::ZeroProbabilityOutcome { probability, step: Some(k) }
            }
            other => other,
        })?;
        state = next;
        records.push(rec);
    }
    Ok((state, records))
}

/// `⟨σ_v^μ⟩` after `+1` outcomes on every measured qubit, written as a ratio
/// of subset sums of pre-measurement correlators:
///
/// `Σ_{X ⊆ M} ⟨σ_v^μ ∏_{ν∈X} σ_m^ν⟩ / Σ_{X ⊆ M} ⟨∏_{ν∈X} σ_m^ν⟩`.
///
/// The sums run over all `2^M` subsets, including `X = M`; dropping the
/// full set breaks agreement with the explicit projection already at `M = 1`.
pub fn sequential_expectation_formula(
    s: &StateVector,
    measured: &[(QubitId, Axis)],
    target: PauliFactor,
) -> Result<f64> {
    s.check_qubit(target.qubit)?;
    if let Some((q, _)) = measured.iter().find(|(q, _)| *q == target.qubit) {
        return Err(Error::QubitOverlap(q.0));
    }
    s.check_distinct(measured.iter().map(|(q, _)| *q))?;
    let m = measured.len();
    if m > MAX_SEQUENCE_TERMS {
        return Err(Error::TooLarge { n_qubits: m, max: MAX_SEQUENCE_TERMS });
    }
    let terms: Vec<(f64, f64)> = (0..1usize << m)
        .into_par_iter()
        .map(|mask| {
            let subset: Vec<PauliFactor> = measured
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, (q, a))| PauliFactor::new(*q, *a))
                .collect();
            let den = s.product_expectation(&subset)?;
            let mut with_target = subset;
            with_target.push(target);
            let num = s.correlator(&with_target)?;
            Ok((num, den))
        })
        .collect::<Result<_>>()?;
    let (num, den) = terms.iter().fold((0.0, 0.0), |(n, d), (a, b)| (n + a, d + b));
    if den.abs() <= ZERO_PROBABILITY * (1usize << m) as f64 {
        return Err(Error::ZeroDenominator);
    }
    Ok(num / den)
}

/// Both sides of the post-measurement/pre-measurement identity for a pair of
/// maximally entangled qubits.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorrelationTransfer {
    /// `⟨s'|σ_v^μ|s'⟩` after measuring `σ_m^ν` with outcome `+1`.
    pub lhs: f64,
    /// `⟨s|σ_v^μ σ_m^ν|s⟩`.
    pub rhs: f64,
    pub residual: f64,
}

pub fn verify_correlation_transfer(
    s: &StateVector,
    nu: QubitId,
    m: Axis,
    mu: QubitId,
    v: Axis,
) -> Result<CorrelationTransfer> {
    if mu == nu {
        return Err(Error::SameQubit(mu.0));
    }
    for q in [nu, mu] {
        let ed = ed_single(s, q)?;
        if 1.0 - ed > MAX_ENT_TOL {
            return Err(Error::NotMaximallyEntangled { qubit: q.0, ed });
        }
    }
    let (post, _) = project(s, nu, m, Outcome::Plus)?;
    let lhs = post.expectation(&PauliFactor::new(mu, v))?;
    let rhs = s.correlator(&[PauliFactor::new(mu, v), PauliFactor::new(nu, m)])?;
    Ok(CorrelationTransfer { lhs, rhs, residual: (lhs - rhs).abs() })
}

/// `‖σ_v^ν|s⟩ − σ_v^μ|s⟩‖`; zero when the two observables act identically on `s`.
pub fn operator_equivalence_gap(s: &StateVector, mu: QubitId, nu: QubitId, v: Axis) -> Result<f64> {
    let a = s.apply_pauli(&PauliFactor::new(mu, v))?;
    let b = s.apply_pauli(&PauliFactor::new(nu, v))?;
    Ok(a.amplitudes().iter().zip(b.amplitudes()).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt())
}
