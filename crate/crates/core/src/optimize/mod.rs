//! Measurement-axis optimization.
//!
//! Two eigenproblems drive everything here:
//!
//! * the pairwise spin-correlation matrix `C^μν`, whose top singular triple
//!   gives the axes maximizing `⟨σ_v^μ σ_w^ν⟩`;
//! * the measurement-induced entanglement breaking (MIEB) matrix `B^ν`, whose
//!   top eigenvector is the axis along which measuring `ν` destroys the most
//!   entanglement in a target set, the eigenvalue being that loss.
//!
//! Pairwise optimization uses raw correlators rather than connected
//! covariances. The two agree on maximally entangled states.

mod sym3;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use sym3::{degeneracy_tol, fix_sign, sym3_eigen, Mat3, Sym3Eigen, SYMMETRY_TOL};

use crate::entanglement::{first_non_maximal, MAX_ENT_TOL};
use crate::error::{Error, Result};
use crate::statevec::{Axis, PauliFactor, QubitId, StateVector};

/// Top eigenvalues below this mean no single measurement of the qubit
/// reduces the entanglement of its targets.
pub const ZERO_BREAKING: f64 = 1e-9;

/// `c[i][j] = ⟨σ_i^μ σ_j^ν⟩`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Corr3 {
    pub mu: QubitId,
    pub nu: QubitId,
    pub c: Mat3,
}

impl Corr3 {
    /// `(v^μ)ᵀ C v^ν`.
    pub fn bilinear(&self, v_mu: &Axis, v_nu: &Axis) -> f64 {
        let a = v_mu.to_array();
        let b = v_nu.to_array();
        (0..3).map(|i| a[i] * (0..3).map(|j| self.c[i][j] * b[j]).sum::<f64>()).sum()
    }

    /// `C v^ν`, the correlation vector of qubit `μ` with `σ_v^ν`.
    pub fn apply(&self, v_nu: &Axis) -> [f64; 3] {
        let b = v_nu.to_array();
        [0, 1, 2].map(|i| (0..3).map(|j| self.c[i][j] * b[j]).sum())
    }
}

pub fn spin_correlation_matrix(s: &StateVector, mu: QubitId, nu: QubitId) -> Result<Corr3> {
    s.check_qubit(mu)?;
    s.check_qubit(nu)?;
    if mu == nu {
        return Err(Error::SameQubit(mu.0));
    }
    // ⟨σ_i^μ σ_j^ν⟩ = ⟨σ_i^μ s | σ_j^ν s⟩ since the two factors commute and are Hermitian.
    let left: Vec<StateVector> =
        (0..3).map(|i| s.apply_pauli(&PauliFactor::new(mu, Axis::basis(i)))).collect::<Result<_>>()?;
    let right: Vec<StateVector> =
        (0..3).map(|j| s.apply_pauli(&PauliFactor::new(nu, Axis::basis(j)))).collect::<Result<_>>()?;
    let mut c = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let z = left[i].inner(&right[j]);
            if z.im.abs() > crate::statevec::IMAG_TOL {
                return Err(Error::ImaginaryResidue(z.im));
            }
            c[i][j] = z.re;
        }
    }
    Ok(Corr3 { mu, nu, c })
}

/// Axes maximizing the correlator of a pair.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairOptimum {
    pub mu: QubitId,
    pub nu: QubitId,
    pub v_mu: Axis,
    pub v_nu: Axis,
    /// Largest singular value of `C^μν`, equal to `(v^μ)ᵀ C v^ν`.
    pub lambda: f64,
    /// Multiplicity of `λ²` in the spectrum of `CᵀC`.
    pub degeneracy: usize,
    pub corr: Corr3,
}

/// Solves `CᵀC v^ν = λ² v^ν`, then `v^μ = C v^ν / λ`.
pub fn optimal_pair_axes(s: &StateVector, mu: QubitId, nu: QubitId) -> Result<PairOptimum> {
    let corr = spin_correlation_matrix(s, mu, nu)?;
    Ok(pair_from_corr(corr))
}

pub fn pair_from_corr(corr: Corr3) -> PairOptimum {
    let c = &corr.c;
    let mut ctc = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            ctc[i][j] = (0..3).map(|k| c[k][i] * c[k][j]).sum();
        }
    }
    let eig = sym3_eigen(&ctc).expect("CᵀC is symmetric");
    let top = eig.vectors[0];
    let v_nu = Axis::normalized(top[0], top[1], top[2]).unwrap_or(Axis::X);
    let w = corr.apply(&v_nu);
    let lambda = (w[0] * w[0] + w[1] * w[1] + w[2] * w[2]).sqrt();
    let v_mu = if lambda > 1e-12 { Axis::normalized(w[0], w[1], w[2]).unwrap_or(Axis::X) } else { Axis::X };
    PairOptimum { mu: corr.mu, nu: corr.nu, v_mu, v_nu, lambda, degeneracy: eig.top_multiplicity(), corr }
}

/// `B^ν` restricted to a target set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Mieb3 {
    pub nu: QubitId,
    pub targets: Vec<QubitId>,
    pub b: Mat3,
}

/// `b[j][k] = Σ_{μ∈targets} Σ_i ⟨σ_j^ν σ_i^μ⟩⟨σ_i^μ σ_k^ν⟩`, i.e. the sum of
/// `C^{νμ} (C^{νμ})ᵀ` over targets. `None` targets every other qubit.
pub fn mieb_matrix(s: &StateVector, nu: QubitId, targets: Option<&[QubitId]>) -> Result<Mieb3> {
    s.check_qubit(nu)?;
    let targets: Vec<QubitId> = match targets {
        Some(t) => {
            if t.contains(&nu) {
                return Err(Error::NuInTargets(nu.0));
            }
            s.check_distinct(t.iter().copied())?;
            t.to_vec()
        }
        None => (0..s.n_qubits()).map(QubitId).filter(|&q| q != nu).collect(),
    };
    let parts: Vec<Mat3> = targets
        .par_iter()
        .map(|&mu| {
            let c = spin_correlation_matrix(s, nu, mu)?.c;
            let mut p = [[0.0; 3]; 3];
            for j in 0..3 {
                for k in 0..3 {
                    p[j][k] = (0..3).map(|i| c[j][i] * c[k][i]).sum();
                }
            }
            Ok(p)
        })
        .collect::<Result<_>>()?;
    let mut b = [[0.0; 3]; 3];
    for p in &parts {
        for j in 0..3 {
            for k in 0..3 {
                b[j][k] += p[j][k];
            }
        }
    }
    Ok(Mieb3 { nu, targets, b })
}

/// Best single-measurement axis for one qubit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BreakingAxis {
    pub nu: QubitId,
    pub axis: Axis,
    /// Entanglement removed from the targets by measuring along `axis`.
    pub eigenvalue: f64,
    pub degeneracy: usize,
    pub spectrum: [f64; 3],
    /// Orthonormal eigenvectors, matching `spectrum`.
    pub eigenvectors: [[f64; 3]; 3],
    pub no_first_order_breaking: bool,
    /// Whether the loss interpretation holds (state maximally entangled).
    pub maximally_entangled: bool,
    pub mieb: Mieb3,
}

/// Top eigenpair of the MIEB matrix. A non-maximally-entangled state is an
/// error when `strict`, otherwise it is reported through
/// `maximally_entangled = false`.
pub fn optimal_breaking_axis(
    s: &StateVector,
    nu: QubitId,
    targets: Option<&[QubitId]>,
    strict: bool,
) -> Result<BreakingAxis> {
    let mieb = mieb_matrix(s, nu, targets)?;
    let maximal = match first_non_maximal(s, MAX_ENT_TOL) {
        Some((qubit, ed)) if strict => return Err(Error::NotMaximallyEntangled { qubit, ed }),
        Some(_) => false,
        None => true,
    };
    Ok(breaking_from_mieb(mieb, maximal))
}

fn breaking_from_mieb(mieb: Mieb3, maximally_entangled: bool) -> BreakingAxis {
    let eig = sym3_eigen(&mieb.b).expect("MIEB matrices are symmetric");
    let top = eig.values[0];
    let degeneracy = eig.top_multiplicity();
    let no_first_order_breaking = top.abs() < ZERO_BREAKING;
    let axis = if no_first_order_breaking || degeneracy == 3 {
        Axis::X
    } else {
        let v = eig.vectors[0];
        Axis::normalized(v[0], v[1], v[2]).unwrap_or(Axis::X)
    };
    BreakingAxis {
        nu: mieb.nu,
        axis,
        eigenvalue: top,
        degeneracy: if no_first_order_breaking { 3 } else { degeneracy },
        spectrum: eig.values,
        eigenvectors: eig.vectors,
        no_first_order_breaking,
        maximally_entangled,
        mieb,
    }
}

/// A pair whose correlator under the chosen axis set falls short of its
/// pairwise optimum.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairGap {
    pub mu: QubitId,
    pub nu: QubitId,
    pub achieved: f64,
    pub optimum: f64,
}

/// One axis per qubit, assembled from the MIEB eigenproblems.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AxisSolution {
    pub axes: Vec<Axis>,
    /// Sum of top MIEB eigenvalues.
    pub objective: f64,
    /// Largest top-eigenvalue multiplicity over the qubits.
    pub degeneracy: usize,
    pub qubits: Vec<BreakingAxis>,
    pub maximally_entangled: bool,
    /// Every MIEB matrix is a nonzero multiple of the identity.
    pub isotropic: bool,
    /// Pairs where the set misses the pairwise optimum by more than 1e-9.
    pub pair_gaps: Vec<PairGap>,
}

/// Builds an axis set from MIEB top eigenvectors.
///
/// Qubits are fixed in descending order of top eigenvalue (ties by index).
/// A non-degenerate qubit takes its top eigenvector. A degenerate or
/// zero-breaking qubit takes, within its top eigenspace, the direction of
/// strongest correlation `C^{μν} v^ν` with an already fixed qubit, falling
/// back to the first coordinate axis with a nonzero projection. Signs follow
/// the first-nonzero-component-positive convention.
pub fn optimal_axis_set(s: &StateVector) -> Result<AxisSolution> {
    let n = s.n_qubits();
    let maximal = first_non_maximal(s, MAX_ENT_TOL).is_none();
    let qubits: Vec<BreakingAxis> = (0..n)
        .into_par_iter()
        .map(|q| Ok(breaking_from_mieb(mieb_matrix(s, QubitId(q), None)?, maximal)))
        .collect::<Result<_>>()?;

    let corr: Vec<Vec<Option<Corr3>>> = (0..n)
        .map(|mu| {
            (0..n)
                .map(|nu| {
                    (mu != nu).then(|| spin_correlation_matrix(s, QubitId(mu), QubitId(nu))).transpose()
                })
                .collect::<Result<_>>()
        })
        .collect::<Result<_>>()?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| qubits[b].eigenvalue.total_cmp(&qubits[a].eigenvalue).then(a.cmp(&b)));

    let mut axes: Vec<Option<Axis>> = vec![None; n];
    for &mu in &order {
        let info = &qubits[mu];
        let axis = if info.degeneracy == 1 && !info.no_first_order_breaking {
            info.axis
        } else {
            let basis: Vec<[f64; 3]> = if info.no_first_order_breaking {
                vec![[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]
            } else {
                info.eigenvectors[..info.degeneracy].to_vec()
            };
            let project = |w: [f64; 3]| -> [f64; 3] {
                let mut p = [0.0; 3];
                for e in &basis {
                    let d = w[0] * e[0] + w[1] * e[1] + w[2] * e[2];
                    for i in 0..3 {
                        p[i] += d * e[i];
                    }
                }
                p
            };
            let norm = |p: &[f64; 3]| (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
            let mut best: Option<([f64; 3], f64)> = None;
            for (nu, fixed) in axes.iter().enumerate() {
                if let (Some(v_nu), Some(c)) = (fixed, &corr[mu][nu]) {
                    let p = project(c.apply(v_nu));
                    let pn = norm(&p);
                    if pn > 1e-9 && best.is_none_or(|(_, b)| pn > b + 1e-12) {
                        best = Some((p, pn));
                    }
                }
            }
            let dir = match best {
                Some((p, _)) => p,
                None => [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]
                    .into_iter()
                    .map(project)
                    .find(|p| norm(p) > 1e-9)
                    .unwrap_or([1.0, 0.0, 0.0]),
            };
            let mut dir = dir;
            fix_sign(&mut dir);
            Axis::normalized(dir[0], dir[1], dir[2]).unwrap_or(Axis::X)
        };
        axes[mu] = Some(axis);
    }
    let axes: Vec<Axis> = axes.into_iter().map(|a| a.expect("every qubit fixed")).collect();

    let mut pair_gaps = Vec::new();
    for mu in 0..n {
        for nu in mu + 1..n {
            let c = corr[mu][nu].expect("distinct pair");
            let optimum = pair_from_corr(c).lambda;
            let achieved = c.bilinear(&axes[mu], &axes[nu]).abs();
            if achieved < optimum - 1e-9 {
                pair_gaps.push(PairGap { mu: QubitId(mu), nu: QubitId(nu), achieved, optimum });
            }
        }
    }

    let objective = qubits.iter().map(|q| q.eigenvalue).sum();
    let degeneracy = qubits.iter().map(|q| q.degeneracy).max().unwrap_or(1);
    let isotropic = qubits.iter().all(|q| q.degeneracy == 3 && !q.no_first_order_breaking);
    Ok(AxisSolution {
        axes,
        objective,
        degeneracy,
        qubits,
        maximally_entangled: maximal,
        isotropic,
        pair_gaps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entanglement::{ed_single, em_matrix};
    use crate::measurement::{project, Outcome};
    use crate::states::{bell, brs_chain, ghz, product_state, supersinglet_s4, BellKind, SupersingletParams};
    use num_complex::Complex64;
    use std::f64::consts::PI;

    fn max_dev(a: &Mat3, b: &Mat3) -> f64 {
        a.iter().flatten().zip(b.iter().flatten()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
    }

    fn diag(a: f64, b: f64, c: f64) -> Mat3 {
        [[a, 0.0, 0.0], [0.0, b, 0.0], [0.0, 0.0, c]]
    }

    #[test]
    fn correlation_matrices() {
        let singlet = bell(BellKind::OddMinus);
        let c = spin_correlation_matrix(&singlet, QubitId(0), QubitId(1)).unwrap();
        assert!(max_dev(&c.c, &diag(-1.0, -1.0, -1.0)) < 1e-15);

        // GHZ₃ two-body correlators: only ⟨Z Z⟩ survives.
        let c = spin_correlation_matrix(&ghz(3).unwrap(), QubitId(0), QubitId(1)).unwrap();
        assert!(max_dev(&c.c, &diag(0.0, 0.0, 1.0)) < 1e-15);

        let zz = product_state(&[Axis::Z, Axis::Z]).unwrap();
        let c = spin_correlation_matrix(&zz, QubitId(0), QubitId(1)).unwrap();
        assert!(max_dev(&c.c, &diag(0.0, 0.0, 1.0)) < 1e-15);

        assert!(matches!(spin_correlation_matrix(&zz, QubitId(1), QubitId(1)), Err(Error::SameQubit(1))));
    }

    #[test]
    fn pair_optima() {
        let p = optimal_pair_axes(&bell(BellKind::OddMinus), QubitId(0), QubitId(1)).unwrap();
        assert!((p.lambda - 1.0).abs() < 1e-15);
        assert_eq!(p.degeneracy, 3);
        assert!((p.corr.bilinear(&p.v_mu, &p.v_nu) - 1.0).abs() < 1e-15);
        assert!((p.v_mu.dot(&p.v_nu) + 1.0).abs() < 1e-15);

        let p = optimal_pair_axes(&ghz(3).unwrap(), QubitId(0), QubitId(1)).unwrap();
        assert!((p.lambda - 1.0).abs() < 1e-15);

        let p =
            optimal_pair_axes(&product_state(&[Axis::Z, Axis::Z]).unwrap(), QubitId(0), QubitId(1)).unwrap();
        assert!((p.lambda - 1.0).abs() < 1e-15);
        assert_eq!(p.v_mu, Axis::Z);
        assert_eq!(p.v_nu, Axis::Z);
    }

    #[test]
    fn mieb_brs_chains() {
        let s3 = brs_chain(3, PI).unwrap();
        for (nu, want) in [(0, diag(2.0, 0.0, 0.0)), (1, diag(0.0, 0.0, 2.0)), (2, diag(2.0, 0.0, 0.0))] {
            let b = mieb_matrix(&s3, QubitId(nu), None).unwrap();
            assert!(max_dev(&b.b, &want) < 1e-12, "nu={nu}: {:?}", b.b);
        }
        let s4 = brs_chain(4, PI).unwrap();
        for (nu, want) in [
            (0, diag(1.0, 0.0, 0.0)),
            (1, diag(0.0, 0.0, 1.0)),
            (2, diag(0.0, 0.0, 1.0)),
            (3, diag(1.0, 0.0, 0.0)),
        ] {
            let b = mieb_matrix(&s4, QubitId(nu), None).unwrap();
            assert!(max_dev(&b.b, &want) < 1e-12, "nu={nu}: {:?}", b.b);
        }
        assert!(matches!(
            mieb_matrix(&s4, QubitId(0), Some(&[QubitId(0), QubitId(2)])),
            Err(Error::NuInTargets(0))
        ));
        let sub = mieb_matrix(&s3, QubitId(0), Some(&[QubitId(2)])).unwrap();
        assert!(max_dev(&sub.b, &diag(1.0, 0.0, 0.0)) < 1e-12);
    }

    #[test]
    fn mieb_supersinglet_is_isotropic() {
        let p = SupersingletParams::from_polar(0.6, 0.4, -1.3).unwrap();
        let s = supersinglet_s4(p);
        for nu in 0..4 {
            let b = mieb_matrix(&s, QubitId(nu), None).unwrap().b;
            let t = (b[0][0] + b[1][1] + b[2][2]) / 3.0;
            assert!(max_dev(&b, &diag(t, t, t)) < 1e-12);
            assert!(t > 0.1);
        }
    }

    fn close(a: &[Axis], b: &[Axis]) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(u, v)| u.dot(v) > 1.0 - 1e-12)
    }

    #[test]
    fn breaking_axes() {
        let s3 = brs_chain(3, PI).unwrap();
        let b = optimal_breaking_axis(&s3, QubitId(0), None, true).unwrap();
        assert!(close(&[b.axis], &[Axis::X]));
        assert!((b.eigenvalue - 2.0).abs() < 1e-12);
        assert_eq!(b.degeneracy, 1);

        let s6 = brs_chain(6, PI).unwrap();
        for nu in 2..4 {
            let b = optimal_breaking_axis(&s6, QubitId(nu), None, true).unwrap();
            assert!(b.no_first_order_breaking);
            assert!(b.eigenvalue.abs() < 1e-12);
            assert_eq!(b.axis, Axis::X);
        }

        let ss = supersinglet_s4(SupersingletParams::new(Complex64::new(1.0, 0.0), 0.0.into()).unwrap());
        let b = optimal_breaking_axis(&ss, QubitId(2), None, true).unwrap();
        assert_eq!(b.degeneracy, 3);
        assert_eq!(b.axis, Axis::X);

        let prod = product_state(&[Axis::Z, Axis::X]).unwrap();
        assert!(matches!(
            optimal_breaking_axis(&prod, QubitId(0), None, true),
            Err(Error::NotMaximallyEntangled { .. })
        ));
        let lenient = optimal_breaking_axis(&prod, QubitId(0), None, false).unwrap();
        assert!(!lenient.maximally_entangled);
    }

    #[test]
    fn eigenvalue_equals_breaking() {
        let p = SupersingletParams::from_polar(0.8, 0.0, 2.0).unwrap();
        for s in [brs_chain(3, PI).unwrap(), brs_chain(5, PI).unwrap(), ghz(4).unwrap(), supersinglet_s4(p)] {
            for nu in 0..s.n_qubits() {
                let b = optimal_breaking_axis(&s, QubitId(nu), None, true).unwrap();
                let (post, _) = project(&s, QubitId(nu), b.axis, Outcome::Plus).unwrap();
                let loss: f64 = (0..s.n_qubits())
                    .filter(|&q| q != nu)
                    .map(|q| ed_single(&s, QubitId(q)).unwrap() - ed_single(&post, QubitId(q)).unwrap())
                    .sum();
                assert!((loss - b.eigenvalue).abs() < 1e-9, "nu={nu}: {loss} vs {}", b.eigenvalue);
            }
        }
    }

    #[test]
    fn axis_sets() {
        let sol = optimal_axis_set(&brs_chain(4, PI).unwrap()).unwrap();
        assert!(close(&sol.axes, &[Axis::X, Axis::Z, Axis::Z, Axis::X]), "{:?}", sol.axes);
        assert!(sol.pair_gaps.is_empty());

        let sol = optimal_axis_set(&brs_chain(3, PI).unwrap()).unwrap();
        assert!(close(&sol.axes, &[Axis::X, Axis::Z, Axis::X]), "{:?}", sol.axes);
        assert!((sol.objective - 6.0).abs() < 1e-12);

        let sol = optimal_axis_set(&ghz(3).unwrap()).unwrap();
        assert_eq!(sol.axes, vec![Axis::Z; 3]);
        let g = em_matrix(&ghz(3).unwrap(), &sol.axes).unwrap();
        assert!(g.max_abs_diff(&vec![vec![1.0; 3]; 3]) < 1e-15);

        let p = SupersingletParams::from_polar(0.5, 1.0, 0.2).unwrap();
        let sol = optimal_axis_set(&supersinglet_s4(p)).unwrap();
        assert!(sol.isotropic);
        assert_eq!(sol.axes, vec![Axis::X; 4]);
        assert!(sol.pair_gaps.is_empty());
    }
}
