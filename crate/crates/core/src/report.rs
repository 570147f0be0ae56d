//! Serializable reports shared by the command line and the C API.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::entanglement::{ed_all, em_matrix, is_maximally_entangled, MAX_ENT_TOL};
use crate::error::Result;
use crate::optimize::{mieb_matrix, optimal_axis_set, AxisSolution, Mat3};
use crate::states::{brs_chain, supersinglet_s4, SupersingletParams};
use crate::statevec::{Axis, QubitId, StateVector};
use crate::structure::{block_partition, persistency_upper_bound, quantize_em, PersistencyBound};

pub const SCHEMA_VERSION: u32 = 1;

/// How the axes of an analysis were chosen.
#[derive(Clone, Debug)]
pub enum AxisChoice {
    None,
    Given(Vec<Axis>),
    Optimal,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub state: String,
    pub n_qubits: usize,
    pub ed: Vec<f64>,
    pub total_entanglement: f64,
    pub bloch: Vec<[f64; 3]>,
    pub maximally_entangled: Vec<bool>,
    pub mieb_spectra: Vec<[f64; 3]>,
    pub axes: Option<Vec<Axis>>,
    pub em: Option<Vec<Vec<f64>>>,
    pub quantized: Option<Vec<Vec<i8>>>,
    pub blocks: Option<Vec<Vec<usize>>>,
    pub n_blocks: Option<usize>,
    pub persistency_bound: Option<usize>,
    pub flags: Vec<String>,
}

pub fn analyze(s: &StateVector, label: &str, choice: &AxisChoice, tol: f64) -> Result<Report> {
    let n = s.n_qubits();
    let bloch: Vec<[f64; 3]> = (0..n).map(|q| s.bloch_vector(QubitId(q))).collect::<Result<_>>()?;
    let ed = ed_all(s);
    let maxent = is_maximally_entangled(s, MAX_ENT_TOL);
    let mut flags = Vec::new();
    for (q, ok) in maxent.per_qubit.iter().enumerate() {
        if !ok {
            flags.push(format!("qubit {q} is not maximally entangled"));
        }
    }

    let mut mieb_spectra = Vec::with_capacity(n);
    if n >= 2 {
        for q in 0..n {
            let b = mieb_matrix(s, QubitId(q), None)?;
            mieb_spectra.push(crate::optimize::sym3_eigen(&b.b)?.values);
        }
    }

    let (axes, solution): (Option<Vec<Axis>>, Option<AxisSolution>) = match choice {
        AxisChoice::None => (None, None),
        AxisChoice::Given(a) => (Some(a.clone()), None),
        AxisChoice::Optimal if n >= 2 => {
            let sol = optimal_axis_set(s)?;
            (Some(sol.axes.clone()), Some(sol))
        }
        AxisChoice::Optimal => (Some(vec![Axis::Z; n]), None),
    };
    if let Some(sol) = &solution {
        flags.extend(solution_flags(sol));
    }

    let mut report = Report {
        schema_version: SCHEMA_VERSION,
        state: label.to_string(),
        n_qubits: n,
        total_entanglement: ed.iter().sum(),
        ed,
        bloch,
        maximally_entangled: maxent.per_qubit,
        mieb_spectra,
        axes: None,
        em: None,
        quantized: None,
        blocks: None,
        n_blocks: None,
        persistency_bound: None,
        flags,
    };
    if let Some(axes) = axes {
        let pb = persistency_upper_bound(s, Some(&axes), tol)?;
        report.flags.extend(bound_flags(&pb));
        report.em = Some(pb.em.g.clone());
        report.quantized = Some(pb.partition.quantized.clone());
        report.blocks = Some(pb.partition.blocks.clone());
        report.n_blocks = Some(pb.n_blocks);
        report.persistency_bound = pb.bound;
        report.axes = Some(axes);
    }
    Ok(report)
}

pub fn solution_flags(sol: &AxisSolution) -> Vec<String> {
    let mut flags = Vec::new();
    for q in &sol.qubits {
        if q.no_first_order_breaking {
            flags.push(format!("qubit {}: no first-order breaking", q.nu));
        }
    }
    for g in &sol.pair_gaps {
        flags.push(format!(
            "pair ({}, {}): correlator {:.6} below pairwise optimum {:.6}",
            g.mu, g.nu, g.achieved, g.optimum
        ));
    }
    flags
}

pub fn bound_flags(pb: &PersistencyBound) -> Vec<String> {
    let mut flags = Vec::new();
    if !pb.partition.exact {
        flags.push(format!(
            "EM has {} entries outside {{0, ±1}}: persistency bound not applicable",
            pb.partition.violations.len()
        ));
    }
    if !pb.partition.transitive {
        flags.push("a block is not fully ±1-connected".to_string());
    }
    if !pb.partition.sign_consistent {
        flags.push("block signs do not factor as ε_μ ε_ν".to_string());
    }
    if !pb.maximally_entangled && pb.partition.exact {
        flags.push("state not maximally entangled: persistency bound not applicable".to_string());
    }
    flags
}

/// One worked matrix compared against its closed-form value.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReferenceCheck {
    pub name: String,
    pub expected: Vec<Vec<f64>>,
    pub actual: Vec<Vec<f64>>,
    pub max_abs_dev: f64,
    /// Deviation measured after the best simultaneous sign flip `ε_μ ε_ν`.
    pub up_to_signs: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Reproduction {
    pub schema_version: u32,
    pub tolerance: f64,
    pub checks: Vec<ReferenceCheck>,
    pub max_abs_dev: f64,
    pub passed: bool,
}

pub const REPRODUCTION_TOL: f64 = 1e-9;

fn mat3_rows(m: &Mat3) -> Vec<Vec<f64>> {
    m.iter().map(|r| r.to_vec()).collect()
}

fn diag3(a: f64, b: f64, c: f64) -> Vec<Vec<f64>> {
    vec![vec![a, 0.0, 0.0], vec![0.0, b, 0.0], vec![0.0, 0.0, c]]
}

fn plain_dev(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    a.iter().flatten().zip(b.iter().flatten()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Smallest `max |ε_μ ε_ν a_μν − b_μν|` over sign vectors `ε` with `ε_0 = 1`.
pub fn sign_aligned_dev(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    let n = a.len();
    if n == 0 {
        return 0.0;
    }
    let mut best = f64::INFINITY;
    for mask in 0..1usize << (n - 1) {
        let eps = |i: usize| if i > 0 && mask >> (i - 1) & 1 == 1 { -1.0 } else { 1.0 };
        let mut dev: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                dev = dev.max((eps(i) * eps(j) * a[i][j] - b[i][j]).abs());
            }
        }
        best = best.min(dev);
    }
    best
}

fn check(
    name: impl Into<String>,
    expected: Vec<Vec<f64>>,
    actual: Vec<Vec<f64>>,
    up_to_signs: bool,
) -> ReferenceCheck {
    let max_abs_dev =
        if up_to_signs { sign_aligned_dev(&actual, &expected) } else { plain_dev(&actual, &expected) };
    ReferenceCheck { name: name.into(), expected, actual, max_abs_dev, up_to_signs }
}

fn supersinglet_em(p: &SupersingletParams) -> Vec<Vec<f64>> {
    let (al, be, ga) = p.em_entries();
    vec![vec![1.0, al, ga, be], vec![al, 1.0, be, ga], vec![ga, be, 1.0, al], vec![be, ga, al, 1.0]]
}

/// Expected MIEB matrix of qubit `nu` in an open BRS chain of `n ≥ 4` qubits.
fn brs_mieb_expected(n: usize, nu: usize) -> Vec<Vec<f64>> {
    if nu == 0 || nu == n - 1 {
        diag3(1.0, 0.0, 0.0)
    } else if nu == 1 || nu == n - 2 {
        diag3(0.0, 0.0, 1.0)
    } else {
        diag3(0.0, 0.0, 0.0)
    }
}

/// Recomputes every worked example of the BRS and supersinglet families and
/// compares with the closed-form matrices.
pub fn reproduce_reference() -> Result<Reproduction> {
    let mut checks = Vec::new();

    // BRS, N = 3
    let s3 = brs_chain(3, PI)?;
    for (nu, want) in [(0, diag3(2.0, 0.0, 0.0)), (1, diag3(0.0, 0.0, 2.0)), (2, diag3(2.0, 0.0, 0.0))] {
        let b = mieb_matrix(&s3, QubitId(nu), None)?;
        checks.push(check(format!("brs3 MIEB B^{nu}"), want, mat3_rows(&b.b), false));
    }
    let sol3 = optimal_axis_set(&s3)?;
    let em3 = em_matrix(&s3, &sol3.axes)?;
    checks.push(check(
        "brs3 EM (optimal axes)",
        vec![vec![1.0, 1.0, -1.0], vec![1.0, 1.0, -1.0], vec![-1.0, -1.0, 1.0]],
        em3.g,
        true,
    ));

    // BRS, N = 4
    let s4 = brs_chain(4, PI)?;
    for nu in 0..4 {
        let b = mieb_matrix(&s4, QubitId(nu), None)?;
        checks.push(check(format!("brs4 MIEB B^{nu}"), brs_mieb_expected(4, nu), mat3_rows(&b.b), false));
    }
    let sol4 = optimal_axis_set(&s4)?;
    let em4 = em_matrix(&s4, &sol4.axes)?;
    checks.push(check(
        "brs4 EM (optimal axes)",
        vec![
            vec![1.0, 1.0, 0.0, 0.0],
            vec![1.0, 1.0, 0.0, 0.0],
            vec![0.0, 0.0, 1.0, -1.0],
            vec![0.0, 0.0, -1.0, 1.0],
        ],
        em4.g,
        true,
    ));

    // BRS, N = 5..10
    for n in 5..=10 {
        let s = brs_chain(n, PI)?;
        for nu in 0..n {
            let b = mieb_matrix(&s, QubitId(nu), None)?;
            checks.push(check(
                format!("brs{n} MIEB B^{nu}"),
                brs_mieb_expected(n, nu),
                mat3_rows(&b.b),
                false,
            ));
        }
        let pb = persistency_upper_bound(&s, None, crate::structure::DEFAULT_QUANTIZE_TOL)?;
        let got = pb.bound.map_or(f64::NAN, |b| b as f64);
        checks.push(check(format!("brs{n} block count"), vec![vec![(n - 2) as f64]], vec![vec![got]], false));
    }

    // Supersinglets under a uniform x axis
    let named = [
        ("s4(1,0)", SupersingletParams::new(Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0))?),
        ("s4(0,1)", SupersingletParams::new(Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0))?),
    ];
    // (|a|, φ_b − φ_a) on a 5×5 grid
    let mut samples: Vec<(String, SupersingletParams)> =
        named.iter().map(|(n, p)| (n.to_string(), *p)).collect();
    for i in 0..5 {
        for j in 0..5 {
            let abs_a = i as f64 / 4.0;
            let phase = j as f64 * PI / 4.0 + 0.1;
            let p = SupersingletParams::from_polar(abs_a, 0.3, 0.3 + phase)?;
            samples.push((format!("s4(|a|={abs_a:.2}, dphi={phase:.3})"), p));
        }
    }
    checks.push(check(
        "s4(1,0) (alpha, beta, gamma)",
        vec![vec![1.0 / 3.0, -2.0 / 3.0, -2.0 / 3.0]],
        {
            let (a, b, c) = named[0].1.em_entries();
            let em = em_matrix(&supersinglet_s4(named[0].1), &[Axis::X; 4])?;
            debug_assert!(
                (em.g[0][1] - a).abs() < 1e-9
                    && (em.g[0][3] - b).abs() < 1e-9
                    && (em.g[0][2] - c).abs() < 1e-9
            );
            vec![vec![em.g[0][1], em.g[0][3], em.g[0][2]]]
        },
        false,
    ));
    for (name, p) in &samples {
        let s = supersinglet_s4(*p);
        let em = em_matrix(&s, &[Axis::X; 4])?;
        checks.push(check(format!("{name} EM"), supersinglet_em(p), em.g, false));
        for nu in 0..4 {
            let b = mieb_matrix(&s, QubitId(nu), None)?.b;
            let t = (b[0][0] + b[1][1] + b[2][2]) / 3.0;
            checks.push(check(format!("{name} MIEB B^{nu} ∝ I"), diag3(t, t, t), mat3_rows(&b), false));
        }
    }

    // a = √3 e^{iφa}/2, b = e^{iφb}/2
    for (pa, pb) in [(0.0, 0.0), (0.9, 0.9), (0.4, 0.4 + PI), (0.2, 1.3), (-0.7, 2.1)] {
        let p = SupersingletParams::from_polar(3f64.sqrt() / 2.0, pa, pb)?;
        let half = (pa - pb) / 2.0;
        let (c2, s2) = (half.cos().powi(2), half.sin().powi(2));
        let expected = vec![
            vec![1.0, 0.0, -c2, -s2],
            vec![0.0, 1.0, -s2, -c2],
            vec![-c2, -s2, 1.0, 0.0],
            vec![-s2, -c2, 0.0, 1.0],
        ];
        let s = supersinglet_s4(p);
        let em = em_matrix(&s, &[Axis::X; 4])?;
        checks.push(check(
            format!("s4 special case (phi_a={pa:.3}, phi_b={pb:.3}) EM"),
            expected,
            em.g.clone(),
            false,
        ));
        if (half.sin()).abs() < 1e-12 || (half.cos()).abs() < 1e-12 {
            let part = block_partition(&quantize_em(&em, crate::structure::DEFAULT_QUANTIZE_TOL));
            checks.push(check(
                format!("s4 special case (phi_a={pa:.3}, phi_b={pb:.3}) block count"),
                vec![vec![2.0]],
                vec![vec![part.n_blocks as f64]],
                false,
            ));
        }
    }

    let max_abs_dev =
        checks
            .iter()
            .map(|c| c.max_abs_dev)
            .fold(0.0, |m: f64, d| if d.is_nan() { f64::INFINITY } else { m.max(d) });
    Ok(Reproduction {
        schema_version: SCHEMA_VERSION,
        tolerance: REPRODUCTION_TOL,
        passed: max_abs_dev < REPRODUCTION_TOL,
        max_abs_dev,
        checks,
    })
}
