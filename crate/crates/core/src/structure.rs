//! Block structure of the entanglement metric and the persistency bound it
//! yields.
//!
//! When every EM entry is `0` or `±1` on a maximally entangled state, the
//! nonzero pattern splits the qubits into blocks whose members are mutually
//! `±1`-correlated. Measuring one qubit per block disentangles the state, so
//! the block count bounds the persistency of entanglement from above. It is
//! only a bound: a BRS chain of `N > 4` qubits has `N − 2` blocks but
//! persistency `⌊N/2⌋`.

use petgraph::unionfind::UnionFind;
use serde::{Deserialize, Serialize};

use crate::entanglement::{em_matrix, first_non_maximal, EntanglementMetric, MAX_ENT_TOL};
use crate::error::Result;
use crate::optimize::optimal_axis_set;
use crate::statevec::{Axis, StateVector};

pub const DEFAULT_QUANTIZE_TOL: f64 = 1e-6;

/// An off-diagonal entry that is neither near 0 nor near ±1.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub mu: usize,
    pub nu: usize,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuantizedEm {
    pub matrix: Vec<Vec<i8>>,
    /// No off-diagonal entry needed rounding from the ambiguous range.
    pub exact: bool,
    pub violations: Vec<Violation>,
}

/// Maps `|g| > 1 − tol` to `sign(g)` and `|g| < tol` to 0. Anything else is
/// rounded to the nearest of `{−1, 0, 1}` and reported.
pub fn quantize_em(em: &EntanglementMetric, tol: f64) -> QuantizedEm {
    let tol = tol.clamp(f64::MIN_POSITIVE, 0.5);
    let n = em.n;
    let mut matrix = vec![vec![0i8; n]; n];
    let mut violations = Vec::new();
    for mu in 0..n {
        for nu in 0..n {
            let g = em.g[mu][nu];
            let a = g.abs();
            matrix[mu][nu] = if a > 1.0 - tol {
                g.signum() as i8
            } else if a < tol {
                0
            } else {
                if mu < nu {
                    violations.push(Violation { mu, nu, value: g });
                }
                if a >= 0.5 {
                    g.signum() as i8
                } else {
                    0
                }
            };
        }
    }
    QuantizedEm { matrix, exact: violations.is_empty(), violations }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlockPartition {
    pub quantized: Vec<Vec<i8>>,
    /// Sorted by smallest member, members ascending.
    pub blocks: Vec<Vec<usize>>,
    pub n_blocks: usize,
    pub exact: bool,
    /// Every off-diagonal entry inside each block is ±1.
    pub transitive: bool,
    /// Inside each block, entries factor as `ε_μ ε_ν`.
    pub sign_consistent: bool,
    /// Per-qubit sign `ε` relative to the first member of its block.
    pub signs: Vec<i8>,
    pub violations: Vec<Violation>,
}

/// Connected components of the off-diagonal nonzero pattern.
pub fn block_partition(q: &QuantizedEm) -> BlockPartition {
    let n = q.matrix.len();
    let mut uf = UnionFind::<usize>::new(n);
    for mu in 0..n {
        for nu in mu + 1..n {
            if q.matrix[mu][nu] != 0 {
                uf.union(mu, nu);
            }
        }
    }
    let labels = uf.into_labeling();
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    let mut block_of_label = std::collections::HashMap::new();
    for (qubit, &label) in labels.iter().enumerate() {
        let idx = *block_of_label.entry(label).or_insert_with(|| {
            blocks.push(Vec::new());
            blocks.len() - 1
        });
        blocks[idx].push(qubit);
    }

    let mut transitive = true;
    let mut sign_consistent = true;
    let mut signs = vec![1i8; n];
    for block in &blocks {
        // spread signs from the first member over a BFS tree
        let mut assigned = vec![false; n];
        assigned[block[0]] = true;
        let mut queue = std::collections::VecDeque::from([block[0]]);
        while let Some(u) = queue.pop_front() {
            for &w in block {
                if !assigned[w] && q.matrix[u][w] != 0 {
                    signs[w] = signs[u] * q.matrix[u][w];
                    assigned[w] = true;
                    queue.push_back(w);
                }
            }
        }
        for (i, &mu) in block.iter().enumerate() {
            for &nu in &block[i + 1..] {
                let e = q.matrix[mu][nu];
                if e == 0 {
                    transitive = false;
                } else if e != signs[mu] * signs[nu] {
                    sign_consistent = false;
                }
            }
        }
    }

    BlockPartition {
        quantized: q.matrix.clone(),
        n_blocks: blocks.len(),
        blocks,
        exact: q.exact,
        transitive,
        sign_consistent,
        signs,
        violations: q.violations.clone(),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PersistencyBound {
    /// Upper bound on the persistency of entanglement, or `None` unless the
    /// state is maximally entangled, every EM entry is in `{0, ±1}` and every
    /// block is transitive.
    pub bound: Option<usize>,
    pub n_blocks: usize,
    pub partition: BlockPartition,
    pub axes: Vec<Axis>,
    pub em: EntanglementMetric,
    pub maximally_entangled: bool,
}

/// Block count of the EM under `axes`, or under [`optimal_axis_set`] when
/// `axes` is `None`. The true persistency may be smaller.
pub fn persistency_upper_bound(s: &StateVector, axes: Option<&[Axis]>, tol: f64) -> Result<PersistencyBound> {
    let axes: Vec<Axis> = match axes {
        Some(a) => a.to_vec(),
        None => optimal_axis_set(s)?.axes,
    };
    let em = em_matrix(s, &axes)?;
    let partition = block_partition(&quantize_em(&em, tol));
    let maximally_entangled = first_non_maximal(s, MAX_ENT_TOL).is_none();
    let applicable = maximally_entangled && partition.exact && partition.transitive;
    Ok(PersistencyBound {
        bound: applicable.then_some(partition.n_blocks),
        n_blocks: partition.n_blocks,
        partition,
        axes,
        em,
        maximally_entangled,
    })
}
