//! Constructors for the reference states: BRS chains, GHZ, Bell pairs, the
//! four-qubit supersinglets, product states and seeded random states.

use std::f64::consts::PI;
use std::path::PathBuf;
use std::str::FromStr;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::statevec::{Axis, StateVector};

/// Coefficients of `a|S₄¹⟩ + b|S₄²⟩`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SupersingletParams {
    a: Complex64,
    b: Complex64,
}

impl SupersingletParams {
    pub fn new(a: Complex64, b: Complex64) -> Result<Self> {
        let n2 = a.norm_sqr() + b.norm_sqr();
        if (n2 - 1.0).abs() > 1e-12 {
            return Err(Error::BadNorm(n2));
        }
        Ok(SupersingletParams { a, b })
    }

    /// `a = |a| e^{iφa}`, `b = sqrt(1 − |a|²) e^{iφb}`.
    pub fn from_polar(abs_a: f64, phase_a: f64, phase_b: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&abs_a) {
            return Err(Error::BadNorm(abs_a * abs_a));
        }
        let abs_b = (1.0 - abs_a * abs_a).max(0.0).sqrt();
        Self::new(Complex64::from_polar(abs_a, phase_a), Complex64::from_polar(abs_b, phase_b))
    }

    pub fn a(&self) -> Complex64 {
        self.a
    }

    pub fn b(&self) -> Complex64 {
        self.b
    }

    /// Closed-form EM entries `(α, β, γ)` under a uniform axis: `α = g₀₁`,
    /// `β = g₀₃`, `γ = g₀₂`.
    pub fn em_entries(&self) -> (f64, f64, f64) {
        let a2 = self.a.norm_sqr();
        let b2 = self.b.norm_sqr();
        let r = (self.a.conj() * self.b).re;
        let s3 = 3f64.sqrt();
        let alpha = a2 / 3.0 - b2;
        let beta = 2.0 / 3.0 * (s3 * r - a2);
        let gamma = -2.0 / 3.0 * (s3 * r + a2);
        (alpha, beta, gamma)
    }
}

/// The four maximally entangled two-qubit states.
///
/// Names are neutral: `Odd*` are the `|01⟩ ± |10⟩` states and `Even*` the
/// `|00⟩ ± |11⟩` states. On the command line `phi±` selects the odd pair and
/// `psi±` the even pair, so `phi-` is the singlet `(|01⟩ − |10⟩)/√2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BellKind {
    EvenPlus,
    EvenMinus,
    OddPlus,
    OddMinus,
}

impl FromStr for BellKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "phi+" | "odd+" => Ok(BellKind::OddPlus),
            "phi-" | "odd-" | "singlet" => Ok(BellKind::OddMinus),
            "psi+" | "even+" => Ok(BellKind::EvenPlus),
            "psi-" | "even-" => Ok(BellKind::EvenMinus),
            _ => Err(Error::Parse(format!("unknown Bell state `{s}`"))),
        }
    }
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn basis_index(bits: &str) -> usize {
    usize::from_str_radix(bits, 2).expect("literal basis string")
}

/// `U(φ)|+⟩^⊗n` on an open chain, where `U(φ)` multiplies each basis ket by
/// `e^{−iφ·k}` and `k` counts neighbour pairs `(μ, μ+1)` with `q_μ = 0`,
/// `q_{μ+1} = 1`.
pub fn brs_chain(n: usize, phi: f64) -> Result<StateVector> {
    if n < 2 {
        return Err(Error::BadSize { got: n, min: 2 });
    }
    let dim = 1usize << n;
    let amp = (dim as f64).sqrt().recip();
    let amps = (0..dim)
        .map(|i| {
            let k = (0..n - 1)
                .filter(|&mu| {
                    let q_mu = (i >> (n - 1 - mu)) & 1;
                    let q_next = (i >> (n - 2 - mu)) & 1;
                    q_mu == 0 && q_next == 1
                })
                .count();
            phase(amp, phi, k)
        })
        .collect();
    Ok(StateVector::from_normalized(n, amps))
}

/// `amp · e^{-iφk}`, exact when `φ` is a whole multiple of `π`.
fn phase(amp: f64, phi: f64, k: usize) -> Complex64 {
    let turns = phi / PI;
    if turns == turns.round() {
        let odd = (turns.round() as i64 * k as i64).rem_euclid(2) == 1;
        return c(if odd { -amp } else { amp });
    }
    Complex64::from_polar(amp, -phi * k as f64)
}

/// `(|0…0⟩ + |1…1⟩)/√2`.
pub fn ghz(n: usize) -> Result<StateVector> {
    if n < 2 {
        return Err(Error::BadSize { got: n, min: 2 });
    }
    let mut amps = vec![c(0.0); 1 << n];
    amps[0] = c(1.0);
    amps[(1 << n) - 1] = c(1.0);
    StateVector::new(n, amps)
}

pub fn bell(kind: BellKind) -> StateVector {
    let mut amps = vec![c(0.0); 4];
    match kind {
        BellKind::EvenPlus | BellKind::EvenMinus => {
            amps[0] = c(1.0);
            amps[3] = c(if kind == BellKind::EvenPlus { 1.0 } else { -1.0 });
        }
        BellKind::OddPlus | BellKind::OddMinus => {
            amps[1] = c(1.0);
            amps[2] = c(if kind == BellKind::OddPlus { 1.0 } else { -1.0 });
        }
    }
    StateVector::new(2, amps).expect("nonzero")
}

/// `a|S₄¹⟩ + b|S₄²⟩` with
/// `|S₄¹⟩ = (|0011⟩ + |1100⟩ − ½(|0101⟩ + |0110⟩ + |1001⟩ + |1010⟩))/√3` and
/// `|S₄²⟩ = ½(|0101⟩ + |1010⟩ − |0110⟩ − |1001⟩)`.
pub fn supersinglet_s4(p: SupersingletParams) -> StateVector {
    let mut s1 = vec![c(0.0); 16];
    let mut s2 = vec![c(0.0); 16];
    let inv3 = 3f64.sqrt().recip();
    s1[basis_index("0011")] = c(inv3);
    s1[basis_index("1100")] = c(inv3);
    for bits in ["0101", "0110", "1001", "1010"] {
        s1[basis_index(bits)] = c(-0.5 * inv3);
    }
    s2[basis_index("0101")] = c(0.5);
    s2[basis_index("1010")] = c(0.5);
    s2[basis_index("0110")] = c(-0.5);
    s2[basis_index("1001")] = c(-0.5);
    let amps = s1.iter().zip(&s2).map(|(x, y)| p.a * x + p.b * y).collect();
    StateVector::new(4, amps).expect("params are normalized")
}

/// Single-qubit amplitudes `(cos θ/2, e^{iφ} sin θ/2)` with Bloch vector `v`.
pub fn qubit_amplitudes(v: &Axis) -> [Complex64; 2] {
    let theta = v.z().clamp(-1.0, 1.0).acos();
    let phi = v.y().atan2(v.x());
    [c((theta / 2.0).cos()), Complex64::from_polar((theta / 2.0).sin(), phi)]
}

/// Tensor product of single-qubit pure states with the given Bloch vectors.
pub fn product_state(blochs: &[Axis]) -> Result<StateVector> {
    if blochs.is_empty() {
        return Err(Error::BadSize { got: 0, min: 1 });
    }
    let mut amps = vec![c(1.0)];
    for v in blochs {
        let q = qubit_amplitudes(v);
        amps = amps.iter().flat_map(|a| [a * q[0], a * q[1]]).collect();
    }
    StateVector::new(blochs.len(), amps)
}

/// Normalized vector of i.i.d. complex Gaussian amplitudes, deterministic per seed.
pub fn random_state(n: usize, seed: u64) -> Result<StateVector> {
    if n == 0 {
        return Err(Error::BadSize { got: 0, min: 1 });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let amps = (0..1usize << n)
        .map(|_| {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            Complex64::new(re, im)
        })
        .collect();
    StateVector::new(n, amps)
}

/// Textual state description used by the CLI and the C API.
///
/// Grammar: `ghz:N`, `brs:N[:PHI]`, `bell:KIND`, `s4:A_RE,A_IM,B_RE,B_IM` (rescaled to unit norm),
/// `product:AXES`, `random:N[:SEED]`, `file:PATH`.
#[derive(Clone, Debug, PartialEq)]
pub enum StateSpec {
    Ghz(usize),
    Brs { n: usize, phi: f64 },
    Bell(BellKind),
    Supersinglet(SupersingletParams),
    Product(Vec<Axis>),
    Random { n: usize, seed: Option<u64> },
    File(PathBuf),
}

fn parse_num<T: FromStr>(s: &str, what: &str) -> Result<T> {
    s.trim().parse().map_err(|_| Error::Parse(format!("invalid {what} `{s}`")))
}

impl FromStr for StateSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, rest) = s
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("state spec `{s}` has no `kind:` prefix")))?;
        match kind {
            "ghz" => Ok(StateSpec::Ghz(parse_num(rest, "qubit count")?)),
            "brs" => {
                let mut it = rest.splitn(2, ':');
                let n = parse_num(it.next().unwrap_or(""), "qubit count")?;
                let phi = match it.next() {
                    Some(p) => parse_num(p, "phase")?,
                    None => PI,
                };
                Ok(StateSpec::Brs { n, phi })
            }
            "bell" => Ok(StateSpec::Bell(rest.parse()?)),
            "s4" => {
                let v: Vec<f64> =
                    rest.split(',').map(|p| parse_num(p, "coefficient")).collect::<Result<_>>()?;
                if v.len() != 4 {
                    return Err(Error::Parse(format!("s4 needs four numbers, got `{rest}`")));
                }
                // rescaled so that |a|² + |b|² = 1
                let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                if !(norm.is_finite() && norm > 0.0) {
                    return Err(Error::Parse(format!("s4 parameters `{rest}` have zero norm")));
                }
                let p = SupersingletParams::new(
                    Complex64::new(v[0] / norm, v[1] / norm),
                    Complex64::new(v[2] / norm, v[3] / norm),
                )
                .map_err(|e| Error::Parse(format!("s4 parameters: {e}")))?;
                Ok(StateSpec::Supersinglet(p))
            }
            "product" => Ok(StateSpec::Product(Axis::parse_list(rest)?)),
            "random" => {
                let mut it = rest.splitn(2, ':');
                let n = parse_num(it.next().unwrap_or(""), "qubit count")?;
                let seed = it.next().map(|p| parse_num(p, "seed")).transpose()?;
                Ok(StateSpec::Random { n, seed })
            }
            "file" => Ok(StateSpec::File(PathBuf::from(rest))),
            _ => Err(Error::Parse(format!("unknown state kind `{kind}`"))),
        }
    }
}

impl StateSpec {
    /// Builds the state. `default_seed` applies to `random:N` without a seed.
    pub fn build(&self, default_seed: u64) -> Result<StateVector> {
        match self {
            StateSpec::Ghz(n) => ghz(*n),
            StateSpec::Brs { n, phi } => brs_chain(*n, *phi),
            StateSpec::Bell(kind) => Ok(bell(*kind)),
            StateSpec::Supersinglet(p) => Ok(supersinglet_s4(*p)),
            StateSpec::Product(axes) => product_state(axes),
            StateSpec::Random { n, seed } => random_state(*n, seed.unwrap_or(default_seed)),
            StateSpec::File(path) => StateVector::read_json(path).map_err(|e| match e {
                Error::Io(io) => Error::Parse(format!("cannot read {}: {io}", path.display())),
                other => other,
            }),
        }
    }
}
