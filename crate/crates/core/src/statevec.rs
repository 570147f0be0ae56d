//! Dense pure states over `N` qubits and the Pauli-observable algebra on them.
//!
//! Amplitude index `i` encodes the basis ket `|q₀q₁…q_{N−1}⟩` with qubit 0 as
//! the most significant bit, so `|0011⟩` is index 3 for four qubits.

use std::fmt::Write as _;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on `Σ|a_i|² = 1` for a constructed state.
pub const NORM_TOL: f64 = 1e-10;
/// Largest imaginary part tolerated on the raw inner product of a Hermitian
/// observable.
pub const IMAG_TOL: f64 = 1e-10;
/// Tolerance on `|v| = 1` for an [`Axis`].
pub const AXIS_TOL: f64 = 1e-12;

/// Index of a qubit inside a state.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct QubitId(pub usize);

impl From<usize> for QubitId {
    fn from(value: usize) -> Self {
        QubitId(value)
    }
}

impl std::fmt::Display for QubitId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A measurement direction on the Bloch sphere.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 3]", into = "[f64; 3]")]
pub struct Axis {
    x: f64,
    y: f64,
    z: f64,
}

impl std::ops::Neg for Axis {
    type Output = Axis;

    fn neg(self) -> Axis {
        Axis { x: -self.x, y: -self.y, z: -self.z }
    }
}

impl Axis {
    pub const X: Axis = Axis { x: 1.0, y: 0.0, z: 0.0 };
    pub const Y: Axis = Axis { x: 0.0, y: 1.0, z: 0.0 };
    pub const Z: Axis = Axis { x: 0.0, y: 0.0, z: 1.0 };

    /// Builds an axis from direction cosines that must already be unit length.
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        let n2 = x * x + y * y + z * z;
        if !n2.is_finite() || (n2 - 1.0).abs() > AXIS_TOL {
            return Err(Error::InvalidAxis(x, y, z));
        }
        Ok(Axis { x, y, z })
    }

    /// Builds an axis pointing along `(x, y, z)`, rescaling to unit length.
    pub fn normalized(x: f64, y: f64, z: f64) -> Result<Self> {
        let n = (x * x + y * y + z * z).sqrt();
        if !n.is_finite() || n < 1e-300 {
            return Err(Error::InvalidAxis(x, y, z));
        }
        Ok(Axis { x: x / n, y: y / n, z: z / n })
    }

    /// Unit vector along Pauli index `i` (0 = x, 1 = y, 2 = z).
    pub fn basis(i: usize) -> Axis {
        [Axis::X, Axis::Y, Axis::Z][i]
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn y(&self) -> f64 {
        self.y
    }

    pub fn z(&self) -> f64 {
        self.z
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn dot(&self, other: &Axis) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    /// Parses `x`, `y`, `z` (optionally signed, e.g. `-z`) or a comma-separated
    /// triple, which is normalized.
    pub fn parse(text: &str) -> Result<Self> {
        let t = text.trim();
        let (sign, name) = match t.strip_prefix('-') {
            Some(rest) if !rest.contains(',') => (-1.0, rest),
            _ => (1.0, t.strip_prefix('+').unwrap_or(t)),
        };
        let named = match name {
            "x" | "X" => Some(Axis::X),
            "y" | "Y" => Some(Axis::Y),
            "z" | "Z" => Some(Axis::Z),
            _ => None,
        };
        if let Some(a) = named {
            return Ok(if sign < 0.0 { -a } else { a });
        }
        let parts: Vec<f64> = t
            .split(',')
            .map(|p| p.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| Error::Parse(format!("invalid axis `{text}`")))?;
        if parts.len() != 3 {
            return Err(Error::Parse(format!("axis `{text}` needs three components")));
        }
        Axis::normalized(parts[0], parts[1], parts[2])
            .map_err(|_| Error::Parse(format!("axis `{text}` has zero length")))
    }

    /// Parses a whitespace- or semicolon-separated list of axes.
    pub fn parse_list(text: &str) -> Result<Vec<Self>> {
        text.split(|c: char| c.is_whitespace() || c == ';')
            .filter(|s| !s.is_empty())
            .map(Axis::parse)
            .collect()
    }
}

impl TryFrom<[f64; 3]> for Axis {
    type Error = Error;

    fn try_from(v: [f64; 3]) -> Result<Self> {
        Axis::new(v[0], v[1], v[2])
    }
}

impl From<Axis> for [f64; 3] {
    fn from(a: Axis) -> Self {
        a.to_array()
    }
}

/// The observable `σ_v` acting on one qubit.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PauliFactor {
    pub qubit: QubitId,
    pub axis: Axis,
}

impl PauliFactor {
    pub fn new(qubit: impl Into<QubitId>, axis: Axis) -> Self {
        PauliFactor { qubit: qubit.into(), axis }
    }
}

/// Normalized pure state of `n_qubits` qubits. Immutable once built.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    /// Builds a state from raw amplitudes, dividing by their norm.
    pub fn new(n_qubits: usize, amplitudes: Vec<Complex64>) -> Result<Self> {
        check_len(n_qubits, amplitudes.len())?;
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm.is_nan() || norm <= 0.0 || !norm.is_finite() {
            return Err(Error::ZeroNorm);
        }
        let amplitudes = amplitudes.into_iter().map(|a| a / norm).collect();
        Ok(StateVector { n_qubits, amplitudes })
    }

    /// Wraps amplitudes that are already normalized to working precision.
    pub(crate) fn from_normalized(n_qubits: usize, amplitudes: Vec<Complex64>) -> Self {
        debug_assert_eq!(amplitudes.len(), 1 << n_qubits);
        StateVector { n_qubits, amplitudes }
    }

    /// Basis state `|bits⟩` where `bits` is read with qubit 0 as the MSB.
    pub fn basis(n_qubits: usize, index: usize) -> Result<Self> {
        check_len(n_qubits, 1 << n_qubits)?;
        let dim = 1usize << n_qubits;
        if index >= dim {
            return Err(Error::LengthMismatch { expected: dim, got: index + 1 });
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); dim];
        amps[index] = Complex64::new(1.0, 0.0);
        Ok(StateVector { n_qubits, amplitudes: amps })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Complex64 {
        inner(&self.amplitudes, &other.amplitudes)
    }

    /// Distance to `other` after removing the best global phase.
    pub fn distance_up_to_phase(&self, other: &StateVector) -> f64 {
        let ov = self.inner(other);
        let phase = if ov.norm() > 0.0 { ov / ov.norm() } else { Complex64::new(1.0, 0.0) };
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| (a * phase - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn check_qubit(&self, q: QubitId) -> Result<()> {
        if q.0 >= self.n_qubits {
            return Err(Error::QubitOutOfRange { qubit: q.0, n_qubits: self.n_qubits });
        }
        Ok(())
    }

    /// `σ_v^μ|s⟩` as a new state.
    pub fn apply_pauli(&self, f: &PauliFactor) -> Result<StateVector> {
        self.check_qubit(f.qubit)?;
        let mut out = self.amplitudes.clone();
        pauli_kernel(&mut out, self.n_qubits, f.qubit.0, &f.axis);
        Ok(StateVector { n_qubits: self.n_qubits, amplitudes: out })
    }

    /// `⟨s|σ_v^μ|s⟩`.
    pub fn expectation(&self, f: &PauliFactor) -> Result<f64> {
        let t = self.apply_pauli(f)?;
        real_part(self.inner(&t))
    }

    /// `⟨s|∏ σ_{v_k}^{μ_k}|s⟩` over distinct qubits.
    pub fn correlator(&self, factors: &[PauliFactor]) -> Result<f64> {
        if factors.is_empty() {
            return Err(Error::EmptyFactors);
        }
        self.check_distinct(factors.iter().map(|f| f.qubit))?;
        real_part(self.inner(&self.apply_product(factors)))
    }

    /// Like [`correlator`](Self::correlator) but an empty list gives `⟨s|s⟩ = 1`.
    pub(crate) fn product_expectation(&self, factors: &[PauliFactor]) -> Result<f64> {
        if factors.is_empty() {
            return Ok(1.0);
        }
        self.correlator(factors)
    }

    /// Applies each factor in turn. Qubits must already be validated.
    pub(crate) fn apply_product(&self, factors: &[PauliFactor]) -> StateVector {
        let mut out = self.amplitudes.clone();
        for f in factors {
            pauli_kernel(&mut out, self.n_qubits, f.qubit.0, &f.axis);
        }
        StateVector { n_qubits: self.n_qubits, amplitudes: out }
    }

    pub(crate) fn check_distinct(&self, qubits: impl IntoIterator<Item = QubitId>) -> Result<()> {
        let mut seen = vec![false; self.n_qubits];
        for q in qubits {
            self.check_qubit(q)?;
            if std::mem::replace(&mut seen[q.0], true) {
                return Err(Error::DuplicateQubit(q.0));
            }
        }
        Ok(())
    }

    /// `(⟨σ_x⟩, ⟨σ_y⟩, ⟨σ_z⟩)` of qubit `q`, from a single pass over amplitude pairs.
    pub fn bloch_vector(&self, q: QubitId) -> Result<[f64; 3]> {
        self.check_qubit(q)?;
        Ok(bloch_pass(&self.amplitudes, self.n_qubits, q.0))
    }

    /// Reads the JSON state file format. Amplitudes already normalized to
    /// within 1e-14 are kept bit-for-bit so that dumps round-trip exactly.
    pub fn from_json_str(text: &str) -> Result<Self> {
        let file: StateFile = serde_json::from_str(text)?;
        let amps: Vec<Complex64> = file.amplitudes.iter().map(|[re, im]| Complex64::new(*re, *im)).collect();
        check_len(file.n_qubits, amps.len())?;
        let n2: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if (n2 - 1.0).abs() <= 1e-14 {
            Ok(StateVector { n_qubits: file.n_qubits, amplitudes: amps })
        } else {
            StateVector::new(file.n_qubits, amps)
        }
    }

    pub fn read_json(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json_str(&text)
    }

    /// Writes `{"n_qubits": N, "amplitudes": [[re, im], ...]}` with 17
    /// significant digits per component.
    pub fn to_json_string(&self) -> String {
        let mut out = String::new();
        let _ = write!(out, "{{\"n_qubits\": {}, \"amplitudes\": [", self.n_qubits);
        for (i, a) in self.amplitudes.iter().enumerate() {
            if i > 0 {
                out.push_str(", ");
            }
            let _ = write!(out, "[{:.16e}, {:.16e}]", a.re, a.im);
        }
        out.push_str("]}\n");
        out
    }

    pub fn write_json(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json_string())?;
        Ok(())
    }
}

#[derive(Deserialize)]
struct StateFile {
    n_qubits: usize,
    amplitudes: Vec<[f64; 2]>,
}

fn check_len(n_qubits: usize, len: usize) -> Result<()> {
    if n_qubits == 0 {
        return Err(Error::BadSize { got: 0, min: 1 });
    }
    if n_qubits >= usize::BITS as usize - 1 {
        return Err(Error::TooLarge { n_qubits, max: usize::BITS as usize - 2 });
    }
    let expected = 1usize << n_qubits;
    if len != expected {
        return Err(Error::LengthMismatch { expected, got: len });
    }
    Ok(())
}

fn real_part(z: Complex64) -> Result<f64> {
    if z.im.abs() > IMAG_TOL {
        return Err(Error::ImaginaryResidue(z.im));
    }
    Ok(z.re)
}

pub(crate) fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// In-place `σ_v` on qubit `q`. Amplitudes come in blocks of `2·stride`
/// whose first half has the qubit's bit clear.
pub(crate) fn pauli_kernel(amps: &mut [Complex64], n_qubits: usize, q: usize, v: &Axis) {
    let stride = 1usize << (n_qubits - 1 - q);
    let z = v.z;
    // ⟨0|σ_v|1⟩ and ⟨1|σ_v|0⟩
    let up = Complex64::new(v.x, -v.y);
    let down = Complex64::new(v.x, v.y);
    for block in amps.chunks_exact_mut(2 * stride) {
        let (lo, hi) = block.split_at_mut(stride);
        for (a0, a1) in lo.iter_mut().zip(hi.iter_mut()) {
            let (b0, b1) = (*a0, *a1);
            *a0 = b0 * z + up * b1;
            *a1 = down * b0 - b1 * z;
        }
    }
}

pub(crate) fn bloch_pass(amps: &[Complex64], n_qubits: usize, q: usize) -> [f64; 3] {
    let stride = 1usize << (n_qubits - 1 - q);
    let mut cross = Complex64::new(0.0, 0.0);
    let mut zsum = 0.0;
    for block in amps.chunks_exact(2 * stride) {
        let (lo, hi) = block.split_at(stride);
        for (a0, a1) in lo.iter().zip(hi) {
            cross += a0.conj() * a1;
            zsum += a0.norm_sqr() - a1.norm_sqr();
        }
    }
    [2.0 * cross.re, 2.0 * cross.im, zsum]
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn ghz3() -> StateVector {
        let mut a = vec![c(0.0); 8];
        a[0] = c(1.0);
        a[7] = c(1.0);
        StateVector::new(3, a).unwrap()
    }

    fn singlet() -> StateVector {
        StateVector::new(2, vec![c(0.0), c(1.0), c(-1.0), c(0.0)]).unwrap()
    }

    #[test]
    fn make_state_normalizes() {
        let s = StateVector::new(1, vec![c(1.0), c(0.0)]).unwrap();
        assert_eq!(s.amplitudes(), &[c(1.0), c(0.0)]);
        let bell = StateVector::new(2, vec![c(1.0), c(0.0), c(0.0), c(1.0)]).unwrap();
        assert!((bell.amplitudes()[0].re - FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((bell.norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn make_state_errors() {
        assert!(matches!(StateVector::new(2, vec![c(0.0); 4]), Err(Error::ZeroNorm)));
        assert!(matches!(
            StateVector::new(2, vec![c(1.0); 3]),
            Err(Error::LengthMismatch { expected: 4, got: 3 })
        ));
    }

    #[test]
    fn pauli_actions() {
        let zero = StateVector::basis(1, 0).unwrap();
        let z = zero.apply_pauli(&PauliFactor::new(0, Axis::Z)).unwrap();
        assert_eq!(z.amplitudes(), zero.amplitudes());
        let x = zero.apply_pauli(&PauliFactor::new(0, Axis::X)).unwrap();
        assert_eq!(x.amplitudes(), &[c(0.0), c(1.0)]);

        // σ_v = [[z, x−iy], [x+iy, −z]] with v = (1, 0, 1)/√2 on |0⟩ gives
        // the first column (z, x) = (1/√2, 1/√2).
        let v = Axis::normalized(1.0, 0.0, 1.0).unwrap();
        let out = zero.apply_pauli(&PauliFactor::new(0, v)).unwrap();
        assert!((out.amplitudes()[0] - c(FRAC_1_SQRT_2)).norm() < 1e-15);
        assert!((out.amplitudes()[1] - c(FRAC_1_SQRT_2)).norm() < 1e-15);

        assert!(matches!(
            zero.apply_pauli(&PauliFactor::new(1, Axis::X)),
            Err(Error::QubitOutOfRange { qubit: 1, n_qubits: 1 })
        ));
    }

    #[test]
    fn expectations() {
        let zero = StateVector::basis(1, 0).unwrap();
        assert_eq!(zero.expectation(&PauliFactor::new(0, Axis::Z)).unwrap(), 1.0);
        let g = ghz3();
        for q in 0..3 {
            for v in [Axis::X, Axis::Y, Axis::Z, Axis::normalized(0.3, -0.2, 0.9).unwrap()] {
                assert!(g.expectation(&PauliFactor::new(q, v)).unwrap().abs() < 1e-15);
            }
        }
        assert!(singlet().expectation(&PauliFactor::new(0, Axis::Z)).unwrap().abs() < 1e-15);
    }

    #[test]
    fn correlators() {
        let s = singlet();
        let xx = [PauliFactor::new(0, Axis::X), PauliFactor::new(1, Axis::X)];
        assert!((s.correlator(&xx).unwrap() + 1.0).abs() < 1e-15);
        let xxx: Vec<_> = (0..3).map(|q| PauliFactor::new(q, Axis::X)).collect();
        assert!((ghz3().correlator(&xxx).unwrap() - 1.0).abs() < 1e-15);
        assert!(matches!(s.correlator(&[]), Err(Error::EmptyFactors)));
        let dup = [PauliFactor::new(0, Axis::X), PauliFactor::new(0, Axis::Z)];
        assert!(matches!(s.correlator(&dup), Err(Error::DuplicateQubit(0))));
    }

    #[test]
    fn bloch_vectors() {
        let zero = StateVector::basis(1, 0).unwrap();
        assert_eq!(zero.bloch_vector(QubitId(0)).unwrap(), [0.0, 0.0, 1.0]);
        let plus = StateVector::new(1, vec![c(1.0), c(1.0)]).unwrap();
        let b = plus.bloch_vector(QubitId(0)).unwrap();
        assert!((b[0] - 1.0).abs() < 1e-15 && b[1].abs() < 1e-15 && b[2].abs() < 1e-15);
        for q in 0..3 {
            assert_eq!(ghz3().bloch_vector(QubitId(q)).unwrap(), [0.0, 0.0, 0.0]);
        }
    }

    #[test]
    fn imaginary_residue_is_an_error() {
        assert!(matches!(real_part(Complex64::new(0.5, 1e-6)), Err(Error::ImaginaryResidue(_))));
        assert_eq!(real_part(Complex64::new(0.5, 1e-12)).unwrap(), 0.5);
    }

    #[test]
    fn axis_parsing() {
        assert_eq!(Axis::parse("x").unwrap(), Axis::X);
        assert_eq!(Axis::parse("-z").unwrap(), -Axis::Z);
        let a = Axis::parse("0.5,0.5,0.707").unwrap();
        assert!((a.dot(&a) - 1.0).abs() < 1e-15);
        assert!(Axis::parse("0,0,0").is_err());
        assert!(Axis::parse("1,2").is_err());
        assert!(Axis::new(1.0, 1.0, 0.0).is_err());
        assert_eq!(Axis::parse_list("x z;y").unwrap(), vec![Axis::X, Axis::Z, Axis::Y]);
    }

    #[test]
    fn json_round_trip_is_exact() {
        let g = ghz3();
        let text = g.to_json_string();
        let back = StateVector::from_json_str(&text).unwrap();
        assert_eq!(back, g);
        let unnormalized = r#"{"n_qubits": 1, "amplitudes": [[3, 0], [0, 4]]}"#;
        let s = StateVector::from_json_str(unnormalized).unwrap();
        assert!((s.amplitudes()[1].im - 0.8).abs() < 1e-15);
        let wrong = r#"{"n_qubits": 2, "amplitudes": [[1, 0]]}"#;
        assert!(matches!(StateVector::from_json_str(wrong), Err(Error::LengthMismatch { .. })));
    }
}
