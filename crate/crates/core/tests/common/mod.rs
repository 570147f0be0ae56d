#![allow(dead_code)]

use std::f64::consts::PI;

use entanglyze::states::{product_state, random_state};
use entanglyze::{
    bell, brs_chain, ghz, is_maximally_entangled, supersinglet_s4, Axis, BellKind, StateVector,
    SupersingletParams,
};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

pub fn supersinglet_samples() -> Vec<SupersingletParams> {
    vec![
        SupersingletParams::from_polar(1.0, 0.0, 0.0).unwrap(),
        SupersingletParams::from_polar(0.0, 0.0, 0.0).unwrap(),
        SupersingletParams::from_polar(0.6, 0.3, -1.1).unwrap(),
        SupersingletParams::from_polar(3f64.sqrt() / 2.0, 0.7, 0.7).unwrap(),
    ]
}

/// Every named reference state, labelled.
pub fn builtin_states() -> Vec<(String, StateVector)> {
    let mut out = Vec::new();
    for n in 2..=5 {
        out.push((format!("ghz:{n}"), ghz(n).unwrap()));
    }
    for n in 2..=7 {
        out.push((format!("brs:{n}"), brs_chain(n, PI).unwrap()));
    }
    out.push(("brs:4:pi/2".into(), brs_chain(4, PI / 2.0).unwrap()));
    for (name, k) in [
        ("bell:psi+", BellKind::EvenPlus),
        ("bell:psi-", BellKind::EvenMinus),
        ("bell:phi+", BellKind::OddPlus),
        ("bell:phi-", BellKind::OddMinus),
    ] {
        out.push((name.into(), bell(k)));
    }
    for (i, p) in supersinglet_samples().into_iter().enumerate() {
        out.push((format!("s4#{i}"), supersinglet_s4(p)));
    }
    out.push((
        "product:x,z,0.6,0,0.8".into(),
        product_state(&[Axis::X, Axis::Z, Axis::new(0.6, 0.0, 0.8).unwrap()]).unwrap(),
    ));
    out.push(("random:3:7".into(), random_state(3, 7).unwrap()));
    out
}

pub fn maximally_entangled_builtins() -> Vec<(String, StateVector)> {
    builtin_states().into_iter().filter(|(_, s)| is_maximally_entangled(s, 1e-8).all).collect()
}

pub fn random_axis(rng: &mut impl Rng) -> Axis {
    loop {
        let v: [f64; 3] =
            [rng.sample(StandardNormal), rng.sample(StandardNormal), rng.sample(StandardNormal)];
        if let Ok(a) = Axis::normalized(v[0], v[1], v[2]) {
            return a;
        }
    }
}

/// Haar-random element of SU(2) as `[[a, -b*], [b, a*]]`.
pub fn random_su2(rng: &mut impl Rng) -> [[Complex64; 2]; 2] {
    let mut q: [f64; 4] = std::array::from_fn(|_| rng.sample(StandardNormal));
    let norm = q.iter().map(|x| x * x).sum::<f64>().sqrt();
    q.iter_mut().for_each(|x| *x /= norm);
    let a = Complex64::new(q[0], q[1]);
    let b = Complex64::new(q[2], q[3]);
    [[a, -b.conj()], [b, a.conj()]]
}

/// Applies an independent random SU(2) to every qubit.
pub fn random_local_unitary(s: &StateVector, rng: &mut impl Rng) -> StateVector {
    let n = s.n_qubits();
    let mut amps = s.amplitudes().to_vec();
    for q in 0..n {
        let u = random_su2(rng);
        let stride = 1usize << (n - 1 - q);
        for chunk in amps.chunks_exact_mut(2 * stride) {
            let (lo, hi) = chunk.split_at_mut(stride);
            for (a0, a1) in lo.iter_mut().zip(hi.iter_mut()) {
                let (x, y) = (*a0, *a1);
                *a0 = u[0][0] * x + u[0][1] * y;
                *a1 = u[1][0] * x + u[1][1] * y;
            }
        }
    }
    StateVector::new(n, amps).unwrap()
}
