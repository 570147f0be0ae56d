//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each and
//! exits non-zero if any fails.

#![allow(clippy::needless_range_loop)]

mod common;

use std::f64::consts::PI;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use entanglyze::measurement::{
    project, sequential_expectation_formula, verify_correlation_transfer, Outcome,
};
use entanglyze::optimize::{mieb_matrix, optimal_axis_set, optimal_breaking_axis, optimal_pair_axes, Mat3};
use entanglyze::oracle::{
    dense_recompute, grid_search_breaking, grid_search_pair, search_disentangling_sequence, Quantity,
};
use entanglyze::states::random_state;
use entanglyze::structure::{persistency_upper_bound, DEFAULT_QUANTIZE_TOL};
use entanglyze::{
    brs_chain, em_element, em_matrix, supersinglet_s4, Axis, PauliFactor, QubitId, SupersingletParams,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::*;

type Verdict = Result<String, String>;
type Criterion = (&'static str, fn() -> Verdict);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn mat_dev(a: &Mat3, b: &Mat3) -> f64 {
    (0..3)
        .flat_map(|i| (0..3).map(move |j| (i, j)))
        .map(|(i, j)| (a[i][j] - b[i][j]).abs())
        .fold(0.0, f64::max)
}

fn diag(a: f64, b: f64, c: f64) -> Mat3 {
    [[a, 0.0, 0.0], [0.0, b, 0.0], [0.0, 0.0, c]]
}

/// `max |ε_μ ε_ν a_μν − b_μν|` minimized over sign vectors.
fn signed_dev(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    entanglyze::report::sign_aligned_dev(a, b)
}

fn within(start: Instant, limit: Duration, what: &str) -> Result<(), String> {
    let t = start.elapsed();
    ensure(t < limit, || format!("{what} took {t:?}, limit {limit:?}"))
}

fn brs_mieb_expected(n: usize, nu: usize) -> Mat3 {
    if nu == 0 || nu == n - 1 {
        diag(1.0, 0.0, 0.0)
    } else if nu == 1 || nu == n - 2 {
        diag(0.0, 0.0, 1.0)
    } else {
        diag(0.0, 0.0, 0.0)
    }
}

fn criterion_1() -> Verdict {
    let start = Instant::now();
    let s = brs_chain(3, PI).map_err(|e| e.to_string())?;
    let mut dev: f64 = 0.0;
    for (nu, want) in [(0, diag(2.0, 0.0, 0.0)), (1, diag(0.0, 0.0, 2.0)), (2, diag(2.0, 0.0, 0.0))] {
        let b = mieb_matrix(&s, QubitId(nu), None).map_err(|e| e.to_string())?;
        dev = dev.max(mat_dev(&b.b, &want));
    }
    let sol = optimal_axis_set(&s).map_err(|e| e.to_string())?;
    let em = em_matrix(&s, &sol.axes).map_err(|e| e.to_string())?;
    let want = vec![vec![1.0, 1.0, -1.0], vec![1.0, 1.0, -1.0], vec![-1.0, -1.0, 1.0]];
    dev = dev.max(signed_dev(&em.g, &want));
    ensure(dev < 1e-10, || format!("max deviation {dev:e}"))?;
    within(start, Duration::from_secs(1), "BRS N=3")?;
    Ok(format!("max deviation {dev:.2e}"))
}

fn criterion_2() -> Verdict {
    let s = brs_chain(4, PI).map_err(|e| e.to_string())?;
    let mut dev: f64 = 0.0;
    for nu in 0..4 {
        let b = mieb_matrix(&s, QubitId(nu), None).map_err(|e| e.to_string())?;
        dev = dev.max(mat_dev(&b.b, &brs_mieb_expected(4, nu)));
    }
    let pb = persistency_upper_bound(&s, None, DEFAULT_QUANTIZE_TOL).map_err(|e| e.to_string())?;
    let want = vec![
        vec![1.0, 1.0, 0.0, 0.0],
        vec![1.0, 1.0, 0.0, 0.0],
        vec![0.0, 0.0, 1.0, -1.0],
        vec![0.0, 0.0, -1.0, 1.0],
    ];
    dev = dev.max(signed_dev(&pb.em.g, &want));
    ensure(dev < 1e-10, || format!("max deviation {dev:e}"))?;
    ensure(pb.n_blocks == 2, || format!("n_blocks = {}", pb.n_blocks))?;
    ensure(pb.partition.blocks == vec![vec![0, 1], vec![2, 3]], || {
        format!("blocks {:?}", pb.partition.blocks)
    })?;
    Ok(format!("max deviation {dev:.2e}, blocks {:?}", pb.partition.blocks))
}

fn criterion_3() -> Verdict {
    let mut slowest = Duration::ZERO;
    for n in 5..=10 {
        let start = Instant::now();
        let s = brs_chain(n, PI).map_err(|e| e.to_string())?;
        for nu in 0..n {
            let b = mieb_matrix(&s, QubitId(nu), None).map_err(|e| e.to_string())?;
            let want = brs_mieb_expected(n, nu);
            let dev = mat_dev(&b.b, &want);
            ensure(dev < 1e-10, || format!("N={n} nu={nu}: MIEB deviation {dev:e}"))?;
        }
        let pb = persistency_upper_bound(&s, None, DEFAULT_QUANTIZE_TOL).map_err(|e| e.to_string())?;
        ensure(pb.bound == Some(n - 2), || format!("N={n}: bound {:?}", pb.bound))?;
        // the block count only bounds the persistency from above
        ensure(n - 2 >= n / 2, || format!("N={n}: N-2 < floor(N/2)"))?;
        let t = start.elapsed();
        slowest = slowest.max(t);
        if n == 10 {
            ensure(t < Duration::from_secs(10), || format!("N=10 took {t:?}"))?;
        }
    }
    let s5 = brs_chain(5, PI).map_err(|e| e.to_string())?;
    let seq = search_disentangling_sequence(&s5, 2).map_err(|e| e.to_string())?;
    let seq = seq.ok_or("no 2-measurement disentangling sequence for N=5")?;
    let qubits: Vec<usize> = seq.iter().map(|(q, _)| q.0).collect();
    Ok(format!("bounds N-2 for N=5..10 (slowest {slowest:?}); N=5 disentangled by measuring {qubits:?}"))
}

fn criterion_4() -> Verdict {
    let mut dev: f64 = 0.0;
    for i in 0..5 {
        for j in 0..5 {
            let abs_a = i as f64 / 4.0;
            let dphi = j as f64 * 2.0 * PI / 5.0 + 0.2;
            let p = SupersingletParams::from_polar(abs_a, -0.4, -0.4 + dphi).map_err(|e| e.to_string())?;
            let s = supersinglet_s4(p);
            let em = em_matrix(&s, &[Axis::X; 4]).map_err(|e| e.to_string())?;
            let (al, be, ga) = p.em_entries();
            let want = [[1.0, al, ga, be], [al, 1.0, be, ga], [ga, be, 1.0, al], [be, ga, al, 1.0]];
            for mu in 0..4 {
                for nu in 0..4 {
                    dev = dev.max((em.g[mu][nu] - want[mu][nu]).abs());
                }
            }
            for nu in 0..4 {
                let b = mieb_matrix(&s, QubitId(nu), None).map_err(|e| e.to_string())?.b;
                let t = (b[0][0] + b[1][1] + b[2][2]) / 3.0;
                dev = dev.max(mat_dev(&b, &diag(t, t, t)));
            }
        }
    }
    ensure(dev < 1e-10, || format!("grid deviation {dev:e}"))?;
    for phi in [0.0, 0.8, -2.3] {
        let p = SupersingletParams::from_polar(3f64.sqrt() / 2.0, phi, phi).map_err(|e| e.to_string())?;
        let s = supersinglet_s4(p);
        let em = em_matrix(&s, &[Axis::X; 4]).map_err(|e| e.to_string())?;
        // c = cos((φa − φb)/2) = 1
        let want = vec![
            vec![1.0, 0.0, -1.0, 0.0],
            vec![0.0, 1.0, 0.0, -1.0],
            vec![-1.0, 0.0, 1.0, 0.0],
            vec![0.0, -1.0, 0.0, 1.0],
        ];
        let d = em.max_abs_diff(&want);
        ensure(d < 1e-10, || format!("special case phi={phi}: deviation {d:e}"))?;
        let pb = persistency_upper_bound(&s, Some(&[Axis::X; 4]), DEFAULT_QUANTIZE_TOL)
            .map_err(|e| e.to_string())?;
        ensure(pb.n_blocks == 2, || format!("special case phi={phi}: {} blocks", pb.n_blocks))?;
        dev = dev.max(d);
    }
    Ok(format!("25 samples + special case, max deviation {dev:.2e}"))
}

fn criterion_5() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst: f64 = 0.0;
    let states = maximally_entangled_builtins();
    for (name, s) in &states {
        let n = s.n_qubits();
        for _ in 0..100 {
            let nu = rng.random_range(0..n);
            let mu = (nu + rng.random_range(1..n)) % n;
            let (m, v) = (random_axis(&mut rng), random_axis(&mut rng));
            let c = verify_correlation_transfer(s, QubitId(nu), m, QubitId(mu), v)
                .map_err(|e| format!("{name}: {e}"))?;
            worst = worst.max(c.residual);
        }
    }
    ensure(worst < 1e-10, || format!("worst residual {worst:e}"))?;
    Ok(format!("{} states x 100 draws, worst residual {worst:.2e}", states.len()))
}

fn criterion_6() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst: f64 = 0.0;
    let states = maximally_entangled_builtins();
    for (name, s) in &states {
        let n = s.n_qubits();
        let mut draws: Vec<(usize, usize, Axis, Axis)> = Vec::new();
        if let Ok(sol) = optimal_axis_set(s) {
            for nu in 0..n {
                for mu in (0..n).filter(|&mu| mu != nu) {
                    draws.push((nu, mu, sol.axes[nu], sol.axes[mu]));
                }
            }
        }
        for _ in 0..50 {
            let nu = rng.random_range(0..n);
            let mu = (nu + rng.random_range(1..n)) % n;
            draws.push((nu, mu, random_axis(&mut rng), random_axis(&mut rng)));
        }
        for (nu, mu, m, v) in draws {
            let g = em_element(s, QubitId(nu), QubitId(mu), m, v).map_err(|e| e.to_string())?;
            let (post, _) = project(s, QubitId(nu), m, Outcome::Plus).map_err(|e| format!("{name}: {e}"))?;
            let g_post = em_element(&post, QubitId(mu), QubitId(mu), v, v).map_err(|e| e.to_string())?;
            worst = worst.max((g_post - (1.0 - g * g)).abs());
        }
    }
    ensure(worst < 1e-10, || format!("worst deviation {worst:e}"))?;
    Ok(format!("{} states, worst deviation {worst:.2e}", states.len()))
}

fn criterion_7() -> Verdict {
    let start = Instant::now();
    let res = 1.0;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut states = builtin_states();
    let seeds = [
        brs_chain(4, PI).unwrap(),
        entanglyze::ghz(4).unwrap(),
        supersinglet_s4(SupersingletParams::from_polar(0.45, 1.0, -0.5).unwrap()),
    ];
    for i in 0..10 {
        let s = random_local_unitary(&seeds[i % seeds.len()], &mut rng);
        ensure(entanglyze::is_maximally_entangled(&s, 1e-8).all, || {
            format!("LU sample {i} lost maximal entanglement")
        })?;
        states.push((format!("lu#{i}"), s));
    }
    let (mut n_pair, mut n_break) = (0, 0);
    let mut worst_gap: f64 = 0.0;
    for (name, s) in &states {
        let n = s.n_qubits();
        for mu in 0..n {
            for nu in mu + 1..n {
                let p = optimal_pair_axes(s, QubitId(mu), QubitId(nu)).map_err(|e| e.to_string())?;
                let g = grid_search_pair(s, QubitId(mu), QubitId(nu), res).map_err(|e| e.to_string())?;
                ensure(g.value <= p.lambda + 1e-9, || {
                    format!("{name} ({mu},{nu}): grid {} > lambda {}", g.value, p.lambda)
                })?;
                ensure(p.lambda - g.value <= 1e-3 * p.lambda + 1e-9, || {
                    format!("{name} ({mu},{nu}): grid {} far below lambda {}", g.value, p.lambda)
                })?;
                worst_gap = worst_gap.max(p.lambda - g.value);
                n_pair += 1;
            }
        }
        if !entanglyze::is_maximally_entangled(s, 1e-8).all || n < 2 {
            continue;
        }
        for nu in 0..n {
            let b = optimal_breaking_axis(s, QubitId(nu), None, true).map_err(|e| e.to_string())?;
            let g = grid_search_breaking(s, QubitId(nu), None, res).map_err(|e| e.to_string())?;
            ensure(g.value <= b.eigenvalue + 1e-9, || {
                format!("{name} nu={nu}: grid {} > eigenvalue {}", g.value, b.eigenvalue)
            })?;
            ensure(b.eigenvalue - g.value <= 1e-3 * b.eigenvalue + 1e-9, || {
                format!("{name} nu={nu}: grid {} far below eigenvalue {}", g.value, b.eigenvalue)
            })?;
            n_break += 1;
        }
    }
    within(start, Duration::from_secs(60), "optimizer-vs-oracle")?;
    Ok(format!(
        "{n_pair} pairs, {n_break} breaking axes at {res} deg, worst shortfall {worst_gap:.2e}, {:?}",
        start.elapsed()
    ))
}

fn criterion_8() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst: f64 = 0.0;
    let mut cases = 0;
    for (name, s) in builtin_states().iter().filter(|(_, s)| s.n_qubits() <= 6) {
        let n = s.n_qubits();
        let axes: Vec<Axis> = (0..n).map(|_| random_axis(&mut rng)).collect();
        for mask in 0usize..1 << n {
            let size = mask.count_ones() as usize;
            if size == 0 || size > 3 || size == n {
                continue;
            }
            let measured: Vec<(QubitId, Axis)> =
                (0..n).filter(|q| mask >> q & 1 == 1).map(|q| (QubitId(q), axes[q])).collect();
            for t in (0..n).filter(|q| mask >> q & 1 == 0) {
                let v = random_axis(&mut rng);
                let target = PauliFactor::new(t, v);
                let mut state = s.clone();
                let mut feasible = true;
                for &(q, a) in &measured {
                    match project(&state, q, a, Outcome::Plus) {
                        Ok((post, _)) => state = post,
                        Err(_) => {
                            feasible = false;
                            break;
                        }
                    }
                }
                let formula = sequential_expectation_formula(s, &measured, target);
                if !feasible {
                    ensure(formula.is_err(), || {
                        format!("{name}: formula defined on a zero-probability branch")
                    })?;
                    continue;
                }
                let explicit = state.expectation(&target).map_err(|e| e.to_string())?;
                let f = formula.map_err(|e| format!("{name}: {e}"))?;
                worst = worst.max((f - explicit).abs());
                cases += 1;
            }
        }
    }
    ensure(worst < 1e-10, || format!("worst deviation {worst:e}"))?;
    Ok(format!("{cases} subset/target cases, worst deviation {worst:.2e}"))
}

fn criterion_9() -> Verdict {
    let mut worst: f64 = 0.0;
    let mut checked = 0;
    for seed in 0..20u64 {
        let n = 2 + (seed as usize % 7);
        let s = random_state(n, seed).map_err(|e| e.to_string())?;
        let mut rng = ChaCha8Rng::seed_from_u64(1000 + seed);
        let axes: Vec<Axis> = (0..n).map(|_| random_axis(&mut rng)).collect();
        let mut cmp = |fast: f64, q: Quantity| -> Result<(), String> {
            let dense = dense_recompute(&s, &q).map_err(|e| e.to_string())?.scalar().ok_or("not a scalar")?;
            worst = worst.max((fast - dense).abs());
            checked += 1;
            Ok(())
        };
        for q in 0..n {
            let f = PauliFactor::new(q, axes[q]);
            cmp(s.expectation(&f).map_err(|e| e.to_string())?, Quantity::Expectation(f))?;
        }
        for k in 2..=n.min(4) {
            let qubits: std::collections::BTreeSet<usize> =
                (0..k).map(|i| (i * 3 + seed as usize) % n).collect();
            let fs: Vec<PauliFactor> = qubits.into_iter().map(|q| PauliFactor::new(q, axes[q])).collect();
            cmp(s.correlator(&fs).map_err(|e| e.to_string())?, Quantity::Correlator(fs))?;
        }
        let em = em_matrix(&s, &axes).map_err(|e| e.to_string())?;
        for mu in 0..n {
            for nu in 0..n {
                cmp(
                    em.g[mu][nu],
                    Quantity::EmElement { mu: QubitId(mu), nu: QubitId(nu), v_mu: axes[mu], v_nu: axes[nu] },
                )?;
            }
        }
        for nu in 0..n {
            let fast = mieb_matrix(&s, QubitId(nu), None).map_err(|e| e.to_string())?.b;
            let dense = dense_recompute(&s, &Quantity::Mieb { nu: QubitId(nu), targets: None })
                .map_err(|e| e.to_string())?
                .matrix()
                .ok_or("not a matrix")?;
            worst = worst.max(mat_dev(&fast, &dense));
            checked += 9;
        }
    }
    ensure(worst < 1e-10, || format!("worst deviation {worst:e}"))?;
    Ok(format!("{checked} entries over 20 seeds, worst deviation {worst:.2e}"))
}

fn criterion_10() -> Verdict {
    let start = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_entanglyze"))
        .args(["--json", "reproduce-paper"])
        .output()
        .map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    ensure(out.status.success(), || format!("exit status {:?}", out.status.code()))?;
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).map_err(|e| e.to_string())?;
    let dev = v["max_abs_dev"].as_f64().ok_or("missing max_abs_dev")?;
    let n = v["checks"].as_array().map_or(0, |c| c.len());
    ensure(dev < 1e-9, || format!("max deviation {dev:e}"))?;
    ensure(elapsed < Duration::from_secs(30), || format!("took {elapsed:?}"))?;
    Ok(format!("{n} checks, max deviation {dev:.2e}, {elapsed:?}"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("BRS N=3 MIEB and EM", criterion_1),
        ("BRS N=4 MIEB, EM and blocks", criterion_2),
        ("BRS N=5..10 interior MIEB and N-2 blocks", criterion_3),
        ("supersinglet EM formulas and isotropic MIEB", criterion_4),
        ("post-measurement expectation equals correlator", criterion_5),
        ("post-measurement diagonal EM entries", criterion_6),
        ("optimizers versus sphere-grid oracle", criterion_7),
        ("sequential formula versus projector chain", criterion_8),
        ("fast kernels versus dense recomputation", criterion_9),
        ("reproduce-paper command", criterion_10),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        match std::panic::catch_unwind(f) {
            Ok(Ok(detail)) => println!("criterion {:>2} PASS  {name}: {detail}", i + 1),
            Ok(Err(why)) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {why}", i + 1);
            }
            Err(_) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: panicked", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
