use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use entanglyze::measurement::{measure_sequence_with, Outcome};
use entanglyze::optimize::{optimal_axis_set, optimal_breaking_axis, optimal_pair_axes};
use entanglyze::report::{analyze, reproduce_reference, solution_flags, AxisChoice};
use entanglyze::structure::{persistency_upper_bound, DEFAULT_QUANTIZE_TOL};
use entanglyze::{ed_all, Axis, Error, QubitId, StateSpec, StateVector};

#[derive(Parser)]
#[command(name = "entanglyze", version, about = "Entanglement structure of multi-qubit pure states")]
struct Cli {
    /// Emit machine-readable JSON at full precision.
    #[arg(long, global = true)]
    json: bool,
    /// Quantization tolerance for EM entries.
    #[arg(long, global = true, default_value_t = DEFAULT_QUANTIZE_TOL)]
    tol: f64,
    /// Cross-check results with the brute-force oracles.
    #[arg(long, global = true)]
    verify: bool,
    /// Sphere grid resolution in degrees for --verify.
    #[arg(long, global = true, default_value_t = 1.0)]
    res: f64,
    /// Seed for `random:N` states without an explicit seed.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Per-qubit entanglement, EM and block structure.
    Analyze {
        #[arg(long)]
        state: String,
        /// Axis list, e.g. "x z -x 0.6,0.8,0".
        #[arg(long, conflicts_with = "axis_set")]
        axes: Option<String>,
        /// Use the optimal axis set.
        #[arg(long)]
        axis_set: bool,
    },
    /// Apply projective measurements in sequence.
    Measure {
        #[arg(long)]
        state: String,
        /// Steps as QUBIT:AXIS, e.g. "0:x 3:0.5,0.5,0.7071".
        #[arg(long, default_value = "")]
        seq: String,
        #[arg(long, default_value_t = 1, allow_negative_numbers = true)]
        outcome: i32,
    },
    /// Optimal measurement axes.
    Optimize {
        #[arg(long)]
        state: String,
        #[arg(long, num_args = 2, value_names = ["MU", "NU"], conflicts_with_all = ["mieb", "axis_set"])]
        pair: Option<Vec<usize>>,
        #[arg(long, conflicts_with = "axis_set")]
        mieb: Option<usize>,
        /// Comma-separated target qubits for --mieb.
        #[arg(long, requires = "mieb")]
        targets: Option<String>,
        #[arg(long)]
        axis_set: bool,
    },
    /// Block partition and persistency bound.
    Blocks {
        #[arg(long)]
        state: String,
        #[arg(long)]
        axes: Option<String>,
    },
    /// Recompute the closed-form BRS and supersinglet results.
    #[command(name = "reproduce-paper")]
    ReproduceReference,
    /// Write a state as JSON.
    DumpState {
        #[arg(long)]
        state: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

enum Failure {
    Lib(Error),
    Mismatch(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

type CmdResult = Result<(), Failure>;

fn main() -> ExitCode {
    entanglyze::configure_threads();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_input_error() { 2 } else { 3 })
        }
        Err(Failure::Mismatch(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

fn load(cli: &Cli, spec: &str) -> Result<StateVector, Error> {
    spec.parse::<StateSpec>()?.build(cli.seed)
}

fn parse_axes(s: &StateVector, list: &str) -> Result<Vec<Axis>, Error> {
    let axes = Axis::parse_list(list)?;
    if axes.len() != s.n_qubits() {
        return Err(Error::Parse(format!("expected {} axes, got {}", s.n_qubits(), axes.len())));
    }
    Ok(axes)
}

fn parse_qubits(list: &str) -> Result<Vec<QubitId>, Error> {
    list.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<usize>().map(QubitId).map_err(|_| Error::Parse(format!("bad qubit index `{t}`"))))
        .collect()
}

fn parse_seq(list: &str) -> Result<Vec<(QubitId, Axis)>, Error> {
    list.split_whitespace()
        .map(|step| {
            let (q, a) = step
                .split_once(':')
                .ok_or_else(|| Error::Parse(format!("step `{step}` is not QUBIT:AXIS")))?;
            let q = q
                .trim_start_matches('q')
                .parse::<usize>()
                .map_err(|_| Error::Parse(format!("bad qubit in `{step}`")))?;
            Ok((QubitId(q), Axis::parse(a)?))
        })
        .collect()
}

fn print_json<T: Serialize>(v: &T) -> CmdResult {
    let text = serde_json::to_string_pretty(v).map_err(Error::from)?;
    println!("{text}");
    Ok(())
}

/// Six significant digits.
fn sig(x: f64) -> String {
    if x.abs() < 1e-12 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let mag = x.abs().log10().floor() as i32;
    if !(-4..6).contains(&mag) {
        return format!("{x:.5e}");
    }
    let decimals = (5 - mag).clamp(0, 12) as usize;
    let s = format!("{x:.decimals$}");
    let s = if s.contains('.') { s.trim_end_matches('0').trim_end_matches('.').to_string() } else { s };
    if s == "-0" {
        "0".into()
    } else {
        s
    }
}

fn vec3(v: &[f64; 3]) -> String {
    format!("({}, {}, {})", sig(v[0]), sig(v[1]), sig(v[2]))
}

fn axis_str(a: &Axis) -> String {
    vec3(&a.to_array())
}

fn print_matrix<R: AsRef<[f64]>>(rows: &[R]) {
    let cells: Vec<Vec<String>> = rows.iter().map(|r| r.as_ref().iter().map(|&x| sig(x)).collect()).collect();
    let w = cells.iter().flatten().map(|c| c.len()).max().unwrap_or(1);
    for r in cells {
        let line: Vec<String> = r.iter().map(|c| format!("{c:>w$}")).collect();
        println!("  [{}]", line.join("  "));
    }
}

fn print_flags(flags: &[String]) {
    for f in flags {
        println!("warning: {f}");
    }
}

fn run(cli: &Cli) -> CmdResult {
    match &cli.cmd {
        Cmd::Analyze { state, axes, axis_set } => cmd_analyze(cli, state, axes.as_deref(), *axis_set),
        Cmd::Measure { state, seq, outcome } => cmd_measure(cli, state, seq, *outcome),
        Cmd::Optimize { state, pair, mieb, targets, axis_set } => {
            let s = load(cli, state)?;
            if let Some(p) = pair {
                cmd_pair(cli, &s, p[0], p[1])
            } else if let Some(nu) = mieb {
                let t = targets.as_deref().map(parse_qubits).transpose()?;
                cmd_mieb(cli, &s, *nu, t)
            } else if *axis_set {
                cmd_axis_set(cli, &s)
            } else {
                Err(Error::Parse("optimize needs one of --pair, --mieb, --axis-set".into()).into())
            }
        }
        Cmd::Blocks { state, axes } => cmd_blocks(cli, state, axes.as_deref()),
        Cmd::ReproduceReference => cmd_reproduce(cli),
        Cmd::DumpState { state, out } => {
            let s = load(cli, state)?;
            match out {
                Some(path) => s.write_json(path)?,
                None => {
                    let mut stdout = std::io::stdout().lock();
                    writeln!(stdout, "{}", s.to_json_string()).map_err(Error::from)?;
                }
            }
            Ok(())
        }
    }
}

fn cmd_analyze(cli: &Cli, spec: &str, axes: Option<&str>, axis_set: bool) -> CmdResult {
    let s = load(cli, spec)?;
    let choice = match axes {
        Some(list) => AxisChoice::Given(parse_axes(&s, list)?),
        None if axis_set => AxisChoice::Optimal,
        None => AxisChoice::None,
    };
    let r = analyze(&s, spec, &choice, cli.tol)?;
    if cli.json {
        return print_json(&r);
    }
    println!("state {}  ({} qubits)", r.state, r.n_qubits);
    println!("{:>5}  {:>10}  {:<32}  MIEB spectrum", "qubit", "ED", "Bloch");
    for q in 0..r.n_qubits {
        let spec = r.mieb_spectra.get(q).map(vec3).unwrap_or_default();
        println!("{q:>5}  {:>10}  {:<32}  {spec}", sig(r.ed[q]), vec3(&r.bloch[q]));
    }
    println!("total entanglement {}", sig(r.total_entanglement));
    if let (Some(axes), Some(em)) = (&r.axes, &r.em) {
        println!("axes:");
        for (q, a) in axes.iter().enumerate() {
            println!("  {q}: {}", axis_str(a));
        }
        println!("EM:");
        print_matrix(em);
        println!("blocks {:?}", r.blocks.as_ref().unwrap_or(&vec![]));
        match r.persistency_bound {
            Some(b) => println!("persistency bound {b}"),
            None => println!("persistency bound n/a ({} blocks)", r.n_blocks.unwrap_or(0)),
        }
    }
    print_flags(&r.flags);
    Ok(())
}

fn cmd_measure(cli: &Cli, spec: &str, seq: &str, outcome: i32) -> CmdResult {
    let s = load(cli, spec)?;
    let steps = parse_seq(seq)?;
    let outcome = Outcome::from_sign(outcome)?;
    let (post, records) = measure_sequence_with(&s, &steps, outcome)?;
    let ed = ed_all(&post);
    let total: f64 = ed.iter().sum();
    let bloch: Vec<[f64; 3]> =
        (0..post.n_qubits()).map(|q| post.bloch_vector(QubitId(q))).collect::<Result<_, _>>()?;
    if cli.json {
        return print_json(&json!({
            "schema_version": entanglyze::report::SCHEMA_VERSION,
            "state": spec,
            "records": records,
            "ed": ed,
            "bloch": bloch,
            "total_entanglement": total,
            "post_state": serde_json::from_str::<serde_json::Value>(&post.to_json_string()).map_err(Error::from)?,
        }));
    }
    for (i, r) in records.iter().enumerate() {
        println!(
            "step {i}: qubit {} axis {} outcome {} probability {}",
            r.qubit,
            axis_str(&r.axis),
            r.outcome.sign(),
            sig(r.probability)
        );
    }
    println!("{:>5}  {:>10}  {:<32}  |b|", "qubit", "ED", "Bloch");
    for (q, (e, b)) in ed.iter().zip(&bloch).enumerate() {
        let norm = b.iter().map(|x| x * x).sum::<f64>().sqrt();
        println!("{q:>5}  {:>10}  {:<32}  {}", sig(*e), vec3(b), sig(norm));
    }
    println!("total entanglement {}", sig(total));
    Ok(())
}

fn cmd_pair(cli: &Cli, s: &StateVector, mu: usize, nu: usize) -> CmdResult {
    let p = optimal_pair_axes(s, QubitId(mu), QubitId(nu))?;
    let grid = verify_pair(cli, s, mu, nu, p.lambda)?;
    if cli.json {
        return print_json(&json!({
            "schema_version": entanglyze::report::SCHEMA_VERSION,
            "mu": mu, "nu": nu,
            "v_mu": p.v_mu, "v_nu": p.v_nu,
            "lambda": p.lambda,
            "degeneracy": p.degeneracy,
            "correlation": p.corr.c,
            "verify": grid,
        }));
    }
    println!("pair ({mu}, {nu})");
    println!("  v_mu {}", axis_str(&p.v_mu));
    println!("  v_nu {}", axis_str(&p.v_nu));
    println!("  lambda {}  (degeneracy {})", sig(p.lambda), p.degeneracy);
    if let Some(g) = grid {
        println!("  grid max {} at res {}°", sig(g["value"].as_f64().unwrap_or(f64::NAN)), cli.res);
    }
    Ok(())
}

#[cfg(feature = "oracle")]
fn verify_pair(
    cli: &Cli,
    s: &StateVector,
    mu: usize,
    nu: usize,
    lambda: f64,
) -> Result<Option<serde_json::Value>, Failure> {
    if !cli.verify {
        return Ok(None);
    }
    let g = entanglyze::oracle::grid_search_pair(s, QubitId(mu), QubitId(nu), cli.res)?;
    if g.value > lambda + 1e-9 {
        return Err(Failure::Mismatch(format!("grid value {} exceeds lambda {}", g.value, lambda)));
    }
    Ok(Some(json!({"value": g.value, "v_mu": g.v_mu, "v_nu": g.v_nu, "resolution_deg": cli.res})))
}

#[cfg(not(feature = "oracle"))]
fn verify_pair(
    cli: &Cli,
    _: &StateVector,
    _: usize,
    _: usize,
    _: f64,
) -> Result<Option<serde_json::Value>, Failure> {
    if cli.verify {
        return Err(Error::Parse("built without the oracle feature".into()).into());
    }
    Ok(None)
}

#[cfg(feature = "oracle")]
fn verify_breaking(
    cli: &Cli,
    s: &StateVector,
    nu: usize,
    targets: Option<&[QubitId]>,
    eigenvalue: f64,
) -> Result<Option<serde_json::Value>, Failure> {
    if !cli.verify {
        return Ok(None);
    }
    let g = entanglyze::oracle::grid_search_breaking(s, QubitId(nu), targets, cli.res)?;
    if g.value > eigenvalue + 1e-9 {
        return Err(Failure::Mismatch(format!(
            "grid breaking {} at qubit {nu} exceeds eigenvalue {eigenvalue}",
            g.value
        )));
    }
    Ok(Some(json!({"value": g.value, "axis": g.axis, "resolution_deg": cli.res})))
}

#[cfg(not(feature = "oracle"))]
fn verify_breaking(
    cli: &Cli,
    _: &StateVector,
    _: usize,
    _: Option<&[QubitId]>,
    _: f64,
) -> Result<Option<serde_json::Value>, Failure> {
    if cli.verify {
        return Err(Error::Parse("built without the oracle feature".into()).into());
    }
    Ok(None)
}

fn cmd_mieb(cli: &Cli, s: &StateVector, nu: usize, targets: Option<Vec<QubitId>>) -> CmdResult {
    let b = optimal_breaking_axis(s, QubitId(nu), targets.as_deref(), false)?;
    let grid = if b.maximally_entangled {
        verify_breaking(cli, s, nu, targets.as_deref(), b.eigenvalue)?
    } else {
        None
    };
    if cli.json {
        return print_json(&json!({
            "schema_version": entanglyze::report::SCHEMA_VERSION,
            "nu": nu,
            "targets": b.mieb.targets,
            "mieb": b.mieb.b,
            "spectrum": b.spectrum,
            "eigenvectors": b.eigenvectors,
            "axis": b.axis,
            "eigenvalue": b.eigenvalue,
            "degeneracy": b.degeneracy,
            "no_first_order_breaking": b.no_first_order_breaking,
            "maximally_entangled": b.maximally_entangled,
            "verify": grid,
        }));
    }
    println!("MIEB matrix of qubit {nu}:");
    print_matrix(&b.mieb.b);
    println!("spectrum {}", vec3(&b.spectrum));
    println!("axis {}  eigenvalue {}  degeneracy {}", axis_str(&b.axis), sig(b.eigenvalue), b.degeneracy);
    if b.no_first_order_breaking {
        println!("warning: qubit {nu}: no first-order breaking");
    }
    if !b.maximally_entangled {
        println!("warning: qubit {nu} is not maximally entangled; eigenvalue is not a breaking amount");
    }
    if let Some(g) = grid {
        println!("grid max {} at res {}°", sig(g["value"].as_f64().unwrap_or(f64::NAN)), cli.res);
    }
    Ok(())
}

fn cmd_axis_set(cli: &Cli, s: &StateVector) -> CmdResult {
    let sol = optimal_axis_set(s)?;
    let mut grids = Vec::new();
    if cli.verify && sol.maximally_entangled {
        for q in &sol.qubits {
            grids.push(verify_breaking(cli, s, q.nu.0, None, q.eigenvalue)?);
        }
    }
    let flags = solution_flags(&sol);
    if cli.json {
        let qubits: Vec<_> = sol
            .qubits
            .iter()
            .map(|q| {
                json!({
                    "nu": q.nu, "axis": q.axis, "eigenvalue": q.eigenvalue,
                    "spectrum": q.spectrum, "degeneracy": q.degeneracy,
                    "no_first_order_breaking": q.no_first_order_breaking,
                })
            })
            .collect();
        let gaps: Vec<_> = sol
            .pair_gaps
            .iter()
            .map(|g| json!({"mu": g.mu, "nu": g.nu, "achieved": g.achieved, "optimum": g.optimum}))
            .collect();
        return print_json(&json!({
            "schema_version": entanglyze::report::SCHEMA_VERSION,
            "axes": sol.axes,
            "objective": sol.objective,
            "degeneracy": sol.degeneracy,
            "maximally_entangled": sol.maximally_entangled,
            "isotropic": sol.isotropic,
            "qubits": qubits,
            "pair_gaps": gaps,
            "flags": flags,
            "verify": grids,
        }));
    }
    println!("{:>5}  {:<32}  {:>10}  degeneracy", "qubit", "axis", "breaking");
    for q in &sol.qubits {
        println!("{:>5}  {:<32}  {:>10}  {}", q.nu, axis_str(&q.axis), sig(q.eigenvalue), q.degeneracy);
    }
    println!("objective {}", sig(sol.objective));
    if sol.isotropic {
        println!("note: every MIEB matrix is isotropic; axes are a canonical choice");
    }
    print_flags(&flags);
    Ok(())
}

fn cmd_blocks(cli: &Cli, spec: &str, axes: Option<&str>) -> CmdResult {
    let s = load(cli, spec)?;
    let axes = axes.map(|a| parse_axes(&s, a)).transpose()?;
    let pb = persistency_upper_bound(&s, axes.as_deref(), cli.tol)?;
    let flags = entanglyze::report::bound_flags(&pb);
    let check = verify_blocks(cli, &s, &pb)?;
    if cli.json {
        return print_json(&json!({
            "schema_version": entanglyze::report::SCHEMA_VERSION,
            "state": spec,
            "axes": pb.axes,
            "em": pb.em.g,
            "quantized": pb.partition.quantized,
            "blocks": pb.partition.blocks,
            "n_blocks": pb.n_blocks,
            "signs": pb.partition.signs,
            "exact": pb.partition.exact,
            "transitive": pb.partition.transitive,
            "sign_consistent": pb.partition.sign_consistent,
            "maximally_entangled": pb.maximally_entangled,
            "persistency_bound": pb.bound,
            "flags": flags,
            "verify": check,
        }));
    }
    println!("axes:");
    for (q, a) in pb.axes.iter().enumerate() {
        println!("  {q}: {}", axis_str(a));
    }
    println!("EM:");
    print_matrix(&pb.em.g);
    println!("blocks {:?}", pb.partition.blocks);
    match pb.bound {
        Some(b) => println!("persistency bound {b}"),
        None => println!("persistency bound n/a ({} blocks)", pb.n_blocks),
    }
    if let Some(c) = check {
        println!("verify: residual entanglement {} after {} measurements", c["residual"], c["steps"]);
    }
    print_flags(&flags);
    Ok(())
}

#[cfg(feature = "oracle")]
fn verify_blocks(
    cli: &Cli,
    s: &StateVector,
    pb: &entanglyze::PersistencyBound,
) -> Result<Option<serde_json::Value>, Failure> {
    if !cli.verify || pb.bound.is_none() {
        return Ok(None);
    }
    let (steps, residual) = entanglyze::oracle::disentangle_by_blocks(s, pb)?;
    if residual > 1e-9 {
        return Err(Failure::Mismatch(format!(
            "measuring one qubit per block left total entanglement {residual}"
        )));
    }
    Ok(Some(json!({"steps": steps.len(), "sequence": steps, "residual": residual})))
}

#[cfg(not(feature = "oracle"))]
fn verify_blocks(
    cli: &Cli,
    _: &StateVector,
    _: &entanglyze::PersistencyBound,
) -> Result<Option<serde_json::Value>, Failure> {
    if cli.verify {
        return Err(Error::Parse("built without the oracle feature".into()).into());
    }
    Ok(None)
}

fn cmd_reproduce(cli: &Cli) -> CmdResult {
    let r = reproduce_reference()?;
    if cli.json {
        print_json(&r)?;
    } else {
        for c in &r.checks {
            let mark = if c.max_abs_dev < r.tolerance { "ok  " } else { "FAIL" };
            println!("{mark} {:<56} max dev {:.3e}", c.name, c.max_abs_dev);
        }
        println!("{} checks, max deviation {:.3e}", r.checks.len(), r.max_abs_dev);
    }
    if r.passed {
        Ok(())
    } else {
        Err(Failure::Mismatch(format!("max deviation {:.3e} exceeds {:.0e}", r.max_abs_dev, r.tolerance)))
    }
}
