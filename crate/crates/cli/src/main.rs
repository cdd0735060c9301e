//! Command-line front end: simulate measurement sets, reconstruct signals,
//! enumerate ambiguity classes, and run Monte-Carlo round-trip batches.
//!
//! Exit codes: 0 success, 1 usage error, 2 malformed input, 3 admissibility
//! violation, 4 numerical failure.

use clap::{Args, Parser, Subcommand, ValueEnum};
use std::f64::consts::PI;
use std::io::Read;
use std::path::PathBuf;
use std::time::Instant;

use interfero_core::ambiguity::{enumerate_ambiguities, AmbiguityCatalog};
use interfero_core::error::ErrorClass;
use interfero_core::fit::estimate_support_length;
use interfero_core::measurement::{
    add_noise, polarization_set, reference_set, two_rotation_set, MeasurementSet,
};
use interfero_core::phase::PhaseMode;
use interfero_core::prony::check_mu;
use interfero_core::recover::{
    pairs_equivalent, recover_known_reference, recover_self_interference,
    resolve_unknown_reference, verify_round_trip, RoundTripConfig, RoundTripReport, TrialMode,
};
use interfero_core::signal::SignalRecord;
use interfero_core::synth::{golden_mu, random_signal_seeded};
use interfero_core::{ComplexSignal, Tolerances};

#[derive(Parser)]
#[command(
    name = "interfero",
    about = "Simulate and solve one-dimensional phase retrieval with interference measurements",
    long_about = "Signals travel as JSON records {\"offset\": int, \"coeffs\": [[re, im], ...]}; \
                  measurement sets and reports are JSON as well, round-trip CSV goes to stdout. \
                  All angles are radians. Set INTERFERO_TOL to override the matching tolerances.",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a measurement set for a signal read from JSON
    Simulate(SimulateArgs),
    /// Reconstruct a signal from a measurement set
    Reconstruct(ReconstructArgs),
    /// Enumerate the non-trivial ambiguity classes of an intensity
    Enumerate(EnumerateArgs),
    /// Monte-Carlo round trips, one CSV row per trial
    Roundtrip(RoundtripArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Polarization,
    TwoRotation,
    KnownRef,
    UnknownRef,
}

impl Mode {
    fn as_str(self) -> &'static str {
        match self {
            Mode::Polarization => "polarization",
            Mode::TwoRotation => "two-rotation",
            Mode::KnownRef => "known-ref",
            Mode::UnknownRef => "unknown-ref",
        }
    }
}

#[derive(Args)]
struct SimulateArgs {
    /// Signal JSON file ("-" for stdin)
    #[arg(long)]
    signal: String,
    #[arg(long, value_enum)]
    mode: Mode,
    /// Number of polarization channels (K >= 3)
    #[arg(long, default_value_t = 3)]
    k: usize,
    /// First rotation for two-rotation mode
    #[arg(long, default_value_t = 0.0)]
    alpha1: f64,
    /// Second rotation for two-rotation mode (default -pi/2)
    #[arg(long, default_value_t = -PI / 2.0, allow_hyphen_values = true)]
    alpha2: f64,
    /// Modulation step; defaults to the golden-ratio step in (0, pi)
    #[arg(long)]
    mu: Option<f64>,
    /// Admissibility margin for q*mu/(2*pi) against the integers
    #[arg(long, default_value_t = 1e-6)]
    mu_tol: f64,
    /// Reference signal JSON (required for known-ref and unknown-ref)
    #[arg(long)]
    reference: Option<String>,
    /// Relative noise level sigma on all magnitudes
    #[arg(long, default_value_t = 0.0)]
    noise: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ReconstructArgs {
    /// Measurement JSON file ("-" for stdin)
    #[arg(long)]
    input: String,
    /// Recovery mode; inferred from the measurement set when omitted
    #[arg(long, value_enum)]
    mode: Option<Mode>,
    /// Support window {0..M-1} for known-reference recovery
    #[arg(long)]
    window: Option<usize>,
    /// Admissibility margin for q*mu/(2*pi) against the integers
    #[arg(long, default_value_t = 1e-6)]
    mu_tol: f64,
    /// Signal output file (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Report JSON output file
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct EnumerateArgs {
    /// Signal JSON, or {"intensity": [[re, im], ...]} coefficients ("-" for stdin)
    #[arg(long)]
    input: String,
    /// Refuse supports longer than this (hard cap 22)
    #[arg(long, default_value_t = 22)]
    max_n: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RoundtripArgs {
    #[arg(long, default_value_t = 10)]
    trials: usize,
    /// Support length of the random test signals
    #[arg(long, default_value_t = 5)]
    n: usize,
    #[arg(long, value_enum)]
    mode: Mode,
    #[arg(long, default_value_t = 3)]
    k: usize,
    #[arg(long)]
    mu: Option<f64>,
    #[arg(long, default_value_t = 0.0)]
    alpha1: f64,
    #[arg(long, default_value_t = -PI / 2.0, allow_hyphen_values = true)]
    alpha2: f64,
    #[arg(long, default_value_t = 0.0)]
    noise: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// CSV output file (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
}

struct CliError {
    code: i32,
    message: String,
}

impl CliError {
    fn usage(msg: impl Into<String>) -> CliError {
        CliError {
            code: 1,
            message: msg.into(),
        }
    }
    fn malformed(msg: impl Into<String>) -> CliError {
        CliError {
            code: 2,
            message: msg.into(),
        }
    }
}

impl From<interfero_core::Error> for CliError {
    fn from(e: interfero_core::Error) -> CliError {
        let code = match e.class() {
            ErrorClass::Malformed => 2,
            ErrorClass::Admissibility => 3,
            ErrorClass::Numerical => 4,
        };
        CliError {
            code,
            message: e.to_string(),
        }
    }
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                std::process::exit(0);
            }
            eprintln!("{e}");
            std::process::exit(1);
        }
    };
    let result = match cli.command {
        Command::Simulate(args) => cmd_simulate(args),
        Command::Reconstruct(args) => cmd_reconstruct(args),
        Command::Enumerate(args) => cmd_enumerate(args),
        Command::Roundtrip(args) => cmd_roundtrip(args),
    };
    if let Err(e) = result {
        eprintln!("error: {}", e.message);
        std::process::exit(e.code);
    }
}

fn read_input(path: &str) -> Result<String, CliError> {
    if path == "-" {
        let mut buf = String::new();
        std::io::stdin()
            .read_to_string(&mut buf)
            .map_err(|e| CliError::malformed(format!("reading stdin: {e}")))?;
        Ok(buf)
    } else {
        std::fs::read_to_string(path)
            .map_err(|e| CliError::malformed(format!("reading {path}: {e}")))
    }
}

fn write_output(out: &Option<PathBuf>, content: &str) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, content)
            .map_err(|e| CliError::malformed(format!("writing {}: {e}", path.display()))),
        None => {
            println!("{content}");
            Ok(())
        }
    }
}

fn load_signal(path: &str) -> Result<ComplexSignal, CliError> {
    let text = read_input(path)?;
    let signal: ComplexSignal = serde_json::from_str(&text)
        .map_err(|e| CliError::malformed(format!("signal JSON: {e}")))?;
    if signal.is_zero() {
        return Err(CliError::malformed("signal JSON: zero signal"));
    }
    Ok(signal)
}

fn tolerances_for(noise: f64) -> Tolerances {
    if std::env::var("INTERFERO_TOL").is_ok() {
        Tolerances::from_env()
    } else {
        Tolerances::for_noise(noise)
    }
}

fn total_values(m: &MeasurementSet) -> usize {
    m.base.len()
        + m.channels.iter().map(|c| c.values.len()).sum::<usize>()
        + m.reference
            .as_ref()
            .map_or(0, |r| r.base_h.len() + r.interference.len())
}

fn cmd_simulate(args: SimulateArgs) -> Result<(), CliError> {
    let x = load_signal(&args.signal)?;
    let mu = args.mu.unwrap_or_else(golden_mu);

    let mset = match args.mode {
        Mode::Polarization | Mode::TwoRotation => {
            if !check_mu(mu, x.len(), args.mu_tol) {
                return Err(CliError::usage(format!(
                    "--mu {mu} is within {} of a rational multiple 2*pi*p/q with q < {}; \
                     pick an irrational multiple of 2*pi (the default is one)",
                    args.mu_tol,
                    x.len()
                )));
            }
            match args.mode {
                Mode::Polarization => {
                    if args.k < 3 {
                        return Err(CliError::usage("--k must be at least 3"));
                    }
                    polarization_set(&x, args.k, mu)?
                }
                _ => {
                    if (args.alpha1 - args.alpha2).sin().abs() < 1e-9 {
                        return Err(CliError::usage(
                            "--alpha1 and --alpha2 must not differ by a multiple of pi",
                        ));
                    }
                    two_rotation_set(&x, args.alpha1, args.alpha2, mu)?
                }
            }
        }
        Mode::KnownRef | Mode::UnknownRef => {
            let path = args
                .reference
                .as_deref()
                .ok_or_else(|| CliError::usage("--reference is required for reference modes"))?;
            let h = load_signal(path)?;
            reference_set(&x, &h, args.mode == Mode::KnownRef)?
        }
    };
    let mset = if args.noise > 0.0 {
        add_noise(&mset, args.noise, args.seed)
    } else {
        mset
    };

    let json = serde_json::to_string_pretty(&mset)
        .map_err(|e| CliError::malformed(format!("serializing: {e}")))?;
    write_output(&args.out, &json)?;
    eprintln!(
        "N={} grid={} measurements={}",
        x.len(),
        mset.grid.len(),
        total_values(&mset)
    );
    Ok(())
}

fn infer_mode(mset: &MeasurementSet) -> Result<Mode, CliError> {
    if let Some(r) = &mset.reference {
        return Ok(if r.signal.is_some() {
            Mode::KnownRef
        } else {
            Mode::UnknownRef
        });
    }
    match mset.channels.len() {
        0 | 1 => Err(CliError::usage(
            "cannot infer mode: too few interference channels",
        )),
        2 => Ok(Mode::TwoRotation),
        _ => Ok(Mode::Polarization),
    }
}

fn base_residual(mset: &MeasurementSet, x: &ComplexSignal) -> f64 {
    mset.grid
        .iter()
        .zip(&mset.base)
        .map(|(&w, &v)| (x.dtft(w).norm() - v).abs())
        .fold(0.0, f64::max)
}

fn cmd_reconstruct(args: ReconstructArgs) -> Result<(), CliError> {
    let text = read_input(&args.input)?;
    let mset: MeasurementSet = serde_json::from_str(&text)
        .map_err(|e| CliError::malformed(format!("measurement JSON: {e}")))?;
    mset.validate()?;
    let mode = match args.mode {
        Some(m) => m,
        None => infer_mode(&mset)?,
    };
    let mut tol = tolerances_for(0.0);
    tol.mu_margin = args.mu_tol;

    let (signal, report) = match mode {
        Mode::Polarization | Mode::TwoRotation => {
            let phase_mode = if mode == Mode::Polarization {
                PhaseMode::Polarization
            } else {
                PhaseMode::TwoRotation
            };
            let rec = recover_self_interference(&mset, phase_mode, &tol)?;
            let report = RoundTripReport {
                success: true,
                rotation: Some(0.0),
                max_err: Some(base_residual(&mset, &rec.signal)),
                n0: Some(rec.signal.offset()),
                mode: mode.as_str().to_string(),
                error: None,
            };
            (rec.signal, report)
        }
        Mode::KnownRef => {
            let window = args.window.ok_or_else(|| {
                CliError::usage("--window is required for known-reference recovery")
            })?;
            let cands = recover_known_reference(&mset, window, &tol)?;
            let best = cands
                .first()
                .cloned()
                .ok_or(interfero_core::Error::InconsistentMeasurements)?;
            eprintln!("candidates={}", cands.len());
            let report = RoundTripReport {
                success: true,
                rotation: Some(0.0),
                max_err: Some(base_residual(&mset, &best)),
                n0: Some(best.offset()),
                mode: mode.as_str().to_string(),
                error: None,
            };
            (best, report)
        }
        Mode::UnknownRef => {
            let degree = mset.support_bound;
            let n_x =
                estimate_support_length(&mset.base_squared(), degree, tol.support_truncation)?;
            let r = mset
                .reference
                .as_ref()
                .ok_or_else(|| CliError::malformed("measurement set has no reference block"))?;
            let h_samples: Vec<(f64, f64)> = mset
                .grid
                .iter()
                .zip(&r.base_h)
                .map(|(&w, &v)| (w, v * v))
                .collect();
            let n_h = estimate_support_length(&h_samples, degree, tol.support_truncation)?;
            let pairs = resolve_unknown_reference(&mset, n_x, n_h, &tol)?;
            eprintln!("classes={}", pairs.len());
            let (x_hat, _) = pairs[0].clone();
            let report = RoundTripReport {
                success: pairs.len() == 1,
                rotation: Some(0.0),
                max_err: Some(base_residual(&mset, &x_hat)),
                n0: Some(x_hat.offset()),
                mode: mode.as_str().to_string(),
                error: None,
            };
            (x_hat, report)
        }
    };

    let json = serde_json::to_string_pretty(&signal)
        .map_err(|e| CliError::malformed(format!("serializing: {e}")))?;
    write_output(&args.out, &json)?;
    if let Some(report_path) = &args.report {
        let rep_json = serde_json::to_string_pretty(&report)
            .map_err(|e| CliError::malformed(format!("serializing report: {e}")))?;
        std::fs::write(report_path, rep_json)
            .map_err(|e| CliError::malformed(format!("writing report: {e}")))?;
    }
    Ok(())
}

#[derive(serde::Serialize)]
struct CatalogOut {
    zero_pairs: Vec<[[f64; 2]; 2]>,
    unit_circle_zeros: Vec<[f64; 2]>,
    scale: f64,
    origin_multiplicity: usize,
}

#[derive(serde::Serialize)]
struct EnumerateOut {
    n: usize,
    bound: u64,
    count: usize,
    catalog: CatalogOut,
    representatives: Vec<SignalRecord>,
}

fn cmd_enumerate(args: EnumerateArgs) -> Result<(), CliError> {
    let text = read_input(&args.input)?;
    let value: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| CliError::malformed(format!("input JSON: {e}")))?;

    let intensity = if let Some(raw) = value.get("intensity") {
        let pairs: Vec<[f64; 2]> = serde_json::from_value(raw.clone())
            .map_err(|e| CliError::malformed(format!("intensity coefficients: {e}")))?;
        if pairs.len().is_multiple_of(2) {
            return Err(CliError::malformed(
                "intensity coefficients must cover -d..=d (odd length)",
            ));
        }
        interfero_core::TrigPoly::from_coeffs(
            pairs
                .into_iter()
                .map(|p| num_complex::Complex64::new(p[0], p[1]))
                .collect(),
        )
    } else {
        let signal: ComplexSignal = serde_json::from_value(value)
            .map_err(|e| CliError::malformed(format!("signal JSON: {e}")))?;
        signal.intensity()?
    };

    let mut tol = tolerances_for(0.0);
    tol.enumeration_cap = args.max_n.min(22);
    let n = intensity.degree() + 1;
    let reps = enumerate_ambiguities(&intensity, &tol)?;
    let catalog = AmbiguityCatalog::from_intensity(&intensity, &tol)?;

    let out = EnumerateOut {
        n,
        bound: 1u64 << n.saturating_sub(2),
        count: reps.len(),
        catalog: CatalogOut {
            zero_pairs: catalog
                .zero_pairs()
                .iter()
                .map(|(a, b)| [[a.re, a.im], [b.re, b.im]])
                .collect(),
            unit_circle_zeros: catalog
                .unit_circle_zeros()
                .iter()
                .map(|z| [z.re, z.im])
                .collect(),
            scale: catalog.scale(),
            origin_multiplicity: catalog.origin_multiplicity(),
        },
        representatives: reps.into_iter().map(SignalRecord::from).collect(),
    };
    let json = serde_json::to_string_pretty(&out)
        .map_err(|e| CliError::malformed(format!("serializing: {e}")))?;
    write_output(&args.out, &json)?;
    eprintln!("n={} classes={} bound={}", out.n, out.count, out.bound);
    Ok(())
}

fn known_ref_trial(n: usize, seed: u64, noise: f64, tol: &Tolerances) -> RoundTripReport {
    let window = n;
    let x = random_signal_seeded(seed, n, (0, 0));
    let h = random_signal_seeded(
        seed ^ 0x9e37_79b9,
        1 + (seed % 3) as usize,
        (n as i64, n as i64),
    );
    let mset = match reference_set(&x, &h, true) {
        Ok(m) => m,
        Err(e) => return RoundTripReport::failure("known-ref", e.to_string()),
    };
    let mset = if noise > 0.0 {
        add_noise(&mset, noise, seed)
    } else {
        mset
    };
    match recover_known_reference(&mset, window, tol) {
        Ok(cands) => {
            let err = cands
                .iter()
                .filter(|c| c.offset() == x.offset() && c.len() == x.len())
                .map(|c| {
                    c.coeffs()
                        .iter()
                        .zip(x.coeffs())
                        .map(|(a, b)| (a - b).norm())
                        .fold(0.0, f64::max)
                })
                .fold(f64::INFINITY, f64::min);
            RoundTripReport {
                success: err <= tol.equivalence.max(1e-6),
                rotation: Some(0.0),
                max_err: err.is_finite().then_some(err),
                n0: Some(x.offset()),
                mode: "known-ref".to_string(),
                error: None,
            }
        }
        Err(e) => RoundTripReport::failure("known-ref", e.to_string()),
    }
}

fn unknown_ref_trial(n: usize, seed: u64, noise: f64, tol: &Tolerances) -> RoundTripReport {
    let n_h = (n.saturating_sub(1)).max(1);
    let x = random_signal_seeded(seed, n, (0, 0));
    let h = random_signal_seeded(seed ^ 0x5bd1_e995, n_h, (0, 0));
    let mset = match reference_set(&x, &h, false) {
        Ok(m) => m,
        Err(e) => return RoundTripReport::failure("unknown-ref", e.to_string()),
    };
    let mset = if noise > 0.0 {
        add_noise(&mset, noise, seed)
    } else {
        mset
    };
    match resolve_unknown_reference(&mset, n, n_h, tol) {
        Ok(pairs) => {
            let unique = pairs.len() == 1;
            let contains = pairs
                .iter()
                .any(|p| pairs_equivalent(p, &(x.clone(), h.clone()), tol.equivalence.max(1e-6)));
            RoundTripReport {
                success: unique && contains,
                rotation: None,
                max_err: None,
                n0: Some(x.offset()),
                mode: "unknown-ref".to_string(),
                error: (!unique || !contains).then(|| format!("{} surviving classes", pairs.len())),
            }
        }
        Err(e) => RoundTripReport::failure("unknown-ref", e.to_string()),
    }
}

fn cmd_roundtrip(args: RoundtripArgs) -> Result<(), CliError> {
    if args.n == 0 {
        return Err(CliError::usage("--n must be positive"));
    }
    if args.mode == Mode::Polarization && args.k < 3 {
        return Err(CliError::usage("--k must be at least 3"));
    }
    if args.mode == Mode::TwoRotation && (args.alpha1 - args.alpha2).sin().abs() < 1e-9 {
        return Err(CliError::usage(
            "--alpha1 and --alpha2 must not differ by a multiple of pi",
        ));
    }
    let mu = args.mu.unwrap_or_else(golden_mu);
    let tol = tolerances_for(args.noise);

    let rows: Vec<(RoundTripReport, f64)> = interfero_core::exec::map_indexed(args.trials, |t| {
        let seed = args.seed.wrapping_add(t as u64);
        let start = Instant::now();
        let report = match args.mode {
            Mode::Polarization | Mode::TwoRotation => {
                let x = random_signal_seeded(seed, args.n, (-3, 3));
                let config = RoundTripConfig {
                    mode: if args.mode == Mode::Polarization {
                        TrialMode::Polarization { k: args.k }
                    } else {
                        TrialMode::TwoRotation {
                            alpha1: args.alpha1,
                            alpha2: args.alpha2,
                        }
                    },
                    mu,
                    noise_sigma: args.noise,
                    seed,
                };
                verify_round_trip(&x, &config, &tol)
            }
            Mode::KnownRef => known_ref_trial(args.n, seed, args.noise, &tol),
            Mode::UnknownRef => unknown_ref_trial(args.n, seed, args.noise, &tol),
        };
        (report, start.elapsed().as_secs_f64() * 1e3)
    });

    let fmt_opt = |v: Option<f64>| v.map_or("nan".to_string(), |x| format!("{x:.9e}"));
    let mut csv = String::from("trial,N,mode,success,rotation,max_err,wall_ms\n");
    let mut successes = 0usize;
    for (t, (rep, wall)) in rows.iter().enumerate() {
        if rep.success {
            successes += 1;
        }
        csv.push_str(&format!(
            "{},{},{},{},{},{},{:.3}\n",
            t,
            args.n,
            rep.mode,
            rep.success,
            fmt_opt(rep.rotation),
            fmt_opt(rep.max_err),
            wall
        ));
    }
    csv.push_str(&format!(
        "# trials={} successes={} success_rate={:.4}\n",
        args.trials,
        successes,
        if args.trials > 0 {
            successes as f64 / args.trials as f64
        } else {
            0.0
        }
    ));
    match &args.out {
        Some(path) => std::fs::write(path, &csv)
            .map_err(|e| CliError::malformed(format!("writing {}: {e}", path.display())))?,
        None => print!("{csv}"),
    }
    Ok(())
}
