//! `dfock` — figure datasets, heralded gate runs, and displaced-basis
//! transforms from the command line.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 parameter validation,
//! 3 improbable heralding outcome, 4 insufficient cutoff.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;

use dfock_core::analytic::{delta_amplitude, delta_parameter, tmsv_probability, DeltaSign};
use dfock_core::basis::{displaced_distribution, to_alpha_representation};
use dfock_core::fock::{CutoffPolicy, FockVector};
use dfock_core::gates::{
    apd_ratio_curves, run_cz_direct, run_cz_interferometer, run_hadamard_hybrid,
    run_hadamard_inverse, run_hadamard_micro, CzDirectConfig, GateReport,
    HadamardInverseConfig, InterferometerConfig,
};
use dfock_core::Error;

const EXIT_IO: u8 = 1;
const EXIT_VALIDATION: u8 = 2;
const EXIT_IMPROBABLE: u8 = 3;
const EXIT_CUTOFF: u8 = 4;

#[derive(Parser)]
#[command(
    name = "dfock",
    version,
    about = "Displaced-Fock-basis numerics: probability distributions, heralded hybrid gates, basis transforms"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a figure dataset as CSV
    Figure(FigureArgs),
    /// Run a heralded gate and write its report as JSON
    Gate(GateArgs),
    /// Re-express a Fock-basis state in a displaced basis, as CSV
    Xform(XformArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum FigureKind {
    /// Displaced photon-number distribution of the single photon
    Fig2,
    /// Distribution of (|0⟩ − |1⟩)/√2 over a displaced basis
    Fig4Delta,
    /// Heralding probabilities of the TMSV displaced-basis expansion
    Fig4Tmsv,
    /// Ratios of single-photon to higher-order heralding probabilities
    Fig6,
}

#[derive(Args)]
struct FigureArgs {
    #[arg(value_enum)]
    which: FigureKind,
    /// Displacement amplitude (fig2, fig4-delta; sets delta for fig4-tmsv)
    #[arg(long)]
    alpha: Option<f64>,
    /// Displacement-asymmetry parameter (fig4-tmsv, fig6)
    #[arg(long)]
    delta: Option<f64>,
    /// Squeezing parameter (fig4-tmsv)
    #[arg(long)]
    r: Option<f64>,
    /// Squeezing grid for fig6 as `min:max:steps`
    #[arg(long)]
    s: Option<String>,
    /// Highest photon number row
    #[arg(long)]
    n: Option<usize>,
    /// Largest probability order for fig6 ratios
    #[arg(long)]
    kmax: Option<usize>,
    /// Output CSV path
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum GateKind {
    Cz,
    CzDirect,
    Hadamard,
    HadamardMicro,
    HadamardInverse,
}

#[derive(Args)]
struct GateArgs {
    #[arg(value_enum)]
    which: GateKind,
    /// Control amplitude on |0_L⟩
    #[arg(long, default_value_t = std::f64::consts::FRAC_1_SQRT_2)]
    a: f64,
    /// Control amplitude on |1_L⟩
    #[arg(long, default_value_t = std::f64::consts::FRAC_1_SQRT_2)]
    b: f64,
    /// Target amplitude on |0_L1⟩ (cz-direct)
    #[arg(long, default_value_t = std::f64::consts::FRAC_1_SQRT_2)]
    a1: f64,
    /// Target amplitude on |1_L1⟩ (cz-direct)
    #[arg(long, default_value_t = std::f64::consts::FRAC_1_SQRT_2)]
    b1: f64,
    /// TMSV squeezing parameter
    #[arg(long, default_value_t = 0.3)]
    s: f64,
    /// Tap beam-splitter reflectivity
    #[arg(long, default_value_t = 0.2)]
    rbs: f64,
    /// Mixing-splitter transmittance (cz-direct, hadamard-inverse)
    #[arg(long, default_value_t = 0.99)]
    transmittance: f64,
    /// Displacement-asymmetry parameter of the heralded target (cz)
    #[arg(long, default_value_t = 1.0)]
    delta: f64,
    /// Photon count of the extra detection (hadamard-micro)
    #[arg(long)]
    n: Option<usize>,
    /// Output JSON path
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct XformArgs {
    /// JSON file holding the state as an array of [re, im] pairs
    #[arg(long)]
    state: PathBuf,
    /// Displacement of the target basis, `RE` or `RE,IM`
    #[arg(long)]
    alpha: String,
    /// Override the working cutoff
    #[arg(long)]
    cutoff: Option<usize>,
    /// Output CSV path
    #[arg(long)]
    out: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Figure(args) => cmd_figure(&args),
        Command::Gate(args) => cmd_gate(&args),
        Command::Xform(args) => cmd_xform(&args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(code) => code,
    }
}

/// Cutoff policy honoring the `DFOCK_DEFAULT_CUTOFF_PAD` override.
fn cli_policy() -> CutoffPolicy {
    match std::env::var("DFOCK_DEFAULT_CUTOFF_PAD") {
        Ok(raw) => match raw.parse::<usize>() {
            Ok(pad) => CutoffPolicy::with_base_pad(pad),
            Err(_) => {
                eprintln!("warning: ignoring unparsable DFOCK_DEFAULT_CUTOFF_PAD={raw}");
                CutoffPolicy::default()
            }
        },
        Err(_) => CutoffPolicy::default(),
    }
}

fn fail(code: u8, message: impl AsRef<str>) -> ExitCode {
    eprintln!("dfock: {}", message.as_ref());
    ExitCode::from(code)
}

fn core_error(err: &Error) -> ExitCode {
    let code = match err {
        Error::InsufficientCutoff { .. } | Error::Headroom { .. } => EXIT_CUTOFF,
        Error::ImprobableOutcome { .. } => EXIT_IMPROBABLE,
        _ => EXIT_VALIDATION,
    };
    fail(code, err.to_string())
}

fn write_output(path: &Path, contents: &str) -> Result<(), ExitCode> {
    fs::write(path, contents)
        .map_err(|e| fail(EXIT_IO, format!("cannot write {}: {e}", path.display())))
}

/// Fixed float formatting: 17 significant digits, locale-free, so repeated
/// runs are byte-identical.
fn fmt(v: f64) -> String {
    format!("{v:.16e}")
}

fn cmd_figure(args: &FigureArgs) -> Result<(), ExitCode> {
    let policy = cli_policy();
    let tail_tol = policy.tail_tol;
    let mut csv = String::new();
    match args.which {
        FigureKind::Fig2 => {
            let alpha = args.alpha.unwrap_or(1.0);
            let n_max = args.n.unwrap_or_else(|| policy.required_cutoff(alpha.abs(), 1) + 40);
            let state = FockVector::basis_state(1, 1);
            let dist = displaced_distribution(&state, Complex64::new(alpha, 0.0), n_max);
            let total: f64 = dist.iter().sum();
            csv.push_str("# dfock figure fig2: single photon over a displaced number basis\n");
            csv.push_str(&format!("# alpha = {}\n", fmt(alpha)));
            csv.push_str(&format!("# tail_tolerance = {tail_tol:e}\n"));
            csv.push_str(&format!("# column_sum = {}\n", fmt(total)));
            csv.push_str("n,p\n");
            for (n, p) in dist.iter().enumerate() {
                csv.push_str(&format!("{n},{}\n", fmt(*p)));
            }
        }
        FigureKind::Fig4Delta => {
            let alpha = args.alpha.unwrap_or(1.0);
            let n_max = args.n.unwrap_or_else(|| policy.required_cutoff(alpha.abs(), 1) + 40);
            let probs: Vec<f64> = (0..=n_max)
                .map(|n| {
                    delta_amplitude(DeltaSign::Minus, Complex64::new(alpha, 0.0), n).norm_sqr()
                })
                .collect();
            let total: f64 = probs.iter().sum();
            csv.push_str(
                "# dfock figure fig4-delta: (|0> - |1>)/sqrt(2) over a displaced number basis\n",
            );
            csv.push_str(&format!("# alpha = {}\n", fmt(alpha)));
            csv.push_str(&format!("# tail_tolerance = {tail_tol:e}\n"));
            csv.push_str(&format!("# column_sum = {}\n", fmt(total)));
            csv.push_str("n,p_minus\n");
            for (n, p) in probs.iter().enumerate() {
                csv.push_str(&format!("{n},{}\n", fmt(*p)));
            }
        }
        FigureKind::Fig4Tmsv => {
            let r = args.r.unwrap_or(0.5);
            if r <= 0.0 {
                return Err(fail(EXIT_VALIDATION, "fig4-tmsv needs --r > 0"));
            }
            let delta = match (args.delta, args.alpha) {
                (Some(d), _) => d,
                (None, Some(alpha)) => delta_parameter(Complex64::new(alpha, 0.0), r).norm(),
                (None, None) => 1.0,
            };
            // default row count: accumulate until the column holds all but
            // a tenth of the tail tolerance (N_n² growth slows the decay,
            // so a closed (tanh r)^{2n} bound is not enough)
            let n_max = args.n.unwrap_or_else(|| {
                let mut total = 0.0;
                let mut n = 0usize;
                while total < 1.0 - tail_tol / 10.0 && n < 4000 {
                    total += tmsv_probability(n, delta.abs(), r);
                    n += 1;
                }
                n.max(40) + 10
            });
            let probs: Vec<f64> =
                (0..=n_max).map(|n| tmsv_probability(n, delta.abs(), r)).collect();
            let total: f64 = probs.iter().sum();
            csv.push_str("# dfock figure fig4-tmsv: TMSV heralding probabilities\n");
            csv.push_str(&format!("# delta = {}\n", fmt(delta)));
            csv.push_str(&format!("# r = {}\n", fmt(r)));
            csv.push_str(&format!("# tail_tolerance = {tail_tol:e}\n"));
            csv.push_str(&format!("# column_sum = {}\n", fmt(total)));
            csv.push_str("n,p\n");
            for (n, p) in probs.iter().enumerate() {
                csv.push_str(&format!("{n},{}\n", fmt(*p)));
            }
        }
        FigureKind::Fig6 => {
            let delta = args.delta.unwrap_or(1.0);
            let k_max = args.kmax.unwrap_or(6) + 1;
            if k_max < 2 {
                return Err(fail(EXIT_VALIDATION, "fig6 needs --kmax ≥ 1"));
            }
            let grid = parse_grid(args.s.as_deref().unwrap_or("0.05:1.5:30"))
                .map_err(|m| fail(EXIT_VALIDATION, m))?;
            let rows = apd_ratio_curves(delta, &grid, k_max).map_err(|e| core_error(&e))?;
            csv.push_str("# dfock figure fig6: P1/Pk heralding ratios over squeezing\n");
            csv.push_str(&format!("# delta = {}\n", fmt(delta)));
            csv.push('s');
            for k in 2..=k_max {
                csv.push_str(&format!(",p1_over_p{k}"));
            }
            csv.push('\n');
            for row in rows {
                csv.push_str(&fmt(row.s));
                for ratio in row.ratios {
                    csv.push(',');
                    csv.push_str(&fmt(ratio));
                }
                csv.push('\n');
            }
        }
    }
    write_output(&args.out, &csv)
}

fn parse_grid(spec: &str) -> Result<Vec<f64>, String> {
    let parts: Vec<&str> = spec.split(':').collect();
    match parts.as_slice() {
        [single] => single
            .parse::<f64>()
            .map(|v| vec![v])
            .map_err(|_| format!("bad grid value {single}")),
        [lo, hi, count] => {
            let lo: f64 = lo.parse().map_err(|_| format!("bad grid start {lo}"))?;
            let hi: f64 = hi.parse().map_err(|_| format!("bad grid end {hi}"))?;
            let count: usize = count.parse().map_err(|_| format!("bad grid count {count}"))?;
            if count < 2 || hi <= lo {
                return Err("grid needs min < max and at least 2 steps".into());
            }
            Ok((0..count)
                .map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64)
                .collect())
        }
        _ => Err("grid must be VALUE or MIN:MAX:STEPS".into()),
    }
}

fn cmd_gate(args: &GateArgs) -> Result<(), ExitCode> {
    let norm = args.a * args.a + args.b * args.b;
    if (norm - 1.0).abs() > 1e-6 {
        return Err(fail(
            EXIT_VALIDATION,
            format!("control amplitudes must satisfy a² + b² = 1, got {norm}"),
        ));
    }
    let a = Complex64::new(args.a, 0.0);
    let b = Complex64::new(args.b, 0.0);
    let pad_override = match std::env::var("DFOCK_DEFAULT_CUTOFF_PAD") {
        Ok(raw) => raw.parse::<usize>().ok(),
        Err(_) => None,
    };
    let report: GateReport = match args.which {
        GateKind::Cz => {
            let mut cfg = InterferometerConfig::new(a, b, args.s, args.rbs);
            cfg.delta = args.delta;
            cfg.base_pad = pad_override;
            run_cz_interferometer(&cfg).map_err(|e| core_error(&e))?
        }
        GateKind::CzDirect => {
            let norm1 = args.a1 * args.a1 + args.b1 * args.b1;
            if (norm1 - 1.0).abs() > 1e-6 {
                return Err(fail(
                    EXIT_VALIDATION,
                    format!("target amplitudes must satisfy a1² + b1² = 1, got {norm1}"),
                ));
            }
            if args.transmittance < 0.9 {
                eprintln!(
                    "warning: transmittance {} is far from 1; the splitter no longer approximates a displacement",
                    args.transmittance
                );
            }
            let mut cfg = CzDirectConfig::new(
                a,
                b,
                Complex64::new(args.a1, 0.0),
                Complex64::new(args.b1, 0.0),
            );
            cfg.transmittance = args.transmittance;
            cfg.base_pad = pad_override;
            run_cz_direct(&cfg).map_err(|e| core_error(&e))?
        }
        GateKind::Hadamard => {
            let mut cfg = InterferometerConfig::new(a, b, args.s, args.rbs);
            cfg.base_pad = pad_override;
            run_hadamard_hybrid(&cfg).map_err(|e| core_error(&e))?
        }
        GateKind::HadamardMicro => {
            let mut cfg = InterferometerConfig::new(a, b, args.s, args.rbs);
            cfg.base_pad = pad_override;
            run_hadamard_micro(&cfg, args.n.unwrap_or(3)).map_err(|e| core_error(&e))?
        }
        GateKind::HadamardInverse => {
            if args.transmittance < 0.9 {
                eprintln!(
                    "warning: transmittance {} is far from 1; the splitter no longer approximates a displacement",
                    args.transmittance
                );
            }
            let mut cfg =
                HadamardInverseConfig::new(a, b, args.s, args.rbs, args.transmittance);
            cfg.base_pad = pad_override;
            run_hadamard_inverse(&cfg).map_err(|e| core_error(&e))?
        }
    };
    let mut json = report.to_json();
    json.push('\n');
    write_output(&args.out, &json)
}

fn parse_complex(raw: &str) -> Result<Complex64, String> {
    let parts: Vec<&str> = raw.split(',').collect();
    match parts.as_slice() {
        [re] => re
            .trim()
            .parse::<f64>()
            .map(|v| Complex64::new(v, 0.0))
            .map_err(|_| format!("bad complex value {raw}")),
        [re, im] => {
            let re: f64 = re.trim().parse().map_err(|_| format!("bad real part {re}"))?;
            let im: f64 = im.trim().parse().map_err(|_| format!("bad imaginary part {im}"))?;
            Ok(Complex64::new(re, im))
        }
        _ => Err(format!("complex value must be RE or RE,IM, got {raw}")),
    }
}

fn cmd_xform(args: &XformArgs) -> Result<(), ExitCode> {
    let alpha = parse_complex(&args.alpha).map_err(|m| fail(EXIT_VALIDATION, m))?;
    let raw = fs::read_to_string(&args.state)
        .map_err(|e| fail(EXIT_IO, format!("cannot read {}: {e}", args.state.display())))?;
    let pairs: Vec<[f64; 2]> = serde_json::from_str(&raw).map_err(|e| {
        fail(EXIT_VALIDATION, format!("state file must be a JSON array of [re, im] pairs: {e}"))
    })?;
    if pairs.is_empty() {
        return Err(fail(EXIT_VALIDATION, "state file holds no amplitudes"));
    }
    let amps: Vec<Complex64> = pairs.iter().map(|p| Complex64::new(p[0], p[1])).collect();
    let mut state = FockVector::new(amps);
    let norm_sqr = state.norm_sqr();
    if (norm_sqr.sqrt() - 1.0).abs() > 1e-6 {
        return Err(fail(
            EXIT_VALIDATION,
            format!("state norm {} is not within 1e-6 of 1", norm_sqr.sqrt()),
        ));
    }
    if (norm_sqr - 1.0).abs() > 1e-12 {
        eprintln!(
            "warning: renormalizing input state (|norm² − 1| = {:.3e})",
            (norm_sqr - 1.0).abs()
        );
    }
    state.normalize();

    // pad the vector so the displaced basis can hold it
    let policy = cli_policy();
    let highest = (0..state.len()).rev().find(|&n| state.amp(n).norm_sqr() > 0.0).unwrap_or(0);
    let needed = policy.required_cutoff(alpha.norm(), highest);
    let cutoff = args.cutoff.unwrap_or_else(|| needed.max(state.cutoff()));
    if cutoff > state.cutoff() {
        let mut padded = FockVector::zeros(cutoff);
        for n in 0..state.len() {
            padded.amps_mut()[n] = state.amp(n);
        }
        state = padded;
    }

    let rep = to_alpha_representation(&state, alpha).map_err(|e| core_error(&e))?;
    let mut csv = String::new();
    csv.push_str("# dfock xform: state amplitudes over the displaced basis\n");
    csv.push_str(&format!("# alpha = {},{}\n", fmt(alpha.re), fmt(alpha.im)));
    csv.push_str(&format!("# cutoff = {cutoff}\n"));
    csv.push_str(&format!("# tail_tolerance = {:e}\n", policy.tail_tol));
    csv.push_str("n,re_b,im_b,p\n");
    for n in 0..=rep.cutoff() {
        let b_n = rep.amp(n);
        csv.push_str(&format!(
            "{n},{},{},{}\n",
            fmt(b_n.re),
            fmt(b_n.im),
            fmt(b_n.norm_sqr())
        ));
    }
    write_output(&args.out, &csv)
}
