//! Command-line frontend.
//!
//! Every angle on the command line and in sequence/problem files is in
//! units of π. Exit codes: 0 success, 1 I/O or failed verification, 2 usage,
//! 3 parse error, 4 solver non-convergence.

mod config;
mod family;

use std::f64::consts::PI;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub use config::Config;
pub use family::{parse_family, FamilyKind, FamilyRequest, Synthesized, TargetSpec};

use crate::analysis::{
    avg_gate_fidelity, evaluate_cell, find_competitor, phase_diagram, suite, suppression_order, Competitor, ErrorAxis,
    FidelityParams, Grid, PreparedCompetitor, SweepSettings,
};
use crate::error::{Error, Result};
use crate::numsearch::{parse_problem, preset, presets, two_stage_search, DEFAULT_HALF_WIDTH, DEFAULT_SEEDS};
use crate::robust::{rep_check, RepKind};
use crate::sequences::io::{format_sequence, read_sequence_file, write_atomic, write_sequence_file};
use crate::sequences::{evaluate, stats_with_slowdown, ControlScheme, DEFAULT_Z_SLOWDOWN};
use crate::su2::{trace_overlap, ErrorParams};
use crate::tables::{table, table_names};

#[derive(Debug, Parser)]
#[command(
    name = "parapulse",
    version,
    about = "Robust composite pulse sequences for parallel single-qubit control",
    after_help = "All angles are given in units of π: `--theta 0.5` is a π/2 rotation."
)]
pub struct Cli {
    /// `key = value` file supplying defaults for numeric flags.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build a sequence from a named family and write it as a sequence file.
    Synth {
        #[command(flatten)]
        family: FamilyArgs,
        /// Output sequence file (stdout if omitted).
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Evaluate a sequence file under quasistatic errors and decoherence.
    Eval {
        file: PathBuf,
        #[command(flatten)]
        errors: ErrorArgs,
        /// Decoherence rate in units of Ω.
        #[arg(long)]
        gamma: Option<f64>,
        #[arg(long)]
        z_slowdown: Option<f64>,
        #[command(flatten)]
        target: TargetArgs,
    },
    /// Certify the error-suppression order from the infidelity slope.
    Order {
        #[command(flatten)]
        family: FamilyArgs,
        /// Sequence file to certify instead of a family.
        #[arg(long, conflicts_with_all = ["family", "n"])]
        file: Option<PathBuf>,
        /// eps, delta, eps_s or diagonal (ε = δ).
        #[arg(long, default_value = "eps")]
        axis: ErrorAxis,
    },
    /// Check that a pulse replacement preserves the bare pulse's first-order error.
    Rep {
        #[command(flatten)]
        family: FamilyArgs,
        /// eps or delta.
        #[arg(long, default_value = "eps", value_parser = parse_rep_kind)]
        kind: RepKind,
        /// Random (θ, φ) pairs to test when --theta is not given.
        #[arg(long, default_value_t = 20)]
        samples: usize,
        #[arg(long, default_value_t = 1)]
        rng_seed: u64,
    },
    /// Two-stage numerical search for robust pulse areas.
    Search {
        /// Problem file (`key = value`).
        #[arg(long, conflicts_with = "preset", required_unless_present = "preset")]
        problem: Option<PathBuf>,
        /// Built-in ansatz, e.g. nUA-AE or nUZ-SAORE.
        #[arg(long, requires = "target")]
        preset: Option<String>,
        /// Benchmark target for --preset: H, Z(pi/4), X(pi/2) or Y(pi/2).
        #[arg(long)]
        target: Option<String>,
        /// Hypercube half-width on each of the preset's error axes.
        #[arg(long)]
        half_width: Option<f64>,
        #[arg(long)]
        seeds: Option<usize>,
        #[arg(long)]
        rng_seed: Option<u64>,
        /// Write the best sequence here.
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Phase diagram of the best competitor over an (ε, δ) grid.
    Sweep {
        #[command(flatten)]
        bench: BenchArgs,
        /// Grid points per axis.
        #[arg(long)]
        grid: Option<usize>,
        #[arg(long)]
        eps_max: Option<f64>,
        #[arg(long)]
        delta_max: Option<f64>,
        /// CSV output (stdout if omitted).
        #[arg(long, short)]
        out: Option<PathBuf>,
        /// JSON summary output (printed to stdout when --out is given and this is not).
        #[arg(long)]
        summary: Option<PathBuf>,
    },
    /// Target-averaged fidelity of every competitor at one error point.
    Compare {
        #[command(flatten)]
        bench: BenchArgs,
        #[arg(long, allow_negative_numbers = true)]
        eps: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        delta: Option<f64>,
    },
    /// Print the embedded parameter tables.
    Tables {
        /// Table to print; lists the available names when omitted.
        #[arg(long)]
        name: Option<String>,
    },
}

#[derive(Debug, Args)]
struct FamilyArgs {
    /// Sequence family, optionally with its order: UP1, SCORE2, sUZ, RA, SR1inUP1, BB1, basic, ...
    #[arg(long)]
    family: Option<String>,
    /// Order of the family (alternative to a suffix on --family).
    #[arg(long)]
    n: Option<usize>,
    /// PC, AC or ZC (defaults to the first scheme the family supports).
    #[arg(long)]
    scheme: Option<ControlScheme>,
    #[command(flatten)]
    target: TargetArgs,
}

#[derive(Debug, Args)]
struct TargetArgs {
    /// Target as the scheme's three basic-sequence angles (PC: α β γ, AC:
    /// XYX, ZC: ZYZ) or a benchmark name (H, Z(pi/4), X(pi/2), Y(pi/2)).
    #[arg(long, num_args = 1..=3, allow_negative_numbers = true, value_name = "ANGLES|NAME")]
    target: Option<Vec<String>>,
    /// Single-rotation target [θ]_φ (Z(θ) for RZ).
    #[arg(long, allow_negative_numbers = true)]
    theta: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    phi: Option<f64>,
}

impl TargetArgs {
    fn spec(&self) -> Result<Option<TargetSpec>> {
        TargetSpec::from_flags(self.target.as_deref(), self.theta, self.phi)
    }
}

#[derive(Debug, Args)]
struct ErrorArgs {
    #[arg(long, allow_negative_numbers = true)]
    eps: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    delta: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    eps_s: Option<f64>,
}

#[derive(Debug, Args)]
struct BenchArgs {
    #[arg(long)]
    scheme: Option<ControlScheme>,
    /// Decoherence rate in units of Ω.
    #[arg(long)]
    gamma: Option<f64>,
    /// Stark error applied to Z rotations.
    #[arg(long, allow_negative_numbers = true)]
    eps_s: Option<f64>,
    #[arg(long)]
    z_slowdown: Option<f64>,
    /// Comma-separated competitor labels (default: the scheme's full suite).
    #[arg(long)]
    competitors: Option<String>,
}

fn parse_rep_kind(s: &str) -> std::result::Result<RepKind, String> {
    match s.to_ascii_lowercase().as_str() {
        "eps" | "epsilon" | "amplitude" => Ok(RepKind::Epsilon),
        "delta" | "detuning" => Ok(RepKind::Delta),
        _ => Err(format!("unknown error kind '{s}' (eps or delta)")),
    }
}

/// Process exit code for an error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Io(_) | Error::Verification(_) => 1,
        Error::InvalidArgument(_) | Error::Domain { .. } => 2,
        Error::Parse { .. } => 3,
        Error::NoConvergence { .. } => 4,
    }
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match run(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

/// Twelve significant digits; scientific notation outside `[1e-4, 1e12)`.
pub fn num(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let mag = x.abs().log10().floor() as i32;
    if (-4..12).contains(&mag) {
        let decimals = (11 - mag) as usize;
        format!("{x:.decimals$}")
    } else {
        format!("{x:.11e}")
    }
}

fn pi_list(v: &[f64]) -> String {
    v.iter().map(|x| num(x / PI)).collect::<Vec<_>>().join(" ")
}

fn emit(path: Option<&Path>, contents: &str) -> Result<()> {
    match path {
        Some(p) => write_atomic(p, contents.as_bytes()),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(contents.as_bytes())?;
            Ok(out.flush()?)
        }
    }
}

pub fn run(cli: Cli) -> Result<()> {
    let cfg = match &cli.config {
        Some(p) => Config::load(p)?,
        None => Config::default(),
    };
    match cli.command {
        Command::Synth { family, out } => synth(&cfg, &family, out.as_deref()),
        Command::Eval { file, errors, gamma, z_slowdown, target } => {
            let seq = read_sequence_file(&file)?;
            let err = error_params(&cfg, &errors)?;
            let fp = FidelityParams::new(cfg.pick(gamma, "gamma", 0.0)?)?.with_z_slowdown(cfg.pick(
                z_slowdown,
                "z_slowdown",
                DEFAULT_Z_SLOWDOWN,
            )?);
            let target = match target.spec()? {
                Some(t) => t.unitary(seq.scheme(), false),
                None => evaluate(&seq, ErrorParams::ZERO),
            };
            let st = stats_with_slowdown(&seq, fp.z_slowdown);
            let overlap = trace_overlap(evaluate(&seq, err), target);
            let f = avg_gate_fidelity(&seq, target, err, fp);
            println!("overlap,avg_gate_fidelity,k,T,duration");
            println!("{},{},{},{},{}", num(overlap), num(f), st.k, num(st.t), num(st.duration));
            Ok(())
        }
        Command::Order { family, file, axis } => {
            let (seq, target) = match file {
                Some(path) => {
                    let seq = read_sequence_file(&path)?;
                    let target = match family.target.spec()? {
                        Some(t) => t.unitary(seq.scheme(), false),
                        None => evaluate(&seq, ErrorParams::ZERO),
                    };
                    (seq, target)
                }
                None => {
                    let s = request(&cfg, &family)?.build()?;
                    (s.sequence, s.target)
                }
            };
            let fit = suppression_order(&seq, target, axis)?;
            let lo = fit.points.first().map_or(f64::NAN, |p| p.0);
            let hi = fit.points.last().map_or(f64::NAN, |p| p.0);
            println!("sequence: {}", seq.label());
            println!("axis: {axis}");
            println!("slope: {}", num(fit.slope));
            println!("points: {} (zeta {} .. {})", fit.points.len(), num(lo), num(hi));
            match fit.order {
                Some(n) => println!("order: {n}"),
                None => println!("order: uncertified"),
            }
            Ok(())
        }
        Command::Rep { family, kind, samples, rng_seed } => rep(&cfg, &family, kind, samples, rng_seed),
        Command::Search { problem, preset: name, target, half_width, seeds, rng_seed, out } => {
            let mut p = match (problem, name) {
                (Some(path), _) => parse_problem(&std::fs::read_to_string(path)?)?,
                (None, Some(name)) => {
                    let pr = preset(&name).ok_or_else(|| {
                        let names: Vec<&str> = presets().iter().map(|p| p.name).collect();
                        Error::InvalidArgument(format!("unknown preset '{name}'; choose from {}", names.join(", ")))
                    })?;
                    let target = target.expect("clap enforces --target with --preset");
                    pr.problem(
                        &target,
                        cfg.pick(half_width, "half_width", DEFAULT_HALF_WIDTH)?,
                        cfg.pick(seeds, "seeds", DEFAULT_SEEDS)?,
                        cfg.pick(rng_seed, "rng_seed", 0)?,
                    )?
                }
                (None, None) => unreachable!("clap requires --problem or --preset"),
            };
            if let Some(s) = seeds {
                p.seeds = s;
            }
            if let Some(r) = rng_seed {
                p.rng_seed = r;
            }
            let res = two_stage_search(&p)?;
            let min_corner = res.corner_fidelities.iter().copied().fold(f64::INFINITY, f64::min);
            println!("problem: {}", p.label);
            println!("thetas: {}", pi_list(&res.thetas));
            println!("objective: {}", num(res.objective));
            println!("fidelity_at_zero: {}", num(res.fidelity_at_zero));
            println!("min_corner_fidelity: {}", num(min_corner));
            println!("gradient_norm: {}", num(res.gradient_norm));
            println!("seed_index: {}", res.seed_index);
            if let Some(path) = out {
                write_sequence_file(&path, &p.to_sequence(&res.thetas)?.with_label(p.label.clone()))?;
            }
            Ok(())
        }
        Command::Sweep { bench, grid, eps_max, delta_max, out, summary } => {
            let (competitors, settings) = bench_setup(&cfg, &bench, 5e-5)?;
            let defaults = Grid::default();
            let grid = Grid {
                eps_max: cfg.pick(eps_max, "eps_max", defaults.eps_max)?,
                delta_max: cfg.pick(delta_max, "delta_max", defaults.delta_max)?,
                points: cfg.pick(grid, "grid", defaults.points)?,
            };
            let diagram = phase_diagram(&competitors, grid, settings)?;
            let mut csv = Vec::new();
            diagram.write_csv(&mut csv)?;
            emit(out.as_deref(), &String::from_utf8(csv).expect("csv output is UTF-8"))?;
            let json = diagram.summary_json()?;
            match (summary, &out) {
                (Some(p), _) => write_atomic(&p, json.as_bytes())?,
                (None, Some(_)) => println!("{json}"),
                (None, None) => {}
            }
            Ok(())
        }
        Command::Compare { bench, eps, delta } => {
            let (competitors, settings) = bench_setup(&cfg, &bench, 0.0)?;
            let eps = cfg.pick(eps, "eps", 0.0)?;
            let delta = cfg.pick(delta, "delta", 0.0)?;
            let prepared = competitors
                .iter()
                .map(|c| PreparedCompetitor::new(c, settings.z_slowdown))
                .collect::<Result<Vec<_>>>()?;
            let cell = evaluate_cell(&prepared, eps, delta, &settings);
            println!("label,robust_family,k,duration,avg_fidelity,winner");
            for (i, (c, f)) in prepared.iter().zip(&cell.fidelities).enumerate() {
                let k = c.sequences.iter().map(|s| s.len()).max().unwrap_or(0);
                println!("{},{},{k},{},{},{}", c.label, c.robust_family, num(c.duration), num(*f), i == cell.winner);
            }
            Ok(())
        }
        Command::Tables { name } => match name {
            None => {
                for n in table_names() {
                    println!("{n}");
                }
                Ok(())
            }
            Some(n) => {
                let t = table(&n).ok_or_else(|| {
                    Error::InvalidArgument(format!("unknown table '{n}'; choose from {}", table_names().join(", ")))
                })?;
                emit(None, t.text())
            }
        },
    }
}

fn error_params(cfg: &Config, e: &ErrorArgs) -> Result<ErrorParams> {
    let err = ErrorParams::new(
        cfg.pick(e.eps, "eps", 0.0)?,
        cfg.pick(e.delta, "delta", 0.0)?,
        cfg.pick(e.eps_s, "eps_s", 0.0)?,
    );
    if !err.is_finite() {
        return Err(Error::InvalidArgument("error parameters must be finite".into()));
    }
    Ok(err)
}

fn request(cfg: &Config, f: &FamilyArgs) -> Result<FamilyRequest> {
    let family = f.family.as_deref().ok_or_else(|| Error::InvalidArgument("--family is required".into()))?;
    let scheme = match f.scheme {
        Some(s) => Some(s),
        None => cfg.get("scheme")?,
    };
    FamilyRequest::new(family, f.n, scheme, f.target.spec()?)
}

fn synth(cfg: &Config, f: &FamilyArgs, out: Option<&Path>) -> Result<()> {
    let s = request(cfg, f)?.build()?;
    let st = stats_with_slowdown(&s.sequence, cfg.get("z_slowdown")?.unwrap_or(DEFAULT_Z_SLOWDOWN));
    let infid = 1.0 - trace_overlap(evaluate(&s.sequence, ErrorParams::ZERO), s.target);
    let mut report = String::new();
    report.push_str(&format!("sequence: {} ({})\n", s.sequence.label(), s.sequence.scheme()));
    if let Some(p) = &s.params {
        report.push_str(&format!("params: {}\n", pi_list(p)));
    }
    report.push_str(&format!("k: {}\nT: {}\nduration: {}\n", st.k, num(st.t), num(st.duration)));
    report.push_str(&format!("residual: {}\ntarget_error: {}\n", num(s.residual), num(infid)));
    match out {
        Some(path) => {
            write_sequence_file(path, &s.sequence)?;
            print!("{report}");
        }
        None => {
            emit(None, &format_sequence(&s.sequence))?;
            eprint!("{report}");
        }
    }
    Ok(())
}

fn rep(cfg: &Config, f: &FamilyArgs, kind: RepKind, samples: usize, rng_seed: u64) -> Result<()> {
    let base = request(
        cfg,
        &FamilyArgs {
            family: f.family.clone(),
            n: f.n,
            scheme: f.scheme,
            target: TargetArgs { target: None, theta: Some(0.5), phi: None },
        },
    )?;
    if f.target.target.is_some() {
        return Err(Error::InvalidArgument("rep checks single-rotation replacements; use --theta/--phi".into()));
    }
    let points: Vec<(f64, f64)> = match f.target.spec()? {
        Some(TargetSpec::Rotation { theta, phi }) => vec![(theta, phi)],
        _ => {
            if samples == 0 {
                return Err(Error::InvalidArgument("--samples must be positive".into()));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
            (0..samples).map(|_| (rng.gen_range(0.1..=1.0) * PI, rng.gen_range(0.0..2.0) * PI)).collect()
        }
    };
    let builder = |theta: f64, phi: f64| {
        FamilyRequest { target: TargetSpec::Rotation { theta, phi }, ..base }.build().map(|s| s.sequence)
    };
    println!("theta,phi,deviation,pass");
    let mut worst: f64 = 0.0;
    let mut all_pass = true;
    for (theta, phi) in points {
        let r = rep_check(builder, theta, phi, kind)?;
        println!("{},{},{},{}", num(theta / PI), num(phi / PI), num(r.deviation), r.pass);
        worst = worst.max(r.deviation);
        all_pass &= r.pass;
    }
    println!("max_deviation: {}", num(worst));
    println!("result: {}", if all_pass { "pass" } else { "fail" });
    if all_pass {
        Ok(())
    } else {
        Err(Error::Verification(format!("{} is not REP for this error", base.label())))
    }
}

fn bench_setup(cfg: &Config, b: &BenchArgs, default_gamma: f64) -> Result<(Vec<Competitor>, SweepSettings)> {
    let scheme = cfg.pick(b.scheme, "scheme", ControlScheme::PC)?;
    let competitors = match b.competitors.clone().map(Some).unwrap_or(cfg.get::<String>("competitors")?) {
        None => suite(scheme),
        Some(list) => list
            .split(',')
            .map(str::trim)
            .filter(|l| !l.is_empty())
            .map(|l| find_competitor(scheme, l))
            .collect::<Result<Vec<_>>>()?,
    };
    if competitors.is_empty() {
        return Err(Error::InvalidArgument("no competitors given".into()));
    }
    let gamma = cfg.pick(b.gamma, "gamma", default_gamma)?;
    FidelityParams::new(gamma)?;
    let mut settings = SweepSettings::new(gamma);
    settings.z_slowdown = cfg.pick(b.z_slowdown, "z_slowdown", DEFAULT_Z_SLOWDOWN)?;
    settings.epsilon_s = cfg.pick(b.eps_s, "eps_s", 0.0)?;
    Ok((competitors, settings))
}
