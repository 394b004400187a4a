//! `frameunc` command-line front end.
//!
//! Exit status: 0 on success (and when every verified inequality holds), 1 when
//! `verify` finds a violation, 2 on usage or input errors. The worker thread
//! count follows `RAYON_NUM_THREADS`.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use frameunc::bounds::{
    bound_constants, entropic_rhs, lp_bound, support_bound, tight_shannon_bound, weak_support_bound, FramePair,
};
use frameunc::coherence::{coherence_curve, uniform_grid};
use frameunc::generators::{FamilyRegistry, GeneratorConfig};
use frameunc::io::{frames_from_json, frames_to_json, signal_from_json};
use frameunc::separation::{certify_split, exhaustive_separate, DEFAULT_FEASIBILITY_TOL};
use frameunc::verify::{random_trials, CheckParams, InequalityRegistry, TrialConfig, DEFAULT_SLACK_TOL};
use frameunc::Frame;

#[derive(Parser)]
#[command(name = "frameunc", version, about = "Uncertainty inequalities for pairs of finite frames")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate frames and write them as JSON.
    Gen {
        /// Frame family (see `list`).
        #[arg(long)]
        kind: String,
        #[arg(long)]
        dim: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Block dimensions for `bmub`, e.g. `2,4`.
        #[arg(long, value_delimiter = ',')]
        blocks: Vec<usize>,
        /// Window lengths for `mdct`, one basis per entry.
        #[arg(long, value_delimiter = ',')]
        window: Vec<usize>,
        /// Catalogue name for `tight`: mercedes, union2onb, harmonic.
        #[arg(long)]
        name: Option<String>,
        /// Vectors per dimension for random and harmonic frames.
        #[arg(long, default_value_t = 2.0)]
        redundancy: f64,
        /// Output file; standard output when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sample the directed r-coherences and their geometric mean as CSV.
    Curve {
        /// JSON file holding two frames.
        #[arg(long)]
        pair: PathBuf,
        #[arg(long, default_value_t = 1.0)]
        r_min: f64,
        #[arg(long, default_value_t = 2.0)]
        r_max: f64,
        #[arg(long, default_value_t = 201)]
        count: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Report every bound constant of a pair as JSON.
    Bounds {
        #[arg(long)]
        pair: PathBuf,
        /// Coherence orders in [1, 2).
        #[arg(long = "r", value_delimiter = ',', default_values_t = [1.0, 1.5])]
        r: Vec<f64>,
        /// Renyi orders; values outside [r/2, 1] are skipped for that r.
        /// Defaults to five evenly spaced points of [r/2, 1].
        #[arg(long, value_delimiter = ',')]
        alpha: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_values_t = [1.0, 1.5, 2.0])]
        p: Vec<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check the inequalities on random and structured signals.
    Verify {
        #[arg(long)]
        pair: PathBuf,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_SLACK_TOL)]
        tol: f64,
        /// Inequality families to check (see `list`); all when omitted.
        #[arg(long = "inequality")]
        inequalities: Vec<String>,
        /// Skip frame elements and sparse combinations.
        #[arg(long)]
        random_only: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sparsest split u = x + y with Ux and Vy sparse.
    Separate {
        #[arg(long)]
        u: PathBuf,
        #[arg(long)]
        v: PathBuf,
        /// JSON signal file `{"values": [[re, im], ...]}`.
        #[arg(long)]
        signal: PathBuf,
        /// Largest total support size searched.
        #[arg(long, default_value_t = 3)]
        kmax: usize,
        /// Relative least-squares residual accepted as feasible.
        #[arg(long, default_value_t = DEFAULT_FEASIBILITY_TOL)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List frame families and inequality families.
    List,
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn emit_json(out: Option<&Path>, value: &impl serde::Serialize) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    emit(out, &text)
}

fn load_frame(path: &Path) -> Result<Frame> {
    let mut frames = frames_from_json(&read(path)?).with_context(|| format!("parsing {}", path.display()))?;
    if frames.len() != 1 {
        bail!("{} holds {} frames, expected one", path.display(), frames.len());
    }
    Ok(frames.remove(0))
}

fn load_pair(path: &Path) -> Result<FramePair> {
    let frames = frames_from_json(&read(path)?).with_context(|| format!("parsing {}", path.display()))?;
    let [u, v]: [Frame; 2] = frames
        .try_into()
        .map_err(|f: Vec<Frame>| anyhow::anyhow!("{} holds {} frames, expected two", path.display(), f.len()))?;
    Ok(FramePair::new(u, v)?)
}

/// Fifteen significant digits.
fn sig15(x: f64) -> String {
    format!("{x:.14e}")
}

/// `null` stands for an infinite or undefined value.
fn finite(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        Value::Null
    }
}

fn cmd_gen(
    kind: &str,
    cfg: GeneratorConfig,
    out: Option<&Path>,
) -> Result<()> {
    let frames = FamilyRegistry::builtin().generate(kind, &cfg)?;
    let mut text = frames_to_json(&frames);
    text.push('\n');
    emit(out, &text)
}

fn cmd_curve(pair: &Path, r_min: f64, r_max: f64, count: usize, out: Option<&Path>) -> Result<()> {
    if !(1.0 <= r_min && r_min <= r_max && r_max <= 2.0) {
        bail!("grid [{r_min}, {r_max}] must lie within [1, 2]");
    }
    if count == 0 || (count == 1 && r_min != r_max) {
        bail!("grid count must be at least 2 for a non-degenerate range");
    }
    let pair = load_pair(pair)?;
    let grid = if count == 1 { vec![r_min] } else { uniform_grid(r_min, r_max, count) };
    let curve = coherence_curve(pair.gram_uv(), pair.gram_vu(), &grid)?;
    let mut text = String::from("r,mu_uv,mu_vu,geomean\n");
    for i in 0..grid.len() {
        text.push_str(&format!(
            "{},{},{},{}\n",
            sig15(curve.r_grid[i]),
            sig15(curve.mu_uv[i]),
            sig15(curve.mu_vu[i]),
            sig15(curve.geomean[i])
        ));
    }
    let m = pair.mu_star();
    text.push_str(&format!("# mu_star={}, r_opt={}\n", sig15(m.value), sig15(m.r_opt)));
    emit(out, &text)
}

fn cmd_bounds(pair: &Path, rs: &[f64], alphas: &[f64], ps: &[f64], out: Option<&Path>) -> Result<()> {
    let pair = load_pair(pair)?;
    let support = support_bound(&pair);
    let mut constants = Vec::new();
    let mut entropic = Vec::new();
    let mut lp = Vec::new();
    let mut weak = Vec::new();
    for &r in rs {
        if !(1.0..2.0).contains(&r) {
            bail!("r = {r} outside [1, 2)");
        }
        constants.push(serde_json::to_value(bound_constants(&pair, r)?)?);
        let grid = if alphas.is_empty() {
            CheckParams::default().alphas(r)
        } else {
            alphas.iter().copied().filter(|&a| a >= r / 2.0 && a <= 1.0).collect()
        };
        for alpha in grid {
            let b = entropic_rhs(&pair, r, alpha)?;
            entropic.push(json!({
                "r": r,
                "alpha": alpha,
                "beta": finite(b.beta),
                "rhs": finite(b.rhs),
                "informative": b.is_informative(),
            }));
        }
        for &p in ps.iter().filter(|&&p| p >= r && p <= 2.0) {
            lp.push(json!({ "p": p, "r": r, "constant": lp_bound(&pair, p, r)? }));
        }
        weak.push(json!({ "r": r, "bound": weak_support_bound(&pair, r)? }));
    }
    let shannon = if pair.is_tight() {
        json!(tight_shannon_bound(&pair)?)
    } else {
        Value::Null
    };
    let report = json!({
        "u": pair.u().label(),
        "v": pair.v().label(),
        "tight": pair.is_tight(),
        "rho": pair.rho(),
        "sigma": pair.sigma(),
        "mu_star": support.mu_star,
        "r_opt": support.r_opt,
        "support": support,
        "constants": constants,
        "entropic": entropic,
        "shannon": shannon,
        "lp": lp,
        "weak_support": weak,
    });
    emit_json(out, &report)
}

fn cmd_verify(pair: &Path, cfg: TrialConfig, out: Option<&Path>) -> Result<bool> {
    let pair = load_pair(pair)?;
    let report = random_trials(&pair, &cfg)?;
    emit_json(out, &report)?;
    Ok(report.all_pass)
}

fn cmd_separate(u: &Path, v: &Path, signal: &Path, kmax: usize, tol: f64, out: Option<&Path>) -> Result<()> {
    let pair = FramePair::new(load_frame(u)?, load_frame(v)?)?;
    let s = signal_from_json(&read(signal)?).with_context(|| format!("parsing {}", signal.display()))?;
    let result = exhaustive_separate(&pair, &s, kmax, tol)?;
    let certificates = result
        .candidates
        .iter()
        .map(|c| certify_split(&pair, &c.x, &c.y))
        .collect::<frameunc::Result<Vec<_>>>()?;
    let certified = result.unique && !result.infeasible && certificates.first().is_some_and(|c| c.certified);
    let report = json!({
        "mu_star": pair.mu_star().value,
        "certificate_threshold": 1.0 / pair.mu_star().value,
        "min_cost": result.min_cost,
        "unique": result.unique,
        "infeasible": result.infeasible,
        "kmax": kmax,
        "certified": certified,
        "splits": result.candidates,
        "certificates": certificates,
    });
    emit_json(out, &report)
}

fn cmd_list() -> Result<()> {
    let frames = FamilyRegistry::builtin();
    let mut text = String::from("frame families:\n");
    for name in frames.names() {
        text.push_str(&format!("  {name:<14} {}\n", frames.get(name)?.summary()));
    }
    let ineq = InequalityRegistry::builtin();
    text.push_str("inequality families:\n");
    for name in ineq.names() {
        text.push_str(&format!("  {name:<14} {}\n", ineq.get(name)?.summary()));
    }
    emit(None, &text)
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Gen {
            kind,
            dim,
            seed,
            blocks,
            window,
            name,
            redundancy,
            out,
        } => {
            let cfg = GeneratorConfig {
                dim,
                seed,
                block_dims: blocks,
                window_lens: window,
                redundancy,
                tight: name,
            };
            cmd_gen(&kind, cfg, out.as_deref())?;
        }
        Command::Curve {
            pair,
            r_min,
            r_max,
            count,
            out,
        } => cmd_curve(&pair, r_min, r_max, count, out.as_deref())?,
        Command::Bounds { pair, r, alpha, p, out } => cmd_bounds(&pair, &r, &alpha, &p, out.as_deref())?,
        Command::Verify {
            pair,
            trials,
            seed,
            tol,
            inequalities,
            random_only,
            out,
        } => {
            let cfg = TrialConfig {
                trials,
                seed,
                inequalities,
                params: CheckParams::default(),
                tol,
                structured: !random_only,
            };
            if !cmd_verify(&pair, cfg, out.as_deref())? {
                return Ok(ExitCode::from(1));
            }
        }
        Command::Separate {
            u,
            v,
            signal,
            kmax,
            tol,
            out,
        } => cmd_separate(&u, &v, &signal, kmax, tol, out.as_deref())?,
        Command::List => cmd_list()?,
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
