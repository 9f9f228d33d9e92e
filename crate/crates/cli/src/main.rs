use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use coporeg_core::config::RunConfig;
use coporeg_core::generate::generate_instance;
use coporeg_core::model::{parse_matrix, parse_problem, serialize_problem, CopositiveProgram, SimplexPoint};
use coporeg_core::oracle::{is_copositive, CopositivityVerdict};
use coporeg_core::regularizer::{
    compress_ledger, feasibility_equiv_sample, minimal_face, one_step_regularize, reg_lcop, verify_ledger,
    RegularizedProblem,
};
use coporeg_core::report::{RegularizedSection, Report, Status};
use serde_json::json;

/// Environment variable naming a JSON run configuration. Flags override it.
const CONFIG_ENV: &str = "COPOREG_CONFIG";

/// Largest `p` for which the regularized rows are echoed as text.
const ECHO_MAX_P: usize = 6;

#[derive(Parser)]
#[command(name = "coporeg", version, about = "Regularize linear copositive programs that fail the Slater condition")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Subcommand)]
enum Command {
    /// Run the regularization algorithm and write a JSON report.
    Regularize {
        #[arg(long)]
        problem: PathBuf,
    },
    /// Decide whether a matrix is copositive.
    CheckCopositive {
        #[arg(long)]
        matrix: PathBuf,
    },
    /// Regularize in one step from a given vertex set W of the immobile-index hull.
    OneStep {
        #[arg(long)]
        problem: PathBuf,
        #[arg(long = "W", visible_alias = "w")]
        w: PathBuf,
        /// Turn the rows on the positive support of each point into equalities.
        #[arg(long)]
        strict: bool,
    },
    /// Describe the minimal face containing the feasible set.
    MinimalFace {
        #[arg(long)]
        problem: PathBuf,
        /// Vertex set of the immobile-index hull; defaults to the points found by the algorithm.
        #[arg(long = "W", visible_alias = "w")]
        w: Option<PathBuf>,
        /// Report from a previous `regularize` run; the algorithm is rerun when absent.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Check the face ledger stored in a report.
    VerifyLedger {
        #[arg(long)]
        problem: PathBuf,
        #[arg(long)]
        report: PathBuf,
    },
    /// Compare the original and regularized feasible sets on random points.
    EquivCheck {
        #[arg(long)]
        problem: PathBuf,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Write a random problem with planted immobile indices.
    Generate {
        #[arg(long)]
        p: usize,
        #[arg(long)]
        n: usize,
        /// JSON list of simplex points to plant, or an object with a `W` field.
        #[arg(long)]
        planted: Option<PathBuf>,
    },
}

#[derive(Args)]
struct Common {
    /// Write the JSON result here.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Grid step of the index-set oracle.
    #[arg(long, global = true)]
    h: Option<f64>,
    /// Iteration cap of the regularization loop.
    #[arg(long, global = true)]
    cap: Option<usize>,
    /// Seed for sampling and instance generation.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Number of random samples for the checking commands.
    #[arg(long, global = true)]
    samples: Option<usize>,
    /// Half-width of the sampling box around the witness.
    #[arg(long, global = true)]
    radius: Option<f64>,
    /// Print the diagnostics of each subproblem to stderr.
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
    /// Simplex-membership and row-feasibility slack.
    #[arg(long, global = true)]
    tol_feas: Option<f64>,
    /// Coordinates above this are in the positive support.
    #[arg(long, global = true)]
    tol_support: Option<f64>,
    /// Pivot threshold of rank computations.
    #[arg(long, global = true)]
    tol_rank: Option<f64>,
    /// `min t'Dt >= -cop` declares D copositive.
    #[arg(long, global = true)]
    tol_cop: Option<f64>,
    /// `min t'Dt > strict` declares D strictly copositive.
    #[arg(long, global = true)]
    tol_strict: Option<f64>,
    /// LP optimality and feasibility tolerance.
    #[arg(long, global = true)]
    tol_lp: Option<f64>,
    /// LP multipliers at or below this magnitude count as zero.
    #[arg(long, global = true)]
    tol_mult: Option<f64>,
    /// Stationarity residual allowed in a dual certificate.
    #[arg(long, global = true)]
    tol_cert: Option<f64>,
    /// A master optimum with `|mu| <= zero` counts as zero.
    #[arg(long, global = true)]
    tol_zero: Option<f64>,
    /// A master optimum with `mu <= -neg` counts as negative.
    #[arg(long, global = true)]
    tol_neg: Option<f64>,
    /// Half-width of the tie band in equivalence sampling.
    #[arg(long, global = true)]
    tol_band: Option<f64>,
}

impl Common {
    fn config(&self) -> Result<RunConfig> {
        let mut cfg = match std::env::var_os(CONFIG_ENV) {
            Some(path) => {
                let text = read_text(Path::new(&path))?;
                RunConfig::from_json(&text).with_context(|| format!("reading {CONFIG_ENV}"))?
            }
            None => RunConfig::default(),
        };
        let tol = &mut cfg.solver.tol;
        let overrides = [
            (self.tol_feas, &mut tol.feas),
            (self.tol_support, &mut tol.support),
            (self.tol_rank, &mut tol.rank),
            (self.tol_cop, &mut tol.cop),
            (self.tol_strict, &mut tol.strict),
            (self.tol_lp, &mut tol.lp),
            (self.tol_mult, &mut tol.mult),
            (self.tol_cert, &mut tol.cert),
            (self.tol_zero, &mut tol.zero),
            (self.tol_neg, &mut tol.neg),
            (self.tol_band, &mut tol.band),
        ];
        for (flag, slot) in overrides {
            if let Some(v) = flag {
                *slot = v;
            }
        }
        if let Some(h) = self.h {
            cfg.solver.h = h;
        }
        if self.cap.is_some() {
            cfg.solver.iteration_cap = self.cap;
        }
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(n) = self.samples {
            cfg.samples = n;
        }
        if let Some(r) = self.radius {
            cfg.sample_radius = r;
        }
        if let Some(out) = &self.out {
            cfg.out = Some(out.display().to_string());
        }
        cfg.verbosity = cfg.verbosity.max(self.verbose);
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Points file: a bare list of simplex points or `{"W": [...]}`.
#[derive(serde::Deserialize)]
#[serde(untagged)]
enum PointsFile {
    Bare(Vec<SimplexPoint>),
    Wrapped {
        #[serde(rename = "W")]
        w: Vec<SimplexPoint>,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version exit 0; usage errors exit 2.
            let _ = e.print();
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: &Cli) -> Result<ExitCode> {
    let cfg = cli.common.config()?;
    match &cli.command {
        Command::Regularize { problem } => regularize(&load_problem(problem)?, &cfg),
        Command::CheckCopositive { matrix } => check_copositive(matrix, &cfg),
        Command::OneStep { problem, w, strict } => {
            let prog = load_problem(problem)?;
            let w = load_points(w)?;
            let reg = one_step_regularize(&prog, &w, *strict, &cfg.solver)?;
            println!("one-step regularization succeeded, margin {}", num(reg.margin));
            echo_rows(&reg);
            let section = RegularizedSection::from_problem(&reg, &cfg.solver.tol)?;
            write_out(&cfg, &serde_json::to_value(section)?)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::MinimalFace { problem, w, report } => {
            let prog = load_problem(problem)?;
            let reg = regularized(&prog, report.as_deref(), &cfg)?;
            let w = match w {
                Some(path) => load_points(path)?,
                None => reg.taus.clone(),
            };
            if w.is_empty() {
                bail!("the problem is regular; the minimal face is the whole cone");
            }
            let face = minimal_face(&prog, &w, &reg, &cfg.solver)?;
            for (t, m) in face.vertices.iter().zip(&face.m_sets) {
                println!("t = {:?}  M = {m:?}", t.coords());
            }
            let check = face.cross_check(cfg.samples, cfg.seed, &cfg.solver.tol)?;
            println!("cross-check: {} samples, {} members, both forms agree", check.samples, check.members_form1);
            write_out(&cfg, &json!({ "face": face, "cross_check": check }))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::VerifyLedger { problem, report } => {
            let prog = load_problem(problem)?;
            let rep = load_report(report)?;
            let checks = verify_ledger(&rep.ledger, &prog, cfg.samples, cfg.seed, &cfg.solver.tol)?;
            for c in &checks.entries {
                println!(
                    "entry m = {}: {}  kernel {:.1e}, members {}/{}, face violations {}, orthogonality violations {}{}",
                    c.m,
                    if c.passed() { "ok" } else { "FAILED" },
                    c.kernel_residual,
                    c.members,
                    c.samples,
                    c.face_violations,
                    c.orthogonality_violations,
                    c.dual_cone_issue.as_deref().map(|s| format!(", {s}")).unwrap_or_default(),
                );
            }
            let comp = compress_ledger(&rep.ledger, &prog, cfg.solver.tol.rank)?;
            println!("core entries {:?}, s* = {}", comp.m_s, comp.s_star);
            write_out(&cfg, &json!({ "checks": checks, "compressed": comp }))?;
            Ok(if checks.passed { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Command::EquivCheck { problem, report } => {
            let prog = load_problem(problem)?;
            let reg = regularized(&prog, report.as_deref(), &cfg)?;
            let rep = feasibility_equiv_sample(&prog, &reg, cfg.samples, cfg.seed, cfg.sample_radius, &cfg.solver)?;
            println!(
                "{} samples: {} agree, {} ties, {} undecided, {} disagree ({} feasible)",
                rep.samples,
                rep.agreements,
                rep.ties,
                rep.undecided,
                rep.disagreements.len(),
                rep.feasible_count
            );
            for d in rep.disagreements.iter().take(5) {
                println!(
                    "  x = {:?}: min t'A(x)t = {:.3e}, regularized margin {:.3e}",
                    d.x, d.copositive_min, d.regularized_margin
                );
            }
            write_out(&cfg, &serde_json::to_value(&rep)?)?;
            Ok(if rep.disagreements.is_empty() { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Command::Generate { p, n, planted } => {
            let planted = match planted {
                Some(path) => load_points(path)?,
                None => Vec::new(),
            };
            let prog = generate_instance(cfg.seed, *p, *n, &planted)?;
            let bytes = serialize_problem(&prog);
            match &cfg.out {
                Some(out) => std::fs::write(out, &bytes).with_context(|| format!("writing {out}"))?,
                None => println!("{}", String::from_utf8_lossy(&bytes)),
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn regularize(prog: &CopositiveProgram, cfg: &RunConfig) -> Result<ExitCode> {
    let run = reg_lcop(prog, &cfg.solver)?;
    if cfg.verbosity > 0 {
        for (k, d) in run.trace.iter().enumerate() {
            eprintln!("subproblem {k}: {d:?}");
        }
    }
    let comp = compress_ledger(&run.ledger, prog, cfg.solver.tol.rank)?;
    let report = Report::from_run(&run, Some(comp), &cfg.solver.tol)?;
    match report.status {
        Status::Regular => println!("regular: the Slater condition holds, m* = 0"),
        Status::Regularized => println!("regularized after m* = {} iterations", report.m_star.unwrap_or(0)),
        Status::Failed => println!("failed: {}", report.reason.as_deref().unwrap_or("unknown reason")),
    }
    if let Some(reg) = run.problem() {
        echo_rows(reg);
    } else if let Some(sec) = &report.regularized {
        println!("witness x = {:?}, margin {}", sec.witness, num(sec.margin));
    }
    if let Some(out) = &cfg.out {
        std::fs::write(out, report.to_json()).with_context(|| format!("writing {out}"))?;
    }
    Ok(if report.status == Status::Failed { ExitCode::from(1) } else { ExitCode::SUCCESS })
}

fn check_copositive(path: &Path, cfg: &RunConfig) -> Result<ExitCode> {
    let d = parse_matrix(&read_bytes(path)?)?;
    let verdict = is_copositive(&d, &cfg.solver.tol)?;
    let value = match &verdict {
        CopositivityVerdict::Copositive { margin } => {
            println!("copositive, margin {}", num(*margin));
            json!({ "copositive": true, "margin": margin })
        }
        CopositivityVerdict::NotCopositive { witness, value } => {
            println!("not copositive, t'Dt = {} at t = {:?}", num(*value), witness.coords());
            json!({ "copositive": false, "value": value, "witness": witness })
        }
    };
    write_out(cfg, &value)?;
    Ok(ExitCode::SUCCESS)
}

/// The regularized problem from a saved report, or from a fresh run.
fn regularized(prog: &CopositiveProgram, report: Option<&Path>, cfg: &RunConfig) -> Result<RegularizedProblem> {
    if let Some(path) = report {
        let rep = load_report(path)?;
        let sec =
            rep.regularized.ok_or_else(|| anyhow!("report has status {:?} and no regularized problem", rep.status))?;
        return Ok(sec.to_problem(prog)?);
    }
    let run = reg_lcop(prog, &cfg.solver)?;
    match run.problem() {
        Some(reg) => Ok(reg.clone()),
        None => match run.status {
            coporeg_core::regularizer::RegStatus::Regular { witness, margin } => {
                Ok(RegularizedProblem::unchanged(prog, witness, margin))
            }
            coporeg_core::regularizer::RegStatus::Failed { reason } => {
                bail!("regularization failed: {reason}")
            }
            coporeg_core::regularizer::RegStatus::Regularized { .. } => {
                unreachable!("handled by problem()")
            }
        },
    }
}

fn echo_rows(reg: &RegularizedProblem) {
    println!("witness x = {:?}, margin {}", reg.witness, num(reg.margin));
    if reg.prog.p() > ECHO_MAX_P {
        return;
    }
    for (i, t) in reg.taus.iter().enumerate() {
        println!("tau[{i}] = {:?}", t.coords());
    }
    for &(i, k) in &reg.eq_rows {
        println!("  (A(x) tau[{i}])_{k} = 0");
    }
    for &(i, k) in &reg.ineq_rows {
        println!("  (A(x) tau[{i}])_{k} >= 0");
    }
    match reg.omega() {
        Some(om) => println!("  t'A(x)t >= 0 for t with l1 distance >= {} from conv(tau)", num(om.sigma())),
        None => println!("  A(x) copositive"),
    }
}

/// Prints values that are zero up to roundoff as `0.0`.
fn num(v: f64) -> String {
    if !v.is_finite() {
        return format!("{v}");
    }
    let r = (v * 1e12).round() / 1e12;
    format!("{:?}", if r == 0.0 { 0.0 } else { r })
}

fn write_out(cfg: &RunConfig, value: &serde_json::Value) -> Result<()> {
    if let Some(out) = &cfg.out {
        std::fs::write(out, serde_json::to_string_pretty(value)?).with_context(|| format!("writing {out}"))?;
    }
    Ok(())
}

fn read_bytes(path: &Path) -> Result<Vec<u8>> {
    std::fs::read(path).map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => anyhow!("file not found: {}", path.display()),
        _ => anyhow!("cannot read {}: {e}", path.display()),
    })
}

fn read_text(path: &Path) -> Result<String> {
    String::from_utf8(read_bytes(path)?).map_err(|_| anyhow!("{} is not UTF-8", path.display()))
}

fn load_problem(path: &Path) -> Result<CopositiveProgram> {
    parse_problem(&read_bytes(path)?).with_context(|| format!("in {}", path.display()))
}

fn load_report(path: &Path) -> Result<Report> {
    Report::from_json(&read_text(path)?).with_context(|| format!("in {}", path.display()))
}

fn load_points(path: &Path) -> Result<Vec<SimplexPoint>> {
    let parsed: PointsFile =
        serde_json::from_slice(&read_bytes(path)?).with_context(|| format!("in {}", path.display()))?;
    Ok(match parsed {
        PointsFile::Bare(w) | PointsFile::Wrapped { w } => w,
    })
}
