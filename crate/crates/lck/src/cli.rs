//! Argument parsing and the five subcommands.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use lck_core::fields::generators;
use lck_core::fields::MetricField;
use lck_core::flow::{run_flow, FlowStatus};
use lck_core::lck::{classify, functional_l, functional_normalized, normalizer};
use lck_core::variation::{first_variation, first_variation_normalized};

use crate::config::{Command, FunctionalKind, Profile, RunConfig};
use crate::output::{self, key_values, sci, TraceRow, TraceWriter, VariationRow};
use crate::{presets, snapshot, verify, CliError};

/// Every check passed.
pub const EXIT_OK: i32 = 0;
/// Some verification row or gradient check failed.
pub const EXIT_FAIL: i32 = 1;
/// Bad arguments, configuration or input files.
pub const EXIT_USAGE: i32 = 2;
/// Numerical hard failure (positivity stall, convention disagreement).
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "lck", version, about = "Verification, evaluation and gradient flow of the lcK energy functionals")]
struct Args {
    /// JSON run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Seed override for the metric and the verification suites.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Multiply every tolerance upper bound.
    #[arg(long, global = true)]
    tol_scale: Option<f64>,
    /// Suppress progress and summaries on stderr.
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Option<Cmd>,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Run every verification suite.
    Verify {
        /// Small grids and sample counts.
        #[arg(long)]
        quick: bool,
    },
    /// Evaluate the functional and classification residuals.
    Eval,
    /// Compare analytic and finite-difference first variations.
    GradCheck,
    /// Run the gradient flow.
    Flow,
    /// Summarize grad-check CSV files.
    Report {
        /// CSV files (overrides `inputs` from the configuration).
        inputs: Vec<PathBuf>,
    },
}

struct Ctx {
    cfg: RunConfig,
    quiet: bool,
}

impl Ctx {
    fn note(&self, msg: &str) {
        if !self.quiet {
            eprintln!("{msg}");
        }
    }

    fn out_file(&self, name: &str) -> Result<Option<PathBuf>, CliError> {
        match &self.cfg.out {
            Some(dir) => {
                std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
                Ok(Some(dir.join(name)))
            }
            None => Ok(None),
        }
    }

    /// Print `text` to stdout and mirror it into the output directory.
    fn emit(&self, name: &str, text: &str) -> Result<(), CliError> {
        print!("{text}");
        if let Some(p) = self.out_file(name)? {
            output::write_file(&p, text)?;
        }
        Ok(())
    }
}

/// Parse `args` (including the program name), run, and return the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args = match Args::try_parse_from(args) {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match setup(args).and_then(dispatch) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("lck: {e}");
            e.exit_code()
        }
    }
}

fn setup(args: Args) -> Result<Ctx, CliError> {
    let mut cfg = match &args.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    match &args.command {
        Some(Cmd::Verify { quick }) => {
            cfg.command = Command::Verify;
            if *quick {
                cfg.profile = Profile::Quick;
            }
        }
        Some(Cmd::Eval) => cfg.command = Command::Eval,
        Some(Cmd::GradCheck) => cfg.command = Command::GradCheck,
        Some(Cmd::Flow) => cfg.command = Command::Flow,
        Some(Cmd::Report { inputs }) => {
            cfg.command = Command::Report;
            if !inputs.is_empty() {
                cfg.inputs = inputs.clone();
            }
        }
        None => {}
    }
    if let Some(out) = args.out {
        cfg.out = Some(out);
    }
    if let Some(s) = args.seed {
        cfg.metric.seed = s;
    }
    if let Some(s) = args.tol_scale {
        if !(s.is_finite() && s > 0.0) {
            return Err(CliError::Config(format!("--tol-scale must be positive (got {s})")));
        }
        cfg.tolerances = cfg.tolerances.scaled(s);
    }
    cfg.validate()?;
    Ok(Ctx { cfg, quiet: args.quiet })
}

fn dispatch(ctx: Ctx) -> Result<i32, CliError> {
    match ctx.cfg.command {
        Command::Verify => cmd_verify(&ctx),
        Command::Eval => cmd_eval(&ctx),
        Command::GradCheck => cmd_grad_check(&ctx),
        Command::Flow => cmd_flow(&ctx),
        Command::Report => cmd_report(&ctx),
    }
}

fn rho(ctx: &Ctx, m: &MetricField) -> Result<Option<MetricField>, CliError> {
    match ctx.cfg.functional {
        FunctionalKind::L => Ok(None),
        FunctionalKind::Normalized => Ok(Some(presets::build(m.geometry(), &ctx.cfg.rho)?)),
    }
}

fn cmd_verify(ctx: &Ctx) -> Result<i32, CliError> {
    let opts = verify::Options { profile: ctx.cfg.profile, tol: ctx.cfg.tolerances.clone(), seed: ctx.cfg.metric.seed };
    let report = verify::run(&opts, &mut |line| ctx.note(line));
    ctx.emit("verify.txt", &report.render())?;
    Ok(if report.passed() { EXIT_OK } else { EXIT_FAIL })
}

fn cmd_eval(ctx: &Ctx) -> Result<i32, CliError> {
    let cfg = &ctx.cfg;
    let geom = presets::geometry(cfg)?;
    let m = presets::build(geom, &cfg.metric)?;
    let v = functional_l(&m)?;
    let d = classify(&m)?;
    let mut kv: Vec<(&str, String)> = vec![
        ("n", cfg.n.to_string()),
        ("grid", cfg.grid().to_string()),
        ("preset", cfg.metric.label().to_string()),
        ("seed", cfg.metric.seed.to_string()),
        ("regime", v.regime.as_str().to_string()),
        ("value", sci(v.value)),
        ("norm_route", sci(v.norm_route)),
        ("integral_route_re", sci(v.integral_route.re)),
        ("integral_route_im", sci(v.integral_route.im)),
        ("route_defect", sci(v.route_defect())),
    ];
    if let Some(r) = rho(ctx, &m)? {
        kv.push(("normalizer", sci(normalizer(&r, &m)?)));
        kv.push(("normalized", sci(functional_normalized(&r, &m)?)));
    }
    kv.extend(d.entries().into_iter().filter(|(k, _)| *k != "n").map(|(k, x)| (k, sci(x))));
    ctx.emit("eval.txt", &key_values(&kv))?;
    Ok(EXIT_OK)
}

fn cmd_grad_check(ctx: &Ctx) -> Result<i32, CliError> {
    let cfg = &ctx.cfg;
    let geom = presets::geometry(cfg)?;
    let m = presets::build(geom, &cfg.metric)?;
    let r = rho(ctx, &m)?;
    let dir = &cfg.directions;
    let tol = &cfg.tolerances;
    let mut rows = Vec::with_capacity(dir.count);
    let mut failed = 0;
    for k in 0..dir.count {
        let gamma = generators::random_direction(geom, cfg.metric.seed, dir.seed + k as u64, dir.amp, cfg.metric.bandwidth)?;
        let rep = match &r {
            Some(r) => first_variation_normalized(r, &m, &gamma)?,
            None => first_variation(&m, &gamma)?,
        };
        let ok = (rep.analytic - rep.fd).abs() <= (tol.fd_rel * rep.analytic.abs()).max(lck_core::variation::FD_ABS_TOL)
            && rep.fd_order >= tol.fd_order;
        if !ok {
            failed += 1;
        }
        ctx.note(&format!("direction {k}: rel_err {:.3e} order {:.3}", rep.rel_err(), rep.fd_order));
        rows.push(VariationRow {
            n: cfg.n,
            grid: cfg.grid(),
            preset: cfg.metric.label().to_string(),
            seed: cfg.metric.seed,
            direction_id: k,
            analytic: rep.analytic,
            fd: rep.fd,
            rel_err: rep.rel_err(),
            order: rep.fd_order,
        });
    }
    ctx.emit("grad_check.csv", &output::to_csv(&rows)?)?;
    ctx.note(&format!("{} directions, {failed} outside tolerance", rows.len()));
    Ok(if failed == 0 { EXIT_OK } else { EXIT_FAIL })
}

fn checkpoint_path(dir: &Path, iter: usize) -> PathBuf {
    dir.join(format!("checkpoint_{iter:05}.json"))
}

fn cmd_flow(ctx: &Ctx) -> Result<i32, CliError> {
    let cfg = &ctx.cfg;
    let geom = presets::geometry(cfg)?;
    let m = presets::build(geom, &cfg.metric)?;
    let fc = cfg.flow_config(rho(ctx, &m)?);
    let every = cfg.flow.checkpoint_every;
    let dir = cfg.out.clone();
    let sink: Box<dyn Write> = match ctx.out_file("trace.csv")? {
        Some(p) => Box::new(BufWriter::new(File::create(&p).map_err(|e| CliError::io(&p, e))?)),
        None => Box::new(std::io::stdout()),
    };
    let mut writer = TraceWriter::new(sink);
    let mut failure: Option<CliError> = None;
    let trace = run_flow(&fc, &m, |rec, metric| {
        if failure.is_some() {
            return;
        }
        let mut step = || -> Result<(), CliError> {
            writer.push(&TraceRow::from(rec))?;
            if let (Some(d), true) = (&dir, every > 0 && rec.iter > 0 && rec.iter % every == 0) {
                snapshot::write_metric(&checkpoint_path(d, rec.iter), metric)?;
            }
            Ok(())
        };
        if let Err(e) = step() {
            failure = Some(e);
        }
    })?;
    drop(writer);
    if let Some(e) = failure {
        return Err(e);
    }
    if let Some(p) = ctx.out_file("final.json")? {
        snapshot::write_metric(&p, &trace.metric)?;
    }
    let first = trace.records.first().map_or(0.0, |r| r.value);
    let last = trace.records.last().map_or(0.0, |r| r.value);
    let mut kv = vec![
        ("status", trace.status.as_str().to_string()),
        ("iterations", (trace.records.len().saturating_sub(1)).to_string()),
        ("initial", sci(first)),
        ("final", sci(last)),
        ("reduction", sci(trace.reduction())),
        ("monotone", trace.is_monotone().to_string()),
    ];
    if let Some(l) = trace.terminal_lck {
        kv.push(("terminal_lck", sci(l)));
    }
    let summary = key_values(&kv);
    if let Some(p) = ctx.out_file("flow.txt")? {
        output::write_file(&p, &summary)?;
    }
    if !ctx.quiet {
        eprint!("{summary}");
    }
    match trace.status {
        FlowStatus::PositivityStall | FlowStatus::LineSearchStall => {
            Err(CliError::Stall(format!("{} after {} iterations", trace.status.as_str(), trace.records.len() - 1)))
        }
        _ => Ok(EXIT_OK),
    }
}

fn cmd_report(ctx: &Ctx) -> Result<i32, CliError> {
    let cfg = &ctx.cfg;
    if cfg.inputs.is_empty() {
        return Err(CliError::Config("report needs at least one input CSV".into()));
    }
    let mut rows: Vec<VariationRow> = Vec::new();
    for p in &cfg.inputs {
        let text = std::fs::read_to_string(p).map_err(|e| CliError::io(p, e))?;
        let parsed: Vec<VariationRow> =
            output::from_csv(&text).map_err(|e| CliError::Format(format!("{}: {e}", p.display())))?;
        rows.extend(parsed);
    }
    let summary = output::summarize(&rows, cfg.tolerances.fd_rel, cfg.tolerances.fd_order);
    ctx.emit("report.txt", &output::render_summary(&summary))?;
    Ok(EXIT_OK)
}
