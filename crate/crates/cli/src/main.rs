mod verify;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use gqpack::finite_field::{FieldCtx, FieldElem};
use gqpack::heisenberg::GroupCtx;
use gqpack::packing::{self, ExperimentConfig, Strategy};
use gqpack::{bounds, geometry, kantor, Error};
use serde::Serialize;

use crate::verify::Depth;

/// Lacunary constructions of Ramsey packings from Heisenberg-group geometries.
#[derive(Parser, Debug)]
#[command(name = "gqpack", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Search κ by the trace test and by the cubic test.
    Kappa {
        #[command(flatten)]
        field: FieldArgs,
    },
    /// Certify the Kantor family, the line sets ℒ_λ and their union.
    Verify {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long)]
        r: usize,
        #[command(flatten)]
        lambdas: LambdaArgs,
        #[arg(long, value_enum, default_value_t = DepthArg::Exhaustive)]
        depth: DepthArg,
        /// Line-pair probes per line set in sampled mode.
        #[arg(long, default_value_t = 1_000_000)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "verify-report.json")]
        report: PathBuf,
    },
    /// Build G_1, …, G_r and write them as DIMACS files.
    Pack {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long)]
        r: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        seed: u64,
        #[command(flatten)]
        lambdas: LambdaArgs,
        /// Path template; `{i}` becomes the colour 1..=r.
        #[arg(long, default_value = "g{i}.dimacs")]
        out: String,
    },
    /// Colour the packing repeatedly and count monochromatic K_k.
    Experiment {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long)]
        r: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        trials: usize,
        #[arg(long, value_parser = parse_strategy)]
        strategy: Strategy,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value = "experiment-report.json")]
        out: PathBuf,
    },
    /// Evaluate the upper bounds on P_r(k).
    Bound {
        #[arg(long)]
        r: u64,
        #[arg(long)]
        k: u64,
        #[arg(long, default_value = "bound-report.json")]
        out: PathBuf,
    },
    /// Write plain-text dumps of fields, subgroups and geometries.
    Export {
        #[arg(value_enum)]
        kind: ExportKind,
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long, default_value_t = 1)]
        r: usize,
        #[command(flatten)]
        lambdas: LambdaArgs,
        /// Output path; for `geometry` with r > 1 it must contain `{i}`.
        #[arg(long)]
        out: String,
    },
}

#[derive(Args, Debug)]
struct FieldArgs {
    /// Order of the base field, an odd prime power.
    #[arg(long, required_unless_present = "p", conflicts_with_all = ["p", "e"])]
    q: Option<u64>,
    /// Characteristic, with --e, instead of --q.
    #[arg(long, requires = "e")]
    p: Option<u32>,
    #[arg(long, requires = "p")]
    e: Option<u32>,
}

impl FieldArgs {
    fn group(&self) -> Result<GroupCtx, Failure> {
        let field = match (self.q, self.p, self.e) {
            (Some(q), _, _) => FieldCtx::for_q(q)?,
            (None, Some(p), Some(e)) => FieldCtx::new(p, e)?,
            _ => return Err(Failure::Usage("either --q or both --p and --e are required".into())),
        };
        Ok(GroupCtx::new(field))
    }
}

#[derive(Args, Debug)]
struct LambdaArgs {
    /// Explicit λ ∈ GF(q²) as comma-separated coefficients, once per colour;
    /// defaults to the first r field elements.
    #[arg(long = "lambda", value_name = "C0,C1,...")]
    lambda: Vec<String>,
}

impl LambdaArgs {
    fn resolve(&self, ctx: &GroupCtx, r: usize) -> Result<Vec<FieldElem>, Failure> {
        if self.lambda.is_empty() {
            return Ok(geometry::default_lambdas(ctx, r)?);
        }
        if self.lambda.len() != r {
            return Err(Failure::Usage(format!("{} --lambda values given for r = {r}", self.lambda.len())));
        }
        let max = ctx.field().order() as usize;
        if r > max {
            return Err(Error::TooManyColours { r, max }.into());
        }
        Ok(self.lambda.iter().map(|s| ctx.field().parse_elem(s)).collect::<gqpack::Result<_>>()?)
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum DepthArg {
    Exhaustive,
    Sampled,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ExportKind {
    /// The field context line, then every element with its index.
    Field,
    /// A_t for t ∈ GF(q), then A_∞.
    Base,
    /// A_t^λ for every t and every selected λ.
    Subgroups,
    /// ℒ_λ for every selected λ.
    Geometry,
    /// The union of the selected ℒ_λ with colours.
    Union,
}

fn parse_strategy(s: &str) -> Result<Strategy, String> {
    s.parse::<Strategy>().map_err(|e| e.to_string())
}

#[derive(Debug)]
enum Failure {
    /// Bad flags or arguments outside the supported domain.
    Usage(String),
    /// A check ran and did not pass.
    Verification(String),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::AssertionFailure(msg) => Failure::Verification(msg),
            other => Failure::Usage(other.to_string()),
        }
    }
}

fn main() -> ExitCode {
    if let Some(n) = std::env::var("GQPACK_THREADS").ok().and_then(|s| s.parse::<usize>().ok()) {
        if n > 0 {
            // only fails if a global pool already exists
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification(msg)) => {
            eprintln!("verification failed: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Kappa { field } => cmd_kappa(&field.group()?),
        Command::Verify { field, r, lambdas, depth, samples, seed, report } => {
            let ctx = field.group()?;
            let lambdas = lambdas.resolve(&ctx, r)?;
            let depth = match depth {
                DepthArg::Exhaustive => Depth::Exhaustive,
                DepthArg::Sampled => Depth::Sampled { samples, seed },
            };
            let result = verify::run(&ctx, &lambdas, depth)?;
            for line in verify::summary(&result) {
                println!("{line}");
            }
            write_json(&report, &result)?;
            println!("report written to {}", report.display());
            if result.passed {
                Ok(())
            } else {
                Err(Failure::Verification(format!("see {}", report.display())))
            }
        }
        Command::Pack { field, r, k, seed, lambdas, out } => {
            let ctx = field.group()?;
            let lambdas = lambdas.resolve(&ctx, r)?;
            let kappa = kantor::find_kappa(ctx.field())?;
            let union = geometry::build_union(&ctx, kappa, &lambdas)?;
            let packed = packing::build_packing(&union.parts, k, seed)?;
            let paths = expand_template(&out, r)?;
            for (i, (g, path)) in packed.graphs.iter().zip(&paths).enumerate() {
                write_text(path, &g.to_dimacs())?;
                println!("G_{}: {} vertices, {} edges -> {}", i + 1, g.num_vertices(), g.num_edges(), path.display());
            }
            Ok(())
        }
        Command::Experiment { field, r, k, trials, strategy, seed, out } => {
            let q = u64::from(field.group()?.q());
            let report = packing::packing_experiment(&ExperimentConfig { q, r, k, trials, strategy, seed })?;
            match report.witness_rate {
                Some(rate) => println!(
                    "{} trials, strategy {}: witness rate {rate:.4}, bound {:.6e}",
                    trials,
                    strategy.name(),
                    report.bound
                ),
                None => println!("no trials run; bound {:.6e}", report.bound),
            }
            write_json(&out, &report)?;
            println!("report written to {}", out.display());
            Ok(())
        }
        Command::Bound { r, k, out } => {
            let report = bounds::bound_report(r, k)?;
            println!("main bound: {:.6}", report.main_bound);
            match (report.q_star, report.num_points) {
                (Some(q), Some(n)) => println!("constructive: q* = {q}, n = q*^5 = {n}"),
                _ => println!("constructive: none (requires k >= 4)"),
            }
            println!("refined bound: {:.6}", report.refined_bound);
            write_json(&out, &report)?;
            println!("report written to {}", out.display());
            Ok(())
        }
        Command::Export { kind, field, r, lambdas, out } => cmd_export(kind, &field.group()?, r, &lambdas, &out),
    }
}

fn cmd_kappa(ctx: &GroupCtx) -> Result<(), Failure> {
    let f = ctx.field();
    let by_trace = kantor::find_kappa(f)?;
    let by_cubic = kantor::kappa_via_cubic(f)?;
    let mark = |b: bool| if b { "PASS" } else { "FAIL" };
    let mut ok = true;
    for (route, kappa) in [("trace search", by_trace), ("cubic search", by_cubic)] {
        let trace_ok = kantor::kappa_is_valid(f, kappa);
        let cubic_ok = kantor::cubic_is_irreducible(f, kappa);
        ok &= trace_ok && cubic_ok;
        println!(
            "{route}: kappa = {} | trace check {} | cubic check {}",
            f.format_elem(kappa),
            mark(trace_ok),
            mark(cubic_ok)
        );
    }
    if ok {
        Ok(())
    } else {
        Err(Failure::Verification("a kappa witness failed a criterion".into()))
    }
}

fn cmd_export(kind: ExportKind, ctx: &GroupCtx, r: usize, lambdas: &LambdaArgs, out: &str) -> Result<(), Failure> {
    let f = ctx.field();
    match kind {
        ExportKind::Field => {
            let mut text = f.serialize();
            text.push('\n');
            for x in f.elements() {
                text.push_str(&format!("{} {}\n", x.index(), f.format_elem(x)));
            }
            write_text(Path::new(out), &text)
        }
        ExportKind::Base => {
            let fam = kantor::base_family(ctx);
            let text: String = fam
                .members
                .iter()
                .map(|s| kantor::format_subgroup_dump(ctx, s, FieldElem::ZERO, FieldElem::ZERO))
                .collect();
            write_text(Path::new(out), &text)
        }
        ExportKind::Subgroups => {
            let kappa = kantor::find_kappa(f)?;
            let mut text = String::new();
            for lambda in lambdas.resolve(ctx, r)? {
                let params = kantor::TwistParams::new(f, lambda, kappa)?;
                for s in kantor::twisted_family(ctx, &params) {
                    text.push_str(&kantor::format_subgroup_dump(ctx, &s, lambda, kappa));
                }
            }
            write_text(Path::new(out), &text)
        }
        ExportKind::Geometry => {
            let kappa = kantor::find_kappa(f)?;
            let lambdas = lambdas.resolve(ctx, r)?;
            let union = geometry::build_union(ctx, kappa, &lambdas)?;
            let paths = expand_template(out, r)?;
            for ((&lambda, part), path) in lambdas.iter().zip(&union.parts).zip(&paths) {
                write_text(path, &geometry::format_geometry_dump(ctx, kappa, lambda, part))?;
            }
            Ok(())
        }
        ExportKind::Union => {
            let kappa = kantor::find_kappa(f)?;
            let union = geometry::build_union(ctx, kappa, &lambdas.resolve(ctx, r)?)?;
            write_text(Path::new(out), &geometry::format_union_dump(ctx, &union))
        }
    }
}

/// Substitutes `{i}` with 1..=r; a template without `{i}` is accepted only for r = 1.
fn expand_template(template: &str, r: usize) -> Result<Vec<PathBuf>, Failure> {
    if !template.contains("{i}") {
        return if r == 1 {
            Ok(vec![PathBuf::from(template)])
        } else {
            Err(Failure::Usage(format!("output template {template:?} must contain {{i}} when r > 1")))
        };
    }
    Ok((1..=r).map(|i| PathBuf::from(template.replace("{i}", &i.to_string()))).collect())
}

fn write_text(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure::Io(format!("writing {}: {e}", path.display())))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), Failure> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| Failure::Io(e.to_string()))?;
    text.push('\n');
    write_text(path, &text)
}
