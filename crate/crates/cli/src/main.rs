use std::fs;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use nodal_core::eigen::{Field, FieldSpec};
use nodal_core::format::fmt_f64;
use nodal_core::grid::{build_grid, build_patch, default_resolution, MetricBall};
use nodal_core::growth::{log_spaced, max_function_profile};
use nodal_core::harness::{emit_report, run_suite, ExperimentConfig, Format, SuiteName, SuiteReport};
use nodal_core::nodal::{label_components, local_components, LabelOptions, ZeroTol};
use nodal_core::{Error, Result};

#[derive(Parser)]
#[command(name = "nodal", version, about = "Nodal geometry and growth checks for Laplace eigenfunctions")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Experiment config (JSON); unknown keys are rejected.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    resolution: Option<usize>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    /// csv or json
    #[arg(long, global = true, value_parser = parse_format)]
    format: Option<Format>,
}

#[derive(Args)]
struct FieldArgs {
    /// Field spec as inline JSON, e.g. '{"domain":"sphere","kind":"sphere_harmonic","n":2,"k":8}'.
    #[arg(long)]
    field: String,
}

#[derive(Args)]
struct BallArgs {
    /// Ball center, comma separated (embedding coordinates on spheres).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    center: Option<Vec<f64>>,
    #[arg(long)]
    radius: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a field on a grid and dump the samples.
    Construct {
        #[command(flatten)]
        field: FieldArgs,
    },
    /// Nodal decomposition, written as a component CSV.
    Label {
        #[command(flatten)]
        field: FieldArgs,
        #[command(flatten)]
        ball: BallArgs,
        /// Treat only exact zeros as zero instead of a relative tolerance.
        #[arg(long)]
        exact_zero: bool,
        /// Merge diagonal contacts only where the field resolves them.
        #[arg(long)]
        resolved: bool,
    },
    /// Maximum-function profile and growth exponents on a ball.
    Growth {
        #[command(flatten)]
        field: FieldArgs,
        #[command(flatten)]
        ball: BallArgs,
        #[arg(long, default_value_t = 20)]
        radii: usize,
        #[arg(long, default_value_t = 0.05)]
        min_radius: f64,
    },
    /// Run one named suite.
    Suite { name: SuiteName },
    /// Run every suite.
    All,
}

fn parse_format(s: &str) -> std::result::Result<Format, String> {
    match s {
        "csv" => Ok(Format::Csv),
        "json" => Ok(Format::Json),
        _ => Err(format!("unknown format {s:?} (expected csv or json)")),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn config(common: &Common) -> Result<ExperimentConfig> {
    let mut cfg = match &common.config {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::default(),
    };
    if let Some(r) = common.resolution {
        cfg.resolution = Some(r);
    }
    if let Some(s) = common.seed {
        cfg.seed = s;
    }
    if let Some(d) = &common.out_dir {
        cfg.out_dir = d.clone();
    }
    if let Some(f) = common.format {
        cfg.format = f;
    }
    Ok(cfg)
}

fn parse_field(args: &FieldArgs) -> Result<Field> {
    let spec: FieldSpec = serde_json::from_str(&args.field).map_err(|e| Error::Config(format!("--field: {e}")))?;
    Field::from_spec(&spec)
}

fn ball_for(field: &Field, args: &BallArgs) -> Result<Option<MetricBall>> {
    match (&args.center, args.radius) {
        (Some(c), Some(r)) => MetricBall::new(field.domain(), c, r).map(Some),
        (None, None) => Ok(None),
        _ => Err(Error::Config(String::from("--center and --radius go together"))),
    }
}

fn run(cli: Cli) -> Result<bool> {
    let cfg = config(&cli.common)?;
    match cli.command {
        Command::Construct { field } => {
            let f = parse_field(&field)?;
            construct(&f, &cfg)?;
            Ok(true)
        }
        Command::Label { field, ball, exact_zero, resolved } => {
            let f = parse_field(&field)?;
            let mut opts = LabelOptions::default();
            if exact_zero {
                opts = opts.with_zero_tol(ZeroTol::Absolute(0.0));
            }
            if resolved {
                opts = opts.resolved();
            }
            let table = match ball_for(&f, &ball)? {
                Some(b) => local_components(&f, &build_patch(&b, resolution(&cfg, &f))?, &b, &opts)?,
                None => label_components(&f, &build_grid(f.domain(), resolution(&cfg, &f))?, &opts)?,
            };
            let path = output(&cfg, &format!("{}_components.csv", f.spec().id()))?;
            table.write_csv(BufWriter::new(fs::File::create(&path)?))?;
            println!("{} components -> {}", table.len(), path.display());
            Ok(true)
        }
        Command::Growth { field, ball, radii, min_radius } => {
            let f = parse_field(&field)?;
            let b = match ball_for(&f, &ball)? {
                Some(b) => b,
                None => return Err(Error::Config(String::from("growth needs --center and --radius"))),
            };
            let rep = max_function_profile(&f, &b, &log_spaced(min_radius, 1.0, radii), resolution(&cfg, &f))?;
            let path = output(&cfg, &format!("{}_growth.json", f.spec().id()))?;
            fs::write(&path, serde_json::to_string_pretty(&rep)? + "\n")?;
            println!(
                "max convexity defect = {}  violations = {} -> {}",
                fmt_f64(rep.convexity.max_defect),
                rep.convexity.violations,
                path.display()
            );
            Ok(true)
        }
        Command::Suite { name } => suites(&cfg, name),
        Command::All => suites(&cfg, SuiteName::All),
    }
}

fn resolution(cfg: &ExperimentConfig, f: &Field) -> usize {
    cfg.resolution.unwrap_or_else(|| default_resolution(&f.domain()))
}

fn output(cfg: &ExperimentConfig, name: &str) -> Result<PathBuf> {
    fs::create_dir_all(&cfg.out_dir)?;
    Ok(cfg.out_dir.join(name))
}

fn construct(f: &Field, cfg: &ExperimentConfig) -> Result<()> {
    let grid = build_grid(f.domain(), resolution(cfg, f))?;
    let dim = f.domain().ambient_dim();
    let path = output(cfg, &format!("{}_field.{}", f.spec().id(), ext(cfg.format)))?;
    let mut out = String::new();
    match cfg.format {
        Format::Csv => {
            out.push_str("cell,");
            for a in 0..dim {
                out.push_str(&format!("x{a},"));
            }
            out.push_str("measure,value\n");
            for c in 0..grid.len() {
                let x = grid.point(c);
                out.push_str(&c.to_string());
                for v in &x[..dim] {
                    out.push(',');
                    out.push_str(&fmt_f64(*v));
                }
                out.push_str(&format!(",{},{}\n", fmt_f64(grid.cell_measure(c)), fmt_f64(f.evaluate(&x))));
            }
        }
        Format::Json => {
            let samples: Vec<serde_json::Value> = (0..grid.len())
                .map(|c| {
                    let x = grid.point(c);
                    serde_json::json!({
                        "cell": c,
                        "point": x[..dim].to_vec(),
                        "measure": grid.cell_measure(c),
                        "value": f.evaluate(&x),
                    })
                })
                .collect();
            let doc = serde_json::json!({ "field": f.spec(), "resolution": grid.resolution(), "samples": samples });
            out = serde_json::to_string(&doc)? + "\n";
        }
    }
    fs::write(&path, out)?;
    println!("{} samples -> {}", grid.len(), path.display());
    Ok(())
}

fn ext(format: Format) -> &'static str {
    match format {
        Format::Csv => "csv",
        Format::Json => "json",
    }
}

fn suites(cfg: &ExperimentConfig, name: SuiteName) -> Result<bool> {
    let reports = run_suite(cfg, name)?;
    let mut ok = true;
    for r in &reports {
        emit_report(r, cfg.format, Path::new(&cfg.out_dir))?;
        print_verdicts(r);
        ok &= r.passed();
    }
    Ok(ok)
}

fn print_verdicts(r: &SuiteReport) {
    for v in &r.verdicts {
        println!(
            "{} {}::{} value={} rows={}",
            if v.passed { "PASS" } else { "FAIL" },
            r.suite,
            v.rule,
            fmt_f64(v.value),
            v.rows
        );
    }
}
