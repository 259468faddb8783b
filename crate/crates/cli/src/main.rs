//! `fchordal` — solve two-point F-chordal problems, verify solutions,
//! check geometric continuity of joins, build partial Riordan matrices,
//! and sample solved arcs, all from JSON documents.
//!
//! Exit codes: 0 success, 2 unresolved degeneracy or resonance, 3 invalid
//! input, 4 verification failure.

mod doc;
mod error;
mod render;

use std::io::Read;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fchordal::{
    circle_series, condition_check, ellipse_series, normalize, solve, solve_join,
    verify_residual, Coefficient, ConditionReport, FChordalProblem, GCReport, LocalSolution,
    NormalizedProblem, PartialRiordanMatrix, TruncatedSeries,
};
use rayon::prelude::*;

use crate::doc::{
    build_problem, coeff, parse_document, series, BackendChoice, ConditionDocument,
    GaugeDocument, GcReportDocument, JoinDocument, ModeChoice, OracleReportDocument, Overlay,
    ProblemDocument, RiordanDocument, RiordanOutputDocument, SolutionDocument,
    VerifyReportDocument,
};
use crate::error::CliError;

#[derive(Parser)]
#[command(
    name = "fchordal",
    version,
    about = "Exact local solver for two-point F-chordal problems, \
             with Riordan-matrix and geometric-continuity tools"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a problem document and print the solution document
    Solve(SolveArgs),
    /// Re-verify a solution document against its problem
    Verify(VerifyArgs),
    /// Check geometric continuity of a two-arc join document
    #[command(name = "gc-check")]
    GcCheck(GcCheckArgs),
    /// Build a partial generalized Riordan matrix and print it
    Riordan(RiordanArgs),
    /// Sample the solved local arcs as a CSV table or an SVG sketch
    Sample(SampleArgs),
}

/// Flags that overlay (and default) the corresponding document fields.
#[derive(Args, Clone)]
struct OverlayArgs {
    /// Truncation order (overrides the document's)
    #[arg(long)]
    order: Option<usize>,
    /// Vertex tangent mode (overrides the document's)
    #[arg(long, value_enum)]
    mode: Option<ModeChoice>,
    /// Coefficient backend (overrides the document's)
    #[arg(long, value_enum)]
    backend: Option<BackendChoice>,
    /// Float precision in bits (implies --backend float)
    #[arg(long)]
    precision: Option<usize>,
    /// Gauge document, e.g. '{"y1":"2","tail":["1/3"]}'
    #[arg(long)]
    gauge: Option<String>,
    /// Coefficient injection at a degenerate order, e.g. --override 2=-1/3
    #[arg(long = "override", value_name = "K=VALUE")]
    overrides: Vec<String>,
}

impl OverlayArgs {
    fn resolve(&self) -> Result<Overlay, CliError> {
        let gauge = match &self.gauge {
            Some(text) => Some(parse_document::<GaugeDocument>(text, "--gauge")?),
            None => None,
        };
        let mut overrides = Vec::new();
        for item in &self.overrides {
            let (k, v) = item.split_once('=').ok_or_else(|| {
                CliError::invalid(
                    "override",
                    format!("expected K=VALUE, got {item:?}"),
                    "--override",
                )
            })?;
            let order: usize = k.trim().parse().map_err(|_| {
                CliError::invalid(
                    "override",
                    format!("override order {k:?} is not a number"),
                    "--override",
                )
            })?;
            overrides.push((order, v.trim().to_string()));
        }
        Ok(Overlay {
            order: self.order,
            mode: self.mode,
            backend: self.backend,
            precision: self.precision,
            gauge,
            overrides,
        })
    }
}

#[derive(Args)]
struct SolveArgs {
    /// Problem document path, or - for stdin
    #[arg(required_unless_present = "batch", conflicts_with = "batch")]
    problem: Option<PathBuf>,
    #[command(flatten)]
    overlay: OverlayArgs,
    /// Solve every .json document in this directory concurrently
    #[arg(long, value_name = "DIR")]
    batch: Option<PathBuf>,
    /// Output path (with --batch: the output directory); stdout when absent
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Solution document path, or - for stdin
    solution: PathBuf,
    /// The problem document the solution claims to solve
    problem: PathBuf,
    /// Also compare against a closed-form oracle
    #[arg(long, value_enum)]
    oracle: Option<OracleChoice>,
    /// Output path; stdout when absent
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum OracleChoice {
    Circle,
    Ellipse,
}

#[derive(Args)]
struct GcCheckArgs {
    /// Join document path, or - for stdin
    join: PathBuf,
    /// Output path; stdout when absent
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct RiordanArgs {
    /// Matrix document path, or - for stdin
    matrix: PathBuf,
    /// Output format
    #[arg(long, value_enum, default_value = "text")]
    format: RiordanFormat,
    /// Output path; stdout when absent
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum RiordanFormat {
    Text,
    Json,
}

#[derive(Args)]
struct SampleArgs {
    /// Problem document path, or - for stdin
    problem: PathBuf,
    #[command(flatten)]
    overlay: OverlayArgs,
    /// Half-width of the symmetric parameter window
    #[arg(long = "t-max", default_value = "1/10")]
    t_max: String,
    /// Number of samples across the window
    #[arg(long, default_value_t = 33)]
    count: usize,
    /// Output format
    #[arg(long, value_enum, default_value = "csv")]
    format: SampleFormat,
    /// Output path; stdout when absent
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum SampleFormat {
    Csv,
    Svg,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("{}", err.to_json());
            ExitCode::from(err.exit)
        }
    }
}

fn run(cli: Cli) -> Result<u8, CliError> {
    match cli.command {
        Command::Solve(args) => run_solve(args),
        Command::Verify(args) => run_verify(args),
        Command::GcCheck(args) => run_gc_check(args),
        Command::Riordan(args) => run_riordan(args),
        Command::Sample(args) => run_sample(args),
    }
}

fn read_input(path: &Path) -> Result<String, CliError> {
    if path == Path::new("-") {
        let mut buf = String::new();
        std::io::stdin()
            .read_to_string(&mut buf)
            .map_err(|err| CliError::io(err, "stdin"))?;
        Ok(buf)
    } else {
        std::fs::read_to_string(path).map_err(|err| CliError::io(err, path.display().to_string()))
    }
}

fn with_newline(mut text: String) -> String {
    if !text.ends_with('\n') {
        text.push('\n');
    }
    text
}

fn emit(output: Option<&Path>, text: String) -> Result<(), CliError> {
    let text = with_newline(text);
    match output {
        Some(path) => std::fs::write(path, text)
            .map_err(|err| CliError::io(err, path.display().to_string())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn pretty<T: serde::Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("output documents always serialize")
}

// ---------------------------------------------------------------------
// solve
// ---------------------------------------------------------------------

/// Normalizes, runs the condition check, and solves; exit-2 failures
/// carry the condition report as diagnostics.
fn solve_with_report(
    problem: &FChordalProblem,
) -> Result<(NormalizedProblem, Option<ConditionReport>, LocalSolution), CliError> {
    let np = normalize(problem).map_err(|err| CliError::from_fchordal(&err, "problem"))?;
    let report = condition_check(&np.phi.phi_p, &np.phi.phi_q, &np.x0, problem.order).ok();
    let sol = solve(&np, &problem.mode, &problem.gauge, &problem.overrides, problem.order)
        .map_err(|err| {
            let cli_err = CliError::from_fchordal(&err, "solve");
            if cli_err.exit == 2 {
                let diagnostics =
                    report.as_ref().map(|r| ConditionDocument::from_report(r).to_value());
                cli_err.with_diagnostics(diagnostics)
            } else {
                cli_err
            }
        })?;
    Ok((np, report, sol))
}

fn solve_to_json(text: &str, overlay: &Overlay) -> Result<String, CliError> {
    let problem_doc: ProblemDocument = parse_document(text, "problem")?;
    let problem = build_problem(&problem_doc, overlay)?;
    let (_np, report, sol) = solve_with_report(&problem)?;
    Ok(pretty(&SolutionDocument::from_solution(&sol, report.as_ref())))
}

fn run_solve(args: SolveArgs) -> Result<u8, CliError> {
    let overlay = args.overlay.resolve()?;
    if let Some(dir) = &args.batch {
        return run_batch(dir, args.output.as_deref(), &overlay);
    }
    let path = args.problem.as_deref().expect("clap requires a problem without --batch");
    let json = solve_to_json(&read_input(path)?, &overlay)?;
    emit(args.output.as_deref(), json)?;
    Ok(0)
}

struct BatchEntry {
    file: String,
    output: String,
    exit: u8,
    code: Option<String>,
}

fn run_batch(dir: &Path, output: Option<&Path>, overlay: &Overlay) -> Result<u8, CliError> {
    let mut inputs: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(|err| CliError::io(err, dir.display().to_string()))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|ext| ext == "json"))
        .collect();
    inputs.sort();
    if inputs.is_empty() {
        return Err(CliError::invalid(
            "batch",
            "no .json documents in the batch directory",
            dir.display().to_string(),
        ));
    }
    let out_dir = output.unwrap_or(dir);
    std::fs::create_dir_all(out_dir)
        .map_err(|err| CliError::io(err, out_dir.display().to_string()))?;

    let entries: Vec<BatchEntry> = inputs
        .par_iter()
        .map(|path| {
            let stem = path.file_stem().unwrap_or_default().to_string_lossy().into_owned();
            let file = path.display().to_string();
            let solved = read_input(path).and_then(|text| solve_to_json(&text, overlay));
            let (name, body, exit, code) = match solved {
                Ok(json) => (format!("{stem}.solution.json"), json, 0, None),
                Err(err) => {
                    (format!("{stem}.error.json"), err.to_json(), err.exit, Some(err.code))
                }
            };
            let out_path = out_dir.join(name);
            match std::fs::write(&out_path, with_newline(body)) {
                Ok(()) => {
                    BatchEntry { file, output: out_path.display().to_string(), exit, code }
                }
                Err(err) => BatchEntry {
                    file,
                    output: err.to_string(),
                    exit: 3,
                    code: Some("io".to_string()),
                },
            }
        })
        .collect();

    let failed = entries.iter().filter(|e| e.exit != 0).count();
    let summary = serde_json::json!({
        "total": entries.len(),
        "solved": entries.len() - failed,
        "failed": failed,
        "documents": entries.iter().map(|e| serde_json::json!({
            "file": e.file,
            "output": e.output,
            "exit": e.exit,
            "code": e.code,
        })).collect::<Vec<_>>(),
    });
    println!("{}", pretty(&summary));
    Ok(entries.iter().map(|e| e.exit).max().unwrap_or(0))
}

// ---------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------

fn canonical_transversal(y: &TruncatedSeries) -> bool {
    let one = Coefficient::one(y.backend());
    y.coeff(1).agrees_with(&one)
        && (0..=y.order()).all(|i| i == 1 || y.coeff(i).is_negligible())
}

fn compare_with(x: &TruncatedSeries, oracle: &TruncatedSeries) -> Option<usize> {
    (0..=x.order()).find(|&i| !x.coeff(i).agrees_with(oracle.coeff(i)))
}

/// Fits the oracle's parameters from the low-order coefficients, then
/// compares the full series.  Requires the canonical gauge y(t) = t, so
/// that the curvature normalization matches the closed forms.
fn check_oracle(
    kind: OracleChoice,
    x: &TruncatedSeries,
    y: &TruncatedSeries,
) -> Result<OracleReportDocument, CliError> {
    if !canonical_transversal(y) {
        return Err(CliError::invalid(
            "oracle",
            "oracle comparison needs the canonical gauge y(t) = t",
            "solution.y",
        ));
    }
    let n = x.order();
    let backend = x.backend();
    let mut report = OracleReportDocument {
        kind: match kind {
            OracleChoice::Circle => "circle".to_string(),
            OracleChoice::Ellipse => "ellipse".to_string(),
        },
        matches: false,
        center_x: None,
        radius: None,
        semi_axis: None,
        mismatch_order: None,
    };
    match kind {
        OracleChoice::Circle => {
            if n < 2 {
                return Err(CliError::invalid(
                    "oracle",
                    "the circle oracle needs order >= 2 to fit the radius",
                    "solution.x",
                ));
            }
            // x(t) = (c + r) - t²/(2r) - ..., so r = -1/(2 x_2).
            let x2 = x.coeff(2);
            if x2.is_negligible() {
                report.mismatch_order = Some(2);
                return Ok(report);
            }
            let two = Coefficient::from_int_backend(2, backend);
            let radius = match x2.mul(&two).neg().recip() {
                Ok(r) => r,
                Err(_) => {
                    report.mismatch_order = Some(2);
                    return Ok(report);
                }
            };
            let center = x.coeff(0).sub(&radius);
            report.radius = Some(radius.to_string());
            report.center_x = Some(center.to_string());
            match circle_series(&center, &radius, n) {
                Ok(oracle) => {
                    report.mismatch_order = compare_with(x, &oracle);
                    report.matches = report.mismatch_order.is_none();
                }
                Err(_) => report.mismatch_order = Some(2),
            }
        }
        OracleChoice::Ellipse => {
            let a = x.coeff(0);
            report.semi_axis = Some(a.to_string());
            match ellipse_series(a, n) {
                Ok(oracle) => {
                    report.mismatch_order = compare_with(x, &oracle);
                    report.matches = report.mismatch_order.is_none();
                }
                Err(_) => report.mismatch_order = Some(0),
            }
        }
    }
    Ok(report)
}

fn run_verify(args: VerifyArgs) -> Result<u8, CliError> {
    let solution_doc: SolutionDocument =
        parse_document(&read_input(&args.solution)?, "solution")?;
    let problem_doc: ProblemDocument = parse_document(&read_input(&args.problem)?, "problem")?;
    let problem = build_problem(&problem_doc, &Overlay::default())?;
    let np = normalize(&problem).map_err(|err| CliError::from_fchordal(&err, "problem"))?;
    let (x, y, u) = solution_doc.to_series(problem.backend)?;
    let n = x.order();
    let sol = LocalSolution {
        x,
        y,
        u,
        mode: problem.mode.clone(),
        pivots: Vec::new(),
        resonant_orders: Vec::new(),
        overrides_used: Vec::new(),
        verified_order: 0,
        float_collapses: 0,
    };
    let verified_order = verify_residual(&sol, &np, n);
    let oracle = match args.oracle {
        Some(kind) => Some(check_oracle(kind, &sol.x, &sol.y)?),
        None => None,
    };
    let passed = verified_order == n && oracle.as_ref().is_none_or(|o| o.matches);
    let report = VerifyReportDocument { order: n, verified_order, passed, oracle };
    emit(args.output.as_deref(), pretty(&report))?;
    Ok(if passed { 0 } else { 4 })
}

// ---------------------------------------------------------------------
// gc-check
// ---------------------------------------------------------------------

fn run_gc_check(args: GcCheckArgs) -> Result<u8, CliError> {
    let join_doc: JoinDocument = parse_document(&read_input(&args.join)?, "join")?;
    let join = join_doc.to_join()?;
    let report = solve_join(&join).map_err(|err| CliError::from_gcheck(&err, "join"))?;
    emit(args.output.as_deref(), pretty(&GcReportDocument::from_report(&report)))?;
    Ok(match report {
        GCReport::Success { .. } => 0,
        GCReport::Failure { .. } => 4,
    })
}

// ---------------------------------------------------------------------
// riordan
// ---------------------------------------------------------------------

fn aligned_rows(rows: &[Vec<String>]) -> String {
    let cols = rows.last().map_or(0, Vec::len);
    let widths: Vec<usize> = (0..cols)
        .map(|j| rows.iter().filter_map(|r| r.get(j)).map(String::len).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    for row in rows {
        let mut line = String::new();
        for (j, cell) in row.iter().enumerate() {
            if j > 0 {
                line.push_str("  ");
            }
            line.push_str(&format!("{cell:>width$}", width = widths[j]));
        }
        out.push_str(line.trim_end());
        out.push('\n');
    }
    out
}

fn run_riordan(args: RiordanArgs) -> Result<u8, CliError> {
    let riordan_doc: RiordanDocument = parse_document(&read_input(&args.matrix)?, "riordan")?;
    let backend = riordan_doc.backend();
    let d = series(&riordan_doc.d, backend, "d")?;
    let h = series(&riordan_doc.h, backend, "h")?;
    let matrix = PartialRiordanMatrix::build(&d, &h, riordan_doc.order)
        .map_err(|err| CliError::invalid("riordan", err.to_string(), "riordan"))?;
    let rows: Vec<Vec<String>> = (0..=riordan_doc.order)
        .map(|i| (0..=i).map(|j| matrix.entry(i, j).to_string()).collect())
        .collect();
    let out = match args.format {
        RiordanFormat::Json => {
            pretty(&RiordanOutputDocument { order: riordan_doc.order, rows })
        }
        RiordanFormat::Text => aligned_rows(&rows),
    };
    emit(args.output.as_deref(), out)?;
    Ok(0)
}

// ---------------------------------------------------------------------
// sample
// ---------------------------------------------------------------------

fn run_sample(args: SampleArgs) -> Result<u8, CliError> {
    let overlay = args.overlay.resolve()?;
    let problem_doc: ProblemDocument = parse_document(&read_input(&args.problem)?, "problem")?;
    let problem = build_problem(&problem_doc, &overlay)?;
    let (np, _report, sol) = solve_with_report(&problem)?;
    let t_max = coeff(&args.t_max, problem.backend, "--t-max")?;
    if !t_max.is_positive() || t_max.is_negligible() {
        return Err(CliError::invalid("sample-grid", "--t-max must be positive", "--t-max"));
    }
    let grid = render::SampleGrid { t_max, count: args.count };
    let out = match args.format {
        SampleFormat::Csv => render::render_csv(&np, &sol, &grid)?,
        SampleFormat::Svg => {
            let labels = [
                (problem.v1.clone(), "V1"),
                (problem.p.clone(), "P"),
                (problem.q.clone(), "Q"),
                (problem.v2.clone(), "V2"),
            ];
            render::render_svg(&np, &sol, &grid, &labels)?
        }
    };
    emit(args.output.as_deref(), out)?;
    Ok(0)
}
