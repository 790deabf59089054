//! `triloc` command line: solve, classify, simulate, oracle and plot.
//!
//! Exit codes: 0 success, 1 input, IO or internal error, 2 no solution.

pub mod files;
pub mod svg;

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::error::Error;
use crate::exec::Execution;
use crate::geom::Point;
use crate::oracle::{grid_minimize_with, Bounds, GridSpec};
use crate::sim::{drop_top_std, run_sweep_with, SweepConfig};
use crate::solver::{solve, SolverConfig};
use crate::taxonomy::{classify, CaseDiagnostics, CaseLabel, Scenario, DEFAULT_TAU_EQ};

use files::{format_g, read_sweep_csv, write_sweep_csv, ScenarioFile};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_NO_SOLUTION: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "triloc", version, about = "Three-sensor source localization under multiplicative range noise")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Locate the source of a scenario file.
    Solve {
        input: PathBuf,
        /// Also print candidates, working ranges and the classification diagnostics.
        #[arg(long)]
        trace: bool,
        /// Print the solution as JSON.
        #[arg(long)]
        json: bool,
        #[command(flatten)]
        tol: Tolerance,
    },
    /// Print the existence case and its diagnostics.
    Classify {
        input: PathBuf,
        #[arg(long)]
        json: bool,
        #[command(flatten)]
        tol: Tolerance,
    },
    /// Run the Monte-Carlo noise sweep and write a CSV file.
    Simulate {
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 50)]
        samples: usize,
        #[arg(long, default_value_t = 1.0)]
        eta_max: f64,
        #[arg(long, default_value_t = 0.02)]
        eta_step: f64,
        #[arg(long, default_value_t = 0.01)]
        range_floor: f64,
        /// True source as "x,y".
        #[arg(long, default_value = "0.5,0.5", value_parser = parse_point)]
        source: Point,
        /// Drop this many rows with the largest standard deviation.
        #[arg(long, default_value_t = 0)]
        drop_top_std: usize,
        #[arg(long)]
        out: PathBuf,
        /// Run trials on the current thread only.
        #[arg(long)]
        sequential: bool,
    },
    /// Brute-force grid minimum of the objective, compared with the solver.
    Oracle {
        input: PathBuf,
        #[arg(long, default_value_t = 512)]
        resolution: usize,
        #[arg(long, default_value_t = 3)]
        rounds: usize,
        /// Search window "xmin,xmax,ymin,ymax"; defaults to [-1,2]^2 widened to cover the sensors.
        #[arg(long, value_parser = parse_bounds, allow_hyphen_values = true)]
        bounds: Option<Bounds>,
        #[command(flatten)]
        tol: Tolerance,
    },
    /// Render a sweep CSV as an SVG error-bar plot.
    Plot {
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Debug, Args)]
struct Tolerance {
    /// Relative tolerance for treating two ranges as equal.
    #[arg(long = "tol-eq", default_value_t = DEFAULT_TAU_EQ)]
    tol_eq: f64,
}

impl Tolerance {
    fn config(&self) -> Result<SolverConfig, Failure> {
        if !(self.tol_eq.is_finite() && self.tol_eq >= 0.0) {
            return Err(Failure::input(format!("--tol-eq must be finite and non-negative, got {}", self.tol_eq)));
        }
        Ok(SolverConfig { tau_eq: self.tol_eq })
    }
}

fn parse_numbers<const N: usize>(s: &str) -> Result<[f64; N], String> {
    let v: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|_| format!("not a number: {t:?}")))
        .collect::<Result<_, _>>()?;
    v.try_into().map_err(|v: Vec<f64>| format!("expected {N} comma-separated numbers, got {}", v.len()))
}

fn parse_point(s: &str) -> Result<Point, String> {
    let [x, y] = parse_numbers::<2>(s)?;
    Ok(Point::new(x, y))
}

fn parse_bounds(s: &str) -> Result<Bounds, String> {
    let [x_min, x_max, y_min, y_max] = parse_numbers::<4>(s)?;
    Ok(Bounds { x_min, x_max, y_min, y_max })
}

struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn input(message: String) -> Self {
        Failure { code: EXIT_ERROR, message }
    }

    fn io(path: &Path, e: std::io::Error) -> Self {
        Failure::input(format!("{}: {e}", path.display()))
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::NoSolution { .. } => EXIT_NO_SOLUTION,
            _ => EXIT_ERROR,
        };
        Failure { code, message: e.to_string() }
    }
}

type CmdResult = Result<(), Failure>;

/// Runs the command line `args` (program name first) and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{text}");
                EXIT_ERROR
            } else {
                let _ = write!(out, "{text}");
                EXIT_OK
            };
        }
    };
    let result = match cli.command {
        Command::Solve { input, trace, json, tol } => cmd_solve(&input, trace, json, &tol, out),
        Command::Classify { input, json, tol } => cmd_classify(&input, json, &tol, out),
        Command::Simulate {
            seed,
            samples,
            eta_max,
            eta_step,
            range_floor,
            source,
            drop_top_std,
            out: path,
            sequential,
        } => {
            let cfg = SweepConfig {
                true_source: source,
                samples_per_eta: samples,
                eta_max,
                eta_step,
                range_floor,
                seed,
            };
            let exec = if sequential { Execution::Sequential } else { Execution::default() };
            cmd_simulate(&cfg, drop_top_std, &path, exec, out)
        }
        Command::Oracle { input, resolution, rounds, bounds, tol } => {
            cmd_oracle(&input, resolution, rounds, bounds, &tol, out)
        }
        Command::Plot { input, out: path } => cmd_plot(&input, &path, out),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn load_scenario(path: &Path) -> Result<Scenario, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::io(path, e))?;
    let file = ScenarioFile::parse(&text).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    file.to_scenario()
        .map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn fmt_point(p: Point) -> String {
    format!("({}, {})", format_g(p.x), format_g(p.y))
}

fn fmt_triple(v: [f64; 3]) -> String {
    v.map(format_g).join(" ")
}

fn emit(out: &mut dyn Write, text: &str) -> CmdResult {
    out.write_all(text.as_bytes())
        .map_err(|e| Failure::input(format!("stdout: {e}")))
}

fn to_json<T: serde::Serialize>(v: &T) -> Result<String, Failure> {
    serde_json::to_string_pretty(v)
        .map(|s| s + "\n")
        .map_err(|e| Failure::input(format!("JSON encoding: {e}")))
}

fn cmd_solve(input: &Path, trace: bool, json: bool, tol: &Tolerance, out: &mut dyn Write) -> CmdResult {
    let s = load_scenario(input)?;
    let cfg = tol.config()?;
    let sol = solve(&s, &cfg)?;
    if json {
        return emit(out, &to_json(&sol)?);
    }
    let trace_codes: Vec<&str> = sol.case_trace.iter().map(|c| c.code()).collect();
    let mut text = format!(
        "source: {}\nepsilon: {}\nrre: {}\nobjective: {}\ncase: {}\ntrace: {}\nscalings: k1={} k2={} l={}\n",
        fmt_point(sol.source),
        fmt_triple(sol.epsilon),
        format_g(sol.rre),
        format_g(sol.objective),
        sol.case,
        trace_codes.join(" -> "),
        format_g(sol.scalings.k1),
        format_g(sol.scalings.k2),
        format_g(sol.scalings.l),
    );
    if trace {
        text += &format!(
            "working epsilon: {}\nworking ranges (ascending): {}\n",
            fmt_triple(sol.working_epsilon),
            fmt_triple(sol.working_ranges)
        );
        for c in &sol.candidates {
            text += &format!("candidate: {}\n", fmt_point(*c));
        }
        let (label, diag) = classify(&s, cfg.tau_eq);
        text += &diagnostics_table(label, &diag);
    }
    emit(out, &text)
}

/// The inequality behind a label.
fn fired_condition(label: CaseLabel) -> &'static str {
    match label {
        CaseLabel::C003 => "d1 = d2 = d3, sensors not collinear",
        CaseLabel::CollinearEqual => "d1 = d2 = d3, sensors collinear",
        CaseLabel::C013 => "d1 < d2 = d3, dist(b13, bisector23) ≤ r13",
        CaseLabel::C012013 => "d1 < d2 = d3, dist(b13, bisector23) > r13",
        CaseLabel::C113 => "|r23−r13| ≤ |b23−b13| ≤ r23+r13",
        CaseLabel::C112Plus => "|b23−b13| > r23+r13",
        CaseLabel::C112Minus => "|b23−b13| < |r23−r13|",
    }
}

fn diagnostics_table(label: CaseLabel, d: &CaseDiagnostics) -> String {
    let opt = |v: Option<f64>| v.map_or("-".to_string(), format_g);
    format!(
        "case: {}\ncondition: {}\nbisector distance: {}\nr13: {}\nr23: {}\ncenter gap |b23-b13|: {}\nd3 = d2: {}\nd2 = d1: {}\nd3 = d1: {}\ncollinearity determinant: {}\n",
        label.code(),
        fired_condition(label),
        opt(d.bisector_distance),
        opt(d.r13),
        opt(d.r23),
        opt(d.center_gap),
        d.d3_eq_d2,
        d.d2_eq_d1,
        d.d3_eq_d1,
        format_g(d.collinearity),
    )
}

fn cmd_classify(input: &Path, json: bool, tol: &Tolerance, out: &mut dyn Write) -> CmdResult {
    let s = load_scenario(input)?;
    let cfg = tol.config()?;
    let (label, diag) = classify(&s, cfg.tau_eq);
    if json {
        #[derive(serde::Serialize)]
        struct Report<'a> {
            label: CaseLabel,
            condition: &'a str,
            diagnostics: CaseDiagnostics,
        }
        let r = Report { label, condition: fired_condition(label), diagnostics: diag };
        return emit(out, &to_json(&r)?);
    }
    emit(out, &diagnostics_table(label, &diag))
}

fn cmd_simulate(cfg: &SweepConfig, drop: usize, path: &Path, exec: Execution, out: &mut dyn Write) -> CmdResult {
    let mut result = run_sweep_with(cfg, exec)?;
    if drop > 0 {
        result = drop_top_std(&result, drop)?;
    }
    let mut buf = Vec::new();
    write_sweep_csv(&result.rows, &mut buf)?;
    fs::write(path, buf).map_err(|e| Failure::io(path, e))?;
    let max_mean = result
        .rows
        .iter()
        .map(|r| r.mean_error)
        .filter(|v| v.is_finite())
        .fold(f64::NEG_INFINITY, f64::max);
    let failures: usize = result.rows.iter().map(|r| r.failures).sum();
    emit(
        out,
        &format!(
            "rows: {}\nmax mean error: {}\nfailures: {}\nwrote {}\n",
            result.rows.len(),
            format_g(max_mean),
            failures,
            path.display()
        ),
    )
}

fn cmd_oracle(
    input: &Path,
    resolution: usize,
    rounds: usize,
    bounds: Option<Bounds>,
    tol: &Tolerance,
    out: &mut dyn Write,
) -> CmdResult {
    let s = load_scenario(input)?;
    let cfg = tol.config()?;
    let base = GridSpec::covering(&s);
    let grid = GridSpec::new(bounds.unwrap_or(base.bounds), resolution, rounds)?;
    let r = grid_minimize_with(&s, &grid, Execution::default());
    let mut text = format!(
        "oracle argmin: {}\noracle objective: {}\n",
        fmt_point(r.point),
        format_g(r.objective)
    );
    let solved = solve(&s, &cfg);
    match &solved {
        Ok(sol) => {
            text += &format!("solver objective: {}\n", format_g(sol.objective));
            text += &format!("absolute difference: {}\n", format_g((sol.objective - r.objective).abs()));
            if r.objective >= 1e-9 {
                text += &format!("ratio: {}\n", format_g(sol.objective / r.objective));
            }
        }
        Err(e) => text += &format!("solver: {e}\n"),
    }
    emit(out, &text)?;
    solved.map(|_| ()).map_err(Failure::from)
}

fn cmd_plot(input: &Path, path: &Path, out: &mut dyn Write) -> CmdResult {
    let file = fs::File::open(input).map_err(|e| Failure::io(input, e))?;
    let rows = read_sweep_csv(file).map_err(|e| Failure::input(format!("{}: {e}", input.display())))?;
    let doc = svg::render(&rows)?;
    fs::write(path, doc).map_err(|e| Failure::io(path, e))?;
    emit(out, &format!("wrote {} ({} rows)\n", path.display(), rows.len()))
}
