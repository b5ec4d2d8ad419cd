//! Command-line front end: data ingestion, solver selection and chaining,
//! JSON/text reporting, comparison harness, exact-coefficient export.
//!
//! Exit codes: 0 success, 2 bad input or domain violation, 3 no
//! convergence by any enabled method.

use std::fmt::Write as _;
use std::io::{Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use num_traits::ToPrimitive;

use cauchy_mle::iterate::{circular_step, fit_circular_traced};
use cauchy_mle::numerics::parse_rational;
use cauchy_mle::oracle::{cauchy_draws, newton_raphson_baseline, NewtonOutcome};
use cauchy_mle::{
    build_rn, emit_poly, fit_algebraic, fit_iterative, fit_n3, fit_n4, likelihood_residuals,
    relative_position, starting_point, CircularSample, EmitFormat, Error, Sample, UpperHalfPoint,
};

#[derive(Parser)]
#[command(
    name = "cauchy-mle",
    about = "Maximum-likelihood fitting of the Cauchy location-scale parameter",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit mu + i*sigma to observations
    Fit(FitArgs),
    /// Print the exact fixed-point polynomial or its roots
    Poly(PolyArgs),
    /// Fit the wrapped model to angles in [0, 2pi)
    Circular(CircularArgs),
    /// Run several methods on one sample and tabulate them
    Compare(CompareArgs),
    /// Draw reproducible Cauchy observations
    Sample(SampleArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    /// closed form at n in {3,4}, else iteration with algebraic fallback
    Auto,
    Iterate,
    Closed,
    Poly,
    Newton,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Args)]
struct InputArg {
    /// Read observations from this file instead of stdin
    #[arg(long)]
    input: Option<PathBuf>,
}

#[derive(Args)]
struct FitArgs {
    #[command(flatten)]
    input: InputArg,
    #[arg(long, value_enum, default_value_t = Method::Auto)]
    method: Method,
    /// Pseudo-hyperbolic gap at which the iteration stops
    #[arg(long, default_value_t = 1e-12)]
    tol: f64,
    #[arg(long, default_value_t = 1_000_000)]
    max_iter: usize,
    /// Starting point "mu,sigma" (default: median + i*IQR)
    #[arg(long)]
    start: Option<String>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Emit {
    Coeffs,
    Roots,
}

#[derive(Args)]
struct PolyArgs {
    #[command(flatten)]
    input: InputArg,
    #[arg(long, value_enum, default_value_t = Emit::Coeffs)]
    emit: Emit,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Args)]
struct CircularArgs {
    #[command(flatten)]
    input: InputArg,
    #[arg(long, default_value_t = 1e-12)]
    tol: f64,
    #[arg(long, default_value_t = 1_000_000)]
    max_iter: usize,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Args)]
struct CompareArgs {
    #[command(flatten)]
    input: InputArg,
    /// Methods to run (default: every applicable one)
    #[arg(long, value_delimiter = ',')]
    methods: Vec<String>,
    #[arg(long, default_value_t = 1e-12)]
    tol: f64,
    #[arg(long, default_value_t = 1_000_000)]
    max_iter: usize,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Args)]
struct SampleArgs {
    #[arg(long)]
    mu: f64,
    #[arg(long)]
    sigma: f64,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

/// A terminal failure carrying the process exit code.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Failure {
            code: 2,
            message: message.into(),
        }
    }

    fn numeric(message: impl Into<String>) -> Self {
        Failure {
            code: 3,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::TooFewObservations { .. }
            | Error::TooFewDistinct
            | Error::NonFiniteObservation { .. }
            | Error::ParseValue { .. }
            | Error::AngleOutOfRange { .. }
            | Error::NonPositiveSigma { .. }
            | Error::WrongSampleSize { .. }
            | Error::DuplicateValues { .. }
            | Error::OddSampleSize { .. }
            | Error::PositionOutsideHalfDisc { .. } => 2,
            _ => 3,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Fit(args) => cmd_fit(args),
        Command::Poly(args) => cmd_poly(args),
        Command::Circular(args) => cmd_circular(args),
        Command::Compare(args) => cmd_compare(args),
        Command::Sample(args) => cmd_sample(args),
    };
    match outcome {
        Ok(Output { stdout, code }) => {
            if !stdout.is_empty() {
                // ignore EPIPE so `... | head` truncation stays silent
                let mut out = std::io::stdout().lock();
                let _ = writeln!(out, "{}", stdout);
            }
            ExitCode::from(code)
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

/// Printed report plus the exit code (a report can accompany a nonzero
/// code: a non-converged fit still prints its best point).
struct Output {
    stdout: String,
    code: u8,
}

impl Output {
    fn ok(stdout: String) -> Self {
        Output { stdout, code: 0 }
    }
}

/// 17 significant digits; the same string feeds text and JSON output.
fn num(x: f64) -> String {
    format!("{:.16e}", x)
}

fn json_escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

fn read_input(path: &Option<PathBuf>) -> Result<String, Failure> {
    match path {
        Some(p) => std::fs::read_to_string(p)
            .map_err(|e| Failure::input(format!("cannot read {}: {}", p.display(), e))),
        None => {
            let mut text = String::new();
            std::io::stdin()
                .read_to_string(&mut text)
                .map_err(|e| Failure::input(format!("cannot read stdin: {}", e)))?;
            Ok(text)
        }
    }
}

fn read_sample(path: &Option<PathBuf>) -> Result<Sample, Failure> {
    Ok(Sample::parse(&read_input(path)?)?)
}

/// '#' comments, comma/whitespace separation, exact rational tokens.
fn parse_values(text: &str) -> Result<Vec<f64>, Failure> {
    let mut values = Vec::new();
    for line in text.lines() {
        let body = line.split('#').next().unwrap_or("");
        for token in body.split([',', ' ', '\t']).filter(|t| !t.is_empty()) {
            let r = parse_rational(token)?;
            values.push(r.to_f64().ok_or_else(|| {
                Failure::input(format!("value out of float range: {}", token))
            })?);
        }
    }
    Ok(values)
}

fn parse_start(text: &str) -> Result<UpperHalfPoint, Failure> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    if parts.len() != 2 {
        return Err(Failure::input("--start expects \"mu,sigma\""));
    }
    let mu: f64 = parts[0]
        .parse()
        .map_err(|_| Failure::input(format!("bad start location: {}", parts[0])))?;
    let sigma: f64 = parts[1]
        .parse()
        .map_err(|_| Failure::input(format!("bad start scale: {}", parts[1])))?;
    Ok(UpperHalfPoint::new(mu, sigma)?)
}

fn check_tolerances(tol: f64, max_iter: usize) -> Result<(), Failure> {
    if !tol.is_finite() || tol < 0.0 {
        return Err(Failure::input("--tol must be a finite nonnegative number"));
    }
    if max_iter == 0 {
        return Err(Failure::input("--max-iter must be at least 1"));
    }
    Ok(())
}

/// One finished fit, however it was reached.
struct FitReport {
    theta: UpperHalfPoint,
    method: &'static str,
    iterations: usize,
    converged: bool,
    warnings: Vec<String>,
}

fn render_fit_report(s: &Sample, report: &FitReport, format: Format) -> String {
    let r = likelihood_residuals(s, &report.theta);
    let position = relative_position(s, &report.theta);
    match format {
        Format::Json => {
            let warnings: Vec<String> = report
                .warnings
                .iter()
                .map(|w| format!("\"{}\"", json_escape(w)))
                .collect();
            let mut out = String::new();
            let _ = write!(
                out,
                "{{\n  \"mu\": {},\n  \"sigma\": {},\n  \"method\": \"{}\",\n  \
                 \"iterations\": {},\n  \"converged\": {},\n  \"residuals\": {{\
                 \"log_derivative\": {}, \"mean_image\": {}, \"score_mu\": {}, \"score_sigma\": {}}},\n  \
                 \"diagnostics\": {{\"relative_position\": {{\"re\": {}, \"im\": {}}}, \
                 \"relative_distance\": {}}},\n  \"warnings\": [{}]\n}}",
                num(report.theta.mu()),
                num(report.theta.sigma()),
                report.method,
                report.iterations,
                report.converged,
                num(r.log_derivative),
                num(r.mean_image),
                num(r.score_mu),
                num(r.score_sigma),
                num(position.xi.re),
                num(position.xi.im),
                num(position.relative_distance),
                warnings.join(", ")
            );
            out
        }
        Format::Text => {
            let mut out = String::new();
            let _ = writeln!(out, "mu                 {}", num(report.theta.mu()));
            let _ = writeln!(out, "sigma              {}", num(report.theta.sigma()));
            let _ = writeln!(out, "method             {}", report.method);
            let _ = writeln!(out, "iterations         {}", report.iterations);
            let _ = writeln!(out, "converged          {}", report.converged);
            let _ = writeln!(out, "log_derivative     {}", num(r.log_derivative));
            let _ = writeln!(out, "mean_image         {}", num(r.mean_image));
            let _ = writeln!(out, "score_mu           {}", num(r.score_mu));
            let _ = writeln!(out, "score_sigma        {}", num(r.score_sigma));
            let _ = writeln!(
                out,
                "relative_position  {} {}",
                num(position.xi.re),
                num(position.xi.im)
            );
            let _ = writeln!(
                out,
                "relative_distance  {}",
                num(position.relative_distance)
            );
            if report.warnings.is_empty() {
                let _ = write!(out, "warnings           (none)");
            } else {
                let _ = write!(out, "warnings           {}", report.warnings.join("; "));
            }
            out
        }
    }
}

fn cmd_fit(args: FitArgs) -> Result<Output, Failure> {
    check_tolerances(args.tol, args.max_iter)?;
    if args.tol <= 0.0 {
        return Err(Failure::input("--tol must be positive"));
    }
    let s = read_sample(&args.input.input)?;
    let start = args.start.as_deref().map(parse_start).transpose()?;
    let mut warnings = Vec::new();
    if s.has_duplicates() {
        warnings.push("sample contains repeated values".to_string());
    }

    let small_n = s.n() == 3 || s.n() == 4;
    let report = match args.method {
        Method::Closed => {
            if !small_n {
                return Err(Failure::input(format!(
                    "closed form requires 3 or 4 observations, got {}",
                    s.n()
                )));
            }
            let theta = closed_fit(&s)?;
            FitReport {
                theta,
                method: "closed",
                iterations: 0,
                converged: true,
                warnings,
            }
        }
        Method::Poly => {
            let fit = fit_algebraic(&s, 1e-8)?;
            FitReport {
                theta: fit.chosen,
                method: "poly",
                iterations: 0,
                converged: true,
                warnings,
            }
        }
        Method::Newton => match newton_raphson_baseline(
            &s,
            &start.unwrap_or_else(|| starting_point(&s)),
            args.max_iter,
        ) {
            NewtonOutcome::Converged { point, iterations } => FitReport {
                theta: point,
                method: "newton",
                iterations,
                converged: true,
                warnings,
            },
            NewtonOutcome::Diverged {
                reason, iterations, ..
            } => {
                return Err(Failure::numeric(format!(
                    "newton diverged after {} iterations: {}",
                    iterations, reason
                )));
            }
        },
        Method::Iterate => {
            let (theta, trace) = fit_iterative(&s, start, args.tol, args.max_iter)?;
            if trace.start_fallback {
                warnings.push("degenerate interquartile range; fallback start scale".to_string());
            }
            FitReport {
                theta,
                method: "iterate",
                iterations: trace.iterations,
                converged: trace.converged,
                warnings,
            }
        }
        Method::Auto => {
            if small_n && s.all_distinct() {
                FitReport {
                    theta: closed_fit(&s)?,
                    method: "closed",
                    iterations: 0,
                    converged: true,
                    warnings,
                }
            } else {
                let (theta, trace) = fit_iterative(&s, start, args.tol, args.max_iter)?;
                if trace.start_fallback {
                    warnings
                        .push("degenerate interquartile range; fallback start scale".to_string());
                }
                if trace.converged {
                    FitReport {
                        theta,
                        method: "iterate",
                        iterations: trace.iterations,
                        converged: true,
                        warnings,
                    }
                } else if s.n() <= 12 && s.all_distinct() {
                    // slow orbit on a small sample: the exact polynomial
                    // route finishes the job
                    warnings.push(format!(
                        "iteration gap still above tol after {} steps; algebraic root used",
                        trace.iterations
                    ));
                    let fit = fit_algebraic(&s, 1e-8)?;
                    FitReport {
                        theta: fit.chosen,
                        method: "poly",
                        iterations: trace.iterations,
                        converged: true,
                        warnings,
                    }
                } else {
                    FitReport {
                        theta,
                        method: "iterate",
                        iterations: trace.iterations,
                        converged: false,
                        warnings,
                    }
                }
            }
        }
    };

    let code = if report.converged { 0 } else { 3 };
    Ok(Output {
        stdout: render_fit_report(&s, &report, args.format),
        code,
    })
}

fn closed_fit(s: &Sample) -> Result<UpperHalfPoint, Failure> {
    match s.n() {
        3 => Ok(fit_n3(s)?),
        4 => Ok(fit_n4(s)?),
        _ => unreachable!("guarded by caller"),
    }
}

fn cmd_poly(args: PolyArgs) -> Result<Output, Failure> {
    let s = read_sample(&args.input.input)?;
    match args.emit {
        Emit::Coeffs => {
            let rn = build_rn(&s)?;
            let format = match args.format {
                Format::Json => EmitFormat::Json,
                Format::Text => EmitFormat::Integers,
            };
            Ok(Output::ok(emit_poly(&rn, format)))
        }
        Emit::Roots => {
            let fit = fit_algebraic(&s, 1e-8)?;
            let chosen = fit.chosen.theta();
            let is_chosen =
                |r: &Complex64| (r - chosen).norm() <= 1e-6 * (1.0 + chosen.norm());
            match args.format {
                Format::Json => {
                    let rows: Vec<String> = fit
                        .roots
                        .iter()
                        .map(|r| {
                            format!(
                                "{{\"re\": {}, \"im\": {}, \"selected\": {}}}",
                                num(r.re),
                                num(r.im),
                                is_chosen(r)
                            )
                        })
                        .collect();
                    Ok(Output::ok(format!(
                        "{{\"degree\": {}, \"selected\": {{\"re\": {}, \"im\": {}}}, \"roots\": [{}]}}",
                        fit.degree,
                        num(chosen.re),
                        num(chosen.im),
                        rows.join(", ")
                    )))
                }
                Format::Text => {
                    let mut out = String::new();
                    for r in &fit.roots {
                        let mark = if is_chosen(r) { "  <- selected" } else { "" };
                        let _ = writeln!(out, "{} {}{}", num(r.re), num(r.im), mark);
                    }
                    let _ = write!(
                        out,
                        "selected {} {}",
                        num(chosen.re),
                        num(chosen.im)
                    );
                    Ok(Output::ok(out))
                }
            }
        }
    }
}

fn cmd_circular(args: CircularArgs) -> Result<Output, Failure> {
    check_tolerances(args.tol, args.max_iter)?;
    let angles = parse_values(&read_input(&args.input.input)?)?;
    let c = CircularSample::new(angles)?;
    let fit = fit_circular_traced(&c, args.tol, args.max_iter)?;
    let residual = (fit.psi - circular_step(&c, fit.psi)).norm();
    let out = match args.format {
        Format::Json => format!(
            "{{\n  \"psi\": {{\"re\": {}, \"im\": {}}},\n  \"modulus\": {},\n  \
             \"iterations\": {},\n  \"residual\": {}\n}}",
            num(fit.psi.re),
            num(fit.psi.im),
            num(fit.psi.norm()),
            fit.iterations,
            num(residual)
        ),
        Format::Text => {
            let mut out = String::new();
            let _ = writeln!(out, "psi_re      {}", num(fit.psi.re));
            let _ = writeln!(out, "psi_im      {}", num(fit.psi.im));
            let _ = writeln!(out, "modulus     {}", num(fit.psi.norm()));
            let _ = writeln!(out, "iterations  {}", fit.iterations);
            let _ = write!(out, "residual    {}", num(residual));
            out
        }
    };
    Ok(Output::ok(out))
}

/// One comparison row; failures stay inline and never abort the table.
struct CompareRow {
    method: &'static str,
    theta: Option<UpperHalfPoint>,
    iterations: usize,
    converged: bool,
    wall_ms: f64,
    mean_image: Option<f64>,
    error: Option<String>,
}

fn cmd_compare(args: CompareArgs) -> Result<Output, Failure> {
    check_tolerances(args.tol, args.max_iter)?;
    let s = read_sample(&args.input.input)?;

    let mut requested: Vec<&'static str> = if args.methods.is_empty() {
        let mut all = vec!["iterate", "newton"];
        if (s.n() == 3 || s.n() == 4) && s.all_distinct() {
            all.push("closed");
        }
        if s.all_distinct() {
            all.push("poly");
        }
        all
    } else {
        let mut named = Vec::new();
        for m in &args.methods {
            match m.as_str() {
                "closed" => named.push("closed"),
                "iterate" => named.push("iterate"),
                "newton" => named.push("newton"),
                "poly" => named.push("poly"),
                other => {
                    return Err(Failure::input(format!(
                        "unknown method {:?} (expected closed, iterate, newton, poly)",
                        other
                    )))
                }
            }
        }
        named
    };
    // deterministic output order regardless of request order
    requested.sort_unstable();
    requested.dedup();

    let rows: Vec<CompareRow> = requested
        .into_iter()
        .map(|method| run_method(&s, method, args.tol, args.max_iter))
        .collect();

    let out = match args.format {
        Format::Json => {
            let body: Vec<String> = rows
                .iter()
                .map(|row| {
                    let (mu, sigma) = match &row.theta {
                        Some(t) => (num(t.mu()), num(t.sigma())),
                        None => ("null".to_string(), "null".to_string()),
                    };
                    format!(
                        "{{\"method\": \"{}\", \"mu\": {}, \"sigma\": {}, \
                         \"iterations\": {}, \"converged\": {}, \"wall_ms\": {}, \
                         \"mean_image\": {}, \"error\": {}}}",
                        row.method,
                        mu,
                        sigma,
                        row.iterations,
                        row.converged,
                        num(row.wall_ms),
                        row.mean_image.map_or("null".to_string(), num),
                        row.error
                            .as_deref()
                            .map_or("null".to_string(), |e| format!(
                                "\"{}\"",
                                json_escape(e)
                            )),
                    )
                })
                .collect();
            format!("{{\"rows\": [{}]}}", body.join(", "))
        }
        Format::Text => {
            let mut out = String::new();
            let _ = writeln!(
                out,
                "{:<8} {:<24} {:<24} {:>9} {:<9} {:>10}  mean_image",
                "method", "mu", "sigma", "iters", "converged", "wall_ms"
            );
            for row in &rows {
                let (mu, sigma) = match &row.theta {
                    Some(t) => (num(t.mu()), num(t.sigma())),
                    None => ("-".to_string(), "-".to_string()),
                };
                let tail = match (&row.mean_image, &row.error) {
                    (Some(r), _) => num(*r),
                    (None, Some(e)) => format!("error: {}", e),
                    (None, None) => "-".to_string(),
                };
                let _ = writeln!(
                    out,
                    "{:<8} {:<24} {:<24} {:>9} {:<9} {:>10.3}  {}",
                    row.method, mu, sigma, row.iterations, row.converged, row.wall_ms, tail
                );
            }
            out.trim_end().to_string()
        }
    };
    Ok(Output::ok(out))
}

fn run_method(s: &Sample, method: &'static str, tol: f64, max_iter: usize) -> CompareRow {
    let clock = Instant::now();
    let mut row = CompareRow {
        method,
        theta: None,
        iterations: 0,
        converged: false,
        wall_ms: 0.0,
        mean_image: None,
        error: None,
    };
    match method {
        "closed" => {
            if s.n() == 3 || s.n() == 4 {
                match closed_fit(s) {
                    Ok(theta) => {
                        row.theta = Some(theta);
                        row.converged = true;
                    }
                    Err(f) => row.error = Some(f.message),
                }
            } else {
                row.error = Some(format!("needs 3 or 4 observations, got {}", s.n()));
            }
        }
        "iterate" => match fit_iterative(s, None, tol, max_iter) {
            Ok((theta, trace)) => {
                row.theta = Some(theta);
                row.iterations = trace.iterations;
                row.converged = trace.converged;
                if !trace.converged {
                    row.error = Some(format!("gap above tol after {} steps", trace.iterations));
                }
            }
            Err(e) => row.error = Some(e.to_string()),
        },
        "newton" => match newton_raphson_baseline(s, &starting_point(s), max_iter) {
            NewtonOutcome::Converged { point, iterations } => {
                row.theta = Some(point);
                row.iterations = iterations;
                row.converged = true;
            }
            NewtonOutcome::Diverged {
                reason, iterations, ..
            } => {
                row.iterations = iterations;
                row.error = Some(format!("diverged: {}", reason));
            }
        },
        "poly" => match fit_algebraic(s, 1e-8) {
            Ok(fit) => {
                row.theta = Some(fit.chosen);
                row.converged = true;
            }
            Err(e) => row.error = Some(e.to_string()),
        },
        _ => unreachable!("validated above"),
    }
    row.wall_ms = clock.elapsed().as_secs_f64() * 1e3;
    if let Some(theta) = &row.theta {
        row.mean_image = Some(likelihood_residuals(s, theta).mean_image);
    }
    row
}

fn cmd_sample(args: SampleArgs) -> Result<Output, Failure> {
    if args.n == 0 {
        return Err(Failure::input("--n must be at least 1"));
    }
    let theta = UpperHalfPoint::new(args.mu, args.sigma)?;
    let draws = cauchy_draws(&theta, args.n, args.seed);
    let lines: Vec<String> = draws.iter().map(|&x| num(x)).collect();
    Ok(Output::ok(lines.join("\n")))
}
