//! Command-line front end. The binary only forwards to [`run`].
//!
//! Exit codes: 0 verified result, 1 refuted or nothing found, 2 usage, I/O
//! or format error, 3 dimension mismatch, 4 inconclusive, 5 hypothesis not met.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use serde_json::{json, Value};

use crate::certs::{
    check_sign_clauses, search_violator, solve_slemma, solve_sprocedure, solve_sprocedure_eq,
    sproc_refutation, verify_slemma_certificate, QuadCriterion, SLemmaOutcome, SLemmaVerification,
    SProcInstance,
};
use crate::error::{Error, Result};
use crate::io::{read_dense_matrix, read_matrix, read_vector, write_atomic};
use crate::linalg::{classify_definiteness, SymMatrix};
use crate::numrange::{convexity_defect, sample_range, trace_boundary, Domain, ProbeOptions};
use crate::pencil::{
    find_pd_combination, find_pd_combination3, PencilOutcome, CERTIFY_TOL, DEFAULT_GRID,
    DEFAULT_GRID3, DEFAULT_REFINE_ITERS,
};
use crate::plot::{decay_svg, scatter_svg};
use crate::quadmap::{gap_table, gap_table_csv, CounterexampleFamily, QuadForm};
use crate::tls::tls_minimize;

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_DIMENSION: i32 = 3;
pub const EXIT_INCONCLUSIVE: i32 = 4;
pub const EXIT_HYPOTHESIS: i32 = 5;

/// Version tag written into every report.
pub const SCHEMA: u32 = 1;
/// Prefix of environment variables overriding tolerances.
pub const TOL_ENV_PREFIX: &str = "QUADRANGE_TOL_";
pub const DIM_WARNING: &str = "dim < 3: convexity not guaranteed";

#[derive(Parser, Debug)]
#[command(
    name = "quadrange",
    version,
    about = "Joint ranges of quadratic forms and multiplier certificates"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Mode {
    Sphere,
    Full,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Family {
    Vanishing,
    Convergent,
}

#[derive(Args, Debug)]
struct Output {
    /// Report format (default depends on the command).
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write an SVG figure here.
    #[arg(long)]
    plot: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sample a joint numerical range and measure its convexity defect.
    Numrange {
        /// Two or three symmetric matrix files (JSON or CSV).
        #[arg(required = true, num_args = 2..=3)]
        files: Vec<PathBuf>,
        #[arg(long, value_enum, default_value = "sphere")]
        mode: Mode,
        #[arg(long, default_value_t = 2000)]
        count: usize,
        /// Boundary directions traced for two operators.
        #[arg(long, default_value_t = 360)]
        directions: usize,
        #[arg(long, default_value_t = 200)]
        probes: usize,
        #[arg(long)]
        seed: u64,
        #[command(flatten)]
        output: Output,
    },
    /// Search for a positive definite combination.
    Pencil {
        #[arg(required = true, num_args = 2..=3)]
        files: Vec<PathBuf>,
        /// Three-term search; needs three files.
        #[arg(long)]
        three: bool,
        /// Angular grid size (directions on the sphere with --three).
        #[arg(long)]
        grid: Option<usize>,
        #[arg(long, default_value_t = DEFAULT_REFINE_ITERS)]
        refine: usize,
        #[command(flatten)]
        output: Output,
    },
    /// Residual table for a non-closed image family.
    Counterexample {
        #[arg(long, value_enum)]
        family: Family,
        #[arg(long, value_delimiter = ',', required = true)]
        truncations: Vec<usize>,
        #[arg(long, default_value_t = 32)]
        restarts: usize,
        #[arg(long, default_value_t = 500)]
        iterations: usize,
        #[arg(long)]
        seed: u64,
        #[command(flatten)]
        output: Output,
    },
    /// S-procedure multipliers for an instance file.
    Sproc {
        instance: PathBuf,
        /// Treat the second constraint as an equality.
        #[arg(long)]
        equality: bool,
        /// Rays searched for a violating point.
        #[arg(long, default_value_t = 20000)]
        directions: usize,
        #[arg(long)]
        seed: u64,
        #[command(flatten)]
        output: Output,
    },
    /// S-lemma multipliers for an instance file.
    Slemma {
        instance: PathBuf,
        #[arg(long, default_value_t = 2000)]
        samples: usize,
        #[arg(long)]
        seed: u64,
        #[command(flatten)]
        output: Output,
    },
    /// Evaluate the regularized total least squares objective by multistart descent.
    TlsDemo {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long)]
        rhs: PathBuf,
        #[arg(long)]
        rho: f64,
        #[arg(long, default_value_t = 8)]
        starts: usize,
        #[arg(long, default_value_t = 2000)]
        iterations: usize,
        #[arg(long)]
        seed: u64,
        #[command(flatten)]
        output: Output,
    },
}

/// Tolerance overrides read from `QUADRANGE_TOL_<NAME>`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Tolerances {
    pub values: BTreeMap<String, f64>,
}

/// Names honored in [`Tolerances`] and their defaults.
pub const KNOWN_TOLERANCES: [(&str, f64); 2] = [("ATTAIN", 1e-9), ("DEFECT", 1e-4)];

impl Tolerances {
    pub fn from_env() -> Result<Self> {
        Self::from_pairs(std::env::vars())
    }

    pub fn from_pairs(vars: impl IntoIterator<Item = (String, String)>) -> Result<Self> {
        let mut values: BTreeMap<String, f64> = KNOWN_TOLERANCES
            .iter()
            .map(|(k, v)| (k.to_string(), *v))
            .collect();
        for (k, v) in vars {
            let Some(name) = k.strip_prefix(TOL_ENV_PREFIX) else {
                continue;
            };
            if !values.contains_key(name) {
                return Err(Error::InvalidInput(format!("unknown tolerance {k}")));
            }
            let x: f64 = v
                .trim()
                .parse()
                .map_err(|_| Error::InvalidInput(format!("{k} is not a number: {v:?}")))?;
            if !(x.is_finite() && x > 0.0) {
                return Err(Error::InvalidInput(format!("{k} must be positive")));
            }
            values.insert(name.to_string(), x);
        }
        Ok(Tolerances { values })
    }

    pub fn get(&self, name: &str) -> f64 {
        self.values[name]
    }
}

pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::DimensionMismatch { .. } => EXIT_DIMENSION,
        Error::HypothesisUnmet(_) => EXIT_HYPOTHESIS,
        _ => EXIT_USAGE,
    }
}

struct Report {
    body: String,
    plot: Option<String>,
    code: i32,
    notes: Vec<String>,
}

/// Parses `args` (including the program name), runs the command and returns
/// the exit code. Reports go to `stdout` unless `--out` is given.
pub fn run_with<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(stderr, "{text}");
            } else {
                let _ = write!(stdout, "{text}");
            }
            return e.exit_code();
        }
    };
    let tols = match Tolerances::from_env() {
        Ok(t) => t,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return EXIT_USAGE;
        }
    };
    let output = match &cli.command {
        Command::Numrange { output, .. }
        | Command::Pencil { output, .. }
        | Command::Counterexample { output, .. }
        | Command::Sproc { output, .. }
        | Command::Slemma { output, .. }
        | Command::TlsDemo { output, .. } => output,
    };
    let report = match dispatch(&cli.command, &tols) {
        Ok(r) => r,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return exit_code(&e);
        }
    };
    for n in &report.notes {
        let _ = writeln!(stderr, "{n}");
    }
    if output.plot.is_some() && report.plot.is_none() {
        let _ = writeln!(stderr, "note: this command has no figure; --plot ignored");
    }
    if let Err(e) = emit(&report, output, stdout) {
        let _ = writeln!(stderr, "error: {e}");
        return exit_code(&e);
    }
    report.code
}

/// Entry point for the binary.
pub fn run() -> i32 {
    let mut out = std::io::stdout().lock();
    let mut err = std::io::stderr().lock();
    run_with(std::env::args_os(), &mut out, &mut err)
}

fn emit(report: &Report, output: &Output, stdout: &mut dyn Write) -> Result<()> {
    match &output.out {
        Some(p) => write_atomic(p, report.body.as_bytes())?,
        None => stdout.write_all(report.body.as_bytes())?,
    }
    if let (Some(p), Some(svg)) = (&output.plot, &report.plot) {
        write_atomic(p, svg.as_bytes())?;
    }
    Ok(())
}

fn dispatch(cmd: &Command, tols: &Tolerances) -> Result<Report> {
    match cmd {
        Command::Numrange {
            files,
            mode,
            count,
            directions,
            probes,
            seed,
            output,
        } => cmd_numrange(
            files,
            *mode,
            *count,
            *directions,
            *probes,
            *seed,
            output,
            tols,
        ),
        Command::Pencil {
            files,
            three,
            grid,
            refine,
            output,
        } => cmd_pencil(files, *three, *grid, *refine, output, tols),
        Command::Counterexample {
            family,
            truncations,
            restarts,
            iterations,
            seed,
            output,
        } => cmd_counterexample(
            *family,
            truncations,
            *restarts,
            *iterations,
            *seed,
            output,
            tols,
        ),
        Command::Sproc {
            instance,
            equality,
            directions,
            seed,
            output,
        } => cmd_sproc(instance, *equality, *directions, *seed, output, tols),
        Command::Slemma {
            instance,
            samples,
            seed,
            output,
        } => cmd_slemma(instance, *samples, *seed, output, tols),
        Command::TlsDemo {
            matrix,
            rhs,
            rho,
            starts,
            iterations,
            seed,
            output,
        } => cmd_tls(matrix, rhs, *rho, *starts, *iterations, *seed, output, tols),
    }
}

fn envelope(command: &str, tols: &Tolerances, mut body: Value) -> Value {
    let obj = body.as_object_mut().expect("report object");
    obj.insert("schema".into(), json!(SCHEMA));
    obj.insert("command".into(), json!(command));
    obj.insert("tolerances".into(), json!(tols.values));
    body
}

fn json_text(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("report serializes");
    s.push('\n');
    s
}

fn fmt_num(x: f64) -> String {
    format!("{x:.17e}")
}

fn csv_lines(header: &[String], rows: &[Vec<String>]) -> String {
    let mut s = header.join(",");
    s.push('\n');
    for r in rows {
        s.push_str(&r.join(","));
        s.push('\n');
    }
    s
}

fn read_matrices(files: &[PathBuf]) -> Result<Vec<SymMatrix>> {
    let mats = files
        .iter()
        .map(|p| read_matrix(p))
        .collect::<Result<Vec<_>>>()?;
    for m in &mats[1..] {
        crate::error::check_dim(mats[0].dim(), m.dim())?;
    }
    Ok(mats)
}

#[allow(clippy::too_many_arguments)]
fn cmd_numrange(
    files: &[PathBuf],
    mode: Mode,
    count: usize,
    directions: usize,
    probes: usize,
    seed: u64,
    output: &Output,
    tols: &Tolerances,
) -> Result<Report> {
    let ops = read_matrices(files)?;
    let n = ops[0].dim();
    let domain = match mode {
        Mode::Sphere => Domain::Sphere,
        Mode::Full => Domain::FullSpace,
    };
    let sample = sample_range(&ops, domain, count, seed)?;
    let conv = convexity_defect(&sample, &ops, probes, seed.wrapping_add(1))?;
    let mut notes = Vec::new();
    let mut warnings = Vec::new();
    if n < 3 {
        warnings.push(DIM_WARNING.to_string());
        notes.push(format!("warning: {DIM_WARNING}"));
    }
    let boundary = if ops.len() == 2 && n >= 2 {
        Some(trace_boundary(&ops[0], &ops[1], directions)?.points)
    } else {
        None
    };
    let defect_tol = tols.get("DEFECT");
    let plot = output.plot.as_ref().map(|_| {
        let pts: Vec<[f64; 2]> = sample.points.iter().map(|p| [p[0], p[1]]).collect();
        scatter_svg("joint numerical range", &pts, boundary.as_deref())
    });
    let body = match output.format.unwrap_or(Format::Json) {
        Format::Csv => sample.to_csv(),
        Format::Json => json_text(&envelope(
            "numrange",
            tols,
            json!({
                "dim": n,
                "operators": ops.len(),
                "mode": match mode { Mode::Sphere => "sphere", Mode::Full => "full" },
                "seed": seed,
                "count": count,
                "defect": conv.defect,
                "defect_within_tolerance": conv.defect <= defect_tol,
                "hull_area": conv.hull_area,
                "hull": conv.boundary,
                "violations": conv.violations,
                "boundary": boundary,
                "warnings": warnings,
                "sample": sample,
            }),
        )),
    };
    Ok(Report {
        body,
        plot,
        code: EXIT_OK,
        notes,
    })
}

fn cmd_pencil(
    files: &[PathBuf],
    three: bool,
    grid: Option<usize>,
    refine: usize,
    output: &Output,
    tols: &Tolerances,
) -> Result<Report> {
    if three != (files.len() == 3) {
        return Err(Error::InvalidInput(
            "--three takes exactly three matrices; without it pass two".into(),
        ));
    }
    let ops = read_matrices(files)?;
    let out = if three {
        find_pd_combination3(
            &ops[0],
            &ops[1],
            &ops[2],
            grid.unwrap_or(DEFAULT_GRID3),
            refine,
        )?
    } else {
        find_pd_combination(&ops[0], &ops[1], grid.unwrap_or(DEFAULT_GRID), refine)?
    };
    let refs: Vec<&SymMatrix> = ops.iter().collect();
    let combo = SymMatrix::combination(out.mu(), &refs)?;
    let verified =
        out.is_certificate() && classify_definiteness(&combo, CERTIFY_TOL).is_positive_definite();
    let (kind, witness) = match &out {
        PencilOutcome::Certificate(c) => ("certificate", Some(c.witness.clone())),
        PencilOutcome::NoPdCombination(_) => ("no_pd_combination", None),
    };
    let body = match output.format.unwrap_or(Format::Json) {
        Format::Csv => {
            let mut header: Vec<String> = (1..=ops.len()).map(|i| format!("mu{i}")).collect();
            header.extend(["lambda_min", "indeterminate", "verified"].map(String::from));
            let mut row: Vec<String> = out.mu().iter().map(|m| fmt_num(*m)).collect();
            row.push(fmt_num(out.margin()));
            row.push(out.is_indeterminate().to_string());
            row.push(verified.to_string());
            csv_lines(&header, &[row])
        }
        Format::Json => json_text(&envelope(
            "pencil",
            tols,
            json!({
                "outcome": kind,
                "mu": out.mu(),
                "lambda_min": out.margin(),
                "indeterminate": out.is_indeterminate(),
                "verified": verified,
                "evidence": { "witness": witness, "combination": combo },
            }),
        )),
    };
    Ok(Report {
        body,
        plot: None,
        code: if verified { EXIT_OK } else { EXIT_NEGATIVE },
        notes: vec![],
    })
}

#[allow(clippy::too_many_arguments)]
fn cmd_counterexample(
    family: Family,
    truncations: &[usize],
    restarts: usize,
    iterations: usize,
    seed: u64,
    output: &Output,
    tols: &Tolerances,
) -> Result<Report> {
    let first = *truncations.first().unwrap_or(&1);
    let fam = match family {
        Family::Vanishing => CounterexampleFamily::vanishing(first),
        Family::Convergent => CounterexampleFamily::convergent(first),
    };
    let opts = ProbeOptions {
        restarts,
        iterations,
        attain_tol: tols.get("ATTAIN"),
        ..ProbeOptions::default()
    };
    let rows = gap_table(&fam, truncations, [1.0, 1.0], &opts, seed)?;
    let all_positive = rows.iter().all(|r| r.best_residual > 0.0);
    let within_bound = rows
        .iter()
        .all(|r| r.best_residual <= 1.0 / r.truncation as f64 + 1e-9);
    let summary = format!(
        "residual > 0 for all N: {}; residual <= 1/N: {}",
        if all_positive { "yes" } else { "no" },
        if within_bound { "yes" } else { "no" }
    );
    let plot = output.plot.as_ref().map(|_| {
        let series: Vec<[f64; 2]> = rows
            .iter()
            .map(|r| [r.truncation as f64, r.best_residual])
            .collect();
        let reference: Vec<[f64; 2]> = rows
            .iter()
            .map(|r| [r.truncation as f64, 1.0 / r.truncation as f64])
            .collect();
        decay_svg(
            "distance from (1,1) to the image",
            &series,
            Some(&reference),
        )
    });
    let body = match output.format.unwrap_or(Format::Csv) {
        Format::Csv => gap_table_csv(&rows),
        Format::Json => json_text(&envelope(
            "counterexample",
            tols,
            json!({
                "family": match family { Family::Vanishing => "vanishing", Family::Convergent => "convergent" },
                "target": [1.0, 1.0],
                "seed": seed,
                "rows": rows,
                "all_positive": all_positive,
                "within_bound": within_bound,
            }),
        )),
    };
    Ok(Report {
        body,
        plot,
        code: if all_positive && within_bound {
            EXIT_OK
        } else {
            EXIT_NEGATIVE
        },
        notes: vec![summary],
    })
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = crate::io::read_text(path)?;
    serde_json::from_str(&text).map_err(|e| Error::Format(format!("{}: {e}", path.display())))
}

fn cmd_sproc(
    path: &Path,
    equality: bool,
    directions: usize,
    seed: u64,
    output: &Output,
    tols: &Tolerances,
) -> Result<Report> {
    let inst: SProcInstance = read_json(path)?;
    let out = if equality {
        solve_sprocedure_eq(&inst)?
    } else {
        solve_sprocedure(&inst)?
    };
    let pair = out.pair().clone();
    let verified = out.is_certificate();
    let (witness, refutation) = if verified {
        (None, None)
    } else {
        match search_violator(&inst, equality, directions, seed)? {
            Some((x, _)) => {
                let r = sproc_refutation(&inst, &x, pair.tau, equality);
                (Some(x), r)
            }
            None => (None, None),
        }
    };
    let x0 = inst.slater.clone().unwrap_or_default();
    let f = inst.forms(&x0);
    let body = match output.format.unwrap_or(Format::Json) {
        Format::Csv => csv_lines(
            &[
                "tau1",
                "tau2",
                "slack_operator",
                "slack_scalar",
                "value",
                "verified",
            ]
            .map(String::from),
            &[vec![
                fmt_num(pair.tau[0]),
                fmt_num(pair.tau[1]),
                fmt_num(pair.slack_operator),
                fmt_num(pair.slack_scalar),
                fmt_num(pair.value),
                verified.to_string(),
            ]],
        ),
        Format::Json => json_text(&envelope(
            "sproc",
            tols,
            json!({
                "kind": "sproc",
                "variant": if equality { "equality" } else { "inequality" },
                "tau": pair.tau,
                "slack_operator": pair.slack_operator,
                "slack_scalar": pair.slack_scalar,
                "value": pair.value,
                "tau2_unrestricted": pair.tau2_unrestricted,
                "verified": verified,
                "evidence": {
                    "operator_scale": inst.operator_scale(),
                    "scalar_scale": inst.scalar_scale(),
                    "slater": x0,
                    "slater_values": [f[1], f[2]],
                    "witness": witness,
                    "refutation": refutation,
                },
            }),
        )),
    };
    Ok(Report {
        body,
        plot: None,
        code: if verified { EXIT_OK } else { EXIT_NEGATIVE },
        notes: vec![],
    })
}

#[derive(Deserialize)]
struct SLemmaInstance {
    criterion: QuadCriterion,
    phi1: QuadForm,
    phi2: QuadForm,
}

fn cmd_slemma(
    path: &Path,
    samples: usize,
    seed: u64,
    output: &Output,
    tols: &Tolerances,
) -> Result<Report> {
    let inst: SLemmaInstance = read_json(path)?;
    let (crit, p1, p2) = (&inst.criterion, &inst.phi1, &inst.phi2);
    let out = solve_slemma(crit, p1, p2, samples, seed)?;
    let (code, fields) = match &out {
        SLemmaOutcome::Certificate(c) => {
            let check = verify_slemma_certificate(c.alpha, c.beta, crit, p1, p2)?;
            let clauses = check_sign_clauses(c, p1, p2, crit);
            let verified = check.is_verified();
            (
                if verified { EXIT_OK } else { EXIT_NEGATIVE },
                json!({
                    "outcome": "certificate",
                    "alpha": c.alpha,
                    "beta": c.beta,
                    "separator": c.separator,
                    "lambda": c.lambda,
                    "min_over_z": c.min_over_z,
                    "min_over_x": c.min_over_x,
                    "verified": verified,
                    "evidence": {
                        "scale": crit.scale(),
                        "polished": c.polished,
                        "check": check,
                        "sign_clauses": clauses,
                    },
                }),
            )
        }
        SLemmaOutcome::Counterexample { x, z, value } => (
            EXIT_NEGATIVE,
            json!({
                "outcome": "counterexample",
                "verified": false,
                "evidence": { "x": x, "z": z, "value": value },
            }),
        ),
        SLemmaOutcome::Inconclusive {
            reason,
            best_value,
            candidate,
            candidate_value,
        } => {
            let check = match candidate {
                Some(ab) => Some(verify_slemma_certificate(ab[0], ab[1], crit, p1, p2)?),
                None => None,
            };
            let refuted = matches!(check, Some(SLemmaVerification::Refuted { .. }));
            (
                EXIT_INCONCLUSIVE,
                json!({
                    "outcome": "inconclusive",
                    "verified": false,
                    "evidence": {
                        "reason": reason,
                        "min_composite_found": best_value,
                        "candidate": candidate,
                        "candidate_dual_value": candidate_value,
                        "candidate_refuted": refuted,
                        "check": check,
                    },
                }),
            )
        }
    };
    let body = match output.format.unwrap_or(Format::Json) {
        Format::Csv => {
            let get = |k: &str| {
                fields
                    .get(k)
                    .and_then(Value::as_f64)
                    .map_or(String::new(), fmt_num)
            };
            csv_lines(
                &[
                    "outcome",
                    "alpha",
                    "beta",
                    "lambda",
                    "min_over_z",
                    "min_over_x",
                    "verified",
                ]
                .map(String::from),
                &[vec![
                    fields["outcome"].as_str().unwrap_or_default().to_string(),
                    get("alpha"),
                    get("beta"),
                    get("lambda"),
                    get("min_over_z"),
                    get("min_over_x"),
                    fields["verified"].to_string(),
                ]],
            )
        }
        Format::Json => {
            let mut v = fields;
            v.as_object_mut()
                .unwrap()
                .insert("kind".into(), json!("slemma"));
            v.as_object_mut()
                .unwrap()
                .insert("seed".into(), json!(seed));
            json_text(&envelope("slemma", tols, v))
        }
    };
    Ok(Report {
        body,
        plot: None,
        code,
        notes: vec![],
    })
}

#[allow(clippy::too_many_arguments)]
fn cmd_tls(
    matrix: &Path,
    rhs: &Path,
    rho: f64,
    starts: usize,
    iterations: usize,
    seed: u64,
    output: &Output,
    tols: &Tolerances,
) -> Result<Report> {
    if rho <= 0.0 || !rho.is_finite() {
        return Err(Error::InvalidInput(format!(
            "--rho must be positive, got {rho}"
        )));
    }
    let a = read_dense_matrix(matrix)?;
    let b = read_vector(rhs)?;
    let report = tls_minimize(&a, &b, rho, starts, iterations, seed)?;
    let note = "demo objective only: the value is an upper bound from multistart descent, not a certified infimum";
    let body = match output.format.unwrap_or(Format::Json) {
        Format::Csv => {
            let n = report.best_x.len();
            let mut header = vec!["start".to_string(), "value".to_string()];
            header.extend((1..=n).map(|i| format!("x{i}")));
            let rows: Vec<Vec<String>> = report
                .trace
                .iter()
                .enumerate()
                .map(|(i, t)| {
                    let mut r = vec![i.to_string(), fmt_num(t.value)];
                    r.extend(t.x.iter().map(|v| fmt_num(*v)));
                    r
                })
                .collect();
            csv_lines(&header, &rows)
        }
        Format::Json => json_text(&envelope(
            "tls-demo",
            tols,
            json!({
                "rho": rho,
                "seed": seed,
                "best_value": report.best_value,
                "best_x": report.best_x,
                "certified": report.certified,
                "note": note,
                "trace": report.trace,
            }),
        )),
    };
    Ok(Report {
        body,
        plot: None,
        code: EXIT_OK,
        notes: vec![format!("note: {note}")],
    })
}
