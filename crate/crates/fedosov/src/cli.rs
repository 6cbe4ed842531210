//! Command dispatch. Every command prints one JSON document on standard output; failures print
//! `{"error": {...}}` on standard error. Exit status is 0 on success, 1 when a check fails and
//! 2 on malformed input.

use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use fedosov_core::chart::{functional_dims, validate, ChartSpec};
use fedosov_core::curvature::{curvature, identity_report, ricci, sectional_classify};
use fedosov_core::normal::{derivative_identity_report, normal_tensors};
use fedosov_core::reconstruct::{realize_curvature, realize_curvature_derivative};
use fedosov_core::{PointTensor, Rational};
use serde_json::{json, Value};

use crate::chartfile::{parse_chart_with_order, ChartFile};
use crate::error::CliError;
use crate::{json, selftest};

#[derive(Debug, Parser)]
#[command(
    name = "fedosov",
    version,
    about = "Exact local geometry of symplectic connections"
)]
struct Cli {
    /// Override the truncation order of chart files.
    #[arg(long, global = true)]
    order: Option<usize>,
    /// Seed for `selftest`.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Indent the JSON output.
    #[arg(long, global = true)]
    pretty: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Validate a chart and run the curvature identity suites.
    Check { file: PathBuf },
    /// Lowered curvature tensor as jets, or at the base point.
    Curvature {
        file: PathBuf,
        #[arg(long)]
        at_base: bool,
    },
    /// Ricci tensor, its identity checks and the Einstein flag.
    Ricci { file: PathBuf },
    /// Classify the plane spanned by two tangent vectors at the base point.
    Sectional {
        file: PathBuf,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        x: Vec<String>,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        y: Vec<String>,
    },
    /// Affine normal tensors and extensions of omega at the base point.
    NormalTensors {
        file: PathBuf,
        #[arg(long)]
        rmax: usize,
    },
    /// Build a chart realizing prescribed curvature data at the origin.
    Realize { pointfile: PathBuf },
    /// Functional dimensions of connection spaces in dimension N.
    Dims { n: u32 },
    /// Randomized property suites.
    Selftest {
        #[arg(long, default_value_t = 20)]
        charts: usize,
    },
}

/// Outcome of a command: the JSON document and whether every check passed.
struct Outcome {
    value: Value,
    passed: bool,
}

fn passed(value: Value) -> Outcome {
    Outcome {
        value,
        passed: true,
    }
}

fn read(path: &PathBuf) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

fn chart(path: &PathBuf, order: Option<usize>) -> Result<(ChartSpec, Vec<String>), CliError> {
    let text = read(path)?;
    let file: ChartFile = serde_json::from_str(&text).map_err(CliError::from_json)?;
    let c = parse_chart_with_order(&text, order)?;
    Ok((c, file.coordinates))
}

fn vector(items: &[String], flag: &str) -> Result<Vec<Rational>, CliError> {
    items
        .iter()
        .map(|s| {
            s.trim()
                .parse::<Rational>()
                .map_err(|e| CliError::Usage(format!("--{flag}: bad rational '{s}': {e}")))
        })
        .collect()
}

fn check(c: &ChartSpec) -> Result<Outcome, CliError> {
    let v = validate(c);
    if !v.all_passed() {
        return Ok(Outcome {
            value: json!({"validate": json::report(&v), "passed": false}),
            passed: false,
        });
    }
    let cd = curvature(c)?;
    let ids = identity_report(&cd, c.omega_inv());
    let ric = ricci(&cd, c.omega_inv()).report;
    let deriv = if c.order() >= 3 {
        Some(derivative_identity_report(c)?)
    } else {
        None
    };
    let ok = ids.all_passed() && ric.all_passed() && deriv.as_ref().is_none_or(|d| d.all_passed());
    Ok(Outcome {
        value: json!({
            "validate": json::report(&v),
            "identities": json::report(&ids),
            "ricci": json::report(&ric),
            "derivative_identities": deriv.as_ref().map(json::report),
            "passed": ok,
        }),
        passed: ok,
    })
}

fn realize(path: &PathBuf) -> Result<Outcome, CliError> {
    let text = read(path)?;
    let v: Value = serde_json::from_str(&text).map_err(CliError::from_json)?;
    let obj = v
        .as_object()
        .ok_or_else(|| CliError::Shape("point file must be a JSON object".into()))?;
    if let Some(k) = obj
        .keys()
        .find(|k| !["omega0", "R0", "R1"].contains(&k.as_str()))
    {
        return Err(CliError::Shape(format!(
            "unknown field '{k}' in point file"
        )));
    }
    let omega_v = obj
        .get("omega0")
        .ok_or_else(|| CliError::Shape("point file needs omega0".into()))?;
    let n = json::outer_dim(omega_v)
        .ok_or_else(|| CliError::Shape("omega0 must be an array".into()))?;
    let tensor = |key: &str, rank: usize| -> Result<Option<PointTensor>, CliError> {
        match obj.get(key) {
            None | Some(Value::Null) => Ok(None),
            Some(t) => json::parse_point_tensor(t, n, rank, key)
                .map(Some)
                .map_err(CliError::Shape),
        }
    };
    let omega0 = tensor("omega0", 2)?.expect("present");
    let r0 = tensor("R0", 4)?;
    let r1 = tensor("R1", 5)?;
    let c = match (&r0, &r1) {
        (_, Some(r1)) => realize_curvature_derivative(r0.as_ref(), r1, &omega0)?,
        (Some(r0), None) => realize_curvature(r0, &omega0)?,
        (None, None) => return Err(CliError::Shape("point file needs R0 or R1".into())),
    };
    let file = ChartFile::from_chart(&c);
    Ok(passed(
        serde_json::to_value(file).expect("chart files serialize"),
    ))
}

fn dispatch(cli: &Cli) -> Result<Outcome, CliError> {
    match &cli.command {
        Command::Check { file } => check(&chart(file, cli.order)?.0),
        Command::Curvature { file, at_base } => {
            let (c, coords) = chart(file, cli.order)?;
            let cd = curvature(&c)?;
            let refs: Vec<&str> = coords.iter().map(String::as_str).collect();
            Ok(passed(if *at_base {
                json!({"R": json::point_tensor(&cd.r_low.at_origin())})
            } else {
                json!({"order": cd.order(), "R": json::jet_tensor(&cd.r_low, &refs)})
            }))
        }
        Command::Ricci { file } => {
            let (c, coords) = chart(file, cli.order)?;
            let cd = curvature(&c)?;
            let ric = ricci(&cd, c.omega_inv());
            let refs: Vec<&str> = coords.iter().map(String::as_str).collect();
            let ok = ric.report.all_passed();
            Ok(Outcome {
                value: json!({
                    "K": json::jet_tensor(&ric.k, &refs),
                    "checks": json::report(&ric.report),
                    "einstein": ric.k.is_zero(),
                }),
                passed: ok,
            })
        }
        Command::Sectional { file, x, y } => {
            let (c, _) = chart(file, cli.order)?;
            let (x, y) = (vector(x, "x")?, vector(y, "y")?);
            let r0 = curvature(&c)?.r_low.at_origin();
            let s = sectional_classify(&r0, &c.omega().at_origin(), &x, &y)?;
            Ok(passed(json::sectional(&s)))
        }
        Command::NormalTensors { file, rmax } => {
            let (c, _) = chart(file, cli.order)?;
            let f = normal_tensors(&c, *rmax)?;
            Ok(passed(json::normal_family(&f)))
        }
        Command::Realize { pointfile } => realize(pointfile),
        Command::Dims { n } => {
            if *n == 0 {
                return Err(CliError::Usage("N must be positive".into()));
            }
            Ok(passed(json::dims(&functional_dims(*n))))
        }
        Command::Selftest { charts } => {
            let results = selftest::run(*charts, cli.seed, cli.order);
            let ok = results.iter().all(|r| r.passed == r.total);
            let suites: Vec<Value> = results
                .iter()
                .map(|r| json!({"suite": r.name, "passed": r.passed, "total": r.total}))
                .collect();
            Ok(Outcome {
                value: Value::Array(suites),
                passed: ok,
            })
        }
    }
}

fn render(v: &Value, pretty: bool) -> String {
    if pretty {
        serde_json::to_string_pretty(v).expect("values serialize")
    } else {
        serde_json::to_string(v).expect("values serialize")
    }
}

/// Runs the command line `args` (including the program name) and returns the exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            if !e.use_stderr() {
                let _ = write!(out, "{e}");
                return 0;
            }
            let _ = writeln!(
                err,
                "{}",
                render(&CliError::Usage(e.to_string()).to_json(), false)
            );
            return 2;
        }
    };
    match dispatch(&cli) {
        Ok(outcome) => {
            if let Command::Selftest { .. } = cli.command {
                for line in outcome.value.as_array().into_iter().flatten() {
                    let _ = writeln!(out, "{}", render(line, false));
                }
            } else {
                let _ = writeln!(out, "{}", render(&outcome.value, cli.pretty));
            }
            if outcome.passed {
                0
            } else {
                1
            }
        }
        Err(e) => {
            let _ = writeln!(err, "{}", render(&e.to_json(), false));
            e.exit_code()
        }
    }
}
