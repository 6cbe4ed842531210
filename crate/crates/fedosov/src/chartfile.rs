//! JSON chart files.
//!
//! ```json
//! {
//!   "dimension": 2,
//!   "order": 4,
//!   "coordinates": ["x", "y"],
//!   "base_point": ["0", "1"],
//!   "omega": [[null, "1/y^2"], [null, null]],
//!   "connection": {"kind": "levi_civita", "metric": [["1/y^2", "0"], ["0", "1/y^2"]]}
//! }
//! ```
//!
//! A `null` entry of `omega` is the negative of its transpose partner (zero on the diagonal or
//! when both are `null`); a missing or `null` `omega` is the canonical Darboux form.
//! All expressions are expanded at `base_point`, so the chart origin is the base point.

use fedosov_core::chart::{
    canonical_omega, levi_civita_chart, preserving_from_symmetric, validate, ChartSpec, Provenance,
};
use fedosov_core::{Jet, JetTensor, Rational};
use serde::{Deserialize, Serialize};

use crate::error::CliError;
use crate::expr::{self, EvalError, Expr};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChartFile {
    pub dimension: usize,
    pub order: usize,
    pub coordinates: Vec<String>,
    pub base_point: Vec<Literal>,
    #[serde(default)]
    pub omega: Option<Vec<Vec<Option<String>>>>,
    pub connection: Connection,
}

/// A rational written as a JSON integer or as a string such as `"-3/2"`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Literal {
    Integer(i64),
    Text(String),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Connection {
    Flat,
    Explicit { gamma_lower: Vec<Vec<Vec<String>>> },
    LeviCivita { metric: Vec<Vec<String>> },
    FromSymmetric { pi_lower: Vec<Vec<Vec<String>>> },
}

/// Parsed expression together with the JSON path it came from.
struct Located<'a> {
    path: String,
    text: &'a str,
}

struct Context<'a> {
    names: &'a [String],
    base: Vec<Rational>,
    order: usize,
}

impl Context<'_> {
    fn expr(&self, loc: &Located<'_>) -> Result<Expr, CliError> {
        expr::parse(loc.text, self.names).map_err(|e| CliError::Expression {
            field: loc.path.clone(),
            column: e.column,
            message: e.message,
        })
    }

    fn jet(&self, loc: &Located<'_>, order: usize) -> Result<Jet, CliError> {
        self.expr(loc)?
            .to_jet(&self.base, order)
            .map_err(|EvalError::ZeroDenominator| CliError::ZeroDenominator {
                field: loc.path.clone(),
            })
    }
}

fn check_len<T>(items: &[T], n: usize, path: &str) -> Result<(), CliError> {
    if items.len() != n {
        return Err(CliError::Shape(format!(
            "{path} has {} entries, expected {n}",
            items.len()
        )));
    }
    Ok(())
}

fn literal(l: &Literal, path: &str) -> Result<Rational, CliError> {
    match l {
        Literal::Integer(i) => Ok(Rational::from(*i)),
        Literal::Text(s) => {
            let e = expr::parse(s, &[]).map_err(|e| CliError::Expression {
                field: path.into(),
                column: e.column,
                message: e.message,
            })?;
            e.eval_exact(&[])
                .ok_or_else(|| CliError::ZeroDenominator { field: path.into() })
        }
    }
}

fn rank3(
    ctx: &Context<'_>,
    table: &[Vec<Vec<String>>],
    name: &str,
    order: usize,
) -> Result<JetTensor, CliError> {
    let n = ctx.names.len();
    check_len(table, n, name)?;
    let mut jets = Vec::with_capacity(n * n * n);
    for (i, plane) in table.iter().enumerate() {
        check_len(plane, n, &format!("{name}[{i}]"))?;
        for (j, row) in plane.iter().enumerate() {
            check_len(row, n, &format!("{name}[{i}][{j}]"))?;
            for (k, text) in row.iter().enumerate() {
                jets.push(ctx.jet(
                    &Located {
                        path: format!("{name}[{i}][{j}][{k}]"),
                        text,
                    },
                    order,
                )?);
            }
        }
    }
    Ok(JetTensor::covariant_from_fn(n, 3, |idx| {
        jets[(idx[0] * n + idx[1]) * n + idx[2]].clone()
    }))
}

fn rank2(
    ctx: &Context<'_>,
    table: &[Vec<String>],
    name: &str,
    order: usize,
) -> Result<JetTensor, CliError> {
    let n = ctx.names.len();
    check_len(table, n, name)?;
    let mut jets = Vec::with_capacity(n * n);
    for (i, row) in table.iter().enumerate() {
        check_len(row, n, &format!("{name}[{i}]"))?;
        for (j, text) in row.iter().enumerate() {
            jets.push(ctx.jet(
                &Located {
                    path: format!("{name}[{i}][{j}]"),
                    text,
                },
                order,
            )?);
        }
    }
    Ok(JetTensor::covariant_from_fn(n, 2, |idx| {
        jets[idx[0] * n + idx[1]].clone()
    }))
}

fn omega_jets(
    ctx: &Context<'_>,
    omega: &Option<Vec<Vec<Option<String>>>>,
) -> Result<JetTensor, CliError> {
    let n = ctx.names.len();
    let Some(table) = omega else {
        return Ok(canonical_omega(n)
            .to_jets(n, ctx.order)
            .without_symmetries());
    };
    check_len(table, n, "omega")?;
    let mut given: Vec<Option<Jet>> = Vec::with_capacity(n * n);
    for (i, row) in table.iter().enumerate() {
        check_len(row, n, &format!("omega[{i}]"))?;
        for (j, entry) in row.iter().enumerate() {
            given.push(match entry {
                Some(text) => Some(ctx.jet(
                    &Located {
                        path: format!("omega[{i}][{j}]"),
                        text,
                    },
                    ctx.order,
                )?),
                None => None,
            });
        }
    }
    let zero = Jet::zero(n, ctx.order);
    Ok(JetTensor::covariant_from_fn(n, 2, |idx| {
        let (i, j) = (idx[0], idx[1]);
        match (&given[i * n + j], &given[j * n + i]) {
            (Some(w), _) => w.clone(),
            (None, Some(w)) => -w,
            (None, None) => zero.clone(),
        }
    }))
}

impl ChartFile {
    /// Builds the chart, with `order` overriding the file's truncation order.
    pub fn to_chart(&self, order: Option<usize>) -> Result<ChartSpec, CliError> {
        let n = self.dimension;
        let order = order.unwrap_or(self.order);
        check_len(&self.coordinates, n, "coordinates")?;
        check_len(&self.base_point, n, "base_point")?;
        let base = self
            .base_point
            .iter()
            .enumerate()
            .map(|(i, l)| literal(l, &format!("base_point[{i}]")))
            .collect::<Result<Vec<_>, _>>()?;
        let ctx = Context {
            names: &self.coordinates,
            base,
            order,
        };
        let omega = omega_jets(&ctx, &self.omega)?;
        let chart = match &self.connection {
            Connection::Flat => {
                let gamma =
                    JetTensor::covariant_from_fn(n, 3, |_| Jet::zero(n, order.saturating_sub(1)));
                ChartSpec::new(omega, gamma, Provenance::Flat)?
            }
            Connection::Explicit { gamma_lower } => {
                let gamma = rank3(&ctx, gamma_lower, "connection.gamma_lower", order)?;
                ChartSpec::new(omega, gamma, Provenance::Explicit)?
            }
            Connection::LeviCivita { metric } => {
                let g = rank2(&ctx, metric, "connection.metric", order)?;
                levi_civita_chart(omega, &g)?
            }
            Connection::FromSymmetric { pi_lower } => {
                let pi = rank3(
                    &ctx,
                    pi_lower,
                    "connection.pi_lower",
                    order.saturating_sub(1),
                )?;
                let gamma = preserving_from_symmetric(&pi, &omega)?;
                ChartSpec::new(omega, gamma, Provenance::Explicit)?
            }
        };
        let report = validate(&chart);
        if !report.all_passed() {
            return Err(CliError::Validation { report });
        }
        Ok(chart)
    }

    /// A file describing `chart` with an explicit connection, at the origin.
    pub fn from_chart(chart: &ChartSpec) -> Self {
        let n = chart.dim();
        let coordinates: Vec<String> = (1..=n).map(|k| format!("x{k}")).collect();
        let names: Vec<&str> = coordinates.iter().map(String::as_str).collect();
        let omega = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| Some(chart.omega().get(&[i, j]).to_text(&names)))
                    .collect()
            })
            .collect();
        let gamma_lower = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        (0..n)
                            .map(|k| chart.gamma_lower().get(&[i, j, k]).to_text(&names))
                            .collect()
                    })
                    .collect()
            })
            .collect();
        ChartFile {
            dimension: n,
            order: chart.order(),
            coordinates,
            base_point: vec![Literal::Integer(0); n],
            omega: Some(omega),
            connection: Connection::Explicit { gamma_lower },
        }
    }
}

/// Parses chart-file JSON into a validated chart.
pub fn parse_chart(text: &str) -> Result<ChartSpec, CliError> {
    parse_chart_with_order(text, None)
}

/// As [`parse_chart`], with an optional truncation order override.
pub fn parse_chart_with_order(text: &str, order: Option<usize>) -> Result<ChartSpec, CliError> {
    let file: ChartFile = serde_json::from_str(text).map_err(CliError::from_json)?;
    file.to_chart(order)
}
