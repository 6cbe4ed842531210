//! JSON renderings of exact values. Rationals are strings `"p/q"` (or `"p"`), jets use the
//! canonical text form, tensors are nested arrays in index order.

use fedosov_core::chart::FunctionalDims;
use fedosov_core::curvature::SectionalClass;
use fedosov_core::normal::NormalFamily;
use fedosov_core::tensor::{Scalar, Tensor};
use fedosov_core::{Jet, JetTensor, PointTensor, Rational, ValidationReport};
use serde_json::{json, Value};

pub fn rational(q: &Rational) -> Value {
    Value::String(q.to_string())
}

pub fn jet(j: &Jet, names: &[&str]) -> Value {
    Value::String(j.to_text(names))
}

fn nested<S: Scalar>(t: &Tensor<S>, leaf: &dyn Fn(&S) -> Value) -> Value {
    fn go<S: Scalar>(t: &Tensor<S>, prefix: &mut Vec<usize>, leaf: &dyn Fn(&S) -> Value) -> Value {
        if prefix.len() == t.rank() {
            return leaf(t.get(prefix));
        }
        let items = (0..t.dim())
            .map(|i| {
                prefix.push(i);
                let v = go(t, prefix, leaf);
                prefix.pop();
                v
            })
            .collect();
        Value::Array(items)
    }
    go(t, &mut Vec::new(), leaf)
}

pub fn point_tensor(t: &PointTensor) -> Value {
    nested(t, &rational)
}

pub fn jet_tensor(t: &JetTensor, names: &[&str]) -> Value {
    nested(t, &|j: &Jet| jet(j, names))
}

pub fn report(r: &ValidationReport) -> Value {
    let checks: Vec<Value> = r
        .checks()
        .iter()
        .map(|c| {
            let witness = c.witness.as_ref().map(|w| {
                json!({
                    "indices": w.indices,
                    "multidegree": w.multidegree,
                })
            });
            json!({"name": c.name, "passed": c.passed, "witness": witness})
        })
        .collect();
    json!({"passed": r.all_passed(), "checks": checks})
}

pub fn sectional(s: &SectionalClass) -> Value {
    json!({
        "kind": s.kind.as_str(),
        "det_invariant": rational(&s.det_invariant),
        "sign": s.sign,
        "r_numeric": s.r_numeric,
        "form": s.form.iter().map(rational).collect::<Vec<_>>(),
    })
}

pub fn normal_family(f: &NormalFamily) -> Value {
    json!({
        "r_max": f.r_max(),
        "A": f.a.iter().map(point_tensor).collect::<Vec<_>>(),
        "omega_ext": f.omega_ext.iter().map(point_tensor).collect::<Vec<_>>(),
        "invariants": report(&f.invariants_report()),
    })
}

pub fn dims(d: &FunctionalDims) -> Value {
    json!({
        "C": d.c,
        "S": d.s,
        "C_omega": d.c_omega,
        "S_omega": d.s_omega,
        "Lambda3": d.lambda3,
        "residual": d.residual,
    })
}

/// Reads a nested array of rationals (strings or integers) as a covariant point tensor.
pub fn parse_point_tensor(
    v: &Value,
    dim: usize,
    rank: usize,
    what: &str,
) -> Result<PointTensor, String> {
    let mut data = Vec::new();
    fn go(
        v: &Value,
        depth: usize,
        dim: usize,
        rank: usize,
        what: &str,
        out: &mut Vec<Rational>,
    ) -> Result<(), String> {
        if depth == rank {
            return match v {
                Value::String(s) => s
                    .trim()
                    .parse::<Rational>()
                    .map(|q| out.push(q))
                    .map_err(|e| format!("{what}: bad rational '{s}': {e}")),
                Value::Number(n) => n
                    .as_i64()
                    .map(|i| out.push(Rational::from(i)))
                    .ok_or_else(|| format!("{what}: numbers must be integers or \"p/q\" strings")),
                _ => Err(format!("{what}: expected a rational")),
            };
        }
        match v {
            Value::Array(items) if items.len() == dim => items
                .iter()
                .try_for_each(|item| go(item, depth + 1, dim, rank, what, out)),
            _ => Err(format!(
                "{what}: expected a nested array of shape {dim}^{rank}"
            )),
        }
    }
    go(v, 0, dim, rank, what, &mut data)?;
    PointTensor::from_vec(dim, vec![fedosov_core::Variance::Down; rank], data)
        .map_err(|e| e.to_string())
}

/// Outer length of a nested array.
pub fn outer_dim(v: &Value) -> Option<usize> {
    v.as_array().map(Vec::len)
}
