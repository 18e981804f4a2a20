//! JSON state and operator files.
//!
//! A state file is either `{"N": n, "d": d, "coeffs": [[re, im], …]}` with
//! coefficients in canonical induced-basis order, or
//! `{"N": n, "decomposition": [{"weight": [re, im], "vector": [[re, im], …]}, …]}`.
//! A scalar may be a number, a string (`"p/q"`, integer or decimal, parsed
//! exactly in exact mode), or a `[re, im]` pair of those. `"d"` defaults to 2.

use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::scalar::{same_type, Field, GaussianRational, Mode, Scalar};
use crate::slocc::LocalOperator;
use crate::linalg::Mat;
use crate::states::{expand_decomposition, DecomposedState, LocalVector, SymState, Term};

/// Parsed state, with the decomposition it was given as (if any).
#[derive(Debug, Clone, PartialEq)]
pub struct StateInput<F> {
    pub state: SymState<F>,
    pub decomposition: Option<DecomposedState<F>>,
}

fn parse_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Parse(msg.into()))
}

fn real<F: Field>(v: &Value) -> Result<F> {
    let text = match v {
        Value::Number(n) => n.to_string(),
        Value::String(s) => s.clone(),
        other => return parse_err(format!("expected a number or numeric string, found {other}")),
    };
    Ok(match Scalar::parse_real(&text, F::MODE)? {
        Scalar::Exact(q) => same_type::<GaussianRational, F>(q),
        Scalar::Float(c) => same_type::<num_complex::Complex64, F>(c),
    })
}

/// A real scalar or a `[re, im]` pair.
pub fn parse_scalar<F: Field>(v: &Value) -> Result<F> {
    match v {
        Value::Array(pair) if pair.len() == 2 => {
            let (re, im): (F, F) = (real(&pair[0])?, real(&pair[1])?);
            let i = match F::MODE {
                Mode::Exact => F::from_exact(&GaussianRational::gaussian(0, 1)),
                Mode::Float => same_type::<num_complex::Complex64, F>(num_complex::Complex64::new(0.0, 1.0)),
            };
            Ok(re + im * i)
        }
        Value::Array(_) => parse_err("complex scalars are [re, im] pairs"),
        other => real(other),
    }
}

fn usize_field(obj: &Map<String, Value>, key: &str) -> Result<Option<usize>> {
    match obj.get(key) {
        None => Ok(None),
        Some(Value::Number(n)) => match n.as_u64() {
            Some(v) => Ok(Some(v as usize)),
            None => parse_err(format!("\"{key}\" must be a non-negative integer")),
        },
        Some(_) => parse_err(format!("\"{key}\" must be a non-negative integer")),
    }
}

fn array<'a>(v: &'a Value, what: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| Error::Parse(format!("{what} must be an array")))
}

pub fn parse_state<F: Field>(text: &str) -> Result<StateInput<F>> {
    let value: Value = serde_json::from_str(text).map_err(|e| Error::Parse(format!("invalid JSON: {e}")))?;
    let Some(obj) = value.as_object() else { return parse_err("state file must be a JSON object") };
    let n = usize_field(obj, "N")?.ok_or_else(|| Error::Parse("missing \"N\"".into()))?;
    let d = usize_field(obj, "d")?.unwrap_or(2);
    match (obj.get("coeffs"), obj.get("decomposition")) {
        (Some(c), None) => {
            let coeffs = array(c, "\"coeffs\"")?.iter().map(parse_scalar).collect::<Result<Vec<F>>>()?;
            Ok(StateInput { state: SymState::new(n, d, coeffs)?, decomposition: None })
        }
        (None, Some(dec)) => {
            let terms = array(dec, "\"decomposition\"")?
                .iter()
                .map(|t| {
                    let w = t.get("weight").ok_or_else(|| Error::Parse("term without \"weight\"".into()))?;
                    let v = t.get("vector").ok_or_else(|| Error::Parse("term without \"vector\"".into()))?;
                    let comps = array(v, "\"vector\"")?.iter().map(parse_scalar).collect::<Result<Vec<F>>>()?;
                    Ok(Term { weight: parse_scalar(w)?, vector: LocalVector::new(comps)? })
                })
                .collect::<Result<Vec<_>>>()?;
            if let Some(t) = terms.first() {
                if obj.contains_key("d") && t.vector.dim() != d {
                    return parse_err(format!("vectors have {} components but \"d\" = {d}", t.vector.dim()));
                }
            }
            let dec = DecomposedState::new(n, terms)?;
            Ok(StateInput { state: expand_decomposition(&dec)?, decomposition: Some(dec) })
        }
        (Some(_), Some(_)) => parse_err("give either \"coeffs\" or \"decomposition\", not both"),
        (None, None) => parse_err("state file needs \"coeffs\" or \"decomposition\""),
    }
}

/// Operator file: `[[a00, a01], [a10, a11]]` or `{"matrix": …}`.
pub fn parse_operator<F: Field>(text: &str) -> Result<LocalOperator<F>> {
    let value: Value = serde_json::from_str(text).map_err(|e| Error::Parse(format!("invalid JSON: {e}")))?;
    let rows = match &value {
        Value::Object(obj) => obj.get("matrix").ok_or_else(|| Error::Parse("missing \"matrix\"".into()))?,
        other => other,
    };
    let rows = array(rows, "matrix")?;
    let parsed = rows
        .iter()
        .map(|r| array(r, "matrix row")?.iter().map(parse_scalar).collect::<Result<Vec<F>>>())
        .collect::<Result<Vec<_>>>()?;
    if parsed.is_empty() || parsed.iter().any(|r| r.len() != parsed.len()) {
        return parse_err("matrix must be square");
    }
    LocalOperator::from_matrix(Mat::from_rows(parsed))
}

/// Exact scalars as `["p/q", "p/q"]`, float scalars as `[re, im]`.
pub fn scalar_json<F: Field>(x: &F) -> Value {
    match x.to_exact() {
        Some(q) if F::MODE == Mode::Exact => json!([q.re.to_string(), q.im.to_string()]),
        _ => {
            let c = x.to_c64();
            json!([c.re, c.im])
        }
    }
}

pub fn state_json<F: Field>(s: &SymState<F>) -> Value {
    json!({
        "N": s.parties(),
        "d": s.local_dim(),
        "coeffs": s.coeffs().iter().map(scalar_json).collect::<Vec<_>>(),
    })
}

pub fn decomposition_json<F: Field>(d: &DecomposedState<F>) -> Value {
    json!({
        "N": d.parties(),
        "decomposition": d.terms().iter().map(|t| json!({
            "weight": scalar_json(&t.weight),
            "vector": t.vector.0.iter().map(scalar_json).collect::<Vec<_>>(),
        })).collect::<Vec<_>>(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::ghz;
    use num_complex::Complex64;

    type Q = GaussianRational;

    #[test]
    fn coefficient_file_exact() {
        let s = parse_state::<Q>(r#"{"N": 3, "d": 2, "coeffs": [["1/2", 0], [0, 0], [0, 0], [0.5, "0"]]}"#).unwrap();
        assert_eq!(s.state, ghz::<Q>(3).scale(&Q::from_ratio(1, 2)).unwrap());
        assert!(s.decomposition.is_none());
        let i = parse_state::<Q>(r#"{"N": 2, "coeffs": [[0, 1], 2, "-3/4"]}"#).unwrap();
        assert_eq!(i.state.coeffs(), &[Q::gaussian(0, 1), Q::from_i64(2), Q::from_ratio(-3, 4)]);
    }

    #[test]
    fn decomposition_file() {
        let text = r#"{"N": 3, "decomposition": [
            {"weight": [1, 0], "vector": [[1, 0], [0, 0]]},
            {"weight": [1, 0], "vector": [[0, 0], [1, 0]]}]}"#;
        let s = parse_state::<Q>(text).unwrap();
        assert_eq!(s.state, ghz::<Q>(3));
        assert_eq!(s.decomposition.unwrap().len(), 2);
        let f = parse_state::<Complex64>(text).unwrap();
        assert_eq!(f.state, ghz::<Complex64>(3));
    }

    #[test]
    fn bad_files() {
        for t in [
            "not json",
            "[]",
            r#"{"coeffs": [1, 2]}"#,
            r#"{"N": 2, "coeffs": [1, 2]}"#,
            r#"{"N": 2, "coeffs": [1, "x", 2]}"#,
            r#"{"N": 2, "coeffs": [1, [1, 2, 3], 2]}"#,
            r#"{"N": 2}"#,
        ] {
            assert!(parse_state::<Q>(t).is_err(), "{t}");
        }
        assert!(matches!(parse_state::<Q>("{").unwrap_err(), Error::Parse(_)));
    }

    #[test]
    fn operator_files() {
        let a = parse_operator::<Q>(r#"{"matrix": [[1, "1/3"], [0, 2]]}"#).unwrap();
        assert_eq!(a.entry(0, 1), &Q::from_ratio(1, 3));
        assert!(parse_operator::<Q>("[[1, 2], [2, 4]]").is_err());
        assert!(parse_operator::<Q>("[[1, 2, 3], [2, 4, 5]]").is_err());
    }

    #[test]
    fn round_trip() {
        let s = SymState::qubits(vec![Q::from_ratio(1, 3), Q::gaussian(2, -1), Q::from_i64(0)]).unwrap();
        let text = serde_json::to_string(&state_json(&s)).unwrap();
        assert_eq!(parse_state::<Q>(&text).unwrap().state, s);
        let f = s.to_c64();
        let text = serde_json::to_string(&state_json(&f)).unwrap();
        assert_eq!(parse_state::<Complex64>(&text).unwrap().state, f);
    }
}
