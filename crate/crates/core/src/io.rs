//! JSON and CSV forms of matrices and reports.
//!
//! JSON output is canonical: object keys sorted, rationals as `"num/den"`.
//! CSV output holds decimal approximations with a fixed number of digits.

use serde::Serialize;
use serde_json::{json, Value};

use crate::bispectral::{BispectralOperator, ReferenceComparison};
use crate::error::{Error, Result};
use crate::matrix::ExactMatrix;
use crate::scalar::{self, Scalar};
use crate::statespace::State;

/// Pretty JSON with sorted keys.
pub fn to_canonical_json<T: Serialize>(value: &T) -> Result<String> {
    // serde_json's Map is a BTreeMap here, so a round trip through Value sorts keys.
    let v = serde_json::to_value(value)?;
    let mut s = serde_json::to_string_pretty(&v)?;
    s.push('\n');
    Ok(s)
}

pub fn matrix_json(m: &ExactMatrix, row_states: &[State], col_states: &[State]) -> Value {
    json!({
        "rows": m.rows(),
        "cols": m.cols(),
        "ordering": { "rows": row_states, "cols": col_states },
        "entries": (0..m.rows())
            .map(|r| m.row(r).iter().map(scalar::format).collect::<Vec<_>>())
            .collect::<Vec<_>>(),
    })
}

/// Reads the `entries` array of a matrix object (labelled or not).
pub fn matrix_from_json(v: &Value) -> Result<ExactMatrix> {
    let entries = v
        .get("entries")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::Malformed("matrix object without an entries array".into()))?;
    let rows: Vec<Vec<Scalar>> = entries
        .iter()
        .map(|row| {
            row.as_array()
                .ok_or_else(|| Error::Malformed("matrix row is not an array".into()))?
                .iter()
                .map(|x| {
                    let text = x.as_str().ok_or_else(|| Error::Malformed(format!("entry {x} is not a string")))?;
                    scalar::parse(text)
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    if let Some(width) = rows.first().map(Vec::len) {
        if rows.iter().any(|r| r.len() != width) {
            return Err(Error::Malformed("ragged matrix rows".into()));
        }
    }
    let m = ExactMatrix::from_rows(rows);
    for (key, expect) in [("rows", m.rows()), ("cols", m.cols())] {
        if let Some(n) = v.get(key).and_then(Value::as_u64) {
            if n as usize != expect && !(m.rows() == 0 && key == "cols") {
                return Err(Error::Malformed(format!("{key} = {n} but entries give {expect}")));
            }
        }
    }
    Ok(m)
}

pub fn parse_matrix_json(text: &str) -> Result<ExactMatrix> {
    matrix_from_json(&serde_json::from_str(text)?)
}

/// One line per row, comma-separated decimals with `digits` fractional digits.
pub fn matrix_csv(m: &ExactMatrix, digits: usize) -> String {
    let mut out = String::new();
    for r in 0..m.rows() {
        let line: Vec<String> = m.row(r).iter().map(|q| scalar::to_decimal(q, digits)).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    out
}

/// Row-by-row listing of the N=5 operator with the closed-form entry names.
pub fn named_row_layout(op: &BispectralOperator, cmp: &ReferenceComparison) -> String {
    let mut out = String::new();
    for r in 0..op.matrix.rows() {
        let row_state = op.space.state(r);
        let mut named: Vec<(usize, String, &Scalar)> = cmp
            .entries
            .iter()
            .filter(|e| e.row == row_state)
            .map(|e| (op.space.index_of(e.col).unwrap(), e.name.clone(), &e.computed))
            .collect();
        named.sort_by_key(|(c, _, _)| *c);
        let slots: Vec<String> = (0..op.matrix.cols())
            .map(|c| match named.iter().find(|(nc, _, _)| *nc == c) {
                Some((_, name, _)) => name.clone(),
                None => "0".to_string(),
            })
            .collect();
        out.push_str(&format!("row {:>2} {}: [{}]\n", r + 1, row_state, slots.join(",")));
        for (_, name, value) in named {
            out.push_str(&format!("    {name} = {}\n", scalar::format(value)));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, ratio};

    #[test]
    fn identity_json() {
        let v = matrix_json(&ExactMatrix::identity(3), &[], &[]);
        assert_eq!(v["entries"][1][1], "1/1");
        assert_eq!(v["entries"][0][1], "0/1");
    }

    #[test]
    fn keys_are_sorted() {
        let text = to_canonical_json(&json!({"zeta": 1, "alpha": {"b": 2, "a": 1}})).unwrap();
        let za = text.find("zeta").unwrap();
        assert!(text.find("alpha").unwrap() < za);
        assert!(text.find("\"a\"").unwrap() < text.find("\"b\"").unwrap());
    }

    #[test]
    fn malformed_inputs() {
        assert!(parse_matrix_json("{}").is_err());
        assert!(parse_matrix_json(r#"{"entries": [["1/2"], ["1/3", "1"]]}"#).is_err());
        assert!(parse_matrix_json(r#"{"entries": [["1/0"]]}"#).is_err());
        assert!(parse_matrix_json(r#"{"entries": [[1]]}"#).is_err());
    }

    #[test]
    fn csv_digits() {
        let m = ExactMatrix::from_rows(vec![vec![ratio(1, 3), int(-2)]]);
        assert_eq!(matrix_csv(&m, 3), "0.333,-2.000\n");
    }

    proptest::proptest! {
        #[test]
        fn json_roundtrip(entries in proptest::collection::vec((-500i64..500, 1i64..500), 1..30), cols in 1usize..6) {
            let rows = entries.len().div_ceil(cols);
            let m = ExactMatrix::from_fn(rows, cols, |r, c| {
                let (n, d) = entries[(r * cols + c) % entries.len()];
                ratio(n, d)
            });
            let text = to_canonical_json(&matrix_json(&m, &[], &[])).unwrap();
            proptest::prop_assert_eq!(parse_matrix_json(&text).unwrap(), m);
        }
    }
}
