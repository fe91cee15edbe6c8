//! JSON instance documents.
//!
//! ```json
//! {"n": 2,
//!  "exponents": [[0,0],[1,1],[0,1],[2,0]],
//!  "coefficients": [["-1/4","1","0","-1"],["-1","0","1","-1/4"]]}
//! ```
//!
//! Coefficients are strings holding an integer, a fraction or a finite
//! decimal; JSON integers are accepted, JSON floats are not. Optional
//! `label` and `provenance` strings are carried through.

use serde_json::{json, Map, Value};

use crate::circuit::ExponentConfig;
use crate::error::{Error, Result};
use crate::exact::{format_rational, parse_rational, BigRat, RatMatrix};
use crate::forge::Instance;
use crate::gale::CoefficientMatrix;

pub fn parse_instance(text: &str) -> Result<Instance> {
    let doc: Value = serde_json::from_str(text).map_err(|e| {
        Error::parse(format!("line {} column {}", e.line(), e.column()), e.to_string())
    })?;
    instance_from_value(&doc)
}

pub fn instance_from_value(doc: &Value) -> Result<Instance> {
    let obj = doc
        .as_object()
        .ok_or_else(|| Error::parse("document", "expected a JSON object"))?;
    let n = field(obj, "n")?
        .as_u64()
        .filter(|n| *n >= 1)
        .ok_or_else(|| Error::parse("n", "expected a positive integer"))? as usize;

    let exponents = array(field(obj, "exponents")?, "exponents")?;
    if exponents.len() != n + 2 {
        return Err(Error::parse(
            "exponents",
            format!("expected {} points, got {}", n + 2, exponents.len()),
        ));
    }
    let points = exponents
        .iter()
        .enumerate()
        .map(|(j, point)| {
            let at = format!("exponents[{j}]");
            let coords = array(point, &at)?;
            if coords.len() != n {
                return Err(Error::parse(
                    at,
                    format!("expected {n} coordinates, got {}", coords.len()),
                ));
            }
            coords
                .iter()
                .enumerate()
                .map(|(i, v)| {
                    v.as_i64()
                        .ok_or_else(|| Error::parse(format!("{at}[{i}]"), "expected an integer"))
                })
                .collect()
        })
        .collect::<Result<Vec<Vec<i64>>>>()?;

    let rows = array(field(obj, "coefficients")?, "coefficients")?;
    if rows.len() != n {
        return Err(Error::parse(
            "coefficients",
            format!("expected {n} rows, got {}", rows.len()),
        ));
    }
    let mut entries = Vec::with_capacity(n * (n + 2));
    for (i, row) in rows.iter().enumerate() {
        let at = format!("coefficients[{i}]");
        let row = array(row, &at)?;
        if row.len() != n + 2 {
            return Err(Error::parse(
                at,
                format!("expected {} entries, got {}", n + 2, row.len()),
            ));
        }
        for (j, v) in row.iter().enumerate() {
            entries.push(rational(v, &format!("{at}[{j}]"))?);
        }
    }

    let config = ExponentConfig::new(points).map_err(|e| Error::parse("exponents", e.to_string()))?;
    let coefficients = CoefficientMatrix::new(RatMatrix::from_vec(n, n + 2, entries)?)
        .map_err(|e| Error::parse("coefficients", e.to_string()))?;
    let label = optional_text(obj, "label")?;
    let provenance = optional_text(obj, "provenance")?;
    Ok(Instance::new(config, coefficients)?.with_label(label, provenance))
}

pub fn instance_to_value(instance: &Instance) -> Value {
    let rows: Vec<Vec<String>> = instance
        .coefficients
        .entries()
        .to_rows()
        .iter()
        .map(|row| row.iter().map(format_rational).collect())
        .collect();
    let mut doc = json!({
        "n": instance.n(),
        "exponents": instance.config.points(),
        "coefficients": rows,
    });
    for (key, text) in [("label", &instance.label), ("provenance", &instance.provenance)] {
        if !text.is_empty() {
            doc[key] = Value::String(text.clone());
        }
    }
    doc
}

/// Document text with keys in a fixed order and one matrix row per line.
pub fn serialize_instance(instance: &Instance) -> String {
    let doc = instance_to_value(instance);
    let rows = |key: &str| -> String {
        doc[key]
            .as_array()
            .expect("matrix rows")
            .iter()
            .map(|row| format!("    {row}"))
            .collect::<Vec<_>>()
            .join(",\n")
    };
    let mut out = format!(
        "{{\n  \"n\": {},\n  \"exponents\": [\n{}\n  ],\n  \"coefficients\": [\n{}\n  ]",
        instance.n(),
        rows("exponents"),
        rows("coefficients")
    );
    for key in ["label", "provenance"] {
        if let Some(text) = doc.get(key) {
            out.push_str(&format!(",\n  \"{key}\": {text}"));
        }
    }
    out.push_str("\n}");
    out
}

fn field<'a>(obj: &'a Map<String, Value>, key: &str) -> Result<&'a Value> {
    obj.get(key)
        .ok_or_else(|| Error::parse(key, "missing field"))
}

fn array<'a>(v: &'a Value, at: &str) -> Result<&'a Vec<Value>> {
    v.as_array()
        .ok_or_else(|| Error::parse(at, "expected an array"))
}

fn rational(v: &Value, at: &str) -> Result<BigRat> {
    match v {
        Value::String(s) => parse_rational(s).map_err(|e| match e {
            Error::Parse { message, .. } => Error::parse(at, message),
            other => other,
        }),
        Value::Number(num) if num.is_i64() || num.is_u64() => {
            parse_rational(&num.to_string()).map_err(|e| Error::parse(at, e.to_string()))
        }
        Value::Number(_) => Err(Error::parse(
            at,
            "floating-point literal; write the value as a string such as \"-0.25\" or \"-1/4\"",
        )),
        _ => Err(Error::parse(at, "expected a rational string")),
    }
}

fn optional_text(obj: &Map<String, Value>, key: &str) -> Result<String> {
    match obj.get(key) {
        None | Some(Value::Null) => Ok(String::new()),
        Some(Value::String(s)) => Ok(s.clone()),
        Some(_) => Err(Error::parse(key, "expected a string")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;
    use crate::forge::family_prs;

    const SQUARE: &str = r#"{"n": 2, "exponents": [[0,0],[1,1],[0,1],[2,0]],
        "coefficients": [["-1/4","1","0","-1"],["-1","0","1","-1/4"]]}"#;

    fn location(err: Error) -> String {
        match err {
            Error::Parse { location, .. } => location,
            other => panic!("expected a parse error, got {other}"),
        }
    }

    #[test]
    fn parses_document() {
        let inst = parse_instance(SQUARE).unwrap();
        assert_eq!(inst.n(), 2);
        assert_eq!(*inst.coefficients.entries().get(1, 3), rat(-1, 4));
        assert_eq!(inst, family_prs(2, &rat(1, 4)).unwrap().with_label("", ""));
    }

    #[test]
    fn decimal_strings_are_exact() {
        let text = SQUARE.replace("\"-1/4\",\"1\"", "\"-0.25\",\"1\"");
        let inst = parse_instance(&text).unwrap();
        assert_eq!(*inst.coefficients.entries().get(0, 0), rat(-1, 4));
    }

    #[test]
    fn rejects_malformed_documents() {
        let ragged = SQUARE.replace("\"1\",\"0\",\"-1\"]", "\"1\",\"0\"]");
        assert_eq!(location(parse_instance(&ragged).unwrap_err()), "coefficients[0]");
        let float = SQUARE.replace("\"-1/4\",\"1\"", "-0.25,\"1\"");
        assert_eq!(location(parse_instance(&float).unwrap_err()), "coefficients[0][0]");
        let short = SQUARE.replace("[[0,0],[1,1]", "[[0,0]");
        assert_eq!(location(parse_instance(&short).unwrap_err()), "exponents");
        assert!(location(parse_instance("{\"n\": 2,").unwrap_err()).starts_with("line"));
        let bad = SQUARE.replace("\"-1/4\",\"1\"", "\"1/0\",\"1\"");
        assert_eq!(location(parse_instance(&bad).unwrap_err()), "coefficients[0][0]");
    }

    #[test]
    fn round_trip() {
        let inst = family_prs(4, &rat(1, 4)).unwrap();
        let text = serialize_instance(&inst);
        assert_eq!(parse_instance(&text).unwrap(), inst);
        assert_eq!(serialize_instance(&parse_instance(&text).unwrap()), text);
    }
}
