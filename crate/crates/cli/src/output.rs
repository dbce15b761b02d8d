use killsub::verify::{Bound, CheckReport};
use serde_json::{json, Map, Number, Value};
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

pub const SCHEMA_VERSION: u32 = 1;

/// `x` in C `%.12e` style (`1.000000000000e+00`), with `-0` printed as `0`.
pub fn fmt_float(x: f64) -> String {
    let x = if x == 0.0 { 0.0 } else { x };
    let s = format!("{x:.12e}");
    match s.split_once('e') {
        Some((mantissa, exp)) => {
            let e: i32 = exp.parse().unwrap_or(0);
            format!("{mantissa}e{}{:02}", if e < 0 { '-' } else { '+' }, e.abs())
        }
        None => s,
    }
}

/// A float as a JSON number formatted by [`fmt_float`]; non-finite values
/// become `null`.
pub fn num(x: f64) -> Value {
    if !x.is_finite() {
        return Value::Null;
    }
    Number::from_str(&fmt_float(x)).map(Value::Number).unwrap_or(Value::Null)
}

pub fn nums(xs: &[f64]) -> Value {
    Value::Array(xs.iter().map(|&x| num(x)).collect())
}

pub fn opt_num(x: Option<f64>) -> Value {
    x.map_or(Value::Null, num)
}

pub fn check_json(c: &CheckReport) -> Value {
    let mut m = Map::new();
    m.insert("name".into(), json!(c.name));
    m.insert("status".into(), json!(c.status.as_str()));
    m.insert("residual".into(), num(c.residual));
    m.insert("tol".into(), num(c.tol));
    m.insert(
        "bound".into(),
        json!(match c.bound {
            Bound::AtMost => "at_most",
            Bound::AtLeast => "at_least",
        }),
    );
    m.insert("worst_location".into(), c.location.clone().map_or(Value::Null, Value::String));
    if let Some(note) = &c.note {
        m.insert("note".into(), json!(note));
    }
    Value::Object(m)
}

/// Top-level document with the schema version first.
pub fn document(command: &str, body: Value) -> Value {
    let mut m = Map::new();
    m.insert("schema_version".into(), json!(SCHEMA_VERSION));
    m.insert("command".into(), json!(command));
    if let Value::Object(rest) = body {
        m.extend(rest);
    }
    Value::Object(m)
}

/// One CSV record: `s_or_u, v, check, residual, tol, status`.
#[derive(Debug, Clone, Default)]
pub struct Row {
    pub s_or_u: Option<f64>,
    pub v: Option<f64>,
    pub check: String,
    pub residual: Option<f64>,
    pub tol: Option<f64>,
    pub status: String,
}

impl Row {
    pub fn from_check(s_or_u: Option<f64>, v: Option<f64>, prefix: &str, c: &CheckReport) -> Row {
        Row {
            s_or_u,
            v,
            check: if prefix.is_empty() {
                c.name.clone()
            } else {
                format!("{prefix}/{}", c.name)
            },
            residual: Some(c.residual),
            tol: Some(c.tol),
            status: c.status.as_str().to_string(),
        }
    }
}

/// Empty for missing or non-finite values.
fn cell(x: Option<f64>) -> String {
    x.filter(|v| v.is_finite()).map_or(String::new(), fmt_float)
}

pub fn csv_string(rows: &[Row]) -> std::io::Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["s_or_u", "v", "check", "residual", "tol", "status"])?;
    for r in rows {
        w.write_record([
            cell(r.s_or_u),
            cell(r.v),
            r.check.clone(),
            cell(r.residual),
            cell(r.tol),
            r.status.clone(),
        ])?;
    }
    let bytes = w.into_inner().map_err(|e| e.into_error())?;
    Ok(String::from_utf8_lossy(&bytes).into_owned())
}

pub fn json_string(doc: &Value) -> String {
    let mut s = serde_json::to_string_pretty(doc).unwrap_or_else(|_| "{}".into());
    s.push('\n');
    s
}

pub fn emit(text: &str, out: Option<&Path>) -> std::io::Result<()> {
    match out {
        Some(p) => std::fs::write(p, text),
        None => {
            let mut stdout = std::io::stdout().lock();
            match stdout.write_all(text.as_bytes()).and_then(|_| stdout.flush()) {
                // reader closed early, e.g. `| head`
                Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
                r => r,
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_use_fixed_exponent_format() {
        assert_eq!(num(1.0).to_string(), "1.000000000000e+00");
        assert_eq!(num(-0.0).to_string(), "0.000000000000e+00");
        assert_eq!(num(f64::NAN), Value::Null);
        assert_eq!(num(-2.5e-7).to_string(), "-2.500000000000e-07");
        assert_eq!(fmt_float(6.02e123), "6.020000000000e+123");
    }

    #[test]
    fn csv_has_fixed_header() {
        let s = csv_string(&[Row {
            check: "gauss".into(),
            status: "pass".into(),
            ..Row::default()
        }])
        .unwrap();
        assert!(s.starts_with("s_or_u,v,check,residual,tol,status\n,,gauss,,,pass"));
        let s = csv_string(&[Row {
            residual: Some(f64::NAN),
            ..Row::default()
        }])
        .unwrap();
        assert!(s.ends_with("\n,,,,,\n"), "{s:?}");
    }
}
