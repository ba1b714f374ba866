//! CSV and JSON-lines emission. Floats carry 17 significant digits so that
//! every value round-trips exactly.

use std::io::{self, Write};

use super::scenario::ResultRow;

pub const CSV_HEADER: &str = "scenario,n,t,phi,delta,kappa1,kappa2,P,p,p_limit,abs_error,entropy_final,seed";

/// `x` with 17 significant digits in scientific notation; `NaN` as is.
pub fn format_float(x: f64) -> String {
    if x.is_nan() {
        "NaN".to_string()
    } else {
        format!("{x:.16e}")
    }
}

fn floats(row: &ResultRow) -> [(&'static str, f64); 10] {
    [
        ("t", row.t),
        ("phi", row.phi),
        ("delta", row.delta),
        ("kappa1", row.kappa1),
        ("kappa2", row.kappa2),
        ("P", row.success),
        ("p", row.transfer),
        ("p_limit", row.p_limit),
        ("abs_error", row.abs_error),
        ("entropy_final", row.entropy_final),
    ]
}

pub fn csv_line(row: &ResultRow) -> String {
    let mut fields = vec![row.scenario.to_string(), row.n.to_string()];
    fields.extend(floats(row).iter().map(|(_, x)| format_float(*x)));
    fields.push(row.seed.map(|s| s.to_string()).unwrap_or_default());
    fields.join(",")
}

/// One JSON object; NaN becomes `null`.
pub fn json_line(row: &ResultRow) -> String {
    let mut parts = vec![format!("\"scenario\":{}", serde_json::Value::from(row.scenario)), format!("\"n\":{}", row.n)];
    for (k, x) in floats(row) {
        let v = if x.is_finite() { format_float(x) } else { "null".to_string() };
        parts.push(format!("\"{k}\":{v}"));
    }
    parts.push(format!("\"seed\":{}", row.seed.map_or("null".to_string(), |s| s.to_string())));
    format!("{{{}}}", parts.join(","))
}

pub fn write_csv<'a>(mut w: impl Write, rows: impl IntoIterator<Item = &'a ResultRow>) -> io::Result<()> {
    writeln!(w, "{CSV_HEADER}")?;
    for row in rows {
        writeln!(w, "{}", csv_line(row))?;
    }
    Ok(())
}

pub fn write_jsonl<'a>(mut w: impl Write, rows: impl IntoIterator<Item = &'a ResultRow>) -> io::Result<()> {
    for row in rows {
        writeln!(w, "{}", json_line(row))?;
    }
    Ok(())
}
