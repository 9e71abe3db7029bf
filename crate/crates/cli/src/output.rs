//! Deterministic serialization: shortest round-trip float text, fixed
//! column order, LF line endings, NaN spelled "NaN" in CSV and null in
//! JSON. Identical inputs must produce byte-identical files.

use cq_core::SweepRow;
use std::io::Write;
use std::path::Path;

use crate::CliError;

pub const THERMO_HEADER: &str =
    "L,eps,energy,energy_gap,mu,mu_gap,kinetic,linf_err_interior,tail_probe,laplacian_sup,iterations,residual";
pub const TF_HEADER: &str =
    "N,eps,energy,energy_gap,mu,mu_gap,kinetic,linf_err_interior,tail_probe,laplacian_sup,iterations,residual,trunc_err";

/// Shortest text that parses back to the same f64.
pub fn fmt_f64(v: f64) -> String {
    if v.is_nan() {
        "NaN".to_string()
    } else {
        format!("{v}")
    }
}

fn opt(v: Option<f64>) -> f64 {
    v.unwrap_or(f64::NAN)
}

fn row_fields(row: &SweepRow) -> Vec<String> {
    vec![
        fmt_f64(row.control),
        fmt_f64(row.eps),
        fmt_f64(row.energy),
        fmt_f64(row.energy_gap),
        fmt_f64(row.mu),
        fmt_f64(row.mu_gap),
        fmt_f64(row.kinetic),
        fmt_f64(row.linf_err_interior),
        fmt_f64(opt(row.tail_probe)),
        fmt_f64(row.laplacian_sup),
        row.iterations.to_string(),
        fmt_f64(row.residual),
    ]
}

pub fn sweep_csv(rows: &[SweepRow], tf_kind: bool) -> String {
    let mut out = String::new();
    out.push_str(if tf_kind { TF_HEADER } else { THERMO_HEADER });
    out.push('\n');
    for row in rows {
        let mut fields = row_fields(row);
        if tf_kind {
            fields.push(fmt_f64(opt(row.trunc_err)));
        }
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out
}

fn json_f64(v: f64) -> serde_json::Value {
    serde_json::Number::from_f64(v).map_or(serde_json::Value::Null, serde_json::Value::Number)
}

pub fn sweep_json(rows: &[SweepRow], tf_kind: bool) -> String {
    let header = if tf_kind { TF_HEADER } else { THERMO_HEADER };
    let keys: Vec<&str> = header.split(',').collect();
    let list: Vec<serde_json::Value> = rows
        .iter()
        .map(|row| {
            let mut fields: Vec<serde_json::Value> = vec![
                json_f64(row.control),
                json_f64(row.eps),
                json_f64(row.energy),
                json_f64(row.energy_gap),
                json_f64(row.mu),
                json_f64(row.mu_gap),
                json_f64(row.kinetic),
                json_f64(row.linf_err_interior),
                json_f64(opt(row.tail_probe)),
                json_f64(row.laplacian_sup),
                serde_json::Value::from(row.iterations),
                json_f64(row.residual),
            ];
            if tf_kind {
                fields.push(json_f64(opt(row.trunc_err)));
            }
            let map: serde_json::Map<String, serde_json::Value> =
                keys.iter().map(|k| k.to_string()).zip(fields).collect();
            serde_json::Value::Object(map)
        })
        .collect();
    let mut text = serde_json::to_string_pretty(&serde_json::Value::Array(list))
        .expect("sweep rows serialize");
    text.push('\n');
    text
}

/// Write to the path, or stdout when no path is given.
pub fn emit(path: Option<&Path>, content: &str) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, content)
            .map_err(|e| CliError::Validation(format!("cannot write {}: {e}", p.display()))),
        None => {
            std::io::stdout()
                .write_all(content.as_bytes())
                .map_err(|e| CliError::Validation(format!("cannot write stdout: {e}")))
        }
    }
}

/// Two-column whitespace-separated plot data.
pub fn plot_data(points: &[(f64, f64)]) -> String {
    let mut out = String::new();
    for (x, y) in points {
        out.push_str(&fmt_f64(*x));
        out.push(' ');
        out.push_str(&fmt_f64(*y));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip() {
        for v in [0.0, -0.09375, 1.0 / 3.0, 6.02e23, 5e-324] {
            let text = fmt_f64(v);
            assert_eq!(text.parse::<f64>().unwrap(), v, "text {text}");
        }
        assert_eq!(fmt_f64(f64::NAN), "NaN");
        assert!("NaN".parse::<f64>().unwrap().is_nan());
    }

    #[test]
    fn plot_data_is_two_column() {
        let text = plot_data(&[(1.0, 2.5), (2.0, 0.125)]);
        assert_eq!(text, "1 2.5\n2 0.125\n");
    }
}
