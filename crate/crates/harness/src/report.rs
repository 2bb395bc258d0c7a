//! Report rows and the CSV/JSON writers.
//!
//! Schema: `experiment,param_json,metric,value,reference,comparator,pass,ms`.
//! Every stochastic row carries its trial count and standard error inside
//! `param_json`, so the pass flag is recomputable from the row alone. Values
//! print with 17 significant digits.

use std::fmt::Write as _;

/// How `value` relates to `reference` for the row to pass.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Comparator {
    /// Exact arithmetic: `value <= reference`.
    LeExact,
    /// Exact arithmetic: `value >= reference`.
    GeExact,
    /// Sampled: `value >= reference - 3 sigma`.
    GeThreeSigma { sigma: f64 },
    /// Sampled: `|value - reference| <= 3 sigma`.
    ApproxThreeSigma { sigma: f64 },
}

impl Comparator {
    pub fn symbol(&self) -> &'static str {
        match self {
            Comparator::LeExact => "<= exact",
            Comparator::GeExact => ">= exact",
            Comparator::GeThreeSigma { .. } => ">= 3sigma",
            Comparator::ApproxThreeSigma { .. } => "~ 3sigma",
        }
    }

    pub fn passes(&self, value: f64, reference: f64) -> bool {
        match self {
            Comparator::LeExact => value <= reference,
            Comparator::GeExact => value >= reference,
            Comparator::GeThreeSigma { sigma } => value >= reference - 3.0 * sigma,
            Comparator::ApproxThreeSigma { sigma } => (value - reference).abs() <= 3.0 * sigma,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ReportRow {
    pub experiment: String,
    pub params: Vec<(String, String)>,
    pub metric: String,
    pub value: f64,
    pub reference: f64,
    pub comparator: Comparator,
    pub pass: bool,
    pub ms: Option<u128>,
}

impl ReportRow {
    pub fn new(
        experiment: &str,
        params: &[(String, String)],
        metric: &str,
        value: f64,
        reference: f64,
        comparator: Comparator,
    ) -> Self {
        let mut params = params.to_vec();
        match comparator {
            Comparator::GeThreeSigma { sigma } | Comparator::ApproxThreeSigma { sigma } => {
                params.push(("sigma".to_string(), format_value(sigma)));
            }
            _ => {}
        }
        ReportRow {
            experiment: experiment.to_string(),
            params,
            metric: metric.to_string(),
            value,
            reference,
            comparator,
            pass: comparator.passes(value, reference),
            ms: None,
        }
    }
}

pub fn format_value(v: f64) -> String {
    format!("{v:.16e}")
}

fn json_escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for ch in s.chars() {
        match ch {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c => out.push(c),
        }
    }
    out
}

/// Flat JSON object; numeric-looking values stay unquoted.
pub fn params_json(params: &[(String, String)]) -> String {
    let mut out = String::from("{");
    for (i, (k, v)) in params.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        let _ = write!(out, "\"{}\":", json_escape(k));
        if v.parse::<f64>().is_ok() {
            out.push_str(v);
        } else {
            let _ = write!(out, "\"{}\"", json_escape(v));
        }
    }
    out.push('}');
    out
}

fn csv_field(s: &str) -> String {
    if s.contains(',') || s.contains('"') || s.contains('\n') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub const CSV_HEADER: &str = "experiment,param_json,metric,value,reference,comparator,pass,ms";

pub fn to_csv_line(row: &ReportRow) -> String {
    let ms = match row.ms {
        Some(ms) => ms.to_string(),
        None => "-".to_string(),
    };
    format!(
        "{},{},{},{},{},{},{},{}",
        csv_field(&row.experiment),
        csv_field(&params_json(&row.params)),
        csv_field(&row.metric),
        format_value(row.value),
        format_value(row.reference),
        csv_field(row.comparator.symbol()),
        row.pass,
        ms
    )
}

pub fn to_csv(rows: &[ReportRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for row in rows {
        out.push_str(&to_csv_line(row));
        out.push('\n');
    }
    out
}

pub fn to_json(rows: &[ReportRow]) -> String {
    let mut out = String::from("[");
    for (i, row) in rows.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        let ms = match row.ms {
            Some(ms) => ms.to_string(),
            None => "null".to_string(),
        };
        let _ = write!(
            out,
            "\n  {{\"experiment\":\"{}\",\"params\":{},\"metric\":\"{}\",\"value\":{},\"reference\":{},\"comparator\":\"{}\",\"pass\":{},\"ms\":{}}}",
            json_escape(&row.experiment),
            params_json(&row.params),
            json_escape(&row.metric),
            format_value(row.value),
            format_value(row.reference),
            row.comparator.symbol(),
            row.pass,
            ms
        );
    }
    out.push_str("\n]\n");
    out
}
