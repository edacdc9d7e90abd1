use std::cmp::Ordering;
use std::fmt::Write as _;
use std::io::Write as _;

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use super::config::{Experiment, ExperimentConfig, Format};
use crate::error::Result;

/// A parameter value in a result row.
#[derive(Debug, Clone, PartialEq)]
pub enum Param {
    Int(u64),
    Real(f64),
    List(Vec<f64>),
}

impl Param {
    fn render(&self) -> String {
        match self {
            Param::Int(v) => v.to_string(),
            Param::Real(v) => v.to_string(),
            Param::List(vs) => vs.iter().map(f64::to_string).collect::<Vec<_>>().join("|"),
        }
    }

    fn cmp_key(&self, other: &Param) -> Ordering {
        match (self, other) {
            (Param::Int(a), Param::Int(b)) => a.cmp(b),
            (Param::Real(a), Param::Real(b)) => a.total_cmp(b),
            (Param::List(a), Param::List(b)) => {
                for (x, y) in a.iter().zip(b) {
                    match x.total_cmp(y) {
                        Ordering::Equal => continue,
                        other => return other,
                    }
                }
                a.len().cmp(&b.len())
            }
            _ => Ordering::Equal,
        }
    }
}

/// One comparison: a statistic at a parameter tuple, its reference value,
/// the computed value, and the threshold the error is judged against.
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub experiment: Experiment,
    pub statistic: String,
    pub params: Vec<(&'static str, Param)>,
    pub exact: f64,
    pub estimate: f64,
    pub error: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub seconds: Option<f64>,
}

/// `error < tolerance`, with an exact zero always accepted.
pub fn within(error: f64, tolerance: f64) -> bool {
    error == 0.0 || error < tolerance
}

impl Row {
    pub fn new(
        experiment: Experiment,
        statistic: &str,
        params: Vec<(&'static str, Param)>,
        exact: f64,
        estimate: f64,
        error: f64,
        tolerance: f64,
    ) -> Self {
        Self {
            experiment,
            statistic: statistic.to_string(),
            params,
            exact,
            estimate,
            error,
            tolerance,
            pass: within(error, tolerance),
            seconds: None,
        }
    }

    /// Parameters as `name=value` pairs joined by `;`.
    pub fn params_string(&self) -> String {
        self.params
            .iter()
            .map(|(k, v)| format!("{k}={}", v.render()))
            .collect::<Vec<_>>()
            .join(";")
    }

    fn cmp_key(&self, other: &Row) -> Ordering {
        self.statistic.cmp(&other.statistic).then_with(|| {
            for ((ka, va), (kb, vb)) in self.params.iter().zip(&other.params) {
                let ord = ka.cmp(kb).then_with(|| va.cmp_key(vb));
                if ord != Ordering::Equal {
                    return ord;
                }
            }
            self.params.len().cmp(&other.params.len())
        })
    }
}

/// Apply the convergence rule to a sequence of errors ordered by increasing
/// `n`: each row must improve on its predecessor, and the last must also be
/// below `final_tolerance`. Returns the tolerance of each row.
pub fn sequence_tolerances(errors: &[f64], final_tolerance: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(errors.len());
    let mut prev = f64::INFINITY;
    for (i, &e) in errors.iter().enumerate() {
        out.push(if i + 1 == errors.len() {
            prev.min(final_tolerance)
        } else {
            prev
        });
        prev = e;
    }
    out
}

/// All rows of one experiment run, sorted by statistic and parameter tuple.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentResult {
    pub experiment: Experiment,
    pub rows: Vec<Row>,
}

impl ExperimentResult {
    pub fn new(experiment: Experiment, mut rows: Vec<Row>) -> Self {
        rows.sort_by(|a, b| a.cmp_key(b));
        Self { experiment, rows }
    }

    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }

    pub fn failures(&self) -> usize {
        self.rows.iter().filter(|r| !r.pass).count()
    }

    pub fn summary(&self) -> String {
        format!(
            "{}: {}/{} rows passed",
            self.experiment,
            self.rows.len() - self.failures(),
            self.rows.len()
        )
    }
}

pub const CSV_HEADER: &str = "experiment,statistic,params,exact,estimate,error,tolerance,pass,seconds";

/// 17 significant digits.
fn real(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else if v.is_nan() {
        "nan".into()
    } else if v > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

pub fn render_csv(result: &ExperimentResult) -> String {
    let mut out = String::new();
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in &result.rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            r.experiment,
            r.statistic,
            r.params_string(),
            real(r.exact),
            real(r.estimate),
            real(r.error),
            real(r.tolerance),
            r.pass,
            r.seconds.map(real).unwrap_or_default()
        );
    }
    out
}

/// JSON number, or a string for non-finite values.
struct Real(f64);

impl Serialize for Real {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.0.is_finite() {
            s.serialize_f64(self.0)
        } else {
            s.serialize_str(&real(self.0))
        }
    }
}

impl Serialize for Row {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("Row", 9)?;
        st.serialize_field("experiment", &self.experiment)?;
        st.serialize_field("statistic", &self.statistic)?;
        st.serialize_field("params", &self.params_string())?;
        st.serialize_field("exact", &Real(self.exact))?;
        st.serialize_field("estimate", &Real(self.estimate))?;
        st.serialize_field("error", &Real(self.error))?;
        st.serialize_field("tolerance", &Real(self.tolerance))?;
        st.serialize_field("pass", &self.pass)?;
        st.serialize_field("seconds", &self.seconds.map(Real))?;
        st.end()
    }
}

pub fn render_json(result: &ExperimentResult) -> String {
    let mut text = serde_json::to_string_pretty(&result.rows).expect("rows serialize");
    text.push('\n');
    text
}

pub fn render(result: &ExperimentResult, format: Format) -> String {
    match format {
        Format::Csv => render_csv(result),
        Format::Json => render_json(result),
    }
}

/// Write the rendered rows to `cfg.output_path`, or to standard output.
pub fn write_results(result: &ExperimentResult, cfg: &ExperimentConfig) -> Result<()> {
    let text = render(result, cfg.format);
    match &cfg.output_path {
        Some(path) => {
            if let Some(parent) = std::path::Path::new(path).parent() {
                if !parent.as_os_str().is_empty() {
                    std::fs::create_dir_all(parent)?;
                }
            }
            std::fs::write(path, text)?;
        }
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            lock.write_all(text.as_bytes())?;
            lock.flush()?;
        }
    }
    Ok(())
}
