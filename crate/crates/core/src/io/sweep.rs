use std::collections::BTreeSet;

use serde::Deserialize;
use serde_json::Value;

use crate::error::{Error, Result};
use crate::fidelity::{fidelity, FidelityReport};
use crate::io::document::StateDocument;
use crate::io::format::csv_number;
use crate::tolerance::Tolerances;

/// A pair of state templates swept over a rectangular grid.
///
/// Any JSON string of the form `"$name"` inside a template is a placeholder
/// for the grid axis `name`.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub template: SweepTemplate,
    pub grid: Vec<GridAxis>,
    pub outputs: Vec<SweepOutput>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepTemplate {
    pub a: Value,
    pub b: Value,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridAxis {
    pub name: String,
    pub start: f64,
    pub stop: f64,
    pub steps: usize,
}

impl GridAxis {
    /// Evenly spaced values from `start` to `stop` inclusive.
    pub fn values(&self) -> Vec<f64> {
        if self.steps == 1 {
            return vec![self.start];
        }
        let last = self.steps - 1;
        (0..self.steps)
            .map(|i| if i == last { self.stop } else { self.start + (self.stop - self.start) * i as f64 / last as f64 })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepOutput {
    Fidelity,
    Overlap,
    Bures,
    Delta,
    Gamma,
    Lambda,
}

impl SweepOutput {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Fidelity => "fidelity",
            Self::Overlap => "overlap",
            Self::Bures => "bures",
            Self::Delta => "delta",
            Self::Gamma => "gamma",
            Self::Lambda => "lambda",
        }
    }

    fn pick(&self, r: &FidelityReport) -> Option<f64> {
        match self {
            Self::Fidelity => Some(r.fidelity),
            Self::Overlap => Some(r.overlap),
            Self::Bures => Some(r.bures_distance),
            Self::Delta => r.invariants.map(|t| t.delta),
            Self::Gamma => r.invariants.map(|t| t.gamma),
            Self::Lambda => r.invariants.map(|t| t.lambda),
        }
    }
}

fn placeholders(v: &Value, out: &mut BTreeSet<String>) {
    match v {
        Value::String(s) => {
            if let Some(name) = s.strip_prefix('$') {
                out.insert(name.to_string());
            }
        }
        Value::Array(xs) => xs.iter().for_each(|x| placeholders(x, out)),
        Value::Object(m) => m.values().for_each(|x| placeholders(x, out)),
        _ => {}
    }
}

fn substitute(v: &Value, names: &[String], point: &[f64]) -> Value {
    match v {
        Value::String(s) => match s.strip_prefix('$').and_then(|n| names.iter().position(|x| x == n)) {
            Some(i) => serde_json::Number::from_f64(point[i]).map(Value::Number).unwrap_or(Value::Null),
            None => v.clone(),
        },
        Value::Array(xs) => Value::Array(xs.iter().map(|x| substitute(x, names, point)).collect()),
        Value::Object(m) => Value::Object(m.iter().map(|(k, x)| (k.clone(), substitute(x, names, point))).collect()),
        _ => v.clone(),
    }
}

impl SweepSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        let spec: Self = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.grid.is_empty() {
            return Err(Error::Parse("sweep grid is empty".into()));
        }
        if self.outputs.is_empty() {
            return Err(Error::Parse("sweep lists no outputs".into()));
        }
        let mut seen = BTreeSet::new();
        for o in &self.outputs {
            if !seen.insert(o.name()) {
                return Err(Error::Parse(format!("output {} listed twice", o.name())));
            }
        }
        let mut names = BTreeSet::new();
        for ax in &self.grid {
            if ax.name.is_empty() || !names.insert(ax.name.clone()) {
                return Err(Error::Parse(format!("grid axis name {:?} is empty or repeated", ax.name)));
            }
            if ax.steps == 0 {
                return Err(Error::Parse(format!("axis {}: steps must be at least 1", ax.name)));
            }
            if !ax.start.is_finite() || !ax.stop.is_finite() || ax.start > ax.stop {
                return Err(Error::Parse(format!("axis {}: need finite start <= stop", ax.name)));
            }
        }
        let mut used = BTreeSet::new();
        placeholders(&self.template.a, &mut used);
        placeholders(&self.template.b, &mut used);
        if let Some(u) = used.difference(&names).next() {
            return Err(Error::Parse(format!("placeholder ${u} has no grid axis")));
        }
        if let Some(u) = names.difference(&used).next() {
            return Err(Error::Parse(format!("grid axis {u} is not used by the template")));
        }
        let start: Vec<f64> = self.grid.iter().map(|a| a.start).collect();
        for doc in [&self.template.a, &self.template.b] {
            let v = substitute(doc, &self.names(), &start);
            serde_json::from_value::<StateDocument>(v)
                .map_err(|e| Error::Parse(format!("template does not resolve to a state document: {e}")))?;
        }
        Ok(())
    }

    pub fn names(&self) -> Vec<String> {
        self.grid.iter().map(|a| a.name.clone()).collect()
    }

    /// Grid points in lexicographic order, first axis outermost.
    pub fn points(&self) -> Vec<Vec<f64>> {
        let mut points = vec![vec![]];
        for ax in &self.grid {
            let vals = ax.values();
            points = points
                .into_iter()
                .flat_map(|p| {
                    vals.iter().map(move |&x| {
                        let mut q = p.clone();
                        q.push(x);
                        q
                    })
                })
                .collect();
        }
        points
    }

    /// The two documents at one grid point.
    pub fn resolve(&self, point: &[f64]) -> Result<(StateDocument, StateDocument)> {
        let names = self.names();
        let doc = |t: &Value| {
            serde_json::from_value::<StateDocument>(substitute(t, &names, point))
                .map_err(|e| Error::Parse(e.to_string()))
        };
        Ok((doc(&self.template.a)?, doc(&self.template.b)?))
    }

    pub fn evaluate(&self, point: &[f64], tol: &Tolerances) -> Result<FidelityReport> {
        let (a, b) = self.resolve(point)?;
        let (sa, ra) = a.to_state(tol)?;
        let (sb, rb) = b.to_state(tol)?;
        for r in [ra, rb] {
            if let Some(f) = r.failure {
                return Err(Error::Unphysical(f.to_string()));
            }
        }
        fidelity(&sa, &sb, tol)
    }
}

/// CSV text plus row counts.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepOutcome {
    pub csv: String,
    pub ok_rows: usize,
    pub error_rows: usize,
    /// Exit code of the first failed point.
    pub first_error_code: Option<i32>,
}

/// Evaluates every grid point. Failed points become rows with `ERR` cells
/// and an `error:<class>` status; missing invariants print as `NA`.
pub fn run_sweep(spec: &SweepSpec, tol: &Tolerances) -> Result<SweepOutcome> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(vec![]);
    let mut header = spec.names();
    header.extend(spec.outputs.iter().map(|o| o.name().to_string()));
    header.push("status".into());
    w.write_record(&header).map_err(csv_err)?;
    let (mut ok_rows, mut error_rows, mut first_error_code) = (0, 0, None);
    for point in spec.points() {
        let mut row: Vec<String> = point.iter().map(|&x| csv_number(x)).collect();
        match spec.evaluate(&point, tol) {
            Ok(r) => {
                ok_rows += 1;
                row.extend(spec.outputs.iter().map(|o| o.pick(&r).map_or("NA".into(), csv_number)));
                row.push("ok".into());
            }
            Err(e) => {
                error_rows += 1;
                first_error_code.get_or_insert(e.exit_code());
                row.extend(spec.outputs.iter().map(|_| "ERR".to_string()));
                row.push(format!("error:{}", e.class()));
            }
        }
        w.write_record(&row).map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    let csv = String::from_utf8(bytes).expect("csv output is UTF-8");
    Ok(SweepOutcome { csv, ok_rows, error_rows, first_error_code })
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}
