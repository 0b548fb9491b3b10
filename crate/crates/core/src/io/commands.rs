use std::fs;
use std::path::Path;

use serde_json::json;

use crate::error::{Error, Result};
use crate::fidelity::{fidelity, FidelityReport};
use crate::fock::{oracle_compare, FockOptions, OracleComparison};
use crate::io::document::{parse_state, ParsedState};
use crate::io::format::{table, table_number};
use crate::io::sweep::{run_sweep, SweepSpec};
use crate::state::{is_pure, purity};
use crate::tolerance::Tolerances;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Table,
    Json,
}

/// Text for stdout plus the process exit code.
#[derive(Debug, Clone, PartialEq)]
pub struct CommandOutput {
    pub text: String,
    pub code: i32,
}

impl CommandOutput {
    fn ok(text: String) -> Self {
        Self { text, code: 0 }
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn load(path: &Path, tol: &Tolerances) -> Result<ParsedState> {
    parse_state(&read(path)?, tol)
}

fn pretty(v: &impl serde::Serialize) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("reports always serialize");
    s.push('\n');
    s
}

fn row(k: &str, v: impl Into<String>) -> (String, String) {
    (k.to_string(), v.into())
}

pub fn fidelity_table(r: &FidelityReport) -> String {
    let mut rows = vec![
        row("method", r.method.as_str()),
        row("fidelity", table_number(r.fidelity)),
        row("overlap", table_number(r.overlap)),
        row("bures distance", table_number(r.bures_distance)),
        row("displacement factor", table_number(r.displacement_factor)),
    ];
    if let Some(t) = r.invariants {
        rows.push(row("delta", table_number(t.delta)));
        rows.push(row("gamma", table_number(t.gamma)));
        rows.push(row("lambda", table_number(t.lambda)));
    }
    table(&rows)
}

pub fn cmd_fidelity(a: &Path, b: &Path, format: Format, tol: &Tolerances) -> Result<CommandOutput> {
    let sa = load(a, tol)?.into_physical()?;
    let sb = load(b, tol)?.into_physical()?;
    let r = fidelity(&sa, &sb, tol)?;
    Ok(CommandOutput::ok(match format {
        Format::Table => fidelity_table(&r),
        Format::Json => pretty(&r),
    }))
}

/// Writes the CSV to `out` when given, otherwise returns it as the text.
/// Exits 0 when at least one grid point succeeded, otherwise with the code
/// of the first failure.
pub fn cmd_sweep(spec: &Path, out: Option<&Path>, tol: &Tolerances) -> Result<CommandOutput> {
    let spec = SweepSpec::from_json(&read(spec)?)?;
    let outcome = run_sweep(&spec, tol)?;
    let code = if outcome.ok_rows > 0 { 0 } else { outcome.first_error_code.unwrap_or(3) };
    let text = match out {
        Some(p) => {
            fs::write(p, &outcome.csv).map_err(|e| Error::Io(format!("{}: {e}", p.display())))?;
            String::new()
        }
        None => outcome.csv,
    };
    Ok(CommandOutput { text, code })
}

pub fn comparison_table(c: &OracleComparison) -> String {
    table(&[
        row("method", c.method.as_str()),
        row("closed form", table_number(c.closed_form)),
        row("oracle", table_number(c.oracle)),
        row("deviation", format!("{:.3e}", c.deviation)),
        row("tolerance", format!("{:.0e}", c.tolerance)),
        row("cutoff", c.cutoff.to_string()),
        row("trace loss", format!("{:.3e} {:.3e}", c.trace_loss[0], c.trace_loss[1])),
        row("result", if c.passed { "PASS" } else { "FAIL" }),
    ])
}

/// Exits 0 on agreement within the oracle tolerance and 5 otherwise.
pub fn cmd_oracle_check(
    a: &Path,
    b: &Path,
    cutoff: usize,
    force: bool,
    format: Format,
    tol: &Tolerances,
) -> Result<CommandOutput> {
    let circuit = |p: &Path| {
        load(p, tol)?.document.as_circuit().ok_or_else(|| {
            Error::InvalidParameter(format!("{}: oracle-check needs circuit documents", p.display()))
        })
    };
    let (ca, cb) = (circuit(a)?, circuit(b)?);
    let opts = if force { FockOptions::forced() } else { FockOptions::default() };
    let c = oracle_compare(&ca, &cb, cutoff, &opts, tol)?;
    let text = match format {
        Format::Table => comparison_table(&c),
        Format::Json => pretty(&c),
    };
    Ok(CommandOutput { text, code: if c.passed { 0 } else { 5 } })
}

/// Validity verdict, spectrum, purity and purity residual. Exits 3 after
/// printing the report when the state is unphysical.
pub fn cmd_validate(path: &Path, format: Format, tol: &Tolerances) -> Result<CommandOutput> {
    let p = load(path, tol)?;
    let r = &p.report;
    let spectrum = r.spectrum.as_ref().map(|s| s.values().to_vec());
    let pd = spectrum.is_some();
    let pur = pd.then(|| purity(&p.state));
    let residual = is_pure(&p.state, tol).residual;
    let failure = r.failure.as_ref().map(|f| f.to_string());
    let text = match format {
        Format::Json => pretty(&json!({
            "valid": r.valid,
            "failure": failure,
            "maxAsymmetry": r.max_asymmetry,
            "spectrum": spectrum,
            "purity": pur,
            "purityResidual": residual,
        })),
        Format::Table => {
            let mut rows = vec![row("valid", if r.valid { "yes" } else { "no" })];
            if let Some(f) = failure {
                rows.push(row("reason", f));
            }
            rows.push(row("modes", p.state.n().to_string()));
            rows.push(row("spectrum", spectrum.as_deref().map_or("n/a".into(), list)));
            rows.push(row("purity", pur.map_or("n/a".into(), table_number)));
            rows.push(row("purity residual", table_number(residual)));
            table(&rows)
        }
    };
    Ok(CommandOutput { text, code: if r.valid { 0 } else { 3 } })
}

/// Symplectic eigenvalues in descending order.
pub fn cmd_spectrum(path: &Path, format: Format, tol: &Tolerances) -> Result<CommandOutput> {
    let p = load(path, tol)?;
    let Some(s) = p.report.spectrum.as_ref() else {
        return Err(Error::Unphysical(
            p.report.failure.map_or("no spectrum".into(), |f| f.to_string()),
        ));
    };
    let text = match format {
        Format::Json => pretty(&json!({
            "valid": p.report.valid,
            "spectrum": s.values(),
            "determinant": s.determinant(),
        })),
        Format::Table => {
            let mut rows: Vec<_> =
                s.values().iter().enumerate().map(|(k, x)| row(&format!("kappa[{k}]"), table_number(*x))).collect();
            rows.push(row("valid", if p.report.valid { "yes" } else { "no" }));
            table(&rows)
        }
    };
    Ok(CommandOutput { text, code: if p.report.valid { 0 } else { 3 } })
}

fn list(xs: &[f64]) -> String {
    format!("[{}]", xs.iter().map(|x| table_number(*x)).collect::<Vec<_>>().join(", "))
}
