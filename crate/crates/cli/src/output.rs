//! CSV and JSON renderings. Numbers carry 17 significant digits so that
//! files are bit-exact across runs.

use conclab_core::verifier::RateFit;
use conclab_core::BoundReport;

pub const REPORTS_HEADER: &str = "bound_id,n,lhs,stderr,rhs,pass,seed,runtime_ms,variant";
pub const CURVES_HEADER: &str = "bound_id,variant,n,lhs,rhs,ratio";
pub const SPECTRA_HEADER: &str = "replication,rank,eigenvalue";
pub const CONSTANTS_HEADER: &str =
    "law,A0,A1,pi_lower,pi_upper,B0,B1,lsi_lower,lsi_upper,H,sigma2_cheeger,pi_known,lsi_known";

pub fn num(x: f64) -> String {
    if x.is_nan() {
        "nan".to_string()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".to_string() } else { "-inf".to_string() }
    } else {
        format!("{x:.16e}")
    }
}

fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

/// Quotes a field that contains a separator or quote.
fn field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn reports_json(reports: &[BoundReport]) -> String {
    let mut s = serde_json::to_string_pretty(reports).expect("reports serialize");
    s.push('\n');
    s
}

/// One row per report; `runtime_ms` holds the wall time of the entry that
/// produced the row.
pub fn reports_csv(rows: &[(BoundReport, u128)], seed: u64) -> String {
    let mut s = String::from(REPORTS_HEADER);
    s.push('\n');
    for (r, ms) in rows {
        s.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            field(&r.bound_id),
            r.n,
            num(r.lhs_estimate),
            num(r.lhs_stderr),
            opt(r.rhs_value),
            r.pass,
            seed,
            ms,
            field(&r.variant)
        ));
    }
    s
}

/// One row per n; `rhs` is the constant-free bound shape.
pub fn curves_csv(curves: &[(String, String, RateFit)]) -> String {
    let mut s = String::from(CURVES_HEADER);
    s.push('\n');
    for (id, variant, fit) in curves {
        for p in &fit.points {
            s.push_str(&format!(
                "{},{},{},{},{},{}\n",
                field(id),
                field(variant),
                p.n,
                num(p.lhs),
                num(p.shape),
                num(p.ratio())
            ));
        }
    }
    s
}

pub fn spectra_csv(spectra: &[Vec<f64>]) -> String {
    let mut s = String::from(SPECTRA_HEADER);
    s.push('\n');
    for (rep, ev) in spectra.iter().enumerate() {
        for (rank, v) in ev.iter().enumerate() {
            s.push_str(&format!("{rep},{rank},{}\n", num(*v)));
        }
    }
    s
}

/// Row of the constants table; `None` prints as an empty cell.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstantsRow {
    pub law: String,
    pub values: [Option<f64>; 12],
}

pub fn constants_csv(rows: &[ConstantsRow]) -> String {
    let mut s = String::from(CONSTANTS_HEADER);
    s.push('\n');
    for r in rows {
        let cells: Vec<String> = r.values.iter().map(|v| opt(*v)).collect();
        s.push_str(&format!("{},{}\n", field(&r.law), cells.join(",")));
    }
    s
}
