//! Results CSV: writer, reader and number formatting.

use std::path::Path;

use crate::error::{Result, SimError};
use crate::linkmetrics::GainAggregation;

pub const RESULTS_HEADER: [&str; 15] = [
    "scenario",
    "n_tx",
    "n_rf",
    "esn0_db",
    "ap",
    "user",
    "rate_dl_bps",
    "rate_ul_bps",
    "d_trans_s",
    "d_proc_s",
    "d_queue_s",
    "d_total_s",
    "utility",
    "feasible",
    "violations",
];

pub const SUMMARY_HEADER: [&str; 8] = [
    "scenario",
    "n_tx",
    "n_rf",
    "ap",
    "user",
    "mean_utility",
    "min_d_trans_s",
    "mode_d_trans_s",
];

/// One (scenario, codebook, Es/N0, AP, user) row. `ap` and `user` are ids.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkRecord {
    pub scenario: GainAggregation,
    pub n_tx: usize,
    pub n_rf: usize,
    pub esn0_db: f64,
    pub ap: usize,
    pub user: usize,
    pub rate_dl_bps: f64,
    /// Mean over subcarriers.
    pub rate_ul_bps: f64,
    /// Mean over subcarriers.
    pub d_trans_s: f64,
    pub d_proc_s: f64,
    pub d_queue_s: f64,
    pub d_total_s: f64,
    /// Mean over subcarriers; `None` when infeasible.
    pub utility: Option<f64>,
    pub feasible: bool,
    pub violations: Vec<char>,
}

impl LinkRecord {
    fn sort_key(&self) -> (&'static str, usize, usize, f64, usize, usize) {
        (
            self.scenario.as_str(),
            self.n_tx,
            self.n_rf,
            self.esn0_db,
            self.ap,
            self.user,
        )
    }
}

/// Sorts by (scenario, n_tx, n_rf, esn0_db, ap, user).
pub fn sort_records(records: &mut [LinkRecord]) {
    records.sort_by(|a, b| {
        let (ka, kb) = (a.sort_key(), b.sort_key());
        ka.0.cmp(kb.0)
            .then(ka.1.cmp(&kb.1))
            .then(ka.2.cmp(&kb.2))
            .then(ka.3.total_cmp(&kb.3))
            .then(ka.4.cmp(&kb.4))
            .then(ka.5.cmp(&kb.5))
    });
}

/// Nine significant digits, `%g` style: plain notation for decimal
/// exponents in `[-4, 9)`, scientific otherwise, trailing zeros trimmed.
pub fn format_sig9(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.8e}");
    let (mantissa, exp) = sci
        .split_once('e')
        .expect("scientific format has an exponent");
    let exp: i32 = exp.parse().expect("exponent is an integer");
    if (-4..9).contains(&exp) {
        let decimals = (8 - exp) as usize;
        trim_zeros(&format!("{x:.decimals$}"))
    } else {
        format!("{}e{exp}", trim_zeros(mantissa))
    }
}

fn trim_zeros(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}

fn csv_err(path: &Path, source: csv::Error) -> SimError {
    if source.is_io_error() {
        match source.into_kind() {
            csv::ErrorKind::Io(e) => SimError::io(path, e),
            _ => unreachable!("checked is_io_error"),
        }
    } else {
        SimError::Csv {
            path: path.to_path_buf(),
            source,
        }
    }
}

/// Writes `records` sorted into `path`, header first.
pub fn write_results_csv(records: &[LinkRecord], path: &Path) -> Result<()> {
    let mut sorted = records.to_vec();
    sort_records(&mut sorted);
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_err(path, e))?;
    w.write_record(RESULTS_HEADER)
        .map_err(|e| csv_err(path, e))?;
    for r in &sorted {
        let violations: Vec<String> = r.violations.iter().map(char::to_string).collect();
        w.write_record([
            r.scenario.as_str().to_string(),
            r.n_tx.to_string(),
            r.n_rf.to_string(),
            format_sig9(r.esn0_db),
            r.ap.to_string(),
            r.user.to_string(),
            format_sig9(r.rate_dl_bps),
            format_sig9(r.rate_ul_bps),
            format_sig9(r.d_trans_s),
            format_sig9(r.d_proc_s),
            format_sig9(r.d_queue_s),
            format_sig9(r.d_total_s),
            r.utility.map(format_sig9).unwrap_or_default(),
            r.feasible.to_string(),
            violations.join(";"),
        ])
        .map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(|e| SimError::io(path, e))
}

fn field<T: std::str::FromStr>(row: &csv::StringRecord, idx: usize, path: &Path) -> Result<T> {
    let raw = row.get(idx).unwrap_or("");
    raw.parse().map_err(|_| {
        SimError::Config(format!(
            "{}: cannot parse column {} value '{raw}'",
            path.display(),
            RESULTS_HEADER[idx]
        ))
    })
}

/// Reads a file produced by [`write_results_csv`].
pub fn read_results_csv(path: &Path) -> Result<Vec<LinkRecord>> {
    let mut rd = csv::Reader::from_path(path).map_err(|e| csv_err(path, e))?;
    let header = rd.headers().map_err(|e| csv_err(path, e))?.clone();
    if header.iter().ne(RESULTS_HEADER) {
        return Err(SimError::Config(format!(
            "{}: header does not match the results schema",
            path.display()
        )));
    }
    let mut out = Vec::new();
    for row in rd.records() {
        let row = row.map_err(|e| csv_err(path, e))?;
        let scenario: GainAggregation = row.get(0).unwrap_or("").parse()?;
        let utility_raw = row.get(12).unwrap_or("");
        let utility = if utility_raw.is_empty() {
            None
        } else {
            Some(field(&row, 12, path)?)
        };
        out.push(LinkRecord {
            scenario,
            n_tx: field(&row, 1, path)?,
            n_rf: field(&row, 2, path)?,
            esn0_db: field(&row, 3, path)?,
            ap: field(&row, 4, path)?,
            user: field(&row, 5, path)?,
            rate_dl_bps: field(&row, 6, path)?,
            rate_ul_bps: field(&row, 7, path)?,
            d_trans_s: field(&row, 8, path)?,
            d_proc_s: field(&row, 9, path)?,
            d_queue_s: field(&row, 10, path)?,
            d_total_s: field(&row, 11, path)?,
            utility,
            feasible: field(&row, 13, path)?,
            violations: row
                .get(14)
                .unwrap_or("")
                .split(';')
                .filter_map(|s| s.chars().next())
                .collect(),
        });
    }
    Ok(out)
}

/// Per-link summary over the Es/N0 grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub scenario: GainAggregation,
    pub n_tx: usize,
    pub n_rf: usize,
    pub ap: usize,
    pub user: usize,
    /// Mean utility over the feasible grid points; `None` if there are none.
    pub mean_utility: Option<f64>,
    pub min_d_trans_s: f64,
    pub mode_d_trans_s: f64,
}

pub fn write_summary_csv(rows: &[SummaryRow], path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_err(path, e))?;
    w.write_record(SUMMARY_HEADER)
        .map_err(|e| csv_err(path, e))?;
    for r in rows {
        w.write_record([
            r.scenario.as_str().to_string(),
            r.n_tx.to_string(),
            r.n_rf.to_string(),
            r.ap.to_string(),
            r.user.to_string(),
            r.mean_utility.map(format_sig9).unwrap_or_default(),
            format_sig9(r.min_d_trans_s),
            format_sig9(r.mode_d_trans_s),
        ])
        .map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(|e| SimError::io(path, e))
}
