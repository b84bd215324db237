//! CSV artifacts: convergence tables and energy traces.
//!
//! Floats are written as `{:.12e}` (13 significant digits), so a re-parse
//! recovers every value to 12 digits. Rates use six decimals and are blank
//! on the first row of a table.

use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::harness::{rate, EnergyRow, ErrorRecord};

pub const ENERGY_HEADER: [&str; 7] = [
    "step",
    "time",
    "modified_energy",
    "dissipation",
    "identity_residual",
    "discriminant",
    "chosen_root_ratio",
];

pub const L2_HEADER: [&str; 10] = [
    "h",
    "tau",
    "err_phi_linf_l2",
    "rate_phi_linf_l2",
    "err_mu_l2_l2",
    "rate_mu_l2_l2",
    "err_u_linf_l2",
    "rate_u_linf_l2",
    "err_p_l2_l2",
    "rate_p_l2_l2",
];

pub const H1_HEADER: [&str; 10] = [
    "h",
    "tau",
    "err_phi_h1",
    "rate_phi_h1",
    "err_mu_h1",
    "rate_mu_h1",
    "err_u_h1",
    "rate_u_h1",
    "err_p_h1",
    "rate_p_h1",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorTable {
    /// Trajectory norms: `l_inf(L2)` for phi and u, `l2(L2)` for mu and p.
    L2,
    /// Final-time H1 norms.
    H1,
}

impl ErrorTable {
    pub fn header(self) -> [&'static str; 10] {
        match self {
            ErrorTable::L2 => L2_HEADER,
            ErrorTable::H1 => H1_HEADER,
        }
    }

    fn errors(self, r: &ErrorRecord) -> [f64; 4] {
        match self {
            ErrorTable::L2 => [r.phi_linf_l2, r.mu_l2_l2, r.u_linf_l2, r.p_l2_l2],
            ErrorTable::H1 => [r.phi_h1, r.mu_h1, r.u_h1, r.p_h1],
        }
    }
}

pub fn fmt_float(v: f64) -> String {
    format!("{v:.12e}")
}

fn fmt_rate(v: f64) -> String {
    format!("{v:.6}")
}

fn csv_err(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Config(format!("csv: {other:?}")),
    }
}

pub fn write_error_table<W: Write>(
    out: W,
    table: ErrorTable,
    records: &[ErrorRecord],
) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(table.header()).map_err(csv_err)?;
    let mut prev: Option<[f64; 4]> = None;
    for r in records {
        let e = table.errors(r);
        let mut row = vec![fmt_float(r.h), fmt_float(r.tau)];
        for k in 0..4 {
            row.push(fmt_float(e[k]));
            row.push(prev.map_or(String::new(), |p| fmt_rate(rate(p[k], e[k]))));
        }
        w.write_record(&row).map_err(csv_err)?;
        prev = Some(e);
    }
    w.flush()?;
    Ok(())
}

pub fn write_error_table_csv(
    path: &Path,
    table: ErrorTable,
    records: &[ErrorRecord],
) -> Result<()> {
    write_error_table(std::fs::File::create(path)?, table, records)
}

pub fn write_energy<W: Write>(out: W, trace: &[EnergyRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(ENERGY_HEADER).map_err(csv_err)?;
    for r in trace {
        w.write_record([
            r.step.to_string(),
            fmt_float(r.time),
            fmt_float(r.modified_energy),
            fmt_float(r.dissipation),
            r.identity_residual.map_or(String::new(), fmt_float),
            fmt_float(r.discriminant),
            fmt_float(r.chosen_root_ratio),
        ])
        .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_energy_csv(path: &Path, trace: &[EnergyRow]) -> Result<()> {
    write_energy(std::fs::File::create(path)?, trace)
}

fn field<T: std::str::FromStr>(rec: &csv::StringRecord, i: usize, line: usize) -> Result<T> {
    rec.get(i)
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| Error::Config(format!("csv row {line}: bad field {i}")))
}

fn optional(rec: &csv::StringRecord, i: usize, line: usize) -> Result<Option<f64>> {
    match rec.get(i) {
        Some("") => Ok(None),
        _ => field(rec, i, line).map(Some),
    }
}

fn check_header<R: Read>(r: &mut csv::Reader<R>, expected: &[&str]) -> Result<()> {
    let h = r.headers().map_err(csv_err)?;
    if h.iter().ne(expected.iter().copied()) {
        return Err(Error::Config(format!("unexpected csv header {h:?}")));
    }
    Ok(())
}

pub fn read_energy<R: Read>(input: R) -> Result<Vec<EnergyRow>> {
    let mut r = csv::Reader::from_reader(input);
    check_header(&mut r, &ENERGY_HEADER)?;
    let mut out = Vec::new();
    for (line, rec) in r.records().enumerate() {
        let rec = rec.map_err(csv_err)?;
        out.push(EnergyRow {
            step: field(&rec, 0, line)?,
            time: field(&rec, 1, line)?,
            modified_energy: field(&rec, 2, line)?,
            dissipation: field(&rec, 3, line)?,
            identity_residual: optional(&rec, 4, line)?,
            discriminant: field(&rec, 5, line)?,
            chosen_root_ratio: field(&rec, 6, line)?,
        });
    }
    Ok(out)
}

/// One parsed table row: `h`, `tau`, four errors and four optional rates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TableRow {
    pub h: f64,
    pub tau: f64,
    pub errors: [f64; 4],
    pub rates: [Option<f64>; 4],
}

pub fn read_error_table<R: Read>(input: R, table: ErrorTable) -> Result<Vec<TableRow>> {
    let mut r = csv::Reader::from_reader(input);
    check_header(&mut r, &table.header())?;
    let mut out = Vec::new();
    for (line, rec) in r.records().enumerate() {
        let rec = rec.map_err(csv_err)?;
        let mut row = TableRow {
            h: field(&rec, 0, line)?,
            tau: field(&rec, 1, line)?,
            errors: [0.0; 4],
            rates: [None; 4],
        };
        for k in 0..4 {
            row.errors[k] = field(&rec, 2 + 2 * k, line)?;
            row.rates[k] = optional(&rec, 3 + 2 * k, line)?;
        }
        out.push(row);
    }
    Ok(out)
}
