//! Deterministic record emission: the sweep CSV schema (fixed column
//! order, floats at 9 significant digits) and single-line JSON records.

use std::io::Write;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::experiments::SweepRecord;

/// Column order of every sweep CSV.
pub const SWEEP_CSV_HEADER: &str =
    "N,m,n,p0,p1,p0_prime,b1,b2,verdict,test,threshold,type1,se1,type2,se2,risk,reps,seed";

/// printf %.9g-style rendering: 9 significant digits, fixed point when the
/// exponent lies in [-4, 9), scientific otherwise, trailing zeros dropped.
pub fn format_g9(x: f64) -> String {
    format_sig(x, 9)
}

/// printf %.<sig>g-style rendering at an arbitrary significance level.
pub fn format_sig(x: f64, sig: usize) -> String {
    let sig = sig.max(1);
    if x.is_nan() {
        return "nan".to_string();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.to_string();
    }
    if x == 0.0 {
        return "0".to_string();
    }
    let sci = format!("{:.*e}", sig - 1, x);
    let (mantissa, exp_text) = sci.split_once('e').expect("exponential form");
    let exp: i32 = exp_text.parse().expect("exponent");
    let negative = mantissa.starts_with('-');
    let digits: String = mantissa.chars().filter(|c| c.is_ascii_digit()).collect();
    let trimmed = digits.trim_end_matches('0');
    let trimmed = if trimmed.is_empty() { "0" } else { trimmed };
    let body = if !(-4..sig as i32).contains(&exp) {
        let (head, tail) = trimmed.split_at(1);
        if tail.is_empty() {
            format!("{head}e{exp}")
        } else {
            format!("{head}.{tail}e{exp}")
        }
    } else if exp >= 0 {
        let whole = exp as usize + 1;
        if trimmed.len() > whole {
            format!("{}.{}", &trimmed[..whole], &trimmed[whole..])
        } else {
            format!("{}{}", trimmed, "0".repeat(whole - trimmed.len()))
        }
    } else {
        format!("0.{}{}", "0".repeat((-exp - 1) as usize), trimmed)
    };
    if negative {
        format!("-{body}")
    } else {
        body
    }
}

/// One CSV data row in `SWEEP_CSV_HEADER` order. An absent p0_prime prints
/// as an empty field.
pub fn sweep_csv_row(r: &SweepRecord) -> String {
    let p0_prime = r.p0_prime.map(format_g9).unwrap_or_default();
    format!(
        "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
        r.big_n,
        r.m,
        r.n,
        format_g9(r.p0),
        format_g9(r.p1),
        p0_prime,
        format_g9(r.b1),
        format_g9(r.b2),
        r.verdict,
        r.test,
        format_g9(r.threshold),
        format_g9(r.type1),
        format_g9(r.se1),
        format_g9(r.type2),
        format_g9(r.se2),
        format_g9(r.risk),
        r.reps,
        r.seed
    )
}

/// Header plus one row per record, newline-terminated.
pub fn write_sweep_csv<W: Write>(w: &mut W, records: &[SweepRecord]) -> Result<()> {
    writeln!(w, "{SWEEP_CSV_HEADER}")?;
    for r in records {
        writeln!(w, "{}", sweep_csv_row(r))?;
    }
    Ok(())
}

/// One record per line as JSON.
pub fn write_jsonl<W: Write, T: Serialize>(w: &mut W, records: &[T]) -> Result<()> {
    for r in records {
        let line = serde_json::to_string(r).map_err(|e| Error::Io(e.into()))?;
        writeln!(w, "{line}")?;
    }
    Ok(())
}

/// Single-line JSON rendering of any record.
pub fn json_line<T: Serialize>(record: &T) -> Result<String> {
    serde_json::to_string(record).map_err(|e| Error::Io(e.into()))
}
