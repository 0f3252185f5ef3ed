//! CSV encoding of sweep results and optimizer traces.
//!
//! Columns are `metric,scheme,d_ab_m,d_ri_m,pt_dbm,m,value,seed`. Absent
//! coordinates are empty fields and values carry four decimals.

use std::io::{Read, Write};

use crate::error::{SimError, SimResult};
use crate::experiments::{Row, SweepResult, TraceRecord};

pub const HEADER: [&str; 8] = ["metric", "scheme", "d_ab_m", "d_ri_m", "pt_dbm", "m", "value", "seed"];

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

/// `{:.4}` without a negative sign on values that round to zero.
fn fixed4(v: f64) -> String {
    let s = format!("{v:.4}");
    if s == "-0.0000" {
        "0.0000".into()
    } else {
        s
    }
}

pub fn write_result<W: Write>(result: &SweepResult, out: W) -> SimResult<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(HEADER)?;
    for r in &result.rows {
        w.write_record([
            r.metric.code().to_string(),
            r.scheme.clone(),
            opt(r.d_ab_m),
            opt(r.d_ri_m),
            opt(r.pt_dbm),
            opt(r.m),
            fixed4(r.value),
            r.seed.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn to_csv_string(result: &SweepResult) -> SimResult<String> {
    let mut buf = Vec::new();
    write_result(result, &mut buf)?;
    Ok(String::from_utf8(buf).expect("csv output is utf-8"))
}

fn field<T: std::str::FromStr>(rec: &csv::StringRecord, i: usize, line: u64) -> SimResult<Option<T>> {
    let raw = rec.get(i).unwrap_or("");
    if raw.is_empty() {
        return Ok(None);
    }
    raw.parse().map(Some).map_err(|_| SimError::Schema {
        line,
        message: format!("column `{}`: cannot parse `{raw}`", HEADER[i]),
    })
}

fn required<T: std::str::FromStr>(rec: &csv::StringRecord, i: usize, line: u64) -> SimResult<T> {
    field(rec, i, line)?.ok_or_else(|| SimError::Schema {
        line,
        message: format!("column `{}` is empty", HEADER[i]),
    })
}

pub fn read_result<R: Read>(input: R) -> SimResult<SweepResult> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(false).from_reader(input);
    let mut records = rdr.records();
    match records.next() {
        Some(h) => {
            let h = h?;
            if h.iter().ne(HEADER.iter().copied()) {
                return Err(SimError::Schema {
                    line: 1,
                    message: format!("expected header `{}`", HEADER.join(",")),
                });
            }
        }
        None => {
            return Err(SimError::Schema {
                line: 1,
                message: "missing header".into(),
            })
        }
    }
    let mut rows = Vec::new();
    for rec in records {
        let rec = rec?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.len() != HEADER.len() {
            return Err(SimError::Schema {
                line,
                message: format!("expected {} fields, got {}", HEADER.len(), rec.len()),
            });
        }
        let metric = rec[0].parse().map_err(|_| SimError::Schema {
            line,
            message: format!("unknown metric `{}`", &rec[0]),
        })?;
        let value: f64 = required(&rec, 6, line)?;
        if !value.is_finite() {
            return Err(SimError::Schema {
                line,
                message: "value must be finite".into(),
            });
        }
        rows.push(Row {
            metric,
            scheme: rec[1].to_string(),
            d_ab_m: field(&rec, 2, line)?,
            d_ri_m: field(&rec, 3, line)?,
            pt_dbm: field(&rec, 4, line)?,
            m: field(&rec, 5, line)?,
            value,
            seed: required(&rec, 7, line)?,
        });
    }
    Ok(SweepResult { rows })
}

/// Convergence traces as `scheme,point,seed,iteration,best_fitness`.
pub fn write_traces<W: Write>(traces: &[TraceRecord], out: W) -> SimResult<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["scheme", "point", "seed", "iteration", "best_fitness"])?;
    for t in traces {
        for (i, best) in t.trace.iter().enumerate() {
            w.write_record([
                t.scheme.clone(),
                t.point.to_string(),
                t.seed.to_string(),
                i.to_string(),
                format!("{best:.6}"),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}
