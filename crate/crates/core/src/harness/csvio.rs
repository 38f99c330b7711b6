//! CSV schemas. Floats use Rust's shortest round-trip formatting, so reading
//! a file back reproduces the in-memory values exactly.

use std::io::{Read, Write};

use crate::archive::ParetoArchive;
use crate::error::{MooError, Result};
use crate::solver::RoundRecord;

fn csv_err(e: csv::Error) -> MooError {
    MooError::invalid(format!("csv: {e}"))
}

fn floats(values: &[f64]) -> impl Iterator<Item = String> + '_ {
    values.iter().map(|v| v.to_string())
}

fn numbered(prefix: &str, n: usize) -> impl Iterator<Item = String> + '_ {
    (1..=n).map(move |i| format!("{prefix}_{i}"))
}

pub fn write_csv<W: Write>(out: W, header: &[String], rows: &[Vec<String>]) -> Result<()> {
    let mut wtr = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    wtr.write_record(header).map_err(csv_err)?;
    for row in rows {
        wtr.write_record(row).map_err(csv_err)?;
    }
    wtr.flush().map_err(|e| MooError::invalid(format!("csv flush: {e}")))
}

/// `round,f_1..f_m,lambda_1..lambda_m,tch_value,archive_size`.
pub fn write_trace<W: Write>(out: W, trace: &[RoundRecord]) -> Result<()> {
    let m = trace.first().map_or(0, |r| r.objectives.len());
    let mut header = vec!["round".to_string()];
    header.extend(numbered("f", m));
    header.extend(numbered("lambda", m));
    header.push("tch_value".into());
    header.push("archive_size".into());
    let rows: Vec<Vec<String>> = trace
        .iter()
        .map(|r| {
            let mut row = vec![r.round.to_string()];
            row.extend(floats(&r.objectives));
            row.extend(floats(&r.lambda));
            row.push(r.tch_value.to_string());
            row.push(r.archive_size.to_string());
            row
        })
        .collect();
    write_csv(out, &header, &rows)
}

pub fn read_trace<R: Read>(input: R) -> Result<Vec<RoundRecord>> {
    let mut rdr = csv::Reader::from_reader(input);
    let width = rdr.headers().map_err(csv_err)?.len();
    if width < 5 || (width - 3) % 2 != 0 {
        return Err(MooError::invalid(format!("trace header has {width} columns")));
    }
    let m = (width - 3) / 2;
    let parse = |s: &str| -> Result<f64> { s.parse().map_err(|_| MooError::invalid(format!("bad float '{s}'"))) };
    rdr.records()
        .map(|rec| {
            let rec = rec.map_err(csv_err)?;
            let fields: Vec<&str> = rec.iter().collect();
            Ok(RoundRecord {
                round: fields[0].parse().map_err(|_| MooError::invalid("bad round index"))?,
                objectives: fields[1..=m].iter().map(|s| parse(s)).collect::<Result<_>>()?,
                lambda: fields[m + 1..=2 * m].iter().map(|s| parse(s)).collect::<Result<_>>()?,
                tch_value: parse(fields[2 * m + 1])?,
                archive_size: fields[2 * m + 2].parse().map_err(|_| MooError::invalid("bad archive size"))?,
            })
        })
        .collect()
}

/// `round_index,gamma,f_1..f_m` for every archive member.
pub fn write_archive<W: Write>(out: W, archive: &ParetoArchive) -> Result<()> {
    let m = archive.entries().first().map_or(0, |e| e.objectives.len());
    let mut header = vec!["round_index".to_string(), "gamma".to_string()];
    header.extend(numbered("f", m));
    let rows: Vec<Vec<String>> = archive
        .entries()
        .iter()
        .map(|e| {
            let mut row = vec![e.round.to_string(), e.weight.to_string()];
            row.extend(floats(&e.objectives));
            row
        })
        .collect();
    write_csv(out, &header, &rows)
}

/// One labelled solution per row: `solution,f_1..f_m,tch_value,theta_1..theta_d`.
pub fn write_solutions<W: Write>(out: W, solutions: &[(&str, &[f64], f64, &[f64])]) -> Result<()> {
    let (m, d) = solutions.first().map_or((0, 0), |s| (s.1.len(), s.3.len()));
    let mut header = vec!["solution".to_string()];
    header.extend(numbered("f", m));
    header.push("tch_value".into());
    header.extend(numbered("theta", d));
    let rows: Vec<Vec<String>> = solutions
        .iter()
        .map(|(name, f, tch, theta)| {
            let mut row = vec![name.to_string()];
            row.extend(floats(f));
            row.push(tch.to_string());
            row.extend(floats(theta));
            row
        })
        .collect();
    write_csv(out, &header, &rows)
}

/// Sweep summary row: `method,w_1..w_m,seed,f_1..f_m`.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub method: String,
    pub preference: Vec<f64>,
    pub seed: u64,
    pub objectives: Vec<f64>,
}

pub fn write_sweep<W: Write>(out: W, rows: &[SweepRow]) -> Result<()> {
    let m = rows.first().map_or(2, |r| r.preference.len());
    let mut header = vec!["method".to_string()];
    header.extend(numbered("w", m));
    header.push("seed".into());
    header.extend(numbered("f", m));
    let body: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            let mut row = vec![r.method.clone()];
            row.extend(floats(&r.preference));
            row.push(r.seed.to_string());
            row.extend(floats(&r.objectives));
            row
        })
        .collect();
    write_csv(out, &header, &body)
}

/// `round,worst_loss,lambda_1..lambda_m`.
pub fn write_fed_rounds<W: Write>(out: W, worst: &[f64], lambdas: &[Vec<f64>]) -> Result<()> {
    let m = lambdas.first().map_or(0, Vec::len);
    let mut header = vec!["round".to_string(), "worst_loss".to_string()];
    header.extend(numbered("lambda", m));
    let rows: Vec<Vec<String>> = worst
        .iter()
        .zip(lambdas)
        .enumerate()
        .map(|(t, (wl, l))| {
            let mut row = vec![(t + 1).to_string(), wl.to_string()];
            row.extend(floats(l));
            row
        })
        .collect();
    write_csv(out, &header, &rows)
}

/// `method,seed,average_accuracy,agnostic_loss,accuracy_parity`.
pub fn write_fed_summary<W: Write>(out: W, rows: &[(String, u64, f64, f64, f64)]) -> Result<()> {
    let header: Vec<String> = ["method", "seed", "average_accuracy", "agnostic_loss", "accuracy_parity"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    let body: Vec<Vec<String>> = rows
        .iter()
        .map(|(m, s, acc, ag, par)| vec![m.clone(), s.to_string(), acc.to_string(), ag.to_string(), par.to_string()])
        .collect();
    write_csv(out, &header, &body)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn trace_header_and_line_endings() {
        let trace = vec![RoundRecord {
            round: 1,
            objectives: vec![0.5, 0.25],
            lambda: vec![0.5, 0.5],
            tch_value: 0.25,
            archive_size: 1,
        }];
        let mut buf = Vec::new();
        write_trace(&mut buf, &trace).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text, "round,f_1,f_2,lambda_1,lambda_2,tch_value,archive_size\n1,0.5,0.25,0.5,0.5,0.25,1\n");
    }

    #[test]
    fn malformed_trace_is_rejected() {
        assert!(read_trace("round,a,b\n1,2,3\n".as_bytes()).is_err());
        assert!(read_trace("round,f_1,f_2,lambda_1,lambda_2,tch_value,archive_size\n1,x,0,0,0,0,0\n".as_bytes()).is_err());
    }

    fn record() -> impl Strategy<Value = RoundRecord> {
        (
            1u64..10_000,
            prop::collection::vec(prop::num::f64::NORMAL | prop::num::f64::ZERO | prop::num::f64::SUBNORMAL, 3),
            prop::collection::vec(0.0f64..1.0, 3),
            prop::num::f64::NORMAL,
            0usize..1000,
        )
            .prop_map(|(round, objectives, lambda, tch_value, archive_size)| RoundRecord {
                round,
                objectives,
                lambda,
                tch_value,
                archive_size,
            })
    }

    proptest! {
        #[test]
        fn trace_round_trips_exactly(trace in prop::collection::vec(record(), 1..20)) {
            let mut buf = Vec::new();
            write_trace(&mut buf, &trace).unwrap();
            let back = read_trace(buf.as_slice()).unwrap();
            prop_assert_eq!(back.len(), trace.len());
            for (a, b) in back.iter().zip(&trace) {
                prop_assert_eq!(a.round, b.round);
                prop_assert_eq!(a.archive_size, b.archive_size);
                prop_assert_eq!(a.tch_value.to_bits(), b.tch_value.to_bits());
                for (x, y) in a.objectives.iter().chain(&a.lambda).zip(b.objectives.iter().chain(&b.lambda)) {
                    prop_assert_eq!(x.to_bits(), y.to_bits());
                }
            }
        }
    }
}
