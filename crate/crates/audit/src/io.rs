//! Trace CSV and audit JSON files.
//!
//! Trace values are written with 17 significant digits, so reading a file
//! back reproduces every value bit for bit.

use std::fs::File;
use std::io::{self, Read, Write};
use std::path::Path;

use kottler_core::flow::{FlowTrace, TraceRow};
use thiserror::Error;

use crate::scenario::AuditResult;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("I/O error on {path}: {source}")]
    Io { path: String, source: io::Error },
    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),
    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("bad trace header: expected {expected:?}, got {got:?}")]
    Header { expected: Vec<String>, got: Vec<String> },
    #[error("row {row}: cannot parse '{value}' as a number")]
    Value { row: usize, value: String },
    #[error("row {row}: expected {expected} fields, got {got}")]
    Width { row: usize, expected: usize, got: usize },
}

fn io_error(path: &Path) -> impl FnOnce(io::Error) -> IoError + '_ {
    move |source| IoError::Io { path: path.display().to_string(), source }
}

/// Formats `v` with 17 significant digits.
pub fn format_value(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_trace<W: Write>(rows: &[TraceRow], out: W) -> Result<(), IoError> {
    let mut writer = csv::Writer::from_writer(out);
    writer.write_record(TraceRow::COLUMNS)?;
    for row in rows {
        writer.write_record(row.values().map(format_value))?;
    }
    writer.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn read_trace<R: Read>(input: R) -> Result<Vec<TraceRow>, IoError> {
    let mut reader = csv::ReaderBuilder::new().flexible(true).from_reader(input);
    let header: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
    if header != TraceRow::COLUMNS {
        return Err(IoError::Header { expected: TraceRow::COLUMNS.map(str::to_string).to_vec(), got: header });
    }
    let mut rows = Vec::new();
    for (index, record) in reader.records().enumerate() {
        let record = record?;
        let row = index + 1;
        if record.len() != TraceRow::COLUMNS.len() {
            return Err(IoError::Width { row, expected: TraceRow::COLUMNS.len(), got: record.len() });
        }
        let mut values = [0.0; 11];
        for (slot, field) in values.iter_mut().zip(record.iter()) {
            *slot = field.trim().parse().map_err(|_| IoError::Value { row, value: field.to_string() })?;
        }
        rows.push(TraceRow::from_values(values));
    }
    Ok(rows)
}

pub fn emit_trace_csv(trace: &FlowTrace, path: &Path) -> Result<(), IoError> {
    let file = File::create(path).map_err(io_error(path))?;
    write_trace(&trace.rows, file)
}

pub fn read_trace_csv(path: &Path) -> Result<Vec<TraceRow>, IoError> {
    let file = File::open(path).map_err(io_error(path))?;
    read_trace(file)
}

pub fn audit_json(result: &AuditResult) -> Result<String, IoError> {
    let mut text = serde_json::to_string_pretty(result)?;
    text.push('\n');
    Ok(text)
}

pub fn emit_audit_json(result: &AuditResult, path: &Path) -> Result<(), IoError> {
    std::fs::write(path, audit_json(result)?).map_err(io_error(path))
}

pub fn read_audit_json(path: &Path) -> Result<AuditResult, IoError> {
    let text = std::fs::read_to_string(path).map_err(io_error(path))?;
    Ok(serde_json::from_str(&text)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::checks::{Check, CheckKind, Relation};
    use kottler_core::flow::FlowMethod;
    use proptest::prelude::*;

    fn csv_text(rows: &[TraceRow]) -> String {
        let mut buf = Vec::new();
        write_trace(rows, &mut buf).unwrap();
        String::from_utf8(buf).unwrap()
    }

    #[test]
    fn empty_trace_is_header_only() {
        let text = csv_text(&FlowTrace::empty(FlowMethod::Ode).rows);
        assert_eq!(text, "t,area,int_VH,int_OmegaV,Q,P,hawking_mass,min_H,max_H,min_align,int_A0sq\n");
        assert!(read_trace(text.as_bytes()).unwrap().is_empty());
    }

    #[test]
    fn three_samples_give_three_rows_in_column_order() {
        let rows: Vec<TraceRow> = (0..3)
            .map(|i| TraceRow::from_values(std::array::from_fn(|j| (10 * i + j) as f64)))
            .collect();
        let text = csv_text(&rows);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 4);
        let second: Vec<f64> = lines[2].split(',').map(|v| v.parse().unwrap()).collect();
        assert_eq!(second, (10..21).map(f64::from).collect::<Vec<_>>());
        assert_eq!(read_trace(text.as_bytes()).unwrap(), rows);
    }

    #[test]
    fn values_carry_seventeen_significant_digits() {
        assert_eq!(format_value(0.1), "1.0000000000000001e-1");
        assert_eq!(format_value(-2.0), "-2.0000000000000000e0");
    }

    #[test]
    fn malformed_traces_are_rejected() {
        assert!(matches!(read_trace("a,b\n1,2\n".as_bytes()), Err(IoError::Header { .. })));
        let header = TraceRow::COLUMNS.join(",");
        assert!(matches!(read_trace(format!("{header}\n1,2\n").as_bytes()), Err(IoError::Width { row: 1, .. })));
        let bad = format!("{header}\n{}x\n", "1,".repeat(10));
        assert!(matches!(read_trace(bad.as_bytes()), Err(IoError::Value { row: 1, .. })));
    }

    #[test]
    fn failing_check_marks_audit_failed() {
        let checks = vec![
            Check::new(CheckKind::QConstant, 0.0, Relation::AtMost, 0.0, 1e-10),
            Check::new(CheckKind::ChMass, 2.0, Relation::Near, 1.0, 1e-3),
        ];
        let result = AuditResult::new("demo", checks, None);
        let text = audit_json(&result).unwrap();
        let value: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(value["passed"], serde_json::Value::Bool(false));
        assert_eq!(value["checks"][1]["passed"], serde_json::Value::Bool(false));
        assert_eq!(serde_json::from_str::<AuditResult>(&text).unwrap(), result);
    }

    proptest! {
        #[test]
        fn csv_round_trip_is_bit_exact(values in prop::collection::vec(prop::array::uniform11(any::<f64>()), 0..6)) {
            let rows: Vec<TraceRow> = values
                .into_iter()
                .map(|v| TraceRow::from_values(v.map(|x| if x.is_finite() { x } else { 0.0 })))
                .collect();
            let back = read_trace(csv_text(&rows).as_bytes()).unwrap();
            prop_assert_eq!(back.len(), rows.len());
            for (a, b) in back.iter().zip(&rows) {
                for (x, y) in a.values().iter().zip(b.values()) {
                    prop_assert_eq!(x.to_bits(), y.to_bits());
                }
            }
        }

        #[test]
        fn json_round_trip_is_bit_exact(value in any::<f64>().prop_filter("finite", |v| v.is_finite())) {
            let result = AuditResult::new(
                "p",
                vec![Check::new(CheckKind::StaticResidual, value, Relation::AtMost, 0.0, 1e-9)],
                None,
            );
            let back: AuditResult = serde_json::from_str(&audit_json(&result).unwrap()).unwrap();
            prop_assert_eq!(back.checks[0].value.to_bits(), value.to_bits());
        }
    }
}
