//! Deterministic number formatting for CSV and JSON output.
//!
//! Every float is printed with 17 significant digits in scientific form
//! (`{:.16e}`), which round-trips an `f64` exactly and never depends on
//! locale.

use std::io;

use serde::Serialize;
use serde_json::ser::{CompactFormatter, Formatter};

/// `x` with 17 significant digits, `.` separator and `e` exponent marker.
/// Negative zero prints as zero.
pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        let x = x + 0.0;
        format!("{x:.16e}")
    } else {
        format!("{x}")
    }
}

/// Compact JSON with floats written by [`fmt_f64`]. Non-finite floats
/// become `null`.
#[derive(Debug, Default, Clone, Copy)]
pub struct FixedFloatFormatter;

impl Formatter for FixedFloatFormatter {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        if value.is_finite() {
            writer.write_all(fmt_f64(value).as_bytes())
        } else {
            CompactFormatter.write_null(writer)
        }
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, f64::from(value))
    }
}

/// Serializes `value` with [`FixedFloatFormatter`].
pub fn to_json_string<T: Serialize + ?Sized>(value: &T) -> serde_json::Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, FixedFloatFormatter);
    value.serialize(&mut ser)?;
    Ok(String::from_utf8(buf).expect("serde_json emits UTF-8"))
}

/// One CSV row of floats.
pub fn csv_row(values: &[f64]) -> String {
    values
        .iter()
        .map(|&v| fmt_f64(v))
        .collect::<Vec<_>>()
        .join(",")
}
