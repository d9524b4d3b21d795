//! Deterministic JSON: compact layout, floats with 17 significant digits in
//! scientific notation, non-finite floats as `null`.

use std::io;

use serde::Serialize;
use serde_json::ser::{Formatter, Serializer};

use crate::error::Result;

#[derive(Clone, Copy, Debug, Default)]
pub struct FixedPrecision;

impl Formatter for FixedPrecision {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, value as f64)
    }
}

/// Serializes `value` with [`FixedPrecision`].
pub fn to_string<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut buf = Vec::new();
    let mut ser = Serializer::with_formatter(&mut buf, FixedPrecision);
    value.serialize(&mut ser)?;
    Ok(String::from_utf8(buf).expect("serde_json writes UTF-8"))
}

/// Formats a float for CSV with the same 17 significant digits; empty for non-finite.
pub fn csv_f64(value: f64) -> String {
    if value.is_finite() {
        format!("{value:.16e}")
    } else {
        String::new()
    }
}
