//! CSV helpers shared by the experiment drivers.

use std::fmt::Write as _;

/// Reals with 17 significant digits, `.` decimal point, no locale.
pub fn real(x: f64) -> String {
    if x == 0.0 {
        // fold -0.0
        return "0.0000000000000000e0".to_string();
    }
    format!("{x:.16e}")
}

/// A header line followed by one line per row, fields joined by commas.
pub fn csv<I, R>(header: &[&str], rows: I) -> String
where
    I: IntoIterator<Item = R>,
    R: AsRef<[String]>,
{
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        let _ = writeln!(out, "{}", row.as_ref().join(","));
    }
    out
}
