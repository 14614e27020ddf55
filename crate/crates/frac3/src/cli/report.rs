//! Number and field formatting shared by the output formats: JSON floats
//! carry 17 significant digits so values round-trip exactly, text tables
//! use 6 decimals (Rust's formatter rounds half to even), and CSV reuses
//! the JSON float format so golden files diff cleanly.

use std::fmt::Display;

/// Round-tripping float: 17 significant digits, scientific.
pub fn jf(x: f64) -> String {
    format!("{x:.16e}")
}

/// Table float: 6 decimals.
pub fn tf(x: f64) -> String {
    format!("{x:.6}")
}

/// Compact scientific float for deltas and tolerances.
pub fn sci(x: f64) -> String {
    format!("{x:.2e}")
}

pub fn json_str(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if (c as u32) < 0x20 => out.push_str(&format!("\\u{:04x}", c as u32)),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

pub fn json_f64_array(xs: &[f64]) -> String {
    let inner: Vec<String> = xs.iter().map(|&x| jf(x)).collect();
    format!("[{}]", inner.join(","))
}

pub fn json_int_array<T: Display>(xs: &[T]) -> String {
    let inner: Vec<String> = xs.iter().map(|x| x.to_string()).collect();
    format!("[{}]", inner.join(","))
}

pub fn space_join<T: Display>(xs: &[T]) -> String {
    let inner: Vec<String> = xs.iter().map(|x| x.to_string()).collect();
    inner.join(" ")
}

/// Left-aligned plain-text table with two-space gutters.
pub fn table(headers: &[&str], rows: &[Vec<String>]) -> String {
    let cols = headers.len();
    let mut widths: Vec<usize> = headers.iter().map(|h| h.len()).collect();
    for row in rows {
        for (i, cell) in row.iter().enumerate() {
            widths[i] = widths[i].max(cell.len());
        }
    }
    let mut out = String::new();
    let emit = |out: &mut String, cells: &[String]| {
        for (i, cell) in cells.iter().enumerate() {
            if i > 0 {
                out.push_str("  ");
            }
            if i + 1 == cols {
                out.push_str(cell);
            } else {
                out.push_str(&format!("{cell:<width$}", width = widths[i]));
            }
        }
        out.push('\n');
    };
    let header_cells: Vec<String> = headers.iter().map(|h| h.to_string()).collect();
    emit(&mut out, &header_cells);
    for row in rows {
        emit(&mut out, row);
    }
    out
}

pub fn csv_field(s: &str) -> String {
    if s.contains(',') || s.contains('"') || s.contains('\n') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn csv_line(fields: &[String]) -> String {
    let quoted: Vec<String> = fields.iter().map(|f| csv_field(f)).collect();
    quoted.join(",")
}
