//! CSV and JSON emission.

use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::config::Format;
use crate::CliError;

/// A header plus rows of already formatted cells.
#[derive(Debug, Default)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&'static str]) -> Self {
        Self {
            header: header.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut s = self.header.join(",");
        s.push('\n');
        for r in &self.rows {
            s.push_str(&r.join(","));
            s.push('\n');
        }
        s
    }
}

/// `v` with 12 significant digits, in the style of C's `%.12g`.
pub fn num(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if !v.is_finite() {
        return v.to_string();
    }
    let sci = format!("{v:.11e}");
    let (mant, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..12).contains(&exp) {
        let digits = usize::try_from(11 - exp).unwrap_or(0);
        trim(format!("{v:.digits$}"))
    } else {
        format!("{}e{exp}", trim(mant.to_string()))
    }
}

fn trim(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

pub fn flag(b: bool) -> String {
    b.to_string()
}

/// Writes the table as CSV or `json` as pretty JSON, to `out` or stdout.
pub fn emit<J: Serialize>(table: &Table, json: &J, format: Format, out: Option<&Path>) -> Result<(), CliError> {
    let text = match format {
        Format::Csv => table.to_csv(),
        Format::Json => {
            let mut s = serde_json::to_string_pretty(json).map_err(|e| CliError::Io(e.to_string()))?;
            s.push('\n');
            s
        }
    };
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display()))),
        None => std::io::stdout()
            .lock()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Io(e.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(num(0.30000000000000004), "0.3");
        assert_eq!(num(1.0), "1");
        assert_eq!(num(-2.5), "-2.5");
        assert_eq!(num(std::f64::consts::PI), "3.14159265359");
        assert_eq!(num(1.461_755_691_778_007e-4), "0.000146175569178");
        assert_eq!(num(1.2345e-7), "1.2345e-7");
        assert_eq!(num(6.02214076e23), "6.02214076e23");
        assert_eq!(num(123_456_789_012.0), "123456789012");
        assert_eq!(num(0.0), "0");
    }

    #[test]
    fn csv_layout() {
        let mut t = Table::new(&["a", "b"]);
        t.push(vec!["1".into(), "x".into()]);
        assert_eq!(t.to_csv(), "a,b\n1,x\n");
    }
}
