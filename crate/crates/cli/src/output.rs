//! Tables of decimal strings, rendered as CSV with `#` metadata lines or as
//! JSON carrying the same strings.

use std::io::Write;
use std::path::Path;

use hydromag_core::Float;
use serde_json::{Map, Value};

use crate::args::Format;
use crate::CliError;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Table {
    pub meta: Vec<(String, String)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Option<String>>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self { columns: columns.iter().map(|c| c.to_string()).collect(), ..Default::default() }
    }

    pub fn meta(&mut self, key: &str, value: impl ToString) {
        self.meta.push((key.to_string(), value.to_string()));
    }

    pub fn push(&mut self, row: Vec<Option<String>>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn render(&self, format: Format) -> Result<String, CliError> {
        match format {
            Format::Csv => self.csv(),
            Format::Json => Ok(self.json()),
        }
    }

    fn csv(&self) -> Result<String, CliError> {
        let mut out = String::new();
        for (k, v) in &self.meta {
            out.push_str(&format!("# {k}: {v}\n"));
        }
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        w.write_record(&self.columns).map_err(io)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|c| c.as_deref().unwrap_or(""))).map_err(io)?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
        out.push_str(&String::from_utf8(bytes).map_err(|e| CliError::Io(e.to_string()))?);
        Ok(out)
    }

    fn json(&self) -> String {
        let meta: Map<String, Value> = self.meta.iter().map(|(k, v)| (k.clone(), Value::String(v.clone()))).collect();
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let obj: Map<String, Value> = self
                    .columns
                    .iter()
                    .zip(row)
                    .map(|(c, v)| (c.clone(), v.clone().map_or(Value::Null, Value::String)))
                    .collect();
                Value::Object(obj)
            })
            .collect();
        let mut doc = Map::new();
        doc.insert("meta".into(), Value::Object(meta));
        doc.insert("rows".into(), Value::Array(rows));
        let mut s = serde_json::to_string_pretty(&Value::Object(doc)).expect("string-only JSON serializes");
        s.push('\n');
        s
    }
}

fn io(e: csv::Error) -> CliError {
    CliError::Io(e.to_string())
}

pub fn emit(text: &str, out: Option<&Path>) -> Result<(), CliError> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::Io(format!("{}: {e}", p.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes()).and_then(|_| stdout.flush()).map_err(|e| CliError::Io(e.to_string()))
        }
    }
}

/// Shortest decimal that parses back to the same Float at its precision.
pub fn float_str(x: &Float) -> String {
    x.to_string_radix(10, None)
}

/// Shortest decimal that parses back to the same f64, positional for
/// moderate magnitudes.
pub fn f64_str(x: f64) -> String {
    let a = x.abs();
    if a == 0.0 || (1e-4..1e16).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sample() -> Table {
        let mut t = Table::new(&["name", "value"]);
        t.meta("digits", 40);
        t.push(vec![Some("a, quoted".into()), Some("1.5".into())]);
        t.push(vec![Some("b".into()), None]);
        t
    }

    #[test]
    fn csv_layout() {
        let s = sample().render(Format::Csv).unwrap();
        assert_eq!(s, "# digits: 40\nname,value\n\"a, quoted\",1.5\nb,\n");
        assert!(!s.contains('\r'));
    }

    #[test]
    fn json_mirrors_strings() {
        let s = sample().render(Format::Json).unwrap();
        let v: Value = serde_json::from_str(&s).unwrap();
        assert_eq!(v["meta"]["digits"], "40");
        assert_eq!(v["rows"][0]["value"], "1.5");
        assert!(v["rows"][1]["value"].is_null());
    }

    #[test]
    fn high_precision_strings_round_trip() {
        let x = Float::with_val(300, 2).sqrt();
        let s = float_str(&x);
        assert!(s.len() > 80);
        assert_eq!(Float::with_val(300, Float::parse(&s).unwrap()), x);
    }

    proptest! {
        #[test]
        fn f64_strings_round_trip(x in proptest::num::f64::NORMAL) {
            prop_assert_eq!(f64_str(x).parse::<f64>().unwrap(), x);
        }

        #[test]
        fn float_strings_round_trip(bits in 53u32..2000, num in 1i64..1_000_000, den in 1i64..1000) {
            let x = Float::with_val(bits, num) / den;
            prop_assert_eq!(Float::with_val(bits, Float::parse(float_str(&x)).unwrap()), x);
        }
    }
}
