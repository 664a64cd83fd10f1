//! Report envelope, rendering and exit statuses.

use clap::ValueEnum;
use hmquintic::{Error, PrimeModulus};
use serde::{Deserialize, Serialize};
use serde_json::Value;

pub const EXIT_OTHER: u8 = 1;
pub const EXIT_BAD_PRIME: u8 = 3;
pub const EXIT_MISMATCH: u8 = 4;
pub const EXIT_GAP: u8 = 5;
pub const EXIT_AMBIGUOUS: u8 = 6;

pub fn exit_code(e: &Error) -> u8 {
    match e {
        Error::BadPrime(_) | Error::NotPrime(_) => EXIT_BAD_PRIME,
        Error::ComponentMismatch { .. } | Error::CensusMismatch { .. } => EXIT_MISMATCH,
        Error::EliminationGap(_) => EXIT_GAP,
        Error::AmbiguousSolution { .. } | Error::MultipleFields(_) => EXIT_AMBIGUOUS,
        _ => EXIT_OTHER,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Csv,
    Structured,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    /// Primitive fifth root of unity used for `tau`, when `F_p` has one.
    pub epsilon: Option<u64>,
    pub sqrt5: Option<u64>,
    pub policy: String,
    pub version: String,
    /// `builtin` or the `--data` directory.
    pub data_source: String,
    /// Primes whose form coefficient came from a user extension of the table.
    pub external_coefficients: Vec<u64>,
    pub notes: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub elapsed_ms: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    pub inputs: Value,
    pub outputs: Value,
    pub timing: Timing,
    pub provenance: Provenance,
}

/// A report plus its human and tabular renderings.
pub struct Output {
    pub report: Report,
    pub text: Vec<String>,
    /// Defaults to `key,value` rows of the top-level outputs.
    pub csv: Option<String>,
}

impl Output {
    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Structured => serde_json::to_string_pretty(&self.report).expect("report serializes") + "\n",
            Format::Csv => self.csv.clone().unwrap_or_else(|| flat_csv(&self.report.outputs)),
            Format::Text => {
                let mut s = self.text.join("\n");
                let pv = &self.report.provenance;
                s.push_str(&format!("\n[{} | policy {} | data {}", pv.version, pv.policy, pv.data_source));
                if let Some(e) = pv.epsilon {
                    s.push_str(&format!(" | epsilon {e}"));
                }
                if let Some(r) = pv.sqrt5 {
                    s.push_str(&format!(" | sqrt5 {r}"));
                }
                s.push_str(&format!(" | {} ms]\n", self.report.timing.elapsed_ms));
                for n in &pv.notes {
                    s.push_str(&format!("note: {n}\n"));
                }
                s
            }
        }
    }
}

fn flat_csv(v: &Value) -> String {
    let mut out = String::from("key,value\n");
    if let Value::Object(map) = v {
        for (k, x) in map {
            let cell = match x {
                Value::String(s) => s.clone(),
                other => other.to_string(),
            };
            let quoted = if cell.contains([',', '"', '\n']) { format!("\"{}\"", cell.replace('"', "\"\"")) } else { cell };
            out.push_str(&format!("{k},{quoted}\n"));
        }
    }
    out
}

/// Epsilon and sqrt(5) actually used at `p`.
pub fn realization_choices(p: PrimeModulus) -> (Option<u64>, Option<u64>) {
    match hmquintic::heisenberg::Realization::new(p) {
        Ok(r) => (r.epsilon.map(|e| e.value()), r.sqrt5.map(|s| s.value())),
        Err(_) => (None, None),
    }
}
