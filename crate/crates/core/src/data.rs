//! Read-only data tables: Fourier coefficients of the level-55 form and the
//! number fields used by the elimination.
//!
//! Both tables are embedded at build time and may be replaced by files in a
//! user-supplied directory with the same names.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ff::{IntPolynomial, BAD_PRIMES};

pub const FORM_FILE: &str = "modular_form_55k4A1.json";
pub const FIELDS_FILE: &str = "number_fields.json";

const FORM_BUILTIN: &str = include_str!("../../../data/modular_form_55k4A1.json");
const FIELDS_BUILTIN: &str = include_str!("../../../data/number_fields.json");

/// Provenance prefix of the shipped entries; anything else is external.
pub const TRANSCRIBED: &str = "transcribed";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FormCoefficient {
    pub p: u64,
    pub a_p: i64,
    pub provenance: String,
}

impl FormCoefficient {
    pub fn is_external(&self) -> bool {
        !self.provenance.starts_with(TRANSCRIBED)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModularFormTable {
    pub label: String,
    pub weight: u32,
    pub level: u64,
    pub description: String,
    pub coefficients: Vec<FormCoefficient>,
}

impl ModularFormTable {
    pub fn builtin() -> Self {
        serde_json::from_str(FORM_BUILTIN).expect("embedded form table is valid")
    }

    pub fn load(path: &Path) -> Result<Self> {
        let table: Self = parse(path)?;
        let mut seen = BTreeMap::new();
        for c in &table.coefficients {
            if seen.insert(c.p, c.a_p).is_some_and(|prev| prev != c.a_p) {
                return Err(Error::Data { path: path.into(), detail: format!("conflicting values for a_{}", c.p) });
            }
        }
        Ok(table)
    }

    pub fn entry(&self, p: u64) -> Option<&FormCoefficient> {
        self.coefficients.iter().find(|c| c.p == p)
    }

    pub fn a_p(&self, p: u64) -> Option<i64> {
        self.entry(p).map(|c| c.a_p)
    }

    pub fn require(&self, p: u64) -> Result<i64> {
        self.a_p(p).ok_or(Error::MissingFormCoefficient(p))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum GroupTag {
    C2,
    S3,
    S4,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NumberFieldEntry {
    pub label: String,
    #[serde(rename = "coefficients")]
    pub defining_polynomial: IntPolynomial,
    pub group_tag: GroupTag,
    pub ramification_support: Vec<u64>,
    pub provenance: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NumberFieldTable {
    pub version: u32,
    pub description: String,
    pub entries: Vec<NumberFieldEntry>,
}

impl NumberFieldTable {
    pub fn builtin() -> Self {
        let table: Self = serde_json::from_str(FIELDS_BUILTIN).expect("embedded field table is valid");
        table.validate(Path::new(FIELDS_FILE)).expect("embedded field table is consistent");
        table
    }

    pub fn load(path: &Path) -> Result<Self> {
        let table: Self = parse(path)?;
        table.validate(path)?;
        Ok(table)
    }

    fn validate(&self, path: &Path) -> Result<()> {
        for e in &self.entries {
            let bad = |detail: String| Error::Data { path: path.into(), detail: format!("{}: {detail}", e.label) };
            if let Some(q) = e.ramification_support.iter().find(|q| !BAD_PRIMES.contains(q)) {
                return Err(bad(format!("ramified at {q}, outside {{2, 5, 11}}")));
            }
            let expected = match e.group_tag {
                GroupTag::C2 => 2,
                GroupTag::S3 => 3,
                GroupTag::S4 => 4,
            };
            if e.defining_polynomial.degree() != expected {
                return Err(bad(format!("degree {} does not match {:?}", e.defining_polynomial.degree(), e.group_tag)));
            }
        }
        Ok(())
    }

    pub fn with_tag(&self, tag: GroupTag) -> Vec<&NumberFieldEntry> {
        self.entries.iter().filter(|e| e.group_tag == tag).collect()
    }
}

fn parse<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| Error::Data { path: path.into(), detail: e.to_string() })?;
    serde_json::from_str(&text).map_err(|e| Error::Data { path: path.into(), detail: e.to_string() })
}

/// Both tables, from `dir` when given and the embedded copies otherwise.
#[derive(Clone, Debug)]
pub struct DataSet {
    pub form: ModularFormTable,
    pub fields: NumberFieldTable,
    pub source: Option<PathBuf>,
}

impl DataSet {
    pub fn load(dir: Option<&Path>) -> Result<Self> {
        match dir {
            None => Ok(Self { form: ModularFormTable::builtin(), fields: NumberFieldTable::builtin(), source: None }),
            Some(d) => Ok(Self {
                form: ModularFormTable::load(&d.join(FORM_FILE))?,
                fields: NumberFieldTable::load(&d.join(FIELDS_FILE))?,
                source: Some(d.to_path_buf()),
            }),
        }
    }
}
