use std::path::PathBuf;

use thiserror::Error;

/// Failures surfaced by the pipeline.
///
/// Variants map one-to-one onto the failure modes the command-line front end
/// distinguishes by exit status.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("{0} is a prime of bad reduction (2, 5 and 11 are excluded)")]
    BadPrime(u64),
    #[error("modulus {0} is too large for enumeration (limit 2^31)")]
    ModulusTooLarge(u64),
    #[error("no primitive fifth root of unity in F_{0} ({0} is not 1 mod 5)")]
    NoFifthRoot(u64),
    #[error("5 is not a square in F_{0}")]
    NoSqrt5(u64),
    #[error("invalid polynomial: {0}")]
    InvalidPolynomial(String),
    #[error("leading coefficient of {poly} vanishes mod {p}")]
    DegreeDrop { poly: String, p: u64 },
    #[error("{poly} is not squarefree mod {p}")]
    Ramified { poly: String, p: u64 },
    #[error("singular point {0} lies outside the five known node orbits")]
    UnclassifiedSingular(String),
    #[error("degenerate tangent cone at {point}: {detail}")]
    DegenerateCone { point: String, detail: String },
    #[error("rank-3 component mismatch at p = {p}: {detail}")]
    ComponentMismatch { p: u64, detail: String },
    #[error("node census disagrees with residue-class prediction at p = {p}: {detail}")]
    CensusMismatch { p: u64, detail: String },
    #[error("no admissible value in the Weil window at p = {p}")]
    NoSolution { p: u64, witnesses: Vec<String> },
    #[error("Weil window at p = {p} admits several values: {candidates:?}")]
    AmbiguousSolution { p: u64, candidates: Vec<i64> },
    #[error("no modular-form coefficient a_{0} available")]
    MissingFormCoefficient(u64),
    #[error("missing trace at p = {p} for source {source_label}")]
    MissingTrace { p: u64, source_label: String },
    #[error("no residual cubic field is consistent with the probes")]
    NoField,
    #[error("several residual cubic fields are consistent with the probes: {0:?}")]
    MultipleFields(Vec<String>),
    #[error("{0} survives every probe prime")]
    EliminationGap(String),
    #[error("group property failed: {0}")]
    PropertyFailure(String),
    #[error("malformed data file {path}: {detail}")]
    Data { path: PathBuf, detail: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
