//! Rational singular points of `X~` and their orbit classes.

use std::collections::BTreeMap;

use serde::Serialize;

use super::cone::{tangent_cone, DiscClass};
use crate::error::{Error, Result};
use crate::ff::PrimeModulus;
use crate::heisenberg::{pair_orbit, PairPoint, ProjectivePoint, Realization};
use crate::sweep::{default_parts, sweep, SweepOutcome};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum NodeClass {
    Sigma1,
    Sigma2,
    Tau,
    Regular1,
    Regular2,
}

impl NodeClass {
    pub const ALL: [NodeClass; 5] = [Self::Sigma1, Self::Sigma2, Self::Tau, Self::Regular1, Self::Regular2];

    pub fn name(self) -> &'static str {
        match self {
            Self::Sigma1 => "sigma1",
            Self::Sigma2 => "sigma2",
            Self::Tau => "tau",
            Self::Regular1 => "regular1",
            Self::Regular2 => "regular2",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NodeRecord {
    pub point: PairPoint,
    pub orbit_class: NodeClass,
    pub cone_rank: usize,
    pub disc_class: DiscClass,
    /// Affine charts `(x index, z index)` used for the local expansion.
    pub chart: (usize, usize),
}

/// One representative per node class.
pub fn node_representatives(p: PrimeModulus) -> Vec<(NodeClass, PairPoint)> {
    let pp = |x: [i64; 5], z: [i64; 5]| PairPoint {
        x: ProjectivePoint::from_ints(p, x).expect("nonzero"),
        z: ProjectivePoint::from_ints(p, z).expect("nonzero"),
    };
    let y = [2, -1, 0, 0, -1];
    vec![
        (NodeClass::Sigma1, pp([1, 0, 0, 0, 0], [0, 0, 1, 0, 0])),
        (NodeClass::Sigma2, pp([1, 0, 0, 0, 0], [0, 0, 0, 1, 0])),
        (NodeClass::Tau, pp([1, 1, 1, 1, 1], [1, 1, 1, 1, 1])),
        (NodeClass::Regular1, pp(y, [0, 0, 1, -1, 0])),
        (NodeClass::Regular2, pp(y, [0, -2, 1, -1, 2])),
    ]
}

/// Orbit-membership table: every point of every representative's orbit
/// under the rational part of the Heisenberg action.
pub fn class_table(real: &Realization) -> BTreeMap<PairPoint, NodeClass> {
    let gens = real.pair_actions();
    let mut table = BTreeMap::new();
    for (class, rep) in node_representatives(real.p) {
        for pt in pair_orbit(rep, &gens) {
            table.insert(pt, class);
        }
    }
    table
}

pub fn classify(point: &PairPoint, table: &BTreeMap<PairPoint, NodeClass>) -> Result<NodeClass> {
    table.get(point).copied().ok_or_else(|| Error::UnclassifiedSingular(point.to_string()))
}

/// Census from a finished sweep, with orbit classes computed from `real`.
pub fn census_from_sweep(outcome: &SweepOutcome, real: &Realization) -> Result<Vec<NodeRecord>> {
    let table = class_table(real);
    outcome
        .singular
        .iter()
        .map(|pt| {
            let class = classify(pt, &table)?;
            let cone = tangent_cone(pt)?;
            Ok(NodeRecord {
                point: *pt,
                orbit_class: class,
                cone_rank: cone.rank,
                disc_class: cone.disc_class,
                chart: cone.chart,
            })
        })
        .collect()
}

/// All `F_p`-rational singular points of `X~`, classified.
pub fn singular_census(p: PrimeModulus) -> Result<Vec<NodeRecord>> {
    let p = PrimeModulus::good(p.get())?;
    let outcome = sweep(p, default_parts())?;
    census_from_sweep(&outcome, &Realization::new(p)?)
}
