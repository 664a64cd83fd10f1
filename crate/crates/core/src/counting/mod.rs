//! Point counts of `X'`, of the rank-3 locus, and of the resolution `X^`.
//!
//! `#X^(F_p) = #X'(F_p) + p * #{rank L(z) <= 3} + node contribution`: over a
//! rank-3 point the fibre of `X~ -> X'` is a line instead of a point, and
//! blowing up a node replaces one point by a quadric surface.

pub mod cache;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ff::PrimeModulus;
use crate::heisenberg::{ProjectivePoint, Realization};
use crate::hmq::census::census_from_sweep;
use crate::hmq::{e2_trace, DiscClass, NodeClass, NodeRecord};
use crate::sweep::{default_parts, sweep, SweepOutcome};

/// How a blown-up node adds to the count.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ContributionPolicy {
    /// A node with split rulings contributes its full exceptional quadric
    /// `(p+1)^2` minus the point it replaces; a non-split one contributes
    /// `p^2`. This is the recipe that reproduces the published counts.
    #[default]
    Quadric,
    /// Diagnostic alternative: `p^2 + p` for split, `p^2` otherwise.
    Prose,
}

impl ContributionPolicy {
    pub fn name(self) -> &'static str {
        match self {
            Self::Quadric => "quadric",
            Self::Prose => "prose",
        }
    }

    pub fn per_node(self, p: u64, split: bool) -> u64 {
        match (self, split) {
            (_, false) => p * p,
            (Self::Quadric, true) => p * p + 2 * p,
            (Self::Prose, true) => p * p + p,
        }
    }
}

impl fmt::Display for ContributionPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ContributionPolicy {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "quadric" | "paper" => Ok(Self::Quadric),
            "prose" | "naive" | "naive_quadric" => Ok(Self::Prose),
            other => Err(format!("unknown policy {other:?} (expected quadric, paper, prose or naive)")),
        }
    }
}

/// Partition of the rank-3 locus of `L(z)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rank3Split {
    pub total: u64,
    /// Points with at least three zero coordinates: the degenerate pentagon
    /// of lines.
    pub pentagon: u64,
    /// The remaining points, on the smooth genus-one component.
    pub e2_component: u64,
    /// Points satisfying both the pentagon monomials `z_i z_{i+2}` and the
    /// quadrics `2 z_i^2 - z_{i+1} z_{i+4} + 4 z_{i+2} z_{i+3}`.
    pub overlap: u64,
}

fn on_pentagon_ideal(z: &ProjectivePoint) -> bool {
    let c = z.coords();
    (0..5).all(|i| (c[i] * c[(i + 2) % 5]).is_zero())
}

fn on_e2_ideal(z: &ProjectivePoint) -> bool {
    let c = z.coords();
    let p = c[0].modulus();
    (0..5).all(|i| {
        let q = p.elem(2) * c[i] * c[i] - c[(i + 1) % 5] * c[(i + 4) % 5] + p.elem(4) * c[(i + 2) % 5] * c[(i + 3) % 5];
        q.is_zero()
    })
}

/// Splits the rank-deficient points of a sweep and checks the genus-one part
/// against the Weierstrass count.
pub fn rank3_split(outcome: &SweepOutcome) -> Result<Rank3Split> {
    let p = PrimeModulus::good(outcome.p)?;
    let pts = &outcome.rank_deficient;
    let pentagon = pts.iter().filter(|z| z.zero_count() >= 3).count() as u64;
    let overlap = pts.iter().filter(|z| on_pentagon_ideal(z) && on_e2_ideal(z)).count() as u64;
    let split = Rank3Split { total: pts.len() as u64, pentagon, e2_component: pts.len() as u64 - pentagon, overlap };
    let mismatch = |detail: String| Error::ComponentMismatch { p: p.get(), detail };
    if let Some(z) = pts.iter().find(|z| !on_pentagon_ideal(z) && !on_e2_ideal(z)) {
        return Err(mismatch(format!("{z} is on neither component")));
    }
    if let Some(z) = pts.iter().find(|z| (z.zero_count() >= 3) != on_pentagon_ideal(z)) {
        return Err(mismatch(format!("{z} breaks the pentagon characterization")));
    }
    let expected = p.get() as i64 + 1 - e2_trace(p)?;
    if overlap == 0 && split.e2_component as i64 != expected {
        return Err(mismatch(format!("genus-one component has {} points, Weierstrass model {expected}", split.e2_component)));
    }
    Ok(split)
}

/// `#X'(F_p)`.
pub fn count_xprime(p: PrimeModulus) -> Result<u64> {
    Ok(sweep(p, default_parts())?.xprime)
}

pub fn count_rank3(p: PrimeModulus) -> Result<Rank3Split> {
    rank3_split(&sweep(p, default_parts())?)
}

/// Rational nodes per class, and how many of them have split rulings.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodeTally {
    pub defined: BTreeMap<String, u64>,
    pub split: BTreeMap<String, u64>,
}

impl NodeTally {
    pub fn total_defined(&self) -> u64 {
        self.defined.values().sum()
    }

    pub fn total_split(&self) -> u64 {
        self.split.values().sum()
    }

    fn from_census(nodes: &[NodeRecord]) -> Self {
        let mut tally = Self::empty();
        for n in nodes {
            *tally.defined.get_mut(n.orbit_class.name()).expect("all classes present") += 1;
            if n.disc_class == DiscClass::Square {
                *tally.split.get_mut(n.orbit_class.name()).expect("all classes present") += 1;
            }
        }
        tally
    }

    fn empty() -> Self {
        let zeroes: BTreeMap<String, u64> = NodeClass::ALL.iter().map(|c| (c.name().to_string(), 0)).collect();
        Self { defined: zeroes.clone(), split: zeroes }
    }

    /// Prediction from `p mod 5` and the square class of 5: the Heisenberg
    /// orbits of size 25 and 5 are rational only when a fifth root of unity
    /// is, and only the tau-node rulings depend on `sqrt(5)`.
    pub fn predicted(p: PrimeModulus) -> Self {
        let full = p.get() % 5 == 1;
        let five_square = p.elem(5).legendre() == 1;
        let mut tally = Self::empty();
        for class in NodeClass::ALL {
            let defined = match (class, full) {
                (NodeClass::Sigma1 | NodeClass::Sigma2, _) => 5,
                (NodeClass::Tau, true) => 5,
                (NodeClass::Tau, false) => 1,
                (_, true) => 25,
                (_, false) => 5,
            };
            let split = if class == NodeClass::Tau && !five_square { 0 } else { defined };
            tally.defined.insert(class.name().to_string(), defined);
            tally.split.insert(class.name().to_string(), split);
        }
        tally
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodeContribution {
    pub tally: NodeTally,
    pub value: u64,
}

/// Sums the per-node contributions of a census after checking it against
/// the residue-class prediction.
pub fn node_contribution_from(nodes: &[NodeRecord], p: PrimeModulus, policy: ContributionPolicy) -> Result<NodeContribution> {
    let tally = NodeTally::from_census(nodes);
    let predicted = NodeTally::predicted(p);
    if tally != predicted {
        return Err(Error::CensusMismatch {
            p: p.get(),
            detail: format!("census {:?}/{:?}, predicted {:?}/{:?}", tally.defined, tally.split, predicted.defined, predicted.split),
        });
    }
    let split = tally.total_split();
    let value = split * policy.per_node(p.get(), true) + (tally.total_defined() - split) * policy.per_node(p.get(), false);
    Ok(NodeContribution { tally, value })
}

pub fn node_contribution(p: PrimeModulus, policy: ContributionPolicy) -> Result<NodeContribution> {
    let p = PrimeModulus::good(p.get())?;
    let outcome = sweep(p, default_parts())?;
    node_contribution_from(&census_from_sweep(&outcome, &Realization::new(p)?)?, p, policy)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountResult {
    pub p: u64,
    pub n_xprime: u64,
    pub n_rank3: Rank3Split,
    pub n_nodes_defined: BTreeMap<String, u64>,
    pub n_rulings_split: BTreeMap<String, u64>,
    pub node_contribution: u64,
    pub resolved_count: u64,
    pub policy: ContributionPolicy,
}

pub fn resolved_from_sweep(outcome: &SweepOutcome, policy: ContributionPolicy) -> Result<CountResult> {
    let p = PrimeModulus::good(outcome.p)?;
    let n_rank3 = rank3_split(outcome)?;
    let nodes = census_from_sweep(outcome, &Realization::new(p)?)?;
    let contribution = node_contribution_from(&nodes, p, policy)?;
    Ok(CountResult {
        p: p.get(),
        n_xprime: outcome.xprime,
        n_rank3,
        node_contribution: contribution.value,
        resolved_count: outcome.xprime + p.get() * n_rank3.total + contribution.value,
        n_nodes_defined: contribution.tally.defined,
        n_rulings_split: contribution.tally.split,
        policy,
    })
}

/// `#X^(F_p)` under the given node policy.
pub fn resolved_count(p: PrimeModulus, policy: ContributionPolicy) -> Result<CountResult> {
    resolved_count_with(p, policy, default_parts())
}

pub fn resolved_count_with(p: PrimeModulus, policy: ContributionPolicy, parts: usize) -> Result<CountResult> {
    resolved_from_sweep(&sweep(p, parts)?, policy)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(p: u64) -> PrimeModulus {
        PrimeModulus::new(p).unwrap()
    }

    #[test]
    fn per_node_rules() {
        assert_eq!(ContributionPolicy::Quadric.per_node(31, true), 31 * 31 + 62);
        assert_eq!(ContributionPolicy::Prose.per_node(31, true), 31 * 31 + 31);
        assert_eq!(ContributionPolicy::Prose.per_node(37, false), 37 * 37);
        assert_eq!("paper".parse::<ContributionPolicy>(), Ok(ContributionPolicy::Quadric));
        assert_eq!("naive".parse::<ContributionPolicy>(), Ok(ContributionPolicy::Prose));
        assert!("full".parse::<ContributionPolicy>().is_err());
    }

    #[test]
    fn prose_contributions_from_rules() {
        // 65 split nodes at 31, one non-split tau-node at 37, all split at 29
        let c = |p| node_contribution(m(p), ContributionPolicy::Prose).unwrap().value;
        assert_eq!(c(31), 65 * (31 * 31 + 31));
        assert_eq!(c(37), 20 * (37 * 37 + 37) + 37 * 37);
        assert_eq!(c(29), 21 * (29 * 29 + 29));
    }

    #[test]
    fn pentagon_at_31() {
        let s = count_rank3(m(31)).unwrap();
        // five lines of 32 points sharing five vertices
        assert_eq!(s.pentagon, 5 * 32 - 5);
        assert_eq!(s.e2_component, 25);
        assert_eq!(s.overlap, 0);
    }

    #[test]
    fn census_mismatch_is_reported() {
        let p = m(13);
        let outcome = sweep(p, 2).unwrap();
        let mut nodes = census_from_sweep(&outcome, &Realization::new(p).unwrap()).unwrap();
        nodes.pop();
        assert!(matches!(node_contribution_from(&nodes, p, ContributionPolicy::Quadric), Err(Error::CensusMismatch { .. })));
    }

    #[test]
    fn resolved_count_invariants() {
        let r = resolved_count(m(13), ContributionPolicy::Quadric).unwrap();
        assert_eq!(r.resolved_count, r.n_xprime + 13 * r.n_rank3.total + r.node_contribution);
        assert!(r.n_xprime >= r.n_rank3.total && r.n_rank3.total >= r.n_rank3.e2_component);
    }
}
