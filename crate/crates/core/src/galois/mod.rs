//! 2-adic comparison of the geometric representation on `V` with the one
//! attached to the weight-4 form, by eliminating every candidate field
//! through which a deviation could factor.
//!
//! The steps, in order: odd traces at the parity probes pin the residual
//! `S_3` field; quadratic twists (order-6 elements) and `S_4` extensions
//! (order-4 elements) are each killed by a probe prime where the defining
//! polynomial stays irreducible; traces must then agree on the final set.

pub mod group;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::data::{GroupTag, NumberFieldEntry, NumberFieldTable};
use crate::error::{Error, Result};
use crate::ff::{factor_degrees, IntPolynomial, PrimeModulus, BAD_PRIMES};
pub use group::{tilde_group_check, GroupReport};

pub const PARITY_PROBES: [u64; 3] = [29, 31, 37];
pub const QUARTIC_PROBES: [u64; 4] = [43, 47, 59, 83];
pub const TRACE_SET: [u64; 7] = [29, 31, 37, 43, 47, 59, 83];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SourceLabel {
    Geometric,
    ModularForm,
}

impl SourceLabel {
    pub fn name(self) -> &'static str {
        match self {
            Self::Geometric => "geometric",
            Self::ModularForm => "modular_form",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceSource {
    pub label: SourceLabel,
    pub values: BTreeMap<u64, i64>,
}

impl TraceSource {
    pub fn new(label: SourceLabel, values: impl IntoIterator<Item = (u64, i64)>) -> Self {
        Self { label, values: values.into_iter().collect() }
    }

    pub fn get(&self, p: u64) -> Result<i64> {
        self.values.get(&p).copied().ok_or_else(|| Error::MissingTrace { p, source_label: self.label.name().into() })
    }
}

/// True iff both sources are odd and equal at every probe.
pub fn parity_check(a: &TraceSource, b: &TraceSource, probes: &[u64]) -> Result<bool> {
    let mut ok = true;
    for &p in probes {
        let (x, y) = (a.get(p)?, b.get(p)?);
        ok &= x % 2 != 0 && y % 2 != 0 && x == y;
    }
    Ok(ok)
}

/// Squarefree part of a nonzero integer, sign kept.
pub fn squarefree_part(n: i128) -> i128 {
    assert!(n != 0);
    let mut m = n.abs();
    let mut out = 1;
    let mut d = 2;
    while d * d <= m {
        let mut e = 0;
        while m % d == 0 {
            m /= d;
            e += 1;
        }
        if e % 2 == 1 {
            out *= d;
        }
        d += 1;
    }
    out * m * n.signum()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResidualField {
    pub label: String,
    pub polynomial: String,
    /// Factorization pattern at each probe; `[3]` means Frobenius has order 3.
    pub probe_patterns: BTreeMap<u64, Vec<usize>>,
    pub discriminant: i128,
    /// Square class of the discriminant: the quadratic subfield is `Q(sqrt d)`.
    pub quadratic_subfield_d: i128,
}

/// The unique cubic field whose Frobenius has order 3 at every probe.
pub fn residual_field(fields: &NumberFieldTable, probes: &[u64]) -> Result<ResidualField> {
    let mut hits = Vec::new();
    for entry in fields.with_tag(GroupTag::S3) {
        let mut patterns = BTreeMap::new();
        let mut all_inert = true;
        for &p in probes {
            let pm = PrimeModulus::good(p)?;
            match factor_degrees(&entry.defining_polynomial, pm) {
                Ok(d) => {
                    all_inert &= d == [3];
                    patterns.insert(p, d);
                }
                Err(Error::Ramified { .. }) => all_inert = false,
                Err(e) => return Err(e),
            }
        }
        if all_inert {
            let disc = entry.defining_polynomial.cubic_discriminant().expect("cubic");
            hits.push(ResidualField {
                label: entry.label.clone(),
                polynomial: entry.defining_polynomial.to_string(),
                probe_patterns: patterns,
                discriminant: disc,
                quadratic_subfield_d: squarefree_part(disc),
            });
        }
    }
    match hits.len() {
        0 => Err(Error::NoField),
        1 => Ok(hits.pop().expect("one hit")),
        _ => Err(Error::MultipleFields(hits.into_iter().map(|h| h.label).collect())),
    }
}

/// All squarefree `d != 1` supported on `{-1, 2, 5, 11}`, ascending.
pub fn quadratic_candidates() -> Vec<i64> {
    let gens = [-1i64, 2, 5, 11];
    let mut out: Vec<i64> = (1u32..16)
        .map(|mask| (0..4).filter(|k| mask >> k & 1 == 1).map(|k| gens[k]).product())
        .collect();
    out.sort();
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Order6Elimination {
    /// `d` -> least probe at which `x^2 - d` is irreducible.
    pub witnesses: BTreeMap<i64, u64>,
    /// `d` -> reason it is not a candidate.
    pub excluded: BTreeMap<i64, String>,
}

/// Kills every quadratic twist `K(sqrt d)`. The quadratic subfield of `K`
/// itself is excluded: its compositum with `K` is `K`, not an `S_3 x C_2`
/// extension.
pub fn eliminate_order6(probes: &[u64], resolvent_d: Option<i64>) -> Result<Order6Elimination> {
    let mut out = Order6Elimination { witnesses: BTreeMap::new(), excluded: BTreeMap::new() };
    for d in quadratic_candidates() {
        if Some(d) == resolvent_d {
            out.excluded.insert(d, "quadratic subfield of the residual cubic field".into());
            continue;
        }
        let mut killer = None;
        for &p in probes.iter().collect::<std::collections::BTreeSet<_>>() {
            if PrimeModulus::good(p)?.elem(d).legendre() == -1 {
                killer = Some(p);
                break;
            }
        }
        match killer {
            Some(p) => {
                out.witnesses.insert(d, p);
            }
            None => return Err(Error::EliminationGap(format!("x^2 - ({d})"))),
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuarticWitness {
    pub polynomial: String,
    pub prime: u64,
    /// Probes skipped because the polynomial is not squarefree there.
    pub ramified_probes: Vec<u64>,
}

/// Least probe prime at which each `S_4` quartic is irreducible.
pub fn eliminate_order4(quartics: &[&NumberFieldEntry], probes: &[u64]) -> Result<BTreeMap<String, QuarticWitness>> {
    let mut sorted = probes.to_vec();
    sorted.sort();
    let mut out = BTreeMap::new();
    for entry in quartics {
        let f = &entry.defining_polynomial;
        let mut ramified = Vec::new();
        let mut killer = None;
        for &p in &sorted {
            match factor_degrees(f, PrimeModulus::good(p)?) {
                Ok(d) if d == [4] => {
                    killer = Some(p);
                    break;
                }
                Ok(_) => {}
                Err(Error::Ramified { .. }) => ramified.push(p),
                Err(e) => return Err(e),
            }
        }
        let prime = killer.ok_or_else(|| Error::EliminationGap(f.to_string()))?;
        out.insert(entry.label.clone(), QuarticWitness { polynomial: f.to_string(), prime, ramified_probes: ramified });
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SerreSchuettConfig {
    pub parity_probes: Vec<u64>,
    pub quartic_probes: Vec<u64>,
    pub trace_set: Vec<u64>,
}

impl Default for SerreSchuettConfig {
    fn default() -> Self {
        Self { parity_probes: PARITY_PROBES.to_vec(), quartic_probes: QUARTIC_PROBES.to_vec(), trace_set: TRACE_SET.to_vec() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Isomorphic,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceComparison {
    pub geometric: i64,
    pub modular_form: i64,
    pub equal: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IsomorphismCertificate {
    pub bad_set: Vec<u64>,
    pub assumptions: Vec<String>,
    pub parity_probes: BTreeMap<u64, TraceComparison>,
    pub parity_ok: bool,
    pub residual_field: Option<ResidualField>,
    pub order6: Option<Order6Elimination>,
    pub order4_witnesses: Option<BTreeMap<String, QuarticWitness>>,
    pub group: Option<GroupReport>,
    pub final_trace_set: BTreeMap<u64, TraceComparison>,
    pub verdict: Verdict,
    pub failing_step: Option<String>,
    pub version: String,
}

impl IsomorphismCertificate {
    /// Stable pretty JSON; key order follows the struct and sorted maps.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificate serializes")
    }

    /// Re-runs `factor_degrees` on every recorded witness.
    pub fn replay(&self) -> Result<bool> {
        let mut ok = true;
        if let Some(r) = &self.residual_field {
            let f = parse_display(&r.polynomial)?;
            for &p in r.probe_patterns.keys() {
                ok &= factor_degrees(&f, PrimeModulus::good(p)?)? == [3];
            }
        }
        if let Some(o6) = &self.order6 {
            for (&d, &p) in &o6.witnesses {
                let f = IntPolynomial::new(vec![-d, 0, 1])?;
                ok &= factor_degrees(&f, PrimeModulus::good(p)?)? == [2];
            }
        }
        if let Some(o4) = &self.order4_witnesses {
            for w in o4.values() {
                ok &= factor_degrees(&parse_display(&w.polynomial)?, PrimeModulus::good(w.prime)?)? == [4];
            }
        }
        Ok(ok)
    }
}

/// Inverse of `IntPolynomial`'s `Display`, for replaying certificates.
pub fn parse_display(s: &str) -> Result<IntPolynomial> {
    let bad = || Error::InvalidPolynomial(s.to_string());
    let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let mut coeffs = vec![0i64; 8];
    let mut terms = Vec::new();
    let mut cur = String::new();
    for ch in compact.chars() {
        if (ch == '+' || ch == '-') && !cur.is_empty() {
            terms.push(std::mem::take(&mut cur));
        }
        cur.push(ch);
    }
    if !cur.is_empty() {
        terms.push(cur);
    }
    for t in terms {
        let (c, deg) = match t.find('x') {
            None => (t.parse::<i64>().map_err(|_| bad())?, 0),
            Some(pos) => {
                let head = &t[..pos];
                let c = match head {
                    "" | "+" => 1,
                    "-" => -1,
                    h => h.parse::<i64>().map_err(|_| bad())?,
                };
                let tail = &t[pos + 1..];
                let deg = if tail.is_empty() { 1 } else { tail.strip_prefix('^').ok_or_else(bad)?.parse::<usize>().map_err(|_| bad())? };
                (c, deg)
            }
        };
        *coeffs.get_mut(deg).ok_or_else(bad)? += c;
    }
    IntPolynomial::new(coeffs)
}

fn compare(a: &TraceSource, b: &TraceSource, primes: &[u64]) -> Result<BTreeMap<u64, TraceComparison>> {
    primes
        .iter()
        .map(|&p| {
            let (g, f) = (a.get(p)?, b.get(p)?);
            Ok((p, TraceComparison { geometric: g, modular_form: f, equal: g == f }))
        })
        .collect()
}

/// Runs every step and records the first failure; missing traces are an
/// error rather than a verdict.
pub fn run_serre_schuett(
    geometric: &TraceSource,
    form: &TraceSource,
    fields: &NumberFieldTable,
    config: &SerreSchuettConfig,
) -> Result<IsomorphismCertificate> {
    let parity = compare(geometric, form, &config.parity_probes)?;
    let final_set = compare(geometric, form, &config.trace_set)?;
    let mut cert = IsomorphismCertificate {
        bad_set: BAD_PRIMES.to_vec(),
        assumptions: vec!["both representations have determinant chi_2^3 (taken as given, not recomputed)".into()],
        parity_ok: parity_check(geometric, form, &config.parity_probes)?,
        parity_probes: parity,
        residual_field: None,
        order6: None,
        order4_witnesses: None,
        group: None,
        final_trace_set: final_set,
        verdict: Verdict::Inconclusive,
        failing_step: None,
        version: crate::VERSION.to_string(),
    };
    let fail = |mut c: IsomorphismCertificate, step: &str, e: Option<Error>| {
        c.failing_step = Some(match e {
            Some(e) => format!("{step}: {e}"),
            None => step.to_string(),
        });
        Ok(c)
    };
    if !cert.parity_ok {
        return fail(cert, "parity_check", None);
    }
    match residual_field(fields, &config.parity_probes) {
        Ok(r) => cert.residual_field = Some(r),
        Err(e) => return fail(cert, "residual_field", Some(e)),
    }
    let resolvent = cert.residual_field.as_ref().map(|r| r.quadratic_subfield_d as i64);
    match eliminate_order6(&config.parity_probes, resolvent) {
        Ok(o) => cert.order6 = Some(o),
        Err(e) => return fail(cert, "eliminate_order6", Some(e)),
    }
    match eliminate_order4(&fields.with_tag(GroupTag::S4), &config.quartic_probes) {
        Ok(o) => cert.order4_witnesses = Some(o),
        Err(e) => return fail(cert, "eliminate_order4", Some(e)),
    }
    match tilde_group_check() {
        Ok(g) if g.isomorphic_to_s4_x_c2 => cert.group = Some(g),
        Ok(g) => {
            cert.group = Some(g);
            return fail(cert, "tilde_group_check", None);
        }
        Err(e) => return fail(cert, "tilde_group_check", Some(e)),
    }
    // every witness prime must itself be a prime where the traces agree
    let witnessed: Vec<u64> = cert
        .order6
        .iter()
        .flat_map(|o| o.witnesses.values().copied())
        .chain(cert.order4_witnesses.iter().flat_map(|o| o.values().map(|w| w.prime)))
        .collect();
    if let Some(p) = witnessed.iter().find(|p| !cert.final_trace_set.contains_key(p)) {
        return fail(cert, &format!("witness prime {p} outside the final trace set"), None);
    }
    if cert.final_trace_set.values().any(|c| !c.equal) {
        return fail(cert, "final_trace_equality", None);
    }
    cert.verdict = Verdict::Isomorphic;
    Ok(cert)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table_sources() -> (TraceSource, TraceSource) {
        let v = [(29, -165), (31, -83), (37, 1), (43, -8), (47, 126), (59, -290), (83, 842)];
        (TraceSource::new(SourceLabel::Geometric, v), TraceSource::new(SourceLabel::ModularForm, v))
    }

    #[test]
    fn parity_examples() {
        let (g, f) = table_sources();
        assert!(parity_check(&g, &f, &PARITY_PROBES).unwrap());
        let mut even = g.clone();
        even.values.insert(31, -82);
        assert!(!parity_check(&even, &f, &PARITY_PROBES).unwrap());
        let mut other = g.clone();
        other.values.insert(31, -81);
        assert!(!parity_check(&other, &f, &PARITY_PROBES).unwrap());
    }

    #[test]
    fn cubic_field() {
        let r = residual_field(&NumberFieldTable::builtin(), &PARITY_PROBES).unwrap();
        assert_eq!(r.polynomial, "x^3 + 2x - 8");
        // -4 * 2^3 - 27 * (-8)^2
        assert_eq!(r.discriminant, -4 * 8 - 27 * 64);
        assert_eq!(r.discriminant, -1760);
        assert_eq!(r.quadratic_subfield_d, -110);
        assert!(r.probe_patterns.values().all(|d| d == &[3]));
    }

    #[test]
    fn cubic_answer_stable_under_reordering() {
        let mut t = NumberFieldTable::builtin();
        let a = residual_field(&t, &PARITY_PROBES).unwrap();
        t.entries.reverse();
        assert_eq!(residual_field(&t, &PARITY_PROBES).unwrap(), a);
    }

    #[test]
    fn quadratic_candidates_are_fifteen_nonsquares() {
        let c = quadratic_candidates();
        assert_eq!(c.len(), 15);
        assert!(!c.contains(&1));
        for d in c {
            assert_eq!(squarefree_part(d as i128), d as i128);
        }
    }

    #[test]
    fn order6_witnesses_are_minimal() {
        let o = eliminate_order6(&PARITY_PROBES, Some(-110)).unwrap();
        assert_eq!(o.witnesses.len(), 14);
        assert!(o.excluded.contains_key(&-110));
        for (&d, &w) in &o.witnesses {
            let inert = |p: u64| PrimeModulus::new(p).unwrap().elem(d).legendre() == -1;
            assert!(inert(w));
            assert!(PARITY_PROBES.iter().filter(|&&p| p < w).all(|&p| !inert(p)));
        }
    }

    #[test]
    fn resolvent_cannot_be_killed_by_odd_trace_primes() {
        assert!(matches!(eliminate_order6(&PARITY_PROBES, None), Err(Error::EliminationGap(_))));
    }

    #[test]
    fn order4_witnesses() {
        let t = NumberFieldTable::builtin();
        let quartics = t.with_tag(GroupTag::S4);
        let w = eliminate_order4(&quartics, &QUARTIC_PROBES).unwrap();
        assert_eq!(w.len(), 15);
        assert!(w.values().any(|x| x.polynomial == "x^4 - 8x - 2"));
        // one quartic is inert only at 83
        assert!(matches!(eliminate_order4(&quartics, &[43, 47, 59]), Err(Error::EliminationGap(_))));
    }

    #[test]
    fn end_to_end_and_perturbations() {
        let (g, f) = table_sources();
        let fields = NumberFieldTable::builtin();
        let cfg = SerreSchuettConfig::default();
        let cert = run_serre_schuett(&g, &f, &fields, &cfg).unwrap();
        assert_eq!(cert.verdict, Verdict::Isomorphic, "{:?}", cert.failing_step);
        assert!(cert.replay().unwrap());
        assert_eq!(cert.to_json(), run_serre_schuett(&g, &f, &fields, &cfg).unwrap().to_json());

        let mut bad = g.clone();
        bad.values.insert(59, -289);
        let c = run_serre_schuett(&bad, &f, &fields, &cfg).unwrap();
        assert_eq!(c.verdict, Verdict::Inconclusive);
        assert_eq!(c.failing_step.as_deref(), Some("final_trace_equality"));

        let mut missing = g.clone();
        missing.values.remove(&37);
        assert!(matches!(run_serre_schuett(&missing, &f, &fields, &cfg), Err(Error::MissingTrace { p: 37, .. })));
    }

    #[test]
    fn display_round_trip() {
        for e in NumberFieldTable::builtin().entries {
            assert_eq!(parse_display(&e.defining_polynomial.to_string()).unwrap(), e.defining_polynomial);
        }
    }
}
