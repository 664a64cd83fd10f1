//! End-to-end acceptance run. Prints one line per criterion and exits
//! nonzero if any binding criterion fails.

use std::collections::BTreeMap;
use std::process::ExitCode;
use std::time::Instant;

use hmquintic::cohomology::{self, TraceRow, B3};
use hmquintic::counting::{self, CountResult};
use hmquintic::data::{GroupTag, ModularFormTable, NumberFieldTable};
use hmquintic::ff::{factor_degrees, primitive_fifth_roots};
use hmquintic::galois::{self, SerreSchuettConfig, SourceLabel, TraceSource, Verdict};
use hmquintic::heisenberg::Realization;
use hmquintic::hmq::census::census_from_sweep;
use hmquintic::hmq::{self, DiscClass, NodeClass, NodeRecord, SymmetricParameter, Variety, E2};
use hmquintic::sweep::{default_parts, sweep, SweepOutcome};
use hmquintic::{Fp, IntPolynomial, PrimeModulus, Rational};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

const TABLE_PRIMES: [u64; 7] = [29, 31, 37, 43, 47, 59, 83];
const TABLE_COUNTS: [u64; 7] = [53120, 110010, 97310, 142210, 177770, 322490, 800690];
const TABLE_TRACES: [i64; 7] = [-165, -83, 1, -8, 126, -290, 842];

type Outcome = std::result::Result<String, String>;

fn m(p: u64) -> PrimeModulus {
    PrimeModulus::good(p).unwrap()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

/// Euler's criterion with plain integers.
fn is_square_mod(a: i64, p: u64) -> bool {
    let a = a.rem_euclid(p as i64) as u128;
    let (mut base, mut exp, mut acc) = (a, (p - 1) / 2, 1u128);
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % p as u128;
        }
        base = base * base % p as u128;
        exp >>= 1;
    }
    acc == 1
}

/// `#E2(F_p)` by listing every affine pair, projective point included.
fn e2_count_by_pairs(p: u64) -> u64 {
    let a = E2.a.rem_euclid(p as i128) as u64;
    let b = E2.b.rem_euclid(p as i128) as u64;
    let mut n = 1;
    for x in 0..p {
        let rhs = (x * x % p * x + a * x + b) % p;
        n += (0..p).filter(|y| y * y % p == rhs).count() as u64;
    }
    n
}

struct Run {
    sweeps: BTreeMap<u64, SweepOutcome>,
    counts: BTreeMap<u64, CountResult>,
    rows: BTreeMap<u64, TraceRow>,
}

fn crit1(run: &mut Run) -> Outcome {
    let t = Instant::now();
    let mut got = Vec::new();
    for (&p, &want) in TABLE_PRIMES.iter().zip(&TABLE_COUNTS) {
        let outcome = sweep(m(p), default_parts()).map_err(|e| e.to_string())?;
        let r = counting::resolved_from_sweep(&outcome, counting::ContributionPolicy::Quadric).map_err(|e| e.to_string())?;
        ensure(r.resolved_count == want, || format!("p = {p}: {} != {want}", r.resolved_count))?;
        got.push(r.resolved_count);
        run.sweeps.insert(p, outcome);
        run.counts.insert(p, r);
    }
    Ok(format!("{got:?} in {:.1}s", t.elapsed().as_secs_f64()))
}

fn crit2(run: &mut Run) -> Outcome {
    let form = ModularFormTable::builtin();
    for (&p, &want) in TABLE_PRIMES.iter().zip(&TABLE_TRACES) {
        let n = run.counts.get(&p).ok_or("requires criterion 1")?.resolved_count;
        let a_e2 = hmq::e2_trace(m(p)).map_err(|e| e.to_string())?;
        let row = cohomology::trace_pipeline(m(p), n, a_e2, form.a_p(p), None).map_err(|e| e.to_string())?;
        ensure(row.tr_v == want && row.matched == Some(true), || format!("p = {p}: trV {} (want {want})", row.tr_v))?;
        run.rows.insert(p, row);
    }
    Ok(format!("trV = {:?}", run.rows.values().map(|r| r.tr_v).collect::<Vec<_>>()))
}

fn crit3(run: &Run) -> Outcome {
    let s = cohomology::solve_b2(m(31), 110010).map_err(|e| e.to_string())?;
    ensure((s.b2, s.b3) == (81, 4), || format!("b2, b3 = {}, {}", s.b2, s.b3))?;
    for h in [80, 82] {
        ensure(s.witnesses.iter().any(|w| w.h == h), || format!("h = {h} not recorded as rejected"))?;
    }
    let mut hs = Vec::new();
    for &p in TABLE_PRIMES.iter().filter(|&&p| p % 10 != 1) {
        let n = run.counts.get(&p).ok_or("requires criterion 1")?.resolved_count;
        let h = cohomology::solve_h(m(p), n, B3).map_err(|e| e.to_string())?;
        ensure(h == 33, || format!("h = {h} at {p}"))?;
        hs.push((p, h));
    }
    Ok(format!("b2 = 81, b3 = 4 (80 and 82 rejected); h = 33 at {:?}", hs.iter().map(|x| x.0).collect::<Vec<_>>()))
}

fn census_at(run: &mut Run, p: u64) -> std::result::Result<Vec<NodeRecord>, String> {
    if !run.sweeps.contains_key(&p) {
        run.sweeps.insert(p, sweep(m(p), default_parts()).map_err(|e| e.to_string())?);
    }
    let real = Realization::new(m(p)).map_err(|e| e.to_string())?;
    census_from_sweep(&run.sweeps[&p], &real).map_err(|e| e.to_string())
}

fn crit4(run: &mut Run) -> Outcome {
    let t = Instant::now();
    let mut summary = Vec::new();
    for (p, want) in [(13, 21), (29, 21), (31, 65), (37, 21), (41, 65), (43, 21)] {
        let nodes = census_at(run, p)?;
        ensure(nodes.len() == want, || format!("{} nodes at {p}, want {want}", nodes.len()))?;
        // tau's cone is a square class exactly when 5 is a square mod p
        let tau_want = if is_square_mod(5, p) { DiscClass::Square } else { DiscClass::Nonsquare };
        for n in &nodes {
            ensure(n.cone_rank == 4, || format!("rank {} cone at {}", n.cone_rank, n.point))?;
            let want_disc = if n.orbit_class == NodeClass::Tau { tau_want } else { DiscClass::Square };
            ensure(n.disc_class == want_disc, || format!("{} at {p}: {:?}", n.orbit_class.name(), n.disc_class))?;
        }
        summary.push(format!("{p}:{}{}", nodes.len(), if tau_want == DiscClass::Square { "" } else { "(tau nonsquare)" }));
    }
    Ok(format!("{} in {:.1}s", summary.join(" "), t.elapsed().as_secs_f64()))
}

fn crit5(run: &Run) -> Outcome {
    for (p, want) in [(29, 5), (31, 7)] {
        let oracle = p as i64 + 1 - e2_count_by_pairs(p) as i64;
        let a = hmq::e2_trace(m(p)).map_err(|e| e.to_string())?;
        ensure(a == want && oracle == want, || format!("a_{p}(E2) = {a}, pair count gives {oracle}, want {want}"))?;
    }
    let mut aps = Vec::new();
    for &p in &TABLE_PRIMES {
        let r = run.rows.get(&p).ok_or("requires criterion 2")?;
        let oracle = p as i64 + 1 - e2_count_by_pairs(p) as i64;
        ensure(r.a_p_e2 == oracle, || format!("a_{p}(E2) = {} vs pair count {oracle}", r.a_p_e2))?;
        ensure(r.tr_h3 == r.tr_v + p as i64 * r.a_p_e2, || format!("split fails at {p}"))?;
        ensure(run.counts[&p].n_rank3.e2_component as i64 == p as i64 + 1 - oracle, || format!("rank-3 genus-one part at {p}"))?;
        aps.push(r.a_p_e2);
    }
    Ok(format!("a_p(E2) = {aps:?}; trH3 = trV + p a_p at all seven primes"))
}

fn crit6(run: &Run) -> Outcome {
    let t = Instant::now();
    let fields = NumberFieldTable::builtin();
    let cubic = IntPolynomial::new(vec![-8, 2, 0, 1]).unwrap();
    for p in [29, 31, 37] {
        ensure(factor_degrees(&cubic, m(p)).unwrap() == [3], || format!("cubic splits mod {p}"))?;
    }
    let geo = TraceSource::new(SourceLabel::Geometric, run.rows.values().map(|r| (r.p, r.tr_v)));
    let form = TraceSource::new(SourceLabel::ModularForm, TABLE_PRIMES.iter().copied().zip(TABLE_TRACES));
    let cert = galois::run_serre_schuett(&geo, &form, &fields, &SerreSchuettConfig::default()).map_err(|e| e.to_string())?;
    ensure(cert.verdict == Verdict::Isomorphic, || format!("verdict {:?} at {:?}", cert.verdict, cert.failing_step))?;
    ensure(cert.replay().unwrap_or(false), || "certificate replay failed".into())?;

    let o6 = cert.order6.as_ref().ok_or("no order-6 step")?;
    ensure(o6.witnesses.len() + o6.excluded.len() == 15, || "quadratic candidate count".into())?;
    ensure(o6.witnesses.values().all(|p| [29, 31, 37].contains(p)), || "quadratic witness outside 29, 31, 37".into())?;
    // the excluded class must be the cubic's own discriminant and be a square at every probe
    ensure(o6.excluded.keys().eq([-110].iter()), || format!("excluded {:?}", o6.excluded.keys()))?;
    ensure([29, 31, 37].iter().all(|&p| is_square_mod(-110, p)), || "-110 is not a square at a probe".into())?;
    ensure(cubic.cubic_discriminant() == Some(-1760), || "cubic discriminant".into())?;

    let o4 = cert.order4_witnesses.as_ref().ok_or("no order-4 step")?;
    ensure(o4.len() == 15 && fields.with_tag(GroupTag::S4).len() == 15, || "quartic count".into())?;
    ensure(o4.values().all(|w| [43, 47, 59, 83].contains(&w.prime)), || "quartic witness outside 43..83".into())?;

    let g = cert.group.as_ref().ok_or("no group step")?;
    ensure(g.order == 48 && g.isomorphic_to_s4_x_c2, || "group structure".into())?;
    ensure(g.tau_support_orders.iter().all(|&o| o > 3), || format!("tau support {:?}", g.tau_support_orders))?;
    let secs = t.elapsed().as_secs_f64();
    ensure(secs < 1.0, || format!("took {secs:.2}s"))?;
    Ok(format!(
        "cubic inert at 29/31/37; 14 quadratic candidates killed, d = -110 (the cubic's discriminant class) excluded; 15 quartics killed; |G~| = 48; isomorphic ({:.0} ms)",
        secs * 1e3
    ))
}

fn random_point(rng: &mut StdRng, p: PrimeModulus) -> Vec<Fp> {
    (0..5).map(|_| p.elem(rng.gen_range(0..p.get() as i64))).collect()
}

fn crit7(run: &mut Run) -> Outcome {
    let mut rng = StdRng::seed_from_u64(0x5eed);
    let primes: Vec<u64> = [13, 41].iter().chain(TABLE_PRIMES.iter()).copied().collect();
    let mut samples = 0;
    for &q in &primes {
        let p = m(q);
        let y = SymmetricParameter::STUDIED.reduce(p);
        for _ in 0..1000 {
            let (x, z) = (random_point(&mut rng, p), random_point(&mut rng, p));
            ensure(hmq::m_matrix(&y, &x).mul_vec(&z) == hmq::l_matrix(&y, &z).mul_vec(&x), || format!("bilinear identity at {q}"))?;
            samples += 1;
        }
    }

    // one scalar, fixed over Q, must serve at every prime
    let yq: Vec<Rational> = SymmetricParameter::STUDIED.coords().iter().map(|&v| Rational::from_integer(v as i128)).collect();
    let mut scalar: Option<Rational> = None;
    for _ in 0..40 {
        let x: Vec<Rational> = (0..5).map(|_| Rational::from_integer(rng.gen_range(-6..=6))).collect();
        let q = hmq::quintic_eval(Variety::X, &x);
        if q == Rational::from_integer(0) {
            continue;
        }
        let c = hmq::m_matrix(&yq, &x).det() / q;
        ensure(*scalar.get_or_insert(c) == c, || format!("ratio {c} differs from {scalar:?}"))?;
    }
    let c = scalar.ok_or("no nonzero rational sample")?;
    ensure(*c.denom() == 1, || format!("scalar {c} is not integral"))?;
    for &q in &primes {
        let p = m(q);
        let y = SymmetricParameter::STUDIED.reduce(p);
        let cp = Fp::from_i128(*c.numer(), p);
        for _ in 0..200 {
            let v = random_point(&mut rng, p);
            ensure(hmq::m_matrix(&y, &v).det() == cp * hmq::quintic_eval(Variety::X, &v), || format!("det M at {q}"))?;
            ensure(hmq::l_matrix(&y, &v).det() == cp * hmq::quintic_eval(Variety::Xprime, &v), || format!("det L at {q}"))?;
        }
    }

    for q in [31, 41] {
        let p = m(q);
        let reference = census_at(run, q)?;
        for eps in primitive_fifth_roots(p).unwrap() {
            let real = Realization::with_epsilon(p, eps).map_err(|e| e.to_string())?;
            let nodes = census_from_sweep(&run.sweeps[&q], &real).map_err(|e| e.to_string())?;
            ensure(nodes == reference, || format!("census at {q} changes with epsilon = {}", eps.value()))?;
        }
    }

    for q in [13, 31] {
        let runs: Vec<String> = [1, 4, 16]
            .iter()
            .map(|&k| serde_json::to_string(&sweep(m(q), k).unwrap()).unwrap())
            .collect();
        ensure(runs.windows(2).all(|w| w[0] == w[1]), || format!("partition dependence at {q}"))?;
    }

    let mut bounded = 0;
    for r in run.rows.values() {
        let p3 = (r.p as i128).pow(3);
        ensure((r.a_p_e2 as i128).pow(2) <= 4 * r.p as i128, || format!("Hasse at {}", r.p))?;
        ensure((r.tr_v as i128).pow(2) <= 4 * p3, || format!("Weil on V at {}", r.p))?;
        ensure((r.tr_h3 as i128).pow(2) <= (B3 as i128).pow(2) * p3, || format!("Weil on H3 at {}", r.p))?;
        bounded += 1;
    }
    ensure(bounded == 7, || "bounds require criterion 2".into())?;
    Ok(format!(
        "{samples} bilinear samples over {} primes; det M = {c} X and det L = {c} X'; census epsilon-invariant at 31, 41; partitions 1/4/16 identical; bounds hold on 7 rows",
        primes.len()
    ))
}

fn crit8() -> Outcome {
    let form = ModularFormTable::builtin();
    let mut report = Vec::new();
    for q in [3, 7, 13, 17, 19, 23] {
        let p = m(q);
        let n = counting::resolved_count(p, counting::ContributionPolicy::Quadric).map_err(|e| e.to_string())?.resolved_count;
        let a_e2 = hmq::e2_trace(p).map_err(|e| e.to_string())?;
        let h = cohomology::conjectured_h(q);
        let row = cohomology::trace_row(p, n, a_e2, form.a_p(q), Some(h)).map_err(|e| e.to_string())?;
        let verdict = match row.matched {
            Some(true) => "match".to_string(),
            Some(false) => format!("MISMATCH (a_p = {})", row.a_p_f.unwrap()),
            None => "no coefficient".to_string(),
        };
        let weil = if (row.tr_v as i128).pow(2) <= 4 * (q as i128).pow(3) { "" } else { ", outside Weil" };
        report.push(format!("p={q} h={h} trV={} {verdict}{weil}", row.tr_v));
    }
    Ok(report.join("; "))
}

fn main() -> ExitCode {
    let mut run = Run { sweeps: BTreeMap::new(), counts: BTreeMap::new(), rows: BTreeMap::new() };
    let mut failed = 0;
    let mut line = |n: u32, name: &str, binding: bool, r: Outcome| {
        let (tag, detail) = match (&r, binding) {
            (Ok(d), true) => ("PASS", d.clone()),
            (Ok(d), false) => ("REPORT", d.clone()),
            (Err(e), _) => {
                failed += 1;
                ("FAIL", e.clone())
            }
        };
        println!("criterion {n} [{tag}] {name}: {detail}");
    };
    line(1, "table reproduction", true, crit1(&mut run));
    line(2, "trace extraction", true, crit2(&mut run));
    line(3, "Betti forcing", true, crit3(&run));
    line(4, "node census", true, crit4(&mut run));
    line(5, "elliptic-curve split", true, crit5(&run));
    line(6, "elimination certificate", true, crit6(&run));
    line(7, "property suite", true, crit7(&mut run));
    line(8, "conjecture report (non-binding)", false, crit8());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criterion(s) failed");
        ExitCode::FAILURE
    }
}
