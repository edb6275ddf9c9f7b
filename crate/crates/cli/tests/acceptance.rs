//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit if any fails.

use std::collections::{BTreeMap, BTreeSet};
use std::time::Instant;

use d4ext::dtuples::{brute_force_extensions, brute_force_quadruples, c_candidates, is_regular};
use d4ext::families::{enumerate_families, first_in_scope_k, instantiate, k_bound};
use d4ext::linforms::{lambda_enclosure, proposition1_pipeline};
use d4ext::pell::{admissible_cases, find_intersections, general_cases};
use d4ext::reduction::{recheck_round, ReductionInstance};
use d4ext::{CLabel, DnPair, DnTriple};
use d4ext_cli::config::{default_workers, CampaignConfig, FamilyKey, KSample};
use d4ext_cli::record::InstanceRecord;
use d4ext_cli::{run_campaign, Report, Status};
use num_bigint::BigInt;
use num_traits::ToPrimitive;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn isqrt_u128(n: u128) -> u128 {
    let mut x = (n as f64).sqrt() as u128;
    while x * x > n {
        x -= 1;
    }
    while (x + 1) * (x + 1) <= n {
        x += 1;
    }
    x
}

fn is_square_u128(n: u128) -> bool {
    let r = isqrt_u128(n);
    r * r == n
}

fn criterion_1() -> Outcome {
    let quads = brute_force_quadruples(4, 1_000_000);
    let irregular: Vec<_> = quads.iter().filter(|q| !is_regular(q)).collect();
    outcome(
        irregular.is_empty() && !quads.is_empty(),
        format!("{} quadruples up to 10^6, {} irregular", quads.len(), irregular.len()),
    )
}

/// Near pairs with `b > 10^4` and `a <= 10^5`, spread over the families.
fn small_in_scope_pairs(count: usize) -> Vec<DnPair> {
    let catalog = enumerate_families();
    let a_max = BigInt::from(100_000);
    let mut all = Vec::new();
    for fam in &catalog.families {
        let Some(k_max) = k_bound(fam, &a_max).and_then(|k| k.to_u64()) else {
            continue;
        };
        let Some(k0) = first_in_scope_k(fam, k_max) else {
            continue;
        };
        for k in k0..=k_max {
            if let Ok(p) = instantiate(fam, &BigInt::from(k)) {
                if p.in_scope() {
                    all.push(p);
                }
            }
        }
    }
    all.sort_by(|x, y| (&x.a, &x.b).cmp(&(&y.a, &y.b)));
    all.dedup_by(|x, y| x.a == y.a && x.b == y.b);
    let step = (all.len() / count).max(1);
    all.into_iter().step_by(step).take(count).collect()
}

/// Every `c <= cap` with `ac + 4` and `bc + 4` square, through the roots of `s² ≡ 4 (mod a)`.
fn scan_extensions_of_pair(a: u128, b: u128, cap: u128) -> Vec<u128> {
    let roots: Vec<u128> = (0..a).filter(|s| (s * s) % a == 4 % a).collect();
    let s_max = isqrt_u128(a * cap + 4);
    let mut out = BTreeSet::new();
    let mut base = 0u128;
    while base <= s_max {
        for r in &roots {
            let s = base + r;
            if s > s_max || s * s < 4 + a {
                continue;
            }
            let c = (s * s - 4) / a;
            if c >= 1 && c <= cap && c != a && c != b && is_square_u128(b * c + 4) {
                out.insert(c);
            }
        }
        base += a;
    }
    out.into_iter().collect()
}

fn criterion_2() -> Outcome {
    let pairs = small_in_scope_pairs(50);
    let cap = 10_000_000u128;
    let mut mismatches = Vec::new();
    for p in &pairs {
        let got: Vec<u128> = c_candidates(p, &BigInt::from(cap))
            .expect("in-scope pair")
            .into_iter()
            .map(|(_, c)| c.to_u128().unwrap())
            .filter(|&c| c != 0)
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let want = scan_extensions_of_pair(p.a.to_u128().unwrap(), p.b.to_u128().unwrap(), cap);
        if got != want {
            mismatches.push(format!("({}, {}): {got:?} vs {want:?}", p.a, p.b));
        }
    }
    outcome(
        pairs.len() == 50 && mismatches.is_empty(),
        format!("{} pairs, {} mismatches {}", pairs.len(), mismatches.len(), mismatches.join("; ")),
    )
}

/// Twenty D(4)-triples `{a, b, c}` with `a < b < c <= 10^4`.
fn small_triples() -> Vec<DnTriple> {
    let mut out = Vec::new();
    'outer: for b in 2u64..200 {
        for a in 1..b {
            if !is_square_u128((a * b + 4) as u128) {
                continue;
            }
            let pair = DnPair::d4(a, b).unwrap();
            for (_, c) in c_candidates(&pair, &BigInt::from(10_000)).unwrap() {
                if c > BigInt::from(b) {
                    out.push(DnTriple::new(pair.clone(), c).unwrap());
                    if out.len() == 20 {
                        break 'outer;
                    }
                }
            }
        }
    }
    out
}

type Hits = Vec<(DnTriple, d4ext::IntersectionCase, u64, u64)>;

fn criterion_3() -> (Outcome, Hits) {
    let triples = small_triples();
    let mut mismatches = Vec::new();
    let mut hits = Vec::new();
    for t in &triples {
        let mut found = BTreeSet::new();
        for case in general_cases(t).unwrap() {
            for h in find_intersections(t, &case, 50).unwrap() {
                if let Some(d) = h.d(t) {
                    if d > BigInt::from(0) {
                        found.insert(d);
                        hits.push((t.clone(), case.clone(), h.m, h.n));
                    }
                }
            }
        }
        let found: Vec<BigInt> = found.into_iter().collect();
        let want = brute_force_extensions(t, 1_000_000_000);
        if found != want {
            mismatches.push(format!("{:?}: {found:?} vs {want:?}", t.sorted()));
        }
    }
    let o = outcome(
        triples.len() == 20 && mismatches.is_empty(),
        format!("{} triples, {} mismatches {}", triples.len(), mismatches.len(), mismatches.join("; ")),
    );
    (o, hits)
}

fn criterion_4() -> Outcome {
    let rep = proposition1_pipeline().expect("pipeline runs");
    let parts: Vec<String> = rep
        .comparisons()
        .iter()
        .map(|c| format!("{} {} vs {} {}", c.name, c.reproduced, c.claimed, if c.ok { "ok" } else { "exceeds" }))
        .collect();
    outcome(rep.reproduces_claims(), parts.join("; "))
}

const LISTED_FAMILIES: [([i64; 3], [i64; 3]); 12] = [
    ([1, 0, -4], [1, 2, -3]),
    ([2, 0, -2], [2, 4, 0]),
    ([3, -2, -1], [3, 4, 0]),
    ([3, 2, -1], [3, 8, 4]),
    ([812, -4, 0], [812, 1620, 808]),
    ([812, 4, 0], [812, 1628, 816]),
    ([812, -228, 16], [812, 1396, 600]),
    ([812, 228, 16], [812, 1852, 1056]),
    ([812, -584, 105], [812, 1040, 333]),
    ([812, 584, 105], [812, 2208, 1501]),
    ([812, -808, 201], [812, 816, 205]),
    ([812, 808, 201], [812, 2432, 1821]),
];

fn criterion_5() -> Outcome {
    let cat = enumerate_families();
    let matched = LISTED_FAMILIES
        .iter()
        .filter(|(a, b)| {
            cat.families
                .iter()
                .any(|f| f.a_poly.coeffs_i64() == *a && f.b_poly.coeffs_i64() == *b)
        })
        .count();
    outcome(
        cat.count == 3691 && matched == 12,
        format!("{} families (expected 3691); {matched}/12 listed families match", cat.count),
    )
}

fn criterion_6(hits: &Hits) -> Outcome {
    let mut outside = Vec::new();
    for (t, case, m, n) in hits {
        let check = lambda_enclosure(t, case, *m, *n, 128).expect("enclosure");
        if !check.inside {
            outside.push(format!("{:?} {} (m, n) = ({m}, {n})", t.sorted(), case.id()));
        }
    }
    outcome(
        !hits.is_empty() && outside.is_empty(),
        format!("{} intersections, {} outside {}", hits.len(), outside.len(), outside.join("; ")),
    )
}

const CAMPAIGN_FAMILIES: [(u32, u32); 10] = [
    (1, 0),
    (2, 0),
    (3, 1),
    (3, 2),
    (812, 2),
    (812, 810),
    (812, 114),
    (812, 698),
    (812, 292),
    (812, 520),
];

fn criterion_7(dir: &std::path::Path) -> (Outcome, Report) {
    let cfg = CampaignConfig {
        family_filter: Some(CAMPAIGN_FAMILIES.iter().map(|&(m, t)| FamilyKey { m, t }).collect()),
        k_sample: KSample::Random { count: 3, seed: 2026 },
        worker_count: default_workers(),
        checkpoint_path: dir.join("acceptance.jsonl"),
        ..CampaignConfig::default()
    };
    let report = run_campaign(&cfg).expect("campaign runs");
    let mut labels: BTreeMap<(u32, u32, u64), BTreeSet<CLabel>> = BTreeMap::new();
    for r in &report.records {
        labels.entry((r.m, r.t, r.k)).or_default().insert(r.c_label);
    }
    let mut per_family: BTreeMap<(u32, u32), usize> = BTreeMap::new();
    for (m, t, _) in labels.keys() {
        *per_family.entry((*m, *t)).or_default() += 1;
    }
    let shape_ok = per_family.len() == 10
        && per_family.values().all(|&n| n == 3)
        && labels.values().all(|l| l.len() == 7);
    let regular = report
        .records
        .iter()
        .all(|r| r.extensions.iter().all(|d| d == &r.d_plus || d == &r.d_minus));
    let s = &report.summary;
    let all_verified = s.verified as usize == report.records.len() && s.discrepancy == 0 && s.undecided == 0;
    let o = outcome(
        shape_ok && regular && all_verified && !report.records.is_empty(),
        format!(
            "{} families x {:?} k, {} instances: {} verified, {} discrepancy, {} undecided; extensions within {{d-, d+}}: {regular}",
            per_family.len(),
            per_family.values().collect::<BTreeSet<_>>(),
            report.records.len(),
            s.verified,
            s.discrepancy,
            s.undecided
        ),
    );
    (o, report)
}

fn audit_record(r: &InstanceRecord) -> Result<(), String> {
    let t = DnTriple::d4(r.a.clone(), r.b.clone(), r.c.clone()).map_err(|e| e.to_string())?;
    let case = admissible_cases(&t, r.c_label)
        .map_err(|e| e.to_string())?
        .into_iter()
        .find(|c| c.id() == r.case)
        .ok_or("case not found")?;
    let inst = ReductionInstance::new(&t, &case);
    let out = inst.reduce().map_err(|e| e.to_string())?;
    if out.rounds.is_empty() {
        return Err("no reduction round".into());
    }
    for round in &out.rounds {
        if !recheck_round(&inst, round).map_err(|e| e.to_string())? {
            return Err(format!("round with q = {} does not recheck", round.q));
        }
    }
    let m_bound = r.m_bound.clone().ok_or("no m bound")?;
    let reduced = r.reduced_bound.clone().ok_or("no reduced bound")?;
    for h in find_intersections(&t, &case, 1000).map_err(|e| e.to_string())? {
        if BigInt::from(h.m) > m_bound || (r.form == "lf2" && BigInt::from(h.n) > reduced) {
            return Err(format!("solution (m, n) = ({}, {}) above the bound", h.m, h.n));
        }
    }
    Ok(())
}

fn criterion_8(report: &Report) -> Outcome {
    let failures: Vec<String> = report
        .records
        .iter()
        .filter_map(|r| audit_record(r).err().map(|e| format!("{}:{} k={} {} {}: {e}", r.m, r.t, r.k, r.c_label, r.case)))
        .collect();
    let flagged = report.records.iter().filter(|r| !r.certificates_rechecked || r.status != Status::Verified).count();
    outcome(
        !report.records.is_empty() && failures.is_empty() && flagged == 0,
        format!(
            "{} instances re-reduced, certificates rechecked, index search to 1000: {} failures {}",
            report.records.len(),
            failures.len(),
            failures.iter().take(5).cloned().collect::<Vec<_>>().join("; ")
        ),
    )
}

fn line(n: u32, o: &Outcome, started: Instant) -> bool {
    println!(
        "criterion {n}: {} ({:.1}s) {}",
        if o.pass { "PASS" } else { "FAIL" },
        started.elapsed().as_secs_f64(),
        o.detail
    );
    o.pass
}

fn main() {
    let dir = tempfile::tempdir().expect("temp dir");
    let mut results = Vec::new();

    let t = Instant::now();
    results.push(line(1, &criterion_1(), t));
    let t = Instant::now();
    results.push(line(2, &criterion_2(), t));
    let t = Instant::now();
    let (c3, hits) = criterion_3();
    results.push(line(3, &c3, t));
    let t = Instant::now();
    results.push(line(4, &criterion_4(), t));
    let t = Instant::now();
    results.push(line(5, &criterion_5(), t));
    let t = Instant::now();
    results.push(line(6, &criterion_6(&hits), t));
    let t = Instant::now();
    let (c7, report) = criterion_7(dir.path());
    results.push(line(7, &c7, t));
    let t = Instant::now();
    results.push(line(8, &criterion_8(&report), t));

    let passed = results.iter().filter(|&&p| p).count();
    println!("acceptance: {passed}/{} criteria pass", results.len());
    if passed != results.len() {
        std::process::exit(1);
    }
}
