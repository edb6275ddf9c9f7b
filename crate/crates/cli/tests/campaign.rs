use std::fs;

use d4ext::dtuples::{campaign_c_list, d_plus_minus};
use d4ext::families::{first_in_scope_k, instantiate};
use d4ext::{DnTriple, ParametricFamily};
use d4ext_cli::campaign::run_campaign_limited;
use d4ext_cli::config::{CampaignConfig, FamilyKey, KSample};
use d4ext_cli::{run_campaign, Report, Status};
use num_bigint::BigInt;

fn config(dir: &std::path::Path, families: &[(u32, u32)], k_sample: KSample) -> CampaignConfig {
    CampaignConfig {
        a_max: 20_000_000_000,
        family_filter: Some(families.iter().map(|&(m, t)| FamilyKey { m, t }).collect()),
        k_sample,
        worker_count: 3,
        checkpoint_path: dir.join("cp.jsonl"),
        ..CampaignConfig::default()
    }
}

/// Report contents that do not depend on timing.
fn stable(r: &Report) -> (Vec<d4ext_cli::InstanceRecord>, u64, u64, u64) {
    let recs = r
        .records
        .iter()
        .cloned()
        .map(|mut x| {
            x.time_ms = 0;
            x
        })
        .collect();
    (recs, r.summary.verified, r.summary.discrepancy, r.summary.undecided)
}

#[test]
fn three_families_all_verified() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), &[(1, 0), (7, 2), (300, 2)], KSample::Random { count: 2, seed: 11 });
    let report = run_campaign(&cfg).unwrap();
    assert!(!report.records.is_empty());
    assert_eq!(report.summary.verified as usize, report.records.len());
    assert_eq!(report.summary.exit_code(), 0);
    assert!(report.records.windows(2).all(|w| w[0].key() < w[1].key()));
}

#[test]
fn single_family_extensions_are_d_plus_and_positive_d_minus() {
    let dir = tempfile::tempdir().unwrap();
    let fam = ParametricFamily::new(1, 0).unwrap();
    let k = first_in_scope_k(&fam, 10_000).unwrap() + 100;
    let pair = instantiate(&fam, &BigInt::from(k)).unwrap();
    let a_max = fam.a(&BigInt::from(k)).try_into().unwrap();
    let mut cfg = config(dir.path(), &[(1, 0)], KSample::All);
    cfg.a_max = a_max;
    let report = run_campaign(&cfg).unwrap();
    let k_max = report.records.iter().map(|r| r.k).max().unwrap();
    assert_eq!(k_max, k);
    for (label, c) in campaign_c_list(&pair).unwrap() {
        let triple = DnTriple::new(pair.clone(), c.clone()).unwrap();
        let (dp, dm) = d_plus_minus(&triple).unwrap();
        let mut want = vec![dp];
        if dm > BigInt::from(0) {
            want.push(dm);
        }
        want.sort();
        let mut got: Vec<BigInt> = report
            .records
            .iter()
            .filter(|r| r.k == k && r.c_label == label)
            .flat_map(|r| r.extensions.clone())
            .collect();
        got.sort();
        got.dedup();
        assert_eq!(got, want, "{label}");
    }
}

#[test]
fn empty_selection_is_an_empty_success() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = config(dir.path(), &[(812, 2)], KSample::All);
    cfg.a_max = 1000;
    let report = run_campaign(&cfg).unwrap();
    assert!(report.records.is_empty());
    assert_eq!(report.summary.exit_code(), 0);
}

#[test]
fn interrupted_campaign_resumes_to_the_same_report() {
    let dir = tempfile::tempdir().unwrap();
    let families = [(1, 0), (2, 0)];
    let how = KSample::Random { count: 2, seed: 5 };

    let full_dir = dir.path().join("full");
    let full = run_campaign(&config(&full_dir, &families, how)).unwrap();

    let cfg = config(&dir.path().join("resumed"), &families, how);
    let partial = run_campaign_limited(&cfg, Some(10)).unwrap();
    assert_eq!(partial.records.len(), 10);
    // Simulate a kill mid-write: a torn last line.
    let mut text = fs::read_to_string(&cfg.checkpoint_path).unwrap();
    text.push_str("{\"m\":1,\"t\":0,\"k\":\"12");
    fs::write(&cfg.checkpoint_path, text).unwrap();

    let resumed = run_campaign(&cfg).unwrap();
    assert_eq!(stable(&resumed), stable(&full));
    assert_eq!(resumed.config_echo.k_sample, full.config_echo.k_sample);
    let lines = fs::read_to_string(&cfg.checkpoint_path).unwrap().lines().count();
    assert_eq!(lines, full.records.len());

    // A second restart has nothing left to do and reproduces the report.
    let again = run_campaign(&cfg).unwrap();
    assert_eq!(stable(&again), stable(&full));
    assert_eq!(
        fs::read_to_string(&cfg.checkpoint_path).unwrap().lines().count(),
        full.records.len()
    );
}

#[test]
fn checkpoint_records_outside_the_selection_are_ignored() {
    let dir = tempfile::tempdir().unwrap();
    let how = KSample::Random { count: 1, seed: 3 };
    let wide = run_campaign(&config(dir.path(), &[(1, 0), (2, 0)], how)).unwrap();
    let narrow = run_campaign(&config(dir.path(), &[(2, 0)], how)).unwrap();
    assert!(narrow.records.iter().all(|r| (r.m, r.t) == (2, 0)));
    assert_eq!(
        narrow.records.len(),
        wide.records.iter().filter(|r| (r.m, r.t) == (2, 0)).count()
    );
    assert!(narrow.records.iter().all(|r| r.status == Status::Verified));
}

#[test]
fn unwritable_checkpoint_is_an_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    fs::write(&blocker, "x").unwrap();
    let mut cfg = config(dir.path(), &[(1, 0)], KSample::Random { count: 1, seed: 1 });
    cfg.checkpoint_path = blocker.join("cp.jsonl");
    assert!(matches!(run_campaign(&cfg), Err(d4ext_cli::CliError::Io(_))));
}
