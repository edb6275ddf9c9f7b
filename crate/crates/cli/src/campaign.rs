//! Instance selection, parallel execution and the resumable checkpoint.

use std::collections::{BTreeMap, HashSet};
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Seek, SeekFrom, Write};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::sync::mpsc;
use std::time::Instant;

use d4ext::dtuples::campaign_c_list;
use d4ext::families::{enumerate_families, first_in_scope_k, instantiate, k_bound};
use d4ext::pell::admissible_cases;
use d4ext::{DnTriple, ParametricFamily};
use log::{info, warn};
use num_bigint::BigInt;
use num_traits::ToPrimitive;
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::config::{CampaignConfig, FamilyKey, KSample};
use crate::record::{classify_extensions, process_instance, InstanceKey, InstanceRecord, InstanceSpec, Status};
use crate::report::Report;
use crate::CliError;

/// The `k` values visited for one family, ascending.
pub fn sample_k(family: &ParametricFamily, a_max: u64, how: KSample) -> Vec<u64> {
    let Some(k_max) = k_bound(family, &BigInt::from(a_max)).and_then(|k| k.to_u64()) else {
        return Vec::new();
    };
    let Some(k_min) = first_in_scope_k(family, k_max) else {
        return Vec::new();
    };
    match how {
        KSample::All => (k_min..=k_max).collect(),
        KSample::Stride { step } => (k_min..=k_max).step_by(step as usize).collect(),
        KSample::Random { count, seed } => {
            let span = k_max - k_min + 1;
            let family_seed = seed ^ (u64::from(family.m) << 32 | u64::from(family.t));
            let mut rng = ChaCha8Rng::seed_from_u64(family_seed);
            let n = count.min(span);
            let mut ks: Vec<u64> = if span <= usize::MAX as u64 {
                sample(&mut rng, span as usize, n as usize)
                    .into_iter()
                    .map(|i| k_min + i as u64)
                    .collect()
            } else {
                Vec::new()
            };
            ks.sort_unstable();
            ks
        }
    }
}

/// Every `(family, k, c_label, case)` selected by the configuration, sorted by key.
///
/// Pairs reached from more than one family are kept once, under the first family.
pub fn select_instances(config: &CampaignConfig) -> Result<Vec<InstanceSpec>, CliError> {
    let catalog = enumerate_families();
    let families: Vec<&ParametricFamily> = match &config.family_filter {
        None => catalog.families.iter().collect(),
        Some(keys) => keys
            .iter()
            .map(|k| {
                catalog
                    .get(k.m, k.t)
                    .ok_or_else(|| CliError::Usage(format!("no family {k} in the catalogue")))
            })
            .collect::<Result<_, _>>()?,
    };
    let mut seen_pairs = HashSet::new();
    let mut out = Vec::new();
    for fam in families {
        let key = FamilyKey { m: fam.m, t: fam.t };
        for k in sample_k(fam, config.a_max, config.k_sample) {
            let Ok(pair) = instantiate(fam, &BigInt::from(k)) else {
                continue;
            };
            if !seen_pairs.insert((pair.a.clone(), pair.b.clone())) {
                continue;
            }
            let list = campaign_c_list(&pair).map_err(|e| CliError::Pipeline(format!("{key} k={k}: {e}")))?;
            for (label, c) in list {
                let triple = DnTriple::new(pair.clone(), c)
                    .map_err(|e| CliError::Pipeline(format!("{key} k={k} {label}: {e}")))?;
                let cases = admissible_cases(&triple, label)
                    .map_err(|e| CliError::Pipeline(format!("{key} k={k} {label}: {e}")))?;
                for case in cases {
                    out.push(InstanceSpec {
                        family: key,
                        k,
                        label,
                        triple: triple.clone(),
                        case,
                    });
                }
            }
        }
    }
    out.sort_by_key(|s| s.key());
    Ok(out)
}

/// Append-only JSONL file of completed records.
pub struct Checkpoint {
    path: PathBuf,
    file: File,
}

impl Checkpoint {
    /// Opens or creates the file and returns the records already in it.
    ///
    /// A trailing partial line (left by an interrupted write) is truncated.
    pub fn open(path: &Path) -> Result<(Self, Vec<InstanceRecord>), CliError> {
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir).map_err(|e| io_err(path, e))?;
        }
        let mut file = OpenOptions::new()
            .read(true)
            .append(true)
            .create(true)
            .open(path)
            .map_err(|e| io_err(path, e))?;
        let mut records = Vec::new();
        let mut good_len = 0u64;
        let mut reader = BufReader::new(&file);
        let mut line = String::new();
        let mut lineno = 0;
        loop {
            line.clear();
            let n = reader.read_line(&mut line).map_err(|e| io_err(path, e))?;
            if n == 0 {
                break;
            }
            lineno += 1;
            if !line.ends_with('\n') {
                warn!("{}: dropping incomplete last line", path.display());
                break;
            }
            if !line.trim().is_empty() {
                let rec: InstanceRecord = serde_json::from_str(&line).map_err(|e| {
                    CliError::Io(format!("{}:{lineno}: corrupt checkpoint line: {e}", path.display()))
                })?;
                records.push(rec);
            }
            good_len += n as u64;
        }
        drop(reader);
        if file.metadata().map_err(|e| io_err(path, e))?.len() != good_len {
            file.set_len(good_len).map_err(|e| io_err(path, e))?;
            file.seek(SeekFrom::End(0)).map_err(|e| io_err(path, e))?;
        }
        Ok((
            Checkpoint {
                path: path.to_path_buf(),
                file,
            },
            records,
        ))
    }

    pub fn append(&mut self, rec: &InstanceRecord) -> Result<(), CliError> {
        let mut line = serde_json::to_vec(rec).map_err(|e| CliError::Io(e.to_string()))?;
        line.push(b'\n');
        self.file.write_all(&line).map_err(|e| io_err(&self.path, e))?;
        self.file.flush().map_err(|e| io_err(&self.path, e))
    }
}

fn io_err(path: &Path, e: std::io::Error) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

/// Runs every selected instance not already in the checkpoint and returns the
/// full report. On an I/O error the checkpoint keeps every record written so far.
pub fn run_campaign(config: &CampaignConfig) -> Result<Report, CliError> {
    run_campaign_limited(config, None)
}

/// As [`run_campaign`], stopping after `limit` new instances (the report then
/// covers only completed ones). Used to exercise resumption.
pub fn run_campaign_limited(config: &CampaignConfig, limit: Option<usize>) -> Result<Report, CliError> {
    config.validate()?;
    let started = Instant::now();
    let specs = select_instances(config)?;
    let (mut checkpoint, previous) = Checkpoint::open(&config.checkpoint_path)?;
    let wanted: HashSet<InstanceKey> = specs.iter().map(|s| s.key()).collect();
    let mut done: BTreeMap<InstanceKey, InstanceRecord> = previous
        .into_iter()
        .filter(|r| wanted.contains(&r.key()))
        .map(|r| (r.key(), r))
        .collect();
    let mut pending: Vec<&InstanceSpec> = specs.iter().filter(|s| !done.contains_key(&s.key())).collect();
    if let Some(n) = limit {
        pending.truncate(n);
    }
    info!(
        "{} instances selected, {} from checkpoint, {} to run on {} workers",
        specs.len(),
        done.len(),
        pending.len(),
        config.worker_count
    );

    let next = AtomicUsize::new(0);
    let abort = AtomicBool::new(false);
    let mut write_error = None;
    std::thread::scope(|scope| {
        let (tx, rx) = mpsc::channel::<InstanceRecord>();
        for _ in 0..config.worker_count.min(pending.len().max(1)) {
            let tx = tx.clone();
            let (next, abort, pending) = (&next, &abort, &pending);
            scope.spawn(move || loop {
                if abort.load(Ordering::Relaxed) {
                    break;
                }
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(spec) = pending.get(i) else { break };
                let rec = process_instance(spec, config.precision_cap_bits);
                if tx.send(rec).is_err() {
                    break;
                }
            });
        }
        drop(tx);
        // Single writer: only this thread touches the checkpoint.
        for rec in rx {
            if write_error.is_some() {
                continue;
            }
            match checkpoint.append(&rec) {
                Ok(()) => {
                    info!(
                        "{}:{} k={} {} {}: {}",
                        rec.m, rec.t, rec.k, rec.c_label, rec.case, rec.status
                    );
                    done.insert(rec.key(), rec);
                }
                Err(e) => {
                    abort.store(true, Ordering::Relaxed);
                    write_error = Some(e);
                }
            }
        }
    });
    if let Some(e) = write_error {
        return Err(e);
    }

    let records = done.into_values().map(reverify).collect();
    Ok(Report::new(config.clone(), records, started.elapsed().as_secs_f64()))
}

/// Re-checks a record's extensions before it is reported.
fn reverify(mut rec: InstanceRecord) -> InstanceRecord {
    if rec.status == Status::Verified {
        let checked = DnTriple::d4(rec.a.clone(), rec.b.clone(), rec.c.clone())
            .map_err(|e| e.to_string())
            .and_then(|t| classify_extensions(&t, &rec.extensions));
        if let Err(e) = checked {
            rec.status = Status::Discrepancy;
            rec.note = Some(format!("re-verification: {e}"));
        }
    }
    rec
}
