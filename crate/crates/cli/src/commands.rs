//! Argument parsing and subcommand dispatch.

use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use d4ext::bigarith::PRECISION_CAP_BITS;
use d4ext::dtuples::{brute_force_extensions, c_candidates, c_value, campaign_c_list, verify_dn_set};
use d4ext::families::{enumerate_families, instantiate, k_bound, locate};
use d4ext::linforms::{proposition1_pipeline, BoundChain};
use d4ext::pell::{admissible_cases, extensions_from_cases, general_cases};
use d4ext::{CLabel, DnPair, DnTriple};
use num_bigint::BigInt;
use serde_json::json;

use crate::campaign::run_campaign;
use crate::config::{CampaignConfig, FamilyKey, KSample, DEFAULT_A_MAX};
use crate::record::{process_instance, InstanceSpec};
use crate::report::{emit_records, emit_report, ReportFormat, Summary};
use crate::{CliError, EXIT_USAGE};

#[derive(Debug, Parser)]
#[command(name = "d4ext", version, about = "Extensions of D(4)-pairs: verification, reduction and campaigns")]
pub struct Cli {
    /// Log filter (error, warn, info, debug, trace)
    #[arg(long, global = true, default_value = "warn")]
    pub log_level: String,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check that every product of two elements plus n is a square
    Verify {
        #[arg(long, default_value_t = 4, allow_hyphen_values = true)]
        n: i64,
        /// Comma-separated elements
        #[arg(long, value_delimiter = ',', required = true, value_parser = parse_big)]
        elements: Vec<BigInt>,
    },
    /// Extensions d of a D(4)-triple
    Extend {
        /// a,b,c
        #[arg(long, value_parser = parse_triple)]
        triple: DnTriple,
        /// Largest d tried by the brute-force method
        #[arg(long, default_value_t = 1_000_000)]
        limit: u64,
        #[arg(long, value_enum, default_value_t = ExtendMethod::Brute)]
        method: ExtendMethod,
        /// Largest sequence index for the pell method
        #[arg(long, default_value_t = 50)]
        index_cap: u64,
    },
    /// Candidate third elements c for a pair
    CList {
        /// a,b
        #[arg(long, value_parser = parse_pair)]
        pair: DnPair,
        /// All candidates up to this value; without it, the seven campaign labels
        #[arg(long, value_parser = parse_big)]
        cap: Option<BigInt>,
    },
    /// Parametric family catalogue
    Families {
        #[command(subcommand)]
        action: FamiliesAction,
    },
    /// Re-derive the bound on a for c = c1- and compare with the asserted constants
    Bound {
        #[arg(long, value_enum, default_value_t = TextOrJson::Text)]
        format: TextOrJson,
    },
    /// Bound, reduce and search the admissible cases of one triple
    Reduce {
        /// a,b
        #[arg(long, value_parser = parse_pair)]
        pair: DnPair,
        /// c1-, c1+, ..., c4-
        #[arg(long, value_parser = parse_label)]
        label: CLabel,
        /// Restrict to one case id, e.g. ee-+-+
        #[arg(long)]
        case: Option<String>,
        #[arg(long, default_value_t = PRECISION_CAP_BITS)]
        precision_cap_bits: u32,
        /// json, jsonl or csv
        #[arg(long, default_value = "jsonl")]
        format: String,
    },
    /// Run (or resume) a sampled campaign
    Campaign(CampaignArgs),
}

#[derive(Debug, Subcommand)]
pub enum FamiliesAction {
    /// List every family
    Catalog {
        #[arg(long, value_enum, default_value_t = TextOrJson::Text)]
        format: TextOrJson,
    },
    /// The pair of one family at one k
    Instantiate {
        #[arg(long)]
        m: u32,
        #[arg(long)]
        t: u32,
        #[arg(long)]
        k: u64,
    },
    /// Largest k with a(k) <= a_max
    KBound {
        #[arg(long)]
        m: u32,
        #[arg(long)]
        t: u32,
        #[arg(long, default_value_t = DEFAULT_A_MAX)]
        a_max: u64,
    },
}

/// Flags override values read from `--config`.
#[derive(Debug, clap::Args)]
pub struct CampaignArgs {
    /// JSON file with CampaignConfig fields
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Upper limit for a [default: 655000000000]
    #[arg(long)]
    pub a_max: Option<u64>,
    /// Family M:T, repeatable [default: all families]
    #[arg(long = "family")]
    pub families: Vec<FamilyKey>,
    /// all, stride:N or random:N:SEED [default: all]
    #[arg(long)]
    pub k_sample: Option<KSample>,
    /// Working precision cap in bits [default: 1048576]
    #[arg(long)]
    pub precision_cap_bits: Option<u32>,
    /// Worker threads [default: available cores]
    #[arg(long)]
    pub workers: Option<usize>,
    /// Checkpoint file [default: $D4EXT_CHECKPOINT_DIR/d4ext-checkpoint.jsonl, else ./d4ext-checkpoint.jsonl]
    #[arg(long)]
    pub checkpoint: Option<PathBuf>,
    /// Report file [default: standard output]
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// json, jsonl or csv
    #[arg(long, default_value = "json")]
    pub format: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ExtendMethod {
    /// Scan d up to the limit
    Brute,
    /// Intersect the solution sequences of every fundamental case
    Pell,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum TextOrJson {
    Text,
    Json,
}

fn parse_big(s: &str) -> Result<BigInt, String> {
    s.trim().parse().map_err(|_| format!("'{s}' is not an integer"))
}

fn parse_list(s: &str, len: usize) -> Result<Vec<BigInt>, String> {
    let v: Vec<BigInt> = s.split(',').map(parse_big).collect::<Result<_, _>>()?;
    if v.len() != len {
        return Err(format!("expected {len} comma-separated integers, got '{s}'"));
    }
    Ok(v)
}

fn parse_pair(s: &str) -> Result<DnPair, String> {
    let v = parse_list(s, 2)?;
    DnPair::d4(v[0].clone(), v[1].clone()).map_err(|e| e.to_string())
}

fn parse_triple(s: &str) -> Result<DnTriple, String> {
    let v = parse_list(s, 3)?;
    DnTriple::d4(v[0].clone(), v[1].clone(), v[2].clone()).map_err(|e| e.to_string())
}

fn parse_label(s: &str) -> Result<CLabel, String> {
    s.parse().map_err(|e: d4ext::TupleError| e.to_string())
}

/// Parses `args` (program name first), runs the command and returns the exit code.
pub fn main_with_args<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    let _ = env_logger::Builder::new().parse_filters(&cli.log_level).try_init();
    match run(cli.command, out) {
        Ok(code) => code,
        Err(CliError::Closed) => 0,
        Err(e) => {
            let _ = writeln!(err, "d4ext: {e}");
            e.exit_code()
        }
    }
}

fn io(e: std::io::Error) -> CliError {
    if e.kind() == std::io::ErrorKind::BrokenPipe {
        return CliError::Closed;
    }
    CliError::Io(e.to_string())
}

pub fn run(command: Command, out: &mut dyn Write) -> Result<i32, CliError> {
    match command {
        Command::Verify { n, elements } => {
            let v = verify_dn_set(n, &elements);
            if v.ok {
                writeln!(out, "ok").map_err(io)?;
                return Ok(0);
            }
            writeln!(out, "not a D({n})-set").map_err(io)?;
            for (i, row) in v.roots.iter().enumerate() {
                for (j, root) in row.iter().enumerate() {
                    if j > i && root.is_none() {
                        writeln!(out, "  {}*{} + {n} is not a square", elements[i], elements[j]).map_err(io)?;
                    }
                }
            }
            Ok(1)
        }
        Command::Extend {
            triple,
            limit,
            method,
            index_cap,
        } => {
            let ds = match method {
                ExtendMethod::Brute => brute_force_extensions(&triple, limit),
                ExtendMethod::Pell => {
                    let cases = general_cases(&triple).map_err(|e| CliError::Pipeline(e.to_string()))?;
                    extensions_from_cases(&triple, &cases, index_cap).map_err(|e| CliError::Pipeline(e.to_string()))?
                }
            };
            for d in ds {
                writeln!(out, "{d}").map_err(io)?;
            }
            Ok(0)
        }
        Command::CList { pair, cap } => {
            let list = match cap {
                Some(cap) => c_candidates(&pair, &cap),
                None => campaign_c_list(&pair),
            }
            .map_err(|e| CliError::Usage(e.to_string()))?;
            for (label, c) in list {
                writeln!(out, "{label} {c}").map_err(io)?;
            }
            Ok(0)
        }
        Command::Families { action } => families(action, out),
        Command::Bound { format } => bound(format, out),
        Command::Reduce {
            pair,
            label,
            case,
            precision_cap_bits,
            format,
        } => {
            let format: ReportFormat = format.parse()?;
            let c = c_value(&pair, label).map_err(|e| CliError::Usage(e.to_string()))?;
            let triple = DnTriple::new(pair.clone(), c).map_err(|e| CliError::Usage(e.to_string()))?;
            let mut cases = admissible_cases(&triple, label).map_err(|e| CliError::Usage(e.to_string()))?;
            if let Some(id) = &case {
                cases.retain(|c| &c.id() == id);
                if cases.is_empty() {
                    return Err(CliError::Usage(format!("no admissible case '{id}' for {label}")));
                }
            }
            let (family, k) = match locate(&pair) {
                Some(((m, t), k)) => (FamilyKey { m, t }, u64::try_from(k).unwrap_or(0)),
                None => (FamilyKey { m: 0, t: 0 }, 0),
            };
            let records: Vec<_> = cases
                .into_iter()
                .map(|case| {
                    let spec = InstanceSpec {
                        family,
                        k,
                        label,
                        triple: triple.clone(),
                        case,
                    };
                    process_instance(&spec, precision_cap_bits)
                })
                .collect();
            out.write_all(&emit_records(&records, format)?).map_err(io)?;
            Ok(Summary::tally(&records, 0.0).exit_code())
        }
        Command::Campaign(args) => campaign(args, out),
    }
}

fn families(action: FamiliesAction, out: &mut dyn Write) -> Result<i32, CliError> {
    let catalog = enumerate_families();
    let get = |m: u32, t: u32| {
        catalog
            .get(m, t)
            .ok_or_else(|| CliError::Usage(format!("no family {m}:{t} in the catalogue")))
    };
    match action {
        FamiliesAction::Catalog { format } => match format {
            TextOrJson::Text => {
                writeln!(out, "# {} families; {}", catalog.count, catalog.excluded).map_err(io)?;
                if let Some(d) = &catalog.discrepancy {
                    writeln!(out, "# {d}").map_err(io)?;
                }
                for f in &catalog.families {
                    writeln!(out, "{} {} {} {}", f.m, f.t, f.a_poly, f.b_poly).map_err(io)?;
                }
            }
            TextOrJson::Json => {
                let fams: Vec<_> = catalog
                    .families
                    .iter()
                    .map(|f| json!({"m": f.m, "t": f.t, "a": f.a_poly.coeffs_i64(), "b": f.b_poly.coeffs_i64()}))
                    .collect();
                let v = json!({
                    "count": catalog.count,
                    "excluded": catalog.excluded,
                    "discrepancy": catalog.discrepancy,
                    "families": fams,
                });
                writeln!(out, "{}", serde_json::to_string_pretty(&v).expect("plain json")).map_err(io)?;
            }
        },
        FamiliesAction::Instantiate { m, t, k } => match instantiate(get(m, t)?, &BigInt::from(k)) {
            Ok(p) => writeln!(out, "{} {}", p.a, p.b).map_err(io)?,
            Err(rej) => {
                writeln!(out, "rejected: {rej}").map_err(io)?;
                return Ok(1);
            }
        },
        FamiliesAction::KBound { m, t, a_max } => match k_bound(get(m, t)?, &BigInt::from(a_max)) {
            Some(k) => writeln!(out, "{k}").map_err(io)?,
            None => writeln!(out, "none").map_err(io)?,
        },
    }
    Ok(0)
}

fn chain_json(c: &BoundChain) -> serde_json::Value {
    json!({
        "c0": c.c0.hi_f64(),
        "coefficient": c.coefficient.hi_f64(),
        "h_offset": c.h_offset.mid_f64(),
        "x_threshold": c.x_threshold.to_string(),
        "x_small_h": c.x_small_h.to_string(),
        "a_bound": c.a_bound.to_string(),
    })
}

fn bound(format: TextOrJson, out: &mut dyn Write) -> Result<i32, CliError> {
    let rep = proposition1_pipeline().map_err(|e| CliError::Pipeline(e.to_string()))?;
    let code = if rep.reproduces_claims() { 0 } else { 1 };
    match format {
        TextOrJson::Json => {
            let v = json!({
                "reproduces_claims": rep.reproduces_claims(),
                "comparisons": rep.comparisons().iter().map(|c| json!({
                    "name": c.name, "reproduced": c.reproduced, "claimed": c.claimed, "ok": c.ok,
                })).collect::<Vec<_>>(),
                "recomputed": chain_json(&rep.recomputed),
                "with_claimed_constants": chain_json(&rep.with_claimed_constants),
                "c0_infimum": rep.c0_infimum.lo_f64(),
                "auxiliary": rep.auxiliary.iter().map(|a| json!({
                    "claim": a.claim, "holds": a.holds, "detail": a.detail,
                })).collect::<Vec<_>>(),
                "discrepancies": rep.discrepancies,
            });
            writeln!(out, "{}", serde_json::to_string_pretty(&v).expect("plain json")).map_err(io)?;
        }
        TextOrJson::Text => {
            writeln!(out, "{:<14} {:>22} {:>22}  ok", "quantity", "recomputed", "asserted").map_err(io)?;
            for c in rep.comparisons() {
                writeln!(out, "{:<14} {:>22} {:>22}  {}", c.name, c.reproduced, c.claimed, if c.ok { "yes" } else { "no" })
                    .map_err(io)?;
            }
            let w = &rep.with_claimed_constants;
            writeln!(
                out,
                "with asserted constants: x < {}, h < 35 branch {}, a < {}",
                w.x_threshold, w.x_small_h, w.a_bound
            )
            .map_err(io)?;
            writeln!(out, "C0 infimum over admissible parameters: {}", rep.c0_infimum).map_err(io)?;
            for a in &rep.auxiliary {
                writeln!(out, "[{}] {}: {}", if a.holds { "holds" } else { "fails" }, a.claim, a.detail).map_err(io)?;
            }
            for d in &rep.discrepancies {
                writeln!(out, "discrepancy: {d}").map_err(io)?;
            }
        }
    }
    Ok(code)
}

/// Config file first, then flags on top.
pub fn campaign_config(args: &CampaignArgs) -> Result<CampaignConfig, CliError> {
    let mut cfg = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
            CampaignConfig::from_json(&text)?
        }
        None => CampaignConfig::default(),
    };
    if let Some(a) = args.a_max {
        cfg.a_max = a;
    }
    if !args.families.is_empty() {
        cfg.family_filter = Some(args.families.clone());
    }
    if let Some(k) = args.k_sample {
        cfg.k_sample = k;
    }
    if let Some(p) = args.precision_cap_bits {
        cfg.precision_cap_bits = p;
    }
    if let Some(w) = args.workers {
        cfg.worker_count = w;
    }
    if let Some(c) = &args.checkpoint {
        cfg.checkpoint_path = c.clone();
    }
    cfg.validate()?;
    Ok(cfg)
}

fn campaign(args: CampaignArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let format: ReportFormat = args.format.parse()?;
    let cfg = campaign_config(&args)?;
    let report = run_campaign(&cfg)?;
    let bytes = emit_report(&report, format)?;
    match &args.output {
        Some(path) => std::fs::write(path, bytes).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?,
        None => out.write_all(&bytes).map_err(io)?,
    }
    Ok(report.summary.exit_code())
}
