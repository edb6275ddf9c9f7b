//! Per-instance records and the pipeline that produces them.

use std::fmt;
use std::time::Instant;

use d4ext::dtuples::{d_plus_minus, verify_dn_set};
use d4ext::reduction::{recheck_round, BoundRoute, ReductionInstance, ReductionStatus};
use d4ext::{CLabel, DnTriple, FormKind, IntersectionCase};
use num_bigint::BigInt;
use num_traits::Signed;
use serde::{Deserialize, Serialize};

use crate::config::FamilyKey;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Verified,
    Discrepancy,
    Undecided,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Verified => "verified",
            Status::Discrepancy => "discrepancy",
            Status::Undecided => "undecided",
        })
    }
}

impl std::str::FromStr for Status {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "verified" => Ok(Status::Verified),
            "discrepancy" => Ok(Status::Discrepancy),
            "undecided" => Ok(Status::Undecided),
            _ => Err(format!("unknown status '{s}'")),
        }
    }
}

/// Sort and checkpoint key: `(m, t, k, c_label, case)`.
pub type InstanceKey = (u32, u32, u64, CLabel, String);

/// Outcome for one `(family, k, c_label, case)`.
///
/// Integers that can exceed 53 bits are written as decimal strings.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceRecord {
    pub m: u32,
    pub t: u32,
    #[serde(with = "decimal")]
    pub k: u64,
    #[serde(with = "decimal")]
    pub a: BigInt,
    #[serde(with = "decimal")]
    pub b: BigInt,
    #[serde(with = "decimal")]
    pub c_label: CLabel,
    #[serde(with = "decimal")]
    pub c: BigInt,
    pub case: String,
    /// `lf1` or `lf2`.
    pub form: String,
    pub bound_route: Option<String>,
    #[serde(with = "decimal_opt")]
    pub m_initial: Option<BigInt>,
    #[serde(with = "decimal_opt")]
    pub reduced_bound: Option<BigInt>,
    #[serde(with = "decimal_opt")]
    pub m_bound: Option<BigInt>,
    pub search_cap: Option<u64>,
    pub rounds: u32,
    /// Every reduction round re-verified with exact rational `ε`.
    pub certificates_rechecked: bool,
    #[serde(with = "decimal_vec")]
    pub extensions: Vec<BigInt>,
    #[serde(with = "decimal")]
    pub d_minus: BigInt,
    #[serde(with = "decimal")]
    pub d_plus: BigInt,
    pub status: Status,
    pub note: Option<String>,
    pub time_ms: u64,
}

impl InstanceRecord {
    pub fn key(&self) -> InstanceKey {
        (self.m, self.t, self.k, self.c_label, self.case.clone())
    }

    pub fn family(&self) -> FamilyKey {
        FamilyKey { m: self.m, t: self.t }
    }
}

/// One unit of campaign work.
#[derive(Clone, Debug)]
pub struct InstanceSpec {
    pub family: FamilyKey,
    pub k: u64,
    pub label: CLabel,
    pub triple: DnTriple,
    pub case: IntersectionCase,
}

impl InstanceSpec {
    pub fn key(&self) -> InstanceKey {
        (self.family.m, self.family.t, self.k, self.label, self.case.id())
    }
}

/// Status of an extension list: each `d` must form a D(4)-quadruple, be
/// `d₋` or `d₊`, and equal `d₊` when it exceeds `c`.
pub fn classify_extensions(triple: &DnTriple, extensions: &[BigInt]) -> Result<(), String> {
    let (dp, dm) = d_plus_minus(triple).map_err(|e| e.to_string())?;
    for d in extensions {
        let set = [triple.a().clone(), triple.b().clone(), triple.c.clone(), d.clone()];
        if !verify_dn_set(4, &set).ok {
            return Err(format!("d = {d} does not extend the triple"));
        }
        let regular = d == &dp || (d == &dm && dm.is_positive());
        if !regular {
            return Err(format!("irregular extension d = {d}"));
        }
        if d > &triple.c && d != &dp {
            return Err(format!("d = {d} > c but d != d+"));
        }
    }
    Ok(())
}

/// Bounds, reduces and searches one instance.
pub fn process_instance(spec: &InstanceSpec, precision_cap_bits: u32) -> InstanceRecord {
    let start = Instant::now();
    let triple = &spec.triple;
    let inst = ReductionInstance::new(triple, &spec.case).with_precision_cap(precision_cap_bits);
    let (dp, dm) = d_plus_minus(triple).expect("campaign triples are D(4)-triples");
    let mut rec = InstanceRecord {
        m: spec.family.m,
        t: spec.family.t,
        k: spec.k,
        a: triple.a().clone(),
        b: triple.b().clone(),
        c_label: spec.label,
        c: triple.c.clone(),
        case: spec.case.id(),
        form: match inst.kind {
            FormKind::Lf1 => "lf1".into(),
            FormKind::Lf2 => "lf2".into(),
        },
        bound_route: None,
        m_initial: None,
        reduced_bound: None,
        m_bound: None,
        search_cap: None,
        rounds: 0,
        certificates_rechecked: false,
        extensions: Vec::new(),
        d_minus: dm,
        d_plus: dp,
        status: Status::Undecided,
        note: None,
        time_ms: 0,
    };
    let (status, note) = run_pipeline(&inst, &mut rec);
    rec.status = status;
    rec.note = note;
    rec.time_ms = start.elapsed().as_millis() as u64;
    rec
}

fn run_pipeline(inst: &ReductionInstance, rec: &mut InstanceRecord) -> (Status, Option<String>) {
    let out = match inst.reduce() {
        Ok(o) => o,
        Err(e) => return (Status::Undecided, Some(format!("reduction: {e}"))),
    };
    rec.bound_route = Some(out.initial.route.to_string());
    rec.m_initial = Some(out.initial.variable_bound.clone());
    rec.reduced_bound = Some(out.final_bound.clone());
    rec.m_bound = Some(out.m_bound.clone());
    rec.search_cap = Some(out.search_cap);
    rec.rounds = out.rounds.len() as u32;
    if out.initial.route == BoundRoute::Fallback {
        return (Status::Undecided, Some("initial bound not certified".into()));
    }
    if out.status == ReductionStatus::NoConvergent {
        return (Status::Undecided, Some("no convergent with positive epsilon".into()));
    }
    let mut rechecked = true;
    for round in &out.rounds {
        match recheck_round(inst, round) {
            Ok(true) => {}
            Ok(false) => rechecked = false,
            Err(e) => return (Status::Undecided, Some(format!("certificate recheck: {e}"))),
        }
    }
    rec.certificates_rechecked = rechecked;
    if !rechecked {
        return (Status::Undecided, Some("a reduction certificate did not recheck".into()));
    }
    let fin = match inst.finish(out.search_cap) {
        Ok(f) => f,
        Err(e) => return (Status::Undecided, Some(format!("search: {e}"))),
    };
    rec.extensions = fin.extensions;
    match classify_extensions(&inst.triple, &rec.extensions) {
        Ok(()) => (Status::Verified, None),
        Err(e) => (Status::Discrepancy, Some(e)),
    }
}

/// Serde helpers writing values through `Display` / `FromStr`.
pub(crate) mod decimal {
    use std::fmt::Display;
    use std::str::FromStr;

    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<T: Display, S: Serializer>(v: &T, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(v)
    }

    pub fn deserialize<'de, T, D>(d: D) -> Result<T, D::Error>
    where
        T: FromStr,
        T::Err: Display,
        D: Deserializer<'de>,
    {
        String::deserialize(d)?.parse().map_err(de::Error::custom)
    }
}

pub(crate) mod decimal_opt {
    use std::fmt::Display;
    use std::str::FromStr;

    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<T: Display, S: Serializer>(v: &Option<T>, s: S) -> Result<S::Ok, S::Error> {
        match v {
            Some(x) => s.collect_str(x),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, T, D>(d: D) -> Result<Option<T>, D::Error>
    where
        T: FromStr,
        T::Err: Display,
        D: Deserializer<'de>,
    {
        Option::<String>::deserialize(d)?
            .map(|s| s.parse().map_err(de::Error::custom))
            .transpose()
    }
}

pub(crate) mod decimal_vec {
    use std::fmt::Display;
    use std::str::FromStr;

    use serde::ser::SerializeSeq;
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<T: Display, S: Serializer>(v: &[T], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for x in v {
            seq.serialize_element(&x.to_string())?;
        }
        seq.end()
    }

    pub fn deserialize<'de, T, D>(d: D) -> Result<Vec<T>, D::Error>
    where
        T: FromStr,
        T::Err: Display,
        D: Deserializer<'de>,
    {
        Vec::<String>::deserialize(d)?
            .into_iter()
            .map(|s| s.parse().map_err(de::Error::custom))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use d4ext::dtuples::{c_value, DnPair};
    use d4ext::pell::admissible_cases;

    fn spec(label: CLabel) -> Vec<InstanceSpec> {
        let pair = DnPair::d4(39996, 40397).unwrap();
        let c = c_value(&pair, label).unwrap();
        let triple = DnTriple::new(pair, c).unwrap();
        admissible_cases(&triple, label)
            .unwrap()
            .into_iter()
            .map(|case| InstanceSpec {
                family: FamilyKey { m: 1, t: 0 },
                k: 200,
                label,
                triple: triple.clone(),
                case,
            })
            .collect()
    }

    #[test]
    fn instance_verifies() {
        for s in spec(CLabel::plus(1)) {
            let rec = process_instance(&s, d4ext::bigarith::PRECISION_CAP_BITS);
            assert_eq!(rec.status, Status::Verified, "{:?}", rec.note);
            assert!(rec.certificates_rechecked);
            assert!(rec.extensions.iter().all(|d| d == &rec.d_plus || d == &rec.d_minus));
        }
    }

    #[test]
    fn classification_rejects_irregular() {
        let t = DnTriple::d4(1, 5, 12).unwrap();
        assert!(classify_extensions(&t, &[BigInt::from(96)]).is_ok());
        assert!(classify_extensions(&t, &[BigInt::from(97)]).unwrap_err().contains("does not extend"));
        // d₋(1, 5, 672) = 96.
        let t2 = DnTriple::d4(1, 5, 672).unwrap();
        assert!(classify_extensions(&t2, &[BigInt::from(96)]).is_ok());
    }

    #[test]
    fn record_serializes_big_numbers_as_strings() {
        let s = &spec(CLabel::minus(1))[0];
        let rec = process_instance(s, d4ext::bigarith::PRECISION_CAP_BITS);
        let v = serde_json::to_value(&rec).unwrap();
        assert_eq!(v["a"], "39996");
        assert_eq!(v["c_label"], "c1-");
        assert!(v["extensions"].as_array().unwrap().iter().all(|x| x.is_string()));
        let back: InstanceRecord = serde_json::from_value(v).unwrap();
        assert_eq!(back, rec);
    }
}
