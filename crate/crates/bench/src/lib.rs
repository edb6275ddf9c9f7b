//! Fixtures shared by the benchmarks.

use d4ext::dtuples::campaign_c_list;
use d4ext::families::instantiate;
use d4ext::pell::admissible_cases;
use d4ext::{DnPair, DnTriple, IntersectionCase, ParametricFamily};
use num_bigint::BigInt;

/// The in-scope pair of family `(m, t)` at parameter `k`.
pub fn pair(m: u32, t: u32, k: u64) -> DnPair {
    let fam = ParametricFamily::new(m, t).expect("family exists");
    instantiate(&fam, &BigInt::from(k)).expect("pair in scope")
}

/// Every triple and case the campaign would process for one pair.
pub fn instances(pair: &DnPair) -> Vec<(DnTriple, IntersectionCase)> {
    let mut out = Vec::new();
    for (label, c) in campaign_c_list(pair).expect("c list") {
        let triple = DnTriple::new(pair.clone(), c).expect("triple");
        for case in admissible_cases(&triple, label).expect("cases") {
            out.push((triple.clone(), case));
        }
    }
    out
}
