use d4ext::dtuples::{brute_force_extensions, campaign_c_list, d_plus_minus, is_regular, verify_dn_set, DnPair, DnQuadruple, DnTriple};
use d4ext::families::{enumerate_families, first_in_scope_k, instantiate};
use d4ext::pell::admissible_cases;
use d4ext::reduction::{finish_instance, BoundRoute, ReductionStatus};
use num_bigint::BigInt;
use num_traits::Signed;

fn sample_pairs() -> Vec<DnPair> {
    let catalog = enumerate_families();
    let mut out = Vec::new();
    for (m, t) in [(1, 0), (7, 2), (812, 408), (300, 2)] {
        let Some(fam) = catalog.get(m, t) else { continue };
        let Some(k) = first_in_scope_k(fam, 10_000_000) else { continue };
        if let Ok(pair) = instantiate(fam, &BigInt::from(k)) {
            out.push(pair);
        }
    }
    out.push(DnPair::d4(39996, 40397).unwrap());
    out
}

#[test]
fn every_case_reduces_and_only_regular_extensions_appear() {
    for pair in sample_pairs() {
        for (label, c) in campaign_c_list(&pair).unwrap() {
            let triple = DnTriple::new(pair.clone(), c).unwrap();
            let (dp, dm) = d_plus_minus(&triple).unwrap();
            let mut found = Vec::new();
            for case in admissible_cases(&triple, label).unwrap() {
                let (out, fin) = finish_instance(&triple, &case).unwrap();
                assert_ne!(out.initial.route, BoundRoute::Fallback, "{label} {}", case.id());
                assert_eq!(out.status, ReductionStatus::Reduced, "{label} {}", case.id());
                found.extend(fin.extensions);
            }
            found.sort();
            found.dedup();
            assert!(found.contains(&dp), "{:?} {label}: d+ missing from {found:?}", (&pair.a, &pair.b));
            for d in &found {
                assert!(d == &dp || (d == &dm && dm.is_positive()), "{label}: irregular d = {d}");
                let quad = DnQuadruple::new(triple.clone(), d.clone()).unwrap();
                assert!(verify_dn_set(4, &quad.elements()).ok);
                assert!(is_regular(&quad));
            }
        }
    }
}

#[test]
fn search_agrees_with_brute_force_on_small_extensions() {
    let pair = DnPair::d4(39996, 40397).unwrap();
    let limit = 1_000_000_000u64;
    for (label, c) in campaign_c_list(&pair).unwrap().into_iter().take(2) {
        let triple = DnTriple::new(pair.clone(), c).unwrap();
        let mut found = Vec::new();
        for case in admissible_cases(&triple, label).unwrap() {
            found.extend(finish_instance(&triple, &case).unwrap().1.extensions);
        }
        found.retain(|d| d <= &BigInt::from(limit));
        found.sort();
        found.dedup();
        assert_eq!(found, brute_force_extensions(&triple, limit), "{label}");
    }
}
