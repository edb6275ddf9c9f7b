//! Fundamental solutions of `P z^2 - Q x^2 = 4(P - Q)`, the binary recurrences
//! `v`, `w` built from them, and the search for `v_m = w_n`.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::bigarith::{is_perfect_square, isqrt};
use crate::dtuples::{c_value, CLabel, DnTriple};
use crate::error::PellError;

/// Fundamental-solution scans larger than this are refused.
pub const FUNDAMENTAL_SEARCH_LIMIT: u64 = 50_000_000;

/// Default index cap for oracle searches.
pub const DEFAULT_INDEX_CAP: u64 = 200;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EqKind {
    /// `a z^2 - c x^2 = 4(a - c)`
    Zx,
    /// `b z^2 - c y^2 = 4(b - c)`
    Zy,
    /// `a y^2 - b x^2 = 4(a - b)`
    Yx,
}

/// `(first, second)` is `(z, x)`, `(z, y)` or `(y, x)` depending on `kind`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FundamentalSolution {
    pub kind: EqKind,
    pub first: BigInt,
    pub second: BigInt,
}

/// Coefficients `(P, Q, u)` of `P Z^2 - Q X^2 = 4(P - Q)` with unit trace `u`.
fn equation(kind: EqKind, t: &DnTriple) -> (BigInt, BigInt, BigInt) {
    match kind {
        EqKind::Zx => (t.a().clone(), t.c.clone(), t.s.clone()),
        EqKind::Zy => (t.b().clone(), t.c.clone(), t.t.clone()),
        EqKind::Yx => (t.a().clone(), t.b().clone(), t.r().clone()),
    }
}

impl FundamentalSolution {
    pub fn satisfies(&self, t: &DnTriple) -> bool {
        let (p, q, _) = equation(self.kind, t);
        &p * &self.first * &self.first - &q * &self.second * &self.second == (p - q) * 4
    }
}

/// All fundamental solutions of the `kind` equation for `triple`.
///
/// Every positive solution is `(Z sqrt P + X sqrt Q) ((u + sqrt(PQ)) / 2)^m`
/// for one listed `(Z, X)` and some `m >= 0`. With `Q > P` the scan runs over
/// `0 <= X <= sqrt((Q - P)(u + 2) / Q)` and both signs of `Z` are kept; with
/// `Q < P` the roles swap.
pub fn fundamental_solutions(
    kind: EqKind,
    triple: &DnTriple,
) -> Result<Vec<FundamentalSolution>, PellError> {
    if triple.pair.n != 4 {
        return Err(PellError::InvalidEquation(format!("D({}) is not supported", triple.pair.n)));
    }
    let (p, q, u) = equation(kind, triple);
    if p == q {
        return Err(PellError::InvalidEquation("equal coefficients".into()));
    }
    let n: BigInt = (&p - &q) * 4u32;
    let mut out = Vec::new();
    let (outer, inner, swap) = if q > p { (&q, &p, false) } else { (&p, &q, true) };
    // outer * V^2 ranges up to |P - Q| (u + 2).
    let bound = isqrt(&((outer - inner).abs() * (&u + 2u32) / outer))
        .map_err(|e| PellError::InvalidEquation(e.to_string()))?;
    let steps = bound.to_u64().filter(|&s| s <= FUNDAMENTAL_SEARCH_LIMIT).ok_or_else(|| {
        PellError::SearchTooLarge(bound.to_string())
    })?;
    for v in 0..=steps {
        let v = BigInt::from(v);
        // Solve for the other variable.
        let rhs: BigInt = if swap { &p * &v * &v - &n } else { &n + &q * &v * &v };
        let div = if swap { &q } else { &p };
        if rhs.is_negative() || !(&rhs % div).is_zero() {
            continue;
        }
        let Some(w) = is_perfect_square(&(&rhs / div)) else {
            continue;
        };
        let signs: &[i32] = if w.is_zero() { &[1] } else { &[-1, 1] };
        for &sg in signs {
            let w = &w * sg;
            let (first, second) = if swap { (v.clone(), w) } else { (w, v.clone()) };
            out.push(FundamentalSolution {
                kind,
                first,
                second,
            });
        }
    }
    out.sort();
    out.dedup();
    debug_assert!(out.iter().all(|f| f.satisfies(triple)));
    Ok(out)
}

/// `term_{k+2} = coeff term_{k+1} - term_k`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SolutionSequence {
    pub term0: BigInt,
    pub term1: BigInt,
    pub coeff: BigInt,
}

impl SolutionSequence {
    pub fn new(term0: BigInt, term1: BigInt, coeff: BigInt) -> Self {
        SolutionSequence { term0, term1, coeff }
    }

    pub fn iter(&self) -> SequenceIter {
        SequenceIter {
            cur: self.term0.clone(),
            next: self.term1.clone(),
            coeff: self.coeff.clone(),
        }
    }

    pub fn terms(&self, count: usize) -> Vec<BigInt> {
        self.iter().take(count).collect()
    }
}

pub struct SequenceIter {
    cur: BigInt,
    next: BigInt,
    coeff: BigInt,
}

impl Iterator for SequenceIter {
    type Item = BigInt;

    fn next(&mut self) -> Option<BigInt> {
        let after = &self.coeff * &self.next - &self.cur;
        let next = std::mem::replace(&mut self.next, after);
        Some(std::mem::replace(&mut self.cur, next))
    }
}

/// The first `count` terms of the recurrence.
pub fn recurrence_sequence(term0: &BigInt, term1: &BigInt, coeff: &BigInt, count: usize) -> Vec<BigInt> {
    SolutionSequence::new(term0.clone(), term1.clone(), coeff.clone()).terms(count)
}

fn half(x: BigInt, what: &str) -> Result<BigInt, PellError> {
    let (q, r) = x.div_rem(&BigInt::from(2));
    if r.is_zero() {
        Ok(q)
    } else {
        Err(PellError::NonIntegralTerm(format!("{what} = {x}/2")))
    }
}

/// Which index parities `(m mod 2, n mod 2)` a case covers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ParityClass {
    EvenEven,
    OddOdd,
    EvenOdd,
    OddEven,
    /// No parity restriction, used for general fundamental solutions.
    Any,
}

impl ParityClass {
    pub fn allows(self, m: u64, n: u64) -> bool {
        match self {
            ParityClass::EvenEven => m % 2 == 0 && n % 2 == 0,
            ParityClass::OddOdd => m % 2 == 1 && n % 2 == 1,
            ParityClass::EvenOdd => m % 2 == 0 && n % 2 == 1,
            ParityClass::OddEven => m % 2 == 1 && n % 2 == 0,
            ParityClass::Any => true,
        }
    }

    fn tag(self) -> &'static str {
        match self {
            ParityClass::EvenEven => "ee",
            ParityClass::OddOdd => "oo",
            ParityClass::EvenOdd => "eo",
            ParityClass::OddEven => "oe",
            ParityClass::Any => "gg",
        }
    }

    /// Whether a parity class can carry an intersection for `label`.
    pub fn admissible_for(self, label: CLabel) -> bool {
        match self {
            ParityClass::EvenEven => true,
            ParityClass::OddOdd => label.nu >= 2,
            ParityClass::EvenOdd | ParityClass::OddEven => false,
            ParityClass::Any => false,
        }
    }
}

/// One choice of fundamental solutions `(z0, x0)`, `(z1, y1)` and index parities.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntersectionCase {
    pub c_label: Option<CLabel>,
    pub parity: ParityClass,
    pub z0: BigInt,
    pub x0: BigInt,
    pub z1: BigInt,
    pub y1: BigInt,
    pub admissible: bool,
}

impl IntersectionCase {
    /// Parity tag followed by the signs of `z0, x0, z1, y1`, e.g. `ee-+-+`.
    pub fn id(&self) -> String {
        let sg = |x: &BigInt| if x.is_negative() { '-' } else { '+' };
        let mut s = self.parity.tag().to_string();
        for x in [&self.z0, &self.x0, &self.z1, &self.y1] {
            s.push(sg(x));
        }
        if self.parity == ParityClass::Any {
            s = format!("{s}:{}:{}:{}:{}", self.z0, self.x0, self.z1, self.y1);
        }
        s
    }

    /// `v`: `v0 = z0`, `v1 = (s z0 + c x0)/2`, coefficient `s`.
    pub fn v_sequence(&self, t: &DnTriple) -> Result<SolutionSequence, PellError> {
        let v1 = half(&t.s * &self.z0 + &t.c * &self.x0, "v1")?;
        Ok(SolutionSequence::new(self.z0.clone(), v1, t.s.clone()))
    }

    /// `w`: `w0 = z1`, `w1 = (t z1 + c y1)/2`, coefficient `t`.
    pub fn w_sequence(&self, t: &DnTriple) -> Result<SolutionSequence, PellError> {
        let w1 = half(&t.t * &self.z1 + &t.c * &self.y1, "w1")?;
        Ok(SolutionSequence::new(self.z1.clone(), w1, t.t.clone()))
    }

    /// `q`: the `x` companion of `v`.
    pub fn q_sequence(&self, t: &DnTriple) -> Result<SolutionSequence, PellError> {
        let q1 = half(&t.s * &self.x0 + t.a() * &self.z0, "q1")?;
        Ok(SolutionSequence::new(self.x0.clone(), q1, t.s.clone()))
    }

    /// `W`: the `y` companion of `w`.
    pub fn big_w_sequence(&self, t: &DnTriple) -> Result<SolutionSequence, PellError> {
        let w1 = half(&t.t * &self.y1 + t.b() * &self.z1, "W1")?;
        Ok(SolutionSequence::new(self.y1.clone(), w1, t.t.clone()))
    }

    fn check(&self, t: &DnTriple) -> Result<(), PellError> {
        let zx = FundamentalSolution {
            kind: EqKind::Zx,
            first: self.z0.clone(),
            second: self.x0.clone(),
        };
        let zy = FundamentalSolution {
            kind: EqKind::Zy,
            first: self.z1.clone(),
            second: self.y1.clone(),
        };
        if !zx.satisfies(t) || !zy.satisfies(t) {
            return Err(PellError::InvalidEquation(format!("case {} does not solve the system", self.id())));
        }
        Ok(())
    }
}

impl fmt::Display for IntersectionCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.id())
    }
}

/// `(v0, w1) = (p1, V1)` companions of the `yx` equation.
pub fn yx_sequences(t: &DnTriple, x0: &BigInt, y0: &BigInt) -> Result<(SolutionSequence, SolutionSequence), PellError> {
    let p1 = half(t.r() * x0 + t.a() * y0, "p1")?;
    let v1 = half(t.r() * y0 + t.b() * x0, "V1")?;
    Ok((
        SolutionSequence::new(x0.clone(), p1, t.r().clone()),
        SolutionSequence::new(y0.clone(), v1, t.r().clone()),
    ))
}

/// The initial-value configurations that can produce `v_m = w_n` for `c = c_label`.
///
/// * `c₁⁻` (`c < a`): `z0 = z1 = 2`, `x0, y1 = ±2`, even indices.
/// * `c₁⁺`: `z0 = z1 = ±2`, `x0 = y1 = 2`, even indices.
/// * otherwise: the even case above, and the odd case
///   `(z0, x0, z1, y1) = ±(t, r, s, r)` with `z0 z1 > 0`.
pub fn admissible_cases(triple: &DnTriple, c_label: CLabel) -> Result<Vec<IntersectionCase>, PellError> {
    if !(1..=4).contains(&c_label.nu) || c_label == CLabel::plus(4) {
        return Err(PellError::UnknownLabel(c_label.to_string()));
    }
    let expected = c_value(&triple.pair, c_label).map_err(|e| PellError::InvalidEquation(e.to_string()))?;
    if expected != triple.c {
        return Err(PellError::InvalidEquation(format!(
            "c = {} is not {c_label} = {expected}",
            triple.c
        )));
    }
    let two = BigInt::from(2);
    let mk = |parity, z0: &BigInt, x0: &BigInt, z1: &BigInt, y1: &BigInt| IntersectionCase {
        c_label: Some(c_label),
        parity,
        z0: z0.clone(),
        x0: x0.clone(),
        z1: z1.clone(),
        y1: y1.clone(),
        admissible: true,
    };
    let mut out = Vec::new();
    if c_label.is_c1_minus() {
        for x0 in [-&two, two.clone()] {
            for y1 in [-&two, two.clone()] {
                out.push(mk(ParityClass::EvenEven, &two, &x0, &two, &y1));
            }
        }
    } else {
        for z in [-&two, two.clone()] {
            out.push(mk(ParityClass::EvenEven, &z, &two, &z, &two));
        }
        if c_label.nu >= 2 {
            let (r, s, t) = (triple.r(), &triple.s, &triple.t);
            out.push(mk(ParityClass::OddOdd, &-t, r, &-s, r));
            out.push(mk(ParityClass::OddOdd, t, r, s, r));
        }
    }
    for c in &out {
        c.check(triple)?;
    }
    Ok(out)
}

/// The parity classes for `c_label` with their admissibility.
pub fn parity_classes(c_label: CLabel) -> Vec<(ParityClass, bool)> {
    [ParityClass::EvenEven, ParityClass::OddOdd, ParityClass::EvenOdd, ParityClass::OddEven]
        .into_iter()
        .map(|p| (p, p.admissible_for(c_label)))
        .collect()
}

/// Every pairing of fundamental solutions of the two equations, without parity
/// restriction.
pub fn general_cases(triple: &DnTriple) -> Result<Vec<IntersectionCase>, PellError> {
    let zx = fundamental_solutions(EqKind::Zx, triple)?;
    let zy = fundamental_solutions(EqKind::Zy, triple)?;
    let mut out = Vec::new();
    for f in &zx {
        for g in &zy {
            let case = IntersectionCase {
                c_label: None,
                parity: ParityClass::Any,
                z0: f.first.clone(),
                x0: f.second.clone(),
                z1: g.first.clone(),
                y1: g.second.clone(),
                admissible: true,
            };
            // Pairs whose halved terms are not integral cannot meet.
            if case.v_sequence(triple).is_ok() && case.w_sequence(triple).is_ok() {
                out.push(case);
            }
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Intersection {
    pub m: u64,
    pub n: u64,
    pub z: BigInt,
}

impl Intersection {
    /// `d = (z^2 - 4) / c` when integral.
    pub fn d(&self, t: &DnTriple) -> Option<BigInt> {
        let num: BigInt = &self.z * &self.z - 4u32;
        let (q, r) = num.div_rem(&t.c);
        r.is_zero().then_some(q)
    }
}

/// All `(m, n)` with `m, n <= index_cap` in the case's parity class and `v_m = w_n`.
///
/// Both sequences are eventually increasing, so `w` is generated only until
/// it passes the largest `v` term.
pub fn find_intersections(
    triple: &DnTriple,
    case: &IntersectionCase,
    index_cap: u64,
) -> Result<Vec<Intersection>, PellError> {
    if !case.admissible {
        return Err(PellError::Inadmissible(case.id()));
    }
    let v: Vec<BigInt> = case.v_sequence(triple)?.terms(index_cap as usize + 1);
    let vmax = v.iter().max().cloned().unwrap_or_default();
    let mut w = Vec::new();
    let mut rising = false;
    for (n, term) in case.w_sequence(triple)?.iter().enumerate() {
        if n as u64 > index_cap {
            break;
        }
        if rising && term > vmax {
            break;
        }
        if let Some(prev) = w.last() {
            rising = term.is_positive() && &term > prev;
        }
        w.push(term);
    }
    merge_equal(&v, &w, |m, n| case.parity.allows(m, n))
}

/// Sort-merge join of two term lists on equal values.
fn merge_equal(
    v: &[BigInt],
    w: &[BigInt],
    keep: impl Fn(u64, u64) -> bool,
) -> Result<Vec<Intersection>, PellError> {
    let mut vs: Vec<(&BigInt, u64)> = v.iter().zip(0u64..).collect();
    let mut ws: Vec<(&BigInt, u64)> = w.iter().zip(0u64..).collect();
    vs.sort();
    ws.sort();
    let mut out = Vec::new();
    let (mut i, mut j) = (0, 0);
    while i < vs.len() && j < ws.len() {
        match vs[i].0.cmp(ws[j].0) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                let val = vs[i].0;
                let j_end = ws[j..].iter().position(|x| x.0 != val).map_or(ws.len(), |k| j + k);
                while i < vs.len() && vs[i].0 == val {
                    for wj in &ws[j..j_end] {
                        if keep(vs[i].1, wj.1) {
                            out.push(Intersection {
                                m: vs[i].1,
                                n: wj.1,
                                z: val.clone(),
                            });
                        }
                    }
                    i += 1;
                }
                j = j_end;
            }
        }
    }
    out.sort();
    Ok(out)
}

/// Positive `d` obtained from intersections of any case, ascending and deduplicated.
pub fn extensions_from_cases(
    triple: &DnTriple,
    cases: &[IntersectionCase],
    index_cap: u64,
) -> Result<Vec<BigInt>, PellError> {
    let mut ds = Vec::new();
    for case in cases {
        for hit in find_intersections(triple, case, index_cap)? {
            if let Some(d) = hit.d(triple) {
                if d.is_positive() {
                    ds.push(d);
                }
            }
        }
    }
    ds.sort();
    ds.dedup();
    Ok(ds)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dtuples::{brute_force_extensions, c_candidates, verify_dn_set, DnPair};
    use proptest::prelude::*;

    fn big(n: i64) -> BigInt {
        BigInt::from(n)
    }

    fn t1512() -> DnTriple {
        DnTriple::d4(1, 5, 12).unwrap()
    }

    #[test]
    fn fundamental_examples() {
        let t = t1512();
        let zx = fundamental_solutions(EqKind::Zx, &t).unwrap();
        for z in [-2, 2] {
            assert!(zx.contains(&FundamentalSolution {
                kind: EqKind::Zx,
                first: big(z),
                second: big(2)
            }));
        }
        let zy = fundamental_solutions(EqKind::Zy, &t).unwrap();
        assert!(zy.iter().any(|f| f.first == big(-2) && f.second == big(2)));
        assert!(zx.iter().chain(&zy).all(|f| f.satisfies(&t)));
    }

    #[test]
    fn sequences_for_small_triple() {
        let t = t1512();
        let case = IntersectionCase {
            c_label: Some(CLabel::plus(1)),
            parity: ParityClass::EvenEven,
            z0: big(-2),
            x0: big(2),
            z1: big(-2),
            y1: big(2),
            admissible: true,
        };
        assert_eq!(case.v_sequence(&t).unwrap().terms(3), vec![big(-2), big(8), big(34)]);
        assert_eq!(case.w_sequence(&t).unwrap().terms(3), vec![big(-2), big(4), big(34)]);
        assert_eq!(recurrence_sequence(&big(2), &big(2), &big(2), 4), vec![big(2); 4]);
        let hits = find_intersections(&t, &case, 10).unwrap();
        let hit = hits.iter().find(|h| h.z == big(34)).unwrap();
        assert_eq!((hit.m, hit.n), (2, 2));
        assert_eq!(hit.d(&t), Some(big(96)));
        assert!(find_intersections(&t, &case, 1).unwrap().iter().all(|h| h.z != big(34)));
    }

    #[test]
    fn lemma_cases() {
        // Family (1, 0) at k = 200.
        let pair = DnPair::d4(39996, 40397).unwrap();
        let c = |l| DnTriple::new(pair.clone(), c_value(&pair, l).unwrap()).unwrap();
        let m1 = admissible_cases(&c(CLabel::minus(1)), CLabel::minus(1)).unwrap();
        assert!(m1.iter().all(|k| k.parity == ParityClass::EvenEven && k.z0 == big(2) && k.z1 == big(2)));
        let p2 = admissible_cases(&c(CLabel::plus(2)), CLabel::plus(2)).unwrap();
        let classes: std::collections::BTreeSet<_> = p2.iter().map(|k| k.parity).collect();
        assert_eq!(classes.len(), 2);
        assert!(!ParityClass::OddEven.admissible_for(CLabel::plus(1)));
        assert!(!ParityClass::EvenOdd.admissible_for(CLabel::plus(1)));
        assert!(parity_classes(CLabel::plus(1)).iter().filter(|x| x.1).count() == 1);
        assert!(matches!(
            admissible_cases(&c(CLabel::plus(2)), CLabel::plus(4)),
            Err(PellError::UnknownLabel(_))
        ));
    }

    #[test]
    fn q_and_big_w_track_x_and_y() {
        let t = t1512();
        for case in general_cases(&t).unwrap() {
            let v = case.v_sequence(&t).unwrap().terms(6);
            let q = case.q_sequence(&t).unwrap().terms(6);
            for (z, x) in v.iter().zip(&q) {
                assert_eq!(t.a() * z * z - &t.c * x * x, (t.a() - &t.c) * 4);
            }
            let w = case.w_sequence(&t).unwrap().terms(6);
            let y = case.big_w_sequence(&t).unwrap().terms(6);
            for (z, y) in w.iter().zip(&y) {
                assert_eq!(t.b() * z * z - &t.c * y * y, (t.b() - &t.c) * 4);
            }
        }
        let (p, v) = yx_sequences(&t, &big(2), &big(2)).unwrap();
        for (x, y) in p.terms(5).iter().zip(v.terms(5)) {
            assert_eq!(t.a() * &y * &y - t.b() * x * x, (t.a() - t.b()) * 4);
        }
    }

    /// Every positive solution of `P Z^2 - Q X^2 = 4(P - Q)` with `X` up to
    /// ten times the search bound lies on a forward orbit of a listed solution.
    fn check_coverage(kind: EqKind, t: &DnTriple) {
        let (p, q, u) = equation(kind, t);
        let fs = fundamental_solutions(kind, t).unwrap();
        let mut orbit = std::collections::BTreeSet::new();
        let xmax = (10 * (u.to_u64().unwrap() + 2)).max(200);
        for f in &fs {
            let (mut z, mut x) = (f.first.clone(), f.second.clone());
            for _ in 0..60 {
                if x > big(xmax as i64) * 4 && z > big(xmax as i64) * 4 {
                    break;
                }
                orbit.insert((z.clone(), x.clone()));
                let nz = half(&u * &z + &q * &x, "z").unwrap();
                let nx = half(&u * &x + &p * &z, "x").unwrap();
                z = nz;
                x = nx;
            }
        }
        for x in 1..=xmax {
            let x = big(x as i64);
            let rhs: BigInt = (&p - &q) * 4u32 + &q * &x * &x;
            if rhs.is_negative() || !(&rhs % &p).is_zero() {
                continue;
            }
            if let Some(z) = is_perfect_square(&(&rhs / &p)) {
                if z.is_positive() {
                    assert!(orbit.contains(&(z.clone(), x.clone())), "{kind:?} {t:?}: ({z}, {x}) not covered");
                }
            }
        }
    }

    #[test]
    fn fundamental_solutions_cover_small_triples() {
        for (a, b, c) in [(1, 5, 12), (1, 5, 96), (1, 12, 96), (5, 12, 96), (3, 7, 20), (4, 12, 32)] {
            if let Ok(t) = DnTriple::d4(a, b, c) {
                check_coverage(EqKind::Zx, &t);
                check_coverage(EqKind::Zy, &t);
            }
        }
    }

    fn small_triples() -> impl Strategy<Value = DnTriple> {
        (1u64..300, 1u64..300, 0usize..3).prop_filter_map("needs a D(4)-triple", |(a, k, i)| {
            let pair = DnPair::d4(a, a + k).ok()?;
            let cs = c_candidates(&pair, &big(10_000)).ok()?;
            let c = cs.get(i)?.1.clone();
            DnTriple::new(pair, c).ok()
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn intersections_match_brute_force(t in small_triples()) {
            let cases = general_cases(&t).unwrap();
            let limit = 100_000_000u64;
            let got: Vec<BigInt> = extensions_from_cases(&t, &cases, 40)
                .unwrap()
                .into_iter()
                .filter(|d| *d <= BigInt::from(limit))
                .collect();
            let want = brute_force_extensions(&t, limit);
            prop_assert_eq!(&got, &want);
            for d in &got {
                let mut e = t.sorted().to_vec();
                e.push(d.clone());
                prop_assert!(verify_dn_set(4, &e).ok);
            }
        }

        #[test]
        fn lemma2_ordering(t in small_triples()) {
            for case in general_cases(&t).unwrap() {
                for h in find_intersections(&t, &case, 40).unwrap() {
                    if h.n >= 3 {
                        prop_assert!(h.m > h.n, "{h:?}");
                    }
                }
            }
        }

        #[test]
        fn sequences_grow_once_positive(t in small_triples()) {
            for case in general_cases(&t).unwrap() {
                let v = case.v_sequence(&t).unwrap().terms(12);
                let w = case.w_sequence(&t).unwrap().terms(12);
                // A positive start may dip once (c < a with x0 < 0); after the
                // first positive rise the sequence increases.
                for s in [&v, &w] {
                    if let Some(k) = s.windows(2).position(|p| p[0].is_positive() && p[1] > p[0]) {
                        prop_assert!(s[k..].windows(2).all(|p| p[0] < p[1]));
                    }
                    prop_assert!(s.windows(2).skip(2).all(|p| p[0] < p[1]));
                }
            }
        }

        #[test]
        fn coverage_holds(t in small_triples()) {
            check_coverage(EqKind::Zx, &t);
            check_coverage(EqKind::Zy, &t);
        }
    }
}
