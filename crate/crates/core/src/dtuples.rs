//! D(n)-pairs, triples and quadruples: verification, the regular extensions
//! `d±`, the candidate third elements `c_ν^±`, and brute-force oracles.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::bigarith::{is_perfect_square, is_perfect_square_u128};
use crate::error::TupleError;

/// `57^2`: in-scope pairs satisfy `(b - a)^2 < 3249 a`.
pub const SCOPE_SQ: u64 = 57 * 57;

/// Pairs with `b` at or below this are covered by an external result.
pub const B_MIN: u64 = 10_000;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DnPair {
    pub n: i64,
    pub a: BigInt,
    pub b: BigInt,
    pub r: BigInt,
}

impl DnPair {
    pub fn new(n: i64, a: impl Into<BigInt>, b: impl Into<BigInt>) -> Result<Self, TupleError> {
        let (a, b) = (a.into(), b.into());
        if n == 0 {
            return Err(invalid(n, "n must be nonzero"));
        }
        if !a.is_positive() || b <= a {
            return Err(invalid(n, format!("need 0 < a < b, got a={a}, b={b}")));
        }
        let r = is_perfect_square(&(&a * &b + n))
            .ok_or_else(|| invalid(n, format!("{a}*{b}{n:+} is not a square")))?;
        Ok(DnPair { n, a, b, r })
    }

    /// A D(4)-pair.
    pub fn d4(a: impl Into<BigInt>, b: impl Into<BigInt>) -> Result<Self, TupleError> {
        Self::new(4, a, b)
    }

    /// `a < b < a + 57 sqrt(a)`, tested exactly as `(b - a)^2 < 57^2 a`.
    pub fn is_near(&self) -> bool {
        let d = &self.b - &self.a;
        &d * &d < &self.a * SCOPE_SQ
    }

    /// Near pair with `b > 10^4`.
    pub fn in_scope(&self) -> bool {
        self.n == 4 && self.is_near() && self.b > BigInt::from(B_MIN)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DnTriple {
    pub pair: DnPair,
    pub c: BigInt,
    pub s: BigInt,
    pub t: BigInt,
}

impl DnTriple {
    /// `c` may lie anywhere relative to `a` and `b` but must differ from both.
    pub fn new(pair: DnPair, c: impl Into<BigInt>) -> Result<Self, TupleError> {
        let c = c.into();
        let n = pair.n;
        if !c.is_positive() || c == pair.a || c == pair.b {
            return Err(invalid(n, format!("bad third element {c}")));
        }
        let s = is_perfect_square(&(&pair.a * &c + n))
            .ok_or_else(|| invalid(n, format!("{}*{c}{n:+} is not a square", pair.a)))?;
        let t = is_perfect_square(&(&pair.b * &c + n))
            .ok_or_else(|| invalid(n, format!("{}*{c}{n:+} is not a square", pair.b)))?;
        Ok(DnTriple { pair, c, s, t })
    }

    pub fn d4(a: impl Into<BigInt>, b: impl Into<BigInt>, c: impl Into<BigInt>) -> Result<Self, TupleError> {
        Self::new(DnPair::d4(a, b)?, c)
    }

    pub fn a(&self) -> &BigInt {
        &self.pair.a
    }

    pub fn b(&self) -> &BigInt {
        &self.pair.b
    }

    pub fn r(&self) -> &BigInt {
        &self.pair.r
    }

    /// Elements in increasing order.
    pub fn sorted(&self) -> [BigInt; 3] {
        let mut v = [self.pair.a.clone(), self.pair.b.clone(), self.c.clone()];
        v.sort();
        v
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DnQuadruple {
    pub triple: DnTriple,
    pub d: BigInt,
    pub x: BigInt,
    pub y: BigInt,
    pub z: BigInt,
}

impl DnQuadruple {
    pub fn new(triple: DnTriple, d: impl Into<BigInt>) -> Result<Self, TupleError> {
        let d = d.into();
        let n = triple.pair.n;
        if !d.is_positive() || [triple.a(), triple.b(), &triple.c].contains(&&d) {
            return Err(invalid(n, format!("bad fourth element {d}")));
        }
        let root = |e: &BigInt| {
            is_perfect_square(&(e * &d + n)).ok_or_else(|| invalid(n, format!("{e}*{d}{n:+} is not a square")))
        };
        let x = root(triple.a())?;
        let y = root(triple.b())?;
        let z = root(&triple.c)?;
        Ok(DnQuadruple { triple, d, x, y, z })
    }

    /// Builds a quadruple from four elements given in increasing order.
    pub fn from_sorted(n: i64, e: [BigInt; 4]) -> Result<Self, TupleError> {
        let [a, b, c, d] = e;
        let triple = DnTriple::new(DnPair::new(n, a, b)?, c)?;
        Self::new(triple, d)
    }

    pub fn elements(&self) -> [BigInt; 4] {
        [
            self.triple.pair.a.clone(),
            self.triple.pair.b.clone(),
            self.triple.c.clone(),
            self.d.clone(),
        ]
    }
}

fn invalid(n: i64, detail: impl Into<String>) -> TupleError {
    TupleError::Invalid {
        n,
        detail: detail.into(),
    }
}

/// Outcome of [`verify_dn_set`]; `roots[i][j]` is the root of `e_i e_j + n` for `i < j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DnVerification {
    pub ok: bool,
    pub roots: Vec<Vec<Option<BigInt>>>,
}

/// Checks that `e_i e_j + n` is a square for all `i < j`.
pub fn verify_dn_set(n: i64, elements: &[BigInt]) -> DnVerification {
    let k = elements.len();
    let mut roots = vec![vec![None; k]; k];
    let mut ok = true;
    for i in 0..k {
        for j in i + 1..k {
            let root = is_perfect_square(&(&elements[i] * &elements[j] + n));
            ok &= root.is_some();
            roots[i][j] = root;
        }
    }
    DnVerification { ok, roots }
}

/// `(d₊, d₋)` with `d± = a + b + c + (abc ± rst) / 2`.
pub fn d_plus_minus(triple: &DnTriple) -> Result<(BigInt, BigInt), TupleError> {
    if triple.pair.n != 4 {
        return Err(TupleError::UnsupportedN(triple.pair.n));
    }
    let (a, b, c) = (triple.a(), triple.b(), &triple.c);
    let abc = a * b * c;
    let rst = triple.r() * &triple.s * &triple.t;
    let sum = a + b + c;
    let half = |x: BigInt| -> Result<BigInt, TupleError> {
        let (q, rem) = x.div_rem(&BigInt::from(2));
        if rem.is_zero() {
            Ok(q)
        } else {
            Err(TupleError::Invariant(format!("abc and rst differ in parity for {a},{b},{c}")))
        }
    };
    let dp = &sum + half(&abc + &rst)?;
    let dm = sum + half(abc - rst)?;
    if dm.is_negative() {
        return Err(TupleError::Invariant(format!("negative d- for {a},{b},{c}")));
    }
    Ok((dp, dm))
}

/// Label of a candidate third element `c_ν^±`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CLabel {
    pub nu: u32,
    pub plus: bool,
}

impl CLabel {
    pub const fn minus(nu: u32) -> Self {
        CLabel { nu, plus: false }
    }

    pub const fn plus(nu: u32) -> Self {
        CLabel { nu, plus: true }
    }

    pub fn is_c1_minus(&self) -> bool {
        *self == CLabel::minus(1)
    }
}

/// The labels that must be examined for an in-scope pair.
pub const CAMPAIGN_LABELS: [CLabel; 7] = [
    CLabel::minus(1),
    CLabel::plus(1),
    CLabel::minus(2),
    CLabel::plus(2),
    CLabel::minus(3),
    CLabel::plus(3),
    CLabel::minus(4),
];

impl fmt::Display for CLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "c{}{}", self.nu, if self.plus { '+' } else { '-' })
    }
}

impl FromStr for CLabel {
    type Err = TupleError;

    /// Accepts `c2+`, `c2-`, `c2p`, `c2m`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || TupleError::Invariant(format!("unrecognised c label {s:?}"));
        let body = s.strip_prefix('c').ok_or_else(bad)?;
        let (num, sign) = body.split_at(body.len().saturating_sub(1));
        let nu: u32 = num.parse().map_err(|_| bad())?;
        let plus = match sign {
            "+" | "p" => true,
            "-" | "m" => false,
            _ => return Err(bad()),
        };
        if nu == 0 {
            return Err(bad());
        }
        Ok(CLabel { nu, plus })
    }
}

/// `c_ν^±` for `ν = 1..=count`.
fn c_branch(pair: &DnPair, plus: bool, count: usize) -> Vec<BigInt> {
    let (a, b, r) = (&pair.a, &pair.b, &pair.r);
    let first = if plus { a + b + r * 2u32 } else { a + b - r * 2u32 };
    let k = a * b + 2;
    let shift: BigInt = (a + b) * 2u32;
    let mut out = Vec::with_capacity(count);
    let (mut prev, mut cur) = (BigInt::zero(), first);
    for _ in 0..count {
        out.push(cur.clone());
        let next = &k * &cur - &prev + &shift;
        prev = std::mem::replace(&mut cur, next);
    }
    out
}

/// Value of `c_ν^±` for a D(4)-pair.
pub fn c_value(pair: &DnPair, label: CLabel) -> Result<BigInt, TupleError> {
    if pair.n != 4 {
        return Err(TupleError::UnsupportedN(pair.n));
    }
    Ok(c_branch(pair, label.plus, label.nu as usize).pop().expect("nu >= 1"))
}

/// All positive `c_ν^± <= cap`, ascending by value.
///
/// When the two branches produce the same value, the label with smaller `ν`
/// is kept (with `c₁⁻ = 0` the minus branch is the plus branch shifted by one).
pub fn c_candidates(pair: &DnPair, cap: &BigInt) -> Result<Vec<(CLabel, BigInt)>, TupleError> {
    if pair.n != 4 {
        return Err(TupleError::UnsupportedN(pair.n));
    }
    let (a, b, r) = (&pair.a, &pair.b, &pair.r);
    let k = a * b + 2;
    let shift: BigInt = (a + b) * 2u32;
    let mut all = Vec::new();
    for plus in [false, true] {
        let mut prev = BigInt::zero();
        let mut cur = if plus { a + b + r * 2u32 } else { a + b - r * 2u32 };
        let mut nu = 1u32;
        // Once positive, the sequence is increasing; a nonpositive start may
        // precede positive terms.
        loop {
            if cur.is_positive() {
                if &cur > cap {
                    break;
                }
                all.push((CLabel { nu, plus }, cur.clone()));
            } else if nu > 3 {
                break;
            }
            let next = &k * &cur - &prev + &shift;
            prev = std::mem::replace(&mut cur, next);
            nu += 1;
        }
    }
    all.sort_by(|x, y| x.1.cmp(&y.1).then(x.0.nu.cmp(&y.0.nu)).then(x.0.plus.cmp(&y.0.plus)));
    all.dedup_by(|later, earlier| later.1 == earlier.1);
    for (label, c) in &all {
        if c == a || c == b {
            return Err(TupleError::Invariant(format!("{label} coincides with a pair element")));
        }
        DnTriple::new(pair.clone(), c.clone())
            .map_err(|e| TupleError::Invariant(format!("{label} = {c} is not a valid extension: {e}")))?;
    }
    Ok(all)
}

/// The positive members of `c₁⁻, c₁⁺, c₂⁻, c₂⁺, c₃⁻, c₃⁺, c₄⁻`, ascending.
///
/// Fails if the pair is out of scope or if `c₄⁺ <= b^6`.
pub fn campaign_c_list(pair: &DnPair) -> Result<Vec<(CLabel, BigInt)>, TupleError> {
    if pair.n != 4 {
        return Err(TupleError::UnsupportedN(pair.n));
    }
    if !pair.in_scope() {
        return Err(TupleError::OutOfScope(format!(
            "({}, {}) needs b > {B_MIN} and (b-a)^2 < {SCOPE_SQ} a",
            pair.a, pair.b
        )));
    }
    let minus = c_branch(pair, false, 4);
    let plus = c_branch(pair, true, 4);
    let b6 = pair.b.pow(6);
    if plus[3] <= b6 {
        return Err(TupleError::Invariant(format!("c4+ = {} does not exceed b^6", plus[3])));
    }
    let mut out: Vec<(CLabel, BigInt)> = CAMPAIGN_LABELS
        .iter()
        .map(|l| {
            let v = if l.plus { &plus } else { &minus };
            (*l, v[l.nu as usize - 1].clone())
        })
        .filter(|(_, c)| c.is_positive())
        .collect();
    out.sort_by(|x, y| x.1.cmp(&y.1));
    out.dedup_by(|later, earlier| later.1 == earlier.1);
    for (label, c) in &out {
        DnTriple::new(pair.clone(), c.clone())
            .map_err(|e| TupleError::Invariant(format!("{label}: {e}")))?;
    }
    Ok(out)
}

/// The largest element equals `d₊` of the other three.
pub fn is_regular(quad: &DnQuadruple) -> bool {
    if quad.triple.pair.n != 4 {
        return false;
    }
    let mut e = quad.elements();
    e.sort();
    let [a, b, c, d] = e;
    if !(a < b && b < c && c < d) {
        return false;
    }
    let Ok(triple) = DnPair::d4(a, b).and_then(|p| DnTriple::new(p, c)) else {
        return false;
    };
    match d_plus_minus(&triple) {
        Ok((dp, _)) => dp == d,
        Err(_) => false,
    }
}

/// Every D(n)-quadruple with all elements in `[1, limit]`, sorted.
///
/// For `n = k^2 > 0` the pairs come from factoring `r^2 - n = (r - k)(r + k)`
/// over a smallest-prime-factor sieve; otherwise all pairs are scanned. The
/// quadruples are then the 4-cliques of the pair graph.
pub fn brute_force_quadruples(n: i64, limit: u64) -> Vec<DnQuadruple> {
    if limit < 4 || n == 0 {
        return Vec::new();
    }
    assert!(limit < u32::MAX as u64, "limit must fit in u32");
    let lim = limit as u32;
    let edges = match square_root_i64(n) {
        Some(k) if k > 0 => pairs_by_factoring(k as u64, lim),
        _ => pairs_by_scan(n, lim),
    };
    let graph = UpGraph::new(lim, edges);
    let mut out = Vec::new();
    let mut ab = Vec::new();
    let mut abc = Vec::new();
    for a in 1..=lim {
        let na = graph.neighbours(a);
        for (i, &b) in na.iter().enumerate() {
            intersect(&na[i + 1..], graph.neighbours(b), &mut ab);
            for (j, &c) in ab.iter().enumerate() {
                intersect(&ab[j + 1..], graph.neighbours(c), &mut abc);
                for &d in &abc {
                    let e = [a, b, c, d].map(BigInt::from);
                    let q = DnQuadruple::from_sorted(n, e).expect("clique is a D(n)-quadruple");
                    out.push(q);
                }
            }
        }
    }
    out
}

fn square_root_i64(n: i64) -> Option<i64> {
    if n < 0 {
        return None;
    }
    let r = (n as u64).isqrt();
    (r * r == n as u64).then_some(r as i64)
}

/// Pairs `a < b <= limit` with `ab + k^2` square, via `ab = (r - k)(r + k)`.
fn pairs_by_factoring(k: u64, limit: u32) -> Vec<(u32, u32)> {
    let lim = limit as u64;
    let top = lim + 2 * k + 2;
    let spf = smallest_prime_factors(top as usize);
    let mut edges = Vec::new();
    let mut fac: Vec<(u64, u32)> = Vec::new();
    let mut divs: Vec<u64> = Vec::new();
    // ab <= limit (limit - 1), so r < limit + k.
    let mut r = k + 1;
    while r * r - k * k <= lim * (lim - 1) {
        let prod = (r - k) * (r + k);
        fac.clear();
        factor_into(r - k, &spf, &mut fac);
        factor_into(r + k, &spf, &mut fac);
        fac.sort_unstable();
        merge_powers(&mut fac);
        divs.clear();
        divs.push(1);
        for &(p, e) in &fac {
            let len = divs.len();
            let mut pk = 1u64;
            for _ in 0..e {
                pk *= p;
                for i in 0..len {
                    let d = divs[i] * pk;
                    if d <= lim {
                        divs.push(d);
                    }
                }
            }
        }
        for &a in &divs {
            let b = prod / a;
            if a < b && b <= lim {
                edges.push((a as u32, b as u32));
            }
        }
        r += 1;
    }
    edges
}

fn pairs_by_scan(n: i64, limit: u32) -> Vec<(u32, u32)> {
    let mut edges = Vec::new();
    for a in 1..=limit as i128 {
        for b in a + 1..=limit as i128 {
            let v = a * b + n as i128;
            if v >= 0 && is_perfect_square_u128(v as u128).is_some() {
                edges.push((a as u32, b as u32));
            }
        }
    }
    edges
}

fn smallest_prime_factors(n: usize) -> Vec<u32> {
    let mut spf = vec![0u32; n + 1];
    for i in 2..=n {
        if spf[i] == 0 {
            let mut j = i;
            while j <= n {
                if spf[j] == 0 {
                    spf[j] = i as u32;
                }
                j += i;
            }
        }
    }
    spf
}

fn factor_into(mut x: u64, spf: &[u32], out: &mut Vec<(u64, u32)>) {
    while x > 1 {
        let p = spf[x as usize] as u64;
        let mut e = 0;
        while x % p == 0 {
            x /= p;
            e += 1;
        }
        out.push((p, e));
    }
}

fn merge_powers(f: &mut Vec<(u64, u32)>) {
    let mut w = 0;
    for i in 0..f.len() {
        if w > 0 && f[w - 1].0 == f[i].0 {
            f[w - 1].1 += f[i].1;
        } else {
            f[w] = f[i];
            w += 1;
        }
    }
    f.truncate(w);
}

/// Compressed adjacency keeping only neighbours larger than the vertex.
struct UpGraph {
    start: Vec<usize>,
    adj: Vec<u32>,
}

impl UpGraph {
    fn new(limit: u32, mut edges: Vec<(u32, u32)>) -> Self {
        edges.sort_unstable();
        edges.dedup();
        let mut start = vec![0usize; limit as usize + 2];
        for &(a, _) in &edges {
            start[a as usize + 1] += 1;
        }
        for i in 1..start.len() {
            start[i] += start[i - 1];
        }
        let adj = edges.into_iter().map(|(_, b)| b).collect();
        UpGraph { start, adj }
    }

    fn neighbours(&self, v: u32) -> &[u32] {
        &self.adj[self.start[v as usize]..self.start[v as usize + 1]]
    }
}

fn intersect(x: &[u32], y: &[u32], out: &mut Vec<u32>) {
    out.clear();
    let (mut i, mut j) = (0, 0);
    while i < x.len() && j < y.len() {
        match x[i].cmp(&y[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(x[i]);
                i += 1;
                j += 1;
            }
        }
    }
}

/// All `d` in `[1, limit]` with `ad + n`, `bd + n`, `cd + n` all squares, ascending.
///
/// Scans the root `y` of `e d + n` for the largest element `e`.
pub fn brute_force_extensions(triple: &DnTriple, limit: u64) -> Vec<BigInt> {
    let n = triple.pair.n;
    let [s0, s1, e] = triple.sorted();
    let fits = |x: &BigInt| x.to_u64().filter(|&v| v < 1 << 60);
    if let (Some(e), Some(s0), Some(s1)) = (fits(&e), fits(&s0), fits(&s1)) {
        return extensions_u128(n as i128, [s0 as u128, s1 as u128, e as u128], limit as u128)
            .into_iter()
            .map(BigInt::from)
            .collect();
    }
    let mut out = Vec::new();
    let top = &e * limit + n;
    let mut y = BigInt::one();
    while &y * &y <= top {
        let num = &y * &y - n;
        if num.is_positive() && (&num % &e).is_zero() {
            let d = &num / &e;
            if d <= BigInt::from(limit)
                && is_perfect_square(&(&s0 * &d + n)).is_some()
                && is_perfect_square(&(&s1 * &d + n)).is_some()
            {
                out.push(d);
            }
        }
        y += 1;
    }
    out
}

fn extensions_u128(n: i128, [s0, s1, e]: [u128; 3], limit: u128) -> Vec<u128> {
    let mut out = Vec::new();
    let top = (e * limit) as i128 + n;
    if top < 0 {
        return out;
    }
    let ymax = (top as u128).isqrt();
    let sq = |v: i128| v >= 0 && is_perfect_square_u128(v as u128).is_some();
    for y in 0..=ymax {
        let num = (y * y) as i128 - n;
        if num <= 0 || num as u128 % e != 0 {
            continue;
        }
        let d = num as u128 / e;
        if d <= limit && sq((s0 * d) as i128 + n) && sq((s1 * d) as i128 + n) {
            out.push(d);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn big(n: i64) -> BigInt {
        BigInt::from(n)
    }

    fn bigs(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| big(x)).collect()
    }

    #[test]
    fn verify_examples() {
        let v = verify_dn_set(4, &bigs(&[1, 5, 12, 96]));
        assert!(v.ok);
        assert_eq!(v.roots[1][3], Some(big(22)));
        assert!(!verify_dn_set(4, &bigs(&[1, 5, 13])).ok);
        assert!(verify_dn_set(4, &bigs(&[7])).ok);
    }

    #[test]
    fn d_plus_minus_examples() {
        let t = DnTriple::d4(1, 5, 12).unwrap();
        assert_eq!(d_plus_minus(&t).unwrap(), (big(96), big(0)));
        let t = DnTriple::d4(1, 5, 96).unwrap();
        let (dp, dm) = d_plus_minus(&t).unwrap();
        assert_eq!(dm, big(12));
        assert!(verify_dn_set(4, &[big(1), big(5), big(96), dp.clone()]).ok);
        assert_eq!(&dp - &dm, t.r() * &t.s * &t.t);
    }

    #[test]
    fn c_candidates_small_pair() {
        let p = DnPair::d4(1, 5).unwrap();
        let c = c_candidates(&p, &big(1_000_000)).unwrap();
        assert_eq!(c[0], (CLabel::plus(1), big(12)));
        assert_eq!(c[1], (CLabel::plus(2), big(96)));
        assert!(c.iter().all(|(_, v)| v > &big(0)));
        assert_eq!(c_value(&p, CLabel::minus(1)).unwrap(), big(0));
        for (_, v) in &c {
            assert!(is_perfect_square(&(v + 4)).is_some());
            assert!(is_perfect_square(&(v * 5 + 4)).is_some());
        }
    }

    #[test]
    fn campaign_list_for_family_pair() {
        // Family (1, 0) at k = 200.
        let p = DnPair::d4(39996, 40397).unwrap();
        assert!(p.in_scope());
        let list = campaign_c_list(&p).unwrap();
        assert_eq!(list.len(), 7);
        assert_eq!(list[0].0, CLabel::minus(1));
        assert!(list.windows(2).all(|w| w[0].1 < w[1].1));
        assert!(list.last().unwrap().1 < p.b.pow(6));
        assert!(c_value(&p, CLabel::plus(4)).unwrap() > p.b.pow(6));
        assert!(matches!(
            campaign_c_list(&DnPair::d4(1, 5).unwrap()),
            Err(TupleError::OutOfScope(_))
        ));
    }

    #[test]
    fn last_candidate_below_b6_only_when_c1_minus_is_one() {
        // c4- grows like c1- (ab)^3, so it passes b^6 once c1- >= 2.
        let p = DnPair::d4(9798, 10080).unwrap();
        assert!(p.in_scope());
        assert_eq!(c_value(&p, CLabel::minus(1)).unwrap(), big(2));
        let list = campaign_c_list(&p).unwrap();
        assert_eq!(list.len(), 7);
        assert!(list.last().unwrap().1 > p.b.pow(6));
        assert!(c_value(&p, CLabel::plus(4)).unwrap() > list.last().unwrap().1);
    }

    #[test]
    fn label_round_trip() {
        for l in CAMPAIGN_LABELS {
            assert_eq!(l.to_string().parse::<CLabel>().unwrap(), l);
        }
        assert_eq!("c3m".parse::<CLabel>().unwrap(), CLabel::minus(3));
        assert!("x1+".parse::<CLabel>().is_err());
        assert!("c0+".parse::<CLabel>().is_err());
    }

    #[test]
    fn regularity() {
        let q = DnQuadruple::from_sorted(4, [1, 5, 12, 96].map(BigInt::from)).unwrap();
        assert!(is_regular(&q));
        let q = DnQuadruple::from_sorted(4, [1, 5, 12, 96].map(BigInt::from)).unwrap();
        let mut other = q.clone();
        other.d = big(97);
        assert!(!is_regular(&other));
    }

    #[test]
    fn brute_force_small() {
        let q = brute_force_quadruples(4, 100);
        assert!(q.iter().any(|q| q.elements() == [1, 5, 12, 96].map(BigInt::from)));
        for x in &q {
            assert!(verify_dn_set(4, &x.elements()).ok);
        }
        assert!(brute_force_quadruples(4, 10).is_empty());
    }

    #[test]
    fn factoring_matches_scan() {
        for n in [1i64, 4, 9] {
            let k = square_root_i64(n).unwrap() as u64;
            let mut f = pairs_by_factoring(k, 600);
            f.sort_unstable();
            f.dedup();
            assert_eq!(f, pairs_by_scan(n, 600), "n={n}");
        }
        // Generic path for non-square n.
        let q = brute_force_quadruples(-1, 150);
        for x in &q {
            assert!(verify_dn_set(-1, &x.elements()).ok);
        }
    }

    #[test]
    fn brute_force_extension_examples() {
        let t = DnTriple::d4(1, 5, 12).unwrap();
        assert_eq!(brute_force_extensions(&t, 1_000_000), vec![big(96)]);
        // d₋ = 12 and d₊ = 672 both lie below 10^4.
        let t = DnTriple::d4(1, 5, 96).unwrap();
        assert_eq!(brute_force_extensions(&t, 10_000), vec![big(12), big(672)]);
    }

    fn small_triples() -> impl Strategy<Value = DnTriple> {
        (1u64..400, 1u64..400).prop_filter_map("needs a D(4)-pair", |(a, k)| {
            let b = a + k;
            let pair = DnPair::d4(a, b).ok()?;
            let cs = c_candidates(&pair, &big(1_000_000_000)).ok()?;
            let c = cs.first()?.1.clone();
            DnTriple::new(pair, c).ok()
        })
    }

    proptest! {
        #[test]
        fn d_values_integral_and_extend(t in small_triples()) {
            let (dp, dm) = d_plus_minus(&t).unwrap();
            prop_assert_eq!(&dp - &dm, t.r() * &t.s * &t.t);
            prop_assert!(verify_dn_set(4, &[t.a().clone(), t.b().clone(), t.c.clone(), dp]).ok);
            if dm.is_positive() {
                prop_assert!(verify_dn_set(4, &[t.a().clone(), t.b().clone(), dm, t.c.clone()]).ok);
            }
        }

        #[test]
        fn permutations_verify(t in small_triples(), seed in 0usize..24) {
            let (dp, _) = d_plus_minus(&t).unwrap();
            let mut e = vec![t.a().clone(), t.b().clone(), t.c.clone(), dp];
            // A permutation indexed by `seed`.
            let mut s = seed;
            for i in (1..4).rev() {
                e.swap(i, s % (i + 1));
                s /= i + 1;
            }
            prop_assert!(verify_dn_set(4, &e).ok);
            e.sort();
            prop_assert!(verify_dn_set(4, &e).ok);
        }

        // The chain c_ν^± is a subset of all extensions: {1, 96} also extends by
        // 5 and 12, which come from other fundamental solutions.
        #[test]
        fn candidates_are_extensions(a in 1u64..60, k in 1u64..200) {
            let b = a + k;
            if let Ok(pair) = DnPair::d4(a, b) {
                let cap = 200_000u64;
                let got: Vec<BigInt> = c_candidates(&pair, &big(cap as i64)).unwrap().into_iter().map(|x| x.1).collect();
                let want: Vec<BigInt> = (1..=cap)
                    .filter(|&c| c != a && c != b
                        && is_perfect_square_u128((a * c + 4) as u128).is_some()
                        && is_perfect_square_u128((b * c + 4) as u128).is_some())
                    .map(BigInt::from)
                    .collect();
                for c in &got {
                    prop_assert!(want.contains(c), "{} not an extension", c);
                }
            }
        }
    }
}
