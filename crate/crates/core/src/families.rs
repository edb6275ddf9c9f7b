//! Parametric families of near D(4)-pairs.
//!
//! Writing `j = r - a`, a near pair satisfies `j^2 = m a + 4` with
//! `1 <= m <= 812`. For a residue `t` with `t^2 = 4 (mod m)` and `j = m k + t`,
//!
//! ```text
//! a(k) = m k^2 + 2 t k + (t^2 - 4) / m,    b(k) = a(k) + 2 j(k) + m.
//! ```
//!
//! Polynomials use the representative of `t` in `(-m/2, m/2]`.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::bigarith::{isqrt, mod_sqrt_all};
use crate::dtuples::{DnPair, B_MIN, SCOPE_SQ};

pub const M_MAX: u32 = 812;

/// Family count stated for the catalogue; [`enumerate_families`] reports any difference.
pub const EXPECTED_FAMILY_COUNT: usize = 3691;

/// Note attached to every catalogue about the excluded `m = 0` family.
pub const M_ZERO_NOTE: &str = "m = 0 (b = a + 4, pairs {k-2, k+2}) excluded: solved separately";

/// Quadratic `c2 k^2 + c1 k + c0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Quadratic(pub [BigInt; 3]);

impl Quadratic {
    pub fn eval(&self, k: &BigInt) -> BigInt {
        let [c2, c1, c0] = &self.0;
        (c2 * k + c1) * k + c0
    }

    pub fn coeffs_i64(&self) -> [i64; 3] {
        self.0.clone().map(|c| c.to_i64().expect("small coefficient"))
    }
}

impl fmt::Display for Quadratic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [c2, c1, c0] = &self.0;
        let coeff = |c: &BigInt, tail: &str| match (c.magnitude().is_one(), tail.is_empty()) {
            (true, false) => String::new(),
            _ => c.magnitude().to_string(),
        };
        write!(f, "{}k^2", coeff(c2, "k"))?;
        for (c, tail) in [(c1, "k"), (c0, "")] {
            if !c.is_zero() {
                let sign = if c.is_negative() { '-' } else { '+' };
                write!(f, "{sign}{}{tail}", coeff(c, tail))?;
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ParametricFamily {
    pub m: u32,
    /// Residue in `[0, m)`.
    pub t: u32,
    /// The same residue centred in `(-m/2, m/2]`.
    pub t_centered: i64,
    pub a_poly: Quadratic,
    pub b_poly: Quadratic,
}

impl ParametricFamily {
    pub fn new(m: u32, t: u32) -> Option<Self> {
        if m == 0 || t >= m {
            return None;
        }
        let (mi, ti) = (m as i64, t as i64);
        if (ti * ti - 4).rem_euclid(mi) != 0 {
            return None;
        }
        let tc = if 2 * ti > mi { ti - mi } else { ti };
        let e = (tc * tc - 4) / mi;
        let a = [mi, 2 * tc, e];
        let b = [mi, 2 * tc + 2 * mi, e + 2 * tc + mi];
        Some(ParametricFamily {
            m,
            t,
            t_centered: tc,
            a_poly: Quadratic(a.map(BigInt::from)),
            b_poly: Quadratic(b.map(BigInt::from)),
        })
    }

    pub fn a(&self, k: &BigInt) -> BigInt {
        self.a_poly.eval(k)
    }

    pub fn b(&self, k: &BigInt) -> BigInt {
        self.b_poly.eval(k)
    }

    /// `j(k) = r(k) - a(k) = m k + t`.
    pub fn j(&self, k: &BigInt) -> BigInt {
        k * self.m + self.t_centered
    }

    pub fn key(&self) -> (u32, u32) {
        (self.m, self.t)
    }
}

impl fmt::Display for ParametricFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}, {}}}", self.a_poly, self.b_poly)
    }
}

#[derive(Clone, Debug)]
pub struct FamilyCatalog {
    pub families: Vec<ParametricFamily>,
    pub count: usize,
    /// Family count per `m`, indexed by `m - 1`.
    pub per_m: Vec<usize>,
    pub excluded: &'static str,
    /// Set when `count` differs from [`EXPECTED_FAMILY_COUNT`].
    pub discrepancy: Option<String>,
}

impl FamilyCatalog {
    pub fn get(&self, m: u32, t: u32) -> Option<&ParametricFamily> {
        self.families
            .binary_search_by(|f| f.key().cmp(&(m, t)))
            .ok()
            .map(|i| &self.families[i])
    }
}

/// One family per `m` in `1..=812` and per root `t` of `t^2 = 4 (mod m)`.
pub fn enumerate_families() -> FamilyCatalog {
    let four = BigInt::from(4);
    let mut families = Vec::new();
    let mut per_m = Vec::with_capacity(M_MAX as usize);
    for m in 1..=M_MAX {
        let roots = mod_sqrt_all(&four, m as u64).expect("modulus within brute-force range");
        per_m.push(roots.len());
        families.extend(roots.into_iter().map(|t| ParametricFamily::new(m, t as u32).expect("root")));
    }
    let count = families.len();
    let discrepancy = (count != EXPECTED_FAMILY_COUNT).then(|| {
        let mut by_size: std::collections::BTreeMap<usize, Vec<u32>> = Default::default();
        for (i, &c) in per_m.iter().enumerate() {
            by_size.entry(c).or_default().push(i as u32 + 1);
        }
        let parts: Vec<String> = by_size
            .iter()
            .map(|(c, ms)| format!("{c} roots for {} moduli", ms.len()))
            .collect();
        format!(
            "enumerated {count} families, expected {EXPECTED_FAMILY_COUNT} (difference {}); {}",
            count as i64 - EXPECTED_FAMILY_COUNT as i64,
            parts.join(", ")
        )
    });
    if let Some(d) = &discrepancy {
        log::info!("{d}");
    }
    FamilyCatalog {
        families,
        count,
        per_m,
        excluded: M_ZERO_NOTE,
        discrepancy,
    }
}

/// Why a `(family, k)` instantiation was not returned as a pair.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Rejection {
    NonPositive { a: BigInt },
    NotIncreasing { a: BigInt, b: BigInt },
    /// `b <= 10^4`: covered by an external result.
    SmallB { a: BigInt, b: BigInt },
    /// `(r - a)^2 >= 813 a`.
    OutsideRange { a: BigInt, b: BigInt },
    /// `(b - a)^2 >= 57^2 a`.
    OutOfScope { a: BigInt, b: BigInt },
    NotSquare { a: BigInt, b: BigInt },
}

impl fmt::Display for Rejection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rejection::NonPositive { a } => write!(f, "a = {a} is not positive"),
            Rejection::NotIncreasing { a, b } => write!(f, "b = {b} does not exceed a = {a}"),
            Rejection::SmallB { a, b } => write!(f, "({a}, {b}): b <= {B_MIN}"),
            Rejection::OutsideRange { a, b } => write!(f, "({a}, {b}): (r-a)^2 >= 813a"),
            Rejection::OutOfScope { a, b } => write!(f, "({a}, {b}): (b-a)^2 >= {SCOPE_SQ}a"),
            Rejection::NotSquare { a, b } => write!(f, "({a}, {b}): ab+4 != (a+j)^2"),
        }
    }
}

/// The pair `(a(k), b(k))` if it is a near D(4)-pair with `b > 10^4`.
pub fn instantiate(family: &ParametricFamily, k: &BigInt) -> Result<DnPair, Rejection> {
    let a = family.a(k);
    let b = family.b(k);
    if !a.is_positive() {
        return Err(Rejection::NonPositive { a });
    }
    if b <= a {
        return Err(Rejection::NotIncreasing { a, b });
    }
    let r = &a + family.j(k);
    if &a * &b + 4 != &r * &r {
        return Err(Rejection::NotSquare { a, b });
    }
    let j = &r - &a;
    if &j * &j >= &a * 813u32 {
        return Err(Rejection::OutsideRange { a, b });
    }
    let pair = DnPair::d4(a.clone(), b.clone()).map_err(|_| Rejection::NotSquare {
        a: a.clone(),
        b: b.clone(),
    })?;
    if !pair.is_near() {
        return Err(Rejection::OutOfScope { a, b });
    }
    if pair.b <= BigInt::from(B_MIN) {
        return Err(Rejection::SmallB { a, b });
    }
    Ok(pair)
}

/// Largest `k >= 0` with `a(k) <= a_max`, or `None` if `a(0) > a_max`.
///
/// `a(k) <= A` is equivalent to `m k + t <= isqrt(m A + 4)`, and `a` is
/// increasing on `k >= 0`.
pub fn k_bound(family: &ParametricFamily, a_max: &BigInt) -> Option<BigInt> {
    let zero = BigInt::from(0);
    if &family.a(&zero) > a_max {
        return None;
    }
    let root = isqrt(&(a_max * family.m + 4u32)).ok()?;
    let k = (root - family.t_centered) / family.m;
    debug_assert!(&family.a(&k) <= a_max && &family.a(&(&k + 1)) > a_max);
    Some(k)
}

/// Smallest `k >= 0` whose instantiation is accepted, searched up to `k_max`.
pub fn first_in_scope_k(family: &ParametricFamily, k_max: u64) -> Option<u64> {
    // Scope holds from some point on; binary search on the monotone tail.
    let ok = |k: u64| instantiate(family, &BigInt::from(k)).is_ok();
    if !ok(k_max) {
        return None;
    }
    let (mut lo, mut hi) = (0u64, k_max);
    if ok(0) {
        return Some(0);
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if ok(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Some(hi)
}

/// The family and `k` producing a given near pair, if any.
pub fn locate(pair: &DnPair) -> Option<((u32, u32), BigInt)> {
    let j = &pair.r - &pair.a;
    let m = (&j * &j - 4u32) / &pair.a;
    if &m * &pair.a + 4u32 != &j * &j {
        return None;
    }
    let m = m.to_u32().filter(|&m| (1..=M_MAX).contains(&m))?;
    let t = (&j % m).to_u32()?;
    let fam = ParametricFamily::new(m, t)?;
    let k = (&j - fam.t_centered) / m;
    (!k.is_negative()).then_some(((m, t), k))
}
