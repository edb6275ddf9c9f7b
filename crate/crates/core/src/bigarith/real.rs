use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, Sign};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{ceil_div, ceil_shr, floor_div, floor_shr, pow2};
use crate::error::ArithError;

/// A closed interval `[lo / 2^prec, hi / 2^prec]` known to contain a real value.
///
/// Every operation rounds outward, so the exact result of the operation applied
/// to any points of the operands lies in the returned enclosure.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RealEnclosure {
    lo: BigInt,
    hi: BigInt,
    prec: u32,
}

impl fmt::Debug for RealEnclosure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{:.17e}, {:.17e}]@{}",
            self.lo_f64(),
            self.hi_f64(),
            self.prec
        )
    }
}

impl fmt::Display for RealEnclosure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.12e}", self.mid_f64())
    }
}

impl RealEnclosure {
    /// The point enclosure of an integer.
    pub fn from_int(n: impl Into<BigInt>, prec: u32) -> Self {
        let lo: BigInt = n.into() << prec;
        RealEnclosure {
            hi: lo.clone(),
            lo,
            prec,
        }
    }

    /// Encloses `num / den`.
    pub fn from_ratio(num: &BigInt, den: &BigInt, prec: u32) -> Result<Self, ArithError> {
        if den.is_zero() {
            return Err(ArithError::Domain("division by zero".into()));
        }
        let (num, den) = if den.is_negative() {
            (-num, -den)
        } else {
            (num.clone(), den.clone())
        };
        let scaled = num << prec;
        Ok(RealEnclosure {
            lo: floor_div(&scaled, &den),
            hi: ceil_div(&scaled, &den),
            prec,
        })
    }

    /// Encloses an exact decimal literal such as `"2.306"` or `"-0.001"`.
    pub fn from_decimal(lit: &str, prec: u32) -> Result<Self, ArithError> {
        let bad = || ArithError::Domain(format!("bad decimal literal {lit:?}"));
        let (neg, body) = match lit.strip_prefix('-') {
            Some(b) => (true, b),
            None => (false, lit),
        };
        let (int, frac) = body.split_once('.').unwrap_or((body, ""));
        if int.is_empty() && frac.is_empty() {
            return Err(bad());
        }
        let digits = format!("{int}{frac}");
        let mut num: BigInt = digits.parse().map_err(|_| bad())?;
        if neg {
            num = -num;
        }
        let den = BigInt::from(10).pow(frac.len() as u32);
        Self::from_ratio(&num, &den, prec)
    }

    pub fn from_rational(x: &BigRational, prec: u32) -> Self {
        Self::from_ratio(x.numer(), x.denom(), prec).expect("rational has nonzero denominator")
    }

    /// Smallest enclosure at `prec` bits containing `[lo, hi]`.
    pub fn from_bounds(lo: &BigRational, hi: &BigRational, prec: u32) -> Result<Self, ArithError> {
        if lo > hi {
            return Err(ArithError::Domain("lower bound exceeds upper bound".into()));
        }
        let l = Self::from_rational(lo, prec);
        let h = Self::from_rational(hi, prec);
        Ok(RealEnclosure {
            lo: l.lo,
            hi: h.hi,
            prec,
        })
    }

    pub fn precision(&self) -> u32 {
        self.prec
    }

    pub fn lo(&self) -> BigRational {
        BigRational::new(self.lo.clone(), pow2(self.prec))
    }

    pub fn hi(&self) -> BigRational {
        BigRational::new(self.hi.clone(), pow2(self.prec))
    }

    pub fn width(&self) -> BigRational {
        BigRational::new(&self.hi - &self.lo, pow2(self.prec))
    }

    pub fn lo_f64(&self) -> f64 {
        ratio_to_f64(&self.lo, self.prec)
    }

    pub fn hi_f64(&self) -> f64 {
        ratio_to_f64(&self.hi, self.prec)
    }

    /// Midpoint as `f64`, for display and heuristics only.
    pub fn mid_f64(&self) -> f64 {
        ratio_to_f64(&(&self.lo + &self.hi), self.prec + 1)
    }

    pub fn contains_rational(&self, x: &BigRational) -> bool {
        self.lo() <= *x && *x <= self.hi()
    }

    /// True if `other` is a subset of `self`.
    pub fn contains(&self, other: &RealEnclosure) -> bool {
        let (a, b) = align(self, other);
        a.lo <= b.lo && b.hi <= a.hi
    }

    pub fn is_positive(&self) -> bool {
        self.lo.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.hi.is_negative()
    }

    pub fn contains_zero(&self) -> bool {
        !self.lo.is_positive() && !self.hi.is_negative()
    }

    /// Certified ordering; `None` when the intervals overlap.
    pub fn compare(&self, other: &RealEnclosure) -> Option<Ordering> {
        let (a, b) = align(self, other);
        if a.hi < b.lo {
            Some(Ordering::Less)
        } else if a.lo > b.hi {
            Some(Ordering::Greater)
        } else if a.lo == a.hi && b.lo == b.hi && a.lo == b.lo {
            Some(Ordering::Equal)
        } else {
            None
        }
    }

    /// `self < other` certified, or `Undecided`.
    pub fn certainly_lt(&self, other: &RealEnclosure) -> Result<bool, ArithError> {
        match self.compare(other) {
            Some(Ordering::Less) => Ok(true),
            Some(_) => Ok(false),
            None => Err(self.undecided_with(other)),
        }
    }

    pub(crate) fn undecided(&self) -> ArithError {
        ArithError::Undecided { bits: self.prec }
    }

    fn undecided_with(&self, other: &RealEnclosure) -> ArithError {
        ArithError::Undecided {
            bits: self.prec.max(other.prec),
        }
    }

    /// Re-expresses the enclosure at `prec` bits, rounding outward.
    pub fn with_precision(&self, prec: u32) -> Self {
        match prec.cmp(&self.prec) {
            Ordering::Equal => self.clone(),
            Ordering::Greater => RealEnclosure {
                lo: &self.lo << (prec - self.prec),
                hi: &self.hi << (prec - self.prec),
                prec,
            },
            Ordering::Less => {
                let k = self.prec - prec;
                RealEnclosure {
                    lo: floor_shr(&self.lo, k),
                    hi: ceil_shr(&self.hi, k),
                    prec,
                }
            }
        }
    }

    pub fn neg(&self) -> Self {
        RealEnclosure {
            lo: -&self.hi,
            hi: -&self.lo,
            prec: self.prec,
        }
    }

    pub fn abs(&self) -> Self {
        if !self.lo.is_negative() {
            self.clone()
        } else if !self.hi.is_positive() {
            self.neg()
        } else {
            RealEnclosure {
                lo: BigInt::zero(),
                hi: (-&self.lo).max(self.hi.clone()),
                prec: self.prec,
            }
        }
    }

    pub fn add(&self, other: &RealEnclosure) -> Self {
        let (a, b) = align(self, other);
        RealEnclosure {
            lo: &a.lo + &b.lo,
            hi: &a.hi + &b.hi,
            prec: a.prec,
        }
    }

    pub fn sub(&self, other: &RealEnclosure) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &RealEnclosure) -> Self {
        let (a, b) = align(self, other);
        let p = a.prec;
        let (lo, hi) = if !a.lo.is_negative() && !b.lo.is_negative() {
            (&a.lo * &b.lo, &a.hi * &b.hi)
        } else {
            let c = [&a.lo * &b.lo, &a.lo * &b.hi, &a.hi * &b.lo, &a.hi * &b.hi];
            let lo = c.iter().min().unwrap().clone();
            let hi = c.iter().max().unwrap().clone();
            (lo, hi)
        };
        RealEnclosure {
            lo: floor_shr(&lo, p),
            hi: ceil_shr(&hi, p),
            prec: p,
        }
    }

    pub fn mul_int(&self, k: &BigInt) -> Self {
        let (lo, hi) = (&self.lo * k, &self.hi * k);
        if k.is_negative() {
            RealEnclosure {
                lo: hi,
                hi: lo,
                prec: self.prec,
            }
        } else {
            RealEnclosure {
                lo,
                hi,
                prec: self.prec,
            }
        }
    }

    /// Division; `Undecided` if the divisor enclosure contains zero but is not
    /// exactly zero.
    pub fn div(&self, other: &RealEnclosure) -> Result<Self, ArithError> {
        let (a, b) = align(self, other);
        if b.lo.is_zero() && b.hi.is_zero() {
            return Err(ArithError::Domain("division by zero".into()));
        }
        if b.contains_zero() {
            return Err(b.undecided());
        }
        let p = a.prec;
        let nums = [&a.lo << p, &a.hi << p];
        let mut lo: Option<BigInt> = None;
        let mut hi: Option<BigInt> = None;
        for n in &nums {
            for d in [&b.lo, &b.hi] {
                let (n, d) = if d.is_negative() { (-n, -d) } else { (n.clone(), d.clone()) };
                let f = floor_div(&n, &d);
                let c = ceil_div(&n, &d);
                lo = Some(lo.map_or(f.clone(), |x| x.min(f)));
                hi = Some(hi.map_or(c.clone(), |x| x.max(c)));
            }
        }
        Ok(RealEnclosure {
            lo: lo.unwrap(),
            hi: hi.unwrap(),
            prec: p,
        })
    }

    pub fn recip(&self) -> Result<Self, ArithError> {
        RealEnclosure::from_int(1, self.prec).div(self)
    }

    pub fn sqrt(&self) -> Result<Self, ArithError> {
        if self.hi.is_negative() {
            return Err(ArithError::Domain("square root of a negative value".into()));
        }
        if self.lo.is_negative() {
            return Err(self.undecided());
        }
        let p = self.prec;
        let lo = (&self.lo << p).sqrt();
        let hs = &self.hi << p;
        let mut hi = hs.sqrt();
        if &hi * &hi != hs {
            hi += 1;
        }
        Ok(RealEnclosure { lo, hi, prec: p })
    }

    /// Natural logarithm.
    pub fn ln(&self) -> Result<Self, ArithError> {
        if !self.hi.is_positive() {
            return Err(ArithError::Domain("logarithm of a nonpositive value".into()));
        }
        if !self.lo.is_positive() {
            return Err(self.undecided());
        }
        let p = self.prec;
        let lo = ln_scaled(&self.lo, p)?.lo;
        let hi = ln_scaled(&self.hi, p)?.hi;
        Ok(RealEnclosure { lo, hi, prec: p })
    }

    /// Integer power; negative exponents go through the reciprocal.
    pub fn powi(&self, e: i64) -> Result<Self, ArithError> {
        if e < 0 {
            return self.powi(-e)?.recip();
        }
        let mut result = RealEnclosure::from_int(1, self.prec);
        let mut base = self.clone();
        let mut e = e as u64;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        Ok(result)
    }

    pub fn max(&self, other: &RealEnclosure) -> Self {
        let (a, b) = align(self, other);
        RealEnclosure {
            lo: a.lo.max(b.lo),
            hi: a.hi.max(b.hi),
            prec: a.prec,
        }
    }

    pub fn min(&self, other: &RealEnclosure) -> Self {
        let (a, b) = align(self, other);
        RealEnclosure {
            lo: a.lo.min(b.lo),
            hi: a.hi.min(b.hi),
            prec: a.prec,
        }
    }

    /// Interval hull of the two enclosures.
    pub fn hull(&self, other: &RealEnclosure) -> Self {
        let (a, b) = align(self, other);
        RealEnclosure {
            lo: a.lo.min(b.lo),
            hi: a.hi.max(b.hi),
            prec: a.prec,
        }
    }

    /// `floor` of the lower endpoint.
    pub fn floor_lo(&self) -> BigInt {
        floor_shr(&self.lo, self.prec)
    }

    /// `floor` of the upper endpoint.
    pub fn floor_hi(&self) -> BigInt {
        floor_shr(&self.hi, self.prec)
    }

    /// `ceil` of the upper endpoint.
    pub fn ceil_hi(&self) -> BigInt {
        ceil_shr(&self.hi, self.prec)
    }
}

fn align(a: &RealEnclosure, b: &RealEnclosure) -> (RealEnclosure, RealEnclosure) {
    let p = a.prec.max(b.prec);
    (a.with_precision(p), b.with_precision(p))
}

fn ratio_to_f64(n: &BigInt, prec: u32) -> f64 {
    // Keep 64 significant bits, then scale.
    let bits = n.bits() as i64;
    let shift = (bits - 64).max(0);
    let top = (n >> shift as u32).to_f64().unwrap_or(f64::NAN);
    top * 2f64.powi((shift - prec as i64) as i32)
}

/// `atanh(num/den) * 2^w`: returns `(s, e)` with the true value in `[s, s + e]`.
///
/// Requires `0 <= num/den <= 1/2`.
fn atanh_scaled(num: &BigInt, den: &BigInt, w: u32) -> (BigInt, BigInt) {
    debug_assert!(!num.is_negative() && (num * 2) <= *den);
    let mut pow = floor_div(&(num << w), den);
    let u2 = floor_div(&((num * num) << w), &(den * den));
    let mut sum = BigInt::zero();
    let mut k: u64 = 0;
    while !pow.is_zero() {
        sum += &pow / BigInt::from(2 * k + 1);
        pow = (&pow * &u2) >> w;
        k += 1;
    }
    // Each term is low by at most 3 ulps and the dropped tail is below 3 ulps.
    (sum, BigInt::from(3 * k + 4))
}

/// `ln(x / 2^p)` for a positive scaled integer `x`.
fn ln_scaled(x: &BigInt, p: u32) -> Result<RealEnclosure, ArithError> {
    debug_assert!(x.sign() == Sign::Plus);
    // x / 2^p = y * 2^k with y = x / 2^e in [1, 2), e = bits(x) - 1.
    let e = x.bits() as i64 - 1;
    let k = e - p as i64;
    let kbits = 64 - (k.unsigned_abs()).leading_zeros();
    let w = p + 40 + kbits;

    // ln y = 2 atanh((x - 2^e) / (x + 2^e)).
    let pe = BigInt::one() << (e as u64);
    let (sy, ey) = atanh_scaled(&(x - &pe), &(x + &pe), w);
    // ln 2 = 2 atanh(1/3).
    let (s2, e2) = atanh_scaled(&BigInt::one(), &BigInt::from(3), w);

    let (mut lo, mut hi) = (&sy * 2, (&sy + &ey) * 2);
    let kb = BigInt::from(k);
    if k >= 0 {
        lo += &kb * (&s2 * 2);
        hi += &kb * ((&s2 + &e2) * 2);
    } else {
        lo += &kb * ((&s2 + &e2) * 2);
        hi += &kb * (&s2 * 2);
    }
    lo -= 1;
    Ok(RealEnclosure {
        lo: floor_shr(&lo, w - p),
        hi: ceil_shr(&hi, w - p),
        prec: p,
    })
}

/// Encloses the distance from `x` to the nearest integer.
pub fn nearest_integer_distance(x: &RealEnclosure) -> RealEnclosure {
    let p = x.prec.max(1);
    let x = x.with_precision(p);
    let unit = pow2(p);
    let half = pow2(p - 1);
    let dist = |v: &BigInt| -> BigInt {
        let r = v - floor_shr(v, p) * &unit; // in [0, unit)
        if r <= half {
            r
        } else {
            &unit - r
        }
    };
    let (dl, dh) = (dist(&x.lo), dist(&x.hi));
    let contains_integer = floor_shr(&x.lo, p) != floor_shr(&x.hi, p) || dl.is_zero();
    // Half-integers n + 1/2 correspond to scaled values congruent to `half` mod unit.
    let shifted = |v: &BigInt| floor_shr(&(v - &half), p);
    let contains_half = shifted(&x.lo) != shifted(&x.hi)
        || (&x.lo - &half) == shifted(&x.lo) * &unit;
    let lo = if contains_integer { BigInt::zero() } else { (&dl).min(&dh).clone() };
    let hi = if contains_half { half.clone() } else { dl.max(dh) };
    RealEnclosure { lo, hi, prec: p }
}

impl From<&RealEnclosure> for (BigRational, BigRational) {
    fn from(x: &RealEnclosure) -> Self {
        (x.lo(), x.hi())
    }
}
