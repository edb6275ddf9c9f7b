//! Exact integer kernels and certified real arithmetic.
//!
//! Integers are `num_bigint::BigInt`. Real quantities are carried as
//! [`RealEnclosure`]s: intervals with dyadic endpoints that are guaranteed to
//! contain the exact value. Nothing here touches hardware floating point except
//! for display helpers.

mod cf;
mod expr;
mod real;

pub use cf::{convergent_exceeding, CfError, ContinuedFractionState};
pub use expr::{enclose, Expr};
pub use real::{nearest_integer_distance, RealEnclosure};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::ArithError;

/// Enclosure precision is never raised beyond this many bits.
pub const PRECISION_CAP_BITS: u32 = 1 << 20;

/// Moduli above this size are rejected by [`mod_sqrt_all`].
pub const MOD_SQRT_BRUTE_FORCE_LIMIT: u64 = 10_000;

/// `floor(sqrt(n))`.
pub fn isqrt(n: &BigInt) -> Result<BigInt, ArithError> {
    if n.is_negative() {
        return Err(ArithError::Domain(format!("isqrt of negative {n}")));
    }
    Ok(n.sqrt())
}

/// `ceil(sqrt(n))` for `n >= 0`.
pub fn ceil_sqrt(n: &BigInt) -> Result<BigInt, ArithError> {
    let r = isqrt(n)?;
    if &(&r * &r) == n {
        Ok(r)
    } else {
        Ok(r + 1)
    }
}

/// Returns the nonnegative square root of `n` when `n` is a perfect square.
pub fn is_perfect_square(n: &BigInt) -> Option<BigInt> {
    if n.is_negative() {
        return None;
    }
    let r = n.sqrt();
    (&r * &r == *n).then_some(r)
}

/// `u128` variant used by the brute-force scanners.
pub fn is_perfect_square_u128(n: u128) -> Option<u128> {
    let r = n.isqrt();
    (r * r == n).then_some(r)
}

/// All residues `t` in `[0, m)` with `t^2 = n (mod m)`, ascending.
///
/// Plain scan over the residues; every modulus in this crate is at most 812.
pub fn mod_sqrt_all(n: &BigInt, m: u64) -> Result<Vec<u64>, ArithError> {
    if m == 0 {
        return Err(ArithError::Domain("modulus must be positive".into()));
    }
    if m > MOD_SQRT_BRUTE_FORCE_LIMIT {
        return Err(ArithError::Domain(format!(
            "modulus {m} exceeds brute-force limit {MOD_SQRT_BRUTE_FORCE_LIMIT}"
        )));
    }
    let mb = BigInt::from(m);
    let target: u64 = {
        let r = ((n % &mb) + &mb) % &mb;
        r.try_into().expect("residue fits in u64")
    };
    let m128 = m as u128;
    Ok((0..m)
        .filter(|&t| ((t as u128 * t as u128) % m128) as u64 == target)
        .collect())
}

/// `2^bits` as a `BigInt`.
pub(crate) fn pow2(bits: u32) -> BigInt {
    BigInt::one() << bits
}

/// Floor of `x / 2^k`.
pub(crate) fn floor_shr(x: &BigInt, k: u32) -> BigInt {
    if k == 0 {
        return x.clone();
    }
    // BigInt's shift rounds toward negative infinity.
    x >> k
}

/// Ceiling of `x / 2^k`.
pub(crate) fn ceil_shr(x: &BigInt, k: u32) -> BigInt {
    if k == 0 {
        return x.clone();
    }
    -((-x) >> k)
}

/// Floor division for a positive divisor.
pub(crate) fn floor_div(x: &BigInt, d: &BigInt) -> BigInt {
    use num_integer::Integer;
    x.div_floor(d)
}

/// Ceiling division for a positive divisor.
pub(crate) fn ceil_div(x: &BigInt, d: &BigInt) -> BigInt {
    use num_integer::Integer;
    let (q, r) = x.div_mod_floor(d);
    if r.is_zero() {
        q
    } else {
        q + 1
    }
}

/// Runs `f` at doubling precisions starting from `start` until it stops
/// reporting [`ArithError::Undecided`], or the cap is reached.
pub fn escalate<T, E>(
    start: u32,
    cap: u32,
    what: &str,
    mut f: impl FnMut(u32) -> Result<T, E>,
) -> Result<T, E>
where
    E: From<ArithError> + AsUndecided,
{
    let mut bits = start.max(16);
    loop {
        match f(bits) {
            Err(e) if e.is_undecided() => {
                if bits >= cap {
                    return Err(ArithError::PrecisionCap {
                        cap,
                        what: what.to_string(),
                    }
                    .into());
                }
                bits = bits.saturating_mul(2).min(cap);
            }
            other => return other,
        }
    }
}

/// Lets [`escalate`] recognise "retry at higher precision" inside wrapped errors.
pub trait AsUndecided {
    fn is_undecided(&self) -> bool;
}

impl AsUndecided for ArithError {
    fn is_undecided(&self) -> bool {
        matches!(self, ArithError::Undecided { .. })
    }
}

impl AsUndecided for crate::error::LinformError {
    fn is_undecided(&self) -> bool {
        matches!(self, crate::error::LinformError::Arith(ArithError::Undecided { .. }))
    }
}

impl AsUndecided for crate::error::ReductionError {
    fn is_undecided(&self) -> bool {
        matches!(
            self,
            crate::error::ReductionError::Arith(ArithError::Undecided { .. })
                | crate::error::ReductionError::Linform(crate::error::LinformError::Arith(
                    ArithError::Undecided { .. }
                ))
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn big(n: i64) -> BigInt {
        BigInt::from(n)
    }

    #[test]
    fn isqrt_examples() {
        assert_eq!(isqrt(&big(0)).unwrap(), big(0));
        assert_eq!(isqrt(&big(99)).unwrap(), big(9));
        let n = BigInt::from(10u32).pow(40) + 1;
        let r = isqrt(&n).unwrap();
        assert_eq!(r, BigInt::from(10u32).pow(20));
        assert!(&r * &r <= n && (&r + 1) * (&r + 1) > n);
        assert!(matches!(isqrt(&big(-1)), Err(ArithError::Domain(_))));
    }

    #[test]
    fn isqrt_matches_naive_scan_up_to_a_million() {
        let mut root: u64 = 0;
        for n in 0u64..=1_000_000 {
            while (root + 1) * (root + 1) <= n {
                root += 1;
            }
            assert_eq!(isqrt(&BigInt::from(n)).unwrap(), BigInt::from(root), "n={n}");
        }
    }

    #[test]
    fn perfect_square_examples() {
        assert_eq!(is_perfect_square(&big(12 * 96 + 4)), Some(big(34)));
        assert_eq!(is_perfect_square(&big(2)), None);
        assert_eq!(is_perfect_square(&big(-4)), None);
        assert_eq!(is_perfect_square(&big(0)), Some(big(0)));
    }

    #[test]
    fn mod_sqrt_examples() {
        assert_eq!(mod_sqrt_all(&big(4), 1).unwrap(), vec![0]);
        assert_eq!(mod_sqrt_all(&big(4), 12).unwrap(), vec![2, 4, 8, 10]);
        assert_eq!(mod_sqrt_all(&big(4), 812).unwrap().len(), 8);
        assert!(mod_sqrt_all(&big(4), 0).is_err());
    }

    #[test]
    fn mod_sqrt_matches_brute_force_for_small_moduli() {
        for m in 1u64..=2000 {
            for n in [4i64, -4, 1, 7] {
                let got = mod_sqrt_all(&big(n), m).unwrap();
                let nm = n.rem_euclid(m as i64) as u64;
                let want: Vec<u64> = (0..m).filter(|t| (t * t) % m == nm).collect();
                assert_eq!(got, want, "n={n} m={m}");
            }
        }
    }

    #[test]
    fn shifts_round_the_right_way() {
        assert_eq!(floor_shr(&big(-5), 1), big(-3));
        assert_eq!(ceil_shr(&big(-5), 1), big(-2));
        assert_eq!(floor_shr(&big(5), 1), big(2));
        assert_eq!(ceil_shr(&big(5), 1), big(3));
        assert_eq!(ceil_div(&big(-7), &big(2)), big(-3));
        assert_eq!(floor_div(&big(-7), &big(2)), big(-4));
    }

    proptest! {
        #[test]
        fn isqrt_brackets(n in any::<u128>()) {
            let b = BigInt::from(n);
            let r = isqrt(&b).unwrap();
            prop_assert!(&r * &r <= b);
            prop_assert!((&r + 1) * (&r + 1) > b);
            let c = ceil_sqrt(&b).unwrap();
            prop_assert!(&c * &c >= b);
        }
    }
}
