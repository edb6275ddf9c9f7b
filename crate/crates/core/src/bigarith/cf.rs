use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use super::RealEnclosure;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CfError {
    /// The enclosure no longer determines the next partial quotient.
    #[error("insufficient precision after {quotients} partial quotients")]
    InsufficientPrecision { quotients: usize },
    /// `theta` is rational and its expansion ended before the requested denominator.
    #[error("continued fraction terminated at denominator {last_q}")]
    Terminated { last_q: BigInt },
}

/// Lazy continued-fraction expansion of an enclosed real.
///
/// Each emitted partial quotient is shared by every real in the enclosure, so
/// each convergent is a convergent of the exact value.
#[derive(Debug, Clone)]
pub struct ContinuedFractionState {
    pub theta: RealEnclosure,
    pub partial_quotients: Vec<BigInt>,
    pub convergents: Vec<(BigInt, BigInt)>,
    /// Remainder interval `[lo, hi]`; `None` once the expansion has stopped.
    rest: Option<(BigRational, BigRational)>,
    terminated: bool,
    insufficient: bool,
}

impl ContinuedFractionState {
    pub fn new(theta: RealEnclosure) -> Self {
        let rest = Some((theta.lo(), theta.hi()));
        ContinuedFractionState {
            theta,
            partial_quotients: Vec::new(),
            convergents: Vec::new(),
            rest,
            terminated: false,
            insufficient: false,
        }
    }

    /// True once a rational `theta` has been fully expanded.
    pub fn is_terminated(&self) -> bool {
        self.terminated
    }

    /// True once the enclosure stopped determining quotients.
    pub fn is_insufficient(&self) -> bool {
        self.insufficient
    }

    /// Produces the next convergent, `Ok(None)` at the end of a rational expansion.
    pub fn next_convergent(&mut self) -> Result<Option<(BigInt, BigInt)>, CfError> {
        if self.terminated {
            return Ok(None);
        }
        let Some((lo, hi)) = self.rest.take() else {
            return Err(CfError::InsufficientPrecision {
                quotients: self.partial_quotients.len(),
            });
        };
        let a = lo.floor().to_integer();
        let a_hi = hi.floor().to_integer();
        let next_rest;
        if a == a_hi {
            let flo = &lo - BigRational::from_integer(a.clone());
            let fhi = &hi - BigRational::from_integer(a.clone());
            if fhi.is_zero() {
                // lo == hi == a: exact rational end.
                self.terminated = true;
                next_rest = None;
            } else if flo.is_zero() {
                // The remainder is unbounded; `a` still holds for the whole interval
                // except the endpoint, where [.., a] is itself the value.
                self.insufficient = true;
                next_rest = None;
            } else {
                next_rest = Some((fhi.recip(), flo.recip()));
            }
        } else if a_hi == &a + 1u32 {
            // Interval straddles N = a_hi. For x in (N - 1/2, N) the expansion is
            // [.., N-1, 1, ..] whose next convergent equals [.., N], so N is
            // safe as a final quotient when lo > N - 1/2.
            let n = BigRational::from_integer(a_hi.clone());
            let half = BigRational::new(BigInt::one(), BigInt::from(2));
            if lo > &n - &half {
                self.push(a_hi);
                self.insufficient = true;
                return Ok(self.convergents.last().cloned());
            }
            self.insufficient = true;
            return Err(CfError::InsufficientPrecision {
                quotients: self.partial_quotients.len(),
            });
        } else {
            self.insufficient = true;
            return Err(CfError::InsufficientPrecision {
                quotients: self.partial_quotients.len(),
            });
        }
        self.push(a);
        self.rest = next_rest;
        Ok(self.convergents.last().cloned())
    }

    fn push(&mut self, a: BigInt) {
        let n = self.convergents.len();
        let (p, q) = match n {
            0 => (a.clone(), BigInt::one()),
            1 => {
                let (p0, q0) = &self.convergents[0];
                (&a * p0 + 1, &a * q0)
            }
            _ => {
                let (p1, q1) = &self.convergents[n - 1];
                let (p0, q0) = &self.convergents[n - 2];
                (&a * p1 + p0, &a * q1 + q0)
            }
        };
        self.partial_quotients.push(a);
        self.convergents.push((p, q));
    }

    /// Checks `|theta - p/q| < 1/q^2` for every real in the enclosure.
    pub fn certifies(&self, p: &BigInt, q: &BigInt) -> bool {
        if !q.is_positive() {
            return false;
        }
        let c = BigRational::new(p.clone(), q.clone());
        let bound = BigRational::new(BigInt::one(), q * q);
        let d1 = (self.theta.lo() - &c).abs();
        let d2 = (self.theta.hi() - &c).abs();
        let exact = self.theta.lo() == self.theta.hi();
        if exact {
            d1 < bound || d1.is_zero()
        } else {
            d1 < bound && d2 < bound
        }
    }

    /// Expands until a convergent with `q > q_min` appears.
    pub fn convergent_exceeding(&mut self, q_min: &BigInt) -> Result<(BigInt, BigInt), CfError> {
        if let Some(pq) = self.convergents.iter().find(|(_, q)| q > q_min) {
            return Ok(pq.clone());
        }
        loop {
            match self.next_convergent()? {
                Some((p, q)) if &q > q_min => {
                    if !self.certifies(&p, &q) {
                        return Err(CfError::InsufficientPrecision {
                            quotients: self.partial_quotients.len(),
                        });
                    }
                    return Ok((p, q));
                }
                Some(_) => {
                    if self.insufficient {
                        return Err(CfError::InsufficientPrecision {
                            quotients: self.partial_quotients.len(),
                        });
                    }
                }
                None => {
                    let last_q = self
                        .convergents
                        .last()
                        .map(|(_, q)| q.clone())
                        .unwrap_or_else(BigInt::one);
                    return Err(CfError::Terminated { last_q });
                }
            }
        }
    }

    /// Index of the convergent `(p, q)` in the list, if present.
    pub fn index_of(&self, q: &BigInt) -> Option<usize> {
        self.convergents.iter().position(|(_, qq)| qq == q)
    }
}

/// First convergent of `theta` with denominator greater than `q_min`.
pub fn convergent_exceeding(
    theta: &RealEnclosure,
    q_min: &BigInt,
) -> Result<(BigInt, BigInt), CfError> {
    ContinuedFractionState::new(theta.clone()).convergent_exceeding(q_min)
}

/// Partial quotients of an exact rational.
#[cfg(test)]
fn rational_quotients(x: &BigRational) -> Vec<BigInt> {
    use num_integer::Integer;
    let (mut n, mut d) = (x.numer().clone(), x.denom().clone());
    let mut out = Vec::new();
    while !d.is_zero() {
        let (q, r) = n.div_mod_floor(&d);
        out.push(q);
        n = d;
        d = r;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bigarith::{enclose, Expr};
    use proptest::prelude::*;

    fn big(n: i64) -> BigInt {
        BigInt::from(n)
    }

    #[test]
    fn one_third() {
        let t = RealEnclosure::from_ratio(&big(1), &big(3), 64).unwrap();
        assert_eq!(convergent_exceeding(&t, &big(2)).unwrap(), (big(1), big(3)));
        let exact = RealEnclosure::from_ratio(&big(1), &big(4), 8).unwrap();
        assert_eq!(convergent_exceeding(&exact, &big(2)).unwrap(), (big(1), big(4)));
    }

    #[test]
    fn golden_ratio() {
        let phi = enclose(&((Expr::int(1) + Expr::int(5).sqrt()) / Expr::int(2)), 80).unwrap();
        assert_eq!(convergent_exceeding(&phi, &big(10)).unwrap(), (big(21), big(13)));
        let mut st = ContinuedFractionState::new(phi);
        for _ in 0..20 {
            st.next_convergent().unwrap();
        }
        assert!(st.partial_quotients.iter().all(|a| a == &big(1)));
        for (p, q) in &st.convergents {
            assert!(st.certifies(p, q));
        }
    }

    #[test]
    fn wide_interval_signals() {
        let lo = BigRational::new(big(3), big(10));
        let hi = BigRational::new(big(4), big(10));
        let t = RealEnclosure::from_bounds(&lo, &hi, 20).unwrap();
        assert!(matches!(
            convergent_exceeding(&t, &big(1000)),
            Err(CfError::InsufficientPrecision { .. })
        ));
    }

    #[test]
    fn rational_terminates() {
        let x = RealEnclosure::from_ratio(&big(45), &big(16), 8).unwrap();
        let mut st = ContinuedFractionState::new(x.clone());
        while st.next_convergent().unwrap().is_some() {}
        assert!(st.is_terminated());
        assert_eq!(st.partial_quotients, rational_quotients(&x.lo()));
        assert!(matches!(
            st.convergent_exceeding(&big(100)),
            Err(CfError::Terminated { .. })
        ));
    }

    #[test]
    fn recurrence_holds() {
        let e = enclose(&Expr::int(7).sqrt(), 300).unwrap();
        let mut st = ContinuedFractionState::new(e);
        for _ in 0..30 {
            st.next_convergent().unwrap();
        }
        let (a, c) = (&st.partial_quotients, &st.convergents);
        for i in 2..c.len() {
            assert_eq!(c[i].0, &a[i] * &c[i - 1].0 + &c[i - 2].0);
            assert_eq!(c[i].1, &a[i] * &c[i - 1].1 + &c[i - 2].1);
        }
        // sqrt(7) = [2; 1, 1, 1, 4, ...]
        assert_eq!(a[..5], [big(2), big(1), big(1), big(1), big(4)]);
    }

    proptest! {
        #[test]
        fn dyadic_rationals_expand_exactly(n in 1i64..1_000_000, k in 0u32..30) {
            let x = RealEnclosure::from_ratio(&big(n), &(BigInt::one() << k), k.max(1)).unwrap();
            let mut st = ContinuedFractionState::new(x.clone());
            while st.next_convergent().unwrap().is_some() {}
            prop_assert_eq!(&st.partial_quotients, &rational_quotients(&x.lo()));
            let (p, q) = st.convergents.last().unwrap();
            prop_assert_eq!(BigRational::new(p.clone(), q.clone()), x.lo());
        }

        #[test]
        fn irrational_convergents_certified(m in 2i64..10_000) {
            prop_assume!(crate::bigarith::is_perfect_square(&big(m)).is_none());
            let e = enclose(&Expr::int(m).sqrt(), 200).unwrap();
            let mut st = ContinuedFractionState::new(e);
            while let Ok(Some((p, q))) = st.next_convergent() {
                prop_assert!(st.certifies(&p, &q));
                if q.bits() > 80 { break; }
            }
        }
    }
}
