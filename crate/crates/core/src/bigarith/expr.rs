use std::fmt;
use std::ops;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed};

use super::{escalate, RealEnclosure, PRECISION_CAP_BITS};
use crate::error::ArithError;

/// A real expression over the integers built from `+ - * /`, integer powers,
/// square roots and natural logarithms.
#[derive(Clone, PartialEq, Eq)]
pub enum Expr {
    Int(BigInt),
    Rat(BigRational),
    Neg(Arc<Expr>),
    Add(Arc<Expr>, Arc<Expr>),
    Sub(Arc<Expr>, Arc<Expr>),
    Mul(Arc<Expr>, Arc<Expr>),
    Div(Arc<Expr>, Arc<Expr>),
    Pow(Arc<Expr>, i64),
    Sqrt(Arc<Expr>),
    Ln(Arc<Expr>),
}

impl Expr {
    pub fn int(n: impl Into<BigInt>) -> Expr {
        Expr::Int(n.into())
    }

    pub fn rat(n: impl Into<BigInt>, d: impl Into<BigInt>) -> Expr {
        Expr::Rat(BigRational::new(n.into(), d.into()))
    }

    pub fn sqrt(self) -> Expr {
        Expr::Sqrt(Arc::new(self))
    }

    pub fn ln(self) -> Expr {
        Expr::Ln(Arc::new(self))
    }

    pub fn pow(self, e: i64) -> Expr {
        Expr::Pow(Arc::new(self), e)
    }

    /// Evaluates with every intermediate carried at `bits` bits.
    ///
    /// No final width guarantee; see [`enclose`] for that.
    pub fn eval(&self, bits: u32) -> Result<RealEnclosure, ArithError> {
        Ok(match self {
            Expr::Int(n) => RealEnclosure::from_int(n.clone(), bits),
            Expr::Rat(q) => RealEnclosure::from_rational(q, bits),
            Expr::Neg(x) => x.eval(bits)?.neg(),
            Expr::Add(x, y) => x.eval(bits)?.add(&y.eval(bits)?),
            Expr::Sub(x, y) => x.eval(bits)?.sub(&y.eval(bits)?),
            Expr::Mul(x, y) => x.eval(bits)?.mul(&y.eval(bits)?),
            Expr::Div(x, y) => x.eval(bits)?.div(&y.eval(bits)?)?,
            Expr::Pow(x, e) => x.eval(bits)?.powi(*e)?,
            Expr::Sqrt(x) => x.eval(bits)?.sqrt()?,
            Expr::Ln(x) => x.eval(bits)?.ln()?,
        })
    }
}

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Int(n) => write!(f, "{n}"),
            Expr::Rat(q) => write!(f, "({q})"),
            Expr::Neg(x) => write!(f, "-{x:?}"),
            Expr::Add(x, y) => write!(f, "({x:?} + {y:?})"),
            Expr::Sub(x, y) => write!(f, "({x:?} - {y:?})"),
            Expr::Mul(x, y) => write!(f, "{x:?}*{y:?}"),
            Expr::Div(x, y) => write!(f, "{x:?}/{y:?}"),
            Expr::Pow(x, e) => write!(f, "{x:?}^{e}"),
            Expr::Sqrt(x) => write!(f, "sqrt({x:?})"),
            Expr::Ln(x) => write!(f, "ln({x:?})"),
        }
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $v:ident) => {
        impl ops::$tr for Expr {
            type Output = Expr;
            fn $m(self, rhs: Expr) -> Expr {
                Expr::$v(Arc::new(self), Arc::new(rhs))
            }
        }
        impl ops::$tr<&Expr> for &Expr {
            type Output = Expr;
            fn $m(self, rhs: &Expr) -> Expr {
                Expr::$v(Arc::new(self.clone()), Arc::new(rhs.clone()))
            }
        }
        impl ops::$tr<i64> for Expr {
            type Output = Expr;
            fn $m(self, rhs: i64) -> Expr {
                Expr::$v(Arc::new(self), Arc::new(Expr::int(rhs)))
            }
        }
    };
}

binop!(Add, add, Add);
binop!(Sub, sub, Sub);
binop!(Mul, mul, Mul);
binop!(Div, div, Div);

impl ops::Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::Neg(Arc::new(self))
    }
}

impl From<i64> for Expr {
    fn from(n: i64) -> Expr {
        Expr::int(n)
    }
}

impl From<&BigInt> for Expr {
    fn from(n: &BigInt) -> Expr {
        Expr::Int(n.clone())
    }
}

/// Encloses `expr` with width at most `2^(1 - precision_bits) * max(1, |value|)`.
///
/// Working precision is raised until the width target is met; domain errors
/// are reported immediately.
pub fn enclose(expr: &Expr, precision_bits: u32) -> Result<RealEnclosure, ArithError> {
    if precision_bits == 0 {
        return Err(ArithError::Domain("precision_bits must be positive".into()));
    }
    let target = precision_bits;
    escalate(target + 32, PRECISION_CAP_BITS, "enclose", |w| {
        let x = expr.eval(w)?;
        if meets_width(&x, target) {
            Ok(x.with_precision(x.precision().max(target + 2)))
        } else {
            Err(ArithError::Undecided { bits: w })
        }
    })
}

/// `width <= 2^(1-p) * max(1, min |x|)`.
pub(crate) fn meets_width(x: &RealEnclosure, p: u32) -> bool {
    let mag = if x.contains_zero() {
        BigRational::one()
    } else {
        let m = x.lo().abs().min(x.hi().abs());
        m.max(BigRational::one())
    };
    x.width() * BigRational::from_integer(super::pow2(p)) <= mag * BigRational::from_integer(BigInt::from(2))
}
