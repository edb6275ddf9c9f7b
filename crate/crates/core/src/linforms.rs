//! Linear forms in logarithms attached to an intersection `v_m = w_n`.
//!
//! For a case with initial values `(z0, x0, z1, y1)` an intersection at
//! indices `(m, n)` gives
//!
//! ```text
//! Λ = m log α1 - n log α2 + log μ,
//! α1 = (s + √(ac)) / 2,   α2 = (t + √(bc)) / 2,
//! μ  = √b (x0 √c + z0 √a) / (√a (y1 √c + z1 √b)),
//! ```
//!
//! with `0 < Λ < α1^(2-2m)` in general and `0 < Λ < α2^(1-2n)` when
//! `c = c₁⁻`. Everything here is computed with [`RealEnclosure`]s.

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::bigarith::{escalate, RealEnclosure, PRECISION_CAP_BITS};
use crate::dtuples::{c_value, CLabel, DnPair, DnTriple, B_MIN};
use crate::error::{ArithError, LinformError};
use crate::families::ParametricFamily;
use crate::pell::{admissible_cases, IntersectionCase};

/// Which upper bound on `Λ` applies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FormKind {
    /// `0 < Λ < α1^(2-2m)`.
    Lf1,
    /// `0 < Λ < α2^(1-2n)`, used for `c = c₁⁻`.
    Lf2,
}

impl FormKind {
    /// `Lf2` for `c₁⁻` cases; unlabelled cases use `Lf2` exactly when `c < a`.
    pub fn for_case(triple: &DnTriple, case: &IntersectionCase) -> FormKind {
        match case.c_label {
            Some(l) if l.is_c1_minus() => FormKind::Lf2,
            Some(_) => FormKind::Lf1,
            None if &triple.c < triple.a() => FormKind::Lf2,
            None => FormKind::Lf1,
        }
    }
}

/// The logarithms of one intersection case, enclosed at a fixed precision.
#[derive(Clone, Debug)]
pub struct LinearFormInstance {
    pub triple: DnTriple,
    pub case: IntersectionCase,
    pub kind: FormKind,
    pub alpha1: RealEnclosure,
    pub alpha2: RealEnclosure,
    pub mu: RealEnclosure,
    pub log_alpha1: RealEnclosure,
    pub log_alpha2: RealEnclosure,
    pub log_mu: RealEnclosure,
}

fn int(n: impl Into<BigInt>, bits: u32) -> RealEnclosure {
    RealEnclosure::from_int(n, bits)
}

fn dec(lit: &str, bits: u32) -> Result<RealEnclosure, ArithError> {
    RealEnclosure::from_decimal(lit, bits)
}

fn sqrt_int(n: BigInt, bits: u32) -> Result<RealEnclosure, ArithError> {
    int(n, bits).sqrt()
}

/// `(sx x0 √(bc) + z0 √(ab)) / (sy y1 √(ac) + z1 √(ab))`, which equals `μ` for
/// `sx = sy = 1`; the four sign choices are its conjugates.
fn mu_with_signs(
    t: &DnTriple,
    case: &IntersectionCase,
    sx: i32,
    sy: i32,
    bits: u32,
) -> Result<RealEnclosure, ArithError> {
    let (a, b, c) = (t.a(), t.b(), &t.c);
    let sab = sqrt_int(a * b, bits)?;
    let sbc = sqrt_int(b * c, bits)?;
    let sac = sqrt_int(a * c, bits)?;
    let num = sbc.mul_int(&(&case.x0 * sx)).add(&sab.mul_int(&case.z0));
    let den = sac.mul_int(&(&case.y1 * sy)).add(&sab.mul_int(&case.z1));
    num.div(&den)
}

impl LinearFormInstance {
    /// Encloses `α1, α2, μ` and their logarithms with `bits` bits of working precision.
    ///
    /// Fails with `Undecided` if `μ` cannot be separated from zero at this precision.
    pub fn new(triple: &DnTriple, case: &IntersectionCase, bits: u32) -> Result<Self, LinformError> {
        let (a, b, c) = (triple.a(), triple.b(), &triple.c);
        let half = RealEnclosure::from_ratio(&BigInt::one(), &BigInt::from(2), bits)?;
        let alpha1 = int(triple.s.clone(), bits).add(&sqrt_int(a * c, bits)?).mul(&half);
        let alpha2 = int(triple.t.clone(), bits).add(&sqrt_int(b * c, bits)?).mul(&half);
        let mu = mu_with_signs(triple, case, 1, 1, bits)?;
        if mu.is_negative() {
            return Err(LinformError::Precondition(format!("μ < 0 for case {}", case.id())));
        }
        Ok(LinearFormInstance {
            triple: triple.clone(),
            case: case.clone(),
            kind: FormKind::for_case(triple, case),
            log_alpha1: alpha1.ln()?,
            log_alpha2: alpha2.ln()?,
            log_mu: mu.ln()?,
            alpha1,
            alpha2,
            mu,
        })
    }

    pub fn precision(&self) -> u32 {
        self.log_mu.precision()
    }

    /// `Λ = m log α1 - n log α2 + log μ`.
    pub fn lambda(&self, m: u64, n: u64) -> RealEnclosure {
        self.log_alpha1
            .mul_int(&BigInt::from(m))
            .sub(&self.log_alpha2.mul_int(&BigInt::from(n)))
            .add(&self.log_mu)
    }

    /// `α1^(2-2m)` or `α2^(1-2n)` according to [`FormKind`].
    pub fn lambda_upper_bound(&self, m: u64, n: u64) -> Result<RealEnclosure, ArithError> {
        match self.kind {
            FormKind::Lf1 => self.alpha1.powi(2 - 2 * m as i64),
            FormKind::Lf2 => self.alpha2.powi(1 - 2 * n as i64),
        }
    }

    /// The four conjugates of `μ`.
    pub fn mu_conjugates(&self) -> Result<Vec<RealEnclosure>, ArithError> {
        let bits = self.precision();
        let mut out = Vec::with_capacity(4);
        for sx in [1, -1] {
            for sy in [1, -1] {
                out.push(mu_with_signs(&self.triple, &self.case, sx, sy, bits)?);
            }
        }
        Ok(out)
    }
}

/// Certified enclosure of `Λ` together with the applicable upper bound.
#[derive(Clone, Debug)]
pub struct LambdaCheck {
    pub lambda: RealEnclosure,
    pub upper: RealEnclosure,
    pub kind: FormKind,
    /// `0 < Λ < upper`, decided.
    pub inside: bool,
}

/// Encloses `Λ` at `(m, n)` with at least `precision_bits` bits, raising the
/// precision until both `0 < Λ` and `Λ < upper` are decided.
pub fn lambda_enclosure(
    triple: &DnTriple,
    case: &IntersectionCase,
    m: u64,
    n: u64,
    precision_bits: u32,
) -> Result<LambdaCheck, LinformError> {
    escalate(precision_bits.max(64), PRECISION_CAP_BITS, "lambda enclosure", |bits| {
        let inst = LinearFormInstance::new(triple, case, bits + (m.max(n) + 1).ilog2() + 8)?;
        let lambda = inst.lambda(m, n);
        let upper = inst.lambda_upper_bound(m, n)?;
        let zero = int(0, bits);
        let positive = zero.certainly_lt(&lambda)?;
        let below = lambda.certainly_lt(&upper)?;
        Ok(LambdaCheck {
            lambda,
            upper,
            kind: inst.kind,
            inside: positive && below,
        })
    })
}

/// Upper bound for the absolute logarithmic height of `μ`.
///
/// With `N = ∏ den_j` over the four conjugates, `∏ (den_j X - num_j)` is an
/// integer multiple of a power of the minimal polynomial of `μ`, so
/// `h(μ) <= (log N + Σ log max(1, |μ_j|)) / 4`. `N = 16 a²(b-c)²`, or
/// `a²(b-c)²` when all four initial values are even.
pub fn height_mu_bound(triple: &DnTriple, case: &IntersectionCase, bits: u32) -> Result<RealEnclosure, LinformError> {
    let inst = LinearFormInstance::new(triple, case, bits)?;
    height_from_instance(&inst)
}

fn height_from_instance(inst: &LinearFormInstance) -> Result<RealEnclosure, LinformError> {
    let (t, case) = (&inst.triple, &inst.case);
    let bits = inst.precision();
    let (a, b, c) = (t.a(), t.b(), &t.c);
    let bc = b - c;
    let mut lead: BigInt = a * a * &bc * &bc;
    let even = [&case.z0, &case.x0, &case.z1, &case.y1]
        .iter()
        .all(|v| (*v % 2u32).is_zero());
    if !even {
        lead *= 16u32;
    }
    let one = int(1, bits);
    let mut sum = int(lead, bits).ln()?;
    for conj in inst.mu_conjugates()? {
        sum = sum.add(&conj.abs().max(&one).ln()?);
    }
    Ok(sum.mul(&RealEnclosure::from_ratio(&BigInt::one(), &BigInt::from(4), bits)?))
}

/// Height bound valid for every admissible case of `label`.
pub fn height_mu_bound_for_label(triple: &DnTriple, label: CLabel, bits: u32) -> Result<RealEnclosure, LinformError> {
    let mut best: Option<RealEnclosure> = None;
    for case in admissible_cases(triple, label)? {
        let h = height_mu_bound(triple, &case, bits)?;
        best = Some(match best {
            None => h,
            Some(b) => b.max(&h),
        });
    }
    best.ok_or_else(|| LinformError::Precondition(format!("no admissible case for {label}")))
}

/// Closed form `¼ log(a (b-c) b (√a + √c)²)` for `c = c₁⁻`.
pub fn height_mu_c1_minus_closed_form(triple: &DnTriple, bits: u32) -> Result<RealEnclosure, LinformError> {
    let (a, b, c) = (triple.a(), triple.b(), &triple.c);
    if c >= a {
        return Err(LinformError::Precondition("closed form needs c < a".into()));
    }
    let root_sum = sqrt_int(a.clone(), bits)?.add(&sqrt_int(c.clone(), bits)?);
    let v = int(a * (b - c) * b, bits).mul(&root_sum.mul(&root_sum));
    Ok(v.ln()?.mul(&RealEnclosure::from_ratio(&BigInt::one(), &BigInt::from(4), bits)?))
}

/// The sufficient conditions behind `m log α1 - (n+0.001) log α2 < 0`
/// (`c₁⁻`) or `(m-0.001) log α1 - n log α2 < 0` (other labels) for `n >= 3`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lemma3Report {
    /// `μ > 0.99`; only checked for `c₁⁻`.
    pub mu_above: bool,
    /// `α2^5 log α2 > 10^4`; only checked for `c₁⁻`.
    pub alpha2_large: bool,
    /// `c₁⁻`: `α2^(-5) < 0.001 log α2 + log μ`; otherwise
    /// `α1^(-8) < 0.001 log α1 + log μ`.
    pub inequality: bool,
}

impl Lemma3Report {
    pub fn holds(&self) -> bool {
        self.mu_above && self.alpha2_large && self.inequality
    }
}

/// Checks the index inequality for `n >= 3` on one instance.
///
/// Requires `b > 10^4`. For `c₁⁻` with `x0 ≠ y1` the ratio `μ` is far from 1
/// and the report does not hold; those cases are bounded directly instead.
pub fn lemma3_check(inst: &LinearFormInstance, n: u64) -> Result<Lemma3Report, LinformError> {
    if inst.triple.b() <= &BigInt::from(B_MIN) {
        return Err(LinformError::OutOfScope(format!("b = {} <= 10^4", inst.triple.b())));
    }
    if n < 3 {
        return Err(LinformError::Precondition(format!("n = {n} < 3")));
    }
    let bits = inst.precision();
    let milli = dec("0.001", bits)?;
    match inst.kind {
        FormKind::Lf2 => {
            let mu_above = dec("0.99", bits)?.certainly_lt(&inst.mu)?;
            let a2 = &inst.alpha2;
            let alpha2_large = int(10_000, bits).certainly_lt(&a2.powi(5)?.mul(&inst.log_alpha2))?;
            let lhs = a2.powi(-5)?;
            let rhs = milli.mul(&inst.log_alpha2).add(&inst.log_mu);
            Ok(Lemma3Report {
                mu_above,
                alpha2_large,
                inequality: lhs.certainly_lt(&rhs)?,
            })
        }
        FormKind::Lf1 => {
            let lhs = inst.alpha1.powi(-8)?;
            let rhs = milli.mul(&inst.log_alpha1).add(&inst.log_mu);
            Ok(Lemma3Report {
                mu_above: true,
                alpha2_large: true,
                inequality: lhs.certainly_lt(&rhs)?,
            })
        }
    }
}

/// Lower bound `(2/57)(ν - 0.001) √a log α1 - δ` for `n`, where `δ = 0.001`
/// for `c₁⁻` and `0` otherwise.
pub fn lemma4_lower_bound(nu: u64, triple: &DnTriple, c1_minus: bool, bits: u32) -> Result<RealEnclosure, LinformError> {
    if !triple.pair.in_scope() {
        return Err(LinformError::OutOfScope("pair is not an in-scope near pair".into()));
    }
    if nu == 0 {
        return Err(LinformError::Precondition("ν must be positive".into()));
    }
    let half = RealEnclosure::from_ratio(&BigInt::one(), &BigInt::from(2), bits)?;
    let alpha1 = int(triple.s.clone(), bits)
        .add(&sqrt_int(triple.a() * &triple.c, bits)?)
        .mul(&half);
    let coeff = RealEnclosure::from_ratio(&BigInt::from(2), &BigInt::from(57), bits)?;
    let mut v = coeff
        .mul(&int(nu, bits).sub(&dec("0.001", bits)?))
        .mul(&sqrt_int(triple.a().clone(), bits)?)
        .mul(&alpha1.ln()?);
    if c1_minus {
        v = v.sub(&dec("0.001", bits)?);
    }
    Ok(v)
}

/// Inputs to the two-logarithm lower bound for
/// `Λ = b1 log γ1 - b2 log γ2`.
#[derive(Clone, Debug)]
pub struct MignotteParameters {
    /// Degree `D` of the number field over the reals.
    pub d: u32,
    pub rho: RealEnclosure,
    pub a1: RealEnclosure,
    pub a2: RealEnclosure,
    pub h: RealEnclosure,
    pub b1: RealEnclosure,
    pub b2: RealEnclosure,
}

#[derive(Clone, Debug)]
pub struct MignotteBound {
    pub c0: RealEnclosure,
    /// `log |Λ| >= log_lower`.
    pub log_lower: RealEnclosure,
}

/// `C0` as a function of `κ = log ρ`, `h`, `a1`, `a2`.
///
/// Decreasing in `h`, `a1` and `a2`.
pub fn mignotte_c0(
    kappa: &RealEnclosure,
    h: &RealEnclosure,
    a1: &RealEnclosure,
    a2: &RealEnclosure,
) -> Result<RealEnclosure, ArithError> {
    let bits = kappa.precision();
    let one = int(1, bits);
    let chi = h.div(kappa)?;
    let v = chi.mul_int(&4.into()).add(&int(4, bits)).add(&chi.recip()?);
    let third = RealEnclosure::from_ratio(&1.into(), &3.into(), bits)?;
    let ninth = RealEnclosure::from_ratio(&1.into(), &9.into(), bits)?;
    let t1 = kappa
        .mul_int(&4.into())
        .div(&v.mul_int(&3.into()))?
        .mul(&a1.recip()?.add(&a2.recip()?));
    let chi1 = one.add(&chi);
    let t2 = int(32, bits)
        .mul(&int(2, bits).sqrt()?)
        .mul(&chi1)
        .mul(&chi1.sqrt()?)
        .div(&v.mul(&v).mul_int(&3.into()).mul(&a1.mul(a2).sqrt()?))?;
    let inner = third.add(&ninth.add(&t1).add(&t2).sqrt()?);
    let pre = int(2, bits).add(&chi.mul(&chi1).mul_int(&2.into()).recip()?);
    let prod = pre.mul(&inner);
    prod.mul(&prod).div(&kappa.mul(kappa).mul(kappa))
}

/// `log |Λ| >= -(C0 + 0.06)(κ + h)² a1 a2` after checking
/// `a1 a2 >= max(20, 4κ²)` and
/// `h >= max(3.5, 1.5κ, D(log(b1/a2 + b2/a1) + log κ + 1.377) + 0.023)`.
pub fn mignotte_lower_bound(p: &MignotteParameters) -> Result<MignotteBound, LinformError> {
    let bits = p.rho.precision();
    let one = int(1, bits);
    if !one.certainly_lt(&p.rho)? {
        return Err(LinformError::Constraint("ρ must exceed 1".into()));
    }
    if !(p.a1.is_positive() && p.a2.is_positive() && p.b1.is_positive() && p.b2.is_positive()) {
        return Err(LinformError::Constraint("a1, a2, b1, b2 must be positive".into()));
    }
    let kappa = p.rho.ln()?;
    let a1a2 = p.a1.mul(&p.a2);
    let need_a = int(20, bits).max(&kappa.mul(&kappa).mul_int(&4.into()));
    if a1a2.certainly_lt(&need_a)? {
        return Err(LinformError::Constraint("a1 a2 < max(20, 4κ²)".into()));
    }
    let h_log = p
        .b1
        .div(&p.a2)?
        .add(&p.b2.div(&p.a1)?)
        .ln()?
        .add(&kappa.ln()?)
        .add(&dec("1.377", bits)?)
        .mul_int(&p.d.into())
        .add(&dec("0.023", bits)?);
    let need_h = dec("3.5", bits)?.max(&kappa.mul(&dec("1.5", bits)?)).max(&h_log);
    if p.h.certainly_lt(&need_h)? {
        return Err(LinformError::Constraint("h below its lower limit".into()));
    }
    let c0 = mignotte_c0(&kappa, &p.h, &p.a1, &p.a2)?;
    let kh = kappa.add(&p.h);
    let log_lower = c0.add(&dec("0.06", bits)?).mul(&kh).mul(&kh).mul(&a1a2).neg();
    Ok(MignotteBound { c0, log_lower })
}

/// Values asserted for the large-`a` argument: `C0 < 0.2411`, `X < 14170`,
/// `X < 11231` when `h < 35`, and `a < 6.55·10^11`.
pub const CLAIMED_C0: &str = "0.2411";
pub const CLAIMED_X_THRESHOLD: u64 = 14170;
pub const CLAIMED_X_SMALL_H: u64 = 11231;
pub const CLAIMED_A_BOUND: u64 = 655_000_000_000;
/// Offset in `h = 4 log X - offset` as used in the asserted chain.
pub const CLAIMED_H_OFFSET: &str = "2.306";
/// Coefficient in `X < F (4 log X - 0.696)²` as used in the asserted chain.
pub const CLAIMED_COEFFICIENT: &str = "10.055";

/// One evaluation of the chain `C0 -> X threshold -> bound on a`.
#[derive(Clone, Debug)]
pub struct BoundChain {
    /// Upper bound for `C0` over the admissible parameter range, or the asserted value.
    pub c0: RealEnclosure,
    /// `F` in `X < F (κ + h(X))² + ε`.
    pub coefficient: RealEnclosure,
    /// `h(X) = 4 log X - offset` for large `X`.
    pub h_offset: RealEnclosure,
    /// Every solution has `X < x_threshold` when `h >= 35`.
    pub x_threshold: BigInt,
    /// Every `X` with `h(X) < 35` is below this.
    pub x_small_h: BigInt,
    /// The resulting bound `a < a_bound`.
    pub a_bound: BigInt,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AuxiliaryCheck {
    pub claim: String,
    pub holds: bool,
    pub detail: String,
}

/// Outcome of re-deriving the bound `a < 6.55·10^11` for `c = c₁⁻`.
#[derive(Clone, Debug)]
pub struct Proposition1Report {
    /// The chain with the asserted `C0`, `F` and `h` offset taken at face value.
    pub with_claimed_constants: BoundChain,
    /// The chain with every constant recomputed (`ρ = 5`, `D = 4`).
    pub recomputed: BoundChain,
    /// Infimum of `C0` over all `h, a1, a2` for `ρ = 5`.
    pub c0_infimum: RealEnclosure,
    pub auxiliary: Vec<AuxiliaryCheck>,
    pub discrepancies: Vec<String>,
}

/// Pass/fail of one reproduced value against the asserted one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClaimComparison {
    pub name: &'static str,
    pub reproduced: String,
    pub claimed: String,
    pub ok: bool,
}

impl Proposition1Report {
    /// Compares the recomputed chain with the asserted values (reproduced must not exceed them).
    pub fn comparisons(&self) -> Vec<ClaimComparison> {
        let r = &self.recomputed;
        let claimed_c0 = dec(CLAIMED_C0, r.c0.precision()).expect("literal");
        vec![
            ClaimComparison {
                name: "C0",
                reproduced: format!("{:.6}", r.c0.hi_f64()),
                claimed: CLAIMED_C0.into(),
                ok: r.c0.certainly_lt(&claimed_c0).unwrap_or(false),
            },
            ClaimComparison {
                name: "X threshold",
                reproduced: r.x_threshold.to_string(),
                claimed: CLAIMED_X_THRESHOLD.to_string(),
                ok: r.x_threshold <= BigInt::from(CLAIMED_X_THRESHOLD),
            },
            ClaimComparison {
                name: "X bound for h < 35",
                reproduced: r.x_small_h.to_string(),
                claimed: CLAIMED_X_SMALL_H.to_string(),
                ok: r.x_small_h <= BigInt::from(CLAIMED_X_SMALL_H),
            },
            ClaimComparison {
                name: "a bound",
                reproduced: r.a_bound.to_string(),
                claimed: CLAIMED_A_BOUND.to_string(),
                ok: r.a_bound <= BigInt::from(CLAIMED_A_BOUND),
            },
        ]
    }

    pub fn reproduces_claims(&self) -> bool {
        self.comparisons().iter().all(|c| c.ok)
    }
}

const PIPELINE_BITS: u32 = 160;

/// Smallest integer `T >= start` with `pred(T)` certified, found by doubling then bisection.
///
/// `pred` must be monotone (false then true).
pub(crate) fn least_integer_where(
    start: u64,
    pred: impl Fn(&BigInt) -> Result<bool, ArithError>,
) -> Result<BigInt, ArithError> {
    let mut lo = BigInt::from(start.max(1));
    if pred(&lo)? {
        return Ok(lo);
    }
    let mut hi: BigInt = &lo * 2u32;
    while !pred(&hi)? {
        lo = hi.clone();
        hi *= 2u32;
        if hi.bits() > 4096 {
            return Err(ArithError::Domain("no threshold below 2^4096".into()));
        }
    }
    while &hi - &lo > BigInt::one() {
        let mid: BigInt = (&lo + &hi) / 2u32;
        if pred(&mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Least integer `T` such that `X - F (κ + h(X))² - eps > 0` and the left side
/// is increasing for every `X >= T`, where `h(X) = 4 log(X/8 + e2) + k0`.
///
/// With `h' <= 4/X`, monotonicity follows from `X >= 8F(κ + h(X))` and `X >= 32F`.
fn certified_threshold(
    f: &RealEnclosure,
    kappa: &RealEnclosure,
    e2: &RealEnclosure,
    k0: &RealEnclosure,
    eps: &RealEnclosure,
) -> Result<BigInt, ArithError> {
    let bits = f.precision();
    let h_of = |x: &RealEnclosure| -> Result<RealEnclosure, ArithError> {
        let eighth = RealEnclosure::from_ratio(&1.into(), &8.into(), bits)?;
        Ok(x.mul(&eighth).add(e2).ln()?.mul_int(&4.into()).add(k0))
    };
    let ok = |t: &BigInt| -> Result<bool, ArithError> {
        let x = int(t.clone(), bits);
        let kh = kappa.add(&h_of(&x)?);
        let g = x.sub(&f.mul(&kh).mul(&kh)).sub(eps);
        let slope1 = f.mul(&kh).mul_int(&8.into()).certainly_lt(&x).unwrap_or(false);
        let slope2 = f.mul_int(&32.into()).certainly_lt(&x).unwrap_or(false);
        Ok(g.is_positive() && slope1 && slope2)
    };
    // `ok` is not monotone near the origin, so start past the last sign change
    // of the f64 fixed point and step down only while it stays certified.
    let (ff, kf, e2f, k0f, ef) = (f.hi_f64(), kappa.hi_f64(), e2.hi_f64(), k0.hi_f64(), eps.hi_f64());
    let mut x = 1e4f64;
    for _ in 0..200 {
        let kh = kf + 4.0 * (x / 8.0 + e2f).ln() + k0f;
        x = ff * kh * kh + ef;
    }
    let guess = (x.ceil() as u64).max(1);
    let mut t = least_integer_where(guess, ok)?;
    while t > BigInt::one() && ok(&(&t - 1u32))? {
        t -= 1u32;
    }
    Ok(t)
}

/// `a < ((T + 0.001/(4.002 log 10^5)) (57/2)(4.002/1.999)/0.999)²` from
/// `X > (2/57)(ν-0.001)√a log α1 / ((ν+2.002) log α2) - ...` with `ν >= 2`
/// and `log α1 / log α2 > 0.999`.
fn a_bound_from_threshold(t: &BigInt, bits: u32) -> Result<BigInt, ArithError> {
    let ln_1e5 = int(100_000, bits).ln()?;
    let slack = dec("0.001", bits)?.div(&dec("4.002", bits)?.mul(&ln_1e5))?;
    let factor = RealEnclosure::from_ratio(&57.into(), &2.into(), bits)?
        .mul(&dec("4.002", bits)?.div(&dec("1.999", bits)?)?)
        .div(&dec("0.999", bits)?)?;
    let root = int(t.clone(), bits).add(&slack).mul(&factor);
    Ok(root.mul(&root).ceil_hi())
}

fn chain(
    c0: RealEnclosure,
    coefficient: RealEnclosure,
    kappa: &RealEnclosure,
    e2: &RealEnclosure,
    k0: &RealEnclosure,
    eps: &RealEnclosure,
    threshold_for_a: Option<u64>,
) -> Result<BoundChain, ArithError> {
    let bits = kappa.precision();
    let x_threshold = certified_threshold(&coefficient, kappa, e2, k0, eps)?;
    // h(X) < 35 bounds X directly; the threshold is the least T with h(T) >= 35.
    let eighth = RealEnclosure::from_ratio(&1.into(), &8.into(), bits)?;
    let h35 = int(35, bits);
    let x_small_h = least_integer_where(1, |t| {
        let h = int(t.clone(), bits).mul(&eighth).add(e2).ln()?.mul_int(&4.into()).add(k0);
        Ok(!h.certainly_lt(&h35).unwrap_or(true))
    })?;
    let basis = threshold_for_a.map(BigInt::from).unwrap_or_else(|| x_threshold.clone());
    let a_bound = a_bound_from_threshold(&basis, bits)?;
    let h_offset = k0.add(&eighth.ln()?.mul_int(&4.into())).neg();
    Ok(BoundChain {
        c0,
        coefficient,
        h_offset,
        x_threshold,
        x_small_h,
        a_bound,
    })
}

/// Re-derives the bound on `a` for `c = c₁⁻` with `ρ = 5`, `D = 4`,
/// `a1 = 8(ν+2.002) log α2`, `a2 = 8.348 log α2`, `X = n/((ν+2.002) log α2)`,
/// `ν >= 2` and `α2 > 10^5`.
///
/// Two chains are produced: one taking the asserted constants at face value
/// (`F = 10.055`, `h = 4 log X - 2.306`) and one recomputing `C0`, `F` and the
/// smallest admissible `h`.
pub fn proposition1_pipeline() -> Result<Proposition1Report, LinformError> {
    let bits = PIPELINE_BITS;
    let kappa = int(5, bits).ln()?;
    let ln_alpha2 = int(100_000, bits).ln()?;
    let a1_min = dec("4.002", bits)?.mul_int(&8.into()).mul(&ln_alpha2);
    let a2_min = dec("8.348", bits)?.mul(&ln_alpha2);
    let h35 = int(35, bits);

    // C0 is decreasing in h, a1, a2; its supremum over h >= 35 sits at the corner.
    let c0_sup = mignotte_c0(&kappa, &h35, &a1_min, &a2_min)?;
    let huge = int(BigInt::from(10).pow(60), bits);
    let c0_infimum = mignotte_c0(&kappa, &huge, &huge, &huge)?;

    // (2n - 1) log α2 < (C0 + 0.06)(κ+h)² a1 a2 gives
    // X < (C0 + 0.06) · 8 · 8.348 / 2 · (κ+h)² + 1 / (2 (ν+2.002) log α2).
    let scale = dec("8.348", bits)?.mul_int(&4.into());
    let eps = int(1, bits).div(&dec("4.002", bits)?.mul_int(&2.into()).mul(&ln_alpha2))?;
    let coeff_recomputed = c0_sup.add(&dec("0.06", bits)?).mul(&scale);

    // Smallest admissible h: 4 (log(X/8 + 1/a2) + log κ + 1.377) + 0.023.
    let e2 = a2_min.recip()?;
    let k0 = kappa
        .ln()?
        .add(&dec("1.377", bits)?)
        .mul_int(&4.into())
        .add(&dec("0.023", bits)?);
    let recomputed = chain(c0_sup.clone(), coeff_recomputed, &kappa, &e2, &k0, &eps, None)?;

    // Face value: h = 4 log X - 2.306, i.e. log(X/8) shifted by 4 log 8 - 2.306.
    let zero = int(0, bits);
    let k0_claimed = RealEnclosure::from_ratio(&1.into(), &8.into(), bits)?
        .recip()?
        .ln()?
        .mul_int(&4.into())
        .sub(&dec(CLAIMED_H_OFFSET, bits)?);
    let claimed = chain(
        dec(CLAIMED_C0, bits)?,
        dec(CLAIMED_COEFFICIENT, bits)?,
        &kappa,
        &zero,
        &k0_claimed,
        &zero,
        Some(CLAIMED_X_THRESHOLD),
    )?;

    let auxiliary = auxiliary_checks()?;
    let mut discrepancies = Vec::new();
    let claimed_c0 = dec(CLAIMED_C0, bits)?;
    if !c0_sup.certainly_lt(&claimed_c0)? {
        discrepancies.push(format!(
            "C0 <= {:.6} for h >= 35 at the smallest a1, a2 (ρ = 5), not < {CLAIMED_C0}; \
             for ρ = 5 every choice of h, a1, a2 gives C0 > {:.6}",
            c0_sup.hi_f64(),
            c0_infimum.lo_f64()
        ));
    }
    let offset_needed = recomputed.h_offset.hi_f64();
    discrepancies.push(format!(
        "smallest admissible h is 4 log X - {:.5} (up to the 1/a2 term), so h = 4 log X - {CLAIMED_H_OFFSET} \
         violates the h constraint",
        offset_needed
    ));
    if claimed.x_small_h > BigInt::from(CLAIMED_X_SMALL_H) {
        discrepancies.push(format!(
            "h = 4 log X - {CLAIMED_H_OFFSET} < 35 gives X < {} (exp(37.306/4) = {:.1}), not X < {CLAIMED_X_SMALL_H}",
            claimed.x_small_h,
            (37.306f64 / 4.0).exp()
        ));
    }
    for cmp in [
        ("X threshold", &recomputed.x_threshold, CLAIMED_X_THRESHOLD),
        ("a bound", &recomputed.a_bound, CLAIMED_A_BOUND),
    ] {
        if cmp.1 > &BigInt::from(cmp.2) {
            discrepancies.push(format!("recomputed {} is {}, above {}", cmp.0, cmp.1, cmp.2));
        }
    }
    for aux in &auxiliary {
        if !aux.holds {
            discrepancies.push(format!("{} fails: {}", aux.claim, aux.detail));
        }
    }

    Ok(Proposition1Report {
        with_claimed_constants: claimed,
        recomputed,
        c0_infimum,
        auxiliary,
        discrepancies,
    })
}

/// The first `k` with `a(k) > bound` in a family, by doubling and bisection.
fn first_k_above(family: &ParametricFamily, bound: &BigInt) -> BigInt {
    let mut hi = BigInt::one();
    while &family.a(&hi) <= bound {
        hi *= 2u32;
    }
    let mut lo = BigInt::zero();
    while &hi - &lo > BigInt::one() {
        let mid: BigInt = (&lo + &hi) / 2u32;
        if &family.a(&mid) > bound {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

fn c1_minus_triple_above(m: u32, t: u32, bound: &BigInt) -> Result<DnTriple, LinformError> {
    let fam = ParametricFamily::new(m, t)
        .ok_or_else(|| LinformError::Precondition(format!("no family ({m}, {t})")))?;
    let k = first_k_above(&fam, bound);
    let pair = DnPair::d4(fam.a(&k), fam.b(&k)).map_err(|e| LinformError::Precondition(e.to_string()))?;
    let c = c_value(&pair, CLabel::minus(1)).map_err(|e| LinformError::Precondition(e.to_string()))?;
    DnTriple::new(pair, c).map_err(|e| LinformError::Precondition(e.to_string()))
}

/// Side facts used for `a > 10^10`, `c = c₁⁻`.
fn auxiliary_checks() -> Result<Vec<AuxiliaryCheck>, LinformError> {
    let bits = PIPELINE_BITS;
    let ten10 = BigInt::from(10u64.pow(10));
    let mut out = Vec::new();

    let big_m = c1_minus_triple_above(812, 408, &ten10)?;
    out.push(AuxiliaryCheck {
        claim: "c < 400 for c = c₁⁻ and a > 10^10".into(),
        holds: big_m.c < BigInt::from(400),
        detail: format!("a = {}, b = {}, c₁⁻ = {}", big_m.a(), big_m.b(), big_m.c),
    });

    let small_m = c1_minus_triple_above(1, 0, &ten10)?;
    let alpha2 = int(small_m.t.clone(), bits)
        .add(&sqrt_int(small_m.b() * &small_m.c, bits)?)
        .div(&int(2, bits))?;
    out.push(AuxiliaryCheck {
        claim: "α2 > 100028 for c = c₁⁻ and a > 10^10".into(),
        holds: int(100_028, bits).certainly_lt(&alpha2)?,
        detail: format!(
            "a = {}, b = {}, c = {}: α2 = {:.3}",
            small_m.a(),
            small_m.b(),
            small_m.c,
            alpha2.mid_f64()
        ),
    });

    // log α2 - log α1 < (1/2) log(b/a) + 2/(bc) with b/a < 1 + 57/√a; log α2 > log 10^5.
    let a_min = int(ten10.clone(), bits);
    let log_ratio = int(1, bits)
        .add(&int(57, bits).div(&a_min.sqrt()?)?)
        .ln()?
        .div(&int(2, bits))?
        .add(&RealEnclosure::from_ratio(&2.into(), &ten10, bits)?);
    let lower = int(1, bits).sub(&log_ratio.div(&int(100_000, bits).ln()?)?);
    out.push(AuxiliaryCheck {
        claim: "log α1 / log α2 > 0.999 for a > 10^10".into(),
        holds: dec("0.999", bits)?.certainly_lt(&lower)?,
        detail: format!("ratio > {:.7}", lower.lo_f64()),
    });

    // μ < 1.001 for x0 = y1 and c <= 812.
    let mut worst = int(0, bits);
    for triple in [&big_m, &small_m] {
        for case in admissible_cases(triple, CLabel::minus(1))? {
            if case.x0 == case.y1 {
                worst = worst.max(&LinearFormInstance::new(triple, &case, bits)?.mu);
            }
        }
    }
    out.push(AuxiliaryCheck {
        claim: "μ < 1.001 for c = c₁⁻, x0 = y1".into(),
        holds: worst.certainly_lt(&dec("1.001", bits)?)?,
        detail: format!("largest μ on the sample triples {:.9}", worst.hi_f64()),
    });

    let h = height_mu_c1_minus_closed_form(&big_m, bits)?;
    let log_a2 = int(big_m.t.clone(), bits)
        .add(&sqrt_int(big_m.b() * &big_m.c, bits)?)
        .div(&int(2, bits))?
        .ln()?;
    out.push(AuxiliaryCheck {
        claim: "h(μ) < 2.001 log α2 for c = c₁⁻".into(),
        holds: h.certainly_lt(&dec("2.001", bits)?.mul(&log_a2))?,
        detail: format!("h(μ) <= {:.6}, log α2 = {:.6}", h.hi_f64(), log_a2.lo_f64()),
    });
    Ok(out)
}

/// `u64` view of a bound, saturating.
pub fn bound_to_u64(x: &BigInt) -> u64 {
    if x.is_negative() {
        0
    } else {
        x.to_u64().unwrap_or(u64::MAX)
    }
}


#[cfg(test)]
mod proptests {
    use super::*;
    use proptest::prelude::*;

    fn p(bits: u32, h: f64, a1: f64, a2: f64) -> MignotteParameters {
        let r = |x: f64| RealEnclosure::from_ratio(&BigInt::from((x * 1e6) as i64), &BigInt::from(1_000_000), bits).unwrap();
        MignotteParameters {
            d: 4,
            rho: int(5, bits),
            a1: r(a1),
            a2: r(a2),
            h: r(h),
            b1: int(1, bits),
            b2: int(10, bits),
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn mignotte_bound_is_nonincreasing(
            h in 20.0f64..200.0,
            a1 in 50.0f64..5000.0,
            a2 in 50.0f64..5000.0,
            dh in 0.0f64..50.0,
            da1 in 0.0f64..500.0,
            da2 in 0.0f64..500.0,
        ) {
            let base = mignotte_lower_bound(&p(96, h, a1, a2)).unwrap().log_lower;
            for q in [p(96, h + dh, a1, a2), p(96, h, a1 + da1, a2), p(96, h, a1, a2 + da2)] {
                let other = mignotte_lower_bound(&q).unwrap().log_lower;
                prop_assert!(other.hi_f64() <= base.lo_f64() + 1e-9 * base.lo_f64().abs());
            }
        }

        #[test]
        fn c0_is_decreasing(
            h in 20.0f64..200.0,
            a1 in 50.0f64..5000.0,
            a2 in 50.0f64..5000.0,
            dh in 0.1f64..50.0,
        ) {
            let k = int(5, 96).ln().unwrap();
            let pp = p(96, h, a1, a2);
            let c_lo = mignotte_c0(&k, &pp.h, &pp.a1, &pp.a2).unwrap();
            let qq = p(96, h + dh, a1 * 1.5, a2 * 1.5);
            let c_hi = mignotte_c0(&k, &qq.h, &qq.a1, &qq.a2).unwrap();
            prop_assert!(c_hi.certainly_lt(&c_lo).unwrap());
        }

        #[test]
        fn lambda_enclosure_nests(m in 0u64..40, n in 0u64..40) {
            let t = DnTriple::d4(1, 5, 12).unwrap();
            let cs = crate::pell::general_cases(&t).unwrap().remove(0);
            let lo = LinearFormInstance::new(&t, &cs, 64).unwrap().lambda(m, n);
            let hi = LinearFormInstance::new(&t, &cs, 192).unwrap().lambda(m, n);
            prop_assert!(hi.lo() <= lo.hi() && lo.lo() <= hi.hi());
            prop_assert!(hi.width() < lo.width());
        }
    }
}
