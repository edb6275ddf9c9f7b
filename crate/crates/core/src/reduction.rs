//! Index bounds for one intersection case and their reduction.
//!
//! An a-priori bound on the indices comes from a lower bound for the linear
//! form (two logarithms where that closes, three otherwise). It is then cut
//! down by the Baker–Davenport lemma in the form
//!
//! ```text
//! 0 < |x θ - y + β| < A B^(-x),  x <= M,  q > 6M,
//! ε = ‖qβ‖ - M ‖qθ‖ > 0   =>   x <= log(A q / ε) / log B,
//! ```
//!
//! and the remaining range is searched directly. If no convergent gives
//! `ε > 0` because `Λ` is tiny at some small `(m0, n0)`, the form is
//! re-centred there and the homogeneous part is bounded with the best
//! approximation property of convergents ([`anchored_step`]).

use std::fmt;

use log::{debug, warn};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::bigarith::{escalate, nearest_integer_distance, ContinuedFractionState, RealEnclosure, PRECISION_CAP_BITS};
use crate::dtuples::DnTriple;
use crate::error::{ArithError, LinformError, ReductionError};
use crate::linforms::{
    height_mu_bound, least_integer_where, mignotte_c0, FormKind, LinearFormInstance,
};
use crate::pell::{find_intersections, Intersection, IntersectionCase};

/// Bound used when neither lower bound can be certified.
pub const FALLBACK_BOUND_EXP: u32 = 25;

/// Convergents tried per round before the extended search.
pub const CONVERGENTS_PER_ROUND: usize = 5;

/// Convergents tried when the first few all give `ε <= 0`. This happens when
/// `β` is within `~1/q²` of `Zθ + Z`, e.g. when a genuine solution at small
/// indices makes `Λ` tiny there.
pub const EXTENDED_CONVERGENTS: usize = 96;

const MAX_ROUNDS: usize = 32;

/// Anchors `(m0, n0)` are searched in `0..=ANCHOR_RANGE`.
const ANCHOR_RANGE: u64 = 4;

const BOUND_BITS: u32 = 192;

/// How the initial index bound was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BoundRoute {
    /// Two logarithms with `ρ = 5`, `D = 4`.
    Mignotte,
    /// Three logarithms, `D = 4`.
    Matveev,
    /// `10^25`, uncertified.
    Fallback,
}

impl fmt::Display for BoundRoute {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BoundRoute::Mignotte => "mignotte",
            BoundRoute::Matveev => "matveev",
            BoundRoute::Fallback => "fallback",
        })
    }
}

/// A bound on the reduction variable (`m` for `Lf1`, `n` for `Lf2`) and on `m`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IndexBound {
    pub route: BoundRoute,
    pub kind: FormKind,
    pub variable_bound: BigInt,
    pub m_bound: BigInt,
}

/// `|x θ - y + β| < A B^(-x)` data for one case.
#[derive(Clone, Debug)]
pub struct ReductionShape {
    pub kind: FormKind,
    pub theta: RealEnclosure,
    pub beta: RealEnclosure,
    pub a: RealEnclosure,
    pub b: RealEnclosure,
}

/// `Lf1`: `θ = log α1/log α2`, `β = log μ/log α2`, `A = α1²/log α2`, `B = α1²`, in `m`.
/// `Lf2`: `θ = log α2/log α1`, `β = -log μ/log α1`, `A = α2/log α1`, `B = α2²`, in `n`.
pub fn to_reduction_shape(inst: &LinearFormInstance) -> Result<ReductionShape, ArithError> {
    let (l1, l2) = (&inst.log_alpha1, &inst.log_alpha2);
    Ok(match inst.kind {
        FormKind::Lf1 => ReductionShape {
            kind: FormKind::Lf1,
            theta: l1.div(l2)?,
            beta: inst.log_mu.div(l2)?,
            a: inst.alpha1.mul(&inst.alpha1).div(l2)?,
            b: inst.alpha1.mul(&inst.alpha1),
        },
        FormKind::Lf2 => ReductionShape {
            kind: FormKind::Lf2,
            theta: l2.div(l1)?,
            beta: inst.log_mu.neg().div(l1)?,
            a: inst.alpha2.div(l1)?,
            b: inst.alpha2.mul(&inst.alpha2),
        },
    })
}

/// One successful application of the reduction lemma.
#[derive(Clone, Debug, PartialEq)]
pub struct ReductionRound {
    pub bound_in: BigInt,
    pub q: BigInt,
    /// Position of `q` among the convergents of `θ`.
    pub convergent_index: usize,
    /// Certified lower bound for `ε` (for anchored rounds, for `L - |Λ0|/scale`).
    pub epsilon_lower: f64,
    pub bound_out: BigInt,
    pub precision_bits: u32,
    /// `(m0, n0)` for an anchored round, see [`anchored_step`].
    pub anchor: Option<(u64, u64)>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum StepOutcome {
    Reduced(ReductionRound),
    /// No convergent among those tried had `ε > 0`.
    NoConvergent { tried: usize },
}

/// Working precision for bound `M`: `2 ceil(log10(6M)) + 15` decimal digits.
pub fn precision_for_bound(m: &BigInt) -> u32 {
    let six_m: BigInt = m * 6u32;
    let digits = six_m.to_string().len() as u32;
    ((2 * digits + 15) as f64 * std::f64::consts::LOG2_10).ceil() as u32
}

/// One reduction step at a fixed precision, trying up to `max_tries`
/// convergents with `q > 6M`; `Undecided` if the precision runs out first.
pub fn baker_davenport_step(
    shape: &ReductionShape,
    m: &BigInt,
    max_tries: usize,
    bits: u32,
) -> Result<StepOutcome, ArithError> {
    let q_min: BigInt = m * 6u32;
    let mut cf = ContinuedFractionState::new(shape.theta.clone());
    cf.convergent_exceeding(&q_min).map_err(|_| ArithError::Undecided { bits })?;
    let start = cf.convergents.iter().position(|(_, q)| q > &q_min).expect("just found");
    let mut tried = 0;
    let mut idx = start;
    while tried < max_tries {
        if idx >= cf.convergents.len() {
            match cf.next_convergent() {
                Ok(Some(_)) => {}
                Ok(None) => break,
                Err(_) => return Err(ArithError::Undecided { bits }),
            }
            if idx >= cf.convergents.len() {
                break;
            }
        }
        let q = cf.convergents[idx].1.clone();
        tried += 1;
        let dist_beta = nearest_integer_distance(&shape.beta.mul_int(&q));
        let dist_theta = nearest_integer_distance(&shape.theta.mul_int(&q));
        let eps = dist_beta.sub(&dist_theta.mul_int(m));
        if eps.is_positive() {
            // x < log(A q / ε) / log B with ε replaced by its lower endpoint.
            let eps_lo = RealEnclosure::from_rational(&eps.lo(), bits);
            let ratio = shape.a.mul_int(&q).div(&eps_lo)?;
            let bound = ratio.ln()?.div(&shape.b.ln()?)?;
            let bound_out = bound.floor_hi().max(BigInt::zero());
            return Ok(StepOutcome::Reduced(ReductionRound {
                bound_in: m.clone(),
                q,
                convergent_index: idx,
                epsilon_lower: eps.lo_f64(),
                bound_out,
                precision_bits: bits,
                anchor: None,
            }));
        }
        if eps.contains_zero() && dist_theta.width() > dist_theta.lo() {
            // Too coarse to tell; more bits may help.
            return Err(ArithError::Undecided { bits });
        }
        idx += 1;
    }
    Ok(StepOutcome::NoConvergent { tried })
}

/// Anchored reduction around a point `(m0, n0)` where `Λ` is tiny.
///
/// With `v` the reduction variable and `x = v - v0`, `y` the other shift,
/// `Λ - Λ0 = scale (x θ - y)` and `|x θ - y| < A B^(-v) + |Λ0|/scale`.
/// For `0 < |x| < q_K`, `|x θ - y| >= |q_(K-1) θ - p_(K-1)| = L`, hence
/// `v <= log(A / (L - |Λ0|/scale)) / log B` once `L > |Λ0|/scale`.
/// `scale` is `log α2` for `Lf1` and `log α1` for `Lf2`.
pub fn anchored_step(
    inst: &LinearFormInstance,
    shape: &ReductionShape,
    m: &BigInt,
    anchor: (u64, u64),
    bits: u32,
) -> Result<Option<ReductionRound>, ArithError> {
    let (lambda0, scale, v0) = anchor_terms(inst, anchor);
    let q_min: BigInt = m + v0;
    let mut cf = ContinuedFractionState::new(shape.theta.clone());
    cf.convergent_exceeding(&q_min).map_err(|_| ArithError::Undecided { bits })?;
    let mut k = cf.convergents.iter().position(|(_, q)| q > &q_min).expect("just found");
    while k < 2 {
        if cf.next_convergent().map_err(|_| ArithError::Undecided { bits })?.is_none() {
            return Ok(None);
        }
        k += 1;
    }
    let (p_prev, q_prev) = cf.convergents[k - 1].clone();
    let gap = shape.theta.mul_int(&q_prev).sub(&RealEnclosure::from_int(p_prev, bits)).abs();
    let slack = gap.sub(&lambda0.abs().div(&scale)?);
    if !slack.is_positive() {
        return Ok(None);
    }
    let slack_lo = RealEnclosure::from_rational(&slack.lo(), bits);
    let bound = shape.a.div(&slack_lo)?.ln()?.div(&shape.b.ln()?)?;
    let bound_out = bound.floor_hi().max(BigInt::from(v0));
    Ok(Some(ReductionRound {
        bound_in: m.clone(),
        q: cf.convergents[k].1.clone(),
        convergent_index: k,
        epsilon_lower: slack.lo_f64(),
        bound_out,
        precision_bits: bits,
        anchor: Some(anchor),
    }))
}

/// `Λ(m0, n0)`, the scale and the anchor value of the reduction variable.
fn anchor_terms(inst: &LinearFormInstance, (m0, n0): (u64, u64)) -> (RealEnclosure, RealEnclosure, u64) {
    let lambda0 = inst.lambda(m0, n0);
    match inst.kind {
        FormKind::Lf1 => (lambda0, inst.log_alpha2.clone(), m0),
        FormKind::Lf2 => (lambda0, inst.log_alpha1.clone(), n0),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ReductionStatus {
    /// At least one round succeeded.
    Reduced,
    /// The first round found no usable convergent; the initial bound stands.
    NoConvergent,
}

#[derive(Clone, Debug)]
pub struct ReductionOutcome {
    pub initial: IndexBound,
    pub rounds: Vec<ReductionRound>,
    /// Final bound on the reduction variable.
    pub final_bound: BigInt,
    /// Final bound on `m`.
    pub m_bound: BigInt,
    /// Index cap handed to the direct search.
    pub search_cap: u64,
    pub status: ReductionStatus,
}

/// Result of searching the reduced range.
#[derive(Clone, Debug)]
pub struct FinishOutcome {
    pub search_cap: u64,
    pub intersections: Vec<Intersection>,
    /// Positive `d` from the intersections, ascending.
    pub extensions: Vec<BigInt>,
}

/// One intersection case ready for bounding and reduction.
#[derive(Clone, Debug)]
pub struct ReductionInstance {
    pub triple: DnTriple,
    pub case: IntersectionCase,
    pub kind: FormKind,
    /// Largest working precision the reduction may escalate to.
    pub precision_cap_bits: u32,
}

impl ReductionInstance {
    pub fn new(triple: &DnTriple, case: &IntersectionCase) -> Self {
        ReductionInstance {
            triple: triple.clone(),
            case: case.clone(),
            kind: FormKind::for_case(triple, case),
            precision_cap_bits: PRECISION_CAP_BITS,
        }
    }

    pub fn with_precision_cap(mut self, bits: u32) -> Self {
        self.precision_cap_bits = bits;
        self
    }

    pub fn linear_form(&self, bits: u32) -> Result<LinearFormInstance, LinformError> {
        LinearFormInstance::new(&self.triple, &self.case, bits)
    }

    pub fn shape(&self, bits: u32) -> Result<ReductionShape, ReductionError> {
        Ok(to_reduction_shape(&self.linear_form(bits)?)?)
    }

    /// Initial bound: two logarithms, then three, then `10^25`.
    pub fn derive_index_bound(&self) -> IndexBound {
        match escalate(BOUND_BITS, 1 << 14, "mignotte bound", |bits| self.mignotte_bound(bits)) {
            Ok(Some(b)) => return b,
            Ok(None) => {}
            Err(e) => debug!("two-logarithm bound failed for {}: {e}", self.case.id()),
        }
        match escalate(BOUND_BITS, 1 << 14, "matveev bound", |bits| self.matveev_bound(bits)) {
            Ok(b) => return b,
            Err(e) => warn!("three-logarithm bound failed for {}: {e}; using 10^25", self.case.id()),
        }
        let m = BigInt::from(10).pow(FALLBACK_BOUND_EXP);
        IndexBound {
            route: BoundRoute::Fallback,
            kind: self.kind,
            variable_bound: m.clone(),
            m_bound: m,
        }
    }

    /// Common quantities for both lower bounds.
    fn parts(&self, bits: u32) -> Result<Parts, LinformError> {
        let inst = self.linear_form(bits)?;
        let h_mu = height_mu_bound(&self.triple, &self.case, bits)?;
        let abs_log_mu = inst.log_mu.abs();
        let ratio = inst.log_alpha2.div(&inst.log_alpha1)?;
        // m log α1 = n log α2 - log μ + Λ with 0 < Λ < 1.
        let gamma = RealEnclosure::from_int(1, bits).add(&abs_log_mu).div(&inst.log_alpha1)?;
        Ok(Parts {
            inst,
            h_mu,
            abs_log_mu,
            ratio,
            gamma,
        })
    }

    /// Two logarithms `Λ = log(α1^ν μ) - n log(α2/α1)`, `ν = m - n`.
    ///
    /// With `a1 <= p n + q` (from `|ν| log α1 <= n log(α2/α1) + 1 + |log μ|`),
    /// `u = n / a1` satisfies `u < K (κ + h(u))² + e0`; this closes when `U p < 1`.
    fn mignotte_bound(&self, bits: u32) -> Result<Option<IndexBound>, LinformError> {
        let Parts { inst, h_mu, abs_log_mu, ratio, gamma } = self.parts(bits)?;
        let r = |n: i64| RealEnclosure::from_int(n, bits);
        let dec = |s: &str| RealEnclosure::from_decimal(s, bits);
        let (rho, d) = (5i64, 4i64);
        let kappa = r(rho).ln()?;
        let (l1, l2) = (&inst.log_alpha1, &inst.log_alpha2);
        let l21 = l2.sub(l1);
        let a2 = l21.mul_int(&(rho - 1).into()).add(&l1.add(l2).mul_int(&d.into()));
        let a0 = r(1).max(&r(20).div(&a2)?).max(&kappa.mul(&kappa).mul_int(&4.into()).div(&a2)?);
        let p = l21.mul_int(&(rho + 1 + d).into());
        let fixed = abs_log_mu.mul_int(&(rho + 1).into()).add(&h_mu.mul_int(&(2 * d).into()));
        let q = r(1).add(&abs_log_mu).mul_int(&(rho + 1 + d).into()).add(&fixed).add(&a0);
        let a1_min = fixed.add(&a0);
        let h_floor = dec("3.5")?.max(&kappa.mul(&dec("1.5")?));
        let c_max = mignotte_c0(&kappa, &h_floor, &a1_min, &a2)?;
        let k = c_max.add(&dec("0.06")?).mul(&a2).div(&l2.mul_int(&2.into()))?;
        let e = match inst.kind {
            FormKind::Lf1 => inst.log_mu.add(l1).mul_int(&2.into()),
            FormKind::Lf2 => l2.clone(),
        };
        let e0 = e.max(&r(0)).div(&l2.mul_int(&2.into()).mul(&a1_min))?;
        let e2 = a2.recip()?;
        let k0 = kappa.ln()?.add(&dec("1.377")?).mul_int(&d.into()).add(&dec("0.023")?);
        let h_of = |u: &RealEnclosure| -> Result<RealEnclosure, ArithError> {
            Ok(h_floor.max(&u.add(&e2).ln()?.mul_int(&d.into()).add(&k0)))
        };
        let ok = |t: &BigInt| -> Result<bool, ArithError> {
            let u = RealEnclosure::from_int(t.clone(), bits);
            let kh = kappa.add(&h_of(&u)?);
            let f = u.sub(&k.mul(&kh).mul(&kh)).sub(&e0);
            let shifted = u.add(&e2);
            let s1 = k.mul(&kh).mul_int(&(2 * d).into()).certainly_lt(&shifted).unwrap_or(false);
            let s2 = k.mul_int(&(8 * d).into()).certainly_lt(&shifted).unwrap_or(false);
            Ok(f.is_positive() && s1 && s2)
        };
        let guess = {
            let (kf, kap, e2f, k0f, hf, e0f) =
                (k.hi_f64(), kappa.hi_f64(), e2.hi_f64(), k0.hi_f64(), h_floor.hi_f64(), e0.hi_f64());
            let mut x = 10.0f64;
            for _ in 0..200 {
                let h = hf.max(4.0 * (x + e2f).ln() + k0f);
                x = kf * (kap + h).powi(2) + e0f;
            }
            x.ceil().max(1.0) as u64
        };
        let u_bound = RealEnclosure::from_int(least_integer_where(guess, ok)?, bits);
        let up = u_bound.mul(&p);
        if !up.certainly_lt(&r(1)).unwrap_or(false) {
            return Ok(None);
        }
        let n_bound = u_bound.mul(&q).div(&r(1).sub(&up))?;
        Ok(Some(finish_bound(BoundRoute::Mignotte, inst.kind, &n_bound, &ratio, &gamma)))
    }

    /// Three logarithms, `D = 4`, `B = max(m, n)`:
    /// `log Λ > -1.4·30^6·3^4.5·D²(1 + log D)(1 + log B) A1 A2 A3`.
    fn matveev_bound(&self, bits: u32) -> Result<IndexBound, LinformError> {
        let Parts { inst, h_mu, abs_log_mu, ratio, gamma } = self.parts(bits)?;
        let r = |n: i64| RealEnclosure::from_int(n, bits);
        let dec = |s: &str| RealEnclosure::from_decimal(s, bits);
        let d = 4i64;
        let (l1, l2) = (&inst.log_alpha1, &inst.log_alpha2);
        let a1 = l1.mul_int(&2.into());
        let a2 = l2.mul_int(&2.into());
        let a3 = h_mu.mul_int(&d.into()).max(&abs_log_mu).max(&dec("0.16")?);
        let three_45 = r(3).powi(4)?.mul(&r(3).sqrt()?);
        let cm = dec("1.4")?
            .mul(&r(30).powi(6)?)
            .mul(&three_45)
            .mul_int(&(d * d).into())
            .mul(&r(1).add(&r(d).ln()?))
            .mul(&a1)
            .mul(&a2)
            .mul(&a3);
        let bound = match inst.kind {
            FormKind::Lf1 => {
                // n < m + log μ / log α2, so B <= m + e.
                let e = RealEnclosure::from_int(inst.log_mu.div(l2)?.ceil_hi().max(BigInt::zero()), bits);
                let slope_at = cm.div(&l1.mul_int(&2.into()))?;
                let ok = |t: &BigInt| -> Result<bool, ArithError> {
                    let x = RealEnclosure::from_int(t.clone(), bits);
                    let lhs = x.sub(&r(1)).mul(l1).mul_int(&2.into());
                    let rhs = cm.mul(&r(1).add(&x.add(&e).ln()?));
                    Ok(rhs.certainly_lt(&lhs).unwrap_or(false) && slope_at.certainly_lt(&x.add(&e)).unwrap_or(false))
                };
                let guess = fixed_point(cm.hi_f64(), 2.0 * l1.lo_f64(), 1.0, e.hi_f64(), 1.0);
                let m = RealEnclosure::from_int(least_integer_where(guess, ok)?, bits);
                IndexBound {
                    route: BoundRoute::Matveev,
                    kind: FormKind::Lf1,
                    variable_bound: m.ceil_hi(),
                    m_bound: m.ceil_hi(),
                }
            }
            FormKind::Lf2 => {
                // m <= n L + γ with L = log α2 / log α1 > 1, so B <= n L + γ.
                let slope_at = cm.mul(&ratio).div(&l2.mul_int(&2.into()))?;
                let ok = |t: &BigInt| -> Result<bool, ArithError> {
                    let x = RealEnclosure::from_int(t.clone(), bits);
                    let lhs = x.mul_int(&2.into()).sub(&r(1)).mul(l2);
                    let bx = x.mul(&ratio).add(&gamma);
                    let rhs = cm.mul(&r(1).add(&bx.ln()?));
                    Ok(rhs.certainly_lt(&lhs).unwrap_or(false) && slope_at.certainly_lt(&bx).unwrap_or(false))
                };
                let guess = fixed_point(cm.hi_f64(), 2.0 * l2.lo_f64(), ratio.hi_f64(), gamma.hi_f64(), 0.5);
                let n = RealEnclosure::from_int(least_integer_where(guess, ok)?, bits);
                finish_bound(BoundRoute::Matveev, FormKind::Lf2, &n, &ratio, &gamma)
            }
        };
        Ok(bound)
    }

    /// Bound, reduce to a fixed point, and compute the search cap.
    pub fn reduce(&self) -> Result<ReductionOutcome, ReductionError> {
        let initial = self.derive_index_bound();
        self.reduce_from(initial)
    }

    /// Reduction starting from a given bound.
    pub fn reduce_from(&self, initial: IndexBound) -> Result<ReductionOutcome, ReductionError> {
        let mut bound = initial.variable_bound.clone();
        let mut rounds = Vec::new();
        let mut status = ReductionStatus::NoConvergent;
        for _ in 0..MAX_ROUNDS {
            let start = precision_for_bound(&bound);
            let run = |tries: usize| {
                escalate(start, self.precision_cap_bits.max(start), "reduction step", |bits| {
                    let shape = self.shape(bits)?;
                    Ok::<_, ReductionError>(baker_davenport_step(&shape, &bound, tries, bits)?)
                })
            };
            let mut step = run(CONVERGENTS_PER_ROUND)?;
            if matches!(step, StepOutcome::NoConvergent { .. }) {
                step = run(EXTENDED_CONVERGENTS)?;
            }
            if matches!(step, StepOutcome::NoConvergent { .. }) {
                if let Some(round) = self.anchored(&bound, start)? {
                    step = StepOutcome::Reduced(round);
                }
            }
            match step {
                StepOutcome::Reduced(round) => {
                    status = ReductionStatus::Reduced;
                    let improved = round.bound_out < bound;
                    let next = round.bound_out.clone();
                    rounds.push(round);
                    if !improved {
                        break;
                    }
                    bound = next;
                    if bound <= BigInt::from(10) {
                        break;
                    }
                }
                StepOutcome::NoConvergent { tried } => {
                    debug!("{}: no usable convergent among {tried} at M = {bound}", self.case.id());
                    break;
                }
            }
        }
        let m_bound = self.m_bound_from(&bound)?;
        let search_cap = self.search_cap(&m_bound)?;
        Ok(ReductionOutcome {
            initial,
            rounds,
            final_bound: bound,
            m_bound,
            search_cap,
            status,
        })
    }

    /// The small `(m0, n0)` of the case's parity with the smallest `|Λ|`.
    pub fn best_anchor(&self) -> Result<(u64, u64), ReductionError> {
        let inst = self.linear_form(BOUND_BITS)?;
        let mut best: Option<((u64, u64), f64)> = None;
        for m0 in 0..=ANCHOR_RANGE {
            for n0 in 0..=ANCHOR_RANGE {
                if !self.case.parity.allows(m0, n0) {
                    continue;
                }
                let size = inst.lambda(m0, n0).abs().hi_f64();
                if best.map_or(true, |(_, b)| size < b) {
                    best = Some(((m0, n0), size));
                }
            }
        }
        Ok(best.expect("every parity class has small points").0)
    }

    fn anchored(&self, bound: &BigInt, start: u32) -> Result<Option<ReductionRound>, ReductionError> {
        let anchor = self.best_anchor()?;
        let found = escalate(start, self.precision_cap_bits.max(start), "anchored step", |bits| {
            let inst = self.linear_form(bits)?;
            let shape = to_reduction_shape(&inst)?;
            Ok::<_, ReductionError>(anchored_step(&inst, &shape, bound, anchor, bits)?)
        })?;
        if found.is_some() {
            debug!("{}: anchored at {anchor:?} for M = {bound}", self.case.id());
        }
        Ok(found)
    }

    /// Bound on `m` implied by a bound on the reduction variable.
    fn m_bound_from(&self, bound: &BigInt) -> Result<BigInt, ReductionError> {
        match self.kind {
            FormKind::Lf1 => Ok(bound.clone()),
            FormKind::Lf2 => {
                let parts = self.parts(BOUND_BITS)?;
                let v = RealEnclosure::from_int(bound.clone(), BOUND_BITS)
                    .mul(&parts.ratio)
                    .add(&parts.gamma);
                Ok(v.floor_hi())
            }
        }
    }

    /// Index cap for the direct search: the reduced bound on `m`, plus
    /// `n <= m + log μ / log α2`, and at least the index where `v` passes
    /// `max(w0, w1, w2)` so that small `n` are covered.
    pub fn search_cap(&self, m_bound: &BigInt) -> Result<u64, ReductionError> {
        let inst = self.linear_form(BOUND_BITS)?;
        let e = inst.log_mu.div(&inst.log_alpha2)?.ceil_hi().max(BigInt::zero());
        let cap = (m_bound + e)
            .to_u64()
            .ok_or_else(|| ReductionError::Failed(format!("search cap {m_bound} does not fit in u64")))?;
        let w: Vec<BigInt> = self.case.w_sequence(&self.triple)?.terms(3);
        let wmax = w.into_iter().max().expect("three terms");
        let mut small = 0u64;
        for (i, v) in self.case.v_sequence(&self.triple)?.iter().enumerate() {
            if v > wmax && i >= 2 {
                small = i as u64;
                break;
            }
        }
        Ok(cap.max(small).max(4))
    }

    /// Searches all indices up to `cap` and keeps positive `d`.
    pub fn finish(&self, cap: u64) -> Result<FinishOutcome, ReductionError> {
        let intersections = find_intersections(&self.triple, &self.case, cap)?;
        let mut extensions: Vec<BigInt> = intersections
            .iter()
            .filter_map(|h| h.d(&self.triple))
            .filter(|d| d.is_positive())
            .collect();
        extensions.sort();
        extensions.dedup();
        Ok(FinishOutcome {
            search_cap: cap,
            intersections,
            extensions,
        })
    }
}

/// Reduce one case and search the remaining range.
pub fn finish_instance(
    triple: &DnTriple,
    case: &IntersectionCase,
) -> Result<(ReductionOutcome, FinishOutcome), ReductionError> {
    let inst = ReductionInstance::new(triple, case);
    let outcome = inst.reduce()?;
    let fin = inst.finish(outcome.search_cap)?;
    Ok((outcome, fin))
}

/// Independent re-check of a reduction round.
///
/// `θ` and `β` are re-enclosed at twice the round's precision; `ε` is then
/// bounded below using only exact rational arithmetic on the interval
/// endpoints, and `bound_out` is checked against `log(Aq/ε)/log B`.
pub fn recheck_round(inst: &ReductionInstance, round: &ReductionRound) -> Result<bool, ReductionError> {
    let bits = round.precision_bits.saturating_mul(2).max(BOUND_BITS);
    let shape = inst.shape(bits)?;
    if let Some(anchor) = round.anchor {
        return recheck_anchored(inst, &shape, round, anchor, bits);
    }
    let q = BigRational::from_integer(round.q.clone());
    let span = |x: &RealEnclosure| (x.lo() * &q, x.hi() * &q);
    let (b_lo, b_hi) = span(&shape.beta);
    let (t_lo, t_hi) = span(&shape.theta);
    let eps = distance_lower(&b_lo, &b_hi) - distance_upper(&t_lo, &t_hi) * BigRational::from_integer(round.bound_in.clone());
    if !eps.is_positive() {
        return Ok(false);
    }
    let eps_enc = RealEnclosure::from_rational(&eps, bits);
    let x = shape.a.mul_int(&round.q).div(&eps_enc)?.ln()?.div(&shape.b.ln()?)?;
    let next = RealEnclosure::from_int(&round.bound_out + 1u32, bits);
    Ok(x.certainly_lt(&next)?)
}

/// Anchored rounds: the convergents are recomputed, and `L - |Λ0|/scale` is
/// bounded below from rational endpoints.
fn recheck_anchored(
    inst: &ReductionInstance,
    shape: &ReductionShape,
    round: &ReductionRound,
    anchor: (u64, u64),
    bits: u32,
) -> Result<bool, ReductionError> {
    let lf = inst.linear_form(bits)?;
    let (lambda0, scale, v0) = anchor_terms(&lf, anchor);
    let k = round.convergent_index;
    if k < 2 || round.q <= &round.bound_in + v0 {
        return Ok(false);
    }
    let mut cf = ContinuedFractionState::new(shape.theta.clone());
    while cf.convergents.len() <= k {
        match cf.next_convergent() {
            Ok(Some(_)) => {}
            _ => return Ok(false),
        }
    }
    if cf.is_insufficient() || cf.convergents[k].1 != round.q {
        return Ok(false);
    }
    let (p, q) = &cf.convergents[k - 1];
    let (p, q) = (BigRational::from_integer(p.clone()), BigRational::from_integer(q.clone()));
    let (lo, hi) = (shape.theta.lo() * &q - &p, shape.theta.hi() * &q - &p);
    if !lo.is_positive() && !hi.is_negative() {
        return Ok(false);
    }
    let gap = lo.abs().min(hi.abs());
    let l0 = lambda0.lo().abs().max(lambda0.hi().abs());
    if !scale.lo().is_positive() {
        return Ok(false);
    }
    let slack = gap - l0 / scale.lo();
    if !slack.is_positive() {
        return Ok(false);
    }
    let slack = RealEnclosure::from_rational(&slack, bits);
    let x = shape.a.div(&slack)?.ln()?.div(&shape.b.ln()?)?;
    let next = RealEnclosure::from_int(&round.bound_out + 1u32, bits);
    Ok(x.certainly_lt(&next)? && round.bound_out >= BigInt::from(v0))
}

fn distance_point(x: &BigRational) -> BigRational {
    let f = x - x.floor();
    let g = BigRational::one() - &f;
    f.min(g)
}

/// Lower bound for `‖x‖` over `[lo, hi]`.
fn distance_lower(lo: &BigRational, hi: &BigRational) -> BigRational {
    if lo.floor() != hi.floor() || lo.is_integer() {
        return BigRational::zero();
    }
    distance_point(lo).min(distance_point(hi))
}

/// Upper bound for `‖x‖` over `[lo, hi]`.
fn distance_upper(lo: &BigRational, hi: &BigRational) -> BigRational {
    let half = BigRational::new(1.into(), 2.into());
    if (lo - &half).floor() != (hi - &half).floor() {
        return half;
    }
    distance_point(lo).max(distance_point(hi))
}

struct Parts {
    inst: LinearFormInstance,
    h_mu: RealEnclosure,
    abs_log_mu: RealEnclosure,
    ratio: RealEnclosure,
    gamma: RealEnclosure,
}

/// From `n < n_bound`: the variable bound and `m <= n L + γ`.
fn finish_bound(
    route: BoundRoute,
    kind: FormKind,
    n_bound: &RealEnclosure,
    ratio: &RealEnclosure,
    gamma: &RealEnclosure,
) -> IndexBound {
    let m = n_bound.mul(ratio).add(gamma).ceil_hi();
    let variable_bound = match kind {
        FormKind::Lf1 => m.clone(),
        FormKind::Lf2 => n_bound.ceil_hi(),
    };
    IndexBound {
        route,
        kind,
        variable_bound,
        m_bound: m,
    }
}

/// Float estimate of the largest `x` with `s (x·slope_scale) ≈ C (1 + log(x L + g))`,
/// used only as a starting point for the certified search.
fn fixed_point(c: f64, s: f64, l: f64, g: f64, shift: f64) -> u64 {
    let mut x = c / s;
    for _ in 0..200 {
        x = c * (1.0 + (x * l + g).ln()) / s + shift;
    }
    (x * 1.000001).ceil().max(1.0) as u64
}
