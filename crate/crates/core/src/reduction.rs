//! Certified continued fractions and the Dujella-Pethő reduction.
//!
//! Given `0 < |u gamma - v + mu| < A B^(-w)` with `u <= M` and a convergent
//! `p/q` of `gamma` with `q > 6M`, a positive
//! `epsilon = ||q mu|| - M |p - q gamma|` rules out every solution with
//! `w >= log(A q / epsilon) / log B`.
//!
//! Per `k` the campaign shares one expansion of `gamma = log 2 / log alpha`
//! across all values of `mu`, and raises the working precision of the
//! whole context when an enclosure stops deciding a partial quotient or
//! the sign of `epsilon`.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::algebraic::{dominant_root, RootContext, CAP_DIGITS};
use crate::error::{Error, Result};
use crate::interval::{digits_to_bits, floor_shr, Interval};
use crate::matveev::{m_k, strict_integer_bound};

/// Convergents tried past the first `q > 6M` before giving up.
pub const DEFAULT_MAX_ATTEMPTS: usize = 1000;

/// Precision used for `w = log(Aq/epsilon)/log B` once `epsilon` is decided.
const W_BITS: u32 = 128;

/// Lockstep Euclid on the two rational endpoints of an enclosure.
#[derive(Clone, Debug)]
struct Expander {
    lo: (BigInt, BigInt),
    hi: (BigInt, BigInt),
    done: bool,
}

impl Expander {
    fn new(x: &Interval) -> Self {
        let den = BigInt::one() << x.prec();
        Expander {
            lo: (x.lo_raw().clone(), den.clone()),
            hi: (x.hi_raw().clone(), den),
            done: false,
        }
    }

    /// Next partial quotient, if the enclosure still certifies it.
    fn next(&mut self) -> Option<BigInt> {
        if self.done {
            return None;
        }
        let a = self.lo.0.div_floor(&self.lo.1);
        if a != self.hi.0.div_floor(&self.hi.1) {
            self.done = true;
            return None;
        }
        let r_lo = &self.lo.0 - &a * &self.lo.1;
        let r_hi = &self.hi.0 - &a * &self.hi.1;
        if r_lo.is_zero() {
            // the enclosure touches the integer `a`; later quotients are undefined
            self.done = true;
            return Some(a);
        }
        let new_lo = (self.hi.1.clone(), r_hi);
        let new_hi = (self.lo.1.clone(), r_lo);
        self.lo = new_lo;
        self.hi = new_hi;
        Some(a)
    }
}

/// Continued fraction of a real enclosure, extended lazily.
#[derive(Clone, Debug)]
pub struct ContinuedFraction {
    pub source: Interval,
    pub partial_quotients: Vec<BigInt>,
    pub convergents: Vec<(BigInt, BigInt)>,
    expander: Expander,
}

impl ContinuedFraction {
    pub fn new(source: &Interval) -> Self {
        ContinuedFraction {
            source: source.clone(),
            partial_quotients: Vec::new(),
            convergents: Vec::new(),
            expander: Expander::new(source),
        }
    }

    /// Appends one certified partial quotient; `false` when the enclosure is exhausted.
    fn push_next(&mut self) -> bool {
        let Some(a) = self.expander.next() else {
            return false;
        };
        let n = self.convergents.len();
        let (p1, q1) = if n >= 1 { self.convergents[n - 1].clone() } else { (BigInt::one(), BigInt::zero()) };
        let (p2, q2) = if n >= 2 {
            self.convergents[n - 2].clone()
        } else if n == 1 {
            (BigInt::one(), BigInt::zero())
        } else {
            (BigInt::zero(), BigInt::one())
        };
        self.convergents.push((&a * &p1 + p2, &a * &q1 + q2));
        self.partial_quotients.push(a);
        true
    }

    /// Makes convergent `i` available.
    pub fn ensure(&mut self, i: usize) -> Result<()> {
        while self.convergents.len() <= i {
            if !self.push_next() {
                return Err(Error::Precision(format!(
                    "enclosure certifies only {} partial quotients",
                    self.partial_quotients.len()
                )));
            }
        }
        Ok(())
    }

    /// Index of the first convergent with `q > target`.
    pub fn first_above(&mut self, target: &BigInt) -> Result<usize> {
        let mut i = 0;
        loop {
            self.ensure(i)?;
            if &self.convergents[i].1 > target {
                return Ok(i);
            }
            i += 1;
        }
    }

    /// `p_i q_{i-1} - p_{i-1} q_i = (-1)^(i-1)` for every computed pair.
    pub fn determinants_ok(&self) -> bool {
        self.convergents.windows(2).enumerate().all(|(i, w)| {
            let d = &w[1].0 * &w[0].1 - &w[0].0 * &w[1].1;
            let expect = if i % 2 == 0 { BigInt::one() } else { BigInt::from(-1) };
            d == expect
        })
    }
}

/// Expands `x` until some convergent has `q > q_target`.
pub fn cf_expand(x: &Interval, q_target: &BigInt) -> Result<ContinuedFraction> {
    let mut cf = ContinuedFraction::new(x);
    cf.first_above(q_target)?;
    Ok(cf)
}

/// Enclosure of the distance from `x` to the nearest integer.
pub fn nearest_int_dist(x: &Interval) -> Interval {
    let p = x.prec();
    let half = BigInt::one() << (p - 1);
    let unit = BigInt::one() << p;
    // nearest integer to the lower endpoint
    let n = floor_shr(&(x.lo_raw() + &half), p);
    let n_raw: BigInt = &n << p;
    if x.hi_raw() <= &(&n_raw + &half) {
        let lo = x.lo_raw() - &n_raw;
        let hi = x.hi_raw() - &n_raw;
        return Interval::from_raw(lo, hi, p).abs();
    }
    if x.width_raw() >= unit {
        return Interval::from_raw(BigInt::zero(), half, p);
    }
    // straddles n + 1/2 once
    let d_lo = (x.lo_raw() - &n_raw).abs();
    let d_hi = (&n_raw + &unit - x.hi_raw()).abs();
    let lo = if x.hi_raw() >= &(&n_raw + &unit) { BigInt::zero() } else { d_lo.min(d_hi) };
    Interval::from_raw(lo, half, p)
}

/// Data of one application of the reduction lemma.
#[derive(Clone, Debug)]
pub struct ReductionInstance {
    pub gamma: Interval,
    pub mu: Interval,
    pub a: Interval,
    pub b: Interval,
    pub m: BigInt,
    /// Absolute-value form; the lemma's argument does not depend on it.
    pub two_sided: bool,
}

impl ReductionInstance {
    pub fn validate(&self) -> Result<()> {
        if !self.a.is_positive() {
            return Err(Error::InvalidArgument("A must be positive".into()));
        }
        if !Interval::one(self.b.prec()).certainly_lt(&self.b) {
            return Err(Error::InvalidArgument("B must exceed 1".into()));
        }
        if self.m < BigInt::one() {
            return Err(Error::InvalidArgument("M must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct ReductionOutcome {
    pub q: BigInt,
    pub epsilon: Interval,
    /// Enclosure of `log(A q / epsilon_lo) / log B`.
    pub w_bound: Interval,
    /// Convergents with `q > 6M` examined, the successful one included.
    pub attempts: usize,
}

impl ReductionOutcome {
    /// Largest integer strictly below the real bound.
    pub fn w_max(&self) -> i64 {
        strict_integer_bound(&self.w_bound).try_into().expect("w bound fits in i64")
    }
}

/// `||q mu|| - M |p - q gamma|`.
pub fn epsilon(inst: &ReductionInstance, p: &BigInt, q: &BigInt) -> Interval {
    let qmu = inst.mu.mul_int(q);
    let prec = inst.gamma.prec();
    let err = (&Interval::from_int(p.clone(), prec) - &inst.gamma.mul_int(q)).abs();
    &nearest_int_dist(&qmu) - &err.mul_int(&inst.m)
}

fn w_bound(inst: &ReductionInstance, q: &BigInt, eps: &Interval) -> Interval {
    // eps_lo = e 2^-p, so log(A q / eps_lo) = log(A q) - log(e) + p log 2
    let wp = W_BITS;
    let e = Interval::from_int(eps.lo_raw().clone(), wp);
    let num = inst.a.with_prec(wp).mul_int(q).ln();
    let scale = crate::interval::ln2(wp).mul_int(&BigInt::from(eps.prec()));
    let l = &(&num - &e.ln()) + &scale;
    l.div(&inst.b.with_prec(wp).ln())
}

/// The reduction with a caller-owned expansion of `inst.gamma`.
pub fn dujella_petho_with(
    inst: &ReductionInstance,
    cf: &mut ContinuedFraction,
    max_attempts: usize,
) -> Result<ReductionOutcome> {
    inst.validate()?;
    let six_m: BigInt = &inst.m * 6u32;
    let mut i = cf.first_above(&six_m)?;
    let mut attempts = 0;
    while attempts < max_attempts {
        cf.ensure(i)?;
        let (p, q) = &cf.convergents[i];
        attempts += 1;
        let eps = epsilon(inst, p, q);
        if eps.is_positive() {
            let w = w_bound(inst, q, &eps);
            return Ok(ReductionOutcome { q: q.clone(), epsilon: eps, w_bound: w, attempts });
        }
        if eps.hi_raw().is_positive() {
            return Err(Error::Precision(format!("sign of epsilon undecided at convergent {i}")));
        }
        i += 1;
    }
    Err(Error::NoPositiveEpsilon { attempts })
}

pub fn dujella_petho(inst: &ReductionInstance) -> Result<ReductionOutcome> {
    let mut cf = ContinuedFraction::new(&inst.gamma);
    dujella_petho_with(inst, &mut cf, DEFAULT_MAX_ATTEMPTS)
}

/// Starting precision `max(2 * digits(6M) + 60, 128)` in decimal digits.
pub fn default_digits(m: &BigInt) -> u32 {
    let d = (m * 6u32).to_string().len() as u32;
    (2 * d + 60).max(128)
}

/// Where a campaign gets `alpha(k)` at a given number of digits.
#[derive(Clone)]
pub struct RootSource(Arc<dyn Fn(u32, u32) -> Result<RootContext> + Send + Sync>);

impl RootSource {
    pub fn new(f: impl Fn(u32, u32) -> Result<RootContext> + Send + Sync + 'static) -> Self {
        RootSource(Arc::new(f))
    }

    pub fn get(&self, k: u32, digits: u32) -> Result<RootContext> {
        (self.0)(k, digits)
    }
}

impl Default for RootSource {
    fn default() -> Self {
        RootSource::new(dominant_root)
    }
}

impl fmt::Debug for RootSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("RootSource")
    }
}

/// Per-`k` state shared by every instance of a campaign.
#[derive(Clone, Debug)]
pub struct KReduction {
    pub k: u32,
    pub m: BigInt,
    pub digits: u32,
    pub cap_digits: u32,
    pub max_attempts: usize,
    alpha: Interval,
    log_alpha: Interval,
    inv_log_alpha: Interval,
    gamma: Interval,
    mu_hat: Interval,
    cf: ContinuedFraction,
    roots: RootSource,
}

impl KReduction {
    pub fn new(k: u32) -> Result<Self> {
        let m = m_k(k)?;
        let d = default_digits(&m);
        KReduction::with_digits(k, m, d)
    }

    pub fn with_digits(k: u32, m: BigInt, digits: u32) -> Result<Self> {
        KReduction::with_source(k, m, digits, RootSource::default())
    }

    pub fn with_source(k: u32, m: BigInt, digits: u32, roots: RootSource) -> Result<Self> {
        if k < 3 {
            return Err(Error::InvalidArgument(format!("k must be at least 3, got {k}")));
        }
        let placeholder = Interval::zero(64);
        let mut kr = KReduction {
            k,
            m,
            digits,
            cap_digits: CAP_DIGITS,
            max_attempts: DEFAULT_MAX_ATTEMPTS,
            alpha: placeholder.clone(),
            log_alpha: placeholder.clone(),
            inv_log_alpha: placeholder.clone(),
            gamma: placeholder.clone(),
            mu_hat: placeholder.clone(),
            cf: ContinuedFraction::new(&Interval::one(64)),
            roots,
        };
        kr.rebuild(digits)?;
        Ok(kr)
    }

    fn rebuild(&mut self, digits: u32) -> Result<()> {
        let ctx = self.roots.get(self.k, digits)?;
        // the guard keeps the quotients below from eating the requested digits
        let p = digits_to_bits(digits).max(ctx.bits()) + 64;
        let alpha = ctx.alpha.with_prec(p);
        let f = ctx.f_alpha.with_prec(p);
        let log_alpha = alpha.ln();
        let inv_log_alpha = log_alpha.recip();
        let gamma = &crate::interval::ln2(p) * &inv_log_alpha;
        let mu_hat = &Interval::one(p) - &(&f.ln() * &inv_log_alpha);
        self.digits = digits;
        self.alpha = alpha;
        self.log_alpha = log_alpha;
        self.inv_log_alpha = inv_log_alpha;
        self.cf = ContinuedFraction::new(&gamma);
        self.gamma = gamma;
        self.mu_hat = mu_hat;
        Ok(())
    }

    fn escalate(&mut self, why: &Error) -> Result<()> {
        if self.digits >= self.cap_digits {
            return Err(Error::PrecisionExhausted { cap: self.cap_digits, reason: why.to_string() });
        }
        let next = (self.digits * 2).min(self.cap_digits);
        log::debug!("k = {}: {} -> {} digits ({why})", self.k, self.digits, next);
        self.rebuild(next)
    }

    pub fn gamma(&self) -> &Interval {
        &self.gamma
    }

    pub fn mu_hat(&self) -> &Interval {
        &self.mu_hat
    }

    pub fn alpha(&self) -> &Interval {
        &self.alpha
    }

    /// `0 < a gamma - n + mu_hat < 6 alpha^-(n-m)`.
    pub fn stage1_instance(&self) -> ReductionInstance {
        let p = self.gamma.prec();
        ReductionInstance {
            gamma: self.gamma.clone(),
            mu: self.mu_hat.clone(),
            a: Interval::from_int(6, p),
            b: self.alpha.clone(),
            m: self.m.clone(),
            two_sided: false,
        }
    }

    /// `0 < |a gamma - n + mu| < 4 alpha^-(n-1)` with
    /// `mu = 1 - log(f_k(alpha)(1 + alpha^-nm)) / log alpha`.
    pub fn stage2_instance(&self, nm: i64) -> Result<ReductionInstance> {
        if nm < 1 {
            return Err(Error::InvalidArgument(format!("n - m must be positive, got {nm}")));
        }
        let p = self.gamma.prec();
        let t = self.alpha.recip().powi(nm as u64);
        let mu = &self.mu_hat - &(&t.ln1p() * &self.inv_log_alpha);
        Ok(ReductionInstance {
            gamma: self.gamma.clone(),
            mu,
            a: Interval::from_int(4, p),
            b: self.alpha.clone(),
            m: self.m.clone(),
            two_sided: true,
        })
    }

    fn run(&mut self, make: impl Fn(&Self) -> Result<ReductionInstance>) -> Result<ReductionOutcome> {
        loop {
            let inst = make(self)?;
            match dujella_petho_with(&inst, &mut self.cf, self.max_attempts) {
                Err(e) if e.is_precision() => self.escalate(&e)?,
                other => return other,
            }
        }
    }

    pub fn stage1(&mut self) -> Result<ReductionOutcome> {
        self.run(|s| Ok(s.stage1_instance()))
    }

    pub fn stage2(&mut self, nm: i64) -> Result<ReductionOutcome> {
        self.run(|s| s.stage2_instance(nm))
    }
}

/// Bound on `n - m` for `k` (`n - m < w_bound`).
pub fn reduce_stage1(k: u32) -> Result<ReductionOutcome> {
    KReduction::new(k)?.stage1()
}

/// Bound on `n - 1` for `k` and one value of `n - m` (`n - 1 < w_bound`).
pub fn reduce_stage2(k: u32, nm: i64) -> Result<ReductionOutcome> {
    KReduction::new(k)?.stage2(nm)
}

/// Both stages for one `k`.
#[derive(Clone, Debug)]
pub struct KCampaign {
    pub k: u32,
    pub m_k: BigInt,
    pub stage1: ReductionOutcome,
    /// `n - m <= nm_max`.
    pub nm_max: i64,
    /// Largest stage-2 bound on `n - 1` over `1 <= n - m <= nm_max`.
    pub stage2_max: Interval,
    pub stage2_argmax: i64,
    /// `n <= n_max`.
    pub n_max: i64,
    /// Most convergents any instance needed.
    pub max_attempts: usize,
    /// Final working precision in decimal digits.
    pub digits: u32,
}

/// Stage 1, then stage 2 for every `n - m` the first stage leaves open.
pub fn campaign_for_k(k: u32) -> Result<KCampaign> {
    campaign_with(k, &Precision::default(), RootSource::default())
}

/// Digit policy for a campaign: start at `max(default_digits(M), min_digits)`,
/// double up to `cap_digits`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Precision {
    pub min_digits: u32,
    pub cap_digits: u32,
}

impl Default for Precision {
    fn default() -> Self {
        Precision { min_digits: 0, cap_digits: CAP_DIGITS }
    }
}

fn reduction_for(k: u32, prec: &Precision, roots: RootSource) -> Result<KReduction> {
    let m = m_k(k)?;
    let d = default_digits(&m).max(prec.min_digits).min(prec.cap_digits);
    let mut kr = KReduction::with_source(k, m, d, roots)?;
    kr.cap_digits = prec.cap_digits;
    Ok(kr)
}

/// Stage 1 only, with an explicit precision policy and root source.
pub fn stage1_with(k: u32, prec: &Precision, roots: RootSource) -> Result<(ReductionOutcome, u32)> {
    let mut kr = reduction_for(k, prec, roots)?;
    let o = kr.stage1()?;
    Ok((o, kr.digits))
}

/// [`campaign_for_k`] with an explicit precision policy and root source.
pub fn campaign_with(k: u32, prec: &Precision, roots: RootSource) -> Result<KCampaign> {
    let mut kr = reduction_for(k, prec, roots)?;
    let s1 = kr.stage1()?;
    let nm_max = s1.w_max();
    let mut max_w: Option<(Interval, i64)> = None;
    let mut max_attempts = s1.attempts;
    let mut n_max = 0i64;
    for nm in 1..=nm_max {
        let o = kr.stage2(nm)?;
        max_attempts = max_attempts.max(o.attempts);
        // n - 1 < w  =>  n <= w_max + 1
        n_max = n_max.max(o.w_max() + 1);
        let better = match &max_w {
            None => true,
            Some((w, _)) => w.upper_f64() < o.w_bound.upper_f64(),
        };
        if better {
            max_w = Some((o.w_bound.clone(), nm));
        }
    }
    let (stage2_max, stage2_argmax) = max_w.expect("nm_max >= 1");
    Ok(KCampaign {
        k,
        m_k: kr.m.clone(),
        stage1: s1,
        nm_max,
        stage2_max,
        stage2_argmax,
        n_max,
        max_attempts,
        digits: kr.digits,
    })
}

/// Bound on `n` for the `a = n - 2` case. The same two linear forms are used
/// with `u = a`, `v = n` (substituting `a = n - 2` would turn `gamma` into
/// `gamma - 1`, which is about `2^-k`).
pub fn reduce_a_eq_n_minus_2(k: u32) -> Result<i64> {
    Ok(campaign_for_k(k)?.n_max)
}
