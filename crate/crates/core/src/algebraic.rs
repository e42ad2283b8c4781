//! Certified enclosures of the roots of `Psi_k(x) = x^k - x^(k-1) - ... - 1`,
//! the function `f_k(x) = (x-1)/(2+(k+1)(x-2))`, the Binet-like formula and
//! logarithmic heights.
//!
//! Working precision is requested in decimal digits and converted to bits
//! with a guard. Anything the enclosures cannot decide is reported as
//! [`Error::Precision`], and [`escalate`] retries with doubled precision.

use std::cmp::Ordering;
use std::f64::consts::PI;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::complex::ComplexInterval;
use crate::error::{Error, Result};
use crate::interval::{digits_to_bits, Interval};
use crate::poly::{resultant, BivariatePoly, IntPoly};

/// Default starting precision (decimal digits) for escalation.
pub const START_DIGITS: u32 = 64;
/// Default precision cap (decimal digits).
pub const CAP_DIGITS: u32 = 4096;
/// Largest `k` for which heights are computed through resultants.
pub const HEIGHT_K_CAP: u32 = 15;

const GUARD_BITS: u32 = 16;

/// Runs `f` at `start` digits and doubles on precision failures up to `cap`.
pub fn escalate<T>(start: u32, cap: u32, mut f: impl FnMut(u32) -> Result<T>) -> Result<T> {
    let mut digits = start.max(1);
    loop {
        match f(digits) {
            Err(e) if e.is_precision() => {
                if digits >= cap {
                    return Err(Error::PrecisionExhausted { cap, reason: e.to_string() });
                }
                log::debug!("escalating precision from {digits} digits: {e}");
                digits = (digits * 2).min(cap);
            }
            other => return other,
        }
    }
}

/// `Psi_k` with its exact integer coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CharPoly {
    k: u32,
    poly: IntPoly,
}

impl CharPoly {
    pub fn new(k: u32) -> Result<Self> {
        if k < 2 {
            return Err(Error::InvalidArgument(format!("k must be at least 2, got {k}")));
        }
        let mut c = vec![BigInt::from(-1); k as usize];
        c.push(BigInt::one());
        Ok(CharPoly { k, poly: IntPoly::new(c) })
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    /// Coefficients, constant term first.
    pub fn coefficients(&self) -> &[BigInt] {
        self.poly.coeffs()
    }

    pub fn poly(&self) -> &IntPoly {
        &self.poly
    }

    pub fn eval(&self, x: &Interval) -> Interval {
        self.poly.eval_interval(x)
    }

    pub fn eval_complex(&self, z: &ComplexInterval) -> ComplexInterval {
        self.poly.eval_complex(z)
    }
}

/// Working precision in bits for a `digits`-digit request at this `k`.
pub fn working_bits(k: u32, digits: u32) -> u32 {
    digits_to_bits(digits).max(k + 32) + GUARD_BITS
}

/// Certified enclosures for one value of `k`.
#[derive(Clone, Debug)]
pub struct RootContext {
    pub k: u32,
    /// Requested precision in decimal digits.
    pub digits: u32,
    pub alpha: Interval,
    /// Conjugates sorted by argument; empty for an alpha-only context.
    pub conjugates: Vec<ComplexInterval>,
    pub f_alpha: Interval,
    pub f_conjugates: Vec<ComplexInterval>,
}

impl RootContext {
    /// Completes a context from a certified enclosure of alpha.
    fn from_alpha(k: u32, digits: u32, alpha: Interval) -> Result<Self> {
        let f_alpha = f_k_eval(k, &alpha)?;
        Ok(RootContext {
            k,
            digits,
            alpha,
            conjugates: Vec::new(),
            f_alpha,
            f_conjugates: Vec::new(),
        })
    }

    pub fn bits(&self) -> u32 {
        self.alpha.prec()
    }

    pub fn has_conjugates(&self) -> bool {
        self.conjugates.len() + 1 == self.k as usize
    }

    pub fn log_alpha(&self) -> Interval {
        self.alpha.ln()
    }

    /// All `k` roots, alpha first.
    pub fn all_roots(&self) -> Vec<ComplexInterval> {
        let mut v = vec![ComplexInterval::from_real(self.alpha.clone())];
        v.extend(self.conjugates.iter().cloned());
        v
    }

    /// `f_k(alpha) * prod |f_k(alpha^(i))|`.
    pub fn f_norm(&self) -> Result<Interval> {
        self.require_conjugates()?;
        Ok(self
            .f_conjugates
            .iter()
            .fold(self.f_alpha.clone(), |acc, z| &acc * &z.abs()))
    }

    fn require_conjugates(&self) -> Result<()> {
        if self.has_conjugates() {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!(
                "conjugate enclosures for k = {} were not computed",
                self.k
            )))
        }
    }

    /// Certifies the bracket, moduli and `f_k` range statements about this context.
    pub fn check_invariants(&self) -> Result<()> {
        let p = self.bits();
        let k = self.k;
        if !alpha_in_bracket(k, &self.alpha) {
            return Err(Error::Certification(format!("alpha({k}) outside its bracket")));
        }
        let half = Interval::from_ratio(&BigInt::one(), &BigInt::from(2), p);
        let three_quarters = Interval::from_ratio(&BigInt::from(3), &BigInt::from(4), p);
        decide(
            half.certainly_lt(&self.f_alpha),
            self.f_alpha.certainly_le(&half),
            "f_k(alpha) > 1/2",
        )?;
        decide(
            self.f_alpha.certainly_lt(&three_quarters),
            three_quarters.certainly_le(&self.f_alpha),
            "f_k(alpha) < 3/4",
        )?;
        if self.has_conjugates() {
            let one = Interval::one(p);
            for z in &self.conjugates {
                decide(z.abs().certainly_lt(&one), false, "conjugate modulus < 1")?;
            }
            for z in &self.f_conjugates {
                decide(z.abs().certainly_lt(&one), false, "|f_k(conjugate)| < 1")?;
            }
            let n = self.f_norm()?;
            decide(n.is_positive() && n.certainly_lt(&one), false, "norm of f_k in (0,1)")?;
        }
        Ok(())
    }
}

/// `Ok` when `holds`; a certification failure when `fails`; otherwise a
/// precision failure.
fn decide(holds: bool, fails: bool, what: &str) -> Result<()> {
    if holds {
        Ok(())
    } else if fails {
        Err(Error::Certification(format!("{what} is false")))
    } else {
        Err(Error::Precision(format!("cannot decide {what}")))
    }
}

/// `true` when the enclosure lies in `(2(1-2^-k), 2)`.
pub fn alpha_in_bracket(k: u32, alpha: &Interval) -> bool {
    let p = alpha.prec() as u64;
    // lo * 2^-p > 2 - 2^(1-k)  <=>  lo * 2^k > (2^(k+1) - 2) * 2^p
    let lhs: BigInt = alpha.lo_raw() << k as u64;
    let rhs: BigInt = ((BigInt::one() << (k as u64 + 1)) - 2u32) << p;
    let below_two = alpha.hi_raw() < &(BigInt::from(2) << p);
    lhs > rhs && below_two
}

/// Sign of `g(x) = x^k (x-2) + 1 = (x-1) Psi_k(x)` at `x = m 2^-p`, decided by
/// an outward-rounded evaluation; `None` when the enclosure straddles zero.
fn g_sign_at(k: u32, m: &BigInt, p: u32) -> Option<Ordering> {
    let wp = p + 64 + 32 - k.leading_zeros();
    let x = Interval::from_dyadic(m, -(p as i64), wp);
    let two = Interval::from_int(2, wp);
    let g = &(&x.powi(k as u64) * &(&x - &two)) + &Interval::one(wp);
    if g.is_positive() {
        Some(Ordering::Greater)
    } else if g.is_negative() {
        Some(Ordering::Less)
    } else {
        None
    }
}

/// Certifies that `alpha(k)` lies in the enclosure: both endpoints are
/// above 1 and `Psi_k` changes sign from negative to positive.
pub fn certify_alpha(k: u32, alpha: &Interval) -> bool {
    let p = alpha.prec();
    let one: BigInt = BigInt::one() << p;
    alpha.lo_raw() > &one
        && g_sign_at(k, alpha.lo_raw(), p) == Some(Ordering::Less)
        && g_sign_at(k, alpha.hi_raw(), p) == Some(Ordering::Greater)
}

/// Newton iteration on `g` from `x = 2`, in point arithmetic at `wp` bits.
fn newton_alpha(k: u32, wp: u32) -> Interval {
    let two = Interval::from_int(2, wp);
    let one = Interval::one(wp);
    let kk = BigInt::from(k);
    let mut x = two.clone();
    let mut settled = 0;
    for _ in 0..10 * wp {
        let xk1 = x.powi(k as u64 - 1);
        let xk = &xk1 * &x;
        let g = &(&xk * &(&x - &two)) + &one;
        // g'(x) = x^(k-1) ((k+1) x - 2k)
        let dg = &xk1 * &(&x.mul_int(&(&kk + 1u32)) - &Interval::from_int(&kk * 2u32, wp));
        let step = g.midpoint().div(&dg.midpoint()).midpoint();
        x = (&x - &step).midpoint();
        if step.lo_raw().abs() <= BigInt::from(16) {
            settled += 1;
            if settled >= 2 {
                break;
            }
        }
    }
    x
}

/// Enclosure of the dominant root of `Psi_k` of width at most `10^-digits`.
pub fn dominant_root(k: u32, digits: u32) -> Result<RootContext> {
    if k < 2 {
        return Err(Error::InvalidArgument(format!("k must be at least 2, got {k}")));
    }
    if digits == 0 {
        return Err(Error::InvalidArgument("precision must be positive".into()));
    }
    let p = working_bits(k, digits);
    let wp = p + 32;
    let x = newton_alpha(k, wp);
    let m = crate::interval::floor_shr(x.lo_raw(), wp - p);
    let mut slack = BigInt::zero();
    for _ in 0..8 {
        let lo = &m - &slack;
        let hi = &m + 1u32 + &slack;
        let cand = Interval::from_raw(lo, hi, p);
        if certify_alpha(k, &cand) {
            let width_ok = cand.width_raw() * BigInt::from(10u32).pow(digits) <= BigInt::one() << p;
            if !width_ok {
                return Err(Error::Precision(format!("alpha({k}) enclosure too wide")));
            }
            if !alpha_in_bracket(k, &cand) {
                return Err(Error::Certification(format!("alpha({k}) outside its bracket")));
            }
            return RootContext::from_alpha(k, digits, cand);
        }
        slack = if slack.is_zero() { BigInt::one() } else { slack * 4u32 };
    }
    Err(Error::Precision(format!("no sign change certified for alpha({k})")))
}

/// Rebuilds an alpha-only context from a decimal string, re-certifying the
/// sign change. The string is widened by two units of its last digit.
pub fn alpha_from_decimal(k: u32, digits: u32, s: &str) -> Result<RootContext> {
    if k < 2 {
        return Err(Error::InvalidArgument(format!("k must be at least 2, got {k}")));
    }
    let p = working_bits(k, digits);
    let alpha = Interval::from_decimal_str(s, 2, p)
        .ok_or_else(|| Error::Parse(format!("not a decimal number: {s:?}")))?;
    if !certify_alpha(k, &alpha) || !alpha_in_bracket(k, &alpha) {
        return Err(Error::Certification(format!("stored digits do not enclose alpha({k})")));
    }
    RootContext::from_alpha(k, digits, alpha)
}

/// Decimal digits recorded for alpha so that reloading keeps width `<= 10^-digits`.
pub fn alpha_decimal(ctx: &RootContext) -> String {
    ctx.alpha.to_decimal(ctx.digits + 2)
}

fn psi_f64(k: u32, z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(1.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for _ in 0..k {
        dp = dp * z + p;
        p = p * z - 1.0;
    }
    (p, dp)
}

/// Aberth iteration for all roots of `Psi_k` in double precision.
fn aberth_f64(k: u32) -> Vec<Complex64> {
    let n = k as usize;
    let mut z: Vec<Complex64> = (0..n)
        .map(|j| Complex64::from_polar(1.2, 2.0 * PI * j as f64 / n as f64 + 0.4))
        .collect();
    for _ in 0..2000 {
        let mut worst: f64 = 0.0;
        for i in 0..n {
            let (p, dp) = psi_f64(k, z[i]);
            let w = p / dp;
            let s: Complex64 = (0..n).filter(|&j| j != i).map(|j| (z[i] - z[j]).inv()).sum();
            let corr = w / (Complex64::new(1.0, 0.0) - w * s);
            z[i] -= corr;
            worst = worst.max(corr.norm());
        }
        if worst < 1e-15 {
            break;
        }
    }
    z
}

/// Newton refinement of an approximate simple root at `wp` bits.
fn refine_complex(psi: &CharPoly, z0: Complex64, wp: u32) -> ComplexInterval {
    let d = psi.poly().derivative();
    let mut z = ComplexInterval::from_f64(z0.re, z0.im, wp);
    let tiny = BigInt::from(256);
    for _ in 0..64 {
        let p = psi.eval_complex(&z).midpoint();
        let dp = d.eval_complex(&z).midpoint();
        if dp.contains_zero() {
            break;
        }
        let step = p.div(&dp).midpoint();
        z = (&z - &step).midpoint();
        if step.re.lo_raw().abs() <= tiny && step.im.lo_raw().abs() <= tiny {
            break;
        }
    }
    z
}

/// Full context: alpha plus `k-1` certified, pairwise disjoint conjugate
/// enclosures, each of modulus below 1.
pub fn conjugate_roots(k: u32, digits: u32) -> Result<RootContext> {
    let mut ctx = dominant_root(k, digits)?;
    let wp = ctx.bits();
    let psi = CharPoly::new(k)?;
    let approx = aberth_f64(k);
    let ai = (0..approx.len())
        .max_by(|&a, &b| approx[a].re.total_cmp(&approx[b].re))
        .expect("k >= 2");
    let mut centers: Vec<ComplexInterval> = Vec::with_capacity(k as usize);
    centers.push(ComplexInterval::from_real(ctx.alpha.midpoint()));
    for (i, z) in approx.iter().enumerate() {
        if i != ai {
            centers.push(refine_complex(&psi, *z, wp));
        }
    }
    let kk = BigInt::from(k);
    let mut radii: Vec<Interval> = Vec::with_capacity(centers.len());
    for (i, zi) in centers.iter().enumerate() {
        let mut den = ComplexInterval::from_real(Interval::one(wp));
        for (j, zj) in centers.iter().enumerate() {
            if i != j {
                den = &den * &(zi - zj);
            }
        }
        if den.contains_zero() {
            return Err(Error::Precision(format!("root approximations for k = {k} coincide")));
        }
        let w = psi.eval_complex(zi).div(&den);
        radii.push(w.abs().mul_int(&kk).upper());
    }
    for i in 0..centers.len() {
        for j in i + 1..centers.len() {
            let gap = (&centers[i] - &centers[j]).norm_sqr();
            let reach = (&radii[i] + &radii[j]).sqr();
            if !reach.certainly_lt(&gap) {
                return Err(Error::Precision(format!("root disks for k = {k} overlap")));
            }
        }
    }
    let one = Interval::one(wp);
    let mut conj: Vec<(f64, ComplexInterval)> = Vec::with_capacity(centers.len() - 1);
    for (c, r) in centers.iter().zip(&radii).skip(1) {
        if !(&c.abs() + r).certainly_lt(&one) {
            return Err(Error::Precision(format!("conjugate disk for k = {k} reaches the unit circle")));
        }
        let arg = c.im.mid_f64().atan2(c.re.mid_f64());
        conj.push((arg, ComplexInterval::from_disk(c, r)));
    }
    conj.sort_by(|a, b| a.0.total_cmp(&b.0));
    ctx.conjugates = conj.into_iter().map(|(_, z)| z).collect();
    ctx.f_conjugates = ctx
        .conjugates
        .iter()
        .map(|z| f_k_eval_complex(k, z))
        .collect::<Result<_>>()?;
    Ok(ctx)
}

/// `f_k(x) = (x-1) / (2 + (k+1)(x-2))` on a real enclosure.
pub fn f_k_eval(k: u32, x: &Interval) -> Result<Interval> {
    let p = x.prec();
    let den = &Interval::from_int(2, p) + &(x - &Interval::from_int(2, p)).mul_int(&BigInt::from(k + 1));
    if den.contains_zero() {
        return Err(Error::Precision("denominator of f_k encloses zero".into()));
    }
    Ok((x - &Interval::one(p)).div(&den))
}

/// `f_k` on a complex enclosure.
pub fn f_k_eval_complex(k: u32, z: &ComplexInterval) -> Result<ComplexInterval> {
    let p = z.prec();
    let den = z
        .add_real(&Interval::from_int(-2, p))
        .scale_int(&BigInt::from(k + 1))
        .add_real(&Interval::from_int(2, p));
    if den.contains_zero() {
        return Err(Error::Precision("denominator of f_k encloses zero".into()));
    }
    Ok(z.add_real(&Interval::from_int(-1, p)).div(&den))
}

fn real_pow(x: &Interval, e: i64) -> Interval {
    if e >= 0 {
        x.powi(e as u64)
    } else {
        x.recip().powi(e.unsigned_abs())
    }
}

fn complex_pow(z: &ComplexInterval, e: i64) -> ComplexInterval {
    if e >= 0 {
        z.powi(e as u64)
    } else {
        z.recip().powi(e.unsigned_abs())
    }
}

/// Enclosure of `f_k(alpha) alpha^(n-1)`.
pub fn binet_dominant(ctx: &RootContext, n: i64) -> Result<Interval> {
    if n < 2 - ctx.k as i64 {
        return Err(Error::InvalidArgument(format!("n = {n} below the first index")));
    }
    Ok(&ctx.f_alpha * &real_pow(&ctx.alpha, n - 1))
}

/// Enclosure of `|exact - f_k(alpha) alpha^(n-1)|`, certified below `1/2`.
pub fn certify_binet_error(ctx: &RootContext, n: i64, exact: &BigInt) -> Result<Interval> {
    let v = binet_dominant(ctx, n)?;
    let p = v.prec();
    let err = (&Interval::from_int(exact.clone(), p) - &v).abs();
    let half = Interval::from_ratio(&BigInt::one(), &BigInt::from(2), p);
    decide(err.certainly_lt(&half), half.certainly_le(&err), "Binet error < 1/2")?;
    Ok(err)
}

/// `sum_i f_k(alpha^(i)) (alpha^(i))^(n-1)`; errors unless the enclosure
/// contains exactly one integer.
pub fn binet_full(ctx: &RootContext, n: i64) -> Result<Interval> {
    ctx.require_conjugates()?;
    if n < 2 - ctx.k as i64 {
        return Err(Error::InvalidArgument(format!("n = {n} below the first index")));
    }
    let mut acc = ComplexInterval::from_real(binet_dominant(ctx, n)?);
    for (z, fz) in ctx.conjugates.iter().zip(&ctx.f_conjugates) {
        acc = &acc + &(fz * &complex_pow(z, n - 1));
    }
    if !acc.im.contains_zero() {
        return Err(Error::Certification(format!("Binet sum for n = {n} is not real")));
    }
    if acc.re.unique_integer().is_none() {
        return Err(Error::Precision(format!("Binet sum for n = {n} does not isolate an integer")));
    }
    Ok(acc.re)
}

/// `delta = alpha^(r-1) - 2^(r-1)`, `eta = f_k(alpha) - 1/2` and the
/// recomposition residual `f_k(alpha) alpha^(r-1) - (2^(r-2) + delta/2 + 2^(r-1) eta + eta delta)`.
#[derive(Clone, Debug)]
pub struct Lemma4Decomposition {
    pub k: u32,
    pub r: i64,
    pub delta: Interval,
    pub eta: Interval,
    pub check: Interval,
}

impl Lemma4Decomposition {
    /// Certifies that the residual encloses 0, `|delta| < 2^r / 2^(k/2)` and
    /// `|eta| < 2k / 2^k`.
    pub fn certify(&self) -> Result<()> {
        if !self.check.contains_zero() {
            return Err(Error::Certification("recomposition residual excludes 0".into()));
        }
        let p = self.delta.prec();
        // |delta|^2 < 2^(2r - k)
        let d2 = self.delta.sqr();
        let bound = Interval::one(p).mul_pow2(2 * self.r - self.k as i64);
        decide(d2.certainly_lt(&bound), bound.certainly_le(&d2), "|delta| < 2^r/2^(k/2)")?;
        let eb = Interval::from_int(2 * self.k, p).mul_pow2(-(self.k as i64));
        let ea = self.eta.abs();
        decide(ea.certainly_lt(&eb), eb.certainly_le(&ea), "|eta| < 2k/2^k")?;
        Ok(())
    }
}

/// Builds the decomposition for `r > 1`, `(r-1)^2 < 2^k`.
pub fn lemma4_decompose(ctx: &RootContext, r: i64) -> Result<Lemma4Decomposition> {
    let k = ctx.k;
    let rm1 = BigInt::from(r - 1);
    if r <= 1 || &rm1 * &rm1 >= BigInt::one() << k as u64 {
        return Err(Error::InvalidArgument(format!(
            "r = {r} outside 1 < r, r-1 < 2^(k/2) for k = {k}"
        )));
    }
    let p = ctx.bits();
    let ar = ctx.alpha.powi((r - 1) as u64);
    let pow2 = Interval::one(p).mul_pow2(r - 1);
    let delta = &ar - &pow2;
    let eta = &ctx.f_alpha - &Interval::from_ratio(&BigInt::one(), &BigInt::from(2), p);
    let lhs = &ctx.f_alpha * &ar;
    let rhs = &(&(&Interval::one(p).mul_pow2(r - 2) + &delta.mul_pow2(-1)) + &(&pow2 * &eta)) + &(&eta * &delta);
    let check = &lhs - &rhs;
    let d = Lemma4Decomposition { k, r, delta, eta, check };
    d.certify()?;
    Ok(d)
}

/// `log max(|p|, q)` for a reduced fraction `p/q`.
pub fn height_rational(p: &BigInt, q: &BigInt, bits: u32) -> Result<Interval> {
    if !q.is_positive() || !p.gcd(q).is_one() {
        return Err(Error::InvalidArgument(format!("{p}/{q} is not a reduced fraction")));
    }
    let m = p.abs().max(q.clone());
    Ok(Interval::from_int(m, bits).ln())
}

/// `(1/d)(log a_0 + sum log max(|root|, 1))` for a primitive polynomial with
/// positive leading coefficient `a_0` and all its roots enclosed.
pub fn height_from_min_poly(poly: &IntPoly, roots: &[ComplexInterval]) -> Result<Interval> {
    let d = poly.degree().unwrap_or(0);
    if d == 0 || roots.len() != d {
        return Err(Error::InvalidArgument(format!(
            "expected {d} roots, got {}",
            roots.len()
        )));
    }
    let p = roots.iter().map(|z| z.prec()).max().unwrap_or(64);
    let one = Interval::one(p);
    let mut acc = Interval::from_int(poly.leading().unwrap().abs(), p).ln();
    for z in roots {
        let m = z.abs();
        if m.certainly_le(&one) {
            continue;
        }
        if one.certainly_lt(&m) {
            acc = &acc + &m.ln();
        } else {
            return Err(Error::Precision("root modulus too close to 1".into()));
        }
    }
    Ok(acc.div_int(&BigInt::from(d)))
}

/// Minimal polynomial of `f_k(alpha)` from `Res_x(Psi_k(x), ((k+1)y-1)x + 1 - 2ky)`.
pub fn min_poly_f_k(k: u32) -> Result<IntPoly> {
    let psi = CharPoly::new(k)?;
    let f: BivariatePoly = psi.coefficients().iter().map(|c| IntPoly::constant(c.clone())).collect();
    let k1 = k as i64 + 1;
    let l: BivariatePoly = vec![
        IntPoly::from_i64(&[1, -2 * k as i64]),
        IntPoly::from_i64(&[-1, k1]),
    ];
    Ok(resultant(&f, &l).primitive_part())
}

/// Same polynomial through the inverse map `x = (2ky-1)/((k+1)y-1)`:
/// `((k+1)y-1)^k Psi_k((2ky-1)/((k+1)y-1))`.
pub fn min_poly_f_k_mobius(k: u32) -> Result<IntPoly> {
    let psi = CharPoly::new(k)?;
    let num = IntPoly::from_i64(&[-1, 2 * k as i64]);
    let den = IntPoly::from_i64(&[-1, k as i64 + 1]);
    let mut acc = IntPoly::zero();
    for (j, c) in psi.coefficients().iter().enumerate() {
        let mut t = IntPoly::constant(c.clone());
        for _ in 0..j {
            t = &t * &num;
        }
        for _ in j..k as usize {
            t = &t * &den;
        }
        acc = &acc + &t;
    }
    Ok(acc.primitive_part())
}

#[derive(Clone, Debug)]
pub struct HeightReport {
    pub k: u32,
    pub min_poly: IntPoly,
    pub height: Interval,
    /// `3 log k`.
    pub bound: Interval,
}

/// `h(f_k(alpha))`, asserted below `3 log k`.
pub fn height_f_k(k: u32, cap: u32, digits: u32) -> Result<HeightReport> {
    if k > cap {
        return Err(Error::InvalidArgument(format!("k = {k} exceeds the height cap {cap}")));
    }
    let ctx = conjugate_roots(k, digits)?;
    let mp = min_poly_f_k(k)?;
    if mp != min_poly_f_k_mobius(k)? {
        return Err(Error::Certification(format!("resultant and substitution disagree for k = {k}")));
    }
    if mp.degree() != Some(k as usize) {
        return Err(Error::Certification(format!("minimal polynomial of f_{k}(alpha) has wrong degree")));
    }
    let mut roots = vec![ComplexInterval::from_real(ctx.f_alpha.clone())];
    roots.extend(ctx.f_conjugates.iter().cloned());
    for z in &roots {
        if !mp.eval_complex(z).contains_zero() {
            return Err(Error::Certification(format!("f_{k} value is not a root of its polynomial")));
        }
    }
    let height = height_from_min_poly(&mp, &roots)?;
    let bound = Interval::from_int(k, ctx.bits()).ln().mul_int(&BigInt::from(3));
    decide(height.certainly_lt(&bound), bound.certainly_le(&height), "h(f_k(alpha)) < 3 log k")?;
    Ok(HeightReport { k, min_poly: mp, height, bound })
}
