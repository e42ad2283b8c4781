//! Fixed-point interval arithmetic over arbitrary-precision integers.
//!
//! An [`Interval`] of precision `p` denotes the closed set
//! `[lo / 2^p, hi / 2^p]`. Every operation rounds the lower endpoint toward
//! negative infinity and the upper endpoint toward positive infinity, so the
//! result always contains the exact image of every point of the operands.
//! Decisions (signs, inequalities, integer parts) are taken only when the
//! enclosure decides them; callers escalate precision otherwise.
//!
//! Fixed point (rather than floating point) keeps the representation
//! simple: the values met in this crate are either of moderate size or
//! large integers times moderate reals, and absolute error is what the
//! continued-fraction and nearest-integer logic needs.

use std::cmp::{max, min, Ordering};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Mutex;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// `floor(x / 2^s)`.
pub fn floor_shr(x: &BigInt, s: u32) -> BigInt {
    if s == 0 {
        return x.clone();
    }
    if x.sign() == Sign::Minus {
        let t: BigInt = -x - 1u32;
        -(t >> s) - 1u32
    } else {
        x >> s
    }
}

/// `ceil(x / 2^s)`.
pub fn ceil_shr(x: &BigInt, s: u32) -> BigInt {
    -floor_shr(&-x, s)
}

pub fn floor_div(a: &BigInt, b: &BigInt) -> BigInt {
    a.div_floor(b)
}

pub fn ceil_div(a: &BigInt, b: &BigInt) -> BigInt {
    -((-a).div_floor(b))
}

/// Bits needed to represent `digits` decimal digits.
pub fn digits_to_bits(digits: u32) -> u32 {
    // log2(10) < 3.3219281
    ((digits as u64 * 33_219_281).div_ceil(10_000_000)) as u32
}

#[derive(Clone, PartialEq, Eq)]
pub struct Interval {
    lo: BigInt,
    hi: BigInt,
    prec: u32,
}

impl fmt::Debug for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Interval[{:e}, {:e}; p={}]",
            self.lower_f64(),
            self.upper_f64(),
            self.prec
        )
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ± {:.3e}", self.to_decimal(20), self.radius_f64())
    }
}

impl Interval {
    /// Builds `[lo, hi] * 2^-prec`. Panics if `lo > hi`.
    pub fn from_raw(lo: BigInt, hi: BigInt, prec: u32) -> Self {
        assert!(lo <= hi, "interval endpoints out of order");
        Interval { lo, hi, prec }
    }

    pub fn zero(prec: u32) -> Self {
        Interval::from_raw(BigInt::zero(), BigInt::zero(), prec)
    }

    pub fn one(prec: u32) -> Self {
        Interval::from_int(1, prec)
    }

    pub fn from_int<T: Into<BigInt>>(v: T, prec: u32) -> Self {
        let v: BigInt = v.into() << prec;
        Interval::from_raw(v.clone(), v, prec)
    }

    /// Outward-rounded enclosure of `num / den`.
    pub fn from_ratio(num: &BigInt, den: &BigInt, prec: u32) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        let n: BigInt = num << prec;
        let (lo, hi) = if den.is_negative() {
            (floor_div(&-&n, &-den), ceil_div(&-&n, &-den))
        } else {
            (floor_div(&n, den), ceil_div(&n, den))
        };
        Interval::from_raw(lo, hi, prec)
    }

    /// Outward-rounded enclosure of `mant * 2^exp`.
    pub fn from_dyadic(mant: &BigInt, exp: i64, prec: u32) -> Self {
        let shift = exp + prec as i64;
        if shift >= 0 {
            let v: BigInt = mant << shift as u64;
            Interval::from_raw(v.clone(), v, prec)
        } else {
            let s = (-shift) as u32;
            Interval::from_raw(floor_shr(mant, s), ceil_shr(mant, s), prec)
        }
    }

    /// Exact conversion of a finite `f64` (outward rounded only when `prec`
    /// is too small to hold it).
    pub fn from_f64(x: f64, prec: u32) -> Self {
        assert!(x.is_finite());
        if x == 0.0 {
            return Interval::zero(prec);
        }
        let bits = x.to_bits();
        let sign = if bits >> 63 == 0 { 1i64 } else { -1 };
        let exponent = ((bits >> 52) & 0x7ff) as i64;
        let mantissa = if exponent == 0 {
            (bits & 0xf_ffff_ffff_ffff) << 1
        } else {
            (bits & 0xf_ffff_ffff_ffff) | 0x10_0000_0000_0000
        };
        let m = BigInt::from(mantissa as i64 * sign);
        Interval::from_dyadic(&m, exponent - 1075, prec)
    }

    /// Enclosure of the decimal number `s` (e.g. `"-12.3456"`) widened by
    /// `slack_ulps` units of its last digit on both sides.
    pub fn from_decimal_str(s: &str, slack_ulps: u32, prec: u32) -> Option<Self> {
        let s = s.trim();
        let (neg, body) = match s.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, s),
        };
        let (int_part, frac_part) = match body.split_once('.') {
            Some((i, f)) => (i, f),
            None => (body, ""),
        };
        if int_part.is_empty() || !int_part.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        if !frac_part.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        let digits = format!("{int_part}{frac_part}");
        let mut n: BigInt = digits.parse().ok()?;
        if neg {
            n = -n;
        }
        let den = BigInt::from(10u32).pow(frac_part.len() as u32);
        let lo = Interval::from_ratio(&(&n - slack_ulps), &den, prec);
        let hi = Interval::from_ratio(&(&n + slack_ulps), &den, prec);
        Some(lo.hull(&hi))
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    pub fn lo_raw(&self) -> &BigInt {
        &self.lo
    }

    pub fn hi_raw(&self) -> &BigInt {
        &self.hi
    }

    /// Re-expresses the enclosure at precision `p` (exact when raising).
    pub fn with_prec(&self, p: u32) -> Self {
        match p.cmp(&self.prec) {
            Ordering::Equal => self.clone(),
            Ordering::Greater => {
                let s = p - self.prec;
                Interval::from_raw(&self.lo << s, &self.hi << s, p)
            }
            Ordering::Less => {
                let s = self.prec - p;
                Interval::from_raw(floor_shr(&self.lo, s), ceil_shr(&self.hi, s), p)
            }
        }
    }

    fn aligned(&self, other: &Interval) -> (Interval, Interval) {
        let p = max(self.prec, other.prec);
        (self.with_prec(p), other.with_prec(p))
    }

    pub fn lower(&self) -> Interval {
        Interval::from_raw(self.lo.clone(), self.lo.clone(), self.prec)
    }

    pub fn upper(&self) -> Interval {
        Interval::from_raw(self.hi.clone(), self.hi.clone(), self.prec)
    }

    pub fn hull(&self, other: &Interval) -> Interval {
        let (a, b) = self.aligned(other);
        Interval::from_raw(min(a.lo, b.lo), max(a.hi, b.hi), a.prec)
    }

    /// Widens the enclosure by `raw` units of `2^-prec` on each side.
    pub fn widen_raw(&self, raw: &BigInt) -> Interval {
        Interval::from_raw(&self.lo - raw, &self.hi + raw, self.prec)
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn width_raw(&self) -> BigInt {
        &self.hi - &self.lo
    }

    /// Enclosure width as an outward (upper) bound.
    pub fn width(&self) -> Interval {
        let w = self.width_raw();
        Interval::from_raw(w.clone(), w, self.prec)
    }

    pub fn midpoint(&self) -> Interval {
        let m = floor_shr(&(&self.lo + &self.hi), 1);
        Interval::from_raw(m.clone(), m, self.prec)
    }

    pub fn is_positive(&self) -> bool {
        self.lo.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.hi.is_negative()
    }

    pub fn is_nonneg(&self) -> bool {
        !self.lo.is_negative()
    }

    pub fn contains_zero(&self) -> bool {
        !self.lo.is_positive() && !self.hi.is_negative()
    }

    /// `true` when every point of `self` is strictly below every point of `other`.
    pub fn certainly_lt(&self, other: &Interval) -> bool {
        let (a, b) = self.aligned(other);
        a.hi < b.lo
    }

    pub fn certainly_le(&self, other: &Interval) -> bool {
        let (a, b) = self.aligned(other);
        a.hi <= b.lo
    }

    pub fn certainly_gt(&self, other: &Interval) -> bool {
        other.certainly_lt(self)
    }

    /// `true` when `other` is a subset of `self`.
    pub fn contains(&self, other: &Interval) -> bool {
        let (a, b) = self.aligned(other);
        a.lo <= b.lo && b.hi <= a.hi
    }

    pub fn contains_int(&self, z: &BigInt) -> bool {
        let v: BigInt = z << self.prec;
        self.lo <= v && v <= self.hi
    }

    /// Largest integer not exceeding the lower endpoint.
    pub fn floor_lo(&self) -> BigInt {
        floor_shr(&self.lo, self.prec)
    }

    /// Smallest integer not below the upper endpoint.
    pub fn ceil_hi(&self) -> BigInt {
        ceil_shr(&self.hi, self.prec)
    }

    /// The floor, when it is the same for every point of the enclosure.
    pub fn floor_certified(&self) -> Option<BigInt> {
        let a = floor_shr(&self.lo, self.prec);
        let b = floor_shr(&self.hi, self.prec);
        (a == b).then_some(a)
    }

    /// The only integer inside the enclosure, if there is exactly one.
    pub fn unique_integer(&self) -> Option<BigInt> {
        let a = ceil_shr(&self.lo, self.prec);
        let b = floor_shr(&self.hi, self.prec);
        (a == b).then_some(a)
    }

    pub fn abs(&self) -> Interval {
        if self.lo.is_negative() && self.hi.is_positive() {
            Interval::from_raw(BigInt::zero(), max(-&self.lo, self.hi.clone()), self.prec)
        } else if self.hi.sign() != Sign::Plus {
            Interval::from_raw(-&self.hi, -&self.lo, self.prec)
        } else {
            self.clone()
        }
    }

    pub fn max(&self, other: &Interval) -> Interval {
        let (a, b) = self.aligned(other);
        Interval::from_raw(max(a.lo, b.lo), max(a.hi, b.hi), a.prec)
    }

    pub fn min(&self, other: &Interval) -> Interval {
        let (a, b) = self.aligned(other);
        Interval::from_raw(min(a.lo, b.lo), min(a.hi, b.hi), a.prec)
    }

    /// Exact multiplication by an integer.
    pub fn mul_int(&self, z: &BigInt) -> Interval {
        let a = &self.lo * z;
        let b = &self.hi * z;
        if z.is_negative() {
            Interval::from_raw(b, a, self.prec)
        } else {
            Interval::from_raw(a, b, self.prec)
        }
    }

    pub fn div_int(&self, z: &BigInt) -> Interval {
        assert!(!z.is_zero(), "division by zero");
        if z.is_negative() {
            return (-self).div_int(&-z);
        }
        Interval::from_raw(floor_div(&self.lo, z), ceil_div(&self.hi, z), self.prec)
    }

    /// Multiplication by `2^e` (exact for `e >= 0`).
    pub fn mul_pow2(&self, e: i64) -> Interval {
        if e >= 0 {
            Interval::from_raw(&self.lo << e as u64, &self.hi << e as u64, self.prec)
        } else {
            let s = (-e) as u32;
            Interval::from_raw(floor_shr(&self.lo, s), ceil_shr(&self.hi, s), self.prec)
        }
    }

    pub fn sqr(&self) -> Interval {
        let p = self.prec;
        let (lo, hi) = if !self.lo.is_negative() {
            (&self.lo * &self.lo, &self.hi * &self.hi)
        } else if !self.hi.is_positive() {
            (&self.hi * &self.hi, &self.lo * &self.lo)
        } else {
            let a = &self.lo * &self.lo;
            let b = &self.hi * &self.hi;
            (BigInt::zero(), max(a, b))
        };
        Interval::from_raw(floor_shr(&lo, p), ceil_shr(&hi, p), p)
    }

    pub fn powi(&self, n: u64) -> Interval {
        match n {
            0 => Interval::one(self.prec),
            1 => self.clone(),
            _ if n.is_multiple_of(2) => self.powi(n / 2).sqr(),
            _ => self * &self.powi(n - 1),
        }
    }

    pub fn recip(&self) -> Interval {
        Interval::one(self.prec).div(self)
    }

    /// Division; panics when the divisor encloses zero.
    pub fn div(&self, other: &Interval) -> Interval {
        assert!(!other.contains_zero(), "interval division by an enclosure of zero");
        let (a, b) = self.aligned(other);
        let p = a.prec;
        let al: BigInt = &a.lo << p;
        let ah: BigInt = &a.hi << p;
        if b.lo.is_positive() && !a.lo.is_negative() {
            return Interval::from_raw(floor_div(&al, &b.hi), ceil_div(&ah, &b.lo), p);
        }
        let mut lo: Option<BigInt> = None;
        let mut hi: Option<BigInt> = None;
        for x in [&al, &ah] {
            for y in [&b.lo, &b.hi] {
                let f = floor_div(x, y);
                let c = ceil_div(x, y);
                lo = Some(match lo {
                    Some(v) => min(v, f),
                    None => f,
                });
                hi = Some(match hi {
                    Some(v) => max(v, c),
                    None => c,
                });
            }
        }
        Interval::from_raw(lo.unwrap(), hi.unwrap(), p)
    }

    pub fn sqrt(&self) -> Interval {
        assert!(!self.is_negative(), "square root of a negative enclosure");
        let p = self.prec;
        let lo = if self.lo.is_negative() {
            BigInt::zero()
        } else {
            BigInt::from((self.lo.magnitude() << p).sqrt())
        };
        let hsq: BigUint = self.hi.magnitude() << p;
        let mut hi = hsq.sqrt();
        if &hi * &hi < hsq {
            hi += 1u32;
        }
        Interval::from_raw(lo, BigInt::from(hi), p)
    }

    /// Natural logarithm of a positive enclosure.
    pub fn ln(&self) -> Interval {
        assert!(self.is_positive(), "logarithm of a non-positive enclosure");
        let p = self.prec;
        let base = ln_point(&self.lo, p);
        if self.is_point() {
            return base;
        }
        // ln(hi) <= ln(lo) + (hi - lo) / lo
        let slack = ceil_div(&(self.width_raw() << p), &self.lo);
        Interval::from_raw(base.lo, base.hi + slack, p)
    }

    /// `ln(1 + self)` for `self > -1`; accurate for tiny arguments.
    pub fn ln1p(&self) -> Interval {
        let p = self.prec;
        let small = BigInt::one() << p.saturating_sub(8);
        if self.lo.is_negative() || self.hi > small {
            return (&Interval::one(p) + self).ln();
        }
        // ln(1+t) = 2 atanh(t / (2 + t)); the derivative is at most 1 for t >= 0.
        let wp = p + 24;
        let t = self.lower().with_prec(wp);
        let s = t.div(&(&Interval::from_int(2, wp) + &t));
        let base = atanh_series(&s).mul_pow2(1).with_prec(p);
        Interval::from_raw(base.lo, base.hi + self.width_raw(), p)
    }

    /// Decimal rendering of the midpoint truncated to `digits` fractional digits.
    pub fn to_decimal(&self, digits: u32) -> String {
        let mid = floor_shr(&(&self.lo + &self.hi), 1);
        let scaled = floor_shr(&(mid * BigInt::from(10u32).pow(digits)), self.prec);
        let neg = scaled.is_negative();
        let s = scaled.magnitude().to_string();
        let d = digits as usize;
        let s = if s.len() <= d { format!("{}{}", "0".repeat(d + 1 - s.len()), s) } else { s };
        let (ip, fp) = s.split_at(s.len() - d);
        let sign = if neg { "-" } else { "" };
        if d == 0 {
            format!("{sign}{ip}")
        } else {
            format!("{sign}{ip}.{fp}")
        }
    }

    /// An `f64` that is `<=` every point of the enclosure.
    pub fn lower_f64(&self) -> f64 {
        raw_to_f64(&self.lo, self.prec).next_down().next_down()
    }

    /// An `f64` that is `>=` every point of the enclosure.
    pub fn upper_f64(&self) -> f64 {
        raw_to_f64(&self.hi, self.prec).next_up().next_up()
    }

    /// Approximate midpoint as `f64` (display and heuristics only).
    pub fn mid_f64(&self) -> f64 {
        raw_to_f64(&floor_shr(&(&self.lo + &self.hi), 1), self.prec)
    }

    pub fn radius_f64(&self) -> f64 {
        raw_to_f64(&self.width_raw(), self.prec) / 2.0
    }
}

fn raw_to_f64(v: &BigInt, prec: u32) -> f64 {
    let bits = v.bits();
    if bits > 1000 {
        let shift = bits - 1000;
        let r = floor_shr(v, shift as u32).to_f64().unwrap_or(f64::NAN);
        return r * 2f64.powi(shift as i32 - prec as i32);
    }
    let r = v.to_f64().unwrap_or(f64::NAN);
    if prec > 1000 {
        r * 2f64.powi(-1000) * 2f64.powi(1000 - prec as i32)
    } else {
        r * 2f64.powi(-(prec as i32))
    }
}

/// `atanh(s) = sum s^(2j+1)/(2j+1)` for `|s| <= 1/2`, with the truncated tail
/// folded into the enclosure.
fn atanh_series(s: &Interval) -> Interval {
    let p = s.prec;
    let half = Interval::from_ratio(&BigInt::one(), &BigInt::from(2), p);
    assert!(s.abs().certainly_le(&half), "atanh series argument too large");
    let s2 = s.sqr();
    let mut term = s.clone();
    let mut sum = s.clone();
    let mut j: u64 = 1;
    loop {
        term = &term * &s2;
        let mag = term.abs();
        if mag.hi <= BigInt::one() {
            // remaining terms sum to at most |term| * s2 / (1 - s2) <= |term|
            let t = &mag.hi + 1u32;
            return sum.widen_raw(&t);
        }
        sum = &sum + &term.div_int(&BigInt::from(2 * j + 1));
        j += 1;
    }
}

static LN2_CACHE: Mutex<Option<Interval>> = Mutex::new(None);

/// Enclosure of `ln 2` at precision `p`.
pub fn ln2(p: u32) -> Interval {
    {
        let guard = LN2_CACHE.lock().unwrap();
        if let Some(c) = guard.as_ref() {
            if c.prec >= p {
                return c.with_prec(p);
            }
        }
    }
    let wp = p + 32;
    let third = Interval::from_ratio(&BigInt::one(), &BigInt::from(3), wp);
    let v = atanh_series(&third).mul_pow2(1);
    let out = v.with_prec(p);
    *LN2_CACHE.lock().unwrap() = Some(v);
    out
}

/// Enclosure of `ln(m * 2^-p)` for a positive integer `m`.
fn ln_point(m: &BigInt, p: u32) -> Interval {
    assert!(m.is_positive());
    let b = m.bits() as i64;
    // x = 2^e * y with y in [1/sqrt2, sqrt2)
    let mut e = b - 1 - p as i64;
    let mut y_shift = b - 1;
    // y >= sqrt2  <=>  m^2 >= 2^(2(b-1)+1)
    if (m * m) >= (BigInt::one() << (2 * (b - 1) + 1) as u64) {
        e += 1;
        y_shift = b;
    }
    let r: u32 = (((p as f64).sqrt() / 2.0) as u32).clamp(2, 24);
    let wp = p + 32 + r;
    let mut y = Interval::from_dyadic(m, -y_shift, wp);
    for _ in 0..r {
        y = y.sqrt();
    }
    let one = Interval::one(wp);
    let s = (&y - &one).div(&(&y + &one));
    let mut acc = atanh_series(&s).mul_pow2(r as i64 + 1);
    if e != 0 {
        acc = &acc + &ln2(wp).mul_int(&BigInt::from(e));
    }
    acc.with_prec(p)
}

impl Neg for &Interval {
    type Output = Interval;
    fn neg(self) -> Interval {
        Interval::from_raw(-&self.hi, -&self.lo, self.prec)
    }
}

impl Neg for Interval {
    type Output = Interval;
    fn neg(self) -> Interval {
        -&self
    }
}

impl Add for &Interval {
    type Output = Interval;
    fn add(self, other: &Interval) -> Interval {
        if self.prec == other.prec {
            return Interval::from_raw(&self.lo + &other.lo, &self.hi + &other.hi, self.prec);
        }
        let (a, b) = self.aligned(other);
        Interval::from_raw(a.lo + b.lo, a.hi + b.hi, a.prec)
    }
}

impl Sub for &Interval {
    type Output = Interval;
    fn sub(self, other: &Interval) -> Interval {
        if self.prec == other.prec {
            return Interval::from_raw(&self.lo - &other.hi, &self.hi - &other.lo, self.prec);
        }
        let (a, b) = self.aligned(other);
        Interval::from_raw(a.lo - b.hi, a.hi - b.lo, a.prec)
    }
}

impl Mul for &Interval {
    type Output = Interval;
    fn mul(self, other: &Interval) -> Interval {
        if self.prec != other.prec {
            let (a, b) = self.aligned(other);
            return &a * &b;
        }
        let p = self.prec;
        let (a, b) = (self, other);
        let (lo, hi) = if !a.lo.is_negative() && !b.lo.is_negative() {
            (&a.lo * &b.lo, &a.hi * &b.hi)
        } else if !a.hi.is_positive() && !b.hi.is_positive() {
            (&a.hi * &b.hi, &a.lo * &b.lo)
        } else if !a.lo.is_negative() && !b.hi.is_positive() {
            (&a.hi * &b.lo, &a.lo * &b.hi)
        } else if !a.hi.is_positive() && !b.lo.is_negative() {
            (&a.lo * &b.hi, &a.hi * &b.lo)
        } else {
            let c = [&a.lo * &b.lo, &a.lo * &b.hi, &a.hi * &b.lo, &a.hi * &b.hi];
            let lo = c.iter().min().unwrap().clone();
            let hi = c.iter().max().unwrap().clone();
            (lo, hi)
        };
        Interval::from_raw(floor_shr(&lo, p), ceil_shr(&hi, p), p)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<Interval> for Interval {
            type Output = Interval;
            fn $m(self, other: Interval) -> Interval {
                (&self).$m(&other)
            }
        }
        impl $tr<&Interval> for Interval {
            type Output = Interval;
            fn $m(self, other: &Interval) -> Interval {
                (&self).$m(other)
            }
        }
        impl $tr<Interval> for &Interval {
            type Output = Interval;
            fn $m(self, other: Interval) -> Interval {
                self.$m(&other)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

#[cfg(test)]
mod tests {
    use super::*;

    const P: u32 = 200;

    fn approx(x: &Interval, v: f64, tol: f64) {
        assert!(
            (x.mid_f64() - v).abs() < tol,
            "{x:?} not within {tol} of {v}"
        );
    }

    #[test]
    fn shifts_round_in_the_right_direction() {
        let m7 = BigInt::from(-7);
        assert_eq!(floor_shr(&m7, 1), BigInt::from(-4));
        assert_eq!(ceil_shr(&m7, 1), BigInt::from(-3));
        assert_eq!(floor_shr(&BigInt::from(7), 1), BigInt::from(3));
        assert_eq!(ceil_shr(&BigInt::from(7), 1), BigInt::from(4));
        assert_eq!(floor_shr(&BigInt::from(-8), 2), BigInt::from(-2));
        assert_eq!(ceil_shr(&BigInt::from(-8), 2), BigInt::from(-2));
    }

    #[test]
    fn ratio_encloses_value() {
        let third = Interval::from_ratio(&BigInt::from(1), &BigInt::from(3), P);
        assert!(!third.is_point());
        let three = third.mul_int(&BigInt::from(3));
        assert!(three.contains_int(&BigInt::one()));
        let neg = Interval::from_ratio(&BigInt::from(1), &BigInt::from(-3), P);
        assert!((&neg + &third).contains_zero());
    }

    #[test]
    fn mul_handles_all_sign_patterns() {
        let a = Interval::from_raw(BigInt::from(-2) << P, BigInt::from(3) << P, P);
        let b = Interval::from_raw(BigInt::from(-5) << P, BigInt::from(-1) << P, P);
        let c = &a * &b;
        assert_eq!(c, Interval::from_raw(BigInt::from(-15) << P, BigInt::from(10) << P, P));
        assert_eq!(a.sqr(), Interval::from_raw(BigInt::zero(), BigInt::from(9) << P, P));
    }

    #[test]
    fn sqrt_and_ln_known_values() {
        let two = Interval::from_int(2, P);
        approx(&two.sqrt(), std::f64::consts::SQRT_2, 1e-15);
        let l2 = ln2(P);
        approx(&l2, std::f64::consts::LN_2, 1e-15);
        assert!(l2.width_raw() < BigInt::from(1u32 << 8));
        approx(&Interval::from_int(10, P).ln(), 10f64.ln(), 1e-14);
        approx(&Interval::from_ratio(&BigInt::from(1), &BigInt::from(1000), P).ln(), (1e-3f64).ln(), 1e-13);
        assert!(Interval::one(P).ln().contains_zero());
        // exp(ln 7) identity through squaring: ln(49) = 2 ln(7)
        let l7 = Interval::from_int(7, P).ln();
        let l49 = Interval::from_int(49, P).ln();
        assert!((&l49 - &l7.mul_int(&BigInt::from(2))).contains_zero());
    }

    #[test]
    fn ln1p_agrees_with_ln() {
        let t = Interval::from_dyadic(&BigInt::from(3), -40, P);
        let a = t.ln1p();
        let b = (&Interval::one(P) + &t).ln();
        assert!((&a - &b).contains_zero());
        assert!(a.width_raw() < BigInt::from(1u32 << 12));
    }

    #[test]
    fn decimal_round_trip() {
        let x = Interval::from_ratio(&BigInt::from(22), &BigInt::from(7), P);
        let s = x.to_decimal(30);
        assert!(s.starts_with("3.142857142857142857142857142857"));
        let y = Interval::from_decimal_str(&s, 1, P).unwrap();
        assert!(y.contains(&x));
        assert_eq!(Interval::from_int(-3, 10).to_decimal(2), "-3.00");
    }

    #[test]
    fn f64_bounds_are_outward() {
        let x = Interval::from_ratio(&BigInt::from(1), &BigInt::from(3), P);
        assert!(x.lower_f64() < 1.0 / 3.0 + 1e-17);
        assert!(x.upper_f64() > 1.0 / 3.0 - 1e-17);
        assert!(Interval::from_f64(0.1, 80).contains(&Interval::from_f64(0.1, 80)));
    }

    #[test]
    fn digits_to_bits_rounds_up() {
        assert_eq!(digits_to_bits(1), 4);
        assert!(digits_to_bits(64) >= 213);
    }
}
