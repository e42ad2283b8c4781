//! Rectangular complex intervals built on [`Interval`].

use std::ops::{Add, Mul, Sub};

use num_bigint::BigInt;

use crate::interval::Interval;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComplexInterval {
    pub re: Interval,
    pub im: Interval,
}

impl ComplexInterval {
    pub fn new(re: Interval, im: Interval) -> Self {
        ComplexInterval { re, im }
    }

    pub fn from_real(re: Interval) -> Self {
        let p = re.prec();
        ComplexInterval { re, im: Interval::zero(p) }
    }

    pub fn from_f64(re: f64, im: f64, prec: u32) -> Self {
        ComplexInterval::new(Interval::from_f64(re, prec), Interval::from_f64(im, prec))
    }

    /// Box enclosing the closed disk of radius `radius` around `center`.
    pub fn from_disk(center: &ComplexInterval, radius: &Interval) -> Self {
        let r = radius.abs().upper();
        let widen = |x: &Interval| {
            let lo = &x.lower() - &r;
            let hi = &x.upper() + &r;
            lo.hull(&hi)
        };
        ComplexInterval::new(widen(&center.re), widen(&center.im))
    }

    pub fn prec(&self) -> u32 {
        self.re.prec().max(self.im.prec())
    }

    pub fn midpoint(&self) -> ComplexInterval {
        ComplexInterval::new(self.re.midpoint(), self.im.midpoint())
    }

    pub fn conj(&self) -> ComplexInterval {
        ComplexInterval::new(self.re.clone(), -&self.im)
    }

    pub fn contains_zero(&self) -> bool {
        self.re.contains_zero() && self.im.contains_zero()
    }

    pub fn contains(&self, other: &ComplexInterval) -> bool {
        self.re.contains(&other.re) && self.im.contains(&other.im)
    }

    /// Enclosure of `|z|^2`.
    pub fn norm_sqr(&self) -> Interval {
        &self.re.sqr() + &self.im.sqr()
    }

    /// Enclosure of `|z|`.
    pub fn abs(&self) -> Interval {
        self.norm_sqr().sqrt()
    }

    pub fn scale(&self, s: &Interval) -> ComplexInterval {
        ComplexInterval::new(&self.re * s, &self.im * s)
    }

    pub fn scale_int(&self, z: &BigInt) -> ComplexInterval {
        ComplexInterval::new(self.re.mul_int(z), self.im.mul_int(z))
    }

    pub fn add_real(&self, x: &Interval) -> ComplexInterval {
        ComplexInterval::new(&self.re + x, self.im.clone())
    }

    pub fn recip(&self) -> ComplexInterval {
        let d = self.norm_sqr();
        assert!(!d.contains_zero(), "complex division by an enclosure of zero");
        ComplexInterval::new(self.re.div(&d), (-&self.im).div(&d))
    }

    /// Division; panics when the divisor's box contains zero.
    pub fn div(&self, other: &ComplexInterval) -> ComplexInterval {
        let d = other.norm_sqr();
        assert!(!d.contains_zero(), "complex division by an enclosure of zero");
        let num = self * &other.conj();
        ComplexInterval::new(num.re.div(&d), num.im.div(&d))
    }

    pub fn powi(&self, n: u64) -> ComplexInterval {
        let p = self.prec();
        let mut base = self.clone();
        let mut acc = ComplexInterval::from_real(Interval::one(p));
        let mut e = n;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = base.sqr();
            }
        }
        acc
    }

    pub fn sqr(&self) -> ComplexInterval {
        let re = &self.re.sqr() - &self.im.sqr();
        let im = (&self.re * &self.im).mul_pow2(1);
        ComplexInterval::new(re, im)
    }
}

impl Add for &ComplexInterval {
    type Output = ComplexInterval;
    fn add(self, o: &ComplexInterval) -> ComplexInterval {
        ComplexInterval::new(&self.re + &o.re, &self.im + &o.im)
    }
}

impl Sub for &ComplexInterval {
    type Output = ComplexInterval;
    fn sub(self, o: &ComplexInterval) -> ComplexInterval {
        ComplexInterval::new(&self.re - &o.re, &self.im - &o.im)
    }
}

impl Mul for &ComplexInterval {
    type Output = ComplexInterval;
    fn mul(self, o: &ComplexInterval) -> ComplexInterval {
        let re = &(&self.re * &o.re) - &(&self.im * &o.im);
        let im = &(&self.re * &o.im) + &(&self.im * &o.re);
        ComplexInterval::new(re, im)
    }
}
