//! Exact k-generalized Fibonacci numbers and the closed forms used about them.
//!
//! `F^(k)` starts with `k-1` zeros at indices `2-k..=0`, then `F_1 = 1`, and
//! each later term is the sum of the `k` preceding ones.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Dense table of `F_n^(k)` for `n` in `2-k ..= n_max`.
#[derive(Clone, Debug)]
pub struct KFibTable {
    k: u32,
    n_max: i64,
    terms: Vec<BigUint>,
}

impl KFibTable {
    /// Builds the table with the three-term recursion `F_n = 2F_{n-1} - F_{n-k-1}`,
    /// valid from `n = 3` on.
    pub fn generate(k: u32, n_max: i64) -> Result<Self> {
        if k < 2 {
            return Err(Error::InvalidArgument(format!("k must be at least 2, got {k}")));
        }
        let first = 2 - k as i64;
        if n_max < first {
            return Err(Error::InvalidArgument(format!(
                "n_max = {n_max} is below the first index {first}"
            )));
        }
        let len = (n_max - first + 1) as usize;
        let mut terms: Vec<BigUint> = Vec::with_capacity(len);
        for n in first..=n_max {
            let t = match n {
                _ if n <= 0 => BigUint::zero(),
                1 | 2 => BigUint::one(),
                _ => {
                    let prev = &terms[(n - 1 - first) as usize];
                    let back = &terms[(n - k as i64 - 1 - first) as usize];
                    (prev << 1u32) - back
                }
            };
            terms.push(t);
        }
        Ok(KFibTable { k, n_max, terms })
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn first_index(&self) -> i64 {
        2 - self.k as i64
    }

    pub fn n_max(&self) -> i64 {
        self.n_max
    }

    pub fn get(&self, n: i64) -> Option<&BigUint> {
        if n < self.first_index() || n > self.n_max {
            return None;
        }
        self.terms.get((n - self.first_index()) as usize)
    }

    pub fn term(&self, n: i64) -> Result<&BigUint> {
        self.get(n).ok_or(Error::OutOfRange {
            index: n,
            first: self.first_index(),
            last: self.n_max,
        })
    }

    /// Terms with index `1..=n_max`, i.e. `slice[i] = F_{i+1}`.
    pub fn positive_terms(&self) -> &[BigUint] {
        let start = (1 - self.first_index()) as usize;
        &self.terms[start.min(self.terms.len())..]
    }

    /// `2 F_{n-1} - F_{n-k-1}`, computed from the table.
    pub fn term_three_recursion(&self, n: i64) -> Result<BigInt> {
        if n < 3 {
            return Err(Error::InvalidArgument(format!(
                "three-term recursion needs n >= 3, got {n}"
            )));
        }
        self.term(n)?;
        let prev = BigInt::from(self.term(n - 1)?.clone());
        let back = BigInt::from(self.term(n - self.k as i64 - 1)?.clone());
        Ok((prev << 1u32) - back)
    }
}

/// Reference generator: running sum of the last `k` terms, no shortcuts.
/// Returns `F_1..=F_{n_max}`.
pub fn generate_by_window(k: u32, n_max: usize) -> Vec<BigUint> {
    let k = k as usize;
    // window holds F_{2-k}..; start with the k-1 zeros
    let mut all: Vec<BigUint> = vec![BigUint::zero(); k - 1];
    let mut sum = BigUint::zero();
    for n in 1..=n_max {
        let t = if n == 1 { BigUint::one() } else { sum.clone() };
        sum += &t;
        all.push(t);
        if all.len() > k {
            sum -= &all[all.len() - 1 - k];
        }
    }
    all.split_off(k - 1)
}

/// `2^(n-2) - (n-k) 2^(n-k-3)` for `k+2 <= n <= 2k+2`.
pub fn segment_closed_form(k: u32, n: i64) -> Result<BigUint> {
    let k64 = k as i64;
    if k < 2 || n < k64 + 2 || n > 2 * k64 + 2 {
        return Err(Error::InvalidArgument(format!(
            "segment closed form needs k+2 <= n <= 2k+2, got k={k}, n={n}"
        )));
    }
    let terms = [
        (BigInt::one(), n - 2),
        (-BigInt::from(n - k64), n - k64 - 3),
    ];
    integral_dyadic_sum(&terms)
}

/// `binom(a, b)` with the convention that it vanishes when `a < b` or either
/// argument is negative.
pub fn binom(a: i64, b: i64) -> BigUint {
    if a < 0 || b < 0 || a < b {
        return BigUint::zero();
    }
    let b = b.min(a - b);
    let mut r = BigUint::one();
    for i in 0..b {
        r *= BigUint::from((a - i) as u64);
        r /= BigUint::from((i + 1) as u64);
    }
    r
}

/// `C_{n,j} = (-1)^j [binom(n-jk, j) - binom(n-jk-2, j-2)]`.
pub fn cooper_howard_coefficient(k: u32, n: i64, j: i64) -> BigInt {
    let jk = j * k as i64;
    let v = BigInt::from(binom(n - jk, j)) - BigInt::from(binom(n - jk - 2, j - 2));
    if j % 2 == 0 {
        v
    } else {
        -v
    }
}

/// Number of correction terms in the Cooper-Howard expansion:
/// `floor((n+k)/(k+1)) - 1`.
pub fn cooper_howard_terms(k: u32, n: i64) -> i64 {
    (n + k as i64).div_euclid(k as i64 + 1) - 1
}

/// Exact evaluation of the Cooper-Howard expansion of `F_n^(k)`, `n >= k+2`.
pub fn cooper_howard(k: u32, n: i64) -> Result<BigUint> {
    if k < 2 || n < k as i64 + 2 {
        return Err(Error::InvalidArgument(format!(
            "Cooper-Howard formula needs k >= 2 and n >= k+2, got k={k}, n={n}"
        )));
    }
    let k1 = k as i64 + 1;
    let mut terms = vec![(BigInt::one(), n - 2)];
    for j in 1..=cooper_howard_terms(k, n) {
        let c = cooper_howard_coefficient(k, n, j);
        if !c.is_zero() {
            terms.push((c, n - k1 * j - 2));
        }
    }
    integral_dyadic_sum(&terms)
}

/// `sum c_i 2^(e_i)` evaluated exactly, asserting the result is a
/// non-negative integer.
fn integral_dyadic_sum(terms: &[(BigInt, i64)]) -> Result<BigUint> {
    let min_e = terms.iter().map(|t| t.1).min().unwrap_or(0).min(0);
    let shift = (-min_e) as u64;
    let mut acc = BigInt::zero();
    for (c, e) in terms {
        acc += c << (e + shift as i64) as u64;
    }
    let mask = (BigInt::one() << shift) - 1;
    if !(&acc & &mask).is_zero() || acc.is_negative() {
        return Err(Error::Certification(
            "closed form did not evaluate to a non-negative integer".into(),
        ));
    }
    Ok((acc >> shift).to_biguint().expect("non-negative"))
}

/// Truncated Cooper-Howard expansion with the tail estimate proved for
/// `n < 2^k`.
#[derive(Clone, Debug)]
pub struct ExpansionResult {
    pub k: u32,
    pub n: i64,
    pub order: u32,
    /// `C_{n,1}, ..., C_{n,order}` (zero beyond the formula's summation range).
    pub coefficients: Vec<BigInt>,
    /// `2^(n-2) (1 + sum_j C_{n,j} 2^(-(k+1)j))`.
    pub main_terms: BigRational,
    /// Bound on the relative tail `s`: `4n^2/2^(2k+2)` for order 1 and
    /// `4n^3/2^(3k+3)` for order 2.
    pub remainder_bound: BigRational,
}

impl ExpansionResult {
    /// `|value - main_terms| <= remainder_bound * 2^(n-2)`, checked exactly.
    pub fn holds_for(&self, value: &BigUint) -> bool {
        let v = BigRational::from_integer(BigInt::from(value.clone()));
        let diff = (v - &self.main_terms).abs();
        let scale = BigRational::from_integer(BigInt::one() << (self.n - 2) as u64);
        diff <= &self.remainder_bound * scale
    }
}

pub fn truncated_expansion(k: u32, n: i64, order: u32) -> Result<ExpansionResult> {
    if !(1..=2).contains(&order) {
        return Err(Error::InvalidArgument(format!("truncation order must be 1 or 2, got {order}")));
    }
    if k < 2 || n < k as i64 + 2 {
        return Err(Error::InvalidArgument(format!("expansion needs n >= k+2, got k={k}, n={n}")));
    }
    // n < 2^k
    if k < 63 && n >= 1i64 << k {
        return Err(Error::InvalidArgument(format!("expansion tail bound needs n < 2^k, got k={k}, n={n}")));
    }
    let k1 = k as i64 + 1;
    let upper = cooper_howard_terms(k, n);
    let coefficients: Vec<BigInt> = (1..=order as i64)
        .map(|j| {
            if j <= upper {
                cooper_howard_coefficient(k, n, j)
            } else {
                BigInt::zero()
            }
        })
        .collect();
    let mut rel = BigRational::one();
    for (j, c) in coefficients.iter().enumerate() {
        let den = BigInt::one() << (k1 * (j as i64 + 1)) as u64;
        rel += BigRational::new(c.clone(), den);
    }
    let main_terms = rel * BigRational::from_integer(BigInt::one() << (n - 2) as u64);
    let nn = BigInt::from(n);
    let remainder_bound = match order {
        1 => BigRational::new(4 * &nn * &nn, BigInt::one() << (2 * k1) as u64),
        _ => BigRational::new(4 * &nn * &nn * &nn, BigInt::one() << (3 * k1) as u64),
    };
    Ok(ExpansionResult { k, n, order, coefficients, main_terms, remainder_bound })
}

/// `Some(a)` iff `value == 2^a`.
pub fn is_power_of_two(value: &BigInt) -> Option<u64> {
    if !value.is_positive() {
        return None;
    }
    power_of_two_exponent(value.magnitude())
}

pub fn power_of_two_exponent(value: &BigUint) -> Option<u64> {
    let tz = value.trailing_zeros()?;
    (value.bits() == tz + 1).then_some(tz)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table_values(k: u32, upto: i64) -> Vec<u64> {
        let t = KFibTable::generate(k, upto).unwrap();
        (1..=upto).map(|n| t.term(n).unwrap().try_into().unwrap()).collect()
    }

    #[test]
    fn tribonacci_prefix() {
        assert_eq!(table_values(3, 8), vec![1, 1, 2, 4, 7, 13, 24, 44]);
        assert_eq!(table_values(4, 5), vec![1, 1, 2, 4, 8]);
        let t = KFibTable::generate(5, 7).unwrap();
        assert_eq!(t.term(7).unwrap(), &BigUint::from(31u32));
    }

    #[test]
    fn initial_segment_is_zero_then_one() {
        let t = KFibTable::generate(6, 3).unwrap();
        assert_eq!(t.first_index(), -4);
        for n in -4..=0 {
            assert!(t.term(n).unwrap().is_zero());
        }
        assert_eq!(t.term(1).unwrap(), &BigUint::one());
        assert!(t.term(-5).is_err());
        assert!(t.term(4).is_err());
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(KFibTable::generate(1, 10).is_err());
        assert!(KFibTable::generate(4, -3).is_err());
        assert!(KFibTable::generate(4, -2).is_ok());
    }

    #[test]
    fn powers_of_two_prefix_and_next_term() {
        for k in 2..=12u32 {
            let t = KFibTable::generate(k, k as i64 + 2).unwrap();
            assert_eq!(t.term(k as i64 + 1).unwrap(), &(BigUint::one() << (k - 1)));
            assert_eq!(t.term(k as i64 + 2).unwrap(), &((BigUint::one() << k) - 1u32));
        }
    }

    #[test]
    fn three_term_recursion_examples() {
        let t3 = KFibTable::generate(3, 10).unwrap();
        assert_eq!(t3.term_three_recursion(6).unwrap(), BigInt::from(13));
        let t2 = KFibTable::generate(2, 5).unwrap();
        assert_eq!(t2.term_three_recursion(3).unwrap(), BigInt::from(2));
        let t4 = KFibTable::generate(4, 7).unwrap();
        assert_eq!(t4.term_three_recursion(7).unwrap(), BigInt::from(29));
        assert!(t3.term_three_recursion(2).is_err());
        assert!(t3.term_three_recursion(11).is_err());
    }

    #[test]
    fn window_and_three_term_generators_agree() {
        for k in 2..=15u32 {
            let t = KFibTable::generate(k, 250).unwrap();
            let w = generate_by_window(k, 250);
            assert_eq!(t.positive_terms(), &w[..], "k={k}");
        }
    }

    #[test]
    fn segment_closed_form_examples() {
        assert_eq!(segment_closed_form(3, 5).unwrap(), BigUint::from(7u32));
        assert_eq!(segment_closed_form(4, 6).unwrap(), BigUint::from(15u32));
        assert_eq!(segment_closed_form(6, 8).unwrap(), BigUint::from(63u32));
        assert!(segment_closed_form(3, 4).is_err());
        assert!(segment_closed_form(3, 9).is_err());
    }

    #[test]
    fn cooper_howard_examples() {
        assert_eq!(cooper_howard(3, 5).unwrap(), BigUint::from(7u32));
        // brute-force recurrence: 1,1,2,4,7,13,24,44,81,149,274,504,927,1705
        assert_eq!(cooper_howard(3, 12).unwrap(), BigUint::from(504u32));
        assert_eq!(cooper_howard(3, 14).unwrap(), BigUint::from(1705u32));
        assert_eq!(cooper_howard(2, 10).unwrap(), BigUint::from(55u32));
        assert_eq!(cooper_howard_coefficient(3, 5, 1), BigInt::from(-2));
        assert!(cooper_howard(3, 4).is_err());
    }

    #[test]
    fn binomial_convention() {
        assert_eq!(binom(5, 2), BigUint::from(10u32));
        assert!(binom(2, 5).is_zero());
        assert!(binom(-1, 0).is_zero());
        assert!(binom(3, -1).is_zero());
        assert_eq!(binom(0, 0), BigUint::one());
    }

    #[test]
    fn expansion_examples() {
        let e = truncated_expansion(10, 20, 1).unwrap();
        assert_eq!(e.coefficients, vec![BigInt::from(-10)]);
        let expected_main = BigRational::from_integer(BigInt::one() << 18u32)
            * (BigRational::one() - BigRational::new(10.into(), 2048.into()));
        assert_eq!(e.main_terms, expected_main);
        let t = KFibTable::generate(10, 20).unwrap();
        assert!(e.holds_for(t.term(20).unwrap()));

        let e2 = truncated_expansion(12, 30, 2).unwrap();
        // C_{n,2} 2^(-2(k+1)) = ((n-2k-1)(n-2k) - 2) / 2^(2k+3)
        assert_eq!(e2.coefficients[1], BigInt::from(14));
        assert_eq!(
            BigRational::new(e2.coefficients[1].clone(), BigInt::one() << 26u32),
            BigRational::new(BigInt::from(28), BigInt::one() << 27u32)
        );
        let t = KFibTable::generate(12, 30).unwrap();
        assert!(e2.holds_for(t.term(30).unwrap()));

        let e3 = truncated_expansion(8, 10, 1).unwrap();
        let seg = segment_closed_form(8, 10).unwrap();
        assert_eq!(e3.main_terms, BigRational::from_integer(BigInt::from(seg)));

        assert!(truncated_expansion(8, 10, 3).is_err());
        assert!(truncated_expansion(4, 16, 1).is_err());
    }

    #[test]
    fn power_of_two_detection() {
        assert_eq!(is_power_of_two(&BigInt::from(64)), Some(6));
        assert_eq!(is_power_of_two(&BigInt::from(63)), None);
        assert_eq!(is_power_of_two(&BigInt::from(1)), Some(0));
        assert_eq!(is_power_of_two(&BigInt::from(0)), None);
        assert_eq!(is_power_of_two(&BigInt::from(-8)), None);
        assert_eq!(is_power_of_two(&(BigInt::one() << 1378u32)), Some(1378));
        assert_eq!(is_power_of_two(&((BigInt::one() << 1378u32) + 1)), None);
    }
}
