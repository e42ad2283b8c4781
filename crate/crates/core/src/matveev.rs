//! Matveev's lower bound for linear forms in logarithms and the two-stage
//! chain that bounds `n` polynomially in `k`.
//!
//! Every constant is recomputed from its ingredients with interval
//! arithmetic and compared, after upward rounding, with the displayed
//! constants (`1.5e11`, `8.75e11`, `5.12e23`, `6.654e27`, `6.66e27`).

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::interval::Interval;

const BITS: u32 = 256;

fn int(v: i64) -> Interval {
    Interval::from_int(v, BITS)
}

/// `mant * 10^exp` as an enclosure.
fn sci(mant: i64, exp: u32) -> Interval {
    Interval::from_int(BigInt::from(mant) * BigInt::from(10u32).pow(exp), BITS)
}

fn ratio(n: i64, d: i64) -> Interval {
    Interval::from_ratio(&BigInt::from(n), &BigInt::from(d), BITS)
}

fn ln_k(k: u32) -> Interval {
    int(k as i64).ln()
}

/// The data of one application of Matveev's theorem.
#[derive(Clone, Debug)]
pub struct LinearFormInstance {
    pub t: u32,
    pub d: u32,
    pub b: BigInt,
    pub a: Vec<Interval>,
    pub label: String,
}

impl LinearFormInstance {
    pub fn validate(&self) -> Result<()> {
        if self.t < 1 || self.d < 1 || self.b < BigInt::one() {
            return Err(Error::InvalidArgument("t, D and B must be at least 1".into()));
        }
        if self.a.len() != self.t as usize {
            return Err(Error::InvalidArgument(format!(
                "expected {} values A_i, got {}",
                self.t,
                self.a.len()
            )));
        }
        let floor = ratio(16, 100);
        if self.a.iter().any(|a| a.certainly_lt(&floor)) {
            return Err(Error::InvalidArgument("every A_i must be at least 0.16".into()));
        }
        Ok(())
    }
}

/// `1.4 * 30^(t+3) * t^4.5` .
pub fn matveev_constant(t: u32) -> Interval {
    let t_i = int(t as i64);
    &(&ratio(14, 10) * &int(30).powi(t as u64 + 3)) * &(&t_i.powi(4) * &t_i.sqrt())
}

/// `E = 1.4*30^(t+3)*t^4.5*D^2(1+log D)(1+log B) A_1...A_t`, so that
/// `|Lambda| > exp(-E)`.
pub fn matveev_exponent(inst: &LinearFormInstance) -> Result<Interval> {
    inst.validate()?;
    let one = Interval::one(BITS);
    let d = int(inst.d as i64);
    let b = Interval::from_int(inst.b.clone(), BITS);
    let mut e = &(&matveev_constant(inst.t) * &d.sqr()) * &(&one + &d.ln());
    e = &e * &(&one + &b.ln());
    for a in &inst.a {
        e = &e * a;
    }
    Ok(e)
}

/// `C_1(k) = C_2(k) = 1.4 * 30^6 * 3^4.5 * k^2 (1 + log k)`.
pub fn c_constant(k: u32) -> Interval {
    let kk = int(k as i64);
    &(&matveev_constant(3) * &kk.sqr()) * &(&Interval::one(BITS) + &ln_k(k))
}

/// The values `A_1 = k log 2`, `A_2 = 0.7`, `A_3 = 3k log k` of the first application.
pub fn first_application_a(k: u32) -> [Interval; 3] {
    let kk = int(k as i64);
    [
        &kk * &int(2).ln(),
        ratio(7, 10),
        (&kk * &ln_k(k)).mul_int(&BigInt::from(3)),
    ]
}

/// Coefficient `c` with `(n-m) log alpha < c k^4 log^2 k log(n-1)` from the
/// first application, evaluated at the worst case `n - 1 = k + 1`.
pub fn stage1_coefficient(k: u32) -> Result<Interval> {
    if k < 3 {
        return Err(Error::InvalidArgument(format!("k must be at least 3, got {k}")));
    }
    let one = Interval::one(BITS);
    let lk = ln_k(k);
    let l = int(k as i64 + 1).ln();
    let [a1, a2, a3] = first_application_a(k);
    let matveev = &(&(&c_constant(k) * &(&one + &l)) * &a1) * &(&a2 * &a3);
    let num = &int(3).ln() + &matveev;
    let den = &(&int(k as i64).powi(4) * &lk.sqr()) * &l;
    Ok(num.div(&den))
}

/// Checks the first application against `8.75e11 k^4 log^2 k`.
pub fn stage1_bound(k: u32) -> Result<Interval> {
    let c = stage1_coefficient(k)?;
    check_le(&c, &sci(875, 9), &format!("stage-1 coefficient at k = {k}"))?;
    Ok(c)
}

/// Coefficient `c` with `n - 1 < c k^7 log^3 k log^2(n-1)` from the second
/// application, feeding in the stage-1 coefficient and `1/log alpha < 2`.
pub fn stage2_coefficient(k: u32, stage1: &Interval) -> Result<Interval> {
    if k < 3 {
        return Err(Error::InvalidArgument(format!("k must be at least 3, got {k}")));
    }
    let one = Interval::one(BITS);
    let kk = int(k as i64);
    let lk = ln_k(k);
    let l = int(k as i64 + 1).ln();
    let ln2 = int(2).ln();
    let rho = (&one + &lk).div(&lk);
    let sigma = (&one + &l).div(&l);
    let k3 = kk.powi(3);
    let first = ln2.mul_int(&BigInt::from(2)).div(&(&(&kk.powi(7) * &lk.powi(3)) * &l.sqr()));
    let tail = &int(4).div(&(&(&k3 * &lk) * &l)) + stage1;
    let second = &(&(&(&matveev_constant(3).mul_int(&BigInt::from(2)) * &ratio(7, 10)) * &ln2) * &(&rho * &sigma)) * &tail;
    Ok(&first + &second)
}

/// `4 A log^2 A` for `A >= 100`: every `x >= 3` with `x < A log^2 x` satisfies
/// `x < 4 A log^2 A`.
pub fn solve_log_square(a: &Interval) -> Result<Interval> {
    if !int(100).certainly_le(a) {
        return Err(Error::InvalidArgument("solve_log_square needs A >= 100".into()));
    }
    Ok(a.mul_int(&BigInt::from(4)) * a.ln().sqr())
}

/// `6.66e27 k^7 log^5 k`.
pub fn lemma3_value(k: u32) -> Interval {
    &(&sci(666, 25) * &int(k as i64).powi(7)) * &ln_k(k).powi(5)
}

/// `M_k = floor(6.66e27 k^7 log^5 k)`.
pub fn m_k(k: u32) -> Result<BigInt> {
    if k < 3 {
        return Err(Error::InvalidArgument(format!("k must be at least 3, got {k}")));
    }
    let v = lemma3_value(k);
    v.floor_certified()
        .ok_or_else(|| Error::Precision(format!("floor of M_{k} not decided")))
}

/// Everything the bound pipeline produces for one `k`.
#[derive(Clone, Debug)]
pub struct BoundReport {
    pub k: u32,
    pub m_k: BigInt,
    /// `C_1(k) = C_2(k)`.
    pub c_k: Interval,
    /// Coefficient of `k^4 log^2 k log(n-1)` bounding `(n-m) log alpha`.
    pub stage1: Interval,
    /// Coefficient of `k^7 log^3 k log^2(n-1)` bounding `n-1`.
    pub stage2: Interval,
    /// `4 A log^2 A + 1` with `A = stage2 * k^7 log^3 k`: a strict bound on `n`.
    pub n_bound: Interval,
    /// `4 A' log^2 A' / (k^7 log^5 k)` with `A' = 5.12e23 k^7 log^3 k`.
    pub displayed_chain: Interval,
}

impl BoundReport {
    /// The pipeline assumes `a <= n - 2` throughout.
    pub const ASSUMES_A_LE_N_MINUS_2: bool = true;
}

fn check_le(x: &Interval, bound: &Interval, what: &str) -> Result<()> {
    if x.certainly_le(bound) {
        Ok(())
    } else if bound.certainly_lt(x) {
        Err(Error::Certification(format!("{what} exceeds its displayed bound")))
    } else {
        Err(Error::Precision(format!("{what} not separated from its bound")))
    }
}

/// Runs and checks the full chain for one `k >= 3`.
pub fn stage2_bound(k: u32) -> Result<BoundReport> {
    let c_k = c_constant(k);
    let lk = ln_k(k);
    let kk = int(k as i64);
    let c_bound = &(&sci(15, 10) * &kk.sqr()) * &(&Interval::one(BITS) + &lk);
    check_le(&c_k, &c_bound, &format!("C_1({k})"))?;
    let stage1 = stage1_bound(k)?;
    let stage2 = stage2_coefficient(k, &stage1)?;
    check_le(&stage2, &sci(512, 21), &format!("stage-2 coefficient at k = {k}"))?;
    let scale = &kk.powi(7) * &lk.powi(3);
    let a = &stage2 * &scale;
    let n_bound = &solve_log_square(&a)? + &Interval::one(BITS);
    let m = m_k(k)?;
    check_le(&n_bound, &Interval::from_int(m.clone(), BITS), &format!("n bound at k = {k}"))?;
    let a_disp = &sci(512, 21) * &scale;
    let displayed_chain = solve_log_square(&a_disp)?.div(&(&kk.powi(7) * &lk.powi(5)));
    check_le(&displayed_chain, &sci(6654, 24), &format!("displayed chain at k = {k}"))?;
    Ok(BoundReport {
        k,
        m_k: m,
        c_k,
        stage1,
        stage2,
        n_bound,
        displayed_chain,
    })
}

/// `M_k < 2^(k/d)`, decided exactly as `M_k^d < 2^k`.
pub fn m_k_below_root_of_two_power(k: u32, d: u32) -> Result<bool> {
    let m = m_k(k)?;
    Ok(m.pow(d) < BigInt::one() << k as u64)
}

/// `M_k < 2^(k/d)` at `k0` together with the decay of
/// `log M_k - (k/d) log 2` from `k0` on (its derivative in `k` is
/// `7/k + 5/(k log k) - (log 2)/d`), which extends the inequality to all `k >= k0`.
pub fn threshold_from(k0: u32, d: u32) -> Result<bool> {
    if !m_k_below_root_of_two_power(k0, d)? {
        return Ok(false);
    }
    let kk = int(k0 as i64);
    let deriv = &int(7).div(&kk) + &int(5).div(&(&kk * &ln_k(k0)));
    let slope = int(2).ln().div_int(&BigInt::from(d));
    Ok(deriv.certainly_lt(&slope))
}

/// `a <= n - 2`, the structural fact every solution with `n > m >= 2` obeys.
pub fn a_le_n_minus_2(n: i64, a: i64) -> bool {
    a <= n - 2
}

/// Smallest integer `u` with `u > x` for a positive enclosure, i.e. the
/// integer bound implied by a strict real bound.
pub fn strict_integer_bound(x: &Interval) -> BigInt {
    let c = x.ceil_hi();
    if c.is_zero() {
        c
    } else {
        c - 1u32
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degenerate_exponent() {
        let inst = LinearFormInstance {
            t: 1,
            d: 1,
            b: BigInt::one(),
            a: vec![ratio(16, 100)],
            label: "smallest".into(),
        };
        let e = matveev_exponent(&inst).unwrap();
        let expect = 1.4 * 30f64.powi(4) * 0.16;
        assert!((e.mid_f64() - expect).abs() < 1e-6);
    }

    #[test]
    fn frozen_exponent_anchor() {
        let inst = LinearFormInstance {
            t: 3,
            d: 3,
            b: BigInt::from(100),
            a: vec![&int(3) * &int(2).ln(), ratio(7, 10), &int(9) * &int(3).ln()],
            label: "anchor".into(),
        };
        let e = matveev_exponent(&inst).unwrap().mid_f64();
        // 1.4*30^6*3^4.5 * 9 * (1+log 3) * (1+log 100) * 3log2 * 0.7 * 9log3
        let direct = 1.4 * 30f64.powi(6) * 3f64.powf(4.5) * 9.0 * (1.0 + 3f64.ln()) * (1.0 + 100f64.ln())
            * 3.0 * 2f64.ln() * 0.7 * 9.0 * 3f64.ln();
        assert!((e / direct - 1.0).abs() < 1e-12);
        assert!((e / 2.181_707_137_199_243e14 - 1.0).abs() < 1e-12, "{e}");
    }

    #[test]
    fn invalid_instances_rejected() {
        let mut inst = LinearFormInstance {
            t: 2,
            d: 1,
            b: BigInt::one(),
            a: vec![ratio(1, 10), int(1)],
            label: String::new(),
        };
        assert!(matveev_exponent(&inst).is_err());
        inst.a = vec![int(1)];
        assert!(matveev_exponent(&inst).is_err());
        inst.a = vec![int(1), int(1)];
        inst.b = BigInt::zero();
        assert!(matveev_exponent(&inst).is_err());
    }

    #[test]
    fn c_constant_matches_display() {
        let k0 = matveev_constant(3);
        assert!((k0.mid_f64() / 1.431_862_153_905_885e11 - 1.0).abs() < 1e-6);
        assert!(k0.certainly_lt(&sci(15, 10)));
    }

    #[test]
    fn stage_coefficients_at_k3() {
        let c1 = stage1_bound(3).unwrap();
        assert!((c1.mid_f64() / 6.85e11 - 1.0).abs() < 0.01, "{}", c1.mid_f64());
        let c2 = stage2_coefficient(3, &c1).unwrap();
        assert!((c2.mid_f64() / 3.13e23 - 1.0).abs() < 0.01, "{}", c2.mid_f64());
        let r = stage2_bound(3).unwrap();
        assert!((r.displayed_chain.mid_f64() / 6.642e27 - 1.0).abs() < 0.001);
    }

    #[test]
    fn m_k_values() {
        let m3 = m_k(3).unwrap();
        let approx = 6.66e27 * 2187.0 * 3f64.ln().powi(5);
        assert!((m3.to_string().parse::<f64>().unwrap() / approx - 1.0).abs() < 1e-12);
        assert!(m3.to_string().starts_with("23"));
        let m340 = m_k(340).unwrap();
        assert_eq!(m340.to_string().len(), 50);
        assert!(m_k(2).is_err());
    }

    #[test]
    fn chain_holds_at_edges() {
        for k in [3, 4, 340, 341, 690] {
            let r = stage2_bound(k).unwrap();
            assert!(r.n_bound.certainly_lt(&Interval::from_int(r.m_k.clone() + 1u32, BITS)));
        }
    }

    #[test]
    fn thresholds() {
        assert!(threshold_from(341, 2).unwrap());
        assert!(threshold_from(691, 4).unwrap());
        assert!(!m_k_below_root_of_two_power(100, 2).unwrap());
        assert!(!m_k_below_root_of_two_power(340, 4).unwrap());
    }

    #[test]
    fn log_square_helper() {
        let v = solve_log_square(&int(100)).unwrap().mid_f64();
        assert!((v - 8_483.036_976_765_437).abs() < 1e-9, "{v}");
        assert!(solve_log_square(&int(99)).is_err());
        let a = int(1000);
        let x = &a * &a.ln().sqr();
        assert!(x.certainly_lt(&solve_log_square(&a).unwrap()));
    }

    #[test]
    fn a_values_dominate_logs() {
        let ctx = crate::algebraic::dominant_root(3, 40).unwrap();
        let [a1, a2, _] = first_application_a(3);
        assert!(int(2).ln().certainly_le(&a1));
        assert!(ctx.log_alpha().certainly_lt(&a2));
        assert!(int(2).ln().certainly_lt(&a2));
    }

    #[test]
    fn predicate() {
        assert!(a_le_n_minus_2(10, 8));
        assert!(!a_le_n_minus_2(10, 9));
        assert_eq!(strict_integer_bound(&ratio(7, 2)), BigInt::from(3));
        assert_eq!(strict_integer_bound(&int(4)), BigInt::from(3));
    }
}
