use kfib_verify::interval::{ln2, Interval};
use num_bigint::BigInt;
use proptest::prelude::*;

const P: u32 = 200;

fn meets(a: &Interval, b: &Interval) -> bool {
    !a.certainly_lt(b) && !b.certainly_lt(a)
}

fn ratio(n: i64, d: i64) -> Interval {
    Interval::from_ratio(&BigInt::from(n), &BigInt::from(d), P)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn field_ops_enclose_exact_results(a in -10_000i64..10_000, b in 1i64..10_000, c in -10_000i64..10_000, d in 1i64..10_000) {
        let x = ratio(a, b);
        let y = ratio(c, d);
        prop_assert!(meets(&(&x + &y), &ratio(a * d + c * b, b * d)));
        prop_assert!(meets(&(&x - &y), &ratio(a * d - c * b, b * d)));
        prop_assert!(meets(&(&x * &y), &ratio(a * c, b * d)));
        if c != 0 {
            let (num, den) = if c < 0 { (-a * d, -b * c) } else { (a * d, b * c) };
            prop_assert!(meets(&x.div(&y), &ratio(num, den)));
        }
    }

    #[test]
    fn enclosures_are_tight(a in 1i64..1_000_000, b in 1i64..1_000_000) {
        let x = ratio(a, b);
        prop_assert!(x.contains(&x.midpoint()));
        prop_assert!(x.width_raw() <= BigInt::from(1));
        // ln widens by width / lo
        let l = x.ln();
        prop_assert!(l.width_raw() <= BigInt::from(64 + 2 * (b / a + 1)));
    }

    #[test]
    fn ln_is_additive(a in 1i64..1_000_000, b in 1i64..1_000_000) {
        let x = Interval::from_int(a, P);
        let y = Interval::from_int(b, P);
        prop_assert!(meets(&(&x * &y).ln(), &(&x.ln() + &y.ln())));
        let f = ((a as f64).ln() - x.ln().mid_f64()).abs();
        prop_assert!(f < 1e-12 * (a as f64).ln().abs().max(1.0));
    }

    #[test]
    fn ln1p_agrees_with_ln(e in 10u32..150, m in 1i64..1000) {
        let t = Interval::from_int(m, P).mul_pow2(-(e as i64));
        let direct = (&Interval::one(P) + &t).ln();
        prop_assert!(meets(&t.ln1p(), &direct));
    }

    #[test]
    fn sqrt_squares_back(a in 0i64..1_000_000_000) {
        let x = Interval::from_int(a, P);
        prop_assert!(meets(&x.sqrt().sqr(), &x));
    }
}

#[test]
fn ln2_matches_ln_of_two() {
    let two = Interval::from_int(2, P);
    assert!(meets(&two.ln(), &ln2(P)));
    assert!((ln2(64).mid_f64() - std::f64::consts::LN_2).abs() < 1e-15);
}
