use kfib_verify::kfib::{
    cooper_howard, generate_by_window, power_of_two_exponent, segment_closed_form, truncated_expansion, KFibTable,
};
use num_bigint::{BigInt, BigUint};
use num_traits::One;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn table_matches_window_and_recurrence(k in 2u32..30, n_max in 1i64..250) {
        let t = KFibTable::generate(k, n_max).unwrap();
        let w = generate_by_window(k, n_max as usize);
        prop_assert_eq!(t.positive_terms(), &w[..]);
        for n in 2..=n_max {
            let lo = (n - k as i64).max(2 - k as i64);
            let s: BigUint = (lo..n).map(|i| t.term(i).unwrap().clone()).sum();
            prop_assert_eq!(t.term(n).unwrap(), &s);
        }
        for n in 3..=n_max {
            prop_assert_eq!(t.term_three_recursion(n).unwrap(), BigInt::from(t.term(n).unwrap().clone()));
        }
    }

    #[test]
    fn powers_of_two_then_strictly_below(k in 2u32..40, extra in 0i64..200) {
        let n_max = k as i64 + 2 + extra;
        let t = KFibTable::generate(k, n_max).unwrap();
        for n in 2..=(k as i64 + 1) {
            prop_assert_eq!(power_of_two_exponent(t.term(n).unwrap()), Some((n - 2) as u64));
        }
        for n in (k as i64 + 2)..=n_max {
            prop_assert!(t.term(n).unwrap() < &(BigUint::one() << (n - 2) as u64));
        }
    }

    #[test]
    fn cooper_howard_agrees(k in 2u32..14, off in 0i64..290) {
        let n = k as i64 + 2 + off;
        let t = KFibTable::generate(k, n).unwrap();
        prop_assert_eq!(&cooper_howard(k, n).unwrap(), t.term(n).unwrap());
    }

    #[test]
    fn segment_formula(k in 2u32..60, off in 0i64..=1000) {
        let n = k as i64 + 2 + off % (k as i64 + 1);
        let t = KFibTable::generate(k, n).unwrap();
        prop_assert_eq!(&segment_closed_form(k, n).unwrap(), t.term(n).unwrap());
    }

    #[test]
    fn truncated_expansion_tail(k in 6u32..40, off in 0i64..1000, order in 1u32..=2) {
        let top = if k < 20 { (1i64 << k) - 1 } else { 2000 };
        let n = k as i64 + 2 + off % (top - k as i64 - 1).max(1);
        let t = KFibTable::generate(k, n).unwrap();
        let e = truncated_expansion(k, n, order).unwrap();
        prop_assert!(e.holds_for(t.term(n).unwrap()));
    }
}

#[test]
fn out_of_range_is_rejected() {
    assert!(KFibTable::generate(1, 10).is_err());
    let t = KFibTable::generate(3, 10).unwrap();
    assert!(t.term(11).is_err());
    assert!(t.term(-2).is_err());
    assert_eq!(t.term(-1).unwrap(), &BigUint::from(0u32));
    assert!(segment_closed_form(3, 4).is_err());
    assert!(cooper_howard(3, 4).is_err());
}
