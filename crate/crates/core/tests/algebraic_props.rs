use kfib_verify::algebraic::{
    alpha_decimal, alpha_from_decimal, alpha_in_bracket, binet_full, certify_binet_error, conjugate_roots,
    dominant_root, f_k_eval, lemma4_decompose, CharPoly,
};
use kfib_verify::interval::Interval;
use kfib_verify::kfib::KFibTable;
use num_bigint::BigInt;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn dominant_root_is_certified(k in 2u32..80, digits in 64u32..200) {
        let ctx = dominant_root(k, digits).unwrap();
        prop_assert!(alpha_in_bracket(k, &ctx.alpha));
        let psi = CharPoly::new(k).unwrap().eval(&ctx.alpha);
        prop_assert!(psi.contains_zero());
        let width = ctx.alpha.width().mid_f64();
        prop_assert!(width < 10f64.powi(-(digits as i32)));
        // f_k is decreasing on the bracket
        let f = f_k_eval(k, &ctx.alpha).unwrap();
        let two = f_k_eval(k, &Interval::from_int(2, ctx.bits())).unwrap();
        prop_assert!(two.certainly_lt(&f));
    }

    #[test]
    fn stored_digits_recertify(k in 2u32..40) {
        let ctx = dominant_root(k, 80).unwrap();
        let back = alpha_from_decimal(k, 80, &alpha_decimal(&ctx)).unwrap();
        prop_assert!(!back.alpha.certainly_lt(&ctx.alpha) && !ctx.alpha.certainly_lt(&back.alpha));
    }

    #[test]
    fn binet_error_below_half(k in 2u32..11, n in 0i64..200) {
        let ctx = dominant_root(k, 120).unwrap();
        let n = n.max(2 - k as i64);
        let t = KFibTable::generate(k, n.max(1)).unwrap();
        let exact = BigInt::from(t.term(n).unwrap().clone());
        certify_binet_error(&ctx, n, &exact).unwrap();
    }

    #[test]
    fn lemma4_bounds(k in 3u32..60, r in 2i64..4000) {
        let top = if k < 22 { ((1i64 << k) - 1).isqrt() + 1 } else { 2000 };
        let r = 2 + (r - 2) % (top - 1).max(1);
        prop_assume!((r - 1) * (r - 1) < (1i64 << k.min(62)));
        let ctx = dominant_root(k, 100).unwrap();
        lemma4_decompose(&ctx, r).unwrap().certify().unwrap();
    }
}

#[test]
fn conjugates_reproduce_the_sequence() {
    for k in [2u32, 3, 5, 8] {
        let ctx = conjugate_roots(k, 100).unwrap();
        ctx.check_invariants().unwrap();
        let t = KFibTable::generate(k, 60).unwrap();
        for n in 2..=60 {
            let v = binet_full(&ctx, n).unwrap();
            assert_eq!(v.unique_integer(), Some(BigInt::from(t.term(n).unwrap().clone())), "k={k} n={n}");
        }
    }
}
