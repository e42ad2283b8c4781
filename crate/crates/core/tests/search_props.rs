use kfib_verify::search::{
    classify, exhaustive_search, expected_solutions, family_c_enumerate, naive_search, search_k, verify_equation,
    AFilter, ARelation, Family, SolutionRecord,
};
use proptest::prelude::*;

fn triples(v: &[SolutionRecord]) -> Vec<(i64, i64, i64)> {
    let mut t: Vec<_> = v.iter().map(|r| (r.n, r.m, r.a)).collect();
    t.sort();
    t
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn fast_search_matches_naive_oracle(k in 3u32..25, n_bound in 1i64..140) {
        let fast = search_k(k, n_bound, AFilter::All).unwrap();
        let mut slow = naive_search(k, n_bound);
        slow.sort();
        prop_assert_eq!(triples(&fast), slow);
        prop_assert_eq!(&fast, &expected_solutions(k, n_bound, AFilter::All));
    }

    #[test]
    fn targeted_scan_matches_pairwise(k in 3u32..60, extra in 0i64..200) {
        let n_bound = 2 * k as i64 + 2 + extra;
        let all = search_k(k, n_bound, AFilter::All).unwrap();
        let eq = search_k(k, n_bound, AFilter::Equal).unwrap();
        let filtered: Vec<_> = all.into_iter().filter(|r| r.a_relation == ARelation::Equal).collect();
        prop_assert_eq!(eq, filtered);
    }

    #[test]
    fn family_c_shape(k in 3u32..2000) {
        for r in family_c_enumerate(k).unwrap() {
            prop_assert!(r.m <= k as i64 + 1 && r.n <= 2 * k as i64 + 1);
            prop_assert_eq!(r.a, r.n - 2);
            prop_assert!(matches!(r.family, Family::CParametric(_)));
        }
    }

    #[test]
    fn records_reverify_and_fold(k in 3u32..40) {
        for r in expected_solutions(k, 4 * k as i64, AFilter::All) {
            prop_assert!(r.reverify());
            prop_assert_eq!(verify_equation(k, r.n, r.m), Some(r.a));
            prop_assert_ne!(r.family, Family::Unexpected);
            let (_, n, m, a) = r.canonical();
            prop_assert_eq!(classify(k, n, m, a), r.family);
        }
    }
}

#[test]
fn bad_records_fail_reverification() {
    assert!(!SolutionRecord::new(5, 9, 3, 7).reverify());
    assert_eq!(SolutionRecord::new(5, 9, 3, 7).family, Family::Unexpected);
    assert_eq!(verify_equation(5, 9, 3), None);
}

#[test]
fn exhaustive_search_is_order_independent() {
    let ks: Vec<u32> = (3..=30).collect();
    let seen = std::sync::Mutex::new(Vec::new());
    let a = exhaustive_search(&ks, |k| 2 * k as i64 + 10, AFilter::All, |k, _| seen.lock().unwrap().push(k)).unwrap();
    let mut rev = ks.clone();
    rev.reverse();
    let b = exhaustive_search(&rev, |k| 2 * k as i64 + 10, AFilter::All, |_, _| {}).unwrap();
    assert_eq!(a, b);
    assert_eq!(seen.into_inner().unwrap().len(), ks.len());
    assert!(a.iter().all(|r| r.family != Family::Unexpected));
}
