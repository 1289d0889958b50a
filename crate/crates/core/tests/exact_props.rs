mod common;

use moran_spectra::exactmath::{format_rational, parse_rational, rat, root_sum_is_zero, RootSum};
use proptest::prelude::*;

proptest! {
    #![proptest_config(common::fixed(512))]

    #[test]
    fn root_sum_zero_matches_numeric(order in 1i64..=30, exps in prop::collection::vec(0i64..90, 1..=8)) {
        let s = RootSum::new(order, exps).unwrap();
        let magnitude = s.numeric().norm();
        prop_assert_eq!(root_sum_is_zero(&s), magnitude < 1e-9, "magnitude {}", magnitude);
    }

    #[test]
    fn root_sum_zero_is_rotation_invariant(order in 1i64..=24, exps in prop::collection::vec(0i64..48, 1..=8), shift in 0i64..48) {
        let a = RootSum::new(order, exps.clone()).unwrap();
        let b = RootSum::new(order, exps.iter().map(|e| e + shift)).unwrap();
        prop_assert_eq!(root_sum_is_zero(&a), root_sum_is_zero(&b));
    }

    #[test]
    fn full_cycles_vanish(order in 2i64..=40, copies in 1usize..=3) {
        let exps = (0..order).cycle().take(order as usize * copies);
        prop_assert!(root_sum_is_zero(&RootSum::new(order, exps).unwrap()));
    }

    #[test]
    fn rational_text_round_trip(n in -10_000i64..10_000, d in 1i64..10_000) {
        let x = rat(n, d);
        prop_assert_eq!(parse_rational(&format_rational(&x)).unwrap(), x);
    }
}
