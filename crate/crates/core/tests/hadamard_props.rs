mod common;

use proptest::prelude::*;

use moran_spectra::hadamard::{
    canonical_l, is_admissible, is_compatible_pair, parseval_check, unitarity_residual,
};
use moran_spectra::measure::StagePair;

fn digit_set_case() -> impl Strategy<Value = (StagePair, Vec<i64>)> {
    common::stage(12, 4, 6).prop_flat_map(|s| {
        let window = s.b().abs() * s.p() as i64;
        let others = prop::collection::btree_set(1..window, s.p() as usize - 1);
        (
            Just(s),
            others.prop_map(|set| std::iter::once(0).chain(set).collect()),
        )
    })
}

proptest! {
    #![proptest_config(common::fixed(512))]

    #[test]
    fn exact_numeric_and_parseval_agree((s, l) in digit_set_case(), xs in prop::collection::vec(-1.0f64..1.0, 16)) {
        let digits = s.digits();
        let exact = is_compatible_pair(s.b(), &digits, &l).unwrap();
        let residual = unitarity_residual(s.b(), &digits, &l).unwrap();
        let parseval_dev = xs
            .iter()
            .map(|&x| (parseval_check(s.b(), &digits, &l, x) - 1.0).abs())
            .fold(0.0, f64::max);
        prop_assert_eq!(exact, residual < 1e-9, "residual {}", residual);
        prop_assert_eq!(exact, parseval_dev < 1e-9, "parseval {}", parseval_dev);
    }

    #[test]
    fn compatibility_is_translation_invariant((s, l) in digit_set_case(), shift in -50i64..50) {
        let digits = s.digits();
        let moved: Vec<i64> = l.iter().map(|x| x + shift).collect();
        prop_assert_eq!(
            is_compatible_pair(s.b(), &digits, &l).unwrap(),
            is_compatible_pair(s.b(), &digits, &moved).unwrap()
        );
    }

    #[test]
    fn canonical_l_is_compatible(s in common::stage(24, 6, 9), xs in prop::collection::vec(-1.0f64..1.0, 16)) {
        match canonical_l(s.b(), s.p(), s.t()) {
            Ok(l) => {
                prop_assert!(is_admissible(s.b(), s.p(), s.t()));
                prop_assert_eq!(l.len() as u64, s.p());
                prop_assert!(is_compatible_pair(s.b(), &s.digits(), &l).unwrap());
                prop_assert!(unitarity_residual(s.b(), &s.digits(), &l).unwrap() < 1e-9);
                for &x in &xs {
                    prop_assert!((parseval_check(s.b(), &s.digits(), &l, x) - 1.0).abs() < 1e-9);
                }
            }
            Err(_) => prop_assert!(!is_admissible(s.b(), s.p(), s.t())),
        }
    }
}
