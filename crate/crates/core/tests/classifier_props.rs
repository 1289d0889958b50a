mod common;

use proptest::prelude::*;

use moran_spectra::classifier::{
    decide_spectrality, two_stage_decide, validate_config, z_membership_probe, z_set_criteria,
    ProbeResult, ZSetStatus,
};
use moran_spectra::exactmath::rat;
use moran_spectra::measure::{normalize_signs, SymbolicWord, SystemConfig};

fn valid_config(min_letters: usize) -> impl Strategy<Value = SystemConfig> {
    let steps = prop::sample::subsequence(vec![2i64, 3, 5, 7], 0..=3);
    (steps, min_letters..=3usize)
        .prop_flat_map(|(mut ts, m)| {
            ts.resize(m.max(ts.len()), 1);
            ts.truncate(m);
            let n = ts.len();
            (
                Just(ts).prop_shuffle(),
                prop::collection::vec((common::signed(2..=12), 2u64..=6, any::<bool>()), n),
            )
        })
        .prop_filter_map("digit counts share a factor with a step", |(ts, rest)| {
            let triples: Vec<(i64, u64, i64)> = ts
                .iter()
                .zip(rest)
                .map(|(&t, (b, p, neg))| (b, p, if neg { -t } else { t }))
                .collect();
            let c = SystemConfig::from_triples(&triples).ok()?;
            validate_config(&c).is_ok().then_some(c)
        })
}

fn valid_case() -> impl Strategy<Value = (SystemConfig, SymbolicWord)> {
    valid_config(1).prop_flat_map(|c| {
        let m = c.len();
        (Just(c), common::word_over(m))
    })
}

/// Words whose first letter never recurs.
fn isolated_lead_case() -> impl Strategy<Value = (SystemConfig, SymbolicWord)> {
    valid_config(2).prop_flat_map(|c| {
        let m = c.len();
        let rest = (
            prop::collection::vec(2..=m, 0..=2),
            prop::collection::vec(2..=m, 1..=3),
        );
        (
            Just(c),
            rest.prop_map(|(mut pre, per)| {
                pre.insert(0, 1);
                SymbolicWord::new(pre, per).unwrap()
            }),
        )
    })
}

proptest! {
    #![proptest_config(common::fixed(256))]

    #[test]
    fn verdict_ignores_signs((c, w) in valid_case()) {
        let norm = normalize_signs(&c, &w).unwrap();
        let a = decide_spectrality(&c, &w).unwrap();
        let b = decide_spectrality(&norm.config, &w).unwrap();
        prop_assert_eq!(a.kind(), b.kind());
    }

    #[test]
    fn verdict_ignores_a_non_recurring_first_base((c, w) in isolated_lead_case(), b in common::signed(2..=30)) {
        let lead = w.letter_at(1);
        prop_assert!(!w.letters_from_position(2).contains(&lead));
        let changed = c.with_pair(lead, c.pair(lead).unwrap().with_b(b).unwrap()).unwrap();
        prop_assert_eq!(decide_spectrality(&c, &w).unwrap(), decide_spectrality(&changed, &w).unwrap());
    }

    #[test]
    fn general_classifier_agrees_on_two_stages(p1 in 2u64..6, p2 in 2u64..6, b1 in 2i64..10, t1 in 1i64..8, t2 in 1i64..8) {
        let c = SystemConfig::from_triples(&[(b1, p1, t1), (p2 as i64, p2, t2)]).unwrap();
        prop_assume!(validate_config(&c).is_ok());
        let w = SymbolicWord::new(vec![1], vec![2]).unwrap();
        let general = decide_spectrality(&c, &w).unwrap();
        let direct = two_stage_decide(p1, p2, b1, t1, t2).unwrap();
        prop_assert_eq!(general.is_spectral(), direct.spectral);
    }
}

proptest! {
    #![proptest_config(common::fixed(48))]

    #[test]
    fn empty_zero_sets_have_witnesses((c, w) in valid_case(), n in 1i64..12, d in 2i64..12) {
        prop_assume!(n % d != 0);
        if let ZSetStatus::Empty(_) = z_set_criteria(&c, &w).unwrap() {
            let probe = z_membership_probe(&c, &w, &rat(n, d), 200).unwrap();
            prop_assert!(matches!(probe, ProbeResult::Witness(_)), "{:?}", probe);
        }
    }

    #[test]
    fn nonempty_zero_sets_contain_the_step_reciprocal((c, w) in valid_case()) {
        if let ZSetStatus::Nonempty { j } = z_set_criteria(&c, &w).unwrap() {
            let t = c.pair(j).unwrap().t();
            let probe = z_membership_probe(&c, &w, &rat(1, t), 50).unwrap();
            prop_assert_eq!(probe, ProbeResult::NoWitness { window: 50 });
        }
    }
}
