#![allow(dead_code)]

use moran_spectra::measure::{StagePair, SymbolicWord, SystemConfig};
use proptest::prelude::*;
use proptest::test_runner::{Config, RngSeed};

pub fn fixed(cases: u32) -> Config {
    Config {
        cases,
        rng_seed: RngSeed::Fixed(0x006d_6f72_616e),
        failure_persistence: None,
        ..Config::default()
    }
}

pub fn signed(range: std::ops::RangeInclusive<i64>) -> impl Strategy<Value = i64> {
    (range, any::<bool>()).prop_map(|(v, neg)| if neg { -v } else { v })
}

pub fn stage(max_b: i64, max_p: u64, max_t: i64) -> impl Strategy<Value = StagePair> {
    (signed(2..=max_b), 2..=max_p, signed(1..=max_t))
        .prop_map(|(b, p, t)| StagePair::new(b, p, t).unwrap())
}

pub fn config(max_letters: usize) -> impl Strategy<Value = SystemConfig> {
    prop::collection::vec(stage(8, 4, 5), 1..=max_letters)
        .prop_map(|v| SystemConfig::new(v).unwrap())
}

pub fn word_over(m: usize) -> impl Strategy<Value = SymbolicWord> {
    (
        prop::collection::vec(1..=m, 0..=2),
        prop::collection::vec(1..=m, 1..=3),
    )
        .prop_map(|(pre, per)| SymbolicWord::new(pre, per).unwrap())
}

pub fn config_and_word(max_letters: usize) -> impl Strategy<Value = (SystemConfig, SymbolicWord)> {
    config(max_letters).prop_flat_map(|c| {
        let m = c.len();
        (Just(c), word_over(m))
    })
}
