//! Shared configuration for property tests.

use proptest::test_runner::{Config, RngSeed};

const DEFAULT_SEED: u64 = 0x5eed_2026;

/// `cases` runs with a fixed seed; `PROPTEST_RNG_SEED` overrides it.
pub fn proptest_config(cases: u32) -> Config {
    let mut config = Config::with_cases(cases);
    if std::env::var_os("PROPTEST_RNG_SEED").is_none() {
        config.rng_seed = RngSeed::Fixed(DEFAULT_SEED);
    }
    config
}
