//! Seeded Monte Carlo over `{+,-}^n` and z-score comparison against exact values.
//!
//! Trials are cut into fixed-size chunks; chunk `c` draws from the ChaCha8
//! stream `c` keyed by the seed. Counts therefore depend only on
//! `(n, trials, seed)`, never on how chunks are spread over threads.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::engine::probability;
use crate::error::{KnotError, Result};
use crate::oracle::Distribution;
use crate::rational::{classify_as, profile, KnotClass, SMALL_EVAL_MAX_LEN};
use crate::scalar::Integral;
use crate::word::{Sign, SignWord};

pub const CHUNK_TRIALS: u64 = 1 << 14;
pub const Z_THRESHOLD: f64 = 4.0;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmpiricalDistribution {
    pub n: usize,
    pub trials: u64,
    pub seed: u64,
    pub counts: BTreeMap<KnotClass, u64>,
}

/// Generator for chunk `chunk` of a run seeded with `seed`.
pub fn chunk_rng(seed: u64, chunk: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk);
    rng
}

/// One uniformly random word: each letter is one fresh random bit.
pub fn random_word(rng: &mut impl RngCore, n: usize) -> SignWord {
    let mut letters = Vec::with_capacity(n);
    while letters.len() < n {
        let bits = rng.next_u64();
        let take = (n - letters.len()).min(64);
        letters.extend((0..take).map(|i| if bits >> i & 1 == 1 { Sign::Minus } else { Sign::Plus }));
    }
    SignWord::new(letters)
}

fn tally<T: Integral + Send>(n: usize, trials: u64, seed: u64) -> Result<BTreeMap<KnotClass, u64>> {
    let chunks = trials.div_ceil(CHUNK_TRIALS);
    let merged = (0..chunks)
        .into_par_iter()
        .map(|c| -> Result<HashMap<KnotClass<T>, u64>> {
            let mut rng = chunk_rng(seed, c);
            let count = CHUNK_TRIALS.min(trials - c * CHUNK_TRIALS);
            let mut local = HashMap::new();
            for _ in 0..count {
                *local.entry(classify_as::<T>(&random_word(&mut rng, n))?).or_default() += 1;
            }
            Ok(local)
        })
        .try_reduce(HashMap::new, |mut a, b| {
            for (k, v) in b {
                *a.entry(k).or_default() += v;
            }
            Ok(a)
        })?;
    Ok(merged.into_iter().map(|(k, v)| (k.to_big(), v)).collect())
}

pub fn sample_distribution(n: usize, trials: u64, seed: u64) -> Result<EmpiricalDistribution> {
    if n % 3 == 2 {
        return Err(KnotError::LinkNotKnot(format!(
            "T(3, {}) with n = {n} ≡ 2 (mod 3)",
            n + 1
        )));
    }
    if trials == 0 {
        return Err(KnotError::InvalidArgument("trials must be at least 1".into()));
    }
    let counts = if n <= SMALL_EVAL_MAX_LEN {
        tally::<i64>(n, trials, seed)?
    } else {
        tally::<BigInt>(n, trials, seed)?
    };
    Ok(EmpiricalDistribution {
        n,
        trials,
        seed,
        counts,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ZScore {
    pub knot: KnotClass,
    pub count: u64,
    pub p: f64,
    pub phat: f64,
    /// Infinite when the class has probability 0 (or 1) but the sample disagrees.
    pub z: f64,
    pub flagged: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub rows: Vec<ZScore>,
}

impl Comparison {
    pub fn flagged(&self) -> impl Iterator<Item = &ZScore> {
        self.rows.iter().filter(|r| r.flagged)
    }

    pub fn passed(&self) -> bool {
        self.flagged().next().is_none()
    }

    pub fn max_abs_z(&self) -> f64 {
        self.rows.iter().map(|r| r.z.abs()).fold(0.0, f64::max)
    }
}

/// `z = (p̂ - p) / sqrt(p (1 - p) / T)` for every class that is either
/// observed or has `p > 0` in `exact`; `|z| > 4` is flagged.
pub fn compare(e: &EmpiricalDistribution, exact: &BTreeMap<KnotClass, f64>) -> Comparison {
    let t = e.trials as f64;
    let mut keys: Vec<&KnotClass> = exact.iter().filter(|(_, &p)| p > 0.0).map(|(k, _)| k).collect();
    keys.extend(e.counts.keys());
    keys.sort();
    keys.dedup();
    let rows = keys
        .into_iter()
        .map(|k| {
            let count = e.counts.get(k).copied().unwrap_or(0);
            let p = exact.get(k).copied().unwrap_or(0.0);
            let phat = count as f64 / t;
            let sd = (p * (1.0 - p) / t).sqrt();
            let z = if sd > 0.0 {
                (phat - p) / sd
            } else if phat == p {
                0.0
            } else {
                f64::INFINITY.copysign(phat - p)
            };
            ZScore {
                knot: k.clone(),
                count,
                p,
                phat,
                z,
                flagged: z.abs() > Z_THRESHOLD,
            }
        })
        .collect();
    Comparison { rows }
}

/// Exact probabilities of every observed class (plus `extra`), from the engine
/// for `n >= 6` and by enumeration below.
pub fn exact_for(e: &EmpiricalDistribution, extra: &[KnotClass]) -> Result<BTreeMap<KnotClass, f64>> {
    e.counts
        .keys()
        .chain(extra)
        .map(|k| Ok((k.clone(), probability(&profile(k)?, e.n)?.value)))
        .collect()
}

/// Exact probabilities of every class in an enumerated distribution.
pub fn exact_from_distribution(d: &Distribution) -> BTreeMap<KnotClass, f64> {
    d.counts
        .iter()
        .map(|(k, c)| (k.clone(), crate::engine::ratio_to_f64(c, d.n)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::enumerate_distribution;

    #[test]
    fn length_one_is_always_unknot() {
        let e = sample_distribution(1, 1000, 3).unwrap();
        assert_eq!(e.counts, BTreeMap::from([(KnotClass::unknot(), 1000)]));
    }

    #[test]
    fn rejects_links_and_empty_runs() {
        assert!(matches!(sample_distribution(5, 10, 0), Err(KnotError::LinkNotKnot(_))));
        assert!(sample_distribution(3, 0, 0).is_err());
    }

    #[test]
    fn reproducible_for_fixed_seed() {
        let a = sample_distribution(12, 50_000, 11).unwrap();
        let b = sample_distribution(12, 50_000, 11).unwrap();
        assert_eq!(a, b);
        let c = sample_distribution(12, 50_000, 12).unwrap();
        assert_ne!(a.counts, c.counts);
        assert_eq!(a.counts.values().sum::<u64>(), 50_000);
    }

    #[test]
    fn independent_of_thread_count() {
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| sample_distribution(10, 100_000, 99).unwrap())
        };
        assert_eq!(run(1), run(4));
    }

    #[test]
    fn letters_are_fair() {
        let mut rng = chunk_rng(5, 0);
        let mut minus = 0usize;
        let words = 20_000;
        for _ in 0..words {
            minus += random_word(&mut rng, 100)
                .letters()
                .iter()
                .filter(|&&s| s == Sign::Minus)
                .count();
        }
        let total = (words * 100) as f64;
        let z = (minus as f64 - total / 2.0) / (total / 4.0).sqrt();
        assert!(z.abs() < 4.0, "z = {z}");
    }

    #[test]
    fn trefoil_frequency_at_three() {
        let e = sample_distribution(3, 1_000_000, 2024).unwrap();
        let cmp = compare(&e, &exact_from_distribution(&enumerate_distribution(3).unwrap()));
        assert!(cmp.passed(), "{cmp:?}");
        let tre = cmp.rows.iter().find(|r| r.knot.alpha == BigInt::from(3)).unwrap();
        assert_eq!(tre.p, 0.25);
    }

    #[test]
    fn compare_edge_cases() {
        let e = EmpiricalDistribution {
            n: 3,
            trials: 8,
            seed: 0,
            counts: BTreeMap::from([
                (KnotClass::unknot(), 6),
                (
                    KnotClass {
                        alpha: 3.into(),
                        beta: 1.into(),
                    },
                    2,
                ),
            ]),
        };
        let exact = exact_from_distribution(&enumerate_distribution(3).unwrap());
        let cmp = compare(&e, &exact);
        assert!(cmp.rows.iter().all(|r| r.z == 0.0));

        // off by ten standard deviations
        let t = 1_000_000u64;
        let sd = (0.25f64 * 0.75 / t as f64).sqrt();
        let bad = ((0.25 + 10.0 * sd) * t as f64) as u64;
        let e = EmpiricalDistribution {
            n: 3,
            trials: t,
            seed: 0,
            counts: BTreeMap::from([
                (KnotClass::unknot(), t - bad),
                (
                    KnotClass {
                        alpha: 3.into(),
                        beta: 1.into(),
                    },
                    bad,
                ),
            ]),
        };
        let cmp = compare(&e, &exact);
        assert_eq!(cmp.flagged().count(), 2);

        // an impossible class
        let e = EmpiricalDistribution {
            n: 3,
            trials: 8,
            seed: 0,
            counts: BTreeMap::from([
                (KnotClass::unknot(), 7),
                (
                    KnotClass {
                        alpha: 5.into(),
                        beta: 2.into(),
                    },
                    1,
                ),
            ]),
        };
        let cmp = compare(&e, &exact);
        let fig8 = cmp.rows.iter().find(|r| r.knot.alpha == BigInt::from(5)).unwrap();
        assert!(fig8.flagged && fig8.z.is_infinite());
        // unobserved class with p > 0 still gets a row
        assert!(cmp.rows.iter().any(|r| r.knot.alpha == BigInt::from(3) && r.count == 0));
    }

    #[test]
    fn error_shrinks_with_trials() {
        let exact = exact_from_distribution(&enumerate_distribution(9).unwrap());
        for trials in [10_000u64, 100_000, 1_000_000] {
            let cmp = compare(&sample_distribution(9, trials, 7).unwrap(), &exact);
            assert!(cmp.passed(), "T={trials}: max |z| {}", cmp.max_abs_z());
        }
    }
}
