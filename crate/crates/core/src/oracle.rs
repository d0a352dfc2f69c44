//! Brute force over all `2^n` words: knot distributions, the filtration
//! cardinalities `|S_i|`, `x_i`, `y_i`, and a sweep comparing all of it
//! against the exact engine.
//!
//! Nothing here reuses the engine's recursions; every count comes from
//! classifying individual words.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_traits::Zero;
use rayon::prelude::*;

use crate::engine::{no_move_count, KnotEngine};
use crate::error::{KnotError, Result};
use crate::rational::{classify_as, profile, KnotClass, ReducedProfile};
use crate::word::{has_no_moves, SignWord};

pub const MAX_ENUMERATION: usize = 24;
pub const MAX_FILTRATION: usize = 18;

/// Exact counts of each knot class among all words of length `n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Distribution {
    pub n: usize,
    pub counts: BTreeMap<KnotClass, BigInt>,
}

impl Distribution {
    pub fn total(&self) -> BigInt {
        self.counts.values().sum()
    }

    pub fn count(&self, k: &KnotClass) -> BigInt {
        self.counts.get(k).cloned().unwrap_or_default()
    }
}

fn check_enumerable(n: usize, max: usize) -> Result<()> {
    if n > max {
        return Err(KnotError::TooLarge { n, max });
    }
    if n % 3 == 2 {
        return Err(KnotError::LinkNotKnot(format!(
            "T(3, {}) with n = {n} ≡ 2 (mod 3)",
            n + 1
        )));
    }
    Ok(())
}

const CHUNK_BITS: usize = 12;

/// Splits `0..2^bits` into disjoint ranges for parallel workers.
fn word_ranges(bits: usize) -> Vec<std::ops::Range<u64>> {
    let total = 1u64 << bits;
    let step = 1u64 << CHUNK_BITS.min(bits);
    (0..total).step_by(step as usize).map(|s| s..s + step).collect()
}

fn merge<K: std::hash::Hash + Eq>(mut a: HashMap<K, u64>, b: HashMap<K, u64>) -> HashMap<K, u64> {
    for (k, v) in b {
        *a.entry(k).or_default() += v;
    }
    a
}

/// Classifies every word of length `n`. A word and its negation share a
/// class, so only words starting with `+` are classified and counts doubled.
pub fn enumerate_distribution(n: usize) -> Result<Distribution> {
    check_enumerable(n, MAX_ENUMERATION)?;
    if n == 0 {
        let counts = BTreeMap::from([(KnotClass::unknot(), BigInt::from(1))]);
        return Ok(Distribution { n, counts });
    }
    let tally = word_ranges(n - 1)
        .into_par_iter()
        .map(|range| -> Result<HashMap<KnotClass<i64>, u64>> {
            let mut local = HashMap::new();
            for bits in range {
                let k = classify_as::<i64>(&SignWord::from_bits(bits << 1, n))?;
                *local.entry(k).or_default() += 2;
            }
            Ok(local)
        })
        .try_reduce(HashMap::new, |a, b| Ok(merge(a, b)))?;
    let counts = tally.into_iter().map(|(k, c)| (k.to_big(), BigInt::from(c))).collect();
    Ok(Distribution { n, counts })
}

/// Filtration cardinalities for one knot and word length, all 1-based:
/// `s(i) = |S_i|` for `1..=n+1`, `x(i)` for `1..=n`, `y(i)` for `1..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BruteXTable {
    pub n: usize,
    pub class: KnotClass,
    pub s_sizes: Vec<i64>,
    pub x: Vec<i64>,
    pub y: Vec<i64>,
}

impl BruteXTable {
    /// `histogram[j]` counts member words whose leftmost internal move starts
    /// at `j` (1-based); `histogram[0]` counts words with none.
    fn from_histogram(class: KnotClass, n: usize, histogram: &[i64]) -> Self {
        let members: i64 = histogram.iter().sum();
        let no_int_before = |limit: usize| -> i64 {
            // words with no internal move at any j < limit
            histogram[0]
                + histogram
                    .iter()
                    .enumerate()
                    .skip(limit.max(1))
                    .map(|(_, c)| c)
                    .sum::<i64>()
        };
        let s_sizes: Vec<i64> = (1..=n + 1)
            .map(|i| match i {
                1 => 2 * members,
                2 | 3 => members,
                _ => no_int_before(i - 2),
            })
            .collect();
        let x: Vec<i64> = (0..n).map(|i| s_sizes[i] - s_sizes[i + 1]).collect();
        let y: Vec<i64> = x.windows(2).map(|w| w[0] - w[1]).collect();
        BruteXTable {
            n,
            class,
            s_sizes,
            x,
            y,
        }
    }

    fn empty(class: KnotClass, n: usize) -> Self {
        Self::from_histogram(class, n, &vec![0; n + 1])
    }

    pub fn s(&self, i: usize) -> i64 {
        self.s_sizes[i - 1]
    }

    pub fn x(&self, i: usize) -> i64 {
        self.x[i - 1]
    }

    pub fn y(&self, i: usize) -> i64 {
        self.y[i - 1]
    }

    /// `|S^{(n)}|`, the number of words of the class.
    pub fn members(&self) -> i64 {
        self.s(2)
    }
}

fn first_internal(w: &SignWord) -> usize {
    w.letters()
        .windows(3)
        .position(|t| t[0] == t[1] && t[1] == t[2])
        .map_or(0, |p| p + 1)
}

fn filtration_histograms(n: usize) -> Result<HashMap<KnotClass<i64>, Vec<i64>>> {
    if n % 3 == 2 {
        return Ok(HashMap::new());
    }
    word_ranges(n)
        .into_par_iter()
        .map(|range| -> Result<HashMap<KnotClass<i64>, Vec<i64>>> {
            let mut local: HashMap<KnotClass<i64>, Vec<i64>> = HashMap::new();
            for bits in range {
                let w = SignWord::from_bits(bits, n);
                let k = classify_as::<i64>(&w)?;
                local.entry(k).or_insert_with(|| vec![0; n + 1])[first_internal(&w)] += 1;
            }
            Ok(local)
        })
        .try_reduce(HashMap::new, |mut a, b| {
            for (k, h) in b {
                let slot = a.entry(k).or_insert_with(|| vec![0; n + 1]);
                slot.iter_mut().zip(h).for_each(|(s, c)| *s += c);
            }
            Ok(a)
        })
}

fn check_filtration_n(n: usize) -> Result<()> {
    if n == 0 || n > MAX_FILTRATION {
        return Err(KnotError::InvalidArgument(format!(
            "filtration tables need 1 <= n <= {MAX_FILTRATION}, got {n}"
        )));
    }
    Ok(())
}

/// The filtration table of one class at word length `n`.
pub fn brute_x_table(k: &KnotClass, n: usize) -> Result<BruteXTable> {
    check_filtration_n(n)?;
    let hist = filtration_histograms(n)?;
    Ok(hist.into_iter().find(|(c, _)| c.to_big() == *k).map_or_else(
        || BruteXTable::empty(k.clone(), n),
        |(_, h)| BruteXTable::from_histogram(k.clone(), n, &h),
    ))
}

/// Filtration tables of every class that occurs at word length `n`.
pub fn brute_x_tables(n: usize) -> Result<BTreeMap<KnotClass, BruteXTable>> {
    check_filtration_n(n)?;
    Ok(filtration_histograms(n)?
        .into_iter()
        .map(|(k, h)| {
            let k = k.to_big();
            (k.clone(), BruteXTable::from_histogram(k, n, &h))
        })
        .collect())
}

/// Number of move-free words of length `n` per class.
pub fn move_free_counts(n: usize) -> Result<BTreeMap<KnotClass, u64>> {
    check_enumerable(n, MAX_ENUMERATION)?;
    let mut out = BTreeMap::new();
    for bits in 0..1u64 << n {
        let w = SignWord::from_bits(bits, n);
        if has_no_moves(&w) {
            *out.entry(classify_as::<i64>(&w)?.to_big()).or_default() += 1;
        }
    }
    Ok(out)
}

/// Checks every filtration identity that relates the brute-force table at
/// `n` to the one at `n - 3` and to the engine. Returns mismatch messages.
pub fn filtration_mismatches(
    at_n: &BruteXTable,
    at_n_minus_3: Option<&BruteXTable>,
    engine: &mut KnotEngine<BigInt>,
) -> Result<Vec<String>> {
    let n = at_n.n;
    let k = &at_n.class;
    let mut bad = Vec::new();
    let mut expect = |what: String, lhs: BigInt, rhs: BigInt| {
        if lhs != rhs {
            bad.push(format!("{k} n={n}: {what}: {lhs} != {rhs}"));
        }
    };
    let b = |v: i64| BigInt::from(v);

    expect("x_1 = |S|".into(), b(at_n.x(1)), b(at_n.members()));
    if n >= 2 {
        expect("x_2 = 0".into(), b(at_n.x(2)), BigInt::zero());
    }
    if n >= 4 {
        expect("x_3 = 2 x_4".into(), b(at_n.x(3)), b(2 * at_n.x(4)));
    }
    if n >= 5 {
        expect("x_4 = x_5".into(), b(at_n.x(4)), b(at_n.x(5)));
    }
    for i in 1..=n {
        let tail: i64 = (i..n).map(|j| at_n.y(j)).sum();
        expect(format!("x_{i} = x_n + sum y"), b(at_n.x(i)), b(at_n.x(n) + tail));
        let expanded = engine.binom_x(i as i64, n as i64)?;
        expect(format!("x_{i} = binomial sum of diagonal"), b(at_n.x(i)), expanded);
    }
    expect(
        format!("|S_{}| = x_{}^({})", n + 1, n + 3, n + 3),
        b(at_n.s(n + 1)),
        engine.x(n as i64 + 3)?,
    );
    if let Some(prev) = at_n_minus_3 {
        for i in 3..=n {
            expect(format!("x_{i} = |S_{}^(n-3)|", i - 2), b(at_n.x(i)), b(prev.s(i - 2)));
        }
        for i in 3..n {
            expect(format!("y_{i} = x_{}^(n-3)", i - 2), b(at_n.y(i)), b(prev.x(i - 2)));
        }
    }
    Ok(bad)
}

type EngineCache = HashMap<KnotClass, (ReducedProfile, KnotEngine<BigInt>)>;

trait CacheExt {
    fn engine_for(&mut self, k: &KnotClass) -> Result<&mut (ReducedProfile, KnotEngine<BigInt>)>;
}

impl CacheExt for EngineCache {
    fn engine_for(&mut self, k: &KnotClass) -> Result<&mut (ReducedProfile, KnotEngine<BigInt>)> {
        if !self.contains_key(k) {
            let p = profile(k)?;
            self.insert(k.clone(), (p.clone(), KnotEngine::new(p)));
        }
        Ok(self.get_mut(k).expect("just inserted"))
    }
}

/// Outcome of [`verify_engine`]: one summary line per `n`, plus mismatches.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct VerifyReport {
    pub lines: Vec<String>,
    pub mismatches: Vec<String>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// Compares enumeration, filtration tables and move-free counts against the
/// engine for every valid `n <= n_max`.
pub fn verify_engine(n_max: usize) -> Result<VerifyReport> {
    if n_max > MAX_FILTRATION {
        return Err(KnotError::TooLarge {
            n: n_max,
            max: MAX_FILTRATION,
        });
    }
    let mut report = VerifyReport::default();
    let mut engines = EngineCache::new();
    let mut tables: BTreeMap<usize, BTreeMap<KnotClass, BruteXTable>> = BTreeMap::new();

    for n in (0..=n_max).filter(|n| n % 3 != 2) {
        let before = report.mismatches.len();
        let dist = enumerate_distribution(n)?;
        if dist.total() != BigInt::from(1u64 << n) {
            report
                .mismatches
                .push(format!("n={n}: counts sum to {}, not 2^{n}", dist.total()));
        }
        let mut engine_checked = 0usize;
        for (k, count) in &dist.counts {
            let (p, engine) = engines.engine_for(k)?;
            if !p.is_unknot() && p.ell0 + p.ell1 + 2 != 3 * p.crossing_number {
                report
                    .mismatches
                    .push(format!("{k}: lengths {} + {} != 3N - 2", p.ell0, p.ell1));
            }
            if n >= 6 {
                let num = engine.numerator(n)?;
                engine_checked += 1;
                if num != *count {
                    report
                        .mismatches
                        .push(format!("{k} n={n}: engine {num} != oracle {count}"));
                }
            }
        }

        let move_free = move_free_counts(n)?;
        for k in dist.counts.keys() {
            let (p, _) = engines.engine_for(k)?;
            let got = move_free.get(k).copied().unwrap_or(0);
            let want = u64::from(no_move_count(p, n));
            if got != want {
                report
                    .mismatches
                    .push(format!("{k} n={n}: {got} move-free words, expected {want}"));
            }
        }

        let mut filtration_checked = 0usize;
        if n >= 1 {
            let here = brute_x_tables(n)?;
            for (k, t) in &here {
                let prev = n.checked_sub(3).filter(|&m| m >= 1).map(|m| {
                    tables[&m]
                        .get(k)
                        .cloned()
                        .unwrap_or_else(|| BruteXTable::empty(k.clone(), m))
                });
                let (_, engine) = engines.engine_for(k)?;
                report
                    .mismatches
                    .extend(filtration_mismatches(t, prev.as_ref(), engine)?);
                filtration_checked += 1;
            }
            tables.insert(n, here);
        }

        let status = if report.mismatches.len() == before {
            "ok"
        } else {
            "MISMATCH"
        };
        report.lines.push(format!(
            "n={n:<2} words={:<7} classes={:<4} engine_checked={:<4} filtration_checked={:<4} move_free={:<3} {status}",
            1u64 << n,
            dist.counts.len(),
            engine_checked,
            filtration_checked,
            move_free.values().sum::<u64>(),
        ));
    }
    Ok(report)
}
