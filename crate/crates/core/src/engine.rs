//! Exact appearance probabilities from the diagonal values `x_k = x_k^{(k)}`.
//!
//! For `k >= 1` the diagonal has a closed form in the knot's reduced profile.
//! For `k <= 0` it is defined by two binomial recursions, one per parity of
//! `k`, each reading only larger indices of the same residue mod 3. The
//! probability of a knot among the `2^n` words of length `n >= 6` is
//!
//! ```text
//! x_{n+3} + Σ_{i=0}^{n-6} [C(n-5, i+1) + 4 C(n-5, i)] x_{n-3i} + 4 x_{15-2n}
//! ```
//!
//! divided by `2^n`. Everything here is generic over [`Scalar`]; only
//! [`BigInt`] stays exact for large `n` because the nonpositive-index values
//! grow far faster than the probabilities themselves.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{KnotError, Result};
use crate::names::NameTable;
use crate::oracle;
use crate::rational::{KnotClass, ReducedProfile};
use crate::scalar::{from_usize, Pascal, Scalar};

fn residue_of(k: i64) -> usize {
    k.rem_euclid(3) as usize
}

fn check_residue(k: i64) -> Result<usize> {
    match residue_of(k) {
        2 => Err(KnotError::InvalidResidue(k)),
        r => Ok(r),
    }
}

/// Closed form of `x_k` for `k >= 1`.
pub fn x_positive<T: Scalar>(k: i64, p: &ReducedProfile) -> Result<T> {
    if k < 1 {
        return Err(KnotError::InvalidArgument(format!("x_positive needs k >= 1, got {k}")));
    }
    check_residue(k)?;
    // x_1 = x_4 for every knot.
    let k = if k == 1 { 4 } else { k as usize };
    let (ell, r) = p.length_for_residue(k % 3).expect("residue checked");
    let r: T = from_usize(r as usize);
    let four: T = from_usize(4);
    if p.is_unknot() {
        return Ok(match (k % 3, k) {
            (0, 3) => from_usize(2),
            (0, _) => four * from_usize((k / 3) - 1) * r,
            _ => four * from_usize((k - 1) / 3 - 1) + from_usize(2),
        });
    }
    if k <= ell {
        return Ok(T::zero());
    }
    let m = (k - ell) / 3;
    Ok(if m == 1 { r } else { four * from_usize(m - 1) * r })
}

/// Diagonal values of one residue class for one profile.
#[derive(Debug, Clone)]
pub struct XTable<T = BigInt> {
    profile: ReducedProfile,
    residue: usize,
    values: BTreeMap<i64, T>,
}

impl<T: Scalar> XTable<T> {
    pub fn new(profile: ReducedProfile, residue: usize) -> Result<Self> {
        if residue > 1 {
            return Err(KnotError::InvalidResidue(residue as i64));
        }
        Ok(XTable {
            profile,
            residue,
            values: BTreeMap::new(),
        })
    }

    pub fn profile(&self) -> &ReducedProfile {
        &self.profile
    }

    pub fn residue(&self) -> usize {
        self.residue
    }

    pub fn get(&self, k: i64) -> Option<&T> {
        self.values.get(&k)
    }

    pub fn values(&self) -> &BTreeMap<i64, T> {
        &self.values
    }

    pub fn lowest(&self) -> Option<i64> {
        self.values.keys().next().copied()
    }

    fn value(&self, k: i64) -> Result<T> {
        self.values
            .get(&k)
            .cloned()
            .ok_or_else(|| KnotError::Internal(format!("x_{k} requested before it was computed")))
    }

    fn first_positive(&self) -> i64 {
        if self.residue == 0 {
            3
        } else {
            1
        }
    }

    fn first_nonpositive(&self) -> i64 {
        if self.residue == 0 {
            0
        } else {
            -2
        }
    }

    /// Fills every index of this residue in `[lo, hi]`, plus the positive
    /// indices the recursions for `lo` read.
    pub fn extend(&mut self, lo: i64, hi: i64, pascal: &mut Pascal<T>) -> Result<()> {
        let hi = hi.max((12 - lo.min(0)) / 2);
        let mut k = self.first_positive();
        while k <= hi {
            if !self.values.contains_key(&k) {
                let v = x_positive(k, &self.profile)?;
                self.values.insert(k, v);
            }
            k += 3;
        }
        // Nonpositive entries form a contiguous run below first_nonpositive().
        let mut k = match self.lowest() {
            Some(l) if l <= 0 => l - 3,
            _ => self.first_nonpositive(),
        };
        while k >= lo {
            let v = x_nonpositive(k, self, pascal)?;
            self.values.insert(k, v);
            k -= 3;
        }
        Ok(())
    }
}

/// Recursion for `x_k`, `k <= 0`. Even `k = 12 - 2m`:
/// `x_k = -Σ_{j=1}^{m-5} C(m-5, j-1) x_{m-3j}`; odd `k = 9 - 2m`:
/// `x_k = Σ_{j=0}^{m-4} [C(m-4, j) - C(m-4, j-1)] x_{m-3j}`.
pub fn x_nonpositive<T: Scalar>(k: i64, table: &XTable<T>, pascal: &mut Pascal<T>) -> Result<T> {
    if k > 0 {
        return Err(KnotError::InvalidArgument(format!(
            "x_nonpositive needs k <= 0, got {k}"
        )));
    }
    if check_residue(k)? != table.residue {
        return Err(KnotError::InvalidArgument(format!(
            "index {k} does not belong to residue {} table",
            table.residue
        )));
    }
    let mut acc = T::zero();
    if k % 2 == 0 {
        let m = (12 - k) / 2;
        for j in 1..=m - 5 {
            acc = acc - pascal.binom(m - 5, j - 1) * table.value(m - 3 * j)?;
        }
    } else {
        let m = (9 - k) / 2;
        for j in 0..=m - 4 {
            let c = pascal.binom(m - 4, j) - pascal.binom(m - 4, j - 1);
            acc = acc + c * table.value(m - 3 * j)?;
        }
    }
    Ok(acc)
}

fn check_word_length(n: usize) -> Result<()> {
    if n % 3 == 2 {
        return Err(KnotError::LinkNotKnot(format!(
            "T(3, {}) with n = {n} ≡ 2 (mod 3)",
            n + 1
        )));
    }
    Ok(())
}

/// Table for word length `n >= 6` covering `n+3` down to `15-2n`.
pub fn build_x_table<T: Scalar>(p: &ReducedProfile, n: usize) -> Result<XTable<T>> {
    check_word_length(n)?;
    if n < 6 {
        return Err(KnotError::InvalidArgument(format!("x-table needs n >= 6, got {n}")));
    }
    let n = n as i64;
    let mut table = XTable::new(p.clone(), residue_of(n))?;
    table.extend(15 - 2 * n, n + 3, &mut Pascal::new())?;
    Ok(table)
}

/// Memoized engine for one profile; tables only ever grow.
#[derive(Debug, Clone)]
pub struct KnotEngine<T = BigInt> {
    profile: ReducedProfile,
    pascal: Pascal<T>,
    tables: [XTable<T>; 2],
}

impl<T: Scalar> KnotEngine<T> {
    pub fn new(profile: ReducedProfile) -> Self {
        let tables = [
            XTable::new(profile.clone(), 0).expect("residue 0"),
            XTable::new(profile.clone(), 1).expect("residue 1"),
        ];
        KnotEngine {
            profile,
            pascal: Pascal::new(),
            tables,
        }
    }

    pub fn profile(&self) -> &ReducedProfile {
        &self.profile
    }

    fn table_covering(&mut self, r: usize, lo: i64, hi: i64) -> Result<&XTable<T>> {
        let table = &mut self.tables[r];
        table.extend(lo, hi, &mut self.pascal)?;
        Ok(table)
    }

    /// `x_k` for any `k ≢ 2 (mod 3)`.
    pub fn x(&mut self, k: i64) -> Result<T> {
        let r = check_residue(k)?;
        self.table_covering(r, k.min(0), k.max(1))?.value(k)
    }

    /// `x_i^{(n)} = Σ_{j=0}^{n-i} C(n-i, j) x_{n-3j}`.
    pub fn binom_x(&mut self, i: i64, n: i64) -> Result<T> {
        if i > n {
            return Err(KnotError::InvalidArgument(format!(
                "binom_x needs i <= n, got i={i}, n={n}"
            )));
        }
        let d = n - i;
        let r = check_residue(n)?;
        self.table_covering(r, n - 3 * d, n)?;
        let mut acc = T::zero();
        for j in 0..=d {
            acc = acc + self.pascal.binom(d, j) * self.tables[r].value(n - 3 * j)?;
        }
        Ok(acc)
    }

    /// Number of length-`n` words classifying to this knot, `n >= 6`.
    pub fn numerator(&mut self, n: usize) -> Result<T> {
        check_word_length(n)?;
        if n < 6 {
            return Err(KnotError::InvalidArgument(format!(
                "closed formula needs n >= 6, got {n}; use probability() for small n"
            )));
        }
        let n = n as i64;
        let r = check_residue(n)?;
        self.table_covering(r, 15 - 2 * n, n + 3)?;
        let table = &self.tables[r];
        let four: T = from_usize(4);
        let mut acc = table.value(n + 3)?;
        for i in 0..=n - 6 {
            let c = self.pascal.binom(n - 5, i + 1) + four.clone() * self.pascal.binom(n - 5, i);
            acc = acc + c * table.value(n - 3 * i)?;
        }
        Ok(acc + four * table.value(15 - 2 * n)?)
    }
}

/// Convenience wrapper around [`KnotEngine::binom_x`].
pub fn binom_x<T: Scalar>(i: i64, n: i64, p: &ReducedProfile) -> Result<T> {
    KnotEngine::new(p.clone()).binom_x(i, n)
}

/// `P(K appears in T(3, n+1))` as `numerator / 2^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactProbability {
    pub knot: KnotClass,
    pub n: usize,
    pub numerator: BigInt,
    pub value: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ProbabilityRecord {
    pub knot: String,
    pub n: usize,
    pub numerator: String,
    pub log2_denominator: usize,
    pub value: f64,
}

impl ExactProbability {
    pub fn new(knot: KnotClass, n: usize, numerator: BigInt) -> Result<Self> {
        if numerator.is_negative() || numerator > (BigInt::from(1) << n) {
            return Err(KnotError::Internal(format!(
                "numerator {numerator} outside [0, 2^{n}] for {knot}"
            )));
        }
        let value = ratio_to_f64(&numerator, n);
        Ok(ExactProbability {
            knot,
            n,
            numerator,
            value,
        })
    }

    pub fn record(&self, names: &NameTable) -> ProbabilityRecord {
        ProbabilityRecord {
            knot: names.label(&self.knot),
            n: self.n,
            numerator: self.numerator.to_string(),
            log2_denominator: self.n,
            value: self.value,
        }
    }
}

fn pow2(mut e: i64) -> f64 {
    let mut v = 1.0;
    while e > 1000 {
        v *= 2f64.powi(1000);
        e -= 1000;
    }
    while e < -1000 {
        v *= 2f64.powi(-1000);
        e += 1000;
    }
    v * 2f64.powi(e as i32)
}

/// `numerator / 2^n`, correct to within an ulp.
pub fn ratio_to_f64(numerator: &BigInt, n: usize) -> f64 {
    if numerator.is_zero() {
        return 0.0;
    }
    let excess = numerator.bits().saturating_sub(64);
    let top = (numerator >> excess).to_f64().expect("64-bit value fits f64");
    top * pow2(excess as i64 - n as i64)
}

/// Exact probability for any `n ≢ 2 (mod 3)`. Uses the closed formula for
/// `n >= 6` and enumerates all `2^n` words below that.
pub fn probability(p: &ReducedProfile, n: usize) -> Result<ExactProbability> {
    check_word_length(n)?;
    let numerator = if n >= 6 {
        KnotEngine::<BigInt>::new(p.clone()).numerator(n)?
    } else {
        oracle::enumerate_distribution(n)?.count(&p.knot)
    };
    ExactProbability::new(p.knot.clone(), n, numerator)
}

/// Move-free words of length `n` representing the knot: `r(ℓ)` at the two
/// reduced lengths, zero elsewhere.
pub fn no_move_count(p: &ReducedProfile, n: usize) -> u32 {
    if n == p.ell0 {
        p.r0
    } else if n == p.ell1 {
        p.r1
    } else {
        0
    }
}
