//! Continued fractions of sign words and 2-bridge knot classes.
//!
//! A sign word `w` maps to the `±1` continued fraction `a_i = (-1)^(i+1) w_i`.
//! Knot classes are taken up to mirror image: `α/β` is identified with
//! `α/β'` for every `β' ∈ {β, β⁻¹, -β, -β⁻¹} (mod α)`.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;

use crate::error::{KnotError, Result};
use crate::scalar::{to_big, Integral};
use crate::word::{self, Sign, SignWord};

/// `(a_1, …, a_n)` with every entry `±1`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct FractionWord(Vec<Sign>);

impl FractionWord {
    pub fn new(entries: Vec<Sign>) -> Self {
        FractionWord(entries)
    }

    pub fn from_values(values: &[i64]) -> Option<Self> {
        values
            .iter()
            .map(|&v| Sign::from_value(v))
            .collect::<Option<Vec<_>>>()
            .map(FractionWord)
    }

    pub fn entries(&self) -> &[Sign] {
        &self.0
    }

    pub fn values(&self) -> Vec<i64> {
        self.0.iter().map(|s| i64::from(s.value())).collect()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn negated(&self) -> Self {
        FractionWord(self.0.iter().map(|&s| -s).collect())
    }

    /// Conditions (ii) and (iii) of 1-regularity; (i) holds by construction.
    /// A word of length below 2 has no final pair and passes (ii) vacuously.
    pub fn is_one_regular(&self) -> bool {
        let a = &self.0;
        let n = a.len();
        if n >= 2 && a[n - 2] != a[n - 1] {
            return false;
        }
        a.windows(3).all(|t| t[0] == t[1] || t[1] == t[2])
    }

    /// The sign word with these continued-fraction entries.
    pub fn to_sign_word(&self) -> SignWord {
        SignWord::new(self.0.iter().enumerate().map(|(i, &s)| alternate(i, s)).collect())
    }
}

impl fmt::Display for FractionWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, s) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}1", s.as_char())?;
        }
        write!(f, ")")
    }
}

fn alternate(i: usize, s: Sign) -> Sign {
    if i.is_multiple_of(2) {
        s
    } else {
        -s
    }
}

/// Flips every second letter, starting with the second.
pub fn fraction_word(w: &SignWord) -> FractionWord {
    FractionWord(w.letters().iter().enumerate().map(|(i, &s)| alternate(i, s)).collect())
}

/// A rational `α/β` with `α ≥ 0`; `1/0` stands for the unknot.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Fraction<T = BigInt> {
    pub alpha: T,
    pub beta: T,
}

impl<T: Integral> Fraction<T> {
    /// Stores `α/β` with the sign moved onto `β`. Not reduced.
    pub fn new(alpha: T, beta: T) -> Self {
        if alpha.is_negative() {
            Fraction {
                alpha: -alpha,
                beta: -beta,
            }
        } else {
            Fraction { alpha, beta }
        }
    }

    pub fn is_reduced(&self) -> bool {
        self.alpha.gcd(&self.beta).is_one()
    }

    pub fn to_big(&self) -> Fraction<BigInt> {
        Fraction {
            alpha: to_big(&self.alpha),
            beta: to_big(&self.beta),
        }
    }
}

impl<T: fmt::Display> fmt::Display for Fraction<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.alpha, self.beta)
    }
}

impl std::str::FromStr for Fraction<BigInt> {
    type Err = KnotError;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || KnotError::InvalidFraction(format!("{s:?}: expected \"alpha/beta\""));
        let (a, b) = s.split_once('/').ok_or_else(bad)?;
        let alpha: BigInt = a.trim().parse().map_err(|_| bad())?;
        let beta: BigInt = b.trim().parse().map_err(|_| bad())?;
        Ok(Fraction::new(alpha, beta))
    }
}

/// Projective evaluation: the first column of `∏ [[a_i, 1], [1, 0]]`.
///
/// Entries of the product are bounded by Fibonacci numbers, so `i64` is
/// exact for words of length up to [`SMALL_EVAL_MAX_LEN`].
pub fn evaluate<T: Integral>(fw: &FractionWord) -> Fraction<T> {
    let (mut p, mut p_prev) = (T::one(), T::zero());
    let (mut q, mut q_prev) = (T::zero(), T::one());
    for &s in fw.entries() {
        let (np, nq) = match s {
            Sign::Plus => (p.clone() + p_prev, q.clone() + q_prev),
            Sign::Minus => (p_prev - p.clone(), q_prev - q.clone()),
        };
        p_prev = std::mem::replace(&mut p, np);
        q_prev = std::mem::replace(&mut q, nq);
    }
    Fraction::new(p, q)
}

/// Longest word that [`evaluate`] handles exactly in `i64` (F(92) < 2^63).
pub const SMALL_EVAL_MAX_LEN: usize = 90;

/// A 2-bridge knot up to mirror image: `α` and the least orbit denominator.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct KnotClass<T = BigInt> {
    pub alpha: T,
    pub beta: T,
}

impl<T: Integral> KnotClass<T> {
    pub fn unknot() -> Self {
        KnotClass {
            alpha: T::one(),
            beta: T::zero(),
        }
    }

    pub fn is_unknot(&self) -> bool {
        self.alpha.is_one()
    }

    pub fn to_big(&self) -> KnotClass<BigInt> {
        KnotClass {
            alpha: to_big(&self.alpha),
            beta: to_big(&self.beta),
        }
    }

    pub fn fraction(&self) -> Fraction<T> {
        Fraction {
            alpha: self.alpha.clone(),
            beta: self.beta.clone(),
        }
    }
}

impl<T: fmt::Display> fmt::Display for KnotClass<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.alpha, self.beta)
    }
}

fn mod_inverse<T: Integral>(b: &T, modulus: &T) -> Option<T> {
    let eg = b.extended_gcd(modulus);
    eg.gcd.is_one().then(|| eg.x.mod_floor(modulus))
}

/// The orbit `{b, b⁻¹, α-b, α-b⁻¹}` (mod α) of a reduced fraction, sorted and deduplicated.
fn orbit<T: Integral>(alpha: &T, beta: &T) -> Option<Vec<T>> {
    let b = beta.mod_floor(alpha);
    let inv = mod_inverse(&b, alpha)?;
    let mut d = vec![alpha.clone() - b.clone(), alpha.clone() - inv.clone(), b, inv];
    d.sort();
    d.dedup();
    Some(d)
}

pub fn canonicalize<T: Integral>(f: &Fraction<T>) -> Result<KnotClass<T>> {
    let f = Fraction::new(f.alpha.clone(), f.beta.clone());
    if f.alpha.is_one() {
        return Ok(KnotClass::unknot());
    }
    if f.alpha.is_even() {
        return Err(KnotError::LinkNotKnot(format!("fraction {f} (even numerator)")));
    }
    let d =
        orbit(&f.alpha, &f.beta).ok_or_else(|| KnotError::InvalidFraction(format!("{f} is not in lowest terms")))?;
    Ok(KnotClass {
        alpha: f.alpha,
        beta: d[0].clone(),
    })
}

/// Classifies with `T` arithmetic throughout. `T = i64` requires
/// `w.len() <= SMALL_EVAL_MAX_LEN`.
pub fn classify_as<T: Integral>(w: &SignWord) -> Result<KnotClass<T>> {
    if w.len() % 3 == 2 {
        return Err(KnotError::LinkNotKnot(format!(
            "a word of length {} ≡ 2 (mod 3)",
            w.len()
        )));
    }
    let reduced = word::reduced_word(w);
    let via_reduced = canonicalize(&evaluate::<T>(&fraction_word(&reduced)))?;
    let direct = canonicalize(&evaluate::<T>(&fraction_word(w)))?;
    if via_reduced != direct {
        return Err(KnotError::Internal(format!(
            "word {w} reduces to {reduced} of class {via_reduced} but evaluates directly to {direct}"
        )));
    }
    Ok(via_reduced)
}

/// Reduces `w`, evaluates the reduced word and canonicalizes, cross-checking
/// against direct evaluation of `w`.
pub fn classify(w: &SignWord) -> Result<KnotClass> {
    if w.len() <= SMALL_EVAL_MAX_LEN {
        classify_as::<i64>(w).map(|k| k.to_big())
    } else {
        classify_as::<BigInt>(w)
    }
}

fn sign_of<T: Integral>(v: &T) -> Sign {
    if v.is_negative() {
        Sign::Minus
    } else {
        Sign::Plus
    }
}

/// The unique 1-regular `±1` expansion of `α/β > 1`, by the greedy rule
/// `e = sign(t)`, `t ← 1/(t - e)` until `t = e`.
pub fn expand_1regular<T: Integral>(f: &Fraction<T>) -> Result<FractionWord> {
    let (alpha, beta) = (&f.alpha, &f.beta);
    if !(beta.is_positive() && alpha > beta) {
        return Err(KnotError::InvalidFraction(format!("{f}: need alpha > beta > 0")));
    }
    if !f.is_reduced() {
        return Err(KnotError::InvalidFraction(format!("{f} is not in lowest terms")));
    }
    let cap = alpha.to_usize().and_then(|a| a.checked_mul(3)).unwrap_or(usize::MAX);
    // t = p/q with q > 0
    let (mut p, mut q) = (alpha.clone(), beta.clone());
    let mut out = Vec::new();
    loop {
        if out.len() >= cap {
            return Err(KnotError::Internal(format!(
                "1-regular expansion of {f} exceeded {cap} steps"
            )));
        }
        let e = sign_of(&p);
        out.push(e);
        let eq = if e == Sign::Plus { q.clone() } else { -q.clone() };
        if p == eq {
            break;
        }
        let d = p - eq;
        (p, q) = if d.is_negative() { (-q, -d) } else { (q, d) };
    }
    let fw = FractionWord(out);
    let back = evaluate::<T>(&fw);
    if back.alpha != *alpha || back.beta != *beta {
        return Err(KnotError::Internal(format!(
            "expansion {fw} of {f} evaluates to {back}"
        )));
    }
    if !fw.is_one_regular() || fw.entries()[..2] != [Sign::Plus, Sign::Plus] {
        return Err(KnotError::Internal(format!("expansion {fw} of {f} is not 1-regular")));
    }
    Ok(fw)
}

/// Reduced lengths, their multiplicities and the crossing number of a knot.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ReducedProfile {
    pub knot: KnotClass,
    pub ell0: usize,
    pub ell1: usize,
    pub r0: u32,
    pub r1: u32,
    pub crossing_number: usize,
}

impl ReducedProfile {
    pub fn unknot() -> Self {
        ReducedProfile {
            knot: KnotClass::unknot(),
            ell0: 0,
            ell1: 1,
            r0: 1,
            r1: 2,
            crossing_number: 0,
        }
    }

    pub fn is_unknot(&self) -> bool {
        self.knot.is_unknot()
    }

    /// `(ℓ, r(ℓ))` for the residue class `n mod 3`; `None` for residue 2.
    pub fn length_for_residue(&self, residue: usize) -> Option<(usize, u32)> {
        match residue % 3 {
            0 => Some((self.ell0, self.r0)),
            1 => Some((self.ell1, self.r1)),
            _ => None,
        }
    }
}

/// The knot's move-free words of each reduced length, as 1-regular
/// expansions of `α/d` for `d` in the orbit of `β`.
fn orbit_expansions(k: &KnotClass) -> Result<Vec<(BigInt, FractionWord)>> {
    let d =
        orbit(&k.alpha, &k.beta).ok_or_else(|| KnotError::InvalidFraction(format!("{k} is not in lowest terms")))?;
    d.into_iter()
        .map(|d| {
            let fw = expand_1regular(&Fraction {
                alpha: k.alpha.clone(),
                beta: d.clone(),
            })?;
            Ok((d, fw))
        })
        .collect()
}

fn validate_class(k: &KnotClass) -> Result<()> {
    if k.is_unknot() {
        return Ok(());
    }
    let canon = canonicalize(&k.fraction())?;
    if canon != *k {
        return Err(KnotError::InvalidFraction(format!(
            "{k} is not canonical (canonical form {canon})"
        )));
    }
    Ok(())
}

pub fn profile(k: &KnotClass) -> Result<ReducedProfile> {
    if k.is_unknot() {
        return Ok(ReducedProfile::unknot());
    }
    validate_class(k)?;
    let mut by_len: BTreeMap<usize, u32> = BTreeMap::new();
    for (_, fw) in orbit_expansions(k)? {
        *by_len.entry(fw.len()).or_default() += 1;
    }
    let pick = |residue: usize| -> Result<(usize, u32)> {
        let mut it = by_len.iter().filter(|(l, _)| *l % 3 == residue);
        match (it.next(), it.next()) {
            (Some((&l, &c)), None) => Ok((l, 2 * c)),
            _ => Err(KnotError::Internal(format!(
                "{k}: reduced lengths {by_len:?} are not one ≡0 and one ≡1 (mod 3)"
            ))),
        }
    };
    if by_len.keys().any(|l| l % 3 == 2) {
        return Err(KnotError::Internal(format!(
            "{k}: reduced length ≡ 2 (mod 3) in {by_len:?}"
        )));
    }
    let (ell0, r0) = pick(0)?;
    let (ell1, r1) = pick(1)?;
    Ok(ReducedProfile {
        knot: k.clone(),
        ell0,
        ell1,
        r0,
        r1,
        crossing_number: (ell0 + ell1).div_ceil(3),
    })
}

/// Every sign word with no applicable move that represents `k`, grouped by length.
pub fn move_free_words(k: &KnotClass) -> Result<BTreeMap<usize, Vec<SignWord>>> {
    let mut out: BTreeMap<usize, Vec<SignWord>> = BTreeMap::new();
    if k.is_unknot() {
        out.insert(0, vec![SignWord::empty()]);
        out.insert(
            1,
            vec![SignWord::new(vec![Sign::Plus]), SignWord::new(vec![Sign::Minus])],
        );
        return Ok(out);
    }
    validate_class(k)?;
    for (_, fw) in orbit_expansions(k)? {
        let w = fw.to_sign_word();
        let words = out.entry(w.len()).or_default();
        words.push(w.negated());
        words.push(w);
    }
    for words in out.values_mut() {
        words.sort();
    }
    Ok(out)
}
