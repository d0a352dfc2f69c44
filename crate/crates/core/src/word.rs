//! Crossing-sign words of `T(3, n+1)` and the internal/external reduction moves.

use std::fmt;
use std::ops::Neg;
use std::str::FromStr;

use crate::error::{KnotError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> i8 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn from_value(v: i64) -> Option<Sign> {
        match v {
            1 => Some(Sign::Plus),
            -1 => Some(Sign::Minus),
            _ => None,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Sign::Plus => '+',
            Sign::Minus => '-',
        }
    }
}

impl Neg for Sign {
    type Output = Sign;

    fn neg(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

/// Signs of the crossings of a billiard diagram, left to right.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SignWord(Vec<Sign>);

impl SignWord {
    pub fn new(letters: Vec<Sign>) -> Self {
        SignWord(letters)
    }

    pub fn empty() -> Self {
        SignWord(Vec::new())
    }

    /// Word of length `n` whose letter `i` is `-` iff bit `i` of `bits` is set.
    pub fn from_bits(bits: u64, n: usize) -> Self {
        debug_assert!(n <= 64);
        SignWord(
            (0..n)
                .map(|i| if bits >> i & 1 == 1 { Sign::Minus } else { Sign::Plus })
                .collect(),
        )
    }

    pub fn letters(&self) -> &[Sign] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn negated(&self) -> Self {
        SignWord(self.0.iter().map(|&s| -s).collect())
    }
}

impl fmt::Display for SignWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.0 {
            write!(f, "{}", s.as_char())?;
        }
        Ok(())
    }
}

impl FromStr for SignWord {
    type Err = KnotError;

    fn from_str(s: &str) -> Result<Self> {
        parse_word(s)
    }
}

/// Parses a word over `+`/`-`. Positions in errors are 1-based.
pub fn parse_word(text: &str) -> Result<SignWord> {
    text.chars()
        .enumerate()
        .map(|(i, c)| match c {
            '+' => Ok(Sign::Plus),
            '-' => Ok(Sign::Minus),
            found => Err(KnotError::InvalidCharacter { position: i + 1, found }),
        })
        .collect::<Result<Vec<_>>>()
        .map(SignWord)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Move {
    /// Deletes letters `j, j+1, j+2` (1-based), which must be equal.
    Internal(usize),
    /// Deletes the first three letters; the first two must be equal.
    ExternalLeft,
    /// Deletes the last three letters; the last two must be equal.
    ExternalRight,
}

impl Move {
    pub fn kind_name(self) -> &'static str {
        match self {
            Move::Internal(_) => "internal",
            Move::ExternalLeft => "external_left",
            Move::ExternalRight => "external_right",
        }
    }

    /// 1-based index of the first deleted letter in a word of length `n`.
    pub fn start(self, n: usize) -> usize {
        match self {
            Move::Internal(j) => j,
            Move::ExternalLeft => 1,
            Move::ExternalRight => n.saturating_sub(2),
        }
    }
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Move::Internal(j) => write!(f, "Int at {j}"),
            Move::ExternalLeft => write!(f, "Ext left"),
            Move::ExternalRight => write!(f, "Ext right"),
        }
    }
}

fn internal_positions(letters: &[Sign]) -> impl Iterator<Item = usize> + '_ {
    letters
        .windows(3)
        .enumerate()
        .filter(|(_, w)| w[0] == w[1] && w[1] == w[2])
        .map(|(i, _)| i + 1)
}

/// Ascending 1-based start positions of every `+++` / `---` window.
pub fn find_internal_moves(w: &SignWord) -> Vec<usize> {
    internal_positions(w.letters()).collect()
}

/// The applicable external moves, left before right.
pub fn find_external_moves(w: &SignWord) -> Vec<Move> {
    let l = w.letters();
    let n = l.len();
    let mut out = Vec::new();
    if n >= 3 && l[0] == l[1] {
        out.push(Move::ExternalLeft);
    }
    if n >= 3 && l[n - 2] == l[n - 1] {
        out.push(Move::ExternalRight);
    }
    out
}

/// Every applicable move: internal ones by position, then external ones.
pub fn applicable_moves(w: &SignWord) -> Vec<Move> {
    let mut moves: Vec<Move> = internal_positions(w.letters()).map(Move::Internal).collect();
    moves.extend(find_external_moves(w));
    moves
}

pub fn has_no_moves(w: &SignWord) -> bool {
    internal_positions(w.letters()).next().is_none() && find_external_moves(w).is_empty()
}

fn check_applicable(letters: &[Sign], m: Move) -> Result<()> {
    let n = letters.len();
    let fail = |reason: String| {
        Err(KnotError::InapplicableMove {
            mv: m.to_string(),
            reason,
        })
    };
    match m {
        Move::Internal(j) => {
            if j == 0 || j + 2 > n {
                return fail(format!("positions {j}..{} outside a word of length {n}", j + 2));
            }
            let t = &letters[j - 1..j + 2];
            if !(t[0] == t[1] && t[1] == t[2]) {
                return fail(format!("letters {j}..{} are not all equal", j + 2));
            }
        }
        Move::ExternalLeft | Move::ExternalRight if n < 3 => {
            return fail(format!("word has length {n} < 3"));
        }
        Move::ExternalLeft => {
            if letters[0] != letters[1] {
                return fail("letters 1 and 2 differ".to_string());
            }
        }
        Move::ExternalRight => {
            if letters[n - 2] != letters[n - 1] {
                return fail(format!("letters {} and {n} differ", n - 1));
            }
        }
    }
    Ok(())
}

/// Deletes the three letters covered by `m`.
pub fn apply_move(w: &SignWord, m: Move) -> Result<SignWord> {
    let letters = w.letters();
    check_applicable(letters, m)?;
    let start = m.start(letters.len()) - 1;
    let mut out = Vec::with_capacity(letters.len() - 3);
    out.extend_from_slice(&letters[..start]);
    out.extend_from_slice(&letters[start + 3..]);
    Ok(SignWord(out))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReductionStep {
    pub mv: Move,
    /// Length of the word the move was applied to.
    pub from_len: usize,
    pub result: SignWord,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReductionTrace {
    pub initial: SignWord,
    pub steps: Vec<ReductionStep>,
    pub fin: SignWord,
}

/// Runs the deterministic reduction (leftmost internal move, else external
/// left, else external right) in place, reporting each move.
pub(crate) fn reduce_in_place(letters: &mut Vec<Sign>, mut on_step: impl FnMut(Move, usize, &[Sign])) {
    // No triple starts before `scan`: everything left of it is unchanged
    // since the last full scan.
    let mut scan = 0usize;
    loop {
        let n = letters.len();
        let internal =
            (scan..n.saturating_sub(2)).find(|&i| letters[i] == letters[i + 1] && letters[i + 1] == letters[i + 2]);
        if let Some(i) = internal {
            letters.drain(i..i + 3);
            on_step(Move::Internal(i + 1), n, letters);
            scan = i.saturating_sub(2);
            continue;
        }
        scan = n.saturating_sub(2);
        if n >= 3 && letters[0] == letters[1] {
            letters.drain(..3);
            on_step(Move::ExternalLeft, n, letters);
            scan = 0;
        } else if n >= 3 && letters[n - 2] == letters[n - 1] {
            letters.truncate(n - 3);
            on_step(Move::ExternalRight, n, letters);
        } else {
            return;
        }
    }
}

/// Reduces `w` until no move applies, recording every step.
pub fn reduce(w: &SignWord) -> ReductionTrace {
    let mut letters = w.0.clone();
    let mut steps = Vec::new();
    reduce_in_place(&mut letters, |mv, from_len, rest| {
        steps.push(ReductionStep {
            mv,
            from_len,
            result: SignWord(rest.to_vec()),
        })
    });
    ReductionTrace {
        initial: w.clone(),
        steps,
        fin: SignWord(letters),
    }
}

/// Final word of [`reduce`] without building the trace.
pub fn reduced_word(w: &SignWord) -> SignWord {
    let mut letters = w.0.clone();
    reduce_in_place(&mut letters, |_, _, _| {});
    SignWord(letters)
}
