//! Random knots on Chebyshev billiard table diagrams `T(3, n+1)`.
//!
//! Each of the `n` crossings gets a sign uniformly at random. The resulting
//! sign word is reduced by internal (`+++`, `---`) and external (`++*`,
//! `*--`, …) moves, read as a `±1` continued fraction and identified with a
//! 2-bridge knot class `α/β` up to mirror image.
//!
//! * [`word`]: sign words and the reduction moves.
//! * [`rational`]: continued fractions, knot classes, 1-regular expansions
//!   and reduced profiles.
//! * [`engine`]: exact appearance probabilities from the closed formula.
//! * [`oracle`]: brute-force enumeration used to check the engine.
//! * [`sampler`]: seeded Monte Carlo estimates with z-scores.

pub mod engine;
pub mod error;
pub mod names;
pub mod oracle;
pub mod rational;
pub mod report;
pub mod sampler;
pub mod scalar;
pub mod word;

use num_bigint::BigInt;

pub use engine::{
    binom_x, build_x_table, no_move_count, probability, x_nonpositive, x_positive, ExactProbability, KnotEngine, XTable,
};
pub use error::{KnotError, Result};
pub use names::{name_lookup, NameTable};
pub use oracle::{brute_x_table, enumerate_distribution, verify_engine, BruteXTable, Distribution};
pub use rational::{
    canonicalize, classify, evaluate, expand_1regular, fraction_word, profile, Fraction, FractionWord, KnotClass,
    ReducedProfile,
};
pub use sampler::{compare, sample_distribution, EmpiricalDistribution};
pub use scalar::{Integral, Scalar};
pub use word::{
    apply_move, find_external_moves, find_internal_moves, parse_word, reduce, Move, ReductionTrace, Sign, SignWord,
};

pub type BigFraction = Fraction<BigInt>;
pub type SmallFraction = Fraction<i64>;
pub type SmallKnotClass = KnotClass<i64>;

pub type ExactXTable = XTable<BigInt>;
pub type FloatXTable = XTable<f64>;
pub type ExactEngine = KnotEngine<BigInt>;
pub type FloatEngine = KnotEngine<f64>;
