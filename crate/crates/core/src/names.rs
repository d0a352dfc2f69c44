//! Standard names for small knot classes, and parsing of knot specifiers.

use std::collections::BTreeMap;
use std::path::Path;

use num_bigint::BigInt;

use crate::error::{KnotError, Result};
use crate::rational::{canonicalize, classify, Fraction, KnotClass};
use crate::word::parse_word;

const BUNDLED: &str = include_str!("../data/knot_names.txt");

/// Maps canonical `(α, β_min)` to names like `"4_1"`.
#[derive(Debug, Clone, Default)]
pub struct NameTable {
    by_class: BTreeMap<KnotClass, String>,
    by_name: BTreeMap<String, KnotClass>,
}

impl NameTable {
    /// The table shipped with the crate (all 2-bridge knots with N <= 8).
    pub fn bundled() -> Self {
        Self::parse(BUNDLED).expect("bundled name table is well formed")
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| KnotError::NameTable {
            line: 0,
            reason: format!("{}: {e}", path.display()),
        })?;
        Self::parse(&text)
    }

    /// Lines `alpha beta_min name`; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut table = NameTable::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |reason: String| KnotError::NameTable { line: i + 1, reason };
            let fields: Vec<&str> = line.split_whitespace().collect();
            let [a, b, name] = fields[..] else {
                return Err(err(format!("expected 3 fields, found {}", fields.len())));
            };
            let alpha: BigInt = a.parse().map_err(|_| err(format!("bad alpha {a:?}")))?;
            let beta: BigInt = b.parse().map_err(|_| err(format!("bad beta {b:?}")))?;
            let class = KnotClass { alpha, beta };
            let canon = canonicalize(&class.fraction()).map_err(|e| err(e.to_string()))?;
            if canon != class {
                return Err(err(format!("{class} is not canonical, expected {canon}")));
            }
            if table.by_name.insert(name.to_string(), class.clone()).is_some() {
                return Err(err(format!("duplicate name {name}")));
            }
            if table.by_class.insert(class.clone(), name.to_string()).is_some() {
                return Err(err(format!("duplicate class {class}")));
            }
        }
        Ok(table)
    }

    pub fn name(&self, k: &KnotClass) -> Option<&str> {
        self.by_class.get(k).map(String::as_str)
    }

    pub fn class(&self, name: &str) -> Option<&KnotClass> {
        self.by_name.get(name)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&KnotClass, &str)> {
        self.by_class.iter().map(|(k, v)| (k, v.as_str()))
    }

    pub fn len(&self) -> usize {
        self.by_class.len()
    }

    pub fn is_empty(&self) -> bool {
        self.by_class.is_empty()
    }

    /// The name if known, else `"alpha/beta"`.
    pub fn label(&self, k: &KnotClass) -> String {
        self.name(k).map_or_else(|| k.to_string(), str::to_string)
    }

    /// Resolves a knot given by name, as `"alpha/beta"`, or as a sign word.
    pub fn resolve(&self, spec: &str) -> Result<KnotClass> {
        let spec = spec.trim();
        if spec.eq_ignore_ascii_case("unknot") || spec == "U" || spec == "0_1" {
            return Ok(KnotClass::unknot());
        }
        if let Some(k) = self.class(spec) {
            return Ok(k.clone());
        }
        if spec.contains('/') {
            let f: Fraction = spec.parse()?;
            if !f.is_reduced() {
                return Err(KnotError::InvalidFraction(format!(
                    "{f} is not a reduced odd-alpha fraction"
                )));
            }
            return canonicalize(&f);
        }
        if !spec.is_empty() && spec.chars().all(|c| c == '+' || c == '-') {
            return classify(&parse_word(spec)?);
        }
        Err(KnotError::UnknownKnot(spec.to_string()))
    }
}

/// Looks `k` up in the bundled table.
pub fn name_lookup(k: &KnotClass) -> Option<String> {
    NameTable::bundled().name(k).map(str::to_string)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn class(a: i64, b: i64) -> KnotClass {
        KnotClass {
            alpha: a.into(),
            beta: b.into(),
        }
    }

    #[test]
    fn lookup_examples() {
        assert_eq!(name_lookup(&class(3, 1)).as_deref(), Some("3_1"));
        assert_eq!(name_lookup(&class(5, 2)).as_deref(), Some("4_1"));
        assert_eq!(name_lookup(&KnotClass::unknot()).as_deref(), Some("unknot"));
        assert_eq!(name_lookup(&class(9, 1)), None);
    }

    #[test]
    fn resolve_forms() {
        let t = NameTable::bundled();
        assert_eq!(t.resolve("3_1").unwrap(), class(3, 1));
        assert_eq!(t.resolve("U").unwrap(), KnotClass::unknot());
        assert_eq!(t.resolve("3/2").unwrap(), class(3, 1));
        assert_eq!(t.resolve("7/-3").unwrap(), class(7, 2));
        assert_eq!(t.resolve("+-+-").unwrap(), class(5, 2));
        assert!(matches!(t.resolve("4/2"), Err(KnotError::InvalidFraction(_))));
        assert!(matches!(t.resolve("6/1"), Err(KnotError::LinkNotKnot(_))));
        assert!(matches!(t.resolve("9_42"), Err(KnotError::UnknownKnot(_))));
        assert!(t.resolve("++").is_err());
    }

    #[test]
    fn parse_rejects_bad_tables() {
        assert!(NameTable::parse("3 2 3_1\n").is_err());
        assert!(NameTable::parse("3 1\n").is_err());
        assert!(NameTable::parse("3 1 a\n3 1 b\n").is_err());
        assert!(NameTable::parse("4 1 x\n").is_err());
        let t = NameTable::parse("# only comments\n\n5 2 fig8 # trailing\n").unwrap();
        assert_eq!(t.name(&class(5, 2)), Some("fig8"));
    }
}
