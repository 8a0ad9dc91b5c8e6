//! Finite sets of rationals kept sorted and duplicate-free.
//!
//! Everything downstream (gap inspection, isolation, anchored encodings,
//! ladder searches) walks elements in ascending order, so the invariant is
//! enforced at construction and every accessor can use binary search.

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::rational::Rational;

/// A finite subset of the rationals, strictly increasing.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiscreteSet {
    elements: Vec<Rational>,
}

impl DiscreteSet {
    pub fn empty() -> DiscreteSet {
        DiscreteSet {
            elements: Vec::new(),
        }
    }

    /// Sorts the given elements and rejects duplicates; the error names the
    /// canonical form of the repeated value.
    pub fn new(mut elements: Vec<Rational>) -> Result<DiscreteSet> {
        elements.sort();
        for pair in elements.windows(2) {
            if pair[0] == pair[1] {
                return Err(Error::Validation(format!(
                    "duplicate element {}",
                    pair[0]
                )));
            }
        }
        Ok(DiscreteSet { elements })
    }

    /// Sorts and silently collapses duplicates. For collections where
    /// repeats are expected (images of non-injective maps, product grids).
    pub fn from_dedup(mut elements: Vec<Rational>) -> DiscreteSet {
        elements.sort();
        elements.dedup();
        DiscreteSet { elements }
    }

    /// Parses one element per line. Blank lines and lines starting with `#`
    /// are skipped; other lines are trimmed and must be a single rational.
    pub fn from_lines(text: &str) -> Result<DiscreteSet> {
        let mut elements = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let value: Rational = line
                .parse()
                .map_err(|e| Error::Parse(format!("line {}: {e}", i + 1)))?;
            elements.push(value);
        }
        DiscreteSet::new(elements)
            .map_err(|e| Error::Validation(format!("set text: {e}")))
    }

    /// One element per line in ascending order, LF-terminated.
    pub fn to_lines(&self) -> String {
        let mut out = String::new();
        for e in &self.elements {
            out.push_str(&e.to_string());
            out.push('\n');
        }
        out
    }

    pub fn elements(&self) -> &[Rational] {
        &self.elements
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Rational> {
        self.elements.iter()
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn min(&self) -> Option<&Rational> {
        self.elements.first()
    }

    pub fn max(&self) -> Option<&Rational> {
        self.elements.last()
    }

    pub fn contains(&self, x: &Rational) -> bool {
        self.elements.binary_search(x).is_ok()
    }

    /// Least element strictly greater than `x`, if any.
    pub fn successor(&self, x: &Rational) -> Option<&Rational> {
        let idx = self.elements.partition_point(|e| e <= x);
        self.elements.get(idx)
    }

    /// Greatest element strictly less than `x`, if any.
    pub fn largest_below(&self, x: &Rational) -> Option<&Rational> {
        let idx = self.elements.partition_point(|e| e < x);
        idx.checked_sub(1).map(|i| &self.elements[i])
    }

    /// Elements in the open interval `(lo, hi)`.
    pub fn strictly_between(&self, lo: &Rational, hi: &Rational) -> &[Rational] {
        let start = self.elements.partition_point(|e| e <= lo);
        let end = self.elements.partition_point(|e| e < hi);
        &self.elements[start..end.max(start)]
    }

    /// Elements in the closed interval `[lo, hi]`.
    pub fn in_closed_range(&self, lo: &Rational, hi: &Rational) -> &[Rational] {
        let start = self.elements.partition_point(|e| e < lo);
        let end = self.elements.partition_point(|e| e <= hi);
        &self.elements[start..end.max(start)]
    }

    /// Gaps between consecutive elements, in order.
    pub fn gaps(&self) -> impl Iterator<Item = Rational> + '_ {
        self.elements.windows(2).map(|w| &w[1] - &w[0])
    }

    /// Smallest gap between consecutive elements. Fewer than two elements
    /// leave no gap to measure, which is a precondition error.
    pub fn min_gap(&self) -> Result<Rational> {
        self.gaps()
            .min()
            .ok_or_else(|| Error::Precondition("minimum gap needs at least two elements".into()))
    }

    /// True when every element is positive; vacuously true when empty.
    pub fn all_positive(&self) -> bool {
        self.elements.first().is_none_or(|x| x.is_positive())
    }

    /// The set reflected through zero.
    pub fn negated(&self) -> DiscreteSet {
        let elements = self.elements.iter().rev().map(|e| -e).collect();
        DiscreteSet { elements }
    }
}

impl Serialize for DiscreteSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.elements.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for DiscreteSet {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let elements = Vec::<Rational>::deserialize(deserializer)?;
        DiscreteSet::new(elements).map_err(D::Error::custom)
    }
}

impl<'a> IntoIterator for &'a DiscreteSet {
    type Item = &'a Rational;
    type IntoIter = std::slice::Iter<'a, Rational>;

    fn into_iter(self) -> Self::IntoIter {
        self.elements.iter()
    }
}
