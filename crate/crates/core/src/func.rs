//! Finite functions from rationals to rationals, stored as a sorted domain
//! with values aligned by index.

use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::set::DiscreteSet;

/// A function given by an explicit table. The domain is a `DiscreteSet`, so
/// lookups are binary searches and iteration is in ascending key order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TaggedFunction {
    keys: DiscreteSet,
    values: Vec<Rational>,
}

impl TaggedFunction {
    pub fn empty() -> TaggedFunction {
        TaggedFunction {
            keys: DiscreteSet::empty(),
            values: Vec::new(),
        }
    }

    /// Builds the table from key-value pairs in any order. A repeated key is
    /// rejected even if it maps to the same value.
    pub fn from_pairs(mut pairs: Vec<(Rational, Rational)>) -> Result<TaggedFunction> {
        pairs.sort_by(|a, b| a.0.cmp(&b.0));
        for w in pairs.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::Validation(format!(
                    "duplicate key {} in function table",
                    w[0].0
                )));
            }
        }
        let (keys, values): (Vec<_>, Vec<_>) = pairs.into_iter().unzip();
        Ok(TaggedFunction {
            keys: DiscreteSet::new(keys)?,
            values,
        })
    }

    /// Parses one `key value` pair per line, separated by whitespace. Blank
    /// lines and lines starting with `#` are skipped.
    pub fn from_lines(text: &str) -> Result<TaggedFunction> {
        let mut pairs = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut fields = line.split_whitespace();
            let (Some(k), Some(v), None) = (fields.next(), fields.next(), fields.next()) else {
                return Err(Error::Parse(format!(
                    "line {}: expected `key value`, got {line:?}",
                    i + 1
                )));
            };
            let key: Rational = k
                .parse()
                .map_err(|e| Error::Parse(format!("line {}: {e}", i + 1)))?;
            let value: Rational = v
                .parse()
                .map_err(|e| Error::Parse(format!("line {}: {e}", i + 1)))?;
            pairs.push((key, value));
        }
        TaggedFunction::from_pairs(pairs)
    }

    /// One `key<TAB>value` pair per line in ascending key order.
    pub fn to_lines(&self) -> String {
        let mut out = String::new();
        for (k, v) in self.iter() {
            out.push_str(&format!("{k}\t{v}\n"));
        }
        out
    }

    pub fn domain(&self) -> &DiscreteSet {
        &self.keys
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, x: &Rational) -> Option<&Rational> {
        self.keys
            .elements()
            .binary_search(x)
            .ok()
            .map(|i| &self.values[i])
    }

    /// Value at `x`, or a domain error naming the missing point.
    pub fn value_at(&self, x: &Rational) -> Result<&Rational> {
        self.get(x)
            .ok_or_else(|| Error::Domain(format!("function is not defined at {x}")))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Rational, &Rational)> {
        self.keys.iter().zip(self.values.iter())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(s: &str) -> Rational {
        s.parse().unwrap()
    }

    #[test]
    fn pairs_are_sorted_and_duplicates_rejected() {
        let f = TaggedFunction::from_pairs(vec![
            (r("5"), r("17/10")),
            (r("2"), r("3/2")),
        ])
        .unwrap();
        assert_eq!(
            f.iter().collect::<Vec<_>>(),
            vec![(&r("2"), &r("3/2")), (&r("5"), &r("17/10"))]
        );

        let err = TaggedFunction::from_pairs(vec![
            (r("2"), r("1")),
            (r("4/2"), r("1")),
        ])
        .unwrap_err();
        assert!(err.to_string().contains("duplicate key 2"));
    }

    #[test]
    fn lookups_report_missing_points() {
        let f = TaggedFunction::from_pairs(vec![(r("2"), r("3/2"))]).unwrap();
        assert_eq!(f.value_at(&r("2")).unwrap(), &r("3/2"));
        let err = f.value_at(&r("3")).unwrap_err();
        assert!(err.to_string().contains("not defined at 3"));
        assert!(f.get(&r("3")).is_none());
    }

    #[test]
    fn line_format_round_trips() {
        let text = "# pairs\n2\t3/2\n5  17/10\n";
        let f = TaggedFunction::from_lines(text).unwrap();
        assert_eq!(f.to_lines(), "2\t3/2\n5\t17/10\n");
        assert_eq!(f.len(), 2);

        assert!(TaggedFunction::from_lines("1\n").is_err());
        assert!(TaggedFunction::from_lines("1 2 3\n").is_err());
        let empty = TaggedFunction::from_lines("").unwrap();
        assert!(empty.is_empty());
    }
}
