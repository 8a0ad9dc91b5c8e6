//! Packing tuples of set elements into single rationals.
//!
//! A tuple is coded above its largest component: the value is
//! `m + sum(t_i / (n*m)^i)` with `m = max(t)`. On a set whose elements are
//! at least one and at least one apart, the digit weights shrink fast enough
//! that distinct tuples get distinct values, every coded value lies in
//! `[m, m+1]`, and for arity two or more it lies strictly inside.

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize};

use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::set::DiscreteSet;

/// The basic packing step: `x0 + sum over i of xs[i] / (n*x0)^i`, with `i`
/// running from one. The declared arity must match the slice length.
pub fn interleave(x0: &Rational, xs: &[Rational], n: usize) -> Result<Rational> {
    if n == 0 {
        return Err(Error::Precondition("arity must be at least one".into()));
    }
    if xs.len() != n {
        return Err(Error::Validation(format!(
            "arity {n} does not match {} components",
            xs.len()
        )));
    }
    if !x0.is_positive() {
        return Err(Error::Precondition("base point must be positive".into()));
    }
    let base = Rational::from(n) * x0;
    let mut acc = x0.clone();
    for (i, x) in xs.iter().enumerate() {
        let weight = base.pow(-(i as i64 + 1)).expect("positive base");
        acc = acc + x * &weight;
    }
    Ok(acc)
}

/// One coded tuple: the components in order and the packed value.
pub type TupleEntry = (Vec<Rational>, Rational);

/// A complete arity-`n` coding of a set: every tuple in the n-fold product,
/// with the packed image and the tuple-to-value record.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TupleCode {
    n: usize,
    domain: DiscreteSet,
    image: DiscreteSet,
    entries: Vec<TupleEntry>,
}

/// Codes all of `d^n`. Requires a positive set with gaps at least one,
/// which is exactly what spreading produces. Distinct tuples always pack
/// to distinct values once the smallest element is also at least one; below
/// that the packing is still attempted and any exact collision is rejected.
pub fn tuple_encode(d: &DiscreteSet, n: usize) -> Result<TupleCode> {
    if n == 0 {
        return Err(Error::Precondition("arity must be at least one".into()));
    }
    if !d.all_positive() {
        return Err(Error::Precondition(
            "tuple coding requires a positive set; shift it positive first".into(),
        ));
    }
    if let Ok(gap) = d.min_gap() {
        if gap < Rational::one() {
            return Err(Error::Precondition(
                "gaps must be at least one; spread the set first".into(),
            ));
        }
    }
    let elems = d.elements();
    let mut entries: Vec<TupleEntry> = Vec::new();
    if !elems.is_empty() {
        // Odometer over index vectors gives lexicographic tuple order.
        let mut idx = vec![0usize; n];
        loop {
            let tuple: Vec<Rational> = idx.iter().map(|&i| elems[i].clone()).collect();
            let max = tuple.iter().max().expect("nonempty tuple").clone();
            let value = interleave(&max, &tuple, n)?;
            entries.push((tuple, value));
            let mut pos = n;
            loop {
                if pos == 0 {
                    break;
                }
                pos -= 1;
                idx[pos] += 1;
                if idx[pos] < elems.len() {
                    break;
                }
                idx[pos] = 0;
            }
            if idx.iter().all(|&i| i == 0) {
                break;
            }
        }
    }
    let image = DiscreteSet::new(entries.iter().map(|(_, v)| v.clone()).collect())
        .map_err(|e| Error::Validation(format!("tuple coding collided: {e}")))?;
    entries.sort_by(|a, b| a.1.cmp(&b.1));
    Ok(TupleCode {
        n,
        domain: d.clone(),
        image,
        entries,
    })
}

impl TupleCode {
    pub fn arity(&self) -> usize {
        self.n
    }

    pub fn domain(&self) -> &DiscreteSet {
        &self.domain
    }

    pub fn image(&self) -> &DiscreteSet {
        &self.image
    }

    /// Entries sorted by coded value.
    pub fn entries(&self) -> &[TupleEntry] {
        &self.entries
    }

    /// Value of one tuple; every component must belong to the domain.
    pub fn encode_tuple(&self, tuple: &[Rational]) -> Result<Rational> {
        if tuple.len() != self.n {
            return Err(Error::Validation(format!(
                "expected {} components, got {}",
                self.n,
                tuple.len()
            )));
        }
        for t in tuple {
            if !self.domain.contains(t) {
                return Err(Error::Domain(format!("{t} is not in the coded set")));
            }
        }
        let max = tuple.iter().max().expect("arity at least one").clone();
        interleave(&max, tuple, self.n)
    }

    /// The tuple behind a coded value.
    pub fn decode_value(&self, value: &Rational) -> Result<&[Rational]> {
        self.entries
            .binary_search_by(|(_, v)| v.cmp(value))
            .map(|i| self.entries[i].0.as_slice())
            .map_err(|_| Error::Domain(format!("{value} is not a coded tuple value")))
    }
}

impl<'de> Deserialize<'de> for TupleCode {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Shadow {
            n: usize,
            domain: DiscreteSet,
            image: DiscreteSet,
            entries: Vec<TupleEntry>,
        }
        let s = Shadow::deserialize(deserializer)?;
        let rebuilt = tuple_encode(&s.domain, s.n).map_err(D::Error::custom)?;
        if rebuilt.image != s.image || rebuilt.entries != s.entries {
            return Err(D::Error::custom(
                "tuple coding artifact is inconsistent with its domain and arity",
            ));
        }
        Ok(rebuilt)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(s: &str) -> Rational {
        s.parse().unwrap()
    }

    fn set(items: &[&str]) -> DiscreteSet {
        DiscreteSet::new(items.iter().map(|s| r(s)).collect()).unwrap()
    }

    #[test]
    fn packing_matches_hand_computation() {
        assert_eq!(
            interleave(&r("2"), &[r("1"), r("2")], 2).unwrap(),
            r("19/8")
        );
        assert_eq!(
            interleave(&r("1"), &[r("1"), r("1")], 2).unwrap(),
            r("7/4")
        );
        assert_eq!(interleave(&r("2"), &[r("2")], 1).unwrap(), r("3"));
    }

    #[test]
    fn packing_validates_inputs() {
        assert!(interleave(&r("2"), &[r("1")], 2).is_err());
        assert!(interleave(&r("2"), &[r("1")], 0).is_err());
        assert!(interleave(&r("0"), &[r("1")], 1).is_err());
        assert!(interleave(&r("-2"), &[r("1")], 1).is_err());
    }

    #[test]
    fn pair_coding_matches_hand_computation() {
        let code = tuple_encode(&set(&["1", "2"]), 2).unwrap();
        assert_eq!(
            code.image().elements(),
            &[r("7/4"), r("19/8"), r("41/16"), r("21/8")]
        );
        // (2,1) -> 2 + 2/4 + 1/16 and (1,2) -> 2 + 1/4 + 2/16 are distinct.
        assert_eq!(code.decode_value(&r("41/16")).unwrap(), &[r("2"), r("1")]);
        assert_eq!(code.decode_value(&r("19/8")).unwrap(), &[r("1"), r("2")]);
        assert_eq!(code.encode_tuple(&[r("2"), r("2")]).unwrap(), r("21/8"));

        let code = tuple_encode(&set(&["1"]), 3).unwrap();
        assert_eq!(code.image().elements(), &[r("40/27")]);
    }

    #[test]
    fn unit_arity_tops_out_at_the_closed_end() {
        let code = tuple_encode(&set(&["2", "3"]), 1).unwrap();
        // Coding d itself gives d + 1 exactly, the closed right end.
        assert_eq!(code.image().elements(), &[r("3"), r("4")]);
    }

    #[test]
    fn higher_arity_values_stay_strictly_local() {
        let d = set(&["1", "2", "7/2"]);
        for n in [2usize, 3] {
            let code = tuple_encode(&d, n).unwrap();
            for (tuple, value) in code.entries() {
                let max = tuple.iter().max().unwrap();
                let hi = max + &Rational::one();
                assert!(value > max && value < &hi, "{value} outside ({max}, {hi})");
            }
            assert_eq!(code.entries().len(), d.len().pow(n as u32));
        }
    }

    #[test]
    fn coding_requires_spread_sets() {
        assert!(tuple_encode(&set(&["1", "3/2"]), 2).is_err());
        assert!(tuple_encode(&set(&["-1", "2"]), 2).is_err());
        assert!(tuple_encode(&set(&["1", "2"]), 0).is_err());
        let empty = tuple_encode(&DiscreteSet::empty(), 2).unwrap();
        assert!(empty.image().is_empty());
        assert!(empty.entries().is_empty());
    }

    #[test]
    fn small_minimum_is_allowed_when_gaps_are_wide() {
        // Gap 3/2 >= 1 but the minimum sits below one, so the packed values
        // can stray outside (max, max + 1); they must still be distinct.
        let code = tuple_encode(&set(&["1/2", "2"]), 2).unwrap();
        assert_eq!(code.entries().len(), 4);
        assert_eq!(code.image().len(), 4);
        assert_eq!(code.decode_value(&r("3/2")).unwrap(), &[r("1/2"), r("1/2")]);
    }

    #[test]
    fn lookups_reject_foreign_values() {
        let code = tuple_encode(&set(&["1", "2"]), 2).unwrap();
        assert!(code.encode_tuple(&[r("1")]).is_err());
        assert!(code.encode_tuple(&[r("1"), r("3")]).is_err());
        assert!(code.decode_value(&r("5")).is_err());
    }

    #[test]
    fn serde_validates_consistency() {
        let code = tuple_encode(&set(&["1", "2"]), 2).unwrap();
        let json = serde_json::to_string(&code).unwrap();
        let back: TupleCode = serde_json::from_str(&json).unwrap();
        assert_eq!(back, code);

        let tampered = json.replace("41/16", "43/16");
        assert!(serde_json::from_str::<TupleCode>(&tampered).is_err());
    }
}
