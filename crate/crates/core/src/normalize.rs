//! Normalization steps that reposition a discrete set without losing
//! information: shifting into the positive reals, spreading elements until
//! consecutive gaps are at least one, carving out the isolated core at a
//! radius, and the gap-profile function used to certify closedness.
//!
//! Each repositioning returns the moved set together with a `MapRecord` so
//! callers can pull answers back to the original elements.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::set::DiscreteSet;

/// An explicit source-to-image pairing for a repositioning map, in ascending
/// source order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MapRecord {
    pairs: Vec<(Rational, Rational)>,
}

impl MapRecord {
    fn new(pairs: Vec<(Rational, Rational)>) -> MapRecord {
        MapRecord { pairs }
    }

    pub fn pairs(&self) -> &[(Rational, Rational)] {
        &self.pairs
    }

    pub fn apply(&self, x: &Rational) -> Option<&Rational> {
        self.pairs
            .binary_search_by(|(k, _)| k.cmp(x))
            .ok()
            .map(|i| &self.pairs[i].1)
    }

    /// Source of an image value. The maps recorded here are strictly
    /// increasing, so the image is sorted too and this is a binary search.
    pub fn preimage(&self, y: &Rational) -> Option<&Rational> {
        self.pairs
            .binary_search_by(|(_, v)| v.cmp(y))
            .ok()
            .map(|i| &self.pairs[i].0)
    }

    pub fn image_set(&self) -> Result<DiscreteSet> {
        DiscreteSet::new(self.pairs.iter().map(|(_, v)| v.clone()).collect())
    }
}

/// A repositioned set together with the map that produced it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Mapped {
    pub set: DiscreteSet,
    pub map: MapRecord,
}

fn mapped_from_pairs(pairs: Vec<(Rational, Rational)>) -> Result<Mapped> {
    let record = MapRecord::new(pairs);
    let set = record.image_set()?;
    Ok(Mapped { set, map: record })
}

/// Moves every element into the positive rationals, preserving order:
/// `d <= 0` goes to `1/(1 - d)`, which packs the nonpositive elements into
/// `(0, 1]`, and `d > 0` goes to `1 + d`.
pub fn shift_positive(d: &DiscreteSet) -> Result<Mapped> {
    if d.is_empty() {
        return Err(Error::Precondition(
            "positive shift needs a nonempty set".into(),
        ));
    }
    let one = Rational::one();
    let pairs = d
        .iter()
        .map(|x| {
            let image = if x.is_positive() {
                &one + x
            } else {
                (&one - x).invert().expect("1 - d > 0 for d <= 0")
            };
            (x.clone(), image)
        })
        .collect();
    mapped_from_pairs(pairs)
}

/// Spreads a positive set so consecutive gaps are at least one. Each element
/// is scaled by the largest inverse gap seen so far (at least one), so the
/// map is order-preserving and the image of an element depends only on
/// elements below it.
pub fn space_out(d: &DiscreteSet) -> Result<Mapped> {
    if !d.all_positive() {
        return Err(Error::Precondition(
            "spreading requires a positive set; shift it positive first".into(),
        ));
    }
    let mut factor = Rational::one();
    let mut prev: Option<&Rational> = None;
    let mut pairs = Vec::with_capacity(d.len());
    for x in d {
        if let Some(p) = prev {
            let inv_gap = (x - p).invert().expect("strictly increasing");
            if inv_gap > factor {
                factor = inv_gap;
            }
        }
        pairs.push((x.clone(), x * &factor));
        prev = Some(x);
    }
    mapped_from_pairs(pairs)
}

/// The elements whose distance to every other element is at least `radius`.
pub fn isolate(d: &DiscreteSet, radius: &Rational) -> Result<DiscreteSet> {
    if !radius.is_positive() {
        return Err(Error::Precondition("isolation radius must be positive".into()));
    }
    let elems = d.elements();
    let kept = elems
        .iter()
        .enumerate()
        .filter(|(i, x)| {
            let below_ok = *i == 0 || &(*x - &elems[i - 1]) >= radius;
            let above_ok = *i + 1 == elems.len() || &(&elems[i + 1] - *x) >= radius;
            below_ok && above_ok
        })
        .map(|(_, x)| x.clone())
        .collect();
    DiscreteSet::new(kept)
}

/// Gap profile of the isolated core at radius `delta`: the largest of all
/// pairwise differences and their inverses, floored at one. As `delta`
/// shrinks this grows exactly when ever-closer pairs survive isolation,
/// which is what the closedness certificate tracks.
pub fn gap_profile(d: &DiscreteSet, delta: &Rational) -> Result<Rational> {
    let core = isolate(d, delta)?;
    let mut best = Rational::one();
    let elems = core.elements();
    for i in 0..elems.len() {
        for j in 0..i {
            let diff = &elems[i] - &elems[j];
            let inv = diff.invert().expect("distinct elements");
            if diff > best {
                best = diff;
            }
            if inv > best {
                best = inv;
            }
        }
    }
    Ok(best)
}

/// The default sampling schedule for `closedize`: `eps/2, eps/4, ...`,
/// twenty values, strictly decreasing inside `(0, eps)`.
pub fn default_schedule(eps: &Rational) -> Vec<Rational> {
    (1..=20)
        .map(|k| eps * &Rational::power_of_two(-k))
        .collect()
}

/// Evaluates the gap profile along a strictly decreasing schedule of radii
/// inside `(0, eps)`, yielding `(delta, profile)` pairs in schedule order.
pub fn closedize(
    d: &DiscreteSet,
    eps: &Rational,
    schedule: &[Rational],
) -> Result<Vec<(Rational, Rational)>> {
    if !eps.is_positive() {
        return Err(Error::Precondition("tolerance must be positive".into()));
    }
    for w in schedule.windows(2) {
        if w[0] <= w[1] {
            return Err(Error::Precondition(
                "schedule must be strictly decreasing".into(),
            ));
        }
    }
    if let (Some(first), Some(last)) = (schedule.first(), schedule.last()) {
        if first >= eps || !last.is_positive() {
            return Err(Error::Precondition(format!(
                "schedule must lie strictly inside (0, {eps})"
            )));
        }
    }
    schedule
        .iter()
        .map(|delta| Ok((delta.clone(), gap_profile(d, delta)?)))
        .collect()
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
    fn shifting_moves_everything_positive_in_order() {
        let m = shift_positive(&set(&["-1", "0", "2"])).unwrap();
        assert_eq!(m.set.elements(), &[r("1/2"), r("1"), r("3")]);
        assert_eq!(m.map.apply(&r("-1")), Some(&r("1/2")));
        assert_eq!(m.map.apply(&r("0")), Some(&r("1")));
        assert_eq!(m.map.apply(&r("2")), Some(&r("3")));
        assert_eq!(m.map.preimage(&r("3")), Some(&r("2")));
        assert!(m.set.all_positive());
        assert!(shift_positive(&DiscreteSet::empty()).is_err());
    }

    #[test]
    fn spreading_matches_hand_computation() {
        let m = space_out(&set(&["1", "3/2", "4"])).unwrap();
        assert_eq!(m.set.elements(), &[r("1"), r("3"), r("8")]);

        let m = space_out(&set(&["1/2", "1"])).unwrap();
        assert_eq!(m.set.elements(), &[r("1/2"), r("2")]);

        assert!(space_out(&set(&["0", "1"])).is_err());
        assert!(space_out(&DiscreteSet::empty()).unwrap().set.is_empty());
    }

    #[test]
    fn spreading_guarantees_unit_gaps() {
        let d = set(&["1/10", "2/10", "5/10", "11/10", "3"]);
        let m = space_out(&d).unwrap();
        for gap in m.set.gaps() {
            assert!(gap >= Rational::one(), "gap {gap} below one");
        }
        assert_eq!(m.set.len(), d.len());
    }

    #[test]
    fn isolation_keeps_only_spread_elements() {
        let b = isolate(&set(&["1", "11/10", "3"]), &r("1/2")).unwrap();
        assert_eq!(b.elements(), &[r("3")]);
        let b = isolate(&set(&["1", "11/10", "3"]), &r("1/10")).unwrap();
        assert_eq!(b.len(), 3);
        assert!(isolate(&set(&["1"]), &r("0")).is_err());
        assert_eq!(isolate(&set(&["7"]), &r("5")).unwrap().elements(), &[r("7")]);
    }

    #[test]
    fn gap_profile_uses_both_differences_and_inverses() {
        // Core {1, 3}: differences {2}, inverses {1/2}; profile 2.
        let d = set(&["1", "3"]);
        assert_eq!(gap_profile(&d, &r("1/2")).unwrap(), r("2"));
        // A singleton core has no pairs; the floor of one applies.
        assert_eq!(gap_profile(&set(&["5"]), &r("1")).unwrap(), r("1"));
    }

    #[test]
    fn closedize_profile_grows_on_reciprocal_tails() {
        // D = {1/i : i <= 50}. The element 1/i survives isolation at radius
        // delta exactly when i(i+1) <= 1/delta, so along the halving schedule
        // the surviving core grows and its closest pair tightens:
        //   delta 1/2, 1/4  -> core {1}           -> profile 1
        //   delta 1/8       -> core {1/2, 1}      -> profile 2
        //   delta 1/16      -> up to 1/3          -> profile 1/(2*3)^-1  = 6
        //   delta 1/32      -> up to 1/5          -> profile 20
        //   delta 1/64      -> up to 1/7          -> profile 42
        //   delta 1/128     -> up to 1/10         -> profile 90
        let d = DiscreteSet::new((1..=50).map(|i| Rational::of(1, i)).collect()).unwrap();
        let eps = Rational::one();
        let table = closedize(&d, &eps, &default_schedule(&eps)).unwrap();
        assert_eq!(table.len(), 20);
        let profiles: Vec<&Rational> = table.iter().map(|(_, g)| g).collect();
        let expect = ["1", "1", "2", "6", "20", "42", "90"];
        for (i, want) in expect.iter().enumerate() {
            assert_eq!(profiles[i], &r(want), "profile at step {i}");
        }
        for w in profiles.windows(2) {
            assert!(w[0] <= w[1], "profile decreased: {} then {}", w[0], w[1]);
        }
    }

    #[test]
    fn closedize_validates_schedule() {
        let d = set(&["1", "3"]);
        let eps = r("1/2");
        assert!(closedize(&d, &eps, &[r("1/4"), r("1/4")]).is_err());
        assert!(closedize(&d, &eps, &[r("1/2")]).is_err());
        assert!(closedize(&d, &eps, &[r("3/4")]).is_err());
        assert!(closedize(&d, &r("0"), &[]).is_err());
        assert!(closedize(&d, &eps, &[]).unwrap().is_empty());
        let ok = closedize(&d, &eps, &[r("1/4"), r("1/8")]).unwrap();
        assert_eq!(ok.len(), 2);
    }
}
