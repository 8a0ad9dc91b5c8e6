//! Anchored encoding of a positive discrete set into a single coded set.
//!
//! Each anchor `a` captures the elements below it that are isolated at
//! radius `1/a`, and codes a captured element `e` as `a + e/a`, which lands
//! strictly inside `(a, a+1)`. With anchors spaced at least one apart those
//! code intervals are disjoint, so the coded value determines its anchor by
//! "largest anchor below", and `a * (x - a)` recovers `e` exactly. The full
//! coded set also carries the negated anchors, so the anchor list itself is
//! recoverable from the coded set alone.

use std::collections::BTreeMap;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::normalize::{isolate, space_out};
use crate::rational::Rational;
use crate::set::DiscreteSet;

/// Elements of `d` below `a` that are isolated at radius `1/a`.
pub fn capture(d: &DiscreteSet, a: &Rational) -> Result<DiscreteSet> {
    if !a.is_positive() {
        return Err(Error::Precondition("anchors must be positive".into()));
    }
    let radius = a.invert().expect("positive anchor");
    let core = isolate(d, &radius)?;
    let kept = core
        .iter()
        .filter(|e| *e < a)
        .cloned()
        .collect();
    DiscreteSet::new(kept)
}

fn captured_union(d: &DiscreteSet, anchors: &DiscreteSet) -> Result<DiscreteSet> {
    let mut all = Vec::new();
    for a in anchors {
        all.extend(capture(d, a)?.elements().iter().cloned());
    }
    Ok(DiscreteSet::from_dedup(all))
}

/// Largest anchor strictly below `x`, or zero when there is none.
/// Ties fall through: when `x` is itself an anchor it does not count
/// as being below itself.
pub fn anchor_below(anchors: &DiscreteSet, x: &Rational) -> Rational {
    anchors
        .largest_below(x)
        .cloned()
        .unwrap_or_else(Rational::zero)
}

/// Picks an anchor set for `d`: the spread image of `d` itself, extended
/// with successive integers until every element is captured by some anchor.
/// An anchor above both `max d` and the inverse of the minimum gap captures
/// everything, so at most one integer past that bound is ever needed.
pub fn choose_anchors(d: &DiscreteSet) -> Result<DiscreteSet> {
    if d.is_empty() {
        return Err(Error::Precondition(
            "anchor selection needs a nonempty set".into(),
        ));
    }
    if !d.all_positive() {
        return Err(Error::Precondition(
            "anchor selection requires a positive set; shift it positive first".into(),
        ));
    }
    let mut anchors = space_out(d)?.set.elements().to_vec();
    if captured_union(d, &DiscreteSet::new(anchors.clone())?)?.len() == d.len() {
        return DiscreteSet::new(anchors);
    }
    let mut bound = d.max().expect("nonempty").clone();
    if let Ok(gap) = d.min_gap() {
        let inv = gap.invert().expect("positive gap");
        if inv > bound {
            bound = inv;
        }
    }
    if let Some(last) = anchors.last() {
        if *last > bound {
            bound = last.clone();
        }
    }
    let mut next = Rational::from(bound.ceil_int()) + Rational::one();
    loop {
        anchors.push(next.clone());
        let candidate = DiscreteSet::new(anchors.clone())?;
        if captured_union(d, &candidate)?.len() == d.len() {
            return Ok(candidate);
        }
        next = next + Rational::one();
    }
}

/// A completed encoding: the source set, its anchors, the positive code
/// values, the full coded set, and the per-anchor capture record.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Encoding {
    d: DiscreteSet,
    anchors: DiscreteSet,
    payload: DiscreteSet,
    coded: DiscreteSet,
    capture: Vec<(Rational, Vec<Rational>)>,
}

fn capture_map(capture: &[(Rational, Vec<Rational>)]) -> BTreeMap<String, Vec<Rational>> {
    capture
        .iter()
        .map(|(a, c)| (a.to_string(), c.clone()))
        .collect()
}

/// Encodes `d` against an explicit anchor set. Anchors must be positive,
/// pairwise at least one apart, and must jointly capture every element.
pub fn encode_with_anchors(d: &DiscreteSet, anchors: &DiscreteSet) -> Result<Encoding> {
    if !d.all_positive() {
        return Err(Error::Precondition(
            "encoding requires a positive set; shift it positive first".into(),
        ));
    }
    if anchors.is_empty() {
        return Err(Error::Validation("need at least one anchor".into()));
    }
    if !anchors.all_positive() {
        return Err(Error::Precondition("anchors must be positive".into()));
    }
    if let Ok(gap) = anchors.min_gap() {
        if gap < Rational::one() {
            return Err(Error::Validation(format!(
                "anchor gap {gap} is below one; codes would overlap"
            )));
        }
    }
    let mut capture_record = Vec::with_capacity(anchors.len());
    let mut payload = Vec::new();
    let mut covered = Vec::new();
    for a in anchors {
        let captured = capture(d, a)?;
        for e in &captured {
            payload.push(a + &(e / a));
            covered.push(e.clone());
        }
        capture_record.push((a.clone(), captured.elements().to_vec()));
    }
    if DiscreteSet::from_dedup(covered).len() != d.len() {
        return Err(Error::Validation(
            "anchors do not capture every element".into(),
        ));
    }
    let payload = DiscreteSet::from_dedup(payload);
    let mut coded = payload.elements().to_vec();
    coded.extend(anchors.iter().map(|a| -a));
    let coded = DiscreteSet::new(coded)?;
    Ok(Encoding {
        d: d.clone(),
        anchors: anchors.clone(),
        payload,
        coded,
        capture: capture_record,
    })
}

/// Encodes `d` against automatically chosen anchors. An empty set carries
/// no capture information, so it is coded by a single anchor whose negation
/// is the entire coded set.
pub fn encode(d: &DiscreteSet) -> Result<Encoding> {
    let anchors = if d.is_empty() {
        DiscreteSet::new(vec![Rational::one()])?
    } else {
        choose_anchors(d)?
    };
    encode_with_anchors(d, &anchors)
}

impl Encoding {
    pub fn source(&self) -> &DiscreteSet {
        &self.d
    }

    pub fn anchors(&self) -> &DiscreteSet {
        &self.anchors
    }

    pub fn payload(&self) -> &DiscreteSet {
        &self.payload
    }

    pub fn coded(&self) -> &DiscreteSet {
        &self.coded
    }

    pub fn capture_record(&self) -> &[(Rational, Vec<Rational>)] {
        &self.capture
    }

    /// Largest anchor strictly below `x`, or zero when there is none.
    pub fn anchor_below(&self, x: &Rational) -> Rational {
        anchor_below(&self.anchors, x)
    }

    /// Decodes one coded value. Positive codes recover their captured
    /// element through the anchor below; negated anchors decode to the
    /// minimum of the source set.
    pub fn decode(&self, x: &Rational) -> Result<Rational> {
        if !self.coded.contains(x) {
            return Err(Error::Domain(format!("{x} is not in the coded set")));
        }
        if x.is_negative() {
            return self.d.min().cloned().ok_or_else(|| {
                Error::Domain("coded set of an empty source has no decode value".into())
            });
        }
        let h = self.anchor_below(x);
        Ok(&h * &(x - &h))
    }

    /// Decodes every coded value; equals the source set whenever it is
    /// nonempty, which the round-trip tests pin down.
    pub fn decoded_image(&self) -> Result<DiscreteSet> {
        let mut out = Vec::with_capacity(self.coded.len());
        for x in &self.coded {
            out.push(self.decode(x)?);
        }
        Ok(DiscreteSet::from_dedup(out))
    }
}

impl Serialize for Encoding {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = serializer.serialize_struct("Encoding", 5)?;
        st.serialize_field("D", &self.d)?;
        st.serialize_field("A", &self.anchors)?;
        st.serialize_field("F", &self.payload)?;
        st.serialize_field("E", &self.coded)?;
        st.serialize_field("capture", &capture_map(&self.capture))?;
        st.end()
    }
}

impl<'de> Deserialize<'de> for Encoding {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Shadow {
            #[serde(rename = "D")]
            d: DiscreteSet,
            #[serde(rename = "A")]
            anchors: DiscreteSet,
            #[serde(rename = "F")]
            payload: DiscreteSet,
            #[serde(rename = "E")]
            coded: DiscreteSet,
            capture: BTreeMap<String, Vec<Rational>>,
        }
        let s = Shadow::deserialize(deserializer)?;
        let rebuilt = encode_with_anchors(&s.d, &s.anchors).map_err(D::Error::custom)?;
        if rebuilt.payload != s.payload
            || rebuilt.coded != s.coded
            || capture_map(&rebuilt.capture) != s.capture
        {
            return Err(D::Error::custom(
                "encoding artifact is inconsistent with its source set and anchors",
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
    fn capture_needs_room_and_isolation() {
        let d = set(&["1/2", "3/4"]);
        assert!(capture(&d, &r("2")).unwrap().is_empty());
        assert_eq!(
            capture(&d, &r("5")).unwrap().elements(),
            &[r("1/2"), r("3/4")]
        );
        assert!(capture(&set(&["10"]), &r("5")).unwrap().is_empty());
        assert!(capture(&d, &r("0")).is_err());
    }

    #[test]
    fn anchor_choice_matches_hand_computation() {
        assert_eq!(
            choose_anchors(&set(&["1/2", "3/4"])).unwrap().elements(),
            &[r("1/2"), r("3"), r("5")]
        );
        assert_eq!(
            choose_anchors(&set(&["1", "2", "3"])).unwrap().elements(),
            &[r("1"), r("2"), r("3"), r("4")]
        );
        assert_eq!(
            choose_anchors(&set(&["5"])).unwrap().elements(),
            &[r("5"), r("6")]
        );
        // Here the spread image alone already captures everything.
        assert_eq!(
            choose_anchors(&set(&["1", "3/2"])).unwrap().elements(),
            &[r("1"), r("3")]
        );
        assert!(choose_anchors(&DiscreteSet::empty()).is_err());
        assert!(choose_anchors(&set(&["-1", "2"])).is_err());
    }

    #[test]
    fn explicit_anchor_encoding_matches_hand_computation() {
        let enc = encode_with_anchors(&set(&["1/2", "3/4"]), &set(&["2", "5"])).unwrap();
        assert_eq!(enc.payload().elements(), &[r("51/10"), r("103/20")]);
        assert_eq!(
            enc.coded().elements(),
            &[r("-5"), r("-2"), r("51/10"), r("103/20")]
        );
        assert_eq!(
            enc.capture_record(),
            &[
                (r("2"), vec![]),
                (r("5"), vec![r("1/2"), r("3/4")]),
            ]
        );

        let enc = encode_with_anchors(&set(&["1"]), &set(&["2"])).unwrap();
        assert_eq!(enc.coded().elements(), &[r("-2"), r("5/2")]);
    }

    #[test]
    fn anchor_below_is_strict_with_zero_default() {
        let anchors = set(&["2", "5"]);
        assert_eq!(anchor_below(&anchors, &r("51/10")), r("5"));
        assert_eq!(anchor_below(&anchors, &r("1")), r("0"));
        assert_eq!(anchor_below(&anchors, &r("2")), r("0"));

        let enc = encode_with_anchors(&set(&["1/2", "3/4"]), &anchors).unwrap();
        assert_eq!(enc.anchor_below(&r("51/10")), r("5"));
        assert_eq!(enc.anchor_below(&r("2")), r("0"));
    }

    #[test]
    fn decoding_recovers_elements_and_defaults() {
        let d = set(&["1/2", "3/4"]);
        let enc = encode_with_anchors(&d, &set(&["2", "5"])).unwrap();
        assert_eq!(enc.decode(&r("51/10")).unwrap(), r("1/2"));
        assert_eq!(enc.decode(&r("103/20")).unwrap(), r("3/4"));
        assert_eq!(enc.decode(&r("-2")).unwrap(), r("1/2"));
        assert_eq!(enc.decode(&r("-5")).unwrap(), r("1/2"));
        assert!(enc.decode(&r("7")).is_err());
        assert_eq!(enc.decoded_image().unwrap(), d);
    }

    #[test]
    fn automatic_encoding_round_trips() {
        for items in [
            vec!["1/2", "3/4"],
            vec!["1", "2", "3"],
            vec!["5"],
            vec!["1/10", "1/5", "7/2", "4"],
            vec!["1/7", "2/7", "3/7", "50"],
        ] {
            let d = set(&items);
            let enc = encode(&d).unwrap();
            assert_eq!(enc.decoded_image().unwrap(), d, "round trip for {items:?}");
        }
        let empty = encode(&DiscreteSet::empty()).unwrap();
        assert_eq!(empty.coded().elements(), &[r("-1")]);
        assert!(empty.decode(&r("-1")).is_err());
    }

    #[test]
    fn encoding_validations_fire() {
        let d = set(&["1/2", "3/4"]);
        assert!(encode_with_anchors(&set(&["-1"]), &set(&["2"])).is_err());
        assert!(encode_with_anchors(&d, &DiscreteSet::empty()).is_err());
        assert!(encode_with_anchors(&d, &set(&["-2", "5"])).is_err());
        assert!(encode_with_anchors(&d, &set(&["2", "5/2"])).is_err());
        let err = encode_with_anchors(&d, &set(&["2"])).unwrap_err();
        assert!(err.to_string().contains("capture"));
    }

    #[test]
    fn serde_validates_consistency() {
        let enc = encode(&set(&["1/2", "3/4"])).unwrap();
        let json = serde_json::to_string(&enc).unwrap();
        let back: Encoding = serde_json::from_str(&json).unwrap();
        assert_eq!(back, enc);

        let tampered = json.replace("51/10", "41/10");
        assert!(serde_json::from_str::<Encoding>(&tampered).is_err());
    }
}
