//! Ruler structure and the schedule-bounded witness test.
//!
//! A fiber family slices a set into windows, rebasing each slice to its
//! window and dividing by a unit; a slice whose consecutive gaps all sit
//! within a tolerance of one is a ruler. The witness test asks, for every
//! tolerance in a decreasing schedule, for some fiber that is a ruler and
//! whose rebased values meet the open band around a target; the chosen
//! parameter is recorded per tolerance, so the verdict is reproducible.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize};

use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::set::DiscreteSet;

/// True when every consecutive gap lies in `[1 - eps, 1 + eps]`. Sets with
/// fewer than two elements qualify vacuously. The tolerance must sit in
/// `(0, 1/2)` so the two tolerance bands cannot meet.
pub fn is_ruler(d: &DiscreteSet, eps: &Rational) -> Result<bool> {
    if !eps.is_positive() || *eps >= Rational::of(1, 2) {
        return Err(Error::Precondition(format!(
            "ruler tolerance must lie in (0, 1/2), got {eps}"
        )));
    }
    let lo = Rational::one() - eps;
    let hi = Rational::one() + eps;
    Ok(d.gaps().all(|g| g >= lo && g <= hi))
}

/// Shifts a nonempty fiber so its minimum is zero.
pub fn normalize_ruler(d: &DiscreteSet) -> Result<DiscreteSet> {
    let min = d
        .min()
        .cloned()
        .ok_or_else(|| Error::Precondition("cannot normalize an empty fiber".into()))?;
    Ok(DiscreteSet::new(d.iter().map(|x| x - &min).collect())
        .expect("shift preserves distinctness"))
}

/// One fiber parameter: the window ends and the scaling unit.
pub type RulerParameter = (Rational, Rational, Rational);

/// A parametric family of fibers. For parameter `(lo, hi, unit)` the fiber
/// holds the source elements strictly inside `(lo, hi)`, rebased to `lo`
/// and divided by the unit. Fibers are always nonempty; windows that catch
/// nothing are recorded separately as dropped.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RulerFamily {
    parameters: Vec<RulerParameter>,
    fibers: Vec<DiscreteSet>,
    #[serde(skip)]
    dropped: Vec<(Rational, Rational)>,
}

impl RulerFamily {
    pub fn parameters(&self) -> &[RulerParameter] {
        &self.parameters
    }

    pub fn fibers(&self) -> &[DiscreteSet] {
        &self.fibers
    }

    /// Windows that held no interior point and therefore produced no fiber.
    pub fn dropped(&self) -> &[(Rational, Rational)] {
        &self.dropped
    }

    pub fn len(&self) -> usize {
        self.parameters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parameters.is_empty()
    }
}

impl<'de> Deserialize<'de> for RulerFamily {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Shadow {
            parameters: Vec<RulerParameter>,
            fibers: Vec<DiscreteSet>,
        }
        let s = Shadow::deserialize(deserializer)?;
        if s.parameters.len() != s.fibers.len() {
            return Err(D::Error::custom(
                "parameters and fibers must run in parallel",
            ));
        }
        if s.fibers.iter().any(|f| f.is_empty()) {
            return Err(D::Error::custom("fibers must be nonempty"));
        }
        Ok(RulerFamily {
            parameters: s.parameters,
            fibers: s.fibers,
            dropped: Vec::new(),
        })
    }
}

/// Slices `d` (reflected first when `negate` is set) into fibers over the
/// given windows, dividing rebased values by the unit. Windows that catch
/// nothing are reported as dropped rather than producing empty fibers.
pub fn gap_family(
    d: &DiscreteSet,
    windows: &[(Rational, Rational)],
    unit: &Rational,
    negate: bool,
) -> Result<RulerFamily> {
    if !unit.is_positive() {
        return Err(Error::Precondition("unit must be positive".into()));
    }
    let source = if negate { d.negated() } else { d.clone() };
    let inv = unit.invert().expect("positive unit");
    let mut parameters = Vec::new();
    let mut fibers = Vec::new();
    let mut dropped = Vec::new();
    for (lo, hi) in windows {
        if lo >= hi {
            return Err(Error::Validation(format!("window ({lo}, {hi}) is empty")));
        }
        let inside = source.strictly_between(lo, hi);
        if inside.is_empty() {
            dropped.push((lo.clone(), hi.clone()));
            continue;
        }
        let fiber = DiscreteSet::new(inside.iter().map(|x| (x - lo) * &inv).collect())
            .expect("affine image of distinct values");
        parameters.push((lo.clone(), hi.clone(), unit.clone()));
        fibers.push(fiber);
    }
    Ok(RulerFamily {
        parameters,
        fibers,
        dropped,
    })
}

/// Outcome at a single tolerance: the parameter of the first fiber that was
/// a ruler and met the band around the target, with the met value, or
/// nothing when no fiber qualified.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EpsWitness {
    pub eps: Rational,
    pub parameter: Option<RulerParameter>,
    pub element: Option<Rational>,
}

/// Result of the witness test over a whole schedule.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WTestReport {
    pub holds: bool,
    pub witnesses: Vec<EpsWitness>,
}

/// For every tolerance in the schedule, searches the family in declared
/// order for a fiber that is a ruler at that tolerance and whose rebased
/// values meet the open band around `c`. The report holds only if every
/// tolerance finds such a fiber; an empty schedule holds vacuously. Every
/// schedule entry must lie in `(0, 1/2)`.
pub fn w_test(family: &RulerFamily, c: &Rational, schedule: &[Rational]) -> Result<WTestReport> {
    let half = Rational::of(1, 2);
    for eps in schedule {
        if !eps.is_positive() || *eps >= half {
            return Err(Error::Precondition(format!(
                "schedule tolerance must lie in (0, 1/2), got {eps}"
            )));
        }
    }
    let normalized: Vec<DiscreteSet> = family
        .fibers
        .iter()
        .map(normalize_ruler)
        .collect::<Result<_>>()?;
    let mut witnesses = Vec::with_capacity(schedule.len());
    let mut holds = true;
    for eps in schedule {
        let lo = c - eps;
        let hi = c + eps;
        let mut found = None;
        for (i, fiber) in family.fibers.iter().enumerate() {
            if !is_ruler(fiber, eps)? {
                continue;
            }
            if let Some(element) = normalized[i].strictly_between(&lo, &hi).first() {
                found = Some((family.parameters[i].clone(), element.clone()));
                break;
            }
        }
        holds &= found.is_some();
        let (parameter, element) = match found {
            Some((p, e)) => (Some(p), Some(e)),
            None => (None, None),
        };
        witnesses.push(EpsWitness {
            eps: eps.clone(),
            parameter,
            element,
        });
    }
    Ok(WTestReport { holds, witnesses })
}

/// Sliding windows whose ends are set elements `span` apart in index:
/// `(d_i, d_{i+span})` for every valid `i`.
pub fn index_windows(d: &DiscreteSet, span: usize) -> Result<Vec<(Rational, Rational)>> {
    if span == 0 {
        return Err(Error::Precondition(
            "window span must be at least one".into(),
        ));
    }
    let elems = d.elements();
    if elems.len() <= span {
        return Ok(Vec::new());
    }
    Ok((0..elems.len() - span)
        .map(|i| (elems[i].clone(), elems[i + span].clone()))
        .collect())
}

/// The exact arithmetic set `{unit, 2*unit, ..., count*unit}`.
pub fn arithmetic_set(unit: &Rational, count: usize) -> Result<DiscreteSet> {
    if !unit.is_positive() {
        return Err(Error::Precondition("unit must be positive".into()));
    }
    DiscreteSet::new((1..=count).map(|i| unit * &Rational::from(i)).collect())
}

/// An arithmetic set with a deterministic seeded perturbation: the i-th
/// element moves by at most `unit / (8 i^2)`, so displacements shrink
/// quadratically and consecutive gaps stay within a quarter unit of the
/// unit itself.
pub fn perturbed_arithmetic_set(unit: &Rational, count: usize, seed: u64) -> Result<DiscreteSet> {
    if !unit.is_positive() {
        return Err(Error::Precondition("unit must be positive".into()));
    }
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let scale_den = Rational::from(1u64 << 16);
    let mut elements = Vec::with_capacity(count);
    for i in 1..=count {
        let k: i64 = rng.gen_range(-65536..=65536);
        let bound = Rational::from(8usize) * Rational::from(i) * Rational::from(i);
        let delta = unit * &Rational::from(k) / (&scale_den * &bound);
        elements.push(unit * &Rational::from(i) + delta);
    }
    DiscreteSet::new(elements)
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
    fn ruler_checks_gap_band() {
        assert!(is_ruler(&set(&["1", "2", "3"]), &r("1/10")).unwrap());
        assert!(!is_ruler(&set(&["1", "5/2"]), &r("1/10")).unwrap());
        assert!(is_ruler(&set(&["1", "2", "31/10"]), &r("1/10")).unwrap());
        assert!(is_ruler(&set(&["5"]), &r("1/10")).unwrap());
        assert!(is_ruler(&DiscreteSet::empty(), &r("1/10")).unwrap());
        assert!(is_ruler(&set(&["1"]), &r("1/2")).is_err());
        assert!(is_ruler(&set(&["1"]), &r("0")).is_err());
    }

    #[test]
    fn normalization_rebases_to_zero() {
        assert_eq!(
            normalize_ruler(&set(&["51/10", "61/10", "36/5"]))
                .unwrap()
                .elements(),
            &[r("0"), r("1"), r("21/10")]
        );
        assert_eq!(normalize_ruler(&set(&["1"])).unwrap().elements(), &[r("0")]);
        assert!(normalize_ruler(&DiscreteSet::empty()).is_err());
    }

    fn arithmetic_family() -> RulerFamily {
        let d = DiscreteSet::new((1..=20).map(|i| Rational::of(3 * i, 2)).collect()).unwrap();
        gap_family(&d, &[(r("3/2"), r("30"))], &r("3/2"), false).unwrap()
    }

    #[test]
    fn witness_test_matches_hand_computation() {
        let family = arithmetic_family();
        assert_eq!(family.fibers()[0].len(), 18);
        let schedule = [r("1/4"), r("1/8"), r("1/16")];

        let hit = w_test(&family, &r("4"), &schedule).unwrap();
        assert!(hit.holds);
        for w in &hit.witnesses {
            assert_eq!(w.parameter, Some((r("3/2"), r("30"), r("3/2"))));
            assert_eq!(w.element, Some(r("4")));
        }

        let miss = w_test(&family, &r("7/2"), &schedule).unwrap();
        assert!(!miss.holds);
        assert!(miss.witnesses.iter().all(|w| w.parameter.is_none()));

        let vacuous = w_test(&family, &r("7/2"), &[]).unwrap();
        assert!(vacuous.holds);
        assert!(vacuous.witnesses.is_empty());

        assert!(w_test(&family, &r("4"), &[r("1/2")]).is_err());
        assert!(w_test(&family, &r("4"), &[r("0")]).is_err());
    }

    #[test]
    fn witness_test_requires_ruler_structure() {
        // The single fiber has gaps 1 and 3, far outside every band.
        let d = set(&["1", "2", "5"]);
        let family = gap_family(&d, &[(r("0"), r("6"))], &r("1"), false).unwrap();
        let report = w_test(&family, &r("1"), &[r("1/10")]).unwrap();
        assert!(!report.holds);
        assert!(report.witnesses[0].parameter.is_none());
        assert!(report.witnesses[0].element.is_none());
    }

    #[test]
    fn gap_family_fibers_match_hand_computation() {
        let d = set(&["5", "7", "9", "11"]);
        let fam = gap_family(&d, &[(r("5"), r("11"))], &r("2"), false).unwrap();
        assert_eq!(fam.parameters(), &[(r("5"), r("11"), r("2"))]);
        assert_eq!(fam.fibers()[0].elements(), &[r("1"), r("2")]);
        assert!(fam.dropped().is_empty());

        let fam = gap_family(
            &d,
            &[(r("20"), r("30")), (r("5"), r("11"))],
            &r("2"),
            false,
        )
        .unwrap();
        assert_eq!(fam.len(), 1);
        assert_eq!(fam.dropped(), &[(r("20"), r("30"))]);

        let neg = set(&["-11", "-9", "-7", "-5"]);
        let fam = gap_family(&neg, &[(r("5"), r("11"))], &r("2"), true).unwrap();
        assert_eq!(fam.fibers()[0].elements(), &[r("1"), r("2")]);

        assert!(gap_family(&d, &[(r("3"), r("3"))], &r("2"), false).is_err());
        assert!(gap_family(&d, &[(r("5"), r("11"))], &r("0"), false).is_err());
    }

    #[test]
    fn family_serde_validates_shape() {
        let fam = arithmetic_family();
        let json = serde_json::to_string(&fam).unwrap();
        let back: RulerFamily = serde_json::from_str(&json).unwrap();
        assert_eq!(back, fam);

        let mismatched = r#"{"parameters": [], "fibers": [["1"]]}"#;
        assert!(serde_json::from_str::<RulerFamily>(mismatched).is_err());
        let empty_fiber = r#"{"parameters": [["0", "1", "1"]], "fibers": [[]]}"#;
        assert!(serde_json::from_str::<RulerFamily>(empty_fiber).is_err());
    }

    #[test]
    fn index_windows_slide_by_element() {
        let d = set(&["1", "2", "4", "8"]);
        assert_eq!(
            index_windows(&d, 2).unwrap(),
            vec![(r("1"), r("4")), (r("2"), r("8"))]
        );
        assert_eq!(index_windows(&d, 3).unwrap(), vec![(r("1"), r("8"))]);
        assert!(index_windows(&d, 4).unwrap().is_empty());
        assert!(index_windows(&d, 0).is_err());
    }

    #[test]
    fn arithmetic_sets_are_exact_multiples() {
        let a = arithmetic_set(&r("3/2"), 4).unwrap();
        assert_eq!(a.elements(), &[r("3/2"), r("3"), r("9/2"), r("6")]);
        assert!(arithmetic_set(&r("3/2"), 0).unwrap().is_empty());
        assert!(arithmetic_set(&r("0"), 3).is_err());
    }

    #[test]
    fn perturbed_sets_stay_near_the_grid_and_are_deterministic() {
        let unit = r("3/2");
        let a = perturbed_arithmetic_set(&unit, 30, 7).unwrap();
        let b = perturbed_arithmetic_set(&unit, 30, 7).unwrap();
        assert_eq!(a, b);
        let c = perturbed_arithmetic_set(&unit, 30, 8).unwrap();
        assert_ne!(a, c);
        for (i, x) in a.iter().enumerate() {
            let i = i + 1;
            let center = &unit * &Rational::from(i);
            let bound = &unit / &(Rational::from(8usize) * Rational::from(i * i));
            let dist = (x - &center).abs();
            assert!(dist <= bound, "element {i} drifted {dist} > {bound}");
        }
    }
}
