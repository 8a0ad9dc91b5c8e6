//! Nested-interval ladders over a tagged function.
//!
//! A ladder is an increasing sequence of points whose value intervals
//! `(f(d)(1 + d^-2/(k + 1/k)), f(d)(1 + d^-2/k))` nest strictly downward,
//! every upper end stays below 2, consecutive points grow past the 49th
//! power of their predecessor, and no intermediate point's value band may
//! straddle a ladder value. The greedy search, the planted generators, and
//! the verifier are deliberately independent of each other: the verifier
//! recomputes every inequality from scratch and names each failure.

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize};

use crate::error::{Error, Result};
use crate::func::TaggedFunction;
use crate::rational::Rational;
use crate::set::DiscreteSet;

/// Lower end of the nesting interval at index `k`:
/// `f * (1 + d^-2 / (k + 1/k))`.
pub fn nest_low(f: &Rational, d: &Rational, k: usize) -> Rational {
    let k = Rational::from(k);
    let kk1 = &(&k * &k) + &Rational::one();
    let dd = d * d;
    let base = &kk1 * &dd;
    f * &(&(&base + &k) / &base)
}

/// Upper end of the nesting interval at index `k`: `f * (1 + d^-2 / k)`.
pub fn nest_high(f: &Rational, d: &Rational, k: usize) -> Rational {
    let k = Rational::from(k);
    let base = &k * &(d * d);
    f * &(&(&base + &Rational::one()) / &base)
}

/// An increasing point sequence paired with its function values.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Ladder {
    #[serde(rename = "ladder")]
    points: Vec<Rational>,
    f_values: Vec<Rational>,
}

impl Ladder {
    /// Builds a ladder after checking the structural shape: at least one
    /// point, strictly increasing points, one value per point. The
    /// mathematical conditions are the verifier's business.
    pub fn new(points: Vec<Rational>, f_values: Vec<Rational>) -> Result<Ladder> {
        if points.is_empty() {
            return Err(Error::Validation("a ladder needs at least one point".into()));
        }
        if points.len() != f_values.len() {
            return Err(Error::Validation(format!(
                "ladder has {} points but {} values",
                points.len(),
                f_values.len()
            )));
        }
        if points.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Validation(
                "ladder points must be strictly increasing".into(),
            ));
        }
        Ok(Ladder { points, f_values })
    }

    pub fn points(&self) -> &[Rational] {
        &self.points
    }

    pub fn f_values(&self) -> &[Rational] {
        &self.f_values
    }

    pub fn depth(&self) -> usize {
        self.points.len()
    }

    /// The nesting interval at one-based index `k`, computed from the
    /// ladder's own listed value.
    pub fn nest_interval(&self, k: usize) -> Result<(Rational, Rational)> {
        if k == 0 || k > self.depth() {
            return Err(Error::Precondition(format!(
                "ladder index {k} is outside 1..={}",
                self.depth()
            )));
        }
        let d = &self.points[k - 1];
        let f = &self.f_values[k - 1];
        Ok((nest_low(f, d, k), nest_high(f, d, k)))
    }
}

impl<'de> Deserialize<'de> for Ladder {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Shadow {
            #[serde(rename = "ladder")]
            points: Vec<Rational>,
            f_values: Vec<Rational>,
        }
        let s = Shadow::deserialize(deserializer)?;
        Ladder::new(s.points, s.f_values).map_err(D::Error::custom)
    }
}

/// One failed ladder condition. Indices are one-based; messages name the
/// inequality rather than printing the full bignum values, which can run to
/// tens of thousands of digits on planted instances.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    /// A ladder point is missing from the ambient set.
    PointNotInDomain { index: usize },
    /// The ladder's listed value disagrees with the function.
    ValueMismatch { index: usize },
    /// A listed value leaves the open unit band above one.
    ValueOutOfRange { index: usize },
    /// The interval top at this index reaches 2.
    UpperBound { index: usize },
    /// Lower interval ends fail to increase between two indices.
    LowOrder { lower: usize, upper: usize },
    /// Upper interval ends fail to decrease between two indices.
    HighOrder { lower: usize, upper: usize },
    /// A point does not exceed the 49th power of its predecessor.
    Growth { index: usize },
    /// An intermediate point's value band straddles the ladder value.
    Separation { index: usize, point: Rational },
}

impl std::fmt::Display for Violation {
    fn fmt(&self, out: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Violation::PointNotInDomain { index } => {
                write!(out, "d_{index} is not an element of the set")
            }
            Violation::ValueMismatch { index } => {
                write!(out, "listed value at d_{index} disagrees with the function")
            }
            Violation::ValueOutOfRange { index } => {
                write!(out, "f(d_{index}) is not strictly between 1 and 2")
            }
            Violation::UpperBound { index } => {
                write!(
                    out,
                    "f(d_{index})(1 + d_{index}^-2/{index}) is not below 2"
                )
            }
            Violation::LowOrder { lower, upper } => write!(
                out,
                "f(d_{lower})(1 + d_{lower}^-2/({lower} + 1/{lower})) is not below \
                 f(d_{upper})(1 + d_{upper}^-2/({upper} + 1/{upper}))"
            ),
            Violation::HighOrder { lower, upper } => write!(
                out,
                "f(d_{upper})(1 + d_{upper}^-2/{upper}) is not below \
                 f(d_{lower})(1 + d_{lower}^-2/{lower})"
            ),
            Violation::Growth { index } => {
                let prev = index - 1;
                write!(out, "d_{index} does not strictly exceed d_{prev}^49")
            }
            Violation::Separation { index, point } => write!(
                out,
                "at e = {point} below d_{index}: neither f(e)(1 + e^-2) < f(d_{index}) \
                 nor f(e) > f(d_{index})(1 + d_{index}^-2)"
            ),
        }
    }
}

/// Verification outcome: empty means every condition held.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LadderReport {
    pub violations: Vec<Violation>,
}

impl LadderReport {
    pub fn valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks every ladder condition exactly, over all index pairs and all
/// intermediate points, collecting violations instead of stopping at the
/// first. The ladder's own listed values drive the interval arithmetic, so
/// a value tampered with after construction is caught by the inequality it
/// breaks as well as by the mismatch against the function.
pub fn verify_ladder(d: &DiscreteSet, f: &TaggedFunction, ladder: &Ladder) -> Result<LadderReport> {
    let one = Rational::one();
    let two = Rational::from(2);
    let points = ladder.points();
    let values = ladder.f_values();
    let mut violations = Vec::new();

    for (i, (point, value)) in points.iter().zip(values).enumerate() {
        let index = i + 1;
        if !d.contains(point) {
            violations.push(Violation::PointNotInDomain { index });
        } else if f.value_at(point)? != value {
            violations.push(Violation::ValueMismatch { index });
        }
        if *value <= one || *value >= two {
            violations.push(Violation::ValueOutOfRange { index });
        }
        if nest_high(value, point, index) >= two {
            violations.push(Violation::UpperBound { index });
        }
    }

    for m in 1..=points.len() {
        let (lo_m, hi_m) = ladder.nest_interval(m)?;
        for n in (m + 1)..=points.len() {
            let (lo_n, hi_n) = ladder.nest_interval(n)?;
            if lo_m >= lo_n {
                violations.push(Violation::LowOrder { lower: m, upper: n });
            }
            if hi_n >= hi_m {
                violations.push(Violation::HighOrder { lower: m, upper: n });
            }
        }
    }

    for n in 2..=points.len() {
        let prev = &points[n - 2];
        if points[n - 1] <= prev.pow(49)? {
            violations.push(Violation::Growth { index: n });
        }
    }

    let first = &points[0];
    for n in 2..=points.len() {
        let band_lo = points[n - 2].pow(7)?;
        if *first > band_lo {
            continue;
        }
        let value = &values[n - 1];
        let top = value * &(&(&(&points[n - 1] * &points[n - 1]) + &one)
            / &(&points[n - 1] * &points[n - 1]));
        for e in d.strictly_between(&band_lo, &points[n - 1]) {
            let fe = f.value_at(e)?;
            let e_top = fe * &(&(&(e * e) + &one) / &(e * e));
            if !(e_top < *value || *fe > top) {
                violations.push(Violation::Separation {
                    index: n,
                    point: e.clone(),
                });
            }
        }
    }

    Ok(LadderReport { violations })
}

fn check_range(d: &DiscreteSet, f: &TaggedFunction) -> Result<()> {
    let one = Rational::one();
    let two = Rational::from(2);
    for x in d {
        let v = f.value_at(x)?;
        if *v <= one || *v >= two {
            return Err(Error::Precondition(format!(
                "function value {v} at {x} is not strictly between 1 and 2"
            )));
        }
    }
    Ok(())
}

fn separated(d: &DiscreteSet, f: &TaggedFunction, first: &Rational, prev: &Rational, candidate: &Rational, value: &Rational) -> Result<bool> {
    let one = Rational::one();
    let band_lo = prev.pow(7)?;
    if *first > band_lo {
        return Ok(true);
    }
    let top = value * &(&(&(candidate * candidate) + &one) / &(candidate * candidate));
    for e in d.strictly_between(&band_lo, candidate) {
        let fe = f.value_at(e)?;
        let e_top = fe * &(&(&(e * e) + &one) / &(e * e));
        if !(e_top < *value || *fe > top) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Greedy first-accept search: the first point whose interval top stays
/// below 2 starts the ladder, and each later rung is the first point past
/// the 49th power of its predecessor whose interval nests strictly inside
/// the previous one and whose band is clear of intermediate points.
/// Requires every function value strictly between 1 and 2.
pub fn build_ladder(d: &DiscreteSet, f: &TaggedFunction, depth: usize) -> Result<Ladder> {
    if depth == 0 {
        return Err(Error::Precondition("ladder depth must be at least one".into()));
    }
    check_range(d, f)?;
    let two = Rational::from(2);
    let mut points: Vec<Rational> = Vec::with_capacity(depth);
    let mut values: Vec<Rational> = Vec::with_capacity(depth);
    for x in d {
        let v = f.value_at(x)?;
        if nest_high(v, x, 1) < two {
            points.push(x.clone());
            values.push(v.clone());
            break;
        }
    }
    while !points.is_empty() && points.len() < depth {
        let k = points.len() + 1;
        let prev = points.last().expect("nonempty").clone();
        let prev_value = values.last().expect("nonempty").clone();
        let lo_prev = nest_low(&prev_value, &prev, k - 1);
        let hi_prev = nest_high(&prev_value, &prev, k - 1);
        let floor = prev.pow(49)?;
        let mut found = false;
        for x in d.iter().filter(|x| **x > floor) {
            let v = f.value_at(x)?;
            if nest_low(v, x, k) <= lo_prev || nest_high(v, x, k) >= hi_prev {
                continue;
            }
            if !separated(d, f, &points[0], &prev, x, v)? {
                continue;
            }
            points.push(x.clone());
            values.push(v.clone());
            found = true;
            break;
        }
        if !found {
            break;
        }
    }
    if points.len() < depth {
        return Err(Error::InsufficientDensity {
            reached: points.len(),
            requested: depth,
        });
    }
    Ladder::new(points, values)
}

/// A synthesized instance: the set, the function on it, and the ladder the
/// construction guarantees.
#[derive(Clone, Debug)]
pub struct Planted {
    pub set: DiscreteSet,
    pub func: TaggedFunction,
    pub ladder: Ladder,
}

fn feasible_interval(
    low_prev: &Rational,
    high_prev: &Rational,
    d: &Rational,
    k: usize,
) -> (Rational, Rational) {
    let one = Rational::one();
    let kr = Rational::from(k);
    let kk1 = &(&kr * &kr) + &one;
    let dd = d * d;
    let low_base = &kk1 * &dd;
    let lower = low_prev * &(&low_base / &(&low_base + &kr));
    let high_base = &kr * &dd;
    let upper = high_prev * &(&high_base / &(&high_base + &one));
    (lower, upper)
}

fn plant_values(points: &[Rational], mut values: Vec<Rational>) -> Result<Vec<Rational>> {
    let two = Rational::from(2);
    for k in (values.len() + 1)..=points.len() {
        let prev_low = nest_low(&values[k - 2], &points[k - 2], k - 1);
        let prev_high = nest_high(&values[k - 2], &points[k - 2], k - 1);
        let mid = &(&prev_low + &prev_high) / &two;
        let d = &points[k - 1];
        let value = if nest_low(&mid, d, k) > prev_low && nest_high(&mid, d, k) < prev_high {
            mid
        } else {
            let (a, b) = feasible_interval(&prev_low, &prev_high, d, k);
            if a >= b {
                return Err(Error::Validation(format!(
                    "no value interval left to plant at depth {k}"
                )));
            }
            &(&a + &b) / &two
        };
        values.push(value);
    }
    Ok(values)
}

fn assemble_planted(points: Vec<Rational>, values: Vec<Rational>) -> Result<Planted> {
    let set = DiscreteSet::new(points.clone())?;
    let pairs = points.iter().cloned().zip(values.iter().cloned()).collect();
    let func = TaggedFunction::from_pairs(pairs)?;
    let ladder = Ladder::new(points, values)?;
    Ok(Planted { set, func, ladder })
}

/// Plants a power-of-two instance: points 2, 2^50, 2^2451, ... (each
/// exceeding the 49th power of its predecessor), the first two values
/// pinned to 3/2 and 7/4, and every later value the midpoint of its
/// predecessor's interval, nudged into the strictly feasible range if the
/// midpoint ever fell outside it. The points square with every condition
/// by construction; the verifier stays the oracle.
pub fn plant_ladder(depth: usize) -> Result<Planted> {
    if depth == 0 {
        return Err(Error::Precondition("planted depth must be at least one".into()));
    }
    let two = Rational::from(2);
    let mut points = vec![two.clone()];
    for _ in 1..depth {
        let prev = points.last().expect("nonempty");
        points.push(&prev.pow(49)? * &two);
    }
    let mut seeds = vec![Rational::of(3, 2)];
    if depth >= 2 {
        seeds.push(Rational::of(7, 4));
    }
    let values = plant_values(&points, seeds)?;
    assemble_planted(points, values)
}

/// Plants a dyadic instance that stays numerically small at any depth the
/// tests care to reach: points start just above one at precision 2^-40 and
/// each next point is the rounded-up 49th power of its predecessor, so
/// growth is strict while numerators stay polynomial in the depth. Values
/// are dyadic roundings of the feasible-interval midpoint with just enough
/// precision bits to stay strictly inside.
pub fn plant_compact_ladder(depth: usize) -> Result<Planted> {
    if depth == 0 {
        return Err(Error::Precondition("planted depth must be at least one".into()));
    }
    let scale = Rational::power_of_two(40);
    let inv_scale = Rational::power_of_two(-40);
    let two = Rational::from(2);
    let four = Rational::from(4);

    let mut points = vec![&Rational::one() + &inv_scale];
    for _ in 1..depth {
        let prev = points.last().expect("nonempty");
        let grown = &prev.pow(49)? * &scale;
        let numer = &Rational::from(grown.floor_int()) + &two;
        points.push(&numer * &inv_scale);
    }

    let mut values = vec![&Rational::one() + &Rational::power_of_two(-41)];
    for k in 2..=depth {
        let prev_low = nest_low(&values[k - 2], &points[k - 2], k - 1);
        let prev_high = nest_high(&values[k - 2], &points[k - 2], k - 1);
        let (a, b) = feasible_interval(&prev_low, &prev_high, &points[k - 1], k);
        let width = &b - &a;
        if !width.is_positive() {
            return Err(Error::Validation(format!(
                "no value interval left to plant at depth {k}"
            )));
        }
        let needed = (&four / &width).ceil_int();
        let bits = i64::try_from(needed.bits())
            .map_err(|_| Error::Validation("planting precision overflow".into()))?;
        let grid = Rational::power_of_two(bits);
        let mid = &(&a + &b) / &two;
        let value = &Rational::from((&mid * &grid).ceil_int()) * &Rational::power_of_two(-bits);
        debug_assert!(a < value && value < b);
        values.push(value);
    }
    assemble_planted(points, values)
}
