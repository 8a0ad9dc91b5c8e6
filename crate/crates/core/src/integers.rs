//! Integer extraction through level windows on a ladder.
//!
//! Picking a level strictly inside a ladder's deepest interval turns the
//! index map `nu(d) = d^-2 f(d) / (level - f(d))` into a ruler: the value at
//! the ladder point of index `m` lands strictly inside the window
//! `(m, m + 1/m)`, and nothing else lands in any window. Differences of
//! those values against a start index then approximate `0..=n` within any
//! tolerance below 1/2, and the whole construction is written down as a
//! certificate that can be re-checked from its own fields alone.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::func::TaggedFunction;
use crate::interval::Interval;
use crate::ladder::{self, build_ladder, verify_ladder, Ladder};
use crate::rational::Rational;
use crate::set::DiscreteSet;

/// Whether the value band `(f(u), f(u)(1 + u^-2))` strictly contains `c`.
pub fn straddles_level(f: &TaggedFunction, u: &Rational, c: &Rational) -> Result<bool> {
    let fu = f.value_at(u)?;
    let uu = u * u;
    let top = fu * &(&uu + &Rational::one()).checked_div(&uu)?;
    Ok(fu < c && *c < top)
}

/// The power gap test: every point whose band straddles `c` must sit either
/// strictly below the seventh root of `x` or at `x` and beyond. Decided
/// entirely in integer arithmetic as `u^7 < x` or `u >= x`.
pub fn phi(d: &DiscreteSet, f: &TaggedFunction, x: &Rational, c: &Rational) -> Result<bool> {
    for u in d {
        if !straddles_level(f, u, c)? {
            continue;
        }
        if !(u.pow(7)? < *x || u >= x) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Points whose band straddles `c` and which pass the power gap test.
pub fn candidate_set(d: &DiscreteSet, f: &TaggedFunction, c: &Rational) -> Result<DiscreteSet> {
    let mut picked = Vec::new();
    for u in d {
        if straddles_level(f, u, c)? && phi(d, f, u, c)? {
            picked.push(u.clone());
        }
    }
    DiscreteSet::new(picked)
}

/// The index map `nu(d) = d^-2 f(d) / (c - f(d))`; fails where it has its
/// pole, naming the point.
pub fn nu(f: &TaggedFunction, c: &Rational, d: &Rational) -> Result<Rational> {
    let fd = f.value_at(d)?;
    if fd == c {
        return Err(Error::Singularity(format!(
            "index map has a pole at {d}: f({d}) = {c}"
        )));
    }
    let denom = &(d * d) * &(c - fd);
    fd.checked_div(&denom)
}

/// Exact midpoint of the ladder's interval at index `n`; the canonical
/// level for window checks. Meaningful from index 2 on, where windows
/// start.
pub fn pick_level(ladder: &Ladder, n: usize) -> Result<Rational> {
    if n < 2 || n > ladder.depth() {
        return Err(Error::Precondition(format!(
            "level index {n} is outside 2..={}",
            ladder.depth()
        )));
    }
    let (lo, hi) = ladder.nest_interval(n)?;
    Ok(&(&lo + &hi) / &Rational::from(2))
}

/// One window row: the index, the index-map value at that ladder point, and
/// the window bounds `(m, m + 1/m)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WindowEntry {
    pub m: usize,
    pub nu: Rational,
    pub lo: Rational,
    pub hi: Rational,
}

/// Renders window rows as `m,nu,lo,hi` CSV with a header line.
pub fn windows_csv(entries: &[WindowEntry]) -> String {
    let mut out = String::from("m,nu,lo,hi\n");
    for e in entries {
        out.push_str(&format!("{},{},{},{}\n", e.m, e.nu, e.lo, e.hi));
    }
    out
}

/// One failed window claim.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WindowProblem {
    /// The index-map value at a ladder point misses its window.
    LadderPointOffWindow { m: usize, nu: Rational },
    /// The window test and the interval test disagree at an index.
    NestDisagreement { m: usize },
    /// A window holds a number of image values other than one.
    WindowCount { m: usize, count: usize },
    /// An image value lies outside every window.
    ValueOutsideWindows { value: Rational },
    /// The candidates between the second and last ladder points are not
    /// exactly the ladder points themselves.
    CandidateMismatch {
        missing: Vec<Rational>,
        extra: Vec<Rational>,
    },
}

impl std::fmt::Display for WindowProblem {
    fn fmt(&self, out: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            WindowProblem::LadderPointOffWindow { m, nu } => {
                write!(out, "nu(d_{m}) = {nu} is not strictly inside ({m}, {m} + 1/{m})")
            }
            WindowProblem::NestDisagreement { m } => {
                write!(out, "window test and interval test disagree at index {m}")
            }
            WindowProblem::WindowCount { m, count } => {
                write!(out, "window ({m}, {m} + 1/{m}) holds {count} values instead of one")
            }
            WindowProblem::ValueOutsideWindows { value } => {
                write!(out, "image value {value} lies outside every window")
            }
            WindowProblem::CandidateMismatch { missing, extra } => {
                write!(
                    out,
                    "candidates between the anchor points are off: {} missing, {} extra",
                    missing.len(),
                    extra.len()
                )
            }
        }
    }
}

/// Outcome of a window check: the rows, the image of the restricted
/// candidates, and every claim that failed.
#[derive(Clone, Debug)]
pub struct WindowReport {
    pub entries: Vec<WindowEntry>,
    pub image: Vec<Rational>,
    pub problems: Vec<WindowProblem>,
}

impl WindowReport {
    pub fn valid(&self) -> bool {
        self.problems.is_empty()
    }

    pub fn csv(&self) -> String {
        windows_csv(&self.entries)
    }
}

/// Checks every window claim for indices `2..=n` at level `c`: each ladder
/// value strictly inside its window, the window test agreeing with the
/// interval test, each window holding exactly one image value, no image
/// value outside all windows, and the candidates between the second and
/// `n`-th points being exactly the ladder points.
pub fn window_check(
    d: &DiscreteSet,
    f: &TaggedFunction,
    c: &Rational,
    ladder: &Ladder,
    n: usize,
) -> Result<WindowReport> {
    if n < 2 || n > ladder.depth() {
        return Err(Error::Precondition(format!(
            "window depth {n} is outside 2..={}",
            ladder.depth()
        )));
    }
    let points = ladder.points();
    let candidates = candidate_set(d, f, c)?;
    let restricted: Vec<Rational> = candidates
        .in_closed_range(&points[1], &points[n - 1])
        .to_vec();
    let image = restricted
        .iter()
        .map(|x| nu(f, c, x))
        .collect::<Result<Vec<_>>>()?;

    let mut entries = Vec::new();
    let mut problems = Vec::new();
    for m in 2..=n {
        let lo = Rational::from(m);
        let hi = &lo + &lo.invert()?;
        let nu_m = nu(f, c, &points[m - 1])?;
        let inside = lo < nu_m && nu_m < hi;
        if !inside {
            problems.push(WindowProblem::LadderPointOffWindow {
                m,
                nu: nu_m.clone(),
            });
        }
        let (nest_lo, nest_hi) = ladder.nest_interval(m)?;
        if (nest_lo < *c && *c < nest_hi) != inside {
            problems.push(WindowProblem::NestDisagreement { m });
        }
        let count = image.iter().filter(|v| lo < **v && **v < hi).count();
        if count != 1 {
            problems.push(WindowProblem::WindowCount { m, count });
        }
        entries.push(WindowEntry { m, nu: nu_m, lo, hi });
    }

    for value in &image {
        let covered = entries.iter().any(|e| e.lo < *value && *value < e.hi);
        if !covered {
            problems.push(WindowProblem::ValueOutsideWindows {
                value: value.clone(),
            });
        }
    }

    let expected = &points[1..n];
    if restricted != expected {
        problems.push(WindowProblem::CandidateMismatch {
            missing: expected
                .iter()
                .filter(|&e| !restricted.contains(e))
                .cloned()
                .collect(),
            extra: restricted
                .iter()
                .filter(|&e| !expected.contains(e))
                .cloned()
                .collect(),
        });
    }

    Ok(WindowReport {
        entries,
        image,
        problems,
    })
}

/// The four-parameter relation: both anchors are candidates at level `b1`,
/// and stepping the index value of `b2` by `a` lands exactly on the index
/// value of some candidate between the anchors.
pub fn s_relation(
    d: &DiscreteSet,
    f: &TaggedFunction,
    a: &Rational,
    b1: &Rational,
    b2: &Rational,
    b3: &Rational,
) -> Result<bool> {
    if !a.is_positive() {
        return Err(Error::Precondition(format!(
            "step offset must be positive, got {a}"
        )));
    }
    let candidates = candidate_set(d, f, b1)?;
    if !candidates.contains(b2) || !candidates.contains(b3) {
        return Ok(false);
    }
    let target = a + &nu(f, b1, b2)?;
    for x in candidates.in_closed_range(b2, b3) {
        if nu(f, b1, x)? == target {
            return Ok(true);
        }
    }
    Ok(false)
}

/// A complete, self-contained record of one integer extraction.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtractionCertificate {
    #[serde(flatten)]
    pub ladder: Ladder,
    pub level: Rational,
    #[serde(rename = "N")]
    pub start: usize,
    pub n: usize,
    pub eps: Rational,
    pub windows: Vec<WindowEntry>,
    pub s_params: [Rational; 3],
    pub fiber: Vec<Rational>,
    pub note: String,
}

/// Builds a ladder deep enough that the windows from the start index on are
/// narrower than `eps`, picks the level, checks every window claim, and
/// certifies that the fiber of index differences hits each of `0..=n`
/// within `eps`, exactly once each, with nothing left over.
pub fn extract_integers(
    d: &DiscreteSet,
    f: &TaggedFunction,
    n: usize,
    eps: &Rational,
) -> Result<ExtractionCertificate> {
    let half = Rational::of(1, 2);
    if !eps.is_positive() || *eps >= half {
        return Err(Error::Precondition(format!(
            "tolerance must lie strictly between 0 and 1/2, got {eps}"
        )));
    }
    let start = usize::try_from(eps.invert()?.floor_int())
        .map_err(|_| Error::Precondition(format!("tolerance {eps} is too small")))?
        + 1;
    let depth = start + n;
    let ladder = build_ladder(d, f, depth)?;
    let level = pick_level(&ladder, depth)?;
    let report = window_check(d, f, &level, &ladder, depth)?;
    if let Some(problem) = report.problems.first() {
        return Err(Error::Validation(format!(
            "window certification failed at level {level}: {problem}"
        )));
    }

    let windows: Vec<WindowEntry> = report
        .entries
        .into_iter()
        .filter(|e| e.m >= start)
        .collect();
    let base = windows[0].nu.clone();
    let mut fiber: Vec<Rational> = windows.iter().map(|e| &e.nu - &base).collect();
    fiber.sort();

    for k in 0..=n {
        let kk = Rational::from(k);
        let lo = &kk - eps;
        let hi = &kk + eps;
        let count = fiber.iter().filter(|v| lo < **v && **v < hi).count();
        if count != 1 {
            return Err(Error::Validation(format!(
                "integer window {k} holds {count} fiber values instead of one"
            )));
        }
    }
    for value in &fiber {
        let near = (0..=n).any(|k| (value - &Rational::from(k)).abs() < *eps);
        if !near {
            return Err(Error::Validation(format!(
                "fiber value {value} is not within tolerance of any target integer"
            )));
        }
    }

    let s_params = [
        level.clone(),
        ladder.points()[start - 1].clone(),
        ladder.points()[depth - 1].clone(),
    ];
    let note = format!(
        "s_params holds the anchored reading (level, ladder[{}], ladder[{}]) in \
         one-based indices; the literal reading pairs the level with the first \
         two ladder points (level, ladder[1], ladder[2]) instead",
        start, depth
    );
    Ok(ExtractionCertificate {
        ladder,
        level,
        start,
        n,
        eps: eps.clone(),
        windows,
        s_params,
        fiber,
        note,
    })
}

/// One failed certificate check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CertificateProblem {
    /// A ladder condition fails on the certificate's own points and values.
    Ladder(ladder::Violation),
    /// The tolerance is not strictly between 0 and 1/2.
    Tolerance,
    /// The start index does not satisfy 1/N < tolerance.
    StartIndex,
    /// The ladder depth differs from start index plus window count.
    DepthMismatch,
    /// The level is not strictly inside the deepest interval.
    LevelOutsideNest,
    /// The window list does not hold one entry per target integer.
    WindowShape,
    /// A window entry carries the wrong index.
    WindowIndex { position: usize },
    /// Window bounds differ from `(m, m + 1/m)`.
    WindowBounds { m: usize },
    /// A recorded index value disagrees with recomputation.
    WindowValue { m: usize },
    /// A recorded index value is not strictly inside its window.
    WindowMiss { m: usize },
    /// The window test and the interval test disagree at an index.
    NestDisagreement { m: usize },
    /// The relation parameters are not the level with the anchor points.
    Parameters,
    /// The fiber differs from the recorded window differences.
    FiberMismatch,
    /// An integer window holds a number of fiber values other than one.
    FiberWindow { k: usize, count: usize },
    /// A fiber value is not within tolerance of any target integer.
    StrayFiberValue { value: Rational },
}

impl std::fmt::Display for CertificateProblem {
    fn fmt(&self, out: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CertificateProblem::Ladder(v) => write!(out, "ladder: {v}"),
            CertificateProblem::Tolerance => {
                write!(out, "tolerance is not strictly between 0 and 1/2")
            }
            CertificateProblem::StartIndex => {
                write!(out, "start index does not satisfy 1/N < tolerance")
            }
            CertificateProblem::DepthMismatch => {
                write!(out, "ladder depth differs from start index plus window count")
            }
            CertificateProblem::LevelOutsideNest => {
                write!(out, "level is not strictly inside the deepest interval")
            }
            CertificateProblem::WindowShape => {
                write!(out, "window list does not hold one entry per target integer")
            }
            CertificateProblem::WindowIndex { position } => {
                write!(out, "window entry at position {position} carries the wrong index")
            }
            CertificateProblem::WindowBounds { m } => {
                write!(out, "window bounds at index {m} are not ({m}, {m} + 1/{m})")
            }
            CertificateProblem::WindowValue { m } => {
                write!(out, "recorded index value at {m} does not match recomputation")
            }
            CertificateProblem::WindowMiss { m } => {
                write!(out, "index value at {m} is not strictly inside its window")
            }
            CertificateProblem::NestDisagreement { m } => {
                write!(out, "window test and interval test disagree at index {m}")
            }
            CertificateProblem::Parameters => {
                write!(out, "relation parameters are not the level with the anchor points")
            }
            CertificateProblem::FiberMismatch => {
                write!(out, "fiber does not match the recorded window differences")
            }
            CertificateProblem::FiberWindow { k, count } => {
                write!(out, "integer window {k} holds {count} fiber values instead of one")
            }
            CertificateProblem::StrayFiberValue { value } => {
                write!(out, "fiber value {value} is not within tolerance of any target integer")
            }
        }
    }
}

/// Outcome of re-checking a certificate.
#[derive(Clone, Debug)]
pub struct CertificateReport {
    pub problems: Vec<CertificateProblem>,
}

impl CertificateReport {
    pub fn valid(&self) -> bool {
        self.problems.is_empty()
    }
}

/// Re-checks a certificate from its own fields alone: the ladder conditions
/// over its listed points and values, the tolerance and start index, the
/// level's position, every window row against recomputation, the relation
/// parameters, and the fiber with its integer windows. No external set or
/// function is consulted.
pub fn verify_certificate(cert: &ExtractionCertificate) -> Result<CertificateReport> {
    let mut problems = Vec::new();
    let points = cert.ladder.points();
    let values = cert.ladder.f_values();
    let depth = cert.ladder.depth();

    let set = DiscreteSet::new(points.to_vec())?;
    let pairs = points.iter().cloned().zip(values.iter().cloned()).collect();
    let func = TaggedFunction::from_pairs(pairs)?;
    let ladder_report = verify_ladder(&set, &func, &cert.ladder)?;
    problems.extend(
        ladder_report
            .violations
            .into_iter()
            .map(CertificateProblem::Ladder),
    );

    let half = Rational::of(1, 2);
    if !cert.eps.is_positive() || cert.eps >= half {
        problems.push(CertificateProblem::Tolerance);
    }
    if cert.start < 2 || Rational::from(cert.start).invert()? >= cert.eps {
        problems.push(CertificateProblem::StartIndex);
    }
    if depth != cert.start + cert.n {
        problems.push(CertificateProblem::DepthMismatch);
    }

    let (deep_lo, deep_hi) = cert.ladder.nest_interval(depth)?;
    if !(deep_lo < cert.level && cert.level < deep_hi) {
        problems.push(CertificateProblem::LevelOutsideNest);
    }

    if cert.windows.len() != cert.n + 1 {
        problems.push(CertificateProblem::WindowShape);
    }
    for (position, entry) in cert.windows.iter().enumerate() {
        let m = cert.start + position;
        if entry.m != m || m < 2 || m > depth {
            problems.push(CertificateProblem::WindowIndex { position });
            continue;
        }
        let lo = Rational::from(m);
        let hi = &lo + &lo.invert()?;
        if entry.lo != lo || entry.hi != hi {
            problems.push(CertificateProblem::WindowBounds { m });
        }
        let fd = &values[m - 1];
        let recomputed = if fd == &cert.level {
            None
        } else {
            let denom = &(&points[m - 1] * &points[m - 1]) * &(&cert.level - fd);
            fd.checked_div(&denom).ok()
        };
        if recomputed.as_ref() != Some(&entry.nu) {
            problems.push(CertificateProblem::WindowValue { m });
        }
        let inside = entry.lo < entry.nu && entry.nu < entry.hi;
        if !inside {
            problems.push(CertificateProblem::WindowMiss { m });
        }
        let (nest_lo, nest_hi) = cert.ladder.nest_interval(m)?;
        if (nest_lo < cert.level && cert.level < nest_hi) != inside {
            problems.push(CertificateProblem::NestDisagreement { m });
        }
    }

    if cert.start >= 1 && cert.start <= depth && depth == cert.start + cert.n {
        let expected = [
            cert.level.clone(),
            points[cert.start - 1].clone(),
            points[depth - 1].clone(),
        ];
        if cert.s_params != expected {
            problems.push(CertificateProblem::Parameters);
        }
    }

    if let Some(first) = cert.windows.first() {
        let mut expected: Vec<Rational> =
            cert.windows.iter().map(|e| &e.nu - &first.nu).collect();
        expected.sort();
        if cert.fiber != expected {
            problems.push(CertificateProblem::FiberMismatch);
        }
    }

    for k in 0..=cert.n {
        let kk = Rational::from(k);
        let lo = &kk - &cert.eps;
        let hi = &kk + &cert.eps;
        let count = cert.fiber.iter().filter(|v| lo < **v && **v < hi).count();
        if count != 1 {
            problems.push(CertificateProblem::FiberWindow { k, count });
        }
    }
    for value in &cert.fiber {
        let near = (0..=cert.n).any(|k| (value - &Rational::from(k)).abs() < cert.eps);
        if !near {
            problems.push(CertificateProblem::StrayFiberValue {
                value: value.clone(),
            });
        }
    }

    Ok(CertificateReport { problems })
}

/// Longest run of values whose consecutive gaps stay within `eps`, returned
/// as the open interval between the run's ends when that span reaches at
/// least `2 * eps`; empty otherwise. Leftmost run wins ties.
pub fn dense_window(values: &[Rational], eps: &Rational) -> Result<Interval> {
    if values.is_empty() {
        return Err(Error::Precondition(
            "density scan needs at least one value".into(),
        ));
    }
    if !eps.is_positive() {
        return Err(Error::Precondition(format!(
            "density tolerance must be positive, got {eps}"
        )));
    }
    let mut sorted = values.to_vec();
    sorted.sort();
    sorted.dedup();

    let mut best_start = 0;
    let mut best_len = 1;
    let mut run_start = 0;
    for i in 1..sorted.len() {
        if &sorted[i] - &sorted[i - 1] > *eps {
            if i - run_start > best_len {
                best_start = run_start;
                best_len = i - run_start;
            }
            run_start = i;
        }
    }
    if sorted.len() - run_start > best_len {
        best_start = run_start;
        best_len = sorted.len() - run_start;
    }

    let first = &sorted[best_start];
    let last = &sorted[best_start + best_len - 1];
    let two_eps = &Rational::from(2) * eps;
    if last - first >= two_eps {
        Ok(Interval::open(first.clone(), last.clone()))
    } else {
        Ok(Interval::empty())
    }
}

/// The increasing affine map sending an interval's ends to 1 and 2.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AffineMap {
    pub scale: Rational,
    pub offset: Rational,
}

impl AffineMap {
    pub fn apply(&self, x: &Rational) -> Rational {
        &(&self.scale * x) + &self.offset
    }
}

/// Builds the affine map compressing a window onto `(1, 2)`:
/// `x -> x/(v - u) + 1 - u/(v - u)` for a window from `u` to `v`.
pub fn compress(window: &Interval) -> Result<AffineMap> {
    let (Some(u), Some(v)) = (window.lo(), window.hi()) else {
        return Err(Error::Precondition("cannot compress an empty window".into()));
    };
    let width = v - u;
    if !width.is_positive() {
        return Err(Error::Precondition(
            "cannot compress a degenerate window".into(),
        ));
    }
    let scale = width.invert()?;
    let offset = &Rational::one() - &(u * &scale);
    Ok(AffineMap { scale, offset })
}
