//! Chronology in 2D Minkowski space with the points `(0, 0)` and `(0, -1/k)`,
//! `k >= 1`, removed, and in its universal cover.
//!
//! Coordinates are `(t, x)`; the removed points sit on the axis `t = 0`. A
//! t-monotone timelike curve from `t < 0` to `t > 0` meets the axis once, inside
//! one of the gaps between removed points. Two such curves are homotopic exactly
//! when they cross in the same gap, so the gap labels the sheet of the universal
//! cover on which the curve ends. All predicates are exact over rationals.

pub mod oracle;

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

pub use oracle::{oracle_grid_search, GridOracle};

pub type Q = BigRational;

/// Parse a decimal (`-1.25`, `3`, `1e-3`) or a fraction (`-5/4`) exactly.
pub fn parse_rational(s: &str) -> Result<Q> {
    let s = s.trim();
    let bad = || domain(format!("not a rational number: {s:?}"));
    if let Some((n, d)) = s.split_once('/') {
        let n = BigInt::from_str(n.trim()).map_err(|_| bad())?;
        let d = BigInt::from_str(d.trim()).map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(Q::new(n, d));
    }
    let (mantissa, exp) = match s.split_once(['e', 'E']) {
        Some((m, e)) => (m, e.parse::<i32>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int, frac) = digits.split_once('.').unwrap_or((digits, ""));
    if int.is_empty() && frac.is_empty() || !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let num = BigInt::from_str(&format!("{int}{frac}")).map_err(|_| bad())?;
    let scale = exp - frac.len() as i32;
    let ten = BigInt::from(10u8);
    let mut v = if scale >= 0 {
        Q::from_integer(num * num_traits::pow(ten, scale as usize))
    } else {
        Q::new(num, num_traits::pow(ten, (-scale) as usize))
    };
    if neg {
        v = -v;
    }
    Ok(v)
}

/// An event `(t, x)` of the plane.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PlaneEvent {
    pub t: Q,
    pub x: Q,
}

impl PlaneEvent {
    pub fn new(t: Q, x: Q) -> Self {
        PlaneEvent { t, x }
    }

    pub fn parse(t: &str, x: &str) -> Result<Self> {
        Ok(PlaneEvent { t: parse_rational(t)?, x: parse_rational(x)? })
    }

    /// Exact value of two finite floats.
    pub fn from_f64(t: f64, x: f64) -> Result<Self> {
        let conv = |v: f64| Q::from_float(v).ok_or_else(|| domain(format!("non-finite coordinate {v}")));
        Ok(PlaneEvent { t: conv(t)?, x: conv(x)? })
    }

    pub fn to_f64(&self) -> (f64, f64) {
        use num_traits::ToPrimitive;
        (self.t.to_f64().unwrap_or(f64::NAN), self.x.to_f64().unwrap_or(f64::NAN))
    }
}

impl fmt::Display for PlaneEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.t, self.x)
    }
}

/// Position of the `k`-th removed point on the axis: `0` for `k = 0`, `-1/k` otherwise.
pub fn puncture_position(k: u64) -> Q {
    if k == 0 {
        Q::zero()
    } else {
        -Q::new(BigInt::one(), k.into())
    }
}

/// Whether the axis position `x` is a removed point.
pub fn is_puncture_position(x: &Q) -> bool {
    if x.is_zero() {
        return true;
    }
    if !x.is_negative() {
        return false;
    }
    let inv = -x.recip();
    inv.is_integer() && inv >= Q::one()
}

pub fn is_puncture(e: &PlaneEvent) -> bool {
    e.t.is_zero() && is_puncture_position(&e.x)
}

/// A connected component of the axis minus the removed points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Gap {
    /// `(-inf, -1)`.
    Left,
    /// `(-1/k, -1/(k+1))`, `k >= 1`.
    Mid(u64),
    /// `(0, +inf)`.
    Right,
}

impl Gap {
    /// Lower endpoint, `None` for `-inf`.
    pub fn lower(&self) -> Option<Q> {
        match *self {
            Gap::Left => None,
            Gap::Mid(k) => Some(puncture_position(k)),
            Gap::Right => Some(Q::zero()),
        }
    }

    /// Upper endpoint, `None` for `+inf`.
    pub fn upper(&self) -> Option<Q> {
        match *self {
            Gap::Left => Some(-Q::one()),
            Gap::Mid(k) => Some(puncture_position(k + 1)),
            Gap::Right => None,
        }
    }

    pub fn contains(&self, x: &Q) -> bool {
        self.lower().is_none_or(|l| *x > l) && self.upper().is_none_or(|u| *x < u)
    }

    fn validate(&self) -> Result<()> {
        match self {
            Gap::Mid(0) => Err(domain("gap index Mid(k) needs k >= 1")),
            _ => Ok(()),
        }
    }
}

impl fmt::Display for Gap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Gap::Left => f.write_str("left"),
            Gap::Mid(k) => write!(f, "mid({k})"),
            Gap::Right => f.write_str("right"),
        }
    }
}

impl FromStr for Gap {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        let g = match s.as_str() {
            "left" => Gap::Left,
            "right" => Gap::Right,
            _ => {
                let k = s
                    .strip_prefix("mid(")
                    .and_then(|r| r.strip_suffix(')'))
                    .and_then(|k| k.parse::<u64>().ok())
                    .ok_or_else(|| domain(format!("unknown gap {s:?}")))?;
                Gap::Mid(k)
            }
        };
        g.validate()?;
        Ok(g)
    }
}

/// The gap containing the axis position `x`, or `None` at a removed point.
pub fn gap_of(x: &Q) -> Option<Gap> {
    if is_puncture_position(x) {
        return None;
    }
    if x.is_positive() {
        return Some(Gap::Right);
    }
    if *x < -Q::one() {
        return Some(Gap::Left);
    }
    // -1/k < x < -1/(k+1)  <=>  k = floor(-1/x).
    let k = (-x.recip()).floor().to_integer();
    Some(Gap::Mid(k.try_into().expect("gap index fits in u64")))
}

/// An interval `(lo, hi)` or `[lo, hi]` of axis positions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Window {
    pub lo: Q,
    pub hi: Q,
    pub closed: bool,
}

impl Window {
    pub fn contains(&self, x: &Q) -> bool {
        if self.closed {
            self.lo <= *x && *x <= self.hi
        } else {
            self.lo < *x && *x < self.hi
        }
    }
}

impl fmt::Display for Window {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (l, r) = if self.closed { ('[', ']') } else { ('(', ')') };
        write!(f, "{l}{}, {}{r}", self.lo, self.hi)
    }
}

fn off_axis(p: &PlaneEvent) -> Result<()> {
    if p.t.is_zero() {
        return Err(domain(format!("event {p} lies on the axis t = 0")));
    }
    Ok(())
}

/// Axis positions `c` with `|c - x_p| < |t_p|` (strict) or `<=` (closed): where
/// timelike (resp. causal) straight segments from `p` meet the axis.
pub fn window(p: &PlaneEvent, strict: bool) -> Result<Window> {
    off_axis(p)?;
    let w = p.t.abs();
    Ok(Window { lo: &p.x - &w, hi: &p.x + &w, closed: !strict })
}

/// Chronology `p << q` in unpunctured Minkowski space.
pub fn minkowski_chron(p: &PlaneEvent, q: &PlaneEvent) -> bool {
    &q.t - &p.t > (&q.x - &p.x).abs()
}

/// Chronology in the punctured plane, for off-axis endpoints.
///
/// A crossing pair is related iff the strict windows overlap: an open interval
/// of crossing points can never be blocked by countably many removed points.
pub fn chron_base(p: &PlaneEvent, q: &PlaneEvent) -> Result<bool> {
    off_axis(p)?;
    off_axis(q)?;
    match (p.t.is_negative(), q.t.is_negative()) {
        (true, false) => {
            let (wp, wq) = (window(p, true)?, window(q, true)?);
            Ok(wp.lo.clone().max(wq.lo.clone()) < wp.hi.clone().min(wq.hi.clone()))
        }
        (false, true) => Ok(false),
        // Same side: the straight segment never meets the axis.
        _ => Ok(minkowski_chron(p, q)),
    }
}

/// Closure membership `q ∈ cl I+(p)` in the punctured plane, for crossing pairs.
pub fn closure_base(p: &PlaneEvent, q: &PlaneEvent) -> Result<bool> {
    crossing_shape(p, q)?;
    Ok((&q.x - &p.x).abs() <= &q.t - &p.t)
}

fn crossing_shape(p: &PlaneEvent, q: &PlaneEvent) -> Result<()> {
    if !(p.t.is_negative() && q.t.is_positive()) {
        return Err(Error::UnsupportedShape(format!(
            "only pairs with t_p < 0 < t_q are supported, got p = {p}, q = {q}"
        )));
    }
    Ok(())
}

/// The set of gaps met by an open interval: possibly `Left`, possibly `Right`,
/// and a contiguous (possibly unbounded) range of `Mid(k)`.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct GapSet {
    pub left: bool,
    pub right: bool,
    /// `(k_min, k_max)`, with `k_max = None` for an unbounded tail.
    pub mid: Option<(u64, Option<u64>)>,
}

impl GapSet {
    pub fn contains(&self, g: &Gap) -> bool {
        match *g {
            Gap::Left => self.left,
            Gap::Right => self.right,
            Gap::Mid(k) => self.mid.is_some_and(|(lo, hi)| k >= lo && hi.is_none_or(|hi| k <= hi)),
        }
    }

    pub fn is_empty(&self) -> bool {
        !self.left && !self.right && self.mid.is_none()
    }

    /// Members with `Mid(k)` truncated at `k <= k_max`, in axis order.
    pub fn members_up_to(&self, k_max: u64) -> Vec<Gap> {
        let mut out = Vec::new();
        if self.left {
            out.push(Gap::Left);
        }
        if let Some((lo, hi)) = self.mid {
            let hi = hi.map_or(k_max, |h| h.min(k_max));
            out.extend((lo..=hi).map(Gap::Mid));
        }
        if self.right {
            out.push(Gap::Right);
        }
        out
    }

    /// Gaps meeting the open interval `(a, b)`.
    pub fn meeting(a: &Q, b: &Q) -> GapSet {
        if a >= b {
            return GapSet::default();
        }
        let left = *a < -Q::one();
        let right = b.is_positive();
        // Mid(k) meets (a, b) iff a < -1/(k+1) and b > -1/k.
        let mid = if a.is_negative() {
            let k_min = (-a.recip()).floor().to_integer().max(BigInt::one());
            let k_max = if b.is_negative() { Some((-b.recip()).ceil().to_integer() - BigInt::one()) } else { None };
            match k_max {
                Some(hi) if hi < k_min => None,
                hi => Some((to_u64(&k_min), hi.map(|h| to_u64(&h)))),
            }
        } else {
            None
        };
        GapSet { left, right, mid }
    }
}

fn to_u64(k: &BigInt) -> u64 {
    u64::try_from(k).unwrap_or(u64::MAX)
}

/// Gaps in which a timelike curve from `p` to `q` can cross the axis.
pub fn gaps_reachable(p: &PlaneEvent, q: &PlaneEvent) -> Result<GapSet> {
    crossing_shape(p, q)?;
    let (wp, wq) = (window(p, true)?, window(q, true)?);
    Ok(GapSet::meeting(&wp.lo.max(wq.lo), &wp.hi.min(wq.hi)))
}

/// Sheet of a point of the universal cover, relative to the lift of the past endpoint.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sheet {
    /// The reference lift of a point with `t < 0`.
    Base,
    /// Endpoint of a lift of a curve crossing the axis in this gap.
    Crossing(Gap),
}

/// A point of the universal cover in the supported query shape.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverPoint {
    pub event: PlaneEvent,
    pub sheet: Sheet,
}

impl CoverPoint {
    pub fn base(event: PlaneEvent) -> Self {
        CoverPoint { event, sheet: Sheet::Base }
    }

    pub fn crossing(event: PlaneEvent, gap: Gap) -> Self {
        CoverPoint { event, sheet: Sheet::Crossing(gap) }
    }
}

fn cover_shape(p: &CoverPoint, q: &CoverPoint) -> Result<Gap> {
    crossing_shape(&p.event, &q.event)?;
    match (p.sheet, q.sheet) {
        (Sheet::Base, Sheet::Crossing(g)) => {
            g.validate()?;
            Ok(g)
        }
        _ => Err(Error::UnsupportedShape(format!(
            "expected a reference lift followed by a crossing lift, got sheets {:?} and {:?}",
            p.sheet, q.sheet
        ))),
    }
}

/// Open interval `gap ∩ (lo, hi)` as `(max, min)`; empty when `max >= min`.
fn clip(g: &Gap, w: &Window) -> (Q, Q) {
    let lo = match g.lower() {
        Some(l) => l.max(w.lo.clone()),
        None => w.lo.clone(),
    };
    let hi = match g.upper() {
        Some(u) => u.min(w.hi.clone()),
        None => w.hi.clone(),
    };
    (lo, hi)
}

/// `q̃ ∈ Ĩ+(p̃)`.
pub fn lifted_chron(p: &CoverPoint, q: &CoverPoint) -> Result<bool> {
    let g = cover_shape(p, q)?;
    Ok(gaps_reachable(&p.event, &q.event)?.contains(&g))
}

/// `cl(gap ∩ fixed) ∩ perturbed ≠ ∅`, with `fixed` open and `perturbed` closed.
fn closure_rule(g: &Gap, fixed: &Window, perturbed: &Window) -> bool {
    let (lo, hi) = clip(g, fixed);
    if lo >= hi {
        return false;
    }
    lo.max(perturbed.lo.clone()) <= hi.min(perturbed.hi.clone())
}

/// `q̃ ∈ cl Ĩ+(p̃)`: crossings stay strictly inside the gap and the window of `p`,
/// while `q` may be approached, so its window is closed.
pub fn in_closure_future(p: &CoverPoint, q: &CoverPoint) -> Result<bool> {
    let g = cover_shape(p, q)?;
    Ok(closure_rule(&g, &window(&p.event, true)?, &window(&q.event, false)?))
}

/// `p̃ ∈ cl Ĩ-(q̃)`: the dual rule, with `p` approached and `q` fixed.
pub fn in_closure_past(p: &CoverPoint, q: &CoverPoint) -> Result<bool> {
    let g = cover_shape(p, q)?;
    Ok(closure_rule(&g, &window(&q.event, true)?, &window(&p.event, false)?))
}

/// One sheet of a reflectivity table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SheetRow {
    pub sheet: Gap,
    pub chronological: bool,
    pub future_closure: bool,
    pub past_closure: bool,
    /// `q̃ ∈ cl Ĩ+(p̃)` but `p̃ ∉ cl Ĩ-(q̃)`.
    pub past_reflectivity_violated: bool,
}

/// Sheet-by-sheet closure memberships for a crossing pair.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReflectivityTable {
    pub p: (String, String),
    pub q: (String, String),
    pub k_max: u64,
    pub rows: Vec<SheetRow>,
    pub base_future_closure: bool,
    pub base_past_closure: bool,
}

impl ReflectivityTable {
    pub fn future_sheets(&self) -> Vec<Gap> {
        self.rows.iter().filter(|r| r.future_closure).map(|r| r.sheet).collect()
    }

    pub fn past_sheets(&self) -> Vec<Gap> {
        self.rows.iter().filter(|r| r.past_closure).map(|r| r.sheet).collect()
    }

    pub fn violating_sheets(&self) -> Vec<Gap> {
        self.rows.iter().filter(|r| r.past_reflectivity_violated).map(|r| r.sheet).collect()
    }

    pub fn base_violated(&self) -> bool {
        self.base_future_closure != self.base_past_closure
    }
}

/// Sheets `Right`, `Left`, `Mid(1..=k_max)` in that order.
pub fn sheets(k_max: u64) -> impl Iterator<Item = Gap> {
    [Gap::Right, Gap::Left].into_iter().chain((1..=k_max).map(Gap::Mid))
}

pub fn reflectivity_report(p: &PlaneEvent, q: &PlaneEvent, k_max: u64) -> Result<ReflectivityTable> {
    crossing_shape(p, q)?;
    let reach = gaps_reachable(p, q)?;
    let (wp_open, wq_open) = (window(p, true)?, window(q, true)?);
    let (wp_closed, wq_closed) = (window(p, false)?, window(q, false)?);
    let rows = sheets(k_max)
        .map(|g| {
            let future = closure_rule(&g, &wp_open, &wq_closed);
            let past = closure_rule(&g, &wq_open, &wp_closed);
            SheetRow {
                sheet: g,
                chronological: reach.contains(&g),
                future_closure: future,
                past_closure: past,
                past_reflectivity_violated: future && !past,
            }
        })
        .collect();
    let base = closure_base(p, q)?;
    Ok(ReflectivityTable {
        p: (p.t.to_string(), p.x.to_string()),
        q: (q.t.to_string(), q.x.to_string()),
        k_max,
        rows,
        // In the base both memberships reduce to |x_q - x_p| <= t_q - t_p.
        base_future_closure: base,
        base_past_closure: (&p.x - &q.x).abs() <= &q.t - &p.t,
    })
}

/// Agreement of `chron_base` with unpunctured chronology on sampled crossing pairs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BaseAgreement {
    pub seed: u64,
    pub samples: u64,
    pub disagreements: u64,
    pub first_disagreement: Option<u64>,
}

fn dyadic(n: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(1024))
}

/// Crossing pair number `index`: dyadic coordinates with `t_p < 0 < t_q`; one in
/// four pairs sits exactly on the light cone, one in four places `x_p` on a puncture.
pub fn sample_crossing_pair(seed: u64, index: u64) -> (PlaneEvent, PlaneEvent) {
    use rand::Rng;
    let mut rng = crate::causality::sample_rng(seed, index);
    let p_t = dyadic(-rng.random_range(1..4096));
    let q_t = dyadic(rng.random_range(1..4096));
    let mut p_x = dyadic(rng.random_range(-4096..4096));
    if rng.random_bool(0.25) {
        p_x = puncture_position(rng.random_range(1..=8));
    }
    let q_x = if rng.random_bool(0.25) {
        let dt = &q_t - &p_t;
        if rng.random_bool(0.5) { &p_x + dt } else { &p_x - dt }
    } else {
        dyadic(rng.random_range(-4096..4096))
    };
    (PlaneEvent::new(p_t, p_x), PlaneEvent::new(q_t, q_x))
}

/// Compare `chron_base` with `minkowski_chron` on `n` crossing pairs.
pub fn base_agreement(n: u64, seed: u64) -> Result<BaseAgreement> {
    use rayon::prelude::*;
    let bad: Vec<u64> = (0..n)
        .into_par_iter()
        .map(|i| {
            let (p, q) = sample_crossing_pair(seed, i);
            Ok((chron_base(&p, &q)? != minkowski_chron(&p, &q)).then_some(i))
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    Ok(BaseAgreement { seed, samples: n, disagreements: bad.len() as u64, first_disagreement: bad.first().copied() })
}
