//! Causal relations of static product spacetimes `(R x S, -dt^2 + k)`.
//!
//! A future-directed causal curve from `(t_p, x)` to `(t_q, y)` exists iff some base
//! curve from `x` to `y` has length at most `t_q - t_p`. With `d` the infimum of base
//! lengths: `d < dt` gives a timelike curve, `d = dt` gives a null one only when `d`
//! is attained, and `d <= dt` always puts the pair in the closure of `J`.

use std::cmp::Ordering;
use std::fmt::Debug;

use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cone::{self, ConeGeometry, ConePoint, GeodesicResult};
use crate::error::{domain, Result};
use crate::interval::{rational, rational_to_f64, Decision, Length, DEFAULT_EPS};

/// Infimum of base lengths between two points and whether it is attained.
#[derive(Debug, Clone, PartialEq)]
pub struct BaseDistance {
    pub infimum: Length,
    pub attained: Decision,
}

impl From<GeodesicResult> for BaseDistance {
    fn from(g: GeodesicResult) -> Self {
        BaseDistance { attained: g.attained(), infimum: g.infimum }
    }
}

/// Geodesic convexity of a base, with a pair lacking a minimizer when it fails.
#[derive(Debug, Clone, PartialEq)]
pub struct BaseConvexity<P> {
    pub convex: Decision,
    pub witness: Option<(P, P)>,
    pub rule: String,
}

/// A Riemannian base `(S, k)` of a static spacetime.
///
/// `distance` must be symmetric and vanish, attained, on the diagonal.
pub trait BaseGeometry: Sync {
    type Point: Clone + PartialEq + Debug + Send + Sync;

    fn name(&self) -> String;
    fn distance(&self, x: &Self::Point, y: &Self::Point) -> Result<BaseDistance>;
    fn convexity(&self) -> BaseConvexity<Self::Point>;
    /// A random point, plus a second point chosen to make `distance` exact when
    /// `boundary` is set (so that `dt = d` can be represented).
    fn sample_pair(&self, rng: &mut ChaCha8Rng, boundary: bool) -> (Self::Point, Self::Point);
}

/// A cone (or cover) used as a base, with its sampling box.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConeSurface {
    pub geom: ConeGeometry,
    pub eps: f64,
    /// Radii are drawn log-uniformly from this range.
    pub r_range: (f64, f64),
    /// Angular range for the universal cover, which has no fundamental domain.
    pub psi_range: (f64, f64),
}

impl ConeSurface {
    pub fn new(geom: ConeGeometry) -> Self {
        ConeSurface { geom, eps: DEFAULT_EPS, r_range: (0.25, 4.0), psi_range: (-3.0 * std::f64::consts::PI, 3.0 * std::f64::consts::PI) }
    }

    fn sample_psi(&self, rng: &mut ChaCha8Rng) -> f64 {
        match self.geom.total_angle() {
            Some(theta) => rng.random_range(0.0..theta),
            None => rng.random_range(self.psi_range.0..self.psi_range.1),
        }
    }

    /// Log-uniform radius rounded to a multiple of 2^-10, so sums of radii are exact.
    fn sample_r(&self, rng: &mut ChaCha8Rng) -> f64 {
        let (lo, hi) = (self.r_range.0.ln(), self.r_range.1.ln());
        let r = rng.random_range(lo..hi).exp();
        ((r * 1024.0).round() / 1024.0).max(1.0 / 1024.0)
    }
}

impl BaseGeometry for ConeSurface {
    type Point = ConePoint;

    fn name(&self) -> String {
        match self.geom {
            ConeGeometry::BaseCone { angle } => format!("base cone, angle {angle}"),
            ConeGeometry::CyclicCover { base_angle, fold } => format!("{fold}-fold cover of cone with angle {base_angle}"),
            ConeGeometry::UniversalCover { .. } => "universal cover of cone".into(),
        }
    }

    fn distance(&self, x: &ConePoint, y: &ConePoint) -> Result<BaseDistance> {
        cone::distance_with_eps(x, y, &self.geom, self.eps).map(Into::into)
    }

    fn convexity(&self) -> BaseConvexity<ConePoint> {
        let c = cone::is_geodesically_convex(&self.geom);
        BaseConvexity { convex: c.convex, witness: c.witness, rule: c.rule }
    }

    fn sample_pair(&self, rng: &mut ChaCha8Rng, boundary: bool) -> (ConePoint, ConePoint) {
        let p = ConePoint { r: self.sample_r(rng), psi: self.sample_psi(rng) };
        if boundary {
            // Radial partner (exact distance |r_p - r_q|) or a partner beyond angle pi
            // (exact apex-route distance r_p + r_q when the geometry allows it).
            let r = self.sample_r(rng);
            if rng.random_bool(0.5) {
                return (p, ConePoint { r, psi: p.psi });
            }
            let offset = rng.random_range(std::f64::consts::PI + 0.05..2.0 * std::f64::consts::PI);
            let psi = match self.geom.total_angle() {
                Some(theta) => (p.psi + offset).rem_euclid(theta),
                None => p.psi + offset,
            };
            return (p, ConePoint { r, psi });
        }
        (p, ConePoint { r: self.sample_r(rng), psi: self.sample_psi(rng) })
    }
}

/// Flat `R^m` with finitely many points removed: the base of Minkowski space
/// with finitely many vertical lines deleted.
#[derive(Debug, Clone, PartialEq)]
pub struct PuncturedEuclidean {
    dim: usize,
    punctures: Vec<Vec<f64>>,
    /// Sampling half-width of the box centred at the origin.
    pub extent: f64,
}

impl PuncturedEuclidean {
    pub fn new(dim: usize, punctures: Vec<Vec<f64>>) -> Result<Self> {
        if dim < 2 {
            return Err(domain("punctured euclidean base needs dimension at least 2"));
        }
        for z in &punctures {
            if z.len() != dim || z.iter().any(|c| !c.is_finite()) {
                return Err(domain(format!("puncture {z:?} is not a finite point of R^{dim}")));
            }
        }
        Ok(PuncturedEuclidean { dim, punctures, extent: 2.0 })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn punctures(&self) -> &[Vec<f64>] {
        &self.punctures
    }

    fn check(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim || x.iter().any(|c| !c.is_finite()) {
            return Err(domain(format!("{x:?} is not a finite point of R^{}", self.dim)));
        }
        if self.punctures.iter().any(|z| z.as_slice() == x) {
            return Err(domain(format!("{x:?} is a removed point")));
        }
        Ok(())
    }

    /// Whether `z` lies on the open segment `(x, y)`, decided exactly.
    fn strictly_between(x: &[f64], y: &[f64], z: &[f64]) -> bool {
        let mut lambda: Option<BigRational> = None;
        for ((a, b), c) in x.iter().zip(y).zip(z) {
            let (a, b, c) = (rational(*a), rational(*b), rational(*c));
            let dir = &b - &a;
            let off = &c - &a;
            if dir.is_zero() {
                if !off.is_zero() {
                    return false;
                }
                continue;
            }
            let l = off / dir;
            match &lambda {
                Some(prev) if *prev != l => return false,
                _ => lambda = Some(l),
            }
        }
        match lambda {
            Some(l) => l.is_positive() && l < BigRational::from_integer(1.into()),
            None => false,
        }
    }
}

impl BaseGeometry for PuncturedEuclidean {
    type Point = Vec<f64>;

    fn name(&self) -> String {
        format!("R^{} minus {} points", self.dim, self.punctures.len())
    }

    fn distance(&self, x: &Vec<f64>, y: &Vec<f64>) -> Result<BaseDistance> {
        self.check(x)?;
        self.check(y)?;
        let sq = x
            .iter()
            .zip(y)
            .map(|(a, b)| {
                let d = rational(*b) - rational(*a);
                &d * &d
            })
            .fold(BigRational::zero(), |acc, v| acc + v);
        let blocked = self.punctures.iter().any(|z| Self::strictly_between(x, y, z));
        Ok(BaseDistance { infimum: Length::Sqrt(sq), attained: Decision::from_bool(!blocked) })
    }

    fn convexity(&self) -> BaseConvexity<Vec<f64>> {
        let rule = "segment between two points misses every removed point".to_string();
        let Some(z) = self.punctures.first() else {
            return BaseConvexity { convex: Decision::True, witness: None, rule };
        };
        // Mirror pair through the first puncture, shrunk until both ends are valid points.
        let mut step = 1.0;
        loop {
            let mut x = z.clone();
            let mut y = z.clone();
            x[0] -= step;
            y[0] += step;
            if self.check(&x).is_ok() && self.check(&y).is_ok() {
                return BaseConvexity { convex: Decision::False, witness: Some((x, y)), rule };
            }
            step *= 0.5;
        }
    }

    fn sample_pair(&self, rng: &mut ChaCha8Rng, boundary: bool) -> (Vec<f64>, Vec<f64>) {
        let draw = |rng: &mut ChaCha8Rng| -> Vec<f64> {
            (0..self.dim).map(|_| (rng.random_range(-self.extent..self.extent) * 256.0).round() / 256.0).collect()
        };
        loop {
            let (x, y) = if boundary && !self.punctures.is_empty() {
                // Axis-aligned pair mirrored through a puncture: blocked segment, exact length.
                let z = &self.punctures[rng.random_range(0..self.punctures.len())];
                let axis = rng.random_range(0..self.dim);
                let s = (rng.random_range(0.0..self.extent) * 256.0).round().max(1.0) / 256.0;
                let (mut x, mut y) = (z.clone(), z.clone());
                x[axis] -= s;
                y[axis] += s;
                (x, y)
            } else {
                (draw(rng), draw(rng))
            };
            if self.check(&x).is_ok() && self.check(&y).is_ok() {
                return (x, y);
            }
        }
    }
}

/// An event `(t, x)` of the static spacetime over a base.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Event<P> {
    pub t: f64,
    pub x: P,
}

impl<P> Event<P> {
    pub fn new(t: f64, x: P) -> Self {
        Event { t, x }
    }
}

/// Time-reversed event `(-t, x)`.
pub fn time_dual<P: Clone>(e: &Event<P>) -> Event<P> {
    Event { t: -e.t, x: e.x.clone() }
}

/// Position of an ordered pair in the relation lattice `I ⊂ J ⊂ cl J`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    Equal,
    Chronological,
    CausalNotChronological,
    ClosureOnly,
    Unrelated,
    Indeterminate,
}

impl Relation {
    /// Rank in `Unrelated < ClosureOnly, CausalNotChronological < Chronological`;
    /// `None` for `Equal` and `Indeterminate`.
    pub fn rank(self) -> Option<u8> {
        match self {
            Relation::Unrelated => Some(0),
            Relation::ClosureOnly | Relation::CausalNotChronological => Some(1),
            Relation::Chronological => Some(2),
            Relation::Equal | Relation::Indeterminate => None,
        }
    }

    pub fn in_closure(self) -> Decision {
        match self {
            Relation::Indeterminate => Decision::Indeterminate,
            Relation::Unrelated => Decision::False,
            _ => Decision::True,
        }
    }
}

/// Classification of an ordered event pair.
#[derive(Debug, Clone, PartialEq)]
pub struct CausalVerdict {
    pub relation: Relation,
    pub delta_t: BigRational,
    pub distance: BaseDistance,
    /// `dt - d` when known to `f64` accuracy.
    pub margin: f64,
}

/// Classify the pair `(p, q)`: is `q` in the future of `p`, and how.
pub fn classify<B: BaseGeometry>(p: &Event<B::Point>, q: &Event<B::Point>, base: &B) -> Result<CausalVerdict> {
    for e in [p, q] {
        if !e.t.is_finite() {
            return Err(domain(format!("event time must be finite, got {}", e.t)));
        }
    }
    let delta_t = rational(q.t) - rational(p.t);
    let distance = base.distance(&p.x, &q.x)?;
    let margin = rational_to_f64(&delta_t) - distance.infimum.to_f64();
    let relation = if p == q {
        Relation::Equal
    } else {
        match distance.infimum.compare(&delta_t) {
            None => Relation::Indeterminate,
            Some(Ordering::Less) => Relation::Chronological,
            Some(Ordering::Greater) => Relation::Unrelated,
            Some(Ordering::Equal) => match distance.attained {
                // dt = d = 0 with distinct base points cannot happen: d vanishes only on the diagonal.
                Decision::True if delta_t.is_zero() => Relation::Equal,
                Decision::True => Relation::CausalNotChronological,
                Decision::False => Relation::ClosureOnly,
                Decision::Indeterminate => Relation::Indeterminate,
            },
        }
    };
    Ok(CausalVerdict { relation, delta_t, distance, margin })
}

/// Closedness of the causal relation, decided through base convexity.
#[derive(Debug, Clone, PartialEq)]
pub struct ClosureCheck<P> {
    pub closed: Decision,
    pub rule: String,
    /// Events `p = (0, x)`, `q = (L, y)` with `q` in the closure of `J+(p)` but not in `J+(p)`.
    pub witness: Option<(Event<P>, Event<P>)>,
    pub witness_relation: Option<Relation>,
}

/// Whether `J` is closed, with a `ClosureOnly` witness pair when it is not.
pub fn is_causal_relation_closed<B: BaseGeometry>(base: &B) -> Result<ClosureCheck<B::Point>> {
    let c = base.convexity();
    let mut out = ClosureCheck { closed: c.convex, rule: c.rule, witness: None, witness_relation: None };
    if let Some((x, y)) = c.witness {
        let d = base.distance(&x, &y)?;
        let l = d.infimum.to_f64();
        let p = Event::new(0.0, x);
        let q = Event::new(l, y);
        out.witness_relation = Some(classify(&p, &q, base)?.relation);
        out.witness = Some((p, q));
    }
    Ok(out)
}

/// Outcome of a sampled reflectivity sweep.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReflectivityReport {
    pub base: String,
    pub seed: u64,
    pub samples: u64,
    /// Pairs with `q` in the closure of `I+(p)`.
    pub future_closure: u64,
    /// Pairs with `p` in the closure of `I-(q)`.
    pub past_closure: u64,
    /// Pairs where exactly one of the two closure memberships holds.
    pub violations: u64,
    pub indeterminate: u64,
    /// Pairs classified `ClosureOnly` (points of `cl J` outside `J`).
    pub closure_only: u64,
    pub first_violation: Option<u64>,
}

/// Share of samples drawn on the boundary `dt = d`.
const BOUNDARY_FRACTION: f64 = 0.25;
/// Window for `dt` on generic samples.
const DT_WINDOW: (f64, f64) = (-2.0, 8.0);

#[derive(Default)]
struct Tally {
    future: u64,
    past: u64,
    violations: u64,
    indeterminate: u64,
    closure_only: u64,
    first_violation: Option<u64>,
}

impl Tally {
    fn merge(mut self, o: Tally) -> Tally {
        self.future += o.future;
        self.past += o.past;
        self.violations += o.violations;
        self.indeterminate += o.indeterminate;
        self.closure_only += o.closure_only;
        self.first_violation = match (self.first_violation, o.first_violation) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        self
    }
}

/// Deterministic generator for sample `index` of a sweep seeded by `seed`.
pub fn sample_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

pub type EventPair<P> = (Event<P>, Event<P>);

/// Draw the event pair used as sample `index`.
pub fn sample_events<B: BaseGeometry>(base: &B, seed: u64, index: u64) -> Result<EventPair<B::Point>> {
    let mut rng = sample_rng(seed, index);
    let boundary = rng.random_bool(BOUNDARY_FRACTION);
    let (x, y) = base.sample_pair(&mut rng, boundary);
    let t_p = (rng.random_range(-4.0..4.0) * 256.0_f64).round() / 256.0;
    let dt = if boundary {
        let d = base.distance(&x, &y)?.infimum;
        match &d {
            Length::Exact(v) => rational_to_f64(v),
            Length::Sqrt(_) => d.to_f64(),
            Length::Bounded(_) => rng.random_range(DT_WINDOW.0..DT_WINDOW.1),
        }
    } else {
        rng.random_range(DT_WINDOW.0..DT_WINDOW.1)
    };
    Ok((Event::new(t_p, x), Event::new(t_p + dt, y)))
}

/// Check `q ∈ cl I+(p) ⇔ p ∈ cl I-(q)` on `n` sampled pairs.
///
/// The two memberships are evaluated separately: the first through
/// `d(x_p, x_q) <= t_q - t_p`, the second through `d(x_q, x_p) <= t_q - t_p`.
pub fn check_reflectivity_samples<B: BaseGeometry>(base: &B, n: u64, seed: u64) -> Result<ReflectivityReport> {
    let tally = (0..n)
        .into_par_iter()
        .map(|i| -> Result<Tally> {
            let (p, q) = sample_events(base, seed, i)?;
            let dt = rational(q.t) - rational(p.t);
            let fwd = classify(&p, &q, base)?;
            let back = base.distance(&q.x, &p.x)?;
            let future = fwd.relation.in_closure();
            let past = match back.infimum.compare(&dt) {
                Some(Ordering::Greater) => Decision::False,
                Some(_) => Decision::True,
                None => Decision::Indeterminate,
            };
            let mut t = Tally::default();
            match (future.known(), past.known()) {
                (Some(f), Some(b)) => {
                    t.future = f as u64;
                    t.past = b as u64;
                    if f != b {
                        t.violations = 1;
                        t.first_violation = Some(i);
                    }
                }
                _ => t.indeterminate = 1,
            }
            t.closure_only = (fwd.relation == Relation::ClosureOnly) as u64;
            Ok(t)
        })
        .try_reduce(Tally::default, |a, b| Ok(a.merge(b)))?;
    Ok(ReflectivityReport {
        base: base.name(),
        seed,
        samples: n,
        future_closure: tally.future,
        past_closure: tally.past,
        violations: tally.violations,
        indeterminate: tally.indeterminate,
        closure_only: tally.closure_only,
        first_violation: tally.first_violation,
    })
}

/// `J` closed and reflecting on samples, for checking the one-way implication
/// "closed causal relation implies reflecting".
#[derive(Debug, Clone, PartialEq)]
pub struct LadderCheck {
    pub closed: Decision,
    pub reflectivity: ReflectivityReport,
}

impl LadderCheck {
    /// `closed => no violations`.
    pub fn implication_holds(&self) -> bool {
        !self.closed.is_true() || self.reflectivity.violations == 0
    }

    /// Reflecting on all samples while `J` is not closed.
    pub fn reflecting_but_not_closed(&self) -> bool {
        self.closed.is_false() && self.reflectivity.violations == 0
    }
}

pub fn ladder_check<B: BaseGeometry>(base: &B, n: u64, seed: u64) -> Result<LadderCheck> {
    Ok(LadderCheck {
        closed: is_causal_relation_closed(base)?.closed,
        reflectivity: check_reflectivity_samples(base, n, seed)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn theta() -> f64 {
        cone::sector_angle(0.5).unwrap()
    }

    fn cone_event(t: f64, r: f64, psi: f64) -> Event<ConePoint> {
        Event::new(t, ConePoint::new(r, psi).unwrap())
    }

    #[test]
    fn classify_examples() {
        let base = ConeSurface::new(ConeGeometry::base(theta()).unwrap());
        let p = cone_event(0.0, 1.0, 0.0);
        let q = cone_event(1.5, 1.0, theta() / 2.0);
        let v = classify(&p, &q, &base).unwrap();
        assert_eq!(v.relation, Relation::Chronological);
        assert!((v.margin - (1.5 - 1.2922272743)).abs() < 1e-9);

        let univ = ConeSurface::new(ConeGeometry::universal_cover(Some(theta())).unwrap());
        let q = cone_event(2.0, 1.0, 1.5 * theta());
        assert_eq!(classify(&p, &q, &univ).unwrap().relation, Relation::ClosureOnly);
        assert_eq!(classify(&p, &p, &univ).unwrap().relation, Relation::Equal);
    }

    #[test]
    fn radial_null_pair_is_causal_not_chronological() {
        let base = ConeSurface::new(ConeGeometry::base(theta()).unwrap());
        let p = cone_event(0.0, 1.0, 0.3);
        let q = cone_event(1.0, 2.0, 0.3);
        assert_eq!(classify(&p, &q, &base).unwrap().relation, Relation::CausalNotChronological);
        let q = cone_event(-1.0, 2.0, 0.3);
        assert_eq!(classify(&p, &q, &base).unwrap().relation, Relation::Unrelated);
        let q = cone_event(0.0, 1.0, 0.4);
        assert_eq!(classify(&p, &q, &base).unwrap().relation, Relation::Unrelated);
    }

    #[test]
    fn borderline_comparison_is_indeterminate() {
        let base = ConeSurface::new(ConeGeometry::base(theta()).unwrap());
        let p = cone_event(0.0, 1.0, 0.0);
        let d = 2.0 * (theta() / 4.0).sin();
        let q = cone_event(d, 1.0, theta() / 2.0);
        assert_eq!(classify(&p, &q, &base).unwrap().relation, Relation::Indeterminate);
    }

    #[test]
    fn closure_of_j_follows_convexity() {
        let c = is_causal_relation_closed(&ConeSurface::new(ConeGeometry::base(theta()).unwrap())).unwrap();
        assert_eq!(c.closed, Decision::True);
        assert!(c.witness.is_none());

        let c = is_causal_relation_closed(&ConeSurface::new(ConeGeometry::universal_cover(Some(theta())).unwrap())).unwrap();
        assert_eq!(c.closed, Decision::False);
        assert_eq!(c.witness_relation, Some(Relation::ClosureOnly));
        let (p, q) = c.witness.unwrap();
        assert_eq!((p.t, q.t), (0.0, 2.0));

        let c = is_causal_relation_closed(&ConeSurface::new(ConeGeometry::cyclic_cover(theta(), 2).unwrap())).unwrap();
        assert_eq!(c.closed, Decision::True);
        let c = is_causal_relation_closed(&ConeSurface::new(ConeGeometry::cyclic_cover(theta(), 3).unwrap())).unwrap();
        assert_eq!(c.closed, Decision::False);
        assert_eq!(c.witness_relation, Some(Relation::ClosureOnly));
    }

    #[test]
    fn punctured_euclidean_base() {
        let base = PuncturedEuclidean::new(2, vec![vec![0.0, 0.0], vec![1.0, 1.0]]).unwrap();
        let d = base.distance(&vec![-1.0, 0.0], &vec![1.0, 0.0]).unwrap();
        assert_eq!(d.infimum.compare(&rational(2.0)), Some(Ordering::Equal));
        assert_eq!(d.attained, Decision::False);
        let d = base.distance(&vec![-1.0, 0.5], &vec![1.0, 0.5]).unwrap();
        assert_eq!(d.attained, Decision::True);
        // The puncture (1,1) sits at the endpoint side, not strictly inside.
        let d = base.distance(&vec![0.5, 0.5], &vec![2.0, 2.0]).unwrap();
        assert_eq!(d.attained, Decision::False);
        let d = base.distance(&vec![2.0, 2.0], &vec![3.0, 3.0]).unwrap();
        assert_eq!(d.attained, Decision::True);
        assert!(base.distance(&vec![0.0, 0.0], &vec![1.0, 0.0]).is_err());

        let c = is_causal_relation_closed(&base).unwrap();
        assert_eq!(c.closed, Decision::False);
        assert_eq!(c.witness_relation, Some(Relation::ClosureOnly));
        let flat = PuncturedEuclidean::new(3, vec![]).unwrap();
        assert_eq!(is_causal_relation_closed(&flat).unwrap().closed, Decision::True);
        assert!(PuncturedEuclidean::new(1, vec![]).is_err());
    }

    #[test]
    fn empty_sweep() {
        let base = ConeSurface::new(ConeGeometry::base(theta()).unwrap());
        let r = check_reflectivity_samples(&base, 0, 7).unwrap();
        assert_eq!((r.samples, r.violations, r.first_violation), (0, 0, None));
    }

    #[test]
    fn sweeps_are_reflecting_and_find_closure_points_only_when_not_closed() {
        for geom in [
            ConeGeometry::base(theta()).unwrap(),
            ConeGeometry::cyclic_cover(theta(), 2).unwrap(),
            ConeGeometry::universal_cover(Some(theta())).unwrap(),
        ] {
            let base = ConeSurface::new(geom);
            let l = ladder_check(&base, 2000, 11).unwrap();
            assert_eq!(l.reflectivity.violations, 0, "{geom:?}");
            assert!(l.implication_holds());
            assert_eq!(l.reflectivity.closure_only > 0, l.closed.is_false(), "{geom:?}");
        }
    }

    proptest! {
        #[test]
        fn verdict_is_monotone_in_dt(
            r1 in 0.1f64..5.0, r2 in 0.1f64..5.0, a in -10.0f64..10.0, b in -10.0f64..10.0,
            t1 in -5.0f64..10.0, t2 in -5.0f64..10.0,
        ) {
            let base = ConeSurface::new(ConeGeometry::universal_cover(None).unwrap());
            let p = cone_event(0.0, r1, a);
            let (lo, hi) = if t1 <= t2 { (t1, t2) } else { (t2, t1) };
            let v1 = classify(&p, &cone_event(lo, r2, b), &base).unwrap().relation;
            let v2 = classify(&p, &cone_event(hi, r2, b), &base).unwrap().relation;
            if let (Some(x), Some(y)) = (v1.rank(), v2.rank()) {
                prop_assert!(x <= y, "{v1:?} at {lo} vs {v2:?} at {hi}");
            }
        }

        #[test]
        fn time_duality(
            r1 in 0.1f64..5.0, r2 in 0.1f64..5.0, a in 0.0f64..2.8, b in 0.0f64..2.8,
            t1 in -5.0f64..5.0, t2 in -5.0f64..5.0,
        ) {
            let base = ConeSurface::new(ConeGeometry::base(theta()).unwrap());
            let p = cone_event(t1, r1, a);
            let q = cone_event(t2, r2, b);
            let fwd = classify(&p, &q, &base).unwrap();
            let dual = classify(&time_dual(&q), &time_dual(&p), &base).unwrap();
            prop_assert_eq!(fwd.relation, dual.relation);
        }

        #[test]
        fn closure_only_iff_base_infimum_not_attained(seed in any::<u64>(), index in 0u64..1000) {
            let base = ConeSurface::new(ConeGeometry::universal_cover(None).unwrap());
            let (p, q) = sample_events(&base, seed, index).unwrap();
            let v = classify(&p, &q, &base).unwrap();
            if v.relation == Relation::ClosureOnly {
                prop_assert_eq!(v.distance.attained, Decision::False);
            }
            if v.distance.attained == Decision::False && v.distance.infimum.compare(&v.delta_t) == Some(Ordering::Equal) {
                prop_assert_eq!(v.relation, Relation::ClosureOnly);
            }
        }
    }
}
