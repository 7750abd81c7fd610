//! Flat cones without apex, their finite cyclic covers and their universal cover.
//!
//! Everything works in developed (unwrapped) polar coordinates: a point is a
//! radius `r > 0` and an angle `psi`, and the induced metric is
//! `dr^2 + r^2 dpsi^2`. A curve between two points in a fixed winding class
//! develops to a planar curve whose endpoints are separated by the angle
//! `(psi_q - psi_p) + w * total_angle`. If that separation is below pi the class
//! contains a straight segment; otherwise the infimum of lengths in the class is
//! `r_p + r_q`, approached by curves that run into the missing apex.

pub mod oracle;

use std::cmp::Ordering;
use std::f64::consts::PI;

use num_traits::Signed;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::interval::{rational, Decision, Interval, Length, DEFAULT_EPS};

pub use oracle::{oracle_distance, MeshOracle};

/// Total angle of the developed sector of the cone `(A u cos v, A u sin v, u)`.
///
/// Returns `2 A pi / sqrt(1 + A^2)`, which lies in `(0, 2 pi)`.
pub fn sector_angle(a: f64) -> Result<f64> {
    if !(a.is_finite() && a > 0.0) {
        return Err(domain(format!("cone slope must be positive and finite, got {a}")));
    }
    Ok(2.0 * a * PI / (1.0 + a * a).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConeKind {
    BaseCone,
    CyclicCover,
    UniversalCover,
}

/// A flat cone, one of its k-fold cyclic covers, or its universal cover.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ConeGeometry {
    BaseCone { angle: f64 },
    CyclicCover { base_angle: f64, fold: u32 },
    /// The universal cover has no total angle. `deck_angle` optionally records
    /// the angle of the cone being covered; it only seeds witness points.
    UniversalCover { deck_angle: Option<f64> },
}

fn check_base_angle(angle: f64) -> Result<()> {
    if !(angle.is_finite() && angle > 0.0 && angle < 2.0 * PI) {
        return Err(domain(format!("cone angle must lie in (0, 2pi), got {angle}")));
    }
    Ok(())
}

impl ConeGeometry {
    pub fn base(angle: f64) -> Result<Self> {
        check_base_angle(angle)?;
        Ok(ConeGeometry::BaseCone { angle })
    }

    /// The base cone with sector angle `sector_angle(a)`.
    pub fn from_slope(a: f64) -> Result<Self> {
        ConeGeometry::base(sector_angle(a)?)
    }

    pub fn cyclic_cover(base_angle: f64, fold: u32) -> Result<Self> {
        check_base_angle(base_angle)?;
        if fold == 0 {
            return Err(domain("cover fold must be at least 1"));
        }
        Ok(ConeGeometry::CyclicCover { base_angle, fold })
    }

    pub fn universal_cover(deck_angle: Option<f64>) -> Result<Self> {
        if let Some(angle) = deck_angle {
            check_base_angle(angle)?;
        }
        Ok(ConeGeometry::UniversalCover { deck_angle })
    }

    pub fn kind(&self) -> ConeKind {
        match self {
            ConeGeometry::BaseCone { .. } => ConeKind::BaseCone,
            ConeGeometry::CyclicCover { .. } => ConeKind::CyclicCover,
            ConeGeometry::UniversalCover { .. } => ConeKind::UniversalCover,
        }
    }

    /// Developed angle of a fundamental domain; `None` for the universal cover.
    pub fn total_angle(&self) -> Option<f64> {
        match *self {
            ConeGeometry::BaseCone { angle } => Some(angle),
            ConeGeometry::CyclicCover { base_angle, fold } => Some(base_angle * fold as f64),
            ConeGeometry::UniversalCover { .. } => None,
        }
    }

    /// Largest `|w|` that can still bring two points of a fundamental domain within angle pi.
    pub fn winding_bound(&self) -> i64 {
        match self.total_angle() {
            Some(theta) => (PI / theta).ceil() as i64 + 1,
            None => 0,
        }
    }
}

/// A point of a cone in developed polar coordinates. The apex is not a point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConePoint {
    pub r: f64,
    pub psi: f64,
}

impl ConePoint {
    pub fn new(r: f64, psi: f64) -> Result<Self> {
        if !(r.is_finite() && r > 0.0) {
            return Err(domain(format!("radius must be positive and finite, got {r}")));
        }
        if !psi.is_finite() {
            return Err(domain(format!("angle must be finite, got {psi}")));
        }
        Ok(ConePoint { r, psi })
    }

    /// Planar position in the developed picture.
    pub fn developed(&self) -> (f64, f64) {
        (self.r * self.psi.cos(), self.r * self.psi.sin())
    }
}

/// How the infimum of a distance query is realized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Witness {
    /// A minimizing segment exists in this winding class.
    Winding(i64),
    /// The infimum runs through a removed point and is not attained.
    ApexRoute,
    /// Some candidate separation is within tolerance of pi.
    Undecided,
}

/// Outcome of a distance query.
#[derive(Debug, Clone, PartialEq)]
pub struct GeodesicResult {
    pub infimum: Length,
    pub witness: Witness,
}

impl GeodesicResult {
    pub fn attained(&self) -> Decision {
        match self.witness {
            Witness::Winding(_) => Decision::True,
            Witness::ApexRoute => Decision::False,
            Witness::Undecided => Decision::Indeterminate,
        }
    }
}

/// Angular separation `(psi_q - psi_p) + w * total_angle` of the developed endpoints.
pub fn developed_separation(p: &ConePoint, q: &ConePoint, w: i64, geom: &ConeGeometry) -> Result<f64> {
    match geom.total_angle() {
        Some(theta) => Ok((q.psi - p.psi) + w as f64 * theta),
        None if w == 0 => Ok(q.psi - p.psi),
        None => Err(domain("the universal cover has no winding freedom")),
    }
}

/// Straight-segment length, or the apex route when no segment exists.
#[derive(Debug, Clone, PartialEq)]
pub enum Segment {
    Straight(Length),
    ApexRoute(Length),
    /// `|delta_psi|` cannot be separated from pi at the working tolerance.
    Borderline(Interval),
}

impl Segment {
    pub fn length(&self) -> Length {
        match self {
            Segment::Straight(l) | Segment::ApexRoute(l) => l.clone(),
            Segment::Borderline(iv) => Length::Bounded(*iv),
        }
    }
}

fn check_radii(r_p: f64, r_q: f64) -> Result<()> {
    if !(r_p.is_finite() && r_p > 0.0 && r_q.is_finite() && r_q > 0.0) {
        return Err(domain(format!("radii must be positive, got {r_p} and {r_q}")));
    }
    Ok(())
}

/// `sqrt((a - b)^2 + 4ab sin^2(x/2))`: the planar law of cosines without cancellation.
fn chord(a: f64, b: f64, x: f64) -> f64 {
    let s = (0.5 * x).sin();
    ((a - b) * (a - b) + 4.0 * a * b * s * s).sqrt()
}

fn chord_enclosure(a: f64, b: f64, sep: Interval) -> Interval {
    let lo = chord(a, b, sep.lo.max(0.0));
    let hi = chord(a, b, sep.hi.min(PI));
    let slack = 8.0 * f64::EPSILON;
    Interval::new((lo * (1.0 - slack)).max(0.0), hi * (1.0 + slack))
}

fn apex_length(a: f64, b: f64) -> Length {
    Length::Exact(rational(a) + rational(b))
}

/// Segment length for radii `r_p`, `r_q` and angular separation `delta_psi`, with the
/// default tolerance.
pub fn segment_length(r_p: f64, r_q: f64, delta_psi: f64) -> Result<Segment> {
    if delta_psi == 0.0 {
        return segment_length_with(r_p, r_q, Interval::point(0.0));
    }
    segment_length_with(r_p, r_q, Interval::around(delta_psi, DEFAULT_EPS))
}

/// Segment length given a certified enclosure of the separation.
pub fn segment_length_with(r_p: f64, r_q: f64, separation: Interval) -> Result<Segment> {
    check_radii(r_p, r_q)?;
    if separation.lo == 0.0 && separation.hi == 0.0 {
        return Ok(Segment::Straight(Length::Exact((rational(r_p) - rational(r_q)).abs())));
    }
    let sep = separation.abs();
    Ok(match sep.compare(Interval::pi()) {
        Some(Ordering::Less) => Segment::Straight(Length::Bounded(chord_enclosure(r_p, r_q, sep))),
        Some(_) => Segment::ApexRoute(apex_length(r_p, r_q)),
        None => {
            let straight = chord_enclosure(r_p, r_q, sep);
            Segment::Borderline(straight.hull(apex_length(r_p, r_q).enclosure()))
        }
    })
}

fn validate(p: &ConePoint, geom: &ConeGeometry) -> Result<()> {
    ConePoint::new(p.r, p.psi)?;
    if let ConeGeometry::BaseCone { angle } = geom {
        check_base_angle(*angle)?;
    }
    Ok(())
}

/// Separation enclosure for one winding. Exactly zero only when nothing was rounded.
fn separation_enclosure(p: &ConePoint, q: &ConePoint, w: i64, theta: f64, eps: f64) -> Interval {
    if w == 0 && p.psi == q.psi {
        return Interval::point(0.0);
    }
    let d = (q.psi - p.psi) + w as f64 * theta;
    let scale = p.psi.abs().max(q.psi.abs()).max((w as f64 * theta).abs()).max(1.0);
    Interval::around(d, eps * scale + 4.0 * f64::EPSILON * scale)
}

/// Geodesic distance with the default tolerance.
pub fn distance(p: &ConePoint, q: &ConePoint, geom: &ConeGeometry) -> Result<GeodesicResult> {
    distance_with_eps(p, q, geom, DEFAULT_EPS)
}

/// Infimum of lengths of curves from `p` to `q`, minimized over winding classes.
///
/// Exactly symmetric in `(p, q)`: swapping the points negates every candidate
/// separation, and floating-point rounding commutes with negation.
pub fn distance_with_eps(p: &ConePoint, q: &ConePoint, geom: &ConeGeometry, eps: f64) -> Result<GeodesicResult> {
    validate(p, geom)?;
    validate(q, geom)?;
    if !(eps.is_finite() && eps >= 0.0) {
        return Err(domain(format!("tolerance must be nonnegative, got {eps}")));
    }
    if p == q {
        return Ok(GeodesicResult { infimum: Length::zero(), witness: Witness::Winding(0) });
    }

    let (theta, windings) = match geom.total_angle() {
        Some(theta) => {
            let centre = ((p.psi - q.psi) / theta).round() as i64;
            let k = geom.winding_bound();
            (theta, (centre - k)..=(centre + k))
        }
        None => (0.0, 0..=0),
    };

    let mut best: Option<(Interval, i64, Segment)> = None;
    let mut borderline: Option<Interval> = None;
    for w in windings {
        let sep = separation_enclosure(p, q, w, theta, eps);
        match segment_length_with(p.r, q.r, sep)? {
            seg @ Segment::Straight(_) => {
                let key = sep.abs();
                let better = match &best {
                    None => true,
                    Some((k, bw, _)) => key.mid() < k.mid() || (key.mid() == k.mid() && w.abs() < bw.abs()),
                };
                if better {
                    best = Some((key, w, seg));
                }
            }
            Segment::Borderline(iv) => {
                borderline = Some(borderline.map_or(iv, |b| b.hull(iv)));
            }
            Segment::ApexRoute(_) => {}
        }
    }

    Ok(match (best, borderline) {
        (Some((_, w, seg)), _) => GeodesicResult { infimum: seg.length(), witness: Witness::Winding(w) },
        (None, Some(iv)) => GeodesicResult { infimum: Length::Bounded(iv), witness: Witness::Undecided },
        (None, None) => GeodesicResult { infimum: apex_length(p.r, q.r), witness: Witness::ApexRoute },
    })
}

/// Outcome of a geodesic-convexity decision.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Convexity {
    pub convex: Decision,
    /// A pair with no minimizing geodesic, when not convex.
    pub witness: Option<(ConePoint, ConePoint)>,
    /// The decision rule that produced the verdict.
    pub rule: String,
}

/// Whether every pair of points is joined by a minimizing geodesic.
///
/// Cones and cyclic covers are convex exactly when the total angle is below 2 pi
/// (two points are then at most half the total angle apart in some winding
/// class). The universal cover is never convex.
pub fn is_geodesically_convex(geom: &ConeGeometry) -> Convexity {
    let rule = "total developed angle < 2pi (derived; sufficient condition angle < pi is never contradicted)";
    match geom.total_angle() {
        Some(theta) => {
            let slack = 4.0 * f64::EPSILON * theta;
            let enclosure = Interval::new(theta - slack, theta + slack);
            let convex = match enclosure.compare(Interval::tau()) {
                Some(Ordering::Less) => Decision::True,
                Some(_) => Decision::False,
                None => Decision::Indeterminate,
            };
            let witness = if convex.is_false() {
                Some((ConePoint { r: 1.0, psi: 0.0 }, ConePoint { r: 1.0, psi: 0.5 * theta }))
            } else {
                None
            };
            Convexity { convex, witness, rule: rule.into() }
        }
        None => {
            let psi = match *geom {
                ConeGeometry::UniversalCover { deck_angle: Some(theta) } if 1.5 * theta > PI + 1e-6 => 1.5 * theta,
                _ => 1.5 * PI,
            };
            Convexity {
                convex: Decision::False,
                witness: Some((ConePoint { r: 1.0, psi: 0.0 }, ConePoint { r: 1.0, psi })),
                rule: "universal cover: separations are unbounded".into(),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    const THETA_HALF: f64 = 2.8099258924162904;

    #[test]
    fn sector_angle_values() {
        let theta = sector_angle(0.5).unwrap();
        assert!((theta - 2.809926).abs() < 1e-6);
        assert!((theta.to_degrees() - 160.996).abs() < 1e-3);
        assert!((sector_angle(1.0 / 3f64.sqrt()).unwrap() - PI).abs() < 1e-12);
        assert!((sector_angle(0.5 * FRAC_1_SQRT_2).unwrap() - 2.0 * PI / 3.0).abs() < 1e-12);
    }

    #[test]
    fn sector_angle_rejects_nonpositive_slope() {
        assert!(sector_angle(0.0).is_err());
        assert!(sector_angle(-1.0).is_err());
        assert!(sector_angle(f64::NAN).is_err());
    }

    #[test]
    fn sector_angle_is_increasing_and_bounded() {
        let mut prev = 0.0;
        for i in 1..2000 {
            let a = i as f64 * 0.01;
            let theta = sector_angle(a).unwrap();
            assert!(theta > prev && theta < 2.0 * PI);
            prev = theta;
        }
    }

    #[test]
    fn separation_examples() {
        let g = ConeGeometry::base(THETA_HALF).unwrap();
        let p = ConePoint::new(1.0, 0.0).unwrap();
        let q = ConePoint::new(1.0, THETA_HALF / 2.0).unwrap();
        assert_eq!(developed_separation(&p, &q, 0, &g).unwrap(), THETA_HALF / 2.0);
        assert!((developed_separation(&p, &q, 1, &g).unwrap() - 1.5 * THETA_HALF).abs() < 1e-15);
        assert_eq!(developed_separation(&p, &p, 0, &g).unwrap(), 0.0);
        let u = ConeGeometry::universal_cover(None).unwrap();
        assert!(developed_separation(&p, &q, 1, &u).is_err());
    }

    #[test]
    fn segment_examples() {
        assert_eq!(segment_length(1.0, 1.0, 0.0).unwrap(), Segment::Straight(Length::zero()));
        let l = segment_length(1.0, 1.0, THETA_HALF / 2.0).unwrap().length().to_f64();
        assert!((l - 2.0 * (THETA_HALF / 4.0).sin()).abs() < 1e-14);
        assert!((l - 1.2922272743).abs() < 1e-9);
        match segment_length(1.0, 2.0, 3.5).unwrap() {
            Segment::ApexRoute(len) => assert_eq!(len.compare(&rational(3.0)), Some(Ordering::Equal)),
            other => panic!("expected apex route, got {other:?}"),
        }
        assert!(segment_length(0.0, 1.0, 0.1).is_err());
        assert!(matches!(segment_length(1.0, 1.0, PI).unwrap(), Segment::Borderline(_)));
    }

    #[test]
    fn segment_length_monotone_up_to_pi() {
        let (a, b) = (0.7, 1.9);
        let mut prev = -1.0;
        for i in 0..1000 {
            let x = i as f64 * (PI - 1e-6) / 1000.0;
            let l = chord(a, b, x);
            assert!(l > prev);
            prev = l;
        }
        assert!((chord(a, b, PI - 1e-9) - (a + b)).abs() < 1e-9);
    }

    #[test]
    fn distance_examples() {
        let g = ConeGeometry::base(THETA_HALF).unwrap();
        let p = ConePoint::new(1.0, 0.0).unwrap();
        let q = ConePoint::new(1.0, THETA_HALF / 2.0).unwrap();
        let d = distance(&p, &q, &g).unwrap();
        assert_eq!(d.attained(), Decision::True);
        assert!((d.infimum.to_f64() - 1.2922272743).abs() < 1e-9);

        let u = ConeGeometry::universal_cover(Some(THETA_HALF)).unwrap();
        let q3 = ConePoint::new(1.0, 1.5 * THETA_HALF).unwrap();
        let d = distance(&p, &q3, &u).unwrap();
        assert_eq!(d.witness, Witness::ApexRoute);
        assert_eq!(d.infimum.compare(&rational(2.0)), Some(Ordering::Equal));

        for geom in [g, u, ConeGeometry::cyclic_cover(THETA_HALF, 3).unwrap()] {
            let d = distance(&q, &q, &geom).unwrap();
            assert_eq!(d.infimum, Length::zero());
            assert_eq!(d.attained(), Decision::True);
        }
    }

    #[test]
    fn two_minimizers_on_the_bisector() {
        // a on a side, b on the bisector: windings 0 and -1 tie; the smaller |w| is reported.
        let g = ConeGeometry::base(THETA_HALF).unwrap();
        let p = ConePoint::new(1.0, 0.0).unwrap();
        let q = ConePoint::new(1.0, THETA_HALF / 2.0).unwrap();
        assert_eq!(distance(&p, &q, &g).unwrap().witness, Witness::Winding(0));
    }

    #[test]
    fn radial_distance_is_exact() {
        let g = ConeGeometry::base(1.0).unwrap();
        let p = ConePoint::new(1.0, 0.3).unwrap();
        let q = ConePoint::new(2.0, 0.3).unwrap();
        let d = distance(&p, &q, &g).unwrap();
        assert_eq!(d.infimum, Length::Exact(rational(1.0)));
    }

    #[test]
    fn convexity_examples() {
        let base = ConeGeometry::from_slope(0.5).unwrap();
        assert_eq!(is_geodesically_convex(&base).convex, Decision::True);

        let u = ConeGeometry::universal_cover(Some(THETA_HALF)).unwrap();
        let c = is_geodesically_convex(&u);
        assert_eq!(c.convex, Decision::False);
        let (a, b) = c.witness.unwrap();
        assert_eq!(a, ConePoint { r: 1.0, psi: 0.0 });
        assert!((b.psi - 1.5 * THETA_HALF).abs() < 1e-15);

        let cyc = ConeGeometry::cyclic_cover(THETA_HALF, 3).unwrap();
        let c = is_geodesically_convex(&cyc);
        assert_eq!(c.convex, Decision::False);
        let (a, b) = c.witness.unwrap();
        assert_eq!(distance(&a, &b, &cyc).unwrap().witness, Witness::ApexRoute);
    }

    #[test]
    fn invalid_geometries_are_rejected() {
        assert!(ConeGeometry::base(0.0).is_err());
        assert!(ConeGeometry::base(2.0 * PI).is_err());
        assert!(ConeGeometry::cyclic_cover(1.0, 0).is_err());
        assert!(ConePoint::new(0.0, 1.0).is_err());
        assert!(ConePoint::new(1.0, f64::INFINITY).is_err());
    }
}
