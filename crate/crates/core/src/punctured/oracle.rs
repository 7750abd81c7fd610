//! Grid search over axis-crossing timelike paths, used to cross-check the exact
//! predicates.
//!
//! In flat space a t-monotone timelike path from `p` (below the axis) to `q`
//! (above it) can be straightened on each side of its crossing point `c`, so
//! paths are enumerated through their crossing point only:
//!
//! * the inner pass walks grid points `c = i/n` inside the gap and accepts a
//!   path when both legs have slope at most `1 - delta`; a hit is a genuine
//!   timelike path;
//! * the outer pass is an obstruction test: it asks whether any crossing point lies
//!   in the open gap and in both open leg windows at all; if none does, no path
//!   exists.
//!
//! Closure queries replace the approached endpoint by a ball of radius `rho`.
//! Every point of the ball reached through the gap forces the vertically shifted
//! endpoint (shift `2 rho`) to be reached as well, which gives the outer bound; the
//! inner pass samples points of the ball.

use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};

use super::{crossing_shape, Gap, PlaneEvent, Q};
use crate::error::{domain, Result};
use crate::interval::Decision;

/// Grid oracle at resolution `1/n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridOracle {
    n: i64,
    /// Inner slope bound is `1 - delta`.
    pub delta: f64,
    /// Smallest ball radius, in grid cells, for the inner pass.
    pub inner_cells: f64,
    /// Smallest ball radius, in grid cells, for the outer pass.
    pub outer_cells: f64,
}

/// Strict leg window `(centre - half, centre + half)` around an endpoint.
struct Leg {
    centre: Q,
    half: Q,
}

#[derive(Clone, Copy)]
struct Point {
    t: f64,
    x: f64,
}

impl GridOracle {
    pub fn new(resolution: f64) -> Result<Self> {
        if !(resolution.is_finite() && resolution > 0.0 && resolution <= 1.0) {
            return Err(domain(format!("grid resolution must lie in (0, 1], got {resolution}")));
        }
        let n = (1.0 / resolution).round() as i64;
        Ok(GridOracle { n, delta: 1.0 / n as f64, inner_cells: 5.0, outer_cells: 0.25 })
    }

    pub fn resolution(&self) -> f64 {
        1.0 / self.n as f64
    }

    /// Grid index range `[lo, hi]` of points strictly inside the gap.
    fn gap_indices(&self, g: &Gap) -> (i128, i128) {
        let n = self.n as i128;
        match *g {
            Gap::Left => (i128::MIN / 4, -n - 1),
            Gap::Right => (1, i128::MAX / 4),
            Gap::Mid(k) => {
                let k = k as i128;
                // -1/k < i/n  <=>  i > -n/k ;  i/n < -1/(k+1)  <=>  i < -n/(k+1).
                let lo = Integer::div_floor(&-n, &k) + 1;
                let hi = -Integer::div_floor(&n, &(k + 1)) - 1;
                (lo, hi)
            }
        }
    }

    /// Inner pass: a grid crossing joined to `a` and `b` by legs of slope `<= 1 - delta`.
    fn inner(&self, g: &Gap, a: Point, b: Point) -> bool {
        let n = self.n as f64;
        let slope = 1.0 - self.delta;
        let (wa, wb) = (slope * a.t.abs(), slope * b.t.abs());
        let lo = (a.x - wa).max(b.x - wb);
        let hi = (a.x + wa).min(b.x + wb);
        if lo > hi {
            return false;
        }
        let (g_lo, g_hi) = self.gap_indices(g);
        let i_lo = ((lo * n).floor() as i128 - 1).max(g_lo);
        let i_hi = ((hi * n).ceil() as i128 + 1).min(g_hi);
        (i_lo..=i_hi).any(|i| {
            let c = i as f64 / n;
            (c - a.x).abs() <= wa && (b.x - c).abs() <= wb
        })
    }

    /// Outer pass: whether any crossing point lies in the open gap and both open leg
    /// windows. A real path crosses at such a point, so `false` rules paths out.
    fn outer(&self, g: &Gap, a: &Leg, b: &Leg) -> bool {
        let lo = (&a.centre - &a.half).max(&b.centre - &b.half);
        let hi = (&a.centre + &a.half).min(&b.centre + &b.half);
        let lo = match g.lower() {
            Some(l) => lo.max(l),
            None => lo,
        };
        let hi = match g.upper() {
            Some(u) => hi.min(u),
            None => hi,
        };
        lo < hi
    }

    fn leg(e: &PlaneEvent, extra: &Q) -> Leg {
        Leg { centre: e.x.clone(), half: e.t.abs() + extra }
    }

    fn point(e: &PlaneEvent) -> Point {
        let (t, x) = e.to_f64();
        Point { t, x }
    }

    /// Is there a timelike path from `p` to `q` crossing the axis in `g`?
    pub fn chron(&self, p: &PlaneEvent, q: &PlaneEvent, g: &Gap) -> Result<Decision> {
        crossing_shape(p, q)?;
        if self.inner(g, Self::point(p), Self::point(q)) {
            return Ok(Decision::True);
        }
        let zero = Q::zero();
        if !self.outer(g, &Self::leg(p, &zero), &Self::leg(q, &zero)) {
            return Ok(Decision::False);
        }
        Ok(Decision::Indeterminate)
    }

    /// Ball radii for approaching `moving`: halving from `min(1/4, |t|/4)`.
    fn radii(&self, moving: &PlaneEvent, cells: f64) -> Vec<f64> {
        let h = self.resolution();
        let mut rho = (moving.t.abs().to_f64().unwrap_or(0.0) / 4.0).min(0.25);
        let mut out = Vec::new();
        while rho >= cells * h {
            out.push(rho);
            rho *= 0.5;
        }
        out
    }

    fn closure(&self, fixed: &PlaneEvent, moving: &PlaneEvent, g: &Gap, future: bool) -> Result<Decision> {
        // Outer bound at the smallest radius is the strongest.
        if let Some(&rho) = self.radii(moving, self.outer_cells).last() {
            let shift = Q::from_float(2.0 * rho).expect("finite radius");
            let (a, b) = (Self::leg(fixed, &Q::zero()), Self::leg(moving, &shift));
            if !self.outer(g, &a, &b) {
                return Ok(Decision::False);
            }
        }
        let levels = self.radii(moving, self.inner_cells);
        if levels.is_empty() {
            return Ok(Decision::Indeterminate);
        }
        let f = Self::point(fixed);
        let m = Self::point(moving);
        let found_everywhere = levels.iter().all(|&rho| {
            ball_samples(m, 0.9 * rho).into_iter().any(|m2| {
                if future {
                    self.inner(g, f, m2)
                } else {
                    self.inner(g, m2, f)
                }
            })
        });
        Ok(if found_everywhere { Decision::True } else { Decision::Indeterminate })
    }

    /// `q ∈ cl Ĩ+(p)` on the sheet of `g`, approaching `q`.
    pub fn closure_future(&self, p: &PlaneEvent, q: &PlaneEvent, g: &Gap) -> Result<Decision> {
        crossing_shape(p, q)?;
        self.closure(p, q, g, true)
    }

    /// `p ∈ cl Ĩ-(q)` on the sheet of `g`, approaching `p`.
    pub fn closure_past(&self, p: &PlaneEvent, q: &PlaneEvent, g: &Gap) -> Result<Decision> {
        crossing_shape(p, q)?;
        self.closure(q, p, g, false)
    }
}

/// Centre and eight points on the circle of radius `r`.
fn ball_samples(c: Point, r: f64) -> Vec<Point> {
    let mut out = vec![c];
    for j in 0..8 {
        let a = j as f64 * std::f64::consts::FRAC_PI_4;
        out.push(Point { t: c.t + r * a.sin(), x: c.x + r * a.cos() });
    }
    out
}

/// Grid search for a timelike path from `p` to `q` crossing in `sheet`.
pub fn oracle_grid_search(p: &PlaneEvent, q: &PlaneEvent, sheet: Gap, resolution: f64) -> Result<Decision> {
    GridOracle::new(resolution)?.chron(p, q, &sheet)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ev(t: &str, x: &str) -> PlaneEvent {
        PlaneEvent::parse(t, x).unwrap()
    }

    #[test]
    fn gap_index_ranges_are_exact() {
        let o = GridOracle::new(1e-3).unwrap();
        assert_eq!(o.gap_indices(&Gap::Mid(1)), (-999, -501));
        assert_eq!(o.gap_indices(&Gap::Mid(3)), (-333, -251));
        assert_eq!(o.gap_indices(&Gap::Mid(4)), (-249, -201));
        assert_eq!(o.gap_indices(&Gap::Left).1, -1001);
        assert_eq!(o.gap_indices(&Gap::Right).0, 1);
        // Mid(1000) = (-0.001, -0.000999...) holds no grid point.
        let (lo, hi) = o.gap_indices(&Gap::Mid(1000));
        assert!(lo > hi);
    }

    #[test]
    fn trivial_instances() {
        assert_eq!(oracle_grid_search(&ev("-1", "1"), &ev("1.1", "-1"), Gap::Right, 1e-3).unwrap(), Decision::True);
        assert_eq!(oracle_grid_search(&ev("-1", "1"), &ev("1.1", "-1"), Gap::Mid(1), 1e-3).unwrap(), Decision::False);
        assert_eq!(oracle_grid_search(&ev("-1", "5"), &ev("1", "-5"), Gap::Right, 1e-3).unwrap(), Decision::False);
        assert_eq!(oracle_grid_search(&ev("-1", "0.5"), &ev("1", "0.5"), Gap::Right, 1e-3).unwrap(), Decision::True);
        assert!(oracle_grid_search(&ev("1", "0"), &ev("2", "0"), Gap::Right, 1e-3).is_err());
        assert!(GridOracle::new(0.0).is_err());
    }

    #[test]
    fn headline_pair_is_decided() {
        let o = GridOracle::new(1e-3).unwrap();
        let (p, q) = (ev("-1", "1"), ev("1", "-1"));
        assert_eq!(o.chron(&p, &q, &Gap::Right).unwrap(), Decision::False);
        assert_eq!(o.closure_future(&p, &q, &Gap::Right).unwrap(), Decision::True);
        assert_eq!(o.closure_past(&p, &q, &Gap::Right).unwrap(), Decision::False);
        assert_eq!(o.closure_future(&p, &q, &Gap::Mid(7)).unwrap(), Decision::False);
        assert_eq!(o.closure_past(&p, &q, &Gap::Mid(7)).unwrap(), Decision::False);
    }
}
