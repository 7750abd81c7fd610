//! Brute-force distance oracle: Dijkstra on a polar point mesh of the developed domain.
//!
//! Nodes sit on concentric rings `r_min <= r <= r_max`; the disc `r < r_min` around the
//! apex is left empty. Every node is joined to every other node within planar
//! distance `reach * resolution`, provided the developed angle between them is below
//! pi/2, so each edge is a genuine straight chord on the cone that misses the apex.
//! Graph distances are therefore lengths of real curves and never undercut the true
//! infimum; they converge to it as the resolution and `r_min` shrink.
//!
//! Edge lengths use Cartesian coordinates in the developed plane and share no code
//! with the closed-form distance.

use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::f64::consts::{FRAC_PI_2, PI};

use super::{ConeGeometry, ConePoint};
use crate::error::{domain, Result};

/// Calibrated constant `C` in `0 <= oracle - exact <= C * (resolution + r_min)`.
pub const MESH_ERROR_CONSTANT: f64 = 0.25;

/// Mesh parameters. `r_min`/`r_max` default to `1e-3 * min(r)` and `4 * max(r)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeshOracle {
    pub resolution: f64,
    /// Neighbourhood radius in units of `resolution`.
    pub reach: f64,
    pub r_min: Option<f64>,
    pub r_max: Option<f64>,
}

impl MeshOracle {
    pub fn new(resolution: f64) -> Self {
        MeshOracle { resolution, reach: 5.0, r_min: None, r_max: None }
    }

    /// Hole radius and outer radius used for the pair `(p, q)`.
    pub fn truncation(&self, p: &ConePoint, q: &ConePoint) -> (f64, f64) {
        (
            self.r_min.unwrap_or(1e-3 * p.r.min(q.r)),
            self.r_max.unwrap_or(4.0 * p.r.max(q.r)),
        )
    }

    /// Calibrated upper bound on `oracle - exact` for the pair `(p, q)`.
    pub fn error_bound(&self, p: &ConePoint, q: &ConePoint) -> f64 {
        MESH_ERROR_CONSTANT * (self.resolution + self.truncation(p, q).0)
    }

    pub fn distance(&self, p: &ConePoint, q: &ConePoint, geom: &ConeGeometry) -> Result<f64> {
        if !(self.resolution.is_finite() && self.resolution > 0.0) {
            return Err(domain(format!("resolution must be positive, got {}", self.resolution)));
        }
        if !(self.reach >= 1.5) {
            return Err(domain("mesh reach must be at least 1.5 cells"));
        }
        let (r_min, r_max) = self.truncation(p, q);
        for x in [p, q] {
            if !(x.r >= r_min && x.r <= r_max) {
                return Err(domain(format!("point radius {} outside mesh truncation [{r_min}, {r_max}]", x.r)));
            }
        }
        if p == q {
            return Ok(0.0);
        }
        let mesh = Mesh::build(p, q, geom, self.resolution, self.reach * self.resolution, r_min, r_max);
        Ok(mesh.shortest_path())
    }
}

/// Convenience wrapper with default reach and truncation.
pub fn oracle_distance(p: &ConePoint, q: &ConePoint, geom: &ConeGeometry, resolution: f64) -> Result<f64> {
    MeshOracle::new(resolution).distance(p, q, geom)
}

#[derive(Debug, Clone, Copy)]
enum Angular {
    /// Angles are taken modulo `period`.
    Periodic { period: f64 },
    /// Angles range over `[lo, hi]`.
    Open { lo: f64, hi: f64 },
}

struct Ring {
    r: f64,
    count: usize,
    step: f64,
    offset: usize,
}

struct Mesh {
    rings: Vec<Ring>,
    ring_step: f64,
    r_min: f64,
    angular: Angular,
    extra: [ConePoint; 2],
    reach: f64,
    nodes: usize,
}

impl Mesh {
    fn build(
        p: &ConePoint,
        q: &ConePoint,
        geom: &ConeGeometry,
        h: f64,
        reach: f64,
        r_min: f64,
        r_max: f64,
    ) -> Self {
        let angular = match geom.total_angle() {
            Some(period) => Angular::Periodic { period },
            None => Angular::Open { lo: p.psi.min(q.psi) - 1.0, hi: p.psi.max(q.psi) + 1.0 },
        };
        let span = match angular {
            Angular::Periodic { period } => period,
            Angular::Open { lo, hi } => hi - lo,
        };
        let n_rings = ((r_max - r_min) / h).ceil().max(1.0) as usize;
        let ring_step = (r_max - r_min) / n_rings as f64;
        let min_count = (span / (PI / 8.0)).ceil() as usize;
        let mut rings = Vec::with_capacity(n_rings + 1);
        let mut offset = 0;
        for i in 0..=n_rings {
            let r = r_min + i as f64 * ring_step;
            let count = ((span * r / h).ceil() as usize).max(min_count).max(3);
            let step = match angular {
                Angular::Periodic { .. } => span / count as f64,
                Angular::Open { .. } => span / (count - 1) as f64,
            };
            rings.push(Ring { r, count, step, offset });
            offset += count;
        }
        Mesh { rings, ring_step, r_min, angular, extra: [*p, *q], reach, nodes: offset }
    }

    fn source(&self) -> usize {
        self.nodes
    }

    fn target(&self) -> usize {
        self.nodes + 1
    }

    /// Planar distance between polar points whose developed angles differ by `dphi`.
    fn planar(r1: f64, r2: f64, dphi: f64) -> f64 {
        let (x1, y1) = (r1, 0.0);
        let (x2, y2) = (r2 * dphi.cos(), r2 * dphi.sin());
        (x2 - x1).hypot(y2 - y1)
    }

    fn position(&self, node: usize) -> (f64, f64) {
        if node >= self.nodes {
            let x = self.extra[node - self.nodes];
            return (x.r, x.psi);
        }
        let i = self.rings.partition_point(|ring| ring.offset <= node) - 1;
        let ring = &self.rings[i];
        let j = node - ring.offset;
        let phi = match self.angular {
            Angular::Periodic { .. } => j as f64 * ring.step,
            Angular::Open { lo, .. } => lo + j as f64 * ring.step,
        };
        (ring.r, phi)
    }

    /// All developed angle differences `target - phi` (one per lift) with `|diff| <= pi/2`.
    fn lifts(&self, phi: f64, target: f64, out: &mut Vec<f64>) {
        out.clear();
        match self.angular {
            Angular::Periodic { period } => {
                let lo = ((phi - target - FRAC_PI_2) / period).ceil() as i64;
                let hi = ((phi - target + FRAC_PI_2) / period).floor() as i64;
                for k in lo..=hi {
                    out.push(target + k as f64 * period - phi);
                }
            }
            Angular::Open { .. } => {
                let d = target - phi;
                if d.abs() <= FRAC_PI_2 {
                    out.push(d);
                }
            }
        }
    }

    fn neighbours(&self, node: usize, out: &mut Vec<(usize, f64)>) {
        out.clear();
        let (r, phi) = self.position(node);
        let reach = self.reach;

        let i_lo = ((r - reach - self.r_min) / self.ring_step).ceil().max(0.0) as usize;
        let i_hi = ((r + reach - self.r_min) / self.ring_step).floor();
        let i_hi = if i_hi < 0.0 { 0 } else { (i_hi as usize + 1).min(self.rings.len()) };
        for i in i_lo..i_hi {
            let ring = &self.rings[i];
            let inner = r.min(ring.r);
            let window = if reach >= 2.0 * inner {
                FRAC_PI_2
            } else {
                (2.0 * (reach / (2.0 * inner)).asin()).min(FRAC_PI_2)
            };
            let base = match self.angular {
                Angular::Periodic { .. } => 0.0,
                Angular::Open { lo, .. } => lo,
            };
            let j_lo = ((phi - window - base) / ring.step).ceil() as i64;
            let j_hi = ((phi + window - base) / ring.step).floor() as i64;
            for j in j_lo..=j_hi {
                let idx = match self.angular {
                    Angular::Periodic { .. } => j.rem_euclid(ring.count as i64) as usize,
                    Angular::Open { .. } => {
                        if j < 0 || j >= ring.count as i64 {
                            continue;
                        }
                        j as usize
                    }
                };
                let other = ring.offset + idx;
                if other == node {
                    continue;
                }
                let dphi = base + j as f64 * ring.step - phi;
                if dphi.abs() > FRAC_PI_2 {
                    continue;
                }
                let len = Self::planar(r, ring.r, dphi);
                if len <= reach {
                    out.push((other, len));
                }
            }
        }

        let mut lifts = Vec::new();
        for (k, x) in self.extra.iter().enumerate() {
            let other = self.nodes + k;
            if other == node || (x.r - r).abs() > reach {
                continue;
            }
            self.lifts(phi, x.psi, &mut lifts);
            for &dphi in &lifts {
                let len = Self::planar(r, x.r, dphi);
                if len <= reach {
                    out.push((other, len));
                }
            }
        }
    }

    fn shortest_path(&self) -> f64 {
        let total = self.nodes + 2;
        let mut dist = vec![f64::INFINITY; total];
        let mut heap = BinaryHeap::new();
        let (src, dst) = (self.source(), self.target());
        dist[src] = 0.0;
        heap.push(Reverse((Key(0.0), src)));
        let mut adj = Vec::new();
        while let Some(Reverse((Key(d), u))) = heap.pop() {
            if u == dst {
                return d;
            }
            if d > dist[u] {
                continue;
            }
            self.neighbours(u, &mut adj);
            for &(v, w) in &adj {
                let nd = d + w;
                if nd < dist[v] {
                    dist[v] = nd;
                    heap.push(Reverse((Key(nd), v)));
                }
            }
        }
        f64::INFINITY
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Key(f64);

impl Eq for Key {}

impl PartialOrd for Key {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Key {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.total_cmp(&other.0)
    }
}
