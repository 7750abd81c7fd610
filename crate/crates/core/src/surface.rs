//! Null convergences of codimension-2 surfaces sitting in the slice `t = 0` of
//! flat Minkowski space.
//!
//! Derivatives of the parametrization are taken by central differences in
//! double-double arithmetic, so the truncation error `O(h^2)` stays visible down
//! to `h = 1e-4`. The mean curvature vector is the unaveraged trace of the second
//! fundamental form.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use twofloat::TwoFloat;

use crate::criterion::log_log_slope;
use crate::error::{domain, Error, Result};

/// Normalization of `H` recorded in reports.
pub const NORMALIZATION: &str = "trace";

pub type Parametrization = Box<dyn Fn(&[TwoFloat]) -> Vec<TwoFloat> + Send + Sync>;

/// Which slice normal is `N+`, decided against a reference interior point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SideMarker {
    pub interior: Vec<f64>,
    /// `N+` points away from `interior` when true.
    pub plus_is_outside: bool,
}

/// A compact `(n-2)`-dimensional surface in `{t = 0}` of `n`-dimensional Minkowski space.
pub struct SlicedSurface {
    pub name: String,
    n: usize,
    /// Parameter box; grids sample its interior.
    pub domain: Vec<(f64, f64)>,
    map: Parametrization,
    pub marker: SideMarker,
}

impl std::fmt::Debug for SlicedSurface {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SlicedSurface").field("name", &self.name).field("n", &self.n).field("marker", &self.marker).finish()
    }
}

impl SlicedSurface {
    pub fn new(name: impl Into<String>, n: usize, params: Vec<(f64, f64)>, map: Parametrization, marker: SideMarker) -> Result<Self> {
        if n < 3 {
            return Err(domain(format!("ambient dimension must be at least 3, got {n}")));
        }
        if params.len() != n - 2 {
            return Err(domain(format!("a surface in dimension {n} needs {} parameters", n - 2)));
        }
        if marker.interior.len() != n - 1 {
            return Err(domain(format!("interior point needs {} coordinates", n - 1)));
        }
        Ok(SlicedSurface { name: name.into(), n, domain: params, map, marker })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Slice coordinates of the point with parameters `u`.
    pub fn point(&self, u: &[f64]) -> Vec<f64> {
        let u: Vec<TwoFloat> = u.iter().map(|&v| TwoFloat::from(v)).collect();
        (self.map)(&u).into_iter().map(f64::from).collect()
    }

    /// The same surface with `N+` and `N-` exchanged.
    pub fn swapped(mut self) -> Self {
        self.marker.plus_is_outside = !self.marker.plus_is_outside;
        self
    }

    /// Composes with `x -> rotation * x + translation` in the slice.
    pub fn moved(self, rotation: &DMatrix<f64>, translation: &[f64]) -> Result<Self> {
        let m = self.n - 1;
        if rotation.shape() != (m, m) || translation.len() != m {
            return Err(domain(format!("rigid motion must act on {m} coordinates")));
        }
        let defect = (rotation.transpose() * rotation - DMatrix::identity(m, m)).norm();
        if defect > 1e-12 {
            return Err(domain(format!("matrix is not orthogonal (defect {defect:e})")));
        }
        let (rot, shift) = (rotation.clone(), translation.to_vec());
        let interior: Vec<f64> = (&rot * DVector::from_column_slice(&self.marker.interior)).iter().zip(&shift).map(|(a, b)| a + b).collect();
        let inner = self.map;
        let map: Parametrization = Box::new(move |u| {
            let x = inner(u);
            (0..m)
                .map(|i| (0..m).fold(TwoFloat::from(shift[i]), |acc, j| acc + TwoFloat::from(rot[(i, j)]) * x[j]))
                .collect()
        });
        Ok(SlicedSurface {
            name: format!("{} (moved)", self.name),
            n: self.n,
            domain: self.domain,
            map,
            marker: SideMarker { interior, plus_is_outside: self.marker.plus_is_outside },
        })
    }
}

/// Round sphere `S^{n-2}(R)` centred at `centre`, in hyperspherical angles.
/// The default marker puts `N-` towards the centre.
pub fn round_sphere(n: usize, radius: f64, centre: &[f64]) -> Result<SlicedSurface> {
    ellipsoid(n, &vec![radius; n - 1], centre).map(|mut s| {
        s.name = format!("sphere S^{}({radius})", n - 2);
        s
    })
}

/// Ellipsoid with semi-axes `axes` (one per slice coordinate).
pub fn ellipsoid(n: usize, axes: &[f64], centre: &[f64]) -> Result<SlicedSurface> {
    if n < 3 {
        return Err(domain(format!("ambient dimension must be at least 3, got {n}")));
    }
    if axes.len() != n - 1 || centre.len() != n - 1 {
        return Err(domain(format!("axes and centre need {} coordinates", n - 1)));
    }
    if axes.iter().any(|&a| !(a.is_finite() && a > 0.0)) {
        return Err(domain(format!("semi-axes must be positive, got {axes:?}")));
    }
    let m = n - 2;
    let mut dom = vec![(0.0, std::f64::consts::PI); m - 1];
    dom.push((0.0, std::f64::consts::TAU));
    let (a, c) = (axes.to_vec(), centre.to_vec());
    let map: Parametrization = Box::new(move |u| {
        // x_0 = cos u_0, x_1 = sin u_0 cos u_1, ..., x_m = sin u_0 ... sin u_{m-1}.
        let mut out = Vec::with_capacity(m + 1);
        let mut prod = TwoFloat::from(1.0);
        for &ui in u {
            let (s, co) = ui.sin_cos();
            out.push(prod * co);
            prod *= s;
        }
        out.push(prod);
        out.iter().enumerate().map(|(i, &x)| x * a[i] + c[i]).collect()
    });
    SlicedSurface::new(
        format!("ellipsoid {axes:?}"),
        n,
        dom,
        map,
        SideMarker { interior: centre.to_vec(), plus_is_outside: true },
    )
}

/// Flat patch `{x_{n-2} = 0}` over the parameter box `[-1, 1]^{n-2}`.
pub fn flat_patch(n: usize) -> Result<SlicedSurface> {
    if n < 3 {
        return Err(domain(format!("ambient dimension must be at least 3, got {n}")));
    }
    let map: Parametrization = Box::new(move |u| {
        let mut x = u.to_vec();
        x.push(TwoFloat::from(0.0));
        x
    });
    let mut below = vec![0.0; n - 1];
    below[n - 2] = -1.0;
    SlicedSurface::new("flat patch", n, vec![(-1.0, 1.0); n - 2], map, SideMarker { interior: below, plus_is_outside: true })
}

/// Rotation of the slice by `angle` in the coordinate plane `(i, j)`.
pub fn plane_rotation(m: usize, i: usize, j: usize, angle: f64) -> DMatrix<f64> {
    let mut r = DMatrix::identity(m, m);
    let (s, c) = angle.sin_cos();
    r[(i, i)] = c;
    r[(j, j)] = c;
    r[(i, j)] = -s;
    r[(j, i)] = s;
    r
}

/// Mean curvature vector at a parameter point, with the slice normals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceSample {
    pub parameter: Vec<f64>,
    /// Full spacetime vector `(0, H_1, ..., H_{n-1})`.
    pub h: Vec<f64>,
    pub n_plus: Vec<f64>,
    pub k_plus: f64,
    pub k_minus: f64,
}

struct Jet {
    point: Vec<f64>,
    tangents: Vec<DVector<f64>>,
    second: Vec<Vec<DVector<f64>>>,
}

fn jet(s: &SlicedSurface, u: &[f64], h: f64) -> Jet {
    let m = u.len();
    let eval = |shift: &[(usize, f64)]| -> Vec<TwoFloat> {
        let mut v: Vec<TwoFloat> = u.iter().map(|&x| TwoFloat::from(x)).collect();
        for &(i, d) in shift {
            v[i] += TwoFloat::from(d);
        }
        (s.map)(&v)
    };
    let to_vec = |x: Vec<TwoFloat>, scale: f64| DVector::from_iterator(x.len(), x.into_iter().map(|c| f64::from(c / scale)));
    let diff = |a: &[TwoFloat], b: &[TwoFloat]| a.iter().zip(b).map(|(x, y)| *x - *y).collect::<Vec<_>>();
    let centre = eval(&[]);
    let plus: Vec<_> = (0..m).map(|i| eval(&[(i, h)])).collect();
    let minus: Vec<_> = (0..m).map(|i| eval(&[(i, -h)])).collect();
    let tangents = (0..m).map(|i| to_vec(diff(&plus[i], &minus[i]), 2.0 * h)).collect();
    let mut second = vec![vec![DVector::zeros(0); m]; m];
    for i in 0..m {
        let sum: Vec<TwoFloat> = plus[i].iter().zip(&minus[i]).zip(&centre).map(|((a, b), c)| *a + *b - *c * 2.0).collect();
        second[i][i] = to_vec(sum, h * h);
        for j in i + 1..m {
            let pp = eval(&[(i, h), (j, h)]);
            let pm = eval(&[(i, h), (j, -h)]);
            let mp = eval(&[(i, -h), (j, h)]);
            let mm = eval(&[(i, -h), (j, -h)]);
            let mixed: Vec<TwoFloat> = (0..pp.len()).map(|k| pp[k] - pm[k] - mp[k] + mm[k]).collect();
            let d = to_vec(mixed, 4.0 * h * h);
            second[i][j] = d.clone();
            second[j][i] = d;
        }
    }
    Jet { point: centre.into_iter().map(f64::from).collect(), tangents, second }
}

/// Relative eigenvalue bound below which the first fundamental form counts as degenerate.
const RANK_TOL: f64 = 1e-10;

/// Mean curvature vector `H = g^{ij} (d_i d_j X)^perp` by central differences with step `h`.
/// Returns the full spacetime vector, time component first.
pub fn mean_curvature_fd(s: &SlicedSurface, u: &[f64], h: f64) -> Result<Vec<f64>> {
    Ok(mean_curvature_and_normal(s, u, h)?.0)
}

fn mean_curvature_and_normal(s: &SlicedSurface, u: &[f64], h: f64) -> Result<(Vec<f64>, DVector<f64>)> {
    let m = s.n - 2;
    if u.len() != m {
        return Err(domain(format!("expected {m} parameters, got {}", u.len())));
    }
    if !(h.is_finite() && h > 0.0) {
        return Err(domain(format!("step must be positive, got {h}")));
    }
    let j = jet(s, u, h);
    let gram = DMatrix::from_fn(m, m, |a, b| j.tangents[a].dot(&j.tangents[b]));
    let eig = gram.clone().symmetric_eigen();
    let (lo, hi) = eig.eigenvalues.iter().fold((f64::INFINITY, 0.0f64), |(l, h), &e| (l.min(e), h.max(e.abs())));
    if !(lo > RANK_TOL * hi.max(f64::MIN_POSITIVE)) {
        return Err(Error::Rank(format!("first fundamental form degenerate at {u:?} (eigenvalues {:?})", eig.eigenvalues.as_slice())));
    }
    let inv = gram.try_inverse().ok_or_else(|| Error::Rank(format!("first fundamental form singular at {u:?}")))?;
    let tang = DMatrix::from_columns(&j.tangents);
    let project = |v: &DVector<f64>| v - &tang * (&inv * (tang.transpose() * v));
    let mut hvec = DVector::zeros(s.n - 1);
    for a in 0..m {
        for b in 0..m {
            hvec += project(&j.second[a][b]) * inv[(a, b)];
        }
    }
    let normal = unit_normal(&tang, &inv, &j.point, &s.marker);
    let mut full = vec![0.0];
    full.extend(hvec.iter());
    Ok((full, normal))
}

/// Unit slice normal, oriented as `N+`.
fn unit_normal(tang: &DMatrix<f64>, inv: &DMatrix<f64>, point: &[f64], marker: &SideMarker) -> DVector<f64> {
    let dim = tang.nrows();
    let best = (0..dim)
        .map(|k| {
            let e = DVector::from_fn(dim, |i, _| if i == k { 1.0 } else { 0.0 });
            &e - tang * (inv * (tang.transpose() * &e))
        })
        .max_by(|a, b| a.norm().total_cmp(&b.norm()))
        .expect("slice has positive dimension");
    let n = best.normalize();
    let away = DVector::from_iterator(dim, point.iter().zip(&marker.interior).map(|(p, c)| p - c));
    if (n.dot(&away) >= 0.0) == marker.plus_is_outside {
        n
    } else {
        -n
    }
}

/// `k± = <H, U + N±>` with `U = d_t`; only the slice part of `K±` meets `H`.
pub fn null_convergences(s: &SlicedSurface, u: &[f64], h: f64) -> Result<ConvergenceSample> {
    let (hv, n_plus) = mean_curvature_and_normal(s, u, h)?;
    let k_plus: f64 = hv[1..].iter().zip(n_plus.iter()).map(|(a, b)| a * b).sum();
    Ok(ConvergenceSample {
        parameter: u.to_vec(),
        h: hv,
        n_plus: n_plus.iter().copied().collect(),
        k_plus,
        k_minus: -k_plus,
    })
}

/// Midpoint grid with `per_axis` points along each parameter direction.
pub fn parameter_grid(s: &SlicedSurface, per_axis: usize) -> Vec<Vec<f64>> {
    let m = s.domain.len();
    let count = per_axis.pow(m as u32);
    (0..count)
        .map(|mut idx| {
            s.domain
                .iter()
                .map(|&(a, b)| {
                    let j = idx % per_axis;
                    idx /= per_axis;
                    a + (b - a) * (j as f64 + 0.5) / per_axis as f64
                })
                .collect()
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrappedCheck {
    pub trapped: bool,
    pub min_k_minus: f64,
    pub argmin: Vec<f64>,
    pub max_k_plus: f64,
    pub samples: usize,
}

/// `k- > 0` at every grid point. Rank failures propagate.
pub fn is_inner_trapped(s: &SlicedSurface, grid: &[Vec<f64>], h: f64) -> Result<TrappedCheck> {
    if grid.is_empty() {
        return Err(domain("empty sample grid"));
    }
    let samples: Vec<ConvergenceSample> = grid.par_iter().map(|u| null_convergences(s, u, h)).collect::<Result<_>>()?;
    let worst = samples.iter().min_by(|a, b| a.k_minus.total_cmp(&b.k_minus)).expect("nonempty grid");
    Ok(TrappedCheck {
        trapped: samples.iter().all(|c| c.k_minus > 0.0),
        min_k_minus: worst.k_minus,
        argmin: worst.parameter.clone(),
        max_k_plus: samples.iter().map(|c| c.k_plus).fold(f64::NEG_INFINITY, f64::max),
        samples: samples.len(),
    })
}

/// Closed form on `S^{n-2}(R)` under the trace convention: `|H| = (n-2)/R`, pointing inward.
pub fn sphere_mean_curvature(n: usize, radius: f64) -> f64 {
    (n - 2) as f64 / radius
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SphereConvergence {
    pub steps: Vec<f64>,
    pub errors: Vec<f64>,
    pub slope: f64,
}

/// Error `|H_fd - H_exact|` on `S^{n-2}(R)` at `u` for each step, and the log-log slope.
pub fn sphere_convergence(n: usize, radius: f64, u: &[f64], steps: &[f64]) -> Result<SphereConvergence> {
    let s = round_sphere(n, radius, &vec![0.0; n - 1])?;
    let x = s.point(u);
    let k = sphere_mean_curvature(n, radius);
    let errors = steps
        .iter()
        .map(|&h| {
            let hv = mean_curvature_fd(&s, u, h)?;
            Ok(hv[1..].iter().zip(&x).map(|(a, xi)| (a + k * xi / radius).powi(2)).sum::<f64>().sqrt())
        })
        .collect::<Result<Vec<_>>>()?;
    let slope = log_log_slope(steps, &errors);
    Ok(SphereConvergence { steps: steps.to_vec(), errors, slope })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const H: f64 = 1e-4;

    #[test]
    fn circle_and_sphere_closed_forms() {
        let c = round_sphere(3, 2.0, &[0.0, 0.0]).unwrap();
        let k = null_convergences(&c, &[0.7], H).unwrap();
        // Truncation error is k h^2 / 4 here.
        assert!((k.k_plus + 0.5).abs() < 2e-9 && (k.k_minus - 0.5).abs() < 2e-9, "{k:?}");
        let x = c.point(&[0.7]);
        // H points to the centre.
        assert!(k.h[1] * x[0] + k.h[2] * x[1] < 0.0);
        assert_eq!(k.h[0], 0.0);

        let s = round_sphere(5, 3.0, &[1.0, -2.0, 0.5, 0.0]).unwrap();
        let k = null_convergences(&s, &[1.1, 0.4, 2.0], H).unwrap();
        assert!((k.k_minus - 1.0).abs() < 1e-8, "{}", k.k_minus);
    }

    #[test]
    fn sign_law_on_spheres() {
        for n in 3..=5 {
            for r in [1.0, 2.0, 5.0] {
                let s = round_sphere(n, r, &vec![0.0; n - 1]).unwrap();
                let check = is_inner_trapped(&s, &parameter_grid(&s, 4), H).unwrap();
                assert!(check.trapped && check.max_k_plus < 0.0, "n={n} R={r}");
                let exact = sphere_mean_curvature(n, r);
                assert!((check.min_k_minus - exact).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn second_order_convergence() {
        for n in 3..=5 {
            let u: Vec<f64> = (0..n - 2).map(|i| 0.9 + 0.3 * i as f64).collect();
            let c = sphere_convergence(n, 1.0, &u, &[1e-2, 1e-3, 1e-4]).unwrap();
            assert!(c.slope >= 1.9, "n={n}: {c:?}");
        }
    }

    #[test]
    fn swapped_marker_exchanges_roles() {
        let s = round_sphere(4, 1.0, &[0.0; 3]).unwrap();
        let a = null_convergences(&s, &[1.0, 2.0], H).unwrap();
        let b = null_convergences(&s.swapped(), &[1.0, 2.0], H).unwrap();
        assert!((b.k_plus + a.k_plus).abs() < 1e-12 && (b.k_minus + a.k_minus).abs() < 1e-12);
        assert!(b.k_plus > 0.0 && b.k_minus < 0.0);
    }

    #[test]
    fn flat_patch_is_not_trapped() {
        for n in 3..=5 {
            let s = flat_patch(n).unwrap();
            let check = is_inner_trapped(&s, &parameter_grid(&s, 3), H).unwrap();
            assert!(!check.trapped);
            assert!(check.min_k_minus.abs() < 1e-9 && check.max_k_plus.abs() < 1e-9);
        }
    }

    #[test]
    fn ellipsoid_is_trapped_and_refines() {
        let e = ellipsoid(4, &[1.0, 1.5, 0.8], &[0.0; 3]).unwrap();
        let coarse = is_inner_trapped(&e, &parameter_grid(&e, 6), 1e-3).unwrap();
        let fine = is_inner_trapped(&e, &parameter_grid(&e, 6), 1e-4).unwrap();
        assert!(coarse.trapped && fine.trapped);
        assert!((coarse.min_k_minus - fine.min_k_minus).abs() < 1e-5);
        // Mean curvature of an ellipsoid lies between the extreme sphere values.
        assert!(fine.min_k_minus > 0.8 / 1.5f64.powi(2));
    }

    #[test]
    fn degenerate_parametrization_is_a_rank_error() {
        let s = round_sphere(4, 1.0, &[0.0; 3]).unwrap();
        assert!(matches!(null_convergences(&s, &[0.0, 1.0], H), Err(Error::Rank(_))));
        let squashed: Parametrization = Box::new(|u| vec![u[0], u[0], TwoFloat::from(0.0)]);
        let bad = SlicedSurface::new("line", 4, vec![(0.0, 1.0); 2], squashed, SideMarker { interior: vec![0.0; 3], plus_is_outside: true }).unwrap();
        assert!(matches!(mean_curvature_fd(&bad, &[0.5, 0.5], H), Err(Error::Rank(_))));
        assert!(round_sphere(2, 1.0, &[0.0]).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn rigid_motions_preserve_convergences(
            angle in -3.0f64..3.0, shift in prop::collection::vec(-5.0f64..5.0, 3),
            u0 in 0.3f64..2.8, u1 in 0.0f64..6.2,
        ) {
            let s = ellipsoid(4, &[1.0, 1.3, 0.7], &[0.0; 3]).unwrap();
            let a = null_convergences(&s, &[u0, u1], H).unwrap();
            let rot = plane_rotation(3, 0, 2, angle) * plane_rotation(3, 1, 2, 0.5 * angle);
            let moved = s.moved(&rot, &shift).unwrap();
            let b = null_convergences(&moved, &[u0, u1], H).unwrap();
            prop_assert!((a.k_plus - b.k_plus).abs() < 1e-9 && (a.k_minus - b.k_minus).abs() < 1e-9);
        }

        #[test]
        fn convergences_scale_inversely(r in 0.2f64..10.0, lambda in 0.1f64..10.0, u0 in 0.3f64..2.8, u1 in 0.0f64..6.2) {
            let a = null_convergences(&round_sphere(4, r, &[0.0; 3]).unwrap(), &[u0, u1], H).unwrap();
            let b = null_convergences(&round_sphere(4, lambda * r, &[0.0; 3]).unwrap(), &[u0, u1], H).unwrap();
            prop_assert!((b.k_minus * lambda - a.k_minus).abs() < 1e-7 * a.k_minus.abs().max(1.0));
            prop_assert!((b.k_plus * lambda - a.k_plus).abs() < 1e-7 * a.k_plus.abs().max(1.0));
        }
    }
}
