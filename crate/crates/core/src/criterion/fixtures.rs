//! Metrics and vector fields for the criterion checker.
//!
//! Charts put time first: points are `(t, x_1, ..., x_{n-1})`.

use nalgebra::{DMatrix, DVector};

use super::{MetricField, VectorFieldCandidate};

/// Flat `-dt^2 + dx^2 + ...` in dimension `n`.
pub fn minkowski(n: usize) -> MetricField {
    MetricField::new(format!("minkowski-{n}"), "cartesian", n, Box::new(move |_| eta(n)))
}

fn eta(n: usize) -> DMatrix<f64> {
    let mut g = DMatrix::identity(n, n);
    g[(0, 0)] = -1.0;
    g
}

/// `-dt^2 + dr^2 + r^2 dpsi^2` in the chart `(t, r, psi)`; the apex `r = 0` is removed.
pub fn cone_spacetime() -> MetricField {
    MetricField::new(
        "cone",
        "(t, r, psi)",
        3,
        Box::new(|x| DMatrix::from_diagonal(&DVector::from_vec(vec![-1.0, 1.0, x[1] * x[1]]))),
    )
    .with_removed_set(Box::new(|x| x[1]))
}

/// Distance from `(t, x)` to the nearest of `(0, 0)`, `(0, -1/k)`.
pub fn puncture_distance(t: f64, x: f64) -> f64 {
    let mut best = x.abs();
    if x <= -1.0 {
        best = best.min(-1.0 - x);
    } else if x < 0.0 {
        let k = (-1.0 / x).floor();
        if k < 1e15 {
            for c in [k - 1.0, k, k + 1.0] {
                if c >= 1.0 {
                    best = best.min((x + 1.0 / c).abs());
                }
            }
        }
    }
    t.hypot(best)
}

/// 2D Minkowski space with `(0, 0)` and `(0, -1/k)`, `k >= 1`, removed.
pub fn punctured_plane() -> MetricField {
    MetricField::new("punctured-plane", "(t, x)", 2, Box::new(|_| eta(2)))
        .with_removed_set(Box::new(|x| puncture_distance(x[0], x[1])))
}

/// `n`-dimensional Minkowski space with the vertical lines `{(t, z_j)}` removed.
pub fn lines_removed(n: usize, lines: Vec<Vec<f64>>) -> MetricField {
    assert!(lines.iter().all(|z| z.len() == n - 1), "line positions need {} coordinates", n - 1);
    MetricField::new(format!("minkowski-{n}-minus-{}-lines", lines.len()), "cartesian", n, Box::new(move |_| eta(n)))
        .with_removed_set(Box::new(move |x| {
            lines
                .iter()
                .map(|z| z.iter().zip(&x[1..]).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt())
                .fold(f64::INFINITY, f64::min)
        }))
}

/// Data of a conformastationary metric
/// `Lambda^2 (-beta^2 dt^2 + omega (x) dt + dt (x) omega + g_0)`.
/// `g0`, `beta0` and `omega0` read the spatial coordinates; `lambda0` reads the full point.
pub struct ConformastationaryData {
    pub g0: Coefficient<DMatrix<f64>>,
    pub beta0: Coefficient<f64>,
    pub omega0: Coefficient<Vec<f64>>,
    pub lambda0: Coefficient<f64>,
}

pub type Coefficient<T> = Box<dyn Fn(&[f64]) -> T + Send + Sync>;

pub fn conformastationary(name: &str, n: usize, data: ConformastationaryData) -> MetricField {
    MetricField::new(
        name,
        "(t, x)",
        n,
        Box::new(move |x| {
            let space = &x[1..];
            let (g0, beta, omega, lambda) = ((data.g0)(space), (data.beta0)(space), (data.omega0)(space), (data.lambda0)(x));
            let mut g = DMatrix::zeros(n, n);
            g[(0, 0)] = -beta * beta;
            for i in 1..n {
                g[(0, i)] = omega[i - 1];
                g[(i, 0)] = omega[i - 1];
                for j in 1..n {
                    g[(i, j)] = g0[(i - 1, j - 1)];
                }
            }
            g * (lambda * lambda)
        }),
    )
}

/// A three-dimensional example with nonconstant data and `Lambda = exp(0.3 t + 0.1 x)`,
/// so that `L_{d_t} g = 0.6 g`.
pub fn conformastationary_example() -> MetricField {
    conformastationary(
        "conformastationary-example",
        3,
        ConformastationaryData {
            g0: Box::new(|s| {
                let (x, y) = (s[0], s[1]);
                DMatrix::from_row_slice(2, 2, &[1.0 + 0.1 * y * y, 0.05 * x, 0.05 * x, 1.0 + 0.2 * x * x])
            }),
            beta0: Box::new(|s| 1.0 + 0.1 * s[0] * s[0]),
            omega0: Box::new(|s| vec![0.2 * s[1], 0.1 * s[0]]),
            lambda0: Box::new(|p| (0.3 * p[0] + 0.1 * p[1]).exp()),
        },
    )
}

/// The same metric in the chart `t = sinh(tau)`: `g_tautau = cosh^2(tau) g_tt`,
/// `g_taui = cosh(tau) g_ti`. The field `d_t` becomes `(1 / cosh tau) d_tau`, whose
/// Lie derivative no longer vanishes term by term, so difference quotients carry
/// a genuine `O(h^2)` error.
pub fn warped_time(base: MetricField) -> MetricField {
    let name = format!("{} (t = sinh tau)", base.name);
    let chart = format!("tau-warped {}", base.chart);
    let dim = base.dim();
    let base = std::sync::Arc::new(base);
    let guard = base.clone();
    MetricField::new(
        name,
        chart,
        dim,
        Box::new(move |x| {
            let mut y = x.to_vec();
            y[0] = x[0].sinh();
            let c = x[0].cosh();
            let mut g = (base.eval)(&y);
            for i in 0..dim {
                g[(0, i)] *= c;
                g[(i, 0)] *= c;
            }
            g
        }),
    )
    .with_removed_set(Box::new(move |x| {
        let mut y = x.to_vec();
        y[0] = x[0].sinh();
        guard.removed_distance(&y)
    }))
}

/// `d_t` expressed in the chart of `warped_time`.
pub fn warped_time_field(n: usize) -> VectorFieldCandidate {
    VectorFieldCandidate::new(
        "d_t in the tau chart",
        Box::new(move |x| {
            let mut v = vec![0.0; n];
            v[0] = 1.0 / x[0].cosh();
            v
        }),
    )
}

/// The coordinate field `d_i`.
pub fn coordinate_field(n: usize, i: usize) -> VectorFieldCandidate {
    VectorFieldCandidate::new(
        format!("d_{i}"),
        Box::new(move |_| {
            let mut v = vec![0.0; n];
            v[i] = 1.0;
            v
        }),
    )
}

/// `t d_t`, a field that is not conformal Killing for the flat metric.
pub fn scaled_time_field(n: usize) -> VectorFieldCandidate {
    VectorFieldCandidate::new(
        "t d_t",
        Box::new(move |x| {
            let mut v = vec![0.0; n];
            v[0] = x[0];
            v
        }),
    )
}

/// `m^n` grid points in `[-extent, extent]^n`, shifted off the coordinate axes.
pub fn grid_samples(n: usize, extent: f64, m: usize) -> Vec<Vec<f64>> {
    const SHIFT: f64 = 0.0137;
    let coord = |j: usize| {
        if m == 1 {
            SHIFT
        } else {
            -extent + 2.0 * extent * j as f64 / (m - 1) as f64 + SHIFT
        }
    };
    let mut out = Vec::with_capacity(m.pow(n as u32));
    for mut idx in 0..m.pow(n as u32) {
        let mut p = Vec::with_capacity(n);
        for _ in 0..n {
            p.push(coord(idx % m));
            idx /= m;
        }
        out.push(p);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn puncture_distance_is_lazy_and_exact_on_samples() {
        assert_eq!(puncture_distance(0.0, 0.3), 0.3);
        assert_eq!(puncture_distance(0.0, -1.5), 0.5);
        assert!((puncture_distance(0.0, -0.3) - (1.0 / 3.0 - 0.3)).abs() < 1e-15);
        assert!((puncture_distance(0.0, -0.26) - (0.26 - 0.25)).abs() < 1e-15);
        assert_eq!(puncture_distance(1.0, 0.0), 1.0);
        assert!(puncture_distance(0.0, -1e-300) < 1e-299);
        // Brute-force comparison over the first 10^4 punctures.
        for i in 1..2000 {
            let x = -1.2 + i as f64 * 0.0006;
            let brute = (1..10_000).map(|k| (x + 1.0 / k as f64).abs()).fold(x.abs(), f64::min);
            assert!((puncture_distance(0.0, x) - brute).abs() < 1e-15, "{x}");
        }
    }

    #[test]
    fn fixtures_have_lorentz_signature() {
        for (g, pt) in [
            (minkowski(4), vec![0.1, 0.2, 0.3, 0.4]),
            (cone_spacetime(), vec![0.0, 1.0, 1.0]),
            (conformastationary_example(), vec![0.5, -1.0, 2.0]),
            (warped_time(minkowski(2)), vec![1.5, 0.0]),
        ] {
            assert!(g.lorentz_components(&pt).is_ok(), "{}", g.name);
        }
    }

    #[test]
    fn grid_samples_shape() {
        let s = grid_samples(3, 1.0, 4);
        assert_eq!(s.len(), 64);
        assert!(s.iter().all(|p| p.len() == 3 && p.iter().all(|c| c.abs() <= 1.0 + 0.02)));
    }
}
