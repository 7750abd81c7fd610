//! Closed-form cone distances and the convexity rule against the mesh oracle.

use lorentz_covers::cone::oracle::MeshOracle;
use lorentz_covers::cone::{self, ConeGeometry, ConePoint};
use lorentz_covers::interval::Decision;

const RES: f64 = 0.05;

#[test]
fn wide_cone_still_has_minimizers() {
    // Total angle 4.5 lies in (pi, 2pi): antipodal pairs are closer than the apex route.
    let g = ConeGeometry::base(4.5).unwrap();
    assert_eq!(cone::is_geodesically_convex(&g).convex, Decision::True);
    let oracle = MeshOracle::new(RES);
    for (rp, rq) in [(1.0, 1.0), (0.7, 1.6), (1.9, 0.6)] {
        let p = ConePoint::new(rp, 0.0).unwrap();
        let q = ConePoint::new(rq, 2.25).unwrap();
        let d = cone::distance(&p, &q, &g).unwrap();
        assert_eq!(d.attained(), Decision::True);
        let mesh = oracle.distance(&p, &q, &g).unwrap();
        assert!(mesh < rp + rq - oracle.error_bound(&p, &q), "mesh {mesh} vs apex route {}", rp + rq);
        assert!(mesh >= d.infimum.to_f64() - 1e-9);
    }
}

#[test]
fn cover_witness_has_no_shortcut() {
    let theta = cone::sector_angle(0.5).unwrap();
    for g in [ConeGeometry::cyclic_cover(theta, 3).unwrap(), ConeGeometry::universal_cover(Some(theta)).unwrap()] {
        let c = cone::is_geodesically_convex(&g);
        assert_eq!(c.convex, Decision::False);
        let (p, q) = c.witness.unwrap();
        let d = cone::distance(&p, &q, &g).unwrap();
        assert_eq!(d.attained(), Decision::False);
        let oracle = MeshOracle::new(RES);
        let mesh = oracle.distance(&p, &q, &g).unwrap();
        let apex = p.r + q.r;
        assert!(mesh >= apex - 1e-9 && mesh <= apex + oracle.error_bound(&p, &q), "{g:?}: mesh {mesh}");
    }
}

#[test]
fn headline_segment_matches_mesh() {
    let theta = cone::sector_angle(0.5).unwrap();
    let g = ConeGeometry::base(theta).unwrap();
    let (a, b) = (ConePoint::new(1.0, 0.0).unwrap(), ConePoint::new(1.0, theta / 2.0).unwrap());
    let exact = cone::distance(&a, &b, &g).unwrap().infimum.to_f64();
    let oracle = MeshOracle::new(RES);
    let mesh = oracle.distance(&a, &b, &g).unwrap();
    assert!((1.2922272743 - exact).abs() < 1e-9);
    assert!(mesh >= exact - 1e-9 && mesh - exact <= oracle.error_bound(&a, &b));
}
