//! Cross-module consistency: the closed-J and reflectivity sides of the ladder,
//! and the criterion certificate, on bases where both are computable.

use lorentz_covers::causality::{self, Event, PuncturedEuclidean, Relation};
use lorentz_covers::criterion::{self, fixtures, CertifyConfig};
use lorentz_covers::interval::Decision;

#[test]
fn lines_removed_is_reflecting_but_not_causally_simple() {
    let lines = vec![vec![0.0, 0.0], vec![1.0, 0.0]];
    let base = PuncturedEuclidean::new(2, lines.clone()).unwrap();
    let ladder = causality::ladder_check(&base, 3000, 5).unwrap();
    assert_eq!(ladder.closed, Decision::False);
    assert!(ladder.reflecting_but_not_closed(), "{:?}", ladder.reflectivity);

    let closure = causality::is_causal_relation_closed(&base).unwrap();
    assert_eq!(closure.witness_relation, Some(Relation::ClosureOnly));

    // The criterion reaches the reflectivity half independently.
    let g = fixtures::lines_removed(3, lines);
    let cfg = CertifyConfig::new(fixtures::grid_samples(3, 2.0, 3), fixtures::grid_samples(3, 2.0, 3), 1e3);
    let cert = criterion::certify_past_reflectivity(&fixtures::coordinate_field(3, 0), &g, &cfg).unwrap();
    assert!(cert.certified() && cert.covering_clause);
}

#[test]
fn unpunctured_plane_is_closed_and_reflecting() {
    let base = PuncturedEuclidean::new(2, vec![]).unwrap();
    let ladder = causality::ladder_check(&base, 3000, 6).unwrap();
    assert_eq!(ladder.closed, Decision::True);
    assert!(ladder.implication_holds());
    assert_eq!(ladder.reflectivity.violations, 0);
}

#[test]
fn segment_through_a_puncture_is_closure_only() {
    let base = PuncturedEuclidean::new(2, vec![vec![0.0, 0.0]]).unwrap();
    let p = Event::new(0.0, vec![-1.0, 0.0]);
    let on_cone = Event::new(2.0, vec![1.0, 0.0]);
    let later = Event::new(2.5, vec![1.0, 0.0]);
    assert_eq!(causality::classify(&p, &on_cone, &base).unwrap().relation, Relation::ClosureOnly);
    assert_eq!(causality::classify(&p, &later, &base).unwrap().relation, Relation::Chronological);
    // A 3-4-5 segment that misses the puncture is attained.
    let null = Event::new(5.0, vec![2.0, 4.0]);
    assert_eq!(causality::classify(&p, &null, &base).unwrap().relation, Relation::CausalNotChronological);
}
