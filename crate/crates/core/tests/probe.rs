use ellseq::relations::{nilpotency_probe, symbolic_relation, ProbeOutcome, RelationId, SymbolicSeqRing};
use ellseq::sequences::{family_relations, Family};

// z = h2 h3 E(4,3,1,0) - h1 h2 E(5,2,1,0); the h7 terms cancel.
fn z(s: &SymbolicSeqRing) -> ellseq::RingElement {
    let e = |a, b| symbolic_relation(s, &RelationId::new(a, b, 1, 0)).unwrap();
    let h = |i| s.h(i).unwrap();
    h(2) * h(3) * e(4, 3) - h(1) * h(2) * e(5, 2)
}

#[test]
fn z_is_nilpotent_modulo_two_generators() {
    let s = SymbolicSeqRing::new(7);
    let z = z(&s);
    assert!(z.as_poly().unwrap().degree_in(6) == 0, "h7 should cancel");
    let rels = [RelationId::new(3, 2, 1, 0), RelationId::new(4, 2, 1, 0)];
    match nilpotency_probe(&s, &z, &rels, 3).unwrap() {
        ProbeOutcome::Member(c) => {
            assert_eq!(c.exponent, 2);
            assert!(c.verify(&s, &z).unwrap());
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn z_is_a_member_at_k7() {
    let s = SymbolicSeqRing::new(7);
    let z = z(&s);
    let out = nilpotency_probe(&s, &z, &family_relations(Family::Mnr0, 7), 2).unwrap();
    assert_eq!(out.exponent(), Some(1));
}

#[test]
fn e5321_exponents() {
    let goal = RelationId::new(5, 3, 2, 1);
    for (k, want) in [(8, 3), (10, 2)] {
        let s = SymbolicSeqRing::new(k);
        let e = symbolic_relation(&s, &goal).unwrap();
        let out = nilpotency_probe(&s, &e, &family_relations(Family::Mnr0, k as i64), 4).unwrap();
        assert_eq!(out.exponent(), Some(want), "K = {k}");
    }
}
