use ellseq::derive::{derive_from_even_odd, Base};
use ellseq::relations::{eval_relation, symbolic_relation, RelationId, SymbolicSeqRing};
use ellseq::sequences::{check_window, Family};
use ellseq::std_eds::{translation_invariant_cross_check, universal};
use ellseq::{EllipticSeq, Ring, RingElement, TermOracle};
use proptest::prelude::*;

fn rings() -> Vec<Ring> {
    ["Z", "Q", "Zmod:6", "Fp:7", "Poly:Z[x,y]", "Frac:Poly:Z[x]"]
        .iter()
        .map(|s| Ring::parse_spec(s).unwrap())
        .collect()
}

/// An element of `ring` built from four small integers.
fn build(ring: &Ring, c: [i64; 4]) -> RingElement {
    let i = |n: i64| ring.from_int(n);
    match ring.to_string().as_str() {
        "Q" => ring.parse_element(&format!("{}/{}", c[0] * 7 + c[1], c[2].abs() + 1)).unwrap(),
        s if s.starts_with("Frac") => {
            let x = ring.var("x").unwrap();
            (i(c[0]) + &i(c[1]) * &x).exact_div(&(i(c[2].abs() + 1) + &x * &x)).unwrap()
        }
        s if s.contains('[') => {
            let (x, y) = (ring.var("x").unwrap(), ring.var("y").unwrap());
            i(c[0]) + &i(c[1]) * &x + &i(c[2]) * &y + &i(c[3]) * &(&x * &y)
        }
        _ => i(c[0] * 5 + c[1] - c[3]),
    }
}

fn quad() -> impl Strategy<Value = [i64; 4]> {
    prop::array::uniform4(-4i64..=4)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn ring_axioms(a in quad(), b in quad(), c in quad()) {
        for ring in rings() {
            let (a, b, c) = (build(&ring, a), build(&ring, b), build(&ring, c));
            prop_assert_eq!((&a + &b) + c.clone(), &a + &(&b + &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            if !b.is_zero_divisor() {
                prop_assert_eq!((&a * &b).exact_div(&b).unwrap(), a.clone());
            }
            // Printing and re-parsing reproduces the normal form.
            let s = a.to_string();
            let back = ring.parse_element(&s).unwrap();
            prop_assert_eq!(back.to_string(), s);
            prop_assert_eq!(back, a);
        }
    }

    #[test]
    fn specialize_is_a_homomorphism(p in quad(), q in quad(), v in prop::array::uniform2(-6i64..=6)) {
        let poly = Ring::parse_spec("Poly:Z[x,y]").unwrap();
        for target in [Ring::rationals(), Ring::prime_field(5).unwrap(), Ring::integers_mod(6).unwrap()] {
            let vals = [target.from_int(v[0]), target.from_int(v[1])];
            let (p, q) = (build(&poly, p), build(&poly, q));
            let s = |x: &RingElement| x.specialize(&target, &vals).unwrap();
            prop_assert_eq!(s(&(&p * &q)), &s(&p) * &s(&q));
            prop_assert_eq!(s(&(&p + &q)), &s(&p) + &s(&q));
        }
    }

    #[test]
    fn rules_preserve_parity_and_defect(i in 0usize..200) {
        let all = RelationId::all_canonical(6);
        let r = all[i % all.len()];
        let images = [r.rule_i1(), r.rule_i2()];
        let odd_params = r.params().iter().filter(|h| h.is_integer() && h.0 % 4 != 0).count();
        for image in images {
            let d = [image.a2, image.b2, image.c2, image.d2];
            let parity = d[0].rem_euclid(2);
            prop_assert!(d.iter().all(|x| x.rem_euclid(2) == parity), "{} -> {}", r, image);
            if r.is_integral() {
                // Integral exactly when an even number of the parameters is odd.
                prop_assert_eq!(image.is_integral(), odd_params % 2 == 0, "{} -> {}", r, image);
            }
        }
        if !r.is_integral() {
            prop_assert!(images.iter().any(|i| i.is_integral()), "{}", r);
        }
        let img = r.rule_i1();
        let k = r.max_index().max(img.max_index()) as usize;
        let s = SymbolicSeqRing::new(k);
        let e = symbolic_relation(&s, &r).unwrap();
        let f = symbolic_relation(&s, &img).unwrap();
        prop_assert!(e == f || e == -f.clone(), "{} vs {}", r, img);
        let twice = symbolic_relation(&s, &img.rule_i1()).unwrap();
        prop_assert!(twice == e || twice == -e.clone());
    }

    #[test]
    fn symbolic_defect_specializes(i in 0usize..200, vals in prop::collection::vec(-9i64..=9, 12)) {
        let all = RelationId::all_canonical(6);
        let r = all[i % all.len()];
        let k = r.max_index() as usize;
        let s = SymbolicSeqRing::new(k);
        let z = Ring::integers();
        let terms: Vec<_> = vals[..k].iter().map(|&v| z.from_int(v)).collect();
        let seq = EllipticSeq::from_terms(&z, terms.clone()).unwrap();
        let sym = symbolic_relation(&s, &r).unwrap();
        prop_assert_eq!(eval_relation(&seq, &r).unwrap().defect, sym.specialize(&z, &terms).unwrap());
        let p = sym.as_poly().unwrap();
        if !p.is_zero() {
            prop_assert!(p.homogeneous_weight(&s.weights(1, 0)).is_some());
            prop_assert!(p.homogeneous_weight(&s.weights(1, -1)).is_some());
        }
    }

    #[test]
    fn odd_extension_and_dilation(b in 1i64..5, c in -4i64..5, d in -4i64..5, l in prop::sample::select(vec![1u64, 3, 5])) {
        let q = Ring::rationals();
        let (b, c, d) = (q.from_int(b), q.from_int(c), q.from_int(d));
        let gens = vec![
            EllipticSeq::std_eds(b.clone(), c.clone(), d.clone()).unwrap(),
            EllipticSeq::even_odd([q.one(), b.clone(), c.clone(), &b * &d]).unwrap(),
            EllipticSeq::es(1, 4, b.clone(), q.one(), d.clone()).unwrap(),
        ];
        for g in gens {
            prop_assert!(g.term(0).unwrap().is_zero());
            let dil = g.dilate(l).unwrap();
            let back = dil.contract(l).unwrap();
            for n in 1..=12 {
                let (pos, neg) = (g.term(n), g.term(-n));
                if let (Ok(p), Ok(m)) = (pos, neg) {
                    prop_assert_eq!(m, -p.clone());
                    prop_assert_eq!(back.term(n).unwrap(), p);
                }
            }
        }
    }

    #[test]
    fn generators_agree(h in prop::array::uniform4(-5i64..=5)) {
        prop_assume!(h[0] != 0 && h[1] != 0);
        let q = Ring::rationals();
        let h = h.map(|x| q.from_int(x));
        let eo = EllipticSeq::even_odd(h.clone()).unwrap();
        let so = EllipticSeq::somos4(h.clone()).unwrap();
        let std = EllipticSeq::std_eds(
            h[1].exact_div(&h[0]).unwrap(),
            h[2].exact_div(&h[0]).unwrap(),
            h[3].exact_div(&h[1]).unwrap(),
        ).unwrap().scale(&h[0]).unwrap();
        let window = eo.prefix(20);
        prop_assume!(window.map(|t| t.iter().all(|x| !x.is_zero())).unwrap_or(false));
        for n in 1..=20 {
            let (a, b) = (eo.term(n), std.term(n).unwrap());
            prop_assert_eq!(a.unwrap(), b.clone());
            if let Ok(s) = so.term(n) {
                prop_assert_eq!(s, b);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn even_odd_window_implies_full(h in prop::array::uniform4(-4i64..=4)) {
        prop_assume!(h[0] != 0 && h[1] != 0);
        let q = Ring::rationals();
        let seq = EllipticSeq::even_odd(h.map(|x| q.from_int(x))).unwrap();
        prop_assume!(seq.prefix(14).is_ok());
        if check_window(&seq, 12, Family::EvenOdd).unwrap().is_empty() {
            prop_assert!(check_window(&seq, 12, Family::Full).unwrap().is_empty());
        }
    }

    #[test]
    fn somos_invariant_is_translation_invariant(h in prop::array::uniform4(1i64..=5)) {
        let q = Ring::rationals();
        let seq = EllipticSeq::somos4(h.map(|x| q.from_int(x))).unwrap();
        let terms = seq.prefix(16);
        prop_assume!(terms.map(|t| t.iter().all(|x| !x.is_zero())).unwrap_or(false));
        for m in 3..=10 {
            for n in (m + 1)..=11 {
                prop_assert!(translation_invariant_cross_check(&seq, m, n, 1).unwrap());
            }
        }
    }

    #[test]
    fn universal_specializes(b in -3i64..=3, c in -3i64..=3, d in -3i64..=3) {
        let u = universal();
        for ring in [Ring::integers(), Ring::integers_mod(6).unwrap(), Ring::prime_field(5).unwrap()] {
            let (b, c, d) = (ring.from_int(b), ring.from_int(c), ring.from_int(d));
            let seq = EllipticSeq::std_eds(b.clone(), c.clone(), d.clone()).unwrap();
            for n in 1..=24 {
                prop_assert_eq!(u.specialize_term(n, &b, &c, &d), seq.term(n).unwrap());
            }
        }
    }
}

#[test]
fn even_terms_carry_h2() {
    let u = universal();
    for n in (2..=20).step_by(2) {
        assert_eq!(u.h(n), &u.h(2) * &u.tilde(n));
    }
}

#[test]
fn even_odd_derivations_decrease_measure() {
    for goal in RelationId::all_canonical(8) {
        let tree = derive_from_even_odd(goal).unwrap();
        assert!(tree.measure_violations(Base::EvenOdd).is_empty(), "{goal}");
    }
}
