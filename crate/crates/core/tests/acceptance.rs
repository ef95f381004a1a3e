//! Acceptance suite: one line per criterion, non-zero exit if any fails.

mod common;

use std::process::ExitCode;
use std::time::Instant;

use ellseq::classify::{
    automaton_transitions, classify, dead_states, initial_states, simple_loops, unreachable_states, PatternState,
};
use ellseq::derive::{derive_from_even_odd, derive_from_somos, replay, ReplayMode, Step};
use ellseq::relations::identities::{rule_ii1, rule_ii2};
use ellseq::relations::{
    nilpotency_probe, symbolic_relation, verify_en_combination, verify_eq3_identity, verify_rule_ii1_identity,
    verify_rule_ii1_swap_identity, verify_rule_ii2_identity, Half, Ii1Form, ProbeOutcome, RelationId, SymbolicSeqRing,
};
use ellseq::sequences::{check_window, family_relations, Family};
use ellseq::std_eds::{translation_invariant_cross_check, universal};
use ellseq::{EllipticSeq, Ring, TermOracle};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn identity_sequence() -> Outcome {
    let z = Ring::integers();
    let s = EllipticSeq::std_eds(z.from_int(2), z.from_int(3), z.from_int(2)).map_err(|e| e.to_string())?;
    for n in 1..=100 {
        let t = s.term(n).map_err(|e| e.to_string())?;
        ensure(t == z.from_int(n), || format!("h{n} = {t}"))?;
    }
    Ok("h_n = n for n <= 100".into())
}

fn universal_h6() -> Outcome {
    let u = universal();
    let want = u.ring().parse_element("X2*X3*(X2^4*X4 - X3^3 - X4^2)").map_err(|e| e.to_string())?;
    let got = u.h(6);
    ensure(got == want, || format!("h6 = {got}"))?;
    Ok(format!("h6 = {got}"))
}

fn paper_prefix() -> Outcome {
    let q = Ring::rationals();
    let p = |s: &str| q.parse_element(s).unwrap();
    let s = EllipticSeq::std_eds(p("2"), p("3"), p("3/2")).map_err(|e| e.to_string())?;
    let got = s.prefix(6).map_err(|e| e.to_string())?;
    let want: Vec<_> = ["1", "2", "3", "3", "-3", "-63/2"].iter().map(|x| p(x)).collect();
    ensure(got == want, || format!("got {got:?}"))?;
    Ok("(1, 2, 3, 3, -3, -63/2)".into())
}

fn full_sweep() -> Outcome {
    let rels = family_relations(Family::Full, 14);
    let bad = check_window(universal().seq(), 14, Family::Full).map_err(|e| e.to_string())?;
    ensure(bad.is_empty(), || format!("failing relations: {bad:?}"))?;
    let halves = rels.iter().filter(|r| !r.is_integral()).count();
    Ok(format!("{} relations ({halves} half-integer), all defects zero", rels.len()))
}

fn ints(v: &[i64]) -> Vec<Half> {
    v.iter().map(|&x| Half::int(x)).collect()
}

fn identity_suite() -> Outcome {
    const K: usize = 12;
    let mut counts = Vec::new();
    let eq3 = [(4, 3, 2), (5, 3, 2), (5, 4, 2), (5, 4, 3), (6, 4, 2), (6, 5, 3)];
    counts.push(("eq3", eq3.iter().filter(|&&(m, n, r)| verify_eq3_identity(m, n, r, K) == Ok(true)).count()));

    let mut five: Vec<[Half; 5]> = [[5, 4, 3, 2, 1], [4, 3, 2, 1, 0], [5, 3, 2, 1, 0], [6, 4, 2, 1, 0], [6, 5, 3, 2, 0], [7, 4, 2, 1, 0]]
        .iter()
        .map(|v| ints(v).try_into().unwrap())
        .collect();
    five.push([Half(9), Half(7), Half(5), Half(3), Half(1)]);
    let small5 = |p: &[Half; 5]| {
        [Ii1Form::C, Ii1Form::D, Ii1Form::CE, Ii1Form::EC].iter().all(|&f| rule_ii1(f, *p).max_index() <= K as i64)
    };
    counts.push(("rule II.1", five.iter().filter(|p| small5(p) && verify_rule_ii1_identity(**p, K) == Ok(true)).count()));
    counts.push((
        "rule II.1 swap",
        five.iter().filter(|p| small5(p) && verify_rule_ii1_swap_identity(**p, K) == Ok(true)).count(),
    ));

    let mut six: Vec<[Half; 6]> = [[5, 4, 3, 2, 1, 0], [6, 4, 3, 2, 1, 0], [6, 5, 3, 2, 1, 0], [6, 5, 4, 2, 1, 0], [7, 4, 3, 2, 1, 0], [6, 5, 4, 3, 1, 0]]
        .iter()
        .map(|v| ints(v).try_into().unwrap())
        .collect();
    six.push([Half(11), Half(9), Half(7), Half(5), Half(3), Half(1)]);
    counts.push((
        "rule II.2",
        six.iter().filter(|p| rule_ii2(**p).max_index() <= K as i64 && verify_rule_ii2_identity(**p, K) == Ok(true)).count(),
    ));

    let en = [(4, 3, 1), (5, 3, 2), (6, 2, 1), (5, 2, 1), (6, 4, 1), (7, 4, 2), (7, 3, 1)];
    counts.push(("EN combination", en.iter().filter(|&&(m, n, t)| verify_en_combination(m, n, t, K) == Ok(true)).count()));

    let summary = counts.iter().map(|(n, c)| format!("{n}: {c}")).collect::<Vec<_>>().join(", ");
    ensure(counts.iter().all(|(_, c)| *c >= 5), || summary.clone())?;
    Ok(summary)
}

fn divisibility() -> Outcome {
    let u = universal();
    let mut pairs = 0;
    for m in 1..=30 {
        for n in 1..=30 / m {
            let w = u.divisibility_witness(m, n);
            ensure(w.verify(), || format!("witness ({m},{n}) fails"))?;
            pairs += 1;
        }
    }
    for n in 2..=20 {
        let q = u.triple_product_witness(n);
        ensure(&(&q * &u.h(3)) * &u.h(2) == &(&u.h(n + 1) * &u.h(n)) * &u.h(n - 1), || format!("triple product {n}"))?;
    }
    Ok(format!("{pairs} divisibility witnesses, triple products 2..20"))
}

fn invariants() -> Outcome {
    let u = universal();
    for m in 2..=20 {
        ensure(u.swart_invariant_identity_check(m), || format!("Swart identity fails at m = {m}"))?;
    }
    let mut count = 0;
    for m in 1..=12 {
        for n in 1..m {
            for s in 1..n {
                let ok = translation_invariant_cross_check(u.seq(), m, n, s).map_err(|e| e.to_string())?;
                ensure(ok, || format!("cross-check fails at (s,n,m) = ({s},{n},{m})"))?;
                count += 1;
            }
        }
    }
    Ok(format!("Swart identity 2..20, {count} cross-checks"))
}

fn derivations() -> Outcome {
    let goals = RelationId::all_canonical(19).into_iter().filter(|r| r.a2 <= 20);
    let mut n_eo = 0;
    for goal in goals {
        let t = derive_from_even_odd(goal).map_err(|e| format!("{goal}: {e}"))?;
        replay(&t, ReplayMode::Symbolic(t.max_index() as usize)).map_err(|e| format!("{goal}: {e}"))?;
        n_eo += 1;
    }
    let mut n_somos = 0;
    for goal in RelationId::all_canonical(16).into_iter().filter(|r| r.is_integral()) {
        let t = derive_from_somos(goal).map_err(|e| format!("{goal}: {e}"))?;
        replay(&t, ReplayMode::Symbolic(t.max_index() as usize)).map_err(|e| format!("{goal}: {e}"))?;
        let ab = goal.max_index();
        for leaf in t.leaves() {
            if matches!(leaf.step, Step::BaseSomos) {
                ensure(leaf.goal.a2 / 2 <= ab - 2, || format!("{goal}: leaf {}", leaf.goal))?;
            }
        }
        for node in t.nodes() {
            for &(i, j) in &node.side_conditions {
                ensure(i.abs() <= ab - 4 && j.abs() <= ab - 4, || format!("{goal}: side condition h{i} h{j}"))?;
            }
        }
        n_somos += 1;
    }
    let t = derive_from_even_odd(RelationId::new(6, 2, 1, 0)).map_err(|e| e.to_string())?;
    ensure(t.has_half_integer_node(), || "E(6,2,1,0) has no half-integer node".into())?;
    Ok(format!("{n_eo} even-odd and {n_somos} Somos goals replayed"))
}

fn classification() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let rings = [Ring::rationals(), Ring::prime_field(7).map_err(|e| e.to_string())?];
    for i in 0..200 {
        let ring = &rings[i % 2];
        let params = common::random_construction(ring, &mut rng, i / 2);
        let seq = params.construct().ok_or("construction failed")?;
        let got = classify(&seq, 60).map_err(|e| e.to_string())?;
        ensure(got.tag() == params.tag(), || format!("{params:?} classified as {got:?}"))?;
        let rebuilt = got.construct().ok_or("no sequence")?.prefix(60).map_err(|e| e.to_string())?;
        ensure(rebuilt == seq.prefix(60).map_err(|e| e.to_string())?, || format!("{params:?}: terms differ"))?;
        let bad = check_window(&seq, 14, Family::Full).map_err(|e| e.to_string())?;
        ensure(bad.is_empty(), || format!("{params:?} violates {bad:?}"))?;
    }
    Ok("200 constructions round-trip and pass the N=14 sweep".into())
}

fn automaton() -> Outcome {
    let st = |s: &str| s.parse::<PatternState>().unwrap();
    // The diagram's edges, with 1010 -> 0100 in place of the drawn 1010 -> 0010.
    let drawn = [
        ("1110", "1100"), ("1101", "1011"), ("1011", "0110"), ("0110", "1101"), ("0011", "0110"), ("0110", "1100"),
        ("1100", "1000"), ("1000", "0000"), ("0000", "0001"), ("0001", "0011"), ("0001", "0010"), ("0010", "0100"),
        ("0100", "1000"), ("0100", "1001"), ("1001", "0010"), ("1010", "0100"), ("0000", "0000"),
    ];
    let want: std::collections::BTreeSet<_> = drawn.iter().map(|(a, b)| (st(a), st(b))).collect();
    ensure(automaton_transitions() == want, || "edge set differs".into())?;
    let loops: Vec<String> = simple_loops().into_iter().collect();
    ensure(loops == ["0", "00001", "000011", "001", "011"], || format!("loops {loops:?}"))?;
    let names = |s: std::collections::BTreeSet<PatternState>| s.iter().map(|x| x.to_string()).collect::<Vec<_>>();
    ensure(names(initial_states()) == ["1100", "1101"], || "initial states".into())?;
    ensure(names(unreachable_states()) == ["1010", "1110", "1111"], || format!("{:?}", names(unreachable_states())))?;
    ensure(names(dead_states()) == ["0101", "0111"], || format!("{:?}", names(dead_states())))?;
    Ok(format!("{} edges, loops {}", want.len(), loops.join(" ")))
}

fn probes() -> Outcome {
    let goal = RelationId::new(5, 3, 2, 1);
    let mut found = Vec::new();
    for (k, want) in [(8usize, 3u32), (10, 2)] {
        let s = SymbolicSeqRing::new(k);
        let e = symbolic_relation(&s, &goal).map_err(|e| e.to_string())?;
        let rels = family_relations(Family::Mnr0, k as i64);
        let out = nilpotency_probe(&s, &e, &rels, 4).map_err(|e| e.to_string())?;
        if let ProbeOutcome::Member(c) = &out {
            ensure(c.verify(&s, &e).unwrap_or(false), || format!("K={k}: certificate does not verify"))?;
        }
        ensure(out.exponent() == Some(want), || format!("K={k}: exponent {:?}", out.exponent()))?;
        found.push(format!("K={k}: exponent {want}"));
    }
    Ok(found.join(", "))
}

fn determinism() -> Outcome {
    let q = Ring::rationals();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (mut ok, mut tried) = (0, 0);
    while ok < 50 {
        tried += 1;
        ensure(tried < 2000, || format!("only {ok} usable initials"))?;
        let h: [_; 4] = std::array::from_fn(|_| common::nonzero(&q, &mut rng));
        let eo = EllipticSeq::even_odd(h.clone()).map_err(|e| e.to_string())?;
        let Ok(window) = eo.prefix(30) else { continue };
        if window.iter().any(|x| x.is_zero()) {
            continue;
        }
        let so = EllipticSeq::somos4(h.clone()).map_err(|e| e.to_string())?;
        let b = h[1].exact_div(&h[0]).map_err(|e| e.to_string())?;
        let c = h[2].exact_div(&h[0]).map_err(|e| e.to_string())?;
        let d = h[3].exact_div(&h[1]).map_err(|e| e.to_string())?;
        let std = EllipticSeq::std_eds(b, c, d).and_then(|s| s.scale(&h[0])).map_err(|e| e.to_string())?;
        ensure(so.prefix(30).map_err(|e| e.to_string())? == window, || format!("somos4 differs for {h:?}"))?;
        ensure(std.prefix(30).map_err(|e| e.to_string())? == window, || format!("StdEDS differs for {h:?}"))?;
        ok += 1;
    }
    Ok(format!("50 initials agree to n = 30 ({tried} drawn)"))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 12] = [
        ("identity sequence", identity_sequence),
        ("universal h6", universal_h6),
        ("EDS(2,3,3/2) prefix", paper_prefix),
        ("full sweep N=14", full_sweep),
        ("symbolic identity suite", identity_suite),
        ("divisibility witnesses", divisibility),
        ("invariant identities", invariants),
        ("derivation totality", derivations),
        ("classification round-trip", classification),
        ("type (110) automaton", automaton),
        ("nilpotency probes", probes),
        ("generator determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let r = f();
        let ms = t.elapsed().as_millis();
        match r {
            Ok(detail) => println!("criterion {:2} PASS  {name}: {detail} [{ms} ms]", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:2} FAIL  {name}: {why} [{ms} ms]", i + 1);
            }
        }
    }
    println!("{} of 12 criteria passed", 12 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
