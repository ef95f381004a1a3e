#![allow(dead_code)]

use ellseq::classify::Classification;
use ellseq::{Ring, RingElement};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Small random nonzero element: p/q with |p|, q <= 5 over Q, a unit in Fp.
pub fn nonzero(ring: &Ring, rng: &mut ChaCha8Rng) -> RingElement {
    loop {
        let p: i64 = rng.gen_range(-5..=5);
        let q: i64 = rng.gen_range(1..=5);
        let x = ring.parse_element(&format!("{p}/{q}")).unwrap_or_else(|_| ring.from_int(p));
        if !x.is_zero() {
            return x;
        }
    }
}

/// A random TypeI, TypeII or TypeIII parameter set, cycling through the
/// three kinds by `i`.
pub fn random_construction(ring: &Ring, rng: &mut ChaCha8Rng, i: usize) -> Classification {
    match i % 3 {
        0 => {
            let r = [1u64, 1, 3, 5][rng.gen_range(0..4)];
            let d = if rng.gen_bool(0.2) { ring.zero() } else { nonzero(ring, rng) };
            Classification::TypeI { r, a: nonzero(ring, rng), b: nonzero(ring, rng), c: nonzero(ring, rng), d }
        }
        1 => {
            let pairs = [(1u64, 4u64), (2, 3), (2, 5), (3, 4), (1, 6), (3, 8), (4, 7), (5, 6)];
            let (r, s) = pairs[rng.gen_range(0..pairs.len())];
            Classification::TypeII { r, s, a: nonzero(ring, rng), b: nonzero(ring, rng), d: nonzero(ring, rng) }
        }
        _ => {
            let r = [2u64, 4, 6, 8][rng.gen_range(0..4)];
            Classification::TypeIII { r, a: nonzero(ring, rng), c: nonzero(ring, rng) }
        }
    }
}
