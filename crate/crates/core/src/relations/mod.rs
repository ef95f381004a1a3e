//! Elliptic relations E(a,b,c,d): parameter algebra, evaluation, the
//! identities between relations, and a bounded ideal-membership probe.
//!
//! With T1 = h(a+b)h(a-b)h(c+d)h(c-d), T2 = h(a+c)h(a-c)h(b+d)h(b-d) and
//! T3 = h(b+c)h(b-c)h(a+d)h(a-d), the relation reads T1 = T2 - T3.

mod eval;
pub mod identities;
mod probe;

use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ring::RingError;
use crate::sequences::GenerationFailure;

pub use eval::{eval_en, eval_relation, symbolic_relation, RelationValue, SymbolicSeqRing};
pub use identities::{
    verify_en_combination, verify_eq3_identity, verify_rule_ii1_identity, verify_rule_ii1_swap_identity,
    verify_rule_ii2_identity, Ii1Form, TIdentity, TTerm,
};
pub use probe::{nilpotency_probe, MembershipCertificate, ProbeOutcome};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RelationError {
    #[error("parameters {0:?} (doubled) do not share a parity")]
    Parity([i64; 4]),
    #[error("symbolic ring has K = {have} but index {need} is required")]
    KTooSmall { need: i64, have: usize },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error(transparent)]
    Generation(#[from] GenerationFailure),
    #[error(transparent)]
    Ring(#[from] RingError),
}

/// An integer or half-integer, stored doubled.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Half(pub i64);

impl Half {
    pub fn int(n: i64) -> Half {
        Half(2 * n)
    }

    pub fn doubled(self) -> i64 {
        self.0
    }

    pub fn is_integer(self) -> bool {
        self.0 % 2 == 0
    }

    pub fn abs(self) -> Half {
        Half(self.0.abs())
    }

    /// `(self + other)` as an integer index; both must share a parity.
    pub fn sum_index(self, other: Half) -> i64 {
        debug_assert_eq!((self.0 + other.0).rem_euclid(2), 0);
        (self.0 + other.0) / 2
    }

    pub fn diff_index(self, other: Half) -> i64 {
        debug_assert_eq!((self.0 - other.0).rem_euclid(2), 0);
        (self.0 - other.0) / 2
    }
}

impl Add for Half {
    type Output = Half;
    fn add(self, o: Half) -> Half {
        Half(self.0 + o.0)
    }
}

impl Sub for Half {
    type Output = Half;
    fn sub(self, o: Half) -> Half {
        Half(self.0 - o.0)
    }
}

impl Neg for Half {
    type Output = Half;
    fn neg(self) -> Half {
        Half(-self.0)
    }
}

impl fmt::Display for Half {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

impl FromStr for Half {
    type Err = String;
    fn from_str(s: &str) -> Result<Half, String> {
        let s = s.trim();
        match s.split_once('/') {
            None => s.parse::<i64>().map(Half::int).map_err(|e| format!("{s:?}: {e}")),
            Some((n, "2")) => n.trim().parse::<i64>().map(Half).map_err(|e| format!("{s:?}: {e}")),
            Some(_) => Err(format!("{s:?}: only halves are supported")),
        }
    }
}

/// Parameters (a,b,c,d) of an elliptic relation, stored doubled so that
/// half-integers are exact.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize, Deserialize)]
pub struct RelationId {
    pub a2: i64,
    pub b2: i64,
    pub c2: i64,
    pub d2: i64,
}

/// Result of canonicalizing a relation id: the canonical id and how the
/// original terms (T1,T2,T3) map onto the canonical ones.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Canonical {
    pub id: RelationId,
    /// Original `T[i] = sign[i] * canonical T[perm[i]]`.
    pub perm: [usize; 3],
    pub sign: [i8; 3],
}

impl Canonical {
    /// Sign relating the defects: original defect = `defect_sign` * canonical defect.
    pub fn defect_sign(&self) -> i8 {
        // T1 - T2 + T3 is an alternating form; a transposition flips it.
        let s = [1i8, -1, 1];
        let orig0 = s[0] * self.sign[0];
        let canon_coeff = s[self.perm[0]];
        orig0 * canon_coeff
    }
}

impl RelationId {
    pub fn new(a: i64, b: i64, c: i64, d: i64) -> RelationId {
        RelationId { a2: 2 * a, b2: 2 * b, c2: 2 * c, d2: 2 * d }
    }

    pub fn from_doubled(a2: i64, b2: i64, c2: i64, d2: i64) -> Result<RelationId, RelationError> {
        let p = (a2.rem_euclid(2), b2.rem_euclid(2), c2.rem_euclid(2), d2.rem_euclid(2));
        if p.0 != p.1 || p.1 != p.2 || p.2 != p.3 {
            return Err(RelationError::Parity([a2, b2, c2, d2]));
        }
        Ok(RelationId { a2, b2, c2, d2 })
    }

    pub fn from_halves(p: [Half; 4]) -> Result<RelationId, RelationError> {
        RelationId::from_doubled(p[0].0, p[1].0, p[2].0, p[3].0)
    }

    pub fn params(&self) -> [Half; 4] {
        [Half(self.a2), Half(self.b2), Half(self.c2), Half(self.d2)]
    }

    pub fn is_integral(&self) -> bool {
        self.a2 % 2 == 0
    }

    /// Strictly decreasing, non-negative parameters.
    pub fn is_canonical(&self) -> bool {
        self.a2 > self.b2 && self.b2 > self.c2 && self.c2 > self.d2 && self.d2 >= 0
    }

    /// Two parameters agree up to sign; such a relation holds for every
    /// sequence with h0 = 0 and h(-n) = -h(n).
    pub fn has_repeated(&self) -> bool {
        let c = self.canonicalize().id;
        c.a2 == c.b2 || c.b2 == c.c2 || c.c2 == c.d2
    }

    /// Largest index appearing in the relation, `|a| + |b|` after sorting.
    pub fn max_index(&self) -> i64 {
        let c = self.canonicalize().id;
        (c.a2 + c.b2) / 2
    }

    /// The index pairs of the three products, as `[[i+j, i-j, k+l, k-l]; 3]`.
    pub fn term_indices(&self) -> [[i64; 4]; 3] {
        let [a, b, c, d] = self.params();
        [
            [a.sum_index(b), a.diff_index(b), c.sum_index(d), c.diff_index(d)],
            [a.sum_index(c), a.diff_index(c), b.sum_index(d), b.diff_index(d)],
            [b.sum_index(c), b.diff_index(c), a.sum_index(d), a.diff_index(d)],
        ]
    }

    /// Takes absolute values and sorts descending, tracking how the three
    /// products move. Negating a parameter leaves every product unchanged.
    pub fn canonicalize(&self) -> Canonical {
        let mut p = [self.a2.abs(), self.b2.abs(), self.c2.abs(), self.d2.abs()];
        // terms[i] = (sign, original term index) currently sitting in slot i
        let mut slots: [(i8, usize); 3] = [(1, 0), (1, 1), (1, 2)];
        // Bubble sort with the transposition rules on the product triple.
        loop {
            let mut swapped = false;
            for i in 0..3 {
                if p[i] < p[i + 1] {
                    p.swap(i, i + 1);
                    swapped = true;
                    let (t1, t2, t3) = (slots[0], slots[1], slots[2]);
                    slots = match i {
                        // swap a,b or c,d: (T1,T2,T3) -> (-T1, T3, T2)
                        0 | 2 => [(-t1.0, t1.1), t3, t2],
                        // swap b,c: (T1,T2,T3) -> (T2, T1, -T3)
                        _ => [t2, t1, (-t3.0, t3.1)],
                    };
                }
            }
            if !swapped {
                break;
            }
        }
        let mut perm = [0usize; 3];
        let mut sign = [1i8; 3];
        for (slot, &(s, orig)) in slots.iter().enumerate() {
            perm[orig] = slot;
            sign[orig] = s;
        }
        Canonical { id: RelationId { a2: p[0], b2: p[1], c2: p[2], d2: p[3] }, perm, sign }
    }

    pub fn canonical(&self) -> RelationId {
        self.canonicalize().id
    }

    /// ((a+b+c+d)/2, (a+b-c-d)/2, (a+c-b-d)/2, |a+d-b-c|/2)
    pub fn rule_i1(&self) -> RelationId {
        let RelationId { a2, b2, c2, d2 } = *self;
        RelationId {
            a2: (a2 + b2 + c2 + d2) / 2,
            b2: (a2 + b2 - c2 - d2) / 2,
            c2: (a2 + c2 - b2 - d2) / 2,
            d2: ((a2 + d2 - b2 - c2) / 2).abs(),
        }
    }

    /// ((a+b+c-d)/2, (a+b+d-c)/2, (a+c+d-b)/2, |b+c+d-a|/2)
    pub fn rule_i2(&self) -> RelationId {
        let RelationId { a2, b2, c2, d2 } = *self;
        RelationId {
            a2: (a2 + b2 + c2 - d2) / 2,
            b2: (a2 + b2 + d2 - c2) / 2,
            c2: (a2 + c2 + d2 - b2) / 2,
            d2: ((b2 + c2 + d2 - a2) / 2).abs(),
        }
    }

    /// All canonical ids (integer and half-integer) with `a + b <= bound`.
    pub fn all_canonical(bound: i64) -> Vec<RelationId> {
        let mut out = Vec::new();
        for a2 in 0..=2 * bound {
            for b2 in (0..a2).rev() {
                if a2 + b2 > 2 * bound {
                    continue;
                }
                if (a2 - b2) % 2 != 0 {
                    continue;
                }
                for c2 in (0..b2).rev().filter(|c| (b2 - c) % 2 == 0) {
                    for d2 in (0..c2).rev().filter(|d| (c2 - d) % 2 == 0) {
                        out.push(RelationId { a2, b2, c2, d2 });
                    }
                }
            }
        }
        out.sort();
        out
    }
}

impl fmt::Display for RelationId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d] = self.params();
        write!(f, "E({a},{b},{c},{d})")
    }
}
