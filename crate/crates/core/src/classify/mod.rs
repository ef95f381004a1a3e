//! Classification of field-valued sequences satisfying all E(m,n,r,0), the
//! transition automaton for type (110) Somos sequences, and the branch-off
//! explorer for type (111) Somos sequences.

mod automaton;
mod somos;

use serde::ser::SerializeMap;
use serde::Serialize;
use thiserror::Error;

use crate::relations::{eval_relation, RelationId};
use crate::ring::{Ring, RingElement, RingError};
use crate::sequences::{family_relations, EllipticSeq, Family, GenerationFailure, SequenceError, TermOracle};

pub use automaton::{automaton_dot, automaton_transitions, dead_states, initial_states, simple_loops, unreachable_states, PatternState};
pub use somos::{branch_explore, gen_type110, zsigmondy_scan, BranchPoint, Pattern};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClassifyError {
    #[error("ring {0} is not a field")]
    NotAField(String),
    #[error(transparent)]
    Generation(#[from] GenerationFailure),
    #[error(transparent)]
    Sequence(#[from] SequenceError),
    #[error(transparent)]
    Ring(#[from] RingError),
    #[error("pattern window at position {position} is not a valid transition")]
    InvalidPattern { position: usize },
    #[error("precondition violated: {0}")]
    Precondition(String),
}

/// The three sequence families a classification can return, plus the two ways the
/// analysis can stop.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Classification {
    /// A * EDS(B,C,D)^[1/r], r odd.
    TypeI { r: u64, a: RingElement, b: RingElement, c: RingElement, d: RingElement },
    /// A * ES_{r,s}(B,D), r < s of opposite parity, s != 2r.
    TypeII { r: u64, s: u64, a: RingElement, b: RingElement, d: RingElement },
    /// A * EDS(0,C,0)^[1/r], r even.
    TypeIII { r: u64, a: RingElement, c: RingElement },
    /// A violated E(m,n,r,0) of minimal a+b.
    NotElliptic { witness: RelationId },
    /// The analysis needs terms up to `needed`, beyond the bound.
    Inconclusive { needed: i64, bound: i64 },
}

impl Classification {
    pub fn tag(&self) -> &'static str {
        match self {
            Classification::TypeI { .. } => "TypeI",
            Classification::TypeII { .. } => "TypeII",
            Classification::TypeIII { .. } => "TypeIII",
            Classification::NotElliptic { .. } => "NotElliptic",
            Classification::Inconclusive { .. } => "Inconclusive",
        }
    }

    /// The sequence the parameters describe, for the three sequence types.
    pub fn construct(&self) -> Option<EllipticSeq> {
        let seq = match self {
            Classification::TypeI { r, a, b, c, d } => {
                EllipticSeq::std_eds(b.clone(), c.clone(), d.clone()).ok()?.dilate_any(*r).scale(a).ok()?
            }
            Classification::TypeII { r, s, a, b, d } => EllipticSeq::es(*r, *s, a.clone(), b.clone(), d.clone()).ok()?,
            Classification::TypeIII { r, a, c } => {
                let z = a.ring().zero();
                EllipticSeq::std_eds(z.clone(), c.clone(), z).ok()?.dilate_any(*r).scale(a).ok()?
            }
            _ => return None,
        };
        Some(seq)
    }
}

impl Serialize for Classification {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut m = s.serialize_map(None)?;
        m.serialize_entry("tag", self.tag())?;
        let el = |x: &RingElement| x.to_string();
        match self {
            Classification::TypeI { r, a, b, c, d } => {
                m.serialize_entry("r", r)?;
                m.serialize_entry("A", &el(a))?;
                m.serialize_entry("B", &el(b))?;
                m.serialize_entry("C", &el(c))?;
                m.serialize_entry("D", &el(d))?;
            }
            Classification::TypeII { r, s: s2, a, b, d } => {
                m.serialize_entry("r", r)?;
                m.serialize_entry("s", s2)?;
                m.serialize_entry("A", &el(a))?;
                m.serialize_entry("B", &el(b))?;
                m.serialize_entry("D", &el(d))?;
            }
            Classification::TypeIII { r, a, c } => {
                m.serialize_entry("r", r)?;
                m.serialize_entry("A", &el(a))?;
                m.serialize_entry("C", &el(c))?;
            }
            Classification::NotElliptic { witness } => m.serialize_entry("witness", &witness.to_string())?,
            Classification::Inconclusive { needed, bound } => {
                m.serialize_entry("needed", needed)?;
                m.serialize_entry("bound", bound)?;
            }
        }
        m.end()
    }
}

enum Candidate {
    Found(Classification),
    NeedMore(i64),
    Invalid,
}

/// Terms of the 2-adically contracted sequence H(i) = h(i 2^j).
struct Window<'a> {
    terms: &'a [RingElement],
    scale: i64,
    len: i64,
}

impl Window<'_> {
    fn h(&self, i: i64) -> &RingElement {
        &self.terms[(i * self.scale - 1) as usize]
    }

    fn need(&self, i: i64) -> Result<(), i64> {
        if i <= self.len {
            Ok(())
        } else {
            Err(i * self.scale)
        }
    }

    fn ratio(&self, i: i64, j: i64) -> RingElement {
        self.h(i).exact_div(self.h(j)).expect("nonzero divisor in a field")
    }
}

fn candidate(ring: &Ring, terms: &[RingElement]) -> Candidate {
    let n = terms.len() as i64;
    let support: Vec<i64> = (1..=n).filter(|&i| !terms[(i - 1) as usize].is_zero()).collect();
    if support.is_empty() {
        let z = ring.zero();
        return Candidate::Found(Classification::TypeI { r: 1, a: z.clone(), b: z.clone(), c: z.clone(), d: z });
    }
    let j = support.iter().map(|i| i.trailing_zeros()).min().expect("nonempty");
    let scale = 1i64 << j;
    let w = Window { terms, scale, len: n / scale };
    let sup: Vec<i64> = support.iter().map(|i| i / scale).collect();
    if j > 0 && sup.iter().any(|i| i % 2 == 0) {
        return Candidate::Invalid;
    }
    match analyse(ring, &w, &sup, j) {
        Ok(Some(c)) => Candidate::Found(c),
        Ok(None) => Candidate::Invalid,
        Err(needed) => Candidate::NeedMore(needed),
    }
}

/// Case analysis of the contracted sequence; `Err` carries the index needed.
/// Correctness of the candidate is left to the caller's term comparison.
fn analyse(ring: &Ring, w: &Window<'_>, sup: &[i64], j: u32) -> Result<Option<Classification>, i64> {
    let zero = ring.zero();
    let scale = w.scale as u64;
    // EDS(0,C,0)^[1/r] on the contracted sequence, then undo the contraction.
    let zero_c_zero = |r: i64, c: RingElement| {
        let a = w.h(r).clone();
        if j == 0 {
            Classification::TypeI { r: r as u64, a, b: zero.clone(), c, d: zero.clone() }
        } else {
            Classification::TypeIII { r: r as u64 * scale, a, c }
        }
    };
    let type_i = |r: i64| {
        let b = w.ratio(2 * r, r);
        let c = w.ratio(3 * r, r);
        let d = if w.h(2 * r).is_zero() { zero.clone() } else { w.ratio(4 * r, 2 * r) };
        Classification::TypeI { r: r as u64, a: w.h(r).clone(), b, c, d }
    };
    let type_ii = |r: i64, s: i64| {
        let b = -w.ratio(s, r);
        let d = w.ratio(s + 2 * r, r);
        Classification::TypeII { r: r as u64, s: s as u64, a: w.h(r).clone(), b, d }
    };
    // In every type the first nonzero term sits at r; the first nonzero term
    // of the other parity class (if any) is s, or 2r for type I.
    let r = sup[0];
    match sup.iter().copied().find(|i| (i - r) % 2 != 0) {
        None if r % 2 == 1 => {
            w.need(3 * r)?;
            Ok(Some(zero_c_zero(r, w.ratio(3 * r, r))))
        }
        None => Ok(None),
        Some(s) if s == 2 * r => {
            w.need(4 * r)?;
            Ok(Some(type_i(r)))
        }
        Some(s) => {
            w.need(s + 2 * r)?;
            Ok(Some(type_ii(r, s)))
        }
    }
}

/// The violated E(m,n,r,0) with the smallest a+b, if any.
pub fn not_elliptic_witness(seq: &dyn TermOracle, n: i64) -> Result<Option<RelationId>, GenerationFailure> {
    let mut rels = family_relations(Family::Mnr0, n);
    rels.sort_by_key(|r| (r.a2 + r.b2, r.a2, r.b2, r.c2));
    for r in rels {
        if !eval_relation(seq, &r)?.holds() {
            return Ok(Some(r));
        }
    }
    Ok(None)
}

/// Classifies h from its terms 1..=n. A sequence result regenerates every
/// observed term.
pub fn classify(seq: &dyn TermOracle, n: i64) -> Result<Classification, ClassifyError> {
    let ring = seq.ring().clone();
    if !ring.is_field() {
        return Err(ClassifyError::NotAField(ring.to_string()));
    }
    let terms: Vec<RingElement> = (1..=n).map(|i| seq.term(i)).collect::<Result<_, _>>()?;
    let table = EllipticSeq::from_terms(&ring, terms.clone())?;
    let mut needed = n;
    match candidate(&ring, &terms) {
        Candidate::Found(c) => {
            let built = c.construct().expect("sequence type").prefix(n)?;
            if built == terms {
                return Ok(c);
            }
        }
        Candidate::NeedMore(k) => needed = k,
        Candidate::Invalid => {}
    }
    if let Some(witness) = not_elliptic_witness(&table, n)? {
        return Ok(Classification::NotElliptic { witness });
    }
    Ok(Classification::Inconclusive { needed: needed.max(n + 1), bound: n })
}
