use serde::Serialize;

use super::{RelationError, RelationId};
use crate::ring::{Ring, RingElement};
use crate::sequences::{FailureReason, GenerationFailure, TermOracle};

/// The three products of a relation and `defect = lhs - (rhs1 - rhs2)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelationValue {
    pub lhs: RingElement,
    pub rhs1: RingElement,
    pub rhs2: RingElement,
    pub defect: RingElement,
}

impl RelationValue {
    pub fn holds(&self) -> bool {
        self.defect.is_zero()
    }
}

#[derive(Serialize)]
struct RelationValueJson {
    lhs: String,
    rhs1: String,
    rhs2: String,
    defect: String,
}

impl Serialize for RelationValue {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        RelationValueJson {
            lhs: self.lhs.to_string(),
            rhs1: self.rhs1.to_string(),
            rhs2: self.rhs2.to_string(),
            defect: self.defect.to_string(),
        }
        .serialize(s)
    }
}

fn product(seq: &dyn TermOracle, idx: &[i64; 4]) -> Result<RingElement, GenerationFailure> {
    let mut acc = seq.ring().one();
    for &i in idx {
        acc = &acc * &seq.term(i)?;
    }
    Ok(acc)
}

pub fn eval_relation(seq: &dyn TermOracle, r: &RelationId) -> Result<RelationValue, GenerationFailure> {
    let [t1, t2, t3] = r.term_indices();
    let lhs = product(seq, &t1)?;
    let rhs1 = product(seq, &t2)?;
    let rhs2 = product(seq, &t3)?;
    let defect = &lhs - &(&rhs1 - &rhs2);
    Ok(RelationValue { lhs, rhs1, rhs2, defect })
}

/// h(p+q+s)h(p-q)h(r+s)h(r) + h(q+r+s)h(q-r)h(p+s)h(p) + h(r+p+s)h(r-p)h(q+s)h(q)
pub fn eval_en(seq: &dyn TermOracle, p: i64, q: i64, r: i64, s: i64) -> Result<RingElement, GenerationFailure> {
    let cyc = |x: i64, y: i64, z: i64| -> Result<RingElement, GenerationFailure> {
        product(seq, &[x + y + s, x - y, z + s, z])
    };
    Ok(cyc(p, q, r)? + cyc(q, r, p)? + cyc(r, p, q)?)
}

/// Polynomial ring in h1..hK with h0 = 0 and h(-n) = -h(n).
#[derive(Clone, Debug)]
pub struct SymbolicSeqRing {
    k: usize,
    ring: Ring,
}

impl SymbolicSeqRing {
    pub fn new(k: usize) -> SymbolicSeqRing {
        assert!(k > 0, "K must be positive");
        let names: Vec<String> = (1..=k).map(|i| format!("h{i}")).collect();
        SymbolicSeqRing { k, ring: Ring::polynomial(&names).expect("valid names") }
    }

    pub fn max_index(&self) -> usize {
        self.k
    }

    pub fn poly_ring(&self) -> &Ring {
        &self.ring
    }

    /// Weight vector `C1 n^2 + C2` on h1..hK.
    pub fn weights(&self, c1: i64, c2: i64) -> Vec<i64> {
        (1..=self.k as i64).map(|n| c1 * n * n + c2).collect()
    }

    pub fn h(&self, n: i64) -> Result<RingElement, RelationError> {
        self.term(n).map_err(|_| RelationError::KTooSmall { need: n.abs(), have: self.k })
    }
}

impl TermOracle for SymbolicSeqRing {
    fn ring(&self) -> &Ring {
        &self.ring
    }

    fn term(&self, n: i64) -> Result<RingElement, GenerationFailure> {
        if n == 0 {
            return Ok(self.ring.zero());
        }
        let m = n.unsigned_abs() as usize;
        if m > self.k {
            return Err(GenerationFailure { index: n, reason: FailureReason::PreconditionViolated });
        }
        let x = self.ring.var_at(m - 1);
        Ok(if n < 0 { -x } else { x })
    }
}

/// The defect of `r` as a polynomial in h1..hK.
pub fn symbolic_relation(ring: &SymbolicSeqRing, r: &RelationId) -> Result<RingElement, RelationError> {
    let need = r.term_indices().iter().flatten().map(|i| i.abs()).max().unwrap_or(0);
    if need > ring.k as i64 {
        return Err(RelationError::KTooSmall { need, have: ring.k });
    }
    Ok(eval_relation(ring, r)?.defect)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::relations::Half;
    use crate::sequences::EllipticSeq;

    fn identity() -> EllipticSeq {
        let z = Ring::integers();
        EllipticSeq::explicit(&z, "identity", move |n| Ok(Ring::integers().from_int(n)))
    }

    #[test]
    fn identity_sequence_values() {
        let v = eval_relation(&identity(), &RelationId::new(3, 2, 1, 0)).unwrap();
        let z = Ring::integers();
        assert_eq!(v.lhs, z.from_int(5));
        assert_eq!(v.rhs1, z.from_int(32));
        assert_eq!(v.rhs2, z.from_int(27));
        assert!(v.holds());
        assert!(eval_en(&identity(), 3, 2, 1, 0).unwrap().is_zero());
        assert!(eval_en(&identity(), 4, 4, 1, 2).unwrap().is_zero());
    }

    #[test]
    fn symbolic_examples() {
        let s = SymbolicSeqRing::new(7);
        let a = symbolic_relation(&s, &RelationId::new(5, 2, 1, 0)).unwrap();
        let b = symbolic_relation(&s, &RelationId::new(4, 3, 2, 1)).unwrap();
        assert!((a - b).is_zero());
        let e = symbolic_relation(&s, &RelationId::new(3, 2, 1, 0)).unwrap();
        let w = s.weights(1, 0);
        assert_eq!(e.as_poly().unwrap().homogeneous_weight(&w), Some(28));
        assert!(symbolic_relation(&s, &RelationId::new(2, 1, 1, 0)).unwrap().is_zero());
        assert!(matches!(
            symbolic_relation(&s, &RelationId::new(5, 3, 2, 1)),
            Err(RelationError::KTooSmall { need: 8, .. })
        ));
    }

    #[test]
    fn canonicalization_matches_term_values() {
        let s = SymbolicSeqRing::new(12);
        let raw = [
            RelationId::new(1, 4, -3, 0),
            RelationId::new(0, 2, 5, 1),
            RelationId::from_halves([Half(-3), Half(9), Half(1), Half(5)]).unwrap(),
        ];
        for r in raw {
            let c = r.canonicalize();
            let orig = eval_relation(&s, &r).unwrap();
            let can = eval_relation(&s, &c.id).unwrap();
            let o = [&orig.lhs, &orig.rhs1, &orig.rhs2];
            let k = [&can.lhs, &can.rhs1, &can.rhs2];
            for i in 0..3 {
                let t = k[c.perm[i]].clone();
                let t = if c.sign[i] < 0 { -t } else { t };
                assert_eq!(o[i], &t, "{r} term {i}");
            }
            let d = if c.defect_sign() < 0 { -can.defect.clone() } else { can.defect.clone() };
            assert_eq!(orig.defect, d);
        }
    }
}
