//! Linear identities between relations, with T(mn|abcd) := h(m+n)h(m-n)E(a,b,c,d).

use serde::{Deserialize, Serialize};

use super::{eval::symbolic_relation, Half, RelationError, RelationId, SymbolicSeqRing};
use crate::ring::RingElement;

/// `coeff * T(pair | rel)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TTerm {
    pub coeff: i64,
    pub pair: [Half; 2],
    pub rel: [Half; 4],
}

impl TTerm {
    pub fn new(coeff: i64, pair: [Half; 2], rel: [Half; 4]) -> TTerm {
        TTerm { coeff, pair, rel }
    }

    pub fn relation(&self) -> RelationId {
        RelationId::from_halves(self.rel).expect("identity parameters share a parity")
    }

    /// Indices of the cofactor h(m+n)h(m-n).
    pub fn cofactor_indices(&self) -> (i64, i64) {
        (self.pair[0].sum_index(self.pair[1]), self.pair[0].diff_index(self.pair[1]))
    }

    pub fn eval(&self, s: &SymbolicSeqRing) -> Result<RingElement, RelationError> {
        let (i, j) = self.cofactor_indices();
        let e = symbolic_relation(s, &self.relation())?;
        let c = s.poly_ring().from_int(self.coeff);
        Ok(c * s.h(i)? * s.h(j)? * e)
    }

    pub fn max_index(&self) -> i64 {
        let (i, j) = self.cofactor_indices();
        let r = self.relation().term_indices();
        r.iter().flatten().chain([i, j].iter()).map(|x| x.abs()).max().unwrap_or(0)
    }
}

/// `lhs = sum(rhs)` as an identity of polynomials in h1..hK.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TIdentity {
    pub lhs: TTerm,
    pub rhs: Vec<TTerm>,
}

impl TIdentity {
    pub fn max_index(&self) -> i64 {
        self.rhs.iter().chain([&self.lhs]).map(TTerm::max_index).max().unwrap_or(0)
    }

    pub fn holds(&self, s: &SymbolicSeqRing) -> Result<bool, RelationError> {
        let mut acc = self.lhs.eval(s)?;
        for t in &self.rhs {
            acc = acc - t.eval(s)?;
        }
        Ok(acc.is_zero())
    }
}

/// The Rule II.1 identity shapes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Ii1Form {
    /// (m,n,r,c,d): T(cd|mnrc) = T(rc|mncd) - T(nc|mrcd) + T(mc|nrcd)
    C,
    /// (m,n,r,c,d): T(cd|mnrd) = T(rd|mncd) - T(nd|mrcd) + T(md|nrcd)
    D,
    /// (a,b,c,d,e): T(ce|abcd) = T(cd|abce) + T(bc|aced) - T(ac|bced)
    CE,
    /// (a,b,c,d,e): T(ec|abcd) = T(cd|abec) + T(bc|aecd) - T(ac|becd)
    EC,
}

pub fn rule_ii1(form: Ii1Form, p: [Half; 5]) -> TIdentity {
    let t = TTerm::new;
    match form {
        Ii1Form::C | Ii1Form::D => {
            let [m, n, r, c, d] = p;
            let x = if form == Ii1Form::C { c } else { d };
            TIdentity {
                lhs: t(1, [c, d], [m, n, r, x]),
                rhs: vec![t(1, [r, x], [m, n, c, d]), t(-1, [n, x], [m, r, c, d]), t(1, [m, x], [n, r, c, d])],
            }
        }
        Ii1Form::CE => {
            let [a, b, c, d, e] = p;
            TIdentity {
                lhs: t(1, [c, e], [a, b, c, d]),
                rhs: vec![t(1, [c, d], [a, b, c, e]), t(1, [b, c], [a, c, e, d]), t(-1, [a, c], [b, c, e, d])],
            }
        }
        Ii1Form::EC => {
            let [a, b, c, d, e] = p;
            TIdentity {
                lhs: t(1, [e, c], [a, b, c, d]),
                rhs: vec![t(1, [c, d], [a, b, e, c]), t(1, [b, c], [a, e, c, d]), t(-1, [a, c], [b, e, c, d])],
            }
        }
    }
}

/// (m,n,r,s,c,d): the ten-term identity for T(cd|mnrs).
pub fn rule_ii2(p: [Half; 6]) -> TIdentity {
    let [m, n, r, s, c, d] = p;
    let t = TTerm::new;
    TIdentity {
        lhs: t(1, [c, d], [m, n, r, s]),
        rhs: vec![
            t(1, [n, d], [m, r, s, c]),
            t(-1, [r, d], [m, n, s, c]),
            t(1, [s, d], [m, n, r, c]),
            t(1, [n, c], [m, r, s, d]),
            t(-1, [r, c], [m, n, s, d]),
            t(1, [s, c], [m, n, r, d]),
            t(1, [n, r], [m, s, c, d]),
            t(-1, [n, s], [m, r, c, d]),
            t(1, [r, s], [m, n, c, d]),
            t(-2, [m, d], [n, r, s, c]),
        ],
    }
}

fn distinct_nonneg(p: &[Half]) -> Result<(), RelationError> {
    let parity = p[0].0.rem_euclid(2);
    for (i, x) in p.iter().enumerate() {
        if x.0 < 0 || x.0.rem_euclid(2) != parity {
            return Err(RelationError::Precondition(format!("parameter {x} must be non-negative with a shared parity")));
        }
        if p[..i].contains(x) {
            return Err(RelationError::Precondition(format!("parameter {x} is repeated")));
        }
    }
    Ok(())
}

/// h1^2 E(m,n,r,0) = h_r^2 E(m,n,1,0) - h_n^2 E(m,r,1,0) + h_m^2 E(n,r,1,0)
pub fn verify_eq3_identity(m: i64, n: i64, r: i64, k: usize) -> Result<bool, RelationError> {
    if !(m > n && n > r && r > 1) {
        return Err(RelationError::Precondition(format!("need m > n > r > 1, got ({m},{n},{r})")));
    }
    let s = SymbolicSeqRing::new(k);
    let e = |a, b, c, d| symbolic_relation(&s, &RelationId::new(a, b, c, d));
    let lhs = s.h(1)?.pow(2) * e(m, n, r, 0)?;
    let rhs = s.h(r)?.pow(2) * e(m, n, 1, 0)? - s.h(n)?.pow(2) * e(m, r, 1, 0)? + s.h(m)?.pow(2) * e(n, r, 1, 0)?;
    Ok(lhs == rhs)
}

/// Checks both Rule II.1 identities (c- and d-conclusion) for (m,n,r,c,d).
pub fn verify_rule_ii1_identity(p: [Half; 5], k: usize) -> Result<bool, RelationError> {
    distinct_nonneg(&p)?;
    let s = SymbolicSeqRing::new(k);
    Ok(rule_ii1(Ii1Form::C, p).holds(&s)? && rule_ii1(Ii1Form::D, p).holds(&s)?)
}

/// Checks the two variants used in the Somos derivation for (a,b,c,d,e).
pub fn verify_rule_ii1_swap_identity(p: [Half; 5], k: usize) -> Result<bool, RelationError> {
    distinct_nonneg(&p)?;
    let s = SymbolicSeqRing::new(k);
    Ok(rule_ii1(Ii1Form::CE, p).holds(&s)? && rule_ii1(Ii1Form::EC, p).holds(&s)?)
}

pub fn verify_rule_ii2_identity(p: [Half; 6], k: usize) -> Result<bool, RelationError> {
    distinct_nonneg(&p)?;
    rule_ii2(p).holds(&SymbolicSeqRing::new(k))
}

fn en(s: &SymbolicSeqRing, p: i64, q: i64, r: i64, t: i64) -> Result<RingElement, RelationError> {
    let h = |i| s.h(i);
    Ok(h(p + q + t)? * h(p - q)? * h(r + t)? * h(r)?
        + h(q + r + t)? * h(q - r)? * h(p + t)? * h(p)?
        + h(r + p + t)? * h(r - p)? * h(q + t)? * h(q)?)
}

fn inv_n(s: &SymbolicSeqRing, n: i64, t: i64) -> Result<RingElement, RelationError> {
    let h = |i| s.h(i);
    Ok(h(t)?.pow(2) * (h(n + 2 * t)? * h(n - t)?.pow(2) + h(n + t)?.pow(2) * h(n - 2 * t)?)
        + h(2 * t)?.pow(2) * h(n)?.pow(3))
}

fn inv_d(s: &SymbolicSeqRing, n: i64, t: i64) -> Result<RingElement, RelationError> {
    Ok(s.h(n + t)? * s.h(n)? * s.h(n - t)?)
}

/// Both sides of the net-axiom combination: the linear combination of EN
/// values, and `D(n,s)N(m,s) - N(n,s)D(m,s)`, which it equals.
pub fn en_combination_sides(m: i64, n: i64, t: i64, k: usize) -> Result<(RingElement, RingElement), RelationError> {
    let s = SymbolicSeqRing::new(k);
    let h = |i| s.h(i);
    let lhs = h(m)? * h(n)? * h(2 * t)?.pow(2) * en(&s, m, n, t, 0)?
        - h(t)?.pow(2)
            * (h(m - t)? * h(n - t)? * en(&s, m, n, t, t)?
                + h(m + t)? * h(n + t)? * en(&s, m - t, n - t, t, t)?
                - h(m - n)? * h(2 * t)? * en(&s, n + t, n, n - t, m - n)?);
    let rhs = inv_d(&s, n, t)? * inv_n(&s, m, t)? - inv_n(&s, n, t)? * inv_d(&s, m, t)?;
    Ok((lhs, rhs))
}

pub fn verify_en_combination(m: i64, n: i64, t: i64, k: usize) -> Result<bool, RelationError> {
    let (l, r) = en_combination_sides(m, n, t, k)?;
    Ok(l == r)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hs(v: &[i64]) -> Vec<Half> {
        v.iter().map(|&x| Half::int(x)).collect()
    }

    #[test]
    fn eq3_examples() {
        assert!(verify_eq3_identity(4, 3, 2, 7).unwrap());
        assert!(verify_eq3_identity(5, 3, 2, 8).unwrap());
        assert!(verify_eq3_identity(6, 4, 3, 10).unwrap());
        assert!(verify_eq3_identity(3, 3, 2, 7).is_err());
    }

    #[test]
    fn ii1_examples() {
        let p: [Half; 5] = hs(&[4, 3, 2, 1, 0]).try_into().unwrap();
        assert!(verify_rule_ii1_identity(p, 8).unwrap());
        let q: [Half; 5] = hs(&[5, 4, 2, 1, 3]).try_into().unwrap();
        assert!(verify_rule_ii1_swap_identity(q, 10).unwrap());
        let half = [Half(7), Half(5), Half(3), Half(1), Half(9)];
        assert!(verify_rule_ii1_identity(half, 10).unwrap());
    }

    #[test]
    fn ii2_examples() {
        let p: [Half; 6] = hs(&[5, 4, 3, 2, 1, 0]).try_into().unwrap();
        assert!(verify_rule_ii2_identity(p, 10).unwrap());
        let q: [Half; 6] = hs(&[6, 5, 4, 3, 2, 1]).try_into().unwrap();
        assert!(verify_rule_ii2_identity(q, 12).unwrap());
        let bad: [Half; 6] = hs(&[5, 4, 3, 3, 1, 0]).try_into().unwrap();
        assert!(matches!(verify_rule_ii2_identity(bad, 10), Err(RelationError::Precondition(_))));
    }

    #[test]
    fn en_combination_sign() {
        assert!(verify_en_combination(4, 3, 1, 9).unwrap());
        assert!(verify_en_combination(5, 3, 2, 12).unwrap());
        let (l, r) = en_combination_sides(3, 3, 1, 9).unwrap();
        assert!(l.is_zero() && r.is_zero());
        // The combination is the negative of N(n,s)D(m,s) - D(n,s)N(m,s).
        let (l, r) = en_combination_sides(6, 2, 1, 10).unwrap();
        assert!(!l.is_zero());
        assert_eq!(l, r);
    }
}
