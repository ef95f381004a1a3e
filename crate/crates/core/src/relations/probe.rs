//! Bounded search for a power of an element inside the ideal generated by a
//! set of relations in Z[h1..hK].
//!
//! Every relation is bihomogeneous: degree 4, and homogeneous for the weight
//! w(h_n) = n^2. A bihomogeneous component of f^e lies in the ideal exactly
//! when it is a combination of `monomial * g` with monomials of the
//! complementary bidegree, which is a finite linear system over Q.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use super::{symbolic_relation, RelationError, RelationId, SymbolicSeqRing};
use crate::ring::{Monomial, Poly, RingElement};

/// `sum cofactors[i] * E(relations[i]) = denominator * element^exponent`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MembershipCertificate {
    pub exponent: u32,
    pub denominator: BigInt,
    pub relations: Vec<RelationId>,
    pub cofactors: Vec<RingElement>,
}

impl MembershipCertificate {
    /// Expands the certificate and compares both sides.
    pub fn verify(&self, ring: &SymbolicSeqRing, element: &RingElement) -> Result<bool, RelationError> {
        let mut lhs = ring.poly_ring().zero();
        for (r, q) in self.relations.iter().zip(&self.cofactors) {
            lhs = lhs + q * &symbolic_relation(ring, r)?;
        }
        let rhs = ring.poly_ring().from_int(self.denominator.clone()) * element.pow(self.exponent);
        Ok(lhs == rhs)
    }
}

#[derive(Serialize)]
struct CertificateJson {
    exponent: u32,
    denominator: String,
    cofactors: Vec<(String, String)>,
}

impl Serialize for MembershipCertificate {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        CertificateJson {
            exponent: self.exponent,
            denominator: self.denominator.to_string(),
            cofactors: self
                .relations
                .iter()
                .zip(&self.cofactors)
                .filter(|(_, q)| !q.is_zero())
                .map(|(r, q)| (r.to_string(), q.to_string()))
                .collect(),
        }
        .serialize(s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum ProbeOutcome {
    Member(MembershipCertificate),
    /// No power up to `max_exponent` lies in the ideal over Q.
    NotFoundAtBound { max_exponent: u32 },
}

impl ProbeOutcome {
    pub fn exponent(&self) -> Option<u32> {
        match self {
            ProbeOutcome::Member(c) => Some(c.exponent),
            ProbeOutcome::NotFoundAtBound { .. } => None,
        }
    }
}

type SparseVec = BTreeMap<usize, BigRational>;

/// Incremental echelon basis that remembers how each basis vector was built
/// from the original columns.
#[derive(Default)]
struct Echelon {
    rows: HashMap<usize, (SparseVec, SparseVec)>,
}

fn axpy(dst: &mut SparseVec, alpha: &BigRational, src: &SparseVec) {
    for (k, v) in src {
        let e = dst.entry(*k).or_insert_with(BigRational::zero);
        *e -= alpha * v;
        if e.is_zero() {
            dst.remove(k);
        }
    }
}

impl Echelon {
    /// Reduces `v` (with its combination `c`) until its leading entry has no pivot.
    fn reduce(&self, v: &mut SparseVec, c: &mut SparseVec) {
        while let Some((&k, lead)) = v.iter().next_back() {
            let Some((bv, bc)) = self.rows.get(&k) else { return };
            let alpha = lead.clone();
            axpy(v, &alpha, bv);
            axpy(c, &alpha, bc);
        }
    }

    fn insert(&mut self, mut v: SparseVec, mut c: SparseVec) {
        self.reduce(&mut v, &mut c);
        if let Some((&k, lead)) = v.iter().next_back() {
            let inv = lead.recip();
            for x in v.values_mut().chain(c.values_mut()) {
                *x *= &inv;
            }
            self.rows.insert(k, (v, c));
        }
    }
}

fn monomials_of(nvars: usize, weights: &[i64], deg: u32, weight: i64) -> Vec<Monomial> {
    fn go(i: usize, exps: &mut Vec<u32>, deg: u32, weight: i64, w: &[i64], out: &mut Vec<Monomial>) {
        if i == w.len() {
            if deg == 0 && weight == 0 {
                out.push(Monomial::from_exponents(exps.clone()));
            }
            return;
        }
        let wmax = *w[i..].iter().max().expect("nonempty");
        let wmin = *w[i..].iter().min().expect("nonempty");
        if weight < deg as i64 * wmin || weight > deg as i64 * wmax {
            return;
        }
        for e in 0..=deg {
            let rest = weight - e as i64 * w[i];
            if rest < 0 {
                break;
            }
            exps[i] = e;
            go(i + 1, exps, deg - e, rest, w, out);
        }
        exps[i] = 0;
    }
    let mut out = Vec::new();
    go(0, &mut vec![0; nvars], deg, weight, weights, &mut out);
    out
}

/// Solves `component = sum q_i g_i` with q_i of the complementary bidegree.
/// Returns rational cofactor terms per generator.
fn solve_component(
    component: &Poly,
    gens: &[(usize, Poly, i64)],
    sq: &[i64],
) -> Option<Vec<(usize, Monomial, BigRational)>> {
    let (m0, _) = component.leading_term()?;
    let (deg, weight) = (m0.degree(), m0.weight(sq));
    if deg < 4 {
        return None;
    }
    let mut row_of: HashMap<Monomial, usize> = HashMap::new();
    let row = |m: Monomial, row_of: &mut HashMap<Monomial, usize>| {
        let n = row_of.len();
        *row_of.entry(m).or_insert(n)
    };
    let mut columns: Vec<(usize, Monomial)> = Vec::new();
    let mut echelon = Echelon::default();
    for (gi, g, wg) in gens {
        for mu in monomials_of(sq.len(), sq, deg - 4, weight - wg) {
            let mut v = SparseVec::new();
            for (m, c) in g.terms() {
                v.insert(row(m.mul(&mu), &mut row_of), BigRational::from_integer(c.clone()));
            }
            let mut c = SparseVec::new();
            c.insert(columns.len(), BigRational::one());
            columns.push((*gi, mu));
            echelon.insert(v, c);
        }
    }
    let mut t = SparseVec::new();
    for (m, c) in component.terms() {
        let r = match row_of.get(m) {
            Some(&r) => r,
            None => return None,
        };
        t.insert(r, BigRational::from_integer(c.clone()));
    }
    let mut combo = SparseVec::new();
    // t - sum alpha_b v_b = 0 gives t = sum alpha_b c_b; track it negated.
    echelon.reduce(&mut t, &mut combo);
    if !t.is_empty() {
        return None;
    }
    Some(
        combo
            .into_iter()
            .map(|(j, x)| {
                let (gi, mu) = columns[j].clone();
                (gi, mu, -x)
            })
            .collect(),
    )
}

/// Smallest e <= max_exponent with `element^e` in the Q-ideal spanned by the
/// relations, with an integral certificate.
pub fn nilpotency_probe(
    ring: &SymbolicSeqRing,
    element: &RingElement,
    relations: &[RelationId],
    max_exponent: u32,
) -> Result<ProbeOutcome, RelationError> {
    let k = ring.max_index();
    let pr = ring.poly_ring();
    let f = pr.embed(element)?;
    let sq = ring.weights(1, 0);
    let ones = vec![1i64; k];
    let mut gens = Vec::new();
    for (i, r) in relations.iter().enumerate() {
        let g = symbolic_relation(ring, r)?;
        let p = g.as_poly().expect("polynomial ring").clone();
        if !p.is_zero() {
            let w = p.homogeneous_weight(&sq).expect("relations are weighted homogeneous");
            gens.push((i, p, w));
        }
    }
    let zero_cert = |e| MembershipCertificate {
        exponent: e,
        denominator: BigInt::one(),
        relations: relations.to_vec(),
        cofactors: vec![pr.zero(); relations.len()],
    };
    if f.is_zero() {
        return Ok(ProbeOutcome::Member(zero_cert(1)));
    }
    let fp = f.as_poly().expect("polynomial ring").clone();
    for e in 1..=max_exponent {
        let power = fp.pow(e);
        let mut terms: Vec<(usize, Monomial, BigRational)> = Vec::new();
        let mut ok = true;
        for comp in power.homogeneous_components(&[&ones, &sq]) {
            match solve_component(&comp, &gens, &sq) {
                Some(t) => terms.extend(t),
                None => {
                    ok = false;
                    break;
                }
            }
        }
        if !ok {
            continue;
        }
        let den = terms.iter().fold(BigInt::one(), |acc, (_, _, x)| acc.lcm(x.denom()));
        let mut cof: Vec<BTreeMap<Monomial, BigInt>> = vec![BTreeMap::new(); relations.len()];
        for (gi, mu, x) in terms {
            let c = (x * BigRational::from_integer(den.clone())).to_integer();
            let slot = cof[gi].entry(mu).or_insert_with(BigInt::zero);
            *slot += c;
        }
        let mut cert = zero_cert(e);
        cert.denominator = den.abs();
        cert.cofactors = cof
            .into_iter()
            .map(|m| pr.from_poly(Poly::from_terms(k, m.into_iter().filter(|(_, c)| !c.is_zero()))))
            .collect();
        debug_assert!(cert.verify(ring, &f).unwrap_or(false));
        return Ok(ProbeOutcome::Member(cert));
    }
    Ok(ProbeOutcome::NotFoundAtBound { max_exponent })
}
