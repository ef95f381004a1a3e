//! Sparse multivariate polynomials over the integers.
//!
//! Terms are kept in a map ordered by graded lexicographic order on the
//! exponent vectors, so the leading term is always the last entry.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// Exponent vector of a monomial. Ordered by total degree, then
/// lexicographically with the first variable most significant.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn one(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Monomial(e)
    }

    pub fn from_exponents(exps: Vec<u32>) -> Self {
        Monomial(exps)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// Quotient `self / other` if `other` divides `self`.
    pub fn div(&self, other: &Monomial) -> Option<Monomial> {
        let mut out = Vec::with_capacity(self.0.len());
        for (a, b) in self.0.iter().zip(&other.0) {
            out.push(a.checked_sub(*b)?);
        }
        Some(Monomial(out))
    }

    /// Sum of `weights[i] * exponent[i]`.
    pub fn weight(&self, weights: &[i64]) -> i64 {
        self.0.iter().zip(weights).map(|(&e, &w)| e as i64 * w).sum()
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A polynomial with integer coefficients in a fixed number of variables.
/// Zero coefficients are never stored.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Poly {
    nvars: usize,
    terms: BTreeMap<Monomial, BigInt>,
}

fn add_term(map: &mut BTreeMap<Monomial, BigInt>, m: Monomial, c: BigInt) {
    if c.is_zero() {
        return;
    }
    match map.entry(m) {
        std::collections::btree_map::Entry::Occupied(mut e) => {
            *e.get_mut() += c;
            if e.get().is_zero() {
                e.remove();
            }
        }
        std::collections::btree_map::Entry::Vacant(e) => {
            e.insert(c);
        }
    }
}

impl Poly {
    pub fn zero(nvars: usize) -> Self {
        Poly { nvars, terms: BTreeMap::new() }
    }

    pub fn one(nvars: usize) -> Self {
        Poly::constant(nvars, BigInt::one())
    }

    pub fn constant(nvars: usize, c: BigInt) -> Self {
        Poly::monomial(nvars, Monomial::one(nvars), c)
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        Poly::monomial(nvars, Monomial::var(nvars, i), BigInt::one())
    }

    pub fn monomial(nvars: usize, m: Monomial, c: BigInt) -> Self {
        assert_eq!(m.0.len(), nvars, "monomial arity mismatch");
        let mut terms = BTreeMap::new();
        add_term(&mut terms, m, c);
        Poly { nvars, terms }
    }

    pub fn from_terms<I: IntoIterator<Item = (Monomial, BigInt)>>(nvars: usize, it: I) -> Self {
        let mut terms = BTreeMap::new();
        for (m, c) in it {
            assert_eq!(m.0.len(), nvars, "monomial arity mismatch");
            add_term(&mut terms, m, c);
        }
        Poly { nvars, terms }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.as_constant().map_or(false, |c| c.is_one())
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in descending monomial order.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigInt)> {
        self.terms.iter().rev()
    }

    pub fn leading_term(&self) -> Option<(&Monomial, &BigInt)> {
        self.terms.iter().next_back()
    }

    pub fn coefficient(&self, m: &Monomial) -> BigInt {
        self.terms.get(m).cloned().unwrap_or_default()
    }

    pub fn as_constant(&self) -> Option<BigInt> {
        match self.terms.len() {
            0 => Some(BigInt::zero()),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                m.is_one().then(|| c.clone())
            }
            _ => None,
        }
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.leading_term().map(|(m, _)| m.degree())
    }

    pub fn neg(&self) -> Poly {
        Poly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        assert_eq!(self.nvars, other.nvars);
        let mut terms = self.terms.clone();
        for (m, c) in &other.terms {
            add_term(&mut terms, m.clone(), c.clone());
        }
        Poly { nvars: self.nvars, terms }
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        assert_eq!(self.nvars, other.nvars);
        let mut terms = self.terms.clone();
        for (m, c) in &other.terms {
            add_term(&mut terms, m.clone(), -c);
        }
        Poly { nvars: self.nvars, terms }
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        assert_eq!(self.nvars, other.nvars);
        if self.is_zero() || other.is_zero() {
            return Poly::zero(self.nvars);
        }
        let mut acc: HashMap<Monomial, BigInt> = HashMap::new();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                *acc.entry(m1.mul(m2)).or_default() += c1 * c2;
            }
        }
        Poly {
            nvars: self.nvars,
            terms: acc.into_iter().filter(|(_, c)| !c.is_zero()).collect(),
        }
    }

    pub fn scale(&self, k: &BigInt) -> Poly {
        if k.is_zero() {
            return Poly::zero(self.nvars);
        }
        Poly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c * k)).collect(),
        }
    }

    pub fn mul_term(&self, m: &Monomial, k: &BigInt) -> Poly {
        if k.is_zero() {
            return Poly::zero(self.nvars);
        }
        Poly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(t, c)| (t.mul(m), c * k)).collect(),
        }
    }

    pub fn pow(&self, mut e: u32) -> Poly {
        let mut base = self.clone();
        let mut acc = Poly::one(self.nvars);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Exact quotient by long division, or `None` if `d` does not divide `self`.
    pub fn exact_div(&self, d: &Poly) -> Option<Poly> {
        assert_eq!(self.nvars, d.nvars);
        let (lm, lc) = d.leading_term()?;
        let mut rem = self.terms.clone();
        let mut quot = BTreeMap::new();
        while let Some((m, c)) = rem.iter().next_back() {
            let qm = m.div(lm)?;
            let (qc, r) = c.div_rem(lc);
            if !r.is_zero() {
                return None;
            }
            for (dm, dc) in &d.terms {
                add_term(&mut rem, dm.mul(&qm), -(dc * &qc));
            }
            quot.insert(qm, qc);
        }
        Some(Poly { nvars: self.nvars, terms: quot })
    }

    /// Gcd of the coefficients (non-negative).
    pub fn content(&self) -> BigInt {
        self.terms.values().fold(BigInt::zero(), |g, c| g.gcd(c))
    }

    /// Negate if the leading coefficient is negative.
    pub fn normalize_sign(self) -> Poly {
        match self.leading_term() {
            Some((_, c)) if c.is_negative() => self.neg(),
            _ => self,
        }
    }

    pub fn degree_in(&self, v: usize) -> u32 {
        self.terms.keys().map(|m| m.0[v]).max().unwrap_or(0)
    }

    /// Coefficient of `x_v^d`, as a polynomial not involving `x_v`.
    pub fn coeff_in(&self, v: usize, d: u32) -> Poly {
        let terms = self
            .terms
            .iter()
            .filter(|(m, _)| m.0[v] == d)
            .map(|(m, c)| {
                let mut e = m.0.clone();
                e[v] = 0;
                (Monomial(e), c.clone())
            })
            .collect();
        Poly { nvars: self.nvars, terms }
    }

    fn first_var(&self) -> Option<usize> {
        (0..self.nvars).find(|&v| self.terms.keys().any(|m| m.0[v] > 0))
    }

    fn content_in(&self, v: usize) -> Poly {
        let mut g = Poly::zero(self.nvars);
        for d in 0..=self.degree_in(v) {
            let c = self.coeff_in(v, d);
            if !c.is_zero() {
                g = Poly::gcd(&g, &c);
                if g.is_one() {
                    break;
                }
            }
        }
        g
    }

    fn prem(&self, q: &Poly, v: usize) -> Poly {
        let dq = q.degree_in(v);
        let lq = q.coeff_in(v, dq);
        let mut r = self.clone();
        while !r.is_zero() && r.degree_in(v) >= dq {
            let dr = r.degree_in(v);
            let lr = r.coeff_in(v, dr);
            let mut shift = vec![0; self.nvars];
            shift[v] = dr - dq;
            let t = lr.mul(q).mul_term(&Monomial(shift), &BigInt::one());
            r = r.mul(&lq).sub(&t);
        }
        r
    }

    /// Greatest common divisor, normalized to a positive leading coefficient.
    /// Recursive primitive remainder sequences, one variable at a time.
    pub fn gcd(a: &Poly, b: &Poly) -> Poly {
        if a.is_zero() {
            return b.clone().normalize_sign();
        }
        if b.is_zero() {
            return a.clone().normalize_sign();
        }
        let v = match (a.first_var(), b.first_var()) {
            (None, None) => {
                let g = a.as_constant().unwrap().gcd(&b.as_constant().unwrap());
                return Poly::constant(a.nvars, g);
            }
            (Some(x), Some(y)) => x.min(y),
            (Some(x), None) | (None, Some(x)) => x,
        };
        let ca = a.content_in(v);
        let cb = b.content_in(v);
        let g = Poly::gcd(&ca, &cb);
        let mut p = a.exact_div(&ca).expect("content divides");
        let mut q = b.exact_div(&cb).expect("content divides");
        if p.degree_in(v) < q.degree_in(v) {
            std::mem::swap(&mut p, &mut q);
        }
        while !q.is_zero() && q.degree_in(v) > 0 {
            let r = p.prem(&q, v);
            p = q;
            q = if r.is_zero() {
                r
            } else {
                let c = r.content_in(v);
                r.exact_div(&c).expect("content divides")
            };
        }
        let h = if q.is_zero() {
            let c = p.content_in(v);
            p.exact_div(&c).expect("content divides")
        } else {
            Poly::one(a.nvars)
        };
        g.mul(&h).normalize_sign()
    }

    /// Common weight of all terms under the given variable weights, if any.
    /// The zero polynomial is homogeneous of every weight and yields `Some(0)`.
    pub fn homogeneous_weight(&self, weights: &[i64]) -> Option<i64> {
        let mut it = self.terms.keys().map(|m| m.weight(weights));
        let first = match it.next() {
            Some(w) => w,
            None => return Some(0),
        };
        it.all(|w| w == first).then_some(first)
    }

    /// Splits into components that are homogeneous for every weight vector given.
    pub fn homogeneous_components(&self, weights: &[&[i64]]) -> Vec<Poly> {
        let mut parts: BTreeMap<Vec<i64>, Poly> = BTreeMap::new();
        for (m, c) in &self.terms {
            let key: Vec<i64> = weights.iter().map(|w| m.weight(w)).collect();
            let part = parts.entry(key).or_insert_with(|| Poly::zero(self.nvars));
            part.terms.insert(m.clone(), c.clone());
        }
        parts.into_values().collect()
    }

    /// Formats with the given variable names, e.g. `X2^4*X4 - X3^3`.
    pub fn display<'a>(&'a self, names: &'a [String]) -> PolyDisplay<'a> {
        PolyDisplay { poly: self, names }
    }
}

pub struct PolyDisplay<'a> {
    poly: &'a Poly,
    names: &'a [String],
}

impl fmt::Display for PolyDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.poly.is_zero() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.poly.terms().enumerate() {
            let neg = c.is_negative();
            match (i, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let abs = c.abs();
            let mut factors: Vec<String> = Vec::new();
            for (v, &e) in m.0.iter().enumerate() {
                match e {
                    0 => {}
                    1 => factors.push(self.names[v].clone()),
                    _ => factors.push(format!("{}^{}", self.names[v], e)),
                }
            }
            if factors.is_empty() {
                write!(f, "{}", abs)?;
            } else if abs.is_one() {
                write!(f, "{}", factors.join("*"))?;
            } else {
                write!(f, "{}*{}", abs, factors.join("*"))?;
            }
        }
        Ok(())
    }
}
