//! Lazily evaluated, memoized sequences indexed by the integers.
//!
//! Every sequence is presented with the odd extension h0 = 0 and
//! h(-n) = -h(n) built in.

mod determinism;
mod window;

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use serde::Serialize;
use thiserror::Error;

use crate::ring::{Ring, RingElement, RingError};
use crate::std_eds::PreNormEds;

pub use determinism::{determinism_check_even_odd, determinism_check_somos, DeterminismError};
pub use window::{check_window, family_relations, Family};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum FailureReason {
    ZeroDivisorDenominator,
    DivisionFailure,
    PreconditionViolated,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Error, Serialize)]
#[error("term {index} cannot be generated: {reason:?}")]
pub struct GenerationFailure {
    pub index: i64,
    pub reason: FailureReason,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SequenceError {
    #[error(transparent)]
    Ring(#[from] RingError),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

/// Anything that can produce terms: generated sequences and the symbolic
/// ring of indeterminates alike.
pub trait TermOracle: Send + Sync {
    fn ring(&self) -> &Ring;
    fn term(&self, n: i64) -> Result<RingElement, GenerationFailure>;
}

type TermFn = dyn Fn(i64) -> Result<RingElement, GenerationFailure> + Send + Sync;

#[derive(Clone)]
enum Generator {
    EvenOdd([RingElement; 4]),
    Somos4([RingElement; 4]),
    StdEds(Arc<PreNormEds>),
    Es { r: u64, s: u64, a: RingElement, b: RingElement, d: RingElement },
    Dilation(EllipticSeq, u64),
    Contraction(EllipticSeq, u64),
    Scaled(EllipticSeq, RingElement),
    Explicit(String, Arc<TermFn>),
    Table(Vec<RingElement>),
}

struct Inner {
    ring: Ring,
    generator: Generator,
    cache: Mutex<HashMap<i64, Result<RingElement, GenerationFailure>>>,
}

/// A sequence with a named generator and a shared memo table. Clones share
/// the table.
#[derive(Clone)]
pub struct EllipticSeq(Arc<Inner>);

type Lazy = Result<RingElement, GenerationFailure>;

fn same_ring(elems: &[&RingElement]) -> Result<Ring, SequenceError> {
    let ring = elems[0].ring().clone();
    for e in elems {
        if e.ring() != &ring {
            return Err(RingError::Mismatch(ring.to_string(), e.ring().to_string()).into());
        }
    }
    Ok(ring)
}

/// Product that is zero as soon as one factor is zero, even if another
/// factor could not be generated.
fn lazy_mul(factors: &[&Lazy]) -> Lazy {
    if let Some(Ok(z)) = factors.iter().find(|f| matches!(f, Ok(x) if x.is_zero())) {
        return Ok(z.clone());
    }
    let mut acc: Option<RingElement> = None;
    let mut err: Option<GenerationFailure> = None;
    for f in factors {
        match f {
            Ok(x) => acc = Some(match acc { Some(a) => &a * x, None => x.clone() }),
            Err(e) => {
                if err.map_or(true, |old| e.index.abs() < old.index.abs()) {
                    err = Some(*e);
                }
            }
        }
    }
    match err {
        Some(e) => Err(e),
        None => Ok(acc.expect("non-empty product")),
    }
}

fn lazy_sub(a: Lazy, b: Lazy) -> Lazy {
    match (a, b) {
        (Ok(x), Ok(y)) => Ok(&x - &y),
        (Err(e), Ok(_)) | (Ok(_), Err(e)) => Err(e),
        (Err(e), Err(f)) => Err(if e.index.abs() <= f.index.abs() { e } else { f }),
    }
}

fn divide(num: Lazy, den: &RingElement, index: i64) -> Lazy {
    let num = num?;
    if den.is_zero_divisor() {
        return Err(GenerationFailure { index, reason: FailureReason::ZeroDivisorDenominator });
    }
    num.exact_div(den).map_err(|_| GenerationFailure { index, reason: FailureReason::DivisionFailure })
}

impl EllipticSeq {
    fn from_generator(ring: Ring, generator: Generator) -> EllipticSeq {
        EllipticSeq(Arc::new(Inner { ring, generator, cache: Mutex::new(HashMap::new()) }))
    }

    /// Terms from the even-odd recurrence
    /// h(2n+1)h1^3 = h(n+2)h(n)^3 - h(n-1)h(n+1)^3 and
    /// h(2n)h2h1^2 = h(n)(h(n+2)h(n-1)^2 - h(n+1)^2h(n-2)).
    pub fn even_odd(h: [RingElement; 4]) -> Result<EllipticSeq, SequenceError> {
        let ring = same_ring(&[&h[0], &h[1], &h[2], &h[3]])?;
        Ok(EllipticSeq::from_generator(ring, Generator::EvenOdd(h)))
    }

    /// Terms from h(n+2)h(n-2)h1^2 = h2^2 h(n+1)h(n-1) - h3 h1 h(n)^2.
    pub fn somos4(h: [RingElement; 4]) -> Result<EllipticSeq, SequenceError> {
        let ring = same_ring(&[&h[0], &h[1], &h[2], &h[3]])?;
        Ok(EllipticSeq::from_generator(ring, Generator::Somos4(h)))
    }

    /// The standard sequence EDS(b,c,d): h1 = 1, h2 = b, h3 = c, h4 = b*d.
    pub fn std_eds(b: RingElement, c: RingElement, d: RingElement) -> Result<EllipticSeq, SequenceError> {
        let ring = same_ring(&[&b, &c, &d])?;
        let pre = PreNormEds::new(b, c, d)?;
        Ok(EllipticSeq::from_generator(ring, Generator::StdEds(Arc::new(pre))))
    }

    pub(crate) fn from_prenorm(pre: Arc<PreNormEds>) -> EllipticSeq {
        EllipticSeq::from_generator(pre.ring().clone(), Generator::StdEds(pre))
    }

    /// A * ES_{r,s}(B,D): nonzero only at indices congruent to +-r mod r+s.
    pub fn es(r: u64, s: u64, a: RingElement, b: RingElement, d: RingElement) -> Result<EllipticSeq, SequenceError> {
        if r == 0 || r >= s || (r + s) % 2 == 0 {
            return Err(SequenceError::InvalidParameter(format!(
                "ES needs 0 < r < s of opposite parity, got r = {r}, s = {s}"
            )));
        }
        let ring = same_ring(&[&a, &b, &d])?;
        Ok(EllipticSeq::from_generator(ring, Generator::Es { r, s, a, b, d }))
    }

    pub fn explicit<F>(ring: &Ring, name: &str, f: F) -> EllipticSeq
    where
        F: Fn(i64) -> Result<RingElement, GenerationFailure> + Send + Sync + 'static,
    {
        EllipticSeq::from_generator(ring.clone(), Generator::Explicit(name.to_string(), Arc::new(f)))
    }

    /// A finite prefix h1..hN; later terms fail with `PreconditionViolated`.
    pub fn from_terms(ring: &Ring, terms: Vec<RingElement>) -> Result<EllipticSeq, SequenceError> {
        for t in &terms {
            if t.ring() != ring {
                return Err(RingError::Mismatch(ring.to_string(), t.ring().to_string()).into());
            }
        }
        Ok(EllipticSeq::from_generator(ring.clone(), Generator::Table(terms)))
    }

    /// The dilation h^[1/l]: h(n/l) when l divides n, else 0. Only odd `l`
    /// preserves ellipticity in general.
    pub fn dilate(&self, l: u64) -> Result<EllipticSeq, SequenceError> {
        if l % 2 == 0 {
            return Err(SequenceError::InvalidParameter(format!("dilation factor {l} must be odd")));
        }
        Ok(self.dilate_any(l))
    }

    /// Dilation without the parity check, used for the 2-power dilations
    /// that occur in the classification.
    pub fn dilate_any(&self, l: u64) -> EllipticSeq {
        assert!(l > 0, "dilation factor must be positive");
        if l == 1 {
            return self.clone();
        }
        EllipticSeq::from_generator(self.ring().clone(), Generator::Dilation(self.clone(), l))
    }

    /// The contraction h^[l]: n -> h(n l).
    pub fn contract(&self, l: u64) -> Result<EllipticSeq, SequenceError> {
        if l == 0 {
            return Err(SequenceError::InvalidParameter("contraction factor must be positive".into()));
        }
        if l == 1 {
            return Ok(self.clone());
        }
        Ok(EllipticSeq::from_generator(self.ring().clone(), Generator::Contraction(self.clone(), l)))
    }

    pub fn scale(&self, a: &RingElement) -> Result<EllipticSeq, SequenceError> {
        same_ring(&[a, &self.ring().zero()])?;
        Ok(EllipticSeq::from_generator(self.ring().clone(), Generator::Scaled(self.clone(), a.clone())))
    }

    pub fn ring(&self) -> &Ring {
        &self.0.ring
    }

    /// Whether the generator defines negative indices itself rather than
    /// through the odd extension.
    pub fn native_negative(&self) -> bool {
        matches!(self.0.generator, Generator::StdEds(_) | Generator::Es { .. })
    }

    /// Short description of the generator, e.g. `somos4(1,1,-1,1)`.
    pub fn describe(&self) -> String {
        let list = |v: &[&RingElement]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
        match &self.0.generator {
            Generator::EvenOdd(h) => format!("even_odd({})", list(&[&h[0], &h[1], &h[2], &h[3]])),
            Generator::Somos4(h) => format!("somos4({})", list(&[&h[0], &h[1], &h[2], &h[3]])),
            Generator::StdEds(p) => {
                let (b, c, d) = p.params();
                format!("std({})", list(&[b, c, d]))
            }
            Generator::Es { r, s, a, b, d } => format!("es({r},{s},{})", list(&[a, b, d])),
            Generator::Dilation(s, l) => format!("dilate({},{l})", s.describe()),
            Generator::Contraction(s, l) => format!("contract({},{l})", s.describe()),
            Generator::Scaled(s, a) => format!("scale({},{a})", s.describe()),
            Generator::Explicit(name, _) => name.clone(),
            Generator::Table(t) => format!("terms({})", t.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")),
        }
    }

    /// Terms h1..hN, stopping at the first failure.
    pub fn prefix(&self, n: i64) -> Result<Vec<RingElement>, GenerationFailure> {
        (1..=n).map(|i| self.term(i)).collect()
    }

    fn cached(&self, n: i64) -> Option<Lazy> {
        self.0.cache.lock().expect("cache lock").get(&n).cloned()
    }

    fn store(&self, n: i64, v: Lazy) -> Lazy {
        self.0.cache.lock().expect("cache lock").entry(n).or_insert(v).clone()
    }

    fn compute(&self, n: i64) -> Lazy {
        debug_assert!(n > 0);
        match &self.0.generator {
            Generator::EvenOdd(h) => self.even_odd_term(h, n),
            Generator::Somos4(h) => self.somos_term(h, n),
            Generator::StdEds(p) => Ok(p.std_term(n)),
            Generator::Es { r, s, a, b, d } => Ok(es_term(*r, *s, a, b, d, n)),
            Generator::Dilation(base, l) => {
                let l = *l as i64;
                if n % l == 0 {
                    base.term(n / l)
                } else {
                    Ok(self.ring().zero())
                }
            }
            Generator::Contraction(base, l) => base.term(n * *l as i64),
            Generator::Scaled(base, a) => lazy_mul(&[&Ok(a.clone()), &base.term(n)]),
            Generator::Explicit(_, f) => f(n),
            Generator::Table(t) => t
                .get(n as usize - 1)
                .cloned()
                .ok_or(GenerationFailure { index: n, reason: FailureReason::PreconditionViolated }),
        }
    }

    fn even_odd_term(&self, h: &[RingElement; 4], n: i64) -> Lazy {
        if n <= 4 {
            return Ok(h[n as usize - 1].clone());
        }
        let t = |i: i64| self.term(i);
        let h1sq = &h[0] * &h[0];
        let k = n / 2;
        if n % 2 == 1 {
            let num = lazy_sub(
                lazy_mul(&[&t(k + 2), &t(k), &t(k), &t(k)]),
                lazy_mul(&[&t(k - 1), &t(k + 1), &t(k + 1), &t(k + 1)]),
            );
            divide(num, &(&h1sq * &h[0]), n)
        } else {
            let inner = lazy_sub(
                lazy_mul(&[&t(k + 2), &t(k - 1), &t(k - 1)]),
                lazy_mul(&[&t(k + 1), &t(k + 1), &t(k - 2)]),
            );
            let num = lazy_mul(&[&t(k), &inner]);
            divide(num, &(&h[1] * &h1sq), n)
        }
    }

    fn somos_term(&self, h: &[RingElement; 4], n: i64) -> Lazy {
        if n <= 4 {
            return Ok(h[n as usize - 1].clone());
        }
        // Fill from the bottom so recursion depth stays constant.
        let mut last = Ok(self.ring().zero());
        for k in 5..=n {
            if let Some(v) = self.cached(k) {
                last = v;
                continue;
            }
            let t = |i: i64| self.term(i);
            let h2sq = Ok(&h[1] * &h[1]);
            let h3h1 = Ok(&h[2] * &h[0]);
            let num = lazy_sub(
                lazy_mul(&[&h2sq, &t(k - 1), &t(k - 3)]),
                lazy_mul(&[&h3h1, &t(k - 2), &t(k - 2)]),
            );
            let v = match t(k - 4) {
                Ok(den) => divide(num, &(&den * &h[0] * &h[0]), k),
                Err(e) => Err(e),
            };
            last = self.store(k, v);
        }
        last
    }
}

fn es_term(r: u64, s: u64, a: &RingElement, b: &RingElement, d: &RingElement, m: i64) -> RingElement {
    let (r, q) = (r as i64, (r + s) as i64);
    let rem = m.rem_euclid(q);
    if rem == r {
        let k = ((m - r) / q) as u32;
        a * &b.pow(k * k.saturating_sub(1) / 2) * d.pow(k * (k + 1) / 2)
    } else if rem == q - r {
        let k = ((m + r) / q) as u32;
        -(a * &b.pow(k * (k + 1) / 2) * d.pow(k * k.saturating_sub(1) / 2))
    } else {
        a.ring().zero()
    }
}

impl TermOracle for EllipticSeq {
    fn ring(&self) -> &Ring {
        &self.0.ring
    }

    fn term(&self, n: i64) -> Result<RingElement, GenerationFailure> {
        if n == 0 {
            return Ok(self.ring().zero());
        }
        if n < 0 {
            return self.term(-n).map(|x| -x);
        }
        if let Some(v) = self.cached(n) {
            return v;
        }
        let v = self.compute(n);
        self.store(n, v)
    }
}

impl fmt::Debug for EllipticSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "EllipticSeq({} over {})", self.describe(), self.ring())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(n: i64) -> RingElement {
        Ring::integers().from_int(n)
    }

    fn zs(v: [i64; 4]) -> [RingElement; 4] {
        v.map(z)
    }

    fn ints(seq: &EllipticSeq, n: i64) -> Vec<i64> {
        seq.prefix(n)
            .unwrap()
            .iter()
            .map(|x| i64::try_from(x.as_integer().unwrap().clone()).unwrap())
            .collect()
    }

    #[test]
    fn even_odd_identity() {
        let s = EllipticSeq::even_odd(zs([1, 2, 3, 4])).unwrap();
        assert_eq!(ints(&s, 50), (1..=50).collect::<Vec<_>>());
        assert_eq!(s.term(-7).unwrap(), z(-7));
        assert_eq!(s.term(0).unwrap(), z(0));
    }

    #[test]
    fn somos_frozen_oracle() {
        // Integral EDS with initials 1,1,-1,1 (OEIS A006769 up to sign conventions).
        let want = [1, 1, -1, 1, 2, -1, -3, -5, 7, -4, -23, 29, 59, 129, -314, -65, 1529];
        let s = EllipticSeq::somos4(zs([1, 1, -1, 1])).unwrap();
        assert_eq!(ints(&s, 17), want);
        let e = EllipticSeq::even_odd(zs([1, 1, -1, 1])).unwrap();
        assert_eq!(ints(&e, 17), want);
        assert_eq!(s.term(5).unwrap(), z(2));
    }

    #[test]
    fn somos_all_ones_hits_zero() {
        let q = Ring::rationals();
        let s = EllipticSeq::somos4([1, 1, 1, 1].map(|v| q.from_int(v))).unwrap();
        let got: Vec<_> = (1..=8).map(|n| s.term(n).unwrap().to_string()).collect();
        assert_eq!(got, ["1", "1", "1", "1", "0", "-1", "-1", "-1"]);
        assert_eq!(s.term(9).unwrap_err(), GenerationFailure { index: 9, reason: FailureReason::ZeroDivisorDenominator });
        assert_eq!(s.term(12).unwrap_err().index, 9);
    }

    #[test]
    fn somos_failure_index() {
        let s = EllipticSeq::somos4(zs([1, 1, 0, 1])).unwrap();
        assert_eq!(s.term(5).unwrap(), z(1));
        assert_eq!(s.term(6).unwrap(), z(0));
        assert_eq!(s.term(7).unwrap_err(), GenerationFailure { index: 7, reason: FailureReason::ZeroDivisorDenominator });
        let t = EllipticSeq::somos4(zs([1, 2, 3, 4])).unwrap();
        assert_eq!(ints(&t, 30), (1..=30).collect::<Vec<_>>());
    }

    #[test]
    fn even_odd_case_101() {
        let k = Ring::parse_spec("Frac:Poly:Z[C]").unwrap();
        let c = k.var("C").unwrap();
        let s = EllipticSeq::even_odd([k.one(), k.zero(), c.clone(), k.zero()]).unwrap();
        assert_eq!(s.term(5).unwrap(), -c.pow(3));
        assert_eq!(s.term(7).unwrap(), -c.pow(6));
        assert_eq!(s.term(9).unwrap(), c.pow(10));
        assert_eq!(s.term(11).unwrap(), c.pow(15));
        assert_eq!(s.term(6).unwrap_err().reason, FailureReason::ZeroDivisorDenominator);
    }

    #[test]
    fn division_failure_over_integers() {
        let s = EllipticSeq::even_odd(zs([2, 1, 1, 1])).unwrap();
        // h5 = (h4 h2^3 - h1 h3^3) / h1^3 = (1 - 2)/8
        assert_eq!(s.term(5).unwrap_err(), GenerationFailure { index: 5, reason: FailureReason::DivisionFailure });
    }

    #[test]
    fn es_closed_form() {
        let k = Ring::parse_spec("Frac:Poly:Z[A,B,D]").unwrap();
        let (a, b, d) = (k.var("A").unwrap(), k.var("B").unwrap(), k.var("D").unwrap());
        let s = EllipticSeq::es(1, 2, a.clone(), b.clone(), d.clone()).unwrap();
        let want = [
            a.clone(),
            -(&a * &b),
            k.zero(),
            &a * &d,
            -(&a * &b.pow(3) * &d),
            k.zero(),
            &a * &b * d.pow(3),
        ];
        assert_eq!(s.prefix(7).unwrap(), want);
        let t = EllipticSeq::es(1, 4, k.one(), b.clone(), d.clone()).unwrap();
        assert_eq!(t.term(4).unwrap(), -b.clone());
        assert_eq!(t.term(6).unwrap(), d.clone());
        assert!(t.term(0).unwrap().is_zero());
        let single = EllipticSeq::es(2, 5, a.clone(), k.zero(), k.zero()).unwrap();
        let nz: Vec<i64> = (1..=40).filter(|&n| !single.term(n).unwrap().is_zero()).collect();
        assert_eq!(nz, vec![2]);
        assert!(EllipticSeq::es(2, 4, a.clone(), b, d).is_err());
    }

    #[test]
    fn dilation_and_contraction() {
        let id = EllipticSeq::explicit(&Ring::integers(), "identity", |n| Ok(Ring::integers().from_int(n)));
        let d3 = id.dilate(3).unwrap();
        assert_eq!(d3.term(6).unwrap(), z(2));
        assert_eq!(d3.term(5).unwrap(), z(0));
        assert!(id.dilate(2).is_err());
        let c2 = id.contract(2).unwrap();
        assert_eq!(ints(&c2, 5), vec![2, 4, 6, 8, 10]);
        let back = d3.contract(3).unwrap();
        assert_eq!(ints(&back, 20), ints(&id, 20));
        assert_eq!(ints(&id.dilate(1).unwrap(), 5), ints(&id, 5));
    }
}
