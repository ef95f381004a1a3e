//! Standard elliptic divisibility sequences, built without division.
//!
//! The auxiliary sequence h~ has h~0 = 0, h~1 = h~2 = 1, h~3 = c, h~4 = d and
//!
//! ```text
//! h~(2n+1) = b^4 h~(n+2) h~(n)^3 - h~(n-1) h~(n+1)^3     (n even)
//! h~(2n+1) = h~(n+2) h~(n)^3 - b^4 h~(n-1) h~(n+1)^3     (n odd)
//! h~(2n)   = h~(n) (h~(n+2) h~(n-1)^2 - h~(n+1)^2 h~(n-2))
//! ```
//!
//! and EDS(b,c,d) multiplies the even terms by b.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use serde::Serialize;

use crate::ring::{Ring, RingElement};
use crate::sequences::{EllipticSeq, GenerationFailure, SequenceError, TermOracle};

pub struct PreNormEds {
    ring: Ring,
    b: RingElement,
    c: RingElement,
    d: RingElement,
    b4: RingElement,
    cache: Mutex<HashMap<i64, RingElement>>,
}

impl PreNormEds {
    pub fn new(b: RingElement, c: RingElement, d: RingElement) -> Result<PreNormEds, SequenceError> {
        let ring = b.ring().clone();
        if c.ring() != &ring || d.ring() != &ring {
            return Err(crate::ring::RingError::Mismatch(c.ring().to_string(), ring.to_string()).into());
        }
        let b4 = b.pow(4);
        Ok(PreNormEds { ring, b, c, d, b4, cache: Mutex::new(HashMap::new()) })
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn params(&self) -> (&RingElement, &RingElement, &RingElement) {
        (&self.b, &self.c, &self.d)
    }

    /// h~(n).
    pub fn tilde(&self, n: i64) -> RingElement {
        if n < 0 {
            return -self.tilde(-n);
        }
        match n {
            0 => return self.ring.zero(),
            1 | 2 => return self.ring.one(),
            3 => return self.c.clone(),
            4 => return self.d.clone(),
            _ => {}
        }
        if let Some(v) = self.cache.lock().expect("cache lock").get(&n) {
            return v.clone();
        }
        let t = |i| self.tilde(i);
        let k = n / 2;
        let v = if n % 2 == 1 {
            let x = t(k + 2) * t(k).pow(3);
            let y = t(k - 1) * t(k + 1).pow(3);
            if k % 2 == 0 {
                &self.b4 * &x - y
            } else {
                x - &self.b4 * &y
            }
        } else {
            t(k) * (t(k + 2) * t(k - 1).pow(2) - t(k + 1).pow(2) * t(k - 2))
        };
        self.cache.lock().expect("cache lock").entry(n).or_insert(v).clone()
    }

    /// Term of the standard sequence EDS(b,c,d).
    pub fn std_term(&self, n: i64) -> RingElement {
        let t = self.tilde(n);
        if n % 2 == 0 {
            &self.b * &t
        } else {
            t
        }
    }
}

/// The standard sequence EDS(b,c,d) over the ring of its parameters.
pub fn std_eds(b: RingElement, c: RingElement, d: RingElement) -> Result<EllipticSeq, SequenceError> {
    EllipticSeq::std_eds(b, c, d)
}

/// EDS(X2,X3,X4) over Z[X2,X3,X4], with memoized divisibility witnesses.
pub struct Universal {
    ring: Ring,
    pre: Arc<PreNormEds>,
    seq: EllipticSeq,
    witnesses: Mutex<HashMap<(i64, i64), RingElement>>,
}

/// Shared instance of the universal sequence.
pub fn universal() -> &'static Universal {
    static U: OnceLock<Universal> = OnceLock::new();
    U.get_or_init(|| {
        let ring = Ring::polynomial(&["X2", "X3", "X4"]).expect("valid ring");
        let pre = Arc::new(
            PreNormEds::new(ring.var_at(0), ring.var_at(1), ring.var_at(2)).expect("same ring"),
        );
        let seq = EllipticSeq::from_prenorm(pre.clone());
        Universal { ring, pre, seq, witnesses: Mutex::new(HashMap::new()) }
    })
}

/// `quotient * h(m) = h(n m)` in the universal ring.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DivisibilityWitness {
    pub m: i64,
    pub n: i64,
    pub quotient: RingElement,
}

#[derive(Serialize)]
struct WitnessJson {
    m: i64,
    n: i64,
    quotient: String,
}

impl Serialize for DivisibilityWitness {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        WitnessJson { m: self.m, n: self.n, quotient: self.quotient.to_string() }.serialize(s)
    }
}

impl DivisibilityWitness {
    /// Checks `quotient * h(m) = h(n m)` by multiplication.
    pub fn verify(&self) -> bool {
        let u = universal();
        &self.quotient * &u.h(self.m) == u.h(self.n * self.m)
    }

    /// The witness mapped into EDS(b,c,d) over another ring.
    pub fn specialize(&self, b: &RingElement, c: &RingElement, d: &RingElement) -> RingElement {
        let vals = [b.clone(), c.clone(), d.clone()];
        self.quotient.specialize(b.ring(), &vals).expect("three variables")
    }
}

impl Universal {
    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn seq(&self) -> &EllipticSeq {
        &self.seq
    }

    pub fn h(&self, n: i64) -> RingElement {
        self.pre.std_term(n)
    }

    pub fn tilde(&self, n: i64) -> RingElement {
        self.pre.tilde(n)
    }

    /// Image of h^U(n) under X2, X3, X4 -> b, c, d.
    pub fn specialize_term(&self, n: i64, b: &RingElement, c: &RingElement, d: &RingElement) -> RingElement {
        self.h(n).specialize(b.ring(), &[b.clone(), c.clone(), d.clone()]).expect("three variables")
    }

    /// q with q h(m) = h(n m), built by the recursion of the divisibility
    /// proof; only ring operations are used.
    pub fn divisibility_witness(&self, m: i64, n: i64) -> DivisibilityWitness {
        assert!(m != 0, "m must be nonzero");
        DivisibilityWitness { m, n, quotient: self.quotient(m.abs(), n) }
    }

    fn quotient(&self, m: i64, n: i64) -> RingElement {
        if n < 0 {
            return -self.quotient(m, -n);
        }
        match n {
            0 => return self.ring.zero(),
            1 => return self.ring.one(),
            _ => {}
        }
        if let Some(q) = self.witnesses.lock().expect("witness lock").get(&(m, n)) {
            return q.clone();
        }
        let t = |i| self.pre.tilde(i);
        let q = if n == 2 {
            // h(2m) = b h~(m) (h~(m+2) h~(m-1)^2 - h~(m+1)^2 h~(m-2))
            let inner = t(m + 2) * t(m - 1).pow(2) - t(m + 1).pow(2) * t(m - 2);
            if m % 2 == 0 {
                inner
            } else {
                self.ring.var_at(0) * inner
            }
        } else if n % 2 == 0 {
            self.quotient(m, n / 2) * self.quotient(n / 2 * m, 2)
        } else {
            // E((k+1)m, km, 1, 0) with h1 = 1, divided through by h(m).
            let k = n / 2;
            let a = self.h((k + 1) * m + 1) * self.h((k + 1) * m - 1);
            let b = self.h(k * m + 1) * self.h(k * m - 1);
            a * self.quotient(m, k).pow(2) - b * self.quotient(m, k + 1).pow(2)
        };
        self.witnesses.lock().expect("witness lock").insert((m, n), q.clone());
        q
    }

    /// h(6) / (h(2) h(3)) = h~5 - h~4^2.
    fn w6(&self) -> RingElement {
        self.tilde(5) - self.tilde(4).pow(2)
    }

    /// q with q h3 h2 = h(n+1) h(n) h(n-1), split by n mod 6.
    pub fn triple_product_witness(&self, n: i64) -> RingElement {
        assert!(n >= 2, "n must be at least 2");
        let q = |m, k| self.quotient(m, k);
        match n.rem_euclid(6) {
            0 => q(6, n / 6) * self.w6() * self.h(n + 1) * self.h(n - 1),
            1 => q(6, (n - 1) / 6) * self.w6() * self.h(n + 1) * self.h(n),
            5 => q(6, (n + 1) / 6) * self.w6() * self.h(n) * self.h(n - 1),
            2 => q(2, n / 2) * q(3, (n + 1) / 3) * self.h(n - 1),
            4 => q(2, n / 2) * q(3, (n - 1) / 3) * self.h(n + 1),
            _ => q(3, n / 3) * q(2, (n + 1) / 2) * self.h(n - 1),
        }
    }

    /// h(m+2)h(m-1)^2 + h(m+1)^2 h(m-2) + h2^2 h(m)^3 = (h~4 + h2^4) h(m+1)h(m)h(m-1)/h3,
    /// with the division supplied by the triple-product witness.
    pub fn swart_invariant_identity_check(&self, m: i64) -> bool {
        let h = |i| self.h(i);
        let lhs = h(m + 2) * h(m - 1).pow(2) + h(m + 1).pow(2) * h(m - 2) + h(2).pow(2) * h(m).pow(3);
        let b = self.ring.var_at(0);
        let rhs = (self.ring.var_at(2) + b.pow(4)) * b * self.triple_product_witness(m);
        lhs == rhs
    }
}

pub fn invariant_n(seq: &dyn TermOracle, n: i64, s: i64) -> Result<RingElement, GenerationFailure> {
    let h = |i| seq.term(i);
    Ok(h(s)?.pow(2) * (h(n + 2 * s)? * h(n - s)?.pow(2) + h(n + s)?.pow(2) * h(n - 2 * s)?)
        + h(2 * s)?.pow(2) * h(n)?.pow(3))
}

pub fn invariant_d(seq: &dyn TermOracle, n: i64, s: i64) -> Result<RingElement, GenerationFailure> {
    Ok(seq.term(n + s)? * seq.term(n)? * seq.term(n - s)?)
}

/// N(n,s) D(m,s) = D(n,s) N(m,s), the division-free form of the
/// translation invariance of N/D.
pub fn translation_invariant_cross_check(seq: &dyn TermOracle, m: i64, n: i64, s: i64) -> Result<bool, GenerationFailure> {
    let l = invariant_n(seq, n, s)? * invariant_d(seq, m, s)?;
    let r = invariant_d(seq, n, s)? * invariant_n(seq, m, s)?;
    Ok(l == r)
}
