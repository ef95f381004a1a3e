//! Exact commutative rings and their elements.
//!
//! A [`Ring`] is a cheap, shareable handle describing one concrete ring;
//! a [`RingElement`] carries its ring so mixed-ring arithmetic is caught.

mod parse;
pub mod poly;
mod prime;

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

pub use poly::{Monomial, Poly};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RingError {
    #[error("ring mismatch: {0} vs {1}")]
    Mismatch(String, String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("{0} is not divisible by {1}")]
    DivisionFailure(String, String),
    #[error("invalid ring: {0}")]
    InvalidRing(String),
    #[error("cannot parse {input:?}: {reason}")]
    Parse { input: String, reason: String },
    #[error("no value given for variable {0}")]
    MissingVariable(String),
}

#[derive(Debug, PartialEq, Eq, Hash)]
pub enum RingKind {
    Integers,
    Rationals,
    IntegersModN(BigInt),
    PrimeField(BigInt),
    Poly(Vec<String>),
    Fraction(Ring),
}

/// Handle to a ring. Clones share the description.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Ring(Arc<RingKind>);

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub(crate) enum Value {
    Int(BigInt),
    Rat(BigRational),
    Poly(Poly),
    Frac(Box<(Value, Value)>),
}

impl Ring {
    pub fn integers() -> Ring {
        Ring(Arc::new(RingKind::Integers))
    }

    pub fn rationals() -> Ring {
        Ring(Arc::new(RingKind::Rationals))
    }

    pub fn integers_mod(n: impl Into<BigInt>) -> Result<Ring, RingError> {
        let n = n.into();
        if !n.is_positive() {
            return Err(RingError::InvalidRing(format!("modulus {n} must be positive")));
        }
        Ok(Ring(Arc::new(RingKind::IntegersModN(n))))
    }

    pub fn prime_field(p: impl Into<BigInt>) -> Result<Ring, RingError> {
        let p = p.into();
        if p >= prime::deterministic_bound() {
            return Err(RingError::InvalidRing(format!(
                "{p} is beyond the deterministic primality bound"
            )));
        }
        if !prime::is_prime(&p) {
            return Err(RingError::InvalidRing(format!("{p} is not prime")));
        }
        Ok(Ring(Arc::new(RingKind::PrimeField(p))))
    }

    pub fn polynomial<S: AsRef<str>>(vars: &[S]) -> Result<Ring, RingError> {
        let names: Vec<String> = vars.iter().map(|s| s.as_ref().to_string()).collect();
        for (i, v) in names.iter().enumerate() {
            let ok = v.chars().next().map_or(false, |c| c.is_ascii_alphabetic())
                && v.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
            if !ok {
                return Err(RingError::InvalidRing(format!("bad variable name {v:?}")));
            }
            if names[..i].contains(v) {
                return Err(RingError::InvalidRing(format!("duplicate variable {v}")));
            }
        }
        Ok(Ring(Arc::new(RingKind::Poly(names))))
    }

    pub fn fraction_field(base: &Ring) -> Result<Ring, RingError> {
        if !base.is_domain() {
            return Err(RingError::InvalidRing(format!("{base} is not a domain")));
        }
        Ok(Ring(Arc::new(RingKind::Fraction(base.clone()))))
    }

    /// Parses `Z`, `Q`, `Zmod:n`, `Fp:p`, `Poly:Z[X2,X3]`, `Frac:<ring>`.
    pub fn parse_spec(spec: &str) -> Result<Ring, RingError> {
        let bad = |reason: &str| RingError::Parse { input: spec.to_string(), reason: reason.to_string() };
        let spec_t = spec.trim();
        if spec_t == "Z" {
            return Ok(Ring::integers());
        }
        if spec_t == "Q" {
            return Ok(Ring::rationals());
        }
        if let Some(n) = spec_t.strip_prefix("Zmod:") {
            let n: BigInt = n.trim().parse().map_err(|_| bad("modulus is not an integer"))?;
            return Ring::integers_mod(n);
        }
        if let Some(p) = spec_t.strip_prefix("Fp:") {
            let p: BigInt = p.trim().parse().map_err(|_| bad("modulus is not an integer"))?;
            return Ring::prime_field(p);
        }
        if let Some(rest) = spec_t.strip_prefix("Poly:Z[") {
            let inner = rest.strip_suffix(']').ok_or_else(|| bad("missing ]"))?;
            let vars: Vec<&str> = inner.split(',').map(str::trim).collect();
            if vars.iter().any(|v| v.is_empty()) {
                return Err(bad("empty variable name"));
            }
            return Ring::polynomial(&vars);
        }
        if let Some(rest) = spec_t.strip_prefix("Frac:") {
            return Ring::fraction_field(&Ring::parse_spec(rest)?);
        }
        Err(bad("unknown ring"))
    }

    pub fn kind(&self) -> &RingKind {
        &self.0
    }

    pub fn is_field(&self) -> bool {
        match self.kind() {
            RingKind::Rationals | RingKind::PrimeField(_) | RingKind::Fraction(_) => true,
            RingKind::IntegersModN(n) => n < &prime::deterministic_bound() && prime::is_prime(n),
            RingKind::Integers | RingKind::Poly(_) => false,
        }
    }

    pub fn is_domain(&self) -> bool {
        match self.kind() {
            RingKind::Integers | RingKind::Poly(_) => true,
            _ => self.is_field(),
        }
    }

    /// Variable names of a polynomial ring, or of the polynomial base of a
    /// fraction field.
    pub fn variables(&self) -> &[String] {
        match self.kind() {
            RingKind::Poly(v) => v,
            RingKind::Fraction(b) => b.variables(),
            _ => &[],
        }
    }

    fn modulus(&self) -> Option<&BigInt> {
        match self.kind() {
            RingKind::IntegersModN(n) | RingKind::PrimeField(n) => Some(n),
            _ => None,
        }
    }

    fn wrap(&self, value: Value) -> RingElement {
        RingElement { ring: self.clone(), value }
    }

    pub fn zero(&self) -> RingElement {
        self.from_int(0)
    }

    pub fn one(&self) -> RingElement {
        self.from_int(1)
    }

    pub fn from_int(&self, n: impl Into<BigInt>) -> RingElement {
        let v = self.v_int(n.into());
        self.wrap(v)
    }

    fn v_int(&self, n: BigInt) -> Value {
        match self.kind() {
            RingKind::Integers => Value::Int(n),
            RingKind::Rationals => Value::Rat(BigRational::from_integer(n)),
            RingKind::IntegersModN(m) | RingKind::PrimeField(m) => Value::Int(n.mod_floor(m)),
            RingKind::Poly(v) => Value::Poly(Poly::constant(v.len(), n)),
            RingKind::Fraction(b) => Value::Frac(Box::new((b.v_int(n), b.v_int(BigInt::one())))),
        }
    }

    /// The `i`-th variable of a polynomial ring (or its fraction field).
    pub fn var(&self, name: &str) -> Result<RingElement, RingError> {
        let i = self
            .variables()
            .iter()
            .position(|v| v == name)
            .ok_or_else(|| RingError::InvalidRing(format!("{self} has no variable {name}")))?;
        Ok(self.var_at(i))
    }

    pub fn var_at(&self, i: usize) -> RingElement {
        match self.kind() {
            RingKind::Poly(v) => self.wrap(Value::Poly(Poly::var(v.len(), i))),
            RingKind::Fraction(b) => {
                let x = b.var_at(i);
                self.wrap(Value::Frac(Box::new((x.value, b.v_int(BigInt::one())))))
            }
            _ => panic!("{self} has no variables"),
        }
    }

    pub fn from_poly(&self, p: Poly) -> RingElement {
        match self.kind() {
            RingKind::Poly(v) => {
                assert_eq!(v.len(), p.nvars());
                self.wrap(Value::Poly(p))
            }
            _ => panic!("{self} is not a polynomial ring"),
        }
    }

    pub fn from_rational(&self, q: &BigRational) -> Result<RingElement, RingError> {
        let n = self.from_int(q.numer().clone());
        let d = self.from_int(q.denom().clone());
        n.exact_div(&d)
    }

    /// Maps an element of this ring or of a ring that embeds canonically
    /// into it (integers, the base of a fraction field).
    pub fn embed(&self, x: &RingElement) -> Result<RingElement, RingError> {
        if &x.ring == self {
            return Ok(x.clone());
        }
        match (self.kind(), x.ring.kind(), &x.value) {
            (_, RingKind::Integers, Value::Int(n)) => Ok(self.from_int(n.clone())),
            (RingKind::Fraction(b), _, _) if b == &x.ring => {
                Ok(self.wrap(Value::Frac(Box::new((x.value.clone(), b.v_int(BigInt::one()))))))
            }
            (RingKind::Fraction(_) | RingKind::PrimeField(_), RingKind::Rationals, Value::Rat(q)) => {
                self.from_rational(q)
            }
            _ => Err(RingError::Mismatch(x.ring.to_string(), self.to_string())),
        }
    }

    pub fn parse_element(&self, s: &str) -> Result<RingElement, RingError> {
        parse::parse_element(self, s)
    }

    // Value-level arithmetic. Values are assumed to belong to `self`.

    fn v_is_zero(&self, a: &Value) -> bool {
        match a {
            Value::Int(n) => n.is_zero(),
            Value::Rat(q) => q.is_zero(),
            Value::Poly(p) => p.is_zero(),
            Value::Frac(f) => self.base().v_is_zero(&f.0),
        }
    }

    fn base(&self) -> &Ring {
        match self.kind() {
            RingKind::Fraction(b) => b,
            _ => panic!("{self} is not a fraction field"),
        }
    }

    fn v_add(&self, a: &Value, b: &Value) -> Value {
        match (a, b) {
            (Value::Int(x), Value::Int(y)) => self.reduce_int(x + y),
            (Value::Rat(x), Value::Rat(y)) => Value::Rat(x + y),
            (Value::Poly(x), Value::Poly(y)) => Value::Poly(x.add(y)),
            (Value::Frac(x), Value::Frac(y)) => {
                let base = self.base();
                if x.1 == y.1 {
                    return self.frac_normalize(base.v_add(&x.0, &y.0), x.1.clone());
                }
                let n = base.v_add(&base.v_mul(&x.0, &y.1), &base.v_mul(&y.0, &x.1));
                self.frac_normalize(n, base.v_mul(&x.1, &y.1))
            }
            _ => unreachable!("value kind mismatch"),
        }
    }

    fn v_neg(&self, a: &Value) -> Value {
        match a {
            Value::Int(x) => self.reduce_int(-x),
            Value::Rat(x) => Value::Rat(-x),
            Value::Poly(x) => Value::Poly(x.neg()),
            Value::Frac(x) => Value::Frac(Box::new((self.base().v_neg(&x.0), x.1.clone()))),
        }
    }

    fn v_sub(&self, a: &Value, b: &Value) -> Value {
        match (a, b) {
            (Value::Int(x), Value::Int(y)) => self.reduce_int(x - y),
            (Value::Rat(x), Value::Rat(y)) => Value::Rat(x - y),
            (Value::Poly(x), Value::Poly(y)) => Value::Poly(x.sub(y)),
            _ => self.v_add(a, &self.v_neg(b)),
        }
    }

    fn v_mul(&self, a: &Value, b: &Value) -> Value {
        match (a, b) {
            (Value::Int(x), Value::Int(y)) => self.reduce_int(x * y),
            (Value::Rat(x), Value::Rat(y)) => Value::Rat(x * y),
            (Value::Poly(x), Value::Poly(y)) => Value::Poly(x.mul(y)),
            (Value::Frac(x), Value::Frac(y)) => {
                let base = self.base();
                self.frac_normalize(base.v_mul(&x.0, &y.0), base.v_mul(&x.1, &y.1))
            }
            _ => unreachable!("value kind mismatch"),
        }
    }

    fn reduce_int(&self, n: BigInt) -> Value {
        match self.modulus() {
            Some(m) => Value::Int(n.mod_floor(m)),
            None => Value::Int(n),
        }
    }

    fn v_exact_div(&self, a: &Value, b: &Value) -> Result<Value, RingError> {
        if self.v_is_zero(b) {
            return Err(RingError::DivisionByZero);
        }
        let fail = || {
            RingError::DivisionFailure(self.wrap(a.clone()).to_string(), self.wrap(b.clone()).to_string())
        };
        match (self.kind(), a, b) {
            (RingKind::Integers, Value::Int(x), Value::Int(y)) => {
                let (q, r) = x.div_rem(y);
                if r.is_zero() {
                    Ok(Value::Int(q))
                } else {
                    Err(fail())
                }
            }
            (RingKind::Rationals, Value::Rat(x), Value::Rat(y)) => Ok(Value::Rat(x / y)),
            (RingKind::IntegersModN(n) | RingKind::PrimeField(n), Value::Int(x), Value::Int(y)) => {
                let g = y.gcd(n);
                if !(x % &g).is_zero() {
                    return Err(fail());
                }
                let n2 = n / &g;
                let inv = prime::mod_inverse(&(y / &g), &n2).ok_or_else(fail)?;
                Ok(Value::Int(((x / &g) * inv).mod_floor(&n2).mod_floor(n)))
            }
            (RingKind::Poly(_), Value::Poly(x), Value::Poly(y)) => {
                x.exact_div(y).map(Value::Poly).ok_or_else(fail)
            }
            (RingKind::Fraction(base), Value::Frac(x), Value::Frac(y)) => {
                Ok(self.frac_normalize(base.v_mul(&x.0, &y.1), base.v_mul(&x.1, &y.0)))
            }
            _ => unreachable!("value kind mismatch"),
        }
    }

    /// Brings a numerator/denominator pair to lowest terms with a positive
    /// denominator. Over a field base the denominator becomes 1.
    fn frac_normalize(&self, n: Value, d: Value) -> Value {
        let base = self.base();
        let one = base.v_int(BigInt::one());
        if base.v_is_zero(&n) {
            return Value::Frac(Box::new((n, one)));
        }
        if base.is_field() {
            let q = base.v_exact_div(&n, &d).expect("nonzero denominator in a field");
            return Value::Frac(Box::new((q, one)));
        }
        match (n, d) {
            (Value::Int(n), Value::Int(d)) => {
                let g = n.gcd(&d);
                let (mut n, mut d) = (n / &g, d / &g);
                if d.is_negative() {
                    n = -n;
                    d = -d;
                }
                Value::Frac(Box::new((Value::Int(n), Value::Int(d))))
            }
            (Value::Poly(n), Value::Poly(d)) => {
                let g = Poly::gcd(&n, &d);
                let mut n = n.exact_div(&g).expect("gcd divides");
                let mut d = d.exact_div(&g).expect("gcd divides");
                if d.leading_term().map_or(false, |(_, c)| c.is_negative()) {
                    n = n.neg();
                    d = d.neg();
                }
                Value::Frac(Box::new((Value::Poly(n), Value::Poly(d))))
            }
            _ => unreachable!("unsupported fraction base"),
        }
    }
}

impl fmt::Display for Ring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind() {
            RingKind::Integers => write!(f, "Z"),
            RingKind::Rationals => write!(f, "Q"),
            RingKind::IntegersModN(n) => write!(f, "Zmod:{n}"),
            RingKind::PrimeField(p) => write!(f, "Fp:{p}"),
            RingKind::Poly(v) => write!(f, "Poly:Z[{}]", v.join(",")),
            RingKind::Fraction(b) => write!(f, "Frac:{b}"),
        }
    }
}

/// An element of a [`Ring`], always in canonical form.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RingElement {
    ring: Ring,
    value: Value,
}

impl RingElement {
    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn is_zero(&self) -> bool {
        self.ring.v_is_zero(&self.value)
    }

    pub fn is_one(&self) -> bool {
        *self == self.ring.one()
    }

    fn check(&self, other: &RingElement) -> Result<(), RingError> {
        if self.ring == other.ring {
            Ok(())
        } else {
            Err(RingError::Mismatch(self.ring.to_string(), other.ring.to_string()))
        }
    }

    pub fn try_add(&self, other: &RingElement) -> Result<RingElement, RingError> {
        self.check(other)?;
        Ok(self.ring.wrap(self.ring.v_add(&self.value, &other.value)))
    }

    pub fn try_sub(&self, other: &RingElement) -> Result<RingElement, RingError> {
        self.check(other)?;
        Ok(self.ring.wrap(self.ring.v_sub(&self.value, &other.value)))
    }

    pub fn try_mul(&self, other: &RingElement) -> Result<RingElement, RingError> {
        self.check(other)?;
        Ok(self.ring.wrap(self.ring.v_mul(&self.value, &other.value)))
    }

    /// The unique `q` with `q * other == self` when `other` is a
    /// non-zero-divisor; for zero divisors in `Z/n` some solution is returned.
    pub fn exact_div(&self, other: &RingElement) -> Result<RingElement, RingError> {
        self.check(other)?;
        Ok(self.ring.wrap(self.ring.v_exact_div(&self.value, &other.value)?))
    }

    pub fn pow(&self, mut e: u32) -> RingElement {
        let mut base = self.clone();
        let mut acc = self.ring.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    pub fn is_zero_divisor(&self) -> bool {
        match (self.ring.kind(), &self.value) {
            (RingKind::IntegersModN(n), Value::Int(x)) => n.is_one() || !x.gcd(n).is_one(),
            _ => self.is_zero(),
        }
    }

    /// The integer value, for elements of `Z` (or the residue in `Z/n`).
    pub fn as_integer(&self) -> Option<&BigInt> {
        match &self.value {
            Value::Int(n) => Some(n),
            _ => None,
        }
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match &self.value {
            Value::Rat(q) => Some(q),
            _ => None,
        }
    }

    pub fn as_poly(&self) -> Option<&Poly> {
        match &self.value {
            Value::Poly(p) => Some(p),
            _ => None,
        }
    }

    /// Numerator and denominator of a fraction-field element.
    pub fn fraction_parts(&self) -> Option<(RingElement, RingElement)> {
        match (&self.value, self.ring.kind()) {
            (Value::Frac(f), RingKind::Fraction(b)) => Some((b.wrap(f.0.clone()), b.wrap(f.1.clone()))),
            _ => None,
        }
    }

    /// Ring homomorphism image of a polynomial under `X_i -> values[i]`.
    /// The polynomial's ring must have exactly `values.len()` variables.
    pub fn specialize(&self, target: &Ring, values: &[RingElement]) -> Result<RingElement, RingError> {
        let p = self
            .as_poly()
            .ok_or_else(|| RingError::InvalidRing(format!("{} is not a polynomial ring", self.ring)))?;
        for v in values {
            if v.ring() != target {
                return Err(RingError::Mismatch(v.ring.to_string(), target.to_string()));
            }
        }
        let names = self.ring.variables();
        let mut powers: HashMap<(usize, u32), RingElement> = HashMap::new();
        let mut acc = target.zero();
        for (m, c) in p.terms() {
            let mut t = target.from_int(c.clone());
            for (i, &e) in m.exponents().iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let x = values.get(i).ok_or_else(|| RingError::MissingVariable(names[i].clone()))?;
                let xe = powers.entry((i, e)).or_insert_with(|| x.pow(e));
                t = &t * &*xe;
            }
            acc = &acc + &t;
        }
        Ok(acc)
    }

    /// Like [`specialize`](Self::specialize) but with values keyed by name.
    pub fn specialize_named(
        &self,
        target: &Ring,
        values: &HashMap<String, RingElement>,
    ) -> Result<RingElement, RingError> {
        let names = self.ring.variables();
        let p = self
            .as_poly()
            .ok_or_else(|| RingError::InvalidRing(format!("{} is not a polynomial ring", self.ring)))?;
        let mut ordered = Vec::with_capacity(names.len());
        for (i, n) in names.iter().enumerate() {
            match values.get(n) {
                Some(v) => ordered.push(v.clone()),
                None if p.degree_in(i) == 0 => ordered.push(target.zero()),
                None => return Err(RingError::MissingVariable(n.clone())),
            }
        }
        self.specialize(target, &ordered)
    }
}

impl fmt::Display for RingElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (&self.value, self.ring.kind()) {
            (Value::Int(n), _) => write!(f, "{n}"),
            (Value::Rat(q), _) => {
                if q.denom().is_one() {
                    write!(f, "{}", q.numer())
                } else {
                    write!(f, "{}/{}", q.numer(), q.denom())
                }
            }
            (Value::Poly(p), RingKind::Poly(names)) => write!(f, "{}", p.display(names)),
            (Value::Frac(_), _) => {
                let (n, d) = self.fraction_parts().unwrap();
                if d.is_one() {
                    return write!(f, "{n}");
                }
                let ns = n.to_string();
                let ds = d.to_string();
                let multi = |s: &str| s[1..].contains(" + ") || s[1..].contains(" - ");
                let n_out = if multi(&ns) { format!("({ns})") } else { ns };
                let d_atomic = ds.chars().all(|c| c.is_ascii_digit())
                    || (ds.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '^')
                        && ds.chars().next().map_or(false, |c| c.is_ascii_alphabetic()));
                let d_out = if d_atomic { ds } else { format!("({ds})") };
                write!(f, "{n_out}/{d_out}")
            }
            _ => unreachable!("value kind mismatch"),
        }
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $try:ident) => {
        impl $tr<&RingElement> for &RingElement {
            type Output = RingElement;
            fn $m(self, rhs: &RingElement) -> RingElement {
                self.$try(rhs).unwrap_or_else(|e| panic!("{e}"))
            }
        }
        impl $tr<RingElement> for RingElement {
            type Output = RingElement;
            fn $m(self, rhs: RingElement) -> RingElement {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&RingElement> for RingElement {
            type Output = RingElement;
            fn $m(self, rhs: &RingElement) -> RingElement {
                (&self).$m(rhs)
            }
        }
    };
}

binop!(Add, add, try_add);
binop!(Sub, sub, try_sub);
binop!(Mul, mul, try_mul);

impl Neg for &RingElement {
    type Output = RingElement;
    fn neg(self) -> RingElement {
        self.ring.wrap(self.ring.v_neg(&self.value))
    }
}

impl Neg for RingElement {
    type Output = RingElement;
    fn neg(self) -> RingElement {
        -&self
    }
}
