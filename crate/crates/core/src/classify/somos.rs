//! Somos sequences with a vanishing term: zero patterns when h3 = 0, and
//! the branch-off behaviour after a zero of a reference EDS when h3 != 0.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use super::automaton::PatternState;
use super::ClassifyError;
use crate::ring::RingElement;
use crate::sequences::{EllipticSeq, TermOracle};

/// An eventually periodic zero/nonzero pattern for h1, h2, h3, ... written
/// `prefix(period)`, e.g. `110000(100)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pattern {
    pub prefix: Vec<u8>,
    pub period: Vec<u8>,
}

impl Pattern {
    /// Bit for h(i), i >= 1; h0 reads as 0.
    pub fn bit(&self, i: usize) -> u8 {
        if i == 0 {
            0
        } else if i <= self.prefix.len() {
            self.prefix[i - 1]
        } else {
            self.period[(i - 1 - self.prefix.len()) % self.period.len()]
        }
    }

    /// Indices i <= n whose value is free, i.e. h(i) != 0 while h(i-4) = 0.
    /// h1 and h2 count as free.
    pub fn free_slots(&self, n: usize) -> Vec<usize> {
        (1..=n).filter(|&i| self.bit(i) == 1 && (i <= 2 || self.bit(i - 4) == 0)).collect()
    }

    fn state(&self, i: usize) -> PatternState {
        PatternState::from_bits([self.bit(i), self.bit(i + 1), self.bit(i + 2), self.bit(i + 3)])
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = |v: &[u8]| v.iter().map(|b| char::from(b'0' + b)).collect::<String>();
        write!(f, "{}({})", s(&self.prefix), s(&self.period))
    }
}

impl FromStr for Pattern {
    type Err = String;
    fn from_str(s: &str) -> Result<Pattern, String> {
        let bits = |t: &str| -> Result<Vec<u8>, String> {
            t.chars()
                .map(|c| match c {
                    '0' => Ok(0),
                    '1' => Ok(1),
                    _ => Err(format!("bad character '{c}' in pattern '{s}'")),
                })
                .collect()
        };
        let (pre, rest) = s.split_once('(').ok_or_else(|| format!("pattern '{s}' needs a (period)"))?;
        let per = rest.strip_suffix(')').ok_or_else(|| format!("pattern '{s}' must end with ')'"))?;
        let p = Pattern { prefix: bits(pre)?, period: bits(per)? };
        if p.period.is_empty() {
            return Err(format!("pattern '{s}' has an empty period"));
        }
        Ok(p)
    }
}

/// Builds h1..hN with h1 h2 != 0 and h3 = 0 following `pattern`, through
/// h(n+2)h(n-2)h1^2 = h(n+1)h(n-1)h2^2. Free slots (h1, h2, and every
/// nonzero h(i) with h(i-4) = 0) take `values` in turn, cycling.
pub fn gen_type110(pattern: &Pattern, values: &[RingElement], n: usize) -> Result<EllipticSeq, ClassifyError> {
    let ring = values
        .first()
        .map(|v| v.ring().clone())
        .ok_or_else(|| ClassifyError::Precondition("no values for the free slots".into()))?;
    if !ring.is_field() {
        return Err(ClassifyError::NotAField(ring.to_string()));
    }
    if values.iter().any(|v| v.is_zero() || v.ring() != &ring) {
        return Err(ClassifyError::Precondition("free values must be nonzero elements of one field".into()));
    }
    if (pattern.bit(1), pattern.bit(2), pattern.bit(3)) != (1, 1, 0) {
        return Err(ClassifyError::Precondition(format!("pattern {pattern} must start with 110")));
    }
    // Every window h(i-2)..h(i+2) must be a valid transition; checking i up to
    // the end of the first repetition of the period covers the whole pattern.
    let horizon = n.max(pattern.prefix.len() + 2 * pattern.period.len() + 4);
    for i in 0..=horizon {
        let s = pattern.state(i);
        if !s.extensions().contains(&pattern.bit(i + 4)) {
            return Err(ClassifyError::InvalidPattern { position: i + 4 });
        }
    }
    let mut free = values.iter().cycle();
    let mut h: Vec<RingElement> = vec![ring.zero()];
    for i in 1..=n {
        let v = if pattern.bit(i) == 0 {
            ring.zero()
        } else if i <= 2 || h[i - 4].is_zero() {
            free.next().expect("cycle of a nonempty list").clone()
        } else {
            let num = &(&h[i - 1] * &h[i - 3]) * &h[2].pow(2);
            let den = &h[i - 4] * &h[1].pow(2);
            num.exact_div(&den)?
        };
        if v.is_zero() != (pattern.bit(i) == 0) {
            return Err(ClassifyError::InvalidPattern { position: i });
        }
        h.push(v);
    }
    h.remove(0);
    Ok(EllipticSeq::from_terms(&ring, h)?)
}

/// The data at a zero h_n of the reference EDS: h(n+1) = r1 h1,
/// h(n+2) = r1 r2 h2, and the free value h(n+4).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BranchPoint {
    pub n: i64,
    pub r1: RingElement,
    pub r2: RingElement,
    pub free: RingElement,
    /// Whether h(n+3) = r1 r2^2 h3.
    pub invariant_holds: bool,
}

impl Serialize for BranchPoint {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut m = s.serialize_map(Some(5))?;
        m.serialize_entry("n", &self.n)?;
        m.serialize_entry("r1", &self.r1.to_string())?;
        m.serialize_entry("r2", &self.r2.to_string())?;
        m.serialize_entry("free", &self.free.to_string())?;
        m.serialize_entry("invariant_holds", &self.invariant_holds)?;
        m.end()
    }
}

/// Runs the Somos recurrence from h1..h4 of EDS(b,c,d) up to `n`, taking
/// h(k) from `free` whenever h(k-4) = 0, and records every zero passed.
/// Returns the branched sequence h1..hN and its branch points.
pub fn branch_explore<F>(
    b: &RingElement,
    c: &RingElement,
    d: &RingElement,
    n: i64,
    mut free: F,
) -> Result<(EllipticSeq, Vec<BranchPoint>), ClassifyError>
where
    F: FnMut(i64) -> RingElement,
{
    let ring = b.ring().clone();
    if !ring.is_field() {
        return Err(ClassifyError::NotAField(ring.to_string()));
    }
    if b.is_zero() || c.is_zero() {
        return Err(ClassifyError::Precondition("need h1 h2 h3 != 0".into()));
    }
    let eds = EllipticSeq::std_eds(b.clone(), c.clone(), d.clone())?;
    let mut h: Vec<RingElement> = vec![ring.zero()];
    for i in 1..=n.min(4) {
        h.push(eds.term(i)?);
    }
    for k in 5..=n {
        let k = k as usize;
        let v = if h[k - 4].is_zero() {
            free(k as i64)
        } else {
            let num = &(&h[2].pow(2) * &h[k - 1]) * &h[k - 3] - &(&h[3] * &h[1]) * &h[k - 2].pow(2);
            num.exact_div(&(&h[k - 4] * &h[1].pow(2)))?
        };
        h.push(v);
    }
    let mut points = Vec::new();
    for z in 1..=(n - 4) {
        let zi = z as usize;
        if !h[zi].is_zero() {
            continue;
        }
        let r1 = h[zi + 1].exact_div(&h[1])?;
        let r2 = h[zi + 2].exact_div(&(&r1 * &h[2]))?;
        let invariant_holds = h[zi + 3] == &(&r1 * &r2.pow(2)) * &h[3];
        points.push(BranchPoint { n: z, r1, r2, free: h[zi + 4].clone(), invariant_holds });
    }
    h.remove(0);
    Ok((EllipticSeq::from_terms(&ring, h)?, points))
}

/// Indices n <= bound with h_n = 0 in EDS(b,c,d) but h_m != 0 for every
/// proper divisor m of n.
pub fn zsigmondy_scan(b: &RingElement, c: &RingElement, d: &RingElement, bound: i64) -> Result<Vec<i64>, ClassifyError> {
    let eds = EllipticSeq::std_eds(b.clone(), c.clone(), d.clone())?;
    let zeros: Vec<i64> = (1..=bound)
        .map(|i| eds.term(i).map(|t| (i, t.is_zero())))
        .filter_map(|r| match r {
            Ok((i, true)) => Some(Ok(i)),
            Ok(_) => None,
            Err(e) => Some(Err(e)),
        })
        .collect::<Result<_, _>>()?;
    Ok(zeros.iter().copied().filter(|&z| !zeros.iter().any(|&m| m < z && z % m == 0)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::Ring;

    #[test]
    fn pattern_parsing() {
        let p: Pattern = "110000(100)".parse().unwrap();
        assert_eq!(p.bit(7), 1);
        assert_eq!(p.bit(10), 1);
        assert_eq!(p.to_string(), "110000(100)");
        assert!("1100".parse::<Pattern>().is_err());
    }

    #[test]
    fn free_parameters_per_period() {
        let f = Ring::prime_field(5).unwrap();
        let vals = [f.from_int(2), f.from_int(3)];
        let one: Pattern = "110000(100)".parse().unwrap();
        let two: Pattern = "110000(110000)".parse().unwrap();
        assert!(gen_type110(&one, &vals, 40).is_ok());
        assert!(gen_type110(&two, &vals, 40).is_ok());
        let per = |p: &Pattern, a: usize, b: usize| p.free_slots(b).len() - p.free_slots(a).len();
        assert_eq!(per(&one, 30, 33), 1);
        assert_eq!(per(&two, 30, 36), 2);
        let tail: Pattern = "1100(0)".parse().unwrap();
        let s = gen_type110(&tail, &vals, 20).unwrap();
        assert!((3..=20).all(|i| s.term(i).unwrap().is_zero()));
    }

    #[test]
    fn invalid_window_position() {
        let f = Ring::prime_field(5).unwrap();
        // 1101 forces h5 != 0.
        let p: Pattern = "1101(0)".parse().unwrap();
        assert!(matches!(gen_type110(&p, &[f.one()], 20), Err(ClassifyError::InvalidPattern { position: 5 })));
    }

    #[test]
    fn zsigmondy_examples() {
        let q = Ring::rationals();
        let i = |v: i64| q.from_int(v);
        assert!(zsigmondy_scan(&i(2), &i(3), &i(2), 40).unwrap().is_empty());
        assert_eq!(zsigmondy_scan(&i(0), &i(5), &i(0), 40).unwrap(), vec![2]);
    }
}
