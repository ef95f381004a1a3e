use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{GenerationFailure, TermOracle};
use crate::relations::{eval_relation, RelationId};

/// Which relations a window check evaluates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    /// Every canonical relation, integer and half-integer.
    Full,
    /// E(m,n,r,0) with m > n > r > 0.
    Mnr0,
    /// E(m,n,1,0) with m > n > 1.
    Mn10,
    /// E(n+1,n,1,0) and E(n+1,n-1,1,0).
    EvenOdd,
    /// E(n,2,1,0).
    Somos,
}

impl FromStr for Family {
    type Err = String;
    fn from_str(s: &str) -> Result<Family, String> {
        match s.to_ascii_lowercase().as_str() {
            "full" => Ok(Family::Full),
            "mnr0" => Ok(Family::Mnr0),
            "mn10" => Ok(Family::Mn10),
            "even-odd" | "evenodd" => Ok(Family::EvenOdd),
            "somos" => Ok(Family::Somos),
            _ => Err(format!("unknown family '{s}' (full, mnr0, mn10, even-odd, somos)")),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::Full => "full",
            Family::Mnr0 => "mnr0",
            Family::Mn10 => "mn10",
            Family::EvenOdd => "even-odd",
            Family::Somos => "somos",
        })
    }
}

/// Relations of `family` whose largest index `a + b` is at most `n`, sorted.
pub fn family_relations(family: Family, n: i64) -> Vec<RelationId> {
    let mut out = Vec::new();
    match family {
        Family::Full => return RelationId::all_canonical(n),
        Family::Mnr0 => {
            for m in 3..n {
                for k in 2..m.min(n - m + 1) {
                    for r in 1..k {
                        out.push(RelationId::new(m, k, r, 0));
                    }
                }
            }
        }
        Family::Mn10 => {
            for m in 3..n {
                for k in 2..m.min(n - m + 1) {
                    out.push(RelationId::new(m, k, 1, 0));
                }
            }
        }
        Family::EvenOdd => {
            for k in 2..=n {
                if 2 * k + 1 <= n {
                    out.push(RelationId::new(k + 1, k, 1, 0));
                }
                if k >= 3 && 2 * k <= n {
                    out.push(RelationId::new(k + 1, k - 1, 1, 0));
                }
            }
        }
        Family::Somos => out.extend((3..=n - 2).map(|k| RelationId::new(k, 2, 1, 0))),
    }
    out.sort();
    out
}

/// Canonical ids of the relations in `family` (up to index `n`) that `seq`
/// violates, sorted. Terms 1..n are generated first and the first failure
/// is returned as an error.
pub fn check_window(seq: &dyn TermOracle, n: i64, family: Family) -> Result<Vec<RelationId>, GenerationFailure> {
    for i in 1..=n {
        seq.term(i)?;
    }
    let rels = family_relations(family, n);
    let checked: Result<Vec<Option<RelationId>>, GenerationFailure> = rels
        .par_iter()
        .map(|r| eval_relation(seq, r).map(|v| (!v.holds()).then_some(*r)))
        .collect();
    Ok(checked?.into_iter().flatten().collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::Ring;
    use crate::sequences::EllipticSeq;

    #[test]
    fn family_sizes() {
        assert_eq!(family_relations(Family::Full, 5), vec![RelationId::new(3, 2, 1, 0)]);
        assert_eq!(family_relations(Family::Mnr0, 7).len(), 5);
        assert_eq!(family_relations(Family::Somos, 8).len(), 4);
        let eo = family_relations(Family::EvenOdd, 8);
        assert_eq!(eo, vec![RelationId::new(3, 2, 1, 0), RelationId::new(4, 2, 1, 0), RelationId::new(4, 3, 1, 0), RelationId::new(5, 3, 1, 0)]);
        for f in [Family::Mnr0, Family::Mn10, Family::EvenOdd, Family::Somos] {
            assert!(family_relations(f, 12).iter().all(|r| r.is_canonical() && r.max_index() <= 12));
        }
    }

    #[test]
    fn window_detects_violation() {
        let z = Ring::integers();
        let id = EllipticSeq::explicit(&z, "identity", |n| Ok(Ring::integers().from_int(n)));
        assert!(check_window(&id, 12, Family::Full).unwrap().is_empty());
        let bad = EllipticSeq::explicit(&z, "squares", |n| Ok(Ring::integers().from_int(n * n.abs())));
        let v = check_window(&bad, 6, Family::Full).unwrap();
        assert!(v.contains(&RelationId::new(3, 2, 1, 0)));
        let s = EllipticSeq::somos4([1, 1, 0, 1].map(|v| z.from_int(v))).unwrap();
        assert_eq!(check_window(&s, 10, Family::Somos).unwrap_err().index, 7);
    }
}
