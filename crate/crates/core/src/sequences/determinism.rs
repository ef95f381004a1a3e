//! Finite checks of the determinism statements: two sequences satisfying
//! the same small family of relations and agreeing on a few initial terms
//! agree everywhere in the window.

use thiserror::Error;

use super::{GenerationFailure, TermOracle};
use crate::relations::{eval_relation, RelationId};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DeterminismError {
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error(transparent)]
    Generation(#[from] GenerationFailure),
}

fn require(ok: bool, msg: impl FnOnce() -> String) -> Result<(), DeterminismError> {
    if ok {
        Ok(())
    } else {
        Err(DeterminismError::Precondition(msg()))
    }
}

fn holds_on_both(h: &dyn TermOracle, g: &dyn TermOracle, r: &RelationId) -> Result<(), DeterminismError> {
    for (name, s) in [("h", h), ("h'", g)] {
        let ok = eval_relation(s, r)?.holds();
        require(ok, || format!("{name} does not satisfy {r}"))?;
    }
    Ok(())
}

fn agree(h: &dyn TermOracle, g: &dyn TermOracle, n: i64) -> Result<bool, DeterminismError> {
    Ok(h.term(n)? == g.term(n)?)
}

fn same_ring(h: &dyn TermOracle, g: &dyn TermOracle) -> Result<(), DeterminismError> {
    require(h.ring() == g.ring(), || format!("rings differ: {} and {}", h.ring(), g.ring()))
}

/// Checks that h and h' agree on 1..=m, given that both satisfy E(n,2,1,0)
/// for n <= m-2, agree on 1..=4, and h(n) is not a zero divisor for n <= m-4.
pub fn determinism_check_somos(h: &dyn TermOracle, g: &dyn TermOracle, m: i64) -> Result<bool, DeterminismError> {
    same_ring(h, g)?;
    for n in 1..=4.min(m) {
        require(agree(h, g, n)?, || format!("initial term {n} differs"))?;
    }
    for n in 3..=m - 2 {
        holds_on_both(h, g, &RelationId::new(n, 2, 1, 0))?;
    }
    for n in 1..=m - 4 {
        require(!h.term(n)?.is_zero_divisor(), || format!("h{n} is a zero divisor"))?;
    }
    for n in 1..=m {
        if !agree(h, g, n)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Checks that h and h' agree on 1..=m, given r < s of opposite parity,
/// E(2r+i, r+i, r, 0) and E(s+r+i, r+i, r, 0) on both sequences within the
/// window, agreement up to 3r in the parity class of r and up to s+2r in the
/// parity class of s, and h(s) h(r) not a zero divisor.
pub fn determinism_check_even_odd(
    h: &dyn TermOracle,
    g: &dyn TermOracle,
    r: i64,
    s: i64,
    m: i64,
) -> Result<bool, DeterminismError> {
    same_ring(h, g)?;
    require(0 < r && r < s && (r + s) % 2 == 1, || format!("need 0 < r < s of opposite parity, got r = {r}, s = {s}"))?;
    for n in 1..=m {
        let bound = if (n - r) % 2 == 0 { 3 * r } else { s + 2 * r };
        if n <= bound {
            require(agree(h, g, n)?, || format!("initial term {n} differs"))?;
        }
    }
    for i in 1.. {
        let a = RelationId::new(2 * r + i, r + i, r, 0);
        let b = RelationId::new(s + r + i, r + i, r, 0);
        let mut any = false;
        for rel in [a, b] {
            if rel.max_index() <= m {
                holds_on_both(h, g, &rel)?;
                any = true;
            }
        }
        if !any {
            break;
        }
    }
    require(!(h.term(s)? * h.term(r)?).is_zero_divisor(), || format!("h{s} h{r} is a zero divisor"))?;
    for n in 1..=m {
        if !agree(h, g, n)? {
            return Ok(false);
        }
    }
    Ok(true)
}
