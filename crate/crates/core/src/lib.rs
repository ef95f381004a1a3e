//! Exact arithmetic for elliptic sequences over commutative rings.

pub mod classify;
pub mod derive;
pub mod relations;
pub mod ring;
pub mod sequences;
pub mod std_eds;

pub use relations::{Half, RelationError, RelationId};
pub use ring::{Monomial, Poly, Ring, RingElement, RingError, RingKind};
pub use sequences::{EllipticSeq, FailureReason, GenerationFailure, SequenceError, TermOracle};
