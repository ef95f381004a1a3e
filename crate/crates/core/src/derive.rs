//! Derivation trees: every elliptic relation follows from the even-odd
//! recurrence or from the Somos-4 family by Rules I and II.
//!
//! Trees are built by the constructive inductions and memoized per base, so
//! shared subgoals are shared `Arc`s. `replay` re-checks every node either as
//! an exact polynomial identity or numerically on a concrete sequence.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use serde::ser::SerializeMap;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::relations::identities::{rule_ii1, rule_ii2};
use crate::relations::{eval_relation, symbolic_relation, Half, Ii1Form, RelationError, RelationId, SymbolicSeqRing, TIdentity};
use crate::ring::RingElement;
use crate::sequences::{GenerationFailure, TermOracle};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Base {
    EvenOdd,
    Somos,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Step {
    /// E(n+1,n,1,0).
    BaseOdd,
    /// E(n+1,n-1,1,0).
    BaseEven,
    /// E(n,2,1,0).
    BaseSomos,
    /// Two parameters coincide up to sign.
    Trivial,
    RuleI1(Arc<DerivationTree>),
    RuleI2(Arc<DerivationTree>),
    RuleII1 { form: Ii1Form, params: [Half; 5], children: Vec<Arc<DerivationTree>> },
    RuleII2 { params: [Half; 6], children: Vec<Arc<DerivationTree>> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DerivationTree {
    pub goal: RelationId,
    pub step: Step,
    /// Index pairs (i, j) with h(i) h(j) required not to be a zero divisor.
    pub side_conditions: Vec<(i64, i64)>,
}

impl Step {
    fn name(&self) -> &'static str {
        match self {
            Step::BaseOdd => "base_odd",
            Step::BaseEven => "base_even",
            Step::BaseSomos => "base_somos",
            Step::Trivial => "trivial",
            Step::RuleI1(_) => "rule_i1",
            Step::RuleI2(_) => "rule_i2",
            Step::RuleII1 { .. } => "rule_ii1",
            Step::RuleII2 { .. } => "rule_ii2",
        }
    }
}

impl DerivationTree {
    fn leaf(goal: RelationId, step: Step) -> Arc<DerivationTree> {
        Arc::new(DerivationTree { goal, step, side_conditions: Vec::new() })
    }

    pub fn children(&self) -> Vec<&Arc<DerivationTree>> {
        match &self.step {
            Step::RuleI1(c) | Step::RuleI2(c) => vec![c],
            Step::RuleII1 { children, .. } | Step::RuleII2 { children, .. } => children.iter().collect(),
            _ => Vec::new(),
        }
    }

    /// The identity a Rule II node expands, if any.
    pub fn identity(&self) -> Option<TIdentity> {
        match &self.step {
            Step::RuleII1 { form, params, .. } => Some(rule_ii1(*form, *params)),
            Step::RuleII2 { params, .. } => Some(rule_ii2(*params)),
            _ => None,
        }
    }

    /// Distinct nodes of the DAG, each once, parents before children.
    pub fn nodes(&self) -> Vec<&DerivationTree> {
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        let mut stack = vec![self];
        while let Some(t) = stack.pop() {
            if seen.insert(t as *const DerivationTree) {
                out.push(t);
                stack.extend(t.children().into_iter().map(|c| c.as_ref()));
            }
        }
        out
    }

    pub fn leaves(&self) -> Vec<&DerivationTree> {
        self.nodes().into_iter().filter(|t| t.children().is_empty()).collect()
    }

    /// Largest sequence index any node refers to.
    pub fn max_index(&self) -> i64 {
        self.nodes()
            .iter()
            .map(|t| {
                let own = t.goal.max_index();
                let id = t.identity().map_or(0, |i| i.max_index());
                let side = t.side_conditions.iter().map(|&(i, j)| i.abs().max(j.abs())).max().unwrap_or(0);
                let child = t.children().iter().map(|c| c.goal.max_index()).max().unwrap_or(0);
                own.max(id).max(side).max(child)
            })
            .max()
            .unwrap_or(0)
    }

    pub fn has_half_integer_node(&self) -> bool {
        self.nodes().iter().any(|t| !t.goal.is_integral())
    }

    /// Nodes whose children fail to decrease the induction measure of `base`.
    pub fn measure_violations(&self, base: Base) -> Vec<RelationId> {
        self.nodes()
            .into_iter()
            .filter(|t| {
                let m = measure(base, &t.goal);
                t.children().iter().any(|c| !c.children().is_empty() && measure(base, &c.goal) >= m)
            })
            .map(|t| t.goal)
            .collect()
    }
}

/// Lexicographic induction measure (doubled parameters).
fn measure(base: Base, r: &RelationId) -> [i64; 3] {
    match base {
        // Induction on a; within one a, minimal (c,d) first, then d <= c_min.
        Base::EvenOdd => {
            let (cmin, dmin) = minimal_pair(r);
            let stage = if (r.c2, r.d2) == (cmin, dmin) {
                0
            } else if r.d2 <= cmin {
                1
            } else {
                2
            };
            [r.a2, stage, 0]
        }
        Base::Somos => [r.a2 + r.b2, r.a2, -r.d2],
    }
}

/// (c_min, d_min) doubled: (1,0) for integers, (3/2,1/2) for half-integers.
fn minimal_pair(r: &RelationId) -> (i64, i64) {
    if r.is_integral() {
        (2, 0)
    } else {
        (3, 1)
    }
}

impl Serialize for DerivationTree {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut m = s.serialize_map(None)?;
        m.serialize_entry("goal", &self.goal.to_string())?;
        m.serialize_entry("step", self.step.name())?;
        match &self.step {
            Step::RuleII1 { form, params, .. } => {
                m.serialize_entry("form", form)?;
                m.serialize_entry("params", &params.iter().map(|p| p.to_string()).collect::<Vec<_>>())?;
            }
            Step::RuleII2 { params, .. } => {
                m.serialize_entry("params", &params.iter().map(|p| p.to_string()).collect::<Vec<_>>())?;
            }
            _ => {}
        }
        let children: Vec<&DerivationTree> = self.children().into_iter().map(|c| c.as_ref()).collect();
        m.serialize_entry("children", &children)?;
        m.serialize_entry("side_conditions", &self.side_conditions)?;
        m.end()
    }
}

type Memo = Mutex<HashMap<RelationId, Arc<DerivationTree>>>;

fn memo(base: Base) -> &'static Memo {
    static EVEN_ODD: OnceLock<Memo> = OnceLock::new();
    static SOMOS: OnceLock<Memo> = OnceLock::new();
    match base {
        Base::EvenOdd => EVEN_ODD.get_or_init(Default::default),
        Base::Somos => SOMOS.get_or_init(Default::default),
    }
}

fn memoized(base: Base, goal: RelationId, build: impl FnOnce() -> Arc<DerivationTree>) -> Arc<DerivationTree> {
    if let Some(t) = memo(base).lock().expect("memo lock").get(&goal) {
        return t.clone();
    }
    let t = build();
    memo(base).lock().expect("memo lock").entry(goal).or_insert(t).clone()
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DeriveError {
    #[error("goal {0} is not canonical (need a > b > c > d >= 0)")]
    NotCanonical(RelationId),
    #[error("goal {0} must have integer parameters")]
    NotIntegral(RelationId),
}

fn h(x: i64) -> Half {
    Half(x)
}

/// Derivation from the odd and even recurrences E(n+1,n,1,0), E(n+1,n-1,1,0),
/// assuming h2 h1 is not a zero divisor.
pub fn derive_from_even_odd(goal: RelationId) -> Result<Arc<DerivationTree>, DeriveError> {
    if !goal.is_canonical() {
        return Err(DeriveError::NotCanonical(goal));
    }
    Ok(even_odd(goal))
}

fn even_odd(goal: RelationId) -> Arc<DerivationTree> {
    memoized(Base::EvenOdd, goal, || {
        if goal.has_repeated() {
            return DerivationTree::leaf(goal, Step::Trivial);
        }
        let RelationId { a2, b2, c2, d2 } = goal;
        let (cmin, dmin) = minimal_pair(&goal);
        let side = vec![((cmin + dmin) / 2, (cmin - dmin) / 2)];
        if (c2, d2) == (cmin, dmin) {
            if a2 > b2 + 2 {
                return Arc::new(DerivationTree {
                    goal,
                    step: Step::RuleI2(even_odd(goal.rule_i2().canonical())),
                    side_conditions: Vec::new(),
                });
            }
            if goal.is_integral() {
                return DerivationTree::leaf(goal, Step::BaseOdd);
            }
            // E(b+1,b,3/2,1/2) is E(b+3/2,b-1/2,1,0) under Rule I.1.
            let child = DerivationTree::leaf(goal.rule_i1().canonical(), Step::BaseEven);
            return Arc::new(DerivationTree { goal, step: Step::RuleI1(child), side_conditions: Vec::new() });
        }
        let rel = |p: [i64; 4]| even_odd(RelationId { a2: p[0], b2: p[1], c2: p[2], d2: p[3] });
        if d2 == cmin || d2 == dmin {
            let form = if d2 == cmin { Ii1Form::C } else { Ii1Form::D };
            let children = vec![rel([a2, b2, cmin, dmin]), rel([a2, c2, cmin, dmin]), rel([b2, c2, cmin, dmin])];
            let params = [h(a2), h(b2), h(c2), h(cmin), h(dmin)];
            return Arc::new(DerivationTree { goal, step: Step::RuleII1 { form, params, children }, side_conditions: side });
        }
        let params = [h(a2), h(b2), h(c2), h(d2), h(cmin), h(dmin)];
        let children = rule_ii2(params).rhs.iter().map(|t| even_odd(t.relation().canonical())).collect();
        Arc::new(DerivationTree { goal, step: Step::RuleII2 { params, children }, side_conditions: side })
    })
}

/// Derivation from E(n,2,1,0) with n <= a+b-2, assuming h(n) is not a zero
/// divisor for n <= a+b-4.
pub fn derive_from_somos(goal: RelationId) -> Result<Arc<DerivationTree>, DeriveError> {
    if !goal.is_canonical() {
        return Err(DeriveError::NotCanonical(goal));
    }
    if !goal.is_integral() {
        return Err(DeriveError::NotIntegral(goal));
    }
    Ok(somos(goal))
}

fn is_somos_base(r: &RelationId) -> bool {
    r.is_integral() && r.b2 == 4 && r.c2 == 2 && r.d2 == 0 && r.a2 >= 6
}

fn somos(goal: RelationId) -> Arc<DerivationTree> {
    memoized(Base::Somos, goal, || {
        if goal.has_repeated() {
            return DerivationTree::leaf(goal, Step::Trivial);
        }
        if is_somos_base(&goal) {
            return DerivationTree::leaf(goal, Step::BaseSomos);
        }
        let RelationId { a2, b2, c2, d2 } = goal;
        let one = 2;
        let ii1 = |form: Ii1Form, e2: i64| {
            let params = [h(a2), h(b2), h(c2), h(d2), h(e2)];
            let id = rule_ii1(form, params);
            let children = id.rhs.iter().map(|t| somos(t.relation().canonical())).collect();
            let side = vec![id.lhs.cofactor_indices()];
            Arc::new(DerivationTree { goal, step: Step::RuleII1 { form, params, children }, side_conditions: side })
        };
        if c2 > d2 + one {
            return ii1(Ii1Form::CE, d2 + one);
        }
        if b2 < a2 - one {
            let child = somos(goal.rule_i2().canonical());
            return Arc::new(DerivationTree { goal, step: Step::RuleI2(child), side_conditions: Vec::new() });
        }
        if c2 < b2 - one {
            return ii1(Ii1Form::EC, c2 + one);
        }
        // (d+3, d+2, d+1, d) is E(2d+3, 2, 1, 0) under Rule I.1.
        let child = somos(goal.rule_i1().canonical());
        Arc::new(DerivationTree { goal, step: Step::RuleI1(child), side_conditions: Vec::new() })
    })
}

/// How `replay` checks nodes.
#[derive(Clone, Copy)]
pub enum ReplayMode<'a> {
    /// Exact polynomial identities in Z[h1..hK].
    Symbolic(usize),
    /// Defect propagation on a concrete sequence.
    Numeric(&'a dyn TermOracle),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReplayFailure {
    #[error("symbolic ring has K = {have} but the tree needs index {need}")]
    KTooSmall { need: i64, have: usize },
    #[error("leaf is not a base relation of the expected shape")]
    NotABase,
    #[error("node marked trivial has no repeated parameter")]
    NotTrivial,
    #[error("child {0} does not match the rule")]
    ChildMismatch(RelationId),
    #[error("identity does not hold")]
    IdentityFails,
    #[error("side condition h{0} h{1} is a zero divisor")]
    SideCondition(i64, i64),
    #[error("recorded side condition does not match the rule cofactor")]
    SideConditionMismatch,
    #[error("relation does not hold on the sequence")]
    DefectNonzero,
    #[error(transparent)]
    Generation(#[from] GenerationFailure),
}

/// A failed node: child positions from the root, the node goal, and the reason.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("node {goal} at path {path:?}: {reason}")]
pub struct ReplayError {
    pub path: Vec<usize>,
    pub goal: RelationId,
    pub reason: ReplayFailure,
}

struct Replayer<'a> {
    mode: ReplayMode<'a>,
    sym: Option<SymbolicSeqRing>,
    defects: Mutex<HashMap<RelationId, RingElement>>,
    done: HashSet<*const DerivationTree>,
}

impl Replayer<'_> {
    fn defect(&self, r: &RelationId) -> Result<RingElement, ReplayFailure> {
        if let Some(d) = self.defects.lock().expect("defect lock").get(r) {
            return Ok(d.clone());
        }
        let d = match (&self.mode, &self.sym) {
            (ReplayMode::Symbolic(_), Some(s)) => symbolic_relation(s, r).map_err(|e| match e {
                RelationError::KTooSmall { need, have } => ReplayFailure::KTooSmall { need, have },
                _ => ReplayFailure::IdentityFails,
            })?,
            (ReplayMode::Numeric(seq), _) => eval_relation(*seq, r)?.defect,
            _ => unreachable!("symbolic mode always has a ring"),
        };
        self.defects.lock().expect("defect lock").insert(*r, d.clone());
        Ok(d)
    }

    fn oracle(&self) -> &dyn TermOracle {
        match (&self.mode, &self.sym) {
            (ReplayMode::Numeric(seq), _) => *seq,
            (_, Some(s)) => s,
            _ => unreachable!("symbolic mode always has a ring"),
        }
    }

    fn identity_holds(&self, id: &TIdentity) -> Result<bool, ReplayFailure> {
        let seq = self.oracle();
        let term = |t: &crate::relations::TTerm| -> Result<RingElement, ReplayFailure> {
            let (i, j) = t.cofactor_indices();
            let c = seq.ring().from_int(t.coeff);
            Ok(c * seq.term(i)? * seq.term(j)? * self.defect(&t.relation())?)
        };
        let mut acc = term(&id.lhs)?;
        for t in &id.rhs {
            acc = acc - term(t)?;
        }
        Ok(acc.is_zero())
    }

    fn check_node(&self, t: &DerivationTree) -> Result<(), ReplayFailure> {
        let g = t.goal;
        let numeric = matches!(self.mode, ReplayMode::Numeric(_));
        match &t.step {
            Step::BaseOdd | Step::BaseEven | Step::BaseSomos => {
                let ok = match t.step {
                    Step::BaseOdd => g.is_integral() && g.a2 == g.b2 + 2 && (g.c2, g.d2) == (2, 0),
                    Step::BaseEven => g.is_integral() && g.a2 == g.b2 + 4 && (g.c2, g.d2) == (2, 0),
                    _ => is_somos_base(&g),
                };
                if !ok {
                    return Err(ReplayFailure::NotABase);
                }
                if numeric && !self.defect(&g)?.is_zero() {
                    return Err(ReplayFailure::DefectNonzero);
                }
            }
            Step::Trivial => {
                if !g.has_repeated() {
                    return Err(ReplayFailure::NotTrivial);
                }
                if !self.defect(&g)?.is_zero() {
                    return Err(ReplayFailure::IdentityFails);
                }
            }
            Step::RuleI1(c) | Step::RuleI2(c) => {
                let image = if matches!(t.step, Step::RuleI1(_)) { g.rule_i1() } else { g.rule_i2() };
                if image.canonical() != c.goal {
                    return Err(ReplayFailure::ChildMismatch(c.goal));
                }
                let (dg, dc) = (self.defect(&g)?, self.defect(&c.goal)?);
                if dg != dc && dg != -dc {
                    return Err(ReplayFailure::IdentityFails);
                }
            }
            Step::RuleII1 { children, .. } | Step::RuleII2 { children, .. } => {
                let id = t.identity().expect("rule II node");
                if id.lhs.relation().canonical() != g {
                    return Err(ReplayFailure::ChildMismatch(g));
                }
                for (term, child) in id.rhs.iter().zip(children) {
                    if term.relation().canonical() != child.goal {
                        return Err(ReplayFailure::ChildMismatch(child.goal));
                    }
                }
                if children.len() != id.rhs.len() {
                    return Err(ReplayFailure::IdentityFails);
                }
                let (i, j) = id.lhs.cofactor_indices();
                if t.side_conditions != [(i, j)] {
                    return Err(ReplayFailure::SideConditionMismatch);
                }
                if !self.identity_holds(&id)? {
                    return Err(ReplayFailure::IdentityFails);
                }
                if numeric {
                    let seq = self.oracle();
                    if (seq.term(i)? * seq.term(j)?).is_zero_divisor() {
                        return Err(ReplayFailure::SideCondition(i, j));
                    }
                }
            }
        }
        // Children hold and the step is sound, so the goal must hold.
        if numeric && !self.defect(&g)?.is_zero() {
            return Err(ReplayFailure::DefectNonzero);
        }
        Ok(())
    }

    fn walk(&mut self, t: &DerivationTree, path: &mut Vec<usize>) -> Result<(), ReplayError> {
        if !self.done.insert(t as *const DerivationTree) {
            return Ok(());
        }
        self.check_node(t).map_err(|reason| ReplayError { path: path.clone(), goal: t.goal, reason })?;
        for (i, c) in t.children().into_iter().enumerate() {
            path.push(i);
            self.walk(c, path)?;
            path.pop();
        }
        Ok(())
    }
}

/// Re-checks every node of the tree.
pub fn replay(tree: &DerivationTree, mode: ReplayMode<'_>) -> Result<(), ReplayError> {
    let sym = match mode {
        ReplayMode::Symbolic(k) => {
            let need = tree.max_index();
            if need > k as i64 {
                return Err(ReplayError {
                    path: Vec::new(),
                    goal: tree.goal,
                    reason: ReplayFailure::KTooSmall { need, have: k },
                });
            }
            Some(SymbolicSeqRing::new(k))
        }
        ReplayMode::Numeric(_) => None,
    };
    let mut r = Replayer { mode, sym, defects: Mutex::new(HashMap::new()), done: HashSet::new() };
    r.walk(tree, &mut Vec::new())
}

impl fmt::Display for DerivationTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn go(t: &DerivationTree, depth: usize, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            writeln!(f, "{:indent$}{} [{}]", "", t.goal, t.step.name(), indent = 2 * depth)?;
            for c in t.children() {
                go(c, depth + 1, f)?;
            }
            Ok(())
        }
        go(self, 0, f)
    }
}
