//! Zero patterns of type (110) Somos sequences, where h1 h2 != 0 and h3 = 0.
//!
//! A state ABCD records whether h(n-2), h(n-1), h(n), h(n+1) are nonzero.
//! Since E(n,2,1,0) reads h(n+2)h(n-2)h1^2 = h(n+1)h(n-1)h2^2 here, ABCD
//! extends to ABCDE iff A = 1 and E = B*D, or A = 0 and B*D = 0.

use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

/// Four zero/nonzero flags, most significant bit first.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PatternState(pub u8);

impl PatternState {
    pub fn bits(self) -> [u8; 4] {
        [3, 2, 1, 0].map(|i| (self.0 >> i) & 1)
    }

    pub fn from_bits(b: [u8; 4]) -> PatternState {
        PatternState(b.iter().fold(0, |acc, &x| (acc << 1) | (x & 1)))
    }

    /// Valid next bits E.
    pub fn extensions(self) -> Vec<u8> {
        let [a, b, _, d] = self.bits();
        match (a, b & d) {
            (1, e) => vec![e],
            (_, 0) => vec![0, 1],
            _ => Vec::new(),
        }
    }

    pub fn shift(self, e: u8) -> PatternState {
        PatternState(((self.0 << 1) | (e & 1)) & 0xf)
    }
}

impl fmt::Display for PatternState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.bits() {
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

impl FromStr for PatternState {
    type Err = String;
    fn from_str(s: &str) -> Result<PatternState, String> {
        let bits: Vec<u8> = s
            .chars()
            .map(|c| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                _ => Err(format!("bad pattern state '{s}'")),
            })
            .collect::<Result<_, _>>()?;
        let b: [u8; 4] = bits.try_into().map_err(|_| format!("pattern state '{s}' needs 4 bits"))?;
        Ok(PatternState::from_bits(b))
    }
}

impl Serialize for PatternState {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

fn all_states() -> impl Iterator<Item = PatternState> {
    (0u8..16).map(PatternState)
}

/// States with no valid extension.
pub fn dead_states() -> BTreeSet<PatternState> {
    all_states().filter(|s| s.extensions().is_empty()).collect()
}

pub fn initial_states() -> BTreeSet<PatternState> {
    ["1100", "1101"].iter().map(|s| s.parse().expect("valid state")).collect()
}

fn raw_edges() -> BTreeSet<(PatternState, PatternState)> {
    all_states().flat_map(|s| s.extensions().into_iter().map(move |e| (s, s.shift(e)))).collect()
}

fn reachable() -> HashSet<PatternState> {
    let edges = raw_edges();
    let mut seen: HashSet<PatternState> = initial_states().into_iter().collect();
    let mut stack: Vec<PatternState> = seen.iter().copied().collect();
    while let Some(s) = stack.pop() {
        for &(_, t) in edges.iter().filter(|(f, _)| *f == s) {
            if seen.insert(t) {
                stack.push(t);
            }
        }
    }
    seen
}

/// States never reached from the initial states.
pub fn unreachable_states() -> BTreeSet<PatternState> {
    let r = reachable();
    all_states().filter(|s| !r.contains(s)).collect()
}

/// Edges of the transition diagram: valid transitions between states that
/// can occur in some sequence, or that only lack an incoming edge (1010 and
/// 1110). 1111 is reachable only from itself and is left out, as are edges
/// into dead states.
pub fn automaton_transitions() -> BTreeSet<(PatternState, PatternState)> {
    let dead = dead_states();
    let all_ones = PatternState(0xf);
    raw_edges()
        .into_iter()
        .filter(|(a, b)| !dead.contains(b) && *a != all_ones && *b != all_ones)
        .collect()
}

/// Simple cycles of the diagram, each written as the bits entering along the
/// cycle and rotated to its smallest form.
pub fn simple_loops() -> BTreeSet<String> {
    let edges = automaton_transitions();
    let succ = |s: PatternState| edges.iter().filter(move |(a, _)| *a == s).map(|&(_, b)| b);
    let mut out = BTreeSet::new();
    for start in all_states() {
        // Cycles whose smallest state is `start`.
        let mut stack = vec![(start, vec![start])];
        while let Some((cur, path)) = stack.pop() {
            for next in succ(cur) {
                if next == start {
                    let word: Vec<u8> = path.iter().map(|s| s.0 & 1).collect();
                    out.insert(min_rotation(&word));
                } else if next > start && !path.contains(&next) {
                    let mut p = path.clone();
                    p.push(next);
                    stack.push((next, p));
                }
            }
        }
    }
    out
}

fn min_rotation(word: &[u8]) -> String {
    (0..word.len())
        .map(|i| word[i..].iter().chain(&word[..i]).map(|b| char::from(b'0' + b)).collect::<String>())
        .min()
        .unwrap_or_default()
}

/// The diagram as Graphviz DOT; initial states are drawn with double circles.
pub fn automaton_dot() -> String {
    let edges = automaton_transitions();
    let nodes: BTreeSet<PatternState> = edges.iter().flat_map(|&(a, b)| [a, b]).collect();
    let init = initial_states();
    let mut s = String::from("digraph type110 {\n");
    for n in nodes {
        let shape = if init.contains(&n) { "doublecircle" } else { "circle" };
        s.push_str(&format!("  \"{n}\" [shape={shape}];\n"));
    }
    for (a, b) in edges {
        s.push_str(&format!("  \"{a}\" -> \"{b}\";\n"));
    }
    s.push_str("}\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn st(s: &str) -> PatternState {
        s.parse().unwrap()
    }

    #[test]
    fn extension_rule() {
        assert_eq!(st("1101").shift(1), st("1011"));
        assert_eq!(st("1101").extensions(), vec![1]);
        assert_eq!(st("0110").extensions(), vec![0, 1]);
        assert!(st("0101").extensions().is_empty());
        assert_eq!(st("1010").extensions(), vec![0]);
        assert_eq!(st("1010").shift(0), st("0100"));
    }

    #[test]
    fn loops_and_dot() {
        let loops: Vec<String> = simple_loops().into_iter().collect();
        assert_eq!(loops, ["0", "00001", "000011", "001", "011"]);
        let dot = automaton_dot();
        assert!(dot.contains("\"1101\" -> \"1011\";"));
        assert!(dot.contains("\"1100\" [shape=doublecircle];"));
    }
}
