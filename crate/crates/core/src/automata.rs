//! Timed automata `(L, L0, Lu, Sigma, CX, I, E)`, their validation, guard
//! splitting and structural comparison.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;

use crate::constraints::{ClockConstraint, DisjunctSet};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Location {
    pub name: String,
    pub invariant: ClockConstraint,
    pub urgent: bool,
    pub initial: bool,
}

impl Location {
    pub fn new(name: impl Into<String>) -> Self {
        Location { name: name.into(), invariant: ClockConstraint::TRUE, urgent: false, initial: false }
    }

    pub fn with_invariant(mut self, invariant: ClockConstraint) -> Self {
        self.invariant = invariant;
        self
    }

    pub fn urgent(mut self, urgent: bool) -> Self {
        self.urgent = urgent;
        self
    }

    pub fn initial(mut self, initial: bool) -> Self {
        self.initial = initial;
        self
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Edge {
    pub source: String,
    pub action: String,
    pub guard: ClockConstraint,
    pub resets: BTreeSet<String>,
    pub target: String,
}

impl Edge {
    pub fn new(
        source: impl Into<String>,
        action: impl Into<String>,
        guard: ClockConstraint,
        resets: impl IntoIterator<Item = impl Into<String>>,
        target: impl Into<String>,
    ) -> Self {
        Edge {
            source: source.into(),
            action: action.into(),
            guard,
            resets: resets.into_iter().map(Into::into).collect(),
            target: target.into(),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TimedAutomaton {
    pub clocks: Vec<String>,
    /// Explicitly declared actions; see [`TimedAutomaton::alphabet`].
    pub actions: BTreeSet<String>,
    pub locations: Vec<Location>,
    pub edges: Vec<Edge>,
}

impl TimedAutomaton {
    pub fn new(clocks: impl IntoIterator<Item = impl Into<String>>) -> Self {
        TimedAutomaton { clocks: clocks.into_iter().map(Into::into).collect(), ..Default::default() }
    }

    pub fn add_location(&mut self, location: Location) -> &mut Self {
        self.locations.push(location);
        self
    }

    /// Adds an edge unless an identical one is already present.
    pub fn add_edge(&mut self, edge: Edge) -> &mut Self {
        if !self.edges.contains(&edge) {
            self.edges.push(edge);
        }
        self
    }

    pub fn location(&self, name: &str) -> Option<&Location> {
        self.locations.iter().find(|l| l.name == name)
    }

    pub fn initial_locations(&self) -> impl Iterator<Item = &Location> {
        self.locations.iter().filter(|l| l.initial)
    }

    pub fn urgent_locations(&self) -> impl Iterator<Item = &Location> {
        self.locations.iter().filter(|l| l.urgent)
    }

    pub fn edges_from<'a>(&'a self, source: &'a str) -> impl Iterator<Item = &'a Edge> + 'a {
        self.edges.iter().filter(move |e| e.source == source)
    }

    /// Declared actions together with every action labelling an edge.
    pub fn alphabet(&self) -> BTreeSet<String> {
        let mut sigma = self.actions.clone();
        sigma.extend(self.edges.iter().map(|e| e.action.clone()));
        sigma
    }

    pub fn max_constant(&self) -> u32 {
        let invariants = self.locations.iter().map(|l| l.invariant.max_constant());
        let guards = self.edges.iter().map(|e| e.guard.max_constant());
        invariants.chain(guards).max().unwrap_or(0)
    }

    pub fn validate(&self) -> Vec<Diagnostic> {
        validate(self)
    }
}

/// A well-formedness violation found by [`validate`].
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum Diagnostic {
    #[error("automaton declares no clocks")]
    NoClocks,
    #[error("clock `{0}` is declared more than once")]
    DuplicateClock(String),
    #[error("automaton has no initial location")]
    MissingInitial,
    #[error("location #{index}: name `{name}` is already used")]
    DuplicateLocation { index: usize, name: String },
    #[error("location #{index} (`{name}`): invariant mentions undeclared clock `{clock}`")]
    UnknownInvariantClock { index: usize, name: String, clock: String },
    #[error("edge #{index}: {endpoint} `{name}` is not a location")]
    DanglingEdge { index: usize, endpoint: &'static str, name: String },
    #[error("edge #{index}: guard mentions undeclared clock `{clock}`")]
    UnknownGuardClock { index: usize, clock: String },
    #[error("edge #{index}: resets undeclared clock `{clock}`")]
    UnknownResetClock { index: usize, clock: String },
    #[error("action `{0}` is a numeral")]
    NumeralAction(String),
    #[error("action name is empty")]
    EmptyAction,
}

fn is_numeral(action: &str) -> bool {
    action.trim().parse::<f64>().map(|v| v.is_finite() && v >= 0.0).unwrap_or(false)
}

pub fn validate(ta: &TimedAutomaton) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    if ta.clocks.is_empty() {
        out.push(Diagnostic::NoClocks);
    }
    let mut seen = HashSet::new();
    for clock in &ta.clocks {
        if !seen.insert(clock.as_str()) {
            out.push(Diagnostic::DuplicateClock(clock.clone()));
        }
    }
    let clocks: HashSet<&str> = ta.clocks.iter().map(String::as_str).collect();
    if !ta.locations.iter().any(|l| l.initial) {
        out.push(Diagnostic::MissingInitial);
    }
    let mut names = HashSet::new();
    for (index, loc) in ta.locations.iter().enumerate() {
        if !names.insert(loc.name.as_str()) {
            out.push(Diagnostic::DuplicateLocation { index, name: loc.name.clone() });
        }
        for clock in loc.invariant.clocks() {
            if !clocks.contains(clock) {
                out.push(Diagnostic::UnknownInvariantClock { index, name: loc.name.clone(), clock: clock.to_string() });
            }
        }
    }
    for (index, edge) in ta.edges.iter().enumerate() {
        for (endpoint, name) in [("source", &edge.source), ("target", &edge.target)] {
            if !names.contains(name.as_str()) {
                out.push(Diagnostic::DanglingEdge { index, endpoint, name: name.clone() });
            }
        }
        for clock in edge.guard.clocks() {
            if !clocks.contains(clock) {
                out.push(Diagnostic::UnknownGuardClock { index, clock: clock.to_string() });
            }
        }
        for clock in &edge.resets {
            if !clocks.contains(clock.as_str()) {
                out.push(Diagnostic::UnknownResetClock { index, clock: clock.clone() });
            }
        }
    }
    for action in ta.alphabet() {
        if action.trim().is_empty() {
            out.push(Diagnostic::EmptyAction);
        } else if is_numeral(&action) {
            out.push(Diagnostic::NumeralAction(action));
        }
    }
    out
}

/// Turns an edge whose guard is a disjunction into one edge per disjunct.
///
/// Guards are simplified. With `prune` set, disjuncts that simplify to `false`
/// produce no edge; without it an empty disjunction yields a single
/// `false`-guarded edge.
pub fn split_disjunctive_guard(
    source: &str,
    action: &str,
    guard: &DisjunctSet,
    resets: &BTreeSet<String>,
    target: &str,
    prune: bool,
) -> Vec<Edge> {
    let make = |g: ClockConstraint| Edge {
        source: source.to_string(),
        action: action.to_string(),
        guard: g,
        resets: resets.clone(),
        target: target.to_string(),
    };
    if guard.is_empty() {
        return if prune { Vec::new() } else { vec![make(ClockConstraint::FALSE)] };
    }
    let mut out: Vec<Edge> = Vec::new();
    for d in guard.disjuncts() {
        let g = d.simplify();
        if prune && g.is_canonical_false() {
            continue;
        }
        let e = make(g);
        if !out.contains(&e) {
            out.push(e);
        }
    }
    out
}

/// Compares two automata after renaming the locations of `left` with
/// `rename` (names absent from the map are kept).
///
/// Order of locations, edges and atoms is irrelevant. Returns false when the
/// renaming is not injective on `left`'s locations.
pub fn isomorphic_modulo_renaming(
    left: &TimedAutomaton,
    right: &TimedAutomaton,
    rename: &BTreeMap<String, String>,
) -> bool {
    let rn = |name: &str| rename.get(name).cloned().unwrap_or_else(|| name.to_string());

    let clocks_l: BTreeSet<&String> = left.clocks.iter().collect();
    let clocks_r: BTreeSet<&String> = right.clocks.iter().collect();
    if clocks_l != clocks_r || left.clocks.len() != right.clocks.len() {
        return false;
    }
    if left.alphabet() != right.alphabet() {
        return false;
    }

    type LocKey = (ClockConstraint, bool, bool);
    let locs = |ta: &TimedAutomaton, f: &dyn Fn(&str) -> String| -> Option<BTreeMap<String, LocKey>> {
        let mut map = BTreeMap::new();
        for l in &ta.locations {
            let key = (l.invariant.clone(), l.urgent, l.initial);
            if map.insert(f(&l.name), key).is_some() {
                return None;
            }
        }
        Some(map)
    };
    let (Some(locs_l), Some(locs_r)) = (locs(left, &rn), locs(right, &|s: &str| s.to_string())) else {
        return false;
    };
    if locs_l != locs_r {
        return false;
    }

    let edges_l: BTreeSet<Edge> =
        left.edges.iter().map(|e| Edge { source: rn(&e.source), target: rn(&e.target), ..e.clone() }).collect();
    let edges_r: BTreeSet<Edge> = right.edges.iter().cloned().collect();
    edges_l == edges_r
}

impl fmt::Display for TimedAutomaton {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "clocks: {}", self.clocks.join(", "))?;
        for l in &self.locations {
            let mut flags = Vec::new();
            if l.initial {
                flags.push("initial");
            }
            if l.urgent {
                flags.push("urgent");
            }
            writeln!(f, "location {} [{}] inv: {}", l.name, flags.join(","), l.invariant)?;
        }
        for e in &self.edges {
            let resets: Vec<&str> = e.resets.iter().map(String::as_str).collect();
            writeln!(
                f,
                "edge {} -{}-> {} guard: {} reset: {{{}}}",
                e.source,
                e.action,
                e.target,
                e.guard,
                resets.join(", ")
            )?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn c(s: &str) -> ClockConstraint {
        s.parse().unwrap()
    }

    #[test]
    fn example1_is_valid() {
        assert_eq!(fixtures::example1().validate(), vec![]);
    }

    #[test]
    fn missing_initial_is_reported() {
        let mut ta = fixtures::example1();
        for l in &mut ta.locations {
            l.initial = false;
        }
        assert_eq!(ta.validate(), vec![Diagnostic::MissingInitial]);
    }

    #[test]
    fn dangling_edge_is_reported() {
        let mut ta = fixtures::example1();
        ta.add_edge(Edge::new("l1", "b", ClockConstraint::TRUE, Vec::<String>::new(), "nowhere"));
        assert_eq!(
            ta.validate(),
            vec![Diagnostic::DanglingEdge { index: 1, endpoint: "target", name: "nowhere".into() }]
        );
    }

    #[test]
    fn other_diagnostics() {
        let mut ta = TimedAutomaton::new(Vec::<String>::new());
        ta.add_location(Location::new("a").initial(true).with_invariant(c("x > 1")));
        ta.add_location(Location::new("a"));
        ta.add_edge(Edge::new("a", "1.5", c("y < 2"), ["z"], "a"));
        let diags = ta.validate();
        assert!(diags.contains(&Diagnostic::NoClocks));
        assert!(diags.contains(&Diagnostic::DuplicateLocation { index: 1, name: "a".into() }));
        assert!(diags.contains(&Diagnostic::UnknownInvariantClock { index: 0, name: "a".into(), clock: "x".into() }));
        assert!(diags.contains(&Diagnostic::UnknownGuardClock { index: 0, clock: "y".into() }));
        assert!(diags.contains(&Diagnostic::UnknownResetClock { index: 0, clock: "z".into() }));
        assert!(diags.contains(&Diagnostic::NumeralAction("1.5".into())));
    }

    #[test]
    fn numerals() {
        assert!(is_numeral("0"));
        assert!(is_numeral("2.5"));
        assert!(is_numeral("1e3"));
        assert!(!is_numeral("-1"));
        assert!(!is_numeral("inf"));
        assert!(!is_numeral("a1"));
    }

    #[test]
    fn duplicate_edges_are_dropped() {
        let mut ta = fixtures::example1();
        let e = ta.edges[0].clone();
        ta.add_edge(e);
        assert_eq!(ta.edges.len(), 1);
    }

    #[test]
    fn split_one_edge_per_disjunct() {
        let disj = DisjunctSet::from_iter([c("x > 3"), c("y <= 2")]);
        let edges = split_disjunctive_guard("l", "a", &disj, &BTreeSet::new(), "m", true);
        let guards: Vec<_> = edges.iter().map(|e| e.guard.clone()).collect();
        assert_eq!(guards, vec![c("x > 3"), c("y <= 2")]);
    }

    #[test]
    fn split_empty_disjunction() {
        let empty = DisjunctSet::default();
        assert!(split_disjunctive_guard("l", "a", &empty, &BTreeSet::new(), "m", true).is_empty());
        let unpruned = split_disjunctive_guard("l", "a", &empty, &BTreeSet::new(), "m", false);
        assert_eq!(unpruned.len(), 1);
        assert_eq!(unpruned[0].guard, ClockConstraint::FALSE);
    }

    #[test]
    fn split_prunes_false_disjuncts() {
        let disj = DisjunctSet::from_iter([c("x > 3 && x < 1"), c("y <= 2")]);
        assert_eq!(split_disjunctive_guard("l", "a", &disj, &BTreeSet::new(), "m", true).len(), 1);
        assert_eq!(split_disjunctive_guard("l", "a", &disj, &BTreeSet::new(), "m", false).len(), 2);
    }

    #[test]
    fn split_preserves_enabledness_on_grid() {
        let disj = DisjunctSet::from_iter([c("x > 3 && y < 1"), c("y <= 2"), c("x < 1 && x > 2")]);
        let edges = split_disjunctive_guard("l", "a", &disj, &BTreeSet::new(), "m", true);
        for x in 0..=10u32 {
            for y in 0..=10u32 {
                let v: BTreeMap<String, crate::time::HalfInt> = [
                    ("x".to_string(), crate::time::HalfInt::from_halves(x)),
                    ("y".to_string(), crate::time::HalfInt::from_halves(y)),
                ]
                .into_iter()
                .collect();
                let split = edges.iter().any(|e| e.guard.satisfies(&v).unwrap());
                assert_eq!(split, disj.satisfies(&v).unwrap(), "x={x}/2 y={y}/2");
            }
        }
    }

    #[test]
    fn comparison_examples() {
        let ex1 = fixtures::example1();
        let ex6 = fixtures::example6();
        assert!(isomorphic_modulo_renaming(&ex1, &ex1, &BTreeMap::new()));
        assert!(!isomorphic_modulo_renaming(&ex1, &ex6, &BTreeMap::new()));
        let mut reordered = ex6.clone();
        reordered.locations.reverse();
        reordered.edges.reverse();
        assert!(isomorphic_modulo_renaming(&ex6, &reordered, &BTreeMap::new()));
        assert!(isomorphic_modulo_renaming(&reordered, &ex6, &BTreeMap::new()));
    }

    #[test]
    fn non_injective_renaming_is_rejected() {
        let ex1 = fixtures::example1();
        let rename: BTreeMap<String, String> = [("l0".to_string(), "l1".to_string())].into_iter().collect();
        assert!(!isomorphic_modulo_renaming(&ex1, &ex1, &rename));
    }

    #[test]
    fn max_constant_examples() {
        assert_eq!(fixtures::example1().max_constant(), 1);
        let mut ta = TimedAutomaton::new(["x", "y"]);
        ta.add_location(Location::new("a").initial(true));
        assert_eq!(ta.max_constant(), 0);
        ta.add_edge(Edge::new("a", "a", c("x <= 3"), Vec::<String>::new(), "a"));
        ta.add_edge(Edge::new("a", "b", c("y > 5"), Vec::<String>::new(), "a"));
        assert_eq!(ta.max_constant(), 5);
    }
}
