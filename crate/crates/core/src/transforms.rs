//! The INV, URG and PUR constructions and the state maps that witness their
//! correctness.
//!
//! * [`inv_transform`] turns an automaton without urgent locations, read under
//!   the weak-invariant semantics, into one read under the baseline semantics.
//!   Every location gets an urgent copy that stands for "the invariant is
//!   violated here".
//! * [`urg_transform`] goes the other way: urgent locations get a `false`
//!   invariant and guards are strengthened so no edge enters a violating state.
//! * [`pur_transform`] replaces initial locations whose invariant fails at the
//!   zero valuation by fresh urgent copies, so that every reachable state
//!   satisfies its invariant.

use std::collections::{BTreeMap, BTreeSet};

use crate::automata::{split_disjunctive_guard, Diagnostic, Edge, Location, TimedAutomaton};
use crate::constraints::ClockConstraint;
use crate::semantics::TTSState;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TransformError {
    #[error("automaton has urgent locations: {}", .0.join(", "))]
    UrgentLocations(Vec<String>),
    #[error("invalid automaton: {}", .0.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Diagnostic>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TransformOptions {
    /// Drop edges whose guard simplifies to `false`.
    pub prune_false: bool,
}

impl Default for TransformOptions {
    fn default() -> Self {
        TransformOptions { prune_false: true }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransformResult {
    pub automaton: TimedAutomaton,
    /// Fresh location name to the original it copies.
    pub renaming: BTreeMap<String, String>,
    pub pruned_edges: usize,
}

impl TransformResult {
    /// Original location name to its fresh copy.
    pub fn copies(&self) -> BTreeMap<String, String> {
        self.renaming.iter().map(|(fresh, orig)| (orig.clone(), fresh.clone())).collect()
    }
}

fn check_valid(ta: &TimedAutomaton) -> Result<(), TransformError> {
    let diags = ta.validate();
    if diags.is_empty() {
        Ok(())
    } else {
        Err(TransformError::Invalid(diags))
    }
}

/// Picks `<name>__u` for each original, suffixed with a counter on clashes.
fn fresh_names<'a>(ta: &TimedAutomaton, originals: impl IntoIterator<Item = &'a str>) -> BTreeMap<String, String> {
    let mut taken: BTreeSet<String> = ta.locations.iter().map(|l| l.name.clone()).collect();
    let mut copies = BTreeMap::new();
    for orig in originals {
        let base = format!("{orig}__u");
        let mut name = base.clone();
        let mut n = 2;
        while taken.contains(&name) {
            name = format!("{base}{n}");
            n += 1;
        }
        taken.insert(name.clone());
        copies.insert(orig.to_string(), name);
    }
    copies
}

fn invert(copies: &BTreeMap<String, String>) -> BTreeMap<String, String> {
    copies.iter().map(|(o, f)| (f.clone(), o.clone())).collect()
}

pub fn inv_transform(ta: &TimedAutomaton, opts: TransformOptions) -> Result<TransformResult, TransformError> {
    check_valid(ta)?;
    let urgent: Vec<String> = ta.urgent_locations().map(|l| l.name.clone()).collect();
    if !urgent.is_empty() {
        return Err(TransformError::UrgentLocations(urgent));
    }
    let copies = fresh_names(ta, ta.locations.iter().map(|l| l.name.as_str()));

    let mut out = TimedAutomaton { clocks: ta.clocks.clone(), actions: ta.actions.clone(), ..Default::default() };
    for l in &ta.locations {
        out.add_location(Location { initial: l.initial && l.invariant.holds_at_zero(), ..l.clone() });
    }
    for l in &ta.locations {
        out.add_location(
            Location::new(copies[&l.name].clone()).urgent(true).initial(l.initial && !l.invariant.holds_at_zero()),
        );
    }

    let mut pruned = 0;
    for e in &ta.edges {
        let target_inv = &ta.location(&e.target).expect("validated").invariant;
        let pred = target_inv.reset_pred(&e.resets);
        let enter = e.guard.and(&pred).simplify();
        let violate = pred.negate_to_disjuncts().and(&e.guard);
        let (src, src_u) = (e.source.as_str(), copies[&e.source].as_str());
        let (dst, dst_u) = (e.target.as_str(), copies[&e.target].as_str());
        for source in [src, src_u] {
            if opts.prune_false && enter.is_canonical_false() {
                pruned += 1;
            } else {
                out.add_edge(Edge {
                    source: source.to_string(),
                    action: e.action.clone(),
                    guard: enter.clone(),
                    resets: e.resets.clone(),
                    target: dst.to_string(),
                });
            }
            let literal = split_disjunctive_guard(source, &e.action, &violate, &e.resets, dst_u, false);
            let kept = split_disjunctive_guard(source, &e.action, &violate, &e.resets, dst_u, opts.prune_false);
            pruned += literal.len() - kept.len();
            for edge in kept {
                out.add_edge(edge);
            }
        }
    }
    Ok(TransformResult { automaton: out, renaming: invert(&copies), pruned_edges: pruned })
}

pub fn urg_transform(ta: &TimedAutomaton, opts: TransformOptions) -> Result<TransformResult, TransformError> {
    check_valid(ta)?;
    let mut out = TimedAutomaton { clocks: ta.clocks.clone(), actions: ta.actions.clone(), ..Default::default() };
    for l in &ta.locations {
        let invariant = if l.urgent { ClockConstraint::FALSE } else { l.invariant.clone() };
        out.add_location(Location { invariant, urgent: false, ..l.clone() });
    }
    let mut pruned = 0;
    for e in &ta.edges {
        let target_inv = &ta.location(&e.target).expect("validated").invariant;
        let guard = e.guard.and(&target_inv.reset_pred(&e.resets)).simplify();
        if opts.prune_false && guard.is_canonical_false() {
            pruned += 1;
            continue;
        }
        out.add_edge(Edge { guard, ..e.clone() });
    }
    Ok(TransformResult { automaton: out, renaming: BTreeMap::new(), pruned_edges: pruned })
}

pub fn pur_transform(ta: &TimedAutomaton) -> Result<TransformResult, TransformError> {
    check_valid(ta)?;
    let bad: Vec<&str> =
        ta.initial_locations().filter(|l| !l.invariant.holds_at_zero()).map(|l| l.name.as_str()).collect();
    let copies = fresh_names(ta, bad.iter().copied());

    let mut out = TimedAutomaton { clocks: ta.clocks.clone(), actions: ta.actions.clone(), ..Default::default() };
    for l in &ta.locations {
        out.add_location(Location { initial: l.initial && !copies.contains_key(&l.name), ..l.clone() });
    }
    for name in &bad {
        out.add_location(Location::new(copies[*name].clone()).urgent(true).initial(true));
    }
    for e in &ta.edges {
        out.add_edge(e.clone());
    }
    for e in &ta.edges {
        if let Some(fresh) = copies.get(&e.source) {
            out.add_edge(Edge { source: fresh.clone(), ..e.clone() });
        }
    }
    Ok(TransformResult { automaton: out, renaming: invert(&copies), pruned_edges: 0 })
}

/// Maps states of the weak-invariant system of an automaton to states of the
/// baseline system of its INV translation: a state violating its invariant
/// moves to the urgent copy of its location.
#[derive(Clone, Debug)]
pub struct InvStateMap {
    invariants: BTreeMap<String, ClockConstraint>,
    copies: BTreeMap<String, String>,
}

impl InvStateMap {
    pub fn new(ta: &TimedAutomaton, result: &TransformResult) -> Self {
        InvStateMap {
            invariants: ta.locations.iter().map(|l| (l.name.clone(), l.invariant.clone())).collect(),
            copies: result.copies(),
        }
    }

    /// `None` when the location is unknown or the valuation misses a clock.
    pub fn map(&self, s: &TTSState) -> Option<TTSState> {
        let inv = self.invariants.get(&*s.location)?;
        if inv.satisfies(&s.valuation).ok()? {
            Some(s.clone())
        } else {
            Some(TTSState::new(self.copies.get(&*s.location)?.as_str(), s.valuation.clone()))
        }
    }
}

/// Maps states of the baseline system of an automaton to states of the
/// baseline system of its PUR translation: an initial state violating its
/// invariant moves to the fresh urgent copy.
#[derive(Clone, Debug)]
pub struct PurStateMap {
    locations: BTreeSet<String>,
    copies: BTreeMap<String, String>,
}

impl PurStateMap {
    pub fn new(ta: &TimedAutomaton, result: &TransformResult) -> Self {
        PurStateMap { locations: ta.locations.iter().map(|l| l.name.clone()).collect(), copies: result.copies() }
    }

    pub fn map(&self, s: &TTSState) -> Option<TTSState> {
        if !self.locations.contains(&*s.location) {
            return None;
        }
        match self.copies.get(&*s.location) {
            Some(fresh) if s.valuation.is_zero() => Some(TTSState::new(fresh.as_str(), s.valuation.clone())),
            _ => Some(s.clone()),
        }
    }
}

pub fn inv_state_map(ta: &TimedAutomaton, result: &TransformResult, s: &TTSState) -> Option<TTSState> {
    InvStateMap::new(ta, result).map(s)
}

pub fn pur_state_map(ta: &TimedAutomaton, result: &TransformResult, s: &TTSState) -> Option<TTSState> {
    PurStateMap::new(ta, result).map(s)
}
