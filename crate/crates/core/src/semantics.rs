//! Clock valuations and the two transition-system semantics of a timed
//! automaton, explored over a finite half-integer grid.
//!
//! * [`SemanticsKind::Baseline`]: no transition may enter a state whose
//!   invariant is violated; urgent locations admit no delay at all.
//! * [`SemanticsKind::WeakInvariant`]: action transitions may enter violating
//!   states, which then cannot let time pass. The urgent flag is ignored
//!   here; urgency only restricts delays in the baseline semantics.
//!
//! In both semantics initial states may violate their invariant, and action
//! transitions never check the source invariant.
//!
//! Delays are sampled at step 1/2 and clocks are clamped at a ceiling strictly
//! above every constant in the automaton. Valuations that agree up to the
//! ceiling satisfy the same atoms, so the finite system reproduces every
//! constraint-relevant behaviour on the grid. It is a testing oracle for the
//! dense-time semantics, not a decision procedure.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;
use std::sync::Arc;

use crate::automata::{Diagnostic, TimedAutomaton};
use crate::constraints::{ClockConstraint, ClockLookup, Rel};
use crate::time::HalfInt;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SemanticsError {
    #[error("invalid automaton: {}", join_diagnostics(.0))]
    InvalidAutomaton(Vec<Diagnostic>),
    #[error("unknown location `{0}`")]
    UnknownLocation(String),
    #[error("valuation clocks [{found}] do not match automaton clocks [{expected}]")]
    ClockDomain { expected: String, found: String },
    #[error("unknown clock `{0}`")]
    UnknownClock(String),
    #[error("clock ceiling {cap} must exceed the largest constant {max_constant}")]
    CapTooSmall { cap: u32, max_constant: u32 },
    #[error("delay sample {0} lies above the clock ceiling")]
    DelayAboveCap(HalfInt),
    #[error("state budget must be positive")]
    EmptyBudget,
}

fn join_diagnostics(d: &[Diagnostic]) -> String {
    d.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
}

/// Exact clock values over a fixed, ordered clock domain.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct ClockValuation {
    clocks: Arc<[String]>,
    values: Vec<HalfInt>,
}

impl std::hash::Hash for ClockValuation {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.values.hash(state);
    }
}

impl ClockValuation {
    /// The valuation assigning 0 to every clock.
    pub fn zero(clocks: Arc<[String]>) -> Self {
        let values = vec![HalfInt::ZERO; clocks.len()];
        ClockValuation { clocks, values }
    }

    pub fn from_values(clocks: Arc<[String]>, values: Vec<HalfInt>) -> Self {
        assert_eq!(clocks.len(), values.len(), "one value per clock");
        ClockValuation { clocks, values }
    }

    pub fn clocks(&self) -> &Arc<[String]> {
        &self.clocks
    }

    pub fn values(&self) -> &[HalfInt] {
        &self.values
    }

    pub fn get(&self, clock: &str) -> Option<HalfInt> {
        self.clocks.iter().position(|c| c == clock).map(|i| self.values[i])
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| *v == HalfInt::ZERO)
    }

    /// `self[resets := 0]`.
    pub fn apply_reset(&self, resets: &BTreeSet<String>) -> Result<ClockValuation, SemanticsError> {
        let mut out = self.clone();
        for clock in resets {
            let i = self
                .clocks
                .iter()
                .position(|c| c == clock)
                .ok_or_else(|| SemanticsError::UnknownClock(clock.clone()))?;
            out.values[i] = HalfInt::ZERO;
        }
        Ok(out)
    }

    /// `self + delay`, each clock clamped at `cap`.
    pub fn advance(&self, delay: HalfInt, cap: HalfInt) -> ClockValuation {
        let values = self.values.iter().map(|v| (*v + delay).min(cap)).collect();
        ClockValuation { clocks: self.clocks.clone(), values }
    }
}

impl ClockLookup for ClockValuation {
    fn value_of(&self, clock: &str) -> Option<HalfInt> {
        self.get(clock)
    }
}

impl fmt::Display for ClockValuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, (c, v)) in self.clocks.iter().zip(&self.values).enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{c}:={v}")?;
        }
        f.write_str("]")
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TTSState {
    pub location: Arc<str>,
    pub valuation: ClockValuation,
}

impl TTSState {
    pub fn new(location: impl Into<Arc<str>>, valuation: ClockValuation) -> Self {
        TTSState { location: location.into(), valuation }
    }
}

impl fmt::Display for TTSState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.location, self.valuation)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TransitionLabel {
    Action(Arc<str>),
    Delay(HalfInt),
}

impl fmt::Display for TransitionLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TransitionLabel::Action(a) => f.write_str(a),
            TransitionLabel::Delay(d) => write!(f, "delay({d})"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SemanticsKind {
    Baseline,
    WeakInvariant,
}

impl fmt::Display for SemanticsKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SemanticsKind::Baseline => "baseline",
            SemanticsKind::WeakInvariant => "weak-invariant",
        })
    }
}

pub const DEFAULT_MAX_STATES: usize = 200_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExploreConfig {
    /// Clock ceiling in whole time units.
    pub cap: u32,
    pub max_states: usize,
    pub delay_samples: Vec<HalfInt>,
}

impl ExploreConfig {
    /// Ceiling one above the largest constant of any of the automata, every
    /// grid delay up to the ceiling.
    pub fn shared(automata: &[&TimedAutomaton]) -> Self {
        let max = automata.iter().map(|ta| ta.max_constant()).max().unwrap_or(0);
        Self::with_cap(max + 1)
    }

    pub fn for_automaton(ta: &TimedAutomaton) -> Self {
        Self::shared(&[ta])
    }

    pub fn with_cap(cap: u32) -> Self {
        let delay_samples = HalfInt::grid_up_to(HalfInt::from_int(cap)).collect();
        ExploreConfig { cap, max_states: DEFAULT_MAX_STATES, delay_samples }
    }

    pub fn cap_value(&self) -> HalfInt {
        HalfInt::from_int(self.cap)
    }

    fn check(&self, ta: &TimedAutomaton) -> Result<(), SemanticsError> {
        let max_constant = ta.max_constant();
        if self.cap <= max_constant {
            return Err(SemanticsError::CapTooSmall { cap: self.cap, max_constant });
        }
        if self.max_states == 0 {
            return Err(SemanticsError::EmptyBudget);
        }
        if let Some(d) = self.delay_samples.iter().find(|d| **d > self.cap_value()) {
            return Err(SemanticsError::DelayAboveCap(*d));
        }
        Ok(())
    }
}

/// Constraint with atoms resolved to clock indices and bounds in half-units.
#[derive(Clone, Debug)]
struct IndexedConstraint {
    atoms: Vec<(usize, Rel, u32)>,
    never: bool,
}

impl IndexedConstraint {
    fn new(constraint: &ClockConstraint, clocks: &[String]) -> Result<Self, SemanticsError> {
        let mut atoms = Vec::new();
        for a in constraint.atoms() {
            let i = clocks
                .iter()
                .position(|c| *c == a.clock)
                .ok_or_else(|| SemanticsError::UnknownClock(a.clock.clone()))?;
            atoms.push((i, a.rel, a.bound * 2));
        }
        Ok(IndexedConstraint { atoms, never: constraint.is_canonical_false() })
    }

    fn holds(&self, values: &[HalfInt]) -> bool {
        !self.never
            && self.atoms.iter().all(|&(i, rel, c)| {
                let v = values[i].halves();
                match rel {
                    Rel::Lt => v < c,
                    Rel::Le => v <= c,
                    Rel::Gt => v > c,
                    Rel::Ge => v >= c,
                }
            })
    }
}

#[derive(Clone, Debug)]
struct IndexedEdge {
    action: Arc<str>,
    guard: IndexedConstraint,
    resets: Vec<usize>,
    target: usize,
}

/// An automaton compiled for fast successor generation under one semantics.
#[derive(Clone, Debug)]
pub struct SuccessorGenerator {
    kind: SemanticsKind,
    clocks: Arc<[String]>,
    names: Vec<Arc<str>>,
    index: HashMap<Arc<str>, usize>,
    invariants: Vec<IndexedConstraint>,
    urgent: Vec<bool>,
    initial: Vec<usize>,
    out: Vec<Vec<IndexedEdge>>,
    cap: HalfInt,
    delays: Vec<HalfInt>,
}

impl SuccessorGenerator {
    pub fn new(ta: &TimedAutomaton, kind: SemanticsKind, cfg: &ExploreConfig) -> Result<Self, SemanticsError> {
        let diags = ta.validate();
        if !diags.is_empty() {
            return Err(SemanticsError::InvalidAutomaton(diags));
        }
        cfg.check(ta)?;
        let clocks: Arc<[String]> = ta.clocks.clone().into();
        let names: Vec<Arc<str>> = ta.locations.iter().map(|l| Arc::from(l.name.as_str())).collect();
        let index: HashMap<Arc<str>, usize> = names.iter().cloned().enumerate().map(|(i, n)| (n, i)).collect();
        let invariants = ta
            .locations
            .iter()
            .map(|l| IndexedConstraint::new(&l.invariant, &clocks))
            .collect::<Result<Vec<_>, _>>()?;
        let mut out = vec![Vec::new(); names.len()];
        for e in &ta.edges {
            let resets = e
                .resets
                .iter()
                .map(|r| clocks.iter().position(|c| c == r).ok_or_else(|| SemanticsError::UnknownClock(r.clone())))
                .collect::<Result<Vec<_>, _>>()?;
            out[index[e.source.as_str()]].push(IndexedEdge {
                action: Arc::from(e.action.as_str()),
                guard: IndexedConstraint::new(&e.guard, &clocks)?,
                resets,
                target: index[e.target.as_str()],
            });
        }
        Ok(SuccessorGenerator {
            kind,
            clocks,
            index,
            invariants,
            urgent: ta.locations.iter().map(|l| l.urgent).collect(),
            initial: ta.locations.iter().enumerate().filter(|(_, l)| l.initial).map(|(i, _)| i).collect(),
            names,
            out,
            cap: cfg.cap_value(),
            delays: cfg.delay_samples.clone(),
        })
    }

    pub fn kind(&self) -> SemanticsKind {
        self.kind
    }

    pub fn clocks(&self) -> &Arc<[String]> {
        &self.clocks
    }

    pub fn location_names(&self) -> &[Arc<str>] {
        &self.names
    }

    pub fn initial_states(&self) -> Vec<TTSState> {
        let zero = ClockValuation::zero(self.clocks.clone());
        self.initial.iter().map(|&i| TTSState::new(self.names[i].clone(), zero.clone())).collect()
    }

    fn clamp_add(&self, values: &[HalfInt], delay: HalfInt) -> Vec<HalfInt> {
        values.iter().map(|v| (*v + delay).min(self.cap)).collect()
    }

    fn raw_successors(&self, loc: usize, values: &[HalfInt]) -> Vec<(TransitionLabel, usize, Vec<HalfInt>)> {
        let mut out = Vec::new();
        let invariant = &self.invariants[loc];
        let delay_blocked = self.kind == SemanticsKind::Baseline && self.urgent[loc];
        if !delay_blocked {
            // Smallest sampled instant violating the invariant; delays reaching
            // it are disabled.
            let horizon = self.delays.iter().copied().max().unwrap_or(HalfInt::ZERO);
            let first_violation = HalfInt::grid_up_to(horizon).find(|k| !invariant.holds(&self.clamp_add(values, *k)));
            for &delay in &self.delays {
                if first_violation.is_some_and(|k| k <= delay) {
                    continue;
                }
                out.push((TransitionLabel::Delay(delay), loc, self.clamp_add(values, delay)));
            }
        }
        for edge in &self.out[loc] {
            if !edge.guard.holds(values) {
                continue;
            }
            let mut next = values.to_vec();
            for &r in &edge.resets {
                next[r] = HalfInt::ZERO;
            }
            if self.kind == SemanticsKind::Baseline && !self.invariants[edge.target].holds(&next) {
                continue;
            }
            out.push((TransitionLabel::Action(edge.action.clone()), edge.target, next));
        }
        let mut seen = std::collections::HashSet::new();
        out.retain(|t| seen.insert(t.clone()));
        out
    }

    fn locate(&self, s: &TTSState) -> Result<usize, SemanticsError> {
        if s.valuation.clocks() != &self.clocks {
            return Err(SemanticsError::ClockDomain {
                expected: self.clocks.join(","),
                found: s.valuation.clocks().join(","),
            });
        }
        self.index.get(&s.location).copied().ok_or_else(|| SemanticsError::UnknownLocation(s.location.to_string()))
    }

    /// Outgoing transitions of `s`: sampled delays first, then edges in
    /// automaton order, without duplicates.
    pub fn successors(&self, s: &TTSState) -> Result<Vec<(TransitionLabel, TTSState)>, SemanticsError> {
        let loc = self.locate(s)?;
        Ok(self
            .raw_successors(loc, s.valuation.values())
            .into_iter()
            .map(|(label, l, values)| {
                (label, TTSState::new(self.names[l].clone(), ClockValuation::from_values(self.clocks.clone(), values)))
            })
            .collect())
    }

    /// Whether `s`'s valuation satisfies its location invariant.
    pub fn satisfies_invariant(&self, s: &TTSState) -> Result<bool, SemanticsError> {
        let loc = self.locate(s)?;
        Ok(self.invariants[loc].holds(s.valuation.values()))
    }

    /// Every state of the grid: locations in automaton order, valuations in
    /// lexicographic order.
    pub fn grid_size(&self) -> u128 {
        let per_clock = self.cap.halves() as u128 + 1;
        (self.names.len() as u128) * per_clock.pow(self.clocks.len() as u32)
    }

    /// The `n`-th grid state in the order of [`Self::grid_size`].
    pub fn grid_state(&self, mut n: u128) -> Option<TTSState> {
        if n >= self.grid_size() {
            return None;
        }
        let per_clock = self.cap.halves() as u128 + 1;
        let mut values = vec![HalfInt::ZERO; self.clocks.len()];
        for v in values.iter_mut().rev() {
            *v = HalfInt::from_halves((n % per_clock) as u32);
            n /= per_clock;
        }
        let loc = n as usize;
        Some(TTSState::new(self.names[loc].clone(), ClockValuation::from_values(self.clocks.clone(), values)))
    }

    pub fn explore(&self, max_states: usize) -> DiscretizedTTS {
        let mut ids: HashMap<(usize, Vec<HalfInt>), usize> = HashMap::new();
        let mut raw: Vec<(usize, Vec<HalfInt>)> = Vec::new();
        let mut out: Vec<Vec<(TransitionLabel, usize)>> = Vec::new();
        let mut queue = VecDeque::new();
        let mut truncated = false;
        let mut initial = Vec::new();
        let zero = vec![HalfInt::ZERO; self.clocks.len()];
        for &l in &self.initial {
            let key = (l, zero.clone());
            if ids.contains_key(&key) {
                continue;
            }
            if raw.len() >= max_states {
                truncated = true;
                break;
            }
            ids.insert(key.clone(), raw.len());
            initial.push(raw.len());
            queue.push_back(raw.len());
            raw.push(key);
            out.push(Vec::new());
        }
        while let Some(id) = queue.pop_front() {
            let (loc, values) = raw[id].clone();
            for (label, l, next) in self.raw_successors(loc, &values) {
                let key = (l, next);
                let target = match ids.get(&key) {
                    Some(&t) => t,
                    None => {
                        if raw.len() >= max_states {
                            truncated = true;
                            continue;
                        }
                        let t = raw.len();
                        ids.insert(key.clone(), t);
                        raw.push(key);
                        out.push(Vec::new());
                        queue.push_back(t);
                        t
                    }
                };
                out[id].push((label, target));
            }
        }
        let states: Vec<TTSState> = raw
            .into_iter()
            .map(|(l, values)| {
                TTSState::new(self.names[l].clone(), ClockValuation::from_values(self.clocks.clone(), values))
            })
            .collect();
        DiscretizedTTS::from_parts(self.kind, states, initial, out, truncated)
    }
}

/// Initial states `(l, 0)` for every initial location, whether or not the
/// zero valuation satisfies the invariant.
pub fn initial_states(ta: &TimedAutomaton) -> Vec<TTSState> {
    let zero = ClockValuation::zero(ta.clocks.clone().into());
    ta.initial_locations().map(|l| TTSState::new(l.name.as_str(), zero.clone())).collect()
}

pub fn apply_reset(valuation: &ClockValuation, resets: &BTreeSet<String>) -> Result<ClockValuation, SemanticsError> {
    valuation.apply_reset(resets)
}

pub fn advance(valuation: &ClockValuation, delay: HalfInt, cap: HalfInt) -> ClockValuation {
    valuation.advance(delay, cap)
}

pub fn successors(
    ta: &TimedAutomaton,
    kind: SemanticsKind,
    state: &TTSState,
    cfg: &ExploreConfig,
) -> Result<Vec<(TransitionLabel, TTSState)>, SemanticsError> {
    SuccessorGenerator::new(ta, kind, cfg)?.successors(state)
}

/// Breadth-first closure of the initial states, stopping at
/// `cfg.max_states` with [`DiscretizedTTS::truncated`] set.
pub fn explore(
    ta: &TimedAutomaton,
    kind: SemanticsKind,
    cfg: &ExploreConfig,
) -> Result<DiscretizedTTS, SemanticsError> {
    Ok(SuccessorGenerator::new(ta, kind, cfg)?.explore(cfg.max_states))
}

/// A finite transition system. States are numbered in discovery order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiscretizedTTS {
    pub kind: SemanticsKind,
    states: Vec<TTSState>,
    index: HashMap<TTSState, usize>,
    initial: Vec<usize>,
    out: Vec<Vec<(TransitionLabel, usize)>>,
    /// Set when exploration stopped at the state budget.
    pub truncated: bool,
}

impl DiscretizedTTS {
    /// Builds a system from explicit parts, dropping duplicate transitions.
    pub fn from_parts(
        kind: SemanticsKind,
        states: Vec<TTSState>,
        initial: Vec<usize>,
        mut out: Vec<Vec<(TransitionLabel, usize)>>,
        truncated: bool,
    ) -> Self {
        assert_eq!(states.len(), out.len(), "one successor list per state");
        for list in &mut out {
            let mut seen = std::collections::HashSet::new();
            list.retain(|t| seen.insert(t.clone()));
            assert!(list.iter().all(|(_, t)| *t < states.len()), "transition target out of range");
        }
        assert!(initial.iter().all(|i| *i < states.len()), "initial state out of range");
        let index = states.iter().cloned().enumerate().map(|(i, s)| (s, i)).collect();
        DiscretizedTTS { kind, states, index, initial, out, truncated }
    }

    pub fn states(&self) -> &[TTSState] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn state(&self, id: usize) -> &TTSState {
        &self.states[id]
    }

    pub fn id_of(&self, s: &TTSState) -> Option<usize> {
        self.index.get(s).copied()
    }

    pub fn contains(&self, s: &TTSState) -> bool {
        self.index.contains_key(s)
    }

    pub fn initial(&self) -> &[usize] {
        &self.initial
    }

    pub fn is_initial(&self, id: usize) -> bool {
        self.initial.contains(&id)
    }

    pub fn out(&self, id: usize) -> &[(TransitionLabel, usize)] {
        &self.out[id]
    }

    pub fn transitions(&self) -> impl Iterator<Item = (usize, &TransitionLabel, usize)> + '_ {
        self.out.iter().enumerate().flat_map(|(s, list)| list.iter().map(move |(l, t)| (s, l, *t)))
    }

    pub fn transition_count(&self) -> usize {
        self.out.iter().map(Vec::len).sum()
    }
}
