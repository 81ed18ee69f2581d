//! Isomorphism checking between discretized transition systems.
//!
//! Two independent routes are provided: [`check_witness_isomorphism`]
//! verifies a given state map, and [`search_isomorphism`] looks for a
//! bijection from scratch (colour refinement followed by backtracking).
//! [`check_theorem`] wires them to the three transformations.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::automata::TimedAutomaton;
use crate::semantics::{
    DiscretizedTTS, ExploreConfig, SemanticsError, SemanticsKind, SuccessorGenerator, TTSState, TransitionLabel,
};
use crate::transforms::{
    inv_transform, pur_transform, urg_transform, InvStateMap, PurStateMap, TransformError, TransformOptions,
    TransformResult,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Isomorphic,
    NotIsomorphic,
    InconclusiveBudget,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Isomorphic => "isomorphic",
            Verdict::NotIsomorphic => "not-isomorphic",
            Verdict::InconclusiveBudget => "inconclusive-budget",
        })
    }
}

/// Why two systems were found to differ.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Mismatch {
    StateCount {
        left: usize,
        right: usize,
    },
    TransitionCount {
        left: usize,
        right: usize,
    },
    InitialCount {
        left: usize,
        right: usize,
    },
    /// The image of a left state is not a state of the right system.
    ImageMissing {
        image: TTSState,
    },
    /// Two left states share an image.
    NotInjective {
        other: TTSState,
        image: TTSState,
    },
    /// A left initial state maps to a non-initial state, or vice versa.
    InitialMismatch {
        image: TTSState,
    },
    /// A right initial state has no initial preimage.
    InitialNotCovered,
    OutDegree {
        left: usize,
        right: usize,
    },
    /// A transition of the left state has no counterpart from the image.
    MissingTransition {
        target: TTSState,
    },
    /// The image has a transition with no counterpart on the left.
    ExtraTransition {
        target: TTSState,
    },
    /// A right state is not the image of any left state.
    NotSurjective,
    /// Colour refinement separates the systems.
    ColourClass {
        left: usize,
        right: usize,
    },
    /// Pointwise successor sets differ at a sampled state.
    SuccessorMismatch {
        left: usize,
        right: usize,
    },
}

impl fmt::Display for Mismatch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mismatch::StateCount { left, right } => write!(f, "state count {left} vs {right}"),
            Mismatch::TransitionCount { left, right } => write!(f, "transition count {left} vs {right}"),
            Mismatch::InitialCount { left, right } => write!(f, "initial state count {left} vs {right}"),
            Mismatch::ImageMissing { image } => write!(f, "image {image} is not a state of the right system"),
            Mismatch::NotInjective { other, image } => write!(f, "shares image {image} with {other}"),
            Mismatch::InitialMismatch { image } => write!(f, "initial status differs from image {image}"),
            Mismatch::InitialNotCovered => f.write_str("right initial state has no initial preimage"),
            Mismatch::OutDegree { left, right } => write!(f, "out-degree {left} vs {right}"),
            Mismatch::MissingTransition { target } => write!(f, "no matching transition to {target} on the right"),
            Mismatch::ExtraTransition { target } => write!(f, "right transition to {target} has no preimage"),
            Mismatch::NotSurjective => f.write_str("right state is not an image"),
            Mismatch::ColourClass { left, right } => write!(f, "refinement class sizes {left} vs {right}"),
            Mismatch::SuccessorMismatch { left, right } => {
                write!(f, "successor sets differ ({left} vs {right} transitions)")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Counterexample {
    /// The offending state; on the left unless the reason concerns the right
    /// system only (`NotSurjective`, `InitialNotCovered`).
    pub state: Option<TTSState>,
    pub label: Option<TransitionLabel>,
    pub reason: Mismatch,
}

impl fmt::Display for Counterexample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.state {
            Some(s) => write!(f, "at {s}")?,
            None => f.write_str("globally")?,
        }
        if let Some(l) = &self.label {
            write!(f, " on {l}")?;
        }
        write!(f, ": {}", self.reason)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IsomorphismReport {
    pub verdict: Verdict,
    /// Left state id to right state id, present when isomorphic.
    pub witness: Option<Vec<usize>>,
    pub counterexample: Option<Counterexample>,
}

impl IsomorphismReport {
    fn isomorphic(witness: Vec<usize>) -> Self {
        IsomorphismReport { verdict: Verdict::Isomorphic, witness: Some(witness), counterexample: None }
    }

    fn differ(state: Option<TTSState>, label: Option<TransitionLabel>, reason: Mismatch) -> Self {
        IsomorphismReport {
            verdict: Verdict::NotIsomorphic,
            witness: None,
            counterexample: Some(Counterexample { state, label, reason }),
        }
    }

    fn inconclusive() -> Self {
        IsomorphismReport { verdict: Verdict::InconclusiveBudget, witness: None, counterexample: None }
    }

    pub fn is_isomorphic(&self) -> bool {
        self.verdict == Verdict::Isomorphic
    }
}

impl fmt::Display for IsomorphismReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "verdict: {}", self.verdict)?;
        if let Some(w) = &self.witness {
            writeln!(f, "witness-size: {}", w.len())?;
        }
        if let Some(c) = &self.counterexample {
            writeln!(f, "counterexample: {c}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EquivalenceError {
    #[error("state map is undefined on {0}")]
    NotTotal(TTSState),
    #[error("precondition violated: {0}")]
    Precondition(TransformError),
    #[error(transparent)]
    Transform(TransformError),
    #[error(transparent)]
    Semantics(#[from] SemanticsError),
}

/// Verifies that `f` is an isomorphism from `left` onto `right`.
///
/// Checks run in this order: initial states, then every left state in
/// discovery order (image exists, injectivity, outgoing transitions), then
/// surjectivity. The first failure is reported.
pub fn check_witness_isomorphism(
    left: &DiscretizedTTS,
    right: &DiscretizedTTS,
    f: impl Fn(&TTSState) -> Option<TTSState>,
) -> Result<IsomorphismReport, EquivalenceError> {
    if left.truncated || right.truncated {
        return Ok(IsomorphismReport::inconclusive());
    }
    let images: Vec<TTSState> = left
        .states()
        .iter()
        .map(|s| f(s).ok_or_else(|| EquivalenceError::NotTotal(s.clone())))
        .collect::<Result<_, _>>()?;
    let ids: Vec<Option<usize>> = images.iter().map(|s| right.id_of(s)).collect();

    for &q in left.initial() {
        if !ids[q].is_some_and(|r| right.is_initial(r)) {
            let reason = Mismatch::InitialMismatch { image: images[q].clone() };
            return Ok(IsomorphismReport::differ(Some(left.state(q).clone()), None, reason));
        }
    }
    let covered: HashSet<usize> = left.initial().iter().filter_map(|&q| ids[q]).collect();
    if let Some(&r) = right.initial().iter().find(|r| !covered.contains(r)) {
        return Ok(IsomorphismReport::differ(Some(right.state(r).clone()), None, Mismatch::InitialNotCovered));
    }

    let mut preimage: HashMap<usize, usize> = HashMap::new();
    for q in 0..left.len() {
        let state = || Some(left.state(q).clone());
        let Some(r) = ids[q] else {
            return Ok(IsomorphismReport::differ(state(), None, Mismatch::ImageMissing { image: images[q].clone() }));
        };
        if let Some(&other) = preimage.get(&r) {
            let reason = Mismatch::NotInjective { other: left.state(other).clone(), image: images[q].clone() };
            return Ok(IsomorphismReport::differ(state(), None, reason));
        }
        preimage.insert(r, q);
        if !left.is_initial(q) && right.is_initial(r) {
            let reason = Mismatch::InitialMismatch { image: images[q].clone() };
            return Ok(IsomorphismReport::differ(state(), None, reason));
        }

        let mapped: Vec<(&TransitionLabel, Option<usize>, usize)> =
            left.out(q).iter().map(|(l, t)| (l, ids[*t], *t)).collect();
        let theirs: HashSet<(&TransitionLabel, usize)> = right.out(r).iter().map(|(l, t)| (l, *t)).collect();
        let ours: HashSet<(&TransitionLabel, usize)> =
            mapped.iter().filter_map(|(l, t, _)| t.map(|t| (*l, t))).collect();
        if left.out(q).len() != right.out(r).len() {
            let label = mapped
                .iter()
                .find(|(l, t, _)| !t.is_some_and(|t| theirs.contains(&(*l, t))))
                .map(|(l, _, _)| (*l).clone())
                .or_else(|| right.out(r).iter().find(|(l, t)| !ours.contains(&(l, *t))).map(|(l, _)| l.clone()));
            let reason = Mismatch::OutDegree { left: left.out(q).len(), right: right.out(r).len() };
            return Ok(IsomorphismReport::differ(state(), label, reason));
        }
        if let Some((l, _, t)) = mapped.iter().find(|(l, t, _)| !t.is_some_and(|t| theirs.contains(&(*l, t)))) {
            let reason = Mismatch::MissingTransition { target: left.state(*t).clone() };
            return Ok(IsomorphismReport::differ(state(), Some((*l).clone()), reason));
        }
        if let Some((l, t)) = right.out(r).iter().find(|(l, t)| !ours.contains(&(l, *t))) {
            let reason = Mismatch::ExtraTransition { target: right.state(*t).clone() };
            return Ok(IsomorphismReport::differ(state(), Some(l.clone()), reason));
        }
    }
    if let Some(r) = (0..right.len()).find(|r| !preimage.contains_key(r)) {
        return Ok(IsomorphismReport::differ(Some(right.state(r).clone()), None, Mismatch::NotSurjective));
    }
    Ok(IsomorphismReport::isomorphic(ids.into_iter().map(|r| r.expect("checked above")).collect()))
}

/// A colour with the sorted (label, colour) pairs of successors and predecessors.
type Signature = (usize, Vec<(usize, usize)>, Vec<(usize, usize)>);

/// Stable colouring of the disjoint union of both systems.
fn refine_colours(left: &DiscretizedTTS, right: &DiscretizedTTS) -> (Vec<usize>, Vec<usize>) {
    let mut labels: HashMap<&TransitionLabel, usize> = HashMap::new();
    let systems = [left, right];
    // Successor/predecessor lists with interned labels, union-indexed.
    let offset = left.len();
    let n = left.len() + right.len();
    let mut succ: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    let mut pred: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    for (k, sys) in systems.iter().enumerate() {
        let base = if k == 0 { 0 } else { offset };
        for (s, l, t) in sys.transitions() {
            let next = labels.len();
            let id = *labels.entry(l).or_insert(next);
            succ[base + s].push((id, base + t));
            pred[base + t].push((id, base + s));
        }
    }
    let mut colour: Vec<usize> = (0..n)
        .map(|v| if v < offset { left.is_initial(v) as usize } else { right.is_initial(v - offset) as usize })
        .collect();
    let mut classes = colour.iter().collect::<HashSet<_>>().len();
    loop {
        let mut table: HashMap<Signature, usize> = HashMap::new();
        let mut next = Vec::with_capacity(n);
        for v in 0..n {
            let mut out: Vec<(usize, usize)> = succ[v].iter().map(|&(l, t)| (l, colour[t])).collect();
            let mut inc: Vec<(usize, usize)> = pred[v].iter().map(|&(l, s)| (l, colour[s])).collect();
            out.sort_unstable();
            inc.sort_unstable();
            let fresh = table.len();
            next.push(*table.entry((colour[v], out, inc)).or_insert(fresh));
        }
        colour = next;
        if table.len() == classes {
            break;
        }
        classes = table.len();
    }
    let right_colours = colour.split_off(offset);
    (colour, right_colours)
}

/// Searches for an isomorphism without any hint.
///
/// `budget` bounds the number of candidate assignments tried during
/// backtracking; running out yields [`Verdict::InconclusiveBudget`].
pub fn search_isomorphism(left: &DiscretizedTTS, right: &DiscretizedTTS, budget: usize) -> IsomorphismReport {
    if left.truncated || right.truncated {
        return IsomorphismReport::inconclusive();
    }
    let first = left.initial().first().map(|&q| left.state(q).clone());
    if left.len() != right.len() {
        return IsomorphismReport::differ(first, None, Mismatch::StateCount { left: left.len(), right: right.len() });
    }
    if left.initial().len() != right.initial().len() {
        let reason = Mismatch::InitialCount { left: left.initial().len(), right: right.initial().len() };
        return IsomorphismReport::differ(first, None, reason);
    }
    let (lt, rt) = (left.transition_count(), right.transition_count());
    if lt != rt {
        return IsomorphismReport::differ(first, None, Mismatch::TransitionCount { left: lt, right: rt });
    }

    let (lc, rc) = refine_colours(left, right);
    let mut by_colour: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (r, c) in rc.iter().enumerate() {
        by_colour.entry(*c).or_default().push(r);
    }
    let mut left_count: HashMap<usize, usize> = HashMap::new();
    for c in &lc {
        *left_count.entry(*c).or_default() += 1;
    }
    for (q, c) in lc.iter().enumerate() {
        let r = by_colour.get(c).map_or(0, Vec::len);
        if r != left_count[c] {
            let reason = Mismatch::ColourClass { left: left_count[c], right: r };
            return IsomorphismReport::differ(Some(left.state(q).clone()), None, reason);
        }
    }

    let right_edges: HashSet<(usize, &TransitionLabel, usize)> = right.transitions().collect();
    let mut preds: Vec<Vec<(&TransitionLabel, usize)>> = vec![Vec::new(); left.len()];
    for (s, l, t) in left.transitions() {
        preds[t].push((l, s));
    }
    // Assignment order: discovery order, so neighbours are mostly placed early.
    let order: Vec<usize> = (0..left.len()).collect();
    let mut assign: Vec<Option<usize>> = vec![None; left.len()];
    let mut used = vec![false; right.len()];
    let mut cursor: Vec<usize> = vec![0; order.len()];
    let mut depth = 0usize;
    let mut tries = 0usize;

    let consistent = |q: usize, r: usize, assign: &[Option<usize>]| -> bool {
        let mapped = |s: usize| if s == q { Some(r) } else { assign[s] };
        left.out(q).iter().all(|(l, t)| mapped(*t).is_none_or(|rt| right_edges.contains(&(r, l, rt))))
            && preds[q].iter().all(|(l, s)| mapped(*s).is_none_or(|rs| right_edges.contains(&(rs, *l, r))))
    };

    while depth < order.len() {
        let q = order[depth];
        let candidates = &by_colour[&lc[q]];
        if let Some(prev) = assign[q].take() {
            used[prev] = false;
        }
        let mut placed = false;
        while cursor[depth] < candidates.len() {
            let r = candidates[cursor[depth]];
            cursor[depth] += 1;
            if used[r] {
                continue;
            }
            tries += 1;
            if tries > budget {
                return IsomorphismReport::inconclusive();
            }
            if consistent(q, r, &assign) {
                assign[q] = Some(r);
                used[r] = true;
                placed = true;
                break;
            }
        }
        if placed {
            depth += 1;
        } else {
            cursor[depth] = 0;
            if depth == 0 {
                return IsomorphismReport::differ(first, None, Mismatch::ColourClass { left: 0, right: 0 });
            }
            depth -= 1;
        }
    }
    IsomorphismReport::isomorphic(assign.into_iter().map(|r| r.expect("complete assignment")).collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Theorem {
    /// Weak-invariant semantics of `ta` vs baseline semantics of INV(`ta`),
    /// reachable parts.
    Inv,
    /// Baseline semantics of `ta` vs weak-invariant semantics of URG(`ta`),
    /// identity witness.
    Urg,
    /// Baseline semantics of `ta` vs baseline semantics of PUR(`ta`),
    /// reachable parts, plus invariant satisfaction.
    Pur,
}

impl fmt::Display for Theorem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Theorem::Inv => "inv",
            Theorem::Urg => "urg",
            Theorem::Pur => "pur",
        })
    }
}

impl std::str::FromStr for Theorem {
    type Err = String;

    /// Accepts `inv`, `urg`, `pur`, and the numeric aliases `5.5` and `5.6`
    /// used on the command line.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "5.5" | "thm55" | "inv" => Ok(Theorem::Inv),
            "5.6" | "thm56" | "urg" => Ok(Theorem::Urg),
            "pur" => Ok(Theorem::Pur),
            other => Err(format!("unknown theorem `{other}` (expected inv, urg or pur)")),
        }
    }
}

pub const DEFAULT_SAMPLES: usize = 500;
pub const DEFAULT_SEARCH_BUDGET: usize = 1_000_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckConfig {
    pub transform: TransformOptions,
    /// Clock ceiling override; defaults to one above the largest constant of
    /// both automata.
    pub cap: Option<u32>,
    pub max_states: usize,
    /// Extra unreachable states compared pointwise for the URG check.
    pub samples: usize,
    pub seed: u64,
    /// Also run [`search_isomorphism`] and record its verdict.
    pub cross_check: bool,
    pub search_budget: usize,
}

impl Default for CheckConfig {
    fn default() -> Self {
        CheckConfig {
            transform: TransformOptions::default(),
            cap: None,
            max_states: crate::semantics::DEFAULT_MAX_STATES,
            samples: DEFAULT_SAMPLES,
            seed: 0,
            cross_check: false,
            search_budget: DEFAULT_SEARCH_BUDGET,
        }
    }
}

impl CheckConfig {
    fn explore_config(&self, a: &TimedAutomaton, b: &TimedAutomaton) -> ExploreConfig {
        let mut cfg = match self.cap {
            Some(cap) => ExploreConfig::with_cap(cap),
            None => ExploreConfig::shared(&[a, b]),
        };
        cfg.max_states = self.max_states;
        cfg
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TheoremReport {
    pub theorem: Theorem,
    pub isomorphism: IsomorphismReport,
    /// Verdict of the independent search, when requested.
    pub search: Option<Verdict>,
    pub left_states: usize,
    pub right_states: usize,
    /// Unreachable states compared pointwise (URG only).
    pub sampled_states: usize,
    /// True when there were no more unreachable grid states than requested
    /// samples, so all of them were compared.
    pub samples_exhausted: bool,
    /// Explored states of the right system violating their invariant (PUR only).
    pub invariant_violations: Vec<TTSState>,
}

impl TheoremReport {
    pub fn holds(&self) -> bool {
        self.isomorphism.is_isomorphic()
            && self.invariant_violations.is_empty()
            && self.search.is_none_or(|v| v == Verdict::Isomorphic)
    }
}

impl fmt::Display for TheoremReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "theorem: {}", self.theorem)?;
        writeln!(f, "holds: {}", self.holds())?;
        write!(f, "{}", self.isomorphism)?;
        if let Some(v) = self.search {
            writeln!(f, "search-verdict: {v}")?;
        }
        writeln!(f, "states: {} vs {}", self.left_states, self.right_states)?;
        if self.theorem == Theorem::Urg {
            writeln!(f, "sampled-unreachable-states: {}", self.sampled_states)?;
        }
        if self.theorem == Theorem::Pur {
            writeln!(f, "invariant-violations: {}", self.invariant_violations.len())?;
            for s in self.invariant_violations.iter().take(5) {
                writeln!(f, "  {s}")?;
            }
        }
        Ok(())
    }
}

/// Builds the transformed automaton and checks the corresponding theorem.
pub fn check_theorem(
    ta: &TimedAutomaton,
    which: Theorem,
    cfg: &CheckConfig,
) -> Result<TheoremReport, EquivalenceError> {
    match which {
        Theorem::Inv => {
            let result = inv_transform(ta, cfg.transform).map_err(|e| match e {
                TransformError::UrgentLocations(_) => EquivalenceError::Precondition(e),
                other => EquivalenceError::Transform(other),
            })?;
            check_inv_with(ta, &result, cfg)
        }
        Theorem::Urg => {
            let result = urg_transform(ta, cfg.transform).map_err(EquivalenceError::Transform)?;
            check_urg_with(ta, &result, cfg)
        }
        Theorem::Pur => {
            let result = pur_transform(ta).map_err(EquivalenceError::Transform)?;
            check_pur_with(ta, &result, cfg)
        }
    }
}

fn report(
    theorem: Theorem,
    left: &DiscretizedTTS,
    right: &DiscretizedTTS,
    isomorphism: IsomorphismReport,
    cfg: &CheckConfig,
) -> TheoremReport {
    let search = cfg.cross_check.then(|| search_isomorphism(left, right, cfg.search_budget).verdict);
    TheoremReport {
        theorem,
        isomorphism,
        search,
        left_states: left.len(),
        right_states: right.len(),
        sampled_states: 0,
        samples_exhausted: false,
        invariant_violations: Vec::new(),
    }
}

/// INV check against a given (possibly hand-modified) translation.
pub fn check_inv_with(
    ta: &TimedAutomaton,
    result: &TransformResult,
    cfg: &CheckConfig,
) -> Result<TheoremReport, EquivalenceError> {
    let urgent: Vec<String> = ta.urgent_locations().map(|l| l.name.clone()).collect();
    if !urgent.is_empty() {
        return Err(EquivalenceError::Precondition(TransformError::UrgentLocations(urgent)));
    }
    let ecfg = cfg.explore_config(ta, &result.automaton);
    let left = SuccessorGenerator::new(ta, SemanticsKind::WeakInvariant, &ecfg)?.explore(ecfg.max_states);
    let right = SuccessorGenerator::new(&result.automaton, SemanticsKind::Baseline, &ecfg)?.explore(ecfg.max_states);
    let map = InvStateMap::new(ta, result);
    let iso = check_witness_isomorphism(&left, &right, |s| map.map(s))?;
    Ok(report(Theorem::Inv, &left, &right, iso, cfg))
}

/// URG check: identity witness on the explored systems, then pointwise
/// comparison of successor sets on sampled unreachable grid states.
pub fn check_urg_with(
    ta: &TimedAutomaton,
    result: &TransformResult,
    cfg: &CheckConfig,
) -> Result<TheoremReport, EquivalenceError> {
    let ecfg = cfg.explore_config(ta, &result.automaton);
    let base = SuccessorGenerator::new(ta, SemanticsKind::Baseline, &ecfg)?;
    let weak = SuccessorGenerator::new(&result.automaton, SemanticsKind::WeakInvariant, &ecfg)?;
    let left = base.explore(ecfg.max_states);
    let right = weak.explore(ecfg.max_states);
    let iso = check_witness_isomorphism(&left, &right, |s| Some(s.clone()))?;
    let mut rep = report(Theorem::Urg, &left, &right, iso, cfg);
    if !rep.isomorphism.is_isomorphic() || cfg.samples == 0 {
        return Ok(rep);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let grid = base.grid_size();
    // Small grids: enumerate the unreachable states and sample distinct ones.
    // Large grids: rejection sampling with a bounded number of draws.
    const ENUMERATION_LIMIT: u128 = 1 << 20;
    let mut samples: Vec<TTSState> = Vec::with_capacity(cfg.samples);
    if grid <= ENUMERATION_LIMIT {
        let unreachable: Vec<TTSState> =
            (0..grid).filter_map(|n| base.grid_state(n)).filter(|s| !left.contains(s)).collect();
        if unreachable.len() <= cfg.samples {
            rep.samples_exhausted = true;
            samples = unreachable;
        } else {
            samples.extend(unreachable.choose_multiple(&mut rng, cfg.samples).cloned());
        }
    } else {
        let mut seen = BTreeSet::new();
        let mut draws = 0;
        while samples.len() < cfg.samples && draws < cfg.samples * 100 {
            draws += 1;
            let n = rng.gen_range(0..grid);
            let s = base.grid_state(n).expect("in range");
            if !left.contains(&s) && seen.insert(n) {
                samples.push(s);
            }
        }
    }
    for s in &samples {
        let ours: BTreeSet<(TransitionLabel, TTSState)> = base.successors(s)?.into_iter().collect();
        let theirs: BTreeSet<(TransitionLabel, TTSState)> = weak.successors(s)?.into_iter().collect();
        if ours != theirs {
            let label = ours.symmetric_difference(&theirs).next().map(|(l, _)| l.clone());
            rep.isomorphism = IsomorphismReport::differ(
                Some(s.clone()),
                label,
                Mismatch::SuccessorMismatch { left: ours.len(), right: theirs.len() },
            );
            break;
        }
        rep.sampled_states += 1;
    }
    Ok(rep)
}

pub fn check_pur_with(
    ta: &TimedAutomaton,
    result: &TransformResult,
    cfg: &CheckConfig,
) -> Result<TheoremReport, EquivalenceError> {
    let ecfg = cfg.explore_config(ta, &result.automaton);
    let left = SuccessorGenerator::new(ta, SemanticsKind::Baseline, &ecfg)?.explore(ecfg.max_states);
    let pur = SuccessorGenerator::new(&result.automaton, SemanticsKind::Baseline, &ecfg)?;
    let right = pur.explore(ecfg.max_states);
    let map = PurStateMap::new(ta, result);
    let iso = check_witness_isomorphism(&left, &right, |s| map.map(s))?;
    let mut rep = report(Theorem::Pur, &left, &right, iso, cfg);
    for s in right.states() {
        if !pur.satisfies_invariant(s)? {
            rep.invariant_violations.push(s.clone());
        }
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::semantics::{explore, ClockValuation};
    use crate::time::HalfInt;
    use std::sync::Arc;

    fn tts(ta: &TimedAutomaton, kind: SemanticsKind, cap: u32) -> DiscretizedTTS {
        explore(ta, kind, &ExploreConfig::with_cap(cap)).unwrap()
    }

    #[test]
    fn identity_is_isomorphism() {
        let t = tts(&fixtures::example1(), SemanticsKind::WeakInvariant, 2);
        let r = check_witness_isomorphism(&t, &t, |s| Some(s.clone())).unwrap();
        assert_eq!(r.verdict, Verdict::Isomorphic);
        assert_eq!(r.witness.unwrap(), (0..t.len()).collect::<Vec<_>>());
        assert_eq!(search_isomorphism(&t, &t, 1000).verdict, Verdict::Isomorphic);
    }

    #[test]
    fn partial_map_is_a_totality_error() {
        let t = tts(&fixtures::example1(), SemanticsKind::WeakInvariant, 2);
        let err = check_witness_isomorphism(&t, &t, |s| (&*s.location == "l0").then(|| s.clone())).unwrap_err();
        assert!(matches!(err, EquivalenceError::NotTotal(s) if &*s.location == "l1"));
    }

    #[test]
    fn example1_weak_vs_inv_example1() {
        let ex1 = fixtures::example1();
        let r = inv_transform(&ex1, TransformOptions::default()).unwrap();
        let left = tts(&ex1, SemanticsKind::WeakInvariant, 2);
        let right = tts(&r.automaton, SemanticsKind::Baseline, 2);
        let map = InvStateMap::new(&ex1, &r);
        let rep = check_witness_isomorphism(&left, &right, |s| map.map(s)).unwrap();
        assert_eq!(rep.verdict, Verdict::Isomorphic);
    }

    #[test]
    fn example1_weak_vs_example2_baseline() {
        let left = tts(&fixtures::example1(), SemanticsKind::WeakInvariant, 2);
        let right = tts(&fixtures::example2(), SemanticsKind::Baseline, 2);
        let init = right.state(right.initial()[0]).clone();
        let rep = check_witness_isomorphism(&left, &right, |s| {
            Some(if s.valuation.is_zero() && &*s.location == "l0" { init.clone() } else { s.clone() })
        })
        .unwrap();
        assert_eq!(rep.verdict, Verdict::NotIsomorphic);
        let cex = rep.counterexample.unwrap();
        assert_eq!(cex.state.as_ref().map(|s| &*s.location), Some("l0"));
        assert_eq!(cex.reason, Mismatch::OutDegree { left: 1, right: 0 });
        assert_eq!(search_isomorphism(&left, &right, 1000).verdict, Verdict::NotIsomorphic);
    }

    #[test]
    fn search_rejects_different_sizes() {
        let a = tts(&fixtures::example1(), SemanticsKind::WeakInvariant, 2);
        let b = tts(&fixtures::example2(), SemanticsKind::Baseline, 2);
        let rep = search_isomorphism(&a, &b, 10);
        assert_eq!(rep.counterexample.unwrap().reason, Mismatch::StateCount { left: a.len(), right: b.len() });
    }

    fn symmetric_pair() -> (DiscretizedTTS, DiscretizedTTS) {
        // Two interchangeable branches; refinement cannot separate them.
        let clocks: Arc<[String]> = vec!["x".to_string()].into();
        let s = |l: &str| TTSState::new(l, ClockValuation::zero(clocks.clone()));
        let a = TransitionLabel::Action("a".into());
        let b = TransitionLabel::Action("b".into());
        let left = DiscretizedTTS::from_parts(
            SemanticsKind::Baseline,
            vec![s("r"), s("p"), s("q")],
            vec![0],
            vec![vec![(a.clone(), 1), (a.clone(), 2)], vec![(b.clone(), 2)], vec![(b.clone(), 1)]],
            false,
        );
        let right = DiscretizedTTS::from_parts(
            SemanticsKind::Baseline,
            vec![s("r"), s("u"), s("v")],
            vec![0],
            vec![vec![(a.clone(), 2), (a.clone(), 1)], vec![(b.clone(), 2)], vec![(b, 1)]],
            false,
        );
        (left, right)
    }

    #[test]
    fn search_backtracks_through_symmetry() {
        let (left, right) = symmetric_pair();
        let rep = search_isomorphism(&left, &right, 100);
        assert_eq!(rep.verdict, Verdict::Isomorphic);
        let w = rep.witness.unwrap();
        assert_eq!(w[0], 0);
        // The witness really is an isomorphism.
        let names: Vec<TTSState> = w.iter().map(|&r| right.state(r).clone()).collect();
        let check = check_witness_isomorphism(&left, &right, |s| Some(names[left.id_of(s).unwrap()].clone())).unwrap();
        assert!(check.is_isomorphic());
    }

    #[test]
    fn search_budget_exhaustion_is_inconclusive() {
        let (left, right) = symmetric_pair();
        assert_eq!(search_isomorphism(&left, &right, 1).verdict, Verdict::InconclusiveBudget);
    }

    #[test]
    fn search_finds_non_isomorphism_with_equal_counts() {
        let clocks: Arc<[String]> = vec!["x".to_string()].into();
        let s = |l: &str| TTSState::new(l, ClockValuation::zero(clocks.clone()));
        let a = TransitionLabel::Action("a".into());
        let d = TransitionLabel::Delay(HalfInt::ZERO);
        let left = DiscretizedTTS::from_parts(
            SemanticsKind::Baseline,
            vec![s("p"), s("q")],
            vec![0],
            vec![vec![(a.clone(), 1)], vec![(d.clone(), 1)]],
            false,
        );
        let right = DiscretizedTTS::from_parts(
            SemanticsKind::Baseline,
            vec![s("p"), s("q")],
            vec![0],
            vec![vec![(a, 1)], vec![(d, 0)]],
            false,
        );
        assert_eq!(search_isomorphism(&left, &right, 100).verdict, Verdict::NotIsomorphic);
        let rep = check_witness_isomorphism(&left, &right, |s| Some(s.clone())).unwrap();
        assert!(matches!(rep.counterexample.unwrap().reason, Mismatch::MissingTransition { .. }));
    }

    #[test]
    fn theorems_hold_on_example1() {
        let ex1 = fixtures::example1();
        let cfg = CheckConfig { cross_check: true, ..Default::default() };
        for thm in [Theorem::Inv, Theorem::Urg, Theorem::Pur] {
            let rep = check_theorem(&ex1, thm, &cfg).unwrap();
            assert!(rep.holds(), "{thm}: {rep}");
        }
    }

    #[test]
    fn urg_check_samples_unreachable_states() {
        let ex1 = fixtures::example1();
        // Cap 2 gives 2 locations x 5 clock values, fewer than the default
        // sample count, so every unreachable grid state is compared.
        let rep = check_theorem(&ex1, Theorem::Urg, &CheckConfig::default()).unwrap();
        assert!(rep.samples_exhausted);
        assert_eq!(rep.sampled_states, 10 - rep.left_states);
        assert_eq!(rep.isomorphism.witness.as_ref().unwrap().len(), rep.left_states);
        let rep = check_theorem(&ex1, Theorem::Urg, &CheckConfig { samples: 3, ..Default::default() }).unwrap();
        assert!(!rep.samples_exhausted);
        assert_eq!(rep.sampled_states, 3);
    }

    #[test]
    fn inv_precondition_is_not_a_verdict() {
        let mut ta = fixtures::example1();
        ta.locations[1].urgent = true;
        let err = check_theorem(&ta, Theorem::Inv, &CheckConfig::default()).unwrap_err();
        assert!(matches!(err, EquivalenceError::Precondition(_)));
    }

    #[test]
    fn truncated_exploration_is_inconclusive() {
        let cfg = CheckConfig { max_states: 2, ..Default::default() };
        let rep = check_theorem(&fixtures::example1(), Theorem::Inv, &cfg).unwrap();
        assert_eq!(rep.isomorphism.verdict, Verdict::InconclusiveBudget);
        assert!(!rep.holds());
    }

    #[test]
    fn pur_mutation_is_detected() {
        let ex1 = fixtures::example1();
        let mut r = pur_transform(&ex1).unwrap();
        r.automaton.locations.iter_mut().find(|l| l.name == "l0__u").unwrap().urgent = false;
        let rep = check_pur_with(&ex1, &r, &CheckConfig::default()).unwrap();
        assert!(!rep.holds());
    }

    #[test]
    fn urg_mutation_is_detected_pointwise_or_by_witness() {
        let mut ta = fixtures::example1();
        ta.locations[1].invariant = "x <= 1".parse().unwrap();
        let mut r = urg_transform(&ta, TransformOptions::default()).unwrap();
        // Undo the guard strengthening.
        r.automaton.edges[0].guard = crate::constraints::ClockConstraint::TRUE;
        let rep = check_urg_with(&ta, &r, &CheckConfig::default()).unwrap();
        assert!(!rep.holds());
    }
}
