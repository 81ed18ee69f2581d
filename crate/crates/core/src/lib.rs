//! Invariant and urgency transformations for timed automata.
//!
//! The crate implements the INV, URG and PUR translations between automata
//! read under a baseline semantics (no transition enters a state violating
//! its invariant; urgent locations forbid delays) and a weak-invariant
//! semantics (action transitions may enter violating states). Their
//! correctness statements are checked on concrete automata by exploring
//! finite, half-integer-grid abstractions of both transition systems and
//! testing them for isomorphism.

pub mod automata;
pub mod cli;
pub mod constraints;
pub mod equivalence;
pub mod fixtures;
pub mod semantics;
pub mod time;
pub mod transforms;

pub use automata::{
    isomorphic_modulo_renaming, split_disjunctive_guard, validate, Diagnostic, Edge, Location, TimedAutomaton,
};
pub use constraints::{Atom, ClockConstraint, DisjunctSet, Rel};
pub use equivalence::{
    check_theorem, check_witness_isomorphism, search_isomorphism, CheckConfig, IsomorphismReport, Theorem,
    TheoremReport, Verdict,
};
pub use semantics::{explore, ClockValuation, DiscretizedTTS, ExploreConfig, SemanticsKind, TTSState, TransitionLabel};
pub use time::HalfInt;
pub use transforms::{inv_transform, pur_transform, urg_transform, TransformOptions, TransformResult};
