//! JSON documents for automata and explored transition systems.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::automata::{Diagnostic, Edge, Location, TimedAutomaton};
use crate::constraints::{ClockConstraint, ConstraintError};
use crate::semantics::{DiscretizedTTS, TransitionLabel};

pub const AUTOMATON_FORMAT: &str = "timed-automaton";
pub const TTS_FORMAT: &str = "discretized-tts";
pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum DocumentError {
    #[error("line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("unsupported document: format `{format}` version {version}")]
    Format { format: String, version: u32 },
    #[error("{context}: {source}")]
    Constraint { context: String, source: ConstraintError },
    #[error("invalid automaton:\n{}", .0.iter().map(|d| format!("  {d}")).collect::<Vec<_>>().join("\n"))]
    Invalid(Vec<Diagnostic>),
}

impl From<serde_json::Error> for DocumentError {
    fn from(e: serde_json::Error) -> Self {
        DocumentError::Syntax { line: e.line(), column: e.column(), message: e.to_string() }
    }
}

fn default_true() -> String {
    "true".into()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocationDoc {
    pub name: String,
    #[serde(default = "default_true")]
    pub invariant: String,
    #[serde(default)]
    pub urgent: bool,
    #[serde(default)]
    pub initial: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeDoc {
    pub source: String,
    pub action: String,
    #[serde(default = "default_true")]
    pub guard: String,
    #[serde(default)]
    pub resets: Vec<String>,
    pub target: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AutomatonDocument {
    pub format: String,
    pub version: u32,
    pub clocks: Vec<String>,
    #[serde(default)]
    pub actions: Vec<String>,
    pub locations: Vec<LocationDoc>,
    #[serde(default)]
    pub edges: Vec<EdgeDoc>,
}

impl AutomatonDocument {
    /// Canonical document: locations sorted by name, edges sorted, resets
    /// sorted, constraints in normalized textual form.
    pub fn from_automaton(ta: &TimedAutomaton) -> Self {
        let mut locations: Vec<LocationDoc> = ta
            .locations
            .iter()
            .map(|l| LocationDoc {
                name: l.name.clone(),
                invariant: l.invariant.to_string(),
                urgent: l.urgent,
                initial: l.initial,
            })
            .collect();
        locations.sort_by(|a, b| a.name.cmp(&b.name));
        let mut edges: Vec<EdgeDoc> = ta
            .edges
            .iter()
            .map(|e| EdgeDoc {
                source: e.source.clone(),
                action: e.action.clone(),
                guard: e.guard.to_string(),
                resets: e.resets.iter().cloned().collect(),
                target: e.target.clone(),
            })
            .collect();
        edges.sort_by(|a, b| {
            (&a.source, &a.target, &a.action, &a.guard, &a.resets)
                .cmp(&(&b.source, &b.target, &b.action, &b.guard, &b.resets))
        });
        AutomatonDocument {
            format: AUTOMATON_FORMAT.into(),
            version: FORMAT_VERSION,
            clocks: ta.clocks.clone(),
            actions: ta.alphabet().into_iter().collect(),
            locations,
            edges,
        }
    }

    pub fn to_automaton(&self) -> Result<TimedAutomaton, DocumentError> {
        if self.format != AUTOMATON_FORMAT || self.version != FORMAT_VERSION {
            return Err(DocumentError::Format { format: self.format.clone(), version: self.version });
        }
        let constraint = |text: &str, context: String| -> Result<ClockConstraint, DocumentError> {
            text.parse().map_err(|source| DocumentError::Constraint { context, source })
        };
        let mut ta = TimedAutomaton::new(self.clocks.iter().cloned());
        ta.actions = self.actions.iter().cloned().collect();
        for l in &self.locations {
            ta.add_location(Location {
                name: l.name.clone(),
                invariant: constraint(&l.invariant, format!("invariant of location `{}`", l.name))?,
                urgent: l.urgent,
                initial: l.initial,
            });
        }
        for (i, e) in self.edges.iter().enumerate() {
            ta.add_edge(Edge {
                source: e.source.clone(),
                action: e.action.clone(),
                guard: constraint(&e.guard, format!("guard of edge #{i} ({} -> {})", e.source, e.target))?,
                resets: e.resets.iter().cloned().collect(),
                target: e.target.clone(),
            });
        }
        Ok(ta)
    }
}

/// Parses and validates an automaton document.
pub fn parse_ta(text: &str) -> Result<TimedAutomaton, DocumentError> {
    let doc: AutomatonDocument = serde_json::from_str(text)?;
    let ta = doc.to_automaton()?;
    let diags = ta.validate();
    if !diags.is_empty() {
        return Err(DocumentError::Invalid(diags));
    }
    Ok(ta)
}

pub fn write_ta(ta: &TimedAutomaton) -> String {
    let mut s = serde_json::to_string_pretty(&AutomatonDocument::from_automaton(ta)).expect("serializable");
    s.push('\n');
    s
}

/// Reads the `format` field of a document without interpreting the rest.
pub fn document_format(text: &str) -> Result<String, DocumentError> {
    #[derive(Deserialize)]
    struct Header {
        format: String,
    }
    let h: Header = serde_json::from_str(text)?;
    Ok(h.format)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StateDoc {
    pub location: String,
    /// Clock name to value, written as `3/2` or `2`.
    pub valuation: BTreeMap<String, String>,
    pub initial: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransitionDoc {
    pub source: usize,
    pub label: String,
    pub target: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TtsDocument {
    pub format: String,
    pub version: u32,
    pub semantics: String,
    pub truncated: bool,
    pub states: Vec<StateDoc>,
    pub transitions: Vec<TransitionDoc>,
}

impl TtsDocument {
    pub fn from_tts(tts: &DiscretizedTTS) -> Self {
        let states = tts
            .states()
            .iter()
            .enumerate()
            .map(|(i, s)| StateDoc {
                location: s.location.to_string(),
                valuation: s
                    .valuation
                    .clocks()
                    .iter()
                    .cloned()
                    .zip(s.valuation.values().iter().map(ToString::to_string))
                    .collect(),
                initial: tts.is_initial(i),
            })
            .collect();
        let transitions = tts
            .transitions()
            .map(|(s, l, t)| TransitionDoc {
                source: s,
                label: match l {
                    TransitionLabel::Action(a) => a.to_string(),
                    TransitionLabel::Delay(d) => format!("delay:{d}"),
                },
                target: t,
            })
            .collect();
        TtsDocument {
            format: TTS_FORMAT.into(),
            version: FORMAT_VERSION,
            semantics: tts.kind.to_string(),
            truncated: tts.truncated,
            states,
            transitions,
        }
    }
}

pub fn write_tts(tts: &DiscretizedTTS) -> String {
    let mut s = serde_json::to_string_pretty(&TtsDocument::from_tts(tts)).expect("serializable");
    s.push('\n');
    s
}

pub fn parse_tts_document(text: &str) -> Result<TtsDocument, DocumentError> {
    let doc: TtsDocument = serde_json::from_str(text)?;
    if doc.format != TTS_FORMAT || doc.version != FORMAT_VERSION {
        return Err(DocumentError::Format { format: doc.format, version: doc.version });
    }
    Ok(doc)
}
