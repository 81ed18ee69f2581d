//! File formats, DOT export, the random automaton generator and the
//! command-line front end.

pub mod commands;
pub mod document;
pub mod dot;
pub mod generator;

pub use commands::run;
pub use document::{parse_ta, write_ta, AutomatonDocument, DocumentError};
pub use dot::{export_dot_ta, export_dot_tts};
pub use generator::{generate_random_ta, GeneratorParams};
