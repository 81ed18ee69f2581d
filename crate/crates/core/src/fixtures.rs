//! The worked examples as shipped fixture documents.
//!
//! 1. a location whose invariant `x > 1` fails initially, with an `a` edge
//!    to an unconstrained location;
//! 2. and 4. the outputs of the earlier, flawed INV and URG constructions on
//!    example 1 (initial dead location with a `false` invariant);
//! 3. INV of example 1; 5. URG of example 1 (unchanged); 6. PUR of example 1.

use std::collections::BTreeMap;

use crate::automata::TimedAutomaton;
use crate::cli::document::parse_ta;

pub const EXAMPLE1: &str = include_str!("../fixtures/example1.json");
pub const EXAMPLE2: &str = include_str!("../fixtures/example2.json");
pub const EXAMPLE3: &str = include_str!("../fixtures/example3.json");
pub const EXAMPLE4: &str = include_str!("../fixtures/example4.json");
pub const EXAMPLE5: &str = include_str!("../fixtures/example5.json");
pub const EXAMPLE6: &str = include_str!("../fixtures/example6.json");
pub const EXAMPLE3_RENAMING: &str = include_str!("../fixtures/example3.renaming.json");
pub const EXAMPLE6_RENAMING: &str = include_str!("../fixtures/example6.renaming.json");

fn load(text: &str) -> TimedAutomaton {
    parse_ta(text).expect("shipped fixture parses")
}

fn renaming(text: &str) -> BTreeMap<String, String> {
    serde_json::from_str(text).expect("shipped renaming parses")
}

pub fn example1() -> TimedAutomaton {
    load(EXAMPLE1)
}

pub fn example2() -> TimedAutomaton {
    load(EXAMPLE2)
}

pub fn example3() -> TimedAutomaton {
    load(EXAMPLE3)
}

pub fn example4() -> TimedAutomaton {
    load(EXAMPLE4)
}

pub fn example5() -> TimedAutomaton {
    load(EXAMPLE5)
}

pub fn example6() -> TimedAutomaton {
    load(EXAMPLE6)
}

/// Generated copy names of INV(example 1) to the names used in example 3.
pub fn example3_renaming() -> BTreeMap<String, String> {
    renaming(EXAMPLE3_RENAMING)
}

/// Generated copy names of PUR(example 1) to the names used in example 6.
pub fn example6_renaming() -> BTreeMap<String, String> {
    renaming(EXAMPLE6_RENAMING)
}
