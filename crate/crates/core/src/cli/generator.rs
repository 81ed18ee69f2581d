//! Seeded random automata for property suites.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::automata::{Edge, Location, TimedAutomaton};
use crate::constraints::{Atom, ClockConstraint, Rel};

pub const MAX_LOCATIONS: usize = 6;
pub const MAX_CLOCKS: usize = 2;
pub const MAX_CONSTANT: u32 = 3;

const CLOCK_NAMES: [&str; MAX_CLOCKS] = ["x", "y"];
const ACTIONS: [&str; 3] = ["a", "b", "c"];

#[derive(Clone, Debug, PartialEq)]
pub struct GeneratorParams {
    pub seed: u64,
    pub locations: usize,
    pub clocks: usize,
    pub max_constant: u32,
    /// Probability of an edge between any ordered pair of locations.
    pub edge_density: f64,
    pub urgent_probability: f64,
    /// Probability that an initial location's invariant excludes the zero
    /// valuation.
    pub initial_violation_probability: f64,
}

impl Default for GeneratorParams {
    fn default() -> Self {
        GeneratorParams {
            seed: 0,
            locations: 4,
            clocks: 2,
            max_constant: 3,
            edge_density: 0.3,
            urgent_probability: 0.2,
            initial_violation_probability: 0.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GeneratorError {
    #[error("location count must be in 1..={MAX_LOCATIONS}, got {0}")]
    Locations(usize),
    #[error("clock count must be in 1..={MAX_CLOCKS}, got {0}")]
    Clocks(usize),
    #[error("max constant must be at most {MAX_CONSTANT}, got {0}")]
    Constant(u32),
    #[error("{name} must be a probability, got {value}")]
    Probability { name: &'static str, value: f64 },
}

impl GeneratorParams {
    pub fn check(&self) -> Result<(), GeneratorError> {
        if !(1..=MAX_LOCATIONS).contains(&self.locations) {
            return Err(GeneratorError::Locations(self.locations));
        }
        if !(1..=MAX_CLOCKS).contains(&self.clocks) {
            return Err(GeneratorError::Clocks(self.clocks));
        }
        if self.max_constant > MAX_CONSTANT {
            return Err(GeneratorError::Constant(self.max_constant));
        }
        for (name, value) in [
            ("edge density", self.edge_density),
            ("urgent probability", self.urgent_probability),
            ("initial violation probability", self.initial_violation_probability),
        ] {
            if !(0.0..=1.0).contains(&value) {
                return Err(GeneratorError::Probability { name, value });
            }
        }
        Ok(())
    }
}

fn random_atom(rng: &mut ChaCha8Rng, clocks: &[&str], max_constant: u32) -> Atom {
    let clock = *clocks.choose(rng).expect("at least one clock");
    let rel = *[Rel::Lt, Rel::Le, Rel::Gt, Rel::Ge].choose(rng).expect("nonempty");
    Atom::new(clock, rel, rng.gen_range(0..=max_constant))
}

fn random_constraint(rng: &mut ChaCha8Rng, clocks: &[&str], max_constant: u32) -> ClockConstraint {
    let n = rng.gen_range(0..=2);
    ClockConstraint::from_atoms((0..n).map(|_| random_atom(rng, clocks, max_constant)))
}

/// An invariant the zero valuation violates.
fn violating_invariant(rng: &mut ChaCha8Rng, clocks: &[&str], max_constant: u32) -> ClockConstraint {
    let clock = *clocks.choose(rng).expect("at least one clock");
    let atom = if max_constant == 0 || rng.gen_bool(0.5) {
        Atom::new(clock, Rel::Gt, rng.gen_range(0..=max_constant))
    } else {
        Atom::new(clock, Rel::Ge, rng.gen_range(1..=max_constant))
    };
    let extra = rng.gen_bool(0.3).then(|| random_atom(rng, clocks, max_constant));
    ClockConstraint::from_atoms(std::iter::once(atom).chain(extra))
}

pub fn generate_random_ta(params: &GeneratorParams) -> Result<TimedAutomaton, GeneratorError> {
    params.check()?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let clocks = &CLOCK_NAMES[..params.clocks];
    let mut ta = TimedAutomaton::new(clocks.iter().copied());
    for i in 0..params.locations {
        let initial = i == 0 || rng.gen_bool(0.15);
        let urgent = rng.gen_bool(params.urgent_probability);
        let invariant = if initial && rng.gen_bool(params.initial_violation_probability) {
            violating_invariant(&mut rng, clocks, params.max_constant)
        } else if rng.gen_bool(0.05) {
            ClockConstraint::FALSE
        } else {
            random_constraint(&mut rng, clocks, params.max_constant)
        };
        ta.add_location(Location::new(format!("l{i}")).initial(initial).urgent(urgent).with_invariant(invariant));
    }
    for i in 0..params.locations {
        for j in 0..params.locations {
            if !rng.gen_bool(params.edge_density) {
                continue;
            }
            let action = *ACTIONS.choose(&mut rng).expect("nonempty");
            let guard = random_constraint(&mut rng, clocks, params.max_constant);
            let resets: Vec<&str> = clocks.iter().copied().filter(|_| rng.gen_bool(0.3)).collect();
            ta.add_edge(Edge::new(format!("l{i}"), action, guard, resets, format!("l{j}")));
        }
    }
    Ok(ta)
}
