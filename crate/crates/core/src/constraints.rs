//! Clock constraints: conjunctions of atomic bounds `x ~ c` with `~` one of
//! `<`, `<=`, `>`, `>=` and `c` a non-negative integer.
//!
//! `true` is the empty conjunction and `false` is a dedicated canonical value.
//! Atoms are kept sorted by (clock, relation, bound) and deduplicated, so two
//! constraints built from the same atoms compare equal regardless of order.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use crate::time::HalfInt;

/// Comparison relation of an atomic bound.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Rel {
    Lt,
    Le,
    Gt,
    Ge,
}

impl Rel {
    pub fn negated(self) -> Rel {
        match self {
            Rel::Lt => Rel::Ge,
            Rel::Le => Rel::Gt,
            Rel::Gt => Rel::Le,
            Rel::Ge => Rel::Lt,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Rel::Lt => "<",
            Rel::Le => "<=",
            Rel::Gt => ">",
            Rel::Ge => ">=",
        }
    }

    fn is_upper(self) -> bool {
        matches!(self, Rel::Lt | Rel::Le)
    }

    fn is_strict(self) -> bool {
        matches!(self, Rel::Lt | Rel::Gt)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Atom {
    pub clock: String,
    pub rel: Rel,
    pub bound: u32,
}

impl Atom {
    pub fn new(clock: impl Into<String>, rel: Rel, bound: u32) -> Self {
        Atom { clock: clock.into(), rel, bound }
    }

    /// Evaluates the atom for a clock value.
    pub fn holds(&self, value: HalfInt) -> bool {
        let v = value.halves() as u64;
        let c = 2 * self.bound as u64;
        match self.rel {
            Rel::Lt => v < c,
            Rel::Le => v <= c,
            Rel::Gt => v > c,
            Rel::Ge => v >= c,
        }
    }

    pub fn negated(&self) -> Atom {
        Atom { clock: self.clock.clone(), rel: self.rel.negated(), bound: self.bound }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.clock, self.rel.symbol(), self.bound)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ConstraintError {
    #[error("clock `{0}` is not in the valuation's domain")]
    UnknownClock(String),
    #[error("column {column}: {message}")]
    Parse { column: usize, message: String },
}

/// Anything that maps clock names to values.
pub trait ClockLookup {
    fn value_of(&self, clock: &str) -> Option<HalfInt>;
}

impl ClockLookup for BTreeMap<String, HalfInt> {
    fn value_of(&self, clock: &str) -> Option<HalfInt> {
        self.get(clock).copied()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum Repr {
    Conj(Vec<Atom>),
    False,
}

/// A conjunction of atoms. There is no way to express a disjunction in this
/// type; see [`DisjunctSet`].
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ClockConstraint {
    repr: Repr,
}

impl Default for ClockConstraint {
    fn default() -> Self {
        Self::TRUE
    }
}

impl ClockConstraint {
    pub const TRUE: ClockConstraint = ClockConstraint { repr: Repr::Conj(Vec::new()) };
    pub const FALSE: ClockConstraint = ClockConstraint { repr: Repr::False };

    pub fn from_atoms(atoms: impl IntoIterator<Item = Atom>) -> Self {
        let mut atoms: Vec<Atom> = atoms.into_iter().collect();
        atoms.sort();
        atoms.dedup();
        ClockConstraint { repr: Repr::Conj(atoms) }
    }

    pub fn atom(clock: impl Into<String>, rel: Rel, bound: u32) -> Self {
        Self::from_atoms([Atom::new(clock, rel, bound)])
    }

    /// `x == c`, expanded to `x <= c && x >= c`.
    pub fn equals(clock: impl Into<String>, bound: u32) -> Self {
        let clock = clock.into();
        Self::from_atoms([Atom::new(clock.clone(), Rel::Le, bound), Atom::new(clock, Rel::Ge, bound)])
    }

    /// The atoms of the conjunction; empty for both `true` and canonical `false`.
    pub fn atoms(&self) -> &[Atom] {
        match &self.repr {
            Repr::Conj(atoms) => atoms,
            Repr::False => &[],
        }
    }

    pub fn is_true(&self) -> bool {
        matches!(&self.repr, Repr::Conj(a) if a.is_empty())
    }

    /// Canonical `false`, or a conjunction containing an atom `x < 0`.
    pub fn is_false(&self) -> bool {
        match &self.repr {
            Repr::False => true,
            Repr::Conj(atoms) => atoms.iter().any(|a| a.rel == Rel::Lt && a.bound == 0),
        }
    }

    pub fn is_canonical_false(&self) -> bool {
        self.repr == Repr::False
    }

    /// True when no valuation satisfies the constraint.
    pub fn is_unsatisfiable(&self) -> bool {
        self.simplify().is_canonical_false()
    }

    pub fn and(&self, other: &ClockConstraint) -> ClockConstraint {
        match (&self.repr, &other.repr) {
            (Repr::False, _) | (_, Repr::False) => Self::FALSE,
            (Repr::Conj(a), Repr::Conj(b)) => Self::from_atoms(a.iter().chain(b).cloned()),
        }
    }

    pub fn clocks(&self) -> BTreeSet<&str> {
        self.atoms().iter().map(|a| a.clock.as_str()).collect()
    }

    pub fn satisfies(&self, valuation: &impl ClockLookup) -> Result<bool, ConstraintError> {
        match &self.repr {
            Repr::False => Ok(false),
            Repr::Conj(atoms) => {
                let mut all = true;
                for atom in atoms {
                    let v = valuation
                        .value_of(&atom.clock)
                        .ok_or_else(|| ConstraintError::UnknownClock(atom.clock.clone()))?;
                    all &= atom.holds(v);
                }
                Ok(all)
            }
        }
    }

    /// Whether the all-zero valuation satisfies the constraint.
    pub fn holds_at_zero(&self) -> bool {
        match &self.repr {
            Repr::False => false,
            Repr::Conj(atoms) => atoms.iter().all(|a| a.holds(HalfInt::ZERO)),
        }
    }

    /// Weakest precondition of `self` under resetting `resets` to zero.
    ///
    /// Atoms over reset clocks are evaluated at 0 and folded away (dropped when
    /// true, collapsing the result to `false` otherwise).
    pub fn reset_pred(&self, resets: &BTreeSet<String>) -> ClockConstraint {
        let atoms = match &self.repr {
            Repr::False => return Self::FALSE,
            Repr::Conj(atoms) => atoms,
        };
        if resets.is_empty() {
            return self.clone();
        }
        let mut kept = Vec::with_capacity(atoms.len());
        for atom in atoms {
            if resets.contains(&atom.clock) {
                if !atom.holds(HalfInt::ZERO) {
                    return Self::FALSE;
                }
            } else {
                kept.push(atom.clone());
            }
        }
        ClockConstraint { repr: Repr::Conj(kept) }
    }

    /// De Morgan negation: one single-atom disjunct per atom.
    pub fn negate_to_disjuncts(&self) -> DisjunctSet {
        match &self.repr {
            Repr::False => DisjunctSet::from_iter([Self::TRUE]),
            Repr::Conj(atoms) => DisjunctSet::from_iter(atoms.iter().map(|a| Self::from_atoms([a.negated()]))),
        }
    }

    /// Drops duplicate, trivially-true (`x >= 0`) and subsumed atoms, and
    /// collapses per-clock contradictions to canonical `false`.
    pub fn simplify(&self) -> ClockConstraint {
        let atoms = match &self.repr {
            Repr::False => return Self::FALSE,
            Repr::Conj(atoms) => atoms,
        };
        // (bound, strict) per clock; tighter wins.
        let mut lower: BTreeMap<&str, (u32, bool)> = BTreeMap::new();
        let mut upper: BTreeMap<&str, (u32, bool)> = BTreeMap::new();
        for atom in atoms {
            let strict = atom.rel.is_strict();
            if atom.rel.is_upper() {
                if atom.rel == Rel::Lt && atom.bound == 0 {
                    return Self::FALSE;
                }
                let e = upper.entry(&atom.clock).or_insert((atom.bound, strict));
                if atom.bound < e.0 || (atom.bound == e.0 && strict) {
                    *e = (atom.bound, strict);
                }
            } else {
                if atom.rel == Rel::Ge && atom.bound == 0 {
                    continue;
                }
                let e = lower.entry(&atom.clock).or_insert((atom.bound, strict));
                if atom.bound > e.0 || (atom.bound == e.0 && strict) {
                    *e = (atom.bound, strict);
                }
            }
        }
        let mut out = Vec::new();
        for (clock, &(lb, ls)) in &lower {
            if let Some(&(ub, us)) = upper.get(clock) {
                if lb > ub || (lb == ub && (ls || us)) {
                    return Self::FALSE;
                }
            }
            out.push(Atom::new(*clock, if ls { Rel::Gt } else { Rel::Ge }, lb));
        }
        for (clock, &(ub, us)) in &upper {
            out.push(Atom::new(*clock, if us { Rel::Lt } else { Rel::Le }, ub));
        }
        Self::from_atoms(out)
    }

    /// Largest bound in the constraint; 0 for `true` and `false`.
    pub fn max_constant(&self) -> u32 {
        self.atoms().iter().map(|a| a.bound).max().unwrap_or(0)
    }

    /// Renames clocks; clocks absent from `map` are kept.
    pub fn rename_clocks(&self, map: &BTreeMap<String, String>) -> ClockConstraint {
        match &self.repr {
            Repr::False => Self::FALSE,
            Repr::Conj(atoms) => {
                Self::from_atoms(atoms.iter().map(|a| Atom {
                    clock: map.get(&a.clock).cloned().unwrap_or_else(|| a.clock.clone()),
                    ..a.clone()
                }))
            }
        }
    }
}

impl fmt::Display for ClockConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.repr {
            Repr::False => f.write_str("false"),
            Repr::Conj(atoms) if atoms.is_empty() => f.write_str("true"),
            Repr::Conj(atoms) => {
                for (i, atom) in atoms.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" && ")?;
                    }
                    write!(f, "{atom}")?;
                }
                Ok(())
            }
        }
    }
}

impl FromStr for ClockConstraint {
    type Err = ConstraintError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Parser::new(s).parse()
    }
}

/// A finite disjunction of conjunctions. Empty means `false`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DisjunctSet {
    disjuncts: Vec<ClockConstraint>,
}

impl FromIterator<ClockConstraint> for DisjunctSet {
    fn from_iter<T: IntoIterator<Item = ClockConstraint>>(iter: T) -> Self {
        let set: BTreeSet<ClockConstraint> = iter.into_iter().collect();
        DisjunctSet { disjuncts: set.into_iter().collect() }
    }
}

impl DisjunctSet {
    pub fn disjuncts(&self) -> &[ClockConstraint] {
        &self.disjuncts
    }

    pub fn is_empty(&self) -> bool {
        self.disjuncts.is_empty()
    }

    pub fn len(&self) -> usize {
        self.disjuncts.len()
    }

    pub fn satisfies(&self, valuation: &impl ClockLookup) -> Result<bool, ConstraintError> {
        for d in &self.disjuncts {
            if d.satisfies(valuation)? {
                return Ok(true);
            }
        }
        Ok(false)
    }

    /// Distributes a conjunct over every disjunct.
    pub fn and(&self, conjunct: &ClockConstraint) -> DisjunctSet {
        self.disjuncts.iter().map(|d| conjunct.and(d)).collect()
    }
}

impl fmt::Display for DisjunctSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.disjuncts.is_empty() {
            return f.write_str("false");
        }
        for (i, d) in self.disjuncts.iter().enumerate() {
            if i > 0 {
                f.write_str(" || ")?;
            }
            write!(f, "({d})")?;
        }
        Ok(())
    }
}

struct Parser {
    chars: Vec<char>,
    pos: usize,
}

impl Parser {
    fn new(src: &str) -> Self {
        Parser { chars: src.chars().collect(), pos: 0 }
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T, ConstraintError> {
        Err(ConstraintError::Parse { column: self.pos + 1, message: message.into() })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn eat(&mut self, s: &str) -> bool {
        let n = s.chars().count();
        if self.chars.len() >= self.pos + n && s.chars().eq(self.chars[self.pos..self.pos + n].iter().copied()) {
            self.pos += n;
            true
        } else {
            false
        }
    }

    fn parse(mut self) -> Result<ClockConstraint, ConstraintError> {
        let mut result = ClockConstraint::TRUE;
        loop {
            self.skip_ws();
            let term = self.term()?;
            result = result.and(&term);
            self.skip_ws();
            if self.peek().is_none() {
                return Ok(result);
            }
            if !self.eat("&&") {
                return self.error("expected `&&` or end of constraint");
            }
        }
    }

    fn ident(&mut self) -> Option<String> {
        let start = self.pos;
        match self.peek() {
            Some(c) if c.is_alphabetic() || c == '_' => self.pos += 1,
            _ => return None,
        }
        while let Some(c) = self.peek() {
            if c.is_alphanumeric() || c == '_' || c == '\'' {
                self.pos += 1;
            } else {
                break;
            }
        }
        Some(self.chars[start..self.pos].iter().collect())
    }

    fn term(&mut self) -> Result<ClockConstraint, ConstraintError> {
        let start = self.pos;
        let Some(name) = self.ident() else {
            return self.error("expected a clock name, `true` or `false`");
        };
        match name.as_str() {
            "true" => return Ok(ClockConstraint::TRUE),
            "false" => return Ok(ClockConstraint::FALSE),
            _ => {}
        }
        self.skip_ws();
        let rel = if self.eat("<=") {
            Some(Rel::Le)
        } else if self.eat(">=") {
            Some(Rel::Ge)
        } else if self.eat("==") {
            None
        } else if self.eat("<") {
            Some(Rel::Lt)
        } else if self.eat(">") {
            Some(Rel::Gt)
        } else {
            return self.error(format!("expected a relation after clock `{name}`"));
        };
        self.skip_ws();
        let num_start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.pos += 1;
        }
        if num_start == self.pos {
            return self.error("expected a non-negative integer bound");
        }
        let digits: String = self.chars[num_start..self.pos].iter().collect();
        let bound: u32 = match digits.parse() {
            Ok(b) => b,
            Err(_) => {
                self.pos = start;
                return self.error(format!("bound `{digits}` out of range"));
            }
        };
        Ok(match rel {
            Some(rel) => ClockConstraint::atom(name, rel, bound),
            None => ClockConstraint::equals(name, bound),
        })
    }
}
