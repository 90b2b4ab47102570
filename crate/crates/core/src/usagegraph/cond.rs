//! Boolean formulas over opaque predicate atoms.

use std::collections::BTreeSet;
use std::fmt;

/// Truth tables are only built over at most this many atoms.
pub const MAX_TABLE_ATOMS: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SymbolicCondition {
    True,
    False,
    Atom(u32),
    Not(Box<SymbolicCondition>),
    And(Vec<SymbolicCondition>),
    Or(Vec<SymbolicCondition>),
}

use SymbolicCondition as C;

impl SymbolicCondition {
    pub fn atom(a: u32) -> Self {
        C::Atom(a)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(self) -> Self {
        match self {
            C::True => C::False,
            C::False => C::True,
            C::Not(x) => *x,
            x => C::Not(Box::new(x)),
        }
    }

    pub fn and(self, other: Self) -> Self {
        match (self, other) {
            (C::False, _) | (_, C::False) => C::False,
            (C::True, x) | (x, C::True) => x,
            (a, b) if a == b => a,
            (C::And(mut xs), C::And(ys)) => {
                xs.extend(ys);
                C::And(xs)
            }
            (C::And(mut xs), y) | (y, C::And(mut xs)) => {
                xs.push(y);
                C::And(xs)
            }
            (a, b) => C::And(vec![a, b]),
        }
    }

    pub fn or(self, other: Self) -> Self {
        match (self, other) {
            (C::True, _) | (_, C::True) => C::True,
            (C::False, x) | (x, C::False) => x,
            (a, b) if a == b => a,
            (C::Or(mut xs), C::Or(ys)) => {
                xs.extend(ys);
                C::Or(xs)
            }
            (C::Or(mut xs), y) | (y, C::Or(mut xs)) => {
                xs.push(y);
                C::Or(xs)
            }
            (a, b) => C::Or(vec![a, b]),
        }
    }

    pub fn atoms(&self) -> BTreeSet<u32> {
        let mut out = BTreeSet::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms(&self, out: &mut BTreeSet<u32>) {
        match self {
            C::Atom(a) => {
                out.insert(*a);
            }
            C::Not(x) => x.collect_atoms(out),
            C::And(xs) | C::Or(xs) => xs.iter().for_each(|x| x.collect_atoms(out)),
            C::True | C::False => {}
        }
    }

    pub fn eval(&self, env: &dyn Fn(u32) -> bool) -> bool {
        match self {
            C::True => true,
            C::False => false,
            C::Atom(a) => env(*a),
            C::Not(x) => !x.eval(env),
            C::And(xs) => xs.iter().all(|x| x.eval(env)),
            C::Or(xs) => xs.iter().any(|x| x.eval(env)),
        }
    }

    /// Replaces atom `a` by a constant and folds.
    pub fn substitute(&self, a: u32, value: bool) -> Self {
        match self {
            C::Atom(x) if *x == a => {
                if value {
                    C::True
                } else {
                    C::False
                }
            }
            C::True | C::False | C::Atom(_) => self.clone(),
            C::Not(x) => x.substitute(a, value).not(),
            C::And(xs) => xs.iter().fold(C::True, |acc, x| acc.and(x.substitute(a, value))),
            C::Or(xs) => xs.iter().fold(C::False, |acc, x| acc.or(x.substitute(a, value))),
        }
    }

    /// Truth table over `atoms` (bit i of the row index = value of `atoms[i]`),
    /// or `None` when there are too many atoms.
    pub fn truth_table(&self, atoms: &[u32]) -> Option<Vec<bool>> {
        if atoms.len() > MAX_TABLE_ATOMS {
            return None;
        }
        Some(
            (0..1usize << atoms.len())
                .map(|row| {
                    self.eval(&|a| atoms.iter().position(|x| *x == a).is_some_and(|i| row >> i & 1 == 1))
                })
                .collect(),
        )
    }

    /// Semantic equivalence by truth table; structural when too many atoms.
    pub fn equivalent(&self, other: &Self) -> bool {
        let atoms: Vec<u32> = self.atoms().union(&other.atoms()).copied().collect();
        match (self.truth_table(&atoms), other.truth_table(&atoms)) {
            (Some(a), Some(b)) => a == b,
            _ => self == other,
        }
    }

    pub fn is_tautology(&self) -> bool {
        self.equivalent(&C::True)
    }

    /// Whether the value of the formula depends on atom `a`.
    pub fn depends_on(&self, a: u32) -> bool {
        if !self.atoms().contains(&a) {
            return false;
        }
        let atoms: Vec<u32> = self.atoms().into_iter().collect();
        if atoms.len() > MAX_TABLE_ATOMS {
            return true;
        }
        !self.substitute(a, true).equivalent(&self.substitute(a, false))
    }

    /// Drops atoms the formula does not depend on and folds constants.
    pub fn simplify(&self) -> Self {
        let atoms = self.atoms();
        if atoms.len() > MAX_TABLE_ATOMS {
            return self.clone();
        }
        let mut f = self.clone();
        for a in atoms {
            if !f.depends_on(a) {
                f = f.substitute(a, true);
            }
        }
        if f.atoms().is_empty() {
            if f.eval(&|_| false) {
                C::True
            } else {
                C::False
            }
        } else {
            f
        }
    }
}

impl fmt::Display for SymbolicCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |f: &mut fmt::Formatter<'_>, xs: &[C], op: &str| -> fmt::Result {
            f.write_str("(")?;
            for (i, x) in xs.iter().enumerate() {
                if i > 0 {
                    write!(f, " {op} ")?;
                }
                write!(f, "{x}")?;
            }
            f.write_str(")")
        };
        match self {
            C::True => f.write_str("true"),
            C::False => f.write_str("false"),
            C::Atom(a) => write!(f, "p{a}"),
            C::Not(x) => write!(f, "!{x}"),
            C::And(xs) => join(f, xs, "&"),
            C::Or(xs) => join(f, xs, "|"),
        }
    }
}
