//! Signatures, C² formulas, cardinality constraints and the problem container.

mod display;
mod parser;

pub use parser::{
    parse_cardinality, parse_formula, parse_problem, parse_problem_with, ParseOptions,
};

use crate::weights::WeightSpec;
use serde::Serialize;
use std::collections::BTreeSet;
use std::fmt;

/// Prefix reserved for compiler-introduced predicates.
pub const RESERVED_PREFIX: char = '$';

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Var {
    X,
    Y,
}

impl Var {
    pub fn other(self) -> Var {
        match self {
            Var::X => Var::Y,
            Var::Y => Var::X,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Var::X => "x",
            Var::Y => "y",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Terms {
    Unary(Var),
    Binary(Var, Var),
}

impl Terms {
    pub fn arity(&self) -> usize {
        match self {
            Terms::Unary(_) => 1,
            Terms::Binary(..) => 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Atom {
    pub pred: String,
    pub terms: Terms,
}

/// Comparator of a counting quantifier `exists[<op> m] v`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Comparator {
    Eq,
    Le,
    Ge,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    True,
    False,
    Atom(Atom),
    Eq(Var, Var),
    Neq(Var, Var),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
    Forall(Var, Box<Formula>),
    Exists(Var, Box<Formula>),
    CountExists(Comparator, u32, Var, Box<Formula>),
}

impl Formula {
    pub fn unary(pred: impl Into<String>, v: Var) -> Formula {
        Formula::Atom(Atom {
            pred: pred.into(),
            terms: Terms::Unary(v),
        })
    }

    pub fn binary(pred: impl Into<String>, a: Var, b: Var) -> Formula {
        Formula::Atom(Atom {
            pred: pred.into(),
            terms: Terms::Binary(a, b),
        })
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn iff(a: Formula, b: Formula) -> Formula {
        Formula::Iff(Box::new(a), Box::new(b))
    }

    pub fn forall(v: Var, body: Formula) -> Formula {
        Formula::Forall(v, Box::new(body))
    }

    pub fn exists(v: Var, body: Formula) -> Formula {
        Formula::Exists(v, Box::new(body))
    }

    pub fn count_exists(cmp: Comparator, m: u32, v: Var, body: Formula) -> Formula {
        Formula::CountExists(cmp, m, v, Box::new(body))
    }

    /// Left-nested conjunction; `true` when empty.
    pub fn conjunction(parts: impl IntoIterator<Item = Formula>) -> Formula {
        parts
            .into_iter()
            .reduce(Formula::and)
            .unwrap_or(Formula::True)
    }

    /// Left-nested disjunction; `false` when empty.
    pub fn disjunction(parts: impl IntoIterator<Item = Formula>) -> Formula {
        parts
            .into_iter()
            .reduce(Formula::or)
            .unwrap_or(Formula::False)
    }

    pub fn free_vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<Var>, out: &mut BTreeSet<Var>) {
        let mut see = |v: Var, bound: &Vec<Var>| {
            if !bound.contains(&v) {
                out.insert(v);
            }
        };
        match self {
            Formula::True | Formula::False => {}
            Formula::Atom(a) => match a.terms {
                Terms::Unary(v) => see(v, bound),
                Terms::Binary(p, q) => {
                    see(p, bound);
                    see(q, bound);
                }
            },
            Formula::Eq(p, q) | Formula::Neq(p, q) => {
                see(*p, bound);
                see(*q, bound);
            }
            Formula::Not(f) => f.collect_free(bound, out),
            Formula::And(a, b)
            | Formula::Or(a, b)
            | Formula::Implies(a, b)
            | Formula::Iff(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Formula::Forall(v, f) | Formula::Exists(v, f) | Formula::CountExists(_, _, v, f) => {
                bound.push(*v);
                f.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    pub fn is_quantifier_free(&self) -> bool {
        match self {
            Formula::True
            | Formula::False
            | Formula::Atom(_)
            | Formula::Eq(..)
            | Formula::Neq(..) => true,
            Formula::Not(f) => f.is_quantifier_free(),
            Formula::And(a, b)
            | Formula::Or(a, b)
            | Formula::Implies(a, b)
            | Formula::Iff(a, b) => a.is_quantifier_free() && b.is_quantifier_free(),
            Formula::Forall(..) | Formula::Exists(..) | Formula::CountExists(..) => false,
        }
    }

    /// Exchanges every occurrence of `x` and `y`, bound or free.
    pub fn swap_vars(&self) -> Formula {
        self.map_vars(&|v| v.other())
    }

    /// Renames every variable occurrence through `f`.
    pub fn map_vars(&self, f: &impl Fn(Var) -> Var) -> Formula {
        match self {
            Formula::True => Formula::True,
            Formula::False => Formula::False,
            Formula::Atom(a) => Formula::Atom(Atom {
                pred: a.pred.clone(),
                terms: match a.terms {
                    Terms::Unary(v) => Terms::Unary(f(v)),
                    Terms::Binary(p, q) => Terms::Binary(f(p), f(q)),
                },
            }),
            Formula::Eq(p, q) => Formula::Eq(f(*p), f(*q)),
            Formula::Neq(p, q) => Formula::Neq(f(*p), f(*q)),
            Formula::Not(g) => Formula::not(g.map_vars(f)),
            Formula::And(a, b) => Formula::and(a.map_vars(f), b.map_vars(f)),
            Formula::Or(a, b) => Formula::or(a.map_vars(f), b.map_vars(f)),
            Formula::Implies(a, b) => Formula::implies(a.map_vars(f), b.map_vars(f)),
            Formula::Iff(a, b) => Formula::iff(a.map_vars(f), b.map_vars(f)),
            Formula::Forall(v, g) => Formula::forall(f(*v), g.map_vars(f)),
            Formula::Exists(v, g) => Formula::exists(f(*v), g.map_vars(f)),
            Formula::CountExists(c, m, v, g) => Formula::count_exists(*c, *m, f(*v), g.map_vars(f)),
        }
    }

    /// Predicate names in order of first occurrence.
    pub fn predicates(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        self.visit_atoms(&mut |a| {
            if !out.contains(&a.pred) {
                out.push(a.pred.clone());
            }
        });
        out
    }

    pub fn visit_atoms(&self, visit: &mut impl FnMut(&Atom)) {
        match self {
            Formula::Atom(a) => visit(a),
            Formula::True | Formula::False | Formula::Eq(..) | Formula::Neq(..) => {}
            Formula::Not(f)
            | Formula::Forall(_, f)
            | Formula::Exists(_, f)
            | Formula::CountExists(_, _, _, f) => f.visit_atoms(visit),
            Formula::And(a, b)
            | Formula::Or(a, b)
            | Formula::Implies(a, b)
            | Formula::Iff(a, b) => {
                a.visit_atoms(visit);
                b.visit_atoms(visit);
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Arity {
    Unary,
    Binary,
}

/// Declared predicates; declaration order seeds every downstream bit order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Signature {
    pub unary: Vec<String>,
    pub binary: Vec<String>,
}

impl Signature {
    pub fn new(unary: Vec<String>, binary: Vec<String>) -> Self {
        Signature { unary, binary }
    }

    pub fn arity(&self, name: &str) -> Option<Arity> {
        if self.unary.iter().any(|p| p == name) {
            Some(Arity::Unary)
        } else if self.binary.iter().any(|p| p == name) {
            Some(Arity::Binary)
        } else {
            None
        }
    }

    pub fn contains(&self, name: &str) -> bool {
        self.arity(name).is_some()
    }

    pub fn push_unary(&mut self, name: impl Into<String>) {
        let name = name.into();
        debug_assert!(!self.contains(&name), "duplicate predicate {name}");
        self.unary.push(name);
    }

    pub fn push_binary(&mut self, name: impl Into<String>) {
        let name = name.into();
        debug_assert!(!self.contains(&name), "duplicate predicate {name}");
        self.binary.push(name);
    }

    pub fn is_empty(&self) -> bool {
        self.unary.is_empty() && self.binary.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CmpOp {
    Eq,
    Le,
    Ge,
    Lt,
    Gt,
}

impl CmpOp {
    pub fn holds(self, lhs: i128, rhs: i128) -> bool {
        match self {
            CmpOp::Eq => lhs == rhs,
            CmpOp::Le => lhs <= rhs,
            CmpOp::Ge => lhs >= rhs,
            CmpOp::Lt => lhs < rhs,
            CmpOp::Gt => lhs > rhs,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Eq => "=",
            CmpOp::Le => "<=",
            CmpOp::Ge => ">=",
            CmpOp::Lt => "<",
            CmpOp::Gt => ">",
        }
    }
}

/// `Σ coeff·|pred| <op> rhs`, terms merged per predicate in order of first mention.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LinearComparison {
    pub terms: Vec<(i64, String)>,
    pub op: CmpOp,
    pub rhs: i64,
}

impl LinearComparison {
    pub fn new(terms: Vec<(i64, String)>, op: CmpOp, rhs: i64) -> Self {
        let mut merged: Vec<(i64, String)> = Vec::new();
        for (c, p) in terms {
            match merged.iter_mut().find(|(_, q)| *q == p) {
                Some((acc, _)) => *acc += c,
                None => merged.push((c, p)),
            }
        }
        merged.retain(|(c, _)| *c != 0);
        LinearComparison {
            terms: merged,
            op,
            rhs,
        }
    }

    pub fn evaluate(&self, card: &impl Fn(&str) -> u64) -> bool {
        let lhs: i128 = self
            .terms
            .iter()
            .map(|(c, p)| *c as i128 * card(p) as i128)
            .sum();
        self.op.holds(lhs, self.rhs as i128)
    }
}

/// Boolean combination of linear cardinality comparisons.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum CardinalityConstraint {
    Cmp(LinearComparison),
    Not(Box<CardinalityConstraint>),
    And(Box<CardinalityConstraint>, Box<CardinalityConstraint>),
    Or(Box<CardinalityConstraint>, Box<CardinalityConstraint>),
}

impl CardinalityConstraint {
    pub fn cmp(terms: Vec<(i64, String)>, op: CmpOp, rhs: i64) -> Self {
        CardinalityConstraint::Cmp(LinearComparison::new(terms, op, rhs))
    }

    pub fn evaluate(&self, card: &impl Fn(&str) -> u64) -> bool {
        match self {
            CardinalityConstraint::Cmp(c) => c.evaluate(card),
            CardinalityConstraint::Not(c) => !c.evaluate(card),
            CardinalityConstraint::And(a, b) => a.evaluate(card) && b.evaluate(card),
            CardinalityConstraint::Or(a, b) => a.evaluate(card) || b.evaluate(card),
        }
    }

    pub fn predicates(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_predicates(&mut out);
        out
    }

    fn collect_predicates(&self, out: &mut Vec<String>) {
        match self {
            CardinalityConstraint::Cmp(c) => {
                for (_, p) in &c.terms {
                    if !out.contains(p) {
                        out.push(p.clone());
                    }
                }
            }
            CardinalityConstraint::Not(c) => c.collect_predicates(out),
            CardinalityConstraint::And(a, b) | CardinalityConstraint::Or(a, b) => {
                a.collect_predicates(out);
                b.collect_predicates(out);
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct Problem {
    pub signature: Signature,
    pub sentence: Formula,
    pub domain: u64,
    pub constraints: Vec<CardinalityConstraint>,
    pub weights: WeightSpec,
}

impl Problem {
    pub fn new(signature: Signature, sentence: Formula, domain: u64) -> Self {
        Problem {
            signature,
            sentence,
            domain,
            constraints: Vec::new(),
            weights: WeightSpec::Unweighted,
        }
    }

    pub fn with_domain(&self, domain: u64) -> Problem {
        Problem {
            domain,
            ..self.clone()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum GroundAtom {
    Unary(String, u64),
    Binary(String, u64, u64),
}

impl fmt::Display for GroundAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroundAtom::Unary(p, c) => write!(f, "{p}({c})"),
            GroundAtom::Binary(p, c, d) => write!(f, "{p}({c},{d})"),
        }
    }
}

/// Every ground atom over constants `0..n`: unary predicates (declaration
/// order) by constant, then binary predicates by row-major pair.
pub fn ground_atoms(sig: &Signature, n: u64) -> Vec<GroundAtom> {
    let mut out = Vec::new();
    for p in &sig.unary {
        out.extend((0..n).map(|c| GroundAtom::Unary(p.clone(), c)));
    }
    for p in &sig.binary {
        for c in 0..n {
            out.extend((0..n).map(|d| GroundAtom::Binary(p.clone(), c, d)));
        }
    }
    out
}
