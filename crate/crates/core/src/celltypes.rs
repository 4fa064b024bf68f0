//! Atom orderings, lifted interpretations and the `n_ij` / `n_ijv` tables.
//!
//! A 1-type index `i` assigns the unary atoms (including diagonals `R(x,x)`)
//! and a 2-type index `v` the atoms mentioning both variables. The first atom
//! of each list is the most significant bit of the index.
//!
//! Tables are stored per pair of valid 1-types as a *residual*: the kernel
//! `Φ(x,y) ∧ Φ(y,x)` with every unary atom substituted, leaving a formula over
//! the binary slots only. Residuals are deduplicated, so `n_ij` and every
//! `n_ijv` are available without materialising the `2^b` columns.

use crate::error::{Error, Result};
use crate::formula::{Formula, Signature, Terms, Var};
use rayon::prelude::*;
use serde::Serialize;
use std::collections::HashMap;
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum UnaryAtom {
    /// `P(x)`
    Pred(String),
    /// `R(x,x)`
    Diagonal(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BinaryAtom {
    pub pred: String,
    /// `R(y,x)` rather than `R(x,y)`.
    pub reversed: bool,
}

impl fmt::Display for UnaryAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            UnaryAtom::Pred(p) => write!(f, "{p}(x)"),
            UnaryAtom::Diagonal(p) => write!(f, "{p}(x,x)"),
        }
    }
}

impl fmt::Display for BinaryAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.reversed {
            write!(f, "{}(y,x)", self.pred)
        } else {
            write!(f, "{}(x,y)", self.pred)
        }
    }
}

/// Where a predicate lives in the atom order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Slots {
    Unary(usize),
    Binary {
        diagonal: usize,
        forward: usize,
        backward: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AtomOrder {
    pub unary: Vec<UnaryAtom>,
    pub binary: Vec<BinaryAtom>,
    slots: HashMap<String, Slots>,
}

impl AtomOrder {
    /// Unary predicates, then binary diagonals, each in declaration order;
    /// binary atoms per predicate with `(x,y)` before `(y,x)`.
    pub fn new(sig: &Signature) -> Self {
        let mut unary: Vec<UnaryAtom> = sig.unary.iter().cloned().map(UnaryAtom::Pred).collect();
        unary.extend(sig.binary.iter().cloned().map(UnaryAtom::Diagonal));
        let mut binary = Vec::new();
        for p in &sig.binary {
            binary.push(BinaryAtom {
                pred: p.clone(),
                reversed: false,
            });
            binary.push(BinaryAtom {
                pred: p.clone(),
                reversed: true,
            });
        }
        let mut slots = HashMap::new();
        for (s, p) in sig.unary.iter().enumerate() {
            slots.insert(p.clone(), Slots::Unary(s));
        }
        for (k, p) in sig.binary.iter().enumerate() {
            slots.insert(
                p.clone(),
                Slots::Binary {
                    diagonal: sig.unary.len() + k,
                    forward: 2 * k,
                    backward: 2 * k + 1,
                },
            );
        }
        AtomOrder {
            unary,
            binary,
            slots,
        }
    }

    pub fn u(&self) -> usize {
        self.unary.len()
    }

    pub fn b(&self) -> usize {
        self.binary.len()
    }

    pub fn slots(&self, pred: &str) -> Option<Slots> {
        self.slots.get(pred).copied()
    }

    /// Truth of unary atom `slot` under 1-type `i`.
    #[inline]
    pub fn unary_bit(&self, i: usize, slot: usize) -> bool {
        (i >> (self.u() - 1 - slot)) & 1 == 1
    }

    /// Truth of binary atom `slot` under 2-type `v`.
    #[inline]
    pub fn binary_bit(&self, v: u64, slot: usize) -> bool {
        (v >> (self.b() - 1 - slot)) & 1 == 1
    }

    /// The 2-type seen from the other element: `R(x,y)` and `R(y,x)` exchanged.
    pub fn swap_v(&self, v: u64) -> u64 {
        let mut out = 0u64;
        for k in 0..self.b() / 2 {
            let fwd = self.binary_bit(v, 2 * k) as u64;
            let bwd = self.binary_bit(v, 2 * k + 1) as u64;
            out = (out << 2) | (bwd << 1) | fwd;
        }
        out
    }
}

/// Which binary slot plays `R(x,y)` / `R(y,x)` for a given substitution.
fn atom_leaf(order: &AtomOrder, pred: &str, terms: Terms, place: &impl Fn(Var) -> Var) -> Expr {
    match (order.slots(pred), terms) {
        (Some(Slots::Unary(s)), Terms::Unary(v)) => match place(v) {
            Var::X => Expr::UX(s),
            Var::Y => Expr::UY(s),
        },
        (
            Some(Slots::Binary {
                diagonal,
                forward,
                backward,
            }),
            Terms::Binary(a, b),
        ) => match (place(a), place(b)) {
            (Var::X, Var::X) => Expr::UX(diagonal),
            (Var::Y, Var::Y) => Expr::UY(diagonal),
            (Var::X, Var::Y) => Expr::B(forward),
            (Var::Y, Var::X) => Expr::B(backward),
        },
        _ => panic!("predicate `{pred}` is not in the atom order with this arity"),
    }
}

/// Kernel compiled against an atom order; leaves are slot references.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Expr {
    Const(bool),
    UX(usize),
    UY(usize),
    B(usize),
    Not(Box<Expr>),
    And(Vec<Expr>),
    Or(Vec<Expr>),
}

impl Expr {
    pub fn compile(f: &Formula, order: &AtomOrder, place: &impl Fn(Var) -> Var) -> Expr {
        let rec = |g: &Formula| Self::compile(g, order, place);
        let not = |e: Expr| Expr::Not(Box::new(e)).simplify();
        match f {
            Formula::True => Expr::Const(true),
            Formula::False => Expr::Const(false),
            Formula::Atom(a) => atom_leaf(order, &a.pred, a.terms, place),
            Formula::Eq(a, b) => Expr::Const(place(*a) == place(*b)),
            Formula::Neq(a, b) => Expr::Const(place(*a) != place(*b)),
            Formula::Not(g) => not(rec(g)),
            Formula::And(a, b) => Expr::And(vec![rec(a), rec(b)]).simplify(),
            Formula::Or(a, b) => Expr::Or(vec![rec(a), rec(b)]).simplify(),
            Formula::Implies(a, b) => Expr::Or(vec![not(rec(a)), rec(b)]).simplify(),
            Formula::Iff(a, b) => {
                let (a, b) = (rec(a), rec(b));
                let both = Expr::And(vec![a.clone(), b.clone()]).simplify();
                let neither = Expr::And(vec![not(a), not(b)]).simplify();
                Expr::Or(vec![both, neither]).simplify()
            }
            Formula::Forall(..) | Formula::Exists(..) | Formula::CountExists(..) => {
                panic!("kernel must be quantifier-free")
            }
        }
    }

    /// Substitutes unary leaves; `None` leaves them in place.
    pub fn substitute(
        &self,
        x: &impl Fn(usize) -> Option<bool>,
        y: &impl Fn(usize) -> Option<bool>,
    ) -> Expr {
        let e = match self {
            Expr::UX(s) => return x(*s).map_or_else(|| self.clone(), Expr::Const),
            Expr::UY(s) => return y(*s).map_or_else(|| self.clone(), Expr::Const),
            Expr::Const(_) | Expr::B(_) => return self.clone(),
            Expr::Not(g) => Expr::Not(Box::new(g.substitute(x, y))),
            Expr::And(v) => Expr::And(v.iter().map(|g| g.substitute(x, y)).collect()),
            Expr::Or(v) => Expr::Or(v.iter().map(|g| g.substitute(x, y)).collect()),
        };
        e.simplify()
    }

    /// Constant folding, flattening and duplicate removal at the root;
    /// children are assumed simplified already.
    fn simplify(self) -> Expr {
        match self {
            Expr::Not(g) => match *g {
                Expr::Const(c) => Expr::Const(!c),
                Expr::Not(h) => *h,
                other => Expr::Not(Box::new(other)),
            },
            Expr::And(v) => Self::junction(v, true),
            Expr::Or(v) => Self::junction(v, false),
            other => other,
        }
    }

    fn junction(children: Vec<Expr>, is_and: bool) -> Expr {
        let mut out = Vec::with_capacity(children.len());
        for c in children {
            match c {
                Expr::Const(b) if b == is_and => {}
                Expr::Const(b) => return Expr::Const(b),
                Expr::And(inner) if is_and => out.extend(inner),
                Expr::Or(inner) if !is_and => out.extend(inner),
                other => {
                    if !out.contains(&other) {
                        out.push(other)
                    }
                }
            }
        }
        match out.len() {
            0 => Expr::Const(is_and),
            1 => out.pop().unwrap(),
            _ if is_and => Expr::And(out),
            _ => Expr::Or(out),
        }
    }

    pub fn eval(
        &self,
        x: &impl Fn(usize) -> bool,
        y: &impl Fn(usize) -> bool,
        v: &impl Fn(usize) -> bool,
    ) -> bool {
        match self {
            Expr::Const(c) => *c,
            Expr::UX(s) => x(*s),
            Expr::UY(s) => y(*s),
            Expr::B(s) => v(*s),
            Expr::Not(g) => !g.eval(x, y, v),
            Expr::And(gs) => gs.iter().all(|g| g.eval(x, y, v)),
            Expr::Or(gs) => gs.iter().any(|g| g.eval(x, y, v)),
        }
    }

    pub fn binary_slots(&self, out: &mut Vec<usize>) {
        match self {
            Expr::B(s) => {
                if !out.contains(s) {
                    out.push(*s)
                }
            }
            Expr::Const(_) | Expr::UX(_) | Expr::UY(_) => {}
            Expr::Not(g) => g.binary_slots(out),
            Expr::And(gs) | Expr::Or(gs) => gs.iter().for_each(|g| g.binary_slots(out)),
        }
    }
}

/// The pair kernel with both 1-types fixed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Residual {
    pub expr: Expr,
    /// Binary slots the residual depends on, ascending.
    pub slots: Vec<usize>,
    /// Satisfying assignments of `slots`.
    pub models: u64,
}

impl Residual {
    fn new(expr: Expr) -> Self {
        let mut slots = Vec::new();
        expr.binary_slots(&mut slots);
        slots.sort_unstable();
        let mut models = 0u64;
        for bits in 0..1u64 << slots.len() {
            if expr.eval(&|_| unreachable!(), &|_| unreachable!(), &|s| {
                local_bit(&slots, bits, s)
            }) {
                models += 1;
            }
        }
        Residual {
            expr,
            slots,
            models,
        }
    }

    /// Evaluates under a 2-type given as a per-slot predicate.
    pub fn holds(&self, v: &impl Fn(usize) -> bool) -> bool {
        self.expr.eval(&|_| unreachable!(), &|_| unreachable!(), v)
    }
}

/// Bit for `slot` inside a compact assignment over `slots` (first = MSB).
pub fn local_bit(slots: &[usize], bits: u64, slot: usize) -> bool {
    let pos = slots
        .iter()
        .position(|s| *s == slot)
        .expect("slot not tracked");
    (bits >> (slots.len() - 1 - pos)) & 1 == 1
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TableLimits {
    pub max_unary: usize,
    pub max_binary: usize,
    /// Upper bound on stored pairs of valid 1-types.
    pub max_pairs: usize,
}

impl Default for TableLimits {
    fn default() -> Self {
        TableLimits {
            max_unary: 20,
            max_binary: 20,
            max_pairs: 50_000_000,
        }
    }
}

#[derive(Debug, Clone)]
pub struct TypeTables {
    pub order: AtomOrder,
    /// 1-types satisfying `Φ(x,x)`, ascending.
    pub valid: Vec<usize>,
    position: Vec<u32>,
    pub residuals: Vec<Residual>,
    /// Residual id per pair of positions `a <= b` in `valid`, row-major upper triangle.
    pair: Vec<u32>,
}

const INVALID: u32 = u32::MAX;

impl TypeTables {
    pub fn u(&self) -> usize {
        self.order.u()
    }

    pub fn b(&self) -> usize {
        self.order.b()
    }

    pub fn is_valid(&self, i: usize) -> bool {
        self.position[i] != INVALID
    }

    /// Position of a valid type in [`Self::valid`].
    pub fn position(&self, i: usize) -> Option<usize> {
        let p = self.position[i];
        (p != INVALID).then_some(p as usize)
    }

    fn tri(&self, a: usize, b: usize) -> usize {
        let t = self.valid.len();
        a * t - a * (a + 1) / 2 + b
    }

    /// Residual id for valid positions `a <= b` (x has type `valid[a]`).
    #[inline]
    pub fn residual_id(&self, a: usize, b: usize) -> usize {
        debug_assert!(a <= b);
        self.pair[self.tri(a, b)] as usize
    }

    pub fn residual_of(&self, a: usize, b: usize) -> &Residual {
        &self.residuals[self.residual_id(a, b)]
    }

    /// Number of satisfying 2-types; symmetric in `i`, `j`.
    pub fn n_ij(&self, i: usize, j: usize) -> u64 {
        let (Some(a), Some(b)) = (self.position(i), self.position(j)) else {
            return 0;
        };
        let r = self.residual_of(a.min(b), a.max(b));
        r.models << (self.b() - r.slots.len())
    }

    pub fn n_ijv(&self, i: usize, j: usize, v: u64) -> bool {
        let (Some(a), Some(b)) = (self.position(i), self.position(j)) else {
            return false;
        };
        let v = if a <= b { v } else { self.order.swap_v(v) };
        self.residual_of(a.min(b), a.max(b))
            .holds(&|s| self.order.binary_bit(v, s))
    }

    pub fn dump(&self) -> TableDump {
        let types = 1usize << self.u();
        let mut n_ij = Vec::new();
        let mut n_ijv = Vec::new();
        for i in 0..types {
            for j in i..types {
                let count = self.n_ij(i, j);
                n_ij.push(PairCount { i, j, count });
                if count > 0 {
                    for v in 0..1u64 << self.b() {
                        if self.n_ijv(i, j, v) {
                            n_ijv.push(PairType { i, j, v });
                        }
                    }
                }
            }
        }
        TableDump {
            unary_atoms: self.order.unary.iter().map(|a| a.to_string()).collect(),
            binary_atoms: self.order.binary.iter().map(|a| a.to_string()).collect(),
            u: self.u(),
            b: self.b(),
            valid_types: self.valid.clone(),
            n_ij,
            n_ijv,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PairCount {
    pub i: usize,
    pub j: usize,
    pub count: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct PairType {
    pub i: usize,
    pub j: usize,
    pub v: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct TableDump {
    pub unary_atoms: Vec<String>,
    pub binary_atoms: Vec<String>,
    pub u: usize,
    pub b: usize,
    pub valid_types: Vec<usize>,
    pub n_ij: Vec<PairCount>,
    pub n_ijv: Vec<PairType>,
}

/// The four instantiations of a kernel used by the tables.
pub struct Instances {
    pub xx: Expr,
    pub xy: Expr,
    pub yx: Expr,
}

impl Instances {
    pub fn new(kernel: &Formula, order: &AtomOrder) -> Self {
        Instances {
            xx: Expr::compile(kernel, order, &|_| Var::X),
            xy: Expr::compile(kernel, order, &|v| v),
            yx: Expr::compile(kernel, order, &|v| v.other()),
        }
    }
}

pub fn build_tables(kernel: &Formula, sig: &Signature) -> Result<TypeTables> {
    build_tables_with(kernel, sig, &TableLimits::default())
}

pub fn build_tables_with(
    kernel: &Formula,
    sig: &Signature,
    limits: &TableLimits,
) -> Result<TypeTables> {
    let order = AtomOrder::new(sig);
    if order.u() > limits.max_unary {
        return Err(Error::Capacity(format!(
            "{} unary atoms exceed the limit of {}",
            order.u(),
            limits.max_unary
        )));
    }
    if order.b() > limits.max_binary {
        return Err(Error::Capacity(format!(
            "{} binary atoms exceed the limit of {}",
            order.b(),
            limits.max_binary
        )));
    }
    let inst = Instances::new(kernel, &order);
    let types = 1usize << order.u();
    let valid: Vec<usize> = (0..types)
        .into_par_iter()
        .filter(|&i| {
            inst.xx.eval(
                &|s| order.unary_bit(i, s),
                &|_| unreachable!(),
                &|_| unreachable!(),
            )
        })
        .collect();
    let t = valid.len();
    let pairs = t * (t + 1) / 2;
    if pairs > limits.max_pairs {
        return Err(Error::Capacity(format!(
            "{t} consistent 1-types give {pairs} pairs, above the limit of {}",
            limits.max_pairs
        )));
    }
    let mut position = vec![INVALID; types];
    for (p, &i) in valid.iter().enumerate() {
        position[i] = p as u32;
    }

    let pair_kernel = Expr::And(vec![inst.xy.clone(), inst.yx.clone()]).simplify();
    let rows: Vec<(Vec<Expr>, Vec<u32>)> = (0..t)
        .into_par_iter()
        .map(|a| {
            let i = valid[a];
            let partial = pair_kernel.substitute(&|s| Some(order.unary_bit(i, s)), &|_| None);
            let mut local: HashMap<Expr, u32> = HashMap::new();
            let mut exprs = Vec::new();
            let mut ids = Vec::with_capacity(t - a);
            for &j in &valid[a..] {
                let r = partial.substitute(&|_| None, &|s| Some(order.unary_bit(j, s)));
                let id = *local.entry(r.clone()).or_insert_with(|| {
                    exprs.push(r);
                    exprs.len() as u32 - 1
                });
                ids.push(id);
            }
            (exprs, ids)
        })
        .collect();

    let mut global: HashMap<Expr, u32> = HashMap::new();
    let mut unique: Vec<Expr> = Vec::new();
    let mut pair = Vec::with_capacity(pairs);
    for (exprs, ids) in rows {
        let map: Vec<u32> = exprs
            .into_iter()
            .map(|e| {
                *global.entry(e.clone()).or_insert_with(|| {
                    unique.push(e);
                    unique.len() as u32 - 1
                })
            })
            .collect();
        pair.extend(ids.into_iter().map(|id| map[id as usize]));
    }
    let residuals: Vec<Residual> = unique.into_par_iter().map(Residual::new).collect();
    Ok(TypeTables {
        order,
        valid,
        position,
        residuals,
        pair,
    })
}

/// Direct evaluation of `Φ(x,x) ∧ Φ(x,y) ∧ Φ(y,x) ∧ Φ(y,y)` on the formula
/// tree under the lifted interpretation `(i, j, v)`.
pub fn eval_lifted(kernel: &Formula, order: &AtomOrder, i: usize, j: usize, v: u64) -> bool {
    let truth = |a: Var, b: Var| {
        let atom = |pred: &str, terms: Terms| -> bool {
            let sub = |t: Var| if t == Var::X { a } else { b };
            let unary = |var: Var, slot: usize| match var {
                Var::X => order.unary_bit(i, slot),
                Var::Y => order.unary_bit(j, slot),
            };
            match (order.slots(pred).expect("undeclared predicate"), terms) {
                (Slots::Unary(s), Terms::Unary(t)) => unary(sub(t), s),
                (
                    Slots::Binary {
                        diagonal,
                        forward,
                        backward,
                    },
                    Terms::Binary(p, q),
                ) => match (sub(p), sub(q)) {
                    (Var::X, Var::X) => unary(Var::X, diagonal),
                    (Var::Y, Var::Y) => unary(Var::Y, diagonal),
                    (Var::X, Var::Y) => order.binary_bit(v, forward),
                    (Var::Y, Var::X) => order.binary_bit(v, backward),
                },
                _ => panic!("arity mismatch for `{pred}`"),
            }
        };
        eval_qf(kernel, &atom, &|p, q| {
            let sub = |t: Var| if t == Var::X { a } else { b };
            sub(p) == sub(q)
        })
    };
    truth(Var::X, Var::X) && truth(Var::X, Var::Y) && truth(Var::Y, Var::X) && truth(Var::Y, Var::Y)
}

fn eval_qf(
    f: &Formula,
    atom: &impl Fn(&str, Terms) -> bool,
    eq: &impl Fn(Var, Var) -> bool,
) -> bool {
    match f {
        Formula::True => true,
        Formula::False => false,
        Formula::Atom(a) => atom(&a.pred, a.terms),
        Formula::Eq(p, q) => eq(*p, *q),
        Formula::Neq(p, q) => !eq(*p, *q),
        Formula::Not(g) => !eval_qf(g, atom, eq),
        Formula::And(a, b) => eval_qf(a, atom, eq) && eval_qf(b, atom, eq),
        Formula::Or(a, b) => eval_qf(a, atom, eq) || eval_qf(b, atom, eq),
        Formula::Implies(a, b) => !eval_qf(a, atom, eq) || eval_qf(b, atom, eq),
        Formula::Iff(a, b) => eval_qf(a, atom, eq) == eval_qf(b, atom, eq),
        _ => panic!("kernel must be quantifier-free"),
    }
}
