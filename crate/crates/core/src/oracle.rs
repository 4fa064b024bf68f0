//! Ground-truth counting by enumerating interpretations on small domains.

use crate::engine::StatView;
use crate::error::{Error, Result};
use crate::formula::{Arity, Comparator, Formula, GroundAtom, Problem, Signature, Terms, Var};
use crate::weights::{normalize, Distribution, WeightSpec};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use std::collections::{BTreeMap, HashMap};

#[derive(Debug, Clone)]
pub struct OracleOptions {
    /// Largest number of ground atoms the oracle will enumerate over.
    pub max_atoms: usize,
}

impl Default for OracleOptions {
    fn default() -> Self {
        OracleOptions { max_atoms: 24 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct Offsets {
    n: u64,
    preds: HashMap<String, (Arity, usize)>,
    len: usize,
}

impl Offsets {
    fn new(sig: &Signature, n: u64) -> Self {
        let mut preds = HashMap::new();
        let mut at = 0usize;
        for p in &sig.unary {
            preds.insert(p.clone(), (Arity::Unary, at));
            at += n as usize;
        }
        for p in &sig.binary {
            preds.insert(p.clone(), (Arity::Binary, at));
            at += (n * n) as usize;
        }
        Offsets { n, preds, len: at }
    }

    fn index(&self, atom: &GroundAtom) -> Option<usize> {
        match atom {
            GroundAtom::Unary(p, c) => match self.preds.get(p)? {
                (Arity::Unary, base) if *c < self.n => Some(base + *c as usize),
                _ => None,
            },
            GroundAtom::Binary(p, c, d) => match self.preds.get(p)? {
                (Arity::Binary, base) if *c < self.n && *d < self.n => {
                    Some(base + (*c * self.n + *d) as usize)
                }
                _ => None,
            },
        }
    }
}

/// Truth assignment to every ground atom, in [`crate::formula::ground_atoms`] order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Interpretation {
    signature: Signature,
    offsets: Offsets,
    bits: Vec<bool>,
}

impl Interpretation {
    /// The interpretation with every atom false.
    pub fn empty(sig: &Signature, n: u64) -> Self {
        let offsets = Offsets::new(sig, n);
        Interpretation {
            signature: sig.clone(),
            bits: vec![false; offsets.len],
            offsets,
        }
    }

    pub fn from_bits(sig: &Signature, n: u64, bits: Vec<bool>) -> Result<Self> {
        let mut w = Interpretation::empty(sig, n);
        if bits.len() != w.bits.len() {
            return Err(Error::Invalid(format!(
                "expected {} ground atoms, got {}",
                w.bits.len(),
                bits.len()
            )));
        }
        w.bits = bits;
        Ok(w)
    }

    pub fn domain(&self) -> u64 {
        self.offsets.n
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    /// Panics on atoms outside the signature or domain.
    pub fn get(&self, atom: &GroundAtom) -> bool {
        self.bits[self
            .offsets
            .index(atom)
            .expect("atom in signature and domain")]
    }

    pub fn set(&mut self, atom: &GroundAtom, value: bool) {
        let i = self
            .offsets
            .index(atom)
            .expect("atom in signature and domain");
        self.bits[i] = value;
    }
}

/// Formula with predicate names resolved to atom offsets.
#[derive(Debug, Clone)]
enum Ir {
    Const(bool),
    Unary(usize, Var),
    Binary(usize, Var, Var),
    Eq(Var, Var),
    Not(Box<Ir>),
    And(Box<Ir>, Box<Ir>),
    Or(Box<Ir>, Box<Ir>),
    Forall(Var, Box<Ir>),
    Exists(Var, Box<Ir>),
    Count(Comparator, u32, Var, Box<Ir>),
}

fn lower(f: &Formula, offsets: &Offsets) -> Ir {
    let b = |g: &Formula| Box::new(lower(g, offsets));
    match f {
        Formula::True => Ir::Const(true),
        Formula::False => Ir::Const(false),
        Formula::Atom(a) => {
            let (_, base) = offsets.preds[&a.pred];
            match a.terms {
                Terms::Unary(v) => Ir::Unary(base, v),
                Terms::Binary(v, w) => Ir::Binary(base, v, w),
            }
        }
        Formula::Eq(a, c) => Ir::Eq(*a, *c),
        Formula::Neq(a, c) => Ir::Not(Box::new(Ir::Eq(*a, *c))),
        Formula::Not(g) => Ir::Not(b(g)),
        Formula::And(g, h) => Ir::And(b(g), b(h)),
        Formula::Or(g, h) => Ir::Or(b(g), b(h)),
        Formula::Implies(g, h) => Ir::Or(Box::new(Ir::Not(b(g))), b(h)),
        Formula::Iff(g, h) => {
            let (g, h) = (lower(g, offsets), lower(h, offsets));
            Ir::Or(
                Box::new(Ir::And(Box::new(g.clone()), Box::new(h.clone()))),
                Box::new(Ir::And(
                    Box::new(Ir::Not(Box::new(g))),
                    Box::new(Ir::Not(Box::new(h))),
                )),
            )
        }
        Formula::Forall(v, g) => Ir::Forall(*v, b(g)),
        Formula::Exists(v, g) => Ir::Exists(*v, b(g)),
        Formula::CountExists(c, m, v, g) => Ir::Count(*c, *m, *v, b(g)),
    }
}

const F: u8 = 0;
const T: u8 = 1;
const U: u8 = 2;

fn slot(v: Var) -> usize {
    match v {
        Var::X => 0,
        Var::Y => 1,
    }
}

/// Kleene evaluation over a partial assignment (`U` marks unassigned atoms).
fn eval3(ir: &Ir, n: u64, env: &mut [u64; 2], vals: &[u8]) -> u8 {
    match ir {
        Ir::Const(b) => *b as u8,
        Ir::Unary(base, v) => vals[base + env[slot(*v)] as usize],
        Ir::Binary(base, v, w) => vals[base + (env[slot(*v)] * n + env[slot(*w)]) as usize],
        Ir::Eq(a, b) => (env[slot(*a)] == env[slot(*b)]) as u8,
        Ir::Not(g) => match eval3(g, n, env, vals) {
            F => T,
            T => F,
            _ => U,
        },
        Ir::And(g, h) => match eval3(g, n, env, vals) {
            F => F,
            T => eval3(h, n, env, vals),
            _ => match eval3(h, n, env, vals) {
                F => F,
                _ => U,
            },
        },
        Ir::Or(g, h) => match eval3(g, n, env, vals) {
            T => T,
            F => eval3(h, n, env, vals),
            _ => match eval3(h, n, env, vals) {
                T => T,
                _ => U,
            },
        },
        Ir::Forall(v, g) | Ir::Exists(v, g) => {
            let universal = matches!(ir, Ir::Forall(..));
            let saved = env[slot(*v)];
            let mut unknown = false;
            let mut out = None;
            for c in 0..n {
                env[slot(*v)] = c;
                match (eval3(g, n, env, vals), universal) {
                    (F, true) => {
                        out = Some(F);
                        break;
                    }
                    (T, false) => {
                        out = Some(T);
                        break;
                    }
                    (U, _) => unknown = true,
                    _ => {}
                }
            }
            env[slot(*v)] = saved;
            out.unwrap_or(if unknown { U } else { universal as u8 })
        }
        Ir::Count(cmp, m, v, g) => {
            let saved = env[slot(*v)];
            let (mut yes, mut maybe) = (0u64, 0u64);
            for c in 0..n {
                env[slot(*v)] = c;
                match eval3(g, n, env, vals) {
                    T => yes += 1,
                    U => maybe += 1,
                    _ => {}
                }
            }
            env[slot(*v)] = saved;
            let m = *m as u64;
            let (lo, hi) = (yes, yes + maybe);
            let (always, never) = match cmp {
                Comparator::Eq => (lo == m && hi == m, lo > m || hi < m),
                Comparator::Le => (hi <= m, lo > m),
                Comparator::Ge => (lo >= m, hi < m),
            };
            if always {
                T
            } else if never {
                F
            } else {
                U
            }
        }
    }
}

/// Truth of `f` in `w`; free variables read as the constant 0.
pub fn eval_sentence(f: &Formula, w: &Interpretation) -> bool {
    let ir = lower(f, &w.offsets);
    let vals: Vec<u8> = w.bits.iter().map(|&b| b as u8).collect();
    eval3(&ir, w.domain(), &mut [0, 0], &vals) == T
}

/// Cardinality of every predicate in `w`.
pub fn interpretation_stats(w: &Interpretation) -> StatView {
    let mut stats = StatView::default();
    let n = w.domain() as usize;
    for (p, &(arity, base)) in &w.offsets.preds {
        let len = match arity {
            Arity::Unary => n,
            Arity::Binary => n * n,
        };
        let count = w.bits[base..base + len].iter().filter(|&&b| b).count() as u64;
        stats.insert(p.clone(), arity, count);
    }
    stats
}

/// Weight of one interpretation, multiplied literal by literal.
fn literal_weight(spec: &WeightSpec, w: &Interpretation, stats: &StatView) -> BigRational {
    match spec {
        WeightSpec::Unweighted => BigRational::one(),
        WeightSpec::Symmetric(map) => {
            let mut acc = BigRational::one();
            let n = w.domain() as usize;
            for (p, (pos, neg)) in map {
                let (arity, base) = w.offsets.preds[p];
                let len = match arity {
                    Arity::Unary => n,
                    Arity::Binary => n * n,
                };
                for &b in &w.bits[base..base + len] {
                    acc *= if b { pos } else { neg };
                }
            }
            acc
        }
        WeightSpec::StatTable(t) => {
            let key: Vec<u64> = t.preds.iter().map(|p| stats.get(p).unwrap_or(0)).collect();
            t.lookup(&key).clone()
        }
    }
}

/// Oracle sums split by the cardinalities of `query`.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult {
    pub cells: BTreeMap<Vec<u64>, BigRational>,
    /// Satisfying interpretations (before constraints and weights when the
    /// counting shortcut applies, otherwise after constraints).
    pub models: BigInt,
    /// Search nodes visited.
    pub nodes: u64,
}

impl OracleResult {
    pub fn total(&self) -> BigRational {
        self.cells.values().fold(BigRational::zero(), |a, b| a + b)
    }
}

fn check_limit(p: &Problem, options: &OracleOptions) -> Result<Offsets> {
    let offsets = Offsets::new(&p.signature, p.domain);
    if offsets.len > options.max_atoms {
        return Err(Error::OracleLimit {
            atoms: offsets.len,
            limit: options.max_atoms,
        });
    }
    Ok(offsets)
}

struct Search<'a, Fm: FnMut(&Interpretation)> {
    ir: Ir,
    n: u64,
    vals: Vec<u8>,
    /// Count whole subtrees once the sentence is decided.
    shortcut: bool,
    models: BigInt,
    nodes: u64,
    on_model: &'a mut Fm,
    template: Interpretation,
}

impl<Fm: FnMut(&Interpretation)> Search<'_, Fm> {
    fn dfs(&mut self, pos: usize) {
        self.nodes += 1;
        let r = eval3(&self.ir, self.n, &mut [0, 0], &self.vals);
        if r == F {
            return;
        }
        if pos == self.vals.len() {
            debug_assert_eq!(r, T);
            self.models += 1;
            self.template.bits = self.vals.iter().map(|&b| b == T).collect();
            (self.on_model)(&self.template);
            return;
        }
        if r == T && self.shortcut {
            self.models += BigInt::one() << (self.vals.len() - pos);
            return;
        }
        for b in [F, T] {
            self.vals[pos] = b;
            self.dfs(pos + 1);
        }
        self.vals[pos] = U;
    }
}

/// Calls `f` on every model of the sentence (cardinality constraints not
/// applied) and returns the number of models.
pub fn for_each_model(
    p: &Problem,
    options: &OracleOptions,
    mut f: impl FnMut(&Interpretation),
) -> Result<u64> {
    let offsets = check_limit(p, options)?;
    let mut search = Search {
        ir: lower(&p.sentence, &offsets),
        n: p.domain,
        vals: vec![U; offsets.len],
        shortcut: false,
        models: BigInt::zero(),
        nodes: 0,
        on_model: &mut f,
        template: Interpretation::empty(&p.signature, p.domain),
    };
    search.dfs(0);
    Ok(search.models.to_u64().expect("at most 2^max_atoms models"))
}

/// Weighted model count of `p` split by the cardinalities of `query`.
pub fn oracle_evaluate(
    p: &Problem,
    query: &[String],
    options: &OracleOptions,
) -> Result<OracleResult> {
    for q in query {
        if !p.signature.contains(q) {
            return Err(Error::Invalid(format!("unknown predicate `{q}`")));
        }
    }
    let offsets = check_limit(p, options)?;
    let plain = p.weights.is_unweighted() && p.constraints.is_empty() && query.is_empty();
    let mut cells: BTreeMap<Vec<u64>, BigRational> = BTreeMap::new();
    let mut accepted = BigInt::zero();
    let mut visit = |w: &Interpretation| {
        let stats = interpretation_stats(w);
        let card = |q: &str| stats.get(q).expect("every predicate has a count");
        if !p.constraints.iter().all(|c| c.evaluate(&card)) {
            return;
        }
        accepted += 1;
        let key: Vec<u64> = query.iter().map(|q| card(q)).collect();
        let e = cells.entry(key).or_insert_with(BigRational::zero);
        *e += literal_weight(&p.weights, w, &stats);
    };
    let mut search = Search {
        ir: lower(&p.sentence, &offsets),
        n: p.domain,
        vals: vec![U; offsets.len],
        shortcut: plain,
        models: BigInt::zero(),
        nodes: 0,
        on_model: &mut visit,
        template: Interpretation::empty(&p.signature, p.domain),
    };
    search.dfs(0);
    let (models, nodes) = (search.models, search.nodes);
    if plain {
        cells.insert(Vec::new(), BigRational::from_integer(models.clone()));
        accepted = models;
    }
    Ok(OracleResult {
        cells,
        models: accepted,
        nodes,
    })
}

/// `WFOMC` of the problem by enumeration, with the default atom limit.
pub fn oracle_count(p: &Problem) -> Result<BigRational> {
    Ok(oracle_evaluate(p, &[], &OracleOptions::default())?.total())
}

pub fn oracle_distribution(
    p: &Problem,
    query: &[String],
    options: &OracleOptions,
) -> Result<Distribution> {
    normalize(oracle_evaluate(p, query, options)?.cells)
}
