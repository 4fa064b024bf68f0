//! Direct enumeration of `(k, h)` terms over 1-types, with per-pair
//! compositions of the pair count into 2-type classes.

use super::{multinomial, Counters, Evaluation, StatView};
use crate::celltypes::{Slots, TypeTables};
use crate::error::{Error, Result};
use crate::formula::{Arity, CardinalityConstraint, CmpOp};
use crate::scalar::Scalar;
use crate::transform::CountingProgram;
use crate::weights::{weight_of, WeightSpec};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use std::collections::{BTreeMap, HashMap};

/// How satisfying 2-types of a pair are grouped before compositions are enumerated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Granularity {
    /// One class per distinct statistic profile.
    #[default]
    Grouped,
    /// One class per satisfying 2-type.
    PerTwoType,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassCount {
    /// `R(x,y) + R(y,x)` per tracked binary predicate.
    pub profile: Vec<u8>,
    /// Satisfying 2-types in the class.
    pub members: Vec<u64>,
    /// Number of pairs assigned to the class.
    pub h: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairTerm {
    pub i: usize,
    pub j: usize,
    pub classes: Vec<ClassCount>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KhTerm {
    /// Occupied 1-types with their counts, ascending by type.
    pub k: Vec<(usize, u64)>,
    /// Pairs with `k(i,j) > 0`, `i <= j`.
    pub pairs: Vec<PairTerm>,
    pub stats: StatView,
    /// `(n; k) Π (k(i,j); H) Π c_p^{H_p}`, zero when some occupied type is inconsistent.
    pub value: BigInt,
    pub sign: i8,
}

impl KhTerm {
    pub fn count(&self, i: usize) -> u64 {
        self.k.iter().find(|(t, _)| *t == i).map_or(0, |(_, c)| *c)
    }

    /// `k` over all `2^u` 1-types.
    pub fn dense(&self, u: usize) -> Vec<u64> {
        let mut out = vec![0; 1 << u];
        for &(i, c) in &self.k {
            out[i] = c;
        }
        out
    }

    fn exponent(&self, i: usize, j: usize) -> u64 {
        let (ki, kj) = (self.count(i), self.count(j));
        if i == j {
            ki * ki.saturating_sub(1) / 2
        } else {
            ki * kj
        }
    }
}

#[derive(Debug, Clone)]
pub struct ExplicitOptions {
    pub granularity: Granularity,
    /// Let k range over all `2^u` 1-types instead of the consistent ones.
    /// Terms occupying an inconsistent type have value zero.
    pub all_types: bool,
    /// Maximum number of compositions examined before giving up.
    pub budget: u64,
}

impl Default for ExplicitOptions {
    fn default() -> Self {
        ExplicitOptions {
            granularity: Granularity::Grouped,
            all_types: false,
            budget: 5_000_000,
        }
    }
}

struct Context<'a> {
    tables: &'a TypeTables,
    n: u64,
    granularity: Granularity,
    budget: u64,
    unary_preds: Vec<(String, usize)>,
    /// `(name, diagonal, forward, backward)`.
    binary_preds: Vec<(String, usize, usize, usize)>,
    sign_slots: Vec<usize>,
    unary_constraints: Vec<&'a CardinalityConstraint>,
    constraints: Vec<&'a CardinalityConstraint>,
    classes: HashMap<(usize, usize), Vec<ClassCount>>,
    counters: Counters,
}

impl<'a> Context<'a> {
    fn classes(&mut self, i: usize, j: usize) -> Vec<ClassCount> {
        if let Some(c) = self.classes.get(&(i, j)) {
            return c.clone();
        }
        let order = &self.tables.order;
        let mut grouped: BTreeMap<Vec<u8>, Vec<u64>> = BTreeMap::new();
        let mut single = Vec::new();
        for v in 0..1u64 << self.tables.b() {
            if !self.tables.n_ijv(i, j, v) {
                continue;
            }
            let profile: Vec<u8> = self
                .binary_preds
                .iter()
                .map(|(_, _, l, r)| order.binary_bit(v, *l) as u8 + order.binary_bit(v, *r) as u8)
                .collect();
            match self.granularity {
                Granularity::Grouped => grouped.entry(profile).or_default().push(v),
                Granularity::PerTwoType => single.push(ClassCount {
                    profile,
                    members: vec![v],
                    h: 0,
                }),
            }
        }
        let mut out: Vec<ClassCount> = match self.granularity {
            Granularity::Grouped => grouped
                .into_iter()
                .map(|(profile, members)| ClassCount {
                    profile,
                    members,
                    h: 0,
                })
                .collect(),
            Granularity::PerTwoType => single,
        };
        if out.is_empty() {
            out.push(ClassCount {
                profile: vec![0; self.binary_preds.len()],
                members: Vec::new(),
                h: 0,
            });
        }
        self.classes.insert((i, j), out.clone());
        out
    }

    fn unary_stats(&self, k: &[(usize, u64)]) -> StatView {
        let order = &self.tables.order;
        let mut stats = StatView::default();
        let count = |s: usize| -> u64 {
            k.iter()
                .filter(|(i, _)| order.unary_bit(*i, s))
                .map(|(_, c)| c)
                .sum()
        };
        for (p, s) in &self.unary_preds {
            stats.insert(p.clone(), Arity::Unary, count(*s));
        }
        for (p, d, _, _) in &self.binary_preds {
            stats.insert(p.clone(), Arity::Binary, count(*d));
        }
        stats
    }

    fn sign(&self, k: &[(usize, u64)]) -> i8 {
        let order = &self.tables.order;
        let total: u64 = self
            .sign_slots
            .iter()
            .map(|&s| {
                k.iter()
                    .filter(|(i, _)| order.unary_bit(*i, s))
                    .map(|(_, c)| c)
                    .sum::<u64>()
            })
            .sum();
        if total.is_multiple_of(2) {
            1
        } else {
            -1
        }
    }
}

fn holds(c: &CardinalityConstraint, stats: &StatView) -> bool {
    c.evaluate(&|p| stats.get(p).expect("constraint predicate in view"))
}

/// Calls `f` for every `(k, h)` term satisfying the program's constraints.
///
/// Binary predicates in constraints, weights and `query` are tracked; every
/// other binary predicate contributes only through the class sizes.
pub fn for_each_kh_term(
    program: &CountingProgram,
    tables: &TypeTables,
    n: u64,
    weights: &WeightSpec,
    query: &[String],
    options: &ExplicitOptions,
    mut f: impl FnMut(&KhTerm),
) -> Result<Counters> {
    let order = &tables.order;
    let sig = &program.signature;
    let mut tracked: Vec<String> = weights.predicates();
    for c in &program.constraints {
        tracked.extend(c.predicates());
    }
    tracked.extend(query.iter().cloned());
    let mut unary_preds = Vec::new();
    for p in &sig.unary {
        if let Some(Slots::Unary(s)) = order.slots(p) {
            unary_preds.push((p.clone(), s));
        }
    }
    let mut binary_preds = Vec::new();
    for p in &sig.binary {
        if tracked.contains(p) {
            if let Some(Slots::Binary {
                diagonal,
                forward,
                backward,
            }) = order.slots(p)
            {
                binary_preds.push((p.clone(), diagonal, forward, backward));
            }
        }
    }
    for p in &tracked {
        if !sig.contains(p) {
            return Err(Error::Invalid(format!("unknown predicate `{p}`")));
        }
    }
    let sign_slots = program
        .sign_preds
        .iter()
        .filter_map(|p| match order.slots(p) {
            Some(Slots::Unary(s)) => Some(s),
            _ => None,
        })
        .collect();
    let (unary_constraints, constraints) = program.constraints.iter().partition(|c| {
        c.predicates()
            .iter()
            .all(|p| sig.arity(p) == Some(Arity::Unary))
    });
    let mut ctx = Context {
        tables,
        n,
        granularity: options.granularity,
        budget: options.budget,
        unary_preds,
        binary_preds,
        sign_slots,
        unary_constraints,
        constraints,
        classes: HashMap::new(),
        counters: Counters::default(),
    };
    let types: Vec<usize> = if options.all_types {
        (0..1usize << tables.u()).collect()
    } else {
        tables.valid.clone()
    };
    k_vectors(&mut ctx, &types, &mut Vec::new(), 0, n, &mut f)?;
    Ok(ctx.counters)
}

fn k_vectors(
    ctx: &mut Context<'_>,
    types: &[usize],
    k: &mut Vec<(usize, u64)>,
    start: usize,
    remaining: u64,
    f: &mut impl FnMut(&KhTerm),
) -> Result<()> {
    if remaining == 0 {
        return expand(ctx, k, f);
    }
    for pos in start..types.len() {
        // the last type takes whatever is left
        let counts = if pos + 1 == types.len() {
            remaining..=remaining
        } else {
            1..=remaining
        };
        for c in counts {
            k.push((types[pos], c));
            let out = k_vectors(ctx, types, k, pos + 1, remaining - c, f);
            k.pop();
            out?;
        }
    }
    Ok(())
}

fn expand(ctx: &mut Context<'_>, k: &[(usize, u64)], f: &mut impl FnMut(&KhTerm)) -> Result<()> {
    ctx.counters.k_vectors += 1;
    let stats = ctx.unary_stats(k);
    if !ctx.unary_constraints.iter().all(|c| holds(c, &stats)) {
        ctx.counters.pruned += 1;
        return Ok(());
    }
    let valid = k.iter().all(|(i, _)| ctx.tables.is_valid(*i));
    let counts: Vec<u64> = k.iter().map(|(_, c)| *c).collect();
    let base = if valid {
        multinomial(ctx.n, &counts)?
    } else {
        BigInt::zero()
    };
    let mut term = KhTerm {
        k: k.to_vec(),
        pairs: Vec::new(),
        stats,
        value: base,
        sign: ctx.sign(k),
    };
    for (a, &(i, _)) in k.iter().enumerate() {
        for &(j, _) in &k[a..] {
            if term.exponent(i, j) > 0 {
                term.pairs.push(PairTerm {
                    i,
                    j,
                    classes: ctx.classes(i, j),
                });
            }
        }
    }
    compositions(ctx, term, f)
}

/// Per-field bounds on what the not yet composed part of a term can add.
struct Pending {
    /// `suffix[p][c][t]`: min and max of field `t` over classes `c..` of pair `p`.
    suffix: Vec<Vec<Vec<(u64, u64)>>>,
    /// `later[p][t]`: bounds contributed by all pairs after `p`.
    later: Vec<Vec<(u64, u64)>>,
    exponents: Vec<u64>,
}

impl Pending {
    fn new(ctx: &Context<'_>, term: &KhTerm) -> Self {
        let fields = ctx.binary_preds.len();
        let exponents: Vec<u64> = term
            .pairs
            .iter()
            .map(|pt| term.exponent(pt.i, pt.j))
            .collect();
        let suffix: Vec<Vec<Vec<(u64, u64)>>> = term
            .pairs
            .iter()
            .map(|pt| {
                let mut rows = vec![vec![(0, 0); fields]; pt.classes.len() + 1];
                for c in (0..pt.classes.len()).rev() {
                    let last = c + 1 == pt.classes.len();
                    let row: Vec<(u64, u64)> = (0..fields)
                        .map(|t| {
                            let v = pt.classes[c].profile[t] as u64;
                            let (lo, hi) = rows[c + 1][t];
                            if last {
                                (v, v)
                            } else {
                                (lo.min(v), hi.max(v))
                            }
                        })
                        .collect();
                    rows[c] = row;
                }
                rows
            })
            .collect();
        let mut later = vec![vec![(0, 0); fields]; term.pairs.len()];
        for p in (0..term.pairs.len().saturating_sub(1)).rev() {
            for t in 0..fields {
                let (lo, hi) = suffix[p + 1][0][t];
                let e = exponents[p + 1];
                later[p][t] = (later[p + 1][t].0 + e * lo, later[p + 1][t].1 + e * hi);
            }
        }
        Pending {
            suffix,
            later,
            exponents,
        }
    }
}

/// Three-valued reading of `c` given a range for every predicate: `(can_hold, can_fail)`.
fn possible(c: &CardinalityConstraint, range: &impl Fn(&str) -> (u64, u64)) -> (bool, bool) {
    match c {
        CardinalityConstraint::Cmp(cmp) => {
            let (mut lo, mut hi) = (0i128, 0i128);
            for (k, p) in &cmp.terms {
                let (a, b) = range(p);
                let (a, b) = (*k as i128 * a as i128, *k as i128 * b as i128);
                lo += a.min(b);
                hi += a.max(b);
            }
            let r = cmp.rhs as i128;
            match cmp.op {
                CmpOp::Eq => (lo <= r && r <= hi, !(lo == r && hi == r)),
                CmpOp::Le => (lo <= r, hi > r),
                CmpOp::Ge => (hi >= r, lo < r),
                CmpOp::Lt => (lo < r, hi >= r),
                CmpOp::Gt => (hi > r, lo <= r),
            }
        }
        CardinalityConstraint::Not(a) => {
            let (h, f) = possible(a, range);
            (f, h)
        }
        CardinalityConstraint::And(a, b) => {
            let (ah, af) = possible(a, range);
            let (bh, bf) = possible(b, range);
            (ah && bh, af || bf)
        }
        CardinalityConstraint::Or(a, b) => {
            let (ah, af) = possible(a, range);
            let (bh, bf) = possible(b, range);
            (ah || bh, af && bf)
        }
    }
}

fn compositions(
    ctx: &mut Context<'_>,
    mut term: KhTerm,
    f: &mut impl FnMut(&KhTerm),
) -> Result<()> {
    let pending = Pending::new(ctx, &term);
    let mut partial = vec![0u64; ctx.binary_preds.len()];
    let first = pending.exponents.first().copied().unwrap_or(0);
    walk(ctx, &pending, &mut term, (0, 0, first), &mut partial, f)
}

/// Can the constraints still hold once `rem` units of pair `p` go to classes `c..`?
fn feasible(
    ctx: &Context<'_>,
    pending: &Pending,
    term: &KhTerm,
    (p, c, rem): (usize, usize, u64),
    partial: &[u64],
) -> bool {
    let range = |name: &str| -> (u64, u64) {
        match ctx.binary_preds.iter().position(|(q, ..)| q == name) {
            Some(t) => {
                let base = term.stats.get(name).unwrap_or(0) + partial[t];
                let (slo, shi) = pending.suffix[p][c][t];
                let (llo, lhi) = pending.later[p][t];
                (base + rem * slo + llo, base + rem * shi + lhi)
            }
            None => {
                let v = term.stats.get(name).expect("constraint predicate in view");
                (v, v)
            }
        }
    };
    ctx.constraints.iter().all(|k| possible(k, &range).0)
}

// Compositions are walked class by class, each part ascending, so the order
// is lexicographic in the concatenated h-vector.
fn walk(
    ctx: &mut Context<'_>,
    pending: &Pending,
    term: &mut KhTerm,
    (p, c, left): (usize, usize, u64),
    partial: &mut Vec<u64>,
    f: &mut impl FnMut(&KhTerm),
) -> Result<()> {
    if p == term.pairs.len() {
        return leaf(ctx, term.clone(), f);
    }
    let Some(last) = term.pairs[p].classes.len().checked_sub(1) else {
        return Ok(());
    };
    let lo = if c == last { left } else { 0 };
    for h in lo..=left {
        term.pairs[p].classes[c].h = h;
        for (t, v) in partial.iter_mut().enumerate() {
            *v += h * term.pairs[p].classes[c].profile[t] as u64;
        }
        let next = if c == last {
            (p + 1, 0, pending.exponents.get(p + 1).copied().unwrap_or(0))
        } else {
            (p, c + 1, left - h)
        };
        let out = if ctx.constraints.is_empty()
            || feasible(ctx, pending, term, (p, c + 1, left - h), partial)
        {
            walk(ctx, pending, term, next, partial, f)
        } else {
            ctx.counters.pruned += 1;
            Ok(())
        };
        for (t, v) in partial.iter_mut().enumerate() {
            *v -= h * term.pairs[p].classes[c].profile[t] as u64;
        }
        out?;
    }
    term.pairs[p].classes[c].h = 0;
    Ok(())
}

fn leaf(ctx: &mut Context<'_>, mut term: KhTerm, f: &mut impl FnMut(&KhTerm)) -> Result<()> {
    ctx.counters.compositions += 1;
    if ctx.counters.compositions > ctx.budget {
        return Err(Error::Capacity(format!(
            "explicit enumeration exceeded {} compositions",
            ctx.budget
        )));
    }
    for (t, (p, _, _, _)) in ctx.binary_preds.iter().enumerate() {
        let extra: u64 = term
            .pairs
            .iter()
            .flat_map(|pt| pt.classes.iter())
            .map(|c| c.profile[t] as u64 * c.h)
            .sum();
        let diag = term.stats.get(p).unwrap_or(0);
        term.stats.insert(p.clone(), Arity::Binary, diag + extra);
    }
    if !ctx.constraints.iter().all(|c| holds(c, &term.stats)) {
        ctx.counters.pruned += 1;
        return Ok(());
    }
    if !term.value.is_zero() {
        for pt in &term.pairs {
            let e = term.exponent(pt.i, pt.j);
            let hs: Vec<u64> = pt.classes.iter().map(|c| c.h).collect();
            term.value *= multinomial(e, &hs)?;
            for c in &pt.classes {
                if c.h > 0 {
                    term.value *= BigInt::from(c.members.len()).pow_u64(c.h);
                }
            }
        }
    }
    f(&term);
    Ok(())
}

/// All terms, in enumeration order.
pub fn enumerate_kh(
    program: &CountingProgram,
    tables: &TypeTables,
    n: u64,
    weights: &WeightSpec,
    query: &[String],
    options: &ExplicitOptions,
) -> Result<Vec<KhTerm>> {
    let mut out = Vec::new();
    for_each_kh_term(program, tables, n, weights, query, options, |t| {
        out.push(t.clone())
    })?;
    Ok(out)
}

/// `Σ sign · w · value / Π m_k!^{k(A_k)}` over the enumerated terms, keyed by `query`.
pub fn evaluate_explicit(
    program: &CountingProgram,
    tables: &TypeTables,
    n: u64,
    weights: &WeightSpec,
    query: &[String],
    options: &ExplicitOptions,
) -> Result<Evaluation> {
    let order = &tables.order;
    let divisors: Vec<(usize, BigInt)> = program
        .divisors
        .iter()
        .filter_map(|(a, m)| match order.slots(a) {
            Some(Slots::Unary(s)) => {
                Some((s, (1..=*m as u64).fold(BigInt::one(), |acc, x| acc * x)))
            }
            _ => None,
        })
        .collect();
    let mut cells: BTreeMap<Vec<u64>, BigRational> = BTreeMap::new();
    let counters = for_each_kh_term(program, tables, n, weights, query, options, |t| {
        let mut denom = BigInt::one();
        for (s, fact) in &divisors {
            let e: u64 =
                t.k.iter()
                    .filter(|(i, _)| order.unary_bit(*i, *s))
                    .map(|(_, c)| c)
                    .sum();
            denom *= fact.pow_u64(e);
        }
        let mut term = BigRational::new(t.value.clone(), denom) * weight_of(weights, &t.stats, n);
        if t.sign < 0 {
            term = -term;
        }
        let key: Vec<u64> = query.iter().map(|p| t.stats.get(p).unwrap_or(0)).collect();
        let e = cells.entry(key).or_insert_with(BigRational::zero);
        *e += term;
    })?;
    Ok(Evaluation {
        query: query.to_vec(),
        cells,
        counters,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::celltypes::build_tables;
    use crate::formula::{parse_problem, Formula, Signature};
    use crate::transform::compile;

    fn setup(text: &str) -> (CountingProgram, TypeTables, u64, WeightSpec) {
        let p = parse_problem(text).unwrap();
        let program = compile(&p);
        let tables = build_tables(&program.kernel, &program.signature).unwrap();
        (program, tables, p.domain, p.weights)
    }

    fn binomial_count(n: u64, k: u64) -> u64 {
        (0..k).fold(1, |a, i| a * (n - i) / (i + 1))
    }

    #[test]
    fn one_term_per_k_without_tracking() {
        let (prog, t, n, w) = setup("domain: 3\nunary: A\nbinary: R\nformula: forall x forall y (A(x) & R(x,y) & x != y -> A(y))");
        let all = ExplicitOptions {
            all_types: true,
            ..Default::default()
        };
        let terms = enumerate_kh(&prog, &t, n, &w, &[], &all).unwrap();
        assert_eq!(terms.len() as u64, binomial_count(n + 3, 3));
        let total: BigInt = terms.iter().map(|t| t.value.clone()).sum();
        assert_eq!(total, crate::engine::fomc_universal(&t, n));
    }

    #[test]
    fn unary_constraint_prunes_k() {
        let (prog, t, n, w) = setup("domain: 4\nunary: A\nformula: true\nconstraint: |A| = 2");
        let terms = enumerate_kh(&prog, &t, n, &w, &[], &ExplicitOptions::default()).unwrap();
        assert_eq!(terms.len(), 1);
        assert_eq!(terms[0].dense(1), vec![2, 2]);
        assert_eq!(terms[0].value, BigInt::from(6));
    }

    #[test]
    fn binary_constraint_survivors() {
        let (prog, t, n, w) = setup(
            "domain: 2\nunary: A\nbinary: R\nformula: forall x forall y (A(x) & R(x,y) & x != y -> A(y))\nconstraint: |R| = 2",
        );
        let terms = enumerate_kh(&prog, &t, n, &w, &[], &ExplicitOptions::default()).unwrap();
        assert!(!terms.is_empty());
        for term in &terms {
            assert_eq!(term.stats.get("R"), Some(2));
        }
        let total: BigInt = terms.iter().map(|t| t.value.clone()).sum();
        // brute force: 2 of the 4 R-atoms, with A closed under off-diagonal R
        let p = parse_problem("domain: 2\nunary: A\nbinary: R\nformula: forall x forall y (A(x) & R(x,y) & x != y -> A(y))\nconstraint: |R| = 2").unwrap();
        assert_eq!(
            BigRational::from_integer(total),
            crate::oracle::oracle_count(&p).unwrap()
        );
    }

    #[test]
    fn full_compositions_sum_to_collapsed_factor() {
        let sig = Signature::new(vec![], vec!["R".into()]);
        let t = build_tables(&Formula::True, &sig).unwrap();
        let prog = compile(&crate::formula::Problem::new(sig, Formula::True, 2));
        let opts = ExplicitOptions {
            granularity: Granularity::PerTwoType,
            ..Default::default()
        };
        let terms = enumerate_kh(&prog, &t, 2, &WeightSpec::Unweighted, &[], &opts).unwrap();
        let concentrated: Vec<_> = terms.iter().filter(|t| t.k == vec![(0, 2)]).collect();
        assert_eq!(concentrated.len(), 4);
        assert!(concentrated.iter().all(|t| t.value == BigInt::one()));
    }

    #[test]
    fn granularities_agree() {
        let text = "domain: 3\nunary: A\nbinary: R\nformula: forall x exists y R(x,y) & forall x (A(x) -> R(x,x))\nconstraint: |R| <= 5\nweight: A 2 1";
        let (prog, t, n, w) = setup(text);
        let q = vec!["R".to_string()];
        let grouped = evaluate_explicit(&prog, &t, n, &w, &q, &ExplicitOptions::default()).unwrap();
        let fine = evaluate_explicit(
            &prog,
            &t,
            n,
            &w,
            &q,
            &ExplicitOptions {
                granularity: Granularity::PerTwoType,
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(grouped.cells, fine.cells);
    }

    #[test]
    fn budget_is_enforced() {
        let (prog, t, n, w) = setup("domain: 4\nbinary: R\nformula: true");
        let opts = ExplicitOptions {
            budget: 10,
            ..Default::default()
        };
        let r = enumerate_kh(&prog, &t, n, &w, &["R".into()], &opts);
        assert!(matches!(r, Err(Error::Capacity(_))));
    }
}
