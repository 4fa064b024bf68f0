//! k-vector recursion over consistent 1-types with per-pair generating
//! polynomials in the tracked binary statistics.

use super::layout::{Compiled, Layout, StatRef};
use super::{Counters, RawEvaluation};
use crate::celltypes::{local_bit, TypeTables};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::transform::CountingProgram;
use crate::weights::WeightSpec;
use num_bigint::BigInt;
use num_traits::One;
use rayon::prelude::*;
use rustc_hash::FxHashMap;
use std::collections::{BTreeMap, HashMap};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;

/// Coefficients keyed by packed pair statistics.
type Poly<S> = Vec<(u128, S)>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum PairValue {
    Zero,
    One,
    /// `bases[base] · 2^twos`; `base = None` means an odd part of one.
    Scalar {
        base: Option<usize>,
        twos: u64,
    },
    Poly(usize),
}

enum LeafWeight<S> {
    One,
    Table {
        refs: Vec<StatRef>,
        table: HashMap<Vec<u64>, S>,
        default: S,
    },
}

pub(crate) struct Plan<S> {
    n: u64,
    /// Number of merged type classes.
    classes: usize,
    /// Summed per-element factor of each class; `None` means one.
    type_factor: Vec<Option<S>>,
    increments: Vec<Vec<u64>>,
    /// Pair values over classes, upper triangle.
    pair: Vec<PairValue>,
    bases: Vec<S>,
    polys: Vec<Poly<S>>,
    /// Per-field `(min, max)` over the keys of each polynomial.
    boxes: Vec<Vec<(u64, u64)>>,
    layout: Layout,
    unary_constraints: Vec<Compiled>,
    constraints: Vec<Compiled>,
    weight: LeafWeight<S>,
    query: Vec<StatRef>,
    binom: Vec<Vec<S>>,
    denominator: BigInt,
}

fn binomials<S: Scalar>(n: u64) -> Vec<Vec<S>> {
    let mut rows: Vec<Vec<BigInt>> = vec![vec![BigInt::one()]];
    for r in 1..=n as usize {
        let prev = &rows[r - 1];
        let mut row = Vec::with_capacity(r + 1);
        row.push(BigInt::one());
        for c in 1..r {
            row.push(&prev[c - 1] + &prev[c]);
        }
        row.push(BigInt::one());
        rows.push(row);
    }
    rows.iter()
        .map(|row| row.iter().map(S::from_integer).collect())
        .collect()
}

fn convert<S: Scalar>(r: &num_rational::BigRational) -> Result<S> {
    S::from_rational(r)
        .ok_or_else(|| Error::Invalid(format!("weight {r} is not representable in this ring")))
}

impl<S: Scalar> Plan<S> {
    /// Plain `Σ (n; k) Π n_ij^{k(i,j)}` with nothing tracked.
    pub fn universal(tables: &TypeTables, n: u64) -> Self {
        let layout = Layout::new(&tables.order, &[], &[], n).expect("empty layout");
        let mut bases = Vec::new();
        let values: Vec<PairValue> = tables
            .residuals
            .iter()
            .map(|r| {
                scalar_value(
                    S::from_integer(&BigInt::from(r.models)),
                    (tables.b() - r.slots.len()) as u64,
                    &mut bases,
                )
            })
            .collect();
        let t = tables.valid.len();
        let (classes, type_factor, increments, pair) =
            merge_twins(tables, vec![None; t], vec![Vec::new(); t], &values);
        Plan {
            n,
            classes,
            type_factor,
            increments,
            pair,
            bases,
            polys: Vec::new(),
            boxes: Vec::new(),
            layout,
            unary_constraints: Vec::new(),
            constraints: Vec::new(),
            weight: LeafWeight::One,
            query: Vec::new(),
            binom: binomials(n),
            denominator: BigInt::one(),
        }
    }

    pub fn new(
        program: &CountingProgram,
        tables: &TypeTables,
        n: u64,
        weights: &WeightSpec,
        query: &[String],
    ) -> Result<Self> {
        let order = &tables.order;
        let mut tracked: Vec<String> = Vec::new();
        for c in &program.constraints {
            tracked.extend(c.predicates());
        }
        if let WeightSpec::StatTable(t) = weights {
            tracked.extend(t.preds.iter().cloned());
        }
        tracked.extend(query.iter().cloned());
        let layout = Layout::new(order, &tracked, &program.constraints, n)?;

        let symmetric: HashMap<&str, (S, S)> = match weights {
            WeightSpec::Symmetric(map) => map
                .iter()
                .map(|(p, (w, wb))| Ok((p.as_str(), (convert(w)?, convert(wb)?))))
                .collect::<Result<_>>()?,
            _ => HashMap::new(),
        };

        // Per-element factor: sign, divisor scaling and unary literal weights.
        let slot_of = |p: &str| order.slots(p).expect("program predicate in atom order");
        let sign_slots: Vec<usize> = program
            .sign_preds
            .iter()
            .map(|p| unary_slot(slot_of(p)))
            .collect();
        let divisor_slots: Vec<(usize, S)> = program
            .divisors
            .iter()
            .map(|(a, m)| (unary_slot(slot_of(a)), S::from_integer(&factorial(*m))))
            .collect();
        let mut unary_weights: Vec<(usize, S, S)> = Vec::new();
        let mut binary_weights: Vec<(usize, S, S)> = Vec::new();
        for (p, (w, wb)) in &symmetric {
            match slot_of(p) {
                crate::celltypes::Slots::Unary(s) => unary_weights.push((s, w.clone(), wb.clone())),
                crate::celltypes::Slots::Binary {
                    diagonal,
                    forward,
                    backward,
                } => {
                    unary_weights.push((diagonal, w.clone(), wb.clone()));
                    binary_weights.push((forward, w.clone(), wb.clone()));
                    binary_weights.push((backward, w.clone(), wb.clone()));
                }
            }
        }
        let type_factor = tables
            .valid
            .iter()
            .map(|&i| {
                let mut f = S::one();
                let odd = sign_slots
                    .iter()
                    .filter(|&&s| order.unary_bit(i, s))
                    .count()
                    % 2
                    == 1;
                if odd {
                    f = -f;
                }
                for (s, fact) in &divisor_slots {
                    if !order.unary_bit(i, *s) {
                        f = f * fact.clone();
                    }
                }
                for (s, w, wb) in &unary_weights {
                    f = f * if order.unary_bit(i, *s) {
                        w.clone()
                    } else {
                        wb.clone()
                    };
                }
                (f != S::one()).then_some(f)
            })
            .collect();
        let increments = tables
            .valid
            .iter()
            .map(|&i| layout.type_increments(order, i))
            .collect();

        let mut extra: Vec<usize> = layout.fields.iter().flat_map(|&(f, b)| [f, b]).collect();
        extra.extend(binary_weights.iter().map(|(s, _, _)| *s));
        let mut bases = Vec::new();
        let mut polys = Vec::new();
        let mut values = Vec::with_capacity(tables.residuals.len());
        for r in &tables.residuals {
            if extra.is_empty() {
                values.push(scalar_value(
                    S::from_integer(&BigInt::from(r.models)),
                    (tables.b() - r.slots.len()) as u64,
                    &mut bases,
                ));
                continue;
            }
            let mut slots = r.slots.clone();
            for s in &extra {
                if !slots.contains(s) {
                    slots.push(*s);
                }
            }
            slots.sort_unstable();
            let free = (tables.b() - slots.len()) as u64;
            let mut acc: HashMap<u128, S> = HashMap::new();
            for bits in 0..1u64 << slots.len() {
                let bit = |s: usize| local_bit(&slots, bits, s);
                if !r.holds(&bit) {
                    continue;
                }
                let Some(key) = layout.profile_key(bit) else {
                    continue;
                };
                let mut coef = S::one();
                for (s, w, wb) in &binary_weights {
                    coef = coef * if bit(*s) { w.clone() } else { wb.clone() };
                }
                let e = acc.entry(key).or_insert_with(S::zero);
                *e = std::mem::replace(e, S::zero()) + coef;
            }
            let mut poly: Poly<S> = acc
                .into_iter()
                .filter(|(_, c)| !c.is_zero())
                .map(|(k, c)| (k, c.mul_pow2(free)))
                .collect();
            poly.sort_by_key(|(k, _)| *k);
            values.push(match poly.as_slice() {
                [] => PairValue::Zero,
                [(0, c)] => scalar_value(c.clone(), 0, &mut bases),
                _ => match polys.iter().position(|p| *p == poly) {
                    Some(i) => PairValue::Poly(i),
                    None => {
                        polys.push(poly);
                        PairValue::Poly(polys.len() - 1)
                    }
                },
            });
        }

        let mut unary_constraints = Vec::new();
        let mut constraints = Vec::new();
        for c in &program.constraints {
            let compiled = layout.compile(c);
            if compiled.unary_only() {
                unary_constraints.push(compiled);
            } else {
                constraints.push(compiled);
            }
        }
        let weight = match weights {
            WeightSpec::StatTable(t) => LeafWeight::Table {
                refs: t
                    .preds
                    .iter()
                    .map(|p| layout.stat_ref(p).expect("tracked"))
                    .collect(),
                table: t
                    .table
                    .iter()
                    .map(|(k, v)| Ok((k.clone(), convert(v)?)))
                    .collect::<Result<_>>()?,
                default: convert(&t.default)?,
            },
            _ => LeafWeight::One,
        };
        let query = query
            .iter()
            .map(|p| layout.stat_ref(p).expect("tracked"))
            .collect();
        let mut denominator = BigInt::one();
        for (_, m) in &program.divisors {
            denominator *= factorial(*m).pow_u64(n);
        }
        let (classes, type_factor, increments, pair) =
            merge_twins(tables, type_factor, increments, &values);
        let boxes = polys.iter().map(|p| field_box(&layout, p)).collect();
        Ok(Plan {
            n,
            classes,
            type_factor,
            increments,
            pair,
            bases,
            polys,
            boxes,
            layout,
            unary_constraints,
            constraints,
            weight,
            query,
            binom: binomials(n),
            denominator,
        })
    }

    fn weight_at(&self, unary: &[u64], key: u128) -> S {
        match &self.weight {
            LeafWeight::One => S::one(),
            LeafWeight::Table {
                refs,
                table,
                default,
            } => {
                let k: Vec<u64> = refs
                    .iter()
                    .map(|r| self.layout.stat(*r, unary, key))
                    .collect();
                table.get(&k).unwrap_or(default).clone()
            }
        }
    }
}

fn field_box<S>(layout: &Layout, poly: &Poly<S>) -> Vec<(u64, u64)> {
    (0..layout.fields.len())
        .map(|f| {
            poly.iter().fold((u64::MAX, 0), |(lo, hi), (k, _)| {
                let v = layout.field(*k, f);
                (lo.min(v), hi.max(v))
            })
        })
        .collect()
}

fn tri(t: usize, a: usize, b: usize) -> usize {
    a * t - a * (a + 1) / 2 + b
}

type Merged<S> = (usize, Vec<Option<S>>, Vec<Vec<u64>>, Vec<PairValue>);

/// Merges types whose increments and pair values agree against every type.
///
/// Two such types behave as one type whose factor is the sum of theirs, by
/// the binomial theorem; classes whose factors cancel to zero are dropped.
fn merge_twins<S: Scalar>(
    tables: &TypeTables,
    factors: Vec<Option<S>>,
    increments: Vec<Vec<u64>>,
    values: &[PairValue],
) -> Merged<S> {
    let t = tables.valid.len();
    let value = |a: usize, b: usize| values[tables.residual_id(a.min(b), a.max(b))];
    let mut index: HashMap<(Vec<u64>, Vec<PairValue>), usize> = HashMap::new();
    let mut reps: Vec<usize> = Vec::new();
    let mut sums: Vec<S> = Vec::new();
    for a in 0..t {
        let row: Vec<PairValue> = (0..t).map(|b| value(a, b)).collect();
        let f = factors[a].clone().unwrap_or_else(S::one);
        match index.entry((increments[a].clone(), row)) {
            std::collections::hash_map::Entry::Occupied(e) => {
                let c = *e.get();
                sums[c] = std::mem::replace(&mut sums[c], S::zero()) + f;
            }
            std::collections::hash_map::Entry::Vacant(e) => {
                e.insert(reps.len());
                reps.push(a);
                sums.push(f);
            }
        }
    }
    let keep: Vec<usize> = (0..reps.len()).filter(|&c| !sums[c].is_zero()).collect();
    let m = keep.len();
    let mut pair = Vec::with_capacity(m * (m + 1) / 2);
    for (x, &cx) in keep.iter().enumerate() {
        for &cy in &keep[x..] {
            pair.push(value(reps[cx], reps[cy]));
        }
    }
    let factors = keep
        .iter()
        .map(|&c| (sums[c] != S::one()).then(|| sums[c].clone()))
        .collect();
    let increments = keep.iter().map(|&c| increments[reps[c]].clone()).collect();
    (m, factors, increments, pair)
}

fn unary_slot(s: crate::celltypes::Slots) -> usize {
    match s {
        crate::celltypes::Slots::Unary(s) => s,
        crate::celltypes::Slots::Binary { .. } => panic!("sign and divisor predicates are unary"),
    }
}

fn factorial(m: u32) -> BigInt {
    (1..=m as u64).fold(BigInt::one(), |a, k| a * k)
}

fn scalar_value<S: Scalar>(value: S, extra_twos: u64, bases: &mut Vec<S>) -> PairValue {
    if value.is_zero() {
        return PairValue::Zero;
    }
    let (odd, twos) = value.split_pow2();
    let twos = twos + extra_twos;
    if odd == S::one() {
        return if twos == 0 {
            PairValue::One
        } else {
            PairValue::Scalar { base: None, twos }
        };
    }
    let idx = match bases.iter().position(|b| *b == odd) {
        Some(i) => i,
        None => {
            bases.push(odd);
            bases.len() - 1
        }
    };
    PairValue::Scalar {
        base: Some(idx),
        twos,
    }
}

enum Push {
    Ok,
    /// Fails for this and every larger count.
    Stop,
    Skip,
}

struct Worker<'p, S> {
    plan: &'p Plan<S>,
    chosen: Vec<(usize, u64)>,
    exps: Vec<u64>,
    twos: u64,
    unary: Vec<u64>,
    polys: Vec<Poly<S>>,
    cache: FxHashMap<(usize, u64), Arc<Poly<S>>>,
    cells: FxHashMap<Vec<u64>, S>,
    counters: Counters,
}

impl<'p, S: Scalar> Worker<'p, S> {
    fn new(plan: &'p Plan<S>) -> Self {
        Worker {
            plan,
            chosen: Vec::new(),
            exps: vec![0; plan.bases.len()],
            twos: 0,
            unary: vec![0; plan.layout.unary_slots.len()],
            polys: vec![vec![(0, S::one())]],
            cache: FxHashMap::default(),
            cells: FxHashMap::default(),
            counters: Counters::default(),
        }
    }

    fn tracked(&self) -> bool {
        self.plan.layout.has_fields()
    }

    fn value(&self, a: usize, b: usize) -> PairValue {
        self.plan.pair[tri(self.plan.classes, a.min(b), a.max(b))]
    }

    fn mul(&self, p: &Poly<S>, q: &Poly<S>) -> Poly<S> {
        if let [(0, c)] = q.as_slice() {
            return p.iter().map(|(k, v)| (*k, v.clone() * c.clone())).collect();
        }
        let mut acc: FxHashMap<u128, S> =
            FxHashMap::with_capacity_and_hasher(p.len() * q.len(), Default::default());
        for (k1, c1) in p {
            for (k2, c2) in q {
                if let Some(k) = self.plan.layout.add(*k1, *k2) {
                    let e = acc.entry(k).or_insert_with(S::zero);
                    *e = std::mem::replace(e, S::zero()) + c1.clone() * c2.clone();
                }
            }
        }
        acc.into_iter().filter(|(_, c)| !c.is_zero()).collect()
    }

    fn power(&mut self, idx: usize, e: u64) -> Arc<Poly<S>> {
        if let Some(p) = self.cache.get(&(idx, e)) {
            return p.clone();
        }
        let base = &self.plan.polys[idx];
        let result = if e == 1 {
            base.clone()
        } else {
            let half = self.power(idx, e / 2);
            let sq = self.mul(&half, &half);
            if e % 2 == 1 {
                self.mul(&sq, base)
            } else {
                sq
            }
        };
        let result = Arc::new(result);
        self.cache.insert((idx, e), result.clone());
        result
    }

    /// Pairs `(a', a)` for every chosen `a'` plus `(a, a)`, with exponents.
    fn pairs(&self, a: usize, c: u64) -> Vec<(PairValue, u64)> {
        let mut out: Vec<(PairValue, u64)> = self
            .chosen
            .iter()
            .map(|&(b, cb)| (self.value(b, a), cb * c))
            .collect();
        out.push((self.value(a, a), c * (c - 1) / 2));
        out
    }

    fn push(&mut self, a: usize, c: u64, remaining: u64) -> Push {
        let plan = self.plan;
        let inc = &plan.increments[a];
        for (f, &d) in inc.iter().enumerate() {
            if self.unary[f] + c * d > plan.layout.unary_caps[f] {
                return Push::Stop;
            }
        }
        let pairs = self.pairs(a, c);
        if pairs.iter().any(|(v, e)| *v == PairValue::Zero && *e > 0) {
            return Push::Stop;
        }
        for (f, &d) in inc.iter().enumerate() {
            self.unary[f] += c * d;
        }
        let left = remaining - c;
        let reachable = |c: &Compiled, unary: &[u64], key: u128| {
            c.reachable(&plan.layout, unary, key, left, plan.n).0
        };
        let mut ok = plan
            .unary_constraints
            .iter()
            .all(|k| reachable(k, &self.unary, 0));
        if ok && self.tracked() {
            let factors: Vec<(usize, u64)> = pairs
                .iter()
                .filter_map(|(v, e)| match v {
                    PairValue::Poly(idx) if *e > 0 => Some((*idx, *e)),
                    _ => None,
                })
                .collect();
            let filter = !plan.constraints.is_empty();
            // suffix[i]: field bounds contributed by factors i.. still to be multiplied
            let nf = plan.layout.fields.len();
            let mut suffix = vec![(vec![0u64; nf], vec![0u64; nf]); factors.len() + 1];
            for (i, (idx, e)) in factors.iter().enumerate().rev() {
                let (mut lo, mut hi) = suffix[i + 1].clone();
                for (f, (bl, bh)) in plan.boxes[*idx].iter().enumerate() {
                    lo[f] += bl * e;
                    hi[f] += bh * e;
                }
                suffix[i] = (lo, hi);
            }
            let unary = self.unary.clone();
            let layout = &plan.layout;
            let keep = |key: u128, (slo, shi): &(Vec<u64>, Vec<u64>)| {
                let range = |f: usize| {
                    let v = layout.field(key, f);
                    (v + slo[f], v + shi[f])
                };
                plan.constraints
                    .iter()
                    .all(|k| k.reachable_box(layout, &unary, &range, left, plan.n).0)
            };
            let top = self.polys.last().unwrap();
            let mut poly: Poly<S> = if filter {
                top.iter()
                    .filter(|(k, _)| keep(*k, &suffix[0]))
                    .cloned()
                    .collect()
            } else {
                top.clone()
            };
            for (i, (idx, e)) in factors.iter().enumerate() {
                if poly.is_empty() {
                    break;
                }
                let p = self.power(*idx, *e);
                poly = self.mul(&poly, &p);
                if filter {
                    poly.retain(|(k, _)| keep(*k, &suffix[i + 1]));
                }
            }
            ok = !poly.is_empty();
            if ok {
                self.polys.push(poly);
            }
        }
        if !ok {
            for (f, &d) in inc.iter().enumerate() {
                self.unary[f] -= c * d;
            }
            return Push::Skip;
        }
        for (v, e) in pairs {
            if let PairValue::Scalar { base, twos } = v {
                self.twos += twos * e;
                if let Some(b) = base {
                    self.exps[b] += e;
                }
            }
        }
        self.chosen.push((a, c));
        Push::Ok
    }

    fn pop(&mut self, a: usize, c: u64) {
        self.chosen.pop();
        for (v, e) in self.pairs(a, c) {
            if let PairValue::Scalar { base, twos } = v {
                self.twos -= twos * e;
                if let Some(b) = base {
                    self.exps[b] -= e;
                }
            }
        }
        for (f, &d) in self.plan.increments[a].iter().enumerate() {
            self.unary[f] -= c * d;
        }
        if self.tracked() {
            self.polys.pop();
        }
    }

    /// Returns false when larger counts for this type cannot succeed either.
    fn branch(&mut self, a: usize, c: u64, remaining: u64, mult: &S) -> bool {
        match self.push(a, c, remaining) {
            Push::Ok => {
                let mut m = mult.clone() * self.plan.binom[remaining as usize][c as usize].clone();
                if let Some(f) = &self.plan.type_factor[a] {
                    m = m * f.pow_u64(c);
                }
                self.descend(a + 1, remaining - c, &m);
                self.pop(a, c);
                true
            }
            Push::Stop => {
                self.counters.pruned += 1;
                false
            }
            Push::Skip => {
                self.counters.pruned += 1;
                true
            }
        }
    }

    fn descend(&mut self, start: usize, remaining: u64, mult: &S) {
        if remaining == 0 {
            self.leaf(mult);
            return;
        }
        let t = self.plan.classes;
        for a in start..t {
            if a + 1 == t {
                self.branch(a, remaining, remaining, mult);
            } else {
                for c in 1..=remaining {
                    if !self.branch(a, c, remaining, mult) {
                        break;
                    }
                }
            }
        }
    }

    fn leaf(&mut self, mult: &S) {
        self.counters.k_vectors += 1;
        let plan = self.plan;
        if !plan
            .unary_constraints
            .iter()
            .all(|c| c.eval(&plan.layout, &self.unary, 0))
        {
            self.counters.pruned += 1;
            return;
        }
        let mut base = mult.clone();
        for (b, &e) in self.exps.iter().enumerate() {
            if e > 0 {
                base = base * plan.bases[b].pow_u64(e);
            }
        }
        if self.twos > 0 {
            base = base.mul_pow2(self.twos);
        }
        let poly = self.polys.last().unwrap();
        let entries: &[(u128, S)] = if self.tracked() { poly } else { &[] };
        let single = [(0u128, S::one())];
        let entries = if self.tracked() { entries } else { &single[..] };
        for (key, coef) in entries {
            self.counters.compositions += 1;
            if !plan
                .constraints
                .iter()
                .all(|c| c.eval(&plan.layout, &self.unary, *key))
            {
                self.counters.pruned += 1;
                continue;
            }
            let w = plan.weight_at(&self.unary, *key);
            let qkey: Vec<u64> = plan
                .query
                .iter()
                .map(|r| plan.layout.stat(*r, &self.unary, *key))
                .collect();
            let term = base.clone() * coef.clone() * w;
            let e = self.cells.entry(qkey).or_insert_with(S::zero);
            *e = std::mem::replace(e, S::zero()) + term;
        }
    }
}

pub(crate) fn run<S: Scalar>(plan: &Plan<S>, options: &super::EngineOptions) -> RawEvaluation<S> {
    let t = plan.classes;
    let n = plan.n;
    let tasks: Vec<(usize, u64)> = (0..t)
        .flat_map(|a| {
            let counts: Vec<u64> = if a + 1 == t {
                vec![n]
            } else {
                (1..=n).collect()
            };
            counts.into_iter().map(move |c| (a, c))
        })
        .collect();
    let done = AtomicUsize::new(0);
    let total = tasks.len();
    let work = || {
        tasks
            .par_iter()
            .fold(
                || Worker::new(plan),
                |mut w, &(a, c)| {
                    w.branch(a, c, n, &S::one());
                    if options.progress {
                        let d = done.fetch_add(1, Ordering::Relaxed) + 1;
                        if d.is_multiple_of(64) || d == total {
                            eprintln!(
                                "progress: {d}/{total} branches, {} k-vectors",
                                w.counters.k_vectors
                            );
                        }
                    }
                    w
                },
            )
            .map(|w| (w.cells, w.counters))
            .reduce(
                || (FxHashMap::default(), Counters::default()),
                |(mut cells, mut counters), (other, oc)| {
                    for (k, v) in other {
                        let e = cells.entry(k).or_insert_with(S::zero);
                        *e = std::mem::replace(e, S::zero()) + v;
                    }
                    counters.absorb(&oc);
                    (cells, counters)
                },
            )
    };
    let (cells, counters) = match rayon::ThreadPoolBuilder::new()
        .num_threads(options.threads.max(1))
        .build()
    {
        Ok(pool) => pool.install(work),
        Err(_) => work(),
    };
    RawEvaluation {
        cells: cells.into_iter().collect::<BTreeMap<_, _>>(),
        denominator: plan.denominator.clone(),
        counters,
    }
}
