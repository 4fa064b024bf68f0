//! Closed-form summation over k-vectors and pair statistics.
//!
//! Two routes compute the same sums. The collapsed route ([`evaluate`]) walks
//! k-vectors over consistent 1-types and multiplies per-pair generating
//! polynomials in the tracked statistics, so pairs never expand into
//! compositions. The explicit route ([`for_each_kh_term`]) enumerates k over
//! every 1-type and every composition of pair counts into 2-type classes; it
//! exists for cross-checking and for arbitrary `(k,h)` weights.

mod collapsed;
mod explicit;
mod layout;

pub use explicit::{
    enumerate_kh, evaluate_explicit, for_each_kh_term, ClassCount, ExplicitOptions, Granularity,
    KhTerm, PairTerm,
};

use crate::celltypes::{build_tables_with, TableLimits, TypeTables};
use crate::error::{Error, Result};
use crate::formula::{Arity, Problem};
use crate::scalar::Scalar;
use crate::transform::{compile, CountingProgram};
use crate::weights::WeightSpec;
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;
use std::collections::BTreeMap;

/// Cardinalities by predicate name.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct StatView {
    entries: BTreeMap<String, (Arity, u64)>,
}

impl StatView {
    pub fn insert(&mut self, pred: impl Into<String>, arity: Arity, count: u64) {
        self.entries.insert(pred.into(), (arity, count));
    }

    pub fn get(&self, pred: &str) -> Option<u64> {
        self.entries.get(pred).map(|e| e.1)
    }

    pub fn entry(&self, pred: &str) -> Option<(Arity, u64)> {
        self.entries.get(pred).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, Arity, u64)> {
        self.entries.iter().map(|(p, (a, c))| (p.as_str(), *a, *c))
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Counters {
    /// k-vectors reaching the leaf of the enumeration.
    pub k_vectors: u64,
    /// Statistic cells (or compositions, on the explicit route) examined.
    pub compositions: u64,
    /// Subtrees or cells discarded by zero factors or constraints.
    pub pruned: u64,
}

impl Counters {
    fn absorb(&mut self, other: &Counters) {
        self.k_vectors += other.k_vectors;
        self.compositions += other.compositions;
        self.pruned += other.pruned;
    }
}

#[derive(Debug, Clone)]
pub struct EngineOptions {
    pub threads: usize,
    pub progress: bool,
    pub limits: TableLimits,
}

impl Default for EngineOptions {
    fn default() -> Self {
        EngineOptions {
            threads: 1,
            progress: false,
            limits: TableLimits::default(),
        }
    }
}

/// Exact result of a run, split by the cardinalities of the query predicates.
#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub query: Vec<String>,
    pub cells: BTreeMap<Vec<u64>, BigRational>,
    pub counters: Counters,
}

impl Evaluation {
    pub fn total(&self) -> BigRational {
        self.cells.values().fold(BigRational::zero(), |a, b| a + b)
    }
}

/// Cells before dividing by `denominator`.
#[derive(Debug, Clone)]
pub struct RawEvaluation<S> {
    pub cells: BTreeMap<Vec<u64>, S>,
    pub denominator: BigInt,
    pub counters: Counters,
}

impl<S: Scalar> RawEvaluation<S> {
    pub fn total(&self) -> S {
        self.cells.values().fold(S::zero(), |a, b| a + b.clone())
    }
}

/// `n! / (parts[0]! ...)`.
pub fn multinomial(n: u64, parts: &[u64]) -> Result<BigInt> {
    if parts.iter().sum::<u64>() != n {
        return Err(Error::Invalid(format!(
            "multinomial parts {parts:?} do not sum to {n}"
        )));
    }
    let mut acc = BigInt::one();
    let mut remaining = n;
    for &p in parts {
        acc *= binomial(remaining, p);
        remaining -= p;
    }
    Ok(acc)
}

pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// Number of element pairs between 1-types `i` and `j`.
pub fn pair_exponent(k: &[u64], i: usize, j: usize) -> u64 {
    if i == j {
        k[i] * k[i].saturating_sub(1) / 2
    } else {
        k[i] * k[j]
    }
}

/// Collapsed term `(n; k) Π_{i<=j} n_ij^{k(i,j)}` for a k-vector over all `2^u` types.
pub fn term_value(tables: &TypeTables, k: &[u64]) -> BigInt {
    let n = k.iter().sum();
    let mut acc = multinomial(n, k).expect("parts sum to n");
    for i in 0..k.len() {
        if k[i] == 0 {
            continue;
        }
        if !tables.is_valid(i) {
            return BigInt::zero();
        }
        for j in i..k.len() {
            let e = pair_exponent(k, i, j);
            if e > 0 {
                acc *= BigInt::from(tables.n_ij(i, j)).pow_u64(e);
            }
        }
    }
    acc
}

/// Model count of a pure universal kernel, from its tables alone.
pub fn fomc_universal(tables: &TypeTables, n: u64) -> BigInt {
    fomc_universal_with(tables, n, &EngineOptions::default()).0
}

pub fn fomc_universal_with(
    tables: &TypeTables,
    n: u64,
    options: &EngineOptions,
) -> (BigInt, Counters) {
    let plan = collapsed::Plan::<BigInt>::universal(tables, n);
    let raw = collapsed::run(&plan, options);
    (raw.total(), raw.counters)
}

/// Sums in the ring `S`; cells must still be divided by `denominator`.
pub fn evaluate_in<S: Scalar>(
    program: &CountingProgram,
    tables: &TypeTables,
    n: u64,
    weights: &WeightSpec,
    query: &[String],
    options: &EngineOptions,
) -> Result<RawEvaluation<S>> {
    let plan = collapsed::Plan::<S>::new(program, tables, n, weights, query)?;
    Ok(collapsed::run(&plan, options))
}

/// Exact evaluation; integer arithmetic when every weight is integral.
pub fn evaluate(
    program: &CountingProgram,
    tables: &TypeTables,
    n: u64,
    weights: &WeightSpec,
    query: &[String],
    options: &EngineOptions,
) -> Result<Evaluation> {
    if weights.is_integral() {
        let raw = evaluate_in::<BigInt>(program, tables, n, weights, query, options)?;
        let cells = raw
            .cells
            .into_iter()
            .map(|(k, v)| {
                let (q, r) = v.div_rem(&raw.denominator);
                assert!(r.is_zero(), "divisor does not cancel for cell {k:?}");
                (k, BigRational::from_integer(q))
            })
            .collect();
        Ok(Evaluation {
            query: query.to_vec(),
            cells,
            counters: raw.counters,
        })
    } else {
        let raw = evaluate_in::<BigRational>(program, tables, n, weights, query, options)?;
        let d = BigRational::from_integer(raw.denominator.clone());
        let cells = raw.cells.into_iter().map(|(k, v)| (k, v / &d)).collect();
        Ok(Evaluation {
            query: query.to_vec(),
            cells,
            counters: raw.counters,
        })
    }
}

/// Compiles, builds tables and evaluates a problem at its own domain size.
pub fn solve(problem: &Problem, query: &[String], options: &EngineOptions) -> Result<Evaluation> {
    let program = compile(problem);
    let tables = build_tables_with(&program.kernel, &program.signature, &options.limits)?;
    evaluate(
        &program,
        &tables,
        problem.domain,
        &problem.weights,
        query,
        options,
    )
}

/// Floating-point estimate, for quick looks at large instances.
pub fn solve_approx(problem: &Problem, options: &EngineOptions) -> Result<f64> {
    let program = compile(problem);
    let tables = build_tables_with(&program.kernel, &program.signature, &options.limits)?;
    let raw = evaluate_in::<f64>(
        &program,
        &tables,
        problem.domain,
        &problem.weights,
        &[],
        options,
    )?;
    Ok(raw.total() / f64::from_integer(&raw.denominator))
}
