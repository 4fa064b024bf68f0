//! Weight functions over predicate cardinalities and count distributions.

use crate::engine::{self, EngineOptions, StatView};
use crate::error::{Error, Result};
use crate::formula::{Arity, Problem};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;

/// Weight of a cardinality cell, keyed on `(|P1|, ..., |Pm|)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StatTable {
    pub preds: Vec<String>,
    pub table: BTreeMap<Vec<u64>, BigRational>,
    pub default: BigRational,
}

impl StatTable {
    pub fn lookup(&self, key: &[u64]) -> &BigRational {
        self.table.get(key).unwrap_or(&self.default)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum WeightSpec {
    #[default]
    Unweighted,
    /// Literal weights `(w, w̄)` per predicate; unlisted predicates weigh `(1, 1)`.
    Symmetric(BTreeMap<String, (BigRational, BigRational)>),
    StatTable(StatTable),
}

impl WeightSpec {
    pub fn is_unweighted(&self) -> bool {
        matches!(self, WeightSpec::Unweighted)
    }

    /// Predicates the weight function reads.
    pub fn predicates(&self) -> Vec<String> {
        match self {
            WeightSpec::Unweighted => Vec::new(),
            WeightSpec::Symmetric(map) => map.keys().cloned().collect(),
            WeightSpec::StatTable(t) => t.preds.clone(),
        }
    }

    /// True when every weight is an integer, so sums stay in the integers.
    pub fn is_integral(&self) -> bool {
        match self {
            WeightSpec::Unweighted => true,
            WeightSpec::Symmetric(map) => map
                .values()
                .all(|(w, wb)| w.is_integer() && wb.is_integer()),
            WeightSpec::StatTable(t) => {
                t.default.is_integer() && t.table.values().all(|w| w.is_integer())
            }
        }
    }
}

/// Number of ground atoms of a predicate over a domain of size `n`.
pub fn atom_count(arity: Arity, n: u64) -> u64 {
    match arity {
        Arity::Unary => n,
        Arity::Binary => n * n,
    }
}

pub fn weight_of(spec: &WeightSpec, stats: &StatView, n: u64) -> BigRational {
    match spec {
        WeightSpec::Unweighted => BigRational::one(),
        WeightSpec::Symmetric(map) => {
            let mut acc = BigRational::one();
            for (p, (w, wbar)) in map {
                let (arity, count) = stats
                    .entry(p)
                    .unwrap_or_else(|| panic!("statistics missing predicate {p}"));
                let total = atom_count(arity, n);
                acc *= rational_pow(w, count) * rational_pow(wbar, total - count);
            }
            acc
        }
        WeightSpec::StatTable(t) => {
            let key: Vec<u64> = t
                .preds
                .iter()
                .map(|p| {
                    stats
                        .get(p)
                        .unwrap_or_else(|| panic!("statistics missing predicate {p}"))
                })
                .collect();
            t.lookup(&key).clone()
        }
    }
}

fn rational_pow(base: &BigRational, exp: u64) -> BigRational {
    crate::scalar::Scalar::pow_u64(base, exp)
}

/// `p/q` in lowest terms, or a plain integer.
pub fn format_rational(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Inverse of [`format_rational`]; accepts an optional leading `-`.
pub fn parse_rational(text: &str) -> Option<BigRational> {
    let text = text.trim();
    let (numer, denom) = match text.split_once('/') {
        Some((p, q)) => (p.trim(), q.trim()),
        None => (text, "1"),
    };
    let numer: BigInt = numer.parse().ok()?;
    let denom: BigInt = denom.parse().ok()?;
    if denom.is_zero() || denom.is_negative() {
        return None;
    }
    Some(BigRational::new(numer, denom))
}

/// Predicates whose joint cardinality vector is tabulated.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistributionQuery {
    pub preds: Vec<String>,
}

impl DistributionQuery {
    pub fn new(preds: impl IntoIterator<Item = impl Into<String>>) -> Self {
        DistributionQuery {
            preds: preds.into_iter().map(Into::into).collect(),
        }
    }
}

/// Probability of each cardinality vector; keys follow the query order.
pub type Distribution = BTreeMap<Vec<u64>, BigRational>;

/// Normalises per-cell weights by the partition function.
pub fn normalize(cells: BTreeMap<Vec<u64>, BigRational>) -> Result<Distribution> {
    let z: BigRational = cells.values().fold(BigRational::zero(), |a, b| a + b);
    if z.is_zero() {
        return Err(Error::EmptyDistribution);
    }
    Ok(cells.into_iter().map(|(k, v)| (k, v / &z)).collect())
}

pub fn count_distribution(problem: &Problem, query: &DistributionQuery) -> Result<Distribution> {
    count_distribution_with(problem, query, &EngineOptions::default())
}

pub fn count_distribution_with(
    problem: &Problem,
    query: &DistributionQuery,
    options: &EngineOptions,
) -> Result<Distribution> {
    for p in &query.preds {
        if !problem.signature.contains(p) {
            return Err(Error::Invalid(format!(
                "query predicate `{p}` is not declared"
            )));
        }
    }
    let eval = engine::solve(problem, &query.preds, options)?;
    normalize(eval.cells)
}
