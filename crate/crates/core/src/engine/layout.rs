//! Index-based statistics: which cardinalities are tracked, their caps, and
//! the packed `u128` key holding the pair-level part of binary cardinalities.

use crate::celltypes::{AtomOrder, Slots};
use crate::error::{Error, Result};
use crate::formula::{CardinalityConstraint, CmpOp, LinearComparison};
use std::collections::HashMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum StatRef {
    /// Entry of the per-element (unary-level) statistics vector.
    Unary(usize),
    /// `|P| = unary[diag] + field`.
    Binary { diag: usize, field: usize },
}

#[derive(Debug, Clone)]
pub(crate) struct Layout {
    /// Unary-order slot counted by each unary-level entry.
    pub unary_slots: Vec<usize>,
    pub unary_caps: Vec<u64>,
    /// `(R(x,y), R(y,x))` binary slots per field.
    pub fields: Vec<(usize, usize)>,
    pub field_caps: Vec<u64>,
    shifts: Vec<u32>,
    masks: Vec<u128>,
    refs: HashMap<String, StatRef>,
}

fn bits_for(cap: u64) -> u32 {
    64 - cap.leading_zeros()
}

impl Layout {
    /// `tracked` lists every predicate whose cardinality must be recoverable.
    pub fn new(
        order: &AtomOrder,
        tracked: &[String],
        constraints: &[CardinalityConstraint],
        n: u64,
    ) -> Result<Self> {
        let bounds = upper_bounds(order, constraints, n);
        let mut layout = Layout {
            unary_slots: Vec::new(),
            unary_caps: Vec::new(),
            fields: Vec::new(),
            field_caps: Vec::new(),
            shifts: Vec::new(),
            masks: Vec::new(),
            refs: HashMap::new(),
        };
        let bound = |p: &str, limit: u64| bounds.get(p).map_or(limit, |b| (*b).min(limit));
        for p in tracked {
            if layout.refs.contains_key(p) {
                continue;
            }
            let slots = order
                .slots(p)
                .ok_or_else(|| Error::Invalid(format!("unknown predicate `{p}`")))?;
            let r = match slots {
                Slots::Unary(s) => {
                    layout.unary_slots.push(s);
                    layout.unary_caps.push(bound(p, n));
                    StatRef::Unary(layout.unary_slots.len() - 1)
                }
                Slots::Binary {
                    diagonal,
                    forward,
                    backward,
                } => {
                    layout.unary_slots.push(diagonal);
                    layout.unary_caps.push(bound(p, n));
                    layout.fields.push((forward, backward));
                    layout.field_caps.push(bound(p, n * n.saturating_sub(1)));
                    StatRef::Binary {
                        diag: layout.unary_slots.len() - 1,
                        field: layout.fields.len() - 1,
                    }
                }
            };
            layout.refs.insert(p.clone(), r);
        }
        let mut shift = 0u32;
        for &cap in &layout.field_caps {
            let width = bits_for(cap) + 1;
            layout.shifts.push(shift);
            layout.masks.push((1u128 << width) - 1);
            shift += width;
            if shift > 128 {
                return Err(Error::Capacity(
                    "tracked binary statistics do not fit in a 128-bit key".into(),
                ));
            }
        }
        Ok(layout)
    }

    pub fn stat_ref(&self, pred: &str) -> Option<StatRef> {
        self.refs.get(pred).copied()
    }

    pub fn has_fields(&self) -> bool {
        !self.fields.is_empty()
    }

    #[inline]
    pub fn field(&self, key: u128, f: usize) -> u64 {
        ((key >> self.shifts[f]) & self.masks[f]) as u64
    }

    #[inline]
    pub fn stat(&self, r: StatRef, unary: &[u64], key: u128) -> u64 {
        match r {
            StatRef::Unary(u) => unary[u],
            StatRef::Binary { diag, field } => unary[diag] + self.field(key, field),
        }
    }

    /// Sum of two keys, or `None` once any field passes its cap.
    #[inline]
    pub fn add(&self, a: u128, b: u128) -> Option<u128> {
        let s = a + b;
        for f in 0..self.fields.len() {
            if self.field(s, f) > self.field_caps[f] {
                return None;
            }
        }
        Some(s)
    }

    /// Key of a single 2-type: `bit(R(x,y)) + bit(R(y,x))` per field.
    pub fn profile_key(&self, bit: impl Fn(usize) -> bool) -> Option<u128> {
        let mut key = 0u128;
        for (f, &(fwd, bwd)) in self.fields.iter().enumerate() {
            let c = bit(fwd) as u64 + bit(bwd) as u64;
            if c > self.field_caps[f] {
                return None;
            }
            key |= (c as u128) << self.shifts[f];
        }
        Some(key)
    }

    pub fn type_increments(&self, order: &AtomOrder, i: usize) -> Vec<u64> {
        self.unary_slots
            .iter()
            .map(|&s| order.unary_bit(i, s) as u64)
            .collect()
    }

    pub fn compile(&self, c: &CardinalityConstraint) -> Compiled {
        match c {
            CardinalityConstraint::Cmp(l) => Compiled::Cmp {
                terms: l
                    .terms
                    .iter()
                    .map(|(coef, p)| {
                        (
                            *coef,
                            self.stat_ref(p).expect("constraint predicate tracked"),
                        )
                    })
                    .collect(),
                op: l.op,
                rhs: l.rhs,
            },
            CardinalityConstraint::Not(a) => Compiled::Not(Box::new(self.compile(a))),
            CardinalityConstraint::And(a, b) => {
                Compiled::And(Box::new(self.compile(a)), Box::new(self.compile(b)))
            }
            CardinalityConstraint::Or(a, b) => {
                Compiled::Or(Box::new(self.compile(a)), Box::new(self.compile(b)))
            }
        }
    }
}

#[derive(Debug, Clone)]
pub(crate) enum Compiled {
    Cmp {
        terms: Vec<(i64, StatRef)>,
        op: CmpOp,
        rhs: i64,
    },
    Not(Box<Compiled>),
    And(Box<Compiled>, Box<Compiled>),
    Or(Box<Compiled>, Box<Compiled>),
}

impl Compiled {
    pub fn eval(&self, layout: &Layout, unary: &[u64], key: u128) -> bool {
        match self {
            Compiled::Cmp { terms, op, rhs } => {
                let lhs: i128 = terms
                    .iter()
                    .map(|(c, r)| *c as i128 * layout.stat(*r, unary, key) as i128)
                    .sum();
                op.holds(lhs, *rhs as i128)
            }
            Compiled::Not(a) => !a.eval(layout, unary, key),
            Compiled::And(a, b) => a.eval(layout, unary, key) && b.eval(layout, unary, key),
            Compiled::Or(a, b) => a.eval(layout, unary, key) || b.eval(layout, unary, key),
        }
    }

    /// `(can hold, can fail)` over every completion of a partial state in
    /// which `remaining` elements are still to be added.
    pub fn reachable(
        &self,
        layout: &Layout,
        unary: &[u64],
        key: u128,
        remaining: u64,
        n: u64,
    ) -> (bool, bool) {
        self.reachable_box(
            layout,
            unary,
            &|f| (layout.field(key, f), layout.field(key, f)),
            remaining,
            n,
        )
    }

    /// As [`Self::reachable`], with each current field known only to lie in `range(field)`.
    pub fn reachable_box(
        &self,
        layout: &Layout,
        unary: &[u64],
        range: &impl Fn(usize) -> (u64, u64),
        remaining: u64,
        n: u64,
    ) -> (bool, bool) {
        match self {
            Compiled::Cmp { terms, op, rhs } => {
                let future_pairs =
                    remaining * (n - remaining) + remaining * remaining.saturating_sub(1) / 2;
                let (mut l, mut h) = (0i128, 0i128);
                for (c, r) in terms {
                    let (s_lo, s_hi) = match *r {
                        StatRef::Unary(u) => {
                            (unary[u], layout.unary_caps[u].min(unary[u] + remaining))
                        }
                        StatRef::Binary { diag, field } => {
                            let (lo, hi) = range(field);
                            (
                                unary[diag] + lo,
                                layout.unary_caps[diag].min(unary[diag] + remaining)
                                    + layout.field_caps[field].min(hi + 2 * future_pairs),
                            )
                        }
                    };
                    let (a, b) = (*c as i128 * s_lo as i128, *c as i128 * s_hi as i128);
                    l += a.min(b);
                    h += a.max(b);
                }
                let d = *rhs as i128;
                match op {
                    CmpOp::Eq => (l <= d && d <= h, !(l == d && h == d)),
                    CmpOp::Le => (l <= d, h > d),
                    CmpOp::Ge => (h >= d, l < d),
                    CmpOp::Lt => (l < d, h >= d),
                    CmpOp::Gt => (h > d, l <= d),
                }
            }
            Compiled::Not(a) => {
                let (t, f) = a.reachable_box(layout, unary, range, remaining, n);
                (f, t)
            }
            Compiled::And(a, b) => {
                let (at, af) = a.reachable_box(layout, unary, range, remaining, n);
                let (bt, bf) = b.reachable_box(layout, unary, range, remaining, n);
                (at && bt, af || bf)
            }
            Compiled::Or(a, b) => {
                let (at, af) = a.reachable_box(layout, unary, range, remaining, n);
                let (bt, bf) = b.reachable_box(layout, unary, range, remaining, n);
                (at || bt, af && bf)
            }
        }
    }

    pub fn unary_only(&self) -> bool {
        match self {
            Compiled::Cmp { terms, .. } => {
                terms.iter().all(|(_, r)| matches!(r, StatRef::Unary(_)))
            }
            Compiled::Not(a) => a.unary_only(),
            Compiled::And(a, b) | Compiled::Or(a, b) => a.unary_only() && b.unary_only(),
        }
    }
}

/// `Σ c_i |P_i| <= d` forms implied by the conjunctive part of the constraints.
fn inequalities(c: &CardinalityConstraint, out: &mut Vec<(Vec<(i64, String)>, i64)>) {
    match c {
        CardinalityConstraint::Cmp(LinearComparison { terms, op, rhs }) => {
            let neg = || {
                terms
                    .iter()
                    .map(|(k, p)| (-k, p.clone()))
                    .collect::<Vec<_>>()
            };
            match op {
                CmpOp::Le => out.push((terms.clone(), *rhs)),
                CmpOp::Lt => out.push((terms.clone(), rhs - 1)),
                CmpOp::Ge => out.push((neg(), -rhs)),
                CmpOp::Gt => out.push((neg(), -rhs - 1)),
                CmpOp::Eq => {
                    out.push((terms.clone(), *rhs));
                    out.push((neg(), -rhs));
                }
            }
        }
        CardinalityConstraint::And(a, b) => {
            inequalities(a, out);
            inequalities(b, out);
        }
        CardinalityConstraint::Not(_) | CardinalityConstraint::Or(..) => {}
    }
}

/// Interval bounds on cardinalities; any model exceeding one violates a constraint.
pub(crate) fn upper_bounds(
    order: &AtomOrder,
    constraints: &[CardinalityConstraint],
    n: u64,
) -> HashMap<String, u64> {
    let mut ineqs = Vec::new();
    for c in constraints {
        inequalities(c, &mut ineqs);
    }
    let mut max: HashMap<String, i128> = HashMap::new();
    for (terms, _) in &ineqs {
        for (_, p) in terms {
            let full = match order.slots(p) {
                Some(Slots::Binary { .. }) => (n * n) as i128,
                _ => n as i128,
            };
            max.entry(p.clone()).or_insert(full);
        }
    }
    for _ in 0..16 {
        let mut changed = false;
        for (terms, d) in &ineqs {
            for (j, (cj, pj)) in terms.iter().enumerate() {
                if *cj <= 0 {
                    continue;
                }
                let mut slack = *d as i128;
                for (i, (ci, pi)) in terms.iter().enumerate() {
                    if i != j && *ci < 0 {
                        slack -= *ci as i128 * max[pi];
                    }
                }
                let bound = slack.div_euclid(*cj as i128).max(0);
                if bound < max[pj] {
                    max.insert(pj.clone(), bound);
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    max.into_iter().map(|(p, m)| (p, m as u64)).collect()
}
