//! Normal forms and compilation of a C² problem into a pure universal program.
//!
//! Pipeline: counting quantifiers are expanded to `=m` form and extracted into
//! fresh `$A` predicates, the remainder is put in Scott normal form, and both
//! kinds of existential are reduced to signed universal clauses.

use crate::formula::{
    Arity, CardinalityConstraint, CmpOp, Comparator, Formula, Problem, Signature, Terms, Var,
};
use crate::weights::WeightSpec;
use std::fmt;

/// Why a compiler-introduced predicate exists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Role {
    /// `$D`: Scott definition of a quantified subformula.
    Definition(Formula),
    /// `$R`: binary name for a counting-quantifier body.
    Relation(Formula),
    /// `$A`: holds where the element has exactly `m` successors.
    Counting { relation: String, m: u32 },
    /// `$P`: sign predicate for an existential clause.
    Skolem(Formula),
    /// `$B`: inclusion-exclusion complement of a counting predicate.
    CountingComplement(String),
    /// `$f`: the `index`-th witness function for a counting predicate.
    Witness { counting: String, index: u32 },
    /// `$M`: restriction of the counted relation to `$A ∪ $B`.
    Restriction(String),
    /// `$P{k}_{i}`: sign predicate for a witness clause.
    WitnessSign { counting: String, index: u32 },
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Role::Definition(d) => write!(f, "definition of {d}"),
            Role::Relation(d) => write!(f, "relation {d}"),
            Role::Counting { relation, m } => write!(f, "exactly {m} {relation}-successors"),
            Role::Skolem(psi) => write!(f, "sign for exists y ({psi})"),
            Role::CountingComplement(a) => write!(f, "complement of {a}"),
            Role::Witness { counting, index } => write!(f, "witness {index} for {counting}"),
            Role::Restriction(a) => write!(f, "restriction for {a}"),
            Role::WitnessSign { counting, index } => {
                write!(f, "sign for witness {index} of {counting}")
            }
        }
    }
}

pub type Ledger = Vec<(String, Arity, Role)>;

#[derive(Debug, Default)]
struct Fresh {
    ledger: Ledger,
    definitions: u32,
    relations: u32,
    counting: u32,
}

impl Fresh {
    fn add(&mut self, name: String, arity: Arity, role: Role) -> String {
        self.ledger.push((name.clone(), arity, role));
        name
    }

    fn definition(&mut self, body: Formula) -> String {
        self.definitions += 1;
        let name = format!("$D{}", self.definitions);
        self.add(name, Arity::Unary, Role::Definition(body))
    }

    fn relation(&mut self, body: Formula) -> String {
        self.relations += 1;
        let name = format!("$R{}", self.relations);
        self.add(name, Arity::Binary, Role::Relation(body))
    }

    fn counting(&mut self, relation: &str, m: u32) -> String {
        self.counting += 1;
        let name = format!("$A{}", self.counting);
        self.add(
            name,
            Arity::Unary,
            Role::Counting {
                relation: relation.to_string(),
                m,
            },
        )
    }
}

/// Rewrites counting quantifiers so only `exists[=m]` with `m >= 1` remains.
pub fn expand_counting(f: &Formula) -> Formula {
    match f {
        Formula::True | Formula::False | Formula::Atom(_) | Formula::Eq(..) | Formula::Neq(..) => {
            f.clone()
        }
        Formula::Not(g) => Formula::not(expand_counting(g)),
        Formula::And(a, b) => Formula::and(expand_counting(a), expand_counting(b)),
        Formula::Or(a, b) => Formula::or(expand_counting(a), expand_counting(b)),
        Formula::Implies(a, b) => Formula::implies(expand_counting(a), expand_counting(b)),
        Formula::Iff(a, b) => Formula::iff(expand_counting(a), expand_counting(b)),
        Formula::Forall(v, g) => Formula::forall(*v, expand_counting(g)),
        Formula::Exists(v, g) => Formula::exists(*v, expand_counting(g)),
        Formula::CountExists(cmp, m, v, g) => expand_count(*cmp, *m, *v, &expand_counting(g)),
    }
}

fn expand_count(cmp: Comparator, m: u32, v: Var, body: &Formula) -> Formula {
    match (cmp, m) {
        (Comparator::Eq, 0) => Formula::forall(v, Formula::not(body.clone())),
        (Comparator::Eq, m) => Formula::count_exists(Comparator::Eq, m, v, body.clone()),
        (Comparator::Le, m) => {
            Formula::disjunction((0..=m).map(|k| expand_count(Comparator::Eq, k, v, body)))
        }
        (Comparator::Ge, 0) => Formula::True,
        (Comparator::Ge, 1) => Formula::exists(v, body.clone()),
        (Comparator::Ge, m) => Formula::not(expand_count(Comparator::Le, m - 1, v, body)),
    }
}

/// A counting quantifier replaced by `counting(x) <-> exists[=m] y relation(x,y)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountingTriple {
    pub counting: String,
    pub m: u32,
    pub relation: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Extraction {
    pub formula: Formula,
    pub triples: Vec<CountingTriple>,
    /// Definitions `forall x forall y ($R(x,y) <-> body)` for non-atomic bodies.
    pub axioms: Vec<Formula>,
    pub ledger: Ledger,
}

/// Replaces every `exists[=m]` subformula by a fresh unary atom.
pub fn extract_counting(f: &Formula) -> Extraction {
    let mut fresh = Fresh::default();
    let (formula, triples, axioms) = extract_with(f, &mut fresh);
    Extraction {
        formula,
        triples,
        axioms,
        ledger: fresh.ledger,
    }
}

fn extract_with(f: &Formula, fresh: &mut Fresh) -> (Formula, Vec<CountingTriple>, Vec<Formula>) {
    let mut triples = Vec::new();
    let mut axioms = Vec::new();
    let formula = extract_rec(f, &mut Vec::new(), fresh, &mut triples, &mut axioms);
    (formula, triples, axioms)
}

fn extract_rec(
    f: &Formula,
    bound: &mut Vec<Var>,
    fresh: &mut Fresh,
    triples: &mut Vec<CountingTriple>,
    axioms: &mut Vec<Formula>,
) -> Formula {
    let mut rec = |g: &Formula, bound: &mut Vec<Var>| extract_rec(g, bound, fresh, triples, axioms);
    match f {
        Formula::True | Formula::False | Formula::Atom(_) | Formula::Eq(..) | Formula::Neq(..) => {
            f.clone()
        }
        Formula::Not(g) => Formula::not(rec(g, bound)),
        Formula::And(a, b) => Formula::and(rec(a, bound), rec(b, bound)),
        Formula::Or(a, b) => Formula::or(rec(a, bound), rec(b, bound)),
        Formula::Implies(a, b) => Formula::implies(rec(a, bound), rec(b, bound)),
        Formula::Iff(a, b) => Formula::iff(rec(a, bound), rec(b, bound)),
        Formula::Forall(v, g) | Formula::Exists(v, g) => {
            bound.push(*v);
            let body = rec(g, bound);
            bound.pop();
            if matches!(f, Formula::Forall(..)) {
                Formula::forall(*v, body)
            } else {
                Formula::exists(*v, body)
            }
        }
        Formula::CountExists(cmp, m, v, g) => {
            assert!(
                *cmp == Comparator::Eq && *m >= 1,
                "extract_counting expects expanded counting quantifiers"
            );
            bound.push(*v);
            let body = rec(g, bound);
            bound.pop();
            let canonical = if *v == Var::Y { body } else { body.swap_vars() };
            let relation = match &canonical {
                Formula::Atom(a) if a.terms == Terms::Binary(Var::X, Var::Y) => a.pred.clone(),
                _ => {
                    let name = fresh.relation(canonical.clone());
                    axioms.push(Formula::forall(
                        Var::X,
                        Formula::forall(
                            Var::Y,
                            Formula::iff(Formula::binary(&name, Var::X, Var::Y), canonical),
                        ),
                    ));
                    name
                }
            };
            let counting = fresh.counting(&relation, *m);
            triples.push(CountingTriple {
                counting: counting.clone(),
                m: *m,
                relation,
            });
            let other = v.other();
            let atom = Formula::unary(&counting, other);
            if bound.contains(&other) {
                atom
            } else {
                Formula::forall(other, atom)
            }
        }
    }
}

/// `forall x forall y phi  &  AND_i forall x exists y psis[i]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Snf {
    pub phi: Formula,
    pub psis: Vec<Formula>,
    pub ledger: Ledger,
}

/// Scott normal form of a closed FO² sentence without counting quantifiers.
pub fn to_snf(f: &Formula) -> Snf {
    let mut fresh = Fresh::default();
    let mut snf = SnfBuilder::default();
    snf.sentence(f, &mut fresh);
    Snf {
        phi: Formula::conjunction(snf.kernel),
        psis: snf.psis,
        ledger: fresh.ledger,
    }
}

#[derive(Default)]
struct SnfBuilder {
    kernel: Vec<Formula>,
    psis: Vec<Formula>,
}

fn conjuncts(f: &Formula, out: &mut Vec<Formula>) {
    match f {
        Formula::And(a, b) => {
            conjuncts(a, out);
            conjuncts(b, out);
        }
        _ => out.push(f.clone()),
    }
}

fn canonical_xy(outer: Var, body: Formula) -> Formula {
    if outer == Var::X {
        body
    } else {
        body.swap_vars()
    }
}

impl SnfBuilder {
    fn sentence(&mut self, f: &Formula, fresh: &mut Fresh) {
        let mut parts = Vec::new();
        conjuncts(f, &mut parts);
        for part in parts {
            match &part {
                Formula::True => {}
                Formula::Forall(v, body) => match body.as_ref() {
                    Formula::Forall(w, theta) if w != v => {
                        let theta = self.flatten(theta, fresh);
                        self.kernel.push(canonical_xy(*v, theta));
                    }
                    Formula::Exists(w, theta) if w != v => {
                        let theta = self.flatten(theta, fresh);
                        self.psis.push(canonical_xy(*v, theta));
                    }
                    _ => {
                        let body = self.flatten(body, fresh);
                        self.kernel.push(body);
                    }
                },
                Formula::Exists(v, body) => {
                    let body = self.flatten(body, fresh);
                    // exists v b(v)  ==  forall x exists y b(y)
                    let psi = if *v == Var::Y { body } else { body.swap_vars() };
                    self.psis.push(psi);
                }
                _ => {
                    let f = self.flatten(&part, fresh);
                    self.kernel.push(f);
                }
            }
        }
    }

    /// Replaces every quantified subformula by a fresh definition atom.
    fn flatten(&mut self, f: &Formula, fresh: &mut Fresh) -> Formula {
        match f {
            Formula::True
            | Formula::False
            | Formula::Atom(_)
            | Formula::Eq(..)
            | Formula::Neq(..) => f.clone(),
            Formula::Not(g) => Formula::not(self.flatten(g, fresh)),
            Formula::And(a, b) => Formula::and(self.flatten(a, fresh), self.flatten(b, fresh)),
            Formula::Or(a, b) => Formula::or(self.flatten(a, fresh), self.flatten(b, fresh)),
            Formula::Implies(a, b) => {
                Formula::implies(self.flatten(a, fresh), self.flatten(b, fresh))
            }
            Formula::Iff(a, b) => Formula::iff(self.flatten(a, fresh), self.flatten(b, fresh)),
            Formula::Forall(w, theta) | Formula::Exists(w, theta) => {
                let theta = self.flatten(theta, fresh);
                let other = w.other();
                let canonical = canonical_xy(other, theta);
                let name = fresh.definition(f.clone());
                let d = Formula::unary(&name, Var::X);
                if matches!(f, Formula::Forall(..)) {
                    self.kernel
                        .push(Formula::implies(d.clone(), canonical.clone()));
                    self.psis.push(Formula::or(d, Formula::not(canonical)));
                } else {
                    self.psis
                        .push(Formula::or(Formula::not(d.clone()), canonical.clone()));
                    self.kernel.push(Formula::or(d, Formula::not(canonical)));
                }
                Formula::unary(name, other)
            }
            Formula::CountExists(..) => {
                panic!("counting quantifiers must be extracted before Scott normal form")
            }
        }
    }
}

/// Pure universal program whose signed, divided closed-form sum is the count
/// of the source problem.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountingProgram {
    /// Source signature followed by every fresh predicate.
    pub signature: Signature,
    /// Quantifier-free matrix of the implicit `forall x forall y`.
    pub kernel: Formula,
    pub sign_preds: Vec<String>,
    /// `(A_k, m_k)`: each element of `A_k` divides the count by `m_k!`.
    pub divisors: Vec<(String, u32)>,
    pub constraints: Vec<CardinalityConstraint>,
    pub original_preds: Vec<String>,
    pub ledger: Ledger,
}

impl CountingProgram {
    /// The kernel as a problem in the input grammar, for inspection.
    pub fn to_problem(&self, domain: u64, weights: WeightSpec) -> Problem {
        Problem {
            signature: self.signature.clone(),
            sentence: Formula::forall(Var::X, Formula::forall(Var::Y, self.kernel.clone())),
            domain,
            constraints: self.constraints.clone(),
            weights,
        }
    }

    /// Problem-file text with sign, divisor and ledger comments.
    pub fn dump(&self, domain: u64, weights: &WeightSpec) -> String {
        let mut out = String::new();
        for p in &self.sign_preds {
            out.push_str(&format!("# sign: {p}\n"));
        }
        for (a, m) in &self.divisors {
            out.push_str(&format!("# divisor: {a} {m}\n"));
        }
        for (name, _, role) in &self.ledger {
            out.push_str(&format!("# fresh: {name} = {role}\n"));
        }
        out.push_str(&self.to_problem(domain, weights.clone()).to_string());
        out
    }
}

pub fn compile(p: &Problem) -> CountingProgram {
    let mut fresh = Fresh::default();
    let expanded = expand_counting(&p.sentence);
    let (phi0, triples, axioms) = extract_with(&expanded, &mut fresh);
    let remainder = Formula::conjunction(std::iter::once(phi0).chain(axioms));

    let mut snf = SnfBuilder::default();
    snf.sentence(&remainder, &mut fresh);
    let mut clauses = snf.kernel;
    let mut sign_preds = Vec::new();

    for (idx, psi) in snf.psis.into_iter().enumerate() {
        let name = fresh.add(
            format!("$P{}", idx + 1),
            Arity::Unary,
            Role::Skolem(psi.clone()),
        );
        clauses.push(Formula::implies(
            Formula::unary(&name, Var::X),
            Formula::not(psi),
        ));
        sign_preds.push(name);
    }

    let mut divisors = Vec::new();
    let mut constraints = Vec::new();
    for (k, t) in triples.iter().enumerate() {
        let k = k + 1;
        let a = || Formula::unary(&t.counting, Var::X);
        let b_name = fresh.add(
            format!("$B{k}"),
            Arity::Unary,
            Role::CountingComplement(t.counting.clone()),
        );
        let b = || Formula::unary(&b_name, Var::X);
        let r = || Formula::binary(&t.relation, Var::X, Var::Y);
        let a_or_b = || Formula::or(a(), b());
        let fs: Vec<String> = (1..=t.m)
            .map(|i| {
                fresh.add(
                    format!("$f{k}_{i}"),
                    Arity::Binary,
                    Role::Witness {
                        counting: t.counting.clone(),
                        index: i,
                    },
                )
            })
            .collect();
        let m_name = fresh.add(
            format!("$M{k}"),
            Arity::Binary,
            Role::Restriction(t.counting.clone()),
        );
        let f = |i: usize| Formula::binary(&fs[i], Var::X, Var::Y);
        for i in 0..fs.len() {
            for j in i + 1..fs.len() {
                clauses.push(Formula::implies(f(i), Formula::not(f(j))));
            }
        }
        for i in 0..fs.len() {
            clauses.push(Formula::implies(f(i), r()));
        }
        clauses.push(Formula::implies(b(), Formula::not(a())));
        clauses.push(Formula::iff(
            Formula::binary(&m_name, Var::X, Var::Y),
            Formula::and(a_or_b(), r()),
        ));
        for (i, fi) in fs.iter().enumerate() {
            let name = fresh.add(
                format!("$P{k}_{}", i + 1),
                Arity::Unary,
                Role::WitnessSign {
                    counting: t.counting.clone(),
                    index: i as u32 + 1,
                },
            );
            clauses.push(Formula::implies(
                Formula::unary(&name, Var::X),
                Formula::not(Formula::implies(a_or_b(), f(i))),
            ));
            sign_preds.push(name);
            constraints.push(CardinalityConstraint::cmp(
                vec![
                    (1, t.counting.clone()),
                    (1, b_name.clone()),
                    (-1, fi.clone()),
                ],
                CmpOp::Eq,
                0,
            ));
        }
        constraints.push(CardinalityConstraint::cmp(
            vec![(t.m as i64, fs[0].clone()), (-1, m_name.clone())],
            CmpOp::Eq,
            0,
        ));
        sign_preds.push(b_name);
        divisors.push((t.counting.clone(), t.m));
    }
    constraints.extend(p.constraints.iter().cloned());

    let mut signature = p.signature.clone();
    for (name, arity, _) in &fresh.ledger {
        match arity {
            Arity::Unary => signature.push_unary(name.clone()),
            Arity::Binary => signature.push_binary(name.clone()),
        }
    }
    CountingProgram {
        signature,
        kernel: Formula::conjunction(clauses),
        sign_preds,
        divisors,
        constraints,
        original_preds: p
            .signature
            .unary
            .iter()
            .chain(&p.signature.binary)
            .cloned()
            .collect(),
        ledger: fresh.ledger,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{parse_formula, parse_problem};

    fn f(text: &str) -> Formula {
        parse_formula(text).unwrap()
    }

    #[test]
    fn expand_at_most() {
        let got = expand_counting(&f("exists[<=2] y R(x,y)"));
        let r = Formula::binary("R", Var::X, Var::Y);
        let built = Formula::or(
            Formula::or(
                Formula::forall(Var::Y, Formula::not(r.clone())),
                Formula::count_exists(Comparator::Eq, 1, Var::Y, r.clone()),
            ),
            Formula::count_exists(Comparator::Eq, 2, Var::Y, r),
        );
        assert_eq!(got, built);
    }

    #[test]
    fn expand_at_least() {
        let r = Formula::binary("R", Var::X, Var::Y);
        assert_eq!(
            expand_counting(&f("exists[>=2] y R(x,y)")),
            Formula::not(Formula::or(
                Formula::forall(Var::Y, Formula::not(r.clone())),
                Formula::count_exists(Comparator::Eq, 1, Var::Y, r.clone()),
            ))
        );
        assert_eq!(expand_counting(&f("exists[>=0] y R(x,y)")), Formula::True);
        assert_eq!(
            expand_counting(&f("exists[>=1] y R(x,y)")),
            Formula::exists(Var::Y, r.clone())
        );
        assert_eq!(
            expand_counting(&f("exists[=0] y R(x,y)")),
            Formula::forall(Var::Y, Formula::not(r))
        );
    }

    #[test]
    fn extract_direct_atom() {
        let e = extract_counting(&f("forall x exists[=1] y R(x,y)"));
        assert_eq!(e.formula, f("forall x $A1(x)"));
        assert_eq!(
            e.triples,
            [CountingTriple {
                counting: "$A1".into(),
                m: 1,
                relation: "R".into()
            }]
        );
        assert!(e.axioms.is_empty());
    }

    #[test]
    fn extract_inside_biconditional() {
        let e = extract_counting(&f("forall x (B(x) <-> exists[=2] y R(x,y))"));
        assert_eq!(e.formula, f("forall x (B(x) <-> $A1(x))"));
        assert_eq!(e.triples[0].m, 2);
        assert_eq!(e.triples[0].relation, "R");
    }

    #[test]
    fn extract_defines_relation() {
        let e = extract_counting(&f("forall x exists[=1] y (R(x,y) & A(y))"));
        assert_eq!(e.triples[0].relation, "$R1");
        assert_eq!(
            e.axioms,
            [f("forall x forall y ($R1(x,y) <-> R(x,y) & A(y))")]
        );
    }

    #[test]
    fn extract_reversed_variables() {
        let e = extract_counting(&f("forall y exists[=1] x R(x,y)"));
        assert_eq!(e.formula, f("forall y $A1(y)"));
        assert_eq!(e.axioms, [f("forall x forall y ($R1(x,y) <-> R(y,x))")]);
    }

    #[test]
    fn snf_shapes() {
        let s = to_snf(&f("forall x exists y R(x,y)"));
        assert_eq!(s.phi, Formula::True);
        assert_eq!(s.psis, [f("R(x,y)")]);

        let s = to_snf(&f("exists x A(x)"));
        assert_eq!(s.phi, Formula::True);
        assert_eq!(s.psis, [f("A(y)")]);

        let s = to_snf(&f("forall x (A(x) | exists y R(x,y))"));
        assert_eq!(s.ledger.len(), 1);
        assert_eq!(s.psis, [f("~$D1(x) | R(x,y)")]);
        assert_eq!(s.phi, f("($D1(x) | ~R(x,y)) & (A(x) | $D1(x))"));
    }

    #[test]
    fn compile_existential() {
        let p = parse_problem("domain: 2\nbinary: R\nformula: forall x exists y R(x,y)").unwrap();
        let prog = compile(&p);
        assert_eq!(prog.kernel, f("$P1(x) -> ~R(x,y)"));
        assert_eq!(prog.sign_preds, ["$P1"]);
        assert!(prog.divisors.is_empty());
        assert!(prog.constraints.is_empty());
        assert_eq!(prog.signature.unary, ["$P1"]);
    }

    #[test]
    fn compile_universal_is_identity() {
        let p = parse_problem(
            "domain: 3\nunary: A\nbinary: R\nformula: forall x forall y (A(x) & R(x,y) & x != y -> A(y))\nconstraint: |A| <= 2",
        )
        .unwrap();
        let prog = compile(&p);
        assert_eq!(prog.kernel, f("A(x) & R(x,y) & x != y -> A(y)"));
        assert!(prog.sign_preds.is_empty() && prog.divisors.is_empty());
        assert_eq!(prog.constraints, p.constraints);
        assert_eq!(prog.signature, p.signature);
    }

    #[test]
    fn compile_counting() {
        let p =
            parse_problem("domain: 3\nbinary: R\nformula: forall x exists[=2] y R(x,y)").unwrap();
        let prog = compile(&p);
        assert_eq!(prog.sign_preds, ["$P1_1", "$P1_2", "$B1"]);
        assert_eq!(prog.divisors, [("$A1".to_string(), 2)]);
        assert_eq!(prog.signature.binary, ["R", "$f1_1", "$f1_2", "$M1"]);
        let antisym = f("$f1_1(x,y) -> ~$f1_2(x,y)");
        let mut clauses = Vec::new();
        conjuncts(&prog.kernel, &mut clauses);
        assert_eq!(clauses.iter().filter(|c| **c == antisym).count(), 1);
        assert!(clauses.contains(&f("$A1(x)")));
        assert_eq!(prog.constraints.len(), 3);
        assert_eq!(
            prog.constraints[2],
            CardinalityConstraint::cmp(vec![(2, "$f1_1".into()), (-1, "$M1".into())], CmpOp::Eq, 0)
        );
    }

    #[test]
    fn antisymmetry_clause_count() {
        for m in 1..=4u32 {
            let p = parse_problem(&format!(
                "domain: 2\nbinary: R\nformula: forall x exists[={m}] y R(x,y)"
            ))
            .unwrap();
            let prog = compile(&p);
            let mut clauses = Vec::new();
            conjuncts(&prog.kernel, &mut clauses);
            let pairs = clauses
                .iter()
                .filter(|c| match c {
                    Formula::Implies(a, b) => {
                        matches!((a.as_ref(), b.as_ref()), (Formula::Atom(p), Formula::Not(q))
                            if p.pred.starts_with("$f") && matches!(q.as_ref(), Formula::Atom(q) if q.pred.starts_with("$f")))
                    }
                    _ => false,
                })
                .count();
            assert_eq!(pairs as u32, m * (m - 1) / 2);
        }
    }

    #[test]
    fn dump_reparses() {
        let p =
            parse_problem("domain: 2\nbinary: R\nformula: forall x exists[<=1] y R(x,y)").unwrap();
        let prog = compile(&p);
        let text = prog.dump(2, &WeightSpec::Unweighted);
        assert!(text.contains("# sign: $B1"));
        assert!(text.contains("# divisor: $A1 1"));
        let back = crate::formula::parse_problem_with(
            &text,
            crate::formula::ParseOptions {
                allow_reserved: true,
            },
        )
        .unwrap();
        assert_eq!(back.signature, prog.signature);
        assert_eq!(back.constraints, prog.constraints);
    }
}
