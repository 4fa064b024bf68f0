use super::{Atom, CardinalityConstraint, Comparator, Formula, LinearComparison, Problem, Terms};
use crate::weights::{format_rational, WeightSpec};
use std::fmt::{self, Write};

// Binding strength; quantifiers are handled separately because their body
// extends as far right as possible.
fn precedence(f: &Formula) -> u8 {
    match f {
        Formula::Iff(..) => 0,
        Formula::Implies(..) => 1,
        Formula::Or(..) => 2,
        Formula::And(..) => 3,
        _ => 4,
    }
}

fn is_quantifier(f: &Formula) -> bool {
    matches!(
        f,
        Formula::Forall(..) | Formula::Exists(..) | Formula::CountExists(..)
    )
}

fn write_formula(out: &mut impl Write, f: &Formula, min: u8, top: bool) -> fmt::Result {
    if is_quantifier(f) {
        if !top {
            out.write_char('(')?;
        }
        let body = match f {
            Formula::Forall(v, body) => {
                write!(out, "forall {} ", v.name())?;
                body
            }
            Formula::Exists(v, body) => {
                write!(out, "exists {} ", v.name())?;
                body
            }
            Formula::CountExists(c, m, v, body) => {
                let op = match c {
                    Comparator::Eq => "=",
                    Comparator::Le => "<=",
                    Comparator::Ge => ">=",
                };
                write!(out, "exists[{op}{m}] {} ", v.name())?;
                body
            }
            _ => unreachable!(),
        };
        write_formula(out, body, 0, true)?;
        if !top {
            out.write_char(')')?;
        }
        return Ok(());
    }
    let prec = precedence(f);
    if prec < min {
        out.write_char('(')?;
        write_formula(out, f, 0, true)?;
        return out.write_char(')');
    }
    match f {
        Formula::True => out.write_str("true"),
        Formula::False => out.write_str("false"),
        Formula::Atom(a) => write_atom(out, a),
        Formula::Eq(p, q) => write!(out, "{} = {}", p.name(), q.name()),
        Formula::Neq(p, q) => write!(out, "{} != {}", p.name(), q.name()),
        Formula::Not(g) => {
            out.write_char('~')?;
            write_formula(out, g, 4, false)
        }
        Formula::And(a, b) => binary(out, a, " & ", b, 3, 4),
        Formula::Or(a, b) => binary(out, a, " | ", b, 2, 3),
        Formula::Implies(a, b) => binary(out, a, " -> ", b, 2, 1),
        Formula::Iff(a, b) => binary(out, a, " <-> ", b, 0, 1),
        _ => unreachable!(),
    }
}

fn binary(
    out: &mut impl Write,
    a: &Formula,
    op: &str,
    b: &Formula,
    left_min: u8,
    right_min: u8,
) -> fmt::Result {
    write_formula(out, a, left_min, false)?;
    out.write_str(op)?;
    write_formula(out, b, right_min, false)
}

fn write_atom(out: &mut impl Write, a: &Atom) -> fmt::Result {
    match a.terms {
        Terms::Unary(v) => write!(out, "{}({})", a.pred, v.name()),
        Terms::Binary(p, q) => write!(out, "{}({},{})", a.pred, p.name(), q.name()),
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_formula(f, self, 0, true)
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_atom(f, self)
    }
}

impl fmt::Display for LinearComparison {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            f.write_str("0")?;
        }
        for (idx, (c, p)) in self.terms.iter().enumerate() {
            let (sign, mag) = if *c < 0 {
                ("-", c.unsigned_abs())
            } else {
                ("+", *c as u64)
            };
            match (idx, sign) {
                (0, "+") => {}
                (0, _) => f.write_str("-")?,
                _ => write!(f, " {sign} ")?,
            }
            if mag != 1 {
                write!(f, "{mag}*")?;
            }
            write!(f, "|{p}|")?;
        }
        write!(f, " {} {}", self.op.symbol(), self.rhs)
    }
}

impl fmt::Display for CardinalityConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CardinalityConstraint::Cmp(l) => write!(f, "{l}"),
            CardinalityConstraint::Not(inner) => write!(f, "~({inner})"),
            CardinalityConstraint::And(a, b) => write!(f, "({a}) & ({b})"),
            CardinalityConstraint::Or(a, b) => write!(f, "({a}) | ({b})"),
        }
    }
}

impl fmt::Display for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "domain: {}", self.domain)?;
        if !self.signature.unary.is_empty() {
            writeln!(f, "unary: {}", self.signature.unary.join(", "))?;
        }
        if !self.signature.binary.is_empty() {
            writeln!(f, "binary: {}", self.signature.binary.join(", "))?;
        }
        writeln!(f, "formula: {}", self.sentence)?;
        for c in &self.constraints {
            writeln!(f, "constraint: {c}")?;
        }
        match &self.weights {
            WeightSpec::Unweighted => {}
            WeightSpec::Symmetric(map) => {
                for (p, (w, wbar)) in map {
                    writeln!(
                        f,
                        "weight: {p} {} {}",
                        format_rational(w),
                        format_rational(wbar)
                    )?;
                }
            }
            WeightSpec::StatTable(t) => {
                write!(f, "statweight: {} {{ ", t.preds.join(","))?;
                for (key, w) in &t.table {
                    let key: Vec<String> = key.iter().map(|k| k.to_string()).collect();
                    write!(f, "({}) -> {}; ", key.join(","), format_rational(w))?;
                }
                writeln!(f, "default -> {} }}", format_rational(&t.default))?;
            }
        }
        Ok(())
    }
}
