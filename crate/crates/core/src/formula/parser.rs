//! Line-oriented problem files and the formula / cardinality expression grammar.

use super::{
    Arity, Atom, CardinalityConstraint, CmpOp, Comparator, Formula, LinearComparison, Problem,
    Signature, Terms, Var, RESERVED_PREFIX,
};
use crate::error::{ParseError, ParseErrorKind};
use crate::weights::{StatTable, WeightSpec};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use std::collections::BTreeMap;

type PResult<T> = std::result::Result<T, ParseError>;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Int(u64),
    LParen,
    RParen,
    LBracket,
    RBracket,
    LBrace,
    RBrace,
    Comma,
    Semi,
    Tilde,
    Amp,
    Pipe,
    Arrow,
    DArrow,
    Eq,
    Neq,
    Le,
    Ge,
    Lt,
    Gt,
    Plus,
    Minus,
    Star,
    Slash,
    End,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    col: usize,
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Ident(s) => format!("`{s}`"),
        Tok::Int(i) => format!("`{i}`"),
        Tok::End => "end of line".to_string(),
        other => format!("{other:?}"),
    }
}

fn lex(text: &str, line: usize, base_col: usize) -> PResult<Vec<Token>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = base_col + i;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' || c == RESERVED_PREFIX {
            let start = i;
            i += 1;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push(Token {
                tok: Tok::Ident(chars[start..i].iter().collect()),
                col,
            });
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            let v = s.parse::<u64>().map_err(|_| {
                ParseError::new(
                    line,
                    col,
                    ParseErrorKind::Syntax(format!("integer `{s}` too large")),
                )
            })?;
            out.push(Token {
                tok: Tok::Int(v),
                col,
            });
            continue;
        }
        let next = chars.get(i + 1).copied();
        let next2 = chars.get(i + 2).copied();
        let (tok, len) = match (c, next, next2) {
            ('<', Some('-'), Some('>')) => (Tok::DArrow, 3),
            ('-', Some('>'), _) => (Tok::Arrow, 2),
            ('!', Some('='), _) => (Tok::Neq, 2),
            ('<', Some('='), _) => (Tok::Le, 2),
            ('>', Some('='), _) => (Tok::Ge, 2),
            ('<', _, _) => (Tok::Lt, 1),
            ('>', _, _) => (Tok::Gt, 1),
            ('=', _, _) => (Tok::Eq, 1),
            ('(', _, _) => (Tok::LParen, 1),
            (')', _, _) => (Tok::RParen, 1),
            ('[', _, _) => (Tok::LBracket, 1),
            (']', _, _) => (Tok::RBracket, 1),
            ('{', _, _) => (Tok::LBrace, 1),
            ('}', _, _) => (Tok::RBrace, 1),
            (',', _, _) => (Tok::Comma, 1),
            (';', _, _) => (Tok::Semi, 1),
            ('~', _, _) => (Tok::Tilde, 1),
            ('&', _, _) => (Tok::Amp, 1),
            ('|', _, _) => (Tok::Pipe, 1),
            ('+', _, _) => (Tok::Plus, 1),
            ('-', _, _) => (Tok::Minus, 1),
            ('*', _, _) => (Tok::Star, 1),
            ('/', _, _) => (Tok::Slash, 1),
            _ => {
                return Err(ParseError::new(
                    line,
                    col,
                    ParseErrorKind::Syntax(format!("unexpected character `{c}`")),
                ))
            }
        };
        out.push(Token { tok, col });
        i += len;
    }
    out.push(Token {
        tok: Tok::End,
        col: base_col + chars.len(),
    });
    Ok(out)
}

/// Parser knobs.
#[derive(Debug, Clone, Copy, Default)]
pub struct ParseOptions {
    /// Accept `$`-prefixed names, as printed by the compiler dump.
    pub allow_reserved: bool,
}

struct Parser<'a> {
    toks: Vec<Token>,
    pos: usize,
    line: usize,
    sig: Option<&'a Signature>,
    opts: ParseOptions,
    bound: Vec<Var>,
    check_bound: bool,
}

impl<'a> Parser<'a> {
    fn new(
        text: &str,
        line: usize,
        base_col: usize,
        sig: Option<&'a Signature>,
        opts: ParseOptions,
    ) -> PResult<Self> {
        Ok(Parser {
            toks: lex(text, line, base_col)?,
            pos: 0,
            line,
            sig,
            opts,
            bound: Vec::new(),
            check_bound: sig.is_some(),
        })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, ahead: usize) -> &Tok {
        let idx = (self.pos + ahead).min(self.toks.len() - 1);
        &self.toks[idx].tok
    }

    fn col(&self) -> usize {
        self.toks[self.pos].col
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err<T>(&self, kind: ParseErrorKind) -> PResult<T> {
        Err(ParseError::new(self.line, self.col(), kind))
    }

    fn err_at<T>(&self, col: usize, kind: ParseErrorKind) -> PResult<T> {
        Err(ParseError::new(self.line, col, kind))
    }

    fn unexpected<T>(&self, expected: &str) -> PResult<T> {
        self.err(ParseErrorKind::Syntax(format!(
            "expected {expected}, found {}",
            describe(self.peek())
        )))
    }

    fn expect(&mut self, tok: Tok, what: &str) -> PResult<()> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            self.unexpected(what)
        }
    }

    fn finish(&self) -> PResult<()> {
        if *self.peek() == Tok::End {
            Ok(())
        } else {
            self.unexpected("end of line")
        }
    }

    fn variable(&mut self) -> PResult<Var> {
        let col = self.col();
        match self.peek().clone() {
            Tok::Ident(name) => {
                self.bump();
                match name.as_str() {
                    "x" => Ok(Var::X),
                    "y" => Ok(Var::Y),
                    _ => self.err_at(col, ParseErrorKind::ThirdVariable(name)),
                }
            }
            _ => self.unexpected("a variable"),
        }
    }

    fn use_var(&self, v: Var, col: usize) -> PResult<()> {
        if self.check_bound && !self.bound.contains(&v) {
            return self.err_at(col, ParseErrorKind::UnboundVariable(v.name().to_string()));
        }
        Ok(())
    }

    fn predicate_name(&self, name: &str, col: usize) -> PResult<()> {
        if name.starts_with(RESERVED_PREFIX) && !self.opts.allow_reserved {
            return self.err_at(col, ParseErrorKind::ReservedName(name.to_string()));
        }
        Ok(())
    }

    // formula := iff
    fn formula(&mut self) -> PResult<Formula> {
        let mut lhs = self.implication()?;
        while *self.peek() == Tok::DArrow {
            self.bump();
            let rhs = self.implication()?;
            lhs = Formula::iff(lhs, rhs);
        }
        Ok(lhs)
    }

    fn implication(&mut self) -> PResult<Formula> {
        let lhs = self.disjunction()?;
        if *self.peek() == Tok::Arrow {
            self.bump();
            let rhs = self.implication()?;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> PResult<Formula> {
        let mut lhs = self.conjunction()?;
        while *self.peek() == Tok::Pipe {
            self.bump();
            let rhs = self.conjunction()?;
            lhs = Formula::or(lhs, rhs);
        }
        Ok(lhs)
    }

    fn conjunction(&mut self) -> PResult<Formula> {
        let mut lhs = self.unary()?;
        while *self.peek() == Tok::Amp {
            self.bump();
            let rhs = self.unary()?;
            lhs = Formula::and(lhs, rhs);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> PResult<Formula> {
        match self.peek().clone() {
            Tok::Tilde => {
                self.bump();
                Ok(Formula::not(self.unary()?))
            }
            Tok::LParen => {
                self.bump();
                let f = self.formula()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(f)
            }
            Tok::Ident(name) => match name.as_str() {
                "forall" | "exists" => self.quantifier(name == "forall"),
                "true" => {
                    self.bump();
                    Ok(Formula::True)
                }
                "false" => {
                    self.bump();
                    Ok(Formula::False)
                }
                _ => self.primary(name),
            },
            _ => self.unexpected("a formula"),
        }
    }

    fn quantifier(&mut self, universal: bool) -> PResult<Formula> {
        self.bump();
        let counting = if !universal && *self.peek() == Tok::LBracket {
            self.bump();
            let cmp = match self.peek() {
                Tok::Eq => Comparator::Eq,
                Tok::Le => Comparator::Le,
                Tok::Ge => Comparator::Ge,
                _ => return self.unexpected("`=`, `<=` or `>=`"),
            };
            self.bump();
            let m = match self.peek() {
                Tok::Int(m) => u32::try_from(*m).map_err(|_| {
                    ParseError::new(
                        self.line,
                        self.col(),
                        ParseErrorKind::Syntax("count too large".into()),
                    )
                })?,
                _ => return self.unexpected("a count"),
            };
            self.bump();
            self.expect(Tok::RBracket, "`]`")?;
            Some((cmp, m))
        } else {
            None
        };
        let v = self.variable()?;
        self.bound.push(v);
        let body = self.formula();
        self.bound.pop();
        let body = body?;
        Ok(match (universal, counting) {
            (true, _) => Formula::forall(v, body),
            (false, None) => Formula::exists(v, body),
            (false, Some((cmp, m))) => Formula::count_exists(cmp, m, v, body),
        })
    }

    fn primary(&mut self, name: String) -> PResult<Formula> {
        let col = self.col();
        match self.peek_at(1) {
            Tok::LParen => self.atom(name, col),
            Tok::Eq | Tok::Neq => {
                let a = self.variable()?;
                self.use_var(a, col)?;
                let eq = *self.peek() == Tok::Eq;
                self.bump();
                let col_b = self.col();
                let b = self.variable()?;
                self.use_var(b, col_b)?;
                Ok(if eq {
                    Formula::Eq(a, b)
                } else {
                    Formula::Neq(a, b)
                })
            }
            _ => self.unexpected("an atom, equality or quantifier"),
        }
    }

    fn atom(&mut self, name: String, col: usize) -> PResult<Formula> {
        self.bump();
        self.bump();
        let mut vars = Vec::new();
        loop {
            let vcol = self.col();
            let v = self.variable()?;
            self.use_var(v, vcol)?;
            vars.push(v);
            match self.peek() {
                Tok::Comma => {
                    self.bump();
                }
                Tok::RParen => {
                    self.bump();
                    break;
                }
                _ => return self.unexpected("`,` or `)`"),
            }
        }
        self.predicate_name(&name, col)?;
        let terms = match vars.as_slice() {
            [a] => Terms::Unary(*a),
            [a, b] => Terms::Binary(*a, *b),
            _ => {
                return self.err_at(
                    col,
                    ParseErrorKind::Syntax(format!("atom `{name}` has {} arguments", vars.len())),
                )
            }
        };
        if let Some(sig) = self.sig {
            let expected = match sig.arity(&name) {
                Some(Arity::Unary) => 1,
                Some(Arity::Binary) => 2,
                None => return self.err_at(col, ParseErrorKind::UndeclaredPredicate(name)),
            };
            if expected != terms.arity() {
                return self.err_at(
                    col,
                    ParseErrorKind::ArityMismatch {
                        name,
                        expected,
                        found: terms.arity(),
                    },
                );
            }
        }
        Ok(Formula::Atom(Atom { pred: name, terms }))
    }

    // constraint := cand ('|' cand)*
    fn constraint(&mut self) -> PResult<CardinalityConstraint> {
        let mut lhs = self.constraint_and()?;
        while *self.peek() == Tok::Pipe {
            self.bump();
            let rhs = self.constraint_and()?;
            lhs = CardinalityConstraint::Or(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn constraint_and(&mut self) -> PResult<CardinalityConstraint> {
        let mut lhs = self.constraint_unary()?;
        while *self.peek() == Tok::Amp {
            self.bump();
            let rhs = self.constraint_unary()?;
            lhs = CardinalityConstraint::And(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn constraint_unary(&mut self) -> PResult<CardinalityConstraint> {
        match self.peek() {
            Tok::Tilde => {
                self.bump();
                Ok(CardinalityConstraint::Not(Box::new(
                    self.constraint_unary()?,
                )))
            }
            Tok::LParen => {
                self.bump();
                let c = self.constraint()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(c)
            }
            _ => self.comparison(),
        }
    }

    fn comparison(&mut self) -> PResult<CardinalityConstraint> {
        let (lhs, lconst) = self.linear()?;
        let op = match self.peek() {
            Tok::Eq => CmpOp::Eq,
            Tok::Le => CmpOp::Le,
            Tok::Ge => CmpOp::Ge,
            Tok::Lt => CmpOp::Lt,
            Tok::Gt => CmpOp::Gt,
            _ => return self.unexpected("a comparison operator"),
        };
        self.bump();
        let (rhs, rconst) = self.linear()?;
        let mut terms = lhs;
        terms.extend(rhs.into_iter().map(|(c, p)| (-c, p)));
        Ok(CardinalityConstraint::Cmp(LinearComparison::new(
            terms,
            op,
            rconst - lconst,
        )))
    }

    // linear := ['-'] term (('+'|'-') term)*
    fn linear(&mut self) -> PResult<(Vec<(i64, String)>, i64)> {
        let mut terms = Vec::new();
        let mut constant = 0i64;
        let mut sign = 1i64;
        if *self.peek() == Tok::Minus {
            self.bump();
            sign = -1;
        }
        loop {
            match self.linear_term()? {
                (c, Some(p)) => terms.push((sign * c, p)),
                (c, None) => constant += sign * c,
            }
            match self.peek() {
                Tok::Plus => sign = 1,
                Tok::Minus => sign = -1,
                _ => break,
            }
            self.bump();
        }
        Ok((terms, constant))
    }

    fn linear_term(&mut self) -> PResult<(i64, Option<String>)> {
        match self.peek().clone() {
            Tok::Int(v) => {
                let col = self.col();
                self.bump();
                let v = i64::try_from(v).map_err(|_| {
                    ParseError::new(
                        self.line,
                        col,
                        ParseErrorKind::Syntax("integer too large".into()),
                    )
                })?;
                if *self.peek() == Tok::Star {
                    self.bump();
                    let p = self.cardinality()?;
                    Ok((v, Some(p)))
                } else {
                    Ok((v, None))
                }
            }
            Tok::Pipe => Ok((1, Some(self.cardinality()?))),
            _ => self.unexpected("`|P|` or an integer"),
        }
    }

    fn cardinality(&mut self) -> PResult<String> {
        self.expect(Tok::Pipe, "`|`")?;
        let col = self.col();
        let name = match self.peek().clone() {
            Tok::Ident(n) => n,
            _ => return self.unexpected("a predicate name"),
        };
        self.bump();
        self.expect(Tok::Pipe, "`|`")?;
        self.predicate_name(&name, col)?;
        if let Some(sig) = self.sig {
            if !sig.contains(&name) {
                return self.err_at(col, ParseErrorKind::UndeclaredPredicate(name));
            }
        }
        Ok(name)
    }

    fn rational(&mut self) -> PResult<BigRational> {
        let negative = if *self.peek() == Tok::Minus {
            self.bump();
            true
        } else {
            false
        };
        let numer = match self.peek() {
            Tok::Int(v) => BigInt::from(*v),
            _ => return self.unexpected("a rational"),
        };
        self.bump();
        let denom = if *self.peek() == Tok::Slash {
            self.bump();
            let col = self.col();
            match self.peek() {
                Tok::Int(0) => {
                    return self.err_at(col, ParseErrorKind::Syntax("zero denominator".into()))
                }
                Tok::Int(v) => {
                    let d = BigInt::from(*v);
                    self.bump();
                    d
                }
                _ => return self.unexpected("a denominator"),
            }
        } else {
            BigInt::from(1)
        };
        let r = BigRational::new(numer, denom);
        Ok(if negative { -r } else { r })
    }

    fn declared_predicate(&mut self) -> PResult<String> {
        let col = self.col();
        let name = match self.peek().clone() {
            Tok::Ident(n) => n,
            _ => return self.unexpected("a predicate name"),
        };
        self.bump();
        self.predicate_name(&name, col)?;
        if let Some(sig) = self.sig {
            if !sig.contains(&name) {
                return self.err_at(col, ParseErrorKind::UndeclaredPredicate(name));
            }
        }
        Ok(name)
    }

    fn statweight(&mut self) -> PResult<StatTable> {
        let mut preds = vec![self.declared_predicate()?];
        while *self.peek() == Tok::Comma {
            self.bump();
            preds.push(self.declared_predicate()?);
        }
        self.expect(Tok::LBrace, "`{`")?;
        let mut table = BTreeMap::new();
        let mut default = BigRational::zero();
        loop {
            match self.peek().clone() {
                Tok::RBrace => {
                    self.bump();
                    break;
                }
                Tok::Ident(word) if word == "default" => {
                    self.bump();
                    self.expect(Tok::Arrow, "`->`")?;
                    default = self.rational()?;
                }
                Tok::LParen => {
                    let col = self.col();
                    self.bump();
                    let mut key = Vec::new();
                    loop {
                        match self.peek() {
                            Tok::Int(v) => key.push(*v),
                            _ => return self.unexpected("an integer"),
                        }
                        self.bump();
                        match self.peek() {
                            Tok::Comma => {
                                self.bump();
                            }
                            Tok::RParen => {
                                self.bump();
                                break;
                            }
                            _ => return self.unexpected("`,` or `)`"),
                        }
                    }
                    if key.len() != preds.len() {
                        return self.err_at(
                            col,
                            ParseErrorKind::Syntax(format!(
                                "tuple has {} entries, expected {}",
                                key.len(),
                                preds.len()
                            )),
                        );
                    }
                    self.expect(Tok::Arrow, "`->`")?;
                    let w = self.rational()?;
                    table.insert(key, w);
                }
                _ => return self.unexpected("`(`, `default` or `}`"),
            }
            match self.peek() {
                Tok::Semi => {
                    self.bump();
                }
                Tok::RBrace => {}
                _ => return self.unexpected("`;` or `}`"),
            }
        }
        Ok(StatTable {
            preds,
            table,
            default,
        })
    }
}

/// Parses a single formula without a signature; free variables are allowed.
pub fn parse_formula(text: &str) -> std::result::Result<Formula, ParseError> {
    let mut p = Parser::new(
        text,
        1,
        1,
        None,
        ParseOptions {
            allow_reserved: true,
        },
    )?;
    let f = p.formula()?;
    p.finish()?;
    Ok(f)
}

/// Parses a single cardinality expression without a signature.
pub fn parse_cardinality(text: &str) -> std::result::Result<CardinalityConstraint, ParseError> {
    let mut p = Parser::new(
        text,
        1,
        1,
        None,
        ParseOptions {
            allow_reserved: true,
        },
    )?;
    let c = p.constraint()?;
    p.finish()?;
    Ok(c)
}

pub fn parse_problem(text: &str) -> std::result::Result<Problem, ParseError> {
    parse_problem_with(text, ParseOptions::default())
}

struct Directive<'t> {
    line: usize,
    key: &'t str,
    value: &'t str,
    col: usize,
}

pub fn parse_problem_with(
    text: &str,
    opts: ParseOptions,
) -> std::result::Result<Problem, ParseError> {
    let mut directives = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("");
        if content.trim().is_empty() {
            continue;
        }
        let Some(colon) = content.find(':') else {
            let col = content.len() - content.trim_start().len() + 1;
            return Err(ParseError::new(
                line,
                col,
                ParseErrorKind::Syntax("expected `<directive>: <value>`".into()),
            ));
        };
        let key = content[..colon].trim();
        let value = &content[colon + 1..];
        let col = content[..colon + 1].chars().count() + 1;
        directives.push(Directive {
            line,
            key,
            value,
            col,
        });
    }

    let mut sig = Signature::default();
    let mut domain = None;
    for d in &directives {
        match d.key {
            "domain" => {
                if domain.is_some() {
                    return Err(ParseError::new(
                        d.line,
                        1,
                        ParseErrorKind::Duplicate("domain"),
                    ));
                }
                let mut p = Parser::new(d.value, d.line, d.col, None, opts)?;
                let n = match p.peek() {
                    Tok::Int(n) if *n >= 1 => *n,
                    Tok::Int(_) => return p.err(ParseErrorKind::InvalidDomain),
                    _ => return p.unexpected("a positive integer"),
                };
                p.bump();
                p.finish()?;
                domain = Some(n);
            }
            "unary" | "binary" => {
                let mut p = Parser::new(d.value, d.line, d.col, None, opts)?;
                loop {
                    let col = p.col();
                    let name = match p.peek().clone() {
                        Tok::Ident(n) if !is_keyword(&n) => n,
                        _ => return p.unexpected("a predicate name"),
                    };
                    p.bump();
                    p.predicate_name(&name, col)?;
                    if sig.contains(&name) {
                        return p.err_at(col, ParseErrorKind::DuplicatePredicate(name));
                    }
                    if d.key == "unary" {
                        sig.push_unary(name);
                    } else {
                        sig.push_binary(name);
                    }
                    match p.peek() {
                        Tok::Comma => {
                            p.bump();
                        }
                        Tok::End => break,
                        _ => return p.unexpected("`,` or end of line"),
                    }
                }
            }
            "formula" | "constraint" | "weight" | "statweight" => {}
            other => {
                return Err(ParseError::new(
                    d.line,
                    1,
                    ParseErrorKind::UnknownDirective(other.to_string()),
                ))
            }
        }
    }

    let mut sentence = None;
    let mut constraints = Vec::new();
    let mut symmetric: BTreeMap<String, (BigRational, BigRational)> = BTreeMap::new();
    let mut table: Option<StatTable> = None;
    for d in &directives {
        match d.key {
            "formula" => {
                if sentence.is_some() {
                    return Err(ParseError::new(
                        d.line,
                        1,
                        ParseErrorKind::Duplicate("formula"),
                    ));
                }
                let mut p = Parser::new(d.value, d.line, d.col, Some(&sig), opts)?;
                let f = p.formula()?;
                p.finish()?;
                sentence = Some(f);
            }
            "constraint" => {
                let mut p = Parser::new(d.value, d.line, d.col, Some(&sig), opts)?;
                let c = p.constraint()?;
                p.finish()?;
                constraints.push(c);
            }
            "weight" => {
                if table.is_some() {
                    return Err(ParseError::new(d.line, 1, ParseErrorKind::MixedWeights));
                }
                let mut p = Parser::new(d.value, d.line, d.col, Some(&sig), opts)?;
                let name = p.declared_predicate()?;
                let w = p.rational()?;
                let wbar = p.rational()?;
                p.finish()?;
                symmetric.insert(name, (w, wbar));
            }
            "statweight" => {
                if !symmetric.is_empty() {
                    return Err(ParseError::new(d.line, 1, ParseErrorKind::MixedWeights));
                }
                if table.is_some() {
                    return Err(ParseError::new(
                        d.line,
                        1,
                        ParseErrorKind::Duplicate("statweight"),
                    ));
                }
                let mut p = Parser::new(d.value, d.line, d.col, Some(&sig), opts)?;
                let t = p.statweight()?;
                p.finish()?;
                table = Some(t);
            }
            _ => {}
        }
    }

    let last_line = text.lines().count().max(1);
    let domain = domain.ok_or(ParseError::new(
        last_line,
        1,
        ParseErrorKind::Missing("domain"),
    ))?;
    let sentence = sentence.ok_or(ParseError::new(
        last_line,
        1,
        ParseErrorKind::Missing("formula"),
    ))?;
    let weights = match (table, symmetric.is_empty()) {
        (Some(t), _) => WeightSpec::StatTable(t),
        (None, false) => WeightSpec::Symmetric(symmetric),
        (None, true) => WeightSpec::Unweighted,
    };
    Ok(Problem {
        signature: sig,
        sentence,
        domain,
        constraints,
        weights,
    })
}

fn is_keyword(s: &str) -> bool {
    matches!(
        s,
        "x" | "y" | "forall" | "exists" | "true" | "false" | "default"
    )
}
