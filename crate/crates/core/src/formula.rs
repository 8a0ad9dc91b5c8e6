//! A small first-order language over exact rationals with set-bounded
//! quantifiers, used to state the side conditions that the rest of the
//! crate implements directly and to cross-check those implementations.
//!
//! Terms are built from integer literals, variables, `+`, `-`, `*`, `/`,
//! integer powers `^` (negative exponents allowed, as in `u^-2`), and
//! application `f(term)` of a named tagged function. Atoms compare two
//! terms with `<`, `<=`, `=`, `>`, `>=` or test membership `term in S`
//! against a named set. Formulas combine atoms with `!`, `&`, `|`, `->`
//! in decreasing binding strength (`->` associates to the right) and the
//! bounded quantifiers `forall x in S` and `exists x in S`, whose bodies
//! extend to the next atom, negation, quantifier, or parenthesized
//! formula. `#` starts a comment that runs to the end of the line.
//!
//! Evaluation is exact and ranges quantifiers over the finite elements
//! of the named set. Connectives and quantifiers short-circuit left to
//! right; a division by zero or a negative power of zero inside a term
//! is an evaluation error naming the offending subterm, never a truth
//! value. Displayed terms and formulas are fully parenthesized and
//! reparse to the same tree.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use crate::error::{Error, Result};
use crate::func::TaggedFunction;
use crate::io;
use crate::rational::Rational;
use crate::set::DiscreteSet;

/// Arithmetic expression over rationals, variables, and named functions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Term {
    Lit(Rational),
    Var(String),
    Neg(Box<Term>),
    Add(Box<Term>, Box<Term>),
    Sub(Box<Term>, Box<Term>),
    Mul(Box<Term>, Box<Term>),
    Div(Box<Term>, Box<Term>),
    Pow(Box<Term>, i64),
    App(String, Box<Term>),
}

/// Comparison operator of an atomic formula.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CmpOp {
    Lt,
    Le,
    Eq,
    Gt,
    Ge,
}

/// Quantifier kind; both range over a named finite set.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Quantifier {
    Forall,
    Exists,
}

/// Parsed formula. Built by [`parse_formula`] or by hand in tests.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Formula {
    Cmp(CmpOp, Term, Term),
    Member(Term, String),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Quant(Quantifier, String, String, Box<Formula>),
}

/// Named finite sets and functions that give formulas their meaning.
#[derive(Clone, Debug, Default)]
pub struct Structure {
    pub sets: BTreeMap<String, DiscreteSet>,
    pub funcs: BTreeMap<String, TaggedFunction>,
}

impl Structure {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_set(mut self, name: &str, set: DiscreteSet) -> Self {
        self.sets.insert(name.to_string(), set);
        self
    }

    pub fn with_fn(mut self, name: &str, func: TaggedFunction) -> Self {
        self.funcs.insert(name.to_string(), func);
        self
    }
}

impl fmt::Display for CmpOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Eq => "=",
            CmpOp::Gt => ">",
            CmpOp::Ge => ">=",
        };
        f.write_str(s)
    }
}

impl fmt::Display for Quantifier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Quantifier::Forall => "forall",
            Quantifier::Exists => "exists",
        })
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Lit(r) => write!(f, "{r}"),
            Term::Var(name) => f.write_str(name),
            Term::Neg(t) => write!(f, "(-{t})"),
            Term::Add(a, b) => write!(f, "({a} + {b})"),
            Term::Sub(a, b) => write!(f, "({a} - {b})"),
            Term::Mul(a, b) => write!(f, "({a} * {b})"),
            Term::Div(a, b) => write!(f, "({a} / {b})"),
            Term::Pow(t, e) => write!(f, "({t} ^ {e})"),
            Term::App(name, arg) => write!(f, "{name}({arg})"),
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Cmp(op, a, b) => write!(f, "({a} {op} {b})"),
            Formula::Member(t, set) => write!(f, "({t} in {set})"),
            Formula::Not(x) => write!(f, "(!{x})"),
            Formula::And(a, b) => write!(f, "({a} & {b})"),
            Formula::Or(a, b) => write!(f, "({a} | {b})"),
            Formula::Implies(a, b) => write!(f, "({a} -> {b})"),
            Formula::Quant(q, var, set, body) => write!(f, "({q} {var} in {set} {body})"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(String),
    LParen,
    RParen,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    Lt,
    Le,
    Eq,
    Gt,
    Ge,
    Bang,
    Amp,
    Pipe,
    Arrow,
    Forall,
    Exists,
    In,
    End,
}

fn describe(kind: &Tok) -> String {
    match kind {
        Tok::Ident(s) => format!("identifier '{s}'"),
        Tok::Int(s) => format!("number '{s}'"),
        Tok::LParen => "'('".to_string(),
        Tok::RParen => "')'".to_string(),
        Tok::Plus => "'+'".to_string(),
        Tok::Minus => "'-'".to_string(),
        Tok::Star => "'*'".to_string(),
        Tok::Slash => "'/'".to_string(),
        Tok::Caret => "'^'".to_string(),
        Tok::Lt => "'<'".to_string(),
        Tok::Le => "'<='".to_string(),
        Tok::Eq => "'='".to_string(),
        Tok::Gt => "'>'".to_string(),
        Tok::Ge => "'>='".to_string(),
        Tok::Bang => "'!'".to_string(),
        Tok::Amp => "'&'".to_string(),
        Tok::Pipe => "'|'".to_string(),
        Tok::Arrow => "'->'".to_string(),
        Tok::Forall => "'forall'".to_string(),
        Tok::Exists => "'exists'".to_string(),
        Tok::In => "'in'".to_string(),
        Tok::End => "end of input".to_string(),
    }
}

#[derive(Clone, Debug)]
struct Token {
    kind: Tok,
    line: usize,
    col: usize,
}

fn err_at(token: &Token, message: String) -> Error {
    Error::Syntax {
        line: token.line,
        col: token.col,
        message,
    }
}

struct Lexer {
    chars: Vec<char>,
    pos: usize,
    line: usize,
    col: usize,
}

impl Lexer {
    fn new(text: &str) -> Self {
        Lexer {
            chars: text.chars().collect(),
            pos: 0,
            line: 1,
            col: 1,
        }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn bump(&mut self) -> char {
        let c = self.chars[self.pos];
        self.pos += 1;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        c
    }

    fn skip_trivia(&mut self) {
        loop {
            match self.peek() {
                Some(c) if c.is_whitespace() => {
                    self.bump();
                }
                Some('#') => {
                    while let Some(c) = self.peek() {
                        if c == '\n' {
                            break;
                        }
                        self.bump();
                    }
                }
                _ => break,
            }
        }
    }

    fn tokens(mut self) -> Result<Vec<Token>> {
        let mut out = Vec::new();
        loop {
            self.skip_trivia();
            let (line, col) = (self.line, self.col);
            let Some(c) = self.peek() else {
                out.push(Token {
                    kind: Tok::End,
                    line,
                    col,
                });
                return Ok(out);
            };
            let kind = match c {
                '(' => {
                    self.bump();
                    Tok::LParen
                }
                ')' => {
                    self.bump();
                    Tok::RParen
                }
                '+' => {
                    self.bump();
                    Tok::Plus
                }
                '*' => {
                    self.bump();
                    Tok::Star
                }
                '/' => {
                    self.bump();
                    Tok::Slash
                }
                '^' => {
                    self.bump();
                    Tok::Caret
                }
                '=' => {
                    self.bump();
                    Tok::Eq
                }
                '!' => {
                    self.bump();
                    Tok::Bang
                }
                '&' => {
                    self.bump();
                    Tok::Amp
                }
                '|' => {
                    self.bump();
                    Tok::Pipe
                }
                '-' => {
                    self.bump();
                    if self.peek() == Some('>') {
                        self.bump();
                        Tok::Arrow
                    } else {
                        Tok::Minus
                    }
                }
                '<' => {
                    self.bump();
                    if self.peek() == Some('=') {
                        self.bump();
                        Tok::Le
                    } else {
                        Tok::Lt
                    }
                }
                '>' => {
                    self.bump();
                    if self.peek() == Some('=') {
                        self.bump();
                        Tok::Ge
                    } else {
                        Tok::Gt
                    }
                }
                '0'..='9' => {
                    let mut digits = String::new();
                    while let Some(d) = self.peek() {
                        if d.is_ascii_digit() {
                            digits.push(self.bump());
                        } else {
                            break;
                        }
                    }
                    Tok::Int(digits)
                }
                c if c.is_ascii_alphabetic() || c == '_' => {
                    let mut name = String::new();
                    while let Some(d) = self.peek() {
                        if d.is_ascii_alphanumeric() || d == '_' {
                            name.push(self.bump());
                        } else {
                            break;
                        }
                    }
                    match name.as_str() {
                        "forall" => Tok::Forall,
                        "exists" => Tok::Exists,
                        "in" => Tok::In,
                        _ => Tok::Ident(name),
                    }
                }
                other => {
                    return Err(Error::Syntax {
                        line,
                        col,
                        message: format!("unexpected character '{other}'"),
                    })
                }
            };
            out.push(Token { kind, line, col });
        }
    }
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    bound: Vec<String>,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos]
    }

    fn bump(&mut self) -> Token {
        let token = self.tokens[self.pos].clone();
        if !matches!(token.kind, Tok::End) {
            self.pos += 1;
        }
        token
    }

    fn expect_ident(&mut self, what: &str) -> Result<String> {
        let token = self.bump();
        match &token.kind {
            Tok::Ident(name) => Ok(name.clone()),
            other => Err(err_at(
                &token,
                format!("expected {what}, found {}", describe(other)),
            )),
        }
    }

    fn expect_rparen(&mut self) -> Result<()> {
        let token = self.bump();
        if matches!(token.kind, Tok::RParen) {
            Ok(())
        } else {
            Err(err_at(
                &token,
                format!("expected ')', found {}", describe(&token.kind)),
            ))
        }
    }

    fn implication(&mut self) -> Result<Formula> {
        let lhs = self.disjunction()?;
        if matches!(self.peek().kind, Tok::Arrow) {
            self.bump();
            let rhs = self.implication()?;
            Ok(Formula::Implies(Box::new(lhs), Box::new(rhs)))
        } else {
            Ok(lhs)
        }
    }

    fn disjunction(&mut self) -> Result<Formula> {
        let mut formula = self.conjunction()?;
        while matches!(self.peek().kind, Tok::Pipe) {
            self.bump();
            let rhs = self.conjunction()?;
            formula = Formula::Or(Box::new(formula), Box::new(rhs));
        }
        Ok(formula)
    }

    fn conjunction(&mut self) -> Result<Formula> {
        let mut formula = self.prefix()?;
        while matches!(self.peek().kind, Tok::Amp) {
            self.bump();
            let rhs = self.prefix()?;
            formula = Formula::And(Box::new(formula), Box::new(rhs));
        }
        Ok(formula)
    }

    fn prefix(&mut self) -> Result<Formula> {
        match self.peek().kind {
            Tok::Bang => {
                self.bump();
                Ok(Formula::Not(Box::new(self.prefix()?)))
            }
            Tok::Forall | Tok::Exists => self.quantified(),
            _ => self.atom(),
        }
    }

    fn quantified(&mut self) -> Result<Formula> {
        let q = match self.bump().kind {
            Tok::Forall => Quantifier::Forall,
            _ => Quantifier::Exists,
        };
        let var_token = self.bump();
        let var = match &var_token.kind {
            Tok::Ident(name) => name.clone(),
            other => {
                return Err(err_at(
                    &var_token,
                    format!("expected a variable name, found {}", describe(other)),
                ))
            }
        };
        if self.bound.contains(&var) {
            return Err(err_at(
                &var_token,
                format!("variable {var} is already bound"),
            ));
        }
        let in_token = self.bump();
        if !matches!(in_token.kind, Tok::In) {
            return Err(err_at(
                &in_token,
                format!("expected 'in', found {}", describe(&in_token.kind)),
            ));
        }
        let set = self.expect_ident("a set name")?;
        self.bound.push(var.clone());
        let body = self.prefix();
        self.bound.pop();
        Ok(Formula::Quant(q, var, set, Box::new(body?)))
    }

    // An atom starting with '(' is ambiguous: "(x + 1) < y" opens a term
    // while "(x < y)" opens a formula. Try the comparison reading first
    // and fall back to a parenthesized formula on failure.
    fn atom(&mut self) -> Result<Formula> {
        let save = self.pos;
        match self.comparison() {
            Ok(formula) => Ok(formula),
            Err(cmp_err) => {
                self.pos = save;
                if matches!(self.peek().kind, Tok::LParen) {
                    self.bump();
                    let inner = self.implication()?;
                    self.expect_rparen()?;
                    Ok(inner)
                } else {
                    Err(cmp_err)
                }
            }
        }
    }

    fn comparison(&mut self) -> Result<Formula> {
        let lhs = self.term()?;
        let op_token = self.bump();
        let op = match &op_token.kind {
            Tok::Lt => CmpOp::Lt,
            Tok::Le => CmpOp::Le,
            Tok::Eq => CmpOp::Eq,
            Tok::Gt => CmpOp::Gt,
            Tok::Ge => CmpOp::Ge,
            Tok::In => {
                let set = self.expect_ident("a set name")?;
                return Ok(Formula::Member(lhs, set));
            }
            other => {
                return Err(err_at(
                    &op_token,
                    format!(
                        "expected a comparison operator or 'in', found {}",
                        describe(other)
                    ),
                ))
            }
        };
        let rhs = self.term()?;
        Ok(Formula::Cmp(op, lhs, rhs))
    }

    fn term(&mut self) -> Result<Term> {
        let mut term = self.muldiv()?;
        loop {
            match self.peek().kind {
                Tok::Plus => {
                    self.bump();
                    term = Term::Add(Box::new(term), Box::new(self.muldiv()?));
                }
                Tok::Minus => {
                    self.bump();
                    term = Term::Sub(Box::new(term), Box::new(self.muldiv()?));
                }
                _ => return Ok(term),
            }
        }
    }

    fn muldiv(&mut self) -> Result<Term> {
        let mut term = self.factor()?;
        loop {
            match self.peek().kind {
                Tok::Star => {
                    self.bump();
                    term = Term::Mul(Box::new(term), Box::new(self.factor()?));
                }
                Tok::Slash => {
                    self.bump();
                    term = Term::Div(Box::new(term), Box::new(self.factor()?));
                }
                _ => return Ok(term),
            }
        }
    }

    fn factor(&mut self) -> Result<Term> {
        if matches!(self.peek().kind, Tok::Minus) {
            self.bump();
            Ok(Term::Neg(Box::new(self.factor()?)))
        } else {
            self.postfix()
        }
    }

    fn postfix(&mut self) -> Result<Term> {
        let base = self.primary()?;
        if matches!(self.peek().kind, Tok::Caret) {
            self.bump();
            let exp = self.exponent()?;
            Ok(Term::Pow(Box::new(base), exp))
        } else {
            Ok(base)
        }
    }

    fn exponent(&mut self) -> Result<i64> {
        let negative = if matches!(self.peek().kind, Tok::Minus) {
            self.bump();
            true
        } else {
            false
        };
        let token = self.bump();
        match &token.kind {
            Tok::Int(digits) => {
                let magnitude: i64 = digits.parse().map_err(|_| {
                    err_at(
                        &token,
                        "exponent does not fit in a signed 64-bit integer".to_string(),
                    )
                })?;
                Ok(if negative { -magnitude } else { magnitude })
            }
            other => Err(err_at(
                &token,
                format!("expected an integer exponent, found {}", describe(other)),
            )),
        }
    }

    fn primary(&mut self) -> Result<Term> {
        let token = self.bump();
        match &token.kind {
            Tok::LParen => {
                let inner = self.term()?;
                self.expect_rparen()?;
                Ok(inner)
            }
            Tok::Int(digits) => {
                let value: Rational = digits
                    .parse()
                    .map_err(|_| err_at(&token, format!("invalid number '{digits}'")))?;
                Ok(Term::Lit(value))
            }
            Tok::Ident(name) => {
                if matches!(self.peek().kind, Tok::LParen) {
                    self.bump();
                    let arg = self.term()?;
                    self.expect_rparen()?;
                    Ok(Term::App(name.clone(), Box::new(arg)))
                } else {
                    Ok(Term::Var(name.clone()))
                }
            }
            other => Err(err_at(
                &token,
                format!("expected a term, found {}", describe(other)),
            )),
        }
    }
}

/// Parses formula text into an AST.
///
/// Grammar, loosest to tightest: implication (right-associative), then
/// disjunction, conjunction, and the prefix forms (negation and the
/// bounded quantifiers, whose bodies are the next prefix form). Atoms
/// are `term OP term` for `OP` one of `<`, `<=`, `=`, `>`, `>=`, or
/// `term in SetName`, or a parenthesized formula. Terms use the usual
/// left-associative `+ - * /`, unary minus, `^` with a literal integer
/// exponent, `f(term)` application, and parentheses. Quantifying a
/// variable that is already bound on the same path is a syntax error.
pub fn parse_formula(text: &str) -> Result<Formula> {
    let tokens = Lexer::new(text).tokens()?;
    let mut parser = Parser {
        tokens,
        pos: 0,
        bound: Vec::new(),
    };
    let formula = parser.implication()?;
    let trailing = parser.peek();
    if !matches!(trailing.kind, Tok::End) {
        return Err(err_at(
            trailing,
            format!(
                "unexpected {} after the formula",
                describe(&trailing.kind)
            ),
        ));
    }
    Ok(formula)
}

fn value_of(term: &Term, structure: &Structure, env: &[(String, Rational)]) -> Result<Rational> {
    match term {
        Term::Lit(r) => Ok(r.clone()),
        Term::Var(name) => env
            .iter()
            .rev()
            .find(|(n, _)| n == name)
            .map(|(_, v)| v.clone())
            .ok_or_else(|| Error::Eval(format!("unbound variable {name}"))),
        Term::Neg(t) => Ok(-&value_of(t, structure, env)?),
        Term::Add(a, b) => Ok(&value_of(a, structure, env)? + &value_of(b, structure, env)?),
        Term::Sub(a, b) => Ok(&value_of(a, structure, env)? - &value_of(b, structure, env)?),
        Term::Mul(a, b) => Ok(&value_of(a, structure, env)? * &value_of(b, structure, env)?),
        Term::Div(a, b) => {
            let num = value_of(a, structure, env)?;
            let den = value_of(b, structure, env)?;
            num.checked_div(&den)
                .map_err(|_| Error::Eval(format!("division by zero in {term}")))
        }
        Term::Pow(base, exp) => {
            let b = value_of(base, structure, env)?;
            b.pow(*exp)
                .map_err(|_| Error::Eval(format!("zero raised to a negative power in {term}")))
        }
        Term::App(name, arg) => {
            let func = structure
                .funcs
                .get(name)
                .ok_or_else(|| Error::Eval(format!("unknown function {name}")))?;
            let x = value_of(arg, structure, env)?;
            match func.value_at(&x) {
                Ok(v) => Ok(v.clone()),
                Err(_) => Err(Error::Eval(format!("{name} is not defined at {x}"))),
            }
        }
    }
}

fn holds(formula: &Formula, structure: &Structure, env: &mut Vec<(String, Rational)>) -> Result<bool> {
    match formula {
        Formula::Cmp(op, lhs, rhs) => {
            let a = value_of(lhs, structure, env)?;
            let b = value_of(rhs, structure, env)?;
            Ok(match op {
                CmpOp::Lt => a < b,
                CmpOp::Le => a <= b,
                CmpOp::Eq => a == b,
                CmpOp::Gt => a > b,
                CmpOp::Ge => a >= b,
            })
        }
        Formula::Member(term, set_name) => {
            let set = structure
                .sets
                .get(set_name)
                .ok_or_else(|| Error::Eval(format!("unknown set {set_name}")))?;
            let value = value_of(term, structure, env)?;
            Ok(set.contains(&value))
        }
        Formula::Not(inner) => Ok(!holds(inner, structure, env)?),
        Formula::And(a, b) => {
            if !holds(a, structure, env)? {
                return Ok(false);
            }
            holds(b, structure, env)
        }
        Formula::Or(a, b) => {
            if holds(a, structure, env)? {
                return Ok(true);
            }
            holds(b, structure, env)
        }
        Formula::Implies(a, b) => {
            if !holds(a, structure, env)? {
                return Ok(true);
            }
            holds(b, structure, env)
        }
        Formula::Quant(q, var, set_name, body) => {
            let set = structure
                .sets
                .get(set_name)
                .ok_or_else(|| Error::Eval(format!("unknown set {set_name}")))?;
            for element in set.iter() {
                env.push((var.clone(), element.clone()));
                let outcome = holds(body, structure, env);
                env.pop();
                let outcome = outcome?;
                match q {
                    Quantifier::Forall if !outcome => return Ok(false),
                    Quantifier::Exists if outcome => return Ok(true),
                    _ => {}
                }
            }
            Ok(matches!(q, Quantifier::Forall))
        }
    }
}

/// Evaluates a formula under the given variable bindings and structure.
///
/// Free variables are looked up in `bindings`; quantified variables
/// shadow them. Unbound variables, unknown set or function names,
/// division by zero, a negative power of zero, and function application
/// outside the tagged domain are all evaluation errors.
pub fn eval_formula(
    formula: &Formula,
    bindings: &[(String, Rational)],
    structure: &Structure,
) -> Result<bool> {
    let mut env = bindings.to_vec();
    holds(formula, structure, &mut env)
}

/// Evaluates a term to an exact rational under bindings and structure.
pub fn eval_term(
    term: &Term,
    bindings: &[(String, Rational)],
    structure: &Structure,
) -> Result<Rational> {
    value_of(term, structure, bindings)
}

fn parse_declaration<'a>(rest: &'a str, keyword: &str, line_no: usize) -> Result<(String, &'a str)> {
    let malformed = || {
        Error::Parse(format!(
            "line {line_no}: expected '{keyword} NAME = FILE'"
        ))
    };
    let (name, file) = rest.split_once('=').ok_or_else(malformed)?;
    let name = name.trim();
    let file = file.trim();
    let valid = !name.is_empty()
        && !file.is_empty()
        && name
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || c == '_')
        && name.chars().next().is_some_and(|c| !c.is_ascii_digit());
    if !valid {
        return Err(malformed());
    }
    Ok((name.to_string(), file))
}

/// Reads a formula file: optional `set NAME = FILE` and `fn NAME = FILE`
/// header lines (paths relative to the formula file), then one formula,
/// possibly spanning several lines. `#` comments are allowed throughout.
/// Syntax errors report line numbers of the file itself.
pub fn read_formula_file(path: &Path) -> Result<(Formula, Structure)> {
    let text = std::fs::read_to_string(path)?;
    let base = path.parent().unwrap_or_else(|| Path::new(""));
    let mut structure = Structure::new();
    let lines: Vec<&str> = text.lines().collect();
    let mut idx = 0;
    while idx < lines.len() {
        let stripped = lines[idx].split('#').next().unwrap_or("").trim();
        if stripped.is_empty() {
            idx += 1;
            continue;
        }
        if let Some(rest) = stripped.strip_prefix("set ") {
            let (name, file) = parse_declaration(rest, "set", idx + 1)?;
            let set = io::read_set(&base.join(file))?;
            if structure.sets.insert(name.clone(), set).is_some() {
                return Err(Error::Parse(format!("duplicate set declaration: {name}")));
            }
        } else if let Some(rest) = stripped.strip_prefix("fn ") {
            let (name, file) = parse_declaration(rest, "fn", idx + 1)?;
            let func = io::read_fn(&base.join(file))?;
            if structure.funcs.insert(name.clone(), func).is_some() {
                return Err(Error::Parse(format!(
                    "duplicate function declaration: {name}"
                )));
            }
        } else {
            break;
        }
        idx += 1;
    }
    if idx >= lines.len() {
        return Err(Error::Parse(format!(
            "no formula found in {}",
            path.display()
        )));
    }
    // Blank lines stand in for the consumed header so the lexer reports
    // positions in the file's own line numbering.
    let formula_text = format!("{}{}", "\n".repeat(idx), lines[idx..].join("\n"));
    let formula = parse_formula(&formula_text)?;
    Ok((formula, structure))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lit(n: i64) -> Term {
        Term::Lit(Rational::from(n))
    }

    fn var(name: &str) -> Term {
        Term::Var(name.to_string())
    }

    fn rat(text: &str) -> Rational {
        text.parse().unwrap()
    }

    fn straddle_formula_ast() -> Formula {
        let f_u = Term::App("f".to_string(), Box::new(var("u")));
        let antecedent = Formula::And(
            Box::new(Formula::Cmp(CmpOp::Lt, f_u.clone(), var("c"))),
            Box::new(Formula::Cmp(
                CmpOp::Lt,
                var("c"),
                Term::Mul(
                    Box::new(f_u),
                    Box::new(Term::Add(
                        Box::new(lit(1)),
                        Box::new(Term::Pow(Box::new(var("u")), -2)),
                    )),
                ),
            )),
        );
        let consequent = Formula::Or(
            Box::new(Formula::Cmp(
                CmpOp::Lt,
                Term::Pow(Box::new(var("u")), 7),
                var("x"),
            )),
            Box::new(Formula::Cmp(CmpOp::Gt, var("u"), var("x"))),
        );
        Formula::Quant(
            Quantifier::Forall,
            "u".to_string(),
            "D".to_string(),
            Box::new(Formula::Implies(Box::new(antecedent), Box::new(consequent))),
        )
    }

    const STRADDLE_TEXT: &str =
        "forall u in D ((f(u) < c & c < f(u)*(1 + u^-2)) -> (u^7 < x | u > x))";

    fn sample_structure() -> Structure {
        let d = DiscreteSet::new(vec![rat("2"), rat("5")]).unwrap();
        let f = TaggedFunction::from_pairs(vec![
            (rat("2"), rat("3/2")),
            (rat("5"), rat("17/10")),
        ])
        .unwrap();
        Structure::new().with_set("D", d).with_fn("f", f)
    }

    #[test]
    fn simple_comparison_parses_and_holds() {
        let formula = parse_formula("1/2 < 1").unwrap();
        let expected = Formula::Cmp(
            CmpOp::Lt,
            Term::Div(Box::new(lit(1)), Box::new(lit(2))),
            lit(1),
        );
        assert_eq!(formula, expected);
        assert!(eval_formula(&formula, &[], &Structure::new()).unwrap());
    }

    #[test]
    fn straddle_text_parses_to_the_hand_built_tree() {
        let formula = parse_formula(STRADDLE_TEXT).unwrap();
        assert_eq!(formula, straddle_formula_ast());
    }

    #[test]
    fn truncated_quantifier_is_a_syntax_error_at_end_of_input() {
        let err = parse_formula("forall u in").unwrap_err();
        match err {
            Error::Syntax { line, col, ref message } => {
                assert_eq!(line, 1);
                assert_eq!(col, 12);
                assert!(message.contains("end of input"), "message: {message}");
            }
            other => panic!("expected a syntax error, got {other:?}"),
        }
    }

    #[test]
    fn printing_and_reparsing_is_the_identity() {
        let corpus = [
            "1/2 < 1",
            STRADDLE_TEXT,
            "x in D",
            "!(x in D) & exists w in W (w >= 0)",
            "forall a in A (a = 0 -> (exists b in B (b * a < 1 | !(b <= 2))))",
            "-x + 3 * y < z ^ -2",
            "2 ^ 3 > 7 - -2",
            "f(x + 1) = 17/10 | x / (y - 1) <= 4",
        ];
        for text in corpus {
            let first = parse_formula(text).unwrap();
            let printed = first.to_string();
            let second = parse_formula(&printed)
                .unwrap_or_else(|e| panic!("failed to reparse {printed:?}: {e}"));
            assert_eq!(first, second, "round trip changed {text:?}");
        }
    }

    #[test]
    fn straddle_formula_agrees_with_the_direct_implementation() {
        let structure = sample_structure();
        let formula = parse_formula(STRADDLE_TEXT).unwrap();
        let bindings = vec![
            ("x".to_string(), rat("200")),
            ("c".to_string(), rat("8/5")),
        ];
        assert!(eval_formula(&formula, &bindings, &structure).unwrap());
        let direct = crate::integers::phi(
            &structure.sets["D"],
            &structure.funcs["f"],
            &rat("200"),
            &rat("8/5"),
        )
        .unwrap();
        assert!(direct);
    }

    #[test]
    fn bounded_exists_misses_an_absent_element() {
        let d = DiscreteSet::new(vec![rat("1"), rat("2")]).unwrap();
        let structure = Structure::new().with_set("D", d);
        let formula = parse_formula("exists d in D (d = 3)").unwrap();
        assert!(!eval_formula(&formula, &[], &structure).unwrap());
    }

    #[test]
    fn division_by_zero_is_an_error_naming_the_subterm() {
        let d = DiscreteSet::new(vec![rat("2")]).unwrap();
        let structure = Structure::new().with_set("D", d);
        let formula = parse_formula("forall d in D (1/(d - 2) > 0)").unwrap();
        let err = eval_formula(&formula, &[], &structure).unwrap_err();
        let shown = err.to_string();
        assert!(
            shown.contains("division by zero in (1 / (d - 2))"),
            "message: {shown}"
        );
    }

    #[test]
    fn rebinding_a_quantified_variable_is_rejected() {
        let err = parse_formula("forall u in D (exists u in E (u < 1))").unwrap_err();
        assert!(
            err.to_string().contains("variable u is already bound"),
            "got: {err}"
        );
        parse_formula("(forall u in D (u < 1)) & (exists u in D (u > 0))").unwrap();
    }

    #[test]
    fn evaluation_errors_name_the_missing_piece() {
        let structure = Structure::new();
        let unbound = parse_formula("x < 1").unwrap();
        let err = eval_formula(&unbound, &[], &structure).unwrap_err();
        assert!(err.to_string().contains("unbound variable x"));

        let no_set = parse_formula("forall d in D (d < 1)").unwrap();
        let err = eval_formula(&no_set, &[], &structure).unwrap_err();
        assert!(err.to_string().contains("unknown set D"));

        let no_fn = parse_formula("f(1) < 1").unwrap();
        let err = eval_formula(&no_fn, &[], &structure).unwrap_err();
        assert!(err.to_string().contains("unknown function f"));

        let d = DiscreteSet::new(vec![rat("2")]).unwrap();
        let f = TaggedFunction::from_pairs(vec![(rat("2"), rat("3/2"))]).unwrap();
        let structure = Structure::new().with_set("D", d).with_fn("f", f);
        let off_domain = parse_formula("f(7) < 2").unwrap();
        let err = eval_formula(&off_domain, &[], &structure).unwrap_err();
        assert!(err.to_string().contains("f is not defined at 7"));
    }

    #[test]
    fn integer_powers_evaluate_exactly() {
        let structure = Structure::new();
        let term = match parse_formula("2 ^ -1 = 1/2").unwrap() {
            Formula::Cmp(CmpOp::Eq, lhs, _) => lhs,
            other => panic!("unexpected shape: {other:?}"),
        };
        assert_eq!(eval_term(&term, &[], &structure).unwrap(), rat("1/2"));
        assert!(eval_formula(&parse_formula("2 ^ -1 = 1/2").unwrap(), &[], &structure).unwrap());

        let zero_pow = parse_formula("0 ^ -1 < 1").unwrap();
        let err = eval_formula(&zero_pow, &[], &structure).unwrap_err();
        assert!(err.to_string().contains("zero raised to a negative power"));

        let err = parse_formula("u ^ 99999999999999999999 < 1").unwrap_err();
        assert!(err.to_string().contains("does not fit"), "got: {err}");
    }

    #[test]
    fn implication_is_right_associative_and_looser_than_disjunction() {
        let formula = parse_formula("1 < 2 -> 2 < 3 -> 3 < 4").unwrap();
        let expected = Formula::Implies(
            Box::new(Formula::Cmp(CmpOp::Lt, lit(1), lit(2))),
            Box::new(Formula::Implies(
                Box::new(Formula::Cmp(CmpOp::Lt, lit(2), lit(3))),
                Box::new(Formula::Cmp(CmpOp::Lt, lit(3), lit(4))),
            )),
        );
        assert_eq!(formula, expected);

        let mixed = parse_formula("1 < 2 | 2 < 1 -> 3 < 4 & 4 < 3").unwrap();
        match mixed {
            Formula::Implies(lhs, rhs) => {
                assert!(matches!(*lhs, Formula::Or(_, _)));
                assert!(matches!(*rhs, Formula::And(_, _)));
            }
            other => panic!("expected an implication at the top, got {other:?}"),
        }
    }
}
