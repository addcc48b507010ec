//! The `.fol` foliation-definition language.
//!
//! ```text
//! document := "foliation" ident "{" chart decl* "}"
//! chart    := "chart" "dim" int "vars" ident+ ";"
//! decl     := "gen" ident "=" expr ";"
//!           | ("leaf" | "slice") ident "=" "{" (ident "=" rational ","?)+ "}" ";"
//! expr     := term (("+" | "-") term)*
//! term     := unary (("*" | "/") unary)*
//! unary    := "-" unary | power
//! power    := primary ("^" int)?
//! primary  := int | ident | "d" "(" ident ")" | "(" expr ")"
//! rational := "-"? int ("/" int)?
//! ```
//!
//! `#` and `//` start comments. Divisors must be nonzero rational
//! constants; `d(v)` is the coordinate field of `v`.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::exactalg::{Poly, PolyVector, Rational};
use crate::foliation::{Chart, CoordinateSubspace, Foliation};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostic {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.col, self.message)
    }
}

impl std::error::Error for Diagnostic {}

type PResult<T> = std::result::Result<T, Diagnostic>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    Int(BigInt),
    Var(String),
    /// Coordinate vector field `d(v)`.
    D(String),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, u32),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Value {
    Scalar(Poly),
    Field(PolyVector),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Generator {
    pub name: String,
    pub expr: Expr,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subspace {
    pub name: String,
    pub fixed: Vec<(String, Rational)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Document {
    pub name: String,
    pub vars: Vec<String>,
    pub generators: Vec<Generator>,
    pub leaves: Vec<Subspace>,
    pub slices: Vec<Subspace>,
}

impl Document {
    pub fn chart(&self) -> Chart {
        Chart::new(self.vars.iter().cloned()).expect("parser validates the chart")
    }

    pub fn foliation(&self) -> Foliation {
        let gens = self
            .generators
            .iter()
            .map(|g| match eval(&g.expr, &self.vars) {
                Value::Field(v) => v,
                Value::Scalar(_) => unreachable!("parser rejects scalar generators"),
            })
            .collect::<Vec<_>>();
        let names = self.generators.iter().map(|g| g.name.clone()).collect();
        Foliation::with_names(self.chart(), gens, names).expect("parser validates generators")
    }

    fn subspace(&self, list: &[Subspace], name: &str) -> Option<CoordinateSubspace> {
        list.iter()
            .find(|s| s.name == name)
            .map(|s| CoordinateSubspace::from_names(&self.chart(), &s.fixed).expect("parser validates subspaces"))
    }

    pub fn leaf(&self, name: &str) -> Option<CoordinateSubspace> {
        self.subspace(&self.leaves, name)
    }

    pub fn slice(&self, name: &str) -> Option<CoordinateSubspace> {
        self.subspace(&self.slices, name)
    }
}

/// Evaluates a type-checked expression.
pub fn eval(e: &Expr, vars: &[String]) -> Value {
    let d = vars.len();
    let idx = |v: &str| vars.iter().position(|n| n == v).expect("checked variable");
    match e {
        Expr::Int(n) => Value::Scalar(Poly::constant(d, Rational::from_integer(n.clone()))),
        Expr::Var(v) => Value::Scalar(Poly::var(d, idx(v))),
        Expr::D(v) => Value::Field(PolyVector::unit(d, d, idx(v))),
        Expr::Neg(a) => match eval(a, vars) {
            Value::Scalar(p) => Value::Scalar(-p),
            Value::Field(f) => Value::Field(f.scale(&-Rational::one())),
        },
        Expr::Add(a, b) | Expr::Sub(a, b) => {
            let sub = matches!(e, Expr::Sub(..));
            match (eval(a, vars), eval(b, vars)) {
                (Value::Scalar(p), Value::Scalar(q)) => Value::Scalar(if sub { p - q } else { p + q }),
                (Value::Field(f), Value::Field(g)) => Value::Field(if sub {
                    f.checked_sub(&g).expect("same chart")
                } else {
                    f.checked_add(&g).expect("same chart")
                }),
                _ => unreachable!("checked kinds"),
            }
        }
        Expr::Mul(a, b) => match (eval(a, vars), eval(b, vars)) {
            (Value::Scalar(p), Value::Scalar(q)) => Value::Scalar(p * q),
            (Value::Scalar(p), Value::Field(f)) | (Value::Field(f), Value::Scalar(p)) => {
                Value::Field(f.mul_poly(&p).expect("same chart"))
            }
            _ => unreachable!("checked kinds"),
        },
        Expr::Div(a, b) => {
            let c = match eval(b, vars) {
                Value::Scalar(q) => q.constant_term().recip(),
                Value::Field(_) => unreachable!("checked kinds"),
            };
            match eval(a, vars) {
                Value::Scalar(p) => Value::Scalar(p.scale(&c)),
                Value::Field(f) => Value::Field(f.scale(&c)),
            }
        }
        Expr::Pow(a, k) => match eval(a, vars) {
            Value::Scalar(p) => Value::Scalar(p.pow(*k)),
            Value::Field(_) => unreachable!("checked kinds"),
        },
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(BigInt),
    Decimal(String),
    Sym(char),
    Eof,
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(src: &str) -> PResult<Vec<Token>> {
    let mut out = Vec::new();
    let chars: Vec<char> = src.chars().collect();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    while i < chars.len() {
        let c = chars[i];
        let (l0, c0) = (line, col);
        let advance = |i: &mut usize, n: usize, line: &mut usize, col: &mut usize| {
            for _ in 0..n {
                if chars[*i] == '\n' {
                    *line += 1;
                    *col = 1;
                } else {
                    *col += 1;
                }
                *i += 1;
            }
        };
        if c.is_whitespace() {
            advance(&mut i, 1, &mut line, &mut col);
        } else if c == '#' || (c == '/' && chars.get(i + 1) == Some(&'/')) {
            while i < chars.len() && chars[i] != '\n' {
                advance(&mut i, 1, &mut line, &mut col);
            }
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                advance(&mut i, 1, &mut line, &mut col);
            }
            out.push(Token {
                tok: Tok::Ident(chars[start..i].iter().collect()),
                line: l0,
                col: c0,
            });
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                advance(&mut i, 1, &mut line, &mut col);
            }
            let mut decimal = false;
            if i < chars.len() && (chars[i] == '.' || chars[i] == 'e' || chars[i] == 'E') {
                decimal = true;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '.') {
                    advance(&mut i, 1, &mut line, &mut col);
                }
            }
            let text: String = chars[start..i].iter().collect();
            let tok = if decimal {
                Tok::Decimal(text)
            } else {
                Tok::Int(text.parse().expect("digits"))
            };
            out.push(Token { tok, line: l0, col: c0 });
        } else if "{}();=+-*/^,".contains(c) {
            advance(&mut i, 1, &mut line, &mut col);
            out.push(Token {
                tok: Tok::Sym(c),
                line: l0,
                col: c0,
            });
        } else {
            return Err(Diagnostic {
                line,
                col,
                message: format!("unexpected character `{c}`"),
            });
        }
    }
    out.push(Token { tok: Tok::Eof, line, col });
    Ok(out)
}

const KEYWORDS: [&str; 8] = ["foliation", "chart", "dim", "vars", "gen", "leaf", "slice", "d"];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Kind {
    /// Rational constant.
    Const,
    Scalar,
    Field,
}

struct Parser<'a> {
    toks: Vec<Token>,
    pos: usize,
    vars: &'a [String],
}

impl<'a> Parser<'a> {
    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn next(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err<T>(t: &Token, message: impl Into<String>) -> PResult<T> {
        Err(Diagnostic {
            line: t.line,
            col: t.col,
            message: message.into(),
        })
    }

    fn describe(t: &Tok) -> String {
        match t {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Int(n) => format!("`{n}`"),
            Tok::Decimal(s) => format!("`{s}`"),
            Tok::Sym(c) => format!("`{c}`"),
            Tok::Eof => "end of input".into(),
        }
    }

    fn expect_sym(&mut self, c: char) -> PResult<Token> {
        let t = self.next();
        if t.tok == Tok::Sym(c) {
            Ok(t)
        } else {
            Self::err(&t, format!("expected `{c}`, found {}", Self::describe(&t.tok)))
        }
    }

    fn expect_keyword(&mut self, kw: &str) -> PResult<Token> {
        let t = self.next();
        match &t.tok {
            Tok::Ident(s) if s == kw => Ok(t),
            other => Self::err(&t, format!("expected `{kw}`, found {}", Self::describe(other))),
        }
    }

    fn ident(&mut self, what: &str) -> PResult<(String, Token)> {
        let t = self.next();
        match &t.tok {
            Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => Ok((s.clone(), t)),
            other => Self::err(&t, format!("expected {what}, found {}", Self::describe(other))),
        }
    }

    fn int(&mut self) -> PResult<(BigInt, Token)> {
        let t = self.next();
        match &t.tok {
            Tok::Int(n) => Ok((n.clone(), t)),
            Tok::Decimal(s) => Self::err(&t, format!("non-rational literal `{s}`; write it as a fraction")),
            other => Self::err(&t, format!("expected an integer, found {}", Self::describe(other))),
        }
    }

    fn var(&mut self) -> PResult<String> {
        let (v, t) = self.ident("a variable")?;
        if !self.vars.contains(&v) {
            return Self::err(&t, format!("unknown variable `{v}`"));
        }
        Ok(v)
    }

    fn rational(&mut self) -> PResult<Rational> {
        let neg = if self.peek().tok == Tok::Sym('-') {
            self.next();
            true
        } else {
            false
        };
        let (n, _) = self.int()?;
        let mut r = Rational::from_integer(n);
        if self.peek().tok == Tok::Sym('/') {
            self.next();
            let (den, t) = self.int()?;
            if den.is_zero() {
                return Self::err(&t, "division by zero");
            }
            r /= Rational::from_integer(den);
        }
        Ok(if neg { -r } else { r })
    }

    fn expr(&mut self) -> PResult<(Expr, Kind)> {
        let (mut e, mut k) = self.term()?;
        loop {
            let t = self.peek().clone();
            let sub = match t.tok {
                Tok::Sym('+') => false,
                Tok::Sym('-') => true,
                _ => return Ok((e, k)),
            };
            self.next();
            let (r, rk) = self.term()?;
            let kind = match (k, rk) {
                (Kind::Field, Kind::Field) => Kind::Field,
                (Kind::Field, _) | (_, Kind::Field) => {
                    return Self::err(&t, "cannot add a vector field and a scalar")
                }
                (Kind::Const, Kind::Const) => Kind::Const,
                _ => Kind::Scalar,
            };
            e = if sub {
                Expr::Sub(Box::new(e), Box::new(r))
            } else {
                Expr::Add(Box::new(e), Box::new(r))
            };
            k = kind;
        }
    }

    fn term(&mut self) -> PResult<(Expr, Kind)> {
        let (mut e, mut k) = self.unary()?;
        loop {
            let t = self.peek().clone();
            let div = match t.tok {
                Tok::Sym('*') => false,
                Tok::Sym('/') => true,
                _ => return Ok((e, k)),
            };
            self.next();
            let (r, rk) = self.unary()?;
            if div {
                if rk != Kind::Const {
                    return Self::err(&t, "divisor must be a rational constant");
                }
                if let Value::Scalar(p) = eval(&r, self.vars) {
                    if p.is_zero() {
                        return Self::err(&t, "division by zero");
                    }
                }
                e = Expr::Div(Box::new(e), Box::new(r));
            } else {
                k = match (k, rk) {
                    (Kind::Field, Kind::Field) => {
                        return Self::err(&t, "cannot multiply two vector fields")
                    }
                    (Kind::Field, _) | (_, Kind::Field) => Kind::Field,
                    (Kind::Const, Kind::Const) => Kind::Const,
                    _ => Kind::Scalar,
                };
                e = Expr::Mul(Box::new(e), Box::new(r));
            }
        }
    }

    fn unary(&mut self) -> PResult<(Expr, Kind)> {
        if self.peek().tok == Tok::Sym('-') {
            self.next();
            let (e, k) = self.unary()?;
            return Ok((Expr::Neg(Box::new(e)), k));
        }
        self.power()
    }

    fn power(&mut self) -> PResult<(Expr, Kind)> {
        let (e, k) = self.primary()?;
        if self.peek().tok == Tok::Sym('^') {
            let t = self.next();
            if k == Kind::Field {
                return Self::err(&t, "cannot raise a vector field to a power");
            }
            let (n, nt) = self.int()?;
            let n: u32 = u32::try_from(&n).or_else(|_| Self::err(&nt, "exponent too large"))?;
            return Ok((Expr::Pow(Box::new(e), n), k));
        }
        Ok((e, k))
    }

    fn primary(&mut self) -> PResult<(Expr, Kind)> {
        let t = self.peek().clone();
        match &t.tok {
            Tok::Int(_) | Tok::Decimal(_) => {
                let (n, _) = self.int()?;
                Ok((Expr::Int(n), Kind::Const))
            }
            Tok::Sym('(') => {
                self.next();
                let e = self.expr()?;
                self.expect_sym(')')?;
                Ok(e)
            }
            Tok::Ident(s) if s == "d" => {
                self.next();
                self.expect_sym('(')?;
                let v = self.var()?;
                self.expect_sym(')')?;
                Ok((Expr::D(v), Kind::Field))
            }
            Tok::Ident(_) => Ok((Expr::Var(self.var()?), Kind::Scalar)),
            other => Self::err(&t, format!("expected an expression, found {}", Self::describe(other))),
        }
    }

    fn subspace_body(&mut self) -> PResult<Vec<(String, Rational)>> {
        self.expect_sym('{')?;
        let mut fixed: Vec<(String, Rational)> = Vec::new();
        loop {
            if self.peek().tok == Tok::Sym('}') && !fixed.is_empty() {
                self.next();
                return Ok(fixed);
            }
            let at = self.peek().clone();
            let v = self.var()?;
            if fixed.iter().any(|(w, _)| *w == v) {
                return Self::err(&at, format!("variable `{v}` fixed twice"));
            }
            self.expect_sym('=')?;
            let r = self.rational()?;
            fixed.push((v, r));
            if self.peek().tok == Tok::Sym(',') {
                self.next();
            }
        }
    }
}

/// Parses a complete document.
pub fn parse(src: &str) -> PResult<Document> {
    let toks = lex(src)?;
    let no_vars: Vec<String> = Vec::new();
    let mut p = Parser {
        toks,
        pos: 0,
        vars: &no_vars,
    };
    let head = p.expect_keyword("foliation")?;
    let (name, _) = p.ident("a foliation name")?;
    p.expect_sym('{')?;
    match &p.peek().tok {
        Tok::Ident(s) if s == "chart" => {}
        _ => return Parser::err(&head, "chart declaration required"),
    }
    p.next();
    p.expect_keyword("dim")?;
    let (dim, dim_tok) = p.int()?;
    p.expect_keyword("vars")?;
    let mut vars: Vec<String> = Vec::new();
    while let Tok::Ident(_) = p.peek().tok {
        let (v, t) = p.ident("a variable name")?;
        if vars.contains(&v) {
            return Parser::err(&t, format!("variable `{v}` declared twice"));
        }
        vars.push(v);
    }
    p.expect_sym(';')?;
    if vars.is_empty() || BigInt::from(vars.len()) != dim {
        return Parser::err(&dim_tok, format!("chart declares dim {dim} but lists {} variables", vars.len()));
    }

    let rest: Vec<Token> = p.toks[p.pos..].to_vec();
    let mut p = Parser {
        toks: rest,
        pos: 0,
        vars: &vars,
    };
    let mut doc = Document {
        name,
        vars: vars.clone(),
        generators: Vec::new(),
        leaves: Vec::new(),
        slices: Vec::new(),
    };
    loop {
        let t = p.next();
        match &t.tok {
            Tok::Sym('}') => break,
            Tok::Ident(s) if s == "gen" => {
                let (gname, gt) = p.ident("a generator name")?;
                if doc.generators.iter().any(|g| g.name == gname) {
                    return Parser::err(&gt, format!("generator `{gname}` declared twice"));
                }
                p.expect_sym('=')?;
                let at = p.peek().clone();
                let (expr, kind) = p.expr()?;
                if kind != Kind::Field {
                    return Parser::err(&at, "generator must be a vector field");
                }
                p.expect_sym(';')?;
                doc.generators.push(Generator { name: gname, expr });
            }
            Tok::Ident(s) if s == "leaf" || s == "slice" => {
                let is_leaf = s == "leaf";
                let (sname, st) = p.ident("a name")?;
                let list = if is_leaf { &doc.leaves } else { &doc.slices };
                if list.iter().any(|l| l.name == sname) {
                    return Parser::err(&st, format!("`{sname}` declared twice"));
                }
                p.expect_sym('=')?;
                let fixed = p.subspace_body()?;
                p.expect_sym(';')?;
                let sub = Subspace { name: sname, fixed };
                if is_leaf {
                    doc.leaves.push(sub);
                } else {
                    doc.slices.push(sub);
                }
            }
            other => {
                return Parser::err(
                    &t,
                    format!("expected `gen`, `leaf`, `slice` or `}}`, found {}", Parser::describe(other)),
                )
            }
        }
    }
    let t = p.next();
    if t.tok != Tok::Eof {
        return Parser::err(&t, "unexpected input after the document");
    }
    if doc.generators.is_empty() {
        return Parser::err(&head, "at least one generator required");
    }
    Ok(doc)
}

/// Parses a standalone expression over the given variables.
pub fn parse_expression(src: &str, vars: &[String]) -> PResult<Value> {
    let toks = lex(src)?;
    let mut p = Parser { toks, pos: 0, vars };
    let (e, _) = p.expr()?;
    let t = p.next();
    if t.tok != Tok::Eof {
        return Parser::err(&t, format!("unexpected {}", Parser::describe(&t.tok)));
    }
    Ok(eval(&e, vars))
}

/// Parses an exact rational such as `-3`, `1/2`.
pub fn parse_rational(src: &str) -> PResult<Rational> {
    let toks = lex(src)?;
    let mut p = Parser {
        toks,
        pos: 0,
        vars: &[],
    };
    let r = p.rational()?;
    let t = p.next();
    if t.tok != Tok::Eof {
        return Parser::err(&t, format!("unexpected {}", Parser::describe(&t.tok)));
    }
    Ok(r)
}

/// Parses a comma-separated list of rationals, e.g. `0,1/2`.
pub fn parse_point(src: &str) -> PResult<Vec<Rational>> {
    src.split(',').map(|s| parse_rational(s.trim())).collect()
}

fn prec(e: &Expr) -> u8 {
    match e {
        Expr::Add(..) | Expr::Sub(..) => 1,
        Expr::Mul(..) | Expr::Div(..) => 2,
        Expr::Neg(..) => 3,
        Expr::Int(n) if n.sign() == num_bigint::Sign::Minus => 3,
        Expr::Pow(..) => 4,
        Expr::Int(_) | Expr::Var(_) | Expr::D(_) => 5,
    }
}

fn write_expr(out: &mut String, e: &Expr, min: u8) {
    let paren = prec(e) < min;
    if paren {
        out.push('(');
    }
    match e {
        Expr::Int(n) => out.push_str(&n.to_string()),
        Expr::Var(v) => out.push_str(v),
        Expr::D(v) => {
            out.push_str("d(");
            out.push_str(v);
            out.push(')');
        }
        Expr::Neg(a) => {
            out.push('-');
            write_expr(out, a, 3);
        }
        Expr::Add(a, b) | Expr::Sub(a, b) => {
            write_expr(out, a, 1);
            out.push_str(if matches!(e, Expr::Add(..)) { " + " } else { " - " });
            write_expr(out, b, 2);
        }
        Expr::Mul(a, b) | Expr::Div(a, b) => {
            write_expr(out, a, 2);
            out.push_str(if matches!(e, Expr::Mul(..)) { "*" } else { "/" });
            write_expr(out, b, 3);
        }
        Expr::Pow(a, k) => {
            write_expr(out, a, 5);
            out.push('^');
            out.push_str(&k.to_string());
        }
    }
    if paren {
        out.push(')');
    }
}

pub fn print_expr(e: &Expr) -> String {
    let mut s = String::new();
    write_expr(&mut s, e, 0);
    s
}

/// Canonical source text for a document.
pub fn print(doc: &Document) -> String {
    let mut s = format!(
        "foliation {} {{\n  chart dim {} vars {};\n",
        doc.name,
        doc.vars.len(),
        doc.vars.join(" ")
    );
    for g in &doc.generators {
        s.push_str(&format!("  gen {} = {};\n", g.name, print_expr(&g.expr)));
    }
    for (kw, list) in [("leaf", &doc.leaves), ("slice", &doc.slices)] {
        for l in list {
            let body: Vec<String> = l.fixed.iter().map(|(v, r)| format!("{v} = {r}")).collect();
            s.push_str(&format!("  {kw} {} = {{ {} }};\n", l.name, body.join(", ")));
        }
    }
    s.push_str("}\n");
    s
}
