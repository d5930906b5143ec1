//! The `.sq` action-spec language and the expression grammar shared with
//! the JSON output.
//!
//! ```text
//! field Q                      # or: field Fp 7
//! vars x y w
//! unipotent z1                 # additive group variables, optional
//! torus t1                     # torus variables, optional
//! char z1 = t1^2               # character of z1, default 1
//! map x = x + y*z1
//! ```
//!
//! Expressions use integers, variables, `+ - * /`, `^` with integer
//! exponents (negative only on torus variables) and parentheses.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::action::{ActionSpec, Character, Skeleton};
use crate::error::Error;
use crate::field::{Field, FieldElem};
use crate::localize::{Denominator, Localized};
use crate::poly::{Poly, VarKind, VarTable};

/// Largest exponent accepted on a multi-term base.
const MAX_POLY_EXPONENT: i64 = 64;
/// Largest exponent accepted on a monomial base.
const MAX_MONO_EXPONENT: i64 = 100_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("unknown variable {0}")]
    UnknownVariable(String),
    #[error("negative exponent on non-Laurent {0}")]
    NegativeExponent(String),
    #[error("missing map line for {0}")]
    MissingMap(String),
    #[error("duplicate {0}")]
    Duplicate(String),
    #[error("modulus {0} is not prime")]
    NonPrimeModulus(String),
    #[error("{0}")]
    Value(String),
}

impl ParseError {
    fn new(line: usize, column: usize, kind: ParseErrorKind) -> Self {
        ParseError { line, column, kind }
    }

    fn shifted(mut self, line: usize, col_offset: usize) -> Self {
        if self.line <= 1 {
            self.column += col_offset;
        }
        self.line = line;
        self
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Op(char),
    End,
}

struct Lexer {
    toks: Vec<(Tok, usize)>,
    pos: usize,
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic()
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '\''
}

impl Lexer {
    fn new(text: &str) -> Result<Lexer, ParseError> {
        let chars: Vec<char> = text.chars().collect();
        let mut toks = Vec::new();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            let col = i + 1;
            if c.is_whitespace() {
                i += 1;
            } else if c.is_ascii_digit() {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let s: String = chars[start..i].iter().collect();
                toks.push((Tok::Int(s.parse().expect("digits")), col));
            } else if is_ident_start(c) {
                let start = i;
                while i < chars.len() && is_ident_char(chars[i]) {
                    i += 1;
                }
                toks.push((Tok::Ident(chars[start..i].iter().collect()), col));
            } else if "+-*/^()".contains(c) {
                toks.push((Tok::Op(c), col));
                i += 1;
            } else {
                return Err(ParseError::new(1, col, ParseErrorKind::Syntax(format!("unexpected character {c:?}"))));
            }
        }
        toks.push((Tok::End, chars.len() + 1));
        Ok(Lexer { toks, pos: 0 })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn col(&self) -> usize {
        self.toks[self.pos].1
    }

    fn next(&mut self) -> (Tok, usize) {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err(&self, msg: impl Into<String>) -> ParseError {
        ParseError::new(1, self.col(), ParseErrorKind::Syntax(msg.into()))
    }
}

/// A quotient of two polynomials, as produced by expression evaluation.
#[derive(Clone, Debug)]
pub struct Fraction {
    pub num: Poly,
    pub den: Poly,
}

impl Fraction {
    fn from_poly(p: Poly) -> Fraction {
        let den = Poly::one(p.table());
        Fraction { num: p, den }
    }

    fn add(&self, o: &Fraction) -> Fraction {
        if self.den == o.den {
            return Fraction { num: &self.num + &o.num, den: self.den.clone() };
        }
        Fraction { num: &(&self.num * &o.den) + &(&o.num * &self.den), den: &self.den * &o.den }
    }

    fn neg(&self) -> Fraction {
        Fraction { num: -&self.num, den: self.den.clone() }
    }

    fn mul(&self, o: &Fraction) -> Fraction {
        Fraction { num: &self.num * &o.num, den: &self.den * &o.den }.tidy()
    }

    fn div(&self, o: &Fraction) -> Option<Fraction> {
        if o.num.is_zero() {
            return None;
        }
        Some(Fraction { num: &self.num * &o.den, den: &self.den * &o.num }.tidy())
    }

    /// Folds a constant denominator into the numerator.
    fn tidy(self) -> Fraction {
        match self.den.constant_value().and_then(|c| c.inv()) {
            Some(inv) if !self.den.is_one() => {
                let one = Poly::one(self.den.table());
                Fraction { num: self.num.scale(&inv), den: one }
            }
            _ => self,
        }
    }

    /// The value as a polynomial, if the denominator is constant.
    pub fn as_poly(&self) -> Option<Poly> {
        let c = self.den.constant_value()?;
        Some(self.num.scale(&c.inv()?))
    }
}

struct ExprParser<'a> {
    lex: Lexer,
    table: &'a Arc<VarTable>,
    allow: &'a dyn Fn(VarKind) -> bool,
}

impl<'a> ExprParser<'a> {
    fn expr(&mut self) -> Result<Fraction, ParseError> {
        let mut acc = self.term()?;
        loop {
            match self.lex.peek() {
                Tok::Op('+') => {
                    self.lex.next();
                    acc = acc.add(&self.term()?);
                }
                Tok::Op('-') => {
                    self.lex.next();
                    acc = acc.add(&self.term()?.neg());
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Fraction, ParseError> {
        let mut acc = self.unary()?;
        loop {
            match self.lex.peek() {
                Tok::Op('*') => {
                    self.lex.next();
                    acc = acc.mul(&self.unary()?);
                }
                Tok::Op('/') => {
                    let col = self.lex.col();
                    self.lex.next();
                    let rhs = self.unary()?;
                    acc = acc.div(&rhs).ok_or_else(|| {
                        ParseError::new(1, col, ParseErrorKind::Value("division by zero".into()))
                    })?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<Fraction, ParseError> {
        if self.lex.peek() == &Tok::Op('-') {
            self.lex.next();
            return Ok(self.unary()?.neg());
        }
        self.power()
    }

    fn power(&mut self) -> Result<Fraction, ParseError> {
        let col = self.lex.col();
        let base = self.atom()?;
        if self.lex.peek() != &Tok::Op('^') {
            return Ok(base);
        }
        self.lex.next();
        let negative = if self.lex.peek() == &Tok::Op('-') {
            self.lex.next();
            true
        } else {
            false
        };
        let e = match self.lex.next() {
            (Tok::Int(n), _) => n,
            _ => return Err(self.lex.err("expected an integer exponent")),
        };
        let monomial = base.den.is_constant() && base.num.len() == 1;
        let limit = if monomial { MAX_MONO_EXPONENT } else { MAX_POLY_EXPONENT };
        let e: i64 = match i64::try_from(&e) {
            Ok(v) if v <= limit => v,
            _ => return Err(ParseError::new(1, col, ParseErrorKind::Syntax(format!("exponent {e} too large")))),
        };
        if !negative {
            let num = base.num.pow(e as u32);
            let den = base.den.pow(e as u32);
            return Ok(Fraction { num, den }.tidy());
        }
        match base.as_poly().filter(|p| p.is_unit_monomial()) {
            Some(p) => {
                let (m, c) = p.leading_term().unwrap();
                let inv = Poly::from_term(self.table, m.inverse(), c.inv().expect("nonzero"));
                Ok(Fraction::from_poly(inv.pow(e as u32)))
            }
            None => Err(ParseError::new(1, col, ParseErrorKind::NegativeExponent(format!("base {}", base.num)))),
        }
    }

    fn atom(&mut self) -> Result<Fraction, ParseError> {
        let (tok, col) = self.lex.next();
        match tok {
            Tok::Int(n) => Ok(Fraction::from_poly(Poly::constant(self.table, self.table.field().from_bigint(&n)))),
            Tok::Ident(name) => {
                let v = self
                    .table
                    .lookup(&name)
                    .filter(|&v| (self.allow)(self.table.kind(v)))
                    .ok_or_else(|| ParseError::new(1, col, ParseErrorKind::UnknownVariable(name.clone())))?;
                if self.lex.peek() == &Tok::Op('^') && !self.table.kind(v).is_laurent() {
                    let save = self.lex.pos;
                    self.lex.next();
                    if self.lex.peek() == &Tok::Op('-') {
                        return Err(ParseError::new(1, col, ParseErrorKind::NegativeExponent(name)));
                    }
                    self.lex.pos = save;
                }
                Ok(Fraction::from_poly(Poly::var(self.table, v)))
            }
            Tok::Op('(') => {
                let inner = self.expr()?;
                match self.lex.next() {
                    (Tok::Op(')'), _) => Ok(inner),
                    (_, c) => Err(ParseError::new(1, c, ParseErrorKind::Syntax("expected ')'".into()))),
                }
            }
            Tok::End => Err(ParseError::new(1, col, ParseErrorKind::Syntax("unexpected end of expression".into()))),
            other => Err(ParseError::new(1, col, ParseErrorKind::Syntax(format!("unexpected token {other:?}")))),
        }
    }
}

/// Evaluates an expression to a fraction; only variables whose kind
/// passes `allow` may occur.
pub fn parse_fraction(
    table: &Arc<VarTable>,
    text: &str,
    allow: &dyn Fn(VarKind) -> bool,
) -> Result<Fraction, ParseError> {
    let mut p = ExprParser { lex: Lexer::new(text)?, table, allow };
    let f = p.expr()?;
    if p.lex.peek() != &Tok::End {
        return Err(p.lex.err("trailing input"));
    }
    Ok(f)
}

fn user_kinds(k: VarKind) -> bool {
    matches!(k, VarKind::Base | VarKind::Additive | VarKind::Torus)
}

/// Parses a polynomial over base, additive and torus variables.
pub fn parse_poly(table: &Arc<VarTable>, text: &str) -> Result<Poly, ParseError> {
    parse_poly_with(table, text, &user_kinds)
}

pub fn parse_poly_with(table: &Arc<VarTable>, text: &str, allow: &dyn Fn(VarKind) -> bool) -> Result<Poly, ParseError> {
    let f = parse_fraction(table, text, allow)?;
    f.as_poly()
        .ok_or_else(|| ParseError::new(1, 1, ParseErrorKind::Value(format!("{text:?} is not a polynomial"))))
}

/// Parses an element of `R_den` written as `p / (lambda den^k)`.
pub fn parse_localized(den: &Denominator, text: &str) -> Result<Localized, ParseError> {
    let f = parse_fraction(den.table(), text, &|k| k == VarKind::Base)?;
    let bad = || ParseError::new(1, 1, ParseErrorKind::Value(format!("denominator of {text:?} is not a power of {den}")));
    let mut rest = f.den.clone();
    let mut k = 0u32;
    while !rest.is_constant() {
        rest = rest.exact_divide(den).map_err(|_| bad())?.ok_or_else(bad)?;
        k += 1;
        if den.is_constant() {
            return Err(bad());
        }
    }
    let lambda = rest.constant_value().and_then(|c| c.inv()).ok_or_else(bad)?;
    Ok(Localized::new(f.num.scale(&lambda), k, den))
}

/// Parses a character: a monomial with coefficient 1 in the torus
/// variables, or `1`.
pub fn parse_character(skeleton_table: &Arc<VarTable>, torus: &[crate::poly::VarId], text: &str) -> Result<Character, ParseError> {
    let p = parse_poly_with(skeleton_table, text, &|k| k == VarKind::Torus)?;
    let bad = || ParseError::new(1, 1, ParseErrorKind::Value(format!("{text:?} is not a character")));
    if p.len() != 1 {
        return Err(bad());
    }
    let (m, c) = p.leading_term().unwrap();
    if !c.is_one() {
        return Err(bad());
    }
    Ok(Character(torus.iter().map(|&t| m.exp(t)).collect()))
}

struct Line<'a> {
    number: usize,
    indent: usize,
    keyword: &'a str,
    rest: &'a str,
    rest_col: usize,
}

fn split_lines(text: &str) -> Vec<Line<'_>> {
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let content = raw.split('#').next().unwrap_or("");
        let trimmed = content.trim_start();
        if trimmed.trim().is_empty() {
            continue;
        }
        let indent = content.chars().count() - trimmed.chars().count();
        let kw_len = trimmed.find(char::is_whitespace).unwrap_or(trimmed.len());
        let keyword = &trimmed[..kw_len];
        let rest = &trimmed[kw_len..];
        let rest_col = indent + keyword.chars().count() + 1;
        out.push(Line { number: idx + 1, indent, keyword, rest: rest.trim_end(), rest_col });
    }
    out
}

fn names(line: &Line) -> Result<Vec<String>, ParseError> {
    let mut out: Vec<String> = Vec::new();
    let mut col = line.rest_col;
    for piece in line.rest.split(char::is_whitespace) {
        if !piece.is_empty() {
            let mut chars = piece.chars();
            let ok = chars.next().is_some_and(is_ident_start) && chars.all(is_ident_char);
            if !ok {
                return Err(ParseError::new(line.number, col, ParseErrorKind::Syntax(format!("invalid name {piece:?}"))));
            }
            if out.iter().any(|n| n == piece) {
                return Err(ParseError::new(line.number, col, ParseErrorKind::Duplicate(format!("variable {piece}"))));
            }
            out.push(piece.to_string());
        }
        col += piece.chars().count() + 1;
    }
    Ok(out)
}

/// `lhs = expr` on a char/map line: the left name and the expression text
/// with its column.
fn assignment<'a>(line: &Line<'a>) -> Result<(&'a str, usize, &'a str, usize), ParseError> {
    let Some(eq) = line.rest.find('=') else {
        return Err(ParseError::new(line.number, line.rest_col, ParseErrorKind::Syntax("expected '='".into())));
    };
    let lhs_raw = &line.rest[..eq];
    let lhs = lhs_raw.trim();
    let lhs_col = line.rest_col + lhs_raw.len() - lhs_raw.trim_start().len();
    if lhs.is_empty() || lhs.contains(char::is_whitespace) {
        return Err(ParseError::new(line.number, lhs_col, ParseErrorKind::Syntax("expected a single variable name".into())));
    }
    Ok((lhs, lhs_col, &line.rest[eq + 1..], line.rest_col + eq + 1))
}

fn parse_field(line: &Line) -> Result<Field, ParseError> {
    let parts: Vec<&str> = line.rest.split_whitespace().collect();
    let at = |kind| ParseError::new(line.number, line.rest_col, kind);
    match parts.as_slice() {
        ["Q"] => Ok(Field::Rationals),
        ["Fp", p] => {
            let p: u64 = p.parse().map_err(|_| at(ParseErrorKind::Syntax(format!("invalid modulus {p:?}"))))?;
            Field::prime(p).ok_or_else(|| at(ParseErrorKind::NonPrimeModulus(p.to_string())))
        }
        _ => Err(at(ParseErrorKind::Syntax("expected 'Q' or 'Fp <prime>'".into()))),
    }
}

/// Parses and validates an action spec.
pub fn parse_spec(text: &str) -> Result<ActionSpec, Error> {
    let lines = split_lines(text);
    let mut field: Option<Field> = None;
    let mut decl: HashMap<&str, (usize, Vec<String>)> = HashMap::new();
    for line in &lines {
        let dup = || ParseError::new(line.number, line.indent + 1, ParseErrorKind::Duplicate(format!("{} line", line.keyword)));
        match line.keyword {
            "field" => {
                if field.is_some() {
                    return Err(dup().into());
                }
                field = Some(parse_field(line)?);
            }
            "vars" | "unipotent" | "torus" => {
                if decl.contains_key(line.keyword) {
                    return Err(dup().into());
                }
                decl.insert(line.keyword, (line.number, names(line)?));
            }
            "char" | "map" => {}
            other => {
                return Err(ParseError::new(
                    line.number,
                    line.indent + 1,
                    ParseErrorKind::Syntax(format!("unknown keyword {other:?}")),
                )
                .into())
            }
        }
    }
    let field = field.ok_or_else(|| ParseError::new(1, 1, ParseErrorKind::Syntax("missing field line".into())))?;
    let get = |k: &str| decl.get(k).map(|(_, v)| v.clone()).unwrap_or_default();
    let base = get("vars");
    if base.is_empty() {
        return Err(ParseError::new(1, 1, ParseErrorKind::Syntax("missing or empty vars line".into())).into());
    }
    let (additive, torus) = (get("unipotent"), get("torus"));
    fn as_refs(v: &[String]) -> Vec<&str> {
        v.iter().map(String::as_str).collect()
    }
    let skeleton = Skeleton::new(field, &as_refs(&base), &as_refs(&additive), &as_refs(&torus)).map_err(|e| {
        let line = decl.values().map(|(n, _)| *n).max().unwrap_or(1);
        ParseError::new(line, 1, ParseErrorKind::Duplicate(e.to_string()))
    })?;
    let table = skeleton.table().clone();
    let mut images: Vec<Option<Poly>> = vec![None; base.len()];
    let mut chars: Vec<Option<Character>> = vec![None; additive.len()];
    for line in &lines {
        if line.keyword != "map" && line.keyword != "char" {
            continue;
        }
        let (lhs, lhs_col, rhs, rhs_col) = assignment(line)?;
        let at_rhs = |e: ParseError| e.shifted(line.number, rhs_col - 1);
        if line.keyword == "map" {
            let idx = base.iter().position(|b| b == lhs).ok_or_else(|| {
                ParseError::new(line.number, lhs_col, ParseErrorKind::UnknownVariable(lhs.to_string()))
            })?;
            if images[idx].is_some() {
                return Err(ParseError::new(line.number, lhs_col, ParseErrorKind::Duplicate(format!("map line for {lhs}"))).into());
            }
            images[idx] = Some(parse_poly(&table, rhs).map_err(at_rhs)?);
        } else {
            let idx = additive.iter().position(|z| z == lhs).ok_or_else(|| {
                ParseError::new(line.number, lhs_col, ParseErrorKind::UnknownVariable(lhs.to_string()))
            })?;
            if chars[idx].is_some() {
                return Err(ParseError::new(line.number, lhs_col, ParseErrorKind::Duplicate(format!("char line for {lhs}"))).into());
            }
            chars[idx] = Some(parse_character(&table, skeleton.torus(), rhs).map_err(at_rhs)?);
        }
    }
    let last_line = text.lines().count().max(1);
    let images = images
        .into_iter()
        .zip(&base)
        .map(|(img, name)| img.ok_or_else(|| ParseError::new(last_line, 1, ParseErrorKind::MissingMap(name.clone()))))
        .collect::<Result<Vec<_>, _>>()?;
    let m = torus.len();
    let chars = chars.into_iter().map(|c| c.unwrap_or_else(|| Character::trivial(m))).collect();
    Ok(skeleton.build(chars, images)?)
}

/// Canonical text of a spec; `parse_spec(print_spec(s))` reproduces `s`.
pub fn print_spec(spec: &ActionSpec) -> String {
    let table = spec.table();
    let names = |ids: &[crate::poly::VarId]| ids.iter().map(|&v| table.name(v)).collect::<Vec<_>>().join(" ");
    let mut out = format!("field {}\nvars {}\n", spec.field(), names(spec.base()));
    if spec.l() > 0 {
        out += &format!("unipotent {}\n", names(spec.additive()));
    }
    if spec.m() > 0 {
        out += &format!("torus {}\n", names(spec.torus()));
        for (&z, chi) in spec.additive().iter().zip(spec.chars()) {
            out += &format!("char {} = {}\n", table.name(z), chi.display(spec));
        }
    }
    for (&x, img) in spec.base().iter().zip(spec.images()) {
        out += &format!("map {} = {}\n", table.name(x), img);
    }
    out
}

fn content_factor(p: &Poly) -> FieldElem {
    let field = p.field();
    if field != Field::Rationals || p.is_zero() {
        return field.one();
    }
    let mut lcm_den = BigInt::one();
    let mut gcd_num = BigInt::zero();
    for (_, c) in p.terms() {
        let q = c.as_rational().expect("rational");
        lcm_den = lcm_den.lcm(q.denom());
        gcd_num = gcd_num.gcd(q.numer());
    }
    field.from_ratio(&lcm_den, &gcd_num.abs()).expect("nonzero content")
}

fn needs_parens_num(s: &str) -> bool {
    s.contains(" + ") || s.contains(" - ")
}

fn needs_parens_den(s: &str) -> bool {
    s.contains(' ') || s.contains('*') || s.contains('/')
}

/// Renders `p / c^k` with integral primitive numerator over `Q`, e.g.
/// `(-x^2 + 2*y*w)/(2*y)` or `1/x1`.
pub fn format_localized(a: &Localized) -> String {
    if a.exp() == 0 {
        return a.numerator().to_string();
    }
    let lambda = content_factor(a.numerator());
    let num = a.numerator().scale(&lambda).to_string();
    let den = a.den().pow(a.exp()).scale(&lambda).to_string();
    let num = if needs_parens_num(&num) { format!("({num})") } else { num };
    let den = if needs_parens_den(&den) { format!("({den})") } else { den };
    format!("{num}/{den}")
}

/// Renders a presentation as `K[x, y, w] / (w*y - 1, x)`.
pub struct PresentationDisplay<'a>(pub &'a crate::pipeline::Presentation);

impl fmt::Display for PresentationDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rels: Vec<String> = self.0.relations.iter().map(|r| r.to_string()).collect();
        write!(f, "K[{}] / ({})", self.0.vars.join(", "), rels.join(", "))
    }
}

/// Human-readable summary of a result and its checks.
pub fn text_summary(
    q: &crate::pipeline::QuotientPresentation,
    report: Option<&crate::verify::Report>,
    spot: Option<&crate::verify::SpotReport>,
) -> String {
    use crate::pipeline::StageKind;
    use std::fmt::Write;
    let spec = &q.spec;
    let table = spec.table();
    let mut out = String::new();
    let mut line = |k: &str, v: String| writeln!(out, "{k:<8} {v}").unwrap();
    line("field", spec.field().to_string());
    line("c", q.c.to_string());
    line("weight", q.weight.display(spec));
    line("b", format_localized(&q.b));
    for (i, b) in q.b_images.iter().enumerate() {
        line(&format!("b_{}", i + 1), format_localized(b));
    }
    for (i, u) in q.u.iter().enumerate() {
        line(&format!("u_{}", i + 1), format_localized(u));
    }
    for (j, s) in q.s.iter().enumerate() {
        line(&format!("s_{}", j + 1), format!("{}  (inverse {})", format_localized(&s.elem), format_localized(&s.inverse)));
    }
    let stages: Vec<String> = q
        .stages
        .iter()
        .map(|st| match st.kind {
            StageKind::Additive(i) => format!("{} additive, degree {}", table.name(spec.additive()[i]), st.degree),
            StageKind::Torus(j) => format!("{} torus, degree {}", table.name(spec.torus()[j]), st.degree),
        })
        .collect();
    line("stages", if stages.is_empty() { "none".into() } else { stages.join("; ") });
    let kernel: Vec<String> = q.kernel.iter().map(|p| p.to_string()).collect();
    line("kernel", format!("({})", kernel.join(", ")));
    line("ring", PresentationDisplay(&q.presentation).to_string());
    match report {
        Some(r) => {
            out.push_str("checks\n");
            for c in &r.checks {
                writeln!(out, "  {:<16} {}", c.name, if c.passed { "ok" } else { "FAILED" }).unwrap();
                for w in &c.witnesses {
                    writeln!(out, "      {w}").unwrap();
                }
            }
        }
        None => out.push_str("checks   skipped\n"),
    }
    if let Some(s) = spot {
        let verdict = if s.passed() { "ok" } else { "FAILED" };
        writeln!(out, "spot     {verdict}: {} of {} trials agreed, {} skipped, seed {}", s.agreed, s.trials, s.skipped, s.seed)
            .unwrap();
        for d in &s.disagreements {
            writeln!(out, "      {d}").unwrap();
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const WEITZENBOECK: &str = "field Q\nvars x y w\nunipotent z1\nmap x = x + y*z1\nmap y = y\nmap w = w + x*z1 + (1/2)*y*z1^2\n";

    #[test]
    fn parses_weitzenboeck() {
        let spec = parse_spec(WEITZENBOECK).unwrap();
        assert_eq!((spec.n(), spec.l(), spec.m()), (3, 1, 0));
        assert_eq!(spec.images()[2].to_string(), "1/2*y*z1^2 + x*z1 + w");
        let again = parse_spec(&print_spec(&spec)).unwrap();
        assert_eq!(print_spec(&again), print_spec(&spec));
        assert_eq!(again.images(), spec.images());
    }

    #[test]
    fn parses_char_p_example() {
        let spec = parse_spec("field Fp 2\nvars x y\nunipotent z1\nmap x = x + y*z1 + z1^2\nmap y = y\n").unwrap();
        assert_eq!(spec.field(), Field::Prime(2));
    }

    #[test]
    fn unknown_variable_position() {
        let err = parse_spec("field Q\nvars x\nunipotent z\nmap x = x + w\n").unwrap_err();
        let Error::Parse(e) = err else { panic!("{err:?}") };
        assert_eq!((e.line, e.column), (4, 13));
        assert_eq!(e.kind, ParseErrorKind::UnknownVariable("w".into()));
    }

    #[test]
    fn rejects_bad_inputs() {
        let cases = [
            ("field Fp 4\nvars x\nmap x = x\n", "not prime"),
            ("field Q\nvars x y\nmap x = x\n", "missing map"),
            ("field Q\nvars x\nmap x = x^-1\n", "negative exponent"),
            ("field Q\nvars x\nmap x = x +\n", "syntax"),
            ("field Q\nvars x x\nmap x = x\n", "duplicate"),
            ("field Q\nvars x\nmap x = x\nmap x = x\n", "duplicate"),
            ("field Q\nvars x\nmap x = 1/x\n", "not a polynomial"),
            ("vars x\nmap x = x\n", "missing field"),
            ("field Q\nvars x\nfoo\n", "unknown keyword"),
            ("field Q\nvars x\nmap x = x / 0\n", "division by zero"),
        ];
        for (text, needle) in cases {
            let err = parse_spec(text).unwrap_err().to_string();
            assert!(err.contains(needle), "{text:?}: {err}");
        }
    }

    #[test]
    fn characters_and_torus_exponents() {
        let spec = parse_spec(
            "field Q\nvars x y\nunipotent z1\ntorus t1 t2\nchar z1 = t1^2*t2^-1\nmap x = t1^2*t2^-1*x + z1\nmap y = t1*y\n",
        )
        .unwrap();
        assert_eq!(spec.chars()[0], Character(vec![2, -1]));
        assert_eq!(spec.chars()[0].display(&spec), "t1^2*t2^-1");
        let again = parse_spec(&print_spec(&spec)).unwrap();
        assert_eq!(again.chars(), spec.chars());
    }

    #[test]
    fn localized_format_round_trip() {
        let spec = parse_spec(WEITZENBOECK).unwrap();
        let c: Denominator = Arc::new(parse_poly(spec.table(), "y").unwrap());
        let a = Localized::new(parse_poly(spec.table(), "y*w - 1/2*x^2").unwrap(), 1, &c);
        let s = format_localized(&a);
        assert_eq!(s, "(-x^2 + 2*y*w)/(2*y)");
        assert_eq!(parse_localized(&c, &s).unwrap(), a);
        assert_eq!(parse_localized(&c, "(2*y*w - x^2)/(2*y)").unwrap(), a);
        let inv = Localized::den_inverse(&c);
        assert_eq!(format_localized(&inv), "1/y");
        assert!(parse_localized(&c, "1/x").is_err());
    }
}
