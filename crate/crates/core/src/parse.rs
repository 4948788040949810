//! Text format for polynomial systems and Hamiltonians.
//!
//! ```text
//! # comment
//! dim 2                 # optional
//! vars x, p             # optional; defaults to x1 .. xn
//! dx = p
//! dp = -x - x^3
//! ```
//!
//! A Hamiltonian file holds a single `H = <poly>` statement instead of the
//! equations. Statements end at a newline or `;`. A polynomial is a signed
//! sum of terms `coef * v^e * ...` where `coef` is an optional decimal or
//! integer fraction `p/q`, `*` is required between factors and `e` is a
//! positive integer.
//!
//! Without a `vars` line the variables are `x1 .. xn`, with `n` taken from
//! `dim`, else from the number of equations (systems) or the largest index
//! used (Hamiltonians).

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::error::{Error, ParseError, Result, SourceSpan};
use crate::hamiltonian::{PolyHamiltonian, PolySystem};
use crate::poly::{
    hamiltonian_from_polynomial, hamiltonian_to_polynomial, system_from_polynomials,
    system_to_polynomials, Polynomial,
};

/// Largest accepted input, in bytes.
pub const MAX_INPUT_BYTES: usize = 10 * 1024 * 1024;

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Number { value: f64, integer: Option<u64> },
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    Equals,
    Comma,
    End,
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    span: SourceSpan,
}

fn syntax(span: SourceSpan, message: impl Into<String>) -> ParseError {
    ParseError::Syntax {
        span,
        message: message.into(),
    }
}

fn lex(text: &str) -> Result<Vec<Token>, ParseError> {
    let mut out = Vec::new();
    for (lno, line) in text.lines().enumerate() {
        let line_no = lno + 1;
        let chars: Vec<char> = line.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            let start = i + 1;
            let single = |tok| Token {
                tok,
                span: SourceSpan::new(line_no, start, start + 1),
            };
            match c {
                '#' => break,
                c if c.is_whitespace() => {}
                '+' => out.push(single(Tok::Plus)),
                '-' => out.push(single(Tok::Minus)),
                '*' => out.push(single(Tok::Star)),
                '/' => out.push(single(Tok::Slash)),
                '^' => out.push(single(Tok::Caret)),
                '=' => out.push(single(Tok::Equals)),
                ',' => out.push(single(Tok::Comma)),
                ';' => out.push(single(Tok::End)),
                c if c.is_ascii_digit() || c == '.' => {
                    let mut j = i;
                    while j < chars.len() && (chars[j].is_ascii_digit() || chars[j] == '.') {
                        j += 1;
                    }
                    // optional exponent: e[+-]digits
                    if j < chars.len() && (chars[j] == 'e' || chars[j] == 'E') {
                        let mut k = j + 1;
                        if k < chars.len() && (chars[k] == '+' || chars[k] == '-') {
                            k += 1;
                        }
                        if k < chars.len() && chars[k].is_ascii_digit() {
                            while k < chars.len() && chars[k].is_ascii_digit() {
                                k += 1;
                            }
                            j = k;
                        }
                    }
                    let lit: String = chars[i..j].iter().collect();
                    let span = SourceSpan::new(line_no, start, j + 1);
                    let value: f64 = lit
                        .parse()
                        .map_err(|_| syntax(span, format!("bad number `{lit}`")))?;
                    if !value.is_finite() {
                        return Err(syntax(span, format!("number `{lit}` is out of range")));
                    }
                    let integer = if lit.bytes().all(|b| b.is_ascii_digit()) {
                        lit.parse().ok()
                    } else {
                        None
                    };
                    out.push(Token {
                        tok: Tok::Number { value, integer },
                        span,
                    });
                    i = j;
                    continue;
                }
                c if c.is_alphabetic() || c == '_' => {
                    let mut j = i;
                    while j < chars.len() && (chars[j].is_alphanumeric() || chars[j] == '_') {
                        j += 1;
                    }
                    out.push(Token {
                        tok: Tok::Ident(chars[i..j].iter().collect()),
                        span: SourceSpan::new(line_no, start, j + 1),
                    });
                    i = j;
                    continue;
                }
                other => {
                    return Err(syntax(
                        SourceSpan::new(line_no, start, start + 1),
                        format!("unexpected character `{other}`"),
                    ))
                }
            }
            i += 1;
        }
        out.push(Token {
            tok: Tok::End,
            span: SourceSpan::new(line_no, chars.len() + 1, chars.len() + 2),
        });
    }
    Ok(out)
}

/// A parsed term before variable resolution.
#[derive(Clone, Debug)]
struct Term {
    coefficient: f64,
    factors: Vec<(String, u32, SourceSpan)>,
    span: SourceSpan,
}

#[derive(Debug)]
enum Stmt {
    Dim(usize, SourceSpan),
    Vars(Vec<(String, SourceSpan)>),
    Assign {
        lhs: String,
        span: SourceSpan,
        rhs: Vec<Term>,
    },
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn at_eof(&self) -> bool {
        self.pos + 1 >= self.toks.len() && self.peek().tok == Tok::End
    }

    fn expect_end(&mut self) -> Result<(), ParseError> {
        let t = self.bump();
        if t.tok != Tok::End {
            return Err(syntax(
                t.span,
                format!("expected end of statement, found {:?}", t.tok),
            ));
        }
        Ok(())
    }

    fn statements(&mut self) -> Result<Vec<Stmt>, ParseError> {
        let mut out = Vec::new();
        loop {
            while self.peek().tok == Tok::End {
                if self.at_eof() {
                    return Ok(out);
                }
                self.bump();
            }
            out.push(self.statement()?);
        }
    }

    fn statement(&mut self) -> Result<Stmt, ParseError> {
        let head = self.bump();
        let Tok::Ident(name) = head.tok else {
            return Err(syntax(head.span, "expected `dim`, `vars` or an assignment"));
        };
        match name.as_str() {
            "dim" => {
                let t = self.bump();
                match t.tok {
                    Tok::Number {
                        integer: Some(n), ..
                    } if n > 0 => {
                        self.expect_end()?;
                        Ok(Stmt::Dim(n as usize, t.span))
                    }
                    _ => Err(syntax(t.span, "`dim` needs a positive integer")),
                }
            }
            "vars" => {
                let mut vars = Vec::new();
                loop {
                    let t = self.bump();
                    match t.tok {
                        Tok::Ident(v) if v != "dim" && v != "vars" => vars.push((v, t.span)),
                        Tok::End if !vars.is_empty() => break,
                        _ => return Err(syntax(t.span, "expected a variable name")),
                    }
                    if self.peek().tok == Tok::Comma {
                        self.bump();
                    }
                }
                Ok(Stmt::Vars(vars))
            }
            _ => {
                let eq = self.bump();
                if eq.tok != Tok::Equals {
                    return Err(syntax(eq.span, "expected `=`"));
                }
                let rhs = self.polynomial()?;
                self.expect_end()?;
                Ok(Stmt::Assign {
                    lhs: name,
                    span: head.span,
                    rhs,
                })
            }
        }
    }

    fn polynomial(&mut self) -> Result<Vec<Term>, ParseError> {
        let mut terms = Vec::new();
        let mut sign = 1.0;
        let mut first = true;
        loop {
            match self.peek().tok {
                Tok::Plus => {
                    self.bump();
                }
                Tok::Minus => {
                    self.bump();
                    sign = -1.0;
                }
                _ if first => {}
                _ => break,
            }
            let mut term = self.term()?;
            term.coefficient *= sign;
            terms.push(term);
            sign = 1.0;
            first = false;
        }
        Ok(terms)
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        let start = self.peek().span;
        let mut coefficient = 1.0;
        let mut factors = Vec::new();
        let mut end;
        if let Tok::Number { value, integer } = self.peek().tok {
            let t = self.bump();
            end = t.span;
            coefficient = value;
            if self.peek().tok == Tok::Slash {
                let slash = self.bump();
                let den = self.bump();
                match (integer, den.tok) {
                    (
                        Some(_),
                        Tok::Number {
                            integer: Some(q), ..
                        },
                    ) if q > 0 => {
                        coefficient /= q as f64;
                        end = den.span;
                    }
                    _ => {
                        return Err(syntax(
                            slash.span,
                            "fractions must be p/q with integers, q > 0",
                        ))
                    }
                }
            }
            if self.peek().tok != Tok::Star {
                return Ok(Term {
                    coefficient,
                    factors,
                    span: SourceSpan::new(start.line, start.col_start, end.col_end),
                });
            }
            self.bump();
        }
        loop {
            let t = self.bump();
            let Tok::Ident(name) = t.tok else {
                return Err(syntax(t.span, "expected a variable"));
            };
            let mut power = 1;
            end = t.span;
            if self.peek().tok == Tok::Caret {
                self.bump();
                let e = self.bump();
                match e.tok {
                    Tok::Number {
                        integer: Some(p), ..
                    } if p > 0 && p <= u32::MAX as u64 => power = p as u32,
                    _ => return Err(syntax(e.span, "exponents must be positive integers")),
                }
                end = e.span;
            }
            factors.push((name, power, t.span));
            if self.peek().tok != Tok::Star {
                break;
            }
            self.bump();
        }
        Ok(Term {
            coefficient,
            factors,
            span: SourceSpan::new(start.line, start.col_start, end.col_end),
        })
    }
}

struct Document {
    dim: Option<(usize, SourceSpan)>,
    vars: Option<Vec<(String, SourceSpan)>>,
    assigns: Vec<(String, SourceSpan, Vec<Term>)>,
}

fn parse_document(text: &str) -> Result<Document, ParseError> {
    if text.len() > MAX_INPUT_BYTES {
        return Err(ParseError::TooLarge {
            size: text.len(),
            max: MAX_INPUT_BYTES,
        });
    }
    let toks = lex(text)?;
    let toks = if toks.is_empty() {
        vec![Token {
            tok: Tok::End,
            span: SourceSpan::new(1, 1, 2),
        }]
    } else {
        toks
    };
    let stmts = Parser { toks, pos: 0 }.statements()?;
    let mut doc = Document {
        dim: None,
        vars: None,
        assigns: Vec::new(),
    };
    for s in stmts {
        match s {
            Stmt::Dim(n, span) => {
                if doc.dim.replace((n, span)).is_some() {
                    return Err(syntax(span, "`dim` declared twice"));
                }
            }
            Stmt::Vars(v) => {
                let span = v[0].1;
                for (i, (name, sp)) in v.iter().enumerate() {
                    if v[..i].iter().any(|(other, _)| other == name) {
                        return Err(syntax(*sp, format!("variable `{name}` declared twice")));
                    }
                }
                if doc.vars.replace(v).is_some() {
                    return Err(syntax(span, "`vars` declared twice"));
                }
            }
            Stmt::Assign { lhs, span, rhs } => doc.assigns.push((lhs, span, rhs)),
        }
    }
    Ok(doc)
}

/// Default variable names `x1 .. xn`.
pub fn default_var_names(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("x{i}")).collect()
}

fn default_index(name: &str) -> Option<usize> {
    let digits = name.strip_prefix('x')?;
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) || digits.starts_with('0') {
        return None;
    }
    digits.parse().ok()
}

fn resolve_names(doc: &Document, inferred: usize) -> Result<Vec<String>, ParseError> {
    match (&doc.vars, doc.dim) {
        (Some(v), Some((n, _))) if v.len() != n => Err(ParseError::DimMismatch(format!(
            "`dim {n}` but {} variables declared",
            v.len()
        ))),
        (Some(v), _) => Ok(v.iter().map(|(name, _)| name.clone()).collect()),
        (None, Some((n, _))) => Ok(default_var_names(n)),
        (None, None) => Ok(default_var_names(inferred)),
    }
}

fn term_exponents(term: &Term, names: &[String]) -> Result<Vec<u32>, ParseError> {
    let mut e = vec![0u32; names.len()];
    for (name, power, span) in &term.factors {
        let i =
            names
                .iter()
                .position(|n| n == name)
                .ok_or_else(|| ParseError::UnknownVariable {
                    span: *span,
                    name: name.clone(),
                })?;
        e[i] = e[i]
            .checked_add(*power)
            .ok_or_else(|| syntax(*span, "exponent overflow"))?;
    }
    Ok(e)
}

/// Parse a system file and return it with its variable names.
pub fn parse_system_with_vars(text: &str) -> Result<(PolySystem, Vec<String>)> {
    let doc = parse_document(text)?;
    if let Some((_, span, _)) = doc.assigns.iter().find(|(lhs, _, _)| lhs == "H") {
        if !doc
            .vars
            .as_ref()
            .is_some_and(|v| v.iter().any(|(n, _)| n == "H"))
        {
            return Err(syntax(*span, "a system file holds equations, not `H = ...`").into());
        }
    }
    let names = resolve_names(&doc, doc.assigns.len())?;
    let n = names.len();
    if n == 0 {
        return Err(ParseError::DimMismatch("no equations".into()).into());
    }
    let mut rhs: Vec<Option<Polynomial>> = vec![None; n];
    for (lhs, span, terms) in &doc.assigns {
        let var = lhs.strip_prefix('d').unwrap_or("");
        let i = names
            .iter()
            .position(|v| v == var)
            .ok_or_else(|| ParseError::UnknownVariable {
                span: *span,
                name: lhs.clone(),
            })?;
        if rhs[i].is_some() {
            return Err(
                ParseError::DimMismatch(format!("equation for `{var}` given twice")).into(),
            );
        }
        let mut p = Polynomial::zero(n);
        let constants: Vec<&Term> = terms
            .iter()
            .filter(|t| t.factors.is_empty() && t.coefficient != 0.0)
            .collect();
        if let Some(c) = constants.first() {
            return Err(if terms.iter().all(|t| t.factors.is_empty()) {
                ParseError::DegreeZeroRhs { span: c.span }
            } else {
                ParseError::ConstantTermNotAllowed { span: c.span }
            }
            .into());
        }
        for t in terms.iter().filter(|t| !t.factors.is_empty()) {
            p.add_term(term_exponents(t, &names)?, t.coefficient);
        }
        rhs[i] = Some(p);
    }
    let missing: Vec<&str> = rhs
        .iter()
        .zip(&names)
        .filter(|(p, _)| p.is_none())
        .map(|(_, name)| name.as_str())
        .collect();
    if !missing.is_empty() {
        return Err(
            ParseError::DimMismatch(format!("no equation for {}", missing.join(", "))).into(),
        );
    }
    let rhs: Vec<Polynomial> = rhs.into_iter().map(Option::unwrap).collect();
    Ok((system_from_polynomials(&rhs)?, names))
}

/// Parse a system file into canonical tensor form.
pub fn parse_system(text: &str) -> Result<PolySystem> {
    parse_system_with_vars(text).map(|(s, _)| s)
}

/// Parse a Hamiltonian file and return it with its variable names.
pub fn parse_hamiltonian_with_vars(text: &str) -> Result<(PolyHamiltonian, Vec<String>)> {
    let doc = parse_document(text)?;
    let mut ham = doc.assigns.iter().filter(|(lhs, _, _)| lhs == "H");
    let Some((_, _, terms)) = ham.next() else {
        let span = doc
            .assigns
            .first()
            .map(|a| a.1)
            .unwrap_or(SourceSpan::new(1, 1, 2));
        return Err(syntax(span, "expected `H = ...`").into());
    };
    if let Some((_, span, _)) = ham.next() {
        return Err(syntax(*span, "`H` defined twice").into());
    }
    if let Some((_, span, _)) = doc.assigns.iter().find(|(lhs, _, _)| lhs != "H") {
        return Err(syntax(*span, "a Hamiltonian file holds a single `H = ...`").into());
    }
    let inferred = if doc.vars.is_none() && doc.dim.is_none() {
        let mut max = 0;
        for t in terms {
            for (name, _, span) in &t.factors {
                let i = default_index(name).ok_or_else(|| ParseError::UnknownVariable {
                    span: *span,
                    name: name.clone(),
                })?;
                max = max.max(i);
            }
        }
        max
    } else {
        0
    };
    let names = resolve_names(&doc, inferred)?;
    let mut p = Polynomial::zero(names.len());
    for t in terms.iter().filter(|t| t.coefficient != 0.0) {
        let e = term_exponents(t, &names)?;
        let degree: u32 = e.iter().sum();
        if degree < 2 {
            return Err(ParseError::DegreeTooLow {
                span: t.span,
                degree,
            }
            .into());
        }
        p.add_term(e, t.coefficient);
    }
    if names.is_empty() {
        return Err(ParseError::DimMismatch("no variables".into()).into());
    }
    Ok((hamiltonian_from_polynomial(&p)?, names))
}

/// Parse a Hamiltonian file into supersymmetric tensor form.
pub fn parse_hamiltonian(text: &str) -> Result<PolyHamiltonian> {
    parse_hamiltonian_with_vars(text).map(|(h, _)| h)
}

/// Format a coefficient, preferring a short fraction `p/q` when one matches.
pub fn format_coefficient(v: f64) -> String {
    if v.fract() == 0.0 && v.abs() < 1e15 {
        return format!("{}", v as i64);
    }
    for q in 2..=64u32 {
        let scaled = v * q as f64;
        let p = scaled.round();
        if p.abs() < 1e12 && (scaled - p).abs() <= 1e-13 * scaled.abs().max(1.0) {
            return format!("{}/{q}", p as i64);
        }
    }
    format!("{v}")
}

fn format_polynomial(p: &Polynomial, names: &[String]) -> String {
    let mut terms: Vec<(&[u32], f64)> = p.terms().collect();
    // graded, then lexicographic on the exponent vector, both descending
    terms.sort_by(|(ea, _), (eb, _)| {
        let (da, db) = (ea.iter().sum::<u32>(), eb.iter().sum::<u32>());
        db.cmp(&da).then_with(|| eb.cmp(ea))
    });
    if terms.is_empty() {
        return "0".into();
    }
    let mut out = String::new();
    for (k, (e, c)) in terms.into_iter().enumerate() {
        let neg = c < 0.0;
        match (k, neg) {
            (0, true) => out.push('-'),
            (0, false) => {}
            (_, true) => out.push_str(" - "),
            (_, false) => out.push_str(" + "),
        }
        let mag = c.abs();
        let factors: Vec<String> = e
            .iter()
            .zip(names)
            .filter(|(&p, _)| p > 0)
            .map(|(&p, name)| {
                if p == 1 {
                    name.clone()
                } else {
                    format!("{name}^{p}")
                }
            })
            .collect();
        if mag != 1.0 || factors.is_empty() {
            out.push_str(&format_coefficient(mag));
            if !factors.is_empty() {
                out.push('*');
            }
        }
        out.push_str(&factors.join("*"));
    }
    out
}

fn header(out: &mut String, names: &[String]) {
    let _ = writeln!(out, "dim {}", names.len());
    let _ = writeln!(out, "vars {}", names.join(", "));
}

/// Render a system in the text format, one `d<var> = ...` line per
/// coordinate.
pub fn emit_system(sys: &PolySystem, names: &[String]) -> Result<String> {
    check_names(names, sys.dim())?;
    let mut out = String::new();
    header(&mut out, names);
    for (p, name) in system_to_polynomials(sys).iter().zip(names) {
        let _ = writeln!(out, "d{name} = {}", format_polynomial(p, names));
    }
    Ok(out)
}

/// Render a Hamiltonian in the text format.
pub fn emit_hamiltonian(h: &PolyHamiltonian, names: &[String]) -> Result<String> {
    check_names(names, h.dim())?;
    let mut out = String::new();
    header(&mut out, names);
    let _ = writeln!(
        out,
        "H = {}",
        format_polynomial(&hamiltonian_to_polynomial(h), names)
    );
    Ok(out)
}

/// The `<poly>` part of `H = <poly>` only.
pub fn hamiltonian_expression(h: &PolyHamiltonian, names: &[String]) -> Result<String> {
    check_names(names, h.dim())?;
    Ok(format_polynomial(&hamiltonian_to_polynomial(h), names))
}

fn check_names(names: &[String], dim: usize) -> Result<()> {
    if names.len() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: names.len(),
        });
    }
    Ok(())
}

/// Map from variable name to 1-based index; convenience for callers that
/// read points by name.
pub fn var_index(names: &[String]) -> BTreeMap<&str, usize> {
    names
        .iter()
        .enumerate()
        .map(|(i, n)| (n.as_str(), i + 1))
        .collect()
}
