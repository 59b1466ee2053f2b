//! Model and database text formats, plus CSV output.
//!
//! Model files are line oriented:
//!
//! ```text
//! // comment
//! #mode = damln
//! #aggregator = max
//! person = {Anna, Bob}
//! Friends(person, person)
//! Smokes(person)
//! 1.5  Smokes(x) => Cancer(x)
//! 1.1  Friends(x, y) => (Smokes(x) <=> Smokes(y))
//! ```
//!
//! Connectives, loosest first: `<=>`, `=>` (right associative), `v`/`|`,
//! `^`/`&`, `!`. Database files hold one literal per line, `Atom` or `!Atom`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::io::Write;

use thiserror::Error;

use crate::grounder::{Aggregator, Mode};
use crate::inference::MarginalTable;
use crate::logic::{
    free_variables, write_constant, Atom, Domain, Formula, GroundAtom, LogicError, PredicateSchema,
    Signature, Term, WeightedFormula,
};

#[derive(Debug, Clone, PartialEq, Error)]
#[error("line {line}, column {column}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseErrorKind {
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("unknown domain `{0}`")]
    UnknownDomain(String),
    #[error("unknown predicate `{0}`")]
    UnknownPredicate(String),
    #[error("predicate `{predicate}` expects {expected} argument(s), found {found}")]
    ArityMismatch {
        predicate: String,
        expected: usize,
        found: usize,
    },
    #[error("variable `{variable}` used as both `{first}` and `{second}`")]
    TypeConflict {
        variable: String,
        first: String,
        second: String,
    },
    #[error("predicate `{0}` declared twice")]
    DuplicatePredicate(String),
    #[error("domain `{0}` declared twice")]
    DuplicateDomain(String),
    #[error("constant `{0}` listed twice")]
    DuplicateConstant(String),
    #[error("{0} asserted both true and false")]
    DuplicateLiteral(String),
    #[error("weight must be finite, got `{0}`")]
    InvalidWeight(String),
    #[error("constant `{constant}` is not in domain `{domain}`")]
    UnknownConstant { constant: String, domain: String },
    #[error("{0}")]
    Logic(String),
}

impl From<LogicError> for ParseErrorKind {
    fn from(e: LogicError) -> Self {
        match e {
            LogicError::UnknownDomain(d) => ParseErrorKind::UnknownDomain(d),
            LogicError::UnknownPredicate(p) => ParseErrorKind::UnknownPredicate(p),
            LogicError::ArityMismatch {
                predicate,
                expected,
                found,
            } => ParseErrorKind::ArityMismatch {
                predicate,
                expected,
                found,
            },
            LogicError::TypeConflict {
                variable,
                first,
                second,
            } => ParseErrorKind::TypeConflict {
                variable,
                first,
                second,
            },
            LogicError::DuplicatePredicate(p) => ParseErrorKind::DuplicatePredicate(p),
            LogicError::DuplicateDomain(d) => ParseErrorKind::DuplicateDomain(d),
            LogicError::DuplicateConstant { constant, .. } => {
                ParseErrorKind::DuplicateConstant(constant)
            }
            other => ParseErrorKind::Logic(other.to_string()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Settings {
    pub mode: Mode,
    pub aggregator: Aggregator,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Model {
    pub signature: Signature,
    pub formulas: Vec<WeightedFormula>,
    pub settings: Settings,
}

impl Model {
    pub fn weights(&self) -> Vec<f64> {
        self.formulas.iter().map(|f| f.weight).collect()
    }

    pub fn with_weights(&self, weights: &[f64]) -> Model {
        assert_eq!(weights.len(), self.formulas.len());
        let mut m = self.clone();
        for (f, &w) in m.formulas.iter_mut().zip(weights) {
            f.weight = w;
        }
        m
    }

    pub fn with_settings(&self, settings: Settings) -> Model {
        let mut m = self.clone();
        m.settings = settings;
        m
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "#mode = {}", self.settings.mode)?;
        writeln!(f, "#aggregator = {}", self.settings.aggregator)?;
        for d in self.signature.domains() {
            write!(f, "{} = {{", d.name)?;
            for (i, c) in d.constants.iter().enumerate() {
                if i > 0 {
                    f.write_str(", ")?;
                }
                write_constant(f, c)?;
            }
            writeln!(f, "}}")?;
        }
        for p in self.signature.predicates() {
            f.write_str(&p.name)?;
            if !p.arg_types.is_empty() {
                write!(f, "({})", p.arg_types.join(", "))?;
            }
            writeln!(f)?;
        }
        for wf in &self.formulas {
            writeln!(f, "{} {}", wf.weight, wf.formula)?;
        }
        Ok(())
    }
}

/// Observed literals. Atoms of `closed_world` predicates that are not listed
/// are false.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Database {
    pub literals: BTreeMap<GroundAtom, bool>,
    pub closed_world: BTreeSet<String>,
    /// Constants this database introduced, per domain, in order of appearance.
    pub added_constants: BTreeMap<String, Vec<String>>,
}

impl Database {
    pub fn insert(&mut self, atom: GroundAtom, value: bool) -> Result<(), ParseErrorKind> {
        match self.literals.get(&atom) {
            Some(&old) if old != value => Err(ParseErrorKind::DuplicateLiteral(atom.to_string())),
            _ => {
                self.literals.insert(atom, value);
                Ok(())
            }
        }
    }

    pub fn len(&self) -> usize {
        self.literals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.literals.is_empty()
    }

    /// The model's signature extended with this database's constants.
    pub fn signature(&self, model: &Model) -> Result<Signature, LogicError> {
        let mut sig = model.signature.clone();
        for (domain, constants) in &self.added_constants {
            for c in constants {
                sig.add_constant(domain, c)?;
            }
        }
        Ok(sig)
    }
}

impl fmt::Display for Database {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (atom, &value) in &self.literals {
            if !value {
                f.write_str("!")?;
            }
            writeln!(f, "{atom}")?;
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Lexer

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Quoted(String),
    Number(String),
    LParen,
    RParen,
    LBrace,
    RBrace,
    Comma,
    Eq,
    Not,
    And,
    Or,
    Implies,
    Iff,
    Hash,
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    col: usize,
}

fn lex(line: &str, line_no: usize) -> Result<Vec<Spanned>, ParseError> {
    let chars: Vec<char> = line.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    let err = |col: usize, msg: String| ParseError {
        line: line_no,
        column: col,
        kind: ParseErrorKind::Syntax(msg),
    };
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if c == '/' && chars.get(i + 1) == Some(&'/') {
            break;
        }
        let simple = match c {
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            '{' => Some(Tok::LBrace),
            '}' => Some(Tok::RBrace),
            ',' => Some(Tok::Comma),
            '!' => Some(Tok::Not),
            '^' | '&' => Some(Tok::And),
            '|' => Some(Tok::Or),
            '#' => Some(Tok::Hash),
            _ => None,
        };
        if let Some(tok) = simple {
            out.push(Spanned { tok, col });
            i += 1;
            continue;
        }
        if c == '=' {
            if chars.get(i + 1) == Some(&'>') {
                out.push(Spanned {
                    tok: Tok::Implies,
                    col,
                });
                i += 2;
            } else {
                out.push(Spanned { tok: Tok::Eq, col });
                i += 1;
            }
            continue;
        }
        if c == '<' {
            if chars.get(i + 1) == Some(&'=') && chars.get(i + 2) == Some(&'>') {
                out.push(Spanned { tok: Tok::Iff, col });
                i += 3;
                continue;
            }
            return Err(err(col, "expected `<=>`".into()));
        }
        if c == '"' {
            let mut s = String::new();
            i += 1;
            loop {
                match chars.get(i) {
                    None => return Err(err(col, "unterminated string".into())),
                    Some('"') => {
                        i += 1;
                        break;
                    }
                    Some('\\') => {
                        match chars.get(i + 1) {
                            Some('n') => s.push('\n'),
                            Some(&e @ ('"' | '\\')) => s.push(e),
                            _ => return Err(err(i + 1, "bad escape".into())),
                        }
                        i += 2;
                    }
                    Some(&ch) => {
                        s.push(ch);
                        i += 1;
                    }
                }
            }
            if s.is_empty() {
                return Err(err(col, "empty constant".into()));
            }
            out.push(Spanned {
                tok: Tok::Quoted(s),
                col,
            });
            continue;
        }
        let starts_number = c.is_ascii_digit()
            || (c == '.' && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit()))
            || ((c == '-' || c == '+')
                && chars
                    .get(i + 1)
                    .is_some_and(|d| d.is_ascii_digit() || *d == '.'));
        if starts_number {
            let start = i;
            i += 1;
            while i < chars.len() {
                let ch = chars[i];
                let prev = chars[i - 1];
                if ch.is_ascii_alphanumeric()
                    || ch == '.'
                    || ch == '_'
                    || ((ch == '-' || ch == '+') && (prev == 'e' || prev == 'E'))
                {
                    i += 1;
                } else {
                    break;
                }
            }
            out.push(Spanned {
                tok: Tok::Number(chars[start..i].iter().collect()),
                col,
            });
            continue;
        }
        if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push(Spanned {
                tok: Tok::Ident(chars[start..i].iter().collect()),
                col,
            });
            continue;
        }
        return Err(err(col, format!("unexpected character `{c}`")));
    }
    Ok(out)
}

struct Cursor<'a> {
    toks: &'a [Spanned],
    pos: usize,
    line: usize,
    end_col: usize,
}

impl<'a> Cursor<'a> {
    fn new(toks: &'a [Spanned], line: usize, text: &str) -> Self {
        Cursor {
            toks,
            pos: 0,
            line,
            end_col: text.chars().count() + 1,
        }
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|s| &s.tok)
    }

    fn peek_at(&self, k: usize) -> Option<&Tok> {
        self.toks.get(self.pos + k).map(|s| &s.tok)
    }

    fn col(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end_col, |s| s.col)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|s| s.tok.clone());
        self.pos += 1;
        t
    }

    fn error(&self, kind: ParseErrorKind) -> ParseError {
        ParseError {
            line: self.line,
            column: self.col(),
            kind,
        }
    }

    fn syntax(&self, msg: impl Into<String>) -> ParseError {
        self.error(ParseErrorKind::Syntax(msg.into()))
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), ParseError> {
        if self.peek() == Some(&tok) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.syntax(format!("expected {what}")))
        }
    }

    fn at_end(&self) -> bool {
        self.pos >= self.toks.len()
    }

    fn finish(&self) -> Result<(), ParseError> {
        if self.at_end() {
            Ok(())
        } else {
            Err(self.syntax("unexpected trailing input"))
        }
    }
}

// formula grammar
fn parse_iff(c: &mut Cursor, depth: usize) -> Result<Formula, ParseError> {
    let mut lhs = parse_implies(c, depth)?;
    while c.peek() == Some(&Tok::Iff) {
        c.next();
        let rhs = parse_implies(c, depth)?;
        lhs = Formula::iff(lhs, rhs);
    }
    Ok(lhs)
}

fn parse_implies(c: &mut Cursor, depth: usize) -> Result<Formula, ParseError> {
    let lhs = parse_or(c, depth)?;
    if c.peek() == Some(&Tok::Implies) {
        c.next();
        let rhs = parse_implies(c, depth + 1)?;
        return Ok(Formula::implies(lhs, rhs));
    }
    Ok(lhs)
}

fn is_or(t: Option<&Tok>) -> bool {
    matches!(t, Some(Tok::Or)) || matches!(t, Some(Tok::Ident(s)) if s == "v")
}

fn parse_or(c: &mut Cursor, depth: usize) -> Result<Formula, ParseError> {
    let mut lhs = parse_and(c, depth)?;
    while is_or(c.peek()) {
        c.next();
        let rhs = parse_and(c, depth)?;
        lhs = Formula::or(lhs, rhs);
    }
    Ok(lhs)
}

fn parse_and(c: &mut Cursor, depth: usize) -> Result<Formula, ParseError> {
    let mut lhs = parse_unary(c, depth)?;
    while c.peek() == Some(&Tok::And) {
        c.next();
        let rhs = parse_unary(c, depth)?;
        lhs = Formula::and(lhs, rhs);
    }
    Ok(lhs)
}

const MAX_NESTING: usize = 48;

fn parse_unary(c: &mut Cursor, depth: usize) -> Result<Formula, ParseError> {
    if depth > MAX_NESTING {
        return Err(c.syntax("formula nested too deeply"));
    }
    match c.peek() {
        Some(Tok::Not) => {
            c.next();
            Ok(Formula::not(parse_unary(c, depth + 1)?))
        }
        Some(Tok::LParen) => {
            c.next();
            let f = parse_iff(c, depth + 1)?;
            c.expect(Tok::RParen, "`)`")?;
            Ok(f)
        }
        Some(Tok::Ident(_)) => Ok(Formula::Atom(parse_atom(c)?)),
        _ => Err(c.syntax("expected an atom, `!` or `(`")),
    }
}

fn parse_atom(c: &mut Cursor) -> Result<Atom, ParseError> {
    let name = match c.next() {
        Some(Tok::Ident(s)) => s,
        _ => {
            c.pos -= 1;
            return Err(c.syntax("expected a predicate name"));
        }
    };
    let mut args = Vec::new();
    if c.peek() == Some(&Tok::LParen) {
        c.next();
        if c.peek() == Some(&Tok::RParen) {
            c.next();
        } else {
            loop {
                let term = match c.next() {
                    Some(Tok::Ident(s)) => Term::from_ident(&s),
                    Some(Tok::Quoted(s)) | Some(Tok::Number(s)) => Term::Const(s),
                    _ => {
                        c.pos -= 1;
                        return Err(c.syntax("expected a variable or constant"));
                    }
                };
                args.push(term);
                match c.next() {
                    Some(Tok::Comma) => continue,
                    Some(Tok::RParen) => break,
                    _ => {
                        c.pos -= 1;
                        return Err(c.syntax("expected `,` or `)`"));
                    }
                }
            }
        }
    }
    Ok(Atom::new(name, args))
}

fn parse_weight(text: &str) -> Option<f64> {
    let v: f64 = text.parse().ok()?;
    v.is_finite().then_some(v)
}

/// Parses and validates a model file.
pub fn parse_model(text: &str) -> Result<Model, ParseError> {
    let mut sig = Signature::new();
    let mut settings = Settings::default();
    let mut formulas = Vec::new();
    let mut pending_formulas: Vec<(usize, usize, Formula, f64)> = Vec::new();

    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let toks = lex(line, line_no)?;
        if toks.is_empty() {
            continue;
        }
        let mut c = Cursor::new(&toks, line_no, line);
        let at = |col: usize, kind: ParseErrorKind| ParseError {
            line: line_no,
            column: col,
            kind,
        };
        match (c.peek(), c.peek_at(1)) {
            (Some(Tok::Hash), _) => {
                c.next();
                let key = match c.next() {
                    Some(Tok::Ident(k)) => k,
                    _ => return Err(c.syntax("expected a setting name after `#`")),
                };
                c.expect(Tok::Eq, "`=`")?;
                let value_col = c.col();
                let value = match c.next() {
                    Some(Tok::Ident(v)) => v,
                    _ => {
                        return Err(at(
                            value_col,
                            ParseErrorKind::Syntax("expected a setting value".into()),
                        ))
                    }
                };
                c.finish()?;
                match key.as_str() {
                    "mode" => {
                        settings.mode = value
                            .parse()
                            .map_err(|e: String| at(value_col, ParseErrorKind::Syntax(e)))?
                    }
                    "aggregator" => {
                        settings.aggregator = value
                            .parse()
                            .map_err(|e: String| at(value_col, ParseErrorKind::Syntax(e)))?
                    }
                    _ => {
                        return Err(at(
                            2,
                            ParseErrorKind::Syntax(format!("unknown setting `{key}`")),
                        ))
                    }
                }
            }
            (Some(Tok::Number(w)), _) => {
                let col = c.col();
                let w = w.clone();
                let weight = parse_weight(&w).ok_or_else(|| {
                    at(
                        col,
                        if w.parse::<f64>().is_ok() {
                            ParseErrorKind::InvalidWeight(w.clone())
                        } else {
                            ParseErrorKind::Syntax(format!("malformed weight `{w}`"))
                        },
                    )
                })?;
                c.next();
                let fcol = c.col();
                let f = parse_iff(&mut c, 0)?;
                c.finish()?;
                pending_formulas.push((line_no, fcol, f, weight));
            }
            (Some(Tok::Ident(name)), Some(Tok::Eq)) => {
                let name = name.clone();
                c.next();
                c.next();
                c.expect(Tok::LBrace, "`{`")?;
                let mut constants = Vec::new();
                if c.peek() == Some(&Tok::RBrace) {
                    c.next();
                } else {
                    loop {
                        let col = c.col();
                        let k = match c.next() {
                            Some(Tok::Ident(s)) if !crate::logic::is_variable_name(&s) => s,
                            Some(Tok::Quoted(s)) | Some(Tok::Number(s)) => s,
                            _ => {
                                return Err(at(
                                    col,
                                    ParseErrorKind::Syntax("expected a constant".into()),
                                ))
                            }
                        };
                        if constants.contains(&k) {
                            return Err(at(col, ParseErrorKind::DuplicateConstant(k)));
                        }
                        constants.push(k);
                        match c.next() {
                            Some(Tok::Comma) => continue,
                            Some(Tok::RBrace) => break,
                            _ => {
                                c.pos -= 1;
                                return Err(c.syntax("expected `,` or `}`"));
                            }
                        }
                    }
                }
                c.finish()?;
                let domain = Domain::new(name, constants).map_err(|e| at(1, e.into()))?;
                sig.add_domain(domain).map_err(|e| at(1, e.into()))?;
            }
            (Some(Tok::Ident(_)), _) => {
                let atom = parse_atom(&mut c)?;
                c.finish()?;
                let types = atom
                    .args
                    .into_iter()
                    .map(|t| match t {
                        Term::Var(v) | Term::Const(v) => v,
                    })
                    .collect();
                sig.add_predicate(PredicateSchema {
                    name: atom.predicate,
                    arg_types: types,
                })
                .map_err(|e| at(1, e.into()))?;
            }
            _ => return Err(c.syntax("expected a declaration or weighted formula")),
        }
    }

    // Formulas are checked once all declarations are known.
    for (line, column, formula, weight) in pending_formulas {
        let at = |kind: ParseErrorKind| ParseError { line, column, kind };
        let vars = free_variables(&formula, &sig).map_err(|e| at(e.into()))?;
        let _ = vars;
        for atom in formula.atoms() {
            let schema = sig.predicate(&atom.predicate).unwrap().clone();
            for (t, ty) in atom.args.iter().zip(&schema.arg_types) {
                if let Term::Const(k) = t {
                    sig.add_constant(ty, k).map_err(|e| at(e.into()))?;
                }
            }
        }
        formulas.push(WeightedFormula { formula, weight });
    }

    Ok(Model {
        signature: sig,
        formulas,
        settings,
    })
}

#[derive(Debug, Clone, Copy, Default)]
pub struct DbOptions {
    /// Reject constants outside the declared domains instead of adding them.
    pub strict: bool,
}

/// Parses literal lines without a model: `(atom, value, line)` triples.
pub fn parse_literals(text: &str) -> Result<Vec<(GroundAtom, bool, usize)>, ParseError> {
    let mut out = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let toks = lex(line, line_no)?;
        if toks.is_empty() {
            continue;
        }
        let mut c = Cursor::new(&toks, line_no, line);
        let mut value = true;
        if c.peek() == Some(&Tok::Not) {
            c.next();
            value = false;
        }
        let atom = parse_atom(&mut c)?;
        c.finish()?;
        let ground = atom.to_ground().map_err(|_| ParseError {
            line: line_no,
            column: 1,
            kind: ParseErrorKind::Syntax("database literals must be ground".into()),
        })?;
        out.push((ground, value, line_no));
    }
    Ok(out)
}

pub fn parse_database(text: &str, model: &Model) -> Result<Database, ParseError> {
    parse_database_with(text, model, DbOptions::default())
}

pub fn parse_database_with(
    text: &str,
    model: &Model,
    opts: DbOptions,
) -> Result<Database, ParseError> {
    let mut db = Database::default();
    let mut sig = model.signature.clone();
    for (atom, value, line) in parse_literals(text)? {
        let at = |kind: ParseErrorKind| ParseError {
            line,
            column: 1,
            kind,
        };
        let schema = sig
            .check_ground_atom(&atom)
            .map_err(|e| at(e.into()))?
            .clone();
        for (arg, ty) in atom.args.iter().zip(&schema.arg_types) {
            if !sig.domain(ty).unwrap().contains(arg) {
                if opts.strict {
                    return Err(at(ParseErrorKind::UnknownConstant {
                        constant: arg.clone(),
                        domain: ty.clone(),
                    }));
                }
                sig.add_constant(ty, arg).map_err(|e| at(e.into()))?;
                log::debug!("domain `{ty}` extended with `{arg}`");
                db.added_constants
                    .entry(ty.clone())
                    .or_default()
                    .push(arg.clone());
            }
        }
        db.insert(atom, value).map_err(at)?;
    }
    Ok(db)
}

// ---------------------------------------------------------------------------
// CSV output

#[derive(Debug, Error)]
#[error("{context}: {source}")]
pub struct OutputError {
    pub context: String,
    #[source]
    pub source: std::io::Error,
}

fn output_error(context: &str) -> impl Fn(csv::Error) -> OutputError + '_ {
    move |e| OutputError {
        context: context.into(),
        source: e.into(),
    }
}

/// Writes `atom,probability` rows sorted by the atom's text.
pub fn write_marginals(m: &MarginalTable, sink: impl Write) -> Result<(), OutputError> {
    let ctx = output_error("writing marginals");
    let mut rows: Vec<(String, f64)> = m.iter().map(|(a, &p)| (a.to_string(), p)).collect();
    rows.sort_by(|a, b| a.0.cmp(&b.0));
    let mut w = csv::Writer::from_writer(sink);
    w.write_record(["atom", "probability"]).map_err(&ctx)?;
    for (atom, p) in rows {
        w.write_record([atom, format!("{p:.6}")]).map_err(&ctx)?;
    }
    w.flush().map_err(|e| ctx(e.into()))
}

/// Reads a file written by [`write_marginals`]; the header is optional.
pub fn parse_marginals(text: &str) -> Result<MarginalTable, ParseError> {
    let mut table = MarginalTable::default();
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(text.as_bytes());
    for (idx, record) in reader.records().enumerate() {
        let err = |line: usize, msg: &str| ParseError {
            line,
            column: 1,
            kind: ParseErrorKind::Syntax(msg.to_string()),
        };
        let record = record.map_err(|e| {
            let line = e.position().map_or(1, |p| p.line() as usize);
            err(line, &e.to_string())
        })?;
        let line_no = record.position().map_or(idx + 1, |p| p.line() as usize);
        if idx == 0 && record.iter().eq(["atom", "probability"]) {
            continue;
        }
        let [atom_text, prob] = [record.get(0), record.get(1)];
        let (Some(atom_text), Some(prob), None) = (atom_text, prob, record.get(2)) else {
            return Err(err(line_no, "expected `atom,probability`"));
        };
        let p: f64 = prob
            .trim()
            .parse()
            .map_err(|_| err(line_no, "malformed probability"))?;
        if !(0.0..=1.0).contains(&p) {
            return Err(err(line_no, "probability outside [0,1]"));
        }
        let lits = parse_literals(atom_text).map_err(|e| ParseError { line: line_no, ..e })?;
        match lits.as_slice() {
            [(atom, true, _)] => {
                table.insert(atom.clone(), p);
            }
            _ => return Err(err(line_no, "expected a single ground atom")),
        }
    }
    Ok(table)
}

/// One line of the experiment CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub method: Mode,
    pub aggregator: Aggregator,
    pub train_sizes: Vec<usize>,
    pub test_size: usize,
    pub trial: usize,
    pub seed: u64,
    pub auc_all: f64,
    pub auc_cancer: f64,
    pub auc_smokes: f64,
}

pub const RESULTS_HEADER: &str =
    "method,aggregator,train_sizes,test_size,trial,seed,auc_all,auc_cancer,auc_smokes";

fn fmt_auc(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else {
        format!("{v:.6}")
    }
}

pub fn write_results(rows: &[ResultRow], sink: impl Write) -> Result<(), OutputError> {
    let ctx = output_error("writing experiment results");
    let mut w = csv::Writer::from_writer(sink);
    w.write_record(RESULTS_HEADER.split(',')).map_err(&ctx)?;
    for r in rows {
        let sizes: Vec<String> = r.train_sizes.iter().map(|s| s.to_string()).collect();
        w.write_record([
            r.method.to_string(),
            r.aggregator.to_string(),
            sizes.join(";"),
            r.test_size.to_string(),
            r.trial.to_string(),
            r.seed.to_string(),
            fmt_auc(r.auc_all),
            fmt_auc(r.auc_cancer),
            fmt_auc(r.auc_smokes),
        ])
        .map_err(&ctx)?;
    }
    w.flush().map_err(|e| ctx(e.into()))
}
