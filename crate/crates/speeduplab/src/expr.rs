//! A tiny arithmetic expression language for parametric cost models.
//!
//! Expressions are real-valued formulas over the two model variables `p`
//! (processor count) and `n` (problem dimension), plus named constants that
//! are bound at evaluation time from a constant table. The surface syntax is
//! conventional:
//!
//! ```text
//! expr    := term (("+" | "-") term)*
//! term    := factor (("*" | "/") factor)*
//! factor  := "-" factor | power
//! power   := atom ("^" factor)?
//! atom    := NUMBER | IDENT | IDENT "(" expr ")" | "(" expr ")"
//! ```
//!
//! `NUMBER` is an IEEE double literal (`2`, `0.5`, `1e-3`); `IDENT` is
//! `[A-Za-z_][A-Za-z0-9_]*`. The identifiers `p` and `n` are the model
//! variables, `log`, `log2`, `exp` and `sqrt` are the built-in unary
//! functions (`log` is natural), and every other identifier names a constant.
//! Operator precedence is `^` above unary minus above `*`/`/` above `+`/`-`,
//! so `-2^2` is `-(2^2)`; `^` is right-associative, so `2^3^2` is `2^(3^2)`.
//!
//! Parsing and printing round-trip: for any parsed tree `t`,
//! `parse(&t.to_string())` yields a structurally identical tree, so it also
//! evaluates to bit-identical results.
//!
//! ```
//! use speeduplab::expr::{parse, Bindings};
//!
//! let t_par = parse("n/p + log(p)").unwrap();
//! let b = Bindings::new(10.0, 100.0).unwrap();
//! assert_eq!(t_par.evaluate(&b).unwrap(), 10.0 + 10.0f64.ln());
//! ```

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

/// A model variable: `p` is the processor count, `n` the problem dimension.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Var {
    P,
    N,
}

impl Var {
    fn name(self) -> &'static str {
        match self {
            Var::P => "p",
            Var::N => "n",
        }
    }
}

/// Binary operators, in increasing precedence: `+ -`, `* /`, `^`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinOp {
    fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Pow => "^",
        }
    }
}

/// Built-in unary functions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    /// Natural logarithm.
    Log,
    /// Base-2 logarithm.
    Log2,
    Exp,
    Sqrt,
}

impl Func {
    fn name(self) -> &'static str {
        match self {
            Func::Log => "log",
            Func::Log2 => "log2",
            Func::Exp => "exp",
            Func::Sqrt => "sqrt",
        }
    }

    fn from_name(name: &str) -> Option<Func> {
        match name {
            "log" => Some(Func::Log),
            "log2" => Some(Func::Log2),
            "exp" => Some(Func::Exp),
            "sqrt" => Some(Func::Sqrt),
            _ => None,
        }
    }
}

/// An expression tree. The parser never produces negative `Num` literals
/// (a leading minus becomes `Neg`), which is what makes printing and
/// re-parsing structurally stable.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    Var(Var),
    /// A named constant, resolved through [`Bindings`] at evaluation time.
    Const(String),
    Neg(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

/// Variable and constant values for one evaluation.
///
/// Both variables are clamped to the model domain `p >= 1`, `n >= 1` at
/// construction; out-of-domain values are rejected rather than silently
/// evaluated.
#[derive(Debug, Clone, Copy)]
pub struct Bindings<'a> {
    p: f64,
    n: f64,
    constants: &'a BTreeMap<String, f64>,
}

static NO_CONSTANTS: BTreeMap<String, f64> = BTreeMap::new();

impl<'a> Bindings<'a> {
    /// Bindings with no named constants.
    pub fn new(p: f64, n: f64) -> Result<Bindings<'static>, EvalError> {
        Bindings::with_constants(p, n, &NO_CONSTANTS)
    }

    /// Bindings with a table of named constants.
    pub fn with_constants(
        p: f64,
        n: f64,
        constants: &'a BTreeMap<String, f64>,
    ) -> Result<Bindings<'a>, EvalError> {
        if !p.is_finite() || p < 1.0 {
            return Err(EvalError::VariableOutOfDomain { var: Var::P, value: p });
        }
        if !n.is_finite() || n < 1.0 {
            return Err(EvalError::VariableOutOfDomain { var: Var::N, value: n });
        }
        Ok(Bindings { p, n, constants })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn n(&self) -> f64 {
        self.n
    }
}

/// Why an evaluation failed.
#[derive(Debug, Clone, PartialEq)]
pub enum EvalError {
    /// An identifier was used as a constant but is missing from the table.
    UnboundConstant { name: String },
    /// A variable binding lies outside the model domain (`p >= 1`, `n >= 1`).
    VariableOutOfDomain { var: Var, value: f64 },
    DivisionByZero,
    /// `log`/`log2` of a non-positive value.
    LogNonPositive { value: f64 },
    /// `sqrt` of a negative value.
    SqrtNegative { value: f64 },
    /// `x^y` with `x < 0` and non-integer `y` (defined via `exp(y*log x)`,
    /// which needs `x > 0`), or `0^y` with `y < 0`.
    PowDomain { base: f64, exponent: f64 },
    /// An intermediate result overflowed or was otherwise not finite.
    NonFinite,
}

impl fmt::Display for EvalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EvalError::UnboundConstant { name } => {
                write!(f, "unbound constant `{name}`")
            }
            EvalError::VariableOutOfDomain { var, value } => {
                write!(f, "variable {} = {value} is outside its domain (>= 1)", var.name())
            }
            EvalError::DivisionByZero => write!(f, "division by zero"),
            EvalError::LogNonPositive { value } => {
                write!(f, "logarithm of non-positive value {value}")
            }
            EvalError::SqrtNegative { value } => {
                write!(f, "square root of negative value {value}")
            }
            EvalError::PowDomain { base, exponent } => {
                write!(f, "{base}^{exponent} is undefined over the reals")
            }
            EvalError::NonFinite => write!(f, "non-finite intermediate result"),
        }
    }
}

impl std::error::Error for EvalError {}

impl Expr {
    /// Evaluate the tree against the given bindings.
    ///
    /// Every intermediate result must be finite; `^` with a non-integer
    /// exponent requires a positive base.
    pub fn evaluate(&self, bindings: &Bindings) -> Result<f64, EvalError> {
        let value = match self {
            Expr::Num(v) => *v,
            Expr::Var(Var::P) => bindings.p,
            Expr::Var(Var::N) => bindings.n,
            Expr::Const(name) => *bindings
                .constants
                .get(name)
                .ok_or_else(|| EvalError::UnboundConstant { name: name.clone() })?,
            Expr::Neg(inner) => -inner.evaluate(bindings)?,
            Expr::Bin(op, lhs, rhs) => {
                let l = lhs.evaluate(bindings)?;
                let r = rhs.evaluate(bindings)?;
                match op {
                    BinOp::Add => l + r,
                    BinOp::Sub => l - r,
                    BinOp::Mul => l * r,
                    BinOp::Div => {
                        if r == 0.0 {
                            return Err(EvalError::DivisionByZero);
                        }
                        l / r
                    }
                    BinOp::Pow => {
                        if l < 0.0 && r.fract() != 0.0 {
                            return Err(EvalError::PowDomain { base: l, exponent: r });
                        }
                        if l == 0.0 && r < 0.0 {
                            return Err(EvalError::PowDomain { base: l, exponent: r });
                        }
                        l.powf(r)
                    }
                }
            }
            Expr::Call(func, arg) => {
                let x = arg.evaluate(bindings)?;
                match func {
                    Func::Log => {
                        if x <= 0.0 {
                            return Err(EvalError::LogNonPositive { value: x });
                        }
                        x.ln()
                    }
                    Func::Log2 => {
                        if x <= 0.0 {
                            return Err(EvalError::LogNonPositive { value: x });
                        }
                        x.log2()
                    }
                    Func::Exp => x.exp(),
                    Func::Sqrt => {
                        if x < 0.0 {
                            return Err(EvalError::SqrtNegative { value: x });
                        }
                        x.sqrt()
                    }
                }
            }
        };
        if value.is_finite() {
            Ok(value)
        } else {
            Err(EvalError::NonFinite)
        }
    }

    /// Does the tree mention the given variable anywhere?
    pub fn references_var(&self, var: Var) -> bool {
        match self {
            Expr::Num(_) | Expr::Const(_) => false,
            Expr::Var(v) => *v == var,
            Expr::Neg(inner) => inner.references_var(var),
            Expr::Bin(_, lhs, rhs) => lhs.references_var(var) || rhs.references_var(var),
            Expr::Call(_, arg) => arg.references_var(var),
        }
    }

    /// The set of named constants the tree refers to.
    pub fn constants(&self) -> BTreeSet<&str> {
        fn walk<'e>(e: &'e Expr, out: &mut BTreeSet<&'e str>) {
            match e {
                Expr::Num(_) | Expr::Var(_) => {}
                Expr::Const(name) => {
                    out.insert(name.as_str());
                }
                Expr::Neg(inner) => walk(inner, out),
                Expr::Bin(_, lhs, rhs) => {
                    walk(lhs, out);
                    walk(rhs, out);
                }
                Expr::Call(_, arg) => walk(arg, out),
            }
        }
        let mut out = BTreeSet::new();
        walk(self, &mut out);
        out
    }
}

// Printing precedence levels; atoms sit above every operator.
fn precedence(e: &Expr) -> u8 {
    match e {
        Expr::Bin(BinOp::Add | BinOp::Sub, ..) => 1,
        Expr::Bin(BinOp::Mul | BinOp::Div, ..) => 2,
        Expr::Neg(_) => 3,
        Expr::Bin(BinOp::Pow, ..) => 4,
        Expr::Num(_) | Expr::Var(_) | Expr::Const(_) | Expr::Call(..) => 5,
    }
}

fn write_child(f: &mut fmt::Formatter<'_>, child: &Expr, parens: bool) -> fmt::Result {
    if parens {
        write!(f, "({child})")
    } else {
        write!(f, "{child}")
    }
}

impl fmt::Display for Expr {
    /// Print with the fewest parentheses that re-parse to the same tree.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(v) => write!(f, "{v}"),
            Expr::Var(v) => f.write_str(v.name()),
            Expr::Const(name) => f.write_str(name),
            Expr::Neg(inner) => {
                f.write_str("-")?;
                write_child(f, inner, precedence(inner) < 3)
            }
            Expr::Bin(op @ (BinOp::Add | BinOp::Sub), lhs, rhs) => {
                write!(f, "{lhs} {} ", op.symbol())?;
                write_child(f, rhs, precedence(rhs) <= 1)
            }
            Expr::Bin(op @ (BinOp::Mul | BinOp::Div), lhs, rhs) => {
                write_child(f, lhs, precedence(lhs) < 2)?;
                f.write_str(op.symbol())?;
                write_child(f, rhs, precedence(rhs) <= 2)
            }
            Expr::Bin(BinOp::Pow, lhs, rhs) => {
                write_child(f, lhs, precedence(lhs) <= 4)?;
                f.write_str("^")?;
                write_child(f, rhs, precedence(rhs) < 3)
            }
            Expr::Call(func, arg) => write!(f, "{}({arg})", func.name()),
        }
    }
}

/// Why parsing failed. Offsets are 1-based character positions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseError {
    UnexpectedChar { ch: char, offset: usize },
    InvalidNumber { text: String, offset: usize },
    UnknownFunction { name: String, offset: usize },
    /// A token that no grammar rule accepts at this point.
    UnexpectedToken { found: String, offset: usize },
    /// Input ended while a rule still needed more.
    UnexpectedEnd { offset: usize },
    /// Extra input after a complete expression.
    TrailingInput { offset: usize },
}

impl ParseError {
    /// 1-based character offset of the error.
    pub fn offset(&self) -> usize {
        match self {
            ParseError::UnexpectedChar { offset, .. }
            | ParseError::InvalidNumber { offset, .. }
            | ParseError::UnknownFunction { offset, .. }
            | ParseError::UnexpectedToken { offset, .. }
            | ParseError::UnexpectedEnd { offset }
            | ParseError::TrailingInput { offset } => *offset,
        }
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseError::UnexpectedChar { ch, offset } => {
                write!(f, "unexpected character `{ch}` at offset {offset}")
            }
            ParseError::InvalidNumber { text, offset } => {
                write!(f, "invalid number `{text}` at offset {offset}")
            }
            ParseError::UnknownFunction { name, offset } => {
                write!(f, "unknown function `{name}` at offset {offset}")
            }
            ParseError::UnexpectedToken { found, offset } => {
                write!(f, "unexpected `{found}` at offset {offset}")
            }
            ParseError::UnexpectedEnd { offset } => {
                write!(f, "unexpected end of input at offset {offset}")
            }
            ParseError::TrailingInput { offset } => {
                write!(f, "trailing input at offset {offset}")
            }
        }
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

impl Token {
    fn describe(&self) -> String {
        match self {
            Token::Num(v) => format!("{v}"),
            Token::Ident(s) => s.clone(),
            Token::Plus => "+".into(),
            Token::Minus => "-".into(),
            Token::Star => "*".into(),
            Token::Slash => "/".into(),
            Token::Caret => "^".into(),
            Token::LParen => "(".into(),
            Token::RParen => ")".into(),
        }
    }
}

struct Lexer<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    /// 1-based offset of the next character to be read.
    offset: usize,
}

impl<'a> Lexer<'a> {
    fn new(input: &'a str) -> Self {
        Lexer { chars: input.chars().peekable(), offset: 1 }
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next();
        if c.is_some() {
            self.offset += 1;
        }
        c
    }

    /// Tokenize everything up front; each token keeps its starting offset.
    fn tokenize(mut self) -> Result<Vec<(Token, usize)>, ParseError> {
        let mut tokens = Vec::new();
        while let Some(&c) = self.chars.peek() {
            let start = self.offset;
            match c {
                ' ' | '\t' | '\r' | '\n' => {
                    self.bump();
                }
                '+' => {
                    self.bump();
                    tokens.push((Token::Plus, start));
                }
                '-' => {
                    self.bump();
                    tokens.push((Token::Minus, start));
                }
                '*' => {
                    self.bump();
                    tokens.push((Token::Star, start));
                }
                '/' => {
                    self.bump();
                    tokens.push((Token::Slash, start));
                }
                '^' => {
                    self.bump();
                    tokens.push((Token::Caret, start));
                }
                '(' => {
                    self.bump();
                    tokens.push((Token::LParen, start));
                }
                ')' => {
                    self.bump();
                    tokens.push((Token::RParen, start));
                }
                '0'..='9' | '.' => {
                    let text = self.lex_number();
                    let value: f64 = text
                        .parse()
                        .map_err(|_| ParseError::InvalidNumber { text: text.clone(), offset: start })?;
                    tokens.push((Token::Num(value), start));
                }
                c if c.is_ascii_alphabetic() || c == '_' => {
                    let mut name = String::new();
                    while let Some(&c) = self.chars.peek() {
                        if c.is_ascii_alphanumeric() || c == '_' {
                            name.push(c);
                            self.bump();
                        } else {
                            break;
                        }
                    }
                    tokens.push((Token::Ident(name), start));
                }
                ch => return Err(ParseError::UnexpectedChar { ch, offset: start }),
            }
        }
        Ok(tokens)
    }

    /// Digits, optional fraction, optional exponent. The exponent marker is
    /// only consumed when a digit (possibly after a sign) follows, so `2е`
    /// in `2exp(1)`-like inputs stays two tokens.
    fn lex_number(&mut self) -> String {
        let mut text = String::new();
        while matches!(self.chars.peek(), Some('0'..='9')) {
            text.push(self.bump().unwrap());
        }
        if self.chars.peek() == Some(&'.') {
            text.push(self.bump().unwrap());
            while matches!(self.chars.peek(), Some('0'..='9')) {
                text.push(self.bump().unwrap());
            }
        }
        if matches!(self.chars.peek(), Some('e') | Some('E')) {
            // Look ahead past the marker and optional sign for a digit.
            let mut probe = self.chars.clone();
            let marker = probe.next().unwrap();
            let mut sign = None;
            if matches!(probe.peek(), Some('+') | Some('-')) {
                sign = probe.next();
            }
            if matches!(probe.peek(), Some('0'..='9')) {
                text.push(marker);
                self.bump();
                if let Some(s) = sign {
                    text.push(s);
                    self.bump();
                }
                while matches!(self.chars.peek(), Some('0'..='9')) {
                    text.push(self.bump().unwrap());
                }
            }
        }
        text
    }
}

struct Parser {
    tokens: Vec<(Token, usize)>,
    pos: usize,
    end_offset: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|(t, _)| t)
    }

    fn here(&self) -> usize {
        self.tokens.get(self.pos).map_or(self.end_offset, |(_, o)| *o)
    }

    fn bump(&mut self) -> Option<(Token, usize)> {
        let t = self.tokens.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, want: Token) -> Result<(), ParseError> {
        match self.bump() {
            Some((t, _)) if t == want => Ok(()),
            Some((t, offset)) => {
                Err(ParseError::UnexpectedToken { found: t.describe(), offset })
            }
            None => Err(ParseError::UnexpectedEnd { offset: self.end_offset }),
        }
    }

    // expr := term (("+" | "-") term)*
    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Some(Token::Plus) => BinOp::Add,
                Some(Token::Minus) => BinOp::Sub,
                _ => break,
            };
            self.bump();
            let rhs = self.term()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    // term := factor (("*" | "/") factor)*
    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.factor()?;
        loop {
            let op = match self.peek() {
                Some(Token::Star) => BinOp::Mul,
                Some(Token::Slash) => BinOp::Div,
                _ => break,
            };
            self.bump();
            let rhs = self.factor()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    // factor := "-" factor | power
    fn factor(&mut self) -> Result<Expr, ParseError> {
        if self.peek() == Some(&Token::Minus) {
            self.bump();
            return Ok(Expr::Neg(Box::new(self.factor()?)));
        }
        self.power()
    }

    // power := atom ("^" factor)?   — right-associative via the factor rule.
    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if self.peek() == Some(&Token::Caret) {
            self.bump();
            let exponent = self.factor()?;
            return Ok(Expr::Bin(BinOp::Pow, Box::new(base), Box::new(exponent)));
        }
        Ok(base)
    }

    // atom := NUMBER | IDENT | IDENT "(" expr ")" | "(" expr ")"
    fn atom(&mut self) -> Result<Expr, ParseError> {
        match self.bump() {
            Some((Token::Num(v), _)) => Ok(Expr::Num(v)),
            Some((Token::Ident(name), offset)) => {
                if self.peek() == Some(&Token::LParen) {
                    let func = Func::from_name(&name)
                        .ok_or(ParseError::UnknownFunction { name, offset })?;
                    self.bump();
                    let arg = self.expr()?;
                    self.expect(Token::RParen)?;
                    Ok(Expr::Call(func, Box::new(arg)))
                } else {
                    Ok(match name.as_str() {
                        "p" => Expr::Var(Var::P),
                        "n" => Expr::Var(Var::N),
                        _ => Expr::Const(name),
                    })
                }
            }
            Some((Token::LParen, _)) => {
                let inner = self.expr()?;
                self.expect(Token::RParen)?;
                Ok(inner)
            }
            Some((t, offset)) => {
                Err(ParseError::UnexpectedToken { found: t.describe(), offset })
            }
            None => Err(ParseError::UnexpectedEnd { offset: self.end_offset }),
        }
    }
}

/// Parse an expression, requiring the whole input to be consumed.
pub fn parse(input: &str) -> Result<Expr, ParseError> {
    let end_offset = input.chars().count() + 1;
    let tokens = Lexer::new(input).tokenize()?;
    let mut parser = Parser { tokens, pos: 0, end_offset };
    let expr = parser.expr()?;
    if parser.pos != parser.tokens.len() {
        return Err(ParseError::TrailingInput { offset: parser.here() });
    }
    Ok(expr)
}
