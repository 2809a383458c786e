//! Lexer and recursive-descent parser.
//!
//! ```text
//! program   := decl* stmt*
//! decl      := "qubit" IDENT ";"
//! stmt      := "skip" ";"
//!            | GATE IDENT+ ";"
//!            | "unitary" matrix IDENT+ ";"
//!            | "if" guard "{" stmt* "}" [ "else" "{" stmt* "}" ]
//!            | "while" guard "{" stmt* "}"
//! guard     := IDENT "in" KET                KET in |0> |1> |+> |->
//! matrix    := "[" row ("," row)* "]"
//! row       := "[" expr ("," expr)* "]"
//! expr      := complex arithmetic over numbers, `i`, `sqrt(..)`, + - * / ( )
//! ```
//!
//! `//` and `#` start comments that run to the end of the line.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::{Cplx, Real};
use crate::tolerance::Tolerances;

use super::gates::{denote_unitary, guard_subspace, GateKind, Ket};
use super::{Gate, Program, Statement, MAX_QUBITS};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Number(f64),
    /// A number written with an `i` suffix, e.g. `0.5i`.
    Imag(f64),
    Ket(Ket),
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    LParen,
    RParen,
    Semi,
    Comma,
    Plus,
    Minus,
    Star,
    Slash,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("'{s}'"),
            Tok::Number(x) => format!("number {x}"),
            Tok::Imag(x) => format!("number {x}i"),
            Tok::Ket(_) => "ket".into(),
            Tok::Eof => "end of input".into(),
            other => format!("'{}'", punct(other)),
        }
    }
}

fn punct(t: &Tok) -> &'static str {
    match t {
        Tok::LBrace => "{",
        Tok::RBrace => "}",
        Tok::LBracket => "[",
        Tok::RBracket => "]",
        Tok::LParen => "(",
        Tok::RParen => ")",
        Tok::Semi => ";",
        Tok::Comma => ",",
        Tok::Plus => "+",
        Tok::Minus => "-",
        Tok::Star => "*",
        Tok::Slash => "/",
        _ => "?",
    }
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

fn err(line: usize, col: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        col,
        message: message.into(),
    }
}

fn lex(src: &str) -> Result<Vec<Token>> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0, 1, 1);
    while i < chars.len() {
        let c = chars[i];
        let (tl, tc) = (line, col);
        let advance = |n: usize, i: &mut usize, col: &mut usize| {
            *i += n;
            *col += n;
        };
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            advance(1, &mut i, &mut col);
            continue;
        }
        if c == '#' || (c == '/' && chars.get(i + 1) == Some(&'/')) {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        let tok = if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            col += i - start;
            out.push(Token {
                tok: Tok::Ident(chars[start..i].iter().collect()),
                line: tl,
                col: tc,
            });
            continue;
        } else if c.is_ascii_digit() || (c == '.' && chars.get(i + 1).is_some_and(char::is_ascii_digit)) {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    i = j;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let text: String = chars[start..i].iter().collect();
            let value: f64 = text
                .parse()
                .map_err(|_| err(tl, tc, format!("invalid number '{text}'")))?;
            let imaginary = chars.get(i) == Some(&'i')
                && !chars.get(i + 1).is_some_and(|c| c.is_ascii_alphanumeric() || *c == '_');
            if imaginary {
                i += 1;
            }
            col += i - start;
            out.push(Token {
                tok: if imaginary { Tok::Imag(value) } else { Tok::Number(value) },
                line: tl,
                col: tc,
            });
            continue;
        } else if c == '|' {
            let ket = match (chars.get(i + 1), chars.get(i + 2)) {
                (Some('0'), Some('>')) => Ket::Zero,
                (Some('1'), Some('>')) => Ket::One,
                (Some('+'), Some('>')) => Ket::Plus,
                (Some('-'), Some('>')) => Ket::Minus,
                _ => return Err(err(tl, tc, "expected one of |0> |1> |+> |->")),
            };
            advance(3, &mut i, &mut col);
            Tok::Ket(ket)
        } else {
            let t = match c {
                '{' => Tok::LBrace,
                '}' => Tok::RBrace,
                '[' => Tok::LBracket,
                ']' => Tok::RBracket,
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                ';' => Tok::Semi,
                ',' => Tok::Comma,
                '+' => Tok::Plus,
                '-' => Tok::Minus,
                '*' => Tok::Star,
                '/' => Tok::Slash,
                other => return Err(err(tl, tc, format!("unexpected character '{other}'"))),
            };
            advance(1, &mut i, &mut col);
            t
        };
        out.push(Token { tok, line: tl, col: tc });
    }
    out.push(Token {
        tok: Tok::Eof,
        line,
        col,
    });
    Ok(out)
}

const KEYWORDS: &[&str] = &["qubit", "skip", "if", "else", "while", "in", "unitary"];

struct Parser<'a, T> {
    tokens: Vec<Token>,
    pos: usize,
    registers: Vec<String>,
    tol: &'a Tolerances<T>,
}

impl<T: Real> Parser<'_, T> {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos]
    }

    fn bump(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if t.tok != Tok::Eof {
            self.pos += 1;
        }
        t
    }

    fn error_here(&self, message: impl Into<String>) -> Error {
        let t = self.peek();
        err(t.line, t.col, message)
    }

    fn expect(&mut self, want: Tok) -> Result<Token> {
        if self.peek().tok == want {
            Ok(self.bump())
        } else {
            let found = self.peek().tok.describe();
            Err(self.error_here(format!("expected '{}', found {found}", punct(&want))))
        }
    }

    fn is_keyword(&self, kw: &str) -> bool {
        matches!(&self.peek().tok, Tok::Ident(s) if s == kw)
    }

    fn ident(&mut self) -> Result<(String, usize, usize)> {
        let t = self.bump();
        match t.tok {
            Tok::Ident(s) => Ok((s, t.line, t.col)),
            other => Err(err(t.line, t.col, format!("expected identifier, found {}", other.describe()))),
        }
    }

    fn register(&mut self) -> Result<usize> {
        let (name, line, col) = self.ident()?;
        self.registers
            .iter()
            .position(|r| *r == name)
            .ok_or_else(|| err(line, col, format!("unknown register '{name}'")))
    }

    fn program(&mut self) -> Result<Program<T>> {
        let mut declarations = Vec::new();
        while self.is_keyword("qubit") {
            let kw = self.bump();
            let (name, line, col) = self.ident()?;
            if KEYWORDS.contains(&name.as_str()) || GateKind::from_name(&name).is_some() {
                return Err(err(line, col, format!("'{name}' is reserved")));
            }
            if self.registers.contains(&name) {
                return Err(err(line, col, format!("register '{name}' declared twice")));
            }
            if self.registers.len() == MAX_QUBITS {
                return Err(err(kw.line, kw.col, format!("more than {MAX_QUBITS} qubits")));
            }
            self.expect(Tok::Semi)?;
            self.registers.push(name.clone());
            declarations.push((name, 1));
        }
        let mut body = Vec::new();
        while self.peek().tok != Tok::Eof {
            if self.is_keyword("qubit") {
                return Err(self.error_here("declarations must precede statements"));
            }
            body.push(self.statement()?);
        }
        Ok(Program {
            declarations,
            body: Statement::Seq(body),
        })
    }

    fn block(&mut self) -> Result<Statement<T>> {
        self.expect(Tok::LBrace)?;
        let mut items = Vec::new();
        while self.peek().tok != Tok::RBrace {
            if self.peek().tok == Tok::Eof {
                return Err(self.error_here("unclosed block"));
            }
            items.push(self.statement()?);
        }
        self.bump();
        Ok(Statement::Seq(items))
    }

    fn guard(&mut self) -> Result<crate::logic::ClosedSubspace<T>> {
        let target = self.register()?;
        if !self.is_keyword("in") {
            return Err(self.error_here("expected 'in'"));
        }
        self.bump();
        let t = self.bump();
        let ket = match t.tok {
            Tok::Ket(k) => k,
            other => return Err(err(t.line, t.col, format!("expected ket, found {}", other.describe()))),
        };
        guard_subspace(ket, target, self.registers.len())
    }

    fn targets(&mut self) -> Result<Vec<usize>> {
        let mut targets = Vec::new();
        while self.peek().tok != Tok::Semi {
            if !matches!(self.peek().tok, Tok::Ident(_)) {
                let found = self.peek().tok.describe();
                return Err(self.error_here(format!("expected register or ';', found {found}")));
            }
            targets.push(self.register()?);
        }
        self.bump();
        Ok(targets)
    }

    fn apply(&mut self, gate: Gate<T>, line: usize, col: usize) -> Result<Statement<T>> {
        let targets = self.targets()?;
        denote_unitary(&gate, &targets, self.registers.len(), self.tol).map_err(|e| err(line, col, e.to_string()))?;
        Ok(Statement::ApplyUnitary { gate, targets })
    }

    fn statement(&mut self) -> Result<Statement<T>> {
        let head = self.peek().clone();
        let Tok::Ident(word) = &head.tok else {
            return Err(self.error_here(format!("expected statement, found {}", head.tok.describe())));
        };
        match word.as_str() {
            "skip" => {
                self.bump();
                self.expect(Tok::Semi)?;
                Ok(Statement::Skip)
            }
            "if" => {
                self.bump();
                let guard = self.guard()?;
                let then_branch = self.block()?;
                let else_branch = if self.is_keyword("else") {
                    self.bump();
                    self.block()?
                } else {
                    Statement::Skip
                };
                Ok(Statement::Branch {
                    guard,
                    then_branch: Box::new(then_branch),
                    else_branch: Box::new(else_branch),
                })
            }
            "while" => {
                self.bump();
                let guard = self.guard()?;
                let body = self.block()?;
                Ok(Statement::While {
                    guard,
                    body: Box::new(body),
                })
            }
            "unitary" => {
                self.bump();
                let m = self.matrix()?;
                self.apply(Gate::Matrix(m), head.line, head.col)
            }
            name => match GateKind::from_name(name) {
                Some(kind) => {
                    self.bump();
                    self.apply(Gate::Named(kind), head.line, head.col)
                }
                None => Err(err(head.line, head.col, format!("unknown gate '{name}'"))),
            },
        }
    }

    fn matrix(&mut self) -> Result<Matrix<T>> {
        let start = self.peek().clone();
        self.expect(Tok::LBracket)?;
        let mut rows = vec![self.row()?];
        while self.peek().tok == Tok::Comma {
            self.bump();
            rows.push(self.row()?);
        }
        self.expect(Tok::RBracket)?;
        let n = rows.len();
        if !n.is_power_of_two() || n < 2 {
            return Err(err(start.line, start.col, format!("matrix dimension {n} is not a power of two")));
        }
        Matrix::from_rows(rows).map_err(|e| err(start.line, start.col, e.to_string()))
    }

    fn row(&mut self) -> Result<Vec<Cplx<T>>> {
        self.expect(Tok::LBracket)?;
        let mut row = vec![self.expr()?];
        while self.peek().tok == Tok::Comma {
            self.bump();
            row.push(self.expr()?);
        }
        self.expect(Tok::RBracket)?;
        Ok(row)
    }

    fn expr(&mut self) -> Result<Cplx<T>> {
        let mut acc = self.term()?;
        loop {
            match self.peek().tok {
                Tok::Plus => {
                    self.bump();
                    acc += self.term()?;
                }
                Tok::Minus => {
                    self.bump();
                    acc -= self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Cplx<T>> {
        let mut acc = self.unary()?;
        loop {
            match self.peek().tok {
                Tok::Star => {
                    self.bump();
                    acc *= self.unary()?;
                }
                Tok::Slash => {
                    let here = self.peek().clone();
                    self.bump();
                    let d = self.unary()?;
                    if d.norm() == T::zero() {
                        return Err(err(here.line, here.col, "division by zero"));
                    }
                    acc /= d;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<Cplx<T>> {
        match self.peek().tok {
            Tok::Minus => {
                self.bump();
                Ok(-self.unary()?)
            }
            Tok::Plus => {
                self.bump();
                self.unary()
            }
            _ => self.atom(),
        }
    }

    fn atom(&mut self) -> Result<Cplx<T>> {
        let t = self.bump();
        match t.tok {
            Tok::Number(x) => Ok(Complex::new(T::lit(x), T::zero())),
            Tok::Imag(x) => Ok(Complex::new(T::zero(), T::lit(x))),
            Tok::Ident(ref s) if s == "i" => Ok(Complex::new(T::zero(), T::one())),
            Tok::Ident(ref s) if s == "sqrt" => {
                self.expect(Tok::LParen)?;
                let v = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(v.sqrt())
            }
            Tok::LParen => {
                let v = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(v)
            }
            other => Err(err(t.line, t.col, format!("expected matrix entry, found {}", other.describe()))),
        }
    }
}

/// Parses a program with the default tolerances for `T`.
pub fn parse<T: Real>(text: &str) -> Result<Program<T>> {
    parse_with(text, &Tolerances::default())
}

/// Parses a program; `tol` governs the unitarity check of inline matrices.
pub fn parse_with<T: Real>(text: &str, tol: &Tolerances<T>) -> Result<Program<T>> {
    let mut parser = Parser {
        tokens: lex(text)?,
        pos: 0,
        registers: Vec::new(),
        tol,
    };
    parser.program()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(src: &str) -> Result<Program<f64>> {
        parse(src)
    }

    fn parse_error(src: &str) -> (usize, usize, String) {
        match p(src).unwrap_err() {
            Error::Parse { line, col, message } => (line, col, message),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn single_gate() {
        let prog = p("qubit q; x q;").unwrap();
        assert_eq!(prog.declarations, vec![("q".to_string(), 1)]);
        let Statement::Seq(items) = &prog.body else { panic!() };
        assert!(matches!(
            &items[..],
            [Statement::ApplyUnitary { gate: Gate::Named(GateKind::X), targets }] if targets == &[0]
        ));
    }

    #[test]
    fn while_loop() {
        let prog = p("qubit q; while q in |1> { h q; }").unwrap();
        let Statement::Seq(items) = &prog.body else { panic!() };
        let Statement::While { guard, body } = &items[0] else { panic!() };
        assert_eq!(guard.projection(), &Matrix::from_diag(&[0.0, 1.0]));
        let Statement::Seq(inner) = body.as_ref() else { panic!() };
        assert!(matches!(inner[0], Statement::ApplyUnitary { gate: Gate::Named(GateKind::H), .. }));
    }

    #[test]
    fn unknown_register() {
        let (line, col, msg) = parse_error("qubit q; y r;");
        assert_eq!((line, col), (1, 12));
        assert!(msg.contains("unknown register 'r'"), "{msg}");
    }

    #[test]
    fn unknown_gate() {
        let (_, _, msg) = parse_error("qubit q;\nfoo q;");
        assert!(msg.contains("unknown gate 'foo'"));
    }

    #[test]
    fn too_many_qubits() {
        let src = "qubit a; qubit b; qubit c; qubit d; qubit e; qubit f; qubit g;";
        let (_, col, msg) = parse_error(src);
        assert_eq!(col, 55);
        assert!(msg.contains("more than 6"));
    }

    #[test]
    fn arity_mismatch_and_duplicates() {
        assert!(p("qubit a; qubit b; cnot a;").is_err());
        assert!(p("qubit a; cnot a a;").is_err());
        assert!(p("qubit a; qubit a;").is_err());
        assert!(p("qubit a; x a; qubit b;").is_err());
        assert!(p("qubit a; x a").is_err());
        assert!(p("qubit a; while a in |2> { }").is_err());
        assert!(p("qubit a; while a { }").is_err());
    }

    #[test]
    fn branches_nest() {
        let src = "
            qubit a; qubit b;
            # comment
            if a in |+> { cnot a b; } else { skip; }
            if b in |-> { z b; }    // else-less
            while a in |0> { while b in |1> { x b; } x a; }
        ";
        let prog = p(src).unwrap();
        assert_eq!(prog.num_qubits(), 2);
        assert_eq!(prog.body.depth(), 2);
    }

    #[test]
    fn inline_matrix() {
        let prog = p("qubit q; unitary [[1/sqrt(2), 1/sqrt(2)], [0.5*sqrt(2), -sqrt(2)/2]] q;").unwrap();
        let Statement::Seq(items) = &prog.body else { panic!() };
        let Statement::ApplyUnitary { gate: Gate::Matrix(m), .. } = &items[0] else { panic!() };
        assert!(m.distance(&GateKind::H.matrix()).unwrap() < 1e-15);

        let prog = p("qubit q; unitary [[1, 0], [0, 0.6+0.8i]] q;").unwrap();
        let Statement::Seq(items) = &prog.body else { panic!() };
        let Statement::ApplyUnitary { gate: Gate::Matrix(m), .. } = &items[0] else { panic!() };
        assert_eq!(m[(1, 1)], Complex::new(0.6, 0.8));

        assert!(p("qubit q; unitary [[1, 0], [0, -i]] q;").is_ok());
        assert!(p("qubit q; unitary [[1, 1], [0, 1]] q;").is_err());
        assert!(p("qubit q; unitary [[1, 0, 0], [0, 1, 0], [0, 0, 1]] q;").is_err());
        assert!(p("qubit q; qubit r; unitary [[1, 0], [0, 1]] q r;").is_err());
    }

    #[test]
    fn bad_character_position() {
        let (line, col, _) = parse_error("qubit q;\n  x q; @");
        assert_eq!((line, col), (2, 8));
    }
}
