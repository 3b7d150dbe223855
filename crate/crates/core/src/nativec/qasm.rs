//! OpenQASM 2.0 text for native circuits.
//!
//! `rz` and `rzz` are the `qelib1.inc` gates (equal to the natives up to global
//! phase). `u1q` and the splitter `usp` are declared as macros when used.

use std::fmt::Write as _;

use thiserror::Error;

use super::{Circuit, NativeGate, SplitterGate};
use crate::numfmt::fmt17;

const U1Q_DEF: &str = "gate u1q(theta,phi) a { U(theta,phi-pi/2,pi/2-phi) a; }";
const USP_DEF: &str = "gate usp(gamma) a,b { h a; sdg b; h b; rzz(-gamma) a,b; h a; h b; s b; sdg a; h a; h b; rzz(gamma) a,b; h a; s a; h b; }";

pub fn emit_qasm(c: &Circuit) -> String {
    let mut s = String::from("OPENQASM 2.0;\ninclude \"qelib1.inc\";\n");
    let uses = |k: &str| c.gates().iter().any(|g| g.kind_name() == k);
    if uses("u1q") {
        s.push_str(U1Q_DEF);
        s.push('\n');
    }
    if uses("splitter") {
        s.push_str(USP_DEF);
        s.push('\n');
    }
    let _ = writeln!(s, "qreg q[{}];", c.n_qubits());
    for g in c.gates() {
        let _ = match *g {
            NativeGate::Rz { q, lambda } => writeln!(s, "rz({}) q[{q}];", fmt17(lambda)),
            NativeGate::U1q { q, theta, phi } => writeln!(s, "u1q({},{}) q[{q}];", fmt17(theta), fmt17(phi)),
            NativeGate::ZZ { q1, q2, eta } => writeln!(s, "rzz({}) q[{q1}],q[{q2}];", fmt17(eta)),
            NativeGate::X { q } => writeln!(s, "x q[{q}];"),
            NativeGate::Z { q } => writeln!(s, "z q[{q}];"),
            NativeGate::Splitter(sp) => writeln!(s, "usp({}) q[{}],q[{}];", fmt17(sp.gamma), sp.q1, sp.q2),
        };
    }
    s
}

#[derive(Debug, Error, Clone, PartialEq)]
#[error("line {line}, column {col}: {msg}")]
pub struct QasmError {
    pub line: usize,
    pub col: usize,
    pub msg: String,
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Num(f64),
    Str,
    Punct(char),
    Arrow,
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(text: &str) -> Result<Vec<Token>, QasmError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0, 1, 1);
    let err = |line, col, msg: String| QasmError { line, col, msg };
    while i < chars.len() {
        let ch = chars[i];
        let (l0, c0) = (line, col);
        let adv = |i: &mut usize, n: usize, line: &mut usize, col: &mut usize| {
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
        if ch.is_whitespace() {
            adv(&mut i, 1, &mut line, &mut col);
        } else if ch == '/' && chars.get(i + 1) == Some(&'/') {
            let mut n = 0;
            while i + n < chars.len() && chars[i + n] != '\n' {
                n += 1;
            }
            adv(&mut i, n, &mut line, &mut col);
        } else if ch.is_ascii_alphabetic() || ch == '_' {
            let mut n = 0;
            while i + n < chars.len() && (chars[i + n].is_ascii_alphanumeric() || chars[i + n] == '_') {
                n += 1;
            }
            let word: String = chars[i..i + n].iter().collect();
            out.push(Token { tok: Tok::Ident(word), line: l0, col: c0 });
            adv(&mut i, n, &mut line, &mut col);
        } else if ch.is_ascii_digit() || (ch == '.' && chars.get(i + 1).is_some_and(|c| c.is_ascii_digit())) {
            let mut n = 0;
            while i + n < chars.len() {
                let c = chars[i + n];
                let exp_sign = (c == '+' || c == '-') && n > 0 && matches!(chars[i + n - 1], 'e' | 'E');
                if c.is_ascii_digit() || c == '.' || c == 'e' || c == 'E' || exp_sign {
                    n += 1;
                } else {
                    break;
                }
            }
            let lit: String = chars[i..i + n].iter().collect();
            let v: f64 = lit.parse().map_err(|_| err(l0, c0, format!("bad number `{lit}`")))?;
            out.push(Token { tok: Tok::Num(v), line: l0, col: c0 });
            adv(&mut i, n, &mut line, &mut col);
        } else if ch == '"' {
            let mut n = 1;
            while i + n < chars.len() && chars[i + n] != '"' {
                n += 1;
            }
            if i + n >= chars.len() {
                return Err(err(l0, c0, "unterminated string".into()));
            }
            out.push(Token { tok: Tok::Str, line: l0, col: c0 });
            adv(&mut i, n + 1, &mut line, &mut col);
        } else if ch == '-' && chars.get(i + 1) == Some(&'>') {
            out.push(Token { tok: Tok::Arrow, line: l0, col: c0 });
            adv(&mut i, 2, &mut line, &mut col);
        } else if "()[]{};,+-*/^".contains(ch) {
            out.push(Token { tok: Tok::Punct(ch), line: l0, col: c0 });
            adv(&mut i, 1, &mut line, &mut col);
        } else {
            return Err(err(l0, c0, format!("unexpected character `{ch}`")));
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    end: (usize, usize),
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    fn here(&self) -> (usize, usize) {
        self.toks.get(self.pos).map_or(self.end, |t| (t.line, t.col))
    }

    fn fail<T>(&self, msg: impl Into<String>) -> Result<T, QasmError> {
        let (line, col) = self.here();
        Err(QasmError { line, col, msg: msg.into() })
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|t| t.tok.clone());
        self.pos += 1;
        t
    }

    fn expect(&mut self, c: char) -> Result<(), QasmError> {
        if self.peek() == Some(&Tok::Punct(c)) {
            self.pos += 1;
            Ok(())
        } else {
            self.fail(format!("expected `{c}`"))
        }
    }

    fn ident(&mut self) -> Result<String, QasmError> {
        match self.peek() {
            Some(Tok::Ident(s)) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            _ => self.fail("expected identifier"),
        }
    }

    fn integer(&mut self) -> Result<usize, QasmError> {
        match self.peek() {
            Some(&Tok::Num(v)) if v >= 0.0 && v.fract() == 0.0 && v < 1e9 => {
                self.pos += 1;
                Ok(v as usize)
            }
            _ => self.fail("expected non-negative integer"),
        }
    }

    fn expr(&mut self) -> Result<f64, QasmError> {
        let mut v = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Punct('+')) => {
                    self.pos += 1;
                    v += self.term()?;
                }
                Some(Tok::Punct('-')) => {
                    self.pos += 1;
                    v -= self.term()?;
                }
                _ => return Ok(v),
            }
        }
    }

    fn term(&mut self) -> Result<f64, QasmError> {
        let mut v = self.unary()?;
        loop {
            match self.peek() {
                Some(Tok::Punct('*')) => {
                    self.pos += 1;
                    v *= self.unary()?;
                }
                Some(Tok::Punct('/')) => {
                    self.pos += 1;
                    v /= self.unary()?;
                }
                _ => return Ok(v),
            }
        }
    }

    fn unary(&mut self) -> Result<f64, QasmError> {
        match self.peek() {
            Some(Tok::Punct('-')) => {
                self.pos += 1;
                Ok(-self.unary()?)
            }
            Some(Tok::Punct('+')) => {
                self.pos += 1;
                self.unary()
            }
            _ => self.atom(),
        }
    }

    fn atom(&mut self) -> Result<f64, QasmError> {
        match self.peek().cloned() {
            Some(Tok::Num(v)) => {
                self.pos += 1;
                Ok(v)
            }
            Some(Tok::Ident(s)) if s == "pi" => {
                self.pos += 1;
                Ok(std::f64::consts::PI)
            }
            Some(Tok::Punct('(')) => {
                self.pos += 1;
                let v = self.expr()?;
                self.expect(')')?;
                Ok(v)
            }
            _ => self.fail("expected expression"),
        }
    }

    fn skip_gate_def(&mut self) -> Result<(), QasmError> {
        while self.peek() != Some(&Tok::Punct('{')) {
            if self.next().is_none() {
                return self.fail("unterminated gate definition");
            }
        }
        let mut depth = 0;
        loop {
            match self.next() {
                Some(Tok::Punct('{')) => depth += 1,
                Some(Tok::Punct('}')) => {
                    depth -= 1;
                    if depth == 0 {
                        return Ok(());
                    }
                }
                Some(_) => {}
                None => return self.fail("unterminated gate definition"),
            }
        }
    }

    fn qubit(&mut self, reg: &str) -> Result<usize, QasmError> {
        let name = self.ident()?;
        if name != reg {
            return self.fail(format!("unknown register `{name}`"));
        }
        self.expect('[')?;
        let q = self.integer()?;
        self.expect(']')?;
        Ok(q)
    }
}

pub fn parse_qasm(text: &str) -> Result<Circuit, QasmError> {
    let toks = lex(text)?;
    let last_line = text.lines().count().max(1);
    let last_col = text.lines().last().map_or(1, |l| l.chars().count() + 1);
    let mut p = Parser { toks, pos: 0, end: (last_line, last_col) };

    match (p.next(), p.peek().cloned()) {
        (Some(Tok::Ident(h)), Some(Tok::Num(v))) if h == "OPENQASM" && v == 2.0 => {
            p.pos += 1;
            p.expect(';')?;
        }
        _ => {
            p.pos = 0;
            return p.fail("expected `OPENQASM 2.0;` header");
        }
    }
    let mut circuit: Option<(String, Circuit)> = None;
    while p.peek().is_some() {
        let (line, col) = p.here();
        let word = p.ident()?;
        match word.as_str() {
            "include" => {
                if p.next() != Some(Tok::Str) {
                    p.pos -= 1;
                    return p.fail("expected file name");
                }
                p.expect(';')?;
            }
            "gate" | "opaque" => p.skip_gate_def()?,
            "qreg" => {
                if circuit.is_some() {
                    return p.fail("only one quantum register is supported");
                }
                let name = p.ident()?;
                p.expect('[')?;
                let n = p.integer()?;
                p.expect(']')?;
                p.expect(';')?;
                circuit = Some((name, Circuit::new(n)));
            }
            "creg" | "measure" | "barrier" | "reset" | "if" => {
                return Err(QasmError { line, col, msg: format!("unsupported statement `{word}`") });
            }
            _ => {
                let Some((reg, c)) = circuit.as_mut() else {
                    return Err(QasmError { line, col, msg: "gate before qreg".into() });
                };
                let mut params = Vec::new();
                if p.peek() == Some(&Tok::Punct('(')) {
                    p.pos += 1;
                    if p.peek() != Some(&Tok::Punct(')')) {
                        params.push(p.expr()?);
                        while p.peek() == Some(&Tok::Punct(',')) {
                            p.pos += 1;
                            params.push(p.expr()?);
                        }
                    }
                    p.expect(')')?;
                }
                let mut qs = vec![p.qubit(reg)?];
                while p.peek() == Some(&Tok::Punct(',')) {
                    p.pos += 1;
                    qs.push(p.qubit(reg)?);
                }
                p.expect(';')?;
                let gate = match (word.as_str(), &params[..], &qs[..]) {
                    ("rz", &[lambda], &[q]) => NativeGate::Rz { q, lambda },
                    ("u1q", &[theta, phi], &[q]) => NativeGate::U1q { q, theta, phi },
                    ("rzz", &[eta], &[q1, q2]) => NativeGate::ZZ { q1, q2, eta },
                    ("usp", &[gamma], &[q1, q2]) => NativeGate::Splitter(SplitterGate { q1, q2, gamma }),
                    ("x", &[], &[q]) => NativeGate::X { q },
                    ("z", &[], &[q]) => NativeGate::Z { q },
                    ("rz" | "u1q" | "rzz" | "usp" | "x" | "z", _, _) => {
                        return Err(QasmError { line, col, msg: format!("wrong arguments for `{word}`") })
                    }
                    _ => return Err(QasmError { line, col, msg: format!("unknown gate `{word}`") }),
                };
                c.push(gate).map_err(|e| QasmError { line, col, msg: e.to_string() })?;
            }
        }
    }
    circuit.map(|(_, c)| c).ok_or(QasmError { line: p.end.0, col: p.end.1, msg: "missing qreg".into() })
}
