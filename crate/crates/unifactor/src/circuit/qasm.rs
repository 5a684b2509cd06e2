//! Parser and writer for the OPENQASM 2.0 subset used by the toolchain:
//! one quantum register, `u3`/`u`/`rz`/`cx` statements, `barrier` and
//! `include` lines (ignored), `//` comments, and angle expressions built
//! from literals, `pi`, parentheses, unary minus and `+ - * /`.

use std::fmt;

use super::{Circuit, CircuitError, GateKind, LocatedGate};
use crate::circuit::unitary_to_u3;

/// Parse diagnostic with a 1-based source position.
#[derive(Debug, Clone, PartialEq)]
pub struct QasmError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

impl fmt::Display for QasmError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "qasm parse error at line {}, column {}: {}", self.line, self.col, self.message)
    }
}

impl std::error::Error for QasmError {}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Number(f64),
    Str(String),
    Sym(char),
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
    line: usize,
    col: usize,
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer { src: src.as_bytes(), pos: 0, line: 1, col: 1 }
    }

    fn err(&self, line: usize, col: usize, message: impl Into<String>) -> QasmError {
        QasmError { line, col, message: message.into() }
    }

    fn bump(&mut self) -> Option<u8> {
        let b = self.src.get(self.pos).copied()?;
        self.pos += 1;
        if b == b'\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(b)
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn peek2(&self) -> Option<u8> {
        self.src.get(self.pos + 1).copied()
    }

    fn tokenize(mut self) -> Result<Vec<Spanned>, QasmError> {
        let mut out = Vec::new();
        loop {
            while let Some(b) = self.peek() {
                if b.is_ascii_whitespace() {
                    self.bump();
                } else if b == b'/' && self.peek2() == Some(b'/') {
                    while let Some(b) = self.peek() {
                        if b == b'\n' {
                            break;
                        }
                        self.bump();
                    }
                } else {
                    break;
                }
            }
            let (line, col) = (self.line, self.col);
            let Some(b) = self.peek() else { break };
            match b {
                b'a'..=b'z' | b'A'..=b'Z' | b'_' => {
                    let mut s = String::new();
                    while let Some(b) = self.peek() {
                        if b.is_ascii_alphanumeric() || b == b'_' || b == b'.' {
                            s.push(b as char);
                            self.bump();
                        } else {
                            break;
                        }
                    }
                    out.push(Spanned { tok: Tok::Ident(s), line, col });
                }
                b'0'..=b'9' | b'.' => {
                    let start = self.pos;
                    while let Some(b) = self.peek() {
                        if b.is_ascii_digit() || b == b'.' {
                            self.bump();
                        } else {
                            break;
                        }
                    }
                    if matches!(self.peek(), Some(b'e' | b'E')) {
                        self.bump();
                        if matches!(self.peek(), Some(b'+' | b'-')) {
                            self.bump();
                        }
                        while matches!(self.peek(), Some(b'0'..=b'9')) {
                            self.bump();
                        }
                    }
                    let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                    let value: f64 = text
                        .parse()
                        .map_err(|_| self.err(line, col, format!("invalid number '{text}'")))?;
                    out.push(Spanned { tok: Tok::Number(value), line, col });
                }
                b'"' => {
                    self.bump();
                    let mut s = String::new();
                    loop {
                        match self.bump() {
                            Some(b'"') => break,
                            Some(b) => s.push(b as char),
                            None => return Err(self.err(line, col, "unterminated string")),
                        }
                    }
                    out.push(Spanned { tok: Tok::Str(s), line, col });
                }
                b'(' | b')' | b'[' | b']' | b',' | b';' | b'+' | b'-' | b'*' | b'/' => {
                    self.bump();
                    out.push(Spanned { tok: Tok::Sym(b as char), line, col });
                }
                other => {
                    return Err(self.err(line, col, format!("unexpected character '{}'", other as char)))
                }
            }
        }
        Ok(out)
    }
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
    reg_name: Option<String>,
    reg_size: usize,
}

impl Parser {
    fn err_at(&self, message: impl Into<String>) -> QasmError {
        let (line, col) = self
            .toks
            .get(self.pos)
            .or_else(|| self.toks.last())
            .map(|s| (s.line, s.col))
            .unwrap_or((1, 1));
        QasmError { line, col, message: message.into() }
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|s| &s.tok)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|s| s.tok.clone());
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expect_sym(&mut self, sym: char) -> Result<(), QasmError> {
        match self.next() {
            Some(Tok::Sym(c)) if c == sym => Ok(()),
            other => {
                self.pos = self.pos.saturating_sub(usize::from(other.is_some()));
                Err(self.err_at(format!("expected '{sym}'")))
            }
        }
    }

    fn expect_ident(&mut self) -> Result<String, QasmError> {
        match self.next() {
            Some(Tok::Ident(s)) => Ok(s),
            other => {
                self.pos = self.pos.saturating_sub(usize::from(other.is_some()));
                Err(self.err_at("expected identifier"))
            }
        }
    }

    // expr := term (('+'|'-') term)*
    fn parse_expr(&mut self) -> Result<f64, QasmError> {
        let mut value = self.parse_term()?;
        loop {
            match self.peek() {
                Some(Tok::Sym('+')) => {
                    self.pos += 1;
                    value += self.parse_term()?;
                }
                Some(Tok::Sym('-')) => {
                    self.pos += 1;
                    value -= self.parse_term()?;
                }
                _ => return Ok(value),
            }
        }
    }

    fn parse_term(&mut self) -> Result<f64, QasmError> {
        let mut value = self.parse_factor()?;
        loop {
            match self.peek() {
                Some(Tok::Sym('*')) => {
                    self.pos += 1;
                    value *= self.parse_factor()?;
                }
                Some(Tok::Sym('/')) => {
                    self.pos += 1;
                    let d = self.parse_factor()?;
                    if d == 0.0 {
                        return Err(self.err_at("division by zero in angle expression"));
                    }
                    value /= d;
                }
                _ => return Ok(value),
            }
        }
    }

    fn parse_factor(&mut self) -> Result<f64, QasmError> {
        match self.next() {
            Some(Tok::Sym('-')) => Ok(-self.parse_factor()?),
            Some(Tok::Sym('+')) => self.parse_factor(),
            Some(Tok::Sym('(')) => {
                let v = self.parse_expr()?;
                self.expect_sym(')')?;
                Ok(v)
            }
            Some(Tok::Number(v)) => Ok(v),
            Some(Tok::Ident(name)) if name == "pi" => Ok(std::f64::consts::PI),
            Some(Tok::Ident(name)) => Err(self.err_at(format!("unknown identifier '{name}' in angle expression"))),
            _ => Err(self.err_at("expected angle expression")),
        }
    }

    /// `name[index]` reference into the declared register.
    fn parse_qubit(&mut self) -> Result<usize, QasmError> {
        let name = self.expect_ident()?;
        match &self.reg_name {
            Some(reg) if *reg == name => {}
            Some(reg) => return Err(self.err_at(format!("unknown register '{name}', expected '{reg}'"))),
            None => return Err(self.err_at("qubit used before qreg declaration")),
        }
        self.expect_sym('[')?;
        let idx = match self.next() {
            Some(Tok::Number(v)) if v >= 0.0 && v.fract() == 0.0 => v as usize,
            _ => return Err(self.err_at("expected non-negative integer qubit index")),
        };
        self.expect_sym(']')?;
        if idx >= self.reg_size {
            return Err(self.err_at(format!(
                "qubit index {idx} out of range for register of size {}",
                self.reg_size
            )));
        }
        Ok(idx)
    }

    fn parse_angle_list(&mut self, count: usize) -> Result<Vec<f64>, QasmError> {
        self.expect_sym('(')?;
        let mut out = Vec::with_capacity(count);
        for i in 0..count {
            if i > 0 {
                self.expect_sym(',')?;
            }
            out.push(self.parse_expr()?);
        }
        self.expect_sym(')')?;
        Ok(out)
    }

    fn skip_to_semicolon(&mut self) -> Result<(), QasmError> {
        loop {
            match self.next() {
                Some(Tok::Sym(';')) => return Ok(()),
                Some(_) => continue,
                None => return Err(self.err_at("expected ';'")),
            }
        }
    }
}

/// Parses a QASM program in the supported subset into a circuit.
pub fn parse_qasm(text: &str) -> Result<Circuit, QasmError> {
    let toks = Lexer::new(text).tokenize()?;
    let mut p = Parser { toks, pos: 0, reg_name: None, reg_size: 0 };

    // header: OPENQASM 2.0 ;
    match p.next() {
        Some(Tok::Ident(s)) if s == "OPENQASM" => {}
        _ => {
            p.pos = 0;
            return Err(p.err_at("expected 'OPENQASM 2.0;' header"));
        }
    }
    match p.next() {
        Some(Tok::Number(v)) if v == 2.0 => {}
        _ => return Err(p.err_at("only OPENQASM version 2.0 is supported")),
    }
    p.expect_sym(';')?;

    let mut gates: Vec<LocatedGate> = Vec::new();
    while let Some(tok) = p.peek().cloned() {
        match tok {
            Tok::Ident(word) => {
                p.pos += 1;
                match word.as_str() {
                    "include" => {
                        // standard library include carries nothing we need
                        p.skip_to_semicolon()?;
                    }
                    "qreg" => {
                        if p.reg_name.is_some() {
                            p.pos -= 1;
                            return Err(p.err_at("multiple qreg declarations"));
                        }
                        let name = p.expect_ident()?;
                        p.expect_sym('[')?;
                        let size = match p.next() {
                            Some(Tok::Number(v)) if v >= 1.0 && v.fract() == 0.0 => v as usize,
                            _ => return Err(p.err_at("expected positive register size")),
                        };
                        p.expect_sym(']')?;
                        p.expect_sym(';')?;
                        p.reg_name = Some(name);
                        p.reg_size = size;
                    }
                    "barrier" => {
                        p.skip_to_semicolon()?;
                    }
                    "u3" | "u" => {
                        let angles = p.parse_angle_list(3)?;
                        let q = p.parse_qubit()?;
                        p.expect_sym(';')?;
                        gates.push(LocatedGate::u3(q, angles[0], angles[1], angles[2]));
                    }
                    "rz" => {
                        let angles = p.parse_angle_list(1)?;
                        let q = p.parse_qubit()?;
                        p.expect_sym(';')?;
                        gates.push(LocatedGate::rz(q, angles[0]));
                    }
                    "cx" => {
                        let a = p.parse_qubit()?;
                        p.expect_sym(',')?;
                        let b = p.parse_qubit()?;
                        p.expect_sym(';')?;
                        if a == b {
                            p.pos -= 1;
                            return Err(p.err_at("cx control and target must differ"));
                        }
                        gates.push(LocatedGate::cnot(a, b).expect("validated above"));
                    }
                    other => {
                        p.pos -= 1;
                        return Err(p.err_at(format!("unsupported statement '{other}'")));
                    }
                }
            }
            _ => return Err(p.err_at("expected statement")),
        }
    }

    if p.reg_name.is_none() {
        return Err(QasmError { line: 1, col: 1, message: "missing qreg declaration".into() });
    }
    let mut circuit = Circuit::new(p.reg_size);
    for g in gates {
        circuit.push(g).expect("indices validated during parsing");
    }
    Ok(circuit)
}

/// Serializes a circuit to QASM. Angles are printed with 17 significant
/// digits so parsing the output reproduces the circuit exactly. One-qubit
/// matrix gates are lowered to `u3` (dropping their global phase);
/// multi-qubit matrix gates are an error.
pub fn write_qasm(circuit: &Circuit) -> Result<String, CircuitError> {
    let mut out = String::new();
    out.push_str("OPENQASM 2.0;\ninclude \"qelib1.inc\";\n");
    out.push_str(&format!("qreg q[{}];\n", circuit.num_qubits));
    for g in &circuit.gates {
        match &g.kind {
            GateKind::U3 => out.push_str(&format!(
                "u3({:.16e},{:.16e},{:.16e}) q[{}];\n",
                g.params[0], g.params[1], g.params[2], g.location[0]
            )),
            GateKind::Rz => {
                out.push_str(&format!("rz({:.16e}) q[{}];\n", g.params[0], g.location[0]))
            }
            GateKind::Cnot => {
                out.push_str(&format!("cx q[{}],q[{}];\n", g.location[0], g.location[1]))
            }
            GateKind::ConstantUnitary(m) | GateKind::VariableUnitary(m) => {
                if g.arity() != 1 {
                    return Err(CircuitError::UnloweredUnitaryGate { arity: g.arity() });
                }
                let a = unitary_to_u3(m)?;
                out.push_str(&format!(
                    "u3({:.16e},{:.16e},{:.16e}) q[{}];\n",
                    a.theta, a.phi, a.lambda, g.location[0]
                ));
            }
        }
    }
    Ok(out)
}
