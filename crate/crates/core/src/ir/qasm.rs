//! OpenQASM 2 subset reader and writer.
//!
//! Accepted statements: the `OPENQASM` header, `include` (ignored), a single
//! `qreg` and at most one `creg`, the gates `id x sx h s z rz cx ccx swap`,
//! `measure q[i] -> c[j]`, `barrier` and the `delay(d) q[i]` extension.
//! Layout metadata travels in `// @layout` and `// @final_layout` comments;
//! start times are written as trailing `// t=` comments and ignored on read.

use std::fmt::Write as _;
use std::iter::Peekable;
use std::str::CharIndices;

use thiserror::Error;

use super::circuit::{Circuit, GateKind, Instruction};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QasmError {
    #[error("{line}:{col}: {message}")]
    Syntax { line: usize, col: usize, message: String },
    #[error("{line}:{col}: unknown gate `{name}`")]
    UnknownGate { line: usize, col: usize, name: String },
    #[error("{line}:{col}: index {index} out of range for register `{reg}` of size {size}")]
    IndexOutOfRange {
        line: usize,
        col: usize,
        reg: String,
        index: usize,
        size: usize,
    },
    #[error("{line}:{col}: duplicate qubit operand")]
    DuplicateQubit { line: usize, col: usize },
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Int(u64),
    Real(f64),
    Str(String),
    Sym(char),
    Arrow,
    Pragma(String),
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

struct Lexer<'a> {
    chars: Peekable<CharIndices<'a>>,
    line: usize,
    col: usize,
}

impl<'a> Lexer<'a> {
    fn new(text: &'a str) -> Self {
        Lexer {
            chars: text.char_indices().peekable(),
            line: 1,
            col: 1,
        }
    }

    fn bump(&mut self) -> Option<char> {
        let (_, c) = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn peek(&mut self) -> Option<char> {
        self.chars.peek().map(|&(_, c)| c)
    }

    fn err(&self, message: impl Into<String>) -> QasmError {
        QasmError::Syntax {
            line: self.line,
            col: self.col,
            message: message.into(),
        }
    }

    fn tokens(mut self) -> Result<Vec<Token>, QasmError> {
        let mut out = Vec::new();
        while let Some(c) = self.peek() {
            let (line, col) = (self.line, self.col);
            if c.is_whitespace() {
                self.bump();
                continue;
            }
            let tok = if c == '/' {
                self.bump();
                if self.peek() != Some('/') {
                    Tok::Sym('/')
                } else {
                    let mut comment = String::new();
                    while let Some(c) = self.peek() {
                        if c == '\n' {
                            break;
                        }
                        comment.push(c);
                        self.bump();
                    }
                    match comment.trim_start_matches('/').trim().strip_prefix('@') {
                        Some(p) => Tok::Pragma(p.to_string()),
                        None => continue,
                    }
                }
            } else if c.is_ascii_alphabetic() || c == '_' {
                let mut s = String::new();
                while let Some(c) = self.peek().filter(|c| c.is_ascii_alphanumeric() || *c == '_') {
                    s.push(c);
                    self.bump();
                }
                Tok::Ident(s)
            } else if c.is_ascii_digit() || c == '.' {
                self.number()?
            } else if c == '"' {
                self.bump();
                let mut s = String::new();
                loop {
                    match self.bump() {
                        Some('"') => break,
                        Some(c) => s.push(c),
                        None => return Err(self.err("unterminated string")),
                    }
                }
                Tok::Str(s)
            } else if c == '-' {
                self.bump();
                if self.peek() == Some('>') {
                    self.bump();
                    Tok::Arrow
                } else {
                    Tok::Sym('-')
                }
            } else if "[](),;+*".contains(c) {
                self.bump();
                Tok::Sym(c)
            } else {
                return Err(self.err(format!("unexpected character `{c}`")));
            };
            out.push(Token { tok, line, col });
        }
        Ok(out)
    }

    fn number(&mut self) -> Result<Tok, QasmError> {
        let mut s = String::new();
        let mut real = false;
        while let Some(c) = self.peek() {
            if c.is_ascii_digit() {
                s.push(c);
            } else if c == '.' {
                real = true;
                s.push(c);
            } else if c == 'e' || c == 'E' {
                real = true;
                s.push(c);
                self.bump();
                if let Some(sign) = self.peek().filter(|c| *c == '+' || *c == '-') {
                    s.push(sign);
                } else {
                    continue;
                }
            } else {
                break;
            }
            self.bump();
        }
        if real {
            s.parse().map(Tok::Real).map_err(|_| self.err(format!("bad number `{s}`")))
        } else {
            s.parse().map(Tok::Int).map_err(|_| self.err(format!("bad integer `{s}`")))
        }
    }
}

struct Register {
    name: String,
    size: usize,
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    qreg: Option<Register>,
    creg: Option<Register>,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.toks.get(self.pos)
    }

    fn here(&self) -> (usize, usize) {
        self.peek()
            .or_else(|| self.toks.last())
            .map(|t| (t.line, t.col))
            .unwrap_or((1, 1))
    }

    fn err(&self, message: impl Into<String>) -> QasmError {
        let (line, col) = self.here();
        QasmError::Syntax {
            line,
            col,
            message: message.into(),
        }
    }

    fn next(&mut self) -> Result<Token, QasmError> {
        let t = self.peek().cloned().ok_or_else(|| self.err("unexpected end of input"))?;
        self.pos += 1;
        Ok(t)
    }

    fn eat_sym(&mut self, c: char) -> bool {
        if matches!(self.peek(), Some(Token { tok: Tok::Sym(s), .. }) if *s == c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect_sym(&mut self, c: char) -> Result<(), QasmError> {
        if self.eat_sym(c) {
            Ok(())
        } else {
            Err(self.err(format!("expected `{c}`")))
        }
    }

    fn ident(&mut self) -> Result<String, QasmError> {
        match self.next()?.tok {
            Tok::Ident(s) => Ok(s),
            _ => {
                self.pos -= 1;
                Err(self.err("expected identifier"))
            }
        }
    }

    fn int(&mut self) -> Result<u64, QasmError> {
        match self.next()?.tok {
            Tok::Int(v) => Ok(v),
            _ => {
                self.pos -= 1;
                Err(self.err("expected integer"))
            }
        }
    }

    // expr := term (('+'|'-') term)*
    fn expr(&mut self) -> Result<f64, QasmError> {
        let mut v = self.term()?;
        loop {
            if self.eat_sym('+') {
                v += self.term()?;
            } else if self.eat_sym('-') {
                v -= self.term()?;
            } else {
                return Ok(v);
            }
        }
    }

    fn term(&mut self) -> Result<f64, QasmError> {
        let mut v = self.factor()?;
        loop {
            if self.eat_sym('*') {
                v *= self.factor()?;
            } else if self.eat_sym('/') {
                let d = self.factor()?;
                if d == 0.0 {
                    return Err(self.err("division by zero"));
                }
                v /= d;
            } else {
                return Ok(v);
            }
        }
    }

    fn factor(&mut self) -> Result<f64, QasmError> {
        if self.eat_sym('-') {
            return Ok(-self.factor()?);
        }
        if self.eat_sym('+') {
            return self.factor();
        }
        if self.eat_sym('(') {
            let v = self.expr()?;
            self.expect_sym(')')?;
            return Ok(v);
        }
        match self.next()?.tok {
            Tok::Int(v) => Ok(v as f64),
            Tok::Real(v) => Ok(v),
            Tok::Ident(s) if s == "pi" => Ok(std::f64::consts::PI),
            _ => {
                self.pos -= 1;
                Err(self.err("expected angle expression"))
            }
        }
    }

    /// `name[idx]` or a bare register name (expanded to every index).
    fn operand(&mut self, quantum: bool) -> Result<Vec<usize>, QasmError> {
        let (line, col) = self.here();
        let name = self.ident()?;
        let reg = if quantum { &self.qreg } else { &self.creg };
        let Some(reg) = reg.as_ref().filter(|r| r.name == name) else {
            return Err(QasmError::Syntax {
                line,
                col,
                message: format!("undeclared register `{name}`"),
            });
        };
        let size = reg.size;
        if !self.eat_sym('[') {
            return Ok((0..size).collect());
        }
        let index = self.int()? as usize;
        self.expect_sym(']')?;
        if index >= size {
            return Err(QasmError::IndexOutOfRange {
                line,
                col,
                reg: name,
                index,
                size,
            });
        }
        Ok(vec![index])
    }

    fn single(&mut self, quantum: bool) -> Result<usize, QasmError> {
        let ops = self.operand(quantum)?;
        if ops.len() != 1 {
            return Err(self.err("expected an indexed operand"));
        }
        Ok(ops[0])
    }

    fn register(&mut self) -> Result<Register, QasmError> {
        let name = self.ident()?;
        self.expect_sym('[')?;
        let size = self.int()? as usize;
        self.expect_sym(']')?;
        self.expect_sym(';')?;
        Ok(Register { name, size })
    }

    fn layout(&self, body: &str) -> Result<Vec<usize>, QasmError> {
        body.split(|c: char| c == ',' || c.is_whitespace())
            .filter(|s| !s.is_empty())
            .map(|s| s.parse().map_err(|_| self.err(format!("bad layout entry `{s}`"))))
            .collect()
    }

    fn parse(mut self) -> Result<Circuit, QasmError> {
        let mut insts = Vec::new();
        let mut layout = None;
        let mut final_layout = None;
        while let Some(tok) = self.peek().cloned() {
            let (line, col) = (tok.line, tok.col);
            let word = match tok.tok {
                Tok::Pragma(p) => {
                    self.pos += 1;
                    if let Some(rest) = p.strip_prefix("final_layout") {
                        final_layout = Some(self.layout(rest)?);
                    } else if let Some(rest) = p.strip_prefix("layout") {
                        layout = Some(self.layout(rest)?);
                    }
                    continue;
                }
                Tok::Ident(w) => w,
                _ => return Err(self.err("expected statement")),
            };
            self.pos += 1;
            match word.as_str() {
                "OPENQASM" => {
                    self.next()?;
                    self.expect_sym(';')?;
                }
                "include" => {
                    match self.next()?.tok {
                        Tok::Str(_) => {}
                        _ => return Err(self.err("expected include path")),
                    }
                    self.expect_sym(';')?;
                }
                "qreg" | "creg" => {
                    let reg = self.register()?;
                    let slot = if word == "qreg" { &mut self.qreg } else { &mut self.creg };
                    if slot.is_some() {
                        return Err(QasmError::Syntax {
                            line,
                            col,
                            message: format!("only one {word} is supported"),
                        });
                    }
                    *slot = Some(reg);
                }
                "measure" => {
                    let q = self.single(true)?;
                    if self.next()?.tok != Tok::Arrow {
                        self.pos -= 1;
                        return Err(self.err("expected `->`"));
                    }
                    let c = self.single(false)?;
                    self.expect_sym(';')?;
                    insts.push(Instruction::measure(q, c));
                }
                "barrier" => {
                    let mut qs = self.operand(true)?;
                    while self.eat_sym(',') {
                        qs.extend(self.operand(true)?);
                    }
                    self.expect_sym(';')?;
                    qs.dedup();
                    insts.push(Instruction::barrier(&qs));
                }
                "delay" => {
                    self.expect_sym('(')?;
                    let d = self.int()?;
                    self.expect_sym(')')?;
                    let q = self.single(true)?;
                    self.expect_sym(';')?;
                    insts.push(Instruction::delay(d, q));
                }
                name => {
                    let kind = GateKind::from_name(name)
                        .filter(|k| !k.is_directive())
                        .ok_or_else(|| QasmError::UnknownGate {
                            line,
                            col,
                            name: name.to_string(),
                        })?;
                    let param = if self.eat_sym('(') {
                        let v = self.expr()?;
                        self.expect_sym(')')?;
                        Some(v)
                    } else {
                        None
                    };
                    if (kind == GateKind::RZ) != param.is_some() {
                        return Err(QasmError::Syntax {
                            line,
                            col,
                            message: format!("gate `{name}` parameter mismatch"),
                        });
                    }
                    let mut qs = vec![self.single(true)?];
                    while self.eat_sym(',') {
                        qs.push(self.single(true)?);
                    }
                    self.expect_sym(';')?;
                    let arity = kind.arity().unwrap_or(qs.len());
                    if qs.len() != arity {
                        return Err(QasmError::Syntax {
                            line,
                            col,
                            message: format!("gate `{name}` takes {arity} operands, got {}", qs.len()),
                        });
                    }
                    for i in 1..qs.len() {
                        if qs[..i].contains(&qs[i]) {
                            return Err(QasmError::DuplicateQubit { line, col });
                        }
                    }
                    insts.push(match param {
                        Some(theta) => Instruction::rz(theta, qs[0]),
                        None => Instruction::gate(kind, &qs),
                    });
                }
            }
        }
        let num_qubits = self.qreg.as_ref().map_or(0, |r| r.size);
        let num_clbits = self.creg.as_ref().map_or(0, |r| r.size);
        let mut circuit = Circuit::new(num_qubits, num_clbits);
        circuit.instructions = insts;
        circuit.layout = layout;
        circuit.final_layout = final_layout;
        Ok(circuit)
    }
}

/// Parse a circuit from the supported OpenQASM subset.
pub fn parse_qasm(text: &str) -> Result<Circuit, QasmError> {
    let toks = Lexer::new(text).tokens()?;
    Parser {
        toks,
        pos: 0,
        qreg: None,
        creg: None,
    }
    .parse()
}

fn join(xs: &[usize]) -> String {
    xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

/// Serialize a circuit; `parse_qasm` of the output reproduces the operations.
pub fn emit_qasm(c: &Circuit) -> String {
    let mut out = String::from("OPENQASM 2.0;\ninclude \"qelib1.inc\";\n");
    if let Some(l) = &c.layout {
        let _ = writeln!(out, "// @layout {}", join(l));
    }
    if let Some(l) = &c.final_layout {
        let _ = writeln!(out, "// @final_layout {}", join(l));
    }
    let _ = writeln!(out, "qreg q[{}];", c.num_qubits);
    if c.num_clbits > 0 {
        let _ = writeln!(out, "creg c[{}];", c.num_clbits);
    }
    for inst in &c.instructions {
        let qs = inst
            .qubits
            .iter()
            .map(|q| format!("q[{q}]"))
            .collect::<Vec<_>>()
            .join(",");
        match inst.kind {
            GateKind::Measure => {
                let _ = write!(out, "measure {qs} -> c[{}];", inst.clbit.unwrap_or_default());
            }
            GateKind::Delay => {
                let _ = write!(out, "delay({}) {qs};", inst.duration.unwrap_or_default());
            }
            GateKind::RZ => {
                let _ = write!(out, "rz({:?}) {qs};", inst.param.unwrap_or_default());
            }
            kind => {
                let _ = write!(out, "{} {qs};", kind.name());
            }
        }
        if let Some(t) = inst.start_time {
            let _ = write!(out, " // t={t}");
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn minimal_program() {
        let c = parse_qasm("qreg q[1]; x q[0];").unwrap();
        assert_eq!(c.num_qubits, 1);
        assert_eq!(c.instructions, vec![Instruction::gate(GateKind::X, &[0])]);
    }

    #[test]
    fn literal_angle() {
        let c = parse_qasm("qreg q[1]; rz(pi/3) q[0];").unwrap();
        assert_eq!(c.instructions[0].kind, GateKind::RZ);
        assert!((c.instructions[0].param.unwrap() - PI / 3.0).abs() < 1e-15);
    }

    #[test]
    fn angles_reduced() {
        let c = parse_qasm("qreg q[1]; rz(-pi/2) q[0]; rz(2*pi + 0.5) q[0]; rz(1.5e0) q[0];").unwrap();
        assert!((c.instructions[0].param.unwrap() - 1.5 * PI).abs() < 1e-15);
        assert!((c.instructions[1].param.unwrap() - 0.5).abs() < 1e-12);
        assert_eq!(c.instructions[2].param, Some(1.5));
    }

    #[test]
    fn duplicate_operand_error() {
        let err = parse_qasm("qreg q[2];\ncx q[0],q[0];").unwrap_err();
        assert_eq!(err, QasmError::DuplicateQubit { line: 2, col: 1 });
    }

    #[test]
    fn unknown_gate_and_range_errors() {
        assert!(matches!(
            parse_qasm("qreg q[2];\n  u3(0,0,0) q[0];"),
            Err(QasmError::UnknownGate { line: 2, col: 3, .. })
        ));
        assert!(matches!(
            parse_qasm("qreg q[2]; x q[2];"),
            Err(QasmError::IndexOutOfRange { index: 2, size: 2, .. })
        ));
        assert!(matches!(parse_qasm("qreg q[2]; x q[0]"), Err(QasmError::Syntax { .. })));
    }

    #[test]
    fn header_and_measure() {
        let text = "OPENQASM 2.0;\ninclude \"qelib1.inc\";\nqreg q[2];\ncreg c[2];\nh q[0];\ncx q[0],q[1];\nbarrier q;\nmeasure q[0] -> c[1];\n";
        let c = parse_qasm(text).unwrap();
        assert_eq!(c.num_clbits, 2);
        assert_eq!(c.instructions[2].qubits, vec![0, 1]);
        assert_eq!(c.instructions[3], Instruction::measure(0, 1));
    }

    #[test]
    fn round_trip_simple() {
        let mut c = Circuit::new(2, 0);
        c.h(0).cx(0, 1);
        let back = parse_qasm(&emit_qasm(&c)).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn empty_circuit_is_header_only() {
        let text = emit_qasm(&Circuit::new(0, 0));
        assert_eq!(text, "OPENQASM 2.0;\ninclude \"qelib1.inc\";\nqreg q[0];\n");
        assert_eq!(parse_qasm(&text).unwrap(), Circuit::new(0, 0));
    }

    #[test]
    fn start_times_are_comments() {
        let mut c = Circuit::new(1, 1);
        c.x(0).measure(0, 0);
        c.instructions[0].start_time = Some(0);
        c.instructions[0].duration = Some(1);
        c.instructions[1].start_time = Some(1);
        c.layout = Some(vec![3]);
        let text = emit_qasm(&c);
        assert!(text.contains("x q[0]; // t=0"));
        let back = parse_qasm(&text).unwrap();
        assert!(back.same_operations(&c));
        assert!(back.instructions.iter().all(|i| i.start_time.is_none()));
        assert_eq!(back.layout, Some(vec![3]));
    }
}
