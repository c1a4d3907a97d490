use std::f64::consts::PI;
use std::fmt;

use thiserror::Error;

use super::{Circuit, Gate, GateKind, INPUTS_PRAGMA};

#[derive(Debug, Clone, PartialEq, Error)]
#[error("{line}:{column}: {kind}")]
pub struct QasmError {
    pub line: usize,
    pub column: usize,
    pub kind: QasmErrorKind,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QasmErrorKind {
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("unknown gate `{0}`")]
    UnknownGate(String),
    #[error("qubit index {index} out of range for register of size {size}")]
    OperandOutOfRange { index: usize, size: usize },
    #[error("duplicate operand q[{0}]")]
    DuplicateOperand(usize),
    #[error("missing `// qucat inputs:` pragma")]
    MissingInputsPragma,
    #[error("measurement before a gate: gates may not follow a measure statement")]
    MeasurementBeforeGate,
    #[error("{0}")]
    Semantic(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Pos {
    line: usize,
    column: usize,
}

impl Pos {
    fn error(self, kind: QasmErrorKind) -> QasmError {
        QasmError {
            line: self.line,
            column: self.column,
            kind,
        }
    }

    fn syntax(self, msg: impl Into<String>) -> QasmError {
        self.error(QasmErrorKind::Syntax(msg.into()))
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Number(String),
    Str(String),
    Semi,
    Comma,
    LBracket,
    RBracket,
    LParen,
    RParen,
    Arrow,
    Plus,
    Minus,
    Star,
    Slash,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Number(s) => write!(f, "number `{s}`"),
            Tok::Str(s) => write!(f, "string \"{s}\""),
            Tok::Semi => f.write_str("`;`"),
            Tok::Comma => f.write_str("`,`"),
            Tok::LBracket => f.write_str("`[`"),
            Tok::RBracket => f.write_str("`]`"),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::Arrow => f.write_str("`->`"),
            Tok::Plus => f.write_str("`+`"),
            Tok::Minus => f.write_str("`-`"),
            Tok::Star => f.write_str("`*`"),
            Tok::Slash => f.write_str("`/`"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

#[derive(Debug)]
struct Pragma {
    pos: Pos,
    inputs: Vec<(usize, Pos)>,
}

struct Lexer<'a> {
    chars: std::iter::Peekable<std::str::CharIndices<'a>>,
    src: &'a str,
    line: usize,
    column: usize,
    pragmas: Vec<Pragma>,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer {
            chars: src.char_indices().peekable(),
            src,
            line: 1,
            column: 1,
            pragmas: Vec::new(),
        }
    }

    fn pos(&self) -> Pos {
        Pos {
            line: self.line,
            column: self.column,
        }
    }

    fn bump(&mut self) -> Option<char> {
        let (_, c) = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn peek(&mut self) -> Option<char> {
        self.chars.peek().map(|&(_, c)| c)
    }

    fn offset(&mut self) -> usize {
        self.chars.peek().map_or(self.src.len(), |&(i, _)| i)
    }

    fn tokenize(mut self) -> Result<(Vec<(Tok, Pos)>, Vec<Pragma>), QasmError> {
        let mut toks = Vec::new();
        loop {
            let pos = self.pos();
            let Some(c) = self.peek() else {
                toks.push((Tok::Eof, pos));
                break;
            };
            match c {
                c if c.is_whitespace() => {
                    self.bump();
                }
                '/' => {
                    let start = self.offset();
                    self.bump();
                    if self.peek() == Some('/') {
                        while self.peek().is_some_and(|c| c != '\n') {
                            self.bump();
                        }
                        let end = self.offset();
                        self.comment(&self.src[start..end], pos)?;
                    } else {
                        toks.push((Tok::Slash, pos));
                    }
                }
                '-' => {
                    self.bump();
                    if self.peek() == Some('>') {
                        self.bump();
                        toks.push((Tok::Arrow, pos));
                    } else {
                        toks.push((Tok::Minus, pos));
                    }
                }
                '"' => {
                    self.bump();
                    let start = self.offset();
                    while self.peek().is_some_and(|c| c != '"' && c != '\n') {
                        self.bump();
                    }
                    let end = self.offset();
                    if self.bump() != Some('"') {
                        return Err(pos.syntax("unterminated string literal"));
                    }
                    toks.push((Tok::Str(self.src[start..end].to_string()), pos));
                }
                c if c.is_ascii_alphabetic() || c == '_' => {
                    let start = self.offset();
                    while self
                        .peek()
                        .is_some_and(|c| c.is_ascii_alphanumeric() || c == '_')
                    {
                        self.bump();
                    }
                    let end = self.offset();
                    toks.push((Tok::Ident(self.src[start..end].to_string()), pos));
                }
                c if c.is_ascii_digit() || c == '.' => {
                    let text = self.number(pos)?;
                    toks.push((Tok::Number(text), pos));
                }
                _ => {
                    self.bump();
                    let tok = match c {
                        ';' => Tok::Semi,
                        ',' => Tok::Comma,
                        '[' => Tok::LBracket,
                        ']' => Tok::RBracket,
                        '(' => Tok::LParen,
                        ')' => Tok::RParen,
                        '+' => Tok::Plus,
                        '*' => Tok::Star,
                        other => return Err(pos.syntax(format!("unexpected character `{other}`"))),
                    };
                    toks.push((tok, pos));
                }
            }
        }
        Ok((toks, self.pragmas))
    }

    fn number(&mut self, pos: Pos) -> Result<String, QasmError> {
        let start = self.offset();
        let mut digits = 0;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.bump();
            digits += 1;
        }
        if self.peek() == Some('.') {
            self.bump();
            while self.peek().is_some_and(|c| c.is_ascii_digit()) {
                self.bump();
                digits += 1;
            }
        }
        if digits == 0 {
            return Err(pos.syntax("malformed number"));
        }
        if matches!(self.peek(), Some('e' | 'E')) {
            self.bump();
            if matches!(self.peek(), Some('+' | '-')) {
                self.bump();
            }
            let mut exp_digits = 0;
            while self.peek().is_some_and(|c| c.is_ascii_digit()) {
                self.bump();
                exp_digits += 1;
            }
            if exp_digits == 0 {
                return Err(pos.syntax("malformed exponent"));
            }
        }
        let end = self.offset();
        Ok(self.src[start..end].to_string())
    }

    fn comment(&mut self, text: &str, pos: Pos) -> Result<(), QasmError> {
        let trimmed = text.trim_end();
        if !trimmed.starts_with(INPUTS_PRAGMA.trim_end()) {
            return Ok(());
        }
        let Some(list) = trimmed.strip_prefix(INPUTS_PRAGMA) else {
            let col = pos.column + INPUTS_PRAGMA.len() - 1;
            return Err(Pos { column: col, ..pos }
                .syntax("inputs pragma needs exactly one space after the colon"));
        };
        let mut inputs = Vec::new();
        let mut column = pos.column + INPUTS_PRAGMA.len();
        for item in list.split(',') {
            let at = Pos { column, ..pos };
            if item.is_empty() || !item.bytes().all(|b| b.is_ascii_digit()) {
                return Err(at.syntax(format!(
                    "inputs pragma expects comma-separated qubit indices, found `{item}`"
                )));
            }
            let index = item
                .parse::<usize>()
                .map_err(|_| at.syntax(format!("qubit index `{item}` too large")))?;
            inputs.push((index, at));
            column += item.len() + 1;
        }
        self.pragmas.push(Pragma { pos, inputs });
        Ok(())
    }
}

struct Parser {
    toks: Vec<(Tok, Pos)>,
    at: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> Pos {
        self.toks[self.at].1
    }

    fn next(&mut self) -> (Tok, Pos) {
        let item = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        item
    }

    fn expect(&mut self, want: Tok) -> Result<Pos, QasmError> {
        let (tok, pos) = self.next();
        if tok == want {
            Ok(pos)
        } else {
            Err(pos.syntax(format!("expected {want}, found {tok}")))
        }
    }

    fn ident(&mut self) -> Result<(String, Pos), QasmError> {
        match self.next() {
            (Tok::Ident(s), pos) => Ok((s, pos)),
            (tok, pos) => Err(pos.syntax(format!("expected identifier, found {tok}"))),
        }
    }

    fn integer(&mut self) -> Result<(usize, Pos), QasmError> {
        match self.next() {
            (Tok::Number(s), pos) => s
                .parse::<usize>()
                .map(|v| (v, pos))
                .map_err(|_| pos.syntax(format!("expected non-negative integer, found `{s}`"))),
            (tok, pos) => Err(pos.syntax(format!("expected integer, found {tok}"))),
        }
    }

    /// `name[index]`, returning the register name, the index and its position.
    fn indexed(&mut self) -> Result<(String, usize, Pos), QasmError> {
        let (name, pos) = self.ident()?;
        self.expect(Tok::LBracket)?;
        let (index, _) = self.integer()?;
        self.expect(Tok::RBracket)?;
        Ok((name, index, pos))
    }

    fn expr(&mut self) -> Result<f64, QasmError> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.next();
                    acc += self.term()?;
                }
                Tok::Minus => {
                    self.next();
                    acc -= self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<f64, QasmError> {
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                Tok::Star => {
                    self.next();
                    acc *= self.factor()?;
                }
                Tok::Slash => {
                    self.next();
                    acc /= self.factor()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn factor(&mut self) -> Result<f64, QasmError> {
        match self.next() {
            (Tok::Minus, _) => Ok(-self.factor()?),
            (Tok::Plus, _) => self.factor(),
            (Tok::Number(s), pos) => s
                .parse::<f64>()
                .map_err(|_| pos.syntax(format!("malformed number `{s}`"))),
            (Tok::Ident(s), _) if s == "pi" => Ok(PI),
            (Tok::LParen, _) => {
                let v = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(v)
            }
            (tok, pos) => Err(pos.syntax(format!("expected angle expression, found {tok}"))),
        }
    }
}

struct Register {
    name: String,
    size: usize,
}

/// Parses QASM-subset source into a [`Circuit`].
///
/// Gate order is source order; the `qreg` size becomes `num_qubits`; the
/// measured qubits, ordered by classical bit index, become `output_qubits`;
/// the inputs pragma gives `input_qubits`.
pub fn parse_circuit(text: &str) -> Result<Circuit, QasmError> {
    let (toks, pragmas) = Lexer::new(text).tokenize()?;
    let mut p = Parser { toks, at: 0 };

    let mut qreg: Option<Register> = None;
    let mut creg: Option<Register> = None;
    let mut gates = Vec::new();
    // (classical bit, qubit)
    let mut measures: Vec<(usize, usize)> = Vec::new();
    let mut first_statement = true;

    while *p.peek() != Tok::Eof {
        let (word, pos) = p.ident()?;
        let header = first_statement;
        first_statement = false;
        match word.as_str() {
            "OPENQASM" => {
                if !header {
                    return Err(pos.syntax("OPENQASM header must be the first statement"));
                }
                match p.next() {
                    (Tok::Number(v), _) if v == "2.0" => {}
                    (tok, vpos) => {
                        return Err(
                            vpos.syntax(format!("only OPENQASM 2.0 is supported, found {tok}"))
                        )
                    }
                }
                p.expect(Tok::Semi)?;
            }
            "include" => {
                match p.next() {
                    (Tok::Str(_), _) => {}
                    (tok, tpos) => {
                        return Err(tpos.syntax(format!("expected file name, found {tok}")))
                    }
                }
                p.expect(Tok::Semi)?;
            }
            "qreg" | "creg" => {
                let (name, size, size_pos) = p.indexed()?;
                p.expect(Tok::Semi)?;
                let slot = if word == "qreg" { &mut qreg } else { &mut creg };
                if slot.is_some() {
                    return Err(pos.error(QasmErrorKind::Semantic(format!(
                        "only one {word} declaration is supported"
                    ))));
                }
                if size == 0 {
                    return Err(size_pos.error(QasmErrorKind::Semantic(format!(
                        "{word} must have positive size"
                    ))));
                }
                *slot = Some(Register { name, size });
            }
            "measure" => {
                let q = qreg.as_ref().ok_or_else(|| {
                    pos.error(QasmErrorKind::Semantic("measure before qreg".into()))
                })?;
                let (qname, qubit, qpos) = p.indexed()?;
                check_register(q, &qname, qubit, qpos)?;
                p.expect(Tok::Arrow)?;
                let c = creg.as_ref().ok_or_else(|| {
                    pos.error(QasmErrorKind::Semantic("measure before creg".into()))
                })?;
                let (cname, bit, cpos) = p.indexed()?;
                check_register(c, &cname, bit, cpos)?;
                p.expect(Tok::Semi)?;
                if measures.iter().any(|&(_, mq)| mq == qubit) {
                    return Err(qpos.error(QasmErrorKind::Semantic(format!(
                        "qubit q[{qubit}] measured twice"
                    ))));
                }
                if measures.iter().any(|&(mb, _)| mb == bit) {
                    return Err(cpos.error(QasmErrorKind::Semantic(format!(
                        "classical bit {cname}[{bit}] written twice"
                    ))));
                }
                measures.push((bit, qubit));
            }
            name => {
                let kind = GateKind::from_qasm_name(name)
                    .ok_or_else(|| pos.error(QasmErrorKind::UnknownGate(name.to_string())))?;
                if !measures.is_empty() {
                    return Err(pos.error(QasmErrorKind::MeasurementBeforeGate));
                }
                let q = qreg
                    .as_ref()
                    .ok_or_else(|| pos.error(QasmErrorKind::Semantic("gate before qreg".into())))?;
                let angle = if *p.peek() == Tok::LParen {
                    let lpos = p.pos();
                    p.next();
                    let v = p.expr()?;
                    p.expect(Tok::RParen)?;
                    if !kind.is_rotation() {
                        return Err(lpos.syntax(format!("gate `{kind}` takes no parameter")));
                    }
                    if !v.is_finite() {
                        return Err(lpos.syntax("angle is not finite"));
                    }
                    Some(v)
                } else if kind.is_rotation() {
                    return Err(p.pos().syntax(format!("gate `{kind}` requires an angle")));
                } else {
                    None
                };
                let mut operands: Vec<usize> = Vec::with_capacity(kind.arity());
                loop {
                    let (rname, index, ipos) = p.indexed()?;
                    check_register(q, &rname, index, ipos)?;
                    if operands.contains(&index) {
                        return Err(ipos.error(QasmErrorKind::DuplicateOperand(index)));
                    }
                    operands.push(index);
                    if *p.peek() == Tok::Comma {
                        p.next();
                    } else {
                        break;
                    }
                }
                let end = p.expect(Tok::Semi)?;
                if operands.len() != kind.arity() {
                    return Err(end.syntax(format!(
                        "gate `{kind}` takes {} operand(s), found {}",
                        kind.arity(),
                        operands.len()
                    )));
                }
                gates.push(Gate {
                    kind,
                    operands,
                    angle,
                });
            }
        }
    }
    let eof = p.pos();

    let qreg =
        qreg.ok_or_else(|| eof.error(QasmErrorKind::Semantic("missing qreg declaration".into())))?;
    let mut pragmas = pragmas.into_iter();
    let pragma = pragmas
        .next()
        .ok_or_else(|| eof.error(QasmErrorKind::MissingInputsPragma))?;
    if let Some(extra) = pragmas.next() {
        return Err(extra.pos.error(QasmErrorKind::Semantic(
            "inputs pragma given more than once".into(),
        )));
    }
    let mut input_qubits = Vec::with_capacity(pragma.inputs.len());
    for (index, pos) in pragma.inputs {
        if index >= qreg.size {
            return Err(pos.error(QasmErrorKind::OperandOutOfRange {
                index,
                size: qreg.size,
            }));
        }
        if input_qubits.contains(&index) {
            return Err(pos.error(QasmErrorKind::Semantic(format!(
                "input qubit {index} listed twice"
            ))));
        }
        input_qubits.push(index);
    }
    if measures.is_empty() {
        return Err(eof.error(QasmErrorKind::Semantic(
            "no measure statements: output qubits are empty".into(),
        )));
    }
    measures.sort_unstable();
    Ok(Circuit {
        num_qubits: qreg.size,
        gates,
        input_qubits,
        output_qubits: measures.into_iter().map(|(_, q)| q).collect(),
    })
}

fn check_register(reg: &Register, name: &str, index: usize, pos: Pos) -> Result<(), QasmError> {
    if reg.name != name {
        return Err(pos.error(QasmErrorKind::Semantic(format!(
            "unknown register `{name}` (expected `{}`)",
            reg.name
        ))));
    }
    if index >= reg.size {
        return Err(pos.error(QasmErrorKind::OperandOutOfRange {
            index,
            size: reg.size,
        }));
    }
    Ok(())
}
