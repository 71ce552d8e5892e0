use std::collections::HashSet;
use std::fmt;

use thiserror::Error;

use super::{ActionPlan, AgentQueue, Destination, DestinationError};
use crate::scene::{AgentId, ObjectId};

/// A token class the parser was prepared to accept.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Expected {
    AgentId,
    ObjectId,
    Flag,
    Number,
    LBrace,
    RBrace,
    LParen,
    RParen,
    Comma,
    Period,
    End,
}

impl fmt::Display for Expected {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Expected::AgentId => "agent id",
            Expected::ObjectId => "object id",
            Expected::Flag => "T or F",
            Expected::Number => "number",
            Expected::LBrace => "`{`",
            Expected::RBrace => "`}`",
            Expected::LParen => "`(`",
            Expected::RParen => "`)`",
            Expected::Comma => "`,`",
            Expected::Period => "`.`",
            Expected::End => "end of input",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseErrorKind {
    #[error("expected {}, found {found}", join_expected(.expected))]
    Syntax {
        expected: Vec<Expected>,
        found: String,
    },
    #[error("agent {0} appears more than once")]
    DuplicateAgent(AgentId),
    #[error("agent {agent}, destination {object}: {reason}")]
    InvalidDestination {
        agent: AgentId,
        object: ObjectId,
        reason: DestinationError,
    },
}

fn join_expected(expected: &[Expected]) -> String {
    let parts: Vec<String> = expected.iter().map(|e| e.to_string()).collect();
    match parts.len() {
        0 => "nothing".to_owned(),
        1 => parts[0].clone(),
        _ => format!("one of {}", parts.join(", ")),
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("at byte {offset}: {kind}")]
pub struct ParseError {
    /// Byte offset of the offending token.
    pub offset: usize,
    pub kind: ParseErrorKind,
}

impl ParseError {
    pub fn expected(&self) -> &[Expected] {
        match &self.kind {
            ParseErrorKind::Syntax { expected, .. } => expected,
            _ => &[],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Agent(String),
    Object(String),
    Flag(bool),
    Number(f64),
    LBrace,
    RBrace,
    LParen,
    RParen,
    Comma,
    Period,
    /// A word or number-like run that is not a valid token.
    Junk(String),
    /// A single unexpected byte.
    Byte(u8),
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Agent(s) | Tok::Object(s) | Tok::Junk(s) => format!("`{s}`"),
            Tok::Flag(b) => format!("`{}`", if *b { 'T' } else { 'F' }),
            Tok::Number(n) => format!("number {n}"),
            Tok::LBrace => "`{`".into(),
            Tok::RBrace => "`}`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Period => "`.`".into(),
            Tok::Byte(b) if b.is_ascii_graphic() => format!("`{}`", *b as char),
            Tok::Byte(b) => format!("byte 0x{b:02x}"),
            Tok::End => "end of input".into(),
        }
    }
}

fn is_word_byte(b: u8) -> bool {
    b.is_ascii_alphanumeric() || b == b'_'
}

fn classify_word(word: &str) -> Tok {
    let digits_ok = |d: &str| !d.is_empty() && d.bytes().all(|b| b.is_ascii_digit());
    match word {
        "T" => Tok::Flag(true),
        "F" => Tok::Flag(false),
        _ => {
            if let Some(d) = word.strip_prefix("Obj_") {
                if digits_ok(d) {
                    return Tok::Object(word.to_owned());
                }
            } else if let Some(d) = word.strip_prefix("A_") {
                if digits_ok(d) {
                    return Tok::Agent(word.to_owned());
                }
            }
            Tok::Junk(word.to_owned())
        }
    }
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn run(&mut self, pred: impl Fn(u8) -> bool) -> usize {
        let start = self.pos;
        while self.pos < self.src.len() && pred(self.src[self.pos]) {
            self.pos += 1;
        }
        self.pos - start
    }

    /// Next token and its starting byte offset.
    fn next(&mut self) -> (Tok, usize) {
        self.skip_ws();
        let start = self.pos;
        let Some(&b) = self.src.get(self.pos) else {
            return (Tok::End, start);
        };
        let tok = match b {
            b'{' => Tok::LBrace,
            b'}' => Tok::RBrace,
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b',' => Tok::Comma,
            b'.' => Tok::Period,
            b'0'..=b'9' => {
                self.run(|c| c.is_ascii_digit());
                if self.src.get(self.pos) == Some(&b'.')
                    && self.src.get(self.pos + 1).is_some_and(u8::is_ascii_digit)
                {
                    self.pos += 1;
                    self.run(|c| c.is_ascii_digit());
                }
                if self.src.get(self.pos).is_some_and(|&c| is_word_byte(c)) {
                    self.run(is_word_byte);
                    let text = String::from_utf8_lossy(&self.src[start..self.pos]).into_owned();
                    return (Tok::Junk(text), start);
                }
                // Only ASCII digits and '.' were consumed.
                let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap_or("0");
                return (Tok::Number(text.parse().unwrap_or(f64::INFINITY)), start);
            }
            c if is_word_byte(c) => {
                self.run(is_word_byte);
                let word = std::str::from_utf8(&self.src[start..self.pos]).unwrap_or("");
                return (classify_word(word), start);
            }
            other => Tok::Byte(other),
        };
        self.pos += 1;
        (tok, start)
    }
}

struct Parser<'a> {
    lexer: Lexer<'a>,
    tok: Tok,
    offset: usize,
}

type PResult<T> = Result<T, ParseError>;

impl<'a> Parser<'a> {
    fn new(src: &'a [u8]) -> Self {
        let mut lexer = Lexer { src, pos: 0 };
        let (tok, offset) = lexer.next();
        Self { lexer, tok, offset }
    }

    fn bump(&mut self) -> Tok {
        let (next, offset) = self.lexer.next();
        self.offset = offset;
        std::mem::replace(&mut self.tok, next)
    }

    fn error(&self, expected: &[Expected]) -> ParseError {
        ParseError {
            offset: self.offset,
            kind: ParseErrorKind::Syntax {
                expected: expected.to_vec(),
                found: self.tok.describe(),
            },
        }
    }

    fn expect(&mut self, want: Tok, label: Expected) -> PResult<()> {
        if self.tok == want {
            self.bump();
            Ok(())
        } else {
            Err(self.error(&[label]))
        }
    }

    fn flag(&mut self) -> PResult<bool> {
        match self.tok {
            Tok::Flag(b) => {
                self.bump();
                Ok(b)
            }
            _ => Err(self.error(&[Expected::Flag])),
        }
    }

    fn number(&mut self) -> PResult<f64> {
        match self.tok {
            Tok::Number(n) => {
                self.bump();
                Ok(n)
            }
            _ => Err(self.error(&[Expected::Number])),
        }
    }

    fn comma(&mut self) -> PResult<()> {
        self.expect(Tok::Comma, Expected::Comma)
    }

    fn plan(&mut self) -> PResult<ActionPlan> {
        let mut entries = Vec::new();
        let mut seen = HashSet::new();
        loop {
            let agent_offset = self.offset;
            let entry = self.agent_block()?;
            if !seen.insert(entry.agent_id.clone()) {
                return Err(ParseError {
                    offset: agent_offset,
                    kind: ParseErrorKind::DuplicateAgent(entry.agent_id),
                });
            }
            entries.push(entry);

            match self.tok {
                Tok::Comma => {
                    self.bump();
                    match self.tok {
                        Tok::Agent(_) => continue,
                        Tok::Period | Tok::End => {}
                        _ => {
                            return Err(self.error(&[
                                Expected::AgentId,
                                Expected::Period,
                                Expected::End,
                            ]))
                        }
                    }
                }
                Tok::Period | Tok::End => {}
                _ => return Err(self.error(&[Expected::Comma, Expected::Period, Expected::End])),
            }
            if self.tok == Tok::Period {
                self.bump();
            }
            return match self.tok {
                Tok::End => Ok(ActionPlan { entries }),
                _ => Err(self.error(&[Expected::End])),
            };
        }
    }

    fn agent_block(&mut self) -> PResult<AgentQueue> {
        let agent_id = match &self.tok {
            Tok::Agent(id) => AgentId::new(id.clone()),
            _ => return Err(self.error(&[Expected::AgentId])),
        };
        self.bump();
        self.expect(Tok::LBrace, Expected::LBrace)?;
        let mut queue = Vec::new();
        loop {
            queue.push(self.destination(&agent_id)?);
            match self.tok {
                Tok::Comma => {
                    self.bump();
                    if self.tok == Tok::RBrace {
                        self.bump();
                        break;
                    }
                    if !matches!(self.tok, Tok::Object(_)) {
                        return Err(self.error(&[Expected::ObjectId, Expected::RBrace]));
                    }
                }
                Tok::RBrace => {
                    self.bump();
                    break;
                }
                _ => return Err(self.error(&[Expected::Comma, Expected::RBrace])),
            }
        }
        Ok(AgentQueue { agent_id, queue })
    }

    fn destination(&mut self, agent: &AgentId) -> PResult<Destination> {
        let start = self.offset;
        let object_id = match &self.tok {
            Tok::Object(id) => ObjectId::new(id.clone()),
            _ => return Err(self.error(&[Expected::ObjectId])),
        };
        self.bump();
        self.expect(Tok::LParen, Expected::LParen)?;
        let interact = self.flag()?;
        self.comma()?;
        let duration = self.number()?;
        self.comma()?;
        let speed = self.number()?;
        self.comma()?;
        let grab = self.flag()?;
        self.comma()?;
        let stationary = self.flag()?;
        self.comma()?;
        let basic = self.flag()?;
        self.expect(Tok::RParen, Expected::RParen)?;

        let dest = Destination {
            object_id,
            interact,
            duration,
            speed,
            grab,
            stationary,
            basic,
        };
        dest.check().map_err(|reason| ParseError {
            offset: start,
            kind: ParseErrorKind::InvalidDestination {
                agent: agent.clone(),
                object: dest.object_id.clone(),
                reason,
            },
        })?;
        Ok(dest)
    }
}

/// Parses a SceneDirector string into per-agent destination queues.
pub fn parse_plan(text: &str) -> Result<ActionPlan, ParseError> {
    parse_plan_bytes(text.as_bytes())
}

/// Like [`parse_plan`] but over raw bytes; non-ASCII bytes are syntax errors.
pub fn parse_plan_bytes(bytes: &[u8]) -> Result<ActionPlan, ParseError> {
    Parser::new(bytes).plan()
}
