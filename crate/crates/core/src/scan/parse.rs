use std::fmt;

use super::ast::{Clause, CommandAst, Direction, Phrase, Primitive, Repeat, Verb};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    EmptyInput,
    UnexpectedEnd { expected: &'static str },
    UnknownWord(String),
    Unexpected { found: String, expected: &'static str },
}

/// Parse failure with the 0-based token position it occurred at.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub struct ParseError {
    pub position: usize,
    pub kind: ParseErrorKind,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            ParseErrorKind::EmptyInput => write!(f, "empty command"),
            ParseErrorKind::UnexpectedEnd { expected } => {
                write!(f, "unexpected end of input at token {}: expected {expected}", self.position)
            }
            ParseErrorKind::UnknownWord(w) => write!(f, "unknown word {w:?} at token {}", self.position),
            ParseErrorKind::Unexpected { found, expected } => {
                write!(f, "unexpected {found:?} at token {}: expected {expected}", self.position)
            }
        }
    }
}

const VOCABULARY: &[&str] = &super::INPUT_VOCABULARY;

struct Cursor<'a, S> {
    tokens: &'a [S],
    pos: usize,
}

impl<S: AsRef<str>> Cursor<'_, S> {
    fn peek(&self) -> Option<&str> {
        self.tokens.get(self.pos).map(|t| t.as_ref())
    }

    fn error(&self, expected: &'static str) -> ParseError {
        let kind = match self.peek() {
            None => ParseErrorKind::UnexpectedEnd { expected },
            Some(w) if !VOCABULARY.contains(&w) => ParseErrorKind::UnknownWord(w.to_string()),
            Some(w) => ParseErrorKind::Unexpected { found: w.to_string(), expected },
        };
        ParseError { position: self.pos, kind }
    }

    fn direction(&mut self) -> Result<Direction, ParseError> {
        match self.peek().and_then(Direction::from_word) {
            Some(d) => {
                self.pos += 1;
                Ok(d)
            }
            None => Err(self.error("left or right")),
        }
    }

    fn phrase(&mut self) -> Result<Phrase, ParseError> {
        let verb = match self.peek() {
            Some("turn") => Verb::Turn,
            Some(w) => match Primitive::from_word(w) {
                Some(p) => Verb::Action(p),
                None => return Err(self.error("a verb")),
            },
            None => return Err(self.error("a verb")),
        };
        self.pos += 1;
        match self.peek() {
            Some("opposite") => {
                self.pos += 1;
                Ok(Phrase::Opposite(verb, self.direction()?))
            }
            Some("around") => {
                self.pos += 1;
                Ok(Phrase::Around(verb, self.direction()?))
            }
            Some("left" | "right") => Ok(Phrase::Directed(verb, self.direction()?)),
            _ => match verb {
                Verb::Action(p) => Ok(Phrase::Bare(p)),
                Verb::Turn => Err(self.error("a direction after 'turn'")),
            },
        }
    }

    fn clause(&mut self) -> Result<Clause, ParseError> {
        let phrase = self.phrase()?;
        let repeat = match self.peek() {
            Some("twice") => Repeat::Twice,
            Some("thrice") => Repeat::Thrice,
            _ => Repeat::Once,
        };
        if repeat != Repeat::Once {
            self.pos += 1;
        }
        Ok(Clause::new(phrase, repeat))
    }

    fn command(&mut self) -> Result<CommandAst, ParseError> {
        if self.tokens.is_empty() {
            return Err(ParseError { position: 0, kind: ParseErrorKind::EmptyInput });
        }
        let first = self.clause()?;
        let ast = match self.peek() {
            None => return Ok(CommandAst::Single(first)),
            Some("and") => {
                self.pos += 1;
                CommandAst::And(first, self.clause()?)
            }
            Some("after") => {
                self.pos += 1;
                CommandAst::After(first, self.clause()?)
            }
            Some(_) => return Err(self.error("'and', 'after' or end of input")),
        };
        match self.peek() {
            None => Ok(ast),
            Some(_) => Err(self.error("end of input")),
        }
    }
}

/// Parses a tokenized SCAN command.
pub fn parse_command<S: AsRef<str>>(tokens: &[S]) -> Result<CommandAst, ParseError> {
    Cursor { tokens, pos: 0 }.command()
}

/// Parses a whitespace-separated SCAN command.
pub fn parse_str(command: &str) -> Result<CommandAst, ParseError> {
    let tokens: Vec<&str> = command.split_whitespace().collect();
    parse_command(&tokens)
}

/// Parses a clause-level fragment such as `jump around right twice`.
pub(crate) fn parse_clause<S: AsRef<str>>(tokens: &[S]) -> Result<Clause, ParseError> {
    let mut cursor = Cursor { tokens, pos: 0 };
    let clause = cursor.clause()?;
    match cursor.peek() {
        None => Ok(clause),
        Some(_) => Err(cursor.error("end of input")),
    }
}
