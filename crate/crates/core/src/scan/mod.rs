//! SCAN navigation commands: syntax, semantics and exhaustive generation.
//!
//! The grammar is the standard SCAN one:
//!
//! ```text
//! Command   -> Clause | Clause and Clause | Clause after Clause
//! Clause    -> Phrase | Phrase twice | Phrase thrice
//! Phrase    -> Primitive | Verb Direction | Verb opposite Direction | Verb around Direction
//! Verb      -> Primitive | turn
//! Primitive -> jump | walk | run | look
//! Direction -> left | right
//! ```
//!
//! It generates 20,910 distinct commands. The AST is layered so that a
//! conjunction can only appear at the root.

mod ast;
mod grammar;
pub(crate) mod parse;

pub use ast::{Action, ActionSequence, Clause, CommandAst, Direction, Phrase, Primitive, Repeat, Verb};
pub use grammar::{
    enumerate_commands, enumerate_dataset, enumerate_dataset_with, rule, DerivationTrace, GrammarRule,
    TraceError, RULES, START_SYMBOL,
};
pub use parse::{parse_command, parse_str, ParseError, ParseErrorKind};

/// Interprets a command into its action sequence.
pub fn interpret(ast: &CommandAst) -> ActionSequence {
    ast.interpret()
}

/// Parses and interprets a whitespace-separated command.
pub fn interpret_str(command: &str) -> Result<ActionSequence, ParseError> {
    Ok(parse_str(command)?.interpret())
}

/// Input vocabulary of SCAN commands.
pub const INPUT_VOCABULARY: [&str; 13] = [
    "jump", "walk", "run", "look", "turn", "left", "right", "opposite", "around", "twice", "thrice", "and",
    "after",
];
