use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::ast::{Clause, CommandAst, Direction, Phrase, Primitive, Repeat, Verb};
use crate::dataset::Example;
use crate::par::{self, Parallelism};

/// A production of the SCAN grammar. Right-hand symbols that name a
/// nonterminal are capitalized; everything else is a terminal word.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GrammarRule {
    pub id: &'static str,
    pub lhs: &'static str,
    pub rhs: &'static [&'static str],
}

pub const START_SYMBOL: &str = "Command";

/// All productions in declaration order. Enumeration follows this order.
pub const RULES: &[GrammarRule] = &[
    GrammarRule { id: "conj_single", lhs: "Command", rhs: &["Clause"] },
    GrammarRule { id: "conj_and", lhs: "Command", rhs: &["Clause", "and", "Clause"] },
    GrammarRule { id: "conj_after", lhs: "Command", rhs: &["Clause", "after", "Clause"] },
    GrammarRule { id: "rep_once", lhs: "Clause", rhs: &["Phrase"] },
    GrammarRule { id: "rep_twice", lhs: "Clause", rhs: &["Phrase", "twice"] },
    GrammarRule { id: "rep_thrice", lhs: "Clause", rhs: &["Phrase", "thrice"] },
    GrammarRule { id: "interp_bare", lhs: "Phrase", rhs: &["Primitive"] },
    GrammarRule { id: "interp_directed", lhs: "Phrase", rhs: &["Verb", "Direction"] },
    GrammarRule { id: "interp_opposite", lhs: "Phrase", rhs: &["Verb", "opposite", "Direction"] },
    GrammarRule { id: "interp_around", lhs: "Phrase", rhs: &["Verb", "around", "Direction"] },
    GrammarRule { id: "verb_action", lhs: "Verb", rhs: &["Primitive"] },
    GrammarRule { id: "verb_turn", lhs: "Verb", rhs: &["turn"] },
    GrammarRule { id: "prim_jump", lhs: "Primitive", rhs: &["jump"] },
    GrammarRule { id: "prim_walk", lhs: "Primitive", rhs: &["walk"] },
    GrammarRule { id: "prim_run", lhs: "Primitive", rhs: &["run"] },
    GrammarRule { id: "prim_look", lhs: "Primitive", rhs: &["look"] },
    GrammarRule { id: "dir_left", lhs: "Direction", rhs: &["left"] },
    GrammarRule { id: "dir_right", lhs: "Direction", rhs: &["right"] },
];

pub fn rule(id: &str) -> Option<&'static GrammarRule> {
    RULES.iter().find(|r| r.id == id)
}

fn is_nonterminal(symbol: &str) -> bool {
    symbol.starts_with(|c: char| c.is_ascii_uppercase())
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TraceError {
    #[error("unknown grammar rule {0:?}")]
    UnknownRule(String),
    #[error("rule {rule} expects {expected} nonterminal children, found {found}")]
    Arity { rule: String, expected: usize, found: usize },
    #[error("rule {rule} expects a {expected} child, found rule {found} deriving {found_lhs}")]
    Mismatch { rule: String, expected: &'static str, found: String, found_lhs: &'static str },
    #[error("trace root must derive {START_SYMBOL}, found {0}")]
    Root(&'static str),
    #[error("malformed trace text at byte {0}")]
    Syntax(usize),
}

/// Tree of applied grammar rules, shaped like the derivation of one command.
///
/// Rendered compactly as `rule(child,child)`, e.g.
/// `conj_single(rep_once(interp_bare(prim_jump)))`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct DerivationTrace {
    pub rule: String,
    pub children: Vec<DerivationTrace>,
}

impl DerivationTrace {
    pub fn leaf(rule: &str) -> Self {
        DerivationTrace { rule: rule.to_string(), children: Vec::new() }
    }

    pub fn node(rule: &str, children: Vec<DerivationTrace>) -> Self {
        DerivationTrace { rule: rule.to_string(), children }
    }

    pub fn from_ast(ast: &CommandAst) -> Self {
        match *ast {
            CommandAst::Single(c) => Self::node("conj_single", vec![clause_trace(c)]),
            CommandAst::And(x, y) => Self::node("conj_and", vec![clause_trace(x), clause_trace(y)]),
            CommandAst::After(x, y) => Self::node("conj_after", vec![clause_trace(x), clause_trace(y)]),
        }
    }

    /// Pre-order traversal of every node.
    pub fn nodes(&self) -> Vec<&DerivationTrace> {
        let mut out = Vec::new();
        let mut stack = vec![self];
        while let Some(n) = stack.pop() {
            out.push(n);
            stack.extend(n.children.iter().rev());
        }
        out
    }

    /// Checks the trace against the grammar and replays it into the command
    /// tokens it derives.
    pub fn tokens(&self) -> Result<Vec<&'static str>, TraceError> {
        let root = self.lhs()?;
        if root != START_SYMBOL {
            return Err(TraceError::Root(root));
        }
        let mut out = Vec::new();
        self.replay(&mut out)?;
        Ok(out)
    }

    fn lhs(&self) -> Result<&'static str, TraceError> {
        rule(&self.rule).map(|r| r.lhs).ok_or_else(|| TraceError::UnknownRule(self.rule.clone()))
    }

    fn replay(&self, out: &mut Vec<&'static str>) -> Result<(), TraceError> {
        let r = rule(&self.rule).ok_or_else(|| TraceError::UnknownRule(self.rule.clone()))?;
        let expected = r.rhs.iter().filter(|s| is_nonterminal(s)).count();
        if expected != self.children.len() {
            return Err(TraceError::Arity { rule: self.rule.clone(), expected, found: self.children.len() });
        }
        let mut children = self.children.iter();
        for symbol in r.rhs {
            if !is_nonterminal(symbol) {
                out.push(symbol);
                continue;
            }
            let child = children.next().expect("arity checked");
            let child_lhs = child.lhs()?;
            if child_lhs != *symbol {
                return Err(TraceError::Mismatch {
                    rule: self.rule.clone(),
                    expected: symbol,
                    found: child.rule.clone(),
                    found_lhs: child_lhs,
                });
            }
            child.replay(out)?;
        }
        Ok(())
    }
}

fn clause_trace(c: Clause) -> DerivationTrace {
    let rule = match c.repeat {
        Repeat::Once => "rep_once",
        Repeat::Twice => "rep_twice",
        Repeat::Thrice => "rep_thrice",
    };
    DerivationTrace::node(rule, vec![phrase_trace(c.phrase)])
}

fn phrase_trace(p: Phrase) -> DerivationTrace {
    let (rule, verb, dir) = match p {
        Phrase::Bare(prim) => return DerivationTrace::node("interp_bare", vec![primitive_trace(prim)]),
        Phrase::Directed(v, d) => ("interp_directed", v, d),
        Phrase::Opposite(v, d) => ("interp_opposite", v, d),
        Phrase::Around(v, d) => ("interp_around", v, d),
    };
    let verb = match verb {
        Verb::Action(prim) => DerivationTrace::node("verb_action", vec![primitive_trace(prim)]),
        Verb::Turn => DerivationTrace::leaf("verb_turn"),
    };
    let dir = DerivationTrace::leaf(match dir {
        Direction::Left => "dir_left",
        Direction::Right => "dir_right",
    });
    DerivationTrace::node(rule, vec![verb, dir])
}

fn primitive_trace(p: Primitive) -> DerivationTrace {
    DerivationTrace::leaf(match p {
        Primitive::Jump => "prim_jump",
        Primitive::Walk => "prim_walk",
        Primitive::Run => "prim_run",
        Primitive::Look => "prim_look",
    })
}

impl fmt::Display for DerivationTrace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.rule)?;
        if !self.children.is_empty() {
            f.write_str("(")?;
            for (i, c) in self.children.iter().enumerate() {
                if i > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{c}")?;
            }
            f.write_str(")")?;
        }
        Ok(())
    }
}

impl FromStr for DerivationTrace {
    type Err = TraceError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        fn node(s: &[u8], pos: &mut usize) -> Result<DerivationTrace, TraceError> {
            let start = *pos;
            while *pos < s.len() && (s[*pos].is_ascii_alphanumeric() || s[*pos] == b'_') {
                *pos += 1;
            }
            if start == *pos {
                return Err(TraceError::Syntax(*pos));
            }
            let rule = std::str::from_utf8(&s[start..*pos]).expect("ascii").to_string();
            let mut children = Vec::new();
            if s.get(*pos) == Some(&b'(') {
                *pos += 1;
                loop {
                    children.push(node(s, pos)?);
                    match s.get(*pos) {
                        Some(b',') => *pos += 1,
                        Some(b')') => {
                            *pos += 1;
                            break;
                        }
                        _ => return Err(TraceError::Syntax(*pos)),
                    }
                }
            }
            Ok(DerivationTrace { rule, children })
        }
        let bytes = s.trim().as_bytes();
        let mut pos = 0;
        let trace = node(bytes, &mut pos)?;
        if pos != bytes.len() {
            return Err(TraceError::Syntax(pos));
        }
        Ok(trace)
    }
}

impl From<DerivationTrace> for String {
    fn from(t: DerivationTrace) -> String {
        t.to_string()
    }
}

impl TryFrom<String> for DerivationTrace {
    type Error = TraceError;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

fn all_phrases() -> Vec<Phrase> {
    let mut out: Vec<Phrase> = Primitive::ALL.into_iter().map(Phrase::Bare).collect();
    for ctor in [Phrase::Directed, Phrase::Opposite, Phrase::Around] {
        for v in Verb::ALL {
            for d in Direction::ALL {
                out.push(ctor(v, d));
            }
        }
    }
    out
}

fn all_clauses() -> Vec<Clause> {
    let phrases = all_phrases();
    Repeat::ALL
        .into_iter()
        .flat_map(|r| phrases.iter().map(move |&p| Clause::new(p, r)))
        .collect()
}

/// Every grammatical command exactly once, depth-first over the rules in
/// declaration order.
pub fn enumerate_commands() -> Vec<CommandAst> {
    let clauses = all_clauses();
    let mut out = Vec::with_capacity(clauses.len() * (1 + 2 * clauses.len()));
    out.extend(clauses.iter().map(|&c| CommandAst::Single(c)));
    for ctor in [CommandAst::And, CommandAst::After] {
        for &x in &clauses {
            for &y in &clauses {
                out.push(ctor(x, y));
            }
        }
    }
    out
}

/// The full SCAN dataset in canonical order, with ids `scan-00000`, ….
pub fn enumerate_dataset() -> Vec<Example> {
    enumerate_dataset_with(Parallelism::default())
}

pub fn enumerate_dataset_with(mode: Parallelism) -> Vec<Example> {
    let commands = enumerate_commands();
    par::map_range(mode, commands.len(), |i| {
        let ast = &commands[i];
        let mut meta = BTreeMap::new();
        meta.insert("source".to_string(), "scan".to_string());
        Example {
            id: format!("scan-{i:05}"),
            input: ast.tokens().into_iter().map(str::to_string).collect(),
            output: ast.interpret().tokens().into_iter().map(str::to_string).collect(),
            derivation: Some(DerivationTrace::from_ast(ast)),
            meta,
        }
    })
}
