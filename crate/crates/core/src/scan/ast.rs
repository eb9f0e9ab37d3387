use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Primitive {
    Jump,
    Walk,
    Run,
    Look,
}

impl Primitive {
    pub const ALL: [Primitive; 4] = [Primitive::Jump, Primitive::Walk, Primitive::Run, Primitive::Look];

    pub fn word(self) -> &'static str {
        match self {
            Primitive::Jump => "jump",
            Primitive::Walk => "walk",
            Primitive::Run => "run",
            Primitive::Look => "look",
        }
    }

    pub fn from_word(word: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|p| p.word() == word)
    }

    pub fn action(self) -> Action {
        match self {
            Primitive::Jump => Action::Jump,
            Primitive::Walk => Action::Walk,
            Primitive::Run => Action::Run,
            Primitive::Look => Action::Look,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Direction {
    Left,
    Right,
}

impl Direction {
    pub const ALL: [Direction; 2] = [Direction::Left, Direction::Right];

    pub fn word(self) -> &'static str {
        match self {
            Direction::Left => "left",
            Direction::Right => "right",
        }
    }

    pub fn from_word(word: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|d| d.word() == word)
    }

    pub fn turn(self) -> Action {
        match self {
            Direction::Left => Action::LTurn,
            Direction::Right => Action::RTurn,
        }
    }
}

/// Head of a directional phrase. `turn` contributes no action of its own.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Verb {
    Action(Primitive),
    Turn,
}

impl Verb {
    pub const ALL: [Verb; 5] = [
        Verb::Action(Primitive::Jump),
        Verb::Action(Primitive::Walk),
        Verb::Action(Primitive::Run),
        Verb::Action(Primitive::Look),
        Verb::Turn,
    ];

    pub fn word(self) -> &'static str {
        match self {
            Verb::Action(p) => p.word(),
            Verb::Turn => "turn",
        }
    }

    fn push_actions(self, out: &mut Vec<Action>) {
        if let Verb::Action(p) = self {
            out.push(p.action());
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Phrase {
    /// A lone primitive, e.g. `jump`.
    Bare(Primitive),
    /// `jump left`, `turn right`.
    Directed(Verb, Direction),
    /// `jump opposite left`.
    Opposite(Verb, Direction),
    /// `jump around left`.
    Around(Verb, Direction),
}

impl Phrase {
    pub fn verb(self) -> Verb {
        match self {
            Phrase::Bare(p) => Verb::Action(p),
            Phrase::Directed(v, _) | Phrase::Opposite(v, _) | Phrase::Around(v, _) => v,
        }
    }

    pub fn direction(self) -> Option<Direction> {
        match self {
            Phrase::Bare(_) => None,
            Phrase::Directed(_, d) | Phrase::Opposite(_, d) | Phrase::Around(_, d) => Some(d),
        }
    }

    pub fn push_tokens(self, out: &mut Vec<&'static str>) {
        match self {
            Phrase::Bare(p) => out.push(p.word()),
            Phrase::Directed(v, d) => out.extend([v.word(), d.word()]),
            Phrase::Opposite(v, d) => out.extend([v.word(), "opposite", d.word()]),
            Phrase::Around(v, d) => out.extend([v.word(), "around", d.word()]),
        }
    }

    fn push_actions(self, out: &mut Vec<Action>) {
        match self {
            Phrase::Bare(p) => out.push(p.action()),
            Phrase::Directed(v, d) => {
                out.push(d.turn());
                v.push_actions(out);
            }
            Phrase::Opposite(v, d) => {
                out.extend([d.turn(), d.turn()]);
                v.push_actions(out);
            }
            Phrase::Around(v, d) => {
                for _ in 0..4 {
                    out.push(d.turn());
                    v.push_actions(out);
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Repeat {
    Once,
    Twice,
    Thrice,
}

impl Repeat {
    pub const ALL: [Repeat; 3] = [Repeat::Once, Repeat::Twice, Repeat::Thrice];

    pub fn count(self) -> usize {
        match self {
            Repeat::Once => 1,
            Repeat::Twice => 2,
            Repeat::Thrice => 3,
        }
    }

    pub fn word(self) -> Option<&'static str> {
        match self {
            Repeat::Once => None,
            Repeat::Twice => Some("twice"),
            Repeat::Thrice => Some("thrice"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Clause {
    pub phrase: Phrase,
    pub repeat: Repeat,
}

impl Clause {
    pub fn new(phrase: Phrase, repeat: Repeat) -> Self {
        Clause { phrase, repeat }
    }

    pub fn push_tokens(self, out: &mut Vec<&'static str>) {
        self.phrase.push_tokens(out);
        out.extend(self.repeat.word());
    }

    fn push_actions(self, out: &mut Vec<Action>) {
        let start = out.len();
        self.phrase.push_actions(out);
        let end = out.len();
        for _ in 1..self.repeat.count() {
            out.extend_from_within(start..end);
        }
    }
}

/// Parse tree of a SCAN command.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CommandAst {
    Single(Clause),
    And(Clause, Clause),
    After(Clause, Clause),
}

impl CommandAst {
    pub fn clauses(&self) -> impl Iterator<Item = Clause> {
        let (a, b) = match *self {
            CommandAst::Single(c) => (c, None),
            CommandAst::And(x, y) | CommandAst::After(x, y) => (x, Some(y)),
        };
        std::iter::once(a).chain(b)
    }

    pub fn tokens(&self) -> Vec<&'static str> {
        let mut out = Vec::with_capacity(8);
        match *self {
            CommandAst::Single(c) => c.push_tokens(&mut out),
            CommandAst::And(x, y) => {
                x.push_tokens(&mut out);
                out.push("and");
                y.push_tokens(&mut out);
            }
            CommandAst::After(x, y) => {
                x.push_tokens(&mut out);
                out.push("after");
                y.push_tokens(&mut out);
            }
        }
        out
    }

    pub fn interpret(&self) -> ActionSequence {
        let mut out = Vec::new();
        match *self {
            CommandAst::Single(c) => c.push_actions(&mut out),
            CommandAst::And(x, y) => {
                x.push_actions(&mut out);
                y.push_actions(&mut out);
            }
            CommandAst::After(x, y) => {
                y.push_actions(&mut out);
                x.push_actions(&mut out);
            }
        }
        ActionSequence(out)
    }
}

impl fmt::Display for CommandAst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.tokens().join(" "))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Action {
    #[serde(rename = "JUMP")]
    Jump,
    #[serde(rename = "WALK")]
    Walk,
    #[serde(rename = "RUN")]
    Run,
    #[serde(rename = "LOOK")]
    Look,
    #[serde(rename = "LTURN")]
    LTurn,
    #[serde(rename = "RTURN")]
    RTurn,
}

impl Action {
    pub fn token(self) -> &'static str {
        match self {
            Action::Jump => "JUMP",
            Action::Walk => "WALK",
            Action::Run => "RUN",
            Action::Look => "LOOK",
            Action::LTurn => "LTURN",
            Action::RTurn => "RTURN",
        }
    }
}

/// Output of [`CommandAst::interpret`]. Never empty for a valid command.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ActionSequence(pub Vec<Action>);

impl ActionSequence {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn tokens(&self) -> Vec<&'static str> {
        self.0.iter().map(|a| a.token()).collect()
    }
}

impl fmt::Display for ActionSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.tokens().join(" "))
    }
}
