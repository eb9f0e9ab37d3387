//! Grouped, reversible renderings of a query's triples.
//!
//! * `f1` groups triples by subject: `M0 { directed M2 . directed M3 }`.
//! * `f2` also merges the objects of each (subject, relation) pair:
//!   `M0 { directed { M2 , M3 } }`.
//! * `f3` is `f2` with subjects, relations and objects sorted.
//!
//! Groups keep first-occurrence order under `f1` and `f2`. The header and
//! any constraints pass through unchanged; constraints follow the groups.
//! Delimiters are always standalone tokens.

use std::fmt;
use std::str::FromStr;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use super::{is_delimiter, is_filter, Constraint, QueryForm, SparqlError, SparqlQuery, Tokens, Triple};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum IrLevel {
    F1,
    F2,
    F3,
}

impl IrLevel {
    pub const ALL: [IrLevel; 3] = [IrLevel::F1, IrLevel::F2, IrLevel::F3];

    fn groups_objects(self) -> bool {
        self != IrLevel::F1
    }
}

impl FromStr for IrLevel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "f1" => Ok(IrLevel::F1),
            "f2" => Ok(IrLevel::F2),
            "f3" => Ok(IrLevel::F3),
            other => Err(format!("unknown IR level {other:?} (expected f1, f2 or f3)")),
        }
    }
}

impl fmt::Display for IrLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            IrLevel::F1 => "f1",
            IrLevel::F2 => "f2",
            IrLevel::F3 => "f3",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelationGroup {
    pub relation: String,
    /// Exactly one object under `f1`.
    pub objects: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubjectGroup {
    pub subject: String,
    pub relations: Vec<RelationGroup>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IrQuery {
    pub level: IrLevel,
    pub form: QueryForm,
    pub groups: Vec<SubjectGroup>,
    pub constraints: Vec<Constraint>,
}

/// Groups the triples of `q` at the given level.
pub fn ir_encode(q: &SparqlQuery, level: IrLevel) -> IrQuery {
    let mut by_subject: IndexMap<&str, IndexMap<&str, Vec<&str>>> = IndexMap::new();
    let mut f1: IndexMap<&str, Vec<RelationGroup>> = IndexMap::new();
    for t in q.triples() {
        if level.groups_objects() {
            by_subject
                .entry(&t.subject)
                .or_default()
                .entry(&t.relation)
                .or_default()
                .push(&t.object);
        } else {
            f1.entry(&t.subject)
                .or_default()
                .push(RelationGroup { relation: t.relation.clone(), objects: vec![t.object.clone()] });
        }
    }
    let mut groups: Vec<SubjectGroup> = if level.groups_objects() {
        by_subject
            .into_iter()
            .map(|(s, rels)| SubjectGroup {
                subject: s.to_string(),
                relations: rels
                    .into_iter()
                    .map(|(r, objs)| RelationGroup {
                        relation: r.to_string(),
                        objects: objs.into_iter().map(str::to_string).collect(),
                    })
                    .collect(),
            })
            .collect()
    } else {
        f1.into_iter().map(|(s, relations)| SubjectGroup { subject: s.to_string(), relations }).collect()
    };
    if level == IrLevel::F3 {
        for g in &mut groups {
            for r in &mut g.relations {
                r.objects.sort();
            }
            g.relations.sort_by(|a, b| a.relation.cmp(&b.relation));
        }
        groups.sort_by(|a, b| a.subject.cmp(&b.subject));
    }
    IrQuery { level, form: q.form.clone(), groups, constraints: q.constraints.clone() }
}

impl IrQuery {
    /// Expands the groups back into a flat query.
    pub fn flatten(&self) -> SparqlQuery {
        let triples = self
            .groups
            .iter()
            .flat_map(|g| {
                g.relations.iter().flat_map(move |r| {
                    r.objects.iter().map(move |o| Triple {
                        subject: g.subject.clone(),
                        relation: r.relation.clone(),
                        object: o.clone(),
                    })
                })
            })
            .collect();
        SparqlQuery::new(self.form.clone(), triples, self.constraints.clone())
    }

    /// Subjects, relations and objects written out, ignoring delimiters.
    pub fn term_count(&self) -> usize {
        self.groups
            .iter()
            .map(|g| 1 + g.relations.iter().map(|r| 1 + r.objects.len()).sum::<usize>())
            .sum()
    }
}

pub fn serialize_ir(ir: &IrQuery) -> String {
    ir.to_string()
}

impl fmt::Display for IrQuery {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = Vec::new();
        if let Some(h) = self.form.header() {
            parts.push(h);
        }
        for g in &self.groups {
            let entries: Vec<String> = g
                .relations
                .iter()
                .map(|r| {
                    if self.level.groups_objects() {
                        format!("{} {{ {} }}", r.relation, r.objects.join(" , "))
                    } else {
                        format!("{} {}", r.relation, r.objects.join(" "))
                    }
                })
                .collect();
            parts.push(format!("{} {{ {} }}", g.subject, entries.join(" . ")));
        }
        parts.extend(self.constraints.iter().map(Constraint::to_string));
        if self.form != QueryForm::Bare {
            parts.push("}".into());
        }
        f.write_str(&parts.join(" "))
    }
}

fn closing_brace(toks: &Tokens) -> SparqlError {
    match toks.peek() {
        None => SparqlError::UnbalancedBrace(toks.pos),
        _ => toks.unexpected("'}'"),
    }
}

fn relation_groups(toks: &mut Tokens, level: IrLevel) -> Result<Vec<RelationGroup>, SparqlError> {
    let mut relations = Vec::new();
    loop {
        let position = toks.pos;
        let relation = toks.term("a relation")?;
        let dangling = |toks: &Tokens| match toks.peek() {
            None => SparqlError::UnbalancedBrace(toks.pos),
            Some(t) if is_delimiter(t) => SparqlError::DanglingRelation { position, relation: relation.clone() },
            _ => toks.unexpected("an object"),
        };
        let objects = if level.groups_objects() {
            if toks.peek() != Some("{") {
                return Err(dangling(toks));
            }
            toks.pos += 1;
            let mut objs = Vec::new();
            loop {
                if objs.is_empty() && toks.peek().is_some_and(is_delimiter) {
                    return Err(dangling(toks));
                }
                objs.push(toks.term("an object")?);
                match toks.peek() {
                    Some(",") => toks.pos += 1,
                    Some("}") => {
                        toks.pos += 1;
                        break;
                    }
                    _ => return Err(closing_brace(toks)),
                }
            }
            objs
        } else {
            if toks.peek().is_none_or(is_delimiter) {
                return Err(dangling(toks));
            }
            vec![toks.term("an object")?]
        };
        relations.push(RelationGroup { relation, objects });
        match toks.peek() {
            Some(".") => toks.pos += 1,
            Some("}") => {
                toks.pos += 1;
                return Ok(relations);
            }
            _ => return Err(closing_brace(toks)),
        }
    }
}

/// Parses grouped text at the declared level.
pub fn parse_ir(text: &str, level: IrLevel) -> Result<IrQuery, SparqlError> {
    let mut toks = Tokens::new(text);
    let (form, braced) = toks.header()?;
    let mut groups = Vec::new();
    let mut constraints = Vec::new();
    loop {
        match toks.peek() {
            None if braced => return Err(SparqlError::UnbalancedBrace(toks.pos)),
            None => break,
            Some("}") if braced => {
                toks.pos += 1;
                break;
            }
            Some("}") => return Err(SparqlError::UnbalancedBrace(toks.pos)),
            Some(".") => toks.pos += 1,
            Some(t) if is_filter(t) => constraints.push(toks.constraint()?),
            Some(_) if !constraints.is_empty() => return Err(toks.unexpected("constraints after all groups")),
            Some(_) => {
                let subject = toks.term("a subject")?;
                if toks.peek() != Some("{") {
                    return Err(toks.unexpected("'{' after subject"));
                }
                toks.pos += 1;
                groups.push(SubjectGroup { subject, relations: relation_groups(&mut toks, level)? });
            }
        }
    }
    if toks.peek().is_some() {
        return Err(toks.unexpected("end of query"));
    }
    if groups.is_empty() && constraints.is_empty() {
        return Err(SparqlError::EmptyBody);
    }
    Ok(IrQuery { level, form, groups, constraints })
}

/// Decodes grouped text back to a flat query.
pub fn ir_decode(text: &str, level: IrLevel) -> Result<SparqlQuery, SparqlError> {
    Ok(parse_ir(text, level)?.flatten())
}
