//! Test-only oracles, kept independent of the library code they check.
#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::Rng;

/// Naive SCAN semantics by string rewriting.
///
/// Works on the raw command tokens: words become action tokens, then
/// direction, repetition and conjunction rules are applied one rewrite at a
/// time until no rule matches. It never builds a tree.
pub fn rewrite_scan(command: &str) -> String {
    const TURN: &str = "<turn>";
    let mut s: Vec<String> = command
        .split_whitespace()
        .map(|w| match w {
            "jump" => "JUMP".to_string(),
            "walk" => "WALK".to_string(),
            "run" => "RUN".to_string(),
            "look" => "LOOK".to_string(),
            "turn" => TURN.to_string(),
            other => other.to_string(),
        })
        .collect();
    let is_act = |t: &str| matches!(t, "JUMP" | "WALK" | "RUN" | "LOOK" | "LTURN" | "RTURN") || t == TURN;
    let turn_of = |d: &str| if d == "left" { "LTURN".to_string() } else { "RTURN".to_string() };
    let is_dir = |t: &str| t == "left" || t == "right";

    // u opposite d -> T T u ; u around d -> (T u)x4 ; u d -> T u
    loop {
        let mut changed = false;
        for i in 0..s.len() {
            if i + 2 < s.len() && s[i + 1] == "opposite" && is_dir(&s[i + 2]) && is_act(&s[i]) {
                let t = turn_of(&s[i + 2]);
                let u = s[i].clone();
                s.splice(i..i + 3, [t.clone(), t, u]);
                changed = true;
                break;
            }
            if i + 2 < s.len() && s[i + 1] == "around" && is_dir(&s[i + 2]) && is_act(&s[i]) {
                let t = turn_of(&s[i + 2]);
                let u = s[i].clone();
                let rep: Vec<String> = (0..4).flat_map(|_| [t.clone(), u.clone()]).collect();
                s.splice(i..i + 3, rep);
                changed = true;
                break;
            }
            if i + 1 < s.len() && is_dir(&s[i + 1]) && is_act(&s[i]) {
                let t = turn_of(&s[i + 1]);
                let u = s[i].clone();
                s.splice(i..i + 2, [t, u]);
                changed = true;
                break;
            }
        }
        if !changed {
            break;
        }
    }
    // x twice -> x x ; x thrice -> x x x, where x is the action run before it
    while let Some(i) = s.iter().position(|t| t == "twice" || t == "thrice") {
        let start = s[..i].iter().rposition(|t| !is_act(t)).map_or(0, |p| p + 1);
        let run: Vec<String> = s[start..i].to_vec();
        let times = if s[i] == "twice" { 2 } else { 3 };
        let rep: Vec<String> = (0..times).flat_map(|_| run.clone()).collect();
        s.splice(start..=i, rep);
    }
    // x and y -> x y ; x after y -> y x
    if let Some(i) = s.iter().position(|t| t == "and" || t == "after") {
        let (left, right) = (s[..i].to_vec(), s[i + 1..].to_vec());
        s = if s[i] == "and" { [left, right].concat() } else { [right, left].concat() };
    }
    s.retain(|t| t != TURN);
    s.join(" ")
}

pub const SUBJECTS: &[&str] = &["M0", "M1", "M2", "M3", "?x0", "?x1", "?x2"];
pub const RELATIONS: &[&str] = &["directed", "a", "ns:film.film.edited_by", "ns:people.person.spouse_s", "^ns:film.actor.film"];
pub const OBJECTS: &[&str] = &["M0", "M1", "M2", "M3", "M4", "?x0", "?x1", "ns:film.director", "ns:people.person"];

/// A random flat query in the supported subset, as text, together with its
/// triples (unique, in text order) and constraints.
pub struct RandomQuery {
    pub text: String,
    pub triples: Vec<(String, String, String)>,
    pub constraints: Vec<String>,
}

pub fn random_query<R: Rng>(rng: &mut R, max_triples: usize, with_header: bool) -> RandomQuery {
    let n = rng.gen_range(1..=max_triples);
    // bias toward shared subjects and relations so grouping kicks in
    let ns = rng.gen_range(1..=3);
    let subjects: Vec<&str> = SUBJECTS.choose_multiple(rng, ns).copied().collect();
    let nr = rng.gen_range(1..=3);
    let relations: Vec<&str> = RELATIONS.choose_multiple(rng, nr).copied().collect();
    let mut triples: Vec<(String, String, String)> = Vec::new();
    while triples.len() < n {
        let t = (
            subjects.choose(rng).unwrap().to_string(),
            relations.choose(rng).unwrap().to_string(),
            OBJECTS.choose(rng).unwrap().to_string(),
        );
        if !triples.contains(&t) {
            triples.push(t);
        }
        if triples.len() >= subjects.len() * relations.len() * OBJECTS.len() {
            break;
        }
    }
    let constraints: Vec<String> = (0..rng.gen_range(0..=2))
        .map(|i| format!("FILTER ( ?x{i} != M{} )", rng.gen_range(0..4)))
        .collect();
    let mut clauses: Vec<String> = triples.iter().map(|(s, r, o)| format!("{s} {r} {o}")).collect();
    clauses.extend(constraints.iter().cloned());
    let body = clauses.join(" . ");
    let text = if with_header {
        match rng.gen_range(0..3) {
            0 => format!("SELECT count(*) WHERE {{ {body} }}"),
            1 => format!("SELECT DISTINCT ?x0 WHERE {{ {body} }}"),
            _ => format!("ASK WHERE {{ {body} }}"),
        }
    } else {
        body
    };
    RandomQuery { text, triples, constraints }
}

/// The set of `s r o` clauses in a bare clause list, by plain string splitting.
pub fn brute_clause_set(body: &str) -> std::collections::BTreeSet<String> {
    body.split(" . ").map(|c| c.split_whitespace().collect::<Vec<_>>().join(" ")).collect()
}
