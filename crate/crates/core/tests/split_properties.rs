use std::collections::BTreeSet;

use compgen_core::scan::enumerate_dataset;
use compgen_core::splits::{
    build_length_split, build_primitive_holdout, build_random_split, build_subcommand_holdout, build_template_holdout,
    SplitError, SplitResult,
};
use compgen_core::Example;

fn contains_words(haystack: &[String], needle: &[&str]) -> bool {
    haystack.windows(needle.len()).any(|w| w.iter().zip(needle).all(|(a, b)| a == b))
}

fn test_set(split: &SplitResult) -> BTreeSet<&str> {
    split.test.iter().map(String::as_str).collect()
}

fn expected(data: &[Example], pred: impl Fn(&Example) -> bool) -> BTreeSet<&str> {
    data.iter().filter(|e| pred(e)).map(|e| e.id.as_str()).collect()
}

#[test]
fn add_jump_matches_word_scan() {
    let data = enumerate_dataset();
    let split = build_primitive_holdout(&data, "jump").unwrap();
    split.check_partition(&data).unwrap();
    assert_eq!(split.train.len() + split.test.len(), data.len());
    let want = expected(&data, |e| e.input.iter().any(|w| w == "jump") && e.input != ["jump"]);
    assert_eq!(test_set(&split), want);
    assert!(split.train.iter().any(|id| data.iter().any(|e| &e.id == id && e.input == ["jump"])));
    // published add-jump split sizes
    assert_eq!(split.test.len(), 7_706);
}

#[test]
fn turn_left_holdout_keeps_only_the_bare_command() {
    let data = enumerate_dataset();
    let split = build_primitive_holdout(&data, "turn_left").unwrap();
    let want = expected(&data, |e| contains_words(&e.input, &["turn", "left"]) && e.input != ["turn", "left"]);
    assert_eq!(test_set(&split), want);
}

#[test]
fn subcommand_and_template_match_word_scan() {
    let data = enumerate_dataset();
    let split = build_subcommand_holdout(&data, "jump around right").unwrap();
    assert_eq!(test_set(&split), expected(&data, |e| contains_words(&e.input, &["jump", "around", "right"])));

    let split = build_template_holdout(&data, "$Primitive around right").unwrap();
    let want = expected(&data, |e| {
        ["jump", "walk", "run", "look"].iter().any(|p| contains_words(&e.input, &[p, "around", "right"]))
    });
    assert_eq!(test_set(&split), want);
    assert!(split.summary.unseen_test_tokens.is_empty());
}

#[test]
fn holdout_leaving_a_word_unseen_is_unfair() {
    let data = enumerate_dataset();
    let few: Vec<Example> = data.iter().filter(|e| e.input.len() <= 2).cloned().collect();
    // other primitives keep "thrice" in train
    let err = build_subcommand_holdout(&few, "jump thrice");
    assert!(err.is_ok());
    let tiny: Vec<Example> = few.iter().filter(|e| e.input == ["jump"] || e.input == ["jump", "thrice"]).cloned().collect();
    match build_subcommand_holdout(&tiny, "jump thrice") {
        Err(SplitError::Unfair(words)) => assert_eq!(words, vec!["thrice".to_string()]),
        other => panic!("expected unfair split, got {other:?}"),
    }
}

#[test]
fn length_split_respects_threshold() {
    let data = enumerate_dataset();
    let split = build_length_split(&data, 22).unwrap();
    assert_eq!(test_set(&split), expected(&data, |e| e.output.len() > 22));
    // published length split has 16,990 train / 3,920 test
    assert_eq!(split.test.len(), 3_920);
}

#[test]
fn random_split_is_seeded_and_sized() {
    let data = enumerate_dataset();
    let a = build_random_split(&data, 1, 0.8).unwrap();
    let b = build_random_split(&data, 1, 0.8).unwrap();
    let c = build_random_split(&data, 2, 0.8).unwrap();
    assert_eq!(a.to_json(), b.to_json());
    assert_ne!(a.train, c.train);
    assert_eq!(a.train.len(), (0.8 * data.len() as f64).round() as usize);
}

#[test]
fn split_files_round_trip_and_accept_index_lists() {
    let data = enumerate_dataset();
    let split = build_length_split(&data, 22).unwrap();
    let back = SplitResult::from_json(&split.to_json(), &data).unwrap();
    assert_eq!(back.spec, split.spec);
    assert_eq!(back.train, split.train);
    assert_eq!(back.test, split.test);

    let released = r#"{"trainIdxs": [0, 1, 2], "testIdxs": [3]}"#;
    let ext = SplitResult::from_json(released, &data).unwrap();
    assert_eq!(ext.train, vec![data[0].id.clone(), data[1].id.clone(), data[2].id.clone()]);
    assert_eq!(ext.test, vec![data[3].id.clone()]);

    let overlap = r#"{"trainIdxs": [0], "testIdxs": [0]}"#;
    assert!(matches!(SplitResult::from_json(overlap, &data), Err(SplitError::Overlap(_))));
}
