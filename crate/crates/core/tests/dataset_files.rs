use std::fs;

use compgen_core::dataset::{
    cgps_prefix, cgps_prefix_dataset, load_dataset, load_predictions, save_dataset, write_predictions, DatasetError,
    Format, MappableVocabulary, PrefixLength,
};
use compgen_core::scan::enumerate_dataset;
use compgen_core::{Example, PredictionRecord};
use tempfile::TempDir;

#[test]
fn jsonl_round_trip_keeps_traces() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("scan.jsonl");
    let data: Vec<Example> = enumerate_dataset().into_iter().step_by(101).collect();
    save_dataset(&path, Format::Jsonl, &data).unwrap();
    assert_eq!(load_dataset(&path, Format::from_path(&path)).unwrap(), data);
}

#[test]
fn tsv_round_trip_uses_content_ids() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("scan.tsv");
    let data: Vec<Example> = enumerate_dataset().into_iter().step_by(101).collect();
    save_dataset(&path, Format::Tsv, &data).unwrap();
    let back = load_dataset(&path, Format::from_path(&path)).unwrap();
    assert_eq!(back.len(), data.len());
    for (a, b) in back.iter().zip(&data) {
        assert_eq!((&a.input, &a.output), (&b.input, &b.output));
        assert!(a.derivation.is_none());
    }
    // ids depend only on content
    let again = load_dataset(&path, Format::Tsv).unwrap();
    assert_eq!(again, back);
}

#[test]
fn duplicate_ids_are_rejected() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("dup.jsonl");
    fs::write(&path, "{\"id\":\"a\",\"input\":\"jump\",\"output\":\"JUMP\"}\n{\"id\":\"a\",\"input\":\"walk\",\"output\":\"WALK\"}\n")
        .unwrap();
    assert!(matches!(load_dataset(&path, Format::Jsonl), Err(DatasetError::DuplicateId(_))));
}

#[test]
fn predictions_round_trip_with_replicas() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("p.jsonl");
    let preds = vec![
        PredictionRecord { id: "x".into(), prediction: vec!["JUMP".into()], replica: 0 },
        PredictionRecord { id: "x".into(), prediction: vec!["WALK".into(), "WALK".into()], replica: 3 },
    ];
    write_predictions(fs::File::create(&path).unwrap(), &preds).unwrap();
    assert_eq!(load_predictions(&path).unwrap(), preds);
}

#[test]
fn cgps_prefix_counts_unexplained_tokens() {
    let vocab = MappableVocabulary::scan_default();
    let ex = Example::new("e", "jump", "JUMP LTURN");
    let out = cgps_prefix(&ex, &vocab).unwrap();
    assert_eq!(out.input, vec!["<p0>", "jump"]);
    assert!(matches!(cgps_prefix(&out, &vocab), Err(DatasetError::AlreadyPrefixed(_))));

    let data = vec![ex, Example::new("f", "walk", "WALK")];
    let global = cgps_prefix_dataset(&data, &vocab, PrefixLength::Global).unwrap();
    assert_eq!(global[1].input, vec!["<p0>", "walk"]);
    let cfq = MappableVocabulary::cfq_default();
    let q = Example::new("q", "Did M0 direct M1", "ASK WHERE { M0 directed M1 }");
    assert_eq!(cfq.non_mappable_count(&q), 4);
}
