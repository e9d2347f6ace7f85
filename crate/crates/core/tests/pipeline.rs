mod common;

use std::fs;

use common::{World, WorldSpec};
use lexidrift::eval::load_reports;
use lexidrift::pipeline::{run_pipeline, RunOptions, MANIFEST};
use lexidrift::Error;

#[test]
fn full_run_writes_every_artifact_and_verifies() {
    let dir = tempfile::tempdir().unwrap();
    let config = World::generate(&WorldSpec::default()).write(dir.path());
    let manifest = run_pipeline(&config, &RunOptions::default()).unwrap();
    assert!(manifest.complete);
    let names: Vec<&str> = manifest.stages.iter().map(|s| s.name.as_str()).collect();
    assert_eq!(
        names,
        [
            "align",
            "project",
            "drift",
            "train",
            "eval",
            "eval-emoticons"
        ]
    );
    let out = &config.output_dir;
    for file in [
        "alignments.pharaoh",
        "translation_table.tsv",
        "unisent.tsv",
        "drift.tsv",
        "model.json",
        "eval.json",
        "eval_summary.tsv",
        "emoticons.json",
        "emoticons_summary.tsv",
        "emoticon_drift.tsv",
        MANIFEST,
    ] {
        assert!(out.join(file).is_file(), "{file} missing");
    }
    assert!(manifest.mismatched_outputs(out).is_empty());

    // Every file in the output directory except the manifest is accounted for.
    let recorded: Vec<&String> = manifest
        .stages
        .iter()
        .flat_map(|s| s.outputs.keys())
        .collect();
    for entry in fs::read_dir(out).unwrap() {
        let name = entry.unwrap().file_name().into_string().unwrap();
        assert!(
            name == MANIFEST || recorded.contains(&&name),
            "{name} not in manifest"
        );
    }

    let reports = load_reports(out.join("eval.json")).unwrap();
    let sources: Vec<&str> = reports.iter().map(|r| r.seed_source.as_str()).collect();
    assert_eq!(
        sources,
        ["baseline", "manual", "unisent", "unisent_weighted"]
    );
    let n_test = reports[0].n_test;
    assert!(reports.iter().all(|r| r.n_test == n_test));

    let emoticons = load_reports(out.join("emoticons.json")).unwrap();
    let unisent = emoticons
        .iter()
        .find(|r| r.seed_source == "unisent")
        .unwrap();
    assert!(
        unisent.macro_f1 >= 0.95,
        "emoticon macro-F1 {}",
        unisent.macro_f1
    );
}

#[test]
fn resume_after_completion_skips_every_stage() {
    let dir = tempfile::tempdir().unwrap();
    let config = World::generate(&WorldSpec::default()).write(dir.path());
    run_pipeline(&config, &RunOptions::default()).unwrap();
    let resumed = run_pipeline(&config, &RunOptions { resume: true }).unwrap();
    assert!(resumed.stages.iter().all(|s| s.resumed));
}

#[test]
fn resume_reruns_stages_downstream_of_a_change() {
    let dir = tempfile::tempdir().unwrap();
    let mut config = World::generate(&WorldSpec::default()).write(dir.path());
    config.emoticons = None;
    run_pipeline(&config, &RunOptions::default()).unwrap();
    config.test_fraction = 0.3;
    let resumed = run_pipeline(&config, &RunOptions { resume: true }).unwrap();
    let rerun: Vec<&str> = resumed
        .stages
        .iter()
        .filter(|s| !s.resumed)
        .map(|s| s.name.as_str())
        .collect();
    assert_eq!(rerun, ["eval"]);
}

#[test]
fn missing_corpus_fails_validation_before_any_stage() {
    let dir = tempfile::tempdir().unwrap();
    let mut config = World::generate(&WorldSpec::default()).write(dir.path());
    config.corpus = dir.path().join("absent.tsv");
    match run_pipeline(&config, &RunOptions::default()) {
        Err(Error::Config(problems)) => {
            assert!(problems.iter().any(|p| p.contains("absent.tsv")))
        }
        other => panic!("expected a validation error, got {other:?}"),
    }
    assert!(!config.output_dir.exists());
}

#[test]
fn stage_error_names_the_stage_and_keeps_partial_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let config = World::generate(&WorldSpec::default()).write(dir.path());
    fs::write(&config.seeds, "nowhere\tPOS\n").unwrap();
    match run_pipeline(&config, &RunOptions::default()) {
        Err(Error::Stage { stage, source }) => {
            assert_eq!(stage, "project");
            assert!(matches!(*source, Error::NoSeedCoverage));
        }
        other => panic!("expected a stage error, got {other:?}"),
    }
    assert!(config.output_dir.join("alignments.pharaoh").is_file());
}
