use bagpaths::harness::io::{read_gram, write_gram};
use bagpaths::harness::{
    good_matches, run_classification, run_retrieval, Dataset, DatasetManifest, KernelSelector, ManifestEntry, RunConfig,
};
use bagpaths::ingest::image::to_pbm;
use bagpaths::svm::INDEFINITE_TAG;
use bagpaths::synth;

fn dataset(dir: &std::path::Path) -> DatasetManifest {
    let shapes = [
        ("sq1", synth::square("sq1", 21, 2), "squares"),
        ("pl1", synth::plus("pl1", 12, 2), "crosses"),
        ("sq2", synth::square("sq2", 25, 2), "squares"),
        ("pl2", synth::plus("pl2", 14, 2), "crosses"),
        ("sq3", synth::square("sq3", 29, 3), "squares"),
        ("pl3", synth::plus("pl3", 16, 3), "crosses"),
    ];
    let entries = shapes
        .iter()
        .map(|(id, img, class)| {
            let path = dir.join(format!("{id}.pbm"));
            std::fs::write(&path, to_pbm(img)).unwrap();
            ManifestEntry {
                shape_id: id.to_string(),
                path,
                class_label: class.to_string(),
            }
        })
        .collect();
    DatasetManifest::new("toy", entries).unwrap()
}

#[test]
fn masks_to_reports() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = RunConfig::default();
    let data = Dataset::load(&dataset(dir.path()), &cfg);
    assert!(data.failed.is_empty(), "{:?}", data.failed);
    assert_eq!(data.shapes.len(), 6);

    for k in KernelSelector::ALL {
        let run = data.gram(k, &cfg).unwrap();
        assert_eq!(run.gram.len(), 6);
        if matches!(
            k,
            KernelSelector::MaxClassic | KernelSelector::ChangeClassic | KernelSelector::New
        ) {
            for i in 0..6 {
                assert!((run.gram.get(i, i) - 1.0).abs() < 1e-9, "{k} diagonal");
            }
        }
        assert_eq!(run.gram.is_indefinite(), k == KernelSelector::MaxClassic, "{k}");

        let retrieval = run_retrieval(&run.gram, &run.labels, &[]);
        for s in &retrieval.per_shape {
            assert!((1..=3).contains(&s.good_matches));
        }
        let classes = run_classification(&run.gram, &run.labels, &[], 2, &cfg.c_grid).unwrap();
        for c in &classes.per_class {
            assert!(c.false_positives == 0 || c.no_feasible_c);
            assert!(c.recognized <= c.class_size);
        }
        assert_eq!(
            classes.tags.contains(&INDEFINITE_TAG.to_string()),
            k == KernelSelector::MaxClassic
        );
    }
}

#[test]
fn gram_files_round_trip_bit_for_bit() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = RunConfig::default();
    let data = Dataset::load(&dataset(dir.path()), &cfg);
    let run = data.gram(KernelSelector::New, &cfg).unwrap();
    let path = dir.path().join("new.csv");
    write_gram(&path, &run.gram, &run.sidecar()).unwrap();
    let back = read_gram(&path).unwrap();
    assert_eq!(back.values, run.gram.values);
    assert_eq!(back.fingerprint, run.gram.fingerprint);
}

#[test]
fn max_kernel_hand_ranking_counts_seven() {
    // query first, then its nearest shapes under the max kernel
    let ids: Vec<String> = [
        "hand2occ3",
        "handbent1",
        "handbent2",
        "hand",
        "hand90",
        "handdeform2",
        "hand2",
        "dude2",
        "cow2",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    let labels: Vec<String> = ids
        .iter()
        .map(|s| {
            if s.starts_with("hand") {
                "hands".into()
            } else {
                s.clone()
            }
        })
        .collect();
    let d: Vec<f64> = (0..ids.len()).map(|r| r as f64).collect();
    assert_eq!(good_matches(&d, 0, &labels, &ids), 7);
}
