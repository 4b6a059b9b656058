//! One-vs-rest recognition with a binary SVM on a precomputed Gram matrix.

use serde::{Deserialize, Serialize};

use super::HarnessError;
use crate::svm::{select_margin_parameter, GramMatrix, INDEFINITE_TAG};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassResult {
    pub class_label: String,
    /// Shapes of the class in the dataset.
    pub class_size: usize,
    pub training_ids: Vec<String>,
    /// Shapes of the class predicted positive.
    pub recognized: usize,
    pub false_positives: usize,
    pub c: f64,
    /// Every C of the grid let a foreign shape through.
    pub no_feasible_c: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationReport {
    pub fingerprint: String,
    pub tags: Vec<String>,
    pub train_per_class: usize,
    pub per_class: Vec<ClassResult>,
}

impl ClassificationReport {
    pub fn recognized(&self, class: &str) -> Option<usize> {
        self.per_class
            .iter()
            .find(|c| c.class_label == class)
            .map(|c| c.recognized)
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record([
            "class_label",
            "class_size",
            "recognized",
            "false_positives",
            "c",
            "no_feasible_c",
        ])
        .expect("in-memory write");
        for r in &self.per_class {
            w.write_record([
                r.class_label.clone(),
                r.class_size.to_string(),
                r.recognized.to_string(),
                r.false_positives.to_string(),
                r.c.to_string(),
                r.no_feasible_c.to_string(),
            ])
            .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("CSV is UTF-8")
    }
}

/// Training indices for `target`: its first `train_per_class` shapes plus the
/// first shape of every other class, all in dataset order.
pub fn training_set(labels: &[String], target: &str, train_per_class: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut taken: Vec<&str> = Vec::new();
    let mut positives = 0;
    for (i, l) in labels.iter().enumerate() {
        if l == target {
            if positives < train_per_class {
                positives += 1;
                out.push(i);
            }
        } else if !taken.contains(&l.as_str()) {
            taken.push(l);
            out.push(i);
        }
    }
    out
}

/// For each target class (all classes when empty), trains a one-vs-rest SVM
/// and picks C from `c_grid` to recognize the most shapes of the class over
/// the whole dataset with no false positive.
pub fn run_classification(
    gram: &GramMatrix,
    labels: &[String],
    classes: &[String],
    train_per_class: usize,
    c_grid: &[f64],
) -> Result<ClassificationReport, HarnessError> {
    if labels.len() != gram.len() {
        return Err(HarnessError::Config("one label per Gram row is required".into()));
    }
    if train_per_class == 0 {
        return Err(HarnessError::Config("train_per_class must be at least 1".into()));
    }
    let targets: Vec<String> = if classes.is_empty() {
        let mut seen: Vec<String> = Vec::new();
        for l in labels {
            if !seen.contains(l) {
                seen.push(l.clone());
            }
        }
        seen
    } else {
        classes.to_vec()
    };
    let all: Vec<usize> = (0..gram.len()).collect();
    let mut per_class = Vec::new();
    for target in &targets {
        let train = training_set(labels, target, train_per_class);
        let sign = |i: usize| if &labels[i] == target { 1i8 } else { -1 };
        let train_labels: Vec<i8> = train.iter().map(|&i| sign(i)).collect();
        let mut train_gram = gram.submatrix(&train);
        train_gram.tags = gram.tags.clone();
        let block = gram.block(&all, &train);
        let eval_rows: Vec<Vec<f64>> = block.chunks(train.len()).map(<[f64]>::to_vec).collect();
        let eval_labels: Vec<i8> = all.iter().map(|&i| sign(i)).collect();
        let sel = select_margin_parameter(&train_gram, &train_labels, &eval_rows, &eval_labels, c_grid)?;
        per_class.push(ClassResult {
            class_label: target.clone(),
            class_size: labels.iter().filter(|l| *l == target).count(),
            training_ids: train.iter().map(|&i| gram.ids[i].clone()).collect(),
            recognized: sel.true_positives,
            false_positives: sel.false_positives,
            c: sel.c,
            no_feasible_c: sel.no_feasible_c,
        });
    }
    Ok(ClassificationReport {
        fingerprint: gram.fingerprint.clone(),
        tags: gram
            .tags
            .iter()
            .filter(|t| t.as_str() == INDEFINITE_TAG)
            .cloned()
            .collect(),
        train_per_class,
        per_class,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::svm::DEFAULT_C_GRID;

    fn clustered(labels: &[&str], spread: f64) -> (GramMatrix, Vec<String>) {
        // Gaussian kernel on 1-D points, one cluster per class
        let centers = ["a", "b", "c"];
        let xs: Vec<f64> = labels
            .iter()
            .enumerate()
            .map(|(i, l)| centers.iter().position(|c| c == l).unwrap() as f64 * 10.0 + spread * (i % 4) as f64)
            .collect();
        let n = xs.len();
        let values = (0..n * n)
            .map(|t| (-(xs[t / n] - xs[t % n]).powi(2) / 8.0).exp())
            .collect();
        let gram = GramMatrix::new((0..n).map(|i| format!("s{i:02}")).collect(), values).unwrap();
        (gram, labels.iter().map(|s| s.to_string()).collect())
    }

    #[test]
    fn training_set_takes_first_shapes() {
        let labels: Vec<String> = ["a", "b", "a", "c", "b", "a", "a"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        assert_eq!(training_set(&labels, "a", 2), vec![0, 1, 2, 3]);
        assert_eq!(training_set(&labels, "b", 5), vec![0, 1, 3, 4]);
    }

    #[test]
    fn separable_classes_are_fully_recognized() {
        let names = [
            "a", "a", "a", "a", "b", "b", "b", "b", "c", "c", "c", "c", "a", "b", "c",
        ];
        let (gram, labels) = clustered(&names, 0.5);
        let r = run_classification(&gram, &labels, &[], 2, &DEFAULT_C_GRID).unwrap();
        for c in &r.per_class {
            assert_eq!(c.false_positives, 0);
            assert!(!c.no_feasible_c);
            assert_eq!(c.recognized, c.class_size, "{}", c.class_label);
        }
        assert!(r.tags.is_empty());
        assert_eq!(r.to_csv().lines().count(), 4);
    }

    #[test]
    fn indefinite_tag_is_reported() {
        let (mut gram, labels) = clustered(&["a", "b", "a", "b"], 0.2);
        gram.tags.push(INDEFINITE_TAG.into());
        let r = run_classification(&gram, &labels, &["a".into()], 1, &[1.0]).unwrap();
        assert_eq!(r.tags, vec![INDEFINITE_TAG.to_string()]);
        assert_eq!(r.per_class.len(), 1);
        assert_eq!(r.recognized("a"), Some(2));
    }
}
