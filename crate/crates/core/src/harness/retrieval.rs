//! Retrieval by kernel distance and the good-matches score.

use serde::{Deserialize, Serialize};

use crate::svm::{GramMatrix, INDEFINITE_TAG};

/// `√max(0, k(x,x) + k(x',x') − 2k(x,x'))`; the clamp absorbs the small
/// negative values indefinite kernels can produce.
pub fn kernel_distance(k_xx: f64, k_yy: f64, k_xy: f64) -> f64 {
    (k_xx + k_yy - 2.0 * k_xy).max(0.0).sqrt()
}

/// Ranks every shape by its distance to the query (ties by shape id) and
/// counts the shapes of the query's class ranked before the first shape of
/// another class. The query itself is part of the ranking.
pub fn good_matches(distances: &[f64], query: usize, labels: &[String], ids: &[String]) -> usize {
    let mut order: Vec<usize> = (0..distances.len()).collect();
    order.sort_by(|&a, &b| distances[a].total_cmp(&distances[b]).then_with(|| ids[a].cmp(&ids[b])));
    order.iter().take_while(|&&i| labels[i] == labels[query]).count()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShapeMatches {
    pub shape_id: String,
    pub class_label: String,
    pub good_matches: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassMean {
    pub class_label: String,
    pub shapes: usize,
    pub mean_good_matches: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RetrievalReport {
    pub fingerprint: String,
    pub tags: Vec<String>,
    pub per_shape: Vec<ShapeMatches>,
    pub per_class: Vec<ClassMean>,
}

impl RetrievalReport {
    pub fn mean(&self, class: &str) -> Option<f64> {
        self.per_class
            .iter()
            .find(|c| c.class_label == class)
            .map(|c| c.mean_good_matches)
    }

    /// Per-shape rows followed by per-class means.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["kind", "id", "class_label", "value"])
            .expect("in-memory write");
        for s in &self.per_shape {
            w.write_record(["shape", &s.shape_id, &s.class_label, &s.good_matches.to_string()])
                .expect("in-memory write");
        }
        for c in &self.per_class {
            w.write_record([
                "class_mean",
                &c.class_label,
                &c.class_label,
                &c.mean_good_matches.to_string(),
            ])
            .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("CSV is UTF-8")
    }
}

/// Good matches for every shape of `classes` (all classes when empty),
/// ranking against the whole Gram matrix.
pub fn run_retrieval(gram: &GramMatrix, labels: &[String], classes: &[String]) -> RetrievalReport {
    let n = gram.len();
    let wanted = |c: &String| classes.is_empty() || classes.contains(c);
    let mut per_shape = Vec::new();
    for q in (0..n).filter(|&q| wanted(&labels[q])) {
        let d: Vec<f64> = (0..n)
            .map(|j| kernel_distance(gram.get(q, q), gram.get(j, j), gram.get(q, j)))
            .collect();
        per_shape.push(ShapeMatches {
            shape_id: gram.ids[q].clone(),
            class_label: labels[q].clone(),
            good_matches: good_matches(&d, q, labels, &gram.ids),
        });
    }
    let order: Vec<String> = if classes.is_empty() {
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
    let per_class = order
        .iter()
        .filter_map(|c| {
            let counts: Vec<usize> = per_shape
                .iter()
                .filter(|s| &s.class_label == c)
                .map(|s| s.good_matches)
                .collect();
            (!counts.is_empty()).then(|| ClassMean {
                class_label: c.clone(),
                shapes: counts.len(),
                mean_good_matches: counts.iter().sum::<usize>() as f64 / counts.len() as f64,
            })
        })
        .collect();
    RetrievalReport {
        fingerprint: gram.fingerprint.clone(),
        tags: gram
            .tags
            .iter()
            .filter(|t| t.as_str() == INDEFINITE_TAG)
            .cloned()
            .collect(),
        per_shape,
        per_class,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn strings(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn distance_examples() {
        assert_eq!(kernel_distance(1.0, 1.0, 1.0), 0.0);
        assert!((kernel_distance(1.0, 1.0, 0.0) - 2f64.sqrt()).abs() < 1e-15);
        assert!((kernel_distance(1.0, 1.0, 0.6065) - 0.887).abs() < 1e-3);
        assert_eq!(kernel_distance(1.0, 1.0, 1.0 + 1e-9), 0.0);
    }

    #[test]
    fn hand_ranking_counts_nine() {
        // query followed by its ten nearest shapes in ranking order
        let ids = strings(&[
            "hand2occ3",
            "handbent1",
            "hand",
            "handbent2",
            "hand90",
            "hand2",
            "handdeform2",
            "handdeform",
            "hand3",
            "dude2",
            "cow2",
        ]);
        let labels: Vec<String> = ids
            .iter()
            .map(|s| s.trim_end_matches(char::is_numeric).trim_end_matches("occ").to_string())
            .map(|s| if s.starts_with("hand") { "hands".into() } else { s })
            .collect();
        let d: Vec<f64> = (0..ids.len()).map(|r| r as f64 * 0.1).collect();
        assert_eq!(good_matches(&d, 0, &labels, &ids), 9);
    }

    #[test]
    fn only_the_query_when_nearest_differs() {
        let ids = strings(&["a", "b", "c"]);
        let labels = strings(&["x", "y", "x"]);
        assert_eq!(good_matches(&[0.0, 0.1, 0.2], 0, &labels, &ids), 1);
        // a tie with a different class is broken by shape id
        assert_eq!(good_matches(&[0.0, 0.1, 0.1], 0, &labels, &ids), 1);
        let ids = strings(&["a", "c", "b"]);
        assert_eq!(good_matches(&[0.0, 0.1, 0.1], 0, &labels, &ids), 2);
        assert_eq!(good_matches(&[0.0, 0.2, 0.1], 0, &labels, &ids), 2);
    }

    #[test]
    fn block_diagonal_gram_gives_class_sizes() {
        let labels = strings(&["p", "p", "p", "q", "q", "r"]);
        let n = labels.len();
        let values = (0..n * n)
            .map(|t| if labels[t / n] == labels[t % n] { 1.0 } else { 0.0 })
            .collect();
        let ids = (0..n).map(|i| format!("s{i}")).collect();
        let gram = GramMatrix::new(ids, values).unwrap();
        let r = run_retrieval(&gram, &labels, &[]);
        assert_eq!(r.mean("p"), Some(3.0));
        assert_eq!(r.mean("q"), Some(2.0));
        assert_eq!(r.mean("r"), Some(1.0));
        let only = run_retrieval(&gram, &labels, &strings(&["q"]));
        assert_eq!(only.per_shape.len(), 2);
        assert!(only.to_csv().contains("class_mean,q,q,2"));
    }

    /// Direct reading of the definition: walk the shapes by increasing
    /// (distance, id) and stop at the first foreign class.
    fn brute_force(d: &[f64], q: usize, labels: &[String], ids: &[String]) -> usize {
        let n = d.len();
        let mut used = vec![false; n];
        let mut count = 0;
        for _ in 0..n {
            let mut best: Option<usize> = None;
            for j in 0..n {
                if used[j] {
                    continue;
                }
                best = match best {
                    None => Some(j),
                    Some(b) if d[j] < d[b] || (d[j] == d[b] && ids[j] < ids[b]) => Some(j),
                    keep => keep,
                };
            }
            let b = best.unwrap();
            used[b] = true;
            if labels[b] != labels[q] {
                break;
            }
            count += 1;
        }
        count
    }

    proptest! {
        #[test]
        fn good_matches_matches_brute_force(
            raw in proptest::collection::vec((0u8..4, 0u8..3), 1..=8),
            q in any::<prop::sample::Index>(),
        ) {
            let n = raw.len();
            let q = q.index(n);
            let mut d: Vec<f64> = raw.iter().map(|&(t, _)| 0.1 + t as f64 * 0.25).collect();
            d[q] = 0.0;
            let labels: Vec<String> = raw.iter().map(|&(_, c)| format!("c{c}")).collect();
            let ids: Vec<String> = (0..n).map(|i| format!("id{}", (i * 7) % n)).collect();
            prop_assert_eq!(good_matches(&d, q, &labels, &ids), brute_force(&d, q, &labels, &ids));
        }
    }
}
