use std::f64::consts::PI;

use super::*;
use crate::ingest::{graph_from_image, max_spanning_tree};
use crate::kernels::PathKernelConfig;
use crate::paths::{enumerate_bag, EdgeAttr, Path};
use crate::synth;

fn hier(attrs: &[f64], edges: &[(f64, f64)]) -> PathHierarchy {
    PathHierarchy {
        levels: vec![Path {
            nodes: (0..attrs.len()).collect(),
            node_attrs: attrs.to_vec(),
            edges: edges
                .iter()
                .map(|&(weight, angle)| EdgeAttr { weight, angle })
                .collect(),
        }],
        ops: Vec::new(),
        max_reductions: 0,
    }
}

fn bag(id: &str, hs: Vec<PathHierarchy>) -> BagOfPaths {
    BagOfPaths {
        shape_id: id.into(),
        class: None,
        max_length: 5,
        max_reductions: 0,
        hierarchies: hs,
    }
}

fn classic() -> PathKernel {
    PathKernel::classic(PathKernelConfig {
        sigma_vertex: 0.1,
        sigma_edge: 0.1,
        max_reductions: 0,
    })
}

fn kernel(kind: BagKernelKind) -> BagKernel {
    BagKernel {
        kind,
        path: classic(),
        config: BagKernelConfig::default(),
    }
}

fn h1() -> PathHierarchy {
    hier(&[0.0, 0.0], &[(0.5, 0.3)])
}

fn h2() -> PathHierarchy {
    hier(&[0.1, 0.0], &[(0.5, 0.3)])
}

fn mixed() -> BagOfPaths {
    bag(
        "m",
        vec![
            h1(),
            h2(),
            hier(&[0.3, 0.2], &[(0.2, 1.0)]),
            hier(&[0.3, 0.2, 0.5], &[(0.2, 1.0), (0.1, 2.0)]),
            hier(&[0.35, 0.2, 0.5], &[(0.25, 1.1), (0.1, 2.0)]),
        ],
    )
}

#[test]
fn normalization_examples() {
    assert_eq!(normalize(0.5, 1.0, 0.25), Some(1.0));
    assert_eq!(normalize(0.7, 1.0, 1.0), Some(0.7));
    assert_eq!(normalize(0.7, 0.0, 1.0), None);
}

#[test]
fn empty_bags_are_rejected() {
    assert_eq!(
        kernel(BagKernelKind::Max).prepare(&bag("e", vec![])).unwrap_err(),
        KernelError::EmptyBag
    );
    assert_eq!(k_max(0, 3, &[]), Err(KernelError::EmptyBag));
}

#[test]
fn max_kernel_examples() {
    let k = kernel(BagKernelKind::Max);
    let p = k.prepare(&mixed()).unwrap();
    assert!((k.eval(&p, &p).unwrap() - 1.0).abs() < 1e-15);

    let (a, b) = (
        k.prepare(&bag("a", vec![h1()])).unwrap(),
        k.prepare(&bag("b", vec![h2()])).unwrap(),
    );
    let expected = (-0.5f64).exp();
    assert!((k.eval(&a, &b).unwrap() - expected).abs() < 1e-12);
    assert_eq!(k.eval(&a, &b).unwrap(), k.eval(&b, &a).unwrap());

    let long = k.prepare(&bag("l", vec![hier(&[0.0; 3], &[(0.1, 0.0); 2])])).unwrap();
    assert_eq!(k.eval(&a, &long).unwrap(), 0.0);
}

#[test]
fn matching_kernel_examples() {
    let k = kernel(BagKernelKind::Matching);
    let a = k.prepare(&bag("a", vec![h1()])).unwrap();
    assert!((k.eval(&a, &a).unwrap() - 1.0).abs() < 1e-15);
    // orthogonal singletons: d² = 2 and σ = 1
    let long = k.prepare(&bag("l", vec![hier(&[0.0; 3], &[(0.1, 0.0); 2])])).unwrap();
    assert!((k.eval(&a, &long).unwrap() - (-1.0f64).exp()).abs() < 1e-15);

    let m = mixed();
    let mut doubled = m.clone();
    doubled.hierarchies.extend(m.hierarchies.clone());
    let (pm, pd) = (k.prepare(&m).unwrap(), k.prepare(&doubled).unwrap());
    let other = k
        .prepare(&bag("o", vec![h2(), hier(&[0.3, 0.25], &[(0.2, 0.9)])]))
        .unwrap();
    let (x, y) = (k.eval(&pm, &other).unwrap(), k.eval(&pd, &other).unwrap());
    assert!((x - y).abs() <= 1e-12 * x);
}

#[test]
fn mean_vector_geometry_examples() {
    let k = kernel(BagKernelKind::Change);
    let p = k.prepare(&mixed()).unwrap();
    assert_eq!(k.d_change(&p, &p).unwrap(), 0.0);
    assert!((k.eval(&p, &p).unwrap() - 1.0).abs() < 1e-15);

    let (a, b) = (
        k.prepare(&bag("a", vec![h1()])).unwrap(),
        k.prepare(&bag("b", vec![h2()])).unwrap(),
    );
    let cross = cross_gram(&a, &b, &k.path).unwrap();
    let cos = mean_vector_cos(&cross, a.model.as_ref().unwrap(), b.model.as_ref().unwrap()).unwrap();
    assert!((cos - (-0.5f64).exp()).abs() < 1e-12);

    assert_eq!(d_change(1.0 + 1e-12), 0.0);
    assert!((d_change(0.0) - PI / 2.0).abs() < 1e-15);
    assert!((d_change(0.5) - PI / 3.0).abs() < 1e-15);
    assert!((k_change(PI / 2.0, 0.3) - (-(PI / 2.0).powi(2) / 0.18).exp()).abs() < 1e-20);
    assert!((k_change(PI / 2.0, 0.3) - 1.1e-6).abs() < 0.1e-6);
    assert!((k_change(0.3, 0.3) - (-0.5f64).exp()).abs() < 1e-15);
}

#[test]
fn degenerate_model_is_reported() {
    let m = OneClassModel {
        alpha: vec![1.0],
        rho: 0.0,
        support_ids: vec![0],
        norm_w: 0.0,
        nu: 1.0,
        config_fingerprint: String::new(),
        tags: Vec::new(),
    };
    assert_eq!(mean_vector_cos(&[1.0], &m, &m), Err(KernelError::DegenerateModel));
}

#[test]
fn desobry_distance_examples() {
    let k = kernel(BagKernelKind::Change);
    let p = k.prepare(&mixed()).unwrap();
    assert_eq!(k.d_desobry(&p, &p).unwrap(), 0.0);
    let (a, b) = (
        k.prepare(&bag("a", vec![h1()])).unwrap(),
        k.prepare(&bag("b", vec![h2()])).unwrap(),
    );
    assert_eq!(k.d_desobry(&a, &b), Err(KernelError::ZeroDenominator));
}

#[test]
fn suard_kernel_examples() {
    let k = kernel(BagKernelKind::Suard);
    let (a, b) = (
        k.prepare(&bag("a", vec![h1()])).unwrap(),
        k.prepare(&bag("b", vec![h2()])).unwrap(),
    );
    assert!((k.eval(&a, &b).unwrap() - (-0.5f64).exp()).abs() < 1e-12);
    let p = k.prepare(&mixed()).unwrap();
    let m = p.model.as_ref().unwrap();
    assert!((k.eval(&p, &p).unwrap() - m.rho * m.rho * m.norm_w * m.norm_w).abs() < 1e-12);
    let v = k.eval(&p, &a).unwrap();
    let ma = a.model.as_ref().unwrap();
    assert!(v.abs() <= m.rho * ma.rho * m.norm_w * ma.norm_w + 1e-12);
}

#[test]
fn models_are_required_for_change_kernels() {
    let prepared = kernel(BagKernelKind::Max).prepare(&mixed()).unwrap();
    assert!(matches!(
        kernel(BagKernelKind::Change).eval(&prepared, &prepared),
        Err(KernelError::InvalidParameter(_))
    ));
}

fn shape_bag(img: &crate::ingest::ShapeImage, d: usize) -> BagOfPaths {
    let tree = max_spanning_tree(&graph_from_image(img).unwrap()).unwrap();
    enumerate_bag(&tree, 5, d).unwrap()
}

fn shape_bags() -> Vec<BagOfPaths> {
    (0..8)
        .map(|s| shape_bag(&synth::random_polygon(&format!("r{s}"), 100 + s, 48), 2))
        .collect()
}

fn all_kernels() -> Vec<BagKernel> {
    let cfg = PathKernelConfig::default();
    let mut out = Vec::new();
    for kind in [
        BagKernelKind::Max,
        BagKernelKind::Matching,
        BagKernelKind::Change,
        BagKernelKind::Suard,
    ] {
        for path in [PathKernel::classic(cfg), PathKernel::edit(cfg)] {
            out.push(BagKernel {
                kind,
                path,
                config: BagKernelConfig::default(),
            });
        }
    }
    out
}

#[test]
fn bag_kernels_are_symmetric_and_permutation_invariant() {
    use rand::seq::SliceRandom;
    use rand::SeedableRng;
    let bags = shape_bags();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
    for k in all_kernels() {
        let prepared: Vec<_> = bags.iter().map(|b| k.prepare(b).unwrap()).collect();
        for i in 0..3 {
            let mut shuffled = bags[i].clone();
            shuffled.hierarchies.shuffle(&mut rng);
            let ps = k.prepare(&shuffled).unwrap();
            for j in 0..bags.len() {
                let (x, y) = (
                    k.eval(&prepared[i], &prepared[j]).unwrap(),
                    k.eval(&prepared[j], &prepared[i]).unwrap(),
                );
                assert!((x - y).abs() <= 1e-12 * x.abs().max(1e-300), "{:?} asymmetric", k.kind);
                let z = k.eval(&ps, &prepared[j]).unwrap();
                assert!(
                    (x - z).abs() <= 1e-12 * x.abs().max(1e-300),
                    "{:?} order-dependent",
                    k.kind
                );
            }
        }
    }
}

#[test]
fn psd_kernels_have_psd_grams_and_d_change_is_a_metric() {
    let bags = shape_bags();
    let n = bags.len();
    for k in all_kernels().into_iter().filter(|k| k.kind.is_psd()) {
        let prepared: Vec<_> = bags.iter().map(|b| k.prepare(b).unwrap()).collect();
        let gram: Vec<f64> = (0..n * n)
            .map(|t| k.eval(&prepared[t / n], &prepared[t % n]).unwrap())
            .collect();
        let (min, max) = crate::linalg::eigen_extremes(n, &gram);
        assert!(
            min >= -1e-8 * max,
            "{:?}/{:?}: min {min} max {max}",
            k.kind,
            k.path.kind
        );
        if k.kind == BagKernelKind::Change {
            let d: Vec<f64> = (0..n * n)
                .map(|t| k.d_change(&prepared[t / n], &prepared[t % n]).unwrap())
                .collect();
            for a in 0..n {
                assert_eq!(d[a * n + a], 0.0);
                for b in 0..n {
                    assert!((0.0..=PI).contains(&d[a * n + b]));
                    for c in 0..n {
                        assert!(d[a * n + c] <= d[a * n + b] + d[b * n + c] + 1e-9);
                    }
                }
            }
        }
    }
}
