use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use bagpaths::harness::io::{read_gram, sibling, write_gram, write_json};
use bagpaths::harness::{
    load_graph, run_classification, run_retrieval, Dataset, DatasetManifest, KernelSelector, ManifestEntry, RunConfig,
};
use bagpaths::ingest::{max_spanning_tree, read_graph, write_graph};
use bagpaths::paths::{build_hierarchy, enumerate_bag, Path as TreePath, ReductionTree};
use clap::{Parser, Subcommand};
use serde_json::json;

#[derive(Parser)]
#[command(
    name = "bagpaths",
    version,
    about = "Bag-of-paths kernels for skeleton-based shape matching"
)]
struct Cli {
    /// Worker threads for parallel stages (default: all cores).
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Skeletonize every mask of a manifest into graph JSON documents.
    Ingest {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Compute a Gram matrix CSV (plus a JSON sidecar).
    Gram {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long)]
        kernel: KernelSelector,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Good-matches retrieval report from a Gram matrix.
    Retrieve {
        #[arg(long)]
        gram: PathBuf,
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "hands,tools,dudes")]
        classes: Vec<String>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Zero-false-positive one-vs-rest classification report.
    Classify {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long)]
        kernel: KernelSelector,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value_t = 5)]
        train_per_class: usize,
        #[arg(long, value_delimiter = ',', default_value = "hands,tools,dudes")]
        classes: Vec<String>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print the reduction hierarchy of one path of a shape.
    ReduceDemo {
        /// Graph JSON or mask image.
        #[arg(long)]
        graph: PathBuf,
        /// Comma-separated node ids of the spanning tree.
        #[arg(long)]
        path: String,
        #[arg(long = "D", default_value_t = 2)]
        max_reductions: usize,
    },
    /// Write the bag of paths of one shape as JSON.
    DumpBag {
        /// Graph JSON or mask image.
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
}

fn load_config(path: Option<&Path>) -> Result<RunConfig> {
    match path {
        None => Ok(RunConfig::default()),
        Some(p) => {
            let text = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            Ok(RunConfig::parse(&text)?)
        }
    }
}

fn write_resolved(out: &Path, value: serde_json::Value) -> Result<()> {
    write_json(&sibling(out, "config.json"), &value)?;
    Ok(())
}

fn shape_stem(path: &Path) -> String {
    path.file_stem()
        .map_or_else(|| "shape".into(), |s| s.to_string_lossy().into_owned())
}

fn load_any_graph(path: &Path) -> Result<bagpaths::ingest::SkeletalGraph> {
    if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json")) {
        Ok(read_graph(path)?)
    } else {
        Ok(load_graph(path, &shape_stem(path), "unlabeled")?)
    }
}

fn report_failures(failed: &[bagpaths::harness::FailedShape]) {
    for f in failed {
        eprintln!("skipped {}: {}", f.shape_id, f.reason);
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Ingest { manifest, out, config } => {
            let cfg = load_config(config.as_deref())?;
            let man = DatasetManifest::load(&manifest)?;
            fs::create_dir_all(&out).with_context(|| format!("creating {}", out.display()))?;
            let mut entries = Vec::new();
            let mut failed = Vec::new();
            for e in &man.entries {
                match load_graph(&e.path, &e.shape_id, &e.class_label) {
                    Ok(g) => {
                        let file = out.join(format!("{}.json", e.shape_id));
                        write_graph(&file, &g).with_context(|| format!("writing {}", file.display()))?;
                        entries.push(ManifestEntry {
                            shape_id: e.shape_id.clone(),
                            path: PathBuf::from(format!("{}.json", e.shape_id)),
                            class_label: e.class_label.clone(),
                        });
                    }
                    Err(err) => failed.push(json!({"shape_id": e.shape_id, "reason": err.to_string()})),
                }
            }
            let graphs = out.join(format!("{}.csv", man.name));
            DatasetManifest::new(man.name.clone(), entries)?.save(&graphs)?;
            write_resolved(
                &graphs,
                json!({"command": "ingest", "manifest": manifest, "config": cfg, "failed_shapes": failed}),
            )?;
            println!(
                "wrote {} graphs, {} failed; manifest {}",
                man.len() - failed.len(),
                failed.len(),
                graphs.display()
            );
        }
        Command::Gram {
            manifest,
            kernel,
            config,
            out,
        } => {
            let cfg = load_config(config.as_deref())?;
            let data = Dataset::load(&DatasetManifest::load(&manifest)?, &cfg);
            let run = data.gram(kernel, &cfg)?;
            report_failures(&run.failed);
            write_gram(&out, &run.gram, &run.sidecar())?;
            write_resolved(
                &out,
                json!({"command": "gram", "manifest": manifest, "kernel": kernel, "config": cfg}),
            )?;
            println!(
                "{}: {} shapes, eigenvalues [{:.3e}, {:.3e}], tags {:?}",
                out.display(),
                run.gram.len(),
                run.min_eigenvalue,
                run.max_eigenvalue,
                run.gram.tags
            );
        }
        Command::Retrieve {
            gram,
            manifest,
            classes,
            out,
        } => {
            let g = read_gram(&gram)?;
            let man = DatasetManifest::load(&manifest)?;
            let labels = g
                .ids
                .iter()
                .map(|id| {
                    man.entries
                        .iter()
                        .find(|e| &e.shape_id == id)
                        .map(|e| e.class_label.clone())
                        .with_context(|| format!("shape {id} is not in the manifest"))
                })
                .collect::<Result<Vec<_>>>()?;
            let report = run_retrieval(&g, &labels, &classes);
            fs::write(&out, report.to_csv()).with_context(|| format!("writing {}", out.display()))?;
            write_resolved(
                &out,
                json!({"command": "retrieve", "gram": gram, "manifest": manifest, "classes": classes, "fingerprint": g.fingerprint}),
            )?;
            for c in &report.per_class {
                println!(
                    "{}: mean good matches {:.2} over {} shapes",
                    c.class_label, c.mean_good_matches, c.shapes
                );
            }
        }
        Command::Classify {
            manifest,
            kernel,
            config,
            train_per_class,
            classes,
            out,
        } => {
            let cfg = load_config(config.as_deref())?;
            let data = Dataset::load(&DatasetManifest::load(&manifest)?, &cfg);
            let run = data.gram(kernel, &cfg)?;
            report_failures(&run.failed);
            let report = run_classification(&run.gram, &run.labels, &classes, train_per_class, &cfg.c_grid)?;
            fs::write(&out, report.to_csv()).with_context(|| format!("writing {}", out.display()))?;
            write_resolved(
                &out,
                json!({"command": "classify", "manifest": manifest, "kernel": kernel, "config": cfg, "train_per_class": train_per_class, "classes": classes}),
            )?;
            for c in &report.per_class {
                let flag = if c.no_feasible_c {
                    " (no C without false positives)"
                } else {
                    ""
                };
                println!(
                    "{}: recognized {}/{} with C = {}, FP = {}{flag}",
                    c.class_label, c.recognized, c.class_size, c.c, c.false_positives
                );
            }
        }
        Command::ReduceDemo {
            graph,
            path,
            max_reductions,
        } => {
            let tree = max_spanning_tree(&load_any_graph(&graph)?)?;
            let nodes = path
                .split(',')
                .map(|s| s.trim().parse::<usize>().with_context(|| format!("bad node id {s:?}")))
                .collect::<Result<Vec<_>>>()?;
            let scratch = ReductionTree::from(&tree);
            let start = TreePath::from_tree(&scratch, &nodes)?;
            let h = build_hierarchy(scratch, start, max_reductions)?;
            for (j, level) in h.levels.iter().enumerate() {
                let weights: Vec<String> = level.edges.iter().map(|e| format!("{:.4}", e.weight)).collect();
                println!("level {j}: nodes {:?} weights [{}]", level.nodes, weights.join(", "));
                if let Some(op) = h.ops.get(j) {
                    println!("  op: {:?} at {} cost {:.4}", op.kind, op.index, op.cost);
                }
            }
        }
        Command::DumpBag { graph, config, out } => {
            let cfg = load_config(config.as_deref())?;
            let g = load_any_graph(&graph)?;
            let bag = enumerate_bag(&max_spanning_tree(&g)?, cfg.max_length, cfg.max_reductions)?;
            fs::write(&out, bag.to_json() + "\n").with_context(|| format!("writing {}", out.display()))?;
            write_resolved(&out, json!({"command": "dump-bag", "graph": graph, "config": cfg}))?;
            println!("{}: {} paths", out.display(), bag.len());
        }
    }
    Ok(())
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    if let Some(n) = cli.workers {
        if n == 0 {
            bail!("--workers must be at least 1");
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("configuring the worker pool")?;
    }
    run(cli)
}
