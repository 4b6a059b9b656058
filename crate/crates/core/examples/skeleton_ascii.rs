//! Prints skeletons of a few synthetic shapes as ASCII art.

use bagpaths::ingest::skeleton::render_ascii;
use bagpaths::ingest::{build_graph, skeletonize};
use bagpaths::synth;

fn main() {
    let mut shapes = vec![
        synth::disk("disk", 9.0),
        synth::annulus("ring", 26, 8),
        synth::square("square", 21, 2),
        synth::square_with_protrusion("protruded", 21, 2, 5, 3),
        synth::plus("plus", 15, 2),
    ];
    let seeds: Vec<u64> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    for seed in seeds {
        shapes.push(synth::random_polygon(&format!("poly{seed}"), seed, 48));
    }
    for img in shapes {
        let sk = skeletonize(&img);
        let g = build_graph(&sk, &img).unwrap();
        println!(
            "{} nodes={} edges={} holes={}",
            img.id,
            g.nodes.len(),
            g.edges.len(),
            img.count_holes()
        );
        for e in &g.edges {
            println!("  {}-{} w={:.4} a={:.3}", e.u, e.v, e.weight, e.angle);
        }
        print!("{}", render_ascii(&img, &sk));
    }
}
