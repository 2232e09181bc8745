#![allow(dead_code)]

pub mod mlp;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use softskill::svm::{primal_objective, SparseVec};

/// Two separable blobs in 2D, labels alternating ±1.
pub fn toy_blobs(seed: u64, n: usize) -> (Vec<SparseVec>, Vec<f64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut xs = Vec::with_capacity(n);
    let mut ys = Vec::with_capacity(n);
    for i in 0..n {
        let y = if i % 2 == 0 { 1.0 } else { -1.0 };
        let gx: f64 = rng.random_range(-1.0..1.0);
        let gy: f64 = rng.random_range(-1.0..1.0);
        xs.push(vec![(0, 1.5 * y + gx), (1, y + gy)]);
        ys.push(y);
    }
    (xs, ys)
}

/// Minimum of the primal objective over `(w0, w1, b)` by a dense grid that
/// is repeatedly re-centred and narrowed around the best point.
pub fn grid_optimum(xs: &[SparseVec], ys: &[f64], c: f64) -> (f64, [f64; 3]) {
    let k = 60;
    let mut lo = [-5.0f64; 3];
    let mut hi = [5.0f64; 3];
    let mut best = (f64::INFINITY, [0.0; 3]);
    for _ in 0..6 {
        for a in 0..=k {
            for b in 0..=k {
                for d in 0..=k {
                    let p = [
                        lo[0] + (hi[0] - lo[0]) * a as f64 / k as f64,
                        lo[1] + (hi[1] - lo[1]) * b as f64 / k as f64,
                        lo[2] + (hi[2] - lo[2]) * d as f64 / k as f64,
                    ];
                    let o = primal_objective(&p[..2], p[2], xs, ys, c);
                    if o < best.0 {
                        best = (o, p);
                    }
                }
            }
        }
        for dim in 0..3 {
            let r = (hi[dim] - lo[dim]) / 8.0;
            lo[dim] = best.1[dim] - r;
            hi[dim] = best.1[dim] + r;
        }
    }
    best
}

use softskill::graph::{Assignment, CoocGraph, Edge, Node, ProjectionMode};
use std::collections::BTreeMap;

pub fn graph_from(n: usize, edges: &[(usize, usize, f64)]) -> CoocGraph {
    let nodes = (0..n)
        .map(|i| Node {
            id: format!("n{i:02}"),
            label: format!("node {i}"),
        })
        .collect();
    let edges = edges.iter().map(|&(u, v, weight)| Edge { u, v, weight }).collect();
    CoocGraph::new(nodes, edges).unwrap()
}

fn clique(nodes: &[usize], out: &mut Vec<(usize, usize, f64)>) {
    for (a, &u) in nodes.iter().enumerate() {
        for &v in &nodes[a + 1..] {
            out.push((u, v, 1.0));
        }
    }
}

/// Two disconnected 4-cliques on nodes 0..4 and 4..8.
pub fn two_cliques() -> CoocGraph {
    let mut e = Vec::new();
    clique(&[0, 1, 2, 3], &mut e);
    clique(&[4, 5, 6, 7], &mut e);
    graph_from(8, &e)
}

/// Three 4-cliques joined in a ring by single bridge edges.
pub fn three_clique_ring() -> CoocGraph {
    let mut e = Vec::new();
    clique(&[0, 1, 2, 3], &mut e);
    clique(&[4, 5, 6, 7], &mut e);
    clique(&[8, 9, 10, 11], &mut e);
    e.extend([(3, 4, 1.0), (7, 8, 1.0), (0, 11, 1.0)]);
    graph_from(12, &e)
}

pub fn random_graph(rng: &mut ChaCha8Rng, n: usize, density: f64) -> CoocGraph {
    let mut e = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.random_bool(density) {
                e.push((u, v, rng.random_range(0.1..5.0)));
            }
        }
    }
    graph_from(n, &e)
}

/// `(1/2m) Σ_ij [A_ij − γ k_i k_j / 2m] δ(c_i, c_j)` over a dense matrix.
pub fn double_sum_modularity(g: &CoocGraph, comm: &[usize], gamma: f64) -> f64 {
    let n = g.node_count();
    let mut a = vec![vec![0.0; n]; n];
    for e in &g.edges {
        a[e.u][e.v] = e.weight;
        a[e.v][e.u] = e.weight;
    }
    let k: Vec<f64> = a.iter().map(|row| row.iter().sum()).collect();
    let two_m: f64 = k.iter().sum();
    let mut q = 0.0;
    for i in 0..n {
        for j in 0..n {
            if comm[i] == comm[j] {
                q += a[i][j] - gamma * k[i] * k[j] / two_m;
            }
        }
    }
    q / two_m
}

/// Best modularity over every set partition (restricted growth strings).
/// Returns the optimum and all partitions attaining it (up to 1e-12).
pub fn exhaustive_optimum(g: &CoocGraph, gamma: f64) -> (f64, Vec<Vec<usize>>) {
    let n = g.node_count();
    let k = g.degrees();
    let two_m: f64 = k.iter().sum();
    let mut best = (f64::NEG_INFINITY, Vec::new());
    let mut rgs = vec![0usize; n];
    let mut maxes = vec![0usize; n];
    loop {
        let blocks = rgs.iter().max().unwrap() + 1;
        let mut inner = vec![0.0; blocks];
        let mut tot = vec![0.0; blocks];
        for i in 0..n {
            tot[rgs[i]] += k[i];
        }
        for e in &g.edges {
            if rgs[e.u] == rgs[e.v] {
                inner[rgs[e.u]] += 2.0 * e.weight;
            }
        }
        let q: f64 = (0..blocks)
            .map(|c| inner[c] / two_m - gamma * (tot[c] / two_m).powi(2))
            .sum();
        if q > best.0 + 1e-12 {
            best = (q, vec![rgs.clone()]);
        } else if (q - best.0).abs() <= 1e-12 {
            best.1.push(rgs.clone());
        }
        // next restricted growth string
        let mut i = n - 1;
        loop {
            if i == 0 {
                return best;
            }
            if rgs[i] <= maxes[i - 1] {
                rgs[i] += 1;
                let m = maxes[i - 1].max(rgs[i]);
                maxes[i] = m;
                for j in i + 1..n {
                    rgs[j] = 0;
                    maxes[j] = m;
                }
                break;
            }
            i -= 1;
        }
    }
}

/// Canonical relabelling so that partitions compare independent of ids.
pub fn canonical(assignment: &[usize]) -> Vec<usize> {
    let mut map = BTreeMap::new();
    assignment
        .iter()
        .map(|&c| {
            let next = map.len();
            *map.entry(c).or_insert(next)
        })
        .collect()
}

pub fn random_assignments(rng: &mut ChaCha8Rng, max_jobs: usize, max_skills: usize) -> Vec<Assignment> {
    let jobs = rng.random_range(1..=max_jobs);
    let skills = rng.random_range(1..=max_skills);
    let rows = rng.random_range(1..=jobs * skills);
    (0..rows)
        .map(|_| {
            let j = rng.random_range(0..jobs);
            let s = rng.random_range(0..skills);
            Assignment::new(&format!("j{j}"), &format!("Job {j}"), &format!("s{s}"), &format!("Skill {s}"))
        })
        .collect()
}

/// Pairwise counting over every unordered node pair, keyed by node ids.
pub fn projection_oracle(rows: &[Assignment], mode: ProjectionMode) -> (Vec<String>, BTreeMap<(String, String), u64>) {
    let (node_of, group_of): (fn(&Assignment) -> &str, fn(&Assignment) -> &str) = match mode {
        ProjectionMode::Skill => (|a| a.skill_id.as_str(), |a| a.job_id.as_str()),
        ProjectionMode::Job => (|a| a.job_id.as_str(), |a| a.skill_id.as_str()),
    };
    let mut nodes: Vec<String> = rows.iter().map(|a| node_of(a).to_string()).collect();
    nodes.sort();
    nodes.dedup();
    let mut groups: Vec<String> = rows.iter().map(|a| group_of(a).to_string()).collect();
    groups.sort();
    groups.dedup();
    let linked = |node: &str, group: &str| rows.iter().any(|a| node_of(a) == node && group_of(a) == group);
    let mut edges = BTreeMap::new();
    for (i, u) in nodes.iter().enumerate() {
        for v in &nodes[i + 1..] {
            let w = groups.iter().filter(|g| linked(u, g) && linked(v, g)).count() as u64;
            if w > 0 {
                edges.insert((u.clone(), v.clone()), w);
            }
        }
    }
    (nodes, edges)
}

pub fn projection_edges(g: &CoocGraph) -> BTreeMap<(String, String), u64> {
    g.edges
        .iter()
        .map(|e| ((g.nodes[e.u].id.clone(), g.nodes[e.v].id.clone()), e.weight as u64))
        .collect()
}

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

pub fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

pub fn softskill(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_softskill"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn checked(args: &[&str]) {
    let out = softskill(args);
    assert!(
        out.status.success(),
        "softskill {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
}

/// Artifacts of the fixture pipeline, in production order.
pub const PIPELINE_ARTIFACTS: [&str; 8] = [
    "clues.tsv",
    "svm.model",
    "eval.tsv",
    "extract.tsv",
    "assignments.csv",
    "partition.tsv",
    "graph.gexf",
    "export.gexf",
];

/// mine-clues, train svm, eval, extract, graph and export-gexf over the
/// fixtures, writing into `dir`. Returns each artifact's bytes.
pub fn run_pipeline(dir: &Path, seed: u64) -> BTreeMap<String, Vec<u8>> {
    let p = |name: &str| dir.join(name).to_string_lossy().into_owned();
    let f = |name: &str| fixture(name).to_string_lossy().into_owned();
    let seed = seed.to_string();
    let global = ["--quiet", "--seed", seed.as_str()];
    let run = |rest: &[&str]| {
        let args: Vec<&str> = global.iter().copied().chain(rest.iter().copied()).collect();
        checked(&args);
    };
    run(&["mine-clues", "--corpus", &f("corpus.conll"), "--seeds", &f("seeds.tsv"), "--out", &p("clues.tsv")]);
    run(&["train", "--model", "svm", "--corpus", &f("corpus.conll"), "--out", &p("svm.model")]);
    run(&["eval", "--model", &p("svm.model"), "--corpus", &f("corpus.conll"), "--out", &p("eval.tsv")]);
    run(&[
        "extract",
        "--model",
        &p("svm.model"),
        "--skills",
        &f("skills.csv"),
        "--occupations",
        &f("occupations.csv"),
        "--relations",
        &f("relations.csv"),
        "--annotator",
        "external-conll",
        "--conll",
        &f("skills.conll"),
        "--out",
        &p("extract.tsv"),
        "--assignments-out",
        &p("assignments.csv"),
    ]);
    run(&["graph", "--assignments", &p("assignments.csv"), "--out", &p("partition.tsv"), "--gexf", &p("graph.gexf")]);
    run(&[
        "export-gexf",
        "--assignments",
        &p("assignments.csv"),
        "--partition",
        &p("partition.tsv"),
        "--out",
        &p("export.gexf"),
    ]);
    PIPELINE_ARTIFACTS
        .iter()
        .map(|name| (name.to_string(), std::fs::read(dir.join(name)).expect("artifact written")))
        .collect()
}
