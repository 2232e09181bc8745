//! Skill and job co-occurrence graphs, Louvain clustering and GEXF I/O.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;
use std::path::Path;

use quick_xml::escape::escape;
use quick_xml::events::{BytesStart, Event};
use quick_xml::Reader;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;
use thiserror::Error;

/// Gains smaller than this are treated as no gain.
const GAIN_EPS: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("graph has no edge weight; modularity is undefined")]
    EmptyGraph,
    #[error("partition covers {got} nodes but the graph has {expected}")]
    PartitionSize { expected: usize, got: usize },
    #[error("edge ({u}, {v}) is invalid: {reason}")]
    BadEdge { u: usize, v: usize, reason: String },
    #[error("duplicate node id {0:?}")]
    DuplicateNode(String),
    #[error("GEXF: {0}")]
    Gexf(String),
    #[error("partition line {line}: {message}")]
    Partition { line: usize, message: String },
    #[error("assignment table: {0}")]
    Csv(#[from] csv::Error),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// One row of a job-to-skill table.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Deserialize)]
pub struct Assignment {
    pub job_id: String,
    pub job_label: String,
    pub skill_id: String,
    pub skill_label: String,
}

impl Assignment {
    pub fn new(job_id: &str, job_label: &str, skill_id: &str, skill_label: &str) -> Self {
        Assignment {
            job_id: job_id.into(),
            job_label: job_label.into(),
            skill_id: skill_id.into(),
            skill_label: skill_label.into(),
        }
    }
}

/// CSV with header `job_id,job_label,skill_id,skill_label`; lines starting
/// with `#` are skipped.
pub fn parse_assignments<R: std::io::Read>(reader: R) -> Result<Vec<Assignment>, GraphError> {
    let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(reader);
    Ok(rdr.deserialize().collect::<Result<Vec<Assignment>, _>>()?)
}

pub fn read_assignments(path: impl AsRef<Path>) -> Result<Vec<Assignment>, GraphError> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|source| GraphError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_assignments(file)
}

pub fn format_assignments(rows: &[Assignment], meta: &[(String, String)]) -> String {
    let mut head = String::new();
    for (k, v) in meta {
        let _ = writeln!(head, "# {k} = {v}");
    }
    let mut w = csv::Writer::from_writer(head.into_bytes());
    w.write_record(["job_id", "job_label", "skill_id", "skill_label"])
        .expect("in-memory write");
    for r in rows {
        w.write_record([&r.job_id, &r.job_label, &r.skill_id, &r.skill_label])
            .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory write")).expect("utf-8 input")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProjectionMode {
    /// Skills are nodes; weight = number of jobs listing both.
    Skill,
    /// Jobs are nodes; weight = number of shared skills.
    Job,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Node {
    pub id: String,
    pub label: String,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub weight: f64,
}

/// Undirected weighted simple graph. Edges satisfy `u < v`, are sorted and
/// unique, and have positive finite weight.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CoocGraph {
    pub nodes: Vec<Node>,
    pub edges: Vec<Edge>,
}

impl CoocGraph {
    pub fn new(nodes: Vec<Node>, mut edges: Vec<Edge>) -> Result<Self, GraphError> {
        let mut seen = BTreeSet::new();
        for n in &nodes {
            if !seen.insert(n.id.as_str()) {
                return Err(GraphError::DuplicateNode(n.id.clone()));
            }
        }
        for e in edges.iter_mut() {
            if e.u > e.v {
                std::mem::swap(&mut e.u, &mut e.v);
            }
            let bad = |reason: &str| GraphError::BadEdge {
                u: e.u,
                v: e.v,
                reason: reason.into(),
            };
            if e.u == e.v {
                return Err(bad("self-loop"));
            }
            if e.v >= nodes.len() {
                return Err(bad("endpoint out of range"));
            }
            if !(e.weight.is_finite() && e.weight > 0.0) {
                return Err(bad("weight must be positive and finite"));
            }
        }
        edges.sort_by_key(|e| (e.u, e.v));
        if let Some(w) = edges.windows(2).find(|w| (w[0].u, w[0].v) == (w[1].u, w[1].v)) {
            return Err(GraphError::BadEdge {
                u: w[0].u,
                v: w[0].v,
                reason: "duplicate edge".into(),
            });
        }
        Ok(CoocGraph { nodes, edges })
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Total edge weight `m`.
    pub fn total_weight(&self) -> f64 {
        self.edges.iter().map(|e| e.weight).sum()
    }

    /// Weighted degree `k_i` of every node.
    pub fn degrees(&self) -> Vec<f64> {
        let mut k = vec![0.0; self.nodes.len()];
        for e in &self.edges {
            k[e.u] += e.weight;
            k[e.v] += e.weight;
        }
        k
    }

    pub fn node_index(&self, id: &str) -> Option<usize> {
        self.nodes.iter().position(|n| n.id == id)
    }

    pub fn weight(&self, u: usize, v: usize) -> f64 {
        let (u, v) = if u < v { (u, v) } else { (v, u) };
        self.edges
            .binary_search_by_key(&(u, v), |e| (e.u, e.v))
            .map_or(0.0, |i| self.edges[i].weight)
    }
}

/// Co-occurrence projection of a job-skill table. Duplicate rows are
/// ignored; nodes are ordered by id and labelled with the first label seen
/// in sorted row order.
pub fn project(assignments: &[Assignment], mode: ProjectionMode) -> CoocGraph {
    let pairs: BTreeSet<&Assignment> = assignments.iter().collect();
    let mut labels: BTreeMap<&str, &str> = BTreeMap::new();
    let mut groups: BTreeMap<&str, BTreeSet<&str>> = BTreeMap::new();
    for a in &pairs {
        let (node, node_label, group) = match mode {
            ProjectionMode::Skill => (&a.skill_id, &a.skill_label, &a.job_id),
            ProjectionMode::Job => (&a.job_id, &a.job_label, &a.skill_id),
        };
        labels.entry(node).or_insert(node_label);
        groups.entry(group).or_default().insert(node);
    }
    let index: HashMap<&str, usize> = labels.keys().enumerate().map(|(i, &id)| (id, i)).collect();
    let mut weights: BTreeMap<(usize, usize), u64> = BTreeMap::new();
    for members in groups.values() {
        let ids: Vec<usize> = members.iter().map(|m| index[m]).collect();
        for (a, &u) in ids.iter().enumerate() {
            for &v in &ids[a + 1..] {
                *weights.entry((u.min(v), u.max(v))).or_insert(0) += 1;
            }
        }
    }
    CoocGraph {
        nodes: labels
            .into_iter()
            .map(|(id, label)| Node {
                id: id.to_string(),
                label: label.to_string(),
            })
            .collect(),
        edges: weights
            .into_iter()
            .map(|((u, v), w)| Edge { u, v, weight: w as f64 })
            .collect(),
    }
}

/// Generalized modularity
/// `Q = Σ_c [ Σ_in(c)/(2m) − γ (Σ_tot(c)/(2m))² ]`.
pub fn modularity(graph: &CoocGraph, assignment: &[usize], gamma: f64) -> Result<f64, GraphError> {
    if assignment.len() != graph.node_count() {
        return Err(GraphError::PartitionSize {
            expected: graph.node_count(),
            got: assignment.len(),
        });
    }
    let wg = WGraph::from_cooc(graph);
    if wg.two_m <= 0.0 {
        return Err(GraphError::EmptyGraph);
    }
    Ok(wg.modularity(assignment, gamma))
}

/// Working graph for Louvain levels; may carry self-loops.
#[derive(Debug, Clone)]
struct WGraph {
    adj: Vec<Vec<(usize, f64)>>,
    /// Weight of the self-loop at each node (counts twice in the degree).
    loops: Vec<f64>,
    degree: Vec<f64>,
    two_m: f64,
}

impl WGraph {
    fn from_cooc(g: &CoocGraph) -> Self {
        let mut adj = vec![Vec::new(); g.node_count()];
        for e in &g.edges {
            adj[e.u].push((e.v, e.weight));
            adj[e.v].push((e.u, e.weight));
        }
        Self::from_parts(adj, vec![0.0; g.node_count()])
    }

    fn from_parts(adj: Vec<Vec<(usize, f64)>>, loops: Vec<f64>) -> Self {
        let degree: Vec<f64> = adj
            .iter()
            .zip(&loops)
            .map(|(nbrs, l)| nbrs.iter().map(|(_, w)| w).sum::<f64>() + 2.0 * l)
            .collect();
        let two_m = degree.iter().sum();
        WGraph {
            adj,
            loops,
            degree,
            two_m,
        }
    }

    fn len(&self) -> usize {
        self.adj.len()
    }

    fn modularity(&self, comm: &[usize], gamma: f64) -> f64 {
        let n_comm = comm.iter().max().map_or(0, |&c| c + 1);
        let mut inner = vec![0.0; n_comm];
        let mut tot = vec![0.0; n_comm];
        for i in 0..self.len() {
            tot[comm[i]] += self.degree[i];
            inner[comm[i]] += 2.0 * self.loops[i];
            for &(j, w) in &self.adj[i] {
                if comm[j] == comm[i] {
                    inner[comm[i]] += w;
                }
            }
        }
        community_sum(&inner, &tot, self.two_m, gamma)
    }

    /// Collapse communities into nodes; internal weight becomes a self-loop.
    fn aggregate(&self, comm: &[usize], n_comm: usize) -> WGraph {
        let mut loops = vec![0.0; n_comm];
        let mut maps: Vec<BTreeMap<usize, f64>> = vec![BTreeMap::new(); n_comm];
        for i in 0..self.len() {
            let ci = comm[i];
            loops[ci] += self.loops[i];
            for &(j, w) in &self.adj[i] {
                let cj = comm[j];
                if ci == cj {
                    // each internal edge is seen from both ends
                    loops[ci] += w / 2.0;
                } else {
                    *maps[ci].entry(cj).or_insert(0.0) += w;
                }
            }
        }
        let adj = maps.into_iter().map(|m| m.into_iter().collect()).collect();
        WGraph::from_parts(adj, loops)
    }
}

fn community_term(inner: f64, tot: f64, two_m: f64, gamma: f64) -> f64 {
    inner / two_m - gamma * (tot / two_m) * (tot / two_m)
}

fn community_sum(inner: &[f64], tot: &[f64], two_m: f64, gamma: f64) -> f64 {
    inner
        .iter()
        .zip(tot)
        .map(|(&i, &t)| community_term(i, t, two_m, gamma))
        .sum()
}

/// Renumber labels densely in order of first appearance.
fn densify(labels: &[usize]) -> (Vec<usize>, usize) {
    let mut map = HashMap::new();
    let out = labels
        .iter()
        .map(|&l| {
            let next = map.len();
            *map.entry(l).or_insert(next)
        })
        .collect();
    (out, map.len())
}

#[derive(Debug, Clone, PartialEq)]
pub struct Partition {
    /// Dense 0-based community id per node.
    pub assignment: Vec<usize>,
    pub modularity: f64,
    pub resolution: f64,
    pub seed: u64,
}

impl Partition {
    pub fn community_count(&self) -> usize {
        self.assignment.iter().max().map_or(0, |&c| c + 1)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LevelTrace {
    pub nodes: usize,
    /// Σ k_i and 2m at this level; equal up to rounding.
    pub degree_sum: f64,
    pub two_m: f64,
    pub visit_order: Vec<usize>,
    /// Incrementally tracked Q after each local-move sweep.
    pub sweep_modularity: Vec<f64>,
    pub moves: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LouvainTrace {
    pub levels: Vec<LevelTrace>,
    /// Q as tracked by incremental updates.
    pub incremental_modularity: f64,
}

struct LocalMoves {
    comm: Vec<usize>,
    q: f64,
    trace: LevelTrace,
}

fn local_moves(g: &WGraph, gamma: f64, rng: &mut ChaCha8Rng) -> LocalMoves {
    let n = g.len();
    let two_m = g.two_m;
    let mut comm: Vec<usize> = (0..n).collect();
    let mut tot = g.degree.clone();
    let mut inner: Vec<f64> = g.loops.iter().map(|l| 2.0 * l).collect();
    let mut q = community_sum(&inner, &tot, two_m, gamma);

    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut trace = LevelTrace {
        nodes: n,
        degree_sum: g.degree.iter().sum(),
        two_m,
        visit_order: order.clone(),
        sweep_modularity: Vec::new(),
        moves: 0,
    };

    // weights from the current node to each neighbouring community
    let mut link = vec![0.0; n];
    let mut is_touched = vec![false; n];
    let mut touched: Vec<usize> = Vec::new();
    loop {
        let mut moved = false;
        for &i in &order {
            let ki = g.degree[i];
            let own = comm[i];
            for &c in &touched {
                link[c] = 0.0;
                is_touched[c] = false;
            }
            touched.clear();
            touched.push(own);
            is_touched[own] = true;
            for &(j, w) in &g.adj[i] {
                let c = comm[j];
                if !is_touched[c] {
                    is_touched[c] = true;
                    touched.push(c);
                }
                link[c] += w;
            }

            // remove i from its community
            let self_in = 2.0 * g.loops[i];
            let before_own = community_term(inner[own], tot[own], two_m, gamma);
            inner[own] -= 2.0 * link[own] + self_in;
            tot[own] -= ki;
            let after_own = community_term(inner[own], tot[own], two_m, gamma);
            q += after_own - before_own;

            let gain = |c: usize| link[c] - gamma * tot[c] * ki / two_m;
            let mut best = own;
            let mut best_gain = gain(own);
            for &c in &touched {
                let gc = gain(c);
                if gc > best_gain + GAIN_EPS {
                    best = c;
                    best_gain = gc;
                }
            }

            let before_best = community_term(inner[best], tot[best], two_m, gamma);
            inner[best] += 2.0 * link[best] + self_in;
            tot[best] += ki;
            q += community_term(inner[best], tot[best], two_m, gamma) - before_best;
            comm[i] = best;
            if best != own {
                moved = true;
                trace.moves += 1;
            }
        }
        trace.sweep_modularity.push(q);
        if !moved {
            break;
        }
    }
    LocalMoves { comm, q, trace }
}

/// Two-phase Louvain: local moves to the best positive-gain neighbouring
/// community until none improves, then aggregation, repeated until a level
/// makes no move. The node visit order of each level is a seeded shuffle.
pub fn louvain(graph: &CoocGraph, gamma: f64, seed: u64) -> (Partition, LouvainTrace) {
    let n = graph.node_count();
    let mut g = WGraph::from_cooc(graph);
    let mut trace = LouvainTrace {
        levels: Vec::new(),
        incremental_modularity: 0.0,
    };
    if g.two_m <= 0.0 {
        return (
            Partition {
                assignment: (0..n).collect(),
                modularity: 0.0,
                resolution: gamma,
                seed,
            },
            trace,
        );
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut node_comm: Vec<usize> = (0..n).collect();
    loop {
        let level = local_moves(&g, gamma, &mut rng);
        let moves = level.trace.moves;
        trace.incremental_modularity = level.q;
        trace.levels.push(level.trace);
        let (dense, n_comm) = densify(&level.comm);
        for c in node_comm.iter_mut() {
            *c = dense[*c];
        }
        if moves == 0 || n_comm == g.len() {
            break;
        }
        g = g.aggregate(&dense, n_comm);
    }
    let (assignment, _) = densify(&node_comm);
    let q = WGraph::from_cooc(graph).modularity(&assignment, gamma);
    (
        Partition {
            assignment,
            modularity: q,
            resolution: gamma,
            seed,
        },
        trace,
    )
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GraphStats {
    pub nodes: usize,
    pub edges: usize,
    /// 2|E| / |V|
    pub average_degree: f64,
    /// Σ k_i / |V| = 2m / |V|
    pub average_weighted_degree: f64,
}

pub fn stats(graph: &CoocGraph) -> GraphStats {
    let (v, e) = (graph.node_count(), graph.edge_count());
    let per_node = |x: f64| if v == 0 { 0.0 } else { x / v as f64 };
    GraphStats {
        nodes: v,
        edges: e,
        average_degree: per_node(2.0 * e as f64),
        average_weighted_degree: per_node(2.0 * graph.total_weight()),
    }
}

/// `node_id, community, degree` rows, preceded by `# key = value` lines:
/// `meta`, then resolution, seed and modularity unless `meta` has them.
pub fn format_partition_tsv(graph: &CoocGraph, partition: &Partition, meta: &[(String, String)]) -> String {
    let mut out = String::new();
    for (k, v) in meta {
        let _ = writeln!(out, "# {k} = {v}");
    }
    let own = [
        ("resolution", partition.resolution.to_string()),
        ("seed", partition.seed.to_string()),
        ("modularity", partition.modularity.to_string()),
    ];
    for (k, v) in own {
        if !meta.iter().any(|(key, _)| key == k) {
            let _ = writeln!(out, "# {k} = {v}");
        }
    }
    out.push_str("node_id\tcommunity\tdegree\n");
    for ((node, c), k) in graph.nodes.iter().zip(&partition.assignment).zip(graph.degrees()) {
        let _ = writeln!(out, "{}\t{c}\t{k}", node.id);
    }
    out
}

/// Inverse of [`format_partition_tsv`]: `(node_id, community)` rows.
pub fn parse_partition_tsv(text: &str) -> Result<Vec<(String, usize)>, GraphError> {
    let mut rows = Vec::new();
    let mut header_seen = false;
    for (i, line) in text.lines().enumerate() {
        let err = |message: String| GraphError::Partition { line: i + 1, message };
        if line.starts_with('#') || line.trim().is_empty() {
            continue;
        }
        if !header_seen {
            if !line.starts_with("node_id\tcommunity") {
                return Err(err("expected header `node_id<TAB>community`".into()));
            }
            header_seen = true;
            continue;
        }
        let mut cols = line.split('\t');
        let (Some(id), Some(c)) = (cols.next(), cols.next()) else {
            return Err(err("expected at least two columns".into()));
        };
        let c = c.parse().map_err(|e| err(format!("community {c:?}: {e}")))?;
        rows.push((id.to_string(), c));
    }
    if !header_seen {
        return Err(GraphError::Partition {
            line: 0,
            message: "no header row".into(),
        });
    }
    Ok(rows)
}

/// Community of each graph node, in node order, from `(node_id, community)`
/// rows. Every node must be covered exactly once.
pub fn align_partition(graph: &CoocGraph, rows: &[(String, usize)]) -> Result<Vec<usize>, GraphError> {
    if rows.len() != graph.node_count() {
        return Err(GraphError::PartitionSize {
            expected: graph.node_count(),
            got: rows.len(),
        });
    }
    let mut out = vec![usize::MAX; graph.node_count()];
    for (line, (id, c)) in rows.iter().enumerate() {
        let i = graph.node_index(id).ok_or_else(|| GraphError::Partition {
            line: line + 1,
            message: format!("node {id:?} is not in the graph"),
        })?;
        if out[i] != usize::MAX {
            return Err(GraphError::DuplicateNode(id.clone()));
        }
        out[i] = *c;
    }
    Ok(out)
}

const GEXF_NS: &str = "http://gexf.net/1.2";

/// GEXF 1.2 document. `meta` pairs go into the description element.
pub fn format_gexf(graph: &CoocGraph, communities: Option<&[usize]>, meta: &[(String, String)]) -> Result<String, GraphError> {
    if let Some(c) = communities {
        if c.len() != graph.node_count() {
            return Err(GraphError::PartitionSize {
                expected: graph.node_count(),
                got: c.len(),
            });
        }
    }
    let description = meta
        .iter()
        .map(|(k, v)| format!("{k}={v}"))
        .collect::<Vec<_>>()
        .join("; ");
    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    let _ = writeln!(out, "<gexf xmlns=\"{GEXF_NS}\" version=\"1.2\">");
    out.push_str("  <meta>\n");
    let _ = writeln!(out, "    <creator>softskill {}</creator>", env!("CARGO_PKG_VERSION"));
    let _ = writeln!(out, "    <description>{}</description>", escape(description.as_str()));
    out.push_str("  </meta>\n");
    out.push_str("  <graph mode=\"static\" defaultedgetype=\"undirected\">\n");
    if communities.is_some() {
        out.push_str("    <attributes class=\"node\">\n");
        out.push_str("      <attribute id=\"community\" title=\"community\" type=\"integer\"/>\n");
        out.push_str("    </attributes>\n");
    }
    out.push_str("    <nodes>\n");
    for (i, node) in graph.nodes.iter().enumerate() {
        let (id, label) = (escape(node.id.as_str()), escape(node.label.as_str()));
        match communities {
            Some(c) => {
                let _ = writeln!(out, "      <node id=\"{id}\" label=\"{label}\">");
                let _ = writeln!(
                    out,
                    "        <attvalues><attvalue for=\"community\" value=\"{}\"/></attvalues>",
                    c[i]
                );
                out.push_str("      </node>\n");
            }
            None => {
                let _ = writeln!(out, "      <node id=\"{id}\" label=\"{label}\"/>");
            }
        }
    }
    out.push_str("    </nodes>\n");
    out.push_str("    <edges>\n");
    for (i, e) in graph.edges.iter().enumerate() {
        let _ = writeln!(
            out,
            "      <edge id=\"{i}\" source=\"{}\" target=\"{}\" weight=\"{}\"/>",
            escape(graph.nodes[e.u].id.as_str()),
            escape(graph.nodes[e.v].id.as_str()),
            e.weight
        );
    }
    out.push_str("    </edges>\n");
    out.push_str("  </graph>\n");
    out.push_str("</gexf>\n");
    Ok(out)
}

pub fn write_gexf(
    graph: &CoocGraph,
    communities: Option<&[usize]>,
    meta: &[(String, String)],
    path: impl AsRef<Path>,
) -> Result<(), GraphError> {
    let path = path.as_ref();
    std::fs::write(path, format_gexf(graph, communities, meta)?).map_err(|source| GraphError::Io {
        path: path.display().to_string(),
        source,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct GexfDocument {
    pub graph: CoocGraph,
    pub communities: Option<Vec<usize>>,
    pub description: String,
}

fn attr(e: &BytesStart, name: &[u8]) -> Result<Option<String>, GraphError> {
    for a in e.attributes() {
        let a = a.map_err(|err| GraphError::Gexf(err.to_string()))?;
        if a.key.as_ref() == name {
            let v = a.unescape_value().map_err(|err| GraphError::Gexf(err.to_string()))?;
            return Ok(Some(v.into_owned()));
        }
    }
    Ok(None)
}

fn required(e: &BytesStart, name: &str) -> Result<String, GraphError> {
    attr(e, name.as_bytes())?.ok_or_else(|| {
        GraphError::Gexf(format!(
            "<{}> lacks attribute {name}",
            String::from_utf8_lossy(e.name().as_ref())
        ))
    })
}

/// Read back a document produced by [`format_gexf`] (or any GEXF with the
/// same node, edge and community-attribute layout).
pub fn parse_gexf(xml: &str) -> Result<GexfDocument, GraphError> {
    let mut reader = Reader::from_str(xml);
    let mut nodes = Vec::new();
    let mut communities: Vec<Option<usize>> = Vec::new();
    let mut raw_edges: Vec<(String, String, f64)> = Vec::new();
    let mut community_attr: Option<String> = None;
    let mut description = String::new();
    let mut in_description = false;
    loop {
        let event = reader
            .read_event()
            .map_err(|err| GraphError::Gexf(format!("at byte {}: {err}", reader.buffer_position())))?;
        match event {
            Event::Start(e) | Event::Empty(e) => match e.name().as_ref() {
                b"attribute" => {
                    if attr(&e, b"title")?.as_deref() == Some("community") {
                        community_attr = Some(required(&e, "id")?);
                    }
                }
                b"node" => {
                    let id = required(&e, "id")?;
                    let label = attr(&e, b"label")?.unwrap_or_else(|| id.clone());
                    nodes.push(Node { id, label });
                    communities.push(None);
                }
                b"attvalue" => {
                    let target = required(&e, "for")?;
                    if community_attr.as_deref() == Some(target.as_str()) {
                        let value = required(&e, "value")?;
                        let c = value
                            .parse::<usize>()
                            .map_err(|_| GraphError::Gexf(format!("bad community value {value:?}")))?;
                        match communities.last_mut() {
                            Some(slot) => *slot = Some(c),
                            None => return Err(GraphError::Gexf("attvalue outside a node".into())),
                        }
                    }
                }
                b"edge" => {
                    let weight = match attr(&e, b"weight")? {
                        Some(w) => w
                            .parse::<f64>()
                            .map_err(|_| GraphError::Gexf(format!("bad edge weight {w:?}")))?,
                        None => 1.0,
                    };
                    raw_edges.push((required(&e, "source")?, required(&e, "target")?, weight));
                }
                b"description" => in_description = true,
                _ => {}
            },
            Event::Text(t) if in_description => {
                let text = t.unescape().map_err(|err| GraphError::Gexf(err.to_string()))?;
                description.push_str(&text);
            }
            Event::End(e) if e.name().as_ref() == b"description" => in_description = false,
            Event::Eof => break,
            _ => {}
        }
    }
    let index: HashMap<&str, usize> = nodes.iter().enumerate().map(|(i, n)| (n.id.as_str(), i)).collect();
    let lookup = |id: &str| {
        index
            .get(id)
            .copied()
            .ok_or_else(|| GraphError::Gexf(format!("edge references unknown node {id:?}")))
    };
    let edges = raw_edges
        .iter()
        .map(|(s, t, w)| {
            Ok(Edge {
                u: lookup(s)?,
                v: lookup(t)?,
                weight: *w,
            })
        })
        .collect::<Result<Vec<_>, GraphError>>()?;
    let communities = if community_attr.is_some() && !nodes.is_empty() {
        Some(
            communities
                .into_iter()
                .collect::<Option<Vec<_>>>()
                .ok_or_else(|| GraphError::Gexf("node without community value".into()))?,
        )
    } else {
        None
    };
    Ok(GexfDocument {
        graph: CoocGraph::new(nodes, edges)?,
        communities,
        description,
    })
}

pub fn read_gexf(path: impl AsRef<Path>) -> Result<GexfDocument, GraphError> {
    let path = path.as_ref();
    let xml = std::fs::read_to_string(path).map_err(|source| GraphError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_gexf(&xml)
}
