//! Timestamped undirected simple graphs, edge-list I/O, the largest
//! connected component, and cumulative adjacency snapshots.

use std::cmp::Ordering;
use std::collections::{HashMap, HashSet, VecDeque};
use std::io::{BufRead, Write};

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::spectral::SymmetricMatrix;

const VERTICES_PRAGMA: &str = "# vertices:";

/// An undirected edge with its creation time, stored with `source < target`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TemporalEdge {
    pub source: usize,
    pub target: usize,
    pub timestamp: f64,
}

impl TemporalEdge {
    /// Canonicalizes the endpoint order. Returns `None` for a self-loop.
    pub fn new(u: usize, v: usize, timestamp: f64) -> Option<Self> {
        match u.cmp(&v) {
            Ordering::Less => Some(TemporalEdge {
                source: u,
                target: v,
                timestamp,
            }),
            Ordering::Greater => Some(TemporalEdge {
                source: v,
                target: u,
                timestamp,
            }),
            Ordering::Equal => None,
        }
    }

    pub fn pair(&self) -> (usize, usize) {
        (self.source, self.target)
    }

    /// Order by `(timestamp, source, target)`.
    pub fn chronological(&self, other: &Self) -> Ordering {
        self.timestamp
            .total_cmp(&other.timestamp)
            .then(self.source.cmp(&other.source))
            .then(self.target.cmp(&other.target))
    }
}

/// A graph on vertices `0..vertex_count` whose edges carry timestamps.
///
/// Edges are kept in chronological order, which is also the canonical
/// serialization order. Every vertex has a label; graphs built from indices
/// get the 1-based labels `"1"..="n"`.
#[derive(Debug, Clone, PartialEq)]
pub struct TemporalGraph {
    labels: Vec<String>,
    edges: Vec<TemporalEdge>,
}

impl TemporalGraph {
    pub fn new(vertex_count: usize, edges: Vec<TemporalEdge>) -> Result<Self> {
        let labels = (1..=vertex_count).map(|i| i.to_string()).collect();
        Self::with_labels(labels, edges)
    }

    pub fn with_labels(labels: Vec<String>, mut edges: Vec<TemporalEdge>) -> Result<Self> {
        let n = labels.len();
        if n == 0 {
            return Err(Error::invalid("a graph needs at least one vertex"));
        }
        let mut seen = HashSet::with_capacity(edges.len());
        for e in edges.iter_mut() {
            let canonical = TemporalEdge::new(e.source, e.target, e.timestamp).ok_or_else(|| {
                Error::invalid(format!("self-loop on vertex {}", e.source))
            })?;
            *e = canonical;
            if e.target >= n {
                return Err(Error::IndexOutOfRange {
                    index: e.target,
                    dim: n,
                });
            }
            if !e.timestamp.is_finite() {
                return Err(Error::invalid(format!(
                    "edge ({}, {}) has a non-finite timestamp",
                    e.source, e.target
                )));
            }
            if !seen.insert(e.pair()) {
                return Err(Error::invalid(format!(
                    "duplicate edge ({}, {})",
                    e.source, e.target
                )));
            }
        }
        edges.sort_by(TemporalEdge::chronological);
        Ok(TemporalGraph { labels, edges })
    }

    pub fn vertex_count(&self) -> usize {
        self.labels.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edges in chronological order.
    pub fn edges(&self) -> &[TemporalEdge] {
        &self.edges
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, vertex: usize) -> &str {
        &self.labels[vertex]
    }

    pub fn edge_set(&self) -> HashSet<(usize, usize)> {
        self.edges.iter().map(TemporalEdge::pair).collect()
    }

    pub fn neighbors(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.vertex_count()];
        for e in &self.edges {
            adj[e.source].push(e.target);
            adj[e.target].push(e.source);
        }
        adj
    }

    /// Same vertex set, restricted to the given edges.
    pub(crate) fn with_edges(&self, edges: Vec<TemporalEdge>) -> TemporalGraph {
        let mut edges = edges;
        edges.sort_by(TemporalEdge::chronological);
        TemporalGraph {
            labels: self.labels.clone(),
            edges,
        }
    }

    pub fn adjacency(&self) -> SymmetricMatrix {
        adjacency_of(self.vertex_count(), &self.edges)
    }

    /// Induced subgraph on `vertices` (ascending), re-indexed contiguously.
    pub fn induced_subgraph(&self, vertices: &[usize]) -> Result<TemporalGraph> {
        let mut index = vec![usize::MAX; self.vertex_count()];
        for (new, &old) in vertices.iter().enumerate() {
            if old >= self.vertex_count() {
                return Err(Error::IndexOutOfRange {
                    index: old,
                    dim: self.vertex_count(),
                });
            }
            index[old] = new;
        }
        let labels = vertices.iter().map(|&v| self.labels[v].clone()).collect();
        let edges = self
            .edges
            .iter()
            .filter(|e| index[e.source] != usize::MAX && index[e.target] != usize::MAX)
            .filter_map(|e| TemporalEdge::new(index[e.source], index[e.target], e.timestamp))
            .collect();
        TemporalGraph::with_labels(labels, edges)
    }
}

fn adjacency_of(n: usize, edges: &[TemporalEdge]) -> SymmetricMatrix {
    let mut m = DMatrix::zeros(n, n);
    for e in edges {
        m[(e.source, e.target)] = 1.0;
        m[(e.target, e.source)] = 1.0;
    }
    SymmetricMatrix::from_symmetric_unchecked(m)
}

/// Field separator for edge-list input.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Delimiter {
    /// Comma if the line contains one, otherwise whitespace.
    #[default]
    Auto,
    Whitespace,
    Comma,
}

impl Delimiter {
    fn split<'a>(self, line: &'a str) -> Vec<&'a str> {
        let comma = match self {
            Delimiter::Auto => line.contains(','),
            Delimiter::Comma => true,
            Delimiter::Whitespace => false,
        };
        if comma {
            line.split(',').map(str::trim).collect()
        } else {
            line.split_whitespace().collect()
        }
    }
}

/// Result of parsing an edge list, with the counts of dropped lines.
#[derive(Debug, Clone)]
pub struct ParsedGraph {
    pub graph: TemporalGraph,
    pub self_loops: usize,
    pub duplicates: usize,
}

#[derive(Default)]
struct LabelIndex {
    labels: Vec<String>,
    index: HashMap<String, usize>,
}

impl LabelIndex {
    fn intern(&mut self, label: &str) -> usize {
        if let Some(&i) = self.index.get(label) {
            return i;
        }
        let i = self.labels.len();
        self.labels.push(label.to_string());
        self.index.insert(label.to_string(), i);
        i
    }
}

/// Parses `source target timestamp` lines.
///
/// Labels are mapped to indices in order of first appearance. Duplicate
/// edges keep their earliest timestamp and self-loops are dropped; both are
/// counted in the returned report. A leading `# vertices:` comment (written
/// by [`write_edge_list`]) fixes the vertex order; any other `#` line is
/// ignored.
pub fn parse_edge_list<R: BufRead>(reader: R, delimiter: Delimiter) -> Result<ParsedGraph> {
    let mut vertices = LabelIndex::default();
    let mut edges: Vec<TemporalEdge> = Vec::new();
    let mut by_pair: HashMap<(usize, usize), usize> = HashMap::new();
    let mut self_loops = 0;
    let mut duplicates = 0;
    let mut data_lines = 0;

    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let line_no = i + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if let Some(rest) = trimmed.strip_prefix(VERTICES_PRAGMA) {
            for label in delimiter.split(rest).into_iter().filter(|l| !l.is_empty()) {
                vertices.intern(label);
            }
            continue;
        }
        if trimmed.starts_with('#') {
            continue;
        }
        let fields = delimiter.split(trimmed);
        if fields.len() != 3 {
            return Err(Error::Parse {
                line: line_no,
                message: format!(
                    "expected 3 fields (source target timestamp), found {}",
                    fields.len()
                ),
            });
        }
        if fields[0].is_empty() || fields[1].is_empty() {
            return Err(Error::Parse {
                line: line_no,
                message: "empty vertex label".into(),
            });
        }
        let timestamp: f64 = fields[2]
            .parse()
            .ok()
            .filter(|t: &f64| t.is_finite())
            .ok_or_else(|| Error::Parse {
                line: line_no,
                message: format!("unparsable timestamp {:?}", fields[2]),
            })?;
        data_lines += 1;
        let u = vertices.intern(fields[0]);
        let v = vertices.intern(fields[1]);
        let Some(edge) = TemporalEdge::new(u, v, timestamp) else {
            self_loops += 1;
            continue;
        };
        match by_pair.get(&edge.pair()) {
            Some(&k) => {
                duplicates += 1;
                if timestamp < edges[k].timestamp {
                    edges[k].timestamp = timestamp;
                }
            }
            None => {
                by_pair.insert(edge.pair(), edges.len());
                edges.push(edge);
            }
        }
    }

    if data_lines == 0 {
        return Err(Error::EmptyInput);
    }
    if self_loops > 0 {
        log::warn!("dropped {self_loops} self-loop line(s)");
    }
    let graph = TemporalGraph::with_labels(vertices.labels, edges)?;
    Ok(ParsedGraph {
        graph,
        self_loops,
        duplicates,
    })
}

/// Writes the graph as an edge list in chronological order, preceded by a
/// `# vertices:` line so that re-parsing reproduces the same indexing.
///
/// Uses whitespace separation unless a label contains whitespace, in which
/// case fields are comma separated.
pub fn write_edge_list<W: Write>(graph: &TemporalGraph, mut out: W) -> Result<()> {
    let has_space = graph.labels.iter().any(|l| l.chars().any(char::is_whitespace));
    let has_comma = graph.labels.iter().any(|l| l.contains(','));
    let bad = graph
        .labels
        .iter()
        .any(|l| l.is_empty() || l.trim() != l || l.starts_with('#'));
    if bad || (has_space && has_comma) {
        return Err(Error::invalid(
            "vertex labels cannot be written unambiguously as an edge list",
        ));
    }
    if has_space {
        writeln!(out, "{} {},", VERTICES_PRAGMA, graph.labels.join(","))?;
        for e in &graph.edges {
            writeln!(
                out,
                "{},{},{}",
                graph.labels[e.source], graph.labels[e.target], e.timestamp
            )?;
        }
    } else {
        writeln!(out, "{} {}", VERTICES_PRAGMA, graph.labels.join(" "))?;
        for e in &graph.edges {
            writeln!(
                out,
                "{} {} {}",
                graph.labels[e.source], graph.labels[e.target], e.timestamp
            )?;
        }
    }
    Ok(())
}

/// Vertex sets of all connected components, each ascending, ordered by
/// smallest member.
pub fn connected_components(graph: &TemporalGraph) -> Vec<Vec<usize>> {
    let adj = graph.neighbors();
    let n = graph.vertex_count();
    let mut seen = vec![false; n];
    let mut components = Vec::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        let mut queue = VecDeque::from([start]);
        let mut members = Vec::new();
        while let Some(u) = queue.pop_front() {
            members.push(u);
            for &v in &adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    queue.push_back(v);
                }
            }
        }
        members.sort_unstable();
        components.push(members);
    }
    components
}

/// Induced subgraph on the largest connected component. Ties go to the
/// component holding the smallest vertex index.
pub fn largest_connected_component(graph: &TemporalGraph) -> Result<TemporalGraph> {
    let components = connected_components(graph);
    let mut best: Option<&Vec<usize>> = None;
    for c in &components {
        if best.is_none_or(|b| c.len() > b.len()) {
            best = Some(c);
        }
    }
    let best = best.ok_or_else(|| Error::invalid("graph has no vertices"))?;
    graph.induced_subgraph(best)
}

/// A sequence of equally sized symmetric matrices, typically the cumulative
/// adjacency matrices `A_1, ..., A_t` of a growing graph.
#[derive(Debug, Clone, PartialEq)]
pub struct SnapshotSequence {
    matrices: Vec<SymmetricMatrix>,
}

impl SnapshotSequence {
    pub fn new(matrices: Vec<SymmetricMatrix>) -> Result<Self> {
        let first = matrices
            .first()
            .ok_or_else(|| Error::invalid("a snapshot sequence needs at least one matrix"))?;
        let n = first.dim();
        if let Some(bad) = matrices.iter().find(|m| m.dim() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: bad.dim(),
            });
        }
        Ok(SnapshotSequence { matrices })
    }

    pub fn len(&self) -> usize {
        self.matrices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.matrices.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.matrices[0].dim()
    }

    pub fn get(&self, step: usize) -> &SymmetricMatrix {
        &self.matrices[step]
    }

    pub fn last(&self) -> &SymmetricMatrix {
        self.matrices.last().expect("non-empty by construction")
    }

    pub fn iter(&self) -> std::slice::Iter<'_, SymmetricMatrix> {
        self.matrices.iter()
    }

    pub fn matrices(&self) -> &[SymmetricMatrix] {
        &self.matrices
    }

    /// Number of nonzero strictly-upper entries of each snapshot.
    pub fn edge_counts(&self) -> Vec<usize> {
        self.matrices
            .iter()
            .map(|m| {
                let a = m.as_matrix();
                let n = m.dim();
                (0..n)
                    .map(|v| (0..v).filter(|&u| a[(u, v)] != 0.0).count())
                    .sum()
            })
            .collect()
    }
}

/// Sizes of `t` consecutive chunks covering `edge_count` edges; the first
/// `edge_count % t` chunks take one extra edge.
pub fn chunk_sizes(edge_count: usize, t: usize) -> Vec<usize> {
    let base = edge_count / t;
    let extra = edge_count % t;
    (0..t).map(|i| base + usize::from(i < extra)).collect()
}

/// Splits the chronologically sorted edges into `t` chunks and returns the
/// cumulative adjacency matrix after each chunk.
pub fn build_snapshots(graph: &TemporalGraph, t: usize) -> Result<SnapshotSequence> {
    if t == 0 {
        return Err(Error::invalid("snapshot count must be positive"));
    }
    if t > graph.edge_count() {
        return Err(Error::invalid(format!(
            "snapshot count {t} exceeds edge count {}",
            graph.edge_count()
        )));
    }
    let mut ends = Vec::with_capacity(t);
    let mut acc = 0;
    for size in chunk_sizes(graph.edge_count(), t) {
        acc += size;
        ends.push(acc);
    }
    Ok(cumulative(graph, &ends))
}

/// Snapshot `i` holds every edge with `timestamp <= cutoffs[i]`.
pub fn build_snapshots_at(graph: &TemporalGraph, cutoffs: &[f64]) -> Result<SnapshotSequence> {
    if cutoffs.is_empty() {
        return Err(Error::invalid("at least one cutoff is required"));
    }
    if cutoffs.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::invalid("cutoffs must be non-decreasing"));
    }
    let edges = graph.edges();
    let ends: Vec<usize> = cutoffs
        .iter()
        .map(|&c| edges.partition_point(|e| e.timestamp <= c))
        .collect();
    Ok(cumulative(graph, &ends))
}

/// `t` snapshots at equally spaced time cutoffs `min + (max - min) · i / t`,
/// `i = 1..=t`. A graph with a single timestamp gives `t` identical snapshots.
pub fn build_snapshots_by_time(graph: &TemporalGraph, t: usize) -> Result<SnapshotSequence> {
    if t == 0 {
        return Err(Error::invalid("snapshot count must be positive"));
    }
    let (first, last) = match (graph.edges().first(), graph.edges().last()) {
        (Some(a), Some(b)) => (a.timestamp, b.timestamp),
        _ => return Err(Error::invalid("cannot snapshot a graph without edges")),
    };
    let cutoffs: Vec<f64> = (1..=t)
        .map(|i| if i == t { last } else { first + (last - first) * i as f64 / t as f64 })
        .collect();
    build_snapshots_at(graph, &cutoffs)
}

fn cumulative(graph: &TemporalGraph, ends: &[usize]) -> SnapshotSequence {
    let n = graph.vertex_count();
    let edges = graph.edges();
    let mut current = DMatrix::zeros(n, n);
    let mut start = 0;
    let mut matrices = Vec::with_capacity(ends.len());
    for &end in ends {
        for e in &edges[start..end] {
            current[(e.source, e.target)] = 1.0;
            current[(e.target, e.source)] = 1.0;
        }
        start = end;
        matrices.push(SymmetricMatrix::from_symmetric_unchecked(current.clone()));
    }
    SnapshotSequence { matrices }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn time_snapshots() {
        let edges = vec![
            TemporalEdge::new(0, 1, 1.0).unwrap(),
            TemporalEdge::new(1, 2, 2.0).unwrap(),
            TemporalEdge::new(2, 3, 3.0).unwrap(),
        ];
        let g = TemporalGraph::new(4, edges).unwrap();
        let s = build_snapshots_by_time(&g, 2).unwrap();
        assert_eq!(s.edge_counts(), vec![2, 3]);
        let flat = TemporalGraph::new(3, vec![TemporalEdge::new(0, 1, 5.0).unwrap(), TemporalEdge::new(1, 2, 5.0).unwrap()]).unwrap();
        let s = build_snapshots_by_time(&flat, 3).unwrap();
        assert_eq!(s.edge_counts(), vec![2, 2, 2]);
        assert!(build_snapshots_by_time(&g, 0).is_err());
    }

    fn parse(text: &str) -> ParsedGraph {
        parse_edge_list(text.as_bytes(), Delimiter::Auto).unwrap()
    }

    fn pairs(g: &TemporalGraph) -> Vec<(usize, usize, f64)> {
        g.edges()
            .iter()
            .map(|e| (e.source, e.target, e.timestamp))
            .collect()
    }

    #[test]
    fn parse_maps_labels_in_first_appearance_order() {
        let p = parse("a b 1\nb c 2\n");
        assert_eq!(p.graph.vertex_count(), 3);
        assert_eq!(p.graph.labels(), ["a", "b", "c"]);
        assert_eq!(pairs(&p.graph), vec![(0, 1, 1.0), (1, 2, 2.0)]);
    }

    #[test]
    fn duplicate_edge_keeps_earliest_timestamp() {
        let p = parse("a b 1\nb a 5\n");
        assert_eq!(pairs(&p.graph), vec![(0, 1, 1.0)]);
        assert_eq!(p.duplicates, 1);
        let p = parse("a b 5\nb a 1\n");
        assert_eq!(pairs(&p.graph), vec![(0, 1, 1.0)]);
    }

    #[test]
    fn self_loops_are_counted_and_dropped() {
        let p = parse("a a 3\n");
        assert_eq!(p.graph.edge_count(), 0);
        assert_eq!(p.self_loops, 1);
    }

    #[test]
    fn comments_commas_and_blank_lines() {
        let p = parse("# header\n\nx, y, 1.5\ny,z,2\n");
        assert_eq!(pairs(&p.graph), vec![(0, 1, 1.5), (1, 2, 2.0)]);
    }

    #[test]
    fn malformed_lines_report_line_number() {
        let err = parse_edge_list("a b 1\na b\n".as_bytes(), Delimiter::Auto).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
        let err = parse_edge_list("a b 1\n# c\nc d noon\n".as_bytes(), Delimiter::Auto)
            .unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }), "{err}");
        let err = parse_edge_list("a b nan\n".as_bytes(), Delimiter::Auto).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
    }

    #[test]
    fn empty_input_is_an_error() {
        for text in ["", "# only a comment\n", "\n\n"] {
            let err = parse_edge_list(text.as_bytes(), Delimiter::Auto).unwrap_err();
            assert!(matches!(err, Error::EmptyInput));
        }
    }

    #[test]
    fn explicit_delimiters() {
        let p = parse_edge_list("a b,1 c 2\n".as_bytes(), Delimiter::Comma);
        assert!(p.is_err());
        let p = parse_edge_list("u v 1\n".as_bytes(), Delimiter::Whitespace).unwrap();
        assert_eq!(p.graph.edge_count(), 1);
        let p = parse_edge_list("new york,boston,3\n".as_bytes(), Delimiter::Comma).unwrap();
        assert_eq!(p.graph.labels(), ["new york", "boston"]);
    }

    #[test]
    fn serialization_round_trips_with_isolated_vertices() {
        let g = TemporalGraph::new(
            5,
            vec![
                TemporalEdge::new(3, 1, 2.0).unwrap(),
                TemporalEdge::new(0, 4, 1.0).unwrap(),
            ],
        )
        .unwrap();
        let mut buf = Vec::new();
        write_edge_list(&g, &mut buf).unwrap();
        let back = parse_edge_list(buf.as_slice(), Delimiter::Auto).unwrap().graph;
        assert_eq!(back, g);

        let spaced = TemporalGraph::with_labels(
            vec!["new york".into(), "boston".into()],
            vec![TemporalEdge::new(0, 1, 0.25).unwrap()],
        )
        .unwrap();
        let mut buf = Vec::new();
        write_edge_list(&spaced, &mut buf).unwrap();
        let back = parse_edge_list(buf.as_slice(), Delimiter::Auto).unwrap().graph;
        assert_eq!(back, spaced);
    }

    #[test]
    fn lcc_picks_largest_component() {
        let p = parse("a b 1\nb c 2\nd e 3\n");
        let lcc = largest_connected_component(&p.graph).unwrap();
        assert_eq!(lcc.labels(), ["a", "b", "c"]);
        assert_eq!(lcc.edge_count(), 2);
    }

    #[test]
    fn lcc_of_connected_graph_is_identity() {
        let p = parse("a b 1\nb c 2\nc a 3\n");
        let lcc = largest_connected_component(&p.graph).unwrap();
        assert_eq!(lcc, p.graph);
    }

    #[test]
    fn lcc_tie_goes_to_smallest_vertex() {
        let g = TemporalGraph::new(
            6,
            vec![
                TemporalEdge::new(4, 5, 1.0).unwrap(),
                TemporalEdge::new(2, 3, 1.0).unwrap(),
                TemporalEdge::new(0, 1, 9.0).unwrap(),
            ],
        )
        .unwrap();
        let lcc = largest_connected_component(&g).unwrap();
        assert_eq!(lcc.labels(), ["1", "2"]);
        assert_eq!(pairs(&lcc), vec![(0, 1, 9.0)]);
    }

    #[test]
    fn lcc_reindexes_preserving_order() {
        let g = TemporalGraph::new(
            5,
            vec![
                TemporalEdge::new(1, 4, 1.0).unwrap(),
                TemporalEdge::new(4, 3, 2.0).unwrap(),
            ],
        )
        .unwrap();
        let lcc = largest_connected_component(&g).unwrap();
        assert_eq!(lcc.labels(), ["2", "4", "5"]);
        assert_eq!(pairs(&lcc), vec![(0, 2, 1.0), (1, 2, 2.0)]);
    }

    fn path_graph(edges: usize) -> TemporalGraph {
        let list = (0..edges)
            .map(|i| TemporalEdge::new(i, i + 1, i as f64).unwrap())
            .collect();
        TemporalGraph::new(edges + 1, list).unwrap()
    }

    #[test]
    fn chunking_follows_remainder_rule() {
        assert_eq!(chunk_sizes(6, 3), vec![2, 2, 2]);
        assert_eq!(chunk_sizes(7, 3), vec![3, 2, 2]);
        let s = build_snapshots(&path_graph(6), 3).unwrap();
        assert_eq!(s.edge_counts(), vec![2, 4, 6]);
        let s = build_snapshots(&path_graph(7), 3).unwrap();
        assert_eq!(s.edge_counts(), vec![3, 5, 7]);
    }

    #[test]
    fn single_snapshot_is_full_adjacency() {
        let g = path_graph(5);
        let s = build_snapshots(&g, 1).unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(s.last(), &g.adjacency());
    }

    #[test]
    fn snapshot_count_bounds() {
        let g = path_graph(3);
        assert!(build_snapshots(&g, 0).is_err());
        assert!(build_snapshots(&g, 4).is_err());
        assert!(build_snapshots(&g, 3).is_ok());
    }

    #[test]
    fn timestamp_ties_break_on_canonical_pair() {
        let g = TemporalGraph::new(
            4,
            vec![
                TemporalEdge::new(2, 3, 1.0).unwrap(),
                TemporalEdge::new(0, 1, 1.0).unwrap(),
            ],
        )
        .unwrap();
        let s = build_snapshots(&g, 2).unwrap();
        assert_eq!(s.get(0).get(0, 1), 1.0);
        assert_eq!(s.get(0).get(2, 3), 0.0);
    }

    #[test]
    fn snapshots_at_cutoffs() {
        let g = path_graph(6);
        let s = build_snapshots_at(&g, &[1.0, 1.0, 4.0]).unwrap();
        assert_eq!(s.edge_counts(), vec![2, 2, 5]);
        assert!(build_snapshots_at(&g, &[2.0, 1.0]).is_err());
    }

    #[test]
    fn graph_constructor_rejects_bad_edges() {
        let dup = vec![
            TemporalEdge::new(0, 1, 1.0).unwrap(),
            TemporalEdge::new(1, 0, 2.0).unwrap(),
        ];
        assert!(TemporalGraph::new(2, dup).is_err());
        let out = vec![TemporalEdge::new(0, 5, 1.0).unwrap()];
        assert!(TemporalGraph::new(2, out).is_err());
        assert!(TemporalGraph::new(0, vec![]).is_err());
    }
}
