//! Immutable directed graphs in compressed adjacency form.
//!
//! Both orientations are stored so kernels can pull over in-edges while
//! generators and degree queries walk out-edges. Graphs are simple by
//! construction: no self-loops, no duplicate edges. Node ids are dense
//! `0..N`; original file labels, when present, ride along in a side table.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::path::Path;

/// Errors from ingestion and graph construction.
#[derive(Debug, thiserror::Error)]
pub enum GraphError {
    #[error("failed to read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: expected \"src<TAB>dst\", got {found:?}")]
    MalformedLine { line: usize, found: String },
    #[error("no edges in input (every line is a comment or the file is empty)")]
    EmptyInput,
}

/// Immutable simple directed graph with both adjacency orientations.
#[derive(Debug, Clone)]
pub struct DirectedGraph {
    out_offsets: Vec<usize>,
    out_neighbors: Vec<u32>,
    in_offsets: Vec<usize>,
    in_neighbors: Vec<u32>,
    /// Original labels by dense index, kept when the graph came from a file.
    labels: Option<Vec<String>>,
}

impl DirectedGraph {
    /// Builds a graph from an edge list over dense node ids.
    ///
    /// Self-loops are dropped and duplicates collapsed, so the constructor
    /// is idempotent; callers that need the dropped counts (ingestion) count
    /// them before calling.
    pub fn from_edges(node_count: usize, edges: &[(u32, u32)]) -> Self {
        let mut list: Vec<(u32, u32)> = edges
            .iter()
            .copied()
            .filter(|&(s, t)| s != t)
            .collect();
        for &(s, t) in &list {
            assert!(
                (s as usize) < node_count && (t as usize) < node_count,
                "edge ({s},{t}) out of range for node_count {node_count}"
            );
        }
        list.sort_unstable();
        list.dedup();

        let mut out_offsets = vec![0usize; node_count + 1];
        for &(s, _) in &list {
            out_offsets[s as usize + 1] += 1;
        }
        for i in 0..node_count {
            out_offsets[i + 1] += out_offsets[i];
        }
        let out_neighbors: Vec<u32> = list.iter().map(|&(_, t)| t).collect();

        // Reverse orientation: sort by (dst, src) so each in-list is sorted.
        let mut rev: Vec<(u32, u32)> = list.iter().map(|&(s, t)| (t, s)).collect();
        rev.sort_unstable();
        let mut in_offsets = vec![0usize; node_count + 1];
        for &(t, _) in &rev {
            in_offsets[t as usize + 1] += 1;
        }
        for i in 0..node_count {
            in_offsets[i + 1] += in_offsets[i];
        }
        let in_neighbors: Vec<u32> = rev.iter().map(|&(_, s)| s).collect();

        DirectedGraph {
            out_offsets,
            out_neighbors,
            in_offsets,
            in_neighbors,
            labels: None,
        }
    }

    pub fn node_count(&self) -> usize {
        self.out_offsets.len() - 1
    }

    pub fn edge_count(&self) -> usize {
        self.out_neighbors.len()
    }

    pub fn out_neighbors(&self, i: u32) -> &[u32] {
        &self.out_neighbors[self.out_offsets[i as usize]..self.out_offsets[i as usize + 1]]
    }

    pub fn in_neighbors(&self, m: u32) -> &[u32] {
        &self.in_neighbors[self.in_offsets[m as usize]..self.in_offsets[m as usize + 1]]
    }

    pub fn k_out(&self, i: u32) -> usize {
        self.out_offsets[i as usize + 1] - self.out_offsets[i as usize]
    }

    pub fn k_in(&self, m: u32) -> usize {
        self.in_offsets[m as usize + 1] - self.in_offsets[m as usize]
    }

    /// Original label for a node, when the graph was loaded from a file.
    pub fn label(&self, i: u32) -> Option<&str> {
        self.labels.as_ref().map(|l| l[i as usize].as_str())
    }

    pub fn has_labels(&self) -> bool {
        self.labels.is_some()
    }

    /// Iterates edges as (src, dst) pairs in forward adjacency order.
    pub fn edges(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        (0..self.node_count() as u32)
            .flat_map(move |s| self.out_neighbors(s).iter().map(move |&t| (s, t)))
    }

    /// Structural equality ignoring labels; used by round-trip checks.
    pub fn same_topology(&self, other: &DirectedGraph) -> bool {
        self.out_offsets == other.out_offsets && self.out_neighbors == other.out_neighbors
    }

    /// Moves a label table onto the graph (rewiring ops keep node identity).
    pub(crate) fn with_labels(mut self, labels: Option<Vec<String>>) -> Self {
        if let Some(l) = &labels {
            assert_eq!(l.len(), self.node_count());
        }
        self.labels = labels;
        self
    }

    pub(crate) fn labels_cloned(&self) -> Option<Vec<String>> {
        self.labels.clone()
    }
}

/// Knobs for edge-list ingestion.
#[derive(Debug, Clone)]
pub struct IngestOptions {
    /// Lines starting with this character are skipped.
    pub comment_prefix: char,
    /// Retain the original-label table on the returned graph.
    pub keep_labels: bool,
}

impl Default for IngestOptions {
    fn default() -> Self {
        IngestOptions {
            comment_prefix: '#',
            keep_labels: true,
        }
    }
}

/// What ingestion kept and dropped.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IngestReport {
    pub lines_read: usize,
    pub edges_kept: usize,
    pub self_loops_dropped: usize,
    pub duplicates_dropped: usize,
}

/// Loads a tab-separated edge list ("src\tdst" per line, '#' comments).
///
/// Node ids may be arbitrary strings; they are remapped to dense indices in
/// sorted order (numeric when every id parses as an unsigned integer, else
/// lexicographic), which makes write/reload round trips the identity.
/// Self-loops and duplicate edges are dropped with counts in the report.
pub fn load_edge_list(
    path: impl AsRef<Path>,
    options: &IngestOptions,
) -> Result<(DirectedGraph, IngestReport), GraphError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| GraphError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_edge_list(&text, options)
}

fn parse_edge_list(
    text: &str,
    options: &IngestOptions,
) -> Result<(DirectedGraph, IngestReport), GraphError> {
    let mut raw: Vec<(String, String)> = Vec::new();
    let mut lines_read = 0usize;
    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = line.strip_suffix('\r').unwrap_or(line);
        if line.starts_with(options.comment_prefix) {
            continue;
        }
        lines_read += 1;
        let mut fields = line.split('\t');
        let (src, dst) = match (fields.next(), fields.next(), fields.next()) {
            (Some(s), Some(t), None) if !s.is_empty() && !t.is_empty() => (s, t),
            _ => {
                return Err(GraphError::MalformedLine {
                    line: line_no,
                    found: line.to_string(),
                })
            }
        };
        raw.push((src.to_string(), dst.to_string()));
    }
    if raw.is_empty() {
        return Err(GraphError::EmptyInput);
    }

    // Dense remap in a deterministic order.
    let mut labels: Vec<&str> = raw
        .iter()
        .flat_map(|(s, t)| [s.as_str(), t.as_str()])
        .collect();
    labels.sort_unstable();
    labels.dedup();
    let all_numeric = labels.iter().all(|l| l.parse::<u64>().is_ok());
    if all_numeric {
        labels.sort_unstable_by_key(|l| l.parse::<u64>().unwrap());
    }
    let index_of: std::collections::HashMap<&str, u32> = labels
        .iter()
        .enumerate()
        .map(|(i, &l)| (l, i as u32))
        .collect();

    let mut self_loops = 0usize;
    let mut duplicates = 0usize;
    let mut seen: HashSet<(u32, u32)> = HashSet::with_capacity(raw.len());
    let mut edges: Vec<(u32, u32)> = Vec::with_capacity(raw.len());
    for (s, t) in &raw {
        let (si, ti) = (index_of[s.as_str()], index_of[t.as_str()]);
        if si == ti {
            self_loops += 1;
        } else if !seen.insert((si, ti)) {
            duplicates += 1;
        } else {
            edges.push((si, ti));
        }
    }

    let mut g = DirectedGraph::from_edges(labels.len(), &edges);
    if options.keep_labels {
        g.labels = Some(labels.into_iter().map(str::to_string).collect());
    }
    let report = IngestReport {
        lines_read,
        edges_kept: edges.len(),
        self_loops_dropped: self_loops,
        duplicates_dropped: duplicates,
    };
    Ok((g, report))
}

/// Writes the graph back as a tab-separated edge list over dense indices.
pub fn write_edge_list(g: &DirectedGraph, path: impl AsRef<Path>) -> Result<(), GraphError> {
    let path = path.as_ref();
    let mut out = String::with_capacity(g.edge_count() * 12);
    for (s, t) in g.edges() {
        let _ = writeln!(out, "{s}\t{t}");
    }
    std::fs::write(path, out).map_err(|source| GraphError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Partition of nodes into strongly connected components.
#[derive(Debug, Clone)]
pub struct SccPartition {
    /// Component id per node; ids are contiguous in `0..component_count`.
    pub component_of: Vec<u32>,
    pub component_count: usize,
}

/// Tarjan's algorithm with an explicit stack (graphs can be deep chains).
pub fn strongly_connected_components(g: &DirectedGraph) -> SccPartition {
    const UNVISITED: u32 = u32::MAX;
    let n = g.node_count();
    let mut index = vec![UNVISITED; n];
    let mut lowlink = vec![0u32; n];
    let mut on_stack = vec![false; n];
    let mut stack: Vec<u32> = Vec::new();
    let mut component_of = vec![0u32; n];
    let mut next_index = 0u32;
    let mut component_count = 0u32;
    let mut frames: Vec<(u32, usize)> = Vec::new();

    for root in 0..n as u32 {
        if index[root as usize] != UNVISITED {
            continue;
        }
        frames.push((root, 0));
        while let Some(frame) = frames.last_mut() {
            let v = frame.0;
            let vs = v as usize;
            if frame.1 == 0 {
                index[vs] = next_index;
                lowlink[vs] = next_index;
                next_index += 1;
                stack.push(v);
                on_stack[vs] = true;
            }
            let out = g.out_neighbors(v);
            if frame.1 < out.len() {
                let w = out[frame.1];
                frame.1 += 1;
                let ws = w as usize;
                if index[ws] == UNVISITED {
                    frames.push((w, 0));
                } else if on_stack[ws] {
                    lowlink[vs] = lowlink[vs].min(index[ws]);
                }
            } else {
                frames.pop();
                if let Some(parent) = frames.last() {
                    let ps = parent.0 as usize;
                    lowlink[ps] = lowlink[ps].min(lowlink[vs]);
                }
                if lowlink[vs] == index[vs] {
                    loop {
                        let w = stack.pop().expect("tarjan stack underflow");
                        on_stack[w as usize] = false;
                        component_of[w as usize] = component_count;
                        if w == v {
                            break;
                        }
                    }
                    component_count += 1;
                }
            }
        }
    }

    SccPartition {
        component_of,
        component_count: component_count as usize,
    }
}

/// Extracts the largest strongly connected component as its own graph.
///
/// Ties on size break toward the component containing the smallest node id,
/// which is deterministic and independent of traversal order. The returned
/// map gives the original id for each new index.
pub fn largest_scc(g: &DirectedGraph) -> (DirectedGraph, Vec<u32>) {
    assert!(g.node_count() >= 1, "largest_scc needs at least one node");
    let part = strongly_connected_components(g);
    let mut size = vec![0usize; part.component_count];
    let mut min_node = vec![u32::MAX; part.component_count];
    for (node, &c) in part.component_of.iter().enumerate() {
        size[c as usize] += 1;
        min_node[c as usize] = min_node[c as usize].min(node as u32);
    }
    let mut best = 0usize;
    for c in 1..part.component_count {
        if size[c] > size[best] || (size[c] == size[best] && min_node[c] < min_node[best]) {
            best = c;
        }
    }

    let keep: Vec<u32> = (0..g.node_count() as u32)
        .filter(|&v| part.component_of[v as usize] == best as u32)
        .collect();
    let mut new_id = vec![u32::MAX; g.node_count()];
    for (new, &old) in keep.iter().enumerate() {
        new_id[old as usize] = new as u32;
    }
    let mut edges = Vec::new();
    for &old in &keep {
        for &t in g.out_neighbors(old) {
            if new_id[t as usize] != u32::MAX {
                edges.push((new_id[old as usize], new_id[t as usize]));
            }
        }
    }
    let mut sub = DirectedGraph::from_edges(keep.len(), &edges);
    if let Some(labels) = &g.labels {
        sub.labels = Some(keep.iter().map(|&old| labels[old as usize].clone()).collect());
    }
    (sub, keep)
}
