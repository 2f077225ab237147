//! Exclusivity graphs: circulants, complements, the disjunctive product,
//! automorphism-based vertex transitivity and independence numbers.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Vertex ceiling for every graph built here (one `u64` adjacency row each).
pub const MAX_VERTICES: usize = 64;
/// Largest graph accepted by [`is_vertex_transitive`].
pub const MAX_TRANSITIVITY_VERTICES: usize = 16;
/// Largest graph accepted by [`independence_number`].
pub const MAX_INDEPENDENCE_VERTICES: usize = 24;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("distance {distance} is outside 1..={max} for a circulant on {n} vertices")]
    InvalidDistance {
        n: usize,
        distance: usize,
        max: usize,
    },
    #[error("circulant needs at least one distance")]
    EmptyDistances,
    #[error("graph has {n} vertices, limit for this operation is {limit}")]
    TooLarge { n: usize, limit: usize },
    #[error("vertex {index} out of range for a graph on {n} vertices")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("malformed graph text: {0}")]
    Parse(String),
}

/// Undirected simple graph on `0..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExclusivityGraph {
    n: usize,
    edges: BTreeSet<(usize, usize)>,
    adjacency: Vec<u64>,
}

/// JSON shape `{n, edges: [[i, j], ...]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphJson {
    pub n: usize,
    pub edges: Vec<[usize; 2]>,
}

impl ExclusivityGraph {
    pub fn empty(n: usize) -> Result<Self, GraphError> {
        if n > MAX_VERTICES {
            return Err(GraphError::TooLarge {
                n,
                limit: MAX_VERTICES,
            });
        }
        Ok(Self {
            n,
            edges: BTreeSet::new(),
            adjacency: vec![0; n],
        })
    }

    pub fn complete(n: usize) -> Result<Self, GraphError> {
        Self::empty(n).map(|g| complement(&g))
    }

    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut g = Self::empty(n)?;
        for (i, j) in edges {
            g.add_edge(i, j)?;
        }
        Ok(g)
    }

    fn add_edge(&mut self, i: usize, j: usize) -> Result<(), GraphError> {
        for index in [i, j] {
            if index >= self.n {
                return Err(GraphError::IndexOutOfRange { index, n: self.n });
            }
        }
        if i == j {
            return Err(GraphError::SelfLoop(i));
        }
        self.edges.insert((i.min(j), i.max(j)));
        self.adjacency[i] |= 1 << j;
        self.adjacency[j] |= 1 << i;
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Edges in canonical `(min, max)` order, sorted.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        i < self.n && j < self.n && self.adjacency[i] >> j & 1 == 1
    }

    pub fn neighbors(&self, v: usize) -> Vec<usize> {
        (0..self.n).filter(|&u| self.has_edge(v, u)).collect()
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].count_ones() as usize
    }

    pub(crate) fn adjacency_mask(&self, v: usize) -> u64 {
        self.adjacency[v]
    }

    pub fn to_json(&self) -> GraphJson {
        GraphJson {
            n: self.n,
            edges: self.edges().map(|(i, j)| [i, j]).collect(),
        }
    }

    pub fn from_json(json: &GraphJson) -> Result<Self, GraphError> {
        Self::from_edges(json.n, json.edges.iter().map(|e| (e[0], e[1])))
    }

    /// DOT text with one node line per vertex and one `a -- b;` line per edge.
    pub fn to_dot(&self, name: &str, labels: &[String]) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "graph \"{}\" {{", escape_dot(name));
        for v in 0..self.n {
            let label = labels.get(v).cloned().unwrap_or_else(|| v.to_string());
            let _ = writeln!(out, "  {v} [label=\"{}\"];", escape_dot(&label));
        }
        for (i, j) in self.edges() {
            let _ = writeln!(out, "  {i} -- {j};");
        }
        out.push_str("}\n");
        out
    }

    /// Reads back the DOT subset written by [`ExclusivityGraph::to_dot`].
    pub fn from_dot(text: &str) -> Result<Self, GraphError> {
        let mut n = 0;
        let mut edges = Vec::new();
        for line in text.lines().map(str::trim) {
            let line = line.trim_end_matches(';');
            if let Some((a, b)) = line.split_once("--") {
                let parse = |s: &str| {
                    s.trim()
                        .parse::<usize>()
                        .map_err(|_| GraphError::Parse(format!("bad edge line {line:?}")))
                };
                edges.push((parse(a)?, parse(b)?));
            } else if let Some((head, _)) = line.split_once('[') {
                if let Ok(v) = head.trim().parse::<usize>() {
                    n = n.max(v + 1);
                }
            }
        }
        Self::from_edges(n, edges)
    }
}

fn escape_dot(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Circulant graph on `Z_n` given by a set of circular distances.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CirculantSpec {
    pub n: usize,
    pub distances: BTreeSet<usize>,
}

impl CirculantSpec {
    pub fn new<I: IntoIterator<Item = usize>>(n: usize, distances: I) -> Self {
        Self {
            n,
            distances: distances.into_iter().collect(),
        }
    }
}

/// Circular distance `min(|i - j|, n - |i - j|)`.
pub fn circular_distance(i: usize, j: usize, n: usize) -> usize {
    let d = i.abs_diff(j) % n;
    d.min(n - d)
}

pub fn circulant(spec: &CirculantSpec) -> Result<ExclusivityGraph, GraphError> {
    let n = spec.n;
    if spec.distances.is_empty() {
        return Err(GraphError::EmptyDistances);
    }
    for &distance in &spec.distances {
        if distance == 0 || distance > n / 2 {
            return Err(GraphError::InvalidDistance {
                n,
                distance,
                max: n / 2,
            });
        }
    }
    let mut g = ExclusivityGraph::empty(n)?;
    for i in 0..n {
        for j in (i + 1)..n {
            if spec.distances.contains(&circular_distance(i, j, n)) {
                g.add_edge(i, j)?;
            }
        }
    }
    Ok(g)
}

pub fn complement(g: &ExclusivityGraph) -> ExclusivityGraph {
    let mut out = ExclusivityGraph::empty(g.n).expect("same size as input");
    for i in 0..g.n {
        for j in (i + 1)..g.n {
            if !g.has_edge(i, j) {
                out.add_edge(i, j).expect("indices in range");
            }
        }
    }
    out
}

/// Vertex `(i, j)` of a product graph, row-major with `i` the first factor.
pub fn product_index(i: usize, j: usize, second_n: usize) -> usize {
    i * second_n + j
}

/// Co-normal (disjunctive) product: `(i, j) ~ (k, l)` iff `i ~ k` in the
/// first factor or `j ~ l` in the second.
pub fn disjunctive_product(
    first: &ExclusivityGraph,
    second: &ExclusivityGraph,
) -> Result<ExclusivityGraph, GraphError> {
    let n = first.n * second.n;
    let mut g = ExclusivityGraph::empty(n)?;
    for a in 0..n {
        let (i, j) = (a / second.n, a % second.n);
        for b in (a + 1)..n {
            let (k, l) = (b / second.n, b % second.n);
            if first.has_edge(i, k) || second.has_edge(j, l) {
                g.add_edge(a, b)?;
            }
        }
    }
    Ok(g)
}

pub fn is_clique(g: &ExclusivityGraph, vertices: &[usize]) -> Result<bool, GraphError> {
    if let Some(&index) = vertices.iter().find(|&&v| v >= g.n) {
        return Err(GraphError::IndexOutOfRange { index, n: g.n });
    }
    Ok(vertices.iter().enumerate().all(|(a, &u)| {
        vertices[a + 1..]
            .iter()
            .all(|&v| u == v || g.has_edge(u, v))
    }))
}

/// Size of a largest set of pairwise non-adjacent vertices.
pub fn independence_number(g: &ExclusivityGraph) -> Result<usize, GraphError> {
    if g.n > MAX_INDEPENDENCE_VERTICES {
        return Err(GraphError::TooLarge {
            n: g.n,
            limit: MAX_INDEPENDENCE_VERTICES,
        });
    }
    let all = if g.n == 64 {
        u64::MAX
    } else {
        (1u64 << g.n) - 1
    };
    let mut best = 0;
    grow_independent(g, all, 0, &mut best);
    Ok(best)
}

// Branch on the lowest candidate: either take it (dropping its neighbours)
// or discard it. Prune when even taking every candidate cannot beat `best`.
fn grow_independent(g: &ExclusivityGraph, candidates: u64, size: usize, best: &mut usize) {
    if candidates == 0 {
        *best = (*best).max(size);
        return;
    }
    if size + candidates.count_ones() as usize <= *best {
        return;
    }
    let v = candidates.trailing_zeros() as usize;
    let rest = candidates & !(1 << v);
    grow_independent(g, rest & !g.adjacency_mask(v), size + 1, best);
    grow_independent(g, rest, size, best);
}

/// True iff the automorphism group acts transitively on the vertices.
///
/// Checks that vertex 0 can be mapped onto every other vertex; the orbit of
/// one vertex being everything is equivalent to transitivity.
pub fn is_vertex_transitive(g: &ExclusivityGraph) -> Result<bool, GraphError> {
    if g.n > MAX_TRANSITIVITY_VERTICES {
        return Err(GraphError::TooLarge {
            n: g.n,
            limit: MAX_TRANSITIVITY_VERTICES,
        });
    }
    if g.n <= 1 {
        return Ok(true);
    }
    let d0 = g.degree(0);
    if (1..g.n).any(|v| g.degree(v) != d0) {
        return Ok(false);
    }
    Ok((1..g.n).all(|target| find_automorphism(g, 0, target).is_some()))
}

/// Some automorphism sending `from` to `to`, if one exists.
pub fn find_automorphism(g: &ExclusivityGraph, from: usize, to: usize) -> Option<Vec<usize>> {
    let n = g.n;
    let mut image = vec![usize::MAX; n];
    let mut used = vec![false; n];
    image[from] = to;
    used[to] = true;
    if g.degree(from) != g.degree(to) {
        return None;
    }
    let order: Vec<usize> = std::iter::once(from)
        .chain((0..n).filter(|&v| v != from))
        .collect();
    if extend_automorphism(g, &order, 1, &mut image, &mut used) {
        Some(image)
    } else {
        None
    }
}

fn extend_automorphism(
    g: &ExclusivityGraph,
    order: &[usize],
    depth: usize,
    image: &mut [usize],
    used: &mut [bool],
) -> bool {
    if depth == order.len() {
        return true;
    }
    let v = order[depth];
    for candidate in 0..g.n {
        if used[candidate] || g.degree(candidate) != g.degree(v) {
            continue;
        }
        let consistent = order[..depth]
            .iter()
            .all(|&u| g.has_edge(u, v) == g.has_edge(image[u], candidate));
        if !consistent {
            continue;
        }
        image[v] = candidate;
        used[candidate] = true;
        if extend_automorphism(g, order, depth + 1, image, used) {
            return true;
        }
        used[candidate] = false;
        image[v] = usize::MAX;
    }
    false
}
