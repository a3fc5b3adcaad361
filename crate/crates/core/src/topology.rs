//! Communication graphs: clique, non-toroidal grid, and ring.

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Undirected simple connected graph with sorted adjacency lists.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    adjacency: Vec<Vec<usize>>,
    edge_count: usize,
}

impl Graph {
    /// Builds a graph from an undirected edge list, rejecting self-loops,
    /// duplicate edges, out-of-range endpoints and disconnected results.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidInput(
                "a graph needs at least one node".into(),
            ));
        }
        let mut adjacency = vec![Vec::new(); n];
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::InvalidInput(format!(
                    "edge ({u}, {v}) leaves 0..{n}"
                )));
            }
            if u == v {
                return Err(Error::InvalidInput(format!("self-loop at {u}")));
            }
            adjacency[u].push(v);
            adjacency[v].push(u);
        }
        for (u, list) in adjacency.iter_mut().enumerate() {
            list.sort_unstable();
            if list.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::InvalidInput(format!("duplicate edge at node {u}")));
            }
        }
        let graph = Graph {
            adjacency,
            edge_count: edges.len(),
        };
        if !graph.is_connected() {
            return Err(Error::InvalidInput("graph is not connected".into()));
        }
        Ok(graph)
    }

    /// A lone node with no links.
    pub fn single_node() -> Self {
        Graph {
            adjacency: vec![Vec::new()],
            edge_count: 0,
        }
    }

    pub fn node_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn is_connected(&self) -> bool {
        let n = self.node_count();
        let mut seen = vec![false; n];
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        let mut reached = 1;
        while let Some(u) = queue.pop_front() {
            for &w in &self.adjacency[u] {
                if !seen[w] {
                    seen[w] = true;
                    reached += 1;
                    queue.push_back(w);
                }
            }
        }
        reached == n
    }

    /// Each undirected edge once, as `(u, v)` with `u < v`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(u, list)| list.iter().filter(move |&&v| u < v).map(move |&v| (u, v)))
    }

    /// Plain-text edge list, one `u v` pair per line.
    pub fn edge_list_text(&self) -> String {
        self.edges().map(|(u, v)| format!("{u} {v}\n")).collect()
    }
}

/// Clique on `n` nodes.
pub fn build_complete(n: usize) -> Result<Graph> {
    if n < 2 {
        return Err(Error::InvalidInput(format!(
            "complete graph needs n >= 2, got {n}"
        )));
    }
    let edges: Vec<_> = (0..n)
        .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
        .collect();
    Graph::from_edges(n, &edges)
}

/// Rows and columns of the most square `rows x cols = n` lattice with
/// `rows <= cols`. Only 2 and 3 fall back to a single row.
pub fn grid_shape(n: usize) -> Result<(usize, usize)> {
    if n < 2 {
        return Err(Error::InvalidInput(format!("grid needs n >= 2, got {n}")));
    }
    let best = (2..)
        .take_while(|r| r * r <= n)
        .filter(|r| n.is_multiple_of(*r))
        .last()
        .map(|r| (r, n / r));
    match best {
        Some(shape) => Ok(shape),
        None if n <= 3 => Ok((1, n)),
        None => Err(Error::InvalidInput(format!(
            "{n} nodes cannot form a 2-D grid"
        ))),
    }
}

/// Non-toroidal lattice, nodes numbered row-major.
pub fn build_grid(n: usize) -> Result<Graph> {
    let (rows, cols) = grid_shape(n)?;
    let mut edges = Vec::with_capacity(rows * (cols - 1) + cols * (rows - 1));
    for r in 0..rows {
        for c in 0..cols {
            let v = r * cols + c;
            if c + 1 < cols {
                edges.push((v, v + 1));
            }
            if r + 1 < rows {
                edges.push((v, v + cols));
            }
        }
    }
    Graph::from_edges(n, &edges)
}

/// Ring `0 - 1 - ... - (n-1) - 0`.
pub fn build_cycle(n: usize) -> Result<Graph> {
    if n < 3 {
        return Err(Error::InvalidInput(format!("cycle needs n >= 3, got {n}")));
    }
    let edges: Vec<_> = (0..n).map(|u| (u, (u + 1) % n)).collect();
    Graph::from_edges(n, &edges)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TopologyKind {
    Complete,
    Grid,
    Cycle,
}

impl TopologyKind {
    pub const ALL: [TopologyKind; 3] = [
        TopologyKind::Complete,
        TopologyKind::Grid,
        TopologyKind::Cycle,
    ];

    /// Builds the graph on `n` nodes. A single node is accepted for every
    /// kind and yields an isolated node.
    pub fn build(self, n: usize) -> Result<Graph> {
        if n == 1 {
            return Ok(Graph::single_node());
        }
        match self {
            TopologyKind::Complete => build_complete(n),
            TopologyKind::Grid => build_grid(n),
            TopologyKind::Cycle => build_cycle(n),
        }
    }
}

impl fmt::Display for TopologyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TopologyKind::Complete => "complete",
            TopologyKind::Grid => "grid",
            TopologyKind::Cycle => "cycle",
        })
    }
}

impl FromStr for TopologyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "complete" => Ok(TopologyKind::Complete),
            "grid" => Ok(TopologyKind::Grid),
            "cycle" | "circle" | "ring" => Ok(TopologyKind::Cycle),
            other => Err(Error::InvalidInput(format!("unknown topology '{other}'"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn check_invariants(g: &Graph) {
        let degree_sum: usize = (0..g.node_count()).map(|v| g.degree(v)).sum();
        assert_eq!(degree_sum, 2 * g.edge_count());
        assert_eq!(g.edges().count(), g.edge_count());
        for u in 0..g.node_count() {
            assert!(!g.neighbors(u).contains(&u));
            assert!(g.neighbors(u).windows(2).all(|w| w[0] < w[1]));
            for &w in g.neighbors(u) {
                assert!(g.neighbors(w).contains(&u));
            }
        }
        assert!(g.is_connected());
    }

    #[test]
    fn complete_examples() {
        assert_eq!(build_complete(4).unwrap().edge_count(), 6);
        let g = build_complete(50).unwrap();
        assert_eq!(g.edge_count(), 1225);
        assert!((0..50).all(|v| g.degree(v) == 49));
        assert!(build_complete(1).is_err());
    }

    fn enumerate_grid_edges(rows: usize, cols: usize) -> usize {
        // Count unordered pairs of cells at Manhattan distance one.
        let cells: Vec<(i64, i64)> = (0..rows as i64)
            .flat_map(|r| (0..cols as i64).map(move |c| (r, c)))
            .collect();
        let mut count = 0;
        for (i, a) in cells.iter().enumerate() {
            for b in &cells[i + 1..] {
                if (a.0 - b.0).abs() + (a.1 - b.1).abs() == 1 {
                    count += 1;
                }
            }
        }
        count
    }

    #[test]
    fn grid_examples() {
        assert_eq!(grid_shape(16).unwrap(), (4, 4));
        assert_eq!(grid_shape(8).unwrap(), (2, 4));
        assert_eq!(enumerate_grid_edges(4, 4), 24);
        assert_eq!(enumerate_grid_edges(2, 4), 10);
        assert_eq!(build_grid(16).unwrap().edge_count(), 24);
        assert_eq!(build_grid(8).unwrap().edge_count(), 10);
        let g = build_grid(16).unwrap();
        assert_eq!(g.degree(0), 2);
        assert_eq!(g.degree(5), 4);
        assert_eq!(g.degree(1), 3);
        assert_eq!(g.neighbors(5), &[1, 4, 6, 9]);
    }

    #[test]
    fn grid_rejects_primes() {
        for n in [5, 7, 11, 13, 37] {
            assert!(build_grid(n).is_err(), "{n}");
        }
        assert_eq!(grid_shape(2).unwrap(), (1, 2));
        assert_eq!(grid_shape(3).unwrap(), (1, 3));
        assert_eq!(grid_shape(36).unwrap(), (6, 6));
        assert_eq!(grid_shape(50).unwrap(), (5, 10));
    }

    #[test]
    fn grid_edge_count_formula_matches_enumeration() {
        for n in [4, 6, 8, 9, 10, 12, 16, 25, 36, 50, 64] {
            let (r, c) = grid_shape(n).unwrap();
            let g = build_grid(n).unwrap();
            assert_eq!(g.edge_count(), r * (c - 1) + c * (r - 1));
            assert_eq!(g.edge_count(), enumerate_grid_edges(r, c));
            check_invariants(&g);
        }
    }

    #[test]
    fn cycle_examples() {
        assert_eq!(build_cycle(4).unwrap().edge_count(), 4);
        let g = build_cycle(36).unwrap();
        assert!((0..36).all(|v| g.degree(v) == 2));
        assert!(build_cycle(2).is_err());
        // Dropping any one edge leaves a path, which is still connected.
        let edges: Vec<_> = g.edges().collect();
        for skip in 0..edges.len() {
            let rest: Vec<_> = edges
                .iter()
                .enumerate()
                .filter(|(i, _)| *i != skip)
                .map(|(_, e)| *e)
                .collect();
            assert!(Graph::from_edges(36, &rest).is_ok());
        }
    }

    #[test]
    fn from_edges_rejects_bad_input() {
        assert!(Graph::from_edges(3, &[(0, 0), (1, 2)]).is_err());
        assert!(Graph::from_edges(3, &[(0, 1), (1, 0), (1, 2)]).is_err());
        assert!(Graph::from_edges(3, &[(0, 1)]).is_err());
        assert!(Graph::from_edges(3, &[(0, 3)]).is_err());
    }

    #[test]
    fn edge_list_export() {
        assert_eq!(build_cycle(3).unwrap().edge_list_text(), "0 1\n0 2\n1 2\n");
    }

    #[test]
    fn topology_names_parse() {
        for kind in TopologyKind::ALL {
            assert_eq!(kind.to_string().parse::<TopologyKind>().unwrap(), kind);
        }
        assert!("torus".parse::<TopologyKind>().is_err());
        assert_eq!(TopologyKind::Complete.build(1).unwrap().node_count(), 1);
    }

    proptest! {
        #[test]
        fn builders_satisfy_graph_invariants(n in 2usize..80) {
            check_invariants(&build_complete(n).unwrap());
            if n >= 3 {
                check_invariants(&build_cycle(n).unwrap());
            }
            if let Ok(g) = build_grid(n) {
                check_invariants(&g);
            }
        }
    }
}
