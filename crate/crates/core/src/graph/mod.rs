//! Undirected weighted graphs, their ingestion, line graphs and leaf pruning.

mod io;
mod leaves;
mod line;

pub use io::{load_edge_list, load_gml, write_edge_list};
pub use leaves::{prune_leaves, prune_leaves_with, reattach_leaves, LeafRecord, PruneMode};
pub use line::{line_graph, project_edge_partition, LineGraphMapping};

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::scalar::Scalar;

/// Undirected weighted graph on dense storage.
///
/// Adjacency entries are stored so that row sums are node strengths: a
/// self-loop of weight `w` is held as `A[i][i] = 2w`, i.e. counted twice in
/// the strength, and `total_weight = sum(A) / 2` is the total edge weight.
/// Scaled adjacencies built from Markov powers use the same convention, so
/// any such matrix can be wrapped as a `Graph` without adjustment.
#[derive(Clone, Debug)]
pub struct Graph<T = f64> {
    labels: Vec<String>,
    adjacency: Matrix<T>,
    strengths: Vec<T>,
    total_weight: T,
}

impl<T: Scalar> Graph<T> {
    /// Builds a graph from a symmetric non-negative matrix whose row sums are
    /// taken as strengths.
    pub fn from_adjacency(labels: Vec<String>, adjacency: Matrix<T>) -> Result<Self> {
        let n = labels.len();
        if adjacency.rows() != n || adjacency.cols() != n {
            return Err(Error::domain(format!(
                "adjacency is {}x{} but {n} labels were given",
                adjacency.rows(),
                adjacency.cols()
            )));
        }
        check_unique(&labels)?;
        let scale = adjacency.norm_inf().max(T::one());
        let tol = T::of(1e-12).max(T::epsilon() * T::of(16.0)) * scale;
        for i in 0..n {
            for j in 0..n {
                let a = adjacency[(i, j)];
                if !(a >= T::zero()) || !a.is_finite() {
                    return Err(Error::domain(format!(
                        "adjacency entry ({i}, {j}) = {a} is not a finite non-negative weight"
                    )));
                }
                if (a - adjacency[(j, i)]).abs() > tol {
                    return Err(Error::domain(format!(
                        "adjacency is not symmetric at ({i}, {j})"
                    )));
                }
            }
        }
        let strengths = adjacency.row_sums();
        let total_weight = strengths.iter().copied().sum::<T>() / T::two();
        Ok(Graph {
            labels,
            adjacency,
            strengths,
            total_weight,
        })
    }

    /// Builds a graph from undirected weighted edges between node indices.
    /// Repeated pairs accumulate; `(u, v)` and `(v, u)` are the same edge.
    pub fn from_edges(labels: Vec<String>, edges: &[(usize, usize, T)]) -> Result<Self> {
        let n = labels.len();
        let mut adjacency = Matrix::zeros(n, n);
        for &(u, v, w) in edges {
            if u >= n || v >= n {
                return Err(Error::domain(format!("edge ({u}, {v}) references a missing node")));
            }
            if !(w >= T::zero()) || !w.is_finite() {
                return Err(Error::domain(format!("edge ({u}, {v}) has invalid weight {w}")));
            }
            if u == v {
                adjacency[(u, u)] += T::two() * w;
            } else {
                adjacency[(u, v)] += w;
                adjacency[(v, u)] += w;
            }
        }
        Self::from_adjacency(labels, adjacency)
    }

    /// Convenience constructor with labels `"0".."n-1"`.
    pub fn from_index_edges(n: usize, edges: &[(usize, usize, T)]) -> Result<Self> {
        Self::from_edges((0..n).map(|i| i.to_string()).collect(), edges)
    }

    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn adjacency(&self) -> &Matrix<T> {
        &self.adjacency
    }

    pub fn weight(&self, i: usize, j: usize) -> T {
        self.adjacency[(i, j)]
    }

    pub fn strengths(&self) -> &[T] {
        &self.strengths
    }

    /// `m`: half the sum of all adjacency entries.
    pub fn total_weight(&self) -> T {
        self.total_weight
    }

    /// Distinct neighbours of `i`, excluding `i` itself, ascending.
    pub fn neighbours(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        self.adjacency
            .row(i)
            .iter()
            .enumerate()
            .filter(move |&(j, &w)| j != i && w > T::zero())
            .map(|(j, _)| j)
    }

    /// Unweighted degree, self-loops excluded.
    pub fn degree(&self, i: usize) -> usize {
        self.neighbours(i).count()
    }

    /// Edges `(u, v, w)` with `u <= v`, in row-major order. Self-loop weights
    /// are reported as the original edge weight (half the stored entry).
    pub fn edges(&self) -> Vec<(usize, usize, T)> {
        let n = self.node_count();
        let mut out = Vec::new();
        for u in 0..n {
            for v in u..n {
                let w = self.adjacency[(u, v)];
                if w > T::zero() {
                    out.push((u, v, if u == v { w / T::two() } else { w }));
                }
            }
        }
        out
    }

    /// Number of edges between distinct nodes.
    pub fn edge_count(&self) -> usize {
        (0..self.node_count()).map(|i| self.degree(i)).sum::<usize>() / 2
    }

    pub fn has_self_loops(&self) -> bool {
        (0..self.node_count()).any(|i| self.adjacency[(i, i)] > T::zero())
    }

    /// First node with zero strength, if any.
    pub fn isolated_node(&self) -> Option<usize> {
        self.strengths.iter().position(|&d| d <= T::zero())
    }

    /// Connected-component label per node, components numbered by first node.
    pub fn components(&self) -> Vec<usize> {
        let n = self.node_count();
        let mut comp = vec![usize::MAX; n];
        let mut next = 0;
        for s in 0..n {
            if comp[s] != usize::MAX {
                continue;
            }
            comp[s] = next;
            let mut stack = vec![s];
            while let Some(u) = stack.pop() {
                for v in self.neighbours(u) {
                    if comp[v] == usize::MAX {
                        comp[v] = next;
                        stack.push(v);
                    }
                }
            }
            next += 1;
        }
        comp
    }

    pub fn is_connected(&self) -> bool {
        self.components().iter().all(|&c| c == 0)
    }

    /// Subgraph induced by `nodes` (in the given order), labels preserved.
    pub fn induced(&self, nodes: &[usize]) -> Graph<T> {
        let k = nodes.len();
        let mut adjacency = Matrix::zeros(k, k);
        for (a, &u) in nodes.iter().enumerate() {
            for (b, &v) in nodes.iter().enumerate() {
                adjacency[(a, b)] = self.adjacency[(u, v)];
            }
        }
        let labels: Vec<String> = nodes.iter().map(|&u| self.labels[u].clone()).collect();
        let strengths = adjacency.row_sums();
        let total_weight = strengths.iter().copied().sum::<T>() / T::two();
        Graph {
            labels,
            adjacency,
            strengths,
            total_weight,
        }
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// Converts the graph to another scalar type.
    pub fn cast<U: Scalar>(&self) -> Graph<U> {
        let adjacency = self.adjacency.map(|x| U::of(x.as_f64()));
        let strengths = adjacency.row_sums();
        let total_weight = strengths.iter().copied().sum::<U>() / U::two();
        Graph {
            labels: self.labels.clone(),
            adjacency,
            strengths,
            total_weight,
        }
    }
}

fn check_unique(labels: &[String]) -> Result<()> {
    let mut seen = HashMap::with_capacity(labels.len());
    for (i, l) in labels.iter().enumerate() {
        if let Some(j) = seen.insert(l.as_str(), i) {
            return Err(Error::domain(format!(
                "node label {l:?} is used by nodes {j} and {i}"
            )));
        }
    }
    Ok(())
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::Graph;

    pub fn path3() -> Graph {
        Graph::from_edges(
            vec!["a".into(), "b".into(), "c".into()],
            &[(0, 1, 1.0), (1, 2, 1.0)],
        )
        .unwrap()
    }

    pub fn triangle() -> Graph {
        Graph::from_index_edges(3, &[(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)]).unwrap()
    }

    pub fn star3() -> Graph {
        Graph::from_index_edges(4, &[(0, 1, 1.0), (0, 2, 1.0), (0, 3, 1.0)]).unwrap()
    }

    /// Two triangles {0,1,2} and {3,4,5} joined by the edge 2-3.
    pub fn barbell() -> Graph {
        Graph::from_index_edges(
            6,
            &[
                (0, 1, 1.0),
                (1, 2, 1.0),
                (0, 2, 1.0),
                (3, 4, 1.0),
                (4, 5, 1.0),
                (3, 5, 1.0),
                (2, 3, 1.0),
            ],
        )
        .unwrap()
    }
}
