use std::collections::BTreeSet;

use super::Graph;
use crate::error::{Error, Result};
use crate::partition::Partition;
use crate::scalar::Scalar;

/// Links each node of a line graph back to the edge of the original graph
/// it stands for.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LineGraphMapping {
    pub edge_endpoints: Vec<(usize, usize)>,
    pub original_n: usize,
}

/// Line graph `L(G)`: one node per non-loop edge of `g`, two nodes adjacent
/// (weight 1) when their edges share an endpoint. Weights of `g` are not
/// carried over.
///
/// Line-node labels are `u--v` built from the endpoint labels, with any
/// whitespace replaced by `_` so the result can be written as an edge list.
pub fn line_graph<T: Scalar>(g: &Graph<T>) -> Result<(Graph<T>, LineGraphMapping)> {
    let endpoints: Vec<(usize, usize)> = g
        .edges()
        .into_iter()
        .filter(|&(u, v, _)| u != v)
        .map(|(u, v, _)| (u, v))
        .collect();
    if endpoints.is_empty() {
        return Err(Error::domain("line graph of an edgeless graph is empty"));
    }

    let mut incident: Vec<Vec<usize>> = vec![Vec::new(); g.node_count()];
    for (e, &(u, v)) in endpoints.iter().enumerate() {
        incident[u].push(e);
        incident[v].push(e);
    }
    let mut edges = Vec::new();
    for list in &incident {
        for (a, &e) in list.iter().enumerate() {
            for &f in &list[a + 1..] {
                edges.push((e, f, T::one()));
            }
        }
    }
    // Distinct edges share at most one endpoint, so every pair appears once.
    let clean = |s: &str| s.replace(char::is_whitespace, "_");
    let labels = endpoints
        .iter()
        .map(|&(u, v)| format!("{}--{}", clean(g.label(u)), clean(g.label(v))))
        .collect();
    let lg = Graph::from_edges(labels, &edges)?;
    Ok((
        lg,
        LineGraphMapping {
            edge_endpoints: endpoints,
            original_n: g.node_count(),
        },
    ))
}

/// Turns an edge partition into overlapping node communities: each node
/// belongs to the community of every edge it touches. Sets are ascending.
pub fn project_edge_partition(
    mapping: &LineGraphMapping,
    edge_partition: &Partition,
) -> Result<Vec<Vec<usize>>> {
    if edge_partition.len() != mapping.edge_endpoints.len() {
        return Err(Error::domain(format!(
            "edge partition has {} entries but the line graph has {} nodes",
            edge_partition.len(),
            mapping.edge_endpoints.len()
        )));
    }
    let mut sets = vec![BTreeSet::new(); mapping.original_n];
    for (e, &(u, v)) in mapping.edge_endpoints.iter().enumerate() {
        let c = edge_partition.community_of(e);
        sets[u].insert(c);
        sets[v].insert(c);
    }
    Ok(sets.into_iter().map(|s| s.into_iter().collect()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures::*;

    #[test]
    fn triangle_line_graph_is_triangle() {
        let (lg, map) = line_graph(&triangle()).unwrap();
        assert_eq!(lg.node_count(), 3);
        assert_eq!(lg.edge_count(), 3);
        assert_eq!(map.edge_endpoints, vec![(0, 1), (0, 2), (1, 2)]);
    }

    #[test]
    fn path_line_graph_is_single_edge() {
        let (lg, _) = line_graph(&path3()).unwrap();
        assert_eq!(lg.node_count(), 2);
        assert_eq!(lg.edge_count(), 1);
        assert_eq!(lg.labels(), &["a--b", "b--c"]);
    }

    #[test]
    fn star_line_graph_is_triangle() {
        let (lg, _) = line_graph(&star3()).unwrap();
        assert_eq!(lg.node_count(), 3);
        assert_eq!(lg.edge_count(), 3);
    }

    #[test]
    fn self_loops_and_weights_ignored() {
        let g = Graph::from_index_edges(3, &[(0, 0, 1.0), (0, 1, 5.0), (1, 2, 2.0)]).unwrap();
        let (lg, map) = line_graph(&g).unwrap();
        assert_eq!(map.edge_endpoints.len(), 2);
        assert_eq!(lg.weight(0, 1), 1.0);
    }

    #[test]
    fn edgeless_graph_rejected() {
        let g = Graph::from_index_edges(2, &[(0, 0, 1.0)]).unwrap();
        assert!(line_graph(&g).is_err());
    }

    #[test]
    fn projection_of_path() {
        let (_, map) = line_graph(&path3()).unwrap();
        let together = project_edge_partition(&map, &Partition::whole(2)).unwrap();
        assert_eq!(together, vec![vec![0], vec![0], vec![0]]);
        let split = project_edge_partition(&map, &Partition::singletons(2)).unwrap();
        assert_eq!(split, vec![vec![0], vec![0, 1], vec![1]]);
    }

    #[test]
    fn projection_isolated_node_empty_and_length_checked() {
        let g = Graph::from_index_edges(3, &[(0, 1, 1.0)]).unwrap();
        let (_, map) = line_graph(&g).unwrap();
        let sets = project_edge_partition(&map, &Partition::whole(1)).unwrap();
        assert_eq!(sets[2], Vec::<usize>::new());
        assert!(project_edge_partition(&map, &Partition::whole(2)).is_err());
    }
}
