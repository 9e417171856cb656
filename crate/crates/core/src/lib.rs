//! Multi-scale community detection by greedy optimisation of Markov stability.
//!
//! The numeric core is generic over [`Scalar`] (`f32` or `f64`); the `*64`
//! and `*32` aliases below fix the scalar for the common cases.
//!
//! ```
//! use markov_stability::{load_edge_list, gso, MarkovTimeGrid, OptimizerConfig};
//!
//! let g = load_edge_list::<f64>("a b\nb c\nc a\nc d\nd e\ne f\nf d\n").unwrap();
//! let cfg = OptimizerConfig::new(MarkovTimeGrid::single(1.0).unwrap());
//! let result = gso(&g, &cfg).unwrap();
//! assert_eq!(result.best_partition.community_count(), 2);
//! ```

pub mod analysis;
pub mod error;
pub mod graph;
pub mod markov;
pub mod matrix;
pub mod netgen;
pub mod optimize;
pub mod partition;
pub mod scalar;
pub mod stability;

pub use analysis::{detect_plateaus, nmi, sweep, Optimiser, Plateau, SweepConfig, SweepRecord};
pub use error::{Error, Result};
pub use graph::{
    line_graph, load_edge_list, load_gml, project_edge_partition, prune_leaves, prune_leaves_with,
    reattach_leaves, write_edge_list, Graph, LeafRecord, LineGraphMapping, PruneMode,
};
pub use markov::{
    build_time_grid, matrix_exponential_scaled, scaled_adjacencies, scaled_adjacency,
    stationary_distribution, transition_matrix, GridSpec, MarkovModel, MarkovTimeGrid,
    ScaledAdjacency,
};
pub use matrix::Matrix;
pub use netgen::{arenas_h, ravasz_barabasi, HParams, RBParams};
pub use optimize::{
    greedy_with_scales, gso, gso_single_time, louvain, lso, msgso, refine_vertex_mover, rgso,
    MergeStep, OptimizationResult, OptimizerConfig, Strategy, TieBreak,
};
pub use partition::Partition;
pub use scalar::Scalar;
pub use stability::{
    community_matrices, delta_stability, evaluate_partition, merge_communities, modularity,
    stability, CommunityMatrixSet,
    StabilityScore, StabilityVector,
};

pub type Graph64 = Graph<f64>;
pub type Graph32 = Graph<f32>;
pub type MarkovTimeGrid64 = MarkovTimeGrid<f64>;
pub type MarkovTimeGrid32 = MarkovTimeGrid<f32>;
pub type CommunityMatrixSet64 = CommunityMatrixSet<f64>;
pub type CommunityMatrixSet32 = CommunityMatrixSet<f32>;
pub type OptimizationResult64 = OptimizationResult<f64>;
pub type OptimizationResult32 = OptimizationResult<f32>;
pub type OptimizerConfig64 = OptimizerConfig<f64>;
pub type OptimizerConfig32 = OptimizerConfig<f32>;
