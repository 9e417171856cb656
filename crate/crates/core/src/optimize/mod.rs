//! Stability optimisers: greedy agglomeration (full, single-time, randomised,
//! multi-step), the Louvain hybrid and vertex-mover refinement.

mod greedy;
mod louvain;
pub(crate) mod refine;

pub use greedy::{greedy_with_scales, gso, gso_single_time, msgso, rgso, Strategy};
pub use louvain::{louvain, lso};
pub use refine::refine_vertex_mover;

pub(crate) use louvain::lso_with_scale;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::markov::{MarkovModel, MarkovTimeGrid};
use crate::partition::Partition;
use crate::scalar::Scalar;
use crate::stability::{StabilityScore, StabilityVector};

/// How equal candidate scores are resolved.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TieBreak {
    /// Lexicographically smallest `(i, j)` community pair wins.
    #[default]
    SmallestPair,
}

#[derive(Clone, Debug)]
pub struct OptimizerConfig<T = f64> {
    pub model: MarkovModel,
    pub grid: MarkovTimeGrid<T>,
    /// Seeds the randomised optimiser and Louvain's node order.
    pub seed: u64,
    /// Pairs merged per pass by `msgso`.
    pub msgso_k: usize,
    pub tie_break: TieBreak,
    /// Full sweeps allowed to `refine_vertex_mover`.
    pub refine_passes: usize,
}

impl<T: Scalar> OptimizerConfig<T> {
    pub fn new(grid: MarkovTimeGrid<T>) -> Self {
        OptimizerConfig {
            model: MarkovModel::Discrete,
            grid,
            seed: 0,
            msgso_k: 1,
            tie_break: TieBreak::SmallestPair,
            refine_passes: 10,
        }
    }

    pub fn with_model(mut self, model: MarkovModel) -> Self {
        self.model = model;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_msgso_k(mut self, k: usize) -> Self {
        self.msgso_k = k;
        self
    }
}

/// One agglomeration step: slot `pair.1` merged into slot `pair.0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MergeStep<T = f64> {
    pub pair: (usize, usize),
    pub score: T,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OptimizationResult<T = f64> {
    pub best_partition: Partition,
    pub best_score: StabilityScore<T>,
    pub best_vector: StabilityVector<T>,
    pub merge_history: Vec<MergeStep<T>>,
    pub communities_at_best: usize,
    /// Scans of the pair list (equals the number of merges except for `msgso`).
    pub passes: usize,
}

fn check_input<T: Scalar>(g: &Graph<T>) -> Result<()> {
    if g.edge_count() == 0 {
        return Err(Error::domain("graph has no edges between distinct nodes"));
    }
    if !g.is_connected() {
        log::warn!("graph is not connected; communities never span components");
    }
    Ok(())
}
