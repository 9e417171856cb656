use std::cmp::Ordering;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{check_input, MergeStep, OptimizationResult, OptimizerConfig};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::markov::{scaled_adjacencies, MarkovModel, MarkovTimeGrid, ScaledAdjacency};
use crate::partition::Partition;
use crate::scalar::Scalar;
use crate::stability::{CommunityMatrixSet, StabilityScore, StabilityVector};

/// Pair-selection rule of a greedy agglomeration.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    /// Best pair over every connected pair.
    Full,
    /// Best pair touching one or two randomly drawn communities.
    Randomised { seed: u64 },
    /// Up to `k` disjoint pairs per pass, taken from the pairs that set a
    /// new running best during the scan.
    MultiStep { k: usize },
}

/// Greedy stability optimisation over the whole grid of `cfg`.
pub fn gso<T: Scalar>(g: &Graph<T>, cfg: &OptimizerConfig<T>) -> Result<OptimizationResult<T>> {
    run(g, &cfg.grid, cfg.model, Strategy::Full)
}

/// Greedy optimisation of the stability at the single time `t`.
pub fn gso_single_time<T: Scalar>(g: &Graph<T>, t: T, model: MarkovModel) -> Result<OptimizationResult<T>> {
    run(g, &MarkovTimeGrid::single(t)?, model, Strategy::Full)
}

/// Randomised greedy optimisation: each pass only considers pairs touching
/// one or two randomly drawn communities.
pub fn rgso<T: Scalar>(g: &Graph<T>, cfg: &OptimizerConfig<T>) -> Result<OptimizationResult<T>> {
    run(g, &cfg.grid, cfg.model, Strategy::Randomised { seed: cfg.seed })
}

/// Multi-step greedy optimisation: up to `cfg.msgso_k` disjoint pairs are
/// merged per pass, best first.
pub fn msgso<T: Scalar>(g: &Graph<T>, cfg: &OptimizerConfig<T>) -> Result<OptimizationResult<T>> {
    run(g, &cfg.grid, cfg.model, Strategy::MultiStep { k: cfg.msgso_k })
}

fn run<T: Scalar>(
    g: &Graph<T>,
    grid: &MarkovTimeGrid<T>,
    model: MarkovModel,
    strategy: Strategy,
) -> Result<OptimizationResult<T>> {
    check_input(g)?;
    let scales = scaled_adjacencies(g, grid, model)?;
    greedy_with_scales(g, &scales, strategy)
}

/// Orders candidates by score, then by smallest pair.
fn better<T: Scalar>(a: (T, (usize, usize)), b: Option<(T, (usize, usize))>) -> bool {
    match b {
        None => true,
        Some(b) => a.0 > b.0 || (a.0 == b.0 && a.1 < b.1),
    }
}

struct Tracker<T> {
    qv: Vec<T>,
    best: T,
    best_vector: Vec<T>,
    /// Merges applied when `best` was reached.
    best_step: usize,
    nodes: usize,
    history: Vec<MergeStep<T>>,
    times: Vec<T>,
}

impl<T: Scalar> Tracker<T> {
    fn new(cms: &CommunityMatrixSet<T>) -> Self {
        let v = cms.stability_vector();
        let best = v.min();
        Tracker {
            best,
            best_vector: v.values.clone(),
            qv: v.values,
            best_step: 0,
            nodes: cms.capacity(),
            history: Vec::new(),
            times: v.times,
        }
    }

    fn current(&self) -> T {
        self.qv.iter().copied().fold(T::infinity(), T::min)
    }

    fn merge(&mut self, cms: &mut CommunityMatrixSet<T>, i: usize, j: usize, buf: &mut [T]) {
        cms.delta_into(i, j, buf);
        for (q, d) in self.qv.iter_mut().zip(buf.iter()) {
            *q += *d;
        }
        cms.merge(i, j).expect("merging two active communities");
        let score = self.qv.iter().copied().fold(T::infinity(), T::min);
        self.history.push(MergeStep { pair: (i, j), score });
        if score > self.best {
            self.best = score;
            self.best_vector.clone_from(&self.qv);
            self.best_step = self.history.len();
        }
    }

    /// Replays the merges up to the best step, starting from singletons.
    fn best_partition(&self) -> Partition {
        let mut owner: Vec<usize> = (0..self.nodes).collect();
        let mut members: Vec<Vec<usize>> = (0..self.nodes).map(|u| vec![u]).collect();
        for step in &self.history[..self.best_step] {
            let (i, j) = step.pair;
            let moved = std::mem::take(&mut members[j]);
            for &u in &moved {
                owner[u] = i;
            }
            members[i].extend(moved);
        }
        Partition::from_assignment(owner)
    }

    fn finish(self, passes: usize) -> OptimizationResult<T> {
        let best_partition = self.best_partition();
        OptimizationResult {
            communities_at_best: best_partition.community_count(),
            best_partition,
            best_score: StabilityScore { value: self.best },
            best_vector: StabilityVector {
                times: self.times,
                values: self.best_vector,
            },
            merge_history: self.history,
            passes,
        }
    }
}

/// Greedy agglomeration from singletons to one community, scored on
/// precomputed scaled adjacencies of `g` (one per Markov time of the window).
///
/// Lets many runs share a single `scaled_adjacencies` call.
pub fn greedy_with_scales<T: Scalar>(
    g: &Graph<T>,
    scales: &[ScaledAdjacency<T>],
    strategy: Strategy,
) -> Result<OptimizationResult<T>> {
    check_input(g)?;
    if let Strategy::MultiStep { k: 0 } = strategy {
        return Err(Error::domain("msgso needs k >= 1"));
    }
    let n = g.node_count();
    let mut cms = CommunityMatrixSet::from_scales(g, &Partition::singletons(n), scales)?;
    let mut tracker = Tracker::new(&cms);
    let mut buf = vec![T::zero(); scales.len()];
    let mut rng = match strategy {
        Strategy::Randomised { seed } => Some(ChaCha8Rng::seed_from_u64(seed)),
        _ => None,
    };
    let mut pairs = Vec::new();
    let mut pool = Pool::new(cms.active().filter(|&i| cms.has_neighbours(i)), cms.capacity());
    let mut passes = 0;
    loop {
        match strategy {
            Strategy::Full => {
                let Some((i, j)) = best_pair(&cms, &tracker.qv, cms.active()) else { break };
                tracker.merge(&mut cms, i, j, &mut buf);
            }
            Strategy::Randomised { .. } => {
                let rng = rng.as_mut().unwrap();
                if pool.is_empty() {
                    break;
                }
                let k = if 2 * cms.community_count() < n { 2 } else { 1 };
                let drawn: Vec<usize> = pool.items.choose_multiple(rng, k).copied().collect();
                let Some((i, j)) = best_pair_touching(&cms, &tracker.qv, &drawn, &mut pairs) else { break };
                tracker.merge(&mut cms, i, j, &mut buf);
                pool.remove(j);
                if !cms.has_neighbours(i) {
                    pool.remove(i);
                }
            }
            Strategy::MultiStep { k } => {
                // A pair is listed when it beats every pair scanned before it
                // and the current stability; without any, the single best pair
                // keeps the agglomeration going.
                let mut record = tracker.current();
                let mut pairs = Vec::new();
                let mut fallback: Option<(T, (usize, usize))> = None;
                for i in cms.active() {
                    for j in cms.neighbours(i).skip_while(|&j| j <= i) {
                        let floor = if pairs.is_empty() { T::neg_infinity() } else { record };
                        let Some(q) = cms.candidate(i, j, &tracker.qv, floor) else { continue };
                        if q > record {
                            pairs.push((q, (i, j)));
                            record = q;
                        } else if better((q, (i, j)), fallback) {
                            fallback = Some((q, (i, j)));
                        }
                    }
                }
                if pairs.is_empty() {
                    match fallback {
                        Some(f) => pairs.push(f),
                        None => break,
                    }
                }
                pairs.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap_or(Ordering::Equal).then(a.1.cmp(&b.1)));
                let mut used = vec![false; cms.capacity()];
                let mut merged = 0;
                for (_, (i, j)) in pairs {
                    if merged == k {
                        break;
                    }
                    if used[i] || used[j] {
                        continue;
                    }
                    used[i] = true;
                    used[j] = true;
                    tracker.merge(&mut cms, i, j, &mut buf);
                    merged += 1;
                }
            }
        }
        passes += 1;
    }
    Ok(tracker.finish(passes))
}

/// Communities that still have a neighbour, with O(1) removal.
struct Pool {
    items: Vec<usize>,
    at: Vec<usize>,
}

impl Pool {
    fn new(items: impl Iterator<Item = usize>, capacity: usize) -> Self {
        let items: Vec<usize> = items.collect();
        let mut at = vec![usize::MAX; capacity];
        for (p, &i) in items.iter().enumerate() {
            at[i] = p;
        }
        Pool { items, at }
    }

    fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    fn remove(&mut self, i: usize) {
        let p = std::mem::replace(&mut self.at[i], usize::MAX);
        if p == usize::MAX {
            return;
        }
        self.items.swap_remove(p);
        if let Some(&moved) = self.items.get(p) {
            self.at[moved] = p;
        }
    }
}

/// Best connected pair `(i, j)`, `i < j`, among rows `rows`.
fn best_pair<T: Scalar>(
    cms: &CommunityMatrixSet<T>,
    qv: &[T],
    rows: impl Iterator<Item = usize>,
) -> Option<(usize, usize)> {
    let mut best: Option<(T, (usize, usize))> = None;
    for i in rows {
        for j in cms.neighbours(i).skip_while(|&j| j <= i) {
            let floor = best.map_or(T::neg_infinity(), |b| b.0);
            // Scanning in (i, j) order means an equal score never displaces.
            if let Some(q) = cms.candidate(i, j, qv, floor) {
                if better((q, (i, j)), best) {
                    best = Some((q, (i, j)));
                }
            }
        }
    }
    best.map(|b| b.1)
}

/// Best connected pair incident to any of `drawn`.
fn best_pair_touching<T: Scalar>(
    cms: &CommunityMatrixSet<T>,
    qv: &[T],
    drawn: &[usize],
    pairs: &mut Vec<(usize, usize)>,
) -> Option<(usize, usize)> {
    pairs.clear();
    for &x in drawn {
        pairs.extend(cms.neighbours(x).map(|y| (x.min(y), x.max(y))));
    }
    pairs.sort_unstable();
    pairs.dedup();
    let mut best: Option<(T, (usize, usize))> = None;
    for &(i, j) in pairs.iter() {
        let floor = best.map_or(T::neg_infinity(), |b| b.0);
        if let Some(q) = cms.candidate(i, j, qv, floor) {
            best = Some((q, (i, j)));
        }
    }
    best.map(|b| b.1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures::*;
    use crate::stability::evaluate_partition;

    fn cfg(ts: &[f64]) -> OptimizerConfig {
        OptimizerConfig::new(MarkovTimeGrid::new(ts.to_vec()).unwrap())
    }

    #[test]
    fn triangle_is_one_community() {
        let r = gso(&triangle(), &cfg(&[1.0, 2.0])).unwrap();
        assert_eq!(r.best_partition.community_count(), 1);
        assert!(r.best_score.value.abs() < 1e-12);
        assert_eq!(r.merge_history.len(), 2);
    }

    #[test]
    fn path_at_one() {
        let r = gso(&path3(), &cfg(&[1.0])).unwrap();
        assert_eq!(r.best_partition.community_count(), 1);
        assert!(r.best_score.value.abs() < 1e-12);
        assert_eq!(r.merge_history[0].pair, (0, 1));
        assert!((r.merge_history[0].score + 0.125).abs() < 1e-12);
    }

    #[test]
    fn barbell_splits_in_two() {
        let g = barbell();
        for r in [
            gso(&g, &cfg(&[1.0])).unwrap(),
            gso_single_time(&g, 1.0, MarkovModel::Discrete).unwrap(),
            rgso(&g, &cfg(&[1.0]).with_seed(3)).unwrap(),
            msgso(&g, &cfg(&[1.0]).with_msgso_k(2)).unwrap(),
        ] {
            assert_eq!(r.best_partition.assignment(), &[0, 0, 0, 1, 1, 1]);
            let grid = MarkovTimeGrid::single(1.0).unwrap();
            let (_, s) = evaluate_partition(&g, &r.best_partition, &grid, MarkovModel::Discrete, 1.0, 1.0).unwrap();
            assert!((s.value - r.best_score.value).abs() < 1e-12);
        }
    }

    #[test]
    fn msgso_k1_matches_gso() {
        let g = barbell();
        let c = cfg(&[0.5, 1.0, 3.0]);
        let a = gso(&g, &c).unwrap();
        let b = msgso(&g, &c).unwrap();
        assert_eq!(a.merge_history, b.merge_history);
        assert_eq!(b.passes, 5);
    }

    #[test]
    fn msgso_merges_several_per_pass() {
        // Scanning finds (0, 1) then the stronger (2, 3): both go in one pass.
        let g = Graph::from_index_edges(4, &[(0, 1, 1.0), (1, 2, 0.1), (2, 3, 5.0)]).unwrap();
        let r = msgso(&g, &cfg(&[1.0]).with_msgso_k(3)).unwrap();
        let pairs: Vec<_> = r.merge_history.iter().map(|m| m.pair).collect();
        assert_eq!(pairs, vec![(2, 3), (0, 1), (0, 2)]);
        assert_eq!(r.passes, 2);
        assert_eq!(r.best_partition.assignment(), &[0, 0, 1, 1]);
    }

    #[test]
    fn rgso_is_reproducible() {
        let g = barbell();
        let a = rgso(&g, &cfg(&[1.0, 2.0]).with_seed(11)).unwrap();
        let b = rgso(&g, &cfg(&[1.0, 2.0]).with_seed(11)).unwrap();
        assert_eq!(a.merge_history, b.merge_history);
    }

    #[test]
    fn disconnected_graph_stops_at_components() {
        let g = Graph::from_index_edges(4, &[(0, 1, 1.0), (2, 3, 1.0)]).unwrap();
        let r = gso(&g, &cfg(&[1.0])).unwrap();
        assert_eq!(r.merge_history.len(), 2);
        assert_eq!(r.best_partition.community_count(), 2);
    }

    #[test]
    fn edgeless_rejected() {
        let g = Graph::from_index_edges(2, &[(0, 0, 1.0)]).unwrap();
        assert!(gso(&g, &cfg(&[1.0])).is_err());
        assert!(msgso(&barbell(), &cfg(&[1.0]).with_msgso_k(0)).is_err());
    }

    #[test]
    fn works_in_single_precision() {
        let g: Graph<f32> = barbell().cast();
        let c = OptimizerConfig::new(MarkovTimeGrid::new(vec![1.0f32]).unwrap());
        let r = gso(&g, &c).unwrap();
        assert_eq!(r.best_partition.community_count(), 2);
    }
}
