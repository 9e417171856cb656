//! Markov stability of a partition and its incremental bookkeeping.
//!
//! Stability at time `t` is the modularity of the graph whose adjacency is
//! `A_t`: with `e_t` the `c x c` matrix of link fractions between
//! communities under `A_t` and `a` the community strength fractions,
//! `Q_t = sum_i (e_t[i][i] - a_i^2)`. The overall score is the minimum of
//! `Q_t` over a window of Markov times. Merging communities `i` and `j`
//! changes `Q_t` by `2 (e_t[i][j] - a_i a_j)`, which is what the greedy
//! optimisers exploit.

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::markov::{scaled_adjacencies, MarkovModel, MarkovTimeGrid, ScaledAdjacency};
use crate::partition::Partition;
use crate::scalar::Scalar;

/// `Q_t` for every time of a grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StabilityVector<T = f64> {
    pub times: Vec<T>,
    pub values: Vec<T>,
}

impl<T: Scalar> StabilityVector<T> {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Minimum over the whole vector.
    pub fn min(&self) -> T {
        self.values.iter().copied().fold(T::infinity(), T::min)
    }
}

/// Minimum of a stability vector over a time window.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StabilityScore<T = f64> {
    pub value: T,
}

/// Minimum of the entries of `v` whose time lies in `[lower, upper]`.
pub fn stability<T: Scalar>(v: &StabilityVector<T>, lower: T, upper: T) -> Result<StabilityScore<T>> {
    let value = v
        .times
        .iter()
        .zip(&v.values)
        .filter(|(&t, _)| t >= lower && t <= upper)
        .map(|(_, &q)| q)
        .fold(None, |acc: Option<T>, q| Some(acc.map_or(q, |a| a.min(q))));
    value
        .map(|value| StabilityScore { value })
        .ok_or_else(|| Error::domain(format!("window [{lower}, {upper}] contains no grid time")))
}

/// Clustered community matrices `e_t` for a grid of Markov times.
///
/// Communities live in fixed slots `0..capacity`; merging `j` into `i`
/// deactivates slot `j`. Only pairs `i <= j` are stored (`e_t` is
/// symmetric), and the per-time values of each pair are contiguous so that
/// delta vectors and merges stream through memory.
#[derive(Clone, Debug)]
pub struct CommunityMatrixSet<T = f64> {
    capacity: usize,
    times: Vec<T>,
    e: Vec<T>,
    a: Vec<T>,
    active: Vec<bool>,
    active_count: usize,
    neighbours: Vec<FixedBitSet>,
    members: Vec<Vec<usize>>,
    node_count: usize,
}

/// Builds `e_t` and `a` for `p` on every time of `grid`.
pub fn community_matrices<T: Scalar>(
    g: &Graph<T>,
    p: &Partition,
    grid: &MarkovTimeGrid<T>,
    model: MarkovModel,
) -> Result<CommunityMatrixSet<T>> {
    p.check_len(g.node_count())?;
    let scales = scaled_adjacencies(g, grid, model)?;
    CommunityMatrixSet::from_scales(g, p, &scales)
}

impl<T: Scalar> CommunityMatrixSet<T> {
    /// Builds the set from precomputed scaled adjacencies of `g`.
    pub fn from_scales(g: &Graph<T>, p: &Partition, scales: &[ScaledAdjacency<T>]) -> Result<Self> {
        let n = g.node_count();
        p.check_len(n)?;
        if scales.is_empty() {
            return Err(Error::domain("at least one Markov time is required"));
        }
        let two_m = T::two() * g.total_weight();
        if !(two_m > T::zero()) {
            return Err(Error::domain("graph has zero total weight"));
        }
        let c = p.community_count();
        let s = scales.len();
        let d = g.strengths();
        let dmax = d.iter().copied().fold(T::zero(), T::max);
        let tol = T::of(1e-9).max(T::epsilon().sqrt()) * dmax.max(T::one());
        for sa in scales {
            if sa.matrix.rows() != n {
                return Err(Error::domain("scaled adjacency does not match the graph size"));
            }
            for (u, (row_sum, &du)) in sa.matrix.row_sums().iter().zip(d).enumerate() {
                if (*row_sum - du).abs() > tol {
                    return Err(Error::domain(format!(
                        "row {u} of A_t at t = {} sums to {row_sum}, expected strength {du}",
                        sa.time
                    )));
                }
            }
        }

        let assign = p.assignment();
        let mut e = vec![T::zero(); c * (c + 1) / 2 * s];
        // Row u of every A_t, laid out time-contiguous per column.
        let mut buf = vec![T::zero(); n * s];
        let inv = T::one() / two_m;
        // Off-diagonal blocks receive both (u, v) and (v, u), averaged.
        let half = inv / T::two();
        for u in 0..n {
            for (k, sa) in scales.iter().enumerate() {
                for (v, &w) in sa.matrix.row(u).iter().enumerate() {
                    buf[v * s + k] = w;
                }
            }
            let cu = assign[u];
            for v in 0..n {
                let cv = assign[v];
                let src = &buf[v * s..(v + 1) * s];
                let at = tri(c, cu.min(cv), cu.max(cv)) * s;
                let f = if cu == cv { inv } else { half };
                for (x, &w) in e[at..at + s].iter_mut().zip(src) {
                    *x += w * f;
                }
            }
        }
        let mut a = vec![T::zero(); c];
        for (u, &du) in d.iter().enumerate() {
            a[assign[u]] += du / two_m;
        }
        let mut neighbours = vec![FixedBitSet::with_capacity(c); c];
        for (u, v, _) in g.edges() {
            let (cu, cv) = (assign[u], assign[v]);
            if cu != cv {
                neighbours[cu].insert(cv);
                neighbours[cv].insert(cu);
            }
        }
        Ok(CommunityMatrixSet {
            capacity: c,
            times: scales.iter().map(|sa| sa.time).collect(),
            e,
            a,
            active: vec![true; c],
            active_count: c,
            neighbours,
            members: p.groups(),
            node_count: n,
        })
    }

    pub fn times(&self) -> &[T] {
        &self.times
    }

    pub fn time_count(&self) -> usize {
        self.times.len()
    }

    /// Number of active communities.
    pub fn community_count(&self) -> usize {
        self.active_count
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn is_active(&self, i: usize) -> bool {
        i < self.capacity && self.active[i]
    }

    pub fn active(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.capacity).filter(move |&i| self.active[i])
    }

    /// Active communities joined to `i` by at least one edge of the graph.
    pub fn neighbours(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        self.neighbours[i].ones()
    }

    pub fn has_neighbours(&self, i: usize) -> bool {
        !self.neighbours[i].is_clear()
    }

    pub fn are_linked(&self, i: usize, j: usize) -> bool {
        self.neighbours[i].contains(j)
    }

    pub fn members(&self, i: usize) -> &[usize] {
        &self.members[i]
    }

    /// `a_i`: fraction of total strength in community `i`.
    pub fn strength_fraction(&self, i: usize) -> T {
        self.a[i]
    }

    /// `e_t[i][j]` across all times.
    pub fn link_fractions(&self, i: usize, j: usize) -> &[T] {
        let s = self.times.len();
        let at = tri(self.capacity, i.min(j), i.max(j)) * s;
        &self.e[at..at + s]
    }

    /// Current partition of the graph's nodes.
    pub fn partition(&self) -> Partition {
        let mut assignment = vec![0; self.node_count];
        for i in self.active() {
            for &u in &self.members[i] {
                assignment[u] = i;
            }
        }
        Partition::from_assignment(assignment)
    }

    pub fn stability_vector(&self) -> StabilityVector<T> {
        let s = self.times.len();
        let mut values = vec![T::zero(); s];
        for i in self.active() {
            let a2 = self.a[i] * self.a[i];
            for (q, &eii) in values.iter_mut().zip(self.link_fractions(i, i)) {
                *q += eii - a2;
            }
        }
        debug_assert_eq!(values.len(), s);
        StabilityVector {
            times: self.times.clone(),
            values,
        }
    }

    fn check_pair(&self, i: usize, j: usize) -> Result<()> {
        if i == j {
            return Err(Error::domain(format!("cannot merge community {i} with itself")));
        }
        for x in [i, j] {
            if !self.is_active(x) {
                return Err(Error::domain(format!("community {x} is not active")));
            }
        }
        Ok(())
    }

    /// Change of `Q_t` at every time if `i` and `j` were merged.
    pub fn delta(&self, i: usize, j: usize) -> Result<Vec<T>> {
        self.check_pair(i, j)?;
        let mut out = vec![T::zero(); self.times.len()];
        self.delta_into(i, j, &mut out);
        Ok(out)
    }

    pub(crate) fn delta_into(&self, i: usize, j: usize, out: &mut [T]) {
        let aa = self.a[i] * self.a[j];
        for (o, &eij) in out.iter_mut().zip(self.link_fractions(i, j)) {
            *o = T::two() * (eij - aa);
        }
    }

    /// `min_t (qv[t] + delta_t(i, j))`, or `None` as soon as the running
    /// minimum drops to `floor` or below.
    pub(crate) fn candidate(&self, i: usize, j: usize, qv: &[T], floor: T) -> Option<T> {
        let aa = self.a[i] * self.a[j];
        let mut best = T::infinity();
        for (&q, &eij) in qv.iter().zip(self.link_fractions(i, j)) {
            let v = q + T::two() * (eij - aa);
            if v < best {
                best = v;
                if best <= floor {
                    return None;
                }
            }
        }
        Some(best)
    }

    /// Merges community `j` into `i` in every `e_t`.
    pub fn merge(&mut self, i: usize, j: usize) -> Result<()> {
        self.check_pair(i, j)?;
        let s = self.times.len();
        let c = self.capacity;
        let (ii, ij, jj) = (tri(c, i, i) * s, tri(c, i.min(j), i.max(j)) * s, tri(c, j, j) * s);
        for t in 0..s {
            let v = self.e[jj + t] + T::two() * self.e[ij + t];
            self.e[ii + t] += v;
        }
        for k in 0..c {
            if k != i && k != j && self.active[k] {
                let src = tri(c, j.min(k), j.max(k)) * s;
                let dst = tri(c, i.min(k), i.max(k)) * s;
                add_block(&mut self.e, src, dst, s);
            }
        }
        let aj = self.a[j];
        self.a[i] += aj;
        self.a[j] = T::zero();
        self.active[j] = false;
        self.active_count -= 1;

        let moved = std::mem::take(&mut self.members[j]);
        self.members[i].extend(moved);
        let nj = std::mem::take(&mut self.neighbours[j]);
        for k in nj.ones() {
            self.neighbours[k].set(j, false);
            if k != i {
                self.neighbours[k].insert(i);
            }
        }
        self.neighbours[i].union_with(&nj);
        self.neighbours[i].set(j, false);
        self.neighbours[i].set(i, false);
        Ok(())
    }

    /// Checks total mass and row sums against `a` at every time.
    pub fn check_invariants(&self, tol: T) -> Result<()> {
        let active: Vec<usize> = self.active().collect();
        for k in 0..self.times.len() {
            let mut total = T::zero();
            for &i in &active {
                let mut row = T::zero();
                for &j in &active {
                    row += self.link_fractions(i, j)[k];
                }
                if (row - self.a[i]).abs() > tol {
                    return Err(Error::domain(format!(
                        "row {i} of e_t sums to {row}, expected a_i = {}",
                        self.a[i]
                    )));
                }
                total += row;
            }
            if (total - T::one()).abs() > tol {
                return Err(Error::domain(format!("e_t sums to {total}, expected 1")));
            }
        }
        Ok(())
    }
}

/// Per-time change of stability if communities `i` and `j` were merged.
pub fn delta_stability<T: Scalar>(cms: &CommunityMatrixSet<T>, i: usize, j: usize) -> Result<Vec<T>> {
    cms.delta(i, j)
}

/// Offset of pair `i <= j` in a packed upper triangle of side `c`.
fn tri(c: usize, i: usize, j: usize) -> usize {
    i * (2 * c - i + 1) / 2 + (j - i)
}

fn add_block<T: Scalar>(e: &mut [T], src: usize, dst: usize, len: usize) {
    let (from, to) = if src < dst {
        let (lo, hi) = e.split_at_mut(dst);
        (&lo[src..src + len], &mut hi[..len])
    } else {
        let (lo, hi) = e.split_at_mut(src);
        (&hi[..len], &mut lo[dst..dst + len])
    };
    for (x, &y) in to.iter_mut().zip(from) {
        *x += y;
    }
}

/// Merges community `j` into `i`.
pub fn merge_communities<T: Scalar>(cms: &mut CommunityMatrixSet<T>, i: usize, j: usize) -> Result<()> {
    cms.merge(i, j)
}

/// Stability vector of `p` on `grid` and its minimum over `[lower, upper]`.
pub fn evaluate_partition<T: Scalar>(
    g: &Graph<T>,
    p: &Partition,
    grid: &MarkovTimeGrid<T>,
    model: MarkovModel,
    lower: T,
    upper: T,
) -> Result<(StabilityVector<T>, StabilityScore<T>)> {
    let cms = community_matrices(g, p, grid, model)?;
    let v = cms.stability_vector();
    let score = stability(&v, lower, upper)?;
    Ok((v, score))
}

/// Stability vector of `p` against precomputed scales.
pub fn evaluate_with_scales<T: Scalar>(
    g: &Graph<T>,
    p: &Partition,
    scales: &[ScaledAdjacency<T>],
) -> Result<StabilityVector<T>> {
    Ok(CommunityMatrixSet::from_scales(g, p, scales)?.stability_vector())
}

/// Newman-Girvan modularity of `p` on the raw adjacency of `g`.
pub fn modularity<T: Scalar>(g: &Graph<T>, p: &Partition) -> Result<T> {
    p.check_len(g.node_count())?;
    let two_m = T::two() * g.total_weight();
    if !(two_m > T::zero()) {
        return Err(Error::domain("graph has zero total weight"));
    }
    let c = p.community_count();
    let mut inside = vec![T::zero(); c];
    let mut strength = vec![T::zero(); c];
    let n = g.node_count();
    for u in 0..n {
        let cu = p.community_of(u);
        strength[cu] += g.strengths()[u];
        for v in 0..n {
            if p.community_of(v) == cu {
                inside[cu] += g.weight(u, v);
            }
        }
    }
    Ok(inside
        .iter()
        .zip(&strength)
        .map(|(&e, &a)| e / two_m - (a / two_m) * (a / two_m))
        .sum())
}
