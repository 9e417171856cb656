use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::nmi;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::markov::{scaled_adjacencies, MarkovModel, MarkovTimeGrid};
use crate::optimize::{greedy_with_scales, lso_with_scale, refine::refine_with_scales, Strategy};
use crate::partition::Partition;
use crate::scalar::Scalar;
use crate::stability::CommunityMatrixSet;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Optimiser {
    Gso,
    GsoSingle,
    Rgso,
    Msgso,
    Lso,
}

impl Optimiser {
    pub const ALL: [Optimiser; 5] = [
        Optimiser::Gso,
        Optimiser::GsoSingle,
        Optimiser::Rgso,
        Optimiser::Msgso,
        Optimiser::Lso,
    ];

    /// Whether the optimiser scores a single Markov time rather than a window.
    pub fn is_single_time(self) -> bool {
        matches!(self, Optimiser::GsoSingle | Optimiser::Lso)
    }

    pub fn name(self) -> &'static str {
        match self {
            Optimiser::Gso => "gso",
            Optimiser::GsoSingle => "gso-single",
            Optimiser::Rgso => "rgso",
            Optimiser::Msgso => "msgso",
            Optimiser::Lso => "lso",
        }
    }
}

impl fmt::Display for Optimiser {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Optimiser {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Optimiser::ALL
            .into_iter()
            .find(|o| o.name() == s)
            .ok_or_else(|| Error::domain(format!("unknown optimiser `{s}`")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub optimiser: Optimiser,
    pub model: MarkovModel,
    pub seed: u64,
    pub msgso_k: usize,
    /// Apply vertex-mover refinement to every point's partition.
    pub refine: bool,
    pub refine_passes: usize,
}

impl SweepConfig {
    pub fn new(optimiser: Optimiser) -> Self {
        SweepConfig {
            optimiser,
            model: MarkovModel::Discrete,
            seed: 0,
            msgso_k: 1,
            refine: false,
            refine_passes: 10,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord<T = f64> {
    pub time: T,
    pub community_count: usize,
    pub stability: T,
    /// NMI against the previous record's partition; absent for the first.
    pub nmi_prev: Option<f64>,
    pub partition: Partition,
}

/// Runs the configured optimiser at every time of `eval_times`.
///
/// Single-time optimisers work at `t`; windowed ones on the grid prefix
/// `[eval_times.first(), t]`. Points run in parallel on the current rayon
/// pool; records come back in ascending time.
pub fn sweep<T: Scalar>(
    g: &Graph<T>,
    eval_times: &MarkovTimeGrid<T>,
    cfg: &SweepConfig,
) -> Result<Vec<SweepRecord<T>>> {
    if cfg.optimiser == Optimiser::Msgso && cfg.msgso_k == 0 {
        return Err(Error::domain("msgso needs k >= 1"));
    }
    if g.edge_count() == 0 {
        return Err(Error::domain("graph has no edges between distinct nodes"));
    }
    let scales = scaled_adjacencies(g, eval_times, cfg.model)?;
    let points: Vec<(Partition, T)> = (0..scales.len())
        .into_par_iter()
        .map(|i| {
            let window = if cfg.optimiser.is_single_time() {
                &scales[i..=i]
            } else {
                &scales[..=i]
            };
            let run = || -> Result<(Partition, T)> {
                let result = match cfg.optimiser {
                    Optimiser::Gso | Optimiser::GsoSingle => greedy_with_scales(g, window, Strategy::Full)?,
                    Optimiser::Rgso => greedy_with_scales(g, window, Strategy::Randomised { seed: cfg.seed })?,
                    Optimiser::Msgso => greedy_with_scales(g, window, Strategy::MultiStep { k: cfg.msgso_k })?,
                    Optimiser::Lso => lso_with_scale(g, &window[0], cfg.seed)?,
                };
                if cfg.refine {
                    let p = refine_with_scales(g, &result.best_partition, window, cfg.refine_passes)?;
                    let q = CommunityMatrixSet::from_scales(g, &p, window)?.stability_vector().min();
                    Ok((p, q))
                } else {
                    Ok((result.best_partition, result.best_score.value))
                }
            };
            run().map_err(|e| Error::domain(format!("sweep failed at t = {}: {e}", scales[i].time)))
        })
        .collect::<Result<_>>()?;

    let mut records: Vec<SweepRecord<T>> = Vec::with_capacity(points.len());
    for ((partition, stability), &time) in points.into_iter().zip(eval_times.times()) {
        let nmi_prev = match records.last() {
            Some(prev) => Some(nmi(&prev.partition, &partition)?),
            None => None,
        };
        records.push(SweepRecord {
            time,
            community_count: partition.community_count(),
            stability,
            nmi_prev,
            partition,
        });
    }
    Ok(records)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures::barbell;

    #[test]
    fn single_point_has_no_nmi() {
        let grid = MarkovTimeGrid::single(1.0).unwrap();
        let r = sweep(&barbell(), &grid, &SweepConfig::new(Optimiser::Gso)).unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!(r[0].nmi_prev, None);
        assert_eq!(r[0].community_count, 2);
    }

    #[test]
    fn every_optimiser_runs_and_is_reproducible() {
        let grid = MarkovTimeGrid::new(vec![0.0, 0.5, 1.0, 2.0]).unwrap();
        for o in Optimiser::ALL {
            let mut cfg = SweepConfig::new(o);
            cfg.msgso_k = 2;
            let a = sweep(&barbell(), &grid, &cfg).unwrap();
            let b = sweep(&barbell(), &grid, &cfg).unwrap();
            assert_eq!(a, b);
            assert_eq!(a.len(), 4);
            assert!(a[1..].iter().all(|r| r.nmi_prev.is_some()));
        }
    }

    #[test]
    fn names_round_trip() {
        for o in Optimiser::ALL {
            assert_eq!(o.name().parse::<Optimiser>().unwrap(), o);
        }
        assert!("xyz".parse::<Optimiser>().is_err());
    }
}
