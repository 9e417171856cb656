use serde::{Deserialize, Serialize};

use super::SweepRecord;
use crate::partition::Partition;
use crate::scalar::Scalar;

/// A run of sweep records sharing one stable partition.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Plateau<T = f64> {
    pub time_start: T,
    pub time_end: T,
    pub community_count: usize,
    pub representative_partition: Partition,
    /// Mean `nmi_prev` inside the run (1 for a single point).
    pub mean_nmi: f64,
    pub points: usize,
    /// Index of the first record of the run.
    pub first_record: usize,
}

impl<T: Scalar> Plateau<T> {
    /// `ln(time_end / max(time_start, floor))`.
    pub fn log_span(&self, floor: T) -> f64 {
        let start = self.time_start.max(floor).as_f64();
        let end = self.time_end.as_f64();
        if start > 0.0 && end > 0.0 {
            (end / start).ln()
        } else {
            0.0
        }
    }
}

/// Maximal runs of records with a constant community count whose successive
/// NMI stays at or above `nmi_threshold`, at least `min_points` long,
/// longest log-time span first.
pub fn detect_plateaus<T: Scalar>(
    records: &[SweepRecord<T>],
    nmi_threshold: f64,
    min_points: usize,
) -> Vec<Plateau<T>> {
    let floor = records
        .iter()
        .map(|r| r.time)
        .find(|&t| t > T::zero())
        .unwrap_or_else(T::one);
    let mut plateaus = Vec::new();
    let mut start = 0;
    while start < records.len() {
        let mut end = start;
        while end + 1 < records.len()
            && records[end + 1].community_count == records[start].community_count
            && records[end + 1].nmi_prev.map_or(false, |x| x >= nmi_threshold)
        {
            end += 1;
        }
        let points = end - start + 1;
        if points >= min_points.max(1) {
            let inner: Vec<f64> = records[start + 1..=end].iter().filter_map(|r| r.nmi_prev).collect();
            let mean_nmi = if inner.is_empty() {
                1.0
            } else {
                inner.iter().sum::<f64>() / inner.len() as f64
            };
            plateaus.push(Plateau {
                time_start: records[start].time,
                time_end: records[end].time,
                community_count: records[start].community_count,
                representative_partition: records[start].partition.clone(),
                mean_nmi,
                points,
                first_record: start,
            });
        }
        start = end + 1;
    }
    plateaus.sort_by(|a, b| {
        b.log_span(floor)
            .total_cmp(&a.log_span(floor))
            .then(b.points.cmp(&a.points))
            .then(a.first_record.cmp(&b.first_record))
    });
    plateaus
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(time: f64, c: usize, nmi_prev: Option<f64>) -> SweepRecord {
        SweepRecord {
            time,
            community_count: c,
            stability: 0.0,
            nmi_prev,
            partition: Partition::from_assignment((0..c).collect()),
        }
    }

    #[test]
    fn finds_and_ranks_runs() {
        let rs = vec![
            rec(0.0, 4, None),
            rec(0.1, 3, Some(0.5)),
            rec(0.2, 3, Some(1.0)),
            rec(0.3, 3, Some(1.0)),
            rec(1.0, 2, Some(0.7)),
            rec(2.0, 2, Some(1.0)),
            rec(10.0, 2, Some(1.0)),
            rec(20.0, 2, Some(0.98)),
        ];
        let ps = detect_plateaus(&rs, 0.99, 3);
        assert_eq!(ps.len(), 2);
        assert_eq!(ps[0].community_count, 2);
        assert_eq!((ps[0].time_start, ps[0].time_end, ps[0].points), (1.0, 10.0, 3));
        assert_eq!(ps[1].community_count, 3);
        assert!(ps.iter().all(|p| p.mean_nmi >= 0.99));
    }

    #[test]
    fn distinct_counts_give_nothing() {
        let rs: Vec<_> = (0..5).map(|i| rec(i as f64, 5 - i, (i > 0).then_some(1.0))).collect();
        assert!(detect_plateaus(&rs, 0.99, 2).is_empty());
        assert_eq!(detect_plateaus(&rs, 0.99, 1).len(), 5);
    }

    #[test]
    fn low_nmi_breaks_a_run() {
        let rs = vec![rec(1.0, 2, None), rec(2.0, 2, Some(1.0)), rec(3.0, 2, Some(0.2)), rec(4.0, 2, Some(1.0))];
        let ps = detect_plateaus(&rs, 0.99, 2);
        assert_eq!(ps.len(), 2);
        assert_eq!((ps[0].time_start, ps[1].time_start), (1.0, 3.0));
    }
}
