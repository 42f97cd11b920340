use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// BSADF statistics for end points `first_index..T`, optionally paired with
/// a critical-value sequence and the observation dates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BsadfTrace {
    /// Sample index of the first statistic (the minimum window `r0`).
    pub first_index: usize,
    pub statistics: Vec<f64>,
    pub critical_values: Option<Vec<f64>>,
    /// Confidence level of the critical values, in percent.
    pub level: Option<f64>,
    pub dates: Option<Vec<NaiveDate>>,
}

impl BsadfTrace {
    pub fn new(first_index: usize, statistics: Vec<f64>) -> Self {
        BsadfTrace {
            first_index,
            statistics,
            critical_values: None,
            level: None,
            dates: None,
        }
    }

    pub fn len(&self) -> usize {
        self.statistics.len()
    }

    pub fn is_empty(&self) -> bool {
        self.statistics.is_empty()
    }

    /// Attaches a critical value per end point.
    pub fn with_critical_values(mut self, cv: Vec<f64>, level: f64) -> Result<Self> {
        if cv.len() != self.statistics.len() {
            return Err(Error::invalid(format!(
                "{} critical values for {} statistics",
                cv.len(),
                self.statistics.len()
            )));
        }
        self.critical_values = Some(cv);
        self.level = Some(level);
        Ok(self)
    }

    /// Attaches dates given the full-sample timestamps.
    pub fn with_dates(mut self, sample_dates: &[NaiveDate]) -> Result<Self> {
        if sample_dates.len() != self.first_index + self.statistics.len() {
            return Err(Error::invalid(format!(
                "{} dates for a trace covering {} observations",
                sample_dates.len(),
                self.first_index + self.statistics.len()
            )));
        }
        self.dates = Some(sample_dates[self.first_index..].to_vec());
        Ok(self)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Episode {
    /// Sample index of the first exceedance.
    pub start: usize,
    /// Sample index of the last exceedance.
    pub end: usize,
    pub start_date: Option<NaiveDate>,
    pub end_date: Option<NaiveDate>,
    /// The run reaches the last observation.
    pub ongoing: bool,
    pub duration: usize,
    pub peak: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeSet {
    pub min_duration: usize,
    pub level: Option<f64>,
    pub episodes: Vec<Episode>,
}

impl EpisodeSet {
    pub fn is_empty(&self) -> bool {
        self.episodes.is_empty()
    }

    pub fn len(&self) -> usize {
        self.episodes.len()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Episode> {
        self.episodes.iter()
    }
}

/// Maximal runs where the statistic exceeds its critical value for at least
/// `min_duration` consecutive observations.
pub fn date_stamp(trace: &BsadfTrace, min_duration: usize) -> Result<EpisodeSet> {
    let cv = trace
        .critical_values
        .as_ref()
        .ok_or_else(|| Error::invalid("trace has no critical values"))?;
    if min_duration == 0 {
        return Err(Error::invalid("minimum duration must be positive"));
    }
    let n = trace.statistics.len();
    let mut episodes = Vec::new();
    let mut j = 0;
    while j < n {
        if !(trace.statistics[j] > cv[j]) {
            j += 1;
            continue;
        }
        let start = j;
        while j < n && trace.statistics[j] > cv[j] {
            j += 1;
        }
        let len = j - start;
        if len >= min_duration {
            let peak = trace.statistics[start..j]
                .iter()
                .copied()
                .fold(f64::NEG_INFINITY, f64::max);
            let date = |i: usize| trace.dates.as_ref().map(|d| d[i]);
            episodes.push(Episode {
                start: trace.first_index + start,
                end: trace.first_index + j - 1,
                start_date: date(start),
                end_date: date(j - 1),
                ongoing: j == n,
                duration: len,
                peak,
            });
        }
    }
    Ok(EpisodeSet {
        min_duration,
        level: trace.level,
        episodes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trace(stats: Vec<f64>) -> BsadfTrace {
        let n = stats.len();
        BsadfTrace::new(0, stats).with_critical_values(vec![1.0; n], 95.0).unwrap()
    }

    /// Independent scan: mark exceedances, then read off run boundaries.
    fn scan_oracle(stats: &[f64], cv: f64, min: usize) -> Vec<(usize, usize)> {
        let mut flags: Vec<bool> = stats.iter().map(|s| *s > cv).collect();
        flags.push(false);
        let mut out = vec![];
        let mut run_start = None;
        for (i, f) in flags.iter().enumerate() {
            match (run_start, f) {
                (None, true) => run_start = Some(i),
                (Some(s), false) => {
                    if i - s >= min {
                        out.push((s, i - 1));
                    }
                    run_start = None;
                }
                _ => {}
            }
        }
        out
    }

    #[test]
    fn below_everywhere_is_empty() {
        let t = trace(vec![0.5; 50]);
        assert!(date_stamp(&t, 3).unwrap().is_empty());
    }

    #[test]
    fn short_run_is_dropped() {
        let mut s = vec![0.0; 50];
        for v in &mut s[10..16] {
            *v = 2.0;
        }
        assert!(date_stamp(&trace(s), 7).unwrap().is_empty());
    }

    #[test]
    fn run_matches_scan_oracle() {
        let mut s: Vec<f64> = (0..200).map(|i| ((i as f64) * 0.37).sin() * 0.9).collect();
        for v in &mut s[100..=110] {
            *v = 1.5;
        }
        s[105] = 3.0;
        let set = date_stamp(&trace(s.clone()), 7).unwrap();
        let oracle = scan_oracle(&s, 1.0, 7);
        assert_eq!(oracle, vec![(100, 110)]);
        assert_eq!(set.len(), 1);
        let e = &set.episodes[0];
        assert_eq!((e.start, e.end, e.duration), (100, 110, 11));
        assert_eq!(e.peak, 3.0);
        assert!(!e.ongoing);
    }

    #[test]
    fn run_to_the_end_is_ongoing() {
        let mut s = vec![0.0; 30];
        for v in &mut s[20..] {
            *v = 4.0;
        }
        let t = BsadfTrace::new(40, s).with_critical_values(vec![1.0; 30], 95.0).unwrap();
        let dates: Vec<NaiveDate> = (0..70)
            .map(|i| NaiveDate::from_ymd_opt(2018, 1, 5).unwrap() + chrono::Duration::weeks(i))
            .collect();
        let t = t.with_dates(&dates).unwrap();
        let set = date_stamp(&t, 5).unwrap();
        let e = &set.episodes[0];
        assert!(e.ongoing);
        assert_eq!((e.start, e.end), (60, 69));
        assert_eq!(e.start_date, Some(dates[60]));
        assert_eq!(e.end_date, Some(dates[69]));
    }

    #[test]
    fn misaligned_inputs() {
        assert!(BsadfTrace::new(0, vec![0.0; 5]).with_critical_values(vec![1.0; 4], 95.0).is_err());
        assert!(date_stamp(&BsadfTrace::new(0, vec![0.0; 5]), 2).is_err());
    }
}
