//! Time-series data model, CSV ingestion and elementary transforms.
//!
//! Everything downstream consumes either a [`TimeSeries`] (one dated vector)
//! or a [`Panel`] (several columns on a shared date vector).

use std::collections::BTreeSet;
use std::path::Path;

use chrono::{Datelike, NaiveDate};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Sampling frequency of a series.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Frequency {
    Daily,
    Weekly,
    Monthly,
    Irregular,
}

impl Frequency {
    /// Classifies a date vector by its median spacing in days.
    pub fn infer(timestamps: &[NaiveDate]) -> Frequency {
        if timestamps.len() < 2 {
            return Frequency::Irregular;
        }
        let mut gaps: Vec<i64> = timestamps
            .windows(2)
            .map(|w| (w[1] - w[0]).num_days())
            .collect();
        gaps.sort_unstable();
        match gaps[gaps.len() / 2] {
            1..=3 => Frequency::Daily,
            6..=8 => Frequency::Weekly,
            28..=31 => Frequency::Monthly,
            _ => Frequency::Irregular,
        }
    }
}

/// A dated vector of finite observations with strictly increasing dates.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    name: String,
    units: Option<String>,
    frequency: Frequency,
    timestamps: Vec<NaiveDate>,
    values: Vec<f64>,
}

impl TimeSeries {
    /// Builds a series, inferring the frequency from the dates.
    pub fn new(
        name: impl Into<String>,
        timestamps: Vec<NaiveDate>,
        values: Vec<f64>,
    ) -> Result<Self> {
        let frequency = Frequency::infer(&timestamps);
        Self::with_frequency(name, timestamps, values, frequency)
    }

    pub fn with_frequency(
        name: impl Into<String>,
        timestamps: Vec<NaiveDate>,
        values: Vec<f64>,
        frequency: Frequency,
    ) -> Result<Self> {
        if timestamps.is_empty() {
            return Err(Error::InsufficientData { needed: 1, got: 0 });
        }
        if timestamps.len() != values.len() {
            return Err(Error::invalid(format!(
                "{} timestamps but {} values",
                timestamps.len(),
                values.len()
            )));
        }
        if let Some(i) = timestamps.windows(2).position(|w| w[1] <= w[0]) {
            return Err(Error::invalid(format!(
                "timestamps not strictly increasing at index {}",
                i + 1
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Domain {
                index: i,
                message: "non-finite value".into(),
            });
        }
        Ok(TimeSeries {
            name: name.into(),
            units: None,
            frequency,
            timestamps,
            values,
        })
    }

    /// Series on consecutive weekly dates starting at `start`. Handy for
    /// simulated data.
    pub fn weekly_from(name: impl Into<String>, start: NaiveDate, values: Vec<f64>) -> Result<Self> {
        let timestamps = (0..values.len())
            .map(|i| start + chrono::Duration::weeks(i as i64))
            .collect();
        Self::with_frequency(name, timestamps, values, Frequency::Weekly)
    }

    pub fn with_units(mut self, units: impl Into<String>) -> Self {
        self.units = Some(units.into());
        self
    }

    pub fn renamed(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn units(&self) -> Option<&str> {
        self.units.as_deref()
    }

    pub fn frequency(&self) -> Frequency {
        self.frequency
    }

    pub fn timestamps(&self) -> &[NaiveDate] {
        &self.timestamps
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Observations with `from <= date <= to`.
    pub fn slice_dates(&self, from: NaiveDate, to: NaiveDate) -> Result<TimeSeries> {
        let idx: Vec<usize> = (0..self.len())
            .filter(|&i| self.timestamps[i] >= from && self.timestamps[i] <= to)
            .collect();
        if idx.is_empty() {
            return Err(Error::InsufficientData { needed: 1, got: 0 });
        }
        let mut out = TimeSeries::with_frequency(
            self.name.clone(),
            idx.iter().map(|&i| self.timestamps[i]).collect(),
            idx.iter().map(|&i| self.values[i]).collect(),
            self.frequency,
        )?;
        out.units = self.units.clone();
        Ok(out)
    }
}

/// Log returns of a price series; one observation shorter than its source.
#[derive(Debug, Clone, PartialEq)]
pub struct ReturnSeries(TimeSeries);

impl ReturnSeries {
    pub fn series(&self) -> &TimeSeries {
        &self.0
    }

    pub fn into_series(self) -> TimeSeries {
        self.0
    }

    pub fn values(&self) -> &[f64] {
        self.0.values()
    }

    pub fn timestamps(&self) -> &[NaiveDate] {
        self.0.timestamps()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Several named columns sharing one date vector.
///
/// A freshly loaded panel may contain missing cells (stored as NaN);
/// [`Panel::drop_missing`] removes every row that has one.
#[derive(Debug, Clone, PartialEq)]
pub struct Panel {
    timestamps: Vec<NaiveDate>,
    columns: Vec<(String, Vec<f64>)>,
}

impl Panel {
    pub fn new(timestamps: Vec<NaiveDate>, columns: Vec<(String, Vec<f64>)>) -> Result<Self> {
        if let Some(i) = timestamps.windows(2).position(|w| w[1] <= w[0]) {
            return Err(Error::invalid(format!(
                "panel timestamps not strictly increasing at index {}",
                i + 1
            )));
        }
        for (name, col) in &columns {
            if col.len() != timestamps.len() {
                return Err(Error::invalid(format!(
                    "column {name:?} has {} rows, expected {}",
                    col.len(),
                    timestamps.len()
                )));
            }
        }
        Ok(Panel {
            timestamps,
            columns,
        })
    }

    pub fn timestamps(&self) -> &[NaiveDate] {
        &self.timestamps
    }

    pub fn n_rows(&self) -> usize {
        self.timestamps.len()
    }

    pub fn n_columns(&self) -> usize {
        self.columns.len()
    }

    pub fn column_names(&self) -> impl Iterator<Item = &str> {
        self.columns.iter().map(|(n, _)| n.as_str())
    }

    pub fn column(&self, name: &str) -> Option<&[f64]> {
        self.columns
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, v)| v.as_slice())
    }

    pub fn columns(&self) -> &[(String, Vec<f64>)] {
        &self.columns
    }

    /// Extracts one column as a series, skipping its missing cells.
    pub fn series(&self, name: &str) -> Result<TimeSeries> {
        let col = self
            .column(name)
            .ok_or_else(|| Error::Config(format!("no column named {name:?}")))?;
        let (ts, vs): (Vec<_>, Vec<_>) = self
            .timestamps
            .iter()
            .zip(col)
            .filter(|(_, v)| v.is_finite())
            .map(|(t, v)| (*t, *v))
            .unzip();
        TimeSeries::new(name, ts, vs)
    }

    /// Keeps only the named columns, in the given order.
    pub fn select(&self, names: &[&str]) -> Result<Panel> {
        let columns = names
            .iter()
            .map(|&n| {
                self.column(n)
                    .map(|c| (n.to_string(), c.to_vec()))
                    .ok_or_else(|| Error::Config(format!("no column named {n:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Panel {
            timestamps: self.timestamps.clone(),
            columns,
        })
    }

    /// Removes every row in which any column is missing.
    pub fn drop_missing(&self) -> Result<Panel> {
        let keep: Vec<usize> = (0..self.n_rows())
            .filter(|&i| self.columns.iter().all(|(_, c)| c[i].is_finite()))
            .collect();
        if keep.is_empty() {
            return Err(Error::EmptyIntersection);
        }
        Ok(self.take_rows(&keep))
    }

    /// Removes the given row indices.
    pub fn drop_rows(&self, rows: &[usize]) -> Panel {
        let drop: BTreeSet<usize> = rows.iter().copied().collect();
        let keep: Vec<usize> = (0..self.n_rows()).filter(|i| !drop.contains(i)).collect();
        self.take_rows(&keep)
    }

    fn take_rows(&self, keep: &[usize]) -> Panel {
        Panel {
            timestamps: keep.iter().map(|&i| self.timestamps[i]).collect(),
            columns: self
                .columns
                .iter()
                .map(|(n, c)| (n.clone(), keep.iter().map(|&i| c[i]).collect()))
                .collect(),
        }
    }
}

/// Column layout of an input CSV file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CsvSchema {
    pub date_column: String,
    /// Columns to load, in output order. Empty means every non-date column.
    pub value_columns: Vec<String>,
    /// `chrono` format string for the date column.
    pub date_format: String,
}

impl Default for CsvSchema {
    fn default() -> Self {
        CsvSchema {
            date_column: "date".into(),
            value_columns: Vec::new(),
            date_format: "%Y-%m-%d".into(),
        }
    }
}

fn is_missing(cell: &str) -> bool {
    matches!(cell, "" | "NA" | "NaN" | "nan" | "null")
}

/// Loads a panel from CSV. Rows are sorted by date; missing cells (empty,
/// `NA`) become NaN and can be removed with [`Panel::drop_missing`].
///
/// Row numbers in errors count the header as row 1.
pub fn load_csv(path: impl AsRef<Path>, schema: &CsvSchema) -> Result<Panel> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_csv(file, schema)
}

/// Same as [`load_csv`] for any reader.
pub fn read_csv<R: std::io::Read>(reader: R, schema: &CsvSchema) -> Result<Panel> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    let date_idx = headers
        .iter()
        .position(|h| *h == schema.date_column)
        .ok_or_else(|| Error::Config(format!("no date column {:?}", schema.date_column)))?;
    let wanted: Vec<String> = if schema.value_columns.is_empty() {
        headers
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != date_idx)
            .map(|(_, h)| h.clone())
            .collect()
    } else {
        schema.value_columns.clone()
    };
    let value_idx = wanted
        .iter()
        .map(|name| {
            headers
                .iter()
                .position(|h| h == name)
                .ok_or_else(|| Error::Config(format!("no column named {name:?}")))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut rows: Vec<(NaiveDate, usize, Vec<f64>)> = Vec::new();
    for (i, record) in rdr.records().enumerate() {
        let record = record?;
        let row = i + 2;
        let cell = record.get(date_idx).unwrap_or("");
        let date = NaiveDate::parse_from_str(cell, &schema.date_format).map_err(|e| {
            Error::Ingestion {
                row,
                column: schema.date_column.clone(),
                message: format!("cannot parse date {cell:?}: {e}"),
            }
        })?;
        let mut values = Vec::with_capacity(value_idx.len());
        for (&j, name) in value_idx.iter().zip(&wanted) {
            let cell = record.get(j).unwrap_or("");
            if is_missing(cell) {
                values.push(f64::NAN);
                continue;
            }
            let v: f64 = cell.parse().map_err(|_| Error::Ingestion {
                row,
                column: name.clone(),
                message: format!("cannot parse number {cell:?}"),
            })?;
            if !v.is_finite() {
                return Err(Error::Ingestion {
                    row,
                    column: name.clone(),
                    message: format!("non-finite number {cell:?}"),
                });
            }
            values.push(v);
        }
        rows.push((date, row, values));
    }
    if rows.is_empty() {
        return Err(Error::InsufficientData { needed: 1, got: 0 });
    }
    rows.sort_by_key(|(d, row, _)| (*d, *row));
    if let Some(w) = rows.windows(2).find(|w| w[0].0 == w[1].0) {
        return Err(Error::DuplicateTimestamp {
            date: w[1].0,
            row: w[1].1,
        });
    }
    let timestamps = rows.iter().map(|r| r.0).collect();
    let columns = wanted
        .into_iter()
        .enumerate()
        .map(|(j, name)| (name, rows.iter().map(|r| r.2[j]).collect()))
        .collect();
    Panel::new(timestamps, columns)
}

/// `ln(v_t / v_{t-1})`, dated at `t`.
pub fn log_returns(ts: &TimeSeries) -> Result<ReturnSeries> {
    let v = ts.values();
    if v.len() < 2 {
        return Err(Error::InsufficientData {
            needed: 2,
            got: v.len(),
        });
    }
    if let Some(i) = v.iter().position(|&x| x <= 0.0) {
        return Err(Error::Domain {
            index: i,
            message: format!("log return of non-positive value {}", v[i]),
        });
    }
    let returns = v.windows(2).map(|w| (w[1] / w[0]).ln()).collect();
    let series = TimeSeries::with_frequency(
        format!("r_{}", ts.name()),
        ts.timestamps()[1..].to_vec(),
        returns,
        ts.frequency(),
    )?;
    Ok(ReturnSeries(series))
}

/// Intersects the date sets of all inputs and returns the aligned panel.
pub fn align_and_drop_missing(columns: &[TimeSeries]) -> Result<Panel> {
    let first = columns
        .first()
        .ok_or_else(|| Error::invalid("at least one series is required"))?;
    let mut common: BTreeSet<NaiveDate> = first.timestamps().iter().copied().collect();
    for s in &columns[1..] {
        let dates: BTreeSet<NaiveDate> = s.timestamps().iter().copied().collect();
        common = common.intersection(&dates).copied().collect();
    }
    if common.is_empty() {
        return Err(Error::EmptyIntersection);
    }
    let timestamps: Vec<NaiveDate> = common.into_iter().collect();
    let cols = columns
        .iter()
        .map(|s| {
            // Both date vectors are sorted, so a merge walk suffices.
            let mut out = Vec::with_capacity(timestamps.len());
            let mut j = 0;
            for (d, v) in s.timestamps().iter().zip(s.values()) {
                if j < timestamps.len() && *d == timestamps[j] {
                    out.push(*v);
                    j += 1;
                }
            }
            (s.name().to_string(), out)
        })
        .collect();
    Panel::new(timestamps, cols)
}

/// Weekly aggregation result with the number of daily observations behind
/// each weekly value.
#[derive(Debug, Clone, PartialEq)]
pub struct WeeklyMeans {
    pub series: TimeSeries,
    pub counts: Vec<usize>,
    /// Boundary weeks with fewer observations than the most common week.
    pub partial: Vec<bool>,
}

/// Averages a daily series within ISO weeks; each week is labelled by its
/// last available date.
pub fn weekly_means(ts: &TimeSeries) -> Result<WeeklyMeans> {
    if ts.frequency() != Frequency::Daily {
        return Err(Error::invalid(format!(
            "weekly aggregation needs daily data, got {:?}",
            ts.frequency()
        )));
    }
    let mut dates = Vec::new();
    let mut sums: Vec<f64> = Vec::new();
    let mut counts: Vec<usize> = Vec::new();
    let mut current = None;
    for (d, v) in ts.timestamps().iter().zip(ts.values()) {
        let week = d.iso_week();
        let key = (week.year(), week.week());
        if current != Some(key) {
            current = Some(key);
            dates.push(*d);
            sums.push(0.0);
            counts.push(0);
        }
        let last = sums.len() - 1;
        sums[last] += v;
        counts[last] += 1;
        dates[last] = *d;
    }
    let means = sums
        .iter()
        .zip(&counts)
        .map(|(s, &c)| s / c as f64)
        .collect();
    let modal = {
        let mut hist = [0usize; 8];
        for &c in &counts {
            hist[c.min(7)] += 1;
        }
        (1..8).max_by_key(|&c| (hist[c], c)).unwrap_or(7)
    };
    let last = counts.len() - 1;
    let partial = counts
        .iter()
        .enumerate()
        .map(|(i, &c)| (i == 0 || i == last) && c < modal)
        .collect();
    let mut series = TimeSeries::with_frequency(ts.name(), dates, means, Frequency::Weekly)?;
    series.units = ts.units.clone();
    Ok(WeeklyMeans {
        series,
        counts,
        partial,
    })
}

pub fn to_weekly_mean(ts: &TimeSeries) -> Result<TimeSeries> {
    weekly_means(ts).map(|w| w.series)
}
