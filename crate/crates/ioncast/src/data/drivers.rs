//! 1-D driver time series: CSV ingestion, schemas, and causal alignment to
//! the map cadence.

use std::path::Path;

use chrono::DateTime;

use crate::astro::UnixTime;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AlignPolicy {
    /// Last sample at or before the query time; never looks into the future.
    HoldPrevious,
    /// Linear interpolation between the bracketing samples.
    LinearInterpolate,
}

impl AlignPolicy {
    pub fn from_name(s: &str) -> Result<Self> {
        match s {
            "hold-previous" => Ok(AlignPolicy::HoldPrevious),
            "linear-interpolate" => Ok(AlignPolicy::LinearInterpolate),
            other => Err(Error::Config(format!("unknown alignment policy '{other}'"))),
        }
    }
}

/// Declares how a driver CSV is interpreted.
#[derive(Clone, Debug, PartialEq)]
pub struct DriverSchema {
    pub units: String,
    pub sentinel: Option<f64>,
    pub cadence_s: u32,
    pub policy: AlignPolicy,
    /// Largest tolerated source-sample gap when aligning; defaults to twice
    /// the native cadence.
    pub max_gap_s: Option<i64>,
}

/// Key-value text schema file: `units = TECU`, `sentinel = 9999`,
/// `cadence_s = 86400`, `policy = hold-previous`, `max_gap_s = 172800`.
pub fn read_driver_schema(path: &Path) -> Result<DriverSchema> {
    let text = std::fs::read_to_string(path)?;
    let mut units = None;
    let mut sentinel = None;
    let mut cadence = None;
    let mut policy = None;
    let mut max_gap = None;
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            Error::Format(format!("{}: line {}: expected 'key = value'", path.display(), lineno + 1))
        })?;
        let (key, value) = (key.trim(), value.trim());
        match key {
            "units" => units = Some(value.to_string()),
            "sentinel" => {
                sentinel = Some(value.parse::<f64>().map_err(|_| {
                    Error::Format(format!("{}: bad sentinel '{value}'", path.display()))
                })?)
            }
            "cadence_s" => {
                cadence = Some(value.parse::<u32>().map_err(|_| {
                    Error::Format(format!("{}: bad cadence '{value}'", path.display()))
                })?)
            }
            "policy" => policy = Some(AlignPolicy::from_name(value)?),
            "max_gap_s" => {
                max_gap = Some(value.parse::<i64>().map_err(|_| {
                    Error::Format(format!("{}: bad max_gap_s '{value}'", path.display()))
                })?)
            }
            other => {
                return Err(Error::Config(format!(
                    "{}: unknown schema key '{other}'",
                    path.display()
                )))
            }
        }
    }
    Ok(DriverSchema {
        units: units.unwrap_or_default(),
        sentinel,
        cadence_s: cadence
            .ok_or_else(|| Error::Config(format!("{}: cadence_s missing", path.display())))?,
        policy: policy
            .ok_or_else(|| Error::Config(format!("{}: policy missing", path.display())))?,
        max_gap_s: max_gap,
    })
}

/// One named scalar series; sentinel rows have already become gaps.
#[derive(Clone, Debug, PartialEq)]
pub struct DriverSeries {
    pub name: String,
    pub timestamps: Vec<UnixTime>,
    pub values: Vec<f64>,
    pub units: String,
    pub native_cadence_s: u32,
    pub policy: AlignPolicy,
    pub max_gap_s: Option<i64>,
}

impl DriverSeries {
    pub fn len(&self) -> usize {
        self.timestamps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.timestamps.is_empty()
    }

    fn max_gap(&self) -> i64 {
        self.max_gap_s.unwrap_or(2 * self.native_cadence_s as i64)
    }
}

fn parse_timestamp(s: &str) -> Option<UnixTime> {
    DateTime::parse_from_rfc3339(s).ok().map(|dt| dt.timestamp())
}

/// Reads a `timestamp,value` CSV under a schema. Sentinel values become
/// gaps; non-monotone timestamps are a format error; anything unparseable is
/// an ingest error carrying the line number.
pub fn read_driver_csv(path: &Path, name: &str, schema: &DriverSchema) -> Result<DriverSeries> {
    let text = std::fs::read_to_string(path)?;
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header.trim() == "timestamp,value" => {}
        Some((_, header)) => {
            return Err(Error::Format(format!(
                "{}: header must be 'timestamp,value', got '{header}'",
                path.display()
            )))
        }
        None => return Err(Error::Format(format!("{}: empty file", path.display()))),
    }
    let mut timestamps = Vec::new();
    let mut values = Vec::new();
    for (lineno, line) in lines {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let (ts_str, val_str) = line.split_once(',').ok_or_else(|| {
            Error::Ingest(format!("{}: line {}: missing comma", path.display(), lineno + 1))
        })?;
        let t = parse_timestamp(ts_str.trim()).ok_or_else(|| {
            Error::Ingest(format!(
                "{}: line {}: bad ISO-8601 timestamp '{}'",
                path.display(),
                lineno + 1,
                ts_str.trim()
            ))
        })?;
        let v: f64 = val_str.trim().parse().map_err(|_| {
            Error::Ingest(format!(
                "{}: line {}: bad value '{}'",
                path.display(),
                lineno + 1,
                val_str.trim()
            ))
        })?;
        if let Some(last) = timestamps.last() {
            if t <= *last {
                return Err(Error::Format(format!(
                    "{}: line {}: timestamp {t} not after previous {last}",
                    path.display(),
                    lineno + 1
                )));
            }
        }
        timestamps.push(t);
        if schema.sentinel.is_some_and(|s| v == s) {
            timestamps.pop(); // sentinel row becomes a gap
            continue;
        }
        values.push(v);
    }
    Ok(DriverSeries {
        name: name.to_string(),
        timestamps,
        values,
        units: schema.units.clone(),
        native_cadence_s: schema.cadence_s,
        policy: schema.policy,
        max_gap_s: schema.max_gap_s,
    })
}

/// Driver values aligned to the cadence grid: `values[t][d]` for timestamp
/// index `t` and series `d` (series order preserved).
#[derive(Clone, Debug)]
pub struct AlignedDrivers {
    pub names: Vec<String>,
    pub timestamps: Vec<UnixTime>,
    pub values: Vec<Vec<f64>>,
}

/// Aligns every series to the cadence timestamps `[start, start + n)`.
/// Hold-previous is strictly causal; gaps beyond each series' bound are an
/// alignment error listing the offending interval.
pub fn align_drivers(
    series: &[DriverSeries],
    cadence_s: u32,
    start: UnixTime,
    n_steps: usize,
) -> Result<AlignedDrivers> {
    let timestamps: Vec<UnixTime> =
        (0..n_steps).map(|i| start + i as i64 * cadence_s as i64).collect();
    align_drivers_at(series, &timestamps)
}

/// Alignment to an explicit (possibly gapped) timestamp list.
pub fn align_drivers_at(series: &[DriverSeries], timestamps: &[UnixTime]) -> Result<AlignedDrivers> {
    let n_steps = timestamps.len();
    let mut values = vec![vec![0.0f64; series.len()]; n_steps];
    for (d, s) in series.iter().enumerate() {
        if s.is_empty() {
            return Err(Error::Alignment(format!("series '{}' has no samples", s.name)));
        }
        let max_gap = s.max_gap();
        let mut cursor = 0usize; // index of last sample <= t, monotone
        for (i, &t) in timestamps.iter().enumerate() {
            while cursor + 1 < s.len() && s.timestamps[cursor + 1] <= t {
                cursor += 1;
            }
            if s.timestamps[cursor] > t {
                return Err(Error::Alignment(format!(
                    "series '{}' starts at {} but alignment needs {} (interval {}..{})",
                    s.name, s.timestamps[cursor], t, t, s.timestamps[cursor]
                )));
            }
            let age = t - s.timestamps[cursor];
            match s.policy {
                AlignPolicy::HoldPrevious => {
                    if age > max_gap {
                        return Err(Error::Alignment(format!(
                            "series '{}': gap of {age}s at {t} exceeds bound {max_gap}s (interval {}..{t})",
                            s.name, s.timestamps[cursor]
                        )));
                    }
                    values[i][d] = s.values[cursor];
                }
                AlignPolicy::LinearInterpolate => {
                    if s.timestamps[cursor] == t {
                        values[i][d] = s.values[cursor];
                    } else if cursor + 1 < s.len() {
                        let (t0, t1) = (s.timestamps[cursor], s.timestamps[cursor + 1]);
                        if t1 - t0 > max_gap {
                            return Err(Error::Alignment(format!(
                                "series '{}': gap {t0}..{t1} exceeds bound {max_gap}s",
                                s.name
                            )));
                        }
                        let frac = (t - t0) as f64 / (t1 - t0) as f64;
                        values[i][d] = s.values[cursor] * (1.0 - frac) + s.values[cursor + 1] * frac;
                    } else if age <= max_gap {
                        values[i][d] = s.values[cursor]; // tail hold within bound
                    } else {
                        return Err(Error::Alignment(format!(
                            "series '{}': no sample after {} to interpolate {t} (interval {}..{t})",
                            s.name, s.timestamps[cursor], s.timestamps[cursor]
                        )));
                    }
                }
            }
        }
    }
    Ok(AlignedDrivers {
        names: series.iter().map(|s| s.name.clone()).collect(),
        timestamps,
        values,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn schema(cadence: u32, policy: AlignPolicy) -> DriverSchema {
        DriverSchema {
            units: "n/a".into(),
            sentinel: Some(9999.0),
            cadence_s: cadence,
            policy,
            max_gap_s: None,
        }
    }

    fn write(path: &Path, body: &str) {
        std::fs::write(path, body).unwrap();
    }

    #[test]
    fn three_row_file_parses() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("kp.csv");
        write(
            &p,
            "timestamp,value\n2015-01-01T00:00:00Z,3.0\n2015-01-01T03:00:00Z,4.0\n2015-01-01T06:00:00Z,2.0\n",
        );
        let s = read_driver_csv(&p, "kp", &schema(10_800, AlignPolicy::HoldPrevious)).unwrap();
        assert_eq!(s.len(), 3);
        assert_eq!(s.values, vec![3.0, 4.0, 2.0]);
    }

    #[test]
    fn sentinel_rows_become_gaps() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("kp.csv");
        write(
            &p,
            "timestamp,value\n2015-01-01T00:00:00Z,3.0\n2015-01-01T03:00:00Z,9999\n2015-01-01T06:00:00Z,2.0\n",
        );
        let s = read_driver_csv(&p, "kp", &schema(10_800, AlignPolicy::HoldPrevious)).unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s.timestamps[1] - s.timestamps[0], 6 * 3600);
    }

    #[test]
    fn out_of_order_rows_are_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("kp.csv");
        write(
            &p,
            "timestamp,value\n2015-01-01T06:00:00Z,3.0\n2015-01-01T03:00:00Z,4.0\n",
        );
        assert!(matches!(
            read_driver_csv(&p, "kp", &schema(10_800, AlignPolicy::HoldPrevious)),
            Err(Error::Format(_))
        ));
    }

    #[test]
    fn bad_row_carries_line_number() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("kp.csv");
        write(&p, "timestamp,value\n2015-01-01T00:00:00Z,3.0\nnot-a-date,4.0\n");
        let err = read_driver_csv(&p, "kp", &schema(10_800, AlignPolicy::HoldPrevious)).unwrap_err();
        assert!(matches!(err, Error::Ingest(_)));
        assert!(err.to_string().contains("line 3"), "{err}");
    }

    fn series(name: &str, cadence: u32, policy: AlignPolicy, pts: &[(i64, f64)]) -> DriverSeries {
        DriverSeries {
            name: name.into(),
            timestamps: pts.iter().map(|p| p.0).collect(),
            values: pts.iter().map(|p| p.1).collect(),
            units: String::new(),
            native_cadence_s: cadence,
            policy,
            max_gap_s: None,
        }
    }

    #[test]
    fn daily_value_held_across_96_slots() {
        let day = 86_400i64;
        let s = series(
            "f107",
            86_400,
            AlignPolicy::HoldPrevious,
            &[(0, 120.0), (day, 130.0), (2 * day, 140.0)],
        );
        let aligned = align_drivers(&[s], 900, 0, 2 * 96).unwrap();
        for i in 0..96 {
            assert_eq!(aligned.values[i][0], 120.0, "slot {i}");
        }
        for i in 96..192 {
            assert_eq!(aligned.values[i][0], 130.0, "slot {i}");
        }
    }

    #[test]
    fn linear_midpoint() {
        let s = series("v", 1800, AlignPolicy::LinearInterpolate, &[(0, 2.0), (1800, 4.0)]);
        let aligned = align_drivers(&[s], 900, 0, 2).unwrap();
        assert_eq!(aligned.values[0][0], 2.0);
        assert_eq!(aligned.values[1][0], 3.0);
    }

    #[test]
    fn gap_beyond_bound_is_an_alignment_error() {
        let s = series("kp", 10_800, AlignPolicy::HoldPrevious, &[(0, 3.0), (10 * 86_400, 4.0)]);
        let err = align_drivers(&[s], 900, 0, 96).unwrap_err();
        assert!(matches!(err, Error::Alignment(_)));
        assert!(err.to_string().contains("interval"), "{err}");
    }

    #[test]
    fn hold_previous_is_causal_under_exhaustive_scan() {
        // anti-leak oracle: every aligned value must equal a source sample
        // with timestamp <= the query time
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for _ in 0..20 {
            let mut t = 0i64;
            let mut pts = Vec::new();
            for _ in 0..40 {
                t += rng.random_range(600..4000);
                pts.push((t, rng.random::<f64>()));
            }
            let s = DriverSeries {
                name: "x".into(),
                timestamps: pts.iter().map(|p| p.0).collect(),
                values: pts.iter().map(|p| p.1).collect(),
                units: String::new(),
                native_cadence_s: 3600,
                policy: AlignPolicy::HoldPrevious,
                max_gap_s: Some(10_000),
            };
            let start = pts[0].0;
            let aligned = align_drivers(&[s.clone()], 900, start, 60).unwrap();
            for (i, row) in aligned.values.iter().enumerate() {
                let query = aligned.timestamps[i];
                let legal: Vec<f64> = s
                    .timestamps
                    .iter()
                    .zip(&s.values)
                    .filter(|(ts, _)| **ts <= query)
                    .map(|(_, v)| *v)
                    .collect();
                assert!(
                    legal.contains(&row[0]),
                    "aligned value at {query} not among causal samples"
                );
                // moreover it is the most recent one
                assert_eq!(row[0], *legal.last().unwrap());
            }
        }
    }
}
