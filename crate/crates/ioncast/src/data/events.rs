//! Geomagnetic event catalogs and storm-aware train/val/test splits.

use std::path::Path;

use chrono::DateTime;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::astro::UnixTime;
use crate::error::{Error, Result};

/// NOAA geomagnetic storm scale.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum GLevel {
    G0,
    G1,
    G2,
    G3,
    G4,
    G5,
}

impl GLevel {
    pub const ALL: [GLevel; 6] = [GLevel::G0, GLevel::G1, GLevel::G2, GLevel::G3, GLevel::G4, GLevel::G5];

    /// Kp-to-G mapping: Kp 5 -> G1 ... Kp 9 -> G5, below 5 -> G0.
    pub fn from_kp(kp: f64) -> GLevel {
        match kp {
            k if k >= 9.0 => GLevel::G5,
            k if k >= 8.0 => GLevel::G4,
            k if k >= 7.0 => GLevel::G3,
            k if k >= 6.0 => GLevel::G2,
            k if k >= 5.0 => GLevel::G1,
            _ => GLevel::G0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            GLevel::G0 => "G0",
            GLevel::G1 => "G1",
            GLevel::G2 => "G2",
            GLevel::G3 => "G3",
            GLevel::G4 => "G4",
            GLevel::G5 => "G5",
        }
    }

    pub fn from_name(s: &str) -> Result<GLevel> {
        Self::ALL
            .iter()
            .copied()
            .find(|g| g.name() == s)
            .ok_or_else(|| Error::Format(format!("unknown G level '{s}'")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Event {
    pub start: UnixTime,
    pub end: UnixTime,
    pub g_level: GLevel,
}

/// Sorted, non-overlapping event list. Overlapping input events are merged,
/// keeping the higher G level.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EventCatalog {
    events: Vec<Event>,
}

impl EventCatalog {
    pub fn new(mut events: Vec<Event>) -> Result<Self> {
        for e in &events {
            if e.end <= e.start {
                return Err(Error::Format(format!(
                    "event ending {} not after start {}",
                    e.end, e.start
                )));
            }
        }
        events.sort_by_key(|e| (e.start, e.end));
        let mut merged: Vec<Event> = Vec::with_capacity(events.len());
        for e in events {
            match merged.last_mut() {
                Some(last) if e.start <= last.end => {
                    last.end = last.end.max(e.end);
                    last.g_level = last.g_level.max(e.g_level);
                }
                _ => merged.push(e),
            }
        }
        Ok(EventCatalog { events: merged })
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn of_level(&self, level: GLevel) -> Vec<Event> {
        self.events.iter().copied().filter(|e| e.g_level == level).collect()
    }

    /// `start,end,g_level` CSV with ISO-8601 timestamps.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut out = String::from("start,end,g_level\n");
        for e in &self.events {
            out.push_str(&format!(
                "{},{},{}\n",
                format_iso(e.start),
                format_iso(e.end),
                e.g_level.name()
            ));
        }
        std::fs::write(path, out)?;
        Ok(())
    }

    pub fn read_csv(path: &Path) -> Result<EventCatalog> {
        let text = std::fs::read_to_string(path)?;
        let mut lines = text.lines().enumerate();
        match lines.next() {
            Some((_, h)) if h.trim() == "start,end,g_level" => {}
            Some((_, h)) => {
                return Err(Error::Format(format!(
                    "{}: header must be 'start,end,g_level', got '{h}'",
                    path.display()
                )))
            }
            None => return Err(Error::Format(format!("{}: empty file", path.display()))),
        }
        let mut events = Vec::new();
        for (lineno, line) in lines {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let parts: Vec<&str> = line.split(',').collect();
            if parts.len() != 3 {
                return Err(Error::Ingest(format!(
                    "{}: line {}: expected 3 fields",
                    path.display(),
                    lineno + 1
                )));
            }
            let parse = |s: &str| -> Result<UnixTime> {
                DateTime::parse_from_rfc3339(s.trim())
                    .map(|d| d.timestamp())
                    .map_err(|_| {
                        Error::Ingest(format!(
                            "{}: line {}: bad timestamp '{}'",
                            path.display(),
                            lineno + 1,
                            s.trim()
                        ))
                    })
            };
            events.push(Event {
                start: parse(parts[0])?,
                end: parse(parts[1])?,
                g_level: GLevel::from_name(parts[2].trim())?,
            });
        }
        EventCatalog::new(events)
    }
}

pub fn format_iso(t: UnixTime) -> String {
    chrono::DateTime::from_timestamp(t, 0)
        .map(|d| d.format("%Y-%m-%dT%H:%M:%SZ").to_string())
        .unwrap_or_else(|| t.to_string())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SplitAssignment {
    Train,
    Val,
    Test,
}

/// Per-event split assignment plus the parameters that produced it.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SplitSpec {
    pub assignments: Vec<(Event, SplitAssignment)>,
    pub holdout_fraction: f64,
    pub seed: u64,
    pub warnings: Vec<String>,
}

impl SplitSpec {
    pub fn events_with(&self, a: SplitAssignment) -> Vec<Event> {
        self.assignments
            .iter()
            .filter(|(_, x)| *x == a)
            .map(|(e, _)| *e)
            .collect()
    }

    /// Held-out (val + test) events.
    pub fn held_out(&self) -> Vec<Event> {
        self.assignments
            .iter()
            .filter(|(_, a)| *a != SplitAssignment::Train)
            .map(|(e, _)| *e)
            .collect()
    }

    /// Per-timestamp training mask over `n_steps` cadence steps starting at
    /// `start`. Steps inside any held-out event window, widened by
    /// `margin_steps` on both sides, are excluded.
    pub fn train_mask(
        &self,
        start: UnixTime,
        n_steps: usize,
        cadence_s: u32,
        margin_steps: usize,
    ) -> Vec<bool> {
        let margin = margin_steps as i64 * cadence_s as i64;
        let mut mask = vec![true; n_steps];
        for e in self.held_out() {
            let lo = e.start - margin;
            let hi = e.end + margin;
            for (i, m) in mask.iter_mut().enumerate() {
                let t = start + i as i64 * cadence_s as i64;
                if t >= lo && t <= hi {
                    *m = false;
                }
            }
        }
        mask
    }
}

/// Seeded per-G-level holdout: `ceil(fraction * n)` events to test and the
/// same count to validation when enough events remain (one training event is
/// always kept back from validation, mirroring the test holdout).
pub fn build_splits(catalog: &EventCatalog, fraction: f64, seed: u64) -> Result<SplitSpec> {
    if catalog.is_empty() {
        return Err(Error::Split("event catalog is empty".into()));
    }
    if !(0.0..1.0).contains(&fraction) || fraction == 0.0 {
        return Err(Error::Argument(format!(
            "holdout fraction must be in (0, 1), got {fraction}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut assignments = Vec::with_capacity(catalog.len());
    let mut warnings = Vec::new();
    for level in GLevel::ALL {
        let mut events = catalog.of_level(level);
        if events.is_empty() {
            continue;
        }
        events.shuffle(&mut rng);
        let n = events.len();
        let test_count = (fraction * n as f64).ceil() as usize;
        let val_count = (fraction * n as f64).ceil() as usize;
        let val_count = val_count.min(n.saturating_sub(test_count + 1));
        if val_count == 0 {
            warnings.push(format!(
                "level {}: only {n} events; validation holdout is empty",
                level.name()
            ));
        }
        for (i, e) in events.into_iter().enumerate() {
            let a = if i < test_count {
                SplitAssignment::Test
            } else if i < test_count + val_count {
                SplitAssignment::Val
            } else {
                SplitAssignment::Train
            };
            assignments.push((e, a));
        }
    }
    assignments.sort_by_key(|(e, _)| e.start);
    Ok(SplitSpec { assignments, holdout_fraction: fraction, seed, warnings })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ev(start_h: i64, len_h: i64, g: GLevel) -> Event {
        Event { start: start_h * 3600, end: (start_h + len_h) * 3600, g_level: g }
    }

    #[test]
    fn ten_g2_events_at_ten_percent_give_one_test_event() {
        let events: Vec<Event> = (0..10).map(|i| ev(i * 100, 10, GLevel::G2)).collect();
        let catalog = EventCatalog::new(events).unwrap();
        let split = build_splits(&catalog, 0.1, 42).unwrap();
        let test = split.events_with(SplitAssignment::Test);
        assert_eq!(test.len(), 1);
        assert_eq!(split.events_with(SplitAssignment::Val).len(), 1);
        assert_eq!(split.events_with(SplitAssignment::Train).len(), 8);
    }

    #[test]
    fn two_events_at_half_give_one_test_one_train_and_a_warning() {
        let catalog =
            EventCatalog::new(vec![ev(0, 10, GLevel::G1), ev(100, 10, GLevel::G1)]).unwrap();
        let split = build_splits(&catalog, 0.5, 3).unwrap();
        assert_eq!(split.events_with(SplitAssignment::Test).len(), 1);
        assert_eq!(split.events_with(SplitAssignment::Val).len(), 0);
        assert_eq!(split.events_with(SplitAssignment::Train).len(), 1);
        assert!(!split.warnings.is_empty());
    }

    #[test]
    fn identical_seed_gives_identical_split() {
        let events: Vec<Event> = (0..20)
            .map(|i| ev(i * 50, 8, if i % 3 == 0 { GLevel::G2 } else { GLevel::G0 }))
            .collect();
        let catalog = EventCatalog::new(events).unwrap();
        let a = build_splits(&catalog, 0.2, 7).unwrap();
        let b = build_splits(&catalog, 0.2, 7).unwrap();
        assert_eq!(a.assignments, b.assignments);
        let c = build_splits(&catalog, 0.2, 8).unwrap();
        assert!(a.assignments != c.assignments || a.seed != c.seed);
    }

    #[test]
    fn empty_catalog_is_a_split_error() {
        let catalog = EventCatalog::new(vec![]).unwrap();
        assert!(matches!(build_splits(&catalog, 0.1, 0), Err(Error::Split(_))));
    }

    #[test]
    fn overlapping_events_merge_keeping_higher_level() {
        let catalog =
            EventCatalog::new(vec![ev(0, 10, GLevel::G1), ev(5, 10, GLevel::G3)]).unwrap();
        assert_eq!(catalog.len(), 1);
        assert_eq!(catalog.events()[0].g_level, GLevel::G3);
        assert_eq!(catalog.events()[0].end, 15 * 3600);
    }

    #[test]
    fn train_mask_excludes_margins() {
        let catalog = EventCatalog::new(vec![ev(10, 4, GLevel::G2)]).unwrap();
        // single event is forced into test (ceil(0.5*1) = 1)
        let split = build_splits(&catalog, 0.5, 1).unwrap();
        let cadence = 3600u32;
        let mask = split.train_mask(0, 30, cadence, 2);
        for (i, &m) in mask.iter().enumerate() {
            let inside = (8..=16).contains(&i); // 10-2 .. 14+2
            assert_eq!(m, !inside, "step {i}");
        }
    }

    #[test]
    fn catalog_csv_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("events.csv");
        let catalog = EventCatalog::new(vec![
            Event { start: 1_441_600_800, end: 1_441_687_200, g_level: GLevel::G2 },
            Event { start: 1_442_600_800, end: 1_442_687_200, g_level: GLevel::G0 },
        ])
        .unwrap();
        catalog.write_csv(&p).unwrap();
        let back = EventCatalog::read_csv(&p).unwrap();
        // CSV stores whole seconds; the catalog only uses whole seconds
        assert_eq!(back, catalog);
    }
}
