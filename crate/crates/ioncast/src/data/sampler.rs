//! Sequence sampling: context + horizon windows restricted to a split mask.

use crate::error::{Error, Result};

use super::frame::Dataset;

/// Start indices of admissible sequences. A candidate start `s` covers frames
/// `[s, s + context + horizon)`; it is admissible when the window fits, stays
/// contiguous at the cadence, and (when a mask is given) touches only
/// mask-true frames. Every `dilation`-th candidate is kept, in order.
pub fn sample_sequences(
    ds: &Dataset,
    context: usize,
    horizon: usize,
    dilation: usize,
    mask: Option<&[bool]>,
) -> Result<Vec<usize>> {
    if context < 1 || horizon < 1 || dilation < 1 {
        return Err(Error::Argument(format!(
            "context ({context}), horizon ({horizon}) and dilation ({dilation}) must all be >= 1"
        )));
    }
    if let Some(m) = mask {
        if m.len() != ds.n_frames() {
            return Err(Error::Dimension(format!(
                "mask covers {} frames, dataset has {}",
                m.len(),
                ds.n_frames()
            )));
        }
    }
    let span = context + horizon;
    if ds.n_frames() < span {
        return Err(Error::Sampling(format!(
            "dataset has {} frames, sequences need {span}",
            ds.n_frames()
        )));
    }
    let mut candidates = Vec::new();
    'starts: for s in 0..=(ds.n_frames() - span) {
        for i in s..s + span {
            if let Some(m) = mask {
                if !m[i] {
                    continue 'starts;
                }
            }
            if i + 1 < s + span && !ds.contiguous(i) {
                continue 'starts;
            }
        }
        candidates.push(s);
    }
    let picked: Vec<usize> = candidates.into_iter().step_by(dilation).collect();
    if picked.is_empty() {
        return Err(Error::Sampling(
            "no admissible sequences under the given mask and dilation".into(),
        ));
    }
    Ok(picked)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::channels::{ChannelDef, ChannelKind, ChannelSource, ChannelSpec};
    use crate::mesh::LatLonGrid;

    fn tiny_dataset(n_frames: usize, gap_after: Option<usize>) -> Dataset {
        let spec = ChannelSpec::new(vec![ChannelDef {
            name: "tec".into(),
            kind: ChannelKind::Target,
            source: ChannelSource::MapFile,
            loss_weight: 1.0,
        }])
        .unwrap();
        let grid = LatLonGrid::new(2, 4).unwrap();
        let mut timestamps = Vec::new();
        let mut t = 0i64;
        for i in 0..n_frames {
            timestamps.push(t);
            t += 900;
            if gap_after == Some(i) {
                t += 900; // skip one cadence slot
            }
        }
        let data = vec![0.0f32; n_frames * 8];
        Dataset::new(spec, grid, 900, timestamps, data).unwrap()
    }

    #[test]
    fn gapless_count_matches_arithmetic() {
        let ds = tiny_dataset(100, None);
        let seqs = sample_sequences(&ds, 8, 1, 1, None).unwrap();
        assert_eq!(seqs.len(), 100 - 8);
    }

    #[test]
    fn dilation_keeps_every_nth() {
        let ds = tiny_dataset(600, None);
        let all = sample_sequences(&ds, 8, 1, 1, None).unwrap();
        let dilated = sample_sequences(&ds, 8, 1, 256, None).unwrap();
        assert_eq!(dilated.len(), all.len().div_ceil(256));
        assert_eq!(dilated[0], all[0]);
        assert_eq!(dilated[1], all[256]);
    }

    #[test]
    fn sequences_never_cross_gaps() {
        let ds = tiny_dataset(30, Some(14));
        let seqs = sample_sequences(&ds, 4, 2, 1, None).unwrap();
        for s in seqs {
            assert!(
                s + 6 <= 15 || s >= 15,
                "sequence at {s} crosses the gap after frame 14"
            );
        }
    }

    #[test]
    fn masked_frames_are_never_touched() {
        let ds = tiny_dataset(50, None);
        let mut mask = vec![true; 50];
        for m in mask[20..30].iter_mut() {
            *m = false;
        }
        let seqs = sample_sequences(&ds, 4, 2, 1, Some(&mask)).unwrap();
        // brute-force overlap scan
        for s in seqs {
            for i in s..s + 6 {
                assert!(mask[i], "sequence at {s} touches masked frame {i}");
            }
        }
    }

    #[test]
    fn empty_yield_is_a_sampling_error() {
        let ds = tiny_dataset(20, None);
        let mask = vec![false; 20];
        assert!(matches!(
            sample_sequences(&ds, 4, 1, 1, Some(&mask)),
            Err(Error::Sampling(_))
        ));
    }
}
