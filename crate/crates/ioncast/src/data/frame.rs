//! State frames and the in-memory dataset.

use crate::astro::UnixTime;
use crate::error::{Error, Result};
use crate::mesh::LatLonGrid;
use crate::tensor::Tensor;

use super::channels::ChannelSpec;

/// One timestamp's stack of channel maps, `[C, H, W]`, channels ordered per
/// the run's `ChannelSpec`. TEC is in TECU.
#[derive(Clone, Debug, PartialEq)]
pub struct StateFrame {
    pub t: UnixTime,
    pub values: Tensor<f32>,
}

impl StateFrame {
    pub fn channel(&self, c: usize) -> &[f32] {
        let (_, h, w) = self.values.dims3().expect("frames are rank 3");
        &self.values.data()[c * h * w..(c + 1) * h * w]
    }

    pub fn channel_mut(&mut self, c: usize) -> &mut [f32] {
        let (_, h, w) = self.values.dims3().expect("frames are rank 3");
        &mut self.values.data_mut()[c * h * w..(c + 1) * h * w]
    }
}

/// Immutable time-ordered frame stack plus its grid and channel layout.
/// Timestamps are multiples of the cadence but may have gaps; samplers skip
/// sequences that would cross one.
#[derive(Clone, Debug)]
pub struct Dataset {
    pub spec: ChannelSpec,
    pub grid: LatLonGrid,
    pub cadence_s: u32,
    timestamps: Vec<UnixTime>,
    /// `[T, C, H, W]`, row-major.
    data: Vec<f32>,
}

impl Dataset {
    pub fn new(
        spec: ChannelSpec,
        grid: LatLonGrid,
        cadence_s: u32,
        timestamps: Vec<UnixTime>,
        data: Vec<f32>,
    ) -> Result<Self> {
        let frame_len = spec.len() * grid.n_nodes();
        if data.len() != timestamps.len() * frame_len {
            return Err(Error::Dimension(format!(
                "dataset buffer holds {} values, expected {} frames x {} values",
                data.len(),
                timestamps.len(),
                frame_len
            )));
        }
        for w in timestamps.windows(2) {
            if w[1] <= w[0] {
                return Err(Error::Format(format!(
                    "timestamps not strictly increasing at {} -> {}",
                    w[0], w[1]
                )));
            }
            if (w[1] - w[0]) % cadence_s as i64 != 0 {
                return Err(Error::Format(format!(
                    "timestamp {} is not a cadence multiple after {}",
                    w[1], w[0]
                )));
            }
        }
        if !data.iter().all(|v| v.is_finite()) {
            return Err(Error::Ingest(
                "non-finite values after ingestion; apply a gap policy upstream".into(),
            ));
        }
        Ok(Dataset { spec, grid, cadence_s, timestamps, data })
    }

    pub fn n_frames(&self) -> usize {
        self.timestamps.len()
    }

    pub fn timestamps(&self) -> &[UnixTime] {
        &self.timestamps
    }

    pub fn timestamp(&self, idx: usize) -> UnixTime {
        self.timestamps[idx]
    }

    pub fn index_of_time(&self, t: UnixTime) -> Option<usize> {
        self.timestamps.binary_search(&t).ok()
    }

    fn frame_len(&self) -> usize {
        self.spec.len() * self.grid.n_nodes()
    }

    pub fn frame(&self, idx: usize) -> StateFrame {
        let fl = self.frame_len();
        let values = Tensor::from_vec(
            &[self.spec.len(), self.grid.n_lat(), self.grid.n_lon()],
            self.data[idx * fl..(idx + 1) * fl].to_vec(),
        )
        .expect("frame buffer layout");
        StateFrame { t: self.timestamps[idx], values }
    }

    pub fn channel_slice(&self, idx: usize, c: usize) -> &[f32] {
        let fl = self.frame_len();
        let n = self.grid.n_nodes();
        &self.data[idx * fl + c * n..idx * fl + (c + 1) * n]
    }

    /// True when frames `i` and `i + 1` are adjacent at the cadence.
    pub fn contiguous(&self, i: usize) -> bool {
        self.timestamps[i + 1] - self.timestamps[i] == self.cadence_s as i64
    }

    pub fn raw_data(&self) -> &[f32] {
        &self.data
    }
}
