//! Per-channel z-scoring fitted on training timestamps only.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tensor::Tensor;

use super::frame::Dataset;

const STD_FLOOR: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Normalizer {
    pub mean: Vec<f32>,
    pub std: Vec<f32>,
    /// Channels whose standard deviation hit the floor (constant channels).
    pub floored: Vec<String>,
}

/// Fits per-channel statistics over the frames where `train_mask` is true.
pub fn fit_normalizer(ds: &Dataset, train_mask: &[bool]) -> Result<Normalizer> {
    if train_mask.len() != ds.n_frames() {
        return Err(Error::Dimension(format!(
            "mask covers {} frames, dataset has {}",
            train_mask.len(),
            ds.n_frames()
        )));
    }
    let c = ds.spec.len();
    let used: Vec<usize> = (0..ds.n_frames()).filter(|&i| train_mask[i]).collect();
    if used.is_empty() {
        return Err(Error::Split("no training frames to fit the normalizer on".into()));
    }
    let n_per_frame = ds.grid.n_nodes() as f64;
    let count = used.len() as f64 * n_per_frame;
    let mut mean = vec![0.0f64; c];
    let mut m2 = vec![0.0f64; c];
    for &fi in &used {
        for ch in 0..c {
            for &v in ds.channel_slice(fi, ch) {
                mean[ch] += v as f64;
            }
        }
    }
    for m in mean.iter_mut() {
        *m /= count;
    }
    for &fi in &used {
        for ch in 0..c {
            for &v in ds.channel_slice(fi, ch) {
                let d = v as f64 - mean[ch];
                m2[ch] += d * d;
            }
        }
    }
    let mut floored = Vec::new();
    let std: Vec<f32> = m2
        .iter()
        .enumerate()
        .map(|(ch, &s)| {
            let sd = (s / count).sqrt();
            if sd < STD_FLOOR {
                floored.push(ds.spec.channels()[ch].name.clone());
                STD_FLOOR as f32
            } else {
                sd as f32
            }
        })
        .collect();
    Ok(Normalizer { mean: mean.iter().map(|&m| m as f32).collect(), std, floored })
}

impl Normalizer {
    pub fn n_channels(&self) -> usize {
        self.mean.len()
    }

    /// z-scores a `[C, H, W]` frame tensor.
    pub fn apply(&self, values: &Tensor<f32>) -> Result<Tensor<f32>> {
        let (c, h, w) = values.dims3()?;
        self.check(c)?;
        let mut out = values.data().to_vec();
        for ch in 0..c {
            let (m, s) = (self.mean[ch], self.std[ch]);
            for v in out[ch * h * w..(ch + 1) * h * w].iter_mut() {
                *v = (*v - m) / s;
            }
        }
        Tensor::from_vec(values.shape(), out)
    }

    pub fn invert(&self, values: &Tensor<f32>) -> Result<Tensor<f32>> {
        let (c, h, w) = values.dims3()?;
        self.check(c)?;
        let mut out = values.data().to_vec();
        for ch in 0..c {
            let (m, s) = (self.mean[ch], self.std[ch]);
            for v in out[ch * h * w..(ch + 1) * h * w].iter_mut() {
                *v = *v * s + m;
            }
        }
        Tensor::from_vec(values.shape(), out)
    }

    pub fn apply_scalar(&self, ch: usize, v: f32) -> f32 {
        (v - self.mean[ch]) / self.std[ch]
    }

    fn check(&self, c: usize) -> Result<()> {
        if c != self.n_channels() {
            return Err(Error::Dimension(format!(
                "normalizer fitted for {} channels, frame has {c}",
                self.n_channels()
            )));
        }
        Ok(())
    }
}
