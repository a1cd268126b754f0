//! Reverse-mode autodiff over a recorded tape of primitive applications.
//!
//! Nodes are appended in execution order, so recording order is a topological
//! order and backward is a single reverse sweep. Saved activations live either
//! in the node values themselves or in the op record (layer-norm statistics,
//! dropout masks).

use std::sync::Arc;

use indexmap::IndexMap;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::kernels as k;
use super::kernels::LayerNormSaved;
use super::{Scalar, Tensor};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct NodeId(pub(crate) usize);

enum Rec<T: Scalar> {
    Leaf,
    Matmul { a: NodeId, b: NodeId },
    Conv2dCircular { input: NodeId, kernel: NodeId, stride: usize },
    Conv2dTransposed { input: NodeId, kernel: NodeId, stride: usize, out_h: usize, out_w: usize },
    UpsampleBilinear { input: NodeId, factor: usize },
    LayerNorm { input: NodeId, gain: NodeId, bias: NodeId, saved: LayerNormSaved<T> },
    ScatterSum { values: NodeId, index: Arc<Vec<usize>>, n: usize },
    GatherRows { values: NodeId, index: Arc<Vec<usize>> },
    Add { a: NodeId, b: NodeId },
    Sub { a: NodeId, b: NodeId },
    Mul { a: NodeId, b: NodeId },
    Scale { input: NodeId, factor: T },
    AddRowBroadcast { input: NodeId, bias: NodeId },
    AddChannelBias { input: NodeId, bias: NodeId },
    Sigmoid { input: NodeId },
    Tanh { input: NodeId },
    ConcatCols { parts: Vec<NodeId>, widths: Vec<usize> },
    Transpose2d { input: NodeId },
    MeanAll { input: NodeId },
    MeanSpatial { input: NodeId },
    CropHw { input: NodeId, in_h: usize, in_w: usize },
    Reshape { input: NodeId, in_shape: Vec<usize> },
    Dropout { input: NodeId, mask: Tensor<T> },
    WeightedMse { pred: NodeId, target: NodeId, weights: Arc<Vec<T>> },
}

struct Node<T: Scalar> {
    value: Tensor<T>,
    rec: Rec<T>,
}

/// Recorded computation graph. Single-owner during recording and backward.
pub struct Graph<T: Scalar> {
    nodes: Vec<Node<T>>,
    params: Vec<(NodeId, String)>,
    train_mode: bool,
    rng: Option<ChaCha8Rng>,
}

impl<T: Scalar> Default for Graph<T> {
    fn default() -> Self {
        Self::new()
    }
}

impl<T: Scalar> Graph<T> {
    /// Evaluation-mode graph: dropout is the identity.
    pub fn new() -> Self {
        Graph { nodes: Vec::new(), params: Vec::new(), train_mode: false, rng: None }
    }

    /// Training-mode graph; the seed drives dropout masks.
    pub fn training(seed: u64) -> Self {
        Graph {
            nodes: Vec::new(),
            params: Vec::new(),
            train_mode: true,
            rng: Some(ChaCha8Rng::seed_from_u64(seed)),
        }
    }

    pub fn is_training(&self) -> bool {
        self.train_mode
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn value(&self, id: NodeId) -> &Tensor<T> {
        &self.nodes[id.0].value
    }

    fn push(&mut self, value: Tensor<T>, rec: Rec<T>) -> NodeId {
        self.nodes.push(Node { value, rec });
        NodeId(self.nodes.len() - 1)
    }

    /// Leaf with no gradient tracking.
    pub fn constant(&mut self, value: Tensor<T>) -> NodeId {
        self.push(value, Rec::Leaf)
    }

    /// Leaf registered as a named trainable parameter.
    pub fn param(&mut self, name: &str, value: Tensor<T>) -> NodeId {
        debug_assert!(
            self.params.iter().all(|(_, n)| n != name),
            "parameter {name} bound twice"
        );
        let id = self.push(value, Rec::Leaf);
        self.params.push((id, name.to_string()));
        id
    }

    // -- primitive ops ------------------------------------------------------

    pub fn matmul(&mut self, a: NodeId, b: NodeId) -> Result<NodeId> {
        let v = k::matmul(self.value(a), self.value(b))?;
        Ok(self.push(v, Rec::Matmul { a, b }))
    }

    /// Circular-in-longitude convolution; the public contract requires odd
    /// kernel extents so "same" padding is well defined.
    pub fn conv2d_circular(&mut self, input: NodeId, kernel: NodeId, stride: usize) -> Result<NodeId> {
        let (_, _, kh, kw) = self.value(kernel).dims4()?;
        if kh % 2 == 0 || kw % 2 == 0 {
            return Err(Error::Dimension(format!(
                "conv2d_circular: kernel extents must be odd, got {}x{}",
                kh, kw
            )));
        }
        let v = k::conv2d_general(self.value(input), self.value(kernel), stride)?;
        Ok(self.push(v, Rec::Conv2dCircular { input, kernel, stride }))
    }

    /// Adjoint of the strided circular convolution: maps `[O, ceil(H/s),
    /// ceil(W/s)]` back to `[C, H, W]` such that `<conv(x), y> == <x,
    /// conv_transposed(y)>` for the same kernel and stride.
    pub fn conv2d_transposed(
        &mut self,
        input: NodeId,
        kernel: NodeId,
        stride: usize,
        out_h: usize,
        out_w: usize,
    ) -> Result<NodeId> {
        if stride == 0 {
            return Err(Error::Argument("conv2d_transposed: stride must be >= 1".into()));
        }
        let v = k::conv2d_input_vjp(self.value(input), self.value(kernel), stride, out_h, out_w)?;
        Ok(self.push(v, Rec::Conv2dTransposed { input, kernel, stride, out_h, out_w }))
    }

    pub fn upsample_bilinear(&mut self, input: NodeId, factor: usize) -> Result<NodeId> {
        let v = k::upsample_bilinear(self.value(input), factor)?;
        Ok(self.push(v, Rec::UpsampleBilinear { input, factor }))
    }

    pub fn layer_norm(&mut self, input: NodeId, gain: NodeId, bias: NodeId) -> Result<NodeId> {
        let (v, saved) = k::layer_norm(self.value(input), self.value(gain), self.value(bias))?;
        Ok(self.push(v, Rec::LayerNorm { input, gain, bias, saved }))
    }

    pub fn scatter_sum(&mut self, values: NodeId, index: Arc<Vec<usize>>, n: usize) -> Result<NodeId> {
        let v = k::scatter_sum(self.value(values), &index, n)?;
        Ok(self.push(v, Rec::ScatterSum { values, index, n }))
    }

    pub fn gather_rows(&mut self, values: NodeId, index: Arc<Vec<usize>>) -> Result<NodeId> {
        let v = k::gather_rows(self.value(values), &index)?;
        Ok(self.push(v, Rec::GatherRows { values, index }))
    }

    pub fn add(&mut self, a: NodeId, b: NodeId) -> Result<NodeId> {
        let v = k::ew_add(self.value(a), self.value(b))?;
        Ok(self.push(v, Rec::Add { a, b }))
    }

    pub fn sub(&mut self, a: NodeId, b: NodeId) -> Result<NodeId> {
        let v = k::ew_sub(self.value(a), self.value(b))?;
        Ok(self.push(v, Rec::Sub { a, b }))
    }

    pub fn mul(&mut self, a: NodeId, b: NodeId) -> Result<NodeId> {
        let v = k::ew_mul(self.value(a), self.value(b))?;
        Ok(self.push(v, Rec::Mul { a, b }))
    }

    pub fn scale(&mut self, input: NodeId, factor: T) -> NodeId {
        let v = k::scale(self.value(input), factor);
        self.push(v, Rec::Scale { input, factor })
    }

    pub fn add_row_broadcast(&mut self, input: NodeId, bias: NodeId) -> Result<NodeId> {
        let v = k::add_row_broadcast(self.value(input), self.value(bias))?;
        Ok(self.push(v, Rec::AddRowBroadcast { input, bias }))
    }

    pub fn add_channel_bias(&mut self, input: NodeId, bias: NodeId) -> Result<NodeId> {
        let v = k::add_channel_bias(self.value(input), self.value(bias))?;
        Ok(self.push(v, Rec::AddChannelBias { input, bias }))
    }

    pub fn sigmoid(&mut self, input: NodeId) -> NodeId {
        let v = k::sigmoid(self.value(input));
        self.push(v, Rec::Sigmoid { input })
    }

    pub fn tanh(&mut self, input: NodeId) -> NodeId {
        let v = k::tanh_t(self.value(input));
        self.push(v, Rec::Tanh { input })
    }

    /// swish/SiLU, composed from primitives.
    pub fn silu(&mut self, input: NodeId) -> Result<NodeId> {
        let s = self.sigmoid(input);
        self.mul(input, s)
    }

    pub fn concat_cols(&mut self, parts: &[NodeId]) -> Result<NodeId> {
        let tensors: Vec<&Tensor<T>> = parts.iter().map(|&p| self.value(p)).collect();
        let widths: Vec<usize> = tensors.iter().map(|t| t.shape()[1]).collect();
        let v = k::concat_cols(&tensors)?;
        Ok(self.push(v, Rec::ConcatCols { parts: parts.to_vec(), widths }))
    }

    pub fn transpose2d(&mut self, input: NodeId) -> Result<NodeId> {
        let v = k::transpose2d(self.value(input))?;
        Ok(self.push(v, Rec::Transpose2d { input }))
    }

    pub fn mean_all(&mut self, input: NodeId) -> Result<NodeId> {
        let v = k::mean_all(self.value(input))?;
        Ok(self.push(v, Rec::MeanAll { input }))
    }

    pub fn mean_spatial(&mut self, input: NodeId) -> Result<NodeId> {
        let v = k::mean_spatial(self.value(input))?;
        Ok(self.push(v, Rec::MeanSpatial { input }))
    }

    pub fn crop_hw(&mut self, input: NodeId, h: usize, w: usize) -> Result<NodeId> {
        let (_, in_h, in_w) = self.value(input).dims3()?;
        let v = k::crop_hw(self.value(input), h, w)?;
        Ok(self.push(v, Rec::CropHw { input, in_h, in_w }))
    }

    pub fn reshape(&mut self, input: NodeId, shape: &[usize]) -> Result<NodeId> {
        let in_shape = self.value(input).shape().to_vec();
        let v = self.value(input).reshape(shape)?;
        Ok(self.push(v, Rec::Reshape { input, in_shape }))
    }

    /// Inverted dropout. Identity in evaluation mode or at rate 0.
    pub fn dropout(&mut self, input: NodeId, rate: f64) -> Result<NodeId> {
        if !(0.0..1.0).contains(&rate) {
            return Err(Error::Argument(format!("dropout: rate {rate} outside [0, 1)")));
        }
        if !self.train_mode || rate == 0.0 {
            return Ok(input);
        }
        let rng = self
            .rng
            .as_mut()
            .ok_or_else(|| Error::Argument("dropout: training graph built without a seed".into()))?;
        let keep = T::of(1.0 / (1.0 - rate));
        let mask_data: Vec<T> = (0..self.nodes[input.0].value.numel())
            .map(|_| if rng.random::<f64>() < rate { T::zero() } else { keep })
            .collect();
        let mask = Tensor::from_vec(self.nodes[input.0].value.shape(), mask_data)?;
        let v = k::ew_mul(self.value(input), &mask)?;
        Ok(self.push(v, Rec::Dropout { input, mask }))
    }

    /// Channel-weighted MSE between `[N, C]` predictions and targets,
    /// normalized by the weight sum.
    pub fn weighted_mse(&mut self, pred: NodeId, target: NodeId, weights: Arc<Vec<T>>) -> Result<NodeId> {
        let v = k::weighted_mse(self.value(pred), self.value(target), &weights)?;
        Ok(self.push(v, Rec::WeightedMse { pred, target, weights }))
    }

    /// One LSTM cell step: sigmoid gates, tanh candidate and output
    /// nonlinearity. Composed from primitives so the gradient is exact by
    /// construction. `x: [B, d]`, `h, c: [B, k]`.
    pub fn lstm_cell(
        &mut self,
        x: NodeId,
        h: NodeId,
        c: NodeId,
        p: &LstmCellIds,
    ) -> Result<(NodeId, NodeId)> {
        let gate_pre = |g: &mut Graph<T>, w: NodeId, u: NodeId, b: NodeId| -> Result<NodeId> {
            let xw = g.matmul(x, w)?;
            let hu = g.matmul(h, u)?;
            let s = g.add(xw, hu)?;
            g.add_row_broadcast(s, b)
        };
        let i_pre = gate_pre(self, p.w_i, p.u_i, p.b_i)?;
        let f_pre = gate_pre(self, p.w_f, p.u_f, p.b_f)?;
        let o_pre = gate_pre(self, p.w_o, p.u_o, p.b_o)?;
        let g_pre = gate_pre(self, p.w_g, p.u_g, p.b_g)?;
        let i = self.sigmoid(i_pre);
        let f = self.sigmoid(f_pre);
        let o = self.sigmoid(o_pre);
        let g = self.tanh(g_pre);
        let fc = self.mul(f, c)?;
        let ig = self.mul(i, g)?;
        let c_next = self.add(fc, ig)?;
        let ct = self.tanh(c_next);
        let h_next = self.mul(o, ct)?;
        Ok((h_next, c_next))
    }

    // -- backward -----------------------------------------------------------

    /// Reverse-mode sweep from a scalar loss node. Returns one gradient per
    /// registered parameter; parameters the loss never touched get zeros.
    pub fn backward(&self, loss: NodeId) -> Result<IndexMap<String, Tensor<T>>> {
        if self.value(loss).numel() != 1 {
            return Err(Error::Argument(format!(
                "backward: loss must be scalar, got shape {:?}",
                self.value(loss).shape()
            )));
        }
        let mut grads: Vec<Option<Tensor<T>>> = (0..self.nodes.len()).map(|_| None).collect();
        grads[loss.0] = Some(Tensor::full(self.value(loss).shape(), T::one()));

        for id in (0..=loss.0).rev() {
            let Some(g) = grads[id].take() else { continue };
            match &self.nodes[id].rec {
                Rec::Leaf => {
                    grads[id] = Some(g);
                    continue;
                }
                Rec::Matmul { a, b } => {
                    let (ga, gb) = k::matmul_vjp(self.value(*a), self.value(*b), &g)?;
                    accum(&mut grads[a.0], ga);
                    accum(&mut grads[b.0], gb);
                }
                Rec::Conv2dCircular { input, kernel, stride } => {
                    let (_, h, w) = self.value(*input).dims3()?;
                    let (_, _, kh, kw) = self.value(*kernel).dims4()?;
                    let gi = k::conv2d_input_vjp(&g, self.value(*kernel), *stride, h, w)?;
                    let gk = k::conv2d_kernel_vjp(self.value(*input), &g, *stride, kh, kw)?;
                    accum(&mut grads[input.0], gi);
                    accum(&mut grads[kernel.0], gk);
                }
                Rec::Conv2dTransposed { input, kernel, stride, .. } => {
                    // Forward was the conv adjoint, so the input gradient is
                    // the convolution itself and the kernel gradient swaps the
                    // roles of input and upstream.
                    let (_, _, kh, kw) = self.value(*kernel).dims4()?;
                    let gi = k::conv2d_general(&g, self.value(*kernel), *stride)?;
                    let gk = k::conv2d_kernel_vjp(&g, self.value(*input), *stride, kh, kw)?;
                    accum(&mut grads[input.0], gi);
                    accum(&mut grads[kernel.0], gk);
                }
                Rec::UpsampleBilinear { input, factor } => {
                    let (_, h, w) = self.value(*input).dims3()?;
                    let gi = k::upsample_bilinear_vjp(&g, *factor, h, w)?;
                    accum(&mut grads[input.0], gi);
                }
                Rec::LayerNorm { input, gain, bias, saved } => {
                    let (gx, gg, gb) = k::layer_norm_vjp(self.value(*input), self.value(*gain), saved, &g)?;
                    accum(&mut grads[input.0], gx);
                    accum(&mut grads[gain.0], gg);
                    accum(&mut grads[bias.0], gb);
                }
                Rec::ScatterSum { values, index, .. } => {
                    let gv = k::gather_rows(&g, index)?;
                    accum(&mut grads[values.0], gv);
                }
                Rec::GatherRows { values, index } => {
                    let n = self.value(*values).shape()[0];
                    let gv = k::scatter_sum(&g, index, n)?;
                    accum(&mut grads[values.0], gv);
                }
                Rec::Add { a, b } => {
                    accum(&mut grads[a.0], g.clone());
                    accum(&mut grads[b.0], g);
                }
                Rec::Sub { a, b } => {
                    accum(&mut grads[a.0], g.clone());
                    accum(&mut grads[b.0], k::scale(&g, -T::one()));
                }
                Rec::Mul { a, b } => {
                    let ga = k::ew_mul(&g, self.value(*b))?;
                    let gb = k::ew_mul(&g, self.value(*a))?;
                    accum(&mut grads[a.0], ga);
                    accum(&mut grads[b.0], gb);
                }
                Rec::Scale { input, factor } => {
                    accum(&mut grads[input.0], k::scale(&g, *factor));
                }
                Rec::AddRowBroadcast { input, bias } => {
                    accum(&mut grads[input.0], g.clone());
                    accum(&mut grads[bias.0], k::col_sums(&g)?);
                }
                Rec::AddChannelBias { input, bias } => {
                    accum(&mut grads[input.0], g.clone());
                    accum(&mut grads[bias.0], k::channel_sums(&g)?);
                }
                Rec::Sigmoid { input } => {
                    let y = &self.nodes[id].value;
                    let gi = Tensor::from_vec(
                        y.shape(),
                        g.data()
                            .iter()
                            .zip(y.data())
                            .map(|(&gv, &yv)| gv * yv * (T::one() - yv))
                            .collect(),
                    )?;
                    accum(&mut grads[input.0], gi);
                }
                Rec::Tanh { input } => {
                    let y = &self.nodes[id].value;
                    let gi = Tensor::from_vec(
                        y.shape(),
                        g.data()
                            .iter()
                            .zip(y.data())
                            .map(|(&gv, &yv)| gv * (T::one() - yv * yv))
                            .collect(),
                    )?;
                    accum(&mut grads[input.0], gi);
                }
                Rec::ConcatCols { parts, widths } => {
                    let (n, total) = g.dims2()?;
                    let mut off = 0;
                    for (part, &w) in parts.iter().zip(widths) {
                        let mut block = vec![T::zero(); n * w];
                        for r in 0..n {
                            block[r * w..(r + 1) * w]
                                .copy_from_slice(&g.data()[r * total + off..r * total + off + w]);
                        }
                        accum(&mut grads[part.0], Tensor::from_vec(&[n, w], block)?);
                        off += w;
                    }
                }
                Rec::Transpose2d { input } => {
                    accum(&mut grads[input.0], k::transpose2d(&g)?);
                }
                Rec::MeanAll { input } => {
                    let x = self.value(*input);
                    let gv = g.item()? * T::of(1.0 / x.numel() as f64);
                    accum(&mut grads[input.0], Tensor::full(x.shape(), gv));
                }
                Rec::MeanSpatial { input } => {
                    let (c, h, w) = self.value(*input).dims3()?;
                    let inv = T::of(1.0 / (h * w) as f64);
                    let mut gi = vec![T::zero(); c * h * w];
                    for ic in 0..c {
                        let gv = g.data()[ic] * inv;
                        for slot in gi[ic * h * w..(ic + 1) * h * w].iter_mut() {
                            *slot = gv;
                        }
                    }
                    accum(&mut grads[input.0], Tensor::from_vec(&[c, h, w], gi)?);
                }
                Rec::CropHw { input, in_h, in_w } => {
                    accum(&mut grads[input.0], k::crop_hw_vjp(&g, *in_h, *in_w)?);
                }
                Rec::Reshape { input, in_shape } => {
                    accum(&mut grads[input.0], g.reshape(in_shape)?);
                }
                Rec::Dropout { input, mask } => {
                    accum(&mut grads[input.0], k::ew_mul(&g, mask)?);
                }
                Rec::WeightedMse { pred, target, weights } => {
                    let (gp, gt) =
                        k::weighted_mse_vjp(self.value(*pred), self.value(*target), weights, g.item()?)?;
                    accum(&mut grads[pred.0], gp);
                    accum(&mut grads[target.0], gt);
                }
            }
        }

        let mut out = IndexMap::new();
        for (id, name) in &self.params {
            let g = grads[id.0]
                .take()
                .unwrap_or_else(|| Tensor::zeros(self.value(*id).shape()));
            out.insert(name.clone(), g);
        }
        Ok(out)
    }

    /// Recomputes every node value from the recorded ops and leaf values.
    /// Used by the bit-reproducibility checks; dropout replays its saved mask.
    pub fn replay(&self) -> Result<Vec<Tensor<T>>> {
        let mut vals: Vec<Tensor<T>> = Vec::with_capacity(self.nodes.len());
        for node in &self.nodes {
            let v = match &node.rec {
                Rec::Leaf => node.value.clone(),
                Rec::Matmul { a, b } => k::matmul(&vals[a.0], &vals[b.0])?,
                Rec::Conv2dCircular { input, kernel, stride } => {
                    k::conv2d_general(&vals[input.0], &vals[kernel.0], *stride)?
                }
                Rec::Conv2dTransposed { input, kernel, stride, out_h, out_w } => {
                    k::conv2d_input_vjp(&vals[input.0], &vals[kernel.0], *stride, *out_h, *out_w)?
                }
                Rec::UpsampleBilinear { input, factor } => {
                    k::upsample_bilinear(&vals[input.0], *factor)?
                }
                Rec::LayerNorm { input, gain, bias, .. } => {
                    k::layer_norm(&vals[input.0], &vals[gain.0], &vals[bias.0])?.0
                }
                Rec::ScatterSum { values, index, n } => k::scatter_sum(&vals[values.0], index, *n)?,
                Rec::GatherRows { values, index } => k::gather_rows(&vals[values.0], index)?,
                Rec::Add { a, b } => k::ew_add(&vals[a.0], &vals[b.0])?,
                Rec::Sub { a, b } => k::ew_sub(&vals[a.0], &vals[b.0])?,
                Rec::Mul { a, b } => k::ew_mul(&vals[a.0], &vals[b.0])?,
                Rec::Scale { input, factor } => k::scale(&vals[input.0], *factor),
                Rec::AddRowBroadcast { input, bias } => {
                    k::add_row_broadcast(&vals[input.0], &vals[bias.0])?
                }
                Rec::AddChannelBias { input, bias } => {
                    k::add_channel_bias(&vals[input.0], &vals[bias.0])?
                }
                Rec::Sigmoid { input } => k::sigmoid(&vals[input.0]),
                Rec::Tanh { input } => k::tanh_t(&vals[input.0]),
                Rec::ConcatCols { parts, .. } => {
                    let tensors: Vec<&Tensor<T>> = parts.iter().map(|p| &vals[p.0]).collect();
                    k::concat_cols(&tensors)?
                }
                Rec::Transpose2d { input } => k::transpose2d(&vals[input.0])?,
                Rec::MeanAll { input } => k::mean_all(&vals[input.0])?,
                Rec::MeanSpatial { input } => k::mean_spatial(&vals[input.0])?,
                Rec::CropHw { input, .. } => {
                    let (_, h, w) = node.value.dims3()?;
                    k::crop_hw(&vals[input.0], h, w)?
                }
                Rec::Reshape { input, .. } => vals[input.0].reshape(node.value.shape())?,
                Rec::Dropout { input, mask } => k::ew_mul(&vals[input.0], mask)?,
                Rec::WeightedMse { pred, target, weights } => {
                    k::weighted_mse(&vals[pred.0], &vals[target.0], weights)?
                }
            };
            vals.push(v);
        }
        Ok(vals)
    }
}

/// Gate parameter node ids for one LSTM cell.
pub struct LstmCellIds {
    pub w_i: NodeId,
    pub u_i: NodeId,
    pub b_i: NodeId,
    pub w_f: NodeId,
    pub u_f: NodeId,
    pub b_f: NodeId,
    pub w_o: NodeId,
    pub u_o: NodeId,
    pub b_o: NodeId,
    pub w_g: NodeId,
    pub u_g: NodeId,
    pub b_g: NodeId,
}

fn accum<T: Scalar>(slot: &mut Option<Tensor<T>>, add: Tensor<T>) {
    match slot {
        None => *slot = Some(add),
        Some(existing) => {
            debug_assert_eq!(existing.shape(), add.shape());
            for (e, a) in existing.data_mut().iter_mut().zip(add.data()) {
                *e += *a;
            }
        }
    }
}
