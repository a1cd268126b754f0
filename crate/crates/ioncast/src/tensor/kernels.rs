//! Forward and vector-Jacobian-product kernels for the graph primitives.
//!
//! Everything here is pure: outputs depend only on inputs, and summation
//! orders are fixed so repeated runs are bit-reproducible regardless of the
//! rayon thread count (parallelism is only ever over disjoint output slices).

use rayon::prelude::*;

use super::{same_shape, Scalar, Tensor};
use crate::error::{Error, Result};

const PAR_FLOPS_THRESHOLD: usize = 1 << 15;

// ---------------------------------------------------------------------------
// matmul
// ---------------------------------------------------------------------------

pub fn matmul<T: Scalar>(a: &Tensor<T>, b: &Tensor<T>) -> Result<Tensor<T>> {
    let (m, k) = a.dims2()?;
    let (k2, n) = b.dims2()?;
    if k != k2 {
        return Err(Error::Dimension(format!(
            "matmul: inner extents differ, lhs {:?} vs rhs {:?}",
            a.shape(),
            b.shape()
        )));
    }
    let mut out = vec![T::zero(); m * n];
    let ad = a.data();
    let bd = b.data();
    let row_job = |(i, orow): (usize, &mut [T])| {
        let arow = &ad[i * k..(i + 1) * k];
        for (kk, &av) in arow.iter().enumerate() {
            let brow = &bd[kk * n..(kk + 1) * n];
            for (o, &bv) in orow.iter_mut().zip(brow.iter()) {
                *o += av * bv;
            }
        }
    };
    if m * n * k >= PAR_FLOPS_THRESHOLD && m > 1 {
        out.par_chunks_mut(n).enumerate().for_each(row_job);
    } else {
        out.chunks_mut(n).enumerate().for_each(row_job);
    }
    Tensor::from_vec(&[m, n], out)
}

pub fn transpose2d<T: Scalar>(x: &Tensor<T>) -> Result<Tensor<T>> {
    let (m, n) = x.dims2()?;
    let xd = x.data();
    let mut out = vec![T::zero(); m * n];
    for i in 0..m {
        for j in 0..n {
            out[j * m + i] = xd[i * n + j];
        }
    }
    Tensor::from_vec(&[n, m], out)
}

pub fn matmul_vjp<T: Scalar>(
    a: &Tensor<T>,
    b: &Tensor<T>,
    gout: &Tensor<T>,
) -> Result<(Tensor<T>, Tensor<T>)> {
    let ga = matmul(gout, &transpose2d(b)?)?;
    let gb = matmul(&transpose2d(a)?, gout)?;
    Ok((ga, gb))
}

// ---------------------------------------------------------------------------
// circular convolution (periodic in W, zero-padded in H)
// ---------------------------------------------------------------------------

fn conv_check<T: Scalar>(
    input: &Tensor<T>,
    kernel: &Tensor<T>,
    stride: usize,
) -> Result<(usize, usize, usize, usize, usize, usize)> {
    let (c, h, w) = input.dims3()?;
    let (o, kc, kh, kw) = kernel.dims4()?;
    if kc != c {
        return Err(Error::Dimension(format!(
            "conv2d: input {:?} has {} channels but kernel {:?} expects {}",
            input.shape(),
            c,
            kernel.shape(),
            kc
        )));
    }
    if stride == 0 {
        return Err(Error::Argument("conv2d: stride must be >= 1".into()));
    }
    if kw > w {
        return Err(Error::Dimension(format!(
            "conv2d: kernel {:?} wider than the circularly padded input {:?}",
            kernel.shape(),
            input.shape()
        )));
    }
    Ok((c, h, w, o, kh, kw))
}

#[inline]
fn wrap_col(raw: isize, w: usize) -> usize {
    raw.rem_euclid(w as isize) as usize
}

/// Strided 2-D convolution with circular padding along the last (longitude)
/// axis and zero padding along the second (latitude) axis. Accepts any kernel
/// extent; the public graph op restricts to odd kernels. Output spatial size
/// is `ceil(H/stride) x ceil(W/stride)`.
pub fn conv2d_general<T: Scalar>(
    input: &Tensor<T>,
    kernel: &Tensor<T>,
    stride: usize,
) -> Result<Tensor<T>> {
    let (c, h, w, o, kh, kw) = conv_check(input, kernel, stride)?;
    let oh = h.div_ceil(stride);
    let ow = w.div_ceil(stride);
    let pt = ((kh - 1) / 2) as isize;
    let pl = ((kw - 1) / 2) as isize;
    let xd = input.data();
    let kd = kernel.data();
    let mut out = vec![T::zero(); o * oh * ow];

    let chan_job = |(oc, oplane): (usize, &mut [T])| {
        for i in 0..oh {
            for j in 0..ow {
                let mut acc = T::zero();
                for ic in 0..c {
                    let xplane = &xd[ic * h * w..(ic + 1) * h * w];
                    let kplane = &kd[(oc * c + ic) * kh * kw..(oc * c + ic + 1) * kh * kw];
                    for u in 0..kh {
                        let row = (i * stride + u) as isize - pt;
                        if row < 0 || row >= h as isize {
                            continue;
                        }
                        let xrow = &xplane[row as usize * w..(row as usize + 1) * w];
                        let krow = &kplane[u * kw..(u + 1) * kw];
                        for (v, &kv) in krow.iter().enumerate() {
                            let col = wrap_col((j * stride + v) as isize - pl, w);
                            acc += xrow[col] * kv;
                        }
                    }
                }
                oplane[i * ow + j] = acc;
            }
        }
    };
    if o * oh * ow * c * kh * kw >= PAR_FLOPS_THRESHOLD && o > 1 {
        out.par_chunks_mut(oh * ow).enumerate().for_each(chan_job);
    } else {
        out.chunks_mut(oh * ow).enumerate().for_each(chan_job);
    }
    Tensor::from_vec(&[o, oh, ow], out)
}

/// Gradient of `conv2d_general` with respect to its input. Also serves as the
/// forward pass of the transposed convolution (it IS the adjoint map).
pub fn conv2d_input_vjp<T: Scalar>(
    gout: &Tensor<T>,
    kernel: &Tensor<T>,
    stride: usize,
    input_h: usize,
    input_w: usize,
) -> Result<Tensor<T>> {
    let (o, oh, ow) = gout.dims3()?;
    let (ko, c, kh, kw) = kernel.dims4()?;
    if ko != o {
        return Err(Error::Dimension(format!(
            "conv2d adjoint: upstream {:?} has {} channels but kernel {:?} produces {}",
            gout.shape(),
            o,
            kernel.shape(),
            ko
        )));
    }
    if oh != input_h.div_ceil(stride) || ow != input_w.div_ceil(stride) {
        return Err(Error::Dimension(format!(
            "conv2d adjoint: output {:?} inconsistent with input {}x{} at stride {}",
            gout.shape(),
            input_h,
            input_w,
            stride
        )));
    }
    if kw > input_w {
        return Err(Error::Dimension(format!(
            "conv2d adjoint: kernel {:?} wider than the circularly padded input {}x{}",
            kernel.shape(),
            input_h,
            input_w
        )));
    }
    let pt = ((kh - 1) / 2) as isize;
    let pl = ((kw - 1) / 2) as isize;
    let gd = gout.data();
    let kd = kernel.data();
    let mut gin = vec![T::zero(); c * input_h * input_w];

    // Sequential scatter in fixed (o, i, j, c, u, v) order keeps the
    // accumulation deterministic.
    for oc in 0..o {
        let gplane = &gd[oc * oh * ow..(oc + 1) * oh * ow];
        for i in 0..oh {
            for j in 0..ow {
                let g = gplane[i * ow + j];
                for ic in 0..c {
                    let kplane = &kd[(oc * c + ic) * kh * kw..(oc * c + ic + 1) * kh * kw];
                    let iplane = &mut gin[ic * input_h * input_w..(ic + 1) * input_h * input_w];
                    for u in 0..kh {
                        let row = (i * stride + u) as isize - pt;
                        if row < 0 || row >= input_h as isize {
                            continue;
                        }
                        for v in 0..kw {
                            let col = wrap_col((j * stride + v) as isize - pl, input_w);
                            iplane[row as usize * input_w + col] += g * kplane[u * kw + v];
                        }
                    }
                }
            }
        }
    }
    Tensor::from_vec(&[c, input_h, input_w], gin)
}

/// Gradient of `conv2d_general` with respect to the kernel.
pub fn conv2d_kernel_vjp<T: Scalar>(
    input: &Tensor<T>,
    gout: &Tensor<T>,
    stride: usize,
    kh: usize,
    kw: usize,
) -> Result<Tensor<T>> {
    let (c, h, w) = input.dims3()?;
    let (o, oh, ow) = gout.dims3()?;
    let pt = ((kh - 1) / 2) as isize;
    let pl = ((kw - 1) / 2) as isize;
    let xd = input.data();
    let gd = gout.data();
    let mut gk = vec![T::zero(); o * c * kh * kw];
    for oc in 0..o {
        let gplane = &gd[oc * oh * ow..(oc + 1) * oh * ow];
        for ic in 0..c {
            let xplane = &xd[ic * h * w..(ic + 1) * h * w];
            let kplane = &mut gk[(oc * c + ic) * kh * kw..(oc * c + ic + 1) * kh * kw];
            for u in 0..kh {
                for v in 0..kw {
                    let mut acc = T::zero();
                    for i in 0..oh {
                        let row = (i * stride + u) as isize - pt;
                        if row < 0 || row >= h as isize {
                            continue;
                        }
                        let xrow = &xplane[row as usize * w..(row as usize + 1) * w];
                        let grow = &gplane[i * ow..(i + 1) * ow];
                        for (j, &g) in grow.iter().enumerate() {
                            let col = wrap_col((j * stride + v) as isize - pl, w);
                            acc += g * xrow[col];
                        }
                    }
                    kplane[u * kw + v] = acc;
                }
            }
        }
    }
    Tensor::from_vec(&[o, c, kh, kw], gk)
}

// ---------------------------------------------------------------------------
// bilinear upsampling (cell-center convention, factor >= 1)
// ---------------------------------------------------------------------------

struct BilinearTap {
    lo: usize,
    hi: usize,
    frac: f64,
}

fn bilinear_taps(out_len: usize, in_len: usize, factor: usize) -> Vec<BilinearTap> {
    (0..out_len)
        .map(|i| {
            let pos = (i as f64 + 0.5) / factor as f64 - 0.5;
            let floor = pos.floor();
            let frac = pos - floor;
            let lo = (floor as isize).clamp(0, in_len as isize - 1) as usize;
            let hi = (floor as isize + 1).clamp(0, in_len as isize - 1) as usize;
            BilinearTap { lo, hi, frac }
        })
        .collect()
}

pub fn upsample_bilinear<T: Scalar>(input: &Tensor<T>, factor: usize) -> Result<Tensor<T>> {
    if factor < 1 {
        return Err(Error::Argument("upsample_bilinear: factor must be >= 1".into()));
    }
    let (c, h, w) = input.dims3()?;
    let (oh, ow) = (h * factor, w * factor);
    let ys = bilinear_taps(oh, h, factor);
    let xs = bilinear_taps(ow, w, factor);
    let xd = input.data();
    let mut out = vec![T::zero(); c * oh * ow];
    for ic in 0..c {
        let plane = &xd[ic * h * w..(ic + 1) * h * w];
        let oplane = &mut out[ic * oh * ow..(ic + 1) * oh * ow];
        for (i, ty) in ys.iter().enumerate() {
            for (j, tx) in xs.iter().enumerate() {
                let fy = T::of(ty.frac);
                let fx = T::of(tx.frac);
                let one = T::one();
                let v = (one - fy) * (one - fx) * plane[ty.lo * w + tx.lo]
                    + (one - fy) * fx * plane[ty.lo * w + tx.hi]
                    + fy * (one - fx) * plane[ty.hi * w + tx.lo]
                    + fy * fx * plane[ty.hi * w + tx.hi];
                oplane[i * ow + j] = v;
            }
        }
    }
    Tensor::from_vec(&[c, oh, ow], out)
}

pub fn upsample_bilinear_vjp<T: Scalar>(
    gout: &Tensor<T>,
    factor: usize,
    in_h: usize,
    in_w: usize,
) -> Result<Tensor<T>> {
    let (c, oh, ow) = gout.dims3()?;
    let ys = bilinear_taps(oh, in_h, factor);
    let xs = bilinear_taps(ow, in_w, factor);
    let gd = gout.data();
    let mut gin = vec![T::zero(); c * in_h * in_w];
    for ic in 0..c {
        let gplane = &gd[ic * oh * ow..(ic + 1) * oh * ow];
        let iplane = &mut gin[ic * in_h * in_w..(ic + 1) * in_h * in_w];
        for (i, ty) in ys.iter().enumerate() {
            for (j, tx) in xs.iter().enumerate() {
                let g = gplane[i * ow + j];
                let fy = T::of(ty.frac);
                let fx = T::of(tx.frac);
                let one = T::one();
                iplane[ty.lo * in_w + tx.lo] += (one - fy) * (one - fx) * g;
                iplane[ty.lo * in_w + tx.hi] += (one - fy) * fx * g;
                iplane[ty.hi * in_w + tx.lo] += fy * (one - fx) * g;
                iplane[ty.hi * in_w + tx.hi] += fy * fx * g;
            }
        }
    }
    Tensor::from_vec(&[c, in_h, in_w], gin)
}

// ---------------------------------------------------------------------------
// layer norm (last axis, epsilon 1e-5 inside the square root)
// ---------------------------------------------------------------------------

pub const LAYER_NORM_EPS: f64 = 1e-5;

pub struct LayerNormSaved<T: Scalar> {
    pub mean: Vec<T>,
    pub inv_std: Vec<T>,
}

pub fn layer_norm<T: Scalar>(
    x: &Tensor<T>,
    gain: &Tensor<T>,
    bias: &Tensor<T>,
) -> Result<(Tensor<T>, LayerNormSaved<T>)> {
    let d = *x.shape().last().ok_or_else(|| {
        Error::Dimension("layer_norm: input must have at least one axis".into())
    })?;
    if gain.shape() != [d] || bias.shape() != [d] {
        return Err(Error::Dimension(format!(
            "layer_norm: gain {:?} / bias {:?} must both have shape [{}]",
            gain.shape(),
            bias.shape(),
            d
        )));
    }
    let rows = x.numel() / d;
    let xd = x.data();
    let gd = gain.data();
    let bd = bias.data();
    let mut out = vec![T::zero(); x.numel()];
    let mut mean = vec![T::zero(); rows];
    let mut inv_std = vec![T::zero(); rows];
    let inv_d = T::of(1.0 / d as f64);
    let eps = T::of(LAYER_NORM_EPS);
    for r in 0..rows {
        let row = &xd[r * d..(r + 1) * d];
        let mut mu = T::zero();
        for &v in row {
            mu += v;
        }
        mu *= inv_d;
        let mut var = T::zero();
        for &v in row {
            let c = v - mu;
            var += c * c;
        }
        var *= inv_d;
        let is = T::one() / (var + eps).sqrt();
        mean[r] = mu;
        inv_std[r] = is;
        let orow = &mut out[r * d..(r + 1) * d];
        for ((o, &v), (&g, &b)) in orow.iter_mut().zip(row).zip(gd.iter().zip(bd.iter())) {
            *o = (v - mu) * is * g + b;
        }
    }
    Ok((
        Tensor::from_vec(x.shape(), out)?,
        LayerNormSaved { mean, inv_std },
    ))
}

pub fn layer_norm_vjp<T: Scalar>(
    x: &Tensor<T>,
    gain: &Tensor<T>,
    saved: &LayerNormSaved<T>,
    gout: &Tensor<T>,
) -> Result<(Tensor<T>, Tensor<T>, Tensor<T>)> {
    let d = *x.shape().last().unwrap();
    let rows = x.numel() / d;
    let xd = x.data();
    let gd = gain.data();
    let od = gout.data();
    let mut gx = vec![T::zero(); x.numel()];
    let mut ggain = vec![T::zero(); d];
    let mut gbias = vec![T::zero(); d];
    let inv_d = T::of(1.0 / d as f64);
    for r in 0..rows {
        let row = &xd[r * d..(r + 1) * d];
        let grow = &od[r * d..(r + 1) * d];
        let mu = saved.mean[r];
        let is = saved.inv_std[r];
        // xhat = (x - mu) * inv_std; dL/dxhat = gout * gain
        let mut mean_dxhat = T::zero();
        let mut mean_dxhat_xhat = T::zero();
        for k in 0..d {
            let xhat = (row[k] - mu) * is;
            let dxhat = grow[k] * gd[k];
            mean_dxhat += dxhat;
            mean_dxhat_xhat += dxhat * xhat;
            ggain[k] += grow[k] * xhat;
            gbias[k] += grow[k];
        }
        mean_dxhat *= inv_d;
        mean_dxhat_xhat *= inv_d;
        let gxrow = &mut gx[r * d..(r + 1) * d];
        for k in 0..d {
            let xhat = (row[k] - mu) * is;
            let dxhat = grow[k] * gd[k];
            gxrow[k] = is * (dxhat - mean_dxhat - xhat * mean_dxhat_xhat);
        }
    }
    Ok((
        Tensor::from_vec(x.shape(), gx)?,
        Tensor::from_vec(&[d], ggain)?,
        Tensor::from_vec(&[d], gbias)?,
    ))
}

// ---------------------------------------------------------------------------
// scatter / gather over graph edges
// ---------------------------------------------------------------------------

/// Sums value rows into receiver slots. Accumulation runs in ascending edge
/// order so results are reproducible.
pub fn scatter_sum<T: Scalar>(values: &Tensor<T>, index: &[usize], n: usize) -> Result<Tensor<T>> {
    let (e, d) = values.dims2()?;
    if index.len() != e {
        return Err(Error::Dimension(format!(
            "scatter_sum: {} value rows but {} indices",
            e,
            index.len()
        )));
    }
    let mut out = vec![T::zero(); n * d];
    let vd = values.data();
    for (edge, &r) in index.iter().enumerate() {
        if r >= n {
            return Err(Error::Index(format!(
                "scatter_sum: edge {edge} targets receiver {r} but only {n} receivers exist"
            )));
        }
        let vrow = &vd[edge * d..(edge + 1) * d];
        let orow = &mut out[r * d..(r + 1) * d];
        for (o, &v) in orow.iter_mut().zip(vrow) {
            *o += v;
        }
    }
    Tensor::from_vec(&[n, d], out)
}

pub fn gather_rows<T: Scalar>(values: &Tensor<T>, index: &[usize]) -> Result<Tensor<T>> {
    let (n, d) = values.dims2()?;
    let vd = values.data();
    let mut out = vec![T::zero(); index.len() * d];
    for (edge, &r) in index.iter().enumerate() {
        if r >= n {
            return Err(Error::Index(format!(
                "gather_rows: edge {edge} reads row {r} but only {n} rows exist"
            )));
        }
        out[edge * d..(edge + 1) * d].copy_from_slice(&vd[r * d..(r + 1) * d]);
    }
    Tensor::from_vec(&[index.len(), d], out)
}

// ---------------------------------------------------------------------------
// elementwise and broadcast helpers
// ---------------------------------------------------------------------------

pub fn ew_add<T: Scalar>(a: &Tensor<T>, b: &Tensor<T>) -> Result<Tensor<T>> {
    same_shape(a, b, "add")?;
    let data = a.data().iter().zip(b.data()).map(|(&x, &y)| x + y).collect();
    Tensor::from_vec(a.shape(), data)
}

pub fn ew_sub<T: Scalar>(a: &Tensor<T>, b: &Tensor<T>) -> Result<Tensor<T>> {
    same_shape(a, b, "sub")?;
    let data = a.data().iter().zip(b.data()).map(|(&x, &y)| x - y).collect();
    Tensor::from_vec(a.shape(), data)
}

pub fn ew_mul<T: Scalar>(a: &Tensor<T>, b: &Tensor<T>) -> Result<Tensor<T>> {
    same_shape(a, b, "mul")?;
    let data = a.data().iter().zip(b.data()).map(|(&x, &y)| x * y).collect();
    Tensor::from_vec(a.shape(), data)
}

pub fn scale<T: Scalar>(a: &Tensor<T>, s: T) -> Tensor<T> {
    a.map(|x| x * s)
}

/// `[N, d] + [d]` row-broadcast add (dense layer bias).
pub fn add_row_broadcast<T: Scalar>(x: &Tensor<T>, bias: &Tensor<T>) -> Result<Tensor<T>> {
    let (n, d) = x.dims2()?;
    if bias.shape() != [d] {
        return Err(Error::Dimension(format!(
            "add_row_broadcast: input {:?} needs bias [{}], got {:?}",
            x.shape(),
            d,
            bias.shape()
        )));
    }
    let bd = bias.data();
    let mut out = x.data().to_vec();
    for r in 0..n {
        for (o, &b) in out[r * d..(r + 1) * d].iter_mut().zip(bd) {
            *o += b;
        }
    }
    Tensor::from_vec(x.shape(), out)
}

pub fn col_sums<T: Scalar>(x: &Tensor<T>) -> Result<Tensor<T>> {
    let (n, d) = x.dims2()?;
    let xd = x.data();
    let mut out = vec![T::zero(); d];
    for r in 0..n {
        for (o, &v) in out.iter_mut().zip(&xd[r * d..(r + 1) * d]) {
            *o += v;
        }
    }
    Tensor::from_vec(&[d], out)
}

/// `[C, H, W] + [C]` per-channel bias (convolution bias).
pub fn add_channel_bias<T: Scalar>(x: &Tensor<T>, bias: &Tensor<T>) -> Result<Tensor<T>> {
    let (c, h, w) = x.dims3()?;
    if bias.shape() != [c] {
        return Err(Error::Dimension(format!(
            "add_channel_bias: input {:?} needs bias [{}], got {:?}",
            x.shape(),
            c,
            bias.shape()
        )));
    }
    let bd = bias.data();
    let mut out = x.data().to_vec();
    for ic in 0..c {
        let b = bd[ic];
        for o in out[ic * h * w..(ic + 1) * h * w].iter_mut() {
            *o += b;
        }
    }
    Tensor::from_vec(x.shape(), out)
}

pub fn channel_sums<T: Scalar>(x: &Tensor<T>) -> Result<Tensor<T>> {
    let (c, h, w) = x.dims3()?;
    let xd = x.data();
    let mut out = vec![T::zero(); c];
    for ic in 0..c {
        let mut acc = T::zero();
        for &v in &xd[ic * h * w..(ic + 1) * h * w] {
            acc += v;
        }
        out[ic] = acc;
    }
    Tensor::from_vec(&[c], out)
}

pub fn sigmoid<T: Scalar>(x: &Tensor<T>) -> Tensor<T> {
    x.map(|v| {
        // Branch keeps exp() away from overflow for large |v|.
        if v >= T::zero() {
            T::one() / (T::one() + (-v).exp())
        } else {
            let e = v.exp();
            e / (T::one() + e)
        }
    })
}

pub fn tanh_t<T: Scalar>(x: &Tensor<T>) -> Tensor<T> {
    x.map(|v| v.tanh())
}

pub fn concat_cols<T: Scalar>(parts: &[&Tensor<T>]) -> Result<Tensor<T>> {
    if parts.is_empty() {
        return Err(Error::Argument("concat_cols: no inputs".into()));
    }
    let (n, _) = parts[0].dims2()?;
    let mut widths = Vec::with_capacity(parts.len());
    for p in parts {
        let (pn, pd) = p.dims2()?;
        if pn != n {
            return Err(Error::Dimension(format!(
                "concat_cols: row counts differ, {:?} vs {:?}",
                parts[0].shape(),
                p.shape()
            )));
        }
        widths.push(pd);
    }
    let total: usize = widths.iter().sum();
    let mut out = vec![T::zero(); n * total];
    for r in 0..n {
        let mut off = 0;
        for (p, &pd) in parts.iter().zip(&widths) {
            out[r * total + off..r * total + off + pd].copy_from_slice(p.row(r));
            off += pd;
        }
    }
    Tensor::from_vec(&[n, total], out)
}

pub fn mean_all<T: Scalar>(x: &Tensor<T>) -> Result<Tensor<T>> {
    if x.numel() == 0 {
        return Err(Error::Argument("mean_all: empty tensor".into()));
    }
    let mut acc = T::zero();
    for &v in x.data() {
        acc += v;
    }
    Ok(Tensor::scalar(acc * T::of(1.0 / x.numel() as f64)))
}

/// `[C, H, W] -> [C]` spatial mean pooling.
pub fn mean_spatial<T: Scalar>(x: &Tensor<T>) -> Result<Tensor<T>> {
    let (c, h, w) = x.dims3()?;
    let inv = T::of(1.0 / (h * w) as f64);
    let xd = x.data();
    let mut out = vec![T::zero(); c];
    for ic in 0..c {
        let mut acc = T::zero();
        for &v in &xd[ic * h * w..(ic + 1) * h * w] {
            acc += v;
        }
        out[ic] = acc * inv;
    }
    Tensor::from_vec(&[c], out)
}

/// Top-left crop of a `[C, H, W]` tensor.
pub fn crop_hw<T: Scalar>(x: &Tensor<T>, h: usize, w: usize) -> Result<Tensor<T>> {
    let (c, ih, iw) = x.dims3()?;
    if h > ih || w > iw {
        return Err(Error::Dimension(format!(
            "crop_hw: cannot crop {:?} to {}x{}",
            x.shape(),
            h,
            w
        )));
    }
    let xd = x.data();
    let mut out = vec![T::zero(); c * h * w];
    for ic in 0..c {
        for i in 0..h {
            let src = ic * ih * iw + i * iw;
            let dst = ic * h * w + i * w;
            out[dst..dst + w].copy_from_slice(&xd[src..src + w]);
        }
    }
    Tensor::from_vec(&[c, h, w], out)
}

pub fn crop_hw_vjp<T: Scalar>(
    gout: &Tensor<T>,
    in_h: usize,
    in_w: usize,
) -> Result<Tensor<T>> {
    let (c, h, w) = gout.dims3()?;
    let gd = gout.data();
    let mut gin = vec![T::zero(); c * in_h * in_w];
    for ic in 0..c {
        for i in 0..h {
            let dst = ic * in_h * in_w + i * in_w;
            let src = ic * h * w + i * w;
            gin[dst..dst + w].copy_from_slice(&gd[src..src + w]);
        }
    }
    Tensor::from_vec(&[c, in_h, in_w], gin)
}

// ---------------------------------------------------------------------------
// weighted channel MSE (the training loss core)
// ---------------------------------------------------------------------------

/// `pred`/`target`: `[N, C]`; `weights`: per-channel, already validated
/// non-negative with a positive sum. Returns
/// `sum_c w_c * mean_n((p - t)^2) / sum_c w_c`.
pub fn weighted_mse<T: Scalar>(
    pred: &Tensor<T>,
    target: &Tensor<T>,
    weights: &[T],
) -> Result<Tensor<T>> {
    same_shape(pred, target, "weighted_mse")?;
    let (n, c) = pred.dims2()?;
    if weights.len() != c {
        return Err(Error::Dimension(format!(
            "weighted_mse: {} channels but {} weights",
            c,
            weights.len()
        )));
    }
    let mut wsum = T::zero();
    for &w in weights {
        wsum += w;
    }
    if wsum <= T::zero() {
        return Err(Error::Config("weighted_mse: channel weights sum to zero".into()));
    }
    let pd = pred.data();
    let td = target.data();
    let mut per_channel = vec![T::zero(); c];
    for r in 0..n {
        for k in 0..c {
            let dlt = pd[r * c + k] - td[r * c + k];
            per_channel[k] += dlt * dlt;
        }
    }
    let mut loss = T::zero();
    let inv_n = T::of(1.0 / n as f64);
    for (k, &w) in weights.iter().enumerate() {
        loss += w * per_channel[k] * inv_n;
    }
    Ok(Tensor::scalar(loss / wsum))
}

pub fn weighted_mse_vjp<T: Scalar>(
    pred: &Tensor<T>,
    target: &Tensor<T>,
    weights: &[T],
    gout: T,
) -> Result<(Tensor<T>, Tensor<T>)> {
    let (n, c) = pred.dims2()?;
    let mut wsum = T::zero();
    for &w in weights {
        wsum += w;
    }
    let pd = pred.data();
    let td = target.data();
    let mut gp = vec![T::zero(); n * c];
    let two_inv_n = T::of(2.0 / n as f64);
    for r in 0..n {
        for k in 0..c {
            let dlt = pd[r * c + k] - td[r * c + k];
            gp[r * c + k] = gout * weights[k] / wsum * two_inv_n * dlt;
        }
    }
    let gt: Vec<T> = gp.iter().map(|&g| -g).collect();
    Ok((
        Tensor::from_vec(pred.shape(), gp)?,
        Tensor::from_vec(pred.shape(), gt)?,
    ))
}
