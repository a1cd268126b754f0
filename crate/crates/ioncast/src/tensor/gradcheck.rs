//! Central finite-difference gradient verification.
//!
//! Runs in 64-bit mode only: `h = 1e-5` leaves enough mantissa for the
//! two-sided difference. The per-primitive battery is reused by the test
//! suite and by the CLI debug report.

use indexmap::IndexMap;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;

use super::{Graph, LstmCellIds, NodeId, ParamSet, Tensor};
use crate::error::Result;

/// Central-difference step.
pub const FD_STEP: f64 = 1e-5;
/// Maximum tolerated relative error between analytic and FD gradients.
pub const FD_TOLERANCE: f64 = 1e-4;

/// Relative error with a small floor so near-zero gradient pairs compare by
/// absolute difference against 1e-6.
pub fn fd_rel_err(analytic: f64, fd: f64) -> f64 {
    let diff = (analytic - fd).abs();
    diff / analytic.abs().max(fd.abs()).max(1e-6)
}

/// Central finite differences of `loss` with respect to every parameter
/// element.
pub fn fd_gradients<F>(
    params: &ParamSet<f64>,
    loss: F,
    h: f64,
) -> Result<IndexMap<String, Tensor<f64>>>
where
    F: Fn(&ParamSet<f64>) -> Result<f64>,
{
    let mut out = IndexMap::new();
    for (name, tensor) in params.iter() {
        let mut grad = vec![0.0f64; tensor.numel()];
        for i in 0..tensor.numel() {
            let mut plus = params.clone();
            plus.get_mut(name).unwrap().data_mut()[i] += h;
            let mut minus = params.clone();
            minus.get_mut(name).unwrap().data_mut()[i] -= h;
            grad[i] = (loss(&plus)? - loss(&minus)?) / (2.0 * h);
        }
        out.insert(name.clone(), Tensor::from_vec(tensor.shape(), grad)?);
    }
    Ok(out)
}

/// Largest relative error over all parameter elements.
pub fn max_rel_err(
    analytic: &IndexMap<String, Tensor<f64>>,
    fd: &IndexMap<String, Tensor<f64>>,
) -> f64 {
    let mut worst = 0.0f64;
    for (name, a) in analytic {
        let f = &fd[name];
        for (&av, &fv) in a.data().iter().zip(f.data()) {
            worst = worst.max(fd_rel_err(av, fv));
        }
    }
    worst
}

/// Builds a graph from params and returns the scalar loss node. `train_seed`
/// switches the graph into training mode (used by the dropout check, where
/// the mask must be reproduced identically on every FD evaluation).
type BuildFn = fn(&mut Graph<f64>, &IndexMap<String, NodeId>, &CheckData) -> Result<NodeId>;

/// Fixed constants a check needs besides its parameters.
pub struct CheckData {
    tensors: IndexMap<String, Tensor<f64>>,
    indices: Arc<Vec<usize>>,
}

impl CheckData {
    fn tensor(&self, name: &str) -> Tensor<f64> {
        self.tensors[name].clone()
    }
}

pub struct PrimitiveCheck {
    pub name: &'static str,
    params: ParamSet<f64>,
    data: CheckData,
    build: BuildFn,
    train_seed: Option<u64>,
}

impl PrimitiveCheck {
    /// Analytic-vs-FD maximum relative error for this primitive.
    pub fn run(&self) -> Result<f64> {
        let eval = |ps: &ParamSet<f64>| -> Result<(Graph<f64>, NodeId)> {
            let mut g = match self.train_seed {
                Some(seed) => Graph::training(seed),
                None => Graph::new(),
            };
            let ids: IndexMap<String, NodeId> = ps
                .iter()
                .map(|(name, v)| (name.clone(), g.param(name, v.clone())))
                .collect();
            let loss = (self.build)(&mut g, &ids, &self.data)?;
            Ok((g, loss))
        };
        let (g, loss_id) = eval(&self.params)?;
        let analytic = g.backward(loss_id)?;
        let fd = fd_gradients(&self.params, |ps| {
            let (g, l) = eval(ps)?;
            g.value(l).item()
        }, FD_STEP)?;
        Ok(max_rel_err(&analytic, &fd))
    }
}

pub struct CheckReportRow {
    pub primitive: &'static str,
    pub max_rel_err: f64,
    pub pass: bool,
}

fn randt(rng: &mut ChaCha8Rng, shape: &[usize]) -> Tensor<f64> {
    let data = (0..shape.iter().product::<usize>())
        .map(|_| rng.random::<f64>() * 2.0 - 1.0)
        .collect();
    Tensor::from_vec(shape, data).unwrap()
}

/// Projects a tensor to a scalar with a fixed random weighting so every
/// output element influences the loss with a distinct coefficient.
fn project(g: &mut Graph<f64>, out: NodeId, data: &CheckData) -> Result<NodeId> {
    let numel = g.value(out).numel();
    let flat = g.reshape(out, &[numel])?;
    let proj = data.tensor("proj");
    let w = g.constant(proj);
    let prod = g.mul(flat, w)?;
    g.mean_all(prod)
}

fn check(
    name: &'static str,
    seed: u64,
    param_shapes: &[(&str, &[usize])],
    const_shapes: &[(&str, &[usize])],
    indices: Vec<usize>,
    out_numel_hint: usize,
    build: BuildFn,
    train_seed: Option<u64>,
) -> PrimitiveCheck {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut params = ParamSet::new();
    for (pname, shape) in param_shapes {
        params.insert(pname, randt(&mut rng, shape)).unwrap();
    }
    let mut tensors = IndexMap::new();
    for (cname, shape) in const_shapes {
        tensors.insert(cname.to_string(), randt(&mut rng, shape));
    }
    tensors.insert("proj".to_string(), randt(&mut rng, &[out_numel_hint]));
    PrimitiveCheck {
        name,
        params,
        data: CheckData { tensors, indices: Arc::new(indices) },
        build,
        train_seed,
    }
}

/// The per-primitive battery: one check per differentiable graph op.
pub fn primitive_battery(seed: u64) -> Vec<PrimitiveCheck> {
    vec![
        check("matmul", seed, &[("a", &[3, 4]), ("b", &[4, 5])], &[], vec![], 15,
            |g, ids, d| {
                let out = g.matmul(ids["a"], ids["b"])?;
                project(g, out, d)
            }, None),
        check("conv2d_circular_s1", seed, &[("x", &[2, 5, 6]), ("k", &[3, 2, 3, 3])], &[], vec![], 90,
            |g, ids, d| {
                let out = g.conv2d_circular(ids["x"], ids["k"], 1)?;
                project(g, out, d)
            }, None),
        check("conv2d_circular_s2", seed, &[("x", &[2, 5, 6]), ("k", &[3, 2, 3, 5])], &[], vec![], 27,
            |g, ids, d| {
                let out = g.conv2d_circular(ids["x"], ids["k"], 2)?;
                project(g, out, d)
            }, None),
        check("conv2d_transposed_s2", seed, &[("y", &[3, 3, 3]), ("k", &[3, 2, 3, 3])], &[], vec![], 60,
            |g, ids, d| {
                let out = g.conv2d_transposed(ids["y"], ids["k"], 2, 5, 6)?;
                project(g, out, d)
            }, None),
        check("conv2d_transposed_even_kernel", seed, &[("y", &[2, 2, 3]), ("k", &[2, 1, 2, 2])], &[], vec![], 24,
            |g, ids, d| {
                let out = g.conv2d_transposed(ids["y"], ids["k"], 2, 4, 6)?;
                project(g, out, d)
            }, None),
        check("upsample_bilinear", seed, &[("x", &[2, 3, 4])], &[], vec![], 96,
            |g, ids, d| {
                let out = g.upsample_bilinear(ids["x"], 2)?;
                project(g, out, d)
            }, None),
        check("layer_norm", seed, &[("x", &[4, 5]), ("gain", &[5]), ("bias", &[5])], &[], vec![], 20,
            |g, ids, d| {
                let out = g.layer_norm(ids["x"], ids["gain"], ids["bias"])?;
                project(g, out, d)
            }, None),
        check("lstm_cell", seed,
            &[("x", &[2, 3]), ("h", &[2, 4]), ("c", &[2, 4]),
              ("w_i", &[3, 4]), ("u_i", &[4, 4]), ("b_i", &[4]),
              ("w_f", &[3, 4]), ("u_f", &[4, 4]), ("b_f", &[4]),
              ("w_o", &[3, 4]), ("u_o", &[4, 4]), ("b_o", &[4]),
              ("w_g", &[3, 4]), ("u_g", &[4, 4]), ("b_g", &[4])],
            &[], vec![], 16,
            |g, ids, d| {
                let p = LstmCellIds {
                    w_i: ids["w_i"], u_i: ids["u_i"], b_i: ids["b_i"],
                    w_f: ids["w_f"], u_f: ids["u_f"], b_f: ids["b_f"],
                    w_o: ids["w_o"], u_o: ids["u_o"], b_o: ids["b_o"],
                    w_g: ids["w_g"], u_g: ids["u_g"], b_g: ids["b_g"],
                };
                let (h1, c1) = g.lstm_cell(ids["x"], ids["h"], ids["c"], &p)?;
                let both = g.concat_cols(&[h1, c1])?;
                project(g, both, d)
            }, None),
        check("scatter_sum", seed, &[("v", &[6, 3])], &[], vec![0, 2, 1, 2, 0, 4], 15,
            |g, ids, d| {
                let out = g.scatter_sum(ids["v"], d.indices.clone(), 5)?;
                project(g, out, d)
            }, None),
        check("gather_rows", seed, &[("v", &[5, 3])], &[], vec![4, 0, 2, 2, 1], 15,
            |g, ids, d| {
                let out = g.gather_rows(ids["v"], d.indices.clone())?;
                project(g, out, d)
            }, None),
        check("sigmoid", seed, &[("x", &[3, 4])], &[], vec![], 12,
            |g, ids, d| {
                let out = g.sigmoid(ids["x"]);
                project(g, out, d)
            }, None),
        check("tanh", seed, &[("x", &[3, 4])], &[], vec![], 12,
            |g, ids, d| {
                let out = g.tanh(ids["x"]);
                project(g, out, d)
            }, None),
        check("silu", seed, &[("x", &[3, 4])], &[], vec![], 12,
            |g, ids, d| {
                let out = g.silu(ids["x"])?;
                project(g, out, d)
            }, None),
        check("add_sub_mul_scale", seed, &[("a", &[3, 4]), ("b", &[3, 4])], &[], vec![], 12,
            |g, ids, d| {
                let s = g.add(ids["a"], ids["b"])?;
                let t = g.sub(s, ids["b"])?;
                let m = g.mul(t, ids["a"])?;
                let out = g.scale(m, 0.7);
                project(g, out, d)
            }, None),
        check("add_row_broadcast", seed, &[("x", &[4, 3]), ("b", &[3])], &[], vec![], 12,
            |g, ids, d| {
                let out = g.add_row_broadcast(ids["x"], ids["b"])?;
                project(g, out, d)
            }, None),
        check("add_channel_bias", seed, &[("x", &[2, 3, 4]), ("b", &[2])], &[], vec![], 24,
            |g, ids, d| {
                let out = g.add_channel_bias(ids["x"], ids["b"])?;
                project(g, out, d)
            }, None),
        check("concat_cols", seed, &[("a", &[3, 2]), ("b", &[3, 4])], &[], vec![], 18,
            |g, ids, d| {
                let out = g.concat_cols(&[ids["a"], ids["b"]])?;
                project(g, out, d)
            }, None),
        check("transpose2d", seed, &[("x", &[3, 5])], &[], vec![], 15,
            |g, ids, d| {
                let out = g.transpose2d(ids["x"])?;
                project(g, out, d)
            }, None),
        check("mean_all", seed, &[("x", &[3, 4])], &[], vec![], 1,
            |g, ids, _| g.mean_all(ids["x"]), None),
        check("mean_spatial", seed, &[("x", &[3, 2, 4])], &[], vec![], 3,
            |g, ids, d| {
                let out = g.mean_spatial(ids["x"])?;
                project(g, out, d)
            }, None),
        check("crop_hw", seed, &[("x", &[2, 4, 5])], &[], vec![], 12,
            |g, ids, d| {
                let out = g.crop_hw(ids["x"], 2, 3)?;
                project(g, out, d)
            }, None),
        check("dropout", seed, &[("x", &[4, 6])], &[], vec![], 24,
            |g, ids, d| {
                let out = g.dropout(ids["x"], 0.3)?;
                project(g, out, d)
            }, Some(17)),
        check("weighted_mse", seed, &[("p", &[4, 3]), ("t", &[4, 3])], &[], vec![], 1,
            |g, ids, _| {
                g.weighted_mse(ids["p"], ids["t"], Arc::new(vec![2.0, 1.0, 0.0]))
            }, None),
    ]
}

/// Runs the whole battery once; one row per primitive.
pub fn run_primitive_battery(seed: u64) -> Result<Vec<CheckReportRow>> {
    let mut rows = Vec::new();
    for chk in primitive_battery(seed) {
        let err = chk.run()?;
        rows.push(CheckReportRow {
            primitive: chk.name,
            max_rel_err: err,
            pass: err < FD_TOLERANCE,
        });
    }
    Ok(rows)
}

/// CSV rendering of a battery report (the debug dump surface).
pub fn report_to_csv(rows: &[CheckReportRow]) -> String {
    let mut out = String::from("primitive,max_rel_err,pass\n");
    for r in rows {
        out.push_str(&format!("{},{:.3e},{}\n", r.primitive, r.max_rel_err, r.pass));
    }
    out
}
