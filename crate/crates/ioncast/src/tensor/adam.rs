//! Named parameter registry and the bias-corrected Adam update.

use indexmap::IndexMap;

use super::{Scalar, Tensor};
use crate::error::{Error, Result};

/// Flat registry of named dense parameter tensors. Iteration follows
/// insertion order, which keeps training runs reproducible.
#[derive(Clone, Debug)]
pub struct ParamSet<T: Scalar> {
    map: IndexMap<String, Tensor<T>>,
}

impl<T: Scalar> Default for ParamSet<T> {
    fn default() -> Self {
        Self::new()
    }
}

impl<T: Scalar> ParamSet<T> {
    pub fn new() -> Self {
        ParamSet { map: IndexMap::new() }
    }

    pub fn insert(&mut self, name: &str, value: Tensor<T>) -> Result<()> {
        if self.map.contains_key(name) {
            return Err(Error::Argument(format!("parameter {name} registered twice")));
        }
        self.map.insert(name.to_string(), value);
        Ok(())
    }

    pub fn get(&self, name: &str) -> Option<&Tensor<T>> {
        self.map.get(name)
    }

    pub fn get_mut(&mut self, name: &str) -> Option<&mut Tensor<T>> {
        self.map.get_mut(name)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &Tensor<T>)> {
        self.map.iter()
    }

    pub fn iter_mut(&mut self) -> impl Iterator<Item = (&String, &mut Tensor<T>)> {
        self.map.iter_mut()
    }

    pub fn names(&self) -> impl Iterator<Item = &String> {
        self.map.keys()
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn total_elements(&self) -> usize {
        self.map.values().map(|t| t.numel()).sum()
    }

    pub fn cast<U: Scalar>(&self) -> ParamSet<U> {
        ParamSet {
            map: self.map.iter().map(|(k, v)| (k.clone(), v.cast::<U>())).collect(),
        }
    }
}

/// Adam optimizer state: first/second moments per parameter plus the step
/// counter and hyperparameters.
#[derive(Clone, Debug)]
pub struct AdamState<T: Scalar> {
    pub lr: T,
    pub beta1: T,
    pub beta2: T,
    pub eps: T,
    pub t: u64,
    m: IndexMap<String, Tensor<T>>,
    v: IndexMap<String, Tensor<T>>,
}

impl<T: Scalar> AdamState<T> {
    pub fn new(lr: f64) -> Self {
        AdamState {
            lr: T::of(lr),
            beta1: T::of(0.9),
            beta2: T::of(0.999),
            eps: T::of(1e-8),
            t: 0,
            m: IndexMap::new(),
            v: IndexMap::new(),
        }
    }

    pub fn moments(&self, name: &str) -> Option<(&Tensor<T>, &Tensor<T>)> {
        Some((self.m.get(name)?, self.v.get(name)?))
    }

    pub(crate) fn set_moments(&mut self, name: &str, m: Tensor<T>, v: Tensor<T>) {
        self.m.insert(name.to_string(), m);
        self.v.insert(name.to_string(), v);
    }
}

/// One bias-corrected Adam step over every parameter. Parameters absent from
/// `grads` are treated as having a zero gradient.
pub fn adam_step<T: Scalar>(
    params: &mut ParamSet<T>,
    grads: &IndexMap<String, Tensor<T>>,
    state: &mut AdamState<T>,
) -> Result<()> {
    state.t += 1;
    let t = state.t as i32;
    let bc1 = T::one() - state.beta1.powi(t);
    let bc2 = T::one() - state.beta2.powi(t);
    for (name, p) in params.iter_mut() {
        let zero;
        let g = match grads.get(name) {
            Some(g) => {
                if g.shape() != p.shape() {
                    return Err(Error::Dimension(format!(
                        "adam_step: gradient for {name} has shape {:?}, parameter {:?}",
                        g.shape(),
                        p.shape()
                    )));
                }
                g
            }
            None => {
                zero = Tensor::zeros(p.shape());
                &zero
            }
        };
        if !g.all_finite() {
            return Err(Error::Training(format!(
                "non-finite gradient for parameter {name}"
            )));
        }
        let m = state
            .m
            .entry(name.clone())
            .or_insert_with(|| Tensor::zeros(p.shape()));
        for (mv, &gv) in m.data_mut().iter_mut().zip(g.data()) {
            *mv = state.beta1 * *mv + (T::one() - state.beta1) * gv;
        }
        let v = state
            .v
            .entry(name.clone())
            .or_insert_with(|| Tensor::zeros(p.shape()));
        for (vv, &gv) in v.data_mut().iter_mut().zip(g.data()) {
            *vv = state.beta2 * *vv + (T::one() - state.beta2) * gv * gv;
        }
        let m = &state.m[name];
        let v = &state.v[name];
        for ((pv, &mv), &vv) in p.data_mut().iter_mut().zip(m.data()).zip(v.data()) {
            let mhat = mv / bc1;
            let vhat = vv / bc2;
            *pv -= state.lr * mhat / (vhat.sqrt() + state.eps);
        }
    }
    Ok(())
}
