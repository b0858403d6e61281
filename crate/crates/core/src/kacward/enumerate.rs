//! Exact inference by enumerating all `2^n` spin configurations.

use crate::error::{Error, Result};
use crate::ising::{IsingModel, MomentSet};

pub const MAX_ENUMERATION_VERTICES: usize = 20;

/// Spin of vertex `v` in state `s`: bit set means +1.
#[inline]
pub fn spin(state: usize, v: usize) -> i8 {
    if state >> v & 1 == 1 {
        1
    } else {
        -1
    }
}

fn check_size(model: &IsingModel) -> Result<()> {
    if model.n() > MAX_ENUMERATION_VERTICES {
        return Err(Error::TooLarge {
            n: model.n(),
            max: MAX_ENUMERATION_VERTICES,
        });
    }
    Ok(())
}

fn energies(model: &IsingModel) -> Vec<f64> {
    let n = model.n();
    let mut x = vec![0i8; n];
    (0..1usize << n)
        .map(|s| {
            for (v, xv) in x.iter_mut().enumerate() {
                *xv = spin(s, v);
            }
            model.energy(&x)
        })
        .collect()
}

/// Normalized probability of every state, indexed as in [`spin`].
pub fn state_probabilities(model: &IsingModel) -> Result<Vec<f64>> {
    check_size(model)?;
    let e = energies(model);
    let log_z = log_sum_exp(&e);
    Ok(e.into_iter().map(|x| (x - log_z).exp()).collect())
}

fn log_sum_exp(v: &[f64]) -> f64 {
    let max = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    max + v.iter().map(|x| (x - max).exp()).sum::<f64>().ln()
}

/// Exact log-partition function and all first and second moments.
pub fn brute_force_inference(model: &IsingModel) -> Result<(f64, MomentSet)> {
    check_size(model)?;
    let n = model.n();
    let e = energies(model);
    let log_z = log_sum_exp(&e);
    let mut first = vec![0.0; n];
    let mut second = vec![0.0; n * n];
    for (s, &en) in e.iter().enumerate() {
        let p = (en - log_z).exp();
        for i in 0..n {
            let xi = f64::from(spin(s, i));
            first[i] += p * xi;
            for j in i + 1..n {
                second[i * n + j] += p * xi * f64::from(spin(s, j));
            }
        }
    }
    let mut m = MomentSet::zeros(n);
    for i in 0..n {
        m.set_mean(i, first[i]);
        for j in i + 1..n {
            m.set(i, j, second[i * n + j]);
        }
    }
    Ok((log_z, m))
}
