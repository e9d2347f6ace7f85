//! Sample-weighted binary logistic regression.
//!
//! Minimizes `sum_i w_i * nll_i + (l2 / 2) * ||coef||^2` (intercept not
//! penalized) with accelerated gradient descent: FISTA momentum, a
//! backtracking Lipschitz estimate and a function-value restart. Every step is
//! deterministic, so identical inputs give bit-identical models.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lexicon::Polarity;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledSample {
    pub word: String,
    pub features: Vec<f64>,
    pub label: Polarity,
    pub weight: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogRegConfig {
    pub l2: f64,
    /// Converged once the gradient max-norm drops below this.
    pub tol: f64,
    pub max_iters: usize,
}

impl Default for LogRegConfig {
    fn default() -> Self {
        Self {
            l2: 1.0,
            tol: 1e-8,
            max_iters: 20_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogRegModel {
    pub coefficients: Vec<f64>,
    pub intercept: f64,
    pub l2_strength: f64,
    pub iterations: usize,
    pub final_objective: f64,
    pub converged: bool,
}

fn target(label: Polarity) -> f64 {
    match label {
        Polarity::Positive => 1.0,
        Polarity::Negative => 0.0,
    }
}

pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// log(1 + exp(z)) without overflow.
fn softplus(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

fn linear(params: &[f64], x: &[f64]) -> f64 {
    let (coef, intercept) = params.split_at(params.len() - 1);
    coef.iter().zip(x).map(|(c, v)| c * v).sum::<f64>() + intercept[0]
}

/// Weighted objective at `params` = coefficients followed by the intercept.
pub fn objective(samples: &[LabeledSample], params: &[f64], l2: f64) -> f64 {
    let nll: f64 = samples
        .iter()
        .map(|s| {
            let z = linear(params, &s.features);
            s.weight * (softplus(z) - target(s.label) * z)
        })
        .sum();
    let coef = &params[..params.len() - 1];
    nll + 0.5 * l2 * coef.iter().map(|c| c * c).sum::<f64>()
}

/// Analytic gradient of [`objective`].
pub fn gradient(samples: &[LabeledSample], params: &[f64], l2: f64) -> Vec<f64> {
    let dim = params.len() - 1;
    let mut grad = vec![0.0; params.len()];
    for s in samples {
        let residual = s.weight * (sigmoid(linear(params, &s.features)) - target(s.label));
        for (g, x) in grad[..dim].iter_mut().zip(&s.features) {
            *g += residual * x;
        }
        grad[dim] += residual;
    }
    for (g, c) in grad[..dim].iter_mut().zip(&params[..dim]) {
        *g += l2 * c;
    }
    grad
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn validate(samples: &[LabeledSample], config: &LogRegConfig) -> Result<usize> {
    let first = samples
        .first()
        .ok_or_else(|| Error::EmptyInput("training samples".into()))?;
    let dim = first.features.len();
    if dim == 0 {
        return Err(Error::InvalidParameter(
            "feature dimension must be >= 1".into(),
        ));
    }
    for s in samples {
        if s.features.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: s.features.len(),
            });
        }
        if !(s.weight.is_finite() && s.weight > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "sample {:?} has weight {}",
                s.word, s.weight
            )));
        }
        if s.features.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "sample {:?} has non-finite features",
                s.word
            )));
        }
    }
    let positives = samples
        .iter()
        .filter(|s| s.label == Polarity::Positive)
        .count();
    if positives == 0 || positives == samples.len() {
        return Err(Error::SingleClass);
    }
    if !(config.l2 >= 0.0 && config.l2.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "l2 must be >= 0, got {}",
            config.l2
        )));
    }
    if !(config.tol > 0.0) || config.max_iters == 0 {
        return Err(Error::InvalidParameter(
            "tol must be > 0 and max_iters >= 1".into(),
        ));
    }
    Ok(dim)
}

pub fn train_weighted_logreg(
    samples: &[LabeledSample],
    config: &LogRegConfig,
) -> Result<LogRegModel> {
    let dim = validate(samples, config)?;
    let l2 = config.l2;
    let n = dim + 1;

    let mut x = vec![0.0; n];
    let mut fx = objective(samples, &x, l2);
    let gx = gradient(samples, &x, l2);
    let mut y = x.clone();
    let mut t = 1.0f64;
    let mut lipschitz = 1.0f64;
    let mut iterations = 0;
    let mut converged = max_abs(&gx) < config.tol;
    let mut candidate = vec![0.0; n];

    while !converged && iterations < config.max_iters {
        iterations += 1;
        let fy = objective(samples, &y, l2);
        let gy = gradient(samples, &y, l2);
        let g_sq: f64 = gy.iter().map(|g| g * g).sum();
        // Near the optimum the sufficient decrease is below the rounding
        // error of the objective; a curvature test on gradients decides there.
        let slack = 64.0 * f64::EPSILON * (1.0 + fy.abs());
        let (f_candidate, g_candidate) = loop {
            for k in 0..n {
                candidate[k] = y[k] - gy[k] / lipschitz;
            }
            let f_c = objective(samples, &candidate, l2);
            if !f_c.is_finite() {
                if lipschitz > 1e300 {
                    return Err(Error::NonFiniteObjective);
                }
                lipschitz *= 2.0;
                continue;
            }
            let g_c = gradient(samples, &candidate, l2);
            if f_c <= fy - 0.5 * g_sq / lipschitz {
                break (f_c, g_c);
            }
            if f_c <= fy + slack {
                let (mut curvature, mut step_sq) = (0.0, 0.0);
                for k in 0..n {
                    let d = candidate[k] - y[k];
                    curvature += (g_c[k] - gy[k]) * d;
                    step_sq += d * d;
                }
                if curvature <= lipschitz * step_sq {
                    break (f_c, g_c);
                }
            }
            if lipschitz > 1e300 {
                return Err(Error::NonFiniteObjective);
            }
            lipschitz *= 2.0;
        };

        let heading_uphill = gy
            .iter()
            .zip(candidate.iter().zip(&x))
            .map(|(g, (c, xk))| g * (c - xk))
            .sum::<f64>()
            > 0.0;
        if f_candidate > fx + slack || (heading_uphill && y != x) {
            // momentum overshot: restart from the last iterate
            t = 1.0;
            y.copy_from_slice(&x);
            continue;
        }

        let t_next = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
        let momentum = (t - 1.0) / t_next;
        for k in 0..n {
            y[k] = candidate[k] + momentum * (candidate[k] - x[k]);
        }
        x.copy_from_slice(&candidate);
        fx = f_candidate;
        t = t_next;
        converged = max_abs(&g_candidate) < config.tol;
        lipschitz *= 0.9;
    }

    if !fx.is_finite() || x.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFiniteObjective);
    }
    let intercept = x.pop().expect("intercept present");
    Ok(LogRegModel {
        coefficients: x,
        intercept,
        l2_strength: l2,
        iterations,
        final_objective: fx,
        converged,
    })
}

impl LogRegModel {
    pub fn decision(&self, features: &[f64]) -> Result<f64> {
        if features.len() != self.coefficients.len() {
            return Err(Error::DimensionMismatch {
                expected: self.coefficients.len(),
                found: features.len(),
            });
        }
        Ok(self
            .coefficients
            .iter()
            .zip(features)
            .map(|(c, x)| c * x)
            .sum::<f64>()
            + self.intercept)
    }
}

/// Probability of the positive class and the resulting label; exactly 0.5 is
/// labeled positive.
pub fn predict(model: &LogRegModel, features: &[f64]) -> Result<(Polarity, f64)> {
    let p = sigmoid(model.decision(features)?);
    let label = if p >= 0.5 {
        Polarity::Positive
    } else {
        Polarity::Negative
    };
    Ok((label, p))
}
