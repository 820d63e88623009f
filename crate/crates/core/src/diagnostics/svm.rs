//! Linear SVM: hinge loss with L2 regularization, trained by epoch-based
//! stochastic subgradient descent on standardized features. Keeps the best
//! iterate by training objective, so the fit never ends worse than the
//! all-zeros weight vector.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::Standardizer;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SvmParams {
    pub epochs: usize,
    /// Base step; the step at epoch e is `learning_rate / sqrt(e)`.
    pub learning_rate: f64,
    pub lambda: f64,
    /// Weight samples inversely to class frequency. With rare failures the
    /// unweighted hinge collapses onto the majority class.
    pub balanced: bool,
}

impl Default for SvmParams {
    fn default() -> Self {
        SvmParams {
            epochs: 50,
            learning_rate: 0.01,
            lambda: 1e-3,
            balanced: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SvmModel {
    pub(super) standardizer: Standardizer,
    weights: Vec<f64>,
    bias: f64,
    /// Final regularized objective, kept for inspection.
    pub objective: f64,
}

fn objective(
    z: &[Vec<f64>],
    y: &[f64],
    sample_weight: &[f64],
    w: &[f64],
    b: f64,
    lambda: f64,
) -> f64 {
    let mut hinge = 0.0;
    for ((row, &label), &sw) in z.iter().zip(y).zip(sample_weight) {
        let margin = label * (dot(w, row) + b);
        hinge += sw * (1.0 - margin).max(0.0);
    }
    let reg: f64 = 0.5 * lambda * w.iter().map(|v| v * v).sum::<f64>();
    reg + hinge / z.len() as f64
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn train_svm(
    x: &[Vec<f64>],
    labels: &[bool],
    params: &SvmParams,
    standardizer: Standardizer,
    rng: &mut impl Rng,
) -> SvmModel {
    let n = x.len();
    let d = x[0].len();
    let z: Vec<Vec<f64>> = x.iter().map(|row| standardizer.transform(row)).collect();
    let y: Vec<f64> = labels.iter().map(|&l| if l { 1.0 } else { -1.0 }).collect();
    let positives = labels.iter().filter(|&&l| l).count() as f64;
    let negatives = n as f64 - positives;
    let sample_weight: Vec<f64> = labels
        .iter()
        .map(|&l| {
            if !params.balanced {
                1.0
            } else if l {
                n as f64 / (2.0 * positives)
            } else {
                n as f64 / (2.0 * negatives)
            }
        })
        .collect();

    let mut w = vec![0.0; d];
    let mut b = 0.0;
    let mut best_w = w.clone();
    let mut best_b = b;
    let mut best_obj = objective(&z, &y, &sample_weight, &w, b, params.lambda);

    let mut order: Vec<usize> = (0..n).collect();
    for epoch in 1..=params.epochs {
        let step = params.learning_rate / (epoch as f64).sqrt();
        order.shuffle(rng);
        for &i in &order {
            let margin = y[i] * (dot(&w, &z[i]) + b);
            let shrink = 1.0 - step * params.lambda;
            for v in &mut w {
                *v *= shrink;
            }
            if margin < 1.0 {
                let push = step * sample_weight[i] * y[i];
                for (v, &f) in w.iter_mut().zip(&z[i]) {
                    *v += push * f;
                }
                b += push;
            }
        }
        let obj = objective(&z, &y, &sample_weight, &w, b, params.lambda);
        if obj < best_obj {
            best_obj = obj;
            best_w.copy_from_slice(&w);
            best_b = b;
        }
    }
    SvmModel {
        standardizer,
        weights: best_w,
        bias: best_b,
        objective: best_obj,
    }
}

impl SvmModel {
    pub fn decision_value(&self, features: &[f64]) -> f64 {
        dot(&self.weights, &self.standardizer.transform(features)) + self.bias
    }

    pub fn predict(&self, features: &[f64]) -> bool {
        self.decision_value(features) > 0.0
    }
}
