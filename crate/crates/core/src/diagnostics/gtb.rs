//! Gradient tree boosting for binary labels: shallow regression trees fitted
//! to logistic-loss gradients, combined additively with shrinkage, leaf
//! values set by a Newton step.

use serde::{Deserialize, Serialize};

use super::cart::{grow_regression, TreeNode};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GtbParams {
    pub rounds: usize,
    pub shrinkage: f64,
    pub max_depth: usize,
}

impl Default for GtbParams {
    fn default() -> Self {
        GtbParams {
            rounds: 100,
            shrinkage: 0.1,
            max_depth: 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GtbModel {
    base_score: f64,
    shrinkage: f64,
    trees: Vec<TreeNode>,
    /// Training logistic loss after the base score and after each round.
    pub train_losses: Vec<f64>,
}

fn sigmoid(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

fn logistic_loss(y: &[bool], scores: &[f64]) -> f64 {
    let mut loss = 0.0;
    for (&label, &z) in y.iter().zip(scores) {
        let p = sigmoid(z).clamp(1e-12, 1.0 - 1e-12);
        loss -= if label { p.ln() } else { (1.0 - p).ln() };
    }
    loss / y.len() as f64
}

pub fn train_gtb(x: &[Vec<f64>], y: &[bool], params: &GtbParams) -> GtbModel {
    let n = x.len();
    let positive = y.iter().filter(|&&v| v).count() as f64;
    let prior = (positive / n as f64).clamp(1e-6, 1.0 - 1e-6);
    let base_score = (prior / (1.0 - prior)).ln();
    let mut scores = vec![base_score; n];
    let mut trees = Vec::with_capacity(params.rounds);
    let mut train_losses = vec![logistic_loss(y, &scores)];

    for _ in 0..params.rounds {
        let probs: Vec<f64> = scores.iter().map(|&z| sigmoid(z)).collect();
        let residuals: Vec<f64> = y
            .iter()
            .zip(&probs)
            .map(|(&label, &p)| if label { 1.0 - p } else { -p })
            .collect();
        let leaf_value = |rows: &[usize]| {
            let num: f64 = rows.iter().map(|&r| residuals[r]).sum();
            let den: f64 = rows.iter().map(|&r| probs[r] * (1.0 - probs[r])).sum();
            (num / (den + 1e-12)).clamp(-10.0, 10.0)
        };
        let tree = grow_regression(
            x,
            &residuals,
            (0..n).collect(),
            params.max_depth,
            2,
            &leaf_value,
        );
        for (i, row) in x.iter().enumerate() {
            scores[i] += params.shrinkage * tree.value(row);
        }
        trees.push(tree);
        train_losses.push(logistic_loss(y, &scores));
    }
    GtbModel {
        base_score,
        shrinkage: params.shrinkage,
        trees,
        train_losses,
    }
}

impl GtbModel {
    pub fn decision_score(&self, features: &[f64]) -> f64 {
        let mut score = self.base_score;
        for tree in &self.trees {
            score += self.shrinkage * tree.value(features);
        }
        score
    }

    pub fn predict(&self, features: &[f64]) -> bool {
        self.decision_score(features) > 0.0
    }
}
