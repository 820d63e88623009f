//! Gaussian naive Bayes with per-class per-feature maximum-likelihood
//! estimates, a variance floor, and log-space scoring.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NbParams {
    pub variance_floor: f64,
}

impl Default for NbParams {
    fn default() -> Self {
        NbParams {
            variance_floor: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NbModel {
    log_priors: [f64; 2],
    means: [Vec<f64>; 2],
    variances: [Vec<f64>; 2],
}

pub fn train_nb(x: &[Vec<f64>], y: &[bool], params: &NbParams) -> NbModel {
    let d = x[0].len();
    let mut means = [vec![0.0; d], vec![0.0; d]];
    let mut variances = [vec![0.0; d], vec![0.0; d]];
    let mut counts = [0usize; 2];
    for (row, &label) in x.iter().zip(y) {
        let c = label as usize;
        counts[c] += 1;
        for (m, v) in means[c].iter_mut().zip(row) {
            *m += v;
        }
    }
    for c in 0..2 {
        for m in &mut means[c] {
            *m /= counts[c] as f64;
        }
    }
    for (row, &label) in x.iter().zip(y) {
        let c = label as usize;
        for i in 0..d {
            let diff = row[i] - means[c][i];
            variances[c][i] += diff * diff;
        }
    }
    for c in 0..2 {
        for v in &mut variances[c] {
            *v = (*v / counts[c] as f64).max(params.variance_floor);
        }
    }
    let n = x.len() as f64;
    let log_priors = [(counts[0] as f64 / n).ln(), (counts[1] as f64 / n).ln()];
    NbModel {
        log_priors,
        means,
        variances,
    }
}

impl NbModel {
    fn log_posterior(&self, class: usize, features: &[f64]) -> f64 {
        let mut score = self.log_priors[class];
        for ((&x, &mean), &var) in features
            .iter()
            .zip(&self.means[class])
            .zip(&self.variances[class])
        {
            score -= 0.5 * (std::f64::consts::TAU * var).ln();
            score -= (x - mean) * (x - mean) / (2.0 * var);
        }
        score
    }

    /// Higher posterior wins; a tie goes to the negative class.
    pub fn predict(&self, features: &[f64]) -> bool {
        self.log_posterior(1, features) > self.log_posterior(0, features)
    }

    pub fn class_means(&self) -> &[Vec<f64>; 2] {
        &self.means
    }

    pub fn class_variances(&self) -> &[Vec<f64>; 2] {
        &self.variances
    }
}
