//! Brute-force reference predictors for naive Bayes and nearest neighbors.
//!
//! These are independent re-derivations used by the test suites to check the
//! production models: the Bayes oracle multiplies densities directly instead
//! of scoring in log space, and the neighbor oracle fully sorts an exhaustive
//! distance scan. Nothing here shares code with the trained models. Intended
//! for small datasets only.

use crate::datagen::Dataset;
use crate::error::{Result, SimError};

use super::{AlgorithmKind, Hyperparameters};

pub fn oracle_predict(
    kind: AlgorithmKind,
    data: &Dataset,
    hp: &Hyperparameters,
    features: &[f64],
) -> Result<bool> {
    if features.len() != data.feature_count() {
        return Err(SimError::FeatureCountMismatch {
            expected: data.feature_count(),
            got: features.len(),
        });
    }
    match kind {
        AlgorithmKind::NaiveBayes => Ok(nb_oracle(data, hp.naive_bayes.variance_floor, features)),
        AlgorithmKind::NearestNeighbors => Ok(nn_oracle(data, hp.nearest_neighbors.k, features)),
        other => Err(SimError::InvalidConfig(format!(
            "no oracle for {}",
            other.name()
        ))),
    }
}

/// Direct evaluation of prior times the product of per-feature Gaussian
/// densities, one class at a time.
fn nb_oracle(data: &Dataset, variance_floor: f64, features: &[f64]) -> bool {
    let d = data.feature_count();
    let mut posterior = [0.0f64; 2];
    for class in 0..2 {
        let label = class == 1;
        let rows: Vec<&Vec<f64>> = data
            .instances
            .iter()
            .filter(|i| i.label == label)
            .map(|i| &i.features)
            .collect();
        let n = rows.len() as f64;
        let prior = n / data.instances.len() as f64;
        let mut density = prior;
        for slot in 0..d {
            let mean = rows.iter().map(|r| r[slot]).sum::<f64>() / n;
            let var = (rows.iter().map(|r| (r[slot] - mean).powi(2)).sum::<f64>() / n)
                .max(variance_floor);
            let diff = features[slot] - mean;
            density *= (-diff * diff / (2.0 * var)).exp() / (std::f64::consts::TAU * var).sqrt();
        }
        posterior[class] = density;
    }
    posterior[1] > posterior[0]
}

/// Exhaustive scan: standardize, sort every exemplar by distance, vote over
/// the first k.
fn nn_oracle(data: &Dataset, k: usize, features: &[f64]) -> bool {
    let d = data.feature_count();
    let n = data.instances.len() as f64;
    let mut means = vec![0.0; d];
    for inst in &data.instances {
        for (m, v) in means.iter_mut().zip(&inst.features) {
            *m += v;
        }
    }
    for m in &mut means {
        *m /= n;
    }
    let mut stds = vec![0.0; d];
    for inst in &data.instances {
        for (s, (v, m)) in stds.iter_mut().zip(inst.features.iter().zip(&means)) {
            *s += (v - m) * (v - m);
        }
    }
    for s in &mut stds {
        *s = (*s / n).sqrt().max(1e-9);
    }
    let standardize = |row: &[f64]| -> Vec<f64> {
        row.iter()
            .zip(&means)
            .zip(&stds)
            .map(|((v, m), s)| (v - m) / s)
            .collect()
    };
    let query = standardize(features);
    let mut scored: Vec<(f64, usize)> = data
        .instances
        .iter()
        .enumerate()
        .map(|(i, inst)| {
            let z = standardize(&inst.features);
            let dist: f64 = z
                .iter()
                .zip(&query)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            (dist, i)
        })
        .collect();
    scored.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let k = k.max(1).min(scored.len());
    let votes = scored[..k]
        .iter()
        .filter(|(_, i)| data.instances[*i].label)
        .count();
    votes * 2 > k
}
