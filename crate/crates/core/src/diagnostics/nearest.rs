//! k-nearest neighbors over standardized exemplars.

use serde::{Deserialize, Serialize};

use super::Standardizer;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NnParams {
    /// Neighbor count; odd by convention so binary votes cannot tie.
    pub k: usize,
}

impl Default for NnParams {
    fn default() -> Self {
        NnParams { k: 5 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NnModel {
    pub(super) standardizer: Standardizer,
    exemplars: Vec<Vec<f64>>,
    labels: Vec<bool>,
    k: usize,
}

pub fn train_nn(
    x: &[Vec<f64>],
    y: &[bool],
    params: &NnParams,
    standardizer: Standardizer,
) -> NnModel {
    let exemplars = x.iter().map(|row| standardizer.transform(row)).collect();
    NnModel {
        standardizer,
        exemplars,
        labels: y.to_vec(),
        k: params.k.max(1),
    }
}

impl NnModel {
    pub fn exemplar_count(&self) -> usize {
        self.exemplars.len()
    }

    /// Majority vote among the k nearest exemplars by Euclidean distance;
    /// distance ties break toward the lower exemplar index, vote ties toward
    /// the negative class.
    pub fn predict(&self, features: &[f64]) -> bool {
        let z = self.standardizer.transform(features);
        let mut dists: Vec<(f64, usize)> = self
            .exemplars
            .iter()
            .enumerate()
            .map(|(i, e)| {
                let d2: f64 = e.iter().zip(&z).map(|(a, b)| (a - b) * (a - b)).sum();
                (d2, i)
            })
            .collect();
        let k = self.k.min(dists.len());
        dists.select_nth_unstable_by(k - 1, |a, b| a.partial_cmp(b).unwrap());
        let votes = dists[..k].iter().filter(|(_, i)| self.labels[*i]).count();
        votes * 2 > k
    }
}
