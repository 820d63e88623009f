//! Bagged CART forest with Gini splits and majority voting.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::cart::{grow_classification, GrowParams, TreeNode};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ForestParams {
    pub trees: usize,
    pub max_depth: usize,
    /// Features per split; `None` picks round(sqrt(d)), at least 1.
    pub mtry: Option<usize>,
    pub bootstrap: bool,
}

impl Default for ForestParams {
    fn default() -> Self {
        ForestParams {
            trees: 50,
            max_depth: 8,
            mtry: None,
            bootstrap: true,
        }
    }
}

impl ForestParams {
    pub fn effective_mtry(&self, d: usize) -> usize {
        self.mtry
            .unwrap_or(((d as f64).sqrt().round() as usize).max(1))
            .min(d)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ForestModel {
    trees: Vec<TreeNode>,
    /// Mean impurity decrease per feature across trees.
    pub importances: Vec<f64>,
}

pub fn train_forest(
    x: &[Vec<f64>],
    y: &[bool],
    params: &ForestParams,
    rng: &mut impl Rng,
) -> ForestModel {
    let n = x.len();
    let d = x[0].len();
    let grow = GrowParams {
        max_depth: params.max_depth,
        mtry: Some(params.effective_mtry(d)),
        min_samples_split: 2,
    };
    let mut trees = Vec::with_capacity(params.trees);
    let mut importances = vec![0.0; d];
    for _ in 0..params.trees {
        let rows: Vec<usize> = if params.bootstrap {
            (0..n).map(|_| rng.gen_range(0..n)).collect()
        } else {
            (0..n).collect()
        };
        trees.push(grow_classification(
            x,
            y,
            rows,
            &grow,
            rng,
            &mut importances,
        ));
    }
    for imp in &mut importances {
        *imp /= params.trees as f64;
    }
    ForestModel { trees, importances }
}

impl ForestModel {
    pub fn tree_count(&self) -> usize {
        self.trees.len()
    }

    pub fn tree_predict(&self, index: usize, features: &[f64]) -> bool {
        self.trees[index].value(features) > 0.5
    }

    /// Majority vote; a tie goes to the negative class.
    pub fn predict(&self, features: &[f64]) -> bool {
        let votes = self
            .trees
            .iter()
            .filter(|t| t.value(features) > 0.5)
            .count();
        votes * 2 > self.trees.len()
    }
}
