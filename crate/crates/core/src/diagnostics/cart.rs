//! CART trees shared by the forest, boosting, and feature-selection models.
//!
//! Split search is exhaustive over midpoints of sorted distinct values, with
//! ties broken by lowest feature index then lowest threshold, so trees are
//! fully deterministic for a given row and feature set.

use rand::Rng;

#[derive(Debug, Clone, PartialEq)]
pub enum TreeNode {
    Leaf(f64),
    Split {
        feature: usize,
        threshold: f64,
        left: Box<TreeNode>,
        right: Box<TreeNode>,
    },
}

impl TreeNode {
    /// Raw leaf payload for a feature vector: positive-class fraction for
    /// classification trees, fitted value for regression trees.
    pub fn value(&self, features: &[f64]) -> f64 {
        let mut node = self;
        loop {
            match node {
                TreeNode::Leaf(v) => return *v,
                TreeNode::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    node = if features[*feature] <= *threshold {
                        left
                    } else {
                        right
                    };
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct GrowParams {
    pub max_depth: usize,
    /// Features examined per split; `None` means all.
    pub mtry: Option<usize>,
    pub min_samples_split: usize,
}

struct BestSplit {
    feature: usize,
    threshold: f64,
    score: f64,
    gain: f64,
}

fn gini(positives: f64, total: f64) -> f64 {
    if total <= 0.0 {
        return 0.0;
    }
    let p = positives / total;
    2.0 * p * (1.0 - p)
}

/// Candidate features for one split, ascending so tie-breaking stays stable.
fn candidate_features(d: usize, mtry: Option<usize>, rng: &mut impl Rng) -> Vec<usize> {
    match mtry {
        Some(m) if m < d => {
            let mut picked: Vec<usize> = rand::seq::index::sample(rng, d, m).into_iter().collect();
            picked.sort_unstable();
            picked
        }
        _ => (0..d).collect(),
    }
}

/// Grow a classification tree on boolean labels with Gini impurity. Leaves
/// hold the positive-class fraction. `importance` accumulates per-feature
/// impurity decrease weighted by node size.
pub fn grow_classification(
    x: &[Vec<f64>],
    y: &[bool],
    rows: Vec<usize>,
    params: &GrowParams,
    rng: &mut impl Rng,
    importance: &mut [f64],
) -> TreeNode {
    let total = rows.len() as f64;
    let positives = rows.iter().filter(|&&r| y[r]).count() as f64;
    let node_impurity = gini(positives, total);
    let leaf = TreeNode::Leaf(positives / total.max(1.0));
    if params.max_depth == 0 || rows.len() < params.min_samples_split || node_impurity == 0.0 {
        return leaf;
    }
    let d = x[0].len();
    let features = candidate_features(d, params.mtry, rng);
    let mut best: Option<BestSplit> = None;
    for &f in &features {
        let mut order: Vec<usize> = rows.clone();
        order.sort_unstable_by(|&a, &b| x[a][f].partial_cmp(&x[b][f]).unwrap());
        let mut left_pos = 0.0;
        let mut left_n = 0.0;
        for i in 0..order.len() - 1 {
            if y[order[i]] {
                left_pos += 1.0;
            }
            left_n += 1.0;
            let (va, vb) = (x[order[i]][f], x[order[i + 1]][f]);
            if va == vb {
                continue;
            }
            let right_n = total - left_n;
            let right_pos = positives - left_pos;
            let score = left_n * gini(left_pos, left_n) + right_n * gini(right_pos, right_n);
            if best.as_ref().is_none_or(|b| score < b.score) {
                best = Some(BestSplit {
                    feature: f,
                    threshold: (va + vb) / 2.0,
                    score,
                    gain: total * node_impurity - score,
                });
            }
        }
    }
    let Some(split) = best else { return leaf };
    if split.gain <= 1e-12 {
        return leaf;
    }
    importance[split.feature] += split.gain;
    let (left_rows, right_rows): (Vec<usize>, Vec<usize>) = rows
        .into_iter()
        .partition(|&r| x[r][split.feature] <= split.threshold);
    let child_params = GrowParams {
        max_depth: params.max_depth - 1,
        ..*params
    };
    TreeNode::Split {
        feature: split.feature,
        threshold: split.threshold,
        left: Box::new(grow_classification(
            x,
            y,
            left_rows,
            &child_params,
            rng,
            importance,
        )),
        right: Box::new(grow_classification(
            x,
            y,
            right_rows,
            &child_params,
            rng,
            importance,
        )),
    }
}

/// Grow a regression tree on real-valued targets with squared-error splits.
/// `leaf_value` maps a leaf's member rows onto its payload, which lets the
/// boosting model install Newton-step values.
pub fn grow_regression(
    x: &[Vec<f64>],
    targets: &[f64],
    rows: Vec<usize>,
    max_depth: usize,
    min_samples_split: usize,
    leaf_value: &impl Fn(&[usize]) -> f64,
) -> TreeNode {
    let total = rows.len() as f64;
    let sum: f64 = rows.iter().map(|&r| targets[r]).sum();
    let sum_sq: f64 = rows.iter().map(|&r| targets[r] * targets[r]).sum();
    let node_sse = sum_sq - sum * sum / total.max(1.0);
    if max_depth == 0 || rows.len() < min_samples_split || node_sse <= 1e-12 {
        return TreeNode::Leaf(leaf_value(&rows));
    }
    let d = x[0].len();
    let mut best: Option<BestSplit> = None;
    for f in 0..d {
        let mut order: Vec<usize> = rows.clone();
        order.sort_unstable_by(|&a, &b| x[a][f].partial_cmp(&x[b][f]).unwrap());
        let mut left_sum = 0.0;
        let mut left_sq = 0.0;
        let mut left_n = 0.0;
        for i in 0..order.len() - 1 {
            let t = targets[order[i]];
            left_sum += t;
            left_sq += t * t;
            left_n += 1.0;
            let (va, vb) = (x[order[i]][f], x[order[i + 1]][f]);
            if va == vb {
                continue;
            }
            let right_n = total - left_n;
            let right_sum = sum - left_sum;
            let right_sq = sum_sq - left_sq;
            let left_sse = left_sq - left_sum * left_sum / left_n;
            let right_sse = right_sq - right_sum * right_sum / right_n;
            let score = left_sse + right_sse;
            if best.as_ref().is_none_or(|b| score < b.score) {
                best = Some(BestSplit {
                    feature: f,
                    threshold: (va + vb) / 2.0,
                    score,
                    gain: node_sse - score,
                });
            }
        }
    }
    let Some(split) = best else {
        return TreeNode::Leaf(leaf_value(&rows));
    };
    if split.gain <= 1e-12 {
        return TreeNode::Leaf(leaf_value(&rows));
    }
    let (left_rows, right_rows): (Vec<usize>, Vec<usize>) = rows
        .into_iter()
        .partition(|&r| x[r][split.feature] <= split.threshold);
    TreeNode::Split {
        feature: split.feature,
        threshold: split.threshold,
        left: Box::new(grow_regression(
            x,
            targets,
            left_rows,
            max_depth - 1,
            min_samples_split,
            leaf_value,
        )),
        right: Box::new(grow_regression(
            x,
            targets,
            right_rows,
            max_depth - 1,
            min_samples_split,
            leaf_value,
        )),
    }
}
