//! The six diagnostic algorithms, trained on generated datasets and evaluated
//! per simulation step.

pub mod cart;
pub mod forest;
pub mod gtb;
pub mod naive_bayes;
pub mod nearest;
pub mod oracle;
pub mod svm;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::datagen::{Dataset, Instance};
use crate::error::{Result, SimError};

pub use forest::ForestParams;
pub use gtb::GtbParams;
pub use naive_bayes::NbParams;
pub use nearest::NnParams;
pub use svm::SvmParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AlgorithmKind {
    Svm,
    NaiveBayes,
    RandomForest,
    GradientTreeBoosting,
    TreeBasedFeatureSelection,
    NearestNeighbors,
}

impl AlgorithmKind {
    pub const ALL: [AlgorithmKind; 6] = [
        AlgorithmKind::Svm,
        AlgorithmKind::NaiveBayes,
        AlgorithmKind::RandomForest,
        AlgorithmKind::GradientTreeBoosting,
        AlgorithmKind::TreeBasedFeatureSelection,
        AlgorithmKind::NearestNeighbors,
    ];

    pub fn name(self) -> &'static str {
        match self {
            AlgorithmKind::Svm => "SVM",
            AlgorithmKind::NaiveBayes => "NB",
            AlgorithmKind::RandomForest => "RF",
            AlgorithmKind::GradientTreeBoosting => "GTB",
            AlgorithmKind::TreeBasedFeatureSelection => "TBFS",
            AlgorithmKind::NearestNeighbors => "NN",
        }
    }

    pub fn index(self) -> usize {
        Self::ALL.iter().position(|k| *k == self).unwrap()
    }
}

impl std::fmt::Display for AlgorithmKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Feature-selection stage: rank by forest importance, keep the top slice,
/// refit a forest on the reduced features.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TbfsParams {
    pub top_k: usize,
    pub forest: ForestParams,
}

impl Default for TbfsParams {
    fn default() -> Self {
        TbfsParams {
            top_k: 2,
            forest: ForestParams::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct Hyperparameters {
    pub svm: SvmParams,
    pub naive_bayes: NbParams,
    pub random_forest: ForestParams,
    pub gradient_tree_boosting: GtbParams,
    pub tree_based_feature_selection: TbfsParams,
    pub nearest_neighbors: NnParams,
}

/// Per-feature mean/std fitted on training data only; models that need scale
/// invariance carry their own copy.
#[derive(Debug, Clone, PartialEq)]
pub struct Standardizer {
    means: Vec<f64>,
    stds: Vec<f64>,
}

impl Standardizer {
    pub fn fit(x: &[Vec<f64>]) -> Self {
        let n = x.len() as f64;
        let d = x[0].len();
        let mut means = vec![0.0; d];
        for row in x {
            for (m, v) in means.iter_mut().zip(row) {
                *m += v;
            }
        }
        for m in &mut means {
            *m /= n;
        }
        let mut stds = vec![0.0; d];
        for row in x {
            for (s, (v, m)) in stds.iter_mut().zip(row.iter().zip(&means)) {
                *s += (v - m) * (v - m);
            }
        }
        for s in &mut stds {
            *s = (*s / n).sqrt().max(1e-9);
        }
        Standardizer { means, stds }
    }

    pub fn transform(&self, row: &[f64]) -> Vec<f64> {
        row.iter()
            .zip(&self.means)
            .zip(&self.stds)
            .map(|((v, m), s)| (v - m) / s)
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
struct TbfsModel {
    selected: Vec<usize>,
    inner: forest::ForestModel,
    /// Importance ranking of the full feature set, most important first.
    ranking: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
enum Inner {
    Svm(svm::SvmModel),
    NaiveBayes(naive_bayes::NbModel),
    RandomForest(forest::ForestModel),
    GradientTreeBoosting(gtb::GtbModel),
    TreeBasedFeatureSelection(TbfsModel),
    NearestNeighbors(nearest::NnModel),
}

/// A trained diagnostic model. Immutable after training; safe to share
/// across threads for parallel evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct Model {
    pub kind: AlgorithmKind,
    pub feature_count: usize,
    inner: Inner,
}

fn extract(data: &Dataset) -> (Vec<Vec<f64>>, Vec<bool>) {
    let x = data.instances.iter().map(|i| i.features.clone()).collect();
    let y = data.instances.iter().map(|i| i.label).collect();
    (x, y)
}

fn validate_training(data: &Dataset) -> Result<()> {
    if data.instances.is_empty() {
        return Err(SimError::EmptyTrainingSet);
    }
    let positives = data.instances.iter().filter(|i| i.label).count();
    if positives == 0 || positives == data.instances.len() {
        return Err(SimError::SingleClassTraining);
    }
    Ok(())
}

/// Train one algorithm on a complete dataset. Deterministic for a given
/// generator state.
pub fn train(
    kind: AlgorithmKind,
    data: &Dataset,
    hp: &Hyperparameters,
    rng: &mut impl Rng,
) -> Result<Model> {
    validate_training(data)?;
    let (x, y) = extract(data);
    let inner = match kind {
        AlgorithmKind::Svm => {
            let standardizer = Standardizer::fit(&x);
            Inner::Svm(svm::train_svm(&x, &y, &hp.svm, standardizer, rng))
        }
        AlgorithmKind::NaiveBayes => {
            Inner::NaiveBayes(naive_bayes::train_nb(&x, &y, &hp.naive_bayes))
        }
        AlgorithmKind::RandomForest => {
            Inner::RandomForest(forest::train_forest(&x, &y, &hp.random_forest, rng))
        }
        AlgorithmKind::GradientTreeBoosting => {
            Inner::GradientTreeBoosting(gtb::train_gtb(&x, &y, &hp.gradient_tree_boosting))
        }
        AlgorithmKind::TreeBasedFeatureSelection => {
            let params = &hp.tree_based_feature_selection;
            let probe = forest::train_forest(&x, &y, &params.forest, rng);
            let mut ranking: Vec<usize> = (0..data.feature_count()).collect();
            ranking.sort_by(|&a, &b| {
                probe.importances[b]
                    .partial_cmp(&probe.importances[a])
                    .unwrap()
                    .then(a.cmp(&b))
            });
            let mut selected: Vec<usize> = ranking[..params.top_k.min(ranking.len())].to_vec();
            selected.sort_unstable();
            let reduced: Vec<Vec<f64>> = x
                .iter()
                .map(|row| selected.iter().map(|&i| row[i]).collect())
                .collect();
            let inner = forest::train_forest(&reduced, &y, &params.forest, rng);
            Inner::TreeBasedFeatureSelection(TbfsModel {
                selected,
                inner,
                ranking,
            })
        }
        AlgorithmKind::NearestNeighbors => {
            let standardizer = Standardizer::fit(&x);
            Inner::NearestNeighbors(nearest::train_nn(
                &x,
                &y,
                &hp.nearest_neighbors,
                standardizer,
            ))
        }
    };
    Ok(Model {
        kind,
        feature_count: data.feature_count(),
        inner,
    })
}

impl Model {
    pub fn predict(&self, features: &[f64]) -> Result<bool> {
        if features.len() != self.feature_count {
            return Err(SimError::FeatureCountMismatch {
                expected: self.feature_count,
                got: features.len(),
            });
        }
        Ok(match &self.inner {
            Inner::Svm(m) => m.predict(features),
            Inner::NaiveBayes(m) => m.predict(features),
            Inner::RandomForest(m) => m.predict(features),
            Inner::GradientTreeBoosting(m) => m.predict(features),
            Inner::TreeBasedFeatureSelection(m) => {
                let reduced: Vec<f64> = m.selected.iter().map(|&i| features[i]).collect();
                m.inner.predict(&reduced)
            }
            Inner::NearestNeighbors(m) => m.predict(features),
        })
    }

    /// Selected feature indices, for feature-selection models.
    pub fn selected_features(&self) -> Option<&[usize]> {
        match &self.inner {
            Inner::TreeBasedFeatureSelection(m) => Some(&m.selected),
            _ => None,
        }
    }

    /// Full importance ranking, for feature-selection models.
    pub fn feature_ranking(&self) -> Option<&[usize]> {
        match &self.inner {
            Inner::TreeBasedFeatureSelection(m) => Some(&m.ranking),
            _ => None,
        }
    }

    pub fn gtb_train_losses(&self) -> Option<&[f64]> {
        match &self.inner {
            Inner::GradientTreeBoosting(m) => Some(&m.train_losses),
            _ => None,
        }
    }

    pub fn svm_objective(&self) -> Option<f64> {
        match &self.inner {
            Inner::Svm(m) => Some(m.objective),
            _ => None,
        }
    }

    pub fn forest(&self) -> Option<&forest::ForestModel> {
        match &self.inner {
            Inner::RandomForest(m) => Some(m),
            _ => None,
        }
    }
}

/// Misclassified fraction over an instance list.
pub fn error_rate(model: &Model, instances: &[Instance]) -> Result<f64> {
    if instances.is_empty() {
        return Err(SimError::EmptyEvaluation);
    }
    let mut wrong = 0usize;
    for inst in instances {
        if model.predict(&inst.features)? != inst.label {
            wrong += 1;
        }
    }
    Ok(wrong as f64 / instances.len() as f64)
}
