//! Generative models for sensed values, the per-step failure process,
//! detection thresholds, ground truth, and training datasets.

use rand::Rng;
use rand_distr::{Distribution, Normal, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{Result, SimError};
use crate::world::SensorKind;

/// Outcome of one failure-process draw for a sensor location.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Condition {
    Normal,
    AreaFailure,
    SensorBroken,
}

/// Per-kind generative parameters. The normal-condition mean drifts linearly
/// with operating age: `mean(t) = base * (1 + drift * t)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KindModel {
    pub normal_base: f64,
    pub normal_drift: f64,
    pub normal_std: f64,
    pub failure_mean: f64,
    pub failure_std: f64,
    pub broken_constant: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SensingModel {
    pub temperature: KindModel,
    pub pressure: KindModel,
    pub humidity: KindModel,
}

impl Default for SensingModel {
    fn default() -> Self {
        SensingModel {
            temperature: KindModel {
                normal_base: 20.0,
                normal_drift: 0.005,
                normal_std: 1.0,
                failure_mean: 350.0,
                failure_std: 20.0,
                broken_constant: 2.0,
            },
            pressure: KindModel {
                normal_base: 5.0,
                normal_drift: 0.01,
                normal_std: 0.3,
                failure_mean: 20.0,
                failure_std: 2.5,
                broken_constant: 1.0,
            },
            humidity: KindModel {
                normal_base: 52.5,
                normal_drift: 0.001,
                normal_std: 12.5,
                failure_mean: 80.0,
                failure_std: 10.0,
                broken_constant: 3.0,
            },
        }
    }
}

impl SensingModel {
    pub fn kind(&self, kind: SensorKind) -> &KindModel {
        match kind {
            SensorKind::Temperature => &self.temperature,
            SensorKind::Pressure => &self.pressure,
            SensorKind::Humidity => &self.humidity,
        }
    }

    /// Normal-condition mean at operating age `t`.
    pub fn normal_mean(&self, kind: SensorKind, t: u32) -> f64 {
        let m = self.kind(kind);
        m.normal_base * (1.0 + m.normal_drift * t as f64)
    }

    /// Draw one reading. Broken sensors emit their constant exactly, with no
    /// noise.
    pub fn draw_reading(
        &self,
        kind: SensorKind,
        condition: Condition,
        t: u32,
        rng: &mut impl Rng,
    ) -> f64 {
        let m = self.kind(kind);
        match condition {
            Condition::Normal => Normal::new(self.normal_mean(kind, t), m.normal_std)
                .expect("positive std")
                .sample(rng),
            Condition::AreaFailure => Normal::new(m.failure_mean, m.failure_std)
                .expect("positive std")
                .sample(rng),
            Condition::SensorBroken => m.broken_constant,
        }
    }
}

/// Detection thresholds; a reading strictly above its kind's threshold is a
/// deterioration symptom.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    pub temperature: f64,
    pub pressure: f64,
    pub humidity: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds {
            temperature: 26.0,
            pressure: 7.0,
            humidity: 80.0,
        }
    }
}

impl Thresholds {
    pub fn exceeds(&self, kind: SensorKind, value: f64) -> bool {
        let threshold = match kind {
            SensorKind::Temperature => self.temperature,
            SensorKind::Pressure => self.pressure,
            SensorKind::Humidity => self.humidity,
        };
        value > threshold
    }
}

/// Floor for the hazard denominator (and the literal parameter) past t=100.
const RATE_FLOOR: f64 = 0.01;
/// Count thresholds separating the three outcome branches.
const AREA_FAILURE_MIN: u64 = 1;
const SENSOR_BROKEN_MIN: u64 = 100;

/// The per-step failure process: a Poisson count drawn at rate `hazard(t)`
/// classifies the location as normal, failing, or the sensor as broken.
///
/// Taken literally, the stated parameter `200*(1-0.01t)+0.01` makes nearly
/// every draw exceed 100 at t=0 and none at t=100, i.e. sensors start broken
/// and heal with age. The default therefore uses its reciprocal, which is
/// ~0.005 at t=0 and 100 at t=100 and degrades in the direction every result
/// curve shows. The literal reading stays available behind `literal`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[derive(Default)]
pub struct FailureProcess {
    pub literal: bool,
}


impl FailureProcess {
    /// Poisson rate at operating age `t`; strictly increasing on [0, 100] in
    /// the default reading, clamped beyond.
    pub fn hazard(&self, t: u32) -> f64 {
        let parameter = (200.0 * (1.0 - 0.01 * t as f64) + 0.01).max(RATE_FLOOR);
        if self.literal {
            parameter
        } else {
            1.0 / parameter
        }
    }

    /// Branch classification of a raw Poisson count.
    pub fn condition_from_count(count: u64) -> Condition {
        if count < AREA_FAILURE_MIN {
            Condition::Normal
        } else if count < SENSOR_BROKEN_MIN {
            Condition::AreaFailure
        } else {
            Condition::SensorBroken
        }
    }

    pub fn draw_count(&self, t: u32, rng: &mut impl Rng) -> u64 {
        let poisson = Poisson::new(self.hazard(t)).expect("positive rate");
        poisson.sample(rng) as u64
    }

    pub fn draw_condition(&self, t: u32, rng: &mut impl Rng) -> Condition {
        Self::condition_from_count(self.draw_count(t, rng))
    }

    /// Probabilities of the three branches at age `t`, from the Poisson CDF.
    pub fn branch_probabilities(&self, t: u32) -> [f64; 3] {
        let lambda = self.hazard(t);
        let mut pmf = (-lambda).exp();
        let mut below_failure = 0.0;
        let mut below_broken = 0.0;
        for k in 0..SENSOR_BROKEN_MIN {
            if k < AREA_FAILURE_MIN {
                below_failure += pmf;
            }
            below_broken += pmf;
            pmf *= lambda / (k + 1) as f64;
        }
        let p_normal = below_failure.min(1.0);
        let p_failure = (below_broken - below_failure).max(0.0);
        let p_broken = (1.0 - below_broken).max(0.0);
        [p_normal, p_failure, p_broken]
    }

    /// True area state behind a draw: failing or not. A broken sensor says
    /// nothing about the area, so its location's state is re-drawn between the
    /// two non-broken branches with their probabilities renormalized at the
    /// same age.
    pub fn area_ground_truth(&self, condition: Condition, t: u32, rng: &mut impl Rng) -> bool {
        match condition {
            Condition::AreaFailure => true,
            Condition::Normal => false,
            Condition::SensorBroken => {
                let [p_normal, p_failure, _] = self.branch_probabilities(t);
                let denom = p_normal + p_failure;
                if denom <= f64::EPSILON {
                    return true;
                }
                rng.gen::<f64>() < p_failure / denom
            }
        }
    }
}

/// One labeled feature vector. Masked slots hold whatever the active impute
/// policy wrote.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub features: Vec<f64>,
    /// true = area failure.
    pub label: bool,
    pub missing_mask: Vec<bool>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DatasetConfig {
    /// Number of instances.
    pub n: usize,
    /// Feature slots per kind, in `SensorKind::ALL` order.
    pub per_kind: [usize; 3],
    /// Operating ages are drawn uniformly over `t_min..=t_max`.
    pub t_min: u32,
    pub t_max: u32,
    /// Keep rows whose draw came up broken (their features are the broken
    /// constants, their label the renormalized re-draw).
    pub include_broken: bool,
}

impl Default for DatasetConfig {
    fn default() -> Self {
        DatasetConfig {
            n: 4000,
            per_kind: [1, 1, 1],
            t_min: 0,
            t_max: 100,
            include_broken: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub instances: Vec<Instance>,
    /// Slot-to-kind map; slots are grouped by kind in `SensorKind::ALL` order.
    pub feature_layout: Vec<SensorKind>,
    pub config: DatasetConfig,
}

impl Dataset {
    pub fn feature_count(&self) -> usize {
        self.feature_layout.len()
    }

    /// Per-feature means, used by the training-mean impute policy.
    pub fn feature_means(&self) -> Vec<f64> {
        let d = self.feature_count();
        let mut means = vec![0.0; d];
        for inst in &self.instances {
            for (m, v) in means.iter_mut().zip(&inst.features) {
                *m += v;
            }
        }
        let n = self.instances.len().max(1) as f64;
        for m in &mut means {
            *m /= n;
        }
        means
    }

    /// Serialize as CSV with header `f0..fk,label`; masked cells are empty.
    pub fn to_csv(&self) -> String {
        let d = self.feature_count();
        let mut out = String::new();
        for i in 0..d {
            out.push_str(&format!("f{i},"));
        }
        out.push_str("label\n");
        for inst in &self.instances {
            for i in 0..d {
                if !inst.missing_mask[i] {
                    out.push_str(&format!("{}", inst.features[i]));
                }
                out.push(',');
            }
            out.push_str(if inst.label { "1" } else { "0" });
            out.push('\n');
        }
        out
    }

    /// Parse the CSV form written by [`Dataset::to_csv`]. Empty cells become
    /// masked zero slots. The layout is reconstructed from the configured
    /// per-kind counts when they match, otherwise every slot is reported as
    /// temperature.
    pub fn from_csv(text: &str, config: DatasetConfig) -> Result<Dataset> {
        let mut lines = text.lines();
        let header = lines
            .next()
            .ok_or_else(|| SimError::DatasetCsv("missing header".into()))?;
        let d = header.split(',').count().saturating_sub(1);
        if d == 0 {
            return Err(SimError::DatasetCsv("header has no feature columns".into()));
        }
        let mut instances = Vec::new();
        for (idx, line) in lines.enumerate() {
            if line.is_empty() {
                continue;
            }
            let cells: Vec<&str> = line.split(',').collect();
            if cells.len() != d + 1 {
                return Err(SimError::DatasetCsv(format!(
                    "row {} has {} cells, expected {}",
                    idx + 1,
                    cells.len(),
                    d + 1
                )));
            }
            let mut features = vec![0.0; d];
            let mut mask = vec![false; d];
            for (i, cell) in cells[..d].iter().enumerate() {
                if cell.is_empty() {
                    mask[i] = true;
                } else {
                    features[i] = cell
                        .parse::<f64>()
                        .map_err(|e| SimError::DatasetCsv(format!("row {}: {e}", idx + 1)))?;
                }
            }
            let label = match cells[d] {
                "0" => false,
                "1" => true,
                other => {
                    return Err(SimError::DatasetCsv(format!(
                        "row {}: bad label {other:?}",
                        idx + 1
                    )))
                }
            };
            instances.push(Instance {
                features,
                label,
                missing_mask: mask,
            });
        }
        let layout = if config.per_kind.iter().sum::<usize>() == d {
            layout_from_counts(config.per_kind)
        } else {
            vec![SensorKind::Temperature; d]
        };
        Ok(Dataset {
            instances,
            feature_layout: layout,
            config,
        })
    }
}

fn layout_from_counts(per_kind: [usize; 3]) -> Vec<SensorKind> {
    let mut layout = Vec::with_capacity(per_kind.iter().sum());
    for (kind, &count) in SensorKind::ALL.iter().zip(per_kind.iter()) {
        layout.extend(std::iter::repeat_n(*kind, count));
    }
    layout
}

/// Generate a complete training set: each instance draws an age, a condition,
/// and one reading per feature slot under that condition; the label is the
/// location's true area state. No values are missing.
pub fn generate_training_set(
    config: &DatasetConfig,
    sensing: &SensingModel,
    failure: &FailureProcess,
    rng: &mut impl Rng,
) -> Result<Dataset> {
    if config.n == 0 || config.per_kind.iter().sum::<usize>() == 0 {
        return Err(SimError::InvalidConfig(
            "training set needs n >= 1 and at least one feature slot".into(),
        ));
    }
    let layout = layout_from_counts(config.per_kind);
    let mut instances = Vec::with_capacity(config.n);
    for _ in 0..config.n {
        let t = rng.gen_range(config.t_min..=config.t_max);
        let condition = loop {
            let c = failure.draw_condition(t, rng);
            if config.include_broken || c != Condition::SensorBroken {
                break c;
            }
        };
        let label = failure.area_ground_truth(condition, t, rng);
        let features: Vec<f64> = layout
            .iter()
            .map(|&kind| sensing.draw_reading(kind, condition, t, rng))
            .collect();
        let missing_mask = vec![false; features.len()];
        instances.push(Instance {
            features,
            label,
            missing_mask,
        });
    }
    Ok(Dataset {
        instances,
        feature_layout: layout,
        config: *config,
    })
}
