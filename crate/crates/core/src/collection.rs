//! Per-step data flow: sense, aggregate at cluster heads, deliver to the
//! sink, and assemble diagnostic instances with missing-data handling.

use std::collections::BTreeMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::datagen::{Condition, FailureProcess, Instance, SensingModel};
use crate::energy::TrafficLedger;
use crate::error::{Result, SimError};
use crate::topology::{Route, RoutingPlan, TopologyKind};
use crate::world::{distance, Fleet, HealthState, NodeId, Point, SensorKind};

/// One unit of data arriving at the sink: a raw reading or a window average.
#[derive(Debug, Clone, PartialEq)]
pub struct Packet {
    pub origins: Vec<NodeId>,
    pub kind: SensorKind,
    pub value: f64,
    /// Readings averaged into this packet; 1 for raw.
    pub aggregated_count: u32,
    /// Position the value is attributed to: the sensor for raw packets, the
    /// aggregating cluster head for averages.
    pub position: Point,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DeliveryStatus {
    Delivered,
    LostDisconnected,
    SilentDead,
}

impl DeliveryStatus {
    pub fn name(self) -> &'static str {
        match self {
            DeliveryStatus::Delivered => "delivered",
            DeliveryStatus::LostDisconnected => "lost_disconnected",
            DeliveryStatus::SilentDead => "silent_dead",
        }
    }
}

/// What actually reached the sink at one step, with per-location provenance
/// and the true area state behind each sensor location.
#[derive(Debug, Clone, PartialEq)]
pub struct SinkSnapshot {
    pub t: u32,
    pub delivered: Vec<Packet>,
    /// Status per leaf location, indexed by leaf id.
    pub status: Vec<DeliveryStatus>,
    /// True area state per leaf location (true = failure).
    pub ground_truth: Vec<bool>,
}

impl SinkSnapshot {
    pub fn delivered_reading_count(&self) -> usize {
        self.status
            .iter()
            .filter(|s| **s == DeliveryStatus::Delivered)
            .count()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AggregationConfig {
    /// Window size S: same-kind readings averaged into one packet.
    pub window: usize,
}

impl Default for AggregationConfig {
    fn default() -> Self {
        AggregationConfig { window: 3 }
    }
}

/// Arithmetic mean of a window.
pub fn aggregate(values: &[f64]) -> Result<f64> {
    if values.is_empty() {
        return Err(SimError::EmptyAggregation);
    }
    Ok(values.iter().sum::<f64>() / values.len() as f64)
}

/// Run one sensing round over the fleet: every live sensor draws its
/// condition and reading and emits one packet along its route; cluster heads
/// average same-kind windows and forward one packet per window (remainders
/// flush at step end); the ledger records every send, receive, and
/// aggregation with hop distances. Deterministic for a given generator state.
pub fn run_step(
    fleet: &mut Fleet,
    plan: &RoutingPlan,
    t: u32,
    agg: &AggregationConfig,
    sensing: &SensingModel,
    failure: &FailureProcess,
    rng: &mut impl Rng,
) -> Result<(SinkSnapshot, TrafficLedger)> {
    let leaf_count = fleet.leaf_count();
    let mut ledger = TrafficLedger::new(fleet.len());
    let mut status = vec![DeliveryStatus::LostDisconnected; leaf_count];
    let mut ground_truth = vec![false; leaf_count];
    let mut readings: Vec<Option<f64>> = vec![None; leaf_count];

    // sensing draws and ground truth, in id order
    for leaf in 0..leaf_count {
        let kind = fleet.nodes[leaf].kind.expect("leaves sense");
        let alive = fleet.nodes[leaf].is_alive();
        if fleet.nodes[leaf].health == HealthState::Broken {
            ground_truth[leaf] = failure.area_ground_truth(Condition::SensorBroken, t, rng);
            readings[leaf] = Some(sensing.kind(kind).broken_constant);
        } else {
            let condition = failure.draw_condition(t, rng);
            ground_truth[leaf] = failure.area_ground_truth(condition, t, rng);
            if alive {
                if condition == Condition::SensorBroken {
                    // absorbing: the sensor stays broken from here on
                    fleet.nodes[leaf].health = HealthState::Broken;
                }
                readings[leaf] = Some(sensing.draw_reading(kind, condition, t, rng));
            }
            // dead locations still have an area state; the draw above only
            // feeds the label
        }
        if !alive {
            status[leaf] = DeliveryStatus::SilentDead;
            readings[leaf] = None;
        }
    }

    let mut delivered: Vec<Packet> = Vec::new();
    match plan.kind {
        TopologyKind::Decentralized => {
            // leaf -> cluster head, buffered per (head, kind)
            let mut buffers: BTreeMap<(NodeId, usize), Vec<(f64, NodeId)>> = BTreeMap::new();
            for leaf in 0..leaf_count {
                let Some(value) = readings[leaf] else {
                    continue;
                };
                let kind = fleet.nodes[leaf].kind.expect("leaves sense");
                let head = match plan.parent[leaf] {
                    Some(h) if fleet.nodes[h].is_alive() => h,
                    _ => {
                        status[leaf] = DeliveryStatus::LostDisconnected;
                        continue;
                    }
                };
                ledger.record_send(leaf, distance(fleet.position(leaf), fleet.position(head)));
                ledger.record_receive(head);
                buffers
                    .entry((head, kind.index()))
                    .or_default()
                    .push((value, leaf));
            }
            // window, aggregate, forward along the head chain
            for ((head, kind_index), entries) in buffers {
                let kind = SensorKind::ALL[kind_index];
                let route = route_of(plan, head)?;
                for chunk in entries.chunks(agg.window.max(1)) {
                    let values: Vec<f64> = chunk.iter().map(|(v, _)| *v).collect();
                    let origins: Vec<NodeId> = chunk.iter().map(|(_, id)| *id).collect();
                    let value = aggregate(&values)?;
                    ledger.record_aggregate(head, chunk.len());
                    match &route {
                        Some(hops) => {
                            forward(fleet, &mut ledger, head, hops);
                            for &o in &origins {
                                status[o] = DeliveryStatus::Delivered;
                            }
                            delivered.push(Packet {
                                origins,
                                kind,
                                value,
                                aggregated_count: chunk.len() as u32,
                                position: fleet.position(head),
                            });
                        }
                        None => {
                            for &o in &origins {
                                status[o] = DeliveryStatus::LostDisconnected;
                            }
                        }
                    }
                }
            }
        }
        _ => {
            for leaf in 0..leaf_count {
                let Some(value) = readings[leaf] else {
                    continue;
                };
                let kind = fleet.nodes[leaf].kind.expect("leaves sense");
                match route_of(plan, leaf)? {
                    Some(hops) => {
                        forward(fleet, &mut ledger, leaf, &hops);
                        status[leaf] = DeliveryStatus::Delivered;
                        delivered.push(Packet {
                            origins: vec![leaf],
                            kind,
                            value,
                            aggregated_count: 1,
                            position: fleet.position(leaf),
                        });
                    }
                    None => status[leaf] = DeliveryStatus::LostDisconnected,
                }
            }
        }
    }

    Ok((
        SinkSnapshot {
            t,
            delivered,
            status,
            ground_truth,
        },
        ledger,
    ))
}

fn route_of(plan: &RoutingPlan, id: NodeId) -> Result<Option<Vec<NodeId>>> {
    match crate::topology::route_to_sink(plan, id)? {
        Route::Connected(hops) => Ok(Some(hops)),
        Route::Disconnected => Ok(None),
    }
}

/// Charge one packet's trip from `origin` through `hops` to the sink.
fn forward(fleet: &Fleet, ledger: &mut TrafficLedger, origin: NodeId, hops: &[NodeId]) {
    let sink = fleet.region.sink();
    let mut current = origin;
    for &hop in hops {
        ledger.record_send(
            current,
            distance(fleet.position(current), fleet.position(hop)),
        );
        ledger.record_receive(hop);
        current = hop;
    }
    ledger.record_send(current, distance(fleet.position(current), sink));
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InstanceMode {
    /// One instance per sensor location; each feature is the nearest
    /// delivered value of its kind.
    PerLocation,
    /// One instance with a slot per sensor, ordered by node id; an aggregate
    /// is written into each contributing slot.
    Global,
}

/// How missing feature slots are filled.
#[derive(Debug, Clone, PartialEq)]
pub enum ImputePolicy {
    SentinelZero,
    TrainingMean(Vec<f64>),
}

impl ImputePolicy {
    fn fill(&self, slot: usize) -> f64 {
        match self {
            ImputePolicy::SentinelZero => 0.0,
            ImputePolicy::TrainingMean(means) => means.get(slot).copied().unwrap_or(0.0),
        }
    }
}

/// Write the policy's fill value into masked slots.
pub fn impute(values: &[f64], mask: &[bool], policy: &ImputePolicy) -> Vec<f64> {
    assert_eq!(values.len(), mask.len());
    values
        .iter()
        .zip(mask)
        .enumerate()
        .map(|(i, (&v, &m))| if m { policy.fill(i) } else { v })
        .collect()
}

/// Turn one snapshot into classifier inputs.
pub fn assemble_instances(
    snapshot: &SinkSnapshot,
    fleet: &Fleet,
    mode: InstanceMode,
    policy: &ImputePolicy,
) -> Vec<Instance> {
    let leaf_count = snapshot.status.len();
    match mode {
        InstanceMode::PerLocation => {
            let mut by_kind: [Vec<&Packet>; 3] = [Vec::new(), Vec::new(), Vec::new()];
            for p in &snapshot.delivered {
                by_kind[p.kind.index()].push(p);
            }
            (0..leaf_count)
                .map(|leaf| {
                    let here = fleet.position(leaf);
                    let mut features = vec![0.0; 3];
                    let mut mask = vec![false; 3];
                    for (slot, packets) in by_kind.iter().enumerate() {
                        let nearest = packets
                            .iter()
                            .map(|p| {
                                let d2 = (p.position.x - here.x).powi(2)
                                    + (p.position.y - here.y).powi(2);
                                (d2, p)
                            })
                            .min_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
                        match nearest {
                            Some((_, p)) => features[slot] = p.value,
                            None => mask[slot] = true,
                        }
                    }
                    let features = impute(&features, &mask, policy);
                    Instance {
                        features,
                        label: snapshot.ground_truth[leaf],
                        missing_mask: mask,
                    }
                })
                .collect()
        }
        InstanceMode::Global => {
            let mut features = vec![0.0; leaf_count];
            let mut mask = vec![true; leaf_count];
            for p in &snapshot.delivered {
                for &origin in &p.origins {
                    features[origin] = p.value;
                    mask[origin] = false;
                }
            }
            let features = impute(&features, &mask, policy);
            let failures = snapshot.ground_truth.iter().filter(|&&g| g).count();
            let label = failures * 2 >= leaf_count;
            vec![Instance {
                features,
                label,
                missing_mask: mask,
            }]
        }
    }
}

/// Snapshot export CSV: `t,node_id,status,kind,value,aggregated_count`; the
/// value cell is empty for locations whose reading never arrived.
pub fn snapshot_csv(snapshot: &SinkSnapshot, fleet: &Fleet) -> String {
    let mut per_leaf: Vec<Option<&Packet>> = vec![None; snapshot.status.len()];
    for p in &snapshot.delivered {
        for &origin in &p.origins {
            per_leaf[origin] = Some(p);
        }
    }
    let mut out = String::from("t,node_id,status,kind,value,aggregated_count\n");
    for leaf in 0..snapshot.status.len() {
        let kind = fleet.nodes[leaf].kind.map(|k| k.name()).unwrap_or("");
        match per_leaf[leaf] {
            Some(p) => out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                snapshot.t,
                leaf,
                snapshot.status[leaf].name(),
                kind,
                p.value,
                p.aggregated_count
            )),
            None => out.push_str(&format!(
                "{},{},{},{},,\n",
                snapshot.t,
                leaf,
                snapshot.status[leaf].name(),
                kind
            )),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seeding;
    use crate::topology::{build, NextHop, TopologyConfig};
    use crate::world::{deploy, Node, NodeRole, Point, Region};
    use proptest::prelude::*;

    fn default_region() -> Region {
        Region::new(100.0, 100.0, Point::new(50.0, 50.0)).unwrap()
    }

    fn default_fleet(seed: u64) -> Fleet {
        deploy(
            default_region(),
            [100, 100, 100],
            300.0,
            &mut seeding::stream(seed, &[seeding::tag::DEPLOY]),
        )
        .unwrap()
    }

    #[test]
    fn aggregate_examples() {
        assert_eq!(aggregate(&[1.0, 2.0, 3.0]).unwrap(), 2.0);
        assert_eq!(aggregate(&[5.0]).unwrap(), 5.0);
        assert!((aggregate(&[20.1, 19.9, 20.0]).unwrap() - 20.0).abs() < 1e-12);
        assert!(matches!(aggregate(&[]), Err(SimError::EmptyAggregation)));
    }

    proptest! {
        #[test]
        fn aggregate_stays_within_bounds(values in proptest::collection::vec(-1e6..1e6f64, 1..40)) {
            let mean = aggregate(&values).unwrap();
            let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
            let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            prop_assert!(mean >= min - 1e-9 && mean <= max + 1e-9);
        }
    }

    #[test]
    fn centralized_step_delivers_every_reading() {
        let mut fleet = default_fleet(1);
        let plan = build(
            TopologyKind::Centralized,
            &mut fleet,
            &TopologyConfig::default(),
            &mut seeding::stream(1, &[]),
        )
        .unwrap();
        let (snapshot, ledger) = run_step(
            &mut fleet,
            &plan,
            0,
            &AggregationConfig::default(),
            &SensingModel::default(),
            &FailureProcess::default(),
            &mut seeding::stream(1, &[seeding::tag::SIM]),
        )
        .unwrap();
        assert_eq!(snapshot.delivered.len(), 300);
        assert!(snapshot
            .status
            .iter()
            .all(|s| *s == DeliveryStatus::Delivered));
        assert!(snapshot.delivered.iter().all(|p| p.aggregated_count == 1));
        // each leaf paid exactly one transmission, nobody received
        for leaf in 0..fleet.leaf_count() {
            assert_eq!(ledger.packets_sent(leaf), 1);
            assert_eq!(ledger.packets_received(leaf), 0);
        }
    }

    /// Hand-built decentralized fleet: six temperature sensors on one cluster
    /// head produce two window-of-three aggregates.
    #[test]
    fn cluster_head_windows_of_three() {
        let region = default_region();
        let mut fleet = deploy(region, [6, 0, 0], 300.0, &mut seeding::stream(2, &[])).unwrap();
        let head = fleet.push_infra(NodeRole::ClusterHead, Point::new(50.0, 40.0), 1500.0);
        let mut next_hop = vec![NextHop::Node(head); 6];
        next_hop.push(NextHop::Sink);
        let plan = RoutingPlan {
            kind: TopologyKind::Decentralized,
            next_hop,
            parent: (0..6).map(|_| Some(head)).chain([None]).collect(),
            layer: None,
        };
        let (snapshot, ledger) = run_step(
            &mut fleet,
            &plan,
            0,
            &AggregationConfig { window: 3 },
            &SensingModel::default(),
            &FailureProcess::default(),
            &mut seeding::stream(2, &[seeding::tag::SIM]),
        )
        .unwrap();
        assert_eq!(snapshot.delivered.len(), 2);
        for p in &snapshot.delivered {
            assert_eq!(p.kind, SensorKind::Temperature);
            assert_eq!(p.aggregated_count, 3);
            assert_eq!(p.position, Point::new(50.0, 40.0));
        }
        // head received six and transmitted two aggregates
        assert_eq!(ledger.packets_received(head), 6);
        assert_eq!(ledger.packets_sent(head), 2);
    }

    #[test]
    fn remainder_window_flushes() {
        let region = default_region();
        let mut fleet = deploy(region, [4, 0, 0], 300.0, &mut seeding::stream(3, &[])).unwrap();
        let head = fleet.push_infra(NodeRole::ClusterHead, Point::new(50.0, 40.0), 1500.0);
        let mut next_hop = vec![NextHop::Node(head); 4];
        next_hop.push(NextHop::Sink);
        let plan = RoutingPlan {
            kind: TopologyKind::Decentralized,
            next_hop,
            parent: (0..4).map(|_| Some(head)).chain([None]).collect(),
            layer: None,
        };
        let (snapshot, _) = run_step(
            &mut fleet,
            &plan,
            0,
            &AggregationConfig { window: 3 },
            &SensingModel::default(),
            &FailureProcess::default(),
            &mut seeding::stream(3, &[]),
        )
        .unwrap();
        let mut counts: Vec<u32> = snapshot
            .delivered
            .iter()
            .map(|p| p.aggregated_count)
            .collect();
        counts.sort();
        assert_eq!(counts, vec![1, 3]);
    }

    #[test]
    fn disconnected_leaf_is_marked_lost() {
        let region = default_region();
        let mut fleet = deploy(region, [2, 0, 0], 300.0, &mut seeding::stream(4, &[])).unwrap();
        let plan = RoutingPlan {
            kind: TopologyKind::Distributed,
            next_hop: vec![NextHop::Disconnected, NextHop::Sink],
            parent: vec![None, None],
            layer: None,
        };
        let (snapshot, ledger) = run_step(
            &mut fleet,
            &plan,
            0,
            &AggregationConfig::default(),
            &SensingModel::default(),
            &FailureProcess::default(),
            &mut seeding::stream(4, &[]),
        )
        .unwrap();
        assert_eq!(snapshot.status[0], DeliveryStatus::LostDisconnected);
        assert_eq!(snapshot.status[1], DeliveryStatus::Delivered);
        assert_eq!(snapshot.delivered.len(), 1);
        assert_eq!(ledger.packets_sent(0), 0);
    }

    #[test]
    fn dead_leaf_is_silent_but_still_labeled() {
        let region = default_region();
        let mut fleet = deploy(region, [2, 0, 0], 300.0, &mut seeding::stream(5, &[])).unwrap();
        fleet.nodes[0].health = HealthState::Dead;
        fleet.nodes[0].battery = 0.0;
        let plan = RoutingPlan {
            kind: TopologyKind::Centralized,
            next_hop: vec![NextHop::Disconnected, NextHop::Sink],
            parent: vec![None, None],
            layer: None,
        };
        let (snapshot, ledger) = run_step(
            &mut fleet,
            &plan,
            0,
            &AggregationConfig::default(),
            &SensingModel::default(),
            &FailureProcess::default(),
            &mut seeding::stream(5, &[]),
        )
        .unwrap();
        assert_eq!(snapshot.status[0], DeliveryStatus::SilentDead);
        assert_eq!(snapshot.ground_truth.len(), 2);
        assert!(ledger.is_idle(0));
    }

    #[test]
    fn per_location_full_delivery_has_no_masks() {
        let mut fleet = default_fleet(6);
        let plan = build(
            TopologyKind::Centralized,
            &mut fleet,
            &TopologyConfig::default(),
            &mut seeding::stream(6, &[]),
        )
        .unwrap();
        let (snapshot, _) = run_step(
            &mut fleet,
            &plan,
            0,
            &AggregationConfig::default(),
            &SensingModel::default(),
            &FailureProcess::default(),
            &mut seeding::stream(6, &[]),
        )
        .unwrap();
        let instances = assemble_instances(
            &snapshot,
            &fleet,
            InstanceMode::PerLocation,
            &ImputePolicy::SentinelZero,
        );
        assert_eq!(instances.len(), 300);
        assert!(instances
            .iter()
            .all(|i| i.features.len() == 3 && i.missing_mask.iter().all(|&m| !m)));
        // a leaf's own-kind feature is its own delivered reading
        let leaf0_value = snapshot
            .delivered
            .iter()
            .find(|p| p.origins == vec![0])
            .unwrap()
            .value;
        assert_eq!(instances[0].features[0], leaf0_value);
    }

    #[test]
    fn everything_dead_yields_sentinel_instances() {
        let snapshot = SinkSnapshot {
            t: 40,
            delivered: vec![],
            status: vec![DeliveryStatus::SilentDead; 5],
            ground_truth: vec![true, false, true, false, false],
        };
        let fleet = {
            let mut f = deploy(
                default_region(),
                [5, 0, 0],
                300.0,
                &mut seeding::stream(7, &[]),
            )
            .unwrap();
            for n in &mut f.nodes {
                n.health = HealthState::Dead;
                n.battery = 0.0;
            }
            f
        };
        let instances = assemble_instances(
            &snapshot,
            &fleet,
            InstanceMode::PerLocation,
            &ImputePolicy::SentinelZero,
        );
        assert_eq!(instances.len(), 5);
        for inst in &instances {
            assert!(inst.missing_mask.iter().all(|&m| m));
            assert!(inst.features.iter().all(|&f| f == 0.0));
        }
    }

    #[test]
    fn global_mode_expands_aggregates_into_contributor_slots() {
        let fleet = deploy(
            default_region(),
            [5, 0, 0],
            300.0,
            &mut seeding::stream(8, &[]),
        )
        .unwrap();
        let (a, b, c) = (21.0, 19.0, 20.0);
        let snapshot = SinkSnapshot {
            t: 3,
            delivered: vec![Packet {
                origins: vec![0, 2, 4],
                kind: SensorKind::Temperature,
                value: (a + b + c) / 3.0,
                aggregated_count: 3,
                position: Point::new(10.0, 10.0),
            }],
            status: vec![
                DeliveryStatus::Delivered,
                DeliveryStatus::LostDisconnected,
                DeliveryStatus::Delivered,
                DeliveryStatus::LostDisconnected,
                DeliveryStatus::Delivered,
            ],
            ground_truth: vec![false; 5],
        };
        let instances = assemble_instances(
            &snapshot,
            &fleet,
            InstanceMode::Global,
            &ImputePolicy::SentinelZero,
        );
        assert_eq!(instances.len(), 1);
        let inst = &instances[0];
        let expected = (a + b + c) / 3.0;
        for slot in [0usize, 2, 4] {
            assert_eq!(inst.features[slot], expected);
            assert!(!inst.missing_mask[slot]);
        }
        for slot in [1usize, 3] {
            assert_eq!(inst.features[slot], 0.0);
            assert!(inst.missing_mask[slot]);
        }
        assert!(!inst.label);
    }

    #[test]
    fn impute_policies() {
        let values = vec![1.0, 2.0, 3.0];
        let mask = vec![false, true, false];
        assert_eq!(
            impute(&values, &[false; 3], &ImputePolicy::SentinelZero),
            values
        );
        assert_eq!(
            impute(&values, &mask, &ImputePolicy::SentinelZero),
            vec![1.0, 0.0, 3.0]
        );
        assert_eq!(
            impute(
                &values,
                &mask,
                &ImputePolicy::TrainingMean(vec![9.0, 20.0, 9.0])
            ),
            vec![1.0, 20.0, 3.0]
        );
        assert_eq!(
            impute(&[5.0; 2], &[true; 2], &ImputePolicy::SentinelZero),
            vec![0.0, 0.0]
        );
    }

    #[test]
    fn one_value_per_sensor_without_aggregation() {
        for kind in [
            TopologyKind::Distributed,
            TopologyKind::Centralized,
            TopologyKind::Hierarchical,
        ] {
            let mut fleet = default_fleet(9);
            let plan = build(
                kind,
                &mut fleet,
                &TopologyConfig::default(),
                &mut seeding::stream(9, &[kind.index() as u64]),
            )
            .unwrap();
            let (snapshot, _) = run_step(
                &mut fleet,
                &plan,
                0,
                &AggregationConfig::default(),
                &SensingModel::default(),
                &FailureProcess::default(),
                &mut seeding::stream(9, &[kind.index() as u64, 7]),
            )
            .unwrap();
            let delivered = snapshot.delivered.len()
                + snapshot
                    .status
                    .iter()
                    .filter(|s| **s == DeliveryStatus::LostDisconnected)
                    .count();
            assert_eq!(delivered, 300, "{kind}: every live sensor accounted once");
            assert!(snapshot.delivered.iter().all(|p| p.aggregated_count == 1));
        }
    }

    #[test]
    fn snapshot_csv_shape() {
        let mut fleet = default_fleet(10);
        let plan = build(
            TopologyKind::Centralized,
            &mut fleet,
            &TopologyConfig::default(),
            &mut seeding::stream(10, &[]),
        )
        .unwrap();
        let (snapshot, _) = run_step(
            &mut fleet,
            &plan,
            5,
            &AggregationConfig::default(),
            &SensingModel::default(),
            &FailureProcess::default(),
            &mut seeding::stream(10, &[]),
        )
        .unwrap();
        let csv = snapshot_csv(&snapshot, &fleet);
        assert_eq!(csv.lines().count(), 301);
        assert!(csv.starts_with("t,node_id,status,kind,value,aggregated_count\n"));
    }

    #[test]
    fn delivered_never_exceeds_sent() {
        let mut fleet = default_fleet(11);
        let plan = build(
            TopologyKind::Decentralized,
            &mut fleet,
            &TopologyConfig::default(),
            &mut seeding::stream(11, &[]),
        )
        .unwrap();
        let (snapshot, ledger) = run_step(
            &mut fleet,
            &plan,
            0,
            &AggregationConfig::default(),
            &SensingModel::default(),
            &FailureProcess::default(),
            &mut seeding::stream(11, &[]),
        )
        .unwrap();
        let total_sent: usize = (0..fleet.len()).map(|id| ledger.packets_sent(id)).sum();
        assert!(snapshot.delivered.len() <= total_sent);
        let _ = Node {
            id: 0,
            kind: None,
            position: Point::new(0.0, 0.0),
            role: NodeRole::Leaf,
            battery: 1.0,
            health: HealthState::Ok,
        };
    }
}
