//! Build, query, and repair the four topologies' routing structures.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SimError};
use crate::world::{distance, Fleet, NodeId, NodeRole, Point};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TopologyKind {
    Distributed,
    Hierarchical,
    Centralized,
    Decentralized,
}

impl TopologyKind {
    pub const ALL: [TopologyKind; 4] = [
        TopologyKind::Distributed,
        TopologyKind::Hierarchical,
        TopologyKind::Centralized,
        TopologyKind::Decentralized,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TopologyKind::Distributed => "distributed",
            TopologyKind::Hierarchical => "hierarchical",
            TopologyKind::Centralized => "centralized",
            TopologyKind::Decentralized => "decentralized",
        }
    }

    pub fn index(self) -> usize {
        match self {
            TopologyKind::Distributed => 0,
            TopologyKind::Hierarchical => 1,
            TopologyKind::Centralized => 2,
            TopologyKind::Decentralized => 3,
        }
    }
}

impl std::fmt::Display for TopologyKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NextHop {
    Node(NodeId),
    Sink,
    Disconnected,
}

/// Tier of the hierarchical tree below the sink (the core).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Layer {
    Distribution,
    Access,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopologyConfig {
    /// Cluster count for the decentralized topology (K of K-means).
    pub cluster_count: usize,
    pub cluster_head_battery: f64,
    /// Distribution-layer size for the hierarchical topology.
    pub distribution_count: usize,
    pub distribution_battery: f64,
    /// The distribution tier is provisioned on a ring around the sink; the
    /// backbone of an engineered hierarchy sits next to its core.
    pub distribution_ring_radius: f64,
    /// Radio range for the distributed topology, as a multiple of the
    /// coverage radius.
    pub radio_range_factor: f64,
}

impl Default for TopologyConfig {
    fn default() -> Self {
        TopologyConfig {
            cluster_count: 30,
            cluster_head_battery: 1500.0,
            distribution_count: 30,
            distribution_battery: 300.0,
            distribution_ring_radius: 7.0,
            radio_range_factor: 2.0,
        }
    }
}

/// Per-node next-hop structure for one topology. Plans are immutable values;
/// `build` and `repair` produce new ones.
#[derive(Debug, Clone, PartialEq)]
pub struct RoutingPlan {
    pub kind: TopologyKind,
    pub next_hop: Vec<NextHop>,
    /// Leaf-to-parent assignment (cluster head or distribution node).
    pub parent: Vec<Option<NodeId>>,
    /// Tier labels; populated for the hierarchical topology only.
    pub layer: Option<Vec<Layer>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClusterModel {
    pub centroids: Vec<Point>,
    /// Index of the owning centroid per input point.
    pub memberships: Vec<usize>,
}

impl ClusterModel {
    pub fn k(&self) -> usize {
        self.centroids.len()
    }

    /// Total within-cluster squared distance.
    pub fn cost(&self, points: &[Point]) -> f64 {
        points
            .iter()
            .zip(&self.memberships)
            .map(|(p, &m)| {
                let c = self.centroids[m];
                (p.x - c.x).powi(2) + (p.y - c.y).powi(2)
            })
            .sum()
    }
}

/// Lloyd's algorithm with seeded initial centroids chosen from distinct
/// points; ties go to the lowest-index centroid; stops at a membership fixed
/// point or 100 iterations.
pub fn kmeans(points: &[Point], k: usize, rng: &mut impl Rng) -> Result<ClusterModel> {
    if k == 0 || k > points.len() {
        return Err(SimError::InvalidClusterCount {
            k,
            points: points.len(),
        });
    }
    // initial centroids: k distinct coordinates when available
    let mut seen: Vec<Point> = Vec::new();
    let mut distinct: Vec<usize> = Vec::new();
    for (i, p) in points.iter().enumerate() {
        if !seen.iter().any(|q| q == p) {
            seen.push(*p);
            distinct.push(i);
        }
    }
    let pool = if distinct.len() >= k {
        distinct
    } else {
        (0..points.len()).collect()
    };
    let chosen = rand::seq::index::sample(rng, pool.len(), k);
    let mut centroids: Vec<Point> = chosen.iter().map(|i| points[pool[i]]).collect();

    let mut memberships = vec![usize::MAX; points.len()];
    for _ in 0..100 {
        let mut changed = false;
        for (i, p) in points.iter().enumerate() {
            let mut best = 0usize;
            let mut best_d = f64::INFINITY;
            for (c, centroid) in centroids.iter().enumerate() {
                let d = (p.x - centroid.x).powi(2) + (p.y - centroid.y).powi(2);
                if d < best_d {
                    best_d = d;
                    best = c;
                }
            }
            if memberships[i] != best {
                memberships[i] = best;
                changed = true;
            }
        }
        if !changed {
            break;
        }
        let mut sums = vec![(0.0f64, 0.0f64, 0usize); k];
        for (p, &m) in points.iter().zip(&memberships) {
            sums[m].0 += p.x;
            sums[m].1 += p.y;
            sums[m].2 += 1;
        }
        for (c, (sx, sy, count)) in sums.into_iter().enumerate() {
            if count > 0 {
                centroids[c] = Point::new(sx / count as f64, sy / count as f64);
            }
        }
    }
    Ok(ClusterModel {
        centroids,
        memberships,
    })
}

/// Build a routing plan, appending any dedicated infrastructure nodes
/// (cluster heads, distribution nodes) to the fleet.
pub fn build(
    kind: TopologyKind,
    fleet: &mut Fleet,
    config: &TopologyConfig,
    rng: &mut impl Rng,
) -> Result<RoutingPlan> {
    if fleet.is_empty() {
        return Err(SimError::EmptyFleet);
    }
    match kind {
        TopologyKind::Centralized => {
            let next_hop = fleet
                .nodes
                .iter()
                .map(|n| {
                    if n.is_alive() {
                        NextHop::Sink
                    } else {
                        NextHop::Disconnected
                    }
                })
                .collect();
            Ok(RoutingPlan {
                kind,
                next_hop,
                parent: vec![None; fleet.len()],
                layer: None,
            })
        }
        TopologyKind::Distributed => {
            let range = config.radio_range_factor * fleet.coverage_radius;
            let next_hop = distributed_next_hops(fleet, range);
            Ok(RoutingPlan {
                kind,
                next_hop,
                parent: vec![None; fleet.len()],
                layer: None,
            })
        }
        TopologyKind::Hierarchical => {
            let sink = fleet.region.sink();
            let rotation = rng.gen::<f64>() * std::f64::consts::TAU;
            let mut dn_ids = Vec::with_capacity(config.distribution_count);
            for i in 0..config.distribution_count {
                let angle =
                    rotation + std::f64::consts::TAU * i as f64 / config.distribution_count as f64;
                let raw = Point::new(
                    sink.x + config.distribution_ring_radius * angle.cos(),
                    sink.y + config.distribution_ring_radius * angle.sin(),
                );
                let position = fleet.region.clamp(raw);
                dn_ids.push(fleet.push_infra(
                    NodeRole::DistributionNode,
                    position,
                    config.distribution_battery,
                ));
            }
            let n = fleet.len();
            let mut next_hop = vec![NextHop::Disconnected; n];
            let mut parent = vec![None; n];
            let mut layer = vec![Layer::Access; n];
            for &dn in &dn_ids {
                next_hop[dn] = NextHop::Sink;
                layer[dn] = Layer::Distribution;
            }
            for leaf in 0..fleet.leaf_count() {
                let chosen = nearest_of(fleet, leaf, &dn_ids, |_| true);
                match chosen {
                    Some(dn) => {
                        parent[leaf] = Some(dn);
                        next_hop[leaf] = NextHop::Node(dn);
                    }
                    None => next_hop[leaf] = NextHop::Disconnected,
                }
            }
            Ok(RoutingPlan {
                kind,
                next_hop,
                parent,
                layer: Some(layer),
            })
        }
        TopologyKind::Decentralized => {
            let leaf_positions: Vec<Point> =
                (0..fleet.leaf_count()).map(|i| fleet.position(i)).collect();
            let clusters = kmeans(&leaf_positions, config.cluster_count, rng)?;
            let mut ch_ids = Vec::with_capacity(clusters.k());
            for centroid in &clusters.centroids {
                ch_ids.push(fleet.push_infra(
                    NodeRole::ClusterHead,
                    *centroid,
                    config.cluster_head_battery,
                ));
            }
            let n = fleet.len();
            let mut next_hop = vec![NextHop::Disconnected; n];
            let mut parent = vec![None; n];
            for leaf in 0..fleet.leaf_count() {
                let ch = nearest_of(fleet, leaf, &ch_ids, |_| true)
                    .expect("cluster count is at least one");
                parent[leaf] = Some(ch);
                next_hop[leaf] = NextHop::Node(ch);
            }
            for &ch in &ch_ids {
                next_hop[ch] = cluster_head_hop(fleet, ch, &ch_ids, |_| true);
            }
            Ok(RoutingPlan {
                kind,
                next_hop,
                parent,
                layer: None,
            })
        }
    }
}

/// Greedy geographic next hops: within radio range, pick the neighbor
/// strictly closest to the sink; send straight to the sink when it is in
/// range or when every neighbor is strictly farther from it; a node with no
/// usable neighbor is disconnected and its data is lost.
fn distributed_next_hops(fleet: &Fleet, range: f64) -> Vec<NextHop> {
    let sink = fleet.region.sink();
    let n = fleet.len();
    let mut hops = vec![NextHop::Disconnected; n];
    for v in 0..n {
        if !fleet.nodes[v].is_alive() {
            continue;
        }
        let pv = fleet.position(v);
        let dv = distance(pv, sink);
        if dv <= range {
            hops[v] = NextHop::Sink;
            continue;
        }
        let mut best: Option<(f64, NodeId)> = None;
        let mut neighbor_count = 0usize;
        let mut all_farther = true;
        for u in 0..n {
            if u == v || !fleet.nodes[u].is_alive() {
                continue;
            }
            let pu = fleet.position(u);
            if distance(pv, pu) > range {
                continue;
            }
            neighbor_count += 1;
            let du = distance(pu, sink);
            if du < dv {
                all_farther = false;
                if best.is_none_or(|(bd, _)| du < bd) {
                    best = Some((du, u));
                }
            } else if du <= dv {
                all_farther = false;
            }
        }
        hops[v] = match best {
            Some((_, u)) => NextHop::Node(u),
            None if neighbor_count > 0 && all_farther => NextHop::Sink,
            None => NextHop::Disconnected,
        };
    }
    hops
}

/// Nearest candidate by position, ties to the lowest id.
fn nearest_of(
    fleet: &Fleet,
    from: NodeId,
    candidates: &[NodeId],
    usable: impl Fn(NodeId) -> bool,
) -> Option<NodeId> {
    let pos = fleet.position(from);
    let mut best: Option<(f64, NodeId)> = None;
    for &c in candidates {
        if c == from || !usable(c) {
            continue;
        }
        let d = distance(pos, fleet.position(c));
        if best.is_none_or(|(bd, _)| d < bd) {
            best = Some((d, c));
        }
    }
    best.map(|(_, id)| id)
}

/// Cluster-head forwarding: nearest cluster head that is strictly closer to
/// the sink, else straight to the sink.
fn cluster_head_hop(
    fleet: &Fleet,
    ch: NodeId,
    ch_ids: &[NodeId],
    usable: impl Fn(NodeId) -> bool,
) -> NextHop {
    let sink = fleet.region.sink();
    let own = distance(fleet.position(ch), sink);
    let closer: Vec<NodeId> = ch_ids
        .iter()
        .copied()
        .filter(|&c| c != ch && usable(c) && distance(fleet.position(c), sink) < own)
        .collect();
    match nearest_of(fleet, ch, &closer, |_| true) {
        Some(next) => NextHop::Node(next),
        None => NextHop::Sink,
    }
}

/// Result of tracing a node's route. `Connected` lists the relay node ids in
/// order; the final hop to the sink is implicit, so a direct-to-sink route is
/// `Connected(vec![])`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Route {
    Connected(Vec<NodeId>),
    Disconnected,
}

/// Follow next hops from a node until the sink. Path length is bounded by the
/// node count; exceeding it means the plan broke its acyclicity invariant.
pub fn route_to_sink(plan: &RoutingPlan, id: NodeId) -> Result<Route> {
    let mut hops = Vec::new();
    let mut current = id;
    loop {
        match plan.next_hop[current] {
            NextHop::Sink => return Ok(Route::Connected(hops)),
            NextHop::Disconnected => return Ok(Route::Disconnected),
            NextHop::Node(next) => {
                hops.push(next);
                if hops.len() > plan.next_hop.len() {
                    return Err(SimError::RoutingCycle(id));
                }
                current = next;
            }
        }
    }
}

/// Re-establish routing around newly inactive nodes. Leaves of a dead parent
/// reattach to the nearest active one; cluster heads reroute around dead
/// peers; the distributed topology recomputes greedy hops over survivors.
pub fn repair(plan: &RoutingPlan, fleet: &Fleet, dead: &[NodeId]) -> RoutingPlan {
    if dead.is_empty() {
        return plan.clone();
    }
    let mut gone = vec![false; fleet.len()];
    for &d in dead {
        gone[d] = true;
    }
    let active = |id: NodeId| fleet.is_alive(id) && !gone[id];

    let mut repaired = plan.clone();
    match plan.kind {
        TopologyKind::Centralized => {
            for id in 0..fleet.len() {
                if !active(id) {
                    repaired.next_hop[id] = NextHop::Disconnected;
                }
            }
        }
        TopologyKind::Distributed => {
            let range = fleet.coverage_radius * 2.0;
            let mut masked = fleet.clone();
            for id in 0..masked.len() {
                if gone[id] {
                    masked.nodes[id].health = crate::world::HealthState::Dead;
                }
            }
            repaired.next_hop = distributed_next_hops(&masked, range);
        }
        TopologyKind::Hierarchical => {
            let dn_ids: Vec<NodeId> = fleet
                .nodes
                .iter()
                .filter(|n| n.role == NodeRole::DistributionNode)
                .map(|n| n.id)
                .collect();
            for &dn in &dn_ids {
                if !active(dn) {
                    repaired.next_hop[dn] = NextHop::Disconnected;
                }
            }
            for leaf in 0..fleet.leaf_count() {
                if !active(leaf) {
                    repaired.next_hop[leaf] = NextHop::Disconnected;
                    continue;
                }
                let orphaned = repaired.parent[leaf].is_none_or(|p| !active(p));
                if orphaned {
                    match nearest_of(fleet, leaf, &dn_ids, active) {
                        Some(dn) => {
                            repaired.parent[leaf] = Some(dn);
                            repaired.next_hop[leaf] = NextHop::Node(dn);
                        }
                        None => {
                            repaired.parent[leaf] = None;
                            repaired.next_hop[leaf] = NextHop::Disconnected;
                        }
                    }
                }
            }
        }
        TopologyKind::Decentralized => {
            let ch_ids: Vec<NodeId> = fleet
                .nodes
                .iter()
                .filter(|n| n.role == NodeRole::ClusterHead)
                .map(|n| n.id)
                .collect();
            for &ch in &ch_ids {
                if !active(ch) {
                    repaired.next_hop[ch] = NextHop::Disconnected;
                    continue;
                }
                let broken_link = match repaired.next_hop[ch] {
                    NextHop::Node(next) => !active(next),
                    _ => false,
                };
                if broken_link {
                    repaired.next_hop[ch] = cluster_head_hop(fleet, ch, &ch_ids, active);
                }
            }
            for leaf in 0..fleet.leaf_count() {
                if !active(leaf) {
                    repaired.next_hop[leaf] = NextHop::Disconnected;
                    continue;
                }
                let orphaned = repaired.parent[leaf].is_none_or(|p| !active(p));
                if orphaned {
                    match nearest_of(fleet, leaf, &ch_ids, active) {
                        Some(ch) => {
                            repaired.parent[leaf] = Some(ch);
                            repaired.next_hop[leaf] = NextHop::Node(ch);
                        }
                        None => {
                            repaired.parent[leaf] = None;
                            repaired.next_hop[leaf] = NextHop::Disconnected;
                        }
                    }
                }
            }
        }
    }
    repaired
}

/// Per-node topology snapshot as CSV: `node_id,x,y,role,next_hop,active`.
pub fn snapshot_csv(fleet: &Fleet, plan: &RoutingPlan) -> String {
    let mut out = String::from("node_id,x,y,role,next_hop,active\n");
    for node in &fleet.nodes {
        let hop = match plan.next_hop[node.id] {
            NextHop::Node(id) => id.to_string(),
            NextHop::Sink => "sink".to_string(),
            NextHop::Disconnected => "none".to_string(),
        };
        out.push_str(&format!(
            "{},{:.3},{:.3},{},{},{}\n",
            node.id,
            node.position.x,
            node.position.y,
            node.role.name(),
            hop,
            if node.is_alive() { 1 } else { 0 }
        ));
    }
    out
}
