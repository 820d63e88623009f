//! Geometry, fleet, and region model: positions, coverage, batteries, node
//! states.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SimError};

pub type NodeId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }
}

/// Euclidean distance; symmetric and non-negative.
pub fn distance(a: Point, b: Point) -> f64 {
    ((a.x - b.x).powi(2) + (a.y - b.y).powi(2)).sqrt()
}

/// The monitored rectangle `[0, L] x [0, W]` with the sink somewhere inside.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Region {
    length: f64,
    width: f64,
    sink: Point,
}

impl Region {
    pub fn new(length: f64, width: f64, sink: Point) -> Result<Self> {
        if !(length > 0.0) || !(width > 0.0) {
            return Err(SimError::InvalidRegion(format!(
                "dimensions must be positive, got {length} x {width}"
            )));
        }
        if !(0.0..=length).contains(&sink.x) || !(0.0..=width).contains(&sink.y) {
            return Err(SimError::InvalidRegion(format!(
                "sink ({}, {}) outside [0, {length}] x [0, {width}]",
                sink.x, sink.y
            )));
        }
        Ok(Region {
            length,
            width,
            sink,
        })
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn width(&self) -> f64 {
        self.width
    }

    pub fn area(&self) -> f64 {
        self.length * self.width
    }

    pub fn sink(&self) -> Point {
        self.sink
    }

    pub fn contains(&self, p: Point) -> bool {
        (0.0..=self.length).contains(&p.x) && (0.0..=self.width).contains(&p.y)
    }

    /// Clamp a point into the rectangle.
    pub fn clamp(&self, p: Point) -> Point {
        Point::new(p.x.clamp(0.0, self.length), p.y.clamp(0.0, self.width))
    }
}

/// Radius of the disk whose area is 1% of the region: `(1/10) * sqrt(A / pi)`.
pub fn coverage_radius(region: &Region) -> f64 {
    0.1 * (region.area() / std::f64::consts::PI).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SensorKind {
    Temperature,
    Pressure,
    Humidity,
}

impl SensorKind {
    pub const ALL: [SensorKind; 3] = [
        SensorKind::Temperature,
        SensorKind::Pressure,
        SensorKind::Humidity,
    ];

    pub fn index(self) -> usize {
        match self {
            SensorKind::Temperature => 0,
            SensorKind::Pressure => 1,
            SensorKind::Humidity => 2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            SensorKind::Temperature => "temperature",
            SensorKind::Pressure => "pressure",
            SensorKind::Humidity => "humidity",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NodeRole {
    Leaf,
    ClusterHead,
    DistributionNode,
}

impl NodeRole {
    pub fn name(self) -> &'static str {
        match self {
            NodeRole::Leaf => "leaf",
            NodeRole::ClusterHead => "cluster_head",
            NodeRole::DistributionNode => "distribution",
        }
    }
}

/// Sensor health. `Broken` nodes keep transmitting their constant value while
/// battery remains; `Dead` nodes never transmit again.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HealthState {
    Ok,
    Broken,
    Dead,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Node {
    pub id: NodeId,
    /// `None` for infrastructure nodes (cluster heads, distribution nodes),
    /// which relay but do not sense.
    pub kind: Option<SensorKind>,
    pub position: Point,
    pub role: NodeRole,
    pub battery: f64,
    pub health: HealthState,
}

impl Node {
    pub fn is_alive(&self) -> bool {
        self.health != HealthState::Dead
    }

    /// Alive sensing node.
    pub fn senses(&self) -> bool {
        self.role == NodeRole::Leaf && self.is_alive()
    }
}

/// The deployed node set plus the region it monitors. Leaf sensors occupy ids
/// `0..leaf_count`; infrastructure nodes added by topology builders follow.
#[derive(Debug, Clone, PartialEq)]
pub struct Fleet {
    pub nodes: Vec<Node>,
    pub region: Region,
    pub coverage_radius: f64,
    leaf_count: usize,
}

impl Fleet {
    pub fn leaf_count(&self) -> usize {
        self.leaf_count
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn alive_count(&self) -> usize {
        self.nodes.iter().filter(|n| n.is_alive()).count()
    }

    pub fn is_alive(&self, id: NodeId) -> bool {
        self.nodes[id].is_alive()
    }

    pub fn position(&self, id: NodeId) -> Point {
        self.nodes[id].position
    }

    /// Append an infrastructure node; returns its id.
    pub fn push_infra(&mut self, role: NodeRole, position: Point, battery: f64) -> NodeId {
        let id = self.nodes.len();
        self.nodes.push(Node {
            id,
            kind: None,
            position,
            role,
            battery,
            health: HealthState::Ok,
        });
        id
    }
}

/// Randomly place leaf sensors in the region, `counts` per kind in
/// `SensorKind::ALL` order. Deterministic for a given generator state.
pub fn deploy(
    region: Region,
    counts: [usize; 3],
    leaf_battery: f64,
    rng: &mut impl Rng,
) -> Result<Fleet> {
    if counts.iter().sum::<usize>() == 0 {
        return Err(SimError::EmptyFleet);
    }
    let mut nodes = Vec::with_capacity(counts.iter().sum());
    for (kind, &count) in SensorKind::ALL.iter().zip(counts.iter()) {
        for _ in 0..count {
            let id = nodes.len();
            let position = Point::new(
                rng.gen::<f64>() * region.length(),
                rng.gen::<f64>() * region.width(),
            );
            nodes.push(Node {
                id,
                kind: Some(*kind),
                position,
                role: NodeRole::Leaf,
                battery: leaf_battery,
                health: HealthState::Ok,
            });
        }
    }
    let leaf_count = nodes.len();
    Ok(Fleet {
        nodes,
        region,
        coverage_radius: coverage_radius(&region),
        leaf_count,
    })
}

/// Fraction of a `resolution x resolution` grid of cell centers lying within
/// the coverage radius of at least one live sensing node.
pub fn covered_fraction(fleet: &Fleet, resolution: usize) -> f64 {
    assert!(resolution >= 2, "grid resolution must be at least 2");
    let live: Vec<Point> = fleet
        .nodes
        .iter()
        .filter(|n| n.role == NodeRole::Leaf && n.battery > 0.0 && n.is_alive())
        .map(|n| n.position)
        .collect();
    if live.is_empty() {
        return 0.0;
    }
    let r2 = fleet.coverage_radius * fleet.coverage_radius;
    let (sx, sy) = (
        fleet.region.length() / resolution as f64,
        fleet.region.width() / resolution as f64,
    );
    let mut covered = 0usize;
    for i in 0..resolution {
        let x = (i as f64 + 0.5) * sx;
        for j in 0..resolution {
            let y = (j as f64 + 0.5) * sy;
            let hit = live
                .iter()
                .any(|p| (p.x - x).powi(2) + (p.y - y).powi(2) <= r2);
            if hit {
                covered += 1;
            }
        }
    }
    covered as f64 / (resolution * resolution) as f64
}

/// Deploy and re-draw positions until the region is covered to at least
/// `min_fraction` at the given grid resolution, or fail after `attempts`
/// draws.
///
/// Full coverage at t=0 is not attainable here: with 1%-area disks a grid
/// point escapes all 300 sensors with probability (0.99)^300 ~ 5%, so random
/// draws land near 94% coverage and never near 100%. The re-roll gate
/// discards unusually holey layouts; callers must pick a fraction the
/// deployment can actually reach (the experiment default is 0.93).
pub fn deploy_covered(
    region: Region,
    counts: [usize; 3],
    leaf_battery: f64,
    min_fraction: f64,
    attempts: usize,
    resolution: usize,
    rng: &mut impl Rng,
) -> Result<Fleet> {
    let mut best = 0.0f64;
    for _ in 0..attempts.max(1) {
        let fleet = deploy(region, counts, leaf_battery, rng)?;
        let covered = covered_fraction(&fleet, resolution);
        if covered >= min_fraction {
            return Ok(fleet);
        }
        best = best.max(covered);
    }
    Err(SimError::CoverageDeficit {
        best,
        attempts,
        required: min_fraction,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seeding;
    use proptest::prelude::*;

    fn default_region() -> Region {
        Region::new(100.0, 100.0, Point::new(50.0, 50.0)).unwrap()
    }

    #[test]
    fn distance_345_triangle() {
        assert_eq!(distance(Point::new(0.0, 0.0), Point::new(3.0, 4.0)), 5.0);
    }

    #[test]
    fn distance_identity() {
        let p = Point::new(17.3, -2.1);
        assert_eq!(distance(p, p), 0.0);
    }

    #[test]
    fn distance_unit_diagonal() {
        let d = distance(Point::new(0.0, 0.0), Point::new(1.0, 1.0));
        assert!((d - std::f64::consts::SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn region_rejects_bad_dimensions() {
        assert!(Region::new(0.0, 10.0, Point::new(0.0, 0.0)).is_err());
        assert!(Region::new(10.0, -1.0, Point::new(0.0, 0.0)).is_err());
        assert!(Region::new(10.0, 10.0, Point::new(11.0, 5.0)).is_err());
    }

    #[test]
    fn coverage_radius_examples() {
        // area == pi gives exactly 0.1
        let r = Region::new(std::f64::consts::PI, 1.0, Point::new(1.0, 0.5)).unwrap();
        assert!((coverage_radius(&r) - 0.1).abs() < 1e-12);

        // default 100 x 100 region
        let r = default_region();
        let expected = 0.1 * (10_000.0 / std::f64::consts::PI).sqrt();
        assert!((expected - 5.641_895_835_477_563).abs() < 1e-9);
        assert!((coverage_radius(&r) - expected).abs() < 1e-12);

        // area == 100 * pi gives exactly 1.0
        let r = Region::new(100.0 * std::f64::consts::PI, 1.0, Point::new(1.0, 0.5)).unwrap();
        assert!((coverage_radius(&r) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn deploy_default_counts() {
        let mut rng = seeding::stream(1, &[seeding::tag::DEPLOY]);
        let fleet = deploy(default_region(), [100, 100, 100], 300.0, &mut rng).unwrap();
        assert_eq!(fleet.len(), 300);
        assert_eq!(fleet.leaf_count(), 300);
        assert_eq!(
            fleet
                .nodes
                .iter()
                .filter(|n| n.kind == Some(SensorKind::Pressure))
                .count(),
            100
        );
        assert!(fleet
            .nodes
            .iter()
            .all(|n| fleet.region.contains(n.position)));
    }

    #[test]
    fn deploy_single_node_in_bounds() {
        let mut rng = seeding::stream(7, &[]);
        let fleet = deploy(default_region(), [1, 0, 0], 300.0, &mut rng).unwrap();
        assert_eq!(fleet.len(), 1);
        assert!(fleet.region.contains(fleet.nodes[0].position));
    }

    #[test]
    fn deploy_zero_counts_errors() {
        let mut rng = seeding::stream(7, &[]);
        assert!(matches!(
            deploy(default_region(), [0, 0, 0], 300.0, &mut rng),
            Err(SimError::EmptyFleet)
        ));
    }

    #[test]
    fn deploy_is_deterministic() {
        let a = deploy(
            default_region(),
            [10, 10, 10],
            300.0,
            &mut seeding::stream(5, &[1]),
        )
        .unwrap();
        let b = deploy(
            default_region(),
            [10, 10, 10],
            300.0,
            &mut seeding::stream(5, &[1]),
        )
        .unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn covered_fraction_zero_when_drained() {
        let mut rng = seeding::stream(2, &[]);
        let mut fleet = deploy(default_region(), [50, 50, 50], 300.0, &mut rng).unwrap();
        for n in &mut fleet.nodes {
            n.battery = 0.0;
        }
        assert_eq!(covered_fraction(&fleet, 20), 0.0);
    }

    #[test]
    fn covered_fraction_full_with_huge_radius() {
        let region = default_region();
        let mut rng = seeding::stream(3, &[]);
        let mut fleet = deploy(region, [1, 0, 0], 300.0, &mut rng).unwrap();
        fleet.nodes[0].position = Point::new(50.0, 50.0);
        // half-diagonal of the region
        fleet.coverage_radius = (2.0f64).sqrt() * 50.0 + 1e-9;
        assert_eq!(covered_fraction(&fleet, 50), 1.0);
    }

    #[test]
    fn deploy_covered_meets_threshold() {
        let mut rng = seeding::stream(11, &[seeding::tag::DEPLOY]);
        let fleet = deploy_covered(
            default_region(),
            [100, 100, 100],
            300.0,
            0.93,
            50,
            100,
            &mut rng,
        )
        .unwrap();
        assert!(covered_fraction(&fleet, 100) >= 0.93);
    }

    #[test]
    fn deploy_covered_reports_unreachable_threshold() {
        let mut rng = seeding::stream(12, &[seeding::tag::DEPLOY]);
        let result = deploy_covered(
            default_region(),
            [100, 100, 100],
            300.0,
            0.999,
            5,
            100,
            &mut rng,
        );
        assert!(matches!(result, Err(SimError::CoverageDeficit { .. })));
    }

    proptest! {
        #[test]
        fn triangle_inequality(
            ax in -100.0..100.0f64, ay in -100.0..100.0f64,
            bx in -100.0..100.0f64, by in -100.0..100.0f64,
            cx in -100.0..100.0f64, cy in -100.0..100.0f64,
        ) {
            let (a, b, c) = (Point::new(ax, ay), Point::new(bx, by), Point::new(cx, cy));
            prop_assert!(distance(a, c) <= distance(a, b) + distance(b, c) + 1e-9);
            prop_assert!((distance(a, b) - distance(b, a)).abs() < 1e-12);
            prop_assert!(distance(a, b) >= 0.0);
        }
    }
}
