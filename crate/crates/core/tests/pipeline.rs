//! End-to-end invariants of a live run: batteries only drain, dead nodes stay
//! silent, coverage only shrinks, delivery counts stay consistent.

use wsndiag::experiment::{simulate, ExperimentConfig};
use wsndiag::topology::TopologyKind;

#[test]
fn batteries_drain_monotonically_and_dead_stay_dead() {
    let config = ExperimentConfig {
        t_max: 60,
        ..ExperimentConfig::default()
    };
    // hot radio so deaths happen inside the horizon
    let radio = config.radio.scaled(2.0);
    for kind in TopologyKind::ALL {
        let mut prev_batteries: Option<Vec<f64>> = None;
        let mut ever_dead: Vec<bool> = Vec::new();
        let mut prev_covered = f64::INFINITY;
        let mut prev_alive = u32::MAX;
        simulate(&config, &radio, 0, kind, |view| {
            if ever_dead.is_empty() {
                ever_dead = vec![false; view.fleet.len()];
            }
            if let Some(prev) = &prev_batteries {
                for (node, &before) in view.fleet.nodes.iter().zip(prev) {
                    assert!(
                        node.battery <= before + 1e-12,
                        "{kind}: node {} battery rose {before} -> {}",
                        node.id,
                        node.battery
                    );
                }
            }
            for node in &view.fleet.nodes {
                assert!(node.battery >= 0.0);
                if ever_dead[node.id] {
                    assert!(!node.is_alive(), "{kind}: node {} revived", node.id);
                }
                if !node.is_alive() {
                    ever_dead[node.id] = true;
                    assert_eq!(node.battery, 0.0, "dead nodes hold zero charge");
                }
            }
            assert!(view.covered_fraction <= prev_covered + 1e-12);
            assert!(view.alive_count <= prev_alive);
            assert!(view.delivered_count as usize <= view.fleet.leaf_count());
            prev_covered = view.covered_fraction;
            prev_alive = view.alive_count;
            prev_batteries = Some(view.fleet.nodes.iter().map(|n| n.battery).collect());
            Ok(())
        })
        .unwrap();
        assert!(
            ever_dead.iter().any(|&d| d),
            "{kind}: the hot-radio run should see deaths"
        );
    }
}
