//! Manual probe for inspecting lifetime behavior when revisiting radio
//! defaults. Run with:
//! `cargo test -p wsndiag --test tuning -- --ignored --nocapture`

use wsndiag::experiment::{run_lifetime, ExperimentConfig, CALIBRATION_ORDER};

#[test]
#[ignore]
fn lifetime_grid() {
    let seeds = 5;
    let base = ExperimentConfig::default();
    for scale in [0.5, 1.0, 2.0, 4.0] {
        let radio = base.radio.scaled(scale);
        print!("scale {scale:<5}");
        for kind in CALIBRATION_ORDER {
            let (mut first_sum, mut whole_sum) = (0.0, 0.0);
            for seed in 0..seeds {
                let stats = run_lifetime(&base, &radio, seed, kind).unwrap();
                first_sum += stats.first_death as f64;
                whole_sum += stats.whole_network_death as f64;
            }
            print!(
                "  {}: fd {:>5.1} wd {:>5.1}",
                &kind.name()[..4],
                first_sum / seeds as f64,
                whole_sum / seeds as f64
            );
        }
        println!();
    }
}
