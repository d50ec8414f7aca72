use socialmarket::experiments::{Experiment, ExperimentConfig, SweepParameter};

fn main() {
    // Strong-tie regime: per-edge network effect beats congestion.
    for (mu_g, c) in [(3.0, 2.5), (3.0, 2.0), (2.0, 1.5)] {
        let config = ExperimentConfig { mu_g, c, ..ExperimentConfig::default() };
        let experiment = Experiment::new(config).unwrap();
        let grid = [0.2, 0.4, 0.6, 0.8, 1.0];
        match experiment.sweep(SweepParameter::EdgeProbability, &grid) {
            Ok(sweep) => {
                let means: Vec<f64> = sweep.metric_means("pi_d").iter().map(|m| m.unwrap()).collect();
                println!("mu_g={mu_g} c={c}: pi_d {means:?}");
            }
            Err(e) => println!("mu_g={mu_g} c={c}: {e}"),
        }
    }
}
