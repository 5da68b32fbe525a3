//! Classification accuracy versus flip-angle error, 20 seeded repetitions
//! per point. Results go to a temporary directory.
use qutrit_parity::experiment::{cmd_sweep, NoiseConfig, RunConfig};

fn main() -> qutrit_parity::Result<()> {
    let dir = tempfile::tempdir()?;
    println!("sigma_deg\taccuracy\tunclassifiable");
    for sigma in [0.0, 1.0, 2.0, 5.0, 10.0] {
        let config = RunConfig {
            noise: NoiseConfig {
                pulse_angle_sigma_deg: sigma,
                seed: 2024,
                repetitions: 20,
            },
            output_dir: Some(dir.path().join(format!("sigma{sigma}"))),
            ..Default::default()
        };
        let s = cmd_sweep(&config)?;
        println!("{sigma}\t{:.3}\t{}", s.accuracy, s.unclassifiable);
    }
    Ok(())
}
