//! Full pulse program for one permutation: preparation, F, oracle, F⁻¹,
//! crusher and 30° detection, then the spectrum verdict.
use qutrit_parity::experiment::{simulate_pulse, RunConfig};
use qutrit_parity::PermutationMap;

fn main() -> qutrit_parity::Result<()> {
    let name = std::env::args().nth(1).unwrap_or_else(|| "f4".into());
    let p = PermutationMap::from_name_or_cauchy(&name)?;
    let run = simulate_pulse(&RunConfig::default().setup()?, &p, 0)?;
    for e in &run.program {
        println!("{}", serde_json::to_string(e)?);
    }
    let d: Vec<f64> = (0..3).map(|i| run.pre_detection.get(i, i).re).collect();
    println!("populations before detection {d:?}");
    println!("line12 {:+.3}  line23 {:+.3}", run.line12, run.line23);
    match run.readout {
        Some(r) => println!("verdict {} (confidence {:.3})", r.verdict, r.confidence),
        None => println!("unclassifiable"),
    }
    Ok(())
}
