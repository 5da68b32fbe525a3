//! Recovers a phase-exact Fourier sequence by optimizing pulse phases and
//! frame changes from scratch.
use qutrit_parity::compiler::{optimize_sequence, SequenceTemplate, DEFAULT_BUDGET};
use qutrit_parity::fourier3;

fn main() -> qutrit_parity::Result<()> {
    let template = SequenceTemplate::fourier_with_frame();
    let seq = optimize_sequence(&template, &fourier3(), DEFAULT_BUDGET)?;
    println!("fidelity {:.15}  phase_exact {}", seq.fidelity, seq.phase_exact);
    println!("{}", serde_json::to_string_pretty(&seq.events)?);
    Ok(())
}
