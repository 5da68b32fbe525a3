//! Compiles every shipped gate, and shows why bare 180° pulses and the
//! uncorrected three-pulse Fourier sequence are not exact.
use qutrit_parity::compiler::{
    compile, compile_bare, fidelity, literal_fourier_sequence, sequence_propagator, GateName, GateSpec,
};
use qutrit_parity::fourier3;

fn main() -> qutrit_parity::Result<()> {
    for name in GateName::SHIPPED {
        let gate = GateSpec::named(name)?;
        let seq = compile(&gate)?;
        let bare = compile_bare(&gate)?;
        println!(
            "{:<5} pulses {}  events {}  fidelity {:.12}  exact {}   bare {:.6}",
            name.as_str(),
            seq.pulse_count(),
            seq.events.len(),
            seq.fidelity,
            seq.phase_exact,
            bare.fidelity
        );
    }
    let literal = sequence_propagator(&literal_fourier_sequence())?;
    println!("three-pulse Fourier without frame change: fidelity {:.6}", fidelity(&fourier3(), &literal));
    Ok(())
}
