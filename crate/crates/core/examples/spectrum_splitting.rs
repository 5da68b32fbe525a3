//! Two-line spectrum of the odd branch and the measured quadrupolar
//! splitting. Pass a file name to dump the spectrum as TSV.
use qutrit_parity::spectro::{detect, pick_peaks, synthesize_fid, transform, Acquisition};
use qutrit_parity::spin::{transition_frequencies, HamiltonianParams, RelaxationParams};
use qutrit_parity::DensityMatrix;

fn main() -> qutrit_parity::Result<()> {
    let params = HamiltonianParams::from_lambda_hz(156.0)?;
    let rho = detect(&DensityMatrix::deviation_diagonal([0.5, -1.0, 0.5])?, 30.0)?;
    let acq = Acquisition::default();
    let spectrum = transform(&synthesize_fid(&rho, &params, &RelaxationParams::measured(), acq.n, acq.dwell_s)?);
    let peaks = pick_peaks(&spectrum, 0.1)?;
    for p in &peaks {
        println!("{:+9.3} Hz  amplitude {:+9.3}  fwhm {:.2} Hz", p.frequency_hz, p.amplitude, p.linewidth_hz);
    }
    if let [a, b] = peaks.as_slice() {
        println!("splitting {:.3} Hz (bin {:.3} Hz)", b.frequency_hz - a.frequency_hz, spectrum.bin_width_hz());
    }
    println!("expected {:.3} Hz", transition_frequencies(&params).separation_hz());
    if let Some(path) = std::env::args().nth(1) {
        spectrum.write_tsv(std::fs::File::create(path)?)?;
    }
    Ok(())
}
