//! Readout: detection pulse, FID synthesis, spectrum and line-pattern
//! classification.
//!
//! An even permutation leaves the pseudopure deviation on |−1⟩, which after a
//! small-angle non-selective pulse shows essentially one line (transition
//! 2-3). An odd permutation leaves it on |0⟩, which shows two lines of equal
//! magnitude and opposite sign. The classifier keys only on that pattern:
//! line count, magnitude ratio and relative sign. It never looks at the
//! absolute sign, because the prepared deviation has a negative pseudopure
//! coefficient and spectral phase conventions vary.

use std::io::Write;

use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{DensityMatrix, Evolve, C64};
use crate::oracle::Parity;
use crate::spin::{
    apply_gradient, pulse_propagator, transition_frequencies, GradientEvent, HamiltonianParams, Pulse,
    RelaxationParams, Transition,
};

pub const DEFAULT_DETECTION_FLIP_DEG: f64 = 30.0;
/// Even verdict: the weaker line must stay below this fraction of the
/// stronger one.
pub const EVEN_MAX_MINOR_RATIO: f64 = 0.1;
/// Odd verdict: magnitude ratio window.
pub const ODD_RATIO_RANGE: (f64, f64) = (0.5, 2.0);
pub const DEFAULT_PEAK_THRESHOLD: f64 = 0.02;
/// Upper bound on the distance between a peak and the transition it is
/// assigned to.
const MAX_LINE_MATCH_HZ: f64 = 20.0;

/// Crusher gradient `g2`, then a non-selective pulse of `flip_deg` about +y.
pub fn detect(rho: &DensityMatrix, flip_deg: f64) -> Result<DensityMatrix> {
    let crushed = apply_gradient(rho, &GradientEvent::new("g2"));
    if flip_deg == 0.0 {
        return Ok(crushed);
    }
    let pulse = Pulse::nonselective(flip_deg, 90.0)?;
    Ok(crushed.evolve(&pulse_propagator(&pulse)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Acquisition {
    pub n: usize,
    pub dwell_s: f64,
}

impl Default for Acquisition {
    /// 4096 points over a ±2000 Hz window (≈0.98 Hz bins).
    fn default() -> Self {
        Self {
            n: 4096,
            dwell_s: 1.0 / 4000.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Fid {
    samples: Vec<C64>,
    dwell_s: f64,
}

impl Fid {
    pub fn new(samples: Vec<C64>, dwell_s: f64) -> Result<Self> {
        check_acquisition(samples.len(), dwell_s)?;
        Ok(Self { samples, dwell_s })
    }

    pub fn samples(&self) -> &[C64] {
        &self.samples
    }

    pub fn dwell_s(&self) -> f64 {
        self.dwell_s
    }

    /// `time_s  real  imag`, tab separated, with a header row.
    pub fn write_tsv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "time_s\treal\timag")?;
        for (k, s) in self.samples.iter().enumerate() {
            writeln!(w, "{}\t{}\t{}", k as f64 * self.dwell_s, s.re, s.im)?;
        }
        Ok(())
    }
}

fn check_acquisition(n: usize, dwell_s: f64) -> Result<()> {
    if n < 2 || !n.is_power_of_two() {
        return Err(Error::InvalidFid(format!("sample count {n} must be a power of two >= 2")));
    }
    if !(dwell_s > 0.0) || !dwell_s.is_finite() {
        return Err(Error::InvalidFid(format!("dwell {dwell_s} s must be positive")));
    }
    Ok(())
}

/// Two damped tones at the transition frequencies, weighted by the
/// single-quantum coherences `ρ(2,1)` (transition 1-2) and `ρ(3,2)`
/// (transition 2-3).
pub fn synthesize_fid(
    rho: &DensityMatrix,
    p: &HamiltonianParams,
    r: &RelaxationParams,
    n: usize,
    dwell_s: f64,
) -> Result<Fid> {
    check_acquisition(n, dwell_s)?;
    let freqs = transition_frequencies(p);
    let line_hz = freqs.nu12_hz.abs().max(freqs.nu23_hz.abs());
    let bandwidth_hz = 1.0 / dwell_s;
    if line_hz >= bandwidth_hz / 2.0 {
        return Err(Error::WindowTooNarrow {
            line_hz,
            required_bandwidth_hz: 2.0 * line_hz,
            max_dwell_s: 1.0 / (2.0 * line_hz),
            bandwidth_hz,
        });
    }
    let c12 = rho.get(1, 0);
    let c23 = rho.get(2, 1);
    let tau = std::f64::consts::TAU;
    let samples = (0..n)
        .map(|k| {
            let t = k as f64 * dwell_s;
            let decay = (-t / r.t2_s).exp();
            (c12 * C64::from_polar(1.0, tau * freqs.nu12_hz * t) + c23 * C64::from_polar(1.0, tau * freqs.nu23_hz * t))
                * decay
        })
        .collect();
    Ok(Fid { samples, dwell_s })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectrumBin {
    pub frequency_hz: f64,
    pub value: C64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    bins: Vec<SpectrumBin>,
    bin_width_hz: f64,
}

impl Spectrum {
    pub fn bins(&self) -> &[SpectrumBin] {
        &self.bins
    }

    pub fn bin_width_hz(&self) -> f64 {
        self.bin_width_hz
    }

    /// `frequency_hz  real  imag  magnitude`, one row per bin.
    pub fn write_tsv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "frequency_hz\treal\timag\tmagnitude")?;
        for b in &self.bins {
            writeln!(w, "{}\t{}\t{}\t{}", b.frequency_hz, b.value.re, b.value.im, b.value.norm())?;
        }
        Ok(())
    }
}

/// Unnormalized forward DFT, reordered so frequency ascends over
/// `(−1/(2·dwell), +1/(2·dwell)]`.
pub fn transform(fid: &Fid) -> Spectrum {
    let n = fid.samples.len();
    let mut buf = fid.samples.clone();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let df = 1.0 / (n as f64 * fid.dwell_s);
    let half = (n / 2) as i64;
    let bins = (-half + 1..=half)
        .map(|k| SpectrumBin {
            frequency_hz: k as f64 * df,
            value: buf[k.rem_euclid(n as i64) as usize],
        })
        .collect();
    Spectrum { bins, bin_width_hz: df }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Peak {
    pub frequency_hz: f64,
    /// Signed absorptive (real-part) height.
    pub amplitude: f64,
    /// Full width at half maximum.
    pub linewidth_hz: f64,
}

/// Local maxima of `|Re|` above `threshold·max|Re|`, refined by a
/// three-point parabola.
pub fn pick_peaks(s: &Spectrum, threshold: f64) -> Result<Vec<Peak>> {
    if !(threshold > 0.0 && threshold < 1.0) {
        return Err(Error::InvalidThreshold(threshold));
    }
    if s.bins.is_empty() {
        return Err(Error::EmptySpectrum);
    }
    let re: Vec<f64> = s.bins.iter().map(|b| b.value.re).collect();
    let mag: Vec<f64> = re.iter().map(|v| v.abs()).collect();
    let max = mag.iter().cloned().fold(0.0, f64::max);
    if max == 0.0 {
        return Ok(Vec::new());
    }
    let df = s.bin_width_hz;
    let mut peaks = Vec::new();
    for i in 1..mag.len().saturating_sub(1) {
        let (y0, y1, y2) = (mag[i - 1], mag[i], mag[i + 1]);
        if !(y1 >= y0 && y1 > y2 && y1 > threshold * max) {
            continue;
        }
        let denom = y0 - 2.0 * y1 + y2;
        let delta = if denom != 0.0 { 0.5 * (y0 - y2) / denom } else { 0.0 };
        let height = y1 - 0.25 * (y0 - y2) * delta;
        peaks.push(Peak {
            frequency_hz: s.bins[i].frequency_hz + delta * df,
            amplitude: height.copysign(re[i]),
            linewidth_hz: fwhm(&re, i, height) * df,
        });
    }
    Ok(peaks)
}

/// Width in bins where the same-signed line stays above half height.
fn fwhm(re: &[f64], i: usize, height: f64) -> f64 {
    let half = height / 2.0;
    let sign = re[i].signum();
    let above = |j: usize| re[j] * sign > half;
    let crossing = |inside: usize, outside: usize| -> f64 {
        let (a, b) = (re[inside] * sign, re[outside] * sign);
        if a == b {
            0.0
        } else {
            (a - half) / (a - b)
        }
    };
    let mut l = i;
    while l > 0 && above(l - 1) {
        l -= 1;
    }
    let left = if l > 0 { l as f64 - crossing(l, l - 1) } else { 0.0 };
    let mut r = i;
    while r + 1 < re.len() && above(r + 1) {
        r += 1;
    }
    let right = if r + 1 < re.len() {
        r as f64 + crossing(r, r + 1)
    } else {
        (re.len() - 1) as f64
    };
    right - left
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReadoutResult {
    pub verdict: Parity,
    pub line12: f64,
    pub line23: f64,
    /// Even: `1 − minor/major`. Odd: `minor/major`. Both lie in [0, 1] and
    /// approach 1 for an ideal signature.
    pub confidence: f64,
}

/// Signed amplitude of the peak nearest each transition frequency, or 0 if
/// none is close enough.
pub fn line_amplitudes(peaks: &[Peak], p: &HamiltonianParams) -> (f64, f64) {
    let f = transition_frequencies(p);
    let window = (f.separation_hz() / 4.0).min(MAX_LINE_MATCH_HZ);
    let nearest = |nu: f64| {
        peaks
            .iter()
            .filter(|pk| (pk.frequency_hz - nu).abs() <= window)
            .min_by(|a, b| (a.frequency_hz - nu).abs().total_cmp(&(b.frequency_hz - nu).abs()))
            .map_or(0.0, |pk| pk.amplitude)
    };
    (
        nearest(f.of(Transition::T12).expect("selective")),
        nearest(f.of(Transition::T23).expect("selective")),
    )
}

/// Even: one dominant line, the other below 10% of it. Odd: both lines,
/// magnitude ratio within [0.5, 2], opposite signs. Anything else is
/// unclassifiable.
pub fn classify_spectrum(peaks: &[Peak], p: &HamiltonianParams) -> Result<ReadoutResult> {
    let (line12, line23) = line_amplitudes(peaks, p);
    let unclassifiable = Error::UnclassifiableSpectrum { line12, line23 };
    if transition_frequencies(p).separation_hz() == 0.0 {
        return Err(unclassifiable);
    }
    let (a, b) = (line12.abs(), line23.abs());
    let major = a.max(b);
    let minor = a.min(b);
    if major == 0.0 {
        return Err(unclassifiable);
    }
    let ratio = minor / major;
    let (verdict, confidence) = if ratio < EVEN_MAX_MINOR_RATIO {
        (Parity::Even, 1.0 - ratio)
    } else if ratio >= 1.0 / ODD_RATIO_RANGE.1 && ratio <= ODD_RATIO_RANGE.1 && line12 * line23 < 0.0 {
        (Parity::Odd, ratio)
    } else {
        return Err(unclassifiable);
    };
    Ok(ReadoutResult {
        verdict,
        line12,
        line23,
        confidence,
    })
}

/// Everything produced by one readout.
#[derive(Debug, Clone)]
pub struct Readout {
    pub detected: DensityMatrix,
    pub fid: Fid,
    pub spectrum: Spectrum,
    pub peaks: Vec<Peak>,
    pub result: Result<ReadoutResult>,
}

/// detect → FID → spectrum → peaks → verdict. Only the classification step
/// may fail without aborting the pipeline.
pub fn readout(
    rho: &DensityMatrix,
    flip_deg: f64,
    p: &HamiltonianParams,
    r: &RelaxationParams,
    acq: &Acquisition,
) -> Result<Readout> {
    let detected = detect(rho, flip_deg)?;
    let fid = synthesize_fid(&detected, p, r, acq.n, acq.dwell_s)?;
    let spectrum = transform(&fid);
    let peaks = pick_peaks(&spectrum, DEFAULT_PEAK_THRESHOLD)?;
    let result = classify_spectrum(&peaks, p);
    Ok(Readout {
        detected,
        fid,
        spectrum,
        peaks,
        result,
    })
}
