//! Spin-1 NMR model of the deuterium qutrit.
//!
//! Everything is expressed in the rotating frame at the carrier. Only the
//! effective quadrupolar term `Λ·(3Iz² − I²)` evolves states between pulses;
//! pulses are ideal and instantaneous and their shapes are carried as
//! duration metadata.
//!
//! # Pulse rotation sense
//!
//! A pulse's `phase_deg` is the direction of the rf field in the transverse
//! plane, measured from +x toward +y. For a nucleus with positive
//! gyromagnetic ratio the nutation frequency is `ω1 = −γB1`, so the state
//! rotates about the axis *antiparallel* to the field:
//!
//! ```text
//! selective (p,q):  exp(+i·(β/2)·(cosφ·X_pq + sinφ·Y_pq))
//! non-selective:    exp(+i·β·(cosφ·Ix + sinφ·Iy))
//! ```
//!
//! With this sense the three-pulse Fourier sequence
//! `(270)_{−x,23} (109.47)_{−y,12} (90)_{−y,23}` maps |−1⟩ onto the
//! superposition `(|+1⟩ + e^{−2πi/3}|0⟩ + e^{2πi/3}|−1⟩)/√3`.
//!
//! Selective pulses use the two-level spinor convention (flip/2 in the
//! exponent) so a selective 90° equalizes the populations of its two
//! levels; non-selective pulses use the full spin-1 operators.

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{cis, DensityKind, DensityMatrix, Evolve, Operator3, C64};

/// Quadrupolar splitting between the two lines at 277 K, Hz.
pub const MEASURED_SPLITTING_HZ: f64 = 936.0;
/// Deuterium resonance frequency on the 600 MHz spectrometer, Hz.
pub const DEUTERIUM_LARMOR_HZ: f64 = 91.108e6;
pub const MEASURED_T1_S: f64 = 0.170;
pub const MEASURED_T2_S: f64 = 0.050;
/// Gaussian transition-selective pulse length.
pub const SELECTIVE_PULSE_S: f64 = 4e-3;
/// Sinc non-selective pulse length.
pub const NONSELECTIVE_PULSE_S: f64 = 0.5e-3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinOperators {
    pub ix: Operator3,
    pub iy: Operator3,
    pub iz: Operator3,
    /// I² = I(I+1)·1 = 2·1
    pub isq: Operator3,
}

impl SpinOperators {
    pub fn spin1() -> Self {
        let s = 1.0 / 2f64.sqrt();
        let z = C64::new(0.0, 0.0);
        let ix = Operator3::from_real([[0.0, s, 0.0], [s, 0.0, s], [0.0, s, 0.0]]);
        let iy = Operator3::from_entries([
            [z, C64::new(0.0, -s), z],
            [C64::new(0.0, s), z, C64::new(0.0, -s)],
            [z, C64::new(0.0, s), z],
        ]);
        let iz = Operator3::real_diagonal([1.0, 0.0, -1.0]);
        let isq = ix * ix + iy * iy + iz * iz;
        Self { ix, iy, iz, isq }
    }
}

/// Origin of an effective coupling: `Λ = eqQ·S/4`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CouplingProvenance {
    /// Liquid-crystal order parameter S.
    pub order_parameter: f64,
    /// Quadrupolar coupling constant e²qQ, rad/s.
    pub eqq_rad_s: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HamiltonianParams {
    /// Carrier (Larmor) angular frequency, rad/s. Bookkeeping only.
    pub omega0_rad_s: f64,
    /// Effective quadrupolar coupling Λ, rad/s.
    pub lambda_q_rad_s: f64,
    pub provenance: Option<CouplingProvenance>,
}

impl HamiltonianParams {
    pub fn new(lambda_q_rad_s: f64) -> Result<Self> {
        if !lambda_q_rad_s.is_finite() {
            return Err(Error::Config(format!("lambda_q must be finite, got {lambda_q_rad_s}")));
        }
        Ok(Self {
            omega0_rad_s: 2.0 * PI * DEUTERIUM_LARMOR_HZ,
            lambda_q_rad_s,
            provenance: None,
        })
    }

    /// Λ given as Λ/2π in Hz.
    pub fn from_lambda_hz(lambda_hz: f64) -> Result<Self> {
        Self::new(2.0 * PI * lambda_hz)
    }

    /// Λ chosen so the two lines are `splitting_hz` apart (splitting = 6Λ/2π).
    pub fn from_splitting_hz(splitting_hz: f64) -> Result<Self> {
        Self::from_lambda_hz(splitting_hz / 6.0)
    }

    pub fn from_provenance(order_parameter: f64, eqq_rad_s: f64) -> Result<Self> {
        let mut p = Self::new(eqq_rad_s * order_parameter / 4.0)?;
        p.provenance = Some(CouplingProvenance {
            order_parameter,
            eqq_rad_s,
        });
        Ok(p)
    }

    /// Parameters matching the measured 936 Hz splitting.
    pub fn measured() -> Self {
        Self::from_splitting_hz(MEASURED_SPLITTING_HZ).expect("finite")
    }

    pub fn lambda_hz(&self) -> f64 {
        self.lambda_q_rad_s / (2.0 * PI)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.lambda_q_rad_s.is_finite() {
            return Err(Error::Config("lambda_q must be finite".into()));
        }
        if let Some(prov) = self.provenance {
            let implied = prov.eqq_rad_s * prov.order_parameter / 4.0;
            let scale = implied.abs().max(self.lambda_q_rad_s.abs()).max(f64::MIN_POSITIVE);
            if (implied - self.lambda_q_rad_s).abs() / scale > 1e-9 {
                return Err(Error::Config(format!(
                    "lambda_q {} disagrees with eqQ·S/4 = {implied}",
                    self.lambda_q_rad_s
                )));
            }
        }
        Ok(())
    }
}

/// `Λ·(3Iz² − I²) = Λ·diag(1, −2, 1)`, rad/s.
pub fn hamiltonian_rotating_frame(p: &HamiltonianParams) -> Operator3 {
    let ops = SpinOperators::spin1();
    let q = (ops.iz * ops.iz).scale(C64::new(3.0, 0.0)) - ops.isq;
    q.scale(C64::new(p.lambda_q_rad_s, 0.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransitionFrequencies {
    pub nu12_hz: f64,
    pub nu23_hz: f64,
}

impl TransitionFrequencies {
    pub fn separation_hz(&self) -> f64 {
        (self.nu23_hz - self.nu12_hz).abs()
    }

    pub fn of(&self, t: Transition) -> Option<f64> {
        match t {
            Transition::T12 => Some(self.nu12_hz),
            Transition::T23 => Some(self.nu23_hz),
            Transition::NonSelective => None,
        }
    }
}

/// Rotating-frame line positions; for Λ > 0 the 1-2 line sits at negative
/// offset.
pub fn transition_frequencies(p: &HamiltonianParams) -> TransitionFrequencies {
    let nu = 3.0 * p.lambda_q_rad_s / (2.0 * PI);
    TransitionFrequencies {
        nu12_hz: -nu,
        nu23_hz: nu,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Transition {
    #[serde(rename = "transition12")]
    T12,
    #[serde(rename = "transition23")]
    T23,
    #[serde(rename = "nonselective")]
    NonSelective,
}

impl Transition {
    /// Level indices of a selective transition.
    pub fn levels(self) -> Option<(usize, usize)> {
        match self {
            Transition::T12 => Some((0, 1)),
            Transition::T23 => Some((1, 2)),
            Transition::NonSelective => None,
        }
    }
}

impl fmt::Display for Transition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Transition::T12 => "12",
            Transition::T23 => "23",
            Transition::NonSelective => "ns",
        })
    }
}

fn wrap_degrees(deg: f64) -> f64 {
    let w = deg.rem_euclid(360.0);
    // rem_euclid can round up to exactly 360 for tiny negative inputs.
    if w >= 360.0 {
        0.0
    } else {
        w
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PulseFields")]
pub struct Pulse {
    pub target: Transition,
    pub flip_deg: f64,
    pub phase_deg: f64,
    pub duration_s: f64,
}

#[derive(Deserialize)]
struct PulseFields {
    target: Transition,
    flip_deg: f64,
    phase_deg: f64,
    duration_s: f64,
}

impl TryFrom<PulseFields> for Pulse {
    type Error = Error;

    fn try_from(f: PulseFields) -> Result<Self> {
        Pulse::new(f.target, f.flip_deg, f.phase_deg, f.duration_s)
    }
}

impl Pulse {
    pub fn new(target: Transition, flip_deg: f64, phase_deg: f64, duration_s: f64) -> Result<Self> {
        if !(flip_deg > 0.0 && flip_deg <= 360.0) {
            return Err(Error::InvalidPulse(format!("flip {flip_deg}° outside (0, 360]")));
        }
        if !(0.0..360.0).contains(&phase_deg) {
            return Err(Error::InvalidPulse(format!("phase {phase_deg}° outside [0, 360)")));
        }
        if !(duration_s >= 0.0) || !duration_s.is_finite() {
            return Err(Error::InvalidPulse(format!("duration {duration_s} s must be >= 0")));
        }
        Ok(Self {
            target,
            flip_deg,
            phase_deg,
            duration_s,
        })
    }

    /// Transition-selective Gaussian pulse; the phase is wrapped into [0, 360).
    pub fn selective(target: Transition, flip_deg: f64, phase_deg: f64) -> Result<Self> {
        Self::new(target, flip_deg, wrap_degrees(phase_deg), SELECTIVE_PULSE_S)
    }

    /// Non-selective sinc pulse; the phase is wrapped into [0, 360).
    pub fn nonselective(flip_deg: f64, phase_deg: f64) -> Result<Self> {
        Self::new(Transition::NonSelective, flip_deg, wrap_degrees(phase_deg), NONSELECTIVE_PULSE_S)
    }

    /// Same rotation about the opposite axis.
    pub fn inverse(&self) -> Self {
        Self {
            phase_deg: wrap_degrees(self.phase_deg + 180.0),
            ..*self
        }
    }

    /// Flip angle changed by `delta_deg`. A rotation through a negative angle
    /// is re-expressed as a positive one about the opposite axis.
    pub fn with_flip_error(&self, delta_deg: f64) -> Result<Self> {
        let flip = self.flip_deg + delta_deg;
        if flip < 0.0 {
            Self::new(self.target, -flip, wrap_degrees(self.phase_deg + 180.0), self.duration_s)
        } else {
            Self::new(self.target, flip, self.phase_deg, self.duration_s)
        }
    }
}

/// Frame-change bookkeeping: an exact diagonal phase operator applied at no
/// pulse cost.
///
/// * `transition12` by α: `diag(e^{−iα}, 1, 1)` (phase on level 1)
/// * `transition23` by α: `diag(1, 1, e^{−iα})` (phase on level 3)
/// * `nonselective` by α: `exp(−iα·Iz)`
///
/// Two of these reach every diagonal unitary up to global phase.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VirtualZ {
    pub target: Transition,
    pub phase_deg: f64,
}

impl VirtualZ {
    pub fn new(target: Transition, phase_deg: f64) -> Self {
        Self {
            target,
            phase_deg: wrap_degrees(phase_deg),
        }
    }

    pub fn inverse(&self) -> Self {
        Self::new(self.target, -self.phase_deg)
    }

    pub fn propagator(&self) -> Operator3 {
        let a = self.phase_deg.to_radians();
        let one = C64::new(1.0, 0.0);
        match self.target {
            Transition::T12 => Operator3::diagonal([cis(-a), one, one]),
            Transition::T23 => Operator3::diagonal([one, one, cis(-a)]),
            Transition::NonSelective => Operator3::diagonal([cis(-a), one, cis(a)]),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GradientEvent {
    pub label: String,
}

impl GradientEvent {
    pub fn new(label: impl Into<String>) -> Self {
        Self { label: label.into() }
    }
}

/// One record of a pulse program.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Event {
    Pulse(Pulse),
    Gradient(GradientEvent),
    Delay { duration_s: f64 },
    VirtualZ(VirtualZ),
}

impl Event {
    pub fn pulse(p: Pulse) -> Self {
        Event::Pulse(p)
    }

    pub fn gradient(label: &str) -> Self {
        Event::Gradient(GradientEvent::new(label))
    }

    pub fn virtual_z(target: Transition, phase_deg: f64) -> Self {
        Event::VirtualZ(VirtualZ::new(target, phase_deg))
    }

    /// Unitary of this event, or `None` for a gradient.
    pub fn propagator(&self, params: &HamiltonianParams) -> Result<Option<Operator3>> {
        Ok(match self {
            Event::Pulse(p) => Some(pulse_propagator(p)),
            Event::Delay { duration_s } => Some(delay_propagator(params, *duration_s)?),
            Event::VirtualZ(v) => Some(v.propagator()),
            Event::Gradient(_) => None,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RelaxationParams {
    pub t1_s: f64,
    pub t2_s: f64,
}

impl RelaxationParams {
    pub fn new(t1_s: f64, t2_s: f64) -> Result<Self> {
        if !(t2_s > 0.0 && t2_s <= 2.0 * t1_s) || !t1_s.is_finite() {
            return Err(Error::InvalidRelaxation(format!(
                "need 0 < T2 <= 2·T1, got T1 = {t1_s} s, T2 = {t2_s} s"
            )));
        }
        Ok(Self { t1_s, t2_s })
    }

    pub fn measured() -> Self {
        Self {
            t1_s: MEASURED_T1_S,
            t2_s: MEASURED_T2_S,
        }
    }
}

/// `exp(i·angle·A)` for Hermitian `A` with eigenvalues in {−1, 0, 1}:
/// `1 + i·sin(angle)·A + (cos(angle) − 1)·A²`.
fn exp_i_unit_spectrum(a: &Operator3, angle: f64) -> Operator3 {
    Operator3::identity()
        + a.scale(C64::new(0.0, angle.sin()))
        + (*a * *a).scale(C64::new(angle.cos() - 1.0, 0.0))
}

pub fn pulse_propagator(pl: &Pulse) -> Operator3 {
    let beta = pl.flip_deg.to_radians();
    let (s, c) = pl.phase_deg.to_radians().sin_cos();
    match pl.target.levels() {
        Some((p, q)) => {
            // cosφ·X_pq + sinφ·Y_pq, embedded in the (p, q) block
            let mut gen = Operator3::zero();
            gen.set(p, q, C64::new(c, -s));
            gen.set(q, p, C64::new(c, s));
            exp_i_unit_spectrum(&gen, beta / 2.0)
        }
        None => {
            let ops = SpinOperators::spin1();
            let gen = ops.ix.scale(C64::new(c, 0.0)) + ops.iy.scale(C64::new(s, 0.0));
            exp_i_unit_spectrum(&gen, beta)
        }
    }
}

/// `exp(−i·H·t)`, i.e. `diag(e^{−iΛt}, e^{+2iΛt}, e^{−iΛt})`.
pub fn delay_propagator(p: &HamiltonianParams, t: f64) -> Result<Operator3> {
    if !(t >= 0.0) {
        return Err(Error::NegativeDelay(t));
    }
    let h = hamiltonian_rotating_frame(p).diag();
    Ok(Operator3::diagonal(h.map(|e| cis(-e.re * t))))
}

/// Ideal crusher: zeroes every coherence and keeps the populations.
pub fn apply_gradient(rho: &DensityMatrix, _g: &GradientEvent) -> DensityMatrix {
    rho.map_entries(|m| Operator3::diagonal(m.diag()))
}

/// High-temperature equilibrium deviation, proportional to Iz.
pub fn thermal_deviation() -> DensityMatrix {
    DensityMatrix::deviation_diagonal([1.0, 0.0, -1.0]).expect("traceless")
}

/// Applies `events` in time order.
pub fn run_pulse_program(
    rho0: &DensityMatrix,
    events: &[Event],
    params: &HamiltonianParams,
) -> Result<DensityMatrix> {
    events.iter().try_fold(*rho0, |rho, ev| {
        Ok(match ev {
            Event::Gradient(g) => apply_gradient(&rho, g),
            _ => rho.evolve(&ev.propagator(params)?.expect("non-gradient event")),
        })
    })
}

/// `[90°@12 (x), g1]`: turns the thermal deviation into `diag(1/2, 1/2, −1)`.
pub fn pseudopure_preparation() -> Vec<Event> {
    vec![
        Event::pulse(Pulse::selective(Transition::T12, 90.0, 0.0).expect("valid")),
        Event::gradient("g1"),
    ]
}

/// Deviation of the form `(1/2)·1 − (3/2)·|ψ⟩⟨ψ|`, which is what the
/// laboratory preparation produces for |ψ⟩ = |−1⟩.
pub fn pseudopure_deviation(psi: &crate::linalg::QutritState) -> DensityMatrix {
    let m = Operator3::identity().scale(C64::new(0.5, 0.0)) - psi.projector().scale(C64::new(1.5, 0.0));
    DensityMatrix::new(m, DensityKind::Deviation).expect("traceless Hermitian")
}
