mod common;

use common::{haar_unitary, random_deviation, random_state, rng};
use proptest::prelude::*;
use qutrit_parity::compiler::{compile, fidelity, sequence_propagator, GateName, GateSpec};
use qutrit_parity::experiment::{simulate_pulse, RunConfig};
use qutrit_parity::spin::{
    apply_gradient, delay_propagator, pulse_propagator, run_pulse_program, transition_frequencies, Event,
    GradientEvent, HamiltonianParams, Pulse, Transition, VirtualZ,
};
use qutrit_parity::{
    apply_unitary, compose, equal_up_to_global_phase, fourier, parity_by_counting, run_parity_algorithm,
    DensityMatrix, Operator3, Parity, PermutationMap, Tolerance, C64,
};

const CASES: u32 = 1000;

fn transition() -> impl Strategy<Value = Transition> {
    prop_oneof![Just(Transition::T12), Just(Transition::T23), Just(Transition::NonSelective)]
}

fn pulse() -> impl Strategy<Value = Pulse> {
    (transition(), 1e-6..360.0f64, 0.0..360.0f64, 0.0..1e-2f64)
        .prop_map(|(t, flip, phase, dur)| Pulse::new(t, flip, phase, dur).unwrap())
}

fn event() -> impl Strategy<Value = Event> {
    prop_oneof![
        pulse().prop_map(Event::Pulse),
        "[a-z][a-z0-9]{0,4}".prop_map(|l| Event::Gradient(GradientEvent::new(l))),
        (0.0..1.0f64).prop_map(|d| Event::Delay { duration_s: d }),
        (transition(), -720.0..720.0f64).prop_map(|(t, a)| Event::VirtualZ(VirtualZ::new(t, a))),
    ]
}

fn permutation() -> impl Strategy<Value = PermutationMap> {
    (0usize..6).prop_map(|i| PermutationMap::all()[i])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(CASES))]

    #[test]
    fn haar_unitaries_preserve_norm(seed in any::<u64>()) {
        let mut r = rng(seed);
        let u = haar_unitary(&mut r);
        prop_assert!(u.is_unitary(1e-12));
        let psi = random_state(&mut r);
        let out = apply_unitary(&psi, &u).unwrap();
        prop_assert!((out.norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn unitary_evolution_preserves_trace_and_hermiticity(seed in any::<u64>()) {
        let mut r = rng(seed);
        let rho = random_deviation(&mut r);
        let out = apply_unitary(&rho, &haar_unitary(&mut r)).unwrap();
        prop_assert!(out.trace().norm() < 1e-10);
        prop_assert!(out.entries().is_hermitian(1e-10));
        let a = rho.entries().hermitian_eigenvalues();
        let b = out.entries().hermitian_eigenvalues();
        for i in 0..3 {
            prop_assert!((a[i] - b[i]).abs() < 1e-9);
        }
    }

    #[test]
    fn global_phase_is_recovered(seed in any::<u64>(), phi in -std::f64::consts::PI..std::f64::consts::PI) {
        let psi = random_state(&mut rng(seed));
        let tol = Tolerance::default();
        let got = equal_up_to_global_phase(&psi, &psi.with_global_phase(phi), &tol).unwrap();
        let d = (got - phi).rem_euclid(std::f64::consts::TAU);
        prop_assert!(d.min(std::f64::consts::TAU - d) < 1e-9);
    }

    #[test]
    fn orthogonal_states_are_not_phase_equal(seed in any::<u64>()) {
        let u = haar_unitary(&mut rng(seed));
        let col = |j: usize| qutrit_parity::QutritState::new([u.get(0, j), u.get(1, j), u.get(2, j)]).unwrap();
        prop_assert!(equal_up_to_global_phase(&col(0), &col(1), &Tolerance::default()).is_none());
    }

    #[test]
    fn pulse_and_delay_propagators_are_unitary(p in pulse(), t in 0.0..1.0f64, lam in -2000.0..2000.0f64) {
        prop_assert!(pulse_propagator(&p).is_unitary(1e-10));
        let h = HamiltonianParams::from_lambda_hz(lam).unwrap();
        prop_assert!(delay_propagator(&h, t).unwrap().is_unitary(1e-10));
    }

    #[test]
    fn pulse_programs_preserve_trace_and_hermiticity(
        seed in any::<u64>(),
        events in prop::collection::vec(event(), 0..12),
    ) {
        let rho = random_deviation(&mut rng(seed));
        let out = run_pulse_program(&rho, &events, &HamiltonianParams::measured()).unwrap();
        prop_assert!(out.trace().norm() < 1e-10);
        prop_assert!(out.entries().is_hermitian(1e-10));
    }

    #[test]
    fn gradient_is_idempotent_and_trace_preserving(seed in any::<u64>()) {
        let rho = random_deviation(&mut rng(seed));
        let g = GradientEvent::new("g");
        let once = apply_gradient(&rho, &g);
        prop_assert_eq!(apply_gradient(&once, &g), once);
        prop_assert!((once.trace() - rho.trace()).norm() < 1e-12);
    }

    #[test]
    fn delay_leaves_diagonal_states_alone(a in -1.0..1.0f64, b in -1.0..1.0f64, t in 0.0..10.0f64, lam in -1e3..1e3f64) {
        let rho = DensityMatrix::deviation_diagonal([a, b, -a - b]).unwrap();
        let u = delay_propagator(&HamiltonianParams::from_lambda_hz(lam).unwrap(), t).unwrap();
        let out = apply_unitary(&rho, &u).unwrap();
        prop_assert!(out.entries().max_abs_diff(rho.entries()).0 < 1e-12);
    }

    #[test]
    fn splitting_is_six_lambda(lam in -1e6..1e6f64) {
        prop_assume!(lam.abs() > 1e-3);
        let h = HamiltonianParams::new(lam).unwrap();
        let want = 6.0 * lam.abs() / std::f64::consts::TAU;
        prop_assert!((transition_frequencies(&h).separation_hz() - want).abs() <= 1e-12 * want);
    }

    #[test]
    fn event_json_round_trip_is_bit_exact(events in prop::collection::vec(event(), 0..8)) {
        let text = serde_json::to_string(&events).unwrap();
        let back: Vec<Event> = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(serde_json::to_string(&back).unwrap(), text);
        for (a, b) in events.iter().zip(&back) {
            if let (Event::Pulse(x), Event::Pulse(y)) = (a, b) {
                prop_assert_eq!(x.flip_deg.to_bits(), y.flip_deg.to_bits());
                prop_assert_eq!(x.phase_deg.to_bits(), y.phase_deg.to_bits());
            }
        }
    }

    #[test]
    fn fidelity_ignores_global_phase(seed in any::<u64>(), phi in 0.0..std::f64::consts::TAU) {
        let u = haar_unitary(&mut rng(seed));
        let v = u.scale(C64::from_polar(1.0, phi));
        prop_assert!((fidelity(&u, &v) - 1.0).abs() < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// The spectral verdict does not depend on the sign or size of Λ as long
    /// as both lines fit the acquisition window.
    #[test]
    fn pulse_verdict_invariant_under_lambda(p in permutation(), mag in 40.0..600.0f64, negative in any::<bool>()) {
        let lam = if negative { -mag } else { mag };
        let config = RunConfig { lambda_q_hz: lam, ..Default::default() };
        let run = simulate_pulse(&config.setup().unwrap(), &p, 0).unwrap();
        prop_assert_eq!(run.readout.map(|r| r.verdict), Some(parity_by_counting(&p)));
    }

    /// End to end, the populations after F⁻¹ match the gate-level state.
    #[test]
    fn pulse_populations_match_gate_level(p in permutation(), lam in 40.0..600.0f64) {
        let config = RunConfig { lambda_q_hz: lam, ..Default::default() };
        let run = simulate_pulse(&config.setup().unwrap(), &p, 0).unwrap();
        let s = run_parity_algorithm(&p).final_state;
        for i in 0..3 {
            let want = 0.5 - 1.5 * s.amplitudes()[i].norm_sqr();
            prop_assert!((run.pre_detection.get(i, i).re - want).abs() < 1e-8);
        }
    }
}

#[test]
fn compose_is_associative_on_all_triples() {
    let all = PermutationMap::all();
    let mut n = 0;
    for a in &all {
        for b in &all {
            for c in &all {
                assert_eq!(compose(&compose(a, b), c), compose(a, &compose(b, c)));
                n += 1;
            }
        }
    }
    assert_eq!(n, 216);
}

#[test]
fn parity_xor_law_on_all_pairs() {
    let all = PermutationMap::all();
    let mut n = 0;
    for a in &all {
        for b in &all {
            let c = compose(a, b);
            assert_eq!(parity_by_counting(&c), parity_by_counting(a) ^ parity_by_counting(b));
            let u = qutrit_parity::unitary_of(&c);
            let prod = qutrit_parity::unitary_of(b) * qutrit_parity::unitary_of(a);
            assert!(u.approx_eq(&prod, 1e-15));
            n += 1;
        }
    }
    assert_eq!(n, 36);
}

#[test]
fn gate_level_verdict_matches_counting_everywhere() {
    for p in PermutationMap::all() {
        let want = parity_by_counting(&p);
        assert_eq!(run_parity_algorithm(&p).verdict, want);
        let text = p.to_string();
        assert_eq!(text.parse::<PermutationMap>().unwrap(), p);
    }
    assert_eq!(
        PermutationMap::all().iter().filter(|p| parity_by_counting(p) == Parity::Even).count(),
        3
    );
}

#[test]
fn fourier_matrices_are_unitary() {
    for d in 2..=16 {
        assert!(fourier(d).unwrap().unitarity_defect() < 1e-12, "d = {d}");
    }
}

#[test]
fn compiled_gates_compose_to_algorithm() {
    // F⁻¹·U·F assembled from compiled sequences equals the ideal product.
    let seq = |g| compile(&GateSpec::named(g).unwrap()).unwrap().events;
    for p in PermutationMap::all() {
        let mut events = seq(GateName::F);
        events.extend(seq(GateName::oracle(&p)));
        events.extend(seq(GateName::Finv));
        let got = sequence_propagator(&events).unwrap();
        let f = qutrit_parity::fourier3();
        let want: Operator3 = f.dagger() * qutrit_parity::unitary_of(&p) * f;
        assert!(fidelity(&want, &got) > 1.0 - 1e-9);
    }
}
