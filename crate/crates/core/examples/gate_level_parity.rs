//! Runs the one-query parity algorithm on every permutation and prints the
//! state it lands on.
use qutrit_parity::{parity_by_counting, run_parity_algorithm, PermutationMap};

fn main() {
    for p in PermutationMap::all() {
        let t = run_parity_algorithm(&p);
        let amps: Vec<String> = t
            .final_state
            .amplitudes()
            .iter()
            .map(|a| format!("{:+.3}{:+.3}i", a.re, a.im))
            .collect();
        println!(
            "{} {}  verdict {:<4} counting {:<4} phase {:+.4} rad  final [{}]",
            p.tag(),
            p,
            t.verdict,
            parity_by_counting(&p),
            t.global_phase,
            amps.join(", ")
        );
    }
}
