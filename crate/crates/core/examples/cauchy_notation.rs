//! Parses two-row permutation text, composes permutations and checks the
//! parity XOR law.
use qutrit_parity::{compose, parity_by_counting, parse_cauchy, PermutationMap};

fn main() {
    for text in ["(1 0 -1 / 0 1 -1)", "(1 0 -1 / -1 1 0)", "( 0 1 -1 / 1 0 -1 )", "(1 0 -1 / 1 1 0)"] {
        match parse_cauchy(text) {
            Ok(p) => println!("{text:<22} -> {} {}", p.tag(), parity_by_counting(&p)),
            Err(e) => println!("{text:<22} -> {e}"),
        }
    }
    let f4 = PermutationMap::standard(4).unwrap();
    let f5 = PermutationMap::standard(5).unwrap();
    for (a, b) in [(f4, f5), (f5, f4)] {
        let c = compose(&a, &b);
        println!(
            "{} after {} = {}  ({} ^ {} = {})",
            a.tag(),
            b.tag(),
            c.tag(),
            parity_by_counting(&a),
            parity_by_counting(&b),
            parity_by_counting(&c)
        );
    }
}
