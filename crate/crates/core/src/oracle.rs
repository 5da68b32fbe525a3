//! Permutations of the three qutrit levels, the six oracle unitaries, the
//! qutrit Fourier transform and the single-query parity algorithm.
//!
//! # Matrix convention
//!
//! [`unitary_of`] returns the oracle matrices exactly as they are usually
//! printed for this algorithm. Under the column-as-input reading
//! `U|j⟩ = |f(j)⟩`, the printed matrices for the two 3-cycles `f2` and `f3`
//! are the matrices of the *inverse* maps; the four involutions are
//! unaffected. Equivalently every printed matrix is the transpose of the
//! column-as-input matrix, so
//!
//! ```text
//! unitary_of(p ∘ q) = unitary_of(q) · unitary_of(p)
//! ```
//!
//! Parity is invariant under inversion, so the algorithm's verdict does not
//! depend on the reading.

use std::f64::consts::PI;
use std::fmt;
use std::ops::BitXor;
use std::str::FromStr;
use std::sync::atomic::{AtomicUsize, Ordering};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{cis, equal_up_to_global_phase, Evolve, Level, Operator3, QutritState, Tolerance, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn as_str(self) -> &'static str {
        match self {
            Parity::Even => "even",
            Parity::Odd => "odd",
        }
    }
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl BitXor for Parity {
    type Output = Parity;

    fn bitxor(self, rhs: Parity) -> Parity {
        if self == rhs {
            Parity::Even
        } else {
            Parity::Odd
        }
    }
}

/// Bottom rows of the six maps, read against the top row (+1, 0, −1).
const STANDARD_IMAGES: [[i8; 3]; 6] = [
    [1, 0, -1],
    [0, -1, 1],
    [-1, 1, 0],
    [0, 1, -1],
    [1, -1, 0],
    [-1, 0, 1],
];

/// Printed oracle matrices U1…U6, in the same order as [`STANDARD_IMAGES`].
const PRINTED_UNITARIES: [[[f64; 3]; 3]; 6] = [
    [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
    [[0.0, 1.0, 0.0], [0.0, 0.0, 1.0], [1.0, 0.0, 0.0]],
    [[0.0, 0.0, 1.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]],
    [[0.0, 1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 1.0]],
    [[1.0, 0.0, 0.0], [0.0, 0.0, 1.0], [0.0, 1.0, 0.0]],
    [[0.0, 0.0, 1.0], [0.0, 1.0, 0.0], [1.0, 0.0, 0.0]],
];

/// A bijection on the level labels {+1, 0, −1}.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct PermutationMap {
    /// `images[l.index()]` is the image of level `l`.
    images: [Level; 3],
}

impl PermutationMap {
    pub fn new(images: [Level; 3]) -> Result<Self> {
        let mut seen = [false; 3];
        for (i, l) in images.iter().enumerate() {
            if std::mem::replace(&mut seen[l.index()], true) {
                return Err(Error::Parse {
                    position: i,
                    message: format!("label {l} repeated in image row"),
                });
            }
        }
        Ok(Self { images })
    }

    pub fn identity() -> Self {
        Self { images: Level::ALL }
    }

    /// The named map `f1`…`f6` (index 1…6).
    pub fn standard(k: usize) -> Option<Self> {
        let row = STANDARD_IMAGES.get(k.checked_sub(1)?)?;
        Some(Self {
            images: row.map(|m| Level::from_m(m).expect("valid label")),
        })
    }

    /// All six maps in order f1…f6: three even, then three odd.
    pub fn all() -> [Self; 6] {
        std::array::from_fn(|i| Self::standard(i + 1).expect("six standard maps"))
    }

    pub fn apply(&self, l: Level) -> Level {
        self.images[l.index()]
    }

    pub fn images(&self) -> [Level; 3] {
        self.images
    }

    pub fn inverse(&self) -> Self {
        let mut images = Level::ALL;
        for l in Level::ALL {
            images[self.apply(l).index()] = l;
        }
        Self { images }
    }

    /// 1…6 position of this map in the standard table.
    pub fn index(&self) -> usize {
        let row = self.images.map(|l| l.m());
        STANDARD_IMAGES
            .iter()
            .position(|r| *r == row)
            .expect("every bijection on three labels is tabulated")
            + 1
    }

    /// Name tag `"f1"`…`"f6"`.
    pub fn tag(&self) -> &'static str {
        ["f1", "f2", "f3", "f4", "f5", "f6"][self.index() - 1]
    }

    /// Accepts a tag `f1`…`f6` or Cauchy two-row text.
    pub fn from_name_or_cauchy(text: &str) -> Result<Self> {
        let t = text.trim();
        if let Some(k) = t.strip_prefix('f').and_then(|d| d.parse::<usize>().ok()) {
            return Self::standard(k).ok_or_else(|| Error::Parse {
                position: 0,
                message: format!("unknown permutation tag '{t}' (expected f1..f6)"),
            });
        }
        parse_cauchy(t)
    }
}

impl fmt::Debug for PermutationMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.tag(), self)
    }
}

impl fmt::Display for PermutationMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c] = self.images;
        write!(f, "(1 0 -1 / {a} {b} {c})")
    }
}

impl FromStr for PermutationMap {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::from_name_or_cauchy(s)
    }
}

impl Serialize for PermutationMap {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.tag())
    }
}

impl<'de> Deserialize<'de> for PermutationMap {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        Self::from_name_or_cauchy(&text).map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Open,
    Close,
    Slash,
    Label(Level),
}

fn tokenize(text: &str) -> Result<Vec<(usize, Token)>> {
    let mut out = Vec::new();
    let mut chars = text.char_indices().peekable();
    while let Some(&(pos, ch)) = chars.peek() {
        match ch {
            c if c.is_whitespace() => {
                chars.next();
            }
            '(' | ')' | '/' => {
                chars.next();
                let tok = match ch {
                    '(' => Token::Open,
                    ')' => Token::Close,
                    _ => Token::Slash,
                };
                out.push((pos, tok));
            }
            _ => {
                let mut word = String::new();
                while let Some(&(_, c)) = chars.peek() {
                    if c.is_whitespace() || matches!(c, '(' | ')' | '/') {
                        break;
                    }
                    word.push(c);
                    chars.next();
                }
                let level = match word.as_str() {
                    "1" | "+1" => Level::Plus,
                    "0" | "+0" | "-0" => Level::Zero,
                    "-1" => Level::Minus,
                    _ => {
                        return Err(Error::Parse {
                            position: pos,
                            message: format!("unknown token '{word}'"),
                        })
                    }
                };
                out.push((pos, Token::Label(level)));
            }
        }
    }
    Ok(out)
}

/// Parses Cauchy two-row notation such as `"(1 0 -1 / 0 -1 1)"`: each label
/// in the top row maps to the label beneath it.
pub fn parse_cauchy(text: &str) -> Result<PermutationMap> {
    let tokens = tokenize(text)?;
    let end = text.len();
    let mut it = tokens.into_iter().peekable();

    let expect = |tok: Option<(usize, Token)>, want: Token, what: &str| -> Result<usize> {
        match tok {
            Some((p, t)) if t == want => Ok(p),
            Some((p, t)) => Err(Error::Parse {
                position: p,
                message: format!("expected {what}, found {t:?}"),
            }),
            None => Err(Error::Parse {
                position: end,
                message: format!("expected {what}, found end of input"),
            }),
        }
    };

    expect(it.next(), Token::Open, "'('")?;
    let mut rows: [Vec<(usize, Level)>; 2] = [Vec::new(), Vec::new()];
    for (r, row) in rows.iter_mut().enumerate() {
        while let Some((p, Token::Label(l))) = it.peek().cloned() {
            row.push((p, l));
            it.next();
        }
        let (sep, what) = if r == 0 { (Token::Slash, "'/'") } else { (Token::Close, "')'") };
        let p = expect(it.next(), sep, what)?;
        if row.len() != 3 {
            return Err(Error::Parse {
                position: p,
                message: format!("row {} has {} labels, expected 3", r + 1, row.len()),
            });
        }
    }
    if let Some((p, t)) = it.next() {
        return Err(Error::Parse {
            position: p,
            message: format!("trailing token {t:?}"),
        });
    }

    for row in &rows {
        let mut seen = [false; 3];
        for &(p, l) in row {
            if std::mem::replace(&mut seen[l.index()], true) {
                return Err(Error::Parse {
                    position: p,
                    message: format!("label {l} repeated"),
                });
            }
        }
    }

    let mut images = Level::ALL;
    for (&(_, top), &(_, bottom)) in rows[0].iter().zip(rows[1].iter()) {
        images[top.index()] = bottom;
    }
    PermutationMap::new(images)
}

/// Classical ground truth: parity of the inversion count.
pub fn parity_by_counting(p: &PermutationMap) -> Parity {
    let idx = p.images.map(Level::index);
    let inversions = (0..3)
        .flat_map(|i| (i + 1..3).map(move |j| (i, j)))
        .filter(|&(i, j)| idx[i] > idx[j])
        .count();
    if inversions % 2 == 0 {
        Parity::Even
    } else {
        Parity::Odd
    }
}

/// Oracle matrix for `p`, as printed (see the module docs for convention).
pub fn unitary_of(p: &PermutationMap) -> Operator3 {
    Operator3::from_real(PRINTED_UNITARIES[p.index() - 1])
}

/// `(p ∘ q)(x) = p(q(x))`
pub fn compose(p: &PermutationMap, q: &PermutationMap) -> PermutationMap {
    PermutationMap {
        images: q.images.map(|l| p.apply(l)),
    }
}

/// Exponent assigned to index `j` of a `d`-dimensional Fourier matrix:
/// `0, 1, …, ⌈d/2⌉−1, −⌊d/2⌋, …, −1`.
fn fourier_exponent(j: usize, d: usize) -> i64 {
    if j < d.div_ceil(2) {
        j as i64
    } else {
        j as i64 - d as i64
    }
}

/// Dense row-major `d×d` complex matrix, used only for the general-`d`
/// Fourier transform.
#[derive(Debug, Clone, PartialEq)]
pub struct SquareMatrix {
    pub dim: usize,
    pub entries: Vec<C64>,
}

impl SquareMatrix {
    pub fn get(&self, r: usize, c: usize) -> C64 {
        self.entries[r * self.dim + c]
    }

    /// Max entrywise deviation of `M·M†` from the identity.
    pub fn unitarity_defect(&self) -> f64 {
        let d = self.dim;
        let mut worst: f64 = 0.0;
        for r in 0..d {
            for c in 0..d {
                let v: C64 = (0..d).map(|k| self.get(r, k) * self.get(c, k).conj()).sum();
                let want = if r == c { 1.0 } else { 0.0 };
                worst = worst.max((v - want).norm());
            }
        }
        worst
    }
}

/// Fourier matrix of size `d ≥ 2`: entry `(j, k) = exp(2πi·s(j)·s(k)/d)/√d`
/// with the signed exponent labelling `s` above.
pub fn fourier(d: usize) -> Result<SquareMatrix> {
    if d < 2 {
        return Err(Error::InvalidDimension(d));
    }
    let norm = 1.0 / (d as f64).sqrt();
    let mut entries = Vec::with_capacity(d * d);
    for j in 0..d {
        for k in 0..d {
            // Reduce the exponent mod d before forming the angle so that the
            // third roots of unity come straight from 2π/3.
            let e = (fourier_exponent(j, d) * fourier_exponent(k, d)).rem_euclid(d as i64);
            let e = if e > d as i64 / 2 { e - d as i64 } else { e };
            entries.push(cis(2.0 * PI * e as f64 / d as f64) * norm);
        }
    }
    Ok(SquareMatrix { dim: d, entries })
}

/// The qutrit Fourier transform as an [`Operator3`].
pub fn fourier3() -> Operator3 {
    let f = fourier(3).expect("d = 3 is valid");
    let mut m = Operator3::zero();
    for r in 0..3 {
        for c in 0..3 {
            m.set(r, c, f.get(r, c));
        }
    }
    m
}

/// Black box applying an unknown permutation unitary.
pub trait Oracle {
    fn query(&self, state: &QutritState) -> QutritState;
}

#[derive(Debug, Clone, Copy)]
pub struct PermutationOracle {
    unitary: Operator3,
}

impl PermutationOracle {
    pub fn new(p: &PermutationMap) -> Self {
        Self {
            unitary: unitary_of(p),
        }
    }
}

impl Oracle for PermutationOracle {
    fn query(&self, state: &QutritState) -> QutritState {
        state.evolve(&self.unitary)
    }
}

/// Wraps an oracle and counts queries.
#[derive(Debug)]
pub struct CountingOracle<O> {
    inner: O,
    calls: AtomicUsize,
}

impl<O: Oracle> CountingOracle<O> {
    pub fn new(inner: O) -> Self {
        Self {
            inner,
            calls: AtomicUsize::new(0),
        }
    }

    pub fn calls(&self) -> usize {
        self.calls.load(Ordering::SeqCst)
    }
}

impl<O: Oracle> Oracle for CountingOracle<O> {
    fn query(&self, state: &QutritState) -> QutritState {
        self.calls.fetch_add(1, Ordering::SeqCst);
        self.inner.query(state)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlgorithmTrace {
    pub initial: QutritState,
    pub post_fourier: QutritState,
    pub post_oracle: QutritState,
    #[serde(rename = "final")]
    pub final_state: QutritState,
    pub verdict: Parity,
    /// Phase of the final state relative to the basis state it lands on, in
    /// radians.
    pub global_phase: f64,
}

/// Even if the state sits on |−1⟩, odd if on |0⟩, within
/// `tol.phase_equivalence` in probability.
pub fn classify_final_state(s: &QutritState, tol: &Tolerance) -> Result<Parity> {
    let p_minus = s.probability(Level::Minus);
    let p_zero = s.probability(Level::Zero);
    if p_minus >= 1.0 - tol.phase_equivalence {
        Ok(Parity::Even)
    } else if p_zero >= 1.0 - tol.phase_equivalence {
        Ok(Parity::Odd)
    } else {
        Err(Error::UnclassifiableState { p_minus, p_zero })
    }
}

/// `F†·O·F·|−1⟩` with exactly one oracle query.
pub fn run_with_oracle(oracle: &dyn Oracle, tol: &Tolerance) -> Result<AlgorithmTrace> {
    let f = fourier3();
    let initial = QutritState::basis(Level::Minus);
    let post_fourier = initial.evolve(&f);
    let post_oracle = oracle.query(&post_fourier);
    let final_state = post_oracle.evolve(&f.dagger());
    let verdict = classify_final_state(&final_state, tol)?;
    let landing = match verdict {
        Parity::Even => Level::Minus,
        Parity::Odd => Level::Zero,
    };
    let global_phase = equal_up_to_global_phase(&QutritState::basis(landing), &final_state, tol)
        .expect("classified state overlaps its basis state");
    Ok(AlgorithmTrace {
        initial,
        post_fourier,
        post_oracle,
        final_state,
        verdict,
        global_phase,
    })
}

pub fn run_parity_algorithm(p: &PermutationMap) -> AlgorithmTrace {
    run_with_oracle(&PermutationOracle::new(p), &Tolerance::default())
        .expect("a permutation oracle always lands on |-1> or |0>")
}
