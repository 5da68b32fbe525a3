//! Small dense complex linear algebra for a single qutrit.
//!
//! The basis is fixed in energy-level order: index 0 is |+1⟩ (level 1),
//! index 1 is |0⟩ (level 2) and index 2 is |−1⟩ (level 3). Every matrix in
//! this crate uses that ordering, so printed 3×3 permutation matrices can be
//! entered row by row.
//!
//! Matrices and states serialize as plain JSON: a complex number is a pair
//! `[re, im]`, a state is a list of three pairs and an operator is a list of
//! three rows of three pairs.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const DIM: usize = 3;

/// Squared-norm tolerance enforced on every [`QutritState`].
pub const NORM_TOLERANCE: f64 = 1e-12;

/// `e^{iθ}` built from the angle itself.
#[inline]
pub fn cis(theta: f64) -> C64 {
    C64::from_polar(1.0, theta)
}

/// Spin projection labels of the three levels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Level {
    Plus,
    Zero,
    Minus,
}

impl Level {
    pub const ALL: [Level; 3] = [Level::Plus, Level::Zero, Level::Minus];

    pub fn index(self) -> usize {
        match self {
            Level::Plus => 0,
            Level::Zero => 1,
            Level::Minus => 2,
        }
    }

    pub fn from_index(i: usize) -> Option<Level> {
        Level::ALL.get(i).copied()
    }

    /// Magnetic quantum number m.
    pub fn m(self) -> i8 {
        match self {
            Level::Plus => 1,
            Level::Zero => 0,
            Level::Minus => -1,
        }
    }

    pub fn from_m(m: i8) -> Option<Level> {
        match m {
            1 => Some(Level::Plus),
            0 => Some(Level::Zero),
            -1 => Some(Level::Minus),
            _ => None,
        }
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.m())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    pub entrywise_abs: f64,
    pub phase_equivalence: f64,
}

impl Tolerance {
    pub fn new(entrywise_abs: f64, phase_equivalence: f64) -> Result<Self> {
        if !(entrywise_abs > 0.0) || !(phase_equivalence > 0.0) {
            return Err(Error::InvalidTolerance(format!(
                "both bounds must be strictly positive, got {entrywise_abs} and {phase_equivalence}"
            )));
        }
        Ok(Self {
            entrywise_abs,
            phase_equivalence,
        })
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            entrywise_abs: 1e-10,
            phase_equivalence: 1e-9,
        }
    }
}

/// A 3×3 complex matrix.
#[derive(Clone, Copy, PartialEq)]
pub struct Operator3 {
    entries: [[C64; DIM]; DIM],
}

impl Operator3 {
    pub const fn from_entries(entries: [[C64; DIM]; DIM]) -> Self {
        Self { entries }
    }

    pub fn from_real(rows: [[f64; DIM]; DIM]) -> Self {
        let mut entries = [[C64::new(0.0, 0.0); DIM]; DIM];
        for (r, row) in rows.iter().enumerate() {
            for (c, &v) in row.iter().enumerate() {
                entries[r][c] = C64::new(v, 0.0);
            }
        }
        Self { entries }
    }

    pub fn zero() -> Self {
        Self {
            entries: [[C64::new(0.0, 0.0); DIM]; DIM],
        }
    }

    pub fn identity() -> Self {
        Self::diagonal([C64::new(1.0, 0.0); DIM])
    }

    pub fn diagonal(d: [C64; DIM]) -> Self {
        let mut m = Self::zero();
        for (i, v) in d.into_iter().enumerate() {
            m.entries[i][i] = v;
        }
        m
    }

    pub fn real_diagonal(d: [f64; DIM]) -> Self {
        Self::diagonal(d.map(|v| C64::new(v, 0.0)))
    }

    /// `|a⟩⟨b|`
    pub fn outer(a: &QutritState, b: &QutritState) -> Self {
        let mut m = Self::zero();
        for r in 0..DIM {
            for c in 0..DIM {
                m.entries[r][c] = a.amplitudes[r] * b.amplitudes[c].conj();
            }
        }
        m
    }

    pub fn entries(&self) -> &[[C64; DIM]; DIM] {
        &self.entries
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.entries[row][col]
    }

    pub fn set(&mut self, row: usize, col: usize, v: C64) {
        self.entries[row][col] = v;
    }

    pub fn diag(&self) -> [C64; DIM] {
        [self.entries[0][0], self.entries[1][1], self.entries[2][2]]
    }

    pub fn dagger(&self) -> Self {
        let mut m = Self::zero();
        for r in 0..DIM {
            for c in 0..DIM {
                m.entries[c][r] = self.entries[r][c].conj();
            }
        }
        m
    }

    pub fn transpose(&self) -> Self {
        let mut m = Self::zero();
        for r in 0..DIM {
            for c in 0..DIM {
                m.entries[c][r] = self.entries[r][c];
            }
        }
        m
    }

    pub fn trace(&self) -> C64 {
        self.entries[0][0] + self.entries[1][1] + self.entries[2][2]
    }

    pub fn scale(&self, s: C64) -> Self {
        let mut m = *self;
        m.entries.iter_mut().flatten().for_each(|v| *v *= s);
        m
    }

    pub fn apply(&self, v: &[C64; DIM]) -> [C64; DIM] {
        let mut out = [C64::new(0.0, 0.0); DIM];
        for (r, o) in out.iter_mut().enumerate() {
            *o = (0..DIM).map(|c| self.entries[r][c] * v[c]).sum();
        }
        out
    }

    /// Largest entrywise modulus of `self − other`, with its position.
    pub fn max_abs_diff(&self, other: &Self) -> (f64, usize, usize) {
        let mut worst = (0.0, 0, 0);
        for r in 0..DIM {
            for c in 0..DIM {
                let d = (self.entries[r][c] - other.entries[r][c]).norm();
                if d > worst.0 {
                    worst = (d, r, c);
                }
            }
        }
        worst
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.max_abs_diff(other).0 <= tol
    }

    /// Checks `U·U† = I` entrywise.
    pub fn check_unitary(&self, tol: f64) -> Result<()> {
        let (max_deviation, row, col) = (*self * self.dagger()).max_abs_diff(&Self::identity());
        if max_deviation > tol {
            return Err(Error::NonUnitary {
                max_deviation,
                row,
                col,
            });
        }
        Ok(())
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.check_unitary(tol).is_ok()
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.approx_eq(&self.dagger(), tol)
    }

    pub fn commutator(&self, other: &Self) -> Self {
        *self * *other - *other * *self
    }

    /// Eigenvalues of a Hermitian matrix in descending order.
    ///
    /// Uses the trigonometric solution of the characteristic cubic; the
    /// anti-Hermitian part of `self` is ignored.
    pub fn hermitian_eigenvalues(&self) -> [f64; DIM] {
        let h = (*self + self.dagger()).scale(C64::new(0.5, 0.0));
        let a = |r: usize, c: usize| h.entries[r][c];
        let p1 = a(0, 1).norm_sqr() + a(0, 2).norm_sqr() + a(1, 2).norm_sqr();
        let d = [a(0, 0).re, a(1, 1).re, a(2, 2).re];
        if p1 == 0.0 {
            let mut e = d;
            e.sort_by(|x, y| y.total_cmp(x));
            return e;
        }
        let q = (d[0] + d[1] + d[2]) / 3.0;
        let p2 = d.iter().map(|x| (x - q).powi(2)).sum::<f64>() + 2.0 * p1;
        let p = (p2 / 6.0).sqrt();
        let b = (h - Self::identity().scale(C64::new(q, 0.0))).scale(C64::new(1.0 / p, 0.0));
        let r = (b.determinant().re / 2.0).clamp(-1.0, 1.0);
        let phi = r.acos() / 3.0;
        let e1 = q + 2.0 * p * phi.cos();
        let e3 = q + 2.0 * p * (phi + 2.0 * std::f64::consts::PI / 3.0).cos();
        [e1, 3.0 * q - e1 - e3, e3]
    }

    pub fn determinant(&self) -> C64 {
        let m = &self.entries;
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    }
}

impl Mul for Operator3 {
    type Output = Operator3;

    fn mul(self, rhs: Operator3) -> Operator3 {
        let mut m = Operator3::zero();
        for r in 0..DIM {
            for c in 0..DIM {
                m.entries[r][c] = (0..DIM).map(|k| self.entries[r][k] * rhs.entries[k][c]).sum();
            }
        }
        m
    }
}

impl Add for Operator3 {
    type Output = Operator3;

    fn add(self, rhs: Operator3) -> Operator3 {
        let mut m = self;
        for r in 0..DIM {
            for c in 0..DIM {
                m.entries[r][c] += rhs.entries[r][c];
            }
        }
        m
    }
}

impl Sub for Operator3 {
    type Output = Operator3;

    fn sub(self, rhs: Operator3) -> Operator3 {
        let mut m = self;
        for r in 0..DIM {
            for c in 0..DIM {
                m.entries[r][c] -= rhs.entries[r][c];
            }
        }
        m
    }
}

impl fmt::Debug for Operator3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Operator3 [")?;
        for row in &self.entries {
            write!(f, "  ")?;
            for v in row {
                write!(f, "{:>+.6}{:+.6}i  ", v.re, v.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

type PairRows = Vec<Vec<[f64; 2]>>;

fn pair(v: C64) -> [f64; 2] {
    [v.re, v.im]
}

impl Serialize for Operator3 {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: PairRows = self
            .entries
            .iter()
            .map(|row| row.iter().map(|&v| pair(v)).collect())
            .collect();
        rows.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Operator3 {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let rows = PairRows::deserialize(d)?;
        if rows.len() != DIM || rows.iter().any(|r| r.len() != DIM) {
            return Err(D::Error::custom("operator must be a 3x3 list of [re, im] pairs"));
        }
        let mut m = Operator3::zero();
        for (r, row) in rows.iter().enumerate() {
            for (c, p) in row.iter().enumerate() {
                m.entries[r][c] = C64::new(p[0], p[1]);
            }
        }
        Ok(m)
    }
}

/// Normalized pure state of one qutrit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<[f64; 2]>", into = "Vec<[f64; 2]>")]
pub struct QutritState {
    amplitudes: [C64; DIM],
}

impl QutritState {
    pub fn new(amplitudes: [C64; DIM]) -> Result<Self> {
        let norm_sqr: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if (norm_sqr - 1.0).abs() > NORM_TOLERANCE || !norm_sqr.is_finite() {
            return Err(Error::NotNormalized { norm_sqr });
        }
        Ok(Self { amplitudes })
    }

    /// Rescales an arbitrary non-zero vector to unit norm.
    pub fn normalized(amplitudes: [C64; DIM]) -> Result<Self> {
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::NotNormalized {
                norm_sqr: norm * norm,
            });
        }
        Self::new(amplitudes.map(|a| a / norm))
    }

    pub fn basis(level: Level) -> Self {
        let mut amplitudes = [C64::new(0.0, 0.0); DIM];
        amplitudes[level.index()] = C64::new(1.0, 0.0);
        Self { amplitudes }
    }

    pub fn amplitudes(&self) -> &[C64; DIM] {
        &self.amplitudes
    }

    pub fn amplitude(&self, level: Level) -> C64 {
        self.amplitudes[level.index()]
    }

    pub fn probability(&self, level: Level) -> f64 {
        self.amplitude(level).norm_sqr()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `⟨self|other⟩`
    pub fn inner(&self, other: &Self) -> C64 {
        self.amplitudes
            .iter()
            .zip(other.amplitudes.iter())
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// Multiplies by `e^{iφ}`.
    pub fn with_global_phase(&self, phi: f64) -> Self {
        let z = cis(phi);
        Self {
            amplitudes: self.amplitudes.map(|a| a * z),
        }
    }

    pub fn projector(&self) -> Operator3 {
        Operator3::outer(self, self)
    }
}

impl TryFrom<Vec<[f64; 2]>> for QutritState {
    type Error = Error;

    fn try_from(v: Vec<[f64; 2]>) -> Result<Self> {
        let amps: [[f64; 2]; DIM] = v.try_into().map_err(|v: Vec<[f64; 2]>| Error::Parse {
            position: 0,
            message: format!("state needs 3 amplitudes, got {}", v.len()),
        })?;
        Self::new(amps.map(|p| C64::new(p[0], p[1])))
    }
}

impl From<QutritState> for Vec<[f64; 2]> {
    fn from(s: QutritState) -> Self {
        s.amplitudes.iter().map(|&a| pair(a)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DensityKind {
    /// A physical state: unit trace, positive semidefinite.
    TrueState,
    /// The traceless deviation part of an NMR ensemble state.
    Deviation,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DensityMatrix {
    entries: Operator3,
    kind: DensityKind,
}

impl DensityMatrix {
    pub const TOLERANCE: f64 = 1e-10;

    pub fn new(entries: Operator3, kind: DensityKind) -> Result<Self> {
        let tol = Self::TOLERANCE;
        if !entries.is_hermitian(tol) {
            return Err(Error::InvalidDensityMatrix(format!(
                "not Hermitian (max |ρ − ρ†| = {:e})",
                entries.max_abs_diff(&entries.dagger()).0
            )));
        }
        let tr = entries.trace();
        match kind {
            DensityKind::TrueState => {
                if (tr - C64::new(1.0, 0.0)).norm() > tol {
                    return Err(Error::InvalidDensityMatrix(format!("trace {tr} != 1")));
                }
                let min_eig = entries.hermitian_eigenvalues()[2];
                if min_eig < -tol {
                    return Err(Error::InvalidDensityMatrix(format!(
                        "negative eigenvalue {min_eig:e}"
                    )));
                }
            }
            DensityKind::Deviation => {
                if tr.norm() > tol {
                    return Err(Error::InvalidDensityMatrix(format!(
                        "deviation matrix must be traceless, trace = {tr}"
                    )));
                }
            }
        }
        Ok(Self { entries, kind })
    }

    pub fn from_pure(state: &QutritState) -> Self {
        Self {
            entries: state.projector(),
            kind: DensityKind::TrueState,
        }
    }

    pub fn deviation_diagonal(d: [f64; DIM]) -> Result<Self> {
        Self::new(Operator3::real_diagonal(d), DensityKind::Deviation)
    }

    pub fn entries(&self) -> &Operator3 {
        &self.entries
    }

    pub fn kind(&self) -> DensityKind {
        self.kind
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.entries.get(row, col)
    }

    pub fn trace(&self) -> C64 {
        self.entries.trace()
    }

    /// Diagonal entries (real parts).
    pub fn populations(&self) -> [f64; DIM] {
        self.entries.diag().map(|v| v.re)
    }

    pub fn scale(&self, s: f64) -> Result<Self> {
        Self::new(self.entries.scale(C64::new(s, 0.0)), self.kind)
    }

    /// Rebuilds the matrix with the same kind; used by non-unitary maps that
    /// preserve the invariants (e.g. a crusher gradient).
    pub(crate) fn map_entries(&self, f: impl FnOnce(&Operator3) -> Operator3) -> Self {
        Self {
            entries: f(&self.entries),
            kind: self.kind,
        }
    }
}

/// Anything a unitary can act on.
pub trait Evolve: Sized {
    fn evolve(&self, u: &Operator3) -> Self;
}

impl Evolve for QutritState {
    fn evolve(&self, u: &Operator3) -> Self {
        Self {
            amplitudes: u.apply(&self.amplitudes),
        }
    }
}

impl Evolve for DensityMatrix {
    fn evolve(&self, u: &Operator3) -> Self {
        self.map_entries(|rho| *u * *rho * u.dagger())
    }
}

/// `u·ψ` for states, `u·ρ·u†` for density matrices. `u` must be unitary to
/// within the default entrywise tolerance.
pub fn apply_unitary<T: Evolve>(target: &T, u: &Operator3) -> Result<T> {
    u.check_unitary(Tolerance::default().entrywise_abs)?;
    Ok(target.evolve(u))
}

/// Returns `Some(arg⟨a|b⟩)` when `|⟨a|b⟩| ≥ 1 − tol.phase_equivalence`.
pub fn equal_up_to_global_phase(a: &QutritState, b: &QutritState, tol: &Tolerance) -> Option<f64> {
    let overlap = a.inner(b);
    (overlap.norm() >= 1.0 - tol.phase_equivalence).then(|| overlap.arg())
}

pub fn dagger(m: &Operator3) -> Operator3 {
    m.dagger()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn identity_leaves_basis_state() {
        let s = QutritState::basis(Level::Minus);
        let out = apply_unitary(&s, &Operator3::identity()).unwrap();
        assert_eq!(out, s);
    }

    #[test]
    fn non_unitary_is_rejected_with_location() {
        let mut m = Operator3::identity();
        m.set(1, 2, c(0.5, 0.0));
        let err = apply_unitary(&QutritState::basis(Level::Zero), &m).unwrap_err();
        match err {
            Error::NonUnitary { max_deviation, .. } => assert!((max_deviation - 0.5).abs() < 1e-12),
            e => panic!("unexpected {e:?}"),
        }
    }

    #[test]
    fn unnormalized_state_rejected() {
        assert!(matches!(
            QutritState::new([c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]),
            Err(Error::NotNormalized { .. })
        ));
        let json = "[[1.0,0.0],[1.0,0.0],[0.0,0.0]]";
        assert!(serde_json::from_str::<QutritState>(json).is_err());
    }

    #[test]
    fn phase_equivalence_examples() {
        let tol = Tolerance::default();
        let zero = QutritState::basis(Level::Zero);
        let rotated = zero.with_global_phase(-2.0 * PI / 3.0);
        let phase = equal_up_to_global_phase(&zero, &rotated, &tol).unwrap();
        assert!((phase + 2.0 * PI / 3.0).abs() < 1e-12);
        assert!(equal_up_to_global_phase(&zero, &QutritState::basis(Level::Minus), &tol).is_none());
    }

    #[test]
    fn dagger_is_involution() {
        let m = Operator3::from_entries([
            [c(1.0, 2.0), c(0.0, -1.0), c(3.0, 0.5)],
            [c(0.1, 0.0), c(-2.0, 1.0), c(0.0, 0.0)],
            [c(0.0, 7.0), c(1.0, 1.0), c(0.3, -0.3)],
        ]);
        assert_eq!(dagger(&dagger(&m)), m);
        assert_eq!(dagger(&Operator3::identity()), Operator3::identity());
    }

    #[test]
    fn hermitian_eigenvalues_match_known_spectrum() {
        // Ix for spin 1 has eigenvalues 1, 0, -1.
        let s = 1.0 / 2f64.sqrt();
        let ix = Operator3::from_real([[0.0, s, 0.0], [s, 0.0, s], [0.0, s, 0.0]]);
        let e = ix.hermitian_eigenvalues();
        for (got, want) in e.iter().zip([1.0, 0.0, -1.0]) {
            assert!((got - want).abs() < 1e-12, "{e:?}");
        }
        let d = Operator3::real_diagonal([0.2, 0.7, 0.1]).hermitian_eigenvalues();
        assert_eq!(d, [0.7, 0.2, 0.1]);
    }

    #[test]
    fn density_matrix_invariants() {
        assert!(DensityMatrix::deviation_diagonal([1.0, 0.0, -1.0]).is_ok());
        assert!(DensityMatrix::deviation_diagonal([1.0, 0.0, 0.0]).is_err());
        assert!(DensityMatrix::new(Operator3::real_diagonal([1.5, 0.0, -0.5]), DensityKind::TrueState).is_err());
        let mut m = Operator3::real_diagonal([0.5, 0.5, 0.0]);
        m.set(0, 1, c(0.1, 0.0));
        assert!(DensityMatrix::new(m, DensityKind::TrueState).is_err());
        let pure = QutritState::normalized([c(1.0, 0.0), c(0.0, 1.0), c(1.0, 1.0)]).unwrap();
        let rho = DensityMatrix::from_pure(&pure);
        assert!(DensityMatrix::new(*rho.entries(), DensityKind::TrueState).is_ok());
    }

    #[test]
    fn tolerance_must_be_positive() {
        assert!(Tolerance::new(0.0, 1e-9).is_err());
        assert!(Tolerance::new(1e-10, -1.0).is_err());
        assert!(Tolerance::new(1e-10, 1e-9).is_ok());
    }

    #[test]
    fn operator_json_is_rows_of_pairs() {
        let m = Operator3::from_real([[0.0, 1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 1.0]]);
        let text = serde_json::to_string(&m).unwrap();
        assert!(text.starts_with("[[[0.0,0.0],[1.0,0.0],[0.0,0.0]]"));
        let back: Operator3 = serde_json::from_str(&text).unwrap();
        assert_eq!(back, m);
    }
}
