//! Pauli words, real-weighted Pauli sums and Pauli decomposition.
//!
//! X = [[0,1],[1,0]], Y = [[0,−i],[i,0]], Z = [[1,0],[0,−1]]. A word acts on
//! basis index `k` as `P|k⟩ = phase(k) |k ⊕ flip⟩`, which keeps traces and
//! expectations O(2ⁿ) per word.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::density::DensityOperator;
use crate::error::{Error, Result};
use crate::qubit::{QubitState, MAX_QUBITS};

const HERMITIAN_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    pub fn letter(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    pub fn from_letter(ch: char) -> Option<Pauli> {
        match ch.to_ascii_uppercase() {
            'I' | '1' => Some(Pauli::I),
            'X' => Some(Pauli::X),
            'Y' => Some(Pauli::Y),
            'Z' => Some(Pauli::Z),
            _ => None,
        }
    }
}

/// Tensor word over {I, X, Y, Z}, first letter acting on the most significant qubit.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PauliWord(Vec<Pauli>);

impl PauliWord {
    pub fn new(letters: Vec<Pauli>) -> Self {
        PauliWord(letters)
    }

    pub fn identity(n: usize) -> Self {
        PauliWord(vec![Pauli::I; n])
    }

    pub fn uniform(p: Pauli, n: usize) -> Self {
        PauliWord(vec![p; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[Pauli] {
        &self.0
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().all(|&p| p == Pauli::I)
    }

    /// Number of non-identity letters.
    pub fn weight(&self) -> usize {
        self.0.iter().filter(|&&p| p != Pauli::I).count()
    }

    /// The single non-identity letter type, if the word uses at most one.
    /// `Some(Pauli::I)` for the identity word, `None` for mixed words.
    pub fn letter_type(&self) -> Option<Pauli> {
        let mut kind = Pauli::I;
        for &p in &self.0 {
            if p == Pauli::I {
                continue;
            }
            if kind != Pauli::I && kind != p {
                return None;
            }
            kind = p;
        }
        Some(kind)
    }

    pub fn is_mixed(&self) -> bool {
        self.letter_type().is_none()
    }

    /// Bit mask of positions carrying a non-identity letter.
    pub fn support_mask(&self) -> usize {
        let n = self.len();
        self.0
            .iter()
            .enumerate()
            .filter(|(_, &p)| p != Pauli::I)
            .fold(0, |m, (q, _)| m | 1 << (n - 1 - q))
    }

    fn flip_mask(&self) -> usize {
        let n = self.len();
        self.0
            .iter()
            .enumerate()
            .filter(|(_, &p)| p == Pauli::X || p == Pauli::Y)
            .fold(0, |m, (q, _)| m | 1 << (n - 1 - q))
    }

    /// Phase of `P|k⟩`.
    fn phase(&self, k: usize) -> Complex64 {
        let n = self.len();
        let mut ph = Complex64::new(1.0, 0.0);
        for (q, &p) in self.0.iter().enumerate() {
            let bit = (k >> (n - 1 - q)) & 1;
            match (p, bit) {
                (Pauli::Y, 0) => ph *= Complex64::i(),
                (Pauli::Y, _) => ph *= -Complex64::i(),
                (Pauli::Z, 1) => ph = -ph,
                _ => {}
            }
        }
        ph
    }

    /// `tr(P · M)` for a square matrix of matching dimension.
    pub fn trace_with(&self, m: &DMatrix<Complex64>) -> Complex64 {
        let flip = self.flip_mask();
        (0..m.nrows())
            .map(|k| self.phase(k) * m[(k, k ^ flip)])
            .sum()
    }

    pub fn to_matrix(&self) -> DMatrix<Complex64> {
        let dim = 1 << self.len();
        let flip = self.flip_mask();
        let mut m = DMatrix::zeros(dim, dim);
        for k in 0..dim {
            m[(k ^ flip, k)] = self.phase(k);
        }
        m
    }

    /// `⟨ψ|P|ψ⟩`
    pub fn expectation_pure(&self, amps: &[Complex64]) -> Complex64 {
        let flip = self.flip_mask();
        (0..amps.len())
            .map(|k| amps[k ^ flip].conj() * self.phase(k) * amps[k])
            .sum()
    }

    /// All 4ⁿ words in lexicographic I < X < Y < Z order.
    pub fn all(n: usize) -> impl Iterator<Item = PauliWord> {
        (0..1usize << (2 * n)).map(move |mut code| {
            let mut letters = vec![Pauli::I; n];
            for q in (0..n).rev() {
                letters[q] = Pauli::ALL[code & 3];
                code >>= 2;
            }
            PauliWord(letters)
        })
    }
}

impl FromStr for PauliWord {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let letters: Option<Vec<Pauli>> = s.trim().chars().map(Pauli::from_letter).collect();
        match letters {
            Some(l) if !l.is_empty() && l.len() <= MAX_QUBITS => Ok(PauliWord(l)),
            _ => Err(Error::PauliWord(s.to_string())),
        }
    }
}

impl fmt::Display for PauliWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in &self.0 {
            write!(f, "{}", p.letter())?;
        }
        Ok(())
    }
}

/// Real-weighted Pauli word.
#[derive(Clone, Debug, PartialEq)]
pub struct PauliString {
    pub word: PauliWord,
    pub coeff: f64,
}

impl PauliString {
    pub fn new(word: PauliWord, coeff: f64) -> Self {
        PauliString { word, coeff }
    }

    pub fn parse(word: &str, coeff: f64) -> Result<Self> {
        Ok(PauliString::new(word.parse()?, coeff))
    }
}

/// Expectation value of a weighted Pauli word on a pure state.
pub fn pauli_expectation(state: &QubitState, p: &PauliString) -> Result<f64> {
    if p.word.len() != state.n_qubits() {
        return Err(Error::Dimension {
            expected: state.n_qubits(),
            got: p.word.len(),
        });
    }
    Ok(p.coeff * p.word.expectation_pure(state.amplitudes()).re)
}

/// Expectation value of a weighted Pauli word on a density operator.
pub fn pauli_expectation_mixed(rho: &DensityOperator, p: &PauliString) -> Result<f64> {
    if p.word.len() != rho.n_qubits() {
        return Err(Error::Dimension {
            expected: rho.n_qubits(),
            got: p.word.len(),
        });
    }
    Ok(p.coeff * p.word.trace_with(rho.matrix()).re)
}

/// Hermitian operator as `Σ cᵢ Pᵢ` with unique words.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct PauliSum {
    terms: BTreeMap<PauliWord, f64>,
    n: usize,
}

impl PauliSum {
    pub fn new(n: usize) -> Self {
        PauliSum {
            terms: BTreeMap::new(),
            n,
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    /// Adds to an existing coefficient; words must have the sum's length.
    pub fn add(&mut self, word: PauliWord, coeff: f64) {
        assert_eq!(word.len(), self.n, "word length mismatch");
        *self.terms.entry(word).or_insert(0.0) += coeff;
    }

    pub fn coeff(&self, word: &PauliWord) -> f64 {
        self.terms.get(word).copied().unwrap_or(0.0)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = PauliString> + '_ {
        self.terms
            .iter()
            .map(|(w, c)| PauliString::new(w.clone(), *c))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&PauliWord, f64)> + '_ {
        self.terms.iter().map(|(w, c)| (w, *c))
    }

    pub fn identity_coeff(&self) -> f64 {
        self.coeff(&PauliWord::identity(self.n))
    }

    /// Keep the terms accepted by `keep`.
    pub fn filtered<F: Fn(&PauliWord, f64) -> bool>(&self, keep: F) -> PauliSum {
        PauliSum {
            terms: self
                .terms
                .iter()
                .filter(|(w, c)| keep(w, **c))
                .map(|(w, c)| (w.clone(), *c))
                .collect(),
            n: self.n,
        }
    }

    pub fn to_matrix(&self) -> DMatrix<Complex64> {
        let dim = 1 << self.n;
        let mut m = DMatrix::zeros(dim, dim);
        for (w, c) in &self.terms {
            let flip = w.flip_mask();
            for k in 0..dim {
                m[(k ^ flip, k)] += w.phase(k) * *c;
            }
        }
        m
    }

    pub fn expectation(&self, state: &QubitState) -> Result<f64> {
        self.terms().map(|p| pauli_expectation(state, &p)).sum()
    }

    pub fn expectation_mixed(&self, rho: &DensityOperator) -> Result<f64> {
        self.terms().map(|p| pauli_expectation_mixed(rho, &p)).sum()
    }

    /// `tr(·)/2ⁿ`, i.e. the identity coefficient.
    pub fn normalized_trace(&self) -> f64 {
        self.identity_coeff()
    }
}

/// `H = Σ_w tr(P_w H)/2ⁿ · P_w`. Coefficients below 1e-14 are dropped.
pub fn pauli_decompose(h: &DMatrix<Complex64>) -> Result<PauliSum> {
    let dim = h.nrows();
    if dim != h.ncols() || !dim.is_power_of_two() || dim < 2 {
        return Err(Error::Dimension {
            expected: dim.next_power_of_two().max(2),
            got: h.ncols(),
        });
    }
    let dev = hermitian_deviation(h);
    if dev > HERMITIAN_TOL {
        return Err(Error::NotHermitian(dev));
    }
    let n = dim.trailing_zeros() as usize;
    if n > MAX_QUBITS {
        return Err(Error::QubitCount(n));
    }
    let mut sum = PauliSum::new(n);
    for w in PauliWord::all(n) {
        let c = w.trace_with(h).re / dim as f64;
        if c.abs() > 1e-14 {
            sum.add(w, c);
        }
    }
    Ok(sum)
}

pub fn hermitian_deviation(h: &DMatrix<Complex64>) -> f64 {
    (h - h.adjoint())
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max)
}
