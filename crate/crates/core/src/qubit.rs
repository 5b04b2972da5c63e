//! Dense polarization-qubit registers.
//!
//! Basis index convention: H is bit 0, V is bit 1, and the first listed mode
//! is the most significant bit, so `|HHHVVV⟩` is index `0b000111`.

use std::fmt;

use nalgebra::{DMatrix, Matrix2, Vector2};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::Spatial;
use crate::optics::unitarity_deviation;

pub const MAX_QUBITS: usize = 6;
const NORM_TOL: f64 = 1e-12;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Single-qubit basis ket for one of the letters H, V, D, A, L, R.
///
/// D/A = (H ± V)/√2 and L/R = (H ± iV)/√2, so D, A are the ±1 eigenvectors
/// of σx and L, R those of σy.
pub fn letter_ket(letter: char) -> Option<Vector2<Complex64>> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    Some(match letter {
        'H' => Vector2::new(c(1.0, 0.0), c(0.0, 0.0)),
        'V' => Vector2::new(c(0.0, 0.0), c(1.0, 0.0)),
        'D' => Vector2::new(c(s, 0.0), c(s, 0.0)),
        'A' => Vector2::new(c(s, 0.0), c(-s, 0.0)),
        'L' => Vector2::new(c(s, 0.0), c(0.0, s)),
        'R' => Vector2::new(c(s, 0.0), c(0.0, -s)),
        _ => return None,
    })
}

pub(crate) fn default_modes(n: usize) -> Vec<Spatial> {
    Spatial::OUTPUTS[..n].to_vec()
}

#[derive(Clone, Debug, PartialEq)]
pub struct QubitState {
    modes: Vec<Spatial>,
    amps: Vec<Complex64>,
}

impl QubitState {
    /// Requires unit norm within 1e-12.
    pub fn new(modes: Vec<Spatial>, amps: Vec<Complex64>) -> Result<Self> {
        let n = modes.len();
        if n == 0 || n > MAX_QUBITS {
            return Err(Error::QubitCount(n));
        }
        if amps.len() != 1 << n {
            return Err(Error::Dimension {
                expected: 1 << n,
                got: amps.len(),
            });
        }
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized(norm));
        }
        Ok(QubitState { modes, amps })
    }

    /// Normalizes first; the zero vector is an error.
    pub fn from_unnormalized(modes: Vec<Spatial>, mut amps: Vec<Complex64>) -> Result<Self> {
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::NullState);
        }
        amps.iter_mut().for_each(|a| *a /= norm);
        QubitState::new(modes, amps)
    }

    /// Superposition of letter-labelled product states, e.g. `[("HHV", 1.0), …]`.
    pub fn from_letters(terms: &[(&str, Complex64)]) -> Result<Self> {
        let n = terms.first().map(|(w, _)| w.len()).unwrap_or(0);
        if n == 0 || n > MAX_QUBITS {
            return Err(Error::QubitCount(n));
        }
        let mut amps = vec![c(0.0, 0.0); 1 << n];
        for (word, coeff) in terms {
            let prod = product_amps(word)?;
            if prod.len() != amps.len() {
                return Err(Error::Dimension {
                    expected: amps.len(),
                    got: prod.len(),
                });
            }
            for (a, p) in amps.iter_mut().zip(prod) {
                *a += coeff * p;
            }
        }
        QubitState::from_unnormalized(default_modes(n), amps)
    }

    pub fn product(word: &str) -> Result<Self> {
        QubitState::from_letters(&[(word, c(1.0, 0.0))])
    }

    pub fn with_modes(mut self, modes: Vec<Spatial>) -> Result<Self> {
        if modes.len() != self.modes.len() {
            return Err(Error::Dimension {
                expected: self.modes.len(),
                got: modes.len(),
            });
        }
        self.modes = modes;
        Ok(self)
    }

    pub fn n_qubits(&self) -> usize {
        self.modes.len()
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn modes(&self) -> &[Spatial] {
        &self.modes
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn position_of(&self, mode: Spatial) -> Option<usize> {
        self.modes.iter().position(|&m| m == mode)
    }

    /// `⟨self|other⟩`
    pub fn overlap(&self, other: &QubitState) -> Result<Complex64> {
        if self.dim() != other.dim() {
            return Err(Error::Dimension {
                expected: self.dim(),
                got: other.dim(),
            });
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// `self ⊗ other`; mode labels are concatenated, or reset to `a, b, …` if they clash.
    pub fn tensor(&self, other: &QubitState) -> Result<QubitState> {
        let n = self.n_qubits() + other.n_qubits();
        if n > MAX_QUBITS {
            return Err(Error::QubitCount(n));
        }
        let mut amps = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.amps {
            for b in &other.amps {
                amps.push(a * b);
            }
        }
        let mut modes: Vec<Spatial> = self.modes.iter().chain(&other.modes).copied().collect();
        let mut sorted = modes.clone();
        sorted.sort();
        sorted.dedup();
        if sorted.len() != modes.len() {
            modes = default_modes(n);
        }
        QubitState::from_unnormalized(modes, amps)
    }

    /// `U₁ ⊗ … ⊗ Uₙ |ψ⟩`; each `Uᵢ` must be unitary within 1e-12.
    pub fn local_unitary(&self, us: &[Matrix2<Complex64>]) -> Result<QubitState> {
        check_locals(us, self.n_qubits())?;
        let mut amps = self.amps.clone();
        for (q, u) in us.iter().enumerate() {
            apply_single(&mut amps, self.n_qubits(), q, u);
        }
        Ok(QubitState {
            modes: self.modes.clone(),
            amps,
        })
    }

    pub fn to_column(&self) -> DMatrix<Complex64> {
        DMatrix::from_column_slice(self.dim(), 1, &self.amps)
    }

    /// `|ψ⟩⟨ψ|`
    pub fn projector(&self) -> DMatrix<Complex64> {
        let col = self.to_column();
        &col * col.adjoint()
    }
}

impl fmt::Display for QubitState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.n_qubits();
        let mut first = true;
        for (i, a) in self.amps.iter().enumerate() {
            if a.norm() < 1e-12 {
                continue;
            }
            if !first {
                write!(f, " ")?;
            }
            first = false;
            write!(
                f,
                "({:+.6}{:+.6}i)|{}⟩",
                a.re,
                a.im,
                bit_label(i, n, ['H', 'V'])
            )?;
        }
        Ok(())
    }
}

/// Letter string for basis index `i`, most significant bit first.
pub fn bit_label(i: usize, n: usize, letters: [char; 2]) -> String {
    (0..n).map(|q| letters[(i >> (n - 1 - q)) & 1]).collect()
}

fn product_amps(word: &str) -> Result<Vec<Complex64>> {
    let mut amps = vec![c(1.0, 0.0)];
    for ch in word.chars() {
        let k = letter_ket(ch).ok_or_else(|| Error::UnknownState(word.to_string()))?;
        amps = amps.iter().flat_map(|a| [a * k[0], a * k[1]]).collect();
    }
    Ok(amps)
}

pub(crate) fn check_locals(us: &[Matrix2<Complex64>], n: usize) -> Result<()> {
    if us.len() != n {
        return Err(Error::Dimension {
            expected: n,
            got: us.len(),
        });
    }
    for u in us {
        let dev = unitarity_deviation(u);
        if dev > NORM_TOL {
            return Err(Error::NotUnitary(dev));
        }
    }
    Ok(())
}

/// In-place `U` on qubit `q` (0 = most significant).
pub(crate) fn apply_single(amps: &mut [Complex64], n: usize, q: usize, u: &Matrix2<Complex64>) {
    let stride = 1 << (n - 1 - q);
    for base in 0..amps.len() {
        if base & stride != 0 {
            continue;
        }
        let a0 = amps[base];
        let a1 = amps[base | stride];
        amps[base] = u[(0, 0)] * a0 + u[(0, 1)] * a1;
        amps[base | stride] = u[(1, 0)] * a0 + u[(1, 1)] * a1;
    }
}

/// `U^{⊗…}` as a dense matrix, first factor most significant.
pub(crate) fn kron_all(us: &[Matrix2<Complex64>]) -> DMatrix<Complex64> {
    let mut m = DMatrix::from_element(1, 1, c(1.0, 0.0));
    for u in us {
        let u = DMatrix::from_fn(2, 2, |i, j| u[(i, j)]);
        m = m.kronecker(&u);
    }
    m
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NamedState {
    Ghz6Minus,
    Ghz5Plus,
    Ghz5Minus,
    W3,
    W3Bar,
    Psi2Plus,
    Psi6Minus,
}

/// Letter basis for [`named_state`]: `Hv` writes states with H/V, `Da`
/// substitutes H→D and V→A.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LetterBasis {
    Hv,
    Da,
}

impl std::str::FromStr for NamedState {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key: String = s
            .chars()
            .filter(|c| c.is_alphanumeric() || *c == '+' || *c == '-')
            .collect();
        Ok(match key.to_ascii_lowercase().as_str() {
            "ghz6-" | "ghz6minus" => NamedState::Ghz6Minus,
            "ghz5+" | "ghz5plus" => NamedState::Ghz5Plus,
            "ghz5-" | "ghz5minus" => NamedState::Ghz5Minus,
            "w3" => NamedState::W3,
            "w3bar" => NamedState::W3Bar,
            "psi2+" | "psi2plus" => NamedState::Psi2Plus,
            "psi6-" | "psi6minus" => NamedState::Psi6Minus,
            _ => return Err(Error::UnknownState(s.to_string())),
        })
    }
}

fn relabel(word: &str, basis: LetterBasis) -> String {
    match basis {
        LetterBasis::Hv => word.to_string(),
        LetterBasis::Da => word
            .chars()
            .map(|ch| match ch {
                'H' => 'D',
                'V' => 'A',
                other => other,
            })
            .collect(),
    }
}

fn letters(terms: &[(&str, f64)], basis: LetterBasis) -> QubitState {
    let words: Vec<String> = terms.iter().map(|(w, _)| relabel(w, basis)).collect();
    let weighted: Vec<(&str, Complex64)> = words
        .iter()
        .zip(terms)
        .map(|(w, (_, a))| (w.as_str(), c(*a, 0.0)))
        .collect();
    QubitState::from_letters(&weighted).expect("named state literals are valid")
}

/// Closed-form reference states.
pub fn named_state(name: NamedState, basis: LetterBasis) -> QubitState {
    let s2 = std::f64::consts::FRAC_1_SQRT_2;
    let s3 = 1.0 / 3f64.sqrt();
    match name {
        NamedState::Ghz6Minus => letters(&[("HHHVVV", s2), ("VVVHHH", -s2)], basis),
        NamedState::Ghz5Plus => letters(&[("HHVVV", s2), ("VVHHH", s2)], basis),
        NamedState::Ghz5Minus => letters(&[("HHVVV", s2), ("VVHHH", -s2)], basis),
        NamedState::W3 => letters(&[("HHV", s3), ("HVH", s3), ("VHH", s3)], basis),
        NamedState::W3Bar => letters(&[("VVH", s3), ("VHV", s3), ("HVV", s3)], basis),
        NamedState::Psi2Plus => letters(&[("HV", s2), ("VH", s2)], basis),
        NamedState::Psi6Minus => {
            // GHZ₆⁻/√2 + (W̄₃W₃ − W₃W̄₃)/2
            let w = named_state(NamedState::W3, basis);
            let wb = named_state(NamedState::W3Bar, basis);
            let ghz = named_state(NamedState::Ghz6Minus, basis);
            let wbw = wb.tensor(&w).unwrap();
            let wwb = w.tensor(&wb).unwrap();
            let amps = (0..64)
                .map(|i| ghz.amps[i] * s2 + (wbw.amps[i] - wwb.amps[i]) * 0.5)
                .collect();
            QubitState::new(default_modes(6), amps).expect("closed form is normalized")
        }
    }
}

/// The six-qubit singlet in the H/V basis.
pub fn psi6_minus() -> QubitState {
    named_state(NamedState::Psi6Minus, LetterBasis::Hv)
}
