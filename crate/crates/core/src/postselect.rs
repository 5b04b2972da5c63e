//! One-photon-per-mode post-selection and single-qubit conditioning.

use nalgebra::{DMatrix, Vector2};
use num_complex::Complex64;

use crate::density::DensityOperator;
use crate::error::{Error, Result};
use crate::fock::{FockVector, Pol, PolMode, Spatial};
use crate::qubit::{named_state, LetterBasis, NamedState, QubitState, MAX_QUBITS};

/// Keeps the kets with exactly one photon in each listed mode and none
/// elsewhere. Returns the normalized qubit register (first mode = most
/// significant qubit, V = bit 1) and the kept squared norm.
pub fn postselect_one_per_mode(v: &FockVector, modes: &[Spatial]) -> Result<(QubitState, f64)> {
    let n = modes.len();
    if n == 0 || n > MAX_QUBITS {
        return Err(Error::QubitCount(n));
    }
    let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
    for (ket, amp) in v.iter() {
        if ket.total() as usize != n || modes.iter().any(|&m| ket.spatial_occupation(m) != 1) {
            continue;
        }
        let idx = modes.iter().fold(0usize, |idx, &m| {
            (idx << 1) | usize::from(ket.occupation(PolMode::new(m, Pol::V)) == 1)
        });
        amps[idx] += amp;
    }
    let kept: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
    if kept == 0.0 {
        return Err(Error::PostSelectionImpossible);
    }
    let state = QubitState::from_unnormalized(modes.to_vec(), amps)?;
    Ok((state, kept))
}

fn check_bra(bra: &Vector2<Complex64>) -> Result<()> {
    let norm = bra.norm_squared();
    if (norm - 1.0).abs() > 1e-12 {
        return Err(Error::NotNormalized(norm));
    }
    Ok(())
}

/// Contracts qubit `position` with `⟨bra|`. Returns the normalized remaining
/// register and the outcome probability.
pub fn project_qubit(
    s: &QubitState,
    position: usize,
    bra: &Vector2<Complex64>,
) -> Result<(QubitState, f64)> {
    let n = s.n_qubits();
    if position >= n {
        return Err(Error::Position { position, n });
    }
    if n < 2 {
        return Err(Error::QubitCount(n - 1));
    }
    check_bra(bra)?;
    let amps = s.amplitudes();
    let low = n - 1 - position;
    let out: Vec<Complex64> = (0..1usize << (n - 1))
        .map(|r| {
            let hi = (r >> low) << (low + 1);
            let lo = r & ((1 << low) - 1);
            let i0 = hi | lo;
            let i1 = i0 | (1 << low);
            bra[0].conj() * amps[i0] + bra[1].conj() * amps[i1]
        })
        .collect();
    let prob: f64 = out.iter().map(|a| a.norm_sqr()).sum();
    if prob < 1e-15 {
        return Err(Error::ZeroProbability);
    }
    let mut modes = s.modes().to_vec();
    modes.remove(position);
    Ok((QubitState::from_unnormalized(modes, out)?, prob))
}

/// Mixed-state analogue of [`project_qubit`]: `⟨b|ρ|b⟩ / p`.
pub fn project_qubit_mixed(
    rho: &DensityOperator,
    position: usize,
    bra: &Vector2<Complex64>,
) -> Result<(DensityOperator, f64)> {
    let n = rho.n_qubits();
    if position >= n {
        return Err(Error::Position { position, n });
    }
    if n < 2 {
        return Err(Error::QubitCount(n - 1));
    }
    check_bra(bra)?;
    let low = n - 1 - position;
    let dim = 1usize << (n - 1);
    // K = (⟨b| at position) as a dim × 2dim matrix
    let mut k = DMatrix::<Complex64>::zeros(dim, dim * 2);
    for r in 0..dim {
        let hi = (r >> low) << (low + 1);
        let lo = r & ((1 << low) - 1);
        let i0 = hi | lo;
        k[(r, i0)] = bra[0].conj();
        k[(r, i0 | (1 << low))] = bra[1].conj();
    }
    let m = &k * rho.matrix() * k.adjoint();
    let prob = m.trace().re;
    if prob < 1e-15 {
        return Err(Error::ZeroProbability);
    }
    let out = DensityOperator::new(m / Complex64::new(prob, 0.0))?;
    Ok((out, prob))
}

fn kron(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    a.iter()
        .flat_map(|x| b.iter().map(move |y| x * y))
        .collect()
}

fn combine(terms: &[(f64, Vec<Complex64>)]) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); terms[0].1.len()];
    for (w, v) in terms {
        for (o, x) in out.iter_mut().zip(v) {
            *o += x * *w;
        }
    }
    out
}

/// Closed form of the five-qubit state left after measuring qubit `mode` of
/// the singlet with outcome `bra`, for the four projections with a known
/// compact expression: `⟨V|` / `⟨H|` on `f` (written with H/V letters) and
/// `⟨H|` / `⟨V|` on `b` (written with D/A letters). Also returns the letter
/// basis the expression is written in.
pub fn conditional_reference(mode: Spatial, bra: char) -> Option<(QubitState, LetterBasis)> {
    use NamedState::*;
    let s2 = std::f64::consts::FRAC_1_SQRT_2;
    let s3 = 1.0 / 3f64.sqrt();
    let s6 = 1.0 / 6f64.sqrt();
    let amps = |name, basis| named_state(name, basis).amplitudes().to_vec();
    let word = |w: &str| {
        QubitState::product(w)
            .expect("literal word")
            .amplitudes()
            .to_vec()
    };
    let (basis, amps, modes) = match (mode, bra.to_ascii_uppercase()) {
        (Spatial::F, 'V') => {
            let hv = LetterBasis::Hv;
            let v = combine(&[
                (s2, word("HHHVV")),
                (-s3, kron(&amps(W3, hv), &amps(Psi2Plus, hv))),
                (s6, kron(&amps(W3Bar, hv), &word("HH"))),
            ]);
            (
                hv,
                v,
                [Spatial::A, Spatial::B, Spatial::C, Spatial::D, Spatial::E],
            )
        }
        (Spatial::F, 'H') => {
            let hv = LetterBasis::Hv;
            let v = combine(&[
                (-s2, word("VVVHH")),
                (s3, kron(&amps(W3Bar, hv), &amps(Psi2Plus, hv))),
                (-s6, kron(&amps(W3, hv), &word("VV"))),
            ]);
            (
                hv,
                v,
                [Spatial::A, Spatial::B, Spatial::C, Spatial::D, Spatial::E],
            )
        }
        (Spatial::B, b @ ('H' | 'V')) => {
            let da = LetterBasis::Da;
            let (ghz, sign) = if b == 'H' {
                (Ghz5Minus, 1.0)
            } else {
                (Ghz5Plus, -1.0)
            };
            let pair =
                |extra: &str| combine(&[(1.0, amps(Psi2Plus, da)), (sign * s2, word(extra))]);
            let v = combine(&[
                (s2, amps(ghz, da)),
                (sign * s6, kron(&pair("AA"), &amps(W3, da))),
                (-s6, kron(&pair("DD"), &amps(W3Bar, da))),
            ]);
            (
                da,
                v,
                [Spatial::A, Spatial::C, Spatial::D, Spatial::E, Spatial::F],
            )
        }
        _ => return None,
    };
    let state =
        QubitState::from_unnormalized(modes.to_vec(), amps).expect("closed form is non-null");
    Some((state, basis))
}
