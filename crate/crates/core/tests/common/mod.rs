//! Reference computations shared by the integration suites.

#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use singlet_core::{CreationPolynomial, FockVector, PolMode};

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn random_hermitian(rng: &mut ChaCha8Rng, dim: usize) -> DMatrix<Complex64> {
    let mut m = DMatrix::zeros(dim, dim);
    for i in 0..dim {
        m[(i, i)] = c(rng.random_range(-1.0..1.0), 0.0);
        for j in i + 1..dim {
            let z = c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            m[(i, j)] = z;
            m[(j, i)] = z.conj();
        }
    }
    m
}

/// λ_max by repeated squaring of the shifted, positive-definite matrix
/// followed by a Rayleigh quotient on the dominant column.
pub fn power_iteration_max(h: &DMatrix<Complex64>) -> f64 {
    let dim = h.nrows();
    let shift = h.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let mut m = h + DMatrix::identity(dim, dim) * c(shift, 0.0);
    for _ in 0..40 {
        m = &m * &m;
        let scale = m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        m /= c(scale, 0.0);
    }
    let col = (0..dim)
        .max_by(|&a, &b| m.column(a).norm().total_cmp(&m.column(b).norm()))
        .unwrap();
    let mut v = m.column(col).into_owned();
    // a few plain iterations polish the vector
    for _ in 0..20 {
        v = h * &v + &v * c(shift, 0.0);
        let n = v.norm();
        v /= c(n, 0.0);
    }
    (v.adjoint() * h * &v)[(0, 0)].re
}

pub fn sample_linear(rng: &mut ChaCha8Rng, modes: &[PolMode]) -> CreationPolynomial {
    CreationPolynomial::linear(
        modes
            .iter()
            .map(|m| {
                (
                    *m,
                    c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)),
                )
            })
            .collect::<Vec<_>>(),
    )
}

/// `Π_k (Σ_m c_m a†_m)` applied one creation operator at a time with √(n+1).
pub fn sequential(factors: &[CreationPolynomial]) -> FockVector {
    let mut v = FockVector::vacuum();
    for f in factors {
        let mut next = FockVector::zero();
        for mono in f.monomials() {
            let mut term = v.scale(mono.coeff);
            for (mode, power) in mono.powers.iter() {
                for _ in 0..power {
                    term = term.create(mode);
                }
            }
            next = next.add(&term);
        }
        v = next;
    }
    v
}

pub fn max_diff(a: &FockVector, b: &FockVector) -> f64 {
    let d = a.add(&b.scale(c(-1.0, 0.0)));
    d.iter().map(|(_, z)| z.norm()).fold(0.0, f64::max)
}
