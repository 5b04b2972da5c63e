//! Bosonic creation-operator polynomials and sparse photon-number superpositions.
//!
//! A [`CreationPolynomial`] is a commutative polynomial in creation operators
//! `a†` over polarization modes. Applying it to the vacuum gives a
//! [`FockVector`], with each monomial `Π (a†ᵢ)^kᵢ` contributing `Π √(kᵢ!)` times
//! the normalized number state `|k₁, k₂, …⟩`.
//!
//! Mode ordering is fixed: `a0 < b0 < a < b < c < d < e < f < aux`, and
//! `H < V` within one spatial mode. Both maps are `BTreeMap`s so iteration,
//! merging and printing are deterministic.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Amplitudes below this fraction of the largest stored magnitude are dropped.
pub const PRUNE_RELATIVE: f64 = 1e-14;

/// Spatial mode label.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Spatial {
    A0,
    B0,
    A,
    B,
    C,
    D,
    E,
    F,
    /// Internal port, e.g. the unlabelled output between two cascaded splitters.
    Aux(u8),
}

impl Spatial {
    /// The six detection modes in qubit order.
    pub const OUTPUTS: [Spatial; 6] = [
        Spatial::A,
        Spatial::B,
        Spatial::C,
        Spatial::D,
        Spatial::E,
        Spatial::F,
    ];

    pub fn parse(s: &str) -> Option<Spatial> {
        Some(match s.to_ascii_lowercase().as_str() {
            "a0" => Spatial::A0,
            "b0" => Spatial::B0,
            "a" => Spatial::A,
            "b" => Spatial::B,
            "c" => Spatial::C,
            "d" => Spatial::D,
            "e" => Spatial::E,
            "f" => Spatial::F,
            other => {
                let idx = other.strip_prefix("aux")?.parse().ok()?;
                Spatial::Aux(idx)
            }
        })
    }
}

impl fmt::Display for Spatial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Spatial::A0 => write!(f, "a0"),
            Spatial::B0 => write!(f, "b0"),
            Spatial::A => write!(f, "a"),
            Spatial::B => write!(f, "b"),
            Spatial::C => write!(f, "c"),
            Spatial::D => write!(f, "d"),
            Spatial::E => write!(f, "e"),
            Spatial::F => write!(f, "f"),
            Spatial::Aux(i) => write!(f, "aux{i}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Pol {
    H,
    V,
}

impl Pol {
    pub const BOTH: [Pol; 2] = [Pol::H, Pol::V];
}

/// A spatial mode together with a polarization.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PolMode {
    pub spatial: Spatial,
    pub pol: Pol,
}

impl PolMode {
    pub const fn new(spatial: Spatial, pol: Pol) -> Self {
        PolMode { spatial, pol }
    }

    pub const fn h(spatial: Spatial) -> Self {
        PolMode::new(spatial, Pol::H)
    }

    pub const fn v(spatial: Spatial) -> Self {
        PolMode::new(spatial, Pol::V)
    }
}

impl fmt::Display for PolMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = match self.pol {
            Pol::H => 'H',
            Pol::V => 'V',
        };
        write!(f, "{}{}", p, self.spatial)
    }
}

/// Occupation numbers per mode. Zero entries are never stored.
///
/// Doubles as the exponent map of a creation monomial.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FockKet(BTreeMap<PolMode, u32>);

impl FockKet {
    pub fn vacuum() -> Self {
        FockKet(BTreeMap::new())
    }

    pub fn from_pairs<I: IntoIterator<Item = (PolMode, u32)>>(pairs: I) -> Self {
        let mut ket = FockKet::vacuum();
        for (mode, n) in pairs {
            ket.add(mode, n);
        }
        ket
    }

    pub fn occupation(&self, mode: PolMode) -> u32 {
        self.0.get(&mode).copied().unwrap_or(0)
    }

    /// Photons in a spatial mode, summed over polarization.
    pub fn spatial_occupation(&self, spatial: Spatial) -> u32 {
        Pol::BOTH
            .iter()
            .map(|&p| self.occupation(PolMode::new(spatial, p)))
            .sum()
    }

    pub fn total(&self) -> u32 {
        self.0.values().sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (PolMode, u32)> + '_ {
        self.0.iter().map(|(m, n)| (*m, *n))
    }

    fn add(&mut self, mode: PolMode, n: u32) {
        if n > 0 {
            *self.0.entry(mode).or_insert(0) += n;
        }
    }

    fn merged(&self, other: &FockKet) -> FockKet {
        let mut out = self.clone();
        for (m, n) in other.iter() {
            out.add(m, n);
        }
        out
    }

    /// `Π √(kᵢ!)`, the norm of `Π (a†ᵢ)^kᵢ |0⟩`.
    pub fn bosonic_factor(&self) -> f64 {
        self.0.values().map(|&k| factorial(k).sqrt()).product()
    }
}

impl fmt::Display for FockKet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "|0⟩");
        }
        write!(f, "|")?;
        for (i, (m, n)) in self.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{n}{m}")?;
        }
        write!(f, "⟩")
    }
}

pub(crate) fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

fn prune(terms: &mut BTreeMap<FockKet, Complex64>) {
    let max = terms.values().map(|c| c.norm()).fold(0.0, f64::max);
    let cutoff = max * PRUNE_RELATIVE;
    terms.retain(|_, c| c.norm() > cutoff);
}

/// One term of a [`CreationPolynomial`].
#[derive(Clone, Debug, PartialEq)]
pub struct CreationMonomial {
    pub powers: FockKet,
    pub coeff: Complex64,
}

/// Polynomial in commuting creation operators; like monomials are merged.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct CreationPolynomial {
    terms: BTreeMap<FockKet, Complex64>,
}

impl CreationPolynomial {
    pub fn zero() -> Self {
        CreationPolynomial::default()
    }

    /// The constant polynomial 1.
    pub fn one() -> Self {
        CreationPolynomial::monomial(FockKet::vacuum(), Complex64::new(1.0, 0.0))
    }

    pub fn creation(mode: PolMode) -> Self {
        CreationPolynomial::monomial(FockKet::from_pairs([(mode, 1)]), Complex64::new(1.0, 0.0))
    }

    pub fn monomial(powers: FockKet, coeff: Complex64) -> Self {
        let mut p = CreationPolynomial::zero();
        p.add_term(powers, coeff);
        p
    }

    /// `Σ cᵢ a†ᵢ`.
    pub fn linear<I: IntoIterator<Item = (PolMode, Complex64)>>(terms: I) -> Self {
        let mut p = CreationPolynomial::zero();
        for (mode, c) in terms {
            p.add_term(FockKet::from_pairs([(mode, 1)]), c);
        }
        p.prune();
        p
    }

    pub fn add_term(&mut self, powers: FockKet, coeff: Complex64) {
        *self.terms.entry(powers).or_insert(Complex64::new(0.0, 0.0)) += coeff;
    }

    fn prune(&mut self) {
        prune(&mut self.terms);
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, powers: &FockKet) -> Complex64 {
        self.terms
            .get(powers)
            .copied()
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    pub fn monomials(&self) -> impl Iterator<Item = CreationMonomial> + '_ {
        self.terms.iter().map(|(p, c)| CreationMonomial {
            powers: p.clone(),
            coeff: *c,
        })
    }

    pub fn add(&self, other: &CreationPolynomial) -> CreationPolynomial {
        let mut out = self.clone();
        for (p, c) in &other.terms {
            out.add_term(p.clone(), *c);
        }
        out.prune();
        out
    }

    pub fn scale(&self, s: Complex64) -> CreationPolynomial {
        let mut out = self.clone();
        out.terms.values_mut().for_each(|c| *c *= s);
        out.prune();
        out
    }

    pub fn multiply(&self, other: &CreationPolynomial) -> CreationPolynomial {
        let mut out = CreationPolynomial::zero();
        for (p1, c1) in &self.terms {
            for (p2, c2) in &other.terms {
                out.add_term(p1.merged(p2), c1 * c2);
            }
        }
        out.prune();
        out
    }

    /// `pⁿ` by the multinomial theorem: every composition `k₁+…+k_m = n`
    /// of the exponent over the `m` terms contributes
    /// `n!/(k₁!…k_m!) · Π cᵢ^kᵢ` to the monomial `Π tᵢ^kᵢ`.
    pub fn power(&self, n: u32) -> CreationPolynomial {
        assert!(n >= 1, "polynomial power needs n >= 1");
        let terms: Vec<(&FockKet, Complex64)> = self.terms.iter().map(|(p, c)| (p, *c)).collect();
        let mut out = CreationPolynomial::zero();
        let mut ks = vec![0u32; terms.len()];
        compositions(n, 0, &mut ks, &mut |ks| {
            let mut coeff = Complex64::new(factorial(n), 0.0);
            let mut powers = FockKet::vacuum();
            for ((p, c), &k) in terms.iter().zip(ks) {
                if k == 0 {
                    continue;
                }
                coeff *= c.powu(k) / factorial(k);
                for (m, e) in p.iter() {
                    powers.add(m, e * k);
                }
            }
            out.add_term(powers, coeff);
        });
        out.prune();
        out
    }

    /// Substitute every creation operator by a polynomial (linear, for optics).
    pub fn substitute<F>(&self, mut image: F) -> CreationPolynomial
    where
        F: FnMut(PolMode) -> CreationPolynomial,
    {
        let mut out = CreationPolynomial::zero();
        for (powers, c) in &self.terms {
            let mut prod = CreationPolynomial::one().scale(*c);
            for (mode, k) in powers.iter() {
                prod = prod.multiply(&image(mode).power(k));
            }
            out = out.add(&prod);
        }
        out
    }

    /// Act on the vacuum: `Π (a†ᵢ)^kᵢ |0⟩ = Π √(kᵢ!) |k⟩`. Not normalized.
    pub fn apply_to_vacuum(&self) -> FockVector {
        let mut terms = BTreeMap::new();
        for (powers, c) in &self.terms {
            terms.insert(powers.clone(), c * powers.bosonic_factor());
        }
        let mut v = FockVector { terms };
        v.prune();
        v
    }
}

fn compositions(remaining: u32, idx: usize, ks: &mut [u32], visit: &mut impl FnMut(&[u32])) {
    if ks.is_empty() {
        return;
    }
    if idx == ks.len() - 1 {
        ks[idx] = remaining;
        visit(ks);
        return;
    }
    for k in 0..=remaining {
        ks[idx] = k;
        compositions(remaining - k, idx + 1, ks, visit);
    }
}

/// Sparse superposition of number states.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct FockVector {
    terms: BTreeMap<FockKet, Complex64>,
}

impl FockVector {
    pub fn zero() -> Self {
        FockVector::default()
    }

    pub fn vacuum() -> Self {
        FockVector::ket(FockKet::vacuum())
    }

    pub fn ket(ket: FockKet) -> Self {
        FockVector::from_terms([(ket, Complex64::new(1.0, 0.0))])
    }

    pub fn from_terms<I: IntoIterator<Item = (FockKet, Complex64)>>(terms: I) -> Self {
        let mut map = BTreeMap::new();
        for (k, c) in terms {
            *map.entry(k).or_insert(Complex64::new(0.0, 0.0)) += c;
        }
        let mut v = FockVector { terms: map };
        v.prune();
        v
    }

    fn prune(&mut self) {
        prune(&mut self.terms);
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn amplitude(&self, ket: &FockKet) -> Complex64 {
        self.terms
            .get(ket)
            .copied()
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&FockKet, Complex64)> + '_ {
        self.terms.iter().map(|(k, c)| (k, *c))
    }

    pub fn norm_sqr(&self) -> f64 {
        self.terms.values().map(|c| c.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// `⟨self|other⟩`, conjugate-linear in `self`.
    pub fn inner(&self, other: &FockVector) -> Complex64 {
        let (small, large, conj_small) = if self.len() <= other.len() {
            (self, other, true)
        } else {
            (other, self, false)
        };
        small
            .terms
            .iter()
            .filter_map(|(k, a)| {
                large.terms.get(k).map(|b| {
                    if conj_small {
                        a.conj() * b
                    } else {
                        b.conj() * a
                    }
                })
            })
            .sum()
    }

    /// Unit-norm copy together with the original norm.
    pub fn normalize(&self) -> Result<(FockVector, f64)> {
        let norm = self.norm();
        if norm == 0.0 {
            return Err(Error::NullState);
        }
        Ok((self.scale(Complex64::new(1.0 / norm, 0.0)), norm))
    }

    pub fn scale(&self, s: Complex64) -> FockVector {
        let mut out = self.clone();
        out.terms.values_mut().for_each(|c| *c *= s);
        out.prune();
        out
    }

    pub fn add(&self, other: &FockVector) -> FockVector {
        FockVector::from_terms(
            self.iter()
                .map(|(k, c)| (k.clone(), c))
                .chain(other.iter().map(|(k, c)| (k.clone(), c))),
        )
    }

    /// Single creation operator: `a†|n⟩ = √(n+1) |n+1⟩`.
    pub fn create(&self, mode: PolMode) -> FockVector {
        FockVector::from_terms(self.iter().map(|(k, c)| {
            let n = k.occupation(mode);
            let mut raised = k.clone();
            raised.add(mode, 1);
            (raised, c * f64::from(n + 1).sqrt())
        }))
    }

    /// Keep only the terms accepted by `keep`.
    pub fn filter<F: Fn(&FockKet) -> bool>(&self, keep: F) -> FockVector {
        FockVector {
            terms: self
                .terms
                .iter()
                .filter(|(k, _)| keep(k))
                .map(|(k, c)| (k.clone(), *c))
                .collect(),
        }
    }
}

impl fmt::Display for FockVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (k, c)) in self.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({:.6}{:+.6}i){}", c.re, c.im, k)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    const A0H: PolMode = PolMode::h(Spatial::A0);
    const A0V: PolMode = PolMode::v(Spatial::A0);
    const B0H: PolMode = PolMode::h(Spatial::B0);
    const B0V: PolMode = PolMode::v(Spatial::B0);

    fn emission(phi: f64) -> CreationPolynomial {
        let pair1 =
            CreationPolynomial::monomial(FockKet::from_pairs([(A0H, 1), (B0V, 1)]), c(1.0, 0.0));
        let pair2 = CreationPolynomial::monomial(
            FockKet::from_pairs([(A0V, 1), (B0H, 1)]),
            Complex64::from_polar(1.0, phi),
        );
        pair1.add(&pair2)
    }

    #[test]
    fn mode_ordering_is_canonical() {
        let order = [
            Spatial::A0,
            Spatial::B0,
            Spatial::A,
            Spatial::B,
            Spatial::C,
            Spatial::D,
            Spatial::E,
            Spatial::F,
            Spatial::Aux(0),
        ];
        assert!(order.windows(2).all(|w| w[0] < w[1]));
        assert!(PolMode::h(Spatial::A) < PolMode::v(Spatial::A));
        assert!(PolMode::v(Spatial::A) < PolMode::h(Spatial::B));
        assert_eq!(Spatial::parse("aux3"), Some(Spatial::Aux(3)));
        assert_eq!(Spatial::parse("B0"), Some(Spatial::B0));
        assert_eq!(Spatial::parse("g"), None);
    }

    #[test]
    fn power_one_is_identity() {
        let p = CreationPolynomial::linear([(A0H, c(1.0, 0.0)), (A0V, c(1.0, 0.0))]);
        assert_eq!(p.power(1), p);
    }

    #[test]
    fn binomial_square() {
        let p = CreationPolynomial::linear([(A0H, c(1.0, 0.0)), (A0V, c(1.0, 0.0))]);
        let sq = p.power(2);
        assert_eq!(sq.len(), 3);
        assert_eq!(sq.coeff(&FockKet::from_pairs([(A0H, 2)])), c(1.0, 0.0));
        assert_eq!(
            sq.coeff(&FockKet::from_pairs([(A0H, 1), (A0V, 1)])),
            c(2.0, 0.0)
        );
        assert_eq!(sq.coeff(&FockKet::from_pairs([(A0V, 2)])), c(1.0, 0.0));
    }

    #[test]
    fn third_order_emission_coefficients() {
        let phi = 0.7;
        let cube = emission(phi).power(3);
        assert_eq!(cube.len(), 4);
        let expected = [
            (FockKet::from_pairs([(A0H, 3), (B0V, 3)]), 1.0, 0.0),
            (
                FockKet::from_pairs([(A0H, 2), (A0V, 1), (B0H, 1), (B0V, 2)]),
                3.0,
                phi,
            ),
            (
                FockKet::from_pairs([(A0H, 1), (A0V, 2), (B0H, 2), (B0V, 1)]),
                3.0,
                2.0 * phi,
            ),
            (FockKet::from_pairs([(A0V, 3), (B0H, 3)]), 1.0, 3.0 * phi),
        ];
        for (k, mag, arg) in expected {
            let got = cube.coeff(&k);
            assert!(
                (got - Complex64::from_polar(mag, arg)).norm() < 1e-12,
                "{k}: {got}"
            );
        }
    }

    #[test]
    fn vacuum_application_factors() {
        let p = CreationPolynomial::monomial(FockKet::from_pairs([(A0H, 3)]), c(1.0, 0.0));
        let v = p.apply_to_vacuum();
        assert!(
            (v.amplitude(&FockKet::from_pairs([(A0H, 3)])) - c(6f64.sqrt(), 0.0)).norm() < 1e-14
        );
        assert!(CreationPolynomial::zero().apply_to_vacuum().is_empty());
    }

    #[test]
    fn emission_at_pi_has_equal_magnitudes_alternating_signs() {
        let v = emission(PI).power(3).apply_to_vacuum();
        assert_eq!(v.len(), 4);
        let by_ket = [
            (FockKet::from_pairs([(A0H, 3), (B0V, 3)]), 6.0),
            (
                FockKet::from_pairs([(A0H, 2), (A0V, 1), (B0H, 1), (B0V, 2)]),
                -6.0,
            ),
            (
                FockKet::from_pairs([(A0H, 1), (A0V, 2), (B0H, 2), (B0V, 1)]),
                6.0,
            ),
            (FockKet::from_pairs([(A0V, 3), (B0H, 3)]), -6.0),
        ];
        for (k, want) in by_ket {
            assert!((v.amplitude(&k) - c(want, 0.0)).norm() < 1e-12);
        }
        let (unit, norm) = v.normalize().unwrap();
        assert!((norm - 12.0).abs() < 1e-12);
        assert!(unit.iter().all(|(_, a)| (a.norm() - 0.5).abs() < 1e-12));
    }

    #[test]
    fn inner_products_of_basis_and_emission_states() {
        let h3 = FockVector::ket(FockKet::from_pairs([(A0H, 3)]));
        let v3 = FockVector::ket(FockKet::from_pairs([(A0V, 3)]));
        assert_eq!(h3.inner(&h3), c(1.0, 0.0));
        assert_eq!(h3.inner(&v3), c(0.0, 0.0));

        let (pi, _) = emission(PI).power(3).apply_to_vacuum().normalize().unwrap();
        let (zero, _) = emission(0.0)
            .power(3)
            .apply_to_vacuum()
            .normalize()
            .unwrap();
        assert!(pi.inner(&zero).norm() < 1e-12);
    }

    #[test]
    fn normalize_scaled_ket_and_null() {
        let k = FockKet::from_pairs([(A0H, 3)]);
        let (unit, norm) = FockVector::ket(k.clone())
            .scale(c(2.0, 0.0))
            .normalize()
            .unwrap();
        assert!((norm - 2.0).abs() < 1e-15);
        assert!((unit.amplitude(&k) - c(1.0, 0.0)).norm() < 1e-15);
        assert_eq!(FockVector::zero().normalize(), Err(Error::NullState));
    }

    #[test]
    fn pruning_drops_relative_dust() {
        let k1 = FockKet::from_pairs([(A0H, 1)]);
        let k2 = FockKet::from_pairs([(A0V, 1)]);
        let v = FockVector::from_terms([(k1, c(1.0, 0.0)), (k2, c(1e-16, 0.0))]);
        assert_eq!(v.len(), 1);
    }

    #[test]
    fn create_raises_with_sqrt_factor() {
        let v = FockVector::vacuum().create(A0H).create(A0H);
        let k = FockKet::from_pairs([(A0H, 2)]);
        assert!((v.amplitude(&k) - c(2f64.sqrt(), 0.0)).norm() < 1e-15);
        assert_eq!(k.total(), 2);
        assert_eq!(k.spatial_occupation(Spatial::A0), 2);
    }
}
