//! Passive linear optics as substitution rules on creation operators.

use std::collections::{BTreeMap, BTreeSet};

use nalgebra::Matrix2;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::{CreationPolynomial, FockVector, Pol, PolMode, Spatial};

const ISOMETRY_TOL: f64 = 1e-12;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Linear substitution `a†ᵢ ↦ Σⱼ Mⱼᵢ a†ⱼ`. Modes without a rule map to themselves.
#[derive(Clone, Debug, PartialEq)]
pub struct ModeMap {
    rules: BTreeMap<PolMode, Vec<(PolMode, Complex64)>>,
}

impl ModeMap {
    pub fn identity() -> Self {
        ModeMap {
            rules: BTreeMap::new(),
        }
    }

    /// Builds a map and checks that the images of the mapped modes are orthonormal.
    pub fn new(rules: BTreeMap<PolMode, Vec<(PolMode, Complex64)>>) -> Result<Self> {
        let rules = rules
            .into_iter()
            .map(|(input, image)| {
                let mut merged: BTreeMap<PolMode, Complex64> = BTreeMap::new();
                for (m, a) in image {
                    *merged.entry(m).or_insert(c(0.0, 0.0)) += a;
                }
                (
                    input,
                    merged.into_iter().filter(|(_, a)| a.norm() > 0.0).collect(),
                )
            })
            .collect();
        let map = ModeMap { rules };
        let dev = map.isometry_deviation();
        if dev > ISOMETRY_TOL {
            return Err(Error::NotIsometric(dev));
        }
        Ok(map)
    }

    pub fn image(&self, mode: PolMode) -> Vec<(PolMode, Complex64)> {
        self.rules
            .get(&mode)
            .cloned()
            .unwrap_or_else(|| vec![(mode, c(1.0, 0.0))])
    }

    pub fn domain(&self) -> impl Iterator<Item = PolMode> + '_ {
        self.rules.keys().copied()
    }

    fn outputs(&self) -> BTreeSet<PolMode> {
        self.rules.values().flatten().map(|(m, _)| *m).collect()
    }

    /// Largest entry of `M†M − 1` over the mapped columns.
    pub fn isometry_deviation(&self) -> f64 {
        let cols: Vec<BTreeMap<PolMode, Complex64>> = self
            .rules
            .values()
            .map(|img| img.iter().copied().collect())
            .collect();
        let mut worst: f64 = 0.0;
        for (i, ci) in cols.iter().enumerate() {
            for (j, cj) in cols.iter().enumerate().skip(i) {
                let dot: Complex64 = ci
                    .iter()
                    .filter_map(|(m, a)| cj.get(m).map(|b| a.conj() * b))
                    .sum();
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((dot - target).norm());
            }
        }
        worst
    }

    /// `self ∘ first`: apply `first`, then `self`.
    ///
    /// The domain is `first`'s domain plus those of `self`'s inputs that
    /// `first` neither maps nor feeds; ports fed by `first` count as consumed.
    pub fn compose(&self, first: &ModeMap) -> Result<ModeMap> {
        let mut rules = BTreeMap::new();
        for (input, image) in &first.rules {
            let mut out = Vec::new();
            for (mid, a) in image {
                for (end, b) in self.image(*mid) {
                    out.push((end, a * b));
                }
            }
            rules.insert(*input, out);
        }
        let fed = first.outputs();
        for (input, image) in &self.rules {
            if !first.rules.contains_key(input) && !fed.contains(input) {
                rules.insert(*input, image.clone());
            }
        }
        ModeMap::new(rules)
    }

    /// Substitute every creation operator and re-expand.
    pub fn apply(&self, v: &FockVector) -> FockVector {
        let images: BTreeMap<PolMode, CreationPolynomial> = self
            .rules
            .keys()
            .map(|m| (*m, CreationPolynomial::linear(self.image(*m))))
            .collect();
        let mut out = FockVector::zero();
        for (ket, amp) in v.iter() {
            // |n⟩ = Π (a†)^n / √(n!) |0⟩
            let poly = CreationPolynomial::monomial(ket.clone(), amp / ket.bosonic_factor());
            let substituted = poly.substitute(|m| {
                images
                    .get(&m)
                    .cloned()
                    .unwrap_or_else(|| CreationPolynomial::creation(m))
            });
            out = out.add(&substituted.apply_to_vacuum());
        }
        out
    }

    /// Polarization element acting inside one spatial mode.
    pub fn from_jones(spatial: Spatial, jones: &JonesMatrix) -> Result<ModeMap> {
        let m = jones.matrix();
        let h = PolMode::h(spatial);
        let v = PolMode::v(spatial);
        let mut rules = BTreeMap::new();
        rules.insert(h, vec![(h, m[(0, 0)]), (v, m[(1, 0)])]);
        rules.insert(v, vec![(h, m[(0, 1)]), (v, m[(1, 1)])]);
        ModeMap::new(rules)
    }
}

/// `in ↦ t·out1 + r·out2`, identically for H and V.
pub fn beamsplitter(
    input: Spatial,
    out1: Spatial,
    out2: Spatial,
    t: Complex64,
    r: Complex64,
) -> Result<ModeMap> {
    let norm = t.norm_sqr() + r.norm_sqr();
    if (norm - 1.0).abs() > ISOMETRY_TOL {
        return Err(Error::NotNormalized(norm));
    }
    polarization_preserving(input, &[(out1, t), (out2, r)])
}

/// Result of [`three_way_split`].
#[derive(Clone, Debug, PartialEq)]
pub struct Split {
    pub map: ModeMap,
    /// Some output receives no amplitude, so one-photon-per-mode events are impossible.
    pub degenerate: bool,
}

pub fn three_way_split(input: Spatial, outs: [Spatial; 3], amps: [Complex64; 3]) -> Result<Split> {
    let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
    if (norm - 1.0).abs() > ISOMETRY_TOL {
        return Err(Error::NotNormalized(norm));
    }
    let degenerate = amps.iter().any(|a| a.norm() == 0.0);
    if degenerate {
        log::warn!(
            "three-way split of {input} has a zero output amplitude; degenerate for post-selection"
        );
    }
    let pairs: Vec<(Spatial, Complex64)> = outs.into_iter().zip(amps).collect();
    Ok(Split {
        map: polarization_preserving(input, &pairs)?,
        degenerate,
    })
}

fn polarization_preserving(input: Spatial, outs: &[(Spatial, Complex64)]) -> Result<ModeMap> {
    let mut rules = BTreeMap::new();
    for pol in Pol::BOTH {
        let image = outs
            .iter()
            .map(|(s, a)| (PolMode::new(*s, pol), *a))
            .collect();
        rules.insert(PolMode::new(input, pol), image);
    }
    ModeMap::new(rules)
}

/// 2×2 unitary on (H, V) amplitudes.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct JonesMatrix(Matrix2<Complex64>);

impl JonesMatrix {
    pub fn new(m: Matrix2<Complex64>) -> Result<Self> {
        let dev = unitarity_deviation(&m);
        if dev > ISOMETRY_TOL {
            return Err(Error::NotUnitary(dev));
        }
        Ok(JonesMatrix(m))
    }

    pub fn identity() -> Self {
        JonesMatrix(Matrix2::identity())
    }

    pub fn matrix(&self) -> Matrix2<Complex64> {
        self.0
    }

    pub fn adjoint(&self) -> JonesMatrix {
        JonesMatrix(self.0.adjoint())
    }

    /// `self · other`
    pub fn then_after(&self, other: &JonesMatrix) -> JonesMatrix {
        JonesMatrix(self.0 * other.0)
    }
}

pub(crate) fn unitarity_deviation(m: &Matrix2<Complex64>) -> f64 {
    (m.adjoint() * m - Matrix2::identity())
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WaveplateKind {
    Half,
    Quarter,
}

/// Retarder `R(θ) · diag(1, e^{iδ}) · R(−θ)` with δ = π (half) or π/2 (quarter).
pub fn waveplate(kind: WaveplateKind, theta: f64) -> JonesMatrix {
    let phase = match kind {
        WaveplateKind::Half => c(-1.0, 0.0),
        WaveplateKind::Quarter => c(0.0, 1.0),
    };
    let (s, co) = theta.sin_cos();
    let rot = Matrix2::new(c(co, 0.0), c(-s, 0.0), c(s, 0.0), c(co, 0.0));
    let retard = Matrix2::new(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), phase);
    let m = rot * retard * rot.transpose();
    JonesMatrix(m)
}
