//! Type-II down-conversion emission into two spatial modes.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::{CreationPolynomial, FockKet, FockVector, PolMode, Spatial};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PdcSpec {
    /// Number of emitted pairs, 1 to 3.
    pub order: u32,
    /// Birefringent phase between the two pair terms.
    pub phi: f64,
    pub arm_modes: (Spatial, Spatial),
}

impl PdcSpec {
    pub fn new(order: u32, phi: f64) -> Self {
        PdcSpec {
            order,
            phi,
            arm_modes: (Spatial::A0, Spatial::B0),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(1..=3).contains(&self.order) {
            return Err(Error::UnsupportedOrder(self.order));
        }
        if !self.phi.is_finite() {
            return Err(Error::NonFinitePhase(self.phi));
        }
        Ok(())
    }

    /// `a†_H b†_V + e^{iφ} a†_V b†_H`
    pub fn pair_operator(&self) -> CreationPolynomial {
        let (a, b) = self.arm_modes;
        let hv = FockKet::from_pairs([(PolMode::h(a), 1), (PolMode::v(b), 1)]);
        let vh = FockKet::from_pairs([(PolMode::v(a), 1), (PolMode::h(b), 1)]);
        CreationPolynomial::monomial(hv, Complex64::new(1.0, 0.0)).add(
            &CreationPolynomial::monomial(vh, Complex64::from_polar(1.0, self.phi)),
        )
    }
}

/// Normalized `order`-pair emission state. Term `k` (k photons V-polarized in
/// the first arm) carries amplitude `e^{ikφ}/√(order+1)`.
pub fn pdc_state(spec: &PdcSpec) -> Result<FockVector> {
    spec.validate()?;
    let unnormalized = spec.pair_operator().power(spec.order).apply_to_vacuum();
    let (state, _) = unnormalized.normalize()?;
    Ok(state)
}
