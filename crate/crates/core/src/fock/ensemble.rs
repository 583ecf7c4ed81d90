use super::moments::MomentReport;
use super::single::SingleModeState;
use super::two_mode::TwoModeState;
use crate::error::{Error, Result};
use crate::tolerance::NORMALIZATION;

/// One term `p_k rho_k^A (x) rho_k^B` of a separable decomposition, with
/// both local states pure. Mixed local states are expressed by splitting
/// into more components.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductComponent {
    pub weight: f64,
    pub state_a: SingleModeState,
    pub state_b: SingleModeState,
}

impl ProductComponent {
    pub fn new(weight: f64, state_a: SingleModeState, state_b: SingleModeState) -> Result<Self> {
        if !(weight >= 0.0) || !weight.is_finite() {
            return Err(Error::domain("weight", weight, "[0, 1]"));
        }
        Ok(Self {
            weight,
            state_a,
            state_b,
        })
    }

    pub fn moments(&self) -> MomentReport {
        MomentReport::product(&self.state_a.moments(), &self.state_b.moments())
    }

    /// The component as a dense two-mode vector.
    pub fn to_two_mode(&self) -> TwoModeState {
        TwoModeState::product(&self.state_a, &self.state_b)
    }
}

/// Convex mixture of product states.
#[derive(Debug, Clone, PartialEq)]
pub struct SeparableEnsemble {
    components: Vec<ProductComponent>,
}

impl SeparableEnsemble {
    pub fn new(components: Vec<ProductComponent>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::Validation("ensemble has no components".into()));
        }
        let total: f64 = components.iter().map(|c| c.weight).sum();
        if (total - 1.0).abs() > NORMALIZATION {
            return Err(Error::Validation(format!(
                "ensemble weights sum to {total}, expected 1"
            )));
        }
        Ok(Self { components })
    }

    /// Single product state with weight one.
    pub fn pure_product(a: SingleModeState, b: SingleModeState) -> Self {
        Self {
            components: vec![ProductComponent {
                weight: 1.0,
                state_a: a,
                state_b: b,
            }],
        }
    }

    pub fn components(&self) -> &[ProductComponent] {
        &self.components
    }

    /// Mixture moments: component reports combined by the law of total
    /// variance.
    pub fn moments(&self) -> Result<MomentReport> {
        let reports: Vec<MomentReport> = self.components.iter().map(|c| c.moments()).collect();
        MomentReport::mixture(
            self.components
                .iter()
                .zip(&reports)
                .map(|(c, r)| (c.weight, r)),
        )
    }
}

/// Moments of a separable ensemble.
pub fn ensemble_moments(ens: &SeparableEnsemble) -> Result<MomentReport> {
    ens.moments()
}
